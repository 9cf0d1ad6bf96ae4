//! Exact rationals, quadratic irrationals and certified reals.

mod certified;
mod quadratic;
mod rational;
mod real;

pub use certified::{CertifiedReal, Enclosure, START_DIGITS};
pub use quadratic::{is_perfect_square, QuadOrRational, Quadratic};
pub use rational::Rational;
pub use real::AlgebraicReal;

pub(crate) use quadratic::{floor_of as quadratic_floor, sign_of as quadratic_sign};
pub(crate) use rational::{parse_int_at, parse_rational_at};
pub(crate) use real::exceeds_one;

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::error::Result;

/// Digits a certified value may be refined to before giving up.
pub const DEFAULT_PRECISION_BUDGET: u32 = 200;

/// Environment variable the CLI reads for the default precision budget.
pub const PRECISION_ENV: &str = "MODBM_PRECISION";

pub fn compare(x: &AlgebraicReal, y: &Rational) -> Result<Ordering> {
    x.cmp_rational(y)
}

pub fn floor_multiple(x: &AlgebraicReal, n: &BigInt) -> Result<BigInt> {
    x.floor_multiple(n)
}

pub fn frac_of_quotient(m: &BigInt, x: &AlgebraicReal) -> Result<(AlgebraicReal, BigInt)> {
    x.frac_of_quotient(m)
}
