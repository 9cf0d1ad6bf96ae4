use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::certified::{CertifiedReal, Enclosure};
use super::quadratic::{QuadOrRational, Quadratic};
use super::rational::{parse_int_at, parse_rational_at};
use super::{Rational, DEFAULT_PRECISION_BUDGET};
use crate::error::{Error, Result};

/// A real constant that supports certified floor, fractional part and
/// comparison against rationals.
///
/// Rationals and quadratic irrationals are exact; certified reals are refined
/// until a question is decided or the precision budget runs out. Arithmetic is
/// closed inside Q(sqrt(d)); mixing two unrelated radicands is an error, and
/// anything touching a certified real becomes certified.
#[derive(Clone, Debug)]
pub enum AlgebraicReal {
    Rational(Rational),
    Quadratic(Quadratic),
    Certified(CertifiedReal),
}

impl From<Rational> for AlgebraicReal {
    fn from(r: Rational) -> Self {
        AlgebraicReal::Rational(r)
    }
}

impl From<QuadOrRational> for AlgebraicReal {
    fn from(q: QuadOrRational) -> Self {
        match q {
            QuadOrRational::Quad(q) => AlgebraicReal::Quadratic(q),
            QuadOrRational::Rat(r) => AlgebraicReal::Rational(r),
        }
    }
}

impl From<CertifiedReal> for AlgebraicReal {
    fn from(c: CertifiedReal) -> Self {
        AlgebraicReal::Certified(c)
    }
}

impl AlgebraicReal {
    /// `(e + f*sqrt(d)) / g`, collapsing to a rational when the radical vanishes.
    pub fn quadratic(
        e: impl Into<BigInt>,
        f: impl Into<BigInt>,
        d: impl Into<BigInt>,
        g: impl Into<BigInt>,
    ) -> Result<Self> {
        Ok(Quadratic::build(e.into(), f.into(), d.into(), g.into())?.into())
    }

    pub fn sqrt(n: u64) -> Self {
        Self::quadratic(0, 1, n, 1).expect("valid radicand")
    }

    /// `(1 + sqrt(5)) / 2`.
    pub fn golden_ratio() -> Self {
        Self::quadratic(1, 1, 5, 2).expect("valid radicand")
    }

    pub fn is_irrational(&self) -> bool {
        !matches!(self, AlgebraicReal::Rational(_))
    }

    /// Errors with `NotIrrational` for the rational variant.
    pub fn require_irrational(&self) -> Result<&Self> {
        match self {
            AlgebraicReal::Rational(r) => Err(Error::NotIrrational(format!("rat:{r}"))),
            _ => Ok(self),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            AlgebraicReal::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Precision budget for certified values; `None` for exact variants.
    pub fn budget(&self) -> Option<u32> {
        match self {
            AlgebraicReal::Certified(c) => Some(c.budget()),
            _ => None,
        }
    }

    pub fn with_budget(&self, budget: u32) -> Self {
        match self {
            AlgebraicReal::Certified(c) => AlgebraicReal::Certified(c.with_budget(budget)),
            other => other.clone(),
        }
    }

    /// An enclosure at roughly `digits` decimal digits, `None` if a certified
    /// value cannot yet produce one.
    pub fn enclosure(&self, digits: u32) -> Option<Enclosure> {
        match self {
            AlgebraicReal::Rational(r) => Some(Enclosure::point(r.clone())),
            AlgebraicReal::Quadratic(q) => Some(q.enclosure(digits)),
            AlgebraicReal::Certified(c) => c.approx(digits),
        }
    }

    fn to_certified(&self, budget: u32) -> CertifiedReal {
        match self {
            AlgebraicReal::Certified(c) => c.clone(),
            AlgebraicReal::Rational(r) => {
                let r = r.clone();
                CertifiedReal::from_source(format!("rat:{r}"), budget, move |_| {
                    Some(Enclosure::point(r.clone()))
                })
            }
            AlgebraicReal::Quadratic(q) => {
                let q = q.clone();
                CertifiedReal::from_source(q.to_string(), budget, move |digits| {
                    Some(q.enclosure(digits))
                })
            }
        }
    }

    /// Exact for rational and quadratic values; `Equal` only for rationals.
    pub fn cmp_rational(&self, y: &Rational) -> Result<Ordering> {
        match self {
            AlgebraicReal::Rational(r) => Ok(r.cmp(y)),
            AlgebraicReal::Quadratic(q) => Ok(q.cmp_rational(y)),
            AlgebraicReal::Certified(c) => c.decide(&format!("comparison with {y}"), |enc| {
                if enc.lo() > y {
                    Some(Ordering::Greater)
                } else if enc.hi() < y {
                    Some(Ordering::Less)
                } else {
                    None
                }
            }),
        }
    }

    pub fn signum(&self) -> Result<Ordering> {
        self.cmp_rational(&Rational::zero())
    }

    /// Compares two reals through the sign of their difference.
    pub fn cmp_real(&self, other: &AlgebraicReal) -> Result<Ordering> {
        self.sub(other)?.signum()
    }

    pub fn floor(&self) -> Result<BigInt> {
        match self {
            AlgebraicReal::Rational(r) => Ok(r.floor()),
            AlgebraicReal::Quadratic(q) => Ok(q.floor()),
            AlgebraicReal::Certified(c) => c.decide("floor", |enc| {
                let lo = enc.lo().floor();
                (lo == enc.hi().floor()).then_some(lo)
            }),
        }
    }

    /// `floor(n * self)`.
    pub fn floor_multiple(&self, n: &BigInt) -> Result<BigInt> {
        self.mul_integer(n).floor()
    }

    /// `(frac(self), floor(self))`.
    pub fn split_fract(&self) -> Result<(AlgebraicReal, BigInt)> {
        let int = self.floor()?;
        let frac = self.add_rational(&-Rational::from_integer(int.clone()));
        Ok((frac, int))
    }

    /// `({m / self}, floor(m / self))`; quadratic values stay quadratic.
    pub fn frac_of_quotient(&self, m: &BigInt) -> Result<(AlgebraicReal, BigInt)> {
        self.recip()?.mul_integer(m).split_fract()
    }

    /// `({m * self}, floor(m * self))`.
    pub fn frac_of_multiple(&self, m: &BigInt) -> Result<(AlgebraicReal, BigInt)> {
        self.mul_integer(m).split_fract()
    }

    pub fn neg(&self) -> AlgebraicReal {
        match self {
            AlgebraicReal::Rational(r) => AlgebraicReal::Rational(-r),
            AlgebraicReal::Quadratic(q) => AlgebraicReal::Quadratic(q.neg()),
            AlgebraicReal::Certified(c) => {
                AlgebraicReal::Certified(c.unary(format!("-({})", c.label()), |x| Some(x.neg())))
            }
        }
    }

    pub fn add_rational(&self, r: &Rational) -> AlgebraicReal {
        match self {
            AlgebraicReal::Rational(x) => AlgebraicReal::Rational(x + r),
            AlgebraicReal::Quadratic(q) => AlgebraicReal::Quadratic(q.add_rational(r)),
            AlgebraicReal::Certified(c) => {
                let shift = Enclosure::point(r.clone());
                AlgebraicReal::Certified(c.unary(format!("({}) + {r}", c.label()), move |x| {
                    Some(x.add(&shift))
                }))
            }
        }
    }

    pub fn mul_rational(&self, r: &Rational) -> AlgebraicReal {
        match self {
            AlgebraicReal::Rational(x) => AlgebraicReal::Rational(x * r),
            AlgebraicReal::Quadratic(q) => q.mul_rational(r).into(),
            AlgebraicReal::Certified(c) => {
                let factor = Enclosure::point(r.clone());
                AlgebraicReal::Certified(c.unary(format!("({}) * {r}", c.label()), move |x| {
                    Some(x.mul(&factor))
                }))
            }
        }
    }

    pub fn mul_integer(&self, n: &BigInt) -> AlgebraicReal {
        match self {
            AlgebraicReal::Quadratic(q) => q.mul_integer(n).into(),
            other => other.mul_rational(&Rational::from_integer(n.clone())),
        }
    }

    pub fn recip(&self) -> Result<AlgebraicReal> {
        match self {
            AlgebraicReal::Rational(x) => Ok(AlgebraicReal::Rational(x.recip()?)),
            AlgebraicReal::Quadratic(q) => Ok(AlgebraicReal::Quadratic(q.recip())),
            AlgebraicReal::Certified(c) => Ok(AlgebraicReal::Certified(
                c.unary(format!("1/({})", c.label()), |x| x.recip()),
            )),
        }
    }

    fn certified_pair(&self, other: &AlgebraicReal) -> (CertifiedReal, CertifiedReal) {
        let budget = self
            .budget()
            .or(other.budget())
            .unwrap_or(DEFAULT_PRECISION_BUDGET);
        (self.to_certified(budget), other.to_certified(budget))
    }

    pub fn add(&self, other: &AlgebraicReal) -> Result<AlgebraicReal> {
        use AlgebraicReal::*;
        match (self, other) {
            (Rational(a), b) => Ok(b.add_rational(a)),
            (a, Rational(b)) => Ok(a.add_rational(b)),
            (Quadratic(a), Quadratic(b)) => Ok(a.add(b)?.into()),
            _ => {
                let (a, b) = self.certified_pair(other);
                let label = format!("({}) + ({})", a.label(), b.label());
                Ok(Certified(a.binary(&b, label, |x, y| Some(x.add(y)))))
            }
        }
    }

    pub fn sub(&self, other: &AlgebraicReal) -> Result<AlgebraicReal> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AlgebraicReal) -> Result<AlgebraicReal> {
        use AlgebraicReal::*;
        match (self, other) {
            (Rational(a), b) => Ok(b.mul_rational(a)),
            (a, Rational(b)) => Ok(a.mul_rational(b)),
            (Quadratic(a), Quadratic(b)) => Ok(a.mul(b)?.into()),
            _ => {
                let (a, b) = self.certified_pair(other);
                let label = format!("({}) * ({})", a.label(), b.label());
                Ok(Certified(a.binary(&b, label, |x, y| Some(x.mul(y)))))
            }
        }
    }

    pub fn div(&self, other: &AlgebraicReal) -> Result<AlgebraicReal> {
        self.mul(&other.recip()?)
    }

    /// Decimal digits for display; the last digit may be off by one for
    /// certified values.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self.enclosure(digits as u32 + 4) {
            Some(enc) => enc.midpoint().to_decimal(digits),
            None => "?".to_string(),
        }
    }

    /// Parses a constant with an explicit precision budget for `dec:` values.
    pub fn parse_with_budget(s: &str, budget: u32) -> Result<Self> {
        parse_constant(s, budget)
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicReal::Rational(r) => write!(f, "rat:{r}"),
            AlgebraicReal::Quadratic(q) => write!(f, "{q}"),
            AlgebraicReal::Certified(c) => write!(f, "{}", c.label()),
        }
    }
}

impl Serialize for AlgebraicReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `rat:<num>/<den>`, `quad:<e>,<f>,<d>,<g>` or `dec:<decimal>`.
impl FromStr for AlgebraicReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_constant(s, DEFAULT_PRECISION_BUDGET)
    }
}

fn parse_constant(s: &str, budget: u32) -> Result<AlgebraicReal> {
    if let Some(body) = s.strip_prefix("rat:") {
        return Ok(AlgebraicReal::Rational(parse_rational_at(body, s, 4)?));
    }
    if let Some(body) = s.strip_prefix("quad:") {
        let mut fields = Vec::with_capacity(4);
        let mut offset = 5;
        for part in body.split(',') {
            fields.push(parse_int_at(part, s, offset)?);
            offset += part.len() + 1;
        }
        if fields.len() != 4 {
            return Err(Error::parse(
                s,
                s.len(),
                format!("quad needs 4 fields e,f,d,g, found {}", fields.len()),
            ));
        }
        let g = fields.pop().expect("len 4");
        let d = fields.pop().expect("len 4");
        let f = fields.pop().expect("len 4");
        let e = fields.pop().expect("len 4");
        if d < BigInt::zero() {
            return Err(Error::parse(s, 5, "radicand must be nonnegative"));
        }
        if g.is_zero() {
            return Err(Error::parse(s, s.len() - 1, "zero denominator"));
        }
        return Ok(Quadratic::build(e, f, d, g)?.into());
    }
    if let Some(body) = s.strip_prefix("dec:") {
        return CertifiedReal::from_decimal_literal(body, budget)
            .map(AlgebraicReal::Certified)
            .map_err(|e| match e {
                Error::Parse {
                    position, message, ..
                } => Error::parse(s, position + 4, message),
                other => other,
            });
    }
    Err(Error::parse(s, 0, "expected rat:, quad: or dec: prefix"))
}

/// `true` for values strictly greater than one.
pub(crate) fn exceeds_one(x: &AlgebraicReal) -> Result<bool> {
    Ok(x.cmp_rational(&Rational::one())? == Ordering::Greater)
}
