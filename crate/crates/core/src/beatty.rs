//! Beatty sequences `floor(n alpha)` and the fractional-part membership test
//! `m = floor(n alpha)` for some `n >= 1` iff `{m / alpha} > 1 - 1/alpha`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{exceeds_one, quadratic_floor, quadratic_sign, AlgebraicReal, Rational};

/// Integer polynomial, coefficients stored constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolynomialIntCoeffs {
    coeffs: Vec<BigInt>,
}

impl PolynomialIntCoeffs {
    /// Nonconstant with nonnegative coefficients and a positive leading
    /// coefficient, so `f(a) >= 1` for every `a >= 1`.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let poly = Self::new_relaxed(coeffs)?;
        if poly.coeffs.iter().any(Signed::is_negative) {
            return Err(Error::Range(format!(
                "{poly} has a negative coefficient; use the relaxed constructor for Z[x]"
            )));
        }
        Ok(poly)
    }

    /// Any nonconstant polynomial in Z[x].
    pub fn new_relaxed(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Range("polynomial must have degree >= 1".into()));
        }
        Ok(PolynomialIntCoeffs { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x^2`.
    pub fn square() -> Self {
        Self::from_i64(&[0, 0, 1]).expect("valid")
    }

    /// `x`.
    pub fn identity() -> Self {
        Self::from_i64(&[0, 1]).expect("valid")
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, a: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * a + c)
    }

    pub fn eval_u64(&self, a: u64) -> BigInt {
        self.eval(&BigInt::from(a))
    }

    /// `poly:c0,...,cd`; the relaxed grammar also admits negative coefficients.
    pub fn parse_relaxed(s: &str) -> Result<Self> {
        Self::new_relaxed(parse_coeffs(s)?)
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<BigInt>> {
    let body = s
        .strip_prefix("poly:")
        .ok_or_else(|| Error::parse(s, 0, "expected poly: prefix"))?;
    let mut out = Vec::new();
    let mut offset = 5;
    for part in body.split(',') {
        out.push(crate::exactnum::parse_int_at(part, s, offset)?);
        offset += part.len() + 1;
    }
    Ok(out)
}

impl FromStr for PolynomialIntCoeffs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_coeffs(s)?)
    }
}

impl fmt::Display for PolynomialIntCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poly:")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolynomialIntCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for PolynomialIntCoeffs {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn eval_poly(f: &PolynomialIntCoeffs, a: &BigInt) -> BigInt {
    f.eval(a)
}

/// `(e + f sqrt(d)) / g` for `1/alpha` with plain integer parts, used by the
/// membership fast path.
#[derive(Clone, Debug)]
struct QuadParts {
    e: BigInt,
    f: BigInt,
    d: BigInt,
    g: BigInt,
}

/// The Beatty sequence of a fixed irrational `alpha > 1`.
#[derive(Clone, Debug)]
pub struct Beatty {
    alpha: AlgebraicReal,
    inv: AlgebraicReal,
    threshold: AlgebraicReal,
    fast: Option<QuadParts>,
}

impl Beatty {
    pub fn new(alpha: AlgebraicReal) -> Result<Self> {
        alpha.require_irrational()?;
        if !exceeds_one(&alpha)? {
            return Err(Error::HypothesisViolated(format!(
                "alpha = {alpha} must exceed 1"
            )));
        }
        let inv = alpha.recip()?;
        let threshold = inv.neg().add_rational(&Rational::one());
        let fast = match &inv {
            AlgebraicReal::Quadratic(q) => Some(QuadParts {
                e: q.e().clone(),
                f: q.f().clone(),
                d: q.d().clone(),
                g: q.g().clone(),
            }),
            _ => None,
        };
        Ok(Beatty {
            alpha,
            inv,
            threshold,
            fast,
        })
    }

    pub fn alpha(&self) -> &AlgebraicReal {
        &self.alpha
    }

    /// `1/alpha`.
    pub fn inverse(&self) -> &AlgebraicReal {
        &self.inv
    }

    /// `1 - 1/alpha`, the left end of the membership window.
    pub fn threshold(&self) -> &AlgebraicReal {
        &self.threshold
    }

    /// `floor(n alpha)` for `n >= 1`.
    pub fn term(&self, n: &BigInt) -> Result<BigInt> {
        if !n.is_positive() {
            return Err(Error::Range(format!("Beatty index {n} must be >= 1")));
        }
        self.alpha.floor_multiple(n)
    }

    /// Terms for `n = 1..=count`.
    pub fn terms(&self, count: u64) -> Result<Vec<BigInt>> {
        (1..=count).map(|n| self.term(&BigInt::from(n))).collect()
    }

    /// `{m / alpha}`.
    pub fn frac_quotient(&self, m: &BigInt) -> Result<AlgebraicReal> {
        Ok(self.inv.frac_of_multiple(m)?.0)
    }

    /// Whether `x`, reduced mod 1, lies in `(1 - 1/alpha, 1)`.
    pub fn in_window(&self, x: &AlgebraicReal) -> Result<bool> {
        let (frac, _) = x.split_fract()?;
        Ok(frac.cmp_real(&self.threshold)? == Ordering::Greater)
    }

    /// `m` occurs as `floor(n alpha)` for some `n >= 1`; always false for
    /// `m <= 0`.
    pub fn contains(&self, m: &BigInt) -> Result<bool> {
        if !m.is_positive() {
            return Ok(false);
        }
        match &self.fast {
            Some(q) => {
                // {m/alpha} - (1 - 1/alpha)
                //   = ((m+1) e - (fl+1) g + (m+1) f sqrt(d)) / g
                let fl = quadratic_floor(&(m * &q.e), &(m * &q.f), &q.d, &q.g);
                let m1 = m + 1;
                let a = &m1 * &q.e - (fl + 1) * &q.g;
                let b = &m1 * &q.f;
                Ok(quadratic_sign(&a, &b, &q.d) == Ordering::Greater)
            }
            None => self.in_window(&self.inv.mul_integer(m)),
        }
    }

    /// Window test for `x = (a + b sqrt(d))/g` written over the denominator
    /// and radicand of `1/alpha`: whether `{x} > 1 - 1/alpha`.
    pub(crate) fn window_test_parts(&self, a: &BigInt, b: &BigInt) -> Option<bool> {
        let q = self.fast.as_ref()?;
        if b.is_zero() {
            // rational x; its fractional part is compared directly
            let x = Rational::new(a.clone(), q.g.clone()).ok()?;
            return self.in_window(&AlgebraicReal::Rational(x)).ok();
        }
        // {x} - (1 - 1/alpha) = (a - (fl + 1) g + e + (b + f) sqrt(d)) / g
        let fl = quadratic_floor(a, b, &q.d, &q.g);
        let lhs = a - (fl + 1) * &q.g + &q.e;
        let rhs = b + &q.f;
        Some(quadratic_sign(&lhs, &rhs, &q.d) == Ordering::Greater)
    }

    /// Both routes for `f(a_1) + ... + f(a_k)`: direct membership of the
    /// integer sum and the window test on the summed fractional parts.
    pub fn ksum_hits(&self, f: &PolynomialIntCoeffs, a: &[BigInt]) -> Result<KsumOutcome> {
        if a.len() < 2 {
            return Err(Error::Range(format!(
                "need k >= 2 summands, got {}",
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|x| !x.is_positive()) {
            return Err(Error::Range(format!("summand index {bad} must be >= 1")));
        }
        let values: Vec<BigInt> = a.iter().map(|x| f.eval(x)).collect();
        let sum: BigInt = values.iter().sum();
        let integer_test = self.contains(&sum)?;
        let mut frac_sum = AlgebraicReal::Rational(Rational::zero());
        for v in &values {
            frac_sum = frac_sum.add(&self.frac_quotient(v)?)?;
        }
        let window_test = self.in_window(&frac_sum)?;
        if integer_test != window_test {
            return Err(Error::InternalProofCheckFailed(format!(
                "Beatty membership of {sum} ({integer_test}) disagrees with the fractional window ({window_test})"
            )));
        }
        Ok(KsumOutcome {
            summands: a.to_vec(),
            f_values: values,
            f_sum: sum,
            integer_test,
            window_test,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsumOutcome {
    pub summands: Vec<BigInt>,
    pub f_values: Vec<BigInt>,
    pub f_sum: BigInt,
    pub integer_test: bool,
    pub window_test: bool,
}

impl KsumOutcome {
    pub fn hit(&self) -> bool {
        self.integer_test
    }
}

pub fn beatty_term(alpha: &AlgebraicReal, n: &BigInt) -> Result<BigInt> {
    Beatty::new(alpha.clone())?.term(n)
}

pub fn beatty_contains(alpha: &AlgebraicReal, m: &BigInt) -> Result<bool> {
    Beatty::new(alpha.clone())?.contains(m)
}

pub fn ksum_hits_beatty(
    alpha: &AlgebraicReal,
    f: &PolynomialIntCoeffs,
    k: usize,
    a: &[BigInt],
) -> Result<KsumOutcome> {
    if k < 2 || a.len() != k {
        return Err(Error::Range(format!(
            "need exactly k >= 2 summands, k = {k}, got {}",
            a.len()
        )));
    }
    Beatty::new(alpha.clone())?.ksum_hits(f, a)
}

/// Number of terms `floor(n alpha) <= limit`, i.e. `floor((limit + 1)/alpha)`
/// adjusted for the open right end.
pub fn count_terms_up_to(alpha: &AlgebraicReal, limit: u64) -> Result<u64> {
    let b = Beatty::new(alpha.clone())?;
    // floor(n alpha) <= L  iff  n alpha < L + 1  iff  n < (L + 1)/alpha
    let bound = b.inv.mul_integer(&BigInt::from(limit + 1)).floor()?;
    let n: u64 = bound
        .try_into()
        .map_err(|_| Error::Range("count overflow".into()))?;
    Ok(n)
}
