use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::certified::Enclosure;
use super::Rational;
use crate::error::{Error, Result};

/// `(e + f*sqrt(d)) / g` with `f != 0`, `d > 1` not a perfect square, `g > 0`
/// and `gcd(e, f, g) = 1`.
///
/// Every comparison against a rational reduces to the sign of `a + b*sqrt(d)`
/// for integers `a`, `b`, which is decided by squaring; nothing here can be
/// undecidable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quadratic {
    e: BigInt,
    f: BigInt,
    d: BigInt,
    g: BigInt,
}

/// Result of field arithmetic in Q(sqrt(d)): the irrational part may cancel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadOrRational {
    Quad(Quadratic),
    Rat(Rational),
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

/// Sign of `a + b*sqrt(d)` for `d >= 0` not a perfect square (or `b == 0`).
pub(crate) fn sign_of(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let zero = BigInt::zero();
    match (a.cmp(&zero), b.cmp(&zero)) {
        (x, Ordering::Equal) => x,
        (Ordering::Equal, y) => y,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        // a > 0 > b: compare a^2 with b^2 d
        (Ordering::Greater, Ordering::Less) => (a * a).cmp(&(b * b * d)),
        (Ordering::Less, Ordering::Greater) => (b * b * d).cmp(&(a * a)),
    }
}

/// `floor((e + f*sqrt(d))/g)` for `g > 0`, `f != 0`, `d` not a square.
pub(crate) fn floor_of(e: &BigInt, f: &BigInt, d: &BigInt, g: &BigInt) -> BigInt {
    // e + f√d lies strictly inside (n, n + 1) for the integer n below
    let s = (f * f * d).sqrt();
    let n = if f.is_positive() { e + s } else { e - s - 1 };
    n.div_floor(g)
}

impl Quadratic {
    /// Canonicalizes `(e + f*sqrt(d))/g`, collapsing to a rational when `f = 0`
    /// or `d` is a perfect square.
    pub fn build(e: BigInt, f: BigInt, d: BigInt, g: BigInt) -> Result<QuadOrRational> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if d.is_negative() {
            return Err(Error::Range(format!("negative radicand {d}")));
        }
        if f.is_zero() || is_perfect_square(&d) {
            let root = d.sqrt();
            return Ok(QuadOrRational::Rat(Rational::new(e + f * root, g)?));
        }
        Ok(QuadOrRational::Quad(Self::canonical(e, f, d, g)))
    }

    fn canonical(mut e: BigInt, mut f: BigInt, d: BigInt, mut g: BigInt) -> Self {
        if g.is_negative() {
            e = -e;
            f = -f;
            g = -g;
        }
        let common = e.gcd(&f).gcd(&g);
        if !common.is_one() {
            e /= &common;
            f /= &common;
            g /= &common;
        }
        Quadratic { e, f, d, g }
    }

    fn from_parts(e: BigInt, f: BigInt, d: &BigInt, g: BigInt) -> QuadOrRational {
        if f.is_zero() {
            QuadOrRational::Rat(Rational::new(e, g).expect("nonzero denominator"))
        } else {
            QuadOrRational::Quad(Self::canonical(e, f, d.clone(), g))
        }
    }

    pub fn e(&self) -> &BigInt {
        &self.e
    }
    pub fn f(&self) -> &BigInt {
        &self.f
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }
    pub fn g(&self) -> &BigInt {
        &self.g
    }

    /// Re-expresses `self` over radicand `target` when `d * target` is a
    /// perfect square, since then `sqrt(d) = s*sqrt(target)/target`.
    pub fn rebase(&self, target: &BigInt) -> Option<Quadratic> {
        if &self.d == target {
            return Some(self.clone());
        }
        let prod = &self.d * target;
        if !is_perfect_square(&prod) {
            return None;
        }
        let s = prod.sqrt();
        Some(Self::canonical(
            &self.e * target,
            &self.f * s,
            target.clone(),
            &self.g * target,
        ))
    }

    fn aligned(&self, other: &Quadratic) -> Result<Quadratic> {
        other
            .rebase(&self.d)
            .ok_or_else(|| Error::MixedRadicand(self.d.to_string(), other.d.to_string()))
    }

    pub fn sign(&self) -> Ordering {
        sign_of(&self.e, &self.f, &self.d)
    }

    /// Never `Equal`: the value is irrational.
    pub fn cmp_rational(&self, y: &Rational) -> Ordering {
        // (e + f√d)/g - p/q has the sign of (q e - g p) + q f √d
        let (p, q) = (y.numer(), y.denom());
        let a = q * &self.e - &self.g * p;
        let b = q * &self.f;
        sign_of(&a, &b, &self.d)
    }

    pub fn floor(&self) -> BigInt {
        floor_of(&self.e, &self.f, &self.d, &self.g)
    }

    pub fn neg(&self) -> Quadratic {
        Quadratic {
            e: -&self.e,
            f: -&self.f,
            d: self.d.clone(),
            g: self.g.clone(),
        }
    }

    pub fn add_rational(&self, r: &Rational) -> Quadratic {
        let (p, q) = (r.numer(), r.denom());
        Self::canonical(
            &self.e * q + p * &self.g,
            &self.f * q,
            self.d.clone(),
            &self.g * q,
        )
    }

    pub fn mul_rational(&self, r: &Rational) -> QuadOrRational {
        let (p, q) = (r.numer(), r.denom());
        Self::from_parts(&self.e * p, &self.f * p, &self.d, &self.g * q)
    }

    pub fn mul_integer(&self, n: &BigInt) -> QuadOrRational {
        Self::from_parts(&self.e * n, &self.f * n, &self.d, self.g.clone())
    }

    pub fn add(&self, other: &Quadratic) -> Result<QuadOrRational> {
        let o = self.aligned(other)?;
        Ok(Self::from_parts(
            &self.e * &o.g + &o.e * &self.g,
            &self.f * &o.g + &o.f * &self.g,
            &self.d,
            &self.g * &o.g,
        ))
    }

    pub fn sub(&self, other: &Quadratic) -> Result<QuadOrRational> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Quadratic) -> Result<QuadOrRational> {
        let o = self.aligned(other)?;
        Ok(Self::from_parts(
            &self.e * &o.e + &self.f * &o.f * &self.d,
            &self.e * &o.f + &o.e * &self.f,
            &self.d,
            &self.g * &o.g,
        ))
    }

    pub fn recip(&self) -> Quadratic {
        // g / (e + f√d) = g (e - f√d) / (e² - f² d); the norm is nonzero
        let norm = &self.e * &self.e - &self.f * &self.f * &self.d;
        Self::canonical(
            &self.g * &self.e,
            -(&self.g * &self.f),
            self.d.clone(),
            norm,
        )
    }

    /// Closed rational interval of width `1/(g 10^digits)` around the value.
    pub fn enclosure(&self, digits: u32) -> Enclosure {
        let scale = BigInt::from(10u32).pow(digits);
        let s = (&self.f * &self.f * &self.d * &scale * &scale).sqrt();
        let base = &self.e * &scale;
        let den = &self.g * &scale;
        let (lo, hi) = if self.f.is_positive() {
            (&base + &s, &base + &s + 1)
        } else {
            (&base - &s - 1, &base - &s)
        };
        Enclosure::new(
            Rational::new(lo, den.clone()).expect("nonzero"),
            Rational::new(hi, den).expect("nonzero"),
        )
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "quad:{},{},{},{}", self.e, self.f, self.d, self.g)
    }
}

impl fmt::Debug for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}*sqrt({}))/{}", self.e, self.f, self.d, self.g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64, f: i64, d: i64, g: i64) -> Quadratic {
        match Quadratic::build(e.into(), f.into(), d.into(), g.into()).unwrap() {
            QuadOrRational::Quad(x) => x,
            QuadOrRational::Rat(r) => panic!("unexpectedly rational {r}"),
        }
    }

    #[test]
    fn canonical_form() {
        let x = q(2, 4, 5, -6);
        assert_eq!(x.to_string(), "quad:-1,-2,5,3");
        assert!(matches!(
            Quadratic::build(1.into(), 1.into(), 9.into(), 2.into()).unwrap(),
            QuadOrRational::Rat(r) if r == 2i64
        ));
        assert!(Quadratic::build(1.into(), 1.into(), 2.into(), 0.into()).is_err());
        assert!(Quadratic::build(1.into(), 1.into(), (-2).into(), 1.into()).is_err());
    }

    #[test]
    fn compare_examples() {
        let sqrt2 = q(0, 1, 2, 1);
        assert_eq!(sqrt2.cmp_rational(&Rational::ratio(3, 2)), Ordering::Less);
        let phi = q(1, 1, 5, 2);
        // 125 > 121
        assert_eq!(phi.cmp_rational(&Rational::ratio(8, 5)), Ordering::Greater);
        assert_eq!(phi.cmp_rational(&Rational::ratio(13, 8)), Ordering::Less);
    }

    #[test]
    fn floors() {
        assert_eq!(q(0, 1, 2, 1).floor(), BigInt::from(1));
        assert_eq!(q(0, -1, 2, 1).floor(), BigInt::from(-2));
        assert_eq!(q(0, 5, 2, 1).floor(), BigInt::from(7));
        assert_eq!(q(4, 4, 5, 2).floor(), BigInt::from(6));
        assert_eq!(q(-7, 1, 2, 3).floor(), BigInt::from(-2));
    }

    #[test]
    fn field_ops() {
        let sqrt2 = q(0, 1, 2, 1);
        assert_eq!(
            sqrt2.mul(&sqrt2).unwrap(),
            QuadOrRational::Rat(Rational::from(2i64))
        );
        assert_eq!(sqrt2.recip().to_string(), "quad:0,1,2,2");
        // sqrt(8) rebases onto sqrt(2) as 2 sqrt(2)
        let sqrt8 = q(0, 1, 8, 1);
        assert_eq!(
            sqrt2.add(&sqrt8).unwrap(),
            QuadOrRational::Quad(q(0, 3, 2, 1))
        );
        assert!(matches!(
            sqrt2.add(&q(0, 1, 3, 1)),
            Err(Error::MixedRadicand(_, _))
        ));
    }

    #[test]
    fn enclosure_brackets_value() {
        let phi = q(1, 1, 5, 2);
        let enc = phi.enclosure(30);
        assert_eq!(phi.cmp_rational(enc.lo()), Ordering::Greater);
        assert_eq!(phi.cmp_rational(enc.hi()), Ordering::Less);
        let neg = q(1, -1, 5, 2);
        let enc = neg.enclosure(10);
        assert_eq!(neg.cmp_rational(enc.lo()), Ordering::Greater);
        assert_eq!(neg.cmp_rational(enc.hi()), Ordering::Less);
    }
}
