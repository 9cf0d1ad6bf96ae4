use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::Rational;
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with rational endpoints known to contain a real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order: {lo} > {hi}");
        Enclosure { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    /// `mid ± radius`.
    pub fn around(mid: &Rational, radius: &Rational) -> Self {
        Enclosure::new(mid - radius, mid + radius)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from(2i64)
    }

    pub fn radius(&self) -> Rational {
        (&self.hi - &self.lo) / Rational::from(2i64)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = products.iter().min().expect("nonempty").clone();
        let hi = products.iter().max().expect("nonempty").clone();
        Enclosure::new(lo, hi)
    }

    /// `None` when the interval touches zero.
    pub fn recip(&self) -> Option<Enclosure> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Some(Enclosure::new(self.hi.recip().ok()?, self.lo.recip().ok()?))
        } else {
            None
        }
    }

    /// Widens both ends onto the grid `10^-digits` so that denominators stay
    /// bounded through long chains of operations.
    pub fn round_outward(&self, digits: u32) -> Enclosure {
        let scale = BigInt::from(10u32).pow(digits);
        let lo = (&self.lo * &Rational::from_integer(scale.clone())).floor();
        let hi = (&self.hi * &Rational::from_integer(scale.clone())).ceil();
        Enclosure::new(
            Rational::new(lo, scale.clone()).expect("nonzero"),
            Rational::new(hi, scale).expect("nonzero"),
        )
    }
}

type Source = dyn Fn(u32) -> Option<Enclosure> + Send + Sync;

/// Digits requested on the first refinement step; each step doubles it.
pub const START_DIGITS: u32 = 16;
const GUARD_DIGITS: u32 = 4;

/// A real known through enclosures of shrinking width.
///
/// `source(digits)` must return an interval of width about `10^-digits`
/// containing the value, or `None` if it cannot yet (a divisor straddling zero).
/// Refinement stops at the precision budget, or earlier at `max_digits` for
/// values entered as finite decimal literals.
#[derive(Clone)]
pub struct CertifiedReal {
    label: Arc<str>,
    source: Arc<Source>,
    budget: u32,
    max_digits: Option<u32>,
}

impl CertifiedReal {
    pub fn from_source(
        label: impl Into<String>,
        budget: u32,
        source: impl Fn(u32) -> Option<Enclosure> + Send + Sync + 'static,
    ) -> Self {
        CertifiedReal {
            label: label.into().into(),
            source: Arc::new(source),
            budget,
            max_digits: None,
        }
    }

    /// A fixed `mid ± radius`; no refinement is possible.
    pub fn with_radius(mid: Rational, radius: Rational, budget: u32) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::Range(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let label = format!("{} ± {}", mid, radius);
        let enc = Enclosure::around(&mid, &radius);
        Ok(CertifiedReal {
            label: label.into(),
            source: Arc::new(move |_| Some(enc.clone())),
            budget,
            max_digits: Some(0),
        })
    }

    /// A decimal literal such as `1.41421356`, with radius one unit in the
    /// last place.
    pub fn from_decimal_literal(text: &str, budget: u32) -> Result<Self> {
        let (mid, places) = parse_decimal(text)?;
        let ulp = Rational::new(1, BigInt::from(10u32).pow(places))?;
        let enc = Enclosure::around(&mid, &ulp);
        Ok(CertifiedReal {
            label: format!("dec:{text}").into(),
            source: Arc::new(move |_| Some(enc.clone())),
            budget,
            max_digits: Some(places),
        })
    }

    /// Euler's number from the factorial series.
    pub fn euler(budget: u32) -> Self {
        Self::from_source("e", budget, |digits| {
            let scale = BigInt::from(10u32).pow(digits + GUARD_DIGITS);
            let mut term = scale.clone();
            let mut sum = BigInt::zero();
            let mut j = 0u32;
            while !term.is_zero() {
                sum += &term;
                j += 1;
                term /= j;
            }
            // each truncated division loses < 1 ulp and the tail is < 2 ulp
            let slack = BigInt::from(j) + 2;
            Some(Enclosure::new(
                Rational::new(sum.clone(), scale.clone()).ok()?,
                Rational::new(sum + slack, scale).ok()?,
            ))
        })
    }

    /// pi via Machin's formula `16 atan(1/5) - 4 atan(1/239)`.
    pub fn pi(budget: u32) -> Self {
        Self::from_source("pi", budget, |digits| {
            let scale = BigInt::from(10u32).pow(digits + GUARD_DIGITS);
            let (a, ea) = atan_inv_scaled(5, &scale);
            let (b, eb) = atan_inv_scaled(239, &scale);
            let mid = a * 16 - b * 4;
            let err = ea * 16 + eb * 4;
            Some(Enclosure::new(
                Rational::new(&mid - &err, scale.clone()).ok()?,
                Rational::new(mid + err, scale).ok()?,
            ))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn with_budget(&self, budget: u32) -> Self {
        CertifiedReal {
            budget,
            ..self.clone()
        }
    }

    pub fn approx(&self, digits: u32) -> Option<Enclosure> {
        (self.source)(digits)
    }

    fn limit(&self) -> u32 {
        match self.max_digits {
            Some(m) => m.min(self.budget),
            None => self.budget,
        }
    }

    /// Refines until `decide` returns `Some`, doubling the digit count each
    /// step up to the budget.
    pub fn decide<T>(&self, what: &str, decide: impl Fn(&Enclosure) -> Option<T>) -> Result<T> {
        let limit = self.limit();
        let mut digits = START_DIGITS.min(limit);
        loop {
            if let Some(enc) = self.approx(digits) {
                if let Some(v) = decide(&enc) {
                    return Ok(v);
                }
            }
            if digits >= limit {
                return Err(Error::UndecidableAtPrecision {
                    what: format!("{what} for {}", self.label),
                    budget: self.budget,
                });
            }
            digits = (digits * 2).min(limit);
        }
    }

    pub fn unary(
        &self,
        label: String,
        op: impl Fn(&Enclosure) -> Option<Enclosure> + Send + Sync + 'static,
    ) -> CertifiedReal {
        let inner = self.source.clone();
        CertifiedReal {
            label: label.into(),
            source: Arc::new(move |digits| {
                let x = inner(digits + GUARD_DIGITS)?;
                Some(op(&x)?.round_outward(digits + GUARD_DIGITS))
            }),
            budget: self.budget,
            max_digits: self.max_digits,
        }
    }

    pub fn binary(
        &self,
        other: &CertifiedReal,
        label: String,
        op: impl Fn(&Enclosure, &Enclosure) -> Option<Enclosure> + Send + Sync + 'static,
    ) -> CertifiedReal {
        let (left, right) = (self.source.clone(), other.source.clone());
        let max_digits = match (self.max_digits, other.max_digits) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        CertifiedReal {
            label: label.into(),
            source: Arc::new(move |digits| {
                let x = left(digits + GUARD_DIGITS)?;
                let y = right(digits + GUARD_DIGITS)?;
                Some(op(&x, &y)?.round_outward(digits + GUARD_DIGITS))
            }),
            budget: self.budget.min(other.budget),
            max_digits,
        }
    }
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CertifiedReal")
            .field("label", &self.label)
            .field("budget", &self.budget)
            .field("max_digits", &self.max_digits)
            .finish()
    }
}

/// `(floor(scale * atan(1/x)), error bound in ulps)` from the alternating series.
fn atan_inv_scaled(x: u32, scale: &BigInt) -> (BigInt, BigInt) {
    let x2 = BigInt::from(x) * x;
    let mut power = scale / x;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // two truncations per term, plus the omitted tail below one ulp
    (sum, BigInt::from(2 * k + 1))
}

fn parse_decimal(text: &str) -> Result<(Rational, u32)> {
    let unsigned = text.strip_prefix(['+', '-']).unwrap_or(text);
    let sign_len = text.len() - unsigned.len();
    let (int_part, frac_part) = match unsigned.find('.') {
        Some(i) => (&unsigned[..i], &unsigned[i + 1..]),
        None => (unsigned, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::parse(text, sign_len, "expected decimal digits"));
    }
    if let Some(bad) = int_part.find(|c: char| !c.is_ascii_digit()) {
        return Err(Error::parse(text, sign_len + bad, "unexpected character"));
    }
    if let Some(bad) = frac_part.find(|c: char| !c.is_ascii_digit()) {
        return Err(Error::parse(
            text,
            sign_len + int_part.len() + 1 + bad,
            "unexpected character",
        ));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().expect("ascii digits")
    };
    if text.starts_with('-') {
        value = -value;
    }
    let places = frac_part.len() as u32;
    Ok((
        Rational::new(value, BigInt::from(10u32).pow(places))?,
        places,
    ))
}
