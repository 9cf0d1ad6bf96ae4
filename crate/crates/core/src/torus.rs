//! Finite unions of subintervals of `[0, 1]` with exact rational endpoints.
//!
//! Endpoint openness is tracked per endpoint. Grid-cell containment treats the
//! points `0` and `1` as the same point of the torus, so `[0, 1)` contains
//! every closed cell `[(s-1)/p, s/p]`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{AlgebraicReal, Rational};
use crate::zp::ResidueSet;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, true)
    }

    /// `[lo, hi)`.
    pub fn half_open(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, false)
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn is_open(&self) -> bool {
        !self.lo_closed && !self.hi_closed
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}..{}{r}", short(&self.lo), short(&self.hi))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Integers print without a denominator inside interval literals.
fn short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

/// Canonical finite union: sorted, pairwise disjoint, touching pieces merged.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
    measure: Rational,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    /// `[0, 1)`, the whole torus.
    pub fn full() -> Self {
        IntervalUnion {
            intervals: vec![Interval::half_open(Rational::zero(), Rational::one())],
            measure: Rational::one(),
        }
    }

    /// Sorts and merges; rejects endpoints outside `[0, 1]`, empty pieces and
    /// overlaps of positive length.
    pub fn make(mut intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            if iv.lo.is_negative() || iv.hi > 1 {
                return Err(Error::Range(format!("{iv} leaves [0, 1]")));
            }
            if iv.lo >= iv.hi {
                return Err(Error::Range(format!("{iv} needs left < right")));
            }
        }
        intervals.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            if let Some(last) = merged.last_mut() {
                match iv.lo.cmp(&last.hi) {
                    Ordering::Less => {
                        return Err(Error::Overlap(format!("{last} and {iv}")));
                    }
                    Ordering::Equal if last.hi_closed || iv.lo_closed => {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                        continue;
                    }
                    _ => {}
                }
            }
            merged.push(iv);
        }
        let measure = merged.iter().map(Interval::length).sum();
        Ok(IntervalUnion {
            intervals: merged,
            measure,
        })
    }

    pub fn single(iv: Interval) -> Result<Self> {
        Self::make(vec![iv])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn measure(&self) -> &Rational {
        &self.measure
    }

    /// Number of maximal intervals.
    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Every endpoint open.
    pub fn is_open(&self) -> bool {
        self.intervals.iter().all(Interval::is_open)
    }

    /// Replaces each `(a, b)` by `(a + r, b - r)`, dropping pieces with
    /// `b - a <= 2r`.
    pub fn shrink(&self, r: &Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Range(format!("shrink radius {r} is negative")));
        }
        if r.is_zero() {
            return Ok(self.clone());
        }
        let twice = r + r;
        let intervals = self
            .intervals
            .iter()
            .filter(|iv| iv.length() > twice)
            .map(|iv| Interval::new(&iv.lo + r, &iv.hi - r, iv.lo_closed, iv.hi_closed))
            .collect();
        Self::make(intervals)
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|iv| iv.contains_rational(x))
    }

    /// Membership on the torus, where `0` and `1` name the same point.
    pub fn contains_torus_point(&self, x: &Rational) -> bool {
        if x.is_zero() || *x == 1 {
            self.contains_rational(&Rational::zero()) || self.contains_rational(&Rational::one())
        } else {
            self.contains_rational(x)
        }
    }

    /// Every piece of `self` lies inside a single piece of `other`.
    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.intervals.iter().all(|iv| {
            other.intervals.iter().any(|jv| {
                let lo_ok = match jv.lo.cmp(&iv.lo) {
                    Ordering::Less => true,
                    Ordering::Equal => jv.lo_closed || !iv.lo_closed,
                    Ordering::Greater => false,
                };
                let hi_ok = match iv.hi.cmp(&jv.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => jv.hi_closed || !iv.hi_closed,
                    Ordering::Greater => false,
                };
                lo_ok && hi_ok
            })
        })
    }

    /// Certified membership of a real point (no torus identification).
    pub fn contains_point(&self, x: &AlgebraicReal) -> Result<bool> {
        if let Some(r) = x.as_rational() {
            return Ok(self.contains_rational(r));
        }
        for iv in &self.intervals {
            match x.cmp_rational(&iv.lo)? {
                Ordering::Less => return Ok(false),
                Ordering::Equal if !iv.lo_closed => return Ok(false),
                _ => {}
            }
            match x.cmp_rational(&iv.hi)? {
                Ordering::Less => return Ok(true),
                Ordering::Equal => return Ok(iv.hi_closed),
                Ordering::Greater => {}
            }
        }
        Ok(false)
    }

    /// Inclusive range of cell indices `s` with `[(s-1)/p, s/p]` inside `iv`.
    fn cell_range(&self, iv: &Interval, p: u64) -> Option<(u64, u64)> {
        let pr = Rational::from(p);
        let left = &iv.lo * &pr;
        let right = &iv.hi * &pr;
        let left_ok = iv.lo_closed || self.contains_torus_point(&iv.lo);
        let right_ok = iv.hi_closed || self.contains_torus_point(&iv.hi);
        // smallest j with j/p >= lo (or > lo when lo is excluded)
        let j_min: BigInt = if left.is_integer() && !left_ok {
            left.floor() + 1
        } else {
            left.ceil()
        };
        let s_max: BigInt = if right.is_integer() && !right_ok {
            right.floor() - 1
        } else {
            right.floor()
        };
        let s_min: BigInt = j_min + 1;
        if s_min > s_max {
            return None;
        }
        Some((s_min.to_u64()?, s_max.to_u64()?))
    }

    /// Residues `s mod p` of the closed cells `[(s-1)/p, s/p]`, `1 <= s <= p`,
    /// lying inside the union. Cell `s = p` is residue `0`.
    pub fn grid_cells_inside(&self, p: u64) -> Result<ResidueSet> {
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for iv in &self.intervals {
            if let Some((lo, hi)) = self.cell_range(iv, p) {
                if hi == p {
                    runs.push((0, 0));
                    runs.push((lo, p - 1));
                } else {
                    runs.push((lo, hi));
                }
            }
        }
        ResidueSet::from_runs(p, runs)
    }

    /// Union of the closed cells labelled by `cells`.
    pub fn from_cells(cells: &ResidueSet) -> Self {
        let p = cells.modulus();
        let mut intervals: Vec<Interval> = Vec::new();
        for (a, b) in cells.runs() {
            // residue 0 labels the last cell, [(p-1)/p, 1]
            let a = if a == 0 {
                intervals.push(cell_span(p, p, p));
                1
            } else {
                a
            };
            if a <= b {
                intervals.push(cell_span(a, b, p));
            }
        }
        Self::make(intervals).expect("cells are disjoint and inside [0, 1]")
    }
}

fn cell_span(first: u64, last: u64, p: u64) -> Interval {
    Interval::closed(
        Rational::new(first - 1, p).expect("p > 0"),
        Rational::new(last, p).expect("p > 0"),
    )
}

pub fn make(intervals: Vec<Interval>) -> Result<IntervalUnion> {
    IntervalUnion::make(intervals)
}

pub fn measure(s: &IntervalUnion) -> Rational {
    s.measure().clone()
}

pub fn shrink(s: &IntervalUnion, r: &Rational) -> Result<IntervalUnion> {
    s.shrink(r)
}

pub fn grid_cells_inside(s: &IntervalUnion, p: u64) -> Result<ResidueSet> {
    s.grid_cells_inside(p)
}

pub fn contains_point(s: &IntervalUnion, x: &AlgebraicReal) -> Result<bool> {
    s.contains_point(x)
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "empty");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntervalUnion({self})")
    }
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Comma-separated `(l..r)`, `[l..r)`, `(l..r]`, `[l..r]`; `empty` (or the
/// empty string) for the empty union. Whitespace between pieces is ignored.
impl FromStr for IntervalUnion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "empty" {
            return Ok(IntervalUnion::empty());
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut intervals = Vec::new();
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            let lo_closed = match bytes.get(pos) {
                Some(b'[') => true,
                Some(b'(') => false,
                _ => return Err(Error::parse(s, pos, "expected '(' or '['")),
            };
            pos += 1;
            let sep = s[pos..]
                .find("..")
                .map(|i| pos + i)
                .ok_or_else(|| Error::parse(s, pos, "expected '..'"))?;
            let lo_text = s[pos..sep].trim();
            let lo_at = pos + (s[pos..sep].len() - s[pos..sep].trim_start().len());
            let lo = crate::exactnum::parse_rational_at(lo_text, s, lo_at)?;
            pos = sep + 2;
            let close = s[pos..]
                .find([')', ']'])
                .map(|i| pos + i)
                .ok_or_else(|| Error::parse(s, pos, "expected ')' or ']'"))?;
            let hi_text = s[pos..close].trim();
            let hi_at = pos + (s[pos..close].len() - s[pos..close].trim_start().len());
            let hi = crate::exactnum::parse_rational_at(hi_text, s, hi_at)?;
            let hi_closed = bytes[close] == b']';
            pos = close + 1;
            intervals.push(Interval::new(lo, hi, lo_closed, hi_closed));
            skip_ws(&mut pos);
            match bytes.get(pos) {
                None => break,
                Some(b',') => pos += 1,
                Some(_) => return Err(Error::parse(s, pos, "expected ',' or end of input")),
            }
        }
        IntervalUnion::make(intervals)
    }
}
