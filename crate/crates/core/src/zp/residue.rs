use std::collections::HashMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::bitmask::BitMask;
use super::primes::is_prime;
use crate::error::{Error, Result};

/// Subset of Z/pZ for a prime `p`, stored as a dense bitmask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    p: u64,
    mask: BitMask,
    card: usize,
}

impl ResidueSet {
    fn check_modulus(p: u64) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > usize::MAX as u64 {
            return Err(Error::Range(format!("modulus {p} does not fit in memory")));
        }
        Ok(())
    }

    pub fn empty(p: u64) -> Result<Self> {
        Self::check_modulus(p)?;
        Ok(ResidueSet {
            p,
            mask: BitMask::zeros(p as usize),
            card: 0,
        })
    }

    pub fn full(p: u64) -> Result<Self> {
        Self::check_modulus(p)?;
        Ok(ResidueSet {
            p,
            mask: BitMask::ones(p as usize),
            card: p as usize,
        })
    }

    /// Builds a set from arbitrary integers, reducing each modulo `p`.
    pub fn from_residues<I: IntoIterator<Item = i64>>(p: u64, members: I) -> Result<Self> {
        Self::check_modulus(p)?;
        let mut mask = BitMask::zeros(p as usize);
        for m in members {
            mask.set(m.rem_euclid(p as i64) as usize);
        }
        Ok(Self::from_mask(p, mask))
    }

    /// `lo..=hi` (both already reduced, `lo <= hi < p`).
    pub fn from_range(p: u64, lo: u64, hi: u64) -> Result<Self> {
        Self::from_runs(p, [(lo, hi)])
    }

    /// Union of inclusive runs `lo..=hi` of reduced residues; runs with
    /// `lo > hi` are empty.
    pub fn from_runs<I: IntoIterator<Item = (u64, u64)>>(p: u64, runs: I) -> Result<Self> {
        Self::check_modulus(p)?;
        let mut mask = BitMask::zeros(p as usize);
        for (lo, hi) in runs {
            if lo > hi {
                continue;
            }
            if hi >= p {
                return Err(Error::Range(format!("residue {hi} is not below {p}")));
            }
            mask.set_range(lo as usize, hi as usize + 1);
        }
        Ok(Self::from_mask(p, mask))
    }

    fn from_mask(p: u64, mask: BitMask) -> Self {
        let card = mask.count_ones();
        ResidueSet { p, mask, card }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    pub fn is_full(&self) -> bool {
        self.card as u64 == self.p
    }

    pub fn contains(&self, r: u64) -> bool {
        r < self.p && self.mask.get(r as usize)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.mask.iter_ones().map(|i| i as u64)
    }

    pub fn min(&self) -> Option<u64> {
        self.iter().next()
    }

    /// Maximal runs of consecutive residues as inclusive `(first, last)` pairs,
    /// read in the order `0, 1, ..., p-1` without wrapping.
    pub fn runs(&self) -> Vec<(u64, u64)> {
        self.mask
            .runs()
            .into_iter()
            .map(|(s, l)| (s as u64, (s + l - 1) as u64))
            .collect()
    }

    fn same_modulus(&self, other: &ResidueSet) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        Ok(Self::from_mask(self.p, self.mask.and(&other.mask)))
    }

    pub fn complement(&self) -> ResidueSet {
        Self::from_mask(self.p, self.mask.not())
    }

    /// `{x + y mod p}`.
    ///
    /// The operand with fewer runs is split into runs `[u, u + L)`; each run
    /// contributes the other operand dilated by `L` and rotated by `u`.
    pub fn sumset(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        if self.is_empty() || other.is_empty() {
            return Self::empty(self.p);
        }
        let (runs_self, runs_other) = (self.mask.runs(), other.mask.runs());
        let (runs, base) = if runs_self.len() <= runs_other.len() {
            (runs_self, &other.mask)
        } else {
            (runs_other, &self.mask)
        };
        let mut dilated: HashMap<usize, BitMask> = HashMap::new();
        let mut acc = BitMask::zeros(self.p as usize);
        for (start, width) in runs {
            let block = dilated.entry(width).or_insert_with(|| base.dilate(width));
            acc.or_assign(&block.rotate(start));
            if acc.is_full() {
                break;
            }
        }
        Ok(Self::from_mask(self.p, acc))
    }

    /// `self + self + ... + self` (`k` copies).
    pub fn k_fold_sumset(&self, k: usize) -> Result<ResidueSet> {
        Ok(self
            .partial_sumsets(k)?
            .pop()
            .expect("k >= 1 yields at least one partial sum"))
    }

    /// `[S_1, ..., S_k]` with `S_1 = self` and `S_j = S_{j-1} + self`.
    pub fn partial_sumsets(&self, k: usize) -> Result<Vec<ResidueSet>> {
        if k == 0 {
            return Err(Error::Range("k-fold sumset needs k >= 1".into()));
        }
        if self.is_empty() {
            return Err(Error::Range("k-fold sumset of the empty set".into()));
        }
        let mut out = Vec::with_capacity(k);
        out.push(self.clone());
        for _ in 1..k {
            let next = out.last().expect("nonempty").sumset(self)?;
            out.push(next);
        }
        Ok(out)
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueSet(p={}, {{", self.p)?;
        for (i, (a, b)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if a == b {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}..={b}")?;
            }
        }
        write!(f, "}})")
    }
}

/// `{ "p": .., "cardinality": .., "runs": [[first, last], ..] }`.
impl Serialize for ResidueSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ResidueSet", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("cardinality", &self.card)?;
        let runs: Vec<[u64; 2]> = self.runs().into_iter().map(|(a, b)| [a, b]).collect();
        st.serialize_field("runs", &runs)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: u64, xs: &[i64]) -> ResidueSet {
        ResidueSet::from_residues(p, xs.iter().copied()).unwrap()
    }

    fn members(s: &ResidueSet) -> Vec<u64> {
        s.iter().collect()
    }

    #[test]
    fn sumset_examples() {
        let s = set(7, &[0, 1, 3]).sumset(&set(7, &[0, 2])).unwrap();
        assert_eq!(members(&s), vec![0, 1, 2, 3, 5]);
        assert_eq!(s.len(), 5);
        let y = set(5, &[1, 3, 4]);
        assert_eq!(set(5, &[0]).sumset(&y).unwrap(), y);
        assert_eq!(
            members(&set(5, &[1, 2]).sumset(&set(5, &[1, 2])).unwrap()),
            vec![2, 3, 4]
        );
    }

    #[test]
    fn k_fold_examples() {
        let s = set(5, &[1, 2]).k_fold_sumset(3).unwrap();
        assert_eq!(members(&s), vec![0, 1, 3, 4]);
        let x = set(11, &[2, 7, 9]);
        assert_eq!(x.k_fold_sumset(1).unwrap(), x);
        assert!(ResidueSet::full(5)
            .unwrap()
            .k_fold_sumset(2)
            .unwrap()
            .is_full());
        assert!(ResidueSet::empty(5).unwrap().k_fold_sumset(2).is_err());
        assert!(x.k_fold_sumset(0).is_err());
    }

    #[test]
    fn errors() {
        assert!(matches!(ResidueSet::empty(6), Err(Error::NotPrime(6))));
        assert!(matches!(
            set(5, &[1]).sumset(&set(7, &[1])),
            Err(Error::ModulusMismatch(5, 7))
        ));
    }

    #[test]
    fn reduction_and_runs() {
        let s = set(7, &[-1, 8, 2, 3]);
        assert_eq!(members(&s), vec![1, 2, 3, 6]);
        assert_eq!(s.runs(), vec![(1, 3), (6, 6)]);
        assert_eq!(format!("{s:?}"), "ResidueSet(p=7, {1..=3,6})");
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"p":7,"cardinality":4,"runs":[[1,3],[6,6]]}"#
        );
    }
}
