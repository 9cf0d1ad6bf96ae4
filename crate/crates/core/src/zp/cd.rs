use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::primes::is_prime;
use super::ResidueSet;
use crate::error::{Error, Result};

/// Largest modulus enumerated exhaustively unless the caller raises it.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 7;

/// `min{p, x + y - 1}`, the Cauchy-Davenport lower bound for `|X + Y|`.
pub fn cd_lower_bound(x: u64, y: u64, p: u64) -> u64 {
    assert!(x >= 1 && y >= 1, "sizes must be positive");
    assert!(x <= p && y <= p, "sizes cannot exceed p");
    p.min(x + y - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CdReport {
    pub p: u64,
    pub mode: &'static str,
    pub seed: Option<u64>,
    pub pairs_checked: u64,
    pub violations: u64,
    pub tight_cases: u64,
    /// First violating pair, if any, as member lists.
    pub first_violation: Option<(Vec<u64>, Vec<u64>)>,
}

#[derive(Default)]
struct Tally {
    pairs: u64,
    violations: u64,
    tight: u64,
    first: Option<(Vec<u64>, Vec<u64>)>,
}

impl Tally {
    fn check(&mut self, x: &ResidueSet, y: &ResidueSet) -> Result<()> {
        let sum = x.sumset(y)?;
        let bound = cd_lower_bound(x.len() as u64, y.len() as u64, x.modulus());
        let size = sum.len() as u64;
        self.pairs += 1;
        if size < bound {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some((x.iter().collect(), y.iter().collect()));
            }
        } else if size == bound {
            self.tight += 1;
        }
        Ok(())
    }

    fn report(self, p: u64, mode: &'static str, seed: Option<u64>) -> CdReport {
        CdReport {
            p,
            mode,
            seed,
            pairs_checked: self.pairs,
            violations: self.violations,
            tight_cases: self.tight,
            first_violation: self.first,
        }
    }
}

/// Checks every ordered pair of nonempty subsets of Z/pZ; `(2^p - 1)^2` pairs.
pub fn verify_cd_exhaustive(p: u64, cap: u64) -> Result<CdReport> {
    if p > cap {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive check for p = {p} exceeds the cap p <= {cap}"
        )));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p >= 32 {
        return Err(Error::BudgetExceeded(format!(
            "2^{p} subsets cannot be enumerated"
        )));
    }
    let subsets: Vec<ResidueSet> = (1u64..1 << p)
        .map(|bits| ResidueSet::from_residues(p, (0..p as i64).filter(|i| bits >> i & 1 == 1)))
        .collect::<Result<_>>()?;
    let mut tally = Tally::default();
    for x in &subsets {
        for y in &subsets {
            tally.check(x, y)?;
        }
    }
    Ok(tally.report(p, "exhaustive", None))
}

/// Checks `samples` seeded pairs of uniformly random nonempty subsets.
pub fn verify_cd_sampled(p: u64, samples: u64, seed: u64) -> Result<CdReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_subset = |rng: &mut ChaCha8Rng| -> Result<ResidueSet> {
        loop {
            let members: Vec<i64> = (0..p as i64).filter(|_| rng.gen_bool(0.5)).collect();
            if !members.is_empty() {
                return ResidueSet::from_residues(p, members);
            }
        }
    };
    let mut tally = Tally::default();
    for _ in 0..samples {
        let x = random_subset(&mut rng)?;
        let y = random_subset(&mut rng)?;
        tally.check(&x, &y)?;
    }
    Ok(tally.report(p, "sampled", Some(seed)))
}

/// Exhaustive at or below `cap`, sampled above it.
pub fn verify_cd(p: u64, cap: u64, samples: u64, seed: u64) -> Result<CdReport> {
    if p <= cap {
        verify_cd_exhaustive(p, cap)
    } else {
        verify_cd_sampled(p, samples, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert_eq!(cd_lower_bound(2, 2, 5), 3);
        assert_eq!(cd_lower_bound(5, 5, 5), 5);
        assert_eq!(cd_lower_bound(217, 217, 727), 433);
    }

    #[test]
    fn small_exhaustive_runs() {
        let r = verify_cd_exhaustive(2, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!((r.pairs_checked, r.violations), (9, 0));
        let r = verify_cd_exhaustive(5, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!((r.pairs_checked, r.violations), (961, 0));
        assert!(r.tight_cases > 0);
    }

    #[test]
    fn cap_and_primality() {
        assert!(matches!(
            verify_cd_exhaustive(11, DEFAULT_EXHAUSTIVE_CAP),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(
            verify_cd_exhaustive(4, 7),
            Err(Error::NotPrime(4))
        ));
        assert!(matches!(
            verify_cd_sampled(9, 10, 1),
            Err(Error::NotPrime(9))
        ));
    }

    #[test]
    fn sampled_is_reproducible() {
        let a = verify_cd_sampled(13, 500, 99).unwrap();
        let b = verify_cd_sampled(13, 500, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations, 0);
    }
}
