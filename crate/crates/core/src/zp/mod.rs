//! Sumsets in Z/pZ and the Cauchy-Davenport machinery.

mod bitmask;
mod cd;
mod primes;
mod residue;

pub use cd::{
    cd_lower_bound, verify_cd, verify_cd_exhaustive, verify_cd_sampled, CdReport,
    DEFAULT_EXHAUSTIVE_CAP,
};
pub use primes::{is_prime, next_prime_at_least};
pub use residue::ResidueSet;

/// Hard cap on moduli used by the witness search, `2^26`.
pub const DEFAULT_PRIME_CAP: u64 = 1 << 26;
