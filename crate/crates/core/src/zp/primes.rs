use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exactnum::Rational;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases suffice for all
/// 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= ceil(x)`.
pub fn next_prime_at_least(x: &Rational) -> Result<u64> {
    if *x < 2 {
        return Err(Error::Range(format!("prime search needs x >= 2, got {x}")));
    }
    let start = x
        .ceil()
        .to_u64()
        .ok_or_else(|| Error::Range(format!("{x} is beyond the 64-bit range")))?;
    (start..=u64::MAX)
        .find(|&n| is_prime(n))
        .ok_or_else(|| Error::Range(format!("no 64-bit prime at or above {x}")))
}
