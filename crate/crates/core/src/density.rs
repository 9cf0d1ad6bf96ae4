//! Finite-scale density experiments: sets `{n : {c f(n)} in J}`, their
//! densities, the Beatty-avoiding window set and k-fold hit scans.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::beatty::{Beatty, PolynomialIntCoeffs};
use crate::error::{Error, Result};
use crate::exactnum::{quadratic_floor, quadratic_sign, AlgebraicReal, Rational};
use crate::torus::IntervalUnion;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 1729;

/// Sampled tuples checked directly against the Beatty sequence by the
/// avoidance scan.
pub const DEFAULT_AVOID_SAMPLES: u64 = 10_000;

/// Tuple budget of the hit scan: full enumeration when `|A|^k` fits.
pub const DEFAULT_SAMPLE_BUDGET: u64 = 5_000_000;

const SCAN_CHUNK: u64 = 4096;
const FIRST_HITS: usize = 5;

/// Target set for fractional parts.
#[derive(Clone, Debug)]
pub enum Window {
    Union(IntervalUnion),
    /// `(lo, hi)` with algebraic endpoints.
    Open {
        lo: AlgebraicReal,
        hi: AlgebraicReal,
    },
}

impl Window {
    pub fn measure(&self) -> Result<AlgebraicReal> {
        match self {
            Window::Union(u) => Ok(AlgebraicReal::Rational(u.measure().clone())),
            Window::Open { lo, hi } => hi.sub(lo),
        }
    }

    fn pieces(&self) -> Vec<Piece> {
        match self {
            Window::Union(u) => u
                .intervals()
                .iter()
                .map(|iv| Piece {
                    lo: AlgebraicReal::Rational(iv.lo.clone()),
                    lo_closed: iv.lo_closed,
                    hi: AlgebraicReal::Rational(iv.hi.clone()),
                    hi_closed: iv.hi_closed,
                })
                .collect(),
            Window::Open { lo, hi } => vec![Piece {
                lo: lo.clone(),
                lo_closed: false,
                hi: hi.clone(),
                hi_closed: false,
            }],
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Union(u) => write!(f, "{u}"),
            Window::Open { lo, hi } => write!(f, "({lo}..{hi})"),
        }
    }
}

impl From<IntervalUnion> for Window {
    fn from(u: IntervalUnion) -> Self {
        Window::Union(u)
    }
}

#[derive(Clone, Debug)]
struct Piece {
    lo: AlgebraicReal,
    lo_closed: bool,
    hi: AlgebraicReal,
    hi_closed: bool,
}

/// `{c v}` either as `(a + b sqrt(d))/g` over the parts of `c`, or generic.
#[derive(Clone, Debug)]
enum Frac {
    Quad { a: BigInt, b: BigInt },
    Real(AlgebraicReal),
}

/// Fractional parts of integer multiples of a fixed constant.
#[derive(Clone, Debug)]
struct FracScanner {
    c: AlgebraicReal,
    parts: Option<(BigInt, BigInt, BigInt, BigInt)>,
}

impl FracScanner {
    fn new(c: AlgebraicReal) -> Self {
        let parts = match &c {
            AlgebraicReal::Quadratic(q) => {
                Some((q.e().clone(), q.f().clone(), q.d().clone(), q.g().clone()))
            }
            _ => None,
        };
        FracScanner { c, parts }
    }

    fn frac(&self, v: &BigInt) -> Result<Frac> {
        match &self.parts {
            Some((e, f, d, g)) if !v.is_zero() => {
                let (ve, vf) = (v * e, v * f);
                let fl = quadratic_floor(&ve, &vf, d, g);
                Ok(Frac::Quad {
                    a: ve - fl * g,
                    b: vf,
                })
            }
            _ => Ok(Frac::Real(self.c.frac_of_multiple(v)?.0)),
        }
    }

    fn cmp(&self, x: &Frac, y: &AlgebraicReal) -> Result<Ordering> {
        if let (Frac::Quad { a, b }, Some((_, _, d, g))) = (x, &self.parts) {
            match y {
                AlgebraicReal::Rational(r) => {
                    let (u, w) = (r.numer(), r.denom());
                    return Ok(quadratic_sign(&(w * a - g * u), &(w * b), d));
                }
                AlgebraicReal::Quadratic(q) if q.d() == d => {
                    let lhs = a * q.g() - q.e() * g;
                    let rhs = b * q.g() - q.f() * g;
                    return Ok(quadratic_sign(&lhs, &rhs, d));
                }
                _ => {}
            }
        }
        self.to_real(x)?.cmp_real(y)
    }

    fn to_real(&self, x: &Frac) -> Result<AlgebraicReal> {
        match (x, &self.parts) {
            (Frac::Quad { a, b }, Some((_, _, d, g))) => {
                AlgebraicReal::quadratic(a.clone(), b.clone(), d.clone(), g.clone())
            }
            (Frac::Real(r), _) => Ok(r.clone()),
            (Frac::Quad { .. }, None) => {
                unreachable!("quadratic parts without a quadratic constant")
            }
        }
    }

    fn in_pieces(&self, x: &Frac, pieces: &[Piece]) -> Result<bool> {
        for piece in pieces {
            let above_lo = match self.cmp(x, &piece.lo)? {
                Ordering::Greater => true,
                Ordering::Equal => piece.lo_closed,
                Ordering::Less => false,
            };
            if !above_lo {
                continue;
            }
            match self.cmp(x, &piece.hi)? {
                Ordering::Less => return Ok(true),
                Ordering::Equal if piece.hi_closed => return Ok(true),
                _ => {}
            }
        }
        Ok(false)
    }
}

fn tag_index(n: u64, e: Error) -> Error {
    match e {
        Error::UndecidableAtPrecision { what, budget } => Error::UndecidableAtPrecision {
            what: format!("n = {n}: {what}"),
            budget,
        },
        other => other,
    }
}

/// `{1 <= n <= n_max : {c f(n)} in window}` in increasing order, scanned in
/// parallel chunks and merged in order.
pub fn membership_scan(
    c: &AlgebraicReal,
    f: &PolynomialIntCoeffs,
    window: &Window,
    n_max: u64,
) -> Result<Vec<u64>> {
    if n_max == 0 {
        return Err(Error::Range("N must be at least 1".into()));
    }
    let scanner = FracScanner::new(c.clone());
    let pieces = window.pieces();
    let chunks: Vec<(u64, u64)> = (0..n_max.div_ceil(SCAN_CHUNK))
        .map(|i| (i * SCAN_CHUNK + 1, ((i + 1) * SCAN_CHUNK).min(n_max)))
        .collect();
    let parts: Vec<Vec<u64>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut found = Vec::new();
            for n in lo..=hi {
                let x = scanner.frac(&f.eval_u64(n)).map_err(|e| tag_index(n, e))?;
                if scanner
                    .in_pieces(&x, &pieces)
                    .map_err(|e| tag_index(n, e))?
                {
                    found.push(n);
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

/// `{n <= n_max : {f(n)/alpha} in J}`.
pub fn fractional_membership_set(
    alpha: &AlgebraicReal,
    f: &PolynomialIntCoeffs,
    j: &IntervalUnion,
    n_max: u64,
) -> Result<Vec<u64>> {
    alpha.require_irrational()?;
    membership_scan(&alpha.recip()?, f, &Window::Union(j.clone()), n_max)
}

/// `10, 100, ...` below `n_max`, then `n_max` itself.
fn checkpoints(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |x| x.checked_mul(10))
        .take_while(|&x| x < n_max)
        .collect();
    out.push(n_max);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Milestone {
    #[serde(rename = "N")]
    pub n: u64,
    pub set_size: u64,
    pub density_estimate: Rational,
    pub density_decimal: String,
    /// `|estimate - target|`, rounded for display.
    pub deviation_decimal: String,
}

fn milestones(members: &[u64], n_max: u64, target: &AlgebraicReal) -> Result<Vec<Milestone>> {
    checkpoints(n_max)
        .into_iter()
        .map(|n| {
            let size = members.partition_point(|&x| x <= n) as u64;
            let est = Rational::new(size, n)?;
            let dev = deviation(&est, target)?;
            Ok(Milestone {
                n,
                set_size: size,
                density_decimal: est.to_decimal(6),
                deviation_decimal: dev.to_decimal(6),
                density_estimate: est,
            })
        })
        .collect()
}

fn deviation(est: &Rational, target: &AlgebraicReal) -> Result<AlgebraicReal> {
    let diff = target.neg().add_rational(est);
    Ok(if diff.signum()? == Ordering::Less {
        diff.neg()
    } else {
        diff
    })
}

/// Whether `|estimate - target| <= tol`, decided exactly.
pub fn within_tolerance(est: &Rational, target: &AlgebraicReal, tol: &Rational) -> Result<bool> {
    Ok(deviation(est, target)?.cmp_rational(tol)? != Ordering::Greater)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub rho: AlgebraicReal,
    pub f: PolynomialIntCoeffs,
    #[serde(rename = "J")]
    pub j: IntervalUnion,
    #[serde(rename = "N")]
    pub n: u64,
    pub set_size: u64,
    pub density_estimate: Rational,
    pub target_density: Rational,
    pub deviation: Rational,
    pub density_decimal: String,
    pub deviation_decimal: String,
    pub milestones: Vec<Milestone>,
}

/// `|{n <= N : {rho f(n)} in J}| / N` against `mu(J)`.
pub fn weyl_density_estimate(
    rho: &AlgebraicReal,
    f: &PolynomialIntCoeffs,
    j: &IntervalUnion,
    n_max: u64,
) -> Result<WeylReport> {
    rho.require_irrational()?;
    let members = membership_scan(rho, f, &Window::Union(j.clone()), n_max)?;
    let size = members.len() as u64;
    let est = Rational::new(size, n_max)?;
    let target = j.measure().clone();
    let dev = (&est - &target).abs();
    let target_real = AlgebraicReal::Rational(target.clone());
    Ok(WeylReport {
        rho: rho.clone(),
        f: f.clone(),
        j: j.clone(),
        n: n_max,
        set_size: size,
        density_decimal: est.to_decimal(6),
        deviation_decimal: dev.to_decimal(6),
        density_estimate: est,
        target_density: target,
        deviation: dev,
        milestones: milestones(&members, n_max, &target_real)?,
    })
}

impl WeylReport {
    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for m in &self.milestones {
            out.push_str(&format!(
                "{},{},{},{},\n",
                m.n,
                m.set_size,
                m.density_decimal,
                self.target_density.to_decimal(6)
            ));
        }
        out
    }
}

pub const CSV_HEADER: &str = "N,set_size,density_estimate,target_density,hit_count\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// Distinct integer values `f(a_1) + ... + f(a_k)`.
    Distinct,
    /// Every examined tuple.
    Tuples,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub tuple: Vec<u64>,
    pub f_sum: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HitScanReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: usize,
    pub f: PolynomialIntCoeffs,
    pub alpha: AlgebraicReal,
    pub window: String,
    pub window_above_threshold: bool,
    pub set_size: u64,
    pub density_estimate: Rational,
    pub density_decimal: String,
    pub target_density: AlgebraicReal,
    pub target_decimal: String,
    /// `full`, `sampled`, or `none` when the set is empty.
    pub enumeration: &'static str,
    pub count_mode: CountMode,
    pub seed: Option<u64>,
    pub tuples_examined: u64,
    pub distinct_sums: u64,
    pub hit_count: u64,
    pub criterion_disagreements: u64,
    /// Avoidance scans only: every member's fractional part lies in the
    /// window and `k` times its right end is exactly `1 - 1/alpha`.
    pub window_proof: Option<bool>,
    pub first_hits: Vec<Hit>,
    pub milestones: Vec<Milestone>,
}

impl HitScanReport {
    pub fn density_within(&self, tol: &Rational) -> Result<bool> {
        within_tolerance(&self.density_estimate, &self.target_density, tol)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for m in &self.milestones {
            let hits = if m.n == self.n {
                self.hit_count.to_string()
            } else {
                String::new()
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                m.n, m.set_size, m.density_decimal, self.target_decimal, hits
            ));
        }
        out
    }
}

/// Per-member data for tuple tests.
struct Members {
    values: Vec<u64>,
    f_values: Vec<u128>,
    fracs: Vec<Frac>,
}

impl Members {
    fn build(
        values: Vec<u64>,
        f: &PolynomialIntCoeffs,
        scanner: &FracScanner,
        k: usize,
    ) -> Result<Self> {
        let limit = u128::MAX / k as u128;
        let mut f_values = Vec::with_capacity(values.len());
        let mut fracs = Vec::with_capacity(values.len());
        for &a in &values {
            let v = f.eval_u64(a);
            let fv = v
                .to_u128()
                .filter(|&x| x <= limit)
                .ok_or_else(|| Error::Range(format!("f({a}) = {v} is too large for tuple sums")))?;
            f_values.push(fv);
            fracs.push(scanner.frac(&v).map_err(|e| tag_index(a, e))?);
        }
        Ok(Members {
            values,
            f_values,
            fracs,
        })
    }
}

/// Integer route and window route for one tuple of member indices.
fn test_tuple(
    beatty: &Beatty,
    scanner: &FracScanner,
    mem: &Members,
    idx: &[usize],
) -> Result<(u128, bool, bool)> {
    let sum: u128 = idx.iter().map(|&i| mem.f_values[i]).sum();
    let direct = beatty.contains(&BigInt::from(sum))?;
    let quad_parts: Option<(BigInt, BigInt)> = idx.iter().try_fold(
        (BigInt::zero(), BigInt::zero()),
        |(sa, sb), &i| match &mem.fracs[i] {
            Frac::Quad { a, b } => Some((sa + a, sb + b)),
            Frac::Real(_) => None,
        },
    );
    let window = match quad_parts.and_then(|(a, b)| beatty.window_test_parts(&a, &b)) {
        Some(w) => w,
        None => {
            let mut total = AlgebraicReal::Rational(Rational::zero());
            for &i in idx {
                total = total.add(&scanner.to_real(&mem.fracs[i])?)?;
            }
            beatty.in_window(&total)?
        }
    };
    Ok((sum, direct, window))
}

/// Tallies over examined tuples.
struct Tally {
    count_mode: CountMode,
    examined: u64,
    sums: HashSet<u128>,
    hit_sums: HashSet<u128>,
    hit_tuples: u64,
    disagreements: u64,
    first_hits: Vec<Hit>,
}

impl Tally {
    fn new(count_mode: CountMode) -> Self {
        Tally {
            count_mode,
            examined: 0,
            sums: HashSet::new(),
            hit_sums: HashSet::new(),
            hit_tuples: 0,
            disagreements: 0,
            first_hits: Vec::new(),
        }
    }

    fn record(&mut self, mem: &Members, idx: &[usize], sum: u128, direct: bool, window: bool) {
        self.examined += 1;
        self.sums.insert(sum);
        if direct != window {
            self.disagreements += 1;
        }
        if direct {
            self.hit_tuples += 1;
            if self.hit_sums.insert(sum) && self.first_hits.len() < FIRST_HITS {
                self.first_hits.push(Hit {
                    tuple: idx.iter().map(|&i| mem.values[i]).collect(),
                    f_sum: sum.to_string(),
                });
            }
        }
    }

    fn hit_count(&self) -> u64 {
        match self.count_mode {
            CountMode::Distinct => self.hit_sums.len() as u64,
            CountMode::Tuples => self.hit_tuples,
        }
    }
}

/// Advances a nondecreasing index tuple in lexicographic order.
fn next_multiset(idx: &mut [usize], len: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] + 1 < len {
            let v = idx[pos] + 1;
            for slot in &mut idx[pos..] {
                *slot = v;
            }
            return true;
        }
    }
    false
}

/// Enumerates every multiset of `k` members, or samples `budget` ordered
/// tuples when `|A|^k` exceeds the budget.
fn scan_tuples(
    beatty: &Beatty,
    scanner: &FracScanner,
    mem: &Members,
    k: usize,
    budget: u64,
    seed: u64,
    count_mode: CountMode,
) -> Result<(Tally, &'static str)> {
    let len = mem.values.len();
    let mut tally = Tally::new(count_mode);
    if len == 0 {
        return Ok((tally, "none"));
    }
    let ordered = (len as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if ordered <= budget as u128 {
        let mut idx = vec![0usize; k];
        loop {
            let (sum, direct, window) = test_tuple(beatty, scanner, mem, &idx)?;
            tally.record(mem, &idx, sum, direct, window);
            if !next_multiset(&mut idx, len) {
                break;
            }
        }
        Ok((tally, "full"))
    } else {
        sample_tuples(beatty, scanner, mem, k, budget, seed, &mut tally)?;
        Ok((tally, "sampled"))
    }
}

fn sample_tuples(
    beatty: &Beatty,
    scanner: &FracScanner,
    mem: &Members,
    k: usize,
    samples: u64,
    seed: u64,
    tally: &mut Tally,
) -> Result<()> {
    let len = mem.values.len();
    if len == 0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![0usize; k];
    for _ in 0..samples {
        for slot in idx.iter_mut() {
            *slot = rng.gen_range(0..len);
        }
        let (sum, direct, window) = test_tuple(beatty, scanner, mem, &idx)?;
        tally.record(mem, &idx, sum, direct, window);
    }
    Ok(())
}

/// `(1 - 1/alpha)/k`, the optimal avoidance density.
pub fn threshold_density(beatty: &Beatty, k: usize) -> AlgebraicReal {
    beatty
        .threshold()
        .mul_rational(&Rational::new(1u64, k as u64).expect("k >= 1"))
}

/// The set `{a <= N : {f(a)/alpha} in (0, (1 - 1/alpha)/k)}`, whose k-fold
/// f-sums all miss the Beatty sequence of alpha.
pub fn hegyvari_avoidance_set(
    alpha: &AlgebraicReal,
    f: &PolynomialIntCoeffs,
    k: usize,
    n_max: u64,
    samples: u64,
    seed: u64,
) -> Result<(HitScanReport, Vec<u64>)> {
    if k < 2 {
        return Err(Error::Range(format!("k = {k} must be at least 2")));
    }
    let beatty = Beatty::new(alpha.clone())?;
    let target = threshold_density(&beatty, k);
    let window = Window::Open {
        lo: AlgebraicReal::Rational(Rational::zero()),
        hi: target.clone(),
    };
    let scanner = FracScanner::new(beatty.inverse().clone());
    let members = membership_scan(beatty.inverse(), f, &window, n_max)?;
    let mem = Members::build(members.clone(), f, &scanner, k)?;

    // k fractional parts in (0, w) sum into (0, k w) = (0, 1 - 1/alpha)
    let edge_exact = target
        .mul_integer(&BigInt::from(k))
        .cmp_real(beatty.threshold())?
        == Ordering::Equal;
    let pieces = window.pieces();
    let mut members_inside = true;
    for (a, x) in mem.values.iter().zip(&mem.fracs) {
        if !scanner
            .in_pieces(x, &pieces)
            .map_err(|e| tag_index(*a, e))?
        {
            members_inside = false;
        }
    }

    let mut tally = Tally::new(CountMode::Tuples);
    sample_tuples(&beatty, &scanner, &mem, k, samples, seed, &mut tally)?;
    let report = build_report(
        &beatty,
        f,
        k,
        n_max,
        &window,
        false,
        &members,
        target,
        if members.is_empty() {
            "none"
        } else {
            "sampled"
        },
        Some(seed),
        tally,
        Some(edge_exact && members_inside),
    )?;
    Ok((report, members))
}

/// Builds `A = {a <= N : {f(a)/alpha} in window}` and counts k-fold f-sums in
/// the Beatty sequence of alpha.
#[allow(clippy::too_many_arguments)]
pub fn theorem1_hit_scan(
    alpha: &AlgebraicReal,
    f: &PolynomialIntCoeffs,
    k: usize,
    window: &Window,
    n_max: u64,
    sample_budget: u64,
    seed: u64,
    count_mode: CountMode,
) -> Result<HitScanReport> {
    if k < 2 {
        return Err(Error::Range(format!("k = {k} must be at least 2")));
    }
    if sample_budget == 0 {
        return Err(Error::BudgetExceeded("sample budget is zero".into()));
    }
    let beatty = Beatty::new(alpha.clone())?;
    let target = threshold_density(&beatty, k);
    let above = window.measure()?.cmp_real(&target)? == Ordering::Greater;
    let scanner = FracScanner::new(beatty.inverse().clone());
    let members = membership_scan(beatty.inverse(), f, window, n_max)?;
    let mem = Members::build(members.clone(), f, &scanner, k)?;
    let (tally, enumeration) =
        scan_tuples(&beatty, &scanner, &mem, k, sample_budget, seed, count_mode)?;
    let seed = (enumeration == "sampled").then_some(seed);
    build_report(
        &beatty,
        f,
        k,
        n_max,
        window,
        above,
        &members,
        window.measure()?,
        enumeration,
        seed,
        tally,
        None,
    )
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    beatty: &Beatty,
    f: &PolynomialIntCoeffs,
    k: usize,
    n_max: u64,
    window: &Window,
    above: bool,
    members: &[u64],
    target: AlgebraicReal,
    enumeration: &'static str,
    seed: Option<u64>,
    tally: Tally,
    window_proof: Option<bool>,
) -> Result<HitScanReport> {
    let size = members.len() as u64;
    let est = Rational::new(size, n_max)?;
    Ok(HitScanReport {
        n: n_max,
        k,
        f: f.clone(),
        alpha: beatty.alpha().clone(),
        window: window.to_string(),
        window_above_threshold: above,
        set_size: size,
        density_decimal: est.to_decimal(6),
        density_estimate: est,
        target_decimal: target.to_decimal(6),
        milestones: milestones(members, n_max, &target)?,
        target_density: target,
        enumeration,
        count_mode: tally.count_mode,
        seed,
        tuples_examined: tally.examined,
        distinct_sums: tally.sums.len() as u64,
        hit_count: tally.hit_count(),
        criterion_disagreements: tally.disagreements,
        window_proof,
        first_hits: tally.first_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: &str) -> IntervalUnion {
        s.parse().unwrap()
    }

    fn sqrt2() -> AlgebraicReal {
        AlgebraicReal::sqrt(2)
    }

    /// `{x}` for `x = c v` by a 60-digit enclosure, independent of the exact
    /// fast path.
    fn frac_oracle(c: &AlgebraicReal, v: u64) -> f64 {
        let enc = c.mul_integer(&BigInt::from(v)).enclosure(60).unwrap();
        let mid = enc.midpoint();
        (mid.clone() - Rational::from_integer(mid.floor())).to_f64()
    }

    #[test]
    fn membership_examples() {
        let f = PolynomialIntCoeffs::identity();
        // {n / sqrt 2} in (0, 1/2)
        let got = fractional_membership_set(&sqrt2(), &f, &u("(0..1/2)"), 10).unwrap();
        assert_eq!(got, vec![2, 3, 6, 9, 10]);
        // {n sqrt 2} in (0, 1/2)
        let got = membership_scan(&sqrt2(), &f, &u("(0..1/2)").into(), 10).unwrap();
        assert_eq!(got, vec![1, 3, 5, 6, 8, 10]);
        let all = fractional_membership_set(&sqrt2(), &f, &u("[0..1)"), 10).unwrap();
        assert_eq!(all, (1..=10).collect::<Vec<_>>());
        assert!(
            fractional_membership_set(&sqrt2(), &f, &IntervalUnion::empty(), 10)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn membership_matches_decimal_oracle() {
        let f = PolynomialIntCoeffs::square();
        let c = AlgebraicReal::golden_ratio().recip().unwrap();
        let got = membership_scan(&c, &f, &u("(1/10..1/3),(1/2..7/8]").into(), 3000).unwrap();
        let want: Vec<u64> = (1..=3000u64)
            .filter(|&n| {
                let x = frac_oracle(&c, n * n);
                (0.1 < x && x < 1.0 / 3.0) || (0.5 < x && x <= 0.875)
            })
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn chunked_scan_is_order_preserving() {
        let f = PolynomialIntCoeffs::identity();
        let w: Window = u("(0..1/3)").into();
        let whole = membership_scan(&sqrt2(), &f, &w, 3 * SCAN_CHUNK + 17).unwrap();
        assert!(whole.windows(2).all(|p| p[0] < p[1]));
        let head = membership_scan(&sqrt2(), &f, &w, SCAN_CHUNK + 5).unwrap();
        assert_eq!(&whole[..head.len()], &head[..]);
    }

    #[test]
    fn weyl_examples() {
        let rep = weyl_density_estimate(
            &sqrt2(),
            &PolynomialIntCoeffs::identity(),
            &u("[0..1)"),
            321,
        )
        .unwrap();
        assert_eq!(rep.density_estimate, Rational::one());
        let rep = weyl_density_estimate(
            &sqrt2(),
            &PolynomialIntCoeffs::identity(),
            &u("(0..1/4)"),
            20_000,
        )
        .unwrap();
        assert!(
            rep.deviation < Rational::ratio(5, 1000),
            "{}",
            rep.deviation
        );
        assert_eq!(rep.milestones.last().unwrap().n, 20_000);
        assert_eq!(
            rep.milestones.iter().map(|m| m.n).collect::<Vec<_>>(),
            [10, 100, 1000, 10_000, 20_000]
        );
        assert!(weyl_density_estimate(
            &AlgebraicReal::Rational(Rational::ratio(1, 2)),
            &PolynomialIntCoeffs::identity(),
            &u("(0..1)"),
            10
        )
        .is_err());
    }

    #[test]
    fn avoidance_small_scale() {
        let f = PolynomialIntCoeffs::square();
        let (rep, members) =
            hegyvari_avoidance_set(&sqrt2(), &f, 2, 5000, 2000, DEFAULT_SEED).unwrap();
        assert_eq!(rep.hit_count, 0);
        assert_eq!(rep.criterion_disagreements, 0);
        assert_eq!(rep.window_proof, Some(true));
        assert_eq!(rep.set_size, members.len() as u64);
        // exhaustive oracle on a prefix: no pair sum is a Beatty term
        let beatty = Beatty::new(sqrt2()).unwrap();
        let small: Vec<u64> = members.iter().copied().take_while(|&a| a < 300).collect();
        for &a in &small {
            for &b in &small {
                assert!(!beatty.contains(&BigInt::from(a * a + b * b)).unwrap());
            }
        }
        assert_eq!(rep.target_decimal, "0.146446");
    }

    #[test]
    fn golden_target_density() {
        let beatty = Beatty::new(AlgebraicReal::golden_ratio()).unwrap();
        assert_eq!(threshold_density(&beatty, 2).to_decimal(6), "0.190983");
        let d2 = threshold_density(&beatty, 2);
        let d3 = threshold_density(&beatty, 3);
        assert_eq!(d3.cmp_real(&d2).unwrap(), Ordering::Less);
    }

    #[test]
    fn hit_scan_small() {
        let f = PolynomialIntCoeffs::square();
        let w: Window = u("(0..1/5)").into();
        let rep = theorem1_hit_scan(
            &sqrt2(),
            &f,
            2,
            &w,
            300,
            1 << 20,
            DEFAULT_SEED,
            CountMode::Distinct,
        )
        .unwrap();
        assert_eq!(rep.enumeration, "full");
        assert!(rep.window_above_threshold);
        assert!(rep.hit_count >= 1);
        assert_eq!(rep.criterion_disagreements, 0);
        // brute-force oracle: distinct pair sums in the enumerated sequence
        let members = fractional_membership_set(&sqrt2(), &f, &u("(0..1/5)"), 300).unwrap();
        let top = 2 * 300 * 300;
        let beatty = Beatty::new(sqrt2()).unwrap();
        let terms: HashSet<u64> = (1..)
            .map(|n| beatty.term(&BigInt::from(n)).unwrap().to_u64().unwrap())
            .take_while(|&t| t <= top)
            .collect();
        let mut sums = HashSet::new();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i..] {
                let s = a * a + b * b;
                if terms.contains(&s) {
                    sums.insert(s);
                }
            }
        }
        assert_eq!(rep.hit_count, sums.len() as u64);
    }

    #[test]
    fn hit_scan_sampling_is_seeded() {
        let f = PolynomialIntCoeffs::square();
        let w: Window = u("(0..1/5)").into();
        let run = |seed| {
            theorem1_hit_scan(&sqrt2(), &f, 3, &w, 400, 5000, seed, CountMode::Tuples).unwrap()
        };
        let (a, b) = (run(7), run(7));
        assert_eq!(a.enumeration, "sampled");
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.tuples_examined, 5000);
    }

    #[test]
    fn avoidance_window_has_no_hits() {
        let f = PolynomialIntCoeffs::square();
        let beatty = Beatty::new(sqrt2()).unwrap();
        let w = Window::Open {
            lo: AlgebraicReal::Rational(Rational::zero()),
            hi: threshold_density(&beatty, 2),
        };
        let rep = theorem1_hit_scan(
            &sqrt2(),
            &f,
            2,
            &w,
            1000,
            1 << 20,
            DEFAULT_SEED,
            CountMode::Distinct,
        )
        .unwrap();
        assert_eq!(rep.hit_count, 0);
        assert!(!rep.window_above_threshold);
    }

    #[test]
    fn full_window_hits_abundant() {
        let f = PolynomialIntCoeffs::identity();
        let rep = theorem1_hit_scan(
            &sqrt2(),
            &f,
            2,
            &u("[0..1)").into(),
            50,
            1 << 20,
            1,
            CountMode::Distinct,
        )
        .unwrap();
        // every Beatty term in [2, 100] is a sum of two integers in [1, 50]
        let beatty = Beatty::new(sqrt2()).unwrap();
        let want = (2..=100)
            .filter(|&m| beatty.contains(&BigInt::from(m)).unwrap())
            .count();
        assert_eq!(rep.hit_count, want as u64);
    }

    #[test]
    fn multiset_enumeration_counts() {
        let mut idx = vec![0usize; 3];
        let mut n = 1;
        while next_multiset(&mut idx, 4) {
            n += 1;
        }
        assert_eq!(n, 20); // C(4 + 3 - 1, 3)
    }
}
