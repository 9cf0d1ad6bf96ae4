//! Constructive search for `alpha_1 + ... + alpha_k (mod 1) in B` with every
//! `alpha_i` in `A`, for interval unions with `k mu(A) + mu(B) > 1`.
//!
//! The sets are discretised on the grid `1/p`, the k-fold sumset of the grid
//! cells of `A` is forced to meet the cells of the shrunken `B` by
//! Cauchy-Davenport, and a residue decomposition is peeled back out.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::torus::IntervalUnion;
use crate::zp::{is_prime, ResidueSet, DEFAULT_PRIME_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `p` is the smallest prime above the explicit bound.
    Faithful,
    /// `p` is the smallest prime for which the residue search succeeds.
    Tight,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Faithful => "faithful",
            Mode::Tight => "tight",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "faithful" => Ok(Mode::Faithful),
            "tight" => Ok(Mode::Tight),
            _ => Err(Error::parse(s, 0, "expected faithful or tight")),
        }
    }
}

/// One evaluated inequality of the pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub lhs: String,
    pub relation: &'static str,
    pub rhs: String,
    pub holds: bool,
    /// Whether a failure is a bug. Bound-dependent checks are informational in
    /// tight mode, where `p` is not chosen from the bound.
    pub required: bool,
}

impl Check {
    fn new(
        name: &'static str,
        lhs: impl fmt::Display,
        relation: &'static str,
        rhs: impl fmt::Display,
        holds: bool,
        required: bool,
    ) -> Self {
        Check {
            name,
            lhs: lhs.to_string(),
            relation,
            rhs: rhs.to_string(),
            holds,
            required,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessTrace {
    pub k: usize,
    pub mode: Mode,
    #[serde(rename = "A")]
    pub a: IntervalUnion,
    #[serde(rename = "B")]
    pub b: IntervalUnion,
    pub delta: Rational,
    pub n: usize,
    pub t: Rational,
    pub r: Rational,
    pub m: usize,
    /// The explicit lower bound on `p`; `p` exceeds it in faithful mode.
    pub prime_bound: Rational,
    pub p: u64,
    #[serde(rename = "B1")]
    pub b1: IntervalUnion,
    #[serde(rename = "B2")]
    pub b2: IntervalUnion,
    #[serde(rename = "A3cells")]
    pub a3_cells: IntervalUnion,
    #[serde(rename = "B3cells")]
    pub b3_cells: IntervalUnion,
    #[serde(rename = "Atilde")]
    pub a_tilde: ResidueSet,
    #[serde(rename = "Btilde")]
    pub b_tilde: ResidueSet,
    pub kfold_size: usize,
    pub target: u64,
    pub residue_witness: Vec<u64>,
    pub real_witness: Vec<Rational>,
    /// `sum(real_witness) mod 1`.
    pub real_sum: Rational,
    pub checks: Vec<Check>,
}

impl WitnessTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn validate(a: &IntervalUnion, b: &IntervalUnion, k: usize) -> Result<Rational> {
    if k < 2 {
        return Err(Error::Range(format!("k = {k} must be at least 2")));
    }
    if !b.is_open() {
        return Err(Error::NotOpen(b.to_string()));
    }
    let touches_edge =
        a.contains_rational(&Rational::zero()) || a.contains_rational(&Rational::one());
    if touches_edge {
        return Err(Error::Range(format!("A = {a} must lie inside (0, 1)")));
    }
    let delta = Rational::from(k as u64) * a.measure() + b.measure() - Rational::one();
    if !delta.is_positive() {
        return Err(Error::HypothesisViolated(format!(
            "k mu(A) + mu(B) - 1 = {delta} is not positive (k = {k}, mu(A) = {}, mu(B) = {})",
            a.measure(),
            b.measure()
        )));
    }
    Ok(delta)
}

/// Interval data that does not depend on `p`.
struct Setup {
    delta: Rational,
    n: usize,
    t: Rational,
    r: Rational,
    m: usize,
    b1: IntervalUnion,
    b2: IntervalUnion,
    bound: Rational,
}

fn setup(a: &IntervalUnion, b: &IntervalUnion, k: usize) -> Result<Setup> {
    let delta = validate(a, b, k)?;
    // B is a finite union, so the tail outside B1 is empty
    let b1 = b.clone();
    let n = b1.count();
    let t = b1
        .intervals()
        .iter()
        .map(|iv| iv.length())
        .min()
        .expect("delta > 0 forces B nonempty");
    let r = (&t / Rational::from(4u64)).min(&delta / Rational::from(4 * n as u64));
    let b2 = b1.shrink(&r)?;
    let m = a.count();
    let two = Rational::from(2u64);
    let gaps = b1
        .intervals()
        .iter()
        .map(|iv| two.checked_div(&(iv.length() - &r - &r)))
        .chain(a.intervals().iter().map(|iv| two.checked_div(&iv.length())))
        .collect::<Result<Vec<_>>>()?;
    let widest = gaps.into_iter().max().expect("n >= 1");
    let (kk, mm, nn) = (k as u64, m as u64, n as u64);
    let bound = widest + Rational::from(24 * (kk * mm * nn + nn)) / &delta;
    Ok(Setup {
        delta,
        n,
        t,
        r,
        m,
        b1,
        b2,
        bound,
    })
}

/// Smallest prime strictly above `x`.
fn prime_above(x: &Rational, cap: u64) -> Result<u64> {
    let exceeded = || Error::PrimeCapExceeded {
        bound: x.to_string(),
        cap,
    };
    if *x >= Rational::from(cap) {
        return Err(exceeded());
    }
    let start: num_bigint::BigInt = x.floor() + 1;
    let start = u64::try_from(start).map_err(|_| exceeded())?;
    (start.max(2)..=cap)
        .find(|&q| is_prime(q))
        .ok_or_else(exceeded)
}

/// Grid data for a fixed `p`, plus the peeled decomposition if one exists.
struct Discrete {
    a_tilde: ResidueSet,
    b_tilde: ResidueSet,
    kfold: ResidueSet,
    found: Option<(u64, Vec<u64>)>,
}

fn discretise(a: &IntervalUnion, b2: &IntervalUnion, k: usize, p: u64) -> Result<Discrete> {
    let a_tilde = a.grid_cells_inside(p)?;
    let b_tilde = b2.grid_cells_inside(p)?;
    if a_tilde.is_empty() {
        return Ok(Discrete {
            kfold: ResidueSet::empty(p)?,
            a_tilde,
            b_tilde,
            found: None,
        });
    }
    let partials = a_tilde.partial_sumsets(k)?;
    let kfold = partials.last().expect("k >= 1").clone();
    let found = kfold
        .intersection(&b_tilde)?
        .min()
        .map(|target| (target, peel(&a_tilde, &partials, target, p)));
    Ok(Discrete {
        a_tilde,
        b_tilde,
        kfold,
        found,
    })
}

/// Splits `target` in the k-fold sumset into `k` elements of `a`, taking the
/// smallest admissible residue at each step. `partials[j]` is the
/// `(j + 1)`-fold sumset.
fn peel(a: &ResidueSet, partials: &[ResidueSet], target: u64, p: u64) -> Vec<u64> {
    let k = partials.len();
    let mut rest = target;
    let mut out = Vec::with_capacity(k);
    for level in (1..k).rev() {
        let below = &partials[level - 1];
        let q = a
            .iter()
            .find(|&q| below.contains((rest + p - q) % p))
            .expect("target lies in the sumset");
        out.push(q);
        rest = (rest + p - q) % p;
    }
    debug_assert!(a.contains(rest));
    out.push(rest);
    out
}

pub fn find_witness(
    a: &IntervalUnion,
    b: &IntervalUnion,
    k: usize,
    mode: Mode,
) -> Result<WitnessTrace> {
    find_witness_with_cap(a, b, k, mode, DEFAULT_PRIME_CAP)
}

pub fn find_witness_with_cap(
    a: &IntervalUnion,
    b: &IntervalUnion,
    k: usize,
    mode: Mode,
    prime_cap: u64,
) -> Result<WitnessTrace> {
    let s = setup(a, b, k)?;
    let (p, disc) = match mode {
        Mode::Faithful => {
            let p = prime_above(&s.bound, prime_cap)?;
            (p, discretise(a, &s.b2, k, p)?)
        }
        Mode::Tight => {
            let mut hit = None;
            for p in (2..=prime_cap).filter(|&q| is_prime(q)) {
                let d = discretise(a, &s.b2, k, p)?;
                if d.found.is_some() {
                    hit = Some((p, d));
                    break;
                }
            }
            hit.ok_or_else(|| Error::PrimeCapExceeded {
                bound: "no prime up to the cap admits a residue witness".into(),
                cap: prime_cap,
            })?
        }
    };
    let (target, residues) = disc.found.clone().ok_or_else(|| {
        Error::InternalProofCheckFailed(format!(
            "the {k}-fold sumset of the A-cells misses the B-cells at p = {p}"
        ))
    })?;
    let trace = assemble(a, b, k, mode, s, p, disc, target, residues);
    if let Some(bad) = trace.checks.iter().find(|c| c.required && !c.holds) {
        return Err(Error::InternalProofCheckFailed(format!(
            "{}: {} {} {} fails",
            bad.name, bad.lhs, bad.relation, bad.rhs
        )));
    }
    Ok(trace)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    a: &IntervalUnion,
    b: &IntervalUnion,
    k: usize,
    mode: Mode,
    s: Setup,
    p: u64,
    disc: Discrete,
    target: u64,
    residue_witness: Vec<u64>,
) -> WitnessTrace {
    let pr = Rational::from(p);
    let real_witness: Vec<Rational> = residue_witness
        .iter()
        .map(|&q| Rational::from(q) / &pr)
        .collect();
    let real_sum = real_witness.iter().sum::<Rational>().fract();
    let a3_cells = IntervalUnion::from_cells(&disc.a_tilde);
    let b3_cells = IntervalUnion::from_cells(&disc.b_tilde);
    let mut trace = WitnessTrace {
        k,
        mode,
        a: a.clone(),
        b: b.clone(),
        delta: s.delta,
        n: s.n,
        t: s.t,
        r: s.r,
        m: s.m,
        prime_bound: s.bound,
        p,
        b1: s.b1,
        b2: s.b2,
        a3_cells,
        b3_cells,
        a_tilde: disc.a_tilde,
        b_tilde: disc.b_tilde,
        kfold_size: disc.kfold.len(),
        target,
        residue_witness,
        real_witness,
        real_sum,
        checks: Vec::new(),
    };
    trace.checks = evaluate_checks(&trace);
    trace
}

/// Every inequality of the pipeline, evaluated from the trace's own fields.
fn evaluate_checks(tr: &WitnessTrace) -> Vec<Check> {
    let faithful = tr.mode == Mode::Faithful;
    let k = Rational::from(tr.k as u64);
    let (m, n) = (tr.m as u64, tr.n as u64);
    let p = Rational::from(tr.p);
    let delta = &tr.delta;
    let twelfth = delta / Rational::from(12u64);
    let mut out = Vec::new();

    out.push(Check::new(
        "delta_positive",
        delta,
        ">",
        0,
        delta.is_positive(),
        true,
    ));

    let tail = tr.b.measure() - tr.b1.measure();
    let quarter = delta / Rational::from(4u64);
    out.push(Check::new(
        "b1_tail_below_quarter_delta",
        &tail,
        "<",
        &quarter,
        tail < quarter && tr.b1.is_subset_of(&tr.b),
        true,
    ));

    let r_expected = (&tr.t / Rational::from(4u64)).min(delta / Rational::from(4 * n));
    out.push(Check::new(
        "r_choice",
        &tr.r,
        "=",
        &r_expected,
        tr.r == r_expected && tr.r.is_positive(),
        true,
    ));

    let b2_floor = tr.b.measure() - Rational::ratio(3, 4) * delta;
    out.push(Check::new(
        "b2_measure",
        tr.b2.measure(),
        ">=",
        &b2_floor,
        *tr.b2.measure() >= b2_floor,
        true,
    ));

    out.push(Check::new(
        "prime_above_bound",
        tr.p,
        ">",
        &tr.prime_bound,
        p > tr.prime_bound && is_prime(tr.p),
        faithful,
    ));

    let grid_loss = (Rational::from(2 * m) * &k + Rational::from(2 * n)) / &p;
    out.push(Check::new(
        "grid_margin",
        &grid_loss,
        "<",
        &twelfth,
        grid_loss < twelfth,
        faithful,
    ));

    let discrete = &k * tr.a3_cells.measure() + tr.b3_cells.measure();
    let continuous = &k * tr.a.measure() + tr.b2.measure() - &twelfth;
    out.push(Check::new(
        "grid_measure_loss",
        &discrete,
        ">",
        &continuous,
        discrete > continuous,
        faithful,
    ));
    out.push(Check::new(
        "grid_measure_at_least_one",
        &discrete,
        ">=",
        1,
        discrete >= 1,
        faithful,
    ));

    // grid points q/p in a run of s cells number s + 1
    let a_points = (tr.a_tilde.len() + tr.a3_cells.count()) as u64;
    let b_points = (tr.b_tilde.len() + tr.b3_cells.count()) as u64;
    out.push(Check::new(
        "grid_points_a",
        a_points,
        ">=",
        2 * m,
        a_points >= 2 * m,
        faithful,
    ));
    out.push(Check::new(
        "grid_points_b",
        b_points,
        ">=",
        2 * n,
        b_points >= 2 * n,
        faithful,
    ));

    let (at, bt) = (tr.a_tilde.len() as i128, tr.b_tilde.len() as i128);
    let (ki, pi) = (tr.k as i128, tr.p as i128);
    let cd_lhs = ki * at - ki;
    let cd_rhs = pi - bt + 1;
    out.push(Check::new(
        "cells_force_overlap",
        cd_lhs,
        ">=",
        cd_rhs,
        cd_lhs >= cd_rhs,
        faithful,
    ));

    let cd_floor = pi.min(ki * at - ki + 1);
    let kfold = tr.kfold_size as i128;
    out.push(Check::new(
        "kfold_cauchy_davenport",
        kfold,
        ">=",
        cd_floor,
        kfold >= cd_floor,
        true,
    ));
    out.push(Check::new(
        "kfold_exceeds_complement",
        kfold,
        ">=",
        pi - bt + 2,
        kfold >= pi - bt + 2,
        faithful,
    ));

    let residue_sum = tr
        .residue_witness
        .iter()
        .fold(0u64, |acc, q| (acc + q) % tr.p);
    out.push(Check::new(
        "residue_sum_in_btilde",
        residue_sum,
        "in",
        "Btilde",
        residue_sum == tr.target && tr.b_tilde.contains(residue_sum),
        true,
    ));
    let in_a = tr.residue_witness.len() == tr.k
        && tr.residue_witness.iter().all(|&q| tr.a_tilde.contains(q))
        && tr
            .real_witness
            .iter()
            .all(|x| tr.a3_cells.contains_rational(x) && tr.a.contains_rational(x));
    out.push(Check::new(
        "witness_in_a",
        "real_witness",
        "in",
        "A",
        in_a,
        true,
    ));
    out.push(Check::new(
        "sum_in_b3",
        &tr.real_sum,
        "in",
        "B3",
        tr.b3_cells.contains_torus_point(&tr.real_sum),
        true,
    ));
    out.push(Check::new(
        "b3_b2_b_nested",
        "B3",
        "subset",
        "B2, B",
        tr.b3_cells.is_subset_of(&tr.b2) && tr.b2.is_subset_of(&tr.b),
        true,
    ));
    out.push(Check::new(
        "sum_in_b",
        &tr.real_sum,
        "in",
        "B",
        tr.b.contains_torus_point(&tr.real_sum),
        true,
    ));
    out
}

/// Result of re-checking a trace from scratch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub ok: bool,
    pub first_failure: Option<String>,
}

impl Verdict {
    fn fail(msg: impl Into<String>) -> Self {
        Verdict {
            ok: false,
            first_failure: Some(msg.into()),
        }
    }
}

/// Re-derives every quantity of `tr` from `a`, `b` and `k` and reports the
/// first discrepancy.
pub fn verify_trace(tr: &WitnessTrace, a: &IntervalUnion, b: &IntervalUnion, k: usize) -> Verdict {
    if !is_prime(tr.p) {
        return Verdict::fail("p not prime");
    }
    if tr.k != k || tr.residue_witness.len() != k || tr.real_witness.len() != k {
        return Verdict::fail("wrong number of witness elements");
    }
    let delta = Rational::from(k as u64) * a.measure() + b.measure() - Rational::one();
    if !delta.is_positive() {
        return Verdict::fail("delta not positive");
    }
    if let Some(x) = tr.real_witness.iter().find(|x| !a.contains_rational(x)) {
        return Verdict::fail(format!("element not in A: {x}"));
    }
    let sum = tr.real_witness.iter().sum::<Rational>().fract();
    if !b.contains_torus_point(&sum) {
        return Verdict::fail("sum not in B");
    }
    if sum != tr.real_sum {
        return Verdict::fail("recorded sum differs from the witness sum");
    }
    let pr = Rational::from(tr.p);
    let consistent = tr
        .residue_witness
        .iter()
        .zip(&tr.real_witness)
        .all(|(&q, x)| q < tr.p && Rational::from(q) / &pr == *x);
    if !consistent {
        return Verdict::fail("real witness is not residue/p");
    }
    let s = match setup(a, b, k) {
        Ok(s) => s,
        Err(e) => return Verdict::fail(format!("inputs rejected: {e}")),
    };
    if tr.a != *a || tr.b != *b {
        return Verdict::fail("trace was built for different A or B");
    }
    if tr.delta != s.delta {
        return Verdict::fail("delta mismatch");
    }
    if (tr.n, &tr.t, &tr.r, tr.m) != (s.n, &s.t, &s.r, s.m) {
        return Verdict::fail("interval data mismatch");
    }
    if tr.b1 != s.b1 || tr.b2 != s.b2 {
        return Verdict::fail("B1 or B2 mismatch");
    }
    if tr.prime_bound != s.bound {
        return Verdict::fail("prime bound mismatch");
    }
    if tr.mode == Mode::Faithful && prime_above(&s.bound, u64::MAX).ok() != Some(tr.p) {
        return Verdict::fail("p is not the least prime above the bound");
    }
    let disc = match discretise(a, &s.b2, k, tr.p) {
        Ok(d) => d,
        Err(e) => return Verdict::fail(format!("grid rebuild failed: {e}")),
    };
    if tr.a_tilde != disc.a_tilde || tr.b_tilde != disc.b_tilde {
        return Verdict::fail("grid cells mismatch");
    }
    if tr.a3_cells != IntervalUnion::from_cells(&disc.a_tilde)
        || tr.b3_cells != IntervalUnion::from_cells(&disc.b_tilde)
    {
        return Verdict::fail("cell unions mismatch");
    }
    if tr.kfold_size != disc.kfold.len() {
        return Verdict::fail("k-fold sumset size mismatch");
    }
    let fresh = evaluate_checks(tr);
    if let Some(c) = fresh.iter().find(|c| c.required && !c.holds) {
        return Verdict::fail(format!("check failed: {}", c.name));
    }
    if fresh != tr.checks {
        return Verdict::fail("recorded checks differ from re-evaluation");
    }
    Verdict {
        ok: true,
        first_failure: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpnessReport {
    pub beta: Rational,
    pub k: usize,
    pub grid: u64,
    #[serde(rename = "A")]
    pub a: IntervalUnion,
    #[serde(rename = "B")]
    pub b: IntervalUnion,
    /// Distinct k-fold sums of the sample points.
    pub sums_checked: u64,
    pub min_sum: Rational,
    pub max_sum: Rational,
    pub hits_in_b: u64,
    pub all_below_beta: bool,
    pub boundary_rejected: bool,
    pub boundary_error: String,
}

/// Samples `A = (0, beta/k)` at `j beta / (k grid)`, `0 < j < grid`, checks
/// that every k-fold sum lies in `(0, beta)`, and that the boundary instance
/// `B = (beta, 1)` is rejected.
pub fn sharpness_scan(beta: &Rational, k: usize, grid: u64) -> Result<SharpnessReport> {
    if !beta.is_positive() || *beta >= 1 {
        return Err(Error::Range(format!("beta = {beta} must lie in (0, 1)")));
    }
    if k < 2 {
        return Err(Error::Range(format!("k = {k} must be at least 2")));
    }
    if grid < 10 {
        return Err(Error::Range(format!("grid = {grid} must be at least 10")));
    }
    let kr = Rational::from(k as u64);
    let a_end = beta / &kr;
    let a = IntervalUnion::single(crate::torus::Interval::open(
        Rational::zero(),
        a_end.clone(),
    ))?;
    let b = IntervalUnion::single(crate::torus::Interval::open(beta.clone(), Rational::one()))?;
    let h = &a_end / Rational::from(grid);
    let ku = k as u64;
    // a k-fold sum of the points j h is s h for every s in [k, k (grid - 1)]
    let (lo, hi) = (ku, ku * (grid - 1));
    let mut hits = 0u64;
    let mut all_below = true;
    for s in lo..=hi {
        let x = Rational::from(s) * &h;
        if !(x.is_positive() && x < *beta) {
            all_below = false;
        }
        if b.contains_torus_point(&x.fract()) {
            hits += 1;
        }
    }
    let (boundary_rejected, boundary_error) = match find_witness(&a, &b, k, Mode::Faithful) {
        Err(e @ Error::HypothesisViolated(_)) => (true, e.to_string()),
        Err(e) => (false, e.to_string()),
        Ok(_) => (false, "witness found".into()),
    };
    Ok(SharpnessReport {
        beta: beta.clone(),
        k,
        grid,
        a,
        b,
        sums_checked: hi - lo + 1,
        min_sum: Rational::from(lo) * &h,
        max_sum: Rational::from(hi) * &h,
        hits_in_b: hits,
        all_below_beta: all_below,
        boundary_rejected,
        boundary_error,
    })
}
