//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances and time limits are pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use modular_bm::beatty::{Beatty, PolynomialIntCoeffs};
use modular_bm::density::{
    hegyvari_avoidance_set, theorem1_hit_scan, weyl_density_estimate, CountMode, Window,
    DEFAULT_SAMPLE_BUDGET, DEFAULT_SEED,
};
use modular_bm::exactnum::{AlgebraicReal, Rational};
use modular_bm::torus::{Interval, IntervalUnion};
use modular_bm::witness::{
    find_witness, find_witness_with_cap, sharpness_scan, verify_trace, Mode,
};
use modular_bm::zp::{verify_cd_exhaustive, verify_cd_sampled, ResidueSet, DEFAULT_EXHAUSTIVE_CAP};
use modular_bm::Error;
use num_bigint::BigInt;
use num_integer::Roots;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CD_EXHAUSTIVE_LIMIT: Duration = Duration::from_secs(60);
const CD_SAMPLED_PAIRS: u64 = 100_000;
const WITNESS_INSTANCES: usize = 100;
const WITNESS_PRIME_CAP: u64 = 1 << 26;
const WITNESS_LIMIT: Duration = Duration::from_secs(300);
const AVOID_N: u64 = 1_000_000;
const AVOID_SAMPLES: u64 = 10_000;
const AVOID_TOL: (i64, i64) = (1, 100);
const AVOID_LIMIT: Duration = Duration::from_secs(120);
const WEYL_N: u64 = 1_000_000;
const WEYL_TOL: (i64, i64) = (1, 100);
const BEATTY_RANGE: u64 = 100_000;
const GOLDEN: &str = include_str!("golden/worked_witness.json");

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;
type TermOracle = fn(u128) -> u128;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn u(s: &str) -> IntervalUnion {
    s.parse().expect("valid union")
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn naive_sumset_size(x: &[u64], y: &[u64], p: u64) -> usize {
    let mut seen = vec![false; p as usize];
    for a in x {
        for b in y {
            seen[((a + b) % p) as usize] = true;
        }
    }
    seen.iter().filter(|&&s| s).count()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    for p in [2u64, 3, 5, 7] {
        let r = verify_cd_exhaustive(p, DEFAULT_EXHAUSTIVE_CAP).map_err(|e| e.to_string())?;
        let expected = ((1u64 << p) - 1).pow(2);
        ensure(
            r.pairs_checked == expected,
            format!("p={p}: {} pairs, expected {expected}", r.pairs_checked),
        )?;
        ensure(
            r.violations == 0,
            format!("p={p}: {} violations", r.violations),
        )?;
        pairs += r.pairs_checked;
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < CD_EXHAUSTIVE_LIMIT,
        format!("exhaustive took {elapsed:?}"),
    )?;

    // the sumset itself against a naive double loop, every pair for p = 5
    let p = 5u64;
    let subsets: Vec<Vec<u64>> = (1u64..1 << p)
        .map(|b| (0..p).filter(|i| b >> i & 1 == 1).collect())
        .collect();
    for x in &subsets {
        let xs = ResidueSet::from_residues(p, x.iter().map(|&v| v as i64)).unwrap();
        for y in &subsets {
            let ys = ResidueSet::from_residues(p, y.iter().map(|&v| v as i64)).unwrap();
            let got = xs.sumset(&ys).unwrap().len();
            ensure(
                got == naive_sumset_size(x, y, p),
                format!("sumset size mismatch for {x:?} + {y:?}"),
            )?;
        }
    }

    for p in [11u64, 13] {
        let r = verify_cd_sampled(p, CD_SAMPLED_PAIRS, DEFAULT_SEED).map_err(|e| e.to_string())?;
        ensure(
            r.pairs_checked == CD_SAMPLED_PAIRS && r.violations == 0,
            format!("p={p}: {r:?}"),
        )?;
    }
    Ok(format!(
        "{pairs} exhaustive pairs for p in {{2,3,5,7}} in {:.2?}, {CD_SAMPLED_PAIRS} seeded pairs each for p in {{11,13}}, 0 violations",
        elapsed
    ))
}

/// Open union of up to three intervals with endpoints `i/den`, `0 < i < den`.
fn random_union(rng: &mut ChaCha8Rng) -> IntervalUnion {
    let den = rng.gen_range(4i64..=40);
    let pieces = rng.gen_range(1usize..=3).min(((den - 1) / 2) as usize);
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() < 2 * pieces {
        let c = rng.gen_range(1..den);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let intervals = cuts
        .chunks(2)
        .map(|w| Interval::open(q(w[0], den), q(w[1], den)))
        .collect();
    IntervalUnion::make(intervals).expect("disjoint by construction")
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let (mut accepted, mut rejected_delta, mut rejected_cap) = (0usize, 0usize, 0usize);
    let mut max_p = 0u64;
    let mut per_k = [0usize; 5];
    while accepted < WITNESS_INSTANCES {
        ensure(
            rejected_delta + rejected_cap < 1_000_000,
            "instance generator stalled",
        )?;
        let k = rng.gen_range(2usize..=4);
        let (a, b) = (random_union(&mut rng), random_union(&mut rng));
        let trace = match find_witness_with_cap(&a, &b, k, Mode::Faithful, WITNESS_PRIME_CAP) {
            Err(Error::HypothesisViolated(_)) => {
                rejected_delta += 1;
                continue;
            }
            Err(Error::PrimeCapExceeded { .. }) => {
                rejected_cap += 1;
                continue;
            }
            Err(e) => return Err(format!("A={a} B={b} k={k}: {e}")),
            Ok(t) => t,
        };
        let verdict = verify_trace(&trace, &a, &b, k);
        ensure(
            verdict.ok,
            format!("A={a} B={b} k={k}: {:?}", verdict.first_failure),
        )?;
        if let Some(c) = trace.checks.iter().find(|c| !c.holds) {
            return Err(format!(
                "A={a} B={b} k={k}: check {} fails: {} {} {}",
                c.name, c.lhs, c.relation, c.rhs
            ));
        }
        // soundness from first principles
        ensure(trace.real_witness.len() == k, "witness length")?;
        for x in &trace.real_witness {
            ensure(a.contains_rational(x), format!("{x} not in A={a}"))?;
        }
        let total: Rational = trace.real_witness.iter().sum();
        ensure(
            b.contains_rational(&total.fract()),
            format!("sum {total} mod 1 not in B={b}"),
        )?;
        max_p = max_p.max(trace.p);
        per_k[k] += 1;
        accepted += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < WITNESS_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!(
        "{accepted} instances (k=2: {}, k=3: {}, k=4: {}) found and verified, largest p = {max_p}, \
         generator skipped {rejected_delta} with delta <= 0 and {rejected_cap} above the cap, {elapsed:.2?}",
        per_k[2], per_k[3], per_k[4]
    ))
}

fn trial_division_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn criterion_3() -> Outcome {
    let (a, b) = (u("(0..3/10)"), u("(1/2..1)"));
    let tr = find_witness(&a, &b, 2, Mode::Faithful).map_err(|e| e.to_string())?;
    ensure(tr.delta == q(1, 10), format!("delta {}", tr.delta))?;
    ensure(tr.r == q(1, 40), format!("r {}", tr.r))?;
    ensure(tr.b2 == u("(21/40..39/40)"), format!("B2 {}", tr.b2))?;
    // max{2/(1/2 - 1/20), 2/(3/10)} + 24 (2 + 1)/(1/10)
    ensure(
        tr.prime_bound == q(20, 3) + q(720, 1),
        format!("bound {}", tr.prime_bound),
    )?;
    ensure(
        tr.p == 727 && trial_division_prime(727),
        format!("p {}", tr.p),
    )?;
    ensure(
        verify_trace(&tr, &a, &b, 2).ok,
        "verify_trace rejected the trace",
    )?;

    let render = || -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_modbm"))
            .args([
                "witness",
                "--A",
                "(0..3/10)",
                "--B",
                "(1/2..1)",
                "--k",
                "2",
                "--mode",
                "faithful",
            ])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(
            out.status.success(),
            format!("exit {:?}", out.status.code()),
        )?;
        String::from_utf8(out.stdout).map_err(|e| e.to_string())
    };
    let (first, second) = (render()?, render()?);
    ensure(first == second, "two runs differ")?;
    ensure(first == GOLDEN, "output differs from the golden trace")?;
    Ok(format!(
        "p = 727, witness {:?} -> {}, golden trace matches byte for byte ({} bytes)",
        tr.residue_witness,
        tr.real_sum,
        first.len()
    ))
}

fn criterion_4() -> Outcome {
    let mut sums = 0u64;
    for beta in [q(1, 4), q(1, 2), q(3, 4)] {
        for k in [2usize, 3] {
            let a_end = &beta / Rational::from(k as u64);
            let a = IntervalUnion::single(Interval::open(Rational::zero(), a_end.clone())).unwrap();
            let b = IntervalUnion::single(Interval::open(beta.clone(), Rational::one())).unwrap();
            match find_witness(&a, &b, k, Mode::Faithful) {
                Err(Error::HypothesisViolated(_)) => {}
                other => {
                    return Err(format!(
                        "beta={beta} k={k}: expected rejection, got {other:?}"
                    ))
                }
            }
            let rep = sharpness_scan(&beta, k, 100).map_err(|e| e.to_string())?;
            ensure(
                rep.boundary_rejected && rep.all_below_beta && rep.hits_in_b == 0,
                format!("{rep:?}"),
            )?;
            ensure(
                rep.max_sum < beta,
                format!("max sum {} >= {beta}", rep.max_sum),
            )?;
            sums += rep.sums_checked;

            // brute force over every tuple of 30 evenly spaced points of A
            let pts: Vec<Rational> = (1..30).map(|j| &a_end * q(j, 30)).collect();
            let mut idx = vec![0usize; k];
            loop {
                let s: Rational = idx.iter().map(|&i| pts[i].clone()).sum();
                ensure(
                    s.is_positive() && s < beta && !b.contains_rational(&s.fract()),
                    format!("sum {s}"),
                )?;
                let mut pos = k;
                while pos > 0 && idx[pos - 1] + 1 == pts.len() {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                idx[pos - 1] += 1;
                for slot in &mut idx[pos..] {
                    *slot = 0;
                }
            }
        }
    }
    Ok(format!(
        "6 boundary instances rejected, {sums} distinct k-fold sums all in (0, beta), brute-force tuples agree"
    ))
}

fn sqrt2() -> AlgebraicReal {
    AlgebraicReal::sqrt(2)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (rep, members) = hegyvari_avoidance_set(
        &sqrt2(),
        &PolynomialIntCoeffs::square(),
        2,
        AVOID_N,
        AVOID_SAMPLES,
        DEFAULT_SEED,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(rep.window_proof == Some(true), "window proof failed")?;
    ensure(
        rep.tuples_examined >= 10_000,
        format!("only {} sampled tuples", rep.tuples_examined),
    )?;
    ensure(
        rep.hit_count == 0,
        format!("{} sampled tuples hit", rep.hit_count),
    )?;
    ensure(
        rep.criterion_disagreements == 0,
        format!("{} disagreements", rep.criterion_disagreements),
    )?;
    let tol = q(AVOID_TOL.0, AVOID_TOL.1);
    ensure(
        rep.density_within(&tol).map_err(|e| e.to_string())?,
        format!("density {}", rep.density_decimal),
    )?;
    let target = 0.5 - 0.5 / 2f64.sqrt();
    let est = members.len() as f64 / AVOID_N as f64;
    ensure(
        (est - target).abs() <= 0.01,
        format!("float oracle: {est} vs {target}"),
    )?;
    ensure(elapsed < AVOID_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!(
        "|A| = {} at N = {AVOID_N}, density {} vs target {} (tol {}/{}), 0 hits in {} sampled pairs, window proof holds, {elapsed:.2?}",
        rep.set_size, rep.density_decimal, rep.target_decimal, AVOID_TOL.0, AVOID_TOL.1, rep.tuples_examined
    ))
}

fn criterion_6() -> Outcome {
    let window = Window::Union(u("(0..1/5)"));
    let mut counts = Vec::new();
    for n in [1_000u64, 10_000] {
        let rep = theorem1_hit_scan(
            &sqrt2(),
            &PolynomialIntCoeffs::square(),
            2,
            &window,
            n,
            DEFAULT_SAMPLE_BUDGET,
            DEFAULT_SEED,
            CountMode::Distinct,
        )
        .map_err(|e| e.to_string())?;
        ensure(
            rep.window_above_threshold,
            "window measure not above the threshold",
        )?;
        ensure(
            rep.criterion_disagreements == 0,
            format!("N={n}: {} disagreements", rep.criterion_disagreements),
        )?;
        counts.push((n, rep.hit_count, rep.enumeration));
    }
    ensure(counts[0].1 >= 1, "no hits at N = 1000")?;
    ensure(
        counts[1].1 > counts[0].1,
        format!("hit counts not increasing: {counts:?}"),
    )?;
    Ok(format!(
        "distinct hits {} at N=1000 ({}), {} at N=10000 ({})",
        counts[0].1, counts[0].2, counts[1].1, counts[1].2
    ))
}

fn criterion_7() -> Outcome {
    let rep = weyl_density_estimate(
        &sqrt2(),
        &PolynomialIntCoeffs::square(),
        &u("(0..1/2)"),
        WEYL_N,
    )
    .map_err(|e| e.to_string())?;
    let tol = q(WEYL_TOL.0, WEYL_TOL.1);
    let trend: Vec<String> = rep
        .milestones
        .iter()
        .filter(|m| m.n >= 1000)
        .map(|m| format!("N={}: {}", m.n, m.deviation_decimal))
        .collect();
    ensure(
        rep.deviation <= tol,
        format!("deviation {} at N = {WEYL_N}", rep.deviation_decimal),
    )?;
    Ok(format!(
        "estimate {} (tol {}/{}); deviation trend {}",
        rep.density_decimal,
        WEYL_TOL.0,
        WEYL_TOL.1,
        trend.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let mut checked = 0u64;
    // floor(n sqrt 2) = isqrt(2 n^2); floor(n phi) = (n + isqrt(5 n^2)) / 2
    let oracles: [(&str, AlgebraicReal, TermOracle); 2] = [
        ("sqrt 2", sqrt2(), |n| (2 * n * n).sqrt()),
        ("golden ratio", AlgebraicReal::golden_ratio(), |n| {
            (n + (5 * n * n).sqrt()) / 2
        }),
    ];
    for (name, alpha, term) in oracles {
        let beatty = Beatty::new(alpha).map_err(|e| e.to_string())?;
        let mut member = vec![false; BEATTY_RANGE as usize + 1];
        for n in 1u128.. {
            let t = term(n);
            if t > BEATTY_RANGE as u128 {
                break;
            }
            member[t as usize] = true;
        }
        let mut disagreements = 0u64;
        for m in 1..=BEATTY_RANGE {
            if beatty
                .contains(&BigInt::from(m))
                .map_err(|e| e.to_string())?
                != member[m as usize]
            {
                disagreements += 1;
            }
            checked += 1;
        }
        ensure(
            disagreements == 0,
            format!("{name}: {disagreements} disagreements"),
        )?;
    }
    Ok(format!("{checked} membership tests (m <= {BEATTY_RANGE}, sqrt 2 and golden ratio), 0 disagreements"))
}

fn criterion_9() -> Outcome {
    let runs: [&[&str]; 8] = [
        &[
            "witness",
            "--A",
            "(1/10..3/10),(2/5..1/2)",
            "--B",
            "(0..1/5),(3/5..9/10)",
            "--k",
            "3",
        ],
        &["sharpness", "--beta", "1/2", "--k", "2"],
        &["cd-verify", "--p", "13", "--samples", "2000"],
        &["sumset", "--p", "101", "--residues", "1,5,7,30", "--k", "4"],
        &[
            "beatty",
            "--alpha",
            "quad:1,1,5,2",
            "--terms",
            "30",
            "--contains",
            "1,2,3,4,5,6",
        ],
        &[
            "avoid",
            "--alpha",
            "quad:0,1,2,1",
            "--N",
            "20000",
            "--samples",
            "3000",
        ],
        &[
            "hits",
            "--alpha",
            "quad:0,1,2,1",
            "--J",
            "(0..1/5)",
            "--N",
            "3000",
            "--k",
            "3",
            "--budget",
            "20000",
        ],
        &[
            "equidist",
            "--rho",
            "quad:0,1,2,1",
            "--J",
            "(0..1/2)",
            "--N",
            "20000",
            "--format",
            "csv",
        ],
    ];
    for args in runs {
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_modbm"))
                .args(["--seed", "99"])
                .args(args)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (once()?, once()?);
        ensure(
            a.status.success(),
            format!("{args:?}: exit {:?}", a.status.code()),
        )?;
        ensure(
            a.stdout == b.stdout && !a.stdout.is_empty(),
            format!("{args:?}: outputs differ"),
        )?;
    }
    Ok(format!(
        "{} subcommands byte-identical across repeated runs",
        runs.len()
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("Cauchy-Davenport exhaustive and sampled", criterion_1),
        ("witness soundness and completeness", criterion_2),
        ("worked instance and golden trace", criterion_3),
        ("sharpness boundary", criterion_4),
        ("avoidance construction", criterion_5),
        ("above-threshold hits", criterion_6),
        ("Weyl density", criterion_7),
        ("Beatty criterion equivalence", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS [{name}] {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL [{name}] {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
