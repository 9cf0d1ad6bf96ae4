//! The `modbm` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::beatty::{Beatty, PolynomialIntCoeffs};
use crate::density::{
    hegyvari_avoidance_set, theorem1_hit_scan, threshold_density, weyl_density_estimate, CountMode,
    Window, DEFAULT_AVOID_SAMPLES, DEFAULT_SAMPLE_BUDGET, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::exactnum::{AlgebraicReal, Rational, DEFAULT_PRECISION_BUDGET, PRECISION_ENV};
use crate::torus::IntervalUnion;
use crate::witness::{find_witness_with_cap, sharpness_scan, verify_trace, Mode};
use crate::zp::{cd_lower_bound, verify_cd, ResidueSet, DEFAULT_EXHAUSTIVE_CAP, DEFAULT_PRIME_CAP};

const GRAMMAR: &str = "\
Grammar:
  constants   rat:<n>/<d> | quad:<e>,<f>,<d>,<g> meaning (e + f*sqrt(d))/g | dec:<digits>
  unions      comma-separated (l..r) [l..r) (l..r] [l..r] with endpoints n or n/d in [0,1], or empty
  polynomials poly:c0,c1,...,cd (constant term first), e.g. poly:0,0,1 is x^2
  rationals   n or n/d

Exit codes: 0 success, 1 violated precondition, 2 parse error, 3 precision or budget exhausted.";

#[derive(Parser, Debug)]
#[command(name = "modbm", version, about = "Modular sumset witnesses, Cauchy-Davenport checks and Beatty density experiments", after_help = GRAMMAR)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Digit budget for certified `dec:` constants.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION_BUDGET)]
    precision: u32,

    /// Largest prime the witness search may use.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME_CAP)]
    prime_cap: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a1..ak in A with a1+...+ak mod 1 in B, then re-verify the trace.
    #[command(after_help = GRAMMAR)]
    Witness {
        /// Interval union A inside (0,1).
        #[arg(long = "A", allow_hyphen_values = true)]
        a: String,
        /// Open interval union B inside (0,1).
        #[arg(long = "B", allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Faithful)]
        mode: ModeArg,
    },
    /// Check that A = (0, beta/k), B = (beta, 1) admits no witness.
    #[command(after_help = GRAMMAR)]
    Sharpness {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        k: usize,
        /// Sample points per unit of A.
        #[arg(long, default_value_t = 100)]
        grid: u64,
    },
    /// Verify |X + Y| >= min(p, |X| + |Y| - 1) over subsets of Z/pZ.
    #[command(name = "cd-verify", after_help = GRAMMAR)]
    CdVerify {
        #[arg(long)]
        p: u64,
        /// Largest p checked exhaustively; larger p are sampled.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        cap: u64,
        /// Random pairs checked above the cap.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// k-fold sumset of an explicit residue list.
    #[command(after_help = GRAMMAR)]
    Sumset {
        #[arg(long)]
        p: u64,
        /// Comma-separated integers, reduced mod p.
        #[arg(long, allow_hyphen_values = true)]
        residues: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Terms of floor(n alpha) and membership tests.
    #[command(after_help = GRAMMAR)]
    Beatty {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Number of terms to list.
        #[arg(long, default_value_t = 10)]
        terms: u64,
        /// Comma-separated integers to test for membership.
        #[arg(long, allow_hyphen_values = true)]
        contains: Option<String>,
    },
    /// The window set whose k-fold f-sums avoid the Beatty sequence.
    #[command(after_help = GRAMMAR)]
    Avoid {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "poly:0,0,1")]
        f: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "N")]
        n: u64,
        /// Sampled tuples checked directly.
        #[arg(long, default_value_t = DEFAULT_AVOID_SAMPLES)]
        samples: u64,
    },
    /// Count k-fold f-sums over {a : {f(a)/alpha} in J} that are Beatty terms.
    #[command(after_help = GRAMMAR)]
    Hits {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "poly:0,0,1")]
        f: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Window J; `threshold` names the open window (0, (1 - 1/alpha)/k).
        #[arg(long = "J")]
        j: String,
        #[arg(long = "N")]
        n: u64,
        /// Enumerate all tuples when |A|^k is at most this, else sample this many.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_BUDGET)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = CountArg::Distinct)]
        count: CountArg,
    },
    /// Density of {n : {rho f(n)} in J} against mu(J).
    #[command(after_help = GRAMMAR)]
    Equidist {
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, default_value = "poly:0,0,1")]
        f: String,
        #[arg(long = "J")]
        j: String,
        #[arg(long = "N")]
        n: u64,
        /// Accept any nonconstant polynomial in Z[x].
        #[arg(long)]
        relaxed: bool,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Faithful,
    Tight,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum CountArg {
    Distinct,
    Tuples,
}

/// A rendered report: JSON always, CSV where a table makes sense.
struct Report {
    json: Value,
    csv: Option<String>,
}

impl Report {
    fn new<T: Serialize>(value: &T) -> Self {
        Report {
            json: serde_json::to_value(value).expect("reports serialise"),
            csv: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                Ok(serde_json::to_string_pretty(&self.json).expect("valid json") + "\n")
            }
            Format::Csv => self.csv.clone().ok_or_else(|| {
                Error::Range("csv output is available for avoid, hits and equidist".into())
            }),
            Format::Plain => {
                let mut out = String::new();
                flatten("", &self.json, &mut out);
                Ok(out)
            }
        }
    }
}

/// `path: value` lines; arrays of scalars stay on one line.
fn flatten(path: &str, v: &Value, out: &mut String) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                flatten(&join(key), val, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{path}: [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), val, out);
            }
        }
        other => out.push_str(&format!("{path}: {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn constant(s: &str, budget: u32) -> Result<AlgebraicReal> {
    AlgebraicReal::parse_with_budget(s, budget)
}

fn integers(s: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in s.split(',') {
        let trimmed = part.trim();
        if !trimmed.is_empty() {
            let lead = part.len() - part.trim_start().len();
            let value = trimmed.parse::<i64>().map_err(|_| Error::Parse {
                input: s.to_string(),
                position: offset + lead,
                message: "expected an integer".into(),
            })?;
            out.push(value);
        }
        offset += part.len() + 1;
    }
    Ok(out)
}

fn execute(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Witness { a, b, k, mode } => {
            let a: IntervalUnion = a.parse()?;
            let b: IntervalUnion = b.parse()?;
            let mode = match mode {
                ModeArg::Faithful => Mode::Faithful,
                ModeArg::Tight => Mode::Tight,
            };
            let trace = find_witness_with_cap(&a, &b, *k, mode, g.prime_cap)?;
            let verdict = verify_trace(&trace, &a, &b, *k);
            if !verdict.ok {
                return Err(Error::InternalProofCheckFailed(
                    verdict.first_failure.unwrap_or_default(),
                ));
            }
            Ok(Report::new(
                &json!({ "trace": trace, "verification": verdict }),
            ))
        }
        Command::Sharpness { beta, k, grid } => {
            let beta: Rational = beta.parse()?;
            Ok(Report::new(&sharpness_scan(&beta, *k, *grid)?))
        }
        Command::CdVerify { p, cap, samples } => {
            Ok(Report::new(&verify_cd(*p, *cap, *samples, g.seed)?))
        }
        Command::Sumset { p, residues, k } => {
            let input = ResidueSet::from_residues(*p, integers(residues)?)?;
            if input.is_empty() {
                return Err(Error::Range("the residue list is empty".into()));
            }
            let result = input.k_fold_sumset(*k)?;
            let bound = (*p).min((*k as u64) * input.len() as u64 - *k as u64 + 1);
            Ok(Report::new(&json!({
                "p": p,
                "k": k,
                "input": input.iter().collect::<Vec<_>>(),
                "sumset": result.iter().collect::<Vec<_>>(),
                "size": result.len(),
                "cauchy_davenport_bound": bound,
                "pairwise_bound": if *k == 2 { Some(cd_lower_bound(input.len() as u64, input.len() as u64, *p)) } else { None },
            })))
        }
        Command::Beatty {
            alpha,
            terms,
            contains,
        } => {
            let beatty = Beatty::new(constant(alpha, g.precision)?)?;
            let listed = beatty.terms(*terms)?;
            let mut membership = Vec::new();
            if let Some(list) = contains {
                for m in integers(list)? {
                    let m = BigInt::from(m);
                    membership.push(json!({ "m": m.to_string(), "member": beatty.contains(&m)? }));
                }
            }
            Ok(Report::new(&json!({
                "alpha": beatty.alpha(),
                "window_left_end": beatty.threshold().to_decimal(12),
                "terms": listed.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "membership": membership,
            })))
        }
        Command::Avoid {
            alpha,
            f,
            k,
            n,
            samples,
        } => {
            let alpha = constant(alpha, g.precision)?;
            let f: PolynomialIntCoeffs = f.parse()?;
            let (report, _) = hegyvari_avoidance_set(&alpha, &f, *k, *n, *samples, g.seed)?;
            Ok(Report::new(&report).with_csv(report.csv()))
        }
        Command::Hits {
            alpha,
            f,
            k,
            j,
            n,
            budget,
            count,
        } => {
            let alpha = constant(alpha, g.precision)?;
            let f: PolynomialIntCoeffs = f.parse()?;
            let window = if j.trim() == "threshold" {
                let beatty = Beatty::new(alpha.clone())?;
                Window::Open {
                    lo: AlgebraicReal::Rational(Rational::zero()),
                    hi: threshold_density(&beatty, *k),
                }
            } else {
                Window::Union(j.parse()?)
            };
            let mode = match count {
                CountArg::Distinct => CountMode::Distinct,
                CountArg::Tuples => CountMode::Tuples,
            };
            let report = theorem1_hit_scan(&alpha, &f, *k, &window, *n, *budget, g.seed, mode)?;
            Ok(Report::new(&report).with_csv(report.csv()))
        }
        Command::Equidist {
            rho,
            f,
            j,
            n,
            relaxed,
        } => {
            let rho = constant(rho, g.precision)?;
            let f = if *relaxed {
                PolynomialIntCoeffs::parse_relaxed(f)?
            } else {
                f.parse()?
            };
            let j: IntervalUnion = j.parse()?;
            let report = weyl_density_estimate(&rho, &f, &j, *n)?;
            Ok(Report::new(&report).with_csv(report.csv()))
        }
    }
}

/// Parses `argv` (program name first), runs one subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let text = match execute(&cli).and_then(|r| r.render(cli.global.format)) {
        Ok(text) => text,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(err, "error: cannot write report: {msg}");
            1
        }
    }
}
