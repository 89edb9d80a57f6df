use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use toricdiag::applications::{
    b1_vanishes_fast, b1_vanishes_with, check_splitting_hypothesis, recover_splitting_type, table_h0,
    virtual_resolution_for, FirstFactors, SplittingType,
};
use toricdiag::cohom::{cohomology_table, cohomology_vector, FanOracle, SheafSpec, ORACLE_MAX_DIM};
use toricdiag::coxalg::{Field, FreeComplex};
use toricdiag::diagonal::{
    build_pn_warmup, build_r, compare_warmup, default_window, exactness_window, rank_formula, verify_exactness,
};
use toricdiag::export::{complex_to_m2, complex_to_text, monad_to_json};
use toricdiag::monad::{build_monad_for, verify_monad_identity_for};
use toricdiag::{Degree2, Rect, ToricVariety};

const KLEINSCHMIDT_RULES: &str = "\
X = P(O + O(a_1) + ... + O(a_s)) over P^r is given in Kleinschmidt normal form:
  --r r      base dimension, r >= 1
  --a a_1,...,a_s  s >= 1 twists with 0 <= a_1 <= ... <= a_s
Examples: --r 1 --a 2 (Hirzebruch surface F_2), --r 1 --a 0 (P1 x P1), --r 2 --a 0,1";

#[derive(Parser)]
#[command(name = "toricdiag", version, about = "Resolutions of the diagonal on Picard-rank-2 toric varieties")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Prime for modular rank computations.
    #[arg(long, env = "TORICDIAG_PRIME", default_value_t = 32003, global = true)]
    prime: u64,
    /// Worker threads for degree-wise checks (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    M2,
}

#[derive(Args, Clone)]
struct VarietyArgs {
    /// Base dimension r of P^r.
    #[arg(long)]
    r: usize,
    /// Twists a_1,...,a_s, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    a: Vec<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// The resolution R of the diagonal on X x X.
    Resolve {
        #[command(flatten)]
        x: VarietyArgs,
    },
    /// Cohomology table of a sum of line bundles over a window of twists.
    Cohomology {
        #[command(flatten)]
        x: VarietyArgs,
        /// Sum of line bundles "b,c:m;b,c:m" (default O).
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        sheaf: String,
        /// Single twist "k,l": print the cohomology vector of O(k,l) tensor the sheaf.
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<String>,
        /// "lo:hi" for a square or "k0:k1,l0:l1".
        #[arg(long, allow_hyphen_values = true, default_value = "-3:3")]
        window: String,
    },
    /// The monad B(F) of a sum of line bundles with acyclic twists.
    Monad {
        #[command(flatten)]
        x: VarietyArgs,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "degree")]
        sheaf: Option<String>,
        /// Line bundle "b,c".
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<String>,
    },
    /// A virtual resolution of a sum of line bundles.
    Virtual {
        #[command(flatten)]
        x: VarietyArgs,
        #[arg(long, allow_hyphen_values = true)]
        sheaf: String,
    },
    /// Recover the splitting type from the h^0 table of a sum of line bundles,
    /// and optionally test a candidate against the table.
    Split {
        #[command(flatten)]
        x: VarietyArgs,
        /// The bundle whose table is inspected.
        #[arg(long, allow_hyphen_values = true)]
        sheaf: String,
        /// Candidate splitting type "b,c:m;...".
        #[arg(long, allow_hyphen_values = true)]
        candidate: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "-6:6")]
        window: String,
    },
    /// Run verification suites; exit 1 if any check fails.
    Verify {
        #[command(flatten)]
        x: VarietyArgs,
        /// Comma-separated subset of ranks, ddzero, exactness, monad, cohomology, b1, or all.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<Suite>,
        /// Window margin around generator locations (default: largest of 2, 1, 0 within budget).
        #[arg(long)]
        margin: Option<i64>,
    },
    /// The resolution of the diagonal of P^n from the Eagon-Northcott complex.
    Warmup {
        #[arg(long)]
        n: usize,
        /// Also compare with the Eagon-Northcott construction; exit 1 on mismatch.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Ranks,
    Ddzero,
    Exactness,
    Monad,
    Cohomology,
    B1,
}

/// Usage problems exit with 2, failed verifications with 1.
enum Failure {
    Usage(String),
    Verification(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn variety(x: &VarietyArgs) -> Result<ToricVariety, Failure> {
    ToricVariety::new(x.r, x.a.clone()).map_err(|e| usage(format!("--r {} --a {:?}: {e}\n\n{KLEINSCHMIDT_RULES}", x.r, x.a)))
}

fn parse_sheaf(flag: &str, s: &str) -> Result<SheafSpec, Failure> {
    s.parse().map_err(|e| usage(format!("{flag} {s:?}: {e}")))
}

fn parse_degree(flag: &str, s: &str) -> Result<Degree2, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    let nums: Result<Vec<i64>, _> = parts.iter().map(|p| p.trim().parse::<i64>()).collect();
    match nums {
        Ok(v) if v.len() == 2 => Ok([v[0], v[1]]),
        _ => Err(usage(format!("{flag} {s:?}: expected two integers \"k,l\""))),
    }
}

fn parse_range(s: &str) -> Option<(i64, i64)> {
    let (lo, hi) = s.split_once(':')?;
    let (lo, hi) = (lo.trim().parse().ok()?, hi.trim().parse().ok()?);
    (lo <= hi).then_some((lo, hi))
}

fn parse_window(s: &str) -> Result<Rect, Failure> {
    let bad = || usage(format!("--window {s:?}: expected \"lo:hi\" or \"k0:k1,l0:l1\" with lo <= hi"));
    match s.split_once(',') {
        None => parse_range(s).map(|r| Rect::new(r, r)).ok_or_else(bad),
        Some((k, l)) => Ok(Rect::new(parse_range(k).ok_or_else(bad)?, parse_range(l).ok_or_else(bad)?)),
    }
}

fn complex_artifact(c: &FreeComplex, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(c).expect("complex serializes"),
        Format::Text => complex_to_text(c),
        Format::M2 => complex_to_m2(c),
    }
}

fn no_m2(format: Format, cmd: &str) -> Result<(), Failure> {
    if format == Format::M2 {
        return Err(usage(format!("--format m2 applies to complexes; {cmd} emits tables")));
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

struct Outcome {
    artifact: String,
    failed: Option<String>,
}

impl Outcome {
    fn ok(artifact: String) -> Self {
        Outcome { artifact, failed: None }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if cli.prime < 2 || cli.prime > u32::MAX as u64 || !is_prime(cli.prime) {
        return Err(usage(format!("--prime {}: expected a prime below 2^32", cli.prime)));
    }
    let field = Field::Prime(cli.prime);
    let format = cli.format;
    match &cli.command {
        Command::Resolve { x } => {
            let x = variety(x)?;
            Ok(Outcome::ok(complex_artifact(&build_r(&x).complex, format)))
        }
        Command::Cohomology { x, sheaf, degree, window } => {
            no_m2(format, "cohomology")?;
            let x = variety(x)?;
            let f = parse_sheaf("--sheaf", sheaf)?;
            if let Some(d) = degree {
                let d = parse_degree("--degree", d)?;
                let mut h = vec![0u64; x.dim() + 1];
                for s in f.summands() {
                    for (i, v) in cohomology_vector(&x, [d[0] + s.twist[0], d[1] + s.twist[1]]).into_iter().enumerate() {
                        h[i] += s.mult * v;
                    }
                }
                return Ok(Outcome::ok(match format {
                    Format::Text => {
                        h.iter().enumerate().map(|(i, v)| format!("h^{i} = {v}")).collect::<Vec<_>>().join("\n") + "\n"
                    }
                    _ => pretty(&json!({ "degree": d, "h": h })),
                }));
            }
            let table = cohomology_table(&x, &f, parse_window(window)?);
            Ok(Outcome::ok(match format {
                Format::Text => table.render_text(),
                _ => serde_json::to_string_pretty(&table).expect("table serializes"),
            }))
        }
        Command::Monad { x, sheaf, degree } => {
            let x = variety(x)?;
            let f = match (sheaf, degree) {
                (Some(s), None) => parse_sheaf("--sheaf", s)?,
                (None, Some(d)) => {
                    let d = parse_degree("--degree", d)?;
                    SheafSpec::line(d[0], d[1])
                }
                _ => return Err(usage("monad needs --sheaf or --degree")),
            };
            if f.is_empty() {
                return Err(usage("--sheaf: no summands"));
            }
            let res = build_r(&x);
            let m = build_monad_for(&res, &f).map_err(|e| usage(format!("--sheaf {f}: {e}")))?;
            Ok(Outcome::ok(match format {
                Format::Json => monad_to_json(&m),
                _ => complex_artifact(&m.complex, format),
            }))
        }
        Command::Virtual { x, sheaf } => {
            let x = variety(x)?;
            let f = parse_sheaf("--sheaf", sheaf)?;
            if f.is_empty() {
                return Err(usage("--sheaf: no summands"));
            }
            let res = build_r(&x);
            let v = virtual_resolution_for(&res, &f).map_err(|e| Failure::Other(anyhow!(e)))?;
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&json!({ "shift": v.shift, "length": v.length(), "complex": v.complex })),
                Format::Text => format!("shift ({}, {})\n{}", v.shift[0], v.shift[1], complex_to_text(&v.complex)),
                Format::M2 => complex_to_m2(&v.complex),
            }))
        }
        Command::Split { x, sheaf, candidate, window } => {
            no_m2(format, "split")?;
            let x = variety(x)?;
            let f = parse_sheaf("--sheaf", sheaf)?;
            let w = parse_window(window)?;
            let table = cohomology_table(&x, &f, w);
            let recovered = recover_splitting_type(&x, table_h0(&table), w);
            let mut out = json!({});
            let mut failed = None;
            match &recovered {
                Ok(s) => out["recovered"] = serde_json::to_value(s).expect("splitting type serializes"),
                Err(e) => {
                    out["recovery_error"] = json!(e.to_string());
                    failed = Some(e.to_string());
                }
            }
            if let Some(c) = candidate {
                let cand = SplittingType::from_sheaf(&parse_sheaf("--candidate", c)?);
                let verdict = check_splitting_hypothesis(&x, &cand, &table).map_err(|e| usage(format!("--window: {e}")))?;
                out["candidate"] = serde_json::to_value(&cand).expect("splitting type serializes");
                out["verdict"] = serde_json::to_value(verdict).expect("verdict serializes");
                if !verdict.conclusion {
                    failed = Some(format!(
                        "candidate not confirmed: nef_chain_ok = {}, table_match = {}",
                        verdict.nef_chain_ok, verdict.table_match
                    ));
                }
            }
            let artifact = match format {
                Format::Text => split_text(&out),
                _ => pretty(&out),
            };
            Ok(Outcome { artifact, failed })
        }
        Command::Verify { x, suite, margin } => {
            no_m2(format, "verify")?;
            let x = variety(x)?;
            verify(&x, suite, *margin, field, format)
        }
        Command::Warmup { n, check } => {
            if *n == 0 {
                return Err(usage("--n: the warm-up needs n >= 1"));
            }
            let c = build_pn_warmup(*n);
            let mut out = Outcome::ok(complex_artifact(&c, format));
            if *check {
                let cmp = compare_warmup(*n);
                eprintln!(
                    "warm-up n = {}: terms {}, exact {}, Eagon-Northcott exact {}, cokernels {}",
                    n, cmp.terms_match, cmp.warmup_exact, cmp.eagon_northcott_exact, cmp.cokernels_match
                );
                if !cmp.passed() {
                    out.failed = Some("warm-up comparison failed".into());
                }
            }
            Ok(out)
        }
    }
}

fn split_text(v: &Value) -> String {
    let mut s = String::new();
    let parts = |v: &Value| -> String {
        v["parts"]
            .as_array()
            .map(|ps| {
                ps.iter()
                    .map(|p| format!("O({},{})^{}", p["twist"][0], p["twist"][1], p["mult"]))
                    .collect::<Vec<_>>()
                    .join(" + ")
            })
            .unwrap_or_default()
    };
    if v.get("recovered").is_some() {
        s += &format!("recovered: {}\n", parts(&v["recovered"]));
    }
    if let Some(e) = v.get("recovery_error") {
        s += &format!("recovery failed: {}\n", e.as_str().unwrap_or_default());
    }
    if v.get("candidate").is_some() {
        let verdict = &v["verdict"];
        s += &format!(
            "candidate: {}\nnef chain: {}\ntable match: {}\nsplits as candidate: {}\n",
            parts(&v["candidate"]),
            verdict["nef_chain_ok"],
            verdict["table_match"],
            verdict["conclusion"]
        );
    }
    s
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d: &u64| d * d <= p).all(|d| p % d != 0)
}

fn verify(x: &ToricVariety, suites: &[Suite], margin: Option<i64>, field: Field, format: Format) -> Result<Outcome, Failure> {
    let want = |s: Suite| suites.contains(&Suite::All) || suites.contains(&s);
    let res = build_r(x);
    let mut results: Vec<(&str, bool, Value)> = Vec::new();
    if want(Suite::Ranks) {
        let ranks = res.ranks();
        let n = ranks.len();
        let formula: Vec<u64> = (0..n).map(|k| rank_formula(x, k).expect("slot in range")).collect();
        let ok = ranks.iter().zip(&formula).all(|(a, b)| *a as u64 == *b) && (0..n).all(|k| ranks[k] == ranks[n - 1 - k]);
        results.push(("ranks", ok, json!({ "ranks": ranks, "formula": formula })));
    }
    if want(Suite::Ddzero) {
        let dd = res.complex.check_ddzero();
        let linear = res.complex.diffs.iter().all(|d| d.entries.iter().all(|e| e.var.is_some() && e.coeff.abs() == 1));
        let witness = dd.as_ref().err().map(|w| w.to_string());
        results.push(("ddzero", dd.is_ok() && linear, json!({ "linear": linear, "witness": witness })));
    }
    if want(Suite::Exactness) {
        let (window, m) = match margin {
            Some(m) => (exactness_window(&res, m), m),
            None => default_window(&res),
        };
        let rep = verify_exactness(&res, &window, field);
        let failures: Vec<Value> =
            rep.failures.iter().take(10).map(|f| json!({ "degree": f.degree, "slot": f.slot, "homology": f.homology })).collect();
        results.push((
            "exactness",
            rep.passed(),
            json!({ "margin": m, "window": rep.window, "degrees": rep.degrees, "nontrivial": rep.nontrivial,
                    "basis_elements": rep.basis_elements, "failures": failures }),
        ));
    }
    if want(Suite::Monad) {
        let mut bad = Vec::new();
        for b in 0..=x.r() as i64 {
            for c in 0..=x.s() as i64 {
                let rep = verify_monad_identity_for(&res, b, c).map_err(|e| Failure::Other(anyhow!(e)))?;
                if !rep.passed() {
                    bad.push(json!([b, c]));
                }
            }
        }
        results.push(("monad", bad.is_empty(), json!({ "failing_twists": bad })));
    }
    if want(Suite::Cohomology) {
        if x.dim() > ORACLE_MAX_DIM {
            results.push(("cohomology", true, json!({ "skipped": format!("dim X > {ORACLE_MAX_DIM}") })));
        } else {
            let mut oracle = FanOracle::new(x).map_err(|e| Failure::Other(anyhow!(e)))?;
            let mut bad = Vec::new();
            for d in Rect::square(-6, 6).points() {
                let closed = cohomology_vector(x, d);
                let fan = oracle.vector(d, 2).map_err(|e| Failure::Other(anyhow!(e)))?;
                if closed != fan {
                    bad.push(json!({ "degree": d, "closed": closed, "oracle": fan }));
                }
            }
            results.push(("cohomology", bad.is_empty(), json!({ "window": [-6, 6], "mismatches": bad })));
        }
    }
    if want(Suite::B1) {
        let ff = FirstFactors::of(&res);
        let mut bad = Vec::new();
        for d in Rect::square(-6, 6).points() {
            let slow = b1_vanishes_with(x, &ff, d);
            let negative_ok = !(d[0] < 0 && d[1] < 0) || slow;
            if slow != b1_vanishes_fast(x, &ff, d) || !negative_ok {
                bad.push(json!(d));
            }
        }
        results.push(("b1", bad.is_empty(), json!({ "failing_degrees": bad })));
    }
    for (name, ok, _) in &results {
        eprintln!("{name}: {}", if *ok { "pass" } else { "FAIL" });
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let artifact = match format {
        Format::Text => results.iter().map(|(n, ok, _)| format!("{n} {}\n", if *ok { "pass" } else { "fail" })).collect(),
        _ => {
            let mut obj = serde_json::Map::new();
            obj.insert("variety".into(), json!(x.name()));
            for (name, ok, detail) in results {
                obj.insert(name.into(), json!({ "pass": ok, "detail": detail }));
            }
            pretty(&Value::Object(obj))
        }
    };
    Ok(Outcome { artifact, failed: (!failed.is_empty()).then(|| format!("failed: {}", failed.join(", "))) })
}

fn emit(artifact: &str, output: Option<&PathBuf>) -> anyhow::Result<()> {
    let mut text = artifact.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli).and_then(|out| {
        emit(&out.artifact, cli.output.as_ref())?;
        match out.failed {
            Some(msg) => Err(Failure::Verification(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
