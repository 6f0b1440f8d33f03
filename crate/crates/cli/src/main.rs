//! `ehrhart`: command-line front end for the `ehrhart_tensor` library.
//!
//! Every subcommand prints one JSON document on standard output (or an
//! aligned text rendering with `--table`). Failures print
//! `{"error": {"kind": ..., "message": ...}}` and exit nonzero.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ehrhart_tensor::ehrhart::{
    discrete_moment, ehrhart_tensor_polynomial, moment_tensor, reciprocity_check, second_coefficient_facets,
    to_hr_vector,
};
use ehrhart_tensor::halfopen::{hr_halfopen, HalfOpenSimplex, HalfOpenSimplexJson};
use ehrhart_tensor::json::{hvector_to_json, polynomial_to_json, tensor_to_json};
use ehrhart_tensor::positivity::{
    check_ehrhart_psd, check_h2_psd, conjecture_scan, reflexivity_report, sos_certificate, Conjecture, ScanConfig,
};
use ehrhart_tensor::rational::Rational;
use ehrhart_tensor::triangulation::{
    ehrhart_matrix_pick, ehrhart_vector_pick, h1_pick, h2_pick, unimodular_triangulation,
};
use ehrhart_tensor::{Error, Polytope};
use serde_json::{json, Value};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_COMPUTATION: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(name = "ehrhart", version, about = "Exact Ehrhart tensor computations for lattice polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Print JSON (default).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,

    /// Print an aligned text rendering instead of JSON.
    #[arg(long, global = true)]
    table: bool,

    /// Write the output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Directory receiving `<subcommand>.json` when `--out` is not given.
    #[arg(long = "out-dir", global = true, env = "EHRHART_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete moment tensor L^r(nP).
    Moments {
        input: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        n: u64,
    },
    /// Ehrhart tensor polynomial by interpolation.
    Ehrhart {
        input: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// h^r-tensor vector.
    Hvec {
        input: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// Pick-type formulas from a unimodular triangulation of a polygon.
    Pick {
        input: String,
        /// Include the triangulation in the output.
        #[arg(long)]
        triangulate: bool,
    },
    /// h^r-tensor vector of a half-open simplex `{"vertices": ..., "removed": [1-based]}`.
    Halfopen {
        input: String,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Definiteness of the h^2 and Ehrhart matrix coefficients.
    Psd { input: String },
    /// Reflexivity and palindromicity of the h^r-vector.
    Reflexive {
        input: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// Randomised positivity scan.
    Scan {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coordinate bound of the random generating points.
        #[arg(long)]
        bound: Option<i64>,
        /// Number of random generating points per trial.
        #[arg(long)]
        gens: Option<usize>,
        #[arg(long, value_enum, default_value_t = Which::Psd)]
        conjecture: Which,
        /// Exit with status 1 when a violation in the main index range is found.
        #[arg(long)]
        fail_on_violation: bool,
    },
    /// Cross-check battery on one polytope.
    Verify { input: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Psd,
    Hibi,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::Degenerate { .. } => (EXIT_DEGENERATE, "degenerate"),
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } => (EXIT_BAD_INPUT, "invalid_input"),
            Error::UnsupportedRank { .. } | Error::OddRank(_) => (EXIT_BAD_INPUT, "unsupported"),
            Error::OriginNotInterior => (EXIT_BAD_INPUT, "origin_not_interior"),
            _ => (EXIT_COMPUTATION, "computation"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

fn bad_input(message: String) -> Failure {
    Failure { code: EXIT_BAD_INPUT, kind: "invalid_input", message }
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn read_json(input: &str) -> Result<Value, Failure> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        std::fs::read_to_string(input).map_err(|e| Failure {
            code: EXIT_IO,
            kind: "io",
            message: format!("{input}: {e}"),
        })?
    };
    serde_json::from_str(&text).map_err(|e| bad_input(format!("malformed JSON: {e}")))
}

fn read_polytope(input: &str) -> Result<Polytope, Failure> {
    let v = read_json(input)?;
    let pj = serde_json::from_value(v).map_err(|e| bad_input(format!("not a polytope: {e}")))?;
    Ok(Polytope::from_json(&pj)?)
}

fn check_rank(r: usize) -> Result<(), Failure> {
    if r > 2 {
        return Err(Error::UnsupportedRank { rank: r, max: 2 }.into());
    }
    Ok(())
}

fn polytope_json(p: &Polytope) -> Value {
    json!({
        "dim": p.dim(),
        "vertices": p.to_json().vertices,
        "facets": p.facets(),
    })
}

fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|q| Value::String(q.to_string())).collect())
}

fn run(command: Command) -> Result<(Value, u8), Failure> {
    let value = match command {
        Command::Moments { input, r, n } => {
            check_rank(r)?;
            let p = read_polytope(&input)?;
            json!({
                "polytope": polytope_json(&p),
                "r": r,
                "n": n,
                "moment": tensor_to_json(&discrete_moment(&p, r, n)),
            })
        }
        Command::Ehrhart { input, r } => {
            check_rank(r)?;
            polynomial_to_json(&ehrhart_tensor_polynomial(&read_polytope(&input)?, r))
        }
        Command::Hvec { input, r } => {
            let p = read_polytope(&input)?;
            if r > 2 {
                eprintln!("warning: r = {r}; closed-form moment formulas are only available for r <= 2, values come from interpolation");
            }
            hvector_to_json(&to_hr_vector(&p, r))
        }
        Command::Pick { input, triangulate } => {
            let p = read_polytope(&input)?;
            let t = unimodular_triangulation(&p)?;
            let vector = ehrhart_vector_pick(&t);
            let matrix = ehrhart_matrix_pick(&t);
            let h1 = h1_pick(&t);
            let h2 = h2_pick(&t);
            let agrees = vector == ehrhart_tensor_polynomial(&p, 1)
                && matrix == ehrhart_tensor_polynomial(&p, 2)
                && h1 == to_hr_vector(&p, 1)
                && h2 == to_hr_vector(&p, 2);
            let mut out = json!({
                "h1": hvector_to_json(&h1)["h"],
                "h2": hvector_to_json(&h2)["h"],
                "ehrhart_vector": polynomial_to_json(&vector)["coeffs"],
                "ehrhart_matrix": polynomial_to_json(&matrix)["coeffs"],
                "agrees_with_interpolation": agrees,
            });
            if triangulate {
                out["triangulation"] = serde_json::to_value(t.to_json()).expect("serialisable");
            }
            out
        }
        Command::Halfopen { input, r } => {
            check_rank(r)?;
            let sj: HalfOpenSimplexJson = serde_json::from_value(read_json(&input)?)
                .map_err(|e| bad_input(format!("not a half-open simplex: {e}")))?;
            let s = HalfOpenSimplex::from_json(&sj)?;
            hvector_to_json(&hr_halfopen(&s, r)?)
        }
        Command::Psd { input } => {
            let p = read_polytope(&input)?;
            let h2 = to_hr_vector(&p, 2);
            let h2_reports: Vec<Value> = check_h2_psd(&p)
                .into_iter()
                .zip(&h2.entries)
                .enumerate()
                .map(|(i, (rep, m))| {
                    let mut v = json!({"index": i, "matrix": tensor_to_json(m)});
                    v["report"] = serde_json::to_value(&rep).expect("serialisable");
                    if let Ok(cert) = sos_certificate(m) {
                        v["sos"] = Value::Array(
                            cert.terms
                                .iter()
                                .map(|t| json!({"lambda": t.lambda.to_string(), "u": rationals(&t.u)}))
                                .collect(),
                        );
                    }
                    v
                })
                .collect();
            let ehrhart: Vec<Value> = check_ehrhart_psd(&p)
                .into_iter()
                .enumerate()
                .map(|(k, rep)| json!({"degree": k + 1, "report": rep}))
                .collect();
            let all_psd = check_h2_psd(&p).iter().all(|r| r.classification.is_psd());
            json!({"h2": h2_reports, "ehrhart_matrix": ehrhart, "h2_all_psd": all_psd})
        }
        Command::Reflexive { input, r } => {
            let p = read_polytope(&input)?;
            let rep = reflexivity_report(&p, r)?;
            json!({
                "r": r,
                "reflexive": rep.reflexive,
                "palindromic": rep.palindromic,
                "consistent": rep.consistent(),
            })
        }
        Command::Scan { dim, trials, seed, bound, gens, conjecture, fail_on_violation } => {
            let which = match conjecture {
                Which::Psd => Conjecture::Psd,
                Which::Hibi => Conjecture::Hibi,
            };
            let mut cfg = ScanConfig::new(dim, trials, seed, which);
            if let Some(b) = bound {
                cfg.coord_bound = b;
            }
            if let Some(g) = gens {
                cfg.num_gens = g;
            }
            let start = Instant::now();
            let report = conjecture_scan(&cfg)?;
            eprintln!("scan finished in {:.2} s", start.elapsed().as_secs_f64());
            let code = if fail_on_violation && report.main_violations > 0 { EXIT_CHECK_FAILED } else { 0 };
            return Ok((serde_json::to_value(&report).expect("serialisable"), code));
        }
        Command::Verify { input } => {
            let p = read_polytope(&input)?;
            let checks = verify(&p)?;
            let ok = checks.iter().all(|(_, pass)| *pass);
            let list: Vec<Value> = checks.into_iter().map(|(name, pass)| json!({"check": name, "pass": pass})).collect();
            return Ok((json!({"checks": list, "all_pass": ok}), if ok { 0 } else { EXIT_CHECK_FAILED }));
        }
    };
    Ok((value, 0))
}

fn verify(p: &Polytope) -> Result<Vec<(String, bool)>, Failure> {
    let d = p.dim();
    let mut checks = Vec::new();
    for r in 0..=2 {
        let ok = (1..=3).all(|n| reciprocity_check(p, r, n));
        checks.push((format!("reciprocity r={r}"), ok));
    }
    for r in 0..=2 {
        let l = ehrhart_tensor_polynomial(p, r);
        checks.push((format!("leading coefficient r={r}"), l.coeffs[d + r] == moment_tensor(p, r)?));
        if d == 2 {
            let second = second_coefficient_facets(p, r)?;
            checks.push((format!("second coefficient r={r}"), l.coeffs[d + r - 1] == second));
        }
    }
    if d == 2 {
        let t = unimodular_triangulation(p)?;
        checks.push(("pick h1".into(), h1_pick(&t) == to_hr_vector(p, 1)));
        checks.push(("pick h2".into(), h2_pick(&t) == to_hr_vector(p, 2)));
        checks.push(("pick vector polynomial".into(), ehrhart_vector_pick(&t) == ehrhart_tensor_polynomial(p, 1)));
        checks.push(("pick matrix polynomial".into(), ehrhart_matrix_pick(&t) == ehrhart_tensor_polynomial(p, 2)));
    }
    checks.push(("h2 psd".into(), check_h2_psd(p).iter().all(|r| r.classification.is_psd())));
    Ok(checks)
}

/// Renders a JSON value as indented text. Arrays of equal-length string
/// arrays (matrices) become aligned grids.
fn render_table(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if is_scalar(val) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(val)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_table(val, indent + 2, out);
                }
            }
        }
        Value::Array(items) if is_matrix(items) => {
            let cells: Vec<Vec<String>> =
                items.iter().map(|row| row.as_array().unwrap().iter().map(scalar).collect()).collect();
            let cols = cells.first().map_or(0, |r| r.len());
            let widths: Vec<usize> =
                (0..cols).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
            for row in cells {
                let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
                out.push_str(&format!("{pad}[ {} ]\n", line.join("  ")));
            }
        }
        Value::Array(items) if is_record_list(items) => {
            let keys: Vec<&String> = items[0].as_object().unwrap().keys().collect();
            let rows: Vec<Vec<String>> = items
                .iter()
                .map(|it| keys.iter().map(|k| scalar(&it[k.as_str()])).collect())
                .collect();
            let widths: Vec<usize> = keys
                .iter()
                .enumerate()
                .map(|(c, k)| rows.iter().map(|r| r[c].len()).chain([k.len()]).max().unwrap())
                .collect();
            let line = |cells: Vec<String>| {
                let parts: Vec<String> = cells.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                format!("{pad}{}\n", parts.join("  ").trim_end())
            };
            out.push_str(&line(keys.iter().map(|k| k.to_string()).collect()));
            for row in rows {
                out.push_str(&line(row));
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{pad}({})\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if is_scalar(item) {
                    out.push_str(&format!("{pad}[{i}] {}\n", scalar(item)));
                } else {
                    out.push_str(&format!("{pad}[{i}]\n"));
                    render_table(item, indent + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn is_matrix(items: &[Value]) -> bool {
    let Some(first) = items.first().and_then(Value::as_array) else {
        return false;
    };
    items.iter().all(|row| {
        row.as_array().is_some_and(|r| r.len() == first.len() && r.iter().all(Value::is_string))
    })
}

/// Nonempty array of flat objects sharing one key set.
fn is_record_list(items: &[Value]) -> bool {
    let Some(first) = items.first().and_then(Value::as_object) else {
        return false;
    };
    items.iter().all(|it| {
        it.as_object().is_some_and(|o| o.len() == first.len() && o.iter().all(|(k, v)| first.contains_key(k) && is_scalar(v)))
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Moments { .. } => "moments",
        Command::Ehrhart { .. } => "ehrhart",
        Command::Hvec { .. } => "hvec",
        Command::Pick { .. } => "pick",
        Command::Halfopen { .. } => "halfopen",
        Command::Psd { .. } => "psd",
        Command::Reflexive { .. } => "reflexive",
        Command::Scan { .. } => "scan",
        Command::Verify { .. } => "verify",
    }
}

fn emit(text: &str, target: Option<PathBuf>) -> Result<(), Failure> {
    match target {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure {
            code: EXIT_IO,
            kind: "io",
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = subcommand_name(&cli.command);
    let target = cli.output.out.clone().or_else(|| cli.output.out_dir.as_ref().map(|d| d.join(format!("{name}.json"))));
    let result = run(cli.command).and_then(|(value, code)| {
        let text = if cli.output.table {
            let mut s = String::new();
            render_table(&value, 0, &mut s);
            s
        } else {
            format!("{}\n", serde_json::to_string_pretty(&value).expect("serialisable"))
        };
        emit(&text, target)?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            println!("{}", json!({"error": {"kind": f.kind, "message": f.message}}));
            ExitCode::from(f.code)
        }
    }
}
