//! The `nsqueeze` command line.
//!
//! Every command prints a single document. JSON is the default; it carries a
//! top-level `schema_version`. Floats are written in shortest round-trip form,
//! so identical flags always produce identical bytes.

mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::circulant::{symmetric_gram, DenseRealMatrix};
use crate::error::Error;
use crate::fock::{self, DEFAULT_LEAKAGE_THRESHOLD};
use crate::squeeze::{
    entry_sum_power_identity, gram_entry_sum, heisenberg_transform, normal_ordered_form,
    quadrature_variances, squeezed_vacuum, SqueezeParams, MAX_IDENTITY_POWER,
};
use crate::wigner::{slice_grid, wigner_state, Coordinate, SliceSpec};

pub use verify::{run_checks, Check, VerifyOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "nsqueeze", version, about = "Cyclic n-mode squeezing operator numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transform matrices and the normal-ordered coefficients
    Matrices(ModelArgs),
    /// Quadrature variances next to the e^{∓2λ}/4 law
    Variances(ModelArgs),
    /// Squeezed vacuum prefactor and two-photon matrix
    State(StateArgs),
    /// Two-dimensional Wigner function slice
    Wigner(WignerArgs),
    /// Entry sums of powers of A + Aᵀ
    Identities(IdentityArgs),
    /// Run all consistency checks and report residuals
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of modes (>= 2)
    #[arg(long)]
    pub n: usize,
    /// Squeezing parameter
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also compute the truncated Fock-space state
    #[arg(long)]
    pub oracle: bool,
    /// Photons per mode for the oracle (default from the truncation policy)
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// The two varying coordinates, e.g. `q1,q2` or `q1,p1`
    #[arg(long, default_value = "q1,q2")]
    pub axes: String,
    /// Range of the first axis as `lo,hi`
    #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
    pub range_a: String,
    /// Range of the second axis as `lo,hi`
    #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
    pub range_b: String,
    /// Grid steps as `steps_a,steps_b` or a single count for both
    #[arg(long, default_value = "41")]
    pub steps: String,
    /// Values of other coordinates, e.g. `p1=0.5,q3=-1`; the rest are zero
    #[arg(long, allow_hyphen_values = true)]
    pub fixed: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct IdentityArgs {
    /// Number of modes (>= 2)
    #[arg(long)]
    pub n: usize,
    /// Largest power l
    #[arg(long, default_value_t = MAX_IDENTITY_POWER)]
    pub l_max: u32,
    /// Also report the gram-matrix entry sums at this λ
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Number of modes (>= 2)
    #[arg(long)]
    pub n: usize,
    /// Squeezing parameter
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Include the truncated Fock-space oracle checks
    #[arg(long)]
    pub oracle: bool,
    /// Photons per mode for the oracle
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Override the tolerance of every oracle check
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

/// A rendered document plus the overall verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
    pub output: Option<PathBuf>,
}

fn matrix_rows(m: &DenseRealMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

fn params(n: usize, lambda: f64) -> Result<SqueezeParams, CliError> {
    Ok(SqueezeParams::new(n, lambda)?)
}

fn csv_matrix_block(out: &mut String, name: &str, m: &DenseRealMatrix) {
    let _ = writeln!(out, "# {name}");
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
}

pub fn cmd_matrices(args: &ModelArgs) -> Result<Outcome, CliError> {
    let p = params(args.n, args.lambda)?;
    let transform = heisenberg_transform(&p)?;
    let gram = symmetric_gram(p.n(), p.lambda())?;
    let gram_inverse = symmetric_gram(p.n(), -p.lambda())?;
    let form = normal_ordered_form(&p)?;

    let blocks: [(&str, &DenseRealMatrix); 9] = [
        ("lambda_matrix", &transform.q_matrix),
        ("exp_lambda_a", &transform.p_matrix),
        ("gram", &gram),
        ("gram_inverse", &gram_inverse),
        ("n_matrix", &form.n_matrix),
        ("n_inverse", &form.n_inverse),
        ("f", &form.f),
        ("e", &form.e),
        ("d", &form.d),
    ];
    let text = match args.out.format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
            doc.insert("command".into(), json!("matrices"));
            doc.insert("n".into(), json!(p.n()));
            doc.insert("lambda".into(), json!(p.lambda()));
            doc.insert("prefactor".into(), json!(form.prefactor));
            doc.insert("det_n".into(), json!(form.det_n));
            for (name, m) in blocks {
                doc.insert(name.into(), json!(matrix_rows(m)));
            }
            render_json(&Value::Object(doc))
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# schema_version={SCHEMA_VERSION} command=matrices n={} lambda={}", p.n(), p.lambda());
            let _ = writeln!(out, "name,value");
            let _ = writeln!(out, "prefactor,{}", form.prefactor);
            let _ = writeln!(out, "det_n,{}", form.det_n);
            for (name, m) in blocks {
                csv_matrix_block(&mut out, name, m);
            }
            out
        }
    };
    Ok(Outcome {
        text,
        success: true,
        output: args.out.output.clone(),
    })
}

pub fn cmd_variances(args: &ModelArgs) -> Result<Outcome, CliError> {
    let p = params(args.n, args.lambda)?;
    let v = quadrature_variances(&p)?;
    let ref_x1 = (-2.0 * p.lambda()).exp() / 4.0;
    let ref_x2 = (2.0 * p.lambda()).exp() / 4.0;
    let fields = [
        ("var_x1", v.var_x1),
        ("var_x2", v.var_x2),
        ("product", v.product()),
        ("reference_var_x1", ref_x1),
        ("reference_var_x2", ref_x2),
        ("reference_product", 1.0 / 16.0),
    ];
    let text = match args.out.format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
            doc.insert("command".into(), json!("variances"));
            doc.insert("n".into(), json!(p.n()));
            doc.insert("lambda".into(), json!(p.lambda()));
            for (k, x) in fields {
                doc.insert(k.into(), json!(x));
            }
            render_json(&Value::Object(doc))
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# schema_version={SCHEMA_VERSION} command=variances n={} lambda={}", p.n(), p.lambda());
            let _ = writeln!(out, "name,value");
            for (k, x) in fields {
                let _ = writeln!(out, "{k},{x}");
            }
            out
        }
    };
    Ok(Outcome {
        text,
        success: true,
        output: args.out.output.clone(),
    })
}

pub fn cmd_state(args: &StateArgs) -> Result<Outcome, CliError> {
    let m = &args.model;
    if m.out.format == Format::Csv {
        return Err(CliError::Usage("state supports --format json only".into()));
    }
    let p = params(m.n, m.lambda)?;
    let vacuum = squeezed_vacuum(&p)?;
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!("state"));
    doc.insert("n".into(), json!(p.n()));
    doc.insert("lambda".into(), json!(p.lambda()));
    doc.insert("prefactor".into(), json!(vacuum.prefactor));
    doc.insert("f".into(), json!(matrix_rows(&vacuum.f)));
    if args.oracle {
        let cutoff = args.cutoff.unwrap_or_else(|| fock::default_cutoff(p.lambda()));
        let generator = fock::build_generator(&p, cutoff)?;
        let psi = fock::apply_squeeze(&generator)?;
        let pairs = fock::extract_pair_amplitudes(&psi);
        let ratio = pairs.normalized();
        let re = DMatrix::from_fn(p.n(), p.n(), |i, j| ratio[(i, j)].re);
        let im = DMatrix::from_fn(p.n(), p.n(), |i, j| ratio[(i, j)].im);
        doc.insert(
            "oracle".into(),
            json!({
                "cutoff": cutoff,
                "dim": generator.basis().dim(),
                "vacuum_amplitude": [pairs.vac.re, pairs.vac.im],
                "pairs_over_vacuum_re": matrix_rows(&re),
                "pairs_over_vacuum_im": matrix_rows(&im),
                "leakage": psi.leakage(),
            }),
        );
    } else if args.cutoff.is_some() {
        return Err(CliError::Usage("--cutoff requires --oracle".into()));
    }
    Ok(Outcome {
        text: render_json(&Value::Object(doc)),
        success: true,
        output: m.out.output.clone(),
    })
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T), CliError> {
    let bad = || CliError::Usage(format!("{what} must be two comma-separated values, got {s:?}"));
    let mut it = s.split(',');
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(bad());
    };
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn slice_spec(args: &WignerArgs) -> Result<SliceSpec, CliError> {
    let (axis_a, axis_b): (String, String) = parse_pair(&args.axes, "--axes")?;
    let axis_a: Coordinate = axis_a.parse()?;
    let axis_b: Coordinate = axis_b.parse()?;
    let range_a = parse_pair(&args.range_a, "--range-a")?;
    let range_b = parse_pair(&args.range_b, "--range-b")?;
    let (steps_a, steps_b) = if args.steps.contains(',') {
        parse_pair(&args.steps, "--steps")?
    } else {
        let s: usize = args
            .steps
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--steps must be an integer, got {:?}", args.steps)))?;
        (s, s)
    };
    let mut fixed = Vec::new();
    if let Some(list) = &args.fixed {
        for item in list.split(',').filter(|s| !s.trim().is_empty()) {
            let (c, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--fixed entry {item:?} is not coord=value")))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--fixed value {v:?} is not a number")))?;
            fixed.push((c.parse::<Coordinate>()?, value));
        }
    }
    Ok(SliceSpec {
        axis_a,
        axis_b,
        range_a,
        range_b,
        steps_a,
        steps_b,
        fixed,
    })
}

#[derive(Serialize)]
struct WignerDoc<'a> {
    schema_version: u32,
    command: &'static str,
    n: usize,
    lambda: f64,
    #[serde(flatten)]
    slice: &'a crate::wigner::GridSlice,
}

pub fn cmd_wigner(args: &WignerArgs) -> Result<Outcome, CliError> {
    let m = &args.model;
    let p = params(m.n, m.lambda)?;
    let spec = slice_spec(args)?;
    let state = wigner_state(&p)?;
    let slice = slice_grid(&state, &spec)?;
    let text = match m.out.format {
        Format::Json => {
            let doc = WignerDoc {
                schema_version: SCHEMA_VERSION,
                command: "wigner",
                n: p.n(),
                lambda: p.lambda(),
                slice: &slice,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("grid serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let fixed: Vec<String> = slice
                .fixed_values
                .iter()
                .map(|(c, v)| format!("{c}={v}"))
                .collect();
            let mut out = format!(
                "# schema_version={SCHEMA_VERSION} command=wigner n={} lambda={} axis_a={} axis_b={} fixed={}\n",
                p.n(),
                p.lambda(),
                slice.axis_a,
                slice.axis_b,
                fixed.join(";")
            );
            let mut buf = Vec::new();
            slice.write_csv(&mut buf).expect("writing to memory");
            out.push_str(&String::from_utf8(buf).expect("ASCII output"));
            out
        }
    };
    Ok(Outcome {
        text,
        success: true,
        output: m.out.output.clone(),
    })
}

pub fn cmd_identities(args: &IdentityArgs) -> Result<Outcome, CliError> {
    let rows = (0..=args.l_max)
        .map(|l| entry_sum_power_identity(args.n, l))
        .collect::<Result<Vec<_>, _>>()?;
    let all_hold = rows.iter().all(|r| r.holds());
    let sums = match args.lambda {
        Some(lambda) => {
            let p = params(args.n, lambda)?;
            let (sum, inverse_sum) = gram_entry_sum(&p)?;
            Some((lambda, sum, inverse_sum))
        }
        None => None,
    };
    let text = match args.out.format {
        Format::Json => {
            let mut doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "identities",
                "n": args.n,
                "l_max": args.l_max,
                "power_sums": rows.iter().map(|r| json!({
                    "l": r.l, "lhs": r.lhs, "rhs": r.rhs, "equal": r.holds(),
                })).collect::<Vec<_>>(),
                "all_equal": all_hold,
            });
            if let Some((lambda, sum, inverse_sum)) = sums {
                doc["gram_entry_sums"] = json!({
                    "lambda": lambda,
                    "sum": sum,
                    "reference_sum": args.n as f64 * (-2.0 * lambda).exp(),
                    "inverse_sum": inverse_sum,
                    "reference_inverse_sum": args.n as f64 * (2.0 * lambda).exp(),
                });
            }
            render_json(&doc)
        }
        Format::Csv => {
            let mut out = format!("# schema_version={SCHEMA_VERSION} command=identities n={}\n", args.n);
            out.push_str("l,lhs,rhs,equal\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{},{}", r.l, r.lhs, r.rhs, r.holds());
            }
            if let Some((lambda, sum, inverse_sum)) = sums {
                let _ = writeln!(out, "# gram_entry_sums lambda={lambda} sum={sum} inverse_sum={inverse_sum}");
            }
            out
        }
    };
    Ok(Outcome {
        text,
        success: all_hold,
        output: args.out.output.clone(),
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let p = params(args.n, args.lambda)?;
    if let Some(tol) = args.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::BadTolerance(tol).into());
        }
    }
    if args.cutoff.is_some() && !args.oracle {
        return Err(CliError::Usage("--cutoff requires --oracle".into()));
    }
    let options = VerifyOptions {
        oracle: args.oracle,
        cutoff: args.cutoff,
        oracle_tol: args.tol,
        leakage_threshold: DEFAULT_LEAKAGE_THRESHOLD,
    };
    let checks = run_checks(&p, &options)?;
    let passed = checks.iter().all(|c| c.passed);
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "n": p.n(),
        "lambda": p.lambda(),
        "oracle": args.oracle,
        "passed": passed,
        "checks": checks,
    });
    Ok(Outcome {
        text: render_json(&doc),
        success: passed,
        output: args.output.clone(),
    })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Matrices(a) => cmd_matrices(a),
        Command::Variances(a) => cmd_variances(a),
        Command::State(a) => cmd_state(a),
        Command::Wigner(a) => cmd_wigner(a),
        Command::Identities(a) => cmd_identities(a),
        Command::Verify(a) => cmd_verify(a),
    }
}
