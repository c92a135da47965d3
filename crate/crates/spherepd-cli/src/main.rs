//! Command line front end: evaluation, Schoenberg analysis, the montee /
//! descente / turning-bands operators, positive definiteness checks,
//! smoothness probes, and the named verification suites.
//!
//! Output is JSON by default (CSV via --format csv), written to stdout or
//! --out. Exit codes: 0 success, 2 operator admissibility rejection,
//! 1 usage or input error.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use spherepd::model::{self, IsotropicFunction};
use spherepd::operators;
use spherepd::schoenberg::{self, Dimension, SchoenbergSequence};
use spherepd::validation;
use spherepd::verify;
use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const SEED_ENV: &str = "SPHEREPD_SEED";

#[derive(Parser)]
#[command(
    name = "spherepd",
    version,
    about = "Isotropic positive definite functions on spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// Family name: multiquadric | wendland-c2 | wendland-c4 | gc-yadrenko |
    /// gc-restricted | truncated-linear | custom-cos | raised-cosine |
    /// constant-one
    #[arg(long)]
    family: Option<String>,

    /// Multiquadric / Wendland shape parameter
    #[arg(long)]
    tau: Option<f64>,

    /// Multiquadric delta in (0, 1)
    #[arg(long)]
    delta: Option<f64>,

    /// Support cutoff for compactly supported families
    #[arg(long)]
    c: Option<f64>,

    /// Support of the Yadrenko-lifted Gaspari-Cohn member, in (0, pi]
    #[arg(long)]
    c0: Option<f64>,

    /// CSV file (header `theta,value`) sampled on [0, pi], interpolated cubically
    #[arg(long)]
    curve: Option<String>,

    /// Explicit coefficients b_0,b_1,... (used with --dim)
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<f64>>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format
    #[arg(long, default_value = "json")]
    format: String,

    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a function (or synthesized sequence) on a theta grid
    Eval {
        #[command(flatten)]
        function: FunctionArgs,
        /// Dimension tag for --coeffs input (integer or "inf")
        #[arg(long)]
        dim: Option<String>,
        /// Number of grid points on [0, pi]
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Analyze a function into its d-Schoenberg coefficients
    Sequence {
        #[command(flatten)]
        function: FunctionArgs,
        /// Dimension (integer >= 1, or "inf" for family-specific expansions)
        #[arg(long)]
        dim: String,
        /// Number of coefficients
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Apply the montee; with --dim the sequence-level admissibility applies
    Montee {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        dim: Option<String>,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Apply the descente; with --dim the sequence-level formulas apply
    Descente {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        dim: Option<String>,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate both turning-bands identities on a coefficient sequence
    TurningBands {
        /// Coefficients beta_0,beta_1,...
        #[arg(long, value_delimiter = ',', required = true)]
        coeffs: Vec<f64>,
        /// Base dimension d >= 1
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convert a d- or infinity-sequence to its 1-Schoenberg sequence
    ToOneDim {
        #[command(flatten)]
        function: FunctionArgs,
        /// Dimension of the input sequence (>= 2 or "inf"); not needed with --seq-file
        #[arg(long)]
        dim: Option<String>,
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// JSON file holding {dimension, coefficients, tail_mass}
        #[arg(long)]
        seq_file: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gram-matrix positive definiteness check on sampled sphere points
    CheckPd {
        #[command(flatten)]
        function: FunctionArgs,
        /// Sphere dimension d
        #[arg(long)]
        dim: u32,
        /// Number of sample points
        #[arg(long, default_value_t = 60)]
        n: usize,
        /// Seed (default from SPHEREPD_SEED, else 1)
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One-sided differentiability probe at an interior point
    ProbeSmoothness {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        theta0: f64,
        #[arg(long, default_value_t = 5)]
        max_order: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a named verification suite (or "all")
    Verify {
        /// lemma2.1 | prop3.3 | prop3.4 | prop3.5 | lemma3.2 | eq10-11 |
        /// prop5.1 | lemma5.2 | lemma5.4 | conjecture | optimality | all
        suite: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

// ---------------------------------------------------------------------------
// deterministic output: floats at 17 significant digits
// ---------------------------------------------------------------------------

fn write_float(out: &mut String, x: f64) {
    if x == x.trunc() && x.abs() < 1e15 {
        // keep integral values compact but still exact
        out.push_str(&format!("{:.1}", x));
    } else {
        out.push_str(&format!("{:.16e}", x));
    }
}

fn write_json(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                write_float(out, n.as_f64().unwrap_or(f64::NAN));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_json(out, item);
            }
            out.push('}');
        }
    }
}

struct Emitter {
    format: String,
    out: Option<String>,
}

impl Emitter {
    fn new(args: &OutputArgs) -> Result<Self, String> {
        match args.format.as_str() {
            "json" | "csv" => Ok(Self {
                format: args.format.clone(),
                out: args.out.clone(),
            }),
            other => Err(format!("unknown format {other:?}; use json or csv")),
        }
    }

    fn emit(
        &self,
        command: &str,
        params: Value,
        result: Value,
        diagnostics: Value,
        csv: Option<String>,
    ) -> Result<(), String> {
        let text = if self.format == "csv" {
            csv.ok_or_else(|| format!("{command} has no CSV form; use --format json"))?
        } else {
            let envelope = json!({
                "command": command,
                "params": params,
                "result": result,
                "diagnostics": diagnostics,
                "version": VERSION,
            });
            let mut s = String::new();
            write_json(&mut s, &envelope);
            s.push('\n');
            s
        };
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| format!("writing {path}: {e}")),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| format!("stdout: {e}")),
        }
    }
}

fn csv_float(x: f64) -> String {
    format!("{:.16e}", x)
}

// ---------------------------------------------------------------------------
// input resolution
// ---------------------------------------------------------------------------

fn parse_dim(text: &str) -> Result<Dimension, String> {
    if text == "inf" {
        return Ok(Dimension::Infinite);
    }
    let d: u32 = text
        .parse()
        .map_err(|_| format!("dimension must be a positive integer or \"inf\", got {text:?}"))?;
    if d < 1 {
        return Err("dimension must be >= 1".to_string());
    }
    Ok(Dimension::Finite(d))
}

fn require(opt: Option<f64>, flag: &str, family: &str) -> Result<f64, String> {
    opt.ok_or_else(|| format!("family {family} requires --{flag}"))
}

fn build_family(args: &FunctionArgs) -> Result<Option<IsotropicFunction>, String> {
    let Some(name) = args.family.as_deref() else {
        return Ok(None);
    };
    let f = match name {
        "multiquadric" => model::multiquadric(
            require(args.tau, "tau", name)?,
            require(args.delta, "delta", name)?,
        ),
        "wendland-c2" => model::wendland(
            model::WendlandKind::C2,
            require(args.tau, "tau", name)?,
            require(args.c, "c", name)?,
        ),
        "wendland-c4" => model::wendland(
            model::WendlandKind::C4,
            require(args.tau, "tau", name)?,
            require(args.c, "c", name)?,
        ),
        "gc-yadrenko" => {
            let c0 = require(args.c0, "c0", name)?;
            if !(c0 > 0.0 && c0 <= PI) {
                return Err(format!("gc-yadrenko requires c0 in (0, pi], got {c0}"));
            }
            model::gaspari_cohn(2.0 * (c0 / 2.0).sin()).map(|phi| model::yadrenko_lift(&phi))
        }
        "gc-restricted" => {
            let c = require(args.c, "c", name)?;
            model::gaspari_cohn(c).and_then(|phi| model::restrict_to_sphere(&phi))
        }
        "truncated-linear" => model::truncated_linear(require(args.c, "c", name)?),
        "custom-cos" => Ok(model::cosine()),
        "raised-cosine" => Ok(model::raised_cosine()),
        "constant-one" => Ok(model::constant_one()),
        other => return Err(format!("unknown family {other:?}")),
    };
    f.map(Some).map_err(|e| e.to_string())
}

fn load_curve(path: &str) -> Result<IsotropicFunction, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
    let mut thetas = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if i == 0 {
            let header = line.to_ascii_lowercase();
            if header != "theta,value" {
                return Err(format!("curve header must be `theta,value`, got {line:?}"));
            }
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| format!("line {} is not `theta,value`", i + 1))?;
        thetas.push(
            a.trim()
                .parse::<f64>()
                .map_err(|e| format!("line {}: {e}", i + 1))?,
        );
        values.push(
            b.trim()
                .parse::<f64>()
                .map_err(|e| format!("line {}: {e}", i + 1))?,
        );
    }
    model::from_samples(&thetas, &values).map_err(|e| e.to_string())
}

/// A function input: named family, sampled curve, or synthesized sequence.
fn resolve_function(args: &FunctionArgs, dim: Option<&str>) -> Result<IsotropicFunction, String> {
    if let Some(f) = build_family(args)? {
        return Ok(f);
    }
    if let Some(path) = args.curve.as_deref() {
        return load_curve(path);
    }
    if let Some(coeffs) = args.coeffs.clone() {
        let dim = parse_dim(dim.ok_or("--coeffs input requires --dim")?)?;
        return Ok(SchoenbergSequence::new(dim, coeffs).to_function());
    }
    Err("no input: give --family, --curve, or --coeffs with --dim".to_string())
}

/// A sequence input for dimension-tagged operators: explicit coefficients,
/// a family analyzed in dimension d (or its infinity expansion), or a curve.
fn resolve_sequence(
    args: &FunctionArgs,
    dim: Dimension,
    n: usize,
) -> Result<SchoenbergSequence, String> {
    if let Some(coeffs) = args.coeffs.clone() {
        return Ok(SchoenbergSequence::new(dim, coeffs));
    }
    match dim {
        Dimension::Finite(d) => {
            let f = resolve_function(args, None)?;
            schoenberg::analyze(&f, d, n).map_err(|e| e.to_string())
        }
        Dimension::Infinite => match args.family.as_deref() {
            Some("multiquadric") => schoenberg::multiquadric_infinite_sequence(
                require(args.tau, "tau", "multiquadric")?,
                require(args.delta, "delta", "multiquadric")?,
                n,
            )
            .map_err(|e| e.to_string()),
            Some("constant-one") => Ok(SchoenbergSequence::new(Dimension::Infinite, vec![1.0])),
            Some("raised-cosine") => {
                Ok(SchoenbergSequence::new(Dimension::Infinite, vec![0.5, 0.5]))
            }
            Some("custom-cos") => Ok(SchoenbergSequence::new(Dimension::Infinite, vec![0.0, 1.0])),
            _ => Err(
                "infinity-dimension sequences exist only for families with a known \
                 expansion (multiquadric, constant-one, raised-cosine, custom-cos) \
                 or explicit --coeffs"
                    .to_string(),
            ),
        },
    }
}

fn params_json(args: &FunctionArgs) -> Value {
    let mut m = Map::new();
    if let Some(f) = &args.family {
        m.insert("family".into(), json!(f));
    }
    if let Some(v) = args.tau {
        m.insert("tau".into(), json!(v));
    }
    if let Some(v) = args.delta {
        m.insert("delta".into(), json!(v));
    }
    if let Some(v) = args.c {
        m.insert("c".into(), json!(v));
    }
    if let Some(v) = args.c0 {
        m.insert("c0".into(), json!(v));
    }
    if let Some(v) = &args.curve {
        m.insert("curve".into(), json!(v));
    }
    if let Some(v) = &args.coeffs {
        m.insert("coeffs".into(), json!(v));
    }
    Value::Object(m)
}

fn grid_points(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()
}

fn curve_csv(header: &[&str], columns: &[&[f64]]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    let rows = columns.first().map(|c| c.len()).unwrap_or(0);
    for r in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| csv_float(c[r])).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn default_seed(cli: Option<u64>) -> u64 {
    cli.or_else(|| std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok()))
        .unwrap_or(1)
}

// ---------------------------------------------------------------------------
// command bodies; Ok(code) carries the exit status
// ---------------------------------------------------------------------------

fn run() -> Result<u8, String> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes; anything else is usage error 1
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };

    match cli.command {
        Cmd::Eval {
            function,
            dim,
            grid,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            let f = resolve_function(&function, dim.as_deref())?;
            let thetas = grid_points(grid);
            let values: Vec<f64> = thetas.iter().map(|&t| f.value(t)).collect();
            let csv = curve_csv(&["theta", "value"], &[&thetas, &values]);
            emitter.emit(
                "eval",
                params_json(&function),
                json!({"theta": thetas, "value": values, "label": f.label()}),
                json!({}),
                Some(csv),
            )?;
            Ok(0)
        }

        Cmd::Sequence {
            function,
            dim,
            n,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            let dim = parse_dim(&dim)?;
            let seq = resolve_sequence(&function, dim, n)?;
            let report = validation::class_report(&seq);
            let csv = {
                let idx: Vec<f64> = (0..seq.len()).map(|i| i as f64).collect();
                curve_csv(&["n", "coefficient"], &[&idx, seq.coefficients()])
            };
            emitter.emit(
                "sequence",
                params_json(&function),
                serde_json::to_value(&seq).unwrap(),
                serde_json::to_value(&report).unwrap(),
                Some(csv),
            )?;
            Ok(0)
        }

        Cmd::Montee {
            function,
            dim,
            n,
            grid,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            match dim {
                Some(d) => {
                    let dim = parse_dim(&d)?;
                    let seq = resolve_sequence(&function, dim, n)?;
                    let report = operators::montee_sequence(&seq).map_err(|e| e.to_string())?;
                    if let Some(reason) = report.rejection_reason() {
                        emitter.emit(
                            "montee",
                            params_json(&function),
                            Value::Null,
                            json!({
                                "rejection": reason,
                                "values": report.diagnostics,
                            }),
                            Some(format!("rejected,{reason}\n")),
                        )?;
                        return Ok(2);
                    }
                    let out = report.result_sequence.as_ref().unwrap();
                    let thetas = grid_points(grid);
                    let values: Vec<f64> = thetas
                        .iter()
                        .map(|&t| schoenberg::synthesize(out, t))
                        .collect();
                    let csv = curve_csv(&["theta", "value"], &[&thetas, &values]);
                    emitter.emit(
                        "montee",
                        params_json(&function),
                        json!({
                            "sequence": serde_json::to_value(out).unwrap(),
                            "theta": thetas,
                            "value": values,
                        }),
                        json!(report.diagnostics),
                        Some(csv),
                    )?;
                    Ok(0)
                }
                None => {
                    let f = resolve_function(&function, None)?;
                    let report = operators::montee_numeric(&f).map_err(|e| e.to_string())?;
                    if let Some(reason) = report.rejection_reason() {
                        emitter.emit(
                            "montee",
                            params_json(&function),
                            Value::Null,
                            json!({"rejection": reason, "values": report.diagnostics}),
                            Some(format!("rejected,{reason}\n")),
                        )?;
                        return Ok(2);
                    }
                    let out = report.result_function.as_ref().unwrap();
                    let thetas = grid_points(grid);
                    let values: Vec<f64> = thetas.iter().map(|&t| out.value(t)).collect();
                    let csv = curve_csv(&["theta", "value"], &[&thetas, &values]);
                    emitter.emit(
                        "montee",
                        params_json(&function),
                        json!({"theta": thetas, "value": values, "label": out.label()}),
                        json!(report.diagnostics),
                        Some(csv),
                    )?;
                    Ok(0)
                }
            }
        }

        Cmd::Descente {
            function,
            dim,
            n,
            grid,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            match dim {
                Some(d) => {
                    let dim = parse_dim(&d)?;
                    let seq = resolve_sequence(&function, dim, n)?;
                    let report = operators::descente_sequence(&seq).map_err(|e| e.to_string())?;
                    if let Some(reason) = report.rejection_reason() {
                        emitter.emit(
                            "descente",
                            params_json(&function),
                            Value::Null,
                            json!({"rejection": reason, "values": report.diagnostics}),
                            Some(format!("rejected,{reason}\n")),
                        )?;
                        return Ok(2);
                    }
                    let out = report.result_sequence.as_ref().unwrap();
                    let thetas = grid_points(grid);
                    let values: Vec<f64> = thetas
                        .iter()
                        .map(|&t| schoenberg::synthesize(out, t))
                        .collect();
                    let csv = curve_csv(&["theta", "value"], &[&thetas, &values]);
                    emitter.emit(
                        "descente",
                        params_json(&function),
                        json!({
                            "sequence": serde_json::to_value(out).unwrap(),
                            "theta": thetas,
                            "value": values,
                        }),
                        json!(report.diagnostics),
                        Some(csv),
                    )?;
                    Ok(0)
                }
                None => {
                    let f = resolve_function(&function, None)?;
                    let report = operators::descente_numeric(&f).map_err(|e| e.to_string())?;
                    if let Some(reason) = report.rejection_reason() {
                        emitter.emit(
                            "descente",
                            params_json(&function),
                            Value::Null,
                            json!({"rejection": reason, "values": report.diagnostics}),
                            Some(format!("rejected,{reason}\n")),
                        )?;
                        return Ok(2);
                    }
                    let out = report.result_function.as_ref().unwrap();
                    let thetas = grid_points(grid);
                    let values: Vec<f64> = thetas.iter().map(|&t| out.value(t)).collect();
                    let csv = curve_csv(&["theta", "value"], &[&thetas, &values]);
                    emitter.emit(
                        "descente",
                        params_json(&function),
                        json!({"theta": thetas, "value": values, "label": out.label()}),
                        json!(report.diagnostics),
                        Some(csv),
                    )?;
                    Ok(0)
                }
            }
        }

        Cmd::TurningBands {
            coeffs,
            dim,
            grid,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            let seq = SchoenbergSequence::new(Dimension::Finite(dim), coeffs.clone());
            let thetas = grid_points(grid);
            let mut synth = Vec::with_capacity(thetas.len());
            let mut down = Vec::with_capacity(thetas.len());
            let mut up = Vec::with_capacity(thetas.len());
            let mut shifted_synth = Vec::with_capacity(thetas.len());
            let shifted = SchoenbergSequence::new(
                Dimension::Finite(dim + 2),
                operators::shift(&seq, -1).coefficients().to_vec(),
            );
            for &t in &thetas {
                synth.push(schoenberg::synthesize(&seq, t));
                down.push(operators::turning_bands_down(&seq, t).map_err(|e| e.to_string())?);
                up.push(operators::turning_bands_up(&seq, t).map_err(|e| e.to_string())?);
                shifted_synth.push(schoenberg::synthesize(&shifted, t));
            }
            let max_down: f64 = synth
                .iter()
                .zip(down.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let max_up: f64 = up
                .iter()
                .zip(shifted_synth.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let csv = curve_csv(
                &["theta", "psi_d", "identity_down", "lifted", "psi_d_plus_2"],
                &[&thetas, &synth, &down, &up, &shifted_synth],
            );
            emitter.emit(
                "turning-bands",
                json!({"coeffs": coeffs, "dim": dim}),
                json!({
                    "theta": thetas,
                    "psi_d": synth,
                    "identity_down": down,
                    "lifted": up,
                    "psi_d_plus_2": shifted_synth,
                }),
                json!({"max_down_residual": max_down, "max_up_residual": max_up}),
                Some(csv),
            )?;
            Ok(0)
        }

        Cmd::ToOneDim {
            function,
            dim,
            n,
            seq_file,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            let seq = match seq_file {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("reading {path}: {e}"))?;
                    serde_json::from_str::<SchoenbergSequence>(&text)
                        .map_err(|e| format!("parsing {path}: {e}"))?
                }
                None => {
                    let dim = parse_dim(
                        dim.as_deref()
                            .ok_or("--dim is required without --seq-file")?,
                    )?;
                    resolve_sequence(&function, dim, n)?
                }
            };
            let one = schoenberg::to_one_dim(&seq).map_err(|e| e.to_string())?;
            let csv = {
                let idx: Vec<f64> = (0..one.len()).map(|i| i as f64).collect();
                curve_csv(&["n", "coefficient"], &[&idx, one.coefficients()])
            };
            emitter.emit(
                "to-one-dim",
                params_json(&function),
                serde_json::to_value(&one).unwrap(),
                json!({"input_dimension": seq.dimension().to_string()}),
                Some(csv),
            )?;
            Ok(0)
        }

        Cmd::CheckPd {
            function,
            dim,
            n,
            seed,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            let f = resolve_function(&function, None)?;
            let seed = default_seed(seed);
            let report = validation::pd_check(&f, dim, n, seed).map_err(|e| e.to_string())?;
            let csv = format!(
                "dimension,n_points,seed,min_eigenvalue,tolerance,verdict\n{},{},{},{},{},{}\n",
                dim,
                n,
                seed,
                csv_float(report.min_eigenvalue),
                csv_float(report.tolerance),
                match report.verdict {
                    validation::Verdict::PdConsistent => "pd-consistent",
                    validation::Verdict::PdViolated => "pd-violated",
                }
            );
            emitter.emit(
                "check-pd",
                params_json(&function),
                serde_json::to_value(&report).unwrap(),
                json!({}),
                Some(csv),
            )?;
            Ok(0)
        }

        Cmd::ProbeSmoothness {
            function,
            theta0,
            max_order,
            output,
        } => {
            let emitter = Emitter::new(&output)?;
            let f = resolve_function(&function, None)?;
            let report = validation::differentiability_probe(&f, theta0, max_order)
                .map_err(|e| e.to_string())?;
            let csv = {
                let mut s = String::from("order,left,right,gap_fine,converged\n");
                for p in &report.probes {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        p.order,
                        csv_float(p.left),
                        csv_float(p.right),
                        csv_float(p.gap_fine),
                        p.converged
                    ));
                }
                s
            };
            emitter.emit(
                "probe-smoothness",
                params_json(&function),
                serde_json::to_value(&report).unwrap(),
                json!({}),
                Some(csv),
            )?;
            Ok(0)
        }

        Cmd::Verify { suite, output } => {
            let emitter = Emitter::new(&output)?;
            let reports = verify::run(&suite).map_err(|e| e.to_string())?;
            let all_pass = reports.iter().all(|r| r.passed);
            let csv = {
                let mut s = String::from("suite,check,pass,detail\n");
                for r in &reports {
                    for c in &r.checks {
                        s.push_str(&format!(
                            "{},{},{},{:?}\n",
                            r.suite, c.name, c.pass, c.detail
                        ));
                    }
                }
                s
            };
            emitter.emit(
                "verify",
                json!({"suite": suite}),
                serde_json::to_value(&reports).unwrap(),
                json!({"passed": all_pass}),
                Some(csv),
            )?;
            Ok(if all_pass { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
