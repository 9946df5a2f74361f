//! Command-line front end.

pub mod gap;
pub mod input;
pub mod report;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::catalogue::{get_model, list_models, verify_model, BuiltGeometry, VerificationReport};
use crate::expr::Rational;
use crate::jet::{Backend, JetOptions, SystemKind};
use crate::serde_rational::parse_rational;

pub use gap::{gap_row, gap_rows, render_table, AlgebraKind, GapRow};
pub use input::{GeometryFile, InputError};
pub use report::{run_analysis, AnalysisReport, AnalysisRequest, Source};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "projsym", version, about = "Projective, affine and metric symmetry dimensions of explicit geometries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Symmetry dimensions, curvature flags and field classifications.
    Analyze(AnalyzeArgs),
    /// Check a catalogue model against its expected values.
    Verify(VerifyArgs),
    /// Maximal and submaximal dimension gaps.
    GapTable(GapArgs),
    /// List the catalogue.
    Models(FormatArgs),
    /// Write a catalogue metric in the input file format.
    Export(ModelArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Catalogue model name.
    #[arg(long)]
    pub model: String,
    /// Dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Model parameter, e.g. `--param c=1/2`.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct JetArgs {
    /// Prolongation orders allowed beyond the system order.
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    /// Use floating point with this many bits (and twice as many) instead of modular arithmetic.
    #[arg(long, value_name = "BITS")]
    pub precision: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random evaluation points.
    #[arg(long, default_value_t = 2)]
    pub points: usize,
    /// Evaluation point used first, e.g. `--point 1/2,3,1`.
    #[arg(long, value_name = "Q,Q,..")]
    pub point: Option<String>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct FormatArgs {
    #[arg(long, conflicts_with = "table")]
    pub json: bool,
    #[arg(long)]
    pub table: bool,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub model: Option<String>,
    /// Geometry file (JSON).
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Comma-separated systems: killing, homothety, conformal, affine, projective, mobility, mobility_general.
    #[arg(long, value_delimiter = ',')]
    pub kinds: Vec<String>,
    #[command(flatten)]
    pub jet: JetArgs,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub jet: JetArgs,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[arg(long, default_value_t = 9)]
    pub n_max: usize,
    /// Restrict to one algebra; both tables by default.
    #[arg(long, value_enum)]
    pub algebra: Option<AlgebraKind>,
    /// Cross-check metric submaxima up to this dimension with the jet counter.
    #[arg(long, value_name = "N")]
    pub check: Option<usize>,
    #[command(flatten)]
    pub format: FormatArgs,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error(transparent)]
    Analysis(#[from] report::AnalysisError),
    #[error(transparent)]
    Catalogue(#[from] crate::catalogue::CatalogueError),
    #[error(transparent)]
    Input(#[from] InputError),
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, Rational>, CliError> {
    raw.iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("parameter `{kv}` is not of the form k=v")))?;
            let q = parse_rational(v).ok_or_else(|| CliError::Usage(format!("parameter `{k}`: bad rational `{v}`")))?;
            Ok((k.trim().to_string(), q))
        })
        .collect()
}

impl JetArgs {
    fn options(&self) -> Result<JetOptions, CliError> {
        let backend = match self.precision {
            Some(bits) if bits < 64 => return Err(CliError::Usage("--precision must be at least 64 bits".into())),
            Some(bits) => Backend::Float { bits: vec![bits, 2 * bits] },
            None => Backend::Modular { primes: 2 },
        };
        let fixed_points = match &self.point {
            None => Vec::new(),
            Some(s) => vec![s
                .split(',')
                .map(|c| parse_rational(c).ok_or_else(|| CliError::Usage(format!("--point: bad rational `{c}`"))))
                .collect::<Result<_, _>>()?],
        };
        Ok(JetOptions {
            points: self.points.max(1),
            max_order: self.max_order,
            backend,
            seed: self.seed,
            fixed_points,
        })
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |d| d.to_string())
}

fn analysis_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} (n = {}, {})", r.source, r.n, if r.metric { "metric" } else { "connection" });
    if let Some((p, q)) = r.signature {
        let _ = writeln!(s, "signature ({p},{q})");
    }
    if let Some(f) = &r.flags {
        let _ = writeln!(
            s,
            "flat {}  conformally flat {}  projectively flat {}",
            f.flat, f.conformally_flat, f.projectively_flat
        );
    } else {
        let _ = writeln!(s, "projectively flat {}", r.projectively_flat);
    }
    for (kind, rep) in &r.systems {
        let _ = writeln!(s, "{:<17} {:>4}   d = {:?}", kind.name(), rep.stabilized_dim, rep.d_sequence);
    }
    for c in &r.estimates {
        let _ = writeln!(s, "{} {}: {}", if c.holds { "ok  " } else { "FAIL" }, c.name, c.statement);
    }
    for f in &r.fields {
        let _ = writeln!(s, "{:<15} {}  {}", f.kind.name(), f.name, f.field);
    }
    s
}

fn verification_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} (n = {})", r.model, r.n);
    for g in &r.generators {
        let mark = if g.ok { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "{mark} {:<40} expected {:<15} got {}", g.label, g.expected.name(), g.actual.name());
    }
    if let Some(a) = &r.algebra {
        let _ = writeln!(
            s,
            "algebra: {} fields, {} independent, closure {}, jacobi {}",
            a.m, a.independent_dim, a.closure_ok, a.jacobi_ok
        );
    }
    for d in &r.dimensions {
        let mark = if d.ok { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "{mark} dim {:<12} expected {:>3} got {:>3} ({:?})", d.kind.name(), d.expected, d.computed, d.provenance);
    }
    for f in &r.flags {
        let mark = if f.ok { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "{mark} {:<18} expected {} got {}", f.flag, f.expected, f.computed);
    }
    if let Some((want, got)) = r.signature {
        let _ = writeln!(s, "{} signature expected {want:?} got {got:?}", if want == got { "ok  " } else { "FAIL" });
    }
    let _ = writeln!(s, "{}", if r.ok { "VERIFIED" } else { "MISMATCH" });
    s
}

fn models_text() -> String {
    let mut s = String::new();
    for m in list_models() {
        let dim = if m.any_dim {
            format!("n >= {} (default {})", m.min_dim, m.default_dim)
        } else {
            format!("n = {}", m.default_dim)
        };
        let _ = writeln!(s, "{:<20} {:<10} {:<22} {}", m.name, m.kind.to_string(), dim, m.description);
        for p in &m.params {
            let _ = writeln!(s, "{:<20}   {} = {} ({})", "", p.name, crate::expr::fmt_rational(&p.default), p.constraint);
        }
    }
    s
}

fn execute(cli: Cli, out: &mut String) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze(a) => {
            let source = match (&a.model, &a.file) {
                (Some(name), None) => Source::Model {
                    name: name.clone(),
                    n: a.n,
                    params: parse_params(&a.params)?,
                },
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|err| CliError::Io {
                        path: path.display().to_string(),
                        err,
                    })?;
                    Source::File(GeometryFile::from_json(&text)?)
                }
                _ => return Err(CliError::Usage("exactly one of --model and --file is required".into())),
            };
            let kinds = a
                .kinds
                .iter()
                .map(|k| SystemKind::parse(k.trim()).ok_or_else(|| CliError::Usage(format!("unknown system kind `{k}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let req = AnalysisRequest {
                source,
                kinds,
                options: a.jet.options()?,
            };
            let r = run_analysis(&req)?;
            out.push_str(&if a.format.table { analysis_text(&r) } else { json(&r) });
            Ok(if r.violations().is_empty() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Verify(v) => {
            let params = parse_params(&v.model.params)?;
            let r = verify_model(&v.model.model, &params, v.model.n, &v.jet.options()?)?;
            out.push_str(&if v.format.table { verification_text(&r) } else { json(&r) });
            Ok(if r.ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::GapTable(g) => {
            if g.n_max < 2 {
                return Err(CliError::Usage("--n-max must be at least 2".into()));
            }
            let algebras = match g.algebra {
                Some(a) => vec![a],
                None => vec![AlgebraKind::Projective, AlgebraKind::Affine],
            };
            let mut code = EXIT_OK;
            let checks: Vec<_> = match g.check {
                Some(m) => algebras
                    .iter()
                    .flat_map(|&a| gap::cross_check(m.min(g.n_max), a, &JetOptions::default()))
                    .collect(),
                None => Vec::new(),
            };
            if checks.iter().any(|c| !c.ok) {
                code = EXIT_VIOLATION;
            }
            if g.format.json {
                let rows: BTreeMap<&str, Vec<GapRow>> = algebras
                    .iter()
                    .map(|&a| (if a == AlgebraKind::Projective { "projective" } else { "affine" }, gap_rows(g.n_max, a)))
                    .collect();
                let body = serde_json::json!({ "schema": report::SCHEMA, "rows": rows, "checks": checks });
                out.push_str(&json(&body));
            } else {
                let tables: Vec<String> = algebras.iter().map(|&a| render_table(&gap_rows(g.n_max, a), a)).collect();
                out.push_str(&tables.join("\n"));
                for c in &checks {
                    let _ = writeln!(
                        out,
                        "% {} n={} {:<10} {:<18} formula {:>3} computed {:>3} {}",
                        if c.ok { "ok  " } else { "FAIL" },
                        c.n,
                        c.signature,
                        c.model,
                        c.formula,
                        opt(c.computed),
                        c.error.as_deref().unwrap_or("")
                    );
                }
            }
            Ok(code)
        }
        Command::Models(f) => {
            out.push_str(&if f.json { json(&list_models()) } else { models_text() });
            Ok(EXIT_OK)
        }
        Command::Export(m) => {
            let (built, _) = get_model(&m.model, &parse_params(&m.params)?, m.n)?;
            let file = match &built {
                BuiltGeometry::Metric(g) => GeometryFile::from_metric(g),
                BuiltGeometry::Connection(c) => GeometryFile::from_connection(c),
            };
            out.push_str(&(file.to_json() + "\n"));
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let mut out = String::new();
    match execute(cli, &mut out) {
        Ok(code) => {
            let _ = stdout.write_all(out.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}
