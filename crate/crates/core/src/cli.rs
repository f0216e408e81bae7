//! Command-line front end: build model algebras, run verification suites,
//! recognize algebras and export their extremal geometry.
//!
//! Exit codes: 0 when everything passes, 1 when a check fails, 2 for usage
//! and parse errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{endomorphism_model, psp3, sp3, sp_model, StructureLieAlgebra};
use crate::error::Error;
use crate::field::FieldSpec;
use crate::geometry::{build_geometry, symplectic_plane};
use crate::recognition::recognize;
use crate::suites::{run_suite, Suite, SuiteInput, SuiteOptions};
use crate::symplectic::SymplecticSpace;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_SEED: u64 = 0x5eed;
/// Point budget over `Q`, where the geometry is infinite and only sampled.
const RATIONAL_BUDGET: usize = 60;

#[derive(Parser, Debug)]
#[command(name = "extremal", version, about = "Symplectic Lie algebras from extremal elements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a model algebra as JSON.
    Build(BuildArgs),
    /// Run a verification suite on an algebra file or a built model.
    Verify(VerifyArgs),
    /// Recognize an algebra with extremal generators as a symplectic Lie algebra.
    Recognize(RecognizeArgs),
    /// Export the extremal point/line geometry.
    Geometry(GeometryArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Odd prime characteristic.
    #[arg(long)]
    pub p: Option<u64>,
    /// Work over the rationals.
    #[arg(long, conflicts_with = "p")]
    pub rational: bool,
    /// Use the quadratic extension of F_p.
    #[arg(long, requires = "p")]
    pub square: bool,
}

impl FieldArgs {
    fn field(&self) -> Result<FieldSpec, CliError> {
        match (self.p, self.rational) {
            (_, true) => Ok(FieldSpec::Rational),
            (Some(p), false) => {
                let base = FieldSpec::prime(p).map_err(usage)?;
                if !self.square {
                    return Ok(base);
                }
                let ns = base
                    .nonzero_elements()
                    .and_then(|e| e.into_iter().find(|x| !x.is_square()))
                    .and_then(|x| x.residue())
                    .ok_or_else(|| CliError::Usage(format!("no nonsquare mod {p}")))?;
                FieldSpec::prime_square(p, ns).map_err(usage)
            }
            (None, false) => Err(CliError::Usage("give --p <prime> or --rational".into())),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// The symplectic algebra on a space of `2·pairs + radical` dimensions.
    Sp,
    /// Pure tensors of a degenerate 3-space inside the 4-dimensional model.
    Sp3,
    /// The tensor model of the degenerate 3-space itself.
    Psp3,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    pub model: Model,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Number of hyperbolic pairs.
    #[arg(long, default_value_t = 2)]
    pub pairs: usize,
    /// Dimension of the radical of the form.
    #[arg(long, default_value_t = 0)]
    pub radical: usize,
    /// Apply a random change of basis.
    #[arg(long)]
    pub scramble: bool,
    /// Multiply the bracket by this integer.
    #[arg(long)]
    pub scale: Option<i64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteArg {
    Tensor,
    Extremal,
    Geometry,
    Triples,
    Uniqueness,
    Recognition,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Tensor => Suite::Tensor,
            SuiteArg::Extremal => Suite::Extremal,
            SuiteArg::Geometry => Suite::Geometry,
            SuiteArg::Triples => Suite::Triples,
            SuiteArg::Uniqueness => Suite::Uniqueness,
            SuiteArg::Recognition => Suite::Recognition,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Algebra JSON; when absent the model is built from the field flags.
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 2)]
    pub pairs: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Maximum number of extremal points to explore.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RecognizeArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GeometryArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub budget: Option<usize>,
    /// JSON export of points and lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Graphviz export of the noncommuting graph.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAIL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Recognize(a) => cmd_recognize(a),
        Command::Geometry(a) => cmd_geometry(a),
    }
}

fn emit(out: Option<&Path>, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).unwrap();
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

/// Reads an algebra file; JSON syntax errors carry line and column.
pub fn read_algebra(path: &Path) -> Result<StructureLieAlgebra, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!("{}: parse error at line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    StructureLieAlgebra::from_json(&v).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Builds the requested model, returning the space when it is the plain model.
pub fn build_model(a: &BuildArgs) -> Result<(StructureLieAlgebra, Option<Arc<SymplecticSpace>>), CliError> {
    let k = a.field.field()?;
    let (l, space) = match a.model {
        Model::Sp => {
            if a.pairs == 0 {
                return Err(CliError::Usage("--pairs must be at least 1".into()));
            }
            let space = Arc::new(SymplecticSpace::standard(&k, a.pairs, a.radical).map_err(usage)?);
            let l = if a.radical == 0 {
                sp_model(&space).map_err(usage)?
            } else {
                endomorphism_model(&space).map_err(usage)?.algebra
            };
            (l, Some(space))
        }
        Model::Sp3 => (sp3(&k).map_err(usage)?.algebra, None),
        Model::Psp3 => (psp3(&k).map_err(usage)?.algebra, None),
    };
    if !a.scramble && a.scale.is_none() {
        return Ok((l, space));
    }
    let gamma = k.from_i64(a.scale.unwrap_or(1));
    if gamma.is_zero() {
        return Err(CliError::Usage("--scale must be nonzero in the field".into()));
    }
    let l = if a.scramble {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        l.scramble(&mut rng, Some(&gamma)).map_err(usage)?.0
    } else {
        l.transform(&crate::linalg::Mat::identity(&k, l.dim()), &gamma).map_err(usage)?
    };
    // the space no longer matches the basis
    Ok((l, None))
}

fn cmd_build(a: &BuildArgs) -> Result<i32, CliError> {
    let (l, _) = build_model(a)?;
    eprintln!("built {:?}: dim {}", a.model, l.dim());
    emit(a.out.as_deref(), &l.to_json())?;
    Ok(EXIT_PASS)
}

fn default_budget(k: &FieldSpec, budget: Option<usize>) -> usize {
    budget.unwrap_or(if k.is_finite() { SuiteOptions::default().budget } else { RATIONAL_BUDGET })
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let input = match &a.file {
        Some(path) => SuiteInput { algebra: read_algebra(path)?, space: None },
        None => {
            let b = BuildArgs {
                model: Model::Sp,
                field: a.field.clone(),
                pairs: a.pairs,
                radical: 0,
                scramble: false,
                scale: None,
                seed: a.seed,
                out: None,
            };
            let (algebra, space) = build_model(&b)?;
            SuiteInput { algebra, space }
        }
    };
    let opts = SuiteOptions { seed: a.seed, budget: default_budget(input.algebra.field(), a.budget), samples: a.samples };
    let report = run_suite(a.suite.into(), &input, &opts);
    for c in &report.checks {
        eprintln!("{} {}/{} ({:.1} ms)", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.name, c.millis);
    }
    emit(a.out.as_deref(), &report.to_json())?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_recognize(a: &RecognizeArgs) -> Result<i32, CliError> {
    let l = read_algebra(&a.file)?;
    let budget = default_budget(l.field(), a.budget);
    let report = recognize(&l, budget).map_err(|e| CliError::Failed(format!("recognition failed: {e}")))?;
    for (name, pass) in &report.checks {
        eprintln!("{} {name}", if *pass { "PASS" } else { "FAIL" });
    }
    eprintln!("m = {}, gamma = {}", report.m, report.gamma);
    emit(a.out.as_deref(), &report.to_json())?;
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_geometry(a: &GeometryArgs) -> Result<i32, CliError> {
    let l = read_algebra(&a.file)?;
    if l.extremal_generators().is_empty() {
        return Err(CliError::Usage("the algebra lists no extremal generators".into()));
    }
    let budget = default_budget(l.field(), a.budget);
    let geom = build_geometry(&l, l.extremal_generators(), budget).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut planes = Vec::new();
    'outer: for y in 0..geom.len() {
        for x in 0..geom.len() {
            for z in x + 1..geom.len() {
                if planes.len() >= 3 {
                    break 'outer;
                }
                if !geom.commutes(x, y) && !geom.commutes(z, y) && geom.commutes(x, z) && z != y {
                    if let Ok(p) = symplectic_plane(&l, geom.point(x), geom.point(y), geom.point(z)) {
                        planes.push(json!({ "points": p.points.len(), "lines": p.lines.len() }));
                    }
                }
            }
        }
        if y > 4 {
            break;
        }
    }
    let summary = json!({
        "points": geom.len(),
        "hyperbolic_lines": geom.hyperbolic_lines().len(),
        "complete": geom.complete,
        "planes_sampled": planes,
    });
    eprintln!("{}", serde_json::to_string(&summary).unwrap());
    if !geom.complete {
        eprintln!("warning: point budget {budget} reached; export is partial");
    }
    if let Some(dot) = &a.dot {
        fs::write(dot, geom.to_dot()).map_err(|e| CliError::Usage(format!("{}: {e}", dot.display())))?;
    }
    let mut v = geom.to_json();
    v["summary"] = summary;
    emit(a.out.as_deref(), &v)?;
    Ok(EXIT_PASS)
}
