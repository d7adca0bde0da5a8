//! Command-line front end: body generation and inspection, single
//! functionals, the verification run and report rendering.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bodies::io::{parse_body, render_body, Body};
use crate::bodies::{ball_approx_volume_matched, Polytope};
use crate::error::GeomError;
use crate::functionals::{
    dual_mixed_volume, lp_mixed_quermassintegral, lp_mixed_volume, lpt_mixed_volume, lpt_mixed_volume_limit,
    mixed_volume, quermassintegral, star_volume, FunctionalResult, Method, LIMIT_SCHEDULE,
};
use crate::lab::generate::{generate_ellipsoid, generate_polytope};
use crate::lab::report::{parse_report, render, Format, Summary};
use crate::lab::suite::{run_suite, SuiteConfig};
use crate::linalg::Vector;
use crate::measures::{area_measure, lp_mixed_surface_measure, lp_surface_measure, repeated_mixed_area_measure};
use crate::projections::brightness;
use crate::quadrature::{default_level, make_quadrature};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Geom(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// The single error line written to stderr.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error: kind={} message={msg}", self.kind())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "lpmix", version, about = "Mixed L_p measures, L_{p,t} mixed volumes and projection bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or inspect body files.
    #[command(subcommand)]
    Bodies(BodiesCommand),
    /// Evaluate one functional.
    Compute(ComputeArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Re-render a report and print its summary.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
pub enum BodiesCommand {
    Generate(GenerateArgs),
    Inspect {
        /// Body file or built-in name.
        body: String,
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Polytope,
    Ellipsoid,
    Ball,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GenKind::Polytope)]
    pub kind: GenKind,
    /// Random points for polytopes.
    #[arg(long, default_value_t = 12)]
    pub vertices: usize,
    /// Keep the raw sample instead of moving its centroid to the origin.
    #[arg(long)]
    pub no_recenter: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Functional {
    Volume,
    SurfaceArea,
    MixedVolume,
    LpMixedVolume,
    LptMixedVolume,
    LptMixedVolumeLimit,
    Quermassintegral,
    LpMixedQuermassintegral,
    DualMixedVolume,
    StarVolume,
    Brightness,
    AreaMeasure,
    LpSurfaceMeasure,
    MixedAreaMeasure,
    LpMixedSurfaceMeasure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Rows,
    Structured,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Rows => Format::Rows,
            OutFormat::Structured => Format::Structured,
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    pub functional: Functional,
    /// Bodies: a file path or one of `cube[:a]`, `octahedron[:a]`,
    /// `ball[:r]`, `random:<seed>`.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Bodies of a mixed volume, in order.
    #[arg(long = "body")]
    pub bodies: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub i: usize,
    /// Direction for brightness, comma separated.
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long)]
    pub quad_level: Option<usize>,
    /// Points of the ball approximant in quermassintegrals.
    #[arg(long, default_value_t = 320)]
    pub ball_m: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Rows)]
    pub format: OutFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Restricts both p grids to this value.
    #[arg(long)]
    pub p: Option<f64>,
    /// Restricts the t grid to this value.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub quad_level: Option<usize>,
    /// Only run these checks (repeatable).
    #[arg(long)]
    pub only: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Rows)]
    pub format: OutFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A report in either format.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = OutFormat::Rows)]
    pub format: OutFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Resolves a body argument: an existing file, or a built-in name.
pub fn resolve_body(spec: &str, dim: usize) -> CliResult<Body> {
    let path = Path::new(spec);
    if path.is_file() {
        let body = parse_body(&read(path)?)?;
        return Ok(body);
    }
    let (name, arg) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b)));
    let num = |default: f64| -> CliResult<f64> {
        arg.map_or(Ok(default), |s| s.parse().map_err(|_| CliError::Usage(format!("bad parameter in `{spec}`"))))
    };
    match name {
        "cube" => Ok(Body::Polytope(Polytope::cube(dim, num(1.0)?)?)),
        "octahedron" | "cross-polytope" => Ok(Body::Polytope(Polytope::cross_polytope(dim, num(1.0)?)?)),
        "ball" => Ok(Body::Ball { dim, radius: num(1.0)? }),
        "random" => {
            let seed = arg
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Usage(format!("`{spec}` needs an integer seed")))?;
            Ok(Body::Polytope(generate_polytope(dim, 12, seed, true)?))
        }
        _ => Err(CliError::Usage(format!("`{spec}` is neither a file nor a built-in body"))),
    }
}

fn need<'a>(arg: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    arg.as_deref().ok_or_else(|| CliError::Usage(format!("this functional needs --{flag}")))
}

#[derive(Serialize)]
struct ComputeRow {
    functional: String,
    value: f64,
    method: Method,
    tolerance: f64,
}

fn functional_name(f: Functional) -> String {
    f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn render_result(f: Functional, r: &FunctionalResult, format: OutFormat) -> String {
    let row = ComputeRow { functional: functional_name(f), value: r.value, method: r.method, tolerance: r.tolerance };
    match format {
        OutFormat::Rows => format!(
            "functional,value,method,tolerance\n{},{:.16e},{},{:.16e}\n",
            row.functional,
            row.value,
            r.method.as_str(),
            row.tolerance
        ),
        OutFormat::Structured => {
            let mut s = serde_json::to_string_pretty(&row).expect("rows serialize");
            s.push('\n');
            s
        }
    }
}

fn compute(args: &ComputeArgs) -> CliResult<String> {
    let n = args.dim;
    let body = |flag: &str, v: &Option<String>| -> CliResult<Body> {
        let b = resolve_body(need(v, flag)?, n)?;
        if b.dim() != n {
            return Err(GeomError::DimensionMismatch { expected: n, found: b.dim() }.into());
        }
        Ok(b)
    };
    let poly = |flag: &str, v: &Option<String>| -> CliResult<Polytope> { Ok(body(flag, v)?.as_polytope()?.clone()) };
    let quad = || make_quadrature(n, args.quad_level.unwrap_or_else(|| default_level(n)));
    let (p, t) = (args.p, args.t);
    let result = match args.functional {
        Functional::Volume => {
            let k = poly("k", &args.k)?;
            FunctionalResult::from_exact(k.volume(), k.facets().len())
        },
        Functional::SurfaceArea => {
            let k = poly("k", &args.k)?;
            FunctionalResult::from_exact(k.surface_area(), k.facets().len())
        },
        Functional::MixedVolume => {
            let list = args.bodies.iter().map(|s| Ok(resolve_body(s, n)?.as_polytope()?.clone())).collect::<CliResult<Vec<_>>>()?;
            mixed_volume(&list.iter().collect::<Vec<_>>())?
        }
        Functional::LpMixedVolume => lp_mixed_volume(&poly("k", &args.k)?, &body("l", &args.l)?.to_support()?, p)?,
        Functional::LptMixedVolume => {
            lpt_mixed_volume(&poly("k", &args.k)?, &body("l", &args.l)?.to_support()?, &poly("q", &args.q)?, p, t)?
        }
        Functional::LptMixedVolumeLimit => lpt_mixed_volume_limit(
            &poly("k", &args.k)?,
            &body("l", &args.l)?.to_support()?,
            &poly("q", &args.q)?,
            p,
            t,
            &LIMIT_SCHEDULE,
        )?,
        Functional::Quermassintegral => quermassintegral(&poly("k", &args.k)?, args.i, args.ball_m)?,
        Functional::LpMixedQuermassintegral => {
            lp_mixed_quermassintegral(&poly("k", &args.k)?, &body("l", &args.l)?.to_support()?, p, args.i, args.ball_m)?
        }
        Functional::DualMixedVolume => {
            dual_mixed_volume(&body("k", &args.k)?.to_star()?, &body("l", &args.l)?.to_star()?, p, &quad()?)?
        }
        Functional::StarVolume => star_volume(&body("k", &args.k)?.to_star()?, &quad()?)?,
        Functional::Brightness => {
            let coords = need(&args.u, "u")?
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad direction component `{s}`"))))
                .collect::<CliResult<Vec<_>>>()?;
            let u = Vector::from_slice(&coords)?.normalized()?;
            {
                let k = poly("k", &args.k)?;
                FunctionalResult::from_exact(brightness(&k, &u)?, k.facets().len())
            }
        }
        Functional::AreaMeasure => return Ok(area_measure(&poly("k", &args.k)?).dump_rows()),
        Functional::LpSurfaceMeasure => return Ok(lp_surface_measure(&poly("k", &args.k)?, p)?.dump_rows()),
        Functional::MixedAreaMeasure => {
            return Ok(repeated_mixed_area_measure(&poly("k", &args.k)?, t, &poly("q", &args.q)?)?.dump_rows())
        }
        Functional::LpMixedSurfaceMeasure => {
            return Ok(lp_mixed_surface_measure(&poly("k", &args.k)?, &poly("q", &args.q)?, p, t)?.dump_rows())
        }
    };
    Ok(render_result(args.functional, &result, args.format))
}

#[derive(Serialize)]
struct Inspection {
    dim: usize,
    kind: &'static str,
    vertices: Option<usize>,
    facets: Option<usize>,
    volume: f64,
    surface_area: Option<f64>,
    origin_interior: bool,
}

fn inspect(spec: &str, dim: Option<usize>) -> CliResult<String> {
    let body = resolve_body(spec, dim.unwrap_or(3))?;
    let n = body.dim();
    let report = match &body {
        Body::Polytope(p) => Inspection {
            dim: n,
            kind: "polytope",
            vertices: Some(p.vertices().len()),
            facets: Some(p.facets().len()),
            volume: p.volume(),
            surface_area: Some(p.surface_area()),
            origin_interior: p.contains_origin_interior(),
        },
        other => Inspection {
            dim: n,
            kind: if matches!(other, Body::Ball { .. }) { "ball" } else { "ellipsoid" },
            vertices: None,
            facets: None,
            volume: star_volume(&other.to_star()?, &make_quadrature(n, default_level(n))?)?.value,
            surface_area: None,
            origin_interior: true,
        },
    };
    let mut s = serde_json::to_string_pretty(&report).expect("inspection serializes");
    s.push('\n');
    Ok(s)
}

fn generate(args: &GenerateArgs) -> CliResult<String> {
    let body = match args.kind {
        GenKind::Polytope => Body::Polytope(generate_polytope(args.dim, args.vertices, args.seed, !args.no_recenter)?),
        GenKind::Ellipsoid => Body::Ellipsoid(generate_ellipsoid(args.dim, args.seed)?),
        GenKind::Ball => {
            ball_approx_volume_matched(args.dim, args.vertices.max(args.dim + 1))?;
            Body::Ball { dim: args.dim, radius: 1.0 }
        }
    };
    Ok(render_body(&body))
}

/// Merges the config file and flags into a validated configuration.
pub fn verify_config(args: &VerifyArgs) -> CliResult<SuiteConfig> {
    let mut cfg = match &args.config {
        Some(path) => SuiteConfig::from_toml(&read(path)?)?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(dim) = args.dim {
        cfg.dim = dim;
    }
    if let Some(p) = args.p {
        cfg.p_grid = vec![p];
        cfg.p_strict_grid = vec![p];
    }
    if let Some(t) = args.t {
        cfg.t_grid = Some(vec![t]);
    }
    if let Some(level) = args.quad_level {
        cfg.quad_level = Some(level);
    }
    if !args.only.is_empty() {
        cfg.only = args.only.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn finish(summary: &Summary, out: Option<&Path>, rendered: &str) -> CliResult<i32> {
    match out {
        Some(path) => {
            write_atomic(path, rendered)?;
            print!("{}", summary.render());
        }
        None => print!("{rendered}{}", summary.render()),
    }
    Ok(if summary.is_clean() { 0 } else { 1 })
}

/// Runs a parsed command and returns the exit status.
pub fn execute(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Bodies(BodiesCommand::Generate(args)) => {
            emit(args.out.as_deref(), &generate(args)?)?;
            Ok(0)
        }
        Command::Bodies(BodiesCommand::Inspect { body, dim }) => {
            print!("{}", inspect(body, *dim)?);
            Ok(0)
        }
        Command::Compute(args) => {
            emit(args.out.as_deref(), &compute(args)?)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let cfg = verify_config(args)?;
            let records = run_suite(&cfg)?;
            let summary = Summary::of(&records);
            let rendered = render(&records, args.format.into())?;
            match &args.out {
                Some(path) => finish(&summary, Some(path), &rendered),
                None => {
                    print!("{}", summary.render());
                    Ok(if summary.is_clean() { 0 } else { 1 })
                }
            }
        }
        Command::Report(args) => {
            let records = parse_report(&read(&args.input)?)?;
            let summary = Summary::of(&records);
            finish(&summary, args.out.as_deref(), &render(&records, args.format.into())?)
        }
    }
}

/// Entry point used by the binary. Usage errors and failures print a single
/// `error: kind=… message=…` line on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Usage(first).line());
            return 2;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.line());
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_bodies_resolve() {
        let cube = resolve_body("cube:0.5", 3).unwrap();
        assert!((cube.as_polytope().unwrap().volume() - 1.0).abs() < 1e-12);
        assert!(resolve_body("random:4", 2).unwrap().as_polytope().is_ok());
        assert!(matches!(resolve_body("dodecahedron", 3), Err(CliError::Usage(_))));
    }

    #[test]
    fn error_lines_are_single_line() {
        let e = CliError::from(GeomError::Parse("bad\nthing".into()));
        assert_eq!(e.line(), "error: kind=parse message=parse error: bad thing");
    }

    #[test]
    fn flags_override_config() {
        let args = VerifyArgs {
            config: None,
            seed: Some(3),
            dim: Some(2),
            p: Some(2.0),
            t: Some(0),
            quad_level: Some(64),
            only: vec!["MFI".into()],
            out: None,
            format: OutFormat::Rows,
        };
        let cfg = verify_config(&args).unwrap();
        assert_eq!((cfg.seed, cfg.dim, cfg.quad_level), (3, 2, Some(64)));
        assert_eq!(cfg.p_grid, vec![2.0]);
        assert_eq!(cfg.t_grid, Some(vec![0]));
    }

    #[test]
    fn atomic_writes_leave_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
