//! Command-line front end: body I/O, run configuration, report emission,
//! and plot-data dumps for the invariant-point library.
//!
//! Exit codes: 0 on success, 1 when a verification fails or a numeric
//! routine gives up, 2 on input errors (unreadable files, malformed JSON,
//! degenerate bodies, invalid parameters). All randomness derives from the
//! single `--seed` flag, fanned out to fixed per-purpose sub-seeds, so a
//! given invocation is byte-identical across runs and across subcommands.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use equipoint::generate::{random_affine, random_polytope, random_similarity};
use equipoint::io::{body_to_json, plot_csv, polygon_loop, read_blend_spec, read_body};
use equipoint::sampling::{domain, sub_seed};
use equipoint::{
    asymmetric_profile, blend_functional, centroid_functional, interior_grid, mvee_center,
    suggest_radii, suspend, verify_fixed_slice, BlendMode, BlendSpec, ConvexBody,
    EquivarianceClass, Error, InvariantFunctional, Point, TestMap,
};

#[derive(Parser)]
#[command(
    name = "equipoint",
    version,
    about = "Invariant points of convex bodies: evaluation, equivariance batteries, \
             suspensions and their fixed-slice verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an invariant-point functional on one body.
    Compute(ComputeArgs),
    /// Run an equivariance battery: random maps against one body or a
    /// directory of bodies, reporting per-pair residuals as CSV.
    TestEquivariance(TestEquivarianceArgs),
    /// Build the suspension of a base body (embed at height 0, add two
    /// apexes at heights ±1) and write it out.
    Suspend(SuspendArgs),
    /// Evaluate a blend functional built from an anchor body and a target
    /// point; radii default to values suggested by the anchor's geometry.
    Blend(BlendArgs),
    /// Verify the fixed-slice properties of a suspension: symmetry order,
    /// fixed hyperplane, confinement of functionals, and achievability of
    /// interior base points.
    VerifySuspension(VerifySuspensionArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionalKind {
    Centroid,
    Mvee,
    Blend,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Soft,
    Hard,
}

impl From<ModeArg> for BlendMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Soft => BlendMode::Soft,
            ModeArg::Hard => BlendMode::Hard,
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// Functional to evaluate.
    #[arg(long, value_enum)]
    functional: FunctionalKind,
    /// Body JSON file.
    #[arg(long)]
    body: PathBuf,
    /// Blend-spec JSON file (required for --functional blend).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump the body outline (2D only) as polyline CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct TestEquivarianceArgs {
    /// Functional to test.
    #[arg(long, value_enum)]
    functional: FunctionalKind,
    /// Blend-spec JSON file (required for --functional blend).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Single body JSON file.
    #[arg(long, conflicts_with = "bodies")]
    body: Option<PathBuf>,
    /// Directory of body JSON files (read in sorted order).
    #[arg(long)]
    bodies: Option<PathBuf>,
    /// Generate this many random bodies instead of reading files.
    #[arg(long, conflicts_with_all = ["body", "bodies"])]
    random_bodies: Option<usize>,
    /// Number of random test maps.
    #[arg(long, default_value_t = 20)]
    maps: usize,
    /// Seed for map (and body) generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pass threshold on the relative equivariance residual.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Write the CSV of per-pair residuals here (default: stdout after the
    /// JSON summary).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuspendArgs {
    /// Base body JSON file.
    #[arg(long)]
    base: PathBuf,
    /// Write the suspension body JSON here (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump cross-sections at heights 0 and ±0.5 as polyline CSV
    /// (2D slices only).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct BlendArgs {
    /// Body to evaluate on.
    #[arg(long)]
    body: PathBuf,
    /// Full blend-spec JSON file; overrides the anchor/target flags.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Anchor body JSON file (used when no --spec is given).
    #[arg(long, required_unless_present = "spec")]
    anchor: Option<PathBuf>,
    /// Target point inside the anchor, comma-separated (e.g. "0.5,0.5").
    #[arg(long, required_unless_present = "spec", allow_hyphen_values = true)]
    target: Option<String>,
    /// Inner radius (exact-reproduction zone); default from the anchor's
    /// self-alignment gap.
    #[arg(long)]
    eps_in: Option<f64>,
    /// Outer radius (centroid zone); default from the anchor's
    /// self-alignment gap.
    #[arg(long)]
    eps_out: Option<f64>,
    /// Gaussian kernel width for soft mode; defaults to eps_out / 2.
    #[arg(long)]
    kernel_width: Option<f64>,
    /// Haar/multi-start budget.
    #[arg(long, default_value_t = 8)]
    budget: usize,
    #[arg(long, value_enum, default_value = "hard")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifySuspensionArgs {
    /// Base body JSON file.
    #[arg(long, required_unless_present = "profile")]
    base: Option<PathBuf>,
    /// Generate an asymmetric profile with this many vertices as the base
    /// instead of reading a file.
    #[arg(long)]
    profile: Option<usize>,
    /// Interior grid resolution per side for the achievability clause.
    #[arg(long, default_value_t = 3)]
    grid: usize,
    /// Seed for profile generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PointReport<'a> {
    functional: &'a str,
    body: String,
    value: Vec<f64>,
    inside: bool,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = ErrorReport {
                error: ErrorBody { code: e.code(), message: e.to_string() },
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("error serializes"));
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Compute(args) => run_compute(args),
        Command::TestEquivariance(args) => run_test_equivariance(args),
        Command::Suspend(args) => run_suspend(args),
        Command::Blend(args) => run_blend(args),
        Command::VerifySuspension(args) => run_verify_suspension(args),
    }
}

/// Builds the requested functional; blend needs a spec file.
fn build_functional(
    kind: FunctionalKind,
    spec: Option<&Path>,
) -> Result<InvariantFunctional<f64>, Error> {
    match kind {
        FunctionalKind::Centroid => Ok(centroid_functional()),
        FunctionalKind::Mvee => Ok(mvee_center()),
        FunctionalKind::Blend => {
            let path = spec.ok_or_else(|| {
                Error::InvalidParameter("--functional blend requires --spec".into())
            })?;
            let spec: BlendSpec<f64> = read_blend_spec(path)?;
            blend_functional(&spec)
        }
    }
}

fn emit(report_json: &str, out: Option<&Path>) -> Result<(), Error> {
    println!("{report_json}");
    if let Some(path) = out {
        std::fs::write(path, format!("{report_json}\n"))?;
    }
    Ok(())
}

fn run_compute(args: ComputeArgs) -> Result<(), Error> {
    let body = read_body::<f64>(&args.body)?;
    let functional = build_functional(args.functional, args.spec.as_deref())?;
    let value = functional.evaluate(&body)?;
    let inside = body.contains(value.as_slice(), 1e-8 * body.diameter());
    let report = PointReport {
        functional: functional.name(),
        body: args.body.display().to_string(),
        value: value.as_slice().to_vec(),
        inside,
    };
    emit(&serde_json::to_string_pretty(&report).expect("report"), args.out.as_deref())?;
    if let Some(plot) = &args.plot {
        let outline = polygon_loop(&body)?;
        std::fs::write(plot, plot_csv(&[outline]))?;
    }
    Ok(())
}

/// Reads every `.json` body in a directory, sorted by file name for
/// deterministic ordering.
fn read_body_dir(dir: &Path) -> Result<Vec<ConvexBody<f64>>, Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no .json bodies found in {}",
            dir.display()
        )));
    }
    paths.iter().map(read_body::<f64>).collect()
}

#[derive(Serialize)]
struct EquivarianceSummary<'a> {
    functional: &'a str,
    bodies: usize,
    maps: usize,
    tol: f64,
    max_residual: f64,
    all_members: bool,
    pass: bool,
}

fn run_test_equivariance(args: TestEquivarianceArgs) -> Result<(), Error> {
    let functional = build_functional(args.functional, args.spec.as_deref())?;

    let bodies: Vec<ConvexBody<f64>> = if let Some(n) = args.random_bodies {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(args.seed, domain::BODIES));
        (0..n)
            .map(|_| random_polytope(2, 8, &mut rng))
            .collect::<Result<_, _>>()?
    } else if let Some(path) = &args.body {
        vec![read_body::<f64>(path)?]
    } else if let Some(dir) = &args.bodies {
        read_body_dir(dir)?
    } else {
        return Err(Error::InvalidParameter(
            "one of --body, --bodies, --random-bodies is required".into(),
        ));
    };

    // map class follows the functional: affine-equivariant functionals are
    // exercised with general affine maps, similarity-equivariant ones with
    // similarities
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(args.seed, domain::MAPS));
    let maps: Vec<TestMap<f64>> = (0..args.maps)
        .map(|_| match functional.equivariance_class() {
            EquivarianceClass::Affine => TestMap::Affine(random_affine(2, &mut rng)),
            EquivarianceClass::Similarity => {
                TestMap::Similarity(random_similarity(2, &mut rng))
            }
        })
        .collect();

    let report = equipoint::equivariance_report(&functional, &bodies, &maps, args.tol)?;
    let summary = EquivarianceSummary {
        functional: functional.name(),
        bodies: bodies.len(),
        maps: maps.len(),
        tol: args.tol,
        max_residual: report.max_residual,
        all_members: report.all_members,
        pass: report.pass,
    };
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary"));
    let csv = report.to_csv();
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    if report.pass {
        Ok(())
    } else {
        Err(Error::VerificationFailure {
            clause: "equivariance".into(),
            message: format!(
                "max residual {:.3e} exceeds tol {:.3e} or a value left its body",
                report.max_residual, args.tol
            ),
        })
    }
}

fn run_suspend(args: SuspendArgs) -> Result<(), Error> {
    let base = read_body::<f64>(&args.base)?;
    let susp = suspend(&base)?;
    let json = body_to_json(susp.body());
    match &args.out {
        Some(path) => std::fs::write(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(plot) = &args.plot {
        let mut loops = Vec::new();
        for s in [0.0, 0.5, -0.5] {
            let slice = susp.slice_at(s)?;
            loops.push(polygon_loop(&slice)?);
        }
        std::fs::write(plot, plot_csv(&loops))?;
    }
    Ok(())
}

fn parse_point(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::ParseError(format!("bad coordinate {t:?}: {e}")))
        })
        .collect()
}

#[derive(Serialize)]
struct BlendReport {
    body: String,
    value: Vec<f64>,
    inside: bool,
    spec: serde_json::Value,
}

fn run_blend(args: BlendArgs) -> Result<(), Error> {
    let body = read_body::<f64>(&args.body)?;
    let spec: BlendSpec<f64> = if let Some(path) = &args.spec {
        read_blend_spec(path)?
    } else {
        let anchor = read_body::<f64>(args.anchor.as_ref().expect("clap enforces"))?;
        let target = parse_point(args.target.as_ref().expect("clap enforces"))?;
        let (suggested_in, suggested_out) =
            suggest_radii(&anchor, sub_seed(args.seed, domain::BLEND))?;
        let eps_in = args.eps_in.unwrap_or(suggested_in);
        let eps_out = args.eps_out.unwrap_or(suggested_out);
        BlendSpec {
            anchor,
            target: Point(target),
            eps_in,
            eps_out,
            kernel_width: args.kernel_width.unwrap_or(eps_out / 2.0),
            haar_budget: args.budget,
            seed: args.seed,
            mode: args.mode.into(),
        }
    };
    let functional = blend_functional(&spec)?;
    let value = functional.evaluate(&body)?;
    let inside = body.contains(value.as_slice(), 1e-8 * body.diameter());
    let report = BlendReport {
        body: args.body.display().to_string(),
        value: value.as_slice().to_vec(),
        inside,
        spec: serde_json::to_value(&spec).expect("spec serializes"),
    };
    emit(&serde_json::to_string_pretty(&report).expect("report"), args.out.as_deref())
}

fn run_verify_suspension(args: VerifySuspensionArgs) -> Result<(), Error> {
    let base: ConvexBody<f64> = if let Some(m) = args.profile {
        asymmetric_profile(m, args.seed)?
    } else {
        read_body::<f64>(args.base.as_ref().expect("clap enforces"))?
    };
    let susp = suspend(&base)?;
    let functionals = [centroid_functional::<f64>(), mvee_center::<f64>()];
    let grid = interior_grid(susp.base(), args.grid);
    let report = verify_fixed_slice(&susp, &functionals, &grid)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(&text, args.out.as_deref())
}
