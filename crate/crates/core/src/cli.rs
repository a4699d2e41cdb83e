//! Command line: `demo-shape`, `gen-data`, `train`, `extract` and `eval`.
//!
//! Every command is deterministic for a given `--seed`; `--threads` only
//! changes speed. Failures are printed to standard error as one JSON line and
//! map to exit code 1 (bad arguments or input) or 2 (runtime failure).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

use crate::datagen::{generate_pairs, read_dataset, write_dataset, SamplerConfig};
use crate::extractor::{extract, Domain, ExtractionConfig};
use crate::fields::{AnalyticField, AnalyticShapeSpec, MeshOracleField, PairField};
use crate::geometry::io::{read_mesh, write_mesh};
use crate::geometry::{normalize_mesh, Normalization, TriangleMesh};
use crate::learner::{read_model, train, write_model, FlagLoss, LearnedField, ModelConfig, TrainConfig};
use crate::metrics::{evaluate_meshes, ChamferConvention, EvalConfig, DEFAULT_SAMPLES};
use crate::{GifsError, Result, RngSeed};

/// Names accepted by [`demo_shape`].
pub const DEMO_SHAPES: [&str; 4] = ["sphere", "double-sphere", "open-disc", "ball-on-plane"];

/// Icosphere subdivision depth used when a demo shape stands in for a mesh.
pub const DEMO_TESSELLATION: u32 = 5;

// Shape centers sit slightly off the extraction lattice so no grid node lies
// exactly on a surface at the usual resolutions.
const CENTER: [f64; 3] = [0.0013, 0.0007, -0.0011];

/// Built-in analytic shapes: a sphere of radius 0.4, concentric shells of
/// radii 0.2 and 0.4, an open disc of radius 0.3, and a double shell resting
/// above a disc.
pub fn demo_shape(name: &str) -> Result<AnalyticShapeSpec> {
    let z = [0.0, 0.0, 1.0];
    let spec = match name {
        "sphere" => AnalyticShapeSpec::SphereShell {
            center: CENTER,
            radius: 0.4,
        },
        "double-sphere" => AnalyticShapeSpec::DoubleSphere {
            center: CENTER,
            inner_radius: 0.2,
            outer_radius: 0.4,
        },
        "open-disc" => AnalyticShapeSpec::OpenDisc {
            center: [CENTER[0], CENTER[1], 0.0137],
            normal: z,
            radius: 0.3,
        },
        "ball-on-plane" => AnalyticShapeSpec::Composite {
            children: vec![
                AnalyticShapeSpec::DoubleSphere {
                    center: [CENTER[0], CENTER[1], 0.08],
                    inner_radius: 0.12,
                    outer_radius: 0.25,
                },
                AnalyticShapeSpec::OpenDisc {
                    center: [CENTER[0], CENTER[1], -0.2437],
                    normal: z,
                    radius: 0.42,
                },
            ],
        },
        other => {
            return Err(GifsError::UsageError(format!(
                "unknown shape {other:?}; expected one of {}",
                DEMO_SHAPES.join(", ")
            )))
        }
    };
    Ok(spec)
}

#[derive(Debug, Parser)]
#[command(name = "gifs", version, about = "Pairwise intersection-flag implicit shapes")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log filter, e.g. `warn`, `info`, `gifs=debug`. `GIFS_LOG` overrides it.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a built-in analytic shape and write the mesh.
    DemoShape(DemoShapeArgs),
    /// Sample labeled training pairs from a mesh.
    GenData(GenDataArgs),
    /// Fit a learned field to a dataset.
    Train(TrainArgs),
    /// Extract a mesh from a mesh, model or analytic field.
    Extract(ExtractArgs),
    /// Compare two meshes with Chamfer distance and F-score.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct ExtractOptions {
    #[arg(long, default_value_t = 20)]
    res0: usize,
    #[arg(long, default_value_t = 3)]
    subdiv: usize,
    #[arg(long, default_value_t = 2.0)]
    tau: f64,
    #[arg(long, default_value_t = 30)]
    refine_iters: usize,
    #[arg(long, default_value_t = 2e-4)]
    refine_lr: f64,
}

impl ExtractOptions {
    fn config(&self, seed: u64) -> ExtractionConfig {
        ExtractionConfig {
            initial_res: self.res0,
            subdivisions: self.subdiv,
            tau: self.tau,
            refine_iters: self.refine_iters,
            refine_lr: self.refine_lr,
            domain: Domain::default(),
            seed: RngSeed(seed),
            ..ExtractionConfig::default()
        }
    }
}

#[derive(Debug, Args)]
struct DemoShapeArgs {
    /// One of sphere, double-sphere, open-disc, ball-on-plane.
    #[arg(long)]
    shape: String,
    /// Output mesh (.obj or .ply).
    #[arg(long)]
    out: PathBuf,
    /// Also write the shape's JSON spec here.
    #[arg(long)]
    spec_out: Option<PathBuf>,
    #[command(flatten)]
    extract: ExtractOptions,
}

#[derive(Debug, Args)]
struct GenDataArgs {
    /// Input mesh (.obj or .ply), normalized to the unit cube before
    /// sampling, or `shape:<name>` for a tessellated demo shape.
    #[arg(long)]
    mesh: String,
    #[arg(long, default_value_t = 50_000)]
    pairs: usize,
    /// Comma-separated displacement scales.
    #[arg(long, value_delimiter = ',', default_values_t = [0.005, 0.01, 0.03])]
    sigmas: Vec<f64>,
    /// Fraction of uniform free-space pairs.
    #[arg(long, default_value_t = 0.10)]
    grid_frac: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    lr: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda: f64,
    #[arg(long, default_value_t = 512)]
    pairs_per_step: usize,
    /// `l1` or `bce`.
    #[arg(long, default_value = "l1")]
    flag_loss: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// `mesh:<path>`, `model:<path>`, `analytic:<spec.json>` or `shape:<name>`.
    #[arg(long)]
    field: String,
    /// Output mesh (.obj or .ply).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    extract: ExtractOptions,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.005, 0.01])]
    thresholds: Vec<f64>,
    /// Report the Chamfer mean of plain rather than squared distances.
    #[arg(long)]
    unsquared: bool,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.render().to_string();
            let message = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            report(&json!({"error": "UsageError", "message": message, "usage": text}));
            return 1;
        }
    };
    init_logging(&cli.log_level);
    let result = match cli.threads {
        Some(0) => Err(GifsError::UsageError("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GifsError::InvalidConfig(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| dispatch(&cli))),
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            report(&json!({"error": e.kind(), "message": e.to_string()}));
            exit_code(&e)
        }
    }
}

fn report(v: &serde_json::Value) {
    eprintln!("{v}");
}

/// 1 for problems with the arguments or inputs, 2 for failures while running.
pub fn exit_code(e: &GifsError) -> i32 {
    match e {
        GifsError::UsageError(_)
        | GifsError::InvalidConfig(_)
        | GifsError::InvalidMesh(_)
        | GifsError::EmptyMesh
        | GifsError::DegenerateMesh(_)
        | GifsError::EmptyPointSet => 1,
        _ => 2,
    }
}

fn init_logging(level: &str) {
    let filter = std::env::var("GIFS_LOG").unwrap_or_else(|_| level.to_string());
    let _ = env_logger::Builder::new()
        .parse_filters(&filter)
        .format_timestamp_millis()
        .try_init();
}

fn dispatch(cli: &Cli) -> Result<()> {
    let seed = cli.seed;
    match &cli.command {
        Command::DemoShape(a) => {
            let spec = demo_shape(&a.shape)?;
            if let Some(path) = &a.spec_out {
                std::fs::write(path, spec.to_json()?)?;
            }
            let mesh = extract(&AnalyticField::new(spec)?, &a.extract.config(seed))?;
            write_mesh(&a.out, &mesh)?;
            info!("wrote {} faces to {}", mesh.faces.len(), a.out.display());
        }
        Command::GenData(a) => {
            let (mesh, normalization, shape_id) = load_sampling_mesh(&a.mesh)?;
            let cfg = SamplerConfig {
                sigmas: a.sigmas.clone(),
                grid_fraction: a.grid_frac,
                pairs_per_shape: a.pairs,
                seed: RngSeed(seed),
            };
            let ds = generate_pairs(&mesh, &cfg)?.with_shape(shape_id, normalization);
            write_dataset(&ds, &a.out)?;
            info!("wrote {} pairs ({} free-space) to {}", ds.len(), ds.header.grid_pairs, a.out.display());
        }
        Command::Train(a) => {
            let ds = read_dataset(&a.data).map_err(|e| artifact_error(e, &a.data))?;
            let flag_loss = match a.flag_loss.as_str() {
                "l1" => FlagLoss::L1,
                "bce" => FlagLoss::Bce,
                other => return Err(GifsError::UsageError(format!("unknown flag loss {other:?}; expected l1 or bce"))),
            };
            let tcfg = TrainConfig {
                delta: a.delta,
                lambda: a.lambda,
                lr: a.lr,
                pairs_per_step: a.pairs_per_step,
                epochs: a.epochs,
                seed: RngSeed(seed),
                flag_loss,
                ..TrainConfig::default()
            };
            let trained = train(&ds, &tcfg, &ModelConfig::default())?;
            write_model(&trained.params, &a.out)?;
            info!("loss trace {:?}", trained.loss_trace);
        }
        Command::Extract(a) => {
            let cfg = a.extract.config(seed);
            let (field, normalization) = load_field(&a.field)?;
            let mesh = normalization.invert_mesh(&extract(field.as_ref(), &cfg)?);
            write_mesh(&a.out, &mesh)?;
            info!("wrote {} faces to {}", mesh.faces.len(), a.out.display());
        }
        Command::Eval(a) => {
            let pred = read_mesh(&a.pred).map_err(|e| artifact_error(e, &a.pred))?;
            let gt = read_mesh(&a.gt).map_err(|e| artifact_error(e, &a.gt))?;
            let cfg = EvalConfig {
                samples: a.samples,
                thresholds: a.thresholds.clone(),
                convention: if a.unsquared {
                    ChamferConvention::Unsquared
                } else {
                    ChamferConvention::Squared
                },
                seed: RngSeed(seed),
            };
            let report = evaluate_meshes(&pred, &gt, &cfg)?;
            println!("{}", serde_json::to_string(&report)?);
        }
    }
    Ok(())
}

/// Failing to open an input artifact is reported as a format problem with
/// the path attached.
fn artifact_error(e: GifsError, path: &Path) -> GifsError {
    match e {
        GifsError::Io(io) => GifsError::FormatError(format!("cannot read {}: {io}", path.display())),
        other => other,
    }
}

fn load_sampling_mesh(arg: &str) -> Result<(TriangleMesh, Normalization, String)> {
    if let Some(name) = arg.strip_prefix("shape:") {
        let mesh = demo_shape(name)?.tessellate(DEMO_TESSELLATION);
        return Ok((mesh, Normalization::identity(), name.to_string()));
    }
    let path = Path::new(arg);
    let mesh = read_mesh(path).map_err(|e| artifact_error(e, path))?;
    let (mesh, normalization) = normalize_mesh(&mesh)?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok((mesh, normalization, id))
}

/// Parses a `--field` argument. Mesh fields are normalized into the unit
/// cube; the returned normalization maps the extracted mesh back.
fn load_field(arg: &str) -> Result<(Box<dyn PairField>, Normalization)> {
    let (kind, rest) = arg
        .split_once(':')
        .ok_or_else(|| GifsError::UsageError(format!("--field must look like kind:value, got {arg:?}")))?;
    let path = Path::new(rest);
    match kind {
        "mesh" => {
            let mesh = read_mesh(path).map_err(|e| artifact_error(e, path))?;
            let (mesh, normalization) = normalize_mesh(&mesh)?;
            Ok((Box::new(MeshOracleField::new(mesh)?), normalization))
        }
        "model" => {
            let params = read_model(path).map_err(|e| artifact_error(e, path))?;
            Ok((Box::new(LearnedField::new(params)), Normalization::identity()))
        }
        "analytic" => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| GifsError::FormatError(format!("cannot read {}: {e}", path.display())))?;
            let spec = AnalyticShapeSpec::from_json(&text)?;
            Ok((Box::new(AnalyticField::new(spec)?), Normalization::identity()))
        }
        "shape" => Ok((Box::new(AnalyticField::new(demo_shape(rest)?)?), Normalization::identity())),
        other => Err(GifsError::UsageError(format!(
            "unknown field kind {other:?}; expected mesh, model, analytic or shape"
        ))),
    }
}
