use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "rotcover", version, about = "Rotation placement and cap transport experiments on the sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Area of a region: exact when available, compared with Monte Carlo.
    Area(Common),
    /// Averaged hit count E[f] over Haar rotations.
    ExpectedCount(PointArgs),
    /// Measure of rotations placing every point inside the region.
    Measure(PointArgs),
    /// Randomized search for a rotation placing every point inside the region.
    Place(PlaceArgs),
    /// Build (or check) a transport plan moving M' into M with disjoint caps.
    Transport(TransportArgs),
    /// Smallest number of points a rotation can leave inside an obstruction.
    Sharpness(SharpnessArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Region JSON file.
    #[arg(long)]
    pub region: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Deterministic worker streams; results depend on this value.
    #[arg(long, default_value_t = 1)]
    pub streams: u32,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: Common,
    /// Preset name (tetrahedron, antipodal-pair, n-gon) or a JSON file
    /// holding a list of [x, y, z] points.
    #[arg(long, default_value = "tetrahedron")]
    pub points: String,
    /// Point count for the n-gon preset.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlaceArgs {
    #[command(flatten)]
    pub points: PointArgs,
    /// Rotations drawn before giving up.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Run local refinement from the best rotation when the search fails.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    #[command(flatten)]
    pub points: PointArgs,
    /// Size of the random rotation net.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Perturbations per angle during descent.
    #[arg(long, default_value_t = 32)]
    pub refine_steps: usize,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    /// Region M, the donor side.
    #[command(flatten)]
    pub common: Common,
    /// Region M', the side to be covered.
    #[arg(long)]
    pub region2: PathBuf,
    /// Check this existing plan instead of building one.
    #[arg(long)]
    pub validate: Option<PathBuf>,
    /// Where to write the built plan.
    #[arg(long, default_value = "plan.json")]
    pub plan_out: PathBuf,
    /// Where to write the validation report.
    #[arg(long, default_value = "validation.json")]
    pub report_out: PathBuf,
    /// Cover cap angular radius.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Initial lattice side length.
    #[arg(long)]
    pub epsilon: Option<f64>,
}
