use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tactile", version, about = "Tactile texture stylization, extraction and evaluation")]
pub struct Cli {
    /// Cap on worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a rectangular tile with an active top face.
    Tile(TileArgs),
    /// Displace a mesh with a heightfield.
    Apply(ApplyArgs),
    /// Recover a heightfield from an original/displaced mesh pair.
    Extract(ExtractArgs),
    /// RMS, MSE, SSIM and correlation between two heightfields.
    Metrics(MetricsArgs),
    /// Hypothesis tests over CSV input.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Corpus management.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Run an evaluation and write a report.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Render box plots from an evaluation report as SVG.
    Plot(PlotArgs),
    /// Start the studio HTTP API.
    Serve(ServeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tile(_) => "tile",
            Command::Apply(_) => "apply",
            Command::Extract(_) => "extract",
            Command::Metrics(_) => "metrics",
            Command::Stats(_) => "stats",
            Command::Dataset(_) => "dataset",
            Command::Eval(_) => "eval",
            Command::Plot(_) => "plot",
            Command::Serve(_) => "serve",
        }
    }
}

/// `WxH` pixel dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution(pub (usize, usize));

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected WxH with positive integers, got `{s}`");
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let (w, h): (usize, usize) = (w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?);
        if w == 0 || h == 0 {
            return Err(bad());
        }
        Ok(Resolution((w, h)))
    }
}

fn size_mm(values: &[f64]) -> [f64; 3] {
    [values[0], values[1], values[2]]
}

#[derive(Debug, Args)]
pub struct TileArgs {
    /// Width, depth and height in millimetres.
    #[arg(long = "size-mm", num_args = 3, value_names = ["X", "Y", "Z"], default_values_t = [50.0, 50.0, 10.0])]
    size_mm: Vec<f64>,
    #[arg(long, default_value_t = 25_000)]
    pub target_faces: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

impl TileArgs {
    pub fn size_mm(&self) -> [f64; 3] {
        size_mm(&self.size_mm)
    }
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub heightfield: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub magnification: f64,
    /// Height of a full-scale sample at magnification 1.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude_mm: f64,
    /// Only vertices of this face group move. Defaults to `top` when the mesh
    /// has it, otherwise every vertex.
    #[arg(long)]
    pub active_group: Option<String>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub modified: PathBuf,
    #[arg(long, default_value = "256x256")]
    pub resolution: Resolution,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub a: PathBuf,
    /// Resampled to the resolution of `--a` when sizes differ.
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Debug, Args)]
pub struct GroupsInput {
    /// CSV with columns `group,value`.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct RatingsInput {
    /// CSV with columns `subject,texture,condition,descriptor,rating`.
    #[arg(long)]
    pub input: PathBuf,
    /// Only this descriptor (default: each descriptor, Holm-corrected across them).
    #[arg(long)]
    pub descriptor: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Welch's unequal-variance t-test between two groups.
    WelchT {
        #[command(flatten)]
        data: GroupsInput,
        /// First group (default: first group in the file).
        #[arg(long)]
        a: Option<String>,
        /// Second group (default: second group in the file).
        #[arg(long)]
        b: Option<String>,
    },
    /// Welch's one-way ANOVA across all groups.
    WelchAnova(GroupsInput),
    /// Games-Howell pairwise comparisons across all groups.
    GamesHowell(GroupsInput),
    /// Friedman test across conditions, per descriptor.
    Friedman(RatingsInput),
    /// Wilcoxon signed-rank tests between conditions, per descriptor.
    Wilcoxon {
        #[command(flatten)]
        data: RatingsInput,
        /// First condition (default: every pair, Holm-corrected).
        #[arg(long, requires = "b")]
        a: Option<String>,
        #[arg(long, requires = "a")]
        b: Option<String>,
    },
    /// Spearman rank correlation; CSV columns `x,y`.
    Spearman {
        #[arg(long)]
        input: PathBuf,
    },
    /// Holm step-down correction; CSV column `p`.
    Holm {
        #[arg(long)]
        input: PathBuf,
        /// Family size when the file holds only part of the family.
        #[arg(long)]
        family_size: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Stratified seeded train/test split.
    Split(SplitArgs),
    /// Add 90/180/270 degree rotations of every train entry.
    Augment(AugmentArgs),
    /// Generate a synthetic corpus whose texture luminance is decorrelated from height.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub test_fraction: f64,
    /// Output manifest (default: overwrite the input).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where rotated images are written.
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Output manifest (default: overwrite the input).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `baseline`, `groundtruth`, `remote=URL`, or `remote` with the endpoint
    /// in TACTILE_GENERATOR_ENDPOINT. Repeat for several candidates.
    #[arg(long, required = true)]
    pub generator: Vec<String>,
    /// Evaluate a seeded random subset of this many entries.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Ground truth vs one candidate, measured on heightfields extracted from displaced tiles.
    Formative(FormativeArgs),
    /// Candidates vs ground truth, measured directly on heightfields.
    Technical(GeneratorArgs),
}

#[derive(Debug, Args)]
pub struct FormativeArgs {
    #[command(flatten)]
    pub common: GeneratorArgs,
    #[arg(long = "size-mm", num_args = 3, value_names = ["X", "Y", "Z"])]
    size_mm: Option<Vec<f64>>,
    #[arg(long, default_value_t = 25_000)]
    pub target_faces: usize,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude_mm: f64,
    #[arg(long, default_value_t = 1.0)]
    pub magnification: f64,
    /// Extraction resolution (default: each ground truth's own).
    #[arg(long)]
    pub resolution: Option<Resolution>,
}

impl FormativeArgs {
    pub fn size_mm(&self) -> Option<[f64; 3]> {
        self.size_mm.as_deref().map(size_mm)
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, default_value = "baseline")]
    pub generator: String,
    #[arg(long, default_value_t = 25_000)]
    pub target_faces: usize,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude_mm: f64,
    /// Sessions kept before the least recently used is evicted.
    #[arg(long, default_value_t = 64)]
    pub capacity: usize,
    /// Allowed CORS origin (default: any).
    #[arg(long)]
    pub cors_origin: Option<String>,
    /// Serve the stub heightfield generator instead of the studio.
    #[arg(long)]
    pub stub: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!("64x32".parse::<Resolution>().unwrap(), Resolution((64, 32)));
        assert!("64".parse::<Resolution>().is_err());
        assert!("0x3".parse::<Resolution>().is_err());
    }
}
