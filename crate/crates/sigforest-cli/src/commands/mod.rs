pub mod bench;
pub mod fit;
pub mod score;
pub mod simulate;
pub mod sweep;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use sigforest::dataio::{load_series_file, preset_for};
use sigforest::dictionary::DictionaryConfig;
use sigforest::path::FunctionalDataset;
use sigforest::{Error as LibError, ForestConfig, SplitCriterion};

use crate::method::parse_dictionary;

/// Exit codes: 0 success, 2 usage, 3 data error, 4 numeric failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn usage(msg: impl ToString) -> CliError {
        CliError::Usage(msg.to_string())
    }

    pub fn data(msg: impl ToString) -> CliError {
        CliError::Data(msg.to_string())
    }

    pub fn numeric(msg: impl ToString) -> CliError {
        CliError::Numeric(msg.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Data(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl From<LibError> for CliError {
    fn from(err: LibError) -> CliError {
        match err {
            LibError::AlphaOutOfRange(_)
            | LibError::FractionOutOfRange(_)
            | LibError::ZeroDepth
            | LibError::ZeroWindows
            | LibError::NoTrees
            | LibError::SubsampleTooSmall(_) => CliError::Usage(err.to_string()),
            LibError::NonFiniteScores | LibError::NonFiniteValues => {
                CliError::Numeric(err.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

/// Honor the thread-count environment variable before any work starts.
pub fn init_thread_pool() {
    if let Ok(value) = std::env::var("SIGFOREST_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n > 0 {
                sigforest::set_thread_count(n);
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sigforest",
    version,
    about = "Signature isolation forests for functional anomaly detection",
    after_help = "Thread count can be pinned with the SIGFOREST_THREADS environment variable."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset file
    Simulate(simulate::SimulateArgs),
    /// Fit a forest and write a model file
    Fit(fit::FitArgs),
    /// Score a dataset with a fitted model
    Score(score::ScoreArgs),
    /// Fit and evaluate several methods over a directory of datasets
    Bench(bench::BenchArgs),
    /// Parameter sensitivity sweeps (split windows or signature depth)
    Sweep(sweep::SweepArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Fit(args) => fit::run(args),
        Command::Score(args) => score::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Sweep(args) => sweep::run(args),
    }
}

pub fn parse_criterion(name: &str) -> Result<SplitCriterion, CliError> {
    match name {
        "sif" => Ok(SplitCriterion::Sif),
        "ksif" => Ok(SplitCriterion::Ksif),
        "fif" => Ok(SplitCriterion::Fif),
        "if" => Ok(SplitCriterion::If),
        other => Err(CliError::usage(format!(
            "unknown criterion `{other}` (expected sif, ksif, fif or if)"
        ))),
    }
}

/// Fit configuration flags shared by `fit`, `bench` and `sweep`. Every flag
/// is mirrored in the optional TOML config file; explicit flags win.
#[derive(clap::Args, Clone, Default)]
pub struct FitFlags {
    /// Split criterion: sif | ksif | fif | if
    #[arg(long)]
    pub criterion: Option<String>,
    /// Signature truncation depth k
    #[arg(long)]
    pub depth: Option<usize>,
    /// Number of split windows omega
    #[arg(long)]
    pub windows: Option<usize>,
    /// Number of trees N
    #[arg(long)]
    pub trees: Option<usize>,
    /// Subsample size m (each tree uses min(m, n))
    #[arg(long)]
    pub subsample: Option<usize>,
    /// Height limit P (default ceil(log2(min(m, n))))
    #[arg(long)]
    pub height_limit: Option<usize>,
    /// Dictionary for ksif/fif: brownian | cosine | wavelet | self
    #[arg(long)]
    pub dictionary: Option<String>,
    /// FIF inner-product mix in [0, 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Prepend the time grid as an extra coordinate (sif/ksif)
    #[arg(long)]
    pub time_augment: bool,
    /// Optional TOML config file mirroring these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    criterion: Option<String>,
    depth: Option<usize>,
    windows: Option<usize>,
    trees: Option<usize>,
    subsample: Option<usize>,
    height_limit: Option<usize>,
    alpha: Option<f64>,
    seed: Option<u64>,
    time_augment: Option<bool>,
    dictionary: Option<DictionarySection>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct DictionarySection {
    kind: Option<String>,
    pool_size: Option<usize>,
    cosine: Option<CosineSection>,
    wavelet: Option<WaveletSection>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CosineSection {
    freq_max: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct WaveletSection {
    scale_range: Option<(f64, f64)>,
    shift_range: Option<(f64, f64)>,
}

impl FitFlags {
    pub fn resolve(&self) -> Result<ForestConfig, CliError> {
        let file: ConfigFile = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(CliError::data)?;
                toml::from_str(&text)
                    .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };

        let criterion_name = self
            .criterion
            .clone()
            .or(file.criterion)
            .unwrap_or_else(|| "sif".to_string());
        let mut config = ForestConfig::new(parse_criterion(&criterion_name)?);

        config.depth = self.depth.or(file.depth).unwrap_or(3);
        config.windows = self.windows.or(file.windows).unwrap_or(10);
        config.n_trees = self.trees.or(file.trees).unwrap_or(100);
        config.subsample = self.subsample.or(file.subsample).unwrap_or(256);
        config.height_limit = self.height_limit.or(file.height_limit);
        config.alpha = self.alpha.or(file.alpha).unwrap_or(1.0);
        config.seed = self.seed.or(file.seed).unwrap_or(0);
        config.time_augment = self.time_augment || file.time_augment.unwrap_or(false);

        let dict_file = file.dictionary.unwrap_or_default();
        let kind_name = self.dictionary.clone().or(dict_file.kind);
        let mut dictionary = match kind_name {
            Some(name) => DictionaryConfig::new(parse_dictionary(&name)?),
            None => DictionaryConfig::default(),
        };
        if let Some(pool) = dict_file.pool_size {
            dictionary.pool_size = pool;
        }
        if let Some(freq) = dict_file.cosine.unwrap_or_default().freq_max {
            dictionary.cosine_freq_max = freq;
        }
        let wavelet = dict_file.wavelet.unwrap_or_default();
        if let Some(range) = wavelet.scale_range {
            dictionary.wavelet_scale_range = range;
        }
        if let Some(range) = wavelet.shift_range {
            dictionary.wavelet_shift_range = range;
        }
        config.dictionary = dictionary;

        if !(0.0..=1.0).contains(&config.alpha) {
            return Err(CliError::usage(format!(
                "--alpha must lie in [0, 1], got {}",
                config.alpha
            )));
        }
        Ok(config)
    }
}

/// Stem of a data file with the archive's _TRAIN/_TEST suffix removed.
pub fn dataset_stem(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    stem.trim_end_matches("_TRAIN")
        .trim_end_matches("_TEST")
        .to_string()
}

/// Load a dataset file: either the native JSON format or a raw
/// `label, v_1, ..., v_p` series file resolved through a label-map preset.
pub fn load_input_dataset(
    path: &Path,
    preset_override: Option<&str>,
) -> Result<FunctionalDataset, CliError> {
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        return Ok(sigforest::dataio::load_dataset(path)?);
    }
    let stem = dataset_stem(path);
    let name = preset_override.unwrap_or(&stem);
    let preset = preset_for(name).ok_or_else(|| {
        CliError::data(format!(
            "no label-map preset for `{name}`; known presets: {}",
            sigforest::dataio::presets()
                .iter()
                .map(|p| p.name)
                .collect::<Vec<_>>()
                .join(", ")
        ))
    })?;
    let report = load_series_file(path, &preset.label_map)?;
    if report.dataset.points() != preset.expected_points {
        return Err(LibError::UnexpectedGridSize {
            expected: preset.expected_points,
            got: report.dataset.points(),
        }
        .into());
    }
    if report.dropped_rows > 0 {
        eprintln!(
            "warning: {} row(s) of {} dropped (labels outside the {} map)",
            report.dropped_rows,
            path.display(),
            preset.name
        );
    }
    Ok(report.dataset)
}

/// Manifest path convention: `<output>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", out.display()))
}
