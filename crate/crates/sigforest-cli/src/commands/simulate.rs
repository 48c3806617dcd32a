use std::path::PathBuf;

use clap::ValueEnum;
use sigforest::datagen::{generate, Scenario, SynthSpec};
use sigforest::dataio::save_dataset;

use super::{manifest_path, CliError};
use crate::manifest::ManifestWriter;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScenarioArg {
    /// Constant curves, class-specific noise intervals
    NoiseInterval,
    /// Brownian motion vs drifted Brownian motion
    BrownianDrift,
    /// Smooth bumps with identical noise events on swapped intervals
    Swap,
    /// Smooth Brownian paths vs noisier Brownian paths
    RobustNoise,
    /// Bump curves with strong abnormal noise and slight normal noise
    RobustEvents,
    /// Merton jump diffusion
    Merton,
    /// Planar Brownian motion, larger abnormal volatility
    PlanarBrownian,
    /// Three-dimensional Brownian motion (rank-stability studies)
    Brownian3d,
}

impl ScenarioArg {
    pub fn to_scenario(self, noise_level: f64) -> Scenario {
        match self {
            ScenarioArg::NoiseInterval => Scenario::noise_interval(),
            ScenarioArg::BrownianDrift => Scenario::brownian_drift(),
            ScenarioArg::Swap => Scenario::swap_events(),
            ScenarioArg::RobustNoise => Scenario::robust_noise(noise_level),
            ScenarioArg::RobustEvents => Scenario::robust_events(),
            ScenarioArg::Merton => Scenario::merton(),
            ScenarioArg::PlanarBrownian => Scenario::planar_brownian(),
            ScenarioArg::Brownian3d => Scenario::brownian3d(),
        }
    }
}

#[derive(clap::Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// Sample count (scenario default when omitted)
    #[arg(long)]
    n: Option<usize>,
    /// Grid size (uniform on [0, 1])
    #[arg(long)]
    p: Option<usize>,
    /// Abnormal fraction in (0, 1)
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra volatility of the abnormal class (robust-noise only)
    #[arg(long, default_value_t = 0.1)]
    noise_level: f64,
    /// Output dataset file (JSON)
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: SimulateArgs) -> Result<(), CliError> {
    let mut spec = SynthSpec::new(args.scenario.to_scenario(args.noise_level));
    spec.seed = args.seed;
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(p) = args.p {
        spec.p = p;
    }
    if let Some(fraction) = args.fraction {
        spec.fraction_abnormal = fraction;
    }

    let manifest = ManifestWriter::start(
        manifest_path(&args.out),
        "simulate",
        serde_json::to_value(&spec).map_err(CliError::data)?,
        spec.seed,
        &[&args.out],
    )?;
    let dataset = generate(&spec)?;
    save_dataset(&dataset, &args.out)?;
    manifest.finish()?;
    println!(
        "wrote {} curves ({} anomalies) to {}",
        dataset.len(),
        dataset
            .labels()
            .map(|l| l.iter().filter(|x| x.is_anomaly()).count())
            .unwrap_or(0),
        args.out.display()
    );
    Ok(())
}
