//! Deterministic, seeded generators for the synthetic experiment suites.
//!
//! Every curve draws from its own `(seed, "curve", index)` stream, so
//! generation is order-independent and parallel-safe; a final seeded
//! shuffle removes positional artifacts while keeping the label counts at
//! the floor convention `n_normal = floor(n * (1 - fraction))`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maybe_par_iter;
use crate::path::{FunctionalDataset, Label};
use crate::rng::stream;

/// Drift and volatility of one random-walk diffusion class. Increments are
/// per grid step: `X_{i+1} = X_i + mu + sigma * N(0, 1)` (the walk's own
/// unit clock), stored against the shared [0, 1] grid. Signatures are
/// reparameterization-invariant, so only this per-step law matters; it
/// keeps the drift-to-noise ratio independent of the grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeParams {
    pub mu: f64,
    pub sigma: f64,
}

/// Synthetic scenario with its class parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// Constant level `b ~ U[0, 100]` plus Gaussian noise on a class
    /// interval: normal on `[0.3, 0.6]`, abnormal on `[0.7, 0.8]`.
    NoiseInterval {
        noise_sd: f64,
        base_range: (f64, f64),
        normal_interval: (f64, f64),
        abnormal_interval: (f64, f64),
    },
    /// Brownian motion; normal (mu = 0, sigma = 0.5) vs drifted
    /// (mu = 0.2, sigma = 0.4).
    BrownianDrift { normal: SdeParams, abnormal: SdeParams },
    /// Smooth bumps `amp * t^q (1 - t)^q` with `q` equispaced over the
    /// exponent range, plus identical noise events on swapped intervals.
    SwapEvents {
        amplitude: f64,
        exponent_range: (f64, f64),
        noise_sd: f64,
        normal_interval: (f64, f64),
        abnormal_interval: (f64, f64),
    },
    /// Smooth Brownian paths (sigma = base) against paths with volatility
    /// `base + noise_level`.
    RobustNoise { base_sigma: f64, noise_level: f64 },
    /// Swap-style base curves where abnormal data carries strong noise on
    /// one interval and a slice of the normal data carries slight noise on
    /// another.
    RobustEvents {
        amplitude: f64,
        exponent_range: (f64, f64),
        abnormal_sd: f64,
        abnormal_interval: (f64, f64),
        slight_sd: f64,
        slight_interval: (f64, f64),
        slight_fraction: f64,
    },
    /// Merton jump diffusion: the random-walk diffusion plus
    /// compound-Poisson jumps. `jump_rate` is the expected jump count per
    /// path; with rate 0 the generator reduces to the Brownian one on the
    /// same seed stream.
    Merton {
        diffusion: SdeParams,
        jump_rate: f64,
        jump_mean: f64,
        jump_sd: f64,
    },
    /// Planar Brownian motion, abnormal paths with larger volatility.
    PlanarBrownian { normal_sigma: f64, abnormal_sigma: f64 },
    /// Three-dimensional Brownian motion; both label groups share the same
    /// law (used for rank-stability studies, where labels are ignored).
    Brownian3d { sigma: f64 },
}

impl Scenario {
    pub fn dim(&self) -> usize {
        match self {
            Scenario::PlanarBrownian { .. } => 2,
            Scenario::Brownian3d { .. } => 3,
            _ => 1,
        }
    }

    pub fn noise_interval() -> Scenario {
        Scenario::NoiseInterval {
            noise_sd: 1.0,
            base_range: (0.0, 100.0),
            normal_interval: (0.3, 0.6),
            abnormal_interval: (0.7, 0.8),
        }
    }

    pub fn brownian_drift() -> Scenario {
        Scenario::BrownianDrift {
            normal: SdeParams { mu: 0.0, sigma: 0.5 },
            abnormal: SdeParams { mu: 0.2, sigma: 0.4 },
        }
    }

    pub fn swap_events() -> Scenario {
        Scenario::SwapEvents {
            amplitude: 30.0,
            exponent_range: (1.0, 1.4),
            noise_sd: 0.8,
            normal_interval: (0.2, 0.4),
            abnormal_interval: (0.6, 0.8),
        }
    }

    pub fn robust_noise(noise_level: f64) -> Scenario {
        Scenario::RobustNoise { base_sigma: 0.05, noise_level }
    }

    pub fn robust_events() -> Scenario {
        Scenario::RobustEvents {
            amplitude: 30.0,
            exponent_range: (1.0, 1.4),
            abnormal_sd: 0.5,
            abnormal_interval: (0.2, 0.5),
            slight_sd: 0.1,
            slight_interval: (0.7, 0.9),
            slight_fraction: 0.1,
        }
    }

    pub fn merton() -> Scenario {
        // jump size sd sits well above the per-step diffusion noise so the
        // jumps actually fatten the increment tails
        Scenario::Merton {
            diffusion: SdeParams { mu: 0.0, sigma: 0.5 },
            jump_rate: 3.0,
            jump_mean: 0.0,
            jump_sd: 2.0,
        }
    }

    pub fn planar_brownian() -> Scenario {
        Scenario::PlanarBrownian { normal_sigma: 0.1, abnormal_sigma: 0.4 }
    }

    pub fn brownian3d() -> Scenario {
        Scenario::Brownian3d { sigma: 0.1 }
    }

    /// Sample count and abnormal fraction the scenario was designed with.
    pub fn default_counts(&self) -> (usize, f64) {
        match self {
            Scenario::RobustNoise { .. } => (550, 50.0 / 550.0),
            _ => (100, 0.1),
        }
    }
}

/// Full description of one synthetic dataset draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub scenario: Scenario,
    pub n: usize,
    /// Grid size; the grid is uniform on [0, 1].
    pub p: usize,
    pub fraction_abnormal: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(scenario: Scenario) -> SynthSpec {
        let (n, fraction_abnormal) = scenario.default_counts();
        SynthSpec { scenario, n, p: 100, fraction_abnormal, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> SynthSpec {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::TooFewSamples { min: 1, got: 0 });
        }
        if self.p < 2 {
            return Err(Error::TooFewPoints { min: 2, got: self.p });
        }
        if !(self.fraction_abnormal > 0.0 && self.fraction_abnormal < 1.0) {
            return Err(Error::FractionOutOfRange(self.fraction_abnormal));
        }
        Ok(())
    }

    fn normal_count(&self) -> usize {
        (self.n as f64 * (1.0 - self.fraction_abnormal)).floor() as usize
    }
}

fn in_interval(t: f64, interval: (f64, f64)) -> bool {
    t >= interval.0 && t <= interval.1
}

fn random_walk(points: usize, params: SdeParams, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = 0.0;
    let mut out = Vec::with_capacity(points);
    out.push(x);
    for _ in 1..points {
        let z: f64 = StandardNormal.sample(rng);
        x += params.mu + params.sigma * z;
        out.push(x);
    }
    out
}

fn add_interval_noise(values: &mut [f64], grid: &[f64], interval: (f64, f64), sd: f64, rng: &mut ChaCha8Rng) {
    for (v, &t) in values.iter_mut().zip(grid) {
        if in_interval(t, interval) {
            let z: f64 = StandardNormal.sample(rng);
            *v += sd * z;
        }
    }
}

fn bump_base(t: f64, q: f64, amplitude: f64) -> f64 {
    amplitude * t.powf(q) * (1.0 - t).powf(q)
}

/// Generate the dataset described by the spec. Deterministic in
/// `(spec, seed)`; labels are attached.
pub fn generate(spec: &SynthSpec) -> Result<FunctionalDataset> {
    spec.validate()?;
    let grid = FunctionalDataset::uniform_grid(spec.p);
    let dim = spec.scenario.dim();
    let n_normal = spec.normal_count();

    // Bump scenarios assign the equispaced exponents through a seeded
    // permutation; otherwise the abnormal block would always carry the
    // extreme exponents and the class would leak through the base shape.
    let exponents: Option<Vec<f64>> = match &spec.scenario {
        Scenario::SwapEvents { exponent_range, .. }
        | Scenario::RobustEvents { exponent_range, .. } => {
            let mut slots: Vec<usize> = (0..spec.n).collect();
            slots.shuffle(&mut stream(spec.seed, "exponent-perm", 0));
            Some(
                slots
                    .into_iter()
                    .map(|slot| {
                        exponent_range.0
                            + (exponent_range.1 - exponent_range.0) * slot as f64
                                / (spec.n - 1).max(1) as f64
                    })
                    .collect(),
            )
        }
        _ => None,
    };

    let samples: Vec<Vec<f64>> = maybe_par_iter!(0..spec.n)
        .map(|i| {
            let mut rng = stream(spec.seed, "curve", i as u64);
            let abnormal = i >= n_normal;
            let exponent = exponents.as_ref().map(|e| e[i]);
            curve(spec, &grid, i, abnormal, exponent, &mut rng)
        })
        .collect();
    let labels: Vec<Label> = (0..spec.n)
        .map(|i| if i >= n_normal { Label::Anomaly } else { Label::Normal })
        .collect();

    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut stream(spec.seed, "shuffle", 0));
    let dataset = FunctionalDataset::new(grid, dim, samples, Some(labels))?;
    Ok(dataset.permuted(&order))
}

fn curve(
    spec: &SynthSpec,
    grid: &[f64],
    index: usize,
    abnormal: bool,
    exponent: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = spec.n;
    match &spec.scenario {
        Scenario::NoiseInterval { noise_sd, base_range, normal_interval, abnormal_interval } => {
            let b = rng.random_range(base_range.0..base_range.1);
            let mut values = vec![b; grid.len()];
            let interval = if abnormal { *abnormal_interval } else { *normal_interval };
            add_interval_noise(&mut values, grid, interval, *noise_sd, rng);
            values
        }
        Scenario::BrownianDrift { normal, abnormal: ab } => {
            random_walk(grid.len(), if abnormal { *ab } else { *normal }, rng)
        }
        Scenario::SwapEvents {
            amplitude,
            noise_sd,
            normal_interval,
            abnormal_interval,
            ..
        } => {
            let q = exponent.expect("bump scenarios carry an exponent");
            let mut values: Vec<f64> = grid.iter().map(|&t| bump_base(t, q, *amplitude)).collect();
            let interval = if abnormal { *abnormal_interval } else { *normal_interval };
            add_interval_noise(&mut values, grid, interval, *noise_sd, rng);
            values
        }
        Scenario::RobustNoise { base_sigma, noise_level } => {
            let sigma = if abnormal { base_sigma + noise_level } else { *base_sigma };
            random_walk(grid.len(), SdeParams { mu: 0.0, sigma }, rng)
        }
        Scenario::RobustEvents {
            amplitude,
            abnormal_sd,
            abnormal_interval,
            slight_sd,
            slight_interval,
            slight_fraction,
            ..
        } => {
            let q = exponent.expect("bump scenarios carry an exponent");
            let mut values: Vec<f64> = grid.iter().map(|&t| bump_base(t, q, *amplitude)).collect();
            let n_normal = spec.normal_count();
            let n_slight = (n as f64 * slight_fraction).floor() as usize;
            if abnormal {
                add_interval_noise(&mut values, grid, *abnormal_interval, *abnormal_sd, rng);
            } else if index + n_slight >= n_normal {
                // the tail of the normal block carries the slight noise
                add_interval_noise(&mut values, grid, *slight_interval, *slight_sd, rng);
            }
            values
        }
        Scenario::Merton { diffusion, jump_rate, jump_mean, jump_sd } => {
            let mut values = random_walk(grid.len(), *diffusion, rng);
            if *jump_rate > 0.0 {
                // jumps draw from their own stream so the no-jump limit
                // reproduces the Brownian generator byte for byte
                let mut jump_rng = stream(spec.seed, "jumps", index as u64);
                let per_step = jump_rate / (grid.len() - 1) as f64;
                let pois = Poisson::new(per_step).expect("positive rate");
                let mut shift = 0.0;
                for value in values.iter_mut().skip(1) {
                    let count = pois.sample(&mut jump_rng) as usize;
                    for _ in 0..count {
                        let z: f64 = StandardNormal.sample(&mut jump_rng);
                        shift += jump_mean + jump_sd * z;
                    }
                    *value += shift;
                }
            }
            values
        }
        Scenario::PlanarBrownian { normal_sigma, abnormal_sigma } => {
            let sigma = if abnormal { *abnormal_sigma } else { *normal_sigma };
            interleave(&[
                random_walk(grid.len(), SdeParams { mu: 0.0, sigma }, rng),
                random_walk(grid.len(), SdeParams { mu: 0.0, sigma }, rng),
            ])
        }
        Scenario::Brownian3d { sigma } => interleave(&[
            random_walk(grid.len(), SdeParams { mu: 0.0, sigma: *sigma }, rng),
            random_walk(grid.len(), SdeParams { mu: 0.0, sigma: *sigma }, rng),
            random_walk(grid.len(), SdeParams { mu: 0.0, sigma: *sigma }, rng),
        ]),
    }
}

fn interleave(coords: &[Vec<f64>]) -> Vec<f64> {
    let p = coords[0].len();
    let mut out = Vec::with_capacity(p * coords.len());
    for i in 0..p {
        for c in coords {
            out.push(c[i]);
        }
    }
    out
}
