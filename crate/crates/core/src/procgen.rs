//! Synthetic locally stationary series of point clouds.
//!
//! Every scenario is written as a Bernoulli shift: a latent iid normal
//! stream `ζ` drives a finite moving average, and each cloud is a fixed
//! function of rescaled time `u`, the moving-average state, and per-time
//! sampling noise. [`Generator::auxiliary_cloud`] evaluates that function at
//! an arbitrary `u`, which realizes the stationary approximation `X_t(u)`
//! directly; the observed cloud is `X_t(t / T)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Circle of radius `ρ_t = ρ_0 + Σ_j w_j ζ_{t-j}`.
    StationaryCircle,
    /// As above with `ρ` drifting linearly by `Δ · t/T`.
    GradualDrift,
    /// Circle up to `⌊change_u T⌋`, then two circles of radius `ρ_t / 2`
    /// whose centers are `Δ` apart.
    AbruptBifurcation,
    /// Fixed circle rotated by the moving-average angle `Σ_j w_j ζ_{t-j}`.
    DependentShift,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary_circle" => Ok(Scenario::StationaryCircle),
            "gradual_drift" => Ok(Scenario::GradualDrift),
            "abrupt_bifurcation" => Ok(Scenario::AbruptBifurcation),
            "dependent_shift" => Ok(Scenario::DependentShift),
            _ => Err(Error::input(format!("unknown scenario '{s}'"))),
        }
    }
}

/// How the evaluation points `m_1..m_n` on the circle are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingPolicy {
    UniformAngles,
    IidUniform,
    FarthestPoint,
}

impl std::str::FromStr for SamplingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform_angles" => Ok(SamplingPolicy::UniformAngles),
            "iid_uniform" => Ok(SamplingPolicy::IidUniform),
            "farthest_point" => Ok(SamplingPolicy::FarthestPoint),
            _ => Err(Error::input(format!("unknown sampling policy '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub scenario: Scenario,
    /// Series length T.
    pub length: usize,
    /// Points per cloud.
    pub points: usize,
    pub noise_sd: f64,
    pub ma_weights: Vec<f64>,
    pub change_u: f64,
    pub magnitude: f64,
    pub base_radius: f64,
    pub sampling: SamplingPolicy,
    pub seed: u64,
}

impl ProcessConfig {
    pub fn new(scenario: Scenario, length: usize, points: usize, seed: u64) -> Self {
        Self {
            scenario,
            length,
            points,
            noise_sd: 0.0,
            ma_weights: Vec::new(),
            change_u: 0.5,
            magnitude: 0.0,
            base_radius: 1.0,
            sampling: SamplingPolicy::UniformAngles,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::input(format!("series length must be >= 2, got {}", self.length)));
        }
        if self.points == 0 {
            return Err(Error::input("clouds need at least one point"));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(Error::input(format!("noise_sd must be >= 0, got {}", self.noise_sd)));
        }
        if self.ma_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::input("moving-average weights must be finite"));
        }
        if !(self.base_radius > 0.0) || !self.base_radius.is_finite() {
            return Err(Error::input("base radius must be positive"));
        }
        if !self.magnitude.is_finite() {
            return Err(Error::input("magnitude must be finite"));
        }
        if self.scenario == Scenario::AbruptBifurcation {
            if self.magnitude < 0.0 {
                return Err(Error::input(format!(
                    "bifurcation magnitude must be >= 0, got {}",
                    self.magnitude
                )));
            }
            if !(self.change_u > 0.0 && self.change_u < 1.0) {
                return Err(Error::input(format!(
                    "change_u must lie in (0, 1), got {}",
                    self.change_u
                )));
            }
        }
        Ok(())
    }
}

/// Evaluation parameters (angles in `[0, 2π)`) for `n` points.
pub fn sample_evaluation_grid(n: usize, policy: SamplingPolicy, rng: &mut impl Rng) -> Vec<f64> {
    match policy {
        SamplingPolicy::UniformAngles => (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect(),
        SamplingPolicy::IidUniform => (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect(),
        SamplingPolicy::FarthestPoint => farthest_point_angles(n, rng.random::<f64>() * 2.0 * PI),
    }
}

/// Farthest-point insertion on the continuous circle: each new angle is the
/// midpoint of the currently largest gap (earliest gap on ties).
fn farthest_point_angles(n: usize, start: f64) -> Vec<f64> {
    let mut chosen = vec![start];
    while chosen.len() < n {
        let mut sorted = chosen.clone();
        sorted.sort_by(f64::total_cmp);
        let mut best = (0.0, 0.0);
        for (i, &a) in sorted.iter().enumerate() {
            let next = if i + 1 < sorted.len() {
                sorted[i + 1]
            } else {
                sorted[0] + 2.0 * PI
            };
            if next - a > best.1 {
                best = (a, next - a);
            }
        }
        chosen.push((best.0 + best.1 / 2.0).rem_euclid(2.0 * PI));
    }
    chosen
}

/// Largest arc-length distance from any point of the unit circle to `angles`.
pub fn circle_covering_radius(angles: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = angles.iter().map(|a| a.rem_euclid(2.0 * PI)).collect();
    sorted.sort_by(f64::total_cmp);
    let mut gap: f64 = sorted[0] + 2.0 * PI - sorted[sorted.len() - 1];
    for w in sorted.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap / 2.0
}

/// Precomputed latent stream for one configuration.
pub struct Generator {
    config: ProcessConfig,
    /// `ζ_{1-q}, ..., ζ_T` with `q = ma_weights.len() - 1`.
    innovations: Vec<f64>,
}

struct TimeDraws {
    angles: Vec<f64>,
    noise: Vec<[f64; 2]>,
}

impl Generator {
    pub fn new(config: ProcessConfig) -> Result<Self> {
        config.validate()?;
        let lag = config.ma_weights.len().saturating_sub(1);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let innovations = (0..config.length + lag)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Ok(Self {
            config,
            innovations,
        })
    }

    pub fn config(&self) -> &ProcessConfig {
        &self.config
    }

    /// `Σ_j w_j ζ_{t-j}` for 1-based `t`.
    pub fn moving_average(&self, t: usize) -> f64 {
        let lag = self.config.ma_weights.len().saturating_sub(1);
        self.config
            .ma_weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * self.innovations[t - 1 + lag - j])
            .sum()
    }

    fn time_draws(&self, t: usize) -> TimeDraws {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(t as u64);
        let angles = sample_evaluation_grid(self.config.points, self.config.sampling, &mut rng);
        let noise = if self.config.noise_sd > 0.0 {
            let normal = Normal::new(0.0, self.config.noise_sd).expect("validated noise sd");
            (0..self.config.points)
                .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
                .collect()
        } else {
            vec![[0.0, 0.0]; self.config.points]
        };
        TimeDraws { angles, noise }
    }

    /// Last time index before the change.
    pub fn change_index(&self) -> usize {
        (self.config.change_u * self.config.length as f64).floor() as usize
    }

    /// The cloud at time `t` (1-based) with the deterministic dynamics
    /// evaluated at rescaled time `u`.
    pub fn auxiliary_cloud(&self, t: usize, u: f64) -> Result<PointCloud> {
        if t == 0 || t > self.config.length {
            return Err(Error::input(format!("time index {t} out of range")));
        }
        let c = &self.config;
        let draws = self.time_draws(t);
        let ma = self.moving_average(t);
        let (radius, rotation) = match c.scenario {
            Scenario::StationaryCircle | Scenario::AbruptBifurcation => (c.base_radius + ma, 0.0),
            Scenario::GradualDrift => (c.base_radius + ma + c.magnitude * u, 0.0),
            Scenario::DependentShift => (c.base_radius, ma),
        };
        let split = c.scenario == Scenario::AbruptBifurcation
            && c.magnitude > 0.0
            && u > self.change_index() as f64 / c.length as f64;
        let points = draws
            .angles
            .iter()
            .zip(&draws.noise)
            .enumerate()
            .map(|(i, (&theta, e))| {
                let a = theta + rotation;
                let (r, cx) = if split {
                    let side = if i % 2 == 0 { -0.5 } else { 0.5 };
                    (radius / 2.0, side * c.magnitude)
                } else {
                    (radius, 0.0)
                };
                vec![cx + r * a.cos() + e[0], r * a.sin() + e[1]]
            })
            .collect();
        PointCloud::new(t, points)
    }

    pub fn cloud(&self, t: usize) -> Result<PointCloud> {
        self.auxiliary_cloud(t, t as f64 / self.config.length as f64)
    }

    pub fn series(&self) -> Result<Vec<PointCloud>> {
        (1..=self.config.length).map(|t| self.cloud(t)).collect()
    }
}

/// The full series for `config`; deterministic in the seed.
pub fn generate_series(config: &ProcessConfig) -> Result<Vec<PointCloud>> {
    Generator::new(config.clone())?.series()
}
