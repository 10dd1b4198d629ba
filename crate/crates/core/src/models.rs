//! Problem definitions: how raw measurements map to the statistic `D`.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::{cell_key, map_indexed, replicate_rng, Execution};
use crate::proposition::Proposition;

/// `Y ~ N_k(μ, σ² I)` with known σ and parameter of interest `θ = ‖μ‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormMean {
    k: u32,
    sigma: f64,
}

impl NormMean {
    pub fn new(k: u32, sigma: f64) -> Result<Self> {
        if k < 1 {
            return Err(invalid("dimension k must be at least 1"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        Ok(Self { k, sigma })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `d²/σ²`, the argument of the chi-square laws.
    pub(crate) fn scaled_sq(&self, d: f64) -> f64 {
        (d / self.sigma).powi(2)
    }

    /// One draw of `D` at `θ`: `D²/σ² = (Z + θ/σ)² + χ²_{k−1}`.
    pub(crate) fn draw_d<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        let shifted = z + theta / self.sigma;
        let mut x = shifted * shifted;
        if self.k > 1 {
            x += ChiSquared::new((self.k - 1) as f64).expect("k - 1 >= 1").sample(rng);
        }
        self.sigma * x.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    NormMean(NormMean),
    /// `Y ~ N(θ, θ²)` with `θ > 0`.
    CurvedNormal,
}

/// A model together with an optional combined radius `R` for collision
/// hypotheses `θ ≤ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    radius: Option<f64>,
}

impl ModelConfig {
    pub fn norm_mean(k: u32, sigma: f64) -> Result<Self> {
        Ok(Self { kind: ModelKind::NormMean(NormMean::new(k, sigma)?), radius: None })
    }

    pub fn curved_normal() -> Self {
        Self { kind: ModelKind::CurvedNormal, radius: None }
    }

    pub fn with_radius(mut self, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(invalid(format!("radius must be finite and nonnegative, got {r}")));
        }
        self.radius = Some(r);
        Ok(self)
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// `H₀ = [0, R]` when a radius is set.
    pub fn collision_hypothesis(&self) -> Option<Proposition> {
        self.radius.map(|r| Proposition::at_most(r).expect("radius validated"))
    }

    pub fn as_norm_mean(&self) -> Option<NormMean> {
        match self.kind {
            ModelKind::NormMean(m) => Some(m),
            ModelKind::CurvedNormal => None,
        }
    }

    /// Length of a raw observation vector.
    pub fn dimension(&self) -> usize {
        match self.kind {
            ModelKind::NormMean(m) => m.k as usize,
            ModelKind::CurvedNormal => 1,
        }
    }
}

impl From<NormMean> for ModelConfig {
    fn from(m: NormMean) -> Self {
        Self { kind: ModelKind::NormMean(m), radius: None }
    }
}

/// Raw measurements and the derived statistic `d = ‖y‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub y: Vec<f64>,
    pub d: f64,
}

pub fn observe(y: &[f64], cfg: &ModelConfig) -> Result<Observation> {
    let expected = cfg.dimension();
    if y.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: y.len() });
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(invalid(format!("observation contains a non-finite value {bad}")));
    }
    let d = match cfg.kind {
        ModelKind::NormMean(_) => y.iter().map(|v| v * v).sum::<f64>().sqrt(),
        ModelKind::CurvedNormal => y[0].abs(),
    };
    Ok(Observation { y: y.to_vec(), d })
}

fn check_theta(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("theta must be finite and nonnegative, got {theta}")))
    }
}

/// `n` replicates at `θ`. For the norm-mean model only `D` is drawn and `y`
/// is its representative `(d, 0, …, 0)`; the law of `D` depends on `μ` only
/// through `θ`.
pub fn sample_data(theta: f64, cfg: &ModelConfig, n: u64, seed: u64) -> Result<Vec<Observation>> {
    check_theta(theta)?;
    match cfg.kind {
        ModelKind::NormMean(m) => {
            let k = m.k as usize;
            Ok(sample_d(theta, &m, n, seed, Execution::default())?
                .into_iter()
                .map(|d| {
                    let mut y = vec![0.0; k];
                    y[0] = d;
                    Observation { y, d }
                })
                .collect())
        }
        ModelKind::CurvedNormal => {
            if theta == 0.0 {
                return Err(invalid("the curved normal model is degenerate at theta = 0"));
            }
            let key = cell_key(seed, 0);
            Ok(map_indexed(Execution::default(), n, |i| {
                let z: f64 = StandardNormal.sample(&mut replicate_rng(key, i));
                let y = theta + theta * z;
                Observation { y: vec![y], d: y.abs() }
            }))
        }
    }
}

/// `n` draws of `D` at `θ`, one chi-square draw per replicate.
pub fn sample_d(theta: f64, model: &NormMean, n: u64, seed: u64, exec: Execution) -> Result<Vec<f64>> {
    check_theta(theta)?;
    let key = cell_key(seed, 0);
    Ok(map_indexed(exec, n, |i| model.draw_d(theta, &mut replicate_rng(key, i))))
}

/// `n` raw vectors `y = (θ, 0, …, 0) + σZ`.
pub fn sample_y(theta: f64, model: &NormMean, n: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_theta(theta)?;
    let key = cell_key(seed, 1);
    Ok(map_indexed(Execution::default(), n, |i| {
        let mut rng = replicate_rng(key, i);
        (0..model.k)
            .map(|j| {
                let z: f64 = StandardNormal.sample(&mut rng);
                let mu = if j == 0 { theta } else { 0.0 };
                mu + model.sigma * z
            })
            .collect()
    }))
}
