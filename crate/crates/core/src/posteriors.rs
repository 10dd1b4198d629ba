//! Posterior-type competitors of the CD: the uniform-prior marginal
//! posterior (equivalently the integrated CD), reference posteriors, and the
//! fiducial sampler for the two-dimensional case.
//!
//! All curves work internally in `t = θ/σ`; the posterior of `t` depends on
//! the data only through `x = d²/σ²`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cd::{d_arg, theta_arg};
use crate::error::{invalid, Error, Result};
use crate::exec::{cell_key, map_indexed, replicate_rng, Execution};
use crate::models::{NormMean, Observation};
use crate::numerics::series::{gamma_mixture_cdf, gamma_mixture_density, Reference};
use crate::numerics::{cdf_sf, pdf, Bound};
use crate::proposition::Proposition;
use crate::quadrature::{simpson_cumulative, GaussLegendre};
use crate::roots::{brent, expand_upper, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosteriorMethod {
    /// Uniform prior on `μ`, marginalized to `θ`.
    Uniform,
    /// One-parameter reference posterior for the marginal model of `D`.
    Reference,
}

/// Prior on `θ` used by the reference posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ReferencePrior {
    /// `π(θ) ∝ 1`.
    #[default]
    Flat,
    /// `π(θ) ∝ √I(θ)` with `I` the Fisher information of `D`.
    MarginalJeffreys,
}

#[derive(Debug, Clone)]
enum Repr {
    Uniform,
    FlatSeries(Reference),
    Grid(Arc<GridPosterior>),
}

/// Posterior CDF and density of `θ` given `d`. There is never an atom at 0.
#[derive(Debug, Clone)]
pub struct PosteriorCurve {
    method: PosteriorMethod,
    model: NormMean,
    d: f64,
    x: f64,
    repr: Repr,
}

impl PosteriorCurve {
    /// `G(θ;d) = F_k(θ²/σ²; d²/σ²)`.
    pub fn uniform(model: NormMean, d: f64) -> Result<Self> {
        let d = d_arg(d)?;
        Ok(Self { method: PosteriorMethod::Uniform, model, d, x: model.scaled_sq(d), repr: Repr::Uniform })
    }

    /// Flat-prior reference posterior, evaluated as an exact gamma mixture.
    pub fn reference(model: NormMean, d: f64) -> Result<Self> {
        let d = d_arg(d)?;
        let x = model.scaled_sq(d);
        let weights = Reference { half_x: 0.5 * x, half_k: 0.5 * model.k() as f64 };
        Ok(Self { method: PosteriorMethod::Reference, model, d, x, repr: Repr::FlatSeries(weights) })
    }

    pub fn reference_with(model: NormMean, d: f64, prior: ReferencePrior) -> Result<Self> {
        match prior {
            ReferencePrior::Flat => Self::reference(model, d),
            ReferencePrior::MarginalJeffreys => Self::reference_on_grid(model, d, prior),
        }
    }

    /// Reference posterior by normalized quadrature on a lattice in `t`.
    pub fn reference_on_grid(model: NormMean, d: f64, prior: ReferencePrior) -> Result<Self> {
        let d = d_arg(d)?;
        let x = model.scaled_sq(d);
        let grid = GridPosterior::build(model.k(), x, prior, true)?;
        Ok(Self { method: PosteriorMethod::Reference, model, d, x, repr: Repr::Grid(Arc::new(grid)) })
    }

    pub fn method(&self) -> PosteriorMethod {
        self.method
    }

    pub fn model(&self) -> NormMean {
        self.model
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// CDF in `t = θ/σ`.
    pub(crate) fn cdf_t(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.repr {
            Repr::Uniform => cdf_sf(t * t, self.model.k(), self.x).0,
            Repr::FlatSeries(w) => gamma_mixture_cdf(w, 0.5, 0.5 * t * t).0,
            Repr::Grid(g) => g.cdf(t),
        }
    }

    fn density_t(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Uniform => {
                let k = self.model.k();
                if t == 0.0 {
                    // (2t) f_k(t²) → 2 e^{−x/2} / √(2π) for k = 1, else 0
                    return if k == 1 { 2.0 * (-0.5 * self.x).exp() / (2.0 * std::f64::consts::PI).sqrt() } else { 0.0 };
                }
                2.0 * t * pdf(t * t, k, self.x)
            }
            Repr::FlatSeries(w) => {
                // density of t is t · Σ ω_j g(j + ½, t²/2); finite at t = 0
                let t = t.max(1e-150);
                t * gamma_mixture_density(w, 0.5, 0.5 * t * t)
            }
            Repr::Grid(g) => g.density(t),
        }
    }

    /// Posterior `P(θ ≤ theta | d)`.
    pub fn cdf(&self, theta: f64) -> Result<f64> {
        let theta = theta_arg(theta)?;
        Ok(self.cdf_t(theta / self.model.sigma()))
    }

    pub fn density(&self, theta: f64) -> Result<f64> {
        let theta = theta_arg(theta)?;
        Ok(self.density_t(theta / self.model.sigma()) / self.model.sigma())
    }

    /// Smallest `θ` with `P(θ' ≤ θ | d) ≥ p`; `p = 1` gives [`Bound::Unbounded`].
    pub fn quantile(&self, p: f64) -> Result<Bound> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("probability level must lie in [0, 1], got {p}")));
        }
        if p == 0.0 {
            return Ok(Bound::Finite(0.0));
        }
        if p == 1.0 {
            return Ok(Bound::Unbounded);
        }
        let f = |t: f64| self.cdf_t(t) - p;
        let hi = expand_upper(f, 0.0, self.x.sqrt() + 10.0, 200)?;
        let t = brent(f, 0.0, hi, Tolerance { xtol: 1e-13, ..Tolerance::default() })?;
        Ok(Bound::Finite(t * self.model.sigma()))
    }

    pub fn median(&self) -> Result<f64> {
        Ok(self.quantile(0.5)?.finite().expect("interior level"))
    }

    /// Posterior probability of `A`; `{0}` and other points get 0.
    pub fn prob_of_set(&self, a: &Proposition) -> f64 {
        let s = self.model.sigma();
        a.mass(|theta| self.cdf_t(theta / s))
    }
}

/// `G(θ;d)` of the uniform-prior posterior.
pub fn up_cdf(theta: f64, d: f64, sigma: f64, k: u32) -> Result<f64> {
    PosteriorCurve::uniform(NormMean::new(k, sigma)?, d)?.cdf(theta)
}

/// Density `g(θ;d)` of the uniform-prior posterior.
pub fn up_density(theta: f64, d: f64, sigma: f64, k: u32) -> Result<f64> {
    PosteriorCurve::uniform(NormMean::new(k, sigma)?, d)?.density(theta)
}

/// CDF of the default (flat-prior) reference posterior.
pub fn rp_posterior(theta: f64, d: f64, sigma: f64, k: u32) -> Result<f64> {
    PosteriorCurve::reference(NormMean::new(k, sigma)?, d)?.cdf(theta)
}

/// Draws from the generalized fiducial distribution of `θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfdSample {
    pub values: Vec<f64>,
    pub seed: u64,
    pub n: u64,
}

/// Fiducial draws `σ √χ²₂(d²/σ²)` for the two-dimensional model.
pub fn gfd_sample(obs: &Observation, model: &NormMean, n: u64, seed: u64) -> Result<GfdSample> {
    if model.k() != 2 {
        return Err(invalid(format!("the fiducial mechanism is defined for k = 2, got k = {}", model.k())));
    }
    if n == 0 {
        return Err(invalid("need at least one fiducial draw"));
    }
    let d = d_arg(obs.d)?;
    let key = cell_key(seed, 0x6fd);
    let values = map_indexed(Execution::default(), n, |i| model.draw_d(d, &mut replicate_rng(key, i)));
    Ok(GfdSample { values, seed, n })
}

// ---------------------------------------------------------------------------
// Grid route

/// Lattice spacing in `t`.
const GRID_H: f64 = 1.0 / 256.0;
const TAIL_TOL: f64 = 1e-8;
const RICHARDSON_TOL: f64 = 1e-9;

#[derive(Debug)]
struct GridPosterior {
    /// Spacing between the even nodes carrying `cdf` and `dens`.
    step: f64,
    cdf: Vec<f64>,
    dens: Vec<f64>,
}

impl GridPosterior {
    fn build(k: u32, x: f64, prior: ReferencePrior, cached_prior: bool) -> Result<Self> {
        let likelihood = |t: f64| {
            if x == 0.0 {
                (-0.5 * t * t).exp()
            } else {
                pdf(x, k, t * t)
            }
        };
        let mut t_max = (x.sqrt() + 12.0).ceil();
        loop {
            let table = match prior {
                ReferencePrior::Flat => None,
                ReferencePrior::MarginalJeffreys => Some(if cached_prior {
                    JeffreysTable::cached(k, t_max + 8.0)
                } else {
                    Arc::new(JeffreysTable::build(k, t_max + 8.0))
                }),
            };
            let weight = |t: f64| table.as_ref().map_or(1.0, |tab| tab.sqrt_info(t));
            let n = (t_max / GRID_H).round() as usize;
            let values: Vec<f64> = (0..=n).map(|i| {
                let t = i as f64 * GRID_H;
                weight(t) * likelihood(t)
            }).collect();
            let cum = simpson_cumulative(&values, GRID_H);
            let total = *cum.last().expect("non-empty");
            if !(total > 1e-300) {
                return Err(Error::NumericalFailure(format!(
                    "posterior normalization mass {total:e} is too small (k={k}, x={x})"
                )));
            }
            // tail beyond t_max, on a short extension
            let ext: Vec<f64> = (0..=2048).map(|i| {
                let t = t_max + i as f64 * GRID_H;
                weight(t) * likelihood(t)
            }).collect();
            let tail = *simpson_cumulative(&ext, GRID_H).last().expect("non-empty");
            if tail > TAIL_TOL * total {
                t_max += 8.0;
                continue;
            }
            // Richardson: halve the node count
            let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
            if coarse.len() % 2 == 1 && coarse.len() >= 3 {
                let coarse_total = *simpson_cumulative(&coarse, 2.0 * GRID_H).last().expect("non-empty");
                let err = (total - coarse_total).abs() / 15.0;
                if err > RICHARDSON_TOL * total {
                    return Err(Error::NumericalFailure(format!(
                        "posterior quadrature failed the Richardson check: estimated error {err:e}"
                    )));
                }
            }
            let cdf = cum.iter().map(|c| c / total).collect();
            let dens = values.iter().step_by(2).map(|v| v / total).collect();
            return Ok(Self { step: 2.0 * GRID_H, cdf, dens });
        }
    }

    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let pos = t / self.step;
        let i = pos.floor() as usize;
        if i + 1 >= self.cdf.len() {
            return None;
        }
        Some((i, pos - i as f64))
    }

    fn cdf(&self, t: f64) -> f64 {
        let Some((i, u)) = self.locate(t) else { return 1.0 };
        // cubic Hermite with the density as slope
        let (h00, h10, h01, h11) = hermite(u);
        let v = h00 * self.cdf[i] + h10 * self.step * self.dens[i] + h01 * self.cdf[i + 1] + h11 * self.step * self.dens[i + 1];
        v.clamp(0.0, 1.0)
    }

    fn density(&self, t: f64) -> f64 {
        let Some((i, u)) = self.locate(t) else { return 0.0 };
        ((1.0 - u) * self.dens[i] + u * self.dens[i + 1]).max(0.0)
    }
}

fn hermite(u: f64) -> (f64, f64, f64, f64) {
    let u2 = u * u;
    let u3 = u2 * u;
    (2.0 * u3 - 3.0 * u2 + 1.0, u3 - 2.0 * u2 + u, -2.0 * u3 + 3.0 * u2, u3 - u2)
}

/// `√I(t)` for the marginal model `X = D²/σ² ~ χ²_k(t²)`, tabulated on a
/// uniform lattice. `I` is σ-free in `t` units, so one table serves every σ.
#[derive(Debug)]
pub(crate) struct JeffreysTable {
    step: f64,
    values: Vec<f64>,
}

const JEFFREYS_STEP: f64 = 1.0 / 16.0;

impl JeffreysTable {
    fn build(k: u32, t_max: f64) -> Self {
        let n = (t_max / JEFFREYS_STEP).ceil() as usize + 2;
        let values = (0..=n).map(|i| fisher_information(k, i as f64 * JEFFREYS_STEP).sqrt()).collect();
        Self { step: JEFFREYS_STEP, values }
    }

    fn t_max(&self) -> f64 {
        (self.values.len() - 3) as f64 * self.step
    }

    /// Shared per-k table covering at least `[0, t_max]`.
    fn cached(k: u32, t_max: f64) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<JeffreysTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = map.get(&k) {
            if t.t_max() >= t_max {
                return Arc::clone(t);
            }
        }
        let t = Arc::new(Self::build(k, (t_max / 16.0).ceil() * 16.0));
        map.insert(k, Arc::clone(&t));
        t
    }

    /// Catmull–Rom interpolation of `√I`.
    fn sqrt_info(&self, t: f64) -> f64 {
        let pos = t / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 3);
        let u = pos - i as f64;
        let p0 = if i == 0 { -self.values[1] } else { self.values[i - 1] };
        let (p1, p2, p3) = (self.values[i], self.values[i + 1], self.values[i + 2]);
        let v = p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + u * (3.0 * (p1 - p2) + p3 - p0)));
        v.max(0.0)
    }
}

/// `I(t) = E[(∂_t log f_k(X; t²))²]` with the score
/// `t (f_{k+2}(X; t²) / f_k(X; t²) − 1)`, integrated over `X = u²`.
pub(crate) fn fisher_information(k: u32, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let ncp = t * t;
    let mean = k as f64 + ncp;
    let sd = (2.0 * (k as f64 + 2.0 * ncp)).sqrt();
    let lo = (mean - 14.0 * sd).max(0.0).sqrt();
    let hi = (mean + 14.0 * sd).sqrt();
    let integrand = |u: f64| {
        let x = u * u;
        let fk = pdf(x, k, ncp);
        if !(fk > 0.0) || !fk.is_finite() {
            return 0.0;
        }
        let r = pdf(x, k + 2, ncp) / fk - 1.0;
        2.0 * u * r * r * fk
    };
    t * t * GaussLegendre::standard().composite(integrand, lo, hi, 24)
}
