//! The confidence distribution `C(θ;d) = P_θ(D ≥ d)` for the norm-mean
//! model, its atom at the boundary, set confidences, and the point-mass
//! detector for general one-parameter quantile families.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::models::{NormMean, Observation};
use crate::numerics::{self, cdf_sf, normal_cdf, pdf, QuantileQuery};
use crate::proposition::Proposition;
use crate::roots::{brent, Tolerance};

/// Rounding slack tolerated below `θ = 0`.
const NEGATIVE_SLACK: f64 = 1e-12;

/// Validates a point of `Θ = [0, ∞)`, snapping tiny negative round-off to 0.
pub(crate) fn theta_arg(theta: f64) -> Result<f64> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(theta)
    } else if (-NEGATIVE_SLACK..0.0).contains(&theta) {
        log::warn!("theta = {theta:e} is below 0 by round-off; using 0");
        Ok(0.0)
    } else {
        Err(invalid(format!("theta must lie in [0, inf), got {theta}")))
    }
}

pub(crate) fn d_arg(d: f64) -> Result<f64> {
    if d >= 0.0 && d.is_finite() {
        Ok(d)
    } else {
        Err(invalid(format!("d must be finite and nonnegative, got {d}")))
    }
}

/// `C(θ;d)` for a fixed observation, with the atom `M(d) = C({0};d)` kept
/// as an explicit scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceCurve {
    model: NormMean,
    d: f64,
    point_mass: f64,
}

impl ConfidenceCurve {
    pub fn new(model: NormMean, d: f64) -> Result<Self> {
        let d = d_arg(d)?;
        let point_mass = cdf_sf(model.scaled_sq(d), model.k(), 0.0).1;
        Ok(Self { model, d, point_mass })
    }

    pub fn model(&self) -> NormMean {
        self.model
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `M(d) = P_0(D ≥ d)`.
    pub fn point_mass(&self) -> f64 {
        self.point_mass
    }

    pub(crate) fn cdf(&self, theta: f64) -> f64 {
        if theta == 0.0 {
            return self.point_mass;
        }
        let ncp = (theta / self.model.sigma()).powi(2);
        cdf_sf(self.model.scaled_sq(self.d), self.model.k(), ncp).1
    }

    /// `C(θ;d)`.
    pub fn eval(&self, theta: f64) -> Result<f64> {
        Ok(self.cdf(theta_arg(theta)?))
    }

    /// Density `c₊(θ;d)` of the continuous part, `θ > 0`.
    pub fn density(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(invalid(format!(
                "the density is defined for theta > 0 (query the atom with point_mass), got {theta}"
            )));
        }
        let s2 = self.model.sigma().powi(2);
        let ncp = theta * theta / s2;
        Ok(2.0 * theta / s2 * pdf(self.model.scaled_sq(self.d), self.model.k() + 2, ncp))
    }

    /// `C(A;d)`. The atom counts iff `0 ∈ A`.
    pub fn confidence_of_set(&self, a: &Proposition) -> f64 {
        a.mass(|t| self.cdf(t))
    }
}

/// Quantiles `q_α(θ)` of a one-parameter model for a scalar statistic.
pub trait QuantileFamily {
    /// Endpoints of `Θ`; either may be infinite.
    fn parameter_range(&self) -> (f64, f64);

    /// Endpoints of the sample space `Ω_D`; either may be infinite.
    fn support(&self) -> (f64, f64);

    /// The `(1 − α)` quantile of `D` under `θ`.
    fn quantile(&self, alpha: f64, theta: f64) -> Result<f64>;
}

impl QuantileFamily for NormMean {
    fn parameter_range(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn quantile(&self, alpha: f64, theta: f64) -> Result<f64> {
        numerics::d_quantile(QuantileQuery { alpha, theta, sigma: self.sigma(), k: self.k() })
    }
}

/// `Y ~ N(θ, θ²)`, observed either raw or through `D = |Y|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvedNormal {
    pub use_abs: bool,
}

fn normal_quantile(p: f64) -> Result<f64> {
    brent(|z| normal_cdf(z) - p, -40.0, 40.0, Tolerance::default())
}

impl QuantileFamily for CurvedNormal {
    fn parameter_range(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn support(&self) -> (f64, f64) {
        if self.use_abs {
            (0.0, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    }

    fn quantile(&self, alpha: f64, theta: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(theta > 0.0) {
            return Err(invalid(format!("theta must be positive, got {theta}")));
        }
        // D/θ has a θ-free law, so q_α(θ) = θ c_α
        let c = if self.use_abs {
            // P(|N(1,1)| ≤ c) = Φ(c − 1) − Φ(−c − 1)
            brent(|c| normal_cdf(c - 1.0) - normal_cdf(-c - 1.0) - (1.0 - alpha), 0.0, 50.0, Tolerance::default())?
        } else {
            1.0 + normal_quantile(1.0 - alpha)?
        };
        Ok(theta * c)
    }
}

/// `C(θ;y) = 1 − Φ((y − θ)/θ)` from raw `y`, or the proper CD
/// `1 − Φ((d − θ)/θ) + Φ((−d − θ)/θ)` from `d = |y|`.
pub fn curved_cd(theta: f64, obs: &Observation, use_abs: bool) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(invalid(format!("the curved model needs theta > 0, got {theta}")));
    }
    if theta.is_infinite() {
        return Ok(if use_abs { 1.0 } else { 1.0 - normal_cdf(-1.0) });
    }
    if use_abs {
        let d = obs.d;
        Ok(1.0 - normal_cdf((d - theta) / theta) + normal_cdf((-d - theta) / theta))
    } else {
        let y = *obs.y.first().ok_or_else(|| invalid("raw curved CD needs a scalar observation"))?;
        Ok(1.0 - normal_cdf((y - theta) / theta))
    }
}

/// Which end of `Θ` a probe approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThetaEnd {
    Lower,
    Upper,
}

/// Limit of `q_α(θ)` as `θ` approaches one end of `Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryLimit {
    pub alpha: f64,
    pub end: ThetaEnd,
    /// Estimated limit; infinite when the probes diverge.
    pub limit: f64,
    /// Whether the limit lies on the boundary of `Ω_D`.
    pub on_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointMassDiagnostic {
    pub has_point_mass: bool,
    /// First probe whose limit is interior to `Ω_D`.
    pub offending: Option<BoundaryLimit>,
    pub limits: Vec<BoundaryLimit>,
}

const PROBE_ALPHAS: [f64; 3] = [0.05, 0.5, 0.95];
const PROBE_STEPS: i32 = 8;
const INTERIOR_TOL: f64 = 1e-6;
// quantiles beyond this size that still grow geometrically per decade
// of θ are taken to diverge
const DIVERGENCE: f64 = 1e3;
const GROWTH: f64 = 5.0;

fn probe_point(end_value: f64, end: ThetaEnd, j: i32) -> f64 {
    let step = 10f64.powi(j);
    match (end, end_value.is_finite()) {
        (ThetaEnd::Lower, true) => end_value + 1.0 / step,
        (ThetaEnd::Upper, true) => end_value - 1.0 / step,
        (ThetaEnd::Lower, false) => -step,
        (ThetaEnd::Upper, false) => step,
    }
}

/// Checks whether the CD built from `family` can put mass on an end of `Θ`:
/// it does iff some boundary limit of `q_α(θ)` is interior to `Ω_D`.
pub fn has_point_mass<F: QuantileFamily + ?Sized>(family: &F) -> Result<PointMassDiagnostic> {
    let (lo, hi) = family.parameter_range();
    let (s_lo, s_hi) = family.support();
    let mut limits = Vec::new();
    for (end, end_value) in [(ThetaEnd::Lower, lo), (ThetaEnd::Upper, hi)] {
        for &alpha in &PROBE_ALPHAS {
            let mut prev = f64::NAN;
            let mut limit = f64::NAN;
            for j in 1..=PROBE_STEPS {
                let q = family.quantile(alpha, probe_point(end_value, end, j))?;
                if j > 1 && q.abs() > DIVERGENCE && q.abs() >= GROWTH * prev.abs() {
                    limit = f64::INFINITY.copysign(q);
                    break;
                }
                prev = q;
                limit = q;
            }
            let on_boundary = if limit.is_infinite() {
                (limit > 0.0 && s_hi.is_infinite()) || (limit < 0.0 && s_lo.is_infinite())
            } else {
                (limit - s_lo).abs() <= INTERIOR_TOL || (limit - s_hi).abs() <= INTERIOR_TOL
            };
            limits.push(BoundaryLimit { alpha, end, limit, on_boundary });
        }
    }
    let offending = limits.iter().find(|l| !l.on_boundary).copied();
    Ok(PointMassDiagnostic { has_point_mass: offending.is_some(), offending, limits })
}
