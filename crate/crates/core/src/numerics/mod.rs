//! Central and noncentral chi-square distribution functions, the quantile
//! `q_α(θ)` of `D` and its clamped inverse.
//!
//! `q_α(θ)` is the `(1 − α)` quantile: `P_θ(D ≤ q_α(θ)) = 1 − α`, where
//! `D²/σ² ~ χ²_k(θ²/σ²)`.

pub(crate) mod gamma;
pub(crate) mod series;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::roots::{brent, expand_upper, Tolerance};
use series::{gamma_mixture_cdf, gamma_mixture_density, Poisson};

/// Upper end of an interval or inverse quantile that may be unbounded.
///
/// Keeps `q₁⁻¹(d) = ∞` out of floating-point arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    /// `true` when `x` lies strictly below the bound.
    pub fn exceeds(&self, x: f64) -> bool {
        match *self {
            Bound::Finite(v) => x < v,
            Bound::Unbounded => true,
        }
    }

    /// Lossy view for plotting and serialization.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Unbounded => f.write_str("inf"),
        }
    }
}

/// Degrees of freedom and noncentrality of `χ²_df(ncp)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSqParams {
    df: u32,
    ncp: f64,
}

impl ChiSqParams {
    pub fn new(df: u32, ncp: f64) -> Result<Self> {
        if df < 1 {
            return Err(invalid("degrees of freedom must be at least 1"));
        }
        if !(ncp >= 0.0) || !ncp.is_finite() {
            return Err(invalid(format!("noncentrality must be finite and nonnegative, got {ncp}")));
        }
        Ok(Self { df, ncp })
    }

    pub fn central(df: u32) -> Result<Self> {
        Self::new(df, 0.0)
    }

    pub fn df(&self) -> u32 {
        self.df
    }

    pub fn ncp(&self) -> f64 {
        self.ncp
    }
}

/// Arguments of [`d_quantile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileQuery {
    /// Upper-tail level, strictly inside (0, 1).
    pub alpha: f64,
    pub theta: f64,
    pub sigma: f64,
    pub k: u32,
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("chi-square argument must be nonnegative, got {x}")))
    }
}

/// `P(χ²_df(ncp) ≤ x)`.
pub fn noncentral_chisq_cdf(x: f64, p: ChiSqParams) -> Result<f64> {
    check_x(x)?;
    Ok(cdf_sf(x, p.df, p.ncp).0)
}

/// `P(χ²_df(ncp) > x)`, computed directly rather than as `1 − cdf`.
pub fn noncentral_chisq_sf(x: f64, p: ChiSqParams) -> Result<f64> {
    check_x(x)?;
    Ok(cdf_sf(x, p.df, p.ncp).1)
}

/// Density of `χ²_df(ncp)` at `x`. Infinite at `x = 0` when `df = 1`.
pub fn noncentral_chisq_pdf(x: f64, p: ChiSqParams) -> Result<f64> {
    check_x(x)?;
    Ok(pdf(x, p.df, p.ncp))
}

/// Unchecked `(cdf, sf)` pair.
pub(crate) fn cdf_sf(x: f64, df: u32, ncp: f64) -> (f64, f64) {
    gamma_mixture_cdf(&Poisson { mean: 0.5 * ncp }, 0.5 * df as f64, 0.5 * x)
}

/// Unchecked density.
pub(crate) fn pdf(x: f64, df: u32, ncp: f64) -> f64 {
    if x == 0.0 {
        return match df {
            1 => f64::INFINITY,
            2 => 0.5 * (-0.5 * ncp).exp(),
            _ => 0.0,
        };
    }
    0.5 * gamma_mixture_density(&Poisson { mean: 0.5 * ncp }, 0.5 * df as f64, 0.5 * x)
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    // Φ(−|z|) = ½ Q(½, z²/2)
    if z.is_nan() {
        return f64::NAN;
    }
    let (p, q) = gamma::regularized_gamma(0.5, 0.5 * z * z);
    if z < 0.0 {
        0.5 * q
    } else {
        0.5 + 0.5 * p
    }
}

fn check_scale(sigma: f64, k: u32) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
    }
    if k < 1 {
        return Err(invalid("dimension k must be at least 1"));
    }
    Ok(())
}

const RESIDUAL_TOL: f64 = 1e-10;

/// `q_α(θ)`: the value with `P_θ(D ≤ q) = 1 − α`.
pub fn d_quantile(q: QuantileQuery) -> Result<f64> {
    let QuantileQuery { alpha, theta, sigma, k } = q;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(invalid(format!("theta must be finite and nonnegative, got {theta}")));
    }
    check_scale(sigma, k)?;
    let ncp = (theta / sigma).powi(2);

    // Residual in whichever tail is smaller keeps the root well conditioned.
    let residual = |x: f64| {
        let (cdf, sf) = cdf_sf(x, k, ncp);
        if alpha < 0.5 {
            alpha - sf
        } else {
            cdf - (1.0 - alpha)
        }
    };
    let mean = k as f64 + ncp;
    let sd = (2.0 * (k as f64 + 2.0 * ncp)).sqrt();
    let hi = expand_upper(residual, 0.0, mean + 10.0 * sd + 10.0, 200)?;
    let x = brent(residual, 0.0, hi, Tolerance { xtol: 1e-15, ..Tolerance::default() })?;
    let r = residual(x);
    if r.abs() > RESIDUAL_TOL {
        return Err(Error::NumericalFailure(format!(
            "quantile residual {r:e} exceeds {RESIDUAL_TOL:e} (alpha={alpha}, theta={theta})"
        )));
    }
    Ok(sigma * x.sqrt())
}

/// `q_α⁻¹(d)`, clamped to 0 below the range `[q_α(0), ∞)`.
///
/// `α = 0` gives 0 and `α = 1` gives [`Bound::Unbounded`].
pub fn d_quantile_inverse(alpha: f64, d: f64, sigma: f64, k: u32) -> Result<Bound> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if !(d >= 0.0) || !d.is_finite() {
        return Err(invalid(format!("d must be finite and nonnegative, got {d}")));
    }
    check_scale(sigma, k)?;
    if alpha == 0.0 {
        return Ok(Bound::Finite(0.0));
    }
    if alpha == 1.0 {
        return Ok(Bound::Unbounded);
    }
    let x = (d / sigma).powi(2);
    // d <= q_α(0)  <=>  P_0(D ≤ d) <= 1 − α
    if cdf_sf(x, k, 0.0).0 <= 1.0 - alpha {
        return Ok(Bound::Finite(0.0));
    }

    // P_θ(D ≤ d) decreases in θ; work in t = θ/σ.
    let residual = |t: f64| {
        let (cdf, sf) = cdf_sf(x, k, t * t);
        if alpha < 0.5 {
            alpha - sf
        } else {
            cdf - (1.0 - alpha)
        }
    };
    let hi = expand_upper(residual, 0.0, d / sigma + 10.0, 200)?;
    let t = brent(residual, 0.0, hi, Tolerance { xtol: 1e-14, ..Tolerance::default() })?;
    let r = residual(t);
    if r.abs() > RESIDUAL_TOL {
        return Err(Error::NumericalFailure(format!(
            "inverse-quantile residual {r:e} exceeds {RESIDUAL_TOL:e} (alpha={alpha}, d={d})"
        )));
    }
    Ok(Bound::Finite(sigma * t))
}
