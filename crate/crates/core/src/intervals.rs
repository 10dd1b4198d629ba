//! Confidence-interval procedures `[θ_L, θ_U)` and `[θ_L, θ_U]` with
//! `θ_L = q⁻¹_{1−α−β}(d)` and `θ_U = q⁻¹_{1−β}(d)`.

use serde::{Deserialize, Serialize};

use crate::cd::{d_arg, ConfidenceCurve};
use crate::error::{Error, Result};
use crate::models::NormMean;
use crate::numerics::{cdf_sf, d_quantile_inverse, Bound};
use crate::proposition::Proposition;

/// Slack accepted on `β ≤ 1 − α` for levels produced by arithmetic.
const SPEC_SLACK: f64 = 1e-12;

/// Level `α` and upper-tail allocation `β` of a CI procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    alpha: f64,
    beta: f64,
    closed: bool,
}

impl IntervalSpec {
    pub fn new(alpha: f64, beta: f64, closed: bool) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(beta >= 0.0) || beta > 1.0 - alpha + SPEC_SLACK {
            return Err(Error::InvalidSpec(format!("beta must lie in [0, 1 - alpha] = [0, {}], got {beta}", 1.0 - alpha)));
        }
        Ok(Self { alpha, beta: beta.min(1.0 - alpha), closed })
    }

    pub fn half_open(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, false)
    }

    pub fn closed(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, true)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Level of the lower endpoint, `1 − α − β`.
    fn lower_level(&self) -> f64 {
        (1.0 - self.alpha - self.beta).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    TwoSided,
    OneSided,
    /// `[0, 0)`, from a half-open procedure.
    Empty,
    /// `{0}`, from a closed procedure.
    PointZero,
}

impl IntervalKind {
    pub fn label(&self) -> &'static str {
        match self {
            IntervalKind::TwoSided => "two-sided",
            IntervalKind::OneSided => "one-sided",
            IntervalKind::Empty => "empty",
            IntervalKind::PointZero => "point-zero",
        }
    }
}

/// A realized interval. Keeps its `d` so that degenerate intervals can still
/// report `M(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedInterval {
    pub lower: f64,
    pub upper: Bound,
    pub kind: IntervalKind,
    pub closed: bool,
    pub d: f64,
}

impl ObservedInterval {
    pub fn contains(&self, theta: f64) -> bool {
        match self.kind {
            IntervalKind::Empty => false,
            IntervalKind::PointZero => theta == 0.0,
            _ => {
                theta >= self.lower
                    && match self.upper {
                        Bound::Unbounded => true,
                        Bound::Finite(u) => {
                            if self.closed {
                                theta <= u
                            } else {
                                theta < u
                            }
                        }
                    }
            }
        }
    }

    pub fn as_proposition(&self) -> Proposition {
        Proposition::interval(self.lower, self.upper, true, self.closed || self.kind == IntervalKind::PointZero)
            .expect("observed interval has ordered, nonnegative ends")
    }
}

/// Realizes the procedure at `d` and classifies the outcome.
pub fn ci_observe(d: f64, spec: &IntervalSpec, model: &NormMean) -> Result<ObservedInterval> {
    let d = d_arg(d)?;
    // d > q_γ(0)  <=>  P_0(D ≤ d) > 1 − γ
    let f0 = cdf_sf(model.scaled_sq(d), model.k(), 0.0).0;
    let (k, sigma) = (model.k(), model.sigma());
    let kind = if f0 > spec.alpha + spec.beta {
        IntervalKind::TwoSided
    } else if f0 > spec.beta {
        IntervalKind::OneSided
    } else if spec.closed {
        IntervalKind::PointZero
    } else {
        IntervalKind::Empty
    };
    let (lower, upper) = match kind {
        IntervalKind::TwoSided => {
            let lo = d_quantile_inverse(spec.lower_level(), d, sigma, k)?;
            (lo.finite().expect("level below 1"), d_quantile_inverse(1.0 - spec.beta, d, sigma, k)?)
        }
        IntervalKind::OneSided => (0.0, d_quantile_inverse(1.0 - spec.beta, d, sigma, k)?),
        IntervalKind::Empty | IntervalKind::PointZero => (0.0, Bound::Finite(0.0)),
    };
    Ok(ObservedInterval { lower, upper, kind, closed: spec.closed, d })
}

/// Confidence the CD assigns to an observed interval: `α` for two-sided,
/// `1 − β` for one-sided, and `M(d)` for `[0,0)` or `{0}`.
pub fn ci_confidence(interval: &ObservedInterval, curve: &ConfidenceCurve) -> Result<f64> {
    if (interval.d - curve.d()).abs() > 1e-12 * interval.d.max(1.0) {
        return Err(Error::MismatchedObservation { interval_d: interval.d, curve_d: curve.d() });
    }
    let at_upper = |u: Bound| match u {
        Bound::Unbounded => 1.0,
        Bound::Finite(u) => curve.cdf(u),
    };
    Ok(match interval.kind {
        IntervalKind::TwoSided => at_upper(interval.upper) - curve.cdf(interval.lower),
        IntervalKind::OneSided => at_upper(interval.upper),
        IntervalKind::Empty | IntervalKind::PointZero => curve.point_mass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> NormMean {
        NormMean::new(2, 1.0).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(IntervalSpec::half_open(0.0, 0.0).is_err());
        assert!(IntervalSpec::half_open(0.9, 0.2).is_err());
        assert!(IntervalSpec::half_open(0.9, -0.01).is_err());
        let edge = IntervalSpec::half_open(0.7, 0.3 + 1e-15).unwrap();
        assert_eq!(edge.beta(), 1.0 - 0.7);
    }

    #[test]
    fn one_sided_case() {
        let spec = IntervalSpec::half_open(0.9, 0.05).unwrap();
        let ci = ci_observe(2.0, &spec, &model()).unwrap();
        assert_eq!(ci.kind, IntervalKind::OneSided);
        assert_eq!(ci.lower, 0.0);
        assert!((ci.upper.finite().unwrap() - 3.451).abs() < 1e-3, "{ci:?}");
        let curve = ConfidenceCurve::new(model(), 2.0).unwrap();
        assert!((ci_confidence(&ci, &curve).unwrap() - 0.95).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cases() {
        let half = IntervalSpec::half_open(0.9, 0.05).unwrap();
        let closed = IntervalSpec::closed(0.9, 0.05).unwrap();
        let e = ci_observe(0.2, &half, &model()).unwrap();
        assert_eq!(e.kind, IntervalKind::Empty);
        assert!(!e.contains(0.0));
        let p = ci_observe(0.2, &closed, &model()).unwrap();
        assert_eq!(p.kind, IntervalKind::PointZero);
        assert!(p.contains(0.0) && !p.contains(1e-9));
        let curve = ConfidenceCurve::new(model(), 0.2).unwrap();
        assert!((ci_confidence(&e, &curve).unwrap() - 0.980).abs() < 5e-4);
    }

    #[test]
    fn two_sided_case() {
        let spec = IntervalSpec::half_open(0.9, 0.05).unwrap();
        let ci = ci_observe(3.0, &spec, &model()).unwrap();
        assert_eq!(ci.kind, IntervalKind::TwoSided);
        assert!(ci.lower > 0.0);
        let curve = ConfidenceCurve::new(model(), 3.0).unwrap();
        assert!((ci_confidence(&ci, &curve).unwrap() - 0.9).abs() < 1e-9);
    }

    #[test]
    fn zero_beta_gives_unbounded_upper_end() {
        let spec = IntervalSpec::half_open(0.8, 0.0).unwrap();
        let ci = ci_observe(0.5, &spec, &model()).unwrap();
        assert_eq!(ci.kind, IntervalKind::OneSided);
        assert_eq!(ci.upper, Bound::Unbounded);
        assert!(ci.contains(1e9));
    }

    #[test]
    fn mismatched_curve_is_rejected() {
        let spec = IntervalSpec::half_open(0.9, 0.05).unwrap();
        let ci = ci_observe(2.0, &spec, &model()).unwrap();
        let other = ConfidenceCurve::new(model(), 2.5).unwrap();
        assert!(matches!(ci_confidence(&ci, &other), Err(Error::MismatchedObservation { .. })));
    }
}
