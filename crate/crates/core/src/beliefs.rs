//! Consonant belief functions `Bel(A) = 1 − sup_{θ ∉ A} pls(θ)` with the
//! plausibility contour built from a CD or from the uniform-prior posterior.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cd::{theta_arg, ConfidenceCurve};
use crate::error::{invalid, Result};
use crate::numerics::Bound;
use crate::posteriors::{PosteriorCurve, PosteriorMethod};
use crate::proposition::{Proposition, Segment};
use crate::roots::{brent, expand_upper, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BeliefBase {
    Cd,
    Up,
}

#[derive(Debug, Clone)]
enum Source {
    Cd(ConfidenceCurve),
    Up(PosteriorCurve),
}

/// Plausibility contour and consonant belief built from a base CDF.
#[derive(Debug, Clone)]
pub struct BeliefCurve {
    source: Source,
    median: OnceLock<Result<f64>>,
}

/// Outcome of a belief test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decision {
    pub reject: bool,
    pub belief: f64,
}

impl BeliefCurve {
    pub fn from_cd(curve: ConfidenceCurve) -> Self {
        Self { source: Source::Cd(curve), median: OnceLock::new() }
    }

    pub fn from_up(curve: PosteriorCurve) -> Result<Self> {
        if curve.method() != PosteriorMethod::Uniform {
            return Err(invalid("belief functions are built from the CD or the uniform-prior posterior"));
        }
        Ok(Self { source: Source::Up(curve), median: OnceLock::new() })
    }

    pub fn base(&self) -> BeliefBase {
        match self.source {
            Source::Cd(_) => BeliefBase::Cd,
            Source::Up(_) => BeliefBase::Up,
        }
    }

    /// Right-continuous base CDF; `cdf(0)` is the atom (0 for the posterior).
    fn cdf(&self, theta: f64) -> f64 {
        match &self.source {
            Source::Cd(c) => c.cdf(theta),
            Source::Up(p) => p.cdf_t(theta / p.model().sigma()),
        }
    }

    fn sigma(&self) -> f64 {
        match &self.source {
            Source::Cd(c) => c.model().sigma(),
            Source::Up(p) => p.model().sigma(),
        }
    }

    /// Smallest `θ` with base CDF `≥ ½`; 0 when the CD atom is at least ½.
    pub fn median(&self) -> Result<f64> {
        self.median
            .get_or_init(|| {
                if self.cdf(0.0) >= 0.5 {
                    return Ok(0.0);
                }
                let s = self.sigma();
                let f = |t: f64| self.cdf(t * s) - 0.5;
                let hi = expand_upper(f, 0.0, 10.0, 200)?;
                Ok(s * brent(f, 0.0, hi, Tolerance { xtol: 1e-12, ..Tolerance::default() })?)
            })
            .clone()
    }

    /// `pls(θ) = min(1, 2 min(C(θ), 1 − C(θ⁻)))`, which is `1 − |2C(θ) − 1|`
    /// away from the atom.
    pub fn plausibility(&self, theta: f64) -> Result<f64> {
        let theta = theta_arg(theta)?;
        let c = self.cdf(theta);
        let left = if theta == 0.0 { 0.0 } else { c };
        Ok((2.0 * c.min(1.0 - left)).min(1.0))
    }

    /// `sup_{θ ∈ S} pls(θ)` from endpoint values, using that pls rises up to
    /// the median and falls after it.
    fn sup_on(&self, s: &Segment) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        let ca = self.cdf(s.lower);
        if ca >= 0.5 {
            // median ≤ lower end
            if s.lower == 0.0 && s.lower_closed {
                return (2.0 * ca).min(1.0);
            }
            return (2.0 * (1.0 - ca)).min(1.0);
        }
        match s.upper {
            Bound::Unbounded => 1.0,
            Bound::Finite(b) => {
                let cb = self.cdf(b);
                if cb > 0.5 {
                    1.0
                } else {
                    2.0 * cb
                }
            }
        }
    }

    /// `Pl(A) = sup_{θ ∈ A} pls(θ)`.
    pub fn plausibility_of_set(&self, a: &Proposition) -> f64 {
        a.segments().iter().map(|s| self.sup_on(s)).fold(0.0, f64::max)
    }

    /// `Bel(A) = 1 − Pl(Aᶜ)`.
    pub fn belief(&self, a: &Proposition) -> f64 {
        (1.0 - self.plausibility_of_set(&a.complement())).max(0.0)
    }

    /// Rejects `A_null` when its belief is at most `alpha`.
    pub fn belief_test(&self, a_null: &Proposition, alpha: f64) -> Result<Decision> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let belief = self.belief(a_null);
        Ok(Decision { reject: belief <= alpha, belief })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::NormMean;

    fn cd(d: f64) -> BeliefCurve {
        BeliefCurve::from_cd(ConfidenceCurve::new(NormMean::new(2, 1.0).unwrap(), d).unwrap())
    }

    #[test]
    fn plausibility_peaks_at_the_median() {
        let b = cd(2.0);
        let m = b.median().unwrap();
        assert!(m > 0.0);
        assert!((b.plausibility(m).unwrap() - 1.0).abs() < 1e-9);
        assert!(b.plausibility(m + 0.5).unwrap() < 1.0);
        assert!(b.plausibility(m * 0.5).unwrap() < 1.0);
        assert!(b.plausibility(1e3).unwrap() < 1e-12);
    }

    #[test]
    fn large_atom_puts_the_median_at_zero() {
        let b = cd(0.2);
        assert_eq!(b.median().unwrap(), 0.0);
        assert_eq!(b.plausibility(0.0).unwrap(), 1.0);
        assert!(b.plausibility(1e-9).unwrap() < 0.05);
    }

    #[test]
    fn collision_belief() {
        let b = cd(1.0);
        let h0 = Proposition::at_most(2.0).unwrap();
        let c = 0.918_107_696_369_405_8;
        assert!((b.belief(&h0) - (2.0 * c - 1.0)).abs() < 1e-9);
        assert!((b.plausibility(2.0).unwrap() - (2.0 - 2.0 * c)).abs() < 1e-9);
        assert_eq!(b.belief(&Proposition::whole()), 1.0);
        let d = b.belief_test(&h0, 0.05).unwrap();
        assert!(!d.reject);
    }

    #[test]
    fn belief_vanishes_when_the_median_is_excluded() {
        let b = cd(3.0);
        let m = b.median().unwrap();
        let a = Proposition::closed(0.0, 0.5 * m).unwrap();
        assert_eq!(b.belief(&a), 0.0);
        assert_eq!(b.plausibility_of_set(&Proposition::closed(0.5 * m, 2.0 * m).unwrap()), 1.0);
    }

    #[test]
    fn up_base_requires_uniform_posterior() {
        let model = NormMean::new(2, 1.0).unwrap();
        assert!(BeliefCurve::from_up(PosteriorCurve::reference(model, 1.0).unwrap()).is_err());
        let b = BeliefCurve::from_up(PosteriorCurve::uniform(model, 1.0).unwrap()).unwrap();
        assert_eq!(b.plausibility(0.0).unwrap(), 0.0);
        assert!(b.median().unwrap() > 0.0);
    }
}
