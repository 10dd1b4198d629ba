use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::Bound;

/// A subset of `Θ = [0, ∞)`: a single interval, or the complement of one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proposition {
    lower: f64,
    upper: Bound,
    lower_closed: bool,
    upper_closed: bool,
    complemented: bool,
}

/// One interval piece of a proposition, as seen by the set functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Segment {
    pub lower: f64,
    pub upper: Bound,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl Segment {
    pub fn is_empty(&self) -> bool {
        match self.upper {
            Bound::Unbounded => false,
            Bound::Finite(b) => b < self.lower || (b == self.lower && !(self.lower_closed && self.upper_closed)),
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        let above = if self.lower_closed { theta >= self.lower } else { theta > self.lower };
        let below = match self.upper {
            Bound::Unbounded => true,
            Bound::Finite(b) => {
                if self.upper_closed {
                    theta <= b
                } else {
                    theta < b
                }
            }
        };
        above && below
    }

    /// Mass of the segment under a distribution on `[0, ∞)` whose only
    /// possible atom sits at 0. `cdf(θ)` is right-continuous, so `cdf(0)` is
    /// the atom.
    pub fn mass<F: FnMut(f64) -> f64>(&self, mut cdf: F) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hi = match self.upper {
            Bound::Unbounded => 1.0,
            Bound::Finite(b) => cdf(b),
        };
        let lo = if self.lower == 0.0 && self.lower_closed { 0.0 } else { cdf(self.lower) };
        (hi - lo).clamp(0.0, 1.0)
    }
}

fn check_end(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} end of a proposition must be finite and nonnegative, got {v}")))
    }
}

impl Proposition {
    /// General constructor; `lower ≤ upper` is required.
    pub fn interval(lower: f64, upper: Bound, lower_closed: bool, upper_closed: bool) -> Result<Self> {
        check_end("lower", lower)?;
        if let Bound::Finite(b) = upper {
            check_end("upper", b)?;
            if b < lower {
                return Err(invalid(format!("proposition has lower end {lower} above upper end {b}")));
            }
        }
        Ok(Self { lower, upper, lower_closed, upper_closed: upper_closed && upper.is_finite(), complemented: false })
    }

    /// `[a, b]`.
    pub fn closed(a: f64, b: f64) -> Result<Self> {
        Self::interval(a, Bound::Finite(b), true, true)
    }

    /// `[a, b)`.
    pub fn half_open(a: f64, b: Bound) -> Result<Self> {
        Self::interval(a, b, true, false)
    }

    /// `(a, b)`.
    pub fn open(a: f64, b: Bound) -> Result<Self> {
        Self::interval(a, b, false, false)
    }

    /// `[0, r]`, e.g. a collision hypothesis `θ ≤ R`.
    pub fn at_most(r: f64) -> Result<Self> {
        Self::closed(0.0, r)
    }

    /// `(r, ∞)`.
    pub fn greater_than(r: f64) -> Result<Self> {
        Self::open(r, Bound::Unbounded)
    }

    /// `{t}`.
    pub fn point(t: f64) -> Result<Self> {
        Self::closed(t, t)
    }

    /// `Θ` itself.
    pub fn whole() -> Self {
        Self { lower: 0.0, upper: Bound::Unbounded, lower_closed: true, upper_closed: false, complemented: false }
    }

    /// `Θ \ self`.
    pub fn complement(&self) -> Self {
        Self { complemented: !self.complemented, ..*self }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> Bound {
        self.upper
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn is_complemented(&self) -> bool {
        self.complemented
    }

    fn base(&self) -> Segment {
        Segment {
            lower: self.lower,
            upper: self.upper,
            lower_closed: self.lower_closed,
            upper_closed: self.upper_closed,
        }
    }

    /// The set as at most two disjoint, non-empty segments.
    pub(crate) fn segments(&self) -> Vec<Segment> {
        let base = self.base();
        if !self.complemented {
            return if base.is_empty() { Vec::new() } else { vec![base] };
        }
        if base.is_empty() {
            return vec![Proposition::whole().base()];
        }
        let left = Segment {
            lower: 0.0,
            upper: Bound::Finite(self.lower),
            lower_closed: true,
            upper_closed: !self.lower_closed,
        };
        let mut out = Vec::with_capacity(2);
        if !left.is_empty() {
            out.push(left);
        }
        if let Bound::Finite(b) = self.upper {
            out.push(Segment { lower: b, upper: Bound::Unbounded, lower_closed: !self.upper_closed, upper_closed: false });
        }
        out
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta >= 0.0 && self.base().contains(theta) != self.complemented
    }

    pub fn is_empty(&self) -> bool {
        self.segments().is_empty()
    }

    /// Mass under a distribution on `Θ` given by its right-continuous CDF,
    /// whose only possible atom is at 0.
    pub(crate) fn mass<F: FnMut(f64) -> f64>(&self, mut cdf: F) -> f64 {
        let m = self.base().mass(&mut cdf);
        if self.complemented {
            1.0 - m
        } else {
            m
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        let close = if self.upper_closed { ']' } else { ')' };
        if self.complemented {
            f.write_str("not ")?;
        }
        write!(f, "{open}{}, {}{close}", self.lower, self.upper)
    }
}
