//! Gamma-mixture series.
//!
//! Both the noncentral chi-square law (Poisson mixing) and the flat-prior
//! reference posterior are mixtures `Σ_j w_j · Gamma(a0 + j)` with
//! log-concave weights. Sums start at the modal index and walk outward in
//! both directions. With log-concave weights the ratio of successive
//! weights shrinks away from the mode, so the unsummed weight in either
//! tail is bounded by a geometric series, and the walk stops once that
//! bound drops below [`SERIES_TOL`] relative to the accumulated weight.

use super::gamma::{poisson_term, regularized_gamma};

/// Relative bound on the neglected mixing weight.
pub(crate) const SERIES_TOL: f64 = 1e-14;

/// Hard cap on the number of terms walked in each direction.
const MAX_TERMS: u64 = 50_000_000;

/// Weights are only needed up to a common factor; `ratio(j) = w_{j+1}/w_j`.
pub(crate) trait MixingWeights {
    fn mode(&self) -> u64;
    fn ratio(&self, j: u64) -> f64;
}

/// Poisson(mean) weights.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Poisson {
    pub mean: f64,
}

impl MixingWeights for Poisson {
    fn mode(&self) -> u64 {
        self.mean.floor() as u64
    }

    fn ratio(&self, j: u64) -> f64 {
        self.mean / (j + 1) as f64
    }
}

/// Weights `ω_j ∝ h^j Γ(j+½) / (Γ(j+1) Γ(c+j))` of the flat-prior posterior,
/// with `h = x/2` and `c = k/2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reference {
    pub half_x: f64,
    pub half_k: f64,
}

impl MixingWeights for Reference {
    fn mode(&self) -> u64 {
        // ratio(j) >= 1  <=>  j^2 + (1 + c - h) j + c - h/2 <= 0
        let b = 1.0 + self.half_k - self.half_x;
        let c = self.half_k - 0.5 * self.half_x;
        let disc = b * b - 4.0 * c;
        if disc < 0.0 {
            return 0;
        }
        let root = 0.5 * (-b + disc.sqrt());
        if root < 0.0 {
            0
        } else {
            root.floor() as u64 + 1
        }
    }

    fn ratio(&self, j: u64) -> f64 {
        let j = j as f64;
        self.half_x * (j + 0.5) / ((j + 1.0) * (self.half_k + j))
    }
}

/// `z^a e^{-z} / Γ(a+1)`, i.e. `P(a, z) - P(a+1, z)`.
#[inline]
fn gamma_step(a: f64, z: f64) -> f64 {
    poisson_term(a, z)
}

const UNDERFLOW_GUARD: f64 = 1e-280;

/// Returns `(Σ w_j P(a0+j, z), Σ w_j Q(a0+j, z)) / Σ w_j`, the lower and upper
/// regularized incomplete-gamma mixtures.
pub(crate) fn gamma_mixture_cdf<W: MixingWeights>(weights: &W, a0: f64, z: f64) -> (f64, f64) {
    if z <= 0.0 {
        return (0.0, 1.0);
    }
    if z.is_infinite() {
        return (1.0, 0.0);
    }
    let m = weights.mode();
    let am = a0 + m as f64;
    let (pm, qm) = regularized_gamma(am, z);
    let tm = gamma_step(am, z);

    let mut sum_w = 1.0;
    let mut sum_p = pm;
    let mut sum_q = qm;

    // upward: P(a+1) = P(a) - t_a, t_{a+1} = t_a z / (a+1)
    let (mut w, mut p, mut q, mut t) = (1.0, pm, qm, tm);
    let mut j = m;
    while j - m < MAX_TERMS {
        let a = a0 + j as f64;
        w *= weights.ratio(j);
        p = (p - t).max(0.0);
        q = (q + t).min(1.0);
        t = if t < UNDERFLOW_GUARD { gamma_step(a + 1.0, z) } else { t * z / (a + 1.0) };
        j += 1;
        sum_w += w;
        sum_p += w * p;
        sum_q += w * q;
        let r = weights.ratio(j);
        if w == 0.0 || (r < 1.0 && w * r / (1.0 - r) <= SERIES_TOL * sum_w) {
            break;
        }
    }

    // downward: P(a-1) = P(a) + t_{a-1}, t_{a-1} = t_a a / z
    let (mut w, mut p, mut q, mut t) = (1.0, pm, qm, tm);
    let mut j = m;
    while j > 0 {
        let a = a0 + j as f64;
        j -= 1;
        w /= weights.ratio(j);
        t = if t < UNDERFLOW_GUARD { gamma_step(a - 1.0, z) } else { t * a / z };
        p = (p + t).min(1.0);
        q = (q - t).max(0.0);
        sum_w += w;
        sum_p += w * p;
        sum_q += w * q;
        if j == 0 {
            break;
        }
        let rho = 1.0 / weights.ratio(j - 1);
        if w == 0.0 || (rho < 1.0 && w * rho / (1.0 - rho) <= SERIES_TOL * sum_w) {
            break;
        }
    }

    ((sum_p / sum_w).clamp(0.0, 1.0), (sum_q / sum_w).clamp(0.0, 1.0))
}

/// `Σ w_j g(a0+j, z) / Σ w_j` where `g(a, z) = z^{a-1} e^{-z} / Γ(a)` is the
/// unit-scale gamma density. `z` must be positive.
pub(crate) fn gamma_mixture_density<W: MixingWeights>(weights: &W, a0: f64, z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z.is_infinite() {
        return 0.0;
    }
    // g(a, z) = z^{a-1} e^{-z} / Γ(a)
    let density = |a: f64| if a >= 1.0 { poisson_term(a - 1.0, z) } else { poisson_term(a, z) * a / z };
    let m = weights.mode();
    let am = a0 + m as f64;
    let gm = density(am);

    let mut sum_w = 1.0;
    let mut sum_s = gm;

    let (mut w, mut g) = (1.0, gm);
    let mut j = m;
    let mut w_done = false;
    let mut s_done = false;
    while j - m < MAX_TERMS {
        let a = a0 + j as f64;
        w *= weights.ratio(j);
        g = if g < UNDERFLOW_GUARD { density(a + 1.0) } else { g * z / a };
        j += 1;
        if !w_done {
            sum_w += w;
        }
        if !s_done {
            sum_s += w * g;
        }
        let r = weights.ratio(j);
        let rs = r * z / (a0 + j as f64);
        if w == 0.0 || (r < 1.0 && w * r / (1.0 - r) <= SERIES_TOL * sum_w) {
            w_done = true;
        }
        if w * g == 0.0 && r < 1.0 || (rs < 1.0 && w * g * rs / (1.0 - rs) <= SERIES_TOL * sum_s) {
            s_done = true;
        }
        if w_done && s_done {
            break;
        }
    }

    let (mut w, mut g) = (1.0, gm);
    let mut j = m;
    let mut w_done = false;
    let mut s_done = false;
    while j > 0 {
        let a = a0 + j as f64;
        j -= 1;
        w /= weights.ratio(j);
        g = if g < UNDERFLOW_GUARD { density(a - 1.0) } else { g * (a - 1.0) / z };
        if !w_done {
            sum_w += w;
        }
        if !s_done {
            sum_s += w * g;
        }
        if j == 0 {
            break;
        }
        let rho = 1.0 / weights.ratio(j - 1);
        let rhos = rho * (a0 + j as f64 - 1.0) / z;
        if w == 0.0 || (rho < 1.0 && w * rho / (1.0 - rho) <= SERIES_TOL * sum_w) {
            w_done = true;
        }
        if (w * g == 0.0 && rho < 1.0) || (rhos < 1.0 && w * g * rhos / (1.0 - rhos) <= SERIES_TOL * sum_s) {
            s_done = true;
        }
        if w_done && s_done {
            break;
        }
    }

    sum_s / sum_w
}
