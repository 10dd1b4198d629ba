//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use statrs::function::gamma::gamma;

/// Modified Bessel function `I_ν(z)` by its power series.
pub fn bessel_i(nu: f64, z: f64) -> f64 {
    let h = 0.5 * z;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    for m in 0..10_000 {
        let m = m as f64;
        term *= h * h / ((m + 1.0) * (m + nu + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Noncentral chi-square density in Bessel form,
/// `½ e^{−(x+λ)/2} (x/λ)^{k/4−½} I_{k/2−1}(√(λx))`.
pub fn ncx2_pdf_bessel(x: f64, k: u32, lambda: f64) -> f64 {
    let k = k as f64;
    if lambda == 0.0 {
        return x.powf(0.5 * k - 1.0) * (-0.5 * x).exp() / (2f64.powf(0.5 * k) * gamma(0.5 * k));
    }
    0.5 * (-0.5 * (x + lambda)).exp() * (x / lambda).powf(0.25 * k - 0.5) * bessel_i(0.5 * k - 1.0, (lambda * x).sqrt())
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`, started on 32
/// panels so that narrow peaks are not missed.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    const PANELS: usize = 32;
    let h = (b - a) / PANELS as f64;
    (0..PANELS).map(|i| simpson_panel(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / PANELS as f64)).sum()
}

fn simpson_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, tol: f64, depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol.max(1e-15 * (left + right).abs()) {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// `P(χ²_k(λ) ≤ x)` by quadrature of the Bessel-form density in `u = √x`.
pub fn ncx2_cdf_quadrature(x: f64, k: u32, lambda: f64) -> f64 {
    let g = |u: f64| if u == 0.0 { if k == 1 { 2.0 * ncx2_pdf_bessel_limit_k1(lambda) } else { 0.0 } } else { 2.0 * u * ncx2_pdf_bessel(u * u, k, lambda) };
    adaptive_simpson(&g, 0.0, x.sqrt(), 1e-13)
}

/// `lim_{u→0} u · f_1(u²; λ)`.
fn ncx2_pdf_bessel_limit_k1(lambda: f64) -> f64 {
    (-0.5 * lambda).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF by quadrature of the density.
pub fn normal_cdf_quadrature(z: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let lower_tail = |w: f64| adaptive_simpson(&phi, w - 12.0, w, 1e-17 * phi(w).max(1e-300));
    if z <= 0.0 {
        lower_tail(z)
    } else {
        1.0 - lower_tail(-z)
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (mut i, mut j, mut worst) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    worst
}

/// Central finite difference.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
