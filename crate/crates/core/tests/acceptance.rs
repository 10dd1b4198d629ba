//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run a subset with `cargo test --test acceptance -- 1 4`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use confdist::cd::{curved_cd, ConfidenceCurve};
use confdist::intervals::{ci_confidence, ci_observe};
use confdist::mc::{dkw_epsilon, ks_statistic, Estimate, ExperimentGrid, Method, TestMethod};
use confdist::models::Observation;
use confdist::numerics::{d_quantile, noncentral_chisq_cdf, normal_cdf, ChiSqParams, QuantileQuery};
use confdist::posteriors::{gfd_sample, up_cdf};
use confdist::{BeliefBase, Execution, IntervalKind, IntervalSpec, Lab, NormMean, PosteriorCurve, Proposition};

/// Outcome of a single numeric check inside a criterion.
struct Check {
    label: String,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn near(&mut self, label: impl Into<String>, value: f64, target: f64, tol: f64) {
        self.push(label, (value - target).abs() <= tol, format!("{value:.6} vs {target} ±{tol}"));
    }

    fn at_most(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.push(label, value <= bound, format!("{value:.6} ≤ {bound:.6}"));
    }

    fn at_least(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.push(label, value >= bound, format!("{value:.6} ≥ {bound:.6}"));
    }

    /// `|estimate − target| ≤ 3 se`.
    fn band(&mut self, label: impl Into<String>, e: &Estimate, target: f64) {
        let ok = (e.estimate - target).abs() <= 3.0 * e.mc_se.max(binomial_se(target, e.n_reps));
        self.push(label, ok, format!("{:.5} (se {:.5}, n {}) vs {target}", e.estimate, e.mc_se, e.n_reps));
    }

    fn push(&mut self, label: impl Into<String>, ok: bool, detail: String) {
        self.checks.push(Check { label: label.into(), ok, detail });
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn model(k: u32, sigma: f64) -> NormMean {
    NormMean::new(k, sigma).unwrap()
}

fn lab() -> Lab {
    Lab::new(Execution::default())
}

const SEED: u64 = 1;

fn golden_numbers(c: &mut Criterion) {
    for (alpha, target) in [(0.05, 2.448), (0.35, 1.449), (0.95, 0.320)] {
        let q = d_quantile(QuantileQuery { alpha, theta: 0.0, sigma: 1.0, k: 2 }).unwrap();
        c.near(format!("q_{alpha}(0)"), q, target, 1e-3);
    }
    let spec = IntervalSpec::half_open(0.9, 0.05).unwrap();
    for (d, target) in [(2.0, 3.451), (1.0, 2.287)] {
        let ci = ci_observe(d, &spec, &model(2, 1.0)).unwrap();
        c.near(format!("theta_U({d})"), ci.upper.finite().unwrap(), target, 1e-3);
    }
    c.near("M(0.2)", ConfidenceCurve::new(model(2, 1.0), 0.2).unwrap().point_mass(), 0.980, 1e-3);
}

fn collision_assessment(c: &mut Criterion) {
    let h0 = Proposition::at_most(2.0).unwrap();
    let at = |sigma| {
        let m = model(2, sigma);
        (
            ConfidenceCurve::new(m, 1.0).unwrap().confidence_of_set(&h0),
            PosteriorCurve::uniform(m, 1.0).unwrap().prob_of_set(&h0),
            PosteriorCurve::reference(m, 1.0).unwrap().prob_of_set(&h0),
        )
    };
    let (conf, g, rp) = at(1.0);
    c.near("sigma=1 C(H0)", conf, 0.918, 1e-3);
    c.near("sigma=1 G(H0)", g, 0.731, 1e-3);
    c.near("sigma=1 RP(H0)", rp, 0.891, 0.02);
    let (conf, g, rp) = at(100.0);
    c.push("sigma=100 C(H0)", (1.0 - 1e-3..=1.0).contains(&conf), format!("{conf:.6} in [0.999, 1]"));
    c.at_most("sigma=100 G(H0)", g, 1e-3);
    c.near("sigma=100 RP(H0)", rp, 0.016, 0.01);
}

fn exact_pit(c: &mut Criterion) {
    let n = 100_000u64;
    let eps = dkw_epsilon(n as usize, 0.999);
    for theta0 in [0.0, 1.0, 8.0] {
        for sigma in [1.0, 20.0] {
            let m = model(2, sigma);
            let ds = lab().probe_draws(SEED, theta0, m, n).unwrap();
            let u: Vec<f64> = ds.iter().map(|&d| ConfidenceCurve::new(m, d).unwrap().eval(theta0).unwrap()).collect();
            let ks = ks_statistic(&u, |x| x.clamp(0.0, 1.0));
            c.at_most(format!("KS theta0={theta0} sigma={sigma}"), ks, eps);
        }
    }
}

fn coverage_suite(c: &mut Criterion) {
    let grid = ExperimentGrid::new(vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0], vec![1.0, 5.0, 20.0], vec![2, 100], 10_000, SEED).unwrap();
    let lab = lab();
    for beta in [0.1, 0.2] {
        let spec = IntervalSpec::half_open(0.8, beta).unwrap();
        let report = lab.coverage_sim(&grid, Method::Cd, &spec).unwrap();
        let bad: Vec<String> = report
            .cells
            .iter()
            .filter(|cell| !Estimate { estimate: cell.estimate, mc_se: cell.mc_se, n_reps: cell.n_reps }.within(0.8, 3.0))
            .map(|cell| format!("theta0={} sigma={} k={}: {:.4}", cell.theta0, cell.sigma, cell.k, cell.estimate))
            .collect();
        let worst = report.cells.iter().map(|x| (x.estimate - 0.8).abs()).fold(0.0, f64::max);
        c.push(
            format!("CD beta={beta} all {} cells within 3 se of 0.8", report.cells.len()),
            bad.is_empty(),
            if bad.is_empty() { format!("max |cov - 0.8| = {worst:.4}") } else { bad.join("; ") },
        );
    }
    let spec = IntervalSpec::half_open(0.8, 0.1).unwrap();
    for method in [Method::Up, Method::Rp] {
        let report = lab.coverage_sim(&grid, method, &spec).unwrap();
        let low = report.cells.iter().filter(|x| x.theta0 > 0.0 && x.theta0 <= 1.0).min_by(|a, b| a.estimate.total_cmp(&b.estimate)).unwrap();
        c.push(
            format!("{} has a cell below 0.65 at 0 < theta0 <= 1", method.label()),
            low.estimate < 0.65,
            format!("min {:.4} at theta0={} sigma={} k={}", low.estimate, low.theta0, low.sigma, low.k),
        );
    }
    let closed = IntervalSpec::closed(0.8, 0.1).unwrap();
    let zero = ExperimentGrid::new(vec![0.0], vec![1.0, 5.0, 20.0], vec![2, 100], 10_000, SEED).unwrap();
    for cell in lab.coverage_sim(&zero, Method::Cd, &closed).unwrap().cells {
        let e = Estimate { estimate: cell.estimate, mc_se: cell.mc_se, n_reps: cell.n_reps };
        c.band(format!("closed coverage at 0, sigma={} k={}", cell.sigma, cell.k), &e, 0.9);
    }
}

fn collision_averages(c: &mut Criterion) {
    let grid = ExperimentGrid::new(vec![1.0], vec![20.0], vec![2], 100_000, SEED).unwrap();
    let report = lab().collision_confidence_sim(&grid, 2.0).unwrap();
    let get = |m: &str| report.find(1.0, 20.0, 2, m).unwrap().estimate;
    c.near("avg C(H0)", get("C"), 0.5, 0.01);
    c.near("avg Bel(H0)", get("Bel"), 0.223, 0.01);
    c.at_most("avg G(H0)", get("G"), 0.05);
    c.at_most("avg Bel_G(H0) vs avg G(H0)", get("Bel_G"), get("G"));
}

fn false_confidence(c: &mut Criterion) {
    let a = Proposition::open(0.0, confdist::Bound::Unbounded).unwrap();
    for alpha in [0.05, 0.2, 0.5] {
        let e = lab().false_confidence_probe(0.0, &a, alpha, Method::Cd, model(2, 1.0), 100_000, SEED).unwrap();
        c.at_most(format!("P{{C(A) >= {}}}", 1.0 - alpha), e.estimate, alpha + 3.0 * e.mc_se.max(binomial_se(alpha, e.n_reps)));
    }
}

fn null_belief(c: &mut Criterion) {
    let m = model(2, 1.0);
    let h0 = Proposition::at_most(2.0).unwrap();
    let e = lab().null_belief_probe_set(2.0, &h0, BeliefBase::Cd, m, 10_000, SEED).unwrap();
    c.near("P{Bel([0,2]) = 0} at theta0=2", e.zero_belief.estimate, 0.5, 0.015);
    for alpha in [0.05, 0.2, 0.4] {
        let r = lab().test_size_probe(&h0, TestMethod::BelCd, alpha, 2.0, m, 10_000, SEED).unwrap();
        c.at_least(format!("Bel rejection rate at alpha={alpha}"), r.estimate + 3.0 * r.mc_se, 0.5);
    }
    let floor = lab().test_size_probe(&h0, TestMethod::BelUp, 1e-12, 2.0, m, 10_000, SEED).unwrap();
    c.near("Bel_G rejection floor at sigma=1", floor.estimate, 0.847, 0.02);
}

fn point_null(c: &mut Criterion) {
    let m = model(2, 1.0);
    let h0 = Proposition::point(0.0).unwrap();
    for alpha in [0.01, 0.05, 0.1] {
        let e = lab().test_size_probe(&h0, TestMethod::Cd, alpha, 0.0, m, 100_000, SEED).unwrap();
        c.band(format!("P{{M(D) <= {alpha}}}"), &e, alpha);
    }
    let worst = (0..=400)
        .map(|i| 0.02 * i as f64)
        .flat_map(|d| {
            [PosteriorCurve::uniform(m, d).unwrap().prob_of_set(&h0), PosteriorCurve::reference(m, d).unwrap().prob_of_set(&h0)]
        })
        .fold(0.0, f64::max);
    c.push("UP and RP point-null p-values", worst == 0.0, format!("max over d in [0, 8]: {worst}"));
}

fn fiducial(c: &mut Criterion) {
    let m = model(2, 1.0);
    let s = gfd_sample(&Observation { y: vec![2.0, 0.0], d: 2.0 }, &m, 1_000_000, SEED).unwrap();
    let ks = ks_statistic(&s.values, |t| up_cdf(t, 2.0, 1.0, 2).unwrap());
    c.at_most("sup |F_n - G(.;2)|", ks, 0.005);
}

fn oracles(c: &mut Criterion) {
    let mut worst = 0.0f64;
    for k in [1u32, 2, 5, 20] {
        for (lam, x) in [(0.0, 1.0), (0.5, 0.2), (4.0, 3.0), (9.0, 15.0), (25.0, 40.0)] {
            let ours = noncentral_chisq_cdf(x, ChiSqParams::new(k, lam).unwrap()).unwrap();
            worst = worst.max((ours - common::ncx2_cdf_quadrature(x, k, lam)).abs());
        }
    }
    c.at_most("noncentral CDF vs density quadrature, 20 points", worst, 1e-8);

    let m = model(2, 1.0);
    let mut worst = 0.0f64;
    for (alpha, beta) in [(0.9, 0.05), (0.8, 0.1), (0.6, 0.2)] {
        let spec = IntervalSpec::half_open(alpha, beta).unwrap();
        for d in [1.0, 2.0, 4.0] {
            let ci = ci_observe(d, &spec, &m).unwrap();
            let conf = ci_confidence(&ci, &ConfidenceCurve::new(m, d).unwrap()).unwrap();
            let level = |theta| grid_level(theta, d);
            let oracle = match ci.kind {
                IntervalKind::TwoSided => level(ci.upper.finite().unwrap()) - level(ci.lower),
                _ => level(ci.upper.finite().unwrap()),
            };
            worst = worst.max((conf - oracle).abs());
        }
    }
    c.at_most("ci_confidence vs level-grid search", worst, 1e-3);

    let curve = ConfidenceCurve::new(m, 2.0).unwrap();
    let worst = [0.5, 1.0, 3.0]
        .into_iter()
        .map(|t| (curve.density(t).unwrap() - common::central_difference(|s| curve.eval(s).unwrap(), t, 1e-5)).abs())
        .fold(0.0, f64::max);
    c.at_most("confidence density vs finite differences", worst, 1e-5);

    let limit = curved_cd(1e12, &Observation { y: vec![0.7], d: 0.7 }, false).unwrap();
    c.near("curved CD as theta grows", limit, 0.8413, 1e-4);
    c.near("1 - Phi(-1)", 1.0 - normal_cdf(-1.0), 0.8413, 1e-4);
}

/// The level `α` with `q_α(θ) = d`, by scanning a grid of step 1e-4.
fn grid_level(theta: f64, d: f64) -> f64 {
    let q = |alpha| d_quantile(QuantileQuery { alpha, theta, sigma: 1.0, k: 2 }).unwrap();
    let n = 10_000;
    (1..n).map(|i| i as f64 / n as f64).find(|&a| q(a) <= d).map_or(1.0, |a| a - 0.5 / n as f64)
}

type CriterionFn = fn(&mut Criterion);

fn main() -> ExitCode {
    let criteria: [(u32, &str, CriterionFn); 10] = [
        (1, "golden numbers", golden_numbers),
        (2, "collision assessment at d=1, R=2", collision_assessment),
        (3, "exact PIT", exact_pit),
        (4, "coverage suite", coverage_suite),
        (5, "collision averages", collision_averages),
        (6, "false-confidence bound", false_confidence),
        (7, "null belief and belief-test failure", null_belief),
        (8, "point-null test size", point_null),
        (9, "fiducial and uniform posterior agree", fiducial),
        (10, "oracle equivalences", oracles),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let mut c = Criterion::default();
        run(&mut c);
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict}: {name} ({:.1}s)", start.elapsed().as_secs_f64());
        for check in &c.checks {
            println!("    [{}] {}: {}", if check.ok { "ok" } else { "FAIL" }, check.label, check.detail);
        }
        if !c.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
