//! Seeded Monte Carlo experiments.
//!
//! Every cell of an experiment owns a random stream keyed by the user seed
//! and the cell's grid position, and replicate `i` draws from substream `i`
//! of that key. Replicates are collected in index order and reduced by
//! pairwise summation, so reports are bit-identical whether the loop runs
//! sequentially or on the rayon pool.

use serde::{Deserialize, Serialize};

use crate::beliefs::{BeliefBase, BeliefCurve};
use crate::cd::ConfidenceCurve;
use crate::error::{invalid, Result};
pub use crate::exec::Execution;
use crate::exec::{cell_key, map_indexed, replicate_rng};
use crate::intervals::{ci_observe, IntervalSpec};
use crate::models::NormMean;
use crate::numerics::Bound;
use crate::posteriors::PosteriorCurve;
use crate::proposition::Proposition;

/// Stand-in for `σ = 0`, where the model degenerates.
pub const SIGMA_FLOOR: f64 = 1e-3;

/// Grid of true parameters and model settings swept by an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub thetas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub ks: Vec<u32>,
    pub n_reps: u64,
    pub seed: u64,
}

impl ExperimentGrid {
    pub fn new(thetas: Vec<f64>, sigmas: Vec<f64>, ks: Vec<u32>, n_reps: u64, seed: u64) -> Result<Self> {
        if thetas.is_empty() || sigmas.is_empty() || ks.is_empty() {
            return Err(invalid("experiment grids must be non-empty"));
        }
        if n_reps == 0 {
            return Err(invalid("need at least one replicate"));
        }
        if let Some(t) = thetas.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(invalid(format!("true theta values must be finite and nonnegative, got {t}")));
        }
        if let Some(s) = sigmas.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
            return Err(invalid(format!("sigma values must be finite and nonnegative, got {s}")));
        }
        let sigmas = sigmas
            .into_iter()
            .map(|s| {
                if s == 0.0 {
                    log::info!("replacing sigma = 0 by {SIGMA_FLOOR}");
                    SIGMA_FLOOR
                } else {
                    s
                }
            })
            .collect();
        if ks.contains(&0) {
            return Err(invalid("dimension k must be at least 1"));
        }
        Ok(Self { thetas, sigmas, ks, n_reps, seed })
    }

    /// `(index, θ₀, model)` for every grid point, θ outermost.
    fn points(&self) -> Result<Vec<(u64, f64, NormMean)>> {
        let mut out = Vec::with_capacity(self.thetas.len() * self.sigmas.len() * self.ks.len());
        for (it, &theta) in self.thetas.iter().enumerate() {
            for (is, &sigma) in self.sigmas.iter().enumerate() {
                for (ik, &k) in self.ks.iter().enumerate() {
                    let id = ((it as u64) << 40) | ((is as u64) << 20) | ik as u64;
                    out.push((id, theta, NormMean::new(k, sigma)?));
                }
            }
        }
        Ok(out)
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub mc_se: f64,
    pub n_reps: u64,
}

impl Estimate {
    /// Proportion of `true` outcomes, with `se = √(p(1−p)/n)`.
    pub fn proportion(outcomes: &[bool]) -> Self {
        let n = outcomes.len() as u64;
        let p = outcomes.iter().filter(|b| **b).count() as f64 / n as f64;
        Self { estimate: p, mc_se: (p * (1.0 - p) / n as f64).sqrt(), n_reps: n }
    }

    /// Sample mean, with `se = s/√n`.
    pub fn mean(values: &[f64]) -> Self {
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        Self { estimate: mean, mc_se: (var / n as f64).sqrt(), n_reps: n as u64 }
    }

    /// `|estimate − target| ≤ z · se`, with the standard error evaluated at
    /// the target so that exact 0/1 estimates are still compared sensibly.
    pub fn within(&self, target: f64, z: f64) -> bool {
        let se = (target * (1.0 - target) / self.n_reps as f64).sqrt();
        (self.estimate - target).abs() <= z * se
    }
}

/// One row of a [`SimReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub theta0: f64,
    pub sigma: f64,
    pub k: u32,
    pub method: String,
    /// Evaluation point of curve-valued estimands (θ for average CDFs).
    pub at: Option<f64>,
    pub estimate: f64,
    pub mc_se: f64,
    pub n_reps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub experiment_id: String,
    pub seed: u64,
    pub cells: Vec<Cell>,
}

impl SimReport {
    pub fn find(&self, theta0: f64, sigma: f64, k: u32, method: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.theta0 == theta0 && c.sigma == sigma && c.k == k && c.method == method)
    }
}

/// Interval or probability reported by a method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Cd,
    Up,
    Rp,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Cd => "CD",
            Method::Up => "UP",
            Method::Rp => "RP",
        }
    }

    fn confidence(&self, model: NormMean, d: f64, a: &Proposition) -> Result<f64> {
        Ok(match self {
            Method::Cd => ConfidenceCurve::new(model, d)?.confidence_of_set(a),
            Method::Up => PosteriorCurve::uniform(model, d)?.prob_of_set(a),
            Method::Rp => PosteriorCurve::reference(model, d)?.prob_of_set(a),
        })
    }
}

/// Statistic whose value at `H₀` serves as a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestMethod {
    Cd,
    Up,
    Rp,
    BelCd,
    BelUp,
}

impl TestMethod {
    pub fn label(&self) -> &'static str {
        match self {
            TestMethod::Cd => "CD",
            TestMethod::Up => "UP",
            TestMethod::Rp => "RP",
            TestMethod::BelCd => "Bel",
            TestMethod::BelUp => "Bel_G",
        }
    }

    fn p_value(&self, model: NormMean, d: f64, h: &Proposition) -> Result<f64> {
        Ok(match self {
            TestMethod::Cd => Method::Cd.confidence(model, d, h)?,
            TestMethod::Up => Method::Up.confidence(model, d, h)?,
            TestMethod::Rp => Method::Rp.confidence(model, d, h)?,
            TestMethod::BelCd => BeliefCurve::from_cd(ConfidenceCurve::new(model, d)?).belief(h),
            TestMethod::BelUp => BeliefCurve::from_up(PosteriorCurve::uniform(model, d)?)?.belief(h),
        })
    }
}

/// Both sides of the identity `P{Bel(I;D) = 0} = P{median(D) ∉ I}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullBeliefEstimate {
    pub zero_belief: Estimate,
    pub median_outside: Estimate,
}

/// Experiment runner bound to an execution backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lab {
    exec: Execution,
}

/// Experiment tags mixed into cell keys.
const TAG_COVERAGE: u64 = 1;
const TAG_AVERAGE: u64 = 2;
const TAG_COLLISION: u64 = 3;
const TAG_PROBE: u64 = 4;

impl Lab {
    pub fn new(exec: Execution) -> Self {
        Self { exec }
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// `n` draws of `D` for one cell; cells sharing `(tag, id)` share draws.
    fn draws(&self, seed: u64, tag: u64, id: u64, theta0: f64, model: NormMean, n: u64) -> Vec<f64> {
        let key = cell_key(seed ^ tag.rotate_left(56), id);
        map_indexed(self.exec, n, |i| model.draw_d(theta0, &mut replicate_rng(key, i)))
    }

    fn map_try<T, F>(&self, ds: &[f64], f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(f64) -> Result<T> + Sync + Send,
    {
        map_indexed(self.exec, ds.len() as u64, |i| f(ds[i as usize])).into_iter().collect()
    }

    /// Coverage of `θ₀` by the CD procedure, or by equal-tail posterior
    /// intervals `[F⁻¹(1−α−β), F⁻¹(1−β))` for UP and RP.
    pub fn coverage_sim(&self, grid: &ExperimentGrid, method: Method, spec: &IntervalSpec) -> Result<SimReport> {
        let mut cells = Vec::new();
        for (id, theta0, model) in grid.points()? {
            let ds = self.draws(grid.seed, TAG_COVERAGE, id, theta0, model, grid.n_reps);
            let hits = self.map_try(&ds, |d| covers(method, spec, model, d, theta0))?;
            cells.push(cell(theta0, model, method.label(), None, Estimate::proportion(&hits)));
        }
        Ok(SimReport { experiment_id: format!("coverage-{}", method.label()), seed: grid.seed, cells })
    }

    /// Pointwise averages of `C(θ;D)` and `G(θ;D)` over replicates.
    pub fn average_cdf_sim(&self, grid: &ExperimentGrid, eval_thetas: &[f64], methods: &[Method]) -> Result<SimReport> {
        if let Some(t) = eval_thetas.iter().find(|t| !(**t >= 0.0)) {
            return Err(invalid(format!("evaluation points must be nonnegative, got {t}")));
        }
        let mut cells = Vec::new();
        for (id, theta0, model) in grid.points()? {
            let ds = self.draws(grid.seed, TAG_AVERAGE, id, theta0, model, grid.n_reps);
            for &method in methods {
                let rows = self.map_try(&ds, |d| -> Result<Vec<f64>> {
                    match method {
                        Method::Cd => {
                            let c = ConfidenceCurve::new(model, d)?;
                            eval_thetas.iter().map(|&t| c.eval(t)).collect()
                        }
                        Method::Up | Method::Rp => {
                            let p = if method == Method::Up {
                                PosteriorCurve::uniform(model, d)?
                            } else {
                                PosteriorCurve::reference(model, d)?
                            };
                            eval_thetas.iter().map(|&t| p.cdf(t)).collect()
                        }
                    }
                })?;
                for (j, &t) in eval_thetas.iter().enumerate() {
                    let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                    cells.push(cell(theta0, model, method.label(), Some(t), Estimate::mean(&column)));
                }
            }
        }
        Ok(SimReport { experiment_id: "average-cdf".into(), seed: grid.seed, cells })
    }

    /// Averages of `C(H₀)`, `Bel(H₀)`, `G(H₀)` and `Bel_G(H₀)` for
    /// `H₀ = [0, R]`.
    pub fn collision_confidence_sim(&self, grid: &ExperimentGrid, r: f64) -> Result<SimReport> {
        let h0 = Proposition::at_most(r)?;
        let mut cells = Vec::new();
        for (id, theta0, model) in grid.points()? {
            let ds = self.draws(grid.seed, TAG_COLLISION, id, theta0, model, grid.n_reps);
            let rows = self.map_try(&ds, |d| -> Result<[f64; 4]> {
                let c = ConfidenceCurve::new(model, d)?;
                let g = PosteriorCurve::uniform(model, d)?;
                let conf = c.confidence_of_set(&h0);
                let prob = g.prob_of_set(&h0);
                let bel = BeliefCurve::from_cd(c).belief(&h0);
                let bel_g = BeliefCurve::from_up(g)?.belief(&h0);
                Ok([conf, bel, prob, bel_g])
            })?;
            for (j, label) in ["C", "Bel", "G", "Bel_G"].into_iter().enumerate() {
                let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                cells.push(cell(theta0, model, label, Some(r), Estimate::mean(&column)));
            }
        }
        Ok(SimReport { experiment_id: "collision".into(), seed: grid.seed, cells })
    }

    /// `P_{θ₀}{conf(A;D) ≥ 1 − α}`.
    #[allow(clippy::too_many_arguments)]
    pub fn false_confidence_probe(
        &self,
        theta0: f64,
        a: &Proposition,
        alpha: f64,
        method: Method,
        model: NormMean,
        n_reps: u64,
        seed: u64,
    ) -> Result<Estimate> {
        check_level(alpha)?;
        let ds = self.probe_draws(seed, theta0, model, n_reps)?;
        let hits = self.map_try(&ds, |d| Ok(method.confidence(model, d, a)? >= 1.0 - alpha))?;
        Ok(Estimate::proportion(&hits))
    }

    /// `P_{θ₀}{Bel((θ₀−ε, θ₀+ε) ∩ Θ; D) = 0}`.
    pub fn null_belief_probe(
        &self,
        theta0: f64,
        epsilon: f64,
        base: BeliefBase,
        model: NormMean,
        n_reps: u64,
        seed: u64,
    ) -> Result<NullBeliefEstimate> {
        if !(epsilon > 0.0) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        let upper = if epsilon.is_finite() { Bound::Finite(theta0 + epsilon) } else { Bound::Unbounded };
        let lower = theta0 - epsilon;
        let interval = if lower >= 0.0 {
            Proposition::open(lower, upper)?
        } else {
            Proposition::half_open(0.0, upper)?
        };
        self.null_belief_probe_set(theta0, &interval, base, model, n_reps, seed)
    }

    /// `P_{θ₀}{Bel(A; D) = 0}` for a given true set `A`.
    pub fn null_belief_probe_set(
        &self,
        theta0: f64,
        a: &Proposition,
        base: BeliefBase,
        model: NormMean,
        n_reps: u64,
        seed: u64,
    ) -> Result<NullBeliefEstimate> {
        let ds = self.probe_draws(seed, theta0, model, n_reps)?;
        let rows = self.map_try(&ds, |d| -> Result<(bool, bool)> {
            let bc = match base {
                BeliefBase::Cd => BeliefCurve::from_cd(ConfidenceCurve::new(model, d)?),
                BeliefBase::Up => BeliefCurve::from_up(PosteriorCurve::uniform(model, d)?)?,
            };
            Ok((bc.belief(a) == 0.0, !a.contains(bc.median()?)))
        })?;
        let zero: Vec<bool> = rows.iter().map(|r| r.0).collect();
        let outside: Vec<bool> = rows.iter().map(|r| r.1).collect();
        Ok(NullBeliefEstimate { zero_belief: Estimate::proportion(&zero), median_outside: Estimate::proportion(&outside) })
    }

    /// Rejection rate of "reject `H` when its p-value is at most `α`".
    #[allow(clippy::too_many_arguments)]
    pub fn test_size_probe(
        &self,
        h: &Proposition,
        method: TestMethod,
        alpha: f64,
        theta0: f64,
        model: NormMean,
        n_reps: u64,
        seed: u64,
    ) -> Result<Estimate> {
        check_level(alpha)?;
        let ds = self.probe_draws(seed, theta0, model, n_reps)?;
        let hits = self.map_try(&ds, |d| Ok(method.p_value(model, d, h)? <= alpha))?;
        Ok(Estimate::proportion(&hits))
    }

    /// Draws of `D` shared by all probes with the same `(seed, θ₀, model)`.
    pub fn probe_draws(&self, seed: u64, theta0: f64, model: NormMean, n_reps: u64) -> Result<Vec<f64>> {
        if !(theta0 >= 0.0) || !theta0.is_finite() {
            return Err(invalid(format!("theta0 must be finite and nonnegative, got {theta0}")));
        }
        if n_reps == 0 {
            return Err(invalid("need at least one replicate"));
        }
        Ok(self.draws(seed, TAG_PROBE, 0, theta0, model, n_reps))
    }
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn cell(theta0: f64, model: NormMean, method: &str, at: Option<f64>, e: Estimate) -> Cell {
    Cell {
        theta0,
        sigma: model.sigma(),
        k: model.k(),
        method: method.to_string(),
        at,
        estimate: e.estimate,
        mc_se: e.mc_se,
        n_reps: e.n_reps,
    }
}

/// Whether the interval reported by `method` at `d` contains `theta0`.
pub fn covers(method: Method, spec: &IntervalSpec, model: NormMean, d: f64, theta0: f64) -> Result<bool> {
    match method {
        Method::Cd => Ok(ci_observe(d, spec, &model)?.contains(theta0)),
        Method::Up | Method::Rp => {
            let post = if method == Method::Up {
                PosteriorCurve::uniform(model, d)?
            } else {
                PosteriorCurve::reference(model, d)?
            };
            let (lo, hi) = posterior_interval(&post, spec)?;
            Ok(theta0 >= lo && hi.exceeds(theta0))
        }
    }
}

/// Equal-tail posterior interval with the same tail split as the CD
/// procedure: `[F⁻¹(1−α−β), F⁻¹(1−β))`.
pub fn posterior_interval(post: &PosteriorCurve, spec: &IntervalSpec) -> Result<(f64, Bound)> {
    let lo = post.quantile((1.0 - spec.alpha() - spec.beta()).max(0.0))?;
    let hi = post.quantile(1.0 - spec.beta())?;
    Ok((lo.finite().expect("level below 1"), hi))
}

/// Sum with `O(log n)` error growth and an order fixed by the input.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Kolmogorov–Smirnov distance `sup |F_n − F|` between a sample and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Dvoretzky–Kiefer–Wolfowitz band: `P(sup |F_n − F| > ε) ≤ 1 − level`.
pub fn dkw_epsilon(n: usize, level: f64) -> f64 {
    ((2.0 / (1.0 - level)).ln() / (2.0 * n as f64)).sqrt()
}
