//! One table builder per subcommand.

use anyhow::Result;
use confdist::cd::ConfidenceCurve;
use confdist::intervals::{ci_confidence, ci_observe};
use confdist::mc::{ExperimentGrid, Method, SimReport};
use confdist::models::observe;
use confdist::numerics::{d_quantile, QuantileQuery};
use confdist::{
    BeliefBase, BeliefCurve, Execution, IntervalSpec, Lab, ModelConfig, NormMean, PosteriorCurve, Proposition,
    ReferencePrior,
};

use crate::table::{Field, Table};

/// Model and observation shared by the single-observation commands.
#[derive(Debug, Clone)]
pub struct Observed {
    pub model: NormMean,
    pub d: f64,
}

impl Observed {
    /// From `d` directly or from a raw vector `y`, whose length fixes `k`
    /// unless `k` is also given.
    pub fn new(d: Option<f64>, y: Option<&[f64]>, k: Option<u32>, sigma: f64) -> Result<Self> {
        match (d, y) {
            (Some(d), None) => Ok(Self { model: NormMean::new(k.unwrap_or(2), sigma)?, d }),
            (None, Some(y)) => {
                let k = k.unwrap_or(y.len() as u32);
                let cfg = ModelConfig::norm_mean(k, sigma)?;
                Ok(Self { model: NormMean::new(k, sigma)?, d: observe(y, &cfg)?.d })
            }
            _ => Err(confdist::Error::InvalidParameter("exactly one of --d and --y is required".into()).into()),
        }
    }

    fn lead(&self) -> Vec<Field> {
        vec![self.d.into(), self.model.sigma().into(), self.model.k().into()]
    }
}

pub const CD_COLUMNS: &[&str] = &["d", "sigma", "k", "theta", "confidence", "density", "point_mass"];

pub fn cd(obs: &Observed, thetas: &[f64]) -> Result<Table> {
    let curve = ConfidenceCurve::new(obs.model, obs.d)?;
    let mut t = Table::new(CD_COLUMNS);
    for &theta in thetas {
        let density = if theta > 0.0 { Some(curve.density(theta)?) } else { None };
        let mut row = obs.lead();
        row.extend([theta.into(), curve.eval(theta)?.into(), density.into(), curve.point_mass().into()]);
        t.push(row);
    }
    Ok(t)
}

pub const CI_COLUMNS: &[&str] = &["d", "sigma", "k", "alpha", "beta", "closed", "kind", "lower", "upper", "confidence"];

pub fn ci(obs: &Observed, spec: &IntervalSpec) -> Result<Table> {
    let interval = ci_observe(obs.d, spec, &obs.model)?;
    let conf = ci_confidence(&interval, &ConfidenceCurve::new(obs.model, obs.d)?)?;
    let mut t = Table::new(CI_COLUMNS);
    let mut row = obs.lead();
    row.extend([
        spec.alpha().into(),
        spec.beta().into(),
        spec.is_closed().into(),
        interval.kind.label().into(),
        interval.lower.into(),
        interval.upper.into(),
        conf.into(),
    ]);
    t.push(row);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PosteriorKind {
    /// Uniform prior on the mean vector.
    Uniform,
    /// Flat prior on θ with the marginal likelihood of D.
    Reference,
    /// Jeffreys prior of the marginal model of D.
    Jeffreys,
}

impl PosteriorKind {
    fn label(self) -> &'static str {
        match self {
            PosteriorKind::Uniform => "UP",
            PosteriorKind::Reference => "RP",
            PosteriorKind::Jeffreys => "RP-jeffreys",
        }
    }

    fn build(self, obs: &Observed) -> confdist::Result<PosteriorCurve> {
        match self {
            PosteriorKind::Uniform => PosteriorCurve::uniform(obs.model, obs.d),
            PosteriorKind::Reference => PosteriorCurve::reference(obs.model, obs.d),
            PosteriorKind::Jeffreys => PosteriorCurve::reference_with(obs.model, obs.d, ReferencePrior::MarginalJeffreys),
        }
    }
}

pub const POSTERIOR_COLUMNS: &[&str] = &["d", "sigma", "k", "method", "theta", "cdf", "density", "median"];

pub fn posterior(obs: &Observed, kind: PosteriorKind, thetas: &[f64]) -> Result<Table> {
    let post = kind.build(obs)?;
    let median = post.median()?;
    let mut t = Table::new(POSTERIOR_COLUMNS);
    for &theta in thetas {
        let mut row = obs.lead();
        row.extend([kind.label().into(), theta.into(), post.cdf(theta)?.into(), post.density(theta)?.into(), median.into()]);
        t.push(row);
    }
    Ok(t)
}

pub const BELIEF_COLUMNS: &[&str] =
    &["d", "sigma", "k", "base", "R", "belief_h0", "plausibility_h0", "belief_h1", "plausibility_h1", "median", "alpha", "reject_h0"];

/// Belief and plausibility of `H₀ = [0, R]` and `H₁ = (R, ∞)`, and the
/// belief test of `H₀` at `alpha`.
pub fn belief(obs: &Observed, base: BeliefBase, r: f64, alpha: f64) -> Result<Table> {
    let curve = match base {
        BeliefBase::Cd => BeliefCurve::from_cd(ConfidenceCurve::new(obs.model, obs.d)?),
        BeliefBase::Up => BeliefCurve::from_up(PosteriorCurve::uniform(obs.model, obs.d)?)?,
    };
    let h0 = Proposition::at_most(r)?;
    let h1 = h0.complement();
    let decision = curve.belief_test(&h0, alpha)?;
    let mut t = Table::new(BELIEF_COLUMNS);
    let mut row = obs.lead();
    row.extend([
        base_label(base).into(),
        r.into(),
        curve.belief(&h0).into(),
        curve.plausibility_of_set(&h0).into(),
        curve.belief(&h1).into(),
        curve.plausibility_of_set(&h1).into(),
        curve.median()?.into(),
        alpha.into(),
        decision.reject.into(),
    ]);
    t.push(row);
    Ok(t)
}

fn base_label(base: BeliefBase) -> &'static str {
    match base {
        BeliefBase::Cd => "CD",
        BeliefBase::Up => "UP",
    }
}

pub const ASSESS_COLUMNS: &[&str] = &["d", "sigma", "k", "R", "C", "G", "RP", "Bel", "Bel_G", "point_mass"];

/// Confidence, posterior probability and belief of `H₀ = [0, R]`.
pub fn assess(obs: &Observed, r: f64) -> Result<Table> {
    let h0 = Proposition::at_most(r)?;
    let cd = ConfidenceCurve::new(obs.model, obs.d)?;
    let up = PosteriorCurve::uniform(obs.model, obs.d)?;
    let rp = PosteriorCurve::reference(obs.model, obs.d)?;
    let mut t = Table::new(ASSESS_COLUMNS);
    let mut row = obs.lead();
    row.extend([
        r.into(),
        cd.confidence_of_set(&h0).into(),
        up.prob_of_set(&h0).into(),
        rp.prob_of_set(&h0).into(),
        BeliefCurve::from_cd(cd).belief(&h0).into(),
        BeliefCurve::from_up(up)?.belief(&h0).into(),
        cd.point_mass().into(),
    ]);
    t.push(row);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    /// CI coverage of θ₀.
    Coverage,
    /// Average of C(θ;D) and G(θ;D).
    AverageCdf,
    /// Average C, Bel, G and Bel_G of H₀ = [0, R].
    Collision,
}

pub const SIM_COLUMNS: &[&str] = &["experiment", "method", "theta0", "sigma", "k", "at", "estimate", "mc_se", "n_reps"];

/// Settings for `sim` beyond the grid.
#[derive(Debug, Clone)]
pub struct SimSettings {
    pub methods: Vec<Method>,
    pub spec: IntervalSpec,
    pub eval_thetas: Vec<f64>,
    pub r: f64,
}

pub fn sim(lab: &Lab, experiment: Experiment, grid: &ExperimentGrid, s: &SimSettings) -> Result<Table> {
    let mut t = Table::new(SIM_COLUMNS);
    let reports = match experiment {
        Experiment::Coverage => s.methods.iter().map(|&m| lab.coverage_sim(grid, m, &s.spec)).collect::<Result<Vec<_>, _>>()?,
        Experiment::AverageCdf => vec![lab.average_cdf_sim(grid, &s.eval_thetas, &s.methods)?],
        Experiment::Collision => vec![lab.collision_confidence_sim(grid, s.r)?],
    };
    for report in &reports {
        push_report(&mut t, report, &[]);
    }
    Ok(t)
}

fn push_report(t: &mut Table, report: &SimReport, extra: &[Field]) {
    for c in &report.cells {
        let mut row: Vec<Field> = extra.to_vec();
        row.extend([
            report.experiment_id.as_str().into(),
            c.method.as_str().into(),
            c.theta0.into(),
            c.sigma.into(),
            c.k.into(),
            c.at.into(),
            c.estimate.into(),
            c.mc_se.into(),
            c.n_reps.into(),
        ]);
        t.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Observed intervals against d and the classification thresholds.
    Ci,
    /// Average C(θ;D) and G(θ;D) curves.
    Cumulatives,
    /// Coverage of 80% intervals.
    Coverage,
    /// Average confidences and beliefs of collision.
    Collision,
}

impl Figure {
    pub fn default_reps(self) -> u64 {
        match self {
            Figure::Ci => 0,
            Figure::Cumulatives | Figure::Coverage => 10_000,
            Figure::Collision => 100_000,
        }
    }
}

pub const FIGURE_CI_COLUMNS: &[&str] = &["row_type", "alpha", "beta", "sigma", "d", "kind", "lower", "upper"];
pub const FIGURE_COVERAGE_COLUMNS: &[&str] =
    &["beta", "experiment", "method", "theta0", "sigma", "k", "at", "estimate", "mc_se", "n_reps"];

fn steps(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|i| from + step * i as f64).collect()
}

pub fn figure(lab: &Lab, name: Figure, reps: u64, seed: u64) -> Result<Table> {
    match name {
        Figure::Ci => figure_ci(),
        Figure::Cumulatives => {
            let grid = ExperimentGrid::new(vec![1.0, 8.0], vec![0.1, 1.0, 5.0, 20.0], vec![2], reps, seed)?;
            let mut t = Table::new(SIM_COLUMNS);
            push_report(&mut t, &lab.average_cdf_sim(&grid, &steps(0.0, 24.0, 0.5), &[Method::Cd, Method::Up])?, &[]);
            Ok(t)
        }
        Figure::Coverage => {
            let thetas = vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
            let grid = ExperimentGrid::new(thetas, vec![1.0, 5.0, 20.0], vec![2, 100], reps, seed)?;
            let mut t = Table::new(FIGURE_COVERAGE_COLUMNS);
            // two-sided and upper one-sided 80% intervals
            for beta in [0.1, 0.2] {
                let spec = IntervalSpec::half_open(0.8, beta)?;
                for method in [Method::Cd, Method::Up, Method::Rp] {
                    push_report(&mut t, &lab.coverage_sim(&grid, method, &spec)?, &[beta.into()]);
                }
            }
            Ok(t)
        }
        Figure::Collision => {
            let grid = ExperimentGrid::new(vec![1.0, 8.0], steps(0.25, 20.0, 0.25), vec![2], reps, seed)?;
            let mut t = Table::new(SIM_COLUMNS);
            push_report(&mut t, &lab.collision_confidence_sim(&grid, 2.0)?, &[]);
            Ok(t)
        }
    }
}

fn figure_ci() -> Result<Table> {
    let (beta, sigma) = (0.05, 1.0);
    let model = NormMean::new(2, sigma)?;
    let mut t = Table::new(FIGURE_CI_COLUMNS);
    for alpha in [0.95, 0.9, 0.6] {
        let spec = IntervalSpec::half_open(alpha, beta)?;
        let q0 = |level: f64| d_quantile(QuantileQuery { alpha: level, theta: 0.0, sigma, k: 2 });
        let two = if alpha + beta < 1.0 { Some(q0(1.0 - alpha - beta)?) } else { None };
        for (kind, d) in [("two-sided", two), ("one-sided", Some(q0(1.0 - beta)?))] {
            if let Some(d) = d {
                t.push(vec!["threshold".into(), alpha.into(), beta.into(), sigma.into(), d.into(), kind.into(), Field::Missing, Field::Missing]);
            }
        }
        for d in steps(0.0, 5.0, 0.05) {
            let ci = ci_observe(d, &spec, &model)?;
            t.push(vec![
                "interval".into(),
                alpha.into(),
                beta.into(),
                sigma.into(),
                d.into(),
                ci.kind.label().into(),
                ci.lower.into(),
                ci.upper.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn lab(sequential: bool) -> Lab {
    Lab::new(if sequential { Execution::Sequential } else { Execution::default() })
}
