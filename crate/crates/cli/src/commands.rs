//! Command implementations producing output tables.

use idregret::bayes::marginal_density;
use idregret::classify::{
    aharmonic_tail_test, capacity_profile, catalog_report, classify_model, MarginalTail, Verdict, VerdictStatus,
};
use idregret::energy::{
    blyth_sequence_energies, default_killing, energy_finite_h, energy_gradient_local, energy_spectral,
    rate_function_lower_bound, DEFAULT_FAMILY_SIZE, DEFAULT_H_SCHEDULE, DEFAULT_SEED,
};
use idregret::regret::{integrated_regret, verify_identity, GAUSSIAN_GRID_N, GAUSSIAN_HALF_WIDTHS};
use idregret::suite::{run_suite, CriterionOutcome};
use idregret::{symmetrize, Grid1D, LevyTriplet, PriorKind, PriorSpec};

use crate::config::{ConfigError, RunConfig};
use crate::output::{Cell, Table};

/// Failure of a run, split by exit status.
#[derive(Debug)]
pub enum RunError {
    /// Bad request: exit 3.
    Config(String),
    /// Numerical or tolerance failure: exit 2.
    Tolerance(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<idregret::Error> for RunError {
    fn from(e: idregret::Error) -> Self {
        if e.is_configuration() {
            RunError::Config(e.to_string())
        } else {
            RunError::Tolerance(e.to_string())
        }
    }
}

/// A table plus an optional tolerance failure found while filling it.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, failure: None }
    }
}

pub type RunResult = Result<Outcome, RunError>;

const DEFAULT_HALF_WIDTH: f64 = 100.0;
const DEFAULT_N: usize = 2048;

fn prior_param(prior: &PriorSpec) -> String {
    match prior.kind {
        PriorKind::Uniform => String::new(),
        PriorKind::GaussianProper { variance } => format!("sigma2={variance}"),
        PriorKind::PowerLaw { beta, core } => format!("beta={beta};r0={core}"),
        PriorKind::PointMass { location } => format!("location={location}"),
        PriorKind::StudentLike { beta } => format!("beta={beta}"),
    }
}

/// Gaussian pairs default to a grid of twelve predictive standard deviations.
fn default_grid(cfg: &RunConfig, model: &LevyTriplet, prior: &PriorSpec) -> Result<Grid1D, RunError> {
    let gaussian_v = (model.levy_measure.is_none()).then_some(model.gaussian_variance);
    let half = match (gaussian_v, prior.kind) {
        (Some(v), PriorKind::GaussianProper { variance }) => GAUSSIAN_HALF_WIDTHS * (v + variance).sqrt(),
        (Some(v), PriorKind::PointMass { .. } | PriorKind::Uniform) => GAUSSIAN_HALF_WIDTHS * v.sqrt(),
        _ => DEFAULT_HALF_WIDTH,
    };
    let n = if gaussian_v.is_some() { GAUSSIAN_GRID_N } else { DEFAULT_N };
    Ok(cfg.grid_or(half, n)?)
}

fn trait_name(v: &Verdict) -> String {
    match (v.finite_variance, v.alpha, v.beta) {
        (_, Some(a), Some(b)) => format!("stable_tail(alpha={a});marginal_tail(beta={b})"),
        (true, _, _) => "finite_variance".into(),
        (false, Some(a), None) => format!("stable_tail(alpha={a})"),
        _ => "unknown".into(),
    }
}

fn verdict_row(v: &Verdict) -> Vec<Cell> {
    let rule = if v.status == VerdictStatus::Decided {
        v.rule_fired.clone()
    } else {
        format!("{} [{:?}]", v.rule_fired, v.status)
    };
    vec![
        v.d.into(),
        trait_name(v).into(),
        format!("{:?}", v.recurrence).into(),
        format!("{:?}", v.admissibility).into(),
        rule.into(),
    ]
}

pub fn classify(cfg: &RunConfig) -> RunResult {
    let model = cfg.model()?;
    let mut t = Table::new(&["d", "trait", "recurrence", "admissibility", "rule"]);
    t.push(verdict_row(&classify_model(&model)?));
    let prior = cfg.prior()?;
    if let PriorKind::PowerLaw { beta, .. } = prior.kind {
        let alpha = model.levy_measure.stable_index().ok_or_else(|| {
            RunError::Config("the tail test for power-law priors needs a stable or Cauchy model".into())
        })?;
        let r_max = cfg.f64_or("schedule.r", 1e6)?;
        t.push(verdict_row(&aharmonic_tail_test(model.dimension, alpha, &MarginalTail::ClosedExponent(beta), r_max)?));
    }
    Ok(t.into())
}

pub fn regret(cfg: &RunConfig) -> RunResult {
    let model = cfg.model()?;
    let prior = cfg.prior()?;
    let grid = default_grid(cfg, &model, &prior)?;
    let value = integrated_regret(&model, &prior, &grid)?;
    let mut t = Table::new(&["model", "prior", "param", "regret", "grid_n"]);
    t.push(vec![model.label().into(), prior.label().into(), prior_param(&prior).into(), value.into(), grid.len().into()]);
    Ok(t.into())
}

pub fn identity(cfg: &RunConfig) -> RunResult {
    let model = cfg.model()?;
    let prior = cfg.prior()?;
    let grid = default_grid(cfg, &model, &prior)?;
    let r = verify_identity(&model, &prior, &grid)?;
    let mut t = Table::new(&[
        "model",
        "prior",
        "param",
        "lhs",
        "rhs_spectral",
        "rhs_finite_h",
        "rhs_gradient",
        "ratio",
        "grid_n",
    ]);
    t.push(vec![
        r.model.into(),
        r.prior.into(),
        prior_param(&prior).into(),
        r.lhs_regret.into(),
        r.rhs_spectral.into(),
        r.rhs_finite_h.into(),
        r.rhs_gradient.into(),
        r.ratio_spectral.into(),
        grid.len().into(),
    ]);
    Ok(t.into())
}

pub fn energy(cfg: &RunConfig) -> RunResult {
    let model = cfg.model()?;
    let prior = cfg.prior()?;
    let grid = default_grid(cfg, &model, &prior)?;
    let m = marginal_density(&model, &prior, &grid)?;
    let total = m.function.integral();
    let mu = m.function.map(|v| v / total);
    let root = mu.sqrt();
    let sym = symmetrize(&model)?;
    let schedule = cfg.list_or("schedule.h", &DEFAULT_H_SCHEDULE)?;
    let seed = cfg.usize_or("ascent.seed", DEFAULT_SEED as usize)? as u64;
    let family = cfg.usize_or("ascent.family", DEFAULT_FAMILY_SIZE)?;
    let mut estimates = vec![energy_spectral(&sym, &root)?, energy_finite_h(&sym, &root, &schedule)?];
    if model.levy_measure.is_none() {
        estimates.push(energy_gradient_local(sym.gaussian_variance / 2.0, &root)?);
    }
    estimates.push(rate_function_lower_bound(&sym, &mu, family, seed)?);
    let mut t = Table::new(&["model", "prior", "method", "value", "grid_n"]);
    for e in estimates {
        t.push(vec![
            model.label().into(),
            prior.label().into(),
            format!("{:?}", e.method).into(),
            e.value.into(),
            grid.len().into(),
        ]);
    }
    Ok(t.into())
}

pub fn blyth(cfg: &RunConfig) -> RunResult {
    let model = cfg.model()?;
    let grid = cfg.grid_or(200.0, DEFAULT_N)?;
    let schedule = cfg.list_or("schedule.n", &[1.0, 4.0, 16.0, 64.0, 256.0])?;
    let n_list: Vec<u32> = schedule
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                Ok(x as u32)
            } else {
                Err(RunError::Config(format!("schedule.n entry {x} is not a positive integer")))
            }
        })
        .collect::<Result<_, _>>()?;
    let energies = blyth_sequence_energies(&symmetrize(&model)?, &default_killing(&grid), &n_list)?;
    let mut t = Table::new(&["model", "n", "energy"]);
    for (n, e) in n_list.iter().zip(energies) {
        t.push(vec![model.label().into(), (*n as usize).into(), e.value.into()]);
    }
    Ok(t.into())
}

pub fn capacity(cfg: &RunConfig) -> RunResult {
    let model = cfg.model()?;
    let alpha = model
        .levy_measure
        .stable_index()
        .ok_or_else(|| RunError::Config("capacity profiles need a stable or Cauchy model".into()))?;
    let beta = cfg.f64_or("prior.beta", model.dimension as f64 - alpha)?;
    let radii = cfg.list_or("schedule.r", &[1e2, 1e3, 1e4])?;
    let records = capacity_profile(model.dimension, alpha, &MarginalTail::ClosedExponent(beta), &radii)?;
    let mut t = Table::new(&["d", "alpha", "beta", "R", "energy", "J", "product"]);
    for r in records {
        t.push(vec![
            model.dimension.into(),
            alpha.into(),
            beta.into(),
            r.r.into(),
            r.energy.into(),
            r.j.into(),
            r.product.into(),
        ]);
    }
    Ok(t.into())
}

pub fn catalog(_cfg: &RunConfig) -> RunResult {
    let mut t = Table::new(&["distribution", "d", "trait", "recurrence", "admissibility", "status", "alpha_hat", "rule"]);
    for row in catalog_report()? {
        let v = &row.verdict;
        t.push(vec![
            row.distribution.into(),
            row.d.into(),
            trait_name(v).into(),
            format!("{:?}", v.recurrence).into(),
            format!("{:?}", v.admissibility).into(),
            format!("{:?}", v.status).into(),
            row.tail_fit.map(|f| f.alpha_hat).into(),
            v.rule_fired.clone().into(),
        ]);
    }
    Ok(t.into())
}

pub fn suite(_cfg: &RunConfig) -> RunResult {
    let outcomes: Vec<CriterionOutcome> = run_suite(|o| {
        let status = if o.passed { "PASS" } else { "FAIL" };
        eprintln!("[{status}] criterion {:>2}: {} ({:.1?}) {}", o.id, o.title, o.elapsed, o.summary);
    });
    let mut t = Table::new(&["criterion", "title", "quantity", "value", "passed"]);
    for o in &outcomes {
        for m in &o.measurements {
            t.push(vec![(o.id as usize).into(), o.title.clone().into(), m.quantity.clone().into(), m.value.into(), o.passed.into()]);
        }
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| format!("criterion {}: {}", o.id, o.summary)).collect();
    Ok(Outcome { table: t, failure: (!failed.is_empty()).then(|| failed.join(" | ")) })
}
