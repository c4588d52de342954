//! Kullback–Leibler divergences, risks and the integrated regret of a Bayes
//! predictive rule against the benchmark, with the identity report pairing
//! the regret with the energy of `√M^π`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bayes::{benchmark_predictive, PosteriorSystem, PredictiveKernel, PriorKind, PriorSpec};
use crate::energy::{energy_finite_h, energy_gradient_local, energy_spectral, DEFAULT_H_SCHEDULE};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, GriddedFunction};
use crate::levy::{model_density, model_density_shifted, symmetrize, LevyTriplet, LevyMeasureSpec};
use crate::quad;

/// Floor applied to both densities inside logarithms.
pub const DENSITY_FLOOR: f64 = 1e-300;
/// Points where `p < KL_CUTOFF · max p` do not contribute to `p ln(p/q)`.
pub const KL_CUTOFF: f64 = 1e-15;
/// Risk integrals drop `x` where `p(x | θ) < RISK_CUTOFF · max p`.
pub const RISK_CUTOFF: f64 = 1e-12;
/// Largest relative marginal mass that may sit on untrusted rows.
pub const DEFICIT_LIMIT: f64 = 1e-3;
/// Allowed relative gap between the spectral and finite-h energies.
pub const FINITE_H_AGREEMENT: f64 = 5e-3;
/// Allowed relative gap between the spectral and finite-difference energies.
pub const GRADIENT_AGREEMENT: f64 = 1e-2;
/// Grid half-width of the Gaussian reports in units of the marginal standard deviation.
pub const GAUSSIAN_HALF_WIDTHS: f64 = 12.0;
/// Grid size of the Gaussian reports.
pub const GAUSSIAN_GRID_N: usize = 2048;

fn trapezoid_weight(j: usize, n: usize) -> f64 {
    if j == 0 || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// `∫ p ln(p/q)` by the trapezoid rule on a common grid.
///
/// Both densities are floored at [`DENSITY_FLOOR`]; points where `p` is below
/// [`KL_CUTOFF`] times its maximum are skipped. Returns `+∞` when `q` vanishes
/// on the whole support of `p`.
pub fn kl_divergence(p: &GriddedFunction, q: &GriddedFunction) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::GridMismatch);
    }
    let peak = p.max();
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::param("p", "must be a density with positive values"));
    }
    let cut = KL_CUTOFF * peak;
    let n = p.len();
    let mut sum = 0.0;
    let mut q_seen = false;
    for j in 0..n {
        let pv = p.values[j];
        if pv < cut {
            continue;
        }
        let qv = q.values[j];
        q_seen |= qv > DENSITY_FLOOR;
        let (pf, qf) = (pv.max(DENSITY_FLOOR), qv.max(DENSITY_FLOOR));
        sum += trapezoid_weight(j, n) * pf * (pf / qf).ln();
    }
    if !q_seen {
        return Ok(f64::INFINITY);
    }
    Ok((sum * p.grid.spacing()).max(0.0))
}

/// `a ln(a/b) − a + b` for lumped masses.
fn lumped(a: f64, b: f64) -> f64 {
    let (a, b) = (a.max(0.0), b.max(0.0));
    if a <= DENSITY_FLOOR {
        return b;
    }
    a * (a / b.max(DENSITY_FLOOR)).ln() - a + b
}

/// Mass of a density beyond the grid, per side when known.
#[derive(Debug, Clone, Copy)]
enum OffGrid {
    Sides { left: f64, right: f64 },
    Total(f64),
}

impl OffGrid {
    fn total(self) -> f64 {
        match self {
            OffGrid::Sides { left, right } => left + right,
            OffGrid::Total(t) => t,
        }
    }

    fn divergence(self, other: OffGrid) -> f64 {
        match (self, other) {
            (OffGrid::Sides { left: a, right: b }, OffGrid::Sides { left: c, right: d }) => lumped(a, c) + lumped(b, d),
            _ => lumped(self.total(), other.total()),
        }
    }
}

/// `∫(p ln(p/q) − p + q)` over the grid plus the lumped off-grid term.
///
/// For normalized densities this equals the Kullback–Leibler divergence, and
/// the integrand is nonnegative, so truncation to the grid only loses the
/// second-order mismatch beyond it.
fn row_divergence(p: &[f64], q: &[f64], s: f64, p_off: OffGrid, q_off: OffGrid) -> f64 {
    let n = p.len();
    let peak = p.iter().copied().fold(0.0, f64::max);
    let cut = KL_CUTOFF * peak;
    let mut sum = 0.0;
    for j in 0..n {
        let (pv, qv) = (p[j].max(0.0), q[j].max(0.0));
        let term = if pv < cut {
            qv - pv
        } else {
            let (pf, qf) = (pv.max(DENSITY_FLOOR), qv.max(DENSITY_FLOOR));
            pf * (pf / qf).ln() - pf + qf
        };
        sum += trapezoid_weight(j, n) * term;
    }
    (sum * s + p_off.divergence(q_off)).max(0.0)
}

/// Off-grid mass of row `i` of a rule.
fn rule_off_grid(rule: &PredictiveKernel, grid: &Grid1D, i: usize) -> Result<OffGrid> {
    match rule {
        PredictiveKernel::Translation(q) => {
            let n = grid.len();
            let s = grid.spacing();
            let (a, b) = q.grid.cell_bounds();
            let (tail_left, tail_right) = q.tail_model.map_or((0.0, 0.0), |t| (t.mass_beyond(-a), t.mass_beyond(b)));
            let left = q.values[..n - i].iter().sum::<f64>() * s + tail_left;
            let right = q.values[2 * n - i..].iter().sum::<f64>() * s + tail_right;
            Ok(OffGrid::Sides { left, right })
        }
        PredictiveKernel::Gridded(_) => Ok(OffGrid::Total(rule.off_grid_mass(grid, i)?)),
    }
}

/// A Kullback–Leibler risk with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskEstimate {
    pub value: f64,
    /// Mass of `p(· | θ)` left out of the outer integral.
    pub deficit: f64,
    /// Set when an untrusted rule row lies inside the support of `p(· | θ)`.
    pub flagged: bool,
}

/// `∫ KL(p(· | θ) ‖ rule(· | x)) p(x | θ) dx` on the grid.
pub fn kl_risk(model: &LevyTriplet, rule: &PredictiveKernel, theta: f64, grid: &Grid1D) -> Result<RiskEstimate> {
    if !theta.is_finite() {
        return Err(Error::param("theta", "must be finite"));
    }
    let p = model_density_shifted(model, grid, theta)?;
    let n = grid.len();
    let s = grid.spacing();
    let (a, b) = grid.cell_bounds();
    let p_off = match p.tail_model {
        Some(t) if theta > a && theta < b => OffGrid::Sides { left: t.mass_beyond(theta - a), right: t.mass_beyond(b - theta) },
        _ => OffGrid::Total((1.0 - p.integral()).max(0.0)),
    };
    let cut = RISK_CUTOFF * p.max();
    let (mut value, mut included, mut flagged) = (0.0, 0.0, false);
    for i in 0..n {
        let px = p.values[i];
        if px < cut {
            continue;
        }
        if rule.is_untrusted(i) {
            flagged = true;
            continue;
        }
        let row = rule.row(grid, i)?;
        let d = row_divergence(&p.values, &row, s, p_off, rule_off_grid(rule, grid, i)?);
        let w = trapezoid_weight(i, n) * px * s;
        value += w * d;
        included += w;
    }
    let deficit = (1.0 - included).max(0.0);
    if deficit > DEFICIT_LIMIT {
        log::info!("kl_risk at θ = {theta}: outer mass deficit {deficit:.3e}");
    }
    Ok(RiskEstimate { value, deficit, flagged })
}

/// Plug-in rule `p̂(y | x) = p(y | θ = x)`.
pub fn plug_in_predictive(model: &LevyTriplet, grid: &Grid1D) -> Result<PredictiveKernel> {
    model.require_one_dimensional()?;
    let n = grid.len();
    let wide = Grid1D::symmetric(n as f64 * grid.spacing(), 2 * n)?;
    Ok(PredictiveKernel::Translation(model_density(model, &wide)?))
}

/// Integrated regret with the relative marginal mass left out on untrusted rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegretEstimate {
    pub value: f64,
    pub deficit: f64,
}

fn regret_of(model: &LevyTriplet, system: &PosteriorSystem) -> Result<RegretEstimate> {
    if matches!(system.prior.kind, PriorKind::Uniform) {
        return Ok(RegretEstimate { value: 0.0, deficit: 0.0 });
    }
    let grid = system.grid;
    let n = grid.len();
    let s = grid.spacing();
    let bench = benchmark_predictive(model, &grid)?;
    let m = &system.marginal.function.values;
    let (mut value, mut total, mut excluded) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let w = trapezoid_weight(i, n) * m[i] * s;
        total += w;
        if system.kernel.is_untrusted(i) {
            excluded += w;
            continue;
        }
        let k = system.kernel.row(&grid, i)?;
        let q = bench.row(&grid, i)?;
        let k_off = OffGrid::Total(system.kernel.off_grid_mass(&grid, i)?);
        value += w * row_divergence(&k, &q, s, k_off, rule_off_grid(&bench, &grid, i)?);
    }
    let deficit = if total > 0.0 { excluded / total } else { 0.0 };
    if deficit > 0.0 {
        log::info!("integrated regret: {deficit:.3e} of the marginal mass lies on untrusted rows");
    }
    if deficit > DEFICIT_LIMIT {
        return Err(Error::Deficit { deficit, limit: DEFICIT_LIMIT });
    }
    Ok(RegretEstimate { value, deficit })
}

/// `∫ KL(p̂^π(· | x) ‖ p̂^{π_U}(· | x)) M^π(x) dx` over the grid.
///
/// Improper priors give the σ-finite integral over the grid without normalization.
pub fn integrated_regret(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<f64> {
    let system = PosteriorSystem::new(model, prior, grid)?;
    Ok(regret_of(model, &system)?.value)
}

/// Both sides of the entropy–energy pairing for one (model, prior, grid).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub model: String,
    pub prior: String,
    pub grid: Grid1D,
    pub lhs_regret: f64,
    pub rhs_spectral: f64,
    pub rhs_finite_h: f64,
    /// Finite-difference energy, for Gaussian models only.
    pub rhs_gradient: Option<f64>,
    /// `lhs / rhs`, absent when the energy vanishes.
    pub ratio_spectral: Option<f64>,
    pub ratio_finite_h: Option<f64>,
    pub ratio_gradient: Option<f64>,
    pub deficit: f64,
    pub notes: String,
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    (rhs > 0.0).then(|| lhs / rhs)
}

/// Integrated regret next to the energies of `√M^π`; checks only that the
/// entries are finite and nonnegative and that the energy estimators agree.
pub fn verify_identity(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<IdentityReport> {
    let system = PosteriorSystem::new(model, prior, grid)?;
    let regret = regret_of(model, &system)?;
    let sym = symmetrize(model)?;
    let root = system.marginal.sqrt();
    let spectral = energy_spectral(&sym, &root)?;
    let finite_h = energy_finite_h(&sym, &root, &DEFAULT_H_SCHEDULE)?;
    let gradient = if model.levy_measure == LevyMeasureSpec::None {
        Some(energy_gradient_local(model.gaussian_variance, &root)?.value)
    } else {
        None
    };
    let (lhs, sp, fh) = (regret.value, spectral.value, finite_h.value);
    for (name, v) in [("lhs", lhs), ("rhs_spectral", sp), ("rhs_finite_h", fh), ("rhs_gradient", gradient.unwrap_or(0.0))] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::BoundViolation { context: format!("identity report entry {name}"), min: v, max: v });
        }
    }
    let slack = spectral.tolerance + finite_h.tolerance + 1e-12;
    if (sp - fh).abs() > (FINITE_H_AGREEMENT * sp).max(slack) {
        return Err(Error::Mismatch { context: "spectral and finite-h energies".into(), left: sp, right: fh });
    }
    if let Some(g) = gradient {
        if (sp - g).abs() > GRADIENT_AGREEMENT * sp + 1e-12 {
            return Err(Error::Mismatch { context: "spectral and finite-difference energies".into(), left: sp, right: g });
        }
    }
    let notes = format!(
        "spectral cutoff change {:.2e}; finite-h extrapolation change {:.2e}; untrusted mass {:.2e}",
        spectral.tolerance, finite_h.tolerance, regret.deficit
    );
    Ok(IdentityReport {
        model: model.label(),
        prior: prior.label(),
        grid: *grid,
        lhs_regret: lhs,
        rhs_spectral: sp,
        rhs_finite_h: fh,
        rhs_gradient: gradient,
        ratio_spectral: ratio(lhs, sp),
        ratio_finite_h: ratio(lhs, fh),
        ratio_gradient: gradient.and_then(|g| ratio(lhs, g)),
        deficit: regret.deficit,
        notes,
    })
}

/// Gaussian prior of variance `σ²`, or a point mass at zero when `σ² = 0`.
pub fn gaussian_prior(sigma2: f64) -> Result<PriorSpec> {
    if sigma2 == 0.0 {
        PriorSpec::point_mass(0.0)
    } else {
        PriorSpec::gaussian(sigma2)
    }
}

/// Identity reports for Gaussian noise of variance `v` across prior variances,
/// each on a grid of half-width `12√(v + σ²)` with 2048 points.
pub fn gaussian_identity_sweep(v: f64, sigma2: &[f64]) -> Result<Vec<IdentityReport>> {
    let model = LevyTriplet::gaussian(v)?;
    sigma2
        .iter()
        .map(|&s2| {
            if !(s2 >= 0.0 && s2.is_finite()) {
                return Err(Error::param("sigma2", format!("must be finite and ≥ 0, got {s2}")));
            }
            let grid = Grid1D::symmetric(GAUSSIAN_HALF_WIDTHS * (v + s2).sqrt(), GAUSSIAN_GRID_N)?;
            verify_identity(&model, &gaussian_prior(s2)?, &grid)
        })
        .collect()
}

/// `½ ln(2(v + σ²)/(v + 2σ²))`, the regret of the Gaussian prior under Gaussian noise.
pub fn gaussian_regret_closed_form(v: f64, sigma2: f64) -> f64 {
    0.5 * (2.0 * (v + sigma2) / (v + 2.0 * sigma2)).ln()
}

/// Quadratic-risk and energy quantities at one noise level `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrownPoint {
    pub w: f64,
    /// `(B_Q(MLE) − B_Q(posterior mean))/w²`.
    pub risk_difference: f64,
    /// `4∫(∂ₓ√M(x; w))² dx`.
    pub gradient_energy: f64,
}

/// Cross-checks of the Gaussian reduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianReduction {
    pub v: f64,
    pub sigma2: f64,
    pub points: Vec<BrownPoint>,
    /// `2∫_{v/2}^{v} ∫(∂ₓ√M(x; w))² dx dw`.
    pub bgx_integral: f64,
    /// `½ ln(2(v + σ²)/(v + 2σ²))`.
    pub lhs_closed_form: f64,
    pub max_brown_gap: f64,
    pub bgx_gap: f64,
}

/// Tolerance of the two equalities asserted by [`gaussian_reduction_report`].
pub const REDUCTION_TOL: f64 = 1e-6;

/// Nodes per posterior when computing quadratic risks.
const POSTERIOR_NODES: usize = 401;

/// Marginal `M(x; w)` and posterior variance `Var(θ | x)` by quadrature over `θ`.
fn posterior_moments(x: f64, w: f64, sigma2: f64) -> (f64, f64) {
    if sigma2 == 0.0 {
        return ((-x * x / (2.0 * w)).exp() / (2.0 * PI * w).sqrt(), 0.0);
    }
    let half = GAUSSIAN_HALF_WIDTHS * w.sqrt();
    let h = 2.0 * half / (POSTERIOR_NODES - 1) as f64;
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for k in 0..POSTERIOR_NODES {
        let theta = x - half + k as f64 * h;
        let lik = (-(x - theta).powi(2) / (2.0 * w)).exp() / (2.0 * PI * w).sqrt();
        let prior = (-theta * theta / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).sqrt();
        let weight = trapezoid_weight(k, POSTERIOR_NODES) * lik * prior * h;
        m0 += weight;
        m1 += weight * theta;
        m2 += weight * theta * theta;
    }
    if m0 <= 0.0 {
        return (0.0, 0.0);
    }
    let mean = m1 / m0;
    (m0, (m2 / m0 - mean * mean).max(0.0))
}

fn brown_point(w: f64, sigma2: f64, grid: &Grid1D, unit: &LevyTriplet) -> Result<BrownPoint> {
    let s = grid.spacing();
    let moments: Vec<(f64, f64)> = grid.points().iter().map(|&x| posterior_moments(x, w, sigma2)).collect();
    // B_Q(MLE) = E(x − θ)² = w; B_Q(posterior mean) = ∫ Var(θ | x) M(x) dx.
    let bayes_risk: f64 = moments.iter().map(|(m, var)| m * var).sum::<f64>() * s;
    let risk_difference = (w - bayes_risk) / (w * w);
    let root = GriddedFunction::new(*grid, moments.iter().map(|(m, _)| m.sqrt()).collect())?;
    let gradient_energy = 4.0 * energy_spectral(unit, &root)?.value;
    Ok(BrownPoint { w, risk_difference, gradient_energy })
}

/// Brown's identity per noise level and the integral of the energies over
/// `w ∈ [v/2, v]` against the closed-form regret.
pub fn gaussian_reduction_report(v: f64, sigma2: f64) -> Result<GaussianReduction> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param("v", format!("must be positive, got {v}")));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::param("sigma2", format!("must be finite and ≥ 0, got {sigma2}")));
    }
    let grid = Grid1D::symmetric(GAUSSIAN_HALF_WIDTHS * (v + sigma2).sqrt(), GAUSSIAN_GRID_N)?;
    // ψ̃ = ξ², so the spectral energy is ∫(f′)².
    let unit = symmetrize(&LevyTriplet::gaussian(1.0)?)?;
    let points = [0.5 * v, 0.75 * v, v]
        .iter()
        .map(|&w| brown_point(w, sigma2, &grid, &unit))
        .collect::<Result<Vec<_>>>()?;
    let max_brown_gap = points.iter().map(|p| (p.risk_difference - p.gradient_energy).abs()).fold(0.0, f64::max);
    let failure = std::cell::RefCell::new(None);
    let integrand = |w: f64| match brown_point(w, sigma2, &grid, &unit) {
        Ok(p) => 0.5 * p.gradient_energy,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let bgx_integral = quad::integrate(&integrand, 0.5 * v, v, 1e-10)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let lhs_closed_form = gaussian_regret_closed_form(v, sigma2);
    let bgx_gap = (bgx_integral - lhs_closed_form).abs();
    if max_brown_gap > REDUCTION_TOL {
        let worst = points.iter().max_by(|a, b| {
            (a.risk_difference - a.gradient_energy).abs().total_cmp(&(b.risk_difference - b.gradient_energy).abs())
        });
        let p = worst.expect("three noise levels");
        return Err(Error::Mismatch { context: format!("Brown identity at w = {}", p.w), left: p.risk_difference, right: p.gradient_energy });
    }
    if bgx_gap > REDUCTION_TOL {
        return Err(Error::Mismatch { context: "energy integral against the closed-form regret".into(), left: bgx_integral, right: lhs_closed_form });
    }
    Ok(GaussianReduction { v, sigma2, points, bgx_integral, lhs_closed_form, max_brown_gap, bgx_gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(grid: Grid1D, mean: f64, var: f64) -> GriddedFunction {
        GriddedFunction::from_fn(grid, |x| (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
    }

    #[test]
    fn gaussian_kl_closed_forms() {
        let grid = Grid1D::symmetric(30.0, 4096).unwrap();
        let p = normal(grid, 0.0, 1.0);
        assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-12);
        let shifted = kl_divergence(&p, &normal(grid, 1.0, 1.0)).unwrap();
        assert!((shifted - 0.5).abs() < 1e-6, "{shifted}");
        let wider = kl_divergence(&p, &normal(grid, 0.0, 2.0)).unwrap();
        assert!((wider - 0.5 * (2f64.ln() - 0.5)).abs() < 1e-6, "{wider}");
    }

    #[test]
    fn kl_against_vanishing_q_is_infinite() {
        let grid = Grid1D::symmetric(10.0, 256).unwrap();
        let p = normal(grid, 0.0, 1.0);
        let zero = GriddedFunction::constant(grid, 0.0);
        assert_eq!(kl_divergence(&p, &zero).unwrap(), f64::INFINITY);
        let other = GriddedFunction::constant(Grid1D::symmetric(5.0, 256).unwrap(), 1.0);
        assert_eq!(kl_divergence(&p, &other), Err(Error::GridMismatch));
    }

    #[test]
    fn gaussian_benchmark_risk_is_half_log_two() {
        // KL(N(θ,1) ‖ N(x,2)) = ½(ln 2 + (1 + (x−θ)²)/2 − 1), averaged over x ~ N(θ,1).
        let model = LevyTriplet::gaussian(1.0).unwrap();
        let grid = Grid1D::symmetric(20.0, 2048).unwrap();
        let bench = benchmark_predictive(&model, &grid).unwrap();
        for theta in [-3.0, 0.0, 3.0] {
            let r = kl_risk(&model, &bench, theta, &grid).unwrap();
            assert!((r.value - 0.5 * 2f64.ln()).abs() < 1e-6, "{theta}: {}", r.value);
            assert!(!r.flagged);
        }
    }

    #[test]
    fn cauchy_benchmark_has_constant_risk_and_beats_plug_in() {
        let model = LevyTriplet::cauchy(1.0).unwrap();
        let grid = Grid1D::symmetric(2000.0, 8192).unwrap();
        let bench = benchmark_predictive(&model, &grid).unwrap();
        let plug = plug_in_predictive(&model, &grid).unwrap();
        let r0 = kl_risk(&model, &bench, 0.0, &grid).unwrap().value;
        let r3 = kl_risk(&model, &bench, 3.0, &grid).unwrap().value;
        assert!((r0 - r3).abs() < 1e-4, "{r0} {r3}");
        for theta in [0.0, 1.0, 2.0] {
            let b = kl_risk(&model, &bench, theta, &grid).unwrap().value;
            let p = kl_risk(&model, &plug, theta, &grid).unwrap().value;
            assert!(b <= p, "{theta}: {b} vs {p}");
        }
    }

    #[test]
    fn gaussian_regret_matches_closed_form() {
        let model = LevyTriplet::gaussian(1.0).unwrap();
        for (s2, expected) in [(1.0_f64, 0.5 * (4.0f64 / 3.0).ln()), (0.0, 0.5 * 2f64.ln())] {
            let grid = Grid1D::symmetric(12.0 * (1.0 + s2).sqrt(), 2048).unwrap();
            let r = integrated_regret(&model, &gaussian_prior(s2).unwrap(), &grid).unwrap();
            assert!((r - expected).abs() < 1e-4 * expected, "{s2}: {r} vs {expected}");
        }
        let grid = Grid1D::symmetric(20.0, 512).unwrap();
        assert_eq!(integrated_regret(&model, &PriorSpec::uniform(), &grid).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_regret_decreases_in_prior_variance() {
        let reports = gaussian_identity_sweep(1.0, &[0.0, 1.0, 10.0, 100.0]).unwrap();
        for w in reports.windows(2) {
            assert!(w[1].lhs_regret < w[0].lhs_regret);
            assert!(w[1].ratio_spectral.unwrap() < w[0].ratio_spectral.unwrap());
        }
        let r = &reports[2];
        assert!((r.lhs_regret - 0.5 * (22.0f64 / 21.0).ln()).abs() < 1e-4 * r.lhs_regret);
        assert!((r.rhs_spectral - 1.0 / 44.0).abs() < 1e-6);
    }

    #[test]
    fn uniform_identity_is_trivial() {
        let grid = Grid1D::symmetric(20.0, 512).unwrap();
        let r = verify_identity(&LevyTriplet::cauchy(1.0).unwrap(), &PriorSpec::uniform(), &grid).unwrap();
        assert_eq!(r.lhs_regret, 0.0);
        assert!(r.rhs_spectral.abs() < 1e-12);
        assert_eq!(r.ratio_spectral, None);
    }

    #[test]
    fn brown_identity_and_energy_integral() {
        let r = gaussian_reduction_report(1.0, 1.0).unwrap();
        let at_one = r.points.iter().find(|p| p.w == 1.0).unwrap();
        assert!((at_one.risk_difference - 0.5).abs() < 1e-6);
        assert!((at_one.gradient_energy - 0.5).abs() < 1e-6);
        assert!((r.bgx_integral - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-6);
        let flat = gaussian_reduction_report(1.0, 1e6).unwrap();
        assert!(flat.points.iter().all(|p| p.risk_difference < 1e-5 && p.gradient_energy < 1e-5));
        assert!(flat.bgx_integral < 1e-5 && flat.lhs_closed_form < 1e-5);
        let point = gaussian_reduction_report(2.0, 0.0).unwrap();
        assert!((point.bgx_integral - 0.5 * 2f64.ln()).abs() < 1e-6);
    }
}
