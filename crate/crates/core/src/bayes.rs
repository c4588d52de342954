//! Priors on the location, marginal densities and Bayes predictive kernels.
//!
//! For a prior `π` the joint density `J(x, y) = ∫ p(x − θ) p(y − θ) π(θ) dθ`
//! is symmetric in `(x, y)`, the marginal is `M(x) = ∫ J(x, y) dy`, and the
//! predictive kernel is `K(y | x) = J(x, y)/M(x)`. On a grid with spacing `s`
//! the θ-integral runs over the grid points widened by a quarter of the grid
//! on each side; beyond them heavy-tailed noise contributes through an
//! adaptive quadrature of the far field.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::fft::{self, Convolver};
use crate::grid::{Grid1D, GriddedFunction, TailModel};
use crate::levy::{model_density, model_density_shifted, model_tail_density, symmetrize, transition_density, LevyTriplet};
use crate::quad;

/// Dense kernel budget.
pub const KERNEL_BUDGET: usize = 4096;
/// Marginal values below this flag a row as untrusted.
pub const UNTRUSTED_MARGINAL: f64 = 1e-300;
/// Largest `n·n_θ` for which the marginal is summed directly rather than by FFT.
const DIRECT_SUM_LIMIT: usize = 1 << 27;

/// Prior families on the location parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PriorKind {
    /// Lebesgue measure, density one.
    Uniform,
    /// Normal(0, σ²).
    GaussianProper { variance: f64 },
    /// Unnormalized `(r₀² + θ²)^{−β/2}`.
    PowerLaw { beta: f64, core: f64 },
    /// Dirac mass at `θ₀`.
    PointMass { location: f64 },
    /// Normalized `(1 + θ²)^{−β/2}`, `β > 1`.
    StudentLike { beta: f64 },
}

/// A prior with its symmetry and properness flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub symmetric: bool,
    pub proper: bool,
}

impl PriorSpec {
    pub fn new(kind: PriorKind) -> Result<Self> {
        let pos = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive and finite, got {v}")))
            }
        };
        let (symmetric, proper) = match kind {
            PriorKind::Uniform => (true, false),
            PriorKind::GaussianProper { variance } => {
                pos("sigma2", variance)?;
                (true, true)
            }
            PriorKind::PowerLaw { beta, core } => {
                pos("beta", beta)?;
                pos("core", core)?;
                (true, beta > 1.0)
            }
            PriorKind::PointMass { location } => {
                if !location.is_finite() {
                    return Err(Error::param("theta0", "must be finite"));
                }
                (location == 0.0, true)
            }
            PriorKind::StudentLike { beta } => {
                if !(beta > 1.0 && beta.is_finite()) {
                    return Err(Error::param("beta", format!("a proper Student-like prior needs β > 1, got {beta}")));
                }
                (true, true)
            }
        };
        Ok(Self { kind, symmetric, proper })
    }

    pub fn uniform() -> Self {
        Self { kind: PriorKind::Uniform, symmetric: true, proper: false }
    }

    pub fn gaussian(variance: f64) -> Result<Self> {
        Self::new(PriorKind::GaussianProper { variance })
    }

    pub fn power_law(beta: f64, core: f64) -> Result<Self> {
        Self::new(PriorKind::PowerLaw { beta, core })
    }

    pub fn point_mass(location: f64) -> Result<Self> {
        Self::new(PriorKind::PointMass { location })
    }

    pub fn student(beta: f64) -> Result<Self> {
        Self::new(PriorKind::StudentLike { beta })
    }

    /// Prior density at `θ` (zero for a point mass).
    pub fn density(&self, theta: f64) -> f64 {
        match self.kind {
            PriorKind::Uniform => 1.0,
            PriorKind::GaussianProper { variance } => {
                (-theta * theta / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
            }
            PriorKind::PowerLaw { beta, core } => power_law_scale(beta, core) * (core * core + theta * theta).powf(-0.5 * beta),
            PriorKind::PointMass { .. } => 0.0,
            PriorKind::StudentLike { beta } => (1.0 + theta * theta).powf(-0.5 * beta) / student_norm(beta),
        }
    }

    /// Leading power law of the density, if it has one.
    pub fn tail(&self) -> Option<TailModel> {
        match self.kind {
            PriorKind::Uniform => Some(TailModel { exponent: 0.0, coefficient: 1.0 }),
            PriorKind::PowerLaw { beta, core } => Some(TailModel { exponent: beta, coefficient: power_law_scale(beta, core) }),
            PriorKind::StudentLike { beta } => Some(TailModel { exponent: beta, coefficient: 1.0 / student_norm(beta) }),
            _ => None,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self.kind {
            PriorKind::Uniform => "uniform".into(),
            PriorKind::GaussianProper { variance } => format!("gaussian(sigma2={variance})"),
            PriorKind::PowerLaw { beta, core } => format!("powerlaw(beta={beta},r0={core})"),
            PriorKind::PointMass { location } => format!("point({location})"),
            PriorKind::StudentLike { beta } => format!("student(beta={beta})"),
        }
    }
}

/// `∫(1 + θ²)^{−β/2} dθ = √π Γ((β−1)/2)/Γ(β/2)`.
fn student_norm(beta: f64) -> f64 {
    PI.sqrt() * (ln_gamma(0.5 * (beta - 1.0)) - ln_gamma(0.5 * beta)).exp()
}

/// Normalizing factor of `(r₀² + θ²)^{−β/2}` when it is integrable, else 1.
fn power_law_scale(beta: f64, core: f64) -> f64 {
    if beta > 1.0 {
        core.powf(beta - 1.0) / student_norm(beta)
    } else {
        1.0
    }
}

/// The marginal `M^π` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalDensity {
    pub function: GriddedFunction,
    pub proper: bool,
}

impl MarginalDensity {
    pub fn sqrt(&self) -> GriddedFunction {
        self.function.sqrt()
    }
}

/// Conditional densities `K(y_j | x_i)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedKernel {
    pub grid: Grid1D,
    values: Vec<f64>,
    /// Rows whose marginal underflowed.
    pub untrusted: Vec<bool>,
    /// Mass of each row falling outside the grid cells.
    pub off_grid: Vec<f64>,
}

impl GriddedKernel {
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.len() + j]
    }
}

/// A predictive rule `p̂(y | x)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictiveKernel {
    /// `K(y | x) = q̃(y − x)`, with `q̃` on a symmetric grid of twice the length and the same spacing.
    Translation(GriddedFunction),
    Gridded(GriddedKernel),
}

impl PredictiveKernel {
    /// Row `K(y_j | x_i)` over the grid `grid` (which must match the kernel's spacing).
    pub fn row(&self, grid: &Grid1D, i: usize) -> Result<Vec<f64>> {
        match self {
            PredictiveKernel::Translation(q) => {
                let n = grid.len();
                if q.len() != 2 * n || (q.grid.spacing() - grid.spacing()).abs() > 1e-12 * grid.spacing() {
                    return Err(Error::GridMismatch);
                }
                Ok((0..n).map(|j| q.values[n + j - i]).collect())
            }
            PredictiveKernel::Gridded(k) => {
                if k.grid != *grid {
                    return Err(Error::GridMismatch);
                }
                Ok(k.row(i).to_vec())
            }
        }
    }

    /// Mass of row `i` on the grid plus the part beyond it.
    pub fn row_mass(&self, grid: &Grid1D, i: usize) -> Result<f64> {
        let on: f64 = self.row(grid, i)?.iter().sum::<f64>() * grid.spacing();
        Ok(on + self.off_grid_mass(grid, i)?)
    }

    /// Mass of row `i` that falls outside the grid cells.
    pub fn off_grid_mass(&self, grid: &Grid1D, i: usize) -> Result<f64> {
        match self {
            PredictiveKernel::Translation(q) => {
                let n = grid.len();
                let s = grid.spacing();
                let inside: f64 = q.values[n - i..2 * n - i].iter().sum::<f64>() * s;
                // `q̃` has unit total mass.
                Ok((1.0 - inside).max(0.0))
            }
            PredictiveKernel::Gridded(k) => Ok(k.off_grid[i]),
        }
    }

    pub fn is_untrusted(&self, i: usize) -> bool {
        match self {
            PredictiveKernel::Translation(_) => false,
            PredictiveKernel::Gridded(k) => k.untrusted[i],
        }
    }
}

/// `p̂^{π_U}(y | x) = q̃(y − x)` with `q̃` the time-one symmetrized density.
pub fn benchmark_predictive(model: &LevyTriplet, grid: &Grid1D) -> Result<PredictiveKernel> {
    model.require_one_dimensional()?;
    let sym = symmetrize(model)?;
    let n = grid.len();
    let wide = Grid1D::symmetric(n as f64 * grid.spacing(), 2 * n)?;
    Ok(PredictiveKernel::Translation(transition_density(&sym, 1.0, &wide)?))
}

/// Marginal, kernel and bookkeeping for one (model, prior, grid).
#[derive(Debug, Clone)]
pub struct PosteriorSystem {
    pub grid: Grid1D,
    pub prior: PriorSpec,
    pub marginal: MarginalDensity,
    pub kernel: PredictiveKernel,
}

impl PosteriorSystem {
    pub fn new(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<Self> {
        model.require_one_dimensional()?;
        if model.is_symmetrized() {
            return Err(Error::param("model", "expected a model triplet, got a symmetrized one"));
        }
        let n = grid.len();
        match prior.kind {
            PriorKind::Uniform => {
                let kernel = benchmark_predictive(model, grid)?;
                let function = GriddedFunction::constant(*grid, 1.0).with_tail(prior.tail().expect("uniform tail"));
                Ok(Self { grid: *grid, prior: *prior, marginal: MarginalDensity { function, proper: false }, kernel })
            }
            PriorKind::PointMass { location } => {
                budget(n)?;
                let p = model_density_shifted(model, grid, location)?;
                let mass_on: f64 = p.integral();
                let off = (1.0 - mass_on).max(0.0);
                let mut values = Vec::with_capacity(n * n);
                for _ in 0..n {
                    values.extend_from_slice(&p.values);
                }
                let untrusted = p.values.iter().map(|&m| m < UNTRUSTED_MARGINAL).collect();
                let kernel = GriddedKernel { grid: *grid, values, untrusted, off_grid: vec![off; n] };
                let marginal = MarginalDensity { function: p, proper: true };
                Ok(Self { grid: *grid, prior: *prior, marginal, kernel: PredictiveKernel::Gridded(kernel) })
            }
            _ => {
                budget(n)?;
                joint_system(model, prior, grid)
            }
        }
    }

    /// `max |M(x)K(y|x) − M(y)K(x|y)| / max M(x)K(y|x)` over trusted rows.
    pub fn detailed_balance_residual(&self) -> Result<f64> {
        let n = self.grid.len();
        let m = &self.marginal.function.values;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| self.kernel.row(&self.grid, i)).collect::<Result<_>>()?;
        let trusted = |i: usize| !self.kernel.is_untrusted(i);
        let mut worst = 0.0_f64;
        let mut peak = 0.0_f64;
        for i in (0..n).filter(|&i| trusted(i)) {
            for j in (i..n).filter(|&j| trusted(j)) {
                let a = m[i] * rows[i][j];
                let b = m[j] * rows[j][i];
                worst = worst.max((a - b).abs());
                peak = peak.max(a.abs()).max(b.abs());
            }
        }
        Ok(if peak > 0.0 { worst / peak } else { 0.0 })
    }

    /// Relative L¹ residual of `∫ K(x|y) M(y) dy − M(x)` over the central half of the grid.
    pub fn invariance_residual(&self) -> Result<f64> {
        let n = self.grid.len();
        let s = self.grid.spacing();
        let m = &self.marginal.function.values;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| self.kernel.row(&self.grid, i)).collect::<Result<_>>()?;
        let (mut num, mut den) = (0.0, 0.0);
        for i in self.marginal.function.interior() {
            let inflow: f64 = (0..n).map(|j| rows[j][i] * m[j]).sum::<f64>() * s;
            // Inflow from beyond the grid: by the symmetry of the joint it equals the
            // off-grid outflow of row i.
            let beyond = self.kernel.off_grid_mass(&self.grid, i)? * m[i];
            num += (inflow + beyond - m[i]).abs();
            den += m[i].abs();
        }
        Ok(num / den)
    }
}

fn budget(n: usize) -> Result<()> {
    if n > KERNEL_BUDGET {
        Err(Error::Budget { what: "dense predictive kernel", n, limit: KERNEL_BUDGET })
    } else {
        Ok(())
    }
}

/// Noise density at lags `t·s` for `|t| ≤ reach`, indexed by `t + reach`.
fn lag_table(model: &LevyTriplet, s: f64, reach: usize) -> Result<Vec<f64>> {
    let big = (2 * reach + 2).next_power_of_two().max(Grid1D::MIN_POINTS);
    let grid = Grid1D::symmetric(0.5 * big as f64 * s, big)?;
    let p = model_density(model, &grid)?;
    let c = big / 2;
    Ok(p.values[c - reach..=c + reach].to_vec())
}

fn joint_system(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<PosteriorSystem> {
    let n = grid.len();
    let s = grid.spacing();
    let nodes = ThetaNodes::new(model, prior, grid)?;
    let n_theta = nodes.weights.len();

    // On-grid mass of p(· − θ_k), by a sliding window over the table.
    let mut prefix = vec![0.0; nodes.table.len() + 1];
    for (t, v) in nodes.table.iter().enumerate() {
        prefix[t + 1] = prefix[t] + v;
    }
    let escape: Vec<f64> = (0..n_theta)
        .map(|k| {
            let lo = nodes.margin + nodes.reach - k;
            (1.0 - (prefix[lo + n] - prefix[lo]) * s).max(0.0)
        })
        .collect();

    // Row i: K(· | x_i) = Σ_k w_k p(· − θ_k)/M(x_i) with w_k = p(x_i − θ_k)π(θ_k)s.
    let conv = Convolver::new(&nodes.table, n_theta);
    let mut values = vec![0.0; n * n];
    let mut marginal = vec![0.0; n];
    let mut untrusted = vec![false; n];
    let mut off_grid = vec![0.0; n];
    let mut w = vec![0.0; n_theta];
    for i in 0..n {
        for (k, wk) in w.iter_mut().enumerate() {
            *wk = nodes.lag(i, k) * nodes.weights[k];
        }
        let m = w.iter().sum::<f64>() + nodes.far[i];
        marginal[i] = m;
        if !(m >= UNTRUSTED_MARGINAL) {
            untrusted[i] = true;
            continue;
        }
        let escaped: f64 = w.iter().zip(&escape).map(|(a, b)| a * b).sum::<f64>() + nodes.far[i];
        off_grid[i] = escaped / m;
        let out = conv.convolve(&w);
        let inv = 1.0 / m;
        for (j, v) in values[i * n..(i + 1) * n].iter_mut().enumerate() {
            *v = (nodes.at(&out, j) * inv).max(0.0);
        }
    }

    let mut function = GriddedFunction::new(*grid, marginal)?;
    function.tail_model = marginal_tail(model, prior, &function);
    let kernel = GriddedKernel { grid: *grid, values, untrusted, off_grid };
    Ok(PosteriorSystem {
        grid: *grid,
        prior: *prior,
        marginal: MarginalDensity { function, proper: prior.proper },
        kernel: PredictiveKernel::Gridded(kernel),
    })
}

/// Quadrature nodes for the θ-integral: the grid points widened by `margin` on
/// each side, the noise density at every lag they need, and the far field.
struct ThetaNodes {
    margin: usize,
    reach: usize,
    /// `table[t] = p((t − reach)·s)`.
    table: Vec<f64>,
    /// `π(θ_k)·s`.
    weights: Vec<f64>,
    far: Vec<f64>,
}

impl ThetaNodes {
    fn new(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<Self> {
        let n = grid.len();
        let s = grid.spacing();
        let margin = n / 4;
        let n_theta = n + 2 * margin;
        let theta = |k: usize| grid.lower() + (k as f64 - margin as f64) * s;
        let weights: Vec<f64> = (0..n_theta).map(|k| prior.density(theta(k)) * s).collect();
        let reach = n + margin - 1;
        let table = lag_table(model, s, reach)?;
        let far = far_field(model, prior, grid, theta(0) - 0.5 * s, theta(n_theta - 1) + 0.5 * s)?;
        Ok(Self { margin, reach, table, weights, far })
    }

    /// `p(x_i − θ_k)`; the lag is `i − k + margin`.
    fn lag(&self, i: usize, k: usize) -> f64 {
        self.table[i + self.margin + self.reach - k]
    }

    /// Entry for grid point `i` of a full convolution of the table with a θ-vector.
    fn at(&self, conv: &[f64], i: usize) -> f64 {
        conv[i + self.margin + self.reach]
    }
}

/// Tail index `α` of the noise, when it has a power-law tail.
fn noise_index(model: &LevyTriplet) -> Option<f64> {
    model.levy_measure.stable_index()
}

/// `∫ p(x_i − θ) π(θ) dθ` over `θ < lo` and `θ > hi`, for heavy-tailed noise.
fn far_field(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let n = grid.len();
    if noise_index(model).is_none() {
        return Ok(vec![0.0; n]);
    }
    let tail = model_tail_density(model)?;
    let mut out = Vec::with_capacity(n);
    for x in grid.points() {
        let right = |u: f64| tail(x - (hi + u)) * prior.density(hi + u);
        let left = |u: f64| tail(x - (lo - u)) * prior.density(lo - u);
        let scale = tail(x - hi) * prior.density(hi) * (hi - x).max(1.0);
        let tol = 1e-12 * scale.max(1e-300);
        let r = quad::integrate_to_infinity(&right, 0.0, tol)?;
        let l = quad::integrate_to_infinity(&left, 0.0, tol)?;
        out.push(r + l);
    }
    Ok(out)
}

/// Power law of `M` beyond the grid: the heavier of the prior and noise tails,
/// with the coefficient matched to the edge values.
fn marginal_tail(model: &LevyTriplet, prior: &PriorSpec, m: &GriddedFunction) -> Option<TailModel> {
    let noise = noise_index(model).map(|a| 1.0 + a);
    let prior_exp = match prior.kind {
        PriorKind::PowerLaw { beta, .. } | PriorKind::StudentLike { beta } => Some(beta),
        _ => None,
    };
    let exponent = match (noise, prior_exp) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return None,
    };
    let n = m.len();
    let (x0, x1) = (m.grid.point(0), m.grid.point(n - 1));
    let c0 = m.values[0] * x0.abs().powf(exponent);
    let c1 = m.values[n - 1] * x1.abs().powf(exponent);
    Some(TailModel { exponent, coefficient: 0.5 * (c0 + c1) })
}

/// `M^π` on `grid`.
pub fn marginal_density(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<MarginalDensity> {
    match prior.kind {
        PriorKind::Uniform | PriorKind::PointMass { .. } => Ok(PosteriorSystem::new(model, prior, grid)?.marginal),
        _ => marginal_only(model, prior, grid),
    }
}

/// The marginal alone, without the dense kernel (and without its budget).
fn marginal_only(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<MarginalDensity> {
    model.require_one_dimensional()?;
    let n = grid.len();
    let nodes = ThetaNodes::new(model, prior, grid)?;
    let n_theta = nodes.weights.len();
    let values: Vec<f64> = if n * n_theta <= DIRECT_SUM_LIMIT {
        (0..n).map(|i| (0..n_theta).map(|k| nodes.lag(i, k) * nodes.weights[k]).sum::<f64>() + nodes.far[i]).collect()
    } else {
        let near = fft::convolve(&nodes.table, &nodes.weights);
        (0..n).map(|i| nodes.at(&near, i).max(0.0) + nodes.far[i]).collect()
    };
    let mut function = GriddedFunction::new(*grid, values)?;
    function.tail_model = marginal_tail(model, prior, &function);
    Ok(MarginalDensity { function, proper: prior.proper })
}

/// `p̂^π(y | x) = J(x, y)/M^π(x)`.
pub fn bayes_predictive(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<PredictiveKernel> {
    Ok(PosteriorSystem::new(model, prior, grid)?.kernel)
}

/// Detailed-balance residual of the π-predictive kernel.
pub fn detailed_balance_residual(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<f64> {
    PosteriorSystem::new(model, prior, grid)?.detailed_balance_residual()
}

/// Invariance residual of `M^π` under the π-predictive kernel.
pub fn invariance_residual(model: &LevyTriplet, prior: &PriorSpec, grid: &Grid1D) -> Result<f64> {
    PosteriorSystem::new(model, prior, grid)?.invariance_residual()
}
