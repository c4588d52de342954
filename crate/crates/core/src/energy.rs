//! Dirichlet-form energies of the symmetrized benchmark process.
//!
//! A gridded function is read as a function on the circle of circumference
//! `n·s`, so with `F_k` its discrete transform the energy is
//! `ℰ(f, f) = (s/n) Σ_k ψ̃(ξ_k)|F_k|²`, the discrete form of
//! `(2π)^{−1}∫ψ̃(ξ)|f̂(ξ)|² dξ`. For a Gaussian part `ψ̃ = vξ²` this is `v∫(f′)²`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::bayes::MarginalDensity;
use crate::error::{Error, Result};
use crate::fft::{self, Convolver};
use crate::grid::{Grid1D, GriddedFunction};
use crate::levy::{Boundary, CharacteristicExponent, GeneratorMatrix, LevyTriplet};
use crate::quad;

/// Default step schedule for [`energy_finite_h`].
pub const DEFAULT_H_SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
/// Relative change allowed when the frequency cutoff is halved.
pub const CUTOFF_TOL: f64 = 5e-3;
/// Time step of the Gaussian part of the discrete generators used here.
pub const GENERATOR_STEP: f64 = 0.01;
/// Spline family size used by the reports.
pub const DEFAULT_FAMILY_SIZE: usize = 24;
/// Coordinate-ascent sweeps of the rate-function bound.
pub const ASCENT_SWEEPS: usize = 200;
/// Offsets `ε` tried by the rate-function bound.
pub const ASCENT_EPSILONS: [f64; 2] = [1e-2, 1e-4];
/// Seed of the coordinate order in the rate-function ascent.
pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnergyMethod {
    Spectral,
    FiniteH,
    GradientLocal,
    RateLB,
    /// `⟨f, −Lf⟩·s` with the absorbing discrete generator.
    GeneratorForm,
}

/// An energy value with the data that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub method: EnergyMethod,
    /// Estimated absolute accuracy.
    pub tolerance: f64,
    /// Cutoffs, steps or parameters matching `partials`.
    pub schedule: Vec<f64>,
    pub partials: Vec<f64>,
    pub warning: Option<String>,
}

fn power_spectrum(f: &GriddedFunction) -> Vec<f64> {
    let n = f.len() as f64;
    let s = f.grid.spacing();
    fft::forward_real(&f.values).iter().map(|z| z.norm_sqr() * s / n).collect()
}

/// `(s/n) Σ ψ̃(ξ_k)|F_k|²`, with the partial sums below halved cutoffs.
pub fn energy_spectral(sym: &LevyTriplet, f: &GriddedFunction) -> Result<EnergyEstimate> {
    let psi = CharacteristicExponent::new(sym)?;
    sym.require_one_dimensional()?;
    let power = power_spectrum(f);
    let grid = f.grid;
    let nyq = grid.nyquist();
    let terms: Vec<(f64, f64)> = power
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let xi = grid.frequency(k).abs();
            (xi, psi.eval(xi) * p)
        })
        .collect();
    let cutoffs: Vec<f64> = (0..5).rev().map(|j| nyq / f64::from(1 << j)).collect();
    let partials: Vec<f64> = cutoffs
        .iter()
        .map(|&c| terms.iter().filter(|(xi, _)| *xi <= c * (1.0 + 1e-12)).map(|(_, t)| t).sum())
        .collect();
    let value = partials[4];
    let previous = partials[3];
    let norm2: f64 = power.iter().sum();
    let change = (value - previous).abs();
    if value > 1e-12 * norm2.max(f64::MIN_POSITIVE) && change > CUTOFF_TOL * value {
        return Err(Error::NonConvergence { context: "spectral energy under cutoff halving".into(), previous, last: value });
    }
    Ok(EnergyEstimate {
        value,
        method: EnergyMethod::Spectral,
        tolerance: change,
        schedule: cutoffs,
        partials,
        warning: None,
    })
}

/// Rayleigh quotients `(1/h)⟨f − T_h f, f⟩` extrapolated to `h → 0`.
pub fn energy_finite_h(sym: &LevyTriplet, f: &GriddedFunction, schedule: &[f64]) -> Result<EnergyEstimate> {
    let psi = CharacteristicExponent::new(sym)?;
    sym.require_one_dimensional()?;
    if schedule.len() < 4 {
        return Err(Error::param("h_schedule", "need at least four steps"));
    }
    if schedule.iter().any(|&h| !(h > 0.0 && h <= 1.0)) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("h_schedule", "steps must decrease strictly within (0, 1]"));
    }
    let power = power_spectrum(f);
    let rates: Vec<f64> = (0..f.len()).map(|k| psi.eval(f.grid.frequency(k))).collect();
    let quotients: Vec<f64> = schedule
        .iter()
        .map(|&h| rates.iter().zip(&power).map(|(&l, &p)| -(-h * l).exp_m1() / h * p).sum())
        .collect();
    for (i, w) in quotients.windows(2).enumerate() {
        if w[1] < w[0] - 1e-8 {
            return Err(Error::Monotonicity {
                context: format!("finite-h quotients at h = {} and {}", schedule[i], schedule[i + 1]),
                violation: w[0] - w[1],
            });
        }
    }
    let value = neville_at_zero(schedule, &quotients);
    let coarser = neville_at_zero(&schedule[..schedule.len() - 1], &quotients[..quotients.len() - 1]);
    Ok(EnergyEstimate {
        value: value.max(0.0),
        method: EnergyMethod::FiniteH,
        tolerance: (value - coarser).abs(),
        schedule: schedule.to_vec(),
        partials: quotients,
        warning: None,
    })
}

/// Value at zero of the interpolating polynomial through `(x_i, y_i)`.
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (x[i], x[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// `v Σ ((f_{j+1} − f_{j−1})/(2s))² s` over interior points.
pub fn energy_gradient_local(v: f64, f: &GriddedFunction) -> Result<EnergyEstimate> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param("v", format!("must be positive, got {v}")));
    }
    let s = f.grid.spacing();
    let sum: f64 = f.values.windows(3).map(|w| ((w[2] - w[0]) / (2.0 * s)).powi(2)).sum();
    Ok(EnergyEstimate {
        value: v * sum * s,
        method: EnergyMethod::GradientLocal,
        tolerance: 0.0,
        schedule: vec![s],
        partials: vec![v * sum * s],
        warning: None,
    })
}

/// Cubic B-splines, uniform in `z = asinh((x − c)/w)`, evaluated at the grid points.
fn spline_basis(grid: &Grid1D, centre: f64, width: f64, size: usize) -> Vec<Vec<f64>> {
    let z: Vec<f64> = grid.points().iter().map(|&x| ((x - centre) / width).asinh()).collect();
    let (z0, z1) = (z[0], z[z.len() - 1]);
    let step = (z1 - z0) / (size - 3) as f64;
    let cardinal = |u: f64| -> f64 {
        if !(0.0..4.0).contains(&u) {
            0.0
        } else if u < 1.0 {
            u * u * u / 6.0
        } else if u < 2.0 {
            (-3.0 * u * u * u + 12.0 * u * u - 12.0 * u + 4.0) / 6.0
        } else if u < 3.0 {
            (3.0 * u * u * u - 24.0 * u * u + 60.0 * u - 44.0) / 6.0
        } else {
            (4.0 - u).powi(3) / 6.0
        }
    };
    (0..size)
        .map(|k| {
            let t = z0 + (k as f64 - 3.0) * step;
            z.iter().map(|&zz| cardinal((zz - t) / step)).collect()
        })
        .collect()
}

/// Weighted least-squares coefficients of `target` in the basis.
fn fit_coefficients(basis: &[Vec<f64>], target: &[f64], weight: &[f64]) -> Vec<f64> {
    let k = basis.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(k, k);
    let mut b = nalgebra::DVector::<f64>::zeros(k);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = (0..target.len()).map(|p| weight[p] * basis[i][p] * basis[j][p]).sum();
        }
        b[i] = (0..target.len()).map(|p| weight[p] * basis[i][p] * target[p]).sum();
        a[(i, i)] += 1e-12;
    }
    match a.cholesky() {
        Some(c) => c.solve(&b).iter().copied().collect(),
        None => vec![0.0; k],
    }
}

/// `∫(−L U)/U dμ` for `U = e^{φ − max φ} + ε`.
struct RateObjective<'a> {
    gen: &'a GeneratorMatrix,
    mu: &'a [f64],
    s: f64,
    eps: f64,
}

impl RateObjective<'_> {
    fn shape(&self, phi: &[f64]) -> Vec<f64> {
        let top = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        phi.iter().map(|&p| (p - top).exp()).collect()
    }

    fn value(&self, phi: &[f64]) -> f64 {
        let u = self.shape(phi);
        let big: Vec<f64> = u.iter().map(|&x| x + self.eps).collect();
        let lu = self.gen.apply(&big);
        self.mu.iter().zip(lu.iter().zip(&big)).map(|(&m, (&a, &b))| -m * a / b).sum::<f64>() * self.s
    }

    /// First and second derivatives along `φ + t·b` at `t = 0`.
    fn derivatives(&self, phi: &[f64], b: &[f64]) -> (f64, f64) {
        let u = self.shape(phi);
        let big: Vec<f64> = u.iter().map(|&x| x + self.eps).collect();
        let ub: Vec<f64> = u.iter().zip(b).map(|(x, y)| x * y).collect();
        let ubb: Vec<f64> = ub.iter().zip(b).map(|(x, y)| x * y).collect();
        let (a0, a1, a2) = (self.gen.apply(&big), self.gen.apply(&ub), self.gen.apply(&ubb));
        let (mut d1, mut d2) = (0.0, 0.0);
        for i in 0..phi.len() {
            if self.mu[i] == 0.0 {
                continue;
            }
            let (bb, b1, b2) = (big[i], ub[i], ubb[i]);
            let num = a1[i] * bb - a0[i] * b1;
            d1 -= self.mu[i] * num / (bb * bb);
            d2 -= self.mu[i] * ((a2[i] * bb - a0[i] * b2) / (bb * bb) - 2.0 * num * b1 / (bb * bb * bb));
        }
        (d1 * self.s, d2 * self.s)
    }
}

/// Donsker–Varadhan lower bound `sup_u ∫(−L u_ε)/u_ε dμ` over `u = exp(Σ a_k b_k)`.
///
/// `L` is the periodic discrete generator; the basis is cubic B-splines in an
/// asinh-warped coordinate, and the ascent updates one coefficient at a time
/// by safeguarded Newton steps in a seeded random order.
pub fn rate_function_lower_bound(
    sym: &LevyTriplet,
    mu: &GriddedFunction,
    family_size: usize,
    seed: u64,
) -> Result<EnergyEstimate> {
    if family_size < 4 {
        return Err(Error::param("family_size", "need at least four spline functions"));
    }
    let grid = mu.grid;
    let gen = GeneratorMatrix::new(sym, &grid, GENERATOR_STEP, Boundary::Periodic)?;
    let s = grid.spacing();
    let total: f64 = mu.values.iter().sum::<f64>() * s;
    if !(total > 0.0) || mu.values.iter().any(|&v| v < 0.0) {
        return Err(Error::param("mu", "must be a nonnegative density with positive mass"));
    }
    let weights: Vec<f64> = mu.values.iter().map(|&v| v / total).collect();

    // Centre and spread of μ set the warp.
    let x = grid.points();
    let mut cdf = 0.0;
    let (mut q25, mut q50, mut q75) = (x[0], x[0], x[0]);
    for (xi, w) in x.iter().zip(&weights) {
        let before = cdf;
        cdf += w * s;
        if before < 0.25 && cdf >= 0.25 {
            q25 = *xi;
        }
        if before < 0.5 && cdf >= 0.5 {
            q50 = *xi;
        }
        if before < 0.75 && cdf >= 0.75 {
            q75 = *xi;
        }
    }
    let width = (0.5 * (q75 - q25)).max(2.0 * s);
    let basis = spline_basis(&grid, q50, width, family_size);
    let peak = weights.iter().copied().fold(0.0, f64::max);
    let target: Vec<f64> = weights.iter().map(|&w| 0.5 * w.max(1e-300).ln()).collect();
    let fit_w: Vec<f64> = weights.iter().map(|&w| w / peak + 1e-6).collect();
    let start = fit_coefficients(&basis, &target, &fit_w);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut partials = Vec::new();
    let mut warning = None;
    for &eps in &ASCENT_EPSILONS {
        let obj = RateObjective { gen: &gen, mu: &weights, s, eps };
        let mut a = start.clone();
        let phi_of = |a: &[f64]| -> Vec<f64> {
            (0..grid.len()).map(|p| a.iter().zip(&basis).map(|(c, b)| c * b[p]).sum()).collect()
        };
        let mut phi = phi_of(&a);
        let mut current = obj.value(&phi);
        if !current.is_finite() {
            a = vec![0.0; family_size];
            phi = phi_of(&a);
            current = obj.value(&phi);
        }
        let mut order: Vec<usize> = (0..family_size).collect();
        for _ in 0..ASCENT_SWEEPS {
            order.shuffle(&mut rng);
            let before = current;
            for &k in &order {
                let (d1, d2) = obj.derivatives(&phi, &basis[k]);
                if !(d1.is_finite() && d2.is_finite()) || d1 == 0.0 {
                    continue;
                }
                let mut t = if d2 < 0.0 { -d1 / d2 } else { d1.signum() * 0.1 };
                t = t.clamp(-5.0, 5.0);
                for _ in 0..20 {
                    let trial: Vec<f64> = phi.iter().zip(&basis[k]).map(|(p, b)| p + t * b).collect();
                    let v = obj.value(&trial);
                    if v.is_finite() && v > current {
                        phi = trial;
                        a[k] += t;
                        current = v;
                        break;
                    }
                    if !v.is_finite() {
                        warning = Some("ascent produced a non-finite value; kept the last stable iterate".into());
                    }
                    t *= 0.5;
                }
            }
            if (current - before).abs() <= 1e-13 * current.abs().max(1e-300) {
                break;
            }
        }
        partials.push(current);
        best = best.max(current);
    }
    Ok(EnergyEstimate {
        value: best.max(0.0),
        method: EnergyMethod::RateLB,
        tolerance: 0.0,
        schedule: ASCENT_EPSILONS.to_vec(),
        partials,
        warning,
    })
}

/// Preconditioned conjugate gradients for the symmetric positive definite
/// `(αI + diag(η) − L)u = rhs`.
fn solve_killed(gen: &GeneratorMatrix, eta: &[f64], alpha: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    let apply = |u: &[f64]| -> Vec<f64> {
        let lu = gen.apply(u);
        (0..n).map(|i| (alpha + eta[i]) * u[i] - lu[i]).collect()
    };
    let diag: Vec<f64> = eta.iter().map(|&e| alpha + e - gen.diagonal()).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let b_norm = norm(rhs).max(f64::MIN_POSITIVE);
    let mut u = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 20 * n;
    for _ in 0..max_iter {
        if norm(&r) <= 1e-12 * b_norm {
            return Ok(u);
        }
        let ap = apply(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let step = rz / pap;
        for i in 0..n {
            u[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        z = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let residual = norm(&r) / b_norm;
    if residual <= 1e-9 {
        Ok(u)
    } else {
        Err(Error::Solve { residual })
    }
}

/// `G_α^η η`: solves `(αI + diag(η) − L)u = η` with the absorbing generator.
pub fn killed_resolvent(sym: &LevyTriplet, eta: &GriddedFunction, alpha: f64, grid: &Grid1D) -> Result<GriddedFunction> {
    let gen = GeneratorMatrix::new(sym, grid, GENERATOR_STEP, Boundary::Absorbing)?;
    killed_with(&gen, eta, alpha)
}

fn killed_with(gen: &GeneratorMatrix, eta: &GriddedFunction, alpha: f64) -> Result<GriddedFunction> {
    if eta.grid != *gen.grid() {
        return Err(Error::GridMismatch);
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
    }
    if eta.values.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::param("eta", "killing rate must be positive and bounded"));
    }
    let u = solve_killed(gen, &eta.values, alpha, &eta.values)?;
    let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if lo < -1e-8 || hi > 1.0 + 1e-6 {
        return Err(Error::BoundViolation { context: "killed resolvent".into(), min: lo, max: hi });
    }
    Ok(GriddedFunction { grid: eta.grid, values: u.into_iter().map(|x| x.max(0.0)).collect(), tail_model: None })
}

/// Energies `⟨f_n, −L f_n⟩·s` of `f_n = G_{1/n}^η η`.
pub fn blyth_sequence_energies(sym: &LevyTriplet, eta: &GriddedFunction, n_list: &[u32]) -> Result<Vec<EnergyEstimate>> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return Err(Error::param("n_list", "must be positive and strictly increasing"));
    }
    let gen = GeneratorMatrix::new(sym, &eta.grid, GENERATOR_STEP, Boundary::Absorbing)?;
    let s = eta.grid.spacing();
    n_list
        .iter()
        .map(|&n| {
            let alpha = 1.0 / f64::from(n);
            let f = killed_with(&gen, eta, alpha)?;
            let lf = gen.apply(&f.values);
            let value = -f.values.iter().zip(&lf).map(|(a, b)| a * b).sum::<f64>() * s;
            Ok(EnergyEstimate {
                value,
                method: EnergyMethod::GeneratorForm,
                tolerance: 0.0,
                schedule: vec![alpha],
                partials: vec![value],
                warning: None,
            })
        })
        .collect()
}

/// `η(x) = e^{−|x|}` on `grid`.
pub fn default_killing(grid: &Grid1D) -> GriddedFunction {
    GriddedFunction::from_fn(*grid, |x| (-x.abs()).exp())
}

/// Reference function of a transient benchmark and the two sides of `0 < ⟨g, √M⟩ ≤ ℰ(√M, √M)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransienceWitness {
    pub g: GriddedFunction,
    pub lower: f64,
    pub energy: f64,
    /// Whether `⟨g, √M⟩ ≤ ℰ(√M, √M)` held.
    pub bound_holds: bool,
}

/// True when `∫_{|ξ|<1} dξ/ψ̃(ξ)` is finite in dimension one.
pub fn is_transient(sym: &LevyTriplet) -> Result<bool> {
    let psi = CharacteristicExponent::new(sym)?;
    Ok(psi.low_frequency_index() < sym.dimension as f64)
}

/// `g = √M / max{R√M, 1}` with `R = ∫₀^∞ T_s ds`, and `⟨g, √M⟩` against `ℰ(√M, √M)`.
///
/// The potential kernel of `ψ̃ = κ|ξ|^α`, `α < 1`, is the Riesz kernel
/// `u(z) = Γ(1−α) sin(πα/2)|z|^{α−1}/(πκ)`; it is cell-averaged on the grid and
/// applied to `√M` continued by its tail model.
pub fn transience_witness(sym: &LevyTriplet, m: &MarginalDensity, grid: &Grid1D) -> Result<TransienceWitness> {
    if !is_transient(sym)? {
        return Err(Error::Classification("the benchmark process is recurrent; no transience witness exists".into()));
    }
    if m.function.grid != *grid {
        return Err(Error::GridMismatch);
    }
    let psi = CharacteristicExponent::new(sym)?;
    let (alpha, kappa) = match psi.stable_part() {
        Some(p) if psi.gaussian_coefficient() == 0.0 => p,
        _ => return Err(Error::Unsupported("transience witness needs a pure stable benchmark".into())),
    };
    let c = gamma(1.0 - alpha) * (std::f64::consts::PI * alpha / 2.0).sin() / (std::f64::consts::PI * kappa);
    let root = m.sqrt();
    let n = grid.len();
    let s = grid.spacing();
    let cell = |k: usize| -> f64 {
        if k == 0 {
            2.0 * c * (0.5 * s).powf(alpha) / (alpha * s)
        } else {
            let kf = k as f64;
            c * (((kf + 0.5) * s).powf(alpha) - ((kf - 0.5) * s).powf(alpha)) / (alpha * s)
        }
    };
    let kernel: Vec<f64> = (0..2 * n - 1).map(|i| cell((i as isize - (n as isize - 1)).unsigned_abs())).collect();
    let full = Convolver::new(&kernel, n).convolve(&root.values);
    let (a, b) = grid.cell_bounds();
    let tail = root.tail_model;
    let mut potential = Vec::with_capacity(n);
    for (i, x) in grid.points().into_iter().enumerate() {
        let mut v = full[i + n - 1] * s;
        if let Some(t) = tail {
            if (1.0 - alpha) + t.exponent <= 1.0 {
                return Err(Error::param("marginal", "tail of √M too heavy for a finite potential"));
            }
            // Distance w = d·e^u from x to a point beyond the edge at distance d.
            let side = |d: f64, edge: f64| {
                move |u: f64| {
                    let w = d * u.exp();
                    c * w.powf(alpha) * t.eval(edge + (w - d))
                }
            };
            let tol = (1e-10 * v.abs()).max(1e-15);
            v += quad::integrate_to_infinity(&side(b - x, b), 0.0, tol)?
                + quad::integrate_to_infinity(&side(x - a, -a), 0.0, tol)?;
        }
        potential.push(v);
    }
    let g_values: Vec<f64> = root.values.iter().zip(&potential).map(|(&r, &p)| r / p.max(1.0)).collect();
    let g = GriddedFunction { grid: *grid, values: g_values, tail_model: None };
    let lower = g.inner(&root)?;
    let energy = energy_spectral(sym, &root)?.value;
    if !(lower > 0.0 && lower.is_finite()) {
        return Err(Error::BoundViolation { context: "transience witness ⟨g, √M⟩".into(), min: lower, max: energy });
    }
    if lower > energy {
        log::warn!("transience witness: ⟨g, √M⟩ = {lower:.6e} exceeds ℰ(√M, √M) = {energy:.6e}");
    }
    Ok(TransienceWitness { g, lower, energy, bound_holds: lower <= energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{marginal_density, PriorSpec};
    use crate::levy::symmetrize;
    use std::f64::consts::PI;

    fn sym(m: LevyTriplet) -> LevyTriplet {
        symmetrize(&m).unwrap()
    }

    fn bump(grid: Grid1D) -> GriddedFunction {
        GriddedFunction::from_fn(grid, |x| (-0.5 * x * x).exp())
    }

    fn root_normal(grid: Grid1D, var: f64) -> GriddedFunction {
        GriddedFunction::from_fn(grid, |x| ((-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()).sqrt())
    }

    #[test]
    fn spectral_matches_closed_forms() {
        let grid = Grid1D::symmetric(40.0, 2048).unwrap();
        // ψ̃ = ξ²: ∫(f′)² = √π/2.
        let g = energy_spectral(&sym(LevyTriplet::gaussian(1.0).unwrap()), &bump(grid)).unwrap();
        assert!((g.value - PI.sqrt() / 2.0).abs() < 1e-10, "{}", g.value);
        // ψ̃ = 2|ξ|: (2π)⁻¹∫2|ξ|·2πe^{−ξ²} dξ = 2; the kink at ξ = 0 limits the frequency sum.
        let wide = Grid1D::symmetric(400.0, 16384).unwrap();
        let c = energy_spectral(&sym(LevyTriplet::cauchy(1.0).unwrap()), &bump(wide)).unwrap();
        assert!((c.value - 2.0).abs() < 1e-4, "{}", c.value);
        // √N(0, 2) under v = 1: Fisher information of N(0, 2) over 4.
        let r = energy_spectral(&sym(LevyTriplet::gaussian(1.0).unwrap()), &root_normal(grid, 2.0)).unwrap();
        assert!((r.value - 0.125).abs() < 1e-10);
    }

    #[test]
    fn constants_have_no_energy() {
        let grid = Grid1D::symmetric(10.0, 256).unwrap();
        let one = GriddedFunction::constant(grid, 1.0);
        for m in [LevyTriplet::gaussian(1.0).unwrap(), LevyTriplet::stable(0.7).unwrap()] {
            assert!(energy_spectral(&sym(m.clone()), &one).unwrap().value.abs() < 1e-12);
            assert!(energy_finite_h(&sym(m), &one, &DEFAULT_H_SCHEDULE).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn finite_h_extrapolates_to_spectral() {
        let grid = Grid1D::symmetric(40.0, 2048).unwrap();
        for m in [LevyTriplet::gaussian(1.0).unwrap(), LevyTriplet::cauchy(1.0).unwrap(), LevyTriplet::stable(1.5).unwrap()] {
            let f = root_normal(grid, 3.0);
            let sp = energy_spectral(&sym(m.clone()), &f).unwrap().value;
            let fh = energy_finite_h(&sym(m), &f, &DEFAULT_H_SCHEDULE).unwrap();
            assert!((fh.value - sp).abs() < 1e-5 * sp, "{} vs {sp}", fh.value);
            assert!(fh.partials.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn finite_h_rejects_bad_schedules() {
        let grid = Grid1D::symmetric(10.0, 64).unwrap();
        let s = sym(LevyTriplet::gaussian(1.0).unwrap());
        assert!(energy_finite_h(&s, &bump(grid), &[0.1, 0.2, 0.05, 0.025]).is_err());
        assert!(energy_finite_h(&s, &bump(grid), &[0.1, 0.05]).is_err());
    }

    #[test]
    fn gradient_is_linear_in_v_and_close_to_spectral() {
        let grid = Grid1D::symmetric(40.0, 4096).unwrap();
        let f = root_normal(grid, 2.0);
        let one = energy_gradient_local(1.0, &f).unwrap().value;
        let three = energy_gradient_local(3.0, &f).unwrap().value;
        assert!((three - 3.0 * one).abs() < 1e-14);
        let sp = energy_spectral(&sym(LevyTriplet::gaussian(1.0).unwrap()), &f).unwrap().value;
        assert!((one - sp).abs() < 1e-4 * sp, "{one} vs {sp}");
        assert!(energy_gradient_local(0.0, &f).is_err());
    }

    #[test]
    fn rate_bound_for_gaussian_and_flat_profiles() {
        let grid = Grid1D::symmetric(100.0, 2048).unwrap();
        let s = sym(LevyTriplet::gaussian(1.0).unwrap());
        let mu = root_normal(grid, 2.0).map(|r| r * r);
        let lb = rate_function_lower_bound(&s, &mu, 12, DEFAULT_SEED).unwrap().value;
        assert!((0.9 * 0.125..=0.125).contains(&lb), "{lb}");
        let flat = GriddedFunction::constant(grid, 1.0 / 200.0);
        assert!(rate_function_lower_bound(&s, &flat, 12, DEFAULT_SEED).unwrap().value < 1e-3);
    }

    #[test]
    fn rate_bound_stays_below_spectral() {
        let grid = Grid1D::symmetric(100.0, 2048).unwrap();
        for m in [LevyTriplet::cauchy(1.0).unwrap(), LevyTriplet::stable(1.5).unwrap()] {
            let md = marginal_density(&m, &PriorSpec::gaussian(1.0).unwrap(), &grid).unwrap();
            let total = md.function.integral();
            let mu = md.function.map(|v| v / total);
            let sp = energy_spectral(&sym(m.clone()), &mu.sqrt()).unwrap().value;
            let lb = rate_function_lower_bound(&sym(m), &mu, 12, DEFAULT_SEED).unwrap().value;
            assert!(lb <= 1.01 * sp && lb > 0.85 * sp, "{lb} vs {sp}");
        }
    }

    #[test]
    fn killed_resolvent_limits_and_bounds() {
        let grid = Grid1D::symmetric(100.0, 1024).unwrap();
        let eta = default_killing(&grid);
        let cauchy = sym(LevyTriplet::cauchy(1.0).unwrap());
        let big = killed_resolvent(&cauchy, &eta, 1e3, &grid).unwrap();
        for (j, (u, e)) in big.values.iter().zip(&eta.values).enumerate() {
            if grid.point(j).abs() > 3.0 {
                continue;
            }
            let limit = e / (1e3 + e);
            assert!((u - limit).abs() <= 1e-2 * limit, "{u} vs {limit}");
        }
        let mut previous: Option<GriddedFunction> = None;
        for alpha in [1.0, 0.25, 1.0 / 16.0] {
            let u = killed_resolvent(&cauchy, &eta, alpha, &grid).unwrap();
            assert!(u.values.iter().all(|&x| (0.0..=1.0 + 1e-6).contains(&x)));
            if let Some(p) = previous {
                assert!(u.values.iter().zip(&p.values).all(|(a, b)| a >= &(b - 1e-8)));
            }
            previous = Some(u);
        }
        assert!(killed_resolvent(&cauchy, &eta, 0.0, &grid).is_err());
    }

    #[test]
    fn blyth_sequences() {
        let grid = Grid1D::symmetric(200.0, 2048).unwrap();
        let eta = default_killing(&grid);
        let n = [1, 4, 16, 64, 256];
        let gauss = blyth_sequence_energies(&sym(LevyTriplet::gaussian(1.0).unwrap()), &eta, &n).unwrap();
        let g: Vec<f64> = gauss.iter().map(|e| e.value).collect();
        assert!(g[2] > g[3] && g[3] > g[4], "{g:?}");
        let stable = |grid: Grid1D| -> Vec<f64> {
            let eta = default_killing(&grid);
            blyth_sequence_energies(&sym(LevyTriplet::stable(0.5).unwrap()), &eta, &n)
                .unwrap()
                .iter()
                .map(|e| e.value)
                .collect()
        };
        let (a, b) = (stable(grid), stable(Grid1D::symmetric(200.0, 4096).unwrap()));
        for (x, y) in a.iter().zip(&b) {
            assert!(*x > 0.05 && (x - y).abs() < 0.1 * x, "{a:?} {b:?}");
        }
        assert!(blyth_sequence_energies(&sym(LevyTriplet::gaussian(1.0).unwrap()), &eta, &[4, 2]).is_err());
    }

    #[test]
    fn transience_classification() {
        assert!(is_transient(&sym(LevyTriplet::stable(0.5).unwrap())).unwrap());
        assert!(!is_transient(&sym(LevyTriplet::cauchy(1.0).unwrap())).unwrap());
        assert!(!is_transient(&sym(LevyTriplet::gaussian(1.0).unwrap())).unwrap());
    }

    #[test]
    fn witness_for_stable_half() {
        let m = LevyTriplet::stable(0.5).unwrap();
        let prior = PriorSpec::power_law(2.0, 1.0).unwrap();
        let lower = |n: usize| {
            let grid = Grid1D::symmetric(100.0, n).unwrap();
            let md = marginal_density(&m, &prior, &grid).unwrap();
            transience_witness(&sym(m.clone()), &md, &grid).unwrap()
        };
        let (a, b) = (lower(8192), lower(16384));
        assert!(a.lower > 1e-3 && a.energy > 0.0);
        assert!((a.lower - b.lower).abs() < 0.1 * a.lower);
        assert!(a.g.values.iter().zip(&a.g.values).all(|(g, _)| *g >= 0.0));
    }

    #[test]
    fn witness_rejects_recurrent_benchmarks() {
        let m = LevyTriplet::cauchy(1.0).unwrap();
        let grid = Grid1D::symmetric(50.0, 1024).unwrap();
        let md = marginal_density(&m, &PriorSpec::gaussian(1.0).unwrap(), &grid).unwrap();
        assert!(matches!(transience_witness(&sym(m), &md, &grid), Err(Error::Classification(_))));
    }
}
