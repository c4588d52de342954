use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::exponent::CharacteristicExponent;
use super::LevyTriplet;
use crate::error::{Error, Result};
use crate::fft::{self, Convolver};
use crate::grid::Grid1D;

/// Largest grid accepted by [`generator_matrix`].
pub const GENERATOR_BUDGET: usize = 4096;
/// Largest time step accepted by [`generator_matrix`].
pub const MAX_STEP: f64 = 0.05;
/// Cells near the origin whose jump rate matches the second moment.
const MOMENT_MATCHED_CELLS: usize = 64;

/// Treatment of jumps that leave the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    /// Mass leaving the grid is killed.
    Absorbing,
    /// The grid is a circle of circumference `n·s`.
    Periodic,
}

/// Discrete generator of the symmetrized process on a grid.
///
/// Both parts are the small-`h` limit of `(P_h − I)/h`. The Gaussian part is
/// the nearest-neighbour Laplacian `v(f_{j+1} − 2f_j + f_{j−1})/s²`. Jumps of
/// size `y` move mass to the cell containing `x + y`; in the innermost cells
/// the rate matches the cell's second moment `∫y²ν̃(dy)/(ks)²`, elsewhere it is
/// the cell mass. Jumps shorter than half a cell enter as a diffusion with
/// their second moment. The step `h` is validated but does not enter. The operator is Toeplitz (absorbing)
/// or circulant (periodic) and is applied by FFT.
pub struct GeneratorMatrix {
    grid: Grid1D,
    h: f64,
    boundary: Boundary,
    /// `L_ij = lags[|i − j|]` (absorbing) or `lags[(j − i) mod n]` (periodic).
    lags: Vec<f64>,
    convolver: Option<Convolver>,
    eigenvalues: Option<Vec<f64>>,
}

/// Discrete generator with absorbing truncation.
pub fn generator_matrix(sym: &LevyTriplet, grid: &Grid1D, h: f64) -> Result<GeneratorMatrix> {
    GeneratorMatrix::new(sym, grid, h, Boundary::Absorbing)
}

impl GeneratorMatrix {
    pub fn new(sym: &LevyTriplet, grid: &Grid1D, h: f64, boundary: Boundary) -> Result<Self> {
        sym.require_one_dimensional()?;
        let psi = CharacteristicExponent::new(sym)?;
        let n = grid.len();
        if n > GENERATOR_BUDGET {
            return Err(Error::Budget { what: "generator matrix", n, limit: GENERATOR_BUDGET });
        }
        if !(h > 0.0 && h <= MAX_STEP) {
            return Err(Error::param("h", format!("time step must lie in (0, {MAX_STEP}], got {h}")));
        }
        let s = grid.spacing();
        let reach = match boundary {
            Boundary::Absorbing => n,
            Boundary::Periodic => 8 * n,
        };
        // Rates to lag k ≥ 1 on one side; rates[0] collects the total outflow.
        let mut rates = vec![0.0; reach + 1];

        let v = psi.gaussian_coefficient();
        let mut gaussian_out = 0.0;
        if v > 0.0 {
            rates[1] += v / (s * s);
            gaussian_out = 2.0 * v / (s * s);
        }

        let mut jump_out = 0.0;
        if psi.has_jumps() {
            let half = 0.5 * s;
            let mut second_moment = 2.0 * psi.small_jump_moment(half)?;
            if let Some((lambda, a)) = psi.atom() {
                if a < half {
                    second_moment += 2.0 * lambda * a * a;
                } else {
                    let k = (a / s).round() as usize;
                    if k <= reach {
                        rates[k] += lambda;
                    }
                    jump_out += 2.0 * lambda;
                }
            }
            let closed_form = psi.stable_part().is_some();
            let (mut captured_mass, mut captured_rate) = (0.0, 0.0);
            for (k, r) in rates.iter_mut().enumerate().skip(1) {
                let (a, b) = ((k as f64 - 0.5) * s, (k as f64 + 0.5) * s);
                let m = psi.jump_mass(a, b)?;
                let rate = if k <= MOMENT_MATCHED_CELLS {
                    let lag = k as f64 * s;
                    (psi.small_jump_moment(b)? - psi.small_jump_moment(a)?) / (lag * lag)
                } else {
                    m
                };
                *r += rate;
                captured_mass += m;
                captured_rate += rate;
                if !closed_form && m < 1e-300 {
                    break;
                }
            }
            let total = psi.jump_mass(half, f64::INFINITY)?;
            let beyond = (total - captured_mass).max(0.0);
            jump_out += 2.0 * (captured_rate + beyond);
            let diffusion = 0.5 * second_moment / (s * s);
            rates[1] += diffusion;
            jump_out += 2.0 * diffusion;
            if boundary == Boundary::Periodic {
                // Jumps beyond the explicit reach wrap around uniformly.
                let far = 2.0 * beyond;
                let share = far / n as f64;
                let mut lags = wrap(&rates, n);
                for l in lags.iter_mut().skip(1) {
                    *l += share;
                }
                return Ok(Self::finish(*grid, h, boundary, lags));
            }
        }
        rates[0] = -(gaussian_out + jump_out);
        let lags = match boundary {
            Boundary::Absorbing => rates[..n].to_vec(),
            Boundary::Periodic => wrap(&rates, n),
        };
        Ok(Self::finish(*grid, h, boundary, lags))
    }

    fn finish(grid: Grid1D, h: f64, boundary: Boundary, mut lags: Vec<f64>) -> Self {
        let n = grid.len();
        match boundary {
            Boundary::Absorbing => {
                let mut kernel = vec![0.0; 2 * n - 1];
                for (i, k) in kernel.iter_mut().enumerate() {
                    let lag = (i as isize - (n as isize - 1)).unsigned_abs();
                    *k = lags[lag];
                }
                let convolver = Convolver::new(&kernel, n);
                Self { grid, h, boundary, lags, convolver: Some(convolver), eigenvalues: None }
            }
            Boundary::Periodic => {
                // Conservative diagonal: rows sum to zero.
                lags[0] = -lags[1..].iter().sum::<f64>();
                let spectrum = fft::forward_real(&lags);
                let eigenvalues = spectrum.iter().map(|z| z.re).collect();
                Self { grid, h, boundary, lags, convolver: None, eigenvalues: Some(eigenvalues) }
            }
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Common diagonal entry.
    pub fn diagonal(&self) -> f64 {
        self.lags[0]
    }

    /// Entry `L_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.len();
        match self.boundary {
            Boundary::Absorbing => self.lags[i.abs_diff(j)],
            Boundary::Periodic => self.lags[(j + n - i) % n],
        }
    }

    /// `L u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(u.len(), n, "vector length must match the grid");
        match self.boundary {
            Boundary::Absorbing => {
                let full = self.convolver.as_ref().expect("absorbing generator has a convolver").convolve(u);
                full[n - 1..2 * n - 1].to_vec()
            }
            Boundary::Periodic => {
                let eig = self.eigenvalues.as_ref().expect("periodic generator has eigenvalues");
                let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                fft::forward(&mut buf);
                for (z, &l) in buf.iter_mut().zip(eig) {
                    *z *= l;
                }
                fft::inverse(&mut buf);
                buf.iter().map(|z| z.re / n as f64).collect()
            }
        }
    }

    /// Row sums `Σ_j L_ij`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.apply(&vec![1.0; self.len()])
    }

    /// Eigenvalues of a periodic generator in FFT order.
    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigenvalues.as_deref()
    }

    /// Dense copy.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.len();
        if n > GENERATOR_BUDGET {
            return Err(Error::Budget { what: "dense generator", n, limit: GENERATOR_BUDGET });
        }
        Ok(DMatrix::from_fn(n, n, |i, j| self.entry(i, j)))
    }
}

/// Circulant row from one-sided lag rates: `c_k = Σ_{ℓ ≡ ±k mod n} r_|ℓ|`.
fn wrap(rates: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    for (l, &r) in rates.iter().enumerate().skip(1) {
        c[l % n] += r;
        c[(n - l % n) % n] += r;
    }
    c[0] = 0.0;
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::symmetrize;

    fn sym(m: LevyTriplet) -> LevyTriplet {
        symmetrize(&m).unwrap()
    }

    #[test]
    fn row_sums_are_nonpositive_and_small_inside() {
        let grid = Grid1D::symmetric(40.0, 1024).unwrap();
        for s in [sym(LevyTriplet::gaussian(1.0).unwrap()), sym(LevyTriplet::exponential(1.0).unwrap())] {
            let l = generator_matrix(&s, &grid, 0.01).unwrap();
            let rows = l.row_sums();
            assert!(rows.iter().all(|&r| r <= 1e-8), "{s:?}");
            for &r in &rows[256..768] {
                assert!(r >= -1e-3, "{s:?}: {r}");
            }
        }
    }

    #[test]
    fn cauchy_row_sums_match_exit_rate() {
        use std::f64::consts::PI;
        // ν̃(dy) = (2/π) y⁻² dy, so the rate of jumping past a cell edge at distance d is 2/(πd).
        let grid = Grid1D::symmetric(40.0, 1024).unwrap();
        let l = generator_matrix(&sym(LevyTriplet::cauchy(1.0).unwrap()), &grid, 0.01).unwrap();
        let rows = l.row_sums();
        let (a, b) = grid.cell_bounds();
        for (j, &r) in rows.iter().enumerate().take(768).skip(256) {
            let x = grid.point(j);
            let exact = -(2.0 / PI) * (1.0 / (b - x) + 1.0 / (x - a));
            assert!((r - exact).abs() < 1e-3 * exact.abs(), "{x}: {r} vs {exact}");
        }
    }

    #[test]
    fn laplacian_of_sine() {
        let grid = Grid1D::symmetric(40.0, 2048).unwrap();
        let l = generator_matrix(&sym(LevyTriplet::gaussian(1.0).unwrap()), &grid, 0.01).unwrap();
        let x = grid.points();
        let f: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let lf = l.apply(&f);
        let (mut num, mut den) = (0.0_f64, 0.0_f64);
        for j in 512..1536 {
            num = num.max((lf[j] + f[j]).abs());
            den = den.max(f[j].abs());
        }
        assert!(num / den < 0.02, "{}", num / den);
    }

    #[test]
    fn fft_apply_matches_dense() {
        let grid = Grid1D::symmetric(10.0, 64).unwrap();
        for b in [Boundary::Absorbing, Boundary::Periodic] {
            let l = GeneratorMatrix::new(&sym(LevyTriplet::stable(1.5).unwrap()), &grid, 0.01, b).unwrap();
            let dense = l.to_dense().unwrap();
            let u: Vec<f64> = (0..64).map(|i| ((i as f64) * 0.37).cos()).collect();
            let fast = l.apply(&u);
            let slow = &dense * nalgebra::DVector::from_vec(u.clone());
            for i in 0..64 {
                assert!((fast[i] - slow[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn periodic_rows_conserve_mass() {
        let grid = Grid1D::symmetric(20.0, 256).unwrap();
        let l = GeneratorMatrix::new(&sym(LevyTriplet::cauchy(1.0).unwrap()), &grid, 0.01, Boundary::Periodic).unwrap();
        assert!(l.row_sums().iter().all(|r| r.abs() < 1e-10));
    }

    #[test]
    fn budget_and_step_limits() {
        let s = sym(LevyTriplet::gaussian(1.0).unwrap());
        let big = Grid1D::symmetric(10.0, 8192).unwrap();
        assert!(matches!(generator_matrix(&s, &big, 0.01), Err(Error::Budget { .. })));
        let g = Grid1D::symmetric(10.0, 64).unwrap();
        assert!(generator_matrix(&s, &g, 0.1).is_err());
    }
}
