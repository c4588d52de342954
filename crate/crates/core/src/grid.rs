//! Uniform one-dimensional grids and functions sampled on them.
//!
//! Points are `x_j = lower + j·s` for `j = 0..n`, with `s = (upper − lower)/n`,
//! so `upper` itself is not a grid point. Each point owns the cell
//! `[x_j − s/2, x_j + s/2]`; sums times `s` are midpoint integrals over the
//! union of cells.

use serde::Serialize;

use crate::error::{Error, Result};

/// A uniform grid with a power-of-two number of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    lower: f64,
    upper: f64,
    n: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 16;

    pub fn new(lower: f64, upper: f64, n: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
            return Err(Error::param("grid", format!("need finite lower < upper, got [{lower}, {upper}]")));
        }
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::param("grid.n", format!("{n} is not a power of two ≥ {}", Self::MIN_POINTS)));
        }
        Ok(Self { lower, upper, n })
    }

    /// Grid on `[−half_width, half_width)` containing the origin as point `n/2`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.lower + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Period of the grid, `n·s`.
    pub fn period(&self) -> f64 {
        self.upper - self.lower
    }

    /// Left and right edges of the union of cells.
    pub fn cell_bounds(&self) -> (f64, f64) {
        let h = 0.5 * self.spacing();
        (self.lower - h, self.upper - h)
    }

    /// True when the origin is a grid point and the grid is its own mirror image
    /// up to the unpaired leftmost point.
    pub fn is_symmetric(&self) -> bool {
        let scale = self.upper.abs().max(self.lower.abs());
        (self.lower + self.upper).abs() <= 1e-12 * scale
    }

    /// Index of the grid point nearest to `x`, if `x` lies inside the cells.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let k = ((x - self.lower) / self.spacing()).round();
        if k >= 0.0 && (k as usize) < self.n {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Angular frequency of FFT bin `k` (standard ordering).
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.n as isize;
        let kk = if (k as isize) < n / 2 { k as isize } else { k as isize - n };
        2.0 * std::f64::consts::PI * kk as f64 / self.period()
    }

    /// Nyquist angular frequency `π/s`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    /// Grid with the same spacing and `factor` times as many points, centred like `self`.
    pub fn widened(&self, factor: usize) -> Result<Self> {
        let n = self.n * factor;
        let s = self.spacing();
        let centre_index = (self.n / 2) as f64;
        let centre = self.lower + centre_index * s;
        let lower = centre - (n / 2) as f64 * s;
        Self::new(lower, lower + n as f64 * s, n)
    }

    /// Grid over the same interval with twice the resolution.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.lower, self.upper, 2 * self.n)
    }
}

/// Power-law description `coefficient·|x|^{−exponent}` of values beyond the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailModel {
    pub exponent: f64,
    pub coefficient: f64,
}

impl TailModel {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficient * x.abs().powf(-self.exponent)
    }

    /// `∫_L^∞ coefficient·x^{−exponent} dx`, infinite when the exponent is at most 1.
    pub fn mass_beyond(&self, l: f64) -> f64 {
        if self.exponent <= 1.0 {
            f64::INFINITY
        } else {
            self.coefficient * l.powf(1.0 - self.exponent) / (self.exponent - 1.0)
        }
    }

    /// Tail model of the square root.
    pub fn sqrt(&self) -> Self {
        Self { exponent: 0.5 * self.exponent, coefficient: self.coefficient.sqrt() }
    }
}

/// Values of a real function at the points of a grid, with optional tail metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GriddedFunction {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub tail_model: Option<TailModel>,
}

impl GriddedFunction {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::param("values", format!("non-finite value {bad}")));
        }
        Ok(Self { grid, values, tail_model: None })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values, tail_model: None }
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()], tail_model: None }
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail_model = Some(tail);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Midpoint-rule integral over the cells.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    /// Integral over the cells plus the tail model on both sides beyond them.
    pub fn mass(&self) -> f64 {
        let (a, b) = self.grid.cell_bounds();
        let tails = self.tail_model.map_or(0.0, |t| t.mass_beyond(-a) + t.mass_beyond(b));
        self.integral() + tails
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), tail_model: None }
    }

    /// Pointwise square root, carrying the tail model along.
    pub fn sqrt(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.max(0.0).sqrt()).collect(),
            tail_model: self.tail_model.map(|t| t.sqrt()),
        }
    }

    /// `∫ f g` over the cells.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.spacing())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.spacing()).sqrt()
    }

    /// Indices of the central half of the grid.
    pub fn interior(&self) -> std::ops::Range<usize> {
        let n = self.len();
        n / 4..3 * n / 4
    }

    /// Linear interpolation inside the grid, tail model (or zero) outside.
    pub fn eval(&self, x: f64) -> f64 {
        let s = self.grid.spacing();
        let u = (x - self.grid.lower()) / s;
        if u < 0.0 || u > (self.len() - 1) as f64 {
            return self.tail_model.map_or(0.0, |t| t.eval(x));
        }
        let j = (u.floor() as usize).min(self.len() - 2);
        let w = u - j as f64;
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(0.0, 1.0, 100).is_err());
        assert!(Grid1D::new(1.0, 0.0, 128).is_err());
        assert!(Grid1D::new(0.0, 1.0, 8).is_err());
    }

    #[test]
    fn symmetric_grid_has_origin() {
        let g = Grid1D::symmetric(10.0, 64).unwrap();
        assert!(g.is_symmetric());
        assert_eq!(g.index_of(0.0), Some(32));
        assert_eq!(g.point(32), 0.0);
    }

    #[test]
    fn frequencies_follow_fft_order() {
        let g = Grid1D::symmetric(std::f64::consts::PI, 16).unwrap();
        assert_eq!(g.frequency(0), 0.0);
        assert!((g.frequency(1) - 1.0).abs() < 1e-15);
        assert!((g.frequency(15) + 1.0).abs() < 1e-15);
        assert!((g.frequency(8) + 8.0).abs() < 1e-12);
    }

    #[test]
    fn widened_keeps_spacing_and_centre() {
        let g = Grid1D::symmetric(5.0, 32).unwrap();
        let w = g.widened(4).unwrap();
        assert!((w.spacing() - g.spacing()).abs() < 1e-15);
        assert!(w.is_symmetric());
    }

    #[test]
    fn tail_mass_closed_form() {
        let t = TailModel { exponent: 2.0, coefficient: 3.0 };
        assert!((t.mass_beyond(10.0) - 0.3).abs() < 1e-15);
        assert!(TailModel { exponent: 1.0, coefficient: 1.0 }.mass_beyond(1.0).is_infinite());
    }
}
