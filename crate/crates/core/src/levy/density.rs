use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::exponent::{model_exponent, stable_constant, CharacteristicExponent, TailSeries};
use super::{LevyMeasureSpec, LevyTriplet, Sides};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Grid1D, GriddedFunction};

/// Allowed deviation of a density's mass from one.
pub const MASS_TOL: f64 = 1e-6;
const PHI_FLOOR: f64 = 1e-17;
const MAX_FOLDS: usize = 256;

/// Bookkeeping from a spectral density synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityDiagnostics {
    /// Mass on the cells plus the analytic tails, before clipping.
    pub mass: f64,
    /// Factor applied after clipping negative ringing (at most one).
    pub renormalization: f64,
    /// Number of frequency folds used on each side.
    pub folds: usize,
}

/// Density of the time-`t` law of a symmetrized triplet on `grid`.
pub fn transition_density(sym: &LevyTriplet, t: f64, grid: &Grid1D) -> Result<GriddedFunction> {
    transition_density_checked(sym, t, grid).map(|(f, _)| f)
}

/// As [`transition_density`], also returning the synthesis diagnostics.
pub fn transition_density_checked(
    sym: &LevyTriplet,
    t: f64,
    grid: &Grid1D,
) -> Result<(GriddedFunction, DensityDiagnostics)> {
    sym.require_symmetrized()?;
    sym.require_one_dimensional()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("time must be positive, got {t}")));
    }
    let psi = CharacteristicExponent::new(sym)?;
    if psi.is_lattice() {
        return Err(Error::Unsupported("a lattice law has no density".into()));
    }
    let tails = psi.tail_series(t);
    let (mut f, diag) = synthesize(grid, &|xi| Complex64::new((-t * psi.eval(xi)).exp(), 0.0), true, &tails)?;
    if grid.is_symmetric() {
        let n = grid.len();
        let c = n / 2;
        for j in 1..c {
            let m = 0.5 * (f.values[c + j] + f.values[c - j]);
            f.values[c + j] = m;
            f.values[c - j] = m;
        }
    }
    Ok((f, diag))
}

/// Density of the model noise on `grid`.
pub fn model_density(model: &LevyTriplet, grid: &Grid1D) -> Result<GriddedFunction> {
    model_density_shifted(model, grid, 0.0)
}

/// Values `p(x_j − shift)` of the model noise density at the grid points.
pub fn model_density_shifted(model: &LevyTriplet, grid: &Grid1D, shift: f64) -> Result<GriddedFunction> {
    model.require_one_dimensional()?;
    if model.is_symmetrized() {
        return Err(Error::param("model", "expected a model triplet, got a symmetrized one"));
    }
    if let Some(pdf) = closed_form_model_density(model)? {
        let mut f = GriddedFunction::from_fn(*grid, |x| pdf(x - shift));
        f.tail_model = model_tail_series(model)?.first_order();
        return Ok(f);
    }
    let shifted = Grid1D::new(grid.lower() - shift, grid.upper() - shift, grid.len())?;
    let tails = model_tail_series(model)?;
    model_exponent(model, 1.0)?;
    let phi = |xi: f64| model_exponent(model, xi).map(|z| (-z).exp()).unwrap_or_default();
    let (mut f, _) = synthesize(&shifted, &phi, false, &tails)?;
    f.grid = *grid;
    Ok(f)
}

/// Asymptotic tail of the model noise density.
pub(crate) fn model_tail_series(model: &LevyTriplet) -> Result<TailSeries> {
    Ok(match model.levy_measure {
        LevyMeasureSpec::Cauchy { scale } if model.gaussian_variance == 0.0 => TailSeries::stable(1.0, scale, 1.0),
        LevyMeasureSpec::Cauchy { scale } => TailSeries::FirstOrder { alpha: 1.0, right: scale / PI, left: scale / PI },
        LevyMeasureSpec::SymmetricStable { alpha, intensity } if model.gaussian_variance == 0.0 => {
            TailSeries::stable(alpha, intensity * stable_constant(alpha)?, 1.0)
        }
        LevyMeasureSpec::SymmetricStable { alpha, intensity } => {
            TailSeries::FirstOrder { alpha, right: intensity, left: intensity }
        }
        LevyMeasureSpec::AsymmetricStable { alpha, c_pos, c_neg } => {
            TailSeries::FirstOrder { alpha, right: c_pos, left: c_neg }
        }
        _ => TailSeries::Light,
    })
}

type Pdf = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Noise density for large `|x|`: the closed form where one exists, else the tail expansion.
pub fn model_tail_density(model: &LevyTriplet) -> Result<Pdf> {
    if let Some(pdf) = closed_form_model_density(model)? {
        return Ok(pdf);
    }
    let series = model_tail_series(model)?;
    Ok(Box::new(move |x| series.eval(x)))
}

/// Closed-form noise densities, where the family has one.
pub(crate) fn closed_form_model_density(model: &LevyTriplet) -> Result<Option<Pdf>> {
    let a = model.gaussian_variance;
    let g = model.center;
    if a > 0.0 {
        if model.levy_measure.is_none() {
            let norm = 1.0 / (2.0 * PI * a).sqrt();
            return Ok(Some(Box::new(move |x: f64| norm * (-(x - g) * (x - g) / (2.0 * a)).exp())));
        }
        return Ok(None);
    }
    let pdf: Pdf = match model.levy_measure {
        LevyMeasureSpec::Cauchy { scale } => Box::new(move |x: f64| scale / (PI * (scale * scale + (x - g) * (x - g)))),
        LevyMeasureSpec::ExponentialJump { rate, sides: Sides::Positive } => {
            Box::new(move |x: f64| if x > g { rate * (-rate * (x - g)).exp() } else { 0.0 })
        }
        LevyMeasureSpec::GammaJump { shape, scale, sides: Sides::Positive } => {
            let lnorm = -ln_gamma(shape) - shape * scale.ln();
            Box::new(move |x: f64| {
                let y = x - g;
                if y > 0.0 {
                    (lnorm + (shape - 1.0) * y.ln() - y / scale).exp()
                } else {
                    0.0
                }
            })
        }
        LevyMeasureSpec::InverseGaussianJump { intensity, rate, sides: Sides::Positive } => {
            let delta = 2.0 * intensity * PI.sqrt();
            Box::new(move |x: f64| {
                let y = x - g;
                if y > 0.0 {
                    delta / (2.0 * PI.sqrt())
                        * y.powf(-1.5)
                        * (-delta * delta / (4.0 * y) - rate * y + delta * rate.sqrt()).exp()
                } else {
                    0.0
                }
            })
        }
        LevyMeasureSpec::GumbelJump { sides: Sides::Positive } => Box::new(move |x: f64| {
            let y = x - g;
            (-y - (-y).exp()).exp()
        }),
        LevyMeasureSpec::PointMass { .. } => {
            return Err(Error::Unsupported("a lattice law has no density".into()));
        }
        _ => return Ok(None),
    };
    Ok(Some(pdf))
}

/// Inverts the characteristic function `phi` onto `grid`.
///
/// Frequencies beyond the grid's band are folded back exactly, so the output
/// holds point samples of the density's periodization; the periodic images of
/// power-law tails are then removed analytically.
pub(crate) fn synthesize(
    grid: &Grid1D,
    phi: &dyn Fn(f64) -> Complex64,
    real_even: bool,
    tails: &TailSeries,
) -> Result<(GriddedFunction, DensityDiagnostics)> {
    let n = grid.len();
    let s = grid.spacing();
    let period = grid.period();
    let omega = 2.0 * PI / s;
    let lower = grid.lower();
    let nyq = grid.nyquist();

    if !tails.is_light() {
        let margin = 0.25 * period;
        if lower > -margin || grid.upper() < margin {
            return Err(Error::param("grid", "heavy-tailed densities need the origin at least a quarter period from both edges"));
        }
    }

    let mut cutoff = nyq;
    while phi(cutoff).norm() > PHI_FLOOR && cutoff < 1e12 {
        cutoff *= 2.0;
    }
    let mut folds = if cutoff <= nyq { 0 } else { ((cutoff / omega) + 1.0).ceil() as usize };
    let truncated = folds > MAX_FOLDS;
    folds = folds.min(MAX_FOLDS);

    let r = lower / s;
    let integer_phase = (r - r.round()).abs() < 1e-9;
    let phase_step = Complex64::from_polar(1.0, -omega * lower);
    let phases: Vec<Complex64> = (0..=folds).map(|m| if integer_phase { Complex64::new(1.0, 0.0) } else { phase_step.powu(m as u32) }).collect();

    // Power-law estimate of the folded remainder Σ_{m>M} φ(ξ + mΩ) ≈ Ω⁻¹∫_X^∞ φ.
    let remainder = |x: f64| -> Result<f64> {
        let a = phi(x).re;
        let b = phi(2.0 * x).re;
        if a <= 0.0 || b <= 0.0 {
            return Ok(0.0);
        }
        let p = (a / b).log2();
        if p <= 1.0 {
            return Err(Error::MassBound { bound: "resolution (characteristic function not integrable)", mass: f64::NAN, tol: MASS_TOL });
        }
        Ok(x * a / (p - 1.0) / omega)
    };

    let mut spec = vec![Complex64::default(); n];
    for (k, z) in spec.iter_mut().enumerate() {
        let xi = grid.frequency(k);
        let mut acc = phi(xi);
        for m in 1..=folds {
            let mf = m as f64 * omega;
            acc += phi(xi + mf) * phases[m] + phi(xi - mf) * phases[m].conj();
        }
        if truncated && integer_phase && real_even {
            let edge = (folds as f64 + 0.5) * omega;
            acc += remainder(edge + xi)? + remainder(edge - xi)?;
        }
        *z = acc * Complex64::from_polar(1.0, -xi * lower);
    }
    fft::forward(&mut spec);
    let mut values: Vec<f64> = spec.iter().map(|z| z.re / period).collect();

    let points = grid.points();
    if !tails.is_light() {
        for (v, &x) in values.iter_mut().zip(&points) {
            *v -= tails.periodic_images(x, period);
        }
    }

    let (a, b) = grid.cell_bounds();
    let tail_mass = if tails.is_light() { 0.0 } else { tails.mass_beyond(-a, false) + tails.mass_beyond(b, true) };
    let raw: f64 = values.iter().sum::<f64>() * s;
    let mass = raw + tail_mass;
    let negative: f64 = values.iter().filter(|v| **v < 0.0).sum::<f64>() * s;
    for v in values.iter_mut() {
        *v = v.max(0.0);
    }
    let clipped = raw - negative;
    let renormalization = if clipped > 0.0 { raw / clipped } else { 1.0 };
    if 1.0 / renormalization - 1.0 > MASS_TOL {
        return Err(Error::Renormalization { factor: 1.0 / renormalization, tol: MASS_TOL });
    }
    for v in values.iter_mut() {
        *v *= renormalization;
    }
    // Light tails wrap around the period instead of lowering the mass, so check the edges.
    if tails.is_light() && values[0].max(values[n - 1]) * period > MASS_TOL {
        return Err(Error::MassBound { bound: "grid width", mass, tol: MASS_TOL });
    }
    if !((mass - 1.0).abs() <= MASS_TOL) {
        // Bias of the point-sample Riemann sum: Σ_{m≠0} φ(mΩ) e^{−imΩ·lower}.
        let mut alias = 0.0;
        let mut ph = Complex64::new(1.0, 0.0);
        for m in 1..=folds.max(64) {
            ph *= phase_step;
            let mf = m as f64 * omega;
            alias += (phi(mf) * ph + phi(-mf) * ph.conj()).re;
        }
        let bound = if alias.abs() > 0.5 * (mass - 1.0).abs() { "grid resolution" } else { "grid width" };
        return Err(Error::MassBound { bound, mass, tol: MASS_TOL });
    }
    let f = GriddedFunction { grid: *grid, values, tail_model: tails.first_order() };
    Ok((f, DensityDiagnostics { mass, renormalization, folds }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::symmetrize;

    fn sup_err(f: &GriddedFunction, g: impl Fn(f64) -> f64) -> f64 {
        f.grid.points().iter().zip(&f.values).map(|(&x, &v)| (v - g(x)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn gaussian_transition_is_normal() {
        let sym = symmetrize(&LevyTriplet::gaussian(1.0).unwrap()).unwrap();
        let grid = Grid1D::symmetric(20.0, 1024).unwrap();
        let f = transition_density(&sym, 1.0, &grid).unwrap();
        let err = sup_err(&f, |x| (-x * x / 4.0).exp() / (4.0 * PI).sqrt());
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn cauchy_transition_is_cauchy_with_doubled_scale() {
        let sym = symmetrize(&LevyTriplet::cauchy(1.0).unwrap()).unwrap();
        let grid = Grid1D::symmetric(100.0, 4096).unwrap();
        let (f, diag) = transition_density_checked(&sym, 1.0, &grid).unwrap();
        let err = sup_err(&f, |x| 2.0 / (PI * (4.0 + x * x)));
        assert!(err < 1e-6, "{err}");
        assert!((diag.mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coarse_stable_grid_reports_resolution() {
        let sym = symmetrize(&LevyTriplet::stable(0.5).unwrap()).unwrap();
        let grid = Grid1D::symmetric(200.0, 256).unwrap();
        match transition_density(&sym, 1.0, &grid) {
            Err(Error::MassBound { bound, .. }) => assert_eq!(bound, "grid resolution"),
            other => panic!("expected a mass-bound error, got {other:?}"),
        }
    }

    #[test]
    fn narrow_laplace_grid_reports_width() {
        let sym = symmetrize(&LevyTriplet::exponential(1.0).unwrap()).unwrap();
        let grid = Grid1D::symmetric(4.0, 256).unwrap();
        match transition_density(&sym, 1.0, &grid) {
            Err(Error::MassBound { bound, .. }) => assert_eq!(bound, "grid width"),
            other => panic!("expected a mass-bound error, got {other:?}"),
        }
    }

    #[test]
    fn laplace_density_with_folding() {
        let sym = symmetrize(&LevyTriplet::exponential(1.0).unwrap()).unwrap();
        let grid = Grid1D::symmetric(40.0, 32768).unwrap();
        let f = transition_density(&sym, 1.0, &grid).unwrap();
        let err = sup_err(&f, |x| 0.5 * (-x.abs()).exp());
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn logistic_density() {
        let sym = symmetrize(&LevyTriplet::gumbel().unwrap()).unwrap();
        let grid = Grid1D::symmetric(50.0, 1024).unwrap();
        let f = transition_density(&sym, 1.0, &grid).unwrap();
        let err = sup_err(&f, |x| {
            let e = (-x.abs()).exp();
            e / ((1.0 + e) * (1.0 + e))
        });
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn stable_series_mass_and_symmetry() {
        let sym = symmetrize(&LevyTriplet::stable(1.5).unwrap()).unwrap();
        let grid = Grid1D::symmetric(100.0, 4096).unwrap();
        let (f, diag) = transition_density_checked(&sym, 1.0, &grid).unwrap();
        assert!((diag.mass - 1.0).abs() < 1e-6);
        let c = grid.len() / 2;
        for j in 1..c {
            assert_eq!(f.values[c + j], f.values[c - j]);
        }
    }

    #[test]
    fn skellam_has_no_density() {
        let sym = symmetrize(&LevyTriplet::poisson(1.0).unwrap()).unwrap();
        let grid = Grid1D::symmetric(20.0, 256).unwrap();
        assert!(matches!(transition_density(&sym, 1.0, &grid), Err(Error::Unsupported(_))));
    }

    #[test]
    fn asymmetric_stable_model_density_has_unit_mass_and_skew() {
        let m = LevyTriplet::asymmetric_stable(1.5, 1.0, 0.2).unwrap();
        let grid = Grid1D::symmetric(200.0, 8192).unwrap();
        let f = model_density(&m, &grid).unwrap();
        let tails = model_tail_series(&m).unwrap();
        let (a, b) = grid.cell_bounds();
        let mass = f.integral() + tails.mass_beyond(-a, false) + tails.mass_beyond(b, true);
        assert!((mass - 1.0).abs() < 1e-6);
        // Heavier right tail.
        assert!(f.eval(50.0) > 2.0 * f.eval(-50.0));
    }

    #[test]
    fn shifted_model_density_matches_closed_form_shift() {
        let m = LevyTriplet::cauchy(1.0).unwrap();
        let grid = Grid1D::symmetric(50.0, 1024).unwrap();
        let f = model_density_shifted(&m, &grid, 2.3).unwrap();
        let err = sup_err(&f, |x| 1.0 / (PI * (1.0 + (x - 2.3) * (x - 2.3))));
        assert!(err < 1e-15);
    }
}
