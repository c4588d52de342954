use super::exponent::CharacteristicExponent;
use super::LevyTriplet;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Grid1D, GriddedFunction};

const EXTENSION: usize = 4;

/// `(T_t f)(x) = ∫ q_t(y − x) f(y) dy`.
pub fn apply_semigroup(sym: &LevyTriplet, t: f64, f: &GriddedFunction) -> Result<GriddedFunction> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("time must be nonnegative, got {t}")));
    }
    let psi = CharacteristicExponent::new(sym)?;
    sym.require_one_dimensional()?;
    Ok(apply_multiplier_extended(f, |xi| (-t * psi.eval(xi)).exp()))
}

/// `G_α f = ∫₀^∞ e^{−αs} T_s f ds`, multiplier `1/(α + ψ̃)`.
pub fn resolvent(sym: &LevyTriplet, alpha: f64, f: &GriddedFunction) -> Result<GriddedFunction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("resolvent parameter must be positive, got {alpha}")));
    }
    let psi = CharacteristicExponent::new(sym)?;
    sym.require_one_dimensional()?;
    Ok(apply_multiplier_extended(f, |xi| 1.0 / (alpha + psi.eval(xi))))
}

/// Applies a Fourier multiplier to `f` continued by its tail model (or zero)
/// over a grid `EXTENSION` times wider, then restricts back.
fn apply_multiplier_extended(f: &GriddedFunction, m: impl Fn(f64) -> f64) -> GriddedFunction {
    let grid = f.grid;
    let n = grid.len();
    let big_n = n * EXTENSION;
    let s = grid.spacing();
    let offset = (big_n - n) / 2;
    let lower = grid.lower() - offset as f64 * s;
    let big = Grid1D::new(lower, lower + big_n as f64 * s, big_n).expect("extension of a valid grid");
    let mut ext = vec![0.0; big_n];
    for (j, e) in ext.iter_mut().enumerate() {
        if j >= offset && j < offset + n {
            *e = f.values[j - offset];
        } else if let Some(t) = f.tail_model {
            *e = t.eval(big.point(j));
        }
    }
    let out = fft::apply_multiplier(&ext, |k| m(big.frequency(k)));
    GriddedFunction { grid, values: out[offset..offset + n].to_vec(), tail_model: None }
}
