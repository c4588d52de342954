//! Adaptive quadrature built on the double-exponential rule of the `quadrature` crate.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 18;
/// Estimates below this multiple of the integral's magnitude are rounding noise.
const REL_FLOOR: f64 = 1e-14;

/// `∫_a^b f` to absolute tolerance `tol`, bisecting when the rule's own estimate is too large.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut worst = 0.0_f64;
    let v = recurse(f, a, b, tol, 0, &mut worst);
    if worst > tol.max(1e-10 * v.abs()) {
        return Err(Error::Quadrature { context: format!("∫ over [{a:.4e}, {b:.4e}]"), residual: worst });
    }
    Ok(v)
}

fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32, worst: &mut f64) -> f64 {
    let out = quadrature::integrate(f, a, b, tol);
    if out.error_estimate <= tol.max(REL_FLOOR * out.integral.abs()) {
        return out.integral;
    }
    if depth >= MAX_DEPTH {
        *worst = worst.max(out.error_estimate);
        return out.integral;
    }
    let m = 0.5 * (a + b);
    recurse(f, a, m, 0.5 * tol, depth + 1, worst) + recurse(f, m, b, 0.5 * tol, depth + 1, worst)
}

/// `∫_a^∞ f` through the map `x = a + t/(1−t)`.
pub fn integrate_to_infinity(f: &dyn Fn(f64) -> f64, a: f64, tol: f64) -> Result<f64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        f(a + t / u) / (u * u)
    };
    integrate(&g, 0.0, 1.0, tol)
}

/// `∫_a^b f` for `0 < a < b` after the substitution `x = e^u`, suited to power laws.
pub fn integrate_log(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let g = |u: f64| {
        let x = u.exp();
        f(x) * x
    };
    integrate(&g, a.ln(), b.ln(), tol)
}
