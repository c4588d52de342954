use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};

use super::{LevyMeasureSpec, LevyTriplet, Sides};
use crate::error::{Error, Result};
use crate::grid::TailModel;
use crate::quad;

/// `K(α) = ∫(1 − cos u)|u|^{−1−α} du`, by quadrature to relative accuracy 1e−9, cached per `α`.
pub fn stable_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::param("alpha", format!("stable index must lie in (0, 2), got {alpha}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&k) = cache.lock().expect("cache poisoned").get(&alpha.to_bits()) {
        return Ok(k);
    }
    let k = stable_constant_uncached(alpha)?;
    cache.lock().expect("cache poisoned").entry(alpha.to_bits()).or_insert(k);
    Ok(k)
}

fn stable_constant_uncached(alpha: f64) -> Result<f64> {
    // Whole periods up to U = 2πN, then the tail in closed form plus an
    // integration-by-parts expansion of the oscillatory remainder.
    const PERIODS: usize = 64;
    let f = |u: f64| {
        let s = (0.5 * u).sin();
        2.0 * s * s * u.powf(-1.0 - alpha)
    };
    // On [0, 1] integrate 1 − cos u = Σ (−1)^{k+1} u^{2k}/(2k)! term by term.
    let mut body = 0.0;
    let mut fact = 1.0;
    for k in 1..=12 {
        let m = 2.0 * k as f64;
        fact *= (m - 1.0) * m;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        body += sign / (fact * (m - alpha));
    }
    body += quad::integrate(&f, 1.0, PI, 1e-15)?;
    for j in 1..2 * PERIODS {
        let a = j as f64 * PI;
        body += quad::integrate(&f, a, a + PI, 1e-15)?;
    }
    let u = 2.0 * PI * PERIODS as f64;
    // ∫_U^∞ cos(u) u^{−p} du with sin U = 0, cos U = 1.
    let p = 1.0 + alpha;
    let mut cos_tail = 0.0;
    let mut coeff = p;
    let mut sign = 1.0;
    for j in 0..4 {
        let q = p + 2.0 * j as f64;
        cos_tail += sign * coeff * u.powf(-q - 1.0);
        coeff *= (q + 1.0) * (q + 2.0);
        sign = -sign;
    }
    let tail = u.powf(-alpha) / alpha - cos_tail;
    Ok(2.0 * (body + tail))
}

/// Asymptotic expansion of a density for large `|x|`.
#[derive(Debug, Clone, PartialEq)]
pub enum TailSeries {
    /// Faster than any power.
    Light,
    /// Symmetric stable series `Σ_k a_k |x|^{−kα−1}`.
    Stable { alpha: f64, coefficients: Vec<f64> },
    /// Leading power law with separate right and left coefficients.
    FirstOrder { alpha: f64, right: f64, left: f64 },
}

impl TailSeries {
    /// Series for a symmetric law with `ψ̃ = κ|ξ|^α` at time `t`.
    pub fn stable(alpha: f64, kappa: f64, t: f64) -> Self {
        let mut coefficients = Vec::new();
        let lk = (kappa * t).ln();
        for k in 1..=40usize {
            let kf = k as f64;
            let sin = (kf * PI * alpha / 2.0).sin();
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let mag = (ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0) + kf * lk).exp() / PI;
            let a = sign * sin * mag;
            coefficients.push(if sin.abs() < 1e-14 { 0.0 } else { a });
        }
        TailSeries::Stable { alpha, coefficients }
    }

    pub fn is_light(&self) -> bool {
        matches!(self, TailSeries::Light)
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            TailSeries::Light => None,
            TailSeries::Stable { alpha, .. } | TailSeries::FirstOrder { alpha, .. } => Some(*alpha),
        }
    }

    /// Leading term as a symmetric tail model (right and left averaged).
    pub fn first_order(&self) -> Option<TailModel> {
        match self {
            TailSeries::Light => None,
            TailSeries::Stable { alpha, coefficients } => {
                Some(TailModel { exponent: 1.0 + alpha, coefficient: coefficients[0] })
            }
            TailSeries::FirstOrder { alpha, right, left } => {
                Some(TailModel { exponent: 1.0 + alpha, coefficient: 0.5 * (right + left) })
            }
        }
    }

    /// Sums `Σ_k term_k` stopping at the smallest term of an asymptotic series.
    fn sum_terms(alpha: f64, coefficients: &[f64], term: impl Fn(usize, f64) -> f64) -> f64 {
        let mut total = 0.0;
        let mut last = f64::INFINITY;
        for (k, &a) in coefficients.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let t = a * term(k + 1, (k + 1) as f64 * alpha);
            if t.abs() > last {
                break;
            }
            total += t;
            last = t.abs();
            if t.abs() <= 1e-18 * total.abs() {
                break;
            }
        }
        total
    }

    /// Value of the expansion at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self {
            TailSeries::Light => 0.0,
            TailSeries::Stable { alpha, coefficients } => {
                Self::sum_terms(*alpha, coefficients, |_, ka| ax.powf(-ka - 1.0))
            }
            TailSeries::FirstOrder { alpha, right, left } => {
                let c = if x > 0.0 { *right } else { *left };
                c * ax.powf(-1.0 - alpha)
            }
        }
    }

    /// Mass of the expansion on `(l, ∞)` (`right`) or `(−∞, −l)` (left), `l > 0`.
    pub fn mass_beyond(&self, l: f64, right: bool) -> f64 {
        match self {
            TailSeries::Light => 0.0,
            TailSeries::Stable { alpha, coefficients } => {
                Self::sum_terms(*alpha, coefficients, |_, ka| l.powf(-ka) / ka)
            }
            TailSeries::FirstOrder { alpha, right: r, left: lc } => {
                let c = if right { *r } else { *lc };
                c * l.powf(-alpha) / alpha
            }
        }
    }

    /// `Σ_{m≠0} tail(x + mP)` for `|x| < P`, through Hurwitz zeta sums.
    pub fn periodic_images(&self, x: f64, period: f64) -> f64 {
        let a_plus = 1.0 + x / period;
        let a_minus = 1.0 - x / period;
        match self {
            TailSeries::Light => 0.0,
            TailSeries::Stable { alpha, coefficients } => Self::sum_terms(*alpha, coefficients, |_, ka| {
                let s = ka + 1.0;
                period.powf(-s) * (hurwitz_zeta(s, a_plus) + hurwitz_zeta(s, a_minus))
            }),
            TailSeries::FirstOrder { alpha, right, left } => {
                let s = 1.0 + alpha;
                period.powf(-s) * (right * hurwitz_zeta(s, a_plus) + left * hurwitz_zeta(s, a_minus))
            }
        }
    }
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a + k)^{−s}` for `s > 1`, `a > 0`, by Euler–Maclaurin.
pub(crate) fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const N: usize = 12;
    // B_{2j}/(2j)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let mut sum = 0.0;
    for k in 0..N {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    let mut rising = s;
    let mut pw = x.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * pw;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        pw /= x * x;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SymJump {
    None,
    /// One-sided density `c x^{−1−α}`, exponent `κ|ξ|^α`.
    Stable { alpha: f64, density: f64, kappa: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, scale: f64 },
    InverseGaussian { intensity: f64, rate: f64 },
    Gumbel,
    Atom { intensity: f64, atom: f64 },
}

/// The symmetrized exponent `ψ̃(ξ) = vξ² + ∫(1 − cos ξx) ν̃(dx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicExponent {
    v: f64,
    jump: SymJump,
}

impl CharacteristicExponent {
    pub fn new(sym: &LevyTriplet) -> Result<Self> {
        sym.require_symmetrized()?;
        if !sym.levy_measure.is_even() {
            return Err(Error::NotSymmetrized);
        }
        let jump = match sym.levy_measure {
            LevyMeasureSpec::None => SymJump::None,
            LevyMeasureSpec::Cauchy { scale } => SymJump::Stable { alpha: 1.0, density: scale / PI, kappa: scale },
            LevyMeasureSpec::SymmetricStable { alpha, intensity } => {
                SymJump::Stable { alpha, density: intensity, kappa: intensity * stable_constant(alpha)? }
            }
            LevyMeasureSpec::AsymmetricStable { alpha, c_pos, .. } => {
                SymJump::Stable { alpha, density: c_pos, kappa: c_pos * stable_constant(alpha)? }
            }
            LevyMeasureSpec::ExponentialJump { rate, .. } => SymJump::Exponential { rate },
            LevyMeasureSpec::GammaJump { shape, scale, .. } => SymJump::Gamma { shape, scale },
            LevyMeasureSpec::InverseGaussianJump { intensity, rate, .. } => {
                SymJump::InverseGaussian { intensity, rate }
            }
            LevyMeasureSpec::GumbelJump { .. } => SymJump::Gumbel,
            LevyMeasureSpec::PointMass { intensity, atom, .. } => SymJump::Atom { intensity, atom: atom.abs() },
        };
        Ok(Self { v: 0.5 * sym.gaussian_variance, jump })
    }

    /// `ψ̃(ξ)`.
    pub fn eval(&self, xi: f64) -> f64 {
        let x = xi.abs();
        self.v * x * x + self.jump_part(x)
    }

    fn jump_part(&self, x: f64) -> f64 {
        match self.jump {
            SymJump::None => 0.0,
            SymJump::Stable { alpha, kappa, .. } => kappa * x.powf(alpha),
            SymJump::Exponential { rate } => (x / rate).powi(2).ln_1p(),
            SymJump::Gamma { shape, scale } => shape * (scale * x).powi(2).ln_1p(),
            SymJump::InverseGaussian { intensity, rate } => {
                let r = (rate * rate + x * x).sqrt();
                let u = (0.5 * (r + rate)).sqrt();
                let diff = 0.5 * (x * x / (r + rate)) / (u + rate.sqrt());
                4.0 * intensity * PI.sqrt() * diff
            }
            SymJump::Gumbel => {
                let y = PI * x;
                if y < 1e-4 {
                    y * y / 6.0 - y.powi(4) / 180.0
                } else if y < 20.0 {
                    (y.sinh() / y).ln()
                } else {
                    y - (2.0 * y).ln() + (-(-2.0 * y).exp()).ln_1p()
                }
            }
            SymJump::Atom { intensity, atom } => 2.0 * intensity * (1.0 - (atom * x).cos()),
        }
    }

    /// Coefficient `v` of the Gaussian part `vξ²`.
    pub fn gaussian_coefficient(&self) -> f64 {
        self.v
    }

    pub fn has_jumps(&self) -> bool {
        !matches!(self.jump, SymJump::None)
    }

    /// `(α, κ)` when the jump part is `κ|ξ|^α`.
    pub fn stable_part(&self) -> Option<(f64, f64)> {
        match self.jump {
            SymJump::Stable { alpha, kappa, .. } => Some((alpha, kappa)),
            _ => None,
        }
    }

    /// Pure-jump lattice law without a density.
    pub fn is_lattice(&self) -> bool {
        self.v == 0.0 && matches!(self.jump, SymJump::Atom { .. })
    }

    /// Exponent `p` of `ψ̃(ξ) ≍ |ξ|^p` as `ξ → 0`.
    pub fn low_frequency_index(&self) -> f64 {
        match self.jump {
            SymJump::Stable { alpha, .. } => alpha,
            _ => 2.0,
        }
    }

    /// Density of `ν̃` at `x ≠ 0` (atoms excluded).
    pub fn levy_density(&self, x: f64) -> f64 {
        let a = x.abs();
        if a == 0.0 {
            return f64::INFINITY;
        }
        match self.jump {
            SymJump::None | SymJump::Atom { .. } => 0.0,
            SymJump::Stable { alpha, density, .. } => density * a.powf(-1.0 - alpha),
            SymJump::Exponential { rate } => (-rate * a).exp() / a,
            SymJump::Gamma { shape, scale } => shape * (-a / scale).exp() / a,
            SymJump::InverseGaussian { intensity, rate } => intensity * a.powf(-1.5) * (-rate * a).exp(),
            SymJump::Gumbel => (-a).exp() / (a * -(-a).exp_m1()),
        }
    }

    /// Atom `(intensity, |location|)` of `ν̃` on each side.
    pub fn atom(&self) -> Option<(f64, f64)> {
        match self.jump {
            SymJump::Atom { intensity, atom } => Some((intensity, atom)),
            _ => None,
        }
    }

    /// `ν̃((a, b))` of the continuous part, `0 < a < b ≤ ∞`.
    pub fn jump_mass(&self, a: f64, b: f64) -> Result<f64> {
        match self.jump {
            SymJump::None | SymJump::Atom { .. } => Ok(0.0),
            SymJump::Stable { alpha, density, .. } => {
                let hb = if b.is_finite() { b.powf(-alpha) } else { 0.0 };
                Ok(density * (a.powf(-alpha) - hb) / alpha)
            }
            _ => {
                let f = |x: f64| self.levy_density(x);
                let tol = 1e-15_f64.max(1e-13 * f(a) * a);
                if b.is_finite() {
                    quad::integrate(&f, a, b, tol)
                } else {
                    quad::integrate_to_infinity(&f, a, tol)
                }
            }
        }
    }

    /// `∫_0^a x² ν̃(dx)` over the continuous part.
    pub fn small_jump_moment(&self, a: f64) -> Result<f64> {
        match self.jump {
            SymJump::None | SymJump::Atom { .. } => Ok(0.0),
            SymJump::Stable { alpha, density, .. } => Ok(density * a.powf(2.0 - alpha) / (2.0 - alpha)),
            _ => {
                let f = |x: f64| x * x * self.levy_density(x);
                quad::integrate(&f, 0.0, a, 1e-16)
            }
        }
    }

    /// Independent evaluation of `ψ̃(ξ)` by quadrature of the Lévy integral.
    ///
    /// Stable families use the quadrature constant `K(α)`; the others integrate
    /// `2∫₀^∞(1 − cos ξx) ν̃(x) dx` period by period.
    pub fn by_quadrature(&self, xi: f64) -> Result<f64> {
        let x = xi.abs();
        let gauss = self.v * x * x;
        let jumps = match self.jump {
            SymJump::None => 0.0,
            SymJump::Stable { alpha, density, .. } => density * stable_constant(alpha)? * x.powf(alpha),
            SymJump::Atom { intensity, atom } => 2.0 * intensity * (1.0 - (atom * x).cos()),
            _ => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                let f = |y: f64| {
                    let s = (0.5 * x * y).sin();
                    2.0 * s * s * self.levy_density(y)
                };
                let period = 2.0 * PI / x;
                let mut total = 0.0;
                let mut a = 0.0;
                loop {
                    let piece = quad::integrate(&f, a, a + period, 1e-15)?;
                    total += piece;
                    a += period;
                    if piece.abs() < 1e-17 * total.abs() && a > 1.0 {
                        break;
                    }
                    if a > 1e4 {
                        break;
                    }
                }
                2.0 * total
            }
        };
        Ok(gauss + jumps)
    }

    /// Large-`|x|` expansion of the time-`t` density.
    pub fn tail_series(&self, t: f64) -> TailSeries {
        match self.jump {
            SymJump::Stable { alpha, density, kappa } => {
                if self.v == 0.0 {
                    TailSeries::stable(alpha, kappa, t)
                } else {
                    TailSeries::FirstOrder { alpha, right: t * density, left: t * density }
                }
            }
            _ => TailSeries::Light,
        }
    }
}

/// Complex exponent `ψ(ξ)` of a model triplet, `E e^{iξX} = e^{−ψ(ξ)}`.
pub(crate) fn model_exponent(model: &LevyTriplet, xi: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let base = Complex64::new(0.5 * model.gaussian_variance * xi * xi, -model.center * xi);
    let one = Complex64::new(1.0, 0.0);
    let jump = match model.levy_measure {
        LevyMeasureSpec::None => Complex64::default(),
        LevyMeasureSpec::Cauchy { scale } => Complex64::new(scale * xi.abs(), 0.0),
        LevyMeasureSpec::SymmetricStable { alpha, intensity } => {
            Complex64::new(intensity * stable_constant(alpha)? * xi.abs().powf(alpha), 0.0)
        }
        LevyMeasureSpec::AsymmetricStable { alpha, c_pos, c_neg } => {
            if alpha == 1.0 {
                Complex64::new(c_pos * PI * xi.abs(), 0.0)
            } else {
                let g = -gamma(-alpha);
                let mag = xi.abs().powf(alpha);
                let phase = PI * alpha / 2.0 * xi.signum();
                let minus_i = Complex64::from_polar(mag, -phase);
                let plus_i = Complex64::from_polar(mag, phase);
                (minus_i * c_pos + plus_i * c_neg) * g
            }
        }
        LevyMeasureSpec::ExponentialJump { rate, sides } => {
            let z = (one - i * xi / rate).ln();
            mirror(z, sides)
        }
        LevyMeasureSpec::GammaJump { shape, scale, sides } => mirror((one - i * (scale * xi)).ln() * shape, sides),
        LevyMeasureSpec::InverseGaussianJump { intensity, rate, sides } => {
            let z = (Complex64::new(rate, -xi).sqrt() - rate.sqrt()) * (2.0 * intensity * PI.sqrt());
            mirror(z, sides)
        }
        LevyMeasureSpec::GumbelJump { .. } => {
            return Err(Error::Unsupported("Gumbel noise has no closed complex exponent here".into()));
        }
        LevyMeasureSpec::PointMass { intensity, atom, sides } => {
            mirror((one - (i * (atom * xi)).exp()) * intensity, sides)
        }
    };
    Ok(base + jump)
}

/// Adds the mirror image `ψ(−ξ)` for two-sided kernels.
fn mirror(z: Complex64, sides: Sides) -> Complex64 {
    match sides {
        Sides::Positive => z,
        Sides::Both => Complex64::new(2.0 * z.re, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::symmetrize;

    #[test]
    fn stable_constant_matches_closed_form() {
        for &a in &[0.3, 0.5, 0.9, 1.0, 1.2, 1.5, 1.8] {
            let closed = PI / (gamma(1.0 + a) * (PI * a / 2.0).sin());
            let k = stable_constant(a).unwrap();
            assert!((k / closed - 1.0).abs() < 1e-9, "α = {a}: {k} vs {closed}");
        }
    }

    #[test]
    fn hurwitz_zeta_reduces_to_riemann() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        // ζ(2, 1/2) = 3ζ(2)
        assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_exponent() {
        let s = symmetrize(&LevyTriplet::gaussian(1.0).unwrap()).unwrap();
        let psi = CharacteristicExponent::new(&s).unwrap();
        assert_eq!(psi.eval(0.0), 0.0);
        assert!((psi.eval(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cauchy_exponent_against_direct_levy_integral() {
        let c = 1.0;
        let s = symmetrize(&LevyTriplet::cauchy(c).unwrap()).unwrap();
        let psi = CharacteristicExponent::new(&s).unwrap();
        for &xi in &[0.1, 0.5, 1.0, 3.0] {
            // ∫(1 − cos ξx)·(2c/π)|x|^{−2} dx = (4c/π)·|ξ|·∫₀^∞ (1 − cos u)/u² du, the last being π/2.
            let f = |u: f64| {
                let s = (0.5 * u).sin();
                2.0 * s * s / (u * u)
            };
            let mut integral = 0.0;
            for j in 0..4000 {
                let a = j as f64 * PI;
                integral += quad::integrate(&f, a, a + PI, 1e-16).unwrap();
            }
            integral += 1.0 / (4000.0 * PI);
            let direct = 4.0 * c / PI * xi * integral;
            assert!((psi.eval(xi) - direct).abs() < 1e-6, "ξ = {xi}");
            assert!((psi.eval(xi) - 2.0 * c * xi).abs() < 1e-12);
        }
    }

    #[test]
    fn light_families_match_levy_integral() {
        let models = [
            LevyTriplet::exponential(1.3).unwrap(),
            LevyTriplet::gamma(0.7, 1.5).unwrap(),
            LevyTriplet::inverse_gaussian(0.4, 0.8).unwrap(),
            LevyTriplet::gumbel().unwrap(),
        ];
        for m in &models {
            let psi = CharacteristicExponent::new(&symmetrize(m).unwrap()).unwrap();
            for &xi in &[0.05, 0.5, 1.0, 2.5] {
                let closed = psi.eval(xi);
                let numeric = psi.by_quadrature(xi).unwrap();
                assert!((closed - numeric).abs() < 1e-8 * closed.max(1e-3), "{m:?} ξ = {xi}: {closed} vs {numeric}");
            }
        }
    }

    #[test]
    fn symmetrized_exponent_is_twice_model_real_part() {
        let models = [
            LevyTriplet::exponential(1.0).unwrap(),
            LevyTriplet::gamma(2.0, 0.5).unwrap(),
            LevyTriplet::inverse_gaussian(1.0, 2.0).unwrap(),
            LevyTriplet::asymmetric_stable(1.5, 0.3, 0.9).unwrap(),
            LevyTriplet::asymmetric_stable(0.6, 1.0, 0.0).unwrap(),
            LevyTriplet::poisson(0.5).unwrap(),
        ];
        for m in &models {
            let psi = CharacteristicExponent::new(&symmetrize(m).unwrap()).unwrap();
            for &xi in &[-2.0, -0.3, 0.7, 4.0] {
                let z = model_exponent(m, xi).unwrap();
                assert!((2.0 * z.re - psi.eval(xi)).abs() < 1e-12 * psi.eval(xi).max(1.0), "{m:?}");
            }
        }
    }

    #[test]
    fn stable_series_leading_term_is_levy_density() {
        let m = LevyTriplet::stable(0.7).unwrap();
        let psi = CharacteristicExponent::new(&symmetrize(&m).unwrap()).unwrap();
        let series = psi.tail_series(1.0);
        let first = series.first_order().unwrap();
        assert!((first.coefficient * 10f64.powf(-1.7) - psi.levy_density(10.0)).abs() < 1e-14);
    }
}
