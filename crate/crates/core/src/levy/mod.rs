//! Infinitely divisible location models and their symmetrized benchmark semigroup.
//!
//! A model triplet `(A, ν, γ)` describes the noise law through
//! `E e^{iξX} = exp(iγξ − Aξ²/2 − ∫(1 − e^{iξx}) ν(dx))` (with the usual
//! compensation for stable indices above one). Symmetrization maps it to
//! `(2A, ν̃, 0)` with `ν̃(dx) = ν(dx) + ν(−dx)`; the time-one law of that
//! symmetric process is the benchmark predictive increment.
//!
//! | family | model `ν` | symmetrized exponent `ψ̃(ξ)` |
//! |---|---|---|
//! | Gaussian | none | `vξ²` for `A_sym = 2v` |
//! | Cauchy(c) | `(c/π)|x|^{−2}` | `2c|ξ|` |
//! | stable(α, c) | `c|x|^{−1−α}` | `2cK(α)|ξ|^α` |
//! | exponential(λ) | `x^{−1}e^{−λx}`, `x>0` | `ln(1 + ξ²/λ²)` (Laplace) |
//! | gamma(k, c) | `kx^{−1}e^{−x/c}` | `k ln(1 + c²ξ²)` (variance gamma) |
//! | inverse Gaussian(c, λ) | `cx^{−3/2}e^{−λx}` | `4c√π(Re√(λ−iξ) − √λ)` (NIG) |
//! | Gumbel | `e^{−x}/(x(1−e^{−x}))` | `ln(sinh(πξ)/(πξ))` (logistic) |
//! | Poisson(λ, a) | `λδ_a` | `2λ(1 − cos aξ)` (Skellam) |
//!
//! Here `K(α) = ∫(1 − cos u)|u|^{−1−α} du = π/(Γ(1+α) sin(πα/2))`.

mod density;
mod exponent;
mod generator;
mod semigroup;

pub use density::{
    model_density, model_density_shifted, model_tail_density, transition_density, transition_density_checked,
    DensityDiagnostics, MASS_TOL,
};
pub use exponent::{stable_constant, CharacteristicExponent, TailSeries};
pub use generator::{generator_matrix, Boundary, GeneratorMatrix};
pub use semigroup::{apply_semigroup, resolvent};

use serde::Serialize;

use crate::error::{Error, Result};

/// Which half-lines carry a jump kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sides {
    /// The kernel as written, on `x > 0` (or at the given atom).
    Positive,
    /// The kernel and its mirror image.
    Both,
}

/// Parametric Lévy measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LevyMeasureSpec {
    None,
    /// `(c/π)|x|^{−2}dx`, giving a Cauchy law of scale `c`.
    Cauchy { scale: f64 },
    /// `c|x|^{−1−α}dx`.
    SymmetricStable { alpha: f64, intensity: f64 },
    /// `(c₊1_{x>0} + c₋1_{x<0})|x|^{−1−α}dx`.
    AsymmetricStable { alpha: f64, c_pos: f64, c_neg: f64 },
    /// `x^{−1}e^{−λx}dx`.
    ExponentialJump { rate: f64, sides: Sides },
    /// `k x^{−1}e^{−x/c}dx`.
    GammaJump { shape: f64, scale: f64, sides: Sides },
    /// `c x^{−3/2}e^{−λx}dx`.
    InverseGaussianJump { intensity: f64, rate: f64, sides: Sides },
    /// `e^{−x}/(x(1 − e^{−x}))dx`.
    GumbelJump { sides: Sides },
    /// `λδ_a`.
    PointMass { intensity: f64, atom: f64, sides: Sides },
}

impl LevyMeasureSpec {
    pub fn is_none(&self) -> bool {
        matches!(self, LevyMeasureSpec::None)
    }

    /// Stable index of the tail, when the measure has a power-law tail.
    pub fn stable_index(&self) -> Option<f64> {
        match *self {
            LevyMeasureSpec::Cauchy { .. } => Some(1.0),
            LevyMeasureSpec::SymmetricStable { alpha, .. } | LevyMeasureSpec::AsymmetricStable { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn is_even(&self) -> bool {
        match *self {
            LevyMeasureSpec::None | LevyMeasureSpec::Cauchy { .. } | LevyMeasureSpec::SymmetricStable { .. } => true,
            LevyMeasureSpec::AsymmetricStable { c_pos, c_neg, .. } => c_pos == c_neg,
            LevyMeasureSpec::ExponentialJump { sides, .. }
            | LevyMeasureSpec::GammaJump { sides, .. }
            | LevyMeasureSpec::InverseGaussianJump { sides, .. }
            | LevyMeasureSpec::GumbelJump { sides }
            | LevyMeasureSpec::PointMass { sides, .. } => sides == Sides::Both,
        }
    }

    fn validate(&self) -> Result<()> {
        let pos = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive and finite, got {v}")))
            }
        };
        let stable = |a: f64| {
            if a > 0.0 && a < 2.0 {
                Ok(())
            } else {
                Err(Error::param("alpha", format!("stable index must lie in (0, 2), got {a}")))
            }
        };
        match *self {
            LevyMeasureSpec::None | LevyMeasureSpec::GumbelJump { .. } => Ok(()),
            LevyMeasureSpec::Cauchy { scale } => pos("scale", scale),
            LevyMeasureSpec::SymmetricStable { alpha, intensity } => {
                stable(alpha)?;
                pos("intensity", intensity)
            }
            LevyMeasureSpec::AsymmetricStable { alpha, c_pos, c_neg } => {
                stable(alpha)?;
                if !(c_pos >= 0.0 && c_neg >= 0.0 && c_pos + c_neg > 0.0) {
                    return Err(Error::param("c_pos/c_neg", "need nonnegative intensities with positive sum"));
                }
                Ok(())
            }
            LevyMeasureSpec::ExponentialJump { rate, .. } => pos("rate", rate),
            LevyMeasureSpec::GammaJump { shape, scale, .. } => {
                pos("shape", shape)?;
                pos("scale", scale)
            }
            LevyMeasureSpec::InverseGaussianJump { intensity, rate, .. } => {
                pos("intensity", intensity)?;
                pos("rate", rate)
            }
            LevyMeasureSpec::PointMass { intensity, atom, .. } => {
                pos("intensity", intensity)?;
                if atom == 0.0 || !atom.is_finite() {
                    return Err(Error::param("atom", "must be a nonzero finite location"));
                }
                Ok(())
            }
        }
    }

    /// `ν(dx) + ν(−dx)`.
    fn symmetrized(&self) -> Result<Self> {
        use LevyMeasureSpec::*;
        let two_sided = |sides: Sides| -> Result<Sides> {
            match sides {
                Sides::Positive => Ok(Sides::Both),
                Sides::Both => Err(Error::Unsupported(
                    "symmetrizing a two-sided jump kernel would double an intensity the family cannot carry".into(),
                )),
            }
        };
        Ok(match *self {
            None => None,
            Cauchy { scale } => Cauchy { scale: 2.0 * scale },
            SymmetricStable { alpha, intensity } => SymmetricStable { alpha, intensity: 2.0 * intensity },
            AsymmetricStable { alpha, c_pos, c_neg } => SymmetricStable { alpha, intensity: c_pos + c_neg },
            ExponentialJump { rate, sides } => ExponentialJump { rate, sides: two_sided(sides)? },
            GammaJump { shape, scale, sides } => GammaJump { shape, scale, sides: two_sided(sides)? },
            InverseGaussianJump { intensity, rate, sides } => {
                InverseGaussianJump { intensity, rate, sides: two_sided(sides)? }
            }
            GumbelJump { sides } => GumbelJump { sides: two_sided(sides)? },
            PointMass { intensity, atom, sides } => PointMass { intensity, atom, sides: two_sided(sides)? },
        })
    }
}

/// A Lévy–Khintchine triplet `(A, ν, γ)` in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyTriplet {
    pub gaussian_variance: f64,
    pub levy_measure: LevyMeasureSpec,
    pub center: f64,
    pub dimension: usize,
    symmetrized: bool,
}

impl LevyTriplet {
    pub fn new(gaussian_variance: f64, levy_measure: LevyMeasureSpec, center: f64, dimension: usize) -> Result<Self> {
        if !(gaussian_variance >= 0.0 && gaussian_variance.is_finite()) {
            return Err(Error::param("gaussian_variance", format!("must be finite and ≥ 0, got {gaussian_variance}")));
        }
        if !center.is_finite() {
            return Err(Error::param("center", "must be finite"));
        }
        if dimension == 0 {
            return Err(Error::param("dimension", "must be positive"));
        }
        levy_measure.validate()?;
        if gaussian_variance == 0.0 && levy_measure.is_none() {
            return Err(Error::param("triplet", "degenerate: no Gaussian part and no jumps"));
        }
        if let LevyMeasureSpec::AsymmetricStable { alpha, c_pos, c_neg } = levy_measure {
            if alpha == 1.0 && c_pos != c_neg {
                return Err(Error::Unsupported("asymmetric stable laws with α = 1".into()));
            }
        }
        Ok(Self { gaussian_variance, levy_measure, center, dimension, symmetrized: false })
    }

    /// One-dimensional Gaussian noise of variance `v`.
    pub fn gaussian(v: f64) -> Result<Self> {
        Self::new(v, LevyMeasureSpec::None, 0.0, 1)
    }

    /// Cauchy noise of scale `c`, exponent `c|ξ|`.
    pub fn cauchy(c: f64) -> Result<Self> {
        Self::new(0.0, LevyMeasureSpec::Cauchy { scale: c }, 0.0, 1)
    }

    /// Symmetric α-stable noise with exponent `|ξ|^α`.
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::param("alpha", format!("stable index must lie in (0, 2), got {alpha}")));
        }
        let intensity = 1.0 / stable_constant(alpha)?;
        Self::new(0.0, LevyMeasureSpec::SymmetricStable { alpha, intensity }, 0.0, 1)
    }

    pub fn asymmetric_stable(alpha: f64, c_pos: f64, c_neg: f64) -> Result<Self> {
        Self::new(0.0, LevyMeasureSpec::AsymmetricStable { alpha, c_pos, c_neg }, 0.0, 1)
    }

    /// Exponential(λ) noise; its symmetrization is Laplace.
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(0.0, LevyMeasureSpec::ExponentialJump { rate, sides: Sides::Positive }, 0.0, 1)
    }

    /// Gamma(shape k, scale c) noise; its symmetrization is variance gamma.
    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(0.0, LevyMeasureSpec::GammaJump { shape, scale, sides: Sides::Positive }, 0.0, 1)
    }

    /// Inverse Gaussian noise; its symmetrization is normal inverse Gaussian.
    pub fn inverse_gaussian(intensity: f64, rate: f64) -> Result<Self> {
        Self::new(0.0, LevyMeasureSpec::InverseGaussianJump { intensity, rate, sides: Sides::Positive }, 0.0, 1)
    }

    /// Standard Gumbel noise; its symmetrization is logistic.
    pub fn gumbel() -> Result<Self> {
        Self::new(0.0, LevyMeasureSpec::GumbelJump { sides: Sides::Positive }, 0.0, 1)
    }

    /// Poisson(λ) noise with unit jumps; its symmetrization is Skellam.
    pub fn poisson(intensity: f64) -> Result<Self> {
        Self::new(0.0, LevyMeasureSpec::PointMass { intensity, atom: 1.0, sides: Sides::Positive }, 0.0, 1)
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        use LevyMeasureSpec::*;
        let side = |s: Sides| if s == Sides::Both { ",two-sided" } else { "" };
        let jumps = match self.levy_measure {
            None => String::new(),
            Cauchy { scale } => format!("cauchy(c={scale})"),
            SymmetricStable { alpha, intensity } => match stable_constant(alpha) {
                Ok(k) if (intensity * k - 1.0).abs() < 1e-12 => format!("stable(alpha={alpha})"),
                _ => format!("stable(alpha={alpha},c={intensity})"),
            },
            AsymmetricStable { alpha, c_pos, c_neg } => format!("stable(alpha={alpha},c+={c_pos},c-={c_neg})"),
            ExponentialJump { rate, sides } => format!("exponential(rate={rate}{})", side(sides)),
            GammaJump { shape, scale, sides } => format!("gamma(k={shape},c={scale}{})", side(sides)),
            InverseGaussianJump { intensity, rate, sides } => {
                format!("inverse_gaussian(c={intensity},rate={rate}{})", side(sides))
            }
            GumbelJump { sides } => format!("gumbel({})", side(sides).trim_start_matches(',')),
            PointMass { intensity, atom, sides } => format!("poisson(rate={intensity},atom={atom}{})", side(sides)),
        };
        let mut label = match (self.gaussian_variance > 0.0, jumps.is_empty()) {
            (true, true) => format!("gaussian(v={})", self.gaussian_variance),
            (true, false) => format!("gaussian(v={})+{jumps}", self.gaussian_variance),
            _ => jumps,
        };
        if self.dimension != 1 {
            label += &format!("[d={}]", self.dimension);
        }
        label
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn with_dimension(mut self, d: usize) -> Self {
        self.dimension = d.max(1);
        self
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// True when the noise has finite variance.
    pub fn has_finite_variance(&self) -> bool {
        self.levy_measure.stable_index().is_none()
    }

    pub(crate) fn require_symmetrized(&self) -> Result<()> {
        if self.symmetrized {
            Ok(())
        } else {
            Err(Error::NotSymmetrized)
        }
    }

    pub(crate) fn require_one_dimensional(&self) -> Result<()> {
        if self.dimension == 1 {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("numeric pipeline is one-dimensional, got d = {}", self.dimension)))
        }
    }
}

/// Maps a model triplet `(A, ν, γ)` to `(2A, ν̃, 0)`.
pub fn symmetrize(triplet: &LevyTriplet) -> Result<LevyTriplet> {
    if triplet.symmetrized {
        return Err(Error::AlreadySymmetrized);
    }
    Ok(LevyTriplet {
        gaussian_variance: 2.0 * triplet.gaussian_variance,
        levy_measure: triplet.levy_measure.symmetrized()?,
        center: 0.0,
        dimension: triplet.dimension,
        symmetrized: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_symmetrization_doubles_variance_and_drops_drift() {
        let m = LevyTriplet::gaussian(1.5).unwrap().with_center(0.7);
        let s = symmetrize(&m).unwrap();
        assert_eq!(s.gaussian_variance, 3.0);
        assert_eq!(s.center, 0.0);
        assert!(s.levy_measure.is_none());
    }

    #[test]
    fn poisson_becomes_two_sided_atom() {
        let s = symmetrize(&LevyTriplet::poisson(0.3).unwrap()).unwrap();
        assert_eq!(s.levy_measure, LevyMeasureSpec::PointMass { intensity: 0.3, atom: 1.0, sides: Sides::Both });
        assert!(s.levy_measure.is_even());
    }

    #[test]
    fn asymmetric_stable_sums_intensities() {
        let s = symmetrize(&LevyTriplet::asymmetric_stable(1.5, 0.25, 0.5).unwrap()).unwrap();
        assert_eq!(s.levy_measure, LevyMeasureSpec::SymmetricStable { alpha: 1.5, intensity: 0.75 });
    }

    #[test]
    fn reapplication_is_rejected() {
        let s = symmetrize(&LevyTriplet::cauchy(1.0).unwrap()).unwrap();
        assert_eq!(symmetrize(&s), Err(Error::AlreadySymmetrized));
    }

    #[test]
    fn invalid_parameters() {
        assert!(LevyTriplet::stable(2.0).is_err());
        assert!(LevyTriplet::cauchy(-1.0).is_err());
        assert!(LevyTriplet::new(0.0, LevyMeasureSpec::None, 0.0, 1).is_err());
        assert!(LevyTriplet::asymmetric_stable(1.0, 1.0, 0.5).is_err());
    }
}
