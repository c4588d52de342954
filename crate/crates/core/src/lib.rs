//! Entropy–energy computations for infinitely divisible location models.

pub mod bayes;
pub mod classify;
pub mod energy;
pub mod error;
pub mod fft;
pub mod grid;
pub mod levy;
pub mod quad;
pub mod regret;
pub mod suite;

pub use bayes::{MarginalDensity, PredictiveKernel, PriorKind, PriorSpec};
pub use classify::{TailFit, Verdict};
pub use energy::{EnergyEstimate, EnergyMethod};
pub use error::{Error, Result};
pub use grid::{Grid1D, GriddedFunction, TailModel};
pub use regret::{IdentityReport, RiskEstimate};
pub use levy::{symmetrize, CharacteristicExponent, LevyMeasureSpec, LevyTriplet, Sides};
