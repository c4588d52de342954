//! Fixed inputs shared by the criterion benchmarks.

use idregret::bayes::marginal_density;
use idregret::{Grid1D, GriddedFunction, LevyTriplet, PriorSpec};

/// Models exercised by every benchmark group.
pub fn models() -> Vec<LevyTriplet> {
    vec![
        LevyTriplet::gaussian(1.0).expect("valid variance"),
        LevyTriplet::cauchy(1.0).expect("valid scale"),
        LevyTriplet::stable(1.5).expect("valid index"),
    ]
}

/// Symmetric grid of half-width 100 with `n` points.
pub fn grid(n: usize) -> Grid1D {
    Grid1D::symmetric(100.0, n).expect("valid grid")
}

/// Normalized marginal of `model` under a unit Gaussian prior.
pub fn marginal(model: &LevyTriplet, grid: &Grid1D) -> GriddedFunction {
    let m = marginal_density(model, &PriorSpec::gaussian(1.0).expect("valid variance"), grid).expect("marginal");
    let total = m.function.integral();
    m.function.map(|v| v / total)
}
