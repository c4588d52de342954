use gauss_quad::GaussLaguerre;
use idregret::fft;
use idregret::levy::{apply_semigroup, resolvent, transition_density};
use idregret::{symmetrize, CharacteristicExponent, Grid1D, GriddedFunction, LevyTriplet};
use proptest::prelude::*;

fn families() -> Vec<LevyTriplet> {
    vec![
        LevyTriplet::gaussian(1.0).unwrap(),
        LevyTriplet::cauchy(1.0).unwrap(),
        LevyTriplet::stable(0.5).unwrap(),
        LevyTriplet::stable(1.5).unwrap(),
        LevyTriplet::exponential(1.0).unwrap(),
        LevyTriplet::gamma(1.0, 1.0).unwrap(),
        LevyTriplet::inverse_gaussian(1.0, 1.0).unwrap(),
        LevyTriplet::gumbel().unwrap(),
        LevyTriplet::poisson(1.0).unwrap(),
        LevyTriplet::asymmetric_stable(1.5, 0.8, 0.2).unwrap(),
    ]
}

/// Families with a transition density.
fn continuous_families() -> Vec<LevyTriplet> {
    families().into_iter().filter(|m| !matches!(m.levy_measure, idregret::LevyMeasureSpec::PointMass { .. })).collect()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn exponent_is_even_nonnegative_and_vanishes_at_zero() {
    for m in families() {
        let psi = CharacteristicExponent::new(&symmetrize(&m).unwrap()).unwrap();
        assert_eq!(psi.eval(0.0), 0.0, "{}", m.label());
        for k in 1..=1000 {
            let xi = 0.05 * k as f64;
            let (p, q) = (psi.eval(xi), psi.eval(-xi));
            assert!(p >= 0.0 && p.is_finite(), "{} at {xi}: {p}", m.label());
            assert_eq!(p, q, "{} at {xi}", m.label());
        }
    }
}

/// Base time of the semigroup check: the symmetrized gamma laws have a kink
/// at the origin for `t ≤ 1.5` that fails the density mass check on these grids.
fn base_time(m: &LevyTriplet) -> f64 {
    if matches!(m.levy_measure, idregret::LevyMeasureSpec::GammaJump { .. } | idregret::LevyMeasureSpec::ExponentialJump { .. }) {
        2.0
    } else {
        1.0
    }
}

#[test]
fn doubled_time_density_is_the_self_convolution() {
    for m in continuous_families() {
        let sym = symmetrize(&m).unwrap();
        let grid = Grid1D::symmetric(400.0, 16384).unwrap();
        let n = grid.len();
        let s = grid.spacing();
        let t = base_time(&m);
        let q1 = transition_density(&sym, t, &grid).unwrap();
        let q2 = transition_density(&sym, 2.0 * t, &grid).unwrap();
        let conv = fft::convolve(&q1.values, &q1.values);
        let err = (n / 4..3 * n / 4).map(|j| (q2.values[j] - s * conv[j + n / 2]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-5, "{}: {err:e}", m.label());
    }
}

#[test]
fn densities_are_exactly_symmetric() {
    let grid = Grid1D::symmetric(50.0, 4096).unwrap();
    let n = grid.len();
    for m in continuous_families() {
        let q = transition_density(&symmetrize(&m).unwrap(), base_time(&m), &grid).unwrap();
        let peak = q.max();
        for j in 1..n {
            let (a, b) = (q.values[j], q.values[n - j]);
            assert!((a - b).abs() <= 1e-14 * peak, "{} at {}: {a} vs {b}", m.label(), grid.point(j));
        }
    }
}

#[test]
fn resolvent_identity_over_parameter_pairs() {
    // Resolvents of the Cauchy semigroup decay like x^{-2}; its grid is wide enough to hold them.
    let cases = [
        (LevyTriplet::gaussian(1.0).unwrap(), Grid1D::symmetric(40.0, 2048).unwrap()),
        (LevyTriplet::exponential(1.0).unwrap(), Grid1D::symmetric(40.0, 2048).unwrap()),
        (LevyTriplet::stable(1.5).unwrap(), Grid1D::symmetric(400.0, 8192).unwrap()),
        (LevyTriplet::cauchy(1.0).unwrap(), Grid1D::symmetric(4000.0, 65536).unwrap()),
    ];
    for (m, grid) in cases {
        let f = GriddedFunction::from_fn(grid, |x| (-0.5 * x * x).exp());
        let sym = symmetrize(&m).unwrap();
        for a in [0.5, 1.0, 2.0] {
            for b in [0.5, 1.0, 2.0] {
                let ga = resolvent(&sym, a, &f).unwrap();
                let gb = resolvent(&sym, b, &f).unwrap();
                let gagb = resolvent(&sym, a, &gb).unwrap();
                let lhs: Vec<f64> = ga.values.iter().zip(&gb.values).map(|(x, y)| x - y).collect();
                let rhs: Vec<f64> = gagb.values.iter().map(|v| (b - a) * v).collect();
                let err = sup(&lhs, &rhs);
                assert!(err < 1e-6, "{} ({a}, {b}): {err:e}", m.label());
            }
        }
    }
}

#[test]
fn resolvent_matches_laguerre_time_integral() {
    let rule = GaussLaguerre::new(60.try_into().unwrap(), 0.0.try_into().unwrap());
    let grid = Grid1D::symmetric(40.0, 1024).unwrap();
    let f = GriddedFunction::from_fn(grid, |x| (-0.5 * x * x).exp());
    for m in [LevyTriplet::gaussian(1.0).unwrap(), LevyTriplet::exponential(1.0).unwrap()] {
        let sym = symmetrize(&m).unwrap();
        for alpha in [0.5, 2.0] {
            let direct = resolvent(&sym, alpha, &f).unwrap();
            let oracle: Vec<f64> = (0..grid.len())
                .map(|j| {
                    rule.integrate(|u| apply_semigroup(&sym, u / alpha, &f).unwrap().values[j]) / alpha
                })
                .collect();
            let err = sup(&direct.values, &oracle);
            assert!(err < 1e-5 * direct.max(), "{} α={alpha}: {err:e}", m.label());
        }
    }
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -10.0..10.0f64, 0.3..3.0f64), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn semigroup_is_an_l2_contraction(family in 0usize..10, t in 0.01..5.0f64, parts in bumps()) {
        let m = &families()[family];
        let grid = Grid1D::symmetric(40.0, 1024).unwrap();
        let f = GriddedFunction::from_fn(grid, |x| {
            parts.iter().map(|(a, c, w)| a * (-(x - c) * (x - c) / (2.0 * w * w)).exp()).sum()
        });
        let tf = apply_semigroup(&symmetrize(m).unwrap(), t, &f).unwrap();
        prop_assert!(tf.l2_norm() <= f.l2_norm() * (1.0 + 1e-12), "{}: {} > {}", m.label(), tf.l2_norm(), f.l2_norm());
    }

    #[test]
    fn exponent_symmetry_at_random_frequencies(family in 0usize..10, xi in -200.0..200.0f64) {
        let psi = CharacteristicExponent::new(&symmetrize(&families()[family]).unwrap()).unwrap();
        prop_assert!(psi.eval(xi) >= 0.0);
        prop_assert_eq!(psi.eval(xi), psi.eval(-xi));
    }
}
