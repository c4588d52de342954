use idregret::bayes::marginal_density;
use idregret::energy::{
    blyth_sequence_energies, default_killing, energy_finite_h, energy_gradient_local, energy_spectral,
    killed_resolvent, rate_function_lower_bound, DEFAULT_H_SCHEDULE, DEFAULT_SEED, GENERATOR_STEP,
};
use idregret::levy::{Boundary, GeneratorMatrix};
use idregret::{symmetrize, Grid1D, GriddedFunction, LevyTriplet, PriorSpec};
use proptest::prelude::*;

fn bump(grid: Grid1D) -> GriddedFunction {
    GriddedFunction::from_fn(grid, |x| (-0.5 * x * x).exp())
}

#[test]
fn gaussian_energy_of_a_bump_matches_the_closed_form() {
    let grid = Grid1D::symmetric(30.0, 2048).unwrap();
    let f = bump(grid);
    for v in [0.5, 1.0, 3.0] {
        let sym = symmetrize(&LevyTriplet::gaussian(v).unwrap()).unwrap();
        let exact = v * std::f64::consts::PI.sqrt() / 2.0;
        let spectral = energy_spectral(&sym, &f).unwrap().value;
        let gradient = energy_gradient_local(v, &f).unwrap().value;
        assert!((spectral - exact).abs() < 1e-10 * exact, "v={v}: {spectral} vs {exact}");
        assert!((gradient - exact).abs() < 1e-3 * exact, "v={v}: {gradient} vs {exact}");
    }
}

#[test]
fn finite_h_quotients_increase_as_the_step_shrinks() {
    let grid = Grid1D::symmetric(40.0, 2048).unwrap();
    let f = bump(grid);
    let schedule = [0.4, 0.2, 0.1, 0.05, 0.025];
    for m in [LevyTriplet::gaussian(1.0).unwrap(), LevyTriplet::cauchy(1.0).unwrap(), LevyTriplet::stable(1.5).unwrap()] {
        let sym = symmetrize(&m).unwrap();
        let est = energy_finite_h(&sym, &f, &schedule).unwrap();
        assert!(est.partials.windows(2).all(|w| w[1] >= w[0] - 1e-8), "{}: {:?}", m.label(), est.partials);
        let spectral = energy_spectral(&sym, &f).unwrap().value;
        assert!(est.partials.iter().all(|&q| q <= spectral + 1e-8));
        assert!((est.value - spectral).abs() < 1e-4 * spectral, "{}: {} vs {spectral}", m.label(), est.value);
    }
}

#[test]
fn rejects_non_decreasing_schedules() {
    let grid = Grid1D::symmetric(10.0, 256).unwrap();
    let sym = symmetrize(&LevyTriplet::gaussian(1.0).unwrap()).unwrap();
    assert!(energy_finite_h(&sym, &bump(grid), &[0.1, 0.2, 0.05, 0.025]).is_err());
    assert!(energy_finite_h(&sym, &bump(grid), &DEFAULT_H_SCHEDULE[..3]).is_err());
}

/// `⟨f, −L f⟩·s` for the periodic discrete generator the rate bound is built on.
fn generator_form(sym: &LevyTriplet, f: &GriddedFunction) -> f64 {
    let gen = GeneratorMatrix::new(sym, &f.grid, GENERATOR_STEP, Boundary::Periodic).unwrap();
    -f.values.iter().zip(gen.apply(&f.values)).map(|(a, b)| a * b).sum::<f64>() * f.grid.spacing()
}

#[test]
fn rate_lower_bound_stays_below_the_discrete_dirichlet_form() {
    let grid = Grid1D::symmetric(40.0, 1024).unwrap();
    for model in [LevyTriplet::exponential(1.0).unwrap(), LevyTriplet::gaussian(1.0).unwrap(), LevyTriplet::cauchy(1.0).unwrap()] {
        let sym = symmetrize(&model).unwrap();
        let m = marginal_density(&model, &PriorSpec::gaussian(1.0).unwrap(), &grid).unwrap();
        let total = m.function.integral();
        let mu = m.function.map(|v| v / total);
        let lower = rate_function_lower_bound(&sym, &mu, 12, DEFAULT_SEED).unwrap().value;
        let form = generator_form(&sym, &mu.sqrt());
        assert!(lower > 0.0 && lower <= form * (1.0 + 1e-9), "{}: {lower} vs {form}", model.label());
    }
}

#[test]
fn marginal_energy_is_below_the_prior_energy() {
    let grid = Grid1D::symmetric(40.0, 4096).unwrap();
    let model = LevyTriplet::gaussian(1.0).unwrap();
    for prior in [PriorSpec::gaussian(1.0).unwrap(), PriorSpec::gaussian(0.25).unwrap(), PriorSpec::student(3.0).unwrap()] {
        let m = marginal_density(&model, &prior, &grid).unwrap();
        let pi = GriddedFunction::from_fn(grid, |x| prior.density(x));
        let em = energy_gradient_local(1.0, &m.sqrt()).unwrap().value;
        let ep = energy_gradient_local(1.0, &pi.sqrt()).unwrap().value;
        assert!(em <= ep, "{}: {em} > {ep}", prior.label());
    }
}

#[test]
fn gaussian_marginal_energy_matches_the_convolution_closed_form() {
    // √M for a N(0, σ²) prior is proportional to exp(−x²/(4(1 + σ²))).
    let grid = Grid1D::symmetric(60.0, 4096).unwrap();
    let model = LevyTriplet::gaussian(1.0).unwrap();
    let sym = symmetrize(&model).unwrap();
    for s2 in [0.5, 1.0, 4.0] {
        let m = marginal_density(&model, &PriorSpec::gaussian(s2).unwrap(), &grid).unwrap();
        let e = energy_spectral(&sym, &m.sqrt()).unwrap().value;
        let exact = 1.0 / (4.0 * (1.0 + s2));
        assert!((e - exact).abs() < 1e-8, "σ²={s2}: {e} vs {exact}");
    }
}

#[test]
fn blyth_energies_are_nonnegative_and_reproducible() {
    let grid = Grid1D::symmetric(50.0, 256).unwrap();
    let sym = symmetrize(&LevyTriplet::gaussian(1.0).unwrap()).unwrap();
    let eta = default_killing(&grid);
    let a = blyth_sequence_energies(&sym, &eta, &[1, 4, 16]).unwrap();
    let b = blyth_sequence_energies(&sym, &eta, &[1, 4, 16]).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|e| e.value >= 0.0 && e.value.is_finite()));
    assert!(blyth_sequence_energies(&sym, &eta, &[4, 1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn killed_resolvent_is_bounded_and_monotone_in_alpha(
        family in 0usize..3,
        a in 0.01..2.0f64,
        ratio in 1.1..10.0f64,
        rate in 0.2..3.0f64,
    ) {
        let m = [LevyTriplet::gaussian(1.0).unwrap(), LevyTriplet::cauchy(1.0).unwrap(), LevyTriplet::stable(1.5).unwrap()];
        let sym = symmetrize(&m[family]).unwrap();
        let grid = Grid1D::symmetric(20.0, 128).unwrap();
        let eta = GriddedFunction::from_fn(grid, |x| (-rate * x.abs()).exp());
        let slow = killed_resolvent(&sym, &eta, a, &grid).unwrap();
        let fast = killed_resolvent(&sym, &eta, a * ratio, &grid).unwrap();
        prop_assert!(slow.values.iter().all(|&u| (0.0..=1.0 + 1e-6).contains(&u)));
        prop_assert!(slow.values.iter().zip(&fast.values).all(|(s, f)| *f <= s + 1e-9));
    }
}
