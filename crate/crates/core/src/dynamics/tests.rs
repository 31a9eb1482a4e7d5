use super::state::symplectic_form;
use super::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Propagator from the normal-mode decomposition `Ω² = T^{½} V T^{½}`.
fn normal_mode_propagator(form: &QuadraticForm, t: f64) -> DMatrix<f64> {
    let n = form.modes();
    let sqrt_sym = |m: &DMatrix<f64>, p: f64| {
        let e = m.clone().symmetric_eigen();
        let d = DMatrix::from_diagonal(&e.eigenvalues.map(|x| x.powf(p)));
        &e.eigenvectors * d * e.eigenvectors.transpose()
    };
    let th = sqrt_sym(form.momentum_matrix(), 0.5);
    let thi = sqrt_sym(form.momentum_matrix(), -0.5);
    let om2 = &th * form.position_matrix() * &th;
    let e = om2.symmetric_eigen();
    let q = &e.eigenvectors;
    let w = e.eigenvalues.map(|x| x.sqrt());
    let ph = w.map(|x| 2.0 * PI * x * t);
    let f = |g: &dyn Fn(f64, f64) -> f64| {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(n, ph.iter().zip(w.iter()).map(|(p, w)| g(*p, *w))));
        q * d * q.transpose()
    };
    let c = f(&|p, _| p.cos());
    let s_over_w = f(&|p, w| p.sin() / w);
    let s_times_w = f(&|p, w| p.sin() * w);
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(&(&th * &c * &thi));
    s.view_mut((0, n), (n, n)).copy_from(&(&th * &s_over_w * &th));
    s.view_mut((n, 0), (n, n)).copy_from(&(-(&thi * &s_times_w * &thi)));
    s.view_mut((n, n), (n, n)).copy_from(&(&thi * &c * &th));
    s
}

fn chain(n: usize, g: f64, eta: f64, alpha: f64, omega_over_g: f64) -> ChainSpec {
    ChainSpec { n, g_aa: g, g_mm: g, eta, alpha, ..ChainSpec::pair(g, omega_over_g) }
}

#[test]
fn chain_coefficients() {
    let s = ChainSpec::pair(1.5, 50.0);
    assert_eq!(s.f(0, 0), 1.5);
    let s2 = ChainSpec { n: 2, g_aa: 0.7, g_mm: 0.3, eta: 1.0, alpha: 6.0, ..ChainSpec::pair(2.0, 50.0) };
    assert!((s2.k(0, 1) - 0.7).abs() < 1e-15);
    assert!((s2.l(1, 0) - 0.3).abs() < 1e-15);
    assert!((s2.f(0, 1) - 2.0 / 16.0).abs() < 1e-15);
    let far = ChainSpec { eta: 1e6, ..s2.clone() };
    let form = build_chain(&far).unwrap();
    let v = form.position_matrix();
    assert!(v[(0, 1)].abs() < 1e-40 && v[(0, 3)].abs() < 1e-40 && v[(2, 3)].abs() < 1e-40);
    assert!((v[(0, 2)] + 4.0).abs() < 1e-12);
}

#[test]
fn single_pair_form() {
    let form = build_chain(&ChainSpec::pair(1.0, 10.0)).unwrap();
    let v = form.position_matrix();
    assert_eq!(v.shape(), (2, 2));
    assert_eq!(v[(0, 0)], 12.0);
    assert_eq!(v[(0, 1)], -2.0);
    assert_eq!(form.momentum_matrix(), &(DMatrix::identity(2, 2) * 10.0));
    assert!(form.is_stable());
}

#[test]
fn evolve_trivial_cases() {
    let form = build_chain(&ChainSpec::pair(1.0, 10.0)).unwrap();
    let st = ChainSpec::pair(1.0, 10.0).initial_state();
    let out = evolve(&form, &st, 0.0).unwrap();
    assert!((out.covariance - &st.covariance).amax() < 1e-15);
    let single = QuadraticForm::with_couplings(&[3.0], &DMatrix::zeros(1, 1)).unwrap();
    let vac = GaussianState::vacuum(1);
    for t in [0.1, 1.7, 33.0] {
        let out = evolve(&single, &vac, t).unwrap();
        assert!((out.covariance - &vac.covariance).amax() < 1e-12);
    }
    assert!(evolve(&single, &vac, f64::NAN).is_err());
    assert!(evolve(&form, &vac, 1.0).is_err());
}

#[test]
fn occupations() {
    assert_eq!(GaussianState::vacuum(3).mode_occupations(), vec![0.0; 3]);
    let mut st = GaussianState::vacuum(1);
    st.mean[0] = 40f64.sqrt();
    assert!((st.mode_occupations()[0] - 20.0).abs() < 1e-13);
    let s: f64 = 0.7;
    let sq = GaussianState {
        mean: DVector::zeros(2),
        covariance: DMatrix::from_diagonal(&DVector::from_vec(vec![(2.0 * s).exp() / 2.0, (-2.0 * s).exp() / 2.0])),
    };
    assert!((sq.mode_occupations()[0] - s.sinh().powi(2)).abs() < 1e-14);
    assert!(sq.validate().is_ok());
    let bad = GaussianState { mean: DVector::zeros(2), covariance: DMatrix::identity(2, 2) * 0.2 };
    assert!(bad.validate().is_err());
}

#[test]
fn independent_pair_limits() {
    let e50 = swap_efficiency(&ChainSpec::pair(1.0, 50.0)).unwrap();
    let e10 = swap_efficiency(&ChainSpec::pair(1.0, 10.0)).unwrap();
    assert!((e50 - 0.999).abs() <= 0.002, "{e50}");
    assert!((e10 - 0.982).abs() <= 0.002, "{e10}");
}

#[test]
fn rwa_swap_is_exact_and_state_independent() {
    for omega in [10.0, 50.0] {
        let rwa = ChainSpec { model: ChainModel::RotatingWave, ..ChainSpec::pair(1.0, omega) };
        let thermal = swap_efficiency(&rwa).unwrap();
        let coherent = swap_efficiency(&ChainSpec { initial: InitialState::Coherent, ..rwa.clone() }).unwrap();
        assert!((thermal - 1.0).abs() < 1e-10);
        assert!((thermal - coherent).abs() < 1e-10);
    }
    // In a chain, in-phase coherent amplitudes interfere between sites while
    // thermal occupations add, so the two only coincide for an isolated pair.
    let rwa = ChainSpec { model: ChainModel::RotatingWave, ..chain(6, 1.0, 1.5, 6.0, 50.0) };
    let thermal = swap_efficiency(&rwa).unwrap();
    let coherent = swap_efficiency(&ChainSpec { initial: InitialState::Coherent, ..rwa }).unwrap();
    assert!((thermal - coherent).abs() > 1e-6);
}

#[test]
fn rwa_pair_closed_form() {
    let g = 2.0;
    assert!(rwa_pair(g, 0.0, swap_time(g), 20.0).abs() < 1e-12);
    assert!((rwa_pair(g, 0.0, swap_time(g) / 2.0, 20.0) - 10.0).abs() < 1e-12);
    let delta = 2.0 * g;
    let omega = (4.0 * g * g + delta * delta).sqrt();
    let t_min = 0.5 / omega;
    assert!((rwa_pair(g, delta, t_min, 20.0) - 10.0).abs() < 1e-12);
    assert_eq!(rwa_pair(0.0, 0.0, 1.0, 7.0), 7.0);
}

#[test]
fn rwa_pair_matches_gaussian_evolution() {
    let (g, delta, w0) = (1.3, 0.9, 40.0);
    let coupling = DMatrix::from_row_slice(2, 2, &[0.0, 2.0 * g, 2.0 * g, 0.0]);
    let form = QuadraticForm::rotating_wave(&[w0, w0 + delta], &coupling).unwrap();
    let mut st = GaussianState::vacuum(2);
    st.set_thermal(1, 20.0);
    for t in [0.01, 0.07, 0.13, 0.4] {
        let n = evolve(&form, &st, t).unwrap().mode_occupations()[1];
        assert!((n - rwa_pair(g, delta, t, 20.0)).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn instability_is_flagged() {
    let spec = ChainSpec { omega_z: 1.0, ..ChainSpec::pair(-1.0, 1.0) };
    let form = build_chain(&spec).unwrap();
    assert!(!form.is_stable());
    assert!(matches!(swap_efficiency(&spec), Err(crate::Error::Unstable(_))));
}

#[test]
fn linear_terms_shift_equilibrium() {
    let form = QuadraticForm::new(DMatrix::identity(1, 1) * 2.0, DMatrix::identity(1, 1) * 2.0, DVector::from_vec(vec![4.0])).unwrap();
    let mut st = GaussianState::vacuum(1);
    st.mean[0] = -2.0;
    let out = evolve(&form, &st, 0.37).unwrap();
    assert!((out.mean[0] + 2.0).abs() < 1e-12 && out.mean[1].abs() < 1e-12);
    let e0 = form.energy(&st);
    st.mean[0] = 1.0;
    let later = evolve(&form, &st, 0.37).unwrap();
    assert!((form.energy(&later) - form.energy(&st)).abs() < 1e-10 * e0.abs().max(1.0));
}

#[test]
fn monotone_in_eta_small_chain() {
    let mut last = f64::NEG_INFINITY;
    for eta in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
        let e = swap_efficiency(&chain(12, 1.0, eta, 6.0, 50.0)).unwrap();
        assert!(e >= last - 1e-12, "eta {eta}: {e} < {last}");
        last = e;
    }
    let limit = swap_efficiency(&ChainSpec::pair(1.0, 50.0)).unwrap();
    assert!((last - limit).abs() < 1e-3);
}

fn arb_stable_chain() -> impl Strategy<Value = ChainSpec> {
    (1usize..6, 0.2..3.0f64, -1.0..1.0f64, -1.0..1.0f64, 1.0..4.0f64, prop::sample::select(vec![3.0, 6.0]), 10.0..80.0f64)
        .prop_map(|(n, g, kaa, kmm, eta, alpha, ratio)| ChainSpec {
            n,
            g_aa: kaa * g,
            g_mm: kmm * g,
            eta,
            alpha,
            ..ChainSpec::pair(g, ratio)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagator_matches_normal_modes(spec in arb_stable_chain(), frac in 0.0..3.0f64) {
        let form = build_chain(&spec).unwrap();
        prop_assume!(form.is_stable());
        let t = frac * swap_time(spec.g_am);
        let s = form.propagator(t).unwrap();
        let oracle = normal_mode_propagator(&form, t);
        prop_assert!((&s.matrix - &oracle).amax() < 1e-9 * oracle.amax().max(1.0));
        prop_assert!(s.symplectic_defect() <= 1e-10);
    }

    #[test]
    fn energy_is_conserved(spec in arb_stable_chain(), frac in 0.0..10.0f64) {
        let form = build_chain(&spec).unwrap();
        prop_assume!(form.is_stable());
        let st = spec.initial_state();
        let e0 = form.energy(&st);
        let out = evolve(&form, &st, frac * swap_time(spec.g_am)).unwrap();
        prop_assert!(((form.energy(&out) - e0) / e0).abs() <= 1e-8);
        prop_assert!(out.uncertainty_margin() > -1e-9);
    }
}

#[test]
fn symplectic_form_shape() {
    let j = symplectic_form(2);
    assert_eq!(&j * &j, -DMatrix::<f64>::identity(4, 4));
}
