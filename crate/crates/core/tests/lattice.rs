use fockwalk::lattice::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn angle() -> impl Strategy<Value = f64> {
    -2.0 * PI..2.0 * PI
}

fn phase() -> impl Strategy<Value = BoundaryPhase> {
    prop_oneof![Just(BoundaryPhase::Zero), Just(BoundaryPhase::Pi)]
}

fn frame() -> impl Strategy<Value = StepFrame> {
    prop_oneof![Just(StepFrame::Standard), Just(StepFrame::Symmetric)]
}

fn max_diff(a: &WalkerState, b: &WalkerState) -> f64 {
    a.to_vector()
        .iter()
        .zip(b.to_vector())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_matches_dense_oracle(t1 in angle(), t2 in angle(), phi in phase()) {
        let p = BulkParams::new(t1, t2);
        let m = build_step_matrix(p, phi, 64).unwrap();
        for site in 0..=62 {
            for spin in [Spin::Up, Spin::Down] {
                let b = WalkerState::basis(64, site, spin).unwrap();
                let x = floquet_step(&b, p, phi).unwrap();
                prop_assert!(max_diff(&x, &m.apply(&b)) < 1e-12);
            }
        }
    }

    #[test]
    fn step_matrix_unitary(t1 in angle(), t2 in angle(), phi in phase(), f in frame(), n in 2usize..40) {
        let m = build_step_matrix_in_frame(BulkParams::new(t1, t2), phi, n, f).unwrap();
        prop_assert!(m.unitarity_error() < 1e-12);
    }

    #[test]
    fn norm_preserved_over_many_steps(
        draws in proptest::collection::vec((angle(), angle(), phase()), 1000),
        f in frame(),
    ) {
        let mut s = WalkerState::boundary_down(1002).unwrap();
        for (t1, t2, phi) in draws {
            s.step(BulkParams::new(t1, t2), phi, f).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn real_states_stay_real(t1 in angle(), t2 in angle(), phi in phase(), f in frame()) {
        let mut s = WalkerState::boundary_down(202).unwrap();
        for _ in 0..200 {
            s.step(BulkParams::new(t1, t2), phi, f).unwrap();
            prop_assert!(s.max_imag() < 1e-12);
        }
    }

    #[test]
    fn light_cone(t1 in angle(), t2 in angle(), phi in phase(), f in frame(), steps in 1usize..60) {
        let s = WalkerState::boundary_down(steps + 4).unwrap();
        let mut k = 0;
        evolve_in_frame(&s, BulkParams::new(t1, t2), phi, f, steps, |x| {
            k += 1;
            let outside: f64 = (k + 1..=x.n_max()).map(|n| x.population(n)).sum();
            assert_eq!(outside, 0.0);
        }).unwrap();
    }

    #[test]
    fn four_pi_periodic(t1 in angle(), t2 in angle(), phi in phase()) {
        let a = build_step_matrix(BulkParams::new(t1, t2), phi, 20).unwrap();
        let b = build_step_matrix(BulkParams::new(t1 + 4.0 * PI, t2), phi, 20).unwrap();
        let c = build_step_matrix(BulkParams::new(t1, t2 + 4.0 * PI), phi, 20).unwrap();
        prop_assert!((a.matrix() - b.matrix()).camax() < 1e-12);
        prop_assert!((a.matrix() - c.matrix()).camax() < 1e-12);
    }

    #[test]
    fn symmetric_frame_is_conjugate(t1 in angle(), t2 in angle(), phi in phase(), steps in 1usize..40) {
        let p = BulkParams::new(t1, t2);
        let s0 = WalkerState::boundary_down(steps + 2).unwrap();
        let sym = evolve_in_frame(&s0, p, phi, StepFrame::Symmetric, steps, |_| {}).unwrap();
        let std = evolve(&coin_rotation(&s0, -t1 / 2.0), p, phi, steps, |_| {}).unwrap();
        prop_assert!(max_diff(&sym, &coin_rotation(&std, t1 / 2.0)) < 1e-12);
    }

    #[test]
    fn kick_is_involution(t1 in angle(), t2 in angle(), site in 0usize..10) {
        let s = evolve(&WalkerState::boundary_down(12).unwrap(), BulkParams::new(t1, t2), BoundaryPhase::Zero, 8, |_| {}).unwrap();
        let k = sigma_z_kick(&sigma_z_kick(&s, site).unwrap(), site).unwrap();
        prop_assert!(max_diff(&k, &s) < 1e-15);
    }
}

#[test]
fn closed_orbit_on_boundary() {
    let p = BulkParams::new(FRAC_PI_2, -PI);
    let s0 = WalkerState::boundary_down(8).unwrap();
    let s = evolve(&s0, p, BoundaryPhase::Zero, 4, |_| {}).unwrap();
    let on_boundary = s.population(0);
    assert!((on_boundary - 1.0).abs() < 1e-12);
}

#[test]
fn complex_state_norm_preserved() {
    let up: Vec<C64> = (0..30).map(|n| C64::new((n as f64).sin(), (n as f64 * 0.3).cos()) * if n < 20 { 1.0 } else { 0.0 }).collect();
    let down: Vec<C64> = (0..30).map(|n| C64::new(0.1 * n as f64, -0.2) * if n < 20 { 1.0 } else { 0.0 }).collect();
    let s = WalkerState::from_amplitudes(up, down).unwrap();
    let norm = s.norm_sqr();
    let out = evolve(&s, BulkParams::new(0.4, 1.7), BoundaryPhase::Pi, 5, |_| {}).unwrap();
    assert!((out.norm_sqr() - norm).abs() < 1e-12 * norm);
}
