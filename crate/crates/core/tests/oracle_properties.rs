use std::f64::consts::PI;

use ck_backflow::dynamics::{
    evolution_coefficients, momentum_gaussian, packet_amplitude, superposed_amplitude, CkParams, GaussianPacket,
    SuperposedState,
};
use ck_backflow::oracle::{propagate_ck, run_validation_suite, GridSpec};
use ck_backflow::quadrature::adaptive_quadrature;
use ck_backflow::special::{half_line_gaussian_overlap, ComplexGaussian};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> SuperposedState {
    let a = GaussianPacket::new(0.0, 1.4, 0.05, 0.0).unwrap();
    let b = GaussianPacket::new(0.0, 0.3, 0.05, 0.0).unwrap();
    SuperposedState::new(a, b, 1.9, PI).unwrap()
}

#[test]
fn damped_superposition_matches_the_grid() {
    let s = reference();
    let params = CkParams::atomic(0.3).unwrap();
    let zero = CkParams::atomic(0.0).unwrap();
    let psi = propagate_ck(
        |x| superposed_amplitude(&s, &zero, x, 0.0).unwrap(),
        &params,
        &GridSpec::standard(),
        10.0,
    )
    .unwrap();
    let d = psi.l2_distance(|x| superposed_amplitude(&s, &params, x, 10.0).unwrap());
    assert!(d <= 1e-8, "{d}");
    assert!((psi.norm() - 1.0).abs() < 1e-12);
}

/// Momentum-space L² error of the stepped propagation against the closed form.
fn stepped_error(t_step: f64) -> f64 {
    let packet = GaussianPacket::new(-20.0, 0.5, 0.25, 0.5).unwrap();
    let params = CkParams::new(0.2, 0.2, 1.0, 1.0).unwrap();
    let free = CkParams::atomic(0.0).unwrap();
    let grid = GridSpec::new(-200.0, 200.0, 4096, t_step).unwrap();
    let t = 5.0;
    let psi = propagate_ck(|x| packet_amplitude(&packet, &free, x, 0.0).unwrap(), &params, &grid, t).unwrap();
    let exact = momentum_gaussian(&packet, &params, t).unwrap();
    let dp = 2.0 * PI / (grid.x_max() - grid.x_min());
    let sum: f64 = psi
        .momentum_samples()
        .iter()
        .map(|(p, v)| (v - exact.eval(*p)).norm_sqr())
        .sum();
    (sum * dp).sqrt()
}

#[test]
fn stepping_converges_at_second_order() {
    let errors: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&dt| stepped_error(dt)).collect();
    for pair in errors.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!((order - 2.0).abs() < 0.15, "errors {errors:?}");
    }
}

#[test]
fn forced_momentum_centroid_follows_the_classical_kick() {
    let packet = GaussianPacket::new(0.0, 1.4, 0.05, 0.0).unwrap();
    let free = CkParams::atomic(0.0).unwrap();
    for (gamma, g) in [(0.2, 0.1), (0.0, 0.05)] {
        let params = CkParams::new(gamma, g, 1.0, 1.0).unwrap();
        let psi = propagate_ck(
            |x| packet_amplitude(&packet, &free, x, 0.0).unwrap(),
            &params,
            &GridSpec::standard(),
            5.0,
        )
        .unwrap();
        let physical = params.kinetic_factor(5.0) * psi.mean_canonical_momentum();
        let p_t = evolution_coefficients(&packet, &params, 5.0).unwrap().p_t;
        assert!((physical - p_t).abs() < 1e-8, "{physical} vs {p_t}");
    }
}

#[test]
fn quadrature_estimates_are_conservative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let g1 = ComplexGaussian::centered(
            Complex64::new(rng.gen_range(0.05..2.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(0.0, rng.gen_range(-3.0..3.0)),
        );
        let g2 = ComplexGaussian::centered(
            Complex64::new(rng.gen_range(0.05..2.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)),
            Complex64::new(0.0, rng.gen_range(-3.0..3.0)),
        );
        let exact = half_line_gaussian_overlap(&g1, &g2).unwrap();
        let r = adaptive_quadrature(|x| g1.eval(x).conj() * g2.eval(x), 0.0, f64::INFINITY, 1e-12).unwrap();
        let err = (r.value - exact).norm();
        assert!(err <= 1e-10, "{err}");
        assert!(err <= r.error_estimate.max(1e-14), "{err} > {}", r.error_estimate);
    }
}

#[test]
fn validation_suite_passes() {
    for check in run_validation_suite() {
        assert!(check.passed, "{check:?}");
    }
}
