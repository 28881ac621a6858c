use std::f64::consts::PI;

use ck_backflow::analysis::{find_backflow_intervals, one_particle_intervals, BackflowInterval, DEFAULT_TOL};
use ck_backflow::dynamics::{current_density, left_probability, CkParams, GaussianPacket, Method, SuperposedState};

fn reference(eta: f64, theta: f64) -> SuperposedState {
    let a = GaussianPacket::new(0.0, 1.4, 0.05, eta).unwrap();
    let b = GaussianPacket::new(0.0, 0.3, 0.05, eta).unwrap();
    SuperposedState::new(a, b, 1.9, theta).unwrap()
}

fn cases() -> Vec<(SuperposedState, CkParams)> {
    let mut out = Vec::new();
    for (eta, theta, gamma) in [(0.0, PI, 0.0), (0.0, PI, 0.3), (1.0, PI, 0.0), (0.5, 2.6, 0.1), (2.0, PI, 0.3)] {
        out.push((reference(eta, theta), CkParams::atomic(gamma).unwrap()));
    }
    out
}

fn contained(a: f64, b: f64, intervals: &[BackflowInterval], slack: f64) -> bool {
    intervals.iter().any(|i| i.t_start - slack <= a && b <= i.t_end + slack)
}

#[test]
fn reported_intervals_are_genuine_rises() {
    for (s, params) in cases() {
        let p = |t| left_probability(&s, &params, t, Method::Analytic).unwrap();
        for i in one_particle_intervals(&s, &params, 10.0, DEFAULT_TOL).unwrap() {
            assert!(i.t_start < i.t_end);
            assert!(p(i.t_end) > p(i.t_start));
            assert!((i.probability_gain - (p(i.t_end) - p(i.t_start))).abs() < 1e-15);
            let h = 1e-4;
            for k in 1..200 {
                let t = i.t_start + (i.t_end - i.t_start) * k as f64 / 200.0;
                let slope = (p((t + h).min(10.0)) - p((t - h).max(0.0))) / ((t + h).min(10.0) - (t - h).max(0.0));
                assert!(slope >= -1e-9, "{i:?} at {t}: {slope}");
                assert!(current_density(&s, &params, 0.0, t).unwrap() < 0.0);
            }
        }
    }
}

#[test]
fn every_rise_on_a_dense_grid_is_reported() {
    for (s, params) in cases() {
        let intervals = one_particle_intervals(&s, &params, 10.0, DEFAULT_TOL).unwrap();
        let dt = 1e-3;
        let values: Vec<f64> = (0..=10_000)
            .map(|k| left_probability(&s, &params, k as f64 * dt, Method::Analytic).unwrap())
            .collect();
        let mut k = 0;
        while k < values.len() - 1 {
            if values[k + 1] > values[k] {
                let start = k;
                while k < values.len() - 1 && values[k + 1] > values[k] {
                    k += 1;
                }
                if values[k] - values[start] > DEFAULT_TOL {
                    let (a, b) = (start as f64 * dt, k as f64 * dt);
                    assert!(contained(a, b, &intervals, dt), "rise ({a}, {b}) missed: {intervals:?}");
                }
            }
            k += 1;
        }
    }
}

#[test]
fn endpoints_are_sign_changes_of_the_current() {
    for (s, params) in cases() {
        let j = |t: f64| current_density(&s, &params, 0.0, t).unwrap();
        for i in one_particle_intervals(&s, &params, 10.0, DEFAULT_TOL).unwrap() {
            for edge in [i.t_start, i.t_end] {
                if edge <= 0.0 || edge >= 10.0 {
                    continue;
                }
                assert!(j(edge - 1e-6).signum() != j(edge + 1e-6).signum(), "{i:?}");
            }
        }
    }
}

#[test]
fn difference_and_rate_detectors_agree() {
    for (s, params) in cases() {
        let exact = one_particle_intervals(&s, &params, 10.0, DEFAULT_TOL).unwrap();
        let differenced =
            find_backflow_intervals(|t| left_probability(&s, &params, t, Method::Analytic), 10.0, DEFAULT_TOL).unwrap();
        assert_eq!(exact.len(), differenced.len());
        for (a, b) in exact.iter().zip(&differenced) {
            assert!((a.t_start - b.t_start).abs() < 1e-5 && (a.t_end - b.t_end).abs() < 1e-5, "{a:?} vs {b:?}");
            assert!((a.probability_gain - b.probability_gain).abs() < 1e-10);
        }
    }
}

#[test]
fn detection_is_bit_reproducible() {
    let (s, params) = cases().remove(0);
    let a = one_particle_intervals(&s, &params, 10.0, DEFAULT_TOL).unwrap();
    let b = one_particle_intervals(&s, &params, 10.0, DEFAULT_TOL).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn stationary_limit_under_damping() {
    let s = reference(0.0, PI);
    let params = CkParams::atomic(0.3).unwrap();
    let p = |t| left_probability(&s, &params, t, Method::Analytic).unwrap();
    assert!((p(60.0) - p(80.0)).abs() < 1e-12);
    assert!((p(10.0) - p(80.0)).abs() < 1e-2);
}
