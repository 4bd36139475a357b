use std::f64::consts::PI;

use manifold_core::signal::rms_envelope;
use manifold_core::Signal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Linear interpolation at time `t` by locating the bracketing samples.
fn interp_at(values: &[f64], dt: f64, t: f64) -> f64 {
    let last = values.len() - 1;
    let mut k = 0;
    while k + 1 < last && (k + 1) as f64 * dt <= t {
        k += 1;
    }
    let w = ((t - k as f64 * dt) / dt).clamp(0.0, 1.0);
    values[k] * (1.0 - w) + values[k + 1] * w
}

fn two_pass_oracle(values: &[f64], dt: f64, up: usize) -> Vec<f64> {
    let n = values.len();
    let duration = (n - 1) as f64 * dt;
    let dt_up = duration / (up - 1) as f64;
    let fine: Vec<f64> = (0..up)
        .map(|j| interp_at(values, dt, j as f64 * dt_up))
        .collect();
    (0..n)
        .map(|i| interp_at(&fine, dt_up, i as f64 * dt))
        .collect()
}

#[test]
fn resample_round_trip_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let values: Vec<f64> = (0..160).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dt = 0.7 / 159.0;
        let s = Signal::new(values.clone(), dt).unwrap();
        let back = s
            .resample_uniform(320)
            .unwrap()
            .resample_uniform(160)
            .unwrap();
        let oracle = two_pass_oracle(&values, dt, 320);
        let mut worst = 0.0f64;
        for (a, b) in back.values().iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
        for (a, b) in back.values().iter().zip(&values) {
            worst = worst.max((a - b).abs());
        }
        // Each round-trip sample blends neighbours; it cannot leave the local range.
        assert!(worst <= 2.0);
        assert_eq!(back.values()[0], values[0]);
        assert_eq!(back.values()[159], values[159]);
        assert!((back.duration() - s.duration()).abs() <= 1e-15);
    }
}

#[test]
fn resample_ramp_and_constant() {
    let s = Signal::new(vec![0.0, 1.0, 2.0, 3.0], 1.0).unwrap();
    assert_eq!(
        s.resample_uniform(7).unwrap().values(),
        &[0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    );
    let c = Signal::new(vec![5.0; 4], 1.0).unwrap();
    for n in [2, 3, 17, 400] {
        assert!(c
            .resample_uniform(n)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 5.0));
    }
    assert!(s.resample_uniform(1).is_err());
}

/// Slope and intercept from the closed-form normal equations against index.
fn ls_fit(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        let x = i as f64;
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

#[test]
fn detrend_sine_plus_line() {
    let n = 200;
    let raw: Vec<f64> = (0..n)
        .map(|i| (i as f64 * 0.1).sin() + 0.03 * i as f64 - 2.0)
        .collect();
    let out = Signal::new(raw.clone(), 0.01).unwrap().detrend_linear();
    let (slope, intercept) = ls_fit(&raw);
    for (i, (&o, &r)) in out.values().iter().zip(&raw).enumerate() {
        let want = r - (slope * i as f64 + intercept);
        assert!((o - want).abs() < 1e-9, "{i}: {o} vs {want}");
    }
    let (s2, b2) = ls_fit(out.values());
    let scale = out.values().iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    assert!(s2.abs() < 1e-9 * scale && b2.abs() < 1e-9 * scale);
}

#[test]
fn detrend_pure_line_and_zero() {
    let line: Vec<f64> = (0..50).map(|i| 3.5 * i as f64 - 7.0).collect();
    let out = Signal::new(line, 1.0).unwrap().detrend_linear();
    assert!(out.values().iter().all(|v| v.abs() < 1e-9));
    let zero = Signal::new(vec![0.0; 9], 1.0).unwrap().detrend_linear();
    assert!(zero.values().iter().all(|&v| v == 0.0));
}

#[test]
fn rms_of_sine_over_one_period() {
    let fs = 8000.0;
    let f = 50.0;
    let n = 8000;
    let x: Vec<f64> = (0..n)
        .map(|i| (2.0 * PI * f * i as f64 / fs).sin())
        .collect();
    let window = (fs / f) as usize;
    let env = rms_envelope(&x, window).unwrap();
    let target = 1.0 / 2f64.sqrt();
    for &v in &env[window..n - window] {
        assert!((v - target).abs() <= 0.01 * target, "{v}");
    }
}

#[test]
fn rms_edges_shrink() {
    let x = [3.0, 4.0, 0.0, 0.0];
    let env = rms_envelope(&x, 3).unwrap();
    // First window is clipped to {3, 4}.
    assert!((env[0] - (12.5f64).sqrt()).abs() < 1e-12);
    assert_eq!(rms_envelope(&x, 1).unwrap(), vec![3.0, 4.0, 0.0, 0.0]);
    assert!(rms_envelope(&x, 0).is_err());
    assert!(rms_envelope(&x, 5).is_err());
}

#[test]
fn normalization_examples() {
    let s = Signal::new(vec![2.0, -4.0, 1.0], 1.0).unwrap();
    assert_eq!(s.normalize_max_abs().unwrap().values(), &[0.5, -1.0, 0.25]);
    let v = Signal::new(vec![3.0, 4.0], 1.0)
        .unwrap()
        .l2_normalize()
        .unwrap();
    assert!((v.values()[0] - 0.6).abs() < 1e-15 && (v.values()[1] - 0.8).abs() < 1e-15);
    assert!(Signal::new(vec![0.0, 0.0], 1.0)
        .unwrap()
        .normalize_max_abs()
        .is_err());
    assert!(Signal::new(vec![0.0, 0.0], 1.0)
        .unwrap()
        .l2_normalize()
        .is_err());
}
