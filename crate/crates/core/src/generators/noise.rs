use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Grid;

/// Euler–Maruyama path of a zero-mean Ornstein–Uhlenbeck process started at
/// zero: `y[i+1] = y[i] - theta*y[i]*dt + sigma*sqrt(dt)*g[i]`.
pub fn ou_path(n: usize, dt: f64, theta: f64, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ou_path_with(n, dt, theta, sigma, &mut rng)
}

pub fn ou_path_with<R: Rng + ?Sized>(
    n: usize,
    dt: f64,
    theta: f64,
    sigma: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let diffusion = sigma * dt.sqrt();
    let mut y = 0.0;
    out.push(y);
    for _ in 1..n {
        let g: f64 = rng.sample(StandardNormal);
        y = y - theta * y * dt + diffusion * g;
        out.push(y);
    }
    out
}

/// Half-sine basis function `psi_j(t) = sin(j*pi*t/T)`, `j >= 1`.
pub fn half_sine(j: usize, t: f64, duration: f64) -> f64 {
    (j as f64 * std::f64::consts::PI * t / duration).sin()
}

/// `eps * sum_j c_j * psi_j(t)` on the grid. Vanishes at both endpoints and
/// is bounded by `eps * J` when every `|c_j| <= 1`.
pub fn smooth_perturbation(eps: f64, coeffs: &[f64], grid: Grid) -> Vec<f64> {
    grid.times()
        .map(|t| {
            let s: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * half_sine(j + 1, t, grid.duration))
                .sum();
            eps * s
        })
        .collect()
}
