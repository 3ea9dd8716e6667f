#![allow(dead_code)]

use p2p_reins::{Matrix, MarketParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Σ = (BᵀB/n + εI)·scale with B uniform on [−1, 1].
pub fn random_sigma(rng: &mut impl Rng, n: usize) -> Matrix {
    let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let scale = rng.gen_range(2000.0..15000.0);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum();
            rows[i][j] = scale * (dot / n as f64 + if i == j { 0.05 } else { 0.0 });
        }
    }
    Matrix::from_rows(&rows).unwrap()
}

pub fn random_market_with(rng: &mut impl Rng, n: usize, gamma_r: f64) -> MarketParams {
    let sigma = random_sigma(rng, n);
    let mu = (0..n).map(|_| rng.gen_range(50.0..150.0)).collect();
    let gamma = (0..n).map(|_| rng.gen_range(0.005..0.03)).collect();
    MarketParams::new(mu, sigma, gamma, gamma_r).unwrap()
}

pub fn random_market(rng: &mut impl Rng, n: usize) -> MarketParams {
    let gr = rng.gen_range(0.0..0.05);
    random_market_with(rng, n, gr)
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}
