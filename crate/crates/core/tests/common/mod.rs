#![allow(dead_code)]

use ghz_core::GhzDiagonalState;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random state on `n` parties. Roughly a third of the draws have some
/// labels zeroed so sparse supports are covered too.
pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> GhzDiagonalState {
    let len = 1 << n;
    let sparse = rng.random_range(0..3) == 0;
    let mut w: Vec<f64> = (0..len)
        .map(|_| {
            if sparse && rng.random_bool(0.4) {
                0.0
            } else {
                -rng.random::<f64>().max(1e-300).ln()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..len)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    GhzDiagonalState::new(n, w.into_iter().map(|x| x / total).collect()).unwrap()
}

/// Random state concentrated near the pure GHZ label.
pub fn high_fidelity_state<R: Rng>(rng: &mut R) -> GhzDiagonalState {
    let f = rng.random_range(0.6..1.0);
    let rest: Vec<f64> = (0..7).map(|_| rng.random::<f64>()).collect();
    let total: f64 = rest.iter().sum();
    let mut probs = vec![f];
    probs.extend(rest.iter().map(|r| (1.0 - f) * r / total));
    GhzDiagonalState::new(3, probs).unwrap()
}
