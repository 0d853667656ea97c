#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Probabilities in `(0, 1)` drawn from a fixed seed.
pub fn seeded_probs(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0.01..0.99)).collect()
}

/// `P{Y = k}` for all `k` by summing over all `2^N` outcomes.
pub fn enumerate_pmf(probs: &[f64]) -> Vec<f64> {
    let n = probs.len();
    let mut pmf = vec![0.0; n + 1];
    for mask in 0u32..(1 << n) {
        let mut w = 1.0;
        for (i, &p) in probs.iter().enumerate() {
            w *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
        }
        pmf[mask.count_ones() as usize] += w;
    }
    pmf
}

/// `erfc(x) = 2/√π ∫_x^∞ e^{-u²} du` by Simpson's rule on `[|x|, |x| + 12]`.
pub fn erfc_quad(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_quad(-x);
    }
    2.0 / std::f64::consts::PI.sqrt() * simpson(|u| (-u * u).exp(), x, x + 12.0, 40_000)
}
