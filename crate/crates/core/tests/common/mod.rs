//! Shared helpers for the integration-test oracles.
#![allow(dead_code)] // each test binary uses its own subset

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; one draw per call is plenty for test oracles.
    let u1 = uniform(rng).max(1e-300);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Monte Carlo oracle for the ideal heterodyne limit: sample the outcome as
/// a complex Gaussian of unit total variance centered on the sent state and
/// decide by the nearest constellation phase. Returns (estimate, std_error).
pub fn heterodyne_monte_carlo(n: f64, trials: u64, seed: u64) -> (f64, f64) {
    let amplitude = n.sqrt();
    let mut rng = seeded(seed);
    let mut errors = 0u64;
    for _ in 0..trials {
        let k = (rng.next_u64() % 4) as usize;
        let phase = k as f64 * std::f64::consts::FRAC_PI_2;
        let (sin, cos) = phase.sin_cos();
        // Per-quadrature variance 1/2.
        let x = amplitude * cos + standard_normal(&mut rng) / 2.0_f64.sqrt();
        let y = amplitude * sin + standard_normal(&mut rng) / 2.0_f64.sqrt();
        // Nearest constellation phase = quadrant of the rotated frame.
        let angle = y.atan2(x);
        let decided = ((angle / std::f64::consts::FRAC_PI_2).round() as i64).rem_euclid(4) as usize;
        if decided != k {
            errors += 1;
        }
    }
    let p = errors as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}
