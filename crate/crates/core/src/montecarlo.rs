//! Seeded trial-by-trial simulation of the receiver.
//!
//! Every trial draws an input state from the priors, samples the three
//! on/off detectors from their exact click probabilities (on/off detection
//! makes photon numbers beyond the first irrelevant, so a Bernoulli draw
//! with `p = 1 - exp(-N)` is the full statistics), applies the MAP rule and
//! tallies the decision.
//!
//! Reproducibility contract: trial `t` consumes only ChaCha8 stream `t` of
//! the run seed, so identical `(config, trials, seed)` produce bit-identical
//! reports regardless of how trials are partitioned across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{decision_table, no_click_probabilities, ReceiverConfig, NUM_STATES};

/// Generator used for trial sampling, recorded for provenance.
pub const RNG_ALGORITHM: &str = "ChaCha8 (one 64-bit stream per trial index)";

/// Tally of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trials: u64,
    pub errors: u64,
    pub p_error_estimate: f64,
    /// Binomial standard error `sqrt(p (1-p) / trials)`.
    pub std_error: f64,
    pub seed: u64,
    /// Counts indexed `[true state][decided state]`.
    pub per_state_confusion: [[u64; NUM_STATES]; NUM_STATES],
}

impl TrialReport {
    /// Number of trials in which state `k` was sent.
    pub fn trials_for_state(&self, k: usize) -> u64 {
        self.per_state_confusion[k].iter().sum()
    }
}

struct Sampler {
    prior_cumsum: [f64; NUM_STATES],
    p_click: [[f64; NUM_STATES]; 3],
    decisions: [usize; 8],
}

impl Sampler {
    fn new(cfg: &ReceiverConfig) -> Self {
        let mut prior_cumsum = [0.0; NUM_STATES];
        let mut acc = 0.0;
        for (slot, k) in prior_cumsum.iter_mut().zip(0..NUM_STATES) {
            acc += cfg.alphabet.prior(k);
            *slot = acc;
        }
        prior_cumsum[NUM_STATES - 1] = 1.0;
        let p0 = no_click_probabilities(cfg);
        let mut p_click = [[0.0; NUM_STATES]; 3];
        for i in 0..3 {
            for k in 0..NUM_STATES {
                p_click[i][k] = 1.0 - p0[i][k];
            }
        }
        Self {
            prior_cumsum,
            p_click,
            decisions: decision_table(cfg),
        }
    }

    /// Runs trial `t` on its own RNG stream; returns (sent, decided).
    fn trial(&self, seed: u64, t: u64) -> (usize, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let mut uniform = || (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);

        let u = uniform();
        let mut sent = NUM_STATES - 1;
        for (k, &edge) in self.prior_cumsum.iter().enumerate() {
            if u < edge {
                sent = k;
                break;
            }
        }
        let mut outcome = 0usize;
        for i in 0..3 {
            let clicked = uniform() < self.p_click[i][sent];
            outcome = outcome << 1 | clicked as usize;
        }
        (sent, self.decisions[outcome])
    }
}

fn report_from_confusion(
    confusion: [[u64; NUM_STATES]; NUM_STATES],
    trials: u64,
    seed: u64,
) -> TrialReport {
    let correct: u64 = (0..NUM_STATES).map(|k| confusion[k][k]).sum();
    let errors = trials - correct;
    let p = errors as f64 / trials as f64;
    TrialReport {
        trials,
        errors,
        p_error_estimate: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        seed,
        per_state_confusion: confusion,
    }
}

fn tally_range(sampler: &Sampler, seed: u64, range: std::ops::Range<u64>) -> [[u64; 4]; 4] {
    let mut confusion = [[0u64; NUM_STATES]; NUM_STATES];
    for t in range {
        let (sent, decided) = sampler.trial(seed, t);
        confusion[sent][decided] += 1;
    }
    confusion
}

fn merge(mut a: [[u64; 4]; 4], b: [[u64; 4]; 4]) -> [[u64; 4]; 4] {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (ca, cb) in ra.iter_mut().zip(rb) {
            *ca += cb;
        }
    }
    a
}

/// Sequential simulation of `trials` independent detection events.
pub fn simulate(cfg: &ReceiverConfig, trials: u64, seed: u64) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::invalid("trials", 0.0, "must run at least one trial"));
    }
    let sampler = Sampler::new(cfg);
    let confusion = tally_range(&sampler, seed, 0..trials);
    Ok(report_from_confusion(confusion, trials, seed))
}

/// Parallel simulation; bit-identical to [`simulate`] for the same inputs
/// because each trial derives its own RNG stream and the tallies merge
/// associatively.
#[cfg(feature = "parallel")]
pub fn simulate_parallel(cfg: &ReceiverConfig, trials: u64, seed: u64) -> Result<TrialReport> {
    use rayon::prelude::*;

    if trials == 0 {
        return Err(Error::invalid("trials", 0.0, "must run at least one trial"));
    }
    let sampler = Sampler::new(cfg);
    const CHUNK: u64 = 1 << 14;
    let chunks = trials.div_ceil(CHUNK);
    let confusion = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            tally_range(&sampler, seed, lo..hi)
        })
        .reduce(|| [[0u64; 4]; 4], merge);
    Ok(report_from_confusion(confusion, trials, seed))
}
