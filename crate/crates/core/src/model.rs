//! Click statistics, MAP decision rule and exact error probability of the
//! three-arm displacement receiver.
//!
//! The four input states share a fixed amplitude and carry phases `k*pi/2`.
//! Arm `i` displaces the input by a field of magnitude `beta_mag` locked to
//! the arm's hypothesis phase and detects the result with an on/off
//! single-photon detector. Imperfections enter through the detection
//! efficiency `eta`, the mean dark counts per pulse `nu`, and the
//! interference visibility `xi` which scales the cross term of the displaced
//! intensity.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// Number of constellation states.
pub const NUM_STATES: usize = 4;

/// Hypothesis phases tested by arms 1, 2 and 3.
pub const ARM_PHASES: [f64; 3] = [0.0, FRAC_PI_2, PI];

/// Tolerance for prior normalization and splitter conservation checks.
const SUM_TOL: f64 = 1e-12;

/// The QPSK constellation: common field amplitude plus prior probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alphabet {
    amplitude: f64,
    priors: [f64; NUM_STATES],
}

impl Alphabet {
    /// Constellation with uniform priors.
    pub fn new(amplitude: f64) -> Result<Self> {
        Self::with_priors(amplitude, [0.25; NUM_STATES])
    }

    /// Constellation with explicit priors (must be non-negative and sum to 1).
    pub fn with_priors(amplitude: f64, priors: [f64; NUM_STATES]) -> Result<Self> {
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::invalid("amplitude", amplitude, "must be >= 0"));
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::invalid("priors", sum, "must sum to 1"));
        }
        if let Some(&p) = priors.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid("priors", p, "each prior must be in [0, 1]"));
        }
        Ok(Self { amplitude, priors })
    }

    /// Uniform-prior constellation with mean photon number `n = |alpha|^2`.
    pub fn from_mean_photon_number(n: f64) -> Result<Self> {
        if !n.is_finite() || n < 0.0 {
            return Err(Error::invalid("mean_photon_number", n, "must be >= 0"));
        }
        Self::new(n.sqrt())
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitude * self.amplitude
    }

    /// Phase of state `k`, i.e. `k*pi/2`.
    pub fn phase(k: usize) -> f64 {
        debug_assert!(k < NUM_STATES);
        k as f64 * FRAC_PI_2
    }

    pub fn prior(&self, k: usize) -> f64 {
        self.priors[k]
    }

    pub fn priors(&self) -> [f64; NUM_STATES] {
        self.priors
    }
}

/// One detection arm of the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmConfig {
    /// Fraction of the input power routed to this arm.
    pub split_ratio: f64,
    /// Phase of the state hypothesis this arm tests (radians).
    pub hypothesis_phase: f64,
    /// Magnitude of the displacement field at the arm.
    pub beta_mag: f64,
    /// Detection efficiency of the arm's detector.
    pub efficiency: f64,
    /// Mean dark counts per pulse window.
    pub dark_mean: f64,
    /// Interference visibility of the displacement operation.
    pub visibility: f64,
}

impl ArmConfig {
    /// Arm with ideal detector and unit visibility.
    pub fn ideal(split_ratio: f64, hypothesis_phase: f64, beta_mag: f64) -> Self {
        Self {
            split_ratio,
            hypothesis_phase,
            beta_mag,
            efficiency: 1.0,
            dark_mean: 0.0,
            visibility: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                Err(Error::invalid(name, v, "must be in [0, 1]"))
            } else {
                Ok(())
            }
        };
        unit("split_ratio", self.split_ratio)?;
        unit("efficiency", self.efficiency)?;
        unit("visibility", self.visibility)?;
        if !self.dark_mean.is_finite() || self.dark_mean < 0.0 {
            return Err(Error::invalid("dark_mean", self.dark_mean, "must be >= 0"));
        }
        if !self.beta_mag.is_finite() || self.beta_mag < 0.0 {
            return Err(Error::invalid("beta_mag", self.beta_mag, "must be >= 0"));
        }
        if !self.hypothesis_phase.is_finite() {
            return Err(Error::invalid(
                "hypothesis_phase",
                self.hypothesis_phase,
                "must be finite",
            ));
        }
        Ok(())
    }
}

/// Full receiver design point: constellation plus three arms with hypothesis
/// phases `{0, pi/2, pi}` in order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReceiverConfig {
    pub alphabet: Alphabet,
    pub arms: [ArmConfig; 3],
}

impl ReceiverConfig {
    pub fn new(alphabet: Alphabet, arms: [ArmConfig; 3]) -> Result<Self> {
        let cfg = Self { alphabet, arms };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for arm in &self.arms {
            arm.validate()?;
        }
        let total: f64 = self.arms.iter().map(|a| a.split_ratio).sum();
        if total > 1.0 + SUM_TOL {
            return Err(Error::invalid(
                "split_ratio",
                total,
                "arm splitting ratios must sum to at most 1",
            ));
        }
        for (arm, expected) in self.arms.iter().zip(ARM_PHASES) {
            if (arm.hypothesis_phase - expected).abs() > 1e-9 {
                return Err(Error::invalid(
                    "hypothesis_phase",
                    arm.hypothesis_phase,
                    "arms must test phases {0, pi/2, pi} in order",
                ));
            }
        }
        Ok(())
    }
}

/// Joint on/off detection record of the three arms.
///
/// The canonical enumeration order is binary counting with the first arm as
/// the most significant bit: `(0,0,0), (0,0,1), ..., (1,1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub clicks: [bool; 3],
}

impl Outcome {
    /// Number of distinct outcomes.
    pub const COUNT: usize = 8;

    pub fn new(d1: bool, d2: bool, d3: bool) -> Self {
        Self {
            clicks: [d1, d2, d3],
        }
    }

    /// Outcome at position `index` in the canonical order.
    pub fn from_index(index: usize) -> Self {
        debug_assert!(index < Self::COUNT);
        Self {
            clicks: [index & 4 != 0, index & 2 != 0, index & 1 != 0],
        }
    }

    /// Position in the canonical order.
    pub fn index(&self) -> usize {
        (self.clicks[0] as usize) << 2 | (self.clicks[1] as usize) << 1 | self.clicks[2] as usize
    }

    /// All eight outcomes in canonical order.
    pub fn all() -> impl Iterator<Item = Outcome> {
        (0..Self::COUNT).map(Outcome::from_index)
    }
}

/// Mean intensity reaching arm `i`'s detector when state `k` is sent:
///
/// `N = eta * (R|a|^2 + |b|^2 - 2 xi sqrt(R) |a||b| cos(phi_k - phase)) + nu`
///
/// With unit efficiency and visibility and zero dark counts this is exactly
/// the displaced power `|sqrt(R) a_k - b|^2`. Rounding can leave a tiny
/// negative residue near perfect nulling; the result is clamped to zero.
pub fn mean_click_intensity(arm: &ArmConfig, alphabet: &Alphabet, k: usize) -> f64 {
    let a = alphabet.amplitude();
    let b = arm.beta_mag;
    let r = arm.split_ratio;
    let cross =
        2.0 * arm.visibility * r.sqrt() * a * b * (Alphabet::phase(k) - arm.hypothesis_phase).cos();
    let n = arm.efficiency * (r * a * a + b * b - cross) + arm.dark_mean;
    n.max(0.0)
}

/// Probability that arm `i`'s detector reports `clicked` given state `k`.
///
/// No click has probability `exp(-N)`; the click probability is its exact
/// complement.
pub fn click_probability(arm: &ArmConfig, alphabet: &Alphabet, k: usize, clicked: bool) -> f64 {
    let p_dark = (-mean_click_intensity(arm, alphabet, k)).exp();
    if clicked {
        1.0 - p_dark
    } else {
        p_dark
    }
}

/// Probability of a joint detection record given state `k`; the three arms
/// are statistically independent, so this is the product of the per-arm
/// click probabilities.
pub fn joint_likelihood(cfg: &ReceiverConfig, k: usize, outcome: Outcome) -> f64 {
    cfg.arms
        .iter()
        .zip(outcome.clicks)
        .map(|(arm, d)| click_probability(arm, &cfg.alphabet, k, d))
        .product()
}

/// MAP decision: the state index maximizing `prior(k) * likelihood(k)`.
/// Ties are broken deterministically toward the lowest state index.
pub fn map_decision(cfg: &ReceiverConfig, outcome: Outcome) -> usize {
    let mut best = 0usize;
    let mut best_post = cfg.alphabet.prior(0) * joint_likelihood(cfg, 0, outcome);
    for k in 1..NUM_STATES {
        let post = cfg.alphabet.prior(k) * joint_likelihood(cfg, k, outcome);
        if post > best_post {
            best = k;
            best_post = post;
        }
    }
    best
}

/// Per-arm no-click probabilities `exp(-N_ik)`, indexed `[arm][state]`.
pub fn no_click_probabilities(cfg: &ReceiverConfig) -> [[f64; NUM_STATES]; 3] {
    let mut p = [[0.0; NUM_STATES]; 3];
    for (i, arm) in cfg.arms.iter().enumerate() {
        for (k, slot) in p[i].iter_mut().enumerate() {
            *slot = (-mean_click_intensity(arm, &cfg.alphabet, k)).exp();
        }
    }
    p
}

fn likelihoods_from_table(p0: &[[f64; NUM_STATES]; 3], outcome: Outcome) -> [f64; NUM_STATES] {
    let mut like = [1.0; NUM_STATES];
    for (i, &d) in outcome.clicks.iter().enumerate() {
        for (k, l) in like.iter_mut().enumerate() {
            *l *= if d { 1.0 - p0[i][k] } else { p0[i][k] };
        }
    }
    like
}

/// MAP decision for every outcome in canonical order.
pub fn decision_table(cfg: &ReceiverConfig) -> [usize; Outcome::COUNT] {
    let p0 = no_click_probabilities(cfg);
    let priors = cfg.alphabet.priors();
    let mut table = [0usize; Outcome::COUNT];
    for (idx, slot) in table.iter_mut().enumerate() {
        let like = likelihoods_from_table(&p0, Outcome::from_index(idx));
        let mut best = 0usize;
        let mut best_post = priors[0] * like[0];
        for k in 1..NUM_STATES {
            let post = priors[k] * like[k];
            if post > best_post {
                best = k;
                best_post = post;
            }
        }
        *slot = best;
    }
    table
}

/// Probability of deciding correctly for each input state under the MAP rule.
pub fn per_state_correct_probabilities(cfg: &ReceiverConfig) -> [f64; NUM_STATES] {
    let p0 = no_click_probabilities(cfg);
    let table = decision_table(cfg);
    let mut correct = [0.0; NUM_STATES];
    for idx in 0..Outcome::COUNT {
        let like = likelihoods_from_table(&p0, Outcome::from_index(idx));
        let k = table[idx];
        correct[k] += like[k];
    }
    correct
}

/// Exact error probability of the receiver, evaluated by enumerating all
/// eight outcomes and scoring the MAP decision of each:
///
/// `P_E = 1 - sum_k prior(k) * sum_{d: decision(d)=k} P(d|k)`
///
/// For zero amplitude with uniform priors every outcome ties and the result
/// is 0.75.
pub fn exact_error_probability(cfg: &ReceiverConfig) -> f64 {
    let correct = per_state_correct_probabilities(cfg);
    let priors = cfg.alphabet.priors();
    let p_correct: f64 = correct.iter().zip(priors).map(|(c, p)| p * c).sum();
    1.0 - p_correct
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Nulling-displacement receiver (`beta_i^2 = ratio * R_i * n`) with
    /// shared imperfections.
    fn receiver(n: f64, split: [f64; 3], ratio: f64, eta: f64, nu: f64, xi: f64) -> ReceiverConfig {
        let alphabet = Alphabet::from_mean_photon_number(n).unwrap();
        let arms = [0, 1, 2].map(|i| ArmConfig {
            split_ratio: split[i],
            hypothesis_phase: ARM_PHASES[i],
            beta_mag: (ratio * split[i] * n).sqrt(),
            efficiency: eta,
            dark_mean: nu,
            visibility: xi,
        });
        ReceiverConfig::new(alphabet, arms).unwrap()
    }

    #[test]
    fn intensity_nulls_matched_state() {
        let arm = ArmConfig::ideal(1.0, 0.0, 2.0);
        let alphabet = Alphabet::new(2.0).unwrap();
        assert_eq!(mean_click_intensity(&arm, &alphabet, 0), 0.0);
    }

    #[test]
    fn intensity_constructive_opposite_state() {
        let arm = ArmConfig::ideal(1.0, 0.0, 2.0);
        let alphabet = Alphabet::new(2.0).unwrap();
        // (2 + 2)^2
        assert_relative_eq!(
            mean_click_intensity(&arm, &alphabet, 2),
            16.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn intensity_matches_direct_formula_evaluation() {
        // Independently evaluated: eta*(R a^2 + b^2 - 2 xi sqrt(R) a b cos(pi/2)) + nu
        let arm = ArmConfig {
            split_ratio: 0.4,
            hypothesis_phase: 0.0,
            beta_mag: 2.0,
            efficiency: 0.778,
            dark_mean: 1e-6,
            visibility: 0.99,
        };
        let alphabet = Alphabet::new(10.0_f64.sqrt()).unwrap();
        assert_relative_eq!(
            mean_click_intensity(&arm, &alphabet, 1),
            6.22400099999999945,
            max_relative = 1e-12
        );
    }

    #[test]
    fn intensity_reduces_to_displaced_power_when_ideal() {
        // With eta=1, nu=0, xi=1 the intensity is |sqrt(R) a_k - b e^{i phase}|^2.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let r = uniform(&mut rng);
            let a = 4.0 * uniform(&mut rng);
            let b = 4.0 * uniform(&mut rng);
            let phase = ARM_PHASES[(rng.next_u64() % 3) as usize];
            let k = (rng.next_u64() % 4) as usize;
            let arm = ArmConfig::ideal(r, phase, b);
            let alphabet = Alphabet::new(a).unwrap();
            let signal = Complex64::from_polar(r.sqrt() * a, Alphabet::phase(k));
            let displacement = Complex64::from_polar(b, phase);
            assert_relative_eq!(
                mean_click_intensity(&arm, &alphabet, k),
                (signal - displacement).norm_sqr(),
                max_relative = 1e-12,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn click_probability_vacuum_never_clicks() {
        let arm = ArmConfig::ideal(1.0, 0.0, 0.0);
        let alphabet = Alphabet::new(0.0).unwrap();
        assert_eq!(click_probability(&arm, &alphabet, 0, false), 1.0);
        assert_eq!(click_probability(&arm, &alphabet, 0, true), 0.0);
    }

    #[test]
    fn click_probability_matches_direct_exponentiation() {
        // arm 1 with R=0.4, ideal detector, n=3, k=2, beta = sqrt(1.2*3*0.4).
        let arm = ArmConfig::ideal(0.4, 0.0, (1.2_f64 * 3.0 * 0.4).sqrt());
        let alphabet = Alphabet::new(3.0_f64.sqrt()).unwrap();
        assert_relative_eq!(
            click_probability(&arm, &alphabet, 2, false),
            5.14840523162270712e-3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            click_probability(&arm, &alphabet, 2, true),
            9.94851594768377256e-1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn click_probability_pair_sums_to_one_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let arm = ArmConfig {
                split_ratio: uniform(&mut rng),
                hypothesis_phase: ARM_PHASES[(rng.next_u64() % 3) as usize],
                beta_mag: 3.0 * uniform(&mut rng),
                efficiency: uniform(&mut rng),
                dark_mean: 0.01 * uniform(&mut rng),
                visibility: uniform(&mut rng),
            };
            let alphabet = Alphabet::new(3.0 * uniform(&mut rng)).unwrap();
            let k = (rng.next_u64() % 4) as usize;
            let sum = click_probability(&arm, &alphabet, k, false)
                + click_probability(&arm, &alphabet, k, true);
            assert_eq!(sum, 1.0);
        }
    }

    #[test]
    fn joint_likelihood_dark_receiver() {
        // All intensities zero: the silent record is certain.
        let cfg = receiver(0.0, [0.4, 0.2, 0.4], 1.0, 1.0, 0.0, 1.0);
        assert_eq!(
            joint_likelihood(&cfg, 0, Outcome::new(false, false, false)),
            1.0
        );
        for outcome in Outcome::all().skip(1) {
            assert_eq!(joint_likelihood(&cfg, 0, outcome), 0.0);
        }
    }

    #[test]
    fn joint_likelihood_matches_per_arm_product() {
        // Ideal nulling receiver at n=3; outcome (0,1,1) for k=0 is
        // 1 * (1 - e^{-1.2}) * (1 - e^{-4.8}).
        let cfg = receiver(3.0, [0.4, 0.2, 0.4], 1.0, 1.0, 0.0, 1.0);
        assert_relative_eq!(
            joint_likelihood(&cfg, 0, Outcome::new(false, true, true)),
            6.93054793215444387e-1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn joint_likelihood_normalizes_over_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let cfg = receiver(
                6.0 * uniform(&mut rng),
                [0.4, 0.2, 0.4],
                0.5 + 2.0 * uniform(&mut rng),
                0.5 + 0.5 * uniform(&mut rng),
                1e-4 * uniform(&mut rng),
                0.95 + 0.05 * uniform(&mut rng),
            );
            for k in 0..NUM_STATES {
                let total: f64 = Outcome::all().map(|d| joint_likelihood(&cfg, k, d)).sum();
                assert!((total - 1.0).abs() <= 1e-12, "sum={total}");
            }
        }
    }

    #[test]
    fn map_decision_ideal_nulling_logic() {
        let cfg = receiver(12.0, [0.4, 0.2, 0.4], 1.0, 1.0, 0.0, 1.0);
        // Nulled in arm 1, bright elsewhere: state |alpha>.
        assert_eq!(map_decision(&cfg, Outcome::new(false, true, true)), 0);
        // Nulled only in arm 2: state |i alpha>.
        assert_eq!(map_decision(&cfg, Outcome::new(true, false, true)), 1);
    }

    #[test]
    fn map_decision_table_at_reduced_visibility() {
        // Exhaustive argmax over the four likelihood products, frozen from an
        // independent evaluation at xi=0.99, n=10, nulling displacements.
        let cfg = receiver(10.0, [0.4, 0.2, 0.4], 1.0, 1.0, 0.0, 0.99);
        let expected = [1, 0, 3, 0, 2, 1, 2, 3];
        assert_eq!(decision_table(&cfg), expected);
        for (idx, &want) in expected.iter().enumerate() {
            assert_eq!(map_decision(&cfg, Outcome::from_index(idx)), want);
        }
    }

    #[test]
    fn map_decision_is_deterministic_on_ties() {
        // Zero amplitude makes all states equally likely; the rule must
        // return the lowest index every time.
        let cfg = receiver(0.0, [0.4, 0.2, 0.4], 0.0, 1.0, 1e-3, 1.0);
        for outcome in Outcome::all() {
            for _ in 0..3 {
                assert_eq!(map_decision(&cfg, outcome), 0);
            }
        }
    }

    #[test]
    fn error_probability_is_three_quarters_at_zero_amplitude() {
        let cfg = receiver(0.0, [0.4, 0.2, 0.4], 1.0, 0.9, 0.0, 0.99);
        assert_eq!(exact_error_probability(&cfg), 0.75);
    }

    #[test]
    fn error_probability_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let cfg = receiver(
                10.0 * uniform(&mut rng),
                [0.4, 0.2, 0.4],
                0.5 + 2.0 * uniform(&mut rng),
                0.5 + 0.5 * uniform(&mut rng),
                1e-3 * uniform(&mut rng),
                0.9 + 0.1 * uniform(&mut rng),
            );
            let pe = exact_error_probability(&cfg);
            assert!((0.0..=1.0).contains(&pe), "pe={pe}");
        }
    }

    #[test]
    fn arm_swap_symmetry_mirrors_states_zero_and_two() {
        // Exchanging the payloads of arms 1 and 3 relabels the states 0 <-> 2
        // and leaves the total error probability unchanged.
        let alphabet = Alphabet::from_mean_photon_number(4.0).unwrap();
        let arms = [
            ArmConfig {
                split_ratio: 0.5,
                hypothesis_phase: ARM_PHASES[0],
                beta_mag: 1.3,
                efficiency: 0.9,
                dark_mean: 1e-5,
                visibility: 0.99,
            },
            ArmConfig {
                split_ratio: 0.2,
                hypothesis_phase: ARM_PHASES[1],
                beta_mag: 0.9,
                efficiency: 0.85,
                dark_mean: 2e-5,
                visibility: 0.995,
            },
            ArmConfig {
                split_ratio: 0.3,
                hypothesis_phase: ARM_PHASES[2],
                beta_mag: 1.1,
                efficiency: 0.95,
                dark_mean: 5e-6,
                visibility: 0.985,
            },
        ];
        let cfg = ReceiverConfig::new(alphabet, arms).unwrap();

        let mut swapped_arms = arms;
        swapped_arms.swap(0, 2);
        swapped_arms[0].hypothesis_phase = ARM_PHASES[0];
        swapped_arms[2].hypothesis_phase = ARM_PHASES[2];
        let swapped = ReceiverConfig::new(alphabet, swapped_arms).unwrap();

        assert_relative_eq!(
            exact_error_probability(&cfg),
            exact_error_probability(&swapped),
            max_relative = 1e-13
        );

        let correct = per_state_correct_probabilities(&cfg);
        let mirrored = per_state_correct_probabilities(&swapped);
        assert_relative_eq!(correct[0], mirrored[2], max_relative = 1e-12);
        assert_relative_eq!(correct[2], mirrored[0], max_relative = 1e-12);
        assert_relative_eq!(correct[1], mirrored[1], max_relative = 1e-12);
        assert_relative_eq!(correct[3], mirrored[3], max_relative = 1e-12);
    }

    #[test]
    fn symmetric_receiver_equalizes_states_zero_and_two() {
        let cfg = receiver(5.0, [0.4, 0.2, 0.4], 1.1, 0.9, 1e-6, 0.99);
        let correct = per_state_correct_probabilities(&cfg);
        assert_relative_eq!(correct[0], correct[2], max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Alphabet::new(-1.0).is_err());
        assert!(Alphabet::with_priors(1.0, [0.3, 0.3, 0.3, 0.3]).is_err());
        assert!(Alphabet::with_priors(1.0, [1.2, -0.2, 0.0, 0.0]).is_err());

        let mut arm = ArmConfig::ideal(0.4, 0.0, 1.0);
        arm.efficiency = 1.5;
        assert!(arm.validate().is_err());

        let alphabet = Alphabet::new(1.0).unwrap();
        let arms = [
            ArmConfig::ideal(0.5, ARM_PHASES[0], 1.0),
            ArmConfig::ideal(0.5, ARM_PHASES[1], 1.0),
            ArmConfig::ideal(0.5, ARM_PHASES[2], 1.0),
        ];
        assert!(ReceiverConfig::new(alphabet, arms).is_err());

        let bad_phases = [
            ArmConfig::ideal(0.3, 0.0, 1.0),
            ArmConfig::ideal(0.3, PI, 1.0),
            ArmConfig::ideal(0.3, FRAC_PI_2, 1.0),
        ];
        assert!(ReceiverConfig::new(alphabet, bad_phases).is_err());
    }

    #[test]
    fn outcome_enumeration_is_canonical() {
        let all: Vec<Outcome> = Outcome::all().collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], Outcome::new(false, false, false));
        assert_eq!(all[1], Outcome::new(false, false, true));
        assert_eq!(all[4], Outcome::new(true, false, false));
        assert_eq!(all[7], Outcome::new(true, true, true));
        for (i, d) in all.iter().enumerate() {
            assert_eq!(d.index(), i);
        }
    }
}
