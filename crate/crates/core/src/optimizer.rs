//! Optimization of the receiver design: displacement magnitudes that
//! minimize the exact error probability, joint splitting-ratio optimization,
//! and error-probability curves over photon-number grids.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{exact_error_probability, Alphabet, ArmConfig, ReceiverConfig, ARM_PHASES};
use crate::optim::{bracket_and_minimize, golden_section, nelder_mead};

/// Detector and interference quality of one arm, independent of the
/// splitting ratio and displacement being optimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmImperfections {
    pub efficiency: f64,
    pub dark_mean: f64,
    pub visibility: f64,
}

impl ArmImperfections {
    pub const IDEAL: Self = Self {
        efficiency: 1.0,
        dark_mean: 0.0,
        visibility: 1.0,
    };

    pub fn new(efficiency: f64, dark_mean: f64, visibility: f64) -> Self {
        Self {
            efficiency,
            dark_mean,
            visibility,
        }
    }

    /// The same quality in all three arms.
    pub fn uniform(efficiency: f64, dark_mean: f64, visibility: f64) -> [Self; 3] {
        [Self::new(efficiency, dark_mean, visibility); 3]
    }

    fn arm(&self, split_ratio: f64, hypothesis_phase: f64, beta_mag: f64) -> ArmConfig {
        ArmConfig {
            split_ratio,
            hypothesis_phase,
            beta_mag,
            efficiency: self.efficiency,
            dark_mean: self.dark_mean,
            visibility: self.visibility,
        }
    }
}

/// Result of a displacement or splitting optimization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimizationResult {
    /// Optimal displacement magnitudes per arm.
    pub beta_mags: [f64; 3],
    /// Displacement power ratios `beta^2 / (R n)` per arm.
    pub ratios: [f64; 3],
    /// Splitting ratios used (or found, for joint optimization).
    pub split: [f64; 3],
    /// Error probability at the optimum.
    pub p_error: f64,
    /// Number of objective evaluations spent.
    pub evaluations: u64,
}

fn power_ratio(beta: f64, split: f64, n: f64) -> f64 {
    let arm_power = split * n;
    if arm_power == 0.0 {
        0.0
    } else {
        beta * beta / arm_power
    }
}

/// Objective wrapper that remembers the best point ever evaluated, so the
/// returned optimum can never lose to any probed candidate (in particular
/// the plain nulling displacement used as a seed).
struct Tracked<'a> {
    cfg: ReceiverConfig,
    symmetric: bool,
    best_x: [f64; 3],
    best_f: f64,
    evaluations: &'a mut u64,
}

impl<'a> Tracked<'a> {
    fn new(cfg: &ReceiverConfig, symmetric: bool, evaluations: &'a mut u64) -> Self {
        Self {
            cfg: *cfg,
            symmetric,
            best_x: [0.0; 3],
            best_f: f64::INFINITY,
            evaluations,
        }
    }

    fn eval(&mut self, betas: [f64; 3]) -> f64 {
        let mut cfg = self.cfg;
        for (arm, b) in cfg.arms.iter_mut().zip(betas) {
            arm.beta_mag = b;
        }
        *self.evaluations += 1;
        let value = exact_error_probability(&cfg);
        if value < self.best_f {
            self.best_f = value;
            self.best_x = betas;
        }
        value
    }

    fn eval_sym(&mut self, b13: f64, b2: f64) -> f64 {
        self.eval([b13, b2, b13])
    }

    fn coords(&self) -> Vec<f64> {
        if self.symmetric {
            vec![self.best_x[0], self.best_x[1]]
        } else {
            self.best_x.to_vec()
        }
    }

    fn from_coords(&self, x: &[f64]) -> [f64; 3] {
        if self.symmetric {
            [x[0].abs(), x[1].abs(), x[0].abs()]
        } else {
            [x[0].abs(), x[1].abs(), x[2].abs()]
        }
    }
}

fn arms_symmetric(cfg: &ReceiverConfig) -> bool {
    let a = &cfg.arms[0];
    let c = &cfg.arms[2];
    a.split_ratio == c.split_ratio
        && a.efficiency == c.efficiency
        && a.dark_mean == c.dark_mean
        && a.visibility == c.visibility
}

/// Upper bound for the displacement-magnitude search in one arm. Covers the
/// large-n regime (optimal ratio near 1) and the weak-signal regime where
/// the optimal magnitude stays of order one even as the arm power vanishes.
fn beta_search_max(split: f64, n: f64) -> f64 {
    (3.0 * split * n).sqrt() + 1.5
}

const GRID_POINTS: usize = 61;
const COORD_ROUNDS: usize = 4;

fn optimize_displacements_impl(
    cfg: &ReceiverConfig,
    seed: Option<[f64; 3]>,
) -> Result<OptimizationResult> {
    let n = cfg.alphabet.mean_photon_number();
    if n <= 0.0 {
        return Err(Error::invalid(
            "amplitude",
            cfg.alphabet.amplitude(),
            "displacement optimization needs a nonzero amplitude (the objective is flat at 0.75)",
        ));
    }

    let mut evaluations = 0u64;
    let symmetric = arms_symmetric(cfg);
    let mut tracked = Tracked::new(cfg, symmetric, &mut evaluations);

    let bmax: [f64; 3] = [0, 1, 2].map(|i| beta_search_max(cfg.arms[i].split_ratio, n));
    // Seeds: the plain nulling displacement and any caller-provided warm start.
    let nulling: [f64; 3] = [0, 1, 2].map(|i| (cfg.arms[i].split_ratio * n).sqrt());
    tracked.eval(nulling);
    if let Some(betas) = seed {
        tracked.eval(betas);
    }

    // Coarse scan.
    if symmetric {
        for j1 in 0..GRID_POINTS {
            let b13 = bmax[0] * j1 as f64 / (GRID_POINTS - 1) as f64;
            for j2 in 0..GRID_POINTS {
                let b2 = bmax[1] * j2 as f64 / (GRID_POINTS - 1) as f64;
                tracked.eval_sym(b13, b2);
            }
        }
    } else {
        const COARSE: usize = 31;
        for j1 in 0..COARSE {
            let b1 = bmax[0] * j1 as f64 / (COARSE - 1) as f64;
            for j2 in 0..COARSE {
                let b2 = bmax[1] * j2 as f64 / (COARSE - 1) as f64;
                for j3 in 0..COARSE {
                    let b3 = bmax[2] * j3 as f64 / (COARSE - 1) as f64;
                    tracked.eval([b1, b2, b3]);
                }
            }
        }
    }

    // Per-coordinate golden-section refinement around the incumbent.
    let dims = if symmetric { 2 } else { 3 };
    for round in 0..COORD_ROUNDS {
        let window =
            bmax[0].max(bmax[1]).max(bmax[2]) / (GRID_POINTS - 1) as f64 / (1 << round) as f64;
        for d in 0..dims {
            let mut x = tracked.coords();
            let center = x[d];
            let (lo, hi) = ((center - 1.5 * window).max(0.0), center + 1.5 * window);
            golden_section(
                |v| {
                    x[d] = v;
                    let betas = tracked.from_coords(&x);
                    tracked.eval(betas)
                },
                lo,
                hi,
                1e-10 * (1.0 + center),
            );
        }
    }

    // Simplex polish to release any coordinate-descent stall.
    let start = tracked.coords();
    let scale: Vec<f64> = start.iter().map(|v| 1e-3 * (1.0 + v)).collect();
    nelder_mead(
        |x| {
            let betas = tracked.from_coords(x);
            tracked.eval(betas)
        },
        &start,
        &scale,
        1e-16,
        1e-11,
        2000,
    );

    let betas = tracked.best_x;
    let p_error = tracked.best_f;
    Ok(OptimizationResult {
        beta_mags: betas,
        ratios: [0, 1, 2].map(|i| power_ratio(betas[i], cfg.arms[i].split_ratio, n)),
        split: [0, 1, 2].map(|i| cfg.arms[i].split_ratio),
        p_error,
        evaluations,
    })
}

/// Find the displacement magnitudes minimizing the exact error probability
/// with splitting ratios and detector parameters held fixed.
///
/// Coarse grid scan plus per-coordinate golden-section refinement and a
/// simplex polish; for arms 1 and 3 with identical parameters the search is
/// restricted to the symmetric subspace, so the returned magnitudes satisfy
/// the arm 1 <-> 3 symmetry exactly.
pub fn optimize_displacements(cfg: &ReceiverConfig) -> Result<OptimizationResult> {
    optimize_displacements_impl(cfg, None)
}

fn receiver_for_split(
    alphabet: &Alphabet,
    imperfections: &[ArmImperfections; 3],
    split: [f64; 3],
) -> ReceiverConfig {
    let arms = [0, 1, 2].map(|i| imperfections[i].arm(split[i], ARM_PHASES[i], 0.0));
    ReceiverConfig {
        alphabet: *alphabet,
        arms,
    }
}

fn validate_imperfections(imperfections: &[ArmImperfections; 3]) -> Result<()> {
    for imp in imperfections {
        imp.arm(0.0, 0.0, 0.0).validate()?;
    }
    Ok(())
}

const SPLIT_LO: f64 = 0.02;
const SPLIT_HI: f64 = 0.90;

/// Jointly optimize the splitting ratios (constrained to `R1 = R3` on the
/// simplex `R1 + R2 + R3 = 1`) and the displacement magnitudes.
///
/// The single free parameter `R2` is refined locally downhill from the equal
/// split `{1/3, 1/3, 1/3}`; this follows the solution branch connected to
/// the large-n optimum `{0.40, 0.20, 0.40}`.
pub fn optimize_splitting(
    alphabet: &Alphabet,
    imperfections: &[ArmImperfections; 3],
) -> Result<OptimizationResult> {
    if alphabet.mean_photon_number() <= 0.0 {
        return Err(Error::invalid(
            "amplitude",
            alphabet.amplitude(),
            "splitting optimization needs a nonzero amplitude",
        ));
    }
    validate_imperfections(imperfections)?;

    let mut evaluations = 0u64;
    let mut inner = |r2: f64| -> f64 {
        let split = [(1.0 - r2) / 2.0, r2, (1.0 - r2) / 2.0];
        let cfg = receiver_for_split(alphabet, imperfections, split);
        let result =
            optimize_displacements_impl(&cfg, None).expect("amplitude already validated nonzero");
        evaluations += result.evaluations;
        result.p_error
    };
    let (r2, _) = bracket_and_minimize(&mut inner, 1.0 / 3.0, 0.05, SPLIT_LO, SPLIT_HI, 1e-5);

    let split = [(1.0 - r2) / 2.0, r2, (1.0 - r2) / 2.0];
    let cfg = receiver_for_split(alphabet, imperfections, split);
    let mut result = optimize_displacements_impl(&cfg, None)?;
    result.evaluations += evaluations;
    Ok(result)
}

/// Splitting optimization without the `R1 = R3` restriction, for validating
/// that the symmetric search loses nothing. Slower; starts from the
/// symmetric solution and relaxes both free simplex coordinates.
pub fn optimize_splitting_free(
    alphabet: &Alphabet,
    imperfections: &[ArmImperfections; 3],
) -> Result<OptimizationResult> {
    let symmetric = optimize_splitting(alphabet, imperfections)?;
    let mut evaluations = symmetric.evaluations;

    let mut objective = |x: &[f64]| -> f64 {
        let (r1, r2) = (x[0], x[1]);
        let r3 = 1.0 - r1 - r2;
        let margin = SPLIT_LO;
        if r1 < margin || r2 < margin || r3 < margin {
            // Outside the simplex interior: steer back with a penalty.
            let violation =
                (margin - r1).max(0.0) + (margin - r2).max(0.0) + (margin - r3).max(0.0);
            return 1.0 + violation;
        }
        let cfg = receiver_for_split(alphabet, imperfections, [r1, r2, r3]);
        let result =
            optimize_displacements_impl(&cfg, None).expect("amplitude already validated nonzero");
        evaluations += result.evaluations;
        result.p_error
    };

    let start = [symmetric.split[0], symmetric.split[1]];
    let polish = nelder_mead(&mut objective, &start, &[0.03, 0.03], 1e-12, 1e-6, 300);
    let split = [polish.x[0], polish.x[1], 1.0 - polish.x[0] - polish.x[1]];

    let cfg = receiver_for_split(alphabet, imperfections, split);
    let mut result = optimize_displacements_impl(&cfg, None)?;
    if result.p_error > symmetric.p_error {
        // The relaxation never beats the symmetric optimum by construction;
        // keep whichever evaluated lower.
        result = symmetric;
    }
    result.evaluations = evaluations;
    Ok(result)
}

/// How the displacement magnitudes are chosen along an error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BetaPolicy {
    /// Re-optimize the magnitudes at every grid point (warm-started from the
    /// previous point to keep the curve on one solution branch).
    Optimized,
    /// Fixed power ratios `beta_i^2 = ratio_i * R_i * n`; ratio 1 is the
    /// plain nulling (Kennedy) choice.
    FixedRatios([f64; 3]),
}

/// Receiver family evaluated along a photon-number grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveTemplate {
    pub split: [f64; 3],
    pub imperfections: [ArmImperfections; 3],
    pub beta_policy: BetaPolicy,
}

impl CurveTemplate {
    pub fn new(
        split: [f64; 3],
        imperfections: [ArmImperfections; 3],
        beta_policy: BetaPolicy,
    ) -> Self {
        Self {
            split,
            imperfections,
            beta_policy,
        }
    }
}

/// One row of an error curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint {
    pub mean_photon_number: f64,
    pub p_error: f64,
    pub beta_mags: [f64; 3],
    pub ratios: [f64; 3],
    pub split: [f64; 3],
}

/// Error probability along a strictly increasing photon-number grid.
pub fn error_curve(grid: &[f64], template: &CurveTemplate) -> Result<Vec<CurvePoint>> {
    if grid.is_empty() {
        return Err(Error::Degenerate("empty photon-number grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Degenerate(
            "photon-number grid must be strictly increasing".into(),
        ));
    }
    let split = template.split;
    let mut points = Vec::with_capacity(grid.len());
    let mut warm: Option<[f64; 3]> = None;
    for &n in grid {
        let alphabet = Alphabet::from_mean_photon_number(n)?;
        let mut cfg = receiver_for_split(&alphabet, &template.imperfections, split);
        cfg.validate()?;
        let point = match template.beta_policy {
            BetaPolicy::Optimized => {
                let result = optimize_displacements_impl(&cfg, warm)?;
                warm = Some(result.beta_mags);
                CurvePoint {
                    mean_photon_number: n,
                    p_error: result.p_error,
                    beta_mags: result.beta_mags,
                    ratios: result.ratios,
                    split,
                }
            }
            BetaPolicy::FixedRatios(ratios) => {
                for (i, arm) in cfg.arms.iter_mut().enumerate() {
                    arm.beta_mag = (ratios[i] * split[i] * n).sqrt();
                }
                CurvePoint {
                    mean_photon_number: n,
                    p_error: exact_error_probability(&cfg),
                    beta_mags: [
                        cfg.arms[0].beta_mag,
                        cfg.arms[1].beta_mag,
                        cfg.arms[2].beta_mag,
                    ],
                    ratios,
                    split,
                }
            }
        };
        points.push(point);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::heterodyne_limit;

    fn ideal_receiver(n: f64, split: [f64; 3]) -> ReceiverConfig {
        let alphabet = Alphabet::from_mean_photon_number(n).unwrap();
        receiver_for_split(&alphabet, &[ArmImperfections::IDEAL; 3], split)
    }

    const SPLIT: [f64; 3] = [0.4, 0.2, 0.4];

    #[test]
    fn rejects_zero_amplitude() {
        let cfg = ideal_receiver(0.0, SPLIT);
        assert!(optimize_displacements(&cfg).is_err());
        let alphabet = Alphabet::new(0.0).unwrap();
        assert!(optimize_splitting(&alphabet, &[ArmImperfections::IDEAL; 3]).is_err());
    }

    #[test]
    fn symmetric_arms_share_displacement() {
        for n in [0.5, 2.0, 8.0] {
            let cfg = ideal_receiver(n, SPLIT);
            let result = optimize_displacements(&cfg).unwrap();
            let (b1, b3) = (result.beta_mags[0], result.beta_mags[2]);
            assert!((b1 - b3).abs() <= 1e-6 * (1.0 + b1));
        }
    }

    #[test]
    fn never_loses_to_plain_nulling() {
        for (n, eta, nu, xi) in [
            (1.0, 1.0, 0.0, 1.0),
            (4.0, 0.9, 1e-6, 0.995),
            (9.0, 0.8, 1e-4, 0.99),
        ] {
            let alphabet = Alphabet::from_mean_photon_number(n).unwrap();
            let imps = ArmImperfections::uniform(eta, nu, xi);
            let mut cfg = receiver_for_split(&alphabet, &imps, SPLIT);
            let optimized = optimize_displacements(&cfg).unwrap();
            for (i, arm) in cfg.arms.iter_mut().enumerate() {
                arm.beta_mag = (SPLIT[i] * n).sqrt();
            }
            let nulling = exact_error_probability(&cfg);
            assert!(
                optimized.p_error <= nulling + 1e-15,
                "optimized {} vs nulling {}",
                optimized.p_error,
                nulling
            );
        }
    }

    #[test]
    fn arm_two_needs_relatively_stronger_displacement_at_low_power() {
        let cfg = ideal_receiver(1.0, SPLIT);
        let result = optimize_displacements(&cfg).unwrap();
        assert!(
            result.ratios[1] > result.ratios[0],
            "ratios = {:?}",
            result.ratios
        );
    }

    #[test]
    fn ratios_approach_unity_at_high_power() {
        let cfg = ideal_receiver(15.0, SPLIT);
        let result = optimize_displacements(&cfg).unwrap();
        for r in result.ratios {
            assert!((r - 1.0).abs() < 0.05, "ratios = {:?}", result.ratios);
        }
    }

    #[test]
    fn ideal_receiver_beats_heterodyne_at_four_photons() {
        let cfg = ideal_receiver(4.0, SPLIT);
        let result = optimize_displacements(&cfg).unwrap();
        assert!(result.p_error < heterodyne_limit(4.0).unwrap());
    }

    #[test]
    fn reduced_visibility_sits_above_heterodyne_at_ten_photons() {
        let alphabet = Alphabet::from_mean_photon_number(10.0).unwrap();
        let imps = ArmImperfections::uniform(1.0, 1e-6, 0.995);
        let cfg = receiver_for_split(&alphabet, &imps, SPLIT);
        let result = optimize_displacements(&cfg).unwrap();
        assert!(result.p_error > heterodyne_limit(10.0).unwrap());
    }

    #[test]
    fn degradations_never_help() {
        let n = 6.0;
        let alphabet = Alphabet::from_mean_photon_number(n).unwrap();
        let pe = |imps: [ArmImperfections; 3]| {
            let cfg = receiver_for_split(&alphabet, &imps, SPLIT);
            optimize_displacements(&cfg).unwrap().p_error
        };
        let base = ArmImperfections::new(1.0, 1e-6, 0.998);
        let baseline = pe([base; 3]);
        // Uniform degradations.
        assert!(pe(ArmImperfections::uniform(1.0, 1e-6, 0.99)) >= baseline);
        assert!(pe(ArmImperfections::uniform(0.85, 1e-6, 0.998)) >= baseline);
        assert!(pe(ArmImperfections::uniform(1.0, 1e-3, 0.998)) >= baseline);
        // Degrading a single arm with the others fixed.
        for arm in 0..3 {
            let mut worse_xi = [base; 3];
            worse_xi[arm].visibility = 0.99;
            assert!(pe(worse_xi) >= baseline, "visibility drop in arm {arm}");
            let mut worse_eta = [base; 3];
            worse_eta[arm].efficiency = 0.85;
            assert!(pe(worse_eta) >= baseline, "efficiency drop in arm {arm}");
            let mut worse_nu = [base; 3];
            worse_nu[arm].dark_mean = 1e-3;
            assert!(pe(worse_nu) >= baseline, "dark counts in arm {arm}");
        }
    }

    #[test]
    fn splitting_converges_to_forty_twenty_forty() {
        let alphabet = Alphabet::from_mean_photon_number(10.0).unwrap();
        let result = optimize_splitting(&alphabet, &[ArmImperfections::IDEAL; 3]).unwrap();
        assert!(
            (result.split[0] - 0.40).abs() < 0.03,
            "split = {:?}",
            result.split
        );
        assert!((result.split[1] - 0.20).abs() < 0.03);
        assert!((result.split[2] - 0.40).abs() < 0.03);
        // The joint optimum cannot lose to the fixed reference split.
        let reference = optimize_displacements(&ideal_receiver(10.0, SPLIT)).unwrap();
        assert!(result.p_error <= reference.p_error + 1e-9);
    }

    #[test]
    fn splitting_starts_near_equal_at_vanishing_power() {
        let alphabet = Alphabet::from_mean_photon_number(0.05).unwrap();
        let result = optimize_splitting(&alphabet, &[ArmImperfections::IDEAL; 3]).unwrap();
        for r in result.split {
            assert!((r - 1.0 / 3.0).abs() < 0.03, "split = {:?}", result.split);
        }
    }

    #[test]
    fn free_splitting_confirms_symmetric_restriction() {
        let alphabet = Alphabet::from_mean_photon_number(5.0).unwrap();
        let sym = optimize_splitting(&alphabet, &[ArmImperfections::IDEAL; 3]).unwrap();
        let free = optimize_splitting_free(&alphabet, &[ArmImperfections::IDEAL; 3]).unwrap();
        assert!(
            (free.split[0] - free.split[2]).abs() < 0.02,
            "split = {:?}",
            free.split
        );
        assert!(free.p_error <= sym.p_error + 1e-9);
    }

    #[test]
    fn single_point_curve_matches_direct_evaluation() {
        let template = CurveTemplate::new(
            SPLIT,
            [ArmImperfections::IDEAL; 3],
            BetaPolicy::FixedRatios([1.0; 3]),
        );
        let points = error_curve(&[3.0], &template).unwrap();
        assert_eq!(points.len(), 1);
        let mut cfg = ideal_receiver(3.0, SPLIT);
        for (i, arm) in cfg.arms.iter_mut().enumerate() {
            arm.beta_mag = (SPLIT[i] * 3.0).sqrt();
        }
        assert_eq!(points[0].p_error, exact_error_probability(&cfg));
    }

    #[test]
    fn curve_rejects_bad_grids() {
        let template =
            CurveTemplate::new(SPLIT, [ArmImperfections::IDEAL; 3], BetaPolicy::Optimized);
        assert!(error_curve(&[], &template).is_err());
        assert!(error_curve(&[1.0, 1.0], &template).is_err());
        assert!(error_curve(&[2.0, 1.0], &template).is_err());
    }

    #[test]
    fn optimized_curve_is_smooth() {
        let template =
            CurveTemplate::new(SPLIT, [ArmImperfections::IDEAL; 3], BetaPolicy::Optimized);
        let grid: Vec<f64> = (0..30)
            .map(|i| 0.5 + i as f64 * (10.0 - 0.5) / 29.0)
            .collect();
        let points = error_curve(&grid, &template).unwrap();
        for w in points.windows(3) {
            let slope = (w[2].p_error - w[0].p_error).abs()
                / (w[2].mean_photon_number - w[0].mean_photon_number);
            let step = w[1].mean_photon_number - w[0].mean_photon_number;
            let jump = (w[1].p_error - w[0].p_error).abs();
            assert!(
                jump <= 5.0 * slope * step + 1e-12,
                "jump {jump} exceeds 5x local slope {slope} at n={}",
                w[1].mean_photon_number
            );
        }
    }
}
