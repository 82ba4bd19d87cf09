//! Wave-plate calibration of the displacement operations.
//!
//! Each arm realizes its displacement by interfering the signal (vertical
//! polarization) with the local oscillator (horizontal) on a polarizing beam
//! splitter; a half-wave plate (HWP) sets the mixing angle. Scanning the HWP
//! angle `theta` traces an interference fringe
//!
//! `I(theta) = R|a|^2 cos^2(2D) + |b|^2 sin^2(2D)
//!             - 2 sqrt(R)|a||b| sin(2D) cos(2D) cos(gamma)`
//!
//! with `D = theta - delta` the rotation from the pass-through offset
//! `delta` and `gamma` the signal/LO relative phase. Fitting this fringe
//! yields the offset, the nulling angle and the field ratio, from which the
//! HWP angle realizing any target displacement ratio follows as
//! `theta = delta +/- atan(S/f)/2`.
//!
//! Angles are degrees at every interface and radians internally.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::NUM_STATES;
use crate::optim::nelder_mead;

/// One measured point of an interference fringe scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringeSample {
    pub hwp_angle_deg: f64,
    pub intensity: f64,
    /// Which constellation state was sent (0..3, phase `k*pi/2`).
    pub input_phase: usize,
}

/// Canonical text labels for the four input phases, as used in fringe CSVs.
pub const PHASE_LABELS: [&str; NUM_STATES] = ["0", "pi/2", "pi", "3pi/2"];

pub fn parse_phase_label(label: &str) -> Result<usize> {
    PHASE_LABELS
        .iter()
        .position(|&l| l == label.trim())
        .ok_or_else(|| {
            Error::Degenerate(format!(
                "unknown phase label `{label}` (expected one of {PHASE_LABELS:?})"
            ))
        })
}

pub fn phase_label(k: usize) -> &'static str {
    PHASE_LABELS[k]
}

/// Result of fitting one fringe scan.
///
/// The fringe determines `(rel_phase, offset_deg)` only jointly: replacing
/// `gamma -> pi - gamma` and rotating the offset branch reproduces the same
/// curve. The fit reports the representative with `rel_phase` in `[0, pi/2]`
/// whenever the data allows; curve-derived quantities (nulling angle,
/// visibility) do not depend on the choice.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FringeFit {
    /// HWP angle at which only the signal polarization passes (degrees).
    pub offset_deg: f64,
    /// Fringe-minimum angle for the matched input state (degrees).
    pub nulling_angle_deg: f64,
    /// LO-to-signal field amplitude ratio `f = |b| / (sqrt(R)|a|)`.
    pub field_ratio: f64,
    /// Relative phase between signal and LO (radians).
    pub rel_phase: f64,
    /// Contrast of the fitted fringe, `(I_max - I_min)/(I_max + I_min)`.
    pub visibility: f64,
    /// Fitted pass-through intensity (the detector-unit scale).
    pub scale: f64,
    /// Root-mean-square fit residual in detector units.
    pub residual_rms: f64,
}

/// Which normalization the fringe data carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FitNormalization {
    /// Intensities are divided by the arm input power `R|a|^2`; the scale is
    /// fixed to 1 and `(offset, field_ratio, rel_phase)` are fitted.
    InputPower,
    /// Intensities are in raw detector units with the field ratio known from
    /// the set power ratio; `(offset, scale, rel_phase)` are fitted and the
    /// pass-through level at `D = 0` defines the normalization.
    PassThrough { field_ratio: f64 },
}

/// Raw two-field interference intensity after the PBS.
/// `delta_angle` is `D = theta - delta` in radians.
pub fn fringe_intensity(
    split_ratio: f64,
    alpha_mag: f64,
    beta_mag: f64,
    gamma: f64,
    delta_angle: f64,
) -> f64 {
    let (s, c) = (2.0 * delta_angle).sin_cos();
    let signal = split_ratio.sqrt() * alpha_mag;
    signal * signal * c * c + beta_mag * beta_mag * s * s
        - 2.0 * signal * beta_mag * s * c * gamma.cos()
}

/// Fringe intensity normalized to the arm input power:
/// `cos^2(2D) + f^2 sin^2(2D) - 2 f sin(2D) cos(2D) cos(gamma)`.
pub fn normalized_fringe_intensity(field_ratio: f64, gamma: f64, delta_angle: f64) -> f64 {
    fringe_intensity(1.0, 1.0, field_ratio, gamma, delta_angle)
}

/// Fringe expressed in its Fourier form `u0 + u1 cos(4 theta) + u2 sin(4 theta)`.
fn fourier_coefficients(scale: f64, field_ratio: f64, q: f64, delta_rad: f64) -> (f64, f64, f64) {
    let f2 = field_ratio * field_ratio;
    let p = scale * (1.0 - f2) / 2.0;
    let q = scale * q;
    let (s4, c4) = (4.0 * delta_rad).sin_cos();
    (scale * (1.0 + f2) / 2.0, p * c4 + q * s4, p * s4 - q * c4)
}

fn model_intensity(scale: f64, field_ratio: f64, q: f64, delta_rad: f64) -> f64 {
    let (s, c) = (2.0 * delta_rad).sin_cos();
    scale * (c * c + field_ratio * field_ratio * s * s - 2.0 * q * s * c)
}

/// HWP rotation (radians, in `(-pi/4, pi/4]`) that minimizes the fringe.
fn fringe_minimum_rotation(field_ratio: f64, q: f64) -> f64 {
    // I ~ const + [(1-f^2)/2] cos(4D) - q sin(4D); the minimum of
    // P cos + Q' sin form sits at 4D = pi - atan2(2q, 1 - f^2).
    let mut rotation =
        (std::f64::consts::PI - f64::atan2(2.0 * q, 1.0 - field_ratio * field_ratio)) / 4.0;
    let period = std::f64::consts::FRAC_PI_2;
    rotation -= period * (rotation / period).round();
    rotation
}

/// Solve the 3x3 normal equations of the linear least squares on the basis
/// `{1, cos(4 theta), sin(4 theta)}`.
fn linear_fringe_lsq(samples: &[FringeSample]) -> Result<(f64, f64, f64)> {
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for s in samples {
        let t = 4.0 * s.hwp_angle_deg.to_radians();
        let row = [1.0, t.cos(), t.sin()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * s.intensity;
        }
    }
    // Gaussian elimination with partial pivoting.
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&ata[i]);
        m[i][3] = atb[i];
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-9 * samples.len() as f64 {
            return Err(Error::Degenerate(
                "fringe angles do not span the model basis".into(),
            ));
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let factor = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= factor * m[col][k];
                }
            }
        }
    }
    Ok((m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]))
}

fn validate_samples(samples: &[FringeSample]) -> Result<()> {
    if samples.len() < 8 {
        return Err(Error::Degenerate(format!(
            "fringe fit needs at least 8 samples, got {}",
            samples.len()
        )));
    }
    let phase = samples[0].input_phase;
    if samples.iter().any(|s| s.input_phase != phase) {
        return Err(Error::Degenerate(
            "fringe fit expects samples of a single input phase".into(),
        ));
    }
    if let Some(s) = samples
        .iter()
        .find(|s| !s.intensity.is_finite() || s.intensity < 0.0 || !s.hwp_angle_deg.is_finite())
    {
        return Err(Error::invalid(
            "intensity",
            s.intensity,
            "fringe samples must be finite and non-negative",
        ));
    }
    let lo = samples
        .iter()
        .map(|s| s.hwp_angle_deg)
        .fold(f64::INFINITY, f64::min);
    let hi = samples
        .iter()
        .map(|s| s.hwp_angle_deg)
        .fold(f64::NEG_INFINITY, f64::max);
    // A quarter of the 90-degree fringe period.
    if hi - lo <= 22.5 {
        return Err(Error::Degenerate(format!(
            "fringe scan spans only {:.2} degrees; more than 22.5 needed",
            hi - lo
        )));
    }
    Ok(())
}

/// Least-squares fit of the fringe model to one scan.
///
/// The model is linear in the Fourier basis `{1, cos(4t), sin(4t)}`, so the
/// fit solves that exactly for initialization, converts to the physical
/// parameters of the requested normalization, and polishes with a simplex
/// refinement of the true sum of squares.
pub fn fit_fringe(samples: &[FringeSample], normalization: FitNormalization) -> Result<FringeFit> {
    validate_samples(samples)?;
    let (u0, u1, u2) = linear_fringe_lsq(samples)?;
    if u0 <= 0.0 {
        return Err(Error::Degenerate(
            "fringe has no measurable intensity".into(),
        ));
    }
    let modulation = (u1 * u1 + u2 * u2).sqrt();
    if modulation <= 1e-9 * u0 {
        return Err(Error::Degenerate(
            "fringe has no modulation (constant intensity)".into(),
        ));
    }

    // Convert Fourier coefficients to (scale, f, q = f cos gamma, delta).
    let (scale0, f0) = match normalization {
        FitNormalization::InputPower => (1.0, (2.0 * u0 - 1.0).max(0.0).sqrt()),
        FitNormalization::PassThrough { field_ratio } => {
            if !(field_ratio > 0.0) {
                return Err(Error::invalid(
                    "field_ratio",
                    field_ratio,
                    "known LO/signal ratio must be positive",
                ));
            }
            (2.0 * u0 / (1.0 + field_ratio * field_ratio), field_ratio)
        }
    };
    let p0 = scale0 * (1.0 - f0 * f0) / 2.0;
    let q0 = (modulation * modulation - p0 * p0).max(0.0).sqrt() / scale0;
    // Rotation carrying the coefficient vector (P, -Q) onto (u1, u2).
    let norm2 = p0 * p0 + (scale0 * q0) * (scale0 * q0);
    let delta0 = if norm2 > 0.0 {
        let c4 = (p0 * u1 - scale0 * q0 * u2) / norm2;
        let s4 = (scale0 * q0 * u1 + p0 * u2) / norm2;
        f64::atan2(s4, c4) / 4.0
    } else {
        0.0
    };
    // Report the offset branch nearest the scan center.
    let center = samples.iter().map(|s| s.hwp_angle_deg).sum::<f64>() / samples.len() as f64;
    let rebranch = |delta_rad: f64| -> f64 {
        let deg = delta_rad.to_degrees();
        deg + 90.0 * ((center - deg) / 90.0).round()
    };

    // Simplex polish of the actual sum of squares over the free parameters.
    let thetas: Vec<f64> = samples
        .iter()
        .map(|s| s.hwp_angle_deg.to_radians())
        .collect();
    let sse = |scale: f64, f: f64, q: f64, delta: f64| -> f64 {
        samples
            .iter()
            .zip(&thetas)
            .map(|(s, &t)| {
                let r = model_intensity(scale, f, q, t - delta) - s.intensity;
                r * r
            })
            .sum()
    };
    let objective = |x: &[f64]| match normalization {
        FitNormalization::InputPower => sse(1.0, x[1].abs(), x[2], x[0]),
        FitNormalization::PassThrough { field_ratio } => sse(x[1].abs(), field_ratio, x[2], x[0]),
    };
    let start = match normalization {
        FitNormalization::InputPower => vec![delta0, f0, q0],
        FitNormalization::PassThrough { .. } => vec![delta0, scale0, q0],
    };
    let spread = [1e-3, 1e-3 * (1.0 + start[1].abs()), 1e-3 * (1.0 + q0)];
    let polish = nelder_mead(objective, &start, &spread, 1e-15, 1e-12, 4000);
    if !polish.converged {
        return Err(Error::FitFailure(format!(
            "fringe refinement did not converge after {} evaluations (residual {:.3e})",
            polish.evaluations,
            polish.value.sqrt()
        )));
    }

    let delta_rad = polish.x[0];
    let (scale, f) = match normalization {
        FitNormalization::InputPower => (1.0, polish.x[1].abs()),
        FitNormalization::PassThrough { field_ratio } => (polish.x[1].abs(), field_ratio),
    };
    let q = polish.x[2];
    let rel_phase = (q / f).clamp(-1.0, 1.0).acos();
    let offset_deg = rebranch(delta_rad);
    let nulling_angle_deg = offset_deg + fringe_minimum_rotation(f, q).to_degrees();
    let (mean_level, _, _) = fourier_coefficients(scale, f, q, 0.0);
    let contrast = {
        let p = scale * (1.0 - f * f) / 2.0;
        ((p * p + (scale * q) * (scale * q)).sqrt() / mean_level).clamp(0.0, 1.0)
    };
    Ok(FringeFit {
        offset_deg,
        nulling_angle_deg,
        field_ratio: f,
        rel_phase,
        visibility: contrast,
        scale,
        residual_rms: (polish.value / samples.len() as f64).sqrt(),
    })
}

/// Interference visibility from the extrema of a fringe:
/// `(I_max - I_min) / (I_max + I_min)`.
///
/// With matched signal and LO powers at the comparison points the estimate
/// equals the cross-term coefficient of the interference exactly; a power
/// imbalance between the two fields biases it low (the extrema then read
/// `a^2 + b^2 -/+ 2 xi a b` and the estimator returns
/// `xi * 2ab / (a^2 + b^2)`).
pub fn visibility_from_extrema(i_min: f64, i_max: f64) -> Result<f64> {
    if !(i_max > 0.0) {
        return Err(Error::invalid(
            "i_max",
            i_max,
            "maximum intensity must be positive",
        ));
    }
    if !(i_min >= 0.0) || i_min > i_max {
        return Err(Error::invalid(
            "i_min",
            i_min,
            "minimum intensity must satisfy 0 <= i_min <= i_max",
        ));
    }
    Ok((i_max - i_min) / (i_max + i_min))
}

/// HWP angle (degrees) realizing the target LO-to-signal amplitude ratio
/// `S = f |tan(2 (theta - delta))|` after the PBS.
///
/// The branch is chosen on the nulling side of the offset, where the fringe
/// interferes destructively for the matched state so that the admixture acts
/// as a displacement toward vacuum; at the returned angle
/// `f |tan(2(theta - delta))|` reproduces `S` to full precision.
pub fn hwp_angle_for_ratio(fit: &FringeFit, s_target: f64) -> Result<f64> {
    if !(s_target > 0.0) {
        return Err(Error::invalid(
            "s_target",
            s_target,
            "target ratio must be positive",
        ));
    }
    if !(fit.field_ratio > 0.0) {
        return Err(Error::invalid(
            "field_ratio",
            fit.field_ratio,
            "fit must carry a positive field ratio",
        ));
    }
    let side = if fit.nulling_angle_deg >= fit.offset_deg {
        1.0
    } else {
        -1.0
    };
    let half_angle = 0.5 * (s_target / fit.field_ratio).atan();
    Ok(fit.offset_deg + side * half_angle.to_degrees())
}

/// Quality report of the four-state preparation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StatePrepReport {
    /// Intensity difference between the `3pi/2` and `pi/2` states measured
    /// at the nulling angle; zero for ideal preparation.
    pub b_minus_c: f64,
    /// `|b_minus_c|` relative to the full fringe swing (state `pi` minus
    /// state `0`).
    pub relative_imbalance: f64,
    pub pass: bool,
}

/// Compare the two quadrature states at the nulling angle. Expects exactly
/// one intensity per input phase.
pub fn state_prep_diagnostic(
    intensities_at_nulling: &[(usize, f64)],
    threshold: f64,
) -> Result<StatePrepReport> {
    let mut by_phase = [None; NUM_STATES];
    for &(k, intensity) in intensities_at_nulling {
        if k >= NUM_STATES {
            return Err(Error::invalid(
                "input_phase",
                k as f64,
                "phase index must be 0..3",
            ));
        }
        if by_phase[k].replace(intensity).is_some() {
            return Err(Error::Degenerate(format!(
                "duplicate intensity for phase {}",
                phase_label(k)
            )));
        }
    }
    let values: Vec<f64> = by_phase
        .iter()
        .enumerate()
        .map(|(k, v)| {
            v.ok_or_else(|| {
                Error::Degenerate(format!("missing intensity for phase {}", phase_label(k)))
            })
        })
        .collect::<Result<_>>()?;
    let b_minus_c = values[3] - values[1];
    let swing = (values[2] - values[0]).abs().max(f64::MIN_POSITIVE);
    let relative_imbalance = b_minus_c.abs() / swing;
    Ok(StatePrepReport {
        b_minus_c,
        relative_imbalance,
        pass: relative_imbalance <= threshold,
    })
}
