//! Browser bindings for the receiver model. Every export takes plain
//! numbers and returns a JSON string (an object with an `error` field on
//! invalid input), which keeps the JS glue trivial and the functions
//! testable on any target.

use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use qpsk_receiver::bounds::{helstrom_bound, heterodyne_limit};
use qpsk_receiver::calibration::{hwp_angle_for_ratio, normalized_fringe_intensity, FringeFit};
use qpsk_receiver::model::{Alphabet, ArmConfig, ReceiverConfig, ARM_PHASES};
use qpsk_receiver::optimizer::{
    error_curve, optimize_displacements, ArmImperfections, BetaPolicy, CurveTemplate,
};

const SPLIT: [f64; 3] = [0.4, 0.2, 0.4];

fn receiver(n: f64, eta: f64, nu: f64, xi: f64) -> Result<ReceiverConfig, qpsk_receiver::Error> {
    let alphabet = Alphabet::from_mean_photon_number(n)?;
    let arms = [0, 1, 2].map(|i| ArmConfig {
        split_ratio: SPLIT[i],
        hypothesis_phase: ARM_PHASES[i],
        beta_mag: 0.0,
        efficiency: eta,
        dark_mean: nu,
        visibility: xi,
    });
    ReceiverConfig::new(alphabet, arms)
}

fn error_json(err: impl std::fmt::Display) -> String {
    json!({ "error": err.to_string() }).to_string()
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points.max(2) - 1) as f64).exp())
        .collect()
}

/// Error probability of the optimized receiver along a log-spaced
/// photon-number grid, next to the Helstrom bound and heterodyne limit.
#[wasm_bindgen]
pub fn error_curve_json(
    efficiency: f64,
    dark_mean: f64,
    visibility: f64,
    n_min: f64,
    n_max: f64,
    points: usize,
) -> String {
    if !(n_min > 0.0) || !(n_max > n_min) || points < 2 || points > 400 {
        return error_json("grid must satisfy 0 < n_min < n_max with 2..=400 points");
    }
    let template = CurveTemplate::new(
        SPLIT,
        ArmImperfections::uniform(efficiency, dark_mean, visibility),
        BetaPolicy::Optimized,
    );
    let grid = log_grid(n_min, n_max, points);
    let points = match error_curve(&grid, &template) {
        Ok(points) => points,
        Err(err) => return error_json(err),
    };
    let rows: Vec<serde_json::Value> = points
        .iter()
        .map(|p| {
            json!({
                "n": p.mean_photon_number,
                "p_error": p.p_error,
                "ratios": p.ratios,
                "helstrom": helstrom_bound(p.mean_photon_number).unwrap(),
                "heterodyne": heterodyne_limit(p.mean_photon_number).unwrap(),
            })
        })
        .collect();
    json!({ "rows": rows }).to_string()
}

/// log10(P_E / P_het) over a visibility x photon-number grid (rows ordered
/// visibility-major), for the heat-map view.
#[wasm_bindgen]
pub fn sweep_json(
    efficiency: f64,
    dark_mean: f64,
    xi_min: f64,
    xi_max: f64,
    xi_points: usize,
    n_min: f64,
    n_max: f64,
    n_points: usize,
) -> String {
    if xi_points < 2 || n_points < 2 || xi_points * n_points > 10_000 {
        return error_json("sweep axes need >= 2 points each and at most 10000 cells");
    }
    if !(xi_min < xi_max) || !(0.0 < n_min) || !(n_min < n_max) {
        return error_json("sweep ranges must be increasing and n_min positive");
    }
    let xis: Vec<f64> = (0..xi_points)
        .map(|i| xi_min + (xi_max - xi_min) * i as f64 / (xi_points - 1) as f64)
        .collect();
    let ns = log_grid(n_min, n_max, n_points);
    let mut values = Vec::with_capacity(xis.len() * ns.len());
    for &xi in &xis {
        for &n in &ns {
            let cfg = match receiver(n, efficiency, dark_mean, xi) {
                Ok(cfg) => cfg,
                Err(err) => return error_json(err),
            };
            let p = match optimize_displacements(&cfg) {
                Ok(r) => r.p_error,
                Err(err) => return error_json(err),
            };
            values.push((p / heterodyne_limit(n).unwrap()).log10());
        }
    }
    json!({ "visibility": xis, "n": ns, "log10_ratio": values, "clip": 1.0 }).to_string()
}

/// Interference fringes of one arm for the four input phases, with the
/// nulling angle and the HWP angles realizing the optimal displacement
/// ratios at the requested photon numbers.
#[wasm_bindgen]
pub fn fringe_json(
    field_ratio: f64,
    offset_deg: f64,
    span_deg: f64,
    points: usize,
    n_targets: Vec<f64>,
) -> String {
    if !(field_ratio > 0.0) || !(span_deg > 0.0) || points < 2 || points > 2000 {
        return error_json("fringe view needs field_ratio > 0, span > 0, 2..=2000 points");
    }
    let thetas: Vec<f64> = (0..points)
        .map(|i| offset_deg - span_deg + 2.0 * span_deg * i as f64 / (points - 1) as f64)
        .collect();
    // One curve per input phase; the input phase shifts the LO relative phase.
    let curves: Vec<Vec<f64>> = (0..4)
        .map(|k| {
            let gamma = k as f64 * std::f64::consts::FRAC_PI_2;
            thetas
                .iter()
                .map(|&t| {
                    normalized_fringe_intensity(field_ratio, gamma, (t - offset_deg).to_radians())
                })
                .collect()
        })
        .collect();
    let nulling_deg = offset_deg + 0.5 * (1.0 / field_ratio).atan().to_degrees();
    let fit = FringeFit {
        offset_deg,
        nulling_angle_deg: nulling_deg,
        field_ratio,
        rel_phase: 0.0,
        visibility: 1.0,
        scale: 1.0,
        residual_rms: 0.0,
    };
    let mut markers = Vec::new();
    for &n in &n_targets {
        if !(n > 0.0) {
            return error_json("target photon numbers must be positive");
        }
        let cfg = match receiver(n, 1.0, 0.0, 1.0) {
            Ok(cfg) => cfg,
            Err(err) => return error_json(err),
        };
        let optimum = match optimize_displacements(&cfg) {
            Ok(r) => r,
            Err(err) => return error_json(err),
        };
        let amplitude_ratio = optimum.ratios[0].sqrt();
        let theta = match hwp_angle_for_ratio(&fit, amplitude_ratio) {
            Ok(t) => t,
            Err(err) => return error_json(err),
        };
        markers.push(json!({
            "n": n,
            "theta_deg": theta,
            "intensity": normalized_fringe_intensity(
                field_ratio,
                0.0,
                (theta - offset_deg).to_radians(),
            ),
        }));
    }
    json!({
        "theta_deg": thetas,
        "curves": curves,
        "phase_labels": qpsk_receiver::calibration::PHASE_LABELS,
        "nulling_deg": nulling_deg,
        "offset_deg": offset_deg,
        "markers": markers,
    })
    .to_string()
}
