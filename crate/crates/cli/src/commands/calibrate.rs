use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use qpsk_receiver::calibration::{
    fit_fringe, hwp_angle_for_ratio, parse_phase_label, state_prep_diagnostic,
    visibility_from_extrema, FitNormalization, FringeSample,
};
use qpsk_receiver::optimizer::optimize_displacements;

use crate::config::{self, Echo, IoArgs, ReceiverArgs};
use crate::error::{CliError, Result};
use crate::output::{emit, Table};

const DEFAULT_PREP_THRESHOLD: f64 = 0.05;

/// Fit a fringe scan, extract the arm visibility and state-preparation
/// diagnostics, and tabulate the HWP angles realizing the optimal
/// displacement ratios for the requested photon numbers.
#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Fringe CSV with columns angle_deg,intensity,phase_label.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Detection arm the scan belongs to (1..3).
    #[arg(long)]
    pub arm: Option<usize>,
    /// Mean photon numbers for the emitted angle table.
    #[arg(long, value_delimiter = ',', value_name = "N1,N2,...")]
    pub targets: Option<Vec<f64>>,
    /// Fringe normalization: intensities divided by the arm input power, or
    /// raw detector units with a known LO/signal field ratio.
    #[arg(long, value_parser = ["input-power", "pass-through"])]
    pub normalization: Option<String>,
    /// Known LO/signal field ratio (with --normalization pass-through).
    #[arg(long)]
    pub field_ratio: Option<f64>,
    /// State-preparation pass threshold on the relative B-C imbalance.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub receiver: ReceiverArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

/// Parse the fringe CSV, reporting problems with their line numbers.
fn parse_fringe_csv(text: &str, path: &std::path::Path) -> Result<Vec<FringeSample>> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() || line.starts_with('#') => continue,
            Some((no, line)) => break (no, line),
            None => return Err(CliError::parse(format!("{}: empty file", path.display()))),
        }
    };
    let columns: Vec<&str> = header.1.split(',').map(str::trim).collect();
    let index_of = |name: &str| -> Result<usize> {
        columns.iter().position(|c| *c == name).ok_or_else(|| {
            CliError::parse(format!(
                "{}: line {}: missing column `{name}` in header",
                path.display(),
                header.0 + 1
            ))
        })
    };
    let angle_col = index_of("angle_deg")?;
    let intensity_col = index_of("intensity")?;
    let phase_col = index_of("phase_label")?;

    let mut samples = Vec::new();
    for (no, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(CliError::parse(format!(
                "{}: line {}: expected {} fields, got {}",
                path.display(),
                no + 1,
                columns.len(),
                cells.len()
            )));
        }
        let parse_f64 = |col: usize, name: &str| -> Result<f64> {
            cells[col].parse().map_err(|e| {
                CliError::parse(format!(
                    "{}: line {}: column `{name}`: {e}",
                    path.display(),
                    no + 1
                ))
            })
        };
        let input_phase = parse_phase_label(cells[phase_col])
            .map_err(|e| CliError::parse(format!("{}: line {}: {e}", path.display(), no + 1)))?;
        samples.push(FringeSample {
            hwp_angle_deg: parse_f64(angle_col, "angle_deg")?,
            intensity: parse_f64(intensity_col, "intensity")?,
            input_phase,
        });
    }
    if samples.is_empty() {
        return Err(CliError::parse(format!("{}: no data rows", path.display())));
    }
    Ok(samples)
}

/// Linear interpolation of a scan at `angle`; samples need not be sorted.
fn interpolate(samples: &[FringeSample], angle: f64, phase: usize) -> Result<f64> {
    let mut points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.input_phase == phase)
        .map(|s| (s.hwp_angle_deg, s.intensity))
        .collect();
    if points.is_empty() {
        return Err(CliError::parse(format!(
            "no fringe samples for input phase `{}`",
            qpsk_receiver::calibration::phase_label(phase)
        )));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    if angle < points[0].0 || angle > points[points.len() - 1].0 {
        return Err(CliError::usage(format!(
            "nulling angle {angle:.3} deg lies outside the `{}` scan range [{:.3}, {:.3}]",
            qpsk_receiver::calibration::phase_label(phase),
            points[0].0,
            points[points.len() - 1].0
        )));
    }
    let right = points
        .partition_point(|p| p.0 < angle)
        .min(points.len() - 1);
    let left = right.saturating_sub(1);
    let (x0, y0) = points[left];
    let (x1, y1) = points[right];
    if x1 == x0 {
        return Ok(y0);
    }
    Ok(y0 + (y1 - y0) * (angle - x0) / (x1 - x0))
}

pub fn run(args: &CalibrateArgs) -> Result<()> {
    let file = config::load_file(&args.io.config)?;
    let cal = file.calibration.as_ref();
    let mut echo = Echo::default();
    config::configure_threads(&args.io, &mut echo)?;

    let input = args
        .input
        .clone()
        .or_else(|| cal.and_then(|c| c.input.clone()))
        .ok_or_else(|| CliError::usage("calibrate needs --input <fringe.csv>"))?;
    let arm = args.arm.or_else(|| cal.and_then(|c| c.arm)).unwrap_or(1);
    if !(1..=3).contains(&arm) {
        return Err(CliError::usage(format!("--arm must be 1..3, got {arm}")));
    }
    let targets = args
        .targets
        .clone()
        .or_else(|| cal.and_then(|c| c.targets.clone()))
        .unwrap_or_else(|| vec![1.0, 2.0, 3.0]);
    let threshold = args
        .threshold
        .or_else(|| cal.and_then(|c| c.threshold))
        .unwrap_or(DEFAULT_PREP_THRESHOLD);
    let normalization_name = args
        .normalization
        .clone()
        .or_else(|| cal.and_then(|c| c.normalization.clone()))
        .unwrap_or_else(|| "input-power".to_string());
    let normalization = match normalization_name.as_str() {
        "input-power" => FitNormalization::InputPower,
        "pass-through" => {
            let f = args
                .field_ratio
                .or_else(|| cal.and_then(|c| c.field_ratio))
                .ok_or_else(|| {
                    CliError::usage("--normalization pass-through needs --field-ratio")
                })?;
            FitNormalization::PassThrough { field_ratio: f }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown normalization `{other}` (input-power|pass-through)"
            )))
        }
    };
    echo.put("calibration.input", input.display().to_string());
    echo.put("calibration.arm", arm.to_string());
    echo.put("calibration.normalization", normalization_name);
    echo.put_f64("calibration.threshold", threshold);

    let (split, imperfections) = config::resolve_arms(&file, &args.receiver, &mut echo)?;
    let (path, format) = config::resolve_output(&file, &args.io)?;

    let text = std::fs::read_to_string(&input)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", input.display())))?;
    let samples = parse_fringe_csv(&text, &input)?;

    // Fit the hypothesis-matched scan (phase label "0" is relative to the
    // arm under calibration).
    let matched: Vec<FringeSample> = samples
        .iter()
        .copied()
        .filter(|s| s.input_phase == 0)
        .collect();
    let fit = fit_fringe(&matched, normalization)?;

    // Per-phase intensities at the nulling angle: A (matched), C (pi/2),
    // D (pi), B (3pi/2).
    let at_null: Vec<(usize, f64)> = (0..4)
        .map(|k| Ok((k, interpolate(&samples, fit.nulling_angle_deg, k)?)))
        .collect::<Result<_>>()?;
    let visibility = visibility_from_extrema(
        at_null[0].1.min(at_null[2].1),
        at_null[2].1.max(at_null[0].1),
    )?;
    let prep = state_prep_diagnostic(&at_null, threshold)?;

    // Angle table: optimal displacement ratio of this arm at each target
    // photon number, converted to an amplitude ratio and an HWP angle.
    let mut table = Table::new(vec![
        "mean_photon_number",
        "power_ratio",
        "amplitude_ratio",
        "hwp_angle_deg",
        "fringe_intensity",
    ]);
    for &n in &targets {
        if !(n > 0.0) {
            return Err(CliError::usage(format!(
                "calibration target photon numbers must be positive, got {n}"
            )));
        }
        let resolved = config::ResolvedReceiver {
            mean_photon_number: n,
            split,
            imperfections,
        };
        let optimum = optimize_displacements(&resolved.config([0.0; 3])?)?;
        let power_ratio = optimum.ratios[arm - 1];
        let amplitude_ratio = power_ratio.sqrt();
        let theta = hwp_angle_for_ratio(&fit, amplitude_ratio)?;
        let intensity = qpsk_receiver::calibration::normalized_fringe_intensity(
            fit.field_ratio,
            fit.rel_phase,
            (theta - fit.offset_deg).to_radians(),
        ) * fit.scale;
        table.push_row(vec![
            json!(n),
            json!(power_ratio),
            json!(amplitude_ratio),
            json!(theta),
            json!(intensity),
        ]);
    }

    table.echo = echo.0;
    table.meta = vec![
        (
            "fit".into(),
            json!({
                "offset_deg": fit.offset_deg,
                "nulling_angle_deg": fit.nulling_angle_deg,
                "field_ratio": fit.field_ratio,
                "rel_phase": fit.rel_phase,
                "fringe_contrast": fit.visibility,
                "scale": fit.scale,
                "residual_rms": fit.residual_rms,
            }),
        ),
        (
            "diagnostics".into(),
            json!({
                "visibility": visibility,
                "b_minus_c": prep.b_minus_c,
                "relative_imbalance": prep.relative_imbalance,
                "state_prep_pass": prep.pass,
            }),
        ),
    ];
    emit(&path, &table.render(format))
}
