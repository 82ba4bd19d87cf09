use std::str::FromStr;

use clap::Args;
use rayon::prelude::*;
use serde_json::json;

use qpsk_receiver::bounds::heterodyne_limit;
use qpsk_receiver::optimizer::{optimize_displacements, ArmImperfections};

use crate::config::{self, Echo, IoArgs, ReceiverArgs, Spacing};
use crate::error::{CliError, Result};
use crate::output::{emit, Table};

/// Cells whose log10(P_E / P_het) exceeds this are marked clipped.
const CLIP_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Visibility,
    Efficiency,
    MeanPhotonNumber,
}

impl SweepAxis {
    fn name(self) -> &'static str {
        match self {
            SweepAxis::Visibility => "visibility",
            SweepAxis::Efficiency => "efficiency",
            SweepAxis::MeanPhotonNumber => "mean_photon_number",
        }
    }
}

/// One sweep axis: `name:min:max:points[:log|:linear]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(CliError::usage(format!(
                "sweep axis {} needs at least 2 points",
                self.axis.name()
            )));
        }
        let spec = config::GridSpec {
            min: self.min,
            max: self.max,
            points: self.points,
            spacing: self.spacing,
        };
        spec.values()
    }

    pub fn describe(&self) -> String {
        format!(
            "{}:{}:{}:{}:{}",
            self.axis.name(),
            self.min,
            self.max,
            self.points,
            match self.spacing {
                Spacing::Linear => "linear",
                Spacing::Log => "log",
            }
        )
    }
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected name:min:max:points[:spacing], got `{s}`"))?;
        let axis = match name {
            "visibility" | "xi" => SweepAxis::Visibility,
            "efficiency" | "eta" => SweepAxis::Efficiency,
            "mean-photon-number" | "mean_photon_number" | "n" => SweepAxis::MeanPhotonNumber,
            other => {
                return Err(format!(
                    "unknown sweep axis `{other}` (visibility|efficiency|mean-photon-number)"
                ))
            }
        };
        let grid = config::GridSpec::from_str(rest)?;
        Ok(AxisSpec {
            axis,
            min: grid.min,
            max: grid.max,
            points: grid.points,
            spacing: grid.spacing,
        })
    }
}

/// Map log10(P_E / P_het) over a two-axis parameter grid.
#[derive(Debug, Args)]
pub struct SweepArgs {
    /// First (outer) axis, `name:min:max:points[:spacing]`.
    #[arg(long, value_name = "AXIS")]
    pub axis1: Option<AxisSpec>,
    /// Second (inner) axis.
    #[arg(long, value_name = "AXIS")]
    pub axis2: Option<AxisSpec>,
    /// Emit the raw ratio P_E / P_het instead of its log10.
    #[arg(long)]
    pub raw_ratio: bool,
    #[command(flatten)]
    pub receiver: ReceiverArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

struct CellParams {
    n: f64,
    efficiency: f64,
    visibility: f64,
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let file = config::load_file(&args.io.config)?;
    let mut echo = Echo::default();
    config::configure_threads(&args.io, &mut echo)?;

    let from_file = |s: &Option<String>| -> Result<Option<AxisSpec>> {
        match s {
            None => Ok(None),
            Some(text) => AxisSpec::from_str(text).map(Some).map_err(CliError::config),
        }
    };
    let sweep_file = file.sweep.as_ref();
    let axis1 = match (
        &args.axis1,
        sweep_file.and_then(|s| from_file(&s.axis1).transpose()),
    ) {
        (Some(a), _) => *a,
        (None, Some(a)) => a?,
        (None, None) => return Err(CliError::usage("sweep needs --axis1")),
    };
    let axis2 = match (
        &args.axis2,
        sweep_file.and_then(|s| from_file(&s.axis2).transpose()),
    ) {
        (Some(a), _) => *a,
        (None, Some(a)) => a?,
        (None, None) => return Err(CliError::usage("sweep needs --axis2")),
    };
    if axis1.axis == axis2.axis {
        return Err(CliError::usage("sweep axes must differ"));
    }
    echo.put("sweep.axis1", axis1.describe());
    echo.put("sweep.axis2", axis2.describe());

    let (split, imperfections) = config::resolve_arms(&file, &args.receiver, &mut echo)?;
    // Fixed values for whichever parameters are not swept.
    let axes = [axis1.axis, axis2.axis];
    let fixed_n = if axes.contains(&SweepAxis::MeanPhotonNumber) {
        f64::NAN
    } else {
        config::resolve_photon_number(&file, &args.receiver, &mut echo)?
    };
    let (path, format) = config::resolve_output(&file, &args.io)?;

    let values1 = axis1.values()?;
    let values2 = axis2.values()?;

    let inner_len = values2.len();
    let cells: Vec<(usize, f64, f64)> = values1
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| {
            values2
                .iter()
                .enumerate()
                .map(move |(j, &b)| (i * inner_len + j, a, b))
        })
        .collect();

    let evaluate = |a: f64, b: f64| -> Result<(f64, bool)> {
        let mut params = CellParams {
            n: fixed_n,
            efficiency: f64::NAN,
            visibility: f64::NAN,
        };
        for (axis, value) in [(axis1.axis, a), (axis2.axis, b)] {
            match axis {
                SweepAxis::Visibility => params.visibility = value,
                SweepAxis::Efficiency => params.efficiency = value,
                SweepAxis::MeanPhotonNumber => params.n = value,
            }
        }
        let arm_params = [0, 1, 2].map(|i| {
            let base = imperfections[i];
            ArmImperfections::new(
                if params.efficiency.is_nan() {
                    base.efficiency
                } else {
                    params.efficiency
                },
                base.dark_mean,
                if params.visibility.is_nan() {
                    base.visibility
                } else {
                    params.visibility
                },
            )
        });
        let resolved = config::ResolvedReceiver {
            mean_photon_number: params.n,
            split,
            imperfections: arm_params,
        };
        let p_error = optimize_displacements(&resolved.config([0.0; 3])?)?.p_error;
        let p_het = heterodyne_limit(params.n)?;
        let log_ratio = (p_error / p_het).log10();
        let clipped = !log_ratio.is_finite() || log_ratio > CLIP_THRESHOLD;
        let value = if args.raw_ratio {
            p_error / p_het
        } else {
            log_ratio
        };
        Ok((value, clipped))
    };

    // Parallel over cells; output order stays axis1-major by cell index.
    let mut results: Vec<(usize, f64, f64, f64, bool)> = cells
        .par_iter()
        .map(|&(index, a, b)| {
            let (value, clipped) = evaluate(a, b)?;
            Ok((index, a, b, value, clipped))
        })
        .collect::<Result<Vec<_>>>()?;
    results.sort_by_key(|r| r.0);

    let mut table = Table::new(vec![
        axis1.axis.name(),
        axis2.axis.name(),
        if args.raw_ratio {
            "ratio"
        } else {
            "log10_ratio"
        },
        "clipped",
    ]);
    table.echo = echo.0;
    for (_, a, b, value, clipped) in results {
        table.push_row(vec![json!(a), json!(b), json!(value), json!(clipped)]);
    }
    emit(&path, &table.render(format))
}
