//! Configuration resolution: a TOML file provides defaults, command-line
//! flags override them, and every resolved value is echoed into the output
//! header for provenance.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use serde::Deserialize;

use qpsk_receiver::model::{Alphabet, ArmConfig, ReceiverConfig, ARM_PHASES};
use qpsk_receiver::optimizer::{ArmImperfections, BetaPolicy};

use crate::error::{CliError, Result};
use crate::output::{fmt_f64, OutputFormat};

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alphabet: Option<AlphabetSection>,
    pub grid: Option<GridSection>,
    pub arms: Option<ArmsSection>,
    pub beta: Option<BetaSection>,
    pub montecarlo: Option<MonteCarloSection>,
    pub sweep: Option<SweepSection>,
    pub calibration: Option<CalibrationSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSection {
    pub mean_photon_number: Option<f64>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmsSection {
    pub split: Option<Vec<f64>>,
    pub efficiency: Option<Vec<f64>>,
    pub dark_mean: Option<Vec<f64>>,
    pub visibility: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaSection {
    pub policy: Option<String>, // "optimize" | "fixed"
    pub ratios: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis1: Option<String>,
    pub axis2: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    pub input: Option<PathBuf>,
    pub arm: Option<usize>,
    pub targets: Option<Vec<f64>>,
    pub normalization: Option<String>, // "input-power" | "pass-through"
    pub field_ratio: Option<f64>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<String>, // "csv" | "json"
}

pub fn load_file(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
        }
    }
}

// ---------------------------------------------------------------------------
// Shared flag groups
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Configuration file (TOML); flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for parallel evaluation (default: all cores; the
    /// QPSK_RECEIVER_THREADS environment variable applies when this flag is
    /// absent).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReceiverArgs {
    /// Mean photon number of the input alphabet.
    #[arg(long, short = 'n', value_name = "N")]
    pub mean_photon_number: Option<f64>,
    /// Field amplitude of the input alphabet (|alpha|; mutually exclusive
    /// with --mean-photon-number).
    #[arg(long, value_name = "A")]
    pub amplitude: Option<f64>,
    /// Splitting ratios, one value per arm (single value broadcasts).
    #[arg(long, value_delimiter = ',', value_name = "R1,R2,R3")]
    pub split: Option<Vec<f64>>,
    /// Detection efficiency per arm (single value broadcasts).
    #[arg(long, value_delimiter = ',', value_name = "E1,E2,E3")]
    pub efficiency: Option<Vec<f64>>,
    /// Mean dark counts per pulse per arm (single value broadcasts).
    #[arg(long, value_delimiter = ',', value_name = "V1,V2,V3")]
    pub dark_mean: Option<Vec<f64>>,
    /// Displacement visibility per arm (single value broadcasts).
    #[arg(long, value_delimiter = ',', value_name = "X1,X2,X3")]
    pub visibility: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    /// Displacement policy: re-optimize per point or use fixed ratios.
    #[arg(long, value_parser = ["optimize", "fixed"])]
    pub beta_policy: Option<String>,
    /// Fixed displacement power ratios (with --beta-policy fixed).
    #[arg(long, value_delimiter = ',', value_name = "B1,B2,B3")]
    pub beta_ratios: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Grid specification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub const DEFAULT: Self = Self {
        min: 0.1,
        max: 20.0,
        points: 100,
        spacing: Spacing::Log,
    };

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(CliError::usage("grid needs at least one point"));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        if !(self.max > self.min) {
            return Err(CliError::usage(format!(
                "grid max {} must exceed min {}",
                self.max, self.min
            )));
        }
        let n = self.points;
        let values = match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
            Spacing::Log => {
                if self.min <= 0.0 {
                    return Err(CliError::usage("log-spaced grid needs min > 0"));
                }
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        };
        Ok(values)
    }

    pub fn describe(&self) -> String {
        format!(
            "{}:{}:{}:{}",
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

impl FromStr for GridSpec {
    type Err = String;

    /// `min:max:points[:log|:linear]`
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(format!("expected min:max:points[:spacing], got `{s}`"));
        }
        let min: f64 = parts[0].parse().map_err(|e| format!("grid min: {e}"))?;
        let max: f64 = parts[1].parse().map_err(|e| format!("grid max: {e}"))?;
        let points: usize = parts[2].parse().map_err(|e| format!("grid points: {e}"))?;
        let spacing = match parts.get(3).copied() {
            None | Some("log") => Spacing::Log,
            Some("linear") => Spacing::Linear,
            Some(other) => return Err(format!("unknown spacing `{other}`")),
        };
        Ok(GridSpec {
            min,
            max,
            points,
            spacing,
        })
    }
}

// ---------------------------------------------------------------------------
// Resolution with provenance echo
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
pub struct Echo(pub Vec<(String, String)>);

impl Echo {
    pub fn put(&mut self, key: &str, value: impl Into<String>) {
        self.0.push((key.to_string(), value.into()));
    }

    pub fn put_f64(&mut self, key: &str, value: f64) {
        self.put(key, fmt_f64(value));
    }

    pub fn put_triple(&mut self, key: &str, values: [f64; 3]) {
        self.put(key, values.map(fmt_f64).join(","));
    }
}

fn per_arm(name: &'static str, values: &[f64]) -> Result<[f64; 3]> {
    match values {
        [v] => Ok([*v; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        other => Err(CliError::usage(format!(
            "--{name} takes one or three comma-separated values, got {}",
            other.len()
        ))),
    }
}

/// Resolved physical receiver parameters (before displacement choice).
#[derive(Debug, Clone, Copy)]
pub struct ResolvedReceiver {
    pub mean_photon_number: f64,
    pub split: [f64; 3],
    pub imperfections: [ArmImperfections; 3],
}

impl ResolvedReceiver {
    pub fn config(&self, betas: [f64; 3]) -> Result<ReceiverConfig> {
        let alphabet = Alphabet::from_mean_photon_number(self.mean_photon_number)?;
        let arms = [0, 1, 2].map(|i| ArmConfig {
            split_ratio: self.split[i],
            hypothesis_phase: ARM_PHASES[i],
            beta_mag: betas[i],
            efficiency: self.imperfections[i].efficiency,
            dark_mean: self.imperfections[i].dark_mean,
            visibility: self.imperfections[i].visibility,
        });
        Ok(ReceiverConfig::new(alphabet, arms)?)
    }
}

/// Resolve the single-point alphabet: exactly one of amplitude and mean
/// photon number, flags over file.
pub fn resolve_photon_number(
    file: &FileConfig,
    args: &ReceiverArgs,
    echo: &mut Echo,
) -> Result<f64> {
    if args.mean_photon_number.is_some() && args.amplitude.is_some() {
        return Err(CliError::usage(
            "--mean-photon-number and --amplitude are mutually exclusive",
        ));
    }
    let section = file.alphabet.as_ref();
    let n =
        if let Some(n) = args.mean_photon_number {
            n
        } else if let Some(a) = args.amplitude {
            a * a
        } else {
            match (
                section.and_then(|s| s.mean_photon_number),
                section.and_then(|s| s.amplitude),
            ) {
                (Some(_), Some(_)) => {
                    return Err(CliError::config(
                        "[alphabet] must set exactly one of mean_photon_number and amplitude",
                    ))
                }
                (Some(n), None) => n,
                (None, Some(a)) => a * a,
                (None, None) => return Err(CliError::usage(
                    "no input power given: pass --mean-photon-number/--amplitude or set [alphabet]",
                )),
            }
        };
    if !(n.is_finite() && n >= 0.0) {
        return Err(CliError::usage(format!(
            "mean photon number {n} must be >= 0"
        )));
    }
    echo.put_f64("alphabet.mean_photon_number", n);
    Ok(n)
}

/// Resolve per-arm splitting and detector parameters.
pub fn resolve_arms(
    file: &FileConfig,
    args: &ReceiverArgs,
    echo: &mut Echo,
) -> Result<([f64; 3], [ArmImperfections; 3])> {
    let section = file.arms.as_ref();
    let pick = |flag: &Option<Vec<f64>>,
                from_file: Option<&Vec<f64>>,
                name: &'static str,
                default: [f64; 3]|
     -> Result<[f64; 3]> {
        if let Some(values) = flag {
            per_arm(name, values)
        } else if let Some(values) = from_file {
            per_arm(name, values)
        } else {
            Ok(default)
        }
    };
    let split = pick(
        &args.split,
        section.and_then(|s| s.split.as_ref()),
        "split",
        [0.4, 0.2, 0.4],
    )?;
    let efficiency = pick(
        &args.efficiency,
        section.and_then(|s| s.efficiency.as_ref()),
        "efficiency",
        [1.0; 3],
    )?;
    let dark_mean = pick(
        &args.dark_mean,
        section.and_then(|s| s.dark_mean.as_ref()),
        "dark-mean",
        [0.0; 3],
    )?;
    let visibility = pick(
        &args.visibility,
        section.and_then(|s| s.visibility.as_ref()),
        "visibility",
        [1.0; 3],
    )?;
    echo.put_triple("arms.split", split);
    echo.put_triple("arms.efficiency", efficiency);
    echo.put_triple("arms.dark_mean", dark_mean);
    echo.put_triple("arms.visibility", visibility);
    let imperfections =
        [0, 1, 2].map(|i| ArmImperfections::new(efficiency[i], dark_mean[i], visibility[i]));
    Ok((split, imperfections))
}

/// Resolve the displacement policy.
pub fn resolve_beta(file: &FileConfig, args: &BetaArgs, echo: &mut Echo) -> Result<BetaPolicy> {
    let section = file.beta.as_ref();
    let policy = args
        .beta_policy
        .clone()
        .or_else(|| section.and_then(|s| s.policy.clone()))
        .unwrap_or_else(|| "optimize".to_string());
    let resolved = match policy.as_str() {
        "optimize" => BetaPolicy::Optimized,
        "fixed" => {
            let ratios = if let Some(r) = &args.beta_ratios {
                per_arm("beta-ratios", r)?
            } else if let Some(r) = section.and_then(|s| s.ratios.as_ref()) {
                per_arm("beta-ratios", r)?
            } else {
                [1.0; 3]
            };
            BetaPolicy::FixedRatios(ratios)
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown beta policy `{other}` (expected optimize|fixed)"
            )))
        }
    };
    match resolved {
        BetaPolicy::Optimized => echo.put("beta.policy", "optimize"),
        BetaPolicy::FixedRatios(r) => {
            echo.put("beta.policy", "fixed");
            echo.put_triple("beta.ratios", r);
        }
    }
    Ok(resolved)
}

/// Resolve the photon-number grid for curve-style commands.
pub fn resolve_grid(
    file: &FileConfig,
    flag: &Option<GridSpec>,
    echo: &mut Echo,
) -> Result<Vec<f64>> {
    let spec = if let Some(spec) = flag {
        *spec
    } else if let Some(section) = &file.grid {
        GridSpec {
            min: section.min,
            max: section.max,
            points: section.points,
            spacing: section.spacing,
        }
    } else {
        GridSpec::DEFAULT
    };
    echo.put("grid", spec.describe());
    spec.values()
}

/// Resolve the output sink; flag wins over file, default stdout CSV.
pub fn resolve_output(file: &FileConfig, io: &IoArgs) -> Result<(Option<PathBuf>, OutputFormat)> {
    let path = io
        .out
        .clone()
        .or_else(|| file.output.as_ref().and_then(|s| s.path.clone()));
    let format = match (
        &io.format,
        file.output.as_ref().and_then(|s| s.format.as_deref()),
    ) {
        (Some(f), _) => *f,
        (None, Some("csv")) => OutputFormat::Csv,
        (None, Some("json")) => OutputFormat::Json,
        (None, Some(other)) => {
            return Err(CliError::config(format!(
                "unknown output format `{other}` (expected csv|json)"
            )))
        }
        (None, None) => OutputFormat::Csv,
    };
    Ok((path, format))
}

/// Install the global worker pool. `--threads` wins; the environment
/// variable applies only when the flag is absent.
pub fn configure_threads(io: &IoArgs, echo: &mut Echo) -> Result<()> {
    let threads = match io.threads {
        Some(t) => Some(t),
        None => match std::env::var("QPSK_RECEIVER_THREADS") {
            Ok(value) => Some(
                value
                    .parse()
                    .map_err(|e| CliError::usage(format!("QPSK_RECEIVER_THREADS: {e}")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(threads) = threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
        echo.put("threads", threads.to_string());
    }
    Ok(())
}
