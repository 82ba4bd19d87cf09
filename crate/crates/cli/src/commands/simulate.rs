use clap::Args;
use serde_json::json;

use qpsk_receiver::montecarlo::{simulate_parallel, RNG_ALGORITHM};
use qpsk_receiver::optimizer::{optimize_displacements, BetaPolicy};

use crate::config::{self, BetaArgs, Echo, IoArgs, ReceiverArgs};
use crate::error::{CliError, Result};
use crate::output::{emit, Table};

const DEFAULT_TRIALS: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 0;

/// Monte Carlo simulation of single-shot detection trials.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed (the default is recorded in the output).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub receiver: ReceiverArgs,
    #[command(flatten)]
    pub beta: BetaArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let file = config::load_file(&args.io.config)?;
    let mut echo = Echo::default();
    config::configure_threads(&args.io, &mut echo)?;
    let n = config::resolve_photon_number(&file, &args.receiver, &mut echo)?;
    let (split, imperfections) = config::resolve_arms(&file, &args.receiver, &mut echo)?;
    let beta_policy = config::resolve_beta(&file, &args.beta, &mut echo)?;
    let (path, format) = config::resolve_output(&file, &args.io)?;

    let mc = file.montecarlo.as_ref();
    let trials = args
        .trials
        .or_else(|| mc.and_then(|s| s.trials))
        .unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let seed = args
        .seed
        .or_else(|| mc.and_then(|s| s.seed))
        .unwrap_or(DEFAULT_SEED);
    echo.put("montecarlo.trials", trials.to_string());
    echo.put("montecarlo.seed", seed.to_string());
    echo.put("montecarlo.rng", RNG_ALGORITHM);

    let resolved = config::ResolvedReceiver {
        mean_photon_number: n,
        split,
        imperfections,
    };
    let betas = match beta_policy {
        BetaPolicy::Optimized => optimize_displacements(&resolved.config([0.0; 3])?)?.beta_mags,
        BetaPolicy::FixedRatios(ratios) => [0, 1, 2].map(|i| (ratios[i] * split[i] * n).sqrt()),
    };
    echo.put_triple("beta.magnitudes", betas);

    let cfg = resolved.config(betas)?;
    let report = simulate_parallel(&cfg, trials, seed)?;

    let mut columns = vec!["trials", "errors", "p_error_estimate", "std_error", "seed"];
    const CONFUSION: [&str; 16] = [
        "confusion_0_0",
        "confusion_0_1",
        "confusion_0_2",
        "confusion_0_3",
        "confusion_1_0",
        "confusion_1_1",
        "confusion_1_2",
        "confusion_1_3",
        "confusion_2_0",
        "confusion_2_1",
        "confusion_2_2",
        "confusion_2_3",
        "confusion_3_0",
        "confusion_3_1",
        "confusion_3_2",
        "confusion_3_3",
    ];
    columns.extend(CONFUSION);
    let mut table = Table::new(columns);
    table.echo = echo.0;
    let mut row = vec![
        json!(report.trials),
        json!(report.errors),
        json!(report.p_error_estimate),
        json!(report.std_error),
        json!(report.seed),
    ];
    for sent in 0..4 {
        for decided in 0..4 {
            row.push(json!(report.per_state_confusion[sent][decided]));
        }
    }
    table.push_row(row);
    emit(&path, &table.render(format))
}
