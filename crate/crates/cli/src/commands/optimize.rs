use clap::Args;
use serde_json::json;

use qpsk_receiver::model::Alphabet;
use qpsk_receiver::optimizer::{
    optimize_displacements, optimize_splitting, optimize_splitting_free,
};

use crate::config::{self, Echo, IoArgs, ReceiverArgs};
use crate::error::Result;
use crate::output::{emit, Table};

/// Optimize the displacement magnitudes (and optionally the splitting
/// ratios) at one operating point.
#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Jointly optimize the splitting ratios with R1 = R3 enforced.
    #[arg(long)]
    pub optimize_split: bool,
    /// Relax the R1 = R3 restriction (validation mode; implies
    /// --optimize-split).
    #[arg(long)]
    pub free_split: bool,
    #[command(flatten)]
    pub receiver: ReceiverArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

pub fn run(args: &OptimizeArgs) -> Result<()> {
    let file = config::load_file(&args.io.config)?;
    let mut echo = Echo::default();
    config::configure_threads(&args.io, &mut echo)?;
    let n = config::resolve_photon_number(&file, &args.receiver, &mut echo)?;
    let (split, imperfections) = config::resolve_arms(&file, &args.receiver, &mut echo)?;
    let (path, format) = config::resolve_output(&file, &args.io)?;

    let result = if args.free_split {
        echo.put("optimize.mode", "free-split");
        let alphabet = Alphabet::from_mean_photon_number(n)?;
        optimize_splitting_free(&alphabet, &imperfections)?
    } else if args.optimize_split {
        echo.put("optimize.mode", "split");
        let alphabet = Alphabet::from_mean_photon_number(n)?;
        optimize_splitting(&alphabet, &imperfections)?
    } else {
        echo.put("optimize.mode", "displacements");
        let resolved = config::ResolvedReceiver {
            mean_photon_number: n,
            split,
            imperfections,
        };
        optimize_displacements(&resolved.config([0.0; 3])?)?
    };

    let mut table = Table::new(vec![
        "mean_photon_number",
        "p_error",
        "beta_1",
        "beta_2",
        "beta_3",
        "ratio_1",
        "ratio_2",
        "ratio_3",
        "split_1",
        "split_2",
        "split_3",
        "evaluations",
    ]);
    table.echo = echo.0;
    table.push_row(vec![
        json!(n),
        json!(result.p_error),
        json!(result.beta_mags[0]),
        json!(result.beta_mags[1]),
        json!(result.beta_mags[2]),
        json!(result.ratios[0]),
        json!(result.ratios[1]),
        json!(result.ratios[2]),
        json!(result.split[0]),
        json!(result.split[1]),
        json!(result.split[2]),
        json!(result.evaluations),
    ]);
    emit(&path, &table.render(format))
}
