use clap::Args;
use serde_json::json;

use qpsk_receiver::optimizer::{error_curve, CurveTemplate};

use crate::config::{self, BetaArgs, Echo, GridSpec, IoArgs, ReceiverArgs};
use crate::error::Result;
use crate::output::{emit, Table};

/// Error probability of the receiver along a photon-number grid.
#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Photon-number grid as min:max:points[:log|:linear].
    #[arg(long, value_name = "SPEC")]
    pub grid: Option<GridSpec>,
    #[command(flatten)]
    pub receiver: ReceiverArgs,
    #[command(flatten)]
    pub beta: BetaArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

pub fn run(args: &CurveArgs) -> Result<()> {
    let file = config::load_file(&args.io.config)?;
    let mut echo = Echo::default();
    config::configure_threads(&args.io, &mut echo)?;
    let grid = config::resolve_grid(&file, &args.grid, &mut echo)?;
    let (split, imperfections) = config::resolve_arms(&file, &args.receiver, &mut echo)?;
    let beta_policy = config::resolve_beta(&file, &args.beta, &mut echo)?;
    let (path, format) = config::resolve_output(&file, &args.io)?;

    let template = CurveTemplate::new(split, imperfections, beta_policy);
    let points = error_curve(&grid, &template)?;

    let mut table = Table::new(vec![
        "mean_photon_number",
        "p_error",
        "ratio_1",
        "ratio_2",
        "ratio_3",
        "split_1",
        "split_2",
        "split_3",
    ]);
    table.echo = echo.0;
    for p in points {
        table.push_row(vec![
            json!(p.mean_photon_number),
            json!(p.p_error),
            json!(p.ratios[0]),
            json!(p.ratios[1]),
            json!(p.ratios[2]),
            json!(p.split[0]),
            json!(p.split[1]),
            json!(p.split[2]),
        ]);
    }
    emit(&path, &table.render(format))
}
