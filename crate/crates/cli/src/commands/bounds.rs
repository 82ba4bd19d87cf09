use clap::Args;
use serde_json::json;

use qpsk_receiver::bounds::{bound_curve, BoundKind};

use crate::config::{self, Echo, GridSpec, IoArgs};
use crate::error::Result;
use crate::output::{emit, Table};

/// Tabulate the Helstrom bound and the heterodyne limit (QNL).
#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Photon-number grid as min:max:points[:log|:linear].
    #[arg(long, value_name = "SPEC")]
    pub grid: Option<GridSpec>,
    #[command(flatten)]
    pub io: IoArgs,
}

pub fn run(args: &BoundsArgs) -> Result<()> {
    let file = config::load_file(&args.io.config)?;
    let mut echo = Echo::default();
    config::configure_threads(&args.io, &mut echo)?;
    let grid = config::resolve_grid(&file, &args.grid, &mut echo)?;
    let (path, format) = config::resolve_output(&file, &args.io)?;

    let helstrom = bound_curve(BoundKind::Helstrom, &grid)?;
    let heterodyne = bound_curve(BoundKind::Heterodyne, &grid)?;

    let mut table = Table::new(vec!["mean_photon_number", "helstrom", "heterodyne"]);
    table.echo = echo.0;
    for ((&n, &hel), &het) in grid.iter().zip(&helstrom.values).zip(&heterodyne.values) {
        table.push_row(vec![json!(n), json!(hel), json!(het)]);
    }
    emit(&path, &table.render(format))
}
