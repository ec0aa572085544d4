//! |t| over detuning and probe detuning, evaluated through the same sweep
//! engine the command-line `map2d` uses, printed as CSV.

use magnon_bistability::cli::config::{Axis, RunConfig};
use magnon_bistability::cli::sweep::{map2d, with_pool, Quantity};
use magnon_bistability::spectroscopy::linspace;

fn main() -> magnon_bistability::Result<()> {
    let cfg = RunConfig {
        pump_mw: Some(5.0),
        ..RunConfig::default()
    };
    let deltas = linspace(-8.0, -2.0, 7);
    let probes = linspace(-3.0, 3.0, 13);
    let table = with_pool(Some(2), || map2d(&cfg, Axis::Delta, &deltas, Axis::DeltaP, &probes, Quantity::AbsT))??;
    print!("{}", table.to_csv());
    Ok(())
}
