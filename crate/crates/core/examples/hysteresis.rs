//! Up and down drive sweeps across the bistable window, reporting where the
//! followed branch jumps.

use magnon_bistability::params::{mhz, nhz};
use magnon_bistability::spectroscopy::linspace;
use magnon_bistability::{hysteresis_sweep, turning_points, SweepDirection, SystemParams};

fn main() -> magnon_bistability::Result<()> {
    let gamma0 = mhz(5.0);
    let sys = SystemParams::symmetric(gamma0, mhz(5.0), -16.0 * gamma0, nhz(42.1));
    let (lo, hi) = turning_points(&sys)?.intensity_range();
    let grid = linspace(0.0, 1.5 * hi, 601);

    for dir in [SweepDirection::Up, SweepDirection::Down] {
        let curve = hysteresis_sweep(&sys, &grid, dir)?;
        if let Some(k) = curve.largest_jump() {
            let (before, after) = (&curve.samples[k], &curve.samples[k + 1]);
            println!(
                "{:>4}: jump between I = {:.4e} and {:.4e}, y {:.3e} -> {:.3e}",
                dir.as_str(),
                before.intensity,
                after.intensity,
                before.y,
                after.y
            );
        }
    }
    println!("window edges: I_lo = {lo:.4e}, I_hi = {hi:.4e}");
    Ok(())
}
