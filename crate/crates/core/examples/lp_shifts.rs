//! Lower-polariton shift against drive, traced up and down through the
//! bistable window.

use magnon_bistability::params::{mhz, nhz};
use magnon_bistability::spectroscopy::{default_probe_grid, linspace};
use magnon_bistability::{lp_shift_curve, turning_points, SweepDirection, SystemParams};

fn main() -> magnon_bistability::Result<()> {
    let gamma0 = mhz(5.0);
    let gamma = 2.0 * gamma0;
    let sys = SystemParams::symmetric(gamma0, gamma0, -8.0 * gamma, nhz(42.1));
    let (_, hi) = turning_points(&sys)?.intensity_range();
    let omegas = linspace(0.0, 1.3 * hi.sqrt(), 41);
    let probe = default_probe_grid(gamma);

    for dir in [SweepDirection::Up, SweepDirection::Down] {
        let curve = lp_shift_curve(&sys, &omegas, dir, &probe)?;
        println!("{} (δ_LP at zero drive = {:.3}γ)", dir.as_str(), curve.delta_lp0 / gamma);
        for s in curve.samples.iter().step_by(5) {
            println!("  Ω = {:.3e}  shift = {:+.4}γ  branch {}", s.omega, s.shift / gamma, s.branch_index);
        }
    }
    Ok(())
}
