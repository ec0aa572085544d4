//! Narrowest fluctuation mode above threshold and the probe gain and
//! sensitivity it produces.

use magnon_bistability::params::{mhz, nhz, YigParams};
use magnon_bistability::spectroscopy::linspace;
use magnon_bistability::{long_lived_mode_scan, sensitivity, transmission, PumpSpec, SystemParams};
use num_complex::Complex64;

fn main() -> magnon_bistability::Result<()> {
    let gamma0 = mhz(5.0);
    let gamma = 2.0 * gamma0;
    let sys = SystemParams::symmetric(gamma0, gamma0, 0.0, nhz(42.1));
    let pump = PumpSpec::from_power(0.02, &YigParams::default())?;
    let grid = linspace(-20.0 * gamma, -2.0 * gamma, 181);

    let ll = long_lived_mode_scan(&sys, &pump, &grid)?;
    let at = sys.with_delta(ll.delta);
    let soft = ll.eigs.values[ll.eigs.softest()];
    println!("δ/2γ = {:.4}, min linewidth = {:.3e}γ", ll.delta / (2.0 * gamma), ll.min_linewidth / gamma);

    let t = transmission(&at, ll.branch.b0, soft.re, 1.0)?;
    let s = sensitivity(&at, ll.branch.b0, soft.re)?;
    let s0 = sensitivity(&at, Complex64::new(0.0, 0.0), soft.re)?;
    println!("|t| at δ_p = Re λ: {:.4e}", t.magnitude);
    println!("|∂t/∂δ_p| gain over undriven: {:.3e}", s.norm() / s0.norm());
    Ok(())
}
