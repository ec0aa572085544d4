//! Lab-unit conversions for a 1 mm YIG sphere: collective spin, pump drive
//! constant and the probe amplitude of a 1 fW tone.

use magnon_bistability::params::{mhz, omega_from_power, power_from_omega, to_mhz, UnitScale, YigParams};
use magnon_bistability::spectroscopy::probe_epsilon;

fn main() -> magnon_bistability::Result<()> {
    let yig = YigParams::default();
    println!("collective spin S = {:.4e}", yig.collective_spin()?);
    println!("drive constant κ = {:.4e} (rad/s)/√W", yig.kappa());

    for mw in [1.0, 10.0, 40.0] {
        let omega = omega_from_power(mw * 1e-3, &yig)?;
        println!("{mw:>5} mW -> Ω = {omega:.4e} rad/s -> {:.3} mW", 1e3 * power_from_omega(omega, &yig));
    }

    let eps = probe_epsilon(1e-15, mhz(5.0), 2.0 * std::f64::consts::PI * 10e9)?;
    println!("1 fW probe at 10 GHz: ε = {eps:.4e} rad/s");

    let scale = UnitScale::new(mhz(20.0))?;
    println!("δ = -4 display units = {:.1} MHz", to_mhz(scale.unscaled(-4.0)));
    Ok(())
}
