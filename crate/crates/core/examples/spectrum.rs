//! Probe transmission on the lower stable branch below threshold, with the
//! two polariton dips located.

use magnon_bistability::params::{mhz, nhz};
use magnon_bistability::spectroscopy::default_probe_grid;
use magnon_bistability::{critical_power, find_polariton_minima, spectrum, steady_states, PumpSpec, SystemParams};

fn main() -> magnon_bistability::Result<()> {
    let gamma0 = mhz(5.0);
    let gamma = 2.0 * gamma0;
    let sys = SystemParams::symmetric(gamma0, gamma0, -4.0 * gamma, nhz(42.1));
    let pump = PumpSpec::from_intensity(0.5 * critical_power(&sys)?)?;
    let branch = steady_states(&sys, &pump)?
        .into_iter()
        .find(|b| b.stable)
        .expect("a stable state below threshold");

    let sp = spectrum(&sys, branch.b0, &default_probe_grid(gamma), 1.0)?;
    let (lp, hp) = find_polariton_minima(&sp)?;
    println!("δ_LP/γ = {:.4}, δ_HP/γ = {:.4}", lp / gamma, hp / gamma);
    println!("max |t| = {:.4}", sp.max_magnitude());
    for p in sp.points.iter().step_by(200) {
        println!("δ_p/γ = {:+.2}  |t| = {:.4}", p.delta_p / gamma, p.magnitude);
    }
    Ok(())
}
