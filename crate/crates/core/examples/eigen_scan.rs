//! Fluctuation eigenvalues along a detuning sweep at fixed drive, and the
//! exceptional point of the undriven system.

use magnon_bistability::params::{mhz, nhz};
use magnon_bistability::spectroscopy::linspace;
use magnon_bistability::steadystate::follow_delta;
use magnon_bistability::{build_hnl, critical_power, eigenvalues, PumpSpec, SystemParams};
use num_complex::Complex64;

fn main() -> magnon_bistability::Result<()> {
    let gamma0 = mhz(5.0);
    let coupling = gamma0;
    let gamma = gamma0 + coupling;
    let sys = SystemParams::symmetric(gamma0, coupling, 0.0, nhz(42.1));

    println!("undriven, around |δ| = 2Γ:");
    for d in [1.9, 2.0, 2.1] {
        let e = eigenvalues(&build_hnl(&sys.with_delta(-d * coupling), Complex64::new(0.0, 0.0)))?;
        println!("  δ/Γ = -{d}: {:?}", e.values.map(|z| (z.re / gamma, z.im / gamma)));
    }

    let pump = PumpSpec::from_intensity(0.8 * critical_power(&sys.with_delta(-8.0 * gamma))?)?;
    let deltas = linspace(-20.0 * gamma, -2.0 * gamma, 19);
    let branches = follow_delta(&sys, &pump, &deltas)?;
    println!("driven at 0.8 I_c:");
    for (d, b) in deltas.iter().zip(&branches) {
        let e = eigenvalues(&build_hnl(&sys.with_delta(*d), b.b0))?;
        println!("  δ/2γ = {:+.2}  min linewidth = {:.4}γ", d / (2.0 * gamma), e.min_linewidth() / gamma);
    }
    Ok(())
}
