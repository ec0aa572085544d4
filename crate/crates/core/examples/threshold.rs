//! Critical drive and bistability window for the YIG/waveguide parameters,
//! with and without a coherent coupling admixture.

use magnon_bistability::params::{mhz, nhz, YigParams};
use magnon_bistability::steadystate::critical_intensity;
use magnon_bistability::{critical_power, threshold_ratio, turning_points, SystemParams};

fn main() -> magnon_bistability::Result<()> {
    let gamma0 = mhz(5.0);
    let coupling = mhz(5.0);
    let gamma = gamma0 + coupling;
    let sys = SystemParams::symmetric(gamma0, coupling, -8.0 * gamma, nhz(42.1));
    let kappa = YigParams::default().kappa();

    let ic = critical_power(&sys)?;
    println!("I_c = {ic:.4e} rad²/s²  (D_p ≈ {:.3} mW)", 1e3 * ic / (kappa * kappa));

    let w = turning_points(&sys)?;
    let (lo, hi) = w.intensity_range();
    println!("window at δ = -8γ: I ∈ [{lo:.4e}, {hi:.4e}], I/I_c ∈ [{:.2}, {:.2}]", lo / ic, hi / ic);

    for g_over_gamma in [0.0, 0.5, 1.0, 2.0] {
        let g = g_over_gamma * coupling;
        let ic_g = critical_intensity(gamma, coupling, g, sys.kerr)?;
        println!(
            "g/Γ = {g_over_gamma:.1}: I_c = {ic_g:.4e}, ratio to g = 0 threshold {:.4}",
            threshold_ratio(gamma, coupling, g)
        );
    }
    Ok(())
}
