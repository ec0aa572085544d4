//! Mean-field relaxation from vacuum and from a kicked middle branch.

use magnon_bistability::params::{mhz, nhz};
use magnon_bistability::{integrate, steady_states, turning_points, PumpSpec, StateVec, SystemParams};
use num_complex::Complex64;

fn main() -> magnon_bistability::Result<()> {
    let gamma0 = mhz(5.0);
    let gamma = 2.0 * gamma0;
    let sys = SystemParams::symmetric(gamma0, gamma0, -8.0 * gamma, nhz(42.1));
    let (lo, hi) = turning_points(&sys)?.intensity_range();
    let pump = PumpSpec::from_intensity(0.5 * (lo + hi))?;
    let branches = steady_states(&sys, &pump)?;
    for b in &branches {
        println!("branch {}: |b0|² = {:.4e}, stable = {}", b.branch_index, b.x, b.stable);
    }

    let t_end = 40.0 / gamma;
    let from_vacuum = integrate(&sys, &pump, None, StateVec::default(), t_end, 1e-9)?;
    println!("from vacuum: |b|² -> {:.4e}", from_vacuum.last().1.b.norm_sqr());

    let mid = &branches[1];
    for sign in [1.0, -1.0] {
        let kick = Complex64::new(sign * 1e-3 * mid.b0.norm(), 0.0);
        let s0 = StateVec::new(mid.a0, mid.b0 + kick);
        let traj = integrate(&sys, &pump, None, s0, t_end, 1e-9)?;
        println!("middle {:+}: |b|² -> {:.4e} in {} steps", sign, traj.last().1.b.norm_sqr(), traj.steps);
    }
    Ok(())
}
