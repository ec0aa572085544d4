//! Oracles shared by the integration and acceptance targets.

use magnon_bistability::{rhs, PumpSpec, StateVec, SystemParams};
use num_complex::Complex64;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Linearization of the mean-field flow by central differences in the
/// Wirtinger sense: entry (r, c) is ∂ż_r/∂z_c for z = (a, b, a*, b*).
pub fn numerical_jacobian(sys: &SystemParams, pump: &PumpSpec, s: &StateVec) -> [[Complex64; 4]; 4] {
    let h = 1e-6 * s.norm().max(1.0);
    let f = |s: StateVec| rhs(sys, pump, None, 0.0, &s);
    let mut jac = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (col, mode) in [0usize, 1].into_iter().enumerate() {
        let shift = |d: Complex64| {
            let mut p = *s;
            if mode == 0 {
                p.a += d;
            } else {
                p.b += d;
            }
            p
        };
        let d_re_a = (f(shift(Complex64::new(h, 0.0))).a - f(shift(Complex64::new(-h, 0.0))).a) / (2.0 * h);
        let d_im_a = (f(shift(I * h)).a - f(shift(-I * h)).a) / (2.0 * h);
        let d_re_b = (f(shift(Complex64::new(h, 0.0))).b - f(shift(Complex64::new(-h, 0.0))).b) / (2.0 * h);
        let d_im_b = (f(shift(I * h)).b - f(shift(-I * h)).b) / (2.0 * h);
        // ∂/∂z = (∂x − i∂y)/2, ∂/∂z* = (∂x + i∂y)/2
        let (da_dz, da_dzc) = ((d_re_a - I * d_im_a) / 2.0, (d_re_a + I * d_im_a) / 2.0);
        let (db_dz, db_dzc) = ((d_re_b - I * d_im_b) / 2.0, (d_re_b + I * d_im_b) / 2.0);
        jac[0][col] = da_dz;
        jac[1][col] = db_dz;
        jac[0][col + 2] = da_dzc;
        jac[1][col + 2] = db_dzc;
        // Conjugate rows: ∂(ż*)/∂z = (∂ż/∂z*)*.
        jac[2][col] = da_dzc.conj();
        jac[3][col] = db_dzc.conj();
        jac[2][col + 2] = da_dz.conj();
        jac[3][col + 2] = db_dz.conj();
    }
    jac
}
