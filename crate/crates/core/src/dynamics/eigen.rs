//! Eigenvalues of 4×4 complex matrices via the characteristic polynomial.
//!
//! Faddeev–LeVerrier gives the coefficients, Ferrari's formulas give starting
//! roots, and Newton polishing on the characteristic polynomial brings them to
//! working precision. Roots that agree to rounding level in both `p` and its
//! derivatives are merged into a multiple root (this is what makes exceptional
//! points come out exactly degenerate). If polishing stalls, the roots are
//! recomputed by argument-principle subdivision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4};
use crate::poly;

/// Characteristic polynomial `det(λI − A)` coefficients, lowest degree first.
pub fn characteristic_polynomial(a: &Mat4) -> [Complex64; 5] {
    let mut c = [Complex64::new(0.0, 0.0); 5];
    c[4] = Complex64::new(1.0, 0.0);
    let mut m = linalg::zeros();
    for k in 1..=4 {
        let mut next = linalg::matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c[4 - k + 1];
        }
        m = next;
        let am = linalg::matmul(a, &m);
        c[4 - k] = -linalg::trace(&am) / k as f64;
    }
    c
}

/// Unsorted eigenvalues of `a`.
pub fn eigenvalues_raw(a: &Mat4) -> Result<[Complex64; 4]> {
    let scale = linalg::max_abs(a);
    if scale == 0.0 {
        return Ok([Complex64::new(0.0, 0.0); 4]);
    }
    let an: Mat4 = a.map(|row| row.map(|z| z / scale));
    let coeffs = characteristic_polynomial(&an);
    let trace = linalg::trace(&an);

    let start = poly::ferrari_quartic(coeffs[3], coeffs[2], coeffs[1], coeffs[0]);
    let mut roots = start.map(|z| {
        if z.is_finite() {
            poly::newton_polish_complex(&coeffs, z, 80)
        } else {
            z
        }
    });
    merge_multiple_roots(&coeffs, &mut roots);

    if !acceptable(&coeffs, &roots, trace) {
        let found = poly::argument_principle_roots(&coeffs);
        if found.len() == 4 {
            let mut alt = [found[0], found[1], found[2], found[3]];
            merge_multiple_roots(&coeffs, &mut alt);
            if acceptable(&coeffs, &alt, trace) {
                roots = alt;
            } else {
                return Err(Error::NonConvergence(max_residual(&coeffs, &alt)));
            }
        } else {
            return Err(Error::NonConvergence(max_residual(&coeffs, &roots)));
        }
    }
    Ok(roots.map(|z| z * scale))
}

fn max_residual(coeffs: &[Complex64], roots: &[Complex64; 4]) -> f64 {
    roots
        .iter()
        .map(|z| poly::eval_complex(coeffs, *z).norm())
        .fold(0.0, f64::max)
}

/// Residual below 1e-9 (normalized units, i.e. 1e-9‖A‖⁴) and a root sum that
/// reproduces the trace, which rules out two starts collapsing onto one root.
fn acceptable(coeffs: &[Complex64], roots: &[Complex64; 4], trace: Complex64) -> bool {
    if roots.iter().any(|z| !z.is_finite()) {
        return false;
    }
    let sum: Complex64 = roots.iter().sum();
    max_residual(coeffs, roots) <= 1e-9 && (sum - trace).norm() <= 1e-10 * trace.norm().max(1.0)
}

fn merge_multiple_roots(coeffs: &[Complex64; 5], roots: &mut [Complex64; 4]) {
    const CLUSTER_RADIUS: f64 = 1e-4;
    let mut group = [0usize, 1, 2, 3];
    for i in 0..4 {
        for j in i + 1..4 {
            if (roots[i] - roots[j]).norm() <= CLUSTER_RADIUS {
                let (gi, gj) = (group[i], group[j]);
                for g in group.iter_mut() {
                    if *g == gj {
                        *g = gi;
                    }
                }
            }
        }
    }
    for leader in 0..4 {
        let members: Vec<usize> = (0..4).filter(|&k| group[k] == leader).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let centroid: Complex64 = members.iter().map(|&k| roots[k]).sum::<Complex64>() / m as f64;
        let mut d: Vec<Complex64> = coeffs.to_vec();
        for _ in 0..m - 1 {
            d = poly::derivative_complex(&d);
        }
        let z = poly::newton_polish_complex(&d, centroid, 60);
        // Multiplicity m requires p, p', ..., p^(m-1) to vanish at z.
        let mut p = coeffs.to_vec();
        let mut multiple = true;
        for _ in 0..m - 1 {
            let val = poly::eval_complex(&p, z).norm();
            if val > 64.0 * f64::EPSILON * poly::rounding_scale_complex(&p, z) {
                multiple = false;
                break;
            }
            p = poly::derivative_complex(&p);
        }
        if multiple {
            for &k in &members {
                roots[k] = z;
            }
        }
    }
}
