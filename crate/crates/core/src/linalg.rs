//! Fixed-size 4×4 complex linear algebra: LU with partial pivoting, solves,
//! determinants and inverses.

use num_complex::Complex64;

pub type Mat4 = [[Complex64; 4]; 4];
pub type Vec4 = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn zeros() -> Mat4 {
    [[ZERO; 4]; 4]
}

pub fn identity() -> Mat4 {
    let mut m = zeros();
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ONE;
    }
    m
}

pub fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn matvec(a: &Mat4, x: &Vec4) -> Vec4 {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(x).map(|(m, v)| m * v).sum();
    }
    out
}

pub fn trace(a: &Mat4) -> Complex64 {
    (0..4).map(|k| a[k][k]).sum()
}

/// Largest entry magnitude.
pub fn max_abs(a: &Mat4) -> f64 {
    a.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn norm_one(a: &Mat4) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn vec_norm(x: &Vec4) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Packed LU factors with row permutation; `L` has a unit diagonal.
#[derive(Debug, Clone)]
pub struct Lu4 {
    lu: Mat4,
    perm: [usize; 4],
    swaps: usize,
    anorm: f64,
}

/// Pivot index at which elimination found a (numerically) zero column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular(pub usize);

impl Lu4 {
    pub fn factor(a: &Mat4) -> Result<Self, Singular> {
        let anorm = max_abs(a);
        let tiny = 4.0 * f64::EPSILON * anorm;
        let mut lu = *a;
        let mut perm = [0, 1, 2, 3];
        let mut swaps = 0;
        for k in 0..4 {
            let p = (k..4)
                .max_by(|&i, &j| lu[i][k].norm().total_cmp(&lu[j][k].norm()))
                .unwrap_or(k);
            if lu[p][k].norm() <= tiny || anorm == 0.0 {
                return Err(Singular(k));
            }
            if p != k {
                lu.swap(p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let pivot = lu[k][k];
            for i in k + 1..4 {
                let f = lu[i][k] / pivot;
                lu[i][k] = f;
                for j in k + 1..4 {
                    let t = f * lu[k][j];
                    lu[i][j] -= t;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            swaps,
            anorm,
        })
    }

    pub fn solve(&self, b: &Vec4) -> Vec4 {
        let mut x = [ZERO; 4];
        for i in 0..4 {
            x[i] = b[self.perm[i]];
        }
        for i in 0..4 {
            for j in 0..i {
                let t = self.lu[i][j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..4).rev() {
            for j in i + 1..4 {
                let t = self.lu[i][j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[i][i];
        }
        x
    }

    pub fn det(&self) -> Complex64 {
        let d: Complex64 = (0..4).map(|k| self.lu[k][k]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn inverse(&self) -> Mat4 {
        let mut inv = zeros();
        for j in 0..4 {
            let mut e = [ZERO; 4];
            e[j] = ONE;
            let col = self.solve(&e);
            for i in 0..4 {
                inv[i][j] = col[i];
            }
        }
        inv
    }

    /// ‖A‖₁‖A⁻¹‖₁.
    pub fn condition_one(&self, a: &Mat4) -> f64 {
        norm_one(a) * norm_one(&self.inverse())
    }

    pub fn matrix_scale(&self) -> f64 {
        self.anorm
    }
}

/// Solves `a x = b` with one step of iterative refinement.
pub fn solve_refined(a: &Mat4, b: &Vec4) -> Result<Vec4, Singular> {
    let lu = Lu4::factor(a)?;
    let mut x = lu.solve(b);
    let ax = matvec(a, &x);
    let r: Vec4 = std::array::from_fn(|i| b[i] - ax[i]);
    let dx = lu.solve(&r);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok(x)
}

/// Determinant by LU; zero when elimination meets an exactly zero column.
pub fn det(a: &Mat4) -> Complex64 {
    let mut lu = *a;
    let mut sign = ONE;
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&i, &j| lu[i][k].norm().total_cmp(&lu[j][k].norm()))
            .unwrap_or(k);
        if lu[p][k].norm() == 0.0 {
            return ZERO;
        }
        if p != k {
            lu.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..4 {
            let f = lu[i][k] / lu[k][k];
            for j in k..4 {
                let t = f * lu[k][j];
                lu[i][j] -= t;
            }
        }
    }
    sign * (0..4).map(|k| lu[k][k]).product::<Complex64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng) -> Mat4 {
        std::array::from_fn(|_| {
            std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
    }

    #[test]
    fn solve_residual_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_matrix(&mut rng);
            let b: Vec4 = std::array::from_fn(|_| Complex64::new(rng.gen(), rng.gen()));
            let x = solve_refined(&a, &b).unwrap();
            let ax = matvec(&a, &x);
            let r: Vec4 = std::array::from_fn(|i| ax[i] - b[i]);
            assert!(vec_norm(&r) <= 1e-12 * vec_norm(&b));
        }
    }

    #[test]
    fn inverse_and_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng);
        let lu = Lu4::factor(&a).unwrap();
        let p = matmul(&a, &lu.inverse());
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { ONE } else { ZERO };
                assert!((p[i][j] - e).norm() < 1e-12);
            }
        }
        assert!((lu.det() - det(&a)).norm() < 1e-12 * det(&a).norm());
        // Diagonal-ish check against the explicit product.
        let mut d = identity();
        d[0][0] = Complex64::new(2.0, 1.0);
        d[3][3] = Complex64::new(0.0, -3.0);
        d[0][3] = Complex64::new(5.0, 0.0);
        assert!((det(&d) - Complex64::new(2.0, 1.0) * Complex64::new(0.0, -3.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_detected() {
        let mut a = identity();
        a[2][2] = ZERO;
        assert_eq!(Lu4::factor(&a).unwrap_err(), Singular(2));
        assert_eq!(det(&a), ZERO);
        assert!(Lu4::factor(&zeros()).is_err());
    }
}
