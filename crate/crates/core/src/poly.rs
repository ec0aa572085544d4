//! Polynomial root finding.
//!
//! Real cubics are solved analytically and then Newton-polished against a
//! compensated Horner residual; near-degenerate discriminants switch to
//! bisection on monotone intervals. Complex quartics use Ferrari's method
//! followed by Newton polishing, with an argument-principle subdivision as
//! the fallback when polishing stalls.

use num_complex::Complex64;

const EPS: f64 = f64::EPSILON;

/// Normalized-discriminant magnitude below which the cubic is treated as
/// near-degenerate.
pub const DEGENERATE_DISCRIMINANT: f64 = 1e-10;

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Compensated Horner evaluation of `Σ coeffs[k] x^k` (lowest degree first).
/// Accurate to roughly twice working precision.
pub fn horner_compensated(coeffs: &[f64], x: f64) -> f64 {
    let n = coeffs.len();
    if n == 0 {
        return 0.0;
    }
    let mut s = coeffs[n - 1];
    let mut c = 0.0;
    for k in (0..n - 1).rev() {
        let (p, pe) = two_prod(s, x);
        let (s2, se) = two_sum(p, coeffs[k]);
        s = s2;
        c = c * x + (pe + se);
    }
    s + c
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Bound on the rounding error of evaluating the polynomial at `x`.
fn rounding_bound(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    let mag = coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs());
    8.0 * EPS * mag
}

fn newton_polish(coeffs: &[f64], mut x: f64) -> f64 {
    let d = derivative(coeffs);
    let mut best = (horner_compensated(coeffs, x).abs(), x);
    for _ in 0..60 {
        let f = horner_compensated(coeffs, x);
        let fp = horner(&d, x);
        if f == 0.0 || fp == 0.0 || !fp.is_finite() {
            break;
        }
        let step = f / fp;
        let next = x - step;
        let fn_abs = horner_compensated(coeffs, next).abs();
        if fn_abs < best.0 {
            best = (fn_abs, next);
        }
        if step.abs() <= 2.0 * EPS * next.abs() || next == x {
            break;
        }
        x = next;
    }
    best.1
}

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner_compensated(coeffs, lo);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner_compensated(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    newton_polish(coeffs, 0.5 * (lo + hi)).clamp(lo.min(hi), hi.max(lo))
}

fn quadratic_real(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (c1 + c1.signum() * sq);
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    let mut r = vec![q / c2, c0 / q];
    r.sort_by(f64::total_cmp);
    r
}

/// Cauchy bound on the magnitude of every root.
fn cauchy_bound(coeffs: &[f64]) -> f64 {
    let lead = coeffs[coeffs.len() - 1].abs();
    1.0 + coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / lead)
        .fold(0.0, f64::max)
}

/// Real roots of `c[0] + c[1] x + c[2] x² + c[3] x³`, ascending. A root of
/// exact multiplicity two is reported once.
pub fn real_cubic_roots(c: [f64; 4]) -> Vec<f64> {
    if c[3] == 0.0 {
        let mut r = quadratic_real(c[0], c[1], c[2]);
        for x in r.iter_mut() {
            *x = newton_polish(&c[..3], *x);
        }
        r.dedup();
        return r;
    }
    let a = c[2] / c[3];
    let b = c[1] / c[3];
    let d = c[0] / c[3];
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
    let h = q * q / 4.0 + p * p * p / 27.0;
    let norm = q * q / 4.0 + p.abs().powi(3) / 27.0;
    if norm == 0.0 {
        return vec![newton_polish(&c, -a / 3.0)];
    }
    if (h / norm).abs() < DEGENERATE_DISCRIMINANT {
        return monotone_interval_roots(&c);
    }
    let shift = -a / 3.0;
    let mut roots = if h > 0.0 {
        let s = h.sqrt();
        let u = (-0.5 * q - q.signum() * s).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        vec![t + shift]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    };
    for x in roots.iter_mut() {
        *x = newton_polish(&c, *x);
    }
    roots.sort_by(f64::total_cmp);
    if roots.len() == 3 {
        let scale = roots.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        if roots.windows(2).any(|w| (w[1] - w[0]).abs() <= 1e-9 * scale) {
            return monotone_interval_roots(&c);
        }
    }
    roots
}

/// Bisection on the monotone pieces between the cubic's critical points.
fn monotone_interval_roots(c: &[f64; 4]) -> Vec<f64> {
    let bound = cauchy_bound(c);
    let crit = quadratic_real(c[1], 2.0 * c[2], 3.0 * c[3]);
    let mut knots = vec![-bound];
    knots.extend(crit.iter().copied().filter(|x| x.abs() < bound));
    knots.push(bound);
    knots.sort_by(f64::total_cmp);

    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (horner_compensated(c, lo), horner_compensated(c, hi));
        if flo == 0.0 || fhi == 0.0 {
            continue;
        }
        if (flo < 0.0) != (fhi < 0.0) {
            roots.push(bisect(c, lo, hi));
        }
    }
    for &x in &crit {
        let fx = horner_compensated(c, x);
        if fx.abs() <= rounding_bound(c, x) {
            roots.push(x);
        }
    }
    roots.sort_by(f64::total_cmp);
    let scale = roots.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * scale);
    roots
}

// ---------------------------------------------------------------------------
// Complex polynomials
// ---------------------------------------------------------------------------

/// `Σ coeffs[k] z^k` (lowest degree first).
pub fn eval_complex(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn derivative_complex(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Rounding-level magnitude of the polynomial at `z`.
pub fn rounding_scale_complex(coeffs: &[Complex64], z: Complex64) -> f64 {
    let az = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * az + c.norm())
}

fn quadratic_complex(b: Complex64, c: Complex64) -> [Complex64; 2] {
    // z² + b z + c
    let disc = (b * b - 4.0 * c).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q, c / q]
}

/// Roots of the monic cubic `z³ + a z² + b z + c`.
pub fn complex_cubic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3a = -q / 2.0 + s;
    let u3b = -q / 2.0 - s;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    if u3.norm() == 0.0 {
        return [shift; 3];
    }
    let u = u3.powf(1.0 / 3.0);
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    let mut uk = u;
    for slot in out.iter_mut() {
        *slot = uk - p / (3.0 * uk) + shift;
        uk *= omega;
    }
    out
}

/// Roots of the monic quartic `z⁴ + a z³ + b z² + c z + d` by Ferrari's
/// method, without polishing.
pub fn ferrari_quartic(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 4] {
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    let shift = -a / 4.0;
    let scale = 1.0 + p.norm() + q.norm().sqrt() + r.norm().sqrt().sqrt();

    let zs: [Complex64; 4] = if q.norm() <= 1e-14 * scale.powi(3) {
        let [w1, w2] = quadratic_complex(p, r);
        let (s1, s2) = (w1.sqrt(), w2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        let ms = complex_cubic_roots(p, p * p / 4.0 - r, -q * q / 8.0);
        let m = ms
            .into_iter()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .unwrap_or_default();
        let s = (2.0 * m).sqrt();
        let half = p / 2.0 + m;
        let [z1, z2] = quadratic_complex(-s, half + q / (2.0 * s));
        let [z3, z4] = quadratic_complex(s, half - q / (2.0 * s));
        [z1, z2, z3, z4]
    };
    zs.map(|z| z + shift)
}

/// Newton iteration on `coeffs` from `z`; returns the iterate with the
/// smallest residual.
pub fn newton_polish_complex(coeffs: &[Complex64], mut z: Complex64, max_iter: usize) -> Complex64 {
    let d = derivative_complex(coeffs);
    let mut best = (eval_complex(coeffs, z).norm(), z);
    for _ in 0..max_iter {
        let f = eval_complex(coeffs, z);
        let fp = eval_complex(&d, z);
        if f.norm() == 0.0 || fp.norm() == 0.0 || !fp.is_finite() {
            break;
        }
        let step = f / fp;
        let next = z - step;
        if !next.is_finite() {
            break;
        }
        let r = eval_complex(coeffs, next).norm();
        if r < best.0 {
            best = (r, next);
        }
        if step.norm() <= 2.0 * EPS * next.norm() {
            break;
        }
        z = next;
    }
    best.1
}

/// Finds all roots of a complex polynomial by recursive subdivision of a
/// bounding box, counting roots in each cell with the argument principle,
/// then Newton-polishing cell centres. Multiple roots are repeated.
pub fn argument_principle_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
    // Offset the box by an irrational fraction so roots on symmetric lines
    // do not sit on cell edges.
    let off = 0.013_579_246_8 * bound;
    let root_box = Cell {
        x0: -bound - off,
        y0: -bound - 1.7 * off,
        size: 2.0 * bound + 3.0 * off,
    };
    let mut found = Vec::new();
    let mut stack = vec![(root_box, winding_number(coeffs, &root_box))];
    let min_size = 1e-9 * bound;
    while let Some((cell, count)) = stack.pop() {
        if count <= 0 {
            continue;
        }
        if cell.size <= min_size || (count == 1 && cell.size <= 1e-3 * bound) {
            let centre = Complex64::new(cell.x0 + cell.size / 2.0, cell.y0 + cell.size / 2.0);
            let z = if count == 1 {
                newton_polish_complex(coeffs, centre, 100)
            } else {
                centre
            };
            for _ in 0..count {
                found.push(z);
            }
            continue;
        }
        let h = cell.size / 2.0;
        let mut assigned = 0;
        let children: Vec<Cell> = (0..4)
            .map(|k| Cell {
                x0: cell.x0 + h * (k % 2) as f64,
                y0: cell.y0 + h * (k / 2) as f64,
                size: h,
            })
            .collect();
        let counts: Vec<i64> = children.iter().map(|c| winding_number(coeffs, c)).collect();
        for (child, &k) in children.iter().zip(&counts) {
            if k > 0 {
                assigned += k;
                stack.push((*child, k));
            }
        }
        if assigned != count {
            // A root sits on an internal edge: keep the parent as a cluster.
            let centre = Complex64::new(cell.x0 + h, cell.y0 + h);
            for _ in 0..count {
                found.push(newton_polish_complex(coeffs, centre, 100));
            }
            for _ in 0..assigned {
                stack.pop();
            }
        }
    }
    found.truncate(n);
    found
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    y0: f64,
    size: f64,
}

fn winding_number(coeffs: &[Complex64], cell: &Cell) -> i64 {
    let corners = [
        Complex64::new(cell.x0, cell.y0),
        Complex64::new(cell.x0 + cell.size, cell.y0),
        Complex64::new(cell.x0 + cell.size, cell.y0 + cell.size),
        Complex64::new(cell.x0, cell.y0 + cell.size),
    ];
    let mut total = 0.0;
    for k in 0..4 {
        total += arg_change(coeffs, corners[k], corners[(k + 1) % 4], 0);
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

fn arg_change(coeffs: &[Complex64], z0: Complex64, z1: Complex64, depth: usize) -> f64 {
    const SEGMENTS: usize = 16;
    let mut sum = 0.0;
    let mut prev = eval_complex(coeffs, z0);
    for k in 1..=SEGMENTS {
        let z = z0 + (z1 - z0) * (k as f64 / SEGMENTS as f64);
        let cur = eval_complex(coeffs, z);
        let mut d = (cur / prev).arg();
        if d.abs() > std::f64::consts::FRAC_PI_4 && depth < 12 {
            let za = z0 + (z1 - z0) * ((k - 1) as f64 / SEGMENTS as f64);
            d = arg_change(coeffs, za, z, depth + 1);
        }
        sum += d;
        prev = cur;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(r: &[f64]) -> [f64; 4] {
        let (a, b, cc) = (r[0], r[1], r[2]);
        [-a * b * cc, a * b + b * cc + a * cc, -(a + b + cc), 1.0]
    }

    #[test]
    fn cubic_three_roots() {
        let r = real_cubic_roots(from_roots(&[1.0, 2.0, 3.0]));
        assert_eq!(r.len(), 3);
        for (x, e) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_one_root() {
        // (x - 2)(x² + 1)
        let r = real_cubic_roots([-2.0, 1.0, -2.0, 1.0]);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_double_root_reported_once() {
        let r = real_cubic_roots(from_roots(&[1.0, 1.0, -2.0]));
        assert_eq!(r.len(), 2, "{r:?}");
        assert!((r[0] + 2.0).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn cubic_close_pair_resolved() {
        let r = real_cubic_roots(from_roots(&[1.0, 1.0 + 1e-6, 5.0]));
        assert_eq!(r.len(), 3, "{r:?}");
        assert!((r[1] - r[0] - 1e-6).abs() < 1e-9);
    }

    #[test]
    fn cubic_degenerate_leading() {
        let r = real_cubic_roots([-4.0, 0.0, 1.0, 0.0]);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0).abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-15);
        assert_eq!(real_cubic_roots([-3.0, 1.5, 0.0, 0.0]), vec![2.0]);
    }

    #[test]
    fn compensated_horner_beats_naive() {
        // (x - 1)^3 expanded, evaluated near the triple root.
        let p = [-1.0, 3.0, -3.0, 1.0];
        let x = 1.0 + 1e-5;
        let exact = 1e-15;
        let comp = horner_compensated(&p, x);
        assert!((comp - exact).abs() < 1e-20, "{comp:e}");
    }

    #[test]
    fn quartic_distinct_roots() {
        let roots = [c(1.0, 2.0), c(-0.5, 0.1), c(3.0, -1.0), c(0.0, 0.0)];
        let coeffs = poly_from_roots(&roots);
        let got = ferrari_quartic(coeffs[3], coeffs[2], coeffs[1], coeffs[0]);
        for r in roots {
            let best = got
                .iter()
                .map(|z| newton_polish_complex(&coeffs, *z, 50))
                .map(|z| (z - r).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "{r} {got:?}");
        }
    }

    #[test]
    fn quartic_biquadratic() {
        // z⁴ - 5z² + 4 = (z²-1)(z²-4)
        let got = ferrari_quartic(c(0.0, 0.0), c(-5.0, 0.0), c(0.0, 0.0), c(4.0, 0.0));
        let mut re: Vec<f64> = got.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (x, e) in re.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        let mut p = vec![c(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![c(0.0, 0.0); p.len() + 1];
            for (k, &pk) in p.iter().enumerate() {
                next[k + 1] += pk;
                next[k] -= pk * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn argument_principle_finds_all_roots() {
        let roots = [c(0.3, -0.7), c(-1.2, 0.4), c(2.0, 2.0), c(0.31, -0.69)];
        let coeffs = poly_from_roots(&roots);
        let found = argument_principle_roots(&coeffs);
        assert_eq!(found.len(), 4);
        for r in roots {
            let best = found.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "{r}: {found:?}");
        }
    }

    #[test]
    fn argument_principle_double_root() {
        let roots = [c(0.5, 0.5), c(0.5, 0.5), c(-1.0, 0.0), c(0.0, -2.0)];
        let coeffs = poly_from_roots(&roots);
        let found = argument_principle_roots(&coeffs);
        assert_eq!(found.len(), 4);
        let near = found.iter().filter(|z| (**z - c(0.5, 0.5)).norm() < 1e-6).count();
        assert_eq!(near, 2, "{found:?}");
    }

    #[test]
    fn complex_cubic() {
        let roots = [c(1.0, 1.0), c(-2.0, 0.5), c(0.0, -3.0)];
        let p = poly_from_roots(&roots);
        let got = complex_cubic_roots(p[2], p[1], p[0]);
        for r in roots {
            let best = got.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12);
        }
    }
}
