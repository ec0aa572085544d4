//! Dormand–Prince 5(4) integrator for small real systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Keep every accepted step (for dense output); otherwise only the end point.
    pub record: bool,
}

impl OdeOptions {
    pub fn new(rtol: f64) -> Self {
        Self {
            rtol,
            atol: 1e-14,
            max_steps: 50_000_000,
            record: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
    pub steps: usize,
    pub rejected: usize,
}

impl<const N: usize> OdeSolution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        let k = self.t.len() - 1;
        (self.t[k], self.y[k])
    }

    /// Cubic Hermite interpolation between recorded steps.
    pub fn sample(&self, t: f64) -> [f64; N] {
        let n = self.t.len();
        if n == 1 || t <= self.t[0] {
            return self.y[0];
        }
        if t >= self.t[n - 1] {
            return self.y[n - 1];
        }
        let k = self.t.partition_point(|&x| x <= t).saturating_sub(1).min(n - 2);
        let (t0, t1) = (self.t[k], self.t[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        std::array::from_fn(|i| {
            h00 * self.y[k][i] + h10 * h * self.dy[k][i] + h01 * self.y[k + 1][i] + h11 * h * self.dy[k + 1][i]
        })
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
pub fn dopri45<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let span = t_end - t0;
    if !(span > 0.0) {
        return Err(Error::InvalidArgument(format!("integration span must be positive, got {span}")));
    }
    if !(opts.rtol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let h_min = 1e-15 * t_end.abs().max(span);

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut sol = OdeSolution {
        t: vec![t],
        y: vec![y],
        dy: vec![k1],
        steps: 0,
        rejected: 0,
    };

    let norm = |v: &[f64; N]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (d0, d1) = (norm(&y), norm(&k1));
    let mut h = if d0 > 1e-10 && d1 > 1e-10 {
        0.01 * d0 / d1 * opts.rtol.powf(0.2)
    } else {
        1e-6 * span
    };
    h = h.min(span).max(h_min);

    let mut k = [[0.0; N]; 7];
    while t < t_end {
        if sol.steps + sol.rejected >= opts.max_steps {
            return Err(Error::StepLimit(opts.max_steps));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                *yi += h * acc;
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y_new = y;
        for (i, yi) in y_new.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..6 {
                acc += A[6][j] * k[j][i];
            }
            *yi += h * acc;
        }
        let mut err = 0.0f64;
        for i in 0..N {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h * e).abs() / sc);
        }
        if !err.is_finite() {
            err = 1e10;
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k[6];
            sol.steps += 1;
            if opts.record {
                sol.t.push(t);
                sol.y.push(y);
                sol.dy.push(k1);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            sol.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < h_min {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    if !opts.record {
        sol.t.push(t);
        sol.y.push(y);
        sol.dy.push(k1);
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = dopri45(|_, y: &[f64; 1]| [-2.0 * y[0]], 0.0, [1.0], 3.0, &OdeOptions::new(1e-10)).unwrap();
        let (t, y) = sol.last();
        assert_eq!(t, 3.0);
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let sol = dopri45(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            &OdeOptions::new(1e-11),
        )
        .unwrap();
        for k in 0..100 {
            let t = 0.1 * k as f64;
            let y = sol.sample(t);
            assert!((y[0] - t.cos()).abs() < 1e-6, "t={t}");
        }
        assert!(sol.steps > 10);
    }

    #[test]
    fn discontinuous_rhs_reports_underflow() {
        let r = dopri45(|_, y: &[f64; 1]| [-1e20 * y[0].signum()], 0.0, [1.0], 1.0, &OdeOptions::new(1e-8));
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
    }

    #[test]
    fn step_budget_enforced() {
        let mut opts = OdeOptions::new(1e-12);
        opts.max_steps = 3;
        let r = dopri45(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 100.0, &opts);
        assert_eq!(r.unwrap_err(), Error::StepLimit(3));
    }

    #[test]
    fn rejects_bad_span() {
        assert!(dopri45(|_, y: &[f64; 1]| *y, 1.0, [1.0], 1.0, &OdeOptions::new(1e-8)).is_err());
    }
}
