//! Steady states of the driven two-mode system.
//!
//! In the purely dissipative, symmetric setting the cavity response
//! `y = |a0|²` obeys `I = c1 y + c2 y² + c3 y³` with `I = Ω²`. The general
//! path (coherent coupling, asymmetric damping, Γ = 0) eliminates `a0` and
//! solves the analogous cubic in `x = |b0|²`. Stability of every branch comes
//! from the fluctuation eigenvalues in [`crate::dynamics`].

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{self, Stability};
use crate::error::{Error, Result};
use crate::params::{effective_gamma, PumpSpec, SystemParams};
use crate::poly;

/// Coefficients of `I(y) = c1 y + c2 y² + c3 y³` and `β = Γ² − γ² − (δ/2)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub beta: f64,
}

impl CubicCoeffs {
    fn as_poly(&self, intensity: f64) -> [f64; 4] {
        [-intensity, self.c1, self.c2, self.c3]
    }

    /// dI/dy.
    pub fn slope(&self, y: f64) -> f64 {
        self.c1 + 2.0 * self.c2 * y + 3.0 * self.c3 * y * y
    }
}

/// One steady state `(a0, b0)`; `branch_index` orders the branches at the
/// same drive by `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyBranch {
    pub a0: Complex64,
    pub b0: Complex64,
    pub y: f64,
    pub x: f64,
    pub stable: bool,
    pub branch_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BistabilityWindow {
    pub y_minus: f64,
    pub y_plus: f64,
    pub i_at_y_minus: f64,
    pub i_at_y_plus: f64,
    pub exists: bool,
}

impl BistabilityWindow {
    /// (lower, upper) drive intensities bounding the three-root region.
    pub fn intensity_range(&self) -> (f64, f64) {
        (
            self.i_at_y_minus.min(self.i_at_y_plus),
            self.i_at_y_minus.max(self.i_at_y_plus),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDirection {
    Up,
    Down,
}

impl SweepDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepDirection::Up => "up",
            SweepDirection::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseSample {
    pub intensity: f64,
    pub y: f64,
    pub branch_index: usize,
    pub stable: bool,
    pub branch: SteadyBranch,
}

/// One hysteresis sweep, samples in traversal order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseCurve {
    pub direction: SweepDirection,
    pub samples: Vec<ResponseSample>,
}

impl ResponseCurve {
    /// Index `k` of the largest jump in `y` between samples `k` and `k + 1`.
    pub fn largest_jump(&self) -> Option<usize> {
        self.samples
            .windows(2)
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                (a[1].y - a[0].y).abs().total_cmp(&(b[1].y - b[0].y).abs())
            })
            .map(|(k, _)| k)
    }
}

fn require_purely_dissipative(sys: &SystemParams) -> Result<f64> {
    let gamma = effective_gamma(sys)?;
    if sys.coupling_gamma == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if sys.coupling_g != 0.0 {
        return Err(Error::InvalidArgument(
            "coherent coupling present; use steady_amplitudes_general".into(),
        ));
    }
    Ok(gamma)
}

pub fn response_coeffs(sys: &SystemParams) -> Result<CubicCoeffs> {
    let gamma = require_purely_dissipative(sys)?;
    let big = sys.coupling_gamma;
    let half = 0.5 * sys.delta;
    let q = gamma * gamma + half * half;
    // Γ² − γ² = −γ0(γ0 + 2Γ), written out to avoid cancellation.
    let beta = -sys.gamma_a * (sys.gamma_a + 2.0 * big) - half * half;
    let g2 = big * big;
    Ok(CubicCoeffs {
        c1: beta * beta / g2,
        c2: -2.0 * sys.kerr * beta * sys.delta * q / (g2 * g2),
        c3: 4.0 * sys.kerr * sys.kerr * q.powi(3) / (g2 * g2 * g2),
        beta,
    })
}

pub fn drive_for_response(coeffs: &CubicCoeffs, y: f64) -> f64 {
    poly::horner_compensated(&coeffs.as_poly(0.0), y)
}

fn nonnegative_cubic_roots(poly: [f64; 4], intensity: f64) -> Result<Vec<f64>> {
    if !(intensity >= 0.0) {
        return Err(Error::InvalidArgument(format!("drive intensity must be non-negative, got {intensity}")));
    }
    if poly[1] == 0.0 && poly[2] == 0.0 && poly[3] == 0.0 {
        return if intensity > 0.0 {
            Err(Error::Degenerate(intensity))
        } else {
            Ok(vec![0.0])
        };
    }
    if intensity == 0.0 {
        return Ok(vec![0.0]);
    }
    let roots = poly::real_cubic_roots(poly);
    let scale = roots.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let mut out: Vec<f64> = roots
        .into_iter()
        .filter(|&r| r >= -1e-12 * scale)
        .map(|r| r.max(0.0))
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Real non-negative roots of `I(y) = I`, ascending.
pub fn solve_response(coeffs: &CubicCoeffs, intensity: f64) -> Result<Vec<f64>> {
    nonnegative_cubic_roots(coeffs.as_poly(intensity), intensity)
}

fn zero_branch(sys: &SystemParams) -> Result<SteadyBranch> {
    let zero = Complex64::new(0.0, 0.0);
    let (stability, _) = dynamics::branch_stability(sys, zero)?;
    Ok(SteadyBranch {
        a0: zero,
        b0: zero,
        y: 0.0,
        x: 0.0,
        stable: stability == Stability::Stable,
        branch_index: 0,
    })
}

/// Complex amplitudes for a root `y` of the response cubic.
fn amplitudes_from_response(sys: &SystemParams, gamma: f64, beta: f64, omega: f64, y: f64) -> (Complex64, Complex64) {
    let big = sys.coupling_gamma;
    let half = 0.5 * sys.delta;
    let q = gamma * gamma + half * half;
    let x = y * q / (big * big);
    let coef = Complex64::new(-gamma * beta / q, -half * beta / q + 2.0 * sys.kerr * x);
    let b0 = omega / coef;
    let a0 = -big * b0 / Complex64::new(gamma, -half);
    (a0, b0)
}

/// Steady states from the closed-form response cubic (purely dissipative,
/// symmetric case).
pub fn steady_from_response(sys: &SystemParams, pump: &PumpSpec) -> Result<Vec<SteadyBranch>> {
    let gamma = require_purely_dissipative(sys)?;
    if pump.omega == 0.0 {
        return Ok(vec![zero_branch(sys)?]);
    }
    let coeffs = response_coeffs(sys)?;
    let ys = solve_response(&coeffs, pump.intensity())?;
    ys.into_iter()
        .enumerate()
        .map(|(k, y)| {
            let (a0, b0) = amplitudes_from_response(sys, gamma, coeffs.beta, pump.omega, y);
            let (stability, _) = dynamics::branch_stability(sys, b0)?;
            Ok(SteadyBranch {
                a0,
                b0,
                y,
                x: b0.norm_sqr(),
                stable: stability == Stability::Stable,
                branch_index: k,
            })
        })
        .collect()
}

/// Steady states for arbitrary g, Γ and dampings.
///
/// The a-row of the stationary equations gives `a0 = −(Γ + ig) b0 / (γ_a + Γ + iδ_a)`;
/// substituting into the b-row leaves `|Z + 2iUx|² x = I` with `x = |b0|²`.
pub fn steady_amplitudes_general(sys: &SystemParams, pump: &PumpSpec) -> Result<Vec<SteadyBranch>> {
    if pump.omega == 0.0 {
        return Ok(vec![zero_branch(sys)?]);
    }
    let zero = Complex64::new(0.0, 0.0);
    let da = Complex64::new(sys.damping_a(), sys.detuning_a());
    let db = Complex64::new(sys.damping_b(), sys.detuning_b());
    let coup = Complex64::new(sys.coupling_gamma, sys.coupling_g);

    let (ratio, z) = if da == zero {
        if coup != zero {
            // The a-row forces b0 = 0 and the b-row then fixes a0.
            let a0 = pump.omega / coup;
            let (stability, _) = dynamics::branch_stability(sys, zero)?;
            return Ok(vec![SteadyBranch {
                a0,
                b0: zero,
                y: a0.norm_sqr(),
                x: 0.0,
                stable: stability == Stability::Stable,
                branch_index: 0,
            }]);
        }
        (zero, db)
    } else {
        (coup / da, db - coup * coup / da)
    };

    let (p, r) = (z.re, z.im);
    let u = sys.kerr;
    let intensity = pump.intensity();
    let xs = nonnegative_cubic_roots([-intensity, p * p + r * r, 4.0 * u * r, 4.0 * u * u], intensity)?;

    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        let b0 = pump.omega / Complex64::new(p, r + 2.0 * u * x);
        let a0 = -ratio * b0;
        let (stability, _) = dynamics::branch_stability(sys, b0)?;
        out.push(SteadyBranch {
            a0,
            b0,
            y: a0.norm_sqr(),
            x,
            stable: stability == Stability::Stable,
            branch_index: 0,
        });
    }
    out.sort_by(|l, r| l.y.total_cmp(&r.y).then(l.x.total_cmp(&r.x)));
    for (k, b) in out.iter_mut().enumerate() {
        b.branch_index = k;
    }
    Ok(out)
}

/// Closed-form cubic when it applies, general elimination otherwise.
pub fn steady_states(sys: &SystemParams, pump: &PumpSpec) -> Result<Vec<SteadyBranch>> {
    if sys.is_purely_dissipative() {
        steady_from_response(sys, pump)
    } else {
        steady_amplitudes_general(sys, pump)
    }
}

/// Turning points of the response curve from their closed form.
///
/// `exists` requires `Uδ < 0` and `δ² > 12γ²`; at `δ² = 12γ²` the two points
/// coincide and are still reported.
pub fn turning_points(sys: &SystemParams) -> Result<BistabilityWindow> {
    let gamma = require_purely_dissipative(sys)?;
    let coeffs = response_coeffs(sys)?;
    let (u, delta) = (sys.kerr, sys.delta);
    let half = 0.5 * delta;
    let mut disc = half * half - 3.0 * gamma * gamma;
    if disc < 0.0 && disc.abs() <= 8.0 * f64::EPSILON * 3.0 * gamma * gamma {
        disc = 0.0;
    }
    if !(u * delta < 0.0) || disc < 0.0 {
        return Ok(BistabilityWindow {
            y_minus: f64::NAN,
            y_plus: f64::NAN,
            i_at_y_minus: f64::NAN,
            i_at_y_plus: f64::NAN,
            exists: false,
        });
    }
    let q = gamma * gamma + half * half;
    let pre = coeffs.beta * sys.coupling_gamma.powi(2) / (6.0 * u * q * q);
    let root = disc.sqrt();
    let (r1, r2) = (pre * (delta + root), pre * (delta - root));
    let (y_minus, y_plus) = (r1.min(r2), r1.max(r2));
    Ok(BistabilityWindow {
        y_minus,
        y_plus,
        i_at_y_minus: drive_for_response(&coeffs, y_minus),
        i_at_y_plus: drive_for_response(&coeffs, y_plus),
        exists: disc > 0.0 && y_minus > 0.0,
    })
}

/// The threshold drive for a common damping γ, dissipative coupling Γ,
/// coherent coupling g and Kerr coefficient U.
pub fn critical_intensity(gamma: f64, coupling_gamma: f64, coupling_g: f64, kerr: f64) -> Result<f64> {
    if kerr == 0.0 {
        return Err(Error::ZeroKerr);
    }
    let sgn = kerr.signum();
    let bracket = 3f64.sqrt()
        * (4.0 * gamma * gamma - coupling_gamma * coupling_gamma + coupling_g * coupling_g)
        * sgn
        + 2.0 * coupling_g * coupling_gamma;
    Ok(bracket.powi(3) / (432.0 * kerr * gamma.powi(3)))
}

/// Threshold intensity `I^(c)` with γ = γ0 + Γ.
pub fn critical_power(sys: &SystemParams) -> Result<f64> {
    let gamma = effective_gamma(sys)?;
    critical_intensity(gamma, sys.coupling_gamma, sys.coupling_g, sys.kerr)
}

/// Ratio of dissipative to coherent thresholds at equal effective damping.
pub fn threshold_ratio(gamma: f64, coupling_gamma: f64, coupling_g: f64) -> f64 {
    let num = 4.0 * gamma * gamma - coupling_gamma * coupling_gamma;
    let den = 4.0 * gamma * gamma + coupling_g * coupling_g;
    (num / den).powi(3)
}

/// Stable branch nearest to `target` under `key`; ties go to the lower key.
pub(crate) fn nearest_stable(
    branches: &[SteadyBranch],
    target: f64,
    key: impl Fn(&SteadyBranch) -> f64,
) -> Option<&SteadyBranch> {
    branches
        .iter()
        .filter(|b| b.stable)
        .min_by(|l, r| {
            let (dl, dr) = ((key(l) - target).abs(), (key(r) - target).abs());
            dl.total_cmp(&dr).then(key(l).total_cmp(&key(r)))
        })
}

fn check_ascending(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} grid is empty")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!("{what} grid must be strictly ascending")));
    }
    Ok(())
}

/// Branch continuation over an ascending intensity grid; returns the
/// followed branch per grid point in traversal order.
///
/// An up-sweep starts on the lowest stable branch and a down-sweep on the
/// highest. Each step takes the stable root nearest in `y` to the previous
/// one, which also implements the jump when the followed branch disappears.
pub fn follow_drive(sys: &SystemParams, intensities: &[f64], direction: SweepDirection) -> Result<Vec<(f64, SteadyBranch)>> {
    check_ascending(intensities, "intensity")?;
    let order: Vec<f64> = match direction {
        SweepDirection::Up => intensities.to_vec(),
        SweepDirection::Down => intensities.iter().rev().copied().collect(),
    };
    let mut out = Vec::with_capacity(order.len());
    let mut prev: Option<f64> = None;
    for intensity in order {
        let pump = PumpSpec::from_intensity(intensity)?;
        let branches = steady_states(sys, &pump)?;
        let chosen = match prev {
            Some(y) => nearest_stable(&branches, y, |b| b.y),
            None => {
                let mut stable = branches.iter().filter(|b| b.stable);
                match direction {
                    SweepDirection::Up => stable.next(),
                    SweepDirection::Down => stable.next_back(),
                }
            }
        }
        .copied()
        .ok_or(Error::NoStableRoot(intensity))?;
        prev = Some(chosen.y);
        out.push((intensity, chosen));
    }
    Ok(out)
}

pub fn hysteresis_sweep(sys: &SystemParams, intensities: &[f64], direction: SweepDirection) -> Result<ResponseCurve> {
    let samples = follow_drive(sys, intensities, direction)?
        .into_iter()
        .map(|(intensity, b)| ResponseSample {
            intensity,
            y: b.y,
            branch_index: b.branch_index,
            stable: b.stable,
            branch: b,
        })
        .collect();
    Ok(ResponseCurve { direction, samples })
}

/// Continuation of the stable steady state across a detuning grid at fixed
/// pump, by nearest `|b0|²`. The walk starts at whichever grid end has the
/// larger `|δ|` (lowest stable branch there) and results come back in grid
/// order.
pub fn follow_delta(sys: &SystemParams, pump: &PumpSpec, deltas: &[f64]) -> Result<Vec<SteadyBranch>> {
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("detuning grid is empty".into()));
    }
    let n = deltas.len();
    let reverse = deltas[n - 1].abs() > deltas[0].abs();
    let order: Vec<usize> = if reverse { (0..n).rev().collect() } else { (0..n).collect() };
    let mut out: Vec<Option<SteadyBranch>> = vec![None; n];
    let mut prev: Option<f64> = None;
    for k in order {
        let s = sys.with_delta(deltas[k]);
        let branches = steady_states(&s, pump)?;
        let chosen = match prev {
            Some(x) => nearest_stable(&branches, x, |b| b.x),
            None => branches.iter().find(|b| b.stable),
        }
        .copied()
        .ok_or(Error::NoStableRoot(pump.intensity()))?;
        prev = Some(chosen.x);
        out[k] = Some(chosen);
    }
    Ok(out.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{mhz, nhz};

    fn reference_system() -> SystemParams {
        let gamma = mhz(10.0);
        SystemParams::symmetric(mhz(5.0), mhz(5.0), -8.0 * gamma, nhz(42.1))
    }

    #[test]
    fn linear_limit_coefficients() {
        let sys = reference_system().with_kerr(0.0);
        let c = response_coeffs(&sys).unwrap();
        assert_eq!(c.c2, 0.0);
        assert_eq!(c.c3, 0.0);
        assert!((c.c1 - c.beta * c.beta / sys.coupling_gamma.powi(2)).abs() <= 1e-15 * c.c1);

        let i = 3.0e29;
        let roots = solve_response(&c, i).unwrap();
        assert_eq!(roots.len(), 1);
        let expected = i * sys.coupling_gamma.powi(2) / (c.beta * c.beta);
        assert!((roots[0] / expected - 1.0).abs() < 1e-14);
        assert!((drive_for_response(&c, expected) / i - 1.0).abs() < 1e-14);
    }

    #[test]
    fn beta_vanishes_without_intrinsic_damping() {
        let sys = SystemParams::symmetric(0.0, mhz(5.0), 0.0, nhz(42.1));
        let c = response_coeffs(&sys).unwrap();
        assert_eq!(c.beta, 0.0);
        assert_eq!(c.c1, 0.0);
    }

    #[test]
    fn response_coeffs_errors() {
        assert_eq!(
            response_coeffs(&SystemParams::symmetric(1.0, 0.0, 0.0, 1.0)),
            Err(Error::ZeroCoupling)
        );
        let mut asym = reference_system();
        asym.gamma_a = 1.0;
        assert!(matches!(response_coeffs(&asym), Err(Error::AsymmetricDamping { .. })));
    }

    #[test]
    fn zero_drive_and_degenerate() {
        let c = response_coeffs(&reference_system()).unwrap();
        assert_eq!(solve_response(&c, 0.0).unwrap(), vec![0.0]);
        assert_eq!(drive_for_response(&c, 0.0), 0.0);
        let zero = CubicCoeffs {
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            beta: 0.0,
        };
        assert_eq!(solve_response(&zero, 1.0), Err(Error::Degenerate(1.0)));
        assert!(solve_response(&c, -1.0).is_err());
    }

    #[test]
    fn turning_point_guards() {
        let no = reference_system().with_delta(8.0 * mhz(10.0));
        assert!(!turning_points(&no).unwrap().exists);

        let gamma = mhz(10.0);
        let edge = reference_system().with_delta(-(12.0f64).sqrt() * gamma);
        let w = turning_points(&edge).unwrap();
        assert!(!w.exists);
        assert!((w.y_plus - w.y_minus).abs() <= 1e-6 * w.y_plus, "{w:?}");
    }

    #[test]
    fn threshold_ratio_values() {
        assert_eq!(threshold_ratio(1.0, 0.0, 0.0), 1.0);
        assert!((threshold_ratio(2.0, 2.0, 2.0) - 0.216).abs() < 1e-15);
        for (g, big, c) in [(3.0, 1.0, 0.5), (1.0, 1.0, 0.01), (5.0, 4.0, 7.0)] {
            assert!(threshold_ratio(g, big, c) < 1.0);
        }
    }

    #[test]
    fn critical_power_coherent_limit() {
        let gamma = 2.0;
        let u = 0.3;
        let ic = critical_intensity(gamma, 0.0, 0.0, u).unwrap();
        let expected = 4.0 * 3f64.sqrt() / 9.0 * gamma.powi(3) / u;
        assert!((ic / expected - 1.0).abs() < 1e-14);
        assert_eq!(critical_intensity(1.0, 1.0, 0.0, 0.0), Err(Error::ZeroKerr));
    }

    #[test]
    fn sweeps_need_ascending_grid() {
        let sys = reference_system();
        assert!(hysteresis_sweep(&sys, &[], SweepDirection::Up).is_err());
        assert!(hysteresis_sweep(&sys, &[2.0, 1.0], SweepDirection::Up).is_err());
    }

    #[test]
    fn nearest_stable_tie_prefers_lower() {
        let z = Complex64::new(0.0, 0.0);
        let mk = |y: f64, stable| SteadyBranch {
            a0: z,
            b0: z,
            y,
            x: y,
            stable,
            branch_index: 0,
        };
        let bs = [mk(1.0, true), mk(2.0, false), mk(3.0, true)];
        assert_eq!(nearest_stable(&bs, 2.0, |b| b.y).unwrap().y, 1.0);
        assert_eq!(nearest_stable(&bs, 2.6, |b| b.y).unwrap().y, 3.0);
        assert!(nearest_stable(&bs[1..2], 2.0, |b| b.y).is_none());
    }
}
