//! Weak-probe transmission on top of a pumped steady state.
//!
//! The first probe harmonics `X = (a₊, b₊, a₋*, b₋*)` solve `M X = ε(1,1,0,0)`
//! with `M = i(H_NL − δ_p)`, and the transmitted field at the probe frequency
//! gives `t = 1 − 2Γ(a₊ + b₊)/ε`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{self, ode, StateVec};
use crate::error::{Error, Result};
use crate::linalg::{self, Lu4, Mat4, Vec4};
use crate::params::{PumpSpec, ProbeSpec, SystemParams};
use crate::steadystate::{self, SteadyBranch, SweepDirection};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_82e-34;

const I: Complex64 = Complex64::new(0.0, 1.0);
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Probe amplitude `ε = √(2Γ P / ħω_p)` from probe power `P` (W).
pub fn probe_epsilon(power_watts: f64, coupling_gamma: f64, omega_p: f64) -> Result<f64> {
    if !(power_watts >= 0.0) {
        return Err(Error::NonPositiveInput("probe power"));
    }
    if !(coupling_gamma > 0.0) {
        return Err(Error::NonPositiveInput("Gamma"));
    }
    if !(omega_p > 0.0) {
        return Err(Error::NonPositiveInput("probe frequency"));
    }
    Ok((2.0 * coupling_gamma * power_watts / (HBAR * omega_p)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeMatrix {
    pub m: Mat4,
    pub delta_p: f64,
}

impl ProbeMatrix {
    pub fn source(epsilon: f64) -> Vec4 {
        let e = Complex64::new(epsilon, 0.0);
        let z = Complex64::new(0.0, 0.0);
        [e, e, z, z]
    }

    /// Harmonic amplitudes `X⁽¹⁾` for probe amplitude `epsilon`.
    pub fn harmonics(&self, epsilon: f64) -> Result<Vec4> {
        linalg::solve_refined(&self.m, &Self::source(epsilon)).map_err(|_| Error::SingularM(self.delta_p))
    }
}

pub fn build_m(sys: &SystemParams, b0: Complex64, delta_p: f64) -> ProbeMatrix {
    let h = dynamics::build_hnl(sys, b0).entries;
    let mut m = h;
    for (k, row) in m.iter_mut().enumerate() {
        row[k] -= delta_p;
        for z in row.iter_mut() {
            *z *= I;
        }
    }
    ProbeMatrix { m, delta_p }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionPoint {
    pub delta_p: f64,
    pub t: Complex64,
    pub magnitude: f64,
    /// One-norm condition number of `M`.
    pub condition: f64,
    /// `‖M X − F‖ / ‖F‖`.
    pub residual: f64,
    pub singular: bool,
}

impl TransmissionPoint {
    fn singular_at(delta_p: f64) -> Self {
        Self {
            delta_p,
            t: Complex64::new(f64::NAN, f64::NAN),
            magnitude: f64::INFINITY,
            condition: f64::INFINITY,
            residual: f64::NAN,
            singular: true,
        }
    }
}

/// Transmission at one probe detuning. The response is linear in `ε`, so a
/// non-positive `eps` is replaced by unit amplitude.
pub fn transmission(sys: &SystemParams, b0: Complex64, delta_p: f64, eps: f64) -> Result<TransmissionPoint> {
    let eps = if eps > 0.0 { eps } else { 1.0 };
    let pm = build_m(sys, b0, delta_p);
    let lu = Lu4::factor(&pm.m).map_err(|_| Error::SingularM(delta_p))?;
    let f = ProbeMatrix::source(eps);
    let mut x = lu.solve(&f);
    let mx = linalg::matvec(&pm.m, &x);
    let r: Vec4 = std::array::from_fn(|i| f[i] - mx[i]);
    let dx = lu.solve(&r);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    if x.iter().any(|z| !z.is_finite()) {
        return Err(Error::SingularM(delta_p));
    }
    let mx = linalg::matvec(&pm.m, &x);
    let r: Vec4 = std::array::from_fn(|i| f[i] - mx[i]);
    let t = 1.0 - 2.0 * sys.coupling_gamma * (x[0] + x[1]) / eps;
    Ok(TransmissionPoint {
        delta_p,
        t,
        magnitude: t.norm(),
        condition: lu.condition_one(&pm.m),
        residual: linalg::vec_norm(&r) / linalg::vec_norm(&f),
        singular: false,
    })
}

/// `1 − 2Γ Σ_{r,s ≤ 2} (M⁻¹)_{rs}`, the same quantity from the explicit inverse.
pub fn transmission_sigma(sys: &SystemParams, b0: Complex64, delta_p: f64) -> Result<Complex64> {
    let pm = build_m(sys, b0, delta_p);
    let inv = Lu4::factor(&pm.m).map_err(|_| Error::SingularM(delta_p))?.inverse();
    let s = inv[0][0] + inv[0][1] + inv[1][0] + inv[1][1];
    Ok(1.0 - 2.0 * sys.coupling_gamma * s)
}

/// `∂t/∂δ_p = −2iΓ Σ_{r,s ≤ 2} (M⁻²)_{rs}`.
pub fn sensitivity(sys: &SystemParams, b0: Complex64, delta_p: f64) -> Result<Complex64> {
    let pm = build_m(sys, b0, delta_p);
    let lu = Lu4::factor(&pm.m).map_err(|_| Error::SingularM(delta_p))?;
    let v = lu.solve(&ProbeMatrix::source(1.0));
    let w = lu.solve(&v);
    let out = -2.0 * I * sys.coupling_gamma * (w[0] + w[1]);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::SingularM(delta_p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub points: Vec<TransmissionPoint>,
    /// Index of the steady branch the spectrum was taken on, when known.
    pub branch_index: Option<usize>,
    pub sys: SystemParams,
    pub b0: Complex64,
    pub epsilon: f64,
}

impl Spectrum {
    pub fn delta_p(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delta_p).collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.points
            .iter()
            .filter(|p| !p.singular)
            .fold(0.0, |m, p| m.max(p.magnitude))
    }
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// 2001 probe detunings across `[−6γ, 6γ]`.
pub fn default_probe_grid(gamma: f64) -> Vec<f64> {
    linspace(-6.0 * gamma, 6.0 * gamma, 2001)
}

pub fn spectrum(sys: &SystemParams, b0: Complex64, delta_p_grid: &[f64], eps: f64) -> Result<Spectrum> {
    if delta_p_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("probe grid must be strictly ascending".into()));
    }
    let points = delta_p_grid
        .iter()
        .map(|&dp| match transmission(sys, b0, dp, eps) {
            Ok(p) => Ok(p),
            Err(Error::SingularM(_)) => Ok(TransmissionPoint::singular_at(dp)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum {
        points,
        branch_index: None,
        sys: *sys,
        b0,
        epsilon: eps,
    })
}

pub fn spectrum_on_branch(sys: &SystemParams, branch: &SteadyBranch, delta_p_grid: &[f64], eps: f64) -> Result<Spectrum> {
    let mut s = spectrum(sys, branch.b0, delta_p_grid, eps)?;
    s.branch_index = Some(branch.branch_index);
    Ok(s)
}

fn golden_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a) <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// Lower and upper polariton detunings `(δ_LP, δ_HP)` from the two deepest
/// interior minima of `|t|`, refined to `10⁻⁴·γ`. A single minimum is
/// returned as both.
pub fn find_polariton_minima(sp: &Spectrum) -> Result<(f64, f64)> {
    let pts = &sp.points;
    let finite: Vec<f64> = pts.iter().filter(|p| !p.singular).map(|p| p.magnitude).collect();
    let (lo, hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &m| (l.min(m), h.max(m)));
    if finite.is_empty() || hi - lo < 1e-12 {
        return Err(Error::FlatSpectrum);
    }
    let mag = |k: usize| if pts[k].singular { f64::INFINITY } else { pts[k].magnitude };
    let mut minima: Vec<usize> = (1..pts.len().saturating_sub(1))
        .filter(|&k| mag(k) < mag(k - 1) && mag(k) <= mag(k + 1))
        .collect();
    if minima.is_empty() {
        let k = (0..pts.len()).min_by(|&i, &j| mag(i).total_cmp(&mag(j))).unwrap_or(0);
        minima.push(k);
    }
    minima.sort_by(|&i, &j| mag(i).total_cmp(&mag(j)).then(i.cmp(&j)));
    minima.truncate(2);

    let tol = 1e-4 * sp.sys.mean_damping().max(f64::MIN_POSITIVE);
    let n = pts.len();
    let refine = |k: usize| -> f64 {
        if n < 2 {
            return pts[k].delta_p;
        }
        let step_l = if k > 0 { pts[k].delta_p - pts[k - 1].delta_p } else { pts[1].delta_p - pts[0].delta_p };
        let step_r = if k + 1 < n { pts[k + 1].delta_p - pts[k].delta_p } else { step_l };
        let a = (pts[k].delta_p - 1.5 * step_l).max(pts[0].delta_p);
        let b = (pts[k].delta_p + 1.5 * step_r).min(pts[n - 1].delta_p);
        let x = golden_min(
            |dp| match transmission(&sp.sys, sp.b0, dp, sp.epsilon) {
                Ok(p) => p.magnitude,
                Err(_) => f64::INFINITY,
            },
            a,
            b,
            tol,
        );
        let fx = transmission(&sp.sys, sp.b0, x, sp.epsilon).map_or(f64::INFINITY, |p| p.magnitude);
        if fx <= mag(k) {
            x
        } else {
            pts[k].delta_p
        }
    };
    let found: Vec<f64> = minima.iter().map(|&k| refine(k)).collect();
    let (a, b) = (found[0], *found.last().unwrap_or(&found[0]));
    Ok((a.min(b), a.max(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftSample {
    pub omega: f64,
    pub delta_lp: f64,
    pub shift: f64,
    pub y: f64,
    pub branch_index: usize,
}

/// Lower-polariton detuning against drive, relative to its zero-drive value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftCurve {
    pub direction: SweepDirection,
    pub delta_lp0: f64,
    pub samples: Vec<ShiftSample>,
}

/// Follows the steady state in drive (with hysteresis) and extracts `δ_LP`
/// from the spectrum at each point.
pub fn lp_shift_curve(
    sys: &SystemParams,
    omega_grid: &[f64],
    direction: SweepDirection,
    delta_p_grid: &[f64],
) -> Result<ShiftCurve> {
    if omega_grid.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::InvalidArgument("drive grid must be non-negative".into()));
    }
    let intensities: Vec<f64> = omega_grid.iter().map(|w| w * w).collect();
    let followed = steadystate::follow_drive(sys, &intensities, direction)?;
    let zero = Complex64::new(0.0, 0.0);
    let delta_lp0 = find_polariton_minima(&spectrum(sys, zero, delta_p_grid, 1.0)?)?.0;
    let samples = followed
        .par_iter()
        .map(|(intensity, branch)| {
            let sp = spectrum_on_branch(sys, branch, delta_p_grid, 1.0)?;
            let delta_lp = find_polariton_minima(&sp)?.0;
            Ok(ShiftSample {
                omega: intensity.sqrt(),
                delta_lp,
                shift: delta_lp - delta_lp0,
                y: branch.y,
                branch_index: branch.branch_index,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftCurve {
        direction,
        delta_lp0,
        samples,
    })
}

/// Transmission measured by integrating the full nonlinear equations with
/// the probe switched on.
///
/// The deviation from the steady state is integrated in units of `ε/γ`
/// together with the running projection of the output field onto
/// `e^{−iδ_p t}`. After relaxing for at least `30/γ0` (longer when a
/// fluctuation mode is narrower than `γ0`), successive probe periods are
/// projected until two agree to `10⁻³`.
pub fn nonlinear_probe_oracle(sys: &SystemParams, pump: &PumpSpec, probe: &ProbeSpec, branch: &SteadyBranch) -> Result<Complex64> {
    if !(probe.epsilon > 0.0) {
        return Err(Error::NotConverged("zero probe amplitude leaves nothing to project".into()));
    }
    if probe.delta_p == 0.0 {
        return Err(Error::InvalidArgument(
            "probe at the pump frequency cannot be separated from the steady state".into(),
        ));
    }
    let residual = dynamics::rhs(sys, pump, None, 0.0, &StateVec::from(branch)).norm();
    if !(residual <= 1e-6 * pump.omega.max(1.0)) {
        return Err(Error::InvalidArgument(format!(
            "branch is not a steady state of this pump (residual {residual:e})"
        )));
    }
    let (stability, eigs) = dynamics::branch_stability(sys, branch.b0)?;
    if stability != dynamics::Stability::Stable {
        return Err(Error::InvalidArgument("probe oracle requires a stable branch".into()));
    }
    let gamma = sys.mean_damping();
    let slowest = eigs.min_linewidth();
    let relax_rate = if sys.gamma_a > 0.0 { sys.gamma_a.min(slowest) } else { slowest };
    let t_relax = 30.0 / relax_rate;
    let period = std::f64::consts::TAU / probe.delta_p.abs();

    let s = probe.epsilon / gamma;
    let b0 = branch.b0;
    let coup = Complex64::new(sys.coupling_gamma, sys.coupling_g);
    let da = Complex64::new(sys.damping_a(), sys.detuning_a());
    let db = Complex64::new(sys.damping_b(), sys.detuning_b());
    let u = sys.kerr;
    let big = sys.coupling_gamma;
    let dp = probe.delta_p;

    let f = move |t: f64, y: &[f64; 6]| -> [f64; 6] {
        let ua = Complex64::new(y[0], y[1]);
        let ub = Complex64::new(y[2], y[3]);
        let phase = Complex64::from_polar(1.0, -dp * t);
        // |b|²b − |b0|²b0 with b = b0 + s·ub, expanded so nothing cancels.
        let n2 = ub.norm_sqr();
        let kerr = b0 * b0 * ub.conj()
            + 2.0 * b0.norm_sqr() * ub
            + s * (2.0 * b0 * n2 + b0.conj() * ub * ub)
            + s * s * n2 * ub;
        let dua = -da * ua - coup * ub + gamma * phase;
        let dub = -db * ub - 2.0 * I * u * kerr - coup * ua + gamma * phase;
        let dproj = -2.0 * big * (ua + ub) * phase.conj();
        [dua.re, dua.im, dub.re, dub.im, dproj.re, dproj.im]
    };

    let mut opts = ode::OdeOptions::new(1e-10);
    opts.atol = 1e-12;
    opts.record = false;
    let mut y = [0.0; 6];
    let mut t0 = 0.0;
    let relax = ode::dopri45(f, t0, y, t_relax, &opts)?;
    (t0, y) = relax.last();

    let mut prev: Option<Complex64> = None;
    for _ in 0..60 {
        y[4] = 0.0;
        y[5] = 0.0;
        let seg = ode::dopri45(f, t0, y, t0 + period, &opts)?;
        (t0, y) = seg.last();
        let tk = 1.0 + Complex64::new(y[4], y[5]) / (period * gamma);
        if let Some(p) = prev {
            if (tk - p).norm() <= 1e-3 * tk.norm().max(1.0) {
                return Ok(tk);
            }
        }
        prev = Some(tk);
    }
    Err(Error::NotConverged(format!(
        "probe projection did not settle within 60 periods at delta_p = {dp}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::mhz;

    #[test]
    fn epsilon_scaling() {
        let g = mhz(5.0);
        let w = mhz(10_000.0);
        assert_eq!(probe_epsilon(0.0, g, w).unwrap(), 0.0);
        let e1 = probe_epsilon(1e-15, g, w).unwrap();
        let e4 = probe_epsilon(4e-15, g, w).unwrap();
        assert!((e4 / e1 - 2.0).abs() < 1e-15);
        assert!(probe_epsilon(1e-15, 0.0, w).is_err());
        assert!(probe_epsilon(-1.0, g, w).is_err());
    }

    #[test]
    fn m_assembly_at_rest() {
        let sys = SystemParams::symmetric(0.4, 1.0, 0.0, 3.0);
        let m = build_m(&sys, Complex64::new(0.0, 0.0), 0.0).m;
        let gamma = 1.4;
        let want = [[gamma, 1.0, 0.0, 0.0], [1.0, gamma, 0.0, 0.0], [0.0, 0.0, gamma, 1.0], [0.0, 0.0, 1.0, gamma]];
        for i in 0..4 {
            for j in 0..4 {
                assert!((m[i][j] - Complex64::new(want[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn decoupled_waveguide_is_transparent() {
        let sys = SystemParams::symmetric(0.4, 0.0, 1.3, 3.0);
        for dp in [-2.0, 0.1, 5.0] {
            let p = transmission(&sys, Complex64::new(0.3, 0.1), dp, 1e-3).unwrap();
            assert_eq!(p.t, Complex64::new(1.0, 0.0));
            assert_eq!(sensitivity(&sys, Complex64::new(0.3, 0.1), dp).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn flat_spectrum_rejected() {
        let sys = SystemParams::symmetric(0.4, 0.0, 1.3, 0.0);
        let sp = spectrum(&sys, Complex64::new(0.0, 0.0), &linspace(-1.0, 1.0, 11), 1.0).unwrap();
        assert_eq!(find_polariton_minima(&sp), Err(Error::FlatSpectrum));
    }

    #[test]
    fn oracle_guards() {
        let sys = SystemParams::symmetric(1.0, 1.0, 0.5, 0.0);
        let pump = PumpSpec::from_omega(1.0).unwrap();
        let b = steadystate::steady_states(&sys, &pump).unwrap()[0];
        assert!(matches!(
            nonlinear_probe_oracle(&sys, &pump, &ProbeSpec::new(0.0, 1.0), &b),
            Err(Error::NotConverged(_))
        ));
        assert!(nonlinear_probe_oracle(&sys, &pump, &ProbeSpec::new(1e-3, 0.0), &b).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-3.0, 7.0, 6);
        assert_eq!(g, vec![-3.0, -1.0, 1.0, 3.0, 5.0, 7.0]);
        assert_eq!(default_probe_grid(1.0).len(), 2001);
    }
}
