//! Mean-field time evolution, the linearized fluctuation matrix `H_NL`, its
//! eigenvalues and the stability of steady branches.
//!
//! Fluctuations `(δa, δb, δa*, δb*)` evolve as `e^{−iλt}`, so `λ` is an
//! eigenvalue of `H_NL = i·J` with `J` the Jacobian of [`rhs`]. A linewidth is
//! `−Im λ`; a steady state is stable when every linewidth is positive.

pub mod eigen;
pub mod ode;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4};
use crate::params::{PumpSpec, ProbeSpec, SystemParams};
use crate::steadystate::{self, SteadyBranch};

use ode::{OdeOptions, OdeSolution};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StateVec {
    pub a: Complex64,
    pub b: Complex64,
}

impl StateVec {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).sqrt()
    }

    pub fn to_real(self) -> [f64; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    pub fn from_real(y: &[f64; 4]) -> Self {
        Self {
            a: Complex64::new(y[0], y[1]),
            b: Complex64::new(y[2], y[3]),
        }
    }
}

impl From<&SteadyBranch> for StateVec {
    fn from(b: &SteadyBranch) -> Self {
        Self { a: b.a0, b: b.b0 }
    }
}

/// Time derivative of the mean fields, with the optional probe
/// `ε e^{−iδ_p t}` injected into both modes.
pub fn rhs(sys: &SystemParams, pump: &PumpSpec, probe: Option<&ProbeSpec>, t: f64, s: &StateVec) -> StateVec {
    let coup = Complex64::new(sys.coupling_gamma, sys.coupling_g);
    let da = Complex64::new(sys.damping_a(), sys.detuning_a());
    let db = Complex64::new(sys.damping_b(), sys.detuning_b());
    let drive = probe
        .map(|p| p.epsilon * Complex64::from_polar(1.0, -p.delta_p * t))
        .unwrap_or_default();
    StateVec {
        a: -da * s.a - coup * s.b + drive,
        b: -db * s.b - 2.0 * I * sys.kerr * s.b.norm_sqr() * s.b - coup * s.a + pump.omega + drive,
    }
}

/// Sampled solution of the mean-field equations.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<StateVec>,
    pub steps: usize,
    pub rejected: usize,
    solution: OdeSolution<4>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, StateVec) {
        let (t, y) = self.solution.last();
        (t, StateVec::from_real(&y))
    }

    /// Dense output at any time inside the integration span.
    pub fn sample(&self, t: f64) -> StateVec {
        StateVec::from_real(&self.solution.sample(t))
    }
}

pub fn integrate(
    sys: &SystemParams,
    pump: &PumpSpec,
    probe: Option<&ProbeSpec>,
    s0: StateVec,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    let mut opts = OdeOptions::new(tol);
    opts.atol = 1e-14 * s0.norm().max(pump.omega / sys.mean_damping().max(f64::MIN_POSITIVE)).max(1.0);
    let solution = ode::dopri45(
        |t, y: &[f64; 4]| rhs(sys, pump, probe, t, &StateVec::from_real(y)).to_real(),
        0.0,
        s0.to_real(),
        t_end,
        &opts,
    )?;
    Ok(Trajectory {
        t: solution.t.clone(),
        states: solution.y.iter().map(StateVec::from_real).collect(),
        steps: solution.steps,
        rejected: solution.rejected,
        solution,
    })
}

/// `H_NL` in the basis `(δa, δb, δa*, δb*)` and `Δ̃ = δ/2 + 4U|b0|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationMatrix {
    pub entries: Mat4,
    pub delta_tilde: f64,
}

impl FluctuationMatrix {
    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.entries)
    }

    pub fn det(&self) -> Complex64 {
        linalg::det(&self.entries)
    }
}

pub fn build_hnl(sys: &SystemParams, b0: Complex64) -> FluctuationMatrix {
    let zero = Complex64::new(0.0, 0.0);
    let big = sys.coupling_gamma;
    let g = sys.coupling_g;
    let u = sys.kerr;
    let ka = sys.damping_a();
    let kb = sys.damping_b();
    let delta_tilde = sys.detuning_b() + 4.0 * u * b0.norm_sqr();
    let kerr = 2.0 * u * b0 * b0;
    let entries = [
        [Complex64::new(sys.detuning_a(), -ka), Complex64::new(g, -big), zero, zero],
        [Complex64::new(g, -big), Complex64::new(delta_tilde, -kb), zero, kerr],
        [zero, zero, Complex64::new(-sys.detuning_a(), -ka), Complex64::new(-g, -big)],
        [zero, -kerr.conj(), Complex64::new(-g, -big), Complex64::new(-delta_tilde, -kb)],
    ];
    FluctuationMatrix { entries, delta_tilde }
}

/// Eigenvalues sorted by real part, ties broken by imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSet {
    pub values: [Complex64; 4],
}

impl EigenSet {
    pub fn from_values(mut values: [Complex64; 4]) -> Self {
        values.sort_by(|l, r| l.re.total_cmp(&r.re).then(l.im.total_cmp(&r.im)));
        Self { values }
    }

    pub fn linewidths(&self) -> [f64; 4] {
        self.values.map(|z| -z.im)
    }

    pub fn min_linewidth(&self) -> f64 {
        self.linewidths().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Index of the eigenvalue with the smallest linewidth.
    pub fn softest(&self) -> usize {
        let lw = self.linewidths();
        (0..4).min_by(|&i, &j| lw[i].total_cmp(&lw[j])).unwrap_or(0)
    }

    /// Mean linewidth `−ΣIm λ / 4`, equal to the mean damping of the two modes.
    pub fn damping_scale(&self) -> f64 {
        -self.values.iter().map(|z| z.im).sum::<f64>() / 4.0
    }
}

pub fn eigenvalues(h: &FluctuationMatrix) -> Result<EigenSet> {
    eigen::eigenvalues_raw(&h.entries).map(EigenSet::from_values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

/// Margin `10⁻⁶·γ` around zero linewidth, with `γ` read off the trace.
pub fn classify_stability(eigs: &EigenSet) -> Stability {
    let tol = 1e-6 * eigs.damping_scale().abs();
    let ims = eigs.values.map(|z| z.im);
    if ims.iter().any(|&im| im > tol) {
        Stability::Unstable
    } else if ims.iter().any(|&im| im.abs() <= tol) {
        Stability::Marginal
    } else {
        Stability::Stable
    }
}

pub fn branch_stability(sys: &SystemParams, b0: Complex64) -> Result<(Stability, EigenSet)> {
    let eigs = eigenvalues(&build_hnl(sys, b0))?;
    Ok((classify_stability(&eigs), eigs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongLivedMode {
    pub delta: f64,
    pub min_linewidth: f64,
    pub eigs: EigenSet,
    pub branch: SteadyBranch,
    /// Grid point nearest the optimum before refinement.
    pub grid_index: usize,
    /// Minimum linewidth at each grid point.
    pub grid_linewidths: Vec<f64>,
}

/// Minimum linewidth of the stable branch continuing `x_ref` at detuning
/// `delta`, or `None` when that branch no longer exists there.
fn linewidth_near(sys: &SystemParams, pump: &PumpSpec, delta: f64, x_ref: f64) -> Result<Option<(f64, SteadyBranch, EigenSet)>> {
    let s = sys.with_delta(delta);
    let branches = steadystate::steady_states(&s, pump)?;
    let Some(b) = steadystate::nearest_stable(&branches, x_ref, |b| b.x) else {
        return Ok(None);
    };
    if (b.x - x_ref).abs() > 0.5 * x_ref.max(f64::MIN_POSITIVE) {
        return Ok(None);
    }
    let eigs = eigenvalues(&build_hnl(&s, b.b0))?;
    Ok(Some((eigs.min_linewidth(), *b, eigs)))
}

type Candidate = (f64, f64, SteadyBranch, EigenSet);

fn golden_refine(sys: &SystemParams, pump: &PumpSpec, lo: f64, hi: f64, x_ref: f64) -> Result<Option<Candidate>> {
    let eval = |d: f64| -> Result<(f64, Option<(SteadyBranch, EigenSet)>)> {
        Ok(match linewidth_near(sys, pump, d, x_ref)? {
            Some((lw, b, e)) => (lw, Some((b, e))),
            None => (f64::INFINITY, None),
        })
    };
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..200 {
        if (b - a) <= 1e-13 * a.abs().max(b.abs()) {
            break;
        }
        if fc.0 <= fd.0 {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = eval(d)?;
        }
    }
    let mut best: Option<Candidate> = None;
    for (delta, (lw, found)) in [(c, fc), (d, fd)] {
        if let Some((branch, eigs)) = found {
            if best.as_ref().is_none_or(|b| lw < b.1) {
                best = Some((delta, lw, branch, eigs));
            }
        }
    }
    Ok(best)
}

/// Last detuning between `inside` and `outside` at which the branch with
/// index `index` of a three-root configuration still exists and is stable.
fn fold_edge(sys: &SystemParams, pump: &PumpSpec, inside: f64, outside: f64, index: usize) -> Result<Option<Candidate>> {
    let probe = |d: f64| -> Result<Option<SteadyBranch>> {
        let branches = steadystate::steady_states(&sys.with_delta(d), pump)?;
        Ok(if branches.len() == 3 && branches[index].stable {
            Some(branches[index])
        } else {
            None
        })
    };
    let Some(mut found) = probe(inside)? else {
        return Ok(None);
    };
    let (mut a, mut b) = (inside, outside);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * a.abs().max(b.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        match probe(m)? {
            Some(br) => {
                a = m;
                found = br;
            }
            None => b = m,
        }
    }
    let eigs = eigenvalues(&build_hnl(&sys.with_delta(a), found.b0))?;
    Ok(Some((a, eigs.min_linewidth(), found, eigs)))
}

/// Detuning at which the followed stable branch has its narrowest
/// fluctuation mode.
///
/// The branch is continued across `delta_grid` by nearest `|b0|²` and the
/// best grid point is refined by golden-section search over its neighbouring
/// intervals. Where the number of steady states changes between two grid
/// points the followed branch may end at a fold; its linewidth closes like a
/// square root there, so the edge is located by bisection and evaluated too.
pub fn long_lived_mode_scan(sys: &SystemParams, pump: &PumpSpec, delta_grid: &[f64]) -> Result<LongLivedMode> {
    let branches = steadystate::follow_delta(sys, pump, delta_grid)?;
    let mut lws = Vec::with_capacity(branches.len());
    let mut eig_list = Vec::with_capacity(branches.len());
    let mut counts = Vec::with_capacity(branches.len());
    for (b, &delta) in branches.iter().zip(delta_grid) {
        let s = sys.with_delta(delta);
        let eigs = eigenvalues(&build_hnl(&s, b.b0))?;
        lws.push(eigs.min_linewidth());
        eig_list.push(eigs);
        counts.push(steadystate::steady_states(&s, pump)?.len());
    }
    let k = (0..lws.len())
        .min_by(|&i, &j| lws[i].total_cmp(&lws[j]))
        .ok_or_else(|| Error::InvalidArgument("detuning grid is empty".into()))?;

    let mut best: Candidate = (delta_grid[k], lws[k], branches[k], eig_list[k]);
    let mut consider = |c: Option<Candidate>| {
        if let Some(c) = c {
            if c.1 < best.1 {
                best = c;
            }
        }
    };
    let n = delta_grid.len();
    if n > 1 {
        let lo = delta_grid[k.saturating_sub(1)];
        let hi = delta_grid[(k + 1).min(n - 1)];
        consider(golden_refine(sys, pump, lo, hi, branches[k].x)?);
        for j in 0..n - 1 {
            let (inside, outside) = match (counts[j], counts[j + 1]) {
                (3, c) if c != 3 => (j, j + 1),
                (c, 3) if c != 3 => (j + 1, j),
                _ => continue,
            };
            let index = branches[inside].branch_index;
            consider(fold_edge(sys, pump, delta_grid[inside], delta_grid[outside], index)?);
        }
    }
    Ok(LongLivedMode {
        delta: best.0,
        min_linewidth: best.1,
        branch: best.2,
        eigs: best.3,
        grid_index: k,
        grid_linewidths: lws,
    })
}
