//! Grid evaluation: a worker pool that returns results in grid order,
//! continuation of the stable steady state along any config axis, and the
//! two-dimensional map.

use rayon::prelude::*;

use super::config::{Axis, RunConfig};
use super::output::{Cell, Table};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::spectroscopy;
use crate::steadystate::{self, SteadyBranch};

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
/// Parallel iterators inside `f` keep their input order, so the result does
/// not depend on the worker count.
pub fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Followed stable steady state at each value of `axis`, or `None` where no
/// stable state exists. A detuning walk starts from the end with the larger
/// `|δ|`; other axes start from their first value. Each step keeps the
/// stable state nearest in `|b0|²` to the last one found.
pub fn follow_axis(cfg: &RunConfig, axis: Axis, values: &[f64]) -> Result<Vec<Option<SteadyBranch>>> {
    let n = values.len();
    let reverse = axis == Axis::Delta && n > 1 && values[n - 1].abs() > values[0].abs();
    let order: Vec<usize> = if reverse { (0..n).rev().collect() } else { (0..n).collect() };
    let mut out = vec![None; n];
    let mut prev: Option<f64> = None;
    for k in order {
        let c = cfg.with_axis(axis, values[k]);
        let branches = steadystate::steady_states(&c.system(), &c.pump()?)?;
        let chosen = match prev {
            Some(x) => steadystate::nearest_stable(&branches, x, |b| b.x),
            None => branches.iter().find(|b| b.stable),
        };
        if let Some(b) = chosen {
            prev = Some(b.x);
            out[k] = Some(*b);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    /// Transmission magnitude |t| at the point's probe detuning.
    #[value(name = "abs_t")]
    AbsT,
    /// Smallest fluctuation linewidth, rad/s.
    #[value(name = "min_linewidth")]
    MinLinewidth,
}

impl Quantity {
    pub fn column(&self) -> &'static str {
        match self {
            Quantity::AbsT => "abs_t",
            Quantity::MinLinewidth => "min_linewidth_rads",
        }
    }
}

fn evaluate(cfg: &RunConfig, branch: Option<&SteadyBranch>, quantity: Quantity) -> Result<(f64, bool)> {
    let Some(b) = branch else {
        return Ok((f64::NAN, false));
    };
    let sys = cfg.system();
    match quantity {
        Quantity::AbsT => match spectroscopy::transmission(&sys, b.b0, cfg.delta_p(), cfg.probe_epsilon()?) {
            Ok(p) => Ok((p.magnitude, true)),
            Err(Error::SingularM(_)) => Ok((f64::INFINITY, false)),
            Err(e) => Err(e),
        },
        Quantity::MinLinewidth => {
            let eigs = dynamics::eigenvalues(&dynamics::build_hnl(&sys, b.b0))?;
            Ok((eigs.min_linewidth(), true))
        }
    }
}

/// `quantity` over the `xs × ys` grid, rows x-major. The steady state is
/// continued along whichever axis is not the probe detuning; when neither
/// is, each x row is continued independently along y.
pub fn map2d(cfg: &RunConfig, x: Axis, xs: &[f64], y: Axis, ys: &[f64], quantity: Quantity) -> Result<Table> {
    if x == y {
        return Err(Error::InvalidArgument("map2d needs two distinct axes".into()));
    }
    // branches[i][j] for the point (xs[i], ys[j]).
    let branches: Vec<Vec<Option<SteadyBranch>>> = if y == Axis::DeltaP {
        follow_axis(cfg, x, xs)?.into_iter().map(|b| vec![b; ys.len()]).collect()
    } else if x == Axis::DeltaP {
        let col = follow_axis(cfg, y, ys)?;
        vec![col; xs.len()]
    } else {
        xs.par_iter()
            .map(|&xv| follow_axis(&cfg.with_axis(x, xv), y, ys))
            .collect::<Result<Vec<_>>>()?
    };
    let points: Vec<(usize, usize)> = (0..xs.len()).flat_map(|i| (0..ys.len()).map(move |j| (i, j))).collect();
    let rows = points
        .par_iter()
        .map(|&(i, j)| {
            let c = cfg.with_axis(x, xs[i]).with_axis(y, ys[j]);
            let b = branches[i][j].as_ref();
            let (value, ok) = evaluate(&c, b, quantity)?;
            Ok(vec![
                Cell::from(xs[i]),
                Cell::from(ys[j]),
                Cell::from(value),
                b.map_or(Cell::Int(-1), |b| Cell::from(b.branch_index)),
                Cell::from(ok),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[x.column(), y.column(), quantity.column(), "branch", "ok"]);
    for r in rows {
        table.push(r);
    }
    Ok(table)
}
