//! `magbist` command-line front end.
//!
//! Every subcommand writes one table (CSV or JSON) to `--out` or stdout.
//! Exit status is 0 on success, 1 for configuration errors and 2 for
//! numerical failures; diagnostics and timing go to stderr.

pub mod config;
pub mod output;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::dynamics::{self, StateVec};
use crate::error::Error;
use crate::spectroscopy;
use crate::steadystate::{self, SteadyBranch, SweepDirection};
use config::{Axis, GridSpec, RunConfig};
use output::{Cell, Format, Table};
use sweep::Quantity;

#[derive(Debug, Parser)]
#[command(name = "magbist", version, about = "Bistability, spectroscopy and fluctuation modes of a driven cavity-magnon system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for grid sweeps (all cores by default).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Mode detuning δ in units of the display scale.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta_scaled: Option<f64>,
    /// Pump power in mW.
    #[arg(long, global = true)]
    pub pump_mw: Option<f64>,
    /// Pump Rabi frequency in rad/s (overrides --pump-mw).
    #[arg(long, global = true)]
    pub omega_rads: Option<f64>,
    /// Grid for the subcommand's swept axis, `min:max:count[:log]`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchPick {
    Lowest,
    Highest,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelaxStart {
    Vacuum,
    Lowest,
    Middle,
    Highest,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady states at the configured pump, or across a pump grid (mW).
    Steady,
    /// Up and down pump sweeps (grid in mW).
    Hysteresis,
    /// Critical drive, threshold ratio and bistability window.
    Threshold,
    /// Transmission against probe detuning (grid in units of the display scale).
    Spectrum {
        #[arg(long, value_enum, default_value = "lowest")]
        branch: BranchPick,
    },
    /// Lower-polariton shift against pump power (grid in mW), both sweep directions.
    Shifts,
    /// Fluctuation eigenvalues along a detuning grid.
    Eigens,
    /// Narrowest fluctuation mode along a detuning grid.
    Longlived,
    /// Time-domain relaxation of the mean fields.
    Relax {
        /// Duration in units of 1/γ.
        #[arg(long, default_value_t = 20.0)]
        t_gamma: f64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        #[arg(long, value_enum, default_value = "vacuum")]
        start: RelaxStart,
        /// Relative kick added to a steady starting state.
        #[arg(long, default_value_t = 1e-3)]
        kick: f64,
    },
    /// |∂t/∂δ_p| against probe detuning.
    Sense {
        #[arg(long, value_enum, default_value = "lowest")]
        branch: BranchPick,
    },
    /// Two-axis map of |t| or of the minimum linewidth.
    Map2d {
        #[arg(long, value_enum)]
        x: Axis,
        #[arg(long, value_enum)]
        y: Axis,
        #[arg(long, allow_hyphen_values = true)]
        x_grid: Option<GridSpec>,
        #[arg(long, allow_hyphen_values = true)]
        y_grid: Option<GridSpec>,
        #[arg(long, value_enum, default_value = "abs_t")]
        quantity: Quantity,
    },
    /// Check the configuration and list every violation.
    Validate,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Hysteresis => "hysteresis",
            Command::Threshold => "threshold",
            Command::Spectrum { .. } => "spectrum",
            Command::Shifts => "shifts",
            Command::Eigens => "eigens",
            Command::Longlived => "longlived",
            Command::Relax { .. } => "relax",
            Command::Sense { .. } => "sense",
            Command::Map2d { .. } => "map2d",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AsymmetricDamping { .. }
            | Error::ZeroCoupling
            | Error::NegativePower(_)
            | Error::NonPositiveInput(_)
            | Error::InvalidArgument(_) => Failure::Config(e.to_string()),
            other => Failure::Numerical(other),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(Failure::Config(msg)) => {
            eprintln!("magbist: configuration error: {msg}");
            1
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("magbist: numerical failure: {e}");
            2
        }
    }
}

/// Config file plus command-line overrides.
fn resolve_config(cli: &Cli) -> Outcome<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if let Some(d) = cli.delta_scaled {
        cfg.delta_scaled = d;
    }
    if let Some(mw) = cli.pump_mw {
        cfg.pump_mw = Some(mw);
        cfg.omega_rads = None;
    }
    if let Some(w) = cli.omega_rads {
        cfg.omega_rads = Some(w);
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    Ok(cfg)
}

fn default_grid(cfg: &RunConfig, axis: Axis) -> GridSpec {
    let gamma = cfg.system().mean_damping();
    let s = cfg.scale().detuning_scale;
    match axis {
        Axis::Delta => GridSpec::linear(-20.0 * gamma / s, -2.0 * gamma / s, 181),
        Axis::DeltaP => GridSpec::linear(-6.0 * gamma / s, 6.0 * gamma / s, 2001),
        Axis::Pump => GridSpec::linear(0.0, 40.0, 401),
        Axis::Gamma => GridSpec::linear(1.0, 10.0, 10),
        Axis::G => GridSpec::linear(0.0, 10.0, 11),
    }
}

/// `--grid` when given, else the config's sweep for `axis`, else a default;
/// the choice is recorded in the config so the echo can reproduce the run.
fn axis_grid(cfg: &mut RunConfig, axis: Axis, flag: Option<GridSpec>) -> Outcome<Vec<f64>> {
    let grid = flag
        .or_else(|| cfg.sweep_for(axis))
        .unwrap_or_else(|| default_grid(cfg, axis));
    if let Some(p) = grid.problems().first() {
        return Err(Failure::Config(format!("{}: {p}", axis.column())));
    }
    cfg.set_sweep(axis, grid);
    Ok(grid.values())
}

fn check(cfg: &RunConfig) -> Outcome<()> {
    let v = cfg.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(Failure::Config(v.join("; ")))
    }
}

fn execute(cli: &Cli) -> Outcome<()> {
    let mut cfg = resolve_config(cli)?;
    if let Command::Validate = cli.command {
        let v = cfg.violations();
        let text = if v.is_empty() {
            "ok\n".to_string()
        } else {
            v.iter().map(|s| format!("violation: {s}\n")).collect()
        };
        emit(cli, &cfg, &text)?;
        return if v.is_empty() {
            Ok(())
        } else {
            Err(Failure::Config(format!("{} violation(s)", v.len())))
        };
    }
    check(&cfg)?;
    let start = Instant::now();
    let workers = cfg.workers;
    let table = {
        let cfg = &mut cfg;
        sweep::with_pool(workers, move || dispatch(cli, cfg))??
    };
    let meta = json!({
        "command": cli.command.name(),
        "options": format!("{:?}", cli.command),
        "version": env!("CARGO_PKG_VERSION"),
        "config": &cfg,
    });
    let text = table.render(cfg.format, meta.clone());
    emit(cli, &cfg, &text)?;
    if cfg.format == Format::Csv {
        if let Some(path) = output_path(cli, &cfg) {
            let side = PathBuf::from(format!("{}.meta.json", path.display()));
            let body = serde_json::to_string_pretty(&meta).unwrap_or_default() + "\n";
            std::fs::write(&side, body).map_err(|e| Failure::Config(format!("cannot write {}: {e}", side.display())))?;
        }
    }
    eprintln!(
        "magbist {}: {} rows in {:.3} s",
        cli.command.name(),
        table.rows.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn output_path(cli: &Cli, cfg: &RunConfig) -> Option<PathBuf> {
    cli.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from))
}

fn emit(cli: &Cli, cfg: &RunConfig, text: &str) -> Outcome<()> {
    match output_path(cli, cfg) {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn dispatch(cli: &Cli, cfg: &mut RunConfig) -> Outcome<Table> {
    match &cli.command {
        Command::Steady => steady(cli, cfg),
        Command::Hysteresis => hysteresis(cli, cfg),
        Command::Threshold => threshold(cfg),
        Command::Spectrum { branch } => spectrum(cli, cfg, *branch),
        Command::Shifts => shifts(cli, cfg),
        Command::Eigens => eigens(cli, cfg),
        Command::Longlived => longlived(cli, cfg),
        Command::Relax {
            t_gamma,
            samples,
            start,
            kick,
        } => relax(cfg, *t_gamma, *samples, *start, *kick),
        Command::Sense { branch } => sense(cli, cfg, *branch),
        Command::Map2d {
            x,
            y,
            x_grid,
            y_grid,
            quantity,
        } => {
            if x == y {
                return Err(Failure::Config("map2d needs two distinct axes".into()));
            }
            let xs = axis_grid(cfg, *x, *x_grid)?;
            let ys = axis_grid(cfg, *y, *y_grid)?;
            Ok(sweep::map2d(cfg, *x, &xs, *y, &ys, *quantity)?)
        }
        Command::Validate => unreachable!("handled before dispatch"),
    }
}

fn steady(cli: &Cli, cfg: &mut RunConfig) -> Outcome<Table> {
    let sys = cfg.system();
    let pumps: Vec<(f64, crate::params::PumpSpec)> = match cli.grid {
        Some(_) => axis_grid(cfg, Axis::Pump, cli.grid)?
            .into_iter()
            .map(|mw| Ok((mw, cfg.pump_from_mw(mw)?)))
            .collect::<Outcome<_>>()?,
        None => {
            let p = cfg.pump()?;
            vec![(cfg.power_mw(p.omega), p)]
        }
    };
    let per_pump = pumps
        .par_iter()
        .map(|(mw, p)| Ok((*mw, p.intensity(), steadystate::steady_states(&sys, p)?)))
        .collect::<Outcome<Vec<_>>>()?;
    let mut t = Table::new(&[
        "I_rad2s2", "D_p_mw", "y", "x", "re_a0", "im_a0", "re_b0", "im_b0", "branch", "stable",
    ]);
    for (mw, intensity, branches) in per_pump {
        for b in branches {
            t.push(vec![
                intensity.into(),
                mw.into(),
                b.y.into(),
                b.x.into(),
                b.a0.re.into(),
                b.a0.im.into(),
                b.b0.re.into(),
                b.b0.im.into(),
                b.branch_index.into(),
                b.stable.into(),
            ]);
        }
    }
    Ok(t)
}

fn hysteresis(cli: &Cli, cfg: &mut RunConfig) -> Outcome<Table> {
    let sys = cfg.system();
    let mws = axis_grid(cfg, Axis::Pump, cli.grid)?;
    let intensities = mws
        .iter()
        .map(|&mw| Ok(cfg.pump_from_mw(mw)?.intensity()))
        .collect::<Outcome<Vec<f64>>>()?;
    let mut t = Table::new(&["I_rad2s2", "D_p_mw", "y", "branch", "stable", "direction"]);
    for dir in [SweepDirection::Up, SweepDirection::Down] {
        let curve = steadystate::hysteresis_sweep(&sys, &intensities, dir)?;
        let n = mws.len();
        for (k, s) in curve.samples.iter().enumerate() {
            let mw = match dir {
                SweepDirection::Up => mws[k],
                SweepDirection::Down => mws[n - 1 - k],
            };
            t.push(vec![
                s.intensity.into(),
                mw.into(),
                s.y.into(),
                s.branch_index.into(),
                s.stable.into(),
                dir.as_str().into(),
            ]);
        }
    }
    Ok(t)
}

fn threshold(cfg: &mut RunConfig) -> Outcome<Table> {
    let sys = cfg.system();
    let gamma = crate::params::effective_gamma(&sys)?;
    let ic = match steadystate::critical_power(&sys) {
        Ok(v) => v,
        Err(Error::ZeroKerr) => f64::NAN,
        Err(e) => return Err(e.into()),
    };
    let ratio = steadystate::threshold_ratio(gamma, sys.coupling_gamma, sys.coupling_g);
    let (exists, lo, hi) = if sys.is_purely_dissipative() {
        let w = steadystate::turning_points(&sys)?;
        let (lo, hi) = w.intensity_range();
        (w.exists, lo, hi)
    } else {
        (false, f64::NAN, f64::NAN)
    };
    let mut t = Table::new(&[
        "gamma_rads",
        "Gamma_rads",
        "g_rads",
        "kerr_rads",
        "I_c_rad2s2",
        "D_p_c_mw",
        "threshold_ratio",
        "window_exists",
        "I_window_lo",
        "I_window_hi",
    ]);
    t.push(vec![
        gamma.into(),
        sys.coupling_gamma.into(),
        sys.coupling_g.into(),
        sys.kerr.into(),
        ic.into(),
        cfg.power_mw(ic.abs().sqrt()).into(),
        ratio.into(),
        exists.into(),
        lo.into(),
        hi.into(),
    ]);
    Ok(t)
}

fn pick_branches(cfg: &RunConfig, pick: BranchPick) -> Outcome<Vec<SteadyBranch>> {
    let branches = steadystate::steady_states(&cfg.system(), &cfg.pump()?)?;
    let stable: Vec<SteadyBranch> = branches.into_iter().filter(|b| b.stable).collect();
    if stable.is_empty() {
        return Err(Failure::Numerical(Error::NoStableRoot(cfg.pump()?.intensity())));
    }
    Ok(match pick {
        BranchPick::Lowest => vec![stable[0]],
        BranchPick::Highest => vec![stable[stable.len() - 1]],
        BranchPick::All => stable,
    })
}

fn spectrum(cli: &Cli, cfg: &mut RunConfig, pick: BranchPick) -> Outcome<Table> {
    let scaled = axis_grid(cfg, Axis::DeltaP, cli.grid)?;
    let scale = cfg.scale();
    let grid: Vec<f64> = scaled.iter().map(|&v| scale.unscaled(v)).collect();
    let sys = cfg.system();
    let eps = cfg.probe_epsilon()?;
    let mut t = Table::new(&["delta_p_scaled", "delta_p_rads", "re_t", "im_t", "abs_t", "singular_flag", "branch"]);
    for b in pick_branches(cfg, pick)? {
        let sp = spectroscopy::spectrum_on_branch(&sys, &b, &grid, eps)?;
        for (p, &s) in sp.points.iter().zip(&scaled) {
            t.push(vec![
                s.into(),
                p.delta_p.into(),
                p.t.re.into(),
                p.t.im.into(),
                p.magnitude.into(),
                p.singular.into(),
                b.branch_index.into(),
            ]);
        }
    }
    Ok(t)
}

fn sense(cli: &Cli, cfg: &mut RunConfig, pick: BranchPick) -> Outcome<Table> {
    let scaled = axis_grid(cfg, Axis::DeltaP, cli.grid)?;
    let scale = cfg.scale();
    let sys = cfg.system();
    let mut t = Table::new(&["delta_p_scaled", "delta_p_rads", "re_dtddp", "im_dtddp", "abs_dtddp", "singular_flag", "branch"]);
    for b in pick_branches(cfg, pick)? {
        let rows = scaled
            .par_iter()
            .map(|&s| {
                let dp = scale.unscaled(s);
                let (d, singular) = match spectroscopy::sensitivity(&sys, b.b0, dp) {
                    Ok(d) => (d, false),
                    Err(Error::SingularM(_)) => (Complex64::new(f64::NAN, f64::NAN), true),
                    Err(e) => return Err(Failure::from(e)),
                };
                let abs = if singular { f64::INFINITY } else { d.norm() };
                Ok(vec![
                    s.into(),
                    dp.into(),
                    d.re.into(),
                    d.im.into(),
                    abs.into(),
                    singular.into(),
                    b.branch_index.into(),
                ])
            })
            .collect::<Outcome<Vec<_>>>()?;
        for r in rows {
            t.push(r);
        }
    }
    Ok(t)
}

fn shifts(cli: &Cli, cfg: &mut RunConfig) -> Outcome<Table> {
    let sys = cfg.system();
    let mws = axis_grid(cfg, Axis::Pump, cli.grid.or_else(|| cfg.sweep_for(Axis::Pump)).or(Some(GridSpec::linear(0.0, 40.0, 81))))?;
    let omegas = mws
        .iter()
        .map(|&mw| Ok(cfg.pump_from_mw(mw)?.omega))
        .collect::<Outcome<Vec<f64>>>()?;
    let probe_scaled = match cfg.sweep_for(Axis::DeltaP) {
        Some(g) => g.values(),
        None => default_grid(cfg, Axis::DeltaP).values(),
    };
    let scale = cfg.scale();
    let probe: Vec<f64> = probe_scaled.iter().map(|&v| scale.unscaled(v)).collect();
    let mut t = Table::new(&[
        "drive_mw",
        "omega_rads",
        "delta_lp_scaled",
        "delta_lp_rads",
        "shift_scaled",
        "shift_rads",
        "y",
        "branch",
        "direction",
    ]);
    for dir in [SweepDirection::Up, SweepDirection::Down] {
        let curve = spectroscopy::lp_shift_curve(&sys, &omegas, dir, &probe)?;
        let n = mws.len();
        for (k, s) in curve.samples.iter().enumerate() {
            let mw = match dir {
                SweepDirection::Up => mws[k],
                SweepDirection::Down => mws[n - 1 - k],
            };
            t.push(vec![
                mw.into(),
                s.omega.into(),
                scale.scaled(s.delta_lp).into(),
                s.delta_lp.into(),
                scale.scaled(s.shift).into(),
                s.shift.into(),
                s.y.into(),
                s.branch_index.into(),
                dir.as_str().into(),
            ]);
        }
    }
    Ok(t)
}

fn eigens(cli: &Cli, cfg: &mut RunConfig) -> Outcome<Table> {
    let scaled = axis_grid(cfg, Axis::Delta, cli.grid)?;
    let scale = cfg.scale();
    let deltas: Vec<f64> = scaled.iter().map(|&v| scale.unscaled(v)).collect();
    let sys = cfg.system();
    let branches = steadystate::follow_delta(&sys, &cfg.pump()?, &deltas)?;
    let rows = branches
        .par_iter()
        .zip(deltas.par_iter().zip(scaled.par_iter()))
        .map(|(b, (&d, &s))| {
            let (stability, e) = dynamics::branch_stability(&sys.with_delta(d), b.b0)?;
            let mut row: Vec<Cell> = vec![s.into(), d.into()];
            row.extend(e.values.iter().map(|z| Cell::from(z.re)));
            row.extend(e.values.iter().map(|z| Cell::from(z.im)));
            row.push(b.y.into());
            row.push(b.branch_index.into());
            row.push((stability == dynamics::Stability::Stable).into());
            Ok(row)
        })
        .collect::<Outcome<Vec<_>>>()?;
    let mut t = Table::new(&[
        "delta_scaled",
        "delta_rads",
        "re_l1",
        "re_l2",
        "re_l3",
        "re_l4",
        "im_l1",
        "im_l2",
        "im_l3",
        "im_l4",
        "y",
        "branch",
        "stable",
    ]);
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

fn longlived(cli: &Cli, cfg: &mut RunConfig) -> Outcome<Table> {
    let scaled = axis_grid(cfg, Axis::Delta, cli.grid)?;
    let scale = cfg.scale();
    let deltas: Vec<f64> = scaled.iter().map(|&v| scale.unscaled(v)).collect();
    let sys = cfg.system();
    let pump = cfg.pump()?;
    let ll = dynamics::long_lived_mode_scan(&sys, &pump, &deltas)?;
    let gamma = sys.mean_damping();
    let soft = ll.eigs.values[ll.eigs.softest()];
    let mut t = Table::new(&[
        "delta_scaled",
        "delta_rads",
        "delta_over_2gamma",
        "min_linewidth_rads",
        "min_linewidth_over_gamma",
        "re_soft_rads",
        "im_soft_rads",
        "y",
        "x",
        "branch",
        "omega_rads",
    ]);
    t.push(vec![
        scale.scaled(ll.delta).into(),
        ll.delta.into(),
        (ll.delta / (2.0 * gamma)).into(),
        ll.min_linewidth.into(),
        (ll.min_linewidth / gamma).into(),
        soft.re.into(),
        soft.im.into(),
        ll.branch.y.into(),
        ll.branch.x.into(),
        ll.branch.branch_index.into(),
        pump.omega.into(),
    ]);
    Ok(t)
}

fn relax(cfg: &mut RunConfig, t_gamma: f64, samples: usize, start: RelaxStart, kick: f64) -> Outcome<Table> {
    if !(t_gamma > 0.0) || samples < 2 {
        return Err(Failure::Config("relax needs --t-gamma > 0 and --samples >= 2".into()));
    }
    let sys = cfg.system();
    let pump = cfg.pump()?;
    let s0 = match start {
        RelaxStart::Vacuum => StateVec::default(),
        _ => {
            let branches = steadystate::steady_states(&sys, &pump)?;
            let b = match start {
                RelaxStart::Lowest => branches.first(),
                RelaxStart::Highest => branches.last(),
                _ if branches.len() == 3 => branches.get(1),
                _ => None,
            }
            .ok_or_else(|| Failure::Config("requested steady branch does not exist at this pump".into()))?;
            let size = b.a0.norm().max(b.b0.norm()).max(1.0);
            let d = Complex64::new(1.0, 1.0) * (kick * size / 2f64.sqrt());
            StateVec::new(b.a0 + d, b.b0 + d)
        }
    };
    let t_end = t_gamma / sys.mean_damping();
    let traj = dynamics::integrate(&sys, &pump, None, s0, t_end, 1e-9)?;
    let mut t = Table::new(&["t", "re_a", "im_a", "re_b", "im_b"]);
    for time in spectroscopy::linspace(0.0, t_end, samples) {
        let s = traj.sample(time);
        t.push(vec![time.into(), s.a.re.into(), s.a.im.into(), s.b.re.into(), s.b.im.into()]);
    }
    Ok(t)
}
