//! JSON run configuration and sweep grids.
//!
//! Rates are given as `f/2π` in MHz, the Kerr coefficient in nHz, detunings
//! as multiples of the display scale `S` (`delta_scaled = δ/S`), pump power in
//! mW. Every key is optional; omitted keys take the defaults below.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::output::Format;
use crate::error::{Error, Result};
use crate::params::{self, mhz, nhz, PumpSpec, SystemParams, UnitScale, YigParams};
use crate::spectroscopy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Axis {
    /// Mode detuning δ, in units of S.
    #[serde(rename = "delta")]
    #[value(name = "delta")]
    Delta,
    /// Probe detuning δ_p, in units of S.
    #[serde(rename = "delta_p")]
    #[value(name = "delta_p")]
    DeltaP,
    /// Pump power, mW.
    #[serde(rename = "pump")]
    #[value(name = "pump")]
    Pump,
    /// Dissipative coupling Γ/2π, MHz.
    #[serde(rename = "Gamma")]
    #[value(name = "Gamma")]
    Gamma,
    /// Coherent coupling g/2π, MHz.
    #[serde(rename = "g")]
    #[value(name = "g")]
    G,
}

impl Axis {
    pub fn column(&self) -> &'static str {
        match self {
            Axis::Delta => "delta_scaled",
            Axis::DeltaP => "delta_p_scaled",
            Axis::Pump => "pump_mw",
            Axis::Gamma => "Gamma_mhz",
            Axis::G => "g_mhz",
        }
    }
}

/// `count` points from `min` to `max`, evenly spaced or geometric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            log: false,
        }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.min.is_finite() && self.max.is_finite()) {
            out.push("grid bounds must be finite".into());
        }
        if self.count == 0 || (self.count == 1 && self.min != self.max) {
            out.push("grid count must be at least 2 (or 1 with min = max)".into());
        }
        if self.count >= 2 && !(self.max > self.min) {
            out.push("grid max must exceed min".into());
        }
        if self.log && !(self.min > 0.0) {
            out.push("logarithmic grid needs min > 0".into());
        }
        out
    }

    pub fn values(&self) -> Vec<f64> {
        if self.log {
            spectroscopy::linspace(self.min.ln(), self.max.ln(), self.count)
                .into_iter()
                .enumerate()
                .map(|(k, v)| match k {
                    0 => self.min,
                    k if k + 1 == self.count => self.max,
                    _ => v.exp(),
                })
                .collect()
        } else {
            spectroscopy::linspace(self.min, self.max, self.count)
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    /// `min:max:count[:log]`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("grid '{s}' must look like min:max:count[:log]"));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad grid bound '{t}': {e}"));
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("bad grid count '{}': {e}", parts[2]))?;
        let log = match parts.get(3).map(|t| t.trim()) {
            None => false,
            Some("log") => true,
            Some("lin") => false,
            Some(other) => return Err(format!("unknown grid spacing '{other}'")),
        };
        let g = GridSpec {
            min: num(parts[0])?,
            max: num(parts[1])?,
            count,
            log,
        };
        match g.problems().first() {
            Some(p) => Err(p.clone()),
            None => Ok(g),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    #[serde(flatten)]
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub delta_p_scaled: f64,
    /// Probe amplitude ε in rad/s; takes precedence over `power_fw`.
    pub epsilon_rads: Option<f64>,
    /// Probe power in fW, converted with `omega_p_ghz`.
    pub power_fw: Option<f64>,
    pub omega_p_ghz: Option<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            delta_p_scaled: 0.0,
            epsilon_rads: None,
            power_fw: None,
            omega_p_ghz: Some(10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gamma_a_mhz: f64,
    pub gamma_b_mhz: f64,
    pub coupling_gamma_mhz: f64,
    pub coupling_g_mhz: f64,
    pub delta_scaled: f64,
    pub kerr_nhz: f64,
    pub pump_mw: Option<f64>,
    pub omega_rads: Option<f64>,
    pub kappa_override: Option<f64>,
    pub phi: f64,
    pub detuning_scale_mhz: f64,
    pub rho_m3: f64,
    pub diameter_mm: f64,
    pub probe: ProbeConfig,
    pub sweeps: Vec<SweepSpec>,
    pub output: Option<String>,
    pub format: Format,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma_a_mhz: 5.0,
            gamma_b_mhz: 5.0,
            coupling_gamma_mhz: 5.0,
            coupling_g_mhz: 0.0,
            delta_scaled: -4.0,
            kerr_nhz: 42.1,
            pump_mw: None,
            omega_rads: None,
            kappa_override: None,
            phi: 0.0,
            detuning_scale_mhz: 20.0,
            rho_m3: 4.22e27,
            diameter_mm: 1.0,
            probe: ProbeConfig::default(),
            sweeps: Vec::new(),
            output: None,
            format: Format::Csv,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> std::result::Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    pub fn scale(&self) -> UnitScale {
        UnitScale {
            detuning_scale: mhz(self.detuning_scale_mhz),
        }
    }

    pub fn system(&self) -> SystemParams {
        SystemParams {
            gamma_a: mhz(self.gamma_a_mhz),
            gamma_b: mhz(self.gamma_b_mhz),
            coupling_gamma: mhz(self.coupling_gamma_mhz),
            coupling_g: mhz(self.coupling_g_mhz),
            delta: self.scale().unscaled(self.delta_scaled),
            kerr: nhz(self.kerr_nhz),
            phi: self.phi,
        }
    }

    pub fn yig(&self) -> YigParams {
        YigParams {
            rho: self.rho_m3,
            diameter: self.diameter_mm * 1e-3,
            kappa_drive: self.kappa_override,
            ..YigParams::default()
        }
    }

    /// `omega_rads` wins over `pump_mw`; neither means no pump.
    pub fn pump(&self) -> Result<PumpSpec> {
        match (self.omega_rads, self.pump_mw) {
            (Some(w), _) => PumpSpec::from_omega(w),
            (None, Some(mw)) => self.pump_from_mw(mw),
            (None, None) => PumpSpec::from_omega(0.0),
        }
    }

    pub fn pump_from_mw(&self, mw: f64) -> Result<PumpSpec> {
        PumpSpec::from_power(mw * 1e-3, &self.yig())
    }

    pub fn power_mw(&self, omega: f64) -> f64 {
        params::power_from_omega(omega, &self.yig()) * 1e3
    }

    /// Probe amplitude; the linearized response does not depend on it, so
    /// unit amplitude is used when none is configured.
    pub fn probe_epsilon(&self) -> Result<f64> {
        if let Some(e) = self.probe.epsilon_rads {
            return Ok(e);
        }
        match (self.probe.power_fw, self.probe.omega_p_ghz) {
            (Some(p), Some(f)) => spectroscopy::probe_epsilon(p * 1e-15, mhz(self.coupling_gamma_mhz), mhz(f * 1e3)),
            (Some(_), None) => Err(Error::InvalidArgument("probe.power_fw needs probe.omega_p_ghz".into())),
            _ => Ok(1.0),
        }
    }

    pub fn delta_p(&self) -> f64 {
        self.scale().unscaled(self.probe.delta_p_scaled)
    }

    /// Copy with one axis set to `value` (in that axis' config units).
    pub fn with_axis(&self, axis: Axis, value: f64) -> Self {
        let mut c = self.clone();
        match axis {
            Axis::Delta => c.delta_scaled = value,
            Axis::DeltaP => c.probe.delta_p_scaled = value,
            Axis::Pump => {
                c.pump_mw = Some(value);
                c.omega_rads = None;
            }
            Axis::Gamma => c.coupling_gamma_mhz = value,
            Axis::G => c.coupling_g_mhz = value,
        }
        c
    }

    pub fn sweep_for(&self, axis: Axis) -> Option<GridSpec> {
        self.sweeps.iter().find(|s| s.axis == axis).map(|s| s.grid)
    }

    /// Records `grid` as the sweep for `axis`, replacing any earlier one.
    pub fn set_sweep(&mut self, axis: Axis, grid: GridSpec) {
        self.sweeps.retain(|s| s.axis != axis);
        self.sweeps.push(SweepSpec { axis, grid });
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out: Vec<String> = params::validate(&self.system()).iter().map(|v| v.to_string()).collect();
        if !(self.detuning_scale_mhz > 0.0) {
            out.push("detuning_scale_mhz must be positive".into());
        }
        if let Some(mw) = self.pump_mw {
            if !(mw >= 0.0) {
                out.push("pump_mw must be non-negative".into());
            }
        }
        if let Some(w) = self.omega_rads {
            if !(w >= 0.0) {
                out.push("omega_rads must be non-negative".into());
            }
        }
        if let Some(k) = self.kappa_override {
            if !(k > 0.0) {
                out.push("kappa_override must be positive".into());
            }
        }
        if !(self.rho_m3 > 0.0) || !(self.diameter_mm > 0.0) {
            out.push("rho_m3 and diameter_mm must be positive".into());
        }
        if self.workers == Some(0) {
            out.push("workers must be at least 1".into());
        }
        let mut seen = Vec::new();
        for s in &self.sweeps {
            if seen.contains(&s.axis) {
                out.push(format!("duplicate sweep axis {}", s.axis.column()));
            }
            seen.push(s.axis);
            out.extend(s.grid.problems().into_iter().map(|p| format!("sweep {}: {p}", s.axis.column())));
        }
        out
    }
}
