//! Model parameters, unit conventions and the YIG lab-to-model converters.
//!
//! All rates and detunings are angular frequencies in rad/s. Lab inputs quoted
//! as `f/2π` in MHz go through [`mhz`]; the Kerr coefficient quoted in nHz goes
//! through [`nhz`].

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Gyromagnetic ratio of the electron spin in Gaussian units, rad s⁻¹ G⁻¹.
pub const GYROMAGNETIC_RATIO_CGS: f64 = 1.760_859_630_23e7;
/// Speed of light in cm/s.
pub const SPEED_OF_LIGHT_CGS: f64 = 2.997_924_58e10;

/// rad/s from a frequency `f/2π` given in MHz.
pub fn mhz(value: f64) -> f64 {
    TWO_PI * value * 1e6
}

/// rad/s from a frequency `f/2π` given in nHz.
pub fn nhz(value: f64) -> f64 {
    TWO_PI * value * 1e-9
}

/// Inverse of [`mhz`].
pub fn to_mhz(rate: f64) -> f64 {
    rate / (TWO_PI * 1e6)
}

/// Rates and detunings of the driven two-mode model.
///
/// Mode `a` sits at detuning `-delta/2` from the pump and mode `b` (the Kerr
/// mode) at `+delta/2`. `coupling_gamma` is the waveguide-mediated
/// dissipative coupling, `coupling_g` the direct coherent one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub coupling_gamma: f64,
    pub coupling_g: f64,
    pub delta: f64,
    pub kerr: f64,
    pub phi: f64,
}

impl SystemParams {
    /// Purely dissipative, equal intrinsic damping `gamma0` on both modes.
    pub fn symmetric(gamma0: f64, coupling_gamma: f64, delta: f64, kerr: f64) -> Self {
        Self {
            gamma_a: gamma0,
            gamma_b: gamma0,
            coupling_gamma,
            coupling_g: 0.0,
            delta,
            kerr,
            phi: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_coupling_g(mut self, g: f64) -> Self {
        self.coupling_g = g;
        self
    }

    pub fn with_coupling_gamma(mut self, coupling_gamma: f64) -> Self {
        self.coupling_gamma = coupling_gamma;
        self
    }

    pub fn with_kerr(mut self, kerr: f64) -> Self {
        self.kerr = kerr;
        self
    }

    pub fn detuning_a(&self) -> f64 {
        -0.5 * self.delta
    }

    pub fn detuning_b(&self) -> f64 {
        0.5 * self.delta
    }

    /// Total amplitude damping of mode a, intrinsic plus reservoir.
    pub fn damping_a(&self) -> f64 {
        self.gamma_a + self.coupling_gamma
    }

    pub fn damping_b(&self) -> f64 {
        self.gamma_b + self.coupling_gamma
    }

    /// Mean total damping; equals γ0 + Γ in the symmetric case.
    pub fn mean_damping(&self) -> f64 {
        0.5 * (self.gamma_a + self.gamma_b) + self.coupling_gamma
    }

    pub fn is_symmetric(&self) -> bool {
        self.gamma_a == self.gamma_b
    }

    /// Symmetric damping, g = 0 and Γ > 0: the setting of the closed-form
    /// response cubic, turning points and threshold formulas.
    pub fn is_purely_dissipative(&self) -> bool {
        self.is_symmetric() && self.coupling_g == 0.0 && self.coupling_gamma > 0.0
    }
}

/// γ = γ0 + Γ for equal intrinsic dampings.
pub fn effective_gamma(sys: &SystemParams) -> Result<f64> {
    if !sys.is_symmetric() {
        return Err(Error::AsymmetricDamping {
            gamma_a: sys.gamma_a,
            gamma_b: sys.gamma_b,
        });
    }
    Ok(sys.gamma_a + sys.coupling_gamma)
}

/// One failed parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every invariant violation of `sys`; empty means valid.
pub fn validate(sys: &SystemParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut nonneg = |field: &'static str, label: &str, v: f64| {
        if !v.is_finite() {
            out.push(Violation {
                field,
                message: format!("{label} must be finite"),
            });
        } else if v < 0.0 {
            out.push(Violation {
                field,
                message: format!("{label} ≥ 0"),
            });
        }
    };
    nonneg("gamma_a", "gamma_a", sys.gamma_a);
    nonneg("gamma_b", "gamma_b", sys.gamma_b);
    nonneg("coupling_gamma", "Gamma", sys.coupling_gamma);
    for (field, v) in [
        ("coupling_g", sys.coupling_g),
        ("delta", sys.delta),
        ("kerr", sys.kerr),
    ] {
        if !v.is_finite() {
            out.push(Violation {
                field,
                message: format!("{field} must be finite"),
            });
        }
    }
    if sys.phi != 0.0 {
        out.push(Violation {
            field: "phi",
            message: "phi must be 0 in this release".to_string(),
        });
    }
    out
}

/// Strong pump: Rabi frequency Ω and, when known, the lab power it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    pub omega: f64,
    pub power_watts: Option<f64>,
}

impl PumpSpec {
    pub fn from_omega(omega: f64) -> Result<Self> {
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pump Rabi frequency must be finite and non-negative, got {omega}"
            )));
        }
        Ok(Self {
            omega,
            power_watts: None,
        })
    }

    pub fn from_intensity(intensity: f64) -> Result<Self> {
        if !(intensity >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pump intensity must be non-negative, got {intensity}"
            )));
        }
        Self::from_omega(intensity.sqrt())
    }

    pub fn from_power(power_watts: f64, yig: &YigParams) -> Result<Self> {
        let omega = omega_from_power(power_watts, yig)?;
        Ok(Self {
            omega,
            power_watts: Some(power_watts),
        })
    }

    /// I = Ω².
    pub fn intensity(&self) -> f64 {
        self.omega * self.omega
    }
}

/// Weak probe of amplitude ε at detuning δ_p = ω_p − ω_d from the pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub epsilon: f64,
    pub delta_p: f64,
    pub power_watts: Option<f64>,
    pub omega_p: Option<f64>,
}

impl ProbeSpec {
    pub fn new(epsilon: f64, delta_p: f64) -> Self {
        Self {
            epsilon,
            delta_p,
            power_watts: None,
            omega_p: None,
        }
    }
}

/// YIG sphere material and geometry.
///
/// `rho` is in m⁻³ and `diameter` in m. The pump conversion constant
/// `kappa_drive` ((rad/s)/√W) overrides the built-in Gaussian-unit
/// evaluation when set. The remaining fields only feed the magnon frequency
/// and Kerr coefficient, and are used in whatever consistent unit system the
/// caller supplies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YigParams {
    pub rho: f64,
    pub diameter: f64,
    pub gamma_e: f64,
    pub b0_field: Option<f64>,
    pub k_anisotropy: Option<f64>,
    pub m_sat: Option<f64>,
    pub kappa_drive: Option<f64>,
}

impl Default for YigParams {
    /// 1 mm sphere with Fe³⁺ density 4.22×10²⁷ m⁻³.
    fn default() -> Self {
        Self {
            rho: 4.22e27,
            diameter: 1e-3,
            gamma_e: GYROMAGNETIC_RATIO_CGS,
            b0_field: None,
            k_anisotropy: None,
            m_sat: None,
            kappa_drive: None,
        }
    }
}

impl YigParams {
    pub fn volume(&self) -> f64 {
        PI / 6.0 * self.diameter.powi(3)
    }

    pub fn collective_spin(&self) -> Result<f64> {
        collective_spin(self.rho, self.diameter)
    }

    /// κ in Ω = κ√D_p, (rad/s)/√W.
    pub fn kappa(&self) -> f64 {
        self.kappa_drive
            .unwrap_or_else(|| gaussian_drive_constant(self.rho, self.diameter, self.gamma_e))
    }

    /// Kerr coefficient γ_e² K_an / (M² V).
    pub fn kerr(&self) -> Result<f64> {
        let (k, m) = self.anisotropy_pair()?;
        Ok(self.gamma_e.powi(2) * k / (m * m * self.volume()))
    }

    /// Kittel-like magnon frequency γ_e B0 − 2ħ γ_e² S K_an / (M² V), with
    /// `hbar` in the caller's unit system.
    pub fn magnon_frequency(&self, hbar: f64) -> Result<f64> {
        let b0 = self
            .b0_field
            .ok_or_else(|| Error::InvalidArgument("b0_field is not set".into()))?;
        let (k, m) = self.anisotropy_pair()?;
        let spin = self.collective_spin()?;
        Ok(self.gamma_e * b0 - 2.0 * hbar * self.gamma_e.powi(2) * spin * k / (m * m * self.volume()))
    }

    fn anisotropy_pair(&self) -> Result<(f64, f64)> {
        match (self.k_anisotropy, self.m_sat) {
            (Some(k), Some(m)) if m > 0.0 => Ok((k, m)),
            _ => Err(Error::InvalidArgument(
                "k_anisotropy and a positive m_sat are required".into(),
            )),
        }
    }
}

/// Evaluates γ_e √(5πρd/(3c)) in Gaussian units (ρ in cm⁻³, d in cm, c in
/// cm/s, power in erg/s) and re-expresses it per √W.
pub fn gaussian_drive_constant(rho_si: f64, diameter_si: f64, gamma_e_cgs: f64) -> f64 {
    let rho_cgs = rho_si * 1e-6;
    let d_cgs = diameter_si * 1e2;
    let erg_per_joule = 1e7;
    gamma_e_cgs * (5.0 * PI * rho_cgs * d_cgs * erg_per_joule / (3.0 * SPEED_OF_LIGHT_CGS)).sqrt()
}

/// Pump Rabi frequency Ω = κ√D_p.
pub fn omega_from_power(power_watts: f64, yig: &YigParams) -> Result<f64> {
    if !(power_watts >= 0.0) {
        return Err(Error::NegativePower(power_watts));
    }
    Ok(yig.kappa() * power_watts.sqrt())
}

/// Inverse of [`omega_from_power`].
pub fn power_from_omega(omega: f64, yig: &YigParams) -> f64 {
    (omega / yig.kappa()).powi(2)
}

/// S = (5/2) ρ V for a sphere of diameter `d`.
pub fn collective_spin(rho: f64, d: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::NonPositiveInput("spin density"));
    }
    if !(d > 0.0) {
        return Err(Error::NonPositiveInput("sphere diameter"));
    }
    Ok(2.5 * rho * PI / 6.0 * d.powi(3))
}

/// Display scale for detunings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScale {
    pub detuning_scale: f64,
}

impl Default for UnitScale {
    /// S = 2π × 20 MHz.
    fn default() -> Self {
        Self {
            detuning_scale: mhz(20.0),
        }
    }
}

impl UnitScale {
    pub fn new(detuning_scale: f64) -> Result<Self> {
        if !(detuning_scale > 0.0) {
            return Err(Error::NonPositiveInput("detuning scale"));
        }
        Ok(Self { detuning_scale })
    }

    pub fn scaled(&self, detuning: f64) -> f64 {
        detuning / self.detuning_scale
    }

    pub fn unscaled(&self, scaled: f64) -> f64 {
        scaled * self.detuning_scale
    }
}
