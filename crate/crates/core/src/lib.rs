//! Driven, dissipatively coupled cavity–magnon system with a Kerr magnon mode.
//!
//! The crate covers steady states and bistability ([`steadystate`]), mean-field
//! dynamics and fluctuation eigenmodes ([`dynamics`]), weak-probe transmission
//! ([`spectroscopy`]) and a sweep-oriented command-line front end ([`cli`]).
//! All rates are angular frequencies in rad/s; see [`params`] for the unit
//! helpers and lab-parameter converters.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod params;
pub mod poly;
pub mod spectroscopy;
pub mod steadystate;

pub use dynamics::{
    build_hnl, classify_stability, eigenvalues, integrate, long_lived_mode_scan, rhs, EigenSet,
    FluctuationMatrix, LongLivedMode, Stability, StateVec, Trajectory,
};
pub use error::{Error, Result};
pub use params::{PumpSpec, ProbeSpec, SystemParams, UnitScale, YigParams};
pub use spectroscopy::{
    find_polariton_minima, lp_shift_curve, nonlinear_probe_oracle, sensitivity, spectrum, transmission,
    ShiftCurve, Spectrum, TransmissionPoint,
};
pub use steadystate::{
    critical_power, hysteresis_sweep, response_coeffs, solve_response, steady_amplitudes_general,
    steady_states, threshold_ratio, turning_points, BistabilityWindow, CubicCoeffs, ResponseCurve,
    SteadyBranch, SweepDirection,
};
