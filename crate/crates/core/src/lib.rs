//! Spectral-domain simulation of dispersion cancellation.
//!
//! Two signal chains share one set of spectral primitives:
//!
//! * the classical chain: a pair of Gaussian pulses, opposite-sign quadratic
//!   dispersion in each arm, a relative delay, second-harmonic generation and
//!   a narrow-band monochromator ([`shg`]);
//! * the quantum chain: a Gaussian joint spectral amplitude with tunable
//!   energy correlation, dispersion on each photon and the two-time
//!   coincidence distribution ([`biphoton`]).
//!
//! Both chains are checked against closed-form Gaussian results, and
//! [`analysis`] provides trace fitting plus the classical time-difference
//! inequality.
//!
//! Units are fixed throughout: angular frequency in rad/fs, time in fs,
//! quadratic dispersion coefficients in fs², wavelength in nm and glass
//! length in mm.

pub mod analysis;
pub mod biphoton;
mod error;
pub mod shg;
pub mod spectral;

pub use error::{Error, Result};

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792_458;

/// Ratio FWHM / rms width of a Gaussian, 2√(2 ln 2).
pub const FWHM_PER_RMS: f64 = 2.354_820_045_030_949_3;

/// Converts a Gaussian rms width to its full width at half maximum.
pub fn fwhm_from_rms(rms: f64) -> f64 {
    FWHM_PER_RMS * rms
}
