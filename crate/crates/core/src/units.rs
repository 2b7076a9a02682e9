//! Physical constants and unit conversions.
//!
//! Everything downstream works in SI with angular frequencies, so the
//! conversions from bench-friendly units (nH, fF, GHz, and ordinary
//! frequency) happen exactly once, at the config boundary.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380_649e-23;

pub const NANO: f64 = 1e-9;
pub const FEMTO: f64 = 1e-15;

/// Ordinary frequency in GHz to angular frequency in rad/s.
pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    f_ghz * 1e9 * std::f64::consts::TAU
}

/// Angular frequency in rad/s to ordinary frequency in GHz.
pub fn angular_to_ghz(omega: f64) -> f64 {
    omega / (1e9 * std::f64::consts::TAU)
}
