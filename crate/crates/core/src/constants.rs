//! CODATA 2018 physical constants in SI units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.8541878128e-12;
/// Vacuum permeability, H/m.
pub const MU_0: f64 = 1.25663706212e-6;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;
