//! Steady-state probability amplitudes of the N-type four-level atom and the
//! microscopic polarizabilities derived from them.
//!
//! Level scheme: ground pair |1⟩, |2⟩ and excited pair |3⟩, |4⟩. The coupling
//! standing wave drives |1⟩–|3⟩ (appearing in the |2⟩–|3⟩ amplitude coupling),
//! the signal standing wave drives |1⟩–|4⟩, and the weak probe couples
//! |2⟩–|3⟩ electrically and |1⟩–|2⟩ magnetically. The ground amplitude A₁ is
//! held at unity (weak-probe limit).
//!
//! Two independent routes are provided. [`steady_linear_solve`] assembles the
//! 3×3 system obtained by zeroing the time derivatives of A₂, A₃, A₄ in the
//! equations of motion and is the ground truth for everything downstream.
//! [`steady_closed_form`] evaluates the published closed-form solution and is
//! kept as a cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{EPSILON_0, HBAR, MU_0, SPEED_OF_LIGHT};
use crate::linalg::{self, Lu3, Matrix3};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const HALF_I: Complex64 = Complex64 { re: 0.0, im: 0.5 };

/// A probe is considered weak while |Ω_pE| stays below this fraction of γ₃.
pub const WEAK_PROBE_RATIO: f64 = 1e-2;

/// Reference electric probe Rabi frequency used for polarizabilities, in
/// units of `gamma_unit`.
pub const REFERENCE_PROBE: f64 = 1e-3;

/// Atomic and material parameters. Rates and detunings are angular
/// frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Spontaneous decay rate of |3⟩.
    pub gamma3: f64,
    /// Spontaneous decay rate of |4⟩.
    pub gamma4: f64,
    /// Dephasing rate of the |1⟩–|2⟩ coherence.
    pub gamma12: f64,
    /// Probe detuning ω₃₂ − ω_p.
    pub delta_p: f64,
    /// Coupling detuning ω₃₁ − ω_c.
    pub delta_c: f64,
    /// Signal detuning ω₄₁ − ω_s.
    pub delta_s: f64,
    /// Electric dipole moment of |2⟩–|3⟩, C·m.
    pub d23: f64,
    /// Magnetic dipole moment of |1⟩–|2⟩, C·m²·s⁻¹.
    pub mu12: f64,
    /// Atomic number density, m⁻³.
    pub density: f64,
    /// Reference rate γ used to scale frequencies, rad/s.
    pub gamma_unit: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter `{field}`: {reason}")]
pub struct ParamError {
    pub field: &'static str,
    pub reason: String,
}

impl SystemParams {
    /// The parameter set behind the published 2-D maps, with the probe
    /// detuning given in units of γ = 10⁸ s⁻¹.
    pub fn paper_defaults(delta_p_units: f64) -> Self {
        let g = 1e8;
        Self {
            gamma3: 0.3 * g,
            gamma4: 0.1 * g,
            gamma12: 1e-3 * g,
            delta_p: delta_p_units * g,
            delta_c: -0.15 * g,
            delta_s: 0.15 * g,
            d23: 3e-29,
            mu12: 1.3e-22,
            density: 2e23,
            gamma_unit: g,
        }
    }

    pub fn with_delta_p(self, delta_p: f64) -> Self {
        Self { delta_p, ..self }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let finite = [
            ("gamma3", self.gamma3),
            ("gamma4", self.gamma4),
            ("gamma12", self.gamma12),
            ("delta_p", self.delta_p),
            ("delta_c", self.delta_c),
            ("delta_s", self.delta_s),
            ("d23", self.d23),
            ("mu12", self.mu12),
            ("density", self.density),
            ("gamma_unit", self.gamma_unit),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(ParamError { field, reason: format!("must be finite, got {value}") });
            }
        }
        let positive = [
            ("gamma3", self.gamma3),
            ("gamma4", self.gamma4),
            ("density", self.density),
            ("gamma_unit", self.gamma_unit),
            ("d23", self.d23),
            ("mu12", self.mu12),
        ];
        for (field, value) in positive {
            if value <= 0.0 {
                return Err(ParamError { field, reason: format!("must be > 0, got {value}") });
            }
        }
        if self.gamma12 < 0.0 {
            return Err(ParamError {
                field: "gamma12",
                reason: format!("must be >= 0, got {}", self.gamma12),
            });
        }
        Ok(())
    }

    /// γ₃/2 + iΔ_p
    fn excited3_factor(&self) -> Complex64 {
        Complex64::new(self.gamma3 / 2.0, self.delta_p)
    }

    /// γ₄/2 + i(Δ_s + Δ_p − Δ_c)
    fn excited4_factor(&self) -> Complex64 {
        Complex64::new(self.gamma4 / 2.0, self.delta_s + self.delta_p - self.delta_c)
    }

    /// γ₁₂/2 + i(Δ_p − Δ_c)
    fn ground_factor(&self) -> Complex64 {
        Complex64::new(self.gamma12 / 2.0, self.delta_p - self.delta_c)
    }
}

/// Local Rabi frequencies of the two standing waves at one point, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalDrive {
    pub omega_c: Complex64,
    pub omega_s: Complex64,
}

impl LocalDrive {
    pub fn real(omega_c: f64, omega_s: f64) -> Self {
        Self { omega_c: Complex64::new(omega_c, 0.0), omega_s: Complex64::new(omega_s, 0.0) }
    }

    pub fn zero() -> Self {
        Self::real(0.0, 0.0)
    }
}

/// Electric and magnetic probe Rabi frequencies, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeDrive {
    pub omega_pe: Complex64,
    pub omega_pb: Complex64,
}

impl ProbeDrive {
    /// Ties the magnetic Rabi frequency to the electric one through the
    /// plane-wave relation E_p/B_p = c: Ω_pB = Ω_pE·μ₁₂/(c·d₂₃).
    pub fn from_electric(params: &SystemParams, omega_pe: Complex64) -> Self {
        let omega_pb = omega_pe * (params.mu12 / (SPEED_OF_LIGHT * params.d23));
        Self { omega_pe, omega_pb }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { omega_pe: self.omega_pe * factor, omega_pb: self.omega_pb * factor }
    }

    pub fn is_weak(&self, params: &SystemParams) -> bool {
        self.omega_pe.norm() <= WEAK_PROBE_RATIO * params.gamma3
    }
}

/// Probability amplitudes of |2⟩, |3⟩, |4⟩ with A₁ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyAmplitudes {
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
}

impl SteadyAmplitudes {
    pub fn components(&self) -> [(&'static str, Complex64); 3] {
        [("a2", self.a2), ("a3", self.a3), ("a4", self.a4)]
    }
}

/// Microscopic polarizability volumes, m³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polarizabilities {
    pub gamma_e: Complex64,
    pub gamma_m: Complex64,
}

/// Numerical guards for the steady-state solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverLimits {
    /// |ξ| must be at least this times `gamma_unit`³.
    pub xi_floor: f64,
    /// Largest accepted 1-norm condition number of the amplitude system.
    pub condition_max: f64,
}

impl Default for SolverLimits {
    fn default() -> Self {
        Self { xi_floor: 1e-12, condition_max: 1e12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error, Serialize)]
pub enum SteadyError {
    #[error("NearSingular: |xi| = {xi_abs:e} below floor {floor:e}")]
    NearSingular { xi_abs: f64, floor: f64 },
    #[error("SingularSystem: condition estimate {condition:e} exceeds {limit:e}")]
    SingularSystem { condition: f64, limit: f64 },
    #[error("ZeroProbe: reference probe amplitude must be nonzero")]
    ZeroProbe,
}

impl SteadyError {
    pub fn kind(&self) -> &'static str {
        match self {
            SteadyError::NearSingular { .. } => "NearSingular",
            SteadyError::SingularSystem { .. } => "SingularSystem",
            SteadyError::ZeroProbe => "ZeroProbe",
        }
    }
}

/// The common denominator ξ of the closed-form amplitudes.
pub fn xi(params: &SystemParams, drive: &LocalDrive) -> Complex64 {
    let f3 = params.excited3_factor();
    let f4 = params.excited4_factor();
    let f12 = params.ground_factor();
    let c2 = drive.omega_c.norm_sqr() / 4.0;
    let s2 = drive.omega_s.norm_sqr() / 4.0;
    -(c2 + f12 * f3) * f4 - s2 * f3
}

/// Closed-form steady amplitudes, evaluated term by term as published.
pub fn steady_closed_form(
    params: &SystemParams,
    drive: &LocalDrive,
    probe: &ProbeDrive,
    limits: &SolverLimits,
) -> Result<SteadyAmplitudes, SteadyError> {
    let xi = xi(params, drive);
    let floor = limits.xi_floor * params.gamma_unit.powi(3);
    if !(xi.norm() >= floor) {
        return Err(SteadyError::NearSingular { xi_abs: xi.norm(), floor });
    }
    let f3 = params.excited3_factor();
    let f4 = params.excited4_factor();
    let f12 = params.ground_factor();
    let (oc, os) = (drive.omega_c, drive.omega_s);
    let (pe, pb) = (probe.omega_pe, probe.omega_pb);

    let a2 = f4 * (oc.conj() * pe / 4.0 - HALF_I * f3 * pb) / xi;
    let a3 = -HALF_I / xi * f4 * (f12 * pe + HALF_I * oc * pb)
        - I / (8.0 * xi) * os * os.conj() * pe;
    let a4 = -HALF_I / xi * (-0.25 * pe * oc.conj() + HALF_I * f3 * pb) * os;
    Ok(SteadyAmplitudes { a2, a3, a4 })
}

/// Coefficient matrix and right-hand side of the stationary amplitude
/// equations, unknowns ordered (A₂, A₃, A₄).
pub fn steady_system(
    params: &SystemParams,
    drive: &LocalDrive,
    probe: &ProbeDrive,
) -> (Matrix3, [Complex64; 3]) {
    let zero = Complex64::new(0.0, 0.0);
    let (oc, os) = (drive.omega_c, drive.omega_s);
    // dA2/dt = -i(Δp-Δc)A2 + i/2(Ωc* A3 + Ωs* A4) + i/2 ΩpB* A1 - γ12/2 A2
    // dA3/dt = -iΔp A3 + i/2(Ωc A2 + ΩpE A1) - γ3/2 A3
    // dA4/dt = -i(Δp+Δs-Δc)A4 + i/2 Ωs A2 - γ4/2 A4
    let m = [
        [-params.ground_factor(), HALF_I * oc.conj(), HALF_I * os.conj()],
        [HALF_I * oc, -params.excited3_factor(), zero],
        [HALF_I * os, zero, -params.excited4_factor()],
    ];
    let rhs = [-HALF_I * probe.omega_pb.conj(), -HALF_I * probe.omega_pe, zero];
    (m, rhs)
}

/// Stationary amplitudes from a direct solve of the equations of motion.
pub fn steady_linear_solve(
    params: &SystemParams,
    drive: &LocalDrive,
    probe: &ProbeDrive,
    limits: &SolverLimits,
) -> Result<SteadyAmplitudes, SteadyError> {
    let (m, rhs) = steady_system(params, drive, probe);
    let singular = |condition| SteadyError::SingularSystem { condition, limit: limits.condition_max };
    let lu = Lu3::factor(m).ok_or(singular(f64::INFINITY))?;
    let condition = linalg::norm1(&m) * linalg::norm1(&lu.inverse());
    if !(condition <= limits.condition_max) {
        return Err(singular(condition));
    }
    let [a2, a3, a4] = lu.solve(&rhs);
    Ok(SteadyAmplitudes { a2, a3, a4 })
}

/// Polarizabilities from amplitudes computed under `probe`:
/// γ_e = 2d₂₃²A₃/(ħε₀Ω_pE), γ_m = 2μ₀μ₁₂²A₂/(ħΩ_pB).
pub fn polarizabilities_from_amplitudes(
    params: &SystemParams,
    probe: &ProbeDrive,
    amps: &SteadyAmplitudes,
) -> Result<Polarizabilities, SteadyError> {
    if probe.omega_pe.norm() == 0.0 || probe.omega_pb.norm() == 0.0 {
        return Err(SteadyError::ZeroProbe);
    }
    let gamma_e = 2.0 * params.d23.powi(2) * amps.a3 / (HBAR * EPSILON_0 * probe.omega_pe);
    let gamma_m = 2.0 * MU_0 * params.mu12.powi(2) * amps.a2 / (HBAR * probe.omega_pb);
    Ok(Polarizabilities { gamma_e, gamma_m })
}

/// Polarizabilities with a caller-chosen real electric probe amplitude in
/// rad/s.
pub fn polarizabilities_with_probe(
    params: &SystemParams,
    drive: &LocalDrive,
    omega_pe: f64,
    limits: &SolverLimits,
) -> Result<Polarizabilities, SteadyError> {
    let probe = ProbeDrive::from_electric(params, Complex64::new(omega_pe, 0.0));
    let amps = steady_linear_solve(params, drive, &probe, limits)?;
    polarizabilities_from_amplitudes(params, &probe, &amps)
}

/// Polarizabilities at the reference probe Ω_pE = 10⁻³·γ.
pub fn polarizabilities(
    params: &SystemParams,
    drive: &LocalDrive,
    limits: &SolverLimits,
) -> Result<Polarizabilities, SteadyError> {
    polarizabilities_with_probe(params, drive, REFERENCE_PROBE * params.gamma_unit, limits)
}
