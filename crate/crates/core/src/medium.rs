//! Macroscopic constitutive parameters from microscopic polarizabilities.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{self, LocalDrive, SolverLimits, SteadyError, SystemParams};

/// Human-readable statement of the square-root branch used for n. Echoed
/// into every output header.
pub const BRANCH_RULE: &str = "n = sqrt(|eps_r*mu_r|)*exp(i*(arg eps_r + arg mu_r)/2), args in (-pi, pi]; \
when Re(eps_r) < 0 and Re(mu_r) < 0 the root with Re(n) <= 0 is taken";

/// Per-sample condition flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Flag {
    DoubleNegative,
    NearCMPole,
    BranchAmbiguous,
    CMPole,
    NearSingular,
    SingularSystem,
}

impl Flag {
    pub const ALL: [Flag; 6] = [
        Flag::DoubleNegative,
        Flag::NearCMPole,
        Flag::BranchAmbiguous,
        Flag::CMPole,
        Flag::NearSingular,
        Flag::SingularSystem,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn name(self) -> &'static str {
        match self {
            Flag::DoubleNegative => "DoubleNegative",
            Flag::NearCMPole => "NearCMPole",
            Flag::BranchAmbiguous => "BranchAmbiguous",
            Flag::CMPole => "CMPole",
            Flag::NearSingular => "NearSingular",
            Flag::SingularSystem => "SingularSystem",
        }
    }

    /// Flags that mark a sample whose values could not be computed.
    pub fn is_error(self) -> bool {
        matches!(self, Flag::CMPole | Flag::NearSingular | Flag::SingularSystem)
    }
}

/// Small set of [`Flag`]s.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Flags(u8);

impl Flags {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn insert(&mut self, flag: Flag) {
        self.0 |= flag.bit();
    }

    pub fn with(mut self, flag: Flag) -> Self {
        self.insert(flag);
        self
    }

    pub fn contains(&self, flag: Flag) -> bool {
        self.0 & flag.bit() != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn has_error(&self) -> bool {
        self.iter().any(Flag::is_error)
    }

    pub fn iter(&self) -> impl Iterator<Item = Flag> + '_ {
        Flag::ALL.into_iter().filter(|f| self.contains(*f))
    }
}

/// `|`-separated flag names, empty when no flag is set.
impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Flag::name).collect();
        f.write_str(&names.join("|"))
    }
}

impl Serialize for Flags {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(Flag::name))
    }
}

/// ε_r, μ_r and n at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MediumSample {
    pub eps_r: Complex64,
    pub mu_r: Complex64,
    pub n: Complex64,
    pub flags: Flags,
}

impl MediumSample {
    /// Placeholder for a point where the response could not be computed.
    pub fn failed(error: &ResponseError) -> Self {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Self { eps_r: nan, mu_r: nan, n: nan, flags: Flags::empty().with(error.flag()) }
    }

    pub fn is_valid(&self) -> bool {
        !self.flags.has_error()
    }

    pub fn is_double_negative(&self) -> bool {
        self.is_valid() && self.eps_r.re < 0.0 && self.mu_r.re < 0.0
    }
}

/// Thresholds for the local-field and branch logic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseLimits {
    /// |1 − Nγ/3| below this is a pole.
    pub cm_floor: f64,
    /// |1 − Nγ/3| below this (but above the floor) raises `NearCMPole`.
    pub cm_warn: f64,
    /// Distance from −π within which an argument is considered ambiguous.
    pub branch_tolerance: f64,
}

impl Default for ResponseLimits {
    fn default() -> Self {
        Self { cm_floor: 1e-9, cm_warn: 1e-3, branch_tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error, Serialize)]
pub enum ResponseError {
    #[error("CMPole: |1 - N*gamma/3| = {denominator:e} below floor {floor:e}")]
    CMPole { denominator: f64, floor: f64 },
    #[error(transparent)]
    Steady(#[from] SteadyError),
}

impl ResponseError {
    pub fn kind(&self) -> &'static str {
        match self {
            ResponseError::CMPole { .. } => "CMPole",
            ResponseError::Steady(e) => e.kind(),
        }
    }

    pub fn flag(&self) -> Flag {
        match self {
            ResponseError::CMPole { .. } => Flag::CMPole,
            ResponseError::Steady(SteadyError::NearSingular { .. }) => Flag::NearSingular,
            ResponseError::Steady(_) => Flag::SingularSystem,
        }
    }
}

/// Local-field corrected relative response (1 + 2Nγ/3)/(1 − Nγ/3).
pub fn clausius_mossotti(density: f64, gamma: Complex64, floor: f64) -> Result<Complex64, ResponseError> {
    let x = density * gamma;
    let denominator = 1.0 - x / 3.0;
    if !(denominator.norm() >= floor) {
        return Err(ResponseError::CMPole { denominator: denominator.norm(), floor });
    }
    Ok((1.0 + 2.0 * x / 3.0) / denominator)
}

/// Refractive index together with whether the branch choice was ambiguous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexBranch {
    pub n: Complex64,
    pub ambiguous: bool,
}

/// Half-sum of principal arguments, with the double-negative root forced to
/// Re(n) ≤ 0. The two coincide whenever both imaginary parts are
/// non-negative; they differ only for double-negative points with gain in one
/// of the constitutive parameters, which are flagged as ambiguous.
pub fn refractive_index(eps_r: Complex64, mu_r: Complex64, tolerance: f64) -> IndexBranch {
    let (arg_e, arg_m) = (eps_r.arg(), mu_r.arg());
    let near_cut = |a: f64| (a + PI).abs() <= tolerance;
    let mut ambiguous = near_cut(arg_e) || near_cut(arg_m);
    let mut n = Complex64::from_polar((eps_r.norm() * mu_r.norm()).sqrt(), 0.5 * (arg_e + arg_m));
    if eps_r.re < 0.0 && mu_r.re < 0.0 && n.re > 0.0 {
        n = -n;
        ambiguous = true;
    }
    IndexBranch { n, ambiguous }
}

/// ε_r, μ_r and n at one point from the reference-probe polarizabilities.
pub fn medium_sample(
    params: &SystemParams,
    drive: &LocalDrive,
    solver: &SolverLimits,
    limits: &ResponseLimits,
) -> Result<MediumSample, ResponseError> {
    let pol = quantum::polarizabilities(params, drive, solver)?;
    sample_from_polarizabilities(params.density, pol.gamma_e, pol.gamma_m, limits)
}

pub fn sample_from_polarizabilities(
    density: f64,
    gamma_e: Complex64,
    gamma_m: Complex64,
    limits: &ResponseLimits,
) -> Result<MediumSample, ResponseError> {
    let eps_r = clausius_mossotti(density, gamma_e, limits.cm_floor)?;
    let mu_r = clausius_mossotti(density, gamma_m, limits.cm_floor)?;
    let branch = refractive_index(eps_r, mu_r, limits.branch_tolerance);

    let mut flags = Flags::empty();
    if eps_r.re < 0.0 && mu_r.re < 0.0 {
        flags.insert(Flag::DoubleNegative);
    }
    let near_pole = [gamma_e, gamma_m]
        .iter()
        .any(|g| (1.0 - density * g / 3.0).norm() < limits.cm_warn);
    if near_pole {
        flags.insert(Flag::NearCMPole);
    }
    if branch.ambiguous {
        flags.insert(Flag::BranchAmbiguous);
    }
    Ok(MediumSample { eps_r, mu_r, n: branch.n, flags })
}
