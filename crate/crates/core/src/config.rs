//! Run configuration: a TOML file whose frequencies are given in units of
//! `gamma_unit` and converted to rad/s on use.
//!
//! ```toml
//! gamma_unit = 1e8
//! [system]    # gamma3 gamma4 gamma12 delta_p delta_c delta_s d23 mu12 density
//! [drive]     # omega_c0 omega_s0 lambda1 lambda2
//! [grid]      # x_min x_max y_min y_max nx ny            (optional)
//! [sweep]     # delta_p = [..]                           (optional)
//! [analysis]  # reference level isotropy_threshold ...   (optional)
//! [output]    # dir                                      (optional)
//! [synthetic] # center: replace Re{n} by a paraboloid     (optional)
//! ```
//!
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crosscheck;
use crate::grid::{EvalLimits, GridError, GridSpec, StandingWaveConfig, SweepSpec};
use crate::medium::ResponseLimits;
use crate::quantum::{SolverLimits, SystemParams};

/// The parameter set behind the published 2-D maps.
pub const PAPER_FIG2: &str = include_str!("../configs/paper-fig2.cfg");

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "NRI2D_CONFIG";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("ConfigError: {0}")]
    Parse(String),
    #[error("ConfigError: `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("ConfigError: cannot read {path}: {reason}")]
    Read { path: PathBuf, reason: String },
}

impl ConfigError {
    fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { key: key.into(), reason: reason.into() }
    }
}

fn default_gamma_unit() -> f64 {
    1e8
}

/// Atomic parameters; rates and detunings in units of `gamma_unit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub gamma3: f64,
    pub gamma4: f64,
    pub gamma12: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub delta_s: f64,
    pub d23: f64,
    pub mu12: f64,
    pub density: f64,
}

/// Standing-wave peaks in units of `gamma_unit`; wavelengths in λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub omega_c0: f64,
    pub omega_s0: f64,
    #[serde(default = "unit")]
    pub lambda1: f64,
    #[serde(default = "unit")]
    pub lambda2: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Probe detunings in units of `gamma_unit`. Empty means `system.delta_p`.
    pub delta_p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub reference: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    pub isotropy_threshold: f64,
    pub crosscheck_tolerance: f64,
    pub xi_floor: f64,
    pub condition_max: f64,
    pub cm_floor: f64,
    pub cm_warn: f64,
    pub branch_tolerance: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        let solver = SolverLimits::default();
        let response = ResponseLimits::default();
        Self {
            reference: [0.75, 0.75],
            level: None,
            isotropy_threshold: crate::analysis::DEFAULT_ISOTROPY_THRESHOLD,
            crosscheck_tolerance: crosscheck::DEFAULT_TOLERANCE,
            xi_floor: solver.xi_floor,
            condition_max: solver.condition_max,
            cm_floor: response.cm_floor,
            cm_warn: response.cm_warn,
            branch_tolerance: response.branch_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Replaces the computed Re{n} with (x − cx)² + (y − cy)² for testing the
/// contour pipeline against an analytic field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    pub center: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_gamma_unit")]
    pub gamma_unit: f64,
    pub system: SystemSection,
    pub drive: DriveSection,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSection>,
}

impl RunConfig {
    /// Parses and validates configuration text.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn paper() -> Self {
        Self::parse(PAPER_FIG2).expect("bundled configuration is valid")
    }

    /// Reads `path`, falling back to the file named by [`CONFIG_ENV`] and
    /// then to the bundled configuration.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        match path.map(Path::to_path_buf).or(env_path) {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| ConfigError::Read { path: p.clone(), reason: e.to_string() })?;
                Self::parse(&text)
            }
            None => Self::parse(PAPER_FIG2),
        }
    }

    /// TOML text that parses back to an identical configuration.
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.gamma_unit.is_finite() && self.gamma_unit > 0.0) {
            return Err(ConfigError::invalid("gamma_unit", "must be finite and > 0"));
        }
        self.system_params()
            .validate()
            .map_err(|e| ConfigError::invalid(format!("system.{}", e.field), e.reason))?;
        self.waves().validate().map_err(|e| section_error("drive", e))?;
        self.grid.validate().map_err(|e| section_error("grid", e))?;
        for (k, v) in self.sweep.delta_p.iter().enumerate() {
            if !v.is_finite() {
                return Err(ConfigError::invalid(format!("sweep.delta_p[{k}]"), "must be finite"));
            }
        }
        let a = &self.analysis;
        if !a.reference.iter().all(|v| v.is_finite()) {
            return Err(ConfigError::invalid("analysis.reference", "must be finite"));
        }
        if let Some(level) = a.level {
            if !level.is_finite() {
                return Err(ConfigError::invalid("analysis.level", "must be finite"));
            }
        }
        let positive = [
            ("analysis.isotropy_threshold", a.isotropy_threshold),
            ("analysis.crosscheck_tolerance", a.crosscheck_tolerance),
            ("analysis.xi_floor", a.xi_floor),
            ("analysis.condition_max", a.condition_max),
            ("analysis.cm_floor", a.cm_floor),
            ("analysis.cm_warn", a.cm_warn),
            ("analysis.branch_tolerance", a.branch_tolerance),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::invalid(key, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Some(s) = &self.synthetic {
            if !s.center.iter().all(|v| v.is_finite()) {
                return Err(ConfigError::invalid("synthetic.center", "must be finite"));
            }
        }
        Ok(())
    }

    /// Atomic parameters in SI units.
    pub fn system_params(&self) -> SystemParams {
        let g = self.gamma_unit;
        let s = &self.system;
        SystemParams {
            gamma3: s.gamma3 * g,
            gamma4: s.gamma4 * g,
            gamma12: s.gamma12 * g,
            delta_p: s.delta_p * g,
            delta_c: s.delta_c * g,
            delta_s: s.delta_s * g,
            d23: s.d23,
            mu12: s.mu12,
            density: s.density,
            gamma_unit: g,
        }
    }

    pub fn waves(&self) -> StandingWaveConfig {
        StandingWaveConfig {
            omega_c0: self.drive.omega_c0 * self.gamma_unit,
            omega_s0: self.drive.omega_s0 * self.gamma_unit,
            lambda1: self.drive.lambda1,
            lambda2: self.drive.lambda2,
        }
    }

    pub fn limits(&self) -> EvalLimits {
        let a = &self.analysis;
        EvalLimits {
            solver: SolverLimits { xi_floor: a.xi_floor, condition_max: a.condition_max },
            response: ResponseLimits {
                cm_floor: a.cm_floor,
                cm_warn: a.cm_warn,
                branch_tolerance: a.branch_tolerance,
            },
        }
    }

    /// Sweep detunings in units of `gamma_unit`.
    pub fn sweep_values(&self) -> Vec<f64> {
        if self.sweep.delta_p.is_empty() {
            vec![self.system.delta_p]
        } else {
            self.sweep.delta_p.clone()
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            delta_p: self.sweep_values().iter().map(|d| d * self.gamma_unit).collect(),
            params: self.system_params(),
            waves: self.waves(),
            grid: self.grid,
            limits: self.limits(),
        }
    }

    pub fn reference(&self) -> (f64, f64) {
        (self.analysis.reference[0], self.analysis.reference[1])
    }
}

fn section_error(section: &str, e: GridError) -> ConfigError {
    match e {
        GridError::Config { field, reason } => ConfigError::invalid(format!("{section}.{field}"), reason),
        other => ConfigError::invalid(section, other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_paper_config() {
        let cfg = RunConfig::paper();
        let p = cfg.system_params();
        assert!((p.gamma3 - 0.3e8).abs() < 1e-6);
        assert!((p.gamma4 - 0.1e8).abs() < 1e-6);
        assert!((p.gamma12 - 1e5).abs() < 1e-9);
        assert!((p.delta_c + 0.15e8).abs() < 1e-6);
        assert_eq!(p.delta_c, -p.delta_s);
        assert_eq!(p.d23, 3e-29);
        assert_eq!(p.mu12, 1.3e-22);
        assert_eq!(p.density, 2e23);
        assert!((cfg.waves().omega_c0 - 10.2e8).abs() < 1e-6);
        assert!((cfg.waves().omega_s0 - 9.5e8).abs() < 1e-6);
        assert_eq!(cfg.sweep_values(), vec![4.7, 5.0, 5.3, 5.7]);
        assert_eq!(cfg.grid, GridSpec::default());
        assert_eq!(cfg.reference(), (0.75, 0.75));
    }

    #[test]
    fn missing_density_is_named() {
        let text = PAPER_FIG2.replace("density = 2e23       # m^-3", "");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("density"), "{err}");
    }

    #[test]
    fn single_point_axis_is_rejected() {
        let text = PAPER_FIG2.replace("nx = 201", "nx = 1");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "grid.nx"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = PAPER_FIG2.replace("[drive]", "[drive]\nomega_x0 = 1.0");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("omega_x0"), "{err}");
        let text = format!("{PAPER_FIG2}\n[extra]\nfoo = 1\n");
        assert!(RunConfig::parse(&text).is_err());
    }

    #[test]
    fn invariant_violations_name_the_key() {
        let text = PAPER_FIG2.replace("gamma3 = 0.3", "gamma3 = -0.3");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "system.gamma3"), "{err}");
        let text = PAPER_FIG2.replace("omega_s0 = 9.5", "omega_s0 = nan");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "drive.omega_s0"), "{err}");
    }

    #[test]
    fn optional_sections_default() {
        let text = "[system]\ngamma3 = 0.3\ngamma4 = 0.1\ngamma12 = 0.001\ndelta_p = 5.0\n\
                    delta_c = -0.15\ndelta_s = 0.15\nd23 = 3e-29\nmu12 = 1.3e-22\ndensity = 2e23\n\
                    [drive]\nomega_c0 = 10.2\nomega_s0 = 9.5\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.gamma_unit, 1e8);
        assert_eq!(cfg.grid, GridSpec::default());
        assert_eq!(cfg.sweep_values(), vec![5.0]);
        assert_eq!(cfg.analysis, AnalysisSection::default());
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
        assert_eq!(cfg.limits(), EvalLimits::default());
    }

    #[test]
    fn emit_round_trips() {
        let cfg = RunConfig::paper();
        assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg);
        let mut odd = cfg.clone();
        odd.analysis.level = Some(-3.5);
        odd.synthetic = Some(SyntheticSection { center: [0.7, 0.8] });
        odd.system.density = 1.2345678901234567e23;
        assert_eq!(RunConfig::parse(&odd.emit()).unwrap(), odd);
    }
}
