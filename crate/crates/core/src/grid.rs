//! Standing-wave drive profiles and 2-D field maps of the medium response.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::medium::{self, MediumSample, ResponseError, ResponseLimits};
use crate::quantum::{LocalDrive, ParamError, SolverLimits, SystemParams};

/// Peak Rabi frequencies (rad/s) and wavelengths (in λ units) of the two
/// orthogonal standing waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandingWaveConfig {
    pub omega_c0: f64,
    pub omega_s0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl StandingWaveConfig {
    pub fn paper_defaults() -> Self {
        Self { omega_c0: 10.2e8, omega_s0: 9.5e8, lambda1: 1.0, lambda2: 1.0 }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let checks = [
            ("omega_c0", self.omega_c0, self.omega_c0 >= 0.0),
            ("omega_s0", self.omega_s0, self.omega_s0 >= 0.0),
            ("lambda1", self.lambda1, self.lambda1 > 0.0),
            ("lambda2", self.lambda2, self.lambda2 > 0.0),
        ];
        for (field, value, ok) in checks {
            if !value.is_finite() || !ok {
                return Err(GridError::Config {
                    field,
                    reason: format!("invalid value {value}"),
                });
            }
        }
        Ok(())
    }
}

/// Ω_c(x) = Ω_c0 sin(2πx/λ₁), Ω_s(y) = Ω_s0 sin(2πy/λ₂).
pub fn local_rabi(cfg: &StandingWaveConfig, x: f64, y: f64) -> LocalDrive {
    LocalDrive::real(
        cfg.omega_c0 * (2.0 * PI * x / cfg.lambda1).sin(),
        cfg.omega_s0 * (2.0 * PI * y / cfg.lambda2).sin(),
    )
}

/// Rectangular grid of points, both endpoints included on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x_min: 0.5, x_max: 1.0, y_min: 0.5, y_max: 1.0, nx: 201, ny: 201 }
    }
}

impl GridSpec {
    pub fn square(n: usize) -> Self {
        Self { nx: n, ny: n, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let bad = |field, reason: String| Err(GridError::Config { field, reason });
        for (field, v) in [("x_min", self.x_min), ("x_max", self.x_max), ("y_min", self.y_min), ("y_max", self.y_max)] {
            if !v.is_finite() {
                return bad(field, format!("must be finite, got {v}"));
            }
        }
        if self.x_min >= self.x_max {
            return bad("x_max", format!("x_min ({}) must be < x_max ({})", self.x_min, self.x_max));
        }
        if self.y_min >= self.y_max {
            return bad("y_max", format!("y_min ({}) must be < y_max ({})", self.y_min, self.y_max));
        }
        if self.nx < 2 {
            return bad("nx", format!("need at least 2 points per axis, got {}", self.nx));
        }
        if self.ny < 2 {
            return bad("ny", format!("need at least 2 points per axis, got {}", self.ny));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    /// Row-major index, x varying fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, index: usize) -> (f64, f64) {
        (self.x(index % self.nx), self.y(index / self.nx))
    }

    /// Grid indices of the point closest to (x, y), clamped to the domain.
    pub fn nearest(&self, x: f64, y: f64) -> (usize, usize) {
        let snap = |v: f64, lo: f64, step: f64, n: usize| {
            let k = ((v - lo) / step).round();
            k.clamp(0.0, (n - 1) as f64) as usize
        };
        (snap(x, self.x_min, self.dx(), self.nx), snap(y, self.y_min, self.dy(), self.ny))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("ConfigError: `{field}`: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("ConfigError: {0}")]
    Params(#[from] ParamError),
    #[error("sweep panel {panel}: {source}")]
    Panel {
        panel: usize,
        #[source]
        source: Box<GridError>,
    },
}

/// A point whose response could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Error, Serialize)]
#[error("at ({x}, {y}): {error}")]
pub struct PointError {
    pub x: f64,
    pub y: f64,
    pub error: ResponseError,
}

/// Inputs a map was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapMeta {
    pub params: SystemParams,
    pub waves: StandingWaveConfig,
    pub delta_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMap {
    pub grid: GridSpec,
    pub samples: Vec<MediumSample>,
    pub meta: MapMeta,
}

impl FieldMap {
    pub fn at(&self, i: usize, j: usize) -> &MediumSample {
        &self.samples[self.grid.index(i, j)]
    }

    pub fn nearest(&self, x: f64, y: f64) -> &MediumSample {
        let (i, j) = self.grid.nearest(x, y);
        self.at(i, j)
    }

    /// Cells that carry an error flag, with their coordinates.
    pub fn errors(&self) -> Vec<(usize, f64, f64, &MediumSample)> {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_valid())
            .map(|(k, s)| {
                let (x, y) = self.grid.coords(k);
                (k, x, y, s)
            })
            .collect()
    }

    /// A map whose index at each point is the real scalar `f(x, y)`, with
    /// ε_r = μ_r = n. Used for synthetic analysis fixtures.
    pub fn from_index_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let samples = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                let v = Complex64::new(f(x, y), 0.0);
                MediumSample { eps_r: v, mu_r: v, n: v, flags: Default::default() }
            })
            .collect();
        let params = SystemParams::paper_defaults(0.0);
        Self {
            grid,
            samples,
            meta: MapMeta { params, waves: StandingWaveConfig::paper_defaults(), delta_p: 0.0 },
        }
    }
}

/// Numerical limits shared by every cell of a map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalLimits {
    pub solver: SolverLimits,
    pub response: ResponseLimits,
}

/// Response at a single point.
pub fn sample_point(
    params: &SystemParams,
    waves: &StandingWaveConfig,
    x: f64,
    y: f64,
    limits: &EvalLimits,
) -> Result<MediumSample, PointError> {
    let drive = local_rabi(waves, x, y);
    medium::medium_sample(params, &drive, &limits.solver, &limits.response)
        .map_err(|error| PointError { x, y, error })
}

/// Evaluates the medium response on every grid point. Cells are independent
/// and evaluated in parallel; the result does not depend on the thread count.
pub fn evaluate_map(
    params: &SystemParams,
    waves: &StandingWaveConfig,
    grid: &GridSpec,
    limits: &EvalLimits,
) -> Result<FieldMap, GridError> {
    params.validate()?;
    waves.validate()?;
    grid.validate()?;
    let samples = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (x, y) = grid.coords(k);
            sample_point(params, waves, x, y, limits).unwrap_or_else(|e| MediumSample::failed(&e.error))
        })
        .collect();
    Ok(FieldMap {
        grid: *grid,
        samples,
        meta: MapMeta { params: *params, waves: *waves, delta_p: params.delta_p },
    })
}

/// Probe detunings (rad/s) to evaluate over a common base configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub delta_p: Vec<f64>,
    pub params: SystemParams,
    pub waves: StandingWaveConfig,
    pub grid: GridSpec,
    pub limits: EvalLimits,
}

/// One map per probe detuning, in order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<FieldMap>, GridError> {
    if spec.delta_p.is_empty() {
        return Err(GridError::Config { field: "delta_p", reason: "sweep list is empty".into() });
    }
    spec.delta_p
        .iter()
        .enumerate()
        .map(|(panel, &dp)| {
            evaluate_map(&spec.params.with_delta_p(dp), &spec.waves, &spec.grid, &spec.limits)
                .map_err(|e| GridError::Panel { panel, source: Box::new(e) })
        })
        .collect()
}
