//! Electromagnetic response of an N-type four-level atomic vapor driven by
//! two orthogonal standing waves, and analysis of where the medium shows a
//! negative, isotropic refractive index.
//!
//! The pipeline runs bottom-up: [`quantum`] solves for steady-state
//! amplitudes and microscopic polarizabilities at one point, [`medium`]
//! applies the Clausius–Mossotti local-field correction and picks the branch
//! of n, [`grid`] evaluates maps over the x–y plane, and [`analysis`] extracts
//! contours, circle fits and region metrics. [`config`], [`output`] and
//! [`commands`] back the `nri2d` command-line tool.

// Threshold checks are written as `!(x >= floor)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod commands;
pub mod config;
pub mod constants;
pub mod crosscheck;
pub mod grid;
pub mod linalg;
pub mod medium;
pub mod output;
pub mod quantum;

pub use analysis::{CircleFitResult, ContourPolyline, RegionMetrics};
pub use grid::{EvalLimits, FieldMap, GridSpec, StandingWaveConfig, SweepSpec};
pub use medium::{Flag, Flags, MediumSample};
pub use quantum::{LocalDrive, Polarizabilities, ProbeDrive, SteadyAmplitudes, SystemParams};
