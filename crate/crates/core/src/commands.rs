//! Implementations of the `nri2d` subcommands. Each returns the JSON record
//! it reports plus an exit status; the binary only parses arguments.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{self, AnalysisError};
use crate::config::{ConfigError, RunConfig};
use crate::crosscheck::{self, DrawRanges};
use crate::grid::{self, FieldMap, GridError};
use crate::medium::{self, BRANCH_RULE};
use crate::output::{self, complex_json, pretty};
use crate::quantum;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_NO_CONTOUR: i32 = 4;
pub const EXIT_DISCREPANCY: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("ConfigError: {0}")]
    Grid(#[from] GridError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Grid(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// What a command printed and how it should exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub record: Value,
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::Invalid { key: name.into(), reason: "must be finite".into() }.into())
    }
}

/// Response at one point. A computation failure still yields a record, with
/// an `error` field and exit status 3.
pub fn point(cfg: &RunConfig, x: f64, y: f64, delta_p: Option<f64>) -> Result<Outcome, CliError> {
    let (x, y) = (finite("x", x)?, finite("y", y)?);
    let dp_units = finite("delta-p", delta_p.unwrap_or(cfg.system.delta_p))?;
    let params = cfg.system_params().with_delta_p(dp_units * cfg.gamma_unit);
    let limits = cfg.limits();
    let drive = grid::local_rabi(&cfg.waves(), x, y);

    let mut record = json!({
        "x_lambda": x,
        "y_lambda": y,
        "delta_p_gamma": dp_units,
        "omega_c": drive.omega_c.re,
        "omega_s": drive.omega_s.re,
        "gamma_e": null, "gamma_m": null,
        "eps_r": null, "mu_r": null, "n": null,
        "flags": [],
        "branch_rule": BRANCH_RULE,
        "error": null,
        "message": null,
    });
    let result = quantum::polarizabilities(&params, &drive, &limits.solver)
        .map_err(medium::ResponseError::from)
        .and_then(|pol| {
            record["gamma_e"] = complex_json(pol.gamma_e);
            record["gamma_m"] = complex_json(pol.gamma_m);
            medium::sample_from_polarizabilities(params.density, pol.gamma_e, pol.gamma_m, &limits.response)
        });
    let exit_code = match result {
        Ok(s) => {
            record["eps_r"] = complex_json(s.eps_r);
            record["mu_r"] = complex_json(s.mu_r);
            record["n"] = complex_json(s.n);
            record["flags"] = json!(s.flags);
            EXIT_OK
        }
        Err(e) => {
            record["error"] = json!(e.kind());
            record["message"] = json!(e.to_string());
            EXIT_COMPUTE
        }
    };
    Ok(Outcome { record, exit_code, files: vec![] })
}

fn map_files(cfg: &RunConfig, map: &FieldMap, dp_units: f64) -> [(String, String); 2] {
    let stem = output::map_file_stem(dp_units);
    [
        (format!("{stem}.csv"), output::map_csv(map)),
        (format!("{stem}.json"), pretty(&output::map_sidecar(cfg, map, dp_units))),
    ]
}

fn summary(map: &FieldMap, dp_units: f64, files: &[(String, String)]) -> Value {
    json!({
        "delta_p_gamma": dp_units,
        "cells": map.samples.len(),
        "error_cells": map.errors().len(),
        "files": files.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
    })
}

fn compute_map(cfg: &RunConfig, dp_units: f64) -> Result<FieldMap, CliError> {
    let params = cfg.system_params().with_delta_p(dp_units * cfg.gamma_unit);
    Ok(grid::evaluate_map(&params, &cfg.waves(), &cfg.grid, &cfg.limits())?)
}

/// One map at `delta_p` (default `system.delta_p`).
pub fn map(cfg: &RunConfig, delta_p: Option<f64>, out: &Path) -> Result<Outcome, CliError> {
    let dp_units = finite("delta-p", delta_p.unwrap_or(cfg.system.delta_p))?;
    let map = compute_map(cfg, dp_units)?;
    let files = map_files(cfg, &map, dp_units);
    let record = summary(&map, dp_units, &files);
    let files = output::write_all(out, &files)?;
    Ok(Outcome { record, exit_code: EXIT_OK, files })
}

/// One map per configured sweep detuning.
pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let values = cfg.sweep_values();
    let maps = grid::sweep(&cfg.sweep_spec())?;
    let mut files = Vec::new();
    let mut panels = Vec::new();
    for (map, &dp) in maps.iter().zip(&values) {
        let f = map_files(cfg, map, dp);
        panels.push(summary(map, dp, &f));
        files.extend(f);
    }
    let files = output::write_all(out, &files)?;
    Ok(Outcome { record: json!({ "panels": panels }), exit_code: EXIT_OK, files })
}

/// Contours of Re{n} at `level`, the innermost one around the reference
/// point, its circle fit and region metrics.
pub fn contours(
    cfg: &RunConfig,
    level: Option<f64>,
    delta_p: Option<f64>,
    out: &Path,
) -> Result<Outcome, CliError> {
    let level = level.or(cfg.analysis.level).ok_or_else(|| ConfigError::Invalid {
        key: "analysis.level".into(),
        reason: "no contour level given (use --level)".into(),
    })?;
    let level = finite("level", level)?;
    let dp_units = finite("delta-p", delta_p.unwrap_or(cfg.system.delta_p))?;
    let map = match &cfg.synthetic {
        Some(s) => {
            let [cx, cy] = s.center;
            cfg.grid.validate()?;
            FieldMap::from_index_fn(cfg.grid, |x, y| (x - cx).powi(2) + (y - cy).powi(2))
        }
        None => compute_map(cfg, dp_units)?,
    };
    let reference = cfg.reference();
    let lines = analysis::extract_contours(&map, level);
    let metrics = analysis::region_metrics(&map, reference);

    let mut record = json!({
        "delta_p_gamma": dp_units,
        "level": level,
        "synthetic": cfg.synthetic.is_some(),
        "reference": [reference.0, reference.1],
        "contour_count": lines.len(),
        "closed_count": lines.iter().filter(|c| c.closed).count(),
        "innermost": null,
        "fit": null,
        "isotropic": null,
        "isotropy_threshold": cfg.analysis.isotropy_threshold,
        "region_metrics": {
            "double_negative_fraction": metrics.double_negative_fraction,
            "min_re_n": metrics.min_re_n,
            "argmin": [metrics.argmin.0, metrics.argmin.1],
            "n_at_reference": complex_json(metrics.n_at_reference),
        },
        "branch_rule": BRANCH_RULE,
        "error": null,
    });
    let mut exit_code = EXIT_OK;
    match analysis::innermost_contour(&lines, reference) {
        Ok(inner) => {
            let id = lines.iter().position(|c| *c == inner);
            record["innermost"] = json!({
                "contour_id": id,
                "vertices": inner.points.len(),
                "area": inner.area(),
            });
            match analysis::fit_circle(&inner) {
                Ok(fit) => {
                    record["fit"] = json!(fit);
                    record["isotropic"] = json!(fit.isotropy <= cfg.analysis.isotropy_threshold);
                }
                Err(e) => {
                    record["error"] = json!(e.kind());
                    exit_code = EXIT_COMPUTE;
                }
            }
        }
        Err(e @ AnalysisError::NoEnclosingContour { .. }) => {
            record["error"] = json!(e.kind());
            exit_code = EXIT_NO_CONTOUR;
        }
        Err(e) => {
            record["error"] = json!(e.kind());
            exit_code = EXIT_COMPUTE;
        }
    }

    let stem = output::contour_file_stem(dp_units, level);
    let files = vec![
        (format!("{stem}.csv"), output::contours_csv(&lines)),
        (format!("{stem}.json"), pretty(&record)),
    ];
    let files = output::write_all(out, &files)?;
    Ok(Outcome { record, exit_code, files })
}

/// Randomized closed-form versus linear-solve comparison.
pub fn check(cfg: &RunConfig, draws: usize, seed: u64) -> Result<Outcome, CliError> {
    if draws == 0 {
        return Err(ConfigError::Invalid { key: "draws".into(), reason: "must be >= 1".into() }.into());
    }
    let report = crosscheck::run_check(
        &cfg.system_params(),
        &DrawRanges::default(),
        draws,
        seed,
        &cfg.limits().solver,
        cfg.analysis.crosscheck_tolerance,
    );
    let exit_code = if report.is_clean() { EXIT_OK } else { EXIT_DISCREPANCY };
    Ok(Outcome { record: json!(report), exit_code, files: vec![] })
}
