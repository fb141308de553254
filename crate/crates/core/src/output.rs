//! CSV and JSON renderings of maps, contours and analyses, plus atomic file
//! writes. All numbers are written in shortest round-trip form.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::analysis::ContourPolyline;
use crate::config::RunConfig;
use crate::grid::FieldMap;
use crate::medium::BRANCH_RULE;

pub const MAP_HEADER: &str = "x_lambda,y_lambda,re_eps,im_eps,re_mu,im_mu,re_n,im_n,flags";
pub const CONTOUR_HEADER: &str = "contour_id,vertex_id,x_lambda,y_lambda";

/// Detuning label for file names: `4.7`, `5.0`, `-0.25`.
pub fn dp_label(delta_p_units: f64) -> String {
    if delta_p_units.fract() == 0.0 {
        format!("{delta_p_units:.1}")
    } else {
        format!("{delta_p_units}")
    }
}

pub fn map_file_stem(delta_p_units: f64) -> String {
    format!("map_dp{}", dp_label(delta_p_units))
}

pub fn contour_file_stem(delta_p_units: f64, level: f64) -> String {
    format!("contours_dp{}_level{}", dp_label(delta_p_units), dp_label(level))
}

fn sci(v: f64) -> String {
    format!("{v:e}")
}

/// Grid samples in row-major order, one row per point.
pub fn map_csv(map: &FieldMap) -> String {
    let mut out = String::with_capacity(map.samples.len() * 160);
    out.push_str(MAP_HEADER);
    out.push('\n');
    for (k, s) in map.samples.iter().enumerate() {
        let (x, y) = map.grid.coords(k);
        let cols = [
            x.to_string(),
            y.to_string(),
            sci(s.eps_r.re),
            sci(s.eps_r.im),
            sci(s.mu_r.re),
            sci(s.mu_r.im),
            sci(s.n.re),
            sci(s.n.im),
            s.flags.to_string(),
        ];
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn contours_csv(contours: &[ContourPolyline]) -> String {
    let mut out = String::from(CONTOUR_HEADER);
    out.push('\n');
    for (id, c) in contours.iter().enumerate() {
        for (v, (x, y)) in c.points.iter().enumerate() {
            out.push_str(&format!("{id},{v},{x},{y}\n"));
        }
    }
    out
}

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Provenance record written next to each map.
pub fn map_sidecar(cfg: &RunConfig, map: &FieldMap, delta_p_units: f64) -> Value {
    let errors: Vec<Value> = map
        .errors()
        .iter()
        .map(|(k, x, y, s)| json!({ "index": k, "x_lambda": x, "y_lambda": y, "flags": s.flags }))
        .collect();
    json!({
        "tool": "nri2d",
        "version": env!("CARGO_PKG_VERSION"),
        "branch_rule": BRANCH_RULE,
        "columns": MAP_HEADER,
        "order": "row-major, x fastest",
        "delta_p_gamma": delta_p_units,
        "grid": map.grid,
        "params_si": map.meta.params,
        "waves_si": map.meta.waves,
        "config": cfg,
        "error_cells": errors,
    })
}

pub fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes a set of files into `dir` through temporary names. If any write
/// fails, every file of the set that was already written is removed.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, contents) in files {
        debug_assert!(!name.contains('/') && !name.contains(".."));
        match write_one(dir, name, contents) {
            Ok(path) => written.push(path),
            Err(e) => {
                for path in &written {
                    let _ = fs::remove_file(path);
                }
                return Err(e);
            }
        }
    }
    Ok(written)
}

fn write_one(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    let tmp = dir.join(format!(".{name}.partial"));
    let path = dir.join(name);
    let result = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, &path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map(|_| path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn labels() {
        assert_eq!(dp_label(4.7), "4.7");
        assert_eq!(dp_label(5.0), "5.0");
        assert_eq!(dp_label(-3.5), "-3.5");
        assert_eq!(map_file_stem(5.7), "map_dp5.7");
        assert_eq!(contour_file_stem(5.0, -3.5), "contours_dp5.0_level-3.5");
    }

    #[test]
    fn csv_numbers_reparse_exactly() {
        let map = FieldMap::from_index_fn(GridSpec::square(7), |x, y| (x * 1.1).sin() / (y + 1e-3));
        let csv = map_csv(&map);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(MAP_HEADER));
        for (k, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 9);
            let (x, y) = map.grid.coords(k);
            assert_eq!(cols[0].parse::<f64>().unwrap(), x);
            assert_eq!(cols[1].parse::<f64>().unwrap(), y);
            assert_eq!(cols[6].parse::<f64>().unwrap(), map.samples[k].n.re);
        }
    }

    #[test]
    fn contour_rows() {
        let c = ContourPolyline { level: 0.0, points: vec![(0.5, 0.25), (0.75, 1.0)], closed: false };
        assert_eq!(contours_csv(&[c]), format!("{CONTOUR_HEADER}\n0,0,0.5,0.25\n0,1,0.75,1\n"));
    }

    #[test]
    fn failed_set_leaves_no_files() {
        let dir = tempfile::tempdir().unwrap();
        // Second target is an existing directory, so the rename fails.
        fs::create_dir(dir.path().join("b.csv")).unwrap();
        let files = vec![("a.csv".to_string(), "1\n".to_string()), ("b.csv".to_string(), "2\n".to_string())];
        assert!(write_all(dir.path(), &files).is_err());
        assert!(!dir.path().join("a.csv").exists());
        assert!(!dir.path().join(".b.csv.partial").exists());
    }
}
