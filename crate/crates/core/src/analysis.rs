//! Double-negative regions, iso-contours of Re{n}, circle fits and isotropy.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::grid::{FieldMap, GridSpec};

/// Isotropy at or below which an innermost contour is reported as circular.
pub const DEFAULT_ISOTROPY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourPolyline {
    pub level: f64,
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

impl ContourPolyline {
    /// Absolute enclosed area by the shoelace formula. Zero for open lines.
    pub fn area(&self) -> f64 {
        if !self.closed {
            return 0.0;
        }
        let pts = &self.points;
        let twice: f64 = (0..pts.len())
            .map(|k| {
                let (x0, y0) = pts[k];
                let (x1, y1) = pts[(k + 1) % pts.len()];
                x0 * y1 - x1 * y0
            })
            .sum();
        0.5 * twice.abs()
    }

    /// Even-odd point-in-polygon test. Always false for open lines.
    pub fn encloses(&self, (px, py): (f64, f64)) -> bool {
        if !self.closed {
            return false;
        }
        let pts = &self.points;
        let mut inside = false;
        let mut j = pts.len() - 1;
        for i in 0..pts.len() {
            let (xi, yi) = pts[i];
            let (xj, yj) = pts[j];
            if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleFitResult {
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    pub rms_residual: f64,
    pub isotropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionMetrics {
    pub double_negative_fraction: f64,
    pub min_re_n: f64,
    pub argmin: (f64, f64),
    pub n_at_reference: Complex64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("NoEnclosingContour: no closed contour encloses ({x}, {y})")]
    NoEnclosingContour { x: f64, y: f64 },
    #[error("DegenerateFit: {0}")]
    DegenerateFit(String),
}

impl AnalysisError {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisError::NoEnclosingContour { .. } => "NoEnclosingContour",
            AnalysisError::DegenerateFit(_) => "DegenerateFit",
        }
    }
}

/// True where Re(ε_r) < 0 and Re(μ_r) < 0 on an error-free cell.
pub fn double_negative_mask(map: &FieldMap) -> Vec<bool> {
    map.samples.iter().map(|s| s.is_double_negative()).collect()
}

/// Iso-contours of Re{n} at `level`. Cells touching an error-flagged point
/// are skipped.
pub fn extract_contours(map: &FieldMap, level: f64) -> Vec<ContourPolyline> {
    let values: Vec<f64> = map.samples.iter().map(|s| s.n.re).collect();
    let valid: Vec<bool> = map.samples.iter().map(|s| s.is_valid()).collect();
    contour_field(&map.grid, &values, &valid, level)
}

// Crossing points live on grid edges. Horizontal edge (i, j) joins points
// (i, j)-(i+1, j); vertical edge (i, j) joins (i, j)-(i, j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Marching squares over a row-major scalar field with linear interpolation
/// along edges. Saddle cells are resolved by comparing the four-corner mean
/// against the level.
pub fn contour_field(grid: &GridSpec, values: &[f64], valid: &[bool], level: f64) -> Vec<ContourPolyline> {
    let (nx, ny) = (grid.nx, grid.ny);
    let value = |i: usize, j: usize| values[j * nx + i];
    let above = |i: usize, j: usize| value(i, j) > level;

    let mut links: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
    let mut connect = |a: Edge, b: Edge| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };

    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            if corners.iter().any(|&(a, b)| !valid[b * nx + a] || !value(a, b).is_finite()) {
                continue;
            }
            // Edge k joins corner k and corner k+1 (counter-clockwise).
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let state: Vec<bool> = corners.iter().map(|&(a, b)| above(a, b)).collect();
            let crossed: Vec<usize> = (0..4).filter(|&k| state[k] != state[(k + 1) % 4]).collect();
            match crossed.len() {
                2 => connect(edges[crossed[0]], edges[crossed[1]]),
                4 => {
                    let mean = corners.iter().map(|&(a, b)| value(a, b)).sum::<f64>() / 4.0;
                    let center_above = mean > level;
                    // Corners unlike the centre are cut off by their two edges.
                    for k in 0..4 {
                        if state[k] != center_above {
                            connect(edges[(k + 3) % 4], edges[k]);
                        }
                    }
                }
                _ => {}
            }
        }
    }

    let point = |e: Edge| {
        let ((i0, j0), (i1, j1)) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (v0, v1) = (value(i0, j0), value(i1, j1));
        let t = (level - v0) / (v1 - v0);
        let (x0, y0) = (grid.x(i0), grid.y(j0));
        let (x1, y1) = (grid.x(i1), grid.y(j1));
        (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
    };

    let mut visited: BTreeMap<Edge, bool> = links.keys().map(|&e| (e, false)).collect();
    let mut chains: Vec<(Vec<Edge>, bool)> = Vec::new();
    // Open chains start at degree-one edges; everything left afterwards is a loop.
    let starts: Vec<Edge> = links.iter().filter(|(_, n)| n.len() == 1).map(|(e, _)| *e).collect();
    let loops: Vec<Edge> = links.keys().copied().collect();
    for (start, open) in starts.into_iter().map(|e| (e, true)).chain(loops.into_iter().map(|e| (e, false))) {
        if visited[&start] {
            continue;
        }
        let mut chain = vec![start];
        visited.insert(start, true);
        let mut current = start;
        while let Some(&next) = links[&current].iter().find(|n| !visited[*n]) {
            visited.insert(next, true);
            chain.push(next);
            current = next;
        }
        let closed = !open && chain.len() > 2 && links[&current].contains(&start);
        chains.push((chain, closed));
    }

    chains
        .into_iter()
        .filter_map(|(chain, closed)| {
            let mut points: Vec<(f64, f64)> = Vec::with_capacity(chain.len());
            for p in chain.into_iter().map(point) {
                if points.last() != Some(&p) {
                    points.push(p);
                }
            }
            if closed && points.len() > 1 && points.first() == points.last() {
                points.pop();
            }
            let closed = closed && points.len() >= 3;
            (points.len() >= 2).then_some(ContourPolyline { level, points, closed })
        })
        .collect()
}

/// Smallest-area closed contour enclosing `reference`.
pub fn innermost_contour(
    contours: &[ContourPolyline],
    reference: (f64, f64),
) -> Result<ContourPolyline, AnalysisError> {
    contours
        .iter()
        .filter(|c| c.closed && c.encloses(reference))
        .min_by(|a, b| a.area().total_cmp(&b.area()))
        .cloned()
        .ok_or(AnalysisError::NoEnclosingContour { x: reference.0, y: reference.1 })
}

/// Algebraic least-squares circle fit (Kåsa), solved in centred coordinates.
pub fn fit_circle(polyline: &ContourPolyline) -> Result<CircleFitResult, AnalysisError> {
    fit_circle_points(&polyline.points)
}

pub fn fit_circle_points(points: &[(f64, f64)]) -> Result<CircleFitResult, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::DegenerateFit(format!("need 3 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;

    let (mut suu, mut svv, mut suv) = (0.0, 0.0, 0.0);
    let (mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (u, v) = (x - mx, y - my);
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    // [suu suv; suv svv] [uc; vc] = ½ [suuu + suvv; svvv + svuu]
    let det = suu * svv - suv * suv;
    if !(det > 1e-12 * suu * svv) || det <= 0.0 {
        return Err(AnalysisError::DegenerateFit("points are collinear".into()));
    }
    let bu = 0.5 * (suuu + suvv);
    let bv = 0.5 * (svvv + svuu);
    let uc = (bu * svv - bv * suv) / det;
    let vc = (suu * bv - suv * bu) / det;
    let radius = (uc * uc + vc * vc + (suu + svv) / n).sqrt();
    let (center_x, center_y) = (uc + mx, vc + my);

    let rms_residual = (points
        .iter()
        .map(|&(x, y)| ((x - center_x).hypot(y - center_y) - radius).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(CircleFitResult { center_x, center_y, radius, rms_residual, isotropy: rms_residual / radius })
}

pub fn region_metrics(map: &FieldMap, reference: (f64, f64)) -> RegionMetrics {
    let total = map.samples.len() as f64;
    let dn = map.samples.iter().filter(|s| s.is_double_negative()).count() as f64;
    let (mut min_re_n, mut argmin) = (f64::INFINITY, (f64::NAN, f64::NAN));
    for (k, s) in map.samples.iter().enumerate() {
        if s.is_valid() && s.n.re < min_re_n {
            min_re_n = s.n.re;
            argmin = map.grid.coords(k);
        }
    }
    RegionMetrics {
        double_negative_fraction: dn / total,
        min_re_n,
        argmin,
        n_at_reference: map.nearest(reference.0, reference.1).n,
    }
}
