//! Randomized agreement check between the closed-form amplitudes and the
//! direct solve of the stationary equations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::quantum::{
    self, LocalDrive, ProbeDrive, SolverLimits, SteadyAmplitudes, SystemParams, REFERENCE_PROBE,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Parameter ranges for random draws, in units of `gamma_unit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrawRanges {
    pub rates: (f64, f64),
    pub detunings: (f64, f64),
    pub rabi: (f64, f64),
}

impl Default for DrawRanges {
    fn default() -> Self {
        Self { rates: (0.01, 1.0), detunings: (-10.0, 10.0), rabi: (0.0, 12.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscrepancyContext {
    pub operation: &'static str,
    pub draw: usize,
    pub omega_c: f64,
    pub omega_s: f64,
    pub delta_p: f64,
}

/// One amplitude component on which the two routes disagree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyRecord {
    pub context: DiscrepancyContext,
    pub quantity: &'static str,
    pub closed_form: Complex64,
    pub oracle: Complex64,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub draws: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: usize,
    /// Draws where one route refused the point as near-singular.
    pub skipped: usize,
    pub discrepancies: Vec<DiscrepancyRecord>,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// |a − b| / max(|a|, |b|), zero when both vanish.
pub fn relative_difference(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Draws rates, detunings and drive amplitudes uniformly from `ranges`,
/// keeping the dipole moments, density and unit of `base`.
pub fn random_point(rng: &mut impl Rng, base: &SystemParams, ranges: &DrawRanges) -> (SystemParams, LocalDrive) {
    let g = base.gamma_unit;
    let mut draw = |(lo, hi): (f64, f64)| rng.gen_range(lo..=hi) * g;
    let params = SystemParams {
        gamma3: draw(ranges.rates),
        gamma4: draw(ranges.rates),
        gamma12: draw(ranges.rates),
        delta_p: draw(ranges.detunings),
        delta_c: draw(ranges.detunings),
        delta_s: draw(ranges.detunings),
        ..*base
    };
    let drive = LocalDrive::real(draw(ranges.rabi), draw(ranges.rabi));
    (params, drive)
}

/// Compares the two routes componentwise on one point.
pub fn compare_point(
    params: &SystemParams,
    drive: &LocalDrive,
    probe: &ProbeDrive,
    limits: &SolverLimits,
    tolerance: f64,
    draw: usize,
) -> Option<Vec<DiscrepancyRecord>> {
    let closed: SteadyAmplitudes = quantum::steady_closed_form(params, drive, probe, limits).ok()?;
    let oracle = quantum::steady_linear_solve(params, drive, probe, limits).ok()?;
    let context = DiscrepancyContext {
        operation: "steady_closed_form",
        draw,
        omega_c: drive.omega_c.re,
        omega_s: drive.omega_s.re,
        delta_p: params.delta_p,
    };
    Some(
        closed
            .components()
            .iter()
            .zip(oracle.components().iter())
            .filter_map(|(&(quantity, a), &(_, b))| {
                let relative_difference = relative_difference(a, b);
                (!(relative_difference <= tolerance)).then_some(DiscrepancyRecord {
                    context,
                    quantity,
                    closed_form: a,
                    oracle: b,
                    relative_difference,
                })
            })
            .collect(),
    )
}

/// Runs `draws` random comparisons from a ChaCha8 stream seeded by `seed`.
/// The probe is the real reference probe tied by E_p/B_p = c.
pub fn run_check(
    base: &SystemParams,
    ranges: &DrawRanges,
    draws: usize,
    seed: u64,
    limits: &SolverLimits,
    tolerance: f64,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport { draws, seed, tolerance, passed: 0, skipped: 0, discrepancies: Vec::new() };
    for draw in 0..draws {
        let (params, drive) = random_point(&mut rng, base, ranges);
        let probe = ProbeDrive::from_electric(&params, Complex64::new(REFERENCE_PROBE * params.gamma_unit, 0.0));
        match compare_point(&params, &drive, &probe, limits, tolerance, draw) {
            None => report.skipped += 1,
            Some(found) if found.is_empty() => report.passed += 1,
            Some(found) => report.discrepancies.extend(found),
        }
    }
    report
}
