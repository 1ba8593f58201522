//! Recomputes every published figure from the printed phases, and checks
//! that the printed phases are a local optimum of their family's objective.

use serde::{Deserialize, Serialize};

use std::f64::consts::PI;

use super::{nelder_mead, NelderMeadOptions, Objective, OptimizationProblem};
use crate::golden::{golden_tables, GoldenRow, GoldenTable, RangeKind};
use crate::metrics::{
    fwhm, rectangularity, threshold_range_or_extent, Evaluator, Interval, ProfileKind,
};
use crate::sequences::Family;
use crate::su2::angular_distance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute, on Σ, Σ_b and Σ_n.
    pub area: f64,
    /// Absolute, on interval endpoints in units of π.
    pub range: f64,
    /// Relative, on κ.
    pub kappa: f64,
    /// Largest phase change, in units of π, when the printed phases are
    /// locally re-optimized.
    pub optimality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            area: 1e-3,
            range: 0.002,
            kappa: 0.02,
            optimality: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub table: GoldenTable,
    pub label: String,
    pub metric: &'static str,
    pub reported: f64,
    /// `None` when the metric could not be computed at all.
    pub computed: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tolerances: Tolerances,
    pub cells: Vec<CellResult>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| !c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn cells_for<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a CellResult> + 'a {
        self.cells.iter().filter(move |c| c.label == label)
    }
}

struct RowCheck<'a> {
    row: &'a GoldenRow,
    cells: Vec<CellResult>,
}

impl RowCheck<'_> {
    fn abs(&mut self, metric: &'static str, reported: f64, computed: Option<f64>, tol: f64) {
        let pass = computed.is_some_and(|c| (c - reported).abs() <= tol);
        self.push(metric, reported, computed, tol, pass, None);
    }

    fn rel(&mut self, metric: &'static str, reported: f64, computed: Option<f64>, tol: f64) {
        let pass = computed.is_some_and(|c| (c - reported).abs() <= tol * reported.abs());
        self.push(metric, reported, computed, tol, pass, None);
    }

    fn interval(&mut self, reported: (f64, f64), computed: Result<Interval, crate::Error>, tol: f64) {
        let (lo, hi, note) = match &computed {
            Ok(i) => (
                Some(i.lo),
                Some(i.hi),
                (i.mode == crate::metrics::RangeMode::OuterExtent)
                    .then(|| "centre below threshold; outer extent".to_string()),
            ),
            Err(e) => (None, None, Some(e.to_string())),
        };
        let name = match self.row.range_kind {
            RangeKind::Fwhm => ("fwhm_lo", "fwhm_hi"),
            RangeKind::Transfer90 => ("range90_lo", "range90_hi"),
            RangeKind::Fidelity90 => ("fidelity90_lo", "fidelity90_hi"),
        };
        for (metric, rep, comp) in [(name.0, reported.0, lo), (name.1, reported.1, hi)] {
            let pass = comp.is_some_and(|c| (c - rep).abs() <= tol);
            self.push(metric, rep, comp, tol, pass, note.clone());
        }
    }

    fn push(
        &mut self,
        metric: &'static str,
        reported: f64,
        computed: Option<f64>,
        tolerance: f64,
        pass: bool,
        note: Option<String>,
    ) {
        self.cells.push(CellResult {
            table: self.row.table,
            label: self.row.label.clone(),
            metric,
            reported,
            computed,
            tolerance,
            pass,
            note,
        });
    }
}

/// Checks one row against its printed figures.
pub fn verify_row(row: &GoldenRow, tol: &Tolerances) -> Vec<CellResult> {
    let seq = row.sequence();
    let kind = row.family.profile_kind();
    let ev = Evaluator::new(&seq.pulses);
    let [l, c, r] = ev.sub_areas(kind);

    let mut check = RowCheck {
        row,
        cells: Vec::new(),
    };
    if let Some(a) = row.reported_area {
        check.abs("sigma", a, Some(l + c + r), tol.area);
    }
    if let Some(b) = row.reported_sigma_b {
        check.abs("sigma_b", b, Some(c), tol.area);
    }
    if let Some(n) = row.reported_sigma_n {
        check.abs("sigma_n", n, Some(l + r), tol.area);
    }

    // rows printed to more digits get a proportionally tighter tolerance
    let printed = 5.0 * 10f64.powi(-(row.range_digits as i32));
    let range_tol = tol.range.min(printed);
    let interval = match row.range_kind {
        RangeKind::Fwhm => fwhm(&seq),
        RangeKind::Transfer90 => threshold_range_or_extent(&seq, 0.9, ProfileKind::Probability),
        RangeKind::Fidelity90 => threshold_range_or_extent(&seq, 0.9, ProfileKind::Fidelity),
    };
    check.interval(row.reported_range, interval, range_tol);

    if let Some(k) = row.reported_kappa {
        check.rel("kappa", k, rectangularity(&seq, 0.1).ok(), tol.kappa);
    }
    match seq.check_structure() {
        Ok(()) => check.push("structure", 0.0, Some(0.0), 0.0, true, None),
        Err(e) => check.push("structure", 0.0, None, 0.0, false, Some(e.to_string())),
    }
    if let Some(problem) = Objective::for_family(row.family)
        .and_then(|_| OptimizationProblem::new(row.family, row.n_pulses()).ok())
    {
        let moved = settle(&problem, &seq.free_phases)
            .map(|best| refinement_shift(row.family, &seq.free_phases, &best) / PI);
        check.abs("optimality", 0.0, moved, tol.optimality);
    }
    check.abs(
        "run_time",
        row.reported_run_time,
        Some(seq.run_time() / PI),
        1e-12,
    );
    check.cells
}

/// A coarse local re-optimization; phase changes well below the optimality
/// tolerance are not resolved.
fn settle(problem: &OptimizationProblem, start: &[f64]) -> Option<Vec<f64>> {
    let f = |x: &[f64]| problem.cost(x);
    let opts = NelderMeadOptions {
        initial_step: 0.01,
        f_tol: 1e-11,
        x_tol: 1e-4,
        max_evals: 5_000,
    };
    let m = nelder_mead(&f, start, &opts);
    m.f.is_finite().then_some(m.x)
}

/// Largest change of any free phase. Phasal trains are compared through their
/// phases relative to the first, since a common shift does not change them.
fn refinement_shift(family: Family, before: &[f64], after: &[f64]) -> f64 {
    let relative = |x: &[f64]| -> Vec<f64> {
        match (family, x.first()) {
            (Family::UltraBroadbandPhasal, Some(&first)) => x.iter().map(|p| p - first).collect(),
            _ => x.to_vec(),
        }
    };
    relative(before)
        .iter()
        .zip(relative(after))
        .map(|(a, b)| angular_distance(*a, b))
        .fold(0.0, f64::max)
}

/// Recomputes Σ, Σ_b, Σ_n, the printed interval and κ of every row in `rows`.
pub fn verify_rows(rows: &[GoldenRow], tol: Tolerances) -> VerificationReport {
    use rayon::prelude::*;
    let cells = rows
        .par_iter()
        .map(|r| verify_row(r, &tol))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    VerificationReport {
        tolerances: tol,
        cells,
    }
}

/// [`verify_rows`] over the built-in tables.
pub fn verify_tables(tol: Tolerances) -> VerificationReport {
    verify_rows(&golden_tables(), tol)
}
