//! Plain-text and CSV renderings. Phases and ranges are in units of π with
//! four decimals; areas carry six.

use std::f64::consts::PI;
use std::fmt::Write;

use cpulse::golden::GoldenRow;
use cpulse::metrics::{Interval, MetricsReport};
use cpulse::optimizer::{OptimizationProblem, OptimizationResult, VerificationReport};
use cpulse::su2::wrap_phase;
use cpulse::CompositeSequence;

fn interval(i: Option<&Interval>) -> String {
    match i {
        Some(i) => format!("[{:.4}π, {:.4}π]", i.lo, i.hi),
        None => "-".to_string(),
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.digits$}"))
}

pub fn metrics_text(m: &MetricsReport) -> String {
    let kind = match m.kind {
        cpulse::ProfileKind::Probability => "probability",
        cpulse::ProfileKind::Fidelity => "fidelity",
    };
    let mut s = String::new();
    writeln!(s, "label      {}", m.label).unwrap();
    writeln!(s, "profile    {kind}").unwrap();
    writeln!(s, "pulses     {}", m.n_pulses).unwrap();
    writeln!(s, "run_time   {:.4}π", m.run_time).unwrap();
    writeln!(s, "sigma      {:.6}", m.sigma).unwrap();
    writeln!(s, "sigma_b    {:.6}", m.sigma_b).unwrap();
    writeln!(s, "sigma_n    {:.6}", m.sigma_n).unwrap();
    writeln!(s, "range_90   {}", interval(m.range_90.as_ref())).unwrap();
    if let Some(r) = &m.range_90 {
        writeln!(s, "range_pct  {:.1}%", r.percent()).unwrap();
    }
    writeln!(s, "fwhm       {}", interval(m.fwhm.as_ref())).unwrap();
    writeln!(s, "kappa      {} (alpha {})", opt(m.kappa, 4), m.alpha).unwrap();
    s
}

pub fn metrics_csv(reports: &[MetricsReport]) -> String {
    let mut s = String::from(
        "label,pulses,run_time,sigma,sigma_b,sigma_n,range90_lo,range90_hi,fwhm_lo,fwhm_hi,kappa\n",
    );
    let bound = |i: Option<&Interval>, hi: bool| {
        i.map_or_else(String::new, |i| format!("{:?}", if hi { i.hi } else { i.lo }))
    };
    for m in reports {
        writeln!(
            s,
            "{},{},{:?},{:?},{:?},{:?},{},{},{},{},{}",
            m.label,
            m.n_pulses,
            m.run_time,
            m.sigma,
            m.sigma_b,
            m.sigma_n,
            bound(m.range_90.as_ref(), false),
            bound(m.range_90.as_ref(), true),
            bound(m.fwhm.as_ref(), false),
            bound(m.fwhm.as_ref(), true),
            m.kappa.map_or_else(String::new, |k| format!("{k:?}")),
        )
        .unwrap();
    }
    s
}

/// Index of the best entry, or `None` when fewer than two are defined or the
/// best is tied.
fn winner(values: &[Option<f64>], higher_is_better: bool) -> Option<usize> {
    let defined: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, if higher_is_better { v } else { -v })))
        .collect();
    if defined.len() < 2 {
        return None;
    }
    let best = defined.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let at_best: Vec<usize> = defined
        .iter()
        .filter(|x| (x.1 - best).abs() <= 1e-9)
        .map(|x| x.0)
        .collect();
    (at_best.len() == 1).then(|| at_best[0])
}

pub fn compare_text(reports: &[MetricsReport]) -> String {
    type Row = (&'static str, &'static str, Vec<Option<f64>>, Vec<String>, bool);
    let rows: Vec<Row> = vec![
        (
            "run_time",
            "shorter",
            reports.iter().map(|m| Some(m.run_time)).collect(),
            reports.iter().map(|m| format!("{:.4}π", m.run_time)).collect(),
            false,
        ),
        (
            "sigma",
            "larger",
            reports.iter().map(|m| Some(m.sigma)).collect(),
            reports.iter().map(|m| format!("{:.6}", m.sigma)).collect(),
            true,
        ),
        (
            "sigma_b",
            "larger",
            reports.iter().map(|m| Some(m.sigma_b)).collect(),
            reports.iter().map(|m| format!("{:.6}", m.sigma_b)).collect(),
            true,
        ),
        (
            "sigma_n",
            "smaller",
            reports.iter().map(|m| Some(m.sigma_n)).collect(),
            reports.iter().map(|m| format!("{:.6}", m.sigma_n)).collect(),
            false,
        ),
        (
            "range_90",
            "wider",
            reports.iter().map(|m| m.range_90.map(|r| r.width())).collect(),
            reports.iter().map(|m| interval(m.range_90.as_ref())).collect(),
            true,
        ),
        (
            "fwhm",
            "narrower",
            reports.iter().map(|m| m.fwhm.map(|r| r.width())).collect(),
            reports.iter().map(|m| interval(m.fwhm.as_ref())).collect(),
            false,
        ),
        (
            "kappa",
            "larger",
            reports.iter().map(|m| m.kappa).collect(),
            reports.iter().map(|m| opt(m.kappa, 4)).collect(),
            true,
        ),
    ];

    let mut widths: Vec<usize> = reports.iter().map(|m| m.label.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(&row.3) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let pad = |text: &str, w: usize| format!("{text}{}", " ".repeat(w - text.chars().count()));

    let mut s = String::new();
    write!(s, "{}", pad("metric", 10)).unwrap();
    for (m, &w) in reports.iter().zip(&widths) {
        write!(s, "  {}", pad(&m.label, w)).unwrap();
    }
    writeln!(s, "  winner").unwrap();
    for (name, sense, values, cells, higher) in &rows {
        write!(s, "{}", pad(name, 10)).unwrap();
        for (cell, &w) in cells.iter().zip(&widths) {
            write!(s, "  {}", pad(cell, w)).unwrap();
        }
        let w = match winner(values, *higher) {
            Some(i) => format!("{} ({sense})", reports[i].label),
            None => "-".to_string(),
        };
        writeln!(s, "  {w}").unwrap();
    }
    s
}

pub fn derive_text(
    problem: &OptimizationProblem,
    seq: &CompositeSequence,
    result: &OptimizationResult,
) -> String {
    let phases: Vec<String> = seq
        .phases()
        .iter()
        .map(|p| {
            let x = wrap_phase(*p) / PI;
            // 1.99996 prints as 2.0000; fold it back to 0
            let x = if format!("{x:.4}") == "2.0000" { 0.0 } else { x };
            format!("{x:.4}")
        })
        .collect();
    let mut s = String::new();
    writeln!(s, "family     {}", problem.family).unwrap();
    writeln!(s, "pulses     {}", problem.n_pulses).unwrap();
    writeln!(s, "objective  {} = {:.10}", problem.objective, result.objective_value).unwrap();
    writeln!(s, "phases     {}", phases.join(", ")).unwrap();
    writeln!(s, "starts     {} ({} random)", result.n_starts, result.n_restarts_used).unwrap();
    writeln!(s, "converged  {}", result.converged).unwrap();
    writeln!(s, "optima     {}", result.all_local_optima.len()).unwrap();
    s
}

pub fn verify_text(report: &VerificationReport) -> String {
    let mut s = String::new();
    for c in &report.cells {
        let computed = opt(c.computed, 6);
        let diff = c.computed.map_or_else(|| "-".to_string(), |v| format!("{:+.2e}", v - c.reported));
        write!(
            s,
            "{} {:<4} {:<10} {:<14} reported {:<10} computed {:<10} diff {:<10} tol {}",
            if c.pass { "PASS" } else { "FAIL" },
            format!("{:?}", c.table),
            c.label,
            c.metric,
            c.reported,
            computed,
            diff,
            c.tolerance,
        )
        .unwrap();
        if let Some(note) = &c.note {
            write!(s, "  ({note})").unwrap();
        }
        s.push('\n');
    }
    let failed = report.failures().count();
    writeln!(s, "{} cells checked, {} failed", report.cells.len(), failed).unwrap();
    s
}

pub fn list_text(rows: &[GoldenRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let phases: Vec<String> = r.phases.iter().map(|p| format!("{p:.4}")).collect();
        writeln!(
            s,
            "{:<4} {:<10} {:<6} {:>2} pulses  phases {}",
            format!("{:?}", r.table),
            r.label,
            r.family,
            r.n_pulses(),
            phases.join(", ")
        )
        .unwrap();
    }
    s
}
