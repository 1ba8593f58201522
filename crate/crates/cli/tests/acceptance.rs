//! Acceptance criteria 1–8. Each test prints one `criterion N: PASS|FAIL`
//! line plus the individual checks behind it; run with `--nocapture` to see
//! them.

use std::f64::consts::PI;
use std::process::{Command, Output};

use cpulse::golden::{find_row, golden_table, golden_tables, labels, GoldenRow, GoldenTable};
use cpulse::jones::stack_conversion_efficiency;
use cpulse::metrics::{area_whole, fwhm, threshold_range, Evaluator};
use cpulse::optimizer::{
    derive, equivalent_within, refine, verify_rows, CellResult, OptimizationProblem, Tolerances,
};
use cpulse::sequences::to_jones_stack;
use cpulse::su2::{compose, trace_fidelity_z, transition_probability, Pulse};
use cpulse::{lookup, Family, ProfileKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    number: u32,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(number: u32) -> Self {
        Self {
            number,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, pass: bool, what: impl Into<String>) {
        self.checks.push((what.into(), pass));
    }

    fn near(&mut self, what: &str, computed: f64, expected: f64, tol: f64) {
        let pass = (computed - expected).abs() <= tol;
        self.check(
            pass,
            format!("{what}: {computed:.10} vs {expected:.10} (|diff| {:.2e}, tol {tol:.1e})", (computed - expected).abs()),
        );
    }

    fn cells(&mut self, cells: &[CellResult], tol_override: Option<f64>) {
        for c in cells {
            let pass = match (tol_override, c.computed) {
                (Some(t), Some(v)) => (v - c.reported).abs() <= t,
                (None, _) => c.pass,
                (_, None) => false,
            };
            let computed = c.computed.map_or("-".to_string(), |v| format!("{v:.6}"));
            self.check(
                pass,
                format!(
                    "{:?} {} {}: {computed} vs {} (tol {})",
                    c.table,
                    c.label,
                    c.metric,
                    c.reported,
                    tol_override.unwrap_or(c.tolerance)
                ),
            );
        }
    }

    fn finish(self) {
        let failed: Vec<&(String, bool)> = self.checks.iter().filter(|c| !c.1).collect();
        for (what, pass) in &self.checks {
            println!("    [{}] {what}", if *pass { "ok" } else { "FAIL" });
        }
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict} ({} checks, {} failed)",
            self.number,
            self.checks.len(),
            failed.len()
        );
        assert!(
            failed.is_empty(),
            "criterion {} failed:\n{}",
            self.number,
            failed.iter().map(|c| c.0.as_str()).collect::<Vec<_>>().join("\n")
        );
    }
}

fn rows(table: GoldenTable, labels: &[&str]) -> Vec<GoldenRow> {
    let all = golden_table(table);
    labels
        .iter()
        .map(|l| all.iter().find(|r| r.label == *l).unwrap_or_else(|| panic!("{l}")).clone())
        .collect()
}

fn cells_of<'a>(cells: &'a [CellResult], metric_prefix: &'a str) -> Vec<CellResult> {
    cells.iter().filter(|c| c.metric.starts_with(metric_prefix)).cloned().collect()
}

/// Locally refined area of a row, plus how far (in units of π) the phases moved.
fn refined_area(row: &GoldenRow) -> (f64, f64) {
    let printed = row.sequence().free_phases;
    let problem = OptimizationProblem::new(row.family, row.n_pulses()).unwrap();
    let best = refine(&problem, &printed).unwrap();
    let moved = best
        .free_phases
        .iter()
        .zip(&printed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (best.value, moved / PI)
}

#[test]
fn criterion_1_broadband_table() {
    let mut c = Criterion::new(1);
    let labels = ["single", "Bat3", "Bat5", "Bat7", "Bat9", "Bat11", "BB2"];
    let rows = rows(GoldenTable::I, &labels);
    let report = verify_rows(&rows, Tolerances::default());
    c.cells(&cells_of(&report.cells, "sigma"), Some(1e-3));
    c.cells(&cells_of(&report.cells, "range90"), Some(0.002));

    c.near("single exact area", area_whole(&lookup("single").unwrap(), ProfileKind::Probability), 1.0, 1e-9);
    c.near(
        "BB2 closed form (11+√2)/8",
        area_whole(&lookup("BB2").unwrap(), ProfileKind::Probability),
        (11.0 + 2f64.sqrt()) / 8.0,
        1e-9,
    );
    for (label, n) in [("Bat3", 3.0), ("Bat5", 5.0), ("Bat7", 7.0), ("Bat9", 9.0), ("Bat11", 11.0)] {
        let row = find_row(label).unwrap();
        let (area, moved) = refined_area(&row);
        c.near(&format!("{label} refined area vs {}/{}", 2.0 * n, n + 1.0), area, 2.0 * n / (n + 1.0), 1e-9);
        c.check(moved < 0.01, format!("{label} refinement moved {moved:.2e}π from the printed phases"));
    }
    c.finish();
}

#[test]
fn criterion_2_narrowband_table() {
    let mut c = Criterion::new(2);
    for (label, n) in [("Snake3", 3.0), ("Snake5", 5.0), ("Snake7", 7.0), ("Snake9", 9.0), ("Snake11", 11.0)] {
        let row = find_row(label).unwrap();
        let (area, moved) = refined_area(&row);
        c.near(&format!("{label} refined area vs 2/{}", n + 1.0), area, 2.0 / (n + 1.0), 1e-9);
        c.check(moved < 0.01, format!("{label} refinement moved {moved:.2e}π from the printed phases"));
        let printed = area_whole(&row.sequence(), ProfileKind::Probability);
        c.near(&format!("{label} printed-phase area"), printed, 2.0 / (n + 1.0), 1e-3);
    }
    c.near(
        "NB2 area vs (5−√2)/8",
        area_whole(&lookup("NB2").unwrap(), ProfileKind::Probability),
        (5.0 - 2f64.sqrt()) / 8.0,
        1e-3,
    );
    let rows = rows(GoldenTable::II, &["single", "Snake3", "Snake5", "Snake7", "Snake9", "Snake11", "NB2"]);
    let report = verify_rows(&rows, Tolerances::default());
    c.cells(&cells_of(&report.cells, "fwhm"), Some(0.002));
    c.finish();
}

#[test]
fn criterion_3_passband_table() {
    let mut c = Criterion::new(3);
    let rows = golden_table(GoldenTable::III);
    let report = verify_rows(&rows, Tolerances::default());
    c.cells(&cells_of(&report.cells, "sigma_"), Some(1.5e-3));
    c.cells(&cells_of(&report.cells, "range90"), Some(0.002));
    c.cells(&cells_of(&report.cells, "kappa"), None);
    c.cells(&cells_of(&report.cells, "run_time"), None);
    let expected_kappa = [
        ("single", 1.36),
        ("Octopus3", 3.45),
        ("Octopus5", 5.49),
        ("Octopus7", 7.52),
        ("Octopus9", 9.54),
        ("PB2", 3.24),
    ];
    for (prefix, kappa) in expected_kappa {
        for row in rows.iter().filter(|r| r.label.starts_with(prefix)) {
            let k = cpulse::metrics::rectangularity(&row.sequence(), 0.1).unwrap();
            c.check(
                (k - kappa).abs() <= 0.02 * kappa,
                format!("{} κ(0.1) = {k:.4} vs {kappa} (2%)", row.label),
            );
        }
    }
    for row in &rows {
        let seq = row.sequence();
        let expected = match row.family {
            Family::UltraPassband | Family::ReferencePB2 => (2 * seq.len() - 1) as f64,
            _ => seq.len() as f64,
        };
        c.check(
            (seq.run_time() / PI - expected).abs() < 1e-12,
            format!("{} run time {}π = (2N−1)π", row.label, seq.run_time() / PI),
        );
    }
    c.finish();
}

#[test]
fn criterion_4_phasal_table() {
    let mut c = Criterion::new(4);
    let rows = golden_table(GoldenTable::IV);
    let fractions = [
        ("two", 1.0),
        ("BatPh4", 4.0 / 3.0),
        ("BatPh6", 1.5),
        ("BatPh8", 1.6),
        ("BatPh10", 5.0 / 3.0),
        ("BatPh12", 12.0 / 7.0),
        ("BatPh14", 1.75),
    ];
    for (label, frac) in fractions {
        let row = rows.iter().find(|r| r.label == label).unwrap();
        let area = area_whole(&row.sequence(), ProfileKind::Fidelity);
        c.near(&format!("{label} fidelity area"), area, frac, 1.5e-3);
    }
    let report = verify_rows(&rows, Tolerances::default());
    for cell in cells_of(&report.cells, "fidelity90") {
        let tol = if cell.label == "two" { 5e-5 } else { 0.002 };
        c.cells(std::slice::from_ref(&cell), Some(tol));
    }
    let batph4 = lookup("BatPh4").unwrap();
    let centre = trace_fidelity_z(&batph4.pulses, 0.0, PI);
    c.check(
        (0.89..1.0).contains(&centre),
        format!("BatPh4 centre fidelity {centre:.6} in [0.89, 1)"),
    );
    c.finish();
}

#[test]
fn criterion_5_rederivation() {
    let mut c = Criterion::new(5);
    for label in ["Bat3", "Bat5", "Snake3", "Snake5", "Octopus3", "BatPh4", "BatPh6"] {
        let row = find_row(label).unwrap();
        let problem = OptimizationProblem::new(row.family, row.n_pulses()).unwrap().without_table_hint();
        let result = derive(&problem, 64, 2024).unwrap();
        let printed_seq = row.sequence();
        let printed_value = problem.objective.evaluate(&printed_seq);
        c.near(&format!("{label} objective vs printed phases"), result.objective_value, printed_value, 1e-4);
        if let Some(closed) = row.closed_form_area {
            c.near(&format!("{label} objective vs printed value"), result.objective_value, closed, 1e-4);
        }
        let found = problem.sequence(&result.free_phases).phases();
        c.check(
            equivalent_within(&found, &printed_seq.phases(), row.family, 1e-3),
            format!("{label} profile equivalent to the printed phases (1e-3)"),
        );
    }
    c.finish();
}

#[test]
fn criterion_6_comparative_claims() {
    let mut c = Criterion::new(6);
    let range = |l: &str| threshold_range(&lookup(l).unwrap(), 0.9, ProfileKind::Probability).unwrap();
    c.near("Bat5 range percent", range("Bat5").percent(), 75.2, 0.3);
    c.near("BB2 range percent", range("BB2").percent(), 64.4, 0.3);
    let bat5 = area_whole(&lookup("Bat5").unwrap(), ProfileKind::Probability);
    let bb2 = area_whole(&lookup("BB2").unwrap(), ProfileKind::Probability);
    c.near("Bat5 area minus BB2 area", (bat5 - bb2).abs(), 0.115, 0.003);
    let ratio = fwhm(&lookup("NB2").unwrap()).unwrap().width() / fwhm(&lookup("Snake5").unwrap()).unwrap().width();
    c.check((1.35..=1.45).contains(&ratio), format!("NB2/Snake5 FWHM ratio {ratio:.4} in [1.35, 1.45]"));
    c.finish();
}

#[test]
fn criterion_7_property_suite() {
    let mut c = Criterion::new(7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..60);
        let pulses: Vec<Pulse> = (0..n)
            .map(|_| Pulse::new(rng.gen_range(0.01..4.0 * PI), rng.gen_range(0.0..2.0 * PI)).unwrap())
            .collect();
        let u = compose(&pulses, rng.gen_range(-1.0..1.0));
        worst = worst.max((u.norm_sqr() - 1.0).abs());
    }
    c.check(worst <= 1e-12, format!("unitarity over 10^4 random compositions: {worst:.2e}"));

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let theta = rng.gen_range(0.01..4.0 * PI);
        let eps = rng.gen_range(-1.0..1.0);
        let p = transition_probability(&[Pulse::new(theta, rng.gen_range(0.0..6.3)).unwrap()], eps);
        worst = worst.max((p - (theta * (1.0 + eps) / 2.0).sin().powi(2)).abs());
    }
    c.check(worst <= 1e-14, format!("single-pulse closed form: {worst:.2e}"));

    let mut worst = 0.0f64;
    for label in labels() {
        let seq = lookup(&label).unwrap();
        let delta = rng.gen_range(0.0..2.0 * PI);
        let shifted = seq.phase_shifted(delta);
        for i in 0..101 {
            let eps = -1.0 + 0.02 * i as f64;
            worst = worst.max(
                (transition_probability(&seq.pulses, eps) - transition_probability(&shifted.pulses, eps)).abs(),
            );
        }
    }
    c.check(worst <= 1e-12, format!("global-phase covariance of p(ε): {worst:.2e}"));

    let mut worst = 0.0f64;
    for row in golden_table(GoldenTable::I) {
        let ev = Evaluator::new(&row.sequence().pulses);
        for i in 0..2001 {
            let eps = -1.0 + 0.001 * i as f64;
            worst = worst.max((ev.value(ProfileKind::Probability, eps) - ev.value(ProfileKind::Probability, -eps)).abs());
        }
    }
    c.check(worst <= 1e-10, format!("broadband mirror symmetry: {worst:.2e}"));

    let mut worst = 0.0f64;
    for row in golden_table(GoldenTable::III)
        .into_iter()
        .filter(|r| r.family == Family::UltraPassband)
    {
        let ev = Evaluator::new(&row.sequence().pulses);
        for i in 0..2001 {
            let eps = -1.0 + 0.001 * i as f64;
            let s = ev.value(ProfileKind::Probability, eps) + ev.value(ProfileKind::Probability, 1.0 - eps);
            worst = worst.max((s - 1.0).abs());
        }
    }
    c.check(worst <= 1e-6, format!("passband complementarity p(ε)+p(1−ε)=1: {worst:.2e}"));

    let mut worst = 0.0f64;
    for label in labels() {
        let seq = lookup(&label).unwrap();
        let plates = to_jones_stack(&seq);
        for i in 0..101 {
            let eps = -1.0 + 0.02 * i as f64;
            worst = worst.max(
                (stack_conversion_efficiency(&plates, 1.0 + eps) - transition_probability(&seq.pulses, eps)).abs(),
            );
        }
    }
    c.check(worst <= 1e-12, format!("wave-plate dictionary over all labels × 101 errors: {worst:.2e}"));
    c.finish();
}

fn cpulse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpulse"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_8_cli_contract() {
    let mut c = Criterion::new(8);
    let pristine = cpulse(&["verify-tables"]);
    c.check(pristine.status.code() == Some(0), format!("pristine verify-tables exit {:?}", pristine.status.code()));

    let dir = tempfile::tempdir().unwrap();
    let exported = cpulse(&["list", "--format", "json"]);
    let golden: Vec<GoldenRow> = serde_json::from_slice(&exported.stdout).unwrap();
    assert_eq!(golden, golden_tables());

    let path = dir.path().join("golden.json");
    let path_arg = path.to_str().unwrap();
    std::fs::write(&path, serde_json::to_string(&golden).unwrap()).unwrap();
    let exported_run = cpulse(&["verify-tables", "--golden", path_arg]);
    c.check(exported_run.status.code() == Some(0), "exported golden data verifies cleanly");

    let mut undetected = Vec::new();
    let mut runs = 0;
    for (r, row) in golden.iter().enumerate() {
        // one-entry columns only set a global phase, which no metric sees
        if row.phases.len() < 2 {
            continue;
        }
        for k in 0..row.phases.len() {
            let mut perturbed = golden.clone();
            perturbed[r].phases[k] += 0.02;
            std::fs::write(&path, serde_json::to_string(&perturbed).unwrap()).unwrap();
            runs += 1;
            if cpulse(&["verify-tables", "--golden", path_arg]).status.code() != Some(1) {
                undetected.push(format!("{} phase {k}", row.label));
            }
        }
    }
    c.check(
        undetected.is_empty(),
        format!("{runs} single-phase perturbations by 0.02π exit 1; undetected: {undetected:?}"),
    );

    for args in [
        vec!["profile", "Bat5", "--points", "2001"],
        vec!["profile", "BatPh14", "--kind", "fidelity", "--axis", "phi"],
        vec!["metrics", "Octopus9a"],
        vec!["metrics", "NB2", "--format", "json"],
    ] {
        let a = cpulse(&args);
        let b = cpulse(&args);
        c.check(
            a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty(),
            format!("`{}` byte-identical across runs", args.join(" ")),
        );
    }
    c.finish();
}
