//! Published phase tables of the ultra-composite sequences and their reported figures.
//!
//! Phases are kept exactly as printed (units of π). Repeating decimals such as
//! `1.(6)` are stored as the fraction they denote.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::sequences::{CompositeSequence, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GoldenTable {
    /// Ultrabroadband rotational pulses.
    I,
    /// Ultranarrowband rotational pulses.
    II,
    /// Ultrapassband rotational pulses.
    III,
    /// Ultrabroadband phasal pulses.
    IV,
}

/// What the reported interval measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeKind {
    /// Transition probability above 0.9.
    Transfer90,
    /// Transition probability above 0.5.
    Fwhm,
    /// Trace fidelity above 0.9.
    Fidelity90,
}

impl RangeKind {
    pub fn threshold(self) -> f64 {
        match self {
            RangeKind::Fwhm => 0.5,
            RangeKind::Transfer90 | RangeKind::Fidelity90 => 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub table: GoldenTable,
    pub label: String,
    pub family: Family,
    /// Printed phase column, units of π.
    pub phases: Vec<f64>,
    /// Whole-range area column (Σ_b of Table I, Σ_n of Table II, Σ of Table IV).
    pub reported_area: Option<f64>,
    /// Closed form of the area where one is given.
    pub closed_form_area: Option<f64>,
    /// Central-half and edge-quarter areas (Table III).
    pub reported_sigma_b: Option<f64>,
    pub reported_sigma_n: Option<f64>,
    /// Interval endpoints in units of π.
    pub reported_range: (f64, f64),
    pub range_kind: RangeKind,
    pub reported_kappa: Option<f64>,
    /// Execution time in units of π.
    pub reported_run_time: f64,
    /// Number of digits after the decimal point of the printed range.
    pub range_digits: u32,
}

impl GoldenRow {
    /// Materializes the printed phases; fixed slots of the family are taken
    /// from the printed column, not assumed.
    pub fn sequence(&self) -> CompositeSequence {
        let column: Vec<f64> = self.phases.iter().map(|p| p * PI).collect();
        CompositeSequence::from_column(self.family, self.label.clone(), &column)
    }

    pub fn n_pulses(&self) -> usize {
        self.family.pulse_count(self.phases.len())
    }
}

struct Entry<'a> {
    label: &'a str,
    family: Family,
    phases: &'a [f64],
    area: Option<f64>,
    closed: Option<f64>,
    sb_sn: Option<(f64, f64)>,
    range: (f64, f64),
    kappa: Option<f64>,
}

fn row(table: GoldenTable, kind: RangeKind, s: Entry<'_>) -> GoldenRow {
    let n = s.family.pulse_count(s.phases.len());
    GoldenRow {
        table,
        label: s.label.to_string(),
        family: s.family,
        phases: s.phases.to_vec(),
        reported_area: s.area,
        closed_form_area: s.closed,
        reported_sigma_b: s.sb_sn.map(|x| x.0),
        reported_sigma_n: s.sb_sn.map(|x| x.1),
        reported_range: s.range,
        range_kind: kind,
        reported_kappa: s.kappa,
        reported_run_time: match s.family {
            Family::UltraPassband | Family::ReferencePB2 => (2 * n - 1) as f64,
            _ => n as f64,
        },
        range_digits: 3,
    }
}

fn table_one() -> Vec<GoldenRow> {
    use Family::*;
    let r = |label, family, phases, area: f64, closed: Option<f64>, range| {
        row(
            GoldenTable::I,
            RangeKind::Transfer90,
            Entry { label, family, phases, area: Some(area), closed, sb_sn: None, range, kappa: None },
        )
    };
    let sqrt2 = 2f64.sqrt();
    vec![
        r("single", SinglePulse, &[0.0], 1.0, Some(1.0), (0.795, 1.205)),
        r("Bat3", UltraBroadband, &[0.0, 0.5], 1.5, Some(1.5), (0.376, 1.624)),
        r("Bat5", UltraBroadband, &[0.0, 0.5825, 0.3737], 5.0 / 3.0, Some(5.0 / 3.0), (0.248, 1.752)),
        r("Bat7", UltraBroadband, &[0.0, 0.6230, 0.4918, 0.7558], 1.75, Some(1.75), (0.185, 1.815)),
        r("Bat9", UltraBroadband, &[0.0, 0.6490, 0.5514, 0.8458, 0.6774], 1.8, Some(1.8), (0.148, 1.852)),
        r(
            "Bat11",
            UltraBroadband,
            &[0.0, 0.6677, 0.5886, 0.9044, 0.7786, 0.9663],
            11.0 / 6.0,
            Some(11.0 / 6.0),
            (0.123, 1.877),
        ),
        r("BB2", ReferenceBB2, &[0.0, 0.5, 1.75, 1.75, 0.5], 1.552, Some((11.0 + sqrt2) / 8.0), (0.356, 1.644)),
    ]
}

fn table_two() -> Vec<GoldenRow> {
    use Family::*;
    let r = |label, family, phases, area: f64, closed: Option<f64>, range| {
        row(
            GoldenTable::II,
            RangeKind::Fwhm,
            Entry { label, family, phases, area: Some(area), closed, sb_sn: None, range, kappa: None },
        )
    };
    let sqrt2 = 2f64.sqrt();
    vec![
        r("single", SinglePulse, &[0.0], 1.0, Some(1.0), (0.5, 1.5)),
        r("Snake3", UltraNarrowband, &[0.5, 1.0], 0.5, Some(0.5), (0.772, 1.228)),
        r("Snake5", UltraNarrowband, &[0.5896, 0.4104, 1.0], 1.0 / 3.0, Some(1.0 / 3.0), (0.851, 1.149)),
        r("Snake7", UltraNarrowband, &[0.5193, 0.6121, 0.3671, 1.0], 0.25, Some(0.25), (0.889, 1.111)),
        r("Snake9", UltraNarrowband, &[0.5451, 0.4880, 0.6235, 0.3340, 1.0], 0.2, Some(0.2), (0.911, 1.089)),
        r(
            "Snake11",
            UltraNarrowband,
            &[0.5173, 0.5562, 0.4690, 0.6312, 0.3209, 1.0],
            1.0 / 6.0,
            Some(1.0 / 6.0),
            (0.926, 1.074),
        ),
        r("NB2", ReferenceNB2, &[0.0, 0.5, 1.25, 1.25, 0.5], 0.448, Some((5.0 - sqrt2) / 8.0), (0.792, 1.208)),
    ]
}

fn table_three() -> Vec<GoldenRow> {
    use Family::*;
    let r = |label, family, phases, sb_sn, range, kappa: f64| {
        row(
            GoldenTable::III,
            RangeKind::Transfer90,
            Entry { label, family, phases, area: None, closed: None, sb_sn: Some(sb_sn), range, kappa: Some(kappa) },
        )
    };
    let o5 = ((0.950, 0.050), (0.573, 1.427), 5.49);
    let o7 = ((0.963, 0.037), (0.553, 1.447), 7.52);
    let o9 = ((0.971, 0.029), (0.542, 1.458), 9.54);
    vec![
        r("single", SinglePulse, &[0.0], (0.818, 0.182), (0.795, 1.205), 1.36),
        r("Octopus3", UltraPassband, &[0.0, 0.4691, 1.1808], (0.921, 0.079), (0.616, 1.384), 3.45),
        r("Octopus5a", UltraPassband, &[0.0, 0.2882, 1.8507, 1.0435, 1.2262], o5.0, o5.1, o5.2),
        r("Octopus5b", UltraPassband, &[0.0, 0.5662, 1.0608, 1.2123, 1.9112], o5.0, o5.1, o5.2),
        r(
            "Octopus7a",
            UltraPassband,
            &[0.0, 0.6147, 1.0574, 1.2526, 1.6722, 1.7673, 0.4758],
            o7.0,
            o7.1,
            o7.2,
        ),
        r(
            "Octopus7b",
            UltraPassband,
            &[0.0, 0.5093, 0.6376, 0.0647, 1.4925, 1.1079, 1.6474],
            o7.0,
            o7.1,
            o7.2,
        ),
        r(
            "Octopus7c",
            UltraPassband,
            &[0.0, 0.2093, 1.9577, 0.4264, 1.2674, 0.9907, 1.0733],
            o7.0,
            o7.1,
            o7.2,
        ),
        r(
            "Octopus9a",
            UltraPassband,
            &[0.0, 0.4497, 0.3997, 0.0660, 0.6013, 1.3295, 1.4301, 0.9975, 1.3957],
            o9.0,
            o9.1,
            o9.2,
        ),
        r(
            "Octopus9b",
            UltraPassband,
            &[0.0, 0.2880, 0.9589, 0.8912, 1.0821, 1.6739, 1.4258, 1.8350, 0.4227],
            o9.0,
            o9.1,
            o9.2,
        ),
        r(
            "Octopus9c",
            UltraPassband,
            &[0.0, 0.3117, 0.6148, 1.2517, 1.2243, 0.6726, 1.2299, 1.6757, 0.0398],
            o9.0,
            o9.1,
            o9.2,
        ),
        r(
            "Octopus9d",
            UltraPassband,
            &[0.0, 0.6451, 1.0734, 1.2920, 1.6210, 1.7451, 0.1538, 0.2252, 0.9445],
            o9.0,
            o9.1,
            o9.2,
        ),
        r("PB2", ReferencePB2, &[0.0, 0.5, 1.375, 1.375, 0.5], (0.922, 0.078), (0.623, 1.377), 3.24),
    ]
}

fn table_four() -> Vec<GoldenRow> {
    use Family::*;
    let r = |label, phases, area: f64, closed: f64, range| {
        row(
            GoldenTable::IV,
            RangeKind::Fidelity90,
            Entry {
                label,
                family: UltraBroadbandPhasal,
                phases,
                area: Some(area),
                closed: Some(closed),
                sb_sn: None,
                range,
                kappa: None,
            },
        )
    };
    let mut two = r("two", &[0.0], 1.0, 1.0, (0.79517, 1.20483));
    two.range_digits = 5;
    vec![
        two,
        r("BatPh4", &[0.0, 0.6743], 4.0 / 3.0, 4.0 / 3.0, (0.508, 1.492)),
        r("BatPh6", &[0.0, 0.0, 0.75], 1.5, 1.5, (0.376, 1.624)),
        r("BatPh8", &[0.0, 0.0, 0.8048, 0.6000], 1.6, 1.6, (0.299, 1.701)),
        r("BatPh10", &[0.0, 0.0, 0.0, 0.4129, 1.0871], 5.0 / 3.0, 5.0 / 3.0, (0.248, 1.752)),
        r("BatPh12", &[0.0, 0.0, 0.0, 0.8624, 0.7142, 0.5696], 1.714, 12.0 / 7.0, (0.212, 1.788)),
        r("BatPh14", &[0.0, 0.0, 0.0, 0.0, 0.8798, 0.7500, 0.6202], 1.75, 1.75, (0.185, 1.815)),
    ]
}

/// Every row of the four published tables, in table order.
pub fn golden_tables() -> Vec<GoldenRow> {
    let mut rows = table_one();
    rows.extend(table_two());
    rows.extend(table_three());
    rows.extend(table_four());
    rows
}

/// Rows of one table.
pub fn golden_table(table: GoldenTable) -> Vec<GoldenRow> {
    match table {
        GoldenTable::I => table_one(),
        GoldenTable::II => table_two(),
        GoldenTable::III => table_three(),
        GoldenTable::IV => table_four(),
    }
}

/// Built-in labels, each listed once.
pub fn labels() -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in golden_tables() {
        if !out.contains(&r.label) {
            out.push(r.label);
        }
    }
    out
}

/// First golden row carrying `label` (case-insensitive). A bare `Octopus5`
/// resolves to its first printed variant.
pub fn find_row(label: &str) -> Result<GoldenRow, Error> {
    let rows = golden_tables();
    let hit = |want: &str| rows.iter().find(|r| r.label.eq_ignore_ascii_case(want)).cloned();
    hit(label)
        .or_else(|| hit(&format!("{label}a")))
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

/// Sequence for a built-in label.
pub fn lookup(label: &str) -> Result<CompositeSequence, Error> {
    find_row(label).map(|r| r.sequence())
}
