//! Structural families of composite π sequences and their builders.
//!
//! Each family is described by its "phase column": the list of phases printed
//! for it in a table, from which the full pulse train is expanded.
//!
//! | family | column                     | train                                          |
//! |--------|----------------------------|------------------------------------------------|
//! | UB     | φ1 … φm                    | π pulses φ1 … φm … φ1 (mirror)                 |
//! | UN     | φ1 … φm-1, φm              | π pulses φ1 … φm, −φm-1 … −φ1                  |
//! | UPB    | φ1 … φn                    | π pulse φ1, then 2π pulses φ2 … φn             |
//! | UBPh   | φ1 … φh                    | π pulses φ1 … φh, φ1+π/2 … φh+π/2              |

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::jones::WavePlate;
use crate::metrics::ProfileKind;
use crate::su2::{angular_distance, Pulse};

const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[serde(rename = "ub")]
    UltraBroadband,
    #[serde(rename = "un")]
    UltraNarrowband,
    #[serde(rename = "upb")]
    UltraPassband,
    #[serde(rename = "ubph")]
    UltraBroadbandPhasal,
    #[serde(rename = "bb2")]
    ReferenceBB2,
    #[serde(rename = "nb2")]
    ReferenceNB2,
    #[serde(rename = "pb2")]
    ReferencePB2,
    #[serde(rename = "single")]
    SinglePulse,
}

/// Printed phase columns of the reference sequences, in units of π.
const BB2_PHASES: [f64; 5] = [0.0, 0.5, 1.75, 1.75, 0.5];
const NB2_PHASES: [f64; 5] = [0.0, 0.5, 1.25, 1.25, 0.5];
const PB2_PHASES: [f64; 5] = [0.0, 0.5, 1.375, 1.375, 0.5];

impl Family {
    pub const ALL: [Family; 8] = [
        Family::UltraBroadband,
        Family::UltraNarrowband,
        Family::UltraPassband,
        Family::UltraBroadbandPhasal,
        Family::ReferenceBB2,
        Family::ReferenceNB2,
        Family::ReferencePB2,
        Family::SinglePulse,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Family::UltraBroadband => "ub",
            Family::UltraNarrowband => "un",
            Family::UltraPassband => "upb",
            Family::UltraBroadbandPhasal => "ubph",
            Family::ReferenceBB2 => "bb2",
            Family::ReferenceNB2 => "nb2",
            Family::ReferencePB2 => "pb2",
            Family::SinglePulse => "single",
        }
    }

    /// Which profile the family is judged by.
    pub fn profile_kind(self) -> ProfileKind {
        match self {
            Family::UltraBroadbandPhasal => ProfileKind::Fidelity,
            _ => ProfileKind::Probability,
        }
    }

    /// Whether the family's pulses after the first are 2π pulses.
    fn is_passband_shape(self) -> bool {
        matches!(self, Family::UltraPassband | Family::ReferencePB2)
    }

    /// Number of pulses produced by a column of `len` phases.
    pub fn pulse_count(self, len: usize) -> usize {
        match self {
            Family::UltraBroadband | Family::UltraNarrowband => {
                if len == 0 {
                    0
                } else {
                    2 * len - 1
                }
            }
            Family::UltraBroadbandPhasal => 2 * len,
            _ => len,
        }
    }

    /// Expected total run time `Σθ` of an `n`-pulse member, in radians.
    pub fn run_time(self, n_pulses: usize) -> f64 {
        if self.is_passband_shape() {
            (2 * n_pulses).saturating_sub(1) as f64 * PI
        } else {
            n_pulses as f64 * PI
        }
    }

    /// Nominal areas of an `n`-pulse member, radians.
    pub fn areas(self, n_pulses: usize) -> Vec<f64> {
        (0..n_pulses)
            .map(|i| if self.is_passband_shape() && i > 0 { 2.0 * PI } else { PI })
            .collect()
    }

    /// Expands a phase column (radians) into the full pulse train.
    pub fn expand_column(self, column: &[f64]) -> Vec<Pulse> {
        match self {
            Family::UltraBroadband => {
                let mut phases = column.to_vec();
                phases.extend(column.iter().rev().skip(1));
                phases.into_iter().map(Pulse::pi).collect()
            }
            Family::UltraNarrowband => {
                let mut phases = column.to_vec();
                phases.extend(column.iter().rev().skip(1).map(|p| -p));
                phases.into_iter().map(Pulse::pi).collect()
            }
            Family::UltraPassband | Family::ReferencePB2 => column
                .iter()
                .enumerate()
                .map(|(i, &p)| if i == 0 { Pulse::pi(p) } else { Pulse::two_pi(p) })
                .collect(),
            Family::UltraBroadbandPhasal => column
                .iter()
                .copied()
                .chain(column.iter().map(|p| p + FRAC_PI_2))
                .map(Pulse::pi)
                .collect(),
            Family::ReferenceBB2 | Family::ReferenceNB2 | Family::SinglePulse => {
                column.iter().copied().map(Pulse::pi).collect()
            }
        }
    }

    /// The phase column (radians) implied by a full pulse train, without any checks.
    fn column_of(self, pulses: &[Pulse]) -> Vec<f64> {
        let phases = pulses.iter().map(Pulse::phase);
        match self {
            Family::UltraBroadband | Family::UltraNarrowband => {
                phases.take(pulses.len().div_ceil(2)).collect()
            }
            Family::UltraBroadbandPhasal => phases.take(pulses.len() / 2).collect(),
            _ => phases.collect(),
        }
    }

    /// Free parameters inside a column: the column minus its fixed slots.
    fn free_of_column(self, column: &[f64]) -> Vec<f64> {
        match self {
            Family::UltraBroadband | Family::UltraPassband => {
                column.iter().skip(1).copied().collect()
            }
            Family::UltraNarrowband => column[..column.len().saturating_sub(1)].to_vec(),
            Family::UltraBroadbandPhasal => column.to_vec(),
            _ => Vec::new(),
        }
    }

    pub fn column_of_free(self, free: &[f64]) -> Vec<f64> {
        match self {
            Family::UltraBroadband | Family::UltraPassband => {
                std::iter::once(0.0).chain(free.iter().copied()).collect()
            }
            Family::UltraNarrowband => free.iter().copied().chain(std::iter::once(PI)).collect(),
            Family::UltraBroadbandPhasal => free.to_vec(),
            Family::ReferenceBB2 => BB2_PHASES.iter().map(|p| p * PI).collect(),
            Family::ReferenceNB2 => NB2_PHASES.iter().map(|p| p * PI).collect(),
            Family::ReferencePB2 => PB2_PHASES.iter().map(|p| p * PI).collect(),
            Family::SinglePulse => vec![0.0],
        }
    }

    /// Checks the constraints of the family on a pulse train and returns its free phases.
    pub fn extract_free_phases(self, pulses: &[Pulse]) -> Result<Vec<f64>, Error> {
        let fail = |reason: String| Error::Structure {
            family: self.to_string(),
            reason,
        };
        let n = pulses.len();
        for (i, p) in pulses.iter().enumerate() {
            let expected = if self.is_passband_shape() && i > 0 {
                2.0 * PI
            } else {
                PI
            };
            if (p.area() - expected).abs() > STRUCTURE_TOL {
                return Err(fail(format!(
                    "pulse {} has area {:.6}π, expected {}π",
                    i + 1,
                    p.area() / PI,
                    expected / PI
                )));
            }
        }
        let phase = |i: usize| pulses[i].phase();
        let same = |x: f64, y: f64| angular_distance(x, y) <= STRUCTURE_TOL;

        match self {
            Family::UltraBroadband | Family::UltraNarrowband => {
                if n % 2 == 0 {
                    return Err(fail(format!("needs an odd pulse count, got {n}")));
                }
                let mid = n / 2;
                for i in 0..mid {
                    let mirrored = if self == Family::UltraBroadband {
                        phase(i)
                    } else {
                        -phase(i)
                    };
                    if !same(phase(n - 1 - i), mirrored) {
                        return Err(fail(format!(
                            "phase of pulse {} does not mirror pulse {}",
                            n - i,
                            i + 1
                        )));
                    }
                }
                if self == Family::UltraBroadband && !same(phase(0), 0.0) {
                    return Err(fail("first phase must be zero".into()));
                }
                if self == Family::UltraNarrowband && n > 1 && !same(phase(mid), PI) {
                    return Err(fail("middle phase must be π".into()));
                }
            }
            Family::UltraPassband => {
                if n == 0 {
                    return Err(fail("needs at least one pulse".into()));
                }
                if !same(phase(0), 0.0) {
                    return Err(fail("first phase must be zero".into()));
                }
            }
            Family::UltraBroadbandPhasal => {
                if n % 2 == 1 {
                    return Err(fail(format!("needs an even pulse count, got {n}")));
                }
                let h = n / 2;
                for i in 0..h {
                    if !same(phase(h + i), phase(i) + FRAC_PI_2) {
                        return Err(fail(format!(
                            "pulse {} is not pulse {} shifted by π/2",
                            h + i + 1,
                            i + 1
                        )));
                    }
                }
            }
            Family::ReferenceBB2 | Family::ReferenceNB2 | Family::ReferencePB2 | Family::SinglePulse => {
                let expected = self.column_of_free(&[]);
                if n != expected.len() {
                    return Err(fail(format!("expected {} pulses, got {n}", expected.len())));
                }
                if let Some(i) = (0..n).find(|&i| !same(phase(i), expected[i])) {
                    return Err(fail(format!("phase of pulse {} differs from the reference", i + 1)));
                }
            }
        }
        let column = self.column_of(pulses);
        Ok(self.free_of_column(&column))
    }

    fn label_prefix(self) -> &'static str {
        match self {
            Family::UltraBroadband => "Bat",
            Family::UltraNarrowband => "Snake",
            Family::UltraPassband => "Octopus",
            Family::UltraBroadbandPhasal => "BatPh",
            Family::ReferenceBB2 => "BB2",
            Family::ReferenceNB2 => "NB2",
            Family::ReferencePB2 => "PB2",
            Family::SinglePulse => "single",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.to_ascii_lowercase();
        let family = match lower.as_str() {
            "ub" | "ultrabroadband" | "bat" => Family::UltraBroadband,
            "un" | "ultranarrowband" | "snake" => Family::UltraNarrowband,
            "upb" | "ultrapassband" | "octopus" => Family::UltraPassband,
            "ubph" | "ultrabroadbandphasal" | "batph" => Family::UltraBroadbandPhasal,
            "bb2" => Family::ReferenceBB2,
            "nb2" => Family::ReferenceNB2,
            "pb2" => Family::ReferencePB2,
            "single" | "singlepulse" => Family::SinglePulse,
            _ => return Err(Error::UnknownFamily(s.to_string())),
        };
        Ok(family)
    }
}

/// A materialized composite sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSequence {
    pub family: Family,
    /// Free parameters of the family, radians.
    pub free_phases: Vec<f64>,
    pub pulses: Vec<Pulse>,
    pub label: String,
}

impl CompositeSequence {
    /// Builds a sequence from a phase column (radians) without enforcing the
    /// family's fixed slots; see [`CompositeSequence::check_structure`].
    pub fn from_column(family: Family, label: impl Into<String>, column: &[f64]) -> Self {
        Self {
            family,
            free_phases: family.free_of_column(column),
            pulses: family.expand_column(column),
            label: label.into(),
        }
    }

    /// Wraps an explicit pulse train, verifying it against the family.
    pub fn from_pulses(
        family: Family,
        label: impl Into<String>,
        pulses: Vec<Pulse>,
    ) -> Result<Self, Error> {
        let free_phases = family.extract_free_phases(&pulses)?;
        Ok(Self {
            family,
            free_phases,
            pulses,
            label: label.into(),
        })
    }

    fn from_free(family: Family, free: &[f64]) -> Self {
        let column = family.column_of_free(free);
        let n = family.pulse_count(column.len());
        let label = format!("{}{}", family.label_prefix(), n);
        let mut seq = Self::from_column(family, label, &column);
        seq.free_phases = free.to_vec();
        seq
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Total nominal area `Σθᵢ`, radians.
    pub fn run_time(&self) -> f64 {
        self.pulses.iter().map(Pulse::area).sum()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.pulses.iter().map(Pulse::phase).collect()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.pulses.iter().map(Pulse::area).collect()
    }

    pub fn check_structure(&self) -> Result<(), Error> {
        self.family.extract_free_phases(&self.pulses)?;
        let expected = self.family.run_time(self.len());
        if (self.run_time() - expected).abs() > 1e-9 {
            return Err(Error::Structure {
                family: self.family.to_string(),
                reason: format!(
                    "run time {:.6}π differs from {:.6}π",
                    self.run_time() / PI,
                    expected / PI
                ),
            });
        }
        Ok(())
    }

    pub fn profile_kind(&self) -> ProfileKind {
        self.family.profile_kind()
    }

    /// Same train with every phase shifted by `delta`.
    pub fn phase_shifted(&self, delta: f64) -> Self {
        let pulses = self
            .pulses
            .iter()
            .map(|p| Pulse::new(p.area(), p.phase() + delta).expect("area already validated"))
            .collect();
        Self {
            family: self.family,
            free_phases: self.free_phases.clone(),
            pulses,
            label: self.label.clone(),
        }
    }
}

/// The single nominal π pulse at phase zero.
pub fn single_pulse() -> CompositeSequence {
    CompositeSequence::from_free(Family::SinglePulse, &[]).with_label("single")
}

/// Mirror-symmetric π train with first and last phase fixed to zero.
///
/// `free_phases = (φ2, …, φm)` gives `2·len + 1` pulses.
pub fn build_ub(free_phases: &[f64]) -> CompositeSequence {
    if free_phases.is_empty() {
        return single_pulse();
    }
    CompositeSequence::from_free(Family::UltraBroadband, free_phases)
}

/// Antisymmetric π train with middle phase π.
///
/// `free_phases = (φ1, …, φm-1)` gives `2·len + 1` pulses.
pub fn build_un(free_phases: &[f64]) -> CompositeSequence {
    if free_phases.is_empty() {
        return single_pulse();
    }
    CompositeSequence::from_free(Family::UltraNarrowband, free_phases)
}

/// One π pulse at phase zero followed by `len` 2π pulses.
pub fn build_upb(free_phases: &[f64]) -> CompositeSequence {
    if free_phases.is_empty() {
        return single_pulse();
    }
    CompositeSequence::from_free(Family::UltraPassband, free_phases)
}

/// Half-train `free_phases` followed by its copy shifted by π/2.
pub fn build_ubph(free_phases: &[f64]) -> CompositeSequence {
    CompositeSequence::from_free(Family::UltraBroadbandPhasal, free_phases)
}

pub fn reference_bb2() -> CompositeSequence {
    CompositeSequence::from_free(Family::ReferenceBB2, &[])
}

pub fn reference_nb2() -> CompositeSequence {
    CompositeSequence::from_free(Family::ReferenceNB2, &[])
}

pub fn reference_pb2() -> CompositeSequence {
    CompositeSequence::from_free(Family::ReferencePB2, &[])
}

/// Builds a family member from its free phases.
pub fn build(family: Family, free_phases: &[f64]) -> CompositeSequence {
    match family {
        Family::UltraBroadband => build_ub(free_phases),
        Family::UltraNarrowband => build_un(free_phases),
        Family::UltraPassband => build_upb(free_phases),
        Family::UltraBroadbandPhasal => build_ubph(free_phases),
        Family::ReferenceBB2 => reference_bb2(),
        Family::ReferenceNB2 => reference_nb2(),
        Family::ReferencePB2 => reference_pb2(),
        Family::SinglePulse => single_pulse(),
    }
}

/// Wave-plate stack equivalent to the sequence: retardation `θᵢ`, optic axis `φᵢ/2`.
pub fn to_jones_stack(seq: &CompositeSequence) -> Vec<WavePlate> {
    seq.pulses
        .iter()
        .map(|p| WavePlate {
            retardation: p.area(),
            axis_angle: p.phase() / 2.0,
        })
        .collect()
}
