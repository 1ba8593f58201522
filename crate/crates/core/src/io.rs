//! JSON documents for sequences and wave-plate stacks.
//!
//! Angles on the wire are in units of π.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::jones::WavePlate;
use crate::sequences::{CompositeSequence, Family};
use crate::su2::Pulse;

pub const UNITS: &str = "pi";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationMetadata {
    pub objective_value: f64,
    pub restarts: usize,
    pub seed: u64,
    pub converged: bool,
}

/// `{label, family, units, areas, phases}` plus an optional `optimization` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDocument {
    pub label: String,
    pub family: Family,
    pub units: String,
    pub areas: Vec<f64>,
    pub phases: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationMetadata>,
}

impl SequenceDocument {
    pub fn from_sequence(seq: &CompositeSequence) -> Self {
        Self {
            label: seq.label.clone(),
            family: seq.family,
            units: UNITS.to_string(),
            areas: seq.pulses.iter().map(|p| p.area() / PI).collect(),
            phases: seq.pulses.iter().map(|p| p.phase() / PI).collect(),
            optimization: None,
        }
    }

    pub fn with_optimization(mut self, meta: OptimizationMetadata) -> Self {
        self.optimization = Some(meta);
        self
    }

    /// Rebuilds the sequence and checks it against its family.
    pub fn to_sequence(&self) -> Result<CompositeSequence, Error> {
        if self.units != UNITS {
            return Err(field_error("units", format!("expected \"{UNITS}\", got \"{}\"", self.units)));
        }
        if self.areas.len() != self.phases.len() {
            return Err(field_error(
                "phases",
                format!("{} phases for {} areas", self.phases.len(), self.areas.len()),
            ));
        }
        if self.areas.is_empty() {
            return Err(field_error("areas", "empty pulse train".to_string()));
        }
        let pulses = self
            .areas
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(i, (&area, &phase))| {
                Pulse::new(area * PI, phase * PI).map_err(|e| match e {
                    Error::NonPositiveArea(_) => field_error(&format!("areas[{i}]"), e.to_string()),
                    _ => field_error(&format!("phases[{i}]"), e.to_string()),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let seq = CompositeSequence::from_pulses(self.family, self.label.clone(), pulses)?;
        seq.check_structure()?;
        Ok(seq)
    }

    /// Parses a document, naming the offending field on failure.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("not valid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Format("top level must be an object".to_string()))?;
        let label = string_field(obj, "label")?;
        let family_name = string_field(obj, "family")?;
        let family = family_name
            .parse::<Family>()
            .map_err(|_| field_error("family", format!("unknown family \"{family_name}\"")))?;
        let units = string_field(obj, "units")?;
        let areas = number_list(obj, "areas")?;
        let phases = number_list(obj, "phases")?;
        let optimization = match obj.get("optimization") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                serde_json::from_value(v.clone())
                    .map_err(|e| field_error("optimization", e.to_string()))?,
            ),
        };
        Ok(Self {
            label,
            family,
            units,
            areas,
            phases,
            optimization,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document is always serializable")
    }
}

/// `{label, units, plates: [{retardation, axis_angle}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateStackDocument {
    pub label: String,
    pub units: String,
    pub plates: Vec<WavePlate>,
}

impl PlateStackDocument {
    /// `plates` in radians.
    pub fn new(label: impl Into<String>, plates: &[WavePlate]) -> Self {
        Self {
            label: label.into(),
            units: UNITS.to_string(),
            plates: plates
                .iter()
                .map(|p| WavePlate {
                    retardation: p.retardation / PI,
                    axis_angle: p.axis_angle / PI,
                })
                .collect(),
        }
    }

    /// Plates in radians.
    pub fn plates(&self) -> Result<Vec<WavePlate>, Error> {
        if self.units != UNITS {
            return Err(field_error("units", format!("expected \"{UNITS}\", got \"{}\"", self.units)));
        }
        Ok(self
            .plates
            .iter()
            .map(|p| WavePlate {
                retardation: p.retardation * PI,
                axis_angle: p.axis_angle * PI,
            })
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document is always serializable")
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

fn field_error(field: &str, message: String) -> Error {
    Error::Format(format!("field `{field}`: {message}"))
}

fn string_field(obj: &Map<String, Value>, name: &str) -> Result<String, Error> {
    match obj.get(name) {
        None => Err(field_error(name, "missing".to_string())),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(other) => Err(field_error(name, format!("expected a string, got {other}"))),
    }
}

fn number_list(obj: &Map<String, Value>, name: &str) -> Result<Vec<f64>, Error> {
    let items = match obj.get(name) {
        None => return Err(field_error(name, "missing".to_string())),
        Some(Value::Array(items)) => items,
        Some(other) => return Err(field_error(name, format!("expected a list, got {other}"))),
    };
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| field_error(&format!("{name}[{i}]"), format!("expected a number, got {v}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden::lookup;
    use crate::sequences::to_jones_stack;

    #[test]
    fn round_trips_every_golden_sequence() {
        for label in crate::golden::labels() {
            let seq = lookup(&label).unwrap();
            let text = SequenceDocument::from_sequence(&seq).to_json();
            let back = SequenceDocument::parse(&text).unwrap().to_sequence().unwrap();
            assert_eq!(back.family, seq.family);
            assert_eq!(back.label, seq.label);
            for (p, q) in back.pulses.iter().zip(&seq.pulses) {
                assert!((p.area() - q.area()).abs() < 1e-14);
                assert!((p.phase() - q.phase()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn names_the_offending_field() {
        let cases = [
            (r#"{"family":"ub","units":"pi","areas":[1],"phases":[0]}"#, "`label`"),
            (r#"{"label":"x","family":"zz","units":"pi","areas":[1],"phases":[0]}"#, "`family`"),
            (r#"{"label":"x","family":"single","units":"deg","areas":[1],"phases":[0]}"#, "`units`"),
            (r#"{"label":"x","family":"single","units":"pi","areas":[1],"phases":["a"]}"#, "`phases[0]`"),
            (r#"{"label":"x","family":"single","units":"pi","areas":[-1],"phases":[0]}"#, "`areas[0]`"),
            (r#"{"label":"x","family":"single","units":"pi","areas":[1,1],"phases":[0]}"#, "`phases`"),
        ];
        for (text, field) in cases {
            let err = SequenceDocument::parse(text)
                .and_then(|d| d.to_sequence())
                .unwrap_err()
                .to_string();
            assert!(err.contains(field), "{err} should mention {field}");
        }
    }

    #[test]
    fn rejects_broken_structure() {
        let text = r#"{"label":"x","family":"ub","units":"pi","areas":[1,1,1],"phases":[0,0.5,0.3]}"#;
        let err = SequenceDocument::parse(text).unwrap().to_sequence().unwrap_err();
        assert!(matches!(err, Error::Structure { .. }), "{err}");
    }

    #[test]
    fn keeps_optimization_block() {
        let doc = SequenceDocument::from_sequence(&lookup("Bat3").unwrap()).with_optimization(
            OptimizationMetadata {
                objective_value: 1.5,
                restarts: 16,
                seed: 7,
                converged: true,
            },
        );
        let back = SequenceDocument::parse(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn plate_stack_round_trip() {
        let plates = to_jones_stack(&lookup("Bat3").unwrap());
        let doc = PlateStackDocument::new("Bat3", &plates);
        assert!((doc.plates[1].axis_angle - 0.25).abs() < 1e-15);
        let back = PlateStackDocument::parse(&doc.to_json()).unwrap().plates().unwrap();
        for (p, q) in back.iter().zip(&plates) {
            assert!((p.axis_angle - q.axis_angle).abs() < 1e-15);
        }
    }
}
