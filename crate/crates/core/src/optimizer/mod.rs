//! Multi-start search over the free phases of a family.
//!
//! Each start runs a Nelder–Mead simplex in unwrapped phase coordinates (the
//! objectives are 2π-periodic in every phase) followed by a golden-section
//! polish; the returned phases are wrapped into `[0, 2π)`.

mod nelder_mead;
mod verify;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use nelder_mead::{coordinate_polish, nelder_mead, LocalMinimum, NelderMeadOptions};
pub use verify::{verify_row, verify_rows, verify_tables, CellResult, Tolerances, VerificationReport};

use crate::error::Error;
use crate::golden::golden_tables;
use crate::metrics::{sample_profile, Evaluator, ProfileKind};
use crate::sequences::{build, CompositeSequence, Family};
use crate::su2::wrap_phase;

/// Two results within this of the best count as the same optimum.
const SAME_VALUE: f64 = 1e-6;
/// Local optima within this of the best are kept.
const KEEP_WINDOW: f64 = 1e-3;
/// Optima whose profiles differ by less than this are the same solution.
const DISTINCT_PROFILE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Maximize `∫ p dε` over `[-1, 1]`.
    MaximizeArea,
    /// Minimize `∫ p dε` over `[-1, 1]`.
    MinimizeArea,
    /// Minimize `(1 − Σ_b) + Σ_n`.
    MinimizePassband,
    /// Maximize `∫ F dε` over `[-1, 1]` for the trace fidelity `F`.
    MaximizeFidelityArea,
}

impl Objective {
    pub fn for_family(family: Family) -> Option<Objective> {
        match family {
            Family::UltraBroadband => Some(Objective::MaximizeArea),
            Family::UltraNarrowband => Some(Objective::MinimizeArea),
            Family::UltraPassband => Some(Objective::MinimizePassband),
            Family::UltraBroadbandPhasal => Some(Objective::MaximizeFidelityArea),
            _ => None,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Objective::MaximizeArea | Objective::MaximizeFidelityArea => -1.0,
            Objective::MinimizeArea | Objective::MinimizePassband => 1.0,
        }
    }

    /// Value of the functional itself (not sign-adjusted).
    pub fn evaluate(self, seq: &CompositeSequence) -> f64 {
        let ev = Evaluator::new(&seq.pulses);
        match self {
            Objective::MaximizeArea | Objective::MinimizeArea => {
                ev.sub_areas(ProfileKind::Probability).iter().sum()
            }
            Objective::MaximizeFidelityArea => ev.sub_areas(ProfileKind::Fidelity).iter().sum(),
            Objective::MinimizePassband => {
                let [l, c, r] = ev.sub_areas(ProfileKind::Probability);
                (1.0 - c) + (l + r)
            }
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Objective::MaximizeArea => "maximize-area",
            Objective::MinimizeArea => "minimize-area",
            Objective::MinimizePassband => "minimize-passband",
            Objective::MaximizeFidelityArea => "maximize-fidelity-area",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationProblem {
    pub family: Family,
    pub n_pulses: usize,
    pub objective: Objective,
    /// Also start from the published phases of the same length, if any.
    pub table_hint: bool,
}

impl OptimizationProblem {
    /// The family's own objective, with table hints enabled.
    pub fn new(family: Family, n_pulses: usize) -> Result<Self, Error> {
        let objective = Objective::for_family(family).ok_or(Error::InvalidArity {
            family: family.to_string(),
            n_pulses,
            reason: "reference sequences have no free phases",
        })?;
        let p = Self {
            family,
            n_pulses,
            objective,
            table_hint: true,
        };
        p.free_count()?;
        Ok(p)
    }

    pub fn without_table_hint(mut self) -> Self {
        self.table_hint = false;
        self
    }

    /// Number of free phases, after checking the pulse-count parity rules.
    pub fn free_count(&self) -> Result<usize, Error> {
        let bad = |reason| Error::InvalidArity {
            family: self.family.to_string(),
            n_pulses: self.n_pulses,
            reason,
        };
        let n = self.n_pulses;
        match self.family {
            Family::UltraBroadband | Family::UltraNarrowband => {
                if n < 3 || n % 2 == 0 {
                    Err(bad("needs an odd count of at least 3"))
                } else {
                    Ok((n - 1) / 2)
                }
            }
            Family::UltraPassband => {
                if n < 2 {
                    Err(bad("needs at least 2 pulses"))
                } else {
                    Ok(n - 1)
                }
            }
            Family::UltraBroadbandPhasal => {
                if n < 2 || n % 2 == 1 {
                    Err(bad("needs an even count of at least 2"))
                } else {
                    Ok(n / 2)
                }
            }
            _ => Err(bad("reference sequences have no free phases")),
        }
    }

    fn validate(&self) -> Result<usize, Error> {
        if Objective::for_family(self.family) != Some(self.objective) {
            return Err(Error::ObjectiveMismatch {
                family: self.family.to_string(),
                objective: self.objective.to_string(),
            });
        }
        self.free_count()
    }

    pub fn sequence(&self, free_phases: &[f64]) -> CompositeSequence {
        build(self.family, free_phases)
    }

    /// Sign-adjusted cost, minimized by the search.
    fn cost(&self, free_phases: &[f64]) -> f64 {
        self.objective.sign() * self.objective.evaluate(&self.sequence(free_phases))
    }

    /// Free phases of published rows with the same family and length.
    fn table_starts(&self) -> Vec<Vec<f64>> {
        golden_tables()
            .into_iter()
            .filter(|r| r.family == self.family && r.n_pulses() == self.n_pulses)
            .map(|r| r.sequence().free_phases)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalOptimum {
    pub free_phases: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    /// Best free phases, wrapped into `[0, 2π)`.
    pub free_phases: Vec<f64>,
    /// Functional value at `free_phases`.
    pub objective_value: f64,
    pub n_restarts_used: usize,
    pub n_starts: usize,
    /// The best value was reached by at least two independent starts.
    pub converged: bool,
    /// Distinct optima within 1e-3 of the best, best first.
    pub all_local_optima: Vec<LocalOptimum>,
}

impl OptimizationResult {
    pub fn sequence(&self, problem: &OptimizationProblem) -> CompositeSequence {
        problem.sequence(&self.free_phases)
    }
}

fn local_search(problem: &OptimizationProblem, start: &[f64]) -> LocalMinimum {
    let f = |x: &[f64]| problem.cost(x);
    let opts = NelderMeadOptions::default();
    let first = nelder_mead(&f, start, &opts);
    // a second simplex from the first result shakes off premature collapse
    let again = nelder_mead(
        &f,
        &first.x,
        &NelderMeadOptions {
            initial_step: 0.05,
            ..opts
        },
    );
    let best = if again.f <= first.f { again } else { first };
    coordinate_polish(&f, best, 1e-3, 1e-11)
}

/// Local refinement of `free_phases` (radians) that stays in their basin.
pub fn refine(problem: &OptimizationProblem, free_phases: &[f64]) -> Result<LocalOptimum, Error> {
    let dim = problem.validate()?;
    if free_phases.len() != dim {
        return Err(Error::InvalidArity {
            family: problem.family.to_string(),
            n_pulses: problem.n_pulses,
            reason: "wrong number of free phases",
        });
    }
    let f = |x: &[f64]| problem.cost(x);
    let opts = NelderMeadOptions {
        initial_step: 0.01,
        ..NelderMeadOptions::default()
    };
    let m = coordinate_polish(&f, nelder_mead(&f, free_phases, &opts), 1e-4, 1e-13);
    if !m.f.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    Ok(LocalOptimum {
        free_phases: m.x,
        value: problem.objective.sign() * m.f,
    })
}

/// Multi-start local search: `restarts` uniformly random starts drawn from a
/// ChaCha8 stream seeded with `seed`, plus the all-zero start and (when
/// enabled) the published phases.
pub fn derive(
    problem: &OptimizationProblem,
    restarts: usize,
    seed: u64,
) -> Result<OptimizationResult, Error> {
    if restarts < 1 {
        return Err(Error::NoRestarts);
    }
    let dim = problem.validate()?;

    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    if problem.table_hint {
        starts.extend(problem.table_starts());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        starts.push((0..dim).map(|_| rng.gen_range(0.0..TAU)).collect());
    }

    let found: Vec<LocalMinimum> = starts.par_iter().map(|s| local_search(problem, s)).collect();
    if found.iter().any(|m| !m.f.is_finite()) {
        return Err(Error::NonFiniteObjective);
    }

    let best_cost = found.iter().map(|m| m.f).fold(f64::INFINITY, f64::min);
    let best_idx = found
        .iter()
        .position(|m| m.f == best_cost)
        .expect("at least one start");
    let hits = found.iter().filter(|m| m.f - best_cost <= SAME_VALUE).count();

    let sign = problem.objective.sign();
    let canonical = |x: &[f64]| canonical_phases(problem.family, x);

    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&i, &j| found[i].f.total_cmp(&found[j].f).then(i.cmp(&j)));
    let mut optima: Vec<LocalOptimum> = Vec::new();
    let mut trains: Vec<Vec<f64>> = Vec::new();
    for i in order {
        let m = &found[i];
        if m.f - best_cost > KEEP_WINDOW {
            break;
        }
        let phases = canonical(&m.x);
        let train = problem.sequence(&phases).phases();
        let duplicate = trains
            .iter()
            .any(|t| equivalent_within(t, &train, problem.family, DISTINCT_PROFILE));
        if !duplicate {
            trains.push(train);
            optima.push(LocalOptimum {
                free_phases: phases,
                value: sign * m.f,
            });
        }
    }

    let free_phases = canonical(&found[best_idx].x);
    let objective_value = problem.objective.evaluate(&problem.sequence(&free_phases));
    Ok(OptimizationResult {
        free_phases,
        objective_value,
        n_restarts_used: restarts,
        n_starts: starts.len(),
        converged: hits >= 2,
        all_local_optima: optima,
    })
}

/// Wraps phases into `[0, 2π)` and picks one representative of the trivially
/// equivalent forms: phasal trains are shifted so that their first phase is
/// zero, and population-transfer trains are mirrored (φ → −φ) when their
/// first free phase exceeds π.
pub fn canonical_phases(family: Family, free_phases: &[f64]) -> Vec<f64> {
    let Some(&first) = free_phases.first() else {
        return Vec::new();
    };
    match family {
        Family::UltraBroadbandPhasal => free_phases.iter().map(|&p| wrap_phase(p - first)).collect(),
        _ if wrap_phase(first) > PI + 1e-9 => free_phases.iter().map(|&p| wrap_phase(-p)).collect(),
        _ => free_phases.iter().map(|&p| wrap_phase(p)).collect(),
    }
}

/// Largest pointwise difference of two profiles on a 2001-point grid.
pub fn profile_distance(a: &CompositeSequence, b: &CompositeSequence, kind: ProfileKind) -> f64 {
    let pa = sample_profile(a, 2001, kind).expect("valid point count");
    let pb = sample_profile(b, 2001, kind).expect("valid point count");
    pa.values
        .iter()
        .zip(&pb.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Whether two full phase lists (radians, same length) give the same profile
/// to 1e-10 under the family's pulse areas. Covers global phase shifts, global
/// sign flips (for probability profiles) and equality modulo 2π.
pub fn equivalence_class(phases_a: &[f64], phases_b: &[f64], family: Family) -> bool {
    equivalent_within(phases_a, phases_b, family, 1e-10)
}

/// [`equivalence_class`] with an explicit tolerance on the profile difference.
pub fn equivalent_within(phases_a: &[f64], phases_b: &[f64], family: Family, tol: f64) -> bool {
    if phases_a.len() != phases_b.len() {
        return false;
    }
    let train = |phases: &[f64]| {
        let pulses = family
            .areas(phases.len())
            .into_iter()
            .zip(phases)
            .map(|(area, &ph)| crate::su2::Pulse::new(area, ph).expect("nominal areas are positive"))
            .collect();
        CompositeSequence {
            family,
            free_phases: Vec::new(),
            pulses,
            label: String::new(),
        }
    };
    profile_distance(&train(phases_a), &train(phases_b), family.profile_kind()) <= tol
}

/// Phases of a sequence in units of π, rounded to four decimals.
pub fn phases_in_pi(phases: &[f64]) -> Vec<f64> {
    phases.iter().map(|p| (wrap_phase(*p) / PI * 1e4).round() / 1e4).collect()
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "maximize-area" => Ok(Objective::MaximizeArea),
            "minimize-area" => Ok(Objective::MinimizeArea),
            "minimize-passband" => Ok(Objective::MinimizePassband),
            "maximize-fidelity-area" => Ok(Objective::MaximizeFidelityArea),
            other => Err(format!("unknown objective `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn arity_rules() {
        assert!(OptimizationProblem::new(Family::UltraBroadband, 4).is_err());
        assert!(OptimizationProblem::new(Family::UltraBroadband, 1).is_err());
        assert!(OptimizationProblem::new(Family::UltraBroadbandPhasal, 5).is_err());
        assert!(OptimizationProblem::new(Family::UltraPassband, 1).is_err());
        assert!(OptimizationProblem::new(Family::ReferenceBB2, 5).is_err());
        assert_eq!(OptimizationProblem::new(Family::UltraPassband, 4).unwrap().free_count().unwrap(), 3);
        assert_eq!(OptimizationProblem::new(Family::UltraBroadbandPhasal, 6).unwrap().free_count().unwrap(), 3);
    }

    #[test]
    fn rejects_zero_restarts_and_mismatched_objective() {
        let p = OptimizationProblem::new(Family::UltraBroadband, 3).unwrap();
        assert!(matches!(derive(&p, 0, 1), Err(Error::NoRestarts)));
        let mut q = p.clone();
        q.objective = Objective::MinimizeArea;
        assert!(matches!(derive(&q, 4, 1), Err(Error::ObjectiveMismatch { .. })));
    }

    #[test]
    fn ub3_optimum() {
        let p = OptimizationProblem::new(Family::UltraBroadband, 3).unwrap().without_table_hint();
        let r = derive(&p, 8, 7).unwrap();
        assert!((r.objective_value - 1.5).abs() < 1e-9);
        let phi = r.free_phases[0];
        assert!((phi - FRAC_PI_2).abs() < 1e-6 || (phi - 1.5 * PI).abs() < 1e-6, "{phi}");
        assert!(r.converged);
    }

    #[test]
    fn un3_optimum() {
        let p = OptimizationProblem::new(Family::UltraNarrowband, 3).unwrap().without_table_hint();
        let r = derive(&p, 8, 7).unwrap();
        assert!((r.objective_value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn equivalence_examples() {
        let bat3 = [0.0, FRAC_PI_2, 0.0];
        let flipped = [0.0, -FRAC_PI_2, 0.0];
        let snake3 = [FRAC_PI_2, PI, 1.5 * PI];
        assert!(equivalence_class(&bat3, &flipped, Family::UltraBroadband));
        assert!(!equivalence_class(&bat3, &snake3, Family::UltraBroadband));
        let shifted: Vec<f64> = bat3.iter().map(|p| p + PI / 3.0).collect();
        assert!(equivalence_class(&bat3, &shifted, Family::UltraBroadband));
        assert!(!equivalence_class(&bat3, &bat3[..2], Family::UltraBroadband));
    }

    #[test]
    fn result_value_matches_reevaluation() {
        let p = OptimizationProblem::new(Family::UltraPassband, 3).unwrap();
        let r = derive(&p, 4, 3).unwrap();
        let again = p.objective.evaluate(&r.sequence(&p));
        assert!((again - r.objective_value).abs() < 1e-10);
        assert_eq!(r.all_local_optima[0].value, r.all_local_optima[0].value);
        assert!((r.all_local_optima[0].value - r.objective_value).abs() < 1e-10);
    }
}
