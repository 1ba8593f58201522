//! Objective functionals and figures of merit of error profiles.
//!
//! All areas use Gauss–Legendre rules on the fixed sub-intervals
//! `[-1, -½]`, `[-½, ½]`, `[½, 1]`, summed in that order, so results do not
//! depend on how work is scheduled.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::quadrature::{self, GaussLegendre};
use crate::sequences::CompositeSequence;
use crate::su2::{Propagator, Pulse};

/// Points of the dense scans used to locate threshold crossings.
pub const SCAN_POINTS: usize = 2001;
/// Bisection stops once the bracket is narrower than this (in ε).
pub const BISECTION_TOL: f64 = 1e-10;
/// Target phase-shift angle of phasal sequences.
pub const PHASAL_TARGET: f64 = PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// `p(ε) = |u12|²`.
    Probability,
    /// `Re(½ Tr[U V†])` against the `ζ = π` z-rotation.
    Fidelity,
}

impl std::str::FromStr for ProfileKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "probability" | "p" => Ok(ProfileKind::Probability),
            "fidelity" | "f" => Ok(ProfileKind::Fidelity),
            other => Err(format!("unknown profile kind `{other}`")),
        }
    }
}

/// A pulse train with its phasors precomputed, for repeated evaluation over ε.
#[derive(Debug, Clone)]
pub struct Evaluator {
    half_areas: Vec<f64>,
    // -i e^{iφ}
    couplings: Vec<Complex64>,
}

impl Evaluator {
    pub fn new(pulses: &[Pulse]) -> Self {
        Self {
            half_areas: pulses.iter().map(|p| p.area() / 2.0).collect(),
            couplings: pulses
                .iter()
                .map(|p| Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, p.phase()))
                .collect(),
        }
    }

    pub fn propagator(&self, error: f64) -> Propagator {
        let scale = 1.0 + error;
        let mut acc = Propagator::IDENTITY;
        for (i, (&h, &k)) in self.half_areas.iter().zip(&self.couplings).enumerate() {
            let (s, c) = (h * scale).sin_cos();
            acc = Propagator::new(Complex64::new(c, 0.0), k * s) * acc;
            if (i + 1) % 32 == 0 {
                acc = acc.renormalized();
            }
        }
        if self.half_areas.len() > 32 {
            acc = acc.renormalized();
        }
        acc
    }

    pub fn value(&self, kind: ProfileKind, error: f64) -> f64 {
        let u = self.propagator(error);
        match kind {
            ProfileKind::Probability => u.transition_probability(),
            ProfileKind::Fidelity => u.trace_fidelity_z(PHASAL_TARGET),
        }
    }

    fn integrate(&self, rule: &GaussLegendre, kind: ProfileKind, lo: f64, hi: f64) -> f64 {
        rule.integrate(lo, hi, |e| self.value(kind, e))
    }

    /// `(∫_{-1}^{-½}, ∫_{-½}^{½}, ∫_{½}^{1})` of the profile.
    pub fn sub_areas_with(&self, rule: &GaussLegendre, kind: ProfileKind) -> [f64; 3] {
        [
            self.integrate(rule, kind, -1.0, -0.5),
            self.integrate(rule, kind, -0.5, 0.5),
            self.integrate(rule, kind, 0.5, 1.0),
        ]
    }

    pub fn sub_areas(&self, kind: ProfileKind) -> [f64; 3] {
        self.sub_areas_with(quadrature::standard(), kind)
    }
}

/// Profile value of a sequence at a single error.
pub fn profile_value(seq: &CompositeSequence, kind: ProfileKind, error: f64) -> f64 {
    Evaluator::new(&seq.pulses).value(kind, error)
}

/// `Σ = ∫_{-1}^{1} f(ε) dε`.
pub fn area_whole(seq: &CompositeSequence, kind: ProfileKind) -> f64 {
    let [l, c, r] = Evaluator::new(&seq.pulses).sub_areas(kind);
    l + c + r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PassbandAreas {
    /// `∫_{-½}^{½} p`.
    pub sigma_b: f64,
    /// `∫` of `p` over the two edge quarters.
    pub sigma_n: f64,
    /// `(1 − Σ_b) + Σ_n`.
    pub objective: f64,
}

impl PassbandAreas {
    fn from_sub_areas([l, c, r]: [f64; 3]) -> Self {
        let sigma_n = l + r;
        Self {
            sigma_b: c,
            sigma_n,
            objective: (1.0 - c) + sigma_n,
        }
    }
}

pub fn area_passband(seq: &CompositeSequence) -> PassbandAreas {
    PassbandAreas::from_sub_areas(Evaluator::new(&seq.pulses).sub_areas(ProfileKind::Probability))
}

/// How an [`Interval`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeMode {
    /// The profile stays above threshold on the whole interval around ε = 0.
    Contiguous,
    /// The centre dips below threshold; the interval is the outermost extent
    /// where the profile is above it.
    OuterExtent,
}

/// `[π(1 − ε₀), π(1 + ε₀)]`, stored in units of π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub eps0: f64,
    pub mode: RangeMode,
}

impl Interval {
    fn from_eps0(eps0: f64, mode: RangeMode) -> Self {
        Self {
            lo: 1.0 - eps0,
            hi: 1.0 + eps0,
            eps0,
            mode,
        }
    }

    /// Width in units of π.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Share of the full `2π` bandwidth, in percent.
    pub fn percent(&self) -> f64 {
        self.eps0 * 100.0
    }
}

fn scan_grid(n: usize) -> Vec<f64> {
    let step = 2.0 / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                1.0
            } else {
                -1.0 + step * i as f64
            }
        })
        .collect()
}

/// Refines a bracket `[inside, outside]` around a crossing of `level`, where
/// `f(inside) ≥ level > f(outside)`. Returns the boundary of the `≥` region.
fn bisect<F: Fn(f64) -> f64>(f: &F, level: f64, mut inside: f64, mut outside: f64) -> f64 {
    while (outside - inside).abs() > BISECTION_TOL {
        let mid = 0.5 * (inside + outside);
        if f(mid) >= level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// `|ε|` values of the half-scan on one side, starting at zero.
fn half_scan() -> Vec<f64> {
    let half = SCAN_POINTS / 2;
    let step = 1.0 / half as f64;
    (0..=half).map(|i| if i == half { 1.0 } else { step * i as f64 }).collect()
}

/// First point, moving outwards from the centre, where `f` drops below `level`.
fn first_drop<F: Fn(f64) -> f64>(f: &F, level: f64, sign: f64) -> f64 {
    let abs = half_scan();
    let g = |x: f64| f(sign * x);
    for w in abs.windows(2) {
        if g(w[1]) < level {
            return bisect(&g, level, w[0], w[1]);
        }
    }
    1.0
}

/// Outermost point where `f ≥ level`, or `None` when `f < level` on the whole side.
fn outermost<F: Fn(f64) -> f64>(f: &F, level: f64, sign: f64) -> Option<f64> {
    let abs = half_scan();
    let g = |x: f64| f(sign * x);
    let values: Vec<f64> = abs.iter().map(|&x| g(x)).collect();
    let last = values.iter().rposition(|&v| v >= level)?;
    if last == abs.len() - 1 {
        return Some(1.0);
    }
    Some(bisect(&g, level, abs[last], abs[last + 1]))
}

/// Largest symmetric interval around ε = 0 on which the profile stays at or
/// above `threshold`.
pub fn threshold_range(
    seq: &CompositeSequence,
    threshold: f64,
    kind: ProfileKind,
) -> Result<Interval, Error> {
    let ev = Evaluator::new(&seq.pulses);
    let f = |e: f64| ev.value(kind, e);
    let center = f(0.0);
    if center < threshold {
        return Err(Error::CenterBelowThreshold { center, threshold });
    }
    let eps0 = first_drop(&f, threshold, 1.0).min(first_drop(&f, threshold, -1.0));
    Ok(Interval::from_eps0(eps0, RangeMode::Contiguous))
}

/// Outermost symmetric extent on which the profile reaches `threshold`,
/// ignoring dips below it closer to the centre.
pub fn threshold_extent(
    seq: &CompositeSequence,
    threshold: f64,
    kind: ProfileKind,
) -> Result<Interval, Error> {
    let ev = Evaluator::new(&seq.pulses);
    let f = |e: f64| ev.value(kind, e);
    let pos = outermost(&f, threshold, 1.0);
    let neg = outermost(&f, threshold, -1.0);
    match (pos, neg) {
        (Some(p), Some(n)) => Ok(Interval::from_eps0(p.min(n), RangeMode::OuterExtent)),
        _ => Err(Error::ThresholdNeverReached { threshold }),
    }
}

/// [`threshold_range`], falling back to [`threshold_extent`] when the centre
/// is below the threshold.
pub fn threshold_range_or_extent(
    seq: &CompositeSequence,
    threshold: f64,
    kind: ProfileKind,
) -> Result<Interval, Error> {
    match threshold_range(seq, threshold, kind) {
        Err(Error::CenterBelowThreshold { .. }) => threshold_extent(seq, threshold, kind),
        other => other,
    }
}

/// Full width at half maximum of the transition probability.
pub fn fwhm(seq: &CompositeSequence) -> Result<Interval, Error> {
    threshold_range(seq, 0.5, ProfileKind::Probability)
}

/// Rectangularity `κ = (1 − 2α) / (ε(α) − ε(1 − α))` of the positive-ε shoulder.
///
/// Both crossings are the outermost ones on the positive side.
pub fn rectangularity(seq: &CompositeSequence, alpha: f64) -> Result<f64, Error> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let ev = Evaluator::new(&seq.pulses);
    let f = |e: f64| ev.value(ProfileKind::Probability, e);
    let upper = 1.0 - alpha;
    let eps_top = outermost(&f, upper, 1.0).ok_or(Error::LevelNotReached { level: upper })?;
    let eps_bottom = outermost(&f, alpha, 1.0).ok_or(Error::LevelNotReached { level: alpha })?;
    if eps_bottom >= 1.0 || eps_top >= 1.0 {
        // no fall to α inside the bandwidth
        return Err(Error::LevelNotReached { level: alpha });
    }
    Ok((1.0 - 2.0 * alpha) / (eps_bottom - eps_top))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Relative area error ε.
    Epsilon,
    /// Retardation `φ′ = π(1 + ε)`, radians.
    Phi,
}

/// A profile sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub kind: ProfileKind,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl Profile {
    /// CSV with a header row, one line per grid point, shortest round-trip
    /// float formatting. Phase axes are written in units of π.
    pub fn to_csv(&self) -> String {
        let header = match self.axis {
            Axis::Epsilon => "epsilon",
            Axis::Phi => "phi_over_pi",
        };
        let mut out = format!("{header},value\n");
        for (&x, &v) in self.grid.iter().zip(&self.values) {
            let x = match self.axis {
                Axis::Epsilon => x,
                Axis::Phi => x / PI,
            };
            out.push_str(&format!("{x:?},{v:?}\n"));
        }
        out
    }
}

/// Samples the profile on `n_points` uniform points over `[-1, 1]`.
pub fn sample_profile(
    seq: &CompositeSequence,
    n_points: usize,
    kind: ProfileKind,
) -> Result<Profile, Error> {
    if n_points < 3 || n_points % 2 == 0 {
        return Err(Error::InvalidPointCount(n_points));
    }
    let ev = Evaluator::new(&seq.pulses);
    let grid = scan_grid(n_points);
    let values = grid.par_iter().map(|&e| ev.value(kind, e)).collect();
    Ok(Profile {
        kind,
        axis: Axis::Epsilon,
        grid,
        values,
    })
}

/// Relabels an ε axis as the retardation `φ′ = π(1 + ε)`.
pub fn conversion_efficiency_axis(profile: &Profile) -> Profile {
    let grid = match profile.axis {
        Axis::Epsilon => profile.grid.iter().map(|e| PI * (1.0 + e)).collect(),
        Axis::Phi => profile.grid.clone(),
    };
    Profile {
        kind: profile.kind,
        axis: Axis::Phi,
        grid,
        values: profile.values.clone(),
    }
}

/// Every figure of merit of one sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub label: String,
    pub kind: ProfileKind,
    pub n_pulses: usize,
    /// Total nominal area in units of π.
    pub run_time: f64,
    pub sigma: f64,
    pub sigma_b: f64,
    pub sigma_n: f64,
    pub range_90: Option<Interval>,
    pub fwhm: Option<Interval>,
    pub alpha: f64,
    pub kappa: Option<f64>,
}

/// Computes every metric defined for the sequence; the others are `None`.
///
/// Areas and the 0.9 range use the family's profile kind; FWHM and κ always
/// use the transition probability.
pub fn metrics(seq: &CompositeSequence, alpha: f64) -> MetricsReport {
    let kind = seq.profile_kind();
    let [l, c, r] = Evaluator::new(&seq.pulses).sub_areas(kind);
    let fwhm = match kind {
        ProfileKind::Probability => fwhm(seq).ok(),
        ProfileKind::Fidelity => None,
    };
    let kappa = match kind {
        ProfileKind::Probability => rectangularity(seq, alpha).ok(),
        ProfileKind::Fidelity => None,
    };
    MetricsReport {
        label: seq.label.clone(),
        kind,
        n_pulses: seq.len(),
        run_time: seq.run_time() / PI,
        sigma: l + c + r,
        sigma_b: c,
        sigma_n: l + r,
        range_90: threshold_range_or_extent(seq, 0.9, kind).ok(),
        fwhm,
        alpha,
        kappa,
    }
}
