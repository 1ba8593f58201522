//! Errant SU(2) propagators of resonant rectangular pulses.
//!
//! A propagator is kept in Cayley–Klein form `[[a, b], [-b*, a*]]`. Every pulse
//! in a sequence sees the same relative area error `ε`, so a pulse of nominal
//! area `θ` acts with area `θ(1 + ε)`.

use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Products longer than this are rescaled back onto the unit sphere.
const RENORMALIZE_EVERY: usize = 32;

/// Below this modulus a Cayley–Klein entry is treated as zero when decomposing.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Smallest absolute difference between two angles on the circle.
pub fn angular_distance(x: f64, y: f64) -> f64 {
    let d = wrap_phase(x - y);
    d.min(TAU - d)
}

/// A 2×2 special-unitary matrix `[[a, b], [-b*, a*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub a: Complex64,
    pub b: Complex64,
}

impl Propagator {
    pub const IDENTITY: Propagator = Propagator {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// Full matrix, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [-self.b.conj(), self.a.conj()]]
    }

    /// `|a|² + |b|²`, which is one for a valid propagator.
    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn renormalized(self) -> Self {
        let s = self.norm_sqr().sqrt().recip();
        Self::new(self.a * s, self.b * s)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), -self.b)
    }

    /// Largest entrywise modulus of the difference of the two matrices.
    pub fn max_entry_diff(&self, other: &Propagator) -> f64 {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }

    /// `|b|²` clamped to `[0, 1]`.
    pub fn transition_probability(&self) -> f64 {
        self.b.norm_sqr().clamp(0.0, 1.0)
    }

    /// `Re(½ Tr[U · V†])` with `V = diag(e^{-iζ/2}, e^{iζ/2})`.
    pub fn trace_fidelity_z(&self, target_zeta: f64) -> f64 {
        (self.a * Complex64::from_polar(1.0, target_zeta / 2.0)).re
    }
}

impl Mul for Propagator {
    type Output = Propagator;

    fn mul(self, rhs: Propagator) -> Propagator {
        Propagator {
            a: self.a * rhs.a - self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }
}

/// One resonant pulse: nominal area and coupling phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    area: f64,
    phase: f64,
}

impl Pulse {
    /// Fails unless `area` is finite and positive. The phase is wrapped into `[0, 2π)`.
    pub fn new(area: f64, phase: f64) -> Result<Self, Error> {
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::NonPositiveArea(area));
        }
        if !phase.is_finite() {
            return Err(Error::NonFinitePhase(phase));
        }
        Ok(Self {
            area,
            phase: wrap_phase(phase),
        })
    }

    pub fn pi(phase: f64) -> Self {
        Self {
            area: PI,
            phase: wrap_phase(phase),
        }
    }

    pub fn two_pi(phase: f64) -> Self {
        Self {
            area: TAU,
            phase: wrap_phase(phase),
        }
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Propagator of a single pulse whose area is off by the relative error `error`.
///
/// `|error| > 1` is accepted and simply extrapolates the linear error model.
pub fn single_propagator(pulse: Pulse, error: f64) -> Propagator {
    let half = pulse.area * (1.0 + error) / 2.0;
    let (s, c) = half.sin_cos();
    // -i e^{iφ} sin(θ/2)
    let b = Complex64::new(0.0, -1.0) * Complex64::from_polar(s, pulse.phase);
    Propagator::new(Complex64::new(c, 0.0), b)
}

/// Chronological product `U_N ··· U_1`; the first pulse acts first.
pub fn compose(pulses: &[Pulse], error: f64) -> Propagator {
    let mut acc = Propagator::IDENTITY;
    for (i, &p) in pulses.iter().enumerate() {
        acc = single_propagator(p, error) * acc;
        if (i + 1) % RENORMALIZE_EVERY == 0 {
            acc = acc.renormalized();
        }
    }
    if pulses.len() > RENORMALIZE_EVERY {
        acc = acc.renormalized();
    }
    acc
}

/// Errant transition probability `p(ε) = |u12(ε)|²`.
pub fn transition_probability(pulses: &[Pulse], error: f64) -> f64 {
    compose(pulses, error).transition_probability()
}

/// Overlap `Re(½ Tr[U(ε) V†])` with the z-rotation target `V = diag(e^{-iζ/2}, e^{iζ/2})`.
///
/// The sign is chosen so that a perfect phase gate scores `+1`.
pub fn trace_fidelity_z(pulses: &[Pulse], error: f64, target_zeta: f64) -> f64 {
    compose(pulses, error).trace_fidelity_z(target_zeta)
}

/// Rotation angle, phase-shift angle and relative phase of a propagator written as
/// `[[e^{-iζ/2} cos(θ/2), -i e^{iφ} sin(θ/2)], [-i e^{-iφ} sin(θ/2), e^{iζ/2} cos(θ/2)]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationDecomposition {
    /// In `[0, π]`.
    pub theta_eps: f64,
    /// In `(-2π, 2π]`; zero when undefined.
    pub zeta_eps: f64,
    /// In `[0, 2π)`; zero when undefined.
    pub phi_eps: f64,
    /// `false` when `|a| = 0`, where `ζ` has no meaning.
    pub zeta_defined: bool,
    /// `false` when `|b| = 0`, where `φ` has no meaning.
    pub phi_defined: bool,
}

impl RotationDecomposition {
    /// Rebuilds the propagator from the three angles.
    pub fn reconstruct(&self) -> Propagator {
        let (s, c) = (self.theta_eps / 2.0).sin_cos();
        let a = Complex64::from_polar(c, -self.zeta_eps / 2.0);
        let b = Complex64::new(0.0, -1.0) * Complex64::from_polar(s, self.phi_eps);
        Propagator::new(a, b)
    }

    /// `sin(ζ/2) cos(θ/2)`, the z-gate fidelity for `ζ = π`.
    pub fn phasal_fidelity(&self) -> f64 {
        (self.zeta_eps / 2.0).sin() * (self.theta_eps / 2.0).cos()
    }
}

pub fn decompose(p: &Propagator) -> RotationDecomposition {
    let abs_a = p.a.norm().min(1.0);
    let abs_b = p.b.norm();
    let theta_eps = 2.0 * abs_a.acos();

    let zeta_defined = abs_a > DEGENERACY_EPS;
    let zeta_eps = if zeta_defined {
        // arg in (-π, π]; keep ζ in (-2π, 2π]
        let z = -2.0 * p.a.arg();
        if z <= -TAU {
            z + 2.0 * TAU
        } else {
            z
        }
    } else {
        0.0
    };

    let phi_defined = abs_b > DEGENERACY_EPS;
    // b = -i e^{iφ} |b|  =>  φ = arg(b) + π/2
    let phi_eps = if phi_defined {
        wrap_phase(p.b.arg() + PI / 2.0)
    } else {
        0.0
    };

    RotationDecomposition {
        theta_eps,
        zeta_eps,
        phi_eps,
        zeta_defined,
        phi_defined,
    }
}
