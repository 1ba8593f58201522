//! Jones calculus of retarder stacks in the left/right circular basis.
//!
//! A pulse `(θ, φ)` corresponds to a retarder of retardation `θ` whose optic
//! axis sits at `η = ±φ/2`. Chromatic error scales every retardation by the
//! same factor, the optical image of the pulse-area error.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::sequences::CompositeSequence;
use crate::su2::Propagator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePlate {
    /// `(2π/λ)(n_e − n_o)L`, radians.
    pub retardation: f64,
    /// Optic-axis angle η, radians.
    pub axis_angle: f64,
}

impl WavePlate {
    pub fn half_wave(axis_angle: f64) -> Self {
        Self {
            retardation: std::f64::consts::PI,
            axis_angle,
        }
    }
}

/// Which way pulse phases map onto optic-axis angles: `η = +φ/2` or `η = −φ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DictionarySign {
    #[default]
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, one]],
        }
    }

    /// `|J12|²`: fraction of one circular polarization converted into the other.
    pub fn conversion_efficiency(&self) -> f64 {
        self.m[0][1].norm_sqr().clamp(0.0, 1.0)
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// Largest entry of `|J J† − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = *self * self.adjoint();
        let id = Self::identity();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.m[i][j] - id.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn max_entry_diff(&self, other: &JonesMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        JonesMatrix { m }
    }
}

/// `[[cos(φ/2), i sin(φ/2) e^{2iη}], [i sin(φ/2) e^{−2iη}, cos(φ/2)]]`.
pub fn retarder(plate: WavePlate) -> JonesMatrix {
    let (s, c) = (plate.retardation / 2.0).sin_cos();
    let i = Complex64::new(0.0, 1.0);
    let off = i * s;
    JonesMatrix {
        m: [
            [Complex64::new(c, 0.0), off * Complex64::from_polar(1.0, 2.0 * plate.axis_angle)],
            [off * Complex64::from_polar(1.0, -2.0 * plate.axis_angle), Complex64::new(c, 0.0)],
        ],
    }
}

/// `diag(e^{iη}, e^{−iη})`.
pub fn rotator(angle: f64) -> JonesMatrix {
    let zero = Complex64::new(0.0, 0.0);
    JonesMatrix {
        m: [
            [Complex64::from_polar(1.0, angle), zero],
            [zero, Complex64::from_polar(1.0, -angle)],
        ],
    }
}

/// Jones matrix of the stack that mirrors a propagator.
///
/// `Plus` gives `σz U σz`, the image under `η = φ/2`; `Minus` gives `U*`, the
/// image under `η = −φ/2`. Either way `|J12|² = |b|²`.
pub fn from_propagator(p: &Propagator, sign: DictionarySign) -> JonesMatrix {
    let (a, b) = (p.a, p.b);
    let m = match sign {
        DictionarySign::Plus => [[a, -b], [b.conj(), a.conj()]],
        DictionarySign::Minus => [[a.conj(), b.conj()], [-b, a]],
    };
    JonesMatrix { m }
}

/// Wave plates of a sequence under the chosen dictionary sign.
pub fn dictionary_stack(seq: &CompositeSequence, sign: DictionarySign) -> Vec<WavePlate> {
    let s = match sign {
        DictionarySign::Plus => 0.5,
        DictionarySign::Minus => -0.5,
    };
    seq.pulses
        .iter()
        .map(|p| WavePlate {
            retardation: p.area(),
            axis_angle: s * p.phase(),
        })
        .collect()
}

/// `J_N ··· J_1` with every retardation multiplied by `phase_scale`; light meets
/// the first plate first.
pub fn stack_matrix(plates: &[WavePlate], phase_scale: f64) -> JonesMatrix {
    plates.iter().fold(JonesMatrix::identity(), |acc, p| {
        retarder(WavePlate {
            retardation: p.retardation * phase_scale,
            axis_angle: p.axis_angle,
        }) * acc
    })
}

/// Conversion efficiency `|J12|²` of the stack at retardation scale `phase_scale`
/// (`1 + ε` reproduces `p(ε)`).
pub fn stack_conversion_efficiency(plates: &[WavePlate], phase_scale: f64) -> f64 {
    stack_matrix(plates, phase_scale).conversion_efficiency()
}
