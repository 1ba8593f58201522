//! Reference evaluation written independently of the library: full 2×2
//! complex matrices multiplied left to right, and composite Simpson sums.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

pub type Mat = [[Complex64; 2]; 2];

pub fn pulse_matrix(theta: f64, phi: f64) -> Mat {
    let (s, c) = (theta / 2.0).sin_cos();
    let i = Complex64::i();
    [
        [Complex64::new(c, 0.0), -i * Complex64::from_polar(s, phi)],
        [-i * Complex64::from_polar(s, -phi), Complex64::new(c, 0.0)],
    ]
}

pub fn matmul(x: &Mat, y: &Mat) -> Mat {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        }
    }
    m
}

/// `U_N ··· U_1` for areas and phases in radians.
pub fn propagate(areas: &[f64], phases: &[f64], eps: f64) -> Mat {
    let mut u = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for (&a, &p) in areas.iter().zip(phases) {
        u = matmul(&pulse_matrix(a * (1.0 + eps), p), &u);
    }
    u
}

pub fn probability(areas: &[f64], phases: &[f64], eps: f64) -> f64 {
    propagate(areas, phases, eps)[0][1].norm_sqr()
}

/// `Re(½ Tr[U · diag(e^{-iπ/2}, e^{iπ/2})†])`.
pub fn fidelity(areas: &[f64], phases: &[f64], eps: f64) -> f64 {
    let u = propagate(areas, phases, eps);
    let t = Complex64::from_polar(1.0, -PI / 2.0);
    (0.5 * (u[0][0] * t.conj() + u[1][1] * t)).re
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * k as f64);
    }
    s * h / 3.0
}

/// Areas and phases (radians) of a library sequence.
pub fn train(seq: &cpulse::CompositeSequence) -> (Vec<f64>, Vec<f64>) {
    (seq.areas(), seq.phases())
}
