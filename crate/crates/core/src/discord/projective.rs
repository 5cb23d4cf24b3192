//! Brute-force projective-measurement discord for a generic two-qubit
//! state, used as a cross-check of the single-parameter kernel.
//!
//! The measurement axis is swept over both polar and azimuthal angles, the
//! post-measurement states are formed explicitly as 2x2 matrices, and the
//! joint spectrum comes from a dense Hermitian eigensolver. Nothing here
//! relies on the X structure.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::numeric::golden_section_min;
use crate::reduction::XMatrix;

const THETA_POINTS: usize = 2001;
const PHI_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    First,
    Second,
}

pub fn dense(x: &XMatrix<f64>) -> Matrix4<Complex64> {
    let d = x.to_dense();
    Matrix4::from_fn(|i, j| d[i][j])
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

fn entropy_2x2(m: &Matrix2<Complex64>) -> f64 {
    let tr = (m[(0, 0)] + m[(1, 1)]).re;
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    plogp(0.5 * (tr + disc)) + plogp(0.5 * (tr - disc))
}

/// Von Neumann entropy (bits) of a dense 4x4 Hermitian matrix.
pub fn entropy_4x4(rho: &Matrix4<Complex64>) -> f64 {
    rho.symmetric_eigenvalues().iter().map(|&l| plogp(l)).sum()
}

/// Eigenvalues of the dense matrix, ascending.
pub fn spectrum(x: &XMatrix<f64>) -> [f64; 4] {
    let ev = dense(x).symmetric_eigenvalues();
    let mut v = [ev[0], ev[1], ev[2], ev[3]];
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn idx(first: usize, second: usize) -> usize {
    2 * first + second
}

/// Reduced state of one qubit.
pub fn marginal(rho: &Matrix4<Complex64>, keep: Qubit) -> Matrix2<Complex64> {
    Matrix2::from_fn(|a, ap| {
        (0..2)
            .map(|b| match keep {
                Qubit::First => rho[(idx(a, b), idx(ap, b))],
                Qubit::Second => rho[(idx(b, a), idx(b, ap))],
            })
            .sum()
    })
}

/// Average entropy of the unmeasured qubit after a projective measurement
/// of `measured` along the Bloch axis `(theta, phi)`.
pub fn conditional_entropy(rho: &Matrix4<Complex64>, measured: Qubit, theta: f64, phi: f64) -> f64 {
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let e = Complex64::from_polar(1.0, phi);
    let plus = [Complex64::new(c, 0.0), e * s];
    let minus = [-e.conj() * s, Complex64::new(c, 0.0)];
    let mut total = 0.0;
    for psi in [plus, minus] {
        let sigma = Matrix2::from_fn(|a, ap| {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..2 {
                for bp in 0..2 {
                    let r = match measured {
                        Qubit::Second => rho[(idx(a, b), idx(ap, bp))],
                        Qubit::First => rho[(idx(b, a), idx(bp, ap))],
                    };
                    acc += psi[b].conj() * r * psi[bp];
                }
            }
            acc
        });
        let p = (sigma[(0, 0)] + sigma[(1, 1)]).re;
        if p > 0.0 {
            total += p * entropy_2x2(&(sigma / Complex64::new(p, 0.0)));
        }
    }
    total
}

/// Minimum conditional entropy over all projective measurements of
/// `measured`: dense `(θ, φ)` grid, then alternating golden-section
/// refinement around the best grid cell.
pub fn min_conditional_entropy(rho: &Matrix4<Complex64>, measured: Qubit) -> f64 {
    let pi = std::f64::consts::PI;
    let d_theta = pi / (THETA_POINTS - 1) as f64;
    let d_phi = 2.0 * pi / PHI_POINTS as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..THETA_POINTS {
        let theta = i as f64 * d_theta;
        for j in 0..PHI_POINTS {
            let phi = j as f64 * d_phi;
            let v = conditional_entropy(rho, measured, theta, phi);
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let (mut value, mut theta, mut phi) = best;
    for _ in 0..2 {
        let (t, v) = golden_section_min(
            |t| conditional_entropy(rho, measured, t, phi),
            (theta - d_theta).max(0.0),
            (theta + d_theta).min(pi),
            1e-11,
        );
        if v < value {
            value = v;
            theta = t;
        }
        let (p, v) = golden_section_min(
            |p| conditional_entropy(rho, measured, theta, p),
            phi - d_phi,
            phi + d_phi,
            1e-11,
        );
        if v < value {
            value = v;
            phi = p;
        }
    }
    value
}

/// `I − C` with the measurement on `measured`.
pub fn discord_directional(x: &XMatrix<f64>, measured: Qubit) -> f64 {
    let rho = dense(x);
    let s_first = entropy_2x2(&marginal(&rho, Qubit::First));
    let s_second = entropy_2x2(&marginal(&rho, Qubit::Second));
    let mutual = s_first + s_second - entropy_4x4(&rho);
    let unmeasured = match measured {
        Qubit::First => s_second,
        Qubit::Second => s_first,
    };
    mutual - (unmeasured - min_conditional_entropy(&rho, measured))
}

/// `min` over both measurement directions.
pub fn discord(x: &XMatrix<f64>) -> f64 {
    discord_directional(x, Qubit::First).min(discord_directional(x, Qubit::Second))
}
