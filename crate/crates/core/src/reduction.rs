//! Two-mode marginals of a [`CoeffSet`].
//!
//! Tracing out every eigenmode except `n` and `m` leaves
//!
//! ```text
//! ρ_nm(t) = B + Σ_{k,k' ∈ {n,m}} B_{kk'} e^{-it(ε_k-ε_k')} β†_k β_k' + C β†_n β†_m β_m β_n
//! ```
//!
//! with time-independent `B`, `B_{kk'}`, `C`. The sums below run over all
//! spectator modes (indices different from `n` and `m`) with every permuted
//! sextic term written out. Quartic contributions enter with the sign
//! dictated by the normal-ordered form `−Σ A_{kqk'q'} β†_k β†_q β_k' β_q'`;
//! [`reduce_pair_as_printed`] keeps the opposite sign for comparison.

use num_complex::Complex;

use crate::coefficients::CoeffSet;
use crate::error::{Error, Result};
use crate::model::SpectralData;
use crate::scalar::{pow2, Real};

/// Time-independent coefficients of the `(n, m)` marginal, normalised by
/// `norm_Z`. Modes are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCoeffs<T: Real = f64> {
    pub n: usize,
    pub m: usize,
    pub b: T,
    pub b_nn: T,
    pub b_mm: T,
    pub b_nm: T,
    pub b_mn: T,
    pub c: T,
}

/// Two-qubit X-state in the basis `|00>, |01>, |10>, |11>`.
///
/// Slot (2,2) carries the weight of "mode `n` occupied, mode `m` empty" and
/// `r23 = <β†_m β_n>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XMatrix<T: Real = f64> {
    pub r11: T,
    pub r22: T,
    pub r33: T,
    pub r44: T,
    pub r23: Complex<T>,
}

impl<T: Real> XMatrix<T> {
    pub fn new(r11: T, r22: T, r33: T, r44: T, r23: Complex<T>) -> Self {
        Self { r11, r22, r33, r44, r23 }
    }

    pub fn diagonal(r11: T, r22: T, r33: T, r44: T) -> Self {
        Self::new(r11, r22, r33, r44, Complex::new(T::zero(), T::zero()))
    }

    pub fn maximally_mixed() -> Self {
        let q = T::lit(0.25);
        Self::diagonal(q, q, q, q)
    }

    pub fn trace(&self) -> T {
        self.r11 + self.r22 + self.r33 + self.r44
    }

    /// Relabel the two qubits: exchanges the single-occupation slots and
    /// conjugates the coherence.
    pub fn swap_modes(&self) -> Self {
        Self::new(self.r11, self.r33, self.r22, self.r44, self.r23.conj())
    }

    /// Positivity of the 4x4 matrix up to `tol`: non-negative diagonal and
    /// `r22 r33 ≥ |r23|²` on the central block.
    pub fn is_psd(&self, tol: T) -> bool {
        [self.r11, self.r22, self.r33, self.r44].iter().all(|&d| d >= -tol)
            && self.r22 * self.r33 - self.r23.norm_sqr() >= -tol
    }

    /// Dense row-major 4x4 representation.
    pub fn to_dense(&self) -> [[Complex<T>; 4]; 4] {
        let z = Complex::new(T::zero(), T::zero());
        let re = |x: T| Complex::new(x, T::zero());
        [
            [re(self.r11), z, z, z],
            [z, re(self.r22), self.r23, z],
            [z, self.r23.conj(), re(self.r33), z],
            [z, z, z, re(self.r44)],
        ]
    }

    /// Largest entrywise difference to another X-matrix.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        [
            (self.r11 - other.r11).abs(),
            (self.r22 - other.r22).abs(),
            (self.r33 - other.r33).abs(),
            (self.r44 - other.r44).abs(),
            (self.r23 - other.r23).norm(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }
}

/// Reduced coefficients of the `(n, m)` marginal (1-based modes).
pub fn reduce_pair<T: Real>(coeffs: &CoeffSet<'_, T>, n: usize, m: usize) -> Result<ReducedCoeffs<T>> {
    reduce_with(coeffs, n, m, -T::one())
}

/// Same sums with the quartic contributions entering with a `+` sign, i.e.
/// the coefficient block exactly as it is usually printed. It does not
/// reproduce the exact marginal once two or more sites are polarised; kept
/// so that discrepancy stays measurable.
pub fn reduce_pair_as_printed<T: Real>(coeffs: &CoeffSet<'_, T>, n: usize, m: usize) -> Result<ReducedCoeffs<T>> {
    reduce_with(coeffs, n, m, T::one())
}

fn reduce_with<T: Real>(coeffs: &CoeffSet<'_, T>, n1: usize, m1: usize, qs: T) -> Result<ReducedCoeffs<T>> {
    let size = coeffs.n();
    if n1 == m1 {
        return Err(Error::InvalidModes { n: n1, m: m1, reason: "modes must differ" });
    }
    if n1 == 0 || m1 == 0 || n1 > size || m1 > size {
        return Err(Error::InvalidModes { n: n1, m: m1, reason: "outside 1..=N" });
    }
    let (n, m) = (n1 - 1, m1 - 1);
    let spectators: Vec<usize> = (0..size).filter(|&k| k != n && k != m).collect();
    let e = size as i32;
    let a2 = |k, kp| coeffs.a2(k, kp);
    let a4 = |k, q, kp, qp| coeffs.a4(k, q, kp, qp);
    let a6 = |k, q, l, kp, qp, lp| coeffs.a6(k, q, l, kp, qp, lp);

    // B
    let mut b = pow2::<T>(e - 2) * coeffs.a0();
    let mut s2 = T::zero();
    for &k in &spectators {
        s2 = s2 + a2(k, k);
    }
    b = b + pow2::<T>(e - 3) * s2;
    let mut s4 = T::zero();
    for &k in &spectators {
        for &q in &spectators {
            if k != q {
                s4 = s4 - a4(k, q, k, q) + a4(k, q, q, k);
            }
        }
    }
    b = b + qs * pow2::<T>(e - 4) * s4;
    if coeffs.has_sextic() {
        let mut s6 = T::zero();
        for &k in &spectators {
            for &q in &spectators {
                if q == k {
                    continue;
                }
                for &l in &spectators {
                    if l == k || l == q {
                        continue;
                    }
                    s6 = s6 - a6(k, q, l, k, q, l) + a6(k, q, l, k, l, q) + a6(k, q, l, q, k, l)
                        - a6(k, q, l, l, k, q)
                        - a6(k, q, l, q, l, k)
                        + a6(k, q, l, l, q, k);
                }
            }
        }
        b = b - pow2::<T>(e - 5) * s6;
    }

    // B_{kk'}
    let b_pair = |k: usize, kp: usize| -> T {
        let mut v = pow2::<T>(e - 2) * a2(k, kp);
        let mut s4 = T::zero();
        for &q in &spectators {
            s4 = s4 - a4(k, q, kp, q) + a4(k, q, q, kp) + a4(q, k, kp, q) - a4(q, k, q, kp);
        }
        v = v + qs * pow2::<T>(e - 3) * s4;
        if coeffs.has_sextic() {
            let mut s6 = T::zero();
            for &q in &spectators {
                for &l in &spectators {
                    if l == q {
                        continue;
                    }
                    s6 = s6 - a6(k, q, l, kp, q, l) + a6(k, q, l, kp, l, q) + a6(k, q, l, q, kp, l)
                        - a6(k, q, l, l, kp, q)
                        - a6(k, q, l, q, l, kp)
                        + a6(k, q, l, l, q, kp)
                        + a6(q, k, l, kp, q, l)
                        - a6(q, k, l, kp, l, q)
                        - a6(q, k, l, q, kp, l)
                        + a6(q, k, l, l, kp, q)
                        + a6(q, k, l, q, l, kp)
                        - a6(q, k, l, l, q, kp)
                        - a6(q, l, k, kp, q, l)
                        + a6(q, l, k, kp, l, q)
                        + a6(q, l, k, q, kp, l)
                        - a6(q, l, k, l, kp, q)
                        - a6(q, l, k, q, l, kp)
                        + a6(q, l, k, l, q, kp);
                }
            }
            v = v - pow2::<T>(e - 4) * s6;
        }
        v
    };
    let b_nn = b_pair(n, n);
    let b_mm = b_pair(m, m);
    let b_nm = b_pair(n, m);
    let b_mn = b_pair(m, n);

    // C
    let mut c = qs * pow2::<T>(e - 2) * (a4(n, m, m, n) - a4(n, m, n, m) - a4(m, n, m, n) + a4(m, n, n, m));
    if coeffs.has_sextic() {
        let mut s6 = T::zero();
        for &k in &spectators {
            s6 = s6 + a6(k, n, m, k, m, n) - a6(k, n, m, k, n, m) - a6(k, m, n, k, m, n) + a6(k, m, n, k, n, m)
                - a6(k, n, m, m, k, n)
                + a6(k, n, m, n, k, m)
                + a6(k, m, n, m, k, n)
                - a6(k, m, n, n, k, m)
                + a6(k, n, m, m, n, k)
                - a6(k, n, m, n, m, k)
                - a6(k, m, n, m, n, k)
                + a6(k, m, n, n, m, k)
                - a6(n, k, m, k, m, n)
                + a6(n, k, m, k, n, m)
                + a6(m, k, n, k, m, n)
                - a6(m, k, n, k, n, m)
                + a6(n, k, m, m, k, n)
                - a6(n, k, m, n, k, m)
                - a6(m, k, n, m, k, n)
                + a6(m, k, n, n, k, m)
                - a6(n, k, m, m, n, k)
                + a6(n, k, m, n, m, k)
                + a6(m, k, n, m, n, k)
                - a6(m, k, n, n, m, k)
                + a6(n, m, k, k, m, n)
                - a6(n, m, k, k, n, m)
                - a6(m, n, k, k, m, n)
                + a6(m, n, k, k, n, m)
                - a6(n, m, k, m, k, n)
                + a6(n, m, k, n, k, m)
                + a6(m, n, k, m, k, n)
                - a6(m, n, k, n, k, m)
                + a6(n, m, k, m, n, k)
                - a6(n, m, k, n, m, k)
                - a6(m, n, k, m, n, k)
                + a6(m, n, k, n, m, k);
        }
        c = c - pow2::<T>(e - 3) * s6;
    }

    let z = coeffs.norm_z();
    Ok(ReducedCoeffs {
        n: n1,
        m: m1,
        b: b / z,
        b_nn: b_nn / z,
        b_mm: b_mm / z,
        b_nm: b_nm / z,
        b_mn: b_mn / z,
        c: c / z,
    })
}

/// Assemble the X-matrix of the marginal at time `t`.
pub fn assemble_x<T: Real>(red: &ReducedCoeffs<T>, spec: &SpectralData<T>, t: T) -> XMatrix<T> {
    let gap = spec.energy(red.n) - spec.energy(red.m);
    debug_assert!(gap != T::zero(), "open-chain energies are non-degenerate");
    let phase = Complex::new(T::zero(), -(t * gap)).exp();
    XMatrix {
        r11: red.b,
        r22: red.b + red.b_nn,
        r33: red.b + red.b_mm,
        r44: red.b + red.b_nn + red.b_mm + red.c,
        r23: phase * red.b_nm,
    }
}
