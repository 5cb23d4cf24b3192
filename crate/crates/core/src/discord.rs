//! Quantum discord of an X-state.
//!
//! Measurements are projective on one qubit and parametrised by a single
//! `k ∈ [0, 1]` (`l = 1 − k`); for an X-state the azimuth of the measurement
//! axis only rotates the phase of the coherence, so this family reaches every
//! projective measurement. The symmetric discord is the smaller of the two
//! directional values.

use crate::error::{Error, Result};
use crate::numeric::golden_section_min;
use crate::reduction::XMatrix;
use crate::scalar::Real;

pub mod projective;

/// Grid resolution of the pre-scan before golden-section refinement.
pub const GRID_POINTS: usize = 1001;
/// Bracket width at which the refinement stops.
pub const K_TOL: f64 = 1e-10;
/// Values in `[-CLIP_TOL, 0)` are rounding noise and are set to zero.
pub const CLIP_TOL: f64 = 1e-10;
/// Eigenvalues or probabilities below `-INVALID_TOL` mean the input is not a
/// density matrix.
pub const INVALID_TOL: f64 = 1e-8;

/// Which qubit the measurement acts on. `M` measures the second tensor
/// factor of the `|00>, |01>, |10>, |11>` basis, `N` the first one (obtained
/// from `M` by exchanging `r22` and `r33`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    N,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult<T: Real = f64> {
    pub q_n: T,
    pub q_m: T,
    pub q: T,
    /// Minimiser of the conditional entropy in the direction that gave `q`.
    pub k_star: T,
    pub direction: Direction,
}

/// `−p log2 p` with `0 log 0 = 0`.
#[inline]
fn plogp<T: Real>(p: T) -> T {
    if p <= T::zero() {
        T::zero()
    } else {
        -p * p.log2()
    }
}

fn entropy2<T: Real>(p: T, q: T) -> T {
    plogp(p) + plogp(q)
}

/// Binary entropy of the Bloch length `θ`.
fn s_theta<T: Real>(theta: T) -> T {
    let half = T::lit(0.5);
    let th = theta.max(T::zero()).min(T::one());
    entropy2((T::one() - th) * half, (T::one() + th) * half)
}

fn clip<T: Real>(x: T) -> T {
    if x < T::zero() {
        T::zero()
    } else {
        x
    }
}

/// `(λ0, λ1, λ2, λ3) = (r11, r44, ½(r22 + r33 ± sqrt((r22 − r33)² + 4|r23|²)))`,
/// negative rounding noise clipped to zero.
pub fn eigenvalues_x<T: Real>(x: &XMatrix<T>) -> [T; 4] {
    let half = T::lit(0.5);
    let root = ((x.r22 - x.r33).powi(2) + T::lit(4.0) * x.r23.norm_sqr()).sqrt();
    [
        clip(x.r11),
        clip(x.r44),
        clip(half * (x.r22 + x.r33 + root)),
        clip(half * (x.r22 + x.r33 - root)),
    ]
}

/// Entropy of the first tensor factor.
pub fn entropy_first<T: Real>(x: &XMatrix<T>) -> T {
    entropy2(x.r11 + x.r22, x.r33 + x.r44)
}

/// Entropy of the second tensor factor.
pub fn entropy_second<T: Real>(x: &XMatrix<T>) -> T {
    entropy2(x.r11 + x.r33, x.r22 + x.r44)
}

/// Reject matrices whose spectrum or marginals are negative beyond rounding.
pub fn check_state<T: Real>(x: &XMatrix<T>) -> Result<()> {
    let half = T::lit(0.5);
    let root = ((x.r22 - x.r33).powi(2) + T::lit(4.0) * x.r23.norm_sqr()).sqrt();
    let lam3 = half * (x.r22 + x.r33 - root);
    let tol = T::lit(INVALID_TOL);
    let values = [x.r11, x.r22, x.r33, x.r44, lam3];
    if values.iter().any(|v| !v.is_finite()) || !x.r23.re.is_finite() || !x.r23.im.is_finite() {
        return Err(Error::InvalidState(format!("non-finite entry in {x:?}")));
    }
    if let Some(v) = values.iter().find(|&&v| v < -tol) {
        return Err(Error::InvalidState(format!("negative weight {v} in {x:?}")));
    }
    Ok(())
}

/// `I = S(ρ^(1)) + S(ρ^(2)) + Σ λ log2 λ`.
pub fn mutual_information<T: Real>(x: &XMatrix<T>) -> T {
    let joint: T = eigenvalues_x(x).into_iter().map(plogp).sum();
    entropy_first(x) + entropy_second(x) - joint
}

/// `p0 S(θ0) + p1 S(θ1)` after measuring the second factor along the axis
/// parametrised by `k`.
pub fn conditional_entropy<T: Real>(x: &XMatrix<T>, k: T) -> Result<T> {
    if !(k >= T::zero() && k <= T::one()) {
        return Err(Error::InvalidParameter(format!("k = {k} outside [0, 1]")));
    }
    Ok(conditional_entropy_unchecked(x, k))
}

fn conditional_entropy_unchecked<T: Real>(x: &XMatrix<T>, k: T) -> T {
    let l = T::one() - k;
    let four_kl_c2 = T::lit(4.0) * k * l * x.r23.norm_sqr();
    let (s0, s1) = (x.r11 + x.r33, x.r22 + x.r44);
    let (d0, d1) = (x.r11 - x.r33, x.r22 - x.r44);
    let p0 = s0 * k + s1 * l;
    let p1 = s0 * l + s1 * k;
    let mut out = T::zero();
    if p0 > T::zero() {
        let theta = ((d0 * k + d1 * l).powi(2) + four_kl_c2).sqrt() / p0;
        out = out + p0 * s_theta(theta);
    }
    if p1 > T::zero() {
        let theta = ((d0 * l + d1 * k).powi(2) + four_kl_c2).sqrt() / p1;
        out = out + p1 * s_theta(theta);
    }
    out
}

/// Minimise the conditional entropy over `k`: uniform pre-grid, then
/// golden-section on the bracket around the best grid point.
pub fn min_conditional_entropy<T: Real>(x: &XMatrix<T>) -> (T, T) {
    let steps = GRID_POINTS - 1;
    let at = |i: usize| T::from_index(i) / T::from_index(steps);
    let mut best_i = 0;
    let mut best = conditional_entropy_unchecked(x, T::zero());
    for i in 1..=steps {
        let v = conditional_entropy_unchecked(x, at(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = at(best_i.saturating_sub(1));
    let hi = at((best_i + 1).min(steps));
    let (k, v) = golden_section_min(|k| conditional_entropy_unchecked(x, k), lo, hi, T::lit(K_TOL));
    if v < best {
        (k, v)
    } else {
        (at(best_i), best)
    }
}

/// Classical correlation `S(unmeasured) − min_k (p0 S0 + p1 S1)` and the
/// minimising `k`.
pub fn classical_correlation<T: Real>(x: &XMatrix<T>, direction: Direction) -> (T, T) {
    let oriented = match direction {
        Direction::M => *x,
        Direction::N => x.swap_modes(),
    };
    let (k, h) = min_conditional_entropy(&oriented);
    (entropy_first(&oriented) - h, k)
}

/// Directional discords and their minimum.
pub fn discord_pair<T: Real>(x: &XMatrix<T>) -> Result<DiscordResult<T>> {
    check_state(x)?;
    let i = mutual_information(x);
    let settle = |q: T| -> Result<T> {
        if q >= T::zero() {
            Ok(q)
        } else if q >= -T::lit(CLIP_TOL) {
            Ok(T::zero())
        } else {
            Err(Error::InvalidState(format!("negative discord {q} for {x:?}")))
        }
    };
    let (c_m, k_m) = classical_correlation(x, Direction::M);
    let (c_n, k_n) = classical_correlation(x, Direction::N);
    let q_m = settle(i - c_m)?;
    let q_n = settle(i - c_n)?;
    let (q, k_star, direction) = if q_n < q_m {
        (q_n, k_n, Direction::N)
    } else {
        (q_m, k_m, Direction::M)
    };
    Ok(DiscordResult { q_n, q_m, q, k_star, direction })
}
