//! Trace algebra for strings of eigenmode ladder operators.
//!
//! A string such as `β†_k β_k' β†_q β_q'` is traced over the full `2^N`
//! Fock space by anticommuting its factors into mode order (tracking the
//! sign of every exchange of distinct modes) and then factorising the trace
//! mode by mode: an untouched mode contributes `Tr 1 = 2`, and a mode that
//! appears contributes the trace of its own 2x2 ladder product
//! (`Tr β†β = Tr ββ† = 1`, any string with unequal creation/annihilation
//! counts on a mode traces to zero).

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// One ladder operator acting on an eigenmode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeOp {
    pub(crate) mode: usize,
    pub(crate) ladder: Ladder,
}

impl ModeOp {
    /// `β†_mode`, `mode` 1-based.
    pub fn create(mode: usize) -> Self {
        Self::create0(mode - 1)
    }

    /// `β_mode`, `mode` 1-based.
    pub fn annihilate(mode: usize) -> Self {
        Self::annihilate0(mode - 1)
    }

    #[inline]
    pub(crate) fn create0(mode: usize) -> Self {
        Self {
            mode,
            ladder: Ladder::Create,
        }
    }

    #[inline]
    pub(crate) fn annihilate0(mode: usize) -> Self {
        Self {
            mode,
            ladder: Ladder::Annihilate,
        }
    }

    /// 1-based mode index.
    pub fn mode(&self) -> usize {
        self.mode + 1
    }

    pub fn ladder(&self) -> Ladder {
        self.ladder
    }
}

// 2x2 single-mode matrices in the (|0>, |1>) basis, as integers.
type M2 = [[i32; 2]; 2];
const CREATE: M2 = [[0, 0], [1, 0]];
const ANNIHILATE: M2 = [[0, 1], [0, 0]];

fn mul(a: M2, b: M2) -> M2 {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Trace of the ordered operator string over a Fock space of `n_modes`
/// modes.
pub fn string_trace<T: Real>(ops: &[ModeOp], n_modes: usize) -> T {
    let mut buf = [ModeOp::create0(0); 8];
    let mut heap;
    let sorted: &mut [ModeOp] = if ops.len() <= buf.len() {
        buf[..ops.len()].copy_from_slice(ops);
        &mut buf[..ops.len()]
    } else {
        heap = ops.to_vec();
        &mut heap[..]
    };

    // Stable insertion sort by mode; every exchange of two operators on
    // distinct modes flips the sign. Equal modes are never exchanged.
    let mut swaps = 0usize;
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1].mode > sorted[j].mode {
            sorted.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }

    let mut value: i64 = 1;
    let mut distinct = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let mode = sorted[i].mode;
        let mut acc: M2 = [[1, 0], [0, 1]];
        let mut balance = 0i32;
        while i < sorted.len() && sorted[i].mode == mode {
            let (m, d) = match sorted[i].ladder {
                Ladder::Create => (CREATE, 1),
                Ladder::Annihilate => (ANNIHILATE, -1),
            };
            acc = mul(acc, m);
            balance += d;
            i += 1;
        }
        if balance != 0 {
            return T::zero();
        }
        let tr = acc[0][0] + acc[1][1];
        if tr == 0 {
            return T::zero();
        }
        value *= tr as i64;
        distinct += 1;
    }
    debug_assert!(distinct <= n_modes);
    let sign = if swaps.is_multiple_of(2) { T::one() } else { -T::one() };
    sign * T::lit(value as f64) * crate::scalar::pow2::<T>((n_modes - distinct) as i32)
}
