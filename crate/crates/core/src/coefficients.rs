//! The evolved state written as a polynomial in eigenmode operators,
//!
//! ```text
//! ρ(t) = A0 + Σ A_{kk'} e^{..} β†_k β_k'
//!           + Σ A_{kqk'q'} e^{..} β†_k β_k' β†_q β_q'
//!           + Σ A_{kqlk'q'l'} e^{..} β†_k β_k' β†_q β_q' β†_l β_l',
//! ```
//!
//! for the two state families of interest: the three-node parasitic
//! polarization state and the first/second-order truncations of the
//! all-node noise state.
//!
//! Every tensor is a weighted sum over lattice sites of products of
//! `g_k(s) g_k'(s)` factors, so a [`CoeffSet`] keeps those *site terms* and
//! contracts them once into dense per-pair kernels. Tensor entries are then
//! O(1) lookups; the sextic tensor is never materialised.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{string_trace, ModeOp};
use crate::model::SpectralData;
use crate::scalar::{pow2, Real};

/// Which polynomial the coefficients describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateOrder {
    ThreeNode,
    Noise1,
    Noise2,
}

impl StateOrder {
    pub fn noise(order: u8) -> Result<Self> {
        match order {
            1 => Ok(Self::Noise1),
            2 => Ok(Self::Noise2),
            o => Err(Error::InvalidParameter(format!("noise order must be 1 or 2, got {o}"))),
        }
    }

    pub fn noise_order(&self) -> Option<u8> {
        match self {
            Self::ThreeNode => None,
            Self::Noise1 => Some(1),
            Self::Noise2 => Some(2),
        }
    }
}

/// Inverse-temperature parameter per site (index 0 is site 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationProfile<T: Real = f64> {
    pub b: Vec<T>,
}

impl<T: Real> PolarizationProfile<T> {
    pub fn zeros(n: usize) -> Self {
        Self { b: vec![T::zero(); n] }
    }

    /// Polarization `b0` at `j0`, `b_minus` and `b_plus` on its neighbours.
    pub fn three_node(n: usize, j0: usize, b_minus: T, b0: T, b_plus: T) -> Self {
        let mut p = Self::zeros(n);
        p.b[j0 - 2] = b_minus;
        p.b[j0 - 1] = b0;
        p.b[j0] = b_plus;
        p
    }

    pub fn single(n: usize, j0: usize, b0: T) -> Self {
        let mut p = Self::zeros(n);
        p.b[j0 - 1] = b0;
        p
    }
}

/// One draw of the noise offsets `b̃_j ∈ [−1/2, 1/2]` at amplitude `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization<T: Real = f64> {
    pub b_tilde: Vec<T>,
    pub epsilon: T,
    pub seed: u64,
}

impl<T: Real> NoiseRealization<T> {
    /// Uniform offsets from a ChaCha8 stream. Realization `index` of a run
    /// with `seed` always sees the same offsets, whatever `epsilon` is.
    pub fn draw(n: usize, epsilon: T, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let b_tilde = (0..n).map(|_| T::lit(rng.random_range(-0.5..=0.5))).collect();
        Self {
            b_tilde,
            epsilon,
            seed,
        }
    }

    pub fn quiet(n: usize) -> Self {
        Self {
            b_tilde: vec![T::zero(); n],
            epsilon: T::zero(),
            seed: 0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.b_tilde.len() != n {
            return Err(Error::InvalidParameter(format!(
                "noise realization has {} offsets for a chain of {n}",
                self.b_tilde.len()
            )));
        }
        if !(self.epsilon >= T::zero() && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        let half = T::lit(0.5);
        if let Some((j, b)) = self.b_tilde.iter().enumerate().find(|(_, b)| !(b.abs() <= half)) {
            return Err(Error::InvalidParameter(format!("b_tilde[{}] = {b} outside [-1/2, 1/2]", j + 1)));
        }
        Ok(())
    }
}

/// A weighted product of one, two or three site projectors, expressed in
/// eigenmode operators. Sites are 1-based and their order fixes which index
/// pair of the tensor each site feeds (first site -> `(k, k')`, second ->
/// `(q, q')`, third -> `(l, l')`).
#[derive(Debug, Clone, PartialEq)]
pub struct SiteTerm<T: Real = f64> {
    pub weight: T,
    pub sites: Vec<usize>,
}

/// Evolved state in monomial form, factored by lattice site.
#[derive(Debug, Clone)]
pub struct CoeffSet<'s, T: Real = f64> {
    order: StateOrder,
    spec: &'s SpectralData<T>,
    a0: T,
    site_terms: Vec<SiteTerm<T>>,
    norm_z: T,
    quad: Vec<T>,
    quart: Vec<T>,
    sextic: Vec<SexticBlock<T>>,
}

#[derive(Debug, Clone)]
struct SexticBlock<T> {
    column: Vec<T>,
    kernel: Vec<T>,
}

impl<'s, T: Real> CoeffSet<'s, T> {
    /// Assemble from an explicit list of site terms. `norm_Z` is computed by
    /// tracing the resulting operator.
    pub fn from_site_terms(
        spec: &'s SpectralData<T>,
        order: StateOrder,
        a0: T,
        site_terms: Vec<SiteTerm<T>>,
    ) -> Result<Self> {
        let n = spec.n();
        for term in &site_terms {
            if term.sites.is_empty() || term.sites.len() > 3 {
                return Err(Error::InvalidParameter(format!(
                    "site term must touch 1 to 3 sites, got {}",
                    term.sites.len()
                )));
            }
            for &s in &term.sites {
                spec.check_site(s)?;
            }
        }
        let n2 = n * n;
        let columns: Vec<Vec<T>> = (0..n).map(|s| spec.site_column0(s)).collect();

        let mut quad = vec![T::zero(); n2];
        let mut quart_w = vec![T::zero(); n2];
        let mut sext_w: Vec<Option<Vec<T>>> = vec![None; n];
        for term in &site_terms {
            match term.sites[..] {
                [s] => {
                    let c = &columns[s - 1];
                    for k in 0..n {
                        for kp in 0..n {
                            quad[k * n + kp] = quad[k * n + kp] + term.weight * c[k] * c[kp];
                        }
                    }
                }
                [s1, s2] => {
                    quart_w[(s1 - 1) * n + s2 - 1] = quart_w[(s1 - 1) * n + s2 - 1] + term.weight;
                }
                [s1, s2, s3] => {
                    let w = sext_w[s1 - 1].get_or_insert_with(|| vec![T::zero(); n2]);
                    w[(s2 - 1) * n + s3 - 1] = w[(s2 - 1) * n + s3 - 1] + term.weight;
                }
                _ => unreachable!(),
            }
        }
        let quart = pair_kernel(&columns, &quart_w);
        let sextic = sext_w
            .into_iter()
            .enumerate()
            .filter_map(|(s, w)| {
                w.map(|w| SexticBlock {
                    column: columns[s].clone(),
                    kernel: pair_kernel(&columns, &w),
                })
            })
            .collect();

        let mut set = Self {
            order,
            spec,
            a0,
            site_terms,
            norm_z: T::one(),
            quad,
            quart,
            sextic,
        };
        set.norm_z = monomial_trace(&set);
        Ok(set)
    }

    pub fn order(&self) -> StateOrder {
        self.order
    }

    pub fn spec(&self) -> &'s SpectralData<T> {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn a0(&self) -> T {
        self.a0
    }

    pub fn norm_z(&self) -> T {
        self.norm_z
    }

    pub fn site_terms(&self) -> &[SiteTerm<T>] {
        &self.site_terms
    }

    pub fn has_sextic(&self) -> bool {
        !self.sextic.is_empty()
    }

    /// `A_{kk'}`, 1-based modes.
    pub fn a_quad(&self, k: usize, kp: usize) -> T {
        self.a2(k - 1, kp - 1)
    }

    /// `A_{kqk'q'}` (coefficient of `β†_k β_k' β†_q β_q'`), 1-based modes.
    pub fn a_quart(&self, k: usize, q: usize, kp: usize, qp: usize) -> T {
        self.a4(k - 1, q - 1, kp - 1, qp - 1)
    }

    /// `A_{kqlk'q'l'}` (coefficient of `β†_k β_k' β†_q β_q' β†_l β_l'`), 1-based.
    pub fn a_sext(&self, k: usize, q: usize, l: usize, kp: usize, qp: usize, lp: usize) -> T {
        self.a6(k - 1, q - 1, l - 1, kp - 1, qp - 1, lp - 1)
    }

    #[inline]
    pub(crate) fn a2(&self, k: usize, kp: usize) -> T {
        self.quad[k * self.n() + kp]
    }

    #[inline]
    pub(crate) fn a4(&self, k: usize, q: usize, kp: usize, qp: usize) -> T {
        let n = self.n();
        self.quart[(k * n + kp) * n * n + q * n + qp]
    }

    #[inline]
    pub(crate) fn a6(&self, k: usize, q: usize, l: usize, kp: usize, qp: usize, lp: usize) -> T {
        let n = self.n();
        let idx = (q * n + qp) * n * n + l * n + lp;
        let mut acc = T::zero();
        for block in &self.sextic {
            acc = acc + block.column[k] * block.column[kp] * block.kernel[idx];
        }
        acc
    }
}

/// `K[(k k'), (q q')] = Σ_{s,s'} W[s][s'] g_k(s) g_k'(s) g_q(s') g_q'(s')`.
fn pair_kernel<T: Real>(columns: &[Vec<T>], w: &[T]) -> Vec<T> {
    let n = columns.len();
    let n2 = n * n;
    if w.iter().all(|x| *x == T::zero()) {
        return vec![T::zero(); n2 * n2];
    }
    // U[s][(k k')] and V = W U.
    let mut u = vec![T::zero(); n * n2];
    for s in 0..n {
        for k in 0..n {
            for kp in 0..n {
                u[s * n2 + k * n + kp] = columns[s][k] * columns[s][kp];
            }
        }
    }
    let mut v = vec![T::zero(); n * n2];
    for s in 0..n {
        for sp in 0..n {
            let wss = w[s * n + sp];
            if wss == T::zero() {
                continue;
            }
            for p in 0..n2 {
                v[s * n2 + p] = v[s * n2 + p] + wss * u[sp * n2 + p];
            }
        }
    }
    let mut kernel = vec![T::zero(); n2 * n2];
    for s in 0..n {
        for p in 0..n2 {
            let usp = u[s * n2 + p];
            if usp == T::zero() {
                continue;
            }
            let row = &mut kernel[p * n2..(p + 1) * n2];
            for (r, vv) in row.iter_mut().zip(&v[s * n2..(s + 1) * n2]) {
                *r = *r + usp * *vv;
            }
        }
    }
    kernel
}

fn check_inner(spec_n: usize, j0: usize) -> Result<()> {
    if j0 <= 1 || j0 >= spec_n {
        return Err(Error::InvalidSite {
            site: j0,
            reason: "the three-node state needs an inner node 1 < j0 < N",
        });
    }
    Ok(())
}

/// Coefficients of `2^{-N} Π_{j=j0-1}^{j0+1} (1 + 2 I_jz tanh(b_j/2))` evolved
/// under the XY Hamiltonian.
pub fn three_node_coeffs<T: Real>(
    spec: &SpectralData<T>,
    j0: usize,
    b_minus: T,
    b_0: T,
    b_plus: T,
) -> Result<CoeffSet<'_, T>> {
    let n = spec.n();
    check_inner(n, j0)?;
    for b in [b_minus, b_0, b_plus] {
        if !b.is_finite() {
            return Err(Error::InvalidParameter(format!("polarization must be finite, got {b}")));
        }
    }
    let half = T::lit(0.5);
    let (tm, t0, tp) = ((b_minus * half).tanh(), (b_0 * half).tanh(), (b_plus * half).tanh());
    let (om, o0, op) = (T::one() - tm, T::one() - t0, T::one() - tp);
    let (sm, s0, sp) = (j0 - 1, j0, j0 + 1);
    let n = n as i32;

    let a0 = pow2::<T>(-n) * om * o0 * op;
    let c2 = pow2::<T>(1 - n);
    let c4 = pow2::<T>(2 - n);
    let c6 = pow2::<T>(3 - n);
    let terms = vec![
        SiteTerm { weight: c2 * o0 * op * tm, sites: vec![sm] },
        SiteTerm { weight: c2 * om * op * t0, sites: vec![s0] },
        SiteTerm { weight: c2 * om * o0 * tp, sites: vec![sp] },
        SiteTerm { weight: c4 * om * t0 * tp, sites: vec![s0, sp] },
        SiteTerm { weight: c4 * o0 * tm * tp, sites: vec![sm, sp] },
        SiteTerm { weight: c4 * op * tm * t0, sites: vec![sm, s0] },
        SiteTerm { weight: c6 * tm * t0 * tp, sites: vec![sm, s0, sp] },
    ];
    CoeffSet::from_site_terms(spec, StateOrder::ThreeNode, a0, terms)
}

/// Coefficients of the first- or second-order truncation (in the noise
/// amplitudes of the sites other than `j0`) of the all-node noise state,
/// before normalisation. `norm_Z` carries the trace.
///
/// The second-order piece is the second-order term of the product
/// expansion, `Σ_{n<n'}`, stored symmetrically as half-weights on both site
/// orders.
pub fn noise_coeffs<'s, T: Real>(
    spec: &'s SpectralData<T>,
    j0: usize,
    b_j0: T,
    noise: &NoiseRealization<T>,
    order: u8,
) -> Result<CoeffSet<'s, T>> {
    let order = StateOrder::noise(order)?;
    let n = spec.n();
    spec.check_site(j0)?;
    noise.validate(n)?;
    if !b_j0.is_finite() {
        return Err(Error::InvalidParameter(format!("b_j0 must be finite, got {b_j0}")));
    }
    let j = j0 - 1;
    let half = T::lit(0.5);
    let tau = (b_j0 * half).tanh();
    let eps = noise.epsilon;

    // a^j_0 and the weight c_j of a^j_{kk'} = c_j g_k(j) g_k'(j).
    let mut a = vec![T::zero(); n];
    let mut c = vec![T::zero(); n];
    for s in 0..n {
        let eb = eps * noise.b_tilde[s];
        if s == j {
            a[s] = T::one() - tau - eb * half;
            c[s] = T::lit(2.0) * tau + eb;
        } else {
            a[s] = T::one() - eb * half;
            c[s] = eb;
        }
    }
    let prod_except = |skip: &[usize]| -> T {
        (0..n)
            .filter(|s| *s != j && !skip.contains(s))
            .fold(T::one(), |acc, s| acc * a[s])
    };
    let scale = pow2::<T>(-(n as i32));
    let p_all = prod_except(&[]);

    let a0 = scale * a[j] * p_all;
    let mut terms = Vec::new();
    terms.push(SiteTerm { weight: scale * c[j] * p_all, sites: vec![j0] });
    for s in (0..n).filter(|s| *s != j) {
        let p_n = prod_except(&[s]);
        terms.push(SiteTerm { weight: scale * a[j] * p_n * c[s], sites: vec![s + 1] });
        terms.push(SiteTerm { weight: scale * c[j] * p_n * c[s], sites: vec![j0, s + 1] });
    }
    if order == StateOrder::Noise2 {
        for s in (0..n).filter(|s| *s != j) {
            for sp in (0..n).filter(|sp| *sp != j && *sp != s) {
                let w = scale * half * prod_except(&[s, sp]) * c[s] * c[sp];
                terms.push(SiteTerm { weight: a[j] * w, sites: vec![s + 1, sp + 1] });
                terms.push(SiteTerm { weight: c[j] * w, sites: vec![j0, s + 1, sp + 1] });
            }
        }
    }
    CoeffSet::from_site_terms(spec, order, a0, terms)
}

/// Trace of the represented operator over the full fermion Fock space,
/// evaluated monomial by monomial with per-mode trace rules.
pub fn monomial_trace<T: Real>(coeffs: &CoeffSet<'_, T>) -> T {
    let n = coeffs.n();
    let mut total = coeffs.a0 * pow2::<T>(n as i32);

    for k in 0..n {
        let ops = [ModeOp::create0(k), ModeOp::annihilate0(k)];
        total = total + coeffs.a2(k, k) * string_trace::<T>(&ops, n);
    }

    // A non-zero trace needs the annihilated modes to be a permutation of
    // the created ones.
    for k in 0..n {
        for q in 0..n {
            let mut seen: [(usize, usize); 2] = [(usize::MAX, usize::MAX); 2];
            for (i, (kp, qp)) in [(k, q), (q, k)].into_iter().enumerate() {
                if seen[..i].contains(&(kp, qp)) {
                    continue;
                }
                seen[i] = (kp, qp);
                let a = coeffs.a4(k, q, kp, qp);
                if a == T::zero() {
                    continue;
                }
                let ops = [
                    ModeOp::create0(k),
                    ModeOp::annihilate0(kp),
                    ModeOp::create0(q),
                    ModeOp::annihilate0(qp),
                ];
                total = total + a * string_trace::<T>(&ops, n);
            }
        }
    }

    if coeffs.has_sextic() {
        for k in 0..n {
            for q in 0..n {
                for l in 0..n {
                    let perms = [
                        (k, q, l),
                        (k, l, q),
                        (q, k, l),
                        (q, l, k),
                        (l, k, q),
                        (l, q, k),
                    ];
                    for (i, &(kp, qp, lp)) in perms.iter().enumerate() {
                        if perms[..i].contains(&(kp, qp, lp)) {
                            continue;
                        }
                        let a = coeffs.a6(k, q, l, kp, qp, lp);
                        if a == T::zero() {
                            continue;
                        }
                        let ops = [
                            ModeOp::create0(k),
                            ModeOp::annihilate0(kp),
                            ModeOp::create0(q),
                            ModeOp::annihilate0(qp),
                            ModeOp::create0(l),
                            ModeOp::annihilate0(lp),
                        ];
                        total = total + a * string_trace::<T>(&ops, n);
                    }
                }
            }
        }
    }
    total
}

/// Largest violation of each of the four index-contraction identities
/// `Σ_q A_{kqqk'}`, `Σ_q A_{klqk'ql'}`, `Σ_q A_{kqlqk'l'}`, `Σ_q A_{klqqk'l'}`
/// (all zero for states built from distinct-site products).
pub fn sum_rule_residuals<T: Real>(coeffs: &CoeffSet<'_, T>) -> [T; 4] {
    let n = coeffs.n();
    let mut r = [T::zero(); 4];
    for k in 0..n {
        for kp in 0..n {
            let s: T = (0..n).map(|q| coeffs.a4(k, q, q, kp)).sum();
            r[0] = r[0].max(s.abs());
        }
    }
    if !coeffs.has_sextic() {
        return r;
    }
    for k in 0..n {
        for l in 0..n {
            for kp in 0..n {
                for lp in 0..n {
                    let (mut s1, mut s2, mut s3) = (T::zero(), T::zero(), T::zero());
                    for q in 0..n {
                        s1 = s1 + coeffs.a6(k, l, q, kp, q, lp);
                        s2 = s2 + coeffs.a6(k, q, l, q, kp, lp);
                        s3 = s3 + coeffs.a6(k, l, q, q, kp, lp);
                    }
                    r[1] = r[1].max(s1.abs());
                    r[2] = r[2].max(s2.abs());
                    r[3] = r[3].max(s3.abs());
                }
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_spectral, ChainConfig};

    fn spec(n: usize) -> SpectralData {
        build_spectral(ChainConfig::new(n)).unwrap()
    }

    #[test]
    fn three_node_rejects_boundary() {
        let s = spec(5);
        assert!(three_node_coeffs(&s, 1, 0.1, 1.0, 0.1).is_err());
        assert!(three_node_coeffs(&s, 5, 0.1, 1.0, 0.1).is_err());
        assert!(three_node_coeffs(&s, 2, 0.1, 1.0, 0.1).is_ok());
    }

    #[test]
    fn unpolarized_state_is_identity() {
        let s = spec(6);
        let c = three_node_coeffs(&s, 3, 0.0, 0.0, 0.0).unwrap();
        assert!((c.a0() - 1.0 / 64.0).abs() < 1e-18);
        for k in 1..=6 {
            for q in 1..=6 {
                assert_eq!(c.a_quad(k, q), 0.0);
                assert_eq!(c.a_quart(k, q, q, k), 0.0);
                assert_eq!(c.a_sext(k, q, k, q, k, q), 0.0);
            }
        }
        assert!((c.norm_z() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn neighbours_off_leaves_single_node() {
        let s = spec(7);
        let c = three_node_coeffs(&s, 4, 0.0, 3.0, 0.0).unwrap();
        for t in c.site_terms() {
            if t.sites.iter().any(|&x| x != 4) {
                assert_eq!(t.weight, 0.0, "{t:?}");
            }
        }
        assert!(!c.site_terms().iter().all(|t| t.weight == 0.0));
    }

    #[test]
    fn three_node_sum_rules_and_trace() {
        let s = spec(5);
        let c = three_node_coeffs(&s, 3, 0.3, 10.0, 0.3).unwrap();
        for r in sum_rule_residuals(&c) {
            assert!(r < 1e-12, "{r}");
        }
        assert!((monomial_trace(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_partition_function_cross_check() {
        // Tr exp(Σ b_k I_kz) / (2^N Π cosh(b_k/2)) = 1, i.e. the polynomial is
        // already normalised.
        let s = spec(8);
        let c = three_node_coeffs(&s, 5, 0.7, 2.5, -0.4).unwrap();
        assert!((c.norm_z() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_rejects_bad_inputs() {
        let s = spec(5);
        let mut r = NoiseRealization::quiet(5);
        assert!(noise_coeffs(&s, 3, 10.0, &r, 3).is_err());
        r.b_tilde[2] = 0.6;
        r.epsilon = 0.1;
        assert!(noise_coeffs(&s, 3, 10.0, &r, 1).is_err());
        assert!(noise_coeffs(&s, 0, 10.0, &NoiseRealization::quiet(5), 1).is_err());
    }

    #[test]
    fn zero_noise_matches_single_node() {
        let s = spec(6);
        let reference = three_node_coeffs(&s, 3, 0.0, 10.0, 0.0).unwrap();
        for order in [1, 2] {
            let c = noise_coeffs(&s, 3, 10.0, &NoiseRealization::quiet(6), order).unwrap();
            assert!((c.a0() - reference.a0()).abs() < 1e-16);
            assert!((c.norm_z() - 1.0).abs() < 1e-14);
            for k in 1..=6 {
                for q in 1..=6 {
                    assert!((c.a_quad(k, q) - reference.a_quad(k, q)).abs() < 1e-16);
                    assert_eq!(c.a_quart(k, q, k, q), 0.0);
                }
            }
        }
    }

    #[test]
    fn orders_share_quadratic_tensor() {
        let s = spec(6);
        let r = NoiseRealization::draw(6, 0.1, 7, 0);
        let c1 = noise_coeffs(&s, 3, 10.0, &r, 1).unwrap();
        let c2 = noise_coeffs(&s, 3, 10.0, &r, 2).unwrap();
        assert!(!c1.has_sextic());
        assert!(c2.has_sextic());
        for k in 1..=6 {
            for q in 1..=6 {
                assert_eq!(c1.a_quad(k, q), c2.a_quad(k, q));
            }
        }
        for c in [&c1, &c2] {
            for res in sum_rule_residuals(c) {
                assert!(res < 1e-12);
            }
        }
    }

    #[test]
    fn draws_are_reproducible_and_bounded() {
        let a = NoiseRealization::<f64>::draw(17, 0.3, 42, 5);
        let b = NoiseRealization::<f64>::draw(17, 0.1, 42, 5);
        let c = NoiseRealization::<f64>::draw(17, 0.3, 42, 6);
        assert_eq!(a.b_tilde, b.b_tilde);
        assert_ne!(a.b_tilde, c.b_tilde);
        assert!(a.b_tilde.iter().all(|x| x.abs() <= 0.5));
        a.validate(17).unwrap();
    }

    #[test]
    fn first_order_noise_is_affine_in_offsets() {
        // With one noisy site every A_{kk'} entry is affine in εb̃ (the
        // products of (1 − εb̃/2) factors collapse to a single factor), so
        // doubling the offset doubles the noise contribution exactly.
        let s = spec(7);
        let base = noise_coeffs(&s, 3, 10.0, &NoiseRealization::quiet(7), 1).unwrap();
        let mut r1 = NoiseRealization::quiet(7);
        r1.epsilon = 0.2;
        r1.b_tilde[5] = 0.2;
        let mut r2 = r1.clone();
        r2.b_tilde[5] = 0.4;
        let c1 = noise_coeffs(&s, 3, 10.0, &r1, 1).unwrap();
        let c2 = noise_coeffs(&s, 3, 10.0, &r2, 1).unwrap();
        for k in 1..=7 {
            for q in 1..=7 {
                let d1 = c1.a_quad(k, q) - base.a_quad(k, q);
                let d2 = c2.a_quad(k, q) - base.a_quad(k, q);
                assert!((d2 - 2.0 * d1).abs() < 1e-16, "({k},{q})");
            }
        }

        // With every site noisy the products add O((εb̃)^2) curvature.
        let r = NoiseRealization::draw(7, 0.2, 3, 0);
        let mut rr = r.clone();
        rr.b_tilde.iter_mut().for_each(|b| *b *= 0.5);
        let full = noise_coeffs(&s, 3, 10.0, &r, 1).unwrap();
        let halved = noise_coeffs(&s, 3, 10.0, &rr, 1).unwrap();
        for k in 1..=7 {
            for q in 1..=7 {
                let d1 = halved.a_quad(k, q) - base.a_quad(k, q);
                let d2 = full.a_quad(k, q) - base.a_quad(k, q);
                assert!((d2 - 2.0 * d1).abs() < 0.1f64.powi(2) / 128.0, "({k},{q})");
            }
        }
    }

    #[test]
    fn single_precision_pipeline() {
        let s = build_spectral(ChainConfig::<f32>::new(7)).unwrap();
        let c = three_node_coeffs(&s, 4, 0.3f32, 10.0, 0.3).unwrap();
        assert!((c.norm_z() - 1.0).abs() < 1e-5);
    }
}
