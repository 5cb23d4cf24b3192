//! Exact small-chain reference built on the full `2^N` Hilbert space.
//!
//! Basis states are spin configurations; bit `j − 1` of the index is the
//! occupation of site `j` (`I_jz = c†_j c_j − 1/2`, spin up = occupied).
//! Site fermions come from the Jordan-Wigner string
//! `c_j = (−2)^{j−1} I_1z … I_(j−1)z I⁻_j`, eigenmode fermions from the sine
//! transform, and the evolution from a numerical diagonalisation of the spin
//! Hamiltonian. Two-mode marginals are read off correlation functions, so no
//! fermionic partial-trace sign convention is involved.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::coefficients::{NoiseRealization, PolarizationProfile};
use crate::error::{Error, Result};
use crate::model::SpectralData;
use crate::reduction::XMatrix;

/// Largest chain the dense oracle accepts.
pub const MAX_SITES: usize = 12;

pub type DensityMatrix = DMatrix<Complex64>;

/// `c_j` as a signed partial permutation of the basis: `image[s] = (s', sign)`
/// with `c_j |s> = sign |s'>`, or `None` when site `j` is empty in `s`.
#[derive(Debug, Clone)]
struct SignedMap {
    image: Vec<Option<(usize, f64)>>,
}

impl SignedMap {
    fn dense(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for (s, img) in self.image.iter().enumerate() {
            if let Some((t, sign)) = img {
                m[(*t, s)] = *sign;
            }
        }
        m
    }
}

pub struct FockOperators {
    spec: SpectralData<f64>,
    dim: usize,
    c: Vec<SignedMap>,
    evolution: OnceLock<SymmetricEigen<f64, nalgebra::Dyn>>,
}

impl std::fmt::Debug for FockOperators {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FockOperators").field("n", &self.n()).field("dim", &self.dim).finish()
    }
}

/// Jordan-Wigner operators for the chain described by `spec`.
pub fn build_operators(spec: &SpectralData<f64>) -> Result<FockOperators> {
    let n = spec.n();
    if n > MAX_SITES {
        return Err(Error::InvalidChain(format!("dense oracle supports N <= {MAX_SITES}, got {n}")));
    }
    let dim = 1usize << n;
    let c = (0..n)
        .map(|j| SignedMap {
            image: (0..dim)
                .map(|s| {
                    if s >> j & 1 == 0 {
                        return None;
                    }
                    // (−2 I_lz) = +1 on an empty site, −1 on an occupied one.
                    let parity = (s & ((1 << j) - 1)).count_ones();
                    let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
                    Some((s & !(1 << j), sign))
                })
                .collect(),
        })
        .collect();
    Ok(FockOperators {
        spec: spec.clone(),
        dim,
        c,
        evolution: OnceLock::new(),
    })
}

impl FockOperators {
    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &SpectralData<f64> {
        &self.spec
    }

    pub fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim)
    }

    /// `c_site` (1-based).
    pub fn c(&self, site: usize) -> DMatrix<f64> {
        self.c[site - 1].dense(self.dim)
    }

    pub fn c_dag(&self, site: usize) -> DMatrix<f64> {
        self.c(site).transpose()
    }

    /// `β_mode = Σ_j g_mode(j) c_j` (1-based).
    pub fn beta(&self, mode: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for j in 1..=self.n() {
            let g = self.spec.g(mode, j);
            for (s, img) in self.c[j - 1].image.iter().enumerate() {
                if let Some((t, sign)) = img {
                    m[(*t, s)] += g * sign;
                }
            }
        }
        m
    }

    pub fn beta_dag(&self, mode: usize) -> DMatrix<f64> {
        self.beta(mode).transpose()
    }

    /// `N_mode = β†_mode β_mode`.
    pub fn number(&self, mode: usize) -> DMatrix<f64> {
        let b = self.beta(mode);
        b.transpose() * b
    }

    fn spin_diag(&self, f: impl Fn(usize) -> f64) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_fn(self.dim, |s, _| f(s)))
    }

    /// `I_site,z`.
    pub fn iz(&self, site: usize) -> DMatrix<f64> {
        self.spin_diag(|s| (s >> (site - 1) & 1) as f64 - 0.5)
    }

    /// Raising operator `I⁺_site`.
    fn i_plus(&self, site: usize) -> DMatrix<f64> {
        let bit = 1 << (site - 1);
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for s in 0..self.dim {
            if s & bit == 0 {
                m[(s | bit, s)] = 1.0;
            }
        }
        m
    }

    /// `Σ_k ε_k β†_k β_k − N ω0 / 2`.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut h = self.identity() * (-0.5 * n as f64 * self.spec.config().omega0);
        for k in 1..=n {
            h += self.number(k) * self.spec.energy(k);
        }
        h
    }

    /// `ω0 Σ I_iz + D Σ (I_ix I_(i+1)x + I_iy I_(i+1)y)` from explicit spin
    /// operators.
    pub fn hamiltonian_spin(&self) -> DMatrix<Complex64> {
        let cfg = *self.spec.config();
        let to_c = |m: DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
        let ix = |i| {
            let p = self.i_plus(i);
            to_c((&p + p.transpose()) * 0.5)
        };
        let iy = |i| {
            let p = to_c(self.i_plus(i));
            (&p - p.transpose()) * Complex64::new(0.0, -0.5)
        };
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for i in 1..=self.n() {
            h += to_c(self.iz(i)) * Complex64::new(cfg.omega0, 0.0);
        }
        for i in 1..self.n() {
            h += (ix(i) * ix(i + 1) + iy(i) * iy(i + 1)) * Complex64::new(cfg.d, 0.0);
        }
        h
    }

    fn evolution(&self) -> &SymmetricEigen<f64, nalgebra::Dyn> {
        self.evolution.get_or_init(|| {
            let h = self.hamiltonian_spin().map(|z| z.re);
            SymmetricEigen::new(h)
        })
    }

    /// Numerical spectrum of the Hamiltonian, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.evolution().eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// `e^{−iHt} ρ e^{iHt}`.
    pub fn evolve(&self, rho: &DensityMatrix, t: f64) -> DensityMatrix {
        let eig = self.evolution();
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = nalgebra::DVector::from_iterator(
            self.dim,
            eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        );
        let u = &v * DMatrix::from_diagonal(&phases) * v.transpose();
        &u * rho * u.adjoint()
    }

    /// Largest entry of `{c_j, c†_l} − δ_jl` and `{c_j, c_l}` over all pairs.
    pub fn site_anticommutator_residual(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        // Work on basis vectors through the sparse maps.
        let apply = |map: &SignedMap, s: usize| map.image[s];
        let apply_dag = |map: &SignedMap, s: usize| -> Option<(usize, f64)> {
            // c† is the transpose: find t with image[t] = s.
            map.image.iter().enumerate().find_map(|(t, img)| match img {
                Some((u, sign)) if *u == s => Some((t, *sign)),
                _ => None,
            })
        };
        for s in 0..self.dim {
            for j in 0..n {
                for l in 0..n {
                    // {c_j, c†_l}|s>
                    let mut acc = std::collections::BTreeMap::<usize, f64>::new();
                    if let Some((t, a)) = apply_dag(&self.c[l], s) {
                        if let Some((u, b)) = apply(&self.c[j], t) {
                            *acc.entry(u).or_default() += a * b;
                        }
                    }
                    if let Some((t, a)) = apply(&self.c[j], s) {
                        if let Some((u, b)) = apply_dag(&self.c[l], t) {
                            *acc.entry(u).or_default() += a * b;
                        }
                    }
                    if j == l {
                        *acc.entry(s).or_default() -= 1.0;
                    }
                    worst = acc.values().fold(worst, |w, v| w.max(v.abs()));
                    // {c_j, c_l}|s>
                    let mut acc = std::collections::BTreeMap::<usize, f64>::new();
                    for (x, y) in [(j, l), (l, j)] {
                        if let Some((t, a)) = apply(&self.c[y], s) {
                            if let Some((u, b)) = apply(&self.c[x], t) {
                                *acc.entry(u).or_default() += a * b;
                            }
                        }
                    }
                    worst = acc.values().fold(worst, |w, v| w.max(v.abs()));
                }
            }
        }
        worst
    }

    /// Largest entry of `{β_k, β†_k'} − δ_kk'`.
    pub fn mode_anticommutator_residual(&self) -> f64 {
        let n = self.n();
        let betas: Vec<_> = (1..=n).map(|k| self.beta(k)).collect();
        let id = self.identity();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for kp in 0..n {
                let bd = betas[kp].transpose();
                let mut a = &betas[k] * &bd + &bd * &betas[k];
                if k == kp {
                    a -= &id;
                }
                worst = worst.max(a.amax());
                let b = &betas[k] * &betas[kp] + &betas[kp] * &betas[k];
                worst = worst.max(b.amax());
            }
        }
        worst
    }

    /// Largest entry of `I_jz − (c†_j c_j − 1/2)`.
    pub fn number_residual(&self) -> f64 {
        let id = self.identity();
        (1..=self.n())
            .map(|j| {
                let c = self.c(j);
                (self.iz(j) - (c.transpose() * c - &id * 0.5)).amax()
            })
            .fold(0.0, f64::max)
    }

    /// Distance between the numerical spectrum and the free-fermion
    /// multiset `{Σ ε_k n_k − Nω0/2}`.
    pub fn spectrum_residual(&self) -> f64 {
        let n = self.n();
        let shift = -0.5 * n as f64 * self.spec.config().omega0;
        let mut free: Vec<f64> = (0..self.dim)
            .map(|occ| shift + (0..n).filter(|k| occ >> k & 1 == 1).map(|k| self.spec.energy(k + 1)).sum::<f64>())
            .collect();
        free.sort_by(|a, b| a.partial_cmp(b).unwrap());
        self.spectrum().iter().zip(&free).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Largest entry of `H_spin − H_fermion`.
    pub fn spin_fermion_residual(&self) -> f64 {
        let hs = self.hamiltonian_spin();
        let hf = self.hamiltonian();
        hs.iter().zip(hf.iter()).map(|(a, b)| (a - Complex64::new(*b, 0.0)).norm()).fold(0.0, f64::max)
    }

    fn diagonal_state(&self, weight: impl Fn(usize) -> f64) -> DensityMatrix {
        let d: Vec<f64> = (0..self.dim).map(weight).collect();
        let z: f64 = d.iter().sum();
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim,
            d.into_iter().map(|x| Complex64::new(x / z, 0.0)),
        ))
    }

    fn occupied(s: usize, site0: usize) -> f64 {
        (s >> site0 & 1) as f64
    }
}

/// `2^{-N} Π_j (1 + 2 I_jz tanh(b_j / 2))`.
pub fn exact_state(ops: &FockOperators, profile: &PolarizationProfile<f64>) -> Result<DensityMatrix> {
    if profile.b.len() != ops.n() {
        return Err(Error::InvalidParameter("profile length differs from chain length".into()));
    }
    let taus: Vec<f64> = profile.b.iter().map(|b| (0.5 * b).tanh()).collect();
    Ok(ops.diagonal_state(|s| {
        taus.iter()
            .enumerate()
            .map(|(j, t)| 1.0 + 2.0 * (FockOperators::occupied(s, j) - 0.5) * t)
            .product()
    }))
}

/// A state `1 + Σ γ_i I_zi + Σ γ_{i1 i2} I_zi1 I_zi2 + …`, diagonal in the
/// `I_z` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IzPolynomial {
    /// `(sites, γ)`; sites are 1-based and distinct.
    pub terms: Vec<(Vec<usize>, f64)>,
}

impl IzPolynomial {
    fn weight(&self, s: usize) -> f64 {
        1.0 + self
            .terms
            .iter()
            .map(|(sites, g)| g * sites.iter().map(|&j| FockOperators::occupied(s, j - 1) - 0.5).product::<f64>())
            .sum::<f64>()
    }

    /// Draw γ for every non-empty subset of up to `max_degree` sites,
    /// rejecting draws that are not positive semidefinite.
    pub fn random_psd<R: Rng>(n: usize, max_degree: usize, scale: f64, rng: &mut R) -> Self {
        let dim = 1usize << n;
        loop {
            let terms: Vec<(Vec<usize>, f64)> = (1..dim)
                .filter(|mask: &usize| (mask.count_ones() as usize) <= max_degree)
                .map(|mask| {
                    let sites = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| j + 1).collect();
                    (sites, rng.random_range(-scale..=scale))
                })
                .collect();
            let p = IzPolynomial { terms };
            if (0..dim).all(|s| p.weight(s) >= 0.0) {
                return p;
            }
        }
    }
}

/// Normalised state for an `I_z` polynomial.
pub fn exact_state_polynomial(ops: &FockOperators, poly: &IzPolynomial) -> Result<DensityMatrix> {
    for (sites, _) in &poly.terms {
        for &s in sites {
            ops.spec.check_site(s)?;
        }
    }
    if (0..ops.dim).any(|s| poly.weight(s) < -1e-12) {
        return Err(Error::InvalidState("I_z polynomial is not positive".into()));
    }
    Ok(ops.diagonal_state(|s| poly.weight(s)))
}

/// Truncated noise state built directly from site occupations:
/// `(a0_j0 + c_j0 n_j0) (P + Σ_n P_n c_n n_n [+ Σ_{n<n'} P_nn' c_n c_n' n_n n_n'])`,
/// normalised by its trace.
pub fn exact_noise_state(
    ops: &FockOperators,
    j0: usize,
    b_j0: f64,
    noise: &NoiseRealization<f64>,
    order: u8,
) -> Result<DensityMatrix> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidParameter(format!("noise order must be 1 or 2, got {order}")));
    }
    ops.spec.check_site(j0)?;
    noise.validate(ops.n())?;
    let n = ops.n();
    let j = j0 - 1;
    let tau = (0.5 * b_j0).tanh();
    let eb: Vec<f64> = noise.b_tilde.iter().map(|b| noise.epsilon * b).collect();
    let a: Vec<f64> = (0..n).map(|s| if s == j { 1.0 - tau - 0.5 * eb[s] } else { 1.0 - 0.5 * eb[s] }).collect();
    let c: Vec<f64> = (0..n).map(|s| if s == j { 2.0 * tau + eb[s] } else { eb[s] }).collect();
    let others: Vec<usize> = (0..n).filter(|&s| s != j).collect();
    let prod_except = |skip: &[usize]| -> f64 { others.iter().filter(|s| !skip.contains(s)).map(|&s| a[s]).product() };
    Ok(ops.diagonal_state(|st| {
        let occ = |s: usize| FockOperators::occupied(st, s);
        let mut rest = prod_except(&[]);
        for &s in &others {
            rest += prod_except(&[s]) * c[s] * occ(s);
        }
        if order == 2 {
            for (i, &s) in others.iter().enumerate() {
                for &sp in &others[i + 1..] {
                    rest += prod_except(&[s, sp]) * c[s] * c[sp] * occ(s) * occ(sp);
                }
            }
        }
        (a[j] + c[j] * occ(j)) * rest
    }))
}

/// Correlation-function marginal of modes `(n, m)` of `rho0` evolved to `t`.
pub fn exact_reduced(ops: &FockOperators, rho0: &DensityMatrix, n: usize, m: usize, t: f64) -> Result<XMatrix<f64>> {
    let rho = ops.evolve(rho0, t);
    exact_reduced_at(ops, &rho, n, m)
}

/// Marginal of an already evolved state.
pub fn exact_reduced_at(ops: &FockOperators, rho: &DensityMatrix, n: usize, m: usize) -> Result<XMatrix<f64>> {
    Ok(PairObservables::new(ops, n, m)?.reduce(rho))
}

/// `N_n`, `N_m`, `N_n N_m` and `β†_m β_n` for one mode pair, built once and
/// reused across states and times.
#[derive(Debug, Clone)]
pub struct PairObservables {
    nn: DMatrix<f64>,
    nm: DMatrix<f64>,
    both: DMatrix<f64>,
    coherence: DMatrix<f64>,
}

impl PairObservables {
    pub fn new(ops: &FockOperators, n: usize, m: usize) -> Result<Self> {
        if n == m || n == 0 || m == 0 || n > ops.n() || m > ops.n() {
            return Err(Error::InvalidModes {
                n,
                m,
                reason: "need distinct modes in 1..=N",
            });
        }
        let (bn, bm) = (ops.beta(n), ops.beta(m));
        let nn = bn.transpose() * &bn;
        let nm = bm.transpose() * &bm;
        let both = &nn * &nm;
        let coherence = bm.transpose() * &bn;
        Ok(Self { nn, nm, both, coherence })
    }

    /// `r11 = <(1−N_n)(1−N_m)>`, `r22 = <N_n(1−N_m)>`, `r33 = <(1−N_n)N_m>`,
    /// `r44 = <N_n N_m>`, `r23 = <β†_m β_n>`.
    pub fn reduce(&self, rho: &DensityMatrix) -> XMatrix<f64> {
        let expect = |op: &DMatrix<f64>| -> Complex64 {
            // Tr(ρ A) = Σ_ij ρ_ij A_ji
            rho.iter().zip(op.transpose().iter()).map(|(r, a)| r * a).sum()
        };
        let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
        let n_n = expect(&self.nn).re;
        let n_m = expect(&self.nm).re;
        let r44 = expect(&self.both).re;
        XMatrix {
            r11: tr - n_n - n_m + r44,
            r22: n_n - r44,
            r33: n_m - r44,
            r44,
            r23: expect(&self.coherence),
        }
    }
}

/// Two-mode marginal of the product state of `profile` at any chain length.
///
/// A product of single-site thermal factors is Gaussian, so every
/// correlation follows from `G_nm = <β†_n β_m> = Σ_j g_n(j) g_m(j) f_j`,
/// `f_j = (1 + tanh(b_j/2))/2`, by Wick's theorem:
/// `<N_n N_m> = G_nn G_mm − |G_nm|²`.
pub fn gaussian_reduced(
    spec: &SpectralData<f64>,
    profile: &PolarizationProfile<f64>,
    n: usize,
    m: usize,
    t: f64,
) -> Result<XMatrix<f64>> {
    let len = spec.n();
    if profile.b.len() != len {
        return Err(Error::InvalidParameter("profile length differs from chain length".into()));
    }
    if n == m || n == 0 || m == 0 || n > len || m > len {
        return Err(Error::InvalidModes {
            n,
            m,
            reason: "need distinct modes in 1..=N",
        });
    }
    let f: Vec<f64> = profile.b.iter().map(|b| 0.5 * (1.0 + (0.5 * b).tanh())).collect();
    let corr = |a: usize, b: usize| -> f64 { (1..=len).map(|j| spec.g(a, j) * spec.g(b, j) * f[j - 1]).sum() };
    let (g_nn, g_mm, g_nm) = (corr(n, n), corr(m, m), corr(n, m));
    let r44 = g_nn * g_mm - g_nm * g_nm;
    let phase = Complex64::from_polar(1.0, (spec.energy(m) - spec.energy(n)) * t);
    Ok(XMatrix {
        r11: 1.0 - g_nn - g_mm + r44,
        r22: g_nn - r44,
        r33: g_mm - r44,
        r44,
        r23: phase * g_nm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_spectral, ChainConfig};

    fn ops(n: usize) -> FockOperators {
        build_operators(&build_spectral(ChainConfig::<f64>::new(n)).unwrap()).unwrap()
    }

    #[test]
    fn two_site_lowering_form() {
        let o = ops(2);
        // Site 1 is bit 0: c_1 maps |1,x> -> |0,x> with no string.
        let c1 = o.c(1);
        let mut want = DMatrix::zeros(4, 4);
        want[(0, 1)] = 1.0;
        want[(2, 3)] = 1.0;
        assert_eq!(c1, want);
        // c_2 picks up −1 when site 1 is occupied.
        let c2 = o.c(2);
        assert_eq!(c2[(0, 2)], 1.0);
        assert_eq!(c2[(1, 3)], -1.0);
        assert!(o.site_anticommutator_residual() < 1e-12);
    }

    #[test]
    fn operator_algebra() {
        for n in [3, 4] {
            let o = ops(n);
            assert!(o.site_anticommutator_residual() < 1e-12);
            assert!(o.mode_anticommutator_residual() < 1e-12);
            assert!(o.number_residual() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_free_fermion() {
        let spec = build_spectral(ChainConfig::<f64>::new(4).with_coupling(1.7).with_field(0.3)).unwrap();
        let o = build_operators(&spec).unwrap();
        assert!(o.spectrum_residual() < 1e-10);
        assert!(o.spin_fermion_residual() < 1e-12);
    }

    #[test]
    fn rejects_large_chains() {
        let spec = build_spectral(ChainConfig::<f64>::new(13)).unwrap();
        assert!(build_operators(&spec).is_err());
    }

    #[test]
    fn unpolarized_marginal() {
        let o = ops(4);
        let rho = exact_state(&o, &PolarizationProfile::zeros(4)).unwrap();
        assert!((rho[(5, 5)].re - 1.0 / 16.0).abs() < 1e-15);
        let x = exact_reduced(&o, &rho, 1, 3, 0.0).unwrap();
        assert!(x.max_abs_diff(&XMatrix::maximally_mixed()) < 1e-14);
    }

    #[test]
    fn single_polarized_state_is_diagonal() {
        let o = ops(4);
        let rho = exact_state(&o, &PolarizationProfile::single(4, 2, 10.0)).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    assert_eq!(rho[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        let tr: Complex64 = rho.diagonal().iter().sum();
        assert!((tr.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wick_matches_dense_oracle() {
        let spec = build_spectral(ChainConfig::<f64>::new(5).with_field(0.2)).unwrap();
        let o = build_operators(&spec).unwrap();
        let profile = PolarizationProfile { b: vec![0.3, -1.0, 4.0, 0.0, 2.5] };
        let rho = exact_state(&o, &profile).unwrap();
        for t in [0.0, 2.2] {
            for (n, m) in [(1, 2), (5, 3)] {
                let a = exact_reduced(&o, &rho, n, m, t).unwrap();
                let b = gaussian_reduced(&spec, &profile, n, m, t).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-12);
            }
        }
    }

    #[test]
    fn random_polynomial_states_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let o = ops(4);
        for _ in 0..5 {
            let p = IzPolynomial::random_psd(4, 4, 1.5, &mut rng);
            let rho = exact_state_polynomial(&o, &p).unwrap();
            let tr: Complex64 = rho.diagonal().iter().sum();
            assert!((tr.re - 1.0).abs() < 1e-12);
            assert!(rho.diagonal().iter().all(|d| d.re >= -1e-12));
        }
    }
}
