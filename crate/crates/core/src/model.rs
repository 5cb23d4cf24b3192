//! Chain parameters, the free-fermion dispersion and the sine transform
//! between site fermions `c_j` and eigenmode fermions `β_k`.
//!
//! Sites and modes are 1-based on every public entry point; storage is
//! 0-based and the conversion happens once, here.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Open XY chain of `n` spins with nearest-neighbour coupling `d` in a field
/// with Larmor frequency `omega0` (dimensionless units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig<T: Real = f64> {
    pub n: usize,
    pub d: T,
    pub omega0: T,
}

impl<T: Real> ChainConfig<T> {
    /// Chain with the default units `D = 1`, `ω0 = 0`.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            d: T::one(),
            omega0: T::zero(),
        }
    }

    pub fn with_coupling(mut self, d: T) -> Self {
        self.d = d;
        self
    }

    pub fn with_field(mut self, omega0: T) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidChain(format!("need N >= 2, got {}", self.n)));
        }
        if self.d == T::zero() || !self.d.is_finite() {
            return Err(Error::InvalidChain(format!("coupling must be finite and non-zero, got {}", self.d)));
        }
        if !self.omega0.is_finite() {
            return Err(Error::InvalidChain("field must be finite".into()));
        }
        Ok(())
    }
}

/// Wavenumbers, energies and the orthogonal transform `g[n][j] = g_{k_n}(j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData<T: Real = f64> {
    config: ChainConfig<T>,
    wavenumbers: Vec<T>,
    energies: Vec<T>,
    /// Row-major `N x N`, row = mode, column = site.
    g: Vec<T>,
}

/// Populate the dispersion `ε_k = D cos k + ω0` and the sine transform
/// `g_k(j) = sqrt(2/(N+1)) sin(k j)` on `k_n = πn/(N+1)`.
pub fn build_spectral<T: Real>(config: ChainConfig<T>) -> Result<SpectralData<T>> {
    config.validate()?;
    let n = config.n;
    let np1 = T::from_index(n + 1);
    let norm = (T::lit(2.0) / np1).sqrt();
    let wavenumbers: Vec<T> = (1..=n).map(|i| T::PI() * T::from_index(i) / np1).collect();
    let energies = wavenumbers.iter().map(|&k| config.d * k.cos() + config.omega0).collect();
    let mut g = Vec::with_capacity(n * n);
    for &k in &wavenumbers {
        for j in 1..=n {
            g.push(norm * (k * T::from_index(j)).sin());
        }
    }
    Ok(SpectralData {
        config,
        wavenumbers,
        energies,
        g,
    })
}

impl<T: Real> SpectralData<T> {
    pub fn config(&self) -> &ChainConfig<T> {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// Energy of mode `mode` (1-based).
    pub fn energy(&self, mode: usize) -> T {
        self.energies[mode - 1]
    }

    /// `g_{k_mode}(site)`, both 1-based.
    pub fn g(&self, mode: usize, site: usize) -> T {
        self.g0(mode - 1, site - 1)
    }

    #[inline]
    pub(crate) fn g0(&self, mode: usize, site: usize) -> T {
        self.g[mode * self.config.n + site]
    }

    /// Column of the transform at a fixed site: `k -> g_k(site)` (0-based site).
    pub(crate) fn site_column0(&self, site: usize) -> Vec<T> {
        (0..self.config.n).map(|k| self.g0(k, site)).collect()
    }

    /// Overwrite one transform entry. Only useful for exercising the
    /// orthogonality checker.
    pub fn perturb_g(&mut self, mode: usize, site: usize, delta: T) {
        let n = self.config.n;
        self.g[(mode - 1) * n + site - 1] = self.g[(mode - 1) * n + site - 1] + delta;
    }

    /// Check a 1-based site index against the chain length.
    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n() {
            return Err(Error::InvalidSite {
                site,
                reason: "outside 1..=N",
            });
        }
        Ok(())
    }
}

/// Frobenius norm of `G Gᵀ − 1`, `G_{jk} = g_k(j)`.
///
/// A single corrupted entry `g_k(j) + δ` moves a whole row and column of the
/// Gram matrix, so this is at least `|δ|` to first order, whereas the largest
/// single entry only moves by `|δ g_k(l)|`.
pub fn orthogonality_residual<T: Real>(spec: &SpectralData<T>) -> T {
    let n = spec.n();
    let mut sq = T::zero();
    for j in 0..n {
        for l in 0..n {
            let s: T = (0..n).map(|k| spec.g0(k, j) * spec.g0(k, l)).sum();
            let target = if j == l { T::one() } else { T::zero() };
            sq = sq + (s - target).powi(2);
        }
    }
    sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, d: f64, w: f64) -> SpectralData {
        build_spectral(ChainConfig::new(n).with_coupling(d).with_field(w)).unwrap()
    }

    #[test]
    fn dispersion_n3() {
        let s = spec(3, 1.0, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, -h];
        for (e, w) in s.energies().iter().zip(want) {
            assert!((e - w).abs() < 1e-15);
        }
    }

    #[test]
    fn dispersion_with_field() {
        let s = spec(2, 1.0, 5.0);
        assert!((s.energy(1) - 5.5).abs() < 1e-14);
        assert!((s.energy(2) - 4.5).abs() < 1e-14);
    }

    #[test]
    fn transform_is_orthogonal() {
        for n in [2, 3, 8, 17, 31] {
            assert!(orthogonality_residual(&spec(n, 1.0, 0.0)) < 1e-12, "N = {n}");
        }
    }

    #[test]
    fn checker_sees_perturbation() {
        let mut s = spec(17, 1.0, 0.0);
        s.perturb_g(4, 7, 1e-3);
        assert!(orthogonality_residual(&s) >= 1e-3);
    }

    #[test]
    fn transform_symmetric() {
        let s = spec(17, 1.0, 0.0);
        for n in 1..=17 {
            for j in 1..=17 {
                assert!((s.g(n, j) - s.g(j, n)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn energy_gaps_ignore_field() {
        let a = spec(9, 1.0, 0.0);
        let b = spec(9, 1.0, 3.7);
        for k in 1..=9 {
            for q in 1..=9 {
                let da = a.energy(k) - a.energy(q);
                let db = b.energy(k) - b.energy(q);
                assert!((da - db).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_chains() {
        assert!(build_spectral(ChainConfig::<f64>::new(1)).is_err());
        assert!(build_spectral(ChainConfig::new(4).with_coupling(0.0)).is_err());
    }

    #[test]
    fn single_precision_builds() {
        let s = build_spectral(ChainConfig::<f32>::new(17)).unwrap();
        assert!(orthogonality_residual(&s) < 1e-5);
    }
}
