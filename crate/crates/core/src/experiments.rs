//! Discord matrices, cluster spread statistics, the parasitic-polarization
//! threshold search and Monte Carlo noise sweeps.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coefficients::{noise_coeffs, three_node_coeffs, CoeffSet, NoiseRealization};
use crate::discord::discord_pair;
use crate::error::{Error, Result};
use crate::model::SpectralData;
use crate::numeric::bisect;
use crate::reduction::{assemble_x, reduce_pair};

/// Times at which [`discord_matrix`] re-evaluates a few pairs.
pub const SPOT_CHECK_TIMES: [f64; 4] = [0.7, 1.3, 5.1, 23.7];
/// Pairs re-evaluated per matrix.
pub const SPOT_CHECK_PAIRS: usize = 3;
pub const STATIONARITY_TOL: f64 = 1e-10;
/// Bisection tolerance of [`find_b_critical`].
pub const B_TOL: f64 = 1e-4;

/// Symmetric pairwise discord with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscordMatrix {
    n: usize,
    q: Vec<f64>,
}

impl DiscordMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, q: vec![0.0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Q_nm`, 1-based.
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.q[(n - 1) * self.n + m - 1]
    }

    /// Sets `Q_nm` and `Q_mn`.
    pub fn set(&mut self, n: usize, m: usize, v: f64) {
        self.q[(n - 1) * self.n + m - 1] = v;
        self.q[(m - 1) * self.n + n - 1] = v;
    }

    /// `(n, m, Q_nm)` for `n < m`, row by row.
    pub fn upper(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.n).flat_map(move |n| (n + 1..=self.n).map(move |m| (n, m, self.get(n, m))))
    }

    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            *a += b;
        }
    }

    fn scale(&mut self, s: f64) {
        self.q.iter_mut().for_each(|v| *v *= s);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterRule {
    /// Odd `N`, `j0 = (N + 1)/2`: the odd modes.
    MiddleNodeOdd,
    /// `N = 5 + 6i`, `j0 = 2(i + 1)`: every mode but multiples of three.
    EveryThirdExcluded,
    /// Supplied by the caller.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSpec {
    pub members: Vec<usize>,
    pub rule: ClusterRule,
}

impl ClusterSpec {
    /// Sorted, deduplicated caller-supplied members.
    pub fn explicit(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self {
            members,
            rule: ClusterRule::Explicit,
        }
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.members.binary_search(&mode).is_ok()
    }
}

/// Equal-discord cluster of the single polarized node `j0`, when one of the
/// two known rules applies.
pub fn predict_cluster(n: usize, j0: usize) -> Option<ClusterSpec> {
    if n % 2 == 1 && j0 == n.div_ceil(2) {
        return Some(ClusterSpec {
            members: (1..=n).step_by(2).collect(),
            rule: ClusterRule::MiddleNodeOdd,
        });
    }
    if n >= 5 && (n - 5).is_multiple_of(6) && j0 == 2 * ((n - 5) / 6 + 1) {
        return Some(ClusterSpec {
            members: (1..=n).filter(|k| k % 3 != 0).collect(),
            rule: ClusterRule::EveryThirdExcluded,
        });
    }
    None
}

/// Initial state feeding a discord matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum StateInput {
    ThreeNode {
        j0: usize,
        b_minus: f64,
        b_j0: f64,
        b_plus: f64,
    },
    Noise {
        j0: usize,
        b_j0: f64,
        noise: NoiseRealization<f64>,
        order: u8,
    },
}

impl StateInput {
    /// Both neighbours of `j0` at the parasitic polarization `b`.
    pub fn parasitic(j0: usize, b: f64, b_j0: f64) -> Self {
        Self::ThreeNode {
            j0,
            b_minus: b,
            b_j0,
            b_plus: b,
        }
    }

    pub fn coeffs<'s>(&self, spec: &'s SpectralData<f64>) -> Result<CoeffSet<'s, f64>> {
        match self {
            Self::ThreeNode {
                j0,
                b_minus,
                b_j0,
                b_plus,
            } => three_node_coeffs(spec, *j0, *b_minus, *b_j0, *b_plus),
            Self::Noise { j0, b_j0, noise, order } => noise_coeffs(spec, *j0, *b_j0, noise, *order),
        }
    }

    fn j0(&self) -> usize {
        match self {
            Self::ThreeNode { j0, .. } | Self::Noise { j0, .. } => *j0,
        }
    }
}

fn pair_discord(coeffs: &CoeffSet<'_, f64>, spec: &SpectralData<f64>, n: usize, m: usize, t: f64) -> Result<f64> {
    let red = reduce_pair(coeffs, n, m)?;
    Ok(discord_pair(&assemble_x(&red, spec, t))?.q)
}

/// Discord of every pair at `t = 0`, plus a stationarity spot-check of
/// [`SPOT_CHECK_PAIRS`] pairs at [`SPOT_CHECK_TIMES`].
pub fn discord_matrix(spec: &SpectralData<f64>, state: &StateInput) -> Result<DiscordMatrix> {
    let n = spec.n();
    let coeffs = state.coeffs(spec)?;
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
    let values = pairs
        .par_iter()
        .map(|&(a, b)| pair_discord(&coeffs, spec, a, b, 0.0))
        .collect::<Result<Vec<f64>>>()?;
    let mut qm = DiscordMatrix::zeros(n);
    for (&(a, b), &v) in pairs.iter().zip(&values) {
        qm.set(a, b, v);
    }

    let mut rng = ChaCha8Rng::seed_from_u64((n as u64) << 32 | state.j0() as u64);
    let picks = sample(&mut rng, pairs.len(), SPOT_CHECK_PAIRS.min(pairs.len()));
    for i in picks {
        let (a, b) = pairs[i];
        for t in SPOT_CHECK_TIMES {
            let delta = (pair_discord(&coeffs, spec, a, b, t)? - values[i]).abs();
            if delta > STATIONARITY_TOL {
                return Err(Error::StationarityViolated { n: a, m: b, t, delta });
            }
        }
    }
    Ok(qm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub cl_max: f64,
    pub cl_min: f64,
    pub z_max: f64,
    pub z_min: f64,
}

/// Extrema over in-cluster pairs (`cl_*`) and over pairs with at least one
/// mode outside the cluster (`z_*`).
pub fn spread_stats(qm: &DiscordMatrix, cl: &ClusterSpec) -> Result<Spread> {
    let n = qm.n();
    if cl.members.len() < 2 {
        return Err(Error::InvalidParameter("a cluster needs at least two members".into()));
    }
    if cl.members.len() >= n || cl.members.iter().any(|&k| k == 0 || k > n) {
        return Err(Error::InvalidParameter(format!(
            "cluster must be a strict subset of 1..={n}, got {:?}",
            cl.members
        )));
    }
    let mut s = Spread {
        cl_max: f64::NEG_INFINITY,
        cl_min: f64::INFINITY,
        z_max: f64::NEG_INFINITY,
        z_min: f64::INFINITY,
    };
    for (a, b, q) in qm.upper() {
        if cl.contains(a) && cl.contains(b) {
            s.cl_max = s.cl_max.max(q);
            s.cl_min = s.cl_min.min(q);
        } else {
            s.z_max = s.z_max.max(q);
            s.z_min = s.z_min.min(q);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// `b` for polarization sweeps, `ε` for noise sweeps.
    pub param: f64,
    pub cl_max: f64,
    pub cl_min: f64,
    pub z_max: f64,
    pub z_min: f64,
    pub order: Option<u8>,
    pub n_realizations: usize,
    pub seed: u64,
}

impl SweepRecord {
    fn new(param: f64, s: Spread, order: Option<u8>, n_realizations: usize, seed: u64) -> Self {
        Self {
            param,
            cl_max: s.cl_max,
            cl_min: s.cl_min,
            z_max: s.z_max,
            z_min: s.z_min,
            order,
            n_realizations,
            seed,
        }
    }
}

/// `points` uniformly spaced values on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        p => (0..p).map(|i| lo + (hi - lo) * i as f64 / (p - 1) as f64).collect(),
    }
}

/// Spread statistics of the parasitic-polarization state at each `b`.
pub fn sweep_b(
    spec: &SpectralData<f64>,
    j0: usize,
    b_j0: f64,
    cl: &ClusterSpec,
    b_grid: &[f64],
) -> Result<Vec<SweepRecord>> {
    b_grid
        .par_iter()
        .map(|&b| {
            let qm = discord_matrix(spec, &StateInput::parasitic(j0, b, b_j0))?;
            Ok(SweepRecord::new(b, spread_stats(&qm, cl)?, None, 1, 0))
        })
        .collect()
}

/// Smallest root of `f` on `[lo, hi]`: a `scan_points` grid locates the first
/// sign change, bisection refines it to [`B_TOL`]. Further sign changes are
/// logged.
pub fn first_crossing<F>(f: F, lo: f64, hi: f64, scan_points: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let grid = uniform_grid(lo, hi, scan_points.max(2));
    let values = grid.par_iter().map(|&b| f(b)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push((grid[i], grid[i]));
        } else if i + 1 < grid.len() && values[i + 1] != 0.0 && values[i].signum() != values[i + 1].signum() {
            roots.push((grid[i], grid[i + 1]));
        }
    }
    let Some(&(a, b)) = roots.first() else {
        return Err(Error::BracketFailure {
            what: "cl_min - z_max".into(),
            lo,
            hi,
        });
    };
    if roots.len() > 1 {
        log::warn!("{} sign changes on [{lo}, {hi}]; taking the smallest", roots.len());
    }
    if a == b {
        return Ok(a);
    }
    bisect(&f, a, b, B_TOL)
}

/// Parasitic polarization at which `cl_min` meets `z_max`.
pub fn find_b_critical(
    spec: &SpectralData<f64>,
    j0: usize,
    b_j0: f64,
    cl: &ClusterSpec,
    bracket: (f64, f64),
    scan_points: usize,
) -> Result<f64> {
    first_crossing(
        |b| {
            let qm = discord_matrix(spec, &StateInput::parasitic(j0, b, b_j0))?;
            let s = spread_stats(&qm, cl)?;
            Ok(s.cl_min - s.z_max)
        },
        bracket.0,
        bracket.1,
        scan_points,
    )
}

/// Entrywise mean of the discord matrices of realizations `0..n_real`.
/// Realization `i` draws its offsets from stream `i` of `seed`, so the same
/// offsets are reused across `epsilon` and `order`.
pub fn noise_average(
    spec: &SpectralData<f64>,
    j0: usize,
    b_j0: f64,
    epsilon: f64,
    n_real: usize,
    seed: u64,
    order: u8,
) -> Result<DiscordMatrix> {
    if n_real == 0 {
        return Err(Error::InvalidParameter("n_real must be at least 1".into()));
    }
    let n = spec.n();
    let matrices = (0..n_real)
        .into_par_iter()
        .map(|i| {
            let noise = NoiseRealization::draw(n, epsilon, seed, i as u64);
            discord_matrix(spec, &StateInput::Noise { j0, b_j0, noise, order }).map_err(|e| Error::Realization {
                index: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mean = DiscordMatrix::zeros(n);
    for m in &matrices {
        mean.add_assign(m);
    }
    mean.scale(1.0 / n_real as f64);
    Ok(mean)
}

/// Spread statistics of the realization-averaged discord at each `ε`.
#[allow(clippy::too_many_arguments)]
pub fn noise_sweep(
    spec: &SpectralData<f64>,
    j0: usize,
    b_j0: f64,
    cl: &ClusterSpec,
    eps_list: &[f64],
    n_real: usize,
    seed: u64,
    order: u8,
) -> Result<Vec<SweepRecord>> {
    eps_list
        .iter()
        .map(|&eps| {
            let mean = noise_average(spec, j0, b_j0, eps, n_real, seed, order)?;
            Ok(SweepRecord::new(eps, spread_stats(&mean, cl)?, Some(order), n_real, seed))
        })
        .collect()
}

/// Groups pairs with discord above `tol` into runs of values no further than
/// `tol` apart. Each group is `(mean value, modes touched)`, largest value
/// first. Exploration aid only.
pub fn group_equal_discord(qm: &DiscordMatrix, tol: f64) -> Vec<(f64, Vec<usize>)> {
    let mut pairs: Vec<_> = qm.upper().filter(|p| p.2 > tol).collect();
    pairs.sort_by(|x, y| y.2.partial_cmp(&x.2).unwrap());
    let mut groups: Vec<Vec<(usize, usize, f64)>> = Vec::new();
    for p in pairs {
        match groups.last_mut() {
            Some(g) if g.last().unwrap().2 - p.2 <= tol => g.push(p),
            _ => groups.push(vec![p]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|p| p.2).sum::<f64>() / g.len() as f64;
            let mut modes: Vec<usize> = g.iter().flat_map(|p| [p.0, p.1]).collect();
            modes.sort_unstable();
            modes.dedup();
            (mean, modes)
        })
        .collect()
}
