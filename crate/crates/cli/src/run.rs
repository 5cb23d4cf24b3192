//! One function per experiment, each producing a table and a JSON summary
//! for the sidecar.

use jw_discord::experiments::{
    discord_matrix, find_b_critical, noise_average, noise_sweep, predict_cluster, spread_stats, sweep_b,
    uniform_grid, ClusterSpec, DiscordMatrix, StateInput, SweepRecord,
};
use jw_discord::{build_spectral, verify, ChainConfig, Error, SpectralData};
use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig};
use crate::output::{Cell, Table};
use crate::CliError;

pub struct Outcome {
    pub table: Table,
    pub results: Value,
    /// Verify failures; the table is still written.
    pub failed_checks: usize,
}

fn spectral(cfg: &RunConfig) -> Result<SpectralData, CliError> {
    Ok(build_spectral(ChainConfig::new(cfg.n).with_coupling(cfg.d).with_field(cfg.omega0))?)
}

fn cluster(cfg: &RunConfig, j0: usize) -> Option<ClusterSpec> {
    match &cfg.cluster {
        Some(m) => Some(ClusterSpec::explicit(m.clone())),
        None => predict_cluster(cfg.n, j0),
    }
}

fn require_cluster(cfg: &RunConfig, j0: usize) -> Result<ClusterSpec, CliError> {
    cluster(cfg, j0).ok_or_else(|| {
        CliError::Config(format!(
            "no known cluster for N = {}, j0 = {j0}; pass --cluster explicitly",
            cfg.n
        ))
    })
}

fn spread_row(r: &SweepRecord) -> [Cell; 4] {
    [Cell::Float(r.cl_max), Cell::Float(r.cl_min), Cell::Float(r.z_max), Cell::Float(r.z_min)]
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.experiment {
        Experiment::Spectrum => spectrum(cfg),
        Experiment::DiscordMatrix => matrix(cfg),
        Experiment::SweepB => polarization_sweep(cfg),
        Experiment::SweepNoise => noise(cfg),
        Experiment::Verify => self_test(cfg),
    }
}

fn done(table: Table, results: Value) -> Result<Outcome, CliError> {
    Ok(Outcome {
        table,
        results,
        failed_checks: 0,
    })
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = spectral(cfg)?;
    let rows = (1..=cfg.n)
        .map(|k| {
            vec![
                Cell::Int(k as u64),
                Cell::Float(spec.wavenumbers()[k - 1]),
                Cell::Float(spec.energy(k)),
            ]
        })
        .collect();
    done(
        Table {
            columns: vec!["k", "wavenumber", "energy"],
            rows,
        },
        json!({}),
    )
}

fn matrix(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = spectral(cfg)?;
    let j0 = cfg.j0.expect("validated");
    let qm: DiscordMatrix = match &cfg.eps {
        Some(eps) => {
            let [eps] = eps.as_slice() else {
                return Err(CliError::Config("discord-matrix takes a single --eps value".into()));
            };
            noise_average(&spec, j0, cfg.b_j0, *eps, cfg.n_real, cfg.seed, cfg.order[0])?
        }
        None => {
            let state = StateInput::parasitic(j0, cfg.b, cfg.b_j0);
            let worst = verify::analytic_stationarity(&spec, &state, usize::MAX, &cfg.t_grid, cfg.seed)?;
            if worst > jw_discord::experiments::STATIONARITY_TOL {
                return Err(CliError::Core(Error::InvalidState(format!(
                    "discord changes by {worst:.3e} over the t grid"
                ))));
            }
            discord_matrix(&spec, &state)?
        }
    };
    let rows = (1..=cfg.n)
        .flat_map(|a| (1..=cfg.n).map(move |b| (a, b)))
        .map(|(a, b)| vec![Cell::Int(a as u64), Cell::Int(b as u64), Cell::Float(qm.get(a, b))])
        .collect();
    let results = match cluster(cfg, j0) {
        Some(cl) => {
            let s = spread_stats(&qm, &cl)?;
            json!({
                "cluster": cl.members,
                "cl_max": s.cl_max,
                "cl_min": s.cl_min,
                "z_max": s.z_max,
                "z_min": s.z_min,
            })
        }
        None => json!({}),
    };
    done(
        Table {
            columns: vec!["n", "m", "Q"],
            rows,
        },
        results,
    )
}

fn polarization_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = spectral(cfg)?;
    let j0 = cfg.j0.expect("validated");
    let cl = require_cluster(cfg, j0)?;
    let grid = uniform_grid(0.0, cfg.b_max, cfg.points);
    let records = sweep_b(&spec, j0, cfg.b_j0, &cl, &grid)?;
    let b_cl = match find_b_critical(&spec, j0, cfg.b_j0, &cl, (0.0, cfg.b_max), cfg.points) {
        Ok(b) => {
            log::info!("b_cl = {b:.4}");
            Some(b)
        }
        Err(Error::BracketFailure { .. }) => {
            log::warn!("cl_min and z_max do not cross on [0, {}]", cfg.b_max);
            None
        }
        Err(e) => return Err(e.into()),
    };
    let rows = records
        .iter()
        .map(|r| {
            let mut row = vec![Cell::Float(r.param)];
            row.extend(spread_row(r));
            row
        })
        .collect();
    done(
        Table {
            columns: vec!["b", "cl_max", "cl_min", "z_max", "z_min"],
            rows,
        },
        json!({ "cluster": cl.members, "b_cl": b_cl }),
    )
}

fn noise(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = spectral(cfg)?;
    let j0 = cfg.j0.expect("validated");
    let cl = require_cluster(cfg, j0)?;
    let eps = cfg.eps.as_deref().expect("validated");
    let mut rows = Vec::new();
    for &order in &cfg.order {
        for r in noise_sweep(&spec, j0, cfg.b_j0, &cl, eps, cfg.n_real, cfg.seed, order)? {
            let mut row = vec![Cell::Float(r.param), Cell::Int(u64::from(order))];
            row.extend(spread_row(&r));
            row.push(Cell::Int(r.n_realizations as u64));
            rows.push(row);
        }
    }
    done(
        Table {
            columns: vec!["epsilon", "order", "cl_max", "cl_min", "z_max", "z_min", "n_realizations"],
            rows,
        },
        json!({ "cluster": cl.members }),
    )
}

fn self_test(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let checks = verify::run_all(cfg.n, &cfg.t_grid, cfg.seed)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                Cell::Text(c.name.clone()),
                Cell::Float(c.worst),
                Cell::Float(c.tol),
                Cell::Text(if c.passed() { "pass" } else { "fail" }.into()),
            ]
        })
        .collect();
    Ok(Outcome {
        table: Table {
            columns: vec!["check", "worst", "tol", "status"],
            rows,
        },
        results: json!({ "checks": checks.len(), "failed": failed }),
        failed_checks: failed,
    })
}
