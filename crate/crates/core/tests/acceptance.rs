//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use jw_discord::experiments::{
    discord_matrix, find_b_critical, noise_sweep, predict_cluster, spread_stats, StateInput, SweepRecord,
};
use jw_discord::verify::{self, Check, T_GRID};
use jw_discord::{build_spectral, ChainConfig, NoiseRealization, Result};

const SEED: u64 = 20240917;

/// In-cluster discord of the single polarized node, `b_j0 = 10`, N = 17.
const Q0_J0_6: f64 = 5.073_101_425_517e-3;
const Q0_J0_9: f64 = 9.110_521_891_576e-3;
const Q0_TOL: f64 = 1e-12;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

fn summary(checks: &[Check]) -> String {
    checks
        .iter()
        .map(|c| format!("{} {:.2e}/{:.0e}", c.name, c.worst, c.tol))
        .collect::<Vec<_>>()
        .join("; ")
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> Result<T>) -> Result<(T, Duration, bool)> {
    let start = Instant::now();
    let v = f()?;
    let el = start.elapsed();
    Ok((v, el, el <= limit))
}

fn oracle_equivalence() -> Result<Outcome> {
    let (checks, el, in_time) = timed(Duration::from_secs(120), || {
        let mut out = Vec::new();
        for n in 4..=7 {
            out.push(verify::three_node_equivalence(n, 10, &T_GRID, SEED)?);
            out.push(verify::noise_equivalence(n, 3, &T_GRID, SEED)?);
        }
        Ok(out)
    })?;
    Ok(Outcome {
        name: "oracle equivalence, N = 4..7, all inner j0, 10 profiles, 5 times (1e-10, < 120 s)",
        passed: all_pass(&checks) && in_time,
        detail: format!("worst {:.2e}, {:.1} s", checks.iter().map(|c| c.worst).fold(0.0, f64::max), el.as_secs_f64()),
    })
}

fn stationarity() -> Result<Outcome> {
    let spec = build_spectral(ChainConfig::<f64>::new(17))?;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for j0 in [6, 9] {
        let mut states = vec![StateInput::parasitic(j0, 0.0, 10.0), StateInput::parasitic(j0, 0.3, 10.0)];
        for order in [1, 2] {
            states.push(StateInput::Noise {
                j0,
                b_j0: 10.0,
                noise: NoiseRealization::draw(17, 0.2, SEED, j0 as u64),
                order,
            });
        }
        for s in &states {
            worst = worst.max(verify::analytic_stationarity(&spec, s, 20, &T_GRID, SEED)?);
            cases += 1;
        }
    }
    Ok(Outcome {
        name: "discord stationarity, N = 17, three-node and noise states, 20 pairs (1e-10)",
        passed: worst <= 1e-10,
        detail: format!("{cases} states, worst |dQ| {worst:.2e}"),
    })
}

fn clusters() -> Result<Outcome> {
    let spec = build_spectral(ChainConfig::<f64>::new(17))?;
    let mut passed = true;
    let mut detail = Vec::new();
    for (j0, golden) in [(6, Q0_J0_6), (9, Q0_J0_9)] {
        let cl = predict_cluster(17, j0).expect("rule applies");
        let qm = discord_matrix(&spec, &StateInput::parasitic(j0, 0.0, 10.0))?;
        let s = spread_stats(&qm, &cl)?;
        let wick = verify::gaussian_agreement(&spec, j0, 0.0, 10.0, 0.0)?;
        let ok = s.cl_max - s.cl_min <= 1e-8
            && s.z_max < 1e-10
            && (s.cl_max - golden).abs() <= Q0_TOL
            && wick <= 1e-12;
        passed &= ok;
        detail.push(format!(
            "j0={j0}: Q0 {:.12e}, plateau width {:.1e}, z_max {:.1e}, Wick {:.1e}",
            s.cl_max,
            s.cl_max - s.cl_min,
            s.z_max,
            wick
        ));
    }
    Ok(Outcome {
        name: "clusters at N = 17, b = 0 (plateau 1e-8, outside 1e-10, golden Q0 1e-12)",
        passed,
        detail: detail.join("; "),
    })
}

fn thresholds() -> Result<Outcome> {
    let spec = build_spectral(ChainConfig::<f64>::new(17))?;
    let mut passed = true;
    let mut detail = Vec::new();
    for (j0, target) in [(6, 0.480), (9, 0.533)] {
        let cl = predict_cluster(17, j0).expect("rule applies");
        let (b, el, in_time) = timed(Duration::from_secs(300), || {
            find_b_critical(&spec, j0, 10.0, &cl, (0.0, 0.96), 97)
        })?;
        passed &= (b - target).abs() <= 0.005 && in_time;
        detail.push(format!("j0={j0}: b_cl {b:.4} ({:.1} s)", el.as_secs_f64()));
    }
    Ok(Outcome {
        name: "critical thresholds 0.480 and 0.533 (+-0.005, < 300 s)",
        passed,
        detail: detail.join("; "),
    })
}

fn sum_rules() -> Result<Outcome> {
    let lengths: Vec<usize> = (3..=17).collect();
    let c = verify::sum_rules(&lengths, SEED)?;
    Ok(Outcome {
        name: "coefficient sum rules, N = 3..17, all inner j0 (1e-12)",
        passed: c.passed(),
        detail: format!("worst {:.2e}", c.worst),
    })
}

fn curves(r: &SweepRecord) -> [f64; 4] {
    [r.cl_max, r.cl_min, r.z_max, r.z_min]
}

fn noise() -> Result<Outcome> {
    let spec = build_spectral(ChainConfig::<f64>::new(17))?;
    let eps = [0.0, 0.1, 0.2, 0.3, 0.4];
    let mut detail = Vec::new();
    let (mut a, mut b, mut c) = (true, true, true);
    let start = Instant::now();
    for j0 in [6, 9] {
        let cl = predict_cluster(17, j0).expect("rule applies");
        let base = spread_stats(&discord_matrix(&spec, &StateInput::parasitic(j0, 0.0, 10.0))?, &cl)?;
        let base = [base.cl_max, base.cl_min, base.z_max, base.z_min];
        let o1 = noise_sweep(&spec, j0, 10.0, &cl, &eps, 100, SEED, 1)?;
        let o2 = noise_sweep(&spec, j0, 10.0, &cl, &eps, 100, SEED, 2)?;
        for r in [&o1[0], &o2[0]] {
            a &= curves(r).iter().zip(&base).all(|(x, y)| (x - y).abs() <= 1e-12);
        }
        let mut margin = f64::INFINITY;
        for (r1, r2) in o1.iter().zip(&o2).skip(1) {
            for ((x1, x2), x0) in curves(r1).iter().zip(curves(r2)).zip(curves(&o1[0])) {
                let gap = (x1 - x2).abs();
                let drift = (x1 - x0).abs();
                b &= gap < drift;
                margin = margin.min(drift - gap);
            }
        }
        let last = o2.last().unwrap();
        if j0 == 6 {
            c &= last.cl_min > last.z_max;
        }
        detail.push(format!(
            "j0={j0}: eps=0.4 order 2 cl [{:.4e}, {:.4e}] z [{:.4e}, {:.4e}], min(drift - gap) {margin:.2e}",
            last.cl_min, last.cl_max, last.z_min, last.z_max
        ));
    }
    let el = start.elapsed();
    detail.push(format!("(a) {a} (b) {b} (c) {c}, {:.1} s", el.as_secs_f64()));
    Ok(Outcome {
        name: "noise sweeps, 100 realizations x 5 eps: eps=0 exact, order gap < drift, plateau kept (< 900 s)",
        passed: a && b && c && el <= Duration::from_secs(900),
        detail: detail.join("; "),
    })
}

fn general_stationarity() -> Result<Outcome> {
    let checks = verify::general_stationarity(5, 50, &T_GRID, SEED)?;
    Ok(Outcome {
        name: "50 random I_z-diagonal states at N = 5 keep every discord (1e-10)",
        passed: all_pass(&checks),
        detail: summary(&checks),
    })
}

fn discord_kernel() -> Result<Outcome> {
    let mut checks = verify::discord_kernel(500, SEED)?;
    checks.extend(verify::known_values()?);
    Ok(Outcome {
        name: "discord kernel vs projective search on 500 X-states (1e-8), Bell/product values (1e-12)",
        passed: all_pass(&checks),
        detail: summary(&checks),
    })
}

fn main() -> ExitCode {
    let criteria: [fn() -> Result<Outcome>; 8] = [
        oracle_equivalence,
        stationarity,
        clusters,
        thresholds,
        sum_rules,
        noise,
        general_stationarity,
        discord_kernel,
    ];
    let mut failed = 0;
    for run in criteria {
        match run() {
            Ok(o) => {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} :: {}", o.name, o.detail);
                failed += usize::from(!o.passed);
            }
            Err(e) => {
                println!("FAIL criterion errored: {e}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
