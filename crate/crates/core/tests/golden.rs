use jw_discord::experiments::{noise_sweep, predict_cluster, sweep_b, uniform_grid, SweepRecord};
use jw_discord::{build_spectral, ChainConfig, SpectralData};

const TOL: f64 = 1e-12;

fn spec17() -> SpectralData {
    build_spectral(ChainConfig::<f64>::new(17)).unwrap()
}

fn assert_curves(r: &SweepRecord, want: [f64; 4]) {
    let got = [r.cl_max, r.cl_min, r.z_max, r.z_min];
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < TOL, "{got:?} vs {want:?}");
    }
}

#[test]
fn noise_sweep_values() {
    let spec = spec17();
    let cl = predict_cluster(17, 6).unwrap();
    let o1 = noise_sweep(&spec, 6, 10.0, &cl, &[0.4], 10, 7, 1).unwrap();
    assert_curves(&o1[0], [5.858521640556014e-3, 4.224432798594991e-3, 3.3250344076681817e-4, 2.8084191206700915e-5]);
    let o2 = noise_sweep(&spec, 6, 10.0, &cl, &[0.4], 10, 7, 2).unwrap();
    assert_curves(&o2[0], [5.962657939027661e-3, 4.223338193320869e-3, 3.2062121688323234e-4, 2.5540087232012178e-5]);
    assert_eq!((o2[0].order, o2[0].n_realizations, o2[0].seed), (Some(2), 10, 7));
}

#[test]
fn polarization_sweep_values() {
    let spec = spec17();
    let r = sweep_b(&spec, 9, 10.0, &predict_cluster(17, 9).unwrap(), &uniform_grid(0.0, 0.96, 5)).unwrap();
    assert_curves(&r[0], [9.110521891576129e-3, 9.110521891576129e-3, 0.0, 0.0]);
    assert_curves(&r[2], [1.8305646799604114e-2, 2.747059855153444e-3, 1.8670170474018866e-3, 0.0]);
    assert_curves(&r[4], [2.9695327949482486e-2, 1.7278036513879158e-4, 6.7874892131497555e-3, 0.0]);
}

#[test]
fn sweeps_are_deterministic() {
    let spec = spec17();
    let cl = predict_cluster(17, 6).unwrap();
    let a = noise_sweep(&spec, 6, 10.0, &cl, &[0.1, 0.3], 6, 99, 2).unwrap();
    let b = noise_sweep(&spec, 6, 10.0, &cl, &[0.1, 0.3], 6, 99, 2).unwrap();
    assert_eq!(a, b);
}
