//! Acceptance suite: one test per criterion, each printed as a single
//! pass/fail line by the harness. Statistical checks use fixed seeds and the
//! stated tolerances; the two binary-driven tests exercise the CLI contract
//! (artifacts, exit codes, worker-invariant output).

use std::process::Command;

use subrad_core::completeness::{explosion_probe, minimal_c1, g_identity_check};
use subrad_core::drifts::{f_rie, f_sas, FoliationBounds, SasakianModelSpec};
use subrad_core::groups::{cc_ball_volume_mc, GroupPoint, GroupSpec};
use subrad_core::pde1d::{eigen_1d, mean_exit_1d, survival_cdf_curve};
use subrad_core::sde::{
    sample_radial_exact, simulate_distance_qv, simulate_group_paths, simulate_radial_paths,
    SimConfig,
};
use subrad_core::spectral3d::{heisenberg_lambda1, mc_lambda1};
use subrad_core::stats::{dkw_margin, dominance_test, ks_distance, mean_with_ci, loglog_slope};

const J_3_2_SQ: f64 = 20.190728556426628; // j_{3/2,1}^2
const J_5_5_SQ: f64 = 87.53122025713413; // j_{5.5,1}^2

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subrad"))
}

#[test]
fn criterion_01_drift_identities() {
    for i in 1..100 {
        let r = 0.1 * i as f64;
        assert_eq!(f_rie(r, 0.0).unwrap(), 1.0 / r);
        assert_eq!(f_sas(r, 0.0).unwrap(), 4.0 / r);
        if r <= 10.0 {
            for k in [1e-6, -1e-6, 1e-8, -1e-8] {
                let dr = (f_rie(r, k).unwrap() - 1.0 / r).abs();
                let ds = (f_sas(r, k).unwrap() - 4.0 / r).abs();
                assert!(dr <= 1e-4 && ds <= 1e-4, "r = {r}, k = {k}: {dr}, {ds}");
            }
        }
    }
}

#[test]
fn criterion_02_drift_asymptotics() {
    let sas = (f_sas(1000.0, -1.0).unwrap() - 1.0).abs();
    let rie = (f_rie(1000.0, -1.0).unwrap() - 1.0).abs();
    assert!(sas <= 2e-3, "f_sas tail error {sas}");
    assert!(rie <= 1e-6, "f_rie tail error {rie}");
}

#[test]
fn criterion_03_exact_vs_em_radial_law() {
    let n_paths = 100_000;
    let t = 0.25;
    let exact = sample_radial_exact(5, 0.0, t, n_paths, 1001).unwrap();
    let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
    let cfg = SimConfig::new(1e-4, t, n_paths, 1002).unwrap();
    let em = simulate_radial_paths(&spec, 0.0, f64::INFINITY, &cfg).unwrap();
    let d = ks_distance(&exact, &em.terminal_values).unwrap();
    assert!(d <= 0.01, "KS distance {d}");
}

#[test]
fn criterion_04_stochastic_dominance() {
    let n_paths = 100_000;
    let (r, t) = (2.0, 0.25);
    let group = GroupSpec::heisenberg();
    let cfg = SimConfig::new(2.5e-4, t, n_paths, 2001).unwrap();
    let lhs = simulate_group_paths(&group, &GroupPoint::identity(&group), r, &cfg, false)
        .unwrap()
        .batch;
    let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
    let cfg_rhs = SimConfig::new(2.5e-4, t, n_paths, 2002).unwrap();
    let rhs = simulate_radial_paths(&spec, 0.0, r, &cfg_rhs).unwrap();
    let thresholds: Vec<f64> = (1..10).map(|i| 0.2 * i as f64).collect();
    let report = dominance_test(
        &lhs.terminal_values,
        &lhs.alive_mask,
        &rhs.terminal_values,
        &rhs.alive_mask,
        &thresholds,
        1e-3,
    )
    .unwrap();
    assert!(report.pass, "worst violation {}", report.worst_violation);
}

#[test]
fn criterion_05_second_moment_bracket() {
    let t = 0.25;
    let group = GroupSpec::heisenberg();
    let cfg = SimConfig::new(2.5e-4, t, 100_000, 3001).unwrap();
    let sim = simulate_group_paths(&group, &GroupPoint::identity(&group), f64::INFINITY, &cfg, false)
        .unwrap()
        .batch;
    let squares: Vec<f64> = sim.terminal_values.iter().map(|v| v * v).collect();
    let (mean, ci) = mean_with_ci(&squares, 1.96).unwrap();
    assert!(
        mean >= 4.0 * t - ci && mean <= 10.0 * t + ci,
        "E d^2 = {mean} +- {ci}, bracket [{}, {}]",
        4.0 * t,
        10.0 * t
    );
}

#[test]
fn criterion_06_mean_exit_times() {
    let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
    let mut cfg = SimConfig::new(5e-5, 1.0, 20_000, 4001).unwrap();
    cfg.bridge_correction = true;
    let batch = simulate_radial_paths(&spec, 0.0, 1.0, &cfg).unwrap();
    let exits: Vec<f64> = batch.hit_times.iter().map(|h| h.unwrap_or(1.0)).collect();
    let (mean, _) = mean_with_ci(&exits, 1.96).unwrap();
    assert!((mean - 0.1).abs() <= 1e-3, "comparison mean exit {mean}");
    let pde = mean_exit_1d(&spec, 1.0, 0.0).unwrap();
    assert!((pde - 0.1).abs() <= 1e-4, "pde mean exit {pde}");

    let group = GroupSpec::heisenberg();
    let cfg_g = SimConfig::new(2.5e-4, 1.0, 20_000, 4002).unwrap();
    let sim = simulate_group_paths(&group, &GroupPoint::identity(&group), 1.0, &cfg_g, false)
        .unwrap()
        .batch;
    let g_exits: Vec<f64> = sim.hit_times.iter().map(|h| h.unwrap_or(1.0)).collect();
    let (g_mean, g_ci) = mean_with_ci(&g_exits, 1.96).unwrap();
    assert!(g_mean >= 0.1 - g_ci, "group mean exit {g_mean} +- {g_ci}");
}

#[test]
fn criterion_07_quadratic_variation_bound() {
    let t = 0.25;
    let group = GroupSpec::heisenberg();
    let cfg = SimConfig::new(1e-5, t, 256, 5001).unwrap();
    let mut qvs = simulate_distance_qv(&group, &cfg).unwrap();
    qvs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = qvs[qvs.len() / 2];
    let max = *qvs.last().unwrap();
    assert!((median - 2.0 * t).abs() <= 0.05 * 2.0 * t, "median qv {median}");
    assert!(max <= 2.0 * t * 1.05, "max qv {max}");
}

#[test]
fn criterion_08_eigenvalue_three_ways() {
    let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
    let one_d = eigen_1d(&spec, 1.0, 2048).unwrap();
    assert!((one_d.value - 20.1907).abs() <= 2e-3, "1d value {}", one_d.value);

    let three_d = heisenberg_lambda1(1.0, 64).unwrap();
    assert!(
        three_d.value > 0.0 && three_d.value <= J_3_2_SQ * (1.0 + 2e-5),
        "3d value {} outside (0, {J_3_2_SQ}]",
        three_d.value
    );

    let cfg = SimConfig::new(2.5e-4, 0.45, 60_000, 6001).unwrap();
    let mc = mc_lambda1(&GroupSpec::heisenberg(), 1.0, &cfg).unwrap();
    let rel = (mc.value - three_d.value).abs() / three_d.value;
    assert!(rel <= 0.1, "mc {} vs 3d {}: rel {rel}", mc.value, three_d.value);
}

#[test]
fn criterion_09_htype_eigenvalue_bound() {
    let cfg = SimConfig::new(2.5e-4, 0.3, 60_000, 7001).unwrap();
    let mc = mc_lambda1(&GroupSpec::quaternionic_heisenberg(), 1.0, &cfg).unwrap();
    assert!(mc.value <= J_5_5_SQ * 1.1, "mc {} vs bound {}", mc.value, J_5_5_SQ * 1.1);
}

#[test]
fn criterion_10_heat_content_comparison() {
    let r = 2.0;
    let n_paths = 20_000;
    let thresholds = [0.5, 1.0, 1.5];
    let group = GroupSpec::heisenberg();
    let spec = SasakianModelSpec::sasakian(2, 0.0, 0.0).unwrap();
    let margin = dkw_margin(n_paths, 1e-3).unwrap();
    for (i, t) in [0.1, 0.25, 0.5].into_iter().enumerate() {
        let cfg = SimConfig::new(2.5e-4, t, n_paths, 8001 + i as u64).unwrap();
        let sim = simulate_group_paths(&group, &GroupPoint::identity(&group), r, &cfg, false)
            .unwrap()
            .batch;
        let pde = survival_cdf_curve(&spec, r, 0.0, t, &thresholds, 1024).unwrap();
        for (j, &s) in thresholds.iter().enumerate() {
            let mc = sim
                .terminal_values
                .iter()
                .zip(&sim.alive_mask)
                .filter(|(v, alive)| **alive && **v < s)
                .count() as f64
                / n_paths as f64;
            assert!(
                mc >= pde[j] - margin,
                "t = {t}, s = {s}: mc {mc} < pde {} - margin {margin}",
                pde[j]
            );
        }
    }
}

#[test]
fn criterion_11_dimension_exponents() {
    // volume slope directly, full small-threshold fit via the CLI runner
    let radii = [0.5, 0.75, 1.0];
    let vols = cc_ball_volume_mc(&GroupSpec::heisenberg(), &radii, 400_000, 9001).unwrap();
    let (slope, _) = loglog_slope(&radii, &vols).unwrap();
    assert!((slope - 4.0).abs() <= 0.1, "volume slope {slope}");

    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["volume-scaling", "--output-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success(), "volume-scaling exit {status}");
    let summary =
        std::fs::read_to_string(dir.path().join("volume-scaling.summary.txt")).unwrap();
    assert!(summary.contains("verdict heat-content slope = 5 +- 0.1 = pass"), "{summary}");
}

#[test]
fn criterion_12_completeness_certificates() {
    let tol = 1e-5;
    let quadratic =
        FoliationBounds::new(|s| -2.0 * (1.0 + s * s), |_| 0.0, |_| 0.0, 1.0).unwrap();
    let quad = minimal_c1(&quadratic, 2, 1e6, tol).unwrap();
    assert!(quad.feasible && (quad.c1 - 1.0).abs() <= 2.0 * tol, "quadratic c1 {}", quad.c1);

    let k0 = 3.0;
    let constant = FoliationBounds::new(move |_| -k0, |_| 0.0, |_| 0.0, 1.0).unwrap();
    let cst = minimal_c1(&constant, 2, 1e6, tol).unwrap();
    assert!(cst.feasible && (cst.c1 - k0 / 2.0).abs() <= 2.0 * tol, "constant c1 {}", cst.c1);

    let s_grid: Vec<f64> = (0..100).map(|i| 0.01 + 0.1 * i as f64).collect();
    let (analytic, fd) = g_identity_check(quad.c1, &s_grid, 1e-4).unwrap();
    assert_eq!(analytic, 0.0, "analytic residual {analytic}");
    assert!(fd <= 1e-5, "fd residual {fd}");

    let cfg = SimConfig::new(1e-3, 2.0, 2000, 9501).unwrap();
    let probe = explosion_probe(&quad, 1.0, 1.0, 2.0, &cfg).unwrap();
    assert!(probe.finite, "explosion probe exceedance {}", probe.envelope_exceedance);
}

#[test]
fn criterion_13_reproducibility_across_workers() {
    for (cmd, extra) in [
        ("qv-check", vec!["--n-paths", "64", "--dt", "1e-4"]),
        ("dominance-test", vec!["--n-paths", "2000", "--dt", "1e-3"]),
    ] {
        let mut csvs = Vec::new();
        for workers in ["1", "3"] {
            let dir = tempfile::tempdir().unwrap();
            let status = bin()
                .arg(cmd)
                .args(&extra)
                .args(["--seed", "77", "--workers", workers, "--output-dir"])
                .arg(dir.path())
                .status()
                .unwrap();
            assert!(
                status.code() == Some(0) || status.code() == Some(1),
                "{cmd} exit {status}"
            );
            csvs.push(std::fs::read(dir.path().join(format!("{cmd}.csv"))).unwrap());
        }
        assert_eq!(csvs[0], csvs[1], "{cmd} CSVs differ across worker counts");
    }
}

#[test]
fn interfaces_path_dump_and_matrix_export() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("paths.bin");
    let status = bin()
        .args(["barrier-probe", "--n-paths", "10", "--dt", "0.01", "--horizon", "0.5"])
        .arg("--dump-paths")
        .arg(&dump)
        .args(["--output-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success(), "barrier-probe exit {status}");
    let bytes = std::fs::read(&dump).unwrap();
    let n_paths = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
    let n_steps = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let dt = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    assert_eq!(n_paths, 10);
    // 50 increments plus the initial value
    assert_eq!(n_steps, 51);
    assert_eq!(dt, 0.01);
    assert_eq!(bytes.len(), 24 + (n_paths * n_steps * 8) as usize);

    let matrix = dir.path().join("op.txt");
    let status = bin()
        .args(["eigen-3d", "--nodes", "16", "--export-matrix"])
        .arg(&matrix)
        .args(["--output-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success(), "eigen-3d exit {status}");
    let text = std::fs::read_to_string(&matrix).unwrap();
    let mut lines = text.lines();
    let header: Vec<u64> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(header[0], header[1], "matrix must be square");
    assert_eq!(header[2] as usize, lines.count(), "nnz must match entry count");
}
