//! One PASS/FAIL line per acceptance criterion, written to stderr outside
//! the test harness capture so the lines always appear in the log.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use uqdp::dephasing::{measure_t2, Qubit};
use uqdp::dynamics::DEFAULT_DRIVEN_DT;
use uqdp::experiments::checks::{self, spectral_calibration};
use uqdp::experiments::csv_out::content_lines;
use uqdp::experiments::ExperimentConfig;
use uqdp::gates::{two_qubit_gate, x_gate, Coupling};
use uqdp::model::CircuitParams;
use uqdp::noise::NoiseSpec;
use uqdp::tomography::{fidelity_estimate, reconstruct_process};
use uqdp::units::{ghz, mhz};

/// Criteria that cannot be met and are reported rather than asserted.
const KNOWN_UNATTAINABLE: &[u32] = &[];

fn report(id: u32, name: &str, passed: bool, elapsed: Duration, limit: Duration, detail: String) {
    let within = elapsed <= limit;
    let ok = passed && within;
    let line = format!(
        "ACCEPTANCE [{id}] {} {name}: {detail}; runtime {:.1?} (limit {:?})\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed,
        limit
    );
    std::io::stderr().lock().write_all(line.as_bytes()).unwrap();
    if !KNOWN_UNATTAINABLE.contains(&id) {
        assert!(ok, "{}", line.trim_end());
    }
}

fn e_z() -> f64 {
    ghz(5.0)
}

fn etas() -> Vec<f64> {
    (0..5).map(|i| i as f64 * PI / 8.0).collect()
}

#[test]
fn c1_projection_identities() {
    let t = Instant::now();
    let c = checks::projection_identities();
    report(1, "projection identities", c.passed, t.elapsed(), Duration::from_secs(1), format!("max entrywise residual {:.2e} <= 1e-12 over 20 points", c.value));
}

#[test]
fn c2_eigenstructure() {
    let t = Instant::now();
    let c = checks::eigenstructure();
    report(2, "eigenstructure", c.passed, t.elapsed(), Duration::from_secs(1), format!("max relative error {:.2e} <= 1e-10 over 20 points", c.value));
}

#[test]
fn c3_noise_calibration() {
    let t = Instant::now();
    let spec = NoiseSpec::nominal(e_z(), 0.0);
    let c = spectral_calibration(&spec, 200, 2024).unwrap();
    report(
        3,
        "noise calibration",
        c.passes(),
        t.elapsed(),
        Duration::from_secs(120),
        format!(
            "200 trajectories; bands 100 Hz-50 kHz max deviation {:.3} (<= 0.2), slope {:.3} (-1 +/- 0.1); \
             power below 50 Hz (zero-frequency cell, holds the 10-100 Hz range) ratio {:.3} (1 +/- 0.2)",
            c.max_band_deviation, c.slope, c.dc_ratio
        ),
    );
}

#[test]
fn c4_noiseless_calibration() {
    let t = Instant::now();
    let cfg = ExperimentConfig::default();
    let cs = checks::noiseless_calibration(&cfg);
    let detail = cs.iter().map(|c| format!("{} {:.6}", c.name, c.value)).collect::<Vec<_>>().join(", ");
    report(4, "noiseless gate calibration", cs.iter().all(|c| c.passed), t.elapsed(), Duration::from_secs(300), detail);
}

#[test]
fn c5_fx_operating_point() {
    let t = Instant::now();
    let gate = x_gate(&CircuitParams::new(e_z(), 0.4 * e_z()), PI, mhz(300.0)).unwrap();
    let mut min_f = f64::INFINITY;
    let mut max_se: f64 = 0.0;
    for eta in etas() {
        let pm = reconstruct_process(&gate, &NoiseSpec::nominal(e_z(), eta), 100, 31, DEFAULT_DRIVEN_DT).unwrap();
        let f = fidelity_estimate(&gate.target, &pm).unwrap();
        min_f = min_f.min(f.value);
        max_se = max_se.max(f.stderr);
    }
    report(
        5,
        "F_x at E_m = 0.4 E_z",
        min_f > 0.997 && max_se < 1e-3,
        t.elapsed(),
        Duration::from_secs(1800),
        format!("min over 5 eta of F_x = {min_f:.6} (> 0.997), max stderr {max_se:.2e} (< 1e-3), 100 trajectories"),
    );
}

fn t2(q: Qubit, eta: f64, start: f64) -> f64 {
    measure_t2(&q, &NoiseSpec::nominal(e_z(), eta), start, 100, 47).unwrap().t2.unwrap_or(f64::INFINITY)
}

#[test]
fn c6_dephasing_structure() {
    let t = Instant::now();
    let bare = Qubit::Bare { e_z: e_z() };
    let (bare_x, bare_z) = (t2(bare, 0.0, 10e-9), t2(bare, FRAC_PI_2, 10e-9));
    let enc = Qubit::Encoded(CircuitParams::new(e_z(), e_z()));
    let grid: Vec<f64> = (0..9).map(|i| i as f64 * FRAC_PI_2 / 8.0).collect();
    let enc_t2: Vec<f64> = grid.iter().map(|&eta| t2(enc, eta, 10e-9)).collect();
    let max = enc_t2.iter().copied().fold(0.0, f64::max);
    let min = enc_t2.iter().copied().fold(f64::INFINITY, f64::min);
    let r_bare = bare_x / bare_z;
    let r_enc = max / min;
    let r_gain = enc_t2[8] / bare_z;
    report(
        6,
        "dephasing structure",
        r_bare >= 100.0 && r_enc <= 10.0 && r_gain >= 10.0,
        t.elapsed(),
        Duration::from_secs(1800),
        format!(
            "bare T2(0)/T2(pi/2) = {r_bare:.0} (>= 100); encoded max/min over 9 eta = {r_enc:.2} (<= 10); \
             encoded/bare at pi/2 = {r_gain:.0} (>= 10)"
        ),
    );
}

#[test]
fn c7_fc_curves() {
    let t = Instant::now();
    let p1 = CircuitParams::new(e_z(), ghz(5.0));
    let p2 = CircuitParams::new(e_z(), ghz(2.0));
    let n = 20;
    let curves: Vec<Vec<f64>> = [0.0, 50.0, 100.0]
        .iter()
        .map(|&e_cc| {
            let g = two_qubit_gate(&p1, &p2, Coupling { lambda_c: mhz(300.0), e_cc: mhz(e_cc), e_jc: 0.0 }).unwrap();
            etas()
                .iter()
                .map(|&eta| {
                    let pm = reconstruct_process(&g, &NoiseSpec::nominal(e_z(), eta), n, 53, DEFAULT_DRIVEN_DT).unwrap();
                    fidelity_estimate(&g.target, &pm).unwrap().value
                })
                .collect()
        })
        .collect();
    let decreasing = (0..5).all(|i| curves[0][i] > curves[1][i] && curves[1][i] > curves[2][i]);
    let spread = curves[0].iter().copied().fold(0.0, f64::max) - curves[0].iter().copied().fold(f64::INFINITY, f64::min);
    let at = |c: &Vec<f64>| c.iter().map(|f| format!("{f:.5}")).collect::<Vec<_>>().join("/");
    report(
        7,
        "F_C curves",
        decreasing && spread <= 0.05,
        t.elapsed(),
        Duration::from_secs(2700),
        format!(
            "pointwise decreasing in E_cc: {decreasing}; E_cc = 0 spread {spread:.2e} (<= 0.05); \
             F_C[0] {} F_C[50 MHz] {} F_C[100 MHz] {}, {n} trajectories",
            at(&curves[0]),
            at(&curves[1]),
            at(&curves[2])
        ),
    );
}

#[test]
fn c8_spread_scaling() {
    let t = Instant::now();
    let a0s = [1.01, 1.02, 1.05];
    let normalized: Vec<f64> = a0s
        .iter()
        .map(|&a0| {
            let q = Qubit::Encoded(CircuitParams::new(e_z(), e_z()).with_a0(a0));
            let est = measure_t2(&q, &NoiseSpec::nominal(e_z(), FRAC_PI_2), 100e-9, 100, 59).unwrap();
            est.rate().unwrap() / (a0 - 1.0f64).powi(2)
        })
        .collect();
    let max = normalized.iter().copied().fold(0.0, f64::max);
    let min = normalized.iter().copied().fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = a0s.iter().map(|a| (a - 1.0f64).ln()).collect();
    let ys: Vec<f64> = normalized.iter().zip(&a0s).map(|(g, a)| (g * (a - 1.0f64).powi(2)).ln()).collect();
    let slope = uqdp::stats::linear_fit(&xs, &ys).unwrap().slope;
    report(
        8,
        "parameter-spread scaling",
        max / min <= 1.5,
        t.elapsed(),
        Duration::from_secs(1200),
        format!("rate/(a0-1)^2 max/min = {:.3} (<= 1.5); log-log slope {slope:.3}", max / min),
    );
}

fn run_cli(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_uqdp")).args(args).output().unwrap()
}

#[test]
fn c9_numerical_hygiene() {
    let t = Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.run.seed = Some(61);
    let mut lines = Vec::new();
    let mut ok = true;
    for c in checks::step_halving(&cfg, 61).into_iter().chain([checks::unitarity(&cfg, 61)]) {
        ok &= c.passed;
        lines.push(format!("{} {:.1e}", c.name, c.value));
    }

    let dir = std::env::temp_dir().join(format!("uqdp-accept-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let cfg_path = dir.join("tiny.json");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        &cfg_path,
        r#"{"circuit": {"fx_em_ratios": [0.4], "em_ratios": [1.0]},
            "noise": {"eta_gates": [0.0, 1.5707963267948966], "eta_dephasing": [1.5707963267948966]},
            "run": {"n_traj": 4, "include_noiseless": false}}"#,
    )
    .unwrap();
    let mut identical = true;
    for sub in ["fx-grid", "dephasing"] {
        let mut texts = Vec::new();
        for run in ["a", "b"] {
            let out = dir.join(run);
            let o = run_cli(&[sub, "--config", cfg_path.to_str().unwrap(), "--seed", "5", "--out", out.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            texts.push(std::fs::read_to_string(out.join(format!("{sub}_5.csv"))).unwrap());
        }
        identical &= content_lines(&texts[0]) == content_lines(&texts[1]);
    }
    std::fs::remove_dir_all(&dir).unwrap();
    ok &= identical;
    lines.push(format!("CSV byte-identical under fixed seed: {identical}"));
    report(9, "numerical hygiene", ok, t.elapsed(), Duration::from_secs(600), lines.join("; "));
}
