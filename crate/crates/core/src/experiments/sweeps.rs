//! Parameter sweeps behind the CLI subcommands. Grid points run in grid
//! order; trajectories within a point run on the rayon pool.

use std::path::{Path, PathBuf};

use crate::dephasing::{measure_t2, Qubit, T2Estimate};
use crate::gates::{two_qubit_gate, x_gate};
use crate::noise::{sample_channels, Channel, NoiseSpec};
use crate::tomography::{fidelity_estimate, leakage, reconstruct_process};
use crate::units::to_ghz;
use crate::Result;

use super::checks::{self, CheckResult};
use super::config::ExperimentConfig;
use super::csv_out::{float, CsvSink};

fn file_name(subcommand: &str, seed: u64) -> String {
    format!("{subcommand}_{seed}.csv")
}

fn t2_fields(eta: f64, em: f64, a0: f64, b0: f64, est: &T2Estimate) -> Vec<String> {
    vec![
        float(eta),
        float(em),
        float(a0),
        float(b0),
        est.subject.label().into(),
        est.t2.map_or_else(|| "not_reached".into(), float),
        float(est.stderr),
    ]
}

/// T₂ of the bare qubit and of each encoded configuration, per η.
pub fn run_dephasing_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let seed = cfg.seed()?;
    let n = cfg.run.n_traj;
    let start = cfg.run.dephasing_start_ns * 1e-9;
    let cols = ["eta_rad", "em_over_ez", "a0", "b0", "subject", "t2_seconds", "stderr_seconds"];
    let mut sink = CsvSink::create(out, &file_name("dephasing", seed), &cols, seed, n)?;
    let b0s: Vec<Option<f64>> = if cfg.circuit.b0.is_empty() {
        vec![None]
    } else {
        cfg.circuit.b0.iter().map(|b| Some(*b)).collect()
    };
    for &eta in &cfg.noise.eta_dephasing {
        let spec = cfg.noise_spec(eta);
        let bare = measure_t2(&Qubit::Bare { e_z: cfg.e_z() }, &spec, start, n, seed)?;
        log::info!("eta {eta:.4}: bare T2 {:?}", bare.t2);
        sink.row(&t2_fields(eta, f64::NAN, f64::NAN, f64::NAN, &bare))?;
        for &r in &cfg.circuit.em_ratios {
            for &a0 in &cfg.circuit.a0 {
                for b0 in &b0s {
                    let mut p = cfg.pair(r).with_a0(a0);
                    if let Some(b) = b0 {
                        p = p.with_b0(*b);
                    }
                    let est = measure_t2(&Qubit::Encoded(p), &spec, start, n, seed)?;
                    log::info!("eta {eta:.4}, E_m/E_z {r}, a0 {a0}: T2 {:?}", est.t2);
                    sink.row(&t2_fields(eta, r, a0, b0.unwrap_or(0.0), &est))?;
                }
            }
        }
    }
    sink.finish()
}

/// F_x of U_x(θ) over the (η, E_m/E_z) grid, plus optional A = 0 rows.
pub fn run_fx_grid(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let seed = cfg.seed()?;
    let n = cfg.run.n_traj;
    let cols = ["eta_rad", "em_over_ez", "amplitude_over_ez", "f_x", "stderr", "leakage"];
    let mut sink = CsvSink::create(out, &file_name("fx-grid", seed), &cols, seed, n)?;
    let quiet = NoiseSpec::noiseless();
    for &r in &cfg.circuit.fx_em_ratios {
        let gate = x_gate(&cfg.pair(r), cfg.gates.theta, cfg.lambda())?;
        let mut points: Vec<(f64, NoiseSpec, usize)> =
            cfg.noise.eta_gates.iter().map(|&eta| (eta, cfg.noise_spec(eta), n)).collect();
        if cfg.run.include_noiseless {
            points.push((0.0, quiet, 1));
        }
        for (eta, spec, n_pt) in points {
            let pm = reconstruct_process(&gate, &spec, n_pt, seed, cfg.dt())?;
            let f = fidelity_estimate(&gate.target, &pm)?;
            let amp = if spec.is_silent() { 0.0 } else { cfg.noise.amplitude_over_ez };
            log::info!("E_m/E_z {r}, eta {eta:.4}, A/E_z {amp}: F_x {:.6}", f.value);
            sink.row(&[float(eta), float(r), float(amp), float(f.value), float(f.stderr), float(leakage(&pm)?)])?;
        }
    }
    sink.finish()
}

/// F_C versus η for each E_cc.
pub fn run_fc_curves(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let seed = cfg.seed()?;
    let n = cfg.run.n_traj;
    let cols = ["eta_rad", "e_cc_ghz", "f_c", "stderr", "leakage"];
    let mut sink = CsvSink::create(out, &file_name("fc-curves", seed), &cols, seed, n)?;
    let (p1, p2) = cfg.two_qubit_pairs();
    for &e_cc in &cfg.gates.e_cc_ghz {
        let gate = two_qubit_gate(&p1, &p2, cfg.coupling(e_cc))?;
        for &eta in &cfg.noise.eta_gates {
            let pm = reconstruct_process(&gate, &cfg.noise_spec(eta), n, seed, cfg.dt())?;
            let f = fidelity_estimate(&gate.target, &pm)?;
            log::info!("E_cc {e_cc} GHz, eta {eta:.4}: F_C {:.6}", f.value);
            sink.row(&[float(eta), float(e_cc), float(f.value), float(f.stderr), float(leakage(&pm)?)])?;
        }
    }
    sink.finish()
}

pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub path: PathBuf,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_validation(cfg: &ExperimentConfig, out: &Path) -> Result<ValidationReport> {
    let seed = cfg.seed()?;
    let cols = ["check", "passed", "value", "threshold", "detail"];
    let mut sink = CsvSink::create(out, &file_name("validate", seed), &cols, seed, cfg.run.n_traj)?;
    let checks = checks::all(cfg, seed);
    for c in &checks {
        sink.row(&[
            c.name.clone(),
            c.passed.to_string(),
            float(c.value),
            float(c.threshold),
            c.detail.clone(),
        ])?;
    }
    Ok(ValidationReport {
        checks,
        path: sink.finish()?,
    })
}

/// Components of trajectory 0 of every channel, per gate η, plus the
/// spectral calibration of the x channel at η = 0.
pub fn run_noise_audit(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let seed = cfg.seed()?;
    let cols = ["eta_rad", "axis", "qubit", "omega_rad_s", "amplitude", "phase"];
    let mut sink = CsvSink::create(out, &file_name("noise-audit", seed), &cols, seed, 1)?;
    for &eta in &cfg.noise.eta_gates {
        for tr in sample_channels(&cfg.noise_spec(eta), &Channel::all(2), seed, 0) {
            let axis = format!("{:?}", tr.channel.axis).to_lowercase();
            for ((w, a), p) in tr.omegas.iter().zip(&tr.amplitudes).zip(&tr.phases) {
                sink.row(&[float(eta), axis.clone(), tr.channel.qubit.to_string(), float(*w), float(*a), float(*p)])?;
            }
        }
    }
    let cal = checks::spectral_calibration(&cfg.noise_spec(0.0), cfg.run.psd_traj, seed)?;
    log::info!(
        "spectrum: max band deviation {:.3}, slope {:.3}, zero-frequency ratio {:.3} (E_z = {:.3} GHz)",
        cal.max_band_deviation,
        cal.slope,
        cal.dc_ratio,
        to_ghz(cfg.e_z())
    );
    sink.finish()
}
