//! Validation checks shared by the `validate` subcommand and the test suite.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use crate::dephasing::{measure_t2_with, Qubit, RunOptions};
use crate::dynamics::{par_trajectories, trajectory_noise, DEFAULT_DRIVEN_DT};
use crate::gates::{two_pair_subspace, two_qubit_gate, x_gate, GateProtocol, SIGMA2, TAU2};
use crate::model::{build_h0, encoded_basis, project, restrict, CircuitParams};
use crate::noise::{compare_spectrum, estimate_psd, sample_trajectory, Channel, NoiseAxis, NoiseSpec};
use crate::opalg::{eig_hermitian, pauli, tensor, Axis, Operator};
use crate::tomography::{fidelity_c, fidelity_estimate, fidelity_x, ideal_process, reconstruct_process};
use crate::units::{ghz, hz};
use crate::Result;

use super::config::ExperimentConfig;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }

    fn at_least(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            passed: value >= threshold,
            ..Self::at_most(name, value, threshold, detail)
        }
    }

    fn failed(name: &str, threshold: f64, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            passed: false,
            value: f64::NAN,
            threshold,
            detail: err.to_string(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: value {:.4e}, threshold {:.4e}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold,
            if self.detail.is_empty() { String::new() } else { format!(" ({})", self.detail) }
        )
    }
}

/// 2 E_z values × 5 E_m/E_z ratios × 2 b0 values.
pub fn identity_grid() -> Vec<CircuitParams> {
    let mut out = Vec::with_capacity(20);
    for e_z in [ghz(4.0), ghz(5.0)] {
        for r in [0.1, 0.4, 1.0, 1.5, 2.0] {
            for b0 in [0.0, 0.3] {
                out.push(CircuitParams::new(e_z, r * e_z).with_b0(b0));
            }
        }
    }
    out
}

/// Largest entrywise residual of the projection identities at `p`
/// (a0 = 1), with the name of the worst identity.
pub fn projection_residual(p: &CircuitParams) -> Result<(f64, &'static str)> {
    let b = encoded_basis(p)?;
    let x = Axis::X.matrix();
    let z = Axis::Z.matrix();
    let id2 = Operator::identity(2);
    let op = |a, s| pauli(a, s, 2);
    let mut cases: Vec<(&'static str, Operator, Operator)> = vec![
        ("PsZ1P = -X", project(&op(Axis::Z, 0)?, &b)?, x.scale(-1.0)),
        ("PsZ2P = X", project(&op(Axis::Z, 1)?, &b)?, x.clone()),
        (
            "P(yy+zz)P = -1-Z",
            project(&(op(Axis::Y, 0)? * op(Axis::Y, 1)? + op(Axis::Z, 0)? * op(Axis::Z, 1)?), &b)?,
            id2.scale(-1.0) - z.clone(),
        ),
    ];
    for s in 0..2 {
        for a in [Axis::X, Axis::Y] {
            cases.push(("transverse projections vanish", project(&op(a, s)?, &b)?, Operator::zeros(2)));
        }
    }
    let other = CircuitParams { e_mx: 0.5 * p.e_mx, ..*p };
    let b2 = encoded_basis(&other)?;
    let sub = two_pair_subspace(&b, &b2);
    let kets: Vec<_> = sub.iter().collect();
    let xm = Axis::X.matrix();
    cases.push(("PsZ2P = X1", restrict(&pauli(Axis::Z, SIGMA2, 4)?, &kets)?, tensor(&xm, &id2)));
    cases.push(("PtZ2P = X2", restrict(&pauli(Axis::Z, TAU2, 4)?, &kets)?, tensor(&id2, &xm)));
    Ok(cases
        .into_iter()
        .map(|(n, got, want)| (got.max_abs_diff(&want), n))
        .fold((0.0, ""), |a, b| if b.0 > a.0 { b } else { a }))
}

pub fn projection_identities() -> CheckResult {
    let mut worst = (0.0, "");
    for p in identity_grid() {
        match projection_residual(&p) {
            Ok(r) if r.0 > worst.0 => worst = r,
            Ok(_) => {}
            Err(e) => return CheckResult::failed("projection identities", 1e-12, e),
        }
    }
    CheckResult::at_most("projection identities", worst.0, 1e-12, format!("20-point grid, worst: {}", worst.1))
}

/// Relative eigenvalue and eigenvector errors of the analytic basis at `p`.
pub fn eigen_residual(p: &CircuitParams) -> Result<f64> {
    let h = build_h0(p);
    let b = encoded_basis(p)?;
    let e = eig_hermitian(&h)?;
    let scale = e.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut analytic: Vec<f64> = (1..=4).map(|k| b.energy(k)).collect();
    analytic.sort_by(f64::total_cmp);
    for (a, n) in analytic.iter().zip(&e.values) {
        worst = worst.max((a - n).abs() / scale);
    }
    if p.e_my == 0.0 && p.e_mz == 0.0 {
        let s = (4.0 * p.e_z * p.e_z + p.e_mx * p.e_mx).sqrt();
        for (want, got) in [-s, -p.e_mx, p.e_mx, s].iter().zip(&e.values) {
            worst = worst.max((want - got).abs() / scale);
        }
    }
    for k in 1..=4 {
        let v = b.state(k);
        let idx = e
            .values
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - b.energy(k)).abs().total_cmp(&(y.1 - b.energy(k)).abs()))
            .map(|(i, _)| i)
            .unwrap();
        let gap = e
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, x)| (x - e.values[idx]).abs())
            .fold(f64::INFINITY, f64::min);
        if gap > 1e-6 * scale {
            worst = worst.max(1.0 - v.inner(&e.vectors[idx]).norm());
        }
        let resid = h.apply(v).add_scaled(crate::opalg::C64::new(-b.energy(k), 0.0), v).norm();
        worst = worst.max(resid / scale);
    }
    Ok(worst)
}

pub fn eigenstructure() -> CheckResult {
    let mut worst: f64 = 0.0;
    for p in identity_grid() {
        match eigen_residual(&p) {
            Ok(r) => worst = worst.max(r),
            Err(e) => return CheckResult::failed("eigenstructure", 1e-10, e),
        }
    }
    CheckResult::at_most("eigenstructure", worst, 1e-10, "20-point grid, relative")
}

/// Outcome of the spectral calibration of one channel.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralCalibration {
    pub max_band_deviation: f64,
    pub slope: f64,
    /// Power in the zero-frequency bin over the target power of its cell.
    pub dc_ratio: f64,
    pub n_traj: usize,
}

impl SpectralCalibration {
    pub fn passes(&self) -> bool {
        self.max_band_deviation <= 0.2 && (self.slope + 1.0).abs() <= 0.1 && (self.dc_ratio - 1.0).abs() <= 0.2
    }
}

/// Averaged periodogram of `n_traj` x-channel trajectories of `spec` over a
/// 10 ms window, against the calibrated A²·cos²η/ω.
///
/// Bins from 100 Hz to 50 kHz are compared in quarter-decade bands. The
/// components below 100 Hz fall into the zero-frequency bin, whose power is
/// compared with the integral of the target over that cell.
pub fn spectral_calibration(spec: &NoiseSpec, n_traj: usize, seed: u64) -> Result<SpectralCalibration> {
    let chan = Channel::new(NoiseAxis::X, 0);
    let trajs: Vec<_> = par_trajectories(n_traj, |i| Ok(sample_trajectory(spec, chan, crate::noise::derive_seed(seed, i, chan.index()))))?;
    let window = 10e-3;
    let est = estimate_psd(&trajs, window, 4096)?;
    let level = spec.amplitude.powi(2) * spec.weight(NoiseAxis::X);
    let check = compare_spectrum(&est, |w| level / w.abs(), hz(100.0), hz(5e4), 4);
    let res = est.omegas[1];
    // two-sided power within |ω| < res/2
    let dc_target = 2.0 * level * ((0.5 * res) / spec.omega_ir).ln();
    let dc_ratio = est.psd[0] * res / dc_target;
    Ok(SpectralCalibration {
        max_band_deviation: check.max_deviation,
        slope: check.slope,
        dc_ratio,
        n_traj,
    })
}

pub fn psd_check(cfg: &ExperimentConfig, seed: u64) -> CheckResult {
    let spec = cfg.noise_spec(0.0);
    match spectral_calibration(&spec, cfg.run.psd_traj, seed) {
        Ok(c) => CheckResult {
            name: "noise spectrum".into(),
            passed: c.passes(),
            value: c.max_band_deviation.max((c.dc_ratio - 1.0).abs()),
            threshold: 0.2,
            detail: format!("slope {:.3}, zero-frequency cell ratio {:.3}", c.slope, c.dc_ratio),
        },
        Err(e) => CheckResult::failed("noise spectrum", 0.2, e),
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn fidelity_at(g: &GateProtocol, spec: &NoiseSpec, n: usize, seed: u64, dt: f64) -> Result<f64> {
    Ok(fidelity_estimate(&g.target, &reconstruct_process(g, spec, n, seed, dt)?)?.value)
}

/// F_x, F_C and T₂ at the configured step and at half of it.
pub fn step_halving(cfg: &ExperimentConfig, seed: u64) -> Vec<CheckResult> {
    let tol = 1e-4;
    let dt = cfg.dt();
    let spec = cfg.noise_spec(FRAC_PI_4);
    let mut out = Vec::new();
    let fx = x_gate(&cfg.pair(0.4), cfg.gates.theta, cfg.lambda())
        .and_then(|g| Ok((fidelity_at(&g, &spec, 8, seed, dt)?, fidelity_at(&g, &spec, 8, seed, dt / 2.0)?)));
    out.push(match fx {
        Ok((a, b)) => CheckResult::at_most("dt halving: F_x", relative_change(a, b), tol, format!("{a:.8} vs {b:.8}")),
        Err(e) => CheckResult::failed("dt halving: F_x", tol, e),
    });
    let (p1, p2) = cfg.two_qubit_pairs();
    let e_cc = cfg.gates.e_cc_ghz.iter().copied().fold(0.0, f64::max);
    let fc = two_qubit_gate(&p1, &p2, cfg.coupling(e_cc))
        .and_then(|g| Ok((fidelity_at(&g, &spec, 2, seed, dt)?, fidelity_at(&g, &spec, 2, seed, dt / 2.0)?)));
    out.push(match fc {
        Ok((a, b)) => CheckResult::at_most("dt halving: F_C", relative_change(a, b), tol, format!("{a:.8} vs {b:.8}")),
        Err(e) => CheckResult::failed("dt halving: F_C", tol, e),
    });
    let e_z = cfg.e_z();
    let cases = [
        ("dt halving: bare T2", Qubit::Bare { e_z }, FRAC_PI_2),
        ("dt halving: encoded T2", Qubit::Encoded(cfg.pair(1.0)), FRAC_PI_4),
        ("dt halving: spread T2", Qubit::Encoded(cfg.pair(1.0).with_a0(1.05)), FRAC_PI_2),
    ];
    for (name, q, eta) in cases {
        let spec = cfg.noise_spec(eta);
        let start = cfg.run.dephasing_start_ns * 1e-9;
        let run = |div| measure_t2_with(&q, &spec, start, &RunOptions::new(20, seed).with_step_div(div));
        out.push(match (run(1), run(2)) {
            (Ok(a), Ok(b)) => match (a.t2, b.t2) {
                (Some(x), Some(y)) => CheckResult::at_most(name, relative_change(x, y), tol, format!("{x:.6e} s vs {y:.6e} s")),
                _ => CheckResult::failed(name, tol, "T2 not reached"),
            },
            (Err(e), _) | (_, Err(e)) => CheckResult::failed(name, tol, e),
        });
    }
    out
}

/// Largest per-trajectory unitarity defect of noisy gate propagators.
pub fn unitarity(cfg: &ExperimentConfig, seed: u64) -> CheckResult {
    let tol = 1e-8;
    let run = || -> Result<f64> {
        let spec = cfg.noise_spec(FRAC_PI_4);
        let (p1, p2) = cfg.two_qubit_pairs();
        let gates = [
            x_gate(&cfg.pair(0.4), cfg.gates.theta, cfg.lambda())?,
            two_qubit_gate(&p1, &p2, cfg.coupling(0.0))?,
        ];
        let mut worst: f64 = 0.0;
        for g in &gates {
            let n = if g.dim() == 4 { 8 } else { 2 };
            let d = par_trajectories(n, |i| {
                let noise = trajectory_noise(&g.schedule, &spec, seed, i);
                Ok(g.rotating_propagator(&noise, cfg.dt())?.unitarity_defect())
            })?;
            worst = d.into_iter().fold(worst, f64::max);
        }
        Ok(worst)
    };
    match run() {
        Ok(v) => CheckResult::at_most("unitarity defect", v, tol, "per trajectory"),
        Err(e) => CheckResult::failed("unitarity defect", tol, e),
    }
}

/// Noiseless F_x(U_x(π)) at E_m = 0.4E_z and F_C at E_cc = 0, plus the
/// score of ideal injected processes.
pub fn noiseless_calibration(cfg: &ExperimentConfig) -> Vec<CheckResult> {
    let quiet = NoiseSpec::noiseless();
    let dt = cfg.dt().min(DEFAULT_DRIVEN_DT);
    let mut out = Vec::new();
    let fx = x_gate(&cfg.pair(0.4), PI, cfg.lambda()).and_then(|g| fidelity_at(&g, &quiet, 1, 0, dt));
    out.push(match fx {
        Ok(f) => CheckResult::at_least("noiseless F_x", f, 0.999, "U_x(pi), E_m = 0.4 E_z"),
        Err(e) => CheckResult::failed("noiseless F_x", 0.999, e),
    });
    let (p1, p2) = cfg.two_qubit_pairs();
    let fc = two_qubit_gate(&p1, &p2, cfg.coupling(0.0)).and_then(|g| fidelity_at(&g, &quiet, 1, 0, dt));
    out.push(match fc {
        Ok(f) => CheckResult::at_least("noiseless F_C", f, 0.99, "E_cc = 0"),
        Err(e) => CheckResult::failed("noiseless F_C", 0.99, e),
    });
    let ideal = || -> Result<f64> {
        let ux = x_gate(&cfg.pair(0.4), PI, cfg.lambda())?.target;
        let uc = two_qubit_gate(&p1, &p2, cfg.coupling(0.0))?.target;
        let a = fidelity_x(&ux, &ideal_process(&ux))?;
        let b = fidelity_c(&uc, &ideal_process(&uc))?;
        Ok((a - 1.0).abs().max((b - 1.0).abs()))
    };
    out.push(match ideal() {
        Ok(v) => CheckResult::at_most("ideal process fidelity |F - 1|", v, 1e-14, "|F - 1| for both formulas"),
        Err(e) => CheckResult::failed("ideal process fidelity |F - 1|", 1e-14, e),
    });
    out
}

pub fn all(cfg: &ExperimentConfig, seed: u64) -> Vec<CheckResult> {
    let mut out = vec![projection_identities(), eigenstructure(), psd_check(cfg, seed)];
    out.extend(step_halving(cfg, seed));
    out.push(unitarity(cfg, seed));
    out.extend(noiseless_calibration(cfg));
    out
}
