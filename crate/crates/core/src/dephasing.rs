//! Monte-Carlo coherence decay and T₂ of bare and encoded qubits.

use serde::Serialize;

use crate::dynamics::{
    effective_encoded_evolution, evolve_recorded, noise_limited_dt, par_trajectories, trajectory_noise,
    PulseSchedule,
};
use crate::error::{invalid, Error, Result};
use crate::model::{build_h0, encoded_basis, reference_basis, CircuitParams};
use crate::noise::{NoiseSpec, NoiseTrajectory};
use crate::opalg::{pauli, Axis, Ket, C64, ONE};
use crate::stats::{bootstrap_stderr, isotonic_nonincreasing};

/// Points per coherence curve, t = 0 included.
pub const DEFAULT_RECORDS: usize = 257;
/// Auto-extension stops past this simulated time.
pub const MAX_DURATION: f64 = 10e-3;
const N_BOOT: usize = 200;
const BOOT_SALT: u64 = 0x7432_6264_6f6f_7473;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Subject {
    Bare,
    Encoded { em_over_ez: f64, a0: f64 },
}

impl Subject {
    pub fn label(&self) -> &'static str {
        match self {
            Subject::Bare => "bare",
            Subject::Encoded { .. } => "encoded",
        }
    }
}

/// Ensemble coherence with the deterministic phase divided out.
#[derive(Clone, Debug)]
pub struct CoherenceCurve {
    pub times: Vec<f64>,
    pub coherence: Vec<f64>,
    pub n_traj: usize,
    pub subject: Subject,
    /// Normalized off-diagonal element, `[traj][record]`.
    pub samples: Vec<Vec<C64>>,
}

impl CoherenceCurve {
    fn from_samples(times: Vec<f64>, samples: Vec<Vec<C64>>, subject: Subject) -> Self {
        let idx: Vec<usize> = (0..samples.len()).collect();
        let coherence = ensemble_abs(&samples, &idx, times.len());
        Self {
            times,
            coherence,
            n_traj: samples.len(),
            subject,
            samples,
        }
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Non-increasing least-squares fit of the coherence.
    pub fn envelope(&self) -> Vec<f64> {
        isotonic_nonincreasing(&self.coherence)
    }
}

fn ensemble_abs(samples: &[Vec<C64>], idx: &[usize], n: usize) -> Vec<f64> {
    let w = 1.0 / idx.len() as f64;
    (0..n)
        .map(|r| (idx.iter().map(|&i| samples[i][r]).sum::<C64>() * w).norm())
        .collect()
}

fn crossing(times: &[f64], envelope: &[f64]) -> Option<f64> {
    let target = (-1.0f64).exp();
    let i = envelope.iter().position(|&y| y < target)?;
    if i == 0 {
        return Some(times[0]);
    }
    let (t0, t1, y0, y1) = (times[i - 1], times[i], envelope[i - 1], envelope[i]);
    Some(t0 + (y0 - target) * (t1 - t0) / (y0 - y1))
}

/// First 1/e crossing of the monotone envelope, linearly interpolated.
pub fn extract_t2(curve: &CoherenceCurve) -> Result<f64> {
    crossing(&curve.times, &curve.envelope()).ok_or(Error::InsufficientDuration {
        duration: curve.duration(),
    })
}

fn record_grid(duration: f64, n_records: usize) -> Result<(f64, Vec<f64>)> {
    if !(duration > 0.0 && duration.is_finite()) || n_records < 2 {
        return Err(invalid("coherence runs need a positive duration and at least two records"));
    }
    let record_dt = duration / (n_records - 1) as f64;
    Ok((record_dt, (0..n_records).map(|i| i as f64 * record_dt).collect()))
}

fn normalize(raw: Vec<C64>, reference: &[C64]) -> Vec<C64> {
    raw.into_iter().zip(reference).map(|(v, r)| v / r).collect()
}

fn check_reference(reference: &[C64]) -> Result<()> {
    if reference.iter().any(|r| r.norm() < 1e-9) {
        return Err(Error::SingularConfiguration("initial state has no coherence".into()));
    }
    Ok(())
}

/// Ensemble and discretization of a coherence run.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub n_traj: usize,
    pub seed: u64,
    pub n_records: usize,
    /// Divides the noise-limited step; 1 by default.
    pub step_div: u32,
}

impl RunOptions {
    pub fn new(n_traj: usize, seed: u64) -> Self {
        Self {
            n_traj,
            seed,
            n_records: DEFAULT_RECORDS,
            step_div: 1,
        }
    }

    pub fn with_records(mut self, n_records: usize) -> Self {
        self.n_records = n_records;
        self
    }

    pub fn with_step_div(mut self, step_div: u32) -> Self {
        self.step_div = step_div;
        self
    }

    fn check(&self, spec: &NoiseSpec) -> Result<()> {
        spec.validate()?;
        if self.n_traj == 0 {
            return Err(Error::InsufficientStatistics { needed: 1, got: 0 });
        }
        if self.step_div == 0 {
            return Err(invalid("step_div must be at least 1"));
        }
        Ok(())
    }

    fn dt(&self, noise: &[NoiseTrajectory], record_dt: f64) -> f64 {
        noise_limited_dt(noise).min(record_dt) / self.step_div as f64
    }
}

/// Full propagation of `initial`; `offdiag` maps a state to its coherence.
fn propagated_curve(
    schedule: &PulseSchedule,
    spec: &NoiseSpec,
    initial: &Ket,
    offdiag: impl Fn(&Ket) -> C64 + Sync,
    opts: &RunOptions,
    subject: Subject,
) -> Result<CoherenceCurve> {
    opts.check(spec)?;
    let n = opts.n_records;
    let (record_dt, times) = record_grid(schedule.duration, n)?;
    let run = |noise: &[NoiseTrajectory]| -> Result<Vec<C64>> {
        let states = evolve_recorded(schedule, noise, initial, record_dt, n, opts.dt(noise, record_dt))?;
        Ok(states.iter().map(&offdiag).collect())
    };
    let reference = run(&[])?;
    check_reference(&reference)?;
    let samples = if spec.is_silent() {
        vec![vec![ONE; n]; opts.n_traj]
    } else {
        par_trajectories(opts.n_traj, |i| {
            let noise = trajectory_noise(schedule, spec, opts.seed, i);
            Ok(normalize(run(&noise)?, &reference))
        })?
    };
    Ok(CoherenceCurve::from_samples(times, samples, subject))
}

/// (|↑⟩+|↓⟩)/√2 under E_z·σ_z + δV_x·σ_x + δV_z·σ_z; coherence ⟨↑|ρ|↓⟩.
pub fn bare_coherence(
    e_z: f64,
    spec: &NoiseSpec,
    duration: f64,
    n_traj: usize,
    seed: u64,
) -> Result<CoherenceCurve> {
    bare_coherence_with(e_z, spec, duration, &RunOptions::new(n_traj, seed))
}

pub fn bare_coherence_with(e_z: f64, spec: &NoiseSpec, duration: f64, opts: &RunOptions) -> Result<CoherenceCurve> {
    let mut s = PulseSchedule::new(2, duration).with_pauli_noise(&[0], 1)?;
    s.add_static(pauli(Axis::Z, 0, 1)?, e_z)?;
    let psi0 = Ket::from_real(&[1.0, 1.0]).normalized();
    propagated_curve(&s, spec, &psi0, |psi| psi.amp(0) * psi.amp(1).conj(), opts, Subject::Bare)
}

fn encoded_subject(p: &CircuitParams) -> Subject {
    Subject::Encoded {
        em_over_ez: p.e_mx / p.e_z,
        a0: p.a0,
    }
}

fn has_fast_path(p: &CircuitParams) -> bool {
    p.a0 == 1.0 && p.e_my == 0.0 && p.e_mz == 0.0 && p.e_mx != 0.0
}

/// (|3⟩+|4⟩)/√2 of a coupled pair; coherence ⟨3|ρ|4⟩.
///
/// Uses the phase-only encoded Hamiltonian when a0 = 1 with pure xx
/// coupling, and full 4-dim propagation otherwise.
pub fn encoded_coherence(
    p: &CircuitParams,
    spec: &NoiseSpec,
    duration: f64,
    n_traj: usize,
    seed: u64,
) -> Result<CoherenceCurve> {
    encoded_coherence_with(p, spec, duration, &RunOptions::new(n_traj, seed))
}

pub fn encoded_coherence_with(
    p: &CircuitParams,
    spec: &NoiseSpec,
    duration: f64,
    opts: &RunOptions,
) -> Result<CoherenceCurve> {
    if has_fast_path(p) {
        effective_coherence(p, spec, duration, opts)
    } else {
        full_encoded_coherence(p, spec, duration, opts)
    }
}

fn pair_schedule(p: &CircuitParams, duration: f64) -> Result<PulseSchedule> {
    let mut s = PulseSchedule::new(4, duration).with_pauli_noise(&[0, 1], 2)?;
    s.add_static(build_h0(p), 1.0)?;
    Ok(s)
}

/// Phase-only path; noise trajectories are those of the full path for
/// the same seed.
pub fn effective_coherence(
    p: &CircuitParams,
    spec: &NoiseSpec,
    duration: f64,
    opts: &RunOptions,
) -> Result<CoherenceCurve> {
    p.validate()?;
    opts.check(spec)?;
    let n = opts.n_records;
    let (record_dt, times) = record_grid(duration, n)?;
    let reference = effective_encoded_evolution(p, &[], record_dt, n, record_dt)?.values;
    check_reference(&reference)?;
    let schedule = pair_schedule(p, duration)?;
    let samples = if spec.is_silent() {
        vec![vec![ONE; n]; opts.n_traj]
    } else {
        par_trajectories(opts.n_traj, |i| {
            let noise = trajectory_noise(&schedule, spec, opts.seed, i);
            let rec = effective_encoded_evolution(p, &noise, record_dt, n, opts.dt(&noise, record_dt))?;
            Ok(normalize(rec.values, &reference))
        })?
    };
    Ok(CoherenceCurve::from_samples(times, samples, encoded_subject(p)))
}

/// 4-dim propagation including residual coupling when a0 ≠ 1.
pub fn full_encoded_coherence(
    p: &CircuitParams,
    spec: &NoiseSpec,
    duration: f64,
    opts: &RunOptions,
) -> Result<CoherenceCurve> {
    p.validate()?;
    let basis = encoded_basis(p).unwrap_or_else(|_| reference_basis(p));
    let (k3, k4) = (basis.state(3).clone(), basis.state(4).clone());
    let psi0 = k3.add_scaled(ONE, &k4).normalized();
    let schedule = pair_schedule(p, duration)?;
    propagated_curve(
        &schedule,
        spec,
        &psi0,
        |psi| k3.inner(psi) * psi.inner(&k4),
        opts,
        encoded_subject(p),
    )
}

/// Qubit whose T₂ is measured.
#[derive(Clone, Copy, Debug)]
pub enum Qubit {
    Bare { e_z: f64 },
    Encoded(CircuitParams),
}

impl Qubit {
    pub fn subject(&self) -> Subject {
        match self {
            Qubit::Bare { .. } => Subject::Bare,
            Qubit::Encoded(p) => encoded_subject(p),
        }
    }

    pub fn coherence(&self, spec: &NoiseSpec, duration: f64, opts: &RunOptions) -> Result<CoherenceCurve> {
        match self {
            Qubit::Bare { e_z } => bare_coherence_with(*e_z, spec, duration, opts),
            Qubit::Encoded(p) => encoded_coherence_with(p, spec, duration, opts),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct T2Estimate {
    pub subject: Subject,
    /// None when the envelope stays above 1/e up to [`MAX_DURATION`].
    pub t2: Option<f64>,
    /// Bootstrap over trajectories; NaN when not reached.
    pub stderr: f64,
    /// Duration of the curve the estimate was read from.
    pub duration: f64,
    pub n_traj: usize,
}

impl T2Estimate {
    /// Γ = 1/T₂², the Gaussian-decay rate.
    pub fn rate(&self) -> Option<f64> {
        self.t2.map(|t| 1.0 / (t * t))
    }
}

pub fn measure_t2(
    qubit: &Qubit,
    spec: &NoiseSpec,
    initial_duration: f64,
    n_traj: usize,
    seed: u64,
) -> Result<T2Estimate> {
    measure_t2_with(qubit, spec, initial_duration, &RunOptions::new(n_traj, seed))
}

/// T₂ with the duration doubled until the crossing is bracketed, then
/// shortened once if the crossing falls in the first eighth of the curve.
pub fn measure_t2_with(
    qubit: &Qubit,
    spec: &NoiseSpec,
    initial_duration: f64,
    opts: &RunOptions,
) -> Result<T2Estimate> {
    if !(initial_duration > 0.0) {
        return Err(invalid("initial duration must be positive"));
    }
    let mut duration = initial_duration.min(MAX_DURATION);
    let mut refined = false;
    loop {
        let curve = qubit.coherence(spec, duration, opts)?;
        match extract_t2(&curve) {
            Ok(t2) if !refined && t2 < duration / 8.0 => {
                refined = true;
                duration = 4.0 * t2;
            }
            Ok(t2) => {
                let stderr = bootstrap_stderr(opts.n_traj, N_BOOT, opts.seed ^ BOOT_SALT, |idx| {
                    let c = ensemble_abs(&curve.samples, idx, curve.times.len());
                    crossing(&curve.times, &isotonic_nonincreasing(&c))
                });
                log::debug!("{:?}: T2 = {t2:.4e} s over {duration:.3e} s", qubit.subject());
                return Ok(T2Estimate {
                    subject: qubit.subject(),
                    t2: Some(t2),
                    stderr,
                    duration,
                    n_traj: opts.n_traj,
                });
            }
            Err(Error::InsufficientDuration { .. }) if duration < MAX_DURATION => {
                refined = true;
                duration = (2.0 * duration).min(MAX_DURATION);
            }
            Err(Error::InsufficientDuration { .. }) => {
                log::warn!("{:?}: no 1/e crossing within {MAX_DURATION} s", qubit.subject());
                return Ok(T2Estimate {
                    subject: qubit.subject(),
                    t2: None,
                    stderr: f64::NAN,
                    duration,
                    n_traj: opts.n_traj,
                });
            }
            Err(e) => return Err(e),
        }
    }
}
