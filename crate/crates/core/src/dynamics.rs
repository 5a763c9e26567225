//! Time evolution under piecewise-constant Hamiltonians.
//!
//! Each step freezes H at the step midpoint and applies the exact
//! exponential, so every step is unitary to rounding.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::CircuitParams;
use crate::noise::{sample_channels, Channel, NoiseAxis, NoiseSpec, NoiseTrajectory, Sampler};
use crate::opalg::{eig_hermitian, expm_i, Ket, Operator, C64};

/// Default step for driven gate simulations, s.
pub const DEFAULT_DRIVEN_DT: f64 = 0.5e-12;

/// Steps per period of the fastest coherent scale.
const STEPS_PER_PERIOD: f64 = 20.0;

/// Steps per period of the fastest noise component when nothing is driven.
const NOISE_STEPS_PER_PERIOD: f64 = 200.0;

/// `amplitude·cos(omega·t + phase)·op`, optionally active only on `window`.
#[derive(Clone, Debug)]
pub struct DriveTerm {
    pub op: Operator,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub window: Option<(f64, f64)>,
}

impl DriveTerm {
    pub fn coefficient(&self, t: f64) -> f64 {
        if let Some((on, off)) = self.window {
            if t < on || t >= off {
                return 0.0;
            }
        }
        self.amplitude * (self.omega * t + self.phase).cos()
    }
}

/// H(t) = Σ c·O + Σ drives + Σ δV_ch(t)·O_ch
#[derive(Clone, Debug)]
pub struct PulseSchedule {
    dim: usize,
    pub static_terms: Vec<(Operator, f64)>,
    pub drive_terms: Vec<DriveTerm>,
    pub noise_couplings: Vec<(Channel, Operator)>,
    pub duration: f64,
}

impl PulseSchedule {
    pub fn new(dim: usize, duration: f64) -> Self {
        Self {
            dim,
            static_terms: Vec::new(),
            drive_terms: Vec::new(),
            noise_couplings: Vec::new(),
            duration,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, op: &Operator) -> Result<()> {
        if op.dim() != self.dim {
            return Err(invalid(format!(
                "term has dimension {}, schedule has {}",
                op.dim(),
                self.dim
            )));
        }
        if !op.is_hermitian(crate::opalg::HERMITIAN_TOL) {
            return Err(invalid("schedule terms must be Hermitian"));
        }
        Ok(())
    }

    pub fn add_static(&mut self, op: Operator, coeff: f64) -> Result<&mut Self> {
        self.check(&op)?;
        self.static_terms.push((op, coeff));
        Ok(self)
    }

    pub fn add_drive(&mut self, drive: DriveTerm) -> Result<&mut Self> {
        self.check(&drive.op)?;
        self.drive_terms.push(drive);
        Ok(self)
    }

    pub fn add_noise(&mut self, channel: Channel, op: Operator) -> Result<&mut Self> {
        self.check(&op)?;
        self.noise_couplings.push((channel, op));
        Ok(self)
    }

    /// Couples x and z noise of each physical qubit through its σ_x, σ_z;
    /// `sites[q]` is the register site of noise qubit `q`.
    pub fn with_pauli_noise(mut self, sites: &[usize], n_qubits: usize) -> Result<Self> {
        use crate::opalg::{pauli, Axis};
        for (q, &site) in sites.iter().enumerate() {
            self.add_noise(Channel::new(NoiseAxis::X, q), pauli(Axis::X, site, n_qubits)?)?;
            self.add_noise(Channel::new(NoiseAxis::Z, q), pauli(Axis::Z, site, n_qubits)?)?;
        }
        Ok(self)
    }

    pub fn channels(&self) -> Vec<Channel> {
        self.noise_couplings.iter().map(|(c, _)| *c).collect()
    }

    pub fn static_hamiltonian(&self) -> Operator {
        let mut h = Operator::zeros(self.dim);
        for (op, c) in &self.static_terms {
            h.add_scaled(*c, op);
        }
        h
    }

    pub fn is_driven(&self) -> bool {
        self.drive_terms.iter().any(|d| d.amplitude != 0.0)
    }

    /// Largest admissible step for this schedule and noise realization.
    ///
    /// Driven schedules must resolve the fastest coherent scale. Undriven
    /// schedules are integrated exactly between noise updates, so only the
    /// noise bandwidth limits the step.
    pub fn max_dt(&self, noise: &[NoiseTrajectory]) -> Result<f64> {
        let noise_dt = noise_limited_dt(noise);
        if !self.is_driven() {
            return Ok(noise_dt);
        }
        let mut w = self.static_hamiltonian().spectral_radius()?;
        let mut w_drive: f64 = 0.0;
        for d in &self.drive_terms {
            w += d.amplitude.abs() * d.op.spectral_radius()?;
            w_drive = w_drive.max(d.omega.abs());
        }
        let w_max = w.max(w_drive);
        Ok((TAU / (STEPS_PER_PERIOD * w_max)).min(noise_dt))
    }

    fn noise_for<'a>(&self, noise: &'a [NoiseTrajectory]) -> Result<Vec<Option<&'a NoiseTrajectory>>> {
        if noise.is_empty() {
            return Ok(vec![None; self.noise_couplings.len()]);
        }
        self.noise_couplings
            .iter()
            .map(|(c, _)| {
                noise
                    .iter()
                    .find(|tr| tr.channel == *c)
                    .map(Some)
                    .ok_or_else(|| invalid(format!("no trajectory for channel {c:?}")))
            })
            .collect()
    }
}

/// 200 steps per period of the fastest non-zero noise component; infinite
/// for silent noise.
pub fn noise_limited_dt(noise: &[NoiseTrajectory]) -> f64 {
    let w = noise
        .iter()
        .flat_map(|tr| {
            tr.omegas
                .iter()
                .zip(&tr.amplitudes)
                .filter(|(_, a)| **a != 0.0)
                .map(|(w, _)| *w)
        })
        .fold(0.0, f64::max);
    if w > 0.0 {
        TAU / (NOISE_STEPS_PER_PERIOD * w)
    } else {
        f64::INFINITY
    }
}

/// Step plan shared by the integrators.
struct Stepper<'a> {
    schedule: &'a PulseSchedule,
    h_static: Operator,
    samplers: Vec<Option<Sampler<'a>>>,
    h: f64,
    step: usize,
}

impl<'a> Stepper<'a> {
    fn new(schedule: &'a PulseSchedule, noise: &'a [NoiseTrajectory], h: f64) -> Result<Self> {
        let samplers = schedule
            .noise_for(noise)?
            .into_iter()
            .map(|tr| tr.filter(|t| !t.is_zero()).map(|t| t.sampler(0.5 * h, h)))
            .collect();
        Ok(Self {
            schedule,
            h_static: schedule.static_hamiltonian(),
            samplers,
            h,
            step: 0,
        })
    }

    fn next_unitary(&mut self) -> Result<Operator> {
        let t_mid = (self.step as f64 + 0.5) * self.h;
        let mut hm = self.h_static.clone();
        for d in &self.schedule.drive_terms {
            let c = d.coefficient(t_mid);
            if c != 0.0 {
                hm.add_scaled(c, &d.op);
            }
        }
        for (s, (_, op)) in self.samplers.iter_mut().zip(&self.schedule.noise_couplings) {
            if let Some(s) = s {
                hm.add_scaled(s.next_value(), op);
            }
        }
        self.step += 1;
        expm_i(&hm, self.h)
    }
}

fn step_count(duration: f64, dt: f64) -> usize {
    if duration <= 0.0 {
        0
    } else {
        ((duration / dt) - 1e-9).ceil().max(1.0) as usize
    }
}

fn check_dt(schedule: &PulseSchedule, noise: &[NoiseTrajectory], dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let max_dt = schedule.max_dt(noise)?;
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, max_dt });
    }
    Ok(())
}

/// Propagator of one noise realization.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub unitary: Operator,
    pub steps: usize,
}

/// U(T) for one realization; empty `noise` means noiseless.
pub fn propagator(
    schedule: &PulseSchedule,
    noise: &[NoiseTrajectory],
    dt: f64,
) -> Result<Propagation> {
    check_dt(schedule, noise, dt)?;
    let n = step_count(schedule.duration, dt);
    let mut u = Operator::identity(schedule.dim());
    if n == 0 {
        return Ok(Propagation { unitary: u, steps: 0 });
    }
    let mut st = Stepper::new(schedule, noise, schedule.duration / n as f64)?;
    for _ in 0..n {
        u = &st.next_unitary()? * &u;
    }
    Ok(Propagation { unitary: u, steps: n })
}

#[derive(Clone, Debug)]
pub enum State {
    Pure(Ket),
    Mixed(Operator),
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(k) => k.dim(),
            State::Mixed(r) => r.dim(),
        }
    }

    pub fn density(&self) -> Operator {
        match self {
            State::Pure(k) => k.density(),
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn evolve(&self, u: &Operator) -> Operator {
        match self {
            State::Pure(k) => u.apply(k).density(),
            State::Mixed(r) => r.conjugate_by(u),
        }
    }
}

impl From<Ket> for State {
    fn from(k: Ket) -> Self {
        State::Pure(k)
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    /// Final density matrix per trajectory, in trajectory order.
    pub final_states: Vec<Operator>,
    pub mean_density: Operator,
    pub step_count: usize,
    /// Largest ‖U†U − I‖ over trajectories.
    pub convergence_metric: f64,
    pub duration: f64,
}

pub fn propagate(
    schedule: &PulseSchedule,
    noise: &[NoiseTrajectory],
    initial: &State,
    dt: f64,
) -> Result<EvolutionResult> {
    if initial.dim() != schedule.dim() {
        return Err(invalid("initial state and schedule dimensions differ"));
    }
    let p = propagator(schedule, noise, dt)?;
    let rho = initial.evolve(&p.unitary);
    Ok(EvolutionResult {
        final_states: vec![rho.clone()],
        mean_density: rho,
        step_count: p.steps,
        convergence_metric: p.unitary.unitarity_defect(),
        duration: schedule.duration,
    })
}

/// Runs `f(traj)` for `traj in 0..n_traj` on the rayon pool; results are in
/// trajectory order whatever the completion order.
pub fn par_trajectories<T: Send>(
    n_traj: usize,
    f: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    (0..n_traj as u64).into_par_iter().map(f).collect()
}

/// Noise realization `traj` for the channels of `schedule`.
pub fn trajectory_noise(
    schedule: &PulseSchedule,
    spec: &NoiseSpec,
    master_seed: u64,
    traj: u64,
) -> Vec<NoiseTrajectory> {
    if spec.is_silent() {
        return Vec::new();
    }
    sample_channels(spec, &schedule.channels(), master_seed, traj)
}

pub fn monte_carlo(
    schedule: &PulseSchedule,
    spec: &NoiseSpec,
    n_traj: usize,
    master_seed: u64,
    initial: &State,
    dt: f64,
) -> Result<EvolutionResult> {
    if n_traj == 0 {
        return Err(Error::InsufficientStatistics { needed: 1, got: 0 });
    }
    spec.validate()?;
    if spec.is_silent() {
        let r = propagate(schedule, &[], initial, dt)?;
        return Ok(EvolutionResult {
            final_states: vec![r.mean_density.clone(); n_traj],
            ..r
        });
    }
    let runs = par_trajectories(n_traj, |i| {
        let noise = trajectory_noise(schedule, spec, master_seed, i);
        propagate(schedule, &noise, initial, dt)
    })?;
    let dim = schedule.dim();
    let mut mean = Operator::zeros(dim);
    let mut defect: f64 = 0.0;
    let mut finals = Vec::with_capacity(n_traj);
    for r in runs {
        mean.add_scaled(1.0 / n_traj as f64, &r.mean_density);
        defect = defect.max(r.convergence_metric);
        finals.push(r.mean_density);
    }
    Ok(EvolutionResult {
        final_states: finals,
        mean_density: mean,
        step_count: step_count(schedule.duration, dt),
        convergence_metric: defect,
        duration: schedule.duration,
    })
}

/// Frame transformation `exp(+i·G·ω·t)`.
#[derive(Clone, Debug)]
pub struct Frame {
    pub generator: Operator,
    pub frequency: f64,
}

impl Frame {
    pub fn unitary(&self, t: f64) -> Result<Operator> {
        expm_i(&self.generator, -self.frequency * t)
    }
}

pub fn rotating_frame(result: &EvolutionResult, frame: &Frame) -> Result<EvolutionResult> {
    if !frame.generator.is_hermitian(crate::opalg::HERMITIAN_TOL) {
        return Err(invalid("frame generator must be Hermitian"));
    }
    let u = frame.unitary(result.duration)?;
    let finals: Vec<Operator> = result.final_states.iter().map(|r| r.conjugate_by(&u)).collect();
    Ok(EvolutionResult {
        mean_density: result.mean_density.conjugate_by(&u),
        final_states: finals,
        ..result.clone()
    })
}

/// Evolves `initial` and returns the state at `t = i·record_dt` for
/// `i = 0 .. n_records`; the step is `record_dt / ⌈record_dt/dt⌉`.
pub fn evolve_recorded(
    schedule: &PulseSchedule,
    noise: &[NoiseTrajectory],
    initial: &Ket,
    record_dt: f64,
    n_records: usize,
    dt: f64,
) -> Result<Vec<Ket>> {
    if initial.dim() != schedule.dim() {
        return Err(invalid("initial state and schedule dimensions differ"));
    }
    check_dt(schedule, noise, dt)?;
    let sub = step_count(record_dt, dt).max(1);
    let mut st = Stepper::new(schedule, noise, record_dt / sub as f64)?;
    let mut psi = initial.clone();
    let mut out = Vec::with_capacity(n_records);
    out.push(psi.clone());
    for _ in 1..n_records {
        for _ in 0..sub {
            psi = st.next_unitary()?.apply(&psi);
        }
        out.push(psi.clone());
    }
    Ok(out)
}

/// Complex ⟨3|ρ|4⟩ of the encoded qubit on a uniform time grid.
#[derive(Clone, Debug)]
pub struct CoherenceRecord {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
}

/// Phase-only evolution of (|3⟩+|4⟩)/√2 under the second-order encoded
/// Hamiltonian `c(t)·Z` with
/// `c = −E_m + E_m(δV_x1² + δV_x2²)/2E_z² − (δV_z1 − δV_z2)²/2E_m`.
///
/// `noise` holds channels of qubits 0 and 1; missing channels are zero.
pub fn effective_encoded_evolution(
    p: &CircuitParams,
    noise: &[NoiseTrajectory],
    record_dt: f64,
    n_records: usize,
    dt: f64,
) -> Result<CoherenceRecord> {
    if (p.a0 - 1.0).abs() > 1e-15 || p.e_my != 0.0 || p.e_mz != 0.0 {
        return Err(invalid("effective encoded evolution requires a0 = 1 and pure xx coupling"));
    }
    let e_m = p.e_mx;
    if e_m == 0.0 {
        return Err(Error::SingularConfiguration("E_m = 0".into()));
    }
    if !(dt > 0.0 && record_dt > 0.0) {
        return Err(invalid("time steps must be positive"));
    }
    let sub = step_count(record_dt, dt).max(1);
    let h = record_dt / sub as f64;
    let find = |axis, q| noise.iter().find(|t| t.channel == Channel::new(axis, q) && !t.is_zero());
    let mut samplers: Vec<Option<Sampler>> = [
        (NoiseAxis::X, 0),
        (NoiseAxis::X, 1),
        (NoiseAxis::Z, 0),
        (NoiseAxis::Z, 1),
    ]
    .iter()
    .map(|&(a, q)| find(a, q).map(|t| t.sampler(0.5 * h, h)))
    .collect();
    let mut val = |i: usize| samplers[i].as_mut().map_or(0.0, |s| s.next_value());

    let kx = e_m / (2.0 * p.e_z * p.e_z);
    let kz = 1.0 / (2.0 * e_m);
    let mut phase = 0.0;
    let mut times = Vec::with_capacity(n_records);
    let mut values = Vec::with_capacity(n_records);
    for r in 0..n_records {
        if r > 0 {
            for _ in 0..sub {
                let (x1, x2, z1, z2) = (val(0), val(1), val(2), val(3));
                let c = -e_m + kx * (x1 * x1 + x2 * x2) - kz * (z1 - z2).powi(2);
                phase += 2.0 * c * h;
            }
        }
        times.push(r as f64 * record_dt);
        values.push(C64::from_polar(0.5, -phase));
    }
    Ok(CoherenceRecord { times, values })
}

/// max|λ| of the mean density's negative part, trace error and Hermiticity
/// error, for physicality checks.
pub fn density_defects(rho: &Operator) -> Result<(f64, f64, f64)> {
    let herm = rho.max_abs_diff(&rho.adjoint());
    let sym = (rho + &rho.adjoint()).scale(0.5);
    let min_eig = eig_hermitian(&sym)?.values[0];
    Ok(((-min_eig).max(0.0), (rho.trace().re - 1.0).abs(), herm))
}
