//! Process reconstruction on the encoded subspace and the gate fidelities.

use std::io::Write;

use crate::dynamics::{par_trajectories, trajectory_noise};
use crate::error::{invalid, Error, Result};
use crate::gates::GateProtocol;
use crate::model::restrict;
use crate::noise::NoiseSpec;
use crate::opalg::{tensor, Axis, Operator};
use crate::stats::mean_stderr;

const PAULI: [(Axis, char); 4] = [(Axis::I, 'I'), (Axis::X, 'X'), (Axis::Y, 'Y'), (Axis::Z, 'Z')];

/// Encoded-subspace process ε(Σ) = P†·U·Σ·U†·P, per noise realization.
#[derive(Clone, Debug)]
pub struct ProcessMap {
    pub gate: String,
    pub labels: Vec<String>,
    /// Inputs in the encoded representation.
    pub inputs: Vec<Operator>,
    /// Trajectory-averaged outputs, aligned with `inputs`.
    pub outputs: Vec<Operator>,
    /// outputs of each trajectory, `[traj][input]`.
    pub per_traj: Vec<Vec<Operator>>,
    pub n_traj: usize,
    pub master_seed: u64,
}

/// Mean and standard error of a per-trajectory quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Pauli-product basis for `n` encoded qubits with labels such as "XY".
pub fn pauli_basis(n_qubits: usize) -> (Vec<String>, Vec<Operator>) {
    let mut labels = vec![String::new()];
    let mut ops = vec![Operator::identity(1)];
    for _ in 0..n_qubits {
        let mut nl = Vec::new();
        let mut no = Vec::new();
        for (l, o) in labels.iter().zip(&ops) {
            for (a, c) in PAULI {
                nl.push(format!("{l}{c}"));
                no.push(tensor(o, &a.matrix()));
            }
        }
        labels = nl;
        ops = no;
    }
    (labels, ops)
}

fn encoded_qubits(protocol: &GateProtocol) -> Result<usize> {
    match (protocol.dim(), protocol.subspace.len()) {
        (4, 2) => Ok(1),
        (16, 4) => Ok(2),
        (d, k) => Err(invalid(format!(
            "process reconstruction needs a 4-dim or 16-dim protocol with a 2- or 4-dim subspace, got {d} and {k}"
        ))),
    }
}

/// Reconstructs ε on the encoded Pauli basis.
pub fn reconstruct_process(
    protocol: &GateProtocol,
    spec: &NoiseSpec,
    n_traj: usize,
    master_seed: u64,
    dt: f64,
) -> Result<ProcessMap> {
    let (labels, inputs) = pauli_basis(encoded_qubits(protocol)?);
    reconstruct_process_with(protocol, spec, n_traj, master_seed, dt, labels, inputs)
}

/// As [`reconstruct_process`] with caller-supplied inputs.
///
/// Every input sees the same noise realization within a trajectory.
pub fn reconstruct_process_with(
    protocol: &GateProtocol,
    spec: &NoiseSpec,
    n_traj: usize,
    master_seed: u64,
    dt: f64,
    labels: Vec<String>,
    inputs: Vec<Operator>,
) -> Result<ProcessMap> {
    let d = protocol.subspace.len();
    encoded_qubits(protocol)?;
    if inputs.iter().any(|s| s.dim() != d) || labels.len() != inputs.len() {
        return Err(invalid("process inputs must match the encoded dimension and labels"));
    }
    if n_traj == 0 {
        return Err(Error::InsufficientStatistics { needed: 1, got: 0 });
    }
    spec.validate()?;
    let kets = protocol.subspace_refs();
    let per_traj = if spec.is_silent() {
        let v = restrict(&protocol.rotating_propagator(&[], dt)?, &kets)?;
        let out: Vec<Operator> = inputs.iter().map(|s| s.conjugate_by(&v)).collect();
        vec![out; n_traj]
    } else {
        par_trajectories(n_traj, |i| {
            let noise = trajectory_noise(&protocol.schedule, spec, master_seed, i);
            let v = restrict(&protocol.rotating_propagator(&noise, dt)?, &kets)?;
            Ok(inputs.iter().map(|s| s.conjugate_by(&v)).collect::<Vec<_>>())
        })?
    };
    let mut outputs = vec![Operator::zeros(d); inputs.len()];
    let w = 1.0 / n_traj as f64;
    for traj in &per_traj {
        for (acc, o) in outputs.iter_mut().zip(traj) {
            acc.add_scaled(w, o);
        }
    }
    Ok(ProcessMap {
        gate: protocol.name.to_string(),
        labels,
        inputs,
        outputs,
        per_traj,
        n_traj,
        master_seed,
    })
}

impl ProcessMap {
    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, |o| o.dim())
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| invalid(format!("process has no `{label}` input")))
    }

    /// Builds a map from explicit outputs, e.g. an ideal or injected process.
    pub fn from_outputs(labels: Vec<String>, inputs: Vec<Operator>, outputs: Vec<Operator>) -> Self {
        Self {
            gate: "injected".into(),
            labels,
            inputs,
            per_traj: vec![outputs.clone()],
            outputs,
            n_traj: 1,
            master_seed: 0,
        }
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "input,row,col,re,im")?;
        for (l, o) in self.labels.iter().zip(&self.outputs) {
            for i in 0..o.dim() {
                for j in 0..o.dim() {
                    let z = o.get(i, j);
                    writeln!(w, "{l},{i},{j},{:.8e},{:.8e}", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Ideal process `ε(Σ) = U Σ U†` on the encoded Pauli basis of `target`.
pub fn ideal_process(target: &Operator) -> ProcessMap {
    let n = if target.dim() == 2 { 1 } else { 2 };
    let (labels, inputs) = pauli_basis(n);
    let outputs = inputs.iter().map(|s| s.conjugate_by(target)).collect();
    ProcessMap::from_outputs(labels, inputs, outputs)
}

fn term(target: &Operator, input: &Operator, output: &Operator) -> f64 {
    input.conjugate_by(target).hs_inner(output).re
}

fn fx_of(target: &Operator, p: &ProcessMap, outs: &[Operator]) -> Result<f64> {
    let mut sum = 0.0;
    for l in ["X", "Y", "Z"] {
        let k = p.index_of(l)?;
        sum += term(target, &p.inputs[k], &outs[k]);
    }
    Ok(0.5 + sum / 12.0)
}

fn fc_of(target: &Operator, p: &ProcessMap, outs: &[Operator]) -> Result<f64> {
    let mut sum = 0.0;
    for (_, a) in PAULI {
        for (_, b) in PAULI {
            let l: String = [a, b].iter().collect();
            let k = p.index_of(&l)?;
            sum += term(target, &p.inputs[k], &outs[k]);
        }
    }
    Ok(0.2 + sum / 80.0)
}

fn check_dims(target: &Operator, p: &ProcessMap, d: usize) -> Result<()> {
    if target.dim() != d || p.dim() != d {
        return Err(invalid(format!("fidelity expects {d}-dim target and process")));
    }
    Ok(())
}

/// F_x = 1/2 + (1/12)·Σ_{X,Y,Z} Tr(UΣU†·ε(Σ)).
pub fn fidelity_x(target: &Operator, p: &ProcessMap) -> Result<f64> {
    check_dims(target, p, 2)?;
    fx_of(target, p, &p.outputs)
}

/// F_C = 1/5 + (1/80)·Σ over all 16 Pauli pairs, identities included.
pub fn fidelity_c(target: &Operator, p: &ProcessMap) -> Result<f64> {
    check_dims(target, p, 4)?;
    fc_of(target, p, &p.outputs)
}

/// F_x or F_C by dimension, with the standard error over trajectories.
pub fn fidelity_estimate(target: &Operator, p: &ProcessMap) -> Result<Estimate> {
    let f = match p.dim() {
        2 => fx_of,
        4 => fc_of,
        d => return Err(invalid(format!("no fidelity formula for dimension {d}"))),
    };
    check_dims(target, p, p.dim())?;
    let per: Vec<f64> = p.per_traj.iter().map(|o| f(target, p, o)).collect::<Result<_>>()?;
    let (_, stderr) = mean_stderr(&per);
    Ok(Estimate {
        value: f(target, p, &p.outputs)?,
        stderr,
    })
}

/// 1 − Tr ε(I)/d
pub fn leakage(p: &ProcessMap) -> Result<f64> {
    let label = "I".repeat(if p.dim() == 2 { 1 } else { 2 });
    let k = p.index_of(&label)?;
    Ok(1.0 - p.outputs[k].trace().re / p.dim() as f64)
}
