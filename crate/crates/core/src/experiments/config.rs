//! Experiment configuration. Energies are given in GHz and noise
//! frequencies in Hz (linear frequency); both are converted to rad/s here.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::Coupling;
use crate::model::CircuitParams;
use crate::noise::NoiseSpec;
use crate::units::{ghz, hz};

fn eta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitSection {
    pub e_z_ghz: f64,
    /// E_m/E_z ratios of the dephasing sweep.
    pub em_ratios: Vec<f64>,
    /// E_m/E_z ratios of the F_x grid.
    pub fx_em_ratios: Vec<f64>,
    /// Spread ratios of the second qubit; 1 means identical qubits.
    pub a0: Vec<f64>,
    /// E_my = E_mz = b0·E_mx couplings; empty means pure xx coupling.
    pub b0: Vec<f64>,
    /// Couplings of the two encoded pairs of the two-qubit gate.
    pub e_m1_ghz: f64,
    pub e_m2_ghz: f64,
}

impl Default for CircuitSection {
    fn default() -> Self {
        Self {
            e_z_ghz: 5.0,
            em_ratios: vec![0.2, 0.4, 0.7, 1.0],
            fx_em_ratios: vec![0.0, 0.2, 0.4, 0.7, 1.0],
            a0: vec![1.0],
            b0: Vec::new(),
            e_m1_ghz: 5.0,
            e_m2_ghz: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    /// A/E_z.
    pub amplitude_over_ez: f64,
    /// η grid of the dephasing sweep, rad.
    pub eta_dephasing: Vec<f64>,
    /// η grid of the fidelity sweeps, rad.
    pub eta_gates: Vec<f64>,
    pub omega_ir_hz: f64,
    pub omega_uv_hz: f64,
    pub delta_omega_hz: f64,
    /// Multiplies every component variance; 1 for calibrated noise.
    pub variance_scale: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            amplitude_over_ez: 2e-4,
            eta_dephasing: eta_grid(9),
            eta_gates: eta_grid(5),
            omega_ir_hz: 1.0,
            omega_uv_hz: 1e5,
            delta_omega_hz: 100.0,
            variance_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatesSection {
    pub lambda_ghz: f64,
    pub lambda_c_ghz: f64,
    pub lambda_p_ghz: f64,
    pub e_cc_ghz: Vec<f64>,
    pub e_jc_ghz: f64,
    /// Rotation angle of the single-qubit gate.
    pub theta: f64,
}

impl Default for GatesSection {
    fn default() -> Self {
        Self {
            lambda_ghz: 0.3,
            lambda_c_ghz: 0.3,
            lambda_p_ghz: 0.05,
            e_cc_ghz: vec![0.0, 0.05, 0.1],
            e_jc_ghz: 0.0,
            theta: PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub n_traj: usize,
    pub dt_ps: f64,
    /// Mandatory; may come from the command line instead.
    pub seed: Option<u64>,
    pub out: Option<String>,
    /// First coherence window of the T₂ search, ns.
    pub dephasing_start_ns: f64,
    /// Adds an A = 0 row per E_m to the F_x grid.
    pub include_noiseless: bool,
    /// Trajectories of the spectral calibration check.
    pub psd_traj: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n_traj: 100,
            dt_ps: 0.5,
            seed: None,
            out: None,
            dephasing_start_ns: 10.0,
            include_noiseless: true,
            psd_traj: 200,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub circuit: CircuitSection,
    pub noise: NoiseSection,
    pub gates: GatesSection,
    pub run: RunSection,
}

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(field_err(field, format!("must be positive and finite, got {x}")))
    }
}

fn non_empty(field: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(field_err(field, "grid must not be empty"));
    }
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(field_err(field, format!("non-finite entry {x}")));
    }
    Ok(())
}

fn etas(field: &str, xs: &[f64]) -> Result<()> {
    non_empty(field, xs)?;
    match xs.iter().find(|x| !(0.0..=FRAC_PI_2 + 1e-12).contains(*x)) {
        Some(x) => Err(field_err(field, format!("eta {x} outside [0, pi/2]"))),
        None => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.circuit;
        positive("circuit.e_z_ghz", c.e_z_ghz)?;
        non_empty("circuit.em_ratios", &c.em_ratios)?;
        non_empty("circuit.fx_em_ratios", &c.fx_em_ratios)?;
        non_empty("circuit.a0", &c.a0)?;
        if let Some(r) = c.em_ratios.iter().chain(&c.fx_em_ratios).find(|r| **r < 0.0) {
            return Err(field_err("circuit.em_ratios", format!("negative ratio {r}")));
        }
        if let Some(a) = c.a0.iter().find(|a| !(**a > 0.5 && **a < 1.5)) {
            return Err(field_err("circuit.a0", format!("a0 {a} outside (0.5, 1.5)")));
        }
        if c.b0.iter().any(|b| !b.is_finite()) {
            return Err(field_err("circuit.b0", "non-finite entry"));
        }
        positive("circuit.e_m1_ghz", c.e_m1_ghz)?;
        positive("circuit.e_m2_ghz", c.e_m2_ghz)?;
        if c.e_m1_ghz == c.e_m2_ghz {
            return Err(field_err("circuit.e_m2_ghz", "E_m1 and E_m2 must differ"));
        }

        let n = &self.noise;
        if !(n.amplitude_over_ez >= 0.0 && n.amplitude_over_ez.is_finite()) {
            return Err(field_err("noise.amplitude_over_ez", "must be finite and non-negative"));
        }
        etas("noise.eta_dephasing", &n.eta_dephasing)?;
        etas("noise.eta_gates", &n.eta_gates)?;
        positive("noise.omega_ir_hz", n.omega_ir_hz)?;
        positive("noise.delta_omega_hz", n.delta_omega_hz)?;
        if !(n.omega_uv_hz > n.omega_ir_hz) {
            return Err(field_err("noise.omega_uv_hz", "must exceed omega_ir_hz"));
        }
        if !(n.variance_scale >= 0.0 && n.variance_scale.is_finite()) {
            return Err(field_err("noise.variance_scale", "must be finite and non-negative"));
        }

        let g = &self.gates;
        positive("gates.lambda_ghz", g.lambda_ghz)?;
        positive("gates.lambda_c_ghz", g.lambda_c_ghz)?;
        positive("gates.lambda_p_ghz", g.lambda_p_ghz)?;
        non_empty("gates.e_cc_ghz", &g.e_cc_ghz)?;
        if !g.e_jc_ghz.is_finite() {
            return Err(field_err("gates.e_jc_ghz", "must be finite"));
        }
        positive("gates.theta", g.theta)?;

        let r = &self.run;
        if r.n_traj == 0 {
            return Err(field_err("run.n_traj", "must be at least 1"));
        }
        positive("run.dt_ps", r.dt_ps)?;
        positive("run.dephasing_start_ns", r.dephasing_start_ns)?;
        if r.psd_traj < 200 {
            return Err(field_err("run.psd_traj", "spectral check needs at least 200 trajectories"));
        }
        Ok(())
    }

    /// The master seed; there is no wall-clock fallback.
    pub fn seed(&self) -> Result<u64> {
        self.run
            .seed
            .ok_or_else(|| field_err("run.seed", "a master seed is required (config or --seed)"))
    }

    pub fn e_z(&self) -> f64 {
        ghz(self.circuit.e_z_ghz)
    }

    pub fn dt(&self) -> f64 {
        self.run.dt_ps * 1e-12
    }

    pub fn lambda(&self) -> f64 {
        ghz(self.gates.lambda_ghz)
    }

    pub fn lambda_p(&self) -> f64 {
        ghz(self.gates.lambda_p_ghz)
    }

    pub fn noise_spec(&self, eta: f64) -> NoiseSpec {
        let n = &self.noise;
        NoiseSpec {
            amplitude: n.amplitude_over_ez * self.e_z(),
            eta,
            omega_ir: hz(n.omega_ir_hz),
            omega_uv: hz(n.omega_uv_hz),
            delta_omega: hz(n.delta_omega_hz),
            variance_scale: n.variance_scale,
        }
    }

    /// A pair with E_m = ratio·E_z.
    pub fn pair(&self, ratio: f64) -> CircuitParams {
        CircuitParams::new(self.e_z(), ratio * self.e_z())
    }

    pub fn two_qubit_pairs(&self) -> (CircuitParams, CircuitParams) {
        (
            CircuitParams::new(self.e_z(), ghz(self.circuit.e_m1_ghz)),
            CircuitParams::new(self.e_z(), ghz(self.circuit.e_m2_ghz)),
        )
    }

    pub fn coupling(&self, e_cc_ghz: f64) -> Coupling {
        Coupling {
            lambda_c: ghz(self.gates.lambda_c_ghz),
            e_cc: ghz(e_cc_ghz),
            e_jc: ghz(self.gates.e_jc_ghz),
        }
    }
}
