//! Coupled-qubit Hamiltonian, its encoded eigenbasis and the subspace projections.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::opalg::{pauli, Axis, Ket, Operator, C64, ZERO};
use crate::units::{ELEMENTARY_CHARGE, HBAR};

/// Physical energies of one coupled pair, all in rad/s.
///
/// `H0 = E_z(σ_z1 + a0·σ_z2) + E_mx σ_x1σ_x2 + E_my σ_y1σ_y2 + E_mz σ_z1σ_z2`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub e_z: f64,
    pub e_mx: f64,
    pub e_my: f64,
    pub e_mz: f64,
    pub a0: f64,
}

impl CircuitParams {
    /// Pure σ_xσ_x coupling of strength `e_m`, a0 = 1.
    pub fn new(e_z: f64, e_m: f64) -> Self {
        Self {
            e_z,
            e_mx: e_m,
            e_my: 0.0,
            e_mz: 0.0,
            a0: 1.0,
        }
    }

    pub fn with_a0(mut self, a0: f64) -> Self {
        self.a0 = a0;
        self
    }

    /// Sets E_my = E_mz = b0·E_mx.
    pub fn with_b0(mut self, b0: f64) -> Self {
        self.e_my = b0 * self.e_mx;
        self.e_mz = b0 * self.e_mx;
        self
    }

    /// b0 when the couplings have the E_my = E_mz = b0·E_mx form.
    pub fn b0(&self) -> Option<f64> {
        if self.e_mx != 0.0 && self.e_my == self.e_mz {
            Some(self.e_my / self.e_mx)
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_z > 0.0) {
            return Err(invalid(format!("E_z must be positive, got {}", self.e_z)));
        }
        if !((self.a0 - 1.0).abs() < 0.5) {
            return Err(invalid(format!("a0 must satisfy |a0 - 1| < 0.5, got {}", self.a0)));
        }
        if ![self.e_mx, self.e_my, self.e_mz].iter().all(|x| x.is_finite()) {
            return Err(invalid("coupling energies must be finite"));
        }
        Ok(())
    }
}

/// b0 of the SQUID realization, where E_my = E_mz = −E_J2/4.
pub fn b0_from_squid(e_j2: f64, e_m: f64) -> Result<f64> {
    if e_m == 0.0 {
        return Err(Error::SingularConfiguration("E_m = 0".into()));
    }
    Ok(-e_j2 / (4.0 * e_m))
}

/// Eigenstates of `H0` in the labelling |1⟩, |2⟩, |3⟩, |4⟩.
///
/// |1⟩, |2⟩ span {|↑↑⟩, |↓↓⟩}; |3⟩, |4⟩ span the single-excitation block and
/// form the encoded qubit.
#[derive(Clone, Debug)]
pub struct EncodedBasis {
    pub states: [Ket; 4],
    pub energies: [f64; 4],
    pub theta: f64,
    pub phi: f64,
    pub varphi: f64,
    pub e_mn: f64,
}

impl EncodedBasis {
    pub fn state(&self, label: usize) -> &Ket {
        &self.states[label - 1]
    }

    pub fn energy(&self, label: usize) -> f64 {
        self.energies[label - 1]
    }

    /// ε4 − ε3
    pub fn splitting(&self) -> f64 {
        self.energies[3] - self.energies[2]
    }

    pub fn encoded(&self) -> [&Ket; 2] {
        [&self.states[2], &self.states[3]]
    }
}

pub fn build_h0(p: &CircuitParams) -> Operator {
    let op = |a, s| pauli(a, s, 2).expect("two-qubit pauli");
    let mut h = Operator::zeros(4);
    h.add_scaled(p.e_z, &op(Axis::Z, 0));
    h.add_scaled(p.e_z * p.a0, &op(Axis::Z, 1));
    for (e, axis) in [(p.e_mx, Axis::X), (p.e_my, Axis::Y), (p.e_mz, Axis::Z)] {
        if e != 0.0 {
            h.add_scaled(e, &(op(axis, 0) * op(axis, 1)));
        }
    }
    h
}

/// Closed-form eigenbasis of `H0`.
///
/// Both blocks of `H0` are 2×2, so the basis is analytic for every
/// combination of a0 and couplings; the rotation of |3⟩, |4⟩ by `varphi`
/// carries the a0 ≠ 1 spread.
pub fn encoded_basis(p: &CircuitParams) -> Result<EncodedBasis> {
    p.validate()?;
    if p.e_mx == 0.0 && p.e_my == 0.0 {
        return Err(Error::NoProtectedSubspace);
    }
    Ok(reference_basis(p))
}

/// As `encoded_basis` but without the protected-subspace check; at
/// E_mx = E_my = 0 it returns the uncoupled product states with the same labels.
pub fn reference_basis(p: &CircuitParams) -> EncodedBasis {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let mix = p.e_mx - p.e_my;
    let sum = p.e_mx + p.e_my;
    let zz = (1.0 + p.a0) * p.e_z;
    let theta = mix.atan2(zz);
    let r = zz.hypot(mix);
    let (sh, ch) = (theta / 2.0).sin_cos();

    let d = (p.a0 - 1.0) * p.e_z;
    let e_mn = d.hypot(sum);
    let varphi = if e_mn > 0.0 { 0.5 * (d / e_mn).asin() } else { 0.0 };
    let (sv, cv) = varphi.sin_cos();

    let anti = Ket::from_real(&[0.0, -s2, s2, 0.0]);
    let sym = Ket::from_real(&[0.0, s2, s2, 0.0]);
    let k3 = anti.scale_c(C64::new(cv, 0.0)).add_scaled(C64::new(-sv, 0.0), &sym);
    let k4 = anti.scale_c(C64::new(sv, 0.0)).add_scaled(C64::new(cv, 0.0), &sym);

    // With sum < 0 the antisymmetric state is the upper one.
    let (e3, e4) = if sum >= 0.0 {
        (-p.e_mz - e_mn, -p.e_mz + e_mn)
    } else {
        (-p.e_mz + e_mn, -p.e_mz - e_mn)
    };

    EncodedBasis {
        states: [
            Ket::from_real(&[-sh, 0.0, 0.0, ch]),
            Ket::from_real(&[ch, 0.0, 0.0, sh]),
            k3,
            k4,
        ],
        energies: [p.e_mz - r, p.e_mz + r, e3, e4],
        theta,
        phi: theta / 2.0 + FRAC_PI_4,
        varphi,
        e_mn,
    }
}

/// P_e = |3⟩⟨3| + |4⟩⟨4|
pub fn projector_encoded(basis: &EncodedBasis) -> Operator {
    Operator::projector(&basis.encoded())
}

/// Encoded Pauli embedded in the 4-dim space; `Axis::I` gives P_e.
pub fn encoded_pauli(which: Axis, basis: &EncodedBasis) -> Operator {
    embed(&which.matrix(), &basis.encoded())
}

/// Σ_ij m_ij |k_i⟩⟨k_j|
pub fn embed(m: &Operator, kets: &[&Ket]) -> Operator {
    assert_eq!(m.dim(), kets.len(), "block size must match ket count");
    let dim = kets[0].dim();
    let mut out = Operator::zeros(dim);
    for (i, ki) in kets.iter().enumerate() {
        for (j, kj) in kets.iter().enumerate() {
            let c = m.get(i, j);
            if c != ZERO {
                out = out + Operator::outer(ki, kj).scale_c(c);
            }
        }
    }
    out
}

/// ⟨k_i|op|k_j⟩
pub fn restrict(op: &Operator, kets: &[&Ket]) -> Result<Operator> {
    if kets.iter().any(|k| k.dim() != op.dim()) {
        return Err(invalid("operator and kets have different dimensions"));
    }
    let n = kets.len();
    Ok(Operator::from_fn(n, |i, j| op.element(kets[i], kets[j])))
}

/// 2×2 block of `op` on {|3⟩, |4⟩}.
pub fn project(op: &Operator, basis: &EncodedBasis) -> Result<Operator> {
    if op.dim() != 4 {
        return Err(invalid(format!("project expects a 4-dim operator, got {}", op.dim())));
    }
    restrict(op, &basis.encoded())
}

/// Coefficient of (δV_z1 − δV_z2)·Z induced by a0 ≠ 1.
pub fn residual_coupling(p: &CircuitParams) -> Result<f64> {
    let d = (p.a0 - 1.0) * p.e_z;
    let e_mn = d.hypot(p.e_mx + p.e_my);
    if e_mn == 0.0 {
        return Err(Error::SingularConfiguration("E_m,n = 0".into()));
    }
    Ok(d / e_mn)
}

/// σ_xσ_x coupling of two capacitively coupled charge qubits, in rad/s.
pub fn charge_qubit_em(c_m: f64, c_j: f64, c_g: f64) -> Result<f64> {
    if !(c_m > 0.0 && c_j > 0.0 && c_g > 0.0) {
        return Err(invalid("capacitances must be positive"));
    }
    let c_sigma = c_m + c_j + c_g;
    let denom = c_sigma * c_sigma - c_m * c_m;
    if !(denom > 0.0) {
        return Err(invalid("non-positive capacitance determinant"));
    }
    Ok(c_m * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / denom / HBAR)
}
