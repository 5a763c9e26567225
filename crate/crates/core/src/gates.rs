//! Pulse protocols for encoded-qubit gates, preparation and readout.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use log::warn;

use crate::dynamics::{propagator, DriveTerm, Frame, PulseSchedule};
use crate::error::{invalid, Error, Result};
use crate::model::{build_h0, embed, encoded_basis, reference_basis, CircuitParams, EncodedBasis};
use crate::noise::NoiseTrajectory;
use crate::opalg::{expm_i, pauli, tensor, Axis, Ket, Operator, I, ZERO};

/// A schedule together with what it should do.
///
/// `target` acts on span(`subspace`) and is written in that ket basis; it is
/// compared with the simulated propagator after undoing `frame`.
#[derive(Clone, Debug)]
pub struct GateProtocol {
    pub name: &'static str,
    pub schedule: PulseSchedule,
    pub target: Operator,
    pub frame: Frame,
    pub subspace: Vec<Ket>,
}

impl GateProtocol {
    pub fn dim(&self) -> usize {
        self.schedule.dim()
    }

    pub fn subspace_refs(&self) -> Vec<&Ket> {
        self.subspace.iter().collect()
    }

    pub fn projector(&self) -> Operator {
        Operator::projector(&self.subspace_refs())
    }

    /// `target` on the subspace, identity on its complement.
    pub fn target_full(&self) -> Operator {
        let p = self.projector();
        embed(&self.target, &self.subspace_refs()) + (Operator::identity(self.dim()) - p)
    }

    /// Frame-corrected propagator `exp(+iG·ω·T)·U(T)`.
    pub fn rotating_propagator(&self, noise: &[NoiseTrajectory], dt: f64) -> Result<Operator> {
        let u = propagator(&self.schedule, noise, dt)?.unitary;
        Ok(&self.frame.unitary(self.schedule.duration)? * &u)
    }
}

/// Drive amplitude for a resonant coupling of strength `lambda`: the cosine
/// splits into two rotating halves unless it is static.
fn resonant_amplitude(lambda: f64, omega: f64) -> f64 {
    if omega == 0.0 {
        lambda
    } else {
        2.0 * lambda
    }
}

fn check_rwa(lambda: f64, omega: f64) {
    if omega != 0.0 && lambda > omega.abs() / 10.0 {
        warn!(
            "drive strength {lambda:.3e} rad/s exceeds a fifth of E_m ({:.3e} rad/s); rotating-wave error will be large",
            omega.abs() / 2.0
        );
    }
}

/// Basis used for gate construction; falls back to the uncoupled labelling
/// when there is no transverse coupling.
fn gate_basis(p: &CircuitParams) -> Result<EncodedBasis> {
    p.validate()?;
    match encoded_basis(p) {
        Err(Error::NoProtectedSubspace) => Ok(reference_basis(p)),
        other => other,
    }
}

fn pair_frame(h0: &Operator, e_z: f64) -> Frame {
    Frame {
        generator: h0.scale(1.0 / e_z),
        frequency: e_z,
    }
}

fn single_pair_schedule(p: &CircuitParams, duration: f64) -> Result<PulseSchedule> {
    let mut s = PulseSchedule::new(4, duration).with_pauli_noise(&[0, 1], 2)?;
    s.add_static(build_h0(p), 1.0)?;
    Ok(s)
}

/// exp(iθA/2) for a 2×2 Pauli matrix `a`.
fn rotation(a: Axis, theta: f64) -> Operator {
    Operator::identity(2).scale((theta / 2.0).cos()) + a.matrix().scale_c(I * (theta / 2.0).sin())
}

/// U_x(θ) = exp(iθX/2): drive 2λ·cos(ε₄₃t)·σ_z1 for θ/2λ.
pub fn x_gate(p: &CircuitParams, theta: f64, lambda: f64) -> Result<GateProtocol> {
    if !(theta > 0.0) {
        return Err(invalid(format!("x_gate needs theta > 0, got {theta}")));
    }
    if !(lambda > 0.0) {
        return Err(invalid("drive strength must be positive"));
    }
    let b = gate_basis(p)?;
    let omega = b.splitting();
    check_rwa(lambda, omega);
    let duration = theta / (2.0 * lambda);
    let mut s = single_pair_schedule(p, duration)?;
    s.add_drive(DriveTerm {
        op: pauli(Axis::Z, 0, 2)?,
        amplitude: resonant_amplitude(lambda, omega),
        omega,
        phase: 0.0,
        window: None,
    })?;
    Ok(GateProtocol {
        name: "xgate",
        schedule: s,
        target: rotation(Axis::X, theta),
        frame: pair_frame(&build_h0(p), p.e_z),
        subspace: b.encoded().map(Ket::clone).to_vec(),
    })
}

/// U_z(θ) = exp(iθZ/2), up to a global phase: static λ(σ_y1σ_y2 + σ_z1σ_z2) for θ/2λ.
pub fn z_gate(p: &CircuitParams, theta: f64, lambda: f64) -> Result<GateProtocol> {
    if !(theta >= 0.0) {
        return Err(invalid(format!("z_gate needs theta >= 0, got {theta}")));
    }
    if !(lambda > 0.0) {
        return Err(invalid("drive strength must be positive"));
    }
    let b = gate_basis(p)?;
    let duration = theta / (2.0 * lambda);
    let mut s = single_pair_schedule(p, duration)?;
    if theta > 0.0 {
        let yy = pauli(Axis::Y, 0, 2)? * pauli(Axis::Y, 1, 2)?;
        let zz = pauli(Axis::Z, 0, 2)? * pauli(Axis::Z, 1, 2)?;
        s.add_drive(DriveTerm {
            op: yy + zz,
            amplitude: resonant_amplitude(lambda, 0.0),
            omega: 0.0,
            phase: 0.0,
            window: None,
        })?;
    }
    Ok(GateProtocol {
        name: "zgate",
        schedule: s,
        target: rotation(Axis::Z, theta),
        frame: pair_frame(&build_h0(p), p.e_z),
        subspace: b.encoded().map(Ket::clone).to_vec(),
    })
}

/// Register sites of the two-pair system: σ1, σ2, τ1, τ2.
pub const SIGMA1: usize = 0;
pub const SIGMA2: usize = 1;
pub const TAU1: usize = 2;
pub const TAU2: usize = 3;

/// Coupling strengths of the inter-pair interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub lambda_c: f64,
    pub e_cc: f64,
    pub e_jc: f64,
}

/// Product basis |a⟩⊗|b⟩ of two pairs' encoded states, first pair significant.
pub fn two_pair_subspace(b1: &EncodedBasis, b2: &EncodedBasis) -> Vec<Ket> {
    let mut out = Vec::with_capacity(4);
    for a in b1.encoded() {
        for b in b2.encoded() {
            out.push(a.tensor(b));
        }
    }
    out
}

/// U_C = exp[−iπ(X₁X₂ + Y₁Y₂)/4]: drive 2λ_c·cos(ω_d t)·σ_z2τ_z2 at the
/// difference of the encoded splittings for π/2λ_c. Non-zero `e_cc`, `e_jc`
/// add `E_cc σ_x2τ_x2 − (E_Jc/4)(σ_z2τ_z2 + σ_y2τ_y2)` under the same modulation.
pub fn two_qubit_gate(p1: &CircuitParams, p2: &CircuitParams, c: Coupling) -> Result<GateProtocol> {
    if !(c.lambda_c > 0.0) {
        return Err(invalid("lambda_c must be positive"));
    }
    let b1 = encoded_basis(p1)?;
    let b2 = encoded_basis(p2)?;
    let omega = b1.splitting() - b2.splitting();
    if omega.abs() <= 1e-9 * b1.splitting().abs().max(b2.splitting().abs()) {
        return Err(Error::DegenerateDrive);
    }
    check_rwa(c.lambda_c, omega);
    let duration = PI / (2.0 * c.lambda_c);
    let id4 = Operator::identity(4);
    let h0 = tensor(&build_h0(p1), &id4) + tensor(&id4, &build_h0(p2));
    let mut s = PulseSchedule::new(16, duration).with_pauli_noise(&[SIGMA1, SIGMA2, TAU1, TAU2], 4)?;
    s.add_static(h0.clone(), 1.0)?;
    let pp = |a| -> Result<Operator> { Ok(pauli(a, SIGMA2, 4)? * pauli(a, TAU2, 4)?) };
    let zz = pp(Axis::Z)?;
    let mut drive = |op: Operator, amplitude: f64| -> Result<()> {
        if amplitude != 0.0 {
            s.add_drive(DriveTerm { op, amplitude, omega, phase: 0.0, window: None })?;
        }
        Ok(())
    };
    drive(zz.clone(), resonant_amplitude(c.lambda_c, omega))?;
    drive(pp(Axis::X)?, c.e_cc)?;
    drive((zz + pp(Axis::Y)?).scale(-1.0), c.e_jc / 4.0)?;

    let xx = tensor(&Axis::X.matrix(), &Axis::X.matrix());
    let yy = tensor(&Axis::Y.matrix(), &Axis::Y.matrix());
    let target = expm_i(&(xx + yy), PI / 4.0)?;
    Ok(GateProtocol {
        name: "cgate",
        schedule: s,
        target,
        frame: pair_frame(&h0, p1.e_z),
        subspace: two_pair_subspace(&b1, &b2),
    })
}

/// |1⟩ → |3⟩: drive 2λ_p·cos[(ε₃ − ε₁)t]·σ_x1 for π/(2λ_p·sin(θ/2 + π/4)).
///
/// The subspace is {|1⟩, |3⟩} and the target the resonant π pulse on it.
pub fn prepare_encoded(p: &CircuitParams, lambda_p: f64) -> Result<GateProtocol> {
    if !(lambda_p > 0.0) {
        return Err(invalid("lambda_p must be positive"));
    }
    let b = encoded_basis(p)?;
    let omega = b.energy(3) - b.energy(1);
    check_rwa(lambda_p, omega);
    let duration = PI / (2.0 * lambda_p * b.phi.sin());
    let mut s = single_pair_schedule(p, duration)?;
    s.add_drive(DriveTerm {
        op: pauli(Axis::X, 0, 2)?,
        amplitude: resonant_amplitude(lambda_p, omega),
        omega,
        phase: 0.0,
        window: None,
    })?;
    Ok(GateProtocol {
        name: "prep",
        schedule: s,
        target: Operator::from_rows(2, &[ZERO, I, I, ZERO]),
        frame: pair_frame(&build_h0(p), p.e_z),
        subspace: vec![b.state(1).clone(), b.state(3).clone()],
    })
}

/// exp(−iπX/4) via `x_gate(3π/2)`, then free evolution until the encoded
/// phase ε₄₃·T reaches π/2 (mod 2π), so that |3⟩ → |↑↓⟩ and |4⟩ → |↓↑⟩ in
/// the lab frame.
pub fn readout_map(p: &CircuitParams, lambda: f64) -> Result<GateProtocol> {
    let mut g = x_gate(p, 3.0 * FRAC_PI_2, lambda)?;
    let t_pulse = g.schedule.duration;
    let omega = gate_basis(p)?.splitting();
    let total = if omega > 0.0 {
        let k = ((omega * t_pulse - FRAC_PI_2) / TAU).ceil().max(0.0);
        (FRAC_PI_2 + TAU * k) / omega
    } else {
        t_pulse
    };
    for d in g.schedule.drive_terms.iter_mut() {
        d.window = Some((0.0, t_pulse));
    }
    g.schedule.duration = total;
    g.name = "readout";
    Ok(g)
}

/// Lab-frame ⟨σ_z1⟩, ⟨σ_z2⟩ after running `readout` (from `readout_map`) on `state`.
pub fn readout_signal(readout: &GateProtocol, state: &Ket, dt: f64) -> Result<(f64, f64)> {
    let u = propagator(&readout.schedule, &[], dt)?.unitary;
    let out = u.apply(state);
    let z1 = pauli(Axis::Z, 0, 2)?.expectation(&out).re;
    let z2 = pauli(Axis::Z, 1, 2)?.expectation(&out).re;
    Ok((z1, z2))
}

/// Look-up by CLI name.
pub fn by_name(
    name: &str,
    p: &CircuitParams,
    p2: &CircuitParams,
    theta: f64,
    lambda: f64,
    coupling: Coupling,
) -> Result<GateProtocol> {
    match name {
        "xgate" => x_gate(p, theta, lambda),
        "zgate" => z_gate(p, theta, lambda),
        "cgate" => two_qubit_gate(p, p2, coupling),
        "prep" => prepare_encoded(p, lambda),
        "readout" => readout_map(p, lambda),
        other => Err(invalid(format!("unknown gate `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DEFAULT_DRIVEN_DT;
    use crate::model::{projector_encoded, restrict};
    use crate::opalg::C64;
    use crate::units::{ghz, mhz};

    fn nominal(r: f64) -> CircuitParams {
        CircuitParams::new(ghz(5.0), r * ghz(5.0))
    }

    #[test]
    fn x_gate_durations_and_targets() {
        let g = x_gate(&nominal(0.4), PI, mhz(300.0)).unwrap();
        assert!((g.schedule.duration - 0.8333e-9).abs() < 1e-12);
        let full = x_gate(&nominal(0.4), TAU, mhz(300.0)).unwrap();
        assert!(full.target.max_abs_diff(&Operator::identity(2).scale(-1.0)) < 1e-15);
        assert!(x_gate(&nominal(0.4), 0.0, mhz(300.0)).is_err());
        assert!(x_gate(&nominal(0.4), -1.0, mhz(300.0)).is_err());
    }

    #[test]
    fn z_gate_zero_angle_is_identity() {
        let g = z_gate(&nominal(0.4), 0.0, mhz(300.0)).unwrap();
        assert_eq!(g.schedule.duration, 0.0);
        assert!(g.target.max_abs_diff(&Operator::identity(2)) < 1e-15);
        assert!(z_gate(&nominal(0.4), -0.1, mhz(300.0)).is_err());
    }

    #[test]
    fn z_generator_projection() {
        let b = encoded_basis(&nominal(0.4)).unwrap();
        let g = z_gate(&nominal(0.4), PI, mhz(300.0)).unwrap();
        let m = restrict(&g.schedule.drive_terms[0].op, &b.encoded()).unwrap();
        let want = Operator::identity(2).scale(-1.0) - Axis::Z.matrix();
        assert!(m.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn targets_commute_with_projectors() {
        let p = nominal(0.7);
        let pe = projector_encoded(&encoded_basis(&p).unwrap());
        for g in [x_gate(&p, 1.3, mhz(300.0)).unwrap(), z_gate(&p, 0.4, mhz(300.0)).unwrap()] {
            let t = g.target_full();
            assert!(t.commutator(&pe).max_abs() < 1e-12, "{}", g.name);
            assert!(t.unitarity_defect() < 1e-12);
        }
        let c = two_qubit_gate(&nominal(1.0), &nominal(0.4), Coupling { lambda_c: mhz(300.0), e_cc: 0.0, e_jc: 0.0 }).unwrap();
        let t = c.target_full();
        assert!(t.commutator(&c.projector()).max_abs() < 1e-12);
        assert!(t.unitarity_defect() < 1e-12);
    }

    #[test]
    fn two_pair_projection_identities() {
        let (p1, p2) = (nominal(1.0), nominal(0.4));
        let c = two_qubit_gate(&p1, &p2, Coupling { lambda_c: mhz(300.0), e_cc: 0.0, e_jc: 0.0 }).unwrap();
        let kets = c.subspace_refs();
        let id2 = Operator::identity(2);
        let x = Axis::X.matrix();
        let s2 = restrict(&pauli(Axis::Z, SIGMA2, 4).unwrap(), &kets).unwrap();
        let t2 = restrict(&pauli(Axis::Z, TAU2, 4).unwrap(), &kets).unwrap();
        assert!(s2.max_abs_diff(&tensor(&x, &id2)) < 1e-12);
        assert!(t2.max_abs_diff(&tensor(&id2, &x)) < 1e-12);
        assert!((c.schedule.duration - PI / (2.0 * mhz(300.0))).abs() < 1e-20);
    }

    #[test]
    fn equal_splittings_are_degenerate() {
        let p = nominal(0.4);
        let err = two_qubit_gate(&p, &p, Coupling { lambda_c: mhz(300.0), e_cc: 0.0, e_jc: 0.0 });
        assert!(matches!(err, Err(Error::DegenerateDrive)));
    }

    #[test]
    fn x_pi_leaks_little() {
        let g = x_gate(&nominal(0.4), PI, mhz(300.0)).unwrap();
        let u = g.rotating_propagator(&[], DEFAULT_DRIVEN_DT).unwrap();
        let pe = g.projector();
        for k in &g.subspace {
            let out = u.apply(k);
            let kept = pe.expectation(&out).re;
            assert!(1.0 - kept <= 1e-3, "leakage {}", 1.0 - kept);
        }
    }

    #[test]
    fn preparation_matrix_element_and_population() {
        let p = nominal(1.0);
        let b = encoded_basis(&p).unwrap();
        let el = pauli(Axis::X, 0, 2).unwrap().element(b.state(3), b.state(1));
        assert!((el.re + b.phi.sin()).abs() < 1e-12 && el.im.abs() < 1e-15);
        assert!((b.theta - 0.4636).abs() < 1e-4);
        let half = b.theta / 2.0;
        assert!((b.phi.sin() - (half.cos() + half.sin()) / 2f64.sqrt()).abs() < 1e-15);
        assert!((b.phi.sin() - 0.8507).abs() < 1e-4);

        let g = prepare_encoded(&p, mhz(50.0)).unwrap();
        let u = propagator(&g.schedule, &[], DEFAULT_DRIVEN_DT).unwrap().unitary;
        let p3 = b.state(3).inner(&u.apply(b.state(1))).norm_sqr();
        assert!(p3 >= 0.99, "P3 = {p3}");
    }

    #[test]
    fn readout_maps_encoded_states_to_product_states() {
        let p = nominal(0.4);
        let b = encoded_basis(&p).unwrap();
        let r = readout_map(&p, mhz(300.0)).unwrap();
        let (z1, z2) = readout_signal(&r, b.state(3), DEFAULT_DRIVEN_DT).unwrap();
        assert!(z1 > 0.99 && z2 < -0.99, "|3>: {z1} {z2}");
        let (z1, z2) = readout_signal(&r, b.state(4), DEFAULT_DRIVEN_DT).unwrap();
        assert!(z1 < -0.99 && z2 > 0.99, "|4>: {z1} {z2}");
        let plus = b.state(3).add_scaled(C64::new(1.0, 0.0), b.state(4)).normalized();
        let (z1, _) = readout_signal(&r, &plus, DEFAULT_DRIVEN_DT).unwrap();
        let rwa = mhz(300.0) / b.splitting();
        assert!(z1.abs() < rwa, "{z1}");

        // Ideal map: rotating-frame target, then free lab-frame evolution.
        let free = expm_i(&build_h0(&p), r.schedule.duration).unwrap();
        let ideal = |k: &Ket| {
            let out = free.apply(&r.target_full().apply(k));
            pauli(Axis::Z, 0, 2).unwrap().expectation(&out).re
        };
        assert!((ideal(b.state(3)) - 1.0).abs() < 1e-12);
        assert!((ideal(b.state(4)) + 1.0).abs() < 1e-12);
        assert!(ideal(&plus).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_x_gate_uses_static_drive() {
        let g = x_gate(&nominal(0.0), PI, mhz(300.0)).unwrap();
        assert_eq!(g.schedule.drive_terms[0].omega, 0.0);
        assert_eq!(g.schedule.drive_terms[0].amplitude, mhz(300.0));
        let u = g.rotating_propagator(&[], DEFAULT_DRIVEN_DT).unwrap();
        let v = restrict(&u, &g.subspace_refs()).unwrap();
        let overlap = v.hs_inner(&g.target).norm() / 2.0;
        assert!(overlap > 1.0 - 1e-9, "{overlap}");
    }

    #[test]
    fn unknown_gate_name() {
        let p = nominal(0.4);
        let c = Coupling { lambda_c: mhz(300.0), e_cc: 0.0, e_jc: 0.0 };
        assert!(by_name("hadamard", &p, &p, PI, mhz(300.0), c).is_err());
        assert_eq!(by_name("zgate", &p, &p, PI, mhz(300.0), c).unwrap().name, "zgate");
    }
}
