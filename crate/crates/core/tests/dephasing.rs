use std::f64::consts::FRAC_PI_2;

use uqdp::dephasing::*;
use uqdp::model::CircuitParams;
use uqdp::noise::{sample_channels, Channel, NoiseAxis, NoiseSpec, NoiseTrajectory};
use uqdp::opalg::C64;
use uqdp::units::ghz;

const E_Z: f64 = 5.0;

fn ez() -> f64 {
    ghz(E_Z)
}

fn bare_noise(spec: &NoiseSpec, seed: u64, traj: u64, axis: NoiseAxis) -> NoiseTrajectory {
    sample_channels(spec, &Channel::all(1), seed, traj)
        .into_iter()
        .find(|t| t.channel.axis == axis)
        .unwrap()
}

#[test]
fn longitudinal_bare_decay_matches_phase_integral() {
    let spec = NoiseSpec::nominal(ez(), FRAC_PI_2);
    let (n, seed) = (400usize, 3u64);
    let curve = bare_coherence_with(ez(), &spec, 40e-9, &RunOptions::new(n, seed).with_records(41)).unwrap();
    let noise: Vec<_> = (0..n as u64).map(|i| bare_noise(&spec, seed, i, NoiseAxis::Z)).collect();
    for (r, &t) in curve.times.iter().enumerate() {
        let ints: Vec<f64> = noise.iter().map(|tr| tr.integral(0.0, t)).collect();
        let mean = ints.iter().sum::<f64>() / n as f64;
        let var = ints.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let direct = (ints.iter().map(|x| C64::from_polar(1.0, -2.0 * x)).sum::<C64>() / n as f64).norm();
        let c = curve.coherence[r];
        assert!((c - direct).abs() < 1e-3, "t = {t:e}: {c} vs {direct}");
        // beyond this the Gaussian form is limited by sampling of the higher cumulants
        if c >= 0.5 {
            let gauss = (-2.0 * var).exp();
            assert!((c / gauss - 1.0).abs() <= 0.02, "t = {t:e}: {c} vs {gauss}");
        }
    }
}

#[test]
fn transverse_bare_decay_matches_quadratic_shift() {
    let spec = NoiseSpec::nominal(ez(), 0.0);
    let (n, seed, duration, records) = (100usize, 8u64, 200e-6, 41usize);
    let curve = bare_coherence_with(ez(), &spec, duration, &RunOptions::new(n, seed).with_records(records)).unwrap();
    let h = 10e-9;
    let steps_per_record = ((duration / (records - 1) as f64) / h).round() as usize;
    let phases: Vec<Vec<f64>> = (0..n as u64)
        .map(|i| {
            let tr = bare_noise(&spec, seed, i, NoiseAxis::X);
            let mut s = tr.sampler(0.5 * h, h);
            let mut phi = 0.0;
            let mut out = vec![0.0];
            for _ in 1..records {
                for _ in 0..steps_per_record {
                    phi += s.next_value().powi(2) / ez() * h;
                }
                out.push(phi);
            }
            out
        })
        .collect();
    let mut checked = 0;
    for r in 0..records {
        let oracle = (phases.iter().map(|p| C64::from_polar(1.0, -p[r])).sum::<C64>() / n as f64).norm();
        if oracle >= 0.2 {
            let c = curve.coherence[r];
            assert!((c / oracle - 1.0).abs() <= 0.10, "record {r}: {c} vs {oracle}");
            checked += 1;
        }
    }
    assert!(checked > 10 && curve.coherence[records - 1] < 0.6);
}

#[test]
fn phase_only_path_tracks_full_propagation() {
    let seed = 5;
    for (em, eta) in [(1.0, 0.0), (1.0, FRAC_PI_2), (0.4, 0.0), (0.4, 0.8)] {
        let p = CircuitParams::new(ez(), em * ez());
        let spec = NoiseSpec::nominal(ez(), eta);
        for (duration, tol) in [(100e-9, 0.01), (40e-6, 2e-3)] {
            let eff = effective_coherence(&p, &spec, duration, &RunOptions::new(40, seed).with_records(41)).unwrap();
            let full = full_encoded_coherence(&p, &spec, duration, &RunOptions::new(40, seed).with_records(41)).unwrap();
            for (a, b) in eff.coherence.iter().zip(&full.coherence) {
                assert!((a - b).abs() <= tol * b, "E_m/E_z {em}, eta {eta}: {a} vs {b}");
            }
        }
    }
}

fn t2(q: &Qubit, eta: f64, d0: f64, seed: u64) -> T2Estimate {
    measure_t2(q, &NoiseSpec::nominal(ez(), eta), d0, 100, seed).unwrap()
}

#[test]
fn disjoint_ensembles_agree() {
    let bare = Qubit::Bare { e_z: ez() };
    let spread = Qubit::Encoded(CircuitParams::new(ez(), ez()).with_a0(1.05));
    for (q, eta, d0) in [(bare, FRAC_PI_2, 40e-9), (spread, FRAC_PI_2, 1e-6)] {
        let (a, b) = (t2(&q, eta, d0, 101), t2(&q, eta, d0, 202));
        let r = a.t2.unwrap() / b.t2.unwrap();
        assert!((r - 1.0).abs() <= 0.2, "{:?}: ratio {r}", q.subject());
    }
    // quadratic coupling to quasi-static noise gives heavy-tailed T2 statistics
    let enc = Qubit::Encoded(CircuitParams::new(ez(), ez()));
    for (q, eta, d0) in [(bare, 0.0, 160e-6), (enc, 0.0, 80e-6)] {
        let (a, b) = (t2(&q, eta, d0, 101), t2(&q, eta, d0, 202));
        let diff = (a.t2.unwrap() - b.t2.unwrap()).abs();
        let se = a.stderr.hypot(b.stderr);
        assert!(diff <= 3.0 * se, "{:?}: {:?} vs {:?}", q.subject(), a.t2, b.t2);
    }
}
