//! Classical 1/f noise as a sum of random-amplitude, random-phase cosines.
//!
//! A channel with weight `w` (cos²η for x, sin²η for z) has the two-sided
//! spectrum `S(ω) = A²·w/|ω|` on `[ω_ir, ω_uv]`, normalized so that the
//! variance is `∫ S(ω) dω` over both signs of ω. Component `k` carries the
//! power of the grid cell around `ω_k`, integrated exactly in log space.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::hz;

/// Minimum ensemble size accepted by [`estimate_psd`].
pub const MIN_PSD_TRAJECTORIES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseAxis {
    X,
    Z,
}

/// Noise source δV_αj coupling through σ_α on qubit `qubit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Channel {
    pub axis: NoiseAxis,
    pub qubit: usize,
}

impl Channel {
    pub fn new(axis: NoiseAxis, qubit: usize) -> Self {
        Self { axis, qubit }
    }

    /// x and z channel of every qubit, ordered by qubit then axis.
    pub fn all(n_qubits: usize) -> Vec<Channel> {
        (0..n_qubits)
            .flat_map(|q| [Channel::new(NoiseAxis::X, q), Channel::new(NoiseAxis::Z, q)])
            .collect()
    }

    pub fn index(&self) -> u64 {
        2 * self.qubit as u64 + matches!(self.axis, NoiseAxis::Z) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Total noise amplitude A, rad/s.
    pub amplitude: f64,
    /// Distribution angle η between transverse and longitudinal power.
    pub eta: f64,
    pub omega_ir: f64,
    pub omega_uv: f64,
    pub delta_omega: f64,
    /// Multiplies every component variance; 1 for calibrated noise.
    pub variance_scale: f64,
}

impl NoiseSpec {
    /// A = 2e-4·E_z, 1 Hz to 0.1 MHz on a 100 Hz grid.
    pub fn nominal(e_z: f64, eta: f64) -> Self {
        Self {
            amplitude: 2e-4 * e_z,
            eta,
            omega_ir: hz(1.0),
            omega_uv: hz(1e5),
            delta_omega: hz(100.0),
            variance_scale: 1.0,
        }
    }

    pub fn noiseless() -> Self {
        Self {
            amplitude: 0.0,
            ..Self::nominal(1.0, 0.0)
        }
    }

    pub fn with_amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("noise amplitude must be finite and non-negative"));
        }
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&self.eta) {
            return Err(invalid(format!("eta must lie in [0, pi/2], got {}", self.eta)));
        }
        if !(self.omega_ir > 0.0 && self.omega_ir < self.omega_uv) {
            return Err(invalid("need 0 < omega_ir < omega_uv"));
        }
        if !(self.delta_omega > 0.0) {
            return Err(invalid("delta_omega must be positive"));
        }
        if !(self.variance_scale >= 0.0) {
            return Err(invalid("variance_scale must be non-negative"));
        }
        Ok(())
    }

    pub fn is_silent(&self) -> bool {
        self.amplitude == 0.0 || self.variance_scale == 0.0
    }

    pub fn weight(&self, axis: NoiseAxis) -> f64 {
        match axis {
            NoiseAxis::X => self.eta.cos().powi(2),
            NoiseAxis::Z => self.eta.sin().powi(2),
        }
    }

    /// ω_k = ω_ir + k·Δω for k = 0 ..= ⌊(ω_uv − ω_ir)/Δω⌋.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.omega_uv - self.omega_ir) / self.delta_omega + 1e-9).floor() as usize;
        (0..=n).map(|k| self.omega_ir + k as f64 * self.delta_omega).collect()
    }

    /// ⟨a_k²⟩ for each grid point.
    pub fn component_variances(&self, axis: NoiseAxis) -> Vec<f64> {
        let grid = self.grid();
        let w = self.weight(axis) * self.variance_scale;
        let a2 = self.amplitude * self.amplitude;
        let half = 0.5 * self.delta_omega;
        let dw2 = self.delta_omega * self.delta_omega;
        grid.iter()
            .enumerate()
            .map(|(k, &om)| {
                let lo = if k == 0 { om } else { om - half };
                let hi = (om + half).min(self.omega_uv).max(lo);
                let cell_power = 2.0 * a2 * w * (hi / lo).ln();
                2.0 * cell_power / dw2
            })
            .collect()
    }

    /// Expected variance of δV for one channel.
    pub fn channel_variance(&self, axis: NoiseAxis) -> f64 {
        let dw2 = self.delta_omega * self.delta_omega;
        self.component_variances(axis).iter().map(|v| v * dw2 / 2.0).sum()
    }
}

/// One realization δV(t) = Σ_k a_k cos(ω_k t + φ_k)·Δω.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseTrajectory {
    pub channel: Channel,
    pub delta_omega: f64,
    pub omegas: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

/// Counter-based seed for trajectory `traj`, channel `channel` under `master`.
pub fn derive_seed(master: u64, traj: u64, channel: u64) -> u64 {
    let a = splitmix64(master ^ splitmix64(traj.wrapping_add(0x243F_6A88_85A3_08D3)));
    splitmix64(a ^ channel.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sample_trajectory(spec: &NoiseSpec, channel: Channel, seed: u64) -> NoiseTrajectory {
    let variances = spec.component_variances(channel.axis);
    sample_from_variances(spec.grid(), &variances, spec.delta_omega, channel, seed)
}

/// Gaussian amplitudes with the given variances and uniform phases.
pub fn sample_from_variances(
    omegas: Vec<f64>,
    variances: &[f64],
    delta_omega: f64,
    channel: Channel,
    seed: u64,
) -> NoiseTrajectory {
    assert_eq!(omegas.len(), variances.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amplitudes = Vec::with_capacity(omegas.len());
    let mut phases = Vec::with_capacity(omegas.len());
    for v in variances {
        let g: f64 = rng.sample(StandardNormal);
        amplitudes.push(g * v.sqrt());
        phases.push(rng.random_range(0.0..TAU));
    }
    NoiseTrajectory {
        channel,
        delta_omega,
        omegas,
        amplitudes,
        phases,
    }
}

/// All channels of one Monte-Carlo trajectory.
pub fn sample_channels(
    spec: &NoiseSpec,
    channels: &[Channel],
    master: u64,
    traj: u64,
) -> Vec<NoiseTrajectory> {
    channels
        .iter()
        .map(|&c| sample_trajectory(spec, c, derive_seed(master, traj, c.index())))
        .collect()
}

impl NoiseTrajectory {
    pub fn zero(channel: Channel) -> Self {
        Self {
            channel,
            delta_omega: 1.0,
            omegas: Vec::new(),
            amplitudes: Vec::new(),
            phases: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|&a| a == 0.0)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.omegas
            .iter()
            .zip(&self.amplitudes)
            .zip(&self.phases)
            .map(|((w, a), p)| a * (w * t + p).cos())
            .sum::<f64>()
            * self.delta_omega
    }

    /// Σ|a_k|·Δω
    pub fn bound(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.abs()).sum::<f64>() * self.delta_omega
    }

    /// ∫_{t1}^{t2} δV(t) dt, exact.
    pub fn integral(&self, t1: f64, t2: f64) -> f64 {
        self.omegas
            .iter()
            .zip(&self.amplitudes)
            .zip(&self.phases)
            .map(|((w, a), p)| a * ((w * t2 + p).sin() - (w * t1 + p).sin()) / w)
            .sum::<f64>()
            * self.delta_omega
    }

    /// Values at `t0 + i·dt`, `i = 0, 1, …`
    pub fn sampler(&self, t0: f64, dt: f64) -> Sampler<'_> {
        Sampler::new(self, t0, dt)
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "omega_rad_s,amplitude,phase")?;
        for ((om, a), p) in self.omegas.iter().zip(&self.amplitudes).zip(&self.phases) {
            writeln!(w, "{om:.8e},{a:.8e},{p:.8e}")?;
        }
        Ok(())
    }
}

/// Evaluates a trajectory on a uniform time grid by phasor rotation.
pub struct Sampler<'a> {
    traj: &'a NoiseTrajectory,
    idx: Vec<usize>,
    z: Vec<Complex64>,
    rot: Vec<Complex64>,
    t0: f64,
    dt: f64,
    step: u64,
}

const RESYNC: u64 = 2048;

impl<'a> Sampler<'a> {
    fn new(traj: &'a NoiseTrajectory, t0: f64, dt: f64) -> Self {
        let idx: Vec<usize> = (0..traj.amplitudes.len())
            .filter(|&k| traj.amplitudes[k] != 0.0)
            .collect();
        let rot = idx
            .iter()
            .map(|&k| Complex64::from_polar(1.0, traj.omegas[k] * dt))
            .collect();
        let mut s = Self {
            traj,
            idx,
            z: Vec::new(),
            rot,
            t0,
            dt,
            step: 0,
        };
        s.resync();
        s
    }

    fn resync(&mut self) {
        let t = self.t0 + self.step as f64 * self.dt;
        let tr = self.traj;
        self.z = self
            .idx
            .iter()
            .map(|&k| Complex64::from_polar(tr.amplitudes[k] * tr.delta_omega, tr.omegas[k] * t + tr.phases[k]))
            .collect();
    }

    /// Current value, then advance one step.
    pub fn next_value(&mut self) -> f64 {
        let v: f64 = self.z.iter().map(|z| z.re).sum();
        self.step += 1;
        if self.step % RESYNC == 0 {
            self.resync();
        } else {
            for (z, r) in self.z.iter_mut().zip(&self.rot) {
                *z *= r;
            }
        }
        v
    }
}

/// Ensemble-averaged periodogram.
#[derive(Clone, Debug)]
pub struct PsdEstimate {
    /// Non-negative bin frequencies, rad/s.
    pub omegas: Vec<f64>,
    /// Two-sided PSD, (rad/s)² per rad/s.
    pub psd: Vec<f64>,
    pub n_traj: usize,
}

/// `S(ω_j) = dt/(2πN)·|Σ_n x_n e^{−iω_j t_n}|²`, averaged over trajectories.
pub fn estimate_psd(
    trajs: &[NoiseTrajectory],
    t_window: f64,
    n_samples: usize,
) -> Result<PsdEstimate> {
    if trajs.len() < MIN_PSD_TRAJECTORIES {
        return Err(Error::InsufficientStatistics {
            needed: MIN_PSD_TRAJECTORIES,
            got: trajs.len(),
        });
    }
    if !n_samples.is_power_of_two() || n_samples < 2 {
        return Err(invalid("n_samples must be a power of two"));
    }
    if !(t_window > 0.0) {
        return Err(invalid("t_window must be positive"));
    }
    let dt = t_window / n_samples as f64;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_samples);
    let n_bins = n_samples / 2 + 1;
    let mut acc = vec![0.0; n_bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); n_samples];
    for tr in trajs {
        let mut s = tr.sampler(0.0, dt);
        for b in buf.iter_mut() {
            *b = Complex64::new(s.next_value(), 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let norm = dt / (TAU * n_samples as f64) / trajs.len() as f64;
    Ok(PsdEstimate {
        omegas: (0..n_bins).map(|j| TAU * j as f64 / t_window).collect(),
        psd: acc.into_iter().map(|a| a * norm).collect(),
        n_traj: trajs.len(),
    })
}

/// Outcome of comparing a PSD estimate against a target spectrum.
#[derive(Clone, Debug)]
pub struct PsdCheck {
    /// (band centre ω, measured/target) per log band.
    pub band_ratios: Vec<(f64, f64)>,
    /// Log-log slope of the measured band means.
    pub slope: f64,
    pub max_deviation: f64,
}

impl PsdCheck {
    pub fn passes(&self, amp_tol: f64, expected_slope: f64, slope_tol: f64) -> bool {
        self.max_deviation <= amp_tol && (self.slope - expected_slope).abs() <= slope_tol
    }
}

/// Band-averages the estimate over `bands_per_decade` log bands in
/// `[lo, hi]` (rad/s) and fits a log-log slope through the band means.
///
/// Each bin is compared with the mean of `target` over its resolution cell,
/// which is what a rectangular-window periodogram estimates.
pub fn compare_spectrum(
    est: &PsdEstimate,
    target: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    bands_per_decade: usize,
) -> PsdCheck {
    let decades = (hi / lo).log10();
    let n_bands = (decades * bands_per_decade as f64).ceil().max(1.0) as usize;
    let edge = |i: usize| lo * 10f64.powf(decades * i as f64 / n_bands as f64);
    let res = est.omegas.get(1).copied().unwrap_or(0.0);
    let mut band_ratios = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for b in 0..n_bands {
        let (e0, e1) = (edge(b), edge(b + 1));
        let last = b + 1 == n_bands;
        let bins: Vec<usize> = (0..est.omegas.len())
            .filter(|&j| {
                let w = est.omegas[j];
                w >= e0 && (w < e1 || (last && w <= e1 * (1.0 + 1e-12)))
            })
            .collect();
        if bins.is_empty() {
            continue;
        }
        let n = bins.len() as f64;
        let measured = bins.iter().map(|&j| est.psd[j]).sum::<f64>() / n;
        let expected = bins.iter().map(|&j| cell_mean(&target, est.omegas[j], res)).sum::<f64>() / n;
        let centre = (bins.iter().map(|&j| est.omegas[j].ln()).sum::<f64>() / n).exp();
        band_ratios.push((centre, measured / expected));
        xs.push(centre.ln());
        ys.push(measured.ln());
    }
    let slope = crate::stats::linear_fit(&xs, &ys).map_or(f64::NAN, |f| f.slope);
    let max_deviation = band_ratios
        .iter()
        .map(|(_, r)| (r - 1.0).abs())
        .fold(0.0, f64::max);
    PsdCheck {
        band_ratios,
        slope,
        max_deviation,
    }
}

/// Mean of `f` over `[w − res/2, w + res/2]`, Simpson's rule.
fn cell_mean(f: &impl Fn(f64) -> f64, w: f64, res: f64) -> f64 {
    if res == 0.0 || w <= res / 2.0 {
        return f(w);
    }
    const N: usize = 64;
    let h = res / N as f64;
    let a = w - res / 2.0;
    let mut acc = f(a) + f(a + res);
    for i in 1..N {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0 / res
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nominal() -> NoiseSpec {
        NoiseSpec::nominal(crate::units::ghz(5.0), 0.0)
    }

    #[test]
    fn nominal_grid_has_thousand_components() {
        let g = nominal().grid();
        assert_eq!(g.len(), 1000);
        assert_eq!(g[0], hz(1.0));
        assert!((g[1] - hz(101.0)).abs() < 1e-9);
    }

    #[test]
    fn zero_amplitude_is_silent() {
        let spec = nominal().with_amplitude(0.0);
        let tr = sample_trajectory(&spec, Channel::new(NoiseAxis::X, 0), 9);
        for t in [0.0, 1e-6, 3.3e-3] {
            assert_eq!(tr.evaluate(t), 0.0);
        }
    }

    #[test]
    fn z_channel_is_empty_at_zero_eta() {
        let tr = sample_trajectory(&nominal(), Channel::new(NoiseAxis::Z, 1), 4);
        assert!(tr.amplitudes.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn single_component_evaluation() {
        let tr = NoiseTrajectory {
            channel: Channel::new(NoiseAxis::X, 0),
            delta_omega: 2.0,
            omegas: vec![3.0],
            amplitudes: vec![0.5],
            phases: vec![0.0],
        };
        for t in [0.0, 0.1, 1.7] {
            assert!((tr.evaluate(t) - 0.5 * 2.0 * (3.0 * t).cos()).abs() < 1e-15);
        }
        assert!((tr.integral(0.0, 1.0) - (3.0f64).sin() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn total_variance_matches_log_span() {
        let spec = nominal();
        let want = 2.0 * spec.amplitude.powi(2) * (spec.omega_uv / spec.omega_ir).ln();
        let got = spec.channel_variance(NoiseAxis::X);
        // The last cell stops half a grid step short of ω_uv.
        assert!((got / want - 1.0).abs() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn power_partition_is_eta_independent() {
        let base = nominal();
        for eta in [0.0, 0.3, 0.9, FRAC_PI_2] {
            let s = base.with_eta(eta);
            let tot = s.channel_variance(NoiseAxis::X) + s.channel_variance(NoiseAxis::Z);
            assert!((tot / base.channel_variance(NoiseAxis::X) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_matches_direct_evaluation() {
        let tr = sample_trajectory(&nominal(), Channel::new(NoiseAxis::X, 0), 17);
        let dt = 3.7e-7;
        let mut s = tr.sampler(1e-5, dt);
        let scale = tr.bound();
        for i in 0..5000 {
            let t = 1e-5 + i as f64 * dt;
            let d = (s.next_value() - tr.evaluate(t)).abs();
            assert!(d <= 1e-11 * scale, "step {i}: {d}");
        }
    }

    #[test]
    fn evaluation_is_bounded() {
        let tr = sample_trajectory(&nominal(), Channel::new(NoiseAxis::X, 0), 5);
        let b = tr.bound();
        for i in 0..100 {
            assert!(tr.evaluate(i as f64 * 1.3e-4).abs() <= b);
        }
    }

    #[test]
    fn time_average_shrinks() {
        let spec = nominal();
        let sigma = spec.channel_variance(NoiseAxis::X).sqrt();
        let t = 20.0 * TAU / spec.omega_ir;
        let bound = 3.0 * sigma / (t * spec.omega_ir).sqrt();
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let tr = sample_trajectory(&spec, Channel::new(NoiseAxis::X, 0), seed);
            worst = worst.max((tr.integral(0.0, t) / t).abs());
        }
        assert!(worst <= bound, "{worst} > {bound}");
    }

    #[test]
    fn seeds_are_distinct_across_indices() {
        let mut seen = std::collections::HashSet::new();
        for t in 0..50 {
            for c in 0..8 {
                assert!(seen.insert(derive_seed(42, t, c)));
            }
        }
        assert_ne!(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
    }

    #[test]
    fn amplitudes_are_gaussian() {
        let spec = nominal();
        let var = spec.component_variances(NoiseAxis::X);
        let mut z = Vec::new();
        for seed in 0..10 {
            let tr = sample_trajectory(&spec, Channel::new(NoiseAxis::X, 0), seed);
            z.extend(tr.amplitudes.iter().zip(&var).map(|(a, v)| a / v.sqrt()));
        }
        assert_eq!(z.len(), 10_000);
        let m = crate::stats::Moments::of(&z);
        assert!(m.mean.abs() < 0.05);
        assert!(m.skewness.abs() <= 0.1, "skew {}", m.skewness);
        assert!(m.excess_kurtosis.abs() <= 0.2, "kurt {}", m.excess_kurtosis);
    }

    #[test]
    fn channels_are_uncorrelated() {
        // Standardized in-phase quadratures a_k·cos φ_k / σ_k, pooled over 200 seeds.
        let spec = nominal().with_eta(std::f64::consts::FRAC_PI_4);
        let chans = Channel::all(2);
        let sd: Vec<Vec<f64>> = chans
            .iter()
            .map(|c| spec.component_variances(c.axis).iter().map(|v| v.sqrt()).collect())
            .collect();
        let mut series = vec![Vec::new(); chans.len()];
        for i in 0..200 {
            for (c, tr) in sample_channels(&spec, &chans, 77, i).iter().enumerate() {
                series[c].extend(
                    tr.amplitudes.iter().zip(&tr.phases).zip(&sd[c]).map(|((a, p), s)| a * p.cos() / s),
                );
            }
        }
        for a in 0..chans.len() {
            for b in (a + 1)..chans.len() {
                let r = crate::stats::correlation(&series[a], &series[b]);
                assert!(r.abs() <= 0.05, "{a}-{b}: {r}");
            }
        }
    }

    #[test]
    fn psd_rejects_small_ensembles() {
        let trs: Vec<_> = (0..10)
            .map(|s| sample_trajectory(&nominal(), Channel::new(NoiseAxis::X, 0), s))
            .collect();
        assert!(matches!(
            estimate_psd(&trs, 1e-2, 1024),
            Err(Error::InsufficientStatistics { .. })
        ));
        let trs: Vec<_> = (0..60)
            .map(|s| sample_trajectory(&nominal(), Channel::new(NoiseAxis::X, 0), s))
            .collect();
        assert!(estimate_psd(&trs, 1e-2, 1000).is_err());
    }

    #[test]
    fn flat_spectrum_estimates_flat() {
        let spec = nominal();
        let omegas = spec.grid();
        let level = 1.0;
        // Two-sided level S per cell: ⟨a²⟩ = 2·(2·S·Δω)/Δω²
        let var = vec![4.0 * level / spec.delta_omega; omegas.len()];
        let trs: Vec<_> = (0..200)
            .map(|s| sample_from_variances(omegas.clone(), &var, spec.delta_omega, Channel::new(NoiseAxis::X, 0), s))
            .collect();
        let est = estimate_psd(&trs, 1e-2, 4096).unwrap();
        let check = compare_spectrum(&est, |_| level, hz(100.0), hz(5e4), 4);
        assert!(check.passes(0.2, 0.0, 0.1), "{check:?}");
    }

    proptest! {
        #[test]
        fn sampling_is_deterministic(seed in any::<u64>(), eta in 0.0f64..FRAC_PI_2) {
            let spec = nominal().with_eta(eta);
            let c = Channel::new(NoiseAxis::Z, 1);
            let a = sample_trajectory(&spec, c, seed);
            let b = sample_trajectory(&spec, c, seed);
            prop_assert_eq!(&a, &b);
        }

        #[test]
        fn weights_partition_power(eta in 0.0f64..FRAC_PI_2) {
            let s = nominal().with_eta(eta);
            prop_assert!((s.weight(NoiseAxis::X) + s.weight(NoiseAxis::Z) - 1.0).abs() < 1e-15);
        }
    }
}
