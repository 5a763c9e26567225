//! Unit conversions. Energies are carried internally as angular frequencies (rad/s, ħ = 1).

use std::f64::consts::TAU;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

pub fn ghz(f: f64) -> f64 {
    TAU * f * 1e9
}

pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e6
}

pub fn hz(f: f64) -> f64 {
    TAU * f
}

/// rad/s → GHz (linear frequency).
pub fn to_ghz(w: f64) -> f64 {
    w / (TAU * 1e9)
}

pub fn to_hz(w: f64) -> f64 {
    w / TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert_eq!(ghz(5.0), 2.0 * std::f64::consts::PI * 5e9);
        assert!((to_ghz(ghz(2.5)) - 2.5).abs() < 1e-15);
        assert!((to_hz(hz(100.0)) - 100.0).abs() < 1e-12);
        assert!((mhz(300.0) - ghz(0.3)).abs() < 1e-3);
    }
}
