//! Debye uniform asymptotics of I_ν(νz), K_ν(νz).

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DebyeFactors {
    pub eta: f64,
    pub tau_z: f64,
    pub u1: f64,
    pub m1: f64,
    /// ln of I_ν(νz) ≈ e^{νη}/(√(2πν)(1+z²)^{1/4}) · (1 + u₁/ν).
    pub ln_i: f64,
    /// ln of K_ν(νz) ≈ √(π/(2ν)) e^{−νη}/(1+z²)^{1/4} · (1 − u₁/ν).
    pub ln_k: f64,
}

pub fn u1(t: f64) -> f64 {
    t / 8.0 - 5.0 * t.powi(3) / 24.0
}

pub fn m1(t: f64) -> f64 {
    t / 8.0 + 7.0 * t.powi(3) / 24.0
}

pub fn debye_factors(z: f64, nu: f64) -> DebyeFactors {
    let s = (1.0 + z * z).sqrt();
    let eta = s + (z / (1.0 + s)).ln();
    let tau_z = 1.0 / s;
    let (u, m) = (u1(tau_z), m1(tau_z));
    let quarter = 0.25 * (1.0 + z * z).ln();
    DebyeFactors {
        eta,
        tau_z,
        u1: u,
        m1: m,
        ln_i: nu * eta - 0.5 * (2.0 * PI * nu).ln() - quarter + (u / nu).ln_1p(),
        ln_k: 0.5 * (PI / (2.0 * nu)).ln() - nu * eta - quarter + (-u / nu).ln_1p(),
    }
}
