//! Physical constants (CODATA 2018) and the dimensionless groups used downstream.

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// ħc, J·m.
    pub hbar_c: f64,
    /// Joules per electronvolt.
    pub ev_to_joule: f64,
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const C: f64 = 299_792_458.0;
pub const EV: f64 = 1.602_176_634e-19;
pub const HBAR_C: f64 = HBAR * C;

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    c: C,
    hbar_c: HBAR_C,
    ev_to_joule: EV,
};

/// Converts a photon energy in eV to an angular frequency in rad/s.
pub fn ev_to_angular_frequency(energy_ev: f64) -> Result<f64> {
    if !(energy_ev >= 0.0) || !energy_ev.is_finite() {
        return Err(domain(format!("energy must be finite and >= 0, got {energy_ev}")));
    }
    Ok(energy_ev * EV / HBAR)
}

/// Dimensionless parameters of one medium at gap d.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MediumGroups {
    pub omega_d: f64,
    pub gamma_d: f64,
}

impl MediumGroups {
    /// Small parameter a = 1/ω_d; zero for an ideal conductor (ω_d = ∞) and
    /// infinite for ω_d = 0.
    pub fn a(&self) -> f64 {
        1.0 / self.omega_d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessGroups {
    pub e: f64,
    pub media: Vec<MediumGroups>,
}

pub fn dimensionless_groups(
    radius: f64,
    distance: f64,
    omega_p: &[f64],
    gamma: &[f64],
) -> Result<DimensionlessGroups> {
    if !(radius > 0.0) || !(distance > 0.0) {
        return Err(domain(format!(
            "radius and distance must be positive, got R={radius}, d={distance}"
        )));
    }
    if omega_p.len() != gamma.len() {
        return Err(domain("omega_p and gamma lengths differ"));
    }
    let mut media = Vec::with_capacity(omega_p.len());
    for (&w, &g) in omega_p.iter().zip(gamma) {
        if !(w >= 0.0) || !(g >= 0.0) {
            return Err(domain(format!("frequencies must be >= 0, got {w}, {g}")));
        }
        media.push(MediumGroups {
            omega_d: w * distance / C,
            gamma_d: g * distance / C,
        });
    }
    Ok(DimensionlessGroups {
        e: distance / radius,
        media,
    })
}
