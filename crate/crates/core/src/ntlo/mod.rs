//! Leading and next-to-leading order terms of the small-gap expansion.
//!
//! With e = d/R, t = el/τ and τ = sin φ, the leading terms are
//! E⁰ = −ħc/(4πRe²)·𝓛_E, F⁰ = −ħc/(2πR²e³)·𝓛_F, ∂F⁰/∂d = ħc/(πR³e⁴)·𝓛_G with
//! 𝓛 = Σ_S w_S ∫dφ sin φ ∫dt t^p e^{−2tS} Σ*[T₀*T̃₀*]^S, (w_S, p) = (S⁻², 1),
//! (S⁻¹, 2), (1, 3). The first-order terms use the same prefactors with the
//! integrand Σ*[T₀*T̃₀*]^S(𝒜 + 𝒞* + 𝒟*) + Xℬ, which is O(e).

mod coefficients;
mod engine;

use std::f64::consts::PI;

pub use coefficients::{leading_integrand, script_coefficients, x_factor, ScriptCoefficients};
pub use engine::{compute, compute_all, reduced_sums, theta_ratios, ExpansionSet, ReducedSums, ThetaRatios};

use crate::constants::HBAR_C;
use crate::geometry::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Energy,
    Force,
    Gradient,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Energy, Kind::Force, Kind::Gradient];

    pub fn index(self) -> usize {
        match self {
            Kind::Energy => 0,
            Kind::Force => 1,
            Kind::Gradient => 2,
        }
    }

    pub(crate) fn s_power(self) -> i32 {
        2 - self.index() as i32
    }

    /// SI factor multiplying the reduced sums.
    pub fn prefactor(self, geom: &Geometry) -> f64 {
        let (r, e) = (geom.radius, geom.e);
        match self {
            Kind::Energy => -HBAR_C / (4.0 * PI * r * e * e),
            Kind::Force => -HBAR_C / (2.0 * PI * r * r * e.powi(3)),
            Kind::Gradient => HBAR_C / (PI * r.powi(3) * e.powi(4)),
        }
    }

    /// Perfect-conductor PFA value: energy, force or force gradient.
    pub fn pc_reference(self, geom: &Geometry) -> f64 {
        let (r, d) = (geom.radius, geom.distance);
        let p3 = PI.powi(3) * HBAR_C * r;
        match self {
            Kind::Energy => -p3 / (720.0 * d * d),
            Kind::Force => -p3 / (360.0 * d.powi(3)),
            Kind::Gradient => p3 / (120.0 * d.powi(4)),
        }
    }

    /// Perfect-conductor value of the reduced leading sum.
    pub fn pc_reduced_leading(self) -> f64 {
        match self {
            Kind::Energy | Kind::Force => PI.powi(4) / 180.0,
            Kind::Gradient => PI.powi(4) / 120.0,
        }
    }

    /// Perfect-conductor θ constant.
    pub fn pc_theta(self) -> f64 {
        let p2 = PI * PI;
        match self {
            Kind::Energy => 1.0 / 3.0 - 20.0 / p2,
            Kind::Force => 1.0 / 6.0 - 10.0 / p2,
            Kind::Gradient => 1.0 / 9.0 - 20.0 / (3.0 * p2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Energy => "energy",
            Kind::Force => "force",
            Kind::Gradient => "gradient",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Gauss–Legendre nodes in φ ∈ (0, π/2).
    pub phi_nodes: usize,
    /// Gauss–Laguerre nodes in u = 2tS.
    pub t_nodes: usize,
    pub rel_tol_leading: f64,
    pub rel_tol_ntlo: f64,
    pub s_max: usize,
    /// Compare the first s-terms against a rule with 1.5× nodes and escalate
    /// the node counts until they agree.
    pub refine_check: bool,
    pub max_refinements: usize,
    /// Gauss–Legendre nodes for one-dimensional Lifshitz integrals.
    pub lifshitz_nodes: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            phi_nodes: 64,
            t_nodes: 48,
            rel_tol_leading: 1e-7,
            rel_tol_ntlo: 1e-6,
            s_max: 2000,
            refine_check: true,
            max_refinements: 3,
            lifshitz_nodes: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Number of s-terms summed before the stop rule fired.
    pub s_terms: usize,
    pub phi_nodes: usize,
    pub t_nodes: usize,
    pub refinements: usize,
    /// Relative error estimate (quadrature check plus series tail).
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResult {
    pub kind: Kind,
    /// J, N or N/m.
    pub leading: f64,
    pub ntlo: f64,
    /// (R/d)·ntlo/leading.
    pub theta: f64,
    pub normalized_leading: f64,
    pub normalized_sum: f64,
    pub diagnostics: Diagnostics,
}

impl ExpansionResult {
    pub fn sum(&self) -> f64 {
        self.leading + self.ntlo
    }
}
