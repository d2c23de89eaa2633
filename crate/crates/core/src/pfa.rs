//! Parallel-plate Lifshitz energy and the proximity force approximation.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::constants::HBAR_C;
use crate::dielectric::{DielectricModel, ReducedMedium};
use crate::error::{domain, Error, Result};
use crate::geometry::Geometry;
use crate::ntlo::QuadratureSettings;
use crate::quadrature::{gauss_laguerre, gauss_legendre, Rule, SeriesAccumulator};
use crate::reflection::fresnel_reduced;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfaRoute {
    /// 2πR ∫_d^∞ 𝓔(u) du over the Lifshitz density.
    LifshitzIntegral,
    /// Direct double integral in the reduced (τ, t) variables.
    ReducedDoubleIntegral,
}

/// Σ_S S^{−q} ∫dφ sin φ ∫dt t^p e^{−2tS} Σ*[r₁*r₂*]^S at gap-reduced media.
fn reduced_moment(
    m1: &ReducedMedium,
    m2: &ReducedMedium,
    p: i32,
    q: i32,
    rel_tol: f64,
    quad: &QuadratureSettings,
) -> Result<f64> {
    if matches!(m1, ReducedMedium::Vacuum) || matches!(m2, ReducedMedium::Vacuum) {
        return Ok(0.0);
    }
    let phi = gauss_legendre(quad.phi_nodes)?.mapped(0.0, FRAC_PI_2);
    let lag = gauss_laguerre(quad.t_nodes)?;
    let mut acc = SeriesAccumulator::new(rel_tol, 4);
    let mut s = 0usize;
    while !acc.converged() && s < quad.s_max {
        s += 1;
        let sf = s as f64;
        let mut term = 0.0;
        for (&ph, &wp) in phi.nodes.iter().zip(&phi.weights) {
            let (tau, c) = ph.sin_cos();
            let mut inner = 0.0;
            for (&u, &wu) in lag.nodes.iter().zip(&lag.weights) {
                let t = u / (2.0 * sf);
                let r1 = fresnel_reduced(m1.eps_at(t * c)?, tau)?;
                let r2 = fresnel_reduced(m2.eps_at(t * c)?, tau)?;
                let pw = (r1.te * r2.te).powi(s as i32) + (r1.tm * r2.tm).powi(s as i32);
                inner += wu * t.powi(p) * pw;
            }
            term += wp * tau * inner;
        }
        acc.push(term * sf.powi(-q) / (2.0 * sf));
    }
    let tail = acc.tail();
    let total = acc.partial_sum() + tail.tail;
    if !acc.converged() && tail.uncertainty > rel_tol * total.abs() {
        return Err(Error::Convergence {
            what: "Lifshitz s-series".into(),
            estimate: total,
            error_bound: tail.uncertainty,
            detail: format!("s reached {s}"),
        });
    }
    Ok(total)
}

fn media(model1: &DielectricModel, model2: &DielectricModel, d: f64) -> Result<(ReducedMedium, ReducedMedium)> {
    if !(d > 0.0) {
        return Err(domain(format!("distance must be positive, got {d}")));
    }
    Ok((ReducedMedium::new(model1, d)?, ReducedMedium::new(model2, d)?))
}

/// Lifshitz energy per unit area between two half-spaces at distance d (J/m²).
pub fn lifshitz_density(
    model1: &DielectricModel,
    model2: &DielectricModel,
    d: f64,
    quad: &QuadratureSettings,
) -> Result<f64> {
    let (m1, m2) = media(model1, model2, d)?;
    let m = reduced_moment(&m1, &m2, 2, 1, quad.rel_tol_leading * 0.1, quad)?;
    Ok(-HBAR_C / (4.0 * PI * PI * d.powi(3)) * m)
}

/// d𝓔/dd of the Lifshitz density (J/m³).
pub fn lifshitz_density_derivative(
    model1: &DielectricModel,
    model2: &DielectricModel,
    d: f64,
    quad: &QuadratureSettings,
) -> Result<f64> {
    let (m1, m2) = media(model1, model2, d)?;
    let m = reduced_moment(&m1, &m2, 3, 0, quad.rel_tol_leading * 0.1, quad)?;
    Ok(HBAR_C / (2.0 * PI * PI * d.powi(4)) * m)
}

fn panel(rule: &Rule, a: f64, b: f64, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let m = rule.mapped(a, b);
    let mut s = 0.0;
    for (&x, &w) in m.nodes.iter().zip(&m.weights) {
        s += w * f(x)?;
    }
    Ok(s)
}

fn adaptive(rule: &Rule, a: f64, b: f64, whole: f64, tol: f64, depth: usize, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = panel(rule, a, mid, f)?;
    let right = panel(rule, mid, b, f)?;
    let split = left + right;
    if (split - whole).abs() <= tol * split.abs() {
        return Ok(split);
    }
    if depth == 0 {
        return Err(Error::Convergence {
            what: "PFA distance integral".into(),
            estimate: split,
            error_bound: (split - whole).abs(),
            detail: "bisection depth exhausted".into(),
        });
    }
    Ok(adaptive(rule, a, mid, left, tol, depth - 1, f)? + adaptive(rule, mid, b, right, tol, depth - 1, f)?)
}

/// PFA sphere-plate energy (J); `model1` is the sphere.
pub fn pfa_energy(
    model1: &DielectricModel,
    model2: &DielectricModel,
    geom: &Geometry,
    quad: &QuadratureSettings,
    route: PfaRoute,
) -> Result<f64> {
    let d = geom.distance;
    let r = geom.radius;
    match route {
        PfaRoute::ReducedDoubleIntegral => {
            let (m1, m2) = media(model1, model2, d)?;
            let m = reduced_moment(&m1, &m2, 1, 2, quad.rel_tol_leading * 0.1, quad)?;
            Ok(-HBAR_C / (4.0 * PI * r * geom.e * geom.e) * m)
        }
        PfaRoute::LifshitzIntegral => {
            if model1.is_vacuum() || model2.is_vacuum() {
                return Ok(0.0);
            }
            // u = d(1+x)/(1−x) maps (−1, 1) onto (0, ∞); the integrand is
            // restricted to u > d, i.e. x > 0.
            let f = |x: f64| -> Result<f64> {
                let u = d * (1.0 + x) / (1.0 - x);
                let jac = 2.0 * d / ((1.0 - x) * (1.0 - x));
                Ok(lifshitz_density(model1, model2, u, quad)? * jac)
            };
            let rule = gauss_legendre(quad.lifshitz_nodes)?;
            let whole = panel(&rule, 0.0, 1.0, &f)?;
            let v = adaptive(&rule, 0.0, 1.0, whole, quad.rel_tol_leading * 0.1, 6, &f)?;
            Ok(2.0 * PI * r * v)
        }
    }
}

/// PFA force 2πR𝓔(d) (N).
pub fn pfa_force(model1: &DielectricModel, model2: &DielectricModel, geom: &Geometry, quad: &QuadratureSettings) -> Result<f64> {
    Ok(2.0 * PI * geom.radius * lifshitz_density(model1, model2, geom.distance, quad)?)
}

/// PFA force gradient 2πR d𝓔/dd (N/m).
pub fn pfa_gradient(model1: &DielectricModel, model2: &DielectricModel, geom: &Geometry, quad: &QuadratureSettings) -> Result<f64> {
    Ok(2.0 * PI * geom.radius * lifshitz_density_derivative(model1, model2, geom.distance, quad)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ev_to_angular_frequency, C};
    use approx::assert_relative_eq;

    fn gold() -> DielectricModel {
        DielectricModel::Plasma { omega_p: ev_to_angular_frequency(9.0).unwrap() }
    }

    #[test]
    fn pc_density_and_energy() {
        let q = QuadratureSettings::default();
        let pc = DielectricModel::PerfectConductor;
        let d = 2e-7;
        let e = lifshitz_density(&pc, &pc, d, &q).unwrap();
        assert_relative_eq!(e, -PI * PI * HBAR_C / (720.0 * d.powi(3)), max_relative = 1e-9);
        let g = Geometry::new(1e-4, d).unwrap();
        let expect = -PI.powi(3) * HBAR_C * g.radius / (720.0 * d * d);
        for route in [PfaRoute::LifshitzIntegral, PfaRoute::ReducedDoubleIntegral] {
            assert_relative_eq!(pfa_energy(&pc, &pc, &g, &q, route).unwrap(), expect, max_relative = 1e-8);
        }
        assert_relative_eq!(pfa_force(&pc, &pc, &g, &q).unwrap(), -PI.powi(3) * HBAR_C * g.radius / (360.0 * d.powi(3)), max_relative = 1e-9);
        assert_relative_eq!(pfa_gradient(&pc, &pc, &g, &q).unwrap(), PI.powi(3) * HBAR_C * g.radius / (120.0 * d.powi(4)), max_relative = 1e-9);
    }

    #[test]
    fn vacuum_is_zero() {
        let q = QuadratureSettings::default();
        let g = Geometry::new(1e-3, 1e-6).unwrap();
        assert_eq!(lifshitz_density(&DielectricModel::Vacuum, &gold(), 1e-7, &q).unwrap(), 0.0);
        for route in [PfaRoute::LifshitzIntegral, PfaRoute::ReducedDoubleIntegral] {
            assert_eq!(pfa_energy(&DielectricModel::Vacuum, &gold(), &g, &q, route).unwrap(), 0.0);
        }
    }

    /// Brute-force oracle: Gauss–Legendre in (κ, q) on mapped infinite ranges
    /// with the logarithm kept unexpanded.
    fn brute_density(omega_p: f64, d: f64) -> f64 {
        let rule = gauss_legendre(200).unwrap();
        let kp = omega_p / C;
        let mut sum = 0.0;
        // κ = a·x/(1−x), k⊥ = b·y/(1−y) with scales 1/d
        let map = |x: f64| {
            let y = 0.5 * (x + 1.0);
            (y / (1.0 - y) / d, 0.5 / ((1.0 - y) * (1.0 - y)) / d)
        };
        for (&x, &wx) in rule.nodes.iter().zip(&rule.weights) {
            let (kappa, jk) = map(x);
            let eps = 1.0 + (kp / kappa).powi(2);
            for (&y, &wy) in rule.nodes.iter().zip(&rule.weights) {
                let (kperp, jp) = map(y);
                let q = (kappa * kappa + kperp * kperp).sqrt();
                let root = ((eps - 1.0) * kappa * kappa + q * q).sqrt();
                let rte = (root - q) / (root + q);
                let rtm = (eps * q - root) / (eps * q + root);
                let ex = (-2.0 * q * d).exp();
                let f = (-(rte * rte * ex)).ln_1p() + (-(rtm * rtm * ex)).ln_1p();
                sum += wx * wy * jk * jp * kperp * f;
            }
        }
        HBAR_C / (4.0 * PI * PI) * sum
    }

    #[test]
    fn gold_density_against_brute_force() {
        let q = QuadratureSettings::default();
        let d = 1e-7;
        let v = lifshitz_density(&gold(), &gold(), d, &q).unwrap();
        let brute = brute_density(gold().plasma_frequency().unwrap(), d);
        assert!(v < 0.0 && v > -PI * PI * HBAR_C / (720.0 * d.powi(3)));
        assert_relative_eq!(v, brute, max_relative = 1e-6);
    }

    #[test]
    fn routes_agree_and_symmetric() {
        let q = QuadratureSettings::default();
        let g = Geometry::new(1e-3, 1e-6).unwrap();
        let drude = DielectricModel::Drude { omega_p: 1.0e16, gamma: 5e13 };
        let a = pfa_energy(&gold(), &gold(), &g, &q, PfaRoute::LifshitzIntegral).unwrap();
        let b = pfa_energy(&gold(), &gold(), &g, &q, PfaRoute::ReducedDoubleIntegral).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-8);
        let x = pfa_energy(&gold(), &drude, &g, &q, PfaRoute::ReducedDoubleIntegral).unwrap();
        let y = pfa_energy(&drude, &gold(), &g, &q, PfaRoute::ReducedDoubleIntegral).unwrap();
        assert_relative_eq!(x, y, max_relative = 1e-12);
    }
}
