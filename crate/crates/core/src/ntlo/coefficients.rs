//! Script coefficient families of the next-to-leading-order integrand.

use super::Kind;
use crate::dielectric::Permittivity;
use crate::error::{domain, Result};
use crate::reflection::{plate_factors, sphere_factors, PolarizationPair};

/// Coefficients at series index s (S = s + 1), angle τ, multipole variable l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptCoefficients {
    pub a_term: f64,
    pub b_term: f64,
    pub c_v: f64,
    pub c_j: f64,
    pub d_vv: f64,
    pub d_jj: f64,
    pub d_vj: f64,
    pub d_v: f64,
    pub d_j: f64,
    pub s: usize,
    pub tau: f64,
    pub l: f64,
    pub e: f64,
}

/// Kind-specific 𝒜, C_V, C_J with S = s + 1.
#[inline]
pub(crate) fn kind_terms(kind: Kind, sf: f64, tau: f64, l: f64, e: f64) -> (f64, f64, f64) {
    let t2 = tau * tau;
    let s2 = sf * sf;
    let s3 = s2 * sf;
    let el = e * e * l * tau / 3.0 * (s3 + 2.0 * sf);
    let cv_e = -e * tau / 3.0 * (s3 + 2.0 * sf);
    let cj_e = -e * tau / 6.0 * (s3 - sf);
    let lt = l * tau;
    match kind {
        Kind::Energy => (
            el + e / 3.0 * ((t2 - 2.0) * s2 - 3.0 * tau * sf + 2.0 * t2 - 1.0)
                + (t2 * t2 + t2 - 12.0) / (12.0 * lt) * sf
                + (1.0 + tau) * (1.0 - t2) / (2.0 * lt)
                - tau * (1.0 - t2) / (3.0 * l * sf),
            cv_e + (1.0 - t2) / (6.0 * l) * s2 + tau / (2.0 * l) * sf + (1.0 - 4.0 * t2) / (12.0 * l),
            cj_e + (s2 - 1.0) / (12.0 * l),
        ),
        Kind::Force => (
            el - e / 3.0 * (2.0 * s2 + 3.0 * tau * sf + 1.0)
                + (-t2 * t2 + 5.0 * t2 - 12.0) / (12.0 * lt) * sf
                + (1.0 + tau - t2) / (2.0 * lt)
                - tau / (6.0 * l * sf),
            cv_e + s2 / (6.0 * l) + tau / (2.0 * l) * sf + 1.0 / (12.0 * l),
            cj_e + (1.0 + t2) / (12.0 * l) * (s2 - 1.0),
        ),
        Kind::Gradient => (
            el - e / 3.0 * ((2.0 + t2) * s2 + 3.0 * tau * sf + 1.0 + 2.0 * t2)
                + (-t2 * t2 + 9.0 * t2 - 12.0) / (12.0 * lt) * sf
                + (1.0 + tau - t2 + t2 * tau) / (2.0 * lt),
            cv_e + (1.0 + t2) / (6.0 * l) * s2 + tau / (2.0 * l) * sf + (1.0 + 4.0 * t2) / (12.0 * l),
            cj_e + (1.0 + 2.0 * t2) / (12.0 * l) * (s2 - 1.0),
        ),
    }
}

/// Kind-independent ℬ and D-family: (ℬ, D_VV, D_JJ, D_VJ, D_V, D_J).
#[inline]
pub(crate) fn shared_terms(sf: f64, tau: f64, l: f64) -> [f64; 6] {
    let s2 = sf * sf;
    let s3 = s2 * sf;
    let q = tau / l;
    [
        (1.0 - tau * tau) / (2.0 * l * tau * sf),
        q / 12.0 * (s3 - 2.0 * s2 + 2.0 * sf - 1.0),
        q / 48.0 * (s3 - 2.0 * s2 - sf + 2.0),
        q / 12.0 * (s3 - sf),
        q / 6.0 * (2.0 * s2 - 3.0 * sf + 1.0),
        q / 12.0 * (s2 - 1.0),
    ]
}

pub fn script_coefficients(kind: Kind, s: usize, tau: f64, l: f64, e: f64) -> Result<ScriptCoefficients> {
    if !(tau > 0.0 && tau < 1.0) || !(l > 0.0) || !(e > 0.0) {
        return Err(domain(format!("need 0 < tau < 1, l > 0, e > 0; got {tau}, {l}, {e}")));
    }
    let sf = (s + 1) as f64;
    let (a_term, c_v, c_j) = kind_terms(kind, sf, tau, l, e);
    let [b_term, d_vv, d_jj, d_vj, d_v, d_j] = shared_terms(sf, tau, l);
    Ok(ScriptCoefficients { a_term, b_term, c_v, c_j, d_vv, d_jj, d_vj, d_v, d_j, s, tau, l, e })
}

/// (a^n − b^n)/(a − b) for a, b ≥ 0. When the arguments agree to 1e-9
/// relative the derivative limit n·a^{n−1} is used, with its first two
/// corrections in the relative gap.
#[inline]
pub(crate) fn power_quotient(a: f64, b: f64, n: u32) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if n == 0 {
        return 0.0;
    }
    if hi == 0.0 {
        return if n == 1 { 1.0 } else { 0.0 };
    }
    let delta = (lo - hi) / hi;
    if hi - lo < 1e-9 * hi {
        let m = n as f64 - 1.0;
        return n as f64 * hi.powi(n as i32 - 1) * (1.0 + m * delta / 2.0 + m * (m - 1.0) * delta * delta / 6.0);
    }
    hi.powi(n as i32) * (n as f64 * delta.ln_1p()).exp_m1() / (lo - hi)
}

/// Cross-polarization factor X from the products p* = T₀*T̃₀*.
#[inline]
pub(crate) fn x_from_products(p_te: f64, p_tm: f64, cross: f64, s: usize) -> f64 {
    let sf = (s + 1) as f64;
    let n = s as u32;
    sf * (cross * power_quotient(p_te, p_tm, n + 1) + 2.0 * p_te * p_tm * power_quotient(p_te, p_tm, n))
}

pub fn x_factor(t0: PolarizationPair, t0_plate: PolarizationPair, s: usize) -> f64 {
    let p_te = t0.te * t0_plate.te;
    let p_tm = t0.tm * t0_plate.tm;
    let cross = t0.te * t0_plate.tm + t0.tm * t0_plate.te;
    x_from_products(p_te, p_tm, cross, s)
}

/// Leading-term integrand (τ/√(1−τ²))·t·e^{−2tS}·Σ*[T₀*T̃₀*]^S.
pub fn leading_integrand(s: usize, tau: f64, t: f64, eps1: Permittivity, eps2: Permittivity) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    let sp = sphere_factors(eps1, tau)?;
    let pl = plate_factors(eps2, tau)?;
    let n = (s + 1) as i32;
    let sum = (sp.t0.te * pl.t0.te).powi(n) + (sp.t0.tm * pl.t0.tm).powi(n);
    Ok(tau / (1.0 - tau * tau).sqrt() * t * (-2.0 * t * n as f64).exp() * sum)
}
