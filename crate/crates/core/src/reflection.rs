//! Closed-form reflection factors in the reduced angle τ.
//!
//! Plate factors (T̃₀, K₁, K₂) and sphere factors (T₀, W₁, W₂, Y₂) are the
//! leading and first subleading Taylor data of the plate reflection and of the
//! Debye-expanded Mie coefficients around the stationary point. TM quantities
//! are sign-normalized so that T₀^TM, T̃₀^TM ≥ 0.

use crate::dielectric::Permittivity;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarizationPair {
    pub te: f64,
    pub tm: f64,
}

impl PolarizationPair {
    pub const ZERO: Self = Self { te: 0.0, tm: 0.0 };

    pub fn new(te: f64, tm: f64) -> Self {
        Self { te, tm }
    }

    pub fn get(&self, pol: usize) -> f64 {
        if pol == 0 {
            self.te
        } else {
            self.tm
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateFactors {
    pub t0: PolarizationPair,
    pub k1: PolarizationPair,
    pub k2: PolarizationPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereFactors {
    pub t0: PolarizationPair,
    pub w1: PolarizationPair,
    pub w2: PolarizationPair,
    pub y2: PolarizationPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripFactors {
    pub t0: PolarizationPair,
    pub t0_plate: PolarizationPair,
    pub k1: PolarizationPair,
    pub k2: PolarizationPair,
    pub w1: PolarizationPair,
    pub w2: PolarizationPair,
    pub y2: PolarizationPair,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("tau must lie in (0, 1), got {tau}")))
    }
}

fn check_eps(eps: Permittivity) -> Result<()> {
    match eps {
        Permittivity::Finite(v) if !(v >= 1.0) || !v.is_finite() => {
            Err(domain(format!("permittivity must be finite and >= 1, got {v}")))
        }
        _ => Ok(()),
    }
}

/// T₀ pair for finite ε with c2 = 1 − τ², written without the ε → 1
/// cancellation of the printed (r−1)/(r+1), (ε−r)/(ε+r).
#[inline]
pub(crate) fn t0_finite(eps: f64, tau: f64, c2: f64) -> (PolarizationPair, f64) {
    let r2 = eps * c2 + tau * tau;
    let r = r2.sqrt();
    let em1 = eps - 1.0;
    let te = em1 * c2 / ((r + 1.0) * (r + 1.0));
    let tm = em1 * (eps + tau * tau) / ((eps + r) * (eps + r));
    (PolarizationPair { te, tm }, r)
}

#[inline]
pub(crate) fn plate_factors_c(eps: Permittivity, tau: f64, c2: f64) -> PlateFactors {
    let eps = match eps {
        Permittivity::Infinite => {
            return PlateFactors {
                t0: PolarizationPair::new(1.0, 1.0),
                k1: PolarizationPair::ZERO,
                k2: PolarizationPair::ZERO,
            }
        }
        Permittivity::Finite(v) => v,
    };
    let (t0, r) = t0_finite(eps, tau, c2);
    let r2 = r * r;
    let r3 = r2 * r;
    let t2 = tau * tau;
    let et = eps + t2;
    let k1 = PolarizationPair::new(-2.0 * tau / r, 2.0 * eps * tau * c2 / (r * et));
    let k2te = -eps * c2 / r3 + 2.0 * t2 / r2;
    let k2tm = eps * eps * c2 * c2 / (r3 * et)
        - t2 * (eps * eps * c2 + eps + 1.0) / (r2 * et)
        + t2 * (eps * r + 1.0).powi(2) / (r2 * (r + eps).powi(2));
    PlateFactors {
        t0,
        k1,
        k2: PolarizationPair::new(k2te, k2tm),
    }
}

#[inline]
pub(crate) fn sphere_factors_c(eps: Permittivity, tau: f64, c2: f64) -> SphereFactors {
    let t2 = tau * tau;
    let eps = match eps {
        Permittivity::Infinite => {
            return SphereFactors {
                t0: PolarizationPair::new(1.0, 1.0),
                w1: PolarizationPair::ZERO,
                w2: PolarizationPair::ZERO,
                y2: PolarizationPair::new((3.0 - 5.0 * t2) / 12.0, (7.0 * t2 + 3.0) / 12.0),
            }
        }
        Permittivity::Finite(v) => v,
    };
    let (t0, r) = t0_finite(eps, tau, c2);
    let r2 = r * r;
    let r3 = r2 * r;
    let t4 = t2 * t2;
    let t6 = t4 * t2;
    let et = eps + t2;
    let w1 = PolarizationPair::new(-4.0 * tau / r, 4.0 * eps * tau * c2 / (r * et));
    let poly = 8.0 * t2 + 4.0 * t4 + 4.0 * eps - 4.0 * eps * t4;
    let w2te = poly / r3 + 4.0 * c2 * c2 * (eps + r).powi(2) / (t2 * r2 * (r + 1.0).powi(2))
        - 4.0 * c2 * et / (t2 * r2);
    let w2tm = -eps * c2 * poly / (et * r3)
        + 4.0 * c2 * c2 * eps * eps * (1.0 + r).powi(2) / (t2 * r2 * (r + eps).powi(2))
        - 4.0 * eps * eps * c2 * c2 * c2 / (t2 * et * r2);
    let y2te = -tau / r
        - (8.0 * eps * t2 - 3.0 * eps - 5.0 * eps * t4 + 9.0 * t2 + 5.0 * t4) / (12.0 * r2);
    let e2 = eps * eps;
    let y2tm = eps * c2 * tau / (et * r)
        - (7.0 * e2 * t4 - 4.0 * e2 * t2 - 3.0 * e2 - 5.0 * eps * t6 + 13.0 * eps * t4
            - 18.0 * eps * t2
            + 5.0 * t6
            - 3.0 * t4)
            / (12.0 * et * r2);
    SphereFactors {
        t0,
        w1,
        w2: PolarizationPair::new(w2te, w2tm),
        y2: PolarizationPair::new(y2te, y2tm),
    }
}

/// T̃₀, K₁, K₂ of the plate at permittivity `eps2`.
pub fn plate_factors(eps2: Permittivity, tau: f64) -> Result<PlateFactors> {
    check_tau(tau)?;
    check_eps(eps2)?;
    Ok(plate_factors_c(eps2, tau, 1.0 - tau * tau))
}

/// T₀, W₁, W₂, Y₂ of the sphere at permittivity `eps1`.
pub fn sphere_factors(eps1: Permittivity, tau: f64) -> Result<SphereFactors> {
    check_tau(tau)?;
    check_eps(eps1)?;
    Ok(sphere_factors_c(eps1, tau, 1.0 - tau * tau))
}

pub fn round_trip_factors(eps1: Permittivity, eps2: Permittivity, tau: f64) -> Result<RoundTripFactors> {
    let s = sphere_factors(eps1, tau)?;
    let p = plate_factors(eps2, tau)?;
    Ok(RoundTripFactors {
        t0: s.t0,
        t0_plate: p.t0,
        k1: p.k1,
        k2: p.k2,
        w1: s.w1,
        w2: s.w2,
        y2: s.y2,
    })
}

/// Lifshitz reflection coefficients at imaginary frequency κ = ξ/c and
/// wavenumber q = √(κ² + k⊥²).
pub fn fresnel(eps: Permittivity, kappa: f64, q: f64) -> Result<PolarizationPair> {
    check_eps(eps)?;
    if !(kappa >= 0.0) || !(q >= kappa) || q == 0.0 {
        return Err(domain(format!("need q >= kappa >= 0 with q > 0, got kappa={kappa}, q={q}")));
    }
    let eps = match eps {
        Permittivity::Infinite => return Ok(PolarizationPair::new(1.0, 1.0)),
        Permittivity::Finite(v) => v,
    };
    let k2 = (eps - 1.0) * kappa * kappa;
    let root = (k2 + q * q).sqrt();
    Ok(PolarizationPair {
        te: k2 / ((root + q) * (root + q)),
        tm: (eps * q - root) / (eps * q + root),
    })
}

/// Fresnel coefficients in the reduced variable τ = k⊥/q.
pub fn fresnel_reduced(eps: Permittivity, tau: f64) -> Result<PolarizationPair> {
    check_tau(tau)?;
    check_eps(eps)?;
    Ok(match eps {
        Permittivity::Infinite => PolarizationPair::new(1.0, 1.0),
        Permittivity::Finite(v) => t0_finite(v, tau, 1.0 - tau * tau).0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const F: fn(f64) -> Permittivity = Permittivity::Finite;

    fn printed_t0(eps: f64, tau: f64) -> (f64, f64) {
        let r = (eps * (1.0 - tau * tau) + tau * tau).sqrt();
        ((r - 1.0) / (r + 1.0), (eps - r) / (eps + r))
    }

    #[test]
    fn plate_reference_values() {
        let p = plate_factors(F(2.0), 0.5).unwrap();
        assert_relative_eq!(p.t0.te, 0.138_998_251_913_879_2, max_relative = 1e-14);
        assert_relative_eq!(p.t0.tm, 0.203_776_612_387_030_6, max_relative = 1e-14);
        assert_relative_eq!(p.k1.te, -0.755_928_946_018_454_5, max_relative = 1e-14);
        let v = plate_factors(F(1.0), 0.5).unwrap();
        assert_eq!(v.t0, PolarizationPair::ZERO);
        assert!(plate_factors(F(2.0), 1.0).is_err());
        assert!(plate_factors(F(0.5), 0.5).is_err());
    }

    #[test]
    fn sphere_reference_values() {
        let s = sphere_factors(F(1.0), 0.3).unwrap();
        assert_eq!(s.t0, PolarizationPair::ZERO);
        let pc = sphere_factors(Permittivity::Infinite, 0.5).unwrap();
        assert_relative_eq!(pc.y2.te, 0.145_833_333_333_333_3, max_relative = 1e-14);
        assert_eq!(pc.w1, PolarizationPair::ZERO);
    }

    #[test]
    fn fresnel_values() {
        assert_eq!(fresnel(F(1.0), 1.0, 2.0).unwrap(), PolarizationPair::ZERO);
        let r = fresnel(F(4.0), 0.0, 3.0).unwrap();
        assert_eq!(r.te, 0.0);
        assert_relative_eq!(r.tm, 0.6, max_relative = 1e-15);
        assert_eq!(fresnel(Permittivity::Infinite, 1.0, 2.0).unwrap(), PolarizationPair::new(1.0, 1.0));
        assert!(fresnel(F(2.0), 2.0, 1.0).is_err());
        let r = fresnel_reduced(F(3.0), 0.2).unwrap();
        assert_relative_eq!(r.tm, 0.274_209_787_108_382_0, max_relative = 1e-14);
        assert_eq!(fresnel_reduced(F(2.0), 0.5).unwrap(), plate_factors(F(2.0), 0.5).unwrap().t0);
    }

    #[test]
    fn fresnel_linear_near_unit_eps() {
        let a = fresnel_reduced(F(1.0 + 1e-6), 0.4).unwrap();
        let b = fresnel_reduced(F(1.0 + 2e-6), 0.4).unwrap();
        assert_relative_eq!(b.te / a.te, 2.0, max_relative = 1e-5);
        assert_relative_eq!(b.tm / a.tm, 2.0, max_relative = 1e-5);
    }

    #[test]
    fn stable_t0_matches_printed_form() {
        let pts = [
            (1.3, 0.1), (2.0, 0.5), (7.25, 0.6), (15.0, 0.9), (120.0, 0.05),
            (3.3, 0.33), (1.01, 0.77), (44.0, 0.44), (1e3, 0.99), (5.5, 0.2),
            (2.2, 0.95), (9.9, 0.15), (60.0, 0.5), (1.5, 0.3), (300.0, 0.7),
            (1.1, 0.01), (25.0, 0.25), (4.0, 0.8), (80.0, 0.12), (6.0, 0.66),
        ];
        for (eps, tau) in pts {
            let (te, tm) = printed_t0(eps, tau);
            let p = fresnel_reduced(F(eps), tau).unwrap();
            assert_relative_eq!(p.te, te, max_relative = 1e-12);
            assert_relative_eq!(p.tm, tm, max_relative = 1e-12);
        }
    }

    #[test]
    fn pc_limits_from_large_eps() {
        let tau = 0.5;
        let pc_s = sphere_factors(Permittivity::Infinite, tau).unwrap();
        let pc_p = plate_factors(Permittivity::Infinite, tau).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e2, 1e4, 1e6, 1e8] {
            let s = sphere_factors(F(eps), tau).unwrap();
            let p = plate_factors(F(eps), tau).unwrap();
            let dev = [
                1.0 - s.t0.te, 1.0 - s.t0.tm, 1.0 - p.t0.te, 1.0 - p.t0.tm,
                s.w1.te.abs(), s.w1.tm.abs(), p.k1.te.abs(), p.k1.tm.abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            assert!(dev < prev);
            prev = dev;
        }
        let s = sphere_factors(F(1e8), tau).unwrap();
        let p = plate_factors(F(1e8), tau).unwrap();
        assert!(s.w1.te.abs() < 1e-3 && s.w1.tm.abs() < 1e-3);
        for (a, b) in [
            (s.y2.te, pc_s.y2.te), (s.y2.tm, pc_s.y2.tm),
            (s.w2.te, pc_s.w2.te), (s.w2.tm, pc_s.w2.tm),
            (p.k2.te, pc_p.k2.te), (p.k2.tm, pc_p.k2.tm),
        ] {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    // Parent-function oracle: K₁, K₂ are the logarithmic Taylor data of the
    // plate factor along the angle, W₁, W₂, Y₂ those of the Debye-expanded
    // Mie ratio in the multipole order.
    fn plate_parent(theta: f64, eps: f64, tau: f64, pol: usize) -> f64 {
        let th0 = (tau / (1.0 - tau * tau).sqrt()).asinh();
        let (sh, ch) = ((th0 + theta).sinh(), (th0 + theta).cosh());
        let r = (eps + sh * sh).sqrt();
        let a = if pol == 0 { 1.0 } else { eps };
        let v = (r - a * ch) / (r + a * ch);
        if pol == 0 { v } else { -v }
    }

    fn debye_ratio(nu: f64, l: f64, eps: f64, tau: f64, pol: usize, full: bool) -> f64 {
        let om = l * (1.0 - tau * tau).sqrt() / tau;
        let z = om / nu;
        let z1 = eps.sqrt() * z;
        let tz = 1.0 / (1.0 + z * z).sqrt();
        let tz1 = 1.0 / (1.0 + z1 * z1).sqrt();
        let u1 = |t: f64| t / 8.0 - 5.0 * t.powi(3) / 24.0;
        let m1 = |t: f64| t / 8.0 + 7.0 * t.powi(3) / 24.0;
        let a = if pol == 0 { 1.0 } else { eps };
        let k = if full { 1.0 / nu } else { 0.0 };
        let s1 = (1.0 + z1 * z1).sqrt();
        let s0 = (1.0 + z * z).sqrt();
        let num = s1 * (1.0 + k * u1(tz) + k * m1(tz1)) - a * s0 * (1.0 + k * u1(tz1) + k * m1(tz));
        let den = s1 * (1.0 - k * u1(tz) + k * m1(tz1)) + a * s0 * (1.0 + k * u1(tz1) - k * m1(tz));
        num / den
    }

    #[test]
    fn closed_forms_match_parent_functions() {
        let h = 1e-3;
        let l = 1e6;
        for (eps, tau) in [(2.0, 0.5), (7.3, 0.3), (50.0, 0.8), (1.5, 0.1)] {
            let s = sphere_factors(F(eps), tau).unwrap();
            let p = plate_factors(F(eps), tau).unwrap();
            for pol in 0..2 {
                let f = |x: f64| plate_parent(x, eps, tau, pol);
                let f0 = f(0.0);
                let d1 = (f(h) - f(-h)) / (2.0 * h);
                let d2 = (f(h) - 2.0 * f0 + f(-h)) / (h * h);
                assert!((d1 / f0 - p.k1.get(pol)).abs() < 1e-5);
                assert!((d2 / (2.0 * f0) - p.k2.get(pol)).abs() < 1e-5);
                assert!((f0 - p.t0.get(pol)).abs() < 1e-13);

                let g = |x: f64| debye_ratio(l * (1.0 + x), l, eps, tau, pol, false);
                let g0 = g(0.0);
                let g1 = (g(h) - g(-h)) / (2.0 * h);
                let g2 = (g(h) - 2.0 * g0 + g(-h)) / (h * h);
                let w1 = 2.0 / tau * g1 / g0;
                let w2 = 2.0 * g2 / (tau * tau * g0);
                let full = debye_ratio(l, l, eps, tau, pol, true);
                let y2 = (0.5 * g1 / g0 + l * (full - g0) / g0) / tau;
                let sign = if pol == 0 { 1.0 } else { -1.0 };
                assert!((sign * g0 - s.t0.get(pol)).abs() < 1e-12);
                assert!((w1 - s.w1.get(pol)).abs() < 1e-5, "w1 {eps} {tau} {pol}");
                assert!((w2 - s.w2.get(pol)).abs() < 1e-4 * (1.0 + w2.abs()), "w2 {eps} {tau} {pol}");
                assert!((y2 - s.y2.get(pol)).abs() < 1e-4, "y2 {eps} {tau} {pol}");
            }
        }
    }

    proptest! {
        #[test]
        fn bounds_signs_identity(eps in 1.0f64..1e6, tau in 1e-3f64..0.999) {
            let s = sphere_factors(F(eps), tau).unwrap();
            let p = plate_factors(F(eps), tau).unwrap();
            let r = fresnel_reduced(F(eps), tau).unwrap();
            prop_assert_eq!(s.t0, p.t0);
            prop_assert_eq!(s.t0, r);
            for v in [s.t0.te, s.t0.tm] {
                prop_assert!((0.0..1.0).contains(&v));
            }
            prop_assert!(p.k1.te <= 0.0 && p.k1.tm >= 0.0);
            prop_assert!(s.w1.te <= 0.0 && s.w1.tm >= 0.0);
        }

        #[test]
        fn monotone_in_eps(eps in 1.0f64..1e5, f in 1.001f64..10.0, tau in 1e-3f64..0.999) {
            let a = fresnel_reduced(F(eps), tau).unwrap();
            let b = fresnel_reduced(F(eps * f), tau).unwrap();
            prop_assert!(b.te > a.te && b.tm > a.tm);
        }

        #[test]
        fn fresnel_physical_matches_reduced(eps in 1.0f64..1e4, tau in 1e-3f64..0.999, q in 1e3f64..1e9) {
            let kappa = q * (1.0 - tau * tau).sqrt();
            let a = fresnel(F(eps), kappa, q).unwrap();
            let b = fresnel_reduced(F(eps), tau).unwrap();
            prop_assert!((a.te - b.te).abs() < 1e-12 && (a.tm - b.tm).abs() < 1e-12);
        }
    }
}
