use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::coefficients::{kind_terms, shared_terms, x_from_products};
use super::{Diagnostics, ExpansionResult, Kind, QuadratureSettings};
use crate::dielectric::{DielectricModel, Permittivity, ReducedMedium};
use crate::error::{domain, Error, Result};
use crate::geometry::Geometry;
use crate::quadrature::{gauss_laguerre, gauss_legendre, SeriesAccumulator};
use crate::reflection::{plate_factors_c, sphere_factors_c};

/// Dimensionless sums: `leading[k]` is 𝓛 and `ntlo[k]` its first-order
/// companion (∝ e) for kind index k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSums {
    pub leading: [f64; 3],
    pub ntlo: [f64; 3],
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionSet {
    pub energy: ExpansionResult,
    pub force: ExpansionResult,
    pub gradient: ExpansionResult,
}

impl ExpansionSet {
    pub fn get(&self, kind: Kind) -> &ExpansionResult {
        match kind {
            Kind::Energy => &self.energy,
            Kind::Force => &self.force,
            Kind::Gradient => &self.gradient,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRatios {
    pub theta_e: f64,
    pub theta_f: f64,
    pub theta_g: f64,
}

struct Grid {
    /// (τ, cos φ, cos²φ, weight) per φ node.
    phi: Vec<(f64, f64, f64, f64)>,
    /// (u, weight) per Laguerre node.
    u: Vec<(f64, f64)>,
}

/// Upper end of the graded panels used when a medium is damped or tabulated.
const PANEL_CUT: f64 = 8.0;
const PANELS: i32 = 5;

impl Grid {
    fn new(phi_nodes: usize, t_nodes: usize, graded: bool) -> Result<Self> {
        let phi = if graded { graded_phi_rule(phi_nodes)? } else { plain_phi_rule(phi_nodes)? };
        let u = if graded { graded_u_rule(t_nodes)? } else { laguerre_u_rule(t_nodes, 0.0)? };
        Ok(Self { phi, u })
    }
}

fn plain_phi_rule(n: usize) -> Result<Vec<(f64, f64, f64, f64)>> {
    let pr = gauss_legendre(n)?.mapped(0.0, FRAC_PI_2);
    Ok(pr
        .nodes
        .iter()
        .zip(&pr.weights)
        .map(|(&p, &w)| {
            let (s, c) = p.sin_cos();
            (s, c, c * c, w)
        })
        .collect())
}

/// Damping also makes the integrand non-analytic at φ = π/2, where
/// w = t cos φ vanishes. With ψ = π/2 − φ = z², Gauss–Legendre panels in z
/// shrink geometrically towards ψ = 0.
fn graded_phi_rule(n: usize) -> Result<Vec<(f64, f64, f64, f64)>> {
    let per = (n / 4).max(8);
    let z_top = FRAC_PI_2.sqrt();
    let mut out = Vec::with_capacity(PANELS as usize * per);
    let mut lo = 0.0;
    for k in (0..PANELS).rev() {
        let hi = z_top * 4f64.powi(-k);
        let r = gauss_legendre(per)?.mapped(lo, hi);
        for (&z, &w) in r.nodes.iter().zip(&r.weights) {
            let psi = z * z;
            // sin φ = cos ψ, cos φ = sin ψ
            let (c, s) = psi.sin_cos();
            out.push((s, c, c * c, w * 2.0 * z));
        }
        lo = hi;
    }
    Ok(out)
}

/// ∫_{shift}^∞ e^{−u} g(u) du as Σ w g(u).
fn laguerre_u_rule(n: usize, shift: f64) -> Result<Vec<(f64, f64)>> {
    let r = gauss_laguerre(n)?;
    let scale = (-shift).exp();
    Ok(r.nodes.iter().zip(&r.weights).map(|(&u, &w)| (u + shift, w * scale)).collect())
}

/// A Drude permittivity makes the integrand non-analytic (√u) at u = 0 on
/// the scale of the damping. Below PANEL_CUT substitute u = y² and use
/// Gauss–Legendre panels in y that shrink geometrically towards 0; above it,
/// shifted Gauss–Laguerre.
fn graded_u_rule(n: usize) -> Result<Vec<(f64, f64)>> {
    let per = (n / 4).max(8);
    let y_top = PANEL_CUT.sqrt();
    let mut out = Vec::with_capacity(PANELS as usize * per + n / 2);
    let mut lo = 0.0;
    for k in (0..PANELS).rev() {
        let hi = y_top * 4f64.powi(-k);
        let r = gauss_legendre(per)?.mapped(lo, hi);
        for (&y, &w) in r.nodes.iter().zip(&r.weights) {
            out.push((y * y, w * 2.0 * y * (-y * y).exp()));
        }
        lo = hi;
    }
    out.extend(laguerre_u_rule((n / 2).max(8), PANEL_CUT)?);
    Ok(out)
}

type Term = [f64; 6];

fn phi_node_term(
    sidx: usize,
    node: (f64, f64, f64, f64),
    u_nodes: &[(f64, f64)],
    m1: &ReducedMedium,
    m2: &ReducedMedium,
    e: f64,
) -> Result<Term> {
    let (tau, c, c2, wphi) = node;
    let n = sidx as i32 + 1;
    let sf = n as f64;
    let mut acc = [0.0; 6];
    for &(u, wu) in u_nodes {
        let t = u / (2.0 * sf);
        let w = t * c;
        let eps1: Permittivity = m1.eps_at(w)?;
        let eps2: Permittivity = m2.eps_at(w)?;
        let sp = sphere_factors_c(eps1, tau, c2);
        let pl = plate_factors_c(eps2, tau, c2);
        let p_te = sp.t0.te * pl.t0.te;
        let p_tm = sp.t0.tm * pl.t0.tm;
        let pw_te = p_te.powi(n);
        let pw_tm = p_tm.powi(n);
        let lead = pw_te + pw_tm;
        let l = t * tau / e;
        let [b, dvv, djj, dvj, dv, dj] = shared_terms(sf, tau, l);
        let cross = sp.t0.te * pl.t0.tm + sp.t0.tm * pl.t0.te;
        let xb = x_from_products(p_te, p_tm, cross, sidx) * b;
        let k2c = sf * tau / (2.0 * l) + dv;
        let y2c = sf * tau / l;
        let dstar = |k1: f64, w1: f64, k2: f64, w2: f64, y2: f64| {
            dvv * k1 * k1 + dvj * k1 * w1 + djj * w1 * w1 + k2c * k2 + dj * w2 + y2c * y2
        };
        let d_sum = pw_te * dstar(pl.k1.te, sp.w1.te, pl.k2.te, sp.w2.te, sp.y2.te)
            + pw_tm * dstar(pl.k1.tm, sp.w1.tm, pl.k2.tm, sp.w2.tm, sp.y2.tm);
        let k1_sum = pw_te * pl.k1.te + pw_tm * pl.k1.tm;
        let w1_sum = pw_te * sp.w1.te + pw_tm * sp.w1.tm;
        let mut tp = wu * tau;
        for kind in Kind::ALL {
            tp *= t;
            let (a, cv, cj) = kind_terms(kind, sf, tau, l, e);
            let nt = a * lead + cv * k1_sum + cj * w1_sum + d_sum + xb;
            let k = kind.index();
            acc[k] += tp * lead;
            acc[3 + k] += tp * nt;
        }
    }
    for v in acc.iter_mut() {
        *v *= wphi;
    }
    Ok(acc)
}

fn series_term(sidx: usize, grid: &Grid, m1: &ReducedMedium, m2: &ReducedMedium, e: f64) -> Result<Term> {
    let parts: Vec<Term> = grid
        .phi
        .par_iter()
        .map(|&node| phi_node_term(sidx, node, &grid.u, m1, m2, e))
        .collect::<Result<_>>()?;
    let sf = (sidx + 1) as f64;
    let mut out = [0.0; 6];
    for p in &parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    for kind in Kind::ALL {
        let w = sf.powi(-kind.s_power()) / (2.0 * sf);
        out[kind.index()] *= w;
        out[3 + kind.index()] *= w;
    }
    Ok(out)
}

const CHECK_TERMS: usize = 3;

fn max_rel_diff(a: &Term, b: &Term) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| if *y == 0.0 { (x - y).abs() } else { ((x - y) / y).abs() })
        .fold(0.0, f64::max)
}

fn first_terms(grid: &Grid, m1: &ReducedMedium, m2: &ReducedMedium, e: f64) -> Result<Vec<Term>> {
    (0..CHECK_TERMS).map(|s| series_term(s, grid, m1, m2, e)).collect()
}

fn summed(terms: &[Term]) -> Term {
    let mut out = [0.0; 6];
    for t in terms {
        for (o, v) in out.iter_mut().zip(t) {
            *o += v;
        }
    }
    out
}

/// Reduced leading and first-order sums for media expressed at a fixed gap.
pub fn reduced_sums(m1: &ReducedMedium, m2: &ReducedMedium, e: f64, quad: &QuadratureSettings) -> Result<ReducedSums> {
    if !(e > 0.0) {
        return Err(domain(format!("e must be positive, got {e}")));
    }
    if quad.phi_nodes < 2 || quad.t_nodes < 2 || quad.s_max < 4 {
        return Err(domain("quadrature budget too small"));
    }
    let (mut np, mut nt) = (quad.phi_nodes, quad.t_nodes);
    if matches!(m1, ReducedMedium::Vacuum) || matches!(m2, ReducedMedium::Vacuum) {
        return Ok(ReducedSums {
            leading: [0.0; 3],
            ntlo: [0.0; 3],
            diagnostics: Diagnostics { s_terms: 0, phi_nodes: np, t_nodes: nt, refinements: 0, error_estimate: 0.0 },
        });
    }
    let tol = |i: usize| if i < 3 { quad.rel_tol_leading } else { quad.rel_tol_ntlo };

    let graded = [m1, m2].iter().any(|m| match m {
        ReducedMedium::Drude { gamma_d, .. } => *gamma_d > 0.0,
        ReducedMedium::Custom { .. } => true,
        _ => false,
    });
    let mut grid = Grid::new(np, nt, graded)?;
    let mut head = first_terms(&grid, m1, m2, e)?;
    let mut quad_err = 0.0;
    let mut refinements = 0;
    if quad.refine_check {
        loop {
            let (rp, rt) = ((np * 3).div_ceil(2), (nt * 3).div_ceil(2));
            let fine_grid = Grid::new(rp, rt, graded)?;
            let fine = first_terms(&fine_grid, m1, m2, e)?;
            let (a, b) = (summed(&head), summed(&fine));
            let ok = (0..6).all(|i| (a[i] - b[i]).abs() <= tol(i) * b[i].abs());
            quad_err = max_rel_diff(&a, &b);
            if ok {
                break;
            }
            if refinements == quad.max_refinements {
                return Err(Error::Convergence {
                    what: "reduced (phi, t) quadrature".into(),
                    estimate: b[3],
                    error_bound: (a[3] - b[3]).abs(),
                    detail: format!("phi_nodes={rp}, t_nodes={rt}, refinements={refinements}"),
                });
            }
            refinements += 1;
            np = rp;
            nt = rt;
            grid = fine_grid;
            head = fine;
        }
    }

    let mut accs: Vec<SeriesAccumulator> = (0..6)
        .map(|i| SeriesAccumulator::new(tol(i), if i < 3 { 4 } else { 2 }))
        .collect();
    let mut sidx = 0;
    loop {
        let term = if sidx < head.len() { head[sidx] } else { series_term(sidx, &grid, m1, m2, e)? };
        for (a, v) in accs.iter_mut().zip(term) {
            a.push(v);
        }
        sidx += 1;
        if accs.iter().all(|a| a.converged()) || sidx == quad.s_max {
            break;
        }
    }
    let mut leading = [0.0; 3];
    let mut ntlo = [0.0; 3];
    let mut tail_err = 0.0f64;
    for (i, a) in accs.iter().enumerate() {
        let tail = a.tail();
        let total = a.partial_sum() + tail.tail;
        let rel = if total == 0.0 { 0.0 } else { tail.uncertainty / total.abs() };
        if !a.converged() && rel > tol(i) {
            return Err(Error::Convergence {
                what: "s-series".into(),
                estimate: total,
                error_bound: tail.uncertainty,
                detail: format!("s reached {sidx}, phi_nodes={np}, t_nodes={nt}"),
            });
        }
        tail_err = tail_err.max(rel);
        if i < 3 {
            leading[i] = total;
        } else {
            ntlo[i - 3] = total;
        }
    }
    Ok(ReducedSums {
        leading,
        ntlo,
        diagnostics: Diagnostics {
            s_terms: sidx,
            phi_nodes: np,
            t_nodes: nt,
            refinements,
            error_estimate: quad_err + tail_err,
        },
    })
}

fn assemble(kind: Kind, sums: &ReducedSums, geom: &Geometry) -> ExpansionResult {
    let k = kind.index();
    let pre = kind.prefactor(geom);
    let leading = pre * sums.leading[k];
    let ntlo = pre * sums.ntlo[k];
    let reference = kind.pc_reference(geom);
    ExpansionResult {
        kind,
        leading,
        ntlo,
        theta: sums.ntlo[k] / (geom.e * sums.leading[k]),
        normalized_leading: leading / reference,
        normalized_sum: (leading + ntlo) / reference,
        diagnostics: sums.diagnostics,
    }
}

/// All three kinds from one pass over the quadrature grid.
pub fn compute_all(
    model1: &DielectricModel,
    model2: &DielectricModel,
    geom: &Geometry,
    quad: &QuadratureSettings,
) -> Result<ExpansionSet> {
    let m1 = ReducedMedium::new(model1, geom.distance)?;
    let m2 = ReducedMedium::new(model2, geom.distance)?;
    let sums = reduced_sums(&m1, &m2, geom.e, quad)?;
    Ok(ExpansionSet {
        energy: assemble(Kind::Energy, &sums, geom),
        force: assemble(Kind::Force, &sums, geom),
        gradient: assemble(Kind::Gradient, &sums, geom),
    })
}

/// Leading and next-to-leading terms; `model1` is the sphere, `model2` the plate.
pub fn compute(
    kind: Kind,
    model1: &DielectricModel,
    model2: &DielectricModel,
    geom: &Geometry,
    quad: &QuadratureSettings,
) -> Result<ExpansionResult> {
    Ok(*compute_all(model1, model2, geom, quad)?.get(kind))
}

pub fn theta_ratios(
    model1: &DielectricModel,
    model2: &DielectricModel,
    geom: &Geometry,
    quad: &QuadratureSettings,
) -> Result<ThetaRatios> {
    let set = compute_all(model1, model2, geom, quad)?;
    Ok(ThetaRatios {
        theta_e: set.energy.theta,
        theta_f: set.force.theta,
        theta_g: set.gradient.theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn drude(omega_d: f64, gamma_d: f64) -> ReducedMedium {
        ReducedMedium::Drude { omega_d, gamma_d }
    }

    #[test]
    fn perfect_conductor_constants() {
        let pc = ReducedMedium::PerfectConductor;
        let r = reduced_sums(&pc, &pc, 0.01, &QuadratureSettings::default()).unwrap();
        for kind in Kind::ALL {
            let k = kind.index();
            assert_relative_eq!(r.leading[k], kind.pc_reduced_leading(), max_relative = 1e-8);
            let theta = r.ntlo[k] / (0.01 * r.leading[k]);
            assert!((theta - kind.pc_theta()).abs() < 1e-5, "{kind:?}: {theta}");
        }
    }

    #[test]
    fn vacuum_gives_zero() {
        let r = reduced_sums(&ReducedMedium::Vacuum, &drude(3.0, 0.0), 0.1, &QuadratureSettings::default()).unwrap();
        assert_eq!(r.leading, [0.0; 3]);
        assert_eq!(r.ntlo, [0.0; 3]);
    }

    #[test]
    fn plasma_reference_point() {
        // Independent double-exponential prototype, ω_d = 1, γ = 0, e = 1e-3.
        let m = drude(1.0, 0.0);
        let r = reduced_sums(&m, &m, 1e-3, &QuadratureSettings::default()).unwrap();
        let leading = [0.16170983138297, 0.11060873496025, 0.12486867342875];
        let theta = [-2.23710483, -0.70307350, -0.30769420];
        for k in 0..3 {
            assert_relative_eq!(r.leading[k], leading[k], max_relative = 1e-7);
            assert!((r.ntlo[k] / (1e-3 * r.leading[k]) - theta[k]).abs() < 2e-6);
        }
    }

    #[test]
    fn leading_symmetric_ntlo_not() {
        let (a, b) = (drude(0.7, 0.0), drude(5.0, 0.3));
        let q = QuadratureSettings { rel_tol_leading: 1e-13, refine_check: false, ..Default::default() };
        let ab = reduced_sums(&a, &b, 0.01, &q).unwrap();
        let ba = reduced_sums(&b, &a, 0.01, &q).unwrap();
        for k in 0..3 {
            assert_relative_eq!(ab.leading[k], ba.leading[k], max_relative = 1e-10);
            assert!((ab.ntlo[k] - ba.ntlo[k]).abs() > 1e-3 * ab.ntlo[k].abs());
        }
    }

    #[test]
    fn theta_approaches_pc_monotonically() {
        let q = QuadratureSettings::default();
        let gaps: Vec<[f64; 3]> = [10.0, 30.0, 100.0, 1000.0, 1e4]
            .iter()
            .map(|&wd| {
                let m = drude(wd, 0.0);
                let r = reduced_sums(&m, &m, 0.01, &q).unwrap();
                Kind::ALL.map(|kind| r.ntlo[kind.index()] / (0.01 * r.leading[kind.index()]) - kind.pc_theta())
            })
            .collect();
        for k in 0..2 {
            for w in gaps.windows(2) {
                assert!(w[1][k].abs() < w[0][k].abs(), "{:?}", gaps);
            }
        }
        // θ_G crosses its PC value between ω_d = 10 and 30, then approaches
        // it monotonically.
        assert!(gaps[0][2] > 0.0 && gaps[1][2] < 0.0);
        for w in gaps[1..].windows(2) {
            assert!(w[1][2].abs() < w[0][2].abs(), "{:?}", gaps);
        }
        assert!(gaps[4].iter().all(|g| g.abs() < 2e-4));
    }

    #[test]
    fn node_doubling_is_stable() {
        let m1 = drude(2.0, 0.05);
        let m2 = drude(8.0, 0.0);
        let q = QuadratureSettings::default();
        let fine = QuadratureSettings { phi_nodes: 2 * q.phi_nodes, t_nodes: 2 * q.t_nodes, ..q };
        let a = reduced_sums(&m1, &m2, 0.02, &q).unwrap();
        let b = reduced_sums(&m1, &m2, 0.02, &fine).unwrap();
        for k in 0..3 {
            assert_relative_eq!(a.leading[k], b.leading[k], max_relative = 1e-7);
            assert_relative_eq!(a.ntlo[k], b.ntlo[k], max_relative = 1e-5);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(6))]

        #[test]
        fn force_and_gradient_are_distance_derivatives(
            d in 2e-7f64..5e-6,
            wp_ev in 2.0f64..12.0,
        ) {
            // F = −∂E/∂d and G = ∂F/∂d term by term at fixed R.
            let m = DielectricModel::Plasma { omega_p: crate::constants::ev_to_angular_frequency(wp_ev).unwrap() };
            let q = QuadratureSettings { rel_tol_leading: 1e-10, rel_tol_ntlo: 1e-9, ..Default::default() };
            let r = 2e-4;
            let h = 1e-3 * d;
            let at = |dd: f64| compute_all(&m, &m, &Geometry::new(r, dd).unwrap(), &q).unwrap();
            let (lo, mid, hi) = (at(d - h), at(d), at(d + h));
            let e = |s: &ExpansionSet| s.energy.leading + s.energy.ntlo;
            let f = |s: &ExpansionSet| s.force.leading + s.force.ntlo;
            let g = |s: &ExpansionSet| s.gradient.leading + s.gradient.ntlo;
            let fd_f = -(e(&hi) - e(&lo)) / (2.0 * h);
            let fd_g = (f(&hi) - f(&lo)) / (2.0 * h);
            proptest::prop_assert!((fd_f / f(&mid) - 1.0).abs() < 1e-5, "{} vs {}", fd_f, f(&mid));
            proptest::prop_assert!((fd_g / g(&mid) - 1.0).abs() < 1e-5, "{} vs {}", fd_g, g(&mid));
        }
    }
}
