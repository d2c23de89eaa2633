//! Exact energy from the scattering determinant, E = ħc/(2π) ∫dκ Tr ln(1 − M),
//! with M truncated to multipoles l ≤ l_max.
//!
//! Phase bookkeeping: on x = cosh θ > 1 the associated Legendre functions are
//! P_l^m = (−1)^m i^m P̂_l^m with P̂ real and positive. Each block carries two
//! of them, so the phase is (−1)^m, which cancels the explicit (−1)^m of the
//! prefactor. All arithmetic below uses P̂ and is real.
//!
//! Inside the energy the blocks are symmetrized, M̃ = D^{-1/2} M D^{1/2} with
//! D = |T| diagonal, so that √|T_l|, the Legendre values and the quadrature
//! weights are combined in log form before anything is exponentiated. The
//! determinant is unchanged by the similarity.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::constants::HBAR_C;
use crate::dielectric::{permittivity, DielectricModel, Permittivity};
use crate::error::{domain, Error, Result};
use crate::geometry::Geometry;
use crate::quadrature::{gauss_laguerre, gauss_legendre, Rule};
use crate::reflection::PolarizationPair;
use crate::special::{BesselSequence, LegendreSequence};

const WRONSKIAN_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub l_max: usize,
    /// Gauss–Legendre nodes of the first ξ rule; doubled until converged.
    pub xi_nodes: usize,
    /// Lower bound on the Gauss–Laguerre θ nodes (raised to l_max + 10).
    pub theta_nodes: usize,
    pub tolerance: f64,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self { l_max: 40, xi_nodes: 48, theta_nodes: 40, tolerance: 1e-4 }
    }
}

impl TruncationSpec {
    /// l_max = ⌈8/e⌉, at least 3 and at most 120.
    pub fn for_geometry(geom: &Geometry) -> Self {
        let l_max = ((8.0 / geom.e).ceil() as usize).clamp(3, 120);
        Self { l_max, ..Self::default() }
    }

    pub fn with_l_max(self, l_max: usize) -> Self {
        Self { l_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_max < 1 {
            return Err(domain("l_max must be at least 1"));
        }
        if self.xi_nodes < 8 || self.theta_nodes < 8 {
            return Err(domain("quadrature node counts must be at least 8"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(domain(format!("tolerance must lie in (0, 1), got {}", self.tolerance)));
        }
        Ok(())
    }

    fn laguerre_nodes(&self) -> usize {
        self.theta_nodes.max(self.l_max + 10)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    /// Joules.
    pub energy: f64,
    /// |I_n − I_{n/2}| of the final ξ doubling step, in joules.
    pub error_estimate: f64,
    pub xi_nodes: usize,
    pub l_max: usize,
    /// Largest m that contributed at any ξ node.
    pub m_max: usize,
}

/// Mie coefficient in log form: T = sign·exp(ln_abs). sign = 0 means T = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogCoeff {
    ln_abs: f64,
    sign: f64,
}

impl LogCoeff {
    const ZERO: LogCoeff = LogCoeff { ln_abs: f64::NEG_INFINITY, sign: 0.0 };

    fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

fn check_wronskian(seq: &BesselSequence, l_max: usize) -> Result<()> {
    for l in 0..=l_max {
        let r = seq.wronskian_residual(l);
        if !(r.abs() < WRONSKIAN_LIMIT) {
            return Err(Error::Precision(format!(
                "Bessel Wronskian residual {r:e} at l = {l}, x = {}",
                seq.x
            )));
        }
    }
    Ok(())
}

/// TE and TM sphere coefficients for l = 1..=l_max (index l − 1).
fn mie_log(l_max: usize, omega: f64, eps: Permittivity) -> Result<Vec<[LogCoeff; 2]>> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(domain(format!("omega must be positive, got {omega}")));
    }
    if eps == Permittivity::Finite(1.0) {
        return Ok(vec![[LogCoeff::ZERO; 2]; l_max]);
    }
    let outer = BesselSequence::new(l_max, omega)?;
    check_wronskian(&outer, l_max)?;
    let inner = match eps {
        Permittivity::Infinite => None,
        Permittivity::Finite(e) if e >= 1.0 => {
            let seq = BesselSequence::new(l_max, e.sqrt() * omega)?;
            check_wronskian(&seq, l_max)?;
            Some((e, seq))
        }
        Permittivity::Finite(e) => {
            return Err(domain(format!("sphere permittivity must be at least 1, got {e}")))
        }
    };
    let mut out = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let ln_ik = outer.ln_i[l] - outer.ln_k[l];
        let (c, k) = (outer.ci[l], outer.ck[l]);
        let (te, tm) = match &inner {
            None => ((1.0, 1.0), (c, k)),
            Some((e, seq)) => {
                let c1 = seq.ci[l];
                ((c1 - c, c1 - k), (c1 - e * c, c1 - e * k))
            }
        };
        let coeff = |(num, den): (f64, f64)| {
            let q = num / den;
            if q == 0.0 {
                LogCoeff::ZERO
            } else {
                LogCoeff { ln_abs: ln_ik + q.abs().ln(), sign: q.signum() }
            }
        };
        out.push([coeff(te), coeff(tm)]);
    }
    Ok(out)
}

/// Sphere scattering coefficients T^TE, T^TM at ω = κR. These overflow for
/// ω of several hundred; the energy uses the log form internally.
pub fn mie_coefficients(l: usize, omega: f64, eps1: Permittivity) -> Result<PolarizationPair> {
    if l < 1 {
        return Err(domain("multipole order l must be at least 1"));
    }
    let t = mie_log(l, omega, eps1)?[l - 1];
    Ok(PolarizationPair::new(t[0].value(), t[1].value()))
}

/// Plate factors T̃^TE, T̃^TM at cosh θ = 1 + delta.
fn plate_theta(eps2: Permittivity, delta: f64) -> (f64, f64) {
    match eps2 {
        Permittivity::Infinite => (1.0, -1.0),
        Permittivity::Finite(e) if e == 1.0 => (0.0, 0.0),
        Permittivity::Finite(e) => {
            let x = 1.0 + delta;
            let root = (e + delta * (2.0 + delta)).sqrt();
            let te = (e - 1.0) / ((root + x) * (root + x));
            let tm = (e - 1.0) * (1.0 - (e + 1.0) * x * x) / ((root + e * x) * (root + e * x));
            (te, tm)
        }
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// ln of √((2l+1)/(l(l+1)) · (l−m)!/(l+m)!).
fn ln_norm(l: usize, m: usize, lnf: &[f64]) -> f64 {
    let lf = l as f64;
    0.5 * ((2.0 * lf + 1.0).ln() - lf.ln() - (lf + 1.0).ln() + lnf[l - m] - lnf[l + m])
}

/// Laguerre nodes mapped to x = 1 + y/(2κL), with log weights including
/// e^{−2κL x} and the Jacobian.
struct ThetaGrid {
    delta: Vec<f64>,
    ln_w: Vec<f64>,
}

impl ThetaGrid {
    fn new(rule: &Rule, kappa_l: f64) -> Self {
        let p = 2.0 * kappa_l;
        let delta = rule.nodes.iter().map(|y| y / p).collect();
        let ln_w = rule.ln_weights.iter().map(|lw| lw - p - p.ln()).collect();
        Self { delta, ln_w }
    }
}

/// One printed 2×2 block M_{lm,l′m} (rows: TE, TM of l; columns: TE, TM of
/// l′). Negative m is accepted and gives J·M(|m|)·J with J = diag(1, −1).
#[allow(clippy::too_many_arguments)]
pub fn matrix_element(
    l: usize,
    lp: usize,
    m: i64,
    kappa_l: f64,
    eps1: Permittivity,
    eps2: Permittivity,
    omega: f64,
    theta_nodes: usize,
) -> Result<[[f64; 2]; 2]> {
    let ma = m.unsigned_abs() as usize;
    if l < 1.max(ma) || lp < 1.max(ma) {
        return Err(domain(format!("need l, l' >= max(1, |m|), got l={l}, l'={lp}, m={m}")));
    }
    if !(kappa_l > 0.0 && kappa_l.is_finite()) {
        return Err(domain(format!("kappa_L must be positive, got {kappa_l}")));
    }
    let l_top = l.max(lp);
    let nodes = theta_nodes.max(l_top + 10);
    let rule = gauss_laguerre(nodes)?;
    let grid = ThetaGrid::new(&rule, kappa_l);
    let lnf = ln_factorials(2 * l_top);
    let t = mie_log(l_top, omega, eps1)?[l - 1];
    let (nl, nlp) = (ln_norm(l, ma, &lnf), ln_norm(lp, ma, &lnf));
    let sgn = if m < 0 { -1.0 } else { 1.0 };
    let mf = ma as f64;

    let mut g = [[0.0; 2]; 2];
    for (j, &delta) in grid.delta.iter().enumerate() {
        let seq = LegendreSequence::from_offset(ma, l_top, delta)?;
        let sh = (delta * (2.0 + delta)).sqrt();
        let (t1, t2) = plate_theta(eps2, delta);
        let v = (nl + seq.ln_p[l - ma] + 0.5 * grid.ln_w[j]).exp();
        let vp = (nlp + seq.ln_p[lp - ma] + 0.5 * grid.ln_w[j]).exp();
        let (a, b) = (v * seq.dlog[l - ma], sgn * v * mf / sh);
        let (ap, bp) = (vp * seq.dlog[lp - ma], sgn * vp * mf / sh);
        // [[a, −b], [−b, a]] · diag(t1, t2) · [[a′, b′], [b′, a′]]
        g[0][0] += a * t1 * ap - b * t2 * bp;
        g[0][1] += a * t1 * bp - b * t2 * ap;
        g[1][0] += -b * t1 * ap + a * t2 * bp;
        g[1][1] += -b * t1 * bp + a * t2 * ap;
    }
    if g.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Convergence {
            what: "theta quadrature".into(),
            estimate: f64::NAN,
            error_bound: f64::INFINITY,
            detail: format!("non-finite block at l={l}, l'={lp}, m={m}, kappa_L={kappa_l}"),
        });
    }
    let half_pi = 0.5 * PI;
    let (te, tm) = (t[0].value(), t[1].value());
    Ok([
        [half_pi * te * g[0][0], half_pi * te * g[0][1]],
        [half_pi * tm * g[1][0], half_pi * tm * g[1][1]],
    ])
}

/// Everything at one ξ node that does not depend on m.
struct NodeData<'a> {
    mie: Vec<[LogCoeff; 2]>,
    grid: ThetaGrid,
    plate: Vec<(f64, f64)>,
    lnf: &'a [f64],
    l_max: usize,
}

impl NodeData<'_> {
    /// Symmetrized round-trip matrix for one m ≥ 0, order (TE block, TM block).
    fn block(&self, m: usize) -> Result<DMatrix<f64>> {
        let l0 = m.max(1);
        let n = self.l_max - l0 + 1;
        let nj = self.grid.delta.len();
        let mut a = [DMatrix::zeros(n, nj), DMatrix::zeros(n, nj)];
        let mut b = [DMatrix::zeros(n, nj), DMatrix::zeros(n, nj)];
        let half_ln_half_pi = 0.5 * (0.5 * PI).ln();
        let norms: Vec<f64> = (l0..=self.l_max).map(|l| ln_norm(l, m, self.lnf)).collect();
        for j in 0..nj {
            let delta = self.grid.delta[j];
            let seq = LegendreSequence::from_offset(m, self.l_max, delta)?;
            let inv_sh = 1.0 / (delta * (2.0 + delta)).sqrt();
            let base_j = half_ln_half_pi + 0.5 * self.grid.ln_w[j];
            for (i, l) in (l0..=self.l_max).enumerate() {
                let base = base_j + norms[i] + seq.ln_p[l - m];
                for p in 0..2 {
                    let t = self.mie[l - 1][p];
                    if t.sign == 0.0 {
                        continue;
                    }
                    let v = (base + 0.5 * t.ln_abs).exp();
                    a[p][(i, j)] = v * seq.dlog[l - m];
                    b[p][(i, j)] = v * m as f64 * inv_sh;
                }
            }
        }
        let scale = |mat: &DMatrix<f64>, k: usize| {
            let mut out = mat.clone();
            for (j, mut col) in out.column_iter_mut().enumerate() {
                col *= if k == 0 { self.plate[j].0 } else { self.plate[j].1 };
            }
            out
        };
        // row factors times T̃ of the intermediate polarization
        let [a_te, a_tm] = &a;
        let [b_te, b_tm] = &b;
        let (a_te1, b_te2) = (scale(a_te, 0), scale(b_te, 1));
        let (b_tm1, a_tm2) = (scale(b_tm, 0), scale(a_tm, 1));
        let ee = &a_te1 * a_te.transpose() - &b_te2 * b_te.transpose();
        let em = &a_te1 * b_tm.transpose() - &b_te2 * a_tm.transpose();
        let me = -(&b_tm1 * a_te.transpose()) + &a_tm2 * b_te.transpose();
        let mm = -(&b_tm1 * b_tm.transpose()) + &a_tm2 * a_tm.transpose();

        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&ee);
        out.view_mut((0, n), (n, n)).copy_from(&em);
        out.view_mut((n, 0), (n, n)).copy_from(&me);
        out.view_mut((n, n), (n, n)).copy_from(&mm);
        for (i, l) in (l0..=self.l_max).enumerate() {
            let [te, tm] = self.mie[l - 1];
            if te.sign < 0.0 {
                out.row_mut(i).neg_mut();
            }
            if tm.sign < 0.0 {
                out.row_mut(n + i).neg_mut();
            }
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precision(format!("non-finite matrix entries at m = {m}")));
        }
        Ok(out)
    }
}

/// ln det(1 − M) for one symmetrized block, via pivoted LU.
fn ln_det_one_minus(m: DMatrix<f64>, tag: &str) -> Result<f64> {
    let n = m.nrows();
    let k = DMatrix::identity(n, n) - m;
    let lu = k.lu();
    let mut sign = lu.p().determinant::<f64>();
    let mut ln = 0.0;
    for u in lu.u().diagonal().iter() {
        if *u == 0.0 {
            return Err(Error::Assembly(format!("singular 1 − M ({tag})")));
        }
        sign *= u.signum();
        ln += u.abs().ln();
    }
    if sign <= 0.0 || ln > 1e-12 * n as f64 {
        return Err(Error::Assembly(format!(
            "det(1 − M) outside (0, 1] ({tag}): sign {sign}, ln|det| {ln:e}; spectral radius of M reached 1"
        )));
    }
    Ok(ln)
}

/// Σ_m ln det(1 − M_m) with m ≥ 1 counted twice, and the largest m used.
fn trace_log(
    kappa: f64,
    geom: &Geometry,
    eps1: Permittivity,
    eps2: Permittivity,
    trunc: &TruncationSpec,
    rule: &Rule,
    lnf: &[f64],
) -> Result<(f64, usize)> {
    // Every entry carries e^{−2κd} at most.
    if 2.0 * kappa * geom.distance > 740.0 {
        return Ok((0.0, 0));
    }
    let l_max = trunc.l_max;
    let mie = mie_log(l_max, kappa * geom.radius, eps1)?;
    let grid = ThetaGrid::new(rule, kappa * geom.center_distance);
    let plate = grid.delta.iter().map(|&d| plate_theta(eps2, d)).collect();
    let data = NodeData { mie, grid, plate, lnf, l_max };
    let mut total = 0.0;
    let mut small = 0;
    let mut m_used = 0;
    for m in 0..=l_max {
        let ld = ln_det_one_minus(data.block(m)?, &format!("kappa={kappa:e}, m={m}"))?;
        let contrib = if m == 0 { ld } else { 2.0 * ld };
        total += contrib;
        m_used = m;
        if contrib.abs() <= 1e-2 * trunc.tolerance * total.abs() {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok((total, m_used))
}

fn physical_eps(model: &DielectricModel, kappa: f64) -> Result<Permittivity> {
    permittivity(model, crate::constants::C * kappa)
}

/// ∫dκ Tr ln(1 − M) on an n-node Gauss–Legendre rule in u, κ = u/((1−u)·2d).
fn kappa_integral(
    m1: &DielectricModel,
    m2: &DielectricModel,
    geom: &Geometry,
    trunc: &TruncationSpec,
    n: usize,
    theta_rule: &Rule,
    lnf: &[f64],
) -> Result<(f64, usize)> {
    let gl = gauss_legendre(n)?.mapped(0.0, 1.0);
    let scale = 1.0 / (2.0 * geom.distance);
    let terms: Vec<Result<(f64, usize)>> = gl
        .nodes
        .par_iter()
        .zip(gl.weights.par_iter())
        .map(|(&u, &w)| {
            let kappa = scale * u / (1.0 - u);
            let jac = scale / ((1.0 - u) * (1.0 - u));
            let eps1 = physical_eps(m1, kappa)?;
            let eps2 = physical_eps(m2, kappa)?;
            let (tr, mm) = trace_log(kappa, geom, eps1, eps2, trunc, theta_rule, lnf)?;
            Ok((w * jac * tr, mm))
        })
        .collect();
    let mut sum = 0.0;
    let mut m_max = 0;
    for t in terms {
        let (v, mm) = t?;
        sum += v;
        m_max = m_max.max(mm);
    }
    Ok((sum, m_max))
}

/// Exact sphere-plate energy with diagnostics.
pub fn exact_energy_detailed(
    model1: &DielectricModel,
    model2: &DielectricModel,
    geom: &Geometry,
    trunc: &TruncationSpec,
) -> Result<ExactResult> {
    trunc.validate()?;
    model1.validate()?;
    model2.validate()?;
    if model1.is_vacuum() || model2.is_vacuum() {
        return Ok(ExactResult {
            energy: 0.0,
            error_estimate: 0.0,
            xi_nodes: 0,
            l_max: trunc.l_max,
            m_max: 0,
        });
    }
    let theta_rule = gauss_laguerre(trunc.laguerre_nodes())?;
    let lnf = ln_factorials(2 * trunc.l_max);
    let pref = HBAR_C / (2.0 * PI);
    let mut n = (trunc.xi_nodes / 2).max(8);
    let (mut prev, _) = kappa_integral(model1, model2, geom, trunc, n, &theta_rule, &lnf)?;
    for _ in 0..4 {
        n *= 2;
        let (cur, m_max) = kappa_integral(model1, model2, geom, trunc, n, &theta_rule, &lnf)?;
        let err = (cur - prev).abs();
        if err <= trunc.tolerance * cur.abs() {
            return Ok(ExactResult {
                energy: pref * cur,
                error_estimate: pref * err,
                xi_nodes: n,
                l_max: trunc.l_max,
                m_max,
            });
        }
        prev = cur;
    }
    Err(Error::Convergence {
        what: "xi quadrature".into(),
        estimate: pref * prev,
        error_bound: f64::NAN,
        detail: format!("no agreement up to {n} nodes"),
    })
}

/// Exact sphere-plate energy in joules.
pub fn exact_energy(
    model1: &DielectricModel,
    model2: &DielectricModel,
    geom: &Geometry,
    trunc: &TruncationSpec,
) -> Result<f64> {
    exact_energy_detailed(model1, model2, geom, trunc).map(|r| r.energy)
}

/// Raises l_max by `step` until two successive energies agree to
/// `trunc.tolerance`, giving up past `l_cap`.
pub fn exact_energy_converged(
    model1: &DielectricModel,
    model2: &DielectricModel,
    geom: &Geometry,
    trunc: &TruncationSpec,
    step: usize,
    l_cap: usize,
) -> Result<ExactResult> {
    if step == 0 {
        return Err(domain("l_max step must be positive"));
    }
    let mut trace = Vec::new();
    let mut spec = *trunc;
    let mut prev = exact_energy_detailed(model1, model2, geom, &spec)?;
    trace.push((spec.l_max, prev.energy));
    while spec.l_max + step <= l_cap {
        spec.l_max += step;
        let cur = exact_energy_detailed(model1, model2, geom, &spec)?;
        trace.push((spec.l_max, cur.energy));
        if (cur.energy - prev.energy).abs() <= trunc.tolerance * cur.energy.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    let detail = trace
        .iter()
        .map(|(l, e)| format!("l_max={l}: {e:.9e}"))
        .collect::<Vec<_>>()
        .join("; ");
    Err(Error::Convergence {
        what: "multipole truncation".into(),
        estimate: prev.energy,
        error_bound: trace
            .windows(2)
            .last()
            .map_or(f64::NAN, |w| (w[1].1 - w[0].1).abs()),
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    const PC: Permittivity = Permittivity::Infinite;

    #[test]
    fn mie_vacuum_sphere_is_zero() {
        for &w in &[0.01, 1.0, 50.0] {
            for l in [1, 5, 20] {
                let t = mie_coefficients(l, w, Permittivity::Finite(1.0)).unwrap();
                assert_eq!((t.te, t.tm), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn mie_small_size_parameter() {
        let t = mie_coefficients(1, 1e-4, Permittivity::Finite(2.0)).unwrap();
        assert!(t.te.abs() < 1e-10 && t.tm.abs() < 1e-10);
    }

    #[test]
    fn mie_l1_closed_form() {
        // ν = 3/2: I = √(2/πx)(cosh x − sinh x/x), K = √(π/2x) e^{−x}(1 + 1/x).
        let i = |x: f64| (2.0 / (PI * x)).sqrt() * (x.cosh() - x.sinh() / x);
        let k = |x: f64| (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x);
        let h = 1e-5;
        let combo = |f: &dyn Fn(f64) -> f64, x: f64| {
            0.5 * f(x) + x * (f(x + h) - f(x - h)) / (2.0 * h)
        };
        let (w, eps) = (1.0f64, 2.0f64);
        let n1w = eps.sqrt() * w;
        let te = (i(w) * combo(&i, n1w) - i(n1w) * combo(&i, w))
            / (k(w) * combo(&i, n1w) - i(n1w) * combo(&k, w));
        let tm = (i(w) * combo(&i, n1w) - eps * i(n1w) * combo(&i, w))
            / (k(w) * combo(&i, n1w) - eps * i(n1w) * combo(&k, w));
        let t = mie_coefficients(1, w, Permittivity::Finite(eps)).unwrap();
        assert_relative_eq!(t.te, te, max_relative = 1e-8);
        assert_relative_eq!(t.tm, tm, max_relative = 1e-8);
        assert!(t.te.abs() < 1.0 && t.tm.abs() < 1.0);
        assert!(t.te > 0.0 && t.tm < 0.0);
    }

    #[test]
    fn mie_dielectric_tends_to_pc() {
        let pc = mie_coefficients(3, 2.0, PC).unwrap();
        let big = mie_coefficients(3, 2.0, Permittivity::Finite(1e12)).unwrap();
        assert_relative_eq!(big.te, pc.te, max_relative = 1e-5);
        assert_relative_eq!(big.tm, pc.tm, max_relative = 1e-5);
    }

    #[test]
    fn vacuum_plate_gives_zero_block() {
        let b = matrix_element(2, 3, 1, 1.5, PC, Permittivity::Finite(1.0), 0.7, 40).unwrap();
        assert!(b.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn l1_m0_closed_form_and_decay() {
        // M_TE,TE = (3π/4)(I/K) e^{−p}(2/p² + 2/p³), p = 2κL, for PC/PC.
        let w = 0.5;
        let t = mie_coefficients(1, w, PC).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for &kl in &[1.0, 2.0, 4.0] {
            let b = matrix_element(1, 1, 0, kl, PC, PC, w, 60).unwrap();
            let p = 2.0 * kl;
            let integral = (-p).exp() * (2.0 / (p * p) + 2.0 / (p * p * p));
            assert_relative_eq!(b[0][0], 0.75 * PI * t.te * integral, max_relative = 1e-12);
            assert_relative_eq!(b[1][1], -0.75 * PI * t.tm * integral, max_relative = 1e-12);
            assert_eq!(b[0][1], 0.0);
            let norm = b.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
            if let Some((kl0, n0)) = prev {
                let slope = norm.ln() - n0.ln();
                let poly = (integral / ((-p).exp())).ln()
                    - {
                        let p0 = 2.0 * kl0;
                        (2.0 / (p0 * p0) + 2.0 / (p0 * p0 * p0)).ln()
                    };
                assert_relative_eq!(slope, -2.0 * (kl - kl0) + poly, epsilon = 1e-10);
            }
            prev = Some((kl, norm));
        }
    }

    #[test]
    fn negative_m_is_similar() {
        let eps1 = Permittivity::Finite(4.0);
        let eps2 = Permittivity::Finite(3.0);
        for (l, lp, m) in [(2, 3, 1), (4, 4, 2), (5, 3, 3)] {
            let p = matrix_element(l, lp, m, 1.3, eps1, eps2, 0.9, 40).unwrap();
            let n = matrix_element(l, lp, -m, 1.3, eps1, eps2, 0.9, 40).unwrap();
            assert_relative_eq!(n[0][0], p[0][0], max_relative = 1e-13);
            assert_relative_eq!(n[1][1], p[1][1], max_relative = 1e-13);
            assert_relative_eq!(n[0][1], -p[0][1], max_relative = 1e-13);
            assert_relative_eq!(n[1][0], -p[1][0], max_relative = 1e-13);
        }
    }

    #[test]
    fn phase_spot_check_l1_m1() {
        // Printed element with the complex P_1^1(x) = −(1−x²)^{1/2}, principal
        // branch, against the real implementation.
        let (kl, w) = (0.8, 0.6);
        let eps2 = Permittivity::Finite(2.5);
        let rule = gauss_laguerre(60).unwrap();
        let grid = ThetaGrid::new(&rule, kl);
        let t = mie_coefficients(1, w, PC).unwrap();
        let pref = -PI / 2.0 * (9.0f64 / 4.0 * (1.0 / 2.0) * (1.0 / 2.0)).sqrt();
        let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (j, &delta) in grid.delta.iter().enumerate() {
            let x = Complex64::new(1.0 + delta, 0.0);
            let root = (Complex64::new(1.0, 0.0) - x * x).sqrt();
            let p = -root;
            let dp = x / root;
            let sh = (delta * (2.0 + delta)).sqrt();
            let (a, b) = (dp * sh, p / sh);
            let (t1, t2) = plate_theta(eps2, delta);
            let wj = grid.ln_w[j].exp();
            let lm = [[a, -b], [-b, a]];
            let rm = [[a, b], [b, a]];
            let tt = [t1, t2];
            for r in 0..2 {
                for c in 0..2 {
                    for q in 0..2 {
                        g[r][c] += lm[r][q] * tt[q] * rm[q][c] * wj;
                    }
                }
            }
        }
        let real = matrix_element(1, 1, 1, kl, PC, eps2, w, 60).unwrap();
        let tl = [t.te, t.tm];
        for r in 0..2 {
            for c in 0..2 {
                let z = g[r][c] * pref * tl[r];
                assert!(z.im.abs() <= 1e-14 * z.norm().max(1e-300));
                assert_relative_eq!(z.re, real[r][c], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn symmetrized_block_matches_printed_elements() {
        let geom = Geometry::new(1.0, 0.5).unwrap();
        let trunc = TruncationSpec { l_max: 5, ..Default::default() };
        let (eps1, eps2) = (Permittivity::Finite(5.0), Permittivity::Finite(3.0));
        let kappa = 0.7;
        let rule = gauss_laguerre(trunc.laguerre_nodes()).unwrap();
        let lnf = ln_factorials(10);
        let mie = mie_log(5, kappa * geom.radius, eps1).unwrap();
        let grid = ThetaGrid::new(&rule, kappa * geom.center_distance);
        let plate = grid.delta.iter().map(|&d| plate_theta(eps2, d)).collect();
        let data = NodeData { mie: mie.clone(), grid, plate, lnf: &lnf, l_max: 5 };
        let m = 2usize;
        let blk = data.block(m).unwrap();
        let n = 4;
        for (i, l) in (2..=5).enumerate() {
            for (k, lp) in (2..=5).enumerate() {
                let e = matrix_element(l, lp, m as i64, kappa * 1.5, eps1, eps2, kappa, 40).unwrap();
                for p in 0..2 {
                    for q in 0..2 {
                        let tl = mie[l - 1][p];
                        let tr = mie[lp - 1][q];
                        // M̃ = |T_l|^{-1/2} M |T_l′|^{1/2}
                        let expect = e[p][q] * ((tr.ln_abs - tl.ln_abs) * 0.5).exp();
                        assert_relative_eq!(
                            blk[(p * n + i, q * n + k)],
                            expect,
                            max_relative = 1e-10,
                            epsilon = 1e-300
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn vacuum_energy_is_zero() {
        let geom = Geometry::new(1e-6, 2e-7).unwrap();
        let trunc = TruncationSpec::for_geometry(&geom);
        let pc = DielectricModel::PerfectConductor;
        assert_eq!(exact_energy(&DielectricModel::Vacuum, &pc, &geom, &trunc).unwrap(), 0.0);
        assert_eq!(exact_energy(&pc, &DielectricModel::Vacuum, &geom, &trunc).unwrap(), 0.0);
    }

    #[test]
    fn casimir_polder_limit() {
        // Small perfectly conducting sphere far from a perfect mirror:
        // E → −9ħcR³/(16πL⁴).
        let pc = DielectricModel::PerfectConductor;
        let r = 1e-7;
        let geom = Geometry::new(r, 99.0 * r).unwrap();
        let trunc = TruncationSpec { l_max: 3, tolerance: 1e-7, ..Default::default() };
        let e = exact_energy(&pc, &pc, &geom, &trunc).unwrap();
        let l = geom.center_distance;
        let cp = -9.0 * HBAR_C * r.powi(3) / (16.0 * PI * l.powi(4));
        // next order is O(R/L)
        assert!(((e / cp) - 1.0).abs() < 3.0 * r / l, "{e:e} vs {cp:e}");
        assert!(e < 0.0);
    }

    #[test]
    fn energy_negative_and_bounded_by_pfa() {
        let pc = DielectricModel::PerfectConductor;
        let geom = Geometry::new(1e-6, 5e-7).unwrap();
        let trunc = TruncationSpec::for_geometry(&geom);
        let e = exact_energy(&pc, &pc, &geom, &trunc).unwrap();
        let pfa = -PI.powi(3) * HBAR_C * geom.radius / (720.0 * geom.distance.powi(2));
        assert!(e < 0.0 && e > pfa, "{e:e} vs {pfa:e}");
    }
}
