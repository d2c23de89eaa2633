//! Gauss rules and the s-series accumulator shared by the integrators.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Result};

/// Quadrature rule; `ln_weights` holds ln w_j so that tiny Laguerre weights
/// keep full relative accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub ln_weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine map of a Legendre rule from (−1, 1) to (a, b).
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let h = 0.5 * (b - a);
        let m = 0.5 * (b + a);
        Rule {
            nodes: self.nodes.iter().map(|x| m + h * x).collect(),
            weights: self.weights.iter().map(|w| h * w).collect(),
            ln_weights: self.ln_weights.iter().map(|w| w + h.ln()).collect(),
        }
    }
}

/// Legendre polynomial P_n and derivative at x.
fn legendre_pn(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// n-point Gauss–Legendre rule on (−1, 1), nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<Rule> {
    if n == 0 {
        return Err(domain("Gauss-Legendre rule needs n >= 1"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pn(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pn(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let ln_weights = weights.iter().map(|w: &f64| w.ln()).collect();
    Ok(Rule { nodes, weights, ln_weights })
}

/// Laguerre L_n(x), L_{n-1}(x) as (mantissas, common ln scale).
fn laguerre_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    let (mut p0, mut p1) = (0.0, 1.0);
    let mut ln_scale = 0.0;
    for k in 0..n {
        let p2 = ((2 * k + 1) as f64 - x) * p1 / (k + 1) as f64 - k as f64 * p0 / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
        let m = p1.abs().max(p0.abs());
        if m > 1e150 {
            p0 /= m;
            p1 /= m;
            ln_scale += m.ln();
        }
    }
    (p1, p0, ln_scale)
}

/// n-point Gauss–Laguerre rule for ∫₀^∞ e^{−x} f(x) dx, nodes ascending.
pub fn gauss_laguerre(n: usize) -> Result<Rule> {
    if n == 0 {
        return Err(domain("Gauss-Laguerre rule needs n >= 1"));
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i + 1 == j || j + 1 == i {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut ln_weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (ln_, lnm1, _) = laguerre_scaled(n, *x);
            // L_n' = n (L_n − L_{n−1}) / x
            let dx = *x * ln_ / (nf * (ln_ - lnm1));
            *x -= dx;
            if dx.abs() <= 1e-15 * x.abs() {
                break;
            }
        }
        // w = x / ((n+1) L_{n+1}(x))²
        let (lnp1, _, scale) = laguerre_scaled(n + 1, *x);
        ln_weights.push(x.ln() - 2.0 * ((nf + 1.0) * lnp1.abs()).ln() - 2.0 * scale);
    }
    let weights = ln_weights.iter().map(|w| w.exp()).collect();
    Ok(Rule { nodes, weights, ln_weights })
}

/// Σ_{S>N} S^{−k} by Euler–Maclaurin (accurate to ~N^{−k−5}).
pub fn hurwitz_tail(k: i32, n: f64) -> f64 {
    let kf = k as f64;
    n.powi(1 - k) / (kf - 1.0) - 0.5 * n.powi(-k) + kf * n.powi(-k - 1) / 12.0
        - kf * (kf + 1.0) * (kf + 2.0) * n.powi(-k - 3) / 720.0
}

/// Tail of an algebraically converging series with terms ~ c/S^{k0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub tail: f64,
    /// Spread between the three- and two-coefficient fits, or the worst-case
    /// power-law tail when the terms are not yet asymptotic.
    pub uncertainty: f64,
    pub applied: bool,
}

/// Fits Σ_k c_k S^{−k} (k = k0, k0+1, k0+2) to the terms at S = N, N/2, N/4
/// and sums the fitted tail beyond N. `terms[i]` is the term at S = i + 1.
pub fn series_tail(terms: &[f64], k0: i32) -> TailEstimate {
    let n = terms.len();
    let last = terms.last().copied().unwrap_or(0.0);
    let fallback = TailEstimate {
        tail: 0.0,
        uncertainty: last.abs() * n as f64 / (k0 as f64 - 1.0),
        applied: false,
    };
    if n < 16 || last == 0.0 {
        return fallback;
    }
    let s = [n, n / 2, n / 4];
    let f = [terms[s[0] - 1], terms[s[1] - 1], terms[s[2] - 1]];
    let ratio = f[0] / f[1];
    let expected = (s[1] as f64 / s[0] as f64).powi(k0);
    if !(ratio > 0.6 * expected && ratio < 1.5 * expected) {
        return fallback;
    }
    let nf = n as f64;
    // three-coefficient fit
    let a = DMatrix::from_fn(3, 3, |i, j| (s[i] as f64).powi(-(k0 + j as i32)));
    let b = nalgebra::DVector::from_row_slice(&f);
    let c3 = match a.lu().solve(&b) {
        Some(c) => c,
        None => return fallback,
    };
    let tail3: f64 = (0..3).map(|j| c3[j] * hurwitz_tail(k0 + j as i32, nf)).sum();
    // two-coefficient fit for the spread
    let a2 = DMatrix::from_fn(2, 2, |i, j| (s[i] as f64).powi(-(k0 + j as i32)));
    let b2 = nalgebra::DVector::from_row_slice(&f[..2]);
    let tail2: f64 = match a2.lu().solve(&b2) {
        Some(c) => (0..2).map(|j| c[j] * hurwitz_tail(k0 + j as i32, nf)).sum(),
        None => tail3,
    };
    TailEstimate {
        tail: tail3,
        uncertainty: (tail3 - tail2).abs(),
        applied: true,
    }
}

/// Stop rule: three consecutive terms each below `rel_tol`·|partial sum|.
#[derive(Debug, Clone)]
pub struct SeriesAccumulator {
    rel_tol: f64,
    k0: i32,
    terms: Vec<f64>,
    sum: f64,
    small_run: usize,
}

impl SeriesAccumulator {
    pub fn new(rel_tol: f64, k0: i32) -> Self {
        Self { rel_tol, k0, terms: Vec::new(), sum: 0.0, small_run: 0 }
    }

    pub fn push(&mut self, term: f64) {
        self.sum += term;
        self.terms.push(term);
        if term.abs() < self.rel_tol * self.sum.abs() {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
    }

    pub fn converged(&self) -> bool {
        self.small_run >= 3
    }

    pub fn partial_sum(&self) -> f64 {
        self.sum
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn tail(&self) -> TailEstimate {
        series_tail(&self.terms, self.k0)
    }

    /// Partial sum plus fitted tail.
    pub fn total(&self) -> f64 {
        self.sum + self.tail().tail
    }
}
