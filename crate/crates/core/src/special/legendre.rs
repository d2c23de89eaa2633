//! Associated Legendre functions P̂_l^m(x) = (x²−1)^{m/2} d^{l+m}/dx^{l+m}
//! (x²−1)^l / (2^l l!) on x = cosh θ > 1; real and positive there.

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreValue {
    pub p: f64,
    /// sinh θ · dP̂/dx.
    pub dp: f64,
}

/// Log-form values for l = m..=l_max at one argument.
#[derive(Debug, Clone)]
pub struct LegendreSequence {
    pub m: usize,
    /// ln P̂_l^m for l = m + index.
    pub ln_p: Vec<f64>,
    /// sinh θ · P̂′/P̂.
    pub dlog: Vec<f64>,
}

impl LegendreSequence {
    pub fn new(m: usize, l_max: usize, x: f64) -> Result<Self> {
        Self::from_offset(m, l_max, x - 1.0)
    }

    /// Same as [`LegendreSequence::new`] at x = 1 + delta, keeping x² − 1
    /// accurate for small delta.
    pub fn from_offset(m: usize, l_max: usize, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(domain(format!("Legendre argument must exceed 1, got 1 + {delta}")));
        }
        if m > l_max {
            return Err(domain(format!("m = {m} exceeds l_max = {l_max}")));
        }
        let x = 1.0 + delta;
        let w2 = delta * (2.0 + delta);
        let sh = w2.sqrt();
        let n = l_max - m + 1;
        let mut ln_p = Vec::with_capacity(n);
        let mut dlog = Vec::with_capacity(n);
        let mut ln = 0.5 * m as f64 * w2.ln();
        for k in 1..=m {
            ln += ((2 * k - 1) as f64).ln();
        }
        // rho = P̂_{l−1}/P̂_l
        let mut rho = 0.0;
        for l in m..=l_max {
            ln_p.push(ln);
            let (lf, mf) = (l as f64, m as f64);
            dlog.push((lf * x - (lf + mf) * rho) / sh);
            let up = ((2.0 * lf + 1.0) * x - (lf + mf) * rho) / (lf - mf + 1.0);
            ln += up.ln();
            rho = 1.0 / up;
        }
        Ok(Self { m, ln_p, dlog })
    }

    pub fn value(&self, l: usize) -> LegendreValue {
        let i = l - self.m;
        let p = self.ln_p[i].exp();
        LegendreValue { p, dp: p * self.dlog[i] }
    }
}

pub fn assoc_legendre_real(l: usize, m: usize, x: f64) -> Result<LegendreValue> {
    if m > l {
        return Err(domain(format!("m = {m} exceeds l = {l}")));
    }
    Ok(LegendreSequence::new(m, l, x)?.value(l))
}
