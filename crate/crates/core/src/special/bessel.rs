//! Modified Bessel functions I_ν, K_ν of half-integer order ν = l + ½.

use std::f64::consts::PI;

use super::ln_sinh;
use crate::error::{domain, Result};

/// I_ν(x), K_ν(x) and the combinations ½I_ν + xI′_ν, ½K_ν + xK′_ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub order: f64,
    pub x: f64,
    pub i_val: f64,
    pub k_val: f64,
    pub i_combo: f64,
    pub k_combo: f64,
    /// I and its combo carry e^{−x}, K and its combo e^{+x}.
    pub scaled: bool,
}

/// Log-form Bessel data for l = 0..=l_max at one argument.
///
/// With ν = l + ½: `ln_i[l] = ln I_ν`, `ln_k[l] = ln K_ν`,
/// `ci[l] = (½I_ν + xI′_ν)/I_ν` and `ck[l] = (½K_ν + xK′_ν)/K_ν`.
#[derive(Debug, Clone)]
pub struct BesselSequence {
    pub x: f64,
    pub ln_i: Vec<f64>,
    pub ln_k: Vec<f64>,
    pub ci: Vec<f64>,
    pub ck: Vec<f64>,
    /// I_ν/I_{ν−1} and K_ν/K_{ν−1}.
    ratio_i: Vec<f64>,
    ratio_k: Vec<f64>,
}

impl BesselSequence {
    pub fn new(l_max: usize, x: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(domain(format!("Bessel argument must be positive, got {x}")));
        }
        let extra = 20usize.max((40.0 * x).sqrt().ceil() as usize);
        let top = l_max + extra;
        // Uniform asymptotic start for I_{ν+1}/I_ν, then downward recurrence.
        let nu_top = top as f64 + 1.5;
        let mut r = x / (nu_top + (nu_top * nu_top + x * x).sqrt());
        let mut ratio_i = vec![0.0; l_max + 1];
        for l in (0..=top).rev() {
            let nu = l as f64 + 0.5;
            r = 1.0 / (2.0 * nu / x + r);
            if l <= l_max {
                ratio_i[l] = r;
            }
        }
        // r_{1/2} = tanh x exactly; keep the recurrence value for l ≥ 1.
        ratio_i[0] = x.tanh();
        let mut ratio_k = vec![1.0; l_max + 1];
        for l in 1..=l_max {
            let nu_prev = l as f64 - 0.5;
            ratio_k[l] = 1.0 / ratio_k[l - 1] + 2.0 * nu_prev / x;
        }
        let mut ln_i = vec![0.0; l_max + 1];
        let mut ln_k = vec![0.0; l_max + 1];
        ln_i[0] = 0.5 * (2.0 / (PI * x)).ln() + ln_sinh(x);
        ln_k[0] = 0.5 * (PI / (2.0 * x)).ln() - x;
        for l in 1..=l_max {
            ln_i[l] = ln_i[l - 1] + ratio_i[l].ln();
            ln_k[l] = ln_k[l - 1] + ratio_k[l].ln();
        }
        let ci = (0..=l_max).map(|l| x / ratio_i[l] - l as f64).collect();
        let ck = (0..=l_max).map(|l| -x / ratio_k[l] - l as f64).collect();
        Ok(Self { x, ln_i, ln_k, ci, ck, ratio_i, ratio_k })
    }

    pub fn l_max(&self) -> usize {
        self.ln_i.len() - 1
    }

    /// ln of x(I_ν K_{ν−1} + I_{ν−1} K_ν); zero by the Wronskian identity.
    pub fn wronskian_residual(&self, l: usize) -> f64 {
        let s = 1.0 / self.ratio_k[l] + 1.0 / self.ratio_i[l];
        self.ln_i[l] + self.ln_k[l] + (self.x * s).ln()
    }
}

/// I_{l+½}(x), K_{l+½}(x) and their combinations. Unscaled values overflow
/// beyond x ≈ 700, so `scaled` is required there.
pub fn bessel_half(l: usize, x: f64, scaled: bool) -> Result<BesselPair> {
    if !scaled && x > 700.0 {
        return Err(domain(format!("unscaled Bessel values overflow at x = {x}; use scaling")));
    }
    let seq = BesselSequence::new(l, x)?;
    let (si, sk) = if scaled { (-x, x) } else { (0.0, 0.0) };
    let i_val = (seq.ln_i[l] + si).exp();
    let k_val = (seq.ln_k[l] + sk).exp();
    Ok(BesselPair {
        order: l as f64 + 0.5,
        x,
        i_val,
        k_val,
        i_combo: i_val * seq.ci[l],
        k_combo: k_val * seq.ck[l],
        scaled,
    })
}
