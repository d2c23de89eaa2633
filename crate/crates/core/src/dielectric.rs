//! Permittivity models on the imaginary frequency axis.

use std::path::Path;

use crate::constants::C;
use crate::error::{domain, Error, Result};

/// ε(iξ). Perfect conductors carry a symbolic marker instead of a huge float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Permittivity {
    Finite(f64),
    Infinite,
}

impl Permittivity {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Permittivity::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Permittivity::Finite(v) => Some(v),
            Permittivity::Infinite => None,
        }
    }
}

/// Tabulated ε(iξ) with log-log linear interpolation and no extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct PermittivityTable {
    ln_xi: Vec<f64>,
    ln_eps_minus_one: Vec<f64>,
    xi: Vec<f64>,
    eps: Vec<f64>,
}

impl PermittivityTable {
    pub fn new(xi: Vec<f64>, eps: Vec<f64>) -> Result<Self> {
        if xi.len() != eps.len() || xi.len() < 2 {
            return Err(domain("permittivity table needs at least two (xi, eps) rows"));
        }
        for w in xi.windows(2) {
            if !(w[1] > w[0]) {
                return Err(domain("permittivity table xi column must be strictly increasing"));
            }
        }
        if !(xi[0] > 0.0) {
            return Err(domain("permittivity table xi values must be positive"));
        }
        if let Some(bad) = eps.iter().find(|&&v| !(v >= 1.0) || !v.is_finite()) {
            return Err(domain(format!("permittivity table eps must be finite and >= 1, found {bad}")));
        }
        // Interpolating ln(ε-1) keeps the power law of metals exact; ε = 1 rows
        // fall back to ln ε.
        let ln_eps_minus_one = if eps.iter().all(|&v| v > 1.0) {
            eps.iter().map(|&v| (v - 1.0).ln()).collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            ln_xi: xi.iter().map(|v| v.ln()).collect(),
            ln_eps_minus_one,
            xi,
            eps,
        })
    }

    /// Parses two whitespace- or comma-separated columns; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xi = Vec::new();
        let mut eps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("bad number {s:?}: {e}"),
                })
            };
            let x = parse(fields[0])?;
            let v = parse(fields[1])?;
            if let Some(&last) = xi.last() {
                if !(x > last) {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: "xi column must be strictly increasing".into(),
                    });
                }
            }
            xi.push(x);
            eps.push(v);
        }
        Self::new(xi, eps)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xi[0], *self.xi.last().unwrap())
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(xi >= lo && xi <= hi) {
            return Err(domain(format!(
                "xi = {xi:e} rad/s outside table range [{lo:e}, {hi:e}]"
            )));
        }
        let x = xi.ln();
        let k = match self.ln_xi.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= self.xi.len() => self.xi.len() - 2,
            k => k - 1,
        };
        let f = (x - self.ln_xi[k]) / (self.ln_xi[k + 1] - self.ln_xi[k]);
        if self.ln_eps_minus_one.is_empty() {
            let (a, b) = (self.eps[k].ln(), self.eps[k + 1].ln());
            Ok((a + f * (b - a)).exp())
        } else {
            let (a, b) = (self.ln_eps_minus_one[k], self.ln_eps_minus_one[k + 1]);
            Ok(1.0 + (a + f * (b - a)).exp())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    Vacuum,
    PerfectConductor,
    /// ε = 1 + ω_p²/ξ².
    Plasma { omega_p: f64 },
    /// ε = 1 + ω_p²/(ξ(ξ+γ)).
    Drude { omega_p: f64, gamma: f64 },
    Custom(PermittivityTable),
}

impl DielectricModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DielectricModel::Plasma { omega_p } if !(omega_p > 0.0 && omega_p.is_finite()) => {
                Err(domain(format!("plasma frequency must be positive, got {omega_p}")))
            }
            DielectricModel::Drude { omega_p, gamma }
                if !(omega_p > 0.0 && omega_p.is_finite() && gamma >= 0.0 && gamma.is_finite()) =>
            {
                Err(domain(format!(
                    "Drude parameters need omega_p > 0 and gamma >= 0, got {omega_p}, {gamma}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Plasma frequency, infinite for a perfect conductor; `None` for vacuum
    /// and tables.
    pub fn plasma_frequency(&self) -> Option<f64> {
        match *self {
            DielectricModel::PerfectConductor => Some(f64::INFINITY),
            DielectricModel::Plasma { omega_p } | DielectricModel::Drude { omega_p, .. } => {
                Some(omega_p)
            }
            _ => None,
        }
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, DielectricModel::Vacuum)
    }
}

/// ε(iξ) at ξ > 0 (rad/s).
pub fn permittivity(model: &DielectricModel, xi: f64) -> Result<Permittivity> {
    model.validate()?;
    match model {
        DielectricModel::Vacuum => Ok(Permittivity::Finite(1.0)),
        DielectricModel::PerfectConductor => Ok(Permittivity::Infinite),
        _ if !(xi > 0.0) => Err(domain(format!("xi must be > 0, got {xi}"))),
        DielectricModel::Plasma { omega_p } => {
            Ok(Permittivity::Finite(1.0 + (omega_p / xi).powi(2)))
        }
        DielectricModel::Drude { omega_p, gamma } => {
            Ok(Permittivity::Finite(1.0 + omega_p * omega_p / (xi * (xi + gamma))))
        }
        DielectricModel::Custom(table) => table.eval(xi).map(Permittivity::Finite),
    }
}

/// The ξ → 0⁺ limit: metals (plasma, Drude, PC) become ideal reflectors.
pub fn permittivity_static_limit(model: &DielectricModel) -> Result<Permittivity> {
    model.validate()?;
    match model {
        DielectricModel::Vacuum => Ok(Permittivity::Finite(1.0)),
        DielectricModel::Custom(_) => Err(domain("tabulated permittivity has no xi = 0 limit")),
        _ => Ok(Permittivity::Infinite),
    }
}

/// A medium expressed in the reduced variables of a fixed gap d, where
/// ξ = (c/d)·t·cos φ with τ = sin φ.
#[derive(Debug, Clone, PartialEq)]
pub enum ReducedMedium {
    Vacuum,
    PerfectConductor,
    /// Plasma when `gamma_d == 0`.
    Drude { omega_d: f64, gamma_d: f64 },
    Custom { table: PermittivityTable, c_over_d: f64 },
}

impl ReducedMedium {
    pub fn new(model: &DielectricModel, distance: f64) -> Result<Self> {
        model.validate()?;
        if !(distance > 0.0) {
            return Err(domain(format!("distance must be positive, got {distance}")));
        }
        Ok(match model {
            DielectricModel::Vacuum => ReducedMedium::Vacuum,
            DielectricModel::PerfectConductor => ReducedMedium::PerfectConductor,
            DielectricModel::Plasma { omega_p } => ReducedMedium::Drude {
                omega_d: omega_p * distance / C,
                gamma_d: 0.0,
            },
            DielectricModel::Drude { omega_p, gamma } => ReducedMedium::Drude {
                omega_d: omega_p * distance / C,
                gamma_d: gamma * distance / C,
            },
            DielectricModel::Custom(table) => ReducedMedium::Custom {
                table: table.clone(),
                c_over_d: C / distance,
            },
        })
    }

    /// ε at reduced frequency w = t·cos φ (so ξ = (c/d)·w).
    pub fn eps_at(&self, w: f64) -> Result<Permittivity> {
        Ok(match self {
            ReducedMedium::Vacuum => Permittivity::Finite(1.0),
            ReducedMedium::PerfectConductor => Permittivity::Infinite,
            ReducedMedium::Drude { omega_d, gamma_d } => {
                Permittivity::Finite(1.0 + omega_d * omega_d / (w * (w + gamma_d)))
            }
            ReducedMedium::Custom { table, c_over_d } => {
                Permittivity::Finite(table.eval(c_over_d * w)?)
            }
        })
    }
}

/// ε in the reduced (t, τ) variables at gap `distance`.
pub fn permittivity_reduced(
    model: &DielectricModel,
    t: f64,
    tau: f64,
    distance: f64,
) -> Result<Permittivity> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(domain(format!("tau must lie in (0, 1), got {tau}")));
    }
    if !(t > 0.0) {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    ReducedMedium::new(model, distance)?.eps_at(t * (1.0 - tau * tau).sqrt())
}
