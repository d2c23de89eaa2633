//! Perfect-conductor anchored series in a_i = 1/ω_{d,i} = c/(ω_{p,i} d).
//!
//! E ≈ E_PC·(Σβ_ij a₁ⁱa₂ʲ + e Σλ_ij a₁ⁱa₂ʲ), with order-dependent weights for
//! force and gradient.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::ntlo::Kind;

pub const MAX_ORDER: usize = 5;

/// r₋₂π⁻² + r₀ + r₂π² + r₄π⁴ with rational components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactValue {
    pub coeffs: [Rational64; 4],
}

const POWERS: [i32; 4] = [-2, 0, 2, 4];

impl ExactValue {
    fn new(c: [(i64, i64); 4]) -> Self {
        Self { coeffs: c.map(|(n, d)| Rational64::new(n, d)) }
    }

    pub fn to_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(POWERS)
            .map(|(r, p)| (*r.numer() as f64 / *r.denom() as f64) * PI.powi(p))
            .sum()
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (r, p) in self.coeffs.iter().zip(POWERS) {
            if *r.numer() == 0 {
                continue;
            }
            let neg = *r.numer() < 0;
            let mag = if neg { -*r } else { *r };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match p {
                0 => write!(f, "{mag}")?,
                -2 => write!(f, "{mag}/pi^2")?,
                _ => write!(f, "{mag}*pi^{p}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub beta: BTreeMap<(usize, usize), ExactValue>,
    pub lambda: BTreeMap<(usize, usize), ExactValue>,
    pub max_order: usize,
}

const Z: (i64, i64) = (0, 1);

fn build() -> CoefficientTable {
    let v = ExactValue::new;
    let beta_lower: [((usize, usize), ExactValue); 12] = [
        ((0, 0), v([Z, (1, 1), Z, Z])),
        ((1, 0), v([Z, (-4, 3), Z, Z])),
        ((2, 0), v([Z, (9, 5), Z, Z])),
        ((1, 1), v([Z, (18, 5), Z, Z])),
        ((3, 0), v([Z, (-16, 7), (32, 735), Z])),
        ((2, 1), v([Z, (-48, 7), Z, Z])),
        ((4, 0), v([Z, (25, 9), (-326, 1323), Z])),
        ((3, 1), v([Z, (100, 9), (-326, 1323), Z])),
        ((2, 2), v([Z, (50, 3), Z, Z])),
        ((5, 0), v([Z, (-36, 11), (1220, 1617), (-379, 32340)])),
        ((4, 1), v([Z, (-180, 11), (2440, 1617), Z])),
        ((3, 2), v([Z, (-360, 11), (1220, 1617), Z])),
    ];
    let mut beta = BTreeMap::new();
    for (k, val) in beta_lower {
        beta.insert(k, val);
        beta.insert((k.1, k.0), val);
    }
    let lambda_rows: [((usize, usize), ExactValue); 21] = [
        ((0, 0), v([(-20, 1), (1, 3), Z, Z])),
        ((1, 0), v([(56, 3), (-32, 45), Z, Z])),
        ((0, 1), v([(56, 3), (-14, 45), Z, Z])),
        ((2, 0), v([(-398, 21), (401, 315), Z, Z])),
        ((1, 1), v([(-796, 21), (454, 315), Z, Z])),
        ((0, 2), v([(-398, 21), (113, 315), Z, Z])),
        ((3, 0), v([(410, 21), (-37, 18), (286, 6615), Z])),
        ((2, 1), v([(410, 7), (-26, 7), Z, Z])),
        ((1, 2), v([(410, 7), (-16, 7), Z, Z])),
        ((0, 3), v([(410, 21), (-79, 126), (1, 6615), Z])),
        ((4, 0), v([(-69824, 3465), (35141, 10395), (-28022, 99225), Z])),
        ((3, 1), v([(-279296, 3465), (84176, 10395), (-2774, 14175), Z])),
        ((2, 2), v([(-139648, 1155), (742, 99), (32, 11025), Z])),
        ((1, 3), v([(-279296, 3465), (43856, 10395), (-46558, 1091475), Z])),
        ((0, 4), v([(-69824, 3465), (14981, 10395), (-11962, 1091475), Z])),
        ((5, 0), v([(26732, 1287), (-150368, 27027), (4937399, 5675670), (-1142, 63063)])),
        ((4, 1), v([(133660, 1287), (-35026, 2079), (773884, 567567), Z])),
        ((3, 2), v([(267320, 1287), (-548024, 27027), (26212, 51597), Z])),
        ((2, 3), v([(267320, 1287), (-415724, 27027), (16826, 81081), Z])),
        ((1, 4), v([(133660, 1287), (-256888, 27027), (19984, 81081), Z])),
        ((0, 5), v([(26732, 1287), (-84218, 27027), (3329, 62370), (8059, 2522520)])),
    ];
    CoefficientTable {
        beta,
        lambda: lambda_rows.into_iter().collect(),
        max_order: MAX_ORDER,
    }
}

pub fn table() -> &'static CoefficientTable {
    static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
    TABLE.get_or_init(build)
}

fn lookup(map: &BTreeMap<(usize, usize), ExactValue>, i: usize, j: usize) -> Result<ExactValue> {
    if i + j > MAX_ORDER {
        return Err(Error::Range(format!("order i + j = {} exceeds {MAX_ORDER}", i + j)));
    }
    Ok(map[&(i, j)])
}

pub fn beta(i: usize, j: usize) -> Result<ExactValue> {
    lookup(&table().beta, i, j)
}

pub fn lambda(i: usize, j: usize) -> Result<ExactValue> {
    lookup(&table().lambda, i, j)
}

/// Order weights (leading, first order) at n = i + j.
fn weights(kind: Kind, n: usize) -> (f64, f64) {
    let n = n as f64;
    match kind {
        Kind::Energy => (1.0, 1.0),
        Kind::Force => ((n + 2.0) / 2.0, (n + 1.0) / 2.0),
        Kind::Gradient => ((n + 2.0) * (n + 3.0) / 6.0, (n + 1.0) * (n + 2.0) / 6.0),
    }
}

/// Leading and first-order parts (the latter without its factor e).
pub fn pc_series_parts(kind: Kind, a1: f64, a2: f64, max_order: usize) -> Result<(f64, f64)> {
    if max_order > MAX_ORDER {
        return Err(Error::Range(format!("max_order {max_order} exceeds {MAX_ORDER}")));
    }
    if !(a1 >= 0.0) || !(a2 >= 0.0) {
        return Err(Error::Domain(format!("a parameters must be >= 0, got {a1}, {a2}")));
    }
    let (mut lead, mut first) = (0.0, 0.0);
    for n in 0..=max_order {
        let (wb, wl) = weights(kind, n);
        for i in 0..=n {
            let j = n - i;
            let m = a1.powi(i as i32) * a2.powi(j as i32);
            lead += wb * beta(i, j)?.to_f64() * m;
            first += wl * lambda(i, j)?.to_f64() * m;
        }
    }
    Ok((lead, first))
}

/// Dimensionless multiplier of the perfect-conductor PFA value.
pub fn pc_series_eval(kind: Kind, a1: f64, a2: f64, e: f64, max_order: usize) -> Result<f64> {
    let (lead, first) = pc_series_parts(kind, a1, a2, max_order)?;
    Ok(lead + e * first)
}
