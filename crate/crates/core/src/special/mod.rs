//! Special functions for the multipole oracle: half-integer modified Bessel
//! functions, associated Legendre functions on (1, ∞) and Debye factors.

pub mod bessel;
pub mod debye;
pub mod legendre;

pub use bessel::{bessel_half, BesselPair, BesselSequence};
pub use debye::{debye_factors, DebyeFactors};
pub use legendre::{assoc_legendre_real, LegendreSequence, LegendreValue};

/// ln sinh x for x > 0 without overflow.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}
