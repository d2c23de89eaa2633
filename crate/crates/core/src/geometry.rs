use crate::error::{domain, Result};

/// Sphere of radius R at closest distance d above a plate; L = d + R is the
/// distance from the sphere centre to the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub radius: f64,
    pub distance: f64,
    pub e: f64,
    pub center_distance: f64,
}

impl Geometry {
    pub fn new(radius: f64, distance: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !(distance > 0.0 && distance.is_finite()) {
            return Err(domain(format!(
                "radius and distance must be positive and finite, got R={radius}, d={distance}"
            )));
        }
        Ok(Self {
            radius,
            distance,
            e: distance / radius,
            center_distance: distance + radius,
        })
    }

    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        Self::new(self.radius, distance)
    }
}
