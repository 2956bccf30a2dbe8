//! Camera placement on a sphere around the scene.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::camera::{wrap_degrees, SphericalCoord};
use crate::error::{Error, Result};
use crate::real::Real;

/// Azimuth sector a viewpoint is drawn around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    Deg0,
    Deg90,
    Deg180,
    Deg270,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::Deg0,
        Quadrant::Deg90,
        Quadrant::Deg180,
        Quadrant::Deg270,
    ];

    pub fn degrees(self) -> f64 {
        match self {
            Quadrant::Deg0 => 0.0,
            Quadrant::Deg90 => 90.0,
            Quadrant::Deg180 => 180.0,
            Quadrant::Deg270 => 270.0,
        }
    }

    /// Cycles through the four sectors.
    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }
}

/// Viewpoint distribution: `φ ~ U(φ0 ± φ1)`, `θ ~ U(θ0 ± θ1)` with θ0 one of
/// the four quadrants, and `r = ρ·R` with `ρ ~ U(radius_scale)` and `R` the
/// scene's bounding radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewpointSampler {
    pub phi_center: f64,
    pub phi_spread: f64,
    pub theta_spread: f64,
    pub radius_scale: (f64, f64),
}

impl Default for ViewpointSampler {
    fn default() -> Self {
        Self {
            phi_center: 60.0,
            phi_spread: 7.5,
            theta_spread: 7.5,
            radius_scale: (2.5, 3.5),
        }
    }
}

impl ViewpointSampler {
    pub fn with_radius_scale(lo: f64, hi: f64) -> Result<Self> {
        let s = Self {
            radius_scale: (lo, hi),
            ..Self::default()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.radius_scale;
        if !(lo > 0.0 && lo <= hi) || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius scale range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
            )));
        }
        if !(self.phi_spread >= 0.0 && self.theta_spread >= 0.0) {
            return Err(Error::InvalidParameter(
                "angular spreads must be non-negative".into(),
            ));
        }
        if !(self.phi_center - self.phi_spread > 0.0 && self.phi_center + self.phi_spread < 180.0) {
            return Err(Error::InvalidParameter(
                "polar range must stay inside (0, 180)".into(),
            ));
        }
        Ok(())
    }

    /// Draws a viewpoint. With `quadrant = None` the sector is drawn uniformly.
    pub fn sample<T: Real, R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        bounding_radius: T,
        quadrant: Option<Quadrant>,
    ) -> SphericalCoord<T> {
        let q = quadrant.unwrap_or_else(|| Quadrant::ALL[rng.random_range(0..4)]);
        let phi =
            rng.random_range(self.phi_center - self.phi_spread..=self.phi_center + self.phi_spread);
        let theta = q.degrees() + rng.random_range(-self.theta_spread..=self.theta_spread);
        let (lo, hi) = self.radius_scale;
        let rho = rng.random_range(lo..=hi);
        SphericalCoord {
            r: T::lit(rho) * bounding_radius,
            phi: T::lit(phi),
            theta: wrap_degrees(T::lit(theta)),
        }
    }
}

/// Signed angular difference `a − b` folded into `(−180, 180]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}
