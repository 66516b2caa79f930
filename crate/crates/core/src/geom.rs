//! Small 2-D direction/angle helpers shared across the crate.

use std::f64::consts::{PI, TAU};

/// Unit vector on the circle, built from a polar angle.
///
/// Constructing from an angle keeps the unit norm structural; there is no
/// normalization drift to manage downstream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dir2 {
    pub x: f64,
    pub y: f64,
}

impl Dir2 {
    pub fn from_angle(angle: f64) -> Self {
        Self {
            x: angle.cos(),
            y: angle.sin(),
        }
    }

    #[inline]
    pub fn dot(self, other: Dir2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Dot product with an arbitrary point/vector.
    #[inline]
    pub fn dot_xy(self, x: f64, y: f64) -> f64 {
        self.x * x + self.y * y
    }

    /// Rotation by -pi/2 (clockwise).
    pub fn perp_cw(self) -> Self {
        Self {
            x: self.y,
            y: -self.x,
        }
    }

    /// Rotation by +pi/2 (counterclockwise).
    pub fn perp_ccw(self) -> Self {
        Self {
            x: -self.y,
            y: self.x,
        }
    }

    pub fn flipped(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
        }
    }

    /// Polar angle in (-pi, pi].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

/// Wrap an angle into [0, 2*pi).
pub fn wrap_tau(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wrap an angle into [0, pi). Directions that differ by pi are identified.
pub fn wrap_pi(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Minimal circular distance between two angles, period 2*pi.
pub fn circ_dist_tau(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Minimal circular distance between two angles, period pi.
pub fn circ_dist_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

pub fn deg_to_rad(d: f64) -> f64 {
    d * PI / 180.0
}

pub fn rad_to_deg(r: f64) -> f64 {
    r * 180.0 / PI
}
