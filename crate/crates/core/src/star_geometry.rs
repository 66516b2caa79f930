//! Star configurations: ray directions plus weights, their classification
//! (symmetric / invertible), and constructions of provably stable setups.
//!
//! A star is a union of rays emanating from a common vertex along fixed unit
//! directions. The transform it induces is invertible exactly when the
//! configuration is not symmetric (even ray count paired antipodally with
//! equal weights); stability of the inversion is governed by the Type-2
//! singular directions analysed in [`crate::stability`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::geom::{circ_dist_tau, wrap_tau, Dir2};

/// Angular tolerance for direction equality / antipodality tests (radians).
pub const EPS_DIR: f64 = 1e-9;
/// Tolerance for weight equality tests.
pub const EPS_WEIGHT: f64 = 1e-12;
/// Below this deficit the triangle built by [`stable_config_for_weights`]
/// is treated as degenerate (nearly antipodal rays, unstable scans).
pub const EPS_TRIANGLE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("a star needs at least one ray, got {0}")]
    NoRays(usize),
    #[error("rays ({rays}) and weights ({weights}) differ in length")]
    LengthMismatch { rays: usize, weights: usize },
    #[error("weight {index} is zero; all weights must be nonzero")]
    ZeroWeight { index: usize },
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("ray angle {index} is not finite")]
    NonFiniteAngle { index: usize },
    #[error("rays {first} and {second} point in the same direction (separation {separation:.3e} rad)")]
    DuplicateRays {
        first: usize,
        second: usize,
        separation: f64,
    },
    #[error("a regular star needs an odd ray count >= 3, got {0} (regular even stars are symmetric, hence not invertible)")]
    InvalidRegularCount(usize),
    #[error("weight ratios give a degenerate triangle (side deficit {deficit:.3e}); the resulting rays would be nearly antipodal")]
    DegenerateTriangle { deficit: f64 },
    #[error("constructed configuration failed its emptiness scan (min |stability poly| = {min_abs:.3e})")]
    StabilityCheckFailed { min_abs: f64 },
}

/// A star configuration: `m` distinct ray directions with nonzero weights.
///
/// Rays are stored as polar angles so the unit norm of each direction is
/// structural. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StarConfig {
    angles: Vec<f64>,
    weights: Vec<f64>,
}

/// Component vectors of the ray directions: `a[i]` is the x component of ray
/// `i`, `b[i]` its y component.
#[derive(Clone, Debug, PartialEq)]
pub struct ApertureVectors {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl StarConfig {
    /// Build a configuration from ray polar angles (radians) and weights.
    pub fn new(angles: Vec<f64>, weights: Vec<f64>) -> Result<Self, ConfigError> {
        if angles.len() != weights.len() {
            return Err(ConfigError::LengthMismatch {
                rays: angles.len(),
                weights: weights.len(),
            });
        }
        if angles.is_empty() {
            return Err(ConfigError::NoRays(0));
        }
        for (i, a) in angles.iter().enumerate() {
            if !a.is_finite() {
                return Err(ConfigError::NonFiniteAngle { index: i });
            }
        }
        for (i, c) in weights.iter().enumerate() {
            if !c.is_finite() {
                return Err(ConfigError::NonFiniteWeight { index: i });
            }
            if *c == 0.0 {
                return Err(ConfigError::ZeroWeight { index: i });
            }
        }
        for i in 0..angles.len() {
            for j in (i + 1)..angles.len() {
                let sep = circ_dist_tau(angles[i], angles[j]);
                if sep <= EPS_DIR {
                    return Err(ConfigError::DuplicateRays {
                        first: i,
                        second: j,
                        separation: sep,
                    });
                }
            }
        }
        Ok(Self { angles, weights })
    }

    /// Uniform weights (all 1) over the given ray angles.
    pub fn with_uniform_weights(angles: Vec<f64>) -> Result<Self, ConfigError> {
        let w = vec![1.0; angles.len()];
        Self::new(angles, w)
    }

    /// The regular star with an odd number `m >= 3` of rays: uniform weights,
    /// ray directions at the vertices of a regular m-gon, indexed so that
    /// ray 1 points along +x and subsequent rays alternate +/- around it.
    pub fn regular(m: usize) -> Result<Self, ConfigError> {
        if m < 3 || m % 2 == 0 {
            return Err(ConfigError::InvalidRegularCount(m));
        }
        let k = (m - 1) / 2;
        let mut angles = Vec::with_capacity(m);
        angles.push(0.0);
        for j in 1..=k {
            let a = TAU * j as f64 / m as f64;
            angles.push(a);
            angles.push(-a);
        }
        Self::new(angles, vec![1.0; m])
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ray(&self, i: usize) -> Dir2 {
        Dir2::from_angle(self.angles[i])
    }

    pub fn rays(&self) -> impl Iterator<Item = Dir2> + '_ {
        self.angles.iter().map(|&a| Dir2::from_angle(a))
    }

    /// Component vectors of the ray directions.
    pub fn aperture(&self) -> ApertureVectors {
        let a = self.angles.iter().map(|&t| t.cos()).collect();
        let b = self.angles.iter().map(|&t| t.sin()).collect();
        ApertureVectors { a, b }
    }

    /// A star is symmetric when the ray count is even and the rays split into
    /// antipodal pairs carrying equal weights. Symmetric stars are the only
    /// non-invertible configurations.
    ///
    /// Matching is greedy over antipodal partners; partners are unique because
    /// ray directions are pairwise distinct.
    pub fn is_symmetric(&self) -> bool {
        let m = self.len();
        if m % 2 != 0 {
            return false;
        }
        let mut paired = vec![false; m];
        for i in 0..m {
            if paired[i] {
                continue;
            }
            let target = wrap_tau(self.angles[i] + PI);
            let mut partner = None;
            for j in (i + 1)..m {
                if paired[j] {
                    continue;
                }
                if circ_dist_tau(self.angles[j], target) <= EPS_DIR {
                    partner = Some(j);
                    break;
                }
            }
            match partner {
                Some(j) if (self.weights[i] - self.weights[j]).abs() <= EPS_WEIGHT => {
                    paired[i] = true;
                    paired[j] = true;
                }
                _ => return false,
            }
        }
        true
    }

    /// Invertible if and only if not symmetric.
    pub fn is_invertible(&self) -> bool {
        !self.is_symmetric()
    }

    /// Replace every negatively weighted ray `(gamma, c)` by `(-gamma, -c)`.
    ///
    /// The substitution leaves the inversion multiplier q and the Type-2
    /// singular set unchanged (the stability polynomial at most flips sign),
    /// so stability properties carry over to the all-positive-weight twin.
    /// Fails when a flip lands on another ray, i.e. the normalized star is
    /// degenerate.
    pub fn sign_normalized(&self) -> Result<Self, ConfigError> {
        let mut angles = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for (&a, &c) in self.angles.iter().zip(&self.weights) {
            if c < 0.0 {
                angles.push(wrap_tau(a + PI));
                weights.push(-c);
            } else {
                angles.push(a);
                weights.push(c);
            }
        }
        Self::new(angles, weights)
    }
}

/// True iff `|n1|, |n2|, |n3|` can be the side lengths of a (possibly
/// degenerate) triangle, i.e. the vector is normal to a plane spanned by the
/// aperture vectors of some 3-ray star.
pub fn admissible_normal(n: [f64; 3]) -> bool {
    let [a, b, c] = [n[0].abs(), n[1].abs(), n[2].abs()];
    a + b >= c && b + c >= a && a + c >= b
}

/// Build a 3-ray configuration carrying the given (nonzero) weights whose
/// Type-2 singular set is empty.
///
/// The magnitudes are scaled so their median is 1 and permuted ascending,
/// giving 0 < c1 <= c2 = 1 <= c3. The normal (1, 1, 1/c3) then admits a
/// triangle of side lengths (1, 1, 1/c3); traversing its perimeter yields
/// rays summing to zero with those coefficients. Negative input weights are
/// absorbed by flipping the matching ray, which leaves the singular set
/// unchanged. The emptiness of the Type-2 set is verified by a scan before
/// returning.
pub fn stable_config_for_weights(weights: [f64; 3]) -> Result<StarConfig, ConfigError> {
    for (i, c) in weights.iter().enumerate() {
        if !c.is_finite() {
            return Err(ConfigError::NonFiniteWeight { index: i });
        }
        if *c == 0.0 {
            return Err(ConfigError::ZeroWeight { index: i });
        }
    }
    let mags = [weights[0].abs(), weights[1].abs(), weights[2].abs()];

    // order[s] = original index of the s-th smallest magnitude
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| mags[i].partial_cmp(&mags[j]).unwrap());
    let median = mags[order[1]];
    let scaled = [
        mags[order[0]] / median,
        1.0,
        mags[order[2]] / median,
    ];

    // Triangle side lengths from the admissible normal (1, 1, 1/c3).
    let sides = [1.0, 1.0, 1.0 / scaled[2]];
    let deficit = [
        sides[0] + sides[1] - sides[2],
        sides[1] + sides[2] - sides[0],
        sides[0] + sides[2] - sides[1],
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    if deficit < EPS_TRIANGLE {
        return Err(ConfigError::DegenerateTriangle { deficit });
    }

    // Walk the triangle perimeter: edge k has length sides[k]; the interior
    // angle between edges i and j is opposite side k.
    let interior = |opp: usize, s1: usize, s2: usize| -> f64 {
        let cos = (sides[s1] * sides[s1] + sides[s2] * sides[s2] - sides[opp] * sides[opp])
            / (2.0 * sides[s1] * sides[s2]);
        cos.clamp(-1.0, 1.0).acos()
    };
    let phi1 = 0.0;
    let phi2 = phi1 + PI - interior(2, 0, 1);
    let phi3 = phi2 + PI - interior(0, 1, 2);
    let slot_angles = [phi1, phi2, phi3];

    // Undo the permutation; absorb input signs by flipping rays.
    let mut angles = [0.0f64; 3];
    for (slot, &orig) in order.iter().enumerate() {
        let mut a = slot_angles[slot];
        if weights[orig] < 0.0 {
            a += PI;
        }
        angles[orig] = wrap_tau(a);
    }
    let cfg = StarConfig::new(angles.to_vec(), weights.to_vec())?;

    let report = crate::stability::find_singular_directions(&cfg, &Default::default());
    if !report.type2_angles.is_empty() || report.p2_min_abs <= 0.0 {
        return Err(ConfigError::StabilityCheckFailed {
            min_abs: report.p2_min_abs,
        });
    }
    Ok(cfg)
}

/// Deterministic configuration with all rays strictly inside an open
/// half-plane: a fan centered on 90 degrees with uniform weights. Such a
/// configuration always has Type-2 singular directions.
///
/// The angular spacing is min(45 deg, 150 deg / (m - 1)), so the fan spans at
/// most 150 degrees and never reaches the half-plane boundary.
pub fn half_plane_fan(m: usize) -> Result<StarConfig, ConfigError> {
    if m < 3 || m % 2 == 0 {
        return Err(ConfigError::InvalidRegularCount(m));
    }
    let spacing = (PI / 4.0).min(PI * 150.0 / 180.0 / (m - 1) as f64);
    let center = FRAC_PI_2;
    let half = (m - 1) as f64 / 2.0;
    let angles = (0..m)
        .map(|i| center + (i as f64 - half) * spacing)
        .collect();
    StarConfig::with_uniform_weights(angles)
}
