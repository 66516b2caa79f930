//! Numerical divergent-beam, star, Radon, and half-plane transforms of
//! gridded images.
//!
//! All line quadratures march with a step of half the source pixel pitch,
//! sample by bilinear interpolation (zero outside the grid), and accumulate
//! with the trapezoid rule.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::Dir2;
use crate::image::ImageGrid;
use crate::star_geometry::StarConfig;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("need at least 2 angles and 2 offsets, got K={k}, T={t}")]
    BadCounts { k: usize, t: usize },
    #[error("extension factor must be >= 1 and finite, got {0}")]
    BadExtFactor(f64),
    #[error("offset range t_max={t_max} does not cover the grid (needs >= {required})")]
    OffsetRange { t_max: f64, required: f64 },
}

/// Radon-domain data: values indexed by (angle, offset).
///
/// `angles[k]` is the polar angle of the line's unit *normal* vector, in
/// [0, pi). `offsets` are uniformly spaced in [-t_max, t_max], endpoints
/// included. Values are row-major, one row per angle.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    pub angles: Vec<f64>,
    pub offsets: Vec<f64>,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn new(angles: Vec<f64>, offsets: Vec<f64>, values: Vec<f64>) -> Result<Self, TransformError> {
        if angles.len() < 2 || offsets.len() < 2 {
            return Err(TransformError::BadCounts {
                k: angles.len(),
                t: offsets.len(),
            });
        }
        assert_eq!(values.len(), angles.len() * offsets.len());
        Ok(Self {
            angles,
            offsets,
            values,
        })
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn n_offsets(&self) -> usize {
        self.offsets.len()
    }

    /// Offset spacing.
    pub fn delta_t(&self) -> f64 {
        self.offsets[1] - self.offsets[0]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let t = self.n_offsets();
        &self.values[k * t..(k + 1) * t]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        let t = self.n_offsets();
        &mut self.values[k * t..(k + 1) * t]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// A star transform evaluated on an enlarged grid.
///
/// The star field of a compactly supported image has unbounded support; the
/// enlarged computation window (half-width `ext_factor` times the source's)
/// bounds the truncation error fed into the Radon stage.
#[derive(Clone, Debug)]
pub struct StarField {
    pub grid: ImageGrid,
    pub ext_factor: f64,
}

/// Clip the line `origin + u * dir` against the square `[-half, half]^2`.
/// Returns the parameter interval of the intersection, if any.
fn clip_to_box(origin: [f64; 2], dir: Dir2, half: f64) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (o, d) in [(origin[0], dir.x), (origin[1], dir.y)] {
        if d.abs() < 1e-300 {
            if o.abs() > half {
                return None;
            }
        } else {
            let u1 = (-half - o) / d;
            let u2 = (half - o) / d;
            lo = lo.max(u1.min(u2));
            hi = hi.min(u1.max(u2));
        }
    }
    (lo < hi).then_some((lo, hi))
}

/// Trapezoid quadrature of `g` sampled along `origin + u * dir` for
/// `u` in `[u0, u1]`, stepping at most `h`.
fn march(g: &ImageGrid, origin: [f64; 2], dir: Dir2, u0: f64, u1: f64, h: f64) -> f64 {
    let len = u1 - u0;
    if len <= 0.0 {
        return 0.0;
    }
    let steps = (len / h).ceil() as usize;
    let steps = steps.max(1);
    let dh = len / steps as f64;
    let sample = |u: f64| g.sample(origin[0] + u * dir.x, origin[1] + u * dir.y);
    let mut acc = 0.5 * (sample(u0) + sample(u1));
    for i in 1..steps {
        acc += sample(u0 + i as f64 * dh);
    }
    acc * dh
}

/// Divergent beam transform: integral of `f` along the ray from `x` in
/// direction `gamma`, marched until the ray leaves the padded image box.
pub fn divergent_beam(f: &ImageGrid, gamma: Dir2, x: [f64; 2]) -> f64 {
    let pad = f.pitch();
    let half = f.half_width() + pad;
    match clip_to_box(x, gamma, half) {
        Some((lo, hi)) if hi > 0.0 => march(f, x, gamma, lo.max(0.0), hi, 0.5 * f.pitch()),
        _ => 0.0,
    }
}

/// Weighted star transform of `f` evaluated at every pixel center of an
/// enlarged grid with the same pitch (`n_ext = ceil(ext_factor * n)`).
pub fn star_transform(
    f: &ImageGrid,
    cfg: &StarConfig,
    ext_factor: f64,
) -> Result<StarField, TransformError> {
    if !(ext_factor.is_finite() && ext_factor >= 1.0) {
        return Err(TransformError::BadExtFactor(ext_factor));
    }
    let n_ext = (ext_factor * f.n() as f64).ceil() as usize;
    let half_ext = f.half_width() * n_ext as f64 / f.n() as f64;
    let mut grid = ImageGrid::zeros(n_ext, half_ext).expect("extended grid dims");
    let rays: Vec<Dir2> = cfg.rays().collect();
    let weights = cfg.weights();
    grid.fill_with(|x, y| {
        rays.iter()
            .zip(weights)
            .map(|(&g, &c)| c * divergent_beam(f, g, [x, y]))
            .sum()
    });
    Ok(StarField {
        grid,
        ext_factor,
    })
}

/// Integral of `g` along the full line with unit normal `psi` at signed
/// distance `t` from the origin.
pub fn line_integral(g: &ImageGrid, psi: Dir2, t: f64) -> f64 {
    let dir = psi.perp_ccw();
    let origin = [t * psi.x, t * psi.y];
    let half = g.half_width() + g.pitch();
    match clip_to_box(origin, dir, half) {
        Some((lo, hi)) => march(g, origin, dir, lo, hi, 0.5 * g.pitch()),
        None => 0.0,
    }
}

/// Radon transform of `g` on `k_angles` normal angles uniformly covering
/// [0, pi) and `t_samples` offsets covering `[-t_max, t_max]`.
pub fn radon_with_t_max(
    g: &ImageGrid,
    k_angles: usize,
    t_samples: usize,
    t_max: f64,
) -> Result<Sinogram, TransformError> {
    if k_angles < 2 || t_samples < 2 {
        return Err(TransformError::BadCounts {
            k: k_angles,
            t: t_samples,
        });
    }
    let required = std::f64::consts::SQRT_2 * g.half_width();
    if t_max < required - 1e-12 {
        return Err(TransformError::OffsetRange { t_max, required });
    }
    let angles: Vec<f64> = (0..k_angles).map(|k| PI * k as f64 / k_angles as f64).collect();
    let dt = 2.0 * t_max / (t_samples - 1) as f64;
    let offsets: Vec<f64> = (0..t_samples).map(|l| -t_max + l as f64 * dt).collect();
    let mut values = vec![0.0; k_angles * t_samples];
    values
        .par_chunks_mut(t_samples)
        .zip(&angles)
        .for_each(|(row, &ang)| {
            let psi = Dir2::from_angle(ang);
            for (v, &t) in row.iter_mut().zip(&offsets) {
                *v = line_integral(g, psi, t);
            }
        });
    Sinogram::new(angles, offsets, values)
}

/// [`radon_with_t_max`] with the tightest covering range
/// `t_max = sqrt(2) * half_width`.
pub fn radon(g: &ImageGrid, k_angles: usize, t_samples: usize) -> Result<Sinogram, TransformError> {
    radon_with_t_max(
        g,
        k_angles,
        t_samples,
        std::f64::consts::SQRT_2 * g.half_width(),
    )
}

/// Strip continuation of a star field beyond its computation window.
///
/// Outside a large enough disc the field is constant along each ray
/// direction, so its values on the window boundary determine it everywhere.
/// Per ray this reduces to a 1-D profile over the coordinate transverse to
/// the ray; tail integrals of lines then come from the profile's cumulative
/// integral in closed form.
struct StripTails {
    rays: Vec<Dir2>,
    /// `cum[i][j]` = integral of strip profile i over transverse coordinate
    /// up to `u0 + j * du`.
    cum: Vec<Vec<f64>>,
    u0: f64,
    du: f64,
}

impl StripTails {
    /// `seam` is the handoff boundary between gridded integration and the
    /// continued tails; it must lie far enough inside the window that
    /// bilinear samples at the seam have full support.
    fn build(field: &StarField, cfg: &StarConfig, seam: f64) -> Self {
        let grid = &field.grid;
        let half = seam;
        let du = 0.5 * grid.pitch();
        let n_u = (2.0 * half / du).ceil() as usize + 1;
        let u0 = -half;
        let inset = 0.5 * grid.pitch();

        let rays: Vec<Dir2> = cfg.rays().collect();
        let cum = rays
            .iter()
            .map(|&gamma| {
                let back = gamma.flipped();
                let gp = gamma.perp_ccw();
                let profile: Vec<f64> = (0..n_u)
                    .map(|j| {
                        let u = u0 + j as f64 * du;
                        let start = [u * gp.x, u * gp.y];
                        // walk backwards along the ray to the window edge
                        match clip_to_box(start, back, half) {
                            Some((_, exit)) if exit > inset => {
                                let s = exit - inset;
                                grid.sample(start[0] + s * back.x, start[1] + s * back.y)
                            }
                            _ => 0.0,
                        }
                    })
                    .collect();
                // cumulative trapezoid
                let mut acc = vec![0.0; n_u];
                for j in 1..n_u {
                    acc[j] = acc[j - 1] + 0.5 * (profile[j - 1] + profile[j]) * du;
                }
                acc
            })
            .collect();
        Self { rays, cum, u0, du }
    }

    fn cum_lookup(&self, i: usize, u: f64) -> f64 {
        let cum = &self.cum[i];
        let pos = (u - self.u0) / self.du;
        if pos <= 0.0 {
            return 0.0;
        }
        let last = (cum.len() - 1) as f64;
        if pos >= last {
            return *cum.last().unwrap();
        }
        let j = pos.floor() as usize;
        let frac = pos - j as f64;
        cum[j] * (1.0 - frac) + cum[j + 1] * frac
    }

    /// Integral of the continued field along `origin + s * dir` over
    /// `s` in `[sa, sb]` (either end may be infinite), which must lie
    /// outside the window.
    fn segment_integral(&self, psi: Dir2, dir: Dir2, t: f64, sa: f64, sb: f64) -> f64 {
        let mut total = 0.0;
        for (i, &gamma) in self.rays.iter().enumerate() {
            let gp = gamma.perp_ccw();
            // transverse / longitudinal coordinates along the line
            let du_ds = dir.dot(gp);
            if du_ds.abs() < 1e-12 {
                // line parallel to the strip: a Type-1 direction, masked later
                continue;
            }
            let u_at = |s: f64| t * psi.dot(gp) + s * du_ds;
            let v0 = t * psi.dot(gamma);
            let dv_ds = dir.dot(gamma);
            // the trail only exists behind the support: v < 0 out here
            let (mut lo, mut hi) = (sa, sb);
            if dv_ds.abs() < 1e-12 {
                if v0 >= 0.0 {
                    continue;
                }
            } else {
                let s_cross = -v0 / dv_ds;
                if dv_ds > 0.0 {
                    hi = hi.min(s_cross);
                } else {
                    lo = lo.max(s_cross);
                }
            }
            if lo >= hi {
                continue;
            }
            let u_lo = if lo.is_finite() {
                u_at(lo)
            } else {
                f64::NEG_INFINITY * du_ds.signum()
            };
            let u_hi = if hi.is_finite() {
                u_at(hi)
            } else {
                f64::INFINITY * du_ds.signum()
            };
            total += (self.cum_lookup(i, u_hi) - self.cum_lookup(i, u_lo)) / du_ds;
        }
        total
    }
}

/// Radon transform of a star field with strip-tail continuation: inside the
/// computation window the gridded field is integrated directly; outside, the
/// field is continued constantly along each ray direction from its boundary
/// values. Without the continuation, window truncation corrupts the offset
/// derivative for every line whose strip crossing nears the window edge.
///
/// Offsets cover the full extended window (`t_max = sqrt(2) * half_width`).
pub fn radon_star_field(
    field: &StarField,
    cfg: &StarConfig,
    k_angles: usize,
    t_samples: usize,
) -> Result<Sinogram, TransformError> {
    radon_star_field_with_t_max(
        field,
        cfg,
        k_angles,
        t_samples,
        std::f64::consts::SQRT_2 * field.grid.half_width(),
    )
}

/// [`radon_star_field`] with an explicit offset range. Thanks to the tail
/// continuation the data is meaningful for any `t_max`; reconstruction
/// pipelines spend their offset budget on the range backprojection reads.
pub fn radon_star_field_with_t_max(
    field: &StarField,
    cfg: &StarConfig,
    k_angles: usize,
    t_samples: usize,
    t_max: f64,
) -> Result<Sinogram, TransformError> {
    if k_angles < 2 || t_samples < 2 {
        return Err(TransformError::BadCounts {
            k: k_angles,
            t: t_samples,
        });
    }
    let grid = &field.grid;
    let half = grid.half_width();
    let seam = half - grid.pitch();
    let tails = StripTails::build(field, cfg, seam);

    let angles: Vec<f64> = (0..k_angles).map(|k| PI * k as f64 / k_angles as f64).collect();
    let dt = 2.0 * t_max / (t_samples - 1) as f64;
    let offsets: Vec<f64> = (0..t_samples).map(|l| -t_max + l as f64 * dt).collect();
    let mut values = vec![0.0; k_angles * t_samples];
    values
        .par_chunks_mut(t_samples)
        .zip(&angles)
        .for_each(|(row, &ang)| {
            let psi = Dir2::from_angle(ang);
            let dir = psi.perp_ccw();
            for (v, &t) in row.iter_mut().zip(&offsets) {
                let origin = [t * psi.x, t * psi.y];
                *v = match clip_to_box(origin, dir, seam) {
                    Some((s0, s1)) => {
                        march(grid, origin, dir, s0, s1, 0.5 * grid.pitch())
                            + tails.segment_integral(psi, dir, t, f64::NEG_INFINITY, s0)
                            + tails.segment_integral(psi, dir, t, s1, f64::INFINITY)
                    }
                    None => tails.segment_integral(psi, dir, t, f64::NEG_INFINITY, f64::INFINITY),
                };
            }
        });
    Sinogram::new(angles, offsets, values)
}

/// Half-plane transform: the integral of `f` over `{x : <x, psi> <= t}`,
/// taken as the pixel sum times the pixel area.
pub fn half_plane(f: &ImageGrid, psi: Dir2, t: f64) -> f64 {
    let area = f.pitch() * f.pitch();
    let n = f.n();
    let mut sum = 0.0;
    for iy in 0..n {
        let y = f.coord(iy);
        for ix in 0..n {
            let x = f.coord(ix);
            if psi.dot_xy(x, y) <= t {
                sum += f.get(ix, iy);
            }
        }
    }
    sum * area
}
