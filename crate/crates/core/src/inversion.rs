//! Inversion of the star transform.
//!
//! The Radon data of `f` is recovered row by row from the Radon data of the
//! star field: differentiate in the offset variable, then multiply by the
//! direction-dependent factor `q`. Rows whose normal angle falls near a
//! singular direction are masked and filled (interpolated or zeroed), and the
//! result is inverted by standard filtered backprojection.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::geom::{circ_dist_pi, wrap_pi, Dir2};
use crate::image::{ImageError, ImageGrid};
use crate::stability::{find_singular_directions, stability_poly, ScanSettings, SingularityReport};
use crate::star_geometry::StarConfig;
use crate::transforms::{radon_star_field_with_t_max, Sinogram, StarField, TransformError};

#[derive(Debug, Error)]
pub enum InversionError {
    #[error("symmetric configuration: the star transform is not invertible")]
    SymmetricConfiguration,
    #[error("configuration too singular for {total} angles: {masked} rows fall inside singular margins")]
    TooSingular { masked: usize, total: usize },
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Ramp filter flavor used by [`fbp`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterKind {
    /// Plain |frequency| ramp.
    RamLak,
    /// Ramp tapered by a Hamming window up to the Nyquist frequency.
    HammingRamLak,
}

/// What to write into sinogram rows masked by singular margins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillStrategy {
    /// Linear interpolation between the nearest valid rows, wrapping across
    /// the ends of the angle range with the Radon symmetry
    /// `Rf(psi + pi, -t) = Rf(psi, t)`. Falls back to zero for masked runs
    /// wider than those produced by an isolated singular direction.
    Interpolate,
    Zero,
}

#[derive(Clone, Debug)]
pub struct InversionSettings {
    pub filter: FilterKind,
    /// Angular radius around each singular direction treated as unusable;
    /// `None` means two angular steps, `2 * (pi / K)`.
    pub singular_margin: Option<f64>,
    pub fill: FillStrategy,
    pub scan: ScanSettings,
}

impl Default for InversionSettings {
    fn default() -> Self {
        Self {
            filter: FilterKind::HammingRamLak,
            singular_margin: None,
            fill: FillStrategy::Interpolate,
            scan: ScanSettings::default(),
        }
    }
}

/// Output of [`recover_radon`]: the estimated Radon data of `f` plus the
/// per-row validity mask (false = row was inside a singular margin).
#[derive(Clone, Debug)]
pub struct RecoveredRadon {
    pub sinogram: Sinogram,
    pub row_valid: Vec<bool>,
    pub report: SingularityReport,
}

fn central_diff(row: &[f64], dt: f64) -> Vec<f64> {
    let t = row.len();
    let mut out = vec![0.0; t];
    out[0] = (row[1] - row[0]) / dt;
    out[t - 1] = (row[t - 1] - row[t - 2]) / dt;
    for l in 1..t - 1 {
        out[l] = (row[l + 1] - row[l - 1]) / (2.0 * dt);
    }
    out
}

/// Recover the Radon data of `f` from the Radon data of its star field.
///
/// Each row with normal angle outside the singular margins becomes
/// `q(psi_k) * d/dt` of the input row (central differences, one-sided at the
/// ends). Masked rows are filled per the strategy. Fails when more than a
/// quarter of the rows are masked.
pub fn recover_radon(
    star_sino: &Sinogram,
    cfg: &StarConfig,
    settings: &InversionSettings,
) -> Result<RecoveredRadon, InversionError> {
    if !cfg.is_invertible() {
        return Err(InversionError::SymmetricConfiguration);
    }
    let report = find_singular_directions(cfg, &settings.scan);
    let k_angles = star_sino.n_angles();
    let delta_psi = PI / k_angles as f64;
    let margin = settings.singular_margin.unwrap_or(2.0 * delta_psi);

    // Singular directions come in antipodal pairs, so reduce them mod pi to
    // match the sinogram's angle range.
    let mut singular: Vec<f64> = report
        .type1_angles
        .iter()
        .chain(&report.type2_angles)
        .map(|&a| wrap_pi(a))
        .collect();
    singular.sort_by(|a, b| a.partial_cmp(b).unwrap());
    singular.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let row_valid: Vec<bool> = star_sino
        .angles
        .iter()
        .map(|&psi| singular.iter().all(|&s| circ_dist_pi(psi, s) >= margin))
        .collect();
    let masked = row_valid.iter().filter(|v| !**v).count();
    if 4 * masked > k_angles {
        return Err(InversionError::TooSingular {
            masked,
            total: k_angles,
        });
    }

    let dt = star_sino.delta_t();
    let t_samples = star_sino.n_offsets();
    let mut rows: Vec<Vec<f64>> = star_sino
        .angles
        .par_iter()
        .zip(&row_valid)
        .enumerate()
        .map(|(k, (&ang, &valid))| {
            if !valid {
                return vec![0.0; t_samples];
            }
            let psi = Dir2::from_angle(ang);
            let poly = stability_poly(cfg, psi);
            let prod: f64 = cfg.rays().map(|g| psi.dot(g)).product();
            let q = -prod / poly;
            let mut d = central_diff(star_sino.row(k), dt);
            for v in &mut d {
                *v *= q;
            }
            d
        })
        .collect();

    if settings.fill == FillStrategy::Interpolate && masked > 0 {
        fill_masked_rows(&mut rows, &row_valid, margin, delta_psi);
    }

    let values: Vec<f64> = rows.into_iter().flatten().collect();
    let sinogram = Sinogram::new(star_sino.angles.clone(), star_sino.offsets.clone(), values)?;
    Ok(RecoveredRadon {
        sinogram,
        row_valid,
        report,
    })
}

/// Row at extended index `e`: wrapping past the ends of `[0, pi)` flips the
/// offset axis once per wrap (`Rf(psi + pi, -t) = Rf(psi, t)`).
fn extended_row_value(rows: &[Vec<f64>], e: isize, l: usize) -> f64 {
    let k_angles = rows.len() as isize;
    let r = e.rem_euclid(k_angles) as usize;
    let wraps = e.div_euclid(k_angles);
    if wraps.rem_euclid(2) == 0 {
        rows[r][l]
    } else {
        let t = rows[r].len();
        rows[r][t - 1 - l]
    }
}

fn fill_masked_rows(rows: &mut [Vec<f64>], row_valid: &[bool], margin: f64, delta_psi: f64) {
    let k_angles = rows.len();
    // An isolated singular direction at margin delta masks a run of at most
    // 2*ceil(margin/step) + 1 rows; wider runs mean clustered singular sets
    // where interpolation would bridge unrelated data, so those stay zero.
    let max_run = 2 * (margin / delta_psi).ceil() as usize + 1;
    let t_samples = rows[0].len();

    // maximal runs of invalid rows, circular over the angle axis
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for s in 0..k_angles {
        let prev = (s + k_angles - 1) % k_angles;
        if !row_valid[s] && row_valid[prev] {
            let mut len = 1;
            while !row_valid[(s + len) % k_angles] {
                len += 1;
            }
            runs.push((s, len));
        }
    }

    for (start, len) in runs {
        if len > max_run {
            continue; // zero-filled already
        }
        // bracketing valid rows in extended (wrap-aware) indices
        let lo = start as isize - 1;
        let hi = start as isize + len as isize;
        let row_lo: Vec<f64> = (0..t_samples)
            .map(|l| extended_row_value(rows, lo, l))
            .collect();
        let row_hi: Vec<f64> = (0..t_samples)
            .map(|l| extended_row_value(rows, hi, l))
            .collect();
        let span = (len + 1) as f64;
        for off in 0..len {
            let e = start + off;
            let w_hi = (off + 1) as f64 / span;
            let w_lo = 1.0 - w_hi;
            let physical = e % k_angles;
            let wrapped = e >= k_angles;
            for l in 0..t_samples {
                let v = w_lo * row_lo[l] + w_hi * row_hi[l];
                if wrapped {
                    // rows past the end live at angle psi - pi: store reversed
                    rows[physical][t_samples - 1 - l] = v;
                } else {
                    rows[physical][l] = v;
                }
            }
        }
    }
}

/// Standard filtered backprojection of a sinogram covering `[0, pi)`:
/// frequency-domain ramp filter per row (zero-padded to the next power of two
/// at least twice the row length), then backprojection with linear
/// interpolation in the offset.
pub fn fbp(
    sino: &Sinogram,
    n: usize,
    half_width: f64,
    filter: FilterKind,
) -> Result<ImageGrid, InversionError> {
    let t_samples = sino.n_offsets();
    let k_angles = sino.n_angles();
    let dt = sino.delta_t();
    let padded = (2 * t_samples).next_power_of_two();

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(padded);
    let inv = planner.plan_fft_inverse(padded);

    // |nu| ramp, optionally Hamming-tapered up to Nyquist
    let nyquist = 0.5 / dt;
    let gains: Vec<f64> = (0..padded)
        .map(|j| {
            let j_sym = j.min(padded - j);
            let nu = j_sym as f64 / (padded as f64 * dt);
            let window = match filter {
                FilterKind::RamLak => 1.0,
                FilterKind::HammingRamLak => 0.54 + 0.46 * (PI * nu / nyquist).cos(),
            };
            nu * window
        })
        .collect();

    let filtered: Vec<Vec<f64>> = (0..k_angles)
        .into_par_iter()
        .map(|k| {
            let fwd = Arc::clone(&fwd);
            let inv = Arc::clone(&inv);
            let mut buf = vec![Complex::new(0.0, 0.0); padded];
            for (b, &v) in buf.iter_mut().zip(sino.row(k)) {
                b.re = v;
            }
            fwd.process(&mut buf);
            for (b, &g) in buf.iter_mut().zip(&gains) {
                *b *= g;
            }
            inv.process(&mut buf);
            let scale = 1.0 / padded as f64;
            buf[..t_samples].iter().map(|c| c.re * scale).collect()
        })
        .collect();

    let directions: Vec<Dir2> = sino.angles.iter().map(|&a| Dir2::from_angle(a)).collect();
    let t0 = sino.offsets[0];
    let weight = PI / k_angles as f64;
    let mut out = ImageGrid::zeros(n, half_width)?;
    out.fill_with(|x, y| {
        let mut acc = 0.0;
        for (psi, row) in directions.iter().zip(&filtered) {
            let t = psi.dot_xy(x, y);
            let pos = (t - t0) / dt;
            let i0 = pos.floor();
            let frac = pos - i0;
            let i0 = i0 as isize;
            if i0 >= 0 && (i0 as usize) + 1 < t_samples {
                let i = i0 as usize;
                acc += (1.0 - frac) * row[i] + frac * row[i + 1];
            }
        }
        acc * weight
    });
    Ok(out)
}

/// Full inversion output: the reconstruction plus the singularity analysis
/// and row mask actually used.
#[derive(Clone, Debug)]
pub struct StarInversion {
    pub image: ImageGrid,
    pub report: SingularityReport,
    pub row_valid: Vec<bool>,
}

/// Invert a star field: Radon transform of the field (with strip-tail
/// continuation), Radon-data recovery, then filtered backprojection onto an
/// `n` x `n` grid of the given half-width.
pub fn invert_star(
    field: &StarField,
    cfg: &StarConfig,
    k_angles: usize,
    t_samples: usize,
    settings: &InversionSettings,
    n: usize,
    half_width: f64,
) -> Result<StarInversion, InversionError> {
    // The tail continuation makes offsets beyond the source image's own
    // range redundant, so the offset budget goes to the range the
    // backprojection actually reads.
    let source_half = field.grid.half_width() / field.ext_factor;
    let t_max = std::f64::consts::SQRT_2 * half_width.max(source_half);
    let sino = radon_star_field_with_t_max(field, cfg, k_angles, t_samples, t_max)?;
    let rec = recover_radon(&sino, cfg, settings)?;
    let image = fbp(&rec.sinogram, n, half_width, settings.filter)?;
    Ok(StarInversion {
        image,
        report: rec.report,
        row_valid: rec.row_valid,
    })
}
