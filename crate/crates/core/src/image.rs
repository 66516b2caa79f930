//! Pixel grids, analytic phantoms, and error metrics.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("grid side must be at least 8 pixels, got {0}")]
    TooSmall(usize),
    #[error("half width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("value buffer has {got} entries, expected {want}")]
    BadLength { got: usize, want: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("grids differ in shape: {a_n}x{a_n} (L={a_l}) vs {b_n}x{b_n} (L={b_l})")]
    ShapeMismatch {
        a_n: usize,
        a_l: f64,
        b_n: usize,
        b_l: f64,
    },
    #[error("sigma must be positive, got {0}")]
    BadSigma(f64),
}

/// Square grid of samples over `[-L, L]^2`.
///
/// Row-major with y increasing upward: `values[iy * n + ix]`, row 0 at the
/// bottom. Pixel centers sit at `-L + (i + 0.5) * 2L/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    n: usize,
    half_width: f64,
    values: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(n: usize, half_width: f64) -> Result<Self, ImageError> {
        Self::check_dims(n, half_width)?;
        Ok(Self {
            n,
            half_width,
            values: vec![0.0; n * n],
        })
    }

    pub fn from_values(n: usize, half_width: f64, values: Vec<f64>) -> Result<Self, ImageError> {
        Self::check_dims(n, half_width)?;
        if values.len() != n * n {
            return Err(ImageError::BadLength {
                got: values.len(),
                want: n * n,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ImageError::NonFinite(i));
        }
        Ok(Self {
            n,
            half_width,
            values,
        })
    }

    fn check_dims(n: usize, half_width: f64) -> Result<(), ImageError> {
        if n < 8 {
            return Err(ImageError::TooSmall(n));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(ImageError::BadHalfWidth(half_width));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Physical spacing between pixel centers.
    pub fn pitch(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Physical coordinate of pixel center `i` (along either axis).
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.pitch()
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.n + ix]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        self.values[iy * self.n + ix] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }

    /// Bilinear interpolation at a physical point, zero outside the grid.
    #[inline]
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let inv_pitch = self.n as f64 / (2.0 * self.half_width);
        let u = (x + self.half_width) * inv_pitch - 0.5;
        let v = (y + self.half_width) * inv_pitch - 0.5;
        let iu = u.floor();
        let iv = v.floor();
        let fu = u - iu;
        let fv = v - iv;
        let i0 = iu as isize;
        let j0 = iv as isize;
        let n = self.n as isize;
        let mut acc = 0.0;
        for (dj, wv) in [(0isize, 1.0 - fv), (1, fv)] {
            let j = j0 + dj;
            if j < 0 || j >= n || wv == 0.0 {
                continue;
            }
            for (di, wu) in [(0isize, 1.0 - fu), (1, fu)] {
                let i = i0 + di;
                if i < 0 || i >= n || wu == 0.0 {
                    continue;
                }
                acc += wu * wv * self.values[(j as usize) * self.n + i as usize];
            }
        }
        acc
    }

    /// Apply `f(x, y)` at every pixel center.
    pub fn fill_with(&mut self, f: impl Fn(f64, f64) -> f64 + Sync) {
        use rayon::prelude::*;
        let n = self.n;
        let half_width = self.half_width;
        let pitch = 2.0 * half_width / n as f64;
        self.values
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(iy, row)| {
                let y = -half_width + (iy as f64 + 0.5) * pitch;
                for (ix, v) in row.iter_mut().enumerate() {
                    let x = -half_width + (ix as f64 + 0.5) * pitch;
                    *v = f(x, y);
                }
            });
    }
}

/// One additive ellipse of a phantom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub center: [f64; 2],
    /// Semi-axes (A along the ellipse x axis, B along y) before rotation.
    pub semi_axes: [f64; 2],
    /// Rotation of the ellipse frame, radians counterclockwise.
    pub rotation: f64,
    /// Additive amplitude inside the ellipse.
    pub amplitude: f64,
}

impl Ellipse {
    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        let (sin, cos) = self.rotation.sin_cos();
        let u = cos * dx + sin * dy;
        let v = -sin * dx + cos * dy;
        let a = self.semi_axes[0];
        let b = self.semi_axes[1];
        (u / a) * (u / a) + (v / b) * (v / b) <= 1.0
    }
}

/// A phantom as a list of additively combined ellipses.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhantomSpec {
    pub ellipses: Vec<Ellipse>,
}

impl PhantomSpec {
    /// Point-sampled rasterization: each pixel takes the sum of amplitudes of
    /// the ellipses containing its center. No anti-aliasing.
    pub fn rasterize(&self, n: usize, half_width: f64) -> Result<ImageGrid, ImageError> {
        let mut grid = ImageGrid::zeros(n, half_width)?;
        let ellipses = &self.ellipses;
        grid.fill_with(|x, y| {
            ellipses
                .iter()
                .filter(|e| e.contains(x, y))
                .map(|e| e.amplitude)
                .sum()
        });
        Ok(grid)
    }
}

/// The modified (high-contrast) Shepp-Logan head phantom.
///
/// Parameter table as tabulated in P. A. Toft, "The Radon Transform - Theory
/// and Implementation" (1996), appendix B, and used by common `phantom()`
/// implementations: same geometry as the original Shepp-Logan, amplitudes
/// raised for display contrast (outer shell 1, brain -0.8, features +/- 0.1
/// and -0.2).
pub fn shepp_logan() -> PhantomSpec {
    let deg = |d: f64| d * std::f64::consts::PI / 180.0;
    let e = |x0: f64, y0: f64, a: f64, b: f64, phi_deg: f64, rho: f64| Ellipse {
        center: [x0, y0],
        semi_axes: [a, b],
        rotation: deg(phi_deg),
        amplitude: rho,
    };
    PhantomSpec {
        ellipses: vec![
            e(0.0, 0.0, 0.69, 0.92, 0.0, 1.0),
            e(0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8),
            e(0.22, 0.0, 0.11, 0.31, -18.0, -0.2),
            e(-0.22, 0.0, 0.16, 0.41, 18.0, -0.2),
            e(0.0, 0.35, 0.21, 0.25, 0.0, 0.1),
            e(0.0, 0.1, 0.046, 0.046, 0.0, 0.1),
            e(0.0, -0.1, 0.046, 0.046, 0.0, 0.1),
            e(-0.08, -0.605, 0.046, 0.023, 0.0, 0.1),
            e(0.0, -0.606, 0.023, 0.023, 0.0, 0.1),
            e(0.06, -0.605, 0.023, 0.046, 0.0, 0.1),
        ],
    }
}

/// A truncated Gaussian bump `exp(-|x - center|^2 / (2 sigma^2))`, zeroed
/// beyond `6 sigma` so the support is compact.
pub fn gaussian_bump(
    center: [f64; 2],
    sigma: f64,
    n: usize,
    half_width: f64,
) -> Result<ImageGrid, ImageError> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(ImageError::BadSigma(sigma));
    }
    let mut grid = ImageGrid::zeros(n, half_width)?;
    let cutoff2 = (6.0 * sigma) * (6.0 * sigma);
    let inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    grid.fill_with(|x, y| {
        let d2 = (x - center[0]) * (x - center[0]) + (y - center[1]) * (y - center[1]);
        if d2 > cutoff2 {
            0.0
        } else {
            (-d2 * inv_two_sigma2).exp()
        }
    });
    Ok(grid)
}

/// Root-mean-square difference over pixels whose center lies strictly inside
/// the disc of radius `mask_radius`.
pub fn rmse(a: &ImageGrid, b: &ImageGrid, mask_radius: f64) -> Result<f64, ImageError> {
    if a.n != b.n || a.half_width != b.half_width {
        return Err(ImageError::ShapeMismatch {
            a_n: a.n,
            a_l: a.half_width,
            b_n: b.n,
            b_l: b.half_width,
        });
    }
    let r2 = mask_radius * mask_radius;
    let mut sum = 0.0;
    let mut count = 0usize;
    for iy in 0..a.n {
        let y = a.coord(iy);
        for ix in 0..a.n {
            let x = a.coord(ix);
            if x * x + y * y < r2 {
                let d = a.get(ix, iy) - b.get(ix, iy);
                sum += d * d;
                count += 1;
            }
        }
    }
    Ok(if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    })
}

/// Relative L2 error `||a - b|| / ||b||` over the whole grid.
pub fn rel_l2_error(a: &ImageGrid, b: &ImageGrid) -> Result<f64, ImageError> {
    if a.n != b.n || a.half_width != b.half_width {
        return Err(ImageError::ShapeMismatch {
            a_n: a.n,
            a_l: a.half_width,
            b_n: b.n,
            b_l: b.half_width,
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (va, vb) in a.values.iter().zip(&b.values) {
        num += (va - vb) * (va - vb);
        den += vb * vb;
    }
    Ok((num / den).sqrt())
}
