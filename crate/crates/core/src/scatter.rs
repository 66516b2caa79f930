//! Single-scattering imaging: simulate pairwise emitter/receiver measurements
//! and jointly recover the attenuation map `f` and the scattering map `eta`.
//!
//! A measurement for the ordered direction pair `(i, j)` is
//! `phi_ij(x) = X_i f(x) + k_ij * X_j f(x) + eta(x)`, where `X_i` is the
//! divergent beam transform along `gamma_i`. Summing `omega_ij * phi_ij` over
//! unordered pairs with a symmetric, hollow, zero-total-sum matrix `omega`
//! cancels `eta` and leaves a weighted star transform of `f` with weights
//! `c_i = sum_j omega_ij`, which the star inversion machinery recovers.

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::Dir2;
use crate::image::{ImageError, ImageGrid};
use crate::inversion::{invert_star, InversionError, InversionSettings, StarInversion};
use crate::star_geometry::{ConfigError, StarConfig};
use crate::transforms::{divergent_beam, StarField, TransformError};

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error("weights must sum to zero to cancel the scattering term (sum = {0:.3e})")]
    WeightSumNonzero(f64),
    #[error("need at least 3 directions, got {0}")]
    TooFewDirections(usize),
    #[error("direction count {directions} does not match weight count {weights}")]
    LengthMismatch { directions: usize, weights: usize },
    #[error("scatter constant k[{i}][{j}] must be positive, got {value}")]
    BadConstant { i: usize, j: usize, value: f64 },
    #[error("the eliminating combination leaves no rays (all weights cancelled)")]
    EmptyCombination,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Inversion(#[from] InversionError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Symmetric matrix with zero diagonal and zero total sum; its row sums are
/// the effective star weights of the eliminating combination.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl OmegaMatrix {
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j)).sum())
            .collect()
    }
}

/// Tolerance (relative to max |c|) for the zero-sum weight condition.
const WEIGHT_SUM_TOL: f64 = 1e-10;

/// Build the minimum-Frobenius-norm symmetric hollow matrix with row sums
/// `c`. Requires `sum c_i = 0` (the total sum of the matrix equals the weight
/// sum, and it must vanish to cancel the scattering term).
///
/// On the zero-sum subspace the least-squares solution has the closed form
/// `omega_ij = (c_i + c_j) / (m - 2)`; for m = 3 this is also the unique
/// solution of the 3x3 pair system.
pub fn omega_for_weights(c: &[f64]) -> Result<OmegaMatrix, ScatterError> {
    let m = c.len();
    if m < 3 {
        return Err(ScatterError::TooFewDirections(m));
    }
    let max_abs = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let sum: f64 = c.iter().sum();
    if sum.abs() > WEIGHT_SUM_TOL * max_abs.max(f64::MIN_POSITIVE) {
        return Err(ScatterError::WeightSumNonzero(sum));
    }
    let mut entries = vec![0.0; m * m];
    let denom = (m - 2) as f64;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                entries[i * m + j] = (c[i] + c[j]) / denom;
            }
        }
    }
    Ok(OmegaMatrix { m, entries })
}

/// Recommended zero-sum weights for `m = 2k + 1` directions: the first `k`
/// weights are `-1/k`, the remaining `k + 1` are `1/(k + 1)`. Magnitudes stay
/// as close to uniform as the zero-sum constraint allows.
pub fn recommended_weights(m: usize) -> Result<Vec<f64>, ScatterError> {
    if m < 3 || m % 2 == 0 {
        return Err(ScatterError::TooFewDirections(m));
    }
    let k = (m - 1) / 2;
    let mut c = vec![-1.0 / k as f64; k];
    c.extend(std::iter::repeat(1.0 / (k + 1) as f64).take(k + 1));
    Ok(c)
}

/// Simulated single-scattering data: one field per ordered direction pair.
#[derive(Clone, Debug)]
pub struct ScatterData {
    /// Ray polar angles of the m fixed directions.
    pub direction_angles: Vec<f64>,
    /// `phi[i * m + j]` for `i != j`; diagonal slots are `None`.
    phi: Vec<Option<ImageGrid>>,
    /// Known scatter constants `k_ij` (all positive).
    k: Vec<f64>,
    pub ext_factor: f64,
}

impl ScatterData {
    pub fn n_directions(&self) -> usize {
        self.direction_angles.len()
    }

    pub fn phi(&self, i: usize, j: usize) -> &ImageGrid {
        self.phi[i * self.n_directions() + j]
            .as_ref()
            .expect("off-diagonal pair")
    }

    pub fn k_const(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n_directions() + j]
    }

    /// Reassemble from externally stored parts (grids keyed by ordered pair).
    pub fn from_parts(
        direction_angles: Vec<f64>,
        pairs: Vec<((usize, usize), ImageGrid)>,
        k: Vec<f64>,
        ext_factor: f64,
    ) -> Result<Self, ScatterError> {
        let m = direction_angles.len();
        if m < 3 {
            return Err(ScatterError::TooFewDirections(m));
        }
        check_constants(m, &k)?;
        let mut phi: Vec<Option<ImageGrid>> = vec![None; m * m];
        for ((i, j), grid) in pairs {
            phi[i * m + j] = Some(grid);
        }
        for i in 0..m {
            for j in 0..m {
                if i != j && phi[i * m + j].is_none() {
                    return Err(ScatterError::LengthMismatch {
                        directions: m,
                        weights: 0,
                    });
                }
            }
        }
        Ok(Self {
            direction_angles,
            phi,
            k,
            ext_factor,
        })
    }
}

fn check_constants(m: usize, k: &[f64]) -> Result<(), ScatterError> {
    assert_eq!(k.len(), m * m);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let v = k[i * m + j];
                if !(v.is_finite() && v > 0.0) {
                    return Err(ScatterError::BadConstant { i, j, value: v });
                }
            }
        }
    }
    Ok(())
}

/// Simulate `phi_ij = X_i f + k_ij X_j f + eta` at every pixel of the
/// enlarged measurement grid for every ordered pair `i != j`.
///
/// `eta` shares `f`'s grid; outside that grid it is taken as zero.
pub fn simulate_scatter(
    f: &ImageGrid,
    eta: &ImageGrid,
    direction_angles: &[f64],
    k: &[f64],
    ext_factor: f64,
) -> Result<ScatterData, ScatterError> {
    let m = direction_angles.len();
    if m < 3 {
        return Err(ScatterError::TooFewDirections(m));
    }
    check_constants(m, k)?;
    if f.n() != eta.n() || f.half_width() != eta.half_width() {
        return Err(ScatterError::Image(ImageError::ShapeMismatch {
            a_n: f.n(),
            a_l: f.half_width(),
            b_n: eta.n(),
            b_l: eta.half_width(),
        }));
    }
    if !(ext_factor.is_finite() && ext_factor >= 1.0) {
        return Err(ScatterError::Transform(TransformError::BadExtFactor(
            ext_factor,
        )));
    }

    // one beam field per direction, then combine per pair
    let n_ext = (ext_factor * f.n() as f64).ceil() as usize;
    let half_ext = f.half_width() * n_ext as f64 / f.n() as f64;
    let beam_fields: Vec<ImageGrid> = direction_angles
        .iter()
        .map(|&a| {
            let gamma = Dir2::from_angle(a);
            let mut grid = ImageGrid::zeros(n_ext, half_ext)?;
            grid.fill_with(|x, y| divergent_beam(f, gamma, [x, y]));
            Ok::<_, ScatterError>(grid)
        })
        .collect::<Result<_, _>>()?;

    let mut eta_ext = ImageGrid::zeros(n_ext, half_ext)?;
    eta_ext.fill_with(|x, y| eta.sample(x, y));

    let mut phi: Vec<Option<ImageGrid>> = vec![None; m * m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let kij = k[i * m + j];
            let mut grid = beam_fields[i].clone();
            grid.values_mut()
                .par_iter_mut()
                .zip(beam_fields[j].values().par_iter())
                .zip(eta_ext.values().par_iter())
                .for_each(|((v, &bj), &e)| {
                    *v += kij * bj + e;
                });
            phi[i * m + j] = Some(grid);
        }
    }
    Ok(ScatterData {
        direction_angles: direction_angles.to_vec(),
        phi,
        k: k.to_vec(),
        ext_factor,
    })
}

/// Combine the pair data with the eliminating matrix: the sum of
/// `omega_ij * phi_ij` over unordered pairs `i < j`. With `k = 1` this equals
/// the weighted star field of `f` with weights `c = row sums of omega`,
/// exactly (no scattering term remains).
pub fn eliminate_scatter(data: &ScatterData, omega: &OmegaMatrix) -> Result<StarField, ScatterError> {
    let m = data.n_directions();
    if omega.size() != m {
        return Err(ScatterError::LengthMismatch {
            directions: m,
            weights: omega.size(),
        });
    }
    let reference = data.phi(0, 1);
    let mut acc = ImageGrid::zeros(reference.n(), reference.half_width())?;
    for i in 0..m {
        for j in (i + 1)..m {
            let w = omega.get(i, j);
            if w == 0.0 {
                continue;
            }
            let grid = data.phi(i, j);
            acc.values_mut()
                .iter_mut()
                .zip(grid.values())
                .for_each(|(a, &v)| *a += w * v);
        }
    }
    Ok(StarField {
        grid: acc,
        ext_factor: data.ext_factor,
    })
}

/// Reconstruction grid/discretization parameters for the recovery pipeline.
#[derive(Clone, Copy, Debug)]
pub struct ReconParams {
    pub k_angles: usize,
    pub t_samples: usize,
    pub n: usize,
    pub half_width: f64,
}

/// Jointly recovered attenuation and scattering maps.
#[derive(Clone, Debug)]
pub struct ScatterRecovery {
    pub f_hat: ImageGrid,
    pub eta_hat: ImageGrid,
    pub inversion: StarInversion,
}

/// Recover `f` and `eta` from pair data (simple model, `k = 1`): combine with
/// the eliminating matrix for `c`, invert the resulting star field, then
/// estimate `eta_ij = phi_ij - X_i f_hat - k_ij X_j f_hat` averaged over all
/// ordered pairs.
pub fn recover_f_eta(
    data: &ScatterData,
    c: &[f64],
    params: &ReconParams,
    settings: &InversionSettings,
) -> Result<ScatterRecovery, ScatterError> {
    let m = data.n_directions();
    if c.len() != m {
        return Err(ScatterError::LengthMismatch {
            directions: m,
            weights: c.len(),
        });
    }
    let omega = omega_for_weights(c)?;
    let field = eliminate_scatter(data, &omega)?;
    let cfg = StarConfig::new(data.direction_angles.clone(), c.to_vec())?;
    if !cfg.is_invertible() {
        return Err(ScatterError::Inversion(
            InversionError::SymmetricConfiguration,
        ));
    }
    let inversion = invert_star(
        &field,
        &cfg,
        params.k_angles,
        params.t_samples,
        settings,
        params.n,
        params.half_width,
    )?;

    let eta_hat = estimate_eta(data, &inversion.image)?;
    Ok(ScatterRecovery {
        f_hat: inversion.image.clone(),
        eta_hat,
        inversion,
    })
}

/// `eta` estimate on the reconstruction grid: residual of the measurement
/// model against the recovered attenuation, averaged over all ordered pairs.
pub fn estimate_eta(data: &ScatterData, f_hat: &ImageGrid) -> Result<ImageGrid, ScatterError> {
    let m = data.n_directions();
    let n = f_hat.n();
    let gammas: Vec<Dir2> = data
        .direction_angles
        .iter()
        .map(|&a| Dir2::from_angle(a))
        .collect();

    // beam transforms of the reconstruction along each direction
    let beams: Vec<ImageGrid> = gammas
        .iter()
        .map(|&g| {
            let mut grid = ImageGrid::zeros(n, f_hat.half_width())?;
            grid.fill_with(|x, y| divergent_beam(f_hat, g, [x, y]));
            Ok::<_, ScatterError>(grid)
        })
        .collect::<Result<_, _>>()?;

    let mut eta = ImageGrid::zeros(n, f_hat.half_width())?;
    let n_pairs = (m * (m - 1)) as f64;
    for iy in 0..n {
        let y = eta.coord(iy);
        for ix in 0..n {
            let x = eta.coord(ix);
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let phi = data.phi(i, j).sample(x, y);
                    let kij = data.k_const(i, j);
                    acc += phi - beams[i].get(ix, iy) - kij * beams[j].get(ix, iy);
                }
            }
            eta.set(ix, iy, acc / n_pairs);
        }
    }
    Ok(eta)
}

/// Effective star weights of a user-supplied combination
/// `sum coeff * phi_(i,j)` (general `k`): ray `l` picks up
/// `coeff * [l == i] + coeff * k_ij * [l == j]` per term. The `eta`
/// coefficient `sum coeff` must vanish. Rays whose weight cancels are
/// dropped.
pub fn combination_star_weights(
    data: &ScatterData,
    terms: &[((usize, usize), f64)],
) -> Result<(Vec<usize>, Vec<f64>), ScatterError> {
    let m = data.n_directions();
    let mut weights = vec![0.0; m];
    let mut eta_coeff = 0.0;
    for &((i, j), coeff) in terms {
        weights[i] += coeff;
        weights[j] += coeff * data.k_const(i, j);
        eta_coeff += coeff;
    }
    if eta_coeff.abs() > WEIGHT_SUM_TOL {
        return Err(ScatterError::WeightSumNonzero(eta_coeff));
    }
    let kept: Vec<usize> = (0..m).filter(|&l| weights[l].abs() > 1e-12).collect();
    if kept.is_empty() {
        return Err(ScatterError::EmptyCombination);
    }
    let w = kept.iter().map(|&l| weights[l]).collect();
    Ok((kept, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::gaussian_bump;

    fn uniform_k(m: usize) -> Vec<f64> {
        vec![1.0; m * m]
    }

    #[test]
    fn omega_unique_three_direction_solution() {
        let omega = omega_for_weights(&[1.0, 1.0, -2.0]).unwrap();
        assert!((omega.get(0, 1) - 2.0).abs() < 1e-12);
        assert!((omega.get(0, 2) + 1.0).abs() < 1e-12);
        assert!((omega.get(1, 2) + 1.0).abs() < 1e-12);
        // symmetric, hollow
        for i in 0..3 {
            assert_eq!(omega.get(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(omega.get(i, j), omega.get(j, i));
            }
        }
    }

    #[test]
    fn omega_row_sums_match_weights() {
        let c = [0.3, -1.1, 0.25, 0.55];
        let omega = omega_for_weights(&c).unwrap();
        for (got, want) in omega.row_sums().iter().zip(c) {
            assert!((got - want).abs() < 1e-10);
        }
        let total: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| omega.get(i, j))
            .sum();
        assert!(total.abs() < 1e-12);
    }

    #[test]
    fn omega_is_minimum_norm() {
        // perturbing within the constraint null space must not shrink the norm
        let c = [1.0, 1.0, -1.0, -1.0];
        let omega = omega_for_weights(&c).unwrap();
        let norm2 = |entries: &dyn Fn(usize, usize) -> f64| -> f64 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += entries(i, j) * entries(i, j);
                }
            }
            s
        };
        let base = norm2(&|i, j| omega.get(i, j));
        // null-space direction: add t to (0,1) and (2,3), subtract t from
        // (0,2)... keep row sums: use pairs (0,1)+(2,3) minus (0,3)+(1,2)
        for t in [0.1, -0.2, 0.5] {
            let perturbed = |i: usize, j: usize| -> f64 {
                let v = omega.get(i, j);
                let bump = |a: usize, b: usize| (i == a && j == b) || (i == b && j == a);
                if bump(0, 1) || bump(2, 3) {
                    v + t
                } else if bump(0, 3) || bump(1, 2) {
                    v - t
                } else {
                    v
                }
            };
            // row sums unchanged
            for i in 0..4 {
                let s: f64 = (0..4).map(|j| perturbed(i, j)).sum();
                assert!((s - c[i]).abs() < 1e-12);
            }
            assert!(norm2(&perturbed) > base + 1e-9);
        }
    }

    #[test]
    fn omega_rejects_nonzero_sum() {
        assert!(matches!(
            omega_for_weights(&[1.0, 1.0, -1.0]),
            Err(ScatterError::WeightSumNonzero(_))
        ));
    }

    #[test]
    fn recommended_weights_zero_sum() {
        for m in [3usize, 5, 7] {
            let c = recommended_weights(m).unwrap();
            assert_eq!(c.len(), m);
            assert!(c.iter().sum::<f64>().abs() < 1e-12);
        }
        let c3 = recommended_weights(3).unwrap();
        assert_eq!(c3, vec![-1.0, 0.5, 0.5]);
    }

    #[test]
    fn simulate_zero_f_gives_eta_everywhere() {
        let f = ImageGrid::zeros(32, 1.0).unwrap();
        let eta = gaussian_bump([0.0, 0.0], 0.2, 32, 1.0).unwrap();
        let angles = vec![0.0, 2.0, 4.0];
        let data = simulate_scatter(&f, &eta, &angles, &uniform_k(3), 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                for (a, b) in data.phi(i, j).values().iter().zip(eta.values()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn simulate_unit_k_pairs_are_symmetric() {
        let f = gaussian_bump([0.1, 0.0], 0.15, 32, 1.0).unwrap();
        let eta = ImageGrid::zeros(32, 1.0).unwrap();
        let angles = vec![0.0, 2.0, 4.0];
        let data = simulate_scatter(&f, &eta, &angles, &uniform_k(3), 1.5).unwrap();
        for (a, b) in data.phi(0, 2).values().iter().zip(data.phi(2, 0).values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn elimination_is_exact_at_data_level() {
        let f = gaussian_bump([0.05, -0.1], 0.15, 48, 1.0).unwrap();
        let eta = gaussian_bump([-0.2, 0.2], 0.1, 48, 1.0).unwrap();
        let angles = vec![0.1, 2.2, 4.3];
        let c = [1.0, 1.0, -2.0];
        let data = simulate_scatter(&f, &eta, &angles, &uniform_k(3), 2.0).unwrap();
        let omega = omega_for_weights(&c).unwrap();
        let combined = eliminate_scatter(&data, &omega).unwrap();

        // oracle: the weighted sum of beam transforms, eta absent
        let grid = &combined.grid;
        for iy in (0..grid.n()).step_by(7) {
            for ix in (0..grid.n()).step_by(5) {
                let x = [grid.coord(ix), grid.coord(iy)];
                let want: f64 = angles
                    .iter()
                    .zip(c)
                    .map(|(&a, w)| w * divergent_beam(&f, Dir2::from_angle(a), x))
                    .sum();
                let got = grid.get(ix, iy);
                assert!((got - want).abs() < 1e-10, "({ix},{iy}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn combination_weights_drop_cancelled_rays() {
        let f = ImageGrid::zeros(32, 1.0).unwrap();
        let eta = ImageGrid::zeros(32, 1.0).unwrap();
        let angles = vec![0.0, 2.0, 4.0];
        let data = simulate_scatter(&f, &eta, &angles, &uniform_k(3), 1.0).unwrap();
        // phi_12 - phi_23 with k = 1: ray 2 cancels, weights (1, -1) on rays 1, 3
        let (rays, weights) =
            combination_star_weights(&data, &[((0, 1), 1.0), ((1, 2), -1.0)]).unwrap();
        assert_eq!(rays, vec![0, 2]);
        assert!((weights[0] - 1.0).abs() < 1e-12);
        assert!((weights[1] + 1.0).abs() < 1e-12);
        // a combination that keeps eta is rejected
        assert!(matches!(
            combination_star_weights(&data, &[((0, 1), 1.0)]),
            Err(ScatterError::WeightSumNonzero(_))
        ));
    }
}
