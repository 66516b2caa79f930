//! Singular-direction analysis of star configurations.
//!
//! For a direction psi on the unit circle, the inversion multiplier is
//! `q(psi) = -1 / w(psi)` with `w(psi) = sum_i c_i / <psi, gamma_i>`.
//! Clearing denominators gives the degree-(m-1) homogeneous polynomial
//!
//! ```text
//! P(psi) = sum_j c_j * prod_{i != j} <psi, gamma_i>
//! ```
//!
//! whose zeros on the circle are the Type-2 singular directions (division by
//! zero in the inversion), while directions orthogonal to some ray are Type-1
//! (multiplication by zero). `P` either has finitely many zeros on the circle
//! or vanishes identically, the latter exactly for symmetric configurations.
//!
//! All evaluations here use the division-free form above, so Type-1
//! directions never produce spurious poles.

use std::f64::consts::{FRAC_PI_2, TAU};

use thiserror::Error;

use crate::geom::{wrap_tau, Dir2};
use crate::star_geometry::StarConfig;

/// Elementary symmetric polynomial of degree `m - 1` in `m` variables:
/// the sum over `i` of the product of all entries except `y[i]`.
///
/// Computed as `m` separate (m-1)-factor products, no divisions, O(m^2).
/// For `m = 1` the empty product gives 1.
pub fn elem_sym_all_but_one(y: &[f64]) -> f64 {
    let m = y.len();
    let mut sum = 0.0;
    for i in 0..m {
        let mut prod = 1.0;
        for (j, v) in y.iter().enumerate() {
            if j != i {
                prod *= v;
            }
        }
        sum += prod;
    }
    sum
}

/// The stability polynomial `sum_j c_j prod_{i != j} <psi, gamma_i>`.
///
/// Its zeros on the circle are the Type-2 singular directions. Algebraically
/// this equals `(prod c_i) * e_{m-1}(<psi, gamma_1>/c_1, ..., <psi, gamma_m>/c_m)`;
/// the division-free form is used so Type-1 directions stay benign.
pub fn stability_poly(cfg: &StarConfig, psi: Dir2) -> f64 {
    let dots: Vec<f64> = cfg.rays().map(|g| psi.dot(g)).collect();
    let mut sum = 0.0;
    for (j, c) in cfg.weights().iter().enumerate() {
        let mut prod = *c;
        for (i, d) in dots.iter().enumerate() {
            if i != j {
                prod *= d;
            }
        }
        sum += prod;
    }
    sum
}

/// Why a pointwise evaluation of `w` or `q` was refused.
#[derive(Debug, Error, PartialEq)]
pub enum SingularEval {
    #[error("direction is within tolerance of the Type-1 singular set (orthogonal to ray {ray})")]
    NearType1 { ray: usize },
    #[error("direction is within tolerance of the Type-2 singular set (stability polynomial ~ 0)")]
    NearType2,
}

/// `w(psi) = sum_i c_i / <psi, gamma_i>`, refusing directions within
/// `zero_floor` of the Type-1 set.
pub fn multiplier_reciprocal(
    cfg: &StarConfig,
    psi: Dir2,
    zero_floor: f64,
) -> Result<f64, SingularEval> {
    let mut w = 0.0;
    for (i, (g, c)) in cfg.rays().zip(cfg.weights()).enumerate() {
        let d = psi.dot(g);
        if d.abs() < zero_floor {
            return Err(SingularEval::NearType1 { ray: i });
        }
        w += c / d;
    }
    Ok(w)
}

/// The inversion multiplier `q(psi) = -1 / w(psi)`, refusing directions near
/// either singular set. The Type-2 proximity test is scale-relative:
/// `|P(psi)| < zero_floor * sum |c_i|`.
pub fn radon_multiplier(cfg: &StarConfig, psi: Dir2, zero_floor: f64) -> Result<f64, SingularEval> {
    let scale: f64 = cfg.weights().iter().map(|c| c.abs()).sum();
    if stability_poly(cfg, psi).abs() < zero_floor * scale {
        return Err(SingularEval::NearType2);
    }
    let w = multiplier_reciprocal(cfg, psi, zero_floor)?;
    Ok(-1.0 / w)
}

/// Controls for the circle scan locating Type-2 directions.
#[derive(Clone, Debug)]
pub struct ScanSettings {
    /// Uniform samples of the polar angle on [0, 2*pi).
    pub n_samples: usize,
    /// Bisection tolerance (radians) for refining sign-change roots.
    pub refine_tol: f64,
    /// Scale-relative threshold: |P| below `zero_floor * max |P|` counts as a
    /// (possibly tangential) zero.
    pub zero_floor: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            n_samples: 4096,
            refine_tol: 1e-12,
            zero_floor: 1e-10,
        }
    }
}

/// Relative spread below which the scanned polynomial counts as constant.
const CONSTANCY_REL: f64 = 1e-12;
/// Absolute ceiling below which the scanned polynomial counts as identically
/// zero (symmetric configuration).
const IDENTICALLY_ZERO_ABS: f64 = 1e-12;

/// Singular directions of a configuration, plus the scan summary.
///
/// Angles are in [0, 2*pi), sorted ascending. `type2_tangential[i]` marks
/// whether `type2_angles[i]` was found as a touch-zero (no sign change)
/// rather than a crossing.
#[derive(Clone, Debug)]
pub struct SingularityReport {
    pub type1_angles: Vec<f64>,
    pub type2_angles: Vec<f64>,
    pub type2_tangential: Vec<bool>,
    pub invertible: bool,
    /// Minimum of |P| over the scan grid.
    pub p2_min_abs: f64,
    pub p2_is_constant: bool,
    /// The scan found |P| below the identically-zero ceiling everywhere;
    /// the configuration is symmetric and not invertible.
    pub p2_identically_zero: bool,
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if (flo < 0.0) != (fmid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Locate the singular directions of `cfg`.
///
/// Type-1 angles are analytic (each ray contributes its two perpendiculars).
/// Type-2 angles come from scanning `P` on a uniform grid: sign changes are
/// refined by bisection, and local minima of |P| below the relative floor are
/// polished by golden-section search and reported as tangential zeros.
pub fn find_singular_directions(cfg: &StarConfig, settings: &ScanSettings) -> SingularityReport {
    let n = settings.n_samples.max(16);

    let mut type1: Vec<f64> = Vec::with_capacity(2 * cfg.len());
    for &a in cfg.angles() {
        type1.push(wrap_tau(a + FRAC_PI_2));
        type1.push(wrap_tau(a - FRAC_PI_2));
    }
    type1.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dedup_circular(&mut type1, crate::star_geometry::EPS_DIR);

    let f = |alpha: f64| stability_poly(cfg, Dir2::from_angle(alpha));
    let step = TAU / n as f64;
    let samples: Vec<f64> = (0..n).map(|i| f(i as f64 * step)).collect();

    let max_abs = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_abs = samples.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let max_v = samples.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let min_v = samples.iter().fold(f64::INFINITY, |m, &v| m.min(v));

    let identically_zero = max_abs < IDENTICALLY_ZERO_ABS;
    let is_constant = identically_zero || (max_v - min_v) < CONSTANCY_REL * max_abs;

    // (angle, tangential)
    let mut zeros: Vec<(f64, bool)> = Vec::new();
    if !identically_zero {
        for i in 0..n {
            let a = samples[i];
            let b = samples[(i + 1) % n];
            let lo = i as f64 * step;
            let hi = lo + step;
            if a == 0.0 {
                zeros.push((lo, false));
            } else if (a < 0.0) != (b < 0.0) && b != 0.0 {
                zeros.push((bisect_root(f, lo, hi, settings.refine_tol), false));
            }
        }
        // Tangential zeros: |P| dips below the floor without changing sign.
        // Grid samples rarely land on a touch-zero, so polish each strict
        // local minimum of |P| before applying the threshold.
        for i in 0..n {
            let prev = samples[(i + n - 1) % n].abs();
            let here = samples[i].abs();
            let next = samples[(i + 1) % n].abs();
            if here <= prev && here <= next && here > 0.0 {
                let lo = (i as f64 - 1.0) * step;
                let hi = (i as f64 + 1.0) * step;
                let alpha = golden_min(|x| f(x).abs(), lo, hi, 80);
                if f(alpha).abs() < settings.zero_floor * max_abs {
                    zeros.push((wrap_tau(alpha), true));
                }
            }
        }
    }

    zeros.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let zeros = dedup_zeros(zeros, step);

    SingularityReport {
        type1_angles: type1,
        type2_angles: zeros.iter().map(|z| z.0).collect(),
        type2_tangential: zeros.iter().map(|z| z.1).collect(),
        invertible: cfg.is_invertible(),
        p2_min_abs: min_abs,
        p2_is_constant: is_constant,
        p2_identically_zero: identically_zero,
    }
}

fn dedup_circular(sorted: &mut Vec<f64>, tol: f64) {
    if sorted.len() < 2 {
        return;
    }
    let mut out: Vec<f64> = Vec::with_capacity(sorted.len());
    for &a in sorted.iter() {
        if out.last().map_or(true, |&p| a - p > tol) {
            out.push(a);
        }
    }
    // wrap-around pair
    if out.len() > 1 && (TAU - out.last().unwrap() + out[0]) <= tol {
        out.pop();
    }
    *sorted = out;
}

/// Merge zeros closer than one grid step, preferring refined sign-change
/// roots over polished tangential candidates.
fn dedup_zeros(zeros: Vec<(f64, bool)>, step: f64) -> Vec<(f64, bool)> {
    if zeros.is_empty() {
        return zeros;
    }
    let mut out: Vec<(f64, bool)> = Vec::new();
    for z in zeros {
        match out.last_mut() {
            Some(last) if z.0 - last.0 <= step => {
                if last.1 && !z.1 {
                    *last = z;
                }
            }
            _ => out.push(z),
        }
    }
    if out.len() > 1 {
        let first = out[0];
        let last = *out.last().unwrap();
        if TAU - last.0 + first.0 <= step {
            if first.1 && !last.1 {
                out[0] = last;
            }
            out.pop();
        }
    }
    out
}

/// Result of scanning the elementary symmetric polynomial on a circle inside
/// a plane spanned by aperture vectors.
#[derive(Clone, Copy, Debug)]
pub struct ApertureScan {
    pub min_abs: f64,
    pub max_abs: f64,
    pub is_constant: bool,
}

/// Evaluate `e_{m-1}(r*a + s*b)` over `n_samples` points `(r, s)` on the unit
/// circle. A positive `min_abs` witnesses that the plane spanned by `a` and
/// `b` meets the zero set of `e_{m-1}` only at the origin.
pub fn aperture_circle_scan(a: &[f64], b: &[f64], n_samples: usize) -> ApertureScan {
    assert_eq!(a.len(), b.len());
    let n = n_samples.max(16);
    let mut y = vec![0.0; a.len()];
    let mut min_abs = f64::INFINITY;
    let mut max_abs = 0.0f64;
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    for i in 0..n {
        let theta = TAU * i as f64 / n as f64;
        let (s, r) = theta.sin_cos();
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = r * a[k] + s * b[k];
        }
        let v = elem_sym_all_but_one(&y);
        min_abs = min_abs.min(v.abs());
        max_abs = max_abs.max(v.abs());
        min_v = min_v.min(v);
        max_v = max_v.max(v);
    }
    // Constancy threshold is looser than the scanner's: rounding noise in the
    // m-fold products accumulates for larger m.
    let is_constant = (max_v - min_v) <= 1e-10 * max_abs.max(f64::MIN_POSITIVE);
    ApertureScan {
        min_abs,
        max_abs,
        is_constant,
    }
}

/// [`aperture_circle_scan`] over the aperture vectors of the regular star
/// with `m` rays (odd).
pub fn regular_aperture_scan(
    m: usize,
    n_samples: usize,
) -> Result<ApertureScan, crate::star_geometry::ConfigError> {
    let cfg = StarConfig::regular(m)?;
    let ap = cfg.aperture();
    Ok(aperture_circle_scan(&ap.a, &ap.b, n_samples))
}

/// True iff `y` lies on the zero cone of `e_2` in R^3 (scale-relative test
/// `|e_2(y)| < 1e-10 * |y|^2`). The cone is exactly the set of vectors whose
/// angle `t` against (1, 1, 1) satisfies `cos^2 t = 1/3`.
pub fn e2_cone_check(y: [f64; 3]) -> bool {
    let e2 = y[0] * y[1] + y[0] * y[2] + y[1] * y[2];
    let norm2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    e2.abs() < 1e-10 * norm2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::deg_to_rad;
    use crate::star_geometry::half_plane_fan;
    use std::f64::consts::PI;

    fn uniform(angles_deg: &[f64]) -> StarConfig {
        StarConfig::with_uniform_weights(angles_deg.iter().map(|&d| deg_to_rad(d)).collect())
            .unwrap()
    }

    #[test]
    fn elem_sym_small_cases() {
        // direct sum of the three pair products: -1/2 - 1/2 + 1/4
        assert!((elem_sym_all_but_one(&[1.0, -0.5, -0.5]) + 0.75).abs() < 1e-15);
        assert_eq!(elem_sym_all_but_one(&[0.0, 0.0, 0.0, 0.0]), 0.0);
        // m = 1: empty product
        assert_eq!(elem_sym_all_but_one(&[7.0]), 1.0);
    }

    #[test]
    fn elem_sym_homogeneity() {
        let y = [0.3, -1.2, 0.7, 2.1, -0.4];
        let m = y.len() as i32;
        let scaled: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        let lhs = elem_sym_all_but_one(&scaled);
        let rhs = 2f64.powi(m - 1) * elem_sym_all_but_one(&y);
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs());
    }

    #[test]
    fn stability_poly_regular_three_is_constant() {
        let cfg = StarConfig::regular(3).unwrap();
        for i in 0..64 {
            let v = stability_poly(&cfg, Dir2::from_angle(TAU * i as f64 / 64.0));
            assert!((v + 0.75).abs() < 1e-12, "got {v}");
        }
    }

    #[test]
    fn stability_poly_vline_zero() {
        // two rays at 0 and 120 degrees, psi at -30 degrees
        let cfg = uniform(&[0.0, 120.0]);
        let v = stability_poly(&cfg, Dir2::from_angle(deg_to_rad(-30.0)));
        assert!(v.abs() < 1e-15, "got {v}");
    }

    #[test]
    fn stability_poly_odd_parity_for_even_m() {
        let cfg = uniform(&[10.0, 75.0, 160.0, 295.0]);
        for i in 0..16 {
            let alpha = TAU * i as f64 / 16.0 + 0.05;
            let plus = stability_poly(&cfg, Dir2::from_angle(alpha));
            let minus = stability_poly(&cfg, Dir2::from_angle(alpha + PI));
            assert!((plus + minus).abs() < 1e-12 * plus.abs().max(1.0));
        }
    }

    #[test]
    fn multiplier_identities() {
        let cfg = uniform(&[0.0, 120.0, 200.0]);
        let floor = 1e-10;
        for i in 0..32 {
            let alpha = 0.013 + TAU * i as f64 / 32.0;
            let psi = Dir2::from_angle(alpha);
            let p = stability_poly(&cfg, psi);
            let prod: f64 = cfg.rays().map(|g| psi.dot(g)).product();
            if p.abs() < 1e-3 || prod.abs() < 1e-3 {
                continue;
            }
            let q = radon_multiplier(&cfg, psi, floor).unwrap();
            let via_poly = -prod / p;
            assert!(
                (q - via_poly).abs() <= 1e-10 * via_poly.abs(),
                "q mismatch at {alpha}"
            );
            let w = multiplier_reciprocal(&cfg, psi, floor).unwrap();
            assert!((q + 1.0 / w).abs() <= 1e-10 * q.abs());
        }
    }

    #[test]
    fn multiplier_singlet_and_pair_formulas() {
        // m = 1: q = -<psi, gamma>
        let cfg = StarConfig::new(vec![0.0], vec![1.0]).unwrap();
        let psi = Dir2::from_angle(0.9);
        let q = radon_multiplier(&cfg, psi, 1e-10).unwrap();
        assert!((q + psi.dot(Dir2::from_angle(0.0))).abs() < 1e-14);

        // m = 2: q = -<psi,g1><psi,g2> / (c2 <psi,g1> + c1 <psi,g2>)
        let cfg = StarConfig::new(vec![0.0, deg_to_rad(120.0)], vec![2.0, 0.7]).unwrap();
        let g1 = cfg.ray(0);
        let g2 = cfg.ray(1);
        let psi = Dir2::from_angle(1.2);
        let want = -psi.dot(g1) * psi.dot(g2) / (0.7 * psi.dot(g1) + 2.0 * psi.dot(g2));
        let q = radon_multiplier(&cfg, psi, 1e-10).unwrap();
        assert!((q - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn multiplier_refuses_near_singular() {
        let cfg = uniform(&[0.0, 120.0]);
        // Type 1: psi orthogonal to ray 0
        let r = multiplier_reciprocal(&cfg, Dir2::from_angle(FRAC_PI_2), 1e-10);
        assert_eq!(r.unwrap_err(), SingularEval::NearType1 { ray: 0 });
        // Type 2: psi at -30 degrees
        let r = radon_multiplier(&cfg, Dir2::from_angle(deg_to_rad(-30.0)), 1e-10);
        assert_eq!(r.unwrap_err(), SingularEval::NearType2);
    }

    #[test]
    fn symmetric_two_star_w_vanishes() {
        // w is identically zero away from poles, so q is defined nowhere
        let cfg = StarConfig::new(vec![0.0, PI], vec![1.0, 1.0]).unwrap();
        for i in 0..8 {
            let psi = Dir2::from_angle(0.3 + i as f64 * 0.37);
            let w = multiplier_reciprocal(&cfg, psi, 1e-10).unwrap();
            assert!(w.abs() < 1e-12);
            assert!(radon_multiplier(&cfg, psi, 1e-10).is_err());
        }
    }

    #[test]
    fn scan_regular_three() {
        let cfg = StarConfig::regular(3).unwrap();
        let rep = find_singular_directions(&cfg, &ScanSettings::default());
        assert!(rep.type2_angles.is_empty());
        assert!(rep.p2_is_constant);
        assert!(!rep.p2_identically_zero);
        assert!(rep.invertible);
        assert!((rep.p2_min_abs - 0.75).abs() < 1e-12);
        assert_eq!(rep.type1_angles.len(), 6);
    }

    #[test]
    fn scan_vline_finds_both_zeros() {
        let cfg = uniform(&[0.0, 120.0]);
        let rep = find_singular_directions(&cfg, &ScanSettings::default());
        assert_eq!(rep.type2_angles.len(), 2);
        let want = [deg_to_rad(150.0), wrap_tau(deg_to_rad(-30.0))];
        let mut want = want.to_vec();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in rep.type2_angles.iter().zip(want) {
            assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
        }
        assert!(rep.type2_tangential.iter().all(|t| !t));
    }

    #[test]
    fn scan_type1_count_and_antipodal_pairing() {
        let cfg = StarConfig::regular(5).unwrap();
        let rep = find_singular_directions(&cfg, &ScanSettings::default());
        assert_eq!(rep.type1_angles.len(), 10);
        // odd m: zeros of the scan would pair antipodally; type-1 angles do too
        for &a in &rep.type1_angles {
            let partner = wrap_tau(a + PI);
            assert!(rep
                .type1_angles
                .iter()
                .any(|&b| crate::geom::circ_dist_tau(b, partner) < 1e-9));
        }
    }

    #[test]
    fn scan_symmetric_reports_identically_zero() {
        let cfg = StarConfig::new(
            vec![0.2, 1.1, 0.2 + PI, 1.1 + PI],
            vec![1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        let rep = find_singular_directions(&cfg, &ScanSettings::default());
        assert!(rep.p2_identically_zero);
        assert!(!rep.invertible);
        assert!(rep.p2_is_constant);
    }

    #[test]
    fn scan_half_plane_fans_are_unstable() {
        for m in [3usize, 5] {
            let cfg = half_plane_fan(m).unwrap();
            let rep = find_singular_directions(&cfg, &ScanSettings::default());
            assert!(
                !rep.type2_angles.is_empty(),
                "fan m={m} should have Type-2 zeros"
            );
            assert!(rep.invertible);
        }
    }

    #[test]
    fn scan_antipodal_pair_zero_at_perpendicular() {
        // gamma1 = -gamma2 in an odd-m config: psi orthogonal to them is a
        // Type-2 zero (P = -<psi,gamma1>^2 up to rounding in the antipode).
        let cfg = uniform(&[0.0, 180.0, 77.0]);
        let rep = find_singular_directions(&cfg, &ScanSettings::default());
        let found = rep
            .type2_angles
            .iter()
            .any(|&a| crate::geom::circ_dist_pi(a, FRAC_PI_2) < 1e-6);
        assert!(found, "expected a zero at 90 degrees: {rep:?}");
    }

    #[test]
    fn scan_flags_tangential_touch_zero() {
        // Same antipodal pair, but the third ray tilts the rounding residue
        // the other way: the touch-zero stays one-signed and must be caught
        // by the polished local-minimum rule, not a sign change.
        let cfg = uniform(&[0.0, 180.0, -77.0]);
        let rep = find_singular_directions(&cfg, &ScanSettings::default());
        let found = rep
            .type2_angles
            .iter()
            .zip(&rep.type2_tangential)
            .any(|(&a, &t)| t && crate::geom::circ_dist_pi(a, FRAC_PI_2) < 1e-6);
        assert!(found, "expected a tangential zero at 90 degrees: {rep:?}");
    }

    #[test]
    fn scan_even_m_has_zero() {
        let cfg = uniform(&[10.0, 75.0, 160.0, 295.0]);
        let rep = find_singular_directions(&cfg, &ScanSettings::default());
        assert!(!rep.type2_angles.is_empty());
    }

    #[test]
    fn regular_aperture_scan_values() {
        let scan = regular_aperture_scan(3, 4096).unwrap();
        assert!(scan.is_constant);
        assert!((scan.min_abs - 0.75).abs() < 1e-10);
        for m in [5usize, 7] {
            let scan = regular_aperture_scan(m, 4096).unwrap();
            assert!(scan.is_constant, "m={m}");
            assert!(scan.min_abs > 0.0, "m={m}");
        }
    }

    #[test]
    fn perturbed_aperture_scan_not_constant() {
        let cfg = half_plane_fan(3).unwrap();
        let ap = cfg.aperture();
        let scan = aperture_circle_scan(&ap.a, &ap.b, 4096);
        assert!(!scan.is_constant);
        assert!(scan.min_abs < 1e-3);
    }

    #[test]
    fn e2_cone_membership() {
        // root of e2(1, 1, t) = 1 + 2t at t = -1/2
        assert!(e2_cone_check([1.0, 1.0, -0.5]));
        // cross-check the cone angle: cos^2((1,1,-1/2), (1,1,1)) = 1/3
        let y: [f64; 3] = [1.0, 1.0, -0.5];
        let dot = y[0] + y[1] + y[2];
        let cos2 = dot * dot / ((y.iter().map(|v| v * v).sum::<f64>()) * 3.0);
        assert!((cos2 - 1.0 / 3.0).abs() < 1e-12);

        assert!(!e2_cone_check([1.0, 1.0, 1.0]));
        // homogeneity: scaling keeps off-cone vectors off the cone
        for lambda in [0.1, 1.0, 42.0] {
            assert!(!e2_cone_check([lambda, -0.5 * lambda, -0.5 * lambda]));
        }
    }
}
