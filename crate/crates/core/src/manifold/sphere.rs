//! Unit 2-sphere with real spherical harmonics.
//!
//! The basis is orthonormal with respect to the *normalized* measure
//! (total mass 1): the standard surface-measure-orthonormal real harmonics
//! multiplied by sqrt(4 pi). Degree l has frequency sqrt(l(l+1)) and
//! multiplicity 2l+1; within a degree, orders run m = -l..l, sine flavors
//! on negative m, zonal at m = 0, cosine flavors on positive m.
//!
//! Associated Legendre values are generated by stable upward recurrence on
//! the semi-normalized functions Q_l^m = sqrt((2l+1)(l-m)!/(l+m)!) P_l^m,
//! so no factorial ever materializes.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::{EigenLabel, EigenPair, Manifold, ManifoldKind, Point};
use crate::error::{Error, Result};
use crate::gauss::gauss_legendre_cached;
use crate::partition::{sphere_equal_measure_partition, Partition};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

pub struct UnitSphere;

impl UnitSphere {
    pub fn new() -> Self {
        UnitSphere
    }
}

impl Default for UnitSphere {
    fn default() -> Self {
        Self::new()
    }
}

fn degree_lambda(l: u32) -> f64 {
    ((l as f64) * (l as f64 + 1.0)).sqrt()
}

/// Diagonal step: Q_{m}^{m} from Q_{m-1}^{m-1}.
fn diag_step(m: u32, sin_theta: f64, prev: f64) -> f64 {
    let mf = m as f64;
    sin_theta * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * prev
}

/// Upward step: Q_l^m from Q_{l-1}^m and Q_{l-2}^m.
fn up_step(l: u32, m: u32, cos_theta: f64, q1: f64, q2: f64) -> f64 {
    let lf = l as f64;
    let mf = m as f64;
    let a = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - mf) * (lf + mf))).sqrt();
    let b = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
        / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
        .sqrt();
    a * cos_theta * q1 - b * q2
}

/// Q_l^m at a single (cos, sin) pair; O(l) work.
fn assoc_legendre_semi(l: u32, m: u32, cos_theta: f64, sin_theta: f64) -> f64 {
    debug_assert!(m <= l);
    let mut qmm = 1.0;
    for mm in 1..=m {
        qmm = diag_step(mm, sin_theta, qmm);
    }
    if l == m {
        return qmm;
    }
    let mut q1 = qmm;
    let mut q2 = ((2 * m + 3) as f64).sqrt() * cos_theta * qmm;
    if l == m + 1 {
        return q2;
    }
    for ll in (m + 2)..=l {
        let next = up_step(ll, m, cos_theta, q2, q1);
        q1 = q2;
        q2 = next;
    }
    q2
}

fn spherical_angles(p: &Point) -> (f64, f64, f64) {
    let x = p.coords[0];
    let y = p.coords[1];
    let z = p.coords[2];
    let cos_theta = z.clamp(-1.0, 1.0);
    let sin_theta = (x * x + y * y).sqrt();
    let phi = y.atan2(x);
    (cos_theta, sin_theta, phi)
}

impl Manifold for UnitSphere {
    fn kind(&self) -> ManifoldKind {
        ManifoldKind::Sphere2
    }

    fn dimension(&self) -> usize {
        2
    }

    fn enumerate_spectrum(&self, count: usize) -> Vec<EigenPair> {
        let mut pairs = Vec::with_capacity(count);
        let mut l = 0u32;
        'outer: loop {
            let lambda = degree_lambda(l);
            for order in -(l as i32)..=(l as i32) {
                if pairs.len() >= count {
                    break 'outer;
                }
                pairs.push(EigenPair {
                    index: pairs.len(),
                    lambda,
                    label: EigenLabel::SphereHarmonic { degree: l, order },
                });
            }
            l += 1;
        }
        pairs
    }

    fn spectrum_up_to(&self, lambda_max: f64) -> Vec<EigenPair> {
        let mut max_l = 0u32;
        while degree_lambda(max_l + 1) <= lambda_max {
            max_l += 1;
        }
        if degree_lambda(0) > lambda_max {
            return Vec::new();
        }
        self.enumerate_spectrum(((max_l + 1) * (max_l + 1)) as usize)
    }

    fn eval_eigenfunction(&self, label: &EigenLabel, x: &Point) -> Result<f64> {
        let EigenLabel::SphereHarmonic { degree, order } = label else {
            return Err(Error::LabelMismatch {
                manifold: self.kind().name(),
                label: label.to_string(),
            });
        };
        let l = *degree;
        let m_abs = order.unsigned_abs();
        if m_abs > l {
            return Err(Error::LabelMismatch {
                manifold: self.kind().name(),
                label: label.to_string(),
            });
        }
        let (cos_theta, sin_theta, phi) = spherical_angles(x);
        let q = assoc_legendre_semi(l, m_abs, cos_theta, sin_theta);
        Ok(match order.cmp(&0) {
            std::cmp::Ordering::Equal => q,
            std::cmp::Ordering::Greater => SQRT_2 * q * (m_abs as f64 * phi).cos(),
            std::cmp::Ordering::Less => SQRT_2 * q * (m_abs as f64 * phi).sin(),
        })
    }

    fn eval_prefix(&self, x: &Point, count: usize, out: &mut Vec<f64>) {
        out.clear();
        if count == 0 {
            return;
        }
        out.reserve(count);
        let max_l = {
            // Smallest L with (L+1)^2 >= count.
            let mut l = 0u32;
            while (((l + 1) * (l + 1)) as usize) < count {
                l += 1;
            }
            l
        };
        let (cos_theta, sin_theta, phi) = spherical_angles(x);

        // Rolling rows of Q_l^m over m = 0..=l.
        let mut row_prev: Vec<f64> = Vec::new();
        let mut row_prev2: Vec<f64> = Vec::new();
        let mut diag = 1.0; // Q_m^m for the current l = m
        let (sin_m_phi, cos_m_phi): (Vec<f64>, Vec<f64>) = (0..=max_l)
            .map(|m| (m as f64 * phi).sin_cos())
            .unzip();

        for l in 0..=max_l {
            let mut row = vec![0.0; l as usize + 1];
            if l > 0 {
                diag = diag_step(l, sin_theta, diag);
            }
            row[l as usize] = diag;
            if l >= 1 {
                let m = l - 1;
                row[m as usize] = ((2 * m + 3) as f64).sqrt() * cos_theta * row_prev[m as usize];
            }
            for m in 0..l.saturating_sub(1) {
                row[m as usize] = up_step(
                    l,
                    m,
                    cos_theta,
                    row_prev[m as usize],
                    row_prev2[m as usize],
                );
            }
            for order in -(l as i32)..=(l as i32) {
                if out.len() >= count {
                    return;
                }
                let m_abs = order.unsigned_abs() as usize;
                let q = row[m_abs];
                out.push(match order.cmp(&0) {
                    std::cmp::Ordering::Equal => q,
                    std::cmp::Ordering::Greater => SQRT_2 * q * cos_m_phi[m_abs],
                    std::cmp::Ordering::Less => SQRT_2 * q * sin_m_phi[m_abs],
                });
            }
            row_prev2 = std::mem::take(&mut row_prev);
            row_prev = row;
        }
    }

    fn geodesic_distance(&self, x: &Point, y: &Point) -> f64 {
        let dot: f64 = x.coords.iter().zip(&y.coords).map(|(a, b)| a * b).sum();
        dot.clamp(-1.0, 1.0).acos()
    }

    fn validate_point(&self, x: &Point) -> Result<()> {
        if x.coords.len() != 3 {
            return Err(Error::InvalidPoint {
                manifold: self.kind().name(),
                reason: format!("expected 3 coordinates, got {}", x.coords.len()),
            });
        }
        if x.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint {
                manifold: self.kind().name(),
                reason: "non-finite coordinate".into(),
            });
        }
        let norm: f64 = x.coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPoint {
                manifold: self.kind().name(),
                reason: format!("vector norm {norm} deviates from 1 by more than 1e-12"),
            });
        }
        Ok(())
    }

    fn canonicalize_point(&self, x: &Point) -> Point {
        let norm: f64 = x.coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Point::new(vec![0.0, 0.0, 1.0]);
        }
        Point::new(x.coords.iter().map(|c| c / norm).collect())
    }

    fn sample_uniform(&self, rng: &mut dyn RngCore) -> Point {
        loop {
            let v: Vec<f64> = (0..3).map(|_| StandardNormal.sample(rng)).collect();
            let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return Point::new(v.into_iter().map(|c| c / norm).collect());
            }
        }
    }

    fn equal_measure_partition(&self, regions: usize) -> Result<Partition> {
        sphere_equal_measure_partition(regions)
    }

    fn integration_grid(&self, resolution: usize) -> Vec<(Point, f64)> {
        let n_theta = resolution;
        let n_phi = 2 * resolution;
        let (nodes, weights) = gauss_legendre_cached(n_theta);
        let mut grid = Vec::with_capacity(n_theta * n_phi + 2);
        for (z, wz) in nodes.iter().zip(weights) {
            let sin_theta = (1.0 - z * z).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
                grid.push((
                    Point::new(vec![sin_theta * phi.cos(), sin_theta * phi.sin(), *z]),
                    wz / 2.0 / n_phi as f64,
                ));
            }
        }
        // Zero-weight poles so sup-norm scans see the zonal peak.
        grid.push((Point::new(vec![0.0, 0.0, 1.0]), 0.0));
        grid.push((Point::new(vec![0.0, 0.0, -1.0]), 0.0));
        grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::legendre_p;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    #[test]
    fn spectrum_degrees_and_multiplicities() {
        let s = UnitSphere::new();
        let spec = s.enumerate_spectrum(4);
        assert_abs_diff_eq!(spec[0].lambda, 0.0);
        for p in &spec[1..4] {
            assert_abs_diff_eq!(p.lambda, 2.0f64.sqrt(), epsilon = 1e-15);
        }
        let spec = s.enumerate_spectrum(16);
        assert_eq!(
            spec.iter().filter(|p| (p.lambda - 6f64.sqrt()).abs() < 1e-12).count(),
            5
        );
    }

    #[test]
    fn constant_eigenfunction_is_one() {
        let s = UnitSphere::new();
        let label = EigenLabel::SphereHarmonic { degree: 0, order: 0 };
        let p = Point::new(vec![0.6, 0.0, 0.8]);
        assert_abs_diff_eq!(s.eval_eigenfunction(&label, &p).unwrap(), 1.0);
    }

    #[test]
    fn addition_theorem_block_sums() {
        // Oracle: sum over orders of |Y_{l,m}|^2 = (2l+1) P_l(1) = 2l+1,
        // with P_l from the independent Legendre recurrence.
        let s = UnitSphere::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12345);
        for l in 0..=15u32 {
            for _ in 0..20 {
                let x = s.sample_uniform(&mut rng);
                let mut sum = 0.0;
                for order in -(l as i32)..=(l as i32) {
                    let label = EigenLabel::SphereHarmonic { degree: l, order };
                    let v = s.eval_eigenfunction(&label, &x).unwrap();
                    sum += v * v;
                }
                let expected = (2 * l + 1) as f64 * legendre_p(l as usize, 1.0);
                assert!(
                    (sum - expected).abs() <= 1e-9,
                    "block sum off at l={l}: {sum} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn cross_point_addition_theorem() {
        // Sum over orders of Y(x) Y(y) = (2l+1) P_l(x.y).
        let s = UnitSphere::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for l in [1u32, 3, 7, 12] {
            let x = s.sample_uniform(&mut rng);
            let y = s.sample_uniform(&mut rng);
            let mut sum = 0.0;
            for order in -(l as i32)..=(l as i32) {
                let label = EigenLabel::SphereHarmonic { degree: l, order };
                sum += s.eval_eigenfunction(&label, &x).unwrap()
                    * s.eval_eigenfunction(&label, &y).unwrap();
            }
            let dot: f64 = x.coords.iter().zip(&y.coords).map(|(a, b)| a * b).sum();
            let expected = (2 * l + 1) as f64 * legendre_p(l as usize, dot);
            assert_abs_diff_eq!(sum, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn eval_prefix_agrees_with_pointwise() {
        let s = UnitSphere::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let x = s.sample_uniform(&mut rng);
        let spec = s.enumerate_spectrum(50);
        let mut prefix = Vec::new();
        s.eval_prefix(&x, 50, &mut prefix);
        for (i, pair) in spec.iter().enumerate() {
            let direct = s.eval_eigenfunction(&pair.label, &x).unwrap();
            assert_abs_diff_eq!(prefix[i], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn zonal_peak_at_pole() {
        let s = UnitSphere::new();
        let pole = Point::new(vec![0.0, 0.0, 1.0]);
        let label = EigenLabel::SphereHarmonic { degree: 10, order: 0 };
        let v = s.eval_eigenfunction(&label, &pole).unwrap();
        assert_abs_diff_eq!(v, 21.0f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn antipodal_distance() {
        let s = UnitSphere::new();
        let d = s.geodesic_distance(
            &Point::new(vec![0.0, 0.0, 1.0]),
            &Point::new(vec![0.0, 0.0, -1.0]),
        );
        assert_abs_diff_eq!(d, std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn orthonormal_on_product_grid() {
        let s = UnitSphere::new();
        let grid = s.integration_grid(16);
        let n = 16usize; // pairs up to index 15 => degrees <= 3
        let mut gram = vec![vec![0.0; n]; n];
        let mut vals = Vec::new();
        for (p, w) in &grid {
            s.eval_prefix(p, n, &mut vals);
            for i in 0..n {
                for j in i..n {
                    gram[i][j] += w * vals[i] * vals[j];
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[i][j] - expected).abs() < 1e-12,
                    "gram[{i}][{j}] = {}",
                    gram[i][j]
                );
            }
        }
    }
}
