//! The Cassels–Montgomery spectral functional and its companions.
//!
//! For a weighted point set {x_j, a_j} and spectral index X,
//!
//!   S = sum_{m=0}^{X} | sum_j a_j phi_m(x_j) |^2 ,
//!
//! which always dominates both `(sum a_j)^2` (the m = 0 term alone) and,
//! empirically, `C X sum a_j^2`. Two truncations are exposed and reports
//! name which one was used: [`spectral_sum`] cuts at *index* X, while
//! [`smoothed_sum`] weights by `H(lambda_m / lambda_X)` and therefore cuts
//! at *frequency* `lambda_X` (H vanishes at and beyond 1).
//!
//! All reductions are compensated and run in deterministic order, so
//! results are bitwise reproducible for a fixed seed and configuration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldKind, Point};
use crate::radial::KernelSuite;
use crate::sum::{pairwise_sum, KahanSum};

/// Points plus strictly positive weights on one manifold.
#[derive(Clone, Debug)]
pub struct WeightedPointSet {
    manifold: ManifoldKind,
    points: Vec<Point>,
    weights: Vec<f64>,
    sum_w: f64,
    sum_w2: f64,
}

impl WeightedPointSet {
    /// Build a point set; `weights = None` means uniform `1/N`. Points are
    /// canonicalized (mod-1 / renormalized) and validated.
    pub fn new(
        manifold: ManifoldKind,
        points: Vec<Point>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "a point set needs at least one point".into(),
            ));
        }
        let m = manifold.build()?;
        let n = points.len();
        let weights = match weights {
            Some(w) => {
                if w.len() != n {
                    return Err(Error::InvalidWeights(format!(
                        "{} weights for {} points",
                        w.len(),
                        n
                    )));
                }
                if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(Error::InvalidWeights(
                        "weights must be finite and strictly positive".into(),
                    ));
                }
                w
            }
            None => vec![1.0 / n as f64; n],
        };
        let points: Vec<Point> = points
            .into_iter()
            .map(|p| {
                let canon = m.canonicalize_point(&p);
                m.validate_point(&canon).map(|_| canon)
            })
            .collect::<Result<_>>()?;
        let sum_w = KahanSum::sum_iter(weights.iter().copied());
        let sum_w2 = KahanSum::sum_iter(weights.iter().map(|w| w * w));
        Ok(Self {
            manifold,
            points,
            weights,
            sum_w,
            sum_w2,
        })
    }

    pub fn manifold(&self) -> ManifoldKind {
        self.manifold
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum_w(&self) -> f64 {
        self.sum_w
    }

    pub fn sum_w2(&self) -> f64 {
        self.sum_w2
    }
}

/// Report for one functional evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub manifold: String,
    #[serde(rename = "X")]
    pub x: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "S")]
    pub s: f64,
    pub sum_w: f64,
    pub sum_w2: f64,
    /// (sum a_j)^2, the m = 0 term.
    pub lower_trivial: f64,
    /// S / (X sum a_j^2); absent when X = 0.
    pub ratio: Option<f64>,
    /// "index" or "frequency".
    pub truncation: String,
    pub seed: Option<u64>,
}

/// Inner sums `sum_j a_j phi_m(x_j)` for m = 0..count-1, in index order.
fn inner_sums(m: &dyn Manifold, pts: &WeightedPointSet, count: usize) -> Vec<f64> {
    let mut acc = vec![KahanSum::new(); count];
    let mut buf = Vec::new();
    for (p, &w) in pts.points().iter().zip(pts.weights()) {
        m.eval_prefix(p, count, &mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            a.add(w * v);
        }
    }
    acc.into_iter().map(|a| a.value()).collect()
}

/// S = sum_{m=0}^{X} |sum_j a_j phi_m(x_j)|^2, truncated at index X.
pub fn spectral_sum(pts: &WeightedPointSet, x: usize) -> Result<BoundReport> {
    let m = pts.manifold().build()?;
    let inner = inner_sums(m.as_ref(), pts, x + 1);
    let mut total = KahanSum::new();
    for v in &inner {
        total.add(v * v);
    }
    let s = total.value();
    if s.abs() > 1e300 {
        log::warn!("spectral sum exceeds 1e300; expect overflow artifacts");
    }
    Ok(BoundReport {
        manifold: pts.manifold().name(),
        x,
        n: pts.len(),
        s,
        sum_w: pts.sum_w(),
        sum_w2: pts.sum_w2(),
        lower_trivial: pts.sum_w() * pts.sum_w(),
        ratio: if x >= 1 {
            Some(s / (x as f64 * pts.sum_w2()))
        } else {
            None
        },
        truncation: "index".to_string(),
        seed: None,
    })
}

/// Kernel-smoothed sum `sum_m H(lambda_m/lambda_X) |sum_j a_j phi_m(x_j)|^2`,
/// truncated at frequency `lambda_X` (where H's support ends).
pub fn smoothed_sum(pts: &WeightedPointSet, suite: &KernelSuite) -> Result<f64> {
    let m = pts.manifold().build()?;
    let spectrum = m.spectrum_up_to(suite.lambda_x);
    let inner = inner_sums(m.as_ref(), pts, spectrum.len());
    let h = suite.h();
    let mut total = KahanSum::new();
    for (pair, v) in spectrum.iter().zip(&inner) {
        let weight = h.eval(pair.lambda / suite.lambda_x);
        total.add(weight * v * v);
    }
    Ok(total.value())
}

/// Frequency of the X-th eigenpair, the natural `lambda_X` for a suite.
pub fn lambda_for_index(kind: &ManifoldKind, x: usize) -> Result<f64> {
    let m = kind.build()?;
    Ok(m.enumerate_spectrum(x + 1).last().unwrap().lambda)
}

/// Direct lattice-sum oracle for the smoothed kernel on the torus:
/// `F(x, y) = sum_{k in Z^d} H(2 pi |k| / lambda_X) cos(2 pi k.(x-y))`.
/// Independent of the eigenbasis path: double-summing this kernel over a
/// point set must match [`smoothed_sum`].
pub fn torus_kernel_oracle(
    d: usize,
    suite: &KernelSuite,
    x: &Point,
    y: &Point,
) -> Result<f64> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidParameter(
            "the lattice oracle supports torus dimensions 1..=3".into(),
        ));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let radius = suite.lambda_x / two_pi;
    if radius > 60.0 {
        return Err(Error::LatticeBoundExceeded {
            requested: radius,
            max: 60.0,
        });
    }
    let h = suite.h();
    let diff: Vec<f64> = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| a - b)
        .collect();
    let bound = radius.ceil() as i64;
    let mut total = KahanSum::new();
    let mut k = vec![-bound; d];
    'outer: loop {
        let norm2: i64 = k.iter().map(|&c| c * c).sum();
        let lambda = two_pi * (norm2 as f64).sqrt();
        if lambda < suite.lambda_x {
            let weight = h.eval(lambda / suite.lambda_x);
            if weight != 0.0 {
                let dot: f64 = k.iter().zip(&diff).map(|(&ki, &di)| ki as f64 * di).sum();
                total.add(weight * (two_pi * dot).cos());
            }
        }
        for axis in (0..d).rev() {
            if k[axis] < bound {
                k[axis] += 1;
                for c in k.iter_mut().skip(axis + 1) {
                    *c = -bound;
                }
                continue 'outer;
            }
        }
        break;
    }
    Ok(total.value())
}

/// Monte Carlo check of the mean-value identity: for i.i.d. uniform points,
/// E[ sum_{m=1}^{X} |sum_j a_j phi_m(x_j)|^2 ] = X sum_j a_j^2.
#[derive(Clone, Debug, Serialize)]
pub struct ExpectationReport {
    pub manifold: String,
    #[serde(rename = "X")]
    pub x: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_err: f64,
    pub target: f64,
    /// Existence witness: the smallest value seen across trials.
    pub min: f64,
}

pub fn expectation_mc(
    kind: &ManifoldKind,
    x: usize,
    weights: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ExpectationReport> {
    if trials < 100 {
        return Err(Error::InvalidParameter(
            "expectation check needs at least 100 trials".into(),
        ));
    }
    if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidWeights(
            "weights must be nonempty, finite and strictly positive".into(),
        ));
    }
    let m = kind.build()?;
    let n = weights.len();
    let count = x + 1;
    // One counter-based stream per trial: results do not depend on
    // scheduling or thread count.
    let phis: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let mut acc = vec![KahanSum::new(); count];
            let mut buf = Vec::new();
            for &w in weights {
                let p = m.sample_uniform(&mut rng);
                m.eval_prefix(&p, count, &mut buf);
                for (a, v) in acc.iter_mut().zip(&buf) {
                    a.add(w * v);
                }
            }
            let mut phi = KahanSum::new();
            for a in acc.iter().skip(1) {
                let v = a.value();
                phi.add(v * v);
            }
            phi.value()
        })
        .collect();
    let mean = pairwise_sum(&phis) / trials as f64;
    let sq_dev: Vec<f64> = phis.iter().map(|p| (p - mean) * (p - mean)).collect();
    let variance = pairwise_sum(&sq_dev) / (trials as f64 - 1.0);
    let std_err = (variance / trials as f64).sqrt();
    let min = phis.iter().cloned().fold(f64::INFINITY, f64::min);
    let sum_w2 = KahanSum::sum_iter(weights.iter().map(|w| w * w));
    Ok(ExpectationReport {
        manifold: kind.name(),
        x,
        n,
        trials,
        seed,
        mean,
        std_err,
        target: x as f64 * sum_w2,
        min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::build_kernel_suite;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn uniform_set(kind: ManifoldKind, coords: Vec<Vec<f64>>) -> WeightedPointSet {
        let points = coords.into_iter().map(Point::new).collect();
        WeightedPointSet::new(kind, points, None).unwrap()
    }

    #[test]
    fn rejects_bad_weights() {
        let pts = vec![Point::new(vec![0.25])];
        assert!(WeightedPointSet::new(ManifoldKind::Torus(1), pts.clone(), Some(vec![0.0])).is_err());
        assert!(
            WeightedPointSet::new(ManifoldKind::Torus(1), pts.clone(), Some(vec![-1.0])).is_err()
        );
        assert!(WeightedPointSet::new(ManifoldKind::Torus(1), pts, Some(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn single_point_even_x_identity() {
        // cos^2 + sin^2 pairs: S = X + 1 exactly for one unit-weight point.
        let pts = WeightedPointSet::new(
            ManifoldKind::Torus(1),
            vec![Point::new(vec![0.378])],
            Some(vec![1.0]),
        )
        .unwrap();
        for x in [2usize, 10, 64, 200] {
            let report = spectral_sum(&pts, x).unwrap();
            assert_abs_diff_eq!(report.s, (x + 1) as f64, epsilon = 1e-10);
        }
    }

    #[test]
    fn x_zero_gives_weight_sum_squared() {
        let pts = uniform_set(
            ManifoldKind::Torus(2),
            vec![vec![0.1, 0.9], vec![0.3, 0.3], vec![0.7, 0.2]],
        );
        let report = spectral_sum(&pts, 0).unwrap();
        assert_abs_diff_eq!(report.s, 1.0, epsilon = 1e-12);
        assert!(report.ratio.is_none());
    }

    #[test]
    fn two_opposite_points_cancel() {
        // Points {0, 1/2}, weights {1,1}: m=1,2 terms cancel, S = 4.
        let pts = WeightedPointSet::new(
            ManifoldKind::Torus(1),
            vec![Point::new(vec![0.0]), Point::new(vec![0.5])],
            Some(vec![1.0, 1.0]),
        )
        .unwrap();
        let report = spectral_sum(&pts, 2).unwrap();
        assert_abs_diff_eq!(report.s, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn sphere_single_point_addition_theorem() {
        let pts = WeightedPointSet::new(
            ManifoldKind::Sphere2,
            vec![Point::new(vec![0.48, -0.6, 0.64])],
            Some(vec![1.0]),
        )
        .unwrap();
        for l in [1usize, 4, 9] {
            let x = (l + 1) * (l + 1) - 1;
            let report = spectral_sum(&pts, x).unwrap();
            assert_abs_diff_eq!(report.s, ((l + 1) * (l + 1)) as f64, epsilon = 1e-8);
        }
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = ManifoldKind::Torus(2).build().unwrap();
        let points: Vec<Point> = (0..7).map(|_| m.sample_uniform(&mut rng)).collect();
        let weights: Vec<f64> = (0..7).map(|_| 0.5 + rng.gen::<f64>()).collect();
        let base = WeightedPointSet::new(ManifoldKind::Torus(2), points.clone(), Some(weights.clone()))
            .unwrap();
        let t = 3.25f64;
        let scaled = WeightedPointSet::new(
            ManifoldKind::Torus(2),
            points,
            Some(weights.iter().map(|w| t * w).collect()),
        )
        .unwrap();
        let r1 = spectral_sum(&base, 20).unwrap();
        let r2 = spectral_sum(&scaled, 20).unwrap();
        assert_abs_diff_eq!(r2.s, t * t * r1.s, epsilon = 1e-9 * r2.s.abs());
        assert_abs_diff_eq!(r1.ratio.unwrap(), r2.ratio.unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn trivial_lower_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [ManifoldKind::Torus(1), ManifoldKind::Torus(2), ManifoldKind::Sphere2] {
            let m = kind.build().unwrap();
            for _ in 0..10 {
                let n = rng.gen_range(1..20);
                let points: Vec<Point> = (0..n).map(|_| m.sample_uniform(&mut rng)).collect();
                let weights: Vec<f64> = (0..n).map(|_| 0.1 + rng.gen::<f64>()).collect();
                let pts = WeightedPointSet::new(kind, points, Some(weights)).unwrap();
                let report = spectral_sum(&pts, rng.gen_range(1..60)).unwrap();
                let floor = report.lower_trivial;
                assert!(report.s >= floor - 1e-9 * floor, "S below the m=0 floor");
            }
        }
    }

    #[test]
    fn smoothed_sum_bounded_by_sharp_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let kind = ManifoldKind::Torus(2);
        let m = kind.build().unwrap();
        let points: Vec<Point> = (0..6).map(|_| m.sample_uniform(&mut rng)).collect();
        let pts = WeightedPointSet::new(kind, points, None).unwrap();
        let x = 40usize;
        let lambda_x = lambda_for_index(&kind, x).unwrap();
        let suite = build_kernel_suite(2, lambda_x, 0.5).unwrap();
        let smoothed = smoothed_sum(&pts, &suite).unwrap();
        let sharp = spectral_sum(&pts, x).unwrap().s;
        assert!(
            smoothed <= sharp + 1e-9 * sharp.abs(),
            "smoothed {smoothed} exceeds sharp {sharp}"
        );
    }

    #[test]
    fn degenerate_constant_kernel_reproduces_sharp_sum() {
        // Replacing H by an all-ones profile truncated the same way turns
        // the smoothed sum into the sharp frequency-truncated sum.
        let kind = ManifoldKind::Torus(1);
        let m = kind.build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: Vec<Point> = (0..4).map(|_| m.sample_uniform(&mut rng)).collect();
        let pts = WeightedPointSet::new(kind, points, None).unwrap();
        let lambda_x = lambda_for_index(&kind, 20).unwrap();
        let spectrum = m.spectrum_up_to(lambda_x);
        let mut expected = KahanSum::new();
        let inner = super::inner_sums(m.as_ref(), &pts, spectrum.len());
        for (pair, v) in spectrum.iter().zip(&inner) {
            if pair.lambda < lambda_x {
                expected.add(v * v);
            }
        }
        // Same truncation with an explicit indicator profile.
        let mut total = KahanSum::new();
        for (pair, v) in spectrum.iter().zip(&inner) {
            let weight = if pair.lambda / lambda_x < 1.0 { 1.0 } else { 0.0 };
            total.add(weight * v * v);
        }
        assert_abs_diff_eq!(total.value(), expected.value(), epsilon = 1e-13);
    }

    #[test]
    fn single_point_smoothed_sum_is_kernel_trace() {
        // N = 1, weight 1: the smoothed sum equals sum_m H(lambda_m/lambda_X),
        // which is at least the m = 0 term H(0) = 1.
        let kind = ManifoldKind::Torus(1);
        let pts = WeightedPointSet::new(kind, vec![Point::new(vec![0.77])], Some(vec![1.0]))
            .unwrap();
        let lambda_x = lambda_for_index(&kind, 16).unwrap();
        let suite = build_kernel_suite(1, lambda_x, 0.5).unwrap();
        let smoothed = smoothed_sum(&pts, &suite).unwrap();
        assert!(smoothed >= 1.0 - 1e-8, "trace {smoothed} below H(0)");
    }

    #[test]
    fn oracle_matches_smoothed_sum() {
        let kind = ManifoldKind::Torus(2);
        let m = kind.build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let n = rng.gen_range(1..6);
            let points: Vec<Point> = (0..n).map(|_| m.sample_uniform(&mut rng)).collect();
            let weights: Vec<f64> = (0..n).map(|_| 0.2 + rng.gen::<f64>()).collect();
            let pts = WeightedPointSet::new(kind, points, Some(weights)).unwrap();
            let lambda_x = 2.0 * std::f64::consts::PI * rng.gen_range(3.0..8.0);
            let suite = build_kernel_suite(2, lambda_x, 0.5).unwrap();
            let smoothed = smoothed_sum(&pts, &suite).unwrap();
            let mut double = KahanSum::new();
            for (i, xi) in pts.points().iter().enumerate() {
                for (j, xj) in pts.points().iter().enumerate() {
                    let f = torus_kernel_oracle(2, &suite, xi, xj).unwrap();
                    double.add(pts.weights()[i] * pts.weights()[j] * f);
                }
            }
            let rel = (smoothed - double.value()).abs() / smoothed.abs().max(1e-300);
            assert!(rel < 1e-8, "oracle mismatch: rel {rel}");
        }
    }

    #[test]
    fn oracle_is_symmetric() {
        let suite = build_kernel_suite(2, 20.0, 0.5).unwrap();
        let x = Point::new(vec![0.3, 0.8]);
        let y = Point::new(vec![0.71, 0.05]);
        let a = torus_kernel_oracle(2, &suite, &x, &y).unwrap();
        let b = torus_kernel_oracle(2, &suite, &y, &x).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn oracle_constant_term_only() {
        // lambda_X so small that only k = 0 survives: F(x, x) = H(0) = 1.
        let suite = build_kernel_suite(2, 1.0, 0.5).unwrap();
        let x = Point::new(vec![0.2, 0.4]);
        let v = torus_kernel_oracle(2, &suite, &x, &x).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn oracle_rejects_large_lattice() {
        let suite = build_kernel_suite(2, 2.0 * std::f64::consts::PI * 61.0, 0.5).unwrap();
        let x = Point::new(vec![0.0, 0.0]);
        assert!(matches!(
            torus_kernel_oracle(2, &suite, &x, &x),
            Err(Error::LatticeBoundExceeded { .. })
        ));
    }

    #[test]
    fn expectation_matches_target() {
        let weights = vec![0.2; 5];
        let report =
            expectation_mc(&ManifoldKind::Torus(1), 10, &weights, 10_000, 424_242).unwrap();
        // Target = 10 * 5 * 0.04 = 2.
        assert_abs_diff_eq!(report.target, 2.0, epsilon = 1e-12);
        assert!(
            (report.mean - report.target).abs() <= 4.0 * report.std_err,
            "mean {} target {} stderr {}",
            report.mean,
            report.target,
            report.std_err
        );
        assert!(report.min <= report.mean + 1e-12);
    }

    #[test]
    fn expectation_x_zero_is_zero() {
        let report =
            expectation_mc(&ManifoldKind::Torus(1), 0, &[0.5, 0.5], 200, 7).unwrap();
        assert_eq!(report.mean, 0.0);
        assert_eq!(report.min, 0.0);
    }

    #[test]
    fn expectation_deterministic_for_seed() {
        let a = expectation_mc(&ManifoldKind::Sphere2, 8, &[0.25; 4], 500, 99).unwrap();
        let b = expectation_mc(&ManifoldKind::Sphere2, 8, &[0.25; 4], 500, 99).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.min.to_bits(), b.min.to_bits());
    }

    #[test]
    fn expectation_requires_enough_trials() {
        assert!(expectation_mc(&ManifoldKind::Torus(1), 5, &[1.0], 50, 1).is_err());
    }
}
