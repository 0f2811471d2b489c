//! Flat torus `[0,1)^d` with the real trigonometric eigenbasis.
//!
//! Frequencies come from the integer lattice: the pair `{k, -k}` spans a
//! two-dimensional eigenspace with frequency `2 pi |k|`, realized by
//! `sqrt(2) cos(2 pi k.x)` and `sqrt(2) sin(2 pi k.x)`. Only the
//! lexicographically positive representative of each pair is enumerated,
//! cosine before sine, ordered by (|k|^2, lex k) so ties break
//! deterministically.

use std::f64::consts::PI;
use std::sync::RwLock;

use rand::RngCore;

use super::{EigenLabel, EigenPair, Manifold, ManifoldKind, Point, TrigPhase};
use crate::error::{Error, Result};
use crate::partition::{torus_equal_measure_partition, Partition};

const TWO_PI: f64 = 2.0 * PI;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

pub struct FlatTorus {
    dim: usize,
    kind: ManifoldKind,
    // Longest enumerated spectrum prefix; extended on demand, never shrunk.
    spectrum_cache: RwLock<Vec<EigenPair>>,
}

impl FlatTorus {
    pub fn new(dim: usize, kind: ManifoldKind) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self {
            dim,
            kind,
            spectrum_cache: RwLock::new(Vec::new()),
        })
    }

    fn ensure_cache(&self, count: usize) {
        {
            let cache = self.spectrum_cache.read().unwrap();
            if cache.len() >= count {
                return;
            }
        }
        let mut cache = self.spectrum_cache.write().unwrap();
        if cache.len() >= count {
            return;
        }
        // Box radius large enough that 1 + 2 * #representatives covers count.
        let mut radius = 2i64;
        loop {
            let reps = lattice_representatives(self.dim, radius);
            if 1 + 2 * reps.len() >= count {
                *cache = build_pairs(&reps, usize::MAX);
                return;
            }
            radius *= 2;
        }
    }
}

/// All lexicographically positive lattice vectors `k` with
/// `0 < |k|^2 <= radius^2`, sorted by `(|k|^2, lex k)`. The `|k|_inf <= radius`
/// box contains every such vector, so the listing is complete.
fn lattice_representatives(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let bound2 = radius * radius;
    let mut reps: Vec<(i64, Vec<i64>)> = Vec::new();
    let mut k = vec![-radius; dim];
    'outer: loop {
        let norm2: i64 = k.iter().map(|&c| c * c).sum();
        if norm2 > 0 && norm2 <= bound2 && lex_positive(&k) {
            reps.push((norm2, k.clone()));
        }
        // Odometer increment.
        for axis in (0..dim).rev() {
            if k[axis] < radius {
                k[axis] += 1;
                for c in k.iter_mut().skip(axis + 1) {
                    *c = -radius;
                }
                continue 'outer;
            }
        }
        break;
    }
    reps.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    reps.into_iter().map(|(_, k)| k).collect()
}

fn lex_positive(k: &[i64]) -> bool {
    for &c in k {
        if c > 0 {
            return true;
        }
        if c < 0 {
            return false;
        }
    }
    false
}

fn build_pairs(reps: &[Vec<i64>], limit: usize) -> Vec<EigenPair> {
    let dim = reps.first().map_or(1, |k| k.len());
    let mut pairs = Vec::with_capacity((1 + 2 * reps.len()).min(limit));
    pairs.push(EigenPair {
        index: 0,
        lambda: 0.0,
        label: EigenLabel::TorusTrig {
            freq: vec![0; dim],
            phase: TrigPhase::Cos,
        },
    });
    'fill: for k in reps {
        let norm2: i64 = k.iter().map(|&c| c * c).sum();
        let lambda = TWO_PI * (norm2 as f64).sqrt();
        for phase in [TrigPhase::Cos, TrigPhase::Sin] {
            if pairs.len() >= limit {
                break 'fill;
            }
            pairs.push(EigenPair {
                index: pairs.len(),
                lambda,
                label: EigenLabel::TorusTrig {
                    freq: k.clone(),
                    phase,
                },
            });
        }
    }
    pairs
}

fn reduce_mod_1(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid can return exactly 1.0 for tiny negative inputs.
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl Manifold for FlatTorus {
    fn kind(&self) -> ManifoldKind {
        self.kind
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn enumerate_spectrum(&self, count: usize) -> Vec<EigenPair> {
        self.ensure_cache(count);
        let cache = self.spectrum_cache.read().unwrap();
        cache[..count.min(cache.len())].to_vec()
    }

    fn spectrum_up_to(&self, lambda_max: f64) -> Vec<EigenPair> {
        if lambda_max < 0.0 {
            return Vec::new();
        }
        let r = lambda_max / TWO_PI;
        let radius = r.ceil() as i64 + 1;
        let reps: Vec<Vec<i64>> = lattice_representatives(self.dim, radius)
            .into_iter()
            .filter(|k| {
                let norm2: i64 = k.iter().map(|&c| c * c).sum();
                TWO_PI * (norm2 as f64).sqrt() <= lambda_max
            })
            .collect();
        build_pairs(&reps, usize::MAX)
    }

    fn eval_eigenfunction(&self, label: &EigenLabel, x: &Point) -> Result<f64> {
        let EigenLabel::TorusTrig { freq, phase } = label else {
            return Err(Error::LabelMismatch {
                manifold: self.kind.name(),
                label: label.to_string(),
            });
        };
        if freq.len() != self.dim {
            return Err(Error::LabelMismatch {
                manifold: self.kind.name(),
                label: label.to_string(),
            });
        }
        if freq.iter().all(|&k| k == 0) {
            return Ok(match phase {
                TrigPhase::Cos => 1.0,
                TrigPhase::Sin => 0.0,
            });
        }
        let dot: f64 = freq
            .iter()
            .zip(&x.coords)
            .map(|(&k, &c)| k as f64 * c)
            .sum();
        let theta = TWO_PI * dot;
        Ok(match phase {
            TrigPhase::Cos => SQRT_2 * theta.cos(),
            TrigPhase::Sin => SQRT_2 * theta.sin(),
        })
    }

    fn eval_prefix(&self, x: &Point, count: usize, out: &mut Vec<f64>) {
        self.ensure_cache(count);
        let cache = self.spectrum_cache.read().unwrap();
        out.clear();
        out.reserve(count);
        let mut i = 0;
        while i < count {
            let EigenLabel::TorusTrig { freq, .. } = &cache[i].label else {
                unreachable!("torus cache holds torus labels");
            };
            if freq.iter().all(|&k| k == 0) {
                out.push(1.0);
                i += 1;
                continue;
            }
            let dot: f64 = freq
                .iter()
                .zip(&x.coords)
                .map(|(&k, &c)| k as f64 * c)
                .sum();
            let (s, c) = (TWO_PI * dot).sin_cos();
            // Cos entry, then its Sin partner if still within the prefix.
            out.push(SQRT_2 * c);
            i += 1;
            if i < count {
                out.push(SQRT_2 * s);
                i += 1;
            }
        }
    }

    fn geodesic_distance(&self, x: &Point, y: &Point) -> f64 {
        let mut sum2 = 0.0;
        for (&a, &b) in x.coords.iter().zip(&y.coords) {
            let d = (a - b).rem_euclid(1.0);
            let d = d.min(1.0 - d);
            sum2 += d * d;
        }
        sum2.sqrt()
    }

    fn validate_point(&self, x: &Point) -> Result<()> {
        if x.coords.len() != self.dim {
            return Err(Error::InvalidPoint {
                manifold: self.kind.name(),
                reason: format!("expected {} coordinates, got {}", self.dim, x.coords.len()),
            });
        }
        if x.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint {
                manifold: self.kind.name(),
                reason: "non-finite coordinate".into(),
            });
        }
        Ok(())
    }

    fn canonicalize_point(&self, x: &Point) -> Point {
        Point::new(x.coords.iter().map(|&c| reduce_mod_1(c)).collect())
    }

    fn sample_uniform(&self, rng: &mut dyn RngCore) -> Point {
        use rand::Rng;
        Point::new((0..self.dim).map(|_| rng.gen::<f64>()).collect())
    }

    fn equal_measure_partition(&self, regions: usize) -> Result<Partition> {
        torus_equal_measure_partition(self.kind, self.dim, regions)
    }

    fn integration_grid(&self, resolution: usize) -> Vec<(Point, f64)> {
        let g = resolution;
        let total = g.pow(self.dim as u32);
        let w = 1.0 / total as f64;
        let mut grid = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.dim];
        loop {
            grid.push((
                Point::new(idx.iter().map(|&i| i as f64 / g as f64).collect()),
                w,
            ));
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return grid;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < g {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}
