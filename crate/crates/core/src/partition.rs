//! Equal-measure partitions with certified inner/outer ball radii.
//!
//! Torus: recursive slab construction. The first axis is cut into
//! near-`Y^(1/d)` slabs whose widths are exact multiples of `1/Y`, and each
//! slab's cross-section is partitioned recursively, giving axis-aligned
//! boxes of measure exactly `1/Y` with aspect ratio bounded by 3.
//!
//! Sphere: polar caps plus zonal collars split into equal-area azimuth
//! sectors. Collar boundaries are solved from the closed-form cap area
//! `(1 - cos theta)/2`, so every region has analytic measure `1/Y`.
//!
//! Boundary membership is half-open on the increasing side of each
//! coordinate/angle; poles belong to their caps.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::WeightedPointSet;
use crate::manifold::{ManifoldKind, Point};
use crate::sum::KahanSum;

#[derive(Clone, Debug, Serialize)]
pub enum RegionShape {
    /// Axis-aligned half-open box in torus chart coordinates.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Polar cap: colatitude in [0, theta] (north) or [theta, pi] (south).
    Cap { north: bool, theta: f64 },
    /// Collar sector: colatitude band x azimuth interval, half-open above.
    Sector {
        theta: (f64, f64),
        phi: (f64, f64),
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub index: usize,
    pub center: Point,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Analytic measure computed from the shape descriptor.
    pub measure: f64,
    pub shape: RegionShape,
}

#[derive(Clone, Debug, Serialize)]
pub struct Partition {
    pub manifold: ManifoldKind,
    pub regions: Vec<Region>,
}

impl Partition {
    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    /// Index of the unique region containing `p` (point assumed canonical).
    pub fn locate(&self, p: &Point) -> Option<usize> {
        self.regions
            .iter()
            .position(|r| region_contains(&r.shape, p))
    }

    /// All regions claiming `p`; disjointness means this has length 1.
    pub fn claimants(&self, p: &Point) -> Vec<usize> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, r)| region_contains(&r.shape, p))
            .map(|(i, _)| i)
            .collect()
    }
}

fn region_contains(shape: &RegionShape, p: &Point) -> bool {
    match shape {
        RegionShape::Box { lower, upper } => lower
            .iter()
            .zip(upper)
            .zip(&p.coords)
            .all(|((lo, hi), c)| *lo <= *c && *c < *hi),
        RegionShape::Cap { north, theta } => {
            let colat = p.coords[2].clamp(-1.0, 1.0).acos();
            if *north {
                colat < *theta
            } else {
                colat >= *theta
            }
        }
        RegionShape::Sector { theta, phi } => {
            let colat = p.coords[2].clamp(-1.0, 1.0).acos();
            if !(theta.0 <= colat && colat < theta.1) {
                return false;
            }
            let mut az = p.coords[1].atan2(p.coords[0]);
            if az < 0.0 {
                az += 2.0 * PI;
            }
            if az >= 2.0 * PI {
                az = 0.0;
            }
            phi.0 <= az && az < phi.1
        }
    }
}

// ---------------------------------------------------------------------------
// Torus construction
// ---------------------------------------------------------------------------

fn torus_boxes(dim: usize, count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    if dim == 1 {
        return (0..count)
            .map(|i| {
                (
                    vec![i as f64 / count as f64],
                    vec![(i + 1) as f64 / count as f64],
                )
            })
            .collect();
    }
    let ideal = (count as f64).powf(1.0 / dim as f64).round() as usize;
    let slabs = ideal.clamp(1, count);
    let base = count / slabs;
    let rem = count % slabs;
    let mut boxes = Vec::with_capacity(count);
    let mut start = 0usize;
    for slab in 0..slabs {
        let size = base + usize::from(slab < rem);
        let lo = start as f64 / count as f64;
        let hi = (start + size) as f64 / count as f64;
        for (sub_lo, sub_hi) in torus_boxes(dim - 1, size) {
            let mut lower = Vec::with_capacity(dim);
            let mut upper = Vec::with_capacity(dim);
            lower.push(lo);
            upper.push(hi);
            lower.extend(sub_lo);
            upper.extend(sub_hi);
            boxes.push((lower, upper));
        }
        start += size;
    }
    boxes
}

pub(crate) fn torus_equal_measure_partition(
    kind: ManifoldKind,
    dim: usize,
    regions: usize,
) -> Result<Partition> {
    if regions == 0 {
        return Err(Error::InvalidParameter(
            "partition must have at least one region".into(),
        ));
    }
    let boxes = torus_boxes(dim, regions);
    let regions = boxes
        .into_iter()
        .enumerate()
        .map(|(index, (lower, upper))| {
            let sides: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| u - l).collect();
            let center: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| 0.5 * (l + u)).collect();
            let min_side = sides.iter().cloned().fold(f64::INFINITY, f64::min);
            let diag = sides.iter().map(|s| s * s).sum::<f64>().sqrt();
            let measure = sides.iter().product();
            Region {
                index,
                center: Point::new(center),
                inner_radius: 0.5 * min_side,
                outer_radius: 0.5 * diag,
                measure,
                shape: RegionShape::Box { lower, upper },
            }
        })
        .collect();
    Ok(Partition {
        manifold: kind,
        regions,
    })
}

// ---------------------------------------------------------------------------
// Sphere construction
// ---------------------------------------------------------------------------

fn sphere_point(theta: f64, phi: f64) -> Point {
    Point::new(vec![
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ])
}

/// Geodesic distance between (theta_a, phi_a) and (theta_b, phi_b).
fn angular_distance(theta_a: f64, theta_b: f64, dphi: f64) -> f64 {
    let c = theta_a.cos() * theta_b.cos() + theta_a.sin() * theta_b.sin() * dphi.cos();
    c.clamp(-1.0, 1.0).acos()
}

pub(crate) fn sphere_equal_measure_partition(regions: usize) -> Result<Partition> {
    if regions < 2 {
        return Err(Error::InvalidParameter(
            "sphere partitions need at least 2 regions".into(),
        ));
    }
    let y = regions;
    let yf = y as f64;
    if y == 2 {
        let hemis = vec![
            Region {
                index: 0,
                center: Point::new(vec![0.0, 0.0, 1.0]),
                inner_radius: PI / 2.0,
                outer_radius: PI / 2.0,
                measure: 0.5,
                shape: RegionShape::Cap {
                    north: true,
                    theta: PI / 2.0,
                },
            },
            Region {
                index: 1,
                center: Point::new(vec![0.0, 0.0, -1.0]),
                inner_radius: PI / 2.0,
                outer_radius: PI / 2.0,
                measure: 0.5,
                shape: RegionShape::Cap {
                    north: false,
                    theta: PI / 2.0,
                },
            },
        ];
        return Ok(Partition {
            manifold: ManifoldKind::Sphere2,
            regions: hemis,
        });
    }

    // Polar caps of measure 1/Y, then collars sized near the ideal square
    // side sqrt(4 pi / Y), each split into equal azimuth sectors.
    let theta_cap = (1.0 - 2.0 / yf).clamp(-1.0, 1.0).acos();
    let delta_ideal = (4.0 * PI / yf).sqrt();
    let n_collars = (((PI - 2.0 * theta_cap) / delta_ideal).round() as usize).max(1);

    let fitting_width = (PI - 2.0 * theta_cap) / n_collars as f64;
    let mut counts: Vec<usize> = Vec::with_capacity(n_collars);
    let mut acc = 0.0;
    for i in 0..n_collars {
        let t0 = theta_cap + i as f64 * fitting_width;
        let t1 = theta_cap + (i + 1) as f64 * fitting_width;
        let ideal = yf * (t0.cos() - t1.cos()) / 2.0;
        let rounded = (ideal + acc).round().max(1.0);
        acc += ideal - rounded;
        counts.push(rounded as usize);
    }
    let interior = y - 2;
    let mut total: i64 = counts.iter().map(|&c| c as i64).sum();
    let mut idx = 0usize;
    while total != interior as i64 {
        if total < interior as i64 {
            counts[idx % n_collars] += 1;
            total += 1;
        } else if counts[idx % n_collars] > 1 {
            counts[idx % n_collars] -= 1;
            total -= 1;
        }
        idx += 1;
    }

    // Exact collar boundaries from cumulative measure.
    let mut cum = 1usize;
    let mut thetas = vec![theta_cap];
    for &c in &counts {
        cum += c;
        thetas.push((1.0 - 2.0 * cum as f64 / yf).clamp(-1.0, 1.0).acos());
    }

    let mut out: Vec<Region> = Vec::with_capacity(y);
    out.push(Region {
        index: 0,
        center: Point::new(vec![0.0, 0.0, 1.0]),
        inner_radius: theta_cap,
        outer_radius: theta_cap,
        measure: (1.0 - theta_cap.cos()) / 2.0,
        shape: RegionShape::Cap {
            north: true,
            theta: theta_cap,
        },
    });
    for (k, &count) in counts.iter().enumerate() {
        let (t0, t1) = (thetas[k], thetas[k + 1]);
        let tc = 0.5 * (t0 + t1);
        let dphi = 2.0 * PI / count as f64;
        for j in 0..count {
            let p0 = j as f64 * dphi;
            let p1 = (j + 1) as f64 * dphi;
            let pc = 0.5 * (p0 + p1);
            let d_theta = (tc - t0).min(t1 - tc);
            let inner = if count == 1 {
                d_theta
            } else {
                let to_meridian = (tc.sin() * (dphi / 2.0).sin()).clamp(-1.0, 1.0).asin();
                d_theta.min(to_meridian)
            };
            let outer = angular_distance(tc, t0, dphi / 2.0)
                .max(angular_distance(tc, t1, dphi / 2.0));
            out.push(Region {
                index: out.len(),
                center: sphere_point(tc, pc),
                inner_radius: inner,
                outer_radius: outer,
                measure: (t0.cos() - t1.cos()) / 2.0 * (dphi / (2.0 * PI)),
                shape: RegionShape::Sector {
                    theta: (t0, t1),
                    phi: (p0, p1),
                },
            });
        }
    }
    let theta_south = *thetas.last().unwrap();
    out.push(Region {
        index: out.len(),
        center: Point::new(vec![0.0, 0.0, -1.0]),
        inner_radius: PI - theta_south,
        outer_radius: PI - theta_south,
        measure: (1.0 + theta_south.cos()) / 2.0,
        shape: RegionShape::Cap {
            north: false,
            theta: theta_south,
        },
    });
    debug_assert_eq!(out.len(), y);
    Ok(Partition {
        manifold: ManifoldKind::Sphere2,
        regions: out,
    })
}

/// Build the equal-measure partition for any supported manifold.
pub fn equal_measure_partition(kind: &ManifoldKind, regions: usize) -> Result<Partition> {
    kind.build()?.equal_measure_partition(regions)
}

// ---------------------------------------------------------------------------
// Buckets
// ---------------------------------------------------------------------------

/// Points and weights falling in one partition region.
#[derive(Clone, Debug, Serialize)]
pub struct RegionBucket {
    pub region: usize,
    /// K_r: number of points in the region.
    pub count: usize,
    /// S_r: sum of the weights of those points.
    pub weight_sum: f64,
    pub members: Vec<usize>,
}

/// Bucket a weighted point set by region, returning only nonempty buckets
/// sorted by descending weight sum (ties by region index).
pub fn bucket_points(partition: &Partition, pts: &WeightedPointSet) -> Result<Vec<RegionBucket>> {
    if pts.manifold() != partition.manifold
        && !(pts.manifold().dimension() == partition.manifold.dimension()
            && matches!(pts.manifold(), ManifoldKind::Torus(1) | ManifoldKind::Circle)
            && matches!(partition.manifold, ManifoldKind::Torus(1) | ManifoldKind::Circle))
    {
        return Err(Error::InvalidParameter(format!(
            "point set on {} cannot be bucketed by a partition of {}",
            pts.manifold().name(),
            partition.manifold.name()
        )));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); partition.region_count()];
    for (j, p) in pts.points().iter().enumerate() {
        match partition.locate(p) {
            Some(r) => members[r].push(j),
            None => return Err(Error::PointOutsideRegions { index: j }),
        }
    }
    let weights = pts.weights();
    let mut buckets: Vec<RegionBucket> = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(region, members)| {
            let weight_sum = KahanSum::sum_iter(members.iter().map(|&j| weights[j]));
            RegionBucket {
                region,
                count: members.len(),
                weight_sum,
                members,
            }
        })
        .collect();
    buckets.sort_by(|a, b| {
        b.weight_sum
            .partial_cmp(&a.weight_sum)
            .unwrap()
            .then(a.region.cmp(&b.region))
    });
    Ok(buckets)
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct PartitionCheck {
    pub regions: usize,
    pub mc_samples: usize,
    /// Worst per-region deviation of the MC measure from 1/Y, in sigma units.
    pub max_measure_sigma: f64,
    /// Fraction of samples claimed by exactly one region.
    pub exactly_one_fraction: f64,
    pub c1_hat: f64,
    pub c2_hat: f64,
}

/// Monte Carlo membership audit plus the radius constants
/// `c1_hat = min inner * Y^(1/d)`, `c2_hat = max outer * Y^(1/d)`.
pub fn verify_partition(
    partition: &Partition,
    mc_samples: usize,
    seed: u64,
) -> Result<PartitionCheck> {
    if mc_samples < 10_000 {
        return Err(Error::InvalidParameter(
            "partition verification needs at least 10^4 samples".into(),
        ));
    }
    let manifold = partition.manifold.build()?;
    let y = partition.region_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies = vec![0usize; y];
    let mut exactly_one = 0usize;
    for _ in 0..mc_samples {
        let p = manifold.sample_uniform(&mut rng);
        let claim = partition.claimants(&p);
        if claim.len() == 1 {
            exactly_one += 1;
            tallies[claim[0]] += 1;
        }
    }
    let p_expect = 1.0 / y as f64;
    let sigma = (p_expect * (1.0 - p_expect) / mc_samples as f64).sqrt();
    let max_measure_sigma = tallies
        .iter()
        .map(|&c| ((c as f64 / mc_samples as f64) - p_expect).abs() / sigma)
        .fold(0.0, f64::max);
    let d = partition.manifold.dimension() as f64;
    let scale = (y as f64).powf(1.0 / d);
    let c1_hat = partition
        .regions
        .iter()
        .map(|r| r.inner_radius)
        .fold(f64::INFINITY, f64::min)
        * scale;
    let c2_hat = partition
        .regions
        .iter()
        .map(|r| r.outer_radius)
        .fold(0.0, f64::max)
        * scale;
    Ok(PartitionCheck {
        regions: y,
        mc_samples,
        max_measure_sigma,
        exactly_one_fraction: exactly_one as f64 / mc_samples as f64,
        c1_hat,
        c2_hat,
    })
}
