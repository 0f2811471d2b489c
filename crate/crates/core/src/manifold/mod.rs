//! Manifolds with explicit Laplace–Beltrami spectra.
//!
//! Every supported manifold sits behind the [`Manifold`] trait: it exposes
//! its (frequency-ordered) eigenpairs, evaluates the real orthonormal
//! eigenbasis, measures geodesic distance and produces equal-measure
//! partitions. Concrete manifolds register by name in [`ManifoldRegistry`],
//! so the CLI and experiment configs select them at runtime
//! (`torus:2`, `circle`, `sphere2`).
//!
//! Conventions: the measure is normalized to total mass 1, `lambda` stores
//! the *frequency* (square root of the Laplace eigenvalue), eigenfunction
//! index 0 is the constant function 1, and frequencies are nondecreasing
//! with deterministic tie-breaking.

mod sphere;
mod torus;

pub use sphere::UnitSphere;
pub use torus::FlatTorus;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Which manifold an experiment runs on. `Circle` is semantically
/// `Torus(1)`; the two share one implementation and produce identical
/// spectra, differing only in the name they echo into reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ManifoldKind {
    Torus(usize),
    Circle,
    Sphere2,
}

impl ManifoldKind {
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        if name.eq_ignore_ascii_case("circle") {
            return Ok(ManifoldKind::Circle);
        }
        if name.eq_ignore_ascii_case("sphere2") || name.eq_ignore_ascii_case("sphere:2") {
            return Ok(ManifoldKind::Sphere2);
        }
        if let Some(dim) = name.strip_prefix("torus:") {
            let d: usize = dim
                .parse()
                .map_err(|_| Error::UnknownManifold(name.to_string()))?;
            if !(1..=4).contains(&d) {
                return Err(Error::UnsupportedDimension(d));
            }
            return Ok(ManifoldKind::Torus(d));
        }
        Err(Error::UnknownManifold(name.to_string()))
    }

    pub fn name(&self) -> String {
        match self {
            ManifoldKind::Torus(d) => format!("torus:{d}"),
            ManifoldKind::Circle => "circle".to_string(),
            ManifoldKind::Sphere2 => "sphere2".to_string(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ManifoldKind::Torus(d) => *d,
            ManifoldKind::Circle => 1,
            ManifoldKind::Sphere2 => 2,
        }
    }

    /// Resolve this kind to a shared manifold instance.
    pub fn build(&self) -> Result<Arc<dyn Manifold>> {
        ManifoldRegistry::global().resolve(&self.name())
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Cosine or sine member of a torus frequency pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrigPhase {
    Cos,
    Sin,
}

/// Structured tag identifying one real basis function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EigenLabel {
    /// `freq` all zero with `Cos` phase is the constant function.
    TorusTrig { freq: Vec<i64>, phase: TrigPhase },
    /// Real spherical harmonic of the given degree; `order > 0` carries
    /// cos(m phi), `order < 0` carries sin(|m| phi), `order = 0` is zonal.
    SphereHarmonic { degree: u32, order: i32 },
}

impl fmt::Display for EigenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenLabel::TorusTrig { freq, phase } => {
                if freq.iter().all(|&k| k == 0) {
                    return f.write_str("const");
                }
                let ks: Vec<String> = freq.iter().map(|k| k.to_string()).collect();
                let tag = match phase {
                    TrigPhase::Cos => "cos",
                    TrigPhase::Sin => "sin",
                };
                write!(f, "{} k=({})", tag, ks.join(","))
            }
            EigenLabel::SphereHarmonic { degree, order } => {
                if *degree == 0 {
                    f.write_str("const")
                } else {
                    write!(f, "Y(l={degree},m={order})")
                }
            }
        }
    }
}

/// One enumerated eigenpair: position in the global ordering, frequency
/// lambda_m (square root of the Laplace eigenvalue) and the basis tag.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPair {
    pub index: usize,
    pub lambda: f64,
    pub label: EigenLabel,
}

/// A point in chart coordinates: `d` reals in [0,1) on the torus, a unit
/// 3-vector on the sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

/// Result of the Weyl eigenvalue-counting sanity check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeylCheck {
    pub count: usize,
    pub ratio: f64,
}

/// Common interface for manifolds with explicitly enumerable spectra.
///
/// All methods are pure; instances are safe to share across threads, and
/// enumerated spectra are cached behind the shared handle.
pub trait Manifold: Send + Sync {
    fn kind(&self) -> ManifoldKind;

    fn dimension(&self) -> usize;

    /// First `count` eigenpairs in nondecreasing frequency order, with
    /// deterministic tie-breaking. Entry 0 is the constant function.
    fn enumerate_spectrum(&self, count: usize) -> Vec<EigenPair>;

    /// Every eigenpair with `lambda <= lambda_max`.
    fn spectrum_up_to(&self, lambda_max: f64) -> Vec<EigenPair>;

    fn eval_eigenfunction(&self, label: &EigenLabel, x: &Point) -> Result<f64>;

    /// Evaluate the first `count` basis functions at `x` into `out`
    /// (cleared first). Equivalent to per-label evaluation but amortizes
    /// recurrences, so spectral sums stay O(count) per point.
    fn eval_prefix(&self, x: &Point, count: usize, out: &mut Vec<f64>);

    fn geodesic_distance(&self, x: &Point, y: &Point) -> f64;

    fn validate_point(&self, x: &Point) -> Result<()>;

    /// Reduce coordinates to the canonical chart (mod-1 on the torus,
    /// renormalized on the sphere).
    fn canonicalize_point(&self, x: &Point) -> Point;

    fn sample_uniform(&self, rng: &mut dyn RngCore) -> Point;

    fn equal_measure_partition(&self, regions: usize) -> Result<Partition>;

    /// Product integration grid (points and weights summing to 1) exact for
    /// low-degree polynomials in the eigenbasis; used by orthonormality and
    /// sup-norm checks. May contain zero-weight points (sphere poles).
    fn integration_grid(&self, resolution: usize) -> Vec<(Point, f64)>;
}

type BuildFn = fn(&ManifoldKind) -> Result<Arc<dyn Manifold>>;

struct RegistryEntry {
    pattern: &'static str,
    summary: &'static str,
    build: BuildFn,
}

/// Name-indexed registry of the built-in manifolds. Resolution caches
/// instances so spectra enumerated once are shared by later calls.
pub struct ManifoldRegistry {
    entries: Vec<RegistryEntry>,
    cache: Mutex<HashMap<String, Arc<dyn Manifold>>>,
}

impl ManifoldRegistry {
    pub fn global() -> &'static Self {
        static REGISTRY: OnceLock<ManifoldRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| ManifoldRegistry {
            entries: vec![
                RegistryEntry {
                    pattern: "torus:<d>",
                    summary: "flat torus [0,1)^d, d in 1..=4",
                    build: |kind| match kind {
                        ManifoldKind::Torus(d) => {
                            Ok(Arc::new(FlatTorus::new(*d, ManifoldKind::Torus(*d))?) as _)
                        }
                        _ => Err(Error::UnknownManifold(kind.name())),
                    },
                },
                RegistryEntry {
                    pattern: "circle",
                    summary: "unit circle (identical spectrum to torus:1)",
                    build: |kind| match kind {
                        ManifoldKind::Circle => {
                            Ok(Arc::new(FlatTorus::new(1, ManifoldKind::Circle)?) as _)
                        }
                        _ => Err(Error::UnknownManifold(kind.name())),
                    },
                },
                RegistryEntry {
                    pattern: "sphere2",
                    summary: "unit 2-sphere with real spherical harmonics",
                    build: |kind| match kind {
                        ManifoldKind::Sphere2 => Ok(Arc::new(UnitSphere::new()) as _),
                        _ => Err(Error::UnknownManifold(kind.name())),
                    },
                },
            ],
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn resolve(&self, name: &str) -> Result<Arc<dyn Manifold>> {
        let kind = ManifoldKind::parse(name)?;
        let key = kind.name();
        let mut cache = self.cache.lock().unwrap();
        if let Some(m) = cache.get(&key) {
            return Ok(Arc::clone(m));
        }
        let entry_idx = match kind {
            ManifoldKind::Torus(_) => 0,
            ManifoldKind::Circle => 1,
            ManifoldKind::Sphere2 => 2,
        };
        let manifold = (self.entries[entry_idx].build)(&kind)?;
        cache.insert(key, Arc::clone(&manifold));
        Ok(manifold)
    }

    /// (pattern, summary) pairs for help output.
    pub fn entries(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.entries.iter().map(|e| (e.pattern, e.summary))
    }
}

// Free-function surface mirroring the operation contracts.

pub fn enumerate_spectrum(kind: &ManifoldKind, count: usize) -> Result<Vec<EigenPair>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "spectrum count must be at least 1".into(),
        ));
    }
    Ok(kind.build()?.enumerate_spectrum(count))
}

pub fn eval_eigenfunction(kind: &ManifoldKind, pair: &EigenPair, x: &Point) -> Result<f64> {
    let m = kind.build()?;
    m.validate_point(x)?;
    m.eval_eigenfunction(&pair.label, x)
}

pub fn geodesic_distance(kind: &ManifoldKind, x: &Point, y: &Point) -> Result<f64> {
    let m = kind.build()?;
    m.validate_point(x)?;
    m.validate_point(y)?;
    Ok(m.geodesic_distance(x, y))
}

/// Count eigenpairs with `lambda <= t` and report `count / t^d`; the ratio
/// stabilizes as `t` grows, which is the testable face of the eigenvalue
/// counting asymptotic.
pub fn weyl_counting_check(kind: &ManifoldKind, t: f64) -> Result<WeylCheck> {
    if t < 1.0 {
        return Err(Error::InvalidParameter(
            "Weyl check threshold must satisfy T >= 1".into(),
        ));
    }
    let m = kind.build()?;
    let count = m.spectrum_up_to(t).len();
    let ratio = count as f64 / t.powi(m.dimension() as i32);
    Ok(WeylCheck { count, ratio })
}

/// Max |phi_m| over a product grid of the given resolution. The test
/// harness compares this against `3 (1 + lambda)^{(d-1)/2}`.
pub fn sup_norm_sanity(kind: &ManifoldKind, pair: &EigenPair, grid_resolution: usize) -> Result<f64> {
    if grid_resolution < 64 {
        return Err(Error::InvalidParameter(
            "sup-norm grid resolution must be at least 64".into(),
        ));
    }
    let m = kind.build()?;
    let mut max = 0.0f64;
    for (p, _) in m.integration_grid(grid_resolution) {
        let v = m.eval_eigenfunction(&pair.label, &p)?.abs();
        if v > max {
            max = v;
        }
    }
    Ok(max)
}
