//! Radial profiles: functions of `r >= 0` tagged with an ambient dimension.
//!
//! A profile is either closed-form or a uniform-grid sample table with
//! cubic (Catmull–Rom) interpolation and even reflection at the origin.
//! Sample tables always carry step `h <= extent/512`; the step and extent
//! appear in every serialized report.

use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};

pub const SUPPORT_SAMPLE_FACTOR: usize = 512;

/// Support descriptor. `Decaying` profiles are integrated over `[0, extent]`
/// where the extent is chosen at construction so the tail is negligible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Compact(f64),
    Decaying(f64),
}

impl Support {
    pub fn extent(&self) -> f64 {
        match self {
            Support::Compact(r) | Support::Decaying(r) => *r,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, Support::Compact(_))
    }
}

#[derive(Clone)]
enum Form {
    Closed {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    Sampled {
        name: String,
        step: f64,
        values: Arc<Vec<f64>>,
    },
}

#[derive(Clone)]
pub struct RadialProfile {
    dimension: usize,
    support: Support,
    form: Form,
}

impl RadialProfile {
    pub fn closed(
        dimension: usize,
        support: Support,
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension,
            support,
            form: Form::Closed {
                name: name.to_string(),
                f: Arc::new(f),
            },
        }
    }

    /// Build a sampled profile from explicit uniform-grid values
    /// (`values[i]` at `r = i * step` with `step = extent / (values.len()-1)`).
    pub fn from_samples(
        dimension: usize,
        support: Support,
        name: &str,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "sampled profile needs at least two values".into(),
            ));
        }
        let extent = support.extent();
        let step = extent / (values.len() - 1) as f64;
        if step > extent / SUPPORT_SAMPLE_FACTOR as f64 {
            return Err(Error::InvalidParameter(format!(
                "sampled profile step {step} exceeds extent/{SUPPORT_SAMPLE_FACTOR}"
            )));
        }
        Ok(Self {
            dimension,
            support,
            form: Form::Sampled {
                name: name.to_string(),
                step,
                values: Arc::new(values),
            },
        })
    }

    /// Sample a function onto a uniform grid of `n` points spanning the support.
    pub fn sampled_from_fn(
        dimension: usize,
        support: Support,
        name: &str,
        n: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let extent = support.extent();
        let step = extent / (n - 1) as f64;
        let values: Vec<f64> = (0..n).map(|i| f(i as f64 * step)).collect();
        Self::from_samples(dimension, support, name, values)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn extent(&self) -> f64 {
        self.support.extent()
    }

    /// Same data reinterpreted in another ambient dimension.
    pub fn reinterpret(&self, dimension: usize) -> Self {
        let mut p = self.clone();
        p.dimension = dimension;
        p
    }

    pub fn eval(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0, "radial profiles are defined for r >= 0");
        if r >= self.extent() {
            return 0.0;
        }
        match &self.form {
            Form::Closed { f, .. } => f(r),
            Form::Sampled { step, values, .. } => catmull_rom(values, *step, r),
        }
    }

    /// Metadata for reports: kind, extent, and grid parameters when sampled.
    pub fn descriptor(&self) -> serde_json::Value {
        let support = match self.support {
            Support::Compact(r) => json!({"kind": "compact", "radius": r}),
            Support::Decaying(r) => json!({"kind": "decaying", "effective_radius": r}),
        };
        match &self.form {
            Form::Closed { name, .. } => json!({
                "form": "closed",
                "name": name,
                "dimension": self.dimension,
                "support": support,
            }),
            Form::Sampled { name, step, values } => json!({
                "form": "sampled",
                "name": name,
                "dimension": self.dimension,
                "support": support,
                "grid_step": step,
                "grid_points": values.len(),
            }),
        }
    }

    // Stock shapes.

    /// exp(-pi r^2); self-dual under the radial Fourier transform.
    pub fn gaussian(dimension: usize) -> Self {
        Self::closed(dimension, Support::Decaying(8.0), "gaussian", |r| {
            (-std::f64::consts::PI * r * r).exp()
        })
    }

    /// Unnormalized smooth bump exp(-1/(1-(2r)^2)) supported in [0, 1/2).
    pub fn bump(dimension: usize) -> Self {
        Self::closed(dimension, Support::Compact(0.5), "bump", |r| {
            let q = 2.0 * r;
            let denom = 1.0 - q * q;
            if denom <= 0.0 {
                0.0
            } else {
                (-1.0 / denom).exp()
            }
        })
    }

    /// Indicator of [0, radius).
    pub fn indicator(dimension: usize, radius: f64) -> Self {
        Self::closed(dimension, Support::Compact(radius), "indicator", |_| 1.0)
    }
}

/// Catmull–Rom cubic interpolation with even reflection below r = 0 and
/// zero extension past the last sample.
fn catmull_rom(values: &[f64], step: f64, r: f64) -> f64 {
    let n = values.len() as isize;
    let t = r / step;
    let i = t.floor() as isize;
    let frac = t - i as f64;
    let fetch = |j: isize| -> f64 {
        let j = if j < 0 { -j } else { j };
        if j >= n {
            0.0
        } else {
            values[j as usize]
        }
    };
    let p0 = fetch(i - 1);
    let p1 = fetch(i);
    let p2 = fetch(i + 1);
    let p3 = fetch(i + 2);
    0.5 * (2.0 * p1
        + (-p0 + p2) * frac
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * frac * frac
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * frac * frac * frac)
}
