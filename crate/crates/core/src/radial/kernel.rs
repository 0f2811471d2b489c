//! Autocorrelation kernel, band-limited mollifier and their verification.
//!
//! The chain, for dimension d, cutoff frequency `lambda_x` and band
//! parameter `epsilon`:
//!
//! * `psi` — smooth radial bump supported in B(0, 1/2), L2-normalized, so
//!   `H = psi * psi` (d-dimensional autocorrelation) is supported in
//!   B(0, 1), has H(0) = 1, H <= 1, and `F_d H = (F_d psi)^2 >= 0`.
//! * `phi` — smoothstep plateau equal to 1 on [0, eps/4pi], supported in
//!   [0, eps/2pi]; `eta = F_d phi` is its band-limited mollifier.
//! * `H~ = H(./lambda_x) * eta`, built spectrally: `F_d H~` is *defined* as
//!   `lambda_x^d F_d H(lambda_x .) phi(.)`, compactly supported in
//!   [0, eps/2pi], and `H~ = F_d^{-1}` of that product.
//!
//! The payoff, checked numerically by [`verify_support_lemma`]: the inverse
//! cosine transform of `H~` is nonnegative and supported in [0, epsilon].
//!
//! Heavy artifacts are cached per dimension (psi, H) and built lazily per
//! suite (eta, H~). Everything H-related is evaluated through fixed
//! Gauss–Legendre nodes carrying *exact* transform values, so no
//! interpolation error enters the construction of H itself.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::json;

use super::bessel::j_known;
use super::profile::{RadialProfile, Support};
use super::quad::{fixed_panel_nodes, integrate, QuadConfig};
use super::transform::{fourier_radial, fourier_radial_tol, inverse_cosine_transform, unit_sphere_area};
use crate::error::{Error, Result};

const H_GRID_POINTS: usize = 1025;
const FOURIER_PSI_SAMPLES: usize = 8193;

/// Shared per-dimension artifacts: the normalized bump, its transform
/// table, the squared transform (profile of F_d H) and H itself.
struct DimensionBase {
    psi: RadialProfile,
    fourier_h: RadialProfile,
    h: RadialProfile,
}

fn dimension_base(d: usize) -> Result<Arc<DimensionBase>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DimensionBase>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    if let Some(base) = map.get(&d) {
        return Ok(Arc::clone(base));
    }
    let base = Arc::new(build_dimension_base(d)?);
    map.insert(d, Arc::clone(&base));
    Ok(base)
}

fn build_dimension_base(d: usize) -> Result<DimensionBase> {
    if !(1..=4).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    // L2 normalization of the bump in dimension d.
    let bump = RadialProfile::bump(d);
    let cfg = QuadConfig {
        abs_tol: 1e-15,
        panel_cap: 0.5 / 64.0,
        ..Default::default()
    };
    let bump_sq = integrate(
        &|r: f64| {
            let v = bump.eval(r);
            v * v * r.powi(d as i32 - 1)
        },
        0.0,
        0.5,
        &cfg,
    )?;
    let c_psi = 1.0 / (unit_sphere_area(d) * bump_sq).sqrt();
    let psi = RadialProfile::closed(d, Support::Compact(0.5), "psi-bump", move |r| {
        let q = 2.0 * r;
        let denom = 1.0 - q * q;
        if denom <= 0.0 {
            0.0
        } else {
            c_psi * (-1.0 / denom).exp()
        }
    });
    let norm = {
        let p = psi.clone();
        unit_sphere_area(d)
            * integrate(
                &move |r: f64| {
                    let v = p.eval(r);
                    v * v * r.powi(d as i32 - 1)
                },
                0.0,
                0.5,
                &cfg,
            )?
    };
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NormalizationFailure { norm });
    }

    // Extent of F_d psi: probe until the squared transform is negligible.
    let peak = fourier_radial(&psi, 0.0)?;
    let mut consecutive = 0usize;
    let mut u = 0.0f64;
    let u_max = loop {
        u += 0.5;
        if u > 400.0 {
            return Err(Error::QuadratureNonConvergence(
                "transform of the bump did not decay below threshold by u = 400".into(),
            ));
        }
        if fourier_radial_tol(&psi, u, 1e-13)?.abs() < 1e-11 * peak {
            consecutive += 1;
            if consecutive >= 16 {
                break u;
            }
        } else {
            consecutive = 0;
        }
    };

    // Uniform table of (F_d psi)^2 for pointwise evaluation of F_d H.
    let mut squared = Vec::with_capacity(FOURIER_PSI_SAMPLES);
    let step = u_max / (FOURIER_PSI_SAMPLES - 1) as f64;
    for i in 0..FOURIER_PSI_SAMPLES {
        let v = fourier_radial_tol(&psi, i as f64 * step, 1e-12)?;
        squared.push(v * v);
    }
    let fourier_h =
        RadialProfile::from_samples(d, Support::Decaying(u_max), "fourier_h", squared)?;

    // H = F_d^{-1}[(F_d psi)^2] on a uniform r-grid over [0, 1], evaluated
    // through fixed GL nodes carrying exact transform values (quarter-period
    // panels for the fastest oscillation r = 1).
    let (nodes, weights) = fixed_panel_nodes(0.0, u_max, 0.25, 16);
    let node_sq: Vec<f64> = nodes
        .iter()
        .map(|&un| fourier_radial_tol(&psi, un, 1e-12).map(|v| v * v))
        .collect::<Result<_>>()?;
    let order = (d as f64 - 2.0) / 2.0;
    let half_d = d as f64 / 2.0;
    let mut h_values = Vec::with_capacity(H_GRID_POINTS);
    for i in 0..H_GRID_POINTS {
        let r = i as f64 / (H_GRID_POINTS - 1) as f64;
        let v = if r == 0.0 {
            let mass: f64 = nodes
                .iter()
                .zip(&weights)
                .zip(&node_sq)
                .map(|((&un, &w), &f2)| w * f2 * un.powi(d as i32 - 1))
                .sum();
            unit_sphere_area(d) * mass
        } else {
            let two_pi_r = 2.0 * std::f64::consts::PI * r;
            let sum: f64 = nodes
                .iter()
                .zip(&weights)
                .zip(&node_sq)
                .map(|((&un, &w), &f2)| w * f2 * j_known(order, two_pi_r * un) * un.powf(half_d))
                .sum();
            2.0 * std::f64::consts::PI * r.powf(-order) * sum
        };
        h_values.push(v);
    }
    let h0 = h_values[0];
    if (h0 - 1.0).abs() > 1e-8 {
        return Err(Error::NormalizationFailure { norm: h0 });
    }
    let h = RadialProfile::from_samples(d, Support::Compact(1.0), "autocorrelation", h_values)?;
    Ok(DimensionBase { psi, fourier_h, h })
}

// ---------------------------------------------------------------------------
// Smoothstep for the plateau
// ---------------------------------------------------------------------------

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from the bump
/// primitive exp(-1/(u(1-u))).
pub fn smoothstep(t: f64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let n = 8193usize;
        let h = 1.0 / (n - 1) as f64;
        let b = |u: f64| {
            if u <= 0.0 || u >= 1.0 {
                0.0
            } else {
                (-1.0 / (u * (1.0 - u))).exp()
            }
        };
        // Cumulative composite Simpson on a half-step lattice.
        let mut cum = vec![0.0f64; n];
        for i in 1..n {
            let a = (i - 1) as f64 * h;
            let m = a + 0.5 * h;
            let c = i as f64 * h;
            cum[i] = cum[i - 1] + h / 6.0 * (b(a) + 4.0 * b(m) + b(c));
        }
        let total = cum[n - 1];
        cum.iter_mut().for_each(|v| *v /= total);
        cum
    });
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let n = table.len();
    let pos = t * (n - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    let fetch = |j: isize| -> f64 {
        if j < 0 {
            -table[(-j) as usize] // odd reflection keeps the slope continuous at 0
        } else if j as usize >= n {
            2.0 - table[2 * (n - 1) - j as usize]
        } else {
            table[j as usize]
        }
    };
    let (p0, p1, p2, p3) = (
        fetch(i as isize - 1),
        fetch(i as isize),
        fetch(i as isize + 1),
        fetch(i as isize + 2),
    );
    0.5 * (2.0 * p1
        + (-p0 + p2) * frac
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * frac * frac
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * frac * frac * frac)
}

// ---------------------------------------------------------------------------
// Kernel suite
// ---------------------------------------------------------------------------

pub struct KernelSuite {
    dimension: usize,
    pub epsilon: f64,
    pub lambda_x: f64,
    psi: RadialProfile,
    h: RadialProfile,
    fourier_h: RadialProfile,
    phi: RadialProfile,
    eta: OnceLock<RadialProfile>,
    h_tilde: OnceLock<RadialProfile>,
}

/// Build the kernel suite for dimension `d`, cutoff `lambda_x` and band
/// parameter `epsilon`.
pub fn build_kernel_suite(d: usize, lambda_x: f64, epsilon: f64) -> Result<KernelSuite> {
    if !(lambda_x > 0.0 && lambda_x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda_x must be positive, got {lambda_x}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let base = dimension_base(d)?;
    let eps_hi = epsilon / (2.0 * std::f64::consts::PI);
    let eps_lo = epsilon / (4.0 * std::f64::consts::PI);
    let phi = RadialProfile::closed(d, Support::Compact(eps_hi), "plateau", move |rho| {
        smoothstep((eps_hi - rho) / (eps_hi - eps_lo))
    });
    Ok(KernelSuite {
        dimension: d,
        epsilon,
        lambda_x,
        psi: base.psi.clone(),
        h: base.h.clone(),
        fourier_h: base.fourier_h.clone(),
        phi,
        eta: OnceLock::new(),
        h_tilde: OnceLock::new(),
    })
}

impl KernelSuite {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn psi(&self) -> &RadialProfile {
        &self.psi
    }

    /// The autocorrelation kernel H (support [0, 1], H(0) = 1).
    pub fn h(&self) -> &RadialProfile {
        &self.h
    }

    /// Profile of F_d H = (F_d psi)^2.
    pub fn fourier_h(&self) -> &RadialProfile {
        &self.fourier_h
    }

    /// The plateau phi (= F_d eta): 1 on [0, eps/4pi], 0 past eps/2pi.
    pub fn phi(&self) -> &RadialProfile {
        &self.phi
    }

    /// F_d H~ by construction: `lambda_x^d F_d H(lambda_x rho) phi(rho)`.
    pub fn fourier_h_tilde(&self, rho: f64) -> f64 {
        self.lambda_x.powi(self.dimension as i32)
            * self.fourier_h.eval(self.lambda_x * rho)
            * self.phi.eval(rho)
    }

    /// The positivity surrogate for the leading kernel term at geodesic
    /// distance `dist`:
    /// `(2/(2 pi)^d) lambda_x^d F_d H(lambda_x D / 2 pi) F_d eta(D / 2 pi)`,
    /// using `F_d eta = phi`.
    pub fn omega0_surrogate(&self, dist: f64) -> f64 {
        let d = self.dimension as i32;
        let two_pi = 2.0 * std::f64::consts::PI;
        2.0 / two_pi.powi(d)
            * self.lambda_x.powi(d)
            * self.fourier_h.eval(self.lambda_x * dist / two_pi)
            * self.phi.eval(dist / two_pi)
    }

    /// Band-limited mollifier eta = F_d phi (built on first use).
    pub fn eta(&self) -> Result<&RadialProfile> {
        if let Some(p) = self.eta.get() {
            return Ok(p);
        }
        let built = self.build_eta()?;
        Ok(self.eta.get_or_init(|| built))
    }

    fn build_eta(&self) -> Result<RadialProfile> {
        let scale = 2.0 * std::f64::consts::PI / self.epsilon;
        let peak = fourier_radial(&self.phi, 0.0)?.abs();
        let probe_step = scale / 4.0;
        let mut consecutive = 0usize;
        let mut extent = 0.0f64;
        let mut y = 0.0f64;
        while consecutive < 32 {
            y += probe_step;
            if y > 20000.0 {
                return Err(Error::QuadratureNonConvergence(
                    "mollifier tail did not decay below threshold".into(),
                ));
            }
            if fourier_radial(&self.phi, y)?.abs() < 1e-12 * peak {
                consecutive += 1;
                extent = y;
            } else {
                consecutive = 0;
            }
        }
        let n = ((extent / (scale / 64.0)).ceil() as usize + 2).max(4097);
        let step = extent / (n - 1) as f64;
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            values.push(fourier_radial(&self.phi, i as f64 * step)?);
        }
        RadialProfile::from_samples(self.dimension, Support::Decaying(extent), "eta", values)
    }

    /// The smoothed kernel H~ (built on first use).
    pub fn h_tilde(&self) -> Result<&RadialProfile> {
        if let Some(p) = self.h_tilde.get() {
            return Ok(p);
        }
        let built = self.build_h_tilde()?;
        Ok(self.h_tilde.get_or_init(|| built))
    }

    fn build_h_tilde(&self) -> Result<RadialProfile> {
        let d = self.dimension;
        let eps_hi = self.epsilon / (2.0 * std::f64::consts::PI);
        let g = {
            let lambda = self.lambda_x;
            let fourier_h = self.fourier_h.clone();
            let phi = self.phi.clone();
            let dim = d as i32;
            RadialProfile::closed(d, Support::Compact(eps_hi), "fourier_h_tilde", move |u| {
                lambda.powi(dim) * fourier_h.eval(lambda * u) * phi.eval(u)
            })
        };
        let peak = fourier_radial(&g, 0.0)?.abs();
        let scale = 2.0 * std::f64::consts::PI / self.epsilon;

        // Probe the extent of H~ = F_d^{-1} G.
        let probe_step = scale / 4.0;
        let mut consecutive = 0usize;
        let mut extent = probe_step;
        let mut t = self.lambda_x.max(probe_step);
        while consecutive < 32 {
            t += probe_step;
            if t > 6000.0 {
                return Err(Error::QuadratureNonConvergence(
                    "smoothed kernel tail did not decay below threshold".into(),
                ));
            }
            if fourier_radial(&g, t)?.abs() < 1e-11 * peak {
                consecutive += 1;
                extent = t;
            } else {
                consecutive = 0;
            }
        }

        // Uniform samples through fixed GL nodes with exact G values.
        let step = scale / 512.0;
        let n = (extent / step).ceil() as usize + 1;
        let extent = (n - 1) as f64 * step;
        let (nodes, weights) = fixed_panel_nodes(0.0, eps_hi, 1.0 / (4.0 * extent), 16);
        let g_nodes: Vec<f64> = nodes.iter().map(|&u| g.eval(u)).collect();
        let order = (d as f64 - 2.0) / 2.0;
        let half_d = d as f64 / 2.0;
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 * step;
            let v = if t == 0.0 {
                let mass: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .zip(&g_nodes)
                    .map(|((&u, &w), &gv)| w * gv * u.powi(d as i32 - 1))
                    .sum();
                unit_sphere_area(d) * mass
            } else {
                let two_pi_t = 2.0 * std::f64::consts::PI * t;
                let sum: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .zip(&g_nodes)
                    .map(|((&u, &w), &gv)| w * gv * j_known(order, two_pi_t * u) * u.powf(half_d))
                    .sum();
                2.0 * std::f64::consts::PI * t.powf(-order) * sum
            };
            values.push(v);
        }
        RadialProfile::from_samples(d, Support::Decaying(extent), "h_tilde", values)
    }

    /// Suite parameters and profile grids, embedded in every report.
    pub fn descriptor(&self) -> serde_json::Value {
        json!({
            "dimension": self.dimension,
            "lambda_x": self.lambda_x,
            "epsilon": self.epsilon,
            "psi": self.psi.descriptor(),
            "h": self.h.descriptor(),
            "fourier_h": self.fourier_h.descriptor(),
            "phi": self.phi.descriptor(),
            "eta": self.eta.get().map(|p| p.descriptor()),
            "h_tilde": self.h_tilde.get().map(|p| p.descriptor()),
        })
    }
}

/// Numeric verification of the support lemma: the inverse cosine transform
/// of H~ should be nonnegative on [0, epsilon] and vanish beyond.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SupportLemmaReport {
    /// max over the grid restricted to [0, epsilon] of |C^{-1} H~|.
    pub peak: f64,
    /// max(0, -min over [0, epsilon]) of C^{-1} H~, relative to peak.
    pub max_violation_neg: f64,
    /// max over rho > epsilon of |C^{-1} H~|, relative to peak.
    pub max_tail: f64,
    pub grid_points: usize,
}

pub fn verify_support_lemma(suite: &KernelSuite, grid: &[f64]) -> Result<SupportLemmaReport> {
    let eps = suite.epsilon;
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if grid.is_empty() || lo > 0.25 * eps || hi < 3.99 * eps {
        return Err(Error::InvalidParameter(
            "support-lemma grid must cover [0, 4 epsilon]".into(),
        ));
    }
    let h_tilde = suite.h_tilde()?;
    let mut peak = 0.0f64;
    let mut min_inside = f64::INFINITY;
    let mut max_tail_abs = 0.0f64;
    for &rho in grid {
        let v = inverse_cosine_transform(h_tilde, rho)?;
        if rho <= eps {
            peak = peak.max(v.abs());
            min_inside = min_inside.min(v);
        } else {
            max_tail_abs = max_tail_abs.max(v.abs());
        }
    }
    Ok(SupportLemmaReport {
        peak,
        max_violation_neg: (-min_inside).max(0.0) / peak,
        max_tail: max_tail_abs / peak,
        grid_points: grid.len(),
    })
}
