//! Quadrature-rule exactness scanning and the node-count audit.
//!
//! A rule integrates the eigenbasis prefix exactly up to its exactness
//! index X_max: `residual_m = |sum_j a_j phi_m(x_j) - delta_{m0}|` stays
//! below tolerance for every m <= X_max. The audit tabulates
//! `1/(X_max sum a_j^2)` and `N / X_max` across rule families — the
//! node-count face of the spectral lower bound: a rule exact to X needs
//! `N >= c X` nodes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::gauss_legendre_cached;
use crate::manifold::{ManifoldKind, Point};
use crate::sum::KahanSum;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub manifold: ManifoldKind,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub name: String,
}

impl QuadratureRule {
    /// Equispaced nodes j/N with uniform weights on the circle.
    pub fn trapezoid(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "trapezoid rule needs at least one node".into(),
            ));
        }
        Ok(Self {
            manifold: ManifoldKind::Torus(1),
            nodes: (0..n)
                .map(|j| Point::new(vec![j as f64 / n as f64]))
                .collect(),
            weights: vec![1.0 / n as f64; n],
            name: format!("trapezoid:{n}"),
        })
    }

    /// Gauss–Legendre in cos(theta) times 2 n_theta equispaced azimuths.
    /// The azimuth offset pi/(8 n_theta) keeps the first inexact degree
    /// sharp: without it the sine flavors of degree 2 n_theta alias to zero
    /// sums and the exactness prefix would overshoot the design degree.
    pub fn sphere_product(n_theta: usize) -> Result<Self> {
        if n_theta == 0 {
            return Err(Error::InvalidParameter(
                "sphere product rule needs at least one latitude node".into(),
            ));
        }
        let (z_nodes, z_weights) = gauss_legendre_cached(n_theta);
        let n_phi = 2 * n_theta;
        let offset = std::f64::consts::PI / (8.0 * n_theta as f64);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (z, wz) in z_nodes.iter().zip(z_weights) {
            let r = (1.0 - z * z).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = offset + 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
                nodes.push(Point::new(vec![r * phi.cos(), r * phi.sin(), *z]));
                weights.push(wz / 2.0 / n_phi as f64);
            }
        }
        Ok(Self {
            manifold: ManifoldKind::Sphere2,
            nodes,
            weights,
            name: format!("sphere-product:{n_theta}"),
        })
    }

    /// Parse a built-in rule spec: `trapezoid:<N>` or `sphere-product:<n>`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(n) = spec.strip_prefix("trapezoid:") {
            let n = n.parse::<usize>().map_err(|_| {
                Error::InvalidParameter(format!("bad trapezoid node count in `{spec}`"))
            })?;
            return Self::trapezoid(n);
        }
        if let Some(n) = spec.strip_prefix("sphere-product:") {
            let n = n.parse::<usize>().map_err(|_| {
                Error::InvalidParameter(format!("bad sphere-product order in `{spec}`"))
            })?;
            return Self::sphere_product(n);
        }
        Err(Error::InvalidParameter(format!(
            "unknown rule spec `{spec}` (expected trapezoid:<N>, sphere-product:<n>, or a CSV file)"
        )))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        KahanSum::sum_iter(self.weights.iter().copied())
    }

    pub fn positive_weights(&self) -> bool {
        self.weights.iter().all(|w| *w > 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessCertificate {
    pub rule: String,
    pub manifold: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub x_probe: usize,
    pub tol: f64,
    /// Largest prefix index with every residual below tolerance.
    pub x_max: usize,
    pub residuals: Vec<f64>,
    /// 1 / (X_max sum a_j^2); absent when X_max = 0.
    pub c_hat: Option<f64>,
    /// N / X_max; absent when X_max = 0.
    pub node_ratio: Option<f64>,
    /// sum_{m <= X_max} |sum_j a_j phi_m(x_j)|^2; equals 1 for exact rules.
    pub proof_identity_sum: f64,
    pub weight_sum: f64,
    pub positive_weights: bool,
}

/// Scan residuals `|sum_j a_j phi_m(x_j) - delta_{m0}|` for m = 0..X_probe
/// and certify the exactness prefix.
pub fn exactness_scan(
    rule: &QuadratureRule,
    x_probe: usize,
    tol: f64,
) -> Result<ExactnessCertificate> {
    if !(1e-12..=1e-6).contains(&tol) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} outside [1e-12, 1e-6]"
        )));
    }
    let manifold = rule.manifold.build()?;
    let count = x_probe + 1;
    let mut acc = vec![KahanSum::new(); count];
    let mut buf = Vec::new();
    for (p, &w) in rule.nodes.iter().zip(&rule.weights) {
        let canon = manifold.canonicalize_point(p);
        manifold.eval_prefix(&canon, count, &mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            a.add(w * v);
        }
    }
    let inner: Vec<f64> = acc.into_iter().map(|a| a.value()).collect();
    let residuals: Vec<f64> = inner
        .iter()
        .enumerate()
        .map(|(m, v)| if m == 0 { (v - 1.0).abs() } else { v.abs() })
        .collect();
    if residuals[0] >= tol {
        return Err(Error::WeightSumViolation {
            residual: residuals[0],
        });
    }
    let x_max = residuals
        .iter()
        .position(|r| *r >= tol)
        .map(|first_fail| first_fail - 1)
        .unwrap_or(x_probe);
    let mut identity = KahanSum::new();
    for v in &inner[..=x_max] {
        identity.add(v * v);
    }
    let sum_w2 = KahanSum::sum_iter(rule.weights.iter().map(|w| w * w));
    Ok(ExactnessCertificate {
        rule: rule.name.clone(),
        manifold: rule.manifold.name(),
        n: rule.len(),
        x_probe,
        tol,
        x_max,
        residuals,
        c_hat: (x_max >= 1).then(|| 1.0 / (x_max as f64 * sum_w2)),
        node_ratio: (x_max >= 1).then(|| rule.len() as f64 / x_max as f64),
        proof_identity_sum: identity.value(),
        weight_sum: rule.weight_sum(),
        positive_weights: rule.positive_weights(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditRow {
    pub rule: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub x_max: usize,
    pub sum_w2: f64,
    pub c_hat: f64,
    pub node_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditTable {
    pub rows: Vec<AuditRow>,
    pub min_node_ratio: f64,
    /// Cauchy–Schwarz floor: sum a_j^2 >= 1/N for every unit-sum rule.
    pub cauchy_schwarz_ok: bool,
}

/// Audit a family of rules. Each rule is scanned with `x_probe = 4N + 8`
/// unless a global probe bound is supplied.
pub fn corollary_audit(
    rules: &[QuadratureRule],
    x_probe: Option<usize>,
    tol: f64,
) -> Result<AuditTable> {
    if rules.is_empty() {
        return Err(Error::InvalidParameter("audit needs at least one rule".into()));
    }
    let mut rows = Vec::with_capacity(rules.len());
    let mut min_node_ratio = f64::INFINITY;
    let mut cauchy_ok = true;
    for rule in rules {
        let probe = x_probe.unwrap_or(4 * rule.len() + 8);
        let cert = exactness_scan(rule, probe, tol)?;
        if cert.x_max < 1 {
            return Err(Error::InvalidParameter(format!(
                "rule `{}` is not exact past m = 0; nothing to audit",
                rule.name
            )));
        }
        let sum_w2 = KahanSum::sum_iter(rule.weights.iter().map(|w| w * w));
        if (rule.weight_sum() - 1.0).abs() < 1e-9 {
            cauchy_ok &= sum_w2 >= 1.0 / rule.len() as f64 - 1e-12;
        }
        min_node_ratio = min_node_ratio.min(cert.node_ratio.unwrap());
        rows.push(AuditRow {
            rule: rule.name.clone(),
            n: rule.len(),
            x_max: cert.x_max,
            sum_w2,
            c_hat: cert.c_hat.unwrap(),
            node_ratio: cert.node_ratio.unwrap(),
        });
    }
    Ok(AuditTable {
        rows,
        min_node_ratio,
        cauchy_schwarz_ok: cauchy_ok,
    })
}
