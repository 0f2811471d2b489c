//! CSV ingestion and emission for point sets, quadrature rules and
//! radial-profile tables.
//!
//! Point-set format: a header comment `# manifold=<torus:d|circle|sphere2>`
//! followed by rows `coord1,...,coordD[,weight]`. A missing weight column
//! means uniform weights 1/N; quadrature-rule files must carry the weight
//! column. All floats are written with 17 significant digits so files are
//! byte-identical across runs.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::functional::WeightedPointSet;
use crate::manifold::{ManifoldKind, Point};
use crate::quadrature::QuadratureRule;
use crate::radial::RadialProfile;

/// 17 significant digits; round-trips every f64 bit pattern.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::PointSetFormat {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

struct ParsedPointFile {
    manifold: ManifoldKind,
    points: Vec<Point>,
    weights: Option<Vec<f64>>,
}

fn parse_point_file(path: &Path) -> Result<ParsedPointFile> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut manifold: Option<ManifoldKind> = None;
    let mut points = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut has_weights: Option<bool> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(name) = rest.strip_prefix("manifold=") {
                let kind = ManifoldKind::parse(name)
                    .map_err(|e| format_err(path, line_no, e.to_string()))?;
                manifold = Some(kind);
            }
            continue;
        }
        let Some(kind) = manifold else {
            return Err(format_err(
                path,
                line_no,
                "data before the `# manifold=...` header",
            ));
        };
        let coord_dim = match kind {
            ManifoldKind::Sphere2 => 3,
            other => other.dimension(),
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let with_weight = match fields.len() {
            n if n == coord_dim => false,
            n if n == coord_dim + 1 => true,
            n => {
                return Err(format_err(
                    path,
                    line_no,
                    format!("expected {coord_dim} or {} fields, got {n}", coord_dim + 1),
                ))
            }
        };
        match has_weights {
            None => has_weights = Some(with_weight),
            Some(prev) if prev != with_weight => {
                return Err(format_err(
                    path,
                    line_no,
                    "inconsistent weight column across rows",
                ))
            }
            _ => {}
        }
        let mut values = Vec::with_capacity(fields.len());
        for f in &fields {
            values.push(f.parse::<f64>().map_err(|_| {
                format_err(path, line_no, format!("cannot parse `{f}` as a number"))
            })?);
        }
        if with_weight {
            weights.push(values.pop().unwrap());
        }
        points.push(Point::new(values));
    }
    let Some(manifold) = manifold else {
        return Err(format_err(path, 0, "missing `# manifold=...` header"));
    };
    if points.is_empty() {
        return Err(format_err(path, 0, "no data rows"));
    }
    Ok(ParsedPointFile {
        manifold,
        points,
        weights: has_weights.unwrap_or(false).then_some(weights),
    })
}

/// Read a weighted point set (uniform weights where the column is absent).
pub fn read_point_set(path: &Path) -> Result<WeightedPointSet> {
    let parsed = parse_point_file(path)?;
    WeightedPointSet::new(parsed.manifold, parsed.points, parsed.weights)
}

/// Read a quadrature rule; the weight column is mandatory and weights of
/// any sign are accepted.
pub fn read_rule(path: &Path) -> Result<QuadratureRule> {
    let parsed = parse_point_file(path)?;
    let Some(weights) = parsed.weights else {
        return Err(format_err(path, 0, "rule files require a weight column"));
    };
    let manifold = parsed.manifold.build()?;
    let nodes: Vec<Point> = parsed
        .points
        .iter()
        .map(|p| {
            let canon = manifold.canonicalize_point(p);
            manifold.validate_point(&canon).map(|_| canon)
        })
        .collect::<Result<_>>()?;
    Ok(QuadratureRule {
        manifold: parsed.manifold,
        nodes,
        weights,
        name: format!("file:{}", path.display()),
    })
}

pub fn write_point_set(
    path: &Path,
    kind: ManifoldKind,
    points: &[Point],
    weights: Option<&[f64]>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# manifold={}\n", kind.name()));
    for (i, p) in points.iter().enumerate() {
        let mut fields: Vec<String> = p.coords.iter().map(|c| format_f64(*c)).collect();
        if let Some(w) = weights {
            fields.push(format_f64(w[i]));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Sample a radial profile to `r,value` CSV for external plotting.
pub fn write_profile_csv(path: &Path, profile: &RadialProfile, samples: usize) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = String::from("r,value\n");
    let extent = profile.extent();
    for i in 0..samples {
        let r = extent * i as f64 / (samples - 1) as f64;
        out.push_str(&format!("{},{}\n", format_f64(r), format_f64(profile.eval(r))));
    }
    file.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}
