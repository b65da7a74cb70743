//! Algebra files, JSON reports and CSV tables.
//!
//! Algebra file:
//!
//! ```json
//! {"dim_center": 1, "dim_v": 2,
//!  "metric_center": [[1.0]], "metric_v": [[1.0, 0.0], [0.0, 1.0]],
//!  "structure": [{"a": 0, "b": 1, "z": [1.0]}]}
//! ```
//!
//! Only pairs `a < b` are listed (0-based); `[e_b, e_a]` is filled in as the
//! negative and every unlisted bracket is zero.
//!
//! Reports are written with sorted keys and every float in `{:.16e}` form
//! (17 significant digits), so the same inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::algebra::{MetricNilpotentAlgebra, RawAlgebra};
use crate::analytic::ConjugatePoint;
use crate::catalog;
use crate::error::{Error, Result};
use crate::geometry::GeodesicIC;
use crate::numeric::CrossReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim_center: usize,
    pub dim_v: usize,
    pub metric_center: Vec<Vec<f64>>,
    pub metric_v: Vec<Vec<f64>>,
    #[serde(default)]
    pub structure: Vec<StructureEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureEntry {
    pub a: usize,
    pub b: usize,
    pub z: Vec<f64>,
}

impl AlgebraFile {
    pub fn from_algebra(alg: &MetricNilpotentAlgebra) -> Self {
        let raw = alg.to_raw();
        let mut structure = Vec::new();
        for a in 0..raw.dim_v {
            for b in a + 1..raw.dim_v {
                let z = &raw.structure[a][b];
                if z.iter().any(|&c| c != 0.0) {
                    structure.push(StructureEntry { a, b, z: z.clone() });
                }
            }
        }
        Self {
            dim_center: raw.dim_center,
            dim_v: raw.dim_v,
            metric_center: raw.metric_center,
            metric_v: raw.metric_v,
            structure,
        }
    }

    pub fn to_raw(&self) -> Result<RawAlgebra> {
        let (p, q) = (self.dim_center, self.dim_v);
        let mut raw = RawAlgebra::abelian(p, q);
        raw.metric_center = self.metric_center.clone();
        raw.metric_v = self.metric_v.clone();
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.structure {
            if e.a >= e.b {
                return Err(Error::Parse(format!(
                    "structure pair ({}, {}) must have a < b",
                    e.a, e.b
                )));
            }
            if e.b >= q {
                return Err(Error::Parse(format!(
                    "structure index {} out of range for dim_v = {q}",
                    e.b
                )));
            }
            if e.z.len() != p {
                return Err(Error::DimensionMismatch {
                    what: "structure component count",
                    expected: p,
                    got: e.z.len(),
                });
            }
            if !seen.insert((e.a, e.b)) {
                return Err(Error::Parse(format!("structure pair ({}, {}) listed twice", e.a, e.b)));
            }
            raw.set_bracket(e.a, e.b, &e.z);
        }
        Ok(raw)
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("algebra file serializes");
        to_canonical_json(&value)
    }
}

pub fn algebra_from_json(text: &str) -> Result<MetricNilpotentAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    MetricNilpotentAlgebra::new(&file.to_raw()?)
}

pub fn algebra_to_json(alg: &MetricNilpotentAlgebra) -> String {
    AlgebraFile::from_algebra(alg).to_json()
}

pub fn load_algebra(path: &Path) -> Result<MetricNilpotentAlgebra> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    algebra_from_json(&text)
}

/// `catalog:NAME` or a path to an algebra file.
pub fn resolve_algebra(source: &str) -> Result<MetricNilpotentAlgebra> {
    match source.strip_prefix("catalog:") {
        Some(name) => catalog::by_name(name),
        None => load_algebra(Path::new(source)),
    }
}

/// Comma-separated reals, e.g. `1,0,-0.5`.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad coordinate {c:?} in {s:?}")))
        })
        .collect()
}

pub fn point_value(pt: &ConjugatePoint) -> Value {
    json!({
        "t0": pt.t0,
        "multiplicity": pt.multiplicity,
        "branch": pt.branch.as_str(),
        "residual": pt.residual,
        "flags": pt.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
    })
}

pub fn ic_value(ic: &GeodesicIC) -> Value {
    json!({
        "z0": ic.z0().z_part.as_slice(),
        "x0": ic.x0().v_part.as_slice(),
        "a": ic.a(),
        "b": ic.b(),
        "g": ic.g(),
    })
}

pub fn cross_report_value(rep: &CrossReport) -> Value {
    json!({
        "t_tol": rep.t_tol,
        "mult_strict": rep.mult_strict,
        "matched": rep.matched.iter().map(|m| json!({
            "analytic": point_value(&m.analytic),
            "numeric": point_value(&m.numeric),
            "dt": m.dt,
            "multiplicity_agrees": m.multiplicity_agrees,
        })).collect::<Vec<_>>(),
        "analytic_only": rep.analytic_only.iter().map(point_value).collect::<Vec<_>>(),
        "numeric_only": rep.numeric_only.iter().map(point_value).collect::<Vec<_>>(),
    })
}

/// Structured output of one CLI run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub algebra_id: String,
    pub ic: Value,
    pub config: Value,
    pub results: Vec<Value>,
    /// Present for `crosscheck` only.
    pub mismatches: Option<Vec<Value>>,
    pub version: String,
}

impl RunReport {
    pub fn new(command: &str, algebra_id: &str) -> Self {
        Self {
            command: command.into(),
            algebra_id: algebra_id.into(),
            ic: Value::Null,
            config: Value::Null,
            results: Vec::new(),
            mismatches: None,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.clone().into());
        m.insert("algebra_id".into(), self.algebra_id.clone().into());
        m.insert("ic".into(), self.ic.clone());
        m.insert("config".into(), self.config.clone());
        m.insert("results".into(), Value::Array(self.results.clone()));
        if let Some(mm) = &self.mismatches {
            m.insert("mismatches".into(), Value::Array(mm.clone()));
        }
        m.insert("version".into(), self.version.clone().into());
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&self.to_value())
    }
}

/// Pretty JSON with sorted keys and floats as `{:.16e}`.
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| {
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let _ = write!(out, "{:.16e}", n.as_f64().expect("f64 number"));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items.iter().all(|x| !x.is_array() && !x.is_object());
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                    if flat {
                        out.push(' ');
                    }
                }
                if !flat {
                    out.push('\n');
                    pad(out, depth + 1);
                }
                write_value(out, x, depth + 1);
            }
            if !flat {
                out.push('\n');
                pad(out, depth);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                pad(out, depth + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], depth + 1);
            }
            out.push('\n');
            pad(out, depth);
            out.push('}');
        }
    }
}

/// `t0,multiplicity,branch,residual` with a header row.
pub fn points_csv(points: &[ConjugatePoint]) -> String {
    let mut out = String::from("t0,multiplicity,branch,residual\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", p.t0, p.multiplicity, p.branch.as_str(), p.residual);
    }
    out
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub param: f64,
    pub point: ConjugatePoint,
}

/// `param,t0,multiplicity,branch` with a header row.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("param,t0,multiplicity,branch\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.param,
            r.point.t0,
            r.point.multiplicity,
            r.point.branch.as_str()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{Branch, PointFlag};
    use crate::catalog::heisenberg_h_type;

    #[test]
    fn catalog_round_trip_is_exact() {
        for name in catalog::STANDARD_NAMES {
            let alg = catalog::by_name(name).unwrap();
            let back = algebra_from_json(&algebra_to_json(&alg)).unwrap();
            assert_eq!(back.to_raw(), alg.to_raw(), "{name}");
            assert_eq!(back.pseudo_h(), alg.pseudo_h());
        }
    }

    #[test]
    fn loader_mirrors_pairs() {
        let text = r#"{"dim_center": 1, "dim_v": 2, "metric_center": [[1]],
            "metric_v": [[1, 0], [0, 1]], "structure": [{"a": 0, "b": 1, "z": [1]}]}"#;
        let alg = algebra_from_json(text).unwrap();
        assert_eq!(alg.structure_constant(1, 0, 0), -1.0);
        assert_eq!(alg.to_raw(), heisenberg_h_type(1).to_raw());
    }

    #[test]
    fn loader_rejects_bad_pairs() {
        let base = |s: &str| {
            format!(
                r#"{{"dim_center": 1, "dim_v": 2, "metric_center": [[1]], "metric_v": [[1, 0], [0, 1]], "structure": [{s}]}}"#
            )
        };
        assert!(matches!(
            algebra_from_json(&base(r#"{"a": 1, "b": 0, "z": [1]}"#)),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            algebra_from_json(&base(r#"{"a": 0, "b": 2, "z": [1]}"#)),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            algebra_from_json(&base(r#"{"a": 0, "b": 1, "z": [1, 2]}"#)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(algebra_from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn canonical_json_sorts_and_formats() {
        let v = json!({"b": 0.1, "a": [1, 2.5], "c": {"y": true, "x": null}});
        let s = to_canonical_json(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("[1, 2.5000000000000000e0]"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_layout() {
        let pts = vec![ConjugatePoint {
            t0: 2.0,
            multiplicity: 2,
            branch: Branch::NullCenter,
            residual: 0.0,
            flags: vec![PointFlag::Clustered],
        }];
        assert_eq!(points_csv(&pts), "t0,multiplicity,branch,residual\n2,2,null-center,0\n");
        let rows = vec![ScanRow {
            param: -3.0,
            point: pts[0].clone(),
        }];
        assert_eq!(scan_csv(&rows), "param,t0,multiplicity,branch\n-3,2,2,null-center\n");
    }

    #[test]
    fn vectors_parse() {
        assert_eq!(parse_vector("1, 0,-0.5").unwrap(), vec![1.0, 0.0, -0.5]);
        assert!(parse_vector("1,,2").is_err());
        assert!(parse_vector("nan").is_err());
    }
}
