//! Problem documents: a cone, a system and optional per-command parameters.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cone::{ConeKind, ConeSpec, PolyhedralCone, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{from_rows, to_rows, Matrix};
use crate::norms::NormMode;
use crate::semigroup::{validate_jump_family, MatrixFamily, Semantics, DEFAULT_JUMP_TOL};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JsrTask {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinements: Option<usize>,
    /// `"auto"` or `"max_row_sum"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    /// Order unit for an order-unit norm; overrides `norm`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_unit: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormTask {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<NormMode>,
    /// `"order_unit"`, `"sup"` or `"l1"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_unit: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundedness_depth: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateTask {
    pub x0: Vec<f64>,
    /// Pieces `(index, duration)` in time order.
    pub signal: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_piece: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LipschitzTask {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub require_k_positive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_outside: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tasks {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jsr: Option<JsrTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateTask>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<LipschitzTask>,
}

/// A validated problem document.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub cone_spec: ConeSpec,
    pub cone: PolyhedralCone,
    pub family: MatrixFamily,
    pub tasks: Tasks,
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), message: message.into() }
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::Validation { path: path.to_string(), message: message.into() }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_err(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(path, "expected an array"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(path, "expected a number"))
}

fn vector(v: &Value, path: &str) -> Result<Vec<f64>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| number(x, &format!("{path}[{i}]"))).collect()
}

fn rows(v: &Value, path: &str) -> Result<Vec<Vec<f64>>> {
    let out: Vec<Vec<f64>> =
        array(v, path)?.iter().enumerate().map(|(i, r)| vector(r, &format!("{path}[{i}]"))).collect::<Result<_>>()?;
    if let Some(first) = out.first() {
        for (i, r) in out.iter().enumerate() {
            if r.len() != first.len() {
                return Err(parse_err(&format!("{path}[{i}]"), format!("ragged row: {} entries, expected {}", r.len(), first.len())));
            }
        }
    }
    Ok(out)
}

fn square(v: &Value, path: &str, dim: usize) -> Result<Matrix> {
    let r = rows(v, path)?;
    if r.is_empty() || r.len() != r[0].len() {
        return Err(invalid(path, "matrices must be square"));
    }
    if r.len() != dim {
        return Err(invalid(path, format!("matrix is {0}x{0}, cone dimension is {dim}", r.len())));
    }
    Ok(from_rows(&r))
}

fn check_keys(map: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    for k in map.keys() {
        if !allowed.contains(&k.as_str()) {
            let at = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
            return Err(parse_err(&at, "unknown field"));
        }
    }
    Ok(())
}

fn parse_cone(v: &Value) -> Result<ConeSpec> {
    let map = object(v, "cone")?;
    check_keys(map, "cone", &["kind", "dim", "generators", "facets"])?;
    let kind: ConeKind = serde_json::from_value(map.get("kind").cloned().ok_or_else(|| parse_err("cone.kind", "missing field"))?)
        .map_err(|_| parse_err("cone.kind", "expected \"orthant\", \"simplicial\" or \"general\""))?;
    let dim = match map.get("dim") {
        Some(d) => d.as_u64().ok_or_else(|| parse_err("cone.dim", "expected a positive integer"))? as usize,
        None => return Err(parse_err("cone.dim", "missing field")),
    };
    let generators = map.get("generators").map(|g| rows(g, "cone.generators")).transpose()?;
    let facets = map.get("facets").map(|f| rows(f, "cone.facets")).transpose()?;
    Ok(ConeSpec { kind, dim, generators, facets })
}

fn parse_system(v: &Value, dim: usize) -> Result<MatrixFamily> {
    let map = object(v, "system")?;
    check_keys(map, "system", &["semantics", "matrices", "pairs", "labels"])?;
    let semantics: Semantics =
        serde_json::from_value(map.get("semantics").cloned().ok_or_else(|| parse_err("system.semantics", "missing field"))?)
            .map_err(|_| parse_err("system.semantics", "expected \"discrete\", \"continuous\" or \"jump\""))?;
    let family = if semantics == Semantics::Jump {
        let pairs = map.get("pairs").ok_or_else(|| parse_err("system.pairs", "missing field"))?;
        let mut out = Vec::new();
        for (k, p) in array(pairs, "system.pairs")?.iter().enumerate() {
            let path = format!("system.pairs[{k}]");
            let pm = object(p, &path)?;
            check_keys(pm, &path, &["A", "Pi"])?;
            let a = square(pm.get("A").ok_or_else(|| parse_err(&format!("{path}.A"), "missing field"))?, &format!("{path}.A"), dim)?;
            let pi = square(pm.get("Pi").ok_or_else(|| parse_err(&format!("{path}.Pi"), "missing field"))?, &format!("{path}.Pi"), dim)?;
            out.push((a, pi));
        }
        if out.is_empty() {
            return Err(invalid("system.pairs", "family is empty"));
        }
        validate_jump_family(out, DEFAULT_JUMP_TOL).map_err(|e| match e {
            Error::NotProjection(k) | Error::NotCommuting(k) => invalid(&format!("system.pairs[{k}]"), e.to_string()),
            other => invalid("system.pairs", other.to_string()),
        })?
    } else {
        let mats = map.get("matrices").ok_or_else(|| parse_err("system.matrices", "missing field"))?;
        let mats = array(mats, "system.matrices")?
            .iter()
            .enumerate()
            .map(|(k, m)| square(m, &format!("system.matrices[{k}]"), dim))
            .collect::<Result<Vec<_>>>()?;
        if mats.is_empty() {
            return Err(invalid("system.matrices", "family is empty"));
        }
        MatrixFamily::new(semantics, mats).map_err(|e| invalid("system.matrices", e.to_string()))?
    };
    match map.get("labels") {
        None => Ok(family),
        Some(l) => {
            let labels = array(l, "system.labels")?
                .iter()
                .enumerate()
                .map(|(i, s)| s.as_str().map(str::to_string).ok_or_else(|| parse_err(&format!("system.labels[{i}]"), "expected a string")))
                .collect::<Result<Vec<_>>>()?;
            if labels.len() != family.len() {
                return Err(invalid("system.labels", format!("{} labels for {} members", labels.len(), family.len())));
            }
            Ok(family.with_labels(labels))
        }
    }
}

/// Parse and validate a problem document. Errors carry a path into the document.
pub fn parse_problem(document: &str) -> Result<ProblemSpec> {
    let root: Value = serde_json::from_str(document)
        .map_err(|e| parse_err(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let map = object(&root, "$")?;
    check_keys(map, "", &["cone", "system", "tasks"])?;
    let cone_spec = parse_cone(map.get("cone").ok_or_else(|| parse_err("cone", "missing field"))?)?;
    let cone = PolyhedralCone::from_spec(&cone_spec, DEFAULT_TOL).map_err(|e| invalid("cone", e.to_string()))?;
    let family = parse_system(map.get("system").ok_or_else(|| parse_err("system", "missing field"))?, cone.dim)?;
    let tasks = match map.get("tasks") {
        None => Tasks::default(),
        Some(t) => {
            let tm = object(t, "tasks")?;
            check_keys(tm, "tasks", &["jsr", "norm", "simulate", "lipschitz"])?;
            for (k, v) in tm {
                let path = format!("tasks.{k}");
                let r = match k.as_str() {
                    "jsr" => serde_json::from_value::<JsrTask>(v.clone()).err(),
                    "norm" => serde_json::from_value::<NormTask>(v.clone()).err(),
                    "simulate" => serde_json::from_value::<SimulateTask>(v.clone()).err(),
                    _ => serde_json::from_value::<LipschitzTask>(v.clone()).err(),
                };
                if let Some(e) = r {
                    return Err(parse_err(&path, e.to_string()));
                }
            }
            serde_json::from_value(t.clone()).map_err(|e| parse_err("tasks", e.to_string()))?
        }
    };
    if let Some(s) = &tasks.simulate {
        if s.x0.len() != cone.dim {
            return Err(invalid("tasks.simulate.x0", format!("expected {} entries, found {}", cone.dim, s.x0.len())));
        }
    }
    Ok(ProblemSpec { cone_spec, cone, family, tasks })
}

impl ProblemSpec {
    pub fn to_json(&self) -> Value {
        let system = if self.family.semantics == Semantics::Jump {
            let pairs: Vec<Value> =
                self.family.pairs.iter().map(|p| json!({ "A": to_rows(&p.a), "Pi": to_rows(&p.pi) })).collect();
            json!({ "semantics": self.family.semantics, "pairs": pairs })
        } else {
            let mats: Vec<Vec<Vec<f64>>> = self.family.matrices.iter().map(to_rows).collect();
            json!({ "semantics": self.family.semantics, "matrices": mats })
        };
        let mut system = system;
        if let Some(l) = &self.family.labels {
            system["labels"] = json!(l);
        }
        let mut doc = json!({ "cone": self.cone_spec, "system": system });
        if self.tasks != Tasks::default() {
            doc["tasks"] = serde_json::to_value(&self.tasks).unwrap_or(Value::Null);
        }
        doc
    }

    pub fn to_document(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "cone": {"kind": "orthant", "dim": 2},
        "system": {"semantics": "discrete", "matrices": [[[0, 1], [1, 0]], [[1, 0], [0, 1]]], "labels": ["swap", "id"]}
    }"#;

    #[test]
    fn minimal_document() {
        let p = parse_problem(MINIMAL).unwrap();
        assert_eq!(p.family.len(), 2);
        assert_eq!(p.cone.dim, 2);
        assert_eq!(p.family.labels.as_deref().unwrap()[0], "swap");
    }

    #[test]
    fn roundtrip() {
        let p = parse_problem(MINIMAL).unwrap();
        assert_eq!(parse_problem(&p.to_document()).unwrap(), p);
        let doc = r#"{
            "cone": {"kind": "simplicial", "dim": 2, "generators": [[1, 0], [1, 1]]},
            "system": {"semantics": "jump", "pairs": [{"A": [[-1, 0], [0, -2]], "Pi": [[1, 0], [0, 0]]}]},
            "tasks": {"jsr": {"depth": 8, "delta": 0.01}, "simulate": {"x0": [1, 1], "signal": [[0, 0.5]]}}
        }"#;
        let p = parse_problem(doc).unwrap();
        assert_eq!(p.tasks.jsr.as_ref().unwrap().depth, Some(8));
        assert_eq!(parse_problem(&p.to_document()).unwrap(), p);
    }

    #[test]
    fn non_square_matrix() {
        let doc = r#"{"cone": {"kind": "orthant", "dim": 2},
            "system": {"semantics": "discrete", "matrices": [[[1, 0, 0], [0, 1, 0]]]}}"#;
        assert_eq!(
            parse_problem(doc).unwrap_err(),
            Error::Validation { path: "system.matrices[0]".into(), message: "matrices must be square".into() }
        );
    }

    #[test]
    fn non_commuting_pair_located() {
        let doc = r#"{"cone": {"kind": "orthant", "dim": 2},
            "system": {"semantics": "jump", "pairs": [
                {"A": [[0, 0], [0, 0]], "Pi": [[1, 0], [0, 1]]},
                {"A": [[0, 1], [0, 0]], "Pi": [[1, 0], [0, 0]]}]}}"#;
        match parse_problem(doc).unwrap_err() {
            Error::Validation { path, message } => {
                assert_eq!(path, "system.pairs[1]");
                assert!(message.contains("do not commute"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn located_parse_errors() {
        let cases = [
            (r#"{"cone": {"kind": "orthant", "dim": 2}, "system": {"semantics": "discrete", "matrices": [[[1, 0], [0, "x"]]]}}"#, "system.matrices[0][1][1]"),
            (r#"{"cone": {"kind": "cube", "dim": 2}, "system": {"semantics": "discrete", "matrices": []}}"#, "cone.kind"),
            (r#"{"cone": {"kind": "orthant", "dim": 2}, "system": {"semantics": "hybrid", "matrices": []}}"#, "system.semantics"),
            (r#"{"cone": {"kind": "orthant", "dim": 2}, "system": {"semantics": "discrete", "matrices": [[[1, 0], [0]]]}}"#, "system.matrices[0][1]"),
            (r#"{"cone": {"kind": "orthant", "dim": 2}, "system": {"semantics": "discrete", "matrices": [[[1, 0], [0, 1]]]}, "tasks": {"jsr": {"depth": "deep"}}}"#, "tasks.jsr"),
            (r#"{"cone": {"kind": "orthant", "dim": 2}, "extra": 1}"#, "extra"),
        ];
        for (doc, want) in cases {
            match parse_problem(doc).unwrap_err() {
                Error::Parse { path, .. } => assert_eq!(path, want, "{doc}"),
                e => panic!("unexpected {e:?} for {doc}"),
            }
        }
        assert!(matches!(parse_problem("{").unwrap_err(), Error::Parse { .. }));
    }

    #[test]
    fn bad_cone_is_validation_error() {
        let doc = r#"{"cone": {"kind": "simplicial", "dim": 2, "generators": [[1, 0], [2, 0]]},
            "system": {"semantics": "discrete", "matrices": [[[1, 0], [0, 1]]]}}"#;
        assert!(matches!(parse_problem(doc).unwrap_err(), Error::Validation { path, .. } if path == "cone"));
    }
}
