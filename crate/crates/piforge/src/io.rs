//! Space files and report files.
//!
//! A space file is either edge form
//! `{"vertices":[{"id","weight"}], "edges":[{"u","v","length"}], "resolution", "scale_cap"}`
//! or matrix form, which adds `"matrix"` (rows in vertex order) and keeps
//! `"edges"` as the solid edges. Edge endpoints are vertex ids.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::corpus::{self, Generated};
use crate::error::{Error, Result};
use crate::space::{Edge, Space};

pub const TOOL_VERSION: &str = concat!("piforge ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: i64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: i64,
    pub v: i64,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub vertices: Vec<VertexRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub resolution: f64,
    pub scale_cap: f64,
}

impl SpaceFile {
    /// Canonical record of a space. Spaces whose metric is not the edge
    /// metric (matrix form or metric-only arcs) are written in matrix form.
    pub fn from_space(space: &Space) -> SpaceFile {
        SpaceFile {
            vertices: (0..space.n())
                .map(|v| VertexRecord {
                    id: space.id(v),
                    weight: space.weight(v),
                })
                .collect(),
            edges: space
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    u: space.id(e.u),
                    v: space.id(e.v),
                    length: e.length,
                })
                .collect(),
            matrix: (space.is_matrix_form() || space.has_arcs()).then(|| space.matrix()),
            resolution: space.resolution(),
            scale_cap: space.scale_cap(),
        }
    }

    pub fn to_space(&self) -> Result<Space> {
        let ids: Vec<i64> = self.vertices.iter().map(|v| v.id).collect();
        let weights: Vec<f64> = self.vertices.iter().map(|v| v.weight).collect();
        let mut index = std::collections::HashMap::new();
        for (i, &id) in ids.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(Error::Schema(format!("vertices[{i}].id: duplicate id {id}")));
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let end = |id: i64, field: &str| {
                index
                    .get(&id)
                    .copied()
                    .ok_or_else(|| Error::Schema(format!("edges[{k}].{field}: unknown vertex id {id}")))
            };
            edges.push(Edge {
                u: end(e.u, "u")?,
                v: end(e.v, "v")?,
                length: e.length,
            });
        }
        match &self.matrix {
            Some(m) => Space::from_matrix(ids, weights, m.clone(), edges, self.resolution, self.scale_cap),
            None => Space::from_edges(ids, weights, edges, self.resolution, self.scale_cap),
        }
    }
}

/// Parses a space document; schema errors name the offending field.
pub fn parse_space(text: &str) -> Result<Space> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SpaceFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema(format!("{path}: {}", e.into_inner()))
    })?;
    file.to_space()
}

pub fn load_space(path: impl AsRef<Path>) -> Result<Space> {
    parse_space(&std::fs::read_to_string(path)?)
}

pub fn space_to_json(space: &Space) -> String {
    serde_json::to_string_pretty(&SpaceFile::from_space(space)).expect("space records serialize")
}

pub fn save_space(path: impl AsRef<Path>, space: &Space) -> Result<()> {
    std::fs::write(path, space_to_json(space) + "\n")?;
    Ok(())
}

/// Resolves a space spec: `file:PATH`, a path ending in `.json`, or a
/// generator spec understood by [`corpus::generate`].
pub fn resolve_space(spec: &str) -> Result<Generated> {
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(load_space(path)?.into());
    }
    if spec.ends_with(".json") {
        return Ok(load_space(spec)?.into());
    }
    corpus::generate(spec)
}

/// One inequality `lhs ≤ rhs` with `margin = rhs − lhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    #[serde(deserialize_with = "nullable_f64")]
    pub lhs: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub rhs: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub margin: f64,
    pub witness: Value,
}

impl CheckResult {
    pub fn new(check: impl Into<String>, lhs: f64, rhs: f64, witness: Value) -> CheckResult {
        CheckResult {
            check: check.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            witness,
        }
    }

    /// Holds up to the comparison tolerance. Non-finite margins fail unless
    /// the bound is `+∞`.
    pub fn holds(&self) -> bool {
        if self.rhs == f64::INFINITY && !self.lhs.is_nan() {
            return true;
        }
        crate::space::le(self.lhs, self.rhs)
    }
}

// non-finite numbers are written as null
fn nullable_f64<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool_version: String,
    pub space_spec: String,
    pub operation: String,
    pub params: Value,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn new(space_spec: impl Into<String>, operation: impl Into<String>, params: Value) -> Report {
        Report {
            tool_version: TOOL_VERSION.into(),
            space_spec: space_spec.into(),
            operation: operation.into(),
            params,
            results: Vec::new(),
        }
    }

    pub fn push(&mut self, result: CheckResult) {
        self.results.push(result);
    }

    pub fn all_hold(&self) -> bool {
        self.results.iter().all(CheckResult::holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn parse_report(text: &str) -> Result<Report> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema(format!("{path}: {}", e.into_inner()))
    })
}

pub fn save_report(path: impl AsRef<Path>, report: &Report) -> Result<()> {
    std::fs::write(path, report.to_json() + "\n")?;
    Ok(())
}

pub fn load_report(path: impl AsRef<Path>) -> Result<Report> {
    parse_report(&std::fs::read_to_string(path)?)
}
