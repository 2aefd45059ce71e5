use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_core::{GraphError, RawSkeleton, Skeleton};
use crate::kms_engine::DynamicsSpec;

/// Input file: labelled vertices, one grid per colour with
/// `matrices[i][row][col]` = edges of colour `i` from `vertices[col]` to
/// `vertices[row]`, and a choice of dynamics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub vertices: Vec<String>,
    pub k: usize,
    pub matrices: Vec<Vec<Vec<i64>>>,
    #[serde(default = "preferred")]
    pub dynamics: DynamicsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationally_independent: Option<bool>,
}

fn preferred() -> DynamicsSpec {
    DynamicsSpec::Preferred
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed input at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
}

impl InputDocument {
    /// Whether the caller attests rational independence; defaults to true.
    pub fn attestation(&self) -> bool {
        self.rationally_independent.unwrap_or(true)
    }

    pub fn raw_skeleton(&self) -> RawSkeleton {
        RawSkeleton {
            vertex_labels: self.vertices.clone(),
            matrices: self.matrices.clone(),
        }
    }

    pub fn skeleton(&self) -> Result<Skeleton, GraphError> {
        Skeleton::from_raw(&self.raw_skeleton())
    }

    /// Warnings about defaults that were filled in.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.rationally_independent.is_none() {
            out.push(
                "rationally_independent not given: assuming the rates are rationally independent"
                    .to_string(),
            );
        }
        out
    }
}

fn field(field: &'static str, message: impl Into<String>) -> InputError {
    InputError::Field {
        field,
        message: message.into(),
    }
}

/// Parses and shape-checks an input document. Matrix contents (signs,
/// commutation, sources) are left to the skeleton validator.
pub fn parse_input(text: &str) -> Result<InputDocument, InputError> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.vertices.is_empty() {
        return Err(field("vertices", "must list at least one vertex"));
    }
    if doc.k == 0 {
        return Err(field("k", "must be at least 1"));
    }
    if doc.matrices.len() != doc.k {
        return Err(field(
            "matrices",
            format!("expected {} grids, found {}", doc.k, doc.matrices.len()),
        ));
    }
    let n = doc.vertices.len();
    for (i, grid) in doc.matrices.iter().enumerate() {
        if grid.len() != n || grid.iter().any(|row| row.len() != n) {
            return Err(field("matrices", format!("grid {i} is not {n}×{n}")));
        }
    }
    if let DynamicsSpec::Explicit { r, .. } = &doc.dynamics {
        if r.len() != doc.k {
            return Err(field(
                "dynamics.r",
                format!("expected {} rates, found {}", doc.k, r.len()),
            ));
        }
        if let Some(x) = r.iter().find(|&&x| !(x > 0.0)) {
            return Err(field(
                "dynamics.r",
                format!("rate {x} is not strictly positive"),
            ));
        }
    }
    Ok(doc)
}
