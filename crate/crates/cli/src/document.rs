//! JSON cover documents.

use std::str::FromStr;

use num_traits::Signed;
use prym_core::cover::CoverBuilder;
use prym_core::{DoubleCover, Rational, Sign};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CoverDocument {
    pub schema_version: u32,
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    #[serde(default)]
    pub dilated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub ends: [String; 2],
    /// `"p/q"` or an integer.
    pub length: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dilated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported schemaVersion {0}, expected {SCHEMA_VERSION}")]
    Version(u32),
    #[error("{context}: {message}")]
    Element { context: String, message: String },
    #[error("invalid cover: {0}")]
    Cover(#[from] prym_core::Error),
}

fn element(context: String, message: impl Into<String>) -> DocumentError {
    DocumentError::Element { context, message: message.into() }
}

impl CoverDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// Checks the document and builds the sign-normalized cover.
    pub fn to_cover(&self) -> Result<DoubleCover, DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::Version(self.schema_version));
        }
        let dilated = |id: &str| self.vertices.iter().find(|v| v.id == id).map(|v| v.dilated);
        let mut b = CoverBuilder::new();
        for v in &self.vertices {
            b = b.vertex(&v.id, v.dilated);
        }
        for (i, e) in self.edges.iter().enumerate() {
            let context = format!("edges[{i}] ({})", e.id);
            let length = parse_length(&e.length).map_err(|m| element(context.clone(), m))?;
            let [tail, head] = &e.ends;
            let lookup = |v: &String| dilated(v).ok_or_else(|| element(context.clone(), format!("unknown vertex {v}")));
            let free = !e.dilated && !lookup(tail)? && !lookup(head)?;
            b = if e.dilated {
                if e.sign.is_some() {
                    return Err(element(context, "a dilated edge carries no sign"));
                }
                b.dilated_edge(&e.id, tail, head, length)
            } else if free {
                let sign = match e.sign {
                    Some(s) => Sign::from_value(s.into()).ok_or_else(|| element(context.clone(), "sign must be 1 or -1"))?,
                    None => return Err(element(context, "a free edge requires a sign")),
                };
                b.edge(&e.id, tail, head, length, sign)
            } else {
                if e.sign.is_some() {
                    return Err(element(context, "an edge at a dilated vertex carries no sign"));
                }
                b.edge(&e.id, tail, head, length, Sign::Plus)
            };
        }
        Ok(b.build()?)
    }

    /// Document for a cover, in base order with normalized signs.
    pub fn from_cover(c: &DoubleCover) -> Self {
        let g = c.base();
        CoverDocument {
            schema_version: SCHEMA_VERSION,
            vertices: g
                .vertices()
                .map(|v| VertexEntry { id: g.vertex_label(v).to_string(), dilated: c.is_dilated_vertex(v) })
                .collect(),
            edges: g
                .edges()
                .map(|e| {
                    let (a, b) = g.endpoints(e);
                    EdgeEntry {
                        id: g.edge_label(e).to_string(),
                        ends: [g.vertex_label(a).to_string(), g.vertex_label(b).to_string()],
                        length: format_rational(c.length(e)),
                        dilated: c.is_dilated_edge(e),
                        sign: c.is_free_edge(e).then(|| c.sign(e).value() as i8),
                    }
                })
                .collect(),
        }
    }
}

pub fn parse_length(s: &str) -> Result<Rational, String> {
    let r = Rational::from_str(s.trim()).map_err(|_| format!("length {s:?} is not a rational \"p/q\""))?;
    if !r.is_positive() {
        return Err(format!("length {s} is not positive"));
    }
    Ok(r)
}

/// `p/q` in lowest terms, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}
