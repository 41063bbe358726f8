//! Command reports and their JSON and table renderings.

use std::fmt::Write as _;

use num_bigint::BigInt;
use prym_core::linalg::{Matrix, RatMatrix};
use prym_core::poly::Polynomial;
use prym_core::{DoubleCover, HalfEdgeGraph, Rational};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub arguments: Map<String, Value>,
    pub results: Value,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

impl Report {
    pub fn new(command: &str, arguments: Value, results: Value) -> Self {
        let arguments = match arguments {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Report { command: command.to_string(), arguments, results, warnings: Vec::new() }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Table => self.to_table(),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let args: Vec<String> = self.arguments.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect();
        let _ = writeln!(out, "{} {}", self.command, args.join(" "));
        table_lines(&mut out, &self.results, 0);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_array() && !i.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => scalar(other),
    }
}

fn table_lines(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, item) in m {
                if is_flat(item) {
                    let _ = writeln!(out, "{pad}{k}: {}", inline(item));
                } else if item.as_object().is_some_and(|o| o.values().all(|x| !x.is_array() && !x.is_object())) {
                    let terms: Vec<String> = item.as_object().unwrap().iter().map(|(a, b)| format!("{a}={}", scalar(b))).collect();
                    let _ = writeln!(out, "{pad}{k}: {{{}}}", terms.join(", "));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    table_lines(out, item, depth + 1);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_flat(item) {
                    let _ = writeln!(out, "{pad}{}", inline(item));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    table_lines(out, item, depth + 1);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

pub fn rational(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn integers(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

pub fn matrix<T: ToString + Clone + num_traits::Zero>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(x.to_string())).collect())).collect())
}

pub fn rational_matrix(m: &RatMatrix) -> Value {
    matrix(m)
}

/// Nonzero coefficients of a chain keyed by edge label, in edge order.
pub fn chain(g: &HalfEdgeGraph, c: &[BigInt]) -> Value {
    let mut m = Map::new();
    for e in g.edges().filter(|e| c[e.0] != BigInt::from(0)) {
        m.insert(g.edge_label(e).to_string(), Value::String(c[e.0].to_string()));
    }
    Value::Object(m)
}

/// The chain written as `a + 2*b - c`.
pub fn chain_text(g: &HalfEdgeGraph, c: &[BigInt]) -> String {
    let mut s = String::new();
    for e in g.edges().filter(|e| c[e.0] != BigInt::from(0)) {
        let x = &c[e.0];
        let (sign, mag) = if x < &BigInt::from(0) { ("-", -x) } else { ("+", x.clone()) };
        if s.is_empty() {
            if sign == "-" {
                s.push('-');
            }
        } else {
            let _ = write!(s, " {sign} ");
        }
        if mag != BigInt::from(1) {
            let _ = write!(s, "{mag}*");
        }
        s.push_str(g.edge_label(e));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

pub fn edge_names(c: &DoubleCover) -> Vec<String> {
    c.base().edges().map(|e| c.base().edge_label(e).to_string()).collect()
}

pub fn labels(g: &HalfEdgeGraph, edges: impl IntoIterator<Item = prym_core::EdgeId>) -> Value {
    Value::Array(edges.into_iter().map(|e| Value::String(g.edge_label(e).to_string())).collect())
}

/// Monomial map `{"a*b": "2", ...}` plus its rendered form.
pub fn polynomial(p: &Polynomial, names: &[String]) -> Value {
    let terms: Map<String, Value> = p.named_terms(names).into_iter().map(|(k, v)| (k, rational(&v))).collect();
    json!({ "monomials": terms, "text": p.render(names) })
}

pub fn polynomial_matrix(m: &[Vec<Polynomial>], names: &[String]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|p| Value::String(p.render(names))).collect())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rendering_is_indented() {
        let r = Report::new("gram", json!({"file": "x.json"}), json!({"dimension": 2, "gram": [["1", "0"], ["0", "1"]]}));
        assert_eq!(r.to_table(), "gram file=x.json\ndimension: 2\ngram:\n  [1, 0]\n  [0, 1]\n");
    }
}
