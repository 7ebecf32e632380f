//! Stable text rendering for reports.
//!
//! Reals always carry exactly six fractional digits and JSON object keys are
//! emitted in sorted order, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

/// Six fractional digits. `std` formatting rounds exact binary ties to even.
pub fn real(value: f64) -> String {
    let out = format!("{value:.6}");
    // -0.000000 would make otherwise equal outputs differ
    if out.starts_with('-') && out[1..].bytes().all(|b| b == b'0' || b == b'.') {
        out[1..].to_string()
    } else {
        out
    }
}

/// Minimal JSON tree for output only.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    Array(Vec<Json>),
    Object(BTreeMap<String, Json>),
}

impl Json {
    pub fn object<K: Into<String>>(entries: impl IntoIterator<Item = (K, Json)>) -> Json {
        Json::Object(entries.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn str(value: impl ToString) -> Json {
        Json::Str(value.to_string())
    }

    pub fn opt_real(value: Option<f64>) -> Json {
        value.map_or(Json::Null, Json::Real)
    }

    /// Two-space indented rendering with a trailing newline.
    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        self.write_pretty(&mut out, 0).expect("writing to a String cannot fail");
        out.push('\n');
        out
    }

    fn write_pretty(&self, out: &mut String, depth: usize) -> fmt::Result {
        let pad = |n: usize| "  ".repeat(n);
        match self {
            Json::Array(items) if !items.is_empty() => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad(depth + 1));
                    item.write_pretty(out, depth + 1)?;
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                write!(out, "{}]", pad(depth))
            }
            Json::Object(map) if !map.is_empty() => {
                out.push_str("{\n");
                for (i, (key, value)) in map.iter().enumerate() {
                    write!(out, "{}{}: ", pad(depth + 1), quote(key))?;
                    value.write_pretty(out, depth + 1)?;
                    out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
                }
                write!(out, "{}}}", pad(depth))
            }
            other => write!(out, "{other}"),
        }
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl fmt::Display for Json {
    /// Compact rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Json::Null => f.write_str("null"),
            Json::Bool(b) => write!(f, "{b}"),
            Json::Int(i) => write!(f, "{i}"),
            Json::Real(x) if x.is_finite() => f.write_str(&real(*x)),
            Json::Real(_) => f.write_str("null"),
            Json::Str(s) => f.write_str(&quote(s)),
            Json::Array(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
            Json::Object(map) => {
                f.write_str("{")?;
                for (i, (key, value)) in map.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}:{value}", quote(key))?;
                }
                f.write_str("}")
            }
        }
    }
}
