//! Trace files: one interaction outcome per line.
//!
//! ```text
//! # subject: bob
//! 0.8
//! 0.7   # comments may trail a value
//!
//! 0.2
//! ```
//!
//! Blank lines and `#` comments are ignored. A `# subject: NAME` comment
//! before the first value names the peer the trace is about.

use std::fmt;

use thiserror::Error;
use trustnet_core::TrustTenths;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceFile {
    pub subject: Option<String>,
    pub values: Vec<TrustTenths>,
}

impl TraceFile {
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut trace = TraceFile::default();
        for (i, raw) in text.lines().enumerate() {
            let (content, comment) = match raw.split_once('#') {
                Some((before, after)) => (before.trim(), Some(after.trim())),
                None => (raw.trim(), None),
            };
            if content.is_empty() {
                if let Some(name) = comment.and_then(|c| c.strip_prefix("subject:")) {
                    if trace.values.is_empty() && trace.subject.is_none() {
                        trace.subject = Some(name.trim().to_string());
                    }
                }
                continue;
            }
            let value = content
                .parse::<TrustTenths>()
                .map_err(|e| TraceError { line: i + 1, message: e.to_string() })?;
            trace.values.push(value);
        }
        Ok(trace)
    }
}

impl fmt::Display for TraceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(subject) = &self.subject {
            writeln!(f, "# subject: {subject}")?;
        }
        for value in &self.values {
            writeln!(f, "{value}")?;
        }
        Ok(())
    }
}
