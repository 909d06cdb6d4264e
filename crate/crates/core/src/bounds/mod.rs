//! Analytic upper bounds on `|h|^2` over all binary configurations.

mod ibd;
mod ni;
mod nio;

use std::collections::BTreeMap;

use serde::Serialize;

pub use ibd::{ibd_achiever, ibd_bound, IbdAchiever, IbdIntermediates, UNIT_MODULUS_TOL};
pub use ni::ni_bound;
pub use nio::{nio_bound, NioOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoundKind {
    Ni,
    Nio,
    Ibd,
    Sdr,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Ni => "NI",
            BoundKind::Nio => "NIO",
            BoundKind::Ibd => "IBD",
            BoundKind::Sdr => "SDR",
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A bound value with its validity and supporting diagnostics. `value` is
/// `None` exactly when `valid` is false.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: Option<f64>,
    pub valid: bool,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl BoundReport {
    pub fn valid(kind: BoundKind, value: f64) -> Self {
        Self {
            kind,
            value: Some(value),
            valid: true,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn invalid(kind: BoundKind, reason: impl Into<String>) -> Self {
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert("reason".to_string(), serde_json::Value::String(reason.into()));
        Self {
            kind,
            value: None,
            valid: false,
            diagnostics,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }
}
