//! Bracketed results for quantities a finite computation may not pin exactly.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    /// Exhaustive enumeration; lower = upper = value.
    ExactSignEnumeration,
    /// Sup of subset sums S with the two-sided bracket [S, 2S].
    SubsetSupSandwich,
    /// Multi-start flip descent; lower bound only certified.
    LocalSearch,
    /// Norm of a truncated column, extended by a declared tail when possible.
    TruncatedNorm,
}

/// A bracket [lower, upper] around a norm-like quantity.
///
/// Invariants: lower is always a certified lower bound; `upper = None` means
/// nothing above the computed value is certified; `value` is set only when
/// the bracket collapses (lower == upper == value).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: Option<f64>,
    pub value: Option<f64>,
    pub method: EstimateMethod,
    pub certificate: String,
}

impl NormEstimate {
    pub fn exact(value: f64, method: EstimateMethod, certificate: String) -> Self {
        NormEstimate { lower: value, upper: Some(value), value: Some(value), method, certificate }
    }

    pub fn is_exact(&self) -> bool {
        self.value.is_some()
    }

    /// Worst-case relative width of the bracket; infinite when open above.
    pub fn relative_gap(&self) -> f64 {
        match self.upper {
            Some(u) => (u - self.lower) / u.abs().max(1e-300),
            None => f64::INFINITY,
        }
    }
}
