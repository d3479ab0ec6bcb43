//! Declared decay bounds for the part of a matrix a truncation cannot see.
//!
//! A model bounds a nonnegative sequence at every index past the truncation,
//! and everything derived from it is an upper bound: tails of q-th power
//! series, sup tails, and norms extended beyond a finite head. Divergent
//! combinations return `None` rather than a junk number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqspace::{self, SpaceKind, SpaceSpec};
use crate::vector::FiniteVector;

/// Bound on a nonnegative sequence: `value(i)` dominates the true term for
/// every i past the point the model was declared for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// constant * i^(-exponent)
    PowerDecay {
        #[serde(default = "one")]
        constant: f64,
        exponent: f64,
    },
    /// constant * ratio^i
    Geometric {
        #[serde(default = "one")]
        constant: f64,
        ratio: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl TailModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            TailModel::PowerDecay { constant, exponent } => {
                if !constant.is_finite() || *constant < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "tail model constant must be finite and nonnegative, got {constant}"
                    )));
                }
                if !exponent.is_finite() || *exponent <= 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "power decay exponent must be positive, got {exponent}"
                    )));
                }
            }
            TailModel::Geometric { constant, ratio } => {
                if !constant.is_finite() || *constant < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "tail model constant must be finite and nonnegative, got {constant}"
                    )));
                }
                if !ratio.is_finite() || *ratio <= 0.0 || *ratio >= 1.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "geometric ratio must lie in (0, 1), got {ratio}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pointwise bound at index i (1-based).
    pub fn value(&self, i: usize) -> f64 {
        match self {
            TailModel::PowerDecay { constant, exponent } => {
                constant * (i as f64).powf(-exponent)
            }
            TailModel::Geometric { constant, ratio } => constant * ratio.powi(i as i32),
        }
    }

    /// Same decay with the constant multiplied by c >= 0.
    pub fn scale(&self, c: f64) -> Result<TailModel> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tail scale factor must be finite and nonnegative, got {c}"
            )));
        }
        Ok(match self {
            TailModel::PowerDecay { constant, exponent } => {
                TailModel::PowerDecay { constant: constant * c, exponent: *exponent }
            }
            TailModel::Geometric { constant, ratio } => {
                TailModel::Geometric { constant: constant * c, ratio: *ratio }
            }
        })
    }

    /// Model for the alpha-th power of the bounded sequence.
    pub fn pow(&self, alpha: f64) -> TailModel {
        match self {
            TailModel::PowerDecay { constant, exponent } => TailModel::PowerDecay {
                constant: constant.powf(alpha),
                exponent: exponent * alpha,
            },
            TailModel::Geometric { constant, ratio } => TailModel::Geometric {
                constant: constant.powf(alpha),
                ratio: ratio.powf(alpha),
            },
        }
    }

    /// Upper bound on (sum over i > n of value(i)^q)^(1/q), or the sup over
    /// i > n when q is infinite. `None` when the series diverges under the
    /// model (or is not summable at this q).
    pub fn lq_tail(&self, n: usize, q: f64) -> Option<f64> {
        if q.is_infinite() {
            // Models are nonincreasing, so the sup over i > n sits at n+1.
            return Some(self.value(n + 1));
        }
        self.series_tail(n, q).map(|s| s.powf(1.0 / q))
    }

    /// Upper bound on sum over i > n of value(i)^s, or `None` if divergent.
    pub fn series_tail(&self, n: usize, s: f64) -> Option<f64> {
        debug_assert!(s > 0.0 && s.is_finite());
        match self {
            TailModel::PowerDecay { constant, exponent } => {
                let es = exponent * s;
                if es <= 1.0 {
                    return None;
                }
                // Integral test: sum_{i>n} i^(-es) <= integral_n^inf x^(-es) dx.
                let n = (n.max(1)) as f64;
                Some(constant.powf(s) * n.powf(1.0 - es) / (es - 1.0))
            }
            TailModel::Geometric { constant, ratio } => {
                let rs = ratio.powf(s);
                Some(constant.powf(s) * rs.powi(n as i32 + 1) / (1.0 - rs))
            }
        }
    }
}

/// Upper bound on the norm of a column whose first n entries are `head` and
/// whose later entries are dominated by `model`. `None` when the space gives
/// no closed extension (weighted factors, divergent tails).
pub fn extend_with_tail(
    space: &SpaceSpec,
    head: &FiniteVector,
    n: usize,
    model: &TailModel,
) -> Result<Option<f64>> {
    extend_canon(&space.canonical(), head, n, model)
}

fn extend_canon(
    space: &SpaceSpec,
    head: &FiniteVector,
    n: usize,
    model: &TailModel,
) -> Result<Option<f64>> {
    match &space.kind {
        SpaceKind::Lq { q } => {
            let h = seqspace::norm_canonical(space, head)?;
            let Some(t) = model.lq_tail(n, *q) else {
                return Ok(None);
            };
            if q.is_infinite() {
                Ok(Some(h.max(t)))
            } else {
                Ok(Some((h.powf(*q) + t.powf(*q)).powf(1.0 / *q)))
            }
        }
        SpaceKind::WeightedLq { .. } => Ok(None),
        SpaceKind::Power { base, p } => {
            let powered = head.abs_pow(*p)?;
            let inner = extend_canon(base, &powered, n, &model.pow(*p))?;
            Ok(inner.map(|v| v.powf(1.0 / *p)))
        }
        SpaceKind::Sum { left, right } => {
            // Putting the whole vector in one factor bounds the sum norm.
            let l = extend_canon(left, head, n, model)?;
            let r = extend_canon(right, head, n, model)?;
            Ok(match (l, r) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) => Some(a),
                (None, Some(b)) => Some(b),
                (None, None) => None,
            })
        }
        SpaceKind::Intersection { left, right } => {
            let l = extend_canon(left, head, n, model)?;
            let r = extend_canon(right, head, n, model)?;
            Ok(match (l, r) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            })
        }
    }
}
