//! Scalar sequence generators: weights for weighted spaces and diagonal
//! entries for diagonal operators.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeqGen {
    /// constant * i^(-exponent)
    PowerDecay {
        #[serde(default = "default_constant")]
        constant: f64,
        exponent: f64,
    },
    /// constant * ratio^i
    Geometric {
        #[serde(default = "default_constant")]
        constant: f64,
        ratio: f64,
    },
    /// values[i-1]; probing past the end is an error.
    Explicit { values: Vec<f64> },
}

fn default_constant() -> f64 {
    1.0
}

impl SeqGen {
    /// Value at index i >= 1.
    pub fn value(&self, i: usize) -> Result<f64> {
        if i == 0 {
            return Err(Error::Range {
                index: 0,
                message: "generator indices are 1-based".into(),
            });
        }
        let v = match self {
            SeqGen::PowerDecay { constant, exponent } => constant * (i as f64).powf(-exponent),
            SeqGen::Geometric { constant, ratio } => constant * ratio.powi(i as i32),
            SeqGen::Explicit { values } => *values.get(i - 1).ok_or_else(|| Error::Range {
                index: i,
                message: format!("explicit generator covers 1..={}", values.len()),
            })?,
        };
        if !v.is_finite() {
            return Err(Error::Range {
                index: i,
                message: "generator value is not finite".into(),
            });
        }
        Ok(v)
    }

    /// Validation for weight sequences, which must be strictly positive.
    pub fn validate_positive(&self) -> Result<()> {
        let ok = match self {
            SeqGen::PowerDecay { constant, exponent } => {
                constant.is_finite() && *constant > 0.0 && exponent.is_finite()
            }
            SeqGen::Geometric { constant, ratio } => {
                constant.is_finite() && *constant > 0.0 && ratio.is_finite() && *ratio > 0.0
            }
            SeqGen::Explicit { values } => {
                !values.is_empty() && values.iter().all(|v| v.is_finite() && *v > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpace(
                "weights must be finite and strictly positive".into(),
            ))
        }
    }

    /// Validation for diagonal generators, where signed values are allowed.
    pub fn validate_finite(&self) -> Result<()> {
        let ok = match self {
            SeqGen::PowerDecay { constant, exponent } => {
                constant.is_finite() && exponent.is_finite()
            }
            SeqGen::Geometric { constant, ratio } => constant.is_finite() && ratio.is_finite(),
            SeqGen::Explicit { values } => values.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMatrix("generator parameters must be finite".into()))
        }
    }

    /// Pointwise power w^alpha, closed for all three kinds. Requires a
    /// strictly positive generator.
    pub fn pow(&self, alpha: f64) -> Result<SeqGen> {
        self.validate_positive()?;
        let out = match self {
            SeqGen::PowerDecay { constant, exponent } => SeqGen::PowerDecay {
                constant: constant.powf(alpha),
                exponent: exponent * alpha,
            },
            SeqGen::Geometric { constant, ratio } => SeqGen::Geometric {
                constant: constant.powf(alpha),
                ratio: ratio.powf(alpha),
            },
            SeqGen::Explicit { values } => SeqGen::Explicit {
                values: values.iter().map(|v| v.powf(alpha)).collect(),
            },
        };
        out.validate_positive().map_err(|_| {
            Error::InvalidSpace(format!("pointwise power {alpha} left the representable range"))
        })?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_values() {
        let g = SeqGen::Geometric { constant: 1.0, ratio: 0.5 };
        assert_eq!(g.value(1).unwrap(), 0.5);
        assert_eq!(g.value(3).unwrap(), 0.125);
        let p = SeqGen::PowerDecay { constant: 2.0, exponent: 1.0 };
        assert_eq!(p.value(4).unwrap(), 0.5);
        // Negative exponent gives growth: i^1.
        let grow = SeqGen::PowerDecay { constant: 1.0, exponent: -1.0 };
        assert_eq!(grow.value(7).unwrap(), 7.0);
    }

    #[test]
    fn explicit_is_bounded() {
        let g = SeqGen::Explicit { values: vec![1.0, 2.0] };
        assert_eq!(g.value(2).unwrap(), 2.0);
        assert!(g.value(3).is_err());
    }

    #[test]
    fn pow_round_trip() {
        let g = SeqGen::Geometric { constant: 4.0, ratio: 0.25 };
        let h = g.pow(0.5).unwrap();
        assert!((h.value(3).unwrap() - (4.0f64 * 0.25f64.powi(3)).sqrt()).abs() < 1e-15);
    }
}
