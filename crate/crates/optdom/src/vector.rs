//! Finitely supported sequences in canonical form.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Smallest stored magnitude. Values whose magnitude would fall below this
/// (e.g. after a pointwise power) are dropped rather than kept as denormals,
/// so downstream enumeration never branches on denormal noise.
pub const MIN_MAGNITUDE: f64 = 1e-300;

/// A sequence with finite support over indices 1, 2, 3, ...
///
/// Canonical form: indices strictly increasing, values nonzero and finite.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteVector {
    entries: Vec<(usize, f64)>,
}

impl FiniteVector {
    pub fn zero() -> Self {
        FiniteVector { entries: Vec::new() }
    }

    /// Unit coordinate vector e_i.
    pub fn basis(i: usize) -> Self {
        assert!(i >= 1, "indices are 1-based");
        FiniteVector { entries: vec![(i, 1.0)] }
    }

    /// Indicator of a set of indices.
    pub fn indicator(indices: &[usize]) -> Result<Self> {
        Self::from_pairs(indices.iter().map(|&i| (i, 1.0)))
    }

    /// Build from (index, value) pairs. Pairs are sorted; zero values are
    /// dropped; duplicate or zero indices and non-finite values are errors.
    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Result<Self> {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        let mut entries = Vec::with_capacity(pairs.len());
        let mut last = 0usize;
        for (i, v) in pairs {
            if i == 0 {
                return Err(Error::InvalidVector("index 0 is not allowed".into()));
            }
            if !v.is_finite() {
                return Err(Error::InvalidVector(format!("non-finite value at index {i}")));
            }
            if v == 0.0 {
                continue;
            }
            if i == last {
                return Err(Error::InvalidVector(format!("duplicate index {i}")));
            }
            last = i;
            entries.push((i, v));
        }
        Ok(FiniteVector { entries })
    }

    /// Entries already sorted by strictly increasing index; zeros dropped.
    /// Internal fast path for solvers that build vectors coordinatewise.
    pub(crate) fn from_sorted_magnitudes(entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        FiniteVector {
            entries: entries.into_iter().filter(|&(_, v)| v != 0.0).collect(),
        }
    }

    /// Dense slice interpreted at indices 1..=len. Zeros are dropped.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::from_pairs(
            values
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0.0)
                .map(|(k, &v)| (k + 1, v)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of support points.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|&(_, v)| v)
    }

    /// Coordinate i, zero off the support.
    pub fn get(&self, i: usize) -> f64 {
        match self.entries.binary_search_by_key(&i, |&(k, _)| k) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |&(i, _)| i)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    pub fn abs(&self) -> Self {
        FiniteVector {
            entries: self.entries.iter().map(|&(i, v)| (i, v.abs())).collect(),
        }
    }

    /// Pointwise |v|^p. Results below [`MIN_MAGNITUDE`] are dropped; overflow
    /// reports the offending index.
    pub fn abs_pow(&self, p: f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for &(i, v) in &self.entries {
            let w = v.abs().powf(p);
            if !w.is_finite() {
                return Err(Error::Range {
                    index: i,
                    message: format!("|{v}|^{p} overflows"),
                });
            }
            if w >= MIN_MAGNITUDE {
                entries.push((i, w));
            }
        }
        Ok(FiniteVector { entries })
    }

    pub fn scale(&self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidVector(format!("non-finite scalar {t}")));
        }
        Ok(FiniteVector {
            entries: self
                .entries
                .iter()
                .filter_map(|&(i, v)| {
                    let w = t * v;
                    (w != 0.0).then_some((i, w))
                })
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, u)), Some(&&(j, v))) => {
                    if i < j {
                        entries.push((i, u));
                        a.next();
                    } else if j < i {
                        entries.push((j, v));
                        b.next();
                    } else {
                        let w = u + v;
                        if w != 0.0 {
                            entries.push((i, w));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some(&&e), None) => {
                    entries.push(e);
                    a.next();
                }
                (None, Some(&&e)) => {
                    entries.push(e);
                    b.next();
                }
                (None, None) => break,
            }
        }
        FiniteVector { entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&FiniteVector {
            entries: other.entries.iter().map(|&(i, v)| (i, -v)).collect(),
        })
    }

    /// Dense image of coordinates 1..=n (entries beyond n are ignored).
    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(i, v) in &self.entries {
            if i <= n {
                out[i - 1] = v;
            }
        }
        out
    }

    /// Componentwise |self| <= |other|.
    pub fn abs_dominated_by(&self, other: &Self) -> bool {
        self.entries.iter().all(|&(i, v)| v.abs() <= other.get(i).abs())
    }

    /// Error if any stored magnitude is below [`MIN_MAGNITUDE`].
    pub fn require_normal_magnitudes(&self) -> Result<()> {
        for &(i, v) in &self.entries {
            if v.abs() < MIN_MAGNITUDE {
                return Err(Error::Range {
                    index: i,
                    message: format!("magnitude {} below the supported range", v.abs()),
                });
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Serialize for FiniteVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorRepr {
            indices: self.support().collect(),
            values: self.values().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = VectorRepr::deserialize(d)?;
        if repr.indices.len() != repr.values.len() {
            return Err(serde::de::Error::custom(format!(
                "indices ({}) and values ({}) differ in length",
                repr.indices.len(),
                repr.values.len()
            )));
        }
        FiniteVector::from_pairs(repr.indices.into_iter().zip(repr.values))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let f = FiniteVector::from_pairs(vec![(3, 1.0), (1, 2.0), (2, 0.0)]).unwrap();
        assert_eq!(f.support().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(f.get(2), 0.0);
        assert_eq!(f.get(3), 1.0);
    }

    #[test]
    fn rejects_duplicates_and_index_zero() {
        assert!(FiniteVector::from_pairs(vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(FiniteVector::from_pairs(vec![(0, 1.0)]).is_err());
        assert!(FiniteVector::from_pairs(vec![(1, f64::NAN)]).is_err());
    }

    #[test]
    fn add_cancels_to_canonical() {
        let f = FiniteVector::from_pairs(vec![(1, 1.0), (2, 2.0)]).unwrap();
        let g = FiniteVector::from_pairs(vec![(1, -1.0), (3, 4.0)]).unwrap();
        let h = f.add(&g);
        assert_eq!(h.support().collect::<Vec<_>>(), vec![2, 3]);
        assert!(f.sub(&f).is_zero());
    }

    #[test]
    fn abs_pow_drops_underflow() {
        let f = FiniteVector::from_pairs(vec![(1, 1e-200), (2, 2.0)]).unwrap();
        let g = f.abs_pow(2.0).unwrap();
        assert_eq!(g.support().collect::<Vec<_>>(), vec![2]);
        assert!(FiniteVector::from_pairs(vec![(1, 1e200)])
            .unwrap()
            .abs_pow(3.0)
            .is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = FiniteVector::from_pairs(vec![(2, -1.5), (7, 3.0)]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"indices":[2,7],"values":[-1.5,3.0]}"#);
        let g: FiniteVector = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<FiniteVector>(r#"{"indices":[1],"values":[]}"#).is_err());
    }
}
