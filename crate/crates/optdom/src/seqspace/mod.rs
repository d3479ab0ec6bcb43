//! Sequence-space descriptors and their (quasi-)norms.
//!
//! Supported spaces: ℓ^q for q in (0, ∞], weighted ℓ^q, pointwise p-th powers,
//! sums, and intersections. The weighted norm is (Σ w_i |f_i|^q)^{1/q}, with
//! sup_i w_i |f_i| at q = ∞.

mod sum_norm;
pub mod weights;

pub use sum_norm::{sum_norm_decomposition, SumDecomposition, SumNormOptions};
pub use weights::SeqGen;

use crate::error::{Error, Result};
use crate::util::{conjugate_exponent, Accumulator};
use crate::vector::FiniteVector;
use serde::{Deserialize, Serialize};

/// Exponent field codec: JSON numbers plus the string "inf" for q = ∞.
pub(crate) mod exponent {
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if q.is_finite() {
            s.serialize_f64(*q)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                    _ => Err(E::custom(format!("unrecognized exponent {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SpaceKind {
    Lq {
        #[serde(with = "exponent")]
        q: f64,
    },
    WeightedLq {
        #[serde(with = "exponent")]
        q: f64,
        weights: SeqGen,
    },
    Power {
        #[serde(alias = "left")]
        base: Box<SpaceSpec>,
        p: f64,
    },
    Sum {
        left: Box<SpaceSpec>,
        right: Box<SpaceSpec>,
    },
    Intersection {
        left: Box<SpaceSpec>,
        right: Box<SpaceSpec>,
    },
}

/// A space descriptor: the structural variant plus declarative flags.
///
/// `has_fatou` defaults to the derived value (true for everything built from
/// ℓ^q pieces); a declared `false` models codomains without the property and
/// is honored by the operations that require it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_fatou: Option<bool>,
}

impl From<SpaceKind> for SpaceSpec {
    fn from(kind: SpaceKind) -> Self {
        SpaceSpec { kind, has_fatou: None }
    }
}

impl SpaceSpec {
    pub fn lq(q: f64) -> Self {
        SpaceKind::Lq { q }.into()
    }

    pub fn weighted_lq(q: f64, weights: SeqGen) -> Self {
        SpaceKind::WeightedLq { q, weights }.into()
    }

    pub fn power(base: SpaceSpec, p: f64) -> Self {
        SpaceKind::Power { base: Box::new(base), p }.into()
    }

    pub fn sum(left: SpaceSpec, right: SpaceSpec) -> Self {
        SpaceKind::Sum { left: Box::new(left), right: Box::new(right) }.into()
    }

    pub fn intersection(left: SpaceSpec, right: SpaceSpec) -> Self {
        SpaceKind::Intersection { left: Box::new(left), right: Box::new(right) }.into()
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SpaceKind::Lq { q } => validate_exponent(*q),
            SpaceKind::WeightedLq { q, weights } => {
                validate_exponent(*q)?;
                weights.validate_positive()
            }
            SpaceKind::Power { base, p } => {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::InvalidSpace(format!("power exponent {p} not in (0, inf)")));
                }
                base.validate()
            }
            SpaceKind::Sum { left, right } | SpaceKind::Intersection { left, right } => {
                left.validate()?;
                right.validate()
            }
        }
    }

    /// True when truncation tails vanish in norm: ℓ^q for finite q.
    /// Lq(∞) fails it and is excluded from claims that need it.
    pub fn sigma_order_continuous(&self) -> bool {
        match &self.canonical().kind {
            SpaceKind::Lq { q } | SpaceKind::WeightedLq { q, .. } => q.is_finite(),
            SpaceKind::Power { base, .. } => base.sigma_order_continuous(),
            SpaceKind::Sum { left, right } | SpaceKind::Intersection { left, right } => {
                left.sigma_order_continuous() && right.sigma_order_continuous()
            }
        }
    }

    /// Declared override if present, otherwise derived (true on every
    /// combination of ℓ^q pieces, each closed under pointwise suprema of
    /// norm-bounded monotone sequences).
    pub fn has_fatou(&self) -> bool {
        if let Some(flag) = self.has_fatou {
            return flag;
        }
        match &self.kind {
            SpaceKind::Lq { .. } | SpaceKind::WeightedLq { .. } => true,
            SpaceKind::Power { base, .. } => base.has_fatou(),
            SpaceKind::Sum { left, right } | SpaceKind::Intersection { left, right } => {
                left.has_fatou() && right.has_fatou()
            }
        }
    }

    /// Structural normal form used by the evaluator: powers of (weighted) ℓ^q
    /// collapse to (weighted) ℓ^{qp}, nested powers multiply. Only powers of
    /// sums and intersections survive as Power nodes.
    pub fn canonical(&self) -> SpaceSpec {
        let kind = match &self.kind {
            SpaceKind::Lq { .. } | SpaceKind::WeightedLq { .. } => self.kind.clone(),
            SpaceKind::Power { base, p } => match base.canonical().kind {
                SpaceKind::Lq { q } => SpaceKind::Lq { q: q * p },
                SpaceKind::WeightedLq { q, weights } => {
                    if q.is_finite() {
                        SpaceKind::WeightedLq { q: q * p, weights }
                    } else {
                        // sup w_i |f_i|^p, taken to the 1/p, rescales the weights.
                        match weights.pow(1.0 / p) {
                            Ok(w) => SpaceKind::WeightedLq { q, weights: w },
                            Err(_) => SpaceKind::Power {
                                base: Box::new(SpaceKind::WeightedLq { q, weights }.into()),
                                p: *p,
                            },
                        }
                    }
                }
                SpaceKind::Power { base: inner, p: p2 } => {
                    SpaceKind::Power { base: inner, p: p * p2 }
                }
                other => SpaceKind::Power { base: Box::new(other.into()), p: *p },
            },
            SpaceKind::Sum { left, right } => SpaceKind::Sum {
                left: Box::new(left.canonical()),
                right: Box::new(right.canonical()),
            },
            SpaceKind::Intersection { left, right } => SpaceKind::Intersection {
                left: Box::new(left.canonical()),
                right: Box::new(right.canonical()),
            },
        };
        SpaceSpec { kind, has_fatou: self.has_fatou }
    }

    /// Whether the (canonical) norm satisfies the triangle inequality with
    /// constant 1. Conservative on powers of sums and intersections.
    pub fn is_norm(&self) -> bool {
        fn go(kind: &SpaceKind) -> bool {
            match kind {
                SpaceKind::Lq { q } | SpaceKind::WeightedLq { q, .. } => *q >= 1.0,
                SpaceKind::Power { base, p } => *p >= 1.0 && go(&base.kind),
                SpaceKind::Sum { left, right } | SpaceKind::Intersection { left, right } => {
                    go(&left.kind) && go(&right.kind)
                }
            }
        }
        go(&self.canonical().kind)
    }

    /// Short display form for certificates and error messages.
    pub fn describe(&self) -> String {
        fn ex(q: f64) -> String {
            if q.is_finite() {
                format!("{q}")
            } else {
                "inf".into()
            }
        }
        match &self.kind {
            SpaceKind::Lq { q } => format!("lq({})", ex(*q)),
            SpaceKind::WeightedLq { q, .. } => format!("weighted_lq({})", ex(*q)),
            SpaceKind::Power { base, p } => format!("power({}, {p})", base.describe()),
            SpaceKind::Sum { left, right } => {
                format!("sum({}, {})", left.describe(), right.describe())
            }
            SpaceKind::Intersection { left, right } => {
                format!("intersection({}, {})", left.describe(), right.describe())
            }
        }
    }
}

fn validate_exponent(q: f64) -> Result<()> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidSpace(format!("exponent {q} not in (0, inf]")));
    }
    Ok(())
}

/// (Quasi-)norm of a finitely supported vector.
///
/// Exact for every variant except Sum, which runs the aligned-decomposition
/// solver with default options (fixed seed, so still deterministic).
pub fn norm(space: &SpaceSpec, f: &FiniteVector) -> Result<f64> {
    space.validate()?;
    norm_canonical(&space.canonical(), f)
}

pub(crate) fn norm_canonical(space: &SpaceSpec, f: &FiniteVector) -> Result<f64> {
    match &space.kind {
        SpaceKind::Lq { q } => lq_norm(*q, None, f),
        SpaceKind::WeightedLq { q, weights } => lq_norm(*q, Some(weights), f),
        SpaceKind::Power { base, p } => {
            let inner = norm_canonical(base, &f.abs_pow(*p)?)?;
            finite_root(inner, 1.0 / p, f)
        }
        SpaceKind::Intersection { left, right } => {
            Ok(norm_canonical(left, f)?.max(norm_canonical(right, f)?))
        }
        SpaceKind::Sum { left, right } => {
            let dec =
                sum_norm::solve(left, right, f, &SumNormOptions::default())?;
            Ok(dec.value)
        }
    }
}

fn lq_norm(q: f64, weights: Option<&SeqGen>, f: &FiniteVector) -> Result<f64> {
    if q.is_infinite() {
        let mut m = 0.0f64;
        for (i, v) in f.iter() {
            let w = match weights {
                Some(g) => g.value(i)?,
                None => 1.0,
            };
            m = m.max(w * v.abs());
        }
        return Ok(m);
    }
    let mut acc = Accumulator::default();
    for (i, v) in f.iter() {
        let w = match weights {
            Some(g) => g.value(i)?,
            None => 1.0,
        };
        let t = w * v.abs().powf(q);
        if !t.is_finite() {
            return Err(Error::Range {
                index: i,
                message: format!("|{v}|^{q} overflows"),
            });
        }
        acc.add(t);
    }
    finite_root(acc.value(), 1.0 / q, f)
}

fn finite_root(s: f64, inv: f64, f: &FiniteVector) -> Result<f64> {
    let r = s.powf(inv);
    if r.is_finite() {
        Ok(r)
    } else {
        let worst = f
            .iter()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map_or(0, |(i, _)| i);
        Err(Error::Range {
            index: worst,
            message: format!("norm value {s}^{inv} not representable"),
        })
    }
}

/// Norm evaluator prepared once (validated, canonicalized) for hot loops over
/// dense coordinate slices indexed 1..=len.
#[derive(Clone, Debug)]
pub struct PreparedNorm {
    canon: SpaceSpec,
}

impl PreparedNorm {
    pub fn new(space: &SpaceSpec) -> Result<Self> {
        space.validate()?;
        Ok(PreparedNorm { canon: space.canonical() })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.canon
    }

    pub fn eval(&self, f: &FiniteVector) -> Result<f64> {
        norm_canonical(&self.canon, f)
    }

    pub fn eval_dense(&self, xs: &[f64]) -> Result<f64> {
        eval_dense_kind(&self.canon, xs)
    }
}

fn eval_dense_kind(space: &SpaceSpec, xs: &[f64]) -> Result<f64> {
    match &space.kind {
        SpaceKind::Lq { q } if q.is_infinite() => {
            Ok(xs.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
        }
        SpaceKind::Lq { q } => {
            let mut acc = Accumulator::default();
            for (k, &x) in xs.iter().enumerate() {
                if x != 0.0 {
                    let t = x.abs().powf(*q);
                    if !t.is_finite() {
                        return Err(Error::Range {
                            index: k + 1,
                            message: format!("|{x}|^{q} overflows"),
                        });
                    }
                    acc.add(t);
                }
            }
            let r = acc.value().powf(1.0 / q);
            if r.is_finite() {
                Ok(r)
            } else {
                Err(Error::Range { index: 0, message: "norm overflow".into() })
            }
        }
        SpaceKind::WeightedLq { .. } | SpaceKind::Power { .. } => {
            // Cold paths: route through the sparse evaluator.
            norm_canonical(space, &FiniteVector::from_dense(xs)?)
        }
        SpaceKind::Intersection { left, right } => {
            Ok(eval_dense_kind(left, xs)?.max(eval_dense_kind(right, xs)?))
        }
        SpaceKind::Sum { left, right } => {
            let f = FiniteVector::from_dense(xs)?;
            Ok(sum_norm::solve(left, right, &f, &SumNormOptions::default())?.value)
        }
    }
}

/// Analytic upper bound for the triangle constant K in
/// ‖f+g‖ ≤ K(‖f‖+‖g‖), computed on the canonical form.
pub fn quasinorm_constant(space: &SpaceSpec) -> Result<f64> {
    space.validate()?;
    fn go(space: &SpaceSpec) -> f64 {
        match &space.kind {
            SpaceKind::Lq { q } | SpaceKind::WeightedLq { q, .. } => {
                if *q >= 1.0 {
                    1.0
                } else {
                    // From q-subadditivity of t ↦ t^q.
                    2f64.powf(1.0 / q - 1.0)
                }
            }
            SpaceKind::Power { base, p } => {
                let kb = go(base);
                kb.powf((1.0f64).max(1.0 / p)) * 2f64.powf((0.0f64).max(1.0 / p - 1.0))
            }
            // Factor-wise decompositions give max of the factor constants
            // for both constructions.
            SpaceKind::Sum { left, right } | SpaceKind::Intersection { left, right } => {
                go(left).max(go(right))
            }
        }
    }
    Ok(go(&space.canonical()))
}

/// Conjugate-space descriptor under the pairing Σ f_i g_i. Only unweighted
/// and weighted ℓ^q with q in [1, ∞] have a supported closed form; anything
/// else is an explicit error, never an approximation.
pub fn koethe_dual_space(space: &SpaceSpec) -> Result<SpaceSpec> {
    space.validate()?;
    match &space.kind {
        SpaceKind::Lq { q } => match conjugate_exponent(*q) {
            Some(qd) => Ok(SpaceSpec::lq(qd)),
            None => Err(Error::UnsupportedDual(format!(
                "{} has q < 1",
                space.describe()
            ))),
        },
        SpaceKind::WeightedLq { q, weights } => {
            let qd = conjugate_exponent(*q).ok_or_else(|| {
                Error::UnsupportedDual(format!("{} has q < 1", space.describe()))
            })?;
            // Pairing duality: finite 1 < q < ∞ sends w to w^{1-q'};
            // the endpoint pair swaps 1 <-> ∞ with reciprocal weights.
            let alpha = if q.is_finite() && *q > 1.0 { 1.0 - qd } else { -1.0 };
            Ok(SpaceSpec::weighted_lq(qd, weights.pow(alpha)?))
        }
        _ => Err(Error::UnsupportedDual(format!(
            "{} is not a (weighted) lq space",
            space.describe()
        ))),
    }
}

/// Norm of f in the conjugate space.
pub fn koethe_dual_norm(space: &SpaceSpec, f: &FiniteVector) -> Result<f64> {
    norm(&koethe_dual_space(space)?, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(pairs: &[(usize, f64)]) -> FiniteVector {
        FiniteVector::from_pairs(pairs.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_example() {
        let f = fv(&[(1, 3.0), (2, 4.0)]);
        assert_eq!(norm(&SpaceSpec::lq(2.0), &f).unwrap(), 5.0);
    }

    #[test]
    fn small_q_example() {
        // (1^{1/2} + 1^{1/2})^2 = 4.
        let f = fv(&[(1, 1.0), (2, 1.0)]);
        assert_eq!(norm(&SpaceSpec::lq(0.5), &f).unwrap(), 4.0);
    }

    #[test]
    fn sup_norm() {
        let f = fv(&[(1, -3.0), (5, 2.0)]);
        assert_eq!(norm(&SpaceSpec::lq(f64::INFINITY), &f).unwrap(), 3.0);
    }

    #[test]
    fn weighted_norms() {
        let w = SeqGen::Explicit { values: vec![4.0, 1.0] };
        let f = fv(&[(1, 1.0), (2, 2.0)]);
        // (4*1 + 1*4)^{1/2}
        let v = norm(&SpaceSpec::weighted_lq(2.0, w.clone()), &f).unwrap();
        assert!((v - 8.0f64.sqrt()).abs() < 1e-15);
        // sup w_i |f_i| = max(4, 2)
        let s = norm(&SpaceSpec::weighted_lq(f64::INFINITY, w), &f).unwrap();
        assert_eq!(s, 4.0);
    }

    #[test]
    fn power_collapses_to_lq() {
        let f = fv(&[(1, 0.3), (2, 1.7), (5, -2.2)]);
        for p in [0.5, 2.0, 3.0] {
            let via_power = norm(&SpaceSpec::power(SpaceSpec::lq(1.0), p), &f).unwrap();
            let direct = norm(&SpaceSpec::lq(p), &f).unwrap();
            assert_eq!(via_power, direct);
        }
    }

    #[test]
    fn intersection_is_max() {
        let f = fv(&[(1, 1.0), (2, 1.0)]);
        let space = SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0));
        assert_eq!(norm(&space, &f).unwrap(), 2.0);
    }

    #[test]
    fn sum_norm_example() {
        // Threshold split cost (2-λ) + λ plateaus at 2 on λ in [1,2].
        let f = fv(&[(1, 2.0), (2, 1.0)]);
        let space = SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(f64::INFINITY));
        let v = norm(&space, &f).unwrap();
        assert!((v - 2.0).abs() < 1e-7, "got {v}");
    }

    #[test]
    fn quasinorm_constants() {
        assert_eq!(quasinorm_constant(&SpaceSpec::lq(2.0)).unwrap(), 1.0);
        assert_eq!(quasinorm_constant(&SpaceSpec::lq(0.5)).unwrap(), 2.0);
        let inter = SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0));
        assert_eq!(quasinorm_constant(&inter).unwrap(), 1.0);
        // power(lq(1), 1/2) collapses to lq(1/2).
        let pw = SpaceSpec::power(SpaceSpec::lq(1.0), 0.5);
        assert_eq!(quasinorm_constant(&pw).unwrap(), 2.0);
    }

    #[test]
    fn koethe_duals() {
        let e1 = FiniteVector::basis(1);
        assert_eq!(koethe_dual_norm(&SpaceSpec::lq(2.0), &e1).unwrap(), 1.0);
        let f = fv(&[(1, 1.0), (2, 2.0)]);
        assert_eq!(koethe_dual_norm(&SpaceSpec::lq(1.0), &f).unwrap(), 2.0);
        let g = fv(&[(1, 1.0), (2, 1.0)]);
        let d = koethe_dual_norm(&SpaceSpec::lq(4.0), &g).unwrap();
        assert!((d - 2f64.powf(0.75)).abs() < 1e-15);

        assert!(matches!(
            koethe_dual_norm(&SpaceSpec::lq(0.5), &e1),
            Err(Error::UnsupportedDual(_))
        ));
        let sum = SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0));
        assert!(koethe_dual_space(&sum).is_err());
        let pw = SpaceSpec::power(SpaceSpec::lq(1.0), 2.0);
        assert!(koethe_dual_space(&pw).is_err());
    }

    #[test]
    fn weighted_dual_is_involutive() {
        let w = SeqGen::PowerDecay { constant: 2.0, exponent: 1.0 };
        let space = SpaceSpec::weighted_lq(3.0, w);
        let dual = koethe_dual_space(&space).unwrap();
        let back = koethe_dual_space(&dual).unwrap();
        let f = fv(&[(1, 0.7), (3, -1.1), (4, 2.0)]);
        let a = norm(&space, &f).unwrap();
        let b = norm(&back, &f).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn order_continuity_flags() {
        assert!(SpaceSpec::lq(2.0).sigma_order_continuous());
        assert!(!SpaceSpec::lq(f64::INFINITY).sigma_order_continuous());
        let sum = SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(f64::INFINITY));
        assert!(!sum.sigma_order_continuous());
        assert!(sum.has_fatou());
        let mut declared = SpaceSpec::lq(2.0);
        declared.has_fatou = Some(false);
        assert!(!declared.has_fatou());
    }

    #[test]
    fn validation_errors() {
        assert!(norm(&SpaceSpec::lq(0.0), &FiniteVector::basis(1)).is_err());
        assert!(norm(&SpaceSpec::lq(-1.0), &FiniteVector::basis(1)).is_err());
        assert!(SpaceSpec::power(SpaceSpec::lq(1.0), f64::INFINITY).validate().is_err());
        let w = SeqGen::Explicit { values: vec![1.0, -1.0] };
        assert!(SpaceSpec::weighted_lq(2.0, w).validate().is_err());
    }

    #[test]
    fn overflow_reports_index() {
        let f = fv(&[(1, 1.0), (7, 1e200)]);
        match norm(&SpaceSpec::lq(4.0), &f) {
            Err(Error::Range { index, .. }) => assert_eq!(index, 7),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let space = SpaceSpec::sum(
            SpaceSpec::lq(1.0),
            SpaceSpec::power(SpaceSpec::lq(f64::INFINITY), 2.0),
        );
        let s = serde_json::to_string(&space).unwrap();
        let back: SpaceSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(space, back);
        let parsed: SpaceSpec =
            serde_json::from_str(r#"{"variant":"lq","q":"inf"}"#).unwrap();
        assert_eq!(parsed, SpaceSpec::lq(f64::INFINITY));
    }

    #[test]
    fn dense_matches_sparse() {
        let space = SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.5));
        let prep = PreparedNorm::new(&space).unwrap();
        let xs = [0.5, 0.0, -1.5, 2.0];
        let f = FiniteVector::from_dense(&xs).unwrap();
        assert_eq!(prep.eval_dense(&xs).unwrap(), prep.eval(&f).unwrap());
    }
}
