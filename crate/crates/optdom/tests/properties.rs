//! Property tests for the algebraic invariants that every space and every
//! measure attached to a matrix must satisfy, regardless of parameters.
//!
//! Vector values are drawn from a coarse dyadic grid (multiples of 1/16) so
//! that additive cancellation produces exact zeros, which the sparse vector
//! type drops cleanly. Random reals would instead leave subnormal residue
//! behind and trip the magnitude guards in the measure entry points.

use std::collections::BTreeMap;

use proptest::prelude::*;

use optdom::matop::MatrixOperator;
use optdom::seqspace::{self, quasinorm_constant, SeqGen, SpaceSpec};
use optdom::vector::FiniteVector;
use optdom::vmeasure::{integrate, l1m_norm, AtomicVectorMeasure, EvalOptions};

// ---------------------------------------------------------------------------
// Strategies.

/// Nonzero dyadic rational in [-2, -1/16] ∪ [1/16, 2].
fn dyadic() -> impl Strategy<Value = f64> {
    (1i32..=32, any::<bool>()).prop_map(|(k, neg)| {
        let v = f64::from(k) / 16.0;
        if neg {
            -v
        } else {
            v
        }
    })
}

/// Dyadic rational in [0, 1], used as a pointwise shrinking factor.
fn dyadic_unit() -> impl Strategy<Value = f64> {
    (0i32..=16).prop_map(|k| f64::from(k) / 16.0)
}

/// Sparse vector supported inside {1, ..., max_index} with dyadic values.
fn sparse_vector(max_index: usize) -> impl Strategy<Value = FiniteVector> {
    proptest::collection::btree_map(1..=max_index, dyadic(), 1..=max_index)
        .prop_map(|m| FiniteVector::from_pairs(m).expect("dyadic pairs are valid"))
}

/// Spaces closed under all the invariants below (including q < 1 cases).
fn any_space() -> impl Strategy<Value = SpaceSpec> {
    prop_oneof![
        Just(SpaceSpec::lq(0.5)),
        Just(SpaceSpec::lq(1.0)),
        Just(SpaceSpec::lq(2.0)),
        Just(SpaceSpec::lq(f64::INFINITY)),
        Just(SpaceSpec::weighted_lq(1.0, SeqGen::PowerDecay { constant: 1.0, exponent: 0.5 })),
        Just(SpaceSpec::weighted_lq(2.0, SeqGen::Geometric { constant: 1.0, ratio: 0.5 })),
        Just(SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0))),
        Just(SpaceSpec::power(SpaceSpec::lq(1.0), 2.0)),
        Just(SpaceSpec::power(SpaceSpec::lq(2.0), 0.5)),
    ]
}

/// Codomains with q >= 1; convexity arguments (and the exact reduction for
/// lattice comparisons of measures) only hold for genuine norms.
fn norm_codomain() -> impl Strategy<Value = SpaceSpec> {
    prop_oneof![
        Just(SpaceSpec::lq(1.0)),
        Just(SpaceSpec::lq(2.0)),
        Just(SpaceSpec::lq(f64::INFINITY)),
    ]
}

/// Dense matrix with dyadic entries, n rows by n columns.
fn dense_rows(n: usize, nonnegative: bool) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let entry = dyadic().prop_map(move |v| if nonnegative { v.abs() } else { v });
    proptest::collection::vec(proptest::collection::vec(entry, n), n)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

// ---------------------------------------------------------------------------
// Sequence-space invariants.

proptest! {
    /// ‖t f‖ = |t| ‖f‖ for every space in the catalogue.
    #[test]
    fn norm_is_homogeneous(space in any_space(), f in sparse_vector(12), t in dyadic()) {
        let scaled = f.scale(t).unwrap();
        let lhs = seqspace::norm(&space, &scaled).unwrap();
        let rhs = t.abs() * seqspace::norm(&space, &f).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9), "space {}: {lhs} vs {rhs}", space.describe());
    }

    /// ‖f + g‖ <= K (‖f‖ + ‖g‖) with K the space's own quasinorm constant.
    #[test]
    fn quasi_triangle_holds(space in any_space(), f in sparse_vector(12), g in sparse_vector(12)) {
        let k = quasinorm_constant(&space).unwrap();
        let lhs = seqspace::norm(&space, &f.add(&g)).unwrap();
        let rhs = k * (seqspace::norm(&space, &f).unwrap() + seqspace::norm(&space, &g).unwrap());
        prop_assert!(
            lhs <= rhs + 1e-9 * rhs.max(1.0),
            "space {}: ‖f+g‖ = {lhs} exceeds K(‖f‖+‖g‖) = {rhs}",
            space.describe()
        );
    }

    /// |f| <= |g| pointwise implies ‖f‖ <= ‖g‖ (lattice property). The smaller
    /// vector is built by shrinking g coordinatewise with factors in [0, 1].
    #[test]
    fn norm_is_lattice_monotone(
        space in any_space(),
        g in sparse_vector(12),
        factors in proptest::collection::vec(dyadic_unit(), 12),
    ) {
        let shrunk: BTreeMap<usize, f64> = g
            .iter()
            .map(|(i, v)| (i, v * factors[(i - 1) % factors.len()]))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        let f = FiniteVector::from_pairs(shrunk).unwrap();
        prop_assert!(f.abs_dominated_by(&g));
        let nf = seqspace::norm(&space, &f).unwrap();
        let ng = seqspace::norm(&space, &g).unwrap();
        prop_assert!(
            nf <= ng + 1e-9 * ng.max(1.0),
            "space {}: ‖f‖ = {nf} exceeds ‖g‖ = {ng}",
            space.describe()
        );
    }

    /// The p-th power of ℓ^q is ℓ^{qp}, with norms related by an exact
    /// exponent identity: ‖f‖_{(ℓ^q)^p} = ‖f‖_{ℓ^{qp}} on the nose.
    #[test]
    fn power_of_lq_is_lq(
        f in sparse_vector(12),
        q in prop_oneof![Just(0.5), Just(1.0), Just(2.0)],
        p in prop_oneof![Just(0.5), Just(2.0), Just(3.0)],
    ) {
        let powered = seqspace::norm(&SpaceSpec::power(SpaceSpec::lq(q), p), &f).unwrap();
        let direct = seqspace::norm(&SpaceSpec::lq(q * p), &f).unwrap();
        prop_assert!(
            close(powered, direct, 1e-12),
            "(ℓ^{q})^{p}: {powered} vs ℓ^{}: {direct}", q * p
        );
    }

    /// Intersection norm is exactly the max of the component norms.
    #[test]
    fn intersection_is_max(f in sparse_vector(12)) {
        let left = SpaceSpec::lq(1.0);
        let right = SpaceSpec::lq(2.0);
        let both = seqspace::norm(&SpaceSpec::intersection(left.clone(), right.clone()), &f).unwrap();
        let max = seqspace::norm(&left, &f).unwrap().max(seqspace::norm(&right, &f).unwrap());
        prop_assert_eq!(both, max);
    }
}

// ---------------------------------------------------------------------------
// Vector-measure invariants. Support sizes stay within the exact-enumeration
// budget so every norm below takes the exact branch.

fn exact_opts() -> EvalOptions {
    EvalOptions { n_enum: 12, ..EvalOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The L¹(m) norm only sees |f|: flipping signs of f cannot change it.
    #[test]
    fn l1m_norm_is_sign_invariant(
        rows in dense_rows(5, false),
        f in sparse_vector(5),
        codomain in norm_codomain(),
    ) {
        let m = AtomicVectorMeasure::new(MatrixOperator::dense(rows).unwrap(), codomain, 5).unwrap();
        let opts = exact_opts();
        let signed = l1m_norm(&m, &f, &opts).unwrap();
        let unsigned = l1m_norm(&m, &f.abs(), &opts).unwrap();
        prop_assert_eq!(signed.value, unsigned.value);
    }

    /// ‖∫_A f dm‖_E <= ‖f‖_{L¹(m)} for every subset A of the support.
    #[test]
    fn integral_over_subset_is_contractive(
        rows in dense_rows(5, false),
        f in sparse_vector(5),
        mask in proptest::collection::vec(any::<bool>(), 5),
        codomain in norm_codomain(),
    ) {
        let m = AtomicVectorMeasure::new(
            MatrixOperator::dense(rows).unwrap(),
            codomain.clone(),
            5,
        ).unwrap();
        let total = l1m_norm(&m, &f, &exact_opts()).unwrap().value.unwrap();
        let subset: Vec<usize> = f.support().filter(|&j| mask[j - 1]).collect();
        let piece = seqspace::norm(&codomain, &integrate(&m, &f, &subset).unwrap()).unwrap();
        prop_assert!(
            piece <= total + 1e-9 * total.max(1.0),
            "‖∫_A f‖ = {piece} exceeds ‖f‖_L¹(m) = {total}"
        );
    }

    /// |f| <= |g| implies ‖f‖_{L¹(m)} <= ‖g‖_{L¹(m)} when the codomain is a
    /// genuine norm.
    #[test]
    fn l1m_norm_is_lattice_monotone(
        rows in dense_rows(5, false),
        g in sparse_vector(5),
        factors in proptest::collection::vec(dyadic_unit(), 5),
        codomain in norm_codomain(),
    ) {
        let shrunk: BTreeMap<usize, f64> = g
            .iter()
            .map(|(i, v)| (i, v * factors[i - 1]))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        let f = FiniteVector::from_pairs(shrunk).unwrap();
        let m = AtomicVectorMeasure::new(MatrixOperator::dense(rows).unwrap(), codomain, 5).unwrap();
        let opts = exact_opts();
        let nf = l1m_norm(&m, &f, &opts).unwrap().value.unwrap();
        let ng = l1m_norm(&m, &g, &opts).unwrap().value.unwrap();
        prop_assert!(nf <= ng + 1e-9 * ng.max(1.0), "‖f‖ = {nf} exceeds ‖g‖ = {ng}");
    }

    /// ∫_A (αf + βg) dm = α ∫_A f dm + β ∫_A g dm, exactly on the dyadic grid.
    #[test]
    fn integral_is_linear(
        rows in dense_rows(5, false),
        f in sparse_vector(5),
        g in sparse_vector(5),
        alpha in dyadic(),
        beta in dyadic(),
        mask in proptest::collection::vec(any::<bool>(), 5),
    ) {
        let m = AtomicVectorMeasure::new(
            MatrixOperator::dense(rows).unwrap(),
            SpaceSpec::lq(2.0),
            5,
        ).unwrap();
        let subset: Vec<usize> = (1..=5).filter(|&j| mask[j - 1]).collect();
        let combo = f.scale(alpha).unwrap().add(&g.scale(beta).unwrap());
        let lhs = integrate(&m, &combo, &subset).unwrap().to_dense(5);
        let fa = integrate(&m, &f, &subset).unwrap();
        let ga = integrate(&m, &g, &subset).unwrap();
        let rhs = fa.scale(alpha).unwrap().add(&ga.scale(beta).unwrap()).to_dense(5);
        for (i, (&l, &r)) in lhs.iter().zip(rhs.iter()).enumerate() {
            prop_assert!(close(l, r, 1e-12), "coordinate {}: {l} vs {r}", i + 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Factorability invariants. Each case runs two ascent searches, so the case
// count is kept small.

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The grid oracle can never beat the ascent constant by more than its
    /// own discretization slack.
    #[test]
    fn grid_never_beats_ascent(rows in dense_rows(3, true)) {
        use optdom::factor::best_constant;
        use optdom::oracle::grid_best_constant;

        let matrix = MatrixOperator::dense(rows).unwrap();
        let codomain = SpaceSpec::lq(2.0);
        let domain = SpaceSpec::lq(1.0);
        let opts = EvalOptions { restarts: 8, ..EvalOptions::default() };
        let ascent = best_constant(&matrix, &codomain, &domain, 3, &opts).unwrap();
        let grid = grid_best_constant(&matrix, &codomain, &domain, 3, 3, 16).unwrap();
        prop_assert!(
            grid <= ascent.value * 1.01 + 1e-9,
            "grid {grid} exceeds ascent {} beyond slack", ascent.value
        );
    }
}
