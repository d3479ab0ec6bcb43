//! Sequential vs parallel execution on the three hot paths: exhaustive sign
//! enumeration, multi-start ascent, and the sum-norm splitter. Build with
//! `--no-default-features` to measure the fallback dispatch overhead instead
//! of rayon.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use optdom::exec::ExecMode;
use optdom::factor::best_constant;
use optdom::matop::MatrixOperator;
use optdom::seqspace::{sum_norm_decomposition, SpaceSpec, SumNormOptions};
use optdom::vector::FiniteVector;
use optdom::vmeasure::{l1m_norm, AtomicVectorMeasure, EvalOptions};

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn mode_label(mode: ExecMode) -> &'static str {
    match mode {
        ExecMode::Sequential => "sequential",
        ExecMode::Parallel => "parallel",
    }
}

/// 2^19 sign patterns against the Hilbert matrix: the exact branch at its
/// enumeration cap.
fn bench_sign_enumeration(c: &mut Criterion) {
    let n = 20;
    let m = AtomicVectorMeasure::new(MatrixOperator::hilbert(), SpaceSpec::lq(2.0), n).unwrap();
    let f = FiniteVector::from_pairs((1..=n).map(|j| (j, 1.0 / j as f64))).unwrap();

    let mut group = c.benchmark_group("sign-enumeration");
    group.sample_size(10);
    for mode in MODES {
        let opts = EvalOptions { n_enum: n, mode, ..EvalOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(mode_label(mode)), &opts, |b, opts| {
            b.iter(|| l1m_norm(&m, &f, opts).unwrap());
        });
    }
    group.finish();
}

/// 32 independent ascent starts on the factorization constant.
fn bench_ascent(c: &mut Criterion) {
    let m = MatrixOperator::hilbert();
    let codomain = SpaceSpec::lq(2.0);
    let domain = SpaceSpec::lq(1.0);

    let mut group = c.benchmark_group("ascent");
    group.sample_size(10);
    for mode in MODES {
        let opts = EvalOptions { mode, ..EvalOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(mode_label(mode)), &opts, |b, opts| {
            b.iter(|| best_constant(&m, &codomain, &domain, 12, opts).unwrap());
        });
    }
    group.finish();
}

/// 32-start coordinate descent on the sum-norm infimum.
fn bench_sum_solver(c: &mut Criterion) {
    let space = SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0));
    let f = FiniteVector::from_pairs((1..=16).map(|j| (j, 1.0 + (j as f64).sqrt()))).unwrap();

    let mut group = c.benchmark_group("sum-solver");
    group.sample_size(10);
    for mode in MODES {
        let opts = SumNormOptions { mode, ..SumNormOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(mode_label(mode)), &opts, |b, opts| {
            b.iter(|| sum_norm_decomposition(&space, &f, opts).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sign_enumeration, bench_ascent, bench_sum_solver);
criterion_main!(benches);
