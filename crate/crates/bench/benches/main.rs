use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use cpa_core::algebra::AlgebraContext;
use cpa_core::diagram::{compose, enumerate_diagrams};
use cpa_core::group::{wreath_product, FiniteGroup};
use cpa_core::homology::{tor_of_algebra, Budget};
use cpa_core::ring::{PrimeField, RingOps};

fn bench_compose(c: &mut Criterion) {
    let group = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let diagrams: Vec<_> = enumerate_diagrams(3, &group, 10_000).unwrap().collect();
    let pairs: Vec<(usize, usize)> = (0..diagrams.len())
        .step_by(97)
        .flat_map(|i| (0..diagrams.len()).step_by(113).map(move |j| (i, j)))
        .collect();
    c.bench_function("compose_n3_c2", |b| {
        b.iter(|| {
            let mut internal = 0u64;
            for &(i, j) in &pairs {
                if let cpa_core::diagram::CompositionOutcome::Diagram {
                    internal_components,
                    ..
                } = compose(&diagrams[i], &diagrams[j], &group).unwrap()
                {
                    internal += internal_components as u64;
                }
            }
            internal
        })
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let group = Arc::new(FiniteGroup::cyclic(2).unwrap());
    c.bench_function("enumerate_diagrams_n3_c2", |b| {
        b.iter(|| enumerate_diagrams(3, &group, 10_000).unwrap().count())
    });
}

fn bench_wreath_table(c: &mut Criterion) {
    let base = FiniteGroup::cyclic(2).unwrap();
    c.bench_function("wreath_c2_3_table", |b| {
        b.iter(|| wreath_product(&base, 3).unwrap().order())
    });
}

fn bench_bar_rank(c: &mut Criterion) {
    let group = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let ring = PrimeField::new(2).unwrap();
    let delta = ring.from_i64(1);
    c.bench_function("tor_p2_c2_f2_maxq2", |b| {
        b.iter_batched(
            || AlgebraContext::new(2, group.clone(), delta, ring.clone()).unwrap(),
            |ctx| tor_of_algebra(&ctx, 2, &Budget::default(), 1).unwrap(),
            BatchSize::LargeInput,
        )
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_compose, bench_enumeration, bench_wreath_table, bench_bar_rank
}
criterion_main!(benches);
