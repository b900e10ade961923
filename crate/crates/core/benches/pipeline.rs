use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pinwheel_core::context::CollarConvention;
use pinwheel_core::enumerate::{collared_key, level_context};
use pinwheel_core::par::{map_with, Execution};
use pinwheel_core::patch::canonicalize;
use pinwheel_core::{inflate, supertile};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn inflation(c: &mut Criterion) {
    let tiles = supertile(5).unwrap().tiles;
    let mut g = c.benchmark_group("inflate-level-5");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| map_with(exec, &tiles, inflate))
        });
    }
    g.finish();
}

fn collared_keys(c: &mut Criterion) {
    let lc = level_context(4).unwrap();
    let ctx = &lc.context;
    let ids: Vec<usize> = (0..ctx.len()).collect();
    let mut g = c.benchmark_group("collared-keys-level-4");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| map_with(exec, &ids, |&i| collared_key(ctx, i, CollarConvention::Closed).ok()))
        });
    }
    g.finish();
}

fn canonical_pairs(c: &mut Criterion) {
    let lc = level_context(4).unwrap();
    let ctx = &lc.context;
    let pairs: Vec<(usize, usize)> = (0..ctx.len())
        .flat_map(|i| ctx.touching(i).iter().map(move |&j| (i, j as usize)))
        .filter(|(i, j)| i < j)
        .collect();
    let mut g = c.benchmark_group("canonical-pairs-level-4");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                map_with(exec, &pairs, |&(i, j)| {
                    let p = pinwheel_core::patch::Patch::new(vec![ctx.tile(i).clone(), ctx.tile(j).clone()]);
                    canonicalize(&p).0.hash
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, inflation, collared_keys, canonical_pairs);
criterion_main!(benches);
