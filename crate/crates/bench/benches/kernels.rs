use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use arclab_core::identity::{run_suite, Lemma, SamplingPolicy};
use arclab_core::linalg::det;
use arclab_core::search::{max_arc_size, SearchTask};
use arclab_core::{nrc, Fe, FieldSpec, TangentBundle};

fn field_ops(c: &mut Criterion) {
    for (p, h) in [(11, 1), (2, 8), (3, 5)] {
        let f = FieldSpec::new(p, h).unwrap();
        let xs: Vec<Fe> = f.elements().collect();
        c.bench_function(&format!("mul_all_pairs/GF({})", f.q()), |b| {
            b.iter(|| {
                let mut acc = Fe::ZERO;
                for &x in xs.iter().take(64) {
                    for &y in &xs {
                        acc = f.add(acc, f.mul(x, y));
                    }
                }
                black_box(acc)
            })
        });
    }
}

fn determinants(c: &mut Criterion) {
    let f = FieldSpec::new(2, 4).unwrap();
    let arc = nrc(&f, 6).unwrap();
    let rows: Vec<&[Fe]> = arc.points()[..6].iter().map(|v| v.coords()).collect();
    c.bench_function("det/6x6/GF(16)", |b| b.iter(|| black_box(det(&f, black_box(&rows)).unwrap())));
}

fn tangents(c: &mut Criterion) {
    let f = FieldSpec::new(11, 1).unwrap();
    let arc = nrc(&f, 5).unwrap();
    c.bench_function("tangent_prebuild/NRC(11,5)", |b| {
        b.iter(|| {
            let bundle = TangentBundle::new(&arc);
            black_box(bundle.prebuild().unwrap())
        })
    });
    let bundle = TangentBundle::new(&arc);
    bundle.prebuild().unwrap();
    c.bench_function("main_identity/NRC(11,5)/200", |b| {
        b.iter(|| black_box(run_suite(&bundle, Lemma::Main, &SamplingPolicy::sampled(200, 1)).unwrap()))
    });
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for (p, h, k) in [(5, 1, 3), (3, 2, 3), (7, 1, 4)] {
        let f = FieldSpec::new(p, h).unwrap();
        group.bench_function(format!("q={}/k={k}", f.q()), |b| {
            b.iter(|| black_box(max_arc_size(&SearchTask::new(f.clone(), k)).unwrap().size))
        });
    }
    group.finish();
}

criterion_group!(benches, field_ops, determinants, tangents, search);
criterion_main!(benches);
