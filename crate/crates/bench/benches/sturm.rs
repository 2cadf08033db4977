use criterion::{criterion_group, criterion_main, Criterion};
use isochron_core::poly::SturmSequence;
use isochron_core::verify::{pipeline, s_hi, s_lo};
use std::hint::black_box;

fn sturm(c: &mut Criterion) {
    let st5 = pipeline::standard().unwrap().stage5().unwrap();
    let zbar = &st5.u.zbar;
    c.bench_function("sturm sequence of Zbar", |b| b.iter(|| SturmSequence::new(black_box(zbar)).unwrap()));
    let seq = SturmSequence::new(zbar).unwrap();
    let (lo, hi) = (s_lo(), s_hi());
    c.bench_function("root count of Zbar", |b| b.iter(|| seq.count_between(black_box(&lo), black_box(&hi))));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = sturm
}
criterion_main!(benches);
