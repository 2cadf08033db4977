use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isochron_core::ellfun::eval_ij;
use isochron_core::HPReal;
use std::hint::black_box;

fn agm(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval_ij");
    for prec in [128u32, 256, 512] {
        let r = HPReal::from_f64(0.7, prec);
        g.bench_with_input(BenchmarkId::from_parameter(prec), &r, |b, r| b.iter(|| eval_ij(black_box(r)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, agm);
criterion_main!(benches);
