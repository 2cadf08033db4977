use criterion::{criterion_group, criterion_main, Criterion};
use isochron_core::poly::{resultant_v, QPoly2};
use isochron_core::verify::pipeline;
use isochron_core::QPoly;
use std::hint::black_box;

fn resultant(c: &mut Criterion) {
    let st6 = pipeline::standard().unwrap().stage6().unwrap();
    c.bench_function("Res_v(Psi, Phi)", |b| b.iter(|| resultant_v(black_box(&st6.psi), black_box(&st6.phi)).unwrap()));
    // (v - s)(v + 2) against v² - s²
    let p = QPoly2::new(vec![QPoly::from_ints(&[0, -2]), QPoly::from_ints(&[2, -1]), QPoly::from_ints(&[1])]);
    let q = QPoly2::new(vec![QPoly::from_ints(&[0, 0, -1]), QPoly::zero(), QPoly::from_ints(&[1])]);
    c.bench_function("Res_v of quadratics", |b| b.iter(|| resultant_v(black_box(&p), black_box(&q)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = resultant
}
criterion_main!(benches);
