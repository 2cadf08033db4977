use criterion::{criterion_group, criterion_main, Criterion};
use isochron_core::averaging::{design_zeros, perturbation_from_k, PerturbCoeffs};
use isochron_core::filippov::{poincare_displacement, section_point, step_orbit, SimConfig};
use std::hint::black_box;

fn orbit(c: &mut Criterion) {
    let d = design_zeros(&[0.2, 0.35, 0.5, 0.65, 0.8]).unwrap();
    let w = perturbation_from_k(&d.k).unwrap();
    let cfg = SimConfig::default();
    c.bench_function("unperturbed revolution", |b| {
        b.iter(|| step_orbit(black_box(&section_point(0.5)), &PerturbCoeffs::zero(), &SimConfig::with_eps(0.0)).unwrap())
    });
    c.bench_function("displacement of the witness", |b| b.iter(|| poincare_displacement(black_box(0.5), &w, &cfg).unwrap()));
}

criterion_group!(benches, orbit);
criterion_main!(benches);
