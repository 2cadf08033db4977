use std::f64::consts::PI;
use std::sync::OnceLock;

use isochron_core::averaging::{design_zeros, eval_f, perturbation_from_k, KVector, PerturbCoeffs};
use isochron_core::filippov::*;
use isochron_core::HPReal;
use proptest::prelude::*;
use rug::Rational;

struct Witness {
    zeros: Vec<f64>,
    k: KVector,
    c: PerturbCoeffs,
}

fn witness() -> &'static Witness {
    static W: OnceLock<Witness> = OnceLock::new();
    W.get_or_init(|| {
        let d = design_zeros(&[0.2, 0.35, 0.5, 0.65, 0.8]).unwrap();
        let c = perturbation_from_k(&d.k).unwrap();
        Witness { zeros: d.zeros, k: d.k, c }
    })
}

fn f_at(k: &KVector, r: f64) -> f64 {
    eval_f(&HPReal::from_f64(r, 128), k).unwrap().to_f64()
}

fn tight(eps: f64) -> SimConfig {
    SimConfig { eps, rtol: 1e-14, atol: 1e-14, ..SimConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn polar_map_lies_on_the_energy_level(r in 0.01f64..0.99, theta in 0.0f64..2.0 * PI) {
        let (x, y) = polar(r, theta);
        prop_assert!((h4(x, y) * 256.0 / (r * r) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn polar_map_high_precision() {
    let p = 256;
    for (r, th) in [(0.3, 1.0), (0.9, 2.5), (0.7, 4.0)] {
        let r = HPReal::from_f64(r, p);
        let th = HPReal::from_f64(th, p);
        let one = HPReal::from_i64(1, p);
        let d = &one - &(&r * &th.cos());
        let x = &(&r * &th.sin()).mul_f64(3.0) / &d.mul_f64(16.0);
        let y = (&d.sqrt().recip() - &one).mul_f64(0.375);
        let num = &(&(&x * &x) + &(&y * &y)).mul_f64(9.0) + &(&y.powi(3).mul_f64(24.0) + &y.powi(4).mul_f64(16.0));
        let h = &num / &y.mul_f64(8.0).add_f64(3.0).powi(4);
        let err = (&h.mul_f64(256.0) - &(&r * &r)).abs().to_f64();
        assert!(err < 1e-70, "{err}");
    }
}

#[test]
fn unperturbed_period_across_annulus() {
    let cfg = SimConfig::with_eps(0.0);
    let zero = PerturbCoeffs::zero();
    for i in 0..10 {
        let r = 0.05 + 0.1 * i as f64;
        let p = section_point(r);
        let rev = step_orbit(&p, &zero, &cfg).unwrap();
        assert!((rev.period - 2.0 * PI).abs() < 1e-9, "r = {r}: {}", rev.period);
        assert!((h4(rev.end.x, rev.end.y) - h4(p.x, p.y)).abs() < 1e-10);
    }
}

#[test]
fn switching_events_on_designed_orbit() {
    let w = witness();
    let cfg = SimConfig::default();
    for r in [0.1, 0.45, 0.9] {
        let mut tr = Vec::new();
        let rev = step_orbit_recorded(&section_point(r), &w.c, &cfg, Some(&mut tr)).unwrap();
        assert_eq!(rev.switches.len(), 2);
        assert!(rev.switches.iter().all(|e| e.residual < EVENT_TOL));
        assert_eq!((rev.switches[0].from, rev.switches[0].to), (Zone::Left, Zone::Right));
        assert_eq!((rev.switches[1].from, rev.switches[1].to), (Zone::Right, Zone::Left));
        assert!(rev.switches[0].y < 0.0 && rev.switches[1].y > 0.0);
        // every recorded point away from the line sits in its tagged zone
        for p in tr.iter().filter(|p| p.x.abs() > 1e-12) {
            assert_eq!(p.zone, if p.x > 0.0 { Zone::Right } else { Zone::Left }, "{p:?}");
        }
    }
}

#[test]
fn first_order_agreement() {
    let w = witness();
    let grid: Vec<f64> = (0..20).map(|i| 0.05 + 0.9 * i as f64 / 19.0).collect();
    let sup = |eps: f64| {
        let cfg = tight(eps);
        grid.iter()
            .map(|&r| (poincare_displacement(r, &w.c, &cfg).unwrap() / eps + f_at(&w.k, r)).abs())
            .fold(0.0, f64::max)
    };
    let (a, b) = (sup(1e-3), sup(5e-4));
    let order = (a / b).log2();
    assert!(order > 0.95, "sup {a:e} -> {b:e}, order {order}");
}

#[test]
fn displacement_changes_sign_across_designed_zeros() {
    let w = witness();
    let cfg = tight(1e-6);
    for &z in &w.zeros {
        let lo = poincare_displacement(z - 0.03, &w.c, &cfg).unwrap();
        let hi = poincare_displacement(z + 0.03, &w.c, &cfg).unwrap();
        assert!(lo * hi < 0.0, "zero {z}: {lo:e}, {hi:e}");
    }
}

#[test]
fn positive_f_has_no_cycles() {
    // a10 alone gives k = (π/2, 0, …, 0)
    let c = PerturbCoeffs::zero().with("a10", Rational::from(-1));
    let k = isochron_core::averaging::k_from_perturbation(&c).to_f64();
    assert!(k.0[0] > 0.0 && k.0[1..].iter().all(|v| *v == 0.0));
    let lc = find_limit_cycles(&c, &SimConfig::default(), R_RANGE, DEFAULT_SCAN_POINTS).unwrap();
    assert!(lc.is_empty(), "{lc:?}");
}

#[test]
fn sweep_csv() {
    let rows = displacement_sweep(&PerturbCoeffs::zero(), &SimConfig::with_eps(0.0), (0.1, 0.9), 5).unwrap();
    assert!(rows.iter().all(|(_, d)| d.abs() < 1e-10));
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows).unwrap();
    let s = String::from_utf8(buf).unwrap();
    assert_eq!(s.lines().next(), Some("r0,dr"));
    assert_eq!(s.lines().count(), 6);
}
