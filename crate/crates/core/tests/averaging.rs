use isochron_core::averaging::*;
use isochron_core::HPReal;
use proptest::prelude::*;
use rug::Rational;

fn coeffs(v: &[i64]) -> PerturbCoeffs {
    let vals: [Rational; 20] = std::array::from_fn(|i| Rational::from(v[i]));
    PerturbCoeffs::from_values(vals)
}

fn small_coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, 20)
}

fn sign_changes(vals: &[f64]) -> usize {
    let mut last = 0.0;
    let mut n = 0;
    for &v in vals {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            n += 1;
        }
        last = v.signum();
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_is_linear(a in small_coeffs(), b in small_coeffs(), p in -7i64..7, q in 1i64..9) {
        let (ca, cb) = (coeffs(&a), coeffs(&b));
        let alpha = Rational::from(p);
        let beta = Rational::from((1, q));
        let lhs = k_from_perturbation(&ca.lin_comb(&alpha, &cb, &beta));
        let (ka, kb) = (k_from_perturbation(&ca), k_from_perturbation(&cb));
        for i in 0..6 {
            prop_assert_eq!(&lhs.0[i], &ka.0[i].scale(&alpha).add(&kb.0[i].scale(&beta)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closed_form_matches_quadrature(v in small_coeffs(), r in 0.01f64..0.99) {
        let c = coeffs(&v);
        let x = HPReal::from_f64(r, 128);
        let k = k_from_perturbation(&c).to_f64();
        let f = eval_f(&x, &k).unwrap().to_f64();
        let q = averaged_quadrature(&x, &c).unwrap().to_f64();
        prop_assert!((f - q).abs() < 1e-12, "r = {r}: {f} vs {q}");
    }

    #[test]
    fn g_has_at_least_the_zeros_of_f(n in 1usize..=5, seed in prop::collection::vec(0.0f64..1.0, 5)) {
        // targets spread at least 0.1 apart inside (0.1, 0.9)
        let gap = 0.8 / n as f64;
        let targets: Vec<f64> = (0..n).map(|i| 0.1 + gap * (i as f64 + 0.25 + 0.5 * seed[i])).collect();
        let d = design_zeros(&targets).unwrap();
        let m = reduce_to_G(&d.k);
        let grid: Vec<HPReal> = (1..400).map(|i| HPReal::from_f64(i as f64 / 400.0, 128)).collect();
        let f: Vec<f64> = grid.iter().map(|r| eval_f(r, &d.k).unwrap().to_f64()).collect();
        let g: Vec<f64> = grid.iter().map(|r| eval_G(r, &m).unwrap().to_f64()).collect();
        prop_assert_eq!(sign_changes(&f), n);
        prop_assert!(sign_changes(&g) >= sign_changes(&f));
    }
}

#[test]
fn exact_constants() {
    assert_eq!(jacobian_check(), PiPoly::pi_term(Rational::from((-1, 8)), 1));
    let (_, d) = taylor_independence();
    assert_eq!(d.to_string(), "-685/7516192768*pi^2");
}

#[test]
fn designed_witness_round_trip() {
    let d = design_zeros(&[0.2, 0.35, 0.5, 0.65, 0.8]).unwrap();
    assert_eq!(zeros_of_f(&d.k, 2000).unwrap().len(), 5);
    let c = perturbation_from_k(&d.k).unwrap();
    let back = k_from_perturbation(&c).to_f64();
    for i in 0..6 {
        assert!((back.0[i] - d.k.0[i]).abs() < 1e-14);
    }
}
