use std::f64::consts::PI;

use cosine_zeros::k_constant::TABLE1;
use cosine_zeros::*;
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn abc_satisfies_cauchy_schwarz(ell in 1usize..=8, extra in 0usize..300, x in 0.0f64..2.0 * PI) {
        let n = 2 * ell + extra;
        for scheme in [CoefficientScheme::iid(), CoefficientScheme::palindromic(ell), CoefficientScheme::contiguous(ell)] {
            let basis = effective_basis(&scheme, n).unwrap();
            let t = abc_direct(&basis, x);
            prop_assert!(t.a >= 0.0 && t.c >= 0.0);
            prop_assert!(t.a * t.c - t.b * t.b >= -1e-9 * t.a * t.c);
        }
    }

    #[test]
    fn closed_form_matches_direct_sum(ell in 1usize..=8, extra in 0usize..400, x in 1e-3f64..PI - 1e-3) {
        let n = 2 * ell + extra;
        let basis = effective_basis(&CoefficientScheme::palindromic(ell), n).unwrap();
        let direct = abc_direct(&basis, x).a;
        // Points next to the excluded set are rejected, not approximated.
        let Ok(closed) = a_closed_form(&decompose(n, ell).unwrap(), x) else { return Ok(()) };
        prop_assert!((direct - closed).abs() <= 1e-9 * direct, "n={n} ell={ell} x={x}: {direct} vs {closed}");
    }

    #[test]
    fn density_is_reflection_symmetric(ell in 1usize..=6, extra in 0usize..120, x in 0.01f64..PI - 0.01) {
        let n = 2 * ell + extra;
        let basis = effective_basis(&CoefficientScheme::palindromic(ell), n).unwrap();
        if let (Ok(d1), Ok(d2)) = (density(&basis, x), density(&basis, 2.0 * PI - x)) {
            prop_assert!((d1 - d2).abs() <= 1e-9 * d1.max(1.0));
        }
        // x -> pi - x maps every paired basis function to +-itself when n - ell is odd.
        if (n - ell) % 2 == 1 {
            if let (Ok(d1), Ok(d2)) = (density(&basis, x), density(&basis, PI - x)) {
                prop_assert!((d1 - d2).abs() <= 1e-10 * d1.max(1.0), "n={n} ell={ell}");
            }
        }
    }
}

#[test]
fn iid_expected_count_near_asymptote() {
    let basis = effective_basis(&CoefficientScheme::iid(), 40).unwrap();
    let e = expected_zeros(&basis, (0.0, 2.0 * PI), &cfg()).unwrap();
    assert_eq!(e.deterministic, 0);
    let target = 80.0 / 3f64.sqrt();
    assert!((e.value / target - 1.0).abs() < 0.02, "{e:?}");
}

#[test]
fn unit_blocks_expected_count_near_asymptote() {
    let basis = effective_basis(&CoefficientScheme::palindromic(1), 40).unwrap();
    let e = expected_zeros(&basis, (0.0, 2.0 * PI), &cfg()).unwrap();
    assert_eq!(e.deterministic, 40);
    let target = 40.0 + 40.0 / 3f64.sqrt();
    assert!((e.value / target - 1.0).abs() < 0.03, "{e:?}");
}

#[test]
fn expected_count_splits_over_halves() {
    let basis = effective_basis(&CoefficientScheme::palindromic(3), 61).unwrap();
    let whole = expected_zeros(&basis, (0.0, 2.0 * PI), &cfg()).unwrap().value;
    let first = expected_zeros(&basis, (0.0, PI), &cfg()).unwrap().value;
    let second = expected_zeros(&basis, (PI, 2.0 * PI), &cfg()).unwrap().value;
    assert!((whole - first - second).abs() < 1e-4 * whole, "{whole} vs {first} + {second}");
    // Cosine sums are even about pi.
    assert!((first - second).abs() < 1e-4 * whole);
}

#[test]
fn expected_count_is_sigma_free() {
    let basis = effective_basis(&CoefficientScheme::palindromic(2), 30).unwrap();
    let a = expected_zeros(&basis, (0.0, 2.0 * PI), &cfg()).unwrap().value;
    let b = expected_zeros(&basis.clone().with_sigma(7.5), (0.0, 2.0 * PI), &cfg()).unwrap().value;
    assert!((a - b).abs() < 1e-8 * a);
}

#[test]
fn asymptotic_integral_approaches_constant() {
    let k2 = TABLE1[0].1;
    let i = i_ell(2, 3000, &cfg()).unwrap();
    assert!((i.value - k2).abs() < 0.02, "{i:?}");
    for ell in [2usize, 3] {
        let k = k_ell(ell, &cfg()).unwrap().value;
        let coarse = (i_ell(ell, 600, &cfg()).unwrap().value - k).abs();
        let fine = (i_ell(ell, 4800, &cfg()).unwrap().value - k).abs();
        assert!(fine < coarse, "ell={ell}: {coarse} -> {fine}");
    }
}

#[test]
fn kac_rice_matches_asymptote_for_large_degree() {
    // E[N] / (2n/sqrt 3) tends to K_ell.
    let n = 400;
    for ell in [2usize, 3] {
        let basis = effective_basis(&CoefficientScheme::palindromic(ell), n).unwrap();
        let e = expected_zeros(&basis, (0.0, 2.0 * PI), &cfg()).unwrap().value;
        let ratio = e / (2.0 * n as f64 / 3f64.sqrt());
        let k = k_ell(ell, &cfg()).unwrap().value;
        assert!((ratio - k).abs() < 0.01, "ell={ell}: ratio {ratio}, K {k}");
    }
}

#[test]
fn large_degree_moments_follow_leading_terms() {
    // Away from multiples of pi/ell:
    // A ~ n (1 + u cos nx) / 2, B ~ -n^2 u sin(nx) / 4, C ~ n^3 (2 - u cos nx) / 12.
    for ell in [2usize, 3] {
        let xs: Vec<f64> = (0..60).map(|i| 0.2 + 2.7 * i as f64 / 59.0).collect();
        let xs: Vec<f64> =
            xs.into_iter().filter(|&x| (1..ell).all(|k| (x - k as f64 * PI / ell as f64).abs() > 0.15)).collect();
        let mut prev = [f64::INFINITY; 3];
        for n in [500usize, 1000, 2000, 4000] {
            let basis = effective_basis(&CoefficientScheme::palindromic(ell), n).unwrap();
            let nf = n as f64;
            let mut worst = [0.0f64; 3];
            for &x in &xs {
                let t = abc_direct(&basis, x);
                let u = u_kernel(ell, x).unwrap();
                let (s, c) = (nf * x).sin_cos();
                worst[0] = worst[0].max((t.a - nf * (1.0 + u * c) / 2.0).abs() / nf);
                worst[1] = worst[1].max((t.b + nf * nf * u * s / 4.0).abs() / (nf * nf));
                worst[2] = worst[2].max((t.c - nf.powi(3) * (2.0 - u * c) / 12.0).abs() / nf.powi(3));
            }
            for k in 0..3 {
                assert!(worst[k] < prev[k], "ell={ell} n={n} term {k}: {} !< {}", worst[k], prev[k]);
            }
            prev = worst;
        }
    }
}

#[test]
fn density_error_paths() {
    // Every function of this basis vanishes at pi/2.
    let basis = EffectiveBasis::single_frequencies(&[1, 3, 5], 1.0);
    assert!(matches!(density(&basis, PI / 2.0), Err(Error::Degenerate { .. })));
    assert!(a_closed_form(&decompose(20, 2).unwrap(), 0.0).is_err());
    assert!(i_ell(3, 5, &cfg()).is_err());
    assert!(expected_zeros(&basis, (1.0, 0.5), &cfg()).is_err());
}
