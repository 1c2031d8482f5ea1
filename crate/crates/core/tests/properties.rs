use proptest::prelude::*;

use num_bigint::BigInt;

use quadvar::arith::{gcd, mod_inverse};
use quadvar::eigenform::eigenform;
use quadvar::kloosterman::{
    kloosterman_sum, twisted_multiplicativity_residual, twisted_sum_direct, twisted_sum_gauss, weil_envelope,
    TwistedSumParams,
};
use quadvar::sum::{ordered_sum, pairwise_sum};
use quadvar::verify::is_definite;

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (2u64..14, 2u64..14).prop_filter("coprime", |(a, b)| gcd(*a as i64, *b as i64) == 1)
}

/// `(gamma, B, C, u, v)` with `gamma > 0` and `C` large enough that `B^2 < 4 gamma C`.
fn definite_coeffs() -> impl Strategy<Value = (i64, i64, i64, i64, i64)> {
    (1i64..12, -20i64..20, 0i64..40, -30i64..30, -30i64..30)
        .prop_map(|(g, b, extra, u, v)| (g, b, b * b / (4 * g) + 1 + extra, u, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kloosterman_symmetries(m in -200i64..200, n in -200i64..200, c in 1u64..300) {
        let s = kloosterman_sum(m, n, c).unwrap();
        prop_assert!((s - kloosterman_sum(n, m, c).unwrap()).abs() < 1e-9);
        prop_assert!((s - kloosterman_sum(-m, -n, c).unwrap()).abs() < 1e-9);
        prop_assert!((s - kloosterman_sum(m + c as i64, n, c).unwrap()).abs() < 1e-9);
        prop_assert!(s.abs() <= weil_envelope(m, n, c) * (1.0 + 1e-9));
    }

    #[test]
    fn kloosterman_unit_twist(m in 1i64..200, n in 1i64..200, c in 2u64..300, a in 1i64..300) {
        prop_assume!(gcd(a, c as i64) == 1);
        // S(am, n; c) = S(m, an; c) for a a unit
        let lhs = kloosterman_sum(a * m, n, c).unwrap();
        let rhs = kloosterman_sum(m, a * n, c).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
        let inv = mod_inverse(a, c).unwrap().value() as i64;
        prop_assert!((kloosterman_sum(m, n, c).unwrap() - kloosterman_sum(a * m, inv * n, c).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn twisted_sum_is_multiplicative((c1, c2) in coprime_pair(), (g, b, cc, u, v) in definite_coeffs()) {
        let c = c1 * c2;
        let p = TwistedSumParams::new(g, b, cc, u, v, c).unwrap();
        prop_assert!(is_definite(&p));
        let r = twisted_multiplicativity_residual(&p, c1, c2).unwrap();
        prop_assert!(r < 1e-6 * (c * c) as f64, "{:?}: {}", p, r);
    }

    #[test]
    fn gauss_route_on_definite_quadratics(c in (1u64..40).prop_map(|k| 2 * k + 1), (g, b, cc, u, v) in definite_coeffs()) {
        let p = TwistedSumParams::new(g, b, cc, u, v, c).unwrap();
        prop_assume!(gcd(p.four_gamma(), c as i64) == 1);
        let d = twisted_sum_direct(&p).unwrap();
        let q = twisted_sum_gauss(&p).unwrap();
        prop_assert!((d - q).norm() < 1e-6 * (c * c) as f64, "{:?}: {} vs {}", p, d, q);
    }

    #[test]
    fn hecke_multiplicative(k in prop::sample::select(vec![12u32, 16, 18, 20, 22, 26]), m in 1u64..60, n in 1u64..60) {
        prop_assume!(gcd(m as i64, n as i64) == 1);
        let f = eigenform(k, 3600).unwrap();
        let prod: BigInt = f.a(m).unwrap() * f.a(n).unwrap();
        prop_assert_eq!(f.a(m * n).unwrap(), &prod);
    }

    #[test]
    fn ordered_sums_are_accurate(values in prop::collection::vec(-1e6f64..1e6, 0..2000)) {
        let exact: f64 = values.iter().sum();
        let p = pairwise_sum(&values);
        let o = ordered_sum(values.len(), |i| values[i]);
        let scale = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((p - exact).abs() <= 1e-12 * scale);
        prop_assert_eq!(p.to_bits(), o.to_bits());
    }
}
