//! Library routines against independent formulas.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;

use quadvar::arith::{gauss_sum, is_prime, jacobi_symbol, GaussMethod};
use quadvar::bessel::{bessel_j, bessel_j_range};
use quadvar::eigenform::eigenform;
use quadvar::qexp::{qexp_delta, QExpansion};

/// Bessel's integral `J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt`.
/// The integrand is smooth and 2pi-periodic, so the midpoint rule converges geometrically.
fn bessel_integral(n: u32, x: f64) -> f64 {
    let steps = 4000;
    let h = 2.0 * PI / steps as f64;
    let s: f64 = (0..steps).map(|i| ((i as f64 + 0.5) * h).mul_add(n as f64, -x * ((i as f64 + 0.5) * h).sin()).cos()).sum();
    s * h / (2.0 * PI)
}

#[test]
fn bessel_matches_integral_representation() {
    for &x in &[0.1, 1.0, 4.0 * PI, 8.5, 25.0, 60.0, 150.0, 400.0] {
        for n in [0u32, 1, 2, 5, 11, 15, 17, 19, 21, 25, 40] {
            let (a, b) = (bessel_j(n, x), bessel_integral(n, x));
            assert!((a - b).abs() < 2e-13, "J_{n}({x}): {a} vs {b}");
        }
    }
}

#[test]
fn bessel_range_agrees_with_pointwise() {
    for &x in &[3.0, 30.0, 300.0] {
        let v = bessel_j_range(30, x);
        for (k, val) in v.iter().enumerate() {
            assert!((val - bessel_j(k as u32, x)).abs() < 1e-13);
        }
    }
}

#[test]
fn known_bessel_values() {
    // zeros and tabulated values
    assert!(bessel_j(0, 2.404825557695773).abs() < 1e-14);
    assert!(bessel_j(1, 3.831705970207512).abs() < 1e-14);
    assert!((bessel_j(0, 1.0) - 0.7651976865579666).abs() < 1e-15);
    assert!((bessel_j(1, 10.0) - 0.04347274616886144).abs() < 1e-15);
}

#[test]
fn delta_from_eisenstein_cubes() {
    let len = 200;
    let e4 = QExpansion::eisenstein(4, len).unwrap();
    let e6 = QExpansion::eisenstein(6, len).unwrap();
    let cube = e4.mul(&e4).unwrap().mul(&e4).unwrap();
    let square = e6.mul_naive(&e6).unwrap();
    let delta = qexp_delta(len - 1).unwrap();
    for n in 0..len {
        let diff = cube.coeff(n) - square.coeff(n);
        assert_eq!(&diff, &(delta.coeff(n) * BigInt::from(1728)), "n = {n}");
    }
}

#[test]
fn eisenstein_product_identities() {
    let len = 120;
    let e4 = QExpansion::eisenstein(4, len).unwrap();
    let e6 = QExpansion::eisenstein(6, len).unwrap();
    assert_eq!(e4.mul(&e4).unwrap(), QExpansion::eisenstein(8, len).unwrap());
    assert_eq!(e4.mul(&e6).unwrap(), QExpansion::eisenstein(10, len).unwrap());
    assert_eq!(e4.mul(&e4).unwrap().mul(&e6).unwrap(), QExpansion::eisenstein(14, len).unwrap());
}

#[test]
fn tau_values() {
    let f = eigenform(12, 30).unwrap();
    let known: [(u64, i64); 5] = [(2, -24), (13, -577738), (23, 18643272), (24, 21288960), (30, -29211840)];
    for (n, t) in known {
        assert_eq!(f.a(n).unwrap(), &BigInt::from(t), "tau({n})");
    }
}

#[test]
fn jacobi_matches_euler_criterion() {
    for p in (3..400u64).filter(|&p| is_prime(p)) {
        for n in 0..p as i64 {
            let mut r = 1u64;
            for _ in 0..(p - 1) / 2 {
                r = r * n as u64 % p;
            }
            let euler = if n == 0 { 0 } else if r == 1 { 1 } else { -1 };
            assert_eq!(jacobi_symbol(n, p).unwrap(), euler, "({n}/{p})");
        }
    }
}

#[test]
fn gauss_sum_square_law() {
    // |G(n, c)|^2 = c for odd c coprime to n, and G(1, c)^2 = (-1/c) c
    for c in (3..200u64).step_by(2) {
        let g = gauss_sum(1, c, GaussMethod::Direct).unwrap();
        let sign = if c % 4 == 1 { 1.0 } else { -1.0 };
        assert!((g * g - Complex64::new(sign * c as f64, 0.0)).norm() < 1e-9 * c as f64, "c = {c}");
    }
}
