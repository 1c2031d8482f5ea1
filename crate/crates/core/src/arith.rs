//! Modular arithmetic, small multiplicative number theory and roots of unity.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// A residue class `value mod modulus` with `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(a: i64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(Residue { value: reduce(a, modulus), modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

/// Reduces a signed integer into `[0, c)`.
#[inline]
pub fn reduce(a: i64, c: u64) -> u64 {
    debug_assert!(c > 0);
    (a as i128).rem_euclid(c as i128) as u64
}

/// `a * b mod c`. Operands below 2^32 stay in 64 bits; larger ones widen.
#[inline]
pub fn mul_mod(a: u64, b: u64, c: u64) -> u64 {
    match a.checked_mul(b) {
        Some(p) => p % c,
        None => ((a as u128 * b as u128) % c as u128) as u64,
    }
}

pub fn gcd(a: i64, b: i64) -> u64 {
    num_integer::gcd(a.unsigned_abs(), b.unsigned_abs())
}

pub fn gcd3(a: i64, b: i64, c: i64) -> u64 {
    num_integer::gcd(gcd(a, b), c.unsigned_abs())
}

pub fn mod_inverse(a: i64, c: u64) -> Result<Residue> {
    if c == 0 {
        return Err(Error::ZeroModulus);
    }
    if c == 1 {
        return Ok(Residue { value: 0, modulus: 1 });
    }
    let a_red = reduce(a, c) as i128;
    let (mut r0, mut r1) = (c as i128, a_red);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible { a, c });
    }
    Ok(Residue { value: t0.rem_euclid(c as i128) as u64, modulus: c })
}

/// Lifts `(a1 mod c1, a2 mod c2)` to the unique class mod `c1*c2`.
///
/// Uses the decomposition `a = a1*c2*d2 + a2*c1*d1` with `c1*d1 = 1 (mod c2)`
/// and `c2*d2 = 1 (mod c1)`.
pub fn crt_lift(a1: Residue, a2: Residue) -> Result<Residue> {
    let (c1, c2) = (a1.modulus, a2.modulus);
    let (d1, d2) = crt_cofactors(c1, c2)?;
    let c = c1 * c2;
    let x = mul_mod(mul_mod(a1.value, c2 % c, c), d2 % c, c);
    let y = mul_mod(mul_mod(a2.value, c1 % c, c), d1 % c, c);
    Ok(Residue { value: (x + y) % c, modulus: c })
}

/// Returns `(d1, d2)` with `c1*d1 = 1 (mod c2)` and `c2*d2 = 1 (mod c1)`.
pub fn crt_cofactors(c1: u64, c2: u64) -> Result<(u64, u64)> {
    if c1 == 0 || c2 == 0 {
        return Err(Error::ZeroModulus);
    }
    if num_integer::gcd(c1, c2) != 1 {
        return Err(Error::NotCoprime { c1, c2 });
    }
    let d1 = mod_inverse(c1 as i64, c2)?.value;
    let d2 = mod_inverse(c2 as i64, c1)?.value;
    Ok((d1, d2))
}

pub fn jacobi_symbol(n: i64, c: u64) -> Result<i8> {
    if c % 2 == 0 {
        return Err(Error::EvenModulus(c));
    }
    let mut a = reduce(n, c);
    let mut m = c;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        a %= m;
    }
    Ok(if m == 1 { sign } else { 0 })
}

/// Prime factorization by trial division, adequate for `n` up to ~10^12.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn of(n: u64) -> Self {
        assert!(n > 0, "cannot factor zero");
        let mut factors = Vec::new();
        let mut m = n;
        let mut p = 2u64;
        while p * p <= m {
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((m, 1));
        }
        Factorization { n, factors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

pub fn factorize(n: u64) -> Factorization {
    Factorization::of(n)
}

pub fn divisor_count(n: u64) -> u64 {
    Factorization::of(n).divisor_count()
}

pub fn euler_phi(n: u64) -> u64 {
    Factorization::of(n).euler_phi()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && Factorization::of(n).factors() == [(n, 1)]
}

/// Splits `c = c1 * c2` where every prime of `c2` divides `m` and `gcd(c1, m) = 1`.
pub fn split_by_radical(c: u64, m: u64) -> (u64, u64) {
    let mut c1 = c;
    let mut c2 = 1;
    if m == 0 {
        // every prime divides 0
        return (1, c);
    }
    for &(p, e) in Factorization::of(c).factors() {
        if m % p == 0 {
            let pe = p.pow(e);
            c1 /= pe;
            c2 *= pe;
        }
    }
    (c1, c2)
}

/// The `c` roots of unity `e(j/c) = exp(2 pi i j / c)` for `j = 0..c`.
#[derive(Debug)]
pub struct RootTable {
    c: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(c: u64) -> Self {
        assert!(c > 0, "modulus must be positive");
        let roots = (0..c)
            .map(|j| {
                let (s, co) = (TAU * (j as f64) / (c as f64)).sin_cos();
                Complex64::new(co, s)
            })
            .collect();
        RootTable { c, roots }
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// `e(j/c)` for an already reduced index.
    #[inline]
    pub fn at(&self, j: u64) -> Complex64 {
        self.roots[j as usize]
    }

    #[inline]
    pub fn e(&self, numerator: i64) -> Complex64 {
        self.roots[reduce(numerator, self.c) as usize]
    }

    #[inline]
    pub fn cos_at(&self, j: u64) -> f64 {
        self.roots[j as usize].re
    }
}

const CACHE_LIMIT: u64 = 1 << 16;

fn cache() -> &'static RwLock<HashMap<u64, Arc<RootTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<RootTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared root table for modulus `c`; built once, read concurrently afterwards.
pub fn roots(c: u64) -> Arc<RootTable> {
    if c > CACHE_LIMIT {
        return Arc::new(RootTable::new(c));
    }
    if let Some(t) = cache().read().expect("root cache poisoned").get(&c) {
        return Arc::clone(t);
    }
    let mut w = cache().write().expect("root cache poisoned");
    Arc::clone(w.entry(c).or_insert_with(|| Arc::new(RootTable::new(c))))
}

/// `exp(2 pi i numerator / c)`.
pub fn e_frac(numerator: i64, c: u64) -> Result<Complex64> {
    if c == 0 {
        return Err(Error::ZeroModulus);
    }
    Ok(roots(c).e(numerator))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussMethod {
    Direct,
    ClosedForm,
}

/// `eps_c`: 1 for `c = 1 (mod 4)`, `i` for `c = 3 (mod 4)`.
pub fn epsilon(c: u64) -> Result<Complex64> {
    match c % 4 {
        1 => Ok(Complex64::new(1.0, 0.0)),
        3 => Ok(Complex64::new(0.0, 1.0)),
        _ => Err(Error::EvenModulus(c)),
    }
}

/// Quadratic Gauss sum `sum_{t mod c} e(n t^2 / c)`.
pub fn gauss_sum(n: i64, c: u64, method: GaussMethod) -> Result<Complex64> {
    if c == 0 {
        return Err(Error::ZeroModulus);
    }
    match method {
        GaussMethod::Direct => {
            let table = roots(c);
            let nr = reduce(n, c);
            Ok(crate::sum::pairwise_sum_by(c as usize, |t| {
                let t = t as u64;
                table.at(mul_mod(nr, mul_mod(t, t, c), c))
            }))
        }
        GaussMethod::ClosedForm => {
            if c % 2 == 0 {
                return Err(Error::EvenModulus(c));
            }
            if gcd(n, c as i64) != 1 {
                return Err(Error::NotInvertible { a: n, c });
            }
            let chi = jacobi_symbol(n, c)? as f64;
            Ok(epsilon(c)? * chi * (c as f64).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn e_frac_examples() {
        assert!(close(e_frac(0, 7).unwrap(), Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(e_frac(1, 2).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
        let w = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        assert!(close(e_frac(1, 3).unwrap(), w, 1e-15));
        assert!(close(e_frac(-2, 3).unwrap(), w, 1e-15));
        assert_eq!(e_frac(1, 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn root_table_unit_modulus_and_multiplicative() {
        for c in 1..=1000u64 {
            let t = roots(c);
            for j in 0..c {
                assert!((t.at(j).norm() - 1.0).abs() < 1e-14);
            }
            for (j, k) in [(1i64, 2i64), (c as i64 - 1, 5), (7, 11)] {
                assert!(close(t.e(j) * t.e(k), t.e(j + k), 1e-12));
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 9).unwrap().value(), 1);
        assert_eq!(mod_inverse(2, 5).unwrap().value(), 3);
        assert_eq!(mod_inverse(3, 5).unwrap().value(), 2);
        assert_eq!(mod_inverse(-2, 5).unwrap().value(), 2);
        assert_eq!(mod_inverse(6, 9), Err(Error::NotInvertible { a: 6, c: 9 }));
    }

    #[test]
    fn crt_examples() {
        let r = |a, c| Residue::new(a, c).unwrap();
        assert_eq!(crt_lift(r(0, 3), r(0, 5)).unwrap(), r(0, 15));
        assert_eq!(crt_lift(r(1, 3), r(2, 5)).unwrap(), r(7, 15));
        assert_eq!(crt_lift(r(2, 3), r(1, 5)).unwrap(), r(11, 15));
        assert_eq!(crt_lift(r(1, 4), r(1, 6)), Err(Error::NotCoprime { c1: 4, c2: 6 }));
    }

    #[test]
    fn jacobi_examples() {
        for c in (1..50).step_by(2) {
            assert_eq!(jacobi_symbol(1, c).unwrap(), 1);
        }
        assert_eq!(jacobi_symbol(2, 5).unwrap(), -1);
        assert_eq!(jacobi_symbol(4, 15).unwrap(), 1);
        assert_eq!(jacobi_symbol(6, 15).unwrap(), 0);
        assert_eq!(jacobi_symbol(3, 8), Err(Error::EvenModulus(8)));
    }

    #[test]
    fn jacobi_matches_euler_criterion_for_primes() {
        for p in [3u64, 5, 7, 11, 13, 97, 101] {
            for n in 0..p {
                let e = (0..(p - 1) / 2).fold(1u64, |acc, _| mul_mod(acc, n, p));
                let expected = if n == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(jacobi_symbol(n as i64, p).unwrap(), expected, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn jacobi_completely_multiplicative() {
        for c in (1..=99u64).step_by(2) {
            for a in 0..c as i64 {
                for b in 0..c as i64 {
                    let lhs = jacobi_symbol(a * b, c).unwrap();
                    let rhs = jacobi_symbol(a, c).unwrap() * jacobi_symbol(b, c).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn gauss_examples() {
        let g = |n, c| gauss_sum(n, c, GaussMethod::Direct).unwrap();
        assert!(close(g(1, 1), Complex64::new(1.0, 0.0), 1e-14));
        assert!(close(g(1, 3), Complex64::new(0.0, 3f64.sqrt()), 1e-12));
        assert!(close(g(2, 5), Complex64::new(-(5f64.sqrt()), 0.0), 1e-12));
        assert_eq!(gauss_sum(2, 6, GaussMethod::ClosedForm), Err(Error::EvenModulus(6)));
        assert!(gauss_sum(3, 9, GaussMethod::ClosedForm).is_err());
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_by_radical(15, 2), (15, 1));
        assert_eq!(split_by_radical(24, 2), (3, 8));
        assert_eq!(split_by_radical(60, 6), (5, 12));
        assert_eq!(split_by_radical(1, 6), (1, 1));
    }

    #[test]
    fn factorization_plumbing() {
        let f = factorize(360);
        assert_eq!(f.factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(f.divisor_count(), 24);
        assert_eq!(f.euler_phi(), 96);
        assert_eq!(f.divisors().len(), 24);
        assert_eq!(divisor_count(1), 1);
        assert_eq!(euler_phi(1), 1);
        assert!(is_prime(97) && !is_prime(91) && !is_prime(1));
    }
}
