//! Truncated power series in `q` with exact big-integer coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::ntt::{convolve, convolve_naive};

/// Products below this length use the schoolbook algorithm.
const NAIVE_LEN: usize = 64;

/// `sum_{n < len} a_n q^n`, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    coeffs: Vec<BigInt>,
}

impl QExpansion {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        QExpansion { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        QExpansion { coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect() }
    }

    pub fn zero(len: usize) -> Self {
        QExpansion { coeffs: vec![BigInt::zero(); len] }
    }

    pub fn one(len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 0 {
            s.coeffs[0] = BigInt::one();
        }
        s
    }

    /// Truncation length: coefficients of `q^0 .. q^{len-1}` are known.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(QExpansion { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        QExpansion { coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    /// Product truncated to the common length.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let len = self.len();
        let coeffs = if len <= NAIVE_LEN {
            convolve_naive(&self.coeffs, &other.coeffs, len)
        } else {
            convolve(&self.coeffs, &other.coeffs, len)
        };
        Ok(QExpansion { coeffs })
    }

    /// Schoolbook product, kept as an oracle for the transform-based one.
    pub fn mul_naive(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(QExpansion { coeffs: convolve_naive(&self.coeffs, &other.coeffs, self.len()) })
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, mut e: u32) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiplication by `q^k`, keeping the truncation length.
    pub fn shift(&self, k: usize) -> Self {
        let len = self.len();
        let mut coeffs = vec![BigInt::zero(); len];
        for n in k..len {
            coeffs[n] = self.coeffs[n - k].clone();
        }
        QExpansion { coeffs }
    }

    /// `prod_{n >= 1} (1 - q^n) = sum_{j in Z} (-1)^j q^{j(3j-1)/2}`.
    pub fn euler_product(len: usize) -> Self {
        let mut c = vec![0i64; len];
        let mut j = 0i64;
        loop {
            let mut any = false;
            for e in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
                if (e as usize) < len {
                    c[e as usize] = if j % 2 == 0 { 1 } else { -1 };
                    any = true;
                }
                if j == 0 {
                    break;
                }
            }
            if !any {
                break;
            }
            j += 1;
        }
        Self::from_i64(&c)
    }

    /// Eisenstein series `E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n`, `k in {4, 6, 8, 10, 14}`.
    pub fn eisenstein(k: u32, len: usize) -> Result<Self> {
        let factor: i64 = match k {
            4 => 240,
            6 => -504,
            8 => 480,
            10 => -264,
            14 => -24,
            _ => return Err(Error::UnsupportedWeight(k)),
        };
        let mut coeffs = vec![BigInt::zero(); len];
        if len > 0 {
            coeffs[0] = BigInt::one();
        }
        let f = BigInt::from(factor);
        for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
            *slot = &f * sigma(n as u64, k - 1);
        }
        Ok(QExpansion { coeffs })
    }
}

/// `sigma_s(n) = sum_{d | n} d^s`, exact.
pub fn sigma(n: u64, s: u32) -> BigInt {
    let mut total = BigInt::one();
    for &(p, e) in factorize(n).factors() {
        let pp = BigInt::from(p).pow(s);
        let mut term = BigInt::one();
        let mut local = BigInt::one();
        for _ in 0..e {
            term *= &pp;
            local += &term;
        }
        total *= local;
    }
    total
}

/// `Delta = q prod (1 - q^n)^24`, coefficients `tau(0..=n_max)`.
pub fn qexp_delta(n_max: usize) -> Result<QExpansion> {
    if n_max == 0 {
        return Err(Error::InsufficientTruncation { needed: 1, available: 0 });
    }
    let eta = QExpansion::euler_product(n_max + 1);
    Ok(eta.pow(24)?.shift(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagonal_matches_product() {
        let len = 60;
        let mut prod = QExpansion::one(len);
        for n in 1..len {
            let mut f = vec![0i64; len];
            f[0] = 1;
            f[n] = -1;
            prod = prod.mul_naive(&QExpansion::from_i64(&f)).unwrap();
        }
        assert_eq!(prod, QExpansion::euler_product(len));
    }

    #[test]
    fn tau_examples() {
        let d = qexp_delta(10).unwrap();
        let expect = [0i64, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
        assert_eq!(d, QExpansion::from_i64(&expect));
    }

    #[test]
    fn transform_product_matches_schoolbook() {
        let e = QExpansion::euler_product(300);
        let fast = e.pow(24).unwrap();
        let mut slow = QExpansion::one(300);
        for _ in 0..24 {
            slow = slow.mul_naive(&e).unwrap();
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn eisenstein_identities() {
        let len = 200;
        let e4 = QExpansion::eisenstein(4, len).unwrap();
        let e6 = QExpansion::eisenstein(6, len).unwrap();
        assert_eq!(e4.mul(&e4).unwrap(), QExpansion::eisenstein(8, len).unwrap());
        assert_eq!(e4.mul(&e6).unwrap(), QExpansion::eisenstein(10, len).unwrap());
        assert_eq!(e4.mul(&e4).unwrap().mul(&e6).unwrap(), QExpansion::eisenstein(14, len).unwrap());
        // 1728 Delta = E4^3 - E6^2
        let lhs = e4.pow(3).unwrap().add(&e6.mul(&e6).unwrap().scale(&BigInt::from(-1))).unwrap();
        assert_eq!(lhs, qexp_delta(len - 1).unwrap().scale(&BigInt::from(1728)));
        assert!(QExpansion::eisenstein(12, 5).is_err());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let a = QExpansion::one(3);
        let b = QExpansion::one(4);
        assert!(matches!(a.mul(&b), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(1, 3), BigInt::from(1));
        assert_eq!(sigma(12, 1), BigInt::from(28));
        assert_eq!(sigma(4, 3), BigInt::from(73));
    }
}
