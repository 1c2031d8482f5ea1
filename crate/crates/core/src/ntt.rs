//! Exact convolution of big-integer sequences by number-theoretic transforms
//! modulo several 62-bit primes, recombined with Garner's algorithm.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Two-adic order available in every prime.
const TWO_ADIC: u32 = 24;

#[derive(Debug, Clone, Copy)]
struct NttPrime {
    p: u64,
    /// Element of multiplicative order `2^TWO_ADIC`.
    root: u64,
}

#[inline]
fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn primes() -> &'static [NttPrime] {
    static PRIMES: OnceLock<Vec<NttPrime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut c = ((1u64 << 62) - 1) >> TWO_ADIC;
        while out.len() < 24 {
            let p = (c << TWO_ADIC) + 1;
            if is_prime_u64(p) {
                let half = 1u64 << (TWO_ADIC - 1);
                let root = (2u64..)
                    .map(|x| powm(x, c, p))
                    .find(|&y| powm(y, half, p) != 1)
                    .expect("generator exists");
                out.push(NttPrime { p, root });
            }
            c -= 1;
        }
        out
    })
}

fn ntt(a: &mut [u64], invert: bool, pr: NttPrime) {
    let n = a.len();
    let p = pr.p;
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = powm(pr.root, (1u64 << TWO_ADIC) / len as u64, p);
        if invert {
            w = powm(w, p - 2, p);
        }
        let half = len / 2;
        let mut ws = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            ws.push(cur);
            cur = mulm(cur, w, p);
        }
        for chunk in a.chunks_mut(len) {
            for k in 0..half {
                let u = chunk[k];
                let v = mulm(chunk[k + half], ws[k], p);
                chunk[k] = if u + v >= p { u + v - p } else { u + v };
                chunk[k + half] = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = powm(n as u64, p - 2, p);
        a.iter_mut().for_each(|x| *x = mulm(*x, inv_n, p));
    }
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((x % &m) + &m) % &m;
    let (_, digits) = r.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

fn bits(x: &BigInt) -> u64 {
    x.bits()
}

/// Truncated product `c_n = sum_{i+j=n} a_i b_j` for `n < len`, exact.
pub fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if a.is_empty() || b.is_empty() || len == 0 {
        return vec![BigInt::zero(); len];
    }
    let max_a = a.iter().map(|x| x.abs()).max().unwrap_or_default();
    let sum_b: BigInt = b.iter().map(|x| x.abs()).sum();
    if max_a.is_zero() || sum_b.is_zero() {
        return vec![BigInt::zero(); len];
    }
    // |c_n| <= max|a| * sum|b|; the recombined modulus must exceed twice that
    let need = bits(&max_a) + bits(&sum_b) + 2;
    let count = (need as usize).div_ceil(61);
    assert!(count <= primes().len(), "product too large for the prime pool");
    let ps = &primes()[..count.max(1)];
    let size = (a.len() + b.len() - 1).next_power_of_two();
    assert!(size <= 1 << TWO_ADIC, "transform length exceeds two-adic capacity");

    let residues: Vec<Vec<u64>> = ps
        .iter()
        .map(|&pr| {
            let mut fa = vec![0u64; size];
            let mut fb = vec![0u64; size];
            for (i, x) in a.iter().enumerate() {
                fa[i] = residue(x, pr.p);
            }
            for (i, x) in b.iter().enumerate() {
                fb[i] = residue(x, pr.p);
            }
            ntt(&mut fa, false, pr);
            ntt(&mut fb, false, pr);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = mulm(*x, *y, pr.p);
            }
            ntt(&mut fa, true, pr);
            fa.truncate(len);
            fa.resize(len, 0);
            fa
        })
        .collect();

    // Garner: mixed-radix digits v_i with x = v_0 + v_1 p_0 + v_2 p_0 p_1 + ...
    let k = ps.len();
    let mut inv = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..i {
            inv[j][i] = powm(ps[j].p % ps[i].p, ps[i].p - 2, ps[i].p);
        }
    }
    let modulus: BigInt = ps.iter().map(|pr| BigInt::from(pr.p)).product();
    let half = &modulus >> 1;
    (0..len)
        .map(|n| {
            let mut v = vec![0u64; k];
            for i in 0..k {
                let p = ps[i].p;
                let mut t = residues[i][n];
                for j in 0..i {
                    let d = if t >= v[j] % p { t - v[j] % p } else { t + p - v[j] % p };
                    t = mulm(d, inv[j][i], p);
                }
                v[i] = t;
            }
            let mut x = BigInt::zero();
            for i in (0..k).rev() {
                x = x * BigInt::from(ps[i].p) + BigInt::from(v[i]);
            }
            if x > half {
                x -= &modulus;
            }
            x
        })
        .collect()
}

/// Schoolbook truncated product, used as an oracle and for tiny inputs.
pub fn convolve_naive(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn miller_rabin() {
        assert!(is_prime_u64(2) && is_prime_u64(4_611_686_018_427_387_847));
        assert!(!is_prime_u64(1) && !is_prime_u64(561) && !is_prime_u64(3_215_031_751));
        for p in primes() {
            assert!(is_prime_u64(p.p) && (p.p - 1) % (1 << TWO_ADIC) == 0);
            assert_eq!(powm(p.root, 1 << TWO_ADIC, p.p), 1);
            assert_ne!(powm(p.root, 1 << (TWO_ADIC - 1), p.p), 1);
        }
    }

    #[test]
    fn matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, digits) in [(1usize, 1u32), (5, 3), (40, 12), (200, 18)] {
            let gen = |rng: &mut ChaCha8Rng| -> Vec<BigInt> {
                (0..n)
                    .map(|_| {
                        let mut x = BigInt::from(rng.gen_range(-1_000_000_000i64..1_000_000_000));
                        for _ in 0..digits {
                            x = x * 1_000_000_007i64 + rng.gen_range(-1000i64..1000);
                        }
                        x
                    })
                    .collect()
            };
            let a = gen(&mut rng);
            let b = gen(&mut rng);
            assert_eq!(convolve(&a, &b, n), convolve_naive(&a, &b, n));
        }
    }
}
