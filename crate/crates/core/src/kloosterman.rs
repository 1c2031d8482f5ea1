//! Classical Kloosterman sums and the quadratic-polynomial twisted sums
//!
//! ```text
//! S_c^{B,C}(g) = sum_{a,b mod c} S(|q(a)|, |q(b)|; c) e_c(2 g a b + a(B+u) + b(B+v)),
//! q(x) = g x^2 + B x + C,
//! ```
//!
//! together with verifiers for their multiplicativity, the Gauss-sum closed
//! form, the vanishing criterion and the size envelopes.
//!
//! Residues `a, b` range over the representatives `0..c`; the absolute value
//! is taken on the integer `q(a)` before reduction. When `q >= 0` on `[0, c)`
//! (for instance `g > 0`, `B, C >= 0`) the absolute value is inert.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::arith::{
    crt_cofactors, divisor_count, epsilon, gcd, gcd3, jacobi_symbol, mod_inverse, mul_mod, reduce,
    roots, split_by_radical, RootTable,
};
use crate::error::{Error, Result};
use crate::sum::pairwise_sum_by;

/// Imaginary residual tolerance, relative to `c`.
pub const REALITY_TOL: f64 = 1e-9;
/// Tolerance for twisted-sum identities, relative to the trivial size `c^2`.
pub const TWISTED_TOL: f64 = 1e-6;
/// Exponent slack used in the `c2^{5/2 + eps}` envelope.
pub const ENVELOPE_EPS: f64 = 0.01;

/// Units of `Z/cZ` with their inverses and the root table, reusable across `(m, n)`.
#[derive(Debug)]
pub struct KloostermanKernel {
    c: u64,
    units: Vec<(u64, u64)>,
    table: Arc<RootTable>,
}

impl KloostermanKernel {
    pub fn new(c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroModulus);
        }
        let units = if c == 1 {
            vec![(0, 0)]
        } else {
            let xs: Vec<u64> = (1..c).filter(|&x| num_integer::gcd(x, c) == 1).collect();
            xs.iter().copied().zip(batch_inverse(&xs, c)).collect()
        };
        Ok(KloostermanKernel { c, units, table: roots(c) })
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    pub fn units(&self) -> &[(u64, u64)] {
        &self.units
    }

    /// The complex accumulator `sum' e((m x + n xbar)/c)`.
    pub fn complex_sum(&self, m: i64, n: i64) -> Complex64 {
        let c = self.c;
        let (mr, nr) = (reduce(m, c), reduce(n, c));
        pairwise_sum_by(self.units.len(), |i| {
            let (x, xb) = self.units[i];
            self.table.at((mul_mod(mr, x, c) + mul_mod(nr, xb, c)) % c)
        })
    }

    /// Real-only accumulation for hot loops (the imaginary part cancels exactly).
    pub fn real_sum(&self, m: i64, n: i64) -> f64 {
        let c = self.c;
        let (mr, nr) = (reduce(m, c), reduce(n, c));
        pairwise_sum_by(self.units.len(), |i| {
            let (x, xb) = self.units[i];
            self.table.cos_at((mul_mod(mr, x, c) + mul_mod(nr, xb, c)) % c)
        })
    }

    pub fn sum(&self, m: i64, n: i64) -> Result<f64> {
        let z = self.complex_sum(m, n);
        if z.im.abs() >= REALITY_TOL * self.c as f64 {
            return Err(Error::ImaginaryResidual { m, n, c: self.c, residual: z.im.abs() });
        }
        Ok(z.re)
    }
}

/// Inverses of units modulo `c` with a single extended-Euclid call (Montgomery's trick).
fn batch_inverse(xs: &[u64], c: u64) -> Vec<u64> {
    let mut prefix = Vec::with_capacity(xs.len());
    let mut acc = 1 % c;
    for &x in xs {
        prefix.push(acc);
        acc = mul_mod(acc, x, c);
    }
    let mut inv = mod_inverse(acc as i64, c).expect("product of units").value();
    let mut out = vec![0; xs.len()];
    for i in (0..xs.len()).rev() {
        out[i] = mul_mod(inv, prefix[i], c);
        inv = mul_mod(inv, xs[i], c);
    }
    out
}

/// `S(m, n; c) = sum'_{x mod c} e((m x + n xbar)/c)`.
pub fn kloosterman_sum(m: i64, n: i64, c: u64) -> Result<f64> {
    KloostermanKernel::new(c)?.sum(m, n)
}

/// `sqrt(gcd(m, n, c)) * sqrt(c) * tau(c)`.
pub fn weil_envelope(m: i64, n: i64, c: u64) -> f64 {
    let g = gcd3(m, n, c as i64) as f64;
    g.sqrt() * (c as f64).sqrt() * divisor_count(c) as f64
}

/// All `S(m, n; c)` for `m, n` in `0..c`, row `m` obtained by one inverse DFT of
/// the vector `y -> e(m ybar / c)` supported on units.
#[derive(Debug)]
pub struct KloostermanTable {
    c: u64,
    values: Vec<f64>,
}

impl KloostermanTable {
    fn build(c: u64) -> Self {
        let kernel = KloostermanKernel::new(c).expect("positive modulus");
        let n = c as usize;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(n);
        let mut values = vec![0.0; n * n];
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..c {
            row.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for &(x, xb) in kernel.units() {
                row[xb as usize] += kernel.table.at(mul_mod(m, x, c));
            }
            fft.process(&mut row);
            let base = m as usize * n;
            for (k, z) in row.iter().enumerate() {
                values[base + k] = z.re;
            }
        }
        KloostermanTable { c, values }
    }

    /// Shared table for modulus `c` (cached up to `c <= 256`).
    pub fn for_modulus(c: u64) -> Result<Arc<Self>> {
        if c == 0 {
            return Err(Error::ZeroModulus);
        }
        if c > 256 {
            return Ok(Arc::new(Self::build(c)));
        }
        static CACHE: OnceLock<RwLock<HashMap<u64, Arc<KloostermanTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(t) = cache.read().expect("table cache poisoned").get(&c) {
            return Ok(Arc::clone(t));
        }
        let built = Arc::new(Self::build(c));
        let mut w = cache.write().expect("table cache poisoned");
        Ok(Arc::clone(w.entry(c).or_insert(built)))
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    #[inline]
    pub fn get(&self, m: u64, n: u64) -> f64 {
        self.values[m as usize * self.c as usize + n as usize]
    }
}

/// Parameters `(gamma, B, C, u, v, c)` of a twisted sum.
///
/// With `half = true` the quadratic and linear coefficients are `gamma/2` and
/// `B/2` (an integer-valued quadratic with `2A, 2B` odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwistedSumParams {
    pub gamma: i64,
    pub b: i64,
    pub c_const: i64,
    pub u: i64,
    pub v: i64,
    pub c: u64,
    pub half: bool,
}

/// The same parameters reduced modulo `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReducedParams {
    pub gamma: u64,
    pub b: u64,
    pub c_const: u64,
    pub u: u64,
    pub v: u64,
}

impl TwistedSumParams {
    pub fn new(gamma: i64, b: i64, c_const: i64, u: i64, v: i64, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(TwistedSumParams { gamma, b, c_const, u, v, c, half: false })
    }

    /// Coefficients `gamma2/2` and `b2/2`; both numerators must be odd.
    pub fn half_integer(gamma2: i64, b2: i64, c_const: i64, u: i64, v: i64, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroModulus);
        }
        if gamma2.rem_euclid(2) != 1 || b2.rem_euclid(2) != 1 {
            return Err(Error::NotIntegerValued { a2: gamma2, b2 });
        }
        Ok(TwistedSumParams { gamma: gamma2, b: b2, c_const, u, v, c, half: true })
    }

    pub fn with_modulus(&self, c: u64) -> Self {
        TwistedSumParams { c, ..*self }
    }

    pub fn with_uv(&self, u: i64, v: i64) -> Self {
        TwistedSumParams { u, v, ..*self }
    }

    /// Residues of `gamma, B, C, u, v`; half-integer coefficients use `2^{-1} mod c`
    /// and therefore require odd `c`.
    pub fn reduced(&self) -> Result<ReducedParams> {
        let c = self.c;
        let (gamma, b) = if self.half {
            if c % 2 == 0 {
                return Err(Error::EvenModulus(c));
            }
            let h = mod_inverse(2, c)?.value();
            (mul_mod(reduce(self.gamma, c), h, c), mul_mod(reduce(self.b, c), h, c))
        } else {
            (reduce(self.gamma, c), reduce(self.b, c))
        };
        Ok(ReducedParams {
            gamma,
            b,
            c_const: reduce(self.c_const, c),
            u: reduce(self.u, c),
            v: reduce(self.v, c),
        })
    }

    /// The integer `q(a)` evaluated on the representative `a`.
    pub fn q(&self, a: i64) -> i128 {
        let a = a as i128;
        if self.half {
            (self.gamma as i128 * a * a + self.b as i128 * a) / 2 + self.c_const as i128
        } else {
            self.gamma as i128 * a * a + self.b as i128 * a + self.c_const as i128
        }
    }

    /// `2 * gamma` as an integer, which is what the bilinear phase uses.
    fn two_gamma(&self) -> i64 {
        if self.half {
            self.gamma
        } else {
            2 * self.gamma
        }
    }

    /// The integer `4 * gamma`.
    pub fn four_gamma(&self) -> i64 {
        2 * self.two_gamma()
    }

    /// Even modulus with half-integer coefficients: `S_c^{B,C}(A) = S_{c/2}^{2B,C}(2A)`.
    fn halved(&self) -> Self {
        TwistedSumParams { c: self.c / 2, half: false, ..*self }
    }
}

fn kloosterman_residues(p: &TwistedSumParams) -> Vec<u64> {
    (0..p.c as i64)
        .map(|a| (p.q(a).unsigned_abs() % p.c as u128) as u64)
        .collect()
}

/// The matrix `S(|q(a)|,|q(b)|;c) e_c(2 g a b + B a + B b)` with `u = v = 0`.
fn twisted_matrix(p: &TwistedSumParams) -> Result<Vec<Complex64>> {
    let c = p.c;
    let r = p.reduced()?;
    let table = KloostermanTable::for_modulus(c)?;
    let res = kloosterman_residues(p);
    let two_g = mul_mod(2, r.gamma, c);
    let roots = roots(c);
    let n = c as usize;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..c {
        for b in 0..c {
            let phase = (mul_mod(two_g, mul_mod(a, b, c), c) + mul_mod(r.b, (a + b) % c, c)) % c;
            m[a as usize * n + b as usize] = roots.at(phase) * table.get(res[a as usize], res[b as usize]);
        }
    }
    Ok(m)
}

/// Definitional evaluation of `S_c^{B,C}(gamma)` at one `(u, v)`.
pub fn twisted_sum_direct(p: &TwistedSumParams) -> Result<Complex64> {
    if p.half && p.c % 2 == 0 {
        return twisted_sum_direct(&p.halved());
    }
    let c = p.c;
    let r = p.reduced()?;
    let m = twisted_matrix(p)?;
    let roots = roots(c);
    let n = c as usize;
    Ok(pairwise_sum_by(n * n, |i| {
        let (a, b) = ((i / n) as u64, (i % n) as u64);
        m[i] * roots.at((mul_mod(a, r.u, c) + mul_mod(b, r.v, c)) % c)
    }))
}

/// `S_c^{B,C}(gamma)` for every `(u, v) mod c`, indexed `u * c + v`.
///
/// The dependence on `(u, v)` is a two-dimensional DFT of the `u = v = 0` matrix.
pub fn twisted_sum_grid(p: &TwistedSumParams) -> Result<Vec<Complex64>> {
    if p.half && p.c % 2 == 0 {
        return twisted_sum_grid(&p.halved());
    }
    let n = p.c as usize;
    let mut m = twisted_matrix(p)?;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    for row in m.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = m[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            m[i * n + j] = col[i];
        }
    }
    Ok(m)
}

/// Gauss-sum closed form, valid when `gcd(4 gamma, c) = 1`:
///
/// ```text
/// S = eps_c sqrt(c) (gamma/c) sum'_x (x/c) e_c((C - (4g)^{-1}(B+u)^2) xbar
///       + (C - (4g)^{-1} B^2) x - (2g)^{-1} B (B+u)) * c [c | v - xbar u]
/// ```
///
/// The `C (x + xbar)` terms come from completing the square in `a`.
pub fn twisted_sum_gauss(p: &TwistedSumParams) -> Result<Complex64> {
    let c = p.c;
    if c % 2 == 0 || gcd(p.four_gamma(), c as i64) != 1 {
        return Err(Error::GaussPrecondition { gamma: p.gamma, c });
    }
    let r = p.reduced()?;
    let inv4g = mod_inverse(mul_mod(4, r.gamma, c) as i64, c)?.value();
    let inv2g = mod_inverse(mul_mod(2, r.gamma, c) as i64, c)?.value();
    let bu = (r.b + r.u) % c;
    let coef_xbar = (r.c_const + c - mul_mod(inv4g, mul_mod(bu, bu, c), c)) % c;
    let coef_x = (r.c_const + c - mul_mod(inv4g, mul_mod(r.b, r.b, c), c)) % c;
    let constant = (c - mul_mod(inv2g, mul_mod(r.b, bu, c), c)) % c;
    let kernel = KloostermanKernel::new(c)?;
    let roots = roots(c);
    let units = kernel.units();
    let inner = pairwise_sum_by(units.len(), |i| {
        let (x, xb) = units[i];
        // the b-sum is c when c | v - xbar u and 0 otherwise
        if (r.v + c - mul_mod(xb, r.u, c)) % c != 0 {
            return Complex64::new(0.0, 0.0);
        }
        let chi = jacobi_symbol(x as i64, c).expect("odd modulus") as f64;
        let phase = (mul_mod(coef_xbar, xb, c) + mul_mod(coef_x, x, c) + constant) % c;
        roots.at(phase) * chi
    });
    let chi_g = jacobi_symbol(r.gamma as i64, c)? as f64;
    Ok(epsilon(c)? * (c as f64).sqrt() * chi_g * inner * c as f64)
}

/// `|S_{c1 c2}^{B,C}(g) - S_{c1}^{B,C d2}(g c2) S_{c2}^{B,C d1}(g c1)|`.
pub fn twisted_multiplicativity_residual(p: &TwistedSumParams, c1: u64, c2: u64) -> Result<f64> {
    if c1 * c2 != p.c {
        return Err(Error::Config(format!("{c1} * {c2} != {}", p.c)));
    }
    let (d1, d2) = crt_cofactors(c1, c2)?;
    let lhs = twisted_sum_direct(p)?;
    let f1 = TwistedSumParams {
        gamma: p.gamma * c2 as i64,
        c_const: p.c_const * d2 as i64,
        c: c1,
        ..*p
    };
    let f2 = TwistedSumParams {
        gamma: p.gamma * c1 as i64,
        c_const: p.c_const * d1 as i64,
        c: c2,
        ..*p
    };
    let rhs = twisted_sum_direct(&f1)? * twisted_sum_direct(&f2)?;
    Ok((lhs - rhs).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Vanishing {
    VanishesProven,
    VanishesNumeric,
    Nonzero,
}

impl Vanishing {
    pub fn as_str(&self) -> &'static str {
        match self {
            Vanishing::VanishesProven => "vanishes_proven",
            Vanishing::VanishesNumeric => "vanishes_numeric",
            Vanishing::Nonzero => "nonzero",
        }
    }
}

/// Whether the vanishing criterion applies: `gcd(4 gamma, c) = 1` and `(v, c)` does not divide `u`.
pub fn vanishing_criterion(p: &TwistedSumParams) -> bool {
    let c = p.c as i64;
    let g = gcd(p.v, c) as i64;
    gcd(p.four_gamma(), c) == 1 && p.u.rem_euclid(g) != 0
}

pub fn classify_vanishing(p: &TwistedSumParams, value: Complex64) -> Vanishing {
    let small = value.norm() < TWISTED_TOL * (p.c * p.c) as f64;
    if vanishing_criterion(p) {
        Vanishing::VanishesProven
    } else if small {
        Vanishing::VanishesNumeric
    } else {
        Vanishing::Nonzero
    }
}

/// Classifies `S`; a proven vanishing that fails numerically is reported as an error.
pub fn vanishing_witness(p: &TwistedSumParams) -> Result<Vanishing> {
    let s = twisted_sum_direct(p)?;
    let class = classify_vanishing(p, s);
    if class == Vanishing::VanishesProven && s.norm() >= TWISTED_TOL * (p.c * p.c) as f64 {
        return Err(Error::Config(format!(
            "vanishing criterion holds but |S| = {} for {:?}",
            s.norm(),
            p
        )));
    }
    Ok(class)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub observed: f64,
    pub reference: f64,
    pub ratio: f64,
    pub c1: u64,
    pub c2: u64,
    /// `(v, c1)` fails to divide `u`: the sum must vanish.
    pub vanishing_branch: bool,
    pub params: TwistedSumParams,
}

/// `(v, c1) c1^{3/2} c2^{5/2 + eps}` with `c = c1 c2`, `(4 gamma, c1) = 1`, `c2 | (4 gamma)^oo`.
pub fn bound_reference(p: &TwistedSumParams) -> (f64, u64, u64) {
    let (c1, c2) = split_by_radical(p.c, p.four_gamma().unsigned_abs());
    let g = gcd(p.v, c1 as i64) as f64;
    let r = g * (c1 as f64).powf(1.5) * (c2 as f64).powf(2.5 + ENVELOPE_EPS);
    (r, c1, c2)
}

pub fn bound_report_from_value(p: &TwistedSumParams, value: Complex64) -> BoundReport {
    let (reference, c1, c2) = bound_reference(p);
    let g = gcd(p.v, c1 as i64) as i64;
    let observed = value.norm();
    BoundReport {
        observed,
        reference,
        ratio: observed / reference,
        c1,
        c2,
        vanishing_branch: p.u.rem_euclid(g) != 0,
        params: *p,
    }
}

pub fn bound_report(p: &TwistedSumParams) -> Result<BoundReport> {
    Ok(bound_report_from_value(p, twisted_sum_direct(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_examples() {
        assert!((kloosterman_sum(5, 7, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((kloosterman_sum(1, 1, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((kloosterman_sum(1, 1, 3).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(kloosterman_sum(1, 1, 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn batch_inverse_matches_euclid() {
        for c in [2u64, 9, 60, 97, 360] {
            for &(x, xb) in KloostermanKernel::new(c).unwrap().units() {
                assert_eq!(xb, mod_inverse(x as i64, c).unwrap().value());
            }
        }
    }

    #[test]
    fn weil_examples() {
        assert!((weil_envelope(1, 1, 3) - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!((weil_envelope(0, 0, 12) - 12.0 * 6.0).abs() < 1e-9);
        assert_eq!(weil_envelope(1, 1, 1), 1.0);
    }

    #[test]
    fn table_matches_direct() {
        for c in [1u64, 2, 7, 12, 30, 49] {
            let t = KloostermanTable::for_modulus(c).unwrap();
            for m in 0..c {
                for n in 0..c {
                    let d = kloosterman_sum(m as i64, n as i64, c).unwrap();
                    assert!((t.get(m, n) - d).abs() < 1e-10, "c={c} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn classical_multiplicativity() {
        for c1 in 1..=20u64 {
            for c2 in 1..=20u64 {
                if num_integer::gcd(c1, c2) != 1 {
                    continue;
                }
                let (d1, d2) = crt_cofactors(c1, c2).unwrap();
                for (m, n) in [(1i64, 1i64), (2, 5), (0, 3), (7, 7)] {
                    let lhs = kloosterman_sum(m, n, c1 * c2).unwrap();
                    let rhs = kloosterman_sum(d2 as i64 * m, d2 as i64 * n, c1).unwrap()
                        * kloosterman_sum(d1 as i64 * m, d1 as i64 * n, c2).unwrap();
                    assert!((lhs - rhs).abs() < 1e-9, "c1={c1} c2={c2}");
                }
            }
        }
    }

    #[test]
    fn twisted_small_examples() {
        let one = twisted_sum_direct(&TwistedSumParams::new(1, 0, 0, 0, 0, 1).unwrap()).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let zero = twisted_sum_direct(&TwistedSumParams::new(1, 0, 1, 0, 0, 2).unwrap()).unwrap();
        assert!(zero.norm() < 1e-12);
    }

    #[test]
    fn grid_matches_pointwise() {
        let p = TwistedSumParams::new(2, 1, 3, 0, 0, 9).unwrap();
        let grid = twisted_sum_grid(&p).unwrap();
        for u in 0..9 {
            for v in 0..9 {
                let d = twisted_sum_direct(&p.with_uv(u, v)).unwrap();
                assert!((grid[(u * 9 + v) as usize] - d).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn gauss_examples() {
        for (g, b, cc, u, v, c) in [(1, 0, 1, 0, 0, 3), (2, 1, 0, 1, 1, 5), (1, 1, 1, 1, 2, 5)] {
            let p = TwistedSumParams::new(g, b, cc, u, v, c).unwrap();
            let d = twisted_sum_direct(&p).unwrap();
            let s = twisted_sum_gauss(&p).unwrap();
            assert!((d - s).norm() < TWISTED_TOL * (c * c) as f64, "{p:?}: {d} vs {s}");
        }
        let bad = TwistedSumParams::new(3, 0, 1, 0, 0, 9).unwrap();
        assert!(matches!(twisted_sum_gauss(&bad), Err(Error::GaussPrecondition { .. })));
        let even = TwistedSumParams::new(1, 0, 1, 0, 0, 4).unwrap();
        assert!(twisted_sum_gauss(&even).is_err());
    }

    #[test]
    fn multiplicativity_examples() {
        let p = TwistedSumParams::new(1, 0, 1, 0, 0, 15).unwrap();
        assert!(twisted_multiplicativity_residual(&p, 3, 5).unwrap() < 1e-6);
        let q = TwistedSumParams::new(3, 2, 5, 1, 4, 7).unwrap();
        assert_eq!(twisted_multiplicativity_residual(&q, 1, 7).unwrap(), 0.0);
        let r = TwistedSumParams::new(1, 0, 1, 0, 0, 12).unwrap();
        assert!(matches!(
            twisted_multiplicativity_residual(&r, 2, 6),
            Err(Error::NotCoprime { .. }) | Err(Error::Config(_))
        ));
    }

    #[test]
    fn vanishing_examples() {
        let p = TwistedSumParams::new(1, 0, 0, 1, 0, 3).unwrap();
        assert_eq!(vanishing_witness(&p).unwrap(), Vanishing::VanishesProven);
        assert!(twisted_sum_direct(&p).unwrap().norm() < 1e-6 * 9.0);
        for c in 1..20u64 {
            let p = TwistedSumParams::new(1, 1, 1, 0, 0, c).unwrap();
            assert!(!vanishing_criterion(&p));
        }
        let p = TwistedSumParams::new(3, 1, 1, 1, 2, 6).unwrap();
        assert!(!vanishing_criterion(&p));
        assert_ne!(vanishing_witness(&p).unwrap(), Vanishing::VanishesProven);
    }

    #[test]
    fn half_integer_paths() {
        // q(x) = x^2/2 + x/2 + 1 with odd c: inverse of 2 mod c
        let p = TwistedSumParams::half_integer(1, 1, 1, 2, 3, 7).unwrap();
        let d = twisted_sum_direct(&p).unwrap();
        let g = twisted_sum_gauss(&p).unwrap();
        assert!((d - g).norm() < 1e-6 * 49.0);
        // even c halves the modulus against the doubled coefficients
        let e = TwistedSumParams::half_integer(1, 1, 1, 2, 3, 10).unwrap();
        let reduced = TwistedSumParams::new(1, 1, 1, 2, 3, 5).unwrap();
        let lhs = twisted_sum_direct(&e).unwrap();
        let rhs = twisted_sum_direct(&reduced).unwrap();
        assert!((lhs - rhs).norm() < 1e-9);
        assert!(TwistedSumParams::half_integer(2, 1, 1, 0, 0, 5).is_err());
    }

    #[test]
    fn bound_examples() {
        let p = TwistedSumParams::new(1, 0, 0, 0, 0, 1).unwrap();
        let r = bound_report(&p).unwrap();
        assert!((r.observed - 1.0).abs() < 1e-12 && r.reference >= 1.0);
        let (_, c1, c2) = bound_reference(&TwistedSumParams::new(3, 0, 0, 0, 0, 60).unwrap());
        assert_eq!((c1, c2), (5, 12));
    }
}
