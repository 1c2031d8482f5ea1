//! Normalized Hecke eigenforms: internal level-one data and external tables.

use std::fmt::Write as _;
use std::io::BufRead;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factorize, gcd, is_prime};
use crate::error::{Error, Result};
use crate::qexp::{qexp_delta, QExpansion};

/// Weights whose level-one cusp space is one dimensional.
pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Slack on the Deligne gate for floating-point eigenvalues.
const DELIGNE_SLACK: f64 = 1e-12;

/// `dim S_k(SL_2(Z))` for even `k >= 0`.
pub fn level_one_cusp_dimension(k: u32) -> u32 {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    if k % 12 == 2 {
        k / 12 - 1
    } else {
        k / 12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenformData {
    pub level: u64,
    pub weight: u32,
    coeffs: Vec<BigInt>,
    lambda: Vec<f64>,
    omega: Option<f64>,
}

fn normalized(a: &BigInt, n: u64, weight: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    a.to_f64().unwrap_or(f64::NAN) / (n as f64).powf((weight as f64 - 1.0) / 2.0)
}

impl EigenformData {
    /// Builds and validates data from coefficients `a(0..=n_max)`; `a(0)` is ignored.
    pub fn from_coefficients(level: u64, weight: u32, mut coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InsufficientTruncation { needed: 1, available: 0 });
        }
        coeffs[0] = BigInt::zero();
        let lambda = coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| normalized(a, n as u64, weight))
            .collect();
        let f = EigenformData { level, weight, coeffs, lambda, omega: None };
        f.validate()?;
        Ok(f)
    }

    pub fn n_max(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn a(&self, n: u64) -> Result<&BigInt> {
        self.coeffs
            .get(n as usize)
            .ok_or(Error::InsufficientTruncation { needed: n, available: self.n_max() })
    }

    pub fn lambda(&self, n: u64) -> Result<f64> {
        self.lambda
            .get(n as usize)
            .copied()
            .ok_or(Error::InsufficientTruncation { needed: n, available: self.n_max() })
    }

    pub fn omega(&self) -> Result<f64> {
        self.omega.ok_or(Error::Uncalibrated)
    }

    pub fn set_omega(&mut self, omega: f64) {
        self.omega = Some(omega);
    }

    /// Normalization, Deligne bound at primes not dividing the level, exact Hecke relations.
    pub fn validate(&self) -> Result<()> {
        if !self.coeffs[1].is_one() {
            return Err(Error::DataRejected { n: 1, reason: format!("a(1) = {} (must be 1)", self.coeffs[1]) });
        }
        for p in 2..=self.n_max() {
            if self.level % p != 0 && is_prime(p) {
                let l = self.lambda[p as usize];
                if !(l.abs() <= 2.0 + DELIGNE_SLACK) {
                    return Err(Error::DataRejected { n: p, reason: format!("|lambda(p)| = {} exceeds 2", l.abs()) });
                }
            }
        }
        let n_max = self.n_max();
        for m in 2..=n_max {
            if m * m > n_max {
                break;
            }
            for n in m..=n_max / m {
                if gcd((m * n) as i64, self.level as i64) != 1 {
                    continue;
                }
                let r = hecke_relation_residual(self, m, n)?;
                if !r.is_zero() {
                    return Err(Error::DataRejected {
                        n: m * n,
                        reason: format!("Hecke relation at (m, n) = ({m}, {n}) off by {r}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// CSV export: `level,weight,n_max`, the values, `n,a_n`, then one row per `n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "level,weight,n_max");
        let _ = writeln!(out, "{},{},{}", self.level, self.weight, self.n_max());
        let _ = writeln!(out, "n,a_n");
        for n in 1..=self.n_max() {
            let _ = writeln!(out, "{},{}", n, self.coeffs[n as usize]);
        }
        out
    }
}

/// Level-one normalized eigenform `E_{k-12} Delta` for `k` in [`SUPPORTED_WEIGHTS`].
pub fn eigenform(weight: u32, n_max: usize) -> Result<EigenformData> {
    if !SUPPORTED_WEIGHTS.contains(&weight) {
        return Err(Error::UnsupportedWeight(weight));
    }
    let delta = qexp_delta(n_max)?;
    let series = if weight == 12 {
        delta
    } else {
        QExpansion::eisenstein(weight - 12, n_max + 1)?.mul(&delta)?
    };
    EigenformData::from_coefficients(1, weight, series.into_coeffs())
}

/// `|a(m) a(n) - sum_{d | (m,n)} d^{k-1} a(mn/d^2)|` in exact integers.
pub fn hecke_relation_residual(f: &EigenformData, m: u64, n: u64) -> Result<BigInt> {
    if m == 0 || n == 0 {
        return Err(Error::Config("Hecke indices must be positive".into()));
    }
    let needed = m.checked_mul(n).ok_or(Error::InsufficientTruncation { needed: u64::MAX, available: f.n_max() })?;
    if needed > f.n_max() {
        return Err(Error::InsufficientTruncation { needed, available: f.n_max() });
    }
    let g = m.gcd(&n);
    let mut rhs = BigInt::zero();
    for d in factorize(g).divisors() {
        rhs += BigInt::from(d).pow(f.weight - 1) * f.a(needed / (d * d))?;
    }
    Ok((f.a(m)? * f.a(n)? - rhs).abs())
}

fn parse_u64(field: &str, line: usize, what: &str) -> Result<u64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Malformed { line, reason: format!("{what} `{}` is not a nonnegative integer", field.trim()) })
}

/// Reads the eigenvalue CSV format written by [`EigenformData::to_csv`] and validates it.
pub fn load_eigenvalues<R: BufRead>(reader: R) -> Result<EigenformData> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|s| (i + 1, s)).map_err(|e| Error::Malformed { line: i + 1, reason: e.to_string() }))
        .filter(|r| r.as_ref().map(|(_, s)| !s.trim().is_empty()).unwrap_or(true));
    let (ln, header) = lines.next().ok_or(Error::Malformed { line: 1, reason: "empty input".into() })??;
    if header.trim().replace(' ', "") != "level,weight,n_max" {
        return Err(Error::Malformed { line: ln, reason: "expected header `level,weight,n_max`".into() });
    }
    let (ln, meta) = lines.next().ok_or(Error::Malformed { line: 2, reason: "missing metadata row".into() })??;
    let fields: Vec<&str> = meta.split(',').collect();
    if fields.len() != 3 {
        return Err(Error::Malformed { line: ln, reason: "metadata row needs three fields".into() });
    }
    let level = parse_u64(fields[0], ln, "level")?;
    let weight = parse_u64(fields[1], ln, "weight")? as u32;
    let n_max = parse_u64(fields[2], ln, "n_max")?;
    if level == 0 || weight < 12 || weight % 2 == 1 || n_max == 0 {
        return Err(Error::Malformed { line: ln, reason: "level and n_max must be positive, weight even and at least 12".into() });
    }
    let mut coeffs = vec![BigInt::zero()];
    let mut last = 0u64;
    for item in lines {
        let (ln, row) = item?;
        let row = row.trim();
        if row.replace(' ', "") == "n,a_n" && last == 0 {
            continue;
        }
        let (a, b) = row
            .split_once(',')
            .ok_or(Error::Malformed { line: ln, reason: "expected `n,a_n`".into() })?;
        let n = parse_u64(a, ln, "n")?;
        if n != last + 1 {
            return Err(Error::Malformed { line: ln, reason: format!("n = {n} does not follow {last}") });
        }
        let value: BigInt = b
            .trim()
            .parse()
            .map_err(|_| Error::Malformed { line: ln, reason: format!("a_n `{}` is not an integer", b.trim()) })?;
        coeffs.push(value);
        last = n;
    }
    if last != n_max {
        return Err(Error::Malformed { line: 0, reason: format!("declared n_max = {n_max} but found {last} rows") });
    }
    EigenformData::from_coefficients(level, weight, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let dims: Vec<u32> = (0..=30).step_by(2).map(level_one_cusp_dimension).collect();
        assert_eq!(dims, vec![0, 0, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1, 2, 1, 2, 2]);
        for k in SUPPORTED_WEIGHTS {
            assert_eq!(level_one_cusp_dimension(k), 1);
        }
    }

    #[test]
    fn weight_twelve_is_delta() {
        let f = eigenform(12, 50).unwrap();
        assert_eq!(f.a(2).unwrap(), &BigInt::from(-24));
        assert_eq!(f.a(4).unwrap(), &BigInt::from(-1472));
        assert!(hecke_relation_residual(&f, 2, 2).unwrap().is_zero());
        assert!(matches!(hecke_relation_residual(&f, 8, 8), Err(Error::InsufficientTruncation { .. })));
        assert!(eigenform(14, 10).is_err());
    }

    #[test]
    fn weight_sixteen_matches_series_product() {
        let f = eigenform(16, 40).unwrap();
        let e4 = QExpansion::eisenstein(4, 41).unwrap();
        let d = qexp_delta(40).unwrap();
        assert_eq!(f.coefficients(), e4.mul_naive(&d).unwrap().coeffs());
        // a(2) = tau(2) + 240
        assert_eq!(f.a(2).unwrap(), &BigInt::from(216));
    }

    #[test]
    fn csv_round_trip_and_gates() {
        let f = eigenform(12, 30).unwrap();
        let text = f.to_csv();
        let g = load_eigenvalues(text.as_bytes()).unwrap();
        assert_eq!(f, g);

        let bad_norm = text.replacen("\n1,1\n", "\n1,2\n", 1);
        assert!(matches!(load_eigenvalues(bad_norm.as_bytes()), Err(Error::DataRejected { n: 1, .. })));

        let bad_a4 = text.replacen("\n4,-1472\n", "\n4,-1471\n", 1);
        match load_eigenvalues(bad_a4.as_bytes()) {
            Err(Error::DataRejected { n, reason }) => {
                assert_eq!(n, 4);
                assert!(reason.contains("(2, 2)"));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(matches!(load_eigenvalues("level,weight\n".as_bytes()), Err(Error::Malformed { .. })));
        let gap = text.replacen("\n3,252\n", "\n", 1);
        assert!(matches!(load_eigenvalues(gap.as_bytes()), Err(Error::Malformed { .. })));
    }
}
