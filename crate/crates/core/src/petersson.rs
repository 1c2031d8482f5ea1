//! Numerical check of the Petersson trace formula for one-dimensional spaces.
//!
//! With a single normalized eigenform `f` of weight `k` and level `N`,
//!
//! ```text
//! omega * lambda(m) lambda(n) = delta(m, n)
//!     + 2 pi (-1)^{k/2} sum_{N | c} S(m, n; c) / c * J_{k-1}(4 pi sqrt(mn) / c).
//! ```
//!
//! `omega` is calibrated at `m = n = 1`. The tail over `c > c_max` is bounded with
//! `|S(m, n; c)| <= c` and [`bessel_tail_bound`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::bessel::{bessel_j, bessel_tail_bound};
use crate::eigenform::{EigenformData, SUPPORTED_WEIGHTS};
use crate::error::{Error, Result};
use crate::kloosterman::{KloostermanKernel, KloostermanTable};
use crate::sum::{ordered_map, ordered_sum};

/// Target for the truncation rule.
pub const TRUNCATION_TOL: f64 = 1e-10;
/// Largest tail bound accepted as a certificate.
pub const CERTIFICATE_TOL: f64 = 1e-9;

const TABLE_LIMIT: u64 = 256;

/// A truncation point together with its certified tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    pub c_max: u64,
    pub tail_bound: f64,
}

/// Bound on `|2 pi sum_{c > c_max} S(m, n; c)/c J_{k-1}(4 pi sqrt(mn)/c)|`.
pub fn tail_bound(m: u64, n: u64, weight: u32, c_max: u64) -> Result<f64> {
    if weight < 4 {
        return Err(Error::UnsupportedWeight(weight));
    }
    if c_max == 0 {
        return Err(Error::ZeroModulus);
    }
    let a = 2.0 * PI * ((m * n) as f64).sqrt();
    Ok(2.0 * PI * bessel_tail_bound(a, weight - 1, c_max as f64))
}

/// `c_max = max(ceil(8 pi sqrt(mn)), c0)` with `c0` the least modulus whose tail bound
/// is below [`TRUNCATION_TOL`].
pub fn truncation(m: u64, n: u64, weight: u32) -> Result<Truncation> {
    let below = |c: u64| tail_bound(m, n, weight, c).map(|b| b < TRUNCATION_TOL);
    let mut hi = 1u64;
    while !below(hi)? {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // invariant: below(hi) holds, below(lo) fails unless lo = 0
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let floor = (8.0 * PI * ((m * n) as f64).sqrt()).ceil() as u64;
    let c_max = hi.max(floor);
    Ok(Truncation { c_max, tail_bound: tail_bound(m, n, weight, c_max)? })
}

fn kloosterman(m: u64, n: u64, c: u64) -> Result<f64> {
    if c <= TABLE_LIMIT {
        Ok(KloostermanTable::for_modulus(c)?.get(m % c, n % c))
    } else {
        KloostermanKernel::new(c)?.sum(m as i64, n as i64)
    }
}

/// `delta(m, n) + 2 pi (-1)^{k/2} sum_{c <= c_max, level | c} S(m, n; c)/c J_{k-1}(4 pi sqrt(mn)/c)`.
pub fn kloosterman_side(m: u64, n: u64, weight: u32, level: u64, c_max: u64) -> Result<f64> {
    if level == 0 {
        return Err(Error::ZeroModulus);
    }
    let x = 4.0 * PI * ((m * n) as f64).sqrt();
    let count = (c_max / level) as usize;
    let terms = ordered_map(count, |j| {
        let c = (j as u64 + 1) * level;
        kloosterman(m, n, c).map(|s| s / c as f64 * bessel_j(weight - 1, x / c as f64))
    });
    let terms: Vec<f64> = terms.into_iter().collect::<Result<_>>()?;
    let sum = ordered_sum(terms.len(), |i| terms[i]);
    let sign = if (weight / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok(delta + sign * 2.0 * PI * sum)
}

fn resolve(m: u64, n: u64, weight: u32, c_max: Option<u64>) -> Result<Truncation> {
    let t = match c_max {
        Some(c) => Truncation { c_max: c, tail_bound: tail_bound(m, n, weight, c)? },
        None => truncation(m, n, weight)?,
    };
    if !(t.tail_bound < CERTIFICATE_TOL) {
        return Err(Error::UncertifiableTail { bound: t.tail_bound, tolerance: CERTIFICATE_TOL });
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub weight: u32,
    pub omega: f64,
    pub c_max: u64,
    pub tail_bound: f64,
    /// `2 pi^2 / (k omega)`, a derived diagnostic.
    pub implied_l_value: f64,
}

/// Sets `omega` from the `(1, 1)` instance of the formula.
///
/// Level-one data must have a supported weight; for other levels the caller
/// vouches that the space is one dimensional.
pub fn calibrate_harmonic_weight(f: &mut EigenformData, c_max: Option<u64>) -> Result<Calibration> {
    if f.level == 1 && !SUPPORTED_WEIGHTS.contains(&f.weight) {
        return Err(Error::UnsupportedWeight(f.weight));
    }
    let t = resolve(1, 1, f.weight, c_max)?;
    let omega = kloosterman_side(1, 1, f.weight, f.level, t.c_max)?;
    if !(omega > 0.0) {
        return Err(Error::Quadrature(format!("calibrated harmonic weight {omega} is not positive")));
    }
    f.set_omega(omega);
    Ok(Calibration {
        weight: f.weight,
        omega,
        c_max: t.c_max,
        tail_bound: t.tail_bound,
        implied_l_value: 2.0 * PI * PI / (f.weight as f64 * omega),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeterssonReport {
    pub weight: u32,
    pub m: u64,
    pub n: u64,
    pub c_max: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tail_bound: f64,
}

pub fn petersson_residual(f: &EigenformData, m: u64, n: u64, c_max: Option<u64>) -> Result<PeterssonReport> {
    if m == 0 || n == 0 {
        return Err(Error::Config("trace formula indices must be positive".into()));
    }
    let omega = f.omega()?;
    // both sides are symmetric; evaluate in a canonical order so (m, n) and (n, m) agree bitwise
    let (lo, hi) = (m.min(n), m.max(n));
    let t = resolve(lo, hi, f.weight, c_max)?;
    let lhs = omega * f.lambda(lo)? * f.lambda(hi)?;
    let rhs = kloosterman_side(lo, hi, f.weight, f.level, t.c_max)?;
    Ok(PeterssonReport {
        weight: f.weight,
        m,
        n,
        c_max: t.c_max,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        tail_bound: t.tail_bound,
    })
}

/// Reports for all `(m, n)` in `{1..m_max}^2`, row-major.
pub fn petersson_grid(f: &EigenformData, m_max: u64) -> Result<Vec<PeterssonReport>> {
    let mut out = Vec::with_capacity((m_max * m_max) as usize);
    for m in 1..=m_max {
        for n in 1..=m_max {
            out.push(petersson_residual(f, m, n, None)?);
        }
    }
    Ok(out)
}
