//! The smoothed family variance of `sum_r lambda_f(|q(r)|) psi(r/X)`, computed
//! directly from eigenvalues and, independently, as diagonal plus off-diagonal
//! terms after the trace formula.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_integer::Roots;
use serde::Serialize;

use crate::bessel::bessel_j_range;
use crate::config::ExperimentConfig;
use crate::eigenform::{eigenform, level_one_cusp_dimension, EigenformData};
use crate::error::{Error, Result};
use crate::kloosterman::KloostermanKernel;
use crate::petersson::{calibrate_harmonic_weight, tail_bound, truncation};
use crate::sum::{ordered_map, pairwise_sum, pairwise_sum_by};
use crate::window::{cutoff, SmoothWindow};

/// Outer radius of the family window: 1 on `[-1, 1]`, support `[-1.1, 1.1]`.
pub const FAMILY_OUTER: f64 = 1.1;

/// `q(x) = A x^2 + B x + C` with `A, B, C` in `Z/2`, stored as `2A, 2B, 2C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadraticPoly {
    pub a2: i64,
    pub b2: i64,
    pub c2: i64,
}

impl QuadraticPoly {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::from_doubled(2 * a, 2 * b, 2 * c)
    }

    /// Rejects non-quadratics and polynomials that are not integer valued.
    pub fn from_doubled(a2: i64, b2: i64, c2: i64) -> Result<Self> {
        if a2 == 0 {
            return Err(Error::Config("leading coefficient A must be nonzero".into()));
        }
        let q = QuadraticPoly { a2, b2, c2 };
        if (0..3).any(|r| q.doubled(r) % 2 != 0) {
            return Err(Error::NotIntegerValued { a2, b2 });
        }
        Ok(q)
    }

    /// Parses `A, B, C` where each entry is an integer or a fraction `n/2`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("q: expected `A, B, C`, got `{s}`")));
        }
        let doubled = |p: &str| -> Result<i64> {
            let bad = || Error::Config(format!("q: `{p}` is not an integer or half-integer"));
            match p.split_once('/') {
                Some((n, d)) => {
                    let n: i64 = n.trim().parse().map_err(|_| bad())?;
                    match d.trim() {
                        "1" => Ok(2 * n),
                        "2" => Ok(n),
                        _ => Err(bad()),
                    }
                }
                None => p.parse::<i64>().map(|n| 2 * n).map_err(|_| bad()),
            }
        };
        Self::from_doubled(doubled(parts[0])?, doubled(parts[1])?, doubled(parts[2])?)
    }

    /// `2 q(r)`.
    pub fn doubled(&self, r: i64) -> i128 {
        let r = r as i128;
        self.a2 as i128 * r * r + self.b2 as i128 * r + self.c2 as i128
    }

    pub fn eval(&self, r: i64) -> i128 {
        self.doubled(r) / 2
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.a2 as f64 / 2.0, self.b2 as f64 / 2.0, self.c2 as f64 / 2.0)
    }

    /// `4 D = (2B)^2 - 4 (2A)(2C)`.
    pub fn discriminant_times_four(&self) -> i128 {
        let (a, b, c) = (self.a2 as i128, self.b2 as i128, self.c2 as i128);
        b * b - 4 * a * c
    }

    pub fn discriminant(&self) -> f64 {
        self.discriminant_times_four() as f64 / 4.0
    }

    /// `D` is not the square of a rational.
    pub fn is_irreducible(&self) -> bool {
        let d4 = self.discriminant_times_four();
        d4 < 0 || (d4 as u128).sqrt().pow(2) != d4 as u128
    }

    /// `R = 2 A r + B`.
    pub fn r_value(&self, r: i64) -> f64 {
        (self.a2 as f64) * r as f64 + self.b2 as f64 / 2.0
    }

    /// All integers `r` with `Q(r) = target`, where `Q = 2q`.
    fn solve_doubled(&self, target: i128) -> Vec<i64> {
        let (a, b) = (self.a2 as i128, self.b2 as i128);
        let disc = b * b - 4 * a * (self.c2 as i128 - target);
        if disc < 0 {
            return Vec::new();
        }
        let s = (disc as u128).sqrt() as i128;
        if s * s != disc {
            return Vec::new();
        }
        let mut out = Vec::new();
        for num in [-b + s, -b - s] {
            if num % (2 * a) == 0 {
                let r = (num / (2 * a)) as i64;
                if !out.contains(&r) {
                    out.push(r);
                }
            }
        }
        out
    }
}

impl fmt::Display for QuadraticPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |v: i64| if v % 2 == 0 { format!("{}", v / 2) } else { format!("{v}/2") };
        write!(f, "({}) x^2 + ({}) x + ({})", part(self.a2), part(self.b2), part(self.c2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyValidation {
    pub integer_valued: bool,
    pub irreducible: bool,
    pub discriminant: f64,
    pub a_in_range: bool,
    pub b_in_range: bool,
    pub c_in_range: bool,
    pub warnings: Vec<String>,
}

impl PolyValidation {
    pub fn passed(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Regime checks `|A| <= X^eps0`, `|B| <= X^{1/2}`, `|C| <= X^{1 - eps0}` (implied constant 1).
pub fn validate_poly(q: &QuadraticPoly, x: f64, cfg: &ExperimentConfig) -> PolyValidation {
    let (a, b, c) = q.coefficients();
    let integer_valued = (0..3).all(|r| q.doubled(r) % 2 == 0);
    let irreducible = q.is_irreducible();
    let a_in_range = a.abs() <= x.powf(cfg.eps0);
    let b_in_range = b.abs() <= x.sqrt();
    let c_in_range = c.abs() <= x.powf(1.0 - cfg.eps0);
    let mut warnings = Vec::new();
    if !integer_valued {
        warnings.push("q is not integer valued".to_string());
    }
    if !irreducible {
        warnings.push(format!("discriminant {} is a square: q is reducible", q.discriminant()));
    }
    if !a_in_range {
        warnings.push(format!("|A| = {} exceeds X^eps0 = {}", a.abs(), x.powf(cfg.eps0)));
    }
    if !b_in_range {
        warnings.push(format!("|B| = {} exceeds X^(1/2) = {}", b.abs(), x.sqrt()));
    }
    if !c_in_range {
        warnings.push(format!("|C| = {} exceeds X^(1-eps0) = {}", c.abs(), x.powf(1.0 - cfg.eps0)));
    }
    PolyValidation { integer_valued, irreducible, discriminant: q.discriminant(), a_in_range, b_in_range, c_in_range, warnings }
}

/// The inner window `psi`: plateau supported on `(1/l, l)`.
pub fn inner_window(l: f64) -> Result<SmoothWindow> {
    if !(l > 1.0) {
        return Err(Error::Config(format!("l = {l} must exceed 1")));
    }
    SmoothWindow::plateau_on(1.0 / l, l)
}

/// `(r, |q(r)|, psi(r/X))` for every `r >= 1` with `psi(r/X) != 0` and `q(r) != 0`.
///
/// Cusp forms have `a(0) = 0`, so roots of `q` contribute to neither route.
pub fn support_terms(q: &QuadraticPoly, psi: &SmoothWindow, x: f64) -> Vec<(i64, u64, f64)> {
    let (lo, hi) = psi.support();
    let first = ((lo * x).floor() as i64).max(1);
    let last = (hi * x).ceil() as i64;
    (first..=last)
        .filter_map(|r| {
            let w = psi.eval(r as f64 / x);
            let n = q.eval(r).unsigned_abs();
            (w != 0.0 && n != 0).then_some((r, n as u64, w))
        })
        .collect()
}

pub fn required_n_max(q: &QuadraticPoly, psi: &SmoothWindow, x: f64) -> u64 {
    support_terms(q, psi, x).iter().map(|t| t.1).max().unwrap_or(1).max(1)
}

/// `sum_r lambda_f(|q(r)|) psi(r/X)`.
pub fn poly_eigen_sum(f: &EigenformData, q: &QuadraticPoly, psi: &SmoothWindow, x: f64) -> Result<f64> {
    let terms = support_terms(q, psi, x);
    let need = terms.iter().map(|t| t.1).max().unwrap_or(0);
    if need > f.n_max() {
        return Err(Error::InsufficientTruncation { needed: need, available: f.n_max() });
    }
    let values: Vec<f64> = terms.iter().map(|&(_, n, w)| f.lambda(n).map(|l| l * w)).collect::<Result<_>>()?;
    Ok(pairwise_sum(&values))
}

/// Even weights `k` with their window values `u((k - K)/K^theta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyWindow {
    pub k_center: f64,
    pub theta: f64,
    pub sharp: bool,
    pub weights: Vec<(u32, f64)>,
}

impl FamilyWindow {
    fn build(k_center: f64, theta: f64, sharp: bool) -> Result<Self> {
        let width = k_center.powf(theta);
        let reach = if sharp { width } else { FAMILY_OUTER * width };
        let mut weights = Vec::new();
        let mut k = 2u32;
        while (k as f64) < k_center + reach {
            let t = (k as f64 - k_center) / width;
            if t.abs() < reach / width {
                let u = if sharp { 1.0 } else { cutoff(t, FAMILY_OUTER) };
                if u > 0.0 {
                    if k < 4 {
                        return Err(Error::Config(format!("family window reaches weight {k}; weights below 4 are excluded")));
                    }
                    weights.push((k, u));
                }
            }
            k += 2;
        }
        Ok(FamilyWindow { k_center, theta, sharp, weights })
    }

    /// Smoothed window: all even `k` weighted by `u((k - K)/K^theta)`.
    pub fn smoothed(k_center: f64, theta: f64) -> Result<Self> {
        Self::build(k_center, theta, false)
    }

    /// Sharp window: even `k` with `|k - K| < K^theta`, weight 1.
    pub fn sharp(k_center: f64, theta: f64) -> Result<Self> {
        Self::build(k_center, theta, true)
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum_by(self.weights.len(), |i| self.weights[i].1)
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.weights.last().map(|w| w.0)
    }
}

/// Calibrated eigenforms for the weights of a family window, keyed by weight.
#[derive(Debug, Clone)]
pub struct FamilyData {
    pub level: u64,
    pub forms: BTreeMap<u32, EigenformData>,
}

impl FamilyData {
    /// Internal level-one forms where the space is one dimensional, plus `imports`.
    ///
    /// Imports fix the level; at level one, weights with a zero space need no data.
    pub fn build(window: &FamilyWindow, n_max: u64, imports: Vec<EigenformData>) -> Result<Self> {
        let mut level = None;
        let mut forms = BTreeMap::new();
        for f in imports {
            if *level.get_or_insert(f.level) != f.level {
                return Err(Error::Config("imported eigenforms have different levels".into()));
            }
            forms.insert(f.weight, f);
        }
        let level = level.unwrap_or(1);
        let mut missing = Vec::new();
        for &(k, _) in &window.weights {
            if forms.contains_key(&k) {
                continue;
            }
            match (level, level_one_cusp_dimension(k)) {
                (1, 0) => {}
                (1, 1) => {
                    forms.insert(k, eigenform(k, n_max as usize)?);
                }
                _ => missing.push(k),
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingWeights(missing));
        }
        forms.retain(|k, _| window.weights.iter().any(|w| w.0 == *k));
        for f in forms.values_mut() {
            if f.omega().is_err() {
                calibrate_harmonic_weight(f, None)?;
            }
        }
        Ok(FamilyData { level, forms })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightContribution {
    pub k: u32,
    pub u: f64,
    pub has_form: bool,
    pub omega: Option<f64>,
    pub inner_sum: Option<f64>,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectVariance {
    pub value: f64,
    pub per_weight: Vec<WeightContribution>,
}

/// `(1/X) sum_k u_k sum_f omega_f |sum_r lambda_f(|q(r)|) psi(r/X)|^2`.
pub fn variance_direct(
    window: &FamilyWindow,
    data: &FamilyData,
    q: &QuadraticPoly,
    psi: &SmoothWindow,
    x: f64,
) -> Result<DirectVariance> {
    let mut per_weight = Vec::new();
    for &(k, u) in &window.weights {
        let entry = match data.forms.get(&k) {
            Some(f) => {
                let omega = f.omega()?;
                let s = poly_eigen_sum(f, q, psi, x)?;
                WeightContribution { k, u, has_form: true, omega: Some(omega), inner_sum: Some(s), contribution: u * omega * s * s / x }
            }
            None if data.level == 1 && level_one_cusp_dimension(k) == 0 => {
                WeightContribution { k, u, has_form: false, omega: None, inner_sum: None, contribution: 0.0 }
            }
            None => return Err(Error::MissingWeights(vec![k])),
        };
        per_weight.push(entry);
    }
    let value = pairwise_sum_by(per_weight.len(), |i| per_weight[i].contribution);
    Ok(DirectVariance { value, per_weight })
}

/// Pairs `(r1, r2)` of support points with `|q(r1)| = |q(r2)|`, by exact integer solving.
pub fn diagonal_pairs(q: &QuadraticPoly, psi: &SmoothWindow, x: f64) -> Vec<(i64, i64)> {
    let terms = support_terms(q, psi, x);
    let support: BTreeSet<i64> = terms.iter().map(|t| t.0).collect();
    let mut pairs = Vec::new();
    for &(r1, _, _) in &terms {
        let t = q.doubled(r1);
        let mut sols: BTreeSet<i64> = q.solve_doubled(t).into_iter().collect();
        sols.extend(q.solve_doubled(-t));
        pairs.extend(sols.into_iter().filter(|r2| support.contains(r2)).map(|r2| (r1, r2)));
    }
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalTerm {
    pub value: f64,
    pub pairs: usize,
    pub off_equal_pairs: usize,
}

/// `(1/X) sum_{|q(r1)| = |q(r2)|} psi(r1/X) psi(r2/X) sum_k u_k`.
pub fn diagonal_term(q: &QuadraticPoly, psi: &SmoothWindow, x: f64, window: &FamilyWindow) -> DiagonalTerm {
    let pairs = diagonal_pairs(q, psi, x);
    let inner = pairwise_sum_by(pairs.len(), |i| psi.eval(pairs[i].0 as f64 / x) * psi.eval(pairs[i].1 as f64 / x));
    DiagonalTerm {
        value: inner * window.total_weight() / x,
        pairs: pairs.len(),
        off_equal_pairs: pairs.iter().filter(|p| p.0 != p.1).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CRange {
    pub c_lo: u64,
    /// Inclusive; `None` means unbounded.
    pub c_hi: Option<u64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffDiagonalTerm {
    pub value: f64,
    pub tail_bound: f64,
    pub distinct_pairs: usize,
    pub c_max: u64,
    pub ranges: Vec<CRange>,
}

struct PairData {
    m: u64,
    n: u64,
    weight: f64,
    c_max: u64,
    arg: f64,
}

/// `W(x) = sum_k u_k 2 pi (-1)^{k/2} J_{k-1}(x)` from one recurrence sweep.
fn bessel_kernel(window: &FamilyWindow, x: f64) -> f64 {
    let kmax = window.max_weight().unwrap_or(2);
    let j = bessel_j_range(kmax - 1, x);
    pairwise_sum_by(window.weights.len(), |i| {
        let (k, u) = window.weights[i];
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        u * 2.0 * PI * sign * j[k as usize - 1]
    })
}

/// `(1/X) sum_{r1, r2} psi psi sum_k u_k 2 pi i^{-k} sum_{level | c} S(n1, n2; c)/c J_{k-1}(4 pi sqrt(n1 n2)/c)`
/// with `n_i = |q(r_i)|`.
///
/// Pairs are grouped by `{n1, n2}`. Each group is truncated where every weight's tail
/// is below the truncation target (or at `c_max` when forced); `ranges` splits the
/// value at the `thresholds`.
pub fn off_diagonal_term(
    q: &QuadraticPoly,
    psi: &SmoothWindow,
    x: f64,
    window: &FamilyWindow,
    level: u64,
    c_max: Option<u64>,
    tail_tol: f64,
    thresholds: &[u64],
) -> Result<OffDiagonalTerm> {
    if level == 0 {
        return Err(Error::ZeroModulus);
    }
    let terms = support_terms(q, psi, x);
    let mut grouped: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    for &(_, n1, w1) in &terms {
        for &(_, n2, w2) in &terms {
            *grouped.entry((n1.min(n2), n1.max(n2))).or_insert(0.0) += w1 * w2;
        }
    }
    let mut pairs = Vec::with_capacity(grouped.len());
    let mut tails = Vec::with_capacity(grouped.len());
    for (&(m, n), &weight) in &grouped {
        let c = match c_max {
            Some(c) => c,
            None => {
                let mut c = 1;
                for &(k, _) in &window.weights {
                    c = c.max(truncation(m, n, k)?.c_max);
                }
                c
            }
        };
        let mut tail = 0.0;
        for &(k, u) in &window.weights {
            tail += u * tail_bound(m, n, k, c)?;
        }
        tails.push(weight.abs() * tail / x);
        pairs.push(PairData { m, n, weight, c_max: c, arg: 4.0 * PI * ((m * n) as f64).sqrt() });
    }
    let tail_total = pairwise_sum(&tails);
    if !(tail_total <= tail_tol) {
        return Err(Error::UncertifiableTail { bound: tail_total, tolerance: tail_tol });
    }
    let top = pairs.iter().map(|p| p.c_max).max().unwrap_or(0);
    let count = (top / level) as usize;
    let per_c: Vec<f64> = ordered_map(count, |j| {
        let c = (j as u64 + 1) * level;
        let kernel = KloostermanKernel::new(c).expect("positive modulus");
        let mut acc = 0.0;
        for p in pairs.iter().filter(|p| p.c_max >= c) {
            let s = kernel.real_sum(p.m as i64, p.n as i64);
            acc += p.weight * s / c as f64 * bessel_kernel(window, p.arg / c as f64);
        }
        acc / x
    });
    let value = pairwise_sum(&per_c);
    let mut ranges = Vec::new();
    let mut lo = 1u64;
    let mut cuts: Vec<u64> = thresholds.to_vec();
    cuts.sort_unstable();
    for hi in cuts.into_iter().map(Some).chain(std::iter::once(None)) {
        let end = hi.unwrap_or(u64::MAX);
        if end < lo {
            continue;
        }
        let slice: Vec<f64> = per_c
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let c = (*j as u64 + 1) * level;
                c >= lo && c <= end
            })
            .map(|(_, v)| *v)
            .collect();
        ranges.push(CRange { c_lo: lo, c_hi: hi, value: pairwise_sum(&slice) });
        lo = end.saturating_add(1);
    }
    Ok(OffDiagonalTerm { value, tail_bound: tail_total, distinct_pairs: pairs.len(), c_max: top, ranges })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub x: f64,
    pub sum: f64,
    pub terms: usize,
    /// `sum_r |lambda(|q(r)|)| psi(r/X)`.
    pub trivial_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellationProfile {
    pub weight: u32,
    pub rows: Vec<ProfileRow>,
    /// Least-squares slope of `log |sum|` against `log X`; `None` with fewer than two usable rows.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Root-mean-square residual of the fit.
    pub scatter: Option<f64>,
}

/// Ordinary least squares `y = a + b x`, returning `(b, a, rms residual)`.
fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    Some((b, a, (rss / n).sqrt()))
}

pub fn cancellation_profile(
    f: &EigenformData,
    q: &QuadraticPoly,
    psi: &SmoothWindow,
    x_grid: &[f64],
) -> Result<CancellationProfile> {
    let mut rows = Vec::new();
    for &x in x_grid {
        let terms = support_terms(q, psi, x);
        let sum = poly_eigen_sum(f, q, psi, x)?;
        let abs: Vec<f64> = terms.iter().map(|&(_, n, w)| f.lambda(n).map(|l| l.abs() * w)).collect::<Result<_>>()?;
        rows.push(ProfileRow { x, sum, terms: terms.len(), trivial_bound: pairwise_sum(&abs) });
    }
    let points: Vec<(f64, f64)> = rows.iter().filter(|r| r.sum != 0.0).map(|r| (r.x.ln(), r.sum.abs().ln())).collect();
    let fit = least_squares(&points);
    Ok(CancellationProfile {
        weight: f.weight,
        rows,
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        scatter: fit.map(|f| f.2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyProfileRow {
    pub x: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitThresholds {
    /// `X^{2 + eps0} K^{-1 - theta + eps1}`.
    pub main_mid: f64,
    /// `K^10`.
    pub mid_tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub poly: String,
    pub poly_validation: PolyValidation,
    pub level: u64,
    pub smoothed_window: FamilyWindow,
    pub sharp_window: FamilyWindow,
    pub direct: DirectVariance,
    pub direct_sharp: f64,
    /// `direct / (2 pi^2)`, the normalization with `1/(k L(1, sym^2 f))` weights.
    pub direct_theorem_normalized: f64,
    pub window_monotone: bool,
    pub diagonal: DiagonalTerm,
    pub off_diagonal: OffDiagonalTerm,
    pub split_thresholds: SplitThresholds,
    pub two_route_residual: f64,
    pub two_route_bound: f64,
    pub two_route_passed: bool,
    pub family_profile: Vec<FamilyProfileRow>,
    pub cancellation: Option<CancellationProfile>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.two_route_passed && self.window_monotone
    }
}

/// Both routes at the configured point, the family profile and (if `with_profile`)
/// the single-form cancellation profile.
pub fn run_experiment(cfg: &ExperimentConfig, imports: Vec<EigenformData>, with_profile: bool) -> Result<ExperimentReport> {
    cfg.validate()?;
    let q = cfg.q;
    let psi = inner_window(cfg.l)?;
    let smoothed = FamilyWindow::smoothed(cfg.k, cfg.theta)?;
    let sharp = FamilyWindow::sharp(cfg.k, cfg.theta)?;
    let n_max = std::iter::once(cfg.x)
        .chain(cfg.family_grid.iter().copied())
        .map(|x| required_n_max(&q, &psi, x))
        .max()
        .unwrap_or(1);
    let data = FamilyData::build(&smoothed, n_max, imports)?;

    let direct = variance_direct(&smoothed, &data, &q, &psi, cfg.x)?;
    let direct_sharp = variance_direct(&sharp, &data, &q, &psi, cfg.x)?.value;
    let window_monotone = direct_sharp <= direct.value * (1.0 + 1e-12) + 1e-300;

    let split_thresholds = SplitThresholds {
        main_mid: cfg.x.powf(2.0 + cfg.eps0) * cfg.k.powf(-1.0 - cfg.theta + cfg.eps1),
        mid_tail: cfg.k.powi(10),
    };
    let cuts = [split_thresholds.main_mid.floor() as u64, split_thresholds.mid_tail.floor() as u64];
    let diagonal = diagonal_term(&q, &psi, cfg.x, &smoothed);
    let off_diagonal = off_diagonal_term(&q, &psi, cfg.x, &smoothed, data.level, cfg.c_max, cfg.tail_tol, &cuts)?;

    let two_route_residual = (direct.value - diagonal.value - off_diagonal.value).abs();
    let two_route_bound = cfg.two_route_tol * direct.value.abs().max(1.0);

    let family_profile = cfg
        .family_grid
        .iter()
        .map(|&x| variance_direct(&smoothed, &data, &q, &psi, x).map(|d| FamilyProfileRow { x, variance: d.value }))
        .collect::<Result<_>>()?;

    let cancellation = if with_profile && !cfg.x_grid.is_empty() {
        let need = cfg.x_grid.iter().map(|&x| required_n_max(&q, &psi, x)).max().unwrap_or(1);
        let f = match data.forms.get(&cfg.profile_weight) {
            Some(f) if f.n_max() >= need => f.clone(),
            _ => eigenform(cfg.profile_weight, need as usize)?,
        };
        Some(cancellation_profile(&f, &q, &psi, &cfg.x_grid)?)
    } else {
        None
    };

    Ok(ExperimentReport {
        config: cfg.clone(),
        poly: q.to_string(),
        poly_validation: validate_poly(&q, cfg.x, cfg),
        level: data.level,
        smoothed_window: smoothed,
        sharp_window: sharp,
        direct_theorem_normalized: direct.value / (2.0 * PI * PI),
        direct,
        direct_sharp,
        window_monotone,
        diagonal,
        off_diagonal,
        split_thresholds,
        two_route_passed: two_route_residual < two_route_bound,
        two_route_residual,
        two_route_bound,
        family_profile,
        cancellation,
    })
}
