//! Seeded verification suites shared by the command line and the test harness.
//!
//! Each suite returns a [`SuiteReport`] whose residual is normalized so that the
//! tolerance is a plain number (for twisted sums, residuals are divided by `c^2`).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{gauss_sum, gcd, GaussMethod};
use crate::error::Result;
use crate::kloosterman::{
    bound_report_from_value, twisted_multiplicativity_residual, twisted_sum_gauss, twisted_sum_grid,
    vanishing_criterion, weil_envelope, KloostermanKernel, TwistedSumParams, REALITY_TOL, TWISTED_TOL,
};
use crate::sum::ordered_map;

/// Relative slack on the Weil envelope for floating-point sums.
const WEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: Option<u64>,
    pub cases: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Parameters attaining `max_residual` (or the bound supremum).
    pub worst: Option<String>,
    /// Empirical supremum of `|S| / reference` for the bounds suite.
    pub bound_sup: Option<f64>,
}

impl SuiteReport {
    fn new(suite: &str, seed: Option<u64>, tolerance: f64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            cases: 0,
            max_residual: 0.0,
            tolerance,
            passed: true,
            worst: None,
            bound_sup: None,
        }
    }

    fn record(&mut self, residual: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN must register as a failure
        if !(residual <= self.max_residual) {
            self.max_residual = residual;
            self.worst = Some(what());
        }
        self.passed = self.max_residual < self.tolerance;
    }

    fn merge(&mut self, other: SuiteReport) {
        self.cases += other.cases - 1;
        self.record(other.max_residual, || other.worst.unwrap_or_default());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KloostermanRow {
    pub m: u64,
    pub n: u64,
    pub c: u64,
    pub value: f64,
    pub imag: f64,
    pub weil: f64,
    pub weil_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KloostermanGrid {
    pub c_max: u64,
    pub mn_max: u64,
    pub sums: u64,
    /// `max |Im S| / c`, gated at the reality tolerance.
    pub max_imag_ratio: f64,
    pub max_weil_ratio: f64,
    pub passed: bool,
    pub rows: Vec<KloostermanRow>,
}

/// Brute-force `S(m, n; c)` for `1 <= c <= c_max`, `1 <= m, n <= mn_max`.
pub fn kloosterman_grid(c_max: u64, mn_max: u64, keep_rows: bool) -> Result<KloostermanGrid> {
    let per_c: Vec<Result<(f64, f64, Vec<KloostermanRow>)>> = ordered_map(c_max as usize, |j| {
        let c = j as u64 + 1;
        let kernel = KloostermanKernel::new(c)?;
        let (mut imag, mut weil) = (0.0f64, 0.0f64);
        let mut rows = Vec::new();
        for m in 1..=mn_max {
            for n in 1..=mn_max {
                let z = if n >= m { kernel.complex_sum(m as i64, n as i64) } else { kernel.complex_sum(n as i64, m as i64) };
                let env = weil_envelope(m as i64, n as i64, c);
                let ratio = z.re.abs() / env;
                imag = imag.max(z.im.abs() / c as f64);
                weil = weil.max(ratio);
                if keep_rows {
                    rows.push(KloostermanRow { m, n, c, value: z.re, imag: z.im, weil: env, weil_ratio: ratio });
                }
            }
        }
        Ok((imag, weil, rows))
    });
    let mut grid = KloostermanGrid {
        c_max,
        mn_max,
        sums: c_max * mn_max * mn_max,
        max_imag_ratio: 0.0,
        max_weil_ratio: 0.0,
        passed: true,
        rows: Vec::new(),
    };
    for item in per_c {
        let (imag, weil, rows) = item?;
        grid.max_imag_ratio = grid.max_imag_ratio.max(imag);
        grid.max_weil_ratio = grid.max_weil_ratio.max(weil);
        grid.rows.extend(rows);
    }
    grid.passed = grid.max_imag_ratio < REALITY_TOL && grid.max_weil_ratio <= 1.0 + WEIL_SLACK;
    Ok(grid)
}

/// Direct quadratic Gauss sums against `(n/c) eps_c sqrt(c)`; residual in units of `sqrt(c)`.
pub fn gauss_suite(c_max: u64, tolerance: f64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("gauss", None, tolerance);
    let per_c: Vec<Result<Vec<(i64, u64, f64)>>> = ordered_map(c_max as usize, |j| {
        let c = j as u64 + 1;
        let mut out = Vec::new();
        if c % 2 == 1 {
            for n in 1..=c as i64 {
                if gcd(n, c as i64) == 1 {
                    let d = gauss_sum(n, c, GaussMethod::Direct)?;
                    let f = gauss_sum(n, c, GaussMethod::ClosedForm)?;
                    out.push((n, c, (d - f).norm() / (c as f64).sqrt()));
                }
            }
        }
        Ok(out)
    });
    for item in per_c {
        for (n, c, r) in item? {
            report.record(r, || format!("n={n} c={c}"));
        }
    }
    Ok(report)
}

fn coprime_splits(c: u64) -> Vec<(u64, u64)> {
    (2..c).filter(|&c1| c % c1 == 0 && gcd(c1 as i64, (c / c1) as i64) == 1 && c / c1 > 1).map(|c1| (c1, c / c1)).collect()
}

/// Seeded parameters with a definite quadratic (negative discriminant).
///
/// With an indefinite `q` the values `|q(a)|` depend on the chosen representatives
/// of `a mod c`, so the sum is not a function of residues and none of the identities apply.
fn random_params(rng: &mut ChaCha8Rng, c: u64, half: bool) -> Result<TwistedSumParams> {
    let span = 2 * c as i64 + 1;
    loop {
        let (g, b, cc) = (rng.gen_range(-span..=span), rng.gen_range(-span..=span), rng.gen_range(-span..=span));
        let (u, v) = (rng.gen_range(-span..=span), rng.gen_range(-span..=span));
        let p = if half {
            TwistedSumParams::half_integer(2 * g + 1, 2 * b + 1, cc, u, v, c)?
        } else if g == 0 {
            continue;
        } else {
            TwistedSumParams::new(g, b, cc, u, v, c)?
        };
        if is_definite(&p) {
            return Ok(p);
        }
    }
}

/// `q` has negative discriminant, so `|q(a)| = +-q(a)` with one sign for every `a`.
pub fn is_definite(p: &TwistedSumParams) -> bool {
    let (g, b, c) = (p.gamma as i128, p.b as i128, p.c_const as i128);
    if p.half {
        // 2q = g a^2 + b a + 2C
        b * b - 8 * g * c < 0
    } else {
        b * b - 4 * g * c < 0
    }
}

/// Multiplicativity over coprime splittings: `cases` seeded draws with `c1 c2 <= c_max`,
/// then every coprime splitting of every `c <= exhaustive_c` at all `(u, v)`.
pub fn mult_suite(cases: u64, seed: u64, c_max: u64, exhaustive_c: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("mult", Some(seed), TWISTED_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moduli: Vec<u64> = (6..=c_max).filter(|&c| !coprime_splits(c).is_empty()).collect();
    let draws: Vec<(TwistedSumParams, u64, u64)> = (0..cases)
        .map(|i| {
            let c = moduli[rng.gen_range(0..moduli.len())];
            let splits = coprime_splits(c);
            let (c1, c2) = splits[rng.gen_range(0..splits.len())];
            // half-integer coefficients need odd moduli
            let half = c % 2 == 1 && i % 2 == 1;
            random_params(&mut rng, c, half).map(|p| (p, c1, c2))
        })
        .collect::<Result<_>>()?;
    let residuals = ordered_map(draws.len(), |i| {
        let (p, c1, c2) = draws[i];
        twisted_multiplicativity_residual(&p, c1, c2).map(|r| r / (p.c * p.c) as f64)
    });
    for (i, r) in residuals.into_iter().enumerate() {
        let (p, c1, c2) = draws[i];
        report.record(r?, || format!("{p:?} split {c1}*{c2}"));
    }

    let mut exhaustive = SuiteReport::new("mult", Some(seed), TWISTED_TOL);
    for c in 6..=exhaustive_c {
        for (c1, c2) in coprime_splits(c) {
            let p = random_params(&mut rng, c, false)?;
            let (d1, d2) = crate::arith::crt_cofactors(c1, c2)?;
            let lhs = twisted_sum_grid(&p)?;
            let f1 = twisted_sum_grid(&TwistedSumParams { gamma: p.gamma * c2 as i64, c_const: p.c_const * d2 as i64, c: c1, ..p })?;
            let f2 = twisted_sum_grid(&TwistedSumParams { gamma: p.gamma * c1 as i64, c_const: p.c_const * d1 as i64, c: c2, ..p })?;
            for u in 0..c {
                for v in 0..c {
                    let rhs = f1[((u % c1) * c1 + v % c1) as usize] * f2[((u % c2) * c2 + v % c2) as usize];
                    let r = (lhs[(u * c + v) as usize] - rhs).norm() / (c * c) as f64;
                    exhaustive.record(r, || format!("{:?} split {c1}*{c2}", p.with_uv(u as i64, v as i64)));
                }
            }
        }
    }
    if exhaustive.cases > 0 {
        report.merge(exhaustive);
    }
    Ok(report)
}

/// Every odd `c <= c_max`, `per_c` seeded `(gamma, B, C)` with `gcd(4 gamma, c) = 1`,
/// all `(u, v)` with `(v, c)` not dividing `u`: `|S| / c^2` must be tiny.
pub fn vanish_suite(c_max: u64, per_c: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("vanish", Some(seed), TWISTED_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in (3..=c_max).step_by(2) {
        let mut drawn = 0;
        while drawn < per_c {
            let p = random_params(&mut rng, c, drawn % 2 == 1)?;
            if gcd(p.four_gamma(), c as i64) != 1 {
                continue;
            }
            drawn += 1;
            let grid = twisted_sum_grid(&p)?;
            for u in 0..c as i64 {
                for v in 0..c as i64 {
                    let q = p.with_uv(u, v);
                    if vanishing_criterion(&q) {
                        let r = grid[(u as u64 * c + v as u64) as usize].norm() / (c * c) as f64;
                        report.record(r, || format!("{q:?}"));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Gauss closed form against the definitional grid for odd `c <= c_max`, all `(u, v)`.
pub fn gauss_route_suite(c_max: u64, per_c: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("gauss-route", Some(seed), TWISTED_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for c in (1..=c_max).step_by(2) {
        let mut drawn = 0;
        while drawn < per_c {
            let p = random_params(&mut rng, c, drawn % 2 == 1)?;
            if gcd(p.four_gamma(), c as i64) == 1 {
                jobs.push(p);
                drawn += 1;
            }
        }
    }
    let results: Vec<Result<(f64, TwistedSumParams)>> = ordered_map(jobs.len(), |i| {
        let p = jobs[i];
        let c = p.c;
        let grid = twisted_sum_grid(&p)?;
        let mut worst = (0.0f64, p);
        for u in 0..c as i64 {
            for v in 0..c as i64 {
                let q = p.with_uv(u, v);
                let r = (twisted_sum_gauss(&q)? - grid[(u as u64 * c + v as u64) as usize]).norm() / (c * c) as f64;
                if !(r <= worst.0) {
                    worst = (r, q);
                }
            }
        }
        Ok(worst)
    });
    for (i, item) in results.into_iter().enumerate() {
        let (r, q) = item?;
        let c = jobs[i].c;
        report.record(r, || format!("{q:?}"));
        report.cases += c * c - 1;
    }
    Ok(report)
}

/// Supremum of `|S| / ((v, c1) c1^{3/2} c2^{5/2 + eps})` over `c <= c_max`, `per_c` seeded
/// parameter sets (integer and, for odd `c`, half-integer), all `(u, v)`.
///
/// Passes when the supremum is finite; the regression gate compares it with a baseline.
pub fn bounds_suite(c_max: u64, per_c: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("bounds", Some(seed), f64::INFINITY);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = 0.0f64;
    for c in 1..=c_max {
        for i in 0..per_c {
            let p = random_params(&mut rng, c, c % 2 == 1 && i % 2 == 1)?;
            let grid = twisted_sum_grid(&p)?;
            for u in 0..c as i64 {
                for v in 0..c as i64 {
                    let q = p.with_uv(u, v);
                    let value: Complex64 = grid[(u as u64 * c + v as u64) as usize];
                    let b = bound_report_from_value(&q, value);
                    report.cases += 1;
                    if !(b.ratio <= sup) {
                        sup = b.ratio;
                        report.worst = Some(format!("{q:?} c1={} c2={}", b.c1, b.c2));
                    }
                }
            }
        }
    }
    report.max_residual = sup;
    report.bound_sup = Some(sup);
    report.passed = sup.is_finite();
    Ok(report)
}
