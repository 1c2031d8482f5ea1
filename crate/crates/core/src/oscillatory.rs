//! Fourier transforms of windows and numerical checks of the oscillatory
//! integral identities and the quartic stationary-phase expansion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::bessel::bessel_j_range;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_breaks, integrate_breaks_complex, refine, uniform_breaks, PANEL_ORDER};
use crate::window::{cutoff, SmoothWindow};

/// Target for the truncation of `t`-integrals by the decay of `ghat`.
pub const TAIL_TOL: f64 = 1e-10;
const TRANSFORM_TOL: f64 = 1e-11;
const RESEED: usize = 64;

/// `ghat(t) = int g(y) e(t y) dy` for `|t| <= t_max`.
///
/// Uses the trapezoid rule on a uniform grid over the support, which converges
/// spectrally for smooth compactly supported integrands; the grid is doubled
/// until the result at probe frequencies is stable.
#[derive(Debug, Clone)]
pub struct FourierTransform {
    lo: f64,
    h: f64,
    samples: Vec<f64>,
    t_max: f64,
}

impl FourierTransform {
    fn with_nodes(g: &SmoothWindow, order: usize, n: usize, t_max: f64) -> Self {
        let (lo, hi) = g.support();
        let h = (hi - lo) / n as f64;
        let samples = (0..=n)
            .map(|i| {
                let x = lo + h * i as f64;
                if order == 0 {
                    g.eval(x)
                } else {
                    g.derivative(x, order).expect("derivative order checked by the caller")
                }
            })
            .collect();
        FourierTransform { lo, h, samples, t_max }
    }

    pub fn new(g: &SmoothWindow, t_max: f64) -> Self {
        Self::of_derivative(g, 0, t_max)
    }

    /// Transform of `g^{(order)}`, which equals `(-2 pi i t)^order ghat(t)`.
    ///
    /// # Panics
    /// If `order` exceeds the window's declared derivative order.
    pub fn of_derivative(g: &SmoothWindow, order: usize, t_max: f64) -> Self {
        assert!(order <= g.max_order, "derivative order {order} exceeds {}", g.max_order);
        let (lo, hi) = g.support();
        let l1 = Self::with_nodes(g, order, 256, 0.0).eval(0.0).re.abs().max(1.0);
        let probes: Vec<f64> = (0..=8).map(|i| t_max * i as f64 / 8.0).collect();
        let mut n = (((hi - lo) * (t_max + 4.0 / g.scale)).ceil() as usize).max(32);
        let mut cur = Self::with_nodes(g, order, n, t_max);
        loop {
            let next = Self::with_nodes(g, order, 2 * n, t_max);
            let diff = probes
                .iter()
                .map(|&t| (cur.eval(t) - next.eval(t)).norm())
                .fold(0.0, f64::max);
            if diff < TRANSFORM_TOL * l1 || n > 1 << 22 {
                return cur;
            }
            n *= 2;
            cur = next;
        }
    }

    pub fn nodes(&self) -> usize {
        self.samples.len()
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, 2.0 * PI * t * self.h);
        let mut acc = Complex64::new(0.0, 0.0);
        for (block, chunk) in self.samples.chunks(RESEED).enumerate() {
            let y0 = self.lo + self.h * (block * RESEED) as f64;
            let mut z = Complex64::from_polar(1.0, 2.0 * PI * t * y0);
            let mut part = Complex64::new(0.0, 0.0);
            for &g in chunk {
                part += z * g;
                z *= step;
            }
            acc += part;
        }
        acc * self.h
    }
}

/// Piecewise Chebyshev interpolant of `ghat` on `[0, t_max]`, built from a [`FourierTransform`].
///
/// The table stores `ghat(t) e(-c t)` with `c` the center of the support, which varies on
/// the scale of the inverse half-width; negative `t` uses `ghat(-t) = conj(ghat(t))`.
#[derive(Debug, Clone)]
pub struct TransformTable {
    center: f64,
    width: f64,
    t_max: f64,
    values: Vec<Complex64>,
}

const TABLE_POINTS: usize = 24;

fn cheb_node(j: usize) -> f64 {
    (PI * j as f64 / (TABLE_POINTS - 1) as f64).cos()
}

impl TransformTable {
    pub fn new(ft: &FourierTransform, g: &SmoothWindow, t_max: f64) -> Self {
        let center = (g.lo + g.hi) / 2.0;
        let width = 0.5 / ((g.hi - g.lo) / 2.0).max(1e-3);
        let panels = (t_max / width).ceil().max(1.0) as usize;
        let mut values = Vec::with_capacity(panels * TABLE_POINTS);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * width;
            for j in 0..TABLE_POINTS {
                let t = mid + 0.5 * width * cheb_node(j);
                values.push(ft.eval(t) * Complex64::from_polar(1.0, -2.0 * PI * center * t));
            }
        }
        TransformTable { center, width, t_max: panels as f64 * width, values }
    }

    /// `ghat(t) e(-c t)` for `t >= 0`.
    pub fn demodulated(&self, t: f64) -> Complex64 {
        self.interpolate(t)
    }

    fn interpolate(&self, a: f64) -> Complex64 {
        let p = ((a / self.width) as usize).min(self.values.len() / TABLE_POINTS - 1);
        let u = (a - (p as f64 + 0.5) * self.width) / (0.5 * self.width);
        let vals = &self.values[p * TABLE_POINTS..(p + 1) * TABLE_POINTS];
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for (j, &v) in vals.iter().enumerate() {
            let d = u - cheb_node(j);
            if d == 0.0 {
                return v;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == TABLE_POINTS - 1 {
                w *= 0.5;
            }
            num += v * (w / d);
            den += w / d;
        }
        num / den
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let a = t.abs();
        assert!(a <= self.t_max * (1.0 + 1e-12), "t = {t} beyond table range {}", self.t_max);
        let z = self.interpolate(a) * Complex64::from_polar(1.0, 2.0 * PI * self.center * a);
        if t < 0.0 {
            z.conj()
        } else {
            z
        }
    }
}

/// One-off `ghat(t)`.
pub fn fourier_transform(g: &SmoothWindow, t: f64) -> Complex64 {
    FourierTransform::new(g, t.abs()).eval(t)
}

/// Smallest scanned `T0` with `|t|^r |ghat(t)| < tol` on `[T0, 2 T0]`, together with the
/// transform of `g^{(r)}` valid up to `2 T0`.
///
/// Working with `g^{(r)}` instead of multiplying `ghat` by `t^r` keeps the rounding floor of
/// the transform from being amplified at large `t`.
pub fn decay_cutoff(g: &SmoothWindow, r: u32, tol: f64) -> (f64, FourierTransform) {
    let width = g.hi - g.lo;
    let norm = (2.0 * PI).powi(r as i32);
    let mut t0 = 2.0 / g.scale;
    for _ in 0..200 {
        let ft = FourierTransform::of_derivative(g, r as usize, 2.0 * t0);
        let steps = ((t0 * width * 4.0).ceil() as usize).max(16);
        let small = (0..=steps).all(|i| {
            let t = t0 + t0 * i as f64 / steps as f64;
            ft.eval(t).norm() / norm < tol
        });
        if small {
            return (t0, ft);
        }
        t0 *= 1.25;
    }
    panic!("no decay cutoff found below t = {t0} for {g}");
}

/// Residual sweep row: identity, parameters, both sides, residual, node counts.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub x: f64,
    pub window: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Residual with half the nodes, as a convergence diagnostic.
    pub coarse_residual: f64,
    pub nodes: usize,
    pub transform_nodes: usize,
    pub t0: f64,
}

fn t_breaks(t0: f64, rate: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut t = 0.0;
    while t < t0 {
        // the rate grows with t, so size the panel by its right end
        let mut h = (1.0 / rate(t)).min(0.25);
        for _ in 0..4 {
            h = (1.0 / rate(t + h)).min(0.25);
        }
        t = (t + h).min(t0);
        breaks.push(t);
    }
    breaks
}

fn require_positive(g: &SmoothWindow) -> Result<()> {
    if !(g.lo > 0.0) {
        return Err(Error::SupportNotPositive { lo: g.lo, hi: g.hi });
    }
    Ok(())
}

/// `sum_{even k} 2 pi i^k J_{k-1}(x) g(k-1)` against `-2 pi int ghat(t) sin(x cos 2 pi t) dt`.
pub fn bessel_sum_identity(x: f64, g: &SmoothWindow) -> Result<IdentityReport> {
    require_positive(g)?;
    let kmax = g.hi.ceil() as u32 + 2;
    let j = bessel_j_range(kmax, x);
    let mut lhs = 0.0;
    let mut k = 2u32;
    while k - 1 <= kmax {
        let n = k - 1;
        if (n as f64) > g.lo && (n as f64) < g.hi {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            lhs += 2.0 * PI * sign * j[n as usize] * g.eval(n as f64);
        }
        k += 2;
    }
    let (t0, ft) = decay_cutoff(g, 0, TAIL_TOL);
    let table = TransformTable::new(&ft, g, t0);
    let f = |t: f64| table.eval(t).re * (x * (2.0 * PI * t).cos()).sin();
    let breaks = t_breaks(t0, |_| g.hi + x + 1.0);
    let fine = refine(&breaks);
    let coarse = -4.0 * PI * integrate_breaks(f, &breaks, PANEL_ORDER);
    let rhs = -4.0 * PI * integrate_breaks(f, &fine, PANEL_ORDER);
    Ok(IdentityReport {
        identity: "bessel-sum".into(),
        x,
        window: g.to_string(),
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        coarse_residual: (lhs - coarse).abs(),
        nodes: (fine.len() - 1) * PANEL_ORDER,
        transform_nodes: ft.nodes(),
        t0,
    })
}

pub fn bessel_sum_identity_residual(x: f64, g: &SmoothWindow) -> Result<f64> {
    Ok(bessel_sum_identity(x, g)?.residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Sin,
    Cos,
}

impl Parity {
    fn apply(&self, v: f64) -> f64 {
        match self {
            Parity::Sin => v.sin(),
            Parity::Cos => v.cos(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Sin => "sin",
            Parity::Cos => "cos",
        }
    }
}

/// `2 int ghat(t) trig(x - 2 pi^2 t^2 x) dt` against
/// `int_0^oo g(sqrt(2 y x)) trig(y + x - pi/4) (pi y)^{-1/2} dy`, the latter after `y = s^2`.
pub fn fresnel_identity(x: f64, g: &SmoothWindow, parity: Parity) -> Result<IdentityReport> {
    require_positive(g)?;
    let (t0, ft) = decay_cutoff(g, 0, TAIL_TOL);
    let table = TransformTable::new(&ft, g, t0);
    let f = |t: f64| table.eval(t).re * parity.apply(x - 2.0 * PI * PI * t * t * x);
    let breaks = t_breaks(t0, |t| g.hi + 2.0 * PI * t * x + 1.0);
    let fine = refine(&breaks);
    let lhs = 4.0 * integrate_breaks(f, &fine, PANEL_ORDER);
    let lhs_coarse = 4.0 * integrate_breaks(f, &breaks, PANEL_ORDER);

    let r = (2.0 * x).sqrt();
    let (s_lo, s_hi) = (g.lo / r, g.hi / r);
    let rhs_f = |s: f64| g.eval(r * s) * parity.apply(s * s + x - PI / 4.0) * 2.0 / PI.sqrt();
    let panels = ((s_hi * s_hi - s_lo * s_lo) / PI).ceil() as usize + 64 * ((g.hi - g.lo) / g.scale).ceil() as usize;
    let rb = uniform_breaks(s_lo, s_hi, panels);
    let rhs = integrate_breaks(rhs_f, &refine(&rb), PANEL_ORDER);
    Ok(IdentityReport {
        identity: format!("fresnel-{}", parity.as_str()),
        x,
        window: g.to_string(),
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        coarse_residual: (lhs_coarse - rhs).abs(),
        nodes: (fine.len() - 1) * PANEL_ORDER,
        transform_nodes: ft.nodes(),
        t0,
    })
}

pub fn fresnel_identity_residual(x: f64, g: &SmoothWindow, parity: Parity) -> Result<f64> {
    Ok(fresnel_identity(x, g, parity)?.residual)
}

/// The quartic phase `f(t) = x(-2 pi^2 t^2 + (2/3) pi^4 t^4) + 2 pi t y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseContext {
    pub x: f64,
    pub y: f64,
    /// Stationary point near 0.
    pub beta: f64,
}

impl PhaseContext {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let [_, beta, _] = stationary_points(x, y)?;
        Ok(PhaseContext { x, y, beta })
    }

    pub fn f(&self, t: f64) -> f64 {
        phase(self.x, self.y, t)
    }

    pub fn df(&self, t: f64) -> f64 {
        phase_d1(self.x, self.y, t)
    }

    pub fn d2f(&self, t: f64) -> f64 {
        phase_d2(self.x, t)
    }
}

pub fn phase(x: f64, y: f64, t: f64) -> f64 {
    let t2 = t * t;
    x * (-2.0 * PI * PI * t2 + 2.0 / 3.0 * PI.powi(4) * t2 * t2) + 2.0 * PI * t * y
}

pub fn phase_d1(x: f64, y: f64, t: f64) -> f64 {
    x * (-4.0 * PI * PI * t + 8.0 / 3.0 * PI.powi(4) * t * t * t) + 2.0 * PI * y
}

pub fn phase_d2(x: f64, t: f64) -> f64 {
    x * (-4.0 * PI * PI + 8.0 * PI.powi(4) * t * t)
}

/// Largest `|y/x|` for which three real stationary points persist.
pub fn coalescence_limit() -> f64 {
    2.0 * 2f64.sqrt() / 3.0
}

/// The three roots of `f'`, ordered; the middle one lies near `y / (2 pi x)`.
pub fn stationary_points(x: f64, y: f64) -> Result<[f64; 3]> {
    if !(x > 0.0) {
        return Err(Error::InvalidWindow(format!("phase scale x = {x} must be positive")));
    }
    let ratio = (y / x).abs();
    if ratio >= coalescence_limit() {
        return Err(Error::RootCoalescence { ratio, limit: coalescence_limit() });
    }
    let outer = (1.5f64).sqrt() / PI;
    if y == 0.0 {
        return Ok([-outer, 0.0, outer]);
    }
    let tc = 1.0 / (PI * 2f64.sqrt());
    let brackets = [(-1.0, -tc), (-tc, tc), (tc, 1.0)];
    let seeds = [-outer, 0.0, outer];
    let tol = 1e-10 * x.max(y.abs());
    let mut roots = [0.0; 3];
    for i in 0..3 {
        let (mut a, mut b) = brackets[i];
        let seed = seeds[i];
        let fa = phase_d1(x, y, a);
        let mut t = seed;
        for _ in 0..200 {
            let d = phase_d1(x, y, t);
            if d.abs() < tol * 1e-3 {
                break;
            }
            if (d > 0.0) == (fa > 0.0) {
                a = t;
            } else {
                b = t;
            }
            let newton = t - d / phase_d2(x, t);
            t = if newton > a.min(b) && newton < a.max(b) { newton } else { (a + b) / 2.0 };
            if (b - a).abs() < 1e-17 {
                break;
            }
        }
        if phase_d1(x, y, t).abs() >= tol {
            return Err(Error::Quadrature(format!("Newton failed near {seed}")));
        }
        roots[i] = t;
    }
    Ok(roots)
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryPhaseReport {
    pub x: f64,
    pub y: f64,
    pub points: [f64; 3],
    pub approx: Complex64,
    pub quadrature: Complex64,
    pub rel_error: f64,
    /// Expansion including the `1/x` correction at each point, as a quadrature cross-check.
    pub approx_second_order: Complex64,
    pub rel_error_second_order: f64,
    pub nodes: usize,
}

/// Flat part and outer radius (relative) of the smooth cutoff used in the quadrature.
const CUT_FLAT: f64 = 0.65;
const CUT_OUTER: f64 = 1.4;

/// Leading-order expansion
/// `sum_beta sqrt(2 pi / |f''(beta)|) e^{i f(beta)} e^{i pi sgn f''(beta) / 4}`
/// against `int chi(t) e^{i f(t)} dt` with a smooth cutoff `chi`.
pub fn stationary_phase_check(x: f64, y: f64) -> Result<StationaryPhaseReport> {
    let points = stationary_points(x, y)?;
    let mut approx = Complex64::new(0.0, 0.0);
    let mut approx2 = Complex64::new(0.0, 0.0);
    for &b in &points {
        let f2 = phase_d2(x, b);
        let f3 = x * 16.0 * PI.powi(4) * b;
        let f4 = x * 16.0 * PI.powi(4);
        let amp = (2.0 * PI / f2.abs()).sqrt();
        let lead = Complex64::from_polar(amp, phase(x, y, b) + f2.signum() * PI / 4.0);
        approx += lead;
        let corr = 5.0 * f3 * f3 / (24.0 * f2.powi(3)) - f4 / (8.0 * f2 * f2);
        approx2 += lead * Complex64::new(1.0, corr);
    }
    let edge = CUT_FLAT * CUT_OUTER;
    let integrand = |t: f64| Complex64::from_polar(cutoff(t / CUT_FLAT, CUT_OUTER), phase(x, y, t));
    let mut breaks = vec![-edge];
    let mut t = -edge;
    while t < edge {
        let d1 = phase_d1(x, y, t).abs();
        let d2 = phase_d2(x, t).abs();
        let w = (0.02f64).min(2.0 * PI / d1.max(1e-300)).min(0.5 * (2.0 * PI / d2.max(1e-300)).sqrt());
        t = (t + w).min(edge);
        breaks.push(t);
    }
    let coarse = integrate_breaks_complex(integrand, &breaks, PANEL_ORDER);
    let fine_breaks = refine(&breaks);
    let quadrature = integrate_breaks_complex(integrand, &fine_breaks, PANEL_ORDER);
    if (coarse - quadrature).norm() > 1e-8 * quadrature.norm().max(1e-300) {
        return Err(Error::Quadrature(format!(
            "stationary-phase integral unstable under refinement at x = {x}"
        )));
    }
    Ok(StationaryPhaseReport {
        x,
        y,
        points,
        approx,
        quadrature,
        rel_error: (approx - quadrature).norm() / quadrature.norm(),
        approx_second_order: approx2,
        rel_error_second_order: (approx2 - quadrature).norm() / quadrature.norm(),
        nodes: (fine_breaks.len() - 1) * PANEL_ORDER,
    })
}

/// `|int_a^b e^{i f}|` and the first-derivative bound `4 / min |f'|` on an interval free of
/// stationary points where `f'` is monotone.
pub fn first_derivative_test(x: f64, y: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let (da, db) = (phase_d1(x, y, a), phase_d1(x, y, b));
    let tc = 1.0 / (PI * 2f64.sqrt());
    let monotone = (a >= tc || b <= -tc || (a >= -tc && b <= tc)) && a < b;
    if !monotone || da.signum() != db.signum() {
        return Err(Error::Quadrature(format!("[{a}, {b}] is not a monotone, non-stationary interval")));
    }
    let mu = da.abs().min(db.abs());
    let mut breaks = vec![a];
    let mut t = a;
    while t < b {
        t = (t + (2.0 * PI / phase_d1(x, y, t).abs()).min(0.02)).min(b);
        breaks.push(t);
    }
    let v = integrate_breaks_complex(|t| Complex64::from_polar(1.0, phase(x, y, t)), &breaks, PANEL_ORDER);
    Ok((v.norm(), 4.0 / mu))
}

/// `c_r(g) = int |ghat(t) t^r| dt = (2 pi)^{-r} int |(g^{(r)})^(t)| dt`.
///
/// The canonical windows are symmetric about their center, so `i^r` times the demodulated
/// transform of `g^{(r)}` is real; its modulus has kinks at the zeros, which are located
/// and used as panel breaks.
pub fn c_r_norm(g: &SmoothWindow, r: u32) -> f64 {
    let (t0, ft) = decay_cutoff(g, r, TAIL_TOL);
    let table = TransformTable::new(&ft, g, t0);
    let turn = Complex64::i().powi(r as i32);
    let q = |t: f64| (table.demodulated(t) * turn).re;
    let width = g.hi - g.lo;
    let grid = uniform_breaks(0.0, t0, ((t0 * width * 4.0).ceil() as usize).max(64));
    let mut breaks = vec![0.0];
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (qa, qb) = (q(a), q(b));
        if qa * qb < 0.0 {
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if q(m) * qa < 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            breaks.push(0.5 * (a + b));
        }
        breaks.push(w[1]);
    }
    let norm = (2.0 * PI).powi(r as i32);
    2.0 * integrate_breaks(|t| q(t).abs() / norm, &breaks, PANEL_ORDER)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_basics() {
        let g = SmoothWindow::bump_on(1.0, 3.0).unwrap();
        let ft = FourierTransform::new(&g, 20.0);
        let zero = ft.eval(0.0);
        assert!(zero.re > 0.0 && zero.im.abs() < 1e-14);
        let direct = crate::quadrature::integrate(|y| g.eval(y), 1.0, 3.0, 200);
        assert!((zero.re - direct).abs() < 1e-10);
        for t in [0.3, 1.7, 9.0] {
            assert!((ft.eval(-t) - ft.eval(t).conj()).norm() < 1e-12);
            let gl = crate::quadrature::integrate_breaks_complex(
                |y| Complex64::from_polar(g.eval(y), 2.0 * PI * t * y),
                &uniform_breaks(1.0, 3.0, 400),
                PANEL_ORDER,
            );
            assert!((ft.eval(t) - gl).norm() < 1e-10);
        }
        for i in 0..=100 {
            let t = -50.0 + i as f64;
            assert!(fourier_transform(&g, t).norm() * (1.0 + t * t) < 10.0);
        }
    }

    #[test]
    fn table_matches_transform() {
        for g in [SmoothWindow::bump_on(1.0, 3.0).unwrap(), SmoothWindow::plateau_on(30.0, 50.0).unwrap()] {
            let ft = FourierTransform::new(&g, 10.0);
            let table = TransformTable::new(&ft, &g, 10.0);
            for i in 0..=997 {
                let t = -10.0 + 20.0 * i as f64 / 997.0;
                assert!((table.eval(t) - ft.eval(t)).norm() < 1e-12, "{g} t = {t}");
            }
        }
    }

    #[test]
    fn parseval() {
        let g = SmoothWindow::bump_on(1.0, 3.0).unwrap();
        let f = SmoothWindow::plateau_on(1.5, 4.0).unwrap();
        let (fg, ff) = (FourierTransform::new(&g, 4.0), FourierTransform::new(&f, 3.0));
        let lhs = integrate_breaks_complex(|t| fg.eval(t) * f.eval(t), &uniform_breaks(1.5, 4.0, 100), PANEL_ORDER);
        let rhs = integrate_breaks_complex(|t| ff.eval(t) * g.eval(t), &uniform_breaks(1.0, 3.0, 100), PANEL_ORDER);
        assert!((lhs - rhs).norm() < 1e-8, "{lhs} {rhs}");
    }

    #[test]
    fn stationary_points_examples() {
        let r = stationary_points(1e3, 0.0).unwrap();
        assert_eq!(r, [-(1.5f64).sqrt() / PI, 0.0, (1.5f64).sqrt() / PI]);
        let x = 1e4;
        let r = stationary_points(x, 1.0).unwrap();
        for b in r {
            assert!(phase_d1(x, 1.0, b).abs() < 1e-10 * x);
        }
        assert!(r[1] > 0.0);
        assert!((r[1] - 1.0 / (2.0 * PI * x)).abs() < 1e-3 / (2.0 * PI * x));
        assert!(phase_d1(x, 1.0, 0.0) > 0.0 && phase_d2(x, 0.0) < 0.0);
        assert!(matches!(stationary_points(1.0, 1.0), Err(Error::RootCoalescence { .. })));
    }

    #[test]
    fn first_derivative_bound() {
        for x in [1e2, 1e3] {
            let (v, bound) = first_derivative_test(x, 1.0, 0.55, 0.9).unwrap();
            assert!(v <= bound);
        }
        assert!(first_derivative_test(1e2, 1.0, -0.1, 0.1).is_err());
    }

    #[test]
    fn c_r_matches_direct_moment() {
        // independent route: t^r |ghat(t)| from the transform of g itself, split at the zeros
        let g = SmoothWindow::bump_on(1.0, 3.0).unwrap();
        let t_max = 150.0;
        let ft = FourierTransform::new(&g, t_max);
        let demod = |t: f64| (ft.eval(t) * Complex64::from_polar(1.0, -2.0 * PI * 2.0 * t)).re;
        let grid = uniform_breaks(0.0, t_max, 6000);
        let mut breaks = vec![0.0];
        for w in grid.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            if demod(a) * demod(b) < 0.0 {
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if demod(m) * demod(a) < 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                breaks.push(a);
            }
            breaks.push(w[1]);
        }
        for r in [0u32, 1, 2] {
            let direct = 2.0 * integrate_breaks(|t| demod(t).abs() * t.powi(r as i32), &breaks, PANEL_ORDER);
            let via = c_r_norm(&g, r);
            assert!((direct - via).abs() < 1e-9 * via, "r = {r}: {direct} vs {via}");
        }
    }

    #[test]
    fn c_r_scaling_ratio() {
        let a = c_r_norm(&SmoothWindow::weight_window(50.0, 0.5).unwrap(), 0);
        let b = c_r_norm(&SmoothWindow::weight_window(200.0, 0.5).unwrap(), 0);
        assert!(a > 0.0 && b > 0.0);
        assert!(((a / b) - 1.0).abs() < 1e-3, "{a} {b}");
    }
}
