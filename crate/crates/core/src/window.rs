//! Smooth compactly supported windows with exact derivatives.
//!
//! Derivatives come from truncated Taylor arithmetic ("jets") propagated
//! through the closed-form building blocks, never from finite differences.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default highest derivative order supported by the canonical windows.
pub const MAX_ORDER: usize = 40;

/// Truncated Taylor coefficients `f(x0 + h) = sum_j c_j h^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    /// Derivatives `f^{(j)}(x0)` for `j = 0..=order`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.c
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if j > 0 {
                    fact *= j as f64;
                }
                v * fact
            })
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add_const(&self, s: f64) -> Self {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    pub fn add(&self, o: &Jet) -> Self {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn mul(&self, o: &Jet) -> Self {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }

    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.c[j] * b[k - j]).sum();
            b[k] = -s / a0;
        }
        Jet { c: b }
    }

    pub fn div(&self, o: &Jet) -> Self {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }
}

/// Below this argument `exp(-1/s)` underflows to zero together with all derivatives.
const FLAT_CUTOFF: f64 = 1.0 / 700.0;

/// `exp(-1/s)` for `s > 0`, zero otherwise.
fn h_jet(s: &Jet) -> Jet {
    if s.value() <= FLAT_CUTOFF {
        return Jet::constant(0.0, s.order());
    }
    s.recip().scale(-1.0).exp()
}

/// Smooth step: 0 for `s <= 0`, 1 for `s >= 1`, `h(s)/(h(s)+h(1-s))` between.
fn step_jet(s: &Jet) -> Jet {
    let n = s.order();
    if s.value() <= FLAT_CUTOFF {
        return Jet::constant(0.0, n);
    }
    if s.value() >= 1.0 - FLAT_CUTOFF {
        return Jet::constant(1.0, n);
    }
    let a = h_jet(s);
    let b = h_jet(&s.scale(-1.0).add_const(1.0));
    a.div(&a.add(&b))
}

/// Mollifier `exp(-1/(1-t^2))` on `(-1, 1)`.
fn bump_jet(t: &Jet) -> Jet {
    let n = t.order();
    let s = t.mul(t).scale(-1.0).add_const(1.0);
    if s.value() <= FLAT_CUTOFF {
        return Jet::constant(0.0, n);
    }
    h_jet(&s)
}

/// Reference profiles before the affine change of variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `exp(-1/(1-t^2))` normalized to peak value 1, support `[-1, 1]`.
    Bump,
    /// 1 on `[-1, 1]`, support `[-outer, outer]`.
    Plateau { outer: f64 },
}

impl Profile {
    fn half_width(&self) -> f64 {
        match self {
            Profile::Bump => 1.0,
            Profile::Plateau { outer } => *outer,
        }
    }

    fn jet(&self, t: &Jet) -> Jet {
        match self {
            Profile::Bump => bump_jet(t).scale(std::f64::consts::E),
            Profile::Plateau { outer } => {
                let w = outer - 1.0;
                let left = step_jet(&t.add_const(*outer).scale(1.0 / w));
                let right = step_jet(&t.scale(-1.0).add_const(*outer).scale(1.0 / w));
                left.mul(&right)
            }
        }
    }

    fn value(&self, t: f64) -> f64 {
        self.jet(&Jet::constant(t, 0)).value()
    }
}

/// Smooth cutoff equal to 1 on `[-1, 1]` and vanishing outside `[-outer, outer]`.
pub fn cutoff(t: f64, outer: f64) -> f64 {
    Profile::Plateau { outer }.value(t)
}

/// `g(xi) = amplitude * profile((xi - shift) / scale)`, supported in `[lo, hi]` with `lo > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothWindow {
    pub lo: f64,
    pub hi: f64,
    pub max_order: usize,
    pub label: String,
    pub profile: Profile,
    pub shift: f64,
    pub scale: f64,
    pub amplitude: f64,
}

impl fmt::Display for SmoothWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on [{}, {}]", self.label, self.lo, self.hi)
    }
}

impl SmoothWindow {
    pub fn new(profile: Profile, shift: f64, scale: f64, label: impl Into<String>) -> Result<Self> {
        if !(scale > 0.0) || !shift.is_finite() {
            return Err(Error::InvalidWindow(format!("scale {scale} and shift {shift}")));
        }
        if let Profile::Plateau { outer } = profile {
            if !(outer > 1.0) {
                return Err(Error::InvalidWindow(format!("plateau outer radius {outer} must exceed 1")));
            }
        }
        let r = profile.half_width();
        let (lo, hi) = (shift - scale * r, shift + scale * r);
        if !(lo > 0.0) {
            return Err(Error::SupportNotPositive { lo, hi });
        }
        Ok(SmoothWindow {
            lo,
            hi,
            max_order: MAX_ORDER,
            label: label.into(),
            profile,
            shift,
            scale,
            amplitude: 1.0,
        })
    }

    /// Plateau window equal to 1 on `[-1, 1]` with support `[-1.1, 1.1]`, mapped affinely.
    pub fn plateau(shift: f64, scale: f64) -> Result<Self> {
        Self::new(Profile::Plateau { outer: 1.1 }, shift, scale, "plateau")
    }

    /// Plateau window whose support is exactly `[lo, hi]`.
    pub fn plateau_on(lo: f64, hi: f64) -> Result<Self> {
        Self::plateau((lo + hi) / 2.0, (hi - lo) / 2.2)
    }

    /// Normalized mollifier with support exactly `[lo, hi]`.
    pub fn bump_on(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Profile::Bump, (lo + hi) / 2.0, (hi - lo) / 2.0, "bump")
    }

    /// `g_K(xi) = u((xi + 1 - K) / K^theta)` with `u` the plateau window.
    pub fn weight_window(k: f64, theta: f64) -> Result<Self> {
        let mut w = Self::plateau(k - 1.0, k.powf(theta))?;
        w.label = format!("g_K(K={k},theta={theta})");
        Ok(w)
    }

    /// `xi -> g(xi / s)`.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        let mut w = Self::new(self.profile, self.shift * s, self.scale * s, self.label.clone())?;
        w.amplitude = self.amplitude;
        Ok(w)
    }

    pub fn with_max_order(mut self, t: usize) -> Self {
        self.max_order = t;
        self
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return 0.0;
        }
        self.amplitude * self.profile.value((x - self.shift) / self.scale)
    }

    /// Derivatives `g(x), g'(x), ..., g^{(order)}(x)`.
    pub fn derivatives(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        if order > self.max_order {
            return Err(Error::DerivativeOrder { requested: order, max: self.max_order });
        }
        if x <= self.lo || x >= self.hi {
            return Ok(vec![0.0; order + 1]);
        }
        let mut t = Jet::variable((x - self.shift) / self.scale, order);
        if order >= 1 {
            t.c[1] = 1.0 / self.scale;
        }
        Ok(self.profile.jet(&t).scale(self.amplitude).derivatives())
    }

    pub fn derivative(&self, x: f64, j: usize) -> Result<f64> {
        Ok(self.derivatives(x, j)?[j])
    }
}

/// `sum_{j <= T} sup |g^{(j)}|`, suprema from dense sampling plus golden-section refinement.
pub fn sobolev_norm(g: &SmoothWindow, t: usize) -> Result<f64> {
    if t > g.max_order {
        return Err(Error::DerivativeOrder { requested: t, max: g.max_order });
    }
    const SAMPLES: usize = 10_000;
    let (lo, hi) = g.support();
    let h = (hi - lo) / SAMPLES as f64;
    let xs: Vec<f64> = (0..=SAMPLES).map(|i| lo + h * i as f64).collect();
    let table: Vec<Vec<f64>> = xs.iter().map(|&x| g.derivatives(x, t)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for j in 0..=t {
        let mut best = 0usize;
        for i in 0..xs.len() {
            if table[i][j].abs() > table[best][j].abs() {
                best = i;
            }
        }
        let f = |x: f64| g.derivative(x, j).map(f64::abs).unwrap_or(0.0);
        let (mut a, mut b) = ((xs[best] - h).max(lo), (xs[best] + h).min(hi));
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut sup = table[best][j].abs();
        for _ in 0..60 {
            let x1 = b - r * (b - a);
            let x2 = a + r * (b - a);
            let (f1, f2) = (f(x1), f(x2));
            sup = sup.max(f1).max(f2);
            if f1 > f2 {
                b = x2;
            } else {
                a = x1;
            }
        }
        total += sup;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_arithmetic_matches_closed_forms() {
        // exp(2x) at 0.3
        let x = Jet::variable(0.3, 6);
        let e = x.scale(2.0).exp();
        let d = e.derivatives();
        for (j, v) in d.iter().enumerate() {
            let exact = 2f64.powi(j as i32) * 0.6f64.exp();
            assert!((v - exact).abs() < 1e-12 * exact);
        }
        // 1/(1+x) at 0.5
        let r = x.add_const(0.2).add_const(1.0).recip().derivatives();
        let mut fact = 1.0;
        for (j, v) in r.iter().enumerate() {
            if j > 0 {
                fact *= j as f64;
            }
            let exact = (-1f64).powi(j as i32) * fact / 1.5f64.powi(j as i32 + 1);
            assert!((v - exact).abs() < 1e-10 * exact.abs());
        }
    }

    #[test]
    fn plateau_shape() {
        let w = SmoothWindow::plateau(5.0, 1.0).unwrap();
        assert_eq!(w.support(), (3.9, 6.1));
        assert_eq!(w.eval(5.0), 1.0);
        assert_eq!(w.eval(4.0), 1.0);
        assert_eq!(w.eval(3.9), 0.0);
        assert!(w.eval(3.95) > 0.0 && w.eval(3.95) < 1.0);
        assert!((w.eval(3.95) - 0.5).abs() < 1e-12);
        assert_eq!(w.derivative(5.0, 3).unwrap(), 0.0);
        assert!(SmoothWindow::plateau(1.0, 1.0).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let w = SmoothWindow::plateau_on(30.0, 50.0).unwrap();
        let h = 1e-5;
        for x in [30.3, 30.7, 31.0, 49.2, 49.8] {
            let d = w.derivatives(x, 2).unwrap();
            let fd1 = (w.eval(x + h) - w.eval(x - h)) / (2.0 * h);
            let fd2 = (w.eval(x + h) - 2.0 * w.eval(x) + w.eval(x - h)) / (h * h);
            assert!((d[1] - fd1).abs() < 1e-6 * (1.0 + fd1.abs()), "x={x}");
            assert!((d[2] - fd2).abs() < 1e-3 * (1.0 + fd2.abs()), "x={x}");
        }
        let b = SmoothWindow::bump_on(1.0, 3.0).unwrap();
        assert!((b.eval(2.0) - 1.0).abs() < 1e-15);
        let d = b.derivatives(2.4, 1).unwrap();
        let fd = (b.eval(2.4 + h) - b.eval(2.4 - h)) / (2.0 * h);
        assert!((d[1] - fd).abs() < 1e-8);
    }

    #[test]
    fn high_orders_are_finite() {
        let w = SmoothWindow::plateau_on(0.5, 2.0).unwrap();
        for i in 1..200 {
            let x = 0.5 + 1.5 * i as f64 / 200.0;
            assert!(w.derivatives(x, MAX_ORDER).unwrap().iter().all(|v| v.is_finite()));
        }
        assert!(matches!(w.derivatives(1.0, MAX_ORDER + 1), Err(Error::DerivativeOrder { .. })));
    }

    #[test]
    fn sobolev_examples() {
        let w = SmoothWindow::plateau_on(0.5, 2.0).unwrap();
        let n0 = sobolev_norm(&w, 0).unwrap();
        assert!((n0 - 1.0).abs() < 1e-12);
        let n1 = sobolev_norm(&w, 1).unwrap();
        let n2 = sobolev_norm(&w, 2).unwrap();
        assert!(n2 >= n1 && n1 >= n0);
        let x = 3.0;
        let wx = w.dilate(x).unwrap();
        let lhs = sobolev_norm(&wx, 1).unwrap();
        assert!((lhs - (1.0 + (n1 - 1.0) / x)).abs() < 1e-6 * lhs);
        assert!(sobolev_norm(&w.clone().with_max_order(3), 4).is_err());
    }
}
