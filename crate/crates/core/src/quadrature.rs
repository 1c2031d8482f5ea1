//! Gauss–Legendre rules and composite panel integration.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::sum::pairwise_sum;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn get(n: usize) -> Arc<Self> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(r) = cache.read().expect("rule cache poisoned").get(&n) {
            return Arc::clone(r);
        }
        let rule = Arc::new(Self::compute(n));
        Arc::clone(cache.write().expect("rule cache poisoned").entry(n).or_insert(rule))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Default number of nodes per panel.
pub const PANEL_ORDER: usize = 16;

/// Integrates `f` over each panel `[b_i, b_{i+1}]` with an `order`-point rule.
pub fn integrate_breaks<F>(f: F, breaks: &[f64], order: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let rule = GaussLegendre::get(order);
    let parts: Vec<f64> = breaks
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            let mut s = 0.0;
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                s += wt * f(mid + half * x);
            }
            s * half
        })
        .collect();
    pairwise_sum(&parts)
}

pub fn integrate_breaks_complex<F>(f: F, breaks: &[f64], order: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let rule = GaussLegendre::get(order);
    let parts: Vec<Complex64> = breaks
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            let mut s = Complex64::new(0.0, 0.0);
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                s += f(mid + half * x) * *wt;
            }
            s * half
        })
        .collect();
    pairwise_sum(&parts)
}

/// `panels + 1` equally spaced breakpoints on `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let panels = panels.max(1);
    (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect()
}

/// Splits every panel in two.
pub fn refine(breaks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * breaks.len());
    for w in breaks.windows(2) {
        out.push(w[0]);
        out.push((w[0] + w[1]) / 2.0);
    }
    if let Some(&last) = breaks.last() {
        out.push(last);
    }
    out
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    integrate_breaks(f, &uniform_breaks(a, b, panels), PANEL_ORDER)
}
