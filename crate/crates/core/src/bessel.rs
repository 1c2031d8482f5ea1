//! J-Bessel functions of integer order.
//!
//! Ascending series when `x <= max(8, k/2)`, otherwise Miller's downward
//! recurrence normalized by `J_0 + 2 sum J_{2j} = 1`.

const SERIES_X: f64 = 8.0;
const RESCALE: f64 = 1e250;

/// `J_k(x)` for integer `k >= 0` and real `x`.
pub fn bessel_j(k: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(k, -x);
        return if k % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_X.max(k as f64 / 2.0) {
        series(k, x)
    } else {
        miller(k, x)[k as usize]
    }
}

/// `J_0(x), ..., J_{kmax}(x)` from a single recurrence sweep.
pub fn bessel_j_range(kmax: u32, x: f64) -> Vec<f64> {
    if x < 0.0 {
        let mut v = bessel_j_range(kmax, -x);
        for (k, val) in v.iter_mut().enumerate() {
            if k % 2 == 1 {
                *val = -*val;
            }
        }
        return v;
    }
    if x == 0.0 {
        let mut v = vec![0.0; kmax as usize + 1];
        v[0] = 1.0;
        return v;
    }
    if x <= SERIES_X {
        return (0..=kmax).map(|k| series(k, x)).collect();
    }
    let mut v = miller(kmax, x);
    v.truncate(kmax as usize + 1);
    // high orders with x well below k/2 lose relative accuracy in the normalized sweep
    for k in 0..=kmax {
        if x <= k as f64 / 2.0 {
            v[k as usize] = series(k, x);
        }
    }
    v
}

fn series(k: u32, x: f64) -> f64 {
    let h = x / 2.0;
    let h2 = h * h;
    // (x/2)^k / k! in log space to avoid overflow for large k
    let log_lead = k as f64 * h.ln() - ln_factorial(k);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1u32;
    loop {
        term *= -h2 / (j as f64 * (j + k) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() || j > 500 {
            break;
        }
        j += 1;
    }
    sum * log_lead.exp()
}

fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

fn miller(kmax: u32, x: f64) -> Vec<f64> {
    let top = (kmax as f64).max(x);
    let mut start = (top + 15.0 + (160.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut vals = vec![0.0; start + 2];
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    vals[start] = cur;
    for n in (1..=start).rev() {
        let prev = 2.0 * n as f64 / x * cur - next;
        next = cur;
        cur = prev;
        vals[n - 1] = cur;
        if (n - 1) % 2 == 0 && n - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE {
            let s = 1.0 / RESCALE;
            cur *= s;
            next *= s;
            norm *= s;
            for v in vals[n - 1..].iter_mut() {
                *v *= s;
            }
        }
    }
    norm += vals[0];
    vals.truncate(kmax.max(1) as usize + 1);
    vals.iter_mut().for_each(|v| *v /= norm);
    vals
}

/// Upper bound for `sum_{c > c0} |J_nu(2a/c)|` from `|J_nu(z)| <= (z/2)^nu e^{z^2/4} / nu!`.
///
/// Requires `nu >= 2`.
pub fn bessel_tail_bound(a: f64, nu: u32, c0: f64) -> f64 {
    assert!(nu >= 2, "tail bound needs order >= 2");
    let r = a / c0;
    let log = (nu as f64) * a.ln() - (nu as f64 - 1.0) * c0.ln() - ln_factorial(nu) - (nu as f64 - 1.0).ln()
        + r * r;
    log.exp()
}
