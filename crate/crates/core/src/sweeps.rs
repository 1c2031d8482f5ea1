//! Residual sweeps over the oscillatory identities, with pass/fail gates.

use serde::Serialize;

use crate::error::Result;
use crate::oscillatory::{
    bessel_sum_identity, c_r_norm, fresnel_identity, stationary_phase_check, IdentityReport, Parity,
    StationaryPhaseReport,
};
use crate::sum::ordered_map;
use crate::window::SmoothWindow;

pub const IDENTITY_TOL: f64 = 1e-6;

/// Largest admissible ratio `max / min` of the rescaled `c_r` across the `K` grid.
pub const CRG_SPREAD: f64 = 4.0;

/// Plateau window on `[30, 50]` used for the Bessel-sum identity.
pub fn bessel_sum_window() -> Result<SmoothWindow> {
    SmoothWindow::plateau_on(30.0, 50.0)
}

/// Mollifier on `[2, 10]` used for the Fresnel identities; a wide support keeps `ghat` short.
pub fn fresnel_window() -> Result<SmoothWindow> {
    SmoothWindow::bump_on(2.0, 10.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySweep {
    pub identity: String,
    pub tolerance: f64,
    pub rows: Vec<IdentityReport>,
    pub max_residual: f64,
    /// Every residual is under tolerance at both node counts.
    pub converged: bool,
    pub passed: bool,
}

fn identity_sweep(identity: &str, rows: Vec<IdentityReport>) -> IdentitySweep {
    let max_residual = rows.iter().fold(0.0f64, |m, r| if r.residual <= m { m } else { r.residual });
    let converged = rows.iter().all(|r| r.coarse_residual < IDENTITY_TOL);
    IdentitySweep {
        identity: identity.into(),
        tolerance: IDENTITY_TOL,
        passed: max_residual < IDENTITY_TOL && converged,
        rows,
        max_residual,
        converged,
    }
}

pub fn bessel_sum_sweep(xs: &[f64], g: &SmoothWindow) -> Result<IdentitySweep> {
    let rows = ordered_map(xs.len(), |i| bessel_sum_identity(xs[i], g)).into_iter().collect::<Result<_>>()?;
    Ok(identity_sweep("bessel-sum", rows))
}

/// Both parities at every `x`, sine first.
pub fn fresnel_sweep(xs: &[f64], g: &SmoothWindow) -> Result<IdentitySweep> {
    let rows = ordered_map(2 * xs.len(), |i| {
        let parity = if i % 2 == 0 { Parity::Sin } else { Parity::Cos };
        fresnel_identity(xs[i / 2], g, parity)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(identity_sweep("fresnel", rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarySweep {
    pub y: f64,
    pub rows: Vec<StationaryPhaseReport>,
    /// Leading-order relative error strictly decreases along the `x` grid.
    pub strictly_decreasing: bool,
    pub passed: bool,
}

pub fn stationary_sweep(xs: &[f64], y: f64) -> Result<StationarySweep> {
    let rows: Vec<StationaryPhaseReport> =
        ordered_map(xs.len(), |i| stationary_phase_check(xs[i], y)).into_iter().collect::<Result<_>>()?;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error);
    Ok(StationarySweep { y, rows, strictly_decreasing, passed: strictly_decreasing })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrgRow {
    pub k: f64,
    pub r: u32,
    pub c_r: f64,
    /// `c_r(g_K) K^{(r-1) theta}`.
    pub scaled: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrgSpread {
    pub r: u32,
    pub min: f64,
    pub max: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrgSweep {
    pub theta: f64,
    pub rows: Vec<CrgRow>,
    pub spreads: Vec<CrgSpread>,
    pub passed: bool,
}

/// `c_r(g_K)` for `g_K` the weight window, over `ks x rs` (row-major in `k`).
pub fn crg_sweep(ks: &[f64], theta: f64, rs: &[u32]) -> Result<CrgSweep> {
    let windows: Vec<SmoothWindow> = ks.iter().map(|&k| SmoothWindow::weight_window(k, theta)).collect::<Result<_>>()?;
    let rows: Vec<CrgRow> = ordered_map(ks.len() * rs.len(), |i| {
        let (k, r) = (ks[i / rs.len()], rs[i % rs.len()]);
        let c_r = c_r_norm(&windows[i / rs.len()], r);
        CrgRow { k, r, c_r, scaled: c_r * k.powf((r as f64 - 1.0) * theta) }
    });
    let spreads: Vec<CrgSpread> = rs
        .iter()
        .map(|&r| {
            let vals: Vec<f64> = rows.iter().filter(|row| row.r == r).map(|row| row.scaled).collect();
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(0.0, f64::max);
            CrgSpread { r, min, max, ratio: max / min }
        })
        .collect();
    let passed = spreads.iter().all(|s| s.min > 0.0 && s.ratio.is_finite() && s.ratio <= CRG_SPREAD);
    Ok(CrgSweep { theta, rows, spreads, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps() {
        let s = bessel_sum_sweep(&[5.0], &bessel_sum_window().unwrap()).unwrap();
        assert!(s.passed, "{s:?}");
        let f = fresnel_sweep(&[10.0], &fresnel_window().unwrap()).unwrap();
        assert_eq!(f.rows.len(), 2);
        assert!(f.passed, "{f:?}");
    }
}
