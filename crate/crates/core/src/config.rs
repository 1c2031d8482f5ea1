//! Experiment configuration: flat `key = value` files with environment overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::variance::QuadraticPoly;

/// Prefix for environment overrides, e.g. `QVAR_THETA=0.7`.
pub const ENV_PREFIX: &str = "QVAR_";

const KEYS: [&str; 16] = [
    "k", "theta", "x", "eps", "eps0", "eps1", "eps2", "l", "c_max", "tail_tol", "two_route_tol", "q", "x_grid",
    "family_grid", "profile_weight", "import",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Family center `K`.
    pub k: f64,
    pub theta: f64,
    /// Length `X` of the inner sum.
    pub x: f64,
    pub eps: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// Support parameter: the inner window is supported on `(1/l, l)`.
    pub l: f64,
    /// Forces a common truncation instead of the per-pair rule.
    pub c_max: Option<u64>,
    /// Bound accepted for the aggregated off-diagonal tail.
    pub tail_tol: f64,
    pub two_route_tol: f64,
    pub q: QuadraticPoly,
    /// `X` values for the single-form cancellation profile.
    pub x_grid: Vec<f64>,
    /// `X` values for the family mean-square profile (each at most `K`).
    pub family_grid: Vec<f64>,
    pub profile_weight: u32,
    /// Eigenvalue CSV files overriding or extending the internal data.
    pub import: Vec<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k: 16.0,
            theta: 0.6,
            x: 10.0,
            eps: 0.5,
            eps0: 0.01,
            eps1: 0.05,
            eps2: 0.1,
            l: 2.0,
            c_max: None,
            tail_tol: 1e-8,
            two_route_tol: 1e-4,
            q: QuadraticPoly::new(1, 1, 1).expect("x^2 + x + 1"),
            x_grid: vec![20.0, 40.0, 80.0, 160.0],
            family_grid: vec![2.0, 4.0, 8.0, 16.0],
            profile_weight: 12,
            import: Vec::new(),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| Error::Config(format!("{key}: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: `{v}` is not finite")));
    }
    Ok(x)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_f64(key, s)).collect()
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. Keys are case-insensitive.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        match key.as_str() {
            "k" => self.k = parse_f64(&key, value)?,
            "theta" => self.theta = parse_f64(&key, value)?,
            "x" => self.x = parse_f64(&key, value)?,
            "eps" => self.eps = parse_f64(&key, value)?,
            "eps0" => self.eps0 = parse_f64(&key, value)?,
            "eps1" => self.eps1 = parse_f64(&key, value)?,
            "eps2" => self.eps2 = parse_f64(&key, value)?,
            "l" => self.l = parse_f64(&key, value)?,
            "c_max" => {
                self.c_max = match value {
                    "" | "auto" => None,
                    v => Some(v.parse().map_err(|_| Error::Config(format!("c_max: `{v}` is not a positive integer")))?),
                }
            }
            "tail_tol" => self.tail_tol = parse_f64(&key, value)?,
            "two_route_tol" => self.two_route_tol = parse_f64(&key, value)?,
            "q" => self.q = QuadraticPoly::parse(value)?,
            "x_grid" => self.x_grid = parse_list(&key, value)?,
            "family_grid" => self.family_grid = parse_list(&key, value)?,
            "profile_weight" => {
                self.profile_weight =
                    value.parse().map_err(|_| Error::Config(format!("profile_weight: `{value}` is not an integer")))?
            }
            "import" => {
                self.import = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(PathBuf::from).collect()
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(k, v).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", i + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Applies overrides from `vars` whose names are `ENV_PREFIX` plus an upper-case key.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<()> {
        let mut found = BTreeMap::new();
        for (name, value) in vars {
            if let Some(key) = name.strip_prefix(ENV_PREFIX) {
                let key = key.to_ascii_lowercase();
                if KEYS.contains(&key.as_str()) {
                    found.insert(key, value);
                }
            }
        }
        for (k, v) in found {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// File (or defaults when `path` is `None`), then process environment, then validation.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)?
            }
            None => Self::default(),
        };
        cfg.apply_env(std::env::vars())?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every parameter constraint, naming the first one that fails.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: String| Err(Error::Config(what));
        let (th, e0) = (self.theta, self.eps0);
        if !(self.k > 0.0) {
            return fail(format!("K = {} must be positive", self.k));
        }
        if !(th > 1.0 / 3.0 && th < 1.0) {
            return fail(format!("theta = {th} must lie in (1/3, 1)"));
        }
        if !(self.x > 0.0 && self.x <= self.k) {
            return fail(format!("X = {} must satisfy 0 < X <= K = {}", self.x, self.k));
        }
        if !(self.eps > 0.0) {
            return fail(format!("eps = {} must be positive", self.eps));
        }
        let e0_max = ((3.0 * th - 1.0) / 20.0).min((1.0 - th) / 2.0).min(self.eps / 10.0);
        if !(e0 > 0.0 && e0 < e0_max) {
            return fail(format!("eps0 = {e0} must satisfy 0 < eps0 < min((3 theta - 1)/20, (1 - theta)/2, eps/10) = {e0_max}"));
        }
        let e1_max = (3.0 * th - 1.0) / 12.0;
        if !(self.eps1 > 0.0 && self.eps1 < e1_max) {
            return fail(format!("eps1 = {} must satisfy 0 < eps1 < (3 theta - 1)/12 = {e1_max}", self.eps1));
        }
        if !(self.eps2 > e0 && self.eps2 < 2.0 * self.eps / 5.0) {
            return fail(format!("eps2 = {} must satisfy eps0 < eps2 < 2 eps/5 = {}", self.eps2, 2.0 * self.eps / 5.0));
        }
        if !(self.l > 1.0) {
            return fail(format!("l = {} must exceed 1", self.l));
        }
        if self.c_max == Some(0) {
            return fail("c_max must be positive".into());
        }
        if !(self.tail_tol > 0.0) || !(self.two_route_tol > 0.0) {
            return fail("tolerances must be positive".into());
        }
        if self.x_grid.iter().any(|&x| !(x > 0.0)) {
            return fail("x_grid entries must be positive".into());
        }
        if let Some(&x) = self.family_grid.iter().find(|&&x| !(x > 0.0 && x <= self.k)) {
            return fail(format!("family_grid entry {x} must satisfy 0 < X <= K"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn parse_and_override() {
        let text = "# comment\nK = 20\ntheta = 0.7 # trailing\nq = 1/2, 1/2, 1\nx_grid = 10, 20\n\n";
        let mut cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.k, 20.0);
        assert_eq!(cfg.theta, 0.7);
        assert_eq!(cfg.q, QuadraticPoly::from_doubled(1, 1, 2).unwrap());
        assert_eq!(cfg.x_grid, vec![10.0, 20.0]);
        let env = vec![("QVAR_X".to_string(), "12".to_string()), ("OTHER".to_string(), "1".to_string())];
        cfg.apply_env(env).unwrap();
        assert_eq!(cfg.x, 12.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn violations_name_the_constraint() {
        let msg = |text: &str| match ExperimentConfig::parse(text).and_then(|c| c.validate()) {
            Err(Error::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        };
        assert!(msg("theta = 0.3").contains("theta"));
        assert!(msg("X = 17").contains("X = 17"));
        assert!(msg("eps0 = 0.05").contains("eps0"));
        assert!(msg("eps1 = 0.07").contains("eps1"));
        assert!(msg("eps2 = 0.005").contains("eps2"));
        assert!(msg("l = 1").contains("l = 1"));
        assert!(msg("family_grid = 2, 32").contains("family_grid"));
        assert!(msg("bogus = 1").contains("unknown key"));
        assert!(msg("K 16").contains("line 1"));
    }
}
