//! Subcommand bodies. Each returns an [`Outcome`] or the error that decides the exit code.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde_json::{json, Value};

use quadvar::config::ExperimentConfig;
use quadvar::eigenform::{eigenform, load_eigenvalues, EigenformData};
use quadvar::kloosterman::{
    bound_report_from_value, twisted_sum_direct, vanishing_criterion, weil_envelope, KloostermanKernel, TwistedSumParams,
    REALITY_TOL,
};
use quadvar::oscillatory::IdentityReport;
use quadvar::petersson::{calibrate_harmonic_weight, petersson_grid, CERTIFICATE_TOL};
use quadvar::report::{csv, to_json_value, Cell};
use quadvar::sweeps::{
    bessel_sum_sweep, bessel_sum_window, crg_sweep, fresnel_sweep, fresnel_window, stationary_sweep, IdentitySweep,
};
use quadvar::variance::run_experiment;
use quadvar::verify::{
    bounds_suite, gauss_route_suite, gauss_suite, kloosterman_grid, mult_suite, vanish_suite, SuiteReport,
};
use quadvar::window::SmoothWindow;
use quadvar::Error;

use crate::output::{exit_code_for, fixed6, sig12, table, Format, Outcome};
use crate::{Identity, KloostermanArgs, OscillatoryArgs, PeterssonArgs, Suite, TwistedArgs, VarianceArgs, EXIT_USAGE};

/// Residual gate for the trace formula grid.
pub const PETERSSON_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(e) => exit_code_for(e),
            Failure::Usage(_) => EXIT_USAGE,
        }
    }
}

type Res<T> = Result<T, Failure>;
type CmdResult = Res<Outcome>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn outcome(default_format: Format, human: String, report: Value, csv: Option<String>, config: Value) -> Outcome {
    Outcome { default_format, human, report, csv, checks: Vec::new(), seed: None, config }
}

pub fn kloosterman(a: &KloostermanArgs) -> CmdResult {
    if a.grid {
        if a.m.is_some() {
            return usage("--grid takes no positional arguments");
        }
        if a.c_max == 0 || a.mn_max == 0 {
            return Err(Error::ZeroModulus.into());
        }
        let grid = kloosterman_grid(a.c_max, a.mn_max, true)?;
        let rows = grid
            .rows
            .iter()
            .map(|r| vec![r.m.into(), r.n.into(), r.c.into(), r.value.into(), r.imag.into(), r.weil.into(), r.weil_ratio.into()])
            .collect();
        let text = csv(&["m", "n", "c", "value", "imag", "weil", "weil_ratio"], rows);
        let human = format!(
            "{text}# sums {}  max |Im S|/c {}  max Weil ratio {}\n",
            grid.sums,
            sig12(grid.max_imag_ratio),
            sig12(grid.max_weil_ratio)
        );
        let mut o = outcome(
            Format::Csv,
            human,
            to_json_value(&grid)?,
            Some(text),
            json!({ "grid": true, "c_max": a.c_max, "mn_max": a.mn_max }),
        );
        o.checks.push(("reality".into(), grid.max_imag_ratio < REALITY_TOL));
        o.checks.push(("weil envelope".into(), grid.passed));
        return Ok(o);
    }
    let (Some(m), Some(n), Some(c)) = (a.m, a.n, a.c) else {
        return usage("expected `kloosterman M N C` or `kloosterman --grid`");
    };
    let kernel = KloostermanKernel::new(c)?;
    let z = kernel.complex_sum(m, n);
    let weil = weil_envelope(m, n, c);
    let ratio = z.re.abs() / weil;
    let report = json!({ "m": m, "n": n, "c": c, "value": z.re, "imag": z.im, "weil": weil, "weil_ratio": ratio });
    let report = to_json_value(&report)?;
    let text = csv(
        &["m", "n", "c", "value", "imag", "weil", "weil_ratio"],
        vec![vec![m.into(), n.into(), c.into(), z.re.into(), z.im.into(), weil.into(), ratio.into()]],
    );
    let mut o = outcome(Format::Human, format!("{}\n", fixed6(z.re)), report, Some(text), json!({ "m": m, "n": n, "c": c }));
    o.checks.push(("reality".into(), z.im.abs() < REALITY_TOL * c as f64));
    o.checks.push(("weil envelope".into(), ratio <= 1.0 + 1e-9));
    Ok(o)
}

fn suite_table(suites: &[SuiteReport]) -> (String, String) {
    let opt = |x: Option<f64>| x.map(sig12).unwrap_or_else(|| "-".into());
    let rows: Vec<Vec<String>> = suites
        .iter()
        .map(|s| {
            vec![
                s.suite.clone(),
                s.seed.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                s.cases.to_string(),
                sig12(s.max_residual),
                sig12(s.tolerance),
                opt(s.bound_sup),
                s.passed.to_string(),
            ]
        })
        .collect();
    let header = ["suite", "seed", "cases", "max_residual", "tolerance", "bound_sup", "passed"];
    let mut human = table(&header, &rows);
    for s in suites {
        if let Some(w) = &s.worst {
            human.push_str(&format!("# {} worst: {w}\n", s.suite));
        }
    }
    let cells = suites
        .iter()
        .map(|s| {
            vec![
                s.suite.as_str().into(),
                s.seed.map(|x| Cell::Int(x as i128)).unwrap_or_else(|| "".into()),
                s.cases.into(),
                s.max_residual.into(),
                s.tolerance.into(),
                s.bound_sup.map(Cell::Float).unwrap_or_else(|| "".into()),
                s.passed.into(),
            ]
        })
        .collect();
    (human, csv(&header, cells))
}

fn read_baseline(path: &Path) -> Result<f64, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Malformed { line: e.line(), reason: format!("baseline is not JSON: {e}") })?;
    v["bound_sup"]
        .as_f64()
        .ok_or_else(|| Error::Malformed { line: 0, reason: "baseline lacks a numeric `bound_sup`".into() }.into())
}

pub fn twisted(a: &TwistedArgs) -> CmdResult {
    if let Some(suite) = a.verify {
        if !a.params.is_empty() {
            return usage("--verify takes no positional arguments");
        }
        let seed = a.seed;
        let c_max = a.c_max.unwrap_or(match suite {
            Suite::Mult => 200,
            Suite::Gauss => 99,
            Suite::Vanish => 60,
            Suite::Bounds => 100,
        });
        if c_max == 0 {
            return Err(Error::ZeroModulus.into());
        }
        let suites = match suite {
            Suite::Mult => vec![mult_suite(a.cases, seed, c_max, a.exhaustive_c)?],
            Suite::Gauss => vec![gauss_suite(c_max, 1e-9)?, gauss_route_suite(c_max, a.per_c.unwrap_or(2), seed)?],
            Suite::Vanish => vec![vanish_suite(c_max, a.per_c.unwrap_or(20), seed)?],
            Suite::Bounds => vec![bounds_suite(c_max, a.per_c.unwrap_or(4), seed)?],
        };
        let baseline = a.baseline.as_deref().map(read_baseline).transpose()?;
        let (mut human, text) = suite_table(&suites);
        let mut checks: Vec<(String, bool)> = suites.iter().map(|s| (s.suite.clone(), s.passed)).collect();
        if let (Some(b), Some(sup)) = (baseline, suites[0].bound_sup) {
            human.push_str(&format!("# baseline bound_sup {}\n", sig12(b)));
            checks.push(("bound supremum does not exceed baseline".into(), sup <= b * (1.0 + 1e-12)));
        }
        let report = json!({ "suites": to_json_value(&suites)?, "baseline_bound_sup": baseline });
        let config = json!({
            "verify": format!("{suite:?}").to_lowercase(),
            "c_max": c_max,
            "cases": a.cases,
            "per_c": a.per_c,
            "exhaustive_c": a.exhaustive_c,
            "seed": seed,
        });
        let mut o = outcome(Format::Human, human, to_json_value(&report)?, Some(text), config);
        o.checks = checks;
        o.seed = Some(seed);
        return Ok(o);
    }
    let [g, b, cc, u, v, c] = a.params[..] else {
        return usage("expected `twisted GAMMA B C U V MODULUS` or `twisted --verify SUITE`");
    };
    if c <= 0 {
        return Err(Error::ZeroModulus.into());
    }
    let p = if a.half {
        TwistedSumParams::half_integer(g, b, cc, u, v, c as u64)?
    } else {
        TwistedSumParams::new(g, b, cc, u, v, c as u64)?
    };
    let z = twisted_sum_direct(&p)?;
    let bound = bound_report_from_value(&p, z);
    let im = fixed6(z.im.abs());
    let sign = if z.im < 0.0 && im != "0.000000" { '-' } else { '+' };
    let human = format!("{} {sign} {im}i\n", fixed6(z.re));
    let report = json!({
        "params": to_json_value(&p)?,
        "re": z.re,
        "im": z.im,
        "abs": z.norm(),
        "vanishing_predicted": vanishing_criterion(&p),
        "bound_reference": bound.reference,
        "bound_ratio": bound.ratio,
    });
    let text = csv(&["re", "im", "abs", "bound_ratio"], vec![vec![z.re.into(), z.im.into(), z.norm().into(), bound.ratio.into()]]);
    let config = json!({ "params": a.params, "half": a.half });
    Ok(outcome(Format::Human, human, to_json_value(&report)?, Some(text), config))
}

fn window_from(support: &[f64], default: SmoothWindow, make: fn(f64, f64) -> quadvar::Result<SmoothWindow>) -> Res<SmoothWindow> {
    match support {
        [] => Ok(default),
        [lo, hi] if lo < hi => Ok(make(*lo, *hi)?),
        _ => usage("--support expects `lo,hi` with lo < hi"),
    }
}

fn identity_outcome(sweep: IdentitySweep, config: Value) -> CmdResult {
    let rows: Vec<&IdentityReport> = sweep.rows.iter().collect();
    let header = ["identity", "x", "lhs", "rhs", "residual", "coarse_residual", "nodes", "transform_nodes", "t0"];
    let human_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.identity.clone(),
                sig12(r.x),
                sig12(r.lhs),
                sig12(r.rhs),
                sig12(r.residual),
                sig12(r.coarse_residual),
                r.nodes.to_string(),
                r.transform_nodes.to_string(),
                sig12(r.t0),
            ]
        })
        .collect();
    let mut human = format!("# window {}\n", rows.first().map(|r| r.window.as_str()).unwrap_or(""));
    human.push_str(&table(&header, &human_rows));
    human.push_str(&format!("# max residual {}  tolerance {}  converged {}\n", sig12(sweep.max_residual), sig12(sweep.tolerance), sweep.converged));
    let cells = rows
        .iter()
        .map(|r| {
            vec![
                r.identity.as_str().into(),
                r.x.into(),
                r.lhs.into(),
                r.rhs.into(),
                r.residual.into(),
                r.coarse_residual.into(),
                (r.nodes as u64).into(),
                (r.transform_nodes as u64).into(),
                r.t0.into(),
            ]
        })
        .collect();
    let mut o = outcome(Format::Human, human, to_json_value(&sweep)?, Some(csv(&header, cells)), config);
    o.checks.push(("residual".into(), sweep.max_residual < sweep.tolerance));
    o.checks.push(("convergence".into(), sweep.converged));
    Ok(o)
}

pub fn oscillatory(a: &OscillatoryArgs) -> CmdResult {
    let xs = |default: &[f64]| if a.x.is_empty() { default.to_vec() } else { a.x.clone() };
    if a.x.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return usage("--x values must be positive");
    }
    match a.identity {
        Identity::BesselSum => {
            let g = window_from(&a.support, bessel_sum_window()?, SmoothWindow::plateau_on)?;
            let xs = xs(&[0.5, 5.0, 50.0]);
            let config = json!({ "identity": "bessel-sum", "x": xs, "window": g.to_string() });
            identity_outcome(bessel_sum_sweep(&xs, &g)?, config)
        }
        Identity::Fresnel => {
            let g = window_from(&a.support, fresnel_window()?, SmoothWindow::bump_on)?;
            let xs = xs(&[1.0, 10.0, 100.0]);
            let config = json!({ "identity": "fresnel", "x": xs, "window": g.to_string() });
            identity_outcome(fresnel_sweep(&xs, &g)?, config)
        }
        Identity::Stationary => {
            let xs = xs(&[1e2, 1e3, 1e4]);
            let sweep = stationary_sweep(&xs, a.y)?;
            let header = ["x", "y", "rel_error", "rel_error_second_order", "nodes"];
            let rows: Vec<Vec<String>> = sweep
                .rows
                .iter()
                .map(|r| vec![sig12(r.x), sig12(r.y), sig12(r.rel_error), sig12(r.rel_error_second_order), r.nodes.to_string()])
                .collect();
            let mut human = table(&header, &rows);
            human.push_str(&format!("# leading-order error strictly decreasing: {}\n", sweep.strictly_decreasing));
            let cells = sweep
                .rows
                .iter()
                .map(|r| vec![r.x.into(), r.y.into(), r.rel_error.into(), r.rel_error_second_order.into(), (r.nodes as u64).into()])
                .collect();
            let config = json!({ "identity": "stationary", "x": xs, "y": a.y });
            let mut o = outcome(Format::Human, human, to_json_value(&sweep)?, Some(csv(&header, cells)), config);
            o.checks.push(("leading-order error decreases".into(), sweep.strictly_decreasing));
            Ok(o)
        }
        Identity::Crg => {
            if a.k.iter().any(|&k| !(k > 0.0)) || a.k.is_empty() || a.r.is_empty() {
                return usage("--k needs positive values and --r at least one order");
            }
            let sweep = crg_sweep(&a.k, a.theta, &a.r)?;
            let header = ["k", "r", "c_r", "scaled"];
            let rows: Vec<Vec<String>> =
                sweep.rows.iter().map(|r| vec![sig12(r.k), r.r.to_string(), sig12(r.c_r), sig12(r.scaled)]).collect();
            let mut human = table(&header, &rows);
            for s in &sweep.spreads {
                human.push_str(&format!("# r = {}: max/min of c_r K^((r-1) theta) = {}\n", s.r, sig12(s.ratio)));
            }
            let cells = sweep.rows.iter().map(|r| vec![r.k.into(), r.r.into(), r.c_r.into(), r.scaled.into()]).collect();
            let config = json!({ "identity": "crg", "k": a.k, "theta": a.theta, "r": a.r });
            let mut o = outcome(Format::Human, human, to_json_value(&sweep)?, Some(csv(&header, cells)), config);
            o.checks.push(("scaling spread within 4".into(), sweep.passed));
            Ok(o)
        }
    }
}

fn load_file(path: &Path) -> Res<EigenformData> {
    let file = File::open(path).map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(load_eigenvalues(BufReader::new(file))?)
}

pub fn petersson(a: &PeterssonArgs) -> CmdResult {
    if a.m_max == 0 {
        return usage("--m-max must be positive");
    }
    let mut f = match (&a.import, a.weight) {
        (Some(path), w) => {
            let f = load_file(path)?;
            if w.is_some_and(|w| w != f.weight) {
                return usage(format!("--weight {} disagrees with the imported weight {}", w.unwrap_or(0), f.weight));
            }
            f
        }
        (None, Some(w)) => eigenform(w, a.m_max as usize)?,
        (None, None) => return usage("give --weight or --import"),
    };
    let cal = calibrate_harmonic_weight(&mut f, None)?;
    let grid = petersson_grid(&f, a.m_max)?;
    let max_residual = grid.iter().fold(0.0f64, |m, r| if r.residual <= m { m } else { r.residual });
    let max_tail = grid.iter().fold(cal.tail_bound, |m, r| if r.tail_bound <= m { m } else { r.tail_bound });
    let header = ["m", "n", "lhs", "rhs", "residual", "c_max", "tail_bound"];
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|r| {
            vec![r.m.to_string(), r.n.to_string(), sig12(r.lhs), sig12(r.rhs), sig12(r.residual), r.c_max.to_string(), sig12(r.tail_bound)]
        })
        .collect();
    let mut human = format!(
        "# level {} weight {}  omega {}  (c_max {}, tail {})  implied L(1, sym^2 f) {}\n",
        f.level,
        f.weight,
        sig12(cal.omega),
        cal.c_max,
        sig12(cal.tail_bound),
        sig12(cal.implied_l_value)
    );
    human.push_str(&table(&header, &rows));
    human.push_str(&format!("# max residual {}  max tail certificate {}\n", sig12(max_residual), sig12(max_tail)));
    let cells = grid
        .iter()
        .map(|r| vec![r.m.into(), r.n.into(), r.lhs.into(), r.rhs.into(), r.residual.into(), r.c_max.into(), r.tail_bound.into()])
        .collect();
    let report = json!({
        "level": f.level,
        "weight": f.weight,
        "calibration": to_json_value(&cal)?,
        "rows": to_json_value(&grid)?,
        "max_residual": max_residual,
        "max_tail_bound": max_tail,
        "tolerance": PETERSSON_TOL,
        "certificate_tolerance": CERTIFICATE_TOL,
    });
    let config = json!({
        "weight": f.weight,
        "m_max": a.m_max,
        "import": a.import.as_ref().map(|p| p.display().to_string()),
    });
    let mut o = outcome(Format::Human, human, to_json_value(&report)?, Some(csv(&header, cells)), config);
    o.checks.push(("trace formula residual".into(), max_residual < PETERSSON_TOL));
    o.checks.push(("tail certificate".into(), max_tail < CERTIFICATE_TOL));
    Ok(o)
}

pub fn variance(a: &VarianceArgs) -> CmdResult {
    let cfg = ExperimentConfig::load(a.config.as_deref())?;
    let mut imports = Vec::new();
    for path in cfg.import.iter().chain(&a.import) {
        imports.push(load_file(path)?);
    }
    let r = run_experiment(&cfg, imports, !a.no_profile)?;
    let kv = |k: &str, v: String| vec![k.to_string(), v];
    let mut rows = vec![
        kv("poly", r.poly.clone()),
        kv("K", sig12(cfg.k)),
        kv("theta", sig12(cfg.theta)),
        kv("X", sig12(cfg.x)),
        kv("level", r.level.to_string()),
        kv("direct", sig12(r.direct.value)),
        kv("direct_sharp", sig12(r.direct_sharp)),
        kv("direct_theorem_normalized", sig12(r.direct_theorem_normalized)),
        kv("diagonal", sig12(r.diagonal.value)),
        kv("off_diagonal", sig12(r.off_diagonal.value)),
        kv("off_diagonal_tail_bound", sig12(r.off_diagonal.tail_bound)),
        kv("off_diagonal_c_max", r.off_diagonal.c_max.to_string()),
        kv("two_route_residual", sig12(r.two_route_residual)),
        kv("two_route_bound", sig12(r.two_route_bound)),
        kv("two_route_passed", r.two_route_passed.to_string()),
        kv("window_monotone", r.window_monotone.to_string()),
    ];
    for row in &r.family_profile {
        rows.push(kv(&format!("family_profile X={}", row.x), sig12(row.variance)));
    }
    if let Some(c) = &r.cancellation {
        if let Some(slope) = c.slope {
            rows.push(kv(&format!("cancellation_slope weight {}", c.weight), sig12(slope)));
        }
    }
    let human = table(&["quantity", "value"], &rows);
    let mut cells: Vec<Vec<Cell>> = r.family_profile.iter().map(|row| vec!["family".into(), row.x.into(), row.variance.into()]).collect();
    if let Some(c) = &r.cancellation {
        cells.extend(c.rows.iter().map(|row| vec![format!("single_form_{}", c.weight).into(), row.x.into(), row.sum.into()]));
    }
    let config = to_json_value(&cfg)?;
    let mut o = outcome(Format::Json, human, to_json_value(&r)?, Some(csv(&["profile", "x", "value"], cells)), config);
    o.checks.push(("two-route equivalence".into(), r.two_route_passed));
    o.checks.push(("sharp window below smoothed".into(), r.window_monotone));
    Ok(o)
}
