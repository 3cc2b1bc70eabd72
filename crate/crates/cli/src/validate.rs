//! Self-check suite: per-module invariants plus the numbered acceptance
//! criteria. Every check reports what it measured next to what it expected.

use std::f64::consts::PI;
use std::fmt;

use tumorlevy::mc::{mc_mean_exit_time, SimConfig};
use tumorlevy::{
    drift, empirical_cf_check, escape_probability, gamma_fn, mean_exit_time, observed_order,
    potential, riemann_zeta, stable_constant, steady_states, EscapeTarget, ExitProblem, Grid,
    ModelParams, NoiseParams, OrderEstimate, Scheme, SolutionField, ZeroDrift,
};

use crate::commands::{run_mc, Quantity};
use crate::config::{DriftKind, Overrides, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: String,
    pub expected: String,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<32} measured: {}  expected: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected
        )
    }
}

/// Deliberate corruption used to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    Zeta,
}

impl std::str::FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zeta" => Ok(Self::Zeta),
            other => Err(format!("unknown fault '{other}' (zeta)")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    /// Skip checks marked slow (Monte Carlo at full size).
    pub skip_slow: bool,
    /// Run only checks whose name contains one of these.
    pub only: Vec<String>,
    pub fault: Option<Fault>,
}

pub struct Ctx {
    fault: Option<Fault>,
}

impl Ctx {
    pub fn new(fault: Option<Fault>) -> Self {
        Self { fault }
    }

    fn zeta(&self, s: f64) -> tumorlevy::Result<f64> {
        let z = riemann_zeta(s)?;
        Ok(match self.fault {
            Some(Fault::Zeta) => z + 1e-3,
            None => z,
        })
    }
}

type CheckFn = fn(&Ctx) -> CliResult<Check>;

pub struct CheckDef {
    pub name: &'static str,
    pub slow: bool,
    pub run: CheckFn,
}

pub fn checks() -> Vec<CheckDef> {
    let def = |name, slow, run: CheckFn| CheckDef { name, slow, run };
    vec![
        def("model.steady-state-roots", false, model_roots),
        def("model.potential-gradient", false, model_gradient),
        def("levy.stable-constant", false, levy_constant),
        def("special.zeta-known-values", false, zeta_known),
        def("solver.pure-stable-closed-form", false, solver_closed_form),
        def("solver.correction-gain", false, solver_correction_gain),
        def("solver.met-positive", false, solver_met_positive),
        def("mc.symmetric-escape", false, mc_symmetric_escape),
        def("c01-steady-states", false, c01_steady_states),
        def("c02-pure-stable-vs-mc", true, c02_pure_stable_vs_mc),
        def("c03-gaussian-exact", false, c03_gaussian_exact),
        def("c04-duality", false, c04_duality),
        def("c05-convergence-order", false, c05_order),
        def("c06-met-vs-eps", false, c06_met_vs_eps),
        def("c07-met-vs-a", false, c07_met_vs_a),
        def("c08-escape-crossing", false, c08_crossing),
        def("c09-escape-vs-eps", false, c09_escape_vs_eps),
        def("c10-sampler-cf", false, c10_sampler),
        def("c11-special-functions", false, c11_special),
        def("c12-determinism", true, c12_determinism),
    ]
}

fn selected(def: &CheckDef, opts: &ValidateOptions) -> bool {
    (opts.only.is_empty() || opts.only.iter().any(|o| def.name.contains(o.as_str())))
        && !(opts.skip_slow && def.slow)
}

/// Run the selected checks in order. A check that errors counts as a failure.
pub fn run_validate(opts: &ValidateOptions) -> Vec<Check> {
    let ctx = Ctx::new(opts.fault);
    checks()
        .into_iter()
        .filter(|d| selected(d, opts))
        .map(|d| run_one(&d, &ctx))
        .collect()
}

pub fn run_one(def: &CheckDef, ctx: &Ctx) -> Check {
    (def.run)(ctx).unwrap_or_else(|e| Check {
        name: def.name,
        measured: format!("error: {e}"),
        expected: "no error".into(),
        pass: false,
    })
}

pub fn render_report(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    out.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    out
}

/// Report text plus `Err(Validation)` when anything failed.
pub fn cmd_validate(opts: &ValidateOptions) -> (String, CliResult<()>) {
    let checks = run_validate(opts);
    let report = render_report(&checks);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let status = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    };
    (report, status)
}

fn reference_model() -> ModelParams {
    ModelParams {
        theta: 0.1,
        beta: 3.0,
    }
}

fn tumor_grid(h: f64) -> CliResult<Grid> {
    Ok(Grid::new(0.0, 5.0, h)?)
}

fn symmetric_grid(h: f64) -> CliResult<Grid> {
    Ok(Grid::new(-1.0, 1.0, h)?)
}

fn g(v: f64) -> String {
    format!("{v:.6e}")
}

/// Mean exit time from the center of (-1, 1) for the pure stable process
/// with unit intensity.
pub fn pure_stable_center_exit_time(alpha: f64) -> CliResult<f64> {
    Ok(PI.sqrt() / (2f64.powf(alpha) * gamma_fn(1.0 + alpha / 2.0)? * gamma_fn((1.0 + alpha) / 2.0)?))
}

fn model_roots(_: &Ctx) -> CliResult<Check> {
    let mut worst = 0.0_f64;
    for beta in [2.0, 2.5, 3.0] {
        let p = ModelParams::new(0.1, beta)?;
        let s = steady_states(&p)?;
        for x in [s.x1, s.x2, s.x3] {
            worst = worst.max(drift(x, &p)?.abs());
        }
    }
    Ok(Check {
        name: "model.steady-state-roots",
        measured: format!("max |f(x_i)| = {}", g(worst)),
        expected: "<= 1e-12".into(),
        pass: worst <= 1e-12,
    })
}

fn model_gradient(_: &Ctx) -> CliResult<Check> {
    let p = reference_model();
    let step = 1e-5;
    let mut worst = 0.0_f64;
    for x in [0.3, 1.7, 4.0, 6.2] {
        let du = (potential(x + step, &p)? - potential(x - step, &p)?) / (2.0 * step);
        worst = worst.max((du + drift(x, &p)?).abs());
    }
    Ok(Check {
        name: "model.potential-gradient",
        measured: format!("max |U' + f| = {}", g(worst)),
        expected: "<= 1e-8".into(),
        pass: worst <= 1e-8,
    })
}

fn levy_constant(_: &Ctx) -> CliResult<Check> {
    let e1 = (stable_constant(1.0)? - 1.0 / PI).abs();
    let e2 = (stable_constant(0.5)? - 1.0 / (2.0 * (2.0 * PI).sqrt())).abs();
    let worst = e1.max(e2);
    Ok(Check {
        name: "levy.stable-constant",
        measured: format!("max error at alpha 1, 0.5 = {}", g(worst)),
        expected: "<= 1e-14".into(),
        pass: worst <= 1e-14,
    })
}

fn zeta_known(ctx: &Ctx) -> CliResult<Check> {
    let known = [
        (0.0, -0.5),
        (-1.0, -1.0 / 12.0),
        (2.0, PI * PI / 6.0),
        (0.5, -1.460_354_508_809_586_8),
        (-0.5, -0.207_886_224_977_354_57),
    ];
    let mut worst = 0.0_f64;
    for (s, z) in known {
        worst = worst.max((ctx.zeta(s)? - z).abs());
    }
    Ok(Check {
        name: "special.zeta-known-values",
        measured: format!("max error = {}", g(worst)),
        expected: "<= 1e-10".into(),
        pass: worst <= 1e-10,
    })
}

fn solver_closed_form(_: &Ctx) -> CliResult<Check> {
    let grid = symmetric_grid(0.01)?;
    let mut worst = 0.0_f64;
    for alpha in [1.0, 1.5] {
        let u = mean_exit_time(&grid, &ZeroDrift, &NoiseParams::new(0.0, 1.0, alpha)?)?;
        let exact = pure_stable_center_exit_time(alpha)?;
        worst = worst.max(((u.value_at(0.0) - exact) / exact).abs());
    }
    Ok(Check {
        name: "solver.pure-stable-closed-form",
        measured: format!("max relative error of u(0) = {}", g(worst)),
        expected: "<= 5e-3".into(),
        pass: worst <= 5e-3,
    })
}

fn center_error(grid: &Grid, alpha: f64, scheme: Scheme) -> CliResult<f64> {
    let noise = NoiseParams::new(0.0, 1.0, alpha)?;
    let u = ExitProblem::new(grid, &ZeroDrift, &noise, scheme)?.mean_exit_time()?;
    Ok((u.value_at(0.0) - pure_stable_center_exit_time(alpha)?).abs())
}

fn solver_correction_gain(_: &Ctx) -> CliResult<Check> {
    let grid = symmetric_grid(0.01)?;
    let mut measured = Vec::new();
    let mut pass = true;
    for alpha in [1.0, 1.5] {
        let c = center_error(&grid, alpha, Scheme::Corrected)?;
        let u = center_error(&grid, alpha, Scheme::Uncorrected)?;
        pass &= c < u;
        measured.push(format!("alpha={alpha}: {} vs {}", g(c), g(u)));
    }
    Ok(Check {
        name: "solver.correction-gain",
        measured: measured.join("; "),
        expected: "corrected error < uncorrected".into(),
        pass,
    })
}

fn solver_met_positive(_: &Ctx) -> CliResult<Check> {
    let grid = tumor_grid(0.01)?;
    let mut worst = f64::INFINITY;
    for alpha in [0.5, 1.0, 1.5] {
        let u = mean_exit_time(&grid, &reference_model(), &NoiseParams::new(0.0, 0.1, alpha)?)?;
        worst = worst.min(u.min());
    }
    Ok(Check {
        name: "solver.met-positive",
        measured: format!("min u = {}", g(worst)),
        expected: ">= -1e-8".into(),
        pass: worst >= -1e-8,
    })
}

fn mc_symmetric_escape(_: &Ctx) -> CliResult<Check> {
    let mut cfg = RunConfig::default();
    cfg.apply(&Overrides {
        drift: Some(DriftKind::Zero),
        a: Some(0.0),
        eps: Some(1.0),
        alpha: Some(1.5),
        h: Some(0.02),
        dt: Some(1e-3),
        paths: Some(4000),
        seed: Some(7),
        x0: Some(0.0),
        ..Default::default()
    });
    let r = cfg.resolve()?;
    let report = run_mc(&r, Quantity::Escape(EscapeTarget::LeftExtinction))?;
    let z = (report.estimate.mean - 0.5) / report.estimate.stderr;
    Ok(Check {
        name: "mc.symmetric-escape",
        measured: format!("p = {} , z vs 0.5 = {z:+.3}", g(report.estimate.mean)),
        expected: "|z| <= 3".into(),
        pass: z.abs() <= 3.0,
    })
}

fn c01_steady_states(_: &Ctx) -> CliResult<Check> {
    let s = steady_states(&reference_model())?;
    let err = (s.x1 - 0.0).abs().max((s.x2 - 4.0).abs()).max((s.x3 - 5.0).abs());
    Ok(Check {
        name: "c01-steady-states",
        measured: format!("({}, {}, {})", s.x1, s.x2, s.x3),
        expected: "(0, 4, 5) within 1e-12".into(),
        pass: err <= 1e-12,
    })
}

/// MC sample size, time step and seed for the pure-stable comparison.
pub const C02_PATHS: u64 = 100_000;
pub const C02_DT: f64 = 1e-4;
const C02_SEED: u64 = 2024;

fn c02_pure_stable_vs_mc(_: &Ctx) -> CliResult<Check> {
    let grid = symmetric_grid(1.0 / 200.0)?;
    let mut measured = Vec::new();
    let mut pass = true;
    for alpha in [0.5, 1.0, 1.5] {
        let noise = NoiseParams::new(0.0, 1.0, alpha)?;
        let u0 = mean_exit_time(&grid, &ZeroDrift, &noise)?.value_at(0.0);
        let horizon = tumorlevy::mc::default_max_time(Some(u0));
        let run = |dt: f64| -> CliResult<tumorlevy::McEstimate> {
            let cfg = SimConfig::new(dt, horizon, C02_PATHS, C02_SEED)?;
            Ok(mc_mean_exit_time(0.0, &ZeroDrift, &noise, (-1.0, 1.0), &cfg)?)
        };
        let fine = run(C02_DT)?;
        let coarse = run(2.0 * C02_DT)?;
        let allowance = (fine.mean - coarse.mean).abs();
        let tol = (0.02 * fine.mean.abs()).max(3.0 * fine.stderr + allowance);
        let diff = (u0 - fine.mean).abs();
        let mut ok = diff <= tol && !fine.unreliable();
        let mut line = format!(
            "alpha={alpha}: solver {} mc {}+-{} (2dt {}) diff {} tol {}",
            g(u0),
            g(fine.mean),
            g(fine.stderr),
            g(coarse.mean),
            g(diff),
            g(tol)
        );
        if alpha == 1.0 {
            let target_gap = (u0 - 1.0).abs();
            ok &= target_gap <= 0.02;
            line.push_str(&format!(" |u-1.00| {}", g(target_gap)));
        }
        pass &= ok;
        measured.push(line);
    }
    Ok(Check {
        name: "c02-pure-stable-vs-mc",
        measured: measured.join("; "),
        expected: "diff <= max(2%, 3 se + |mc(dt)-mc(2dt)|); alpha=1 within 2% of 1.00".into(),
        pass,
    })
}

fn c03_gaussian_exact(_: &Ctx) -> CliResult<Check> {
    let grid = symmetric_grid(1.0 / 200.0)?;
    let noise = NoiseParams::new(1.0, 0.0, 1.0)?;
    let problem = ExitProblem::new(&grid, &ZeroDrift, &noise, Scheme::Corrected)?;
    let u = problem.mean_exit_time()?;
    let p = problem.escape_probability(EscapeTarget::LeftExtinction)?;
    let max_dev = |f: &SolutionField, exact: &dyn Fn(f64) -> f64| {
        f.nodes().map(|(x, v)| (v - exact(x)).abs()).fold(0.0, f64::max)
    };
    let eu = max_dev(&u, &|x| 1.0 - x * x);
    let ep = max_dev(&p, &|x| (1.0 - x) / 2.0);
    Ok(Check {
        name: "c03-gaussian-exact",
        measured: format!("max|u-(1-x^2)| = {}, max|p-(1-x)/2| = {}", g(eu), g(ep)),
        expected: "both <= 1e-3".into(),
        pass: eu <= 1e-3 && ep <= 1e-3,
    })
}

fn c04_duality(_: &Ctx) -> CliResult<Check> {
    let grid = tumor_grid(0.01)?;
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for a in [0.0, 0.5] {
        for eps in [0.1, 0.5] {
            for alpha in [0.5, 1.0, 1.5] {
                let noise = NoiseParams::new(a, eps, alpha)?;
                let problem = ExitProblem::new(&grid, &reference_model(), &noise, Scheme::Corrected)?;
                let l = problem.escape_probability(EscapeTarget::LeftExtinction)?;
                let r = problem.escape_probability(EscapeTarget::RightMalignant)?;
                for (x, y) in l.interior.iter().zip(&r.interior) {
                    worst = worst.max((x + y - 1.0).abs());
                }
                cases += 1;
            }
        }
    }
    Ok(Check {
        name: "c04-duality",
        measured: format!("max |p_l + p_r - 1| = {} over {cases} cases", g(worst)),
        expected: "<= 1e-8".into(),
        pass: worst <= 1e-8,
    })
}

fn c05_order(_: &Ctx) -> CliResult<Check> {
    let noise = NoiseParams::new(0.5, 0.5, 1.5)?;
    let fields: Vec<SolutionField> = [0.05, 0.025, 0.0125]
        .iter()
        .map(|&h| Ok(mean_exit_time(&tumor_grid(h)?, &reference_model(), &noise)?))
        .collect::<CliResult<_>>()?;
    let est = observed_order(&fields[0], &fields[1], &fields[2], 2.5)?;
    let (measured, pass) = match est {
        OrderEstimate::Order(p) => (format!("order {p:.4}"), (1.7..=2.3).contains(&p)),
        OrderEstimate::ConvergedBelowMeasurement => ("below measurement".to_string(), false),
    };
    Ok(Check {
        name: "c05-convergence-order",
        measured,
        expected: "in [1.7, 2.3]".into(),
        pass,
    })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn probe_series(values: &[f64], f: impl Fn(f64) -> CliResult<f64>) -> CliResult<Vec<f64>> {
    values.iter().map(|&v| f(v)).collect()
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

fn c06_met_vs_eps(_: &Ctx) -> CliResult<Check> {
    let grid = tumor_grid(0.01)?;
    let u = probe_series(&[0.1, 0.3, 0.5, 0.7], |eps| {
        let noise = NoiseParams::new(0.0, eps, 1.0)?;
        Ok(mean_exit_time(&grid, &reference_model(), &noise)?.value_at(2.5))
    })?;
    Ok(Check {
        name: "c06-met-vs-eps",
        measured: format!("u(2.5) = [{}]", list(&u)),
        expected: "strictly decreasing in eps".into(),
        pass: strictly_decreasing(&u),
    })
}

fn c07_met_vs_a(_: &Ctx) -> CliResult<Check> {
    let grid = tumor_grid(0.01)?;
    let u = probe_series(&[0.0, 0.25, 0.5], |a| {
        let noise = NoiseParams::new(a, 0.1, 1.5)?;
        Ok(mean_exit_time(&grid, &reference_model(), &noise)?.value_at(2.5))
    })?;
    Ok(Check {
        name: "c07-met-vs-a",
        measured: format!("u(2.5) = [{}]", list(&u)),
        expected: "strictly decreasing in a".into(),
        pass: strictly_decreasing(&u),
    })
}

fn c08_crossing(_: &Ctx) -> CliResult<Check> {
    let grid = tumor_grid(0.01)?;
    let left = |alpha| -> CliResult<SolutionField> {
        let noise = NoiseParams::new(0.0, 0.1, alpha)?;
        Ok(escape_probability(&grid, &reference_model(), &noise, EscapeTarget::LeftExtinction)?)
    };
    let (lo, hi) = (left(0.5)?, left(1.5)?);
    let diff: Vec<(f64, f64)> = lo
        .interior
        .iter()
        .zip(&hi.interior)
        .zip(grid.interior_points())
        .map(|((p05, p15), x)| (x, p15 - p05))
        .collect();
    let first_positive = diff.iter().position(|&(_, d)| d > 0.0);
    let crossing = first_positive
        .and_then(|i| diff[i..].iter().find(|&&(_, d)| d < 0.0))
        .map(|&(x, _)| x);
    Ok(Check {
        name: "c08-escape-crossing",
        measured: match crossing {
            Some(x) => format!("p(1.5)-p(0.5) turns negative at x = {x:.2}"),
            None => "no sign change".into(),
        },
        expected: "positive then negative on (0, 5)".into(),
        pass: crossing.is_some(),
    })
}

fn c09_escape_vs_eps(_: &Ctx) -> CliResult<Check> {
    let grid = tumor_grid(0.01)?;
    let probes = [1.0, 2.5, 4.0];
    let mut per_eps = Vec::new();
    for eps in [0.1, 0.3, 0.5, 0.7] {
        let noise = NoiseParams::new(0.0, eps, 1.0)?;
        let p = escape_probability(&grid, &reference_model(), &noise, EscapeTarget::LeftExtinction)?;
        per_eps.push(probes.map(|x| p.value_at(x)));
    }
    let mut decreasing = 0;
    let mut measured = Vec::new();
    for (k, x) in probes.iter().enumerate() {
        let series: Vec<f64> = per_eps.iter().map(|p| p[k]).collect();
        if strictly_decreasing(&series) {
            decreasing += 1;
        }
        measured.push(format!("x={x}: [{}]", list(&series)));
    }
    Ok(Check {
        name: "c09-escape-vs-eps",
        measured: format!("{decreasing}/3 decreasing; {}", measured.join("; ")),
        expected: "decreasing at >= 2 of 3 probes".into(),
        pass: decreasing >= 2,
    })
}

fn c10_sampler(_: &Ctx) -> CliResult<Check> {
    let mut worst = 0.0_f64;
    let mut measured = Vec::new();
    for (k, alpha) in [0.5, 1.0, 1.5].into_iter().enumerate() {
        let dev = empirical_cf_check(alpha, 1_000_000, &[0.5, 1.0, 2.0], 11 + k as u64)?;
        worst = worst.max(dev);
        measured.push(format!("alpha={alpha}: {}", g(dev)));
    }
    Ok(Check {
        name: "c10-sampler-cf",
        measured: measured.join(", "),
        expected: "< 0.005".into(),
        pass: worst < 0.005,
    })
}

fn c11_special(ctx: &Ctx) -> CliResult<Check> {
    let z0 = (ctx.zeta(0.0)? + 0.5).abs();
    let zm1 = (ctx.zeta(-1.0)? + 1.0 / 12.0).abs();
    let gh = (gamma_fn(0.5)? - PI.sqrt()).abs();
    let mut rec = 0.0_f64;
    for x in [0.3, 2.7, 7.5] {
        let lhs = gamma_fn(x + 1.0)?;
        rec = rec.max(((lhs - x * gamma_fn(x)?) / lhs).abs());
    }
    Ok(Check {
        name: "c11-special-functions",
        measured: format!(
            "zeta(0) err {}, zeta(-1) err {}, gamma(1/2) err {}, recurrence rel err {}",
            g(z0),
            g(zm1),
            g(gh),
            g(rec)
        ),
        expected: "zeta <= 1e-10, gamma <= 1e-12, recurrence <= 1e-12".into(),
        pass: z0 <= 1e-10 && zm1 <= 1e-10 && gh <= 1e-12 && rec <= 1e-12,
    })
}

/// Report of the determinism run under a pool of `workers` threads.
pub fn determinism_report(workers: usize) -> CliResult<String> {
    let mut cfg = RunConfig::default();
    cfg.apply(&Overrides {
        a: Some(0.5),
        eps: Some(0.5),
        alpha: Some(1.5),
        h: Some(0.05),
        dt: Some(1e-3),
        paths: Some(4000),
        seed: Some(99),
        x0: Some(2.5),
        ..Default::default()
    });
    let r = cfg.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config(e.to_string()))?;
    pool.install(|| crate::commands::cmd_mc(&r, Quantity::MeanExitTime))
}

fn c12_determinism(_: &Ctx) -> CliResult<Check> {
    let reports = [
        determinism_report(1)?,
        determinism_report(8)?,
        determinism_report(1)?,
        determinism_report(8)?,
    ];
    let same = reports.iter().all(|r| r == &reports[0]);
    Ok(Check {
        name: "c12-determinism",
        measured: format!(
            "{} distinct report(s) over 2 runs each at 1 and 8 workers",
            if same { 1 } else { 2 }
        ),
        expected: "1 distinct report".into(),
        pass: same,
    })
}
