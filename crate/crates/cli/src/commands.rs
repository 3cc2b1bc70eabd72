//! Subcommand implementations. Each returns the rendered output; writing it
//! somewhere is the caller's business.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tumorlevy::mc::{mc_escape_probability, mc_mean_exit_time};
use tumorlevy::{EscapeTarget, ExitProblem, McEstimate, NoiseParams, SimConfig, SolutionField};

use crate::config::Resolved;
use crate::csvout::{fmt_value, CsvDoc};
use crate::error::{CliError, CliResult};
use crate::plot::{line_plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    MeanExitTime,
    Escape(EscapeTarget),
}

impl Quantity {
    pub fn column(self) -> &'static str {
        match self {
            Self::MeanExitTime => "u",
            Self::Escape(_) => "p",
        }
    }

    fn label(self) -> String {
        match self {
            Self::MeanExitTime => "met".into(),
            Self::Escape(t) => format!("escape-{t}"),
        }
    }
}

fn solve(r: &Resolved, q: Quantity) -> CliResult<SolutionField> {
    let problem = ExitProblem::new(&r.grid, &r.drift, &r.noise, r.scheme)?;
    let field = match q {
        Quantity::MeanExitTime => problem.mean_exit_time()?,
        Quantity::Escape(t) => problem.escape_probability(t)?,
    };
    for w in &field.warnings {
        log::warn!("{w}");
    }
    Ok(field)
}

fn field_csv(r: &Resolved, q: Quantity, command: &str) -> CliResult<(CsvDoc, SolutionField)> {
    let field = solve(r, q)?;
    let mut doc = CsvDoc::new(&["x", q.column()]);
    doc.echo(command, r);
    if let Quantity::Escape(t) = q {
        doc.comment(format!("target: {t}"));
    }
    doc.comment(format!("relative_residual: {:e}", field.residual));
    for (x, v) in field.nodes() {
        doc.push(vec![x, v]);
    }
    Ok((doc, field))
}

/// Mean exit time at every node, endpoints included.
pub fn cmd_met(r: &Resolved) -> CliResult<String> {
    Ok(field_csv(r, Quantity::MeanExitTime, "met")?.0.render())
}

/// Escape probability into `target` at every node, endpoints included.
pub fn cmd_escape(r: &Resolved, target: EscapeTarget) -> CliResult<String> {
    Ok(field_csv(r, Quantity::Escape(target), "escape")?.0.render())
}

/// SVG of a single field, for `--format svg`.
pub fn field_svg(r: &Resolved, q: Quantity) -> CliResult<String> {
    let field = solve(r, q)?;
    let series = [Series {
        label: q.label(),
        points: field.nodes().collect(),
    }];
    Ok(line_plot(&q.label(), "x", q.column(), &series))
}

/// Monte Carlo estimate next to the solver value at the nearest node.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub quantity: Quantity,
    pub x0: f64,
    pub node_x: f64,
    pub estimate: McEstimate,
    pub solver: f64,
    pub dt: f64,
    pub max_time: f64,
    pub seed: u64,
}

impl McReport {
    /// Discrepancy in standard errors; infinite when the MC variance is zero
    /// but the values differ.
    pub fn z(&self) -> f64 {
        let diff = self.estimate.mean - self.solver;
        if self.estimate.stderr > 0.0 {
            diff / self.estimate.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

impl fmt::Display for McReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.estimate;
        write!(
            f,
            "quantity={} x0={} node={} estimate={} stderr={} censored={}/{} solver={} z={:+.3} dt={} max_time={} seed={} reliable={}",
            self.quantity.label(),
            self.x0,
            fmt_value(self.node_x),
            fmt_value(e.mean),
            fmt_value(e.stderr),
            e.n_censored,
            e.n_paths,
            fmt_value(self.solver),
            self.z(),
            self.dt,
            fmt_value(self.max_time),
            self.seed,
            if e.unreliable() { "no" } else { "yes" }
        )
    }
}

/// Starting point for path simulation: configured, else the midpoint node.
pub fn mc_start(r: &Resolved) -> f64 {
    r.config
        .mc
        .x0
        .unwrap_or_else(|| r.grid.x(r.grid.midpoint_index()))
}

pub fn run_mc(r: &Resolved, q: Quantity) -> CliResult<McReport> {
    let x0 = mc_start(r);
    let problem = ExitProblem::new(&r.grid, &r.drift, &r.noise, r.scheme)?;
    let node = r.grid.nearest_node(x0);
    let met = problem.mean_exit_time()?;
    let solver = match q {
        Quantity::MeanExitTime => met.at_node(node),
        Quantity::Escape(t) => problem.escape_probability(t)?.at_node(node),
    };
    let max_time = r.max_time(Some(met.at_node(node)));
    let mc = &r.config.mc;
    let cfg = SimConfig::new(mc.dt, max_time, mc.n_paths, mc.base_seed)
        .map_err(|e| CliError::config(e.to_string()))?;
    let bounds = (r.grid.c(), r.grid.d());
    let estimate = match q {
        Quantity::MeanExitTime => mc_mean_exit_time(x0, &r.drift, &r.noise, bounds, &cfg)?,
        Quantity::Escape(t) => mc_escape_probability(x0, &r.drift, &r.noise, bounds, &cfg, t)?,
    };
    Ok(McReport {
        quantity: q,
        x0,
        node_x: r.grid.x(node),
        estimate,
        solver,
        dt: mc.dt,
        max_time,
        seed: mc.base_seed,
    })
}

/// Single-line report for `mc`.
pub fn cmd_mc(r: &Resolved, q: Quantity) -> CliResult<String> {
    Ok(format!("{}\n", run_mc(r, q)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    A,
    Epsilon,
    Alpha,
    X0,
}

impl std::str::FromStr for SweepParam {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "a" => Ok(Self::A),
            "epsilon" | "eps" => Ok(Self::Epsilon),
            "alpha" => Ok(Self::Alpha),
            "x0" => Ok(Self::X0),
            other => Err(format!("cannot sweep '{other}' (a|epsilon|alpha|x0)")),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "a",
            Self::Epsilon => "epsilon",
            Self::Alpha => "alpha",
            Self::X0 => "x0",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

fn swap_noise(base: &NoiseParams, param: SweepParam, v: f64) -> tumorlevy::Result<NoiseParams> {
    let (mut a, mut eps, mut alpha) = (base.a, base.epsilon, base.alpha);
    match param {
        SweepParam::A => a = v,
        SweepParam::Epsilon => eps = v,
        SweepParam::Alpha => alpha = v,
        SweepParam::X0 => {}
    }
    NoiseParams::new(a, eps, alpha)
}

impl SweepSpec {
    /// Per-value configurations, rejected up front if any value is invalid.
    fn variants(&self, base: &Resolved) -> CliResult<Vec<Resolved>> {
        if self.values.is_empty() {
            return Err(CliError::config("sweep needs at least one value"));
        }
        self.values
            .iter()
            .map(|&v| {
                if self.param == SweepParam::X0 {
                    if !(v > base.grid.c() && v < base.grid.d()) {
                        return Err(CliError::config(format!(
                            "x0={v} outside ({}, {})",
                            base.grid.c(),
                            base.grid.d()
                        )));
                    }
                    return Ok(base.clone());
                }
                let noise = swap_noise(&base.noise, self.param, v)
                    .map_err(|e| CliError::config(format!("{}={v}: {e}", self.param)))?;
                Ok(base.with_noise(noise))
            })
            .collect()
    }
}

/// Sweep output. `failure` is set when a point failed; `csv` then holds the
/// rows computed before it followed by a partial-output marker.
#[derive(Debug)]
pub struct SweepOutput {
    pub csv: String,
    pub failure: Option<CliError>,
}

fn sweep_doc(command: &str, base: &Resolved, spec: &SweepSpec, q: Quantity) -> CsvDoc {
    let mut doc = CsvDoc::new(&["swept_value", "x", "value"]);
    doc.echo(command, base);
    doc.comment(format!("quantity: {}", q.label()));
    let values: Vec<String> = spec.values.iter().map(|v| v.to_string()).collect();
    doc.comment(format!("swept: {}={}", spec.param, values.join(",")));
    doc
}

/// One curve per swept value (for `x0`, one row at the node nearest each
/// start point), computed in parallel and emitted in input order.
pub fn cmd_sweep(base: &Resolved, spec: &SweepSpec, q: Quantity) -> CliResult<SweepOutput> {
    let variants = spec.variants(base)?;
    let mut doc = sweep_doc("sweep", base, spec, q);
    let curves: Vec<CliResult<Vec<(f64, f64)>>> = if spec.param == SweepParam::X0 {
        let field = match solve(base, q) {
            Ok(f) => f,
            Err(e) => {
                return Ok(SweepOutput {
                    csv: partial(doc, &format!("solve: {e}")),
                    failure: Some(e),
                })
            }
        };
        spec.values
            .iter()
            .map(|&x0| {
                let j = field.grid.nearest_node(x0);
                Ok(vec![(field.grid.x(j), field.at_node(j))])
            })
            .collect()
    } else {
        variants
            .par_iter()
            .map(|r| Ok(solve(r, q)?.nodes().collect()))
            .collect()
    };
    for (&v, curve) in spec.values.iter().zip(curves) {
        match curve {
            Ok(points) => {
                for (x, y) in points {
                    doc.push(vec![v, x, y]);
                }
            }
            Err(e) => {
                let marker = format!("swept_value={v}: {e}");
                return Ok(SweepOutput {
                    csv: partial(doc, &marker),
                    failure: Some(e),
                });
            }
        }
    }
    Ok(SweepOutput {
        csv: doc.render(),
        failure: None,
    })
}

fn partial(doc: CsvDoc, why: &str) -> String {
    let mut text = doc.render();
    text.push_str(&format!("# PARTIAL OUTPUT: aborted at {why}\n"));
    text
}

/// How a figure preset lays out its panels and curves.
#[derive(Debug, Clone, Copy)]
enum Layout {
    /// Panels over epsilon, curves over alpha, `a` fixed.
    Eps { a: f64 },
    /// Panels over alpha, curves over epsilon, `a` fixed.
    Alpha { a: f64 },
    /// Panels over (epsilon, alpha) pairs, curves over `a`.
    Pairs,
}

pub const DEFAULT_ALPHAS: [f64; 4] = [0.1, 0.5, 1.0, 1.5];
pub const DEFAULT_EPSILONS: [f64; 4] = [0.1, 0.3, 0.5, 0.7];
pub const DEFAULT_AS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

const PANEL_EPS: [f64; 4] = [0.1, 0.3, 0.5, 0.7];
const PANEL_ALPHA: [f64; 4] = [0.1, 0.5, 1.0, 1.5];
const PANEL_PAIRS: [(f64, f64); 4] = [(0.1, 0.5), (0.1, 1.5), (0.5, 0.5), (0.5, 1.5)];

pub const PRESETS: [&str; 10] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
];

fn preset(name: &str) -> CliResult<(Quantity, Layout)> {
    let met = Quantity::MeanExitTime;
    let esc = Quantity::Escape(EscapeTarget::LeftExtinction);
    Ok(match name {
        "fig2" => (met, Layout::Eps { a: 0.0 }),
        "fig3" => (met, Layout::Alpha { a: 0.0 }),
        "fig4" => (met, Layout::Eps { a: 0.5 }),
        "fig5" => (met, Layout::Alpha { a: 0.5 }),
        "fig6" => (met, Layout::Pairs),
        "fig7" => (esc, Layout::Eps { a: 0.0 }),
        "fig8" => (esc, Layout::Alpha { a: 0.0 }),
        "fig9" => (esc, Layout::Eps { a: 0.5 }),
        "fig10" => (esc, Layout::Alpha { a: 0.5 }),
        "fig11" => (esc, Layout::Pairs),
        other => {
            return Err(CliError::config(format!(
                "unknown preset '{other}' (one of {})",
                PRESETS.join(", ")
            )))
        }
    })
}

/// One panel of a figure preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub tag: char,
    /// Fixed parameters as printed under the panel.
    pub caption: String,
    pub base: NoiseParams,
    pub spec: SweepSpec,
}

fn panels(layout: Layout) -> Vec<Panel> {
    let tags = ['a', 'b', 'c', 'd'];
    let mk = |i: usize, caption: String, a: f64, eps: f64, alpha: f64, param, values: &[f64]| Panel {
        tag: tags[i],
        caption,
        base: NoiseParams { a, epsilon: eps, alpha },
        spec: SweepSpec {
            param,
            values: values.to_vec(),
        },
    };
    match layout {
        Layout::Eps { a } => PANEL_EPS
            .iter()
            .enumerate()
            .map(|(i, &eps)| {
                mk(i, format!("a={a} epsilon={eps}"), a, eps, 1.0, SweepParam::Alpha, &DEFAULT_ALPHAS)
            })
            .collect(),
        Layout::Alpha { a } => PANEL_ALPHA
            .iter()
            .enumerate()
            .map(|(i, &alpha)| {
                mk(i, format!("a={a} alpha={alpha}"), a, 0.1, alpha, SweepParam::Epsilon, &DEFAULT_EPSILONS)
            })
            .collect(),
        Layout::Pairs => PANEL_PAIRS
            .iter()
            .enumerate()
            .map(|(i, &(eps, alpha))| {
                mk(i, format!("epsilon={eps} alpha={alpha}"), 0.0, eps, alpha, SweepParam::A, &DEFAULT_AS)
            })
            .collect(),
    }
}

/// Panels of a preset, for callers that want the parameters without solving.
pub fn preset_panels(name: &str) -> CliResult<(Quantity, Vec<Panel>)> {
    let (q, layout) = preset(name)?;
    Ok((q, panels(layout)))
}

/// Files produced by a figure preset, relative to the output directory.
#[derive(Debug)]
pub struct FigureOutput {
    pub files: Vec<(PathBuf, String)>,
    pub failure: Option<CliError>,
}

/// Every panel of `name` as a long-format CSV (plus an SVG when `svg`),
/// solved on the base configuration's model, domain and scheme.
pub fn cmd_figure(name: &str, base: &Resolved, svg: bool) -> CliResult<FigureOutput> {
    let (q, panels) = preset_panels(name)?;
    let results: Vec<(Panel, CliResult<SweepOutput>)> = panels
        .into_par_iter()
        .map(|p| {
            let r = base.with_noise(p.base);
            let out = sweep_panel(name, &p, &r, q);
            (p, out)
        })
        .collect();
    let mut files = Vec::new();
    for (p, out) in results {
        let out = out?;
        let stem = format!("{name}{}", p.tag);
        if svg && out.failure.is_none() {
            files.push((PathBuf::from(format!("{stem}.svg")), panel_svg(&p, q, &out.csv)));
        }
        files.push((PathBuf::from(format!("{stem}.csv")), out.csv));
        if out.failure.is_some() {
            return Ok(FigureOutput {
                files,
                failure: out.failure,
            });
        }
    }
    Ok(FigureOutput {
        files,
        failure: None,
    })
}

fn sweep_panel(name: &str, p: &Panel, r: &Resolved, q: Quantity) -> CliResult<SweepOutput> {
    let mut out = cmd_sweep(r, &p.spec, q)?;
    // splice the panel metadata in after the schema line
    let meta = format!(
        "# figure: {name}({}) {}\n# curve values for {}: default set, not given per panel\n",
        p.tag, p.caption, p.spec.param
    );
    let split = out.csv.find('\n').map_or(0, |i| i + 1);
    out.csv.insert_str(split, &meta);
    Ok(out)
}

fn panel_svg(p: &Panel, q: Quantity, csv: &str) -> String {
    let rows = crate::csvout::parse_rows(csv);
    let series: Vec<Series> = p
        .spec
        .values
        .iter()
        .map(|&v| Series {
            label: format!("{}={v}", p.spec.param),
            points: rows
                .iter()
                .filter(|r| r[0] == v)
                .map(|r| (r[1], r[2]))
                .collect(),
        })
        .collect();
    line_plot(&format!("({}) {}", p.tag, p.caption), "x", q.column(), &series)
}

/// Write `text` to `path`, creating parent directories.
pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}
