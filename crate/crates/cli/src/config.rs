//! Run configuration: a JSON file with `model`, `noise`, `domain`, `mc`,
//! `solver` and `output` sections, every key overridable from the command
//! line. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tumorlevy::mc::default_max_time;
use tumorlevy::{steady_states, Drift, Grid, ModelParams, NoiseParams, Scheme, ZeroDrift};

use crate::error::{CliError, CliResult};

/// Bumped whenever CSV columns or header layout change.
pub const SCHEMA_VERSION: &str = "tumorlevy-csv/1";

/// Grid points across the domain when `h` is not given.
pub const DEFAULT_STEPS: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DriftKind {
    #[default]
    Tumor,
    Zero,
}

impl std::str::FromStr for DriftKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tumor" => Ok(Self::Tumor),
            "zero" => Ok(Self::Zero),
            other => Err(format!("unknown drift '{other}' (tumor|zero)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub drift: DriftKind,
    pub theta: f64,
    pub beta: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            drift: DriftKind::Tumor,
            theta: 0.1,
            beta: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub a: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            a: 0.5,
            epsilon: 0.5,
            alpha: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSection {
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub dt: f64,
    pub n_paths: u64,
    pub max_time: Option<f64>,
    pub base_seed: u64,
    pub x0: Option<f64>,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            n_paths: 10_000,
            max_time: None,
            base_seed: 0,
            x0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// `corrected` or `uncorrected`
    pub scheme: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            scheme: Scheme::Corrected.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub noise: NoiseSection,
    pub domain: DomainSection,
    pub mc: McSection,
    pub solver: SolverSection,
    pub output: OutputSection,
}

/// Command-line values that replace config-file entries when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub drift: Option<DriftKind>,
    pub theta: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub eps: Option<f64>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub h: Option<f64>,
    pub out: Option<String>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub paths: Option<u64>,
    pub max_time: Option<f64>,
    pub x0: Option<f64>,
    pub scheme: Option<Scheme>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($src:expr, $dst:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        set!(o.drift, self.model.drift);
        set!(o.theta, self.model.theta);
        set!(o.beta, self.model.beta);
        set!(o.a, self.noise.a);
        set!(o.eps, self.noise.epsilon);
        set!(o.alpha, self.noise.alpha);
        set!(o.dt, self.mc.dt);
        set!(o.paths, self.mc.n_paths);
        set!(o.seed, self.mc.base_seed);
        if o.c.is_some() {
            self.domain.c = o.c;
        }
        if o.d.is_some() {
            self.domain.d = o.d;
        }
        if o.h.is_some() {
            self.domain.h = o.h;
        }
        if o.max_time.is_some() {
            self.mc.max_time = o.max_time;
        }
        if o.x0.is_some() {
            self.mc.x0 = o.x0;
        }
        if o.out.is_some() {
            self.output.path = o.out.clone();
        }
        if let Some(s) = o.scheme {
            self.solver.scheme = s.to_string();
        }
    }

    /// Validate everything and fill in derived defaults.
    pub fn resolve(&self) -> CliResult<Resolved> {
        let cfg_err = |e: tumorlevy::Error| CliError::config(e.to_string());
        let drift = match self.model.drift {
            DriftKind::Tumor => {
                DriftChoice::Tumor(ModelParams::new(self.model.theta, self.model.beta).map_err(cfg_err)?)
            }
            DriftKind::Zero => DriftChoice::Zero,
        };
        let noise = NoiseParams::new(self.noise.a, self.noise.epsilon, self.noise.alpha)
            .map_err(cfg_err)?;
        let (c, d) = match (self.domain.c, self.domain.d) {
            (Some(c), Some(d)) => (c, d),
            (c, d) => {
                let (dc, dd) = match drift {
                    DriftChoice::Tumor(p) => {
                        let s = steady_states(&p).map_err(cfg_err)?;
                        (s.x1, s.x3)
                    }
                    DriftChoice::Zero => (-1.0, 1.0),
                };
                (c.unwrap_or(dc), d.unwrap_or(dd))
            }
        };
        let h = self.domain.h.unwrap_or((d - c) / DEFAULT_STEPS);
        let grid = Grid::new(c, d, h).map_err(cfg_err)?;
        let scheme: Scheme = self.solver.scheme.parse().map_err(CliError::config)?;
        if !(self.mc.dt > 0.0) {
            return Err(CliError::config(format!("mc.dt={} must be positive", self.mc.dt)));
        }
        if self.mc.n_paths < 1 {
            return Err(CliError::config("mc.n_paths must be at least 1"));
        }
        if let Some(t) = self.mc.max_time {
            if !(t >= 100.0 * self.mc.dt) {
                return Err(CliError::config(format!("mc.max_time={t} must be at least 100 dt")));
            }
        }
        if let Some(x0) = self.mc.x0 {
            if !(x0 > c && x0 < d) {
                return Err(CliError::config(format!("mc.x0={x0} outside ({c}, {d})")));
            }
        }
        Ok(Resolved {
            config: self.with_domain(c, d, h),
            drift,
            noise,
            grid,
            scheme,
        })
    }

    fn with_domain(&self, c: f64, d: f64, h: f64) -> Self {
        let mut out = self.clone();
        out.domain = DomainSection {
            c: Some(c),
            d: Some(d),
            h: Some(h),
        };
        out
    }

    /// Single-line JSON, suitable for feeding back through `--config`.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Drift selected by the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftChoice {
    Tumor(ModelParams),
    Zero,
}

impl Drift for DriftChoice {
    fn eval(&self, x: f64) -> tumorlevy::Result<f64> {
        match self {
            Self::Tumor(p) => p.eval(x),
            Self::Zero => ZeroDrift.eval(x),
        }
    }

    fn describe(&self) -> String {
        match self {
            Self::Tumor(p) => p.describe(),
            Self::Zero => ZeroDrift.describe(),
        }
    }
}

/// A validated configuration with domain defaults filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// The input config with `c`, `d`, `h` made explicit.
    pub config: RunConfig,
    pub drift: DriftChoice,
    pub noise: NoiseParams,
    pub grid: Grid,
    pub scheme: Scheme,
}

impl Resolved {
    /// Horizon for path simulation: configured, or 100 times the solver's
    /// exit-time estimate.
    pub fn max_time(&self, solver_u: Option<f64>) -> f64 {
        self.config.mc.max_time.unwrap_or_else(|| default_max_time(solver_u))
    }

    pub fn with_noise(&self, noise: NoiseParams) -> Self {
        let mut r = self.clone();
        r.noise = noise;
        r.config.noise = NoiseSection {
            a: noise.a,
            epsilon: noise.epsilon,
            alpha: noise.alpha,
        };
        r
    }
}
