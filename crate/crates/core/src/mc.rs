//! Monte Carlo estimates of exit times and exit sides by direct simulation of
//! `dX = f(X) dt + dL`, where `L` is Brownian motion with variance `a` per
//! unit time plus an independent symmetric stable process with jump measure
//! `eps nu_alpha`.
//!
//! One Euler step is
//!
//! ```text
//! X' = X + f(X) dt + sqrt(a dt) G + (eps dt)^(1/alpha) S
//! ```
//!
//! with `G` standard normal and `S` standard symmetric stable. The stable
//! increment uses exact self-similarity, so only the drift and the discrete
//! exit monitoring introduce time-step bias.
//!
//! Path `i` draws from a ChaCha8 stream seeded by [`path_seed`]`(base_seed, i)`,
//! so every estimate is a pure function of its inputs no matter how many
//! worker threads execute the paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::levy::{check_alpha, draw_standard_stable, NoiseParams};
use crate::model::Drift;
use crate::solver::EscapeTarget;

/// Censored fraction above which an estimate is flagged unreliable.
pub const CENSOR_LIMIT: f64 = 0.01;
/// Horizon used when no solver estimate of the exit time is available.
pub const DEFAULT_MAX_TIME: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub max_time: f64,
    pub n_paths: u64,
    pub base_seed: u64,
}

impl SimConfig {
    pub fn new(dt: f64, max_time: f64, n_paths: u64, base_seed: u64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "must be positive",
            });
        }
        if !(max_time >= 100.0 * dt) {
            return Err(Error::InvalidParameter {
                name: "max_time",
                value: max_time,
                reason: "must be at least 100 dt",
            });
        }
        if n_paths < 1 {
            return Err(Error::InvalidParameter {
                name: "n_paths",
                value: n_paths as f64,
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            dt,
            max_time,
            n_paths,
            base_seed,
        })
    }

    fn max_steps(&self) -> u64 {
        (self.max_time / self.dt).floor() as u64
    }
}

/// Censoring horizon: 100 times the solver's exit-time estimate when known.
pub fn default_max_time(solver_estimate: Option<f64>) -> f64 {
    match solver_estimate {
        Some(u) if u > 0.0 && u.is_finite() => 100.0 * u,
        _ => DEFAULT_MAX_TIME,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExitSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathOutcome {
    Exited {
        time: f64,
        side: ExitSide,
        /// Landing position; jumps may overshoot well past the boundary.
        position: f64,
    },
    Censored,
}

/// Side of the interval a landing point belongs to, or `None` if still inside.
pub fn landing_side(x: f64, c: f64, d: f64) -> Option<ExitSide> {
    if x <= c {
        Some(ExitSide::Left)
    } else if x >= d {
        Some(ExitSide::Right)
    } else {
        None
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-path seed: `splitmix64(base_seed ^ splitmix64(path_index))`.
pub fn path_seed(base_seed: u64, path_index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(path_index))
}

/// Standard deviation of the Brownian increment over `dt`.
pub fn gaussian_scale(noise: &NoiseParams, dt: f64) -> f64 {
    (noise.a * dt).sqrt()
}

/// Scale of the stable increment over `dt`, `(eps dt)^(1/alpha)`.
pub fn jump_scale(noise: &NoiseParams, dt: f64) -> f64 {
    (noise.epsilon * dt).powf(1.0 / noise.alpha)
}

/// Simulate path `path_index` from `x0` until it leaves `(c, d)` or the
/// horizon passes.
pub fn simulate_exit<D: Drift + ?Sized>(
    x0: f64,
    drift: &D,
    noise: &NoiseParams,
    bounds: (f64, f64),
    cfg: &SimConfig,
    path_index: u64,
) -> Result<PathOutcome> {
    let (c, d) = bounds;
    if !(x0 > c && x0 < d) {
        return Err(Error::StartOutside { x0, c, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(path_seed(cfg.base_seed, path_index));
    let dt = cfg.dt;
    let g_scale = gaussian_scale(noise, dt);
    let j_scale = jump_scale(noise, dt);
    let mut x = x0;
    for k in 0..cfg.max_steps() {
        let mut next = x + drift.eval(x)? * dt;
        if g_scale > 0.0 {
            let g: f64 = StandardNormal.sample(&mut rng);
            next += g_scale * g;
        }
        if j_scale > 0.0 {
            next += j_scale * draw_standard_stable(noise.alpha, &mut rng);
        }
        if let Some(side) = landing_side(next, c, d) {
            return Ok(PathOutcome::Exited {
                time: (k + 1) as f64 * dt,
                side,
                position: next,
            });
        }
        x = next;
    }
    Ok(PathOutcome::Censored)
}

/// Outcomes of paths `0..n_paths`, in index order.
pub fn simulate_paths<D: Drift + ?Sized>(
    x0: f64,
    drift: &D,
    noise: &NoiseParams,
    bounds: (f64, f64),
    cfg: &SimConfig,
) -> Result<Vec<PathOutcome>> {
    (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| simulate_exit(x0, drift, noise, bounds, cfg, i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExitTally {
    pub left: u64,
    pub right: u64,
    pub censored: u64,
}

impl ExitTally {
    pub fn from_outcomes(outcomes: &[PathOutcome]) -> Self {
        let mut t = Self::default();
        for o in outcomes {
            match o {
                PathOutcome::Exited {
                    side: ExitSide::Left,
                    ..
                } => t.left += 1,
                PathOutcome::Exited {
                    side: ExitSide::Right,
                    ..
                } => t.right += 1,
                PathOutcome::Censored => t.censored += 1,
            }
        }
        t
    }

    pub fn total(&self) -> u64 {
        self.left + self.right + self.censored
    }
}

/// Point estimate with standard error and censoring accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub n_censored: u64,
    /// False when fewer than two usable samples make the variance undefined;
    /// `stderr` is then reported as 0.
    pub variance_defined: bool,
}

impl McEstimate {
    pub fn censored_fraction(&self) -> f64 {
        self.n_censored as f64 / self.n_paths as f64
    }

    pub fn unreliable(&self) -> bool {
        self.censored_fraction() > CENSOR_LIMIT || !self.variance_defined
    }
}

/// Compensated (Neumaier) sum; callers pass values in path-index order.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error of exit times over uncensored paths.
pub fn summarize_exit_times(outcomes: &[PathOutcome]) -> McEstimate {
    let times = || {
        outcomes.iter().filter_map(|o| match o {
            PathOutcome::Exited { time, .. } => Some(*time),
            PathOutcome::Censored => None,
        })
    };
    let used = times().count();
    let n_censored = (outcomes.len() - used) as u64;
    let mean = if used > 0 {
        neumaier_sum(times()) / used as f64
    } else {
        f64::NAN
    };
    let (stderr, variance_defined) = if used >= 2 {
        let ss = neumaier_sum(times().map(|t| (t - mean) * (t - mean)));
        ((ss / (used as f64 - 1.0) / used as f64).sqrt(), true)
    } else {
        (0.0, false)
    };
    McEstimate {
        mean,
        stderr,
        n_paths: outcomes.len() as u64,
        n_censored,
        variance_defined,
    }
}

/// Fraction of uncensored paths landing on the `target` side, with binomial
/// standard error.
pub fn summarize_escape(outcomes: &[PathOutcome], target: EscapeTarget) -> McEstimate {
    let tally = ExitTally::from_outcomes(outcomes);
    let used = tally.left + tally.right;
    let hits = match target {
        EscapeTarget::LeftExtinction => tally.left,
        EscapeTarget::RightMalignant => tally.right,
    };
    let (mean, stderr) = if used > 0 {
        let p = hits as f64 / used as f64;
        (p, (p * (1.0 - p) / used as f64).sqrt())
    } else {
        (f64::NAN, 0.0)
    };
    McEstimate {
        mean,
        stderr,
        n_paths: tally.total(),
        n_censored: tally.censored,
        variance_defined: used >= 2,
    }
}

fn log_reliability(what: &str, est: &McEstimate) {
    if est.censored_fraction() > CENSOR_LIMIT {
        log::warn!(
            "{what}: {} of {} paths censored; estimate unreliable",
            est.n_censored,
            est.n_paths
        );
    }
}

pub fn mc_mean_exit_time<D: Drift + ?Sized>(
    x0: f64,
    drift: &D,
    noise: &NoiseParams,
    bounds: (f64, f64),
    cfg: &SimConfig,
) -> Result<McEstimate> {
    let est = summarize_exit_times(&simulate_paths(x0, drift, noise, bounds, cfg)?);
    log_reliability("mean exit time", &est);
    Ok(est)
}

pub fn mc_escape_probability<D: Drift + ?Sized>(
    x0: f64,
    drift: &D,
    noise: &NoiseParams,
    bounds: (f64, f64),
    cfg: &SimConfig,
    target: EscapeTarget,
) -> Result<McEstimate> {
    let est = summarize_escape(&simulate_paths(x0, drift, noise, bounds, cfg)?, target);
    log_reliability("escape probability", &est);
    Ok(est)
}

/// Largest deviation of the empirical characteristic function of standard
/// stable samples from `exp(-|lambda|^alpha)` over `lambdas`.
pub fn empirical_cf_check(alpha: f64, n_samples: usize, lambdas: &[f64], seed: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
            reason: "need at least 10^4 samples",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..n_samples)
        .map(|_| draw_standard_stable(alpha, &mut rng))
        .collect();
    let mut worst = 0.0_f64;
    for &lambda in lambdas {
        let ecf = neumaier_sum(samples.iter().map(|s| (lambda * s).cos())) / n_samples as f64;
        let exact = (-lambda.abs().powf(alpha)).exp();
        worst = worst.max((ecf - exact).abs());
    }
    Ok(worst)
}
