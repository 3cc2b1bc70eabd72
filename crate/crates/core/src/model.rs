//! Deterministic tumor-growth dynamics with immune response.
//!
//! The dimensionless density `x` evolves under
//!
//! ```text
//! dx/dt = x (1 - theta x) - beta x / (x + 1)
//! ```
//!
//! which is the negative gradient of
//!
//! ```text
//! U(x) = -x^2/2 + theta x^3/3 + beta x - beta ln(x + 1).
//! ```
//!
//! For `theta < 1` and `0 < beta < (1 + theta)^2 / (4 theta)` the flow is
//! bistable: `x1 = 0` (extinction) and `x3` (stable tumor) attract, `x2`
//! separates them.
//!
//! The density scale follows `x = (k1/k2) X` as printed in the scaling
//! relations; the same quantity is also described as a density normalized by
//! tissue capacity. Both readings agree on the dimensionless model, so only
//! the printed relation is implemented.

use crate::error::{Error, Result};

const REGIME_TOL: f64 = 1e-12;

/// Dimensionless model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub theta: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(theta: f64, beta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                reason: "must be positive",
            });
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must be positive",
            });
        }
        Ok(Self { theta, beta })
    }

    /// Upper bound on `beta` for bistability, `(1 + theta)^2 / (4 theta)`.
    pub fn beta_bound(&self) -> f64 {
        (1.0 + self.theta).powi(2) / (4.0 * self.theta)
    }

    /// `(1 + theta)^2 - 4 beta theta`
    pub fn discriminant(&self) -> f64 {
        (1.0 + self.theta).powi(2) - 4.0 * self.beta * self.theta
    }

    /// Discriminant is positive beyond rounding noise. Decimal inputs on the
    /// regime boundary (e.g. theta=0.1, beta=3.025) can leave a residue of a
    /// few ulps, which must not count as two distinct roots.
    fn discriminant_positive(&self) -> bool {
        self.discriminant() > REGIME_TOL * (1.0 + self.theta).powi(2)
    }
}

/// Raw kinetic constants before nondimensionalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    /// Tumor proliferation rate, 1/day.
    pub lambda_rate: f64,
    /// Binding rate, 1/day.
    pub k1: f64,
    /// Dissociation rate, 1/day.
    pub k2: f64,
    /// Total cytotoxic-cell level (`Y + Z = E`).
    pub e_total: f64,
}

/// Typical experimental ranges (1/day) for `lambda_rate`, `k1` and `k2`.
pub const LAMBDA_RANGE: (f64, f64) = (0.2, 1.5);
pub const K1_RANGE: (f64, f64) = (0.1, 18.0);
pub const K2_RANGE: (f64, f64) = (0.2, 18.0);

impl ScalingParams {
    /// Validates positivity. Values outside the typical experimental ranges
    /// are accepted and logged.
    pub fn new(lambda_rate: f64, k1: f64, k2: f64, e_total: f64) -> Result<Self> {
        for (name, value) in [
            ("lambda_rate", lambda_rate),
            ("k1", k1),
            ("k2", k2),
            ("e_total", e_total),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be strictly positive",
                });
            }
        }
        let s = Self {
            lambda_rate,
            k1,
            k2,
            e_total,
        };
        for w in s.range_warnings() {
            log::warn!("{w}");
        }
        Ok(s)
    }

    /// Human-readable notes for every field outside its typical range.
    pub fn range_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, value, (lo, hi)) in [
            ("lambda_rate", self.lambda_rate, LAMBDA_RANGE),
            ("k1", self.k1, K1_RANGE),
            ("k2", self.k2, K2_RANGE),
        ] {
            if value < lo || value > hi {
                out.push(format!(
                    "{name}={value} outside typical experimental range [{lo}, {hi}] 1/day"
                ));
            }
        }
        out
    }
}

/// Result of [`nondimensionalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nondimensional {
    pub params: ModelParams,
    /// Dimensionless time is `t = time_scale * t'` with `t'` in days.
    pub time_scale: f64,
    /// Dimensionless density is `x = density_scale * X`.
    pub density_scale: f64,
}

impl Nondimensional {
    pub fn to_raw_density(&self, x: f64) -> f64 {
        x / self.density_scale
    }

    pub fn to_dimensionless_density(&self, raw: f64) -> f64 {
        raw * self.density_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStates {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

fn check_domain(what: &'static str, x: f64) -> Result<()> {
    if x > -1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: x,
            domain: "x > -1",
        })
    }
}

pub fn drift(x: f64, p: &ModelParams) -> Result<f64> {
    check_domain("drift", x)?;
    Ok(x * (1.0 - p.theta * x) - p.beta * x / (x + 1.0))
}

pub fn potential(x: f64, p: &ModelParams) -> Result<f64> {
    check_domain("potential", x)?;
    Ok(-x * x / 2.0 + p.theta * x.powi(3) / 3.0 + p.beta * x - p.beta * x.ln_1p())
}

pub fn is_bistable(p: &ModelParams) -> bool {
    p.theta < 1.0 && p.beta > 0.0 && p.discriminant_positive()
}

/// The three steady states of the bistable regime.
///
/// Errors when the discriminant is not strictly positive or `theta >= 1`;
/// a double root would collapse the exit interval. Also errors for
/// `beta <= 1`, where the middle root is not positive and the ordering
/// `x1 < x2 < x3` fails.
pub fn steady_states(p: &ModelParams) -> Result<SteadyStates> {
    if p.theta >= 1.0 {
        return Err(Error::Regime {
            theta: p.theta,
            beta: p.beta,
            reason: "theta >= 1",
        });
    }
    if !p.discriminant_positive() {
        return Err(Error::Regime {
            theta: p.theta,
            beta: p.beta,
            reason: "discriminant (1+theta)^2 - 4 beta theta <= 0",
        });
    }
    // x2 > 0 iff beta > 1; below that the origin is unstable and the
    // "threshold" root is negative.
    if p.beta <= 1.0 {
        return Err(Error::Regime {
            theta: p.theta,
            beta: p.beta,
            reason: "beta <= 1 puts the threshold state at or below zero",
        });
    }
    let root = p.discriminant().sqrt();
    let two_theta = 2.0 * p.theta;
    Ok(SteadyStates {
        x1: 0.0,
        x2: (1.0 - p.theta - root) / two_theta,
        x3: (1.0 - p.theta + root) / two_theta,
    })
}

pub fn nondimensionalize(s: &ScalingParams) -> Result<Nondimensional> {
    let params = ModelParams::new(s.k2 / s.k1, s.k1 * s.e_total / s.lambda_rate)?;
    Ok(Nondimensional {
        params,
        time_scale: s.lambda_rate,
        density_scale: s.k1 / s.k2,
    })
}

/// A one-dimensional drift field `f(x)`.
///
/// The exit-problem solver and the path simulator accept any implementor, so
/// the tumor model is one instance among user-supplied drifts.
pub trait Drift: Sync {
    fn eval(&self, x: f64) -> Result<f64>;

    /// Short label echoed into output metadata.
    fn describe(&self) -> String {
        "custom".to_string()
    }
}

impl Drift for ModelParams {
    fn eval(&self, x: f64) -> Result<f64> {
        drift(x, self)
    }

    fn describe(&self) -> String {
        format!("tumor(theta={}, beta={})", self.theta, self.beta)
    }
}

/// `f(x) = 0`
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroDrift;

impl Drift for ZeroDrift {
    fn eval(&self, _x: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn describe(&self) -> String {
        "zero".to_string()
    }
}

/// Wraps a closure as a drift.
pub struct FnDrift<F>(pub F);

impl<F> Drift for FnDrift<F>
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval(&self, x: f64) -> Result<f64> {
        Ok((self.0)(x))
    }
}

impl<T: Drift + ?Sized> Drift for &T {
    fn eval(&self, x: f64) -> Result<f64> {
        (**self).eval(x)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference() -> ModelParams {
        ModelParams::new(0.1, 3.0).unwrap()
    }

    #[test]
    fn drift_values() {
        let p = reference();
        assert_eq!(drift(0.0, &p).unwrap(), 0.0);
        assert!(drift(5.0, &p).unwrap().abs() < 1e-12);
        assert!((drift(1.0, &p).unwrap() + 0.6).abs() < 1e-12);
        assert!(matches!(drift(-1.0, &p), Err(Error::Domain { .. })));
        assert!(drift(-1.5, &p).is_err());
    }

    #[test]
    fn potential_zero_and_domain() {
        for (t, b) in [(0.1, 3.0), (0.5, 0.2), (0.9, 1.0)] {
            assert_eq!(potential(0.0, &ModelParams::new(t, b).unwrap()).unwrap(), 0.0);
        }
        assert!(potential(-1.0, &reference()).is_err());
    }

    fn dudx(x: f64, p: &ModelParams) -> f64 {
        let h = 1e-6;
        (potential(x + h, p).unwrap() - potential(x - h, p).unwrap()) / (2.0 * h)
    }

    #[test]
    fn potential_is_antiderivative_of_minus_drift() {
        let p = reference();
        for x in [0.5, 2.5, 4.5] {
            assert!((dudx(x, &p) + drift(x, &p).unwrap()).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn potential_extrema_pattern() {
        let p = reference();
        let s = steady_states(&p).unwrap();
        let d = 1e-3;
        // minima at x1, x3: U' goes - to +; maximum at x2: + to -
        assert!(dudx(s.x1 - d, &p) < 0.0 && dudx(s.x1 + d, &p) > 0.0);
        assert!(dudx(s.x2 - d, &p) > 0.0 && dudx(s.x2 + d, &p) < 0.0);
        assert!(dudx(s.x3 - d, &p) < 0.0 && dudx(s.x3 + d, &p) > 0.0);
    }

    #[test]
    fn steady_states_reference() {
        let s = steady_states(&reference()).unwrap();
        assert_eq!(s.x1, 0.0);
        assert!((s.x2 - 4.0).abs() < 1e-12);
        assert!((s.x3 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn steady_states_regime_errors() {
        // (1 + 0.1)^2 / 0.4 = 3.025 exactly in decimal; guard against rounding
        // landing either side of zero.
        let p = ModelParams::new(0.1, 3.025).unwrap();
        assert!(p.discriminant().abs() < 1e-12);
        assert!(matches!(steady_states(&p), Err(Error::Regime { .. })));
        let p = ModelParams::new(1.5, 0.1).unwrap();
        assert!(matches!(steady_states(&p), Err(Error::Regime { .. })));
        // bistable by the predicate, but x2 < 0
        let p = ModelParams::new(0.5, 0.5).unwrap();
        assert!(is_bistable(&p));
        assert!(matches!(steady_states(&p), Err(Error::Regime { .. })));
    }

    #[test]
    fn bistability_predicate() {
        assert!(is_bistable(&reference()));
        assert!(!is_bistable(&ModelParams::new(0.1, 3.1).unwrap()));
        assert!(!is_bistable(&ModelParams::new(1.0, 0.5).unwrap()));
        assert!(!is_bistable(&ModelParams::new(0.1, 3.025).unwrap()));
    }

    #[test]
    fn rejects_nonpositive_params() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(0.1, -1.0).is_err());
        assert!(ScalingParams::new(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn nondimensionalize_examples() {
        let n = nondimensionalize(&ScalingParams::new(1.0, 1.0, 0.1, 3.0).unwrap()).unwrap();
        assert!((n.params.theta - 0.1).abs() < 1e-15);
        assert!((n.params.beta - 3.0).abs() < 1e-15);
        assert_eq!(n.time_scale, 1.0);

        let n = nondimensionalize(&ScalingParams::new(0.5, 2.0, 0.2, 0.75).unwrap()).unwrap();
        assert!((n.params.theta - 0.1).abs() < 1e-15);
        assert!((n.params.beta - 3.0).abs() < 1e-15);
        assert_eq!(n.time_scale, 0.5);

        let raw = 0.37;
        let x = n.to_dimensionless_density(raw);
        assert!((x - 3.7).abs() < 1e-12);
        assert!((n.to_raw_density(x) - raw).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_kinetics_warn_only() {
        let s = ScalingParams::new(5.0, 40.0, 0.1, 1.0).unwrap();
        assert_eq!(s.range_warnings().len(), 3);
        assert!(ScalingParams::new(1.0, 1.0, 1.0, 1.0)
            .unwrap()
            .range_warnings()
            .is_empty());
    }

    proptest! {
        #[test]
        fn drift_vanishes_at_steady_states(theta in 0.01f64..0.99, frac in 0.01f64..0.99) {
            let bound = ModelParams::new(theta, 1.0).unwrap().beta_bound();
            let p = ModelParams::new(theta, 1.0 + frac * (bound - 1.0)).unwrap();
            prop_assume!(is_bistable(&p));
            let s = steady_states(&p).unwrap();
            prop_assert!(s.x1 < s.x2 && s.x2 < s.x3);
            for x in [s.x1, s.x2, s.x3] {
                // relative to the size of the individual terms
                let scale = 1.0 + x * (1.0 + p.theta * x) + p.beta;
                prop_assert!(drift(x, &p).unwrap().abs() < 1e-12 * scale);
            }
        }

        #[test]
        fn gradient_identity(x in -0.9f64..10.0) {
            let p = reference();
            prop_assert!((dudx(x, &p) + drift(x, &p).unwrap()).abs() < 1e-6);
        }

        #[test]
        fn bistability_monotone_in_beta(theta in 0.01f64..0.99, b1 in 0.0f64..1.0, b2 in 0.0f64..1.0) {
            let bound = (1.0 + theta).powi(2) / (4.0 * theta);
            let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
            let lo = (lo * bound * 1.2).max(1e-9);
            let hi = (hi * bound * 1.2).max(lo);
            let (p_lo, p_hi) = (ModelParams { theta, beta: lo }, ModelParams { theta, beta: hi });
            if is_bistable(&p_hi) {
                prop_assert!(is_bistable(&p_lo));
            }
        }
    }
}
