//! Symmetric alpha-stable noise combined with a Brownian part.
//!
//! The driving Levy motion has generating triplet `(0, a, eps * nu_alpha)`
//! with jump measure `nu_alpha(dy) = C_alpha |y|^-(1+alpha) dy`. The
//! normalization `C_alpha` makes the stable part's characteristic exponent
//! exactly `-|lambda|^alpha`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::gamma_fn;

/// Noise data `(a, epsilon, alpha)`.
///
/// `alpha = 2` is rejected: use `a > 0, epsilon = 0` for pure Brownian noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Gaussian diffusion coefficient (variance per unit time).
    pub a: f64,
    /// Jump-noise intensity.
    pub epsilon: f64,
    /// Stability index in (0, 2).
    pub alpha: f64,
}

impl NoiseParams {
    pub fn new(a: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "must be finite and >= 0",
            });
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "must be finite and >= 0",
            });
        }
        check_alpha(alpha)?;
        if a == 0.0 && epsilon == 0.0 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "a and epsilon cannot both be zero",
            });
        }
        if epsilon > 1.0 {
            log::warn!("epsilon={epsilon} is above the usual intensity range [0, 1]");
        }
        Ok(Self { a, epsilon, alpha })
    }

    pub fn is_pure_gaussian(&self) -> bool {
        self.epsilon == 0.0
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "0 < alpha < 2",
        })
    }
}

/// `C_alpha = alpha Gamma((1+alpha)/2) / (2^(1-alpha) sqrt(pi) Gamma(1-alpha/2))`
pub fn stable_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let num = alpha * gamma_fn((1.0 + alpha) / 2.0)?;
    let den = 2f64.powf(1.0 - alpha) * PI.sqrt() * gamma_fn(1.0 - alpha / 2.0)?;
    Ok(num / den)
}

/// Density of `nu_alpha` at jump size `y`.
pub fn jump_density(y: f64, alpha: f64) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::Domain {
            what: "jump_density",
            value: y,
            domain: "y != 0",
        });
    }
    Ok(stable_constant(alpha)? * y.abs().powf(-(1.0 + alpha)))
}

/// `eta(lambda) = -a lambda^2 / 2 - eps |lambda|^alpha`.
///
/// The imaginary part is zero because the noise is symmetric with no drift.
pub fn characteristic_exponent(lambda: f64, n: &NoiseParams) -> Complex64 {
    let re = -n.a * lambda * lambda / 2.0 - n.epsilon * lambda.abs().powf(n.alpha);
    Complex64::new(re, 0.0)
}

const CAUCHY_GUARD: f64 = 1e-9;

/// Chambers-Mallows-Stuck transform for a standard symmetric stable law with
/// characteristic function `exp(-|lambda|^alpha)`.
///
/// `v` must be uniform on (-pi/2, pi/2) and `w` exponential with mean 1.
pub fn sample_standard_stable(alpha: f64, v: f64, w: f64) -> f64 {
    if (alpha - 1.0).abs() < CAUCHY_GUARD {
        return v.tan();
    }
    let inv = 1.0 / alpha;
    (alpha * v).sin() / v.cos().powf(inv) * ((((1.0 - alpha) * v).cos()) / w).powf((1.0 - alpha) * inv)
}

/// Draw one standard symmetric stable variate from `rng`.
pub fn draw_standard_stable<R: rand::Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    use rand_distr::{Distribution, Exp1};
    // open interval: reject the endpoint -pi/2 produced by a zero uniform
    let v = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break PI * u - FRAC_PI_2;
        }
    };
    let w: f64 = Exp1.sample(rng);
    sample_standard_stable(alpha, v, w)
}
