//! Solver against exact solutions that do not go through the library's own
//! special functions.

use tumorlevy::solver::{mean_exit_time_with, ExitProblem};
use tumorlevy::{
    build_grid, escape_probability, mean_exit_time, EscapeTarget, NoiseParams, Scheme, ZeroDrift,
};

/// Tabulated Gamma values.
const GAMMA_0_75: f64 = 1.225_416_702_465_177_6;
const GAMMA_1_25: f64 = 0.906_402_477_055_477_1;
const GAMMA_1_5: f64 = 0.886_226_925_452_758_0;
const GAMMA_1_75: f64 = 0.919_062_526_848_883_2;

/// Expected exit time of the unit-intensity stable process from the center
/// of (-1, 1): sqrt(pi) / (2^alpha Gamma(1 + alpha/2) Gamma((1 + alpha)/2)).
fn center_exit_time(alpha: f64) -> f64 {
    let (g1, g2) = if alpha == 0.5 {
        (GAMMA_1_25, GAMMA_0_75)
    } else if alpha == 1.0 {
        (GAMMA_1_5, 1.0)
    } else if alpha == 1.5 {
        (GAMMA_1_75, GAMMA_1_25)
    } else {
        unreachable!("no tabulated values for alpha={alpha}")
    };
    std::f64::consts::PI.sqrt() / (2f64.powf(alpha) * g1 * g2)
}

fn pure_stable(alpha: f64) -> NoiseParams {
    NoiseParams::new(0.0, 1.0, alpha).unwrap()
}

fn center_error(alpha: f64, h: f64, scheme: Scheme) -> f64 {
    let grid = build_grid(-1.0, 1.0, h).unwrap();
    let u = mean_exit_time_with(&grid, &ZeroDrift, &pure_stable(alpha), scheme).unwrap();
    (u.value_at(0.0) - center_exit_time(alpha)).abs()
}

#[test]
fn center_values_match_closed_form() {
    for (alpha, rel) in [(0.5, 3e-3), (1.0, 3e-3), (1.5, 3e-3)] {
        let err = center_error(alpha, 0.01, Scheme::Corrected) / center_exit_time(alpha);
        assert!(err < rel, "alpha={alpha}: relative error {err:e}");
    }
}

#[test]
fn profile_matches_closed_form() {
    // u(x) = u(0) (1 - x^2)^(alpha/2); the root singularity at the ends
    // costs accuracy in the last few cells, so those get a looser bound.
    let grid = build_grid(-1.0, 1.0, 0.01).unwrap();
    for alpha in [1.0, 1.5] {
        let u = mean_exit_time(&grid, &ZeroDrift, &pure_stable(alpha)).unwrap();
        let u0 = center_exit_time(alpha);
        let err = |x: f64, v: f64| (v - u0 * (1.0 - x * x).powf(alpha / 2.0)).abs();
        let inner = u
            .nodes()
            .filter(|(x, _)| x.abs() <= 0.9)
            .map(|(x, v)| err(x, v))
            .fold(0.0, f64::max);
        let all = u.nodes().map(|(x, v)| err(x, v)).fold(0.0, f64::max);
        assert!(inner < 5e-3, "alpha={alpha}: {inner:e}");
        assert!(all < 2e-2, "alpha={alpha}: {all:e}");
        assert!(u.min() > 0.0);
    }
}

#[test]
fn correction_beats_plain_scheme() {
    for alpha in [1.0, 1.5] {
        for h in [0.02, 0.01] {
            let c = center_error(alpha, h, Scheme::Corrected);
            let u = center_error(alpha, h, Scheme::Uncorrected);
            assert!(c < u, "alpha={alpha} h={h}: {c:e} vs {u:e}");
        }
    }
}

/// Fails: at alpha = 0.5 the boundary layer dominates and the plain scheme
/// happens to land closer at u(0).
#[test]
#[ignore]
fn correction_beats_plain_scheme_small_alpha() {
    let c = center_error(0.5, 0.01, Scheme::Corrected);
    let u = center_error(0.5, 0.01, Scheme::Uncorrected);
    assert!(c <= u, "{c:e} vs {u:e}");
}

#[test]
fn brownian_limit_is_exact() {
    let grid = build_grid(-1.0, 1.0, 0.005).unwrap();
    let noise = NoiseParams::new(1.0, 0.0, 1.3).unwrap();
    let problem = ExitProblem::new(&grid, &ZeroDrift, &noise, Scheme::Corrected).unwrap();
    let u = problem.mean_exit_time().unwrap();
    let p = problem.escape_probability(EscapeTarget::LeftExtinction).unwrap();
    for ((x, uv), (_, pv)) in u.nodes().zip(p.nodes()) {
        assert!((uv - (1.0 - x * x)).abs() < 1e-10);
        assert!((pv - (1.0 - x) / 2.0).abs() < 1e-10);
    }
}

#[test]
fn brownian_limit_on_asymmetric_interval() {
    // u = (x - c)(d - x) / a for generator (a/2) u''
    let grid = build_grid(-0.5, 1.5, 0.01).unwrap();
    let noise = NoiseParams::new(0.4, 0.0, 1.0).unwrap();
    let u = mean_exit_time(&grid, &ZeroDrift, &noise).unwrap();
    let p = escape_probability(&grid, &ZeroDrift, &noise, EscapeTarget::RightMalignant).unwrap();
    for ((x, uv), (_, pv)) in u.nodes().zip(p.nodes()) {
        assert!((uv - (x + 0.5) * (1.5 - x) / 0.4).abs() < 1e-9, "x={x}");
        assert!((pv - (x + 0.5) / 2.0).abs() < 1e-10, "x={x}");
    }
}
