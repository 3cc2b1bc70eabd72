//! Finite-difference plus punched-hole trapezoid discretization of the
//! generator
//!
//! ```text
//! A u = f u' + (a/2) u'' + eps C_alpha int [u(x+y) - u(x) - 1{|y|<delta} y u'(x)] |y|^-(1+alpha) dy
//! ```
//!
//! on the interior nodes of a [`Grid`]. The part of the integral over the
//! exterior of `(c, d)` is folded into a diagonal sink (and, for escape
//! problems, into the right-hand side); the part over `[c - x, d - x]` is a
//! trapezoid sum with the `k = 0` node removed and both endpoint weights
//! halved. Under the corrected scheme the second-difference coefficient
//! `a/2` becomes `C_h = a/2 - eps C_alpha zeta(alpha - 1) h^(2 - alpha)`,
//! which cancels the leading quadrature error.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::levy::{stable_constant, NoiseParams};
use crate::model::Drift;
use crate::special::riemann_zeta;

use super::grid::Grid;
use super::linalg::DenseMatrix;

/// Which second-difference coefficient to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `C_h = a/2 - eps C_alpha zeta(alpha-1) h^(2-alpha)`
    #[default]
    Corrected,
    /// Plain `a/2`; first-order-ish in the quadrature for most alpha.
    Uncorrected,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "corrected" => Ok(Self::Corrected),
            "uncorrected" => Ok(Self::Uncorrected),
            other => Err(format!("unknown scheme '{other}' (corrected|uncorrected)")),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Corrected => "corrected",
            Self::Uncorrected => "uncorrected",
        })
    }
}

/// Per-row coefficients multiplying the values at the boundary nodes `c`
/// and `d`. They never enter the matrix; right-hand sides use them to lift
/// the exterior data.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryWeights {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// The assembled interior operator together with everything needed to build
/// right-hand sides for either exit problem.
#[derive(Debug, Clone)]
pub struct Operator {
    pub grid: Grid,
    pub scheme: Scheme,
    pub matrix: DenseMatrix,
    pub boundary: BoundaryWeights,
    /// `eps C_alpha / alpha (x_j - c)^-alpha`, the jump rate out of the left side.
    pub sink_left: Vec<f64>,
    /// `eps C_alpha / alpha (d - x_j)^-alpha`
    pub sink_right: Vec<f64>,
    /// Coefficient of the second difference actually used.
    pub diffusion: f64,
}

impl Operator {
    /// Row action of the discrete operator on nodal values, with `left` and
    /// `right` the values at the boundary nodes `c` and `d`.
    pub fn apply(&self, interior: &[f64], left: f64, right: f64) -> Vec<f64> {
        let mut out = self.matrix.mul_vec(interior);
        for (i, v) in out.iter_mut().enumerate() {
            *v += self.boundary.left[i] * left + self.boundary.right[i] * right;
        }
        out
    }

    /// `sink_left + sink_right` per row.
    pub fn total_sink(&self) -> Vec<f64> {
        self.sink_left
            .iter()
            .zip(&self.sink_right)
            .map(|(l, r)| l + r)
            .collect()
    }
}

/// Square system for one boundary-value problem.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    pub grid: Grid,
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl DenseSystem {
    pub fn new(op: &Operator, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != op.matrix.dim() {
            return Err(Error::Dimension(format!(
                "rhs length {} for {} unknowns",
                rhs.len(),
                op.matrix.dim()
            )));
        }
        Ok(Self {
            grid: op.grid,
            matrix: op.matrix.clone(),
            rhs,
        })
    }

    /// Diagnostic dump: one matrix row per line, then a final `rhs` line,
    /// entries space-separated with 17 significant digits. Not a stable format.
    pub fn to_diagnostic_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# dense system n={} c={} d={} h={}",
            self.matrix.dim(),
            self.grid.c(),
            self.grid.d(),
            self.grid.h()
        );
        for i in 0..self.matrix.dim() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        let rhs: Vec<String> = self.rhs.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(s, "rhs {}", rhs.join(" "));
        s
    }
}

/// Collects coefficients for one row, routing boundary nodes to the weight
/// lists.
struct RowSink<'a> {
    grid: &'a Grid,
    row: &'a mut [f64],
    left: f64,
    right: f64,
}

impl RowSink<'_> {
    fn add(&mut self, node: i64, coef: f64) {
        let (jc, jd) = (self.grid.left_index(), self.grid.right_index());
        assert!(
            node >= jc && node <= jd,
            "stencil reference to node {node} outside [{jc}, {jd}]"
        );
        if node == jc {
            self.left += coef;
        } else if node == jd {
            self.right += coef;
        } else {
            self.row[(node - jc - 1) as usize] += coef;
        }
    }
}

/// Assemble the discrete generator for `drift` and `noise` on `grid`.
pub fn assemble_operator<D: Drift + ?Sized>(
    grid: &Grid,
    drift: &D,
    noise: &NoiseParams,
    scheme: Scheme,
) -> Result<Operator> {
    let n = grid.interior_len();
    let h = grid.h();
    let (jc, jd, jm) = (grid.left_index(), grid.right_index(), grid.midpoint_index());
    let alpha = noise.alpha;
    let nonlocal = !noise.is_pure_gaussian();

    let (eps_c, diffusion) = if nonlocal {
        let eps_c = noise.epsilon * stable_constant(alpha)?;
        let diffusion = match scheme {
            Scheme::Corrected => {
                noise.a / 2.0 - eps_c * riemann_zeta(alpha - 1.0)? * h.powf(2.0 - alpha)
            }
            Scheme::Uncorrected => noise.a / 2.0,
        };
        (eps_c, diffusion)
    } else {
        (0.0, noise.a / 2.0)
    };

    // quadrature weight eps C h / |k h|^(1+alpha), indexed by |k|
    let span = (jd - jc) as usize;
    let weights: Vec<f64> = if nonlocal {
        (0..=span)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    eps_c * h / (k as f64 * h).powf(1.0 + alpha)
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut matrix = DenseMatrix::zeros(n);
    let mut left_w = vec![0.0; n];
    let mut right_w = vec![0.0; n];
    let mut sink_left = vec![0.0; n];
    let mut sink_right = vec![0.0; n];

    let lap = diffusion / (h * h);
    for i in 0..n {
        let j = grid.node_of(i);
        let f = drift.eval(grid.x(j))?;
        let adv = f / (2.0 * h);
        let mut sink = RowSink {
            grid,
            row: matrix.row_mut(i),
            left: 0.0,
            right: 0.0,
        };
        let mut diag = -2.0 * lap;
        sink.add(j - 1, lap - adv);
        sink.add(j + 1, lap + adv);

        if nonlocal {
            // distances are exact integer multiples of h
            let to_left = (j - jc) as f64 * h;
            let to_right = (jd - j) as f64 * h;
            sink_left[i] = eps_c / alpha * to_left.powf(-alpha);
            sink_right[i] = eps_c / alpha * to_right.powf(-alpha);
            diag -= sink_left[i] + sink_right[i];

            // one-sided part beyond the symmetric window, then the window
            let (outer, half_width) = if j >= jm {
                ((jc - j, j - jd), jd - j)
            } else {
                ((j - jc, jd - j), j - jc)
            };

            let (lo, hi) = outer;
            // lo == hi only at the midpoint row, where the range has zero length
            if lo < hi {
                for k in lo..=hi {
                    let mut w = weights[k.unsigned_abs() as usize];
                    if k == lo || k == hi {
                        w *= 0.5;
                    }
                    sink.add(j + k, w);
                    diag -= w;
                }
            }

            // symmetric window k in [-K, K] \ {0}, visited as +-k pairs
            let mut compensator = 0.0;
            for k in 1..=half_width {
                let mut w = weights[k as usize];
                if k == half_width {
                    w *= 0.5;
                }
                sink.add(j + k, w);
                sink.add(j - k, w);
                diag -= 2.0 * w;
                // -(U_{j+1} - U_{j-1}) x_k / (2h), x_k = k h, for k then -k
                let c = w * k as f64 / 2.0;
                compensator += -c + c;
            }
            sink.add(j + 1, compensator);
            sink.add(j - 1, -compensator);
        }

        let (l, r) = (sink.left, sink.right);
        left_w[i] = l;
        right_w[i] = r;
        matrix.row_mut(i)[i] += diag;
        if matrix[(i, i)] == 0.0 {
            return Err(Error::Singular { pivot: i });
        }
    }

    Ok(Operator {
        grid: *grid,
        scheme,
        matrix,
        boundary: BoundaryWeights {
            left: left_w,
            right: right_w,
        },
        sink_left,
        sink_right,
        diffusion,
    })
}

/// Mean-exit-time right-hand side: `-1` in every row. The exterior value is
/// zero, so boundary weights contribute nothing.
pub fn met_rhs(op: &Operator) -> Vec<f64> {
    vec![-1.0; op.matrix.dim()]
}

/// Where an escape is counted as successful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EscapeTarget {
    /// Landing in `(-inf, c]` (tumor extinction).
    LeftExtinction,
    /// Landing in `[d, +inf)` (malignant growth).
    RightMalignant,
}

impl EscapeTarget {
    pub fn opposite(self) -> Self {
        match self {
            Self::LeftExtinction => Self::RightMalignant,
            Self::RightMalignant => Self::LeftExtinction,
        }
    }
}

impl std::str::FromStr for EscapeTarget {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "left" => Ok(Self::LeftExtinction),
            "right" => Ok(Self::RightMalignant),
            other => Err(format!("unknown target '{other}' (left|right)")),
        }
    }
}

impl std::fmt::Display for EscapeTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::LeftExtinction => "left",
            Self::RightMalignant => "right",
        })
    }
}

/// Escape right-hand side: exterior data is 1 on the target side, 0 on the
/// other. The exterior jump mass into the target side and every boundary
/// weight on the target node move to the right.
pub fn escape_rhs(op: &Operator, target: EscapeTarget) -> Vec<f64> {
    let (sink, weights) = match target {
        EscapeTarget::LeftExtinction => (&op.sink_left, &op.boundary.left),
        EscapeTarget::RightMalignant => (&op.sink_right, &op.boundary.right),
    };
    sink.iter().zip(weights).map(|(s, w)| -s - w).collect()
}
