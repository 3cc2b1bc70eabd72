use crate::error::{Error, Result};

/// Relative tolerance for the integrality checks on `c/h`, `d/h`, `(c+d)/(2h)`.
const INTEGRAL_TOL: f64 = 1e-9;

/// Uniform grid on the exit interval `(c, d)` with nodes `x_j = j h`.
///
/// Node indices run from `left_index() = c/h` to `right_index() = d/h`; the
/// two end nodes carry exterior data and everything strictly between them is
/// an unknown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    c: f64,
    d: f64,
    h: f64,
    jc: i64,
    jd: i64,
    jm: i64,
}

fn integral_quotient(quotient: &'static str, value: f64) -> Result<i64> {
    let rounded = value.round();
    if (value - rounded).abs() <= INTEGRAL_TOL * value.abs().max(1.0) {
        Ok(rounded as i64)
    } else {
        Err(Error::Divisibility { quotient, value })
    }
}

pub fn build_grid(c: f64, d: f64, h: f64) -> Result<Grid> {
    Grid::new(c, d, h)
}

impl Grid {
    pub fn new(c: f64, d: f64, h: f64) -> Result<Self> {
        if !(c.is_finite() && d.is_finite() && h.is_finite()) {
            return Err(Error::Grid(format!("non-finite grid data c={c} d={d} h={h}")));
        }
        if !(h > 0.0) {
            return Err(Error::Grid(format!("step h={h} must be positive")));
        }
        if !(c < d) {
            return Err(Error::Grid(format!("need c < d, got c={c} d={d}")));
        }
        if !(c <= 0.0 && d > 0.0) {
            return Err(Error::Grid(format!("need c <= 0 < d, got c={c} d={d}")));
        }
        let jc = integral_quotient("c/h", c / h)?;
        let jd = integral_quotient("d/h", d / h)?;
        let jm = integral_quotient("(c+d)/(2h)", (c + d) / (2.0 * h))?;
        let unknowns = jd - jc - 1;
        if unknowns < 3 {
            return Err(Error::Grid(format!(
                "only {unknowns} interior nodes; at least 3 required"
            )));
        }
        Ok(Self {
            c,
            d,
            h,
            jc,
            jd,
            jm,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Index of the node at `c`.
    pub fn left_index(&self) -> i64 {
        self.jc
    }

    /// Index of the node at `d`.
    pub fn right_index(&self) -> i64 {
        self.jd
    }

    /// Index of the node at the interval midpoint. Rows at or right of it
    /// use the right-half stencil, rows left of it the mirrored one.
    pub fn midpoint_index(&self) -> i64 {
        self.jm
    }

    /// Number of unknowns `N`.
    pub fn interior_len(&self) -> usize {
        (self.jd - self.jc - 1) as usize
    }

    pub fn x(&self, j: i64) -> f64 {
        j as f64 * self.h
    }

    /// Node index of interior unknown `row`.
    pub fn node_of(&self, row: usize) -> i64 {
        self.jc + 1 + row as i64
    }

    /// Interior row of node `j`, or `None` for boundary/exterior nodes.
    pub fn row_of(&self, j: i64) -> Option<usize> {
        if j > self.jc && j < self.jd {
            Some((j - self.jc - 1) as usize)
        } else {
            None
        }
    }

    /// Interior node coordinates, left to right.
    pub fn interior_points(&self) -> impl Iterator<Item = f64> + '_ {
        (self.jc + 1..self.jd).map(move |j| self.x(j))
    }

    /// Index of the grid node (boundary nodes included) nearest to `x`.
    pub fn nearest_node(&self, x: f64) -> i64 {
        ((x / self.h).round() as i64).clamp(self.jc, self.jd)
    }

    /// Whether `x` coincides with a node to within `1e-9 h`.
    pub fn is_node(&self, x: f64) -> bool {
        let q = x / self.h;
        (q - q.round()).abs() <= 1e-9 * q.abs().max(1.0)
            && q.round() as i64 >= self.jc
            && q.round() as i64 <= self.jd
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let g = build_grid(0.0, 5.0, 0.01).unwrap();
        assert_eq!(g.interior_len(), 499);
        assert_eq!(g.midpoint_index(), 250);
        let g = build_grid(-1.0, 1.0, 0.01).unwrap();
        assert_eq!(g.interior_len(), 199);
        assert_eq!(g.midpoint_index(), 0);
        assert_eq!(g.node_of(0), -99);
        assert_eq!(g.row_of(-100), None);
        assert_eq!(g.row_of(99), Some(198));
    }

    #[test]
    fn divisibility_failure_names_quotient() {
        match build_grid(0.0, 5.0, 0.003) {
            Err(Error::Divisibility { quotient, .. }) => assert_eq!(quotient, "d/h"),
            other => panic!("unexpected {other:?}"),
        }
        // c/h, d/h integral but the midpoint is not
        match build_grid(0.0, 0.5, 0.1) {
            Err(Error::Divisibility { quotient, .. }) => assert_eq!(quotient, "(c+d)/(2h)"),
            other => panic!("unexpected {other:?}"),
        }
        match build_grid(-0.25, 1.0, 0.1) {
            Err(Error::Divisibility { quotient, .. }) => assert_eq!(quotient, "c/h"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(build_grid(1.0, 0.0, 0.1).is_err());
        assert!(build_grid(0.5, 1.0, 0.1).is_err());
        assert!(build_grid(0.0, 1.0, -0.1).is_err());
        assert!(build_grid(0.0, 0.2, 0.1).is_err());
        assert!(build_grid(0.0, 0.4, 0.1).is_ok());
    }

    #[test]
    fn node_lookup() {
        let g = build_grid(0.0, 5.0, 0.05).unwrap();
        assert!(g.is_node(2.5));
        assert!(!g.is_node(2.51));
        assert_eq!(g.nearest_node(2.51), 50);
        assert_eq!(g.nearest_node(-3.0), 0);
        assert_eq!(g.interior_points().count(), 99);
    }
}
