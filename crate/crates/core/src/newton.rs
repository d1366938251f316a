//! Reversed Newton polygon: hull of the lower-left quadrants D(i,j) of the
//! monomials of q. Vertices run with n increasing and m decreasing.

use crate::error::{Error, Result};
use crate::exact::{fmt_q, Rational};
use crate::poly::Polynomial;
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(Rational, Rational)>,
    /// `T_k`, the y-intercept of the line through vertices k and k+1.
    pub intercepts: Vec<Rational>,
    /// `(n_{k+1} - n_k) / (m_k - m_{k+1})` per edge.
    pub edge_weights: Vec<Rational>,
}

fn cross(o: (Rational, Rational), a: (Rational, Rational), b: (Rational, Rational)) -> Rational {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

pub fn newton_polygon(q: &Polynomial) -> Result<NewtonPolygon> {
    newton_polygon_of_points(&q.exponents())
}

pub fn newton_polygon_of_points(points: &[(Rational, Rational)]) -> Result<NewtonPolygon> {
    if points.is_empty() {
        return Err(Error::InvalidInput("Newton polygon of an empty polynomial".into()));
    }
    // staircase maxima, scanned from the right
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
    let mut stairs: Vec<(Rational, Rational)> = Vec::new();
    for p in pts {
        if stairs.last().map_or(true, |best| p.1 > best.1) {
            stairs.push(p);
        }
    }
    stairs.reverse();

    // upper-right chain; collinear points are dropped
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for p in stairs {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= Rational::from(0) {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(from_vertices(hull))
}

fn from_vertices(vertices: Vec<(Rational, Rational)>) -> NewtonPolygon {
    let mut intercepts = Vec::new();
    let mut edge_weights = Vec::new();
    for w in vertices.windows(2) {
        let ((n1, m1), (n2, m2)) = (w[0], w[1]);
        intercepts.push(m1 + n1 * (m1 - m2) / (n2 - n1));
        edge_weights.push((n2 - n1) / (m1 - m2));
    }
    NewtonPolygon {
        vertices,
        intercepts,
        edge_weights,
    }
}

impl NewtonPolygon {
    /// Number of vertices `s`.
    pub fn s(&self) -> usize {
        self.vertices.len()
    }

    /// `T_k` for `1 <= k <= s-1`.
    pub fn intercept(&self, k: usize) -> Result<Rational> {
        if k == 0 || k >= self.s() {
            return Err(Error::InvalidInput(format!(
                "edge index {k} outside 1..={}",
                self.s().saturating_sub(1)
            )));
        }
        Ok(self.intercepts[k - 1])
    }

    /// `n_k, m_k` with 1-based `k`.
    pub fn vertex(&self, k: usize) -> (Rational, Rational) {
        self.vertices[k - 1]
    }

    /// Is `(i,j)` inside the hull, i.e. on or below-left of every edge line
    /// and dominated by the extreme vertices in each axis.
    pub fn contains(&self, (i, j): (Rational, Rational)) -> bool {
        let first = self.vertices[0];
        let last = self.vertices[self.s() - 1];
        if j > first.1 || i > last.0 {
            return false;
        }
        self.vertices
            .windows(2)
            .all(|w| cross(w[0], w[1], (i, j)) <= Rational::from(0))
    }

    pub fn check_invariants(&self) -> bool {
        let v = &self.vertices;
        let mono = v.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1);
        let t_inc = self.intercepts.windows(2).all(|w| w[0] < w[1]);
        let l_dec = self.edge_weights.windows(2).all(|w| w[0] > w[1]);
        mono && t_inc && l_dec
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|(n, m)| json!([fmt_q(n), fmt_q(m)])).collect::<Vec<_>>(),
            "intercepts": self.intercepts.iter().map(fmt_q).collect::<Vec<_>>(),
            "edge_weights": self.edge_weights.iter().map(fmt_q).collect::<Vec<_>>(),
        })
    }
}
