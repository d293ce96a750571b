//! Symmetric quadrature rules on triangles. Points are barycentric and the
//! weights sum to one, so ∫_T f ≈ |T| Σ w_q f(x_q).

use crate::error::{Error, Result};
use crate::geometry::Point2;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    degree: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

pub const MAX_QUADRATURE_DEGREE: usize = 6;

fn orbit3(a: f64, w: f64, pts: &mut Vec<[f64; 3]>, wts: &mut Vec<f64>) {
    let c = 1.0 - 2.0 * a;
    for p in [[c, a, a], [a, c, a], [a, a, c]] {
        pts.push(p);
        wts.push(w);
    }
}

fn orbit6(a: f64, b: f64, w: f64, pts: &mut Vec<[f64; 3]>, wts: &mut Vec<f64>) {
    let c = 1.0 - a - b;
    for p in [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ] {
        pts.push(p);
        wts.push(w);
    }
}

impl QuadratureRule {
    /// The cheapest built-in rule exact for polynomials of total degree `degree`.
    pub fn exact_for(degree: usize) -> Result<Self> {
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        let exact = match degree {
            0 | 1 => {
                pts.push([1.0 / 3.0; 3]);
                wts.push(1.0);
                1
            }
            2 => {
                orbit3(1.0 / 6.0, 1.0 / 3.0, &mut pts, &mut wts);
                2
            }
            3 | 4 => {
                orbit3(0.445948490915965, 0.223381589678011, &mut pts, &mut wts);
                orbit3(0.091576213509771, 0.109951743655322, &mut pts, &mut wts);
                4
            }
            5 => {
                pts.push([1.0 / 3.0; 3]);
                wts.push(0.225);
                orbit3(0.470142064105115, 0.132394152788506, &mut pts, &mut wts);
                orbit3(0.101286507323456, 0.125939180544827, &mut pts, &mut wts);
                5
            }
            6 => {
                orbit3(0.249286745170910, 0.116786275726379, &mut pts, &mut wts);
                orbit3(0.063089014491502, 0.050844906370207, &mut pts, &mut wts);
                orbit6(
                    0.053145049844817,
                    0.310352451033784,
                    0.082851075618374,
                    &mut pts,
                    &mut wts,
                );
                6
            }
            d => {
                return Err(Error::InvalidArgument(format!(
                    "no quadrature rule of degree {d} (maximum {MAX_QUADRATURE_DEGREE})"
                )))
            }
        };
        Ok(QuadratureRule {
            degree: exact,
            points: pts,
            weights: wts,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn name(&self) -> String {
        format!("symmetric-{}pt-deg{}", self.len(), self.degree)
    }

    pub fn integrate(&self, tri: &[Point2; 3], f: impl Fn(Point2, [f64; 3]) -> f64) -> f64 {
        let area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
        let s: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| w * f(to_cartesian(tri, *b), *b))
            .sum();
        area * s
    }
}

pub fn to_cartesian(tri: &[Point2; 3], b: [f64; 3]) -> Point2 {
    Point2::new(
        b[0] * tri[0].x + b[1] * tri[1].x + b[2] * tri[2].x,
        b[0] * tri[0].y + b[1] * tri[1].y + b[2] * tri[2].y,
    )
}
