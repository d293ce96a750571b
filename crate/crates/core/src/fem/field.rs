use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::bernstein::barycentric_gradients;
use crate::fem::quadrature::{to_cartesian, QuadratureRule};
use crate::fem::space::FeSpace;
use crate::geometry::Point2;
use crate::mesh::Location;

/// A function in an [`FeSpace`], stored as global Bernstein coefficients.
#[derive(Clone, Debug)]
pub struct FeField {
    space: Arc<FeSpace>,
    coeffs: Vec<f64>,
}

impl FeField {
    pub fn new(space: Arc<FeSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dof_count() {
            return Err(Error::DimensionMismatch(format!(
                "space has {} DOFs, got {} coefficients",
                space.dof_count(),
                coeffs.len()
            )));
        }
        Ok(FeField { space, coeffs })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coeffs
    }

    fn local(&self, t: usize) -> Vec<f64> {
        self.space
            .element_dofs(t)
            .iter()
            .map(|&d| self.coeffs[d])
            .collect()
    }

    pub fn eval_in(&self, t: usize, b: [f64; 3]) -> f64 {
        self.space.basis().de_casteljau(&self.local(t), b)
    }

    pub fn gradient_in(&self, t: usize, b: [f64; 3]) -> Point2 {
        let d = self
            .space
            .basis()
            .de_casteljau_derivatives(&self.local(t), b);
        let g = barycentric_gradients(&self.space.mesh().triangle_points(t));
        d[0] * g[0] + d[1] * g[1] + d[2] * g[2]
    }

    /// Value at `p`, or `None` outside the mesh.
    pub fn eval(&self, p: Point2) -> Option<f64> {
        match self.space.mesh().locate(p) {
            Location::Inside {
                triangle,
                barycentric,
            } => Some(self.eval_in(triangle, barycentric)),
            Location::Outside => None,
        }
    }

    pub fn gradient(&self, p: Point2) -> Option<Point2> {
        match self.space.mesh().locate(p) {
            Location::Inside {
                triangle,
                barycentric,
            } => Some(self.gradient_in(triangle, barycentric)),
            Location::Outside => None,
        }
    }

    /// ‖∇(u_h - u)‖_{L²} against an exact gradient, with a degree-6 rule.
    pub fn energy_error(&self, exact_gradient: impl Fn(Point2) -> Point2 + Sync) -> f64 {
        let rule = QuadratureRule::exact_for(6).expect("degree 6 rule exists");
        let mesh = self.space.mesh();
        let parts: Vec<f64> = (0..mesh.triangle_count())
            .into_par_iter()
            .map(|t| {
                let tri = mesh.triangle_points(t);
                let area = mesh.triangle_area(t);
                rule.points()
                    .iter()
                    .zip(rule.weights())
                    .map(|(b, w)| {
                        let e = self.gradient_in(t, *b) - exact_gradient(to_cartesian(&tri, *b));
                        area * w * e.dot(e)
                    })
                    .sum()
            })
            .collect();
        parts.iter().sum::<f64>().sqrt()
    }

    /// ∫ |∇u_h|², exactly for the element degree.
    pub fn energy(&self) -> f64 {
        let rule = QuadratureRule::exact_for(2 * self.space.degree() - 2).expect("rule exists");
        let mesh = self.space.mesh();
        (0..mesh.triangle_count())
            .map(|t| {
                let area = mesh.triangle_area(t);
                rule.points()
                    .iter()
                    .zip(rule.weights())
                    .map(|(b, w)| {
                        let g = self.gradient_in(t, *b);
                        area * w * g.dot(g)
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}
