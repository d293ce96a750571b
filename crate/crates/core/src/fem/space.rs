//! Continuous Bernstein-Bézier spaces: local-to-global DOF maps.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::bernstein::BernsteinBasis;
use crate::geometry::Point2;
use crate::mesh::Triangulation;

/// Identifies a domain point independently of the triangle that sees it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum DomainKey {
    Vertex(usize),
    /// (lower vertex, upper vertex, multiplicity of the lower vertex)
    Edge(usize, usize, usize),
    Interior(usize, usize),
}

#[derive(Clone, Debug)]
pub struct FeSpace {
    mesh: Arc<Triangulation>,
    basis: BernsteinBasis,
    element_dofs: Vec<usize>,
    dof_points: Vec<Point2>,
    boundary: Vec<bool>,
    vertex_dofs: Vec<usize>,
    collocation_inverse: Vec<f64>,
}

impl FeSpace {
    /// DOFs are numbered first-come in (triangle, local index) order.
    pub fn new(mesh: Arc<Triangulation>, degree: usize) -> Result<Self> {
        let basis = BernsteinBasis::new(degree)?;
        let nloc = basis.len();
        let mut keys: HashMap<DomainKey, usize> = HashMap::new();
        let mut element_dofs = Vec::with_capacity(mesh.triangle_count() * nloc);
        let mut dof_points = Vec::new();
        let mut boundary = Vec::new();
        let mut vertex_dofs = vec![usize::MAX; mesh.vertex_count()];

        let mut boundary_edges = HashMap::new();
        for e in mesh.edges() {
            boundary_edges.insert(e.vertices, e.is_boundary());
        }

        for t in 0..mesh.triangle_count() {
            let tri = mesh.triangle(t);
            let pts = mesh.triangle_points(t);
            for (local, alpha) in basis.indices().iter().enumerate() {
                let nz: Vec<usize> = (0..3).filter(|&k| alpha[k] > 0).collect();
                let (key, on_boundary) = match nz.len() {
                    1 => {
                        let v = tri[nz[0]];
                        (DomainKey::Vertex(v), mesh.is_boundary_vertex(v))
                    }
                    2 => {
                        let (p, q) = (tri[nz[0]], tri[nz[1]]);
                        let (lo, mult) = if p < q {
                            (p, alpha[nz[0]])
                        } else {
                            (q, alpha[nz[1]])
                        };
                        let hi = p.max(q);
                        (DomainKey::Edge(lo, hi, mult), boundary_edges[&[lo, hi]])
                    }
                    _ => (DomainKey::Interior(t, local), false),
                };
                let next = dof_points.len();
                let dof = *keys.entry(key).or_insert(next);
                if dof == next {
                    dof_points.push(basis.domain_point(local, &pts));
                    boundary.push(on_boundary);
                    if let DomainKey::Vertex(v) = key {
                        vertex_dofs[v] = dof;
                    }
                }
                element_dofs.push(dof);
            }
        }

        let collocation_inverse = collocation_inverse(&basis);
        Ok(FeSpace {
            mesh,
            basis,
            element_dofs,
            dof_points,
            boundary,
            vertex_dofs,
            collocation_inverse,
        })
    }

    pub fn mesh(&self) -> &Arc<Triangulation> {
        &self.mesh
    }

    pub fn basis(&self) -> &BernsteinBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn dof_count(&self) -> usize {
        self.dof_points.len()
    }

    pub fn local_count(&self) -> usize {
        self.basis.len()
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        let n = self.basis.len();
        &self.element_dofs[t * n..(t + 1) * n]
    }

    pub fn dof_points(&self) -> &[Point2] {
        &self.dof_points
    }

    pub fn is_boundary_dof(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_dof_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_dofs(&self) -> Vec<usize> {
        (0..self.dof_count())
            .filter(|&d| self.boundary[d])
            .collect()
    }

    pub fn vertex_dof(&self, v: usize) -> usize {
        self.vertex_dofs[v]
    }

    /// Coefficients equal to the values at domain points. Exact for
    /// functions that are linear on every triangle.
    pub fn sample_at_dofs(&self, f: impl Fn(Point2) -> f64) -> Vec<f64> {
        self.dof_points.iter().map(|&p| f(p)).collect()
    }

    /// Bernstein interpolant of `f` at the domain points of every triangle.
    pub fn interpolate(&self, f: impl Fn(Point2) -> f64) -> Vec<f64> {
        if self.degree() == 1 {
            return self.sample_at_dofs(f);
        }
        let n = self.local_count();
        let mut coeffs = vec![0.0; self.dof_count()];
        let mut written = vec![false; self.dof_count()];
        for t in 0..self.mesh.triangle_count() {
            let dofs = self.element_dofs(t);
            let vals: Vec<f64> = dofs.iter().map(|&d| f(self.dof_points[d])).collect();
            for (r, &d) in dofs.iter().enumerate() {
                if written[d] {
                    continue;
                }
                let row = &self.collocation_inverse[r * n..(r + 1) * n];
                coeffs[d] = row.iter().zip(&vals).map(|(a, b)| a * b).sum();
                written[d] = true;
            }
        }
        coeffs
    }
}

/// Inverse of V with V[p][α] = B_α(ξ_p), stored row-major.
fn collocation_inverse(basis: &BernsteinBasis) -> Vec<f64> {
    let n = basis.len();
    let deg = basis.degree() as f64;
    let mut a = vec![0.0; n * n];
    for (p, xi) in basis.indices().iter().enumerate() {
        let b = xi.map(|k| k as f64 / deg);
        for (q, v) in basis.values(b).into_iter().enumerate() {
            a[p * n + q] = v;
        }
    }
    invert_dense(&a, n).expect("Bernstein collocation matrices are invertible")
}

/// Gauss-Jordan inverse with partial pivoting for small dense matrices.
pub(crate) fn invert_dense(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs()))
            .unwrap();
        if m[piv * n + col].abs() < 1e-300 {
            return Err(Error::NotPositiveDefinite {
                row: col,
                pivot: m[piv * n + col],
            });
        }
        for k in 0..n {
            m.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        m[r * n + k] -= f * m[col * n + k];
                        inv[r * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::triangulate::{polygon_from, triangulate};

    fn square(size: f64) -> Arc<Triangulation> {
        let p = polygon_from(&[[0., 0.], [1., 0.], [1., 1.], [0., 1.]]).unwrap();
        Arc::new(triangulate(&p, size).unwrap())
    }

    #[test]
    fn dof_counts() {
        let m = square(0.4);
        let (v, e, t) = (m.vertex_count(), m.edges().len(), m.triangle_count());
        for n in 1..=3 {
            let s = FeSpace::new(m.clone(), n).unwrap();
            assert_eq!(
                s.dof_count(),
                v + (n - 1) * e + (n - 1) * n.saturating_sub(2) / 2 * t
            );
            let nb = m.boundary_vertices().len();
            assert_eq!(s.boundary_dofs().len(), nb * n);
        }
    }

    #[test]
    fn shared_dofs_have_one_location() {
        let m = square(0.3);
        let s = FeSpace::new(m.clone(), 3).unwrap();
        for t in 0..m.triangle_count() {
            let pts = m.triangle_points(t);
            for (local, &d) in s.element_dofs(t).iter().enumerate() {
                let p = s.basis().domain_point(local, &pts);
                assert!(p.distance(s.dof_points()[d]) < 1e-14);
            }
        }
        for v in 0..m.vertex_count() {
            assert_eq!(s.dof_points()[s.vertex_dof(v)], m.vertex(v));
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let m = square(0.5);
        for n in 1..=3 {
            let s = FeSpace::new(m.clone(), n).unwrap();
            let f = move |p: Point2| p.x.powi(n as i32) - 2.0 * p.x * p.y.powi(n as i32 - 1) + 0.5;
            let c = s.interpolate(f);
            for t in 0..m.triangle_count() {
                let local: Vec<f64> = s.element_dofs(t).iter().map(|&d| c[d]).collect();
                let pts = m.triangle_points(t);
                let b = [0.15, 0.35, 0.5];
                let x = crate::fem::quadrature::to_cartesian(&pts, b);
                assert!((s.basis().de_casteljau(&local, b) - f(x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dense_inverse() {
        let a = [4.0, 1.0, 2.0, 0.5, 3.0, 0.0, 1.0, 1.0, 5.0];
        let inv = invert_dense(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(invert_dense(&[1.0, 2.0, 2.0, 4.0], 2).is_err());
    }
}
