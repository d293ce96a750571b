//! Element matrices and global assembly. Element work runs in parallel;
//! scattering into the global matrix follows triangle order, so results are
//! bit-identical for any thread count.

use rayon::prelude::*;

use crate::error::Result;
use crate::fem::bernstein::{barycentric_gradients, BernsteinBasis};
use crate::fem::quadrature::{to_cartesian, QuadratureRule};
use crate::fem::space::FeSpace;
use crate::fem::sparse::{CooMatrix, CsrMatrix};
use crate::geometry::Point2;

/// Reference integrals of products of Bernstein polynomials and their
/// barycentric derivatives, shared by every triangle.
#[derive(Clone, Debug)]
pub struct ReferenceElement {
    n: usize,
    // n x n, ∫ B_α B_β / |T|
    mass: Vec<f64>,
    // n x n x 3 x 3, ∫ ∂_k B_α ∂_l B_β / |T|
    stiffness: Vec<f64>,
}

impl ReferenceElement {
    pub fn new(basis: &BernsteinBasis) -> Result<Self> {
        let n = basis.len();
        let deg = basis.degree();
        let mass_rule = QuadratureRule::exact_for(2 * deg)?;
        let mut mass = vec![0.0; n * n];
        for (b, w) in mass_rule.points().iter().zip(mass_rule.weights()) {
            let v = basis.values(*b);
            for a in 0..n {
                for c in 0..n {
                    mass[a * n + c] += w * v[a] * v[c];
                }
            }
        }
        let stiff_rule = QuadratureRule::exact_for(2 * deg - 2)?;
        let mut stiffness = vec![0.0; n * n * 9];
        for (b, w) in stiff_rule.points().iter().zip(stiff_rule.weights()) {
            let d = basis.barycentric_derivatives(*b);
            for a in 0..n {
                for c in 0..n {
                    let base = (a * n + c) * 9;
                    for k in 0..3 {
                        for l in 0..3 {
                            stiffness[base + 3 * k + l] += w * d[a][k] * d[c][l];
                        }
                    }
                }
            }
        }
        // mirror the upper triangle so that local matrices are exactly symmetric
        for a in 0..n {
            for c in 0..a {
                mass[a * n + c] = mass[c * n + a];
            }
        }
        Ok(ReferenceElement { n, mass, stiffness })
    }

    pub fn local_count(&self) -> usize {
        self.n
    }

    /// Row-major local stiffness matrix ∫_T ∇B_α · ∇B_β.
    pub fn stiffness(&self, tri: &[Point2; 3]) -> Vec<f64> {
        let area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
        let g = barycentric_gradients(tri);
        let mut gram = [0.0; 9];
        for k in 0..3 {
            for l in 0..3 {
                gram[3 * k + l] = g[k].dot(g[l]);
            }
        }
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for a in 0..n {
            for c in a..n {
                let ac = a * n + c;
                let s = &self.stiffness[ac * 9..ac * 9 + 9];
                let v = area * s.iter().zip(&gram).map(|(x, y)| x * y).sum::<f64>();
                out[ac] = v;
                out[c * n + a] = v;
            }
        }
        out
    }

    /// Row-major local mass matrix ∫_T B_α B_β.
    pub fn mass(&self, tri: &[Point2; 3]) -> Vec<f64> {
        let area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
        self.mass.iter().map(|m| area * m).collect()
    }
}

fn assemble(
    space: &FeSpace,
    triangles: &[usize],
    element: impl Fn(&[Point2; 3]) -> Vec<f64> + Sync,
) -> CsrMatrix {
    let mesh = space.mesh();
    let locals: Vec<Vec<f64>> = triangles
        .par_iter()
        .map(|&t| element(&mesh.triangle_points(t)))
        .collect();
    let n = space.local_count();
    let mut coo = CooMatrix::new(space.dof_count(), space.dof_count());
    for (&t, local) in triangles.iter().zip(&locals) {
        let dofs = space.element_dofs(t);
        for a in 0..n {
            for b in 0..n {
                coo.push(dofs[a], dofs[b], local[a * n + b]);
            }
        }
    }
    coo.to_csr()
}

fn all_triangles(space: &FeSpace) -> Vec<usize> {
    (0..space.mesh().triangle_count()).collect()
}

/// Stiffness matrix over a subset of triangles (all DOFs are kept).
pub fn assemble_stiffness_on(space: &FeSpace, triangles: &[usize]) -> Result<CsrMatrix> {
    let re = ReferenceElement::new(space.basis())?;
    Ok(assemble(space, triangles, |tri| re.stiffness(tri)))
}

pub fn assemble_stiffness(space: &FeSpace) -> Result<CsrMatrix> {
    assemble_stiffness_on(space, &all_triangles(space))
}

pub fn assemble_mass(space: &FeSpace) -> Result<CsrMatrix> {
    let re = ReferenceElement::new(space.basis())?;
    Ok(assemble(space, &all_triangles(space), |tri| re.mass(tri)))
}

/// ∫ f ψ_i over the listed triangles with a rule exact to `quad_degree`.
/// `f` receives the triangle index, the point and its barycentric coordinates.
pub fn assemble_load_on(
    space: &FeSpace,
    triangles: &[usize],
    quad_degree: usize,
    f: impl Fn(usize, Point2, [f64; 3]) -> f64 + Sync,
) -> Result<Vec<f64>> {
    let rule = QuadratureRule::exact_for(quad_degree)?;
    let basis = space.basis();
    let tables: Vec<Vec<f64>> = rule.points().iter().map(|&b| basis.values(b)).collect();
    let mesh = space.mesh();
    let n = space.local_count();
    let locals: Vec<Vec<f64>> = triangles
        .par_iter()
        .map(|&t| {
            let tri = mesh.triangle_points(t);
            let area = mesh.triangle_area(t);
            let mut local = vec![0.0; n];
            for ((b, w), vals) in rule.points().iter().zip(rule.weights()).zip(&tables) {
                let fx = f(t, to_cartesian(&tri, *b), *b);
                if fx != 0.0 {
                    for a in 0..n {
                        local[a] += area * w * fx * vals[a];
                    }
                }
            }
            local
        })
        .collect();
    let mut load = vec![0.0; space.dof_count()];
    for (&t, local) in triangles.iter().zip(&locals) {
        for (&d, v) in space.element_dofs(t).iter().zip(local) {
            load[d] += v;
        }
    }
    Ok(load)
}

pub fn assemble_load(
    space: &FeSpace,
    quad_degree: usize,
    f: impl Fn(usize, Point2, [f64; 3]) -> f64 + Sync,
) -> Result<Vec<f64>> {
    assemble_load_on(space, &all_triangles(space), quad_degree, f)
}
