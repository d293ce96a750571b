//! Bernstein-Bézier polynomials on a triangle in barycentric form.

use crate::error::{Error, Result};
use crate::geometry::Point2;

pub const MAX_DEGREE: usize = 3;

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Multi-indices |α| = n in the local order used everywhere in the crate:
/// α_0 descending, then α_1 descending. For n = 1 this is the vertex order.
pub fn multi_indices(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for i in (0..=n).rev() {
        for j in (0..=n - i).rev() {
            out.push([i, j, n - i - j]);
        }
    }
    out
}

/// The degree-n Bernstein basis on a triangle.
#[derive(Clone, Debug)]
pub struct BernsteinBasis {
    degree: usize,
    indices: Vec<[usize; 3]>,
    // (n + 1) x (n + 1) table from (α_0, α_1) to local position
    lookup: Vec<usize>,
}

impl BernsteinBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        Ok(Self::unchecked(degree))
    }

    fn unchecked(degree: usize) -> Self {
        let indices = multi_indices(degree);
        let mut lookup = vec![usize::MAX; (degree + 1) * (degree + 1)];
        for (p, a) in indices.iter().enumerate() {
            lookup[a[0] * (degree + 1) + a[1]] = p;
        }
        BernsteinBasis {
            degree,
            indices,
            lookup,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[[usize; 3]] {
        &self.indices
    }

    pub fn position(&self, alpha: [usize; 3]) -> Option<usize> {
        if alpha.iter().sum::<usize>() != self.degree {
            return None;
        }
        Some(self.lookup[alpha[0] * (self.degree + 1) + alpha[1]])
    }

    /// Domain point ξ_α = Σ α_k p_k / n.
    pub fn domain_point(&self, local: usize, tri: &[Point2; 3]) -> Point2 {
        let a = self.indices[local];
        let n = self.degree as f64;
        Point2::new(
            (a[0] as f64 * tri[0].x + a[1] as f64 * tri[1].x + a[2] as f64 * tri[2].x) / n,
            (a[0] as f64 * tri[0].y + a[1] as f64 * tri[1].y + a[2] as f64 * tri[2].y) / n,
        )
    }

    pub fn value(&self, local: usize, b: [f64; 3]) -> f64 {
        bernstein(self.indices[local], b)
    }

    pub fn values(&self, b: [f64; 3]) -> Vec<f64> {
        self.indices.iter().map(|&a| bernstein(a, b)).collect()
    }

    /// ∂B_α/∂b_k = n B^{n-1}_{α-e_k}, for every α and k.
    pub fn barycentric_derivatives(&self, b: [f64; 3]) -> Vec<[f64; 3]> {
        let n = self.degree as f64;
        self.indices
            .iter()
            .map(|&a| {
                let mut d = [0.0; 3];
                for k in 0..3 {
                    if a[k] > 0 {
                        let mut lower = a;
                        lower[k] -= 1;
                        d[k] = n * bernstein(lower, b);
                    }
                }
                d
            })
            .collect()
    }

    /// Evaluates Σ c_α B_α(b) by repeated convex combination.
    pub fn de_casteljau(&self, coeffs: &[f64], b: [f64; 3]) -> f64 {
        debug_assert_eq!(coeffs.len(), self.len());
        let n = self.degree;
        let w = n + 1;
        let mut grid = vec![0.0; w * w];
        for (p, a) in self.indices.iter().enumerate() {
            grid[a[0] * w + a[1]] = coeffs[p];
        }
        casteljau_grid(&mut grid, w, n, b)
    }

    /// Derivatives of Σ c_α B_α with respect to b_0, b_1, b_2.
    pub fn de_casteljau_derivatives(&self, coeffs: &[f64], b: [f64; 3]) -> [f64; 3] {
        let n = self.degree;
        let w = n + 1;
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            // differenced net c_{β + e_k}, |β| = n - 1
            let mut grid = vec![0.0; w * w];
            for i in 0..n {
                for j in 0..n - i {
                    let mut a = [i, j, n - 1 - i - j];
                    a[k] += 1;
                    grid[i * w + j] = coeffs[self.lookup[a[0] * w + a[1]]];
                }
            }
            *slot = n as f64 * casteljau_grid(&mut grid, w, n - 1, b);
        }
        out
    }
}

fn casteljau_grid(grid: &mut [f64], w: usize, n: usize, b: [f64; 3]) -> f64 {
    for m in (1..=n).rev() {
        for i in 0..m {
            for j in 0..m - i {
                grid[i * w + j] = b[0] * grid[(i + 1) * w + j]
                    + b[1] * grid[i * w + j + 1]
                    + b[2] * grid[i * w + j];
            }
        }
    }
    grid[0]
}

/// B_α(b) = |α|! / (α_0! α_1! α_2!) b_0^α_0 b_1^α_1 b_2^α_2.
pub fn bernstein(alpha: [usize; 3], b: [f64; 3]) -> f64 {
    let n = alpha.iter().sum::<usize>();
    let coef = factorial(n) / alpha.iter().map(|&a| factorial(a)).product::<f64>();
    coef * b[0].powi(alpha[0] as i32) * b[1].powi(alpha[1] as i32) * b[2].powi(alpha[2] as i32)
}

/// Gradients of the barycentric coordinates of a positively oriented triangle.
pub fn barycentric_gradients(tri: &[Point2; 3]) -> [Point2; 3] {
    let twice = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    let g = |p: Point2, q: Point2| Point2::new((p.y - q.y) / twice, (q.x - p.x) / twice);
    [g(tri[1], tri[2]), g(tri[2], tri[0]), g(tri[0], tri[1])]
}
