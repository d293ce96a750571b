//! star^k neighbourhoods and the triangle distance they induce.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::mesh::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StarCenter {
    Vertex(usize),
    Triangle(usize),
}

/// star^k of a vertex or triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct StarRegion {
    pub center: StarCenter,
    pub ring: usize,
    pub triangle_indices: BTreeSet<usize>,
    pub vertex_indices: BTreeSet<usize>,
    /// Vertices on the region boundary that lie inside the domain.
    pub artificial_boundary_vertices: BTreeSet<usize>,
}

impl StarRegion {
    pub fn covers_mesh(&self, mesh: &Triangulation) -> bool {
        self.triangle_indices.len() == mesh.triangle_count()
    }
}

impl Triangulation {
    /// Graph distance from a set of seed vertices in the vertex graph whose
    /// edges join vertices sharing a triangle.
    pub fn vertex_distances_from(&self, seeds: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in seeds {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &t in self.vertex_to_triangles(v) {
                for w in self.triangle(t) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        dist
    }

    fn center_seeds(&self, center: StarCenter) -> Result<Vec<usize>> {
        match center {
            StarCenter::Vertex(v) => {
                self.check_vertex(v)?;
                Ok(vec![v])
            }
            StarCenter::Triangle(t) => {
                self.check_triangle(t)?;
                Ok(self.triangle(t).to_vec())
            }
        }
    }

    /// Smallest k with triangle t in star^k(center), for every triangle.
    ///
    /// A triangle belongs to star^k exactly when one of its vertices is within
    /// graph distance k - 1 of the center's vertices.
    pub fn triangle_rings(&self, center: StarCenter) -> Result<Vec<usize>> {
        let dist = self.vertex_distances_from(&self.center_seeds(center)?);
        Ok(self
            .triangles()
            .iter()
            .map(|tri| 1 + tri.iter().map(|&v| dist[v]).min().unwrap())
            .collect())
    }

    /// Ring at which star^k(center) first covers the whole mesh.
    pub fn saturation_ring(&self, center: StarCenter) -> Result<usize> {
        Ok(self.triangle_rings(center)?.into_iter().max().unwrap_or(1))
    }

    pub fn star(&self, center: StarCenter, k: usize) -> Result<StarRegion> {
        if k == 0 {
            return Err(Error::InvalidRing(k));
        }
        let rings = self.triangle_rings(center)?;
        let triangle_indices: BTreeSet<usize> =
            (0..rings.len()).filter(|&t| rings[t] <= k).collect();
        let vertex_indices: BTreeSet<usize> = triangle_indices
            .iter()
            .flat_map(|&t| self.triangle(t))
            .collect();
        let artificial_boundary_vertices = vertex_indices
            .iter()
            .copied()
            .filter(|&v| {
                !self.is_boundary_vertex(v)
                    && self
                        .vertex_to_triangles(v)
                        .iter()
                        .any(|t| !triangle_indices.contains(t))
            })
            .collect();
        Ok(StarRegion {
            center,
            ring: k,
            triangle_indices,
            vertex_indices,
            artificial_boundary_vertices,
        })
    }

    /// Number of vertex-sharing hops between two triangles (0 for a == b).
    pub fn triangle_distance(&self, a: usize, b: usize) -> Result<usize> {
        self.check_triangle(a)?;
        self.check_triangle(b)?;
        if a == b {
            return Ok(0);
        }
        let mut dist = vec![usize::MAX; self.triangle_count()];
        dist[a] = 0;
        let mut queue = VecDeque::from([a]);
        while let Some(t) = queue.pop_front() {
            for v in self.triangle(t) {
                for &s in self.vertex_to_triangles(v) {
                    if dist[s] == usize::MAX {
                        dist[s] = dist[t] + 1;
                        if s == b {
                            return Ok(dist[s]);
                        }
                        queue.push_back(s);
                    }
                }
            }
        }
        unreachable!("triangulations are vertex-connected")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    /// n x n cells on [0, n]^2, each split by the (i, j)-(i+1, j+1) diagonal.
    pub(crate) fn grid(n: usize) -> Triangulation {
        let idx = |i: usize, j: usize| j * (n + 1) + i;
        let mut v = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                v.push(Point2::new(i as f64, j as f64));
            }
        }
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..n {
                t.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                t.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Triangulation::new(v, t).unwrap()
    }

    #[test]
    fn single_triangle_star() {
        let m = Triangulation::new(
            vec![
                Point2::new(0., 0.),
                Point2::new(1., 0.),
                Point2::new(0., 1.),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let s = m.star(StarCenter::Vertex(2), 1).unwrap();
        assert_eq!(s.triangle_indices, BTreeSet::from([0]));
        assert!(s.artificial_boundary_vertices.is_empty());
    }

    #[test]
    fn interior_vertex_of_diagonal_grid_has_six_triangles() {
        let m = grid(3);
        let s = m.star(StarCenter::Vertex(5), 1).unwrap();
        assert_eq!(s.triangle_indices.len(), 6);
        assert_eq!(s.vertex_indices.len(), 7);
        // vertices 1, 4, 6, 9, 10 are interior to the domain but on the ring boundary
        assert!(s.artificial_boundary_vertices.contains(&6));
    }

    #[test]
    fn saturation_gives_whole_mesh() {
        let m = grid(4);
        let sat = m.saturation_ring(StarCenter::Vertex(0)).unwrap();
        let s = m.star(StarCenter::Vertex(0), sat).unwrap();
        assert!(s.covers_mesh(&m));
        assert!(s.artificial_boundary_vertices.is_empty());
        let before = m.star(StarCenter::Vertex(0), sat - 1).unwrap();
        assert!(!before.covers_mesh(&m));
    }

    #[test]
    fn invalid_center_rejected() {
        let m = grid(2);
        assert!(m.star(StarCenter::Vertex(99), 1).is_err());
        assert!(m.star(StarCenter::Triangle(99), 1).is_err());
        assert!(m.star(StarCenter::Vertex(0), 0).is_err());
    }

    #[test]
    fn triangle_star_touches_at_vertices() {
        let m = grid(3);
        let s = m.star(StarCenter::Triangle(8), 1).unwrap();
        for &t in &s.triangle_indices {
            assert_eq!(
                m.triangle_distance(8, t).unwrap().min(1),
                m.triangle_distance(8, t).unwrap()
            );
        }
        assert_eq!(m.triangle_distance(8, 8).unwrap(), 0);
    }
}
