use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Triangulation;

/// A coarse design mesh whose vertices carry the coordinates, and the
/// uniformly refined mesh on which the fields are computed.
#[derive(Clone, Debug)]
pub struct DesignPair {
    coarse: Arc<Triangulation>,
    fine: Arc<Triangulation>,
    refinements: usize,
    // coarse barycentric coordinates of the corners of every fine triangle,
    // taken in the parent; exact because refinement only halves
    corner_coords: Vec<[[f64; 3]; 3]>,
}

impl DesignPair {
    pub fn new(coarse: Triangulation, refinements: usize) -> Self {
        let fine = coarse.refine_times(refinements);
        Self::assemble(coarse, fine, refinements)
    }

    /// Rebuilds a pair from stored meshes, checking that `fine` really is
    /// `coarse` refined `refinements` times.
    pub fn from_parts(
        coarse: Triangulation,
        fine: Triangulation,
        refinements: usize,
    ) -> Result<Self> {
        if coarse.refine_times(refinements) != fine {
            return Err(Error::InvalidMesh(format!(
                "fine mesh is not the {refinements}-fold refinement of the coarse mesh"
            )));
        }
        Ok(Self::assemble(coarse, fine, refinements))
    }

    fn assemble(coarse: Triangulation, fine: Triangulation, refinements: usize) -> Self {
        let unit = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut corner_coords = vec![unit; coarse.triangle_count()];
        for _ in 0..refinements {
            let mut next = Vec::with_capacity(4 * corner_coords.len());
            for [a, b, c] in corner_coords {
                let mid = |p: [f64; 3], q: [f64; 3]| {
                    [
                        0.5 * (p[0] + q[0]),
                        0.5 * (p[1] + q[1]),
                        0.5 * (p[2] + q[2]),
                    ]
                };
                let (ea, eb, ec) = (mid(b, c), mid(c, a), mid(a, b));
                next.push([a, ec, eb]);
                next.push([ec, b, ea]);
                next.push([eb, ea, c]);
                next.push([ec, ea, eb]);
            }
            corner_coords = next;
        }
        debug_assert_eq!(corner_coords.len(), fine.triangle_count());
        DesignPair {
            coarse: Arc::new(coarse),
            fine: Arc::new(fine),
            refinements,
            corner_coords,
        }
    }

    pub fn coarse(&self) -> &Arc<Triangulation> {
        &self.coarse
    }

    pub fn fine(&self) -> &Arc<Triangulation> {
        &self.fine
    }

    pub fn refinements(&self) -> usize {
        self.refinements
    }

    /// Coarse triangle containing fine triangle `t`.
    pub fn fine_parent(&self, t: usize) -> usize {
        t >> (2 * self.refinements)
    }

    /// Fine triangles inside coarse triangle `t`.
    pub fn fine_children(&self, t: usize) -> Range<usize> {
        let k = 1 << (2 * self.refinements);
        t * k..(t + 1) * k
    }

    /// Coarse barycentric coordinates (in the parent) of a point given by
    /// its barycentric coordinates `b` in fine triangle `t`.
    pub fn coarse_coordinates(&self, t: usize, b: [f64; 3]) -> [f64; 3] {
        let c = &self.corner_coords[t];
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = b[0] * c[0][k] + b[1] * c[1][k] + b[2] * c[2][k];
        }
        out
    }

    /// The coarse hat function of vertex `j` at a point of fine triangle `t`.
    pub fn coarse_hat(&self, j: usize, t: usize, b: [f64; 3]) -> f64 {
        let parent = self.coarse.triangle(self.fine_parent(t));
        match parent.iter().position(|&v| v == j) {
            Some(k) => self.coarse_coordinates(t, b)[k],
            None => 0.0,
        }
    }

    /// Parent map for fine vertices: a coarse triangle containing the vertex
    /// and the vertex's barycentric coordinates there.
    pub fn vertex_parent(&self, v: usize) -> (usize, [f64; 3]) {
        let t = self.fine.vertex_to_triangles(v)[0];
        let k = self.fine.triangle(t).iter().position(|&w| w == v).unwrap();
        (self.fine_parent(t), self.corner_coords[t][k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::BuiltinPolygon;
    use crate::geometry::barycentric;

    #[test]
    fn parent_map_matches_geometry() {
        let coarse = BuiltinPolygon::NonconvexQuad.design_mesh().unwrap();
        let pair = DesignPair::new(coarse, 2);
        let (c, f) = (pair.coarse(), pair.fine());
        for v in 0..c.vertex_count() {
            assert_eq!(c.vertex(v), f.vertex(v));
        }
        for v in 0..f.vertex_count() {
            let (t, b) = pair.vertex_parent(v);
            let [p, q, r] = c.triangle_points(t);
            let geo = barycentric(f.vertex(v), p, q, r);
            for k in 0..3 {
                assert!((geo[k] - b[k]).abs() < 1e-12);
            }
        }
        for t in 0..f.triangle_count() {
            assert!(pair.fine_children(pair.fine_parent(t)).contains(&t));
        }
    }

    #[test]
    fn hats_partition_unity() {
        let pair = DesignPair::new(BuiltinPolygon::ConvexQuad.design_mesh().unwrap(), 1);
        let b = [0.2, 0.3, 0.5];
        for t in 0..pair.fine().triangle_count() {
            let s: f64 = (0..pair.coarse().vertex_count())
                .map(|j| pair.coarse_hat(j, t, b))
                .sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn from_parts_checks_refinement() {
        let coarse = BuiltinPolygon::Square.design_mesh().unwrap();
        let fine = coarse.refine_times(2);
        assert!(DesignPair::from_parts(coarse.clone(), fine.clone(), 2).is_ok());
        assert!(DesignPair::from_parts(coarse, fine, 1).is_err());
    }
}
