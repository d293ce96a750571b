use crate::error::{Error, Result};
use crate::geometry::{orient, segments_intersect, signed_area, Point2};

/// A simple closed boundary loop stored counter-clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Validates the loop. Clockwise input is reversed in place so the stored
    /// orientation is always counter-clockwise.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        if let Some(v) = vertices
            .iter()
            .find(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::InvalidPolygon(format!("non-finite vertex {v:?}")));
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i] == vertices[j] {
                return Err(Error::InvalidPolygon(format!(
                    "consecutive vertices {i} and {j} coincide"
                )));
            }
        }
        if let Some((a, b)) = first_crossing(&vertices) {
            return Err(Error::InvalidPolygon(format!(
                "self-intersection: edge {a} ({a}-{}) crosses edge {b} ({b}-{})",
                (a + 1) % n,
                (b + 1) % n
            )));
        }
        let area = signed_area(&vertices);
        if area == 0.0 || !area.is_finite() {
            return Err(Error::DegeneratePolygon(area));
        }
        let mut vertices = vertices;
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        let a6 = 6.0 * self.area();
        Point2::new(cx / a6, cy / a6)
    }

    /// True when some vertex lies on the straight line through its neighbours.
    pub fn has_collinear_vertices(&self) -> bool {
        let n = self.vertices.len();
        (0..n).any(|i| {
            let prev = self.vertices[(i + n - 1) % n];
            let next = self.vertices[(i + 1) % n];
            let scale = prev.distance(self.vertices[i]) * next.distance(self.vertices[i]);
            orient(prev, self.vertices[i], next).abs() <= 1e-12 * scale
        })
    }

    /// Whether every boundary edge sees `center` strictly on its left, i.e. the
    /// polygon is star-shaped with respect to `center`.
    pub fn is_star_shaped_from(&self, center: Point2) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| orient(self.vertices[i], self.vertices[(i + 1) % n], center) > 0.0)
    }
}

/// First pair of non-adjacent edges that touch, if any.
fn first_crossing(v: &[Point2]) -> Option<(usize, usize)> {
    let n = v.len();
    for a in 0..n {
        for b in (a + 1)..n {
            let adjacent = b == a + 1 || (a == 0 && b == n - 1);
            if adjacent {
                // adjacent edges may only share their common endpoint; a fold-back overlaps
                let (shared, pa, pb) = if b == a + 1 {
                    (v[b], v[a], v[(b + 1) % n])
                } else {
                    (v[0], v[1], v[n - 1])
                };
                let da = pa - shared;
                let db = pb - shared;
                if da.cross(db) == 0.0 && da.dot(db) > 0.0 {
                    return Some((a, b));
                }
                continue;
            }
            if segments_intersect(v[a], v[(a + 1) % n], v[b], v[(b + 1) % n]) {
                return Some((a, b));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(c: &[[f64; 2]]) -> Vec<Point2> {
        c.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = Polygon::new(pts(&[[0., 0.], [0., 1.], [1., 1.], [1., 0.]])).unwrap();
        assert!((p.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bowtie_names_crossing_edges() {
        let err = Polygon::new(pts(&[[0., 0.], [1., 1.], [1., 0.], [0., 1.]])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("edge 0 (0-1) crosses edge 2 (2-3)"), "{msg}");
    }

    #[test]
    fn zero_area_rejected() {
        let err = Polygon::new(pts(&[[0., 0.], [1., 0.], [2., 0.]])).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidPolygon(_) | Error::DegeneratePolygon(_)
        ));
    }

    #[test]
    fn repeated_vertex_rejected() {
        assert!(Polygon::new(pts(&[[0., 0.], [0., 0.], [1., 0.], [0., 1.]])).is_err());
        assert!(Polygon::new(pts(&[[0., 0.], [1., 0.]])).is_err());
    }

    #[test]
    fn centroid_and_star_shape() {
        let l = Polygon::new(pts(&[
            [0., 0.],
            [2., 0.],
            [2., 1.],
            [1., 1.],
            [1., 2.],
            [0., 2.],
        ]))
        .unwrap();
        let c = l.centroid();
        assert!((c.x - 5.0 / 6.0).abs() < 1e-14 && (c.y - 5.0 / 6.0).abs() < 1e-14);
        assert!(l.is_star_shaped_from(c));
        assert!(!l.is_star_shaped_from(Point2::new(1.9, 0.1)));
        assert!(!l.has_collinear_vertices());
        let sq = Polygon::new(pts(&[[0., 0.], [0.5, 0.], [1., 0.], [1., 1.], [0., 1.]])).unwrap();
        assert!(sq.has_collinear_vertices());
    }
}
