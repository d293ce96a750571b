use crate::geometry::{barycentric, bounding_box, Point2};
use crate::mesh::Triangulation;

/// Barycentric tolerance for treating a point as inside a triangle.
pub const EDGE_TOLERANCE: f64 = 1e-12;

/// Result of a point-location query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location {
    Inside {
        triangle: usize,
        barycentric: [f64; 3],
    },
    Outside,
}

impl Location {
    pub fn is_inside(&self) -> bool {
        matches!(self, Location::Inside { .. })
    }
}

/// Uniform bucket grid over the mesh bounding box. Each bucket lists, in
/// ascending order, the triangles whose bounding boxes overlap it.
#[derive(Clone, Debug)]
pub(crate) struct Locator {
    origin: Point2,
    cell: Point2,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    pub(crate) fn build(vertices: &[Point2], triangles: &[[usize; 3]]) -> Self {
        let (lo, hi) = bounding_box(vertices);
        let side = (triangles.len() as f64).sqrt().ceil().max(1.0) as usize;
        let (nx, ny) = (side, side);
        let w = (hi.x - lo.x).max(f64::MIN_POSITIVE);
        let h = (hi.y - lo.y).max(f64::MIN_POSITIVE);
        let cell = Point2::new(w / nx as f64, h / ny as f64);
        let mut buckets = vec![Vec::new(); nx * ny];
        let slack = 1e-9 * w.max(h);
        for (t, tri) in triangles.iter().enumerate() {
            let pts = tri.map(|v| vertices[v]);
            let (tlo, thi) = bounding_box(&pts);
            let (i0, j0) = index_of(lo, cell, nx, ny, tlo - Point2::new(slack, slack));
            let (i1, j1) = index_of(lo, cell, nx, ny, thi + Point2::new(slack, slack));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t);
                }
            }
        }
        Locator {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn candidates(&self, p: Point2) -> &[usize] {
        let span = Point2::new(self.cell.x * self.nx as f64, self.cell.y * self.ny as f64);
        let tol = 1e-9 * span.x.max(span.y);
        let rel = p - self.origin;
        if rel.x < -tol || rel.y < -tol || rel.x > span.x + tol || rel.y > span.y + tol {
            return &[];
        }
        let (i, j) = index_of(self.origin, self.cell, self.nx, self.ny, p);
        &self.buckets[j * self.nx + i]
    }
}

fn index_of(origin: Point2, cell: Point2, nx: usize, ny: usize, p: Point2) -> (usize, usize) {
    let fi = ((p.x - origin.x) / cell.x).floor();
    let fj = ((p.y - origin.y) / cell.y).floor();
    let i = fi.clamp(0.0, (nx - 1) as f64) as usize;
    let j = fj.clamp(0.0, (ny - 1) as f64) as usize;
    (i, j)
}

impl Triangulation {
    /// Finds the lowest-index triangle containing `p` (edges and vertices
    /// count as inside within [`EDGE_TOLERANCE`]).
    pub fn locate(&self, p: Point2) -> Location {
        for &t in self.locator().candidates(p) {
            let [a, b, c] = self.triangle_points(t);
            let bc = barycentric(p, a, b, c);
            if bc.iter().all(|&x| x >= -EDGE_TOLERANCE) {
                return Location::Inside {
                    triangle: t,
                    barycentric: bc,
                };
            }
        }
        Location::Outside
    }

    /// Reference point location by scanning every triangle.
    pub fn locate_brute_force(&self, p: Point2) -> Location {
        for t in 0..self.triangle_count() {
            let [a, b, c] = self.triangle_points(t);
            let bc = barycentric(p, a, b, c);
            if bc.iter().all(|&x| x >= -EDGE_TOLERANCE) {
                return Location::Inside {
                    triangle: t,
                    barycentric: bc,
                };
            }
        }
        Location::Outside
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::triangulate::{polygon_from, triangulate};

    fn lshape() -> Triangulation {
        let p =
            polygon_from(&[[0., 0.], [2., 0.], [2., 1.], [1., 1.], [1., 2.], [0., 2.]]).unwrap();
        triangulate(&p, 0.05).unwrap()
    }

    #[test]
    fn centroid_found_in_own_triangle() {
        let m = lshape();
        for t in 0..m.triangle_count() {
            let [a, b, c] = m.triangle_points(t);
            let p = (1.0 / 3.0) * (a + b + c);
            match m.locate(p) {
                Location::Inside {
                    triangle,
                    barycentric,
                } => {
                    assert_eq!(triangle, t);
                    assert!(barycentric.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
                }
                Location::Outside => panic!("centroid of {t} not found"),
            }
        }
    }

    #[test]
    fn vertices_and_notch() {
        let m = lshape();
        for v in 0..m.vertex_count() {
            assert!(m.locate(m.vertex(v)).is_inside());
        }
        assert_eq!(m.locate(Point2::new(1.5, 1.5)), Location::Outside);
        assert_eq!(m.locate(Point2::new(-0.1, 0.5)), Location::Outside);
        assert_eq!(m.locate(Point2::new(5.0, 5.0)), Location::Outside);
    }

    #[test]
    fn agrees_with_brute_force() {
        let m = lshape();
        let n = 57;
        for i in 0..=n {
            for j in 0..=n {
                let p = Point2::new(
                    -0.1 + 2.2 * i as f64 / n as f64,
                    -0.1 + 2.2 * j as f64 / n as f64,
                );
                assert_eq!(m.locate(p), m.locate_brute_force(p), "{p:?}");
            }
        }
    }
}
