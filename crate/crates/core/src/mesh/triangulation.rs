use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{inradius, orient, signed_area, triangle_area, Point2};
use crate::mesh::locate::Locator;

/// An undirected mesh edge with its (one or two) incident triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    pub triangles: Vec<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles.len() == 1
    }
}

/// A conforming, counter-clockwise triangulation of a simple polygon.
///
/// Local edge `e` of a triangle is the edge opposite local vertex `e`.
#[derive(Clone, Debug)]
pub struct Triangulation {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    mesh_size: f64,
    vertex_to_triangles: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    triangle_edges: Vec<[usize; 3]>,
    boundary_loop: Vec<usize>,
    locator: Locator,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.triangles == other.triangles
    }
}

impl Triangulation {
    /// Builds the adjacency structures and checks every mesh invariant.
    pub fn new(vertices: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        let nv = vertices.len();
        if let Some(v) = vertices
            .iter()
            .position(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::InvalidMesh(format!("vertex {v} is not finite")));
        }
        let mut vertex_to_triangles = vec![Vec::new(); nv];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references vertex {v}, but there are only {nv} vertices"
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            if orient(a, b, c) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not counter-clockwise with positive area"
                )));
            }
            for &v in tri {
                vertex_to_triangles[v].push(t);
            }
        }
        if let Some(v) = vertex_to_triangles.iter().position(Vec::is_empty) {
            return Err(Error::InvalidMesh(format!(
                "vertex {v} belongs to no triangle"
            )));
        }

        // edges in first-seen order: (triangle, local edge)
        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0; 3];
            for (e, slot) in local.iter_mut().enumerate() {
                let (a, b) = (tri[(e + 1) % 3], tri[(e + 2) % 3]);
                if let Some(other) = directed.insert((a, b), t) {
                    return Err(Error::InvalidMesh(format!(
                        "edge {a}-{b} has the same orientation in triangles {other} and {t}"
                    )));
                }
                let key = [a.min(b), a.max(b)];
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: key,
                        triangles: Vec::new(),
                    });
                    edges.len() - 1
                });
                edges[id].triangles.push(t);
                if edges[id].triangles.len() > 2 {
                    return Err(Error::InvalidMesh(format!(
                        "edge {}-{} is shared by more than two triangles",
                        key[0], key[1]
                    )));
                }
                *slot = id;
            }
            triangle_edges.push(local);
        }

        let mut boundary = vec![false; nv];
        // boundary successor along the counter-clockwise loop
        let mut next_on_boundary: HashMap<usize, usize> = HashMap::new();
        for edge in edges.iter().filter(|e| e.is_boundary()) {
            let t = edge.triangles[0];
            let tri = triangles[t];
            let e = triangle_edges[t]
                .iter()
                .position(|&id| edges[id].vertices == edge.vertices)
                .unwrap();
            let (a, b) = (tri[(e + 1) % 3], tri[(e + 2) % 3]);
            boundary[a] = true;
            boundary[b] = true;
            if next_on_boundary.insert(a, b).is_some() {
                return Err(Error::InvalidMesh(format!(
                    "boundary is not a simple loop at vertex {a}"
                )));
            }
        }
        let start = *next_on_boundary
            .keys()
            .min()
            .ok_or_else(|| Error::InvalidMesh("mesh has no boundary edges".into()))?;
        let mut boundary_loop = vec![start];
        let mut cur = next_on_boundary[&start];
        while cur != start {
            if boundary_loop.len() > next_on_boundary.len() {
                return Err(Error::InvalidMesh("boundary loop does not close".into()));
            }
            boundary_loop.push(cur);
            cur = *next_on_boundary.get(&cur).ok_or_else(|| {
                Error::InvalidMesh(format!("boundary loop breaks at vertex {cur}"))
            })?;
        }
        if boundary_loop.len() != next_on_boundary.len() {
            return Err(Error::InvalidMesh(
                "boundary has more than one component (holes are not supported)".into(),
            ));
        }

        let tri_area: f64 = triangles
            .iter()
            .map(|t| triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]))
            .sum();
        let loop_points: Vec<Point2> = boundary_loop.iter().map(|&v| vertices[v]).collect();
        let loop_area = signed_area(&loop_points);
        if (tri_area - loop_area).abs() > 1e-10 * loop_area.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidMesh(format!(
                "triangles cover area {tri_area} but the boundary encloses {loop_area} (overlap or fold)"
            )));
        }

        let mesh_size = edges
            .iter()
            .map(|e| vertices[e.vertices[0]].distance(vertices[e.vertices[1]]))
            .fold(0.0, f64::max);
        let locator = Locator::build(&vertices, &triangles);
        Ok(Triangulation {
            vertices,
            triangles,
            boundary,
            mesh_size,
            vertex_to_triangles,
            edges,
            triangle_edges,
            boundary_loop,
            locator,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point2 {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn boundary_vertex_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.boundary[v])
            .collect()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| !self.boundary[v])
            .collect()
    }

    /// Boundary vertices in counter-clockwise order, starting from the lowest index.
    pub fn boundary_loop(&self) -> &[usize] {
        &self.boundary_loop
    }

    /// Longest edge length, |△|.
    pub fn mesh_size(&self) -> f64 {
        self.mesh_size
    }

    pub fn vertex_to_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_to_triangles[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Global edge ids of the three local edges of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        triangle_area(a, b, c)
    }

    pub(crate) fn locator(&self) -> &Locator {
        &self.locator
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertices.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                kind: "vertex",
                index: v,
                count: self.vertices.len(),
            })
        }
    }

    pub fn check_triangle(&self, t: usize) -> Result<()> {
        if t < self.triangles.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                kind: "triangle",
                index: t,
                count: self.triangles.len(),
            })
        }
    }

    /// Vertex-to-vertex adjacency through shared triangles, sorted.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nbrs = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let [a, b] = e.vertices;
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        for n in &mut nbrs {
            n.sort_unstable();
        }
        nbrs
    }

    /// β = max over triangles of |△| / ρ_T.
    pub fn quasi_uniformity(&self) -> Result<f64> {
        let mut beta: f64 = 0.0;
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_points(t);
            let rho = inradius(a, b, c);
            if rho <= 0.0 {
                return Err(Error::DegenerateTriangle(t));
            }
            beta = beta.max(self.mesh_size / rho);
        }
        Ok(beta)
    }

    /// Splits every triangle into four through its edge midpoints.
    ///
    /// Existing vertices keep their indices; midpoints follow in edge order.
    /// Children of triangle `t` are `4t..4t+4`, corner children first.
    pub fn refine_uniform(&self) -> Triangulation {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(
            self.edges
                .iter()
                .map(|e| self.vertices[e.vertices[0]].midpoint(self.vertices[e.vertices[1]])),
        );
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            let [ea, eb, ec] = self.triangle_edges[t].map(|e| nv + e);
            // ea is opposite a, i.e. the midpoint of b-c
            triangles.push([a, ec, eb]);
            triangles.push([ec, b, ea]);
            triangles.push([eb, ea, c]);
            triangles.push([ec, ea, eb]);
        }
        Triangulation::new(vertices, triangles)
            .expect("midpoint subdivision of a valid mesh is valid")
    }

    pub fn refine_times(&self, times: usize) -> Triangulation {
        let mut mesh = self.clone();
        for _ in 0..times {
            mesh = mesh.refine_uniform();
        }
        mesh
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_square_two() -> Triangulation {
        let v = vec![
            Point2::new(0., 0.),
            Point2::new(1., 0.),
            Point2::new(1., 1.),
            Point2::new(0., 1.),
        ];
        Triangulation::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn square_adjacency() {
        let m = unit_square_two();
        assert_eq!(m.edges().len(), 5);
        assert_eq!(m.boundary_loop(), &[0, 1, 2, 3]);
        assert!(m.boundary_vertex_flags().iter().all(|&b| b));
        assert!((m.mesh_size() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn refinement_counts_and_area() {
        let m = unit_square_two();
        let r = m.refine_uniform();
        // 9 vertices = 4 + 5 edges, 8 triangles
        assert_eq!(r.vertex_count(), 9);
        assert_eq!(r.triangle_count(), 8);
        assert!((r.area() - 1.0).abs() < 1e-15);
        assert!((r.mesh_size() - m.mesh_size() / 2.0).abs() < 1e-15);
        assert_eq!(r.boundary_vertices().len(), 8);
        assert_eq!(r.interior_vertices(), vec![5]);
        let rr = r.refine_uniform();
        assert_eq!(rr.triangle_count(), 32);
    }

    #[test]
    fn boundary_flag_iff_single_owner_edge() {
        let m = unit_square_two().refine_times(2);
        let mut on_boundary_edge = vec![false; m.vertex_count()];
        for e in m.edges().iter().filter(|e| e.triangles.len() == 1) {
            on_boundary_edge[e.vertices[0]] = true;
            on_boundary_edge[e.vertices[1]] = true;
        }
        assert_eq!(on_boundary_edge, m.boundary_vertex_flags());
    }

    #[test]
    fn rejects_clockwise_triangle() {
        let v = vec![
            Point2::new(0., 0.),
            Point2::new(1., 0.),
            Point2::new(0., 1.),
        ];
        assert!(Triangulation::new(v, vec![[0, 2, 1]]).is_err());
    }

    #[test]
    fn rejects_overlap() {
        // two copies of the same triangle with a shifted vertex fold over each other
        let v = vec![
            Point2::new(0., 0.),
            Point2::new(1., 0.),
            Point2::new(0., 1.),
            Point2::new(0.5, 0.5),
        ];
        assert!(Triangulation::new(v.clone(), vec![[0, 1, 2], [0, 1, 3]]).is_err());
    }

    #[test]
    fn quasi_uniformity_values() {
        let h = 3f64.sqrt() / 2.0;
        let eq = Triangulation::new(
            vec![
                Point2::new(0., 0.),
                Point2::new(1., 0.),
                Point2::new(0.5, h),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!((eq.quasi_uniformity().unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-12);

        let right = Triangulation::new(
            vec![
                Point2::new(0., 0.),
                Point2::new(1., 0.),
                Point2::new(0., 1.),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        // r = (a + b - c) / 2 for a right triangle with legs a, b and hypotenuse c
        let r = (1.0 + 1.0 - 2f64.sqrt()) / 2.0;
        let beta = right.quasi_uniformity().unwrap();
        assert!((beta - 2f64.sqrt() / r).abs() < 1e-12);
        let refined = right.refine_times(2).quasi_uniformity().unwrap();
        assert!((refined - beta).abs() < 1e-9);
    }
}
