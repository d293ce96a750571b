use crate::error::{Error, Result};
use crate::geometry::{barycentric, orient, Point2};
use crate::mesh::{Polygon, Triangulation};

/// How the initial coarse triangulation of a polygon was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialScheme {
    EarClipping,
    CentroidFan,
}

/// Ear clipping for polygons whose vertices are all genuine corners; a fan
/// from the centroid when the loop carries collinear (degenerate) vertices
/// and is star-shaped about its centroid.
pub fn initial_scheme(polygon: &Polygon) -> InitialScheme {
    if polygon.has_collinear_vertices() && polygon.is_star_shaped_from(polygon.centroid()) {
        InitialScheme::CentroidFan
    } else {
        InitialScheme::EarClipping
    }
}

/// Triangulates `polygon` and refines uniformly until |△| ≤ `target_size`.
pub fn triangulate(polygon: &Polygon, target_size: f64) -> Result<Triangulation> {
    if !(target_size > 0.0) || !target_size.is_finite() {
        return Err(Error::InvalidPolygon(format!(
            "target size must be positive, got {target_size}"
        )));
    }
    if polygon.area() <= 0.0 {
        return Err(Error::DegeneratePolygon(polygon.area()));
    }
    let mut mesh = initial_triangulation(polygon)?;
    while mesh.mesh_size() > target_size {
        mesh = mesh.refine_uniform();
    }
    Ok(mesh)
}

pub fn initial_triangulation(polygon: &Polygon) -> Result<Triangulation> {
    match initial_scheme(polygon) {
        InitialScheme::CentroidFan => centroid_fan(polygon),
        InitialScheme::EarClipping => ear_clip(polygon),
    }
}

fn centroid_fan(polygon: &Polygon) -> Result<Triangulation> {
    let n = polygon.len();
    let mut vertices = polygon.vertices().to_vec();
    vertices.push(polygon.centroid());
    let triangles = (0..n).map(|i| [i, (i + 1) % n, n]).collect();
    Triangulation::new(vertices, triangles)
}

/// Deterministic ear clipping: always clips the lowest-position valid ear.
fn ear_clip(polygon: &Polygon) -> Result<Triangulation> {
    let pts = polygon.vertices();
    let mut remaining: Vec<usize> = (0..pts.len()).collect();
    let mut triangles = Vec::with_capacity(pts.len() - 2);
    while remaining.len() > 3 {
        let m = remaining.len();
        let ear = (0..m).find(|&i| {
            let (a, b, c) = (
                remaining[(i + m - 1) % m],
                remaining[i],
                remaining[(i + 1) % m],
            );
            if orient(pts[a], pts[b], pts[c]) <= 0.0 {
                return false;
            }
            remaining.iter().all(|&v| {
                if v == a || v == b || v == c {
                    return true;
                }
                let bc = barycentric(pts[v], pts[a], pts[b], pts[c]);
                bc.iter().any(|&x| x < 0.0)
            })
        });
        let Some(i) = ear else {
            return Err(Error::InvalidPolygon(
                "ear clipping found no valid ear (polygon not simple?)".into(),
            ));
        };
        let m = remaining.len();
        triangles.push([
            remaining[(i + m - 1) % m],
            remaining[i],
            remaining[(i + 1) % m],
        ]);
        remaining.remove(i);
    }
    let [a, b, c] = [remaining[0], remaining[1], remaining[2]];
    if orient(pts[a], pts[b], pts[c]) <= 0.0 {
        return Err(Error::InvalidPolygon(
            "ear clipping left a degenerate final triangle".into(),
        ));
    }
    triangles.push([a, b, c]);
    Triangulation::new(pts.to_vec(), triangles)
}

/// Convenience for tests and built-ins.
pub fn polygon_from(coords: &[[f64; 2]]) -> Result<Polygon> {
    Polygon::new(coords.iter().map(|&c| Point2::from(c)).collect())
}
