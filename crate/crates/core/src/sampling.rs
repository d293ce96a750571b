//! Equally spaced sample grids over a mesh's bounding box, restricted to Ω.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::FeField;
use crate::geometry::{bounding_box, Point2};
use crate::mesh::{Location, Triangulation};

/// `resolution × resolution` points over the bounding box; points outside Ω
/// are dropped. Point location is done once at construction.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    mesh: Arc<Triangulation>,
    resolution: usize,
    points: Vec<Point2>,
    locations: Vec<(usize, [f64; 3])>,
}

impl SampleGrid {
    pub fn new(mesh: Arc<Triangulation>, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        let (lo, hi) = bounding_box(mesh.vertices());
        let step = |a: f64, b: f64, i: usize| {
            if i == resolution - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (resolution - 1) as f64
            }
        };
        let found: Vec<Option<(Point2, usize, [f64; 3])>> = (0..resolution * resolution)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % resolution, k / resolution);
                let p = Point2::new(step(lo.x, hi.x, i), step(lo.y, hi.y, j));
                match mesh.locate(p) {
                    Location::Inside {
                        triangle,
                        barycentric,
                    } => Some((p, triangle, barycentric)),
                    Location::Outside => None,
                }
            })
            .collect();
        let mut points = Vec::new();
        let mut locations = Vec::new();
        for (p, t, b) in found.into_iter().flatten() {
            points.push(p);
            locations.push((t, b));
        }
        Ok(SampleGrid {
            mesh,
            resolution,
            points,
            locations,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn locations(&self) -> &[(usize, [f64; 3])] {
        &self.locations
    }

    fn check_mesh(&self, field: &FeField) {
        let m = field.space().mesh();
        assert!(
            Arc::ptr_eq(m, &self.mesh) || **m == *self.mesh,
            "field lives on a different mesh than the sample grid"
        );
    }

    pub fn evaluate(&self, field: &FeField) -> Vec<f64> {
        self.check_mesh(field);
        self.locations
            .par_iter()
            .map(|&(t, b)| field.eval_in(t, b))
            .collect()
    }

    pub fn max_error(&self, field: &FeField, exact: impl Fn(Point2) -> f64 + Sync) -> f64 {
        self.check_mesh(field);
        self.locations
            .par_iter()
            .zip(&self.points)
            .map(|(&(t, b), &p)| (field.eval_in(t, b) - exact(p)).abs())
            .reduce(|| 0.0, f64::max)
    }

    pub fn max_difference(&self, a: &FeField, b: &FeField) -> f64 {
        self.check_mesh(a);
        self.check_mesh(b);
        self.locations
            .par_iter()
            .map(|&(t, bc)| (a.eval_in(t, bc) - b.eval_in(t, bc)).abs())
            .reduce(|| 0.0, f64::max)
    }

    /// `x,y,value` rows for the grid points inside Ω.
    pub fn surface_csv(&self, values: &[f64]) -> String {
        let mut s = String::from("x,y,value\n");
        for (p, v) in self.points.iter().zip(values) {
            writeln!(s, "{:?},{:?},{:?}", p.x, p.y, v).unwrap();
        }
        s
    }

    pub fn write_surface(&self, path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.surface_csv(values)).map_err(|e| Error::io(path, e))
    }
}
