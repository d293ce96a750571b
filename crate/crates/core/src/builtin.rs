//! Built-in test domains with fixed coordinates.

use std::fmt;
use std::str::FromStr;

use crate::error::Result;
use crate::mesh::triangulate::{initial_triangulation, polygon_from};
use crate::mesh::{Polygon, Triangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinPolygon {
    /// Unit square with only its four corners as design vertices.
    Square,
    ConvexQuad,
    NonconvexQuad,
    LShape,
}

impl BuiltinPolygon {
    pub const ALL: [BuiltinPolygon; 4] = [
        BuiltinPolygon::Square,
        BuiltinPolygon::ConvexQuad,
        BuiltinPolygon::NonconvexQuad,
        BuiltinPolygon::LShape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinPolygon::Square => "square",
            BuiltinPolygon::ConvexQuad => "convex-quad",
            BuiltinPolygon::NonconvexQuad => "nonconvex-quad",
            BuiltinPolygon::LShape => "lshape",
        }
    }

    pub fn corners(self) -> &'static [[f64; 2]] {
        match self {
            BuiltinPolygon::Square => &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            BuiltinPolygon::ConvexQuad => &[[0.0, 0.0], [2.0, 0.2], [1.8, 1.9], [0.1, 1.5]],
            BuiltinPolygon::NonconvexQuad => &[[0.0, 0.0], [2.0, 0.0], [1.0, 0.9], [0.2, 2.0]],
            BuiltinPolygon::LShape => &[
                [0.0, 0.0],
                [2.0, 0.0],
                [2.0, 1.0],
                [1.0, 1.0],
                [1.0, 2.0],
                [0.0, 2.0],
            ],
        }
    }

    /// Uniform refinements applied to the initial triangulation to obtain the
    /// design mesh. Three passes on the two-triangle quads give 32 boundary
    /// and 49 interior design vertices.
    pub fn design_refinements(self) -> usize {
        match self {
            BuiltinPolygon::Square => 0,
            BuiltinPolygon::ConvexQuad | BuiltinPolygon::NonconvexQuad => 3,
            BuiltinPolygon::LShape => 2,
        }
    }

    /// Default number of refinements from design to computation mesh.
    pub fn default_computation_refinements(self) -> usize {
        match self {
            BuiltinPolygon::Square => 3,
            _ => 1,
        }
    }

    pub fn polygon(self) -> Polygon {
        polygon_from(self.corners()).expect("built-in polygons are valid")
    }

    pub fn design_mesh(self) -> Result<Triangulation> {
        Ok(initial_triangulation(&self.polygon())?.refine_times(self.design_refinements()))
    }
}

impl fmt::Display for BuiltinPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinPolygon {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BuiltinPolygon::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = BuiltinPolygon::ALL.iter().map(|p| p.name()).collect();
                format!(
                    "unknown polygon `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}
