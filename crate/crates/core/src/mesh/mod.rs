//! Polygons, triangulations, refinement, star^k rings and point location.

pub mod io;
mod locate;
mod polygon;
mod star;
pub mod triangulate;
mod triangulation;

pub use locate::{Location, EDGE_TOLERANCE};
pub use polygon::Polygon;
pub use star::{StarCenter, StarRegion};
pub use triangulate::{triangulate, InitialScheme};
pub use triangulation::{Edge, Triangulation};
