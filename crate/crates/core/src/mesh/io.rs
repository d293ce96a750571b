//! Text mesh files: a JSON document with `vertices` ([x, y] pairs) and
//! `triangles` (0-based [i, j, k] triples). A document without `triangles`
//! describes a bare polygon loop.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::{Polygon, Triangulation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub vertices: Vec<Point2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangles: Option<Vec<[usize; 3]>>,
}

/// What a mesh file turned out to contain.
#[derive(Clone, Debug)]
pub enum MeshSource {
    Polygon(Polygon),
    Mesh(Triangulation),
}

pub fn to_json(mesh: &Triangulation) -> String {
    let doc = MeshDocument {
        vertices: mesh.vertices().to_vec(),
        triangles: Some(mesh.triangles().to_vec()),
    };
    serde_json::to_string_pretty(&doc).expect("mesh documents always serialize")
}

pub fn write_mesh(mesh: &Triangulation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(mesh)).map_err(|e| Error::io(path, e))
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Triangulation> {
    let path = path.as_ref();
    match read_source(path)? {
        MeshSource::Mesh(m) => Ok(m),
        MeshSource::Polygon(_) => Err(Error::parse(path, "document has no `triangles` array")),
    }
}

/// Reads either a full mesh or a polygon loop, validating every invariant.
pub fn read_source(path: impl AsRef<Path>) -> Result<MeshSource> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: MeshDocument =
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
    from_document(doc)
}

pub fn from_document(doc: MeshDocument) -> Result<MeshSource> {
    match doc.triangles {
        Some(tris) => Ok(MeshSource::Mesh(Triangulation::new(doc.vertices, tris)?)),
        None => Ok(MeshSource::Polygon(Polygon::new(doc.vertices)?)),
    }
}
