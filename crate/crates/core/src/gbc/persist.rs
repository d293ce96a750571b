//! A [`GbcSet`] on disk: `coarse.json`, `fine.json`, `manifest.json` and one
//! `fields/S_xxxx.txt` or `fields/R_xxxx.txt` per field, holding one
//! coefficient per line in DOF order. Values are written in shortest
//! round-trip form, so a reload reproduces every evaluation bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{FeField, FeSpace, QuadratureRule, SolverConfig, SolverKind};
use crate::gbc::{DesignPair, FieldId, GbcSet, Provenance};
use crate::mesh::io::{read_mesh, write_mesh};

const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureInfo {
    pub stiffness: String,
    pub mass: String,
    pub load: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub degree: usize,
    pub refinements: usize,
    pub solver: String,
    pub tolerance: f64,
    pub provenance: String,
    pub ring: Option<usize>,
    pub quadrature: QuadratureInfo,
    pub dof_count: usize,
    pub boundary_fields: Vec<usize>,
    pub interior_fields: Vec<usize>,
}

impl Manifest {
    pub fn describe(set: &GbcSet) -> Result<Self> {
        let n = set.degree();
        let (provenance, ring) = match set.provenance() {
            Provenance::Global => ("global".to_string(), None),
            Provenance::Local { ring } => ("local".to_string(), Some(ring)),
        };
        let solver = match set.solver_config().kind {
            SolverKind::Cholesky => "cholesky",
            SolverKind::ConjugateGradient => "cg",
        };
        Ok(Manifest {
            format: FORMAT_VERSION,
            degree: n,
            refinements: set.pair().refinements(),
            solver: solver.into(),
            tolerance: set.solver_config().tolerance,
            provenance,
            ring,
            quadrature: QuadratureInfo {
                stiffness: QuadratureRule::exact_for(2 * n - 2)?.name(),
                mass: QuadratureRule::exact_for(2 * n)?.name(),
                load: QuadratureRule::exact_for(n + 1)?.name(),
            },
            dof_count: set.space().dof_count(),
            boundary_fields: set.boundary_fields().keys().copied().collect(),
            interior_fields: set.interior_fields().keys().copied().collect(),
        })
    }
}

fn coefficient_text(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 24);
    for v in values {
        writeln!(s, "{v:?}").unwrap();
    }
    s
}

pub fn save(set: &GbcSet, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let fields = dir.join("fields");
    fs::create_dir_all(&fields).map_err(|e| Error::io(&fields, e))?;
    write_mesh(set.pair().coarse(), dir.join("coarse.json"))?;
    write_mesh(set.pair().fine(), dir.join("fine.json"))?;
    let manifest = Manifest::describe(set)?;
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    for id in set.field_ids() {
        let path = fields.join(format!("{}.txt", id.file_stem()));
        let text = coefficient_text(set.field(id).unwrap().coefficients());
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<Manifest> {
    let path = dir.as_ref().join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(&path, e.to_string()))
}

fn read_coefficients(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values = text
        .lines()
        .enumerate()
        .map(|(k, line)| {
            line.trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(path, format!("line {}: {e}", k + 1)))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != expected {
        return Err(Error::parse(
            path,
            format!("expected {expected} coefficients, found {}", values.len()),
        ));
    }
    Ok(values)
}

pub fn load(dir: impl AsRef<Path>) -> Result<GbcSet> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let mpath = dir.join("manifest.json");
    if manifest.format != FORMAT_VERSION {
        return Err(Error::parse(
            &mpath,
            format!("unsupported format {}", manifest.format),
        ));
    }
    let coarse = read_mesh(dir.join("coarse.json"))?;
    let fine = read_mesh(dir.join("fine.json"))?;
    let pair = DesignPair::from_parts(coarse, fine, manifest.refinements)?;
    let space = Arc::new(FeSpace::new(pair.fine().clone(), manifest.degree)?);
    if space.dof_count() != manifest.dof_count {
        return Err(Error::parse(
            &mpath,
            format!(
                "manifest lists {} DOFs, space has {}",
                manifest.dof_count,
                space.dof_count()
            ),
        ));
    }
    let provenance = match (manifest.provenance.as_str(), manifest.ring) {
        ("global", _) => Provenance::Global,
        ("local", Some(ring)) => Provenance::Local { ring },
        (other, _) => return Err(Error::parse(&mpath, format!("bad provenance `{other}`"))),
    };
    let kind = match manifest.solver.as_str() {
        "cholesky" => SolverKind::Cholesky,
        "cg" => SolverKind::ConjugateGradient,
        other => return Err(Error::parse(&mpath, format!("bad solver `{other}`"))),
    };
    let mut boundary = BTreeMap::new();
    let mut interior = BTreeMap::new();
    let ids = manifest
        .boundary_fields
        .iter()
        .map(|&v| FieldId::Boundary(v))
        .chain(
            manifest
                .interior_fields
                .iter()
                .map(|&v| FieldId::Interior(v)),
        );
    for id in ids {
        let path = dir.join("fields").join(format!("{}.txt", id.file_stem()));
        let field = FeField::new(space.clone(), read_coefficients(&path, space.dof_count())?)?;
        match id {
            FieldId::Boundary(v) => boundary.insert(v, field),
            FieldId::Interior(v) => interior.insert(v, field),
        };
    }
    let set = GbcSet {
        pair,
        space,
        boundary,
        interior,
        provenance,
        solver: SolverConfig {
            kind,
            tolerance: manifest.tolerance,
        },
        solve_seconds: BTreeMap::new(),
    };
    set.check_complete()?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::BuiltinPolygon;
    use crate::gbc::GbcEngine;

    #[test]
    fn round_trip_is_bit_identical() {
        let pair = DesignPair::new(BuiltinPolygon::NonconvexQuad.design_mesh().unwrap(), 1);
        let set = GbcEngine::new(pair, 2, SolverConfig::default())
            .unwrap()
            .compute_global()
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        save(&set, dir.path()).unwrap();
        let back = load(dir.path()).unwrap();
        assert_eq!(back.field_ids(), set.field_ids());
        for id in set.field_ids() {
            let (a, b) = (set.field(id).unwrap(), back.field(id).unwrap());
            assert!(a
                .coefficients()
                .iter()
                .zip(b.coefficients())
                .all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        let m = read_manifest(dir.path()).unwrap();
        assert_eq!(m.degree, 2);
        assert_eq!(m.provenance, "global");
        assert_eq!(m.quadrature.mass, "symmetric-6pt-deg4");
    }

    #[test]
    fn tampered_files_rejected() {
        let pair = DesignPair::new(BuiltinPolygon::Square.design_mesh().unwrap(), 1);
        let set = GbcEngine::new(pair, 1, SolverConfig::default())
            .unwrap()
            .compute_global()
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        save(&set, dir.path()).unwrap();
        let f = dir.path().join("fields").join("S_0000.txt");
        let text = fs::read_to_string(&f).unwrap();
        fs::write(&f, text.lines().skip(1).collect::<Vec<_>>().join("\n")).unwrap();
        assert!(load(dir.path()).is_err());
        fs::write(&f, text).unwrap();
        assert!(load(dir.path()).is_ok());
        let fine = dir.path().join("fine.json");
        write_mesh(&set.pair().coarse().refine_times(2), &fine).unwrap();
        assert!(load(dir.path()).is_err());
    }
}
