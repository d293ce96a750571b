use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_load_on, assemble_stiffness, assemble_stiffness_on};
use crate::fem::{CsrMatrix, DirichletSolver, FeField, FeSpace, SolverConfig};
use crate::gbc::DesignPair;
use crate::mesh::{StarCenter, StarRegion};

/// Which coordinate function: S_i for a boundary vertex or R_j for an
/// interior vertex, both indexed by coarse vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldId {
    Boundary(usize),
    Interior(usize),
}

impl FieldId {
    pub fn vertex(self) -> usize {
        match self {
            FieldId::Boundary(v) | FieldId::Interior(v) => v,
        }
    }

    /// `S_0007` or `R_0012`.
    pub fn file_stem(self) -> String {
        match self {
            FieldId::Boundary(v) => format!("S_{v:04}"),
            FieldId::Interior(v) => format!("R_{v:04}"),
        }
    }

    pub fn parse_stem(stem: &str) -> Option<FieldId> {
        let (kind, num) = stem.split_once('_')?;
        let v = num.parse().ok()?;
        match kind {
            "S" => Some(FieldId::Boundary(v)),
            "R" => Some(FieldId::Interior(v)),
            _ => None,
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.file_stem())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Global,
    Local { ring: usize },
}

/// A k-local field together with the region it was solved on.
#[derive(Clone, Debug)]
pub struct LocalGbc {
    pub field: FeField,
    pub region: StarRegion,
    pub saturated: bool,
}

/// Assembled stiffness and factored global Dirichlet solver for one design
/// pair and element degree. All fields are solved against the same factor.
#[derive(Debug)]
pub struct GbcEngine {
    pair: DesignPair,
    space: Arc<FeSpace>,
    stiffness: CsrMatrix,
    config: SolverConfig,
    solver: DirichletSolver,
    // coarse parent triangle and coarse barycentric coordinates of each DOF
    dof_coarse: Vec<(usize, [f64; 3])>,
}

impl GbcEngine {
    pub fn new(pair: DesignPair, degree: usize, config: SolverConfig) -> Result<Self> {
        let space = Arc::new(FeSpace::new(pair.fine().clone(), degree)?);
        let stiffness = assemble_stiffness(&space)?;
        let free: Vec<bool> = space.boundary_dof_flags().iter().map(|b| !b).collect();
        let solver = DirichletSolver::new(&stiffness, &free, config)?;
        let n = degree as f64;
        let mut dof_coarse = vec![(usize::MAX, [0.0; 3]); space.dof_count()];
        for t in 0..pair.fine().triangle_count() {
            for (local, &d) in space.element_dofs(t).iter().enumerate() {
                if dof_coarse[d].0 == usize::MAX {
                    let a = space.basis().indices()[local];
                    let b = a.map(|k| k as f64 / n);
                    dof_coarse[d] = (pair.fine_parent(t), pair.coarse_coordinates(t, b));
                }
            }
        }
        Ok(GbcEngine {
            pair,
            space,
            stiffness,
            config,
            solver,
            dof_coarse,
        })
    }

    pub fn pair(&self) -> &DesignPair {
        &self.pair
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn solver(&self) -> &DirichletSolver {
        &self.solver
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.config
    }

    fn coarse_hat_at_dof(&self, j: usize, d: usize) -> f64 {
        let (t, b) = self.dof_coarse[d];
        match self.pair.coarse().triangle(t).iter().position(|&v| v == j) {
            Some(k) => b[k],
            None => 0.0,
        }
    }

    fn check_boundary(&self, i: usize) -> Result<()> {
        self.pair.coarse().check_vertex(i)?;
        if !self.pair.coarse().is_boundary_vertex(i) {
            return Err(Error::NotBoundaryVertex(i));
        }
        Ok(())
    }

    fn check_interior(&self, j: usize) -> Result<()> {
        self.pair.coarse().check_vertex(j)?;
        if self.pair.coarse().is_boundary_vertex(j) {
            return Err(Error::NotInteriorVertex(j));
        }
        Ok(())
    }

    /// Dirichlet data for S_i: the coarse hat of v_i restricted to ∂Ω, at
    /// every boundary DOF of the fine space (zero at all other DOFs).
    pub fn boundary_trace_hat(&self, i: usize) -> Result<Vec<f64>> {
        self.check_boundary(i)?;
        Ok((0..self.space.dof_count())
            .map(|d| {
                if self.space.is_boundary_dof(d) {
                    self.coarse_hat_at_dof(i, d)
                } else {
                    0.0
                }
            })
            .collect())
    }

    /// The load vector ⟨h_j, B_d⟩ for the coarse hat h_j, integrated exactly.
    pub fn hat_load(&self, j: usize) -> Result<Vec<f64>> {
        self.pair.coarse().check_vertex(j)?;
        let triangles: Vec<usize> = self
            .pair
            .coarse()
            .vertex_to_triangles(j)
            .iter()
            .flat_map(|&t| self.pair.fine_children(t))
            .collect();
        let mut sorted = triangles;
        sorted.sort_unstable();
        assemble_load_on(&self.space, &sorted, self.space.degree() + 1, |t, _, b| {
            self.pair.coarse_hat(j, t, b)
        })
    }

    fn field(&self, coeffs: Vec<f64>) -> FeField {
        FeField::new(self.space.clone(), coeffs).expect("solver output has the space dimension")
    }

    pub fn solve_boundary_gbc(&self, i: usize) -> Result<FeField> {
        let g = self.boundary_trace_hat(i)?;
        let zero = vec![0.0; self.space.dof_count()];
        Ok(self.field(self.solver.solve(&zero, &g)?))
    }

    /// R_j with ⟨∇R_j, ∇ψ⟩ = −⟨h_j, ψ⟩ and R_j = 0 on ∂Ω.
    pub fn solve_interior_gbc(&self, j: usize) -> Result<FeField> {
        self.check_interior(j)?;
        let load: Vec<f64> = self.hat_load(j)?.into_iter().map(|v| -v).collect();
        let zero = vec![0.0; self.space.dof_count()];
        Ok(self.field(self.solver.solve(&load, &zero)?))
    }

    pub fn solve_gbc(&self, id: FieldId) -> Result<FeField> {
        match id {
            FieldId::Boundary(i) => self.solve_boundary_gbc(i),
            FieldId::Interior(j) => self.solve_interior_gbc(j),
        }
    }

    pub fn field_ids(&self) -> Vec<FieldId> {
        let c = self.pair.coarse();
        (0..c.vertex_count())
            .map(|v| {
                if c.is_boundary_vertex(v) {
                    FieldId::Boundary(v)
                } else {
                    FieldId::Interior(v)
                }
            })
            .collect()
    }

    /// The id of the field supported at coarse vertex `v`.
    pub fn field_id(&self, v: usize) -> Result<FieldId> {
        self.pair.coarse().check_vertex(v)?;
        Ok(if self.pair.coarse().is_boundary_vertex(v) {
            FieldId::Boundary(v)
        } else {
            FieldId::Interior(v)
        })
    }

    /// The same problem as [`GbcEngine::solve_gbc`] posed on the fine
    /// triangles inside star^k of the coarse vertex, with zero data on the
    /// artificial boundary and zero outside.
    pub fn solve_local_gbc(&self, center: usize, k: usize) -> Result<LocalGbc> {
        let id = self.field_id(center)?;
        let region = self.pair.coarse().star(StarCenter::Vertex(center), k)?;
        if region.covers_mesh(self.pair.coarse()) {
            return Ok(LocalGbc {
                field: self.solve_gbc(id)?,
                region,
                saturated: true,
            });
        }
        let triangles: Vec<usize> = region
            .triangle_indices
            .iter()
            .flat_map(|&t| self.pair.fine_children(t))
            .collect();
        let n = self.space.dof_count();
        let mut in_region = vec![false; n];
        for &t in &triangles {
            for &d in self.space.element_dofs(t) {
                in_region[d] = true;
            }
        }
        let mut touched_outside = vec![false; n];
        for t in 0..self.pair.fine().triangle_count() {
            if !region.triangle_indices.contains(&self.pair.fine_parent(t)) {
                for &d in self.space.element_dofs(t) {
                    touched_outside[d] = true;
                }
            }
        }
        let free: Vec<bool> = (0..n)
            .map(|d| in_region[d] && !touched_outside[d] && !self.space.is_boundary_dof(d))
            .collect();
        let k_local = assemble_stiffness_on(&self.space, &triangles)?;
        let solver = DirichletSolver::new(&k_local, &free, self.config)?;
        let (load, dirichlet) = match id {
            FieldId::Boundary(i) => {
                let mut g = self.boundary_trace_hat(i)?;
                for (d, v) in g.iter_mut().enumerate() {
                    if !in_region[d] {
                        *v = 0.0;
                    }
                }
                (vec![0.0; n], g)
            }
            FieldId::Interior(j) => {
                let load = self.hat_load(j)?.into_iter().map(|v| -v).collect();
                (load, vec![0.0; n])
            }
        };
        Ok(LocalGbc {
            field: self.field(solver.solve(&load, &dirichlet)?),
            region,
            saturated: false,
        })
    }

    /// Every S_i and R_j, solved in parallel against the shared factor.
    pub fn compute_global(&self) -> Result<GbcSet> {
        self.compute_with(Provenance::Global, |id| self.solve_gbc(id))
    }

    /// Every field replaced by its k-local version.
    pub fn compute_local(&self, ring: usize) -> Result<GbcSet> {
        if ring == 0 {
            return Err(Error::InvalidRing(ring));
        }
        self.compute_with(Provenance::Local { ring }, |id| {
            Ok(self.solve_local_gbc(id.vertex(), ring)?.field)
        })
    }

    fn compute_with(
        &self,
        provenance: Provenance,
        solve: impl Fn(FieldId) -> Result<FeField> + Sync,
    ) -> Result<GbcSet> {
        let ids = self.field_ids();
        let solved: Vec<(FieldId, FeField, f64)> = ids
            .par_iter()
            .map(|&id| {
                let start = Instant::now();
                let f = solve(id)?;
                Ok((id, f, start.elapsed().as_secs_f64()))
            })
            .collect::<Result<_>>()?;
        let mut set = GbcSet {
            pair: self.pair.clone(),
            space: self.space.clone(),
            boundary: BTreeMap::new(),
            interior: BTreeMap::new(),
            provenance,
            solver: self.config,
            solve_seconds: BTreeMap::new(),
        };
        for (id, field, secs) in solved {
            set.solve_seconds.insert(id, secs);
            match id {
                FieldId::Boundary(v) => set.boundary.insert(v, field),
                FieldId::Interior(v) => set.interior.insert(v, field),
            };
        }
        Ok(set)
    }
}

/// The full family {S_i} ∪ {R_j} for one design pair.
#[derive(Clone, Debug)]
pub struct GbcSet {
    pub(crate) pair: DesignPair,
    pub(crate) space: Arc<FeSpace>,
    pub(crate) boundary: BTreeMap<usize, FeField>,
    pub(crate) interior: BTreeMap<usize, FeField>,
    pub(crate) provenance: Provenance,
    pub(crate) solver: SolverConfig,
    pub(crate) solve_seconds: BTreeMap<FieldId, f64>,
}

impl GbcSet {
    pub fn pair(&self) -> &DesignPair {
        &self.pair
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.space.degree()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.solver
    }

    pub fn boundary_fields(&self) -> &BTreeMap<usize, FeField> {
        &self.boundary
    }

    pub fn interior_fields(&self) -> &BTreeMap<usize, FeField> {
        &self.interior
    }

    pub fn field(&self, id: FieldId) -> Option<&FeField> {
        match id {
            FieldId::Boundary(v) => self.boundary.get(&v),
            FieldId::Interior(v) => self.interior.get(&v),
        }
    }

    /// Field ids in storage order: all S_i, then all R_j.
    pub fn field_ids(&self) -> Vec<FieldId> {
        self.boundary
            .keys()
            .map(|&v| FieldId::Boundary(v))
            .chain(self.interior.keys().map(|&v| FieldId::Interior(v)))
            .collect()
    }

    /// Wall-clock seconds spent on each solve (empty after a reload).
    pub fn solve_seconds(&self) -> &BTreeMap<FieldId, f64> {
        &self.solve_seconds
    }

    /// Checks that every coarse boundary vertex has an S_i and every
    /// interior vertex an R_j.
    pub fn check_complete(&self) -> Result<()> {
        let c = self.pair.coarse();
        for v in 0..c.vertex_count() {
            let present = if c.is_boundary_vertex(v) {
                self.boundary.contains_key(&v)
            } else {
                self.interior.contains_key(&v)
            };
            if !present {
                return Err(Error::MissingField(v));
            }
        }
        Ok(())
    }
}
