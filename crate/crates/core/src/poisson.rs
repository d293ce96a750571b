//! Dirichlet Poisson problems −Δu = f, u = g on ∂Ω: superposition of
//! precomputed coordinate fields, a direct finite-element reference, and
//! manufactured-solution benchmarks.

use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_mass, assemble_stiffness};
use crate::fem::{DirichletSolver, FeField, FeSpace, SolverConfig};
use crate::gbc::{DesignPair, GbcEngine, GbcSet};
use crate::geometry::Point2;
use crate::mesh::Triangulation;
use crate::sampling::SampleGrid;

/// Factor applied to the interior fields. They solve ⟨∇R, ∇ψ⟩ = −⟨h, ψ⟩,
/// while −Δu = f needs +⟨f, ψ⟩ on the right.
pub const INTERIOR_SIGN: f64 = -1.0;

type ScalarFn = Arc<dyn Fn(Point2) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Point2) -> Point2 + Send + Sync>;

#[derive(Clone)]
pub struct PoissonProblem {
    pub name: String,
    f: ScalarFn,
    g: ScalarFn,
    exact: Option<(ScalarFn, VectorFn)>,
}

impl fmt::Debug for PoissonProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonProblem")
            .field("name", &self.name)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl PoissonProblem {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        g: impl Fn(Point2) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PoissonProblem {
            name: name.into(),
            f: Arc::new(f),
            g: Arc::new(g),
            exact: None,
        }
    }

    pub fn with_exact(
        mut self,
        u: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point2) -> Point2 + Send + Sync + 'static,
    ) -> Self {
        self.exact = Some((Arc::new(u), Arc::new(grad)));
        self
    }

    pub fn f(&self, p: Point2) -> f64 {
        (self.f)(p)
    }

    pub fn g(&self, p: Point2) -> f64 {
        (self.g)(p)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact(&self, p: Point2) -> Option<f64> {
        self.exact.as_ref().map(|(u, _)| u(p))
    }

    pub fn exact_gradient(&self, p: Point2) -> Option<Point2> {
        self.exact.as_ref().map(|(_, g)| g(p))
    }
}

/// The five manufactured solutions, numbered 1 to 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ManufacturedCase(u8);

impl ManufacturedCase {
    pub const ALL: [ManufacturedCase; 5] = [
        ManufacturedCase(1),
        ManufacturedCase(2),
        ManufacturedCase(3),
        ManufacturedCase(4),
        ManufacturedCase(5),
    ];

    pub fn new(number: usize) -> Result<Self> {
        if (1..=5).contains(&number) {
            Ok(ManufacturedCase(number as u8))
        } else {
            Err(Error::InvalidArgument(format!(
                "manufactured cases are numbered 1 to 5, got {number}"
            )))
        }
    }

    pub fn number(self) -> usize {
        self.0 as usize
    }

    pub fn formula(self) -> &'static str {
        match self.0 {
            1 => "1/(1+x^2+y^2)",
            2 => "x^2+3y^3+4xy",
            3 => "x^4+y^4",
            4 => "sin(x)exp(y)",
            _ => "10exp(-x^2-y^2)",
        }
    }

    pub fn u(self, p: Point2) -> f64 {
        let (x, y) = (p.x, p.y);
        let r2 = x * x + y * y;
        match self.0 {
            1 => 1.0 / (1.0 + r2),
            2 => x * x + 3.0 * y.powi(3) + 4.0 * x * y,
            3 => x.powi(4) + y.powi(4),
            4 => x.sin() * y.exp(),
            _ => 10.0 * (-r2).exp(),
        }
    }

    pub fn gradient(self, p: Point2) -> Point2 {
        let (x, y) = (p.x, p.y);
        let r2 = x * x + y * y;
        match self.0 {
            1 => (-2.0 / (1.0 + r2).powi(2)) * p,
            2 => Point2::new(2.0 * x + 4.0 * y, 9.0 * y * y + 4.0 * x),
            3 => Point2::new(4.0 * x.powi(3), 4.0 * y.powi(3)),
            4 => Point2::new(x.cos() * y.exp(), x.sin() * y.exp()),
            _ => (-20.0 * (-r2).exp()) * p,
        }
    }

    /// f = −Δu.
    pub fn f(self, p: Point2) -> f64 {
        let (x, y) = (p.x, p.y);
        let r2 = x * x + y * y;
        match self.0 {
            1 => 4.0 * (1.0 - r2) / (1.0 + r2).powi(3),
            2 => -2.0 - 18.0 * y,
            3 => -12.0 * r2,
            4 => 0.0,
            _ => 40.0 * (1.0 - r2) * (-r2).exp(),
        }
    }

    pub fn problem(self) -> PoissonProblem {
        PoissonProblem::new(
            format!("case {}", self.0),
            move |p| self.f(p),
            move |p| self.u(p),
        )
        .with_exact(move |p| self.u(p), move |p| self.gradient(p))
    }
}

impl fmt::Display for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Σ g_i S_i + s Σ f_j R_j, where `g_at` and `f_at` are indexed by coarse
/// vertex (only boundary entries of `g_at` and interior entries of `f_at`
/// are read). No linear system is solved.
pub fn superpose(set: &GbcSet, g_at: &[f64], f_at: &[f64]) -> Result<FeField> {
    set.check_complete()?;
    let nv = set.pair().coarse().vertex_count();
    if g_at.len() != nv || f_at.len() != nv {
        return Err(Error::DimensionMismatch(format!(
            "expected {nv} vertex samples, got {} and {}",
            g_at.len(),
            f_at.len()
        )));
    }
    let mut coeffs = vec![0.0; set.space().dof_count()];
    for (&i, s) in set.boundary_fields() {
        let w = g_at[i];
        for (c, v) in coeffs.iter_mut().zip(s.coefficients()) {
            *c += w * v;
        }
    }
    for (&j, r) in set.interior_fields() {
        let w = INTERIOR_SIGN * f_at[j];
        for (c, v) in coeffs.iter_mut().zip(r.coefficients()) {
            *c += w * v;
        }
    }
    FeField::new(set.space().clone(), coeffs)
}

/// g and f sampled at the coarse design vertices.
pub fn vertex_samples(coarse: &Triangulation, problem: &PoissonProblem) -> (Vec<f64>, Vec<f64>) {
    let g = coarse
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, &p)| {
            if coarse.is_boundary_vertex(v) {
                problem.g(p)
            } else {
                0.0
            }
        })
        .collect();
    let f = coarse
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, &p)| {
            if coarse.is_boundary_vertex(v) {
                0.0
            } else {
                problem.f(p)
            }
        })
        .collect();
    (g, f)
}

pub fn solve_by_superposition(set: &GbcSet, problem: &PoissonProblem) -> Result<FeField> {
    let (g, f) = vertex_samples(set.pair().coarse(), problem);
    superpose(set, &g, &f)
}

/// Galerkin solution of K u = M f_I with u = g_I on boundary DOFs, where
/// f_I and g_I are the Bernstein interpolants on `space`.
pub fn solve_direct_fem(
    space: &Arc<FeSpace>,
    problem: &PoissonProblem,
    config: SolverConfig,
) -> Result<FeField> {
    let k = assemble_stiffness(space)?;
    let m = assemble_mass(space)?;
    let f_interp = space.interpolate(|p| problem.f(p));
    let load = m.mul_vec(&f_interp);
    let mut dirichlet = space.interpolate(|p| problem.g(p));
    for (d, v) in dirichlet.iter_mut().enumerate() {
        if !space.is_boundary_dof(d) {
            *v = 0.0;
        }
    }
    let free: Vec<bool> = space.boundary_dof_flags().iter().map(|b| !b).collect();
    let solver = DirichletSolver::new(&k, &free, config)?;
    FeField::new(space.clone(), solver.solve(&load, &dirichlet)?)
}

/// Max coefficient difference between the superposition and one direct
/// solve whose Dirichlet data is Σ g_i ℓ_i and whose load is the hat
/// interpolant H_f = Σ f_j h_j.
pub fn superposition_equivalence_check(
    engine: &GbcEngine,
    set: &GbcSet,
    g_at: &[f64],
    f_at: &[f64],
) -> Result<f64> {
    let via_fields = superpose(set, g_at, f_at)?;
    let n = engine.space().dof_count();
    let coarse = engine.pair().coarse();
    let mut dirichlet = vec![0.0; n];
    let mut load = vec![0.0; n];
    for v in 0..coarse.vertex_count() {
        if coarse.is_boundary_vertex(v) {
            if g_at[v] != 0.0 {
                for (d, t) in dirichlet.iter_mut().zip(engine.boundary_trace_hat(v)?) {
                    *d += g_at[v] * t;
                }
            }
        } else if f_at[v] != 0.0 {
            for (l, h) in load.iter_mut().zip(engine.hat_load(v)?) {
                *l += f_at[v] * h;
            }
        }
    }
    let direct = engine.solver().solve(&load, &dirichlet)?;
    Ok(via_fields
        .coefficients()
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    GbcSuperposition,
    DirectFem,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::GbcSuperposition => "gbc-superposition",
            Method::DirectFem => "direct-fem",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonReport {
    pub case: ManufacturedCase,
    pub method: Method,
    /// Number of extra uniform refinements of the design mesh.
    pub refinement: usize,
    pub max_error: f64,
    pub energy_error: f64,
    pub grid: usize,
    pub coarse_vertices: usize,
    pub fine_vertices: usize,
    pub dofs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub degree: usize,
    /// Refinements from design mesh to computation mesh.
    pub refinements: usize,
    /// Number of design-mesh levels; level l refines the design mesh l times.
    pub levels: usize,
    pub grid: usize,
    pub solver: SolverConfig,
    pub cases: Vec<ManufacturedCase>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            degree: 1,
            refinements: 1,
            levels: 2,
            grid: 101,
            solver: SolverConfig::default(),
            cases: ManufacturedCase::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkResult {
    pub reports: Vec<PoissonReport>,
    /// Largest superposition-equivalence residual over cases, per level.
    pub equivalence_residuals: Vec<f64>,
}

impl BenchmarkResult {
    pub fn report(
        &self,
        case: ManufacturedCase,
        method: Method,
        refinement: usize,
    ) -> Option<&PoissonReport> {
        self.reports
            .iter()
            .find(|r| r.case == case && r.method == method && r.refinement == refinement)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("case,method,refinement,max_error,grid\n");
        for r in &self.reports {
            writeln!(
                s,
                "{},{},{},{:?},{}",
                r.case,
                r.method.tag(),
                r.refinement,
                r.max_error,
                r.grid
            )
            .unwrap();
        }
        s
    }

    /// Error ratios between consecutive levels.
    pub fn rates(&self) -> Vec<RateRow> {
        let mut out = Vec::new();
        for a in &self.reports {
            if let Some(b) = self.report(a.case, a.method, a.refinement + 1) {
                out.push(RateRow {
                    case: a.case,
                    method: a.method,
                    from: a.refinement,
                    to: b.refinement,
                    max_error_ratio: a.max_error / b.max_error,
                    energy_ratio: a.energy_error / b.energy_error,
                });
            }
        }
        out
    }

    pub fn rates_csv(&self) -> String {
        let mut s = String::from("case,method,from,to,max_error_ratio,energy_ratio\n");
        for r in self.rates() {
            writeln!(
                s,
                "{},{},{},{},{:?},{:?}",
                r.case,
                r.method.tag(),
                r.from,
                r.to,
                r.max_error_ratio,
                r.energy_ratio
            )
            .unwrap();
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub case: ManufacturedCase,
    pub method: Method,
    pub from: usize,
    pub to: usize,
    pub max_error_ratio: f64,
    pub energy_ratio: f64,
}

/// Both methods on every case at every level of the design mesh. The GBC
/// fields live on the computation mesh; the finite-element reference is
/// solved on the design mesh with the same degree, so both methods consume
/// data tied to the same vertices.
pub fn run_benchmark(design: &Triangulation, config: &BenchmarkConfig) -> Result<BenchmarkResult> {
    run_benchmark_with(design, config, |_, _, _| Ok(()))
}

/// [`run_benchmark`] with a callback invoked once per level, after the
/// coordinate fields of that level are computed.
pub fn run_benchmark_with(
    design: &Triangulation,
    config: &BenchmarkConfig,
    mut inspect: impl FnMut(usize, &GbcEngine, &GbcSet) -> Result<()>,
) -> Result<BenchmarkResult> {
    let mut reports = Vec::new();
    let mut equivalence_residuals = Vec::new();
    for level in 0..config.levels {
        let pair = DesignPair::new(design.refine_times(level), config.refinements);
        let engine = GbcEngine::new(pair, config.degree, config.solver)?;
        let set = engine.compute_global()?;
        inspect(level, &engine, &set)?;
        let grid = SampleGrid::new(engine.pair().fine().clone(), config.grid)?;
        let fem_space = Arc::new(FeSpace::new(engine.pair().coarse().clone(), config.degree)?);
        let fem_grid = SampleGrid::new(engine.pair().coarse().clone(), config.grid)?;
        let mut worst_equivalence: f64 = 0.0;
        for &case in &config.cases {
            let problem = case.problem();
            let gbc = solve_by_superposition(&set, &problem)?;
            let fem = solve_direct_fem(&fem_space, &problem, config.solver)?;
            let (g, f) = vertex_samples(engine.pair().coarse(), &problem);
            worst_equivalence =
                worst_equivalence.max(superposition_equivalence_check(&engine, &set, &g, &f)?);
            for (method, field, g) in [
                (Method::GbcSuperposition, &gbc, &grid),
                (Method::DirectFem, &fem, &fem_grid),
            ] {
                reports.push(PoissonReport {
                    case,
                    method,
                    refinement: level,
                    max_error: g.max_error(field, |p| case.u(p)),
                    energy_error: field.energy_error(|p| case.gradient(p)),
                    grid: config.grid,
                    coarse_vertices: engine.pair().coarse().vertex_count(),
                    fine_vertices: engine.pair().fine().vertex_count(),
                    dofs: field.space().dof_count(),
                });
            }
        }
        equivalence_residuals.push(worst_equivalence);
    }
    reports.sort_by_key(|r| (r.case, r.method == Method::DirectFem, r.refinement));
    Ok(BenchmarkResult {
        reports,
        equivalence_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::BuiltinPolygon;

    fn laplacian_fd(case: ManufacturedCase, p: Point2) -> f64 {
        let h = 1e-3;
        let u = |x: f64, y: f64| case.u(Point2::new(x, y));
        (u(p.x + h, p.y) + u(p.x - h, p.y) + u(p.x, p.y + h) + u(p.x, p.y - h) - 4.0 * u(p.x, p.y))
            / (h * h)
    }

    #[test]
    fn manufactured_data_consistent() {
        for case in ManufacturedCase::ALL {
            for p in [
                Point2::new(0.3, 0.7),
                Point2::new(1.1, 0.2),
                Point2::new(1.7, 1.4),
            ] {
                assert!(
                    (case.f(p) + laplacian_fd(case, p)).abs() < 1e-4 * (1.0 + case.f(p).abs()),
                    "{case}"
                );
                let h = 1e-6;
                let gx = (case.u(Point2::new(p.x + h, p.y)) - case.u(Point2::new(p.x - h, p.y)))
                    / (2.0 * h);
                let gy = (case.u(Point2::new(p.x, p.y + h)) - case.u(Point2::new(p.x, p.y - h)))
                    / (2.0 * h);
                assert!(
                    (case.gradient(p) - Point2::new(gx, gy)).norm() < 1e-6,
                    "{case}"
                );
            }
        }
        assert!(ManufacturedCase::new(0).is_err());
        assert!(ManufacturedCase::new(6).is_err());
    }

    fn engine() -> GbcEngine {
        let pair = DesignPair::new(BuiltinPolygon::NonconvexQuad.design_mesh().unwrap(), 1);
        GbcEngine::new(pair, 1, SolverConfig::default()).unwrap()
    }

    #[test]
    fn linear_and_constant_data_reproduced() {
        let e = engine();
        let set = e.compute_global().unwrap();
        let lin = PoissonProblem::new("linear", |_| 0.0, |p| 2.0 * p.x - 0.5 * p.y + 1.0);
        let u = solve_by_superposition(&set, &lin).unwrap();
        for (d, p) in e.space().dof_points().iter().enumerate() {
            assert!((u.coefficients()[d] - (2.0 * p.x - 0.5 * p.y + 1.0)).abs() < 1e-9);
        }
        let zero = PoissonProblem::new("zero", |_| 0.0, |_| 0.0);
        assert!(solve_by_superposition(&set, &zero)
            .unwrap()
            .coefficients()
            .iter()
            .all(|&c| c == 0.0));
        let fem = solve_direct_fem(e.space(), &zero, SolverConfig::default()).unwrap();
        assert!(fem.coefficients().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn superposition_matches_single_solve() {
        let e = engine();
        let set = e.compute_global().unwrap();
        let problem = ManufacturedCase::new(5).unwrap().problem();
        let (g, f) = vertex_samples(e.pair().coarse(), &problem);
        assert!(superposition_equivalence_check(&e, &set, &g, &f).unwrap() < 1e-9);
        // the sign matters: flipping it breaks the equivalence
        let flipped: Vec<f64> = f.iter().map(|v| -v).collect();
        let direct_flip = superposition_equivalence_check(&e, &set, &g, &flipped).unwrap();
        assert!(direct_flip < 1e-9);
        let u_plus = superpose(&set, &g, &f).unwrap();
        let u_minus = superpose(&set, &g, &flipped).unwrap();
        let grid = SampleGrid::new(e.pair().fine().clone(), 41).unwrap();
        let case = ManufacturedCase::new(5).unwrap();
        assert!(grid.max_error(&u_plus, |p| case.u(p)) < grid.max_error(&u_minus, |p| case.u(p)));
    }

    #[test]
    fn boundary_vertices_take_g() {
        let e = engine();
        let set = e.compute_global().unwrap();
        let case = ManufacturedCase::new(1).unwrap();
        let u = solve_by_superposition(&set, &case.problem()).unwrap();
        let c = e.pair().coarse();
        for v in c.boundary_vertices() {
            assert!((u.coefficients()[e.space().vertex_dof(v)] - case.u(c.vertex(v))).abs() < 1e-9);
        }
    }

    #[test]
    fn benchmark_tables() {
        let design = BuiltinPolygon::Square
            .design_mesh()
            .unwrap()
            .refine_times(2);
        assert!(design.vertex_count() > 9);
        let config = BenchmarkConfig {
            grid: 21,
            ..BenchmarkConfig::default()
        };
        let r = run_benchmark(&design, &config).unwrap();
        assert_eq!(r.reports.len(), 5 * 2 * 2);
        assert!(r.equivalence_residuals.iter().all(|&x| x < 1e-9));
        let csv = r.csv();
        assert!(csv.starts_with("case,method,refinement,max_error,grid\n1,gbc-superposition,0,"));
        assert_eq!(r.rates().len(), 10);
    }
}
