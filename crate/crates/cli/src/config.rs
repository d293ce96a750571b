use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hgbc::builtin::BuiltinPolygon;
use hgbc::fem::{SolverConfig, SolverKind};
use hgbc::mesh::io::{read_source, MeshSource};
use hgbc::mesh::triangulate::initial_triangulation;
use hgbc::mesh::Triangulation;

pub const FAST_GRID: usize = 101;
pub const PAPER_GRID: usize = 1000;

#[derive(Parser, Debug)]
#[command(
    name = "hgbc",
    version,
    about = "Harmonic generalized barycentric coordinates on triangulated polygons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the design and computation meshes and report their statistics
    Mesh(CommonArgs),
    /// Compute, verify and save every coordinate field
    Gbc(CommonArgs),
    /// Ring decay of every field and local-versus-global error tables
    Locality(LocalityArgs),
    /// Manufactured-solution benchmark against a finite element reference
    Poisson(PoissonArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Cholesky,
    Cg,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Built-in polygon: square, convex-quad, nonconvex-quad or lshape
    #[arg(long, default_value = "convex-quad", conflicts_with = "polygon_file")]
    pub polygon: BuiltinPolygon,
    /// JSON polygon loop or mesh (`vertices`, optional `triangles`)
    #[arg(long)]
    pub polygon_file: Option<PathBuf>,
    /// Element degree (1 to 3)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub degree: u8,
    /// Uniform refinements from design mesh to computation mesh
    #[arg(long)]
    pub refine: Option<usize>,
    /// Extra uniform refinements of the design mesh itself
    #[arg(long, default_value_t = 0)]
    pub design_refine: usize,
    /// Sample grid resolution per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// Conjugate gradient tolerance (recorded for the direct solver too)
    #[arg(long, default_value_t = hgbc::fem::solve::CG_TOLERANCE)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = SolverChoice::Cholesky)]
    pub solver: SolverChoice,
    /// Output directory
    #[arg(long, default_value = "hgbc-out")]
    pub out: PathBuf,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    pub workers: Option<usize>,
    /// 1000-point grid and one more refinement level
    #[arg(long)]
    pub paper_mode: bool,
}

#[derive(Args, Debug, Clone)]
pub struct LocalityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Rings for the local-versus-global tables
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    pub rings: Vec<usize>,
    /// Coarse boundary vertex for the tables
    #[arg(long)]
    pub boundary_center: Option<usize>,
    /// Coarse interior vertex for the tables
    #[arg(long)]
    pub interior_center: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct PoissonArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Design-mesh levels (defaults to 2, or 3 in paper mode)
    #[arg(long)]
    pub levels: Option<usize>,
    /// Manufactured cases to run
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub cases: Vec<usize>,
    /// Seed for the random superposition-equivalence samples
    #[arg(long, default_value_t = 20)]
    pub seed: u64,
    /// Number of random sample vectors per level
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

/// Fully resolved settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: String,
    pub design: Triangulation,
    pub degree: usize,
    pub refinements: usize,
    pub grid: usize,
    pub solver: SolverConfig,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub paper_mode: bool,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> hgbc::Result<RunConfig> {
        let (source, design, default_refine) = match &args.polygon_file {
            Some(path) => {
                let mesh = match read_source(path)? {
                    MeshSource::Mesh(m) => m,
                    MeshSource::Polygon(p) => initial_triangulation(&p)?,
                };
                (path.display().to_string(), mesh, 1)
            }
            None => (
                args.polygon.name().to_string(),
                args.polygon.design_mesh()?,
                args.polygon.default_computation_refinements(),
            ),
        };
        let design = design.refine_times(args.design_refine);
        let refinements = args
            .refine
            .unwrap_or(default_refine + usize::from(args.paper_mode));
        let grid = args.grid.unwrap_or(if args.paper_mode {
            PAPER_GRID
        } else {
            FAST_GRID
        });
        let kind = match args.solver {
            SolverChoice::Cholesky => SolverKind::Cholesky,
            SolverChoice::Cg => SolverKind::ConjugateGradient,
        };
        let bad = |m: String| hgbc::Error::InvalidArgument(m);
        if refinements == 0 {
            return Err(bad("--refine must be at least 1".into()));
        }
        if grid < 2 {
            return Err(bad(format!("--grid must be at least 2, got {grid}")));
        }
        if !(args.tol > 0.0) {
            return Err(bad(format!("--tol must be positive, got {}", args.tol)));
        }
        if args.workers == Some(0) {
            return Err(bad("--workers must be positive".into()));
        }
        Ok(RunConfig {
            source,
            design,
            degree: args.degree as usize,
            refinements,
            grid,
            solver: SolverConfig {
                kind,
                tolerance: args.tol,
            },
            out: args.out.clone(),
            workers: args.workers,
            paper_mode: args.paper_mode,
        })
    }

    pub fn solver_name(&self) -> &'static str {
        match self.solver.kind {
            SolverKind::Cholesky => "cholesky",
            SolverKind::ConjugateGradient => "cg",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "source": self.source,
            "degree": self.degree,
            "refinements": self.refinements,
            "grid": self.grid,
            "solver": self.solver_name(),
            "tolerance": self.solver.tolerance,
            "paper_mode": self.paper_mode,
            "design_vertices": self.design.vertex_count(),
            "design_triangles": self.design.triangle_count(),
        })
    }
}
