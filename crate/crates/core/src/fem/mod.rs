//! Continuous Bernstein-Bézier finite elements of degree 1 to 3.

pub mod assembly;
pub mod bernstein;
mod field;
pub mod quadrature;
pub mod solve;
pub mod space;
pub mod sparse;

pub use assembly::{assemble_load, assemble_mass, assemble_stiffness, ReferenceElement};
pub use bernstein::BernsteinBasis;
pub use field::FeField;
pub use quadrature::QuadratureRule;
pub use solve::{solver_stats, DirichletSolver, SolverConfig, SolverKind, SolverStats};
pub use space::FeSpace;
pub use sparse::{CooMatrix, CsrMatrix};
