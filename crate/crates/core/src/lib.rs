//! Layer-adapted finite differences for singularly perturbed two-point
//! boundary value problems with an interior turning point.
//!
//! The problem class is
//!
//! ```text
//!     eps u'' + a(x) u' - b(x) u = f(x)  on (x_l, x_r),
//!     u(x_l) = A,  u(x_r) = B,
//! ```
//!
//! with `0 < eps <= 1`, a single interior zero of `a` with negative slope
//! (diverging flow) and `b >= beta > 0`, so the solution carries twin
//! exponential boundary layers. The solver combines central differencing on
//! the fine pieces of a piecewise-uniform Shishkin mesh with the monotone
//! midpoint upwind operator on the coarse piece and at the transition
//! points, solves the resulting tridiagonal system directly, and measures
//! convergence against exact solutions or by the nested double-mesh
//! estimator.
//!
//! Modules: [`problem`] (problem class, built-in benchmarks), [`mesh`]
//! (Shishkin meshes), [`scheme`] (discrete operators and their
//! hypotheses), [`solver`] (Thomas algorithm plus a dense reference route),
//! [`analysis`] (errors, orders, convergence reports), [`verify`]
//! (operator-level property suites) and [`cli`] (the `layerfd` binary).

pub mod analysis;
pub mod cli;
pub mod error;
pub mod mesh;
pub mod problem;
pub mod scheme;
pub mod solver;
pub mod verify;

pub use analysis::{
    double_mesh_error, max_pointwise_error, observed_order, run_convergence, solve_double_mesh,
    solve_problem, ConvergenceReport, ErrorGridEntry, ErrorMode,
};
pub use error::{Error, Result};
pub use mesh::{build_mesh, build_mesh_with_tau, MeshConfig, ShishkinMesh, DEFAULT_TAU0};
pub use problem::{erf, example1, example2, validate, Epsilon, ProblemSpec, Violation};
pub use scheme::{
    assemble, assemble_upwind, check_assumptions, classify, AssumptionReport, SchemeKind,
    StencilKind, StencilRow, TridiagonalSystem,
};
pub use solver::{dense_solve, residual, solve, DiscreteSolution};
