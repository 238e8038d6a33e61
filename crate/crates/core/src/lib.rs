//! Pareto-stationary points of a bicriterial pointwise-tracking optimal
//! control problem for the Poisson equation on the unit square.
//!
//! States and adjoints are continuous piecewise-linear finite elements on
//! uniform nested triangulations, controls are piecewise constant and
//! box-constrained. The two objectives
//!
//! ```text
//! j_k(u) = 1/2 sum_i (y(x_k^i) - y_k^i)^2 + lambda_k/2 ||u||^2,   k = 1, 2
//! ```
//!
//! are scalarized by weighted sums or by the Euclidean reference-point
//! distance, and every scalar subproblem is solved with a projected
//! Barzilai-Borwein gradient method. The [`harness`] module reproduces
//! front sweeps and mesh-convergence studies.

pub mod control;
pub mod error;
pub mod fem;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod objective;
pub mod scalarize;

pub use control::{
    clip_to_box, l2_error, l2_inner, l2_norm, pi0_project, prolong, BoxBounds, PwcControl,
};
pub use error::{Error, Result};
pub use fem::{
    assemble_load_pwc, assemble_point_load, assemble_stiffness, solve_spd, P1Function,
    StiffnessSystem,
};
pub use mesh::{
    build_uniform_mesh, build_uniform_mesh_with, nested_element_map, Diagonal, Point,
    PointLocation, TriMesh,
};
pub use objective::{
    eval_objectives, evaluate_control, grad_rpm, grad_wsm, solve_adjoints, solve_state,
    ObjectivePair, Observation, ProblemData, StateAdjointBundle, Weights,
};
pub use scalarize::{
    bb_projected_gradient, ideal_vector, next_reference_point, rpm_front, solve_rpm,
    solve_scalarized, solve_wsm, wsm_front, BBConfig, Method, ParetoFront, Scalarization,
    SolveReport,
};
