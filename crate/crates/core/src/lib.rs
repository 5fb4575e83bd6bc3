//! Maximum independent set through a separable nonlinear relaxation.
//!
//! Every vertex is a bin holding a floor item of size `w`, and an
//! independent set of size `k` is the placement of `k` unit items into
//! distinct bins. A cost function `f` is fitted by linear programming so
//! that this integer placement is cheaper than a catalogue of fractional
//! breakups (Step A, [`paramfit`]); `Σ f(x_j)` is then minimized over the
//! edge polytope and the result is rounded by dominance (Step B,
//! [`minimizer`]). [`driver`] sweeps the floor size and searches over `k`.
//!
//! [`graph`] holds the instance types, parsers and an exact
//! branch-and-bound solver used as the oracle; [`lpcore`] is the simplex
//! solver behind both steps.

pub mod costfn;
pub mod driver;
pub mod graph;
pub mod lpcore;
pub mod minimizer;
pub mod paramfit;

pub use costfn::{CostError, CostParams, Family, FracParams, LegacyParams, PolyParams, Scenario, ScenarioQuantities};
pub use driver::{
    run_two_step, search_k, sweep_w, ParamSource, SearchConfig, SearchMode, SearchOutcome, StopMode, SweepConfig,
    TraceLine, Verdict,
};
pub use graph::{
    exact_mis, greedy_independent_set, is_independent, parse_auto, random_graph, ExactOutcome, ExactResult, Graph,
    GraphError, VertexId, VertexSet,
};
pub use lpcore::{check_feasible, solve_lp, LinearProgram, LpSolution, LpStatus, Relation, Sense, SolverOptions, VarId};
pub use minimizer::{
    dominant_vertices, minimize, round_solution, solve_step_b, FractionalAssignment, MinimizeOptions, PolytopeSpec, SolveOutcome,
    SolveStatus,
};
pub use paramfit::{build_fit_lp, fit_parameters, verify_parameters, FitConfig, FitReport, FitStatus};
