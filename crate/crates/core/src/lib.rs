//! Choquet expected disutility (CED) optimal paths in state space graphs
//! whose arc costs depend on a finite set of scenarios.
//!
//! Beliefs over scenarios are capacities (non-additive set functions). A
//! path with per-scenario cost vector `x` is evaluated by
//! `ψ(x) = C_v(w(x_1), …, w(x_m))`, the Choquet integral of the disutility
//! `w` with respect to a concave capacity `v`. Two exact solvers are
//! provided: a multiobjective label search ([`search_mo`]) and a ranking of
//! paths by a linear lower bound ([`search_rank`]).
//!
//! ```
//! use choquet_path::prelude::*;
//!
//! let graph = StateSpaceGraph::new(2, 3, 0, vec![2], vec![
//!     (0, 1, vec![1.0, 4.0]),
//!     (0, 2, vec![6.0, 0.0]),
//!     (1, 2, vec![1.0, 0.0]),
//! ]).unwrap();
//! let p = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
//! let criterion = Criterion::new(Capacity::v1(&p), Disutility::power(2.0, 10.0).unwrap());
//! let p_star = criterion.capacity().max_entropy().unwrap();
//! let tables = HeuristicTables::exact(&graph, &p_star).unwrap();
//! let problem = Problem::new(&graph, &criterion, &p_star, &tables);
//! let a = solve_mo(&problem).unwrap();
//! let b = solve_rank(&problem).unwrap();
//! assert_eq!(a.path.nodes(), &[0, 1, 2]);
//! assert!((a.psi - b.psi).abs() < 1e-12);
//! ```

pub mod capacity;
pub mod choquet;
pub mod graph;
pub mod heuristics;
pub mod instance;
pub mod oracle;
pub mod search_mo;
pub mod search_rank;
pub mod solution;

pub mod prelude {
    pub use crate::capacity::{entropy, Capacity, CapacityError, MobiusCapacity, ProbabilityVector, ScenarioSet};
    pub use crate::choquet::{
        ced, choquet_integral, choquet_integral_increments, linear_lower_bound, scalarize, CostVector, Criterion,
        Disutility, LowerBounds,
    };
    pub use crate::graph::{path_cost, Path, StateSpaceGraph};
    pub use crate::heuristics::{apply_gamma, HeuristicTables};
    pub use crate::search_mo::{solve_mo, solve_mo_with, MoConfig, Retention};
    pub use crate::search_rank::{solve_rank, solve_rank_traced};
    pub use crate::solution::{Problem, SearchStats, Solution, SolveError};
}
