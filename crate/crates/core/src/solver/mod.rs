//! Desk-scale branched transport between atomic measures.

mod network;
mod optimize;
mod oracle;
mod problem;
mod search;
mod topology;
mod verify;

pub use network::{initial_feasible, Diagnostics, Network};
pub use optimize::{optimize_positions, OptimizeOptions, Optimized};
pub use oracle::{brute_force_oracle, ORACLE_MAX_GRID, ORACLE_MAX_STEINER, ORACLE_MAX_TERMINALS};
pub use problem::{Terminal, TransportProblem};
pub use search::{solve, Budget, SearchMode, SolveResult, MAX_EXHAUSTIVE_TERMINALS};
pub use topology::{enumerate_topologies, Topology};
pub use verify::{verify_network, BoundaryMismatch, VerifyReport};
