//! Anisotropic branched transport at desk scale.
//!
//! The crate is organised bottom-up:
//!
//! - [`anisotropy`]: branching functions `H`, direction costs `σ` and the
//!   anisotropic norms they induce, plus planar line geometry.
//! - [`igrep`]: integral-geometric representations of planar norms
//!   (polygon decompositions, nested polygonal approximations, discrete
//!   representing measures) and a bounded search for hypermetric violations.
//! - [`currents`]: polyhedral 0- and 1-currents, canonical forms, anisotropic
//!   `H`-mass, slicing, cycle removal and flat-distance linear programs.
//! - [`solver`]: atomic transport problems, tree topologies, convex position
//!   optimisation, exhaustive/local search and a brute-force grid oracle.
//!
//! All numeric thresholds live in [`tolerance`].

pub mod anisotropy;
pub mod currents;
pub mod error;
pub mod igrep;
mod lp;
pub mod sampling;
pub mod solver;
pub mod tolerance;

pub use anisotropy::{
    anisotropic_norm, check_branching_axioms, check_convexity, line_bracket, line_jacobian,
    Anisotropy, AnisotropyRep, AxiomReport, BranchingFunction, ConvexityReport, DirectionCost,
    DirectionGrid, SampleGrid, SymmetricPolygon,
};
pub use currents::{
    find_cycle, flat_distance_one_upper, flat_distance_zero, h_mass, h_mass_via_slicing,
    is_acyclic, remove_cycles, slice, Diagonal, Edge, PolyhedralOneCurrent, SliceSpec, TriMesh,
    ZeroCurrent,
};
pub use error::{Error, Result};
pub use igrep::{
    approximate_body, edge_normals, hypermetric_search, polygon_decompose, represent,
    representing_measure, rotate_generic, DirectionMeasure, HypermetricCertificate, PointGrid, PolygonDecomposition,
    Representation,
};
pub use solver::{
    brute_force_oracle, initial_feasible, optimize_positions, solve, verify_network, Budget,
    Network, OptimizeOptions, SearchMode, SolveResult, Topology, TransportProblem, VerifyReport,
};

/// Planar vectors.
pub type Vec2 = nalgebra::Vector2<f64>;
