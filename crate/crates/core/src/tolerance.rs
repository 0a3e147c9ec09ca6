//! Documented numeric constants shared by all modules.

/// Absolute slack for grid checks of the branching-function axioms.
pub const BRANCHING_TOL: f64 = 1e-12;

/// Absolute slack for sampled triangle-inequality checks.
pub const CONVEXITY_TOL: f64 = 1e-12;

/// Points closer than this are identified when canonicalising currents.
pub const SNAP_TOL: f64 = 1e-9;

/// Multiplicities and atom weights at or below this magnitude are dropped.
pub const MULT_TOL: f64 = 1e-12;

/// Angular tolerance for the parallelism check in polygon decompositions.
pub const PARALLEL_TOL: f64 = 1e-8;

/// Reconstruction accuracy required of exact polygon decompositions.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Minimum positive value of a reported hypermetric violation.
pub const HYPERMETRIC_TOL: f64 = 1e-9;

/// Minimum angular distance (radians) from axis alignment for a polygon to
/// count as generic.
pub const GENERIC_MARGIN: f64 = 1e-4;

/// Number of directions of the uniform grid used to measure reconstruction
/// errors of representing measures.
pub const RECONSTRUCTION_GRID: usize = 720;

/// Relative cost gap below which two networks are considered tied.
pub const TIE_TOL: f64 = 1e-10;

/// Steiner points closer than this (relative to the instance diameter) to
/// a neighbour are reported as collapsed.
pub const COLLAPSE_TOL: f64 = 1e-7;
