//! Cost primitives: branching functions, anisotropic norms and line geometry.

pub mod branching;
pub mod convexity;
pub mod lines;
pub mod norm;
pub mod polygon;

pub use branching::{
    check_branching_axioms, Axiom, AxiomReport, AxiomViolation, BranchingFunction, SampleGrid,
};
pub use convexity::{check_convexity, ConvexityReport, DirectionGrid};
pub use lines::{cross, line_bracket, line_jacobian, rot90, rotate};
pub use norm::{anisotropic_norm, Anisotropy, AnisotropyRep, DirectionCost};
pub use polygon::SymmetricPolygon;
