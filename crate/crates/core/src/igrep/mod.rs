//! Integral-geometric representations of planar norms and a bounded
//! search for hypermetric violations.

mod approx;
mod decompose;
mod hypermetric;
mod measure;

pub use approx::{approximate_body, represent, representing_measure, Representation, MAX_DEPTH};
pub use decompose::{edge_normals, polygon_decompose, rotate_generic, PolygonDecomposition};
pub use hypermetric::{hypermetric_search, HypermetricCertificate, PointGrid};
pub use measure::{DirectionAtom, DirectionMeasure};
