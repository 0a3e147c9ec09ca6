//! Polyhedral 0- and 1-currents.

mod cycles;
mod flat;
mod geom;
mod one;
mod slice;
mod zero;

pub use cycles::{find_cycle, is_acyclic, remove_cycles};
pub use flat::{flat_distance_one_upper, flat_distance_zero, Diagonal, TriMesh};
pub use one::{h_mass, Edge, PolyhedralOneCurrent};
pub(crate) use geom::lex as lex_order;
pub(crate) use one::h_mass_canonical;
pub use slice::{h_mass_by_slice_integration, h_mass_via_slicing, slice, SliceSpec};
pub use zero::{Atom, ZeroCurrent};
