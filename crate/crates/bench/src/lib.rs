//! Fixed benchmark inputs, seeded so runs are comparable.

use abot_core::sampling::{random_current, random_grid_problem, random_polygon};
use abot_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn polygons(count: usize, half: usize) -> Vec<SymmetricPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..count).map(|_| random_polygon(&mut rng, half)).collect()
}

pub fn currents(count: usize, max_edges: usize) -> Vec<PolyhedralOneCurrent> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..count).map(|_| random_current(&mut rng, max_edges)).collect()
}

pub fn grid_problem(terminals: usize, sigma: Anisotropy) -> TransportProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(3 + terminals as u64);
    random_grid_problem(
        &mut rng,
        terminals..=terminals,
        5,
        BranchingFunction::power(0.5).expect("valid exponent"),
        sigma,
    )
}
