//! Seeded generators for random test instances.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::anisotropy::{Anisotropy, BranchingFunction, SymmetricPolygon};
use crate::currents::{Edge, PolyhedralOneCurrent};
use crate::solver::TransportProblem;
use crate::Vec2;

/// Random symmetric `2N`-gon built as a zonogon: edges are random
/// generators sorted by angle in `[0, π)`, followed by their negatives.
///
/// Consecutive generator angles differ by at least `1e-3` radians, so every
/// corner is strictly convex.
pub fn random_polygon<R: Rng>(rng: &mut R, half_count: usize) -> SymmetricPolygon {
    assert!(half_count >= 2);
    let pi = std::f64::consts::PI;
    let min_gap = 1e-3_f64.min(pi / (4.0 * half_count as f64));
    loop {
        let mut angles: Vec<f64> = (0..half_count).map(|_| rng.random_range(0.0..pi)).collect();
        angles.sort_by(f64::total_cmp);
        let wrap = angles[0] + pi - angles[half_count - 1];
        if wrap < min_gap || angles.windows(2).any(|w| w[1] - w[0] < min_gap) {
            continue;
        }
        let gens: Vec<Vec2> = angles
            .iter()
            .map(|t| Vec2::new(t.cos(), t.sin()) * rng.random_range(0.2..1.5))
            .collect();
        let total: Vec2 = gens.iter().sum();
        let mut v = -total / 2.0;
        let mut half = Vec::with_capacity(half_count);
        for g in &gens {
            half.push(v);
            v += g;
        }
        if let Ok(p) = SymmetricPolygon::from_half(half) {
            return p;
        }
    }
}

fn point<R: Rng>(rng: &mut R, half_width: f64) -> Vec<f64> {
    vec![
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
    ]
}

/// Planar current with `1..=max_edges` random segments in `[−2, 2]²` and
/// multiplicities uniform in `[−5, 5]`.
pub fn random_current<R: Rng>(rng: &mut R, max_edges: usize) -> PolyhedralOneCurrent {
    let n = rng.random_range(1..=max_edges);
    let mut edges = Vec::with_capacity(n);
    while edges.len() < n {
        let (a, b) = (point(rng, 2.0), point(rng, 2.0));
        let e = Edge::new(a, b, rng.random_range(-5.0..5.0));
        if e.length() > 1e-3 && e.theta != 0.0 {
            edges.push(e);
        }
    }
    PolyhedralOneCurrent::new(edges).expect("edges are long enough")
}

/// A path with integer multiplicity plus one or two closed loops (integer
/// multiplicities, random orientation) attached at path vertices.
pub fn random_cyclic_current<R: Rng>(rng: &mut R) -> PolyhedralOneCurrent {
    let len = rng.random_range(2..=5);
    let path: Vec<Vec<f64>> = (0..len).map(|_| point(rng, 2.0)).collect();
    let theta = rng.random_range(1..=3) as f64;
    let mut edges: Vec<Edge> = path
        .windows(2)
        .map(|w| Edge::new(w[0].clone(), w[1].clone(), theta))
        .collect();
    for _ in 0..rng.random_range(1..=2) {
        let anchor = path.choose(rng).expect("non-empty path").clone();
        let k = rng.random_range(2..=4);
        let mut ring = vec![anchor.clone()];
        ring.extend((0..k).map(|_| point(rng, 2.0)));
        ring.push(anchor);
        let m = rng.random_range(1..=3) as f64 * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        edges.extend(ring.windows(2).map(|w| Edge::new(w[0].clone(), w[1].clone(), m)));
    }
    edges.retain(|e| e.length() > 1e-3);
    PolyhedralOneCurrent::new(edges).expect("edges are long enough")
}

/// Balanced problem on the integer grid `{0..side−1}²` with
/// `terminals` distinct terminals (`2..` in range) and integer masses.
pub fn random_grid_problem<R: Rng>(
    rng: &mut R,
    terminals: std::ops::RangeInclusive<usize>,
    side: usize,
    h: BranchingFunction,
    sigma: Anisotropy,
) -> TransportProblem {
    let n = rng.random_range(terminals);
    assert!(n >= 2 && n <= side * side);
    let mut cells: Vec<(usize, usize)> = (0..side).flat_map(|i| (0..side).map(move |j| (i, j))).collect();
    cells.shuffle(rng);
    let pts: Vec<Vec<f64>> = cells[..n].iter().map(|&(i, j)| vec![i as f64, j as f64]).collect();
    let ns = rng.random_range(1..n);
    let src: Vec<f64> = (0..ns).map(|_| rng.random_range(1..=3) as f64).collect();
    let total: f64 = src.iter().sum();
    let nt = n - ns;
    // Integer split of `total` into `nt` positive parts (needs total ≥ nt).
    let total = total.max(nt as f64);
    let src = if src.iter().sum::<f64>() < total {
        let mut s = src;
        s[0] += total - s.iter().sum::<f64>();
        s
    } else {
        src
    };
    let mut cuts: Vec<usize> = (1..total as usize).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..nt - 1].to_vec();
    cuts.sort();
    let mut tgt = Vec::with_capacity(nt);
    let mut prev = 0;
    for c in cuts.into_iter().chain([total as usize]) {
        tgt.push((c - prev) as f64);
        prev = c;
    }
    TransportProblem::new(
        pts[..ns].iter().cloned().zip(src).collect(),
        pts[ns..].iter().cloned().zip(tgt).collect(),
        h,
        sigma,
    )
    .expect("balanced by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_polygons_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in [2, 3, 10, 50] {
            let p = random_polygon(&mut rng, n);
            assert_eq!(p.half_len(), n);
        }
    }

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(random_current(&mut rng, 20).edges().len() <= 20);
            assert!(!crate::currents::is_acyclic(&random_cyclic_current(&mut rng)));
            let p = random_grid_problem(
                &mut rng,
                2..=4,
                5,
                BranchingFunction::power(0.5).unwrap(),
                Anisotropy::euclidean(2),
            );
            assert!(p.n_terminals() <= 4);
            p.validate().unwrap();
        }
    }
}
