use serde::Serialize;

use crate::anisotropy::lines::cross;
use crate::anisotropy::{check_convexity, Anisotropy, AnisotropyRep, DirectionGrid, SymmetricPolygon};
use crate::error::{Error, Result};
use crate::igrep::{polygon_decompose, DirectionMeasure};
use crate::tolerance::RECONSTRUCTION_GRID;
use crate::Vec2;

pub const MAX_DEPTH: usize = 16;

/// Resolution of the convexity pre-check.
const CONVEXITY_SAMPLES: usize = 360;

/// A discrete representing measure together with the polygon it
/// represents exactly and its measured distance from the target gauge.
#[derive(Clone, Debug, Serialize)]
pub struct Representation {
    pub measure: DirectionMeasure,
    pub polygon: SymmetricPolygon,
    /// Inradius of the target gauge's unit ball.
    pub inradius: f64,
    /// `δ = max |reconstruct(u) / G(u) − 1|` over the fixed direction grid
    /// and the polygon's vertex directions.
    pub uniform_error: f64,
}

/// `k`-th dyadic boundary point: the unit-sphere point of `G` on the ray at
/// angle `2π j / 2^k`.
///
/// Points shared across depths are bitwise identical since dividing by a
/// power of two is exact.
fn dyadic_point(sigma: &Anisotropy, j: usize, count: usize) -> Vec2 {
    let t = std::f64::consts::TAU * j as f64 / count as f64;
    let u = Vec2::new(t.cos(), t.sin());
    u / sigma.eval2(&u)
}

fn intersect(a: &Vec2, b: &Vec2) -> Vec2 {
    let det = cross(a, b);
    Vec2::new((b.y - a.y) / det, (a.x - b.x) / det)
}

/// Circumscribed symmetric polygon `P_k ⊇ C` from supporting lines at the
/// `2^k` dyadic boundary points of the unit ball `C` of a planar gauge.
///
/// Supporting lines depend only on the boundary point, so lines are reused
/// across depths and `P_{k+1} ⊆ P_k`.
pub fn approximate_body(sigma: &Anisotropy, depth: usize) -> Result<SymmetricPolygon> {
    if sigma.dim() != 2 {
        return Err(Error::Unsupported("body approximation is planar".into()));
    }
    if depth > MAX_DEPTH {
        return Err(Error::DepthOverflow(depth));
    }
    if depth < 2 {
        return Err(Error::Domain(format!("depth {depth} < 2")));
    }
    let rep = check_convexity(
        sigma,
        &DirectionGrid::Circle {
            count: CONVEXITY_SAMPLES,
        },
    );
    if !rep.convex {
        return Err(Error::NonConvex {
            defect: rep.worst_defect,
        });
    }
    let count = 1usize << depth;
    let half = count / 2;
    let mut lines: Vec<Vec2> = Vec::with_capacity(half);
    for j in 0..half {
        let n = sigma.supporting_normal(&dyadic_point(sigma, j, count))?;
        match lines.last() {
            Some(prev) if (n - prev).norm() <= 1e-12 * n.norm() => {}
            _ => lines.push(n),
        }
    }
    while lines.len() > 1 {
        let last = lines[lines.len() - 1];
        if (last + lines[0]).norm() <= 1e-12 * last.norm() {
            lines.pop();
        } else {
            break;
        }
    }
    let h = lines.len();
    let line = |i: usize| if i < h { lines[i] } else { -lines[i - h] };
    let mut half_vertices: Vec<Vec2> = (0..h).map(|i| intersect(&line(i), &line(i + 1))).collect();

    // Drop coincident or flat corners, together with their antipodes.
    loop {
        let m = half_vertices.len();
        let full = |i: usize| {
            let i = i % (2 * m);
            if i < m {
                half_vertices[i]
            } else {
                -half_vertices[i - m]
            }
        };
        let scale = half_vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let eps = 1e-12 * scale * scale;
        let bad = (0..m).find(|&i| {
            let (a, b, c) = (full(i + 2 * m - 1), full(i), full(i + 1));
            (b - a).norm() <= 1e-12 * scale || cross(&(b - a), &(c - b)) <= eps
        });
        match bad {
            Some(i) if m > 2 => {
                half_vertices.remove(i);
            }
            _ => break,
        }
    }
    SymmetricPolygon::from_half(half_vertices)
}

fn grid_directions(polygon: &SymmetricPolygon) -> Vec<Vec2> {
    let mut dirs: Vec<Vec2> = DirectionGrid::Circle {
        count: RECONSTRUCTION_GRID,
    }
    .directions()
    .into_iter()
    .map(|u| Vec2::new(u[0], u[1]))
    .collect();
    dirs.extend(polygon.vertices()[..polygon.half_len()].iter().map(|v| v.normalize()));
    dirs
}

/// Representing measure with its polygon and error report.
///
/// Polygonal gauges are decomposed exactly and `depth` is ignored.
pub fn represent(sigma: &Anisotropy, depth: usize) -> Result<Representation> {
    let polygon = match sigma.rep() {
        AnisotropyRep::Polygonal(p) => p.clone(),
        _ => approximate_body(sigma, depth)?,
    };
    let measure = polygon_decompose(&polygon)?.measure();
    let uniform_error = measure.relative_error(&grid_directions(&polygon), |u| sigma.eval2(u));
    Ok(Representation {
        measure,
        polygon,
        inradius: sigma.unit_ball_inradius(),
        uniform_error,
    })
}

pub fn representing_measure(sigma: &Anisotropy, depth: usize) -> Result<DirectionMeasure> {
    represent(sigma, depth).map(|r| r.measure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_depth_two_is_square() {
        let p = approximate_body(&Anisotropy::euclidean(2), 2).unwrap();
        let v = p.vertices();
        assert_eq!(v.len(), 4);
        for (got, want) in v.iter().zip([(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]) {
            assert!((got - Vec2::new(want.0, want.1)).norm() < 1e-15);
        }
    }

    #[test]
    fn disc_containment_and_nesting() {
        let disc = Anisotropy::euclidean(2);
        let mut prev: Option<SymmetricPolygon> = None;
        let mut prev_hd = f64::INFINITY;
        for k in 2..=10 {
            let p = approximate_body(&disc, k).unwrap();
            for i in 0..500 {
                let t = 0.0123 + std::f64::consts::TAU * i as f64 / 500.0;
                assert!(p.gauge(&Vec2::new(t.cos(), t.sin())) <= 1.0 + 1e-15);
            }
            if let Some(q) = &prev {
                for v in p.vertices() {
                    assert!(q.gauge(v) <= 1.0 + 1e-12);
                }
            }
            // Hausdorff distance from the disc: the farthest vertex.
            let hd = p.circumradius() - 1.0;
            assert!(hd < prev_hd);
            prev_hd = hd;
            prev = Some(p);
        }
    }

    #[test]
    fn diamond_measure_has_two_unit_atoms() {
        let m = representing_measure(&Anisotropy::polygonal(SymmetricPolygon::diamond()), 5).unwrap();
        let atoms = m.atoms();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].omega[0] - 1.0).abs() < 1e-15 && atoms[0].omega[1].abs() < 1e-15);
        assert!(atoms[1].omega[0].abs() < 1e-15 && (atoms[1].omega[1] - 1.0).abs() < 1e-15);
        for a in atoms {
            assert!((a.mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disc_mass_approaches_half_pi() {
        // Uniform density c on S¹ with c ∫|cos φ| dφ = 4c = 1 has total mass
        // 2π c = π/2; check that constant by midpoint quadrature too.
        let n = 100_000;
        let quad: f64 = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
                t.cos().abs() * std::f64::consts::TAU / n as f64
            })
            .sum();
        let c = 1.0 / quad;
        let expected = std::f64::consts::TAU * c;
        assert!((expected - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        let rep = represent(&Anisotropy::euclidean(2), 12).unwrap();
        assert!((rep.measure.total_mass() - expected).abs() < 0.01 * expected);
        assert!(rep.measure.total_mass() <= 8.0 / rep.inradius);
        assert!(rep.uniform_error < 1e-3);
    }

    #[test]
    fn functional_and_polygonal_gauges() {
        let mild = Anisotropy::harmonic(0.05, 4).unwrap();
        let rep = represent(&mild, 9).unwrap();
        assert!(rep.uniform_error < 1e-3, "{}", rep.uniform_error);
        let lp = Anisotropy::lp(2, 3.0).unwrap();
        assert!(represent(&lp, 10).unwrap().uniform_error < 1e-4);
        let hex = Anisotropy::polygonal(SymmetricPolygon::regular(3, 1.0, 0.2).unwrap());
        assert!(represent(&hex, 2).unwrap().uniform_error < 1e-12);
    }

    #[test]
    fn errors() {
        let d = Anisotropy::euclidean(2);
        assert!(matches!(approximate_body(&d, 17), Err(Error::DepthOverflow(17))));
        let bad = Anisotropy::harmonic(0.5, 4).unwrap();
        assert!(matches!(approximate_body(&bad, 4), Err(Error::NonConvex { .. })));
        assert!(approximate_body(&Anisotropy::euclidean(3), 4).is_err());
    }
}
