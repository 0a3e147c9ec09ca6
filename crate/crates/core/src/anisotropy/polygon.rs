use serde::{Deserialize, Serialize};

use crate::anisotropy::lines::{cross, rotate};
use crate::error::{Error, Result};
use crate::Vec2;

/// A centrally symmetric, strictly convex polygon `v₁, …, v_{2N}` listed
/// counterclockwise with `v_{i+N} = −v_i` exactly.
///
/// The polygon is the unit ball of the gauge it induces; the support lines
/// `⟨n_i, u⟩ = 1` of its edges are computed once at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon", into = "RawPolygon")]
pub struct SymmetricPolygon {
    vertices: Vec<Vec2>,
    normals: Vec<Vec2>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawPolygon {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<RawPolygon> for SymmetricPolygon {
    type Error = Error;
    fn try_from(raw: RawPolygon) -> Result<Self> {
        Self::new(raw.vertices.into_iter().map(|v| Vec2::new(v[0], v[1])).collect())
    }
}

impl From<SymmetricPolygon> for RawPolygon {
    fn from(p: SymmetricPolygon) -> Self {
        RawPolygon {
            vertices: p.vertices.iter().map(|v| [v.x, v.y]).collect(),
        }
    }
}

impl SymmetricPolygon {
    /// Validates a full counterclockwise vertex cycle.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let m = vertices.len();
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidPolygon(format!(
                "need an even number >= 4 of vertices, got {m}"
            )));
        }
        if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let n = m / 2;
        for i in 0..n {
            if vertices[i + n] != -vertices[i] {
                return Err(Error::InvalidPolygon(format!(
                    "vertex {} is not the antipode of vertex {i}",
                    i + n
                )));
            }
        }
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let eps = 1e-12 * scale * scale;
        let mut winding = 0.0;
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            let c = vertices[(i + 2) % m];
            if cross(&a, &b) <= eps {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {i} and {} are not counterclockwise about the origin",
                    (i + 1) % m
                )));
            }
            if cross(&(b - a), &(c - b)) <= eps {
                return Err(Error::InvalidPolygon(format!(
                    "vertex {} is not a strict convex corner",
                    (i + 1) % m
                )));
            }
            winding += cross(&a, &b).atan2(a.dot(&b));
        }
        if (winding - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidPolygon("vertex cycle winds more than once".into()));
        }
        let normals = (0..m)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % m];
                let e = b - a;
                Vec2::new(e.y, -e.x) / cross(&a, &b)
            })
            .collect();
        Ok(Self { vertices, normals })
    }

    /// Completes `v₁, …, v_N` with their antipodes.
    pub fn from_half(half: Vec<Vec2>) -> Result<Self> {
        let mut all = half.clone();
        all.extend(half.iter().map(|v| -v));
        Self::new(all)
    }

    /// The ℓ¹ unit ball `(±1, 0), (0, ±1)`.
    pub fn diamond() -> Self {
        Self::from_half(vec![Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).expect("valid diamond")
    }

    /// The ℓ∞ unit ball `[−1, 1]²`.
    pub fn square() -> Self {
        Self::from_half(vec![Vec2::new(1.0, -1.0), Vec2::new(1.0, 1.0)]).expect("valid square")
    }

    /// Regular `2N`-gon with circumradius `radius`, first vertex at `phase`.
    pub fn regular(half_count: usize, radius: f64, phase: f64) -> Result<Self> {
        let m = 2 * half_count;
        let half = (0..half_count)
            .map(|i| {
                let t = phase + std::f64::consts::TAU * i as f64 / m as f64;
                Vec2::new(radius * t.cos(), radius * t.sin())
            })
            .collect();
        Self::from_half(half)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// `N`, half the number of vertices.
    pub fn half_len(&self) -> usize {
        self.vertices.len() / 2
    }

    /// Edge support normals `n_i` with `⟨n_i, u⟩ = 1` on the edge from
    /// `v_i` to `v_{i+1}`.
    pub fn support_normals(&self) -> &[Vec2] {
        &self.normals
    }

    /// Minkowski gauge `‖u‖_P = max_i ⟨n_i, u⟩`.
    #[inline]
    pub fn gauge(&self, u: &Vec2) -> f64 {
        self.normals
            .iter()
            .map(|n| n.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Radius of the largest centred disc inside the polygon.
    pub fn inradius(&self) -> f64 {
        self.normals
            .iter()
            .map(|n| 1.0 / n.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Counterclockwise rotation by `angle`; vertex antipodality survives
    /// exactly because rotation commutes with negation in floating point.
    pub fn rotated(&self, angle: f64) -> Self {
        let vertices: Vec<Vec2> = self.vertices.iter().map(|v| rotate(v, angle)).collect();
        Self::new(vertices).expect("rotation preserves validity")
    }

    /// Uniformly scaled copy.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v * factor).collect())
    }

    /// Point on edge `i` at parameter `t ∈ [0, 1]`.
    pub fn boundary_point(&self, edge: usize, t: f64) -> Vec2 {
        let m = self.vertices.len();
        let a = self.vertices[edge % m];
        let b = self.vertices[(edge + 1) % m];
        a + (b - a) * t
    }
}
