use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::anisotropy::lines::norm;
use crate::anisotropy::polygon::SymmetricPolygon;
use crate::anisotropy::DirectionGrid;
use crate::error::{Error, Result};
use crate::Vec2;

type DirectionFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A positive cost on unit directions, evaluated on the sign-canonical
/// representative of each line.
#[derive(Clone)]
pub enum DirectionCost {
    /// `σ(u) = ‖u‖_p`, `p ∈ [1, ∞]`.
    Lp(f64),
    /// Planar `σ(φ) = 1 + amplitude · cos(frequency · φ)`.
    Harmonic { amplitude: f64, frequency: u32 },
    /// Arbitrary callable; it receives unit vectors.
    Custom(DirectionFn),
}

impl fmt::Debug for DirectionCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lp(p) => write!(f, "Lp({p})"),
            Self::Harmonic {
                amplitude,
                frequency,
            } => write!(f, "Harmonic {{ amplitude: {amplitude}, frequency: {frequency} }}"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum AnisotropyRep {
    Constant(f64),
    Polygonal(SymmetricPolygon),
    Functional(DirectionCost),
}

/// A 1-anisotropy `σ` on `ℝⁿ` together with the gauge
/// `G(v) = |v| σ(v / |v|)` it induces.
#[derive(Clone, Debug)]
pub struct Anisotropy {
    dim: usize,
    rep: AnisotropyRep,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AnisotropySpec {
    Constant {
        c: f64,
        #[serde(default = "planar")]
        dim: usize,
    },
    Polygonal {
        vertices: Vec<[f64; 2]>,
    },
    Lp {
        p: f64,
        #[serde(default = "planar")]
        dim: usize,
    },
    Linf {
        #[serde(default = "planar")]
        dim: usize,
    },
    Harmonic {
        amplitude: f64,
        frequency: u32,
    },
}

fn planar() -> usize {
    2
}

impl<'de> Deserialize<'de> for Anisotropy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = AnisotropySpec::deserialize(d)?;
        let built = match spec {
            AnisotropySpec::Constant { c, dim } => Anisotropy::constant(dim, c),
            AnisotropySpec::Polygonal { vertices } => {
                SymmetricPolygon::new(vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect())
                    .map(Anisotropy::polygonal)
            }
            AnisotropySpec::Lp { p, dim } => Anisotropy::lp(dim, p),
            AnisotropySpec::Linf { dim } => Anisotropy::lp(dim, f64::INFINITY),
            AnisotropySpec::Harmonic {
                amplitude,
                frequency,
            } => Anisotropy::harmonic(amplitude, frequency),
        };
        built.map_err(serde::de::Error::custom)
    }
}

impl Serialize for Anisotropy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let spec = match &self.rep {
            AnisotropyRep::Constant(c) => AnisotropySpec::Constant {
                c: *c,
                dim: self.dim,
            },
            AnisotropyRep::Polygonal(p) => AnisotropySpec::Polygonal {
                vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
            },
            AnisotropyRep::Functional(DirectionCost::Lp(p)) if p.is_infinite() => {
                AnisotropySpec::Linf { dim: self.dim }
            }
            AnisotropyRep::Functional(DirectionCost::Lp(p)) => AnisotropySpec::Lp {
                p: *p,
                dim: self.dim,
            },
            AnisotropyRep::Functional(DirectionCost::Harmonic {
                amplitude,
                frequency,
            }) => AnisotropySpec::Harmonic {
                amplitude: *amplitude,
                frequency: *frequency,
            },
            AnisotropyRep::Functional(DirectionCost::Custom(_)) => {
                return Err(serde::ser::Error::custom(
                    "custom direction costs cannot be serialized",
                ))
            }
        };
        spec.serialize(s)
    }
}

/// Flip `u` so that its first nonzero coordinate is positive.
pub(crate) fn canonical_sign(u: &[f64]) -> Vec<f64> {
    match u.iter().find(|x| **x != 0.0) {
        Some(x) if *x < 0.0 => u.iter().map(|x| -x).collect(),
        _ => u.to_vec(),
    }
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        norm(v)
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

impl Anisotropy {
    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidAnisotropy(format!("constant cost {c} must be positive")));
        }
        Ok(Self {
            dim,
            rep: AnisotropyRep::Constant(c),
        })
    }

    /// Unit Euclidean cost in `ℝⁿ`.
    pub fn euclidean(dim: usize) -> Self {
        Self::constant(dim, 1.0).expect("dim >= 2")
    }

    pub fn polygonal(ball: SymmetricPolygon) -> Self {
        Self {
            dim: 2,
            rep: AnisotropyRep::Polygonal(ball),
        }
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        check_dim(dim)?;
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidAnisotropy(format!("lp exponent {p} must be >= 1")));
        }
        Ok(Self {
            dim,
            rep: AnisotropyRep::Functional(DirectionCost::Lp(p)),
        })
    }

    pub fn harmonic(amplitude: f64, frequency: u32) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude.abs() < 1.0) {
            return Err(Error::InvalidAnisotropy(format!(
                "harmonic amplitude {amplitude} must lie in (-1, 1)"
            )));
        }
        Ok(Self {
            dim: 2,
            rep: AnisotropyRep::Functional(DirectionCost::Harmonic {
                amplitude,
                frequency,
            }),
        })
    }

    pub fn custom(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            rep: AnisotropyRep::Functional(DirectionCost::Custom(Arc::new(f))),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &AnisotropyRep {
        &self.rep
    }

    pub fn polygon(&self) -> Option<&SymmetricPolygon> {
        match &self.rep {
            AnisotropyRep::Polygonal(p) => Some(p),
            _ => None,
        }
    }

    /// `σ(u)` for a unit vector `u`.
    pub fn direction_cost(&self, u: &[f64]) -> f64 {
        match &self.rep {
            AnisotropyRep::Constant(c) => *c,
            AnisotropyRep::Polygonal(p) => p.gauge(&Vec2::new(u[0], u[1])),
            AnisotropyRep::Functional(DirectionCost::Lp(p)) => lp_norm(u, *p),
            AnisotropyRep::Functional(DirectionCost::Harmonic {
                amplitude,
                frequency,
            }) => {
                let c = canonical_sign(u);
                let phi = c[1].atan2(c[0]);
                1.0 + amplitude * (*frequency as f64 * phi).cos()
            }
            AnisotropyRep::Functional(DirectionCost::Custom(f)) => f(&canonical_sign(u)),
        }
    }

    /// The anisotropic norm `G(v)`, with `G(0) = 0`.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(self.eval(v))
    }

    /// `G(v)` without the dimension check.
    #[inline]
    pub fn eval(&self, v: &[f64]) -> f64 {
        match &self.rep {
            AnisotropyRep::Constant(c) => c * norm(v),
            AnisotropyRep::Polygonal(p) => p.gauge(&Vec2::new(v[0], v[1])),
            AnisotropyRep::Functional(DirectionCost::Lp(p)) => lp_norm(v, *p),
            AnisotropyRep::Functional(_) => {
                let r = norm(v);
                if r == 0.0 {
                    return 0.0;
                }
                let u: Vec<f64> = v.iter().map(|x| x / r).collect();
                r * self.direction_cost(&u)
            }
        }
    }

    #[inline]
    pub fn eval2(&self, v: &Vec2) -> f64 {
        self.eval(v.as_slice())
    }

    /// Whether the gauge is a norm without needing a sampled check.
    pub fn is_convex_by_construction(&self) -> bool {
        matches!(
            self.rep,
            AnisotropyRep::Constant(_)
                | AnisotropyRep::Polygonal(_)
                | AnisotropyRep::Functional(DirectionCost::Lp(_))
        )
    }

    /// `min_{|u| = 1} σ(u)`: exact for the built-in families, sampled on
    /// a fine direction grid for custom costs.
    pub fn min_unit_cost(&self) -> f64 {
        match &self.rep {
            AnisotropyRep::Constant(c) => *c,
            AnisotropyRep::Polygonal(p) => 1.0 / p.circumradius(),
            AnisotropyRep::Functional(DirectionCost::Lp(p)) => {
                if *p <= 2.0 {
                    1.0
                } else {
                    (self.dim as f64).powf(1.0 / p - 0.5)
                }
            }
            AnisotropyRep::Functional(DirectionCost::Harmonic {
                amplitude,
                frequency,
            }) => {
                if *frequency == 0 {
                    1.0 + amplitude
                } else {
                    1.0 - amplitude.abs()
                }
            }
            AnisotropyRep::Functional(DirectionCost::Custom(_)) => {
                let grid = if self.dim == 2 {
                    DirectionGrid::Circle { count: 3600 }
                } else {
                    DirectionGrid::Lattice {
                        dim: self.dim,
                        radius: 4,
                    }
                };
                grid.directions()
                    .iter()
                    .map(|u| self.direction_cost(u))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Planar subgradient of `G` at `q ≠ 0`: a vector `n` with
    /// `⟨n, q⟩ = G(q)` and `⟨n, x⟩ <= G(x)` for all `x` when `G` is convex.
    ///
    /// On polygon vertices the normal bisecting the two adjacent edge
    /// normals is used.
    pub fn supporting_normal(&self, q: &Vec2) -> Result<Vec2> {
        if self.dim != 2 {
            return Err(Error::Unsupported(
                "supporting normals are computed for planar gauges only".into(),
            ));
        }
        let r = q.norm();
        if r == 0.0 {
            return Err(Error::ZeroVector);
        }
        let g = self.eval2(q);
        let raw = match &self.rep {
            AnisotropyRep::Constant(c) => q * (c / r),
            AnisotropyRep::Polygonal(p) => {
                let normals = p.support_normals();
                let active: Vec<&Vec2> = normals
                    .iter()
                    .filter(|n| (n.dot(q) - g).abs() <= 1e-12 * g.max(1.0))
                    .collect();
                match active.as_slice() {
                    [one] => **one,
                    many => {
                        let bis: Vec2 = many.iter().map(|n| n.normalize()).sum();
                        bis
                    }
                }
            }
            AnisotropyRep::Functional(_) => {
                // ∇G = σ(φ) e_r + σ'(φ) e_φ in polar coordinates.
                let phi = q.y.atan2(q.x);
                let h = 1e-5;
                let s = |t: f64| self.direction_cost(&[t.cos(), t.sin()]);
                let ds = (s(phi + h) - s(phi - h)) / (2.0 * h);
                let er = Vec2::new(phi.cos(), phi.sin());
                let ephi = Vec2::new(-phi.sin(), phi.cos());
                er * s(phi) + ephi * ds
            }
        };
        // Rescale so that the support line passes through q exactly.
        Ok(raw * (g / raw.dot(q)))
    }

    /// Rotate the unit ball by `angle` (planar constant and polygonal only).
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        match &self.rep {
            AnisotropyRep::Constant(_) if self.dim == 2 => Ok(self.clone()),
            AnisotropyRep::Polygonal(p) => Ok(Self::polygonal(p.rotated(angle))),
            _ => Err(Error::Unsupported(
                "rotation of functional anisotropies".into(),
            )),
        }
    }

    /// Largest radius `r` such that `G(u) <= 1/r` on the Euclidean unit
    /// sphere fails never, i.e. the inradius of the gauge's unit ball
    /// measured along sampled directions (exact for the built-ins).
    pub fn unit_ball_inradius(&self) -> f64 {
        match &self.rep {
            AnisotropyRep::Constant(c) => 1.0 / c,
            AnisotropyRep::Polygonal(p) => p.inradius(),
            _ => {
                // Inradius of a symmetric convex body = min of its support
                // function; sample supporting lines of boundary points.
                let grid = DirectionGrid::Circle { count: 3600 };
                grid.directions()
                    .iter()
                    .filter_map(|u| {
                        let q = Vec2::new(u[0], u[1]) / self.direction_cost(u);
                        self.supporting_normal(&q).ok().map(|n| 1.0 / n.norm())
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidAnisotropy(format!("dimension {dim} < 2")));
    }
    Ok(())
}

/// `G_σ(v)`: `|v| σ(v/|v|)` for `v ≠ 0`, `0` at the origin.
pub fn anisotropic_norm(sigma: &Anisotropy, v: &[f64]) -> Result<f64> {
    sigma.norm(v)
}
