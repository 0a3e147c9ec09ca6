//! Line geometry: Jacobian factors between unoriented lines and planar
//! rotation helpers.

use crate::error::{Error, Result};
use crate::Vec2;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counterclockwise rotation by `angle` radians.
#[inline]
pub fn rotate(v: &Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Counterclockwise rotation by 90 degrees, `(x, y) ↦ (−y, x)`.
#[inline]
pub fn rot90(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `J(L_u, L_w) = |cos α|` for the lines spanned by `u` and `w`.
///
/// Inputs need not be unit; they are normalised first.
pub fn line_jacobian(u: &[f64], w: &[f64]) -> Result<f64> {
    if u.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: w.len(),
        });
    }
    let (nu, nw) = (norm(u), norm(w));
    if nu == 0.0 || nw == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(u, w) / (nu * nw)).abs().min(1.0))
}

/// `[L_u, L_w] = |sin α|` for planar lines, i.e. the Jacobian against the
/// orthogonal line.
pub fn line_bracket(u: &Vec2, w: &Vec2) -> Result<f64> {
    let r = rot90(u);
    line_jacobian(r.as_slice(), w.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn jacobian_examples() {
        assert_eq!(line_jacobian(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(line_jacobian(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let j = line_jacobian(&[1.0, 0.0], &[s, s]).unwrap();
        assert!((j - 0.707_106_781_186_547_5).abs() < 1e-15);
        assert_eq!(line_jacobian(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroVector));
        assert!(line_jacobian(&[1.0, 0.0], &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn bracket_is_sine() {
        let b = line_bracket(&Vec2::new(1.0, 0.0), &Vec2::new(0.5f64.cos(), 0.5f64.sin())).unwrap();
        assert!((b - 0.5f64.sin()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn jacobian_symmetric_and_sign_invariant(
            a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64
        ) {
            prop_assume!(a.hypot(b) > 1e-3 && c.hypot(d) > 1e-3);
            let j = line_jacobian(&[a, b], &[c, d]).unwrap();
            prop_assert!((0.0..=1.0).contains(&j));
            prop_assert_eq!(j, line_jacobian(&[c, d], &[a, b]).unwrap());
            prop_assert!((j - line_jacobian(&[-a, -b], &[c, d]).unwrap()).abs() < 1e-15);
            prop_assert!((j - line_jacobian(&[a, b], &[-c, -d]).unwrap()).abs() < 1e-15);
        }
    }
}
