//! Points of ℝ^N and the handful of vector operations the integrators need.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝ^N stored as a dense coordinate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpacePoint(Vec<f64>);

impl SpacePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        SpacePoint(coords)
    }

    pub fn origin(dim: usize) -> Self {
        SpacePoint(vec![0.0; dim])
    }

    /// The point `r·e₁`.
    pub fn on_axis(dim: usize, r: f64) -> Self {
        let mut c = vec![0.0; dim];
        c[0] = r;
        SpacePoint(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn distance(&self, other: &SpacePoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, factor: f64) -> SpacePoint {
        SpacePoint(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn sub(&self, other: &SpacePoint) -> SpacePoint {
        SpacePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &SpacePoint) -> SpacePoint {
        SpacePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }

    pub fn require_nonzero(&self) -> Result<()> {
        if self.is_origin() {
            Err(Error::Origin)
        } else {
            Ok(())
        }
    }
}

impl From<Vec<f64>> for SpacePoint {
    fn from(v: Vec<f64>) -> Self {
        SpacePoint(v)
    }
}

impl fmt::Display for SpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Surface area of the unit sphere S^{n-1} ⊂ ℝ^n, i.e. 2π^{n/2}/Γ(n/2).
///
/// `sphere_area(1) = 2` counts the two points of S⁰.
pub fn sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => sphere_area(n - 2) * 2.0 * PI / (n as f64 - 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(1), 2.0);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn point_ops() {
        let a = SpacePoint::new(vec![3.0, 4.0]);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.distance(&SpacePoint::origin(2)), 5.0);
        assert!(SpacePoint::origin(3).require_nonzero().is_err());
        assert!(a.check_dim(3).is_err());
    }
}
