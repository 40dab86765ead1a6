//! Unit vectors on S^{n-1} and the angle arithmetic shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit tolerance accepted by [`Direction::new`].
pub const UNIT_TOL: f64 = 1e-12;

/// A unit vector in R^n, n >= 2. Serializes as a bare coordinate array.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps `coords`, requiring unit norm within 1e-12 and n >= 2.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        let n = norm(&coords);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(n));
        }
        Ok(Direction(coords))
    }

    /// Normalizes an arbitrary vector onto the sphere.
    pub fn from_vector(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        let n = norm(&coords);
        if n < 1e-12 {
            return Err(Error::ZeroVector);
        }
        Ok(Direction(coords.into_iter().map(|c| c / n).collect()))
    }

    /// The `i`-th standard basis vector of R^n.
    pub fn basis(n: usize, i: usize) -> Self {
        assert!(n >= 2 && i < n);
        let mut coords = vec![0.0; n];
        coords[i] = 1.0;
        Direction(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        dot(&self.0, &other.0)
    }

    /// Spherical distance theta(self, other) in [0, pi].
    ///
    /// Computed as 2 atan2(|a-b|, |a+b|), which is stable near both 0 and pi
    /// and keeps the chord identity |a-b| = 2 sin(theta/2) exact to rounding.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        angle_unit(&self.0, &other.0)
    }

    pub fn negated(&self) -> Direction {
        Direction(self.0.iter().map(|c| -c).collect())
    }

    /// Component of `v` orthogonal to this direction.
    pub fn tangential_part(&self, v: &[f64]) -> Vec<f64> {
        let d = dot(&self.0, v);
        v.iter().zip(&self.0).map(|(vi, si)| vi - d * si).collect()
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Direction::new(coords).map_err(serde::de::Error::custom)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|c| c * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

fn angle_unit(a: &[f64], b: &[f64]) -> f64 {
    2.0 * f64::atan2(distance(a, b), norm(&add(a, b)))
}

/// Angle between two arbitrary nonzero vectors.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    debug_assert!(na > 1e-300 && nb > 1e-300);
    let ua = scale(a, 1.0 / na);
    let ub = scale(b, 1.0 / nb);
    angle_unit(&ua, &ub)
}
