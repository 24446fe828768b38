//! Exact rational polytopes in a lattice: vertex enumeration, volumes, mixed
//! volumes, lattice points and one-parameter polytope families.

mod parametric;
mod polytope;

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::rational::{int, Rational};

pub use parametric::{parametric_family, AffinePoint, Chamber, ParametricPolytope};
pub use polytope::{
    lattice_points, linear_stats, mixed_volume, polarize, vertices_of, volume, LinearStats,
    Polytope,
};

/// A rational point of `M_Q`.
pub type Point = Vec<Rational>;

/// Integer vector in the cocharacter lattice `N = Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LatticeVector(pub Vec<i64>);

impl TryFrom<Vec<i64>> for LatticeVector {
    type Error = Error;

    fn try_from(coords: Vec<i64>) -> Result<Self> {
        if coords.iter().any(|c| c.unsigned_abs() > MAX_COORD) {
            return Err(Error::Parse("coordinate too large".into()));
        }
        Ok(Self(coords))
    }
}

impl From<LatticeVector> for Vec<i64> {
    fn from(v: LatticeVector) -> Self {
        v.0
    }
}

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Gcd of the coordinates is 1.
    pub fn is_primitive(&self) -> bool {
        self.0.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
    }

    pub fn to_rational(&self) -> Point {
        self.0.iter().map(|&x| int(x)).collect()
    }

    /// Pairing `<x, u>` with a rational point.
    pub fn pair(&self, x: &[Rational]) -> Rational {
        dot(&self.to_rational(), x)
    }

    pub fn l1_norm(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn linf_norm(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for LatticeVector {
    type Err = Error;

    /// Accepts `1,0`, `(1,0)` or `[1, 0]`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .or_else(|| t.strip_prefix('[').and_then(|x| x.strip_suffix(']')))
            .unwrap_or(t);
        if t.trim().is_empty() {
            return Err(Error::Parse("empty vector".into()));
        }
        let coords = t
            .split(',')
            .map(|c| {
                let c = c.trim();
                c.parse::<i64>()
                    .map_err(|e| Error::Parse(format!("{c:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coords.len() > 16 {
            return Err(Error::Parse("vector has too many coordinates".into()));
        }
        Self::try_from(coords)
    }
}

/// Largest accepted coordinate magnitude for decoded vectors and exponents.
pub const MAX_COORD: u64 = 1 << 20;

/// `{x : <x, normal> >= -offset}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: LatticeVector,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: LatticeVector, offset: Rational) -> Self {
        Self { normal, offset }
    }

    /// `<x, u> + a`, nonnegative exactly on the halfspace.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        self.normal.pair(x) + &self.offset
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.slack(x) >= Rational::from_integer(0.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_vector_parsing() {
        assert_eq!(
            "1,-2".parse::<LatticeVector>().unwrap(),
            LatticeVector(vec![1, -2])
        );
        assert_eq!(
            "(1, 1)".parse::<LatticeVector>().unwrap(),
            LatticeVector(vec![1, 1])
        );
        assert_eq!(
            "[3]".parse::<LatticeVector>().unwrap(),
            LatticeVector(vec![3])
        );
        assert!("".parse::<LatticeVector>().is_err());
        assert!("1,,2".parse::<LatticeVector>().is_err());
        assert!("99999999999".parse::<LatticeVector>().is_err());
    }

    #[test]
    fn primitivity() {
        assert!(LatticeVector(vec![1, 1]).is_primitive());
        assert!(!LatticeVector(vec![2, 0]).is_primitive());
        assert!(!LatticeVector(vec![0, 0]).is_primitive());
        assert!(LatticeVector(vec![-2, -3]).is_primitive());
    }
}
