use serde::Serialize;

use super::{Fan, ToricDivisor};
use crate::error::{Error, Result};
use crate::geometry::LatticeVector;
use crate::rational::{int, Rational};

/// Result of one star subdivision `Y -> X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSubdivision {
    pub fan: Fan,
    /// Index of the new ray in `fan`.
    pub new_ray: usize,
    /// Relative canonical divisor `K_{Y/X}`.
    pub k_rel: ToricDivisor,
    base: Fan,
}

impl StarSubdivision {
    /// Pullback of a divisor on the base: the new coefficient is the value of
    /// the divisor's piecewise linear function at the new ray.
    pub fn pullback(&self, d: &ToricDivisor) -> Result<ToricDivisor> {
        let mut coeffs = d.coeffs.clone();
        coeffs.push(
            self.base
                .piecewise_linear(&d.coeffs, &self.fan.rays()[self.new_ray])?,
        );
        Ok(ToricDivisor::new(coeffs))
    }
}

/// Star subdivision of `fan` at the primitive vector `u`.
pub fn star_subdivision(fan: &Fan, u: &LatticeVector) -> Result<StarSubdivision> {
    let y = fan.subdivide(u)?;
    let a = log_discrepancy(fan, u)?;
    let m = fan.ray_count();
    let mut k = ToricDivisor::zero(m + 1);
    k.coeffs[m] = a - int(1);
    Ok(StarSubdivision {
        fan: y,
        new_ray: m,
        k_rel: k,
        base: fan.clone(),
    })
}

/// Log discrepancy `A_X(v_u)`: the piecewise linear function equal to 1 on
/// every ray generator.
pub fn log_discrepancy(fan: &Fan, u: &LatticeVector) -> Result<Rational> {
    if u.dim() != fan.dim() {
        return Err(Error::DimensionMismatch {
            expected: fan.dim(),
            got: u.dim(),
        });
    }
    if u.is_zero() {
        return Err(Error::ZeroVector);
    }
    fan.piecewise_linear(&vec![int(1); fan.ray_count()], u)
}

/// An iterated star subdivision `Y -> X` of a base fan. The first
/// `base.ray_count()` rays of `fan` are the base rays in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    base: Fan,
    fan: Fan,
    centers: Vec<LatticeVector>,
}

#[derive(Serialize)]
struct ModelSummary<'a> {
    rays: &'a [LatticeVector],
    cones: &'a [Vec<usize>],
    centers: &'a [LatticeVector],
}

impl Model {
    pub fn trivial(base: Fan) -> Self {
        Self {
            fan: base.clone(),
            base,
            centers: Vec::new(),
        }
    }

    /// Subdivides at each center in order.
    pub fn new(base: Fan, centers: &[LatticeVector]) -> Result<Self> {
        let mut fan = base.clone();
        for u in centers {
            fan = star_subdivision(&fan, u)?.fan;
        }
        Ok(Self {
            base,
            fan,
            centers: centers.to_vec(),
        })
    }

    pub fn base(&self) -> &Fan {
        &self.base
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn centers(&self) -> &[LatticeVector] {
        &self.centers
    }

    pub fn is_trivial(&self) -> bool {
        self.centers.is_empty()
    }

    /// Pullback of a base divisor to the model.
    pub fn pullback_from_base(&self, d: &ToricDivisor) -> Result<ToricDivisor> {
        if d.len() != self.base.ray_count() {
            return Err(Error::DimensionMismatch {
                expected: self.base.ray_count(),
                got: d.len(),
            });
        }
        let coeffs = self
            .fan
            .rays()
            .iter()
            .map(|r| self.base.piecewise_linear(&d.coeffs, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(ToricDivisor::new(coeffs))
    }

    /// `K_{Y/X}` with coefficient `A_X(u_rho) - 1` on each ray.
    pub fn k_rel(&self) -> Result<ToricDivisor> {
        let coeffs = self
            .fan
            .rays()
            .iter()
            .map(|r| Ok(log_discrepancy(&self.base, r)? - int(1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ToricDivisor::new(coeffs))
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(ModelSummary {
            rays: self.fan.rays(),
            cones: self.fan.cones(),
            centers: &self.centers,
        })
        .expect("serializable")
    }
}
