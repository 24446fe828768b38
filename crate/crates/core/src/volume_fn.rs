//! Volume functions `t -> vol(L - tD)`, pseudo-effective thresholds, the
//! positive intersection pairing and volumes along a tower of models.
//!
//! Volumes are normalized as self-intersections: `vol(D) = n! vol(P_D)`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{parametric_family, LatticeVector, ParametricPolytope};
use crate::poly::PiecewisePolynomial;
use crate::rational::{factorial, int, Rational};
use crate::toric::{is_nef, polytope_of, Fan, Model, ToricDivisor};

/// `n! vol(P_D)`; zero iff `D` is not big.
pub fn big_volume(fan: &Fan, d: &ToricDivisor) -> Result<Rational> {
    Ok(polytope_of(fan, d)?.volume() * factorial(fan.dim()))
}

/// Volume `V` of a nef and big class, [`Error::NotAmple`] otherwise.
pub(crate) fn require_nef_and_big(fan: &Fan, l: &ToricDivisor) -> Result<Rational> {
    if !is_nef(fan, l)? {
        return Err(Error::NotAmple);
    }
    let v = big_volume(fan, l)?;
    if v.is_zero() {
        return Err(Error::NotAmple);
    }
    Ok(v)
}

/// The family `P_{L - tD}`.
pub(crate) fn divisor_family(
    fan: &Fan,
    l: &ToricDivisor,
    d: &ToricDivisor,
) -> Result<ParametricPolytope> {
    if l.len() != fan.ray_count() || d.len() != fan.ray_count() {
        return Err(Error::DimensionMismatch {
            expected: fan.ray_count(),
            got: l.len().min(d.len()),
        });
    }
    parametric_family(fan.dim(), fan.rays(), &l.coeffs, &d.coeffs)
}

/// `t -> vol(L - tD)` on `[0, tau_plus]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeCurve {
    pub curve: PiecewisePolynomial,
    #[serde(with = "crate::rational::serde_q")]
    pub tau_plus: Rational,
    #[serde(with = "crate::rational::serde_q")]
    pub volume: Rational,
}

impl VolumeCurve {
    /// Value at any real `t`: `V` below 0 and 0 beyond `tau_plus`.
    pub fn eval(&self, t: &Rational) -> Rational {
        if t.is_negative() {
            return self.volume.clone();
        }
        if t > &self.tau_plus {
            return Rational::zero();
        }
        self.curve.eval(t).expect("inside domain")
    }
}

/// Exact volume curve of `L - tD` for nef and big `L` and a nonzero `D`
/// whose threshold is finite.
pub fn volume_curve(fan: &Fan, l: &ToricDivisor, d: &ToricDivisor) -> Result<VolumeCurve> {
    let v = require_nef_and_big(fan, l)?;
    if d.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let fam = divisor_family(fan, l, d)?;
    let tau_plus = threshold(&fam)?;
    let nf = factorial(fan.dim());
    let curve = fam
        .volume_curve(&Rational::zero(), &tau_plus)?
        .map_pieces(|p| p.scale(&nf))
        .with_extensions(Some(v.clone()), Some(Rational::zero()));
    Ok(VolumeCurve {
        curve,
        tau_plus,
        volume: v,
    })
}

/// Upper end of the feasible interval, required positive and finite.
pub(crate) fn threshold(fam: &ParametricPolytope) -> Result<Rational> {
    match fam.feasible_interval() {
        Some((_, Some(hi))) if hi.is_positive() => Ok(hi.clone()),
        Some((_, None)) => Err(Error::UnboundedThreshold),
        _ => Err(Error::NotBig),
    }
}

/// Pseudo-effective threshold `max{t : L - tD pseudo-effective}`.
pub fn pseudo_effective_threshold(
    fan: &Fan,
    l: &ToricDivisor,
    d: &ToricDivisor,
) -> Result<Rational> {
    let fam = divisor_family(fan, l, d)?;
    match fam.feasible_interval() {
        Some((_, Some(hi))) => Ok(hi.clone()),
        Some((_, None)) => Err(Error::UnboundedThreshold),
        None => Err(Error::NotPseudoEffective),
    }
}

/// Positive intersection `<M^{n-1}> . L'`, as `(1/n) d/ds vol(M + sL')` at
/// `s = 0+`, read off the exact volume polynomial of the first chamber.
pub fn positive_pairing(fan: &Fan, m: &ToricDivisor, l2: &ToricDivisor) -> Result<Rational> {
    if big_volume(fan, m)?.is_zero() {
        return Err(Error::NotBig);
    }
    let neg: ToricDivisor = l2.scale(&int(-1));
    let fam = divisor_family(fan, m, &neg)?;
    let zero = Rational::zero();
    let mut s1 = fam
        .chambers()
        .iter()
        .filter_map(|c| c.hi.clone())
        .filter(|h| h > &zero)
        .min();
    if s1.is_none() {
        s1 = Some(int(1));
    }
    let s1 = s1.expect("set above");
    let mid = &s1 / int(2);
    let idx = fam
        .chamber_index(&mid)
        .ok_or_else(|| Error::Inconsistent("no chamber after 0".into()))?;
    let p = fam.volume_polynomial(idx)?;
    let n = fan.dim();
    // d/ds of n! vol at 0, divided by n.
    Ok(p.derivative().eval(&zero) * factorial(n) / int(n as i64))
}

/// `vol(pi^* L - pi^* D)` on each model of the tower `X = Y_0 <- Y_1 <- ...`.
pub fn stabilized_volume(
    fan: &Fan,
    l: &ToricDivisor,
    d: &ToricDivisor,
    refinements: &[LatticeVector],
) -> Result<Vec<Rational>> {
    let diff = l.sub(d)?;
    let mut out = Vec::with_capacity(refinements.len() + 1);
    for k in 0..=refinements.len() {
        let model = Model::new(fan.clone(), &refinements[..k])?;
        out.push(big_volume(model.fan(), &model.pullback_from_base(&diff)?)?);
    }
    Ok(out)
}
