//! Smooth complete fans, torus-invariant divisors, star subdivisions,
//! intersection numbers and the toric Zariski decomposition.
//!
//! Divisor `D = sum a_rho D_rho` has section polytope
//! `P_D = {m : <m, u_rho> >= -a_rho}`.

mod divisor;
mod fan;
mod model;

use num_traits::{Signed, Zero};
use serde::Serialize;

pub use divisor::ToricDivisor;
pub use fan::{validate_fan, Fan, FanData, FanDiagnostics};
pub use model::{log_discrepancy, star_subdivision, Model, StarSubdivision};

use crate::error::{Error, Result};
use crate::geometry::{polarize, Halfspace, Polytope};
use crate::linalg::dot;
use crate::lp::{self, Constraint};
use crate::rational::{int, Rational};

fn check_len(fan: &Fan, d: &ToricDivisor) -> Result<()> {
    if d.len() != fan.ray_count() {
        return Err(Error::DimensionMismatch {
            expected: fan.ray_count(),
            got: d.len(),
        });
    }
    Ok(())
}

/// Section polytope of `d`; may be empty.
pub fn polytope_of(fan: &Fan, d: &ToricDivisor) -> Result<Polytope> {
    check_len(fan, d)?;
    let hs = fan
        .rays()
        .iter()
        .cloned()
        .zip(d.coeffs.iter().cloned())
        .map(|(u, a)| Halfspace::new(u, a))
        .collect();
    Polytope::from_halfspaces(fan.dim(), hs)
}

/// `rho -> -min_{P_D} <., u_rho>`, the divisor of the support function of
/// `P_D`. Fails if `P_D` is empty.
pub fn saturation(fan: &Fan, d: &ToricDivisor) -> Result<ToricDivisor> {
    let p = polytope_of(fan, d)?;
    if p.is_empty() {
        return Err(Error::NotPseudoEffective);
    }
    let coeffs = fan
        .rays()
        .iter()
        .map(|u| {
            -p.vertices()
                .iter()
                .map(|v| u.pair(v))
                .min()
                .expect("nonempty")
        })
        .collect();
    Ok(ToricDivisor::new(coeffs))
}

/// `d` is nef iff its section polytope is nonempty and every coefficient is
/// attained as a polytope minimum.
pub fn is_nef(fan: &Fan, d: &ToricDivisor) -> Result<bool> {
    match saturation(fan, d) {
        Ok(s) => Ok(&s == d),
        Err(Error::NotPseudoEffective) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Linear forms `r` with `r . a = a_rho' - sum_{i in sigma} lambda_i a_i`
/// for every maximal cone `sigma` and ray `rho'` outside it, where
/// `u_rho' = sum lambda_i u_i`. Nef means all `>= 0`, ample all `> 0`.
pub fn convexity_rows(fan: &Fan) -> Vec<Vec<Rational>> {
    let mut rows = Vec::new();
    for (k, cone) in fan.cones().iter().enumerate() {
        for (j, u) in fan.rays().iter().enumerate() {
            if cone.contains(&j) {
                continue;
            }
            let lam = fan.cone_coordinates(k, &u.to_rational());
            let mut r = vec![Rational::zero(); fan.ray_count()];
            r[j] = int(1);
            for (&i, l) in cone.iter().zip(&lam) {
                r[i] -= l;
            }
            rows.push(r);
        }
    }
    rows
}

pub fn is_ample(fan: &Fan, d: &ToricDivisor) -> Result<bool> {
    check_len(fan, d)?;
    Ok(convexity_rows(fan)
        .iter()
        .all(|r| dot(r, &d.coeffs).is_positive()))
}

/// An ample class: `-K` when ample, otherwise a feasible point of the
/// strict convexity inequalities. Fails for non-projective fans.
pub fn ample_reference(fan: &Fan) -> Result<ToricDivisor> {
    let k = ToricDivisor::anticanonical(fan.ray_count());
    if is_ample(fan, &k)? {
        return Ok(k);
    }
    let cons: Vec<Constraint> = convexity_rows(fan)
        .into_iter()
        .map(|r| Constraint::new(r, int(1)))
        .collect();
    lp::feasible_point(fan.ray_count(), &cons)
        .map(ToricDivisor::new)
        .ok_or(Error::NotNefAndNotDecomposable)
}

/// Smallest `c >= 0` with `d + c h` nef, for ample `h`.
pub fn nef_shift(fan: &Fan, d: &ToricDivisor, h: &ToricDivisor) -> Result<Rational> {
    check_len(fan, d)?;
    check_len(fan, h)?;
    let mut c = Rational::zero();
    for r in convexity_rows(fan) {
        let rh = dot(&r, &h.coeffs);
        if !rh.is_positive() {
            return Err(Error::NotAmple);
        }
        let need = -dot(&r, &d.coeffs) / rh;
        if need > c {
            c = need;
        }
    }
    Ok(c)
}

fn nef_intersection(fan: &Fan, divisors: &[&ToricDivisor]) -> Result<Rational> {
    let n = fan.dim();
    if divisors.windows(2).all(|w| w[0] == w[1]) {
        return Ok(polytope_of(fan, divisors[0])?.volume() * crate::rational::factorial(n));
    }
    polarize(n, |subset| {
        let mut sum = ToricDivisor::zero(fan.ray_count());
        for &i in subset {
            sum = sum.add(divisors[i])?;
        }
        Ok(polytope_of(fan, &sum)?.volume())
    })
}

/// Intersection number `(D_1 ... D_n)`. Nef arguments give the normalized
/// mixed volume of the section polytopes; other arguments are written as
/// `A - cH` with `A` nef and `H` ample and expanded multilinearly.
pub fn intersection_number(fan: &Fan, divisors: &[ToricDivisor]) -> Result<Rational> {
    let n = fan.dim();
    if divisors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: divisors.len(),
        });
    }
    for d in divisors {
        check_len(fan, d)?;
    }
    let nef: Vec<bool> = divisors
        .iter()
        .map(|d| is_nef(fan, d))
        .collect::<Result<_>>()?;
    if nef.iter().all(|&b| b) {
        let refs: Vec<&ToricDivisor> = divisors.iter().collect();
        return nef_intersection(fan, &refs);
    }
    let h = ample_reference(fan)?;
    let mut parts = Vec::with_capacity(n);
    for (d, &is) in divisors.iter().zip(&nef) {
        if is {
            parts.push((d.clone(), Rational::zero()));
        } else {
            let c = nef_shift(fan, d, &h)?;
            parts.push((d.add_scaled(&c, &h)?, c));
        }
    }
    let split: Vec<usize> = (0..n).filter(|&i| !parts[i].1.is_zero()).collect();
    let mut total = Rational::zero();
    for mask in 0u32..(1 << split.len()) {
        let mut coeff = int(1);
        let mut args: Vec<&ToricDivisor> = parts.iter().map(|(a, _)| a).collect();
        for (b, &i) in split.iter().enumerate() {
            if mask & (1 << b) != 0 {
                coeff = -coeff * &parts[i].1;
                args[i] = &h;
            }
        }
        total += coeff * nef_intersection(fan, &args)?;
    }
    Ok(total)
}

/// `M = P + N` with `P` nef and `N` effective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZariskiPair {
    pub positive: ToricDivisor,
    pub negative: ToricDivisor,
}

pub fn zariski_decompose(fan: &Fan, m: &ToricDivisor) -> Result<ZariskiPair> {
    let positive = saturation(fan, m)?;
    let negative = m.sub(&positive)?;
    debug_assert!(negative.is_effective());
    Ok(ZariskiPair { positive, negative })
}
