//! Filtration volumes of toric valuations, Duistermaat-Heckman measures,
//! the non-Archimedean Monge-Ampere energy and flag-ideal test curves.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{linear_stats, parametric_family, LatticeVector, MAX_COORD};
use crate::poly::{PiecewisePolynomial, Polynomial};
use crate::rational::{factorial, int, serde_q, Rational};
use crate::toric::{polytope_of, Fan, ToricDivisor};
use crate::volume_fn::require_nef_and_big;

/// `tau -> vol R^(tau) = n! vol{x in P_L : <x,u> - min_{P_L} <.,u> >= tau}`
/// on `[0, max - min]`, with value `V` below and 0 above.
pub fn filtration_curve(
    fan: &Fan,
    l: &ToricDivisor,
    u: &LatticeVector,
) -> Result<PiecewisePolynomial> {
    if u.dim() != fan.dim() {
        return Err(Error::DimensionMismatch {
            expected: fan.dim(),
            got: u.dim(),
        });
    }
    if u.is_zero() {
        return Err(Error::ZeroVector);
    }
    let v = require_nef_and_big(fan, l)?;
    let p = polytope_of(fan, l)?;
    let stats = linear_stats(&p, u)?;
    let mut normals = fan.rays().to_vec();
    let mut offsets = l.coeffs.clone();
    let mut dirs = vec![Rational::zero(); normals.len()];
    normals.push(u.clone());
    offsets.push(-stats.min.clone());
    dirs.push(int(1));
    let fam = parametric_family(fan.dim(), &normals, &offsets, &dirs)?;
    let width = &stats.max - &stats.min;
    let nf = factorial(fan.dim());
    Ok(fam
        .volume_curve(&Rational::zero(), &width)?
        .map_pieces(|q| q.scale(&nf))
        .with_extensions(Some(v), Some(Rational::zero())))
}

/// Probability measure `-(1/V) d vol` split into an absolutely continuous
/// part and atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DHMeasure {
    pub density: PiecewisePolynomial,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "serde_q")]
    pub location: Rational,
    #[serde(with = "serde_q")]
    pub mass: Rational,
}

impl DHMeasure {
    pub fn total_mass(&self) -> Rational {
        self.density.integral() + self.atoms.iter().map(|a| &a.mass).sum::<Rational>()
    }

    /// `int tau dnu`.
    pub fn first_moment(&self) -> Rational {
        let cont: Rational = self
            .density
            .intervals()
            .map(|(a, b, p)| {
                p.mul(&Polynomial::affine(Rational::zero(), int(1)))
                    .integrate(a, b)
            })
            .sum();
        cont + self
            .atoms
            .iter()
            .map(|a| &a.location * &a.mass)
            .sum::<Rational>()
    }

    /// Support `[lo, hi]` of the measure.
    pub fn support(&self) -> (Rational, Rational) {
        let (a, b) = self.density.domain();
        let mut lo = a.clone();
        let mut hi = b.clone();
        for at in &self.atoms {
            if at.location < lo {
                lo = at.location.clone();
            }
            if at.location > hi {
                hi = at.location.clone();
            }
        }
        (lo, hi)
    }
}

/// Differentiates a non-increasing volume curve. Jumps become atoms,
/// including the drop from `V` at the left end and to 0 at the right end.
pub fn dh_measure(curve: &PiecewisePolynomial, v: &Rational) -> Result<DHMeasure> {
    if !v.is_positive() {
        return Err(Error::NotBig);
    }
    if !curve.is_non_increasing() {
        return Err(Error::NotMonotone);
    }
    let bps = curve.breakpoints();
    let pieces = curve.pieces();
    let mut atoms = Vec::new();
    let mut push = |loc: &Rational, drop: Rational| -> Result<()> {
        if drop.is_negative() {
            return Err(Error::NotMonotone);
        }
        if !drop.is_zero() {
            atoms.push(Atom {
                location: loc.clone(),
                mass: drop / v,
            });
        }
        Ok(())
    };
    push(&bps[0], v - pieces[0].eval(&bps[0]))?;
    for (i, t) in bps[1..bps.len() - 1].iter().enumerate() {
        push(t, pieces[i].eval(t) - pieces[i + 1].eval(t))?;
    }
    let last = bps.last().expect("nonempty");
    push(last, pieces.last().expect("nonempty").eval(last))?;
    let scale = -v.recip();
    let density = PiecewisePolynomial::new(
        bps.to_vec(),
        pieces
            .iter()
            .map(|p| p.derivative().scale(&scale))
            .collect(),
    )?;
    Ok(DHMeasure { density, atoms })
}

/// `E^NA = int tau dnu`.
pub fn energy_from_dh(nu: &DHMeasure) -> Rational {
    nu.first_moment()
}

/// Flag ideal `I_0 + I_1 t + ... + I_{M-1} t^{M-1} + (t^M)`: the stored
/// ideals are monomial, given by exponent vectors, and the ideal at index
/// `M` is the full ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Vec<i64>>>", into = "Vec<Vec<Vec<i64>>>")]
pub struct MonomialIdealData {
    ideals: Vec<Vec<Vec<i64>>>,
}

impl TryFrom<Vec<Vec<Vec<i64>>>> for MonomialIdealData {
    type Error = Error;

    fn try_from(v: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MonomialIdealData> for Vec<Vec<Vec<i64>>> {
    fn from(m: MonomialIdealData) -> Self {
        m.ideals
    }
}

fn divides(h: &[i64], g: &[i64]) -> bool {
    h.iter().zip(g).all(|(a, b)| a <= b)
}

impl MonomialIdealData {
    /// Checks generators are nonnegative of equal length and that the chain
    /// is increasing.
    pub fn new(ideals: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if ideals.is_empty() {
            return Err(Error::InvalidInput(
                "flag ideal needs at least one stored ideal".into(),
            ));
        }
        let dim = ideals
            .iter()
            .flatten()
            .map(Vec::len)
            .next()
            .ok_or_else(|| Error::InvalidInput("ideal without generators".into()))?;
        for (i, gens) in ideals.iter().enumerate() {
            if gens.is_empty() {
                return Err(Error::InvalidInput(format!("ideal {i} has no generators")));
            }
            for g in gens {
                if g.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: g.len(),
                    });
                }
                if g.iter().any(|&x| x < 0) {
                    return Err(Error::InvalidInput(format!(
                        "ideal {i} has a negative exponent"
                    )));
                }
                if g.iter().any(|&x| x.unsigned_abs() > MAX_COORD) {
                    return Err(Error::InvalidInput(format!(
                        "ideal {i} has an exponent above {MAX_COORD}"
                    )));
                }
            }
        }
        for i in 0..ideals.len() - 1 {
            for g in &ideals[i] {
                if !ideals[i + 1].iter().any(|h| divides(h, g)) {
                    return Err(Error::InvalidInput(format!(
                        "ideal {i} is not contained in ideal {}",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { ideals })
    }

    /// Number `M` of stored ideals.
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ideals[0][0].len()
    }

    /// `v_u(I_i) = min <m, u>` over generators; 0 for the full ring at `i = M`.
    pub fn valuation(&self, i: usize, u: &LatticeVector) -> Rational {
        match self.ideals.get(i) {
            None => Rational::zero(),
            Some(gens) => gens
                .iter()
                .map(|g| {
                    g.iter()
                        .zip(u.coords())
                        .map(|(&a, &b)| int(a) * int(b))
                        .sum::<Rational>()
                })
                .min()
                .expect("nonempty"),
        }
    }
}

/// `psi_tau(v_u) = -min{ sum_i alpha_i v_u(I_i) : alpha >= 0, |alpha| = 1,
/// sum_i i alpha_i = -tau }`, solved over the vertices of the slice, which
/// have at most two nonzero entries.
pub fn flag_curve_value(
    ideals: &MonomialIdealData,
    tau: &Rational,
    u: &LatticeVector,
) -> Result<Rational> {
    if u.dim() != ideals.dim() {
        return Err(Error::DimensionMismatch {
            expected: ideals.dim(),
            got: u.dim(),
        });
    }
    if u.is_zero() {
        return Err(Error::ZeroVector);
    }
    let s = -tau;
    let m = ideals.len();
    if s.is_negative() || s > int(m as i64) {
        return Err(Error::InfeasibleTau(tau.to_string()));
    }
    let vals: Vec<Rational> = (0..=m).map(|i| ideals.valuation(i, u)).collect();
    let mut best: Option<Rational> = None;
    let mut consider = |x: Rational| {
        if best.as_ref().is_none_or(|b| &x < b) {
            best = Some(x);
        }
    };
    for i in 0..=m {
        let fi = int(i as i64);
        if fi == s {
            consider(vals[i].clone());
        }
        for j in i + 1..=m {
            let fj = int(j as i64);
            if fi < s && s < fj {
                let w = &fj - &fi;
                let ai = (&fj - &s) / &w;
                let aj = (&s - &fi) / &w;
                consider(ai * &vals[i] + aj * &vals[j]);
            }
        }
    }
    Ok(-best.expect("feasible slice has a vertex"))
}
