//! Test curves `tau -> P_tau`, the Zariski positive parts of `L - tau D`, and
//! their radial functionals.
//!
//! Within a chamber of `[0, tau_plus]` every positive-part coefficient is
//! affine in `tau`, so each integrand below is a polynomial of degree at
//! most `n` and is integrated exactly after interpolation.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rational::{binomial, factorial, int, serde_q, Rational};
use crate::toric::{intersection_number, Fan, Model, ToricDivisor};
use crate::volume_fn::{divisor_family, positive_pairing, require_nef_and_big, threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Extended,
    Truncated,
}

/// One chamber `[lo, hi]` of a test curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveChamber {
    pub lo: Rational,
    pub hi: Rational,
    /// `vol(L - tau D)`.
    pub mass: Polynomial,
    /// Positive-part coefficient per ray, affine in `tau`.
    pub positive: Vec<Polynomial>,
    /// `Red(tau D + N_tau)` on the chamber interior.
    pub reduced: ToricDivisor,
}

impl CurveChamber {
    pub fn positive_at(&self, tau: &Rational) -> ToricDivisor {
        ToricDivisor::new(self.positive.iter().map(|p| p.eval(tau)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCurve {
    model: Model,
    l: ToricDivisor,
    d: ToricDivisor,
    kind: CurveKind,
    tau_plus: Rational,
    volume: Rational,
    chambers: Vec<CurveChamber>,
}

/// Values of the radial functionals of one curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveSummary {
    #[serde(with = "serde_q")]
    pub tau_plus: Rational,
    #[serde(with = "serde_q")]
    pub energy: Rational,
    #[serde(with = "serde_q")]
    pub alpha_energy: Rational,
    #[serde(with = "serde_q")]
    pub ricci_energy: Rational,
    #[serde(with = "serde_q")]
    pub jtilde: Rational,
    #[serde(with = "serde_q")]
    pub entropy: Rational,
    #[serde(with = "serde_q")]
    pub twisted_mabuchi: Rational,
}

/// `(alpha . P^{n-1})`.
fn pair_with_power(fan: &Fan, alpha: &ToricDivisor, p: &ToricDivisor) -> Result<Rational> {
    let mut args = vec![p.clone(); fan.dim()];
    args[0] = alpha.clone();
    intersection_number(fan, &args)
}

/// Extended test curve of `L - tau D` on the model: `L` nef and big, `D`
/// effective and nonzero, both given on the model's rays.
pub fn extended_curve(model: &Model, l: &ToricDivisor, d: &ToricDivisor) -> Result<TestCurve> {
    let fan = model.fan();
    let volume = require_nef_and_big(fan, l)?;
    if d.len() != fan.ray_count() {
        return Err(Error::DimensionMismatch {
            expected: fan.ray_count(),
            got: d.len(),
        });
    }
    if d.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    if !d.is_effective() {
        return Err(Error::InvalidInput(
            "direction divisor must be effective".into(),
        ));
    }
    let fam = divisor_family(fan, l, d)?;
    let tau_plus = threshold(&fam)?;
    let zero = Rational::zero();
    let mut bps = vec![zero.clone()];
    bps.extend(fam.walls_between(&zero, &tau_plus));
    bps.push(tau_plus.clone());
    let nf = factorial(fan.dim());
    let chambers = bps
        .windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) / int(2);
            let idx = fam
                .chamber_index(&mid)
                .ok_or_else(|| Error::Inconsistent("no chamber at sample".into()))?;
            let mass = fam.volume_polynomial(idx)?.scale(&nf);
            let positive = fan
                .rays()
                .iter()
                .map(|u| Ok(fam.support_function(idx, u)?.scale(&int(-1))))
                .collect::<Result<Vec<_>>>()?;
            let reduced = ToricDivisor::new(
                l.coeffs
                    .iter()
                    .zip(&positive)
                    .map(|(a, p)| {
                        if (a - p.eval(&mid)).is_zero() {
                            zero.clone()
                        } else {
                            int(1)
                        }
                    })
                    .collect(),
            );
            Ok(CurveChamber {
                lo: w[0].clone(),
                hi: w[1].clone(),
                mass,
                positive,
                reduced,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TestCurve {
        model: model.clone(),
        l: l.clone(),
        d: d.clone(),
        kind: CurveKind::Extended,
        tau_plus,
        volume,
        chambers,
    })
}

/// Restriction of an extended curve to `[0, 1]`.
pub fn truncated_curve(c: &TestCurve) -> Result<TestCurve> {
    c.truncated()
}

impl TestCurve {
    /// The curve of the zero direction: mass `V` and `tau_plus = 0`.
    pub fn degenerate(model: &Model, l: &ToricDivisor) -> Result<Self> {
        let volume = require_nef_and_big(model.fan(), l)?;
        Ok(Self {
            model: model.clone(),
            l: l.clone(),
            d: ToricDivisor::zero(l.len()),
            kind: CurveKind::Extended,
            tau_plus: Rational::zero(),
            volume,
            chambers: Vec::new(),
        })
    }

    pub fn truncated(&self) -> Result<TestCurve> {
        if self.kind == CurveKind::Truncated {
            return Ok(self.clone());
        }
        let one = int(1);
        if self.tau_plus < one {
            return Err(Error::RangeTooShort);
        }
        let chambers = self
            .chambers
            .iter()
            .filter(|c| c.lo < one)
            .map(|c| {
                let mut c = c.clone();
                if c.hi > one {
                    c.hi = one.clone();
                }
                c
            })
            .collect();
        Ok(TestCurve {
            kind: CurveKind::Truncated,
            tau_plus: one,
            chambers,
            ..self.clone()
        })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn polarization(&self) -> &ToricDivisor {
        &self.l
    }

    pub fn direction(&self) -> &ToricDivisor {
        &self.d
    }

    pub fn tau_plus(&self) -> &Rational {
        &self.tau_plus
    }

    /// Lower end of the domain; `None` means the curve extends to `-inf`.
    pub fn tau_minus(&self) -> Option<Rational> {
        match self.kind {
            CurveKind::Extended => None,
            CurveKind::Truncated => Some(Rational::zero()),
        }
    }

    pub fn volume(&self) -> &Rational {
        &self.volume
    }

    pub fn chambers(&self) -> &[CurveChamber] {
        &self.chambers
    }

    fn dim(&self) -> usize {
        self.model.fan().dim()
    }

    fn check_tau(&self, tau: &Rational) -> Result<()> {
        let below = match self.tau_minus() {
            Some(lo) => tau < &lo,
            None => false,
        };
        if below || tau > &self.tau_plus {
            return Err(Error::OutOfRange(format!("tau = {tau}")));
        }
        Ok(())
    }

    /// Chamber containing `tau`, preferring the one on the right at walls.
    fn chamber_at(&self, tau: &Rational) -> Option<&CurveChamber> {
        self.chambers
            .iter()
            .find(|c| &c.lo <= tau && tau < &c.hi)
            .or_else(|| self.chambers.last().filter(|c| &c.hi == tau))
    }

    /// `vol(L - tau D)`, equal to `V` for `tau <= 0`.
    pub fn mass(&self, tau: &Rational) -> Result<Rational> {
        self.check_tau(tau)?;
        if !tau.is_positive() {
            return Ok(self.volume.clone());
        }
        let c = self
            .chamber_at(tau)
            .ok_or_else(|| Error::OutOfRange(format!("tau = {tau}")))?;
        Ok(c.mass.eval(tau))
    }

    /// Zariski positive part `P_tau`.
    pub fn positive_part(&self, tau: &Rational) -> Result<ToricDivisor> {
        self.check_tau(tau)?;
        if !tau.is_positive() {
            return Ok(self.l.clone());
        }
        let c = self
            .chamber_at(tau)
            .ok_or_else(|| Error::OutOfRange(format!("tau = {tau}")))?;
        Ok(c.positive_at(tau))
    }

    /// `sum_chambers int_lo^hi f(chamber, tau) dtau` where `f` is polynomial
    /// of degree at most `degree` on each chamber.
    fn integrate<F>(&self, degree: usize, f: F) -> Result<Rational>
    where
        F: Fn(&CurveChamber, &Rational) -> Result<Rational> + Sync,
    {
        let parts = self
            .chambers
            .par_iter()
            .map(
                |c| Ok(Polynomial::fit(&c.lo, &c.hi, degree, |t| f(c, t))?.integrate(&c.lo, &c.hi)),
            )
            .collect::<Result<Vec<Rational>>>()?;
        Ok(parts.into_iter().sum())
    }

    /// `E = tau_plus + (1/V) int (mass - V) = (1/V) int_0^tau_plus mass`.
    pub fn energy(&self) -> Rational {
        let total: Rational = self
            .chambers
            .iter()
            .map(|c| c.mass.integrate(&c.lo, &c.hi))
            .sum();
        total / &self.volume
    }

    /// `E^alpha = (1/V) int_0^tau_plus (alpha . P_tau^{n-1}) dtau`.
    pub fn alpha_energy(&self, alpha: &ToricDivisor) -> Result<Rational> {
        let fan = self.model.fan();
        if alpha.len() != fan.ray_count() {
            return Err(Error::DimensionMismatch {
                expected: fan.ray_count(),
                got: alpha.len(),
            });
        }
        if alpha.is_zero() {
            return Ok(Rational::zero());
        }
        let n = self.dim();
        Ok(
            self.integrate(n - 1, |c, t| pair_with_power(fan, alpha, &c.positive_at(t)))?
                / &self.volume,
        )
    }

    /// `E_R = -n E^alpha` with `alpha = pi^*(-K_X) = -K_Y + K_{Y/X}`.
    pub fn ricci_energy(&self) -> Result<Rational> {
        let fan = self.model.fan();
        let alpha = ToricDivisor::anticanonical(fan.ray_count()).add(&self.model.k_rel()?)?;
        Ok(-self.alpha_energy(&alpha)? * int(self.dim() as i64))
    }

    /// `(n/V) int ((L . P^{n-1}) - P^n) dtau`.
    pub fn jtilde(&self) -> Result<Rational> {
        Ok(self.jtilde_integral()? * int(self.dim() as i64) / &self.volume)
    }

    /// `int ((L . P^{n-1}) - P^n) dtau` without normalization.
    pub(crate) fn jtilde_integral(&self) -> Result<Rational> {
        let fan = self.model.fan();
        let n = self.dim();
        self.integrate(n, |c, t| {
            Ok(pair_with_power(fan, &self.l, &c.positive_at(t))? - c.mass.eval(t))
        })
    }

    /// Entropy density `(n/V) <(L - tau D)^{n-1}> . (K_{Y/X} + Red(tau D + N_tau))`
    /// through the positive intersection pairing.
    pub fn entropy_at(&self, tau: &Rational) -> Result<Rational> {
        if !tau.is_positive() || tau >= &self.tau_plus {
            return Err(Error::OutOfRange(format!("tau = {tau}")));
        }
        let fan = self.model.fan();
        let c = self
            .chamber_at(tau)
            .ok_or_else(|| Error::OutOfRange(format!("tau = {tau}")))?;
        let m = self.l.add_scaled(&-tau, &self.d)?;
        let r = self.model.k_rel()?.add(&c.reduced)?;
        let n = self.dim();
        Ok(positive_pairing(fan, &m, &r)? * int(n as i64) / &self.volume)
    }

    /// `int Ent([psi_tau]) dtau`, with the pairing evaluated on the nef
    /// positive parts.
    pub fn entropy(&self) -> Result<Rational> {
        let fan = self.model.fan();
        let n = self.dim();
        let k_rel = self.model.k_rel()?;
        let total = self.integrate(n - 1, |c, t| {
            let r = k_rel.add(&c.reduced)?;
            pair_with_power(fan, &r, &c.positive_at(t))
        })?;
        Ok(total * int(n as i64) / &self.volume)
    }

    pub fn twisted_mabuchi(&self) -> Result<Rational> {
        Ok(self.ricci_energy()? + self.entropy()?)
    }

    /// All functionals, with `E^alpha` taken at `alpha = L`.
    pub fn summary(&self) -> Result<CurveSummary> {
        let ricci = self.ricci_energy()?;
        let entropy = self.entropy()?;
        Ok(CurveSummary {
            tau_plus: self.tau_plus.clone(),
            energy: self.energy(),
            alpha_energy: self.alpha_energy(&self.l)?,
            ricci_energy: ricci.clone(),
            jtilde: self.jtilde()?,
            entropy: entropy.clone(),
            twisted_mabuchi: ricci + entropy,
        })
    }
}

/// `G_{n-1}(A, B) = sum_j C(n-1, j) (-1)^j A^{n-1-j} B^j / (j + 1)`.
pub fn g_polynomial(a: &Rational, b: &Rational, n: usize) -> Rational {
    assert!(n >= 1, "G needs n >= 1");
    (0..n)
        .map(|j| {
            let term = binomial(n - 1, j) * pow(a, n - 1 - j) * pow(b, j) / int(j as i64 + 1);
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// Closed form `(A^n - (A - B)^n) / (n B)`; `None` when `B = 0`.
pub fn g_polynomial_closed(a: &Rational, b: &Rational, n: usize) -> Option<Rational> {
    if b.is_zero() {
        return None;
    }
    Some((pow(a, n) - pow(&(a - b), n)) / (b * int(n as i64)))
}

fn pow(x: &Rational, k: usize) -> Rational {
    (0..k).fold(int(1), |acc, _| acc * x)
}

/// `(G_{n-1}(L, D) . R)`, expanded multilinearly into intersection numbers.
pub fn g_divisor(
    fan: &Fan,
    l: &ToricDivisor,
    d: &ToricDivisor,
    r: &ToricDivisor,
) -> Result<Rational> {
    let n = fan.dim();
    let mut total = Rational::zero();
    for j in 0..n {
        let mut args = Vec::with_capacity(n);
        args.extend(std::iter::repeat_n(l.clone(), n - 1 - j));
        args.extend(std::iter::repeat_n(d.clone(), j));
        args.push(r.clone());
        let term = binomial(n - 1, j) * intersection_number(fan, &args)? / int(j as i64 + 1);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}
