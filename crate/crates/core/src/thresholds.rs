//! S-invariants, the delta search over toric valuations, the `delta_pp` and
//! `delta'` quotients of test curves, and the inequality report.

use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtrations::filtration_curve;
use crate::geometry::{linear_stats, LatticeVector};
use crate::rational::{format_rational, int, serde_q, to_decimal, Rational};
use crate::test_curves::{extended_curve, g_divisor};
use crate::toric::{
    intersection_number, is_ample, log_discrepancy, polytope_of, Fan, Model, ToricDivisor,
};
use crate::volume_fn::require_nef_and_big;

/// `S_L(v_u) = (1/V) int_0^inf vol(L - t v_u) dt`, computed both from the
/// slice volume curve and as `mean - min` of `<., u>` over `P_L`.
pub fn s_invariant(fan: &Fan, l: &ToricDivisor, u: &LatticeVector) -> Result<Rational> {
    if u.is_zero() {
        return Err(Error::ZeroVector);
    }
    let v = require_nef_and_big(fan, l)?;
    let stats = linear_stats(&polytope_of(fan, l)?, u)?;
    let by_stats = &stats.mean - &stats.min;
    let by_slices = filtration_curve(fan, l, u)?.integral() / v;
    if by_stats != by_slices {
        return Err(Error::Inconsistent(format!(
            "S via barycenter {by_stats} != S via slices {by_slices}"
        )));
    }
    Ok(by_stats)
}

/// `A_X(v_u) / S_L(v_u)`.
pub fn delta_quotient(fan: &Fan, l: &ToricDivisor, u: &LatticeVector) -> Result<Rational> {
    let s = s_invariant(fan, l, u)?;
    Ok(log_discrepancy(fan, u)? / s)
}

/// One toric valuation in the delta search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub u: LatticeVector,
    #[serde(with = "serde_q")]
    pub a: Rational,
    #[serde(with = "serde_q")]
    pub s: Rational,
    #[serde(with = "serde_q")]
    pub quotient: Rational,
}

/// A quotient for one named direction, or the reason it is undefined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientRow {
    pub name: String,
    pub direction: ToricDivisor,
    #[serde(
        with = "serde_q::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub value: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// `lhs relation rhs`, decided exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    #[serde(with = "serde_q")]
    pub lhs: Rational,
    pub relation: String,
    #[serde(with = "serde_q")]
    pub rhs: Rational,
    pub holds: bool,
}

impl Verdict {
    fn at_least(claim: String, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs >= rhs;
        Self {
            claim,
            lhs,
            relation: ">=".into(),
            rhs,
            holds,
        }
    }

    fn equal(claim: String, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs == rhs;
        Self {
            claim,
            lhs,
            relation: "=".into(),
            rhs,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    #[serde(with = "serde_q")]
    pub delta: Rational,
    pub minimizer: LatticeVector,
    pub radius: u32,
    pub candidates: Vec<CandidateRow>,
    pub delta_pp: Vec<QuotientRow>,
    pub delta_prime: Vec<QuotientRow>,
    pub verdicts: Vec<Verdict>,
    pub assumptions: Vec<String>,
}

impl ThresholdReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    /// `delta = p/q (exact) at u=(..)`.
    pub fn headline(&self) -> String {
        format!(
            "delta = {} (exact) at u={}",
            format_rational(&self.delta),
            self.minimizer
        )
    }

    /// Human-readable table; `decimals` adds a 12-digit approximation column.
    pub fn to_table(&self, decimals: bool) -> String {
        let q = |x: &Rational| {
            if decimals {
                format!("{} ({})", format_rational(x), to_decimal(x, 12))
            } else {
                format_rational(x)
            }
        };
        let mut out = String::new();
        writeln!(out, "{}", self.headline()).unwrap();
        writeln!(
            out,
            "candidates (|u|_inf <= {}): {}",
            self.radius,
            self.candidates.len()
        )
        .unwrap();
        writeln!(out, "{:<16} {:>10} {:>10} {:>10}", "u", "A", "S", "A/S").unwrap();
        for c in &self.candidates {
            writeln!(
                out,
                "{:<16} {:>10} {:>10} {:>10}",
                c.u.to_string(),
                q(&c.a),
                q(&c.s),
                q(&c.quotient)
            )
            .unwrap();
        }
        for (title, rows) in [("delta_pp", &self.delta_pp), ("delta'", &self.delta_prime)] {
            if rows.is_empty() {
                continue;
            }
            writeln!(out, "{title} quotients:").unwrap();
            for r in rows {
                match (&r.value, &r.error) {
                    (Some(v), _) => writeln!(out, "  {:<12} {}", r.name, q(v)).unwrap(),
                    (None, Some(e)) => writeln!(out, "  {:<12} undefined: {e}", r.name).unwrap(),
                    _ => {}
                }
            }
        }
        if !self.verdicts.is_empty() {
            writeln!(out, "verdicts:").unwrap();
            for v in &self.verdicts {
                let mark = if v.holds { "ok" } else { "FAILED" };
                writeln!(
                    out,
                    "  [{mark}] {}: {} {} {}",
                    v.claim,
                    q(&v.lhs),
                    v.relation,
                    q(&v.rhs)
                )
                .unwrap();
            }
        }
        writeln!(out, "assumptions:").unwrap();
        for a in &self.assumptions {
            writeln!(out, "  - {a}").unwrap();
        }
        out
    }
}

/// Primitive vectors with `|u|_inf <= radius`: rays of the fan first in ray
/// order, then by L1 norm and lexicographically.
pub fn candidate_vectors(fan: &Fan, radius: u32) -> Vec<LatticeVector> {
    let n = fan.dim();
    let r = radius as i64;
    let mut all = Vec::new();
    let mut cur = vec![-r; n];
    loop {
        let v = LatticeVector(cur.clone());
        if !v.is_zero() && v.is_primitive() && fan.ray_index(&v).is_none() {
            all.push(v);
        }
        let mut j = 0;
        loop {
            if j == n {
                all.sort_by(|a, b| a.l1_norm().cmp(&b.l1_norm()).then_with(|| a.cmp(b)));
                let mut out: Vec<LatticeVector> = fan
                    .rays()
                    .iter()
                    .filter(|u| u.linf_norm() <= r)
                    .cloned()
                    .collect();
                out.extend(all);
                return out;
            }
            if cur[j] < r {
                cur[j] += 1;
                break;
            }
            cur[j] = -r;
            j += 1;
        }
    }
}

fn base_assumptions() -> Vec<String> {
    vec![
        "delta is the exact minimum of A/S over the listed toric valuations; it bounds the infimum over all valuations from above and equals it when toric valuations in this radius compute delta".into(),
        "S is normalized by the volume: S = (1/V) int_0^inf vol(L - t v) dt".into(),
    ]
}

/// Exact minimum of `A/S` over primitive `u` with `|u|_inf <= radius`.
pub fn delta_search(fan: &Fan, l: &ToricDivisor, radius: u32) -> Result<ThresholdReport> {
    if radius == 0 {
        return Err(Error::OutOfRange("radius must be at least 1".into()));
    }
    require_nef_and_big(fan, l)?;
    let cands = candidate_vectors(fan, radius);
    let rows = cands
        .par_iter()
        .map(|u| {
            let a = log_discrepancy(fan, u)?;
            let s = s_invariant(fan, l, u)?;
            let quotient = &a / &s;
            Ok(CandidateRow {
                u: u.clone(),
                a,
                s,
                quotient,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = rows
        .iter()
        .reduce(|a, b| if b.quotient < a.quotient { b } else { a })
        .expect("radius >= 1 gives candidates");
    log::debug!(
        "delta search: {} candidates, minimum {} at {}",
        rows.len(),
        best.quotient,
        best.u
    );
    Ok(ThresholdReport {
        delta: best.quotient.clone(),
        minimizer: best.u.clone(),
        radius,
        candidates: rows.clone(),
        delta_pp: Vec::new(),
        delta_prime: Vec::new(),
        verdicts: Vec::new(),
        assumptions: base_assumptions(),
    })
}

/// `Ent / Jtilde` of the extended test curve of `L - tau D`.
pub fn delta_pp_quotient(model: &Model, l: &ToricDivisor, d: &ToricDivisor) -> Result<Rational> {
    let c = extended_curve(model, l, d)?;
    let j = c.jtilde()?;
    if j.is_zero() {
        return Err(Error::Inconsistent(
            "J-tilde vanishes for a nonzero direction".into(),
        ));
    }
    Ok(c.entropy()? / j)
}

/// `[(K_rel . (-D)^{n-1}) + n (G_{n-1}(L, D) . Red D)] /
///  [n int_0^1 ((L . P_tau^{n-1}) - P_tau^n) dtau]`.
pub fn delta_prime_quotient(
    model: &Model,
    l: &ToricDivisor,
    d: &ToricDivisor,
    k_rel: &ToricDivisor,
) -> Result<Rational> {
    let fan = model.fan();
    if d.len() != fan.ray_count() || k_rel.len() != fan.ray_count() {
        return Err(Error::DimensionMismatch {
            expected: fan.ray_count(),
            got: d.len().min(k_rel.len()),
        });
    }
    if d.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let c = extended_curve(model, l, d)?;
    let trunc = c.truncated().map_err(|e| match e {
        Error::RangeTooShort => Error::NotBigOnUnitInterval,
        e => e,
    })?;
    let n = fan.dim();
    let nq = int(n as i64);
    let mut args = vec![d.scale(&int(-1)); n];
    args[0] = k_rel.clone();
    let numerator = intersection_number(fan, &args)? + &nq * g_divisor(fan, l, d, &d.reduced())?;
    let denominator = nq * trunc.jtilde_integral()?;
    if denominator.is_zero() {
        return Err(Error::Inconsistent("delta' denominator vanishes".into()));
    }
    Ok(numerator / denominator)
}

/// Delta search on the base together with both quotients for every named
/// direction on the model, and the exact comparisons between them.
pub fn inequality_report(
    model: &Model,
    l_base: &ToricDivisor,
    directions: &[(String, ToricDivisor)],
    radius: u32,
) -> Result<ThresholdReport> {
    let mut report = delta_search(model.base(), l_base, radius)?;
    let l = model.pullback_from_base(l_base)?;
    let k_rel = model.k_rel()?;
    let quotient_row = |name: &str, d: &ToricDivisor, r: Result<Rational>| match r {
        Ok(v) => QuotientRow {
            name: name.to_string(),
            direction: d.clone(),
            value: Some(v),
            error: None,
        },
        Err(e) => QuotientRow {
            name: name.to_string(),
            direction: d.clone(),
            value: None,
            error: Some(e.to_string()),
        },
    };
    let rows: Vec<(QuotientRow, QuotientRow)> = directions
        .par_iter()
        .map(|(name, d)| {
            (
                quotient_row(name, d, delta_pp_quotient(model, &l, d)),
                quotient_row(name, d, delta_prime_quotient(model, &l, d, &k_rel)),
            )
        })
        .collect();
    for (pp, pr) in rows {
        if let Some(v) = &pp.value {
            report.verdicts.push(Verdict::at_least(
                format!("delta_pp({}) >= delta", pp.name),
                v.clone(),
                report.delta.clone(),
            ));
        }
        if let Some(v) = &pr.value {
            report.verdicts.push(Verdict::at_least(
                format!("delta'({}) >= delta", pr.name),
                v.clone(),
                report.delta.clone(),
            ));
        }
        report.delta_pp.push(pp);
        report.delta_prime.push(pr);
    }
    let base = model.base();
    let fano = *l_base == ToricDivisor::anticanonical(base.ray_count()) && is_ample(base, l_base)?;
    if fano {
        if let Some(idx) = model.fan().ray_index(&report.minimizer) {
            let prime = ToricDivisor::prime(model.fan().ray_count(), idx);
            if let Some(row) = report
                .delta_pp
                .iter()
                .find(|r| r.direction == prime && r.value.is_some())
            {
                report.verdicts.push(Verdict::equal(
                    format!(
                        "delta_pp({}) = delta at the minimizing ray divisor",
                        row.name
                    ),
                    row.value.clone().expect("checked"),
                    report.delta.clone(),
                ));
            }
        }
    }
    if !directions.is_empty() {
        report.assumptions.push(
            "entropy is evaluated on the given model (model-relative); finer models may lower it"
                .into(),
        );
    }
    if !report.delta_prime.iter().all(|r| r.value.is_some()) {
        report
            .assumptions
            .push("delta' is undefined for directions whose family L - tau D stops being big before tau = 1".into());
    }
    Ok(report)
}
