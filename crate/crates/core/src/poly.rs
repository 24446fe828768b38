//! Univariate rational polynomials and exact piecewise-polynomial functions.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, serde_q, Rational};

/// Dense polynomial, `coeffs[k]` multiplies `t^k`. Trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    #[serde(
        serialize_with = "serde_q::vec::serialize",
        deserialize_with = "trimmed"
    )]
    coeffs: Vec<Rational>,
}

fn trimmed<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
    Ok(Polynomial::new(serde_q::vec::deserialize(d)?).coeffs)
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `a + b t`
    pub fn affine(a: Rational, b: Rational) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![Rational::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / int(k as i64 + 1)),
        );
        Self::new(out)
    }

    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        let f = self.antiderivative();
        f.eval(b) - f.eval(a)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::constant(Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Lagrange interpolation through `(x_i, y_i)` with distinct `x_i`.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Self {
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = Self::constant(Rational::one());
            let mut denom = Rational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = basis.mul(&Self::affine(-xj.clone(), Rational::one()));
                    denom *= xi - xj;
                }
            }
            acc = acc.add(&basis.scale(&(yi / denom)));
        }
        acc
    }

    /// Polynomial of degree <= `degree` sampled from `f` at `degree + 1`
    /// equally spaced interior points of `[lo, hi]`.
    pub fn fit<F>(lo: &Rational, hi: &Rational, degree: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&Rational) -> Result<Rational>,
    {
        let steps = int(degree as i64 + 2);
        let width = hi - lo;
        let mut pts = Vec::with_capacity(degree + 1);
        for k in 1..=degree + 1 {
            let t = lo + &width * int(k as i64) / &steps;
            let y = f(&t)?;
            pts.push((t, y));
        }
        Ok(Self::interpolate(&pts))
    }

    fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    fn monic(&self) -> Self {
        let l = self.leading();
        if l.is_zero() {
            return self.clone();
        }
        self.scale(&l.recip())
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dl = d.leading();
        let dd = d.degree();
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); self.coeffs.len() - d.coeffs.len() + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        (Self::new(quot), Self::new(rem))
    }

    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the odd-multiplicity square-free factors, scaled by the
    /// leading coefficient. Has the same sign as `self` away from its roots
    /// and only simple roots.
    fn odd_part(&self) -> Self {
        // Yun's square-free factorization.
        let lead = self.leading();
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.div_rem(&a).0;
        let mut c = fp.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut odd = Self::constant(lead);
        let mut multiplicity = 1;
        while b.degree() > 0 {
            a = b.gcd(&d);
            if multiplicity % 2 == 1 {
                odd = odd.mul(&a);
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            multiplicity += 1;
        }
        odd
    }

    fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq[seq.len() - 1].is_zero() {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            seq.push(r.scale(&-Rational::one()));
        }
        seq.pop();
        seq
    }

    fn sign_changes(seq: &[Self], t: &Rational) -> usize {
        let signs: Vec<bool> = seq
            .iter()
            .map(|p| p.eval(t))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        if self.is_zero() || self.degree() == 0 {
            return 0;
        }
        let seq = self.sturm_sequence();
        Self::sign_changes(&seq, a).saturating_sub(Self::sign_changes(&seq, b))
    }

    /// Exact test that `self(t) <= 0` for every `t` in `[a, b]`.
    pub fn is_nonpositive_on(&self, a: &Rational, b: &Rational) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.eval(a).is_positive() || self.eval(b).is_positive() {
            return false;
        }
        if a >= b {
            return true;
        }
        let odd = self.odd_part();
        // Roots strictly inside (a, b).
        let inside = odd.count_roots(a, b) - usize::from(odd.eval(b).is_zero());
        if inside > 0 {
            return false;
        }
        let mid = (a + b) / int(2);
        !odd.eval(&mid).is_positive()
    }

    pub fn is_nonnegative_on(&self, a: &Rational, b: &Rational) -> bool {
        self.scale(&-Rational::one()).is_nonpositive_on(a, b)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{}", format_rational(&mag))?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}t", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}t^{k}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

/// Function given by one polynomial per interval `[b_i, b_{i+1}]`, with
/// optional constant extensions below the first and above the last breakpoint.
///
/// Inside the domain, a breakpoint belongs to the piece on its right, except
/// the last breakpoint which belongs to the last piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseData")]
pub struct PiecewisePolynomial {
    #[serde(with = "serde_q::vec")]
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
    #[serde(with = "serde_q::option", default)]
    below: Option<Rational>,
    #[serde(with = "serde_q::option", default)]
    above: Option<Rational>,
}

/// Unchecked wire form; decoding goes through [`PiecewisePolynomial::new`].
#[derive(Deserialize)]
struct PiecewiseData {
    #[serde(with = "serde_q::vec")]
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
    #[serde(with = "serde_q::option", default)]
    below: Option<Rational>,
    #[serde(with = "serde_q::option", default)]
    above: Option<Rational>,
}

impl TryFrom<PiecewiseData> for PiecewisePolynomial {
    type Error = Error;

    fn try_from(d: PiecewiseData) -> Result<Self> {
        Ok(Self::new(d.breakpoints, d.pieces)?.with_extensions(d.below, d.above))
    }
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints for {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            pieces,
            below: None,
            above: None,
        })
    }

    /// A single polynomial on `[lo, hi]`.
    pub fn single(lo: Rational, hi: Rational, p: Polynomial) -> Result<Self> {
        Self::new(vec![lo, hi], vec![p])
    }

    pub fn with_extensions(mut self, below: Option<Rational>, above: Option<Rational>) -> Self {
        self.below = below;
        self.above = above;
        self
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn below(&self) -> Option<&Rational> {
        self.below.as_ref()
    }

    pub fn above(&self) -> Option<&Rational> {
        self.above.as_ref()
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (
            &self.breakpoints[0],
            &self.breakpoints[self.breakpoints.len() - 1],
        )
    }

    /// Iterator over `(lo, hi, polynomial)`.
    pub fn intervals(&self) -> impl Iterator<Item = (&Rational, &Rational, &Polynomial)> {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (&w[0], &w[1], p))
    }

    /// Value at `t`; `None` outside the domain without an extension.
    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let (lo, hi) = self.domain();
        if t < lo {
            return self.below.clone();
        }
        if t > hi {
            return self.above.clone();
        }
        let idx = match self.breakpoints.binary_search(t) {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        Some(self.pieces[idx].eval(t))
    }

    /// Limit from the left at `t` (inside or at the right end of the domain).
    pub fn eval_left(&self, t: &Rational) -> Option<Rational> {
        let (lo, hi) = self.domain();
        if t <= lo {
            return if t == lo {
                self.below.clone().or_else(|| self.eval(t))
            } else {
                self.below.clone()
            };
        }
        if t > hi {
            return self.above.clone();
        }
        let idx = match self.breakpoints.binary_search(t) {
            Ok(i) => i - 1,
            Err(i) => i - 1,
        };
        Some(self.pieces[idx].eval(t))
    }

    /// Integral over the domain.
    pub fn integral(&self) -> Rational {
        self.intervals().map(|(a, b, p)| p.integrate(a, b)).sum()
    }

    /// Applies `f` to every piece.
    pub fn map_pieces<F: FnMut(&Polynomial) -> Polynomial>(&self, mut f: F) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(&mut f).collect(),
            below: None,
            above: None,
        }
    }

    /// Merges adjacent pieces with identical polynomials.
    pub fn simplified(&self) -> Self {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Polynomial> = Vec::new();
        for (_, hi, p) in self.intervals() {
            if pieces.last() == Some(p) {
                *bps.last_mut().unwrap() = hi.clone();
            } else {
                pieces.push(p.clone());
                bps.push(hi.clone());
            }
        }
        Self {
            breakpoints: bps,
            pieces,
            below: self.below.clone(),
            above: self.above.clone(),
        }
    }

    /// Restriction to `[lo, hi]` (which must lie inside the domain).
    pub fn restrict(&self, lo: &Rational, hi: &Rational) -> Result<Self> {
        let (a, b) = self.domain();
        if lo < a || hi > b || lo >= hi {
            return Err(Error::OutOfRange(format!(
                "[{}, {}]",
                format_rational(lo),
                format_rational(hi)
            )));
        }
        let mut bps = vec![lo.clone()];
        let mut pieces = Vec::new();
        for (pa, pb, p) in self.intervals() {
            if pb <= lo || pa >= hi {
                continue;
            }
            pieces.push(p.clone());
            bps.push(if pb < hi { pb.clone() } else { hi.clone() });
        }
        Ok(Self {
            breakpoints: bps,
            pieces,
            below: self.below.clone(),
            above: None,
        })
    }

    /// Whether the pieces agree at every interior breakpoint.
    pub fn is_continuous(&self) -> bool {
        self.pieces
            .windows(2)
            .zip(&self.breakpoints[1..])
            .all(|(w, t)| w[0].eval(t) == w[1].eval(t))
    }

    /// Exact test that the function is non-increasing on its domain, including
    /// jumps at interior breakpoints.
    pub fn is_non_increasing(&self) -> bool {
        let pieces_ok = self
            .intervals()
            .all(|(a, b, p)| p.derivative().is_nonpositive_on(a, b));
        let jumps_ok = self
            .pieces
            .windows(2)
            .zip(&self.breakpoints[1..])
            .all(|(w, t)| w[0].eval(t) >= w[1].eval(t));
        pieces_ok && jumps_ok
    }
}

impl fmt::Display for PiecewisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b, p)) in self.intervals().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}, {}]: {}", format_rational(a), format_rational(b), p)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn decoding_keeps_invariants() {
        let q: Polynomial = serde_json::from_str(r#"["1", "2", "0", "0"]"#).unwrap();
        assert_eq!(q, p(&[1, 2]));
        assert_eq!(q.degree(), 1);
        let ok = r#"{"breakpoints": ["0", "1/2"], "pieces": [["1"]], "above": "0"}"#;
        let f: PiecewisePolynomial = serde_json::from_str(ok).unwrap();
        assert_eq!(f.eval(&ratio(3, 4)), Some(int(0)));
        assert_eq!(
            serde_json::from_str::<PiecewisePolynomial>(&serde_json::to_string(&f).unwrap())
                .unwrap(),
            f
        );
        for bad in [
            r#"{"breakpoints": ["1", "0"], "pieces": [["1"]]}"#,
            r#"{"breakpoints": ["0"], "pieces": [["1"]]}"#,
            r#"{"breakpoints": [], "pieces": []}"#,
        ] {
            assert!(
                serde_json::from_str::<PiecewisePolynomial>(bad).is_err(),
                "{bad}"
            );
        }
    }

    #[test]
    fn arithmetic_and_calculus() {
        // (3 - t)^2 = 9 - 6t + t^2
        let f = p(&[3, -1]).pow(2);
        assert_eq!(f, p(&[9, -6, 1]));
        assert_eq!(f.integrate(&int(0), &int(3)), int(9));
        assert_eq!(f.derivative(), p(&[-6, 2]));
        assert_eq!(f.to_string(), "9 - 6*t + t^2");
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = p(&[8, -2, -1]);
        let pts: Vec<_> = [0, 1, 5]
            .iter()
            .map(|&x| (int(x), f.eval(&int(x))))
            .collect();
        assert_eq!(Polynomial::interpolate(&pts), f);
        let fitted = Polynomial::fit(&int(0), &int(2), 3, |t| Ok(f.eval(t))).unwrap();
        assert_eq!(fitted, f);
    }

    #[test]
    fn sign_tests_handle_double_roots() {
        // -(t - 1/2)^2 touches zero inside [0, 1].
        let q = Polynomial::affine(ratio(-1, 2), int(1))
            .pow(2)
            .scale(&int(-1));
        assert!(q.is_nonpositive_on(&int(0), &int(1)));
        // (t - 1/2) changes sign.
        assert!(!Polynomial::affine(ratio(-1, 2), int(1)).is_nonpositive_on(&int(0), &int(1)));
        // -(t^2 - 2)^2 has irrational double roots.
        let r = p(&[-2, 0, 1]).pow(2).scale(&int(-1));
        assert!(r.is_nonpositive_on(&int(-3), &int(3)));
        // t^3 on [-1, 0] is nonpositive, on [-1, 1] it is not.
        let c = p(&[0, 0, 0, 1]);
        assert!(c.is_nonpositive_on(&int(-1), &int(0)));
        assert!(!c.is_nonpositive_on(&int(-1), &int(1)));
    }

    #[test]
    fn piecewise_eval_and_merge() {
        let f = PiecewisePolynomial::new(
            vec![int(0), int(1), int(3)],
            vec![p(&[9, -6, 1]), p(&[9, -6, 1])],
        )
        .unwrap()
        .with_extensions(Some(int(9)), Some(int(0)));
        assert_eq!(f.eval(&int(-1)), Some(int(9)));
        assert_eq!(f.eval(&int(1)), Some(int(4)));
        assert_eq!(f.eval(&int(4)), Some(int(0)));
        let s = f.simplified();
        assert_eq!(s.pieces().len(), 1);
        assert!(s.is_continuous());
        assert!(s.is_non_increasing());
        assert_eq!(s.integral(), int(9));
        let r = s.restrict(&int(0), &int(1)).unwrap();
        assert_eq!(r.domain(), (&int(0), &int(1)));
    }
}
