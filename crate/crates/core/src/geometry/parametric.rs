use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::polytope::{combinations, normals_bounded};
use super::{Halfspace, LatticeVector, Point, Polytope};
use crate::error::{Error, Result};
use crate::linalg::{self, inverse, mat_vec};
use crate::lp::{self, Constraint};
use crate::poly::{PiecewisePolynomial, Polynomial};
use crate::rational::{int, Rational};

/// `t -> base + t * slope`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffinePoint {
    pub base: Point,
    pub slope: Point,
}

impl AffinePoint {
    pub fn at(&self, t: &Rational) -> Point {
        self.base
            .iter()
            .zip(&self.slope)
            .map(|(b, s)| b + s * t)
            .collect()
    }

    /// `t -> <p(t), u>` as an affine polynomial.
    pub fn pair(&self, u: &LatticeVector) -> Polynomial {
        Polynomial::affine(u.pair(&self.base), u.pair(&self.slope))
    }
}

/// Maximal open interval of `t` with a constant set of vertex paths.
/// `None` endpoints are infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
    pub vertex_paths: Vec<AffinePoint>,
}

impl Chamber {
    /// A parameter value strictly inside the chamber.
    pub fn sample(&self) -> Rational {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => (a + b) / int(2),
            (Some(a), None) => a + int(1),
            (None, Some(b)) => b - int(1),
            (None, None) => Rational::zero(),
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|a| a <= t) && self.hi.as_ref().is_none_or(|b| t <= b)
    }

    /// Finite window inside the closure of the chamber, for exact fitting.
    fn window(&self) -> (Rational, Rational) {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            (Some(a), None) => (a.clone(), a + int(1)),
            (None, Some(b)) => (b - int(1), b.clone()),
            (None, None) => (Rational::zero(), int(1)),
        }
    }
}

/// Polytopes `P_t = {x : <x, u_i> >= -(a_i - t d_i)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametricPolytope {
    dim: usize,
    normals: Vec<LatticeVector>,
    offsets: Vec<Rational>,
    directions: Vec<Rational>,
    feasible: Option<(Option<Rational>, Option<Rational>)>,
    chambers: Vec<Chamber>,
}

struct BasisPath {
    path: AffinePoint,
    lo: Option<Rational>,
    hi: Option<Rational>,
}

fn min_opt(a: Option<Rational>, b: Rational) -> Option<Rational> {
    Some(match a {
        Some(a) if a < b => a,
        _ => b,
    })
}

fn max_opt(a: Option<Rational>, b: Rational) -> Option<Rational> {
    Some(match a {
        Some(a) if a > b => a,
        _ => b,
    })
}

/// Builds the family and its exact chamber decomposition.
pub fn parametric_family(
    dim: usize,
    normals: &[LatticeVector],
    offsets: &[Rational],
    directions: &[Rational],
) -> Result<ParametricPolytope> {
    if offsets.len() != normals.len() {
        return Err(Error::DimensionMismatch {
            expected: normals.len(),
            got: offsets.len(),
        });
    }
    if directions.len() != normals.len() {
        return Err(Error::DimensionMismatch {
            expected: normals.len(),
            got: directions.len(),
        });
    }
    for u in normals {
        if u.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: u.dim(),
            });
        }
        if u.is_zero() {
            return Err(Error::ZeroVector);
        }
    }
    let rows: Vec<Point> = normals.iter().map(LatticeVector::to_rational).collect();
    let mut paths = Vec::new();
    for subset in combinations(normals.len(), dim) {
        let b: Vec<Point> = subset.iter().map(|&i| rows[i].clone()).collect();
        let Some(binv) = inverse(&b) else {
            continue;
        };
        let neg_a: Vec<Rational> = subset.iter().map(|&i| -offsets[i].clone()).collect();
        let d: Vec<Rational> = subset.iter().map(|&i| directions[i].clone()).collect();
        let path = AffinePoint {
            base: mat_vec(&binv, &neg_a),
            slope: mat_vec(&binv, &d),
        };
        // slack_j(t) = alpha + beta t must stay >= 0.
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        let mut ok = true;
        for j in 0..normals.len() {
            let alpha = linalg::dot(&rows[j], &path.base) + &offsets[j];
            let beta = linalg::dot(&rows[j], &path.slope) - &directions[j];
            if beta.is_zero() {
                if alpha.is_negative() {
                    ok = false;
                    break;
                }
            } else {
                let root = -&alpha / &beta;
                if beta.is_positive() {
                    lo = max_opt(lo, root);
                } else {
                    hi = min_opt(hi, root);
                }
            }
        }
        if !ok {
            continue;
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                continue;
            }
        }
        paths.push(BasisPath { path, lo, hi });
    }

    let refs: Vec<&LatticeVector> = normals.iter().collect();
    if paths.is_empty() {
        let cons: Vec<Constraint> = (0..normals.len())
            .map(|j| {
                let mut c = rows[j].clone();
                c.push(-directions[j].clone());
                Constraint::new(c, -offsets[j].clone())
            })
            .collect();
        if lp::feasible_point(dim + 1, &cons).is_some() {
            return Err(Error::UnboundedRegion);
        }
        return Ok(ParametricPolytope {
            dim,
            normals: normals.to_vec(),
            offsets: offsets.to_vec(),
            directions: directions.to_vec(),
            feasible: None,
            chambers: Vec::new(),
        });
    }
    if !normals_bounded(dim, &refs) {
        return Err(Error::UnboundedRegion);
    }

    let lo = if paths.iter().any(|p| p.lo.is_none()) {
        None
    } else {
        paths.iter().filter_map(|p| p.lo.clone()).min()
    };
    let hi = if paths.iter().any(|p| p.hi.is_none()) {
        None
    } else {
        paths.iter().filter_map(|p| p.hi.clone()).max()
    };
    let mut cuts = BTreeSet::new();
    for p in &paths {
        cuts.extend(p.lo.iter().cloned());
        cuts.extend(p.hi.iter().cloned());
    }
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let mut bounds: Vec<Option<Rational>> = Vec::new();
    if lo.is_none() {
        bounds.push(None);
    }
    bounds.extend(cuts.into_iter().map(Some));
    if hi.is_none() {
        bounds.push(None);
    }
    let mut chambers = Vec::new();
    for w in bounds.windows(2) {
        let mut ch = Chamber {
            lo: w[0].clone(),
            hi: w[1].clone(),
            vertex_paths: Vec::new(),
        };
        let s = ch.sample();
        let mut set = BTreeSet::new();
        for p in &paths {
            let inside =
                p.lo.as_ref().is_none_or(|a| a <= &s) && p.hi.as_ref().is_none_or(|b| &s <= b);
            if inside {
                set.insert(p.path.clone());
            }
        }
        ch.vertex_paths = set.into_iter().collect();
        chambers.push(ch);
    }
    Ok(ParametricPolytope {
        dim,
        normals: normals.to_vec(),
        offsets: offsets.to_vec(),
        directions: directions.to_vec(),
        feasible: Some((lo, hi)),
        chambers,
    })
}

impl ParametricPolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[LatticeVector] {
        &self.normals
    }

    /// Closed interval of `t` with `P_t` nonempty; `None` if empty for all `t`.
    pub fn feasible_interval(&self) -> Option<(Option<&Rational>, Option<&Rational>)> {
        self.feasible
            .as_ref()
            .map(|(a, b)| (a.as_ref(), b.as_ref()))
    }

    pub fn is_feasible_at(&self, t: &Rational) -> bool {
        match self.feasible_interval() {
            None => false,
            Some((a, b)) => a.is_none_or(|a| a <= t) && b.is_none_or(|b| t <= b),
        }
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    /// Offsets of `P_t`.
    pub fn offsets_at(&self, t: &Rational) -> Vec<Rational> {
        self.offsets
            .iter()
            .zip(&self.directions)
            .map(|(a, d)| a - d * t)
            .collect()
    }

    pub fn halfspaces_at(&self, t: &Rational) -> Vec<Halfspace> {
        self.normals
            .iter()
            .cloned()
            .zip(self.offsets_at(t))
            .map(|(u, a)| Halfspace::new(u, a))
            .collect()
    }

    /// Index of a chamber whose closure contains `t`.
    pub fn chamber_index(&self, t: &Rational) -> Option<usize> {
        self.chambers.iter().position(|c| c.contains(t))
    }

    pub fn at(&self, t: &Rational) -> Result<Polytope> {
        let hs = self.halfspaces_at(t);
        if !self.is_feasible_at(t) {
            return Ok(Polytope::empty(self.dim));
        }
        match self.chamber_index(t) {
            Some(i) => {
                let v = self.chambers[i]
                    .vertex_paths
                    .iter()
                    .map(|p| p.at(t))
                    .collect();
                Ok(Polytope::from_parts(self.dim, hs, v))
            }
            None => Polytope::from_halfspaces(self.dim, hs),
        }
    }

    pub fn volume_at(&self, t: &Rational) -> Result<Rational> {
        Ok(self.at(t)?.volume())
    }

    /// Exact volume polynomial of chamber `i`.
    pub fn volume_polynomial(&self, i: usize) -> Result<Polynomial> {
        let ch = self
            .chambers
            .get(i)
            .ok_or_else(|| Error::OutOfRange(format!("chamber {i}")))?;
        let (a, b) = ch.window();
        Polynomial::fit(&a, &b, self.dim, |t| {
            let v = ch.vertex_paths.iter().map(|p| p.at(t)).collect();
            Ok(Polytope::from_parts(self.dim, self.halfspaces_at(t), v).volume())
        })
    }

    /// `t -> min_{P_t} <., u>` on chamber `i`, affine in `t`.
    pub fn support_function(&self, i: usize, u: &LatticeVector) -> Result<Polynomial> {
        let ch = self
            .chambers
            .get(i)
            .ok_or_else(|| Error::OutOfRange(format!("chamber {i}")))?;
        let s = ch.sample();
        ch.vertex_paths
            .iter()
            .map(|p| p.pair(u))
            .min_by(|p, q| p.eval(&s).cmp(&q.eval(&s)))
            .ok_or(Error::DegeneratePolytope)
    }

    /// Finite chamber walls strictly inside `(lo, hi)`.
    pub fn walls_between(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .chambers
            .iter()
            .filter_map(|c| c.hi.clone())
            .filter(|w| lo < w && w < hi)
            .collect();
        out.dedup();
        out
    }

    /// `t -> vol(P_t)` on `[lo, hi]` as an exact piecewise polynomial.
    pub fn volume_curve(&self, lo: &Rational, hi: &Rational) -> Result<PiecewisePolynomial> {
        if lo >= hi {
            return Err(Error::OutOfRange(format!("empty range [{lo}, {hi}]")));
        }
        if !self.is_feasible_at(lo) || !self.is_feasible_at(hi) {
            return Err(Error::OutOfRange(format!(
                "[{lo}, {hi}] leaves the feasible interval"
            )));
        }
        let mut bps = vec![lo.clone()];
        bps.extend(self.walls_between(lo, hi));
        bps.push(hi.clone());
        let mut pieces = Vec::with_capacity(bps.len() - 1);
        for w in bps.windows(2) {
            let mid = (&w[0] + &w[1]) / int(2);
            let i = self
                .chamber_index(&mid)
                .ok_or_else(|| Error::Inconsistent("no chamber for sample".into()))?;
            pieces.push(self.volume_polynomial(i)?);
        }
        PiecewisePolynomial::new(bps, pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector(c.to_vec())
    }

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn p2_family() -> ParametricPolytope {
        // L = 3H placed on ray (-1,-1); D = H on the same ray.
        parametric_family(
            2,
            &[lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])],
            &q(&[0, 0, 3]),
            &q(&[0, 0, 1]),
        )
        .unwrap()
    }

    #[test]
    fn p2_single_chamber() {
        let f = p2_family();
        let (lo, hi) = f.feasible_interval().unwrap();
        assert_eq!(lo, None);
        assert_eq!(hi, Some(&int(3)));
        assert_eq!(f.chambers().len(), 1);
        let t = ratio(1, 2);
        let mut v: Vec<Point> = f.chambers()[0]
            .vertex_paths
            .iter()
            .map(|p| p.at(&t))
            .collect();
        v.sort();
        // Shifted by the linear equivalence 3H ~ D_(1,0) + D_(0,1) + D_(-1,-1):
        // vertices (0,0), (3-t,0), (0,3-t).
        assert_eq!(
            v,
            vec![
                q(&[0, 0]),
                vec![int(0), ratio(5, 2)],
                vec![ratio(5, 2), int(0)]
            ]
        );
        let p = f.volume_polynomial(0).unwrap();
        assert_eq!(p, Polynomial::new(vec![ratio(9, 2), int(-3), ratio(1, 2)]));
    }

    #[test]
    fn p2_anticanonical_vertex_paths() {
        let f = parametric_family(
            2,
            &[lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])],
            &q(&[1, 1, 1]),
            &q(&[1, 0, 0]),
        )
        .unwrap();
        let ch = &f.chambers()[f.chamber_index(&int(1)).unwrap()];
        let t = int(1);
        let mut got: Vec<Point> = ch.vertex_paths.iter().map(|p| p.at(&t)).collect();
        got.sort();
        // (t-1,-1), (2,-1), (t-1,2-t) at t = 1.
        assert_eq!(got, vec![q(&[0, -1]), q(&[0, 1]), q(&[2, -1])]);
        assert_eq!(f.feasible_interval().unwrap().1, Some(&int(3)));
    }

    #[test]
    fn zero_direction_is_one_chamber() {
        let f = parametric_family(
            2,
            &[lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])],
            &q(&[1, 1, 1]),
            &q(&[0, 0, 0]),
        )
        .unwrap();
        assert_eq!(f.feasible_interval(), Some((None, None)));
        assert_eq!(f.chambers().len(), 1);
        for p in &f.chambers()[0].vertex_paths {
            assert!(p.slope.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn f1_minus_exceptional() {
        let normals = [lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1]), lv(&[1, 1])];
        let f = parametric_family(2, &normals, &q(&[1, 1, 1, 1]), &q(&[0, 0, 0, 1])).unwrap();
        assert_eq!(f.feasible_interval().unwrap().1, Some(&int(2)));
        let curve = f.volume_curve(&int(0), &int(2)).unwrap();
        // Euclidean area; the self-intersection is twice this, 8 - 2t - t^2.
        let expected = Polynomial::new(q(&[8, -2, -1])).scale(&ratio(1, 2));
        for k in 0..=8 {
            let t = ratio(k, 4);
            assert_eq!(curve.eval(&t).unwrap(), expected.eval(&t), "t = {t}");
        }
        // E becomes non-tight at t = -1 where the quadrilateral degenerates.
        assert!(f.chambers().iter().any(|c| c.hi == Some(int(-1))));
    }

    #[test]
    fn unbounded_family() {
        let r = parametric_family(2, &[lv(&[1, 0]), lv(&[0, 1])], &q(&[0, 0]), &q(&[1, 0]));
        assert_eq!(r, Err(Error::UnboundedRegion));
    }
}
