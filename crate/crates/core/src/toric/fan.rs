use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LatticeVector, Point};
use crate::linalg::{determinant, inverse, mat_vec};
use crate::rational::Rational;

/// Raw fan data as it appears in problem files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanData {
    pub rays: Vec<LatticeVector>,
    pub cones: Vec<Vec<usize>>,
}

/// Outcome of [`validate_fan`]. `issues` lists every problem found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FanDiagnostics {
    pub primitive: bool,
    pub smooth: bool,
    pub complete: bool,
    pub issues: Vec<String>,
}

impl FanDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.primitive && self.smooth && self.complete && self.issues.is_empty()
    }
}

/// Complete smooth fan in `N_R = R^n`. Cones are sorted ray-index lists of
/// length `n`; each stores the inverse of its ray matrix for barycentric
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FanData", into = "FanData")]
pub struct Fan {
    dim: usize,
    rays: Vec<LatticeVector>,
    cones: Vec<Vec<usize>>,
    inverses: Vec<Vec<Point>>,
}

impl TryFrom<FanData> for Fan {
    type Error = Error;

    fn try_from(d: FanData) -> Result<Self> {
        Fan::new(d.rays, d.cones)
    }
}

impl From<Fan> for FanData {
    fn from(f: Fan) -> Self {
        FanData {
            rays: f.rays,
            cones: f.cones,
        }
    }
}

fn cone_matrix_t(rays: &[LatticeVector], cone: &[usize]) -> Vec<Point> {
    // Columns are the ray generators.
    let n = rays[cone[0]].dim();
    (0..n)
        .map(|r| {
            cone.iter()
                .map(|&i| Rational::from_integer(rays[i].0[r].into()))
                .collect()
        })
        .collect()
}

fn structural_issues(rays: &[LatticeVector], cones: &[Vec<usize>]) -> Vec<String> {
    let mut issues = Vec::new();
    let Some(first) = rays.first() else {
        issues.push("fan has no rays".into());
        return issues;
    };
    let n = first.dim();
    if n == 0 {
        issues.push("rays have dimension 0".into());
    }
    for (i, r) in rays.iter().enumerate() {
        if r.dim() != n {
            issues.push(format!("ray {i} has dimension {}, expected {n}", r.dim()));
        } else if r.is_zero() {
            issues.push(format!("ray {i} is zero"));
        }
    }
    let distinct: BTreeSet<&LatticeVector> = rays.iter().collect();
    if distinct.len() != rays.len() {
        issues.push("duplicate rays".into());
    }
    if cones.is_empty() {
        issues.push("fan has no cones".into());
    }
    for (k, c) in cones.iter().enumerate() {
        if c.len() != n {
            issues.push(format!("cone {k} has {} rays, expected {n}", c.len()));
        }
        if c.iter().any(|&i| i >= rays.len()) {
            issues.push(format!("cone {k} refers to a missing ray"));
        }
        if c.iter().collect::<BTreeSet<_>>().len() != c.len() {
            issues.push(format!("cone {k} repeats a ray"));
        }
    }
    let distinct: BTreeSet<Vec<usize>> = cones
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    if distinct.len() != cones.len() {
        issues.push("duplicate cones".into());
    }
    issues
}

/// A point avoiding every hyperplane spanned by `n - 1` rays of a cone.
fn generic_point(rays: &[LatticeVector], cones: &[Vec<usize>], n: usize) -> Point {
    let mut walls: Vec<Vec<usize>> = Vec::new();
    for c in cones {
        for skip in 0..c.len() {
            let mut w = c.clone();
            w.remove(skip);
            walls.push(w);
        }
    }
    for seed in 1i64.. {
        let p: Point = (0..n as i64)
            .map(|j| {
                Rational::from_integer(
                    (((seed * 7919 + j * 104_729) % 1009) - 504 + j * j * seed).into(),
                )
            })
            .collect();
        if p.iter().all(Zero::is_zero) {
            continue;
        }
        let clear = walls.iter().all(|w| {
            let mut m: Vec<Point> = w.iter().map(|&i| rays[i].to_rational()).collect();
            m.push(p.clone());
            !determinant(&m).is_zero()
        });
        if clear {
            return p;
        }
    }
    unreachable!()
}

/// Checks primitivity, smoothness and completeness without constructing a fan.
pub fn validate_fan(rays: &[LatticeVector], cones: &[Vec<usize>]) -> FanDiagnostics {
    let mut issues = structural_issues(rays, cones);
    let primitive_bad: Vec<usize> = (0..rays.len())
        .filter(|&i| !rays[i].is_primitive())
        .collect();
    for i in &primitive_bad {
        issues.push(format!("ray {i} {} is not primitive", rays[*i]));
    }
    if !issues.iter().all(|s| s.contains("not primitive")) {
        return FanDiagnostics {
            primitive: primitive_bad.is_empty(),
            smooth: false,
            complete: false,
            issues,
        };
    }
    let n = rays[0].dim();
    let mut smooth = true;
    let mut simplicial = true;
    for (k, c) in cones.iter().enumerate() {
        let m: Vec<Point> = c.iter().map(|&i| rays[i].to_rational()).collect();
        let d = determinant(&m);
        if d.is_zero() {
            simplicial = false;
            smooth = false;
            issues.push(format!("cone {k} is degenerate"));
        } else if d.abs() != Rational::from_integer(1.into()) {
            smooth = false;
            issues.push(format!("cone {k} has multiplicity {}", d.abs()));
        }
    }
    let mut complete = simplicial;
    if simplicial {
        let mut walls: BTreeMap<Vec<usize>, Vec<Rational>> = BTreeMap::new();
        for c in cones {
            let mut c = c.clone();
            c.sort_unstable();
            for skip in 0..n {
                let mut w = c.clone();
                let opp = w.remove(skip);
                let mut m: Vec<Point> = w.iter().map(|&i| rays[i].to_rational()).collect();
                m.push(rays[opp].to_rational());
                walls.entry(w).or_default().push(determinant(&m));
            }
        }
        for (w, sides) in &walls {
            let ok = sides.len() == 2 && sides[0].is_positive() != sides[1].is_positive();
            if !ok {
                complete = false;
                let names: Vec<String> = w.iter().map(|&i| rays[i].to_string()).collect();
                issues.push(format!(
                    "wall [{}] is not shared by two opposite cones",
                    names.join(", ")
                ));
            }
        }
        if complete {
            let p = generic_point(rays, cones, n);
            let hits = cones
                .iter()
                .filter(|c| {
                    let inv = inverse(&cone_matrix_t(rays, c)).expect("nonsingular cone");
                    mat_vec(&inv, &p).iter().all(Signed::is_positive)
                })
                .count();
            if hits != 1 {
                complete = false;
                issues.push(format!("a generic point lies in {hits} cones"));
            }
        }
    }
    FanDiagnostics {
        primitive: primitive_bad.is_empty(),
        smooth,
        complete,
        issues,
    }
}

impl Fan {
    /// Validates and builds a fan; any diagnostic issue is an error.
    pub fn new(rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Result<Self> {
        let diag = validate_fan(&rays, &cones);
        if !diag.is_valid() {
            return Err(Error::InvalidFan(diag.issues.join("; ")));
        }
        Ok(Self::assemble(rays, cones))
    }

    fn assemble(rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Self {
        let mut cones: Vec<Vec<usize>> = cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cones.sort();
        let inverses = cones
            .iter()
            .map(|c| inverse(&cone_matrix_t(&rays, c)).expect("validated cone"))
            .collect();
        Self {
            dim: rays[0].dim(),
            rays,
            cones,
            inverses,
        }
    }

    /// Fan of `P^n` with rays `e_1, ..., e_n, -(e_1 + ... + e_n)`.
    pub fn projective_space(n: usize) -> Self {
        let mut rays: Vec<LatticeVector> = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                LatticeVector(v)
            })
            .collect();
        rays.push(LatticeVector(vec![-1; n]));
        let cones = (0..=n)
            .map(|skip| (0..=n).filter(|&i| i != skip).collect())
            .collect();
        Self::new(rays, cones).expect("standard fan")
    }

    /// Fan of `(P^1)^n` with rays `e_1, -e_1, e_2, -e_2, ...`.
    pub fn product_of_lines(n: usize) -> Self {
        let mut rays = Vec::new();
        for i in 0..n {
            for s in [1, -1] {
                let mut v = vec![0; n];
                v[i] = s;
                rays.push(LatticeVector(v));
            }
        }
        let cones = (0..1usize << n)
            .map(|mask| (0..n).map(|i| 2 * i + ((mask >> i) & 1)).collect())
            .collect();
        Self::new(rays, cones).expect("standard fan")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn ray_index(&self, u: &LatticeVector) -> Option<usize> {
        self.rays.iter().position(|r| r == u)
    }

    /// Barycentric coordinates of `x` in cone `k`.
    pub fn cone_coordinates(&self, k: usize, x: &[Rational]) -> Vec<Rational> {
        mat_vec(&self.inverses[k], x)
    }

    /// First cone containing `u` together with the coordinates of `u` on
    /// its rays (all nonnegative).
    pub fn locate(&self, u: &LatticeVector) -> Result<(usize, Vec<Rational>)> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.dim(),
            });
        }
        let x = u.to_rational();
        for k in 0..self.cones.len() {
            let lam = self.cone_coordinates(k, &x);
            if lam.iter().all(|l| !l.is_negative()) {
                return Ok((k, lam));
            }
        }
        Err(Error::NotInSupport)
    }

    /// Pairs `(cone, lambda)` for every cone containing `u`.
    pub fn cones_containing(&self, u: &LatticeVector) -> Vec<(usize, Vec<Rational>)> {
        let x = u.to_rational();
        (0..self.cones.len())
            .map(|k| (k, self.cone_coordinates(k, &x)))
            .filter(|(_, lam)| lam.iter().all(|l| !l.is_negative()))
            .collect()
    }

    /// Value at `u` of the piecewise linear function taking `values[i]` on
    /// ray `i`.
    pub fn piecewise_linear(&self, values: &[Rational], u: &LatticeVector) -> Result<Rational> {
        if values.len() != self.rays.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rays.len(),
                got: values.len(),
            });
        }
        let (k, lam) = self.locate(u)?;
        Ok(self.cones[k]
            .iter()
            .zip(&lam)
            .map(|(&i, l)| l * &values[i])
            .sum())
    }

    /// Star subdivision at the primitive vector `u`; the new ray is appended.
    pub(crate) fn subdivide(&self, u: &LatticeVector) -> Result<Fan> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.dim(),
            });
        }
        if u.is_zero() {
            return Err(Error::ZeroVector);
        }
        if !u.is_primitive() {
            return Err(Error::NonPrimitive);
        }
        if self.ray_index(u).is_some() {
            return Err(Error::AlreadyARay);
        }
        let containing = self.cones_containing(u);
        if containing.is_empty() {
            return Err(Error::NotInSupport);
        }
        let new_idx = self.rays.len();
        let hit: BTreeSet<usize> = containing.iter().map(|(k, _)| *k).collect();
        let mut cones: Vec<Vec<usize>> = (0..self.cones.len())
            .filter(|k| !hit.contains(k))
            .map(|k| self.cones[k].clone())
            .collect();
        let one = Rational::from_integer(1.into());
        for (k, lam) in &containing {
            for (pos, l) in lam.iter().enumerate() {
                if l.is_zero() {
                    continue;
                }
                if *l != one {
                    return Err(Error::SingularSubdivision);
                }
                let mut c = self.cones[*k].clone();
                c[pos] = new_idx;
                cones.push(c);
            }
        }
        let mut rays = self.rays.clone();
        rays.push(u.clone());
        Ok(Self::assemble(rays, cones))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector(c.to_vec())
    }

    fn p2_rays() -> Vec<LatticeVector> {
        vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])]
    }

    #[test]
    fn p2_is_valid() {
        let d = validate_fan(&p2_rays(), &[vec![0, 1], vec![1, 2], vec![2, 0]]);
        assert!(d.is_valid(), "{d:?}");
        assert_eq!(Fan::projective_space(2).ray_count(), 3);
        assert!(validate_fan(
            Fan::projective_space(3).rays(),
            Fan::projective_space(3).cones()
        )
        .is_valid());
        assert_eq!(Fan::product_of_lines(3).cones().len(), 8);
    }

    #[test]
    fn missing_cone_is_incomplete() {
        let d = validate_fan(&p2_rays(), &[vec![0, 1], vec![1, 2]]);
        assert!(!d.complete);
        assert!(d.smooth);
        assert!(!d.is_valid());
    }

    #[test]
    fn non_primitive_ray_flagged() {
        let rays = vec![lv(&[2, 0]), lv(&[0, 1]), lv(&[-2, -1])];
        let d = validate_fan(&rays, &[vec![0, 1], vec![1, 2], vec![2, 0]]);
        assert!(!d.primitive);
        assert!(d.issues.iter().any(|s| s.contains("ray 0")));
    }

    #[test]
    fn overlapping_cones_rejected() {
        // Two full covers of the plane glued together cover a generic point twice.
        let rays = vec![
            lv(&[1, 0]),
            lv(&[0, 1]),
            lv(&[-1, 0]),
            lv(&[0, -1]),
            lv(&[1, 1]),
        ];
        let d = validate_fan(
            &rays,
            &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0], vec![0, 4]],
        );
        assert!(!d.complete);
    }

    #[test]
    fn structural_errors() {
        assert!(!validate_fan(&[], &[]).is_valid());
        assert!(!validate_fan(&p2_rays(), &[vec![0, 7], vec![1, 2], vec![2, 0]]).is_valid());
        assert!(Fan::new(p2_rays(), vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn one_dimensional_fan() {
        let f = Fan::new(vec![lv(&[1]), lv(&[-1])], vec![vec![0], vec![1]]).unwrap();
        assert_eq!(f.dim(), 1);
        assert_eq!(f.locate(&lv(&[-3])).unwrap().0, 1);
    }

    #[test]
    fn serde_round_trip() {
        let f = Fan::projective_space(2);
        let s = serde_json::to_string(&f).unwrap();
        let g: Fan = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<Fan>(r#"{"rays":[[1,0],[0,1]],"cones":[[0,1]]}"#).is_err());
    }
}
