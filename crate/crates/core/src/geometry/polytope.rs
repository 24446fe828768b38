use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{Halfspace, LatticeVector, Point};
use crate::error::{Error, Result};
use crate::linalg::{
    self, affine_rank, canonical_line, determinant, dot, null_space, primitive_integer, rank,
};
use crate::lp::{self, Constraint, LpOutcome};
use crate::rational::{ceil, factorial, floor, from_bigint, int, Rational};

/// Bounded rational polytope with both descriptions cached.
///
/// `halfspaces` may contain redundant inequalities; `vertices` is the exact
/// vertex set in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Point>,
}

/// `min`, volume-weighted `mean` and `max` of a linear form over a polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearStats {
    pub min: Rational,
    pub mean: Rational,
    pub max: Rational,
}

pub(crate) fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 && idx[0] == m - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn check_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidInput(
            "ambient dimension must be positive".into(),
        ));
    }
    for h in halfspaces {
        if h.normal.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: h.normal.dim(),
            });
        }
        if h.normal.is_zero() {
            return Err(Error::ZeroVector);
        }
    }
    Ok(())
}

/// Whether `{x : <x, u_i> >= 0 for all i}` is `{0}`.
pub(crate) fn normals_bounded(dim: usize, normals: &[&LatticeVector]) -> bool {
    let cons: Vec<Constraint> = normals
        .iter()
        .map(|u| Constraint::new(u.to_rational(), Rational::zero()))
        .collect();
    for j in 0..dim {
        for sgn in [1, -1] {
            let mut obj = vec![Rational::zero(); dim];
            obj[j] = int(sgn);
            match lp::maximize(&obj, &cons) {
                LpOutcome::Optimal { value, .. } if value.is_zero() => {}
                _ => return false,
            }
        }
    }
    true
}

/// Exact vertex set of `{x : <x, u_i> >= -a_i}` by exhaustive basis solving.
///
/// Returns an empty list iff the region is infeasible and fails with
/// [`Error::UnboundedRegion`] if it is nonempty and unbounded.
pub fn vertices_of(dim: usize, halfspaces: &[Halfspace]) -> Result<Vec<Point>> {
    check_halfspaces(dim, halfspaces)?;
    let normals: Vec<Point> = halfspaces.iter().map(|h| h.normal.to_rational()).collect();
    let mut found = BTreeSet::new();
    for subset in combinations(halfspaces.len(), dim) {
        let m: Vec<Point> = subset.iter().map(|&i| normals[i].clone()).collect();
        let b: Vec<Rational> = subset
            .iter()
            .map(|&i| -halfspaces[i].offset.clone())
            .collect();
        let Some(x) = linalg::solve(&m, &b) else {
            continue;
        };
        if halfspaces.iter().all(|h| h.contains(&x)) {
            found.insert(x);
        }
    }
    let refs: Vec<&LatticeVector> = halfspaces.iter().map(|h| &h.normal).collect();
    if found.is_empty() {
        let cons: Vec<Constraint> = halfspaces
            .iter()
            .map(|h| Constraint::new(h.normal.to_rational(), -h.offset.clone()))
            .collect();
        if lp::feasible_point(dim, &cons).is_some() {
            return Err(Error::UnboundedRegion);
        }
        return Ok(Vec::new());
    }
    if !normals_bounded(dim, &refs) {
        return Err(Error::UnboundedRegion);
    }
    Ok(found.into_iter().collect())
}

impl Polytope {
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        let vertices = vertices_of(dim, &halfspaces)?;
        Ok(Self {
            dim,
            halfspaces,
            vertices,
        })
    }

    /// Trusted constructor: `vertices` must be the exact vertex set of the
    /// region cut out by `halfspaces`.
    pub(crate) fn from_parts(
        dim: usize,
        halfspaces: Vec<Halfspace>,
        mut vertices: Vec<Point>,
    ) -> Self {
        vertices.sort();
        vertices.dedup();
        Self {
            dim,
            halfspaces,
            vertices,
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            halfspaces: Vec::new(),
            vertices: Vec::new(),
        }
    }

    /// Convex hull of a finite point set.
    pub fn from_points(dim: usize, points: &[Point]) -> Result<Self> {
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: points.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(0),
            });
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        let dirs = pairwise_directions(&pts);
        hull_from_directions(dim, &[pts], dirs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        !self.is_empty() && self.halfspaces.iter().all(|h| h.contains(x))
    }

    /// Dimension of the affine hull, `None` when empty.
    pub fn affine_dim(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let refs: Vec<&[Rational]> = self.vertices.iter().map(|v| v.as_slice()).collect();
        Some(affine_rank(&refs))
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == Some(self.dim)
    }

    /// `c * P` for `c >= 0`.
    pub fn scaled(&self, c: &Rational) -> Self {
        assert!(!c.is_negative(), "negative scaling");
        if c.is_zero() && !self.is_empty() {
            let origin = vec![Rational::zero(); self.dim];
            return Self::from_points(self.dim, &[origin]).expect("single point hull");
        }
        Self {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace::new(h.normal.clone(), &h.offset * c))
                .collect(),
            vertices: self.vertices.iter().map(|v| linalg::scale(v, c)).collect(),
        }
    }

    fn tight_set(&self, h: &Halfspace) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| h.slack(&self.vertices[i]).is_zero())
            .collect()
    }

    /// Facets as vertex-index sets (only meaningful when full-dimensional).
    pub fn facets(&self) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        for h in &self.halfspaces {
            let t = self.tight_set(h);
            if t.len() < self.dim {
                continue;
            }
            let pts: Vec<&[Rational]> = t.iter().map(|&i| self.vertices[i].as_slice()).collect();
            if affine_rank(&pts) + 1 == self.dim {
                out.insert(t);
            }
        }
        out.into_iter().collect()
    }

    /// Vertex-index pairs spanning the edges of a full-dimensional polytope.
    fn edges(&self, facets: &[Vec<usize>]) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut common: Option<BTreeSet<usize>> = None;
                for f in facets.iter().filter(|f| f.contains(&i) && f.contains(&j)) {
                    let s: BTreeSet<usize> = f.iter().copied().collect();
                    common = Some(match common {
                        None => s,
                        Some(c) => c.intersection(&s).copied().collect(),
                    });
                }
                let is_edge = match common {
                    Some(c) => c.len() == 2,
                    None => self.dim == 1,
                };
                if is_edge {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn centroid(&self, idx: &[usize]) -> Point {
        let mut c = vec![Rational::zero(); self.dim];
        for &i in idx {
            for (x, v) in c.iter_mut().zip(&self.vertices[i]) {
                *x += v;
            }
        }
        let k = int(idx.len() as i64);
        c.iter().map(|x| x / &k).collect()
    }

    /// Volume and first moment `int x dx`, by summing over the barycentric
    /// flag triangulation rooted at the centroid.
    pub fn volume_and_moment(&self) -> (Rational, Point) {
        let zero = (Rational::zero(), vec![Rational::zero(); self.dim]);
        if !self.is_full_dimensional() {
            return zero;
        }
        let facets = self.facets();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut chain = vec![self.centroid(&all)];
        let mut acc = zero;
        let norm = factorial(self.dim);
        self.flag_walk(&all, self.dim, &facets, &mut chain, &norm, &mut acc);
        acc
    }

    fn flag_walk(
        &self,
        face: &[usize],
        k: usize,
        facets: &[Vec<usize>],
        chain: &mut Vec<Point>,
        norm: &Rational,
        acc: &mut (Rational, Point),
    ) {
        if k == 0 {
            let base = &chain[0];
            let m: Vec<Point> = chain[1..].iter().map(|p| linalg::sub(p, base)).collect();
            let vol = determinant(&m).abs() / norm;
            if vol.is_zero() {
                return;
            }
            let denom = int(chain.len() as i64);
            for j in 0..self.dim {
                let s: Rational = chain.iter().map(|p| &p[j]).sum();
                acc.1[j] += &vol * s / &denom;
            }
            acc.0 += vol;
            return;
        }
        let mut subfaces = BTreeSet::new();
        for f in facets {
            let s: Vec<usize> = face.iter().copied().filter(|i| f.contains(i)).collect();
            if s.len() < k || s.len() == face.len() {
                continue;
            }
            let ok = if k == 1 {
                s.len() == 1
            } else {
                let pts: Vec<&[Rational]> =
                    s.iter().map(|&i| self.vertices[i].as_slice()).collect();
                affine_rank(&pts) == k - 1
            };
            if ok {
                subfaces.insert(s);
            }
        }
        for g in subfaces {
            chain.push(self.centroid(&g));
            self.flag_walk(&g, k - 1, facets, chain, norm, acc);
            chain.pop();
        }
    }

    pub fn volume(&self) -> Rational {
        self.volume_and_moment().0
    }

    /// Minkowski sum of polytopes of the same dimension.
    pub fn minkowski_sum(parts: &[&Polytope]) -> Result<Polytope> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidInput("empty Minkowski sum".into()));
        };
        let dim = first.dim;
        if let Some(p) = parts.iter().find(|p| p.dim != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim,
            });
        }
        if parts.iter().any(|p| p.is_empty()) {
            return Ok(Polytope::empty(dim));
        }
        let mut dirs = Vec::new();
        for p in parts {
            if p.is_full_dimensional() {
                let facets = p.facets();
                for (i, j) in p.edges(&facets) {
                    dirs.push(linalg::sub(&p.vertices[j], &p.vertices[i]));
                }
            } else {
                dirs.extend(pairwise_directions(&p.vertices));
            }
        }
        let vsets: Vec<Vec<Point>> = parts.iter().map(|p| p.vertices.clone()).collect();
        hull_from_directions(dim, &vsets, dirs)
    }
}

fn pairwise_directions(points: &[Point]) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            out.push(linalg::sub(&points[j], &points[i]));
        }
    }
    out
}

fn bigint_vec_to_lattice(v: &[BigInt]) -> Result<LatticeVector> {
    v.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::InvalidInput("normal vector overflows i64".into()))
        })
        .collect::<Result<Vec<_>>>()
        .map(LatticeVector)
}

/// H-description of the Minkowski sum of the point sets `parts`, where
/// `directions` contains every edge direction of every summand. Facet normals
/// are found as normals of the hyperplanes spanned by edge directions.
fn hull_from_directions(
    dim: usize,
    parts: &[Vec<Point>],
    directions: Vec<Point>,
) -> Result<Polytope> {
    if parts.iter().any(|p| p.is_empty()) {
        return Ok(Polytope::empty(dim));
    }
    let mut lines = BTreeSet::new();
    for d in &directions {
        if let Some(l) = canonical_line(d) {
            lines.insert(l);
        }
    }
    let dirs: Vec<Point> = lines
        .into_iter()
        .map(|l| l.into_iter().map(from_bigint).collect())
        .collect();
    let base: Point = parts
        .iter()
        .map(|p| p[0].clone())
        .reduce(|a, b| linalg::add(&a, &b))
        .expect("nonempty parts");
    let r = rank(&dirs);
    let complement: Vec<Point> = null_space(&dirs, dim)
        .into_iter()
        .map(|v| {
            primitive_integer(&v)
                .expect("nonzero null vector")
                .into_iter()
                .map(from_bigint)
                .collect()
        })
        .collect();
    let mut halfspaces = Vec::new();
    for c in &complement {
        let u = bigint_vec_to_lattice(&c.iter().map(|x| x.to_integer()).collect::<Vec<_>>())?;
        let level = dot(c, &base);
        halfspaces.push(Halfspace::new(u.clone(), -level.clone()));
        halfspaces.push(Halfspace::new(u.neg(), level));
    }
    if r > 0 {
        let mut seen = BTreeSet::new();
        for subset in combinations(dirs.len(), r - 1) {
            let mut m: Vec<Point> = subset.iter().map(|&i| dirs[i].clone()).collect();
            m.extend(complement.iter().cloned());
            if rank(&m) + 1 != dim {
                continue;
            }
            let ns = null_space(&m, dim);
            let w = primitive_integer(&ns[0]).expect("nonzero normal");
            for sgn in [1i64, -1] {
                let w: Vec<BigInt> = w.iter().map(|x| x * sgn).collect();
                if !seen.insert(w.clone()) {
                    continue;
                }
                let wq: Point = w.iter().cloned().map(from_bigint).collect();
                let mut total_min = Rational::zero();
                let mut face_dirs = Vec::new();
                for part in parts {
                    let vals: Vec<Rational> = part.iter().map(|v| dot(&wq, v)).collect();
                    let mn = vals.iter().min().expect("nonempty").clone();
                    let tight: Vec<&Point> = part
                        .iter()
                        .zip(&vals)
                        .filter(|(_, v)| **v == mn)
                        .map(|(p, _)| p)
                        .collect();
                    for t in &tight[1..] {
                        face_dirs.push(linalg::sub(t, tight[0]));
                    }
                    total_min += mn;
                }
                if rank(&face_dirs) + 1 == r {
                    halfspaces.push(Halfspace::new(bigint_vec_to_lattice(&w)?, -total_min));
                }
            }
        }
    }
    if halfspaces.is_empty() {
        // Zero-dimensional ambient slice cannot happen for dim >= 1 since the
        // complement then spans everything.
        return Err(Error::Inconsistent("hull produced no inequalities".into()));
    }
    Polytope::from_halfspaces(dim, halfspaces)
}

/// Euclidean volume; 0 for empty or lower-dimensional polytopes.
pub fn volume(p: &Polytope) -> Rational {
    p.volume()
}

/// Minimum, volume average and maximum of `x -> <x, u>` over `p`.
pub fn linear_stats(p: &Polytope, u: &LatticeVector) -> Result<LinearStats> {
    if u.dim() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: u.dim(),
        });
    }
    let (vol, moment) = p.volume_and_moment();
    if vol.is_zero() {
        return Err(Error::DegeneratePolytope);
    }
    let vals: Vec<Rational> = p.vertices.iter().map(|v| u.pair(v)).collect();
    Ok(LinearStats {
        min: vals.iter().min().expect("nonempty").clone(),
        mean: u.pair(&moment) / vol,
        max: vals.iter().max().expect("nonempty").clone(),
    })
}

/// All integer points of `p`.
pub fn lattice_points(p: &Polytope) -> Vec<Vec<i64>> {
    if p.is_empty() {
        return Vec::new();
    }
    let ranges: Vec<(i64, i64)> = (0..p.dim)
        .map(|j| {
            let lo = p.vertices.iter().map(|v| &v[j]).min().expect("nonempty");
            let hi = p.vertices.iter().map(|v| &v[j]).max().expect("nonempty");
            (
                ceil(lo).to_i64().expect("coordinate fits i64"),
                floor(hi).to_i64().expect("coordinate fits i64"),
            )
        })
        .collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let x: Point = cur.iter().map(|&c| int(c)).collect();
        if p.halfspaces.iter().all(|h| h.contains(&x)) {
            out.push(cur.clone());
        }
        let mut j = 0;
        loop {
            if j == p.dim {
                return out;
            }
            if cur[j] < ranges[j].1 {
                cur[j] += 1;
                break;
            }
            cur[j] = ranges[j].0;
            j += 1;
        }
    }
}

/// Polarization formula for a normalized mixed volume: given the volume of
/// every nonempty partial sum, returns `sum_S (-1)^{n-|S|} vol(sum_{i in S} P_i)`.
pub fn polarize<F>(n: usize, mut subset_volume: F) -> Result<Rational>
where
    F: FnMut(&[usize]) -> Result<Rational>,
{
    let mut total = Rational::zero();
    for mask in 1u32..(1u32 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let v = subset_volume(&subset)?;
        if (n - subset.len()).is_multiple_of(2) {
            total += v;
        } else {
            total -= v;
        }
    }
    Ok(total)
}

/// Normalized mixed volume with `MV(P, ..., P) = n! vol(P)`.
pub fn mixed_volume(polytopes: &[Polytope]) -> Result<Rational> {
    let Some(first) = polytopes.first() else {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    };
    let n = first.dim;
    if polytopes.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: polytopes.len(),
        });
    }
    if let Some(p) = polytopes.iter().find(|p| p.dim != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.dim,
        });
    }
    polarize(n, |subset| {
        let parts: Vec<&Polytope> = subset.iter().map(|&i| &polytopes[i]).collect();
        Ok(if parts.len() == 1 {
            parts[0].volume()
        } else {
            Polytope::minkowski_sum(&parts)?.volume()
        })
    })
}

impl Default for LinearStats {
    fn default() -> Self {
        Self {
            min: Rational::zero(),
            mean: Rational::zero(),
            max: Rational::zero(),
        }
    }
}
