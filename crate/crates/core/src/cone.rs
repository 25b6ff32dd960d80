//! Polyhedral proper cones.
//!
//! A [`PolyhedralCone`] carries both its generators (V-representation) and
//! its facet normals (H-representation) together with the generator/facet
//! incidence table, so every order-theoretic query reduces to evaluating a
//! handful of linear forms.
//!
//! Tolerances are relative: a facet form `h_j . x` counts as zero when
//! `|h_j . x| <= tol * max(1, |x|) * |h_j|`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_FACE_CAP: usize = 4096;

const MAX_ENUM_DIM: usize = 8;
const MAX_ENUM_GENERATORS: usize = 32;
const MAX_RAY_CHECK_SUBSETS: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Orthant,
    Simplicial,
    General,
}

/// Serializable cone description, as found in problem documents.
///
/// For `simplicial` the `generators` field holds the basis vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<f64>>>,
}

impl ConeSpec {
    pub fn orthant(dim: usize) -> Self {
        Self { kind: ConeKind::Orthant, dim, generators: None, facets: None }
    }

    pub fn simplicial(basis: Vec<Vec<f64>>) -> Self {
        let dim = basis.first().map_or(0, Vec::len);
        Self { kind: ConeKind::Simplicial, dim, generators: Some(basis), facets: None }
    }

    pub fn general(generators: Vec<Vec<f64>>, facets: Option<Vec<Vec<f64>>>) -> Self {
        let dim = generators.first().map_or(0, Vec::len);
        Self { kind: ConeKind::General, dim, generators: Some(generators), facets }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Interior,
    Boundary,
    Zero,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointClass {
    pub verdict: Verdict,
    pub min_slack: f64,
    pub active_facets: Vec<usize>,
}

impl PointClass {
    pub fn in_cone(&self) -> bool {
        self.verdict != Verdict::Outside
    }
}

/// Outcome of comparing two vectors in the cone order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    /// `x >>_K y`
    StrictlyGreater,
    /// `x >=_K y`
    Greater,
    /// `x <<_K y`
    StrictlyLess,
    /// `x <=_K y`
    Less,
    Incomparable,
}

/// A nontrivial face, identified by the facets active on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub active_facets: Vec<usize>,
    pub generator_ids: Vec<usize>,
    /// Orthonormal basis of the span of the face, stored as columns.
    pub span_basis: Matrix,
    pub is_trivial: bool,
}

impl Face {
    pub fn dim(&self) -> usize {
        self.span_basis.ncols()
    }

    /// Orthogonal projector onto the span of the face.
    pub fn projector(&self) -> Matrix {
        &self.span_basis * self.span_basis.transpose()
    }

    /// `x` lies in the face: it is in the cone and annihilates every active facet.
    pub fn contains(&self, cone: &PolyhedralCone, x: &Vector) -> bool {
        let scale = x.norm().max(1.0);
        cone.contains(x)
            && self
                .active_facets
                .iter()
                .all(|&j| cone.facets[j].dot(x).abs() <= cone.threshold(j, scale))
    }
}

/// Unit functional `phi` that is strictly positive on `K \ {0}`.
///
/// `phi` is the normalized sum of the facet normals; the compact base is
/// the slice `{x in K : (sum_j h_j) . x = 1}`, which for the orthant is the
/// standard simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactBase {
    pub functional: Vector,
    /// Norm of the facet sum, so that `scale * phi = sum_j h_j`.
    pub scale: f64,
}

impl CompactBase {
    /// Value of the base hyperplane form at `x` (equals 1 on the base).
    pub fn level(&self, x: &Vector) -> f64 {
        self.scale * self.functional.dot(x)
    }

    pub fn base_point(&self, g: &Vector) -> Vector {
        g / self.level(g)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralCone {
    pub dim: usize,
    pub generators: Vec<Vector>,
    pub facets: Vec<Vector>,
    /// `incidence[i][j]` is true iff generator `i` lies on facet `j`.
    pub incidence: Vec<Vec<bool>>,
    pub kind: ConeKind,
    pub tol: f64,
    facet_norms: Vec<f64>,
    /// Inverse of the generator matrix, present for simplicial cones.
    coords: Option<Matrix>,
}

pub fn construct_cone(spec: &ConeSpec) -> Result<PolyhedralCone> {
    PolyhedralCone::from_spec(spec, DEFAULT_TOL)
}

impl PolyhedralCone {
    pub fn orthant(dim: usize) -> Self {
        let e: Vec<Vector> = (0..dim).map(|i| unit(dim, i)).collect();
        Self::assemble(dim, e.clone(), e, ConeKind::Orthant, DEFAULT_TOL, Some(linalg::identity(dim)))
    }

    pub fn simplicial(basis: &[Vec<f64>]) -> Result<Self> {
        Self::from_spec(&ConeSpec::simplicial(basis.to_vec()), DEFAULT_TOL)
    }

    pub fn general(generators: &[Vec<f64>], facets: Option<&[Vec<f64>]>) -> Result<Self> {
        Self::from_spec(
            &ConeSpec::general(generators.to_vec(), facets.map(<[Vec<f64>]>::to_vec)),
            DEFAULT_TOL,
        )
    }

    pub fn from_spec(spec: &ConeSpec, tol: f64) -> Result<Self> {
        let n = spec.dim;
        if n == 0 {
            return Err(Error::Inconsistent("cone dimension must be positive".into()));
        }
        let mut cone = match spec.kind {
            ConeKind::Orthant => Self::orthant(n),
            ConeKind::Simplicial => {
                let basis = vectors(n, spec.generators.as_deref().unwrap_or(&[]), "generator")?;
                Self::build_simplicial(n, basis, ConeKind::Simplicial, tol)?
            }
            ConeKind::General => {
                let gens = vectors(n, spec.generators.as_deref().unwrap_or(&[]), "generator")?;
                match &spec.facets {
                    Some(f) => {
                        let facets = vectors(n, f, "facet")?;
                        Self::build_general(n, gens, facets, tol)?
                    }
                    None => {
                        let facets = enumerate_facets(n, &gens, tol)?;
                        Self::build_general(n, gens, facets, tol)?
                    }
                }
            }
        };
        cone.tol = tol;
        Ok(cone)
    }

    fn build_simplicial(n: usize, basis: Vec<Vector>, kind: ConeKind, tol: f64) -> Result<Self> {
        if basis.len() != n {
            return Err(Error::Inconsistent(format!(
                "simplicial cone in R^{n} needs exactly {n} basis vectors, got {}",
                basis.len()
            )));
        }
        let g = linalg::columns_to_matrix(n, &basis);
        if linalg::rank(&g, 1e-12) < n {
            return Err(Error::NotFull { reason: "simplicial basis is linearly dependent".into() });
        }
        let inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotFull { reason: "generator matrix is singular".into() })?;
        let facets: Vec<Vector> = (0..n).map(|j| inv.row(j).transpose()).collect();
        Ok(Self::assemble(n, basis, facets, kind, tol, Some(inv)))
    }

    fn build_general(n: usize, gens: Vec<Vector>, facets: Vec<Vector>, tol: f64) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Inconsistent("no generators".into()));
        }
        for (a, ga) in gens.iter().enumerate() {
            for (b, gb) in gens.iter().enumerate().skip(a + 1) {
                let c = ga.dot(gb) / (ga.norm() * gb.norm());
                if c > 1.0 - 1e-12 {
                    return Err(Error::Inconsistent(format!(
                        "generators {a} and {b} are parallel"
                    )));
                }
            }
        }
        let fm = linalg::columns_to_matrix(n, &facets).transpose();
        let r = linalg::rank(&fm, 1e-12);
        if r < n {
            return Err(Error::NotPointed { dim: n, rank: r });
        }
        for (i, g) in gens.iter().enumerate() {
            let scale = g.norm().max(1.0);
            for (j, h) in facets.iter().enumerate() {
                let s = h.dot(g);
                if s < -tol * scale * h.norm() {
                    return Err(Error::Inconsistent(format!(
                        "generator {i} violates facet {j} (slack {s:e})"
                    )));
                }
            }
        }
        let interior: Vector = gens.iter().fold(Vector::zeros(n), |acc, g| acc + g / g.norm());
        for (j, h) in facets.iter().enumerate() {
            if h.dot(&interior) <= tol * interior.norm().max(1.0) * h.norm() {
                return Err(Error::NotFull {
                    reason: format!("facet {j} is tight on every generator"),
                });
            }
        }
        if gens.len() == n && linalg::rank(&linalg::columns_to_matrix(n, &gens), 1e-12) == n {
            // n independent extreme rays: simplicial, provided the facets agree
            let cone = Self::build_simplicial(n, gens, ConeKind::Simplicial, tol)?;
            let parallel = |a: &Vector, b: &Vector| a.dot(b) / (a.norm() * b.norm()) > 1.0 - 1e-9;
            let agree = facets.len() == n
                && facets.iter().all(|f| cone.facets.iter().any(|h| parallel(f, h)));
            if !agree {
                return Err(Error::Inconsistent(
                    "facets do not match the simplicial cone spanned by the generators".into(),
                ));
            }
            return Ok(cone);
        }
        let cone = Self::assemble(n, gens, facets, ConeKind::General, tol, None);
        cone.check_facets_and_rays()?;
        Ok(cone)
    }

    fn assemble(
        dim: usize,
        generators: Vec<Vector>,
        facets: Vec<Vector>,
        kind: ConeKind,
        tol: f64,
        coords: Option<Matrix>,
    ) -> Self {
        let facet_norms: Vec<f64> = facets.iter().map(|h| h.norm()).collect();
        let incidence = generators
            .iter()
            .map(|g| {
                let scale = g.norm().max(1.0);
                facets
                    .iter()
                    .zip(&facet_norms)
                    .map(|(h, hn)| h.dot(g).abs() <= tol * scale * hn)
                    .collect()
            })
            .collect();
        Self { dim, generators, facets, incidence, kind, tol, facet_norms, coords }
    }

    /// Every facet is tight on `n-1` independent generators, every
    /// generator is an extreme ray, and every extreme ray of the
    /// H-description is among the generators.
    fn check_facets_and_rays(&self) -> Result<()> {
        let n = self.dim;
        if n < 2 {
            return Ok(());
        }
        for j in 0..self.facets.len() {
            let tight: Vec<Vector> = self
                .generators
                .iter()
                .enumerate()
                .filter(|(i, _)| self.incidence[*i][j])
                .map(|(_, g)| g.clone())
                .collect();
            let m = linalg::columns_to_matrix(n, &tight);
            if tight.len() < n - 1 || linalg::rank(&m, 1e-9) < n - 1 {
                return Err(Error::Inconsistent(format!("facet {j} does not define a facet")));
            }
        }
        for i in 0..self.generators.len() {
            let active: Vec<Vector> = (0..self.facets.len())
                .filter(|&j| self.incidence[i][j])
                .map(|j| self.facets[j].clone())
                .collect();
            let m = linalg::columns_to_matrix(n, &active);
            if active.len() < n - 1 || linalg::rank(&m, 1e-9) < n - 1 {
                return Err(Error::Inconsistent(format!("generator {i} is not an extreme ray")));
            }
        }
        let m = self.facets.len();
        if linalg::count_subsets(m, n - 1) > MAX_RAY_CHECK_SUBSETS {
            return Ok(());
        }
        let mut missing = None;
        linalg::for_each_subset(m, n - 1, |subset| {
            let rows: Vec<Vector> = subset.iter().map(|&j| self.facets[j].clone()).collect();
            let a = linalg::columns_to_matrix(n, &rows).transpose();
            let ns = linalg::null_space(&a, 1e-10);
            if ns.ncols() != 1 {
                return true;
            }
            let r: Vector = ns.column(0).into_owned();
            for cand in [r.clone(), -r] {
                if self.contains(&cand) {
                    let known = self.generators.iter().any(|g| {
                        g.dot(&cand) / (g.norm() * cand.norm()) > 1.0 - 1e-8
                    });
                    if !known {
                        missing = Some(cand);
                        return false;
                    }
                }
            }
            true
        });
        if let Some(r) = missing {
            return Err(Error::Inconsistent(format!(
                "extreme ray {:?} of the facet description is not a generator",
                r.as_slice()
            )));
        }
        Ok(())
    }

    pub fn spec(&self) -> ConeSpec {
        let rows = |vs: &[Vector]| vs.iter().map(|v| v.iter().copied().collect()).collect();
        match self.kind {
            ConeKind::Orthant => ConeSpec::orthant(self.dim),
            ConeKind::Simplicial => ConeSpec::simplicial(rows(&self.generators)),
            ConeKind::General => ConeSpec::general(rows(&self.generators), Some(rows(&self.facets))),
        }
    }

    pub fn is_simplicial(&self) -> bool {
        self.coords.is_some()
    }

    pub(crate) fn threshold(&self, facet: usize, scale: f64) -> f64 {
        self.tol * scale * self.facet_norms[facet]
    }

    pub fn slacks(&self, x: &Vector) -> Vec<f64> {
        self.facets.iter().map(|h| h.dot(x)).collect()
    }

    pub fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    pub fn classify_point(&self, x: &Vector) -> PointClass {
        let norm = x.norm();
        let scale = norm.max(1.0);
        let slacks = self.slacks(x);
        let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
        if norm <= self.tol {
            return PointClass {
                verdict: Verdict::Zero,
                min_slack,
                active_facets: (0..self.facets.len()).collect(),
            };
        }
        let mut outside = false;
        let mut active = Vec::new();
        for (j, &s) in slacks.iter().enumerate() {
            let thr = self.threshold(j, scale);
            if s < -thr {
                outside = true;
            } else if s <= thr {
                active.push(j);
            }
        }
        let verdict = if outside {
            Verdict::Outside
        } else if active.is_empty() {
            Verdict::Interior
        } else {
            Verdict::Boundary
        };
        PointClass { verdict, min_slack, active_facets: active }
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.classify_point(x).in_cone()
    }

    pub fn is_interior(&self, x: &Vector) -> bool {
        self.classify_point(x).verdict == Verdict::Interior
    }

    pub fn sum_of_generators(&self) -> Vector {
        self.generators.iter().fold(Vector::zeros(self.dim), |acc, g| acc + g)
    }

    pub fn compact_base(&self) -> Result<CompactBase> {
        let sum: Vector = self.facets.iter().fold(Vector::zeros(self.dim), |acc, h| acc + h);
        let scale = sum.norm();
        let functional = &sum / scale;
        for (i, g) in self.generators.iter().enumerate() {
            if functional.dot(g) <= self.tol * g.norm() {
                return Err(Error::DegenerateBase { generator: i });
            }
        }
        Ok(CompactBase { functional, scale })
    }

    /// Generators rescaled onto the compact base; the base is their convex hull.
    pub fn base_points(&self) -> Result<Vec<Vector>> {
        let base = self.compact_base()?;
        Ok(self.generators.iter().map(|g| base.base_point(g)).collect())
    }

    pub fn enumerate_faces(&self) -> Result<Vec<Face>> {
        self.enumerate_faces_capped(DEFAULT_FACE_CAP)
    }

    /// Every nontrivial face exactly once. Faces are intersections of
    /// facets, so the generator sets are closed under intersection with the
    /// facet generator sets; the search runs over that closure.
    pub fn enumerate_faces_capped(&self, cap: usize) -> Result<Vec<Face>> {
        let m = self.facets.len();
        let facet_sets: Vec<BTreeSet<usize>> = (0..m)
            .map(|j| (0..self.generators.len()).filter(|&i| self.incidence[i][j]).collect())
            .collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::new();
        for s in &facet_sets {
            if !s.is_empty() && seen.insert(s.iter().copied().collect()) {
                queue.push_back(s.clone());
            }
        }
        while let Some(s) = queue.pop_front() {
            if seen.len() > cap {
                return Err(Error::FaceCap { cap });
            }
            for f in &facet_sets {
                let t: BTreeSet<usize> = s.intersection(f).copied().collect();
                if !t.is_empty() && seen.insert(t.iter().copied().collect()) {
                    queue.push_back(t);
                }
            }
        }
        if seen.len() > cap {
            return Err(Error::FaceCap { cap });
        }
        let mut sets: Vec<Vec<usize>> = seen.into_iter().collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(sets.into_iter().map(|ids| self.face_from_generators(ids)).collect())
    }

    fn face_from_generators(&self, generator_ids: Vec<usize>) -> Face {
        let active_facets: Vec<usize> = (0..self.facets.len())
            .filter(|&j| generator_ids.iter().all(|&i| self.incidence[i][j]))
            .collect();
        let gens: Vec<Vector> = generator_ids.iter().map(|&i| self.generators[i].clone()).collect();
        let span_basis = linalg::orthonormal_basis(self.dim, &gens, 1e-10);
        let is_trivial = generator_ids.is_empty() || generator_ids.len() == self.generators.len();
        Face { active_facets, generator_ids, span_basis, is_trivial }
    }

    pub fn order_compare(&self, x: &Vector, y: &Vector) -> Relation {
        let d = x - y;
        let fwd = self.classify_point(&d);
        if fwd.verdict == Verdict::Zero {
            return Relation::Equal;
        }
        match fwd.verdict {
            Verdict::Interior => return Relation::StrictlyGreater,
            Verdict::Boundary => return Relation::Greater,
            _ => {}
        }
        match self.classify_point(&(-d)).verdict {
            Verdict::Interior => Relation::StrictlyLess,
            Verdict::Boundary => Relation::Less,
            _ => Relation::Incomparable,
        }
    }

    /// Coordinates of `x` in the generator basis (simplicial cones only).
    pub fn coordinates(&self, x: &Vector) -> Result<Vector> {
        let c = self.coords.as_ref().ok_or(Error::NotSimplicial)?;
        Ok(c * x)
    }

    fn combine(&self, lambda: &Vector) -> Vector {
        self.generators
            .iter()
            .zip(lambda.iter())
            .fold(Vector::zeros(self.dim), |acc, (g, l)| acc + g * *l)
    }

    /// Lattice absolute value `|x|_K = max_K(x, -x)`.
    pub fn lattice_abs(&self, x: &Vector) -> Result<Vector> {
        let lambda = self.coordinates(x)?;
        Ok(self.combine(&lambda.map(f64::abs)))
    }

    pub fn lattice_max(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let lx = self.coordinates(x)?;
        let ly = self.coordinates(y)?;
        Ok(self.combine(&lx.zip_map(&ly, f64::max)))
    }

    /// Supremal `delta` with `delta * x <<_K y` for every base point `x`
    /// and every `y` in `points`.
    pub fn uniform_domination_delta(&self, points: &[Vector]) -> Result<f64> {
        let base = self.base_points()?;
        let max_on_base: Vec<f64> = self
            .facets
            .iter()
            .map(|h| base.iter().map(|b| h.dot(b)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let mut delta = f64::INFINITY;
        for (k, y) in points.iter().enumerate() {
            self.check_dim(y)?;
            if !self.is_interior(y) {
                return Err(Error::NotInterior { index: k });
            }
            for (h, mx) in self.facets.iter().zip(&max_on_base) {
                delta = delta.min(h.dot(y) / mx);
            }
        }
        Ok(delta)
    }
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

fn vectors(n: usize, rows: &[Vec<f64>], what: &str) -> Result<Vec<Vector>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::Inconsistent(format!("{what} {i} has a non-finite entry")));
            }
            let v = Vector::from_column_slice(r);
            if v.norm() == 0.0 {
                return Err(Error::Inconsistent(format!("{what} {i} is zero")));
            }
            Ok(v)
        })
        .collect()
}

/// Supporting hyperplanes through every `(n-1)`-subset of generators.
fn enumerate_facets(n: usize, gens: &[Vector], tol: f64) -> Result<Vec<Vector>> {
    if n > MAX_ENUM_DIM || gens.len() > MAX_ENUM_GENERATORS {
        return Err(Error::DimensionLimit { dim: n, generators: gens.len() });
    }
    let mut facets: Vec<Vector> = Vec::new();
    linalg::for_each_subset(gens.len(), n - 1, |subset| {
        let rows: Vec<Vector> = subset.iter().map(|&i| gens[i].clone()).collect();
        let a = linalg::columns_to_matrix(n, &rows).transpose();
        let ns = linalg::null_space(&a, 1e-10);
        if ns.ncols() != 1 {
            return true;
        }
        let h: Vector = ns.column(0).into_owned();
        let slack = |h: &Vector| {
            gens.iter().all(|g| h.dot(g) >= -tol * g.norm().max(1.0))
        };
        let oriented = if slack(&h) {
            h
        } else if slack(&(-&h)) {
            -h
        } else {
            return true;
        };
        if !facets.iter().any(|f| (f - &oriented).norm() < 1e-8) {
            facets.push(oriented);
        }
        true
    });
    Ok(facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn skew() -> PolyhedralCone {
        PolyhedralCone::simplicial(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn orthant_generators_and_facets() {
        let k = construct_cone(&ConeSpec::orthant(2)).unwrap();
        assert_eq!(k.generators, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])]);
        assert_eq!(k.facets, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])]);
        assert_eq!(k.kind, ConeKind::Orthant);
    }

    #[test]
    fn simplicial_facets_from_inverse() {
        // G = [[1,1],[0,1]] has inverse [[1,-1],[0,1]]
        let k = skew();
        assert!((&k.facets[0] - v(&[1.0, -1.0])).norm() < 1e-14);
        assert!((&k.facets[1] - v(&[0.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn inconsistent_general_cone() {
        let r = PolyhedralCone::general(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            Some(&[vec![1.0, 0.0], vec![0.0, -1.0]]),
        );
        assert!(matches!(r, Err(Error::Inconsistent(_))));
    }

    #[test]
    fn not_pointed_and_dimension_limit() {
        let r = PolyhedralCone::general(
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            Some(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]),
        );
        assert!(matches!(r, Err(Error::NotPointed { dim: 3, rank: 2 })));
        let gens: Vec<Vec<f64>> = (0..9)
            .map(|i| {
                let mut g = vec![1.0; 9];
                g[i] = 2.0;
                g
            })
            .collect();
        let r = PolyhedralCone::general(&gens, None);
        assert!(matches!(r, Err(Error::DimensionLimit { dim: 9, .. })));
    }

    #[test]
    fn general_cone_with_enumerated_facets() {
        // square-based pyramid over (+-1, +-1, 1)
        let gens = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0],
            vec![-1.0, -1.0, 1.0],
            vec![-1.0, 1.0, 1.0],
        ];
        let k = PolyhedralCone::general(&gens, None).unwrap();
        assert_eq!(k.kind, ConeKind::General);
        assert_eq!(k.facets.len(), 4);
        for (i, g) in k.generators.iter().enumerate() {
            assert_eq!(k.incidence[i].iter().filter(|&&b| b).count(), 2);
            assert!(k.contains(g));
        }
        assert!(k.is_interior(&v(&[0.0, 0.0, 1.0])));
        assert!(!k.contains(&v(&[0.0, 0.0, -1.0])));
        // 4 rays and 4 two-dimensional faces
        let faces = k.enumerate_faces().unwrap();
        assert_eq!(faces.len(), 8);
        assert_eq!(faces.iter().filter(|f| f.dim() == 1).count(), 4);
    }

    #[test]
    fn missing_extreme_ray_is_rejected() {
        let gens = vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 1.0], vec![-1.0, -1.0, 1.0]];
        let facets = vec![
            vec![0.0, -1.0, 1.0],
            vec![-1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
        ];
        assert!(PolyhedralCone::general(&gens, Some(&facets)).is_err());
    }

    #[test]
    fn classify_examples() {
        let k = PolyhedralCone::orthant(2);
        assert_eq!(k.classify_point(&v(&[1.0, 1.0])).verdict, Verdict::Interior);
        let c = k.classify_point(&v(&[1.0, 0.0]));
        assert_eq!(c.verdict, Verdict::Boundary);
        assert_eq!(c.active_facets, vec![1]);
        assert_eq!(k.classify_point(&v(&[0.0, 0.0])).verdict, Verdict::Zero);
        assert_eq!(k.classify_point(&v(&[-1.0, 2.0])).verdict, Verdict::Outside);
        let c = skew().classify_point(&v(&[2.0, 1.0]));
        assert_eq!(c.verdict, Verdict::Interior);
        assert_eq!(skew().slacks(&v(&[2.0, 1.0])), vec![1.0, 1.0]);
    }

    #[test]
    fn base_functionals() {
        let b = PolyhedralCone::orthant(2).compact_base().unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((&b.functional - v(&[s, s])).norm() < 1e-15);
        let b = skew().compact_base().unwrap();
        assert!((&b.functional - v(&[1.0, 0.0])).norm() < 1e-15);
        let b = PolyhedralCone::orthant(3).compact_base().unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((&b.functional - v(&[s, s, s])).norm() < 1e-15);
    }

    #[test]
    fn faces_of_small_cones() {
        let faces = PolyhedralCone::orthant(2).enumerate_faces().unwrap();
        assert_eq!(faces.len(), 2);
        assert_eq!(faces[0].generator_ids, vec![0]);
        assert_eq!(faces[0].active_facets, vec![1]);
        assert_eq!(faces[1].generator_ids, vec![1]);
        let faces = PolyhedralCone::orthant(3).enumerate_faces().unwrap();
        assert_eq!(faces.len(), 6);
        assert_eq!(faces.iter().filter(|f| f.dim() == 1).count(), 3);
        assert_eq!(faces.iter().filter(|f| f.dim() == 2).count(), 3);
        let faces = skew().enumerate_faces().unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.active_facets.len() == 1 && !f.is_trivial));
        assert!(PolyhedralCone::orthant(4).enumerate_faces_capped(3).is_err());
        assert!(PolyhedralCone::orthant(1).enumerate_faces().unwrap().is_empty());
    }

    #[test]
    fn order_relations() {
        let k = PolyhedralCone::orthant(2);
        assert_eq!(k.order_compare(&v(&[1.0, 1.0]), &v(&[0.0, 0.0])), Relation::StrictlyGreater);
        assert_eq!(k.order_compare(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])), Relation::Incomparable);
        assert_eq!(k.order_compare(&v(&[0.0, 0.0]), &v(&[1.0, 1.0])), Relation::StrictlyLess);
        assert_eq!(k.order_compare(&v(&[1.0, 2.0]), &v(&[1.0, 2.0])), Relation::Equal);
        assert_eq!(skew().order_compare(&v(&[2.0, 1.0]), &v(&[1.0, 1.0])), Relation::Greater);
    }

    #[test]
    fn lattice_examples() {
        let k = PolyhedralCone::orthant(2);
        assert_eq!(k.lattice_abs(&v(&[-1.0, 2.0])).unwrap(), v(&[1.0, 2.0]));
        let s = skew();
        assert_eq!(s.coordinates(&v(&[0.0, -1.0])).unwrap(), v(&[1.0, -1.0]));
        assert_eq!(s.lattice_abs(&v(&[0.0, -1.0])).unwrap(), v(&[2.0, 1.0]));
        assert_eq!(s.lattice_abs(&v(&[3.0, 1.0])).unwrap(), v(&[3.0, 1.0]));
        let pyramid = PolyhedralCone::general(
            &[vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 1.0], vec![-1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0]],
            None,
        )
        .unwrap();
        assert_eq!(pyramid.lattice_abs(&v(&[0.0, 0.0, 1.0])), Err(Error::NotSimplicial));
    }

    #[test]
    fn domination_delta_examples() {
        let k = PolyhedralCone::orthant(2);
        assert!((k.uniform_domination_delta(&[v(&[1.0, 1.0])]).unwrap() - 1.0).abs() < 1e-15);
        assert!((k.uniform_domination_delta(&[v(&[2.0, 3.0])]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(
            k.uniform_domination_delta(&[v(&[1.0, 1.0]), v(&[1.0, 0.0])]),
            Err(Error::NotInterior { index: 1 })
        );
        // 0.5 x << (1,1) for every base point x
        for b in k.base_points().unwrap() {
            assert!(k.is_interior(&(v(&[1.0, 1.0]) - b * 0.5)));
        }
    }

    #[test]
    fn spec_roundtrip() {
        let k = skew();
        let again = PolyhedralCone::from_spec(&k.spec(), k.tol).unwrap();
        assert_eq!(again.facets, k.facets);
    }
}
