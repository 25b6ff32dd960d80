//! K-irreducibility of single matrices, exponentials and families.

use nalgebra::Complex;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cone::{Face, PolyhedralCone};
use crate::error::{Error, Result};
use crate::expm::matrix_exponential;
use crate::linalg::{self, eigenvalues, identity, matrix_power, Matrix, Vector};
use crate::maps::{is_cone_preserving, is_cross_positive};
use crate::semigroup::{MatrixFamily, Semantics};

/// Sample times used to build the closure family of a jump system.
pub const JUMP_SAMPLE_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IrrVerdict {
    Irreducible,
    Reducible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IrrMethod {
    IR1,
    IR2,
    #[serde(rename = "face_scan")]
    FaceScan,
    #[serde(rename = "lemma22")]
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceMode {
    Face,
    Span,
}

/// Serializable identity of a face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceRef {
    pub active_facets: Vec<usize>,
    pub generator_ids: Vec<usize>,
}

impl From<&Face> for FaceRef {
    fn from(f: &Face) -> Self {
        Self { active_facets: f.active_facets.clone(), generator_ids: f.generator_ids.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceWitness {
    pub face: FaceRef,
    pub witness_matrix: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub method: String,
    /// `None` when the check could not be run.
    pub verdict: Option<IrrVerdict>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrreducibilityReport {
    pub verdict: IrrVerdict,
    pub method: IrrMethod,
    pub invariant_face: Option<FaceRef>,
    pub boundary_eigenvector: Option<(Vec<f64>, f64)>,
    pub face_witnesses: Vec<FaceWitness>,
    pub cross_checks: Vec<CrossCheck>,
    pub heuristic: bool,
}

impl IrreducibilityReport {
    pub fn is_irreducible(&self) -> bool {
        self.verdict == IrrVerdict::Irreducible
    }

    pub fn certificate_json(&self) -> serde_json::Value {
        json!({
            "verdict": self.verdict,
            "method": self.method,
            "heuristic": self.heuristic,
            "faces": self.face_witnesses.iter().map(|w| json!({
                "active_facets": w.face.active_facets,
                "generator_ids": w.face.generator_ids,
                "witness_matrix": w.witness_matrix,
            })).collect::<Vec<_>>(),
            "invariant_face": self.invariant_face,
            "boundary_eigenvector": self.boundary_eigenvector.as_ref().map(|(v, l)| json!({
                "vector": v,
                "eigenvalue": l,
            })),
            "cross_checks": self.cross_checks,
        })
    }
}

/// Result of the search for an eigenvector on the boundary of the cone.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySearch {
    pub found: Option<(Vector, f64)>,
    pub skipped_complex: usize,
}

/// Real eigenvalue candidate with the accuracy expected of its eigenvector.
struct RealEigen {
    value: f64,
    /// Slack tolerance for deciding that the eigenvector lies on a facet.
    tau: f64,
}

/// Distinct real eigenvalues, with near-real ones rounded to the real axis.
///
/// Defective eigenvalues come back from the solver as a small ring of
/// values of radius about `eps^(1/k)`; the real centres of such clusters
/// are added as candidates too. Eigenvectors of clustered eigenvalues are
/// only accurate to roughly `eps / gap`, which sets their slack tolerance.
fn real_eigenvalues(a: &Matrix, tol: f64) -> Result<(Vec<RealEigen>, usize)> {
    let ev = eigenvalues(a)?;
    let n = ev.len().max(1);
    let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let link = 10.0 * scale * f64::EPSILON.powf(1.0 / n as f64);
    let mut cluster: Vec<usize> = (0..ev.len()).collect();
    for i in 0..ev.len() {
        for j in 0..i {
            if (ev[i] - ev[j]).norm() <= link {
                let (ci, cj) = (cluster[i], cluster[j]);
                cluster.iter_mut().filter(|c| **c == ci).for_each(|c| *c = cj);
            }
        }
    }
    let tau_for = |z: Complex<f64>| {
        let gap = ev.iter().map(|w| (w - z).norm()).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
        let radius = ev.iter().map(|w| (w - z).norm()).filter(|d| *d <= link).fold(0.0, f64::max);
        (100.0 * f64::EPSILON * scale / gap).max(10.0 * radius).max(tol).min(1e-5)
    };
    let mut reals: Vec<RealEigen> = Vec::new();
    let push = |z: Complex<f64>, reals: &mut Vec<RealEigen>| {
        if !reals.iter().any(|r| (r.value - z.re).abs() <= 1e-8 * scale) {
            reals.push(RealEigen { value: z.re, tau: tau_for(z) });
        }
    };
    let mut skipped = 0;
    for z in &ev {
        if z.im.abs() > 1e-6 * scale {
            skipped += 1;
        } else {
            push(*z, &mut reals);
        }
    }
    let mut roots: Vec<usize> = cluster.clone();
    roots.sort_unstable();
    roots.dedup();
    for c in roots {
        let members: Vec<Complex<f64>> = ev.iter().zip(&cluster).filter(|(_, k)| **k == c).map(|(z, _)| *z).collect();
        if members.len() < 2 {
            continue;
        }
        let mean = members.iter().sum::<Complex<f64>>() / members.len() as f64;
        if mean.im.abs() <= 1e-6 * scale {
            push(Complex::new(mean.re, 0.0), &mut reals);
        }
    }
    Ok((reals, skipped))
}

/// `x` (unit length) lies in the cone and on one of its facets, up to `tau`.
fn on_boundary(cone: &PolyhedralCone, x: &Vector, tau: f64) -> bool {
    let min = cone.facets.iter().map(|h| h.dot(x) / h.norm()).fold(f64::INFINITY, f64::min);
    min >= -tau && min <= tau
}

/// Eigenvector of `a` on the boundary of the cone, if one exists.
///
/// For each real eigenvalue the extreme rays of `ker(A - lambda I) ∩ K` are
/// enumerated; the matrix has a boundary eigenvector exactly when one of them
/// touches a facet.
pub fn boundary_eigenvector(a: &Matrix, cone: &PolyhedralCone) -> Result<BoundarySearch> {
    let n = cone.dim;
    let (reals, skipped_complex) = real_eigenvalues(a, cone.tol)?;
    let scale = linalg::spectral_norm(a).max(1.0);
    for RealEigen { value: lambda, tau } in reals {
        let shifted = a - identity(n) * lambda;
        let mut basis = linalg::null_space(&shifted, 1e-7);
        if basis.ncols() == 0 {
            let sv = shifted.clone().svd(false, true);
            let (imin, _) = sv.singular_values.argmin();
            let v_t = sv.v_t.expect("v_t requested");
            basis = Matrix::from_column_slice(n, 1, v_t.row(imin).transpose().as_slice());
        }
        let d = basis.ncols();
        let mut candidates: Vec<Vector> = Vec::new();
        if d == 1 {
            candidates.push(basis.column(0).into_owned());
        } else {
            let rows: Vec<Vector> = cone.facets.iter().map(|h| basis.transpose() * h).collect();
            linalg::for_each_subset(rows.len(), d - 1, |subset| {
                let sub = Matrix::from_fn(d - 1, d, |i, j| rows[subset[i]][j]);
                let ns = linalg::null_space(&sub, 1e-10);
                if ns.ncols() == 1 {
                    candidates.push(&basis * ns.column(0));
                }
                true
            });
        }
        for c in candidates {
            for sign in [1.0, -1.0] {
                let x = &c * sign / c.norm();
                let residual = (a * &x - &x * lambda).norm();
                if residual > 1e-6 * scale {
                    continue;
                }
                if on_boundary(cone, &x, tau) {
                    return Ok(BoundarySearch { found: Some((x, lambda)), skipped_complex });
                }
            }
        }
    }
    Ok(BoundarySearch { found: None, skipped_complex })
}

fn face_invariant(a: &Matrix, cone: &PolyhedralCone, face: &Face) -> bool {
    face.generator_ids.iter().all(|&i| face.contains(cone, &(a * &cone.generators[i])))
}

fn span_invariant(a: &Matrix, face: &Face, tol: f64) -> bool {
    let p = face.projector();
    let leak = (identity(p.nrows()) - &p) * a * &p;
    linalg::spectral_norm(&leak) <= tol * linalg::spectral_norm(a).max(1.0)
}

fn preserving_or_err(a: &Matrix, cone: &PolyhedralCone, matrix: usize) -> Result<()> {
    let c = is_cone_preserving(a, cone)?;
    match c.witness {
        Some(w) => Err(Error::NotConePreserving { matrix, generator: w.generator, facet: w.facet }),
        None => Ok(()),
    }
}

fn cross_positive_or_err(a: &Matrix, cone: &PolyhedralCone, matrix: usize) -> Result<()> {
    let c = is_cross_positive(a, cone)?;
    match c.witness {
        Some(w) => Err(Error::NotCrossPositive { matrix, generator: w.generator, facet: w.facet }),
        None => Ok(()),
    }
}

fn span_tol(cone: &PolyhedralCone) -> f64 {
    (cone.tol * 1e3).max(1e-8)
}

/// Nontrivial faces left invariant by `a`: `A F ⊂ F` in face mode, `A H_F ⊂ H_F` in span mode.
pub fn invariant_faces(a: &Matrix, cone: &PolyhedralCone, mode: FaceMode) -> Result<Vec<Face>> {
    if mode == FaceMode::Face {
        preserving_or_err(a, cone, 0)?;
    }
    let tol = span_tol(cone);
    Ok(cone
        .enumerate_faces()?
        .into_par_iter()
        .filter(|f| match mode {
            FaceMode::Face => face_invariant(a, cone, f),
            FaceMode::Span => span_invariant(a, f, tol),
        })
        .collect())
}

fn verdict_of(irreducible: bool) -> IrrVerdict {
    if irreducible {
        IrrVerdict::Irreducible
    } else {
        IrrVerdict::Reducible
    }
}

/// Minimal slack of `(I+A)^{n-1} g` over the generators, relative to the image size.
pub fn ir2_margin(a: &Matrix, cone: &PolyhedralCone) -> f64 {
    let n = cone.dim;
    let p = matrix_power(&(identity(n) + a), n.saturating_sub(1));
    cone.generators
        .iter()
        .map(|g| {
            let y = &p * g;
            let s = cone
                .facets
                .iter()
                .map(|h| h.dot(&y) / h.norm())
                .fold(f64::INFINITY, f64::min);
            s / y.norm().max(f64::MIN_POSITIVE)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Single-matrix irreducibility: `(I+A)^{n-1}` maps every generator into the
/// interior. The eigenvector test, the base-point test and the face scan
/// must agree with it.
pub fn is_irreducible_single(a: &Matrix, cone: &PolyhedralCone) -> Result<IrreducibilityReport> {
    preserving_or_err(a, cone, 0)?;
    let n = cone.dim;
    let p = matrix_power(&(identity(n) + a), n.saturating_sub(1));
    let ir2 = cone.generators.iter().all(|g| cone.is_interior(&(&p * g)));
    let mut checks = vec![CrossCheck {
        method: "IR2".into(),
        verdict: Some(verdict_of(ir2)),
        note: format!("(I+A)^{} applied to {} generators", n.saturating_sub(1), cone.generators.len()),
    }];
    let mut conflicts = Vec::new();

    match cone.base_points() {
        Ok(points) => {
            let ir3 = points.iter().all(|b| cone.is_interior(&(&p * b)));
            checks.push(CrossCheck {
                method: "IR3".into(),
                verdict: Some(verdict_of(ir3)),
                note: format!("{} base points", points.len()),
            });
            if ir3 != ir2 {
                conflicts.push("IR3");
            }
        }
        Err(e) => checks.push(CrossCheck { method: "IR3".into(), verdict: None, note: e.to_string() }),
    }

    let search = boundary_eigenvector(a, cone);
    let mut eigen = None;
    match &search {
        Ok(s) => {
            let ir1 = s.found.is_none();
            checks.push(CrossCheck {
                method: "IR1".into(),
                verdict: Some(verdict_of(ir1)),
                note: format!("{} complex eigenvalues skipped", s.skipped_complex),
            });
            if ir1 != ir2 {
                conflicts.push("IR1");
            }
            eigen = s.found.clone();
        }
        Err(e) => checks.push(CrossCheck { method: "IR1".into(), verdict: None, note: e.to_string() }),
    }

    let mut invariant = None;
    match cone.enumerate_faces() {
        Ok(faces) => {
            let inv: Vec<&Face> = faces.iter().filter(|f| face_invariant(a, cone, f)).collect();
            let scan = inv.is_empty();
            checks.push(CrossCheck {
                method: "face_scan".into(),
                verdict: Some(verdict_of(scan)),
                note: format!("{} of {} faces invariant", inv.len(), faces.len()),
            });
            if scan != ir2 {
                conflicts.push("face_scan");
            }
            invariant = inv.first().map(|f| FaceRef::from(*f));
        }
        Err(e) => checks.push(CrossCheck { method: "face_scan".into(), verdict: None, note: e.to_string() }),
    }

    if !conflicts.is_empty() {
        return Err(Error::ToleranceConflict(format!(
            "IR2 says {:?} but {} disagree",
            verdict_of(ir2),
            conflicts.join(", ")
        )));
    }
    let (invariant_face, boundary_eigenvector) = if ir2 {
        (None, None)
    } else if invariant.is_some() {
        (invariant, None)
    } else {
        (None, eigen.map(|(v, l)| (v.iter().copied().collect(), l)))
    };
    Ok(IrreducibilityReport {
        verdict: verdict_of(ir2),
        method: IrrMethod::IR2,
        invariant_face,
        boundary_eigenvector,
        face_witnesses: Vec::new(),
        cross_checks: checks,
        heuristic: false,
    })
}

/// Irreducibility of `e^{At}` for a cross-positive `A`: no eigenvector on the
/// boundary, equivalently no nontrivial face with an invariant span.
pub fn exp_irreducible(a: &Matrix, cone: &PolyhedralCone) -> Result<IrreducibilityReport> {
    cross_positive_or_err(a, cone, 0)?;
    let search = boundary_eigenvector(a, cone)?;
    let spans = invariant_faces(a, cone, FaceMode::Span)?;
    let by_eigen = search.found.is_none();
    let by_span = spans.is_empty();
    if by_eigen != by_span {
        return Err(Error::ToleranceConflict(format!(
            "eigenvector test says {:?}, span test says {:?}",
            verdict_of(by_eigen),
            verdict_of(by_span)
        )));
    }
    let checks = vec![
        CrossCheck {
            method: "IR1".into(),
            verdict: Some(verdict_of(by_eigen)),
            note: format!("{} complex eigenvalues skipped", search.skipped_complex),
        },
        CrossCheck {
            method: "span_scan".into(),
            verdict: Some(verdict_of(by_span)),
            note: format!("{} faces with invariant span", spans.len()),
        },
    ];
    Ok(IrreducibilityReport {
        verdict: verdict_of(by_eigen),
        method: IrrMethod::Exponential,
        invariant_face: spans.first().map(FaceRef::from),
        boundary_eigenvector: search.found.map(|(v, l)| (v.iter().copied().collect(), l)),
        face_witnesses: Vec::new(),
        cross_checks: checks,
        heuristic: false,
    })
}

/// Members tested face by face, plus whether the result is only heuristic.
fn family_members(family: &MatrixFamily, cone: &PolyhedralCone) -> Result<(Vec<Matrix>, bool)> {
    match family.semantics {
        Semantics::Discrete => {
            for (k, a) in family.matrices.iter().enumerate() {
                preserving_or_err(a, cone, k).map_err(|e| precondition(k, e))?;
            }
            Ok((family.matrices.clone(), false))
        }
        Semantics::Continuous => {
            for (k, a) in family.matrices.iter().enumerate() {
                cross_positive_or_err(a, cone, k).map_err(|e| precondition(k, e))?;
            }
            Ok((family.matrices.clone(), false))
        }
        Semantics::Jump => {
            let mut members = Vec::new();
            for pair in &family.pairs {
                for &h in &JUMP_SAMPLE_TIMES {
                    members.push(matrix_exponential(&pair.a, h)? * &pair.pi);
                }
            }
            members.extend(family.projections.iter().cloned());
            for (k, m) in members.iter().enumerate() {
                preserving_or_err(m, cone, k).map_err(|e| precondition(k, e))?;
            }
            Ok((members, true))
        }
    }
}

fn precondition(matrix: usize, e: Error) -> Error {
    match e {
        Error::DimensionMismatch { .. } => e,
        other => Error::PreconditionFailed { matrix, reason: other.to_string() },
    }
}

/// Family irreducibility: every nontrivial face is moved out of itself by some
/// member (discrete), or has its span moved by some member (continuous).
/// Jump families are tested through a sampled discrete closure and flagged heuristic.
pub fn family_irreducible(family: &MatrixFamily, cone: &PolyhedralCone) -> Result<IrreducibilityReport> {
    if family.dim != cone.dim {
        return Err(Error::DimensionMismatch { expected: cone.dim, found: family.dim });
    }
    let (members, heuristic) = family_members(family, cone)?;
    let span_mode = family.semantics == Semantics::Continuous;
    let tol = span_tol(cone);
    let faces = cone.enumerate_faces()?;
    let witnesses: Vec<Option<usize>> = faces
        .par_iter()
        .map(|f| {
            members.iter().position(|a| {
                if span_mode {
                    !span_invariant(a, f, tol)
                } else {
                    !face_invariant(a, cone, f)
                }
            })
        })
        .collect();
    let common = faces.iter().zip(&witnesses).find(|(_, w)| w.is_none()).map(|(f, _)| FaceRef::from(f));
    let face_witnesses: Vec<FaceWitness> = faces
        .iter()
        .zip(&witnesses)
        .filter_map(|(f, w)| w.map(|k| FaceWitness { face: f.into(), witness_matrix: k }))
        .collect();
    let mut checks = Vec::new();
    if family.semantics != Semantics::Jump {
        let mean = family.mean();
        let single = if span_mode { exp_irreducible(&mean, cone) } else { is_irreducible_single(&mean, cone) };
        match single {
            Ok(r) => {
                checks.push(CrossCheck {
                    method: "mean_member".into(),
                    verdict: Some(r.verdict),
                    note: "uniform convex combination of the members".into(),
                });
                if r.is_irreducible() != common.is_none() {
                    return Err(Error::ToleranceConflict(format!(
                        "face scan says {:?} but the mean member is {:?}",
                        verdict_of(common.is_none()),
                        r.verdict
                    )));
                }
            }
            Err(e) => checks.push(CrossCheck { method: "mean_member".into(), verdict: None, note: e.to_string() }),
        }
    }
    Ok(IrreducibilityReport {
        verdict: verdict_of(common.is_none()),
        method: IrrMethod::FaceScan,
        invariant_face: common,
        boundary_eigenvector: None,
        face_witnesses,
        cross_checks: checks,
        heuristic,
    })
}

/// Uniform convex combination of an irreducible discrete family, which is itself irreducible.
pub fn convex_irreducible_witness(
    family: &MatrixFamily,
    cone: &PolyhedralCone,
) -> Result<(Matrix, IrreducibilityReport)> {
    if family.semantics != Semantics::Discrete {
        return Err(Error::BadParams("convex witness needs a discrete family".into()));
    }
    let fam = family_irreducible(family, cone)?;
    if !fam.is_irreducible() {
        return Err(Error::FamilyReducible);
    }
    let mean = family.mean();
    let report = is_irreducible_single(&mean, cone)?;
    Ok((mean, report))
}
