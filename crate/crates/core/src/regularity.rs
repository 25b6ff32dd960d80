//! Hausdorff distances between matrix families and Lipschitz experiments for the joint spectral radius.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cone::PolyhedralCone;
use crate::error::{Error, Result};
use crate::expm::matrix_exponential;
use crate::irreducibility::family_irreducible;
use crate::jsr::{jsr_bounds, JsrBounds, JsrParams};
use crate::linalg::{inf_norm, one_norm, spectral_norm, Matrix};
use crate::maps::{is_cone_preserving, is_cross_positive, is_k_positive};
use crate::norms::{build_extremal_norm, eccentricity, BaseNorm, EccMethod, Gauge, NormMode, PolyhedralGauge, DEFAULT_NORM_BUDGET};
use crate::semigroup::{MatrixFamily, Semantics};

/// Matrix norm used for distances.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixNorm {
    Spectral,
    MaxRowSum,
    MaxColSum,
    Frobenius,
    /// Operator norm induced by a polyhedral gauge with bounded unit ball.
    Induced(PolyhedralGauge),
}

impl MatrixNorm {
    pub fn eval(&self, a: &Matrix) -> f64 {
        match self {
            MatrixNorm::Spectral => spectral_norm(a),
            MatrixNorm::MaxRowSum => inf_norm(a),
            MatrixNorm::MaxColSum => one_norm(a),
            MatrixNorm::Frobenius => a.norm(),
            MatrixNorm::Induced(g) => g.operator_norm(a),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatrixNorm::Spectral => "spectral",
            MatrixNorm::MaxRowSum => "max_row_sum",
            MatrixNorm::MaxColSum => "max_col_sum",
            MatrixNorm::Frobenius => "frobenius",
            MatrixNorm::Induced(_) => "induced",
        }
    }
}

/// `max(max_A min_B |A - B|, max_B min_A |A - B|)`.
pub fn hausdorff_distance(m: &[Matrix], n: &[Matrix], norm: &MatrixNorm) -> Result<f64> {
    if m.is_empty() || n.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let (r, c) = m[0].shape();
    for a in m.iter().chain(n) {
        if a.nrows() != r {
            return Err(Error::DimensionMismatch { expected: r, found: a.nrows() });
        }
        if a.ncols() != c {
            return Err(Error::DimensionMismatch { expected: c, found: a.ncols() });
        }
    }
    let d: Vec<Vec<f64>> = m.iter().map(|a| n.iter().map(|b| norm.eval(&(a - b))).collect()).collect();
    let forward = d.iter().map(|row| row.iter().copied().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let backward = (0..n.len())
        .map(|j| d.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(forward.max(backward))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzParams {
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub jsr: JsrParams,
    /// Depth of the truncated extremal norm giving the constant `C`.
    pub norm_depth: usize,
    /// Require every member to be K-positive.
    pub require_k_positive: bool,
    /// Also evaluate the unrepaired perturbations, reported apart.
    pub sample_outside: bool,
}

impl Default for LipschitzParams {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            trials: 20,
            seed: 0,
            jsr: JsrParams { depth: 10, delta: 1e-3, ..JsrParams::default() },
            norm_depth: 8,
            require_k_positive: false,
            sample_outside: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    /// Hausdorff distance in the base operator norm.
    pub h: f64,
    /// Difference of bound midpoints.
    pub delta_rho: f64,
    pub ratio: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    /// Largest repair coefficient applied to a member.
    pub repair: f64,
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub trials: usize,
    pub perturbation_scale: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub ecc_bound: f64,
    pub inequality_violations: usize,
    /// Trials whose distance did not clear the interval-width guard.
    pub skipped: usize,
    pub base_lower: f64,
    pub base_upper: f64,
    /// Bounds are compared as growth exponents (continuous families).
    pub exponent_scale: bool,
    pub norm_closed: bool,
    pub rows: Vec<TrialRow>,
    /// Unrepaired perturbations, outside the cone-preserving set.
    pub outside: Vec<TrialRow>,
}

impl LipschitzReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or_else(|e| json!({ "error": e.to_string() }))
    }
}

/// Add `t s phi^T` with the smallest `t >= 0` that restores the sign
/// conditions on the generators (`s` the sum of generators, `phi` the base functional).
/// Continuous families only need the incident pairs.
pub fn repair_into_cone(a: &Matrix, cone: &PolyhedralCone, incident_only: bool) -> Result<(Matrix, f64)> {
    let s = cone.sum_of_generators();
    let phi = cone.compact_base()?.functional;
    let mut t: f64 = 0.0;
    for (i, g) in cone.generators.iter().enumerate() {
        let y = a * g;
        let pg = phi.dot(g);
        for (j, h) in cone.facets.iter().enumerate() {
            if incident_only && !cone.incidence[i][j] {
                continue;
            }
            let v = h.dot(&y);
            if v < 0.0 {
                t = t.max(-v / (h.dot(&s) * pg));
            }
        }
    }
    let t = if t > 0.0 { t * (1.0 + 1e-12) } else { 0.0 };
    Ok((a + &s * phi.transpose() * t, t))
}

fn member_ok(a: &Matrix, cone: &PolyhedralCone, continuous: bool) -> Result<bool> {
    Ok(if continuous { is_cross_positive(a, cone)?.holds } else { is_cone_preserving(a, cone)?.holds })
}

fn scale_of(b: &JsrBounds, exponent: bool) -> (f64, f64) {
    if exponent {
        b.growth_exponents()
    } else {
        (b.lower, b.upper)
    }
}

/// Perturb each member by a random matrix of base-norm at most `epsilon`,
/// repair it back into the cone-preserving set, and compare JSR bounds.
///
/// The constant `C` is the eccentricity of a truncated extremal norm of the
/// unperturbed family against the order-unit base norm.
pub fn lipschitz_experiment(
    family: &MatrixFamily,
    cone: &PolyhedralCone,
    params: &LipschitzParams,
) -> Result<LipschitzReport> {
    if !(params.epsilon >= 0.0) || !params.epsilon.is_finite() {
        return Err(Error::BadParams(format!("epsilon {} must be nonnegative", params.epsilon)));
    }
    let continuous = match family.semantics {
        Semantics::Discrete => false,
        Semantics::Continuous => true,
        Semantics::Jump => {
            return Err(Error::BadParams("Lipschitz experiments take discrete or continuous families".into()))
        }
    };
    if family.dim != cone.dim {
        return Err(Error::DimensionMismatch { expected: cone.dim, found: family.dim });
    }
    for (k, a) in family.matrices.iter().enumerate() {
        if params.require_k_positive && !continuous && !is_k_positive(a, cone)?.holds {
            return Err(Error::PreconditionFailed { matrix: k, reason: "member is not K-positive".into() });
        }
    }
    if !family_irreducible(family, cone)?.is_irreducible() {
        return Err(Error::FamilyReducible);
    }
    let base = BaseNorm::order_unit(cone, None)?;
    let dist = MatrixNorm::Induced(base.gauge.clone());
    let m_bounds = jsr_bounds(family, Some(cone), &params.jsr)?;
    let (m_lo, m_hi) = scale_of(&m_bounds, continuous);

    let letters = if continuous {
        let mats = family.matrices.iter().map(|a| matrix_exponential(a, 1.0)).collect::<Result<Vec<_>>>()?;
        MatrixFamily::discrete(mats)?
    } else {
        family.clone()
    };
    let v = build_extremal_norm(&letters, cone, &base, m_bounds.upper, params.norm_depth, NormMode::Monotone, DEFAULT_NORM_BUDGET)?;
    let method = if cone.dim <= 3 {
        EccMethod::Vertex
    } else {
        EccMethod::Sampling { count: 20_000, seed: params.seed }
    };
    let c = eccentricity(&v, &base, method)?.ecc;

    let n = cone.dim;
    let run_trial = |trial: usize| -> Result<(TrialRow, Option<TrialRow>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(trial as u64);
        let mut repaired = Vec::with_capacity(family.len());
        let mut raw = Vec::with_capacity(family.len());
        let mut max_t: f64 = 0.0;
        for (k, a) in family.matrices.iter().enumerate() {
            let e = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let size = dist.eval(&e);
            let scale = if size > 0.0 { params.epsilon * rng.random::<f64>() / size } else { 0.0 };
            let p = a + e * scale;
            let (q, t) = repair_into_cone(&p, cone, continuous)?;
            if !member_ok(&q, cone, continuous)? {
                return Err(Error::PerturbationEscapes { trial, member: k });
            }
            max_t = max_t.max(t);
            raw.push(p);
            repaired.push(q);
        }
        let row = |mats: Vec<Matrix>, check: bool| -> Result<TrialRow> {
            let h = hausdorff_distance(&family.matrices, &mats, &dist)?;
            let fam = MatrixFamily::new(family.semantics, mats)?;
            let b = jsr_bounds(&fam, Some(cone), &params.jsr)?;
            let (lo, hi) = scale_of(&b, continuous);
            let widths = (m_hi - m_lo) + (hi - lo);
            let delta_rho = (lo + hi) / 2.0 - (m_lo + m_hi) / 2.0;
            let ratio = (h > 10.0 * widths).then(|| delta_rho.abs() / h);
            let violation = check && hi > m_hi + c * h + widths + 1e-9;
            Ok(TrialRow { trial, h, delta_rho, ratio, lower: lo, upper: hi, repair: max_t, violation })
        };
        let inside = row(repaired, true)?;
        let outside = if params.sample_outside && max_t > 0.0 { Some(row(raw, false)?) } else { None };
        Ok((inside, outside))
    };
    let results = (0..params.trials).into_par_iter().map(run_trial).collect::<Result<Vec<_>>>()?;
    let (rows, outside): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let outside: Vec<TrialRow> = outside.into_iter().flatten().collect();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    Ok(LipschitzReport {
        trials: params.trials,
        perturbation_scale: params.epsilon,
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        skipped: rows.len() - ratios.len(),
        ratios,
        ecc_bound: c,
        inequality_violations: rows.iter().filter(|r| r.violation).count(),
        base_lower: m_bounds.lower,
        base_upper: m_bounds.upper,
        exponent_scale: continuous,
        norm_closed: v.closed,
        rows,
        outside,
    })
}

/// `H` measured in the operator norm of a polyhedral gauge.
pub fn hausdorff_in_gauge<G: Gauge + ?Sized>(m: &[Matrix], n: &[Matrix], v: &G) -> Result<f64> {
    let g = v.polyhedral().ok_or_else(|| Error::MethodUnavailable("gauge is not polyhedral".into()))?;
    hausdorff_distance(m, n, &MatrixNorm::Induced(g))
}
