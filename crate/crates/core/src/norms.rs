//! Polyhedral gauges and truncated extremal norms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cone::PolyhedralCone;
use crate::error::{Error, Result};
use crate::irreducibility::family_irreducible;
use crate::jsr::{spectral_radius, MatNorm};
use crate::linalg::{self, identity, matrix_power, Matrix, Vector};
use crate::maps::is_cone_preserving;
use crate::semigroup::{enumerate_products, MatrixFamily, ProductWord, Semantics};

pub const DEFAULT_NORM_BUDGET: u64 = 200_000;

/// Anything that evaluates like a norm.
pub trait Gauge {
    fn eval(&self, x: &Vector) -> f64;

    /// Explicit `max_k |w_k . x|` form, when one exists.
    fn polyhedral(&self) -> Option<PolyhedralGauge> {
        None
    }
}

/// Wraps a closure as a [`Gauge`].
pub struct FnGauge<F: Fn(&Vector) -> f64>(pub F);

impl<F: Fn(&Vector) -> f64> Gauge for FnGauge<F> {
    fn eval(&self, x: &Vector) -> f64 {
        (self.0)(x)
    }
}

/// `x -> max_k |w_k . x|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralGauge {
    pub functionals: Vec<Vector>,
}

impl Gauge for PolyhedralGauge {
    fn eval(&self, x: &Vector) -> f64 {
        self.functionals.iter().map(|w| w.dot(x).abs()).fold(0.0, f64::max)
    }

    fn polyhedral(&self) -> Option<PolyhedralGauge> {
        Some(self.clone())
    }
}

impl PolyhedralGauge {
    pub fn new(functionals: Vec<Vector>) -> Self {
        Self { functionals }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Self::new(rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.functionals.first().map_or(0, |w| w.len())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.functionals.iter().map(|w| w * c).collect())
    }

    /// A unit vector on which the gauge vanishes, if the functionals do not span.
    pub fn positivity_witness(&self) -> Option<Vector> {
        let n = self.dim();
        let w = Matrix::from_fn(self.functionals.len(), n, |i, j| self.functionals[i][j]);
        let ns = linalg::null_space(&w, 1e-10);
        (ns.ncols() > 0).then(|| ns.column(0).into_owned())
    }

    /// Vertices of `{x : max_k |w_k . x| <= 1}`; empty when the ball is unbounded.
    pub fn unit_ball_vertices(&self) -> Vec<Vector> {
        let n = self.dim();
        if self.positivity_witness().is_some() {
            return Vec::new();
        }
        let mut out: Vec<Vector> = Vec::new();
        linalg::for_each_subset(self.functionals.len(), n, |subset| {
            let a = Matrix::from_fn(n, n, |i, j| self.functionals[subset[i]][j]);
            let Some(inv) = a.clone().try_inverse() else { return true };
            if linalg::rank(&a, 1e-10) < n {
                return true;
            }
            for signs in 0..(1u32 << n) {
                let rhs = Vector::from_fn(n, |i, _| if signs >> i & 1 == 1 { -1.0 } else { 1.0 });
                let x = &inv * rhs;
                if self.eval(&x) <= 1.0 + 1e-9 && !out.iter().any(|v| (v - &x).norm() <= 1e-9 * x.norm().max(1.0)) {
                    out.push(x);
                }
            }
            true
        });
        out
    }

    /// Operator norm of `a` induced by this gauge (for gauges with a bounded unit ball).
    pub fn operator_norm(&self, a: &Matrix) -> f64 {
        self.unit_ball_vertices()
            .iter()
            .map(|x| self.eval(&(a * x)))
            .fold(0.0, f64::max)
    }
}

/// A base norm together with a short description.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseNorm {
    pub name: String,
    pub gauge: PolyhedralGauge,
}

impl Gauge for BaseNorm {
    fn eval(&self, x: &Vector) -> f64 {
        self.gauge.eval(x)
    }

    fn polyhedral(&self) -> Option<PolyhedralGauge> {
        Some(self.gauge.clone())
    }
}

impl BaseNorm {
    /// Order-interval gauge `max_j |h_j . x| / (h_j . e)`; `e` defaults to the sum of generators.
    pub fn order_unit(cone: &PolyhedralCone, e: Option<&Vector>) -> Result<Self> {
        let e = e.cloned().unwrap_or_else(|| cone.sum_of_generators());
        cone.check_dim(&e)?;
        if !cone.is_interior(&e) {
            return Err(Error::NotInterior { index: 0 });
        }
        let functionals = cone.facets.iter().map(|h| h / h.dot(&e)).collect();
        Ok(Self { name: format!("order_unit{:?}", e.as_slice()), gauge: PolyhedralGauge::new(functionals) })
    }

    pub fn sup(n: usize) -> Self {
        let functionals = (0..n).map(|i| Vector::from_fn(n, |j, _| f64::from(i == j))).collect();
        Self { name: "sup".into(), gauge: PolyhedralGauge::new(functionals) }
    }

    pub fn l1(n: usize) -> Self {
        let functionals = (0..1u32 << n.saturating_sub(1))
            .map(|s| Vector::from_fn(n, |j, _| if j > 0 && s >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 }))
            .collect();
        Self { name: "l1".into(), gauge: PolyhedralGauge::new(functionals) }
    }

    pub fn from_functionals(name: &str, functionals: Vec<Vector>) -> Self {
        Self { name: name.into(), gauge: PolyhedralGauge::new(functionals) }
    }
}

pub fn base_monotone_norm(cone: &PolyhedralCone, e: Option<&Vector>) -> Result<BaseNorm> {
    BaseNorm::order_unit(cone, e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    Monotone,
    Absolute,
}

/// Truncated extremal norm `v(x) = max_{t <= T, S in S_t} ||rho^-t S x||_base`,
/// stored as its table of composed functionals.
#[derive(Clone, Debug, PartialEq)]
pub struct NormApprox {
    pub functionals: Vec<Vector>,
    /// The first `base_count` functionals are the base table.
    pub base_count: usize,
    /// Functionals that are nonnegative on the cone.
    pub on_cone: Vec<bool>,
    pub rho_hat: f64,
    pub depth: usize,
    /// No new functional appeared at the last level, so the table is closed.
    pub closed: bool,
    pub base: BaseNorm,
    pub mode: NormMode,
    pub cone: PolyhedralCone,
}

impl Gauge for NormApprox {
    fn eval(&self, x: &Vector) -> f64 {
        match self.mode {
            NormMode::Monotone => self.functionals.iter().map(|w| w.dot(x).abs()).fold(0.0, f64::max),
            NormMode::Absolute => {
                let y = self.cone.lattice_abs(x).expect("absolute norms live on simplicial cones");
                self.functionals
                    .iter()
                    .zip(&self.on_cone)
                    .filter(|(_, c)| **c)
                    .map(|(w, _)| w.dot(&y))
                    .fold(0.0, f64::max)
            }
        }
    }

    fn polyhedral(&self) -> Option<PolyhedralGauge> {
        Some(self.to_gauge())
    }
}

impl NormApprox {
    /// Explicit polyhedral form. In absolute mode each functional `w` becomes
    /// the functionals `(wG diag(s)) G^-1` over sign patterns `s`.
    pub fn to_gauge(&self) -> PolyhedralGauge {
        match self.mode {
            NormMode::Monotone => PolyhedralGauge::new(self.functionals.clone()),
            NormMode::Absolute => {
                let n = self.cone.dim;
                let g = linalg::columns_to_matrix(n, &self.cone.generators);
                let g_inv = g.clone().try_inverse().expect("simplicial generators are a basis");
                let mut out = Vec::new();
                for (w, _) in self.functionals.iter().zip(&self.on_cone).filter(|(_, c)| **c) {
                    let a = g.transpose() * w;
                    for s in 0..(1u32 << n) {
                        let signed = Vector::from_fn(n, |i, _| if s >> i & 1 == 1 { -a[i] } else { a[i] });
                        out.push(g_inv.transpose() * signed);
                    }
                }
                PolyhedralGauge::new(out)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rho_hat": self.rho_hat,
            "depth": self.depth,
            "mode": self.mode,
            "base": self.base.name,
            "base_count": self.base_count,
            "closed": self.closed,
            "functionals": self.functionals.iter().map(|w| w.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn nonneg_on(cone: &PolyhedralCone, w: &Vector) -> bool {
    cone.generators.iter().all(|g| w.dot(g) >= -1e-12 * w.norm() * g.norm())
}

/// `|u . x| <= w . x` for every `x` in the cone, with `w` nonnegative on it.
fn dominated(cone: &PolyhedralCone, u: &Vector, w: &Vector) -> bool {
    cone.generators.iter().all(|g| {
        let thr = 1e-12 * w.norm().max(u.norm()).max(1.0) * g.norm();
        (w - u).dot(g) >= -thr && (w + u).dot(g) >= -thr
    })
}

/// Build the functional table level by level: `F_{t+1} = { f A / rho : f in F_t, A in M }`,
/// dropping functionals dominated on the cone.
pub fn build_extremal_norm(
    family: &MatrixFamily,
    cone: &PolyhedralCone,
    base: &BaseNorm,
    rho_hat: f64,
    depth: usize,
    mode: NormMode,
    budget: u64,
) -> Result<NormApprox> {
    if family.semantics != Semantics::Discrete {
        return Err(Error::BadParams("extremal norms are built for discrete families".into()));
    }
    if !(rho_hat > 0.0) || !rho_hat.is_finite() {
        return Err(Error::BadParams(format!("rho_hat {rho_hat} must be positive")));
    }
    if family.dim != cone.dim || base.gauge.dim() != cone.dim {
        return Err(Error::DimensionMismatch { expected: cone.dim, found: family.dim });
    }
    if mode == NormMode::Absolute && !cone.is_simplicial() {
        return Err(Error::NotSimplicial);
    }
    for (k, a) in family.matrices.iter().enumerate() {
        if let Some(w) = is_cone_preserving(a, cone)?.witness {
            return Err(Error::NotConePreserving { matrix: k, generator: w.generator, facet: w.facet });
        }
    }
    let mut functionals: Vec<Vector> = Vec::new();
    let mut on_cone = Vec::new();
    let mut frontier: Vec<Vector> = Vec::new();
    for w in &base.gauge.functionals {
        let flipped = -w;
        let canon = if !nonneg_on(cone, w) && nonneg_on(cone, &flipped) { flipped } else { w.clone() };
        let pos = nonneg_on(cone, &canon);
        if pos {
            frontier.push(canon.clone());
        }
        functionals.push(canon);
        on_cone.push(pos);
    }
    if frontier.is_empty() {
        return Err(Error::BadParams("base norm has no functional nonnegative on the cone".into()));
    }
    let base_count = functionals.len();
    let mut generated = 0u64;
    let mut closed = false;
    for _ in 0..depth {
        let mut level: Vec<Vector> = Vec::new();
        for f in &frontier {
            for a in &family.matrices {
                generated += 1;
                if generated > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                let w = a.transpose() * f / rho_hat;
                let covered = functionals
                    .iter()
                    .zip(&on_cone)
                    .filter(|(_, c)| **c)
                    .map(|(u, _)| u)
                    .chain(level.iter())
                    .any(|u| dominated(cone, &w, u));
                if covered {
                    continue;
                }
                level.retain(|u| !dominated(cone, u, &w));
                level.push(w);
            }
        }
        if level.is_empty() {
            closed = true;
            break;
        }
        on_cone.extend(std::iter::repeat_n(true, level.len()));
        functionals.extend(level.iter().cloned());
        frontier = level;
    }
    Ok(NormApprox {
        functionals,
        base_count,
        on_cone,
        rho_hat,
        depth,
        closed,
        base: base.clone(),
        mode,
        cone: cone.clone(),
    })
}

/// Random points of the cone: the generators and random positive combinations of them.
pub fn sample_cone(cone: &PolyhedralCone, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    let mut out: Vec<Vector> = cone.generators.clone();
    for _ in 0..samples {
        let x = cone.generators.iter().fold(Vector::zeros(cone.dim), |acc, g| {
            let w: f64 = Exp1.sample(rng);
            acc + g * w
        });
        out.push(x);
    }
    out
}

/// Uniform points on the Euclidean unit sphere.
pub fn sample_sphere(n: usize, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    (0..samples)
        .map(|_| {
            let v = Vector::from_fn(n, |_, _| StandardNormal.sample(rng));
            let norm = v.norm();
            v / norm
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    /// `max v(Ax) / (rho v(x)) - 1` over the members and the sampled points.
    pub residual: f64,
    pub argmax: Vec<f64>,
    pub matrix: usize,
}

pub fn extremality_residual<G: Gauge + ?Sized>(
    v: &G,
    family: &MatrixFamily,
    cone: &PolyhedralCone,
    rho_hat: f64,
    samples: usize,
    seed: u64,
) -> Residual {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Residual { residual: f64::NEG_INFINITY, argmax: Vec::new(), matrix: 0 };
    for x in sample_cone(cone, samples, &mut rng) {
        let vx = v.eval(&x);
        for (k, a) in family.matrices.iter().enumerate() {
            let vax = v.eval(&(a * &x));
            let r = if vx > 0.0 {
                vax / (rho_hat * vx) - 1.0
            } else if vax > 0.0 {
                f64::INFINITY
            } else {
                -1.0
            };
            if r > best.residual {
                best = Residual { residual: r, argmax: x.iter().copied().collect(), matrix: k };
            }
        }
    }
    best
}

/// Positivity on the sphere: a zero of the gauge when one is found.
pub fn positivity_check<G: Gauge + ?Sized>(v: &G, n: usize, samples: usize, seed: u64) -> Option<Vector> {
    if let Some(p) = v.polyhedral() {
        return p.positivity_witness();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_sphere(n, samples, &mut rng).into_iter().find(|x| v.eval(x) <= 1e-12)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EccMethod {
    Sampling { count: usize, seed: u64 },
    Vertex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eccentricity {
    pub ecc: f64,
    pub max: f64,
    pub min: f64,
    /// Sampling only sees part of the sphere, so its value is a lower estimate.
    pub lower_estimate: bool,
}

/// `max { v(x) : |x| = 1 } / min { v(x) : |x| = 1 }` with `|.|` the base norm.
pub fn eccentricity<G: Gauge + ?Sized>(v: &G, base: &BaseNorm, method: EccMethod) -> Result<Eccentricity> {
    let n = base.gauge.dim();
    match method {
        EccMethod::Sampling { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
            for x in sample_sphere(n, count, &mut rng) {
                let r = v.eval(&x) / base.eval(&x);
                hi = hi.max(r);
                lo = lo.min(r);
            }
            Ok(Eccentricity { ecc: hi / lo, max: hi, min: lo, lower_estimate: true })
        }
        EccMethod::Vertex => {
            if n > 3 {
                return Err(Error::MethodUnavailable(format!("vertex eccentricity needs n <= 3, got {n}")));
            }
            let pv = v
                .polyhedral()
                .ok_or_else(|| Error::MethodUnavailable("vertex eccentricity needs a polyhedral norm".into()))?;
            let hi = base.gauge.unit_ball_vertices().iter().map(|x| v.eval(x)).fold(0.0, f64::max);
            let v_vertices = pv.unit_ball_vertices();
            if v_vertices.is_empty() {
                return Ok(Eccentricity { ecc: f64::INFINITY, max: hi, min: 0.0, lower_estimate: false });
            }
            let base_max = v_vertices.iter().map(|y| base.eval(y)).fold(0.0, f64::max);
            let lo = 1.0 / base_max;
            Ok(Eccentricity { ecc: hi / lo, max: hi, min: lo, lower_estimate: false })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Amplification {
    pub eta: f64,
    /// Largest `r(eta (I + M_bar)^(n-1) S)` over normalized products `S`.
    pub max_spectral: f64,
    /// Largest domination floor `min_j h_j.(P e) / h_j.e` of the same operators.
    pub max_domination: f64,
    pub delta: f64,
    pub c_max: f64,
    pub eta_delta_cmax: f64,
    pub certificate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessReport {
    /// Largest `||rho^-t S||` over all words up to the depth.
    pub max_norm: f64,
    /// Running maximum after each depth.
    pub running_max: Vec<f64>,
    pub growth_ratio: f64,
    /// `rho^-t r(S) > 1` for some word: the normalization is below the growth rate.
    pub spectral_certificate: Option<(Vec<usize>, f64)>,
    pub amplification: Amplification,
    pub growth_flag: bool,
}

/// Track normalized product norms of an irreducible family up to `depth` and
/// flag growth: a tenfold increase of the running maximum between `T/2` and
/// `T`, a normalized product with spectral radius above one, or an amplified
/// convex witness with spectral radius above one.
pub fn boundedness_diagnostic(
    family: &MatrixFamily,
    cone: &PolyhedralCone,
    rho_hat: f64,
    depth: usize,
) -> Result<BoundednessReport> {
    if !(rho_hat > 0.0) {
        return Err(Error::BadParams(format!("rho_hat {rho_hat} must be positive")));
    }
    if !family_irreducible(family, cone)?.is_irreducible() {
        return Err(Error::FamilyReducible);
    }
    let n = cone.dim;
    let norm = MatNorm::order_unit(cone, cone.sum_of_generators())?;
    let mean = family.mean() / rho_hat;
    let eta = 0.5f64.powi(n as i32 - 1);
    let amp = matrix_power(&(identity(n) + &mean), n - 1) * eta;
    let e = cone.sum_of_generators();
    let tol = 1e-9;
    let mut running = vec![0.0f64; depth + 1];
    let mut spectral: Option<(Vec<usize>, f64)> = None;
    let mut max_spectral: f64 = 0.0;
    let mut max_domination: f64 = 0.0;
    enumerate_products(family, depth, u64::MAX, None, |w: &ProductWord| {
        let t = w.len();
        let s = &w.matrix / rho_hat.powi(t as i32);
        running[t] = running[t].max(norm.eval(&s));
        let r = spectral_radius(&s);
        if r > 1.0 + tol && spectral.as_ref().is_none_or(|(_, v)| r > *v) {
            spectral = Some((w.indices(), r));
        }
        let p = &amp * &s;
        max_spectral = max_spectral.max(spectral_radius(&p));
        let y = &p * &e;
        let dom = cone.facets.iter().map(|h| h.dot(&y) / h.dot(&e)).fold(f64::INFINITY, f64::min);
        max_domination = max_domination.max(dom);
    })?;
    running[0] = 1.0;
    for t in 1..=depth {
        running[t] = running[t].max(running[t - 1]);
    }
    let max_norm = running[depth];
    let half = running[depth / 2].max(f64::MIN_POSITIVE);
    let growth_ratio = max_norm / half;
    let images: Vec<Vector> = cone.base_points()?.iter().map(|b| matrix_power(&(identity(n) + &mean), n - 1) * b).collect();
    let delta = cone.uniform_domination_delta(&images).unwrap_or(0.0);
    let amplification = Amplification {
        eta,
        max_spectral,
        max_domination,
        delta,
        c_max: max_norm,
        eta_delta_cmax: eta * delta * max_norm,
        certificate: max_spectral > 1.0 + tol,
    };
    let growth_flag = growth_ratio > 10.0 || spectral.is_some() || amplification.certificate;
    Ok(BoundednessReport {
        max_norm,
        running_max: running[1..].to_vec(),
        growth_ratio,
        spectral_certificate: spectral,
        amplification,
        growth_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_rows;

    fn m(rows: &[&[f64]]) -> Matrix {
        from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    fn swap() -> Matrix {
        m(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn base_norm_examples() {
        let k = PolyhedralCone::orthant(2);
        let b = base_monotone_norm(&k, Some(&v(&[1.0, 1.0]))).unwrap();
        assert_eq!(b.eval(&v(&[-3.0, 2.0])), 3.0);
        let b = base_monotone_norm(&k, Some(&v(&[2.0, 1.0]))).unwrap();
        assert_eq!(b.eval(&v(&[-3.0, 2.0])), 2.0);
        assert_eq!(b.eval(&v(&[4.0, 1.0])), 2.0);
        let skew = PolyhedralCone::simplicial(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let b = base_monotone_norm(&skew, Some(&v(&[2.0, 1.0]))).unwrap();
        for x in [[3.0f64, 1.0], [-1.0, 2.0], [0.5, -4.0]] {
            let want: f64 = (x[0] - x[1]).abs().max(x[1].abs());
            assert!((b.eval(&v(&x)) - want).abs() < 1e-15);
        }
        assert_eq!(
            base_monotone_norm(&k, Some(&v(&[1.0, 0.0]))).unwrap_err(),
            Error::NotInterior { index: 0 }
        );
    }

    #[test]
    fn swap_closure_is_sup_norm() {
        let k = PolyhedralCone::orthant(2);
        let fam = MatrixFamily::discrete(vec![swap()]).unwrap();
        let sup = BaseNorm::sup(2);
        let nv = build_extremal_norm(&fam, &k, &sup, 1.0, 2, NormMode::Monotone, 1000).unwrap();
        assert!(nv.closed);
        assert_eq!(nv.functionals.len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for x in sample_sphere(2, 100, &mut rng) {
            assert_eq!(nv.eval(&x), sup.eval(&x));
        }
        let r = extremality_residual(&nv, &fam, &k, 1.0, 200, 1);
        assert!(r.residual.abs() < 1e-15);
    }

    #[test]
    fn anti_diagonal_closure() {
        let k = PolyhedralCone::orthant(2);
        let fam = MatrixFamily::discrete(vec![m(&[&[0.0, 2.0], &[0.5, 0.0]])]).unwrap();
        let nv = build_extremal_norm(&fam, &k, &BaseNorm::l1(2), 1.0, 3, NormMode::Monotone, 1000).unwrap();
        assert!(nv.closed);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for x in sample_cone(&k, 200, &mut rng) {
            let want = (x[0] + x[1]).max(0.5 * x[0] + 2.0 * x[1]);
            assert!((nv.eval(&x) - want).abs() <= 1e-12 * want);
        }
        let r = extremality_residual(&nv, &fam, &k, 1.0, 200, 2);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn identity_family_gives_base() {
        let k = PolyhedralCone::simplicial(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let base = BaseNorm::order_unit(&k, None).unwrap();
        let fam = MatrixFamily::discrete(vec![identity(2)]).unwrap();
        let nv = build_extremal_norm(&fam, &k, &base, 1.0, 4, NormMode::Monotone, 1000).unwrap();
        assert_eq!(nv.functionals, base.gauge.functionals);
    }

    #[test]
    fn doubled_identity_residual() {
        let k = PolyhedralCone::orthant(2);
        let base = BaseNorm::sup(2);
        let fam = MatrixFamily::discrete(vec![identity(2) * 2.0]).unwrap();
        let r = extremality_residual(&base, &fam, &k, 1.0, 50, 5);
        assert!((r.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eccentricity_examples() {
        let k = PolyhedralCone::orthant(2);
        let sup = BaseNorm::sup(2);
        assert_eq!(eccentricity(&sup, &sup, EccMethod::Vertex).unwrap().ecc, 1.0);
        let doubled = sup.gauge.scaled(2.0);
        assert_eq!(eccentricity(&doubled, &sup, EccMethod::Vertex).unwrap().ecc, 1.0);

        let fam = MatrixFamily::discrete(vec![m(&[&[0.0, 2.0], &[0.5, 0.0]])]).unwrap();
        let nv = build_extremal_norm(&fam, &k, &BaseNorm::l1(2), 1.0, 3, NormMode::Monotone, 1000).unwrap();
        let e = eccentricity(&nv, &sup, EccMethod::Vertex).unwrap();
        // max(|x1|+|x2|, |x1/2 + 2 x2|) peaks at (1,1) with 2.5 and bottoms out at e1 with 1.
        assert!((e.max - 2.5).abs() < 1e-12);
        assert!((e.min - 1.0).abs() < 1e-12);
        assert!((e.ecc - 2.5).abs() < 1e-12);
        let s = eccentricity(&nv, &sup, EccMethod::Sampling { count: 2000, seed: 9 }).unwrap();
        assert!(s.ecc <= e.ecc + 1e-12 && s.ecc > 2.3);
        assert!(matches!(
            eccentricity(&BaseNorm::sup(4), &BaseNorm::sup(4), EccMethod::Vertex),
            Err(Error::MethodUnavailable(_))
        ));
    }

    #[test]
    fn counterexample_is_not_a_norm() {
        let k = PolyhedralCone::orthant(2);
        let fam = MatrixFamily::discrete(vec![swap(), identity(2)]).unwrap();
        let w = PolyhedralGauge::from_rows(&[vec![1.0, 1.0]]);
        assert!(extremality_residual(&w, &fam, &k, 1.0, 200, 1).residual <= 0.0);
        let z = positivity_check(&w, 2, 100, 1).unwrap();
        assert!(w.eval(&z).abs() < 1e-12);
        assert!((z[0] + z[1]).abs() < 1e-12);
        let as_fn = FnGauge(|x: &Vector| (x[0] + x[1]).abs());
        assert!(as_fn.eval(&v(&[1.0, -1.0])) == 0.0);
        assert!(positivity_check(&BaseNorm::sup(2), 2, 100, 1).is_none());
    }

    #[test]
    fn absolute_mode() {
        let k = PolyhedralCone::simplicial(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let a = m(&[&[1.0, 0.5], &[0.0, 0.5]]);
        let fam = MatrixFamily::discrete(vec![a]).unwrap();
        let base = BaseNorm::order_unit(&k, None).unwrap();
        let nv = build_extremal_norm(&fam, &k, &base, 1.0, 6, NormMode::Absolute, 10_000).unwrap();
        let g = nv.to_gauge();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for x in sample_sphere(2, 200, &mut rng) {
            let abs = k.lattice_abs(&x).unwrap();
            assert_eq!(nv.eval(&x), nv.eval(&abs));
            assert!((g.eval(&x) - nv.eval(&x)).abs() <= 1e-12 * nv.eval(&x));
        }
        let orth = PolyhedralCone::general(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, -0.5]], None);
        if let Ok(c) = orth {
            let fam = MatrixFamily::discrete(vec![identity(3)]).unwrap();
            let b = BaseNorm::order_unit(&c, None).unwrap();
            assert_eq!(
                build_extremal_norm(&fam, &c, &b, 1.0, 1, NormMode::Absolute, 10).unwrap_err(),
                Error::NotSimplicial
            );
        }
    }

    #[test]
    fn construction_errors() {
        let k = PolyhedralCone::orthant(2);
        let fam = MatrixFamily::discrete(vec![m(&[&[1.0, -1.0], &[0.0, 1.0]])]).unwrap();
        assert!(matches!(
            build_extremal_norm(&fam, &k, &BaseNorm::sup(2), 1.0, 2, NormMode::Monotone, 10),
            Err(Error::NotConePreserving { matrix: 0, .. })
        ));
        let fam = MatrixFamily::discrete(vec![identity(2) * 2.0, swap() * 2.0]).unwrap();
        assert_eq!(
            build_extremal_norm(&fam, &k, &BaseNorm::sup(2), 1.0, 20, NormMode::Monotone, 50).unwrap_err(),
            Error::BudgetExceeded { budget: 50 }
        );
    }

    #[test]
    fn operator_norm_of_sup_gauge() {
        let sup = BaseNorm::sup(2);
        let a = m(&[&[1.0, -2.0], &[0.5, 0.5]]);
        assert!((sup.gauge.operator_norm(&a) - 3.0).abs() < 1e-12);
        assert_eq!(sup.gauge.unit_ball_vertices().len(), 4);
    }

    #[test]
    fn boundedness_examples() {
        let k = PolyhedralCone::orthant(2);
        let fam = MatrixFamily::discrete(vec![swap(), identity(2)]).unwrap();
        let r = boundedness_diagnostic(&fam, &k, 1.0, 10).unwrap();
        assert_eq!(r.max_norm, 1.0);
        assert!(!r.growth_flag);

        let fam = MatrixFamily::discrete(vec![swap() * 2.0]).unwrap();
        let r = boundedness_diagnostic(&fam, &k, 1.0, 10).unwrap();
        assert!(r.growth_flag);
        assert_eq!(r.max_norm, 1024.0);

        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let fam = MatrixFamily::discrete(vec![m(&[&[1.0, 1.0], &[0.0, 1.0]]), m(&[&[1.0, 0.0], &[1.0, 1.0]])]).unwrap();
        let r = boundedness_diagnostic(&fam, &k, phi, 12).unwrap();
        assert!(!r.growth_flag, "{r:?}");

        let fam = MatrixFamily::discrete(vec![identity(2)]).unwrap();
        assert_eq!(boundedness_diagnostic(&fam, &k, 1.0, 4).unwrap_err(), Error::FamilyReducible);
    }

    #[test]
    fn export_shape() {
        let k = PolyhedralCone::orthant(2);
        let fam = MatrixFamily::discrete(vec![swap()]).unwrap();
        let nv = build_extremal_norm(&fam, &k, &BaseNorm::sup(2), 1.0, 2, NormMode::Monotone, 100).unwrap();
        let j = nv.to_json();
        assert_eq!(j["rho_hat"], 1.0);
        assert_eq!(j["depth"], 2);
        assert_eq!(j["mode"], "monotone");
        assert_eq!(j["functionals"].as_array().unwrap().len(), 2);
    }
}
