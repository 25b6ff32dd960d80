//! Joint spectral radius bounds by branch and bound over the product tree.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cone::PolyhedralCone;
use crate::error::{Error, Result};
use crate::expm::matrix_exponential;
use crate::linalg::{identity, inf_norm, spectral_abscissa, Matrix, Vector};
use crate::norms::{build_extremal_norm, BaseNorm, NormMode};
pub use crate::linalg::spectral_radius;
use crate::semigroup::{MatrixFamily, ProductWord, Semantics, Step};

pub const DEFAULT_DELTA: f64 = 0.02;
pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_DEPTH: usize = 30;
/// Functionals generated per attempt of the polytope certificate.
pub const CERTIFICATE_BUDGET: u64 = 100_000;
pub const DEFAULT_STEP: f64 = 1.0;

/// How products are measured during the search.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum NormChoice {
    /// Order-unit norm of the best interior vector when a cone is given and
    /// every letter preserves it, otherwise the max-row-sum norm.
    #[default]
    Auto,
    MaxRowSum,
    /// Order-unit norm `max_j |h_j . x| / (h_j . e)` for a given interior `e`.
    OrderUnit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct JsrParams {
    pub depth: usize,
    pub delta: f64,
    pub budget: u64,
    pub norm: NormChoice,
    pub prune: bool,
    /// Base step `h` for continuous and jump semantics; `h/2` and `h/4` are also run.
    pub step: f64,
    pub refinements: usize,
}

impl Default for JsrParams {
    fn default() -> Self {
        Self {
            depth: DEFAULT_DEPTH,
            delta: DEFAULT_DELTA,
            budget: DEFAULT_BUDGET,
            norm: NormChoice::Auto,
            prune: true,
            step: DEFAULT_STEP,
            refinements: 3,
        }
    }
}

impl JsrParams {
    fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::BadParams("depth must be at least 1".into()));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::BadParams(format!("delta {} must be nonnegative", self.delta)));
        }
        if self.budget == 0 {
            return Err(Error::BadParams("budget must be positive".into()));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::BadParams(format!("step {} must be positive", self.step)));
        }
        if self.refinements == 0 {
            return Err(Error::BadParams("at least one step refinement is required".into()));
        }
        Ok(())
    }
}

/// Operator norm used on products.
#[derive(Clone, Debug, PartialEq)]
pub enum MatNorm {
    MaxRowSum,
    /// Induced order-unit norm, valid on cone-preserving matrices: `||S|| = ||S e||_e`.
    OrderUnit { facets: Vec<Vector>, e: Vector, levels: Vec<f64> },
}

impl MatNorm {
    pub fn order_unit(cone: &PolyhedralCone, e: Vector) -> Result<Self> {
        if !cone.is_interior(&e) {
            return Err(Error::NotInterior { index: 0 });
        }
        let levels = cone.facets.iter().map(|h| h.dot(&e)).collect();
        Ok(MatNorm::OrderUnit { facets: cone.facets.clone(), e, levels })
    }

    pub fn eval(&self, m: &Matrix) -> f64 {
        match self {
            MatNorm::MaxRowSum => inf_norm(m),
            MatNorm::OrderUnit { facets, e, levels } => {
                let y = m * e;
                facets
                    .iter()
                    .zip(levels)
                    .map(|(h, l)| h.dot(&y).abs() / l)
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            MatNorm::MaxRowSum => "max_row_sum".into(),
            MatNorm::OrderUnit { e, .. } => format!("order_unit{:?}", e.as_slice()),
        }
    }
}

fn all_preserve(cone: &PolyhedralCone, letters: &[Matrix]) -> bool {
    letters.iter().all(|a| cone.generators.iter().all(|g| cone.contains(&(a * g))))
}

fn normalized(v: Vector) -> Vector {
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        v
    }
}

/// Interior vectors tried as order units: the sum of generators, the Perron
/// vector of the mean letter and a max-iterate of the letters.
fn order_unit_candidates(cone: &PolyhedralCone, letters: &[Matrix]) -> Vec<Vector> {
    let n = cone.dim;
    let s = normalized(cone.sum_of_generators());
    let mut out = vec![s.clone()];
    let mean = letters.iter().fold(Matrix::zeros(n, n), |acc, a| acc + a) / letters.len() as f64;
    let shifted = &mean + identity(n) * inf_norm(&mean).max(1e-12);
    let mut x = s.clone();
    for _ in 0..500 {
        x = normalized(&shifted * &x);
    }
    out.push(x);
    if cone.is_simplicial() {
        let mut x = s.clone();
        for _ in 0..200 {
            let mut m = letters[0].clone() * &x;
            for a in &letters[1..] {
                if let Ok(v) = cone.lattice_max(&m, &(a * &x)) {
                    m = v;
                }
            }
            x = normalized(normalized(m) + &s * 1e-3);
        }
        out.push(x);
    }
    out.retain(|e| e.iter().all(|v| v.is_finite()) && cone.is_interior(e));
    out
}

/// Resolve a norm choice against the letters actually searched.
pub fn select_norm(
    choice: &NormChoice,
    cone: Option<&PolyhedralCone>,
    letters: &[Matrix],
) -> Result<MatNorm> {
    match choice {
        NormChoice::MaxRowSum => Ok(MatNorm::MaxRowSum),
        NormChoice::OrderUnit(e) => {
            let cone = cone.ok_or_else(|| Error::BadParams("order-unit norm needs a cone".into()))?;
            if e.len() != cone.dim {
                return Err(Error::DimensionMismatch { expected: cone.dim, found: e.len() });
            }
            if !all_preserve(cone, letters) {
                return Err(Error::BadParams("order-unit norm needs cone-preserving letters".into()));
            }
            MatNorm::order_unit(cone, Vector::from_column_slice(e))
        }
        NormChoice::Auto => {
            let Some(cone) = cone else { return Ok(MatNorm::MaxRowSum) };
            if !all_preserve(cone, letters) {
                return Ok(MatNorm::MaxRowSum);
            }
            let mut best: Option<(f64, MatNorm)> = None;
            for e in order_unit_candidates(cone, letters) {
                let norm = MatNorm::order_unit(cone, e)?;
                let worst = letters.iter().map(|a| norm.eval(a)).fold(0.0, f64::max);
                if best.as_ref().is_none_or(|(w, _)| worst < *w) {
                    best = Some((worst, norm));
                }
            }
            Ok(best.map_or(MatNorm::MaxRowSum, |(_, n)| n))
        }
    }
}

/// `c* = min_j (h_j . A x) / (h_j . x)`, a lower bound for `r(A)` when `A` preserves the cone.
pub fn domination_lower_bound(a: &Matrix, cone: &PolyhedralCone, x: &Vector) -> Result<f64> {
    cone.check_dim(x)?;
    if !cone.is_interior(x) {
        return Err(Error::NotInterior { index: 0 });
    }
    let y = a * x;
    Ok(cone
        .facets
        .iter()
        .map(|h| h.dot(&y) / h.dot(x))
        .fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DepthRow {
    /// Word length (discrete) or elapsed time (continuous, jump).
    pub t: f64,
    pub norm_bound: f64,
    pub spectral_bound: f64,
    /// Every word of this length was evaluated, so `norm_bound` is an upper bound.
    pub complete: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RefinementRow {
    pub step: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JsrBounds {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
    pub lower_witness: ProductWord,
    pub norm_used: String,
    pub semantics: Semantics,
    pub per_depth: Vec<DepthRow>,
    /// The search closed the gap to `delta` without running out of budget or depth.
    pub complete: bool,
    pub budget_exhausted: bool,
    /// The upper bound was certified by a closed extremal norm table at this level.
    pub polytope_certificate: Option<f64>,
    /// The upper bound comes from sampled switching and is not a certificate.
    pub heuristic_upper: bool,
    pub nodes: u64,
    /// Per-step results for continuous and jump semantics.
    pub refinement: Vec<RefinementRow>,
}

impl JsrBounds {
    /// Growth exponents `(ln lower, ln upper)`, the per-unit-time rates of continuous systems.
    pub fn growth_exponents(&self) -> (f64, f64) {
        (self.lower.ln(), self.upper.ln())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "lower": self.lower,
            "upper": self.upper,
            "depth": self.depth,
            "witness": self.lower_witness.indices(),
            "witness_durations": self.lower_witness.steps.iter().map(|s| s.duration).collect::<Vec<_>>(),
            "per_depth": self.per_depth.iter().map(|r| json!([r.t, r.norm_bound, r.spectral_bound])).collect::<Vec<_>>(),
            "per_depth_complete": self.per_depth.iter().map(|r| r.complete).collect::<Vec<_>>(),
            "norm_used": self.norm_used,
            "semantics": self.semantics,
            "complete": self.complete,
            "budget_exhausted": self.budget_exhausted,
            "polytope_certificate": self.polytope_certificate,
            "heuristic_upper": self.heuristic_upper,
            "nodes": self.nodes,
            "refinement": self.refinement,
        })
    }
}

/// Search results over a discrete alphabet of letters.
#[derive(Clone, Debug)]
struct TreeResult {
    lower: f64,
    upper: f64,
    witness: Vec<usize>,
    depth: usize,
    per_depth: Vec<(f64, f64, bool)>,
    exhausted: bool,
    nodes: u64,
}

struct Node {
    word: Vec<usize>,
    prefix_beta: Vec<f64>,
    /// `suffixes[j]` is the product of letters `j+1..=k` of the word.
    suffixes: Vec<Matrix>,
}

#[derive(Clone, Debug)]
struct Local {
    best: f64,
    witness: Vec<usize>,
    upper: f64,
    per_depth: Vec<(f64, f64)>,
    max_depth: usize,
    exhausted: bool,
}

impl Local {
    fn new(depth: usize) -> Self {
        Self {
            best: 0.0,
            witness: Vec::new(),
            upper: 0.0,
            per_depth: vec![(0.0, 0.0); depth + 1],
            max_depth: 0,
            exhausted: false,
        }
    }

    fn offer(&mut self, value: f64, word: &[usize]) {
        let better = value > self.best
            || (value == self.best
                && !self.witness.is_empty()
                && (word.len(), word) < (self.witness.len(), self.witness.as_slice()));
        if better || self.witness.is_empty() {
            self.best = value;
            self.witness = word.to_vec();
        }
    }

    fn merge(mut self, other: Local) -> Local {
        if !other.witness.is_empty() {
            self.offer(other.best, &other.witness);
        }
        self.upper = self.upper.max(other.upper);
        for (a, b) in self.per_depth.iter_mut().zip(other.per_depth) {
            a.0 = a.0.max(b.0);
            a.1 = a.1.max(b.1);
        }
        self.max_depth = self.max_depth.max(other.max_depth);
        self.exhausted |= other.exhausted;
        self
    }
}

struct Search<'a> {
    letters: &'a [Matrix],
    norm: &'a MatNorm,
    dominate: Option<(&'a PolyhedralCone, Vector)>,
    delta: f64,
    depth: usize,
    budget: u64,
    prune: bool,
    /// Shallowest depth at which a subtree was cut; deeper levels are incomplete.
    first_cut: AtomicU64,
    lower: AtomicU64,
    nodes: AtomicU64,
}

enum Next {
    Expand,
    Leaf,
}

impl Search<'_> {
    fn lower(&self) -> f64 {
        f64::from_bits(self.lower.load(Ordering::Relaxed))
    }

    fn child(&self, parent: &Node, letter: usize) -> (Node, f64) {
        let a = &self.letters[letter];
        let k = parent.word.len();
        let mut suffixes: Vec<Matrix> = parent.suffixes.iter().map(|s| a * s).collect();
        suffixes.push(a.clone());
        let beta = (0..=k)
            .map(|j| {
                let len = (k + 1 - j) as f64;
                parent.prefix_beta[j].max(self.norm.eval(&suffixes[j]).powf(1.0 / len))
            })
            .fold(f64::INFINITY, f64::min);
        let mut word = parent.word.clone();
        word.push(letter);
        let mut prefix_beta = parent.prefix_beta.clone();
        prefix_beta.push(beta);
        (Node { word, prefix_beta, suffixes }, beta)
    }

    fn process(&self, node: &Node, beta: f64, local: &mut Local) -> Next {
        let t = node.word.len();
        let full = &node.suffixes[0];
        let count = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let inv = 1.0 / t as f64;
        let mut value = spectral_radius(full);
        if !value.is_finite() {
            value = 0.0;
        }
        if let Some((cone, e)) = &self.dominate {
            if let Ok(c) = domination_lower_bound(full, cone, e) {
                value = value.max(c);
            }
        }
        let root = value.max(0.0).powf(inv);
        local.offer(root, &node.word);
        self.lower.fetch_max(root.to_bits(), Ordering::Relaxed);
        let row = &mut local.per_depth[t];
        row.0 = row.0.max(self.norm.eval(full).powf(inv));
        row.1 = row.1.max(root);
        local.max_depth = local.max_depth.max(t);
        if t >= self.depth {
            local.upper = local.upper.max(beta);
            return Next::Leaf;
        }
        if self.prune && beta <= self.lower() + self.delta {
            local.upper = local.upper.max(beta);
            self.first_cut.fetch_min(t as u64, Ordering::Relaxed);
            return Next::Leaf;
        }
        if count >= self.budget {
            local.exhausted = true;
            local.upper = local.upper.max(beta);
            self.first_cut.fetch_min(t as u64, Ordering::Relaxed);
            return Next::Leaf;
        }
        Next::Expand
    }

    fn dfs(&self, node: &Node, local: &mut Local) {
        for letter in 0..self.letters.len() {
            let (child, beta) = self.child(node, letter);
            if let Next::Expand = self.process(&child, beta, local) {
                self.dfs(&child, local);
            }
        }
    }
}

fn search_tree(
    letters: &[Matrix],
    norm: &MatNorm,
    cone: Option<&PolyhedralCone>,
    delta: f64,
    depth: usize,
    budget: u64,
    prune: bool,
) -> TreeResult {
    let m = letters.len();
    let dominate = match norm {
        MatNorm::OrderUnit { e, .. } => cone.map(|c| (c, e.clone())),
        MatNorm::MaxRowSum => None,
    };
    let search = Search {
        letters,
        norm,
        dominate,
        delta,
        depth,
        budget,
        prune,
        first_cut: AtomicU64::new(u64::MAX),
        lower: AtomicU64::new(0f64.to_bits()),
        nodes: AtomicU64::new(0),
    };
    let root = Node { word: Vec::new(), prefix_beta: vec![0.0], suffixes: Vec::new() };
    let mut split = 1;
    while split < depth && (m as f64).powi(split as i32) < 64.0 && split < 4 {
        split += 1;
    }
    let mut local = Local::new(depth);
    let mut frontier = vec![root];
    for _ in 0..split {
        let results: Vec<(Vec<Node>, Local)> = frontier
            .par_iter()
            .map(|node| {
                let mut loc = Local::new(depth);
                let mut keep = Vec::new();
                for letter in 0..m {
                    let (child, beta) = search.child(node, letter);
                    if let Next::Expand = search.process(&child, beta, &mut loc) {
                        keep.push(child);
                    }
                }
                (keep, loc)
            })
            .collect();
        frontier = Vec::new();
        for (keep, loc) in results {
            frontier.extend(keep);
            local = local.merge(loc);
        }
        if frontier.is_empty() {
            break;
        }
    }
    let rest = frontier
        .par_iter()
        .map(|node| {
            let mut loc = Local::new(depth);
            search.dfs(node, &mut loc);
            loc
        })
        .reduce(|| Local::new(depth), Local::merge);
    local = local.merge(rest);
    let first_cut = search.first_cut.load(Ordering::Relaxed);
    let per_depth = (1..=local.max_depth)
        .map(|t| (local.per_depth[t].0, local.per_depth[t].1, t as u64 <= first_cut))
        .collect();
    TreeResult {
        lower: local.best,
        upper: local.upper,
        witness: local.witness,
        depth: local.max_depth,
        per_depth,
        exhausted: local.exhausted,
        nodes: search.nodes.load(Ordering::Relaxed),
    }
}

/// Tighten the leaf bound with the completed depths and keep the interval ordered.
fn finish_upper(tree: &TreeResult) -> f64 {
    let by_depth = tree
        .per_depth
        .iter()
        .filter(|r| r.2)
        .map(|r| r.0)
        .fold(f64::INFINITY, f64::min);
    tree.upper.min(by_depth).max(tree.lower)
}

fn word_from_letters(letters: &[Matrix], word: &[usize], duration: Option<f64>) -> ProductWord {
    let mut m = identity(letters[0].nrows());
    for &i in word {
        m = &letters[i] * m;
    }
    let steps: Vec<Step> = word.iter().map(|&index| Step { index, duration }).collect();
    let t = duration.map_or(word.len() as f64, |h| h * word.len() as f64);
    let log_norm = inf_norm(&m).ln();
    ProductWord { steps, t, matrix: m, log_norm }
}

/// Lower and upper bounds on the growth rate of the family's semigroup.
///
/// Discrete families are searched directly. Continuous families are searched
/// through the letters `e^{A_i h}` for `h`, `h/2`, `h/4`, ... and jump
/// families through `e^{A_k h} Pi_k`; their bounds are per unit time, the
/// lower bounds stay sound and the upper bounds are flagged heuristic.
pub fn jsr_bounds(
    family: &MatrixFamily,
    cone: Option<&PolyhedralCone>,
    params: &JsrParams,
) -> Result<JsrBounds> {
    params.validate()?;
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if let Some(c) = cone {
        if c.dim != family.dim {
            return Err(Error::DimensionMismatch { expected: c.dim, found: family.dim });
        }
    }
    match family.semantics {
        Semantics::Discrete => discrete_bounds(family, cone, params),
        Semantics::Continuous | Semantics::Jump => sampled_bounds(family, cone, params),
    }
}

fn discrete_bounds(
    family: &MatrixFamily,
    cone: Option<&PolyhedralCone>,
    params: &JsrParams,
) -> Result<JsrBounds> {
    let letters = &family.matrices;
    let norm = select_norm(&params.norm, cone, letters)?;
    let tree = search_tree(letters, &norm, cone, params.delta, params.depth, params.budget, params.prune);
    let mut upper = finish_upper(&tree);
    if letters.len() == 1 {
        upper = tree.lower;
    }
    let mut certificate = None;
    if let Some(cone) = cone {
        if upper - tree.lower > params.delta && all_preserve(cone, letters) {
            certificate = polytope_certificate(family, cone, tree.lower, upper, params);
            if let Some(rho) = certificate {
                upper = rho;
            }
        }
    }
    let per_depth = tree
        .per_depth
        .iter()
        .enumerate()
        .map(|(i, r)| DepthRow { t: (i + 1) as f64, norm_bound: r.0, spectral_bound: r.1, complete: r.2 })
        .collect();
    Ok(JsrBounds {
        lower: tree.lower,
        upper,
        depth: tree.depth,
        lower_witness: word_from_letters(letters, &tree.witness, None),
        norm_used: norm.describe(),
        semantics: Semantics::Discrete,
        per_depth,
        complete: (!tree.exhausted || certificate.is_some()) && upper - tree.lower <= params.delta * (1.0 + 1e-12),
        budget_exhausted: tree.exhausted,
        polytope_certificate: certificate,
        heuristic_upper: false,
        nodes: tree.nodes,
        refinement: Vec::new(),
    })
}

/// Smallest level `rho` in `lower + delta * {1/8, 1/2, 1}` at which the
/// functional table of the extremal norm closes. A closed table is a norm
/// with `v(Ax) <= rho v(x)` on the cone for every letter, so `rho` bounds
/// the growth rate.
fn polytope_certificate(
    family: &MatrixFamily,
    cone: &PolyhedralCone,
    lower: f64,
    upper: f64,
    params: &JsrParams,
) -> Option<f64> {
    let base = BaseNorm::order_unit(cone, None).ok()?;
    let budget = params.budget.min(CERTIFICATE_BUDGET);
    [0.125, 0.5, 1.0]
        .iter()
        .map(|s| lower + params.delta * s)
        .filter(|&rho| rho > 0.0 && rho < upper)
        .find(|&rho| {
            build_extremal_norm(family, cone, &base, rho, params.depth, NormMode::Monotone, budget)
                .is_ok_and(|v| v.closed)
        })
}

fn sampled_letters(family: &MatrixFamily, h: f64) -> Result<Vec<Matrix>> {
    match family.semantics {
        Semantics::Continuous => family.matrices.iter().map(|a| matrix_exponential(a, h)).collect(),
        Semantics::Jump => family
            .pairs
            .iter()
            .map(|p| Ok(matrix_exponential(&p.a, h)? * &p.pi))
            .collect(),
        Semantics::Discrete => Ok(family.matrices.clone()),
    }
}

fn sampled_bounds(
    family: &MatrixFamily,
    cone: Option<&PolyhedralCone>,
    params: &JsrParams,
) -> Result<JsrBounds> {
    let budget = (params.budget / params.refinements as u64).max(1);
    let mut best: Option<(f64, Vec<Matrix>, Vec<usize>, f64)> = None;
    let mut refinement = Vec::new();
    let mut last = None;
    let mut nodes = 0;
    let mut exhausted = false;
    for r in 0..params.refinements {
        let h = params.step / 2f64.powi(r as i32);
        let letters = sampled_letters(family, h)?;
        let norm = select_norm(&params.norm, cone, &letters)?;
        let tree = search_tree(&letters, &norm, cone, params.delta * h, params.depth, budget, params.prune);
        nodes += tree.nodes;
        exhausted |= tree.exhausted;
        let lower = tree.lower.powf(1.0 / h);
        let upper = finish_upper(&tree).powf(1.0 / h);
        refinement.push(RefinementRow { step: h, lower, upper });
        if best.as_ref().is_none_or(|b| lower > b.0) {
            best = Some((lower, letters.clone(), tree.witness.clone(), h));
        }
        last = Some((tree, norm, h, upper));
    }
    let (lower, letters, witness, h_best) = best.expect("at least one refinement");
    let (tree, norm, h, upper) = last.expect("at least one refinement");
    let upper = if family.semantics == Semantics::Continuous && family.len() == 1 {
        lower
    } else {
        upper.max(lower)
    };
    let per_depth = tree
        .per_depth
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let t = (i + 1) as f64 * h;
            DepthRow {
                t,
                norm_bound: r.0.powf(1.0 / h),
                spectral_bound: r.1.powf(1.0 / h),
                complete: false,
            }
        })
        .collect();
    Ok(JsrBounds {
        lower,
        upper,
        depth: tree.depth,
        lower_witness: word_from_letters(&letters, &witness, Some(h_best)),
        norm_used: norm.describe(),
        semantics: family.semantics,
        per_depth,
        complete: false,
        budget_exhausted: exhausted,
        polytope_certificate: None,
        heuristic_upper: true,
        nodes,
        refinement,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub samples: usize,
    /// Largest `r(A) / upper` (discrete) or `e^{alpha(A)} / upper` (continuous) seen.
    pub max_ratio: f64,
    pub worst_weights: Vec<f64>,
    pub augmented_lower: f64,
    pub augmented_upper: f64,
    pub intervals_overlap: bool,
}

fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / s).collect()
}

fn combine(family: &MatrixFamily, w: &[f64]) -> Matrix {
    family
        .matrices
        .iter()
        .zip(w)
        .fold(Matrix::zeros(family.dim, family.dim), |acc, (a, &x)| acc + a * x)
}

/// Rate of a single member: `r(A)` for discrete, `e^{alpha(A)}` for continuous semantics.
fn member_rate(semantics: Semantics, a: &Matrix) -> f64 {
    match semantics {
        Semantics::Continuous => spectral_abscissa(a).exp(),
        _ => spectral_radius(a),
    }
}

/// Random convex combinations never grow faster than the family, and adding
/// them to the family leaves the growth rate unchanged.
pub fn convexity_checks(
    family: &MatrixFamily,
    cone: Option<&PolyhedralCone>,
    bounds: &JsrBounds,
    params: &JsrParams,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ConvexityReport> {
    if family.semantics == Semantics::Jump {
        return Err(Error::BadParams("convexity checks need discrete or continuous semantics".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    let mut worst = Vec::new();
    for _ in 0..samples {
        let w = random_weights(&mut rng, family.len());
        let rate = member_rate(family.semantics, &combine(family, &w));
        if rate > bounds.upper + tol {
            return Err(Error::ViolationFound(format!(
                "combination {w:?} has rate {rate} above upper bound {}",
                bounds.upper
            )));
        }
        let ratio = if bounds.upper > 0.0 { rate / bounds.upper } else { 0.0 };
        if ratio > max_ratio || worst.is_empty() {
            max_ratio = max_ratio.max(ratio);
            worst = w;
        }
    }
    let mut augmented = family.matrices.clone();
    for _ in 0..family.len().min(3) {
        let w = random_weights(&mut rng, family.len());
        augmented.push(combine(family, &w));
    }
    let aug_family = MatrixFamily::new(family.semantics, augmented)?;
    let aug = jsr_bounds(&aug_family, cone, params)?;
    let overlap = aug.lower <= bounds.upper + tol && bounds.lower <= aug.upper + tol;
    if !overlap {
        return Err(Error::ViolationFound(format!(
            "augmented family bounds [{}, {}] do not meet [{}, {}]",
            aug.lower, aug.upper, bounds.lower, bounds.upper
        )));
    }
    Ok(ConvexityReport {
        samples,
        max_ratio,
        worst_weights: worst,
        augmented_lower: aug.lower,
        augmented_upper: aug.upper,
        intervals_overlap: overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_rows;

    fn m(rows: &[&[f64]]) -> Matrix {
        from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn shears() -> MatrixFamily {
        MatrixFamily::discrete(vec![m(&[&[1.0, 1.0], &[0.0, 1.0]]), m(&[&[1.0, 0.0], &[1.0, 1.0]])]).unwrap()
    }

    #[test]
    fn spectral_radius_examples() {
        assert!((spectral_radius(&m(&[&[0.0, 2.0], &[0.5, 0.0]])) - 1.0).abs() < 1e-12);
        assert_eq!(spectral_radius(&identity(3)), 1.0);
        let r = spectral_radius(&m(&[&[2.0, 1.0], &[1.0, 1.0]]));
        assert!((r - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn domination_examples() {
        let k = PolyhedralCone::orthant(2);
        let x = Vector::from_vec(vec![1.0, 1.0]);
        assert_eq!(domination_lower_bound(&identity(2), &k, &x).unwrap(), 1.0);
        assert_eq!(domination_lower_bound(&m(&[&[2.0, 0.0], &[0.0, 3.0]]), &k, &x).unwrap(), 2.0);
        assert_eq!(domination_lower_bound(&m(&[&[1.0, 1.0], &[1.0, 1.0]]), &k, &x).unwrap(), 2.0);
        let edge = Vector::from_vec(vec![1.0, 0.0]);
        assert_eq!(domination_lower_bound(&identity(2), &k, &edge), Err(Error::NotInterior { index: 0 }));
    }

    #[test]
    fn singleton_is_exact() {
        let fam = MatrixFamily::discrete(vec![m(&[&[0.0, 2.0], &[0.5, 0.0]])]).unwrap();
        let b = jsr_bounds(&fam, None, &JsrParams::default()).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-8 && (b.upper - 1.0).abs() < 1e-8);
        assert!(b.depth <= 2);
        assert!(b.complete);
    }

    #[test]
    fn permutation_pair_has_unit_rate() {
        let fam = MatrixFamily::discrete(vec![m(&[&[0.0, 1.0], &[1.0, 0.0]]), identity(2)]).unwrap();
        let b = jsr_bounds(&fam, Some(&PolyhedralCone::orthant(2)), &JsrParams::default()).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12);
        assert!((b.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shear_pair_reaches_golden_ratio() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let params = JsrParams { depth: 2, prune: false, ..JsrParams::default() };
        let b = jsr_bounds(&shears(), None, &params).unwrap();
        assert!(b.lower >= phi - 1e-12);
        assert_eq!(b.lower_witness.len(), 2);
        let b = jsr_bounds(&shears(), Some(&PolyhedralCone::orthant(2)), &JsrParams::default()).unwrap();
        assert!(b.lower >= phi - 1e-12);
        assert!(b.upper - b.lower <= 0.02 + 1e-12, "{} {}", b.lower, b.upper);
        assert!(b.complete);
        let b = jsr_bounds(&shears(), None, &JsrParams::default()).unwrap();
        assert!(b.upper - b.lower <= 0.02 + 1e-12, "{} {}", b.lower, b.upper);
    }

    #[test]
    fn witness_prefers_short_words() {
        let fam = MatrixFamily::discrete(vec![identity(2) * 2.0, identity(2) * 2.0]).unwrap();
        let b = jsr_bounds(&fam, None, &JsrParams::default()).unwrap();
        assert_eq!(b.lower_witness.indices(), vec![0]);
    }

    #[test]
    fn continuous_commuting_pair() {
        let a = m(&[&[-1.0, 0.0], &[0.0, -2.0]]);
        let b = m(&[&[-3.0, 0.0], &[0.0, 0.5]]);
        let fam = MatrixFamily::continuous(vec![a, b]).unwrap();
        let r = jsr_bounds(&fam, Some(&PolyhedralCone::orthant(2)), &JsrParams::default()).unwrap();
        assert!(r.heuristic_upper);
        assert!((r.lower.ln() - 0.5).abs() < 1e-9, "{}", r.lower.ln());
        assert!((r.upper.ln() - 0.5).abs() < 1e-6, "{}", r.upper.ln());
        assert_eq!(r.refinement.len(), 3);
    }

    #[test]
    fn jump_lower_bound() {
        let fam = MatrixFamily::jump(vec![(m(&[&[0.5, 0.0], &[0.0, -1.0]]), identity(2))]).unwrap();
        let r = jsr_bounds(&fam, None, &JsrParams::default()).unwrap();
        assert!((r.lower.ln() - 0.5).abs() < 1e-9);
        assert!(r.heuristic_upper);
    }

    #[test]
    fn bad_params_rejected() {
        let p = JsrParams { delta: -1.0, ..JsrParams::default() };
        assert!(matches!(jsr_bounds(&shears(), None, &p), Err(Error::BadParams(_))));
        let p = JsrParams { depth: 0, ..JsrParams::default() };
        assert!(matches!(jsr_bounds(&shears(), None, &p), Err(Error::BadParams(_))));
    }

    #[test]
    fn polytope_certificate_closes_slow_gap() {
        let a = from_rows(&[vec![0.6665521296457567, 0.8179402745439172], vec![0.42200681173673305, 0.10947331351995891]]);
        let b = from_rows(&[vec![0.15874197248992294, 0.4406640533317002], vec![0.9763194869522742, 0.5450549573890019]]);
        let fam = MatrixFamily::discrete(vec![a.clone(), b]).unwrap();
        let k = PolyhedralCone::orthant(2);
        let p = JsrParams { delta: 1e-3, budget: 20_000, ..JsrParams::default() };
        let r = jsr_bounds(&fam, Some(&k), &p).unwrap();
        assert!(r.polytope_certificate.is_some());
        assert!((r.lower - spectral_radius(&a)).abs() < 1e-12);
        assert!(r.upper - r.lower <= 1e-3 && r.complete);
        let plain = jsr_bounds(&fam, None, &p).unwrap();
        assert!(plain.polytope_certificate.is_none() && plain.upper - plain.lower > 1e-3);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let p = JsrParams { budget: 20, delta: 0.0, ..JsrParams::default() };
        let b = jsr_bounds(&shears(), None, &p).unwrap();
        assert!(b.budget_exhausted);
        assert!(!b.complete);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn convexity_examples() {
        let k = PolyhedralCone::orthant(2);
        let params = JsrParams::default();
        let single = MatrixFamily::discrete(vec![m(&[&[1.0, 2.0], &[0.5, 1.0]])]).unwrap();
        let b = jsr_bounds(&single, Some(&k), &params).unwrap();
        let r = convexity_checks(&single, Some(&k), &b, &params, 10, 1, 1e-8).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-9);

        let pair = MatrixFamily::discrete(vec![m(&[&[0.0, 1.0], &[1.0, 0.0]]), identity(2)]).unwrap();
        let b = jsr_bounds(&pair, Some(&k), &params).unwrap();
        let r = convexity_checks(&pair, Some(&k), &b, &params, 50, 2, 1e-8).unwrap();
        assert!(r.max_ratio <= 1.0 + 1e-12);

        let b = jsr_bounds(&shears(), Some(&k), &params).unwrap();
        let mid = m(&[&[1.0, 0.5], &[0.5, 1.0]]);
        assert!((spectral_radius(&mid) - 1.5).abs() < 1e-12);
        assert!(spectral_radius(&mid) <= b.upper);
        convexity_checks(&shears(), Some(&k), &b, &params, 100, 3, 1e-8).unwrap();
    }

    #[test]
    fn fabricated_bounds_are_caught() {
        let fam = shears();
        let mut b = jsr_bounds(&fam, None, &JsrParams::default()).unwrap();
        b.upper = 1.0;
        assert!(matches!(
            convexity_checks(&fam, None, &b, &JsrParams::default(), 50, 4, 1e-8),
            Err(Error::ViolationFound(_))
        ));
    }
}
