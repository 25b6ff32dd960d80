//! Discrete, continuous and jump semigroups as enumerable product structures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm::matrix_exponential;
use crate::linalg::{identity, inf_norm, Matrix};

/// Default node budget for unpruned enumeration.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;
pub const DEFAULT_JUMP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Discrete,
    Continuous,
    Jump,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpPair {
    pub a: Matrix,
    pub pi: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFamily {
    pub semantics: Semantics,
    pub dim: usize,
    /// Members for discrete and continuous semantics; the `A` of each pair for jump.
    pub matrices: Vec<Matrix>,
    pub pairs: Vec<JumpPair>,
    /// Distinct projections of a jump family.
    pub projections: Vec<Matrix>,
    pub labels: Option<Vec<String>>,
}

fn check_uniform(mats: &[&Matrix]) -> Result<usize> {
    let first = mats.first().ok_or(Error::EmptyFamily)?;
    let n = first.nrows();
    for (k, m) in mats.iter().enumerate() {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(k));
        }
        if m.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
        }
    }
    Ok(n)
}

impl MatrixFamily {
    pub fn discrete(matrices: Vec<Matrix>) -> Result<Self> {
        Self::plain(Semantics::Discrete, matrices)
    }

    pub fn continuous(matrices: Vec<Matrix>) -> Result<Self> {
        Self::plain(Semantics::Continuous, matrices)
    }

    pub fn jump(pairs: Vec<(Matrix, Matrix)>) -> Result<Self> {
        validate_jump_family(pairs, DEFAULT_JUMP_TOL)
    }

    pub fn new(semantics: Semantics, matrices: Vec<Matrix>) -> Result<Self> {
        Self::plain(semantics, matrices)
    }

    fn plain(semantics: Semantics, matrices: Vec<Matrix>) -> Result<Self> {
        if semantics == Semantics::Jump {
            return Err(Error::BadParams("jump families are built from pairs".into()));
        }
        let dim = check_uniform(&matrices.iter().collect::<Vec<_>>())?;
        Ok(Self { semantics, dim, matrices, pairs: Vec::new(), projections: Vec::new(), labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    fn require(&self, semantics: Semantics) -> Result<()> {
        if self.semantics != semantics {
            return Err(Error::BadParams(format!(
                "operation needs {semantics:?} semantics, family is {:?}",
                self.semantics
            )));
        }
        Ok(())
    }

    /// Uniform convex combination of the members.
    pub fn mean(&self) -> Matrix {
        let sum = self.matrices.iter().fold(Matrix::zeros(self.dim, self.dim), |acc, m| acc + m);
        sum / self.matrices.len() as f64
    }
}

/// One letter of a word: a member index and, outside discrete semantics, a duration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Step {
    pub index: usize,
    pub duration: Option<f64>,
}

/// An evaluated element of the semigroup. Steps are listed in time order, so
/// the matrix is the product of their factors from right (first) to left (last).
#[derive(Clone, Debug, PartialEq)]
pub struct ProductWord {
    pub steps: Vec<Step>,
    pub t: f64,
    pub matrix: Matrix,
    pub log_norm: f64,
}

impl ProductWord {
    pub fn identity(n: usize) -> Self {
        Self { steps: Vec::new(), t: 0.0, matrix: identity(n), log_norm: 0.0 }
    }

    fn from_parts(steps: Vec<Step>, t: f64, matrix: Matrix) -> Self {
        let log_norm = inf_norm(&matrix).ln();
        Self { steps, t, matrix, log_norm }
    }

    pub fn indices(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.index).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The word that runs `first` and then `self`; its matrix is `self.matrix * first.matrix`.
    pub fn after(&self, first: &ProductWord) -> ProductWord {
        let mut steps = first.steps.clone();
        steps.extend_from_slice(&self.steps);
        Self::from_parts(steps, self.t + first.t, &self.matrix * &first.matrix)
    }

    /// Evaluate a discrete word given by indices in time order.
    pub fn discrete(family: &MatrixFamily, word: &[usize]) -> Result<Self> {
        let mut m = identity(family.dim);
        for &i in word {
            let a = family
                .matrices
                .get(i)
                .ok_or(Error::IndexOutOfRange { index: i, len: family.len() })?;
            m = a * m;
        }
        let steps = word.iter().map(|&index| Step { index, duration: None }).collect();
        Ok(Self::from_parts(steps, word.len() as f64, m))
    }
}

/// Outcome of a product enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct EnumerationStats {
    pub visited: u64,
    pub pruned: u64,
    pub budget_exhausted: bool,
}

/// Stream every discrete word of length `1..=depth` depth-first, in
/// lexicographic order of the index sequence (time order).
///
/// `prune(word)` returning true cuts the subtree below `word` (the word itself
/// is still visited). Without a prune predicate the total number of words must
/// fit in `budget`; with one, enumeration stops when the budget is spent.
pub fn enumerate_products(
    family: &MatrixFamily,
    depth: usize,
    budget: u64,
    prune: Option<&dyn Fn(&ProductWord) -> bool>,
    mut visit: impl FnMut(&ProductWord),
) -> Result<EnumerationStats> {
    family.require(Semantics::Discrete)?;
    let k = family.len() as f64;
    if prune.is_none() {
        let total: f64 = (1..=depth).map(|d| k.powi(d as i32)).sum();
        if total > budget as f64 {
            return Err(Error::BudgetExceeded { budget });
        }
    }
    let mut stats = EnumerationStats::default();
    let root = ProductWord::identity(family.dim);
    dfs(family, &root, depth, budget, prune, &mut visit, &mut stats);
    Ok(stats)
}

fn dfs(
    family: &MatrixFamily,
    word: &ProductWord,
    remaining: usize,
    budget: u64,
    prune: Option<&dyn Fn(&ProductWord) -> bool>,
    visit: &mut impl FnMut(&ProductWord),
    stats: &mut EnumerationStats,
) {
    if remaining == 0 {
        return;
    }
    for (index, a) in family.matrices.iter().enumerate() {
        if stats.visited >= budget {
            stats.budget_exhausted = true;
            return;
        }
        let mut steps = word.steps.clone();
        steps.push(Step { index, duration: None });
        let child = ProductWord::from_parts(steps, word.t + 1.0, a * &word.matrix);
        stats.visited += 1;
        visit(&child);
        if prune.is_some_and(|p| p(&child)) {
            stats.pruned += 1;
            continue;
        }
        dfs(family, &child, remaining - 1, budget, prune, visit, stats);
    }
}

/// All discrete words up to `depth`, collected in stream order.
pub fn collect_products(family: &MatrixFamily, depth: usize) -> Result<Vec<ProductWord>> {
    let mut out = Vec::new();
    enumerate_products(family, depth, DEFAULT_ENUM_BUDGET, None, |w| out.push(w.clone()))?;
    Ok(out)
}

/// `pieces` equal durations summing to `t`.
pub fn uniform_grid(t: f64, pieces: usize) -> Vec<f64> {
    vec![t / pieces as f64; pieces]
}

fn check_grid(t: f64, grid: &[f64]) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::BadGrid(format!("total time {t} must be positive")));
    }
    if grid.is_empty() {
        return Err(Error::BadGrid("empty grid".into()));
    }
    if let Some(d) = grid.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(Error::BadGrid(format!("nonpositive duration {d}")));
    }
    let sum: f64 = grid.iter().sum();
    if (sum - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::BadGrid(format!("durations sum to {sum}, expected {t}")));
    }
    Ok(())
}

/// Stream `e^{A_{j_k} tau_k} ... e^{A_{j_1} tau_1}` over every index choice
/// for a fixed duration grid. Index tuples are visited lexicographically.
pub fn continuous_slice(
    family: &MatrixFamily,
    t: f64,
    grid: &[f64],
    budget: u64,
    mut visit: impl FnMut(&ProductWord),
) -> Result<EnumerationStats> {
    family.require(Semantics::Continuous)?;
    check_grid(t, grid)?;
    let k = family.len();
    let total = (k as f64).powi(grid.len() as i32);
    if total > budget as f64 {
        return Err(Error::BudgetExceeded { budget });
    }
    let exps: Vec<Vec<Matrix>> = grid
        .iter()
        .map(|&tau| family.matrices.iter().map(|a| matrix_exponential(a, tau)).collect())
        .collect::<Result<_>>()?;
    let mut choice = vec![0usize; grid.len()];
    let mut stats = EnumerationStats::default();
    loop {
        let mut m = identity(family.dim);
        for (slot, &j) in choice.iter().enumerate() {
            m = &exps[slot][j] * m;
        }
        let steps = choice
            .iter()
            .zip(grid)
            .map(|(&index, &d)| Step { index, duration: Some(d) })
            .collect();
        visit(&ProductWord::from_parts(steps, t, m));
        stats.visited += 1;
        let mut pos = grid.len();
        loop {
            if pos == 0 {
                return Ok(stats);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < k {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Check `Pi^2 = Pi` and `A Pi = Pi A` for every pair and collect the distinct projections.
pub fn validate_jump_family(pairs: Vec<(Matrix, Matrix)>, tol: f64) -> Result<MatrixFamily> {
    let all: Vec<&Matrix> = pairs.iter().flat_map(|(a, p)| [a, p]).collect();
    let dim = check_uniform(&all).map_err(|e| match e {
        Error::NotSquare(k) => Error::NotSquare(k / 2),
        other => other,
    })?;
    let mut projections: Vec<Matrix> = Vec::new();
    for (k, (a, pi)) in pairs.iter().enumerate() {
        let pn = pi.norm();
        if (pi * pi - pi).norm() > tol * pn.max(1.0).powi(2) {
            return Err(Error::NotProjection(k));
        }
        if (a * pi - pi * a).norm() > tol * (a.norm() * pn).max(1.0) {
            return Err(Error::NotCommuting(k));
        }
        if !projections.iter().any(|q| (q - pi).norm() <= tol * pn.max(1.0)) {
            projections.push(pi.clone());
        }
    }
    let (matrices, pairs): (Vec<Matrix>, Vec<JumpPair>) = pairs
        .into_iter()
        .map(|(a, pi)| (a.clone(), JumpPair { a, pi }))
        .unzip();
    Ok(MatrixFamily { semantics: Semantics::Jump, dim, matrices, pairs, projections, labels: None })
}

/// `e^{A_k tau_k} Pi_k ... e^{A_0 tau_0} Pi_0` for a switching signal in time order.
pub fn evolve_jump(family: &MatrixFamily, signal: &[(usize, f64)]) -> Result<ProductWord> {
    family.require(Semantics::Jump)?;
    let mut m = identity(family.dim);
    let mut t = 0.0;
    let mut steps = Vec::with_capacity(signal.len());
    for &(index, tau) in signal {
        let pair = family
            .pairs
            .get(index)
            .ok_or(Error::IndexOutOfRange { index, len: family.pairs.len() })?;
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::BadGrid(format!("negative duration {tau}")));
        }
        m = matrix_exponential(&pair.a, tau)? * &pair.pi * m;
        t += tau;
        steps.push(Step { index, duration: Some(tau) });
    }
    Ok(ProductWord::from_parts(steps, t, m))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProjectionDiagnostic {
    BoundedUpToDepth { depth: usize, max_norm: f64 },
    Exceeded { word: Vec<usize>, norm: f64 },
}

/// Search projection products up to `depth` for one whose max-row-sum norm
/// exceeds `threshold`. Levels are scanned shortest first, lexicographically
/// within a level, so the reported word is the first such word in that order.
pub fn projection_product_diagnostic(
    projections: &[Matrix],
    depth: usize,
    threshold: f64,
) -> ProjectionDiagnostic {
    let Some(first) = projections.first() else {
        return ProjectionDiagnostic::BoundedUpToDepth { depth, max_norm: 0.0 };
    };
    let n = first.nrows();
    let mut level: Vec<(Vec<usize>, Matrix)> = vec![(Vec::new(), identity(n))];
    let mut max_norm: f64 = 0.0;
    for _ in 0..depth {
        let mut next: Vec<(Vec<usize>, Matrix)> = Vec::new();
        for (word, m) in &level {
            for (i, p) in projections.iter().enumerate() {
                let prod = p * m;
                let scale = inf_norm(&prod).max(1.0);
                if next.iter().any(|(_, q)| (q - &prod).amax() <= 1e-12 * scale) {
                    continue;
                }
                let mut w = word.clone();
                w.push(i);
                next.push((w, prod));
            }
        }
        for (word, m) in &next {
            let norm = inf_norm(m);
            if norm > threshold {
                return ProjectionDiagnostic::Exceeded { word: word.clone(), norm };
            }
            max_norm = max_norm.max(norm);
        }
        level = next;
    }
    ProjectionDiagnostic::BoundedUpToDepth { depth, max_norm }
}
