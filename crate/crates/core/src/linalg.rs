//! Small dense linear-algebra helpers shared by the cone and semigroup code.

use nalgebra::{Complex, DMatrix, DVector, Schur};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    Matrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Operator norm induced by the max norm (maximal absolute row sum).
pub fn inf_norm(m: &Matrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Operator norm induced by the 1-norm (maximal absolute column sum).
pub fn one_norm(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn matrix_power(m: &Matrix, k: usize) -> Matrix {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Numerical rank with singular values below `rel_tol * max(1, sigma_max)` treated as zero.
pub fn rank(m: &Matrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let thr = rel_tol * smax.max(1.0);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &Matrix, rel_tol: f64) -> Matrix {
    let n = m.ncols();
    if m.nrows() == 0 {
        return identity(n);
    }
    let square = if m.nrows() < n {
        let mut padded = Matrix::zeros(n, n);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = rel_tol * smax.max(1.0);
    let cols: Vec<Vector> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= thr)
        .map(|i| v_t.row(i).transpose())
        .collect();
    columns_to_matrix(n, &cols)
}

/// Orthonormal basis (as columns) of the span of the given vectors.
pub fn orthonormal_basis(n: usize, vectors: &[Vector], rel_tol: f64) -> Matrix {
    if vectors.is_empty() {
        return Matrix::zeros(n, 0);
    }
    let m = columns_to_matrix(n, vectors);
    let svd = m.svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = rel_tol * smax.max(1.0);
    let cols: Vec<Vector> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > thr)
        .map(|i| u.column(i).into_owned())
        .collect();
    columns_to_matrix(n, &cols)
}

pub fn columns_to_matrix(n: usize, cols: &[Vector]) -> Matrix {
    Matrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// All eigenvalues of a square matrix via the real Schur form.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Complex<f64>>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex::new(m[(0, 0)], 0.0)]);
    }
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Spectral radius, i.e. the largest eigenvalue modulus.
pub fn spectral_radius(m: &Matrix) -> f64 {
    match eigenvalues(m) {
        Ok(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Err(_) => f64::NAN,
    }
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa(m: &Matrix) -> f64 {
    match eigenvalues(m) {
        Ok(ev) => ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
        Err(_) => f64::NAN,
    }
}

/// Binomial coefficient as f64 (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Visit every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn count_subsets(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else {
        binomial(n, k)
    }
}
