#![allow(dead_code)]

use conejsr_core::linalg::from_rows;
use conejsr_core::{Matrix, MatrixFamily, PolyhedralCone, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn m(rows: &[&[f64]]) -> Matrix {
    from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

pub fn swap() -> Matrix {
    m(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn shears() -> MatrixFamily {
    MatrixFamily::discrete(vec![m(&[&[1.0, 1.0], &[0.0, 1.0]]), m(&[&[1.0, 0.0], &[1.0, 1.0]])]).unwrap()
}

/// Random simplicial cone whose basis is a perturbation of the identity.
pub fn random_simplicial(n: usize, r: &mut ChaCha8Rng) -> PolyhedralCone {
    loop {
        let basis: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { r.random_range(-0.4..0.4) }).collect())
            .collect();
        if let Ok(c) = PolyhedralCone::simplicial(&basis) {
            return c;
        }
    }
}

/// Cone over a convex polygon with `k` vertices at height one.
pub fn polygon_cone(k: usize, r: &mut ChaCha8Rng) -> PolyhedralCone {
    let mut angles: Vec<f64> = (0..k)
        .map(|i| std::f64::consts::TAU * (i as f64 + r.random_range(-0.3..0.3)) / k as f64)
        .collect();
    angles.sort_by(f64::total_cmp);
    let gens: Vec<Vec<f64>> = angles.iter().map(|a| vec![a.cos(), a.sin(), 1.0]).collect();
    PolyhedralCone::general(&gens, None).unwrap()
}

/// Orthant, random simplicial or polygonal cone in dimension 2 to 4.
pub fn random_cone(r: &mut ChaCha8Rng) -> PolyhedralCone {
    match r.random_range(0..4) {
        0 => PolyhedralCone::orthant(r.random_range(2..=4)),
        1 | 2 => random_simplicial(r.random_range(2..=4), r),
        _ => polygon_cone(r.random_range(4..=6), r),
    }
}

/// Random point of the cone: nonnegative combination of generators.
pub fn cone_point(cone: &PolyhedralCone, r: &mut ChaCha8Rng) -> Vector {
    cone.generators.iter().fold(Vector::zeros(cone.dim), |acc, g| {
        let w = if r.random_bool(0.3) { 0.0 } else { r.random::<f64>() };
        acc + g * w
    })
}

pub fn gaussian_vector(n: usize, r: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(n, |_, _| r.random_range(-1.0..1.0))
}

/// `c I + sum c_ij g_i h_j^T` with nonnegative weights: every rank-one term maps the cone into a ray of it.
pub fn random_cone_preserving(cone: &PolyhedralCone, r: &mut ChaCha8Rng, density: f64) -> Matrix {
    let n = cone.dim;
    let mut a = Matrix::identity(n, n) * r.random_range(0.0..0.5);
    for g in &cone.generators {
        for h in &cone.facets {
            if r.random_bool(density) {
                a += g * h.transpose() * r.random::<f64>();
            }
        }
    }
    a
}

/// Nonnegative matrix whose entries vanish with probability `zeros`.
pub fn random_nonnegative(n: usize, zeros: f64, r: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(n, n, |_, _| if r.random_bool(zeros) { 0.0 } else { r.random_range(0.1..1.0) })
}

/// Metzler matrix with random sparse off-diagonal pattern.
pub fn random_metzler(n: usize, zeros: f64, r: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            r.random_range(-2.0..1.0)
        } else if r.random_bool(zeros) {
            0.0
        } else {
            r.random_range(0.1..1.0)
        }
    })
}

/// Brute-force oracle for the orthant: a family is reducible iff some
/// nonempty proper coordinate set `S` has `a_ij = 0` for all `i` outside and `j` inside `S`.
pub fn orthant_reducible(mats: &[Matrix]) -> bool {
    let n = mats[0].nrows();
    (1..(1u32 << n) - 1).any(|s| {
        mats.iter().all(|a| {
            (0..n).all(|i| (0..n).all(|j| !(s >> j & 1 == 1 && s >> i & 1 == 0) || a[(i, j)] == 0.0))
        })
    })
}

/// Carathéodory oracle for membership: `x` lies in the cone spanned by some
/// `n` linearly independent generators with nonnegative coefficients.
pub fn in_cone_by_generators(cone: &PolyhedralCone, x: &Vector, tol: f64) -> bool {
    let n = cone.dim;
    let k = cone.generators.len();
    let mut found = false;
    conejsr_core::linalg::for_each_subset(k, n, |s| {
        let g = Matrix::from_fn(n, n, |i, j| cone.generators[s[j]][i]);
        if let Some(inv) = g.try_inverse() {
            let c = inv * x;
            if c.iter().all(|&v| v >= -tol) {
                found = true;
                return false;
            }
        }
        true
    });
    found
}
