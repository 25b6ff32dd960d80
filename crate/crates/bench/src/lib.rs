//! Fixtures shared by the benchmarks.

use conejsr_core::linalg::from_rows;
use conejsr_core::{Matrix, MatrixFamily, PolyhedralCone};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn shear_pair() -> MatrixFamily {
    MatrixFamily::discrete(vec![
        from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]),
        from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]),
    ])
    .unwrap()
}

pub fn swap_identity() -> MatrixFamily {
    MatrixFamily::discrete(vec![
        from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
        from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]),
    ])
    .unwrap()
}

/// `m` random nonnegative `n x n` matrices.
pub fn random_nonnegative(n: usize, m: usize, seed: u64) -> MatrixFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats: Vec<Matrix> = (0..m).map(|_| Matrix::from_fn(n, n, |_, _| rng.random::<f64>())).collect();
    MatrixFamily::discrete(mats).unwrap()
}

/// Cone over a regular polygon with `k` vertices at height one.
pub fn polygon_cone(k: usize) -> PolyhedralCone {
    let gens: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / k as f64;
            vec![a.cos(), a.sin(), 1.0]
        })
        .collect();
    PolyhedralCone::general(&gens, None).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use conejsr_core::is_cone_preserving;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(random_nonnegative(3, 2, 7), random_nonnegative(3, 2, 7));
        assert_eq!(shear_pair().len(), 2);
    }

    #[test]
    fn polygon_fixture_is_proper() {
        let k: PolyhedralCone = polygon_cone(6);
        assert_eq!(k.generators.len(), 6);
        assert!(is_cone_preserving(&Matrix::identity(3, 3), &k).unwrap().holds);
    }
}
