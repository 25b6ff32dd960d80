mod common;

use common::*;
use conejsr_core::{eccentricity, hausdorff_distance, BaseNorm, EccMethod, Matrix, MatrixNorm, PolyhedralGauge, Vector};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_set(n: usize, r: &mut ChaCha8Rng) -> Vec<Matrix> {
    (0..r.random_range(1..=3)).map(|_| Matrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0))).collect()
}

fn norms(n: usize, r: &mut ChaCha8Rng) -> Vec<MatrixNorm> {
    vec![
        MatrixNorm::Spectral,
        MatrixNorm::MaxRowSum,
        MatrixNorm::MaxColSum,
        MatrixNorm::Frobenius,
        MatrixNorm::Induced(random_gauge(n, r)),
    ]
}

/// The sup norm with a few extra random functionals, so the unit ball stays bounded.
fn random_gauge(n: usize, r: &mut ChaCha8Rng) -> PolyhedralGauge {
    let mut f: Vec<Vector> = (0..n).map(|i| Vector::from_fn(n, |j, _| f64::from(i == j))).collect();
    f.extend((0..r.random_range(1..4)).map(|_| gaussian_vector(n, r)));
    PolyhedralGauge::new(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=3);
        let (a, b, c) = (random_set(n, &mut r), random_set(n, &mut r), random_set(n, &mut r));
        for norm in norms(n, &mut r) {
            let ab = hausdorff_distance(&a, &b, &norm).unwrap();
            prop_assert_eq!(ab, hausdorff_distance(&b, &a, &norm).unwrap());
            prop_assert_eq!(hausdorff_distance(&a, &a, &norm).unwrap(), 0.0);
            prop_assert!(ab >= 0.0);
            let ac = hausdorff_distance(&a, &c, &norm).unwrap();
            let cb = hausdorff_distance(&c, &b, &norm).unwrap();
            prop_assert!(ab <= (ac + cb) * (1.0 + 1e-12), "{} {}", norm.name(), ab);
        }
    }

    #[test]
    fn distances_in_equivalent_norms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=3);
        let (a, b) = (random_set(n, &mut r), random_set(n, &mut r));
        let g = random_gauge(n, &mut r);
        let base = BaseNorm::sup(n);
        let ecc = eccentricity(&g, &base, EccMethod::Vertex).unwrap().ecc;
        let hv = hausdorff_distance(&a, &b, &MatrixNorm::Induced(g)).unwrap();
        let hb = hausdorff_distance(&a, &b, &MatrixNorm::Induced(base.gauge.clone())).unwrap();
        prop_assert!(hv <= ecc * hb * (1.0 + 1e-9));
        prop_assert!(hb <= ecc * hv * (1.0 + 1e-9));
        let hs = hausdorff_distance(&a, &b, &MatrixNorm::MaxRowSum).unwrap();
        prop_assert!((hs - hb).abs() <= 1e-12 * hs.max(1.0));
    }
}
