mod common;

use common::*;
use conejsr_core::problem::{JsrTask, NormTask, SimulateTask};
use conejsr_core::{parse_problem, ConeSpec, Matrix, MatrixFamily, NormMode, ProblemSpec, PolyhedralCone, Tasks};
use proptest::prelude::*;
use rand::Rng;

fn round(x: f64) -> f64 {
    (x * 64.0).round() / 64.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn documents_roundtrip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=3);
        let (cone_spec, cone) = match r.random_range(0..2) {
            0 => (ConeSpec::orthant(n), PolyhedralCone::orthant(n)),
            _ => {
                let basis: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else if j > i { round(r.random_range(0.0..1.0)) } else { 0.0 }).collect()).collect();
                (ConeSpec::simplicial(basis.clone()), PolyhedralCone::simplicial(&basis).unwrap())
            }
        };
        let k = r.random_range(1..=3);
        let mats: Vec<Matrix> = (0..k).map(|_| Matrix::from_fn(n, n, |_, _| round(r.random_range(-2.0..2.0)))).collect();
        let mut family = if r.random_bool(0.5) { MatrixFamily::discrete(mats).unwrap() } else { MatrixFamily::continuous(mats).unwrap() };
        if r.random_bool(0.5) {
            family = family.with_labels((0..k).map(|i| format!("m{i}")).collect());
        }
        let tasks = Tasks {
            jsr: r.random_bool(0.5).then(|| JsrTask { depth: Some(r.random_range(1..12)), delta: Some(1e-3), ..JsrTask::default() }),
            norm: r.random_bool(0.5).then(|| NormTask { depth: Some(4), mode: Some(NormMode::Absolute), ..NormTask::default() }),
            simulate: r.random_bool(0.5).then(|| SimulateTask {
                x0: (0..n).map(|_| round(r.random_range(0.0..1.0))).collect(),
                signal: vec![(0, 1.5), (k - 1, 0.25)],
                ..SimulateTask::default()
            }),
            lipschitz: None,
        };
        let spec = ProblemSpec { cone_spec, cone, family, tasks };
        let doc = spec.to_document();
        prop_assert_eq!(parse_problem(&doc).unwrap(), spec);
    }
}
