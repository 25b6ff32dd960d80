//! Single-matrix classification with respect to a cone.

use serde::Serialize;

use crate::cone::{PolyhedralCone, Verdict};
use crate::error::{Error, Result};
use crate::irreducibility::boundary_eigenvector;
pub use crate::expm::matrix_exponential;
use crate::linalg::{Matrix, Vector};

/// Sample times `2^k, k = -3..=3` used for exponential positivity checks.
pub const DEFAULT_EXP_TIMES: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// A violating (generator, facet) pair together with the image vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapWitness {
    pub generator: usize,
    pub facet: usize,
    pub slack: f64,
    pub image: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapCheck {
    pub holds: bool,
    pub witness: Option<MapWitness>,
}

impl MapCheck {
    fn pass() -> Self {
        Self { holds: true, witness: None }
    }

    fn fail(w: MapWitness) -> Self {
        Self { holds: false, witness: Some(w) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpPositivity {
    TrueOnSamples,
    False,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpPositivityReport {
    pub verdict: ExpPositivity,
    pub reason: String,
    pub failing_time: Option<f64>,
    pub witness: Option<MapWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapClassification {
    pub cone_preserving: bool,
    pub k_positive: bool,
    pub cross_positive: bool,
    pub exp_k_positive: ExpPositivity,
    /// Witness for every failed property, keyed by property name.
    pub witnesses: Vec<(String, MapWitness)>,
}

fn check_square(a: &Matrix, cone: &PolyhedralCone) -> Result<()> {
    if a.nrows() != cone.dim {
        return Err(Error::DimensionMismatch { expected: cone.dim, found: a.nrows() });
    }
    if a.ncols() != cone.dim {
        return Err(Error::DimensionMismatch { expected: cone.dim, found: a.ncols() });
    }
    Ok(())
}

fn argmin_facet(cone: &PolyhedralCone, y: &Vector) -> (usize, f64) {
    cone.slacks(y)
        .into_iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (j, s)| if s < best.1 { (j, s) } else { best })
}

fn witness(cone: &PolyhedralCone, generator: usize, y: Vector) -> MapWitness {
    let (facet, slack) = argmin_facet(cone, &y);
    MapWitness { generator, facet, slack, image: y.iter().copied().collect() }
}

pub fn is_cone_preserving(a: &Matrix, cone: &PolyhedralCone) -> Result<MapCheck> {
    check_square(a, cone)?;
    for (i, g) in cone.generators.iter().enumerate() {
        let y = a * g;
        if !cone.contains(&y) {
            return Ok(MapCheck::fail(witness(cone, i, y)));
        }
    }
    Ok(MapCheck::pass())
}

/// `A (K \ {0}) ⊂ int K`, decided on the generators.
pub fn is_k_positive(a: &Matrix, cone: &PolyhedralCone) -> Result<MapCheck> {
    check_square(a, cone)?;
    for (i, g) in cone.generators.iter().enumerate() {
        let y = a * g;
        if cone.classify_point(&y).verdict != Verdict::Interior {
            return Ok(MapCheck::fail(witness(cone, i, y)));
        }
    }
    Ok(MapCheck::pass())
}

/// Tangency test on every incident (generator, facet) pair: `h_j . A g_i >= 0`
/// whenever `h_j . g_i = 0`. For the orthant this is the Metzler sign pattern.
pub fn is_cross_positive(a: &Matrix, cone: &PolyhedralCone) -> Result<MapCheck> {
    check_square(a, cone)?;
    let mut worst: Option<MapWitness> = None;
    for (i, g) in cone.generators.iter().enumerate() {
        let y = a * g;
        let scale = y.norm().max(1.0);
        for (j, h) in cone.facets.iter().enumerate() {
            if !cone.incidence[i][j] {
                continue;
            }
            let s = h.dot(&y);
            if s < -cone.threshold(j, scale) && worst.as_ref().is_none_or(|w| s < w.slack) {
                worst = Some(MapWitness {
                    generator: i,
                    facet: j,
                    slack: s,
                    image: y.iter().copied().collect(),
                });
            }
        }
    }
    Ok(worst.map_or_else(MapCheck::pass, MapCheck::fail))
}

/// Three-valued check that `e^{At}` is K-positive for `t > 0`, on sampled times.
pub fn is_exp_k_positive(
    a: &Matrix,
    cone: &PolyhedralCone,
    times: &[f64],
) -> Result<ExpPositivityReport> {
    let cp = is_cross_positive(a, cone)?;
    if !cp.holds {
        return Ok(ExpPositivityReport {
            verdict: ExpPositivity::False,
            reason: "not cross-positive".into(),
            failing_time: None,
            witness: cp.witness,
        });
    }
    for &t in times {
        let e = match matrix_exponential(a, t) {
            Ok(e) => e,
            Err(err) => {
                return Ok(ExpPositivityReport {
                    verdict: ExpPositivity::Inconclusive,
                    reason: format!("exponential failed at t={t}: {err}"),
                    failing_time: Some(t),
                    witness: None,
                })
            }
        };
        let kp = is_k_positive(&e, cone)?;
        if !kp.holds {
            return Ok(ExpPositivityReport {
                verdict: ExpPositivity::False,
                reason: format!("e^(At) is not K-positive at t={t}"),
                failing_time: Some(t),
                witness: kp.witness,
            });
        }
    }
    match boundary_eigenvector(a, cone) {
        Ok(search) => match search.found {
            Some((x, lambda)) => Ok(ExpPositivityReport {
                verdict: ExpPositivity::False,
                reason: format!("eigenvector on the boundary for eigenvalue {lambda}: {:?}", x.as_slice()),
                failing_time: None,
                witness: None,
            }),
            None => Ok(ExpPositivityReport {
                verdict: ExpPositivity::TrueOnSamples,
                reason: format!("K-positive at {} sampled times, no boundary eigenvector", times.len()),
                failing_time: None,
                witness: None,
            }),
        },
        Err(err) => Ok(ExpPositivityReport {
            verdict: ExpPositivity::Inconclusive,
            reason: err.to_string(),
            failing_time: None,
            witness: None,
        }),
    }
}

pub fn classify_map(a: &Matrix, cone: &PolyhedralCone) -> Result<MapClassification> {
    let cp = is_cone_preserving(a, cone)?;
    let kp = is_k_positive(a, cone)?;
    let xp = is_cross_positive(a, cone)?;
    let exp = is_exp_k_positive(a, cone, &DEFAULT_EXP_TIMES)?;
    let mut witnesses = Vec::new();
    for (name, check) in [("cone_preserving", &cp), ("k_positive", &kp), ("cross_positive", &xp)] {
        if let Some(w) = &check.witness {
            witnesses.push((name.to_string(), w.clone()));
        }
    }
    if let Some(w) = exp.witness {
        witnesses.push(("exp_k_positive".to_string(), w));
    }
    Ok(MapClassification {
        cone_preserving: cp.holds,
        k_positive: kp.holds,
        cross_positive: xp.holds,
        exp_k_positive: exp.verdict,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_rows, identity};

    fn m(rows: &[&[f64]]) -> Matrix {
        from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn cone_preserving_examples() {
        let k = PolyhedralCone::orthant(2);
        assert!(is_cone_preserving(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), &k).unwrap().holds);
        let c = is_cone_preserving(&m(&[&[1.0, -1.0], &[0.0, 1.0]]), &k).unwrap();
        assert!(!c.holds);
        let w = c.witness.unwrap();
        assert_eq!(w.generator, 1);
        assert_eq!(w.image, vec![-1.0, 1.0]);
        assert_eq!(w.slack, -1.0);
        let skew = PolyhedralCone::simplicial(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(is_cone_preserving(&identity(2), &skew).unwrap().holds);
        assert!(matches!(
            is_cone_preserving(&identity(3), &k),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn k_positive_examples() {
        let k = PolyhedralCone::orthant(2);
        assert!(is_k_positive(&m(&[&[1.0, 1.0], &[1.0, 1.0]]), &k).unwrap().holds);
        assert!(!is_k_positive(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), &k).unwrap().holds);
        assert!(!is_k_positive(&identity(2), &k).unwrap().holds);
    }

    #[test]
    fn cross_positive_examples() {
        let k = PolyhedralCone::orthant(2);
        assert!(is_cross_positive(&m(&[&[-5.0, 2.0], &[3.0, -7.0]]), &k).unwrap().holds);
        let c = is_cross_positive(&m(&[&[0.0, -1.0], &[1.0, 0.0]]), &k).unwrap();
        assert!(!c.holds);
        let w = c.witness.unwrap();
        assert_eq!((w.generator, w.facet, w.slack), (1, 0, -1.0));
        let b = m(&[&[0.0, 1.0], &[2.0, 0.5]]);
        for lambda in [-10.0, -1.0, 0.0, 3.0] {
            assert!(is_cross_positive(&(&b + identity(2) * lambda), &k).unwrap().holds);
        }
    }

    #[test]
    fn exp_positivity_examples() {
        let k = PolyhedralCone::orthant(2);
        let r = is_exp_k_positive(&m(&[&[-1.0, 2.0], &[0.5, -1.0]]), &k, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(r.verdict, ExpPositivity::TrueOnSamples);
        let r = is_exp_k_positive(&m(&[&[-1.0, 0.0], &[1.0, -1.0]]), &k, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(r.verdict, ExpPositivity::False);
        let r = is_exp_k_positive(&m(&[&[0.0, -1.0], &[1.0, 0.0]]), &k, &[1.0]).unwrap();
        assert_eq!(r.verdict, ExpPositivity::False);
        assert_eq!(r.reason, "not cross-positive");
    }

    #[test]
    fn classification_chain() {
        let k = PolyhedralCone::orthant(2);
        let c = classify_map(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), &k).unwrap();
        assert!(c.cone_preserving && c.cross_positive && !c.k_positive);
        assert_eq!(c.witnesses.len(), 1);
    }
}
