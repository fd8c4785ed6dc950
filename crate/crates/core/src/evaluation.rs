//! Coverage ratio: F1 of the found solution distributions against the true
//! ESR set, where a found distribution counts as a hit when its KS distance to
//! some true distribution is at most `epsilon`.

use serde::Serialize;

use crate::distribution::{ks_distance, DiscreteDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Every `(found, truth)` pair within `epsilon`.
    pub matched_pairs: Vec<(usize, usize)>,
}

fn check(truth: &[DiscreteDistribution], epsilon: f64) -> Result<()> {
    if truth.is_empty() {
        return Err(Error::NoCandidates);
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

fn matched_pairs(
    found: &[DiscreteDistribution],
    truth: &[DiscreteDistribution],
    epsilon: f64,
) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (i, f) in found.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            if ks_distance(f, t)? <= epsilon {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// Indices of found distributions within `epsilon` of some true distribution.
pub fn coverage_intersection(
    found: &[DiscreteDistribution],
    truth: &[DiscreteDistribution],
    epsilon: f64,
) -> Result<Vec<usize>> {
    check(truth, epsilon)?;
    let mut hits: Vec<usize> = matched_pairs(found, truth, epsilon)?
        .into_iter()
        .map(|p| p.0)
        .collect();
    hits.dedup();
    Ok(hits)
}

pub fn coverage_ratio(
    found: &[DiscreteDistribution],
    truth: &[DiscreteDistribution],
    epsilon: f64,
) -> Result<CoverageResult> {
    check(truth, epsilon)?;
    let pairs = matched_pairs(found, truth, epsilon)?;
    let mut found_hit = vec![false; found.len()];
    let mut truth_hit = vec![false; truth.len()];
    for &(i, j) in &pairs {
        found_hit[i] = true;
        truth_hit[j] = true;
    }
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as f64;
    let precision = if found.is_empty() {
        0.0
    } else {
        count(&found_hit) / found.len() as f64
    };
    let recall = count(&truth_hit) / truth.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(CoverageResult {
        precision,
        recall,
        f1,
        matched_pairs: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{ReturnLattice, RewardVector};
    use crate::environment::preset;

    fn pm(x: f64, y: f64) -> DiscreteDistribution {
        DiscreteDistribution::point_mass(
            ReturnLattice::integer(0, 10, 2).unwrap(),
            RewardVector(vec![x, y]),
        )
        .unwrap()
    }

    fn arm1(p: f64) -> DiscreteDistribution {
        DiscreteDistribution::new(
            ReturnLattice::integer(0, 10, 2).unwrap(),
            [
                (RewardVector(vec![0., 1.]), p),
                (RewardVector(vec![5., 4.]), 1.0 - p),
            ],
        )
        .unwrap()
    }

    #[test]
    fn intersection_examples() {
        let env = preset("momab5").unwrap();
        let truth = vec![
            env.exact_distribution(0).unwrap(),
            env.exact_distribution(4).unwrap(),
        ];
        assert_eq!(
            coverage_intersection(&truth, &truth, 0.01).unwrap(),
            vec![0, 1]
        );
        assert!(coverage_intersection(&[pm(0., 0.)], &[pm(10., 10.)], 0.01)
            .unwrap()
            .is_empty());
        let near = arm1(0.401);
        assert!((ks_distance(&near, &truth[0]).unwrap() - 0.001).abs() < 1e-12);
        assert_eq!(
            coverage_intersection(&[near], &truth, 0.01).unwrap(),
            vec![0]
        );
        assert!(coverage_intersection(&truth, &[], 0.01).is_err());
        assert!(coverage_intersection(&truth, &truth, 0.0).is_err());
    }

    #[test]
    fn ratio_examples() {
        let env = preset("momab5").unwrap();
        let truth = vec![
            env.exact_distribution(0).unwrap(),
            env.exact_distribution(4).unwrap(),
        ];
        let full = coverage_ratio(&truth, &truth, 0.01).unwrap();
        assert_eq!((full.precision, full.recall, full.f1), (1.0, 1.0, 1.0));

        let half = coverage_ratio(&truth[..1], &truth, 0.01).unwrap();
        assert_eq!((half.precision, half.recall), (1.0, 0.5));
        assert!((half.f1 - 2.0 / 3.0).abs() < 1e-12);

        let empty = coverage_ratio(&[], &truth, 0.01).unwrap();
        assert_eq!((empty.precision, empty.recall, empty.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn duplicates_do_not_inflate_recall() {
        let truth = vec![arm1(0.4), pm(9., 9.)];
        let found = vec![arm1(0.4), arm1(0.402), arm1(0.405)];
        let r = coverage_ratio(&found, &truth, 0.01).unwrap();
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 0.5);
        assert_eq!(r.matched_pairs, vec![(0, 0), (1, 0), (2, 0)]);
    }
}
