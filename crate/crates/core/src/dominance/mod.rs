//! Pareto, first-order stochastic and ESR dominance, and the solution sets
//! built from them.
//!
//! All distribution comparisons run on a finite grid derived from the
//! support coordinates of the two operands. Discrete CDFs only change value
//! at those coordinates, so the grid gives the same answer as the full
//! lattice (and remains exact when supports are shifted off-lattice).

mod utility;

pub use utility::{
    expected_utility, sample_monotone_utilities, spot_check_monotone, utility_of_expectation,
    MonotoneUtility,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distribution::{
    axis_coordinates, for_each_grid_point, DiscreteDistribution, RewardVector, ZTable,
};
use crate::error::{Error, Result};

/// Probabilities closer than this are treated as equal before strictness is judged.
pub const PROB_TOL: f64 = 1e-12;

/// Which characterisation of ESR dominance to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Lower joint CDF everywhere, strictly lower somewhere.
    #[default]
    Cdf,
    /// Higher probability of Pareto-dominating every point, strictly higher somewhere.
    Pdf,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Cdf => "cdf",
            Criterion::Pdf => "pdf",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cdf" => Ok(Criterion::Cdf),
            "pdf" => Ok(Criterion::Pdf),
            other => Err(Error::InvalidParameter(format!(
                "unknown criterion {other:?}"
            ))),
        }
    }
}

/// Outcome of comparing two distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceVerdict {
    FirstDominates,
    SecondDominates,
    Incomparable,
    Identical,
}

impl DominanceVerdict {
    /// The verdict with the operands swapped.
    pub fn mirrored(self) -> Self {
        match self {
            DominanceVerdict::FirstDominates => DominanceVerdict::SecondDominates,
            DominanceVerdict::SecondDominates => DominanceVerdict::FirstDominates,
            other => other,
        }
    }
}

/// True iff `a` is at least `b` on every objective and better on one.
pub fn pareto_dominates(a: &RewardVector, b: &RewardVector) -> Result<bool> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    Ok(pareto_dominates_slice(a.as_slice(), b.as_slice()))
}

fn pareto_dominates_slice(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

// Weak and strict "better than" flags in both directions, from one grid pass.
#[derive(Debug, Clone, Copy)]
struct Relation {
    a_weak: bool,
    a_strict: bool,
    b_weak: bool,
    b_strict: bool,
}

impl Relation {
    fn a_dominates(&self) -> bool {
        self.a_weak && self.a_strict
    }

    fn b_dominates(&self) -> bool {
        self.b_weak && self.b_strict
    }

    fn verdict(&self) -> DominanceVerdict {
        if self.a_dominates() {
            DominanceVerdict::FirstDominates
        } else if self.b_dominates() {
            DominanceVerdict::SecondDominates
        } else if self.a_weak && self.b_weak {
            DominanceVerdict::Identical
        } else {
            DominanceVerdict::Incomparable
        }
    }
}

fn check_pair(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    if a.atoms().is_empty() || b.atoms().is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(())
}

/// Compares lower-is-better scores `sa`, `sb` accumulated over a grid.
fn accumulate(rel: &mut Relation, sa: f64, sb: f64) {
    if sa > sb + PROB_TOL {
        rel.a_weak = false;
        rel.b_strict = true;
    } else if sb > sa + PROB_TOL {
        rel.b_weak = false;
        rel.a_strict = true;
    }
}

const UNDECIDED: Relation = Relation {
    a_weak: true,
    a_strict: false,
    b_weak: true,
    b_strict: false,
};

fn cdf_relation(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Relation {
    let axes = axis_coordinates(&[a, b]);
    let mut rel = UNDECIDED;
    for_each_grid_point(&axes, |v| {
        accumulate(&mut rel, a.cdf_unchecked(v), b.cdf_unchecked(v));
    });
    rel
}

fn pdf_relation(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Relation {
    // The survival function P(X Pareto-dominates v) changes at support
    // coordinates and is constant strictly between them, so each axis needs
    // the coordinates, the gaps between them and one value below all of them.
    let axes: Vec<Vec<f64>> = axis_coordinates(&[a, b])
        .into_iter()
        .map(|coords| {
            let mut ext = Vec::with_capacity(2 * coords.len() + 1);
            ext.push(coords[0] - 1.0);
            for (i, &c) in coords.iter().enumerate() {
                if i > 0 {
                    ext.push(0.5 * (coords[i - 1] + c));
                }
                ext.push(c);
            }
            ext
        })
        .collect();
    let mut rel = UNDECIDED;
    for_each_grid_point(&axes, |v| {
        // higher survival is better, so negate to reuse the lower-is-better fold
        accumulate(
            &mut rel,
            -a.pareto_survival_unchecked(v),
            -b.pareto_survival_unchecked(v),
        );
    });
    rel
}

fn relation(a: &DiscreteDistribution, b: &DiscreteDistribution, criterion: Criterion) -> Relation {
    match criterion {
        Criterion::Cdf => cdf_relation(a, b),
        Criterion::Pdf => pdf_relation(a, b),
    }
}

/// Weak first-order stochastic dominance for scalar distributions.
pub fn fsd_dominates_scalar(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<bool> {
    for d in [a, b] {
        if d.dims() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: d.dims(),
            });
        }
    }
    check_pair(a, b)?;
    Ok(cdf_relation(a, b).a_weak)
}

/// Weak FSD on joint CDFs: `F_a <= F_b` everywhere.
pub fn fsd_dominates(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<bool> {
    check_pair(a, b)?;
    Ok(cdf_relation(a, b).a_weak)
}

/// ESR dominance through joint CDFs.
pub fn esr_dominates_cdf(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<bool> {
    check_pair(a, b)?;
    Ok(cdf_relation(a, b).a_dominates())
}

/// ESR dominance through Pareto-survival probabilities.
pub fn esr_dominates_pdf(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<bool> {
    check_pair(a, b)?;
    Ok(pdf_relation(a, b).a_dominates())
}

pub fn esr_dominates(
    a: &DiscreteDistribution,
    b: &DiscreteDistribution,
    criterion: Criterion,
) -> Result<bool> {
    match criterion {
        Criterion::Cdf => esr_dominates_cdf(a, b),
        Criterion::Pdf => esr_dominates_pdf(a, b),
    }
}

/// Full verdict for one ordered pair.
pub fn compare(
    a: &DiscreteDistribution,
    b: &DiscreteDistribution,
    criterion: Criterion,
) -> Result<DominanceVerdict> {
    check_pair(a, b)?;
    Ok(relation(a, b, criterion).verdict())
}

fn check_candidates(candidates: &[DiscreteDistribution]) -> Result<()> {
    let first = candidates.first().ok_or(Error::NoCandidates)?;
    for c in candidates {
        check_pair(first, c)?;
    }
    Ok(())
}

/// Verdict for every ordered pair; the diagonal is `Identical`.
pub fn verdict_matrix(
    candidates: &[DiscreteDistribution],
    criterion: Criterion,
) -> Result<Vec<Vec<DominanceVerdict>>> {
    check_candidates(candidates)?;
    let n = candidates.len();
    let mut m = vec![vec![DominanceVerdict::Identical; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = relation(&candidates[i], &candidates[j], criterion).verdict();
            m[i][j] = v;
            m[j][i] = v.mirrored();
        }
    }
    Ok(m)
}

/// Indices of candidates that no other candidate ESR-dominates.
pub fn esr_set(candidates: &[DiscreteDistribution], criterion: Criterion) -> Result<Vec<usize>> {
    check_candidates(candidates)?;
    Ok(undominated_by(candidates, |a, b| {
        let r = relation(a, b, criterion);
        (r.a_dominates(), r.b_dominates())
    }))
}

/// Indices of candidates not strictly below another under the weak FSD order.
/// Equal dominant distributions are all kept.
pub fn fsd_undominated_set(candidates: &[DiscreteDistribution]) -> Result<Vec<usize>> {
    check_candidates(candidates)?;
    Ok(undominated_by(candidates, |a, b| {
        let r = cdf_relation(a, b);
        (r.a_weak && !r.b_weak, r.b_weak && !r.a_weak)
    }))
}

// `beats(a, b)` returns (a beats b, b beats a).
fn undominated_by(
    candidates: &[DiscreteDistribution],
    beats: impl Fn(&DiscreteDistribution, &DiscreteDistribution) -> (bool, bool),
) -> Vec<usize> {
    let n = candidates.len();
    let mut dominated = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            let (i_beats_j, j_beats_i) = beats(&candidates[i], &candidates[j]);
            dominated[j] |= i_beats_j;
            dominated[i] |= j_beats_i;
        }
    }
    (0..n).filter(|&i| !dominated[i]).collect()
}

/// Indices of vectors not Pareto-dominated by any other vector.
pub fn pareto_front(vectors: &[RewardVector]) -> Result<Vec<usize>> {
    let first = vectors.first().ok_or(Error::NoCandidates)?;
    for v in vectors {
        if v.dims() != first.dims() {
            return Err(Error::DimensionMismatch {
                expected: first.dims(),
                found: v.dims(),
            });
        }
    }
    Ok((0..vectors.len())
        .filter(|&i| {
            !vectors
                .iter()
                .any(|other| pareto_dominates_slice(other.as_slice(), vectors[i].as_slice()))
        })
        .collect())
}

/// Pareto front of the candidates' mean return vectors.
pub fn pareto_front_of_expectations(candidates: &[ZTable]) -> Result<Vec<usize>> {
    let means = candidates
        .iter()
        .map(ZTable::expectation)
        .collect::<Result<Vec<_>>>()?;
    pareto_front(&means)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::ReturnLattice;

    fn lat() -> ReturnLattice {
        ReturnLattice::integer(0, 10, 2).unwrap()
    }

    fn dist(outcomes: &[(f64, [f64; 2])]) -> DiscreteDistribution {
        DiscreteDistribution::new(
            lat(),
            outcomes.iter().map(|(p, r)| (RewardVector::from(*r), *p)),
        )
        .unwrap()
    }

    fn scalar(outcomes: &[(f64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::new(
            ReturnLattice::integer(0, 10, 1).unwrap(),
            outcomes.iter().map(|(p, r)| (RewardVector(vec![*r]), *p)),
        )
        .unwrap()
    }

    fn momab() -> Vec<DiscreteDistribution> {
        vec![
            dist(&[(0.4, [0., 1.]), (0.6, [5., 4.])]),
            dist(&[(0.85, [1., 0.]), (0.15, [3., 2.])]),
            dist(&[(0.75, [2., 0.]), (0.25, [4., 2.])]),
            dist(&[(0.8, [0., 1.]), (0.2, [1., 2.])]),
            dist(&[(0.7, [2., 0.]), (0.3, [4., 5.])]),
        ]
    }

    #[test]
    fn pareto_examples() {
        let v = |x: f64, y: f64| RewardVector(vec![x, y]);
        assert!(pareto_dominates(&v(4., 3.), &v(2., 3.)).unwrap());
        assert!(!pareto_dominates(&v(2., 3.), &v(3., 2.)).unwrap());
        assert!(!pareto_dominates(&v(3., 2.), &v(2., 3.)).unwrap());
        assert!(!pareto_dominates(&v(2., 3.), &v(2., 3.)).unwrap());
        assert!(pareto_dominates(&v(1., 1.), &RewardVector(vec![1.0])).is_err());
    }

    #[test]
    fn scalar_fsd_examples() {
        let five = scalar(&[(1.0, 5.0)]);
        let three = scalar(&[(1.0, 3.0)]);
        assert!(fsd_dominates_scalar(&five, &three).unwrap());
        assert!(!fsd_dominates_scalar(&three, &five).unwrap());
        assert!(fsd_dominates_scalar(&five, &five).unwrap());
        let spread = scalar(&[(0.5, 1.0), (0.5, 3.0)]);
        let middle = scalar(&[(0.5, 2.0), (0.5, 2.0)]);
        assert!(!fsd_dominates_scalar(&spread, &middle).unwrap());
        assert!(!fsd_dominates_scalar(&middle, &spread).unwrap());
        assert!(fsd_dominates_scalar(&momab()[0], &momab()[1]).is_err());
    }

    #[test]
    fn cdf_dominance_examples() {
        let arms = momab();
        assert!(esr_dominates_cdf(&arms[0], &arms[3]).unwrap());
        assert!((arms[0].cdf(&[1., 2.]).unwrap() - 0.4).abs() < 1e-12);
        assert!((arms[3].cdf(&[1., 2.]).unwrap() - 1.0).abs() < 1e-12);
        assert!(!esr_dominates_cdf(&arms[0], &arms[4]).unwrap());
        assert!(!esr_dominates_cdf(&arms[4], &arms[0]).unwrap());
        assert!(!esr_dominates_cdf(&arms[0], &arms[0]).unwrap());
        assert_eq!(
            compare(&arms[0], &arms[4], Criterion::Cdf).unwrap(),
            DominanceVerdict::Incomparable
        );
        assert_eq!(
            compare(&arms[0], &arms[0], Criterion::Cdf).unwrap(),
            DominanceVerdict::Identical
        );
    }

    #[test]
    fn pdf_dominance_examples() {
        let arms = momab();
        assert!(esr_dominates_pdf(&arms[4], &arms[1]).unwrap());
        assert!(!esr_dominates_pdf(&arms[1], &arms[4]).unwrap());
        assert!(!esr_dominates_pdf(&arms[0], &arms[0]).unwrap());
        let hi = dist(&[(1.0, [5., 5.])]);
        let lo = dist(&[(1.0, [0., 0.])]);
        assert!(esr_dominates_pdf(&hi, &lo).unwrap());
        assert!((hi.pareto_survival_unchecked(&[0., 0.]) - 1.0).abs() < 1e-12);
        assert_eq!(lo.pareto_survival_unchecked(&[0., 0.]), 0.0);
    }

    #[test]
    fn survival_grid_sees_gaps_between_coordinates() {
        // 1-D: Pareto survival is P(X > v); the two point masses only differ
        // strictly between 1 and 2 and at 1.
        let l = ReturnLattice::integer(0, 10, 1).unwrap();
        let one = DiscreteDistribution::point_mass(l.clone(), RewardVector(vec![1.0])).unwrap();
        let two = DiscreteDistribution::point_mass(l, RewardVector(vec![2.0])).unwrap();
        assert!(esr_dominates_pdf(&two, &one).unwrap());
        assert!(!esr_dominates_pdf(&one, &two).unwrap());
    }

    #[test]
    fn momab_sets() {
        let arms = momab();
        assert_eq!(esr_set(&arms, Criterion::Cdf).unwrap(), vec![0, 4]);
        assert_eq!(esr_set(&arms, Criterion::Pdf).unwrap(), vec![0, 4]);
        let und = fsd_undominated_set(&arms).unwrap();
        assert!([0, 4].iter().all(|i| und.contains(i)));
        assert!(esr_set(&[], Criterion::Cdf).is_err());
        assert_eq!(esr_set(&arms[2..3], Criterion::Cdf).unwrap(), vec![0]);
        assert_eq!(fsd_undominated_set(&arms[2..3]).unwrap(), vec![0]);
    }

    #[test]
    fn identical_dominant_pair_is_kept() {
        let arms = momab();
        let cands = vec![arms[0].clone(), arms[0].clone(), arms[3].clone()];
        assert_eq!(fsd_undominated_set(&cands).unwrap(), vec![0, 1]);
        assert_eq!(esr_set(&cands, Criterion::Cdf).unwrap(), vec![0, 1]);
    }

    #[test]
    fn verdict_matrix_is_antisymmetric() {
        let m = verdict_matrix(&momab(), Criterion::Cdf).unwrap();
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, m[j][i].mirrored());
            }
        }
        assert_eq!(m[0][3], DominanceVerdict::FirstDominates);
        assert_eq!(m[1][4], DominanceVerdict::SecondDominates);
    }

    #[test]
    fn pareto_front_examples() {
        let tables: Vec<ZTable> = momab()
            .iter()
            .map(|d| {
                // exact masses as integer counts out of 100
                let mut t = ZTable::new(lat());
                for (p, m) in d.support() {
                    for _ in 0..(m * 100.0).round() as usize {
                        t.update(&RewardVector(p.clone())).unwrap();
                    }
                }
                t
            })
            .collect();
        assert_eq!(pareto_front_of_expectations(&tables).unwrap(), vec![0]);
        let v = |x: f64, y: f64| RewardVector(vec![x, y]);
        assert_eq!(
            pareto_front(&[v(1., 1.), v(1., 1.), v(1., 1.)]).unwrap(),
            vec![0, 1, 2]
        );
        assert_eq!(pareto_front(&[v(1., 2.), v(2., 1.)]).unwrap(), vec![0, 1]);
        assert!(pareto_front_of_expectations(&[ZTable::new(lat())]).is_err());
    }

    #[test]
    fn criterion_parses() {
        assert_eq!("CDF".parse::<Criterion>().unwrap(), Criterion::Cdf);
        assert_eq!("pdf".parse::<Criterion>().unwrap(), Criterion::Pdf);
        assert!("ssd".parse::<Criterion>().is_err());
    }
}
