use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{DiscreteDistribution, ReturnLattice};
use crate::error::{Error, Result};

/// A strictly increasing utility `u: R^D -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MonotoneUtility {
    /// `sum_d w_d * g(x_d - origin_d; p_d)` with `g(t; p) = sign(t) |t|^p`.
    ///
    /// `g` is strictly increasing for any `p > 0`, so the sum is too. Every
    /// cross-partial is zero.
    Separable {
        weights: Vec<f64>,
        powers: Vec<f64>,
        origin: Vec<f64>,
    },
    /// `exp(sum_d r_d * x_d)`: a product of increasing factors whose
    /// cross-partials are positive.
    Exponential { rates: Vec<f64> },
}

impl MonotoneUtility {
    pub fn linear(weights: Vec<f64>) -> Self {
        let d = weights.len();
        MonotoneUtility::Separable {
            weights,
            powers: vec![1.0; d],
            origin: vec![0.0; d],
        }
    }

    /// `x_1^2 + ... + x_D^2` on the non-negative orthant.
    pub fn sum_of_squares(dims: usize) -> Self {
        MonotoneUtility::Separable {
            weights: vec![1.0; dims],
            powers: vec![2.0; dims],
            origin: vec![0.0; dims],
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            MonotoneUtility::Separable { weights, .. } => weights.len(),
            MonotoneUtility::Exponential { rates } => rates.len(),
        }
    }

    pub fn cross_partial_nonpositive(&self) -> bool {
        matches!(self, MonotoneUtility::Separable { .. })
    }

    pub fn is_linear(&self) -> bool {
        match self {
            MonotoneUtility::Separable { powers, .. } => powers.iter().all(|&p| p == 1.0),
            MonotoneUtility::Exponential { .. } => false,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            MonotoneUtility::Separable {
                weights,
                powers,
                origin,
            } => x
                .iter()
                .zip(weights)
                .zip(powers)
                .zip(origin)
                .map(|(((x, w), p), o)| {
                    let t = x - o;
                    if *p == 1.0 {
                        w * t
                    } else {
                        w * t.signum() * t.abs().powf(*p)
                    }
                })
                .sum(),
            MonotoneUtility::Exponential { rates } => {
                x.iter().zip(rates).map(|(x, r)| x * r).sum::<f64>().exp()
            }
        }
    }

    fn check(&self, dims: usize) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: self.dims(),
            });
        }
        Ok(())
    }
}

/// `E[u(X)]`: scalarise each outcome, then average.
pub fn expected_utility(dist: &DiscreteDistribution, u: &MonotoneUtility) -> Result<f64> {
    u.check(dist.dims())?;
    if dist.atoms().is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(dist.support().map(|(x, p)| p * u.eval(&x)).sum())
}

/// `u(E[X])`: average first, then scalarise.
pub fn utility_of_expectation(dist: &DiscreteDistribution, u: &MonotoneUtility) -> Result<f64> {
    u.check(dist.dims())?;
    if dist.atoms().is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(u.eval(dist.expectation().as_slice()))
}

/// Deterministic family of monotone utilities over `dims` objectives.
///
/// The first member is always the equal-weight linear utility. With
/// `require_cross_partial_nonpositive`, every member is additively separable
/// with weights in (0, 1] and powers in (0, 1], measured from `origin`.
/// Otherwise every other member is drawn from the exponential family.
pub fn sample_monotone_utilities(
    count: usize,
    dims: usize,
    origin: f64,
    seed: u64,
    require_cross_partial_nonpositive: bool,
) -> Vec<MonotoneUtility> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(MonotoneUtility::Separable {
        weights: vec![1.0; dims],
        powers: vec![1.0; dims],
        origin: vec![origin; dims],
    });
    for k in 1..count {
        if !require_cross_partial_nonpositive && k % 2 == 0 {
            out.push(MonotoneUtility::Exponential {
                rates: (0..dims).map(|_| rng.random_range(0.01..0.3)).collect(),
            });
        } else {
            out.push(MonotoneUtility::Separable {
                weights: (0..dims)
                    .map(|_| 1.0 - rng.random::<f64>() * 0.95)
                    .collect(),
                powers: (0..dims)
                    .map(|_| 1.0 - rng.random::<f64>() * 0.95)
                    .collect(),
                origin: vec![origin; dims],
            });
        }
    }
    out
}

/// Samples `pairs` lattice pairs `a >= b` (strict on one objective) and checks `u(a) > u(b)`.
pub fn spot_check_monotone(
    u: &MonotoneUtility,
    lattice: &ReturnLattice,
    pairs: usize,
    seed: u64,
) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = lattice.points_per_axis();
    let d = lattice.dims();
    for _ in 0..pairs {
        let lo: Vec<usize> = (0..d).map(|_| rng.random_range(0..n)).collect();
        let mut hi: Vec<usize> = lo.iter().map(|&i| rng.random_range(i..n)).collect();
        if hi == lo {
            let axis = rng.random_range(0..d);
            if lo[axis] + 1 < n {
                hi[axis] += 1;
            } else {
                continue;
            }
        }
        let a: Vec<f64> = hi.iter().map(|&i| lattice.value(i)).collect();
        let b: Vec<f64> = lo.iter().map(|&i| lattice.value(i)).collect();
        if u.eval(&a) <= u.eval(&b) {
            return false;
        }
    }
    true
}
