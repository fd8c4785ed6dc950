#![allow(dead_code)]

use esr_core::{DiscreteDistribution, ReturnLattice, RewardVector};
use rand::Rng;

pub const GRID_TOP: i64 = 6;

pub fn grid(dims: usize) -> ReturnLattice {
    ReturnLattice::integer(0, GRID_TOP, dims).unwrap()
}

/// Integer mass units over lattice points; probabilities are `units / total`.
#[derive(Debug, Clone)]
pub struct Units {
    pub cells: Vec<(Vec<i64>, u64)>,
}

impl Units {
    pub fn total(&self) -> u64 {
        self.cells.iter().map(|c| c.1).sum()
    }

    pub fn to_distribution(&self, dims: usize) -> DiscreteDistribution {
        let t = self.total() as f64;
        DiscreteDistribution::new(
            grid(dims),
            self.cells.iter().map(|(p, k)| {
                (
                    RewardVector(p.iter().map(|&x| x as f64).collect()),
                    *k as f64 / t,
                )
            }),
        )
        .unwrap()
    }

    /// Σ units·x on objective 0, exact.
    pub fn scaled_first_moment(&self) -> i128 {
        self.cells
            .iter()
            .map(|(p, k)| p[0] as i128 * *k as i128)
            .sum()
    }
}

pub fn random_point<R: Rng>(rng: &mut R, dims: usize) -> Vec<i64> {
    (0..dims).map(|_| rng.random_range(0..=GRID_TOP)).collect()
}

pub fn random_units<R: Rng>(rng: &mut R, dims: usize, max_atoms: usize, total: u64) -> Units {
    let atoms = rng.random_range(1..=max_atoms);
    let mut cells: Vec<(Vec<i64>, u64)> =
        (0..atoms).map(|_| (random_point(rng, dims), 0)).collect();
    for _ in 0..total {
        let i = rng.random_range(0..atoms);
        cells[i].1 += 1;
    }
    cells.retain(|c| c.1 > 0);
    Units { cells }
}

/// A point weakly above `p` and strictly above it on at least one objective,
/// or `None` when `p` is the top corner.
pub fn raise<R: Rng>(rng: &mut R, p: &[i64]) -> Option<Vec<i64>> {
    let open: Vec<usize> = (0..p.len()).filter(|&i| p[i] < GRID_TOP).collect();
    if open.is_empty() {
        return None;
    }
    let mut q = p.to_vec();
    let forced = open[rng.random_range(0..open.len())];
    q[forced] = rng.random_range(p[forced] + 1..=GRID_TOP);
    for &i in &open {
        if i != forced && rng.random_bool(0.5) {
            q[i] = rng.random_range(p[i]..=GRID_TOP);
        }
    }
    Some(q)
}

/// `(dominant, dominated)`: the dominant side moves `moves` mass units of the
/// dominated side to Pareto-better points.
pub fn upward_transport_pair<R: Rng>(
    rng: &mut R,
    dims: usize,
    max_atoms: usize,
    total: u64,
) -> (Units, Units) {
    loop {
        let low = random_units(rng, dims, max_atoms, total);
        let mut high = low.clone();
        let moves = rng.random_range(1..=total);
        let mut moved = 0;
        for _ in 0..moves {
            let live: Vec<usize> = (0..high.cells.len())
                .filter(|&i| high.cells[i].1 > 0)
                .collect();
            let i = live[rng.random_range(0..live.len())];
            if let Some(q) = raise(rng, &high.cells[i].0.clone()) {
                high.cells[i].1 -= 1;
                high.cells.push((q, 1));
                moved += 1;
            }
        }
        if moved > 0 {
            high.cells.retain(|c| c.1 > 0);
            return (high, low);
        }
    }
}

/// Distribution with continuous random weights on a handful of lattice points.
pub fn random_continuous<R: Rng>(
    rng: &mut R,
    dims: usize,
    max_atoms: usize,
) -> DiscreteDistribution {
    let atoms = rng.random_range(1..=max_atoms);
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    DiscreteDistribution::new(
        grid(dims),
        raw.iter().map(|w| {
            (
                RewardVector(
                    random_point(rng, dims)
                        .into_iter()
                        .map(|x| x as f64)
                        .collect(),
                ),
                w / sum,
            )
        }),
    )
    .unwrap()
}
