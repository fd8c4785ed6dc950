//! Empirical return distributions over a discrete reward lattice.
//!
//! A [`ZTable`] counts how often each lattice point was observed for one arm.
//! Dividing by the pull count gives the empirical mass function, and summing
//! masses over the lower orthant of a point gives the joint CDF.
//!
//! A [`DiscreteDistribution`] is an immutable snapshot of that mass function,
//! optionally translated by a per-objective shift. The shift is kept as
//! metadata and applied when the CDF is evaluated, so real-valued exploration
//! bonuses never get re-binned onto the lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used when comparing coordinates (`x <= v` is tested as `x <= v + COORD_EPS`).
pub const COORD_EPS: f64 = 1e-9;

/// Per-objective returns from a single arm pull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardVector(pub Vec<f64>);

impl RewardVector {
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        RewardVector(values.into())
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for RewardVector {
    fn from(v: Vec<f64>) -> Self {
        RewardVector(v)
    }
}

impl<const N: usize> From<[f64; N]> for RewardVector {
    fn from(v: [f64; N]) -> Self {
        RewardVector(v.to_vec())
    }
}

/// Regular grid `r_min, r_min + resolution, ...` repeated on every objective axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnLattice {
    r_min: f64,
    r_max: f64,
    resolution: f64,
    dims: usize,
    per_axis: usize,
}

impl ReturnLattice {
    pub fn new(r_min: f64, r_max: f64, resolution: f64, dims: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidLattice(
                "objective count must be at least 1".into(),
            ));
        }
        if !(r_min.is_finite() && r_max.is_finite() && r_min < r_max) {
            return Err(Error::InvalidLattice(format!(
                "require finite r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        let steps = ((r_max - r_min) / resolution + 1e-9).floor();
        if steps < 1.0 {
            return Err(Error::InvalidLattice(format!(
                "resolution {resolution} leaves fewer than 2 points on [{r_min}, {r_max}]"
            )));
        }
        Ok(ReturnLattice {
            r_min,
            r_max,
            resolution,
            dims,
            per_axis: steps as usize + 1,
        })
    }

    /// Unit-step lattice, the common case for integer rewards.
    pub fn integer(r_min: i64, r_max: i64, dims: usize) -> Result<Self> {
        Self::new(r_min as f64, r_max as f64, 1.0, dims)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn points_per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn cell_count(&self) -> usize {
        self.per_axis.pow(self.dims as u32)
    }

    pub fn value(&self, index: usize) -> f64 {
        self.r_min + index as f64 * self.resolution
    }

    pub fn axis_values(&self) -> Vec<f64> {
        (0..self.per_axis).map(|i| self.value(i)).collect()
    }

    /// Largest lattice coordinate.
    pub fn top(&self) -> f64 {
        self.value(self.per_axis - 1)
    }

    /// Lattice index of `value` on one axis. Off-lattice values are rejected.
    pub fn index_of(&self, objective: usize, value: f64) -> Result<usize> {
        let tol = self.resolution * 1e-6;
        let out_of_range = || Error::OutOfRange {
            objective,
            value,
            min: self.r_min,
            max: self.r_max,
        };
        if !value.is_finite() || value < self.r_min - tol || value > self.r_max + tol {
            return Err(out_of_range());
        }
        let q = (value - self.r_min) / self.resolution;
        let k = q.round();
        if (q - k).abs() > 1e-6 {
            return Err(Error::Quantization {
                objective,
                value,
                resolution: self.resolution,
            });
        }
        let k = k as usize;
        if k >= self.per_axis {
            return Err(out_of_range());
        }
        Ok(k)
    }

    /// Per-axis lattice indices of a point.
    pub fn snap(&self, point: &[f64]) -> Result<Vec<usize>> {
        self.check_dims(point.len())?;
        point
            .iter()
            .enumerate()
            .map(|(d, &v)| self.index_of(d, v))
            .collect()
    }

    /// Index of the largest lattice coordinate `<= v`, or `None` below the lattice.
    pub fn floor_index(&self, v: f64) -> Option<usize> {
        if v.is_nan() || v < self.r_min - self.resolution * 1e-6 {
            return None;
        }
        let q = ((v - self.r_min) / self.resolution + 1e-6).floor().max(0.0);
        Some((q as usize).min(self.per_axis - 1))
    }

    /// Row-major flat index; objective 0 varies slowest.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.per_axis + i)
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims];
        for d in (0..self.dims).rev() {
            idx[d] = flat % self.per_axis;
            flat /= self.per_axis;
        }
        idx
    }

    pub fn point_at(&self, flat: usize) -> RewardVector {
        RewardVector(
            self.unravel(flat)
                .into_iter()
                .map(|i| self.value(i))
                .collect(),
        )
    }

    /// Every lattice point in flat-index order.
    pub fn points(&self) -> impl Iterator<Item = RewardVector> + '_ {
        (0..self.cell_count()).map(|f| self.point_at(f))
    }

    pub(crate) fn check_dims(&self, found: usize) -> Result<()> {
        if found != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                found,
            });
        }
        Ok(())
    }
}

/// Count grid of observed return vectors for one arm, plus its pull counter.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTable {
    lattice: ReturnLattice,
    counts: Vec<u64>,
    pulls: u64,
    // sorted flat indices of nonzero cells
    occupied: Vec<usize>,
}

impl ZTable {
    pub fn new(lattice: ReturnLattice) -> Self {
        let cells = lattice.cell_count();
        ZTable {
            lattice,
            counts: vec![0; cells],
            pulls: 0,
            occupied: Vec::new(),
        }
    }

    /// Batch construction from a multiset of observations.
    pub fn from_observations<'a>(
        lattice: ReturnLattice,
        rewards: impl IntoIterator<Item = &'a RewardVector>,
    ) -> Result<Self> {
        let mut table = ZTable::new(lattice);
        for r in rewards {
            table.update(r)?;
        }
        Ok(table)
    }

    pub fn lattice(&self) -> &ReturnLattice {
        &self.lattice
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn dims(&self) -> usize {
        self.lattice.dims()
    }

    /// Record one observed return.
    pub fn update(&mut self, reward: &RewardVector) -> Result<()> {
        let idx = self.lattice.snap(reward.as_slice())?;
        let flat = self.lattice.flat_index(&idx);
        self.increment(flat, 1);
        Ok(())
    }

    fn increment(&mut self, flat: usize, by: u64) {
        if self.counts[flat] == 0 {
            if let Err(pos) = self.occupied.binary_search(&flat) {
                self.occupied.insert(pos, flat);
            }
        }
        self.counts[flat] += by;
        self.pulls += by;
    }

    pub fn count(&self, point: &RewardVector) -> Result<u64> {
        let idx = self.lattice.snap(point.as_slice())?;
        Ok(self.counts[self.lattice.flat_index(&idx)])
    }

    /// Nonzero cells in flat-index order.
    pub fn cells(&self) -> impl Iterator<Item = (RewardVector, u64)> + '_ {
        self.occupied
            .iter()
            .map(move |&f| (self.lattice.point_at(f), self.counts[f]))
    }

    fn require_pulls(&self) -> Result<()> {
        if self.pulls == 0 {
            return Err(Error::EmptyDistribution);
        }
        Ok(())
    }

    /// Empirical probability of observing exactly `point`.
    pub fn pdf(&self, point: &RewardVector) -> Result<f64> {
        self.require_pulls()?;
        Ok(self.count(point)? as f64 / self.pulls as f64)
    }

    /// Probability that every objective is at most the matching component of `point`.
    pub fn cdf(&self, point: &RewardVector) -> Result<f64> {
        self.require_pulls()?;
        self.lattice.check_dims(point.dims())?;
        let mut upper = Vec::with_capacity(point.dims());
        for &v in point.as_slice() {
            match self.lattice.floor_index(v) {
                Some(i) => upper.push(i),
                None => return Ok(0.0),
            }
        }
        let below: u64 = self
            .occupied
            .iter()
            .filter(|&&f| {
                self.lattice
                    .unravel(f)
                    .iter()
                    .zip(&upper)
                    .all(|(i, u)| i <= u)
            })
            .map(|&f| self.counts[f])
            .sum();
        Ok(below as f64 / self.pulls as f64)
    }

    pub fn expectation(&self) -> Result<RewardVector> {
        self.require_pulls()?;
        let mut mean = vec![0.0; self.dims()];
        for (point, count) in self.cells() {
            let w = count as f64 / self.pulls as f64;
            for (m, x) in mean.iter_mut().zip(point.as_slice()) {
                *m += w * x;
            }
        }
        Ok(RewardVector(mean))
    }

    /// Snapshot of the empirical mass function.
    pub fn to_distribution(&self) -> Result<DiscreteDistribution> {
        self.require_pulls()?;
        let n = self.pulls as f64;
        let atoms = self
            .cells()
            .map(|(point, count)| Atom {
                point: point.0,
                mass: count as f64 / n,
            })
            .collect();
        Ok(DiscreteDistribution {
            lattice: self.lattice.clone(),
            atoms,
            shift: vec![0.0; self.dims()],
        })
    }

    /// Empirical distribution with its support translated by `bonus` on every objective.
    pub fn shifted_view(&self, bonus: f64) -> Result<DiscreteDistribution> {
        self.to_distribution()?.shifted(bonus)
    }

    pub fn to_document(&self) -> ZTableDocument {
        ZTableDocument {
            objectives: self.dims(),
            r_min: self.lattice.r_min(),
            r_max: self.lattice.r_max(),
            resolution: self.lattice.resolution(),
            pulls: self.pulls,
            cells: self
                .cells()
                .map(|(point, count)| CellDocument { point, count })
                .collect(),
        }
    }

    pub fn from_document(doc: &ZTableDocument) -> Result<Self> {
        let lattice = ReturnLattice::new(doc.r_min, doc.r_max, doc.resolution, doc.objectives)?;
        let mut table = ZTable::new(lattice);
        for (i, cell) in doc.cells.iter().enumerate() {
            if cell.count == 0 {
                return Err(Error::Parse(format!("cells[{i}]: zero count")));
            }
            let idx = table
                .lattice
                .snap(cell.point.as_slice())
                .map_err(|e| Error::Outcome {
                    path: format!("cells[{i}]"),
                    source: Box::new(e),
                })?;
            let flat = table.lattice.flat_index(&idx);
            if table.counts[flat] != 0 {
                return Err(Error::Parse(format!("cells[{i}]: duplicate point")));
            }
            table.increment(flat, cell.count);
        }
        if table.pulls != doc.pulls {
            return Err(Error::Parse(format!(
                "pulls is {} but cell counts sum to {}",
                doc.pulls, table.pulls
            )));
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(text)?)
    }
}

/// Text form of a [`ZTable`]: lattice parameters, pull count and nonzero cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZTableDocument {
    pub objectives: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub resolution: f64,
    pub pulls: u64,
    pub cells: Vec<CellDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDocument {
    pub point: RewardVector,
    pub count: u64,
}

/// One support point and its probability. `point` is unshifted.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: Vec<f64>,
    pub mass: f64,
}

/// Finite-support distribution over lattice points, optionally translated.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    lattice: ReturnLattice,
    atoms: Vec<Atom>,
    shift: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(point, probability)` pairs. Points must lie on
    /// the lattice; repeated points are merged and zero-mass points dropped.
    pub fn new(
        lattice: ReturnLattice,
        outcomes: impl IntoIterator<Item = (RewardVector, f64)>,
    ) -> Result<Self> {
        let mut cells: Vec<(usize, f64)> = Vec::new();
        for (point, mass) in outcomes {
            if !(mass.is_finite() && (0.0..=1.0 + 1e-12).contains(&mass)) {
                return Err(Error::InvalidMass(format!(
                    "probability {mass} outside [0, 1]"
                )));
            }
            let idx = lattice.snap(point.as_slice())?;
            cells.push((lattice.flat_index(&idx), mass));
        }
        cells.sort_by_key(|c| c.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(cells.len());
        for (flat, mass) in cells {
            match merged.last_mut() {
                Some(last) if last.0 == flat => last.1 += mass,
                _ => merged.push((flat, mass)),
            }
        }
        let total: f64 = merged.iter().map(|c| c.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMass(format!("probabilities sum to {total}")));
        }
        let atoms = merged
            .into_iter()
            .filter(|c| c.1 > 0.0)
            .map(|(flat, mass)| Atom {
                point: lattice.point_at(flat).0,
                mass,
            })
            .collect();
        let dims = lattice.dims();
        Ok(DiscreteDistribution {
            lattice,
            atoms,
            shift: vec![0.0; dims],
        })
    }

    pub fn point_mass(lattice: ReturnLattice, point: RewardVector) -> Result<Self> {
        Self::new(lattice, [(point, 1.0)])
    }

    pub fn lattice(&self) -> &ReturnLattice {
        &self.lattice
    }

    pub fn dims(&self) -> usize {
        self.lattice.dims()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// Translated support points with their masses.
    pub fn support(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.atoms.iter().map(move |a| {
            let p = a
                .point
                .iter()
                .zip(&self.shift)
                .map(|(x, s)| x + s)
                .collect();
            (p, a.mass)
        })
    }

    /// Same masses, support moved by `bonus` along every objective.
    pub fn shifted(&self, bonus: f64) -> Result<Self> {
        if !(bonus.is_finite() && bonus >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shift bonus must be finite and non-negative, got {bonus}"
            )));
        }
        let mut out = self.clone();
        for s in &mut out.shift {
            *s += bonus;
        }
        Ok(out)
    }

    /// Mass at exactly `point` (unshifted lattice coordinates).
    pub fn mass_at(&self, point: &RewardVector) -> Result<f64> {
        let idx = self.lattice.snap(point.as_slice())?;
        let target = self.lattice.point_at(self.lattice.flat_index(&idx));
        Ok(self
            .atoms
            .iter()
            .find(|a| a.point == target.0)
            .map_or(0.0, |a| a.mass))
    }

    /// Joint CDF at `v`, after applying the shift.
    pub fn cdf(&self, v: &[f64]) -> Result<f64> {
        self.lattice.check_dims(v.len())?;
        Ok(self.cdf_unchecked(v))
    }

    pub(crate) fn cdf_unchecked(&self, v: &[f64]) -> f64 {
        self.atoms
            .iter()
            .filter(|a| {
                a.point
                    .iter()
                    .zip(&self.shift)
                    .zip(v)
                    .all(|((x, s), v)| x + s <= v + COORD_EPS)
            })
            .map(|a| a.mass)
            .sum()
    }

    /// Probability that a draw Pareto-dominates `v`.
    pub(crate) fn pareto_survival_unchecked(&self, v: &[f64]) -> f64 {
        self.atoms
            .iter()
            .filter(|a| {
                let mut strict = false;
                for ((x, s), v) in a.point.iter().zip(&self.shift).zip(v) {
                    let x = x + s;
                    if x < v - COORD_EPS {
                        return false;
                    }
                    if x > v + COORD_EPS {
                        strict = true;
                    }
                }
                strict
            })
            .map(|a| a.mass)
            .sum()
    }

    /// Componentwise mean of the (shifted) support.
    pub fn expectation(&self) -> RewardVector {
        let mut mean = self.shift.clone();
        for a in &self.atoms {
            for (m, x) in mean.iter_mut().zip(&a.point) {
                *m += a.mass * x;
            }
        }
        RewardVector(mean)
    }
}

/// Sorted, deduplicated support coordinates of `dists` on every axis.
///
/// Joint CDFs of discrete distributions are constant on the cells of the
/// product grid built from these coordinates, so evaluating there is exact.
pub(crate) fn axis_coordinates(dists: &[&DiscreteDistribution]) -> Vec<Vec<f64>> {
    let dims = dists.first().map_or(0, |d| d.dims());
    let mut axes = vec![Vec::new(); dims];
    for dist in dists {
        for (p, _) in dist.support() {
            for (axis, x) in axes.iter_mut().zip(p) {
                axis.push(x);
            }
        }
    }
    for axis in &mut axes {
        axis.sort_by(|a, b| a.total_cmp(b));
        axis.dedup_by(|a, b| (*a - *b).abs() <= COORD_EPS);
    }
    axes
}

/// Calls `f` on every point of the product grid of `axes`.
pub(crate) fn for_each_grid_point(axes: &[Vec<f64>], mut f: impl FnMut(&[f64])) {
    if axes.iter().any(|a| a.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; axes.len()];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        f(&point);
        let mut d = axes.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                point[d] = axes[d][idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = axes[d][0];
        }
    }
}

/// Largest absolute CDF difference between `a` and `b`.
pub fn ks_distance(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    if a.atoms.is_empty() || b.atoms.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let axes = axis_coordinates(&[a, b]);
    let mut sup = 0.0f64;
    for_each_grid_point(&axes, |v| {
        sup = sup.max((a.cdf_unchecked(v) - b.cdf_unchecked(v)).abs());
    });
    Ok(sup.min(1.0))
}
