//! Ground-truth multi-objective bandit environments.
//!
//! Each arm is a finite table of `(probability, reward vector)` outcomes.
//! Environments are immutable once validated, and can be loaded from a JSON
//! document or taken from the built-in presets.

use std::collections::HashSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{DiscreteDistribution, ReturnLattice, RewardVector};
use crate::dominance::{esr_set, Criterion};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub reward: RewardVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmSpec {
    pub name: String,
    pub outcomes: Vec<Outcome>,
}

impl ArmSpec {
    pub fn new(name: impl Into<String>, outcomes: &[(f64, &[f64])]) -> Self {
        ArmSpec {
            name: name.into(),
            outcomes: outcomes
                .iter()
                .map(|(p, r)| Outcome {
                    probability: *p,
                    reward: RewardVector(r.to_vec()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentSpec {
    name: String,
    lattice: ReturnLattice,
    arms: Vec<ArmSpec>,
    true_esr_set: Option<Vec<usize>>,
    esr_set_cardinality_hint: Option<usize>,
}

impl EnvironmentSpec {
    /// Validates and builds an environment. A declared `true_esr_set` must
    /// match the CDF ESR set of the exact arm distributions.
    pub fn new(
        name: impl Into<String>,
        lattice: ReturnLattice,
        arms: Vec<ArmSpec>,
        true_esr_set: Option<Vec<usize>>,
        esr_set_cardinality_hint: Option<usize>,
    ) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "arms: need at least 2 arms, found {}",
                arms.len()
            )));
        }
        let mut names = HashSet::new();
        for (i, arm) in arms.iter().enumerate() {
            if !names.insert(arm.name.as_str()) {
                return Err(Error::DuplicateArmName {
                    name: arm.name.clone(),
                    index: i,
                });
            }
            validate_arm(&lattice, i, arm)?;
        }
        if esr_set_cardinality_hint == Some(0) {
            return Err(Error::InvalidParameter(
                "esr_set_cardinality must be positive".into(),
            ));
        }
        let env = EnvironmentSpec {
            name: name.into(),
            lattice,
            arms,
            true_esr_set: None,
            esr_set_cardinality_hint,
        };
        if let Some(mut declared) = true_esr_set {
            declared.sort_unstable();
            declared.dedup();
            for &i in &declared {
                if i >= env.arms.len() {
                    return Err(Error::InvalidArm {
                        index: i,
                        len: env.arms.len(),
                    });
                }
            }
            let computed = env.computed_esr_set(Criterion::Cdf)?;
            if declared.is_empty() || declared != computed {
                return Err(Error::EsrSetMismatch {
                    declared: env.arm_names(&declared),
                    computed: env.arm_names(&computed),
                });
            }
            return Ok(EnvironmentSpec {
                true_esr_set: Some(declared),
                ..env
            });
        }
        Ok(env)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lattice(&self) -> &ReturnLattice {
        &self.lattice
    }

    pub fn dims(&self) -> usize {
        self.lattice.dims()
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn declared_esr_set(&self) -> Option<&[usize]> {
        self.true_esr_set.as_deref()
    }

    pub fn arm_index(&self, name: &str) -> Option<usize> {
        self.arms.iter().position(|a| a.name == name)
    }

    pub fn arm_names(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.arms[i].name.clone()).collect()
    }

    /// `|E*|` used by the exploration bonus: declared ESR set size, else the
    /// hint, else the arm count.
    pub fn esr_cardinality(&self) -> usize {
        self.true_esr_set
            .as_ref()
            .map(Vec::len)
            .or(self.esr_set_cardinality_hint)
            .unwrap_or(self.arms.len())
    }

    /// ESR set of the exact arm distributions.
    pub fn computed_esr_set(&self, criterion: Criterion) -> Result<Vec<usize>> {
        esr_set(&self.exact_distributions()?, criterion)
    }

    /// Declared ESR set if present, otherwise computed from the exact distributions.
    pub fn ground_truth_esr_set(&self) -> Result<Vec<usize>> {
        match &self.true_esr_set {
            Some(s) => Ok(s.clone()),
            None => self.computed_esr_set(Criterion::Cdf),
        }
    }

    fn check_arm(&self, arm: usize) -> Result<&ArmSpec> {
        self.arms.get(arm).ok_or(Error::InvalidArm {
            index: arm,
            len: self.arms.len(),
        })
    }

    /// Draws one reward vector from `arm`.
    pub fn sample_arm<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<RewardVector> {
        let spec = self.check_arm(arm)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for o in &spec.outcomes {
            acc += o.probability;
            if u < acc {
                return Ok(o.reward.clone());
            }
        }
        // u landed in the rounding slack above the cumulative sum
        Ok(spec
            .outcomes
            .last()
            .expect("validated non-empty")
            .reward
            .clone())
    }

    pub fn exact_distribution(&self, arm: usize) -> Result<DiscreteDistribution> {
        let spec = self.check_arm(arm)?;
        DiscreteDistribution::new(
            self.lattice.clone(),
            spec.outcomes
                .iter()
                .map(|o| (o.reward.clone(), o.probability)),
        )
    }

    pub fn exact_distributions(&self) -> Result<Vec<DiscreteDistribution>> {
        (0..self.arms.len())
            .map(|i| self.exact_distribution(i))
            .collect()
    }

    pub fn to_document(&self) -> EnvironmentDocument {
        EnvironmentDocument {
            name: self.name.clone(),
            objectives: self.dims(),
            r_min: self.lattice.r_min(),
            r_max: self.lattice.r_max(),
            resolution: self.lattice.resolution(),
            true_esr_set: self.true_esr_set.as_ref().map(|s| self.arm_names(s)),
            esr_set_cardinality: self.esr_set_cardinality_hint,
            arms: self
                .arms
                .iter()
                .map(|a| ArmDocument {
                    name: a.name.clone(),
                    outcomes: a
                        .outcomes
                        .iter()
                        .map(|o| OutcomeDocument {
                            p: o.probability,
                            r: o.reward.0.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &EnvironmentDocument) -> Result<Self> {
        let lattice = ReturnLattice::new(doc.r_min, doc.r_max, doc.resolution, doc.objectives)?;
        let arms: Vec<ArmSpec> = doc
            .arms
            .iter()
            .map(|a| ArmSpec {
                name: a.name.clone(),
                outcomes: a
                    .outcomes
                    .iter()
                    .map(|o| Outcome {
                        probability: o.p,
                        reward: RewardVector(o.r.clone()),
                    })
                    .collect(),
            })
            .collect();
        let declared = match &doc.true_esr_set {
            None => None,
            Some(names) => Some(
                names
                    .iter()
                    .map(|n| {
                        arms.iter()
                            .position(|a| &a.name == n)
                            .ok_or_else(|| Error::UnknownArm(n.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        EnvironmentSpec::new(
            doc.name.clone(),
            lattice,
            arms,
            declared,
            doc.esr_set_cardinality,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(text)?)
    }

    /// A preset name, or a path to a JSON environment file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match preset(name_or_path) {
            Ok(env) => Ok(env),
            Err(Error::UnknownPreset(_)) if Path::new(name_or_path).exists() => {
                load_environment_file(name_or_path)
            }
            Err(e) => Err(e),
        }
    }
}

fn validate_arm(lattice: &ReturnLattice, index: usize, arm: &ArmSpec) -> Result<()> {
    let path = format!("arms[{index}] ({})", arm.name);
    if arm.outcomes.is_empty() {
        return Err(Error::InvalidParameter(format!("{path}: no outcomes")));
    }
    let mut sum = 0.0;
    for (j, o) in arm.outcomes.iter().enumerate() {
        let opath = format!("arms[{index}].outcomes[{j}]");
        if !(o.probability.is_finite() && o.probability > 0.0 && o.probability <= 1.0) {
            return Err(Error::Outcome {
                path: opath,
                source: Box::new(Error::InvalidMass(format!(
                    "probability {} outside (0, 1]",
                    o.probability
                ))),
            });
        }
        lattice
            .snap(o.reward.as_slice())
            .map_err(|e| Error::Outcome {
                path: opath,
                source: Box::new(e),
            })?;
        sum += o.probability;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::ProbabilitySum { path, sum });
    }
    Ok(())
}

/// Parses and validates an environment document.
pub fn load_environment(document: &str) -> Result<EnvironmentSpec> {
    EnvironmentSpec::from_json(document)
}

pub fn load_environment_file(path: impl AsRef<Path>) -> Result<EnvironmentSpec> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    load_environment(&text)
}

/// On-disk environment schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentDocument {
    pub name: String,
    pub objectives: usize,
    pub r_min: f64,
    pub r_max: f64,
    #[serde(default = "unit_resolution")]
    pub resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_esr_set: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub esr_set_cardinality: Option<usize>,
    pub arms: Vec<ArmDocument>,
}

fn unit_resolution() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmDocument {
    pub name: String,
    pub outcomes: Vec<OutcomeDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDocument {
    pub p: f64,
    pub r: Vec<f64>,
}

pub const PRESET_NAMES: [&str; 4] = ["momab5", "vrs", "lottery12", "lottery34"];

/// Built-in environments.
///
/// * `momab5`: five-arm bi-objective bandit, ESR set {arm_1, arm_5}.
/// * `vrs`: vaccine recommender, objectives (safety, effectiveness), ESR set {V_1, V_3}.
/// * `lottery12`, `lottery34`: the two-outcome lotteries used to contrast
///   SER and ESR; the second contains a negative return.
pub fn preset(name: &str) -> Result<EnvironmentSpec> {
    let lattice = ReturnLattice::integer(0, 10, 2)?;
    match name {
        "momab5" => EnvironmentSpec::new(
            "momab5",
            lattice,
            vec![
                ArmSpec::new("arm_1", &[(0.4, &[0., 1.]), (0.6, &[5., 4.])]),
                ArmSpec::new("arm_2", &[(0.85, &[1., 0.]), (0.15, &[3., 2.])]),
                ArmSpec::new("arm_3", &[(0.75, &[2., 0.]), (0.25, &[4., 2.])]),
                ArmSpec::new("arm_4", &[(0.8, &[0., 1.]), (0.2, &[1., 2.])]),
                ArmSpec::new("arm_5", &[(0.7, &[2., 0.]), (0.3, &[4., 5.])]),
            ],
            Some(vec![0, 4]),
            Some(2),
        ),
        "vrs" => EnvironmentSpec::new(
            "vrs",
            lattice,
            vec![
                ArmSpec::new(
                    "V_1",
                    &[
                        (0.05, &[2., 0.]),
                        (0.05, &[2., 1.]),
                        (0.1, &[3., 2.]),
                        (0.8, &[4., 2.]),
                    ],
                ),
                ArmSpec::new(
                    "V_2",
                    &[
                        (0.1, &[0., 0.]),
                        (0.1, &[1., 1.]),
                        (0.5, &[2., 0.]),
                        (0.3, &[2., 1.]),
                    ],
                ),
                ArmSpec::new(
                    "V_3",
                    &[
                        (0.1, &[1., 0.]),
                        (0.1, &[1., 3.]),
                        (0.2, &[3., 4.]),
                        (0.6, &[5., 4.]),
                    ],
                ),
                ArmSpec::new(
                    "V_4",
                    &[
                        (0.1, &[1., 0.]),
                        (0.4, &[2., 1.]),
                        (0.4, &[3., 1.]),
                        (0.1, &[3., 2.]),
                    ],
                ),
                ArmSpec::new(
                    "V_5",
                    &[
                        (0.8, &[0., 0.]),
                        (0.05, &[1., 1.]),
                        (0.05, &[1., 2.]),
                        (0.1, &[4., 0.]),
                    ],
                ),
            ],
            Some(vec![0, 2]),
            Some(2),
        ),
        "lottery12" => EnvironmentSpec::new(
            "lottery12",
            lattice,
            vec![
                ArmSpec::new("L_1", &[(0.5, &[4., 3.]), (0.5, &[2., 3.])]),
                ArmSpec::new("L_2", &[(0.9, &[1., 3.]), (0.1, &[10., 2.])]),
            ],
            None,
            None,
        ),
        "lottery34" => EnvironmentSpec::new(
            "lottery34",
            ReturnLattice::integer(-20, 20, 2)?,
            vec![
                ArmSpec::new("L_3", &[(0.5, &[-20., 1.]), (0.5, &[20., 3.])]),
                ArmSpec::new("L_4", &[(0.9, &[0., 2.]), (0.1, &[5., 2.])]),
            ],
            None,
            None,
        ),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}
