//! Random scenarios for the campaign families.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decision::{RuleKind, UtilityModel};
use crate::dynamics::DEFAULT_MAX_STEPS;
use crate::election::default_label;
use crate::error::{Error, Result};
use crate::rational::{format_rational, ratio};
use crate::scenario::{BeliefSpec, InitialBallots, RuleSpec, ScenarioFile, SchedulerSpec, VoterSpec, FORMAT_VERSION};
use crate::uncertainty::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Nested layers with non-increasing weights, pessimistic rule.
    Theorem1Nested,
    /// Partitioned layers with non-increasing weights, pessimistic rule.
    Theorem1Partitioned,
    /// Nested layers with non-increasing weights, Hurwicz rule with α > 1/2.
    Theorem2Hurwicz,
    /// Uniform mass on the radius-1 ball, pignistic rule.
    PignisticUniform,
    /// Certain beliefs, direct best response, pessimistic rule.
    MeirR0,
}

pub const HURWICZ_ALPHAS: [(i64, i64); 4] = [(51, 100), (2, 3), (9, 10), (1, 1)];

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Theorem1Nested,
        Family::Theorem1Partitioned,
        Family::Theorem2Hurwicz,
        Family::PignisticUniform,
        Family::MeirR0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Theorem1Nested => "theorem1_nested",
            Family::Theorem1Partitioned => "theorem1_partitioned",
            Family::Theorem2Hurwicz => "theorem2_hurwicz",
            Family::PignisticUniform => "pignistic_uniform",
            Family::MeirR0 => "meir_r0",
        }
    }

    pub fn requires_decreasing_weights(self) -> bool {
        matches!(
            self,
            Family::Theorem1Nested | Family::Theorem1Partitioned | Family::Theorem2Hurwicz
        )
    }

    /// Families whose runs must all converge; a cycle fails the campaign.
    pub fn asserts_convergence(self) -> bool {
        self != Family::PignisticUniform
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Up to three layers at radii drawn from {1, 2, 3}, with non-increasing weights.
fn decreasing_layers(rng: &mut ChaCha8Rng) -> (Vec<u32>, Vec<String>) {
    let k = rng.gen_range(1..=3);
    let mut radii: Vec<u32> = [1, 2, 3].choose_multiple(rng, k).copied().collect();
    radii.sort_unstable();
    let mut raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=10)).collect();
    raw.sort_unstable_by(|a, b| b.cmp(a));
    let total: i64 = raw.iter().sum();
    let weights = raw.iter().map(|&w| format_rational(&ratio(w, total))).collect();
    (radii, weights)
}

fn voter(rng: &mut ChaCha8Rng, labels: &[String], family: Family) -> VoterSpec {
    let mut preference = labels.to_vec();
    preference.shuffle(rng);
    let metric = Metric::L1Addremove;
    let (utility, rule, belief) = match family {
        Family::Theorem1Nested | Family::Theorem1Partitioned => {
            let (radii, weights) = decreasing_layers(rng);
            let belief = if family == Family::Theorem1Nested {
                BeliefSpec::Nested { metric, radii, weights }
            } else {
                BeliefSpec::Partitioned { metric, radii, weights }
            };
            (
                UtilityModel::MeirSign,
                RuleSpec {
                    kind: RuleKind::Pessimistic,
                    alpha: None,
                },
                belief,
            )
        }
        Family::Theorem2Hurwicz => {
            let (radii, weights) = decreasing_layers(rng);
            let (p, q) = *HURWICZ_ALPHAS.choose(rng).expect("nonempty");
            let rule = RuleSpec {
                kind: RuleKind::Hurwicz,
                alpha: Some(format_rational(&ratio(p, q))),
            };
            (
                UtilityModel::MeirSign,
                rule,
                BeliefSpec::Nested { metric, radii, weights },
            )
        }
        Family::PignisticUniform => (
            UtilityModel::MeirSign,
            RuleSpec {
                kind: RuleKind::Pignistic,
                alpha: None,
            },
            BeliefSpec::Nested {
                metric,
                radii: vec![1],
                weights: vec!["1/1".into()],
            },
        ),
        Family::MeirR0 => (
            UtilityModel::DirectBestResponse,
            RuleSpec {
                kind: RuleKind::Pessimistic,
                alpha: None,
            },
            BeliefSpec::Nested {
                metric,
                radii: vec![0],
                weights: vec!["1/1".into()],
            },
        ),
    };
    VoterSpec {
        preference,
        utility,
        rule,
        belief,
    }
}

/// Impartial-culture preferences with family-specific beliefs and rules, truthful start.
/// Deterministic in `seed`.
pub fn generate_instance(seed: u64, n: usize, m: usize, family: Family) -> Result<ScenarioFile> {
    if n == 0 {
        return Err(Error::Validation(vec!["need at least one voter".into()]));
    }
    if m < 3 {
        return Err(Error::TooFewCandidates(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..m).map(default_label).collect();
    let voters = (0..n).map(|_| voter(&mut rng, &labels, family)).collect();
    Ok(ScenarioFile {
        version: FORMAT_VERSION,
        family: Some(family.as_str().to_string()),
        seed: Some(seed),
        candidates: labels,
        tie_break: None,
        initial_ballots: InitialBallots::default(),
        scheduler: SchedulerSpec {
            max_steps: DEFAULT_MAX_STEPS,
            start_voter: 0,
        },
        voters,
    })
}

/// Instance size drawn from the seed, so a campaign row is reproducible from its seed alone.
pub fn instance_shape(seed: u64, voters: (usize, usize), candidates: (usize, usize)) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5a9e);
    (
        rng.gen_range(voters.0..=voters.1),
        rng.gen_range(candidates.0..=candidates.1),
    )
}
