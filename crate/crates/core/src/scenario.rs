//! TOML scenario files.
//!
//! A scenario names the candidates, the tie-break order, every voter (preference, belief,
//! rule, utility), the initial ballots and the scheduler limits. Rationals are written as
//! strings: `"1/3"`, `"2"` or `"0.51"`; they are always emitted in `p/q` form.
//!
//! ```toml
//! version = 1
//! candidates = ["a", "b", "c"]
//! tie_break = ["a", "b", "c"]          # optional, defaults to `candidates`
//! initial_ballots = "truthful"         # or a list of labels, one per voter
//!
//! [scheduler]
//! max_steps = 10000
//! start_voter = 0
//!
//! [[voters]]
//! preference = ["b", "c", "a"]
//! utility = "meir_sign"                # direct_best_response | cardinal_rank
//! rule = { kind = "hurwicz", alpha = "1/3" }
//! belief = { kind = "nested", metric = "l1_addremove", radii = [1, 2], weights = ["2/3", "1/3"] }
//! ```
//!
//! Belief kinds: `nested` and `partitioned` (layers re-centred on the true score), `fixed_mass`
//! (`focal = [{ weight, points | box }]`), `set` (`points | box`, mass one), `probability`
//! (`points` with `weights`) and `ballot_product` (per-voter `ballots = [[{ candidates, weight }]]`).
//! A box is `{ lower = [..], upper = [..], sum = n }`, the sum being optional.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::decision::{DecisionRule, RuleKind, UtilityModel};
use crate::dynamics::{run, Belief, GameState, RunOutcome, VoterConfig, DEFAULT_MAX_STEPS};
use crate::election::{BallotProfile, CandidateSet, ScoreVector, TieBreakOrder};
use crate::error::{Error, Result};
use crate::generate::Family;
use crate::preference::Preference;
use crate::rational::{parse_rational, Rational};
use crate::uncertainty::{
    product_mass, BallotMass, FocalElement, LayerKind, LayeredSpec, MassFunction, Metric, ScoreBox, ScoreDistribution,
    DEFAULT_EXPANSION_CAP,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub candidates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<Vec<String>>,
    #[serde(default)]
    pub initial_ballots: InitialBallots,
    #[serde(default)]
    pub scheduler: SchedulerSpec,
    #[serde(default)]
    pub voters: Vec<VoterSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialBallots {
    Keyword(Truthful),
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truthful {
    Truthful,
}

impl Default for InitialBallots {
    fn default() -> Self {
        InitialBallots::Keyword(Truthful::Truthful)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulerSpec {
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default)]
    pub start_voter: usize,
}

fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

impl Default for SchedulerSpec {
    fn default() -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            start_voter: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterSpec {
    pub preference: Vec<String>,
    #[serde(default = "default_utility")]
    pub utility: UtilityModel,
    pub rule: RuleSpec,
    pub belief: BeliefSpec,
}

fn default_utility() -> UtilityModel {
    UtilityModel::MeirSign
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub kind: RuleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BeliefSpec {
    Nested {
        metric: Metric,
        radii: Vec<u32>,
        weights: Vec<String>,
    },
    Partitioned {
        metric: Metric,
        radii: Vec<u32>,
        weights: Vec<String>,
    },
    FixedMass {
        focal: Vec<FocalSpec>,
    },
    Set {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<u32>>>,
        #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
        score_box: Option<ScoreBox>,
    },
    Probability {
        points: Vec<Vec<u32>>,
        weights: Vec<String>,
    },
    BallotProduct {
        ballots: Vec<Vec<BallotFocalSpec>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocalSpec {
    pub weight: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<u32>>>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub score_box: Option<ScoreBox>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallotFocalSpec {
    pub candidates: Vec<String>,
    pub weight: String,
}

/// A validated scenario with every label resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub candidates: CandidateSet,
    pub tie: TieBreakOrder,
    pub voters: Vec<VoterConfig>,
    pub initial: GameState,
    pub max_steps: u64,
    pub family: Option<Family>,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn run(&self) -> Result<RunOutcome> {
        run(&self.initial, &self.voters, &self.tie, self.max_steps)
    }

    pub fn initial_score(&self) -> ScoreVector {
        self.initial.score(self.candidates.len())
    }
}

/// Parses and validates; all validation problems are reported together.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.resolve()?;
    Ok(file)
}

/// Parses, validates and resolves in one go.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.resolve()
}

pub fn emit_scenario(file: &ScenarioFile) -> String {
    toml::to_string(file).expect("scenario values are always representable in TOML")
}

/// Collects problems instead of stopping at the first.
struct Problems(Vec<String>);

impl Problems {
    fn check<T>(&mut self, context: impl FnOnce() -> String, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.0.push(format!("{}: {e}", context()));
                None
            }
        }
    }
}

fn rational(text: &str) -> Result<Rational> {
    parse_rational(text)
}

fn rationals(texts: &[String]) -> Result<Vec<Rational>> {
    texts.iter().map(|t| rational(t)).collect()
}

fn points(raw: &[Vec<u32>]) -> Vec<ScoreVector> {
    raw.iter().map(|p| ScoreVector::new(p.clone())).collect()
}

fn focal_from(points_raw: &Option<Vec<Vec<u32>>>, score_box: &Option<ScoreBox>) -> Result<FocalElement> {
    match (points_raw, score_box) {
        (Some(p), None) => FocalElement::explicit(points(p)),
        (None, Some(b)) => FocalElement::from_box(b, DEFAULT_EXPANSION_CAP),
        _ => Err(Error::InvalidFocal("give exactly one of `points` and `box`".into())),
    }
}

fn check_dimension(mass: &MassFunction, m: usize) -> Result<()> {
    if mass.dimension() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: mass.dimension(),
        });
    }
    Ok(())
}

impl BeliefSpec {
    pub fn resolve(&self, candidates: &CandidateSet) -> Result<Belief> {
        let m = candidates.len();
        let layered = |kind, metric, radii: &Vec<u32>, weights: &[String]| -> Result<Belief> {
            Ok(Belief::Layered(LayeredSpec::new(
                kind,
                metric,
                radii.clone(),
                rationals(weights)?,
            )?))
        };
        let mass = match self {
            BeliefSpec::Nested { metric, radii, weights } => {
                return layered(LayerKind::Nested, *metric, radii, weights)
            }
            BeliefSpec::Partitioned { metric, radii, weights } => {
                return layered(LayerKind::Partitioned, *metric, radii, weights)
            }
            BeliefSpec::FixedMass { focal } => {
                let assignments = focal
                    .iter()
                    .map(|f| Ok((focal_from(&f.points, &f.score_box)?, rational(&f.weight)?)))
                    .collect::<Result<Vec<_>>>()?;
                MassFunction::new(assignments)?
            }
            BeliefSpec::Set { points, score_box } => MassFunction::vacuous(focal_from(points, score_box)?),
            BeliefSpec::Probability { points: p, weights } => {
                if p.len() != weights.len() {
                    return Err(Error::InvalidDistribution(format!(
                        "{} points but {} weights",
                        p.len(),
                        weights.len()
                    )));
                }
                ScoreDistribution::new(points(p).into_iter().zip(rationals(weights)?))?.to_mass()
            }
            BeliefSpec::BallotProduct { ballots } => {
                let masses = ballots
                    .iter()
                    .map(|voter| {
                        voter
                            .iter()
                            .map(|f| {
                                let set = f
                                    .candidates
                                    .iter()
                                    .map(|l| candidates.index_of(l))
                                    .collect::<Result<BTreeSet<_>>>()?;
                                Ok((set, rational(&f.weight)?))
                            })
                            .collect::<Result<BallotMass>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                product_mass(&masses, m)?
            }
        };
        check_dimension(&mass, m)?;
        Ok(Belief::Fixed(mass))
    }

    /// Layer weights, for layered kinds.
    pub fn layer_weights(&self) -> Option<&[String]> {
        match self {
            BeliefSpec::Nested { weights, .. } | BeliefSpec::Partitioned { weights, .. } => Some(weights),
            _ => None,
        }
    }
}

impl RuleSpec {
    pub fn resolve(&self) -> Result<DecisionRule> {
        let alpha = self.alpha.as_deref().map(rational).transpose()?;
        DecisionRule::new(self.kind, alpha)
    }
}

impl ScenarioFile {
    /// Validates and resolves every label, rational and belief.
    pub fn resolve(&self) -> Result<Scenario> {
        let mut p = Problems(Vec::new());
        if self.version != FORMAT_VERSION {
            p.0.push(format!("version: expected {FORMAT_VERSION}, got {}", self.version));
        }
        let family = match &self.family {
            None => None,
            Some(name) => p.check(|| "family".into(), name.parse::<Family>()),
        };
        if self.voters.is_empty() {
            p.0.push("voters: at least one voter is required".into());
        }
        if self.scheduler.max_steps == 0 {
            p.0.push("scheduler.max_steps: must be at least 1".into());
        }
        if !self.voters.is_empty() && self.scheduler.start_voter >= self.voters.len() {
            p.0.push(format!(
                "scheduler.start_voter: {} is not a voter index",
                self.scheduler.start_voter
            ));
        }

        let Some(candidates) = p.check(
            || "candidates".into(),
            CandidateSet::new(self.candidates.iter().cloned()),
        ) else {
            return Err(Error::Validation(p.0));
        };
        let tie = match &self.tie_break {
            None => Some(TieBreakOrder::identity(candidates.len())),
            Some(labels) => p.check(
                || "tie_break".into(),
                labels
                    .iter()
                    .map(|l| candidates.index_of(l))
                    .collect::<Result<Vec<_>>>()
                    .and_then(|order| {
                        if order.len() != candidates.len() {
                            return Err(Error::NotAPermutation(candidates.len()));
                        }
                        TieBreakOrder::new(order)
                    }),
            ),
        };

        let mut voters = Vec::with_capacity(self.voters.len());
        for (i, v) in self.voters.iter().enumerate() {
            let preference = p.check(
                || format!("voters[{i}].preference"),
                Preference::from_labels(&v.preference, &candidates),
            );
            let rule = p.check(|| format!("voters[{i}].rule"), v.rule.resolve());
            let belief = p.check(|| format!("voters[{i}].belief"), v.belief.resolve(&candidates));
            if let (Some(f), Some(Belief::Layered(spec))) = (family, &belief) {
                if f.requires_decreasing_weights() && !spec.is_decreasing() {
                    p.0.push(format!(
                        "voters[{i}].belief: family {} requires non-increasing layer weights",
                        f.as_str()
                    ));
                }
            }
            if let (Some(preference), Some(rule), Some(belief)) = (preference, rule, belief) {
                voters.push(VoterConfig {
                    preference,
                    belief,
                    rule,
                    utility: v.utility,
                });
            }
        }

        let profile = match &self.initial_ballots {
            InitialBallots::Keyword(Truthful::Truthful) => None,
            InitialBallots::Explicit(labels) => {
                if labels.len() != self.voters.len() {
                    p.0.push(format!(
                        "initial_ballots: {} ballots for {} voters",
                        labels.len(),
                        self.voters.len()
                    ));
                    None
                } else {
                    p.check(
                        || "initial_ballots".into(),
                        labels
                            .iter()
                            .map(|l| candidates.index_of(l))
                            .collect::<Result<Vec<_>>>()
                            .and_then(|b| BallotProfile::new(b, &candidates)),
                    )
                }
            }
        };

        if !p.0.is_empty() {
            return Err(Error::Validation(p.0));
        }
        let mut initial = match profile {
            Some(profile) => GameState::new(profile),
            None => GameState::truthful(&voters),
        };
        initial.next_voter = self.scheduler.start_voter;
        Ok(Scenario {
            candidates,
            tie: tie.expect("checked above"),
            voters,
            initial,
            max_steps: self.scheduler.max_steps,
            family,
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const SMALL: &str = r#"
version = 1
candidates = ["a", "b", "c"]

[[voters]]
preference = ["b", "c", "a"]
rule = { kind = "hurwicz", alpha = "1/3" }
belief = { kind = "nested", metric = "l1_addremove", radii = [1, 2], weights = ["2/3", "0.333333333333333333333333333333333333"] }
"#;

    #[test]
    fn collects_every_problem() {
        let text = r#"
version = 2
candidates = ["a", "b", "c"]
initial_ballots = ["a", "z"]

[[voters]]
preference = ["b", "q", "a"]
rule = { kind = "hurwicz", alpha = "3/2" }
belief = { kind = "nested", metric = "l1_addremove", radii = [1], weights = ["1/2"] }
"#;
        let Err(Error::Validation(problems)) = parse_scenario(text) else {
            panic!("expected validation errors");
        };
        assert_eq!(problems.len(), 5, "{problems:#?}");
        assert!(problems[0].starts_with("version"));
    }

    #[test]
    fn empty_voters_is_invalid() {
        let text = "version = 1\ncandidates = [\"a\", \"b\", \"c\"]\n";
        assert!(matches!(parse_scenario(text), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert!(matches!(parse_scenario("version = "), Err(Error::Parse(_))));
        assert!(matches!(
            parse_scenario("version = 1\ncandidates = []\nbogus = 3\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn weights_must_be_normalized() {
        let Err(Error::Validation(problems)) = parse_scenario(SMALL) else {
            panic!("the weights only approximate one")
        };
        assert!(problems[0].contains("weights sum"));
        let ok = SMALL.replace("0.333333333333333333333333333333333333", "1/3");
        let s = load_scenario(&ok).unwrap();
        assert_eq!(s.voters[0].rule, DecisionRule::hurwicz(ratio(1, 3)).unwrap());
        assert_eq!(s.initial.profile.ballots(), &[1]);
    }

    #[test]
    fn theorem_families_need_decreasing_weights() {
        let text = SMALL
            .replace("0.333333333333333333333333333333333333", "1/3")
            .replace("[\"2/3\", \"1/3\"]", "[\"1/3\", \"2/3\"]");
        assert!(load_scenario(&text).is_ok());
        let declared = text.replace("version = 1", "version = 1\nfamily = \"theorem2_hurwicz\"");
        let Err(Error::Validation(problems)) = load_scenario(&declared) else {
            panic!("increasing weights under a theorem family")
        };
        assert!(problems[0].contains("non-increasing"));
    }

    #[test]
    fn every_belief_kind_resolves() {
        let text = r#"
version = 1
candidates = ["a", "b", "c"]
tie_break = ["c", "b", "a"]
initial_ballots = ["a", "b", "c", "a", "b"]

[scheduler]
max_steps = 5
start_voter = 2

[[voters]]
preference = ["a", "b", "c"]
rule = { kind = "pessimistic" }
belief = { kind = "fixed_mass", focal = [{ weight = "1/2", points = [[1, 1, 1]] }, { weight = "1/2", box = { lower = [0, 1, 1], upper = [1, 2, 1], sum = 3 } }] }

[[voters]]
preference = ["b", "a", "c"]
utility = "cardinal_rank"
rule = { kind = "pignistic" }
belief = { kind = "set", points = [[2, 2, 1], [1, 2, 2]] }

[[voters]]
preference = ["c", "a", "b"]
utility = "direct_best_response"
rule = { kind = "mixture", alpha = "1/2" }
belief = { kind = "probability", points = [[2, 2, 1], [1, 2, 2]], weights = ["1/4", "3/4"] }

[[voters]]
preference = ["a", "c", "b"]
rule = { kind = "pessimistic" }
belief = { kind = "ballot_product", ballots = [[{ candidates = ["a"], weight = "1/2" }, { candidates = ["a", "b"], weight = "1/2" }], [{ candidates = ["b"], weight = "1" }], [{ candidates = ["c"], weight = "1" }]] }

[[voters]]
preference = ["b", "c", "a"]
rule = { kind = "pessimistic" }
belief = { kind = "partitioned", metric = "voter_swap", radii = [1, 2], weights = ["3/4", "1/4"] }
"#;
        let file = parse_scenario(text).unwrap();
        let s = file.resolve().unwrap();
        assert_eq!(s.tie.order(), &[2, 1, 0]);
        assert_eq!(s.initial.next_voter, 2);
        assert_eq!(s.max_steps, 5);
        let Belief::Fixed(first) = &s.voters[0].belief else {
            panic!()
        };
        let Belief::Fixed(product) = &s.voters[3].belief else {
            panic!()
        };
        assert_eq!(first, product);
        // round trip through the emitter
        let again = parse_scenario(&emit_scenario(&file)).unwrap();
        assert_eq!(again, file);
        assert!(s.run().is_ok());
    }
}
