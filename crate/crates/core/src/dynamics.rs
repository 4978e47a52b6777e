//! Iterative voting: round-robin best responses until equilibrium, a cycle or the step limit.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::decision::{evaluate_move, DecisionRule, MoveEvaluation, UtilityModel};
use crate::election::{moved, tally, winner, BallotProfile, Candidate, ScoreVector, TieBreakOrder};
use crate::error::{Error, Result};
use crate::preference::Preference;
use crate::rational::Rational;
use crate::uncertainty::{LayeredSpec, MassFunction, DEFAULT_EXPANSION_CAP};

pub const DEFAULT_MAX_STEPS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Belief {
    /// Rebuilt around the current score before every decision.
    Layered(LayeredSpec),
    /// Used as given, whatever the current score.
    Fixed(MassFunction),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterConfig {
    pub preference: Preference,
    pub belief: Belief,
    pub rule: DecisionRule,
    pub utility: UtilityModel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub profile: BallotProfile,
    pub step: u64,
    pub next_voter: usize,
}

impl GameState {
    pub fn new(profile: BallotProfile) -> Self {
        Self {
            profile,
            step: 0,
            next_voter: 0,
        }
    }

    /// Everyone votes for their favourite.
    pub fn truthful(configs: &[VoterConfig]) -> Self {
        Self::new(BallotProfile::from_unchecked(
            configs.iter().map(|c| c.preference.top()).collect(),
        ))
    }

    pub fn score(&self, m: usize) -> ScoreVector {
        tally(self.profile.ballots(), m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveRecord {
    pub step: u64,
    pub voter: usize,
    pub from: Candidate,
    pub to: Candidate,
    pub criterion_value: Rational,
    pub score_before: ScoreVector,
    pub score_after: ScoreVector,
    pub winner_before: Candidate,
    pub winner_after: Candidate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Moved(GameState, MoveRecord),
    Stable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    Cycle,
    StepLimit,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::Cycle => "cycle",
            RunStatus::StepLimit => "step_limit",
        }
    }
}

/// Moves `trace[start..]` lead from a state back to itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleInfo {
    pub start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub steps: u64,
    pub final_state: GameState,
    pub cycle: Option<CycleInfo>,
    pub trace: Vec<MoveRecord>,
}

impl RunOutcome {
    pub fn cycle_moves(&self) -> &[MoveRecord] {
        match self.cycle {
            Some(c) => &self.trace[c.start..c.start + c.length],
            None => &[],
        }
    }
}

/// Masses for the layered beliefs in use, all centred on one score.
struct MassCache<'a> {
    center: &'a ScoreVector,
    built: Vec<(&'a LayeredSpec, MassFunction)>,
}

impl<'a> MassCache<'a> {
    fn new(center: &'a ScoreVector) -> Self {
        Self {
            center,
            built: Vec::new(),
        }
    }

    fn get(&mut self, belief: &'a Belief) -> Result<&MassFunction> {
        let spec = match belief {
            Belief::Fixed(mass) => return Ok(mass),
            Belief::Layered(spec) => spec,
        };
        let idx = match self.built.iter().position(|(s, _)| *s == spec) {
            Some(i) => i,
            None => {
                let mass = spec.mass_around(self.center, DEFAULT_EXPANSION_CAP)?;
                self.built.push((spec, mass));
                self.built.len() - 1
            }
        };
        Ok(&self.built[idx].1)
    }
}

fn check_inputs(state: &GameState, configs: &[VoterConfig], tie: &TieBreakOrder) -> Result<()> {
    let m = tie.len();
    if configs.len() != state.profile.len() {
        return Err(Error::DimensionMismatch {
            expected: configs.len(),
            got: state.profile.len(),
        });
    }
    for &b in state.profile.ballots() {
        if b >= m {
            return Err(Error::InvalidCandidate { index: b, m });
        }
    }
    for c in configs {
        if c.preference.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: c.preference.len(),
            });
        }
        if let Belief::Fixed(mass) = &c.belief {
            if mass.dimension() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: mass.dimension(),
                });
            }
        }
    }
    Ok(())
}

/// Every alternative ballot for `voter`, evaluated against `mass`.
fn evaluations<'a>(
    config: &'a VoterConfig,
    mass: &'a MassFunction,
    from: Candidate,
    tie: &'a TieBreakOrder,
) -> impl Iterator<Item = (Candidate, MoveEvaluation)> + 'a {
    (0..tie.len()).filter(move |&to| to != from).map(move |to| {
        let e = evaluate_move(mass, &config.rule, config.utility, &config.preference, from, to, tie);
        (to, e)
    })
}

/// Strictly preferred move with the largest criterion value; ties go to the destination the
/// voter likes best, then to the earlier candidate in the tie-break order.
fn best_move(
    config: &VoterConfig,
    mass: &MassFunction,
    from: Candidate,
    tie: &TieBreakOrder,
) -> Option<(Candidate, MoveEvaluation)> {
    evaluations(config, mass, from, tie)
        .filter(|(_, e)| e.is_strict())
        .min_by(|(a, ea), (b, eb)| {
            eb.criterion_value
                .cmp(&ea.criterion_value)
                .then(config.preference.rank(*a).cmp(&config.preference.rank(*b)))
                .then(tie.position(*a).cmp(&tie.position(*b)))
        })
}

/// One move by the first voter, from `state.next_voter` on, who strictly wants to deviate.
pub fn step(state: &GameState, configs: &[VoterConfig], tie: &TieBreakOrder) -> Result<StepOutcome> {
    check_inputs(state, configs, tie)?;
    let n = configs.len();
    if n == 0 {
        return Ok(StepOutcome::Stable);
    }
    let m = tie.len();
    let score = state.score(m);
    let mut cache = MassCache::new(&score);
    for offset in 0..n {
        let voter = (state.next_voter + offset) % n;
        let config = &configs[voter];
        let from = state.profile.ballot(voter);
        let mass = cache.get(&config.belief)?;
        if let Some((to, eval)) = best_move(config, mass, from, tie) {
            let mut profile = state.profile.clone();
            profile.set_ballot(voter, to);
            let after = moved(&score, from, to);
            let record = MoveRecord {
                step: state.step,
                voter,
                from,
                to,
                criterion_value: eval.criterion_value,
                winner_before: winner(&score, tie),
                winner_after: winner(&after, tie),
                score_before: score.clone(),
                score_after: after,
            };
            let next = GameState {
                profile,
                step: state.step + 1,
                next_voter: (voter + 1) % n,
            };
            return Ok(StepOutcome::Moved(next, record));
        }
    }
    Ok(StepOutcome::Stable)
}

/// Iterates [`step`] until no voter wants to move, a `(profile, next_voter)` pair repeats, or
/// `max_steps` moves have been made.
pub fn run(initial: &GameState, configs: &[VoterConfig], tie: &TieBreakOrder, max_steps: u64) -> Result<RunOutcome> {
    if max_steps == 0 {
        return Err(Error::Validation(vec!["max_steps must be at least 1".into()]));
    }
    let mut seen: HashMap<(Vec<Candidate>, usize), usize> = HashMap::new();
    let mut state = initial.clone();
    let mut trace = Vec::new();
    loop {
        let key = (state.profile.ballots().to_vec(), state.next_voter);
        if let Some(&start) = seen.get(&key) {
            let length = trace.len() - start;
            return Ok(RunOutcome {
                status: RunStatus::Cycle,
                steps: trace.len() as u64,
                final_state: state,
                cycle: Some(CycleInfo { start, length }),
                trace,
            });
        }
        if trace.len() as u64 >= max_steps {
            return Ok(RunOutcome {
                status: RunStatus::StepLimit,
                steps: trace.len() as u64,
                final_state: state,
                cycle: None,
                trace,
            });
        }
        seen.insert(key, trace.len());
        match step(&state, configs, tie)? {
            StepOutcome::Stable => {
                return Ok(RunOutcome {
                    status: RunStatus::Converged,
                    steps: trace.len() as u64,
                    final_state: state,
                    cycle: None,
                    trace,
                })
            }
            StepOutcome::Moved(next, record) => {
                trace.push(record);
                state = next;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub voter: usize,
    pub from: Candidate,
    pub to: Candidate,
    pub evaluation: MoveEvaluation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub is_equilibrium: bool,
    pub witness: Option<Witness>,
}

/// No voter strictly prefers any other ballot. The witness is the first deviation found,
/// scanning voters and then candidates in index order.
pub fn equilibrium_check(state: &GameState, configs: &[VoterConfig], tie: &TieBreakOrder) -> Result<EquilibriumReport> {
    check_inputs(state, configs, tie)?;
    let score = state.score(tie.len());
    let mut cache = MassCache::new(&score);
    for (voter, config) in configs.iter().enumerate() {
        let from = state.profile.ballot(voter);
        let mass = cache.get(&config.belief)?;
        if let Some((to, evaluation)) = evaluations(config, mass, from, tie).find(|(_, e)| e.is_strict()) {
            return Ok(EquilibriumReport {
                is_equilibrium: false,
                witness: Some(Witness {
                    voter,
                    from,
                    to,
                    evaluation,
                }),
            });
        }
    }
    Ok(EquilibriumReport {
        is_equilibrium: true,
        witness: None,
    })
}
