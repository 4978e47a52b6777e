//! Line-delimited JSON traces and run summaries.

use serde::{Deserialize, Serialize};

use crate::dynamics::{MoveRecord, RunOutcome, RunStatus};
use crate::election::{tally, winner, CandidateSet, ScoreVector};
use crate::error::{Error, Result};
use crate::rational::format_rational;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub step: u64,
    pub voter: usize,
    pub from: String,
    pub to: String,
    pub criterion_value: String,
    pub score_before: ScoreVector,
    pub score_after: ScoreVector,
    pub winner_before: String,
    pub winner_after: String,
}

impl TraceRecord {
    pub fn from_move(record: &MoveRecord, candidates: &CandidateSet) -> Self {
        let label = |c| candidates.label(c).to_string();
        Self {
            step: record.step,
            voter: record.voter,
            from: label(record.from),
            to: label(record.to),
            criterion_value: format_rational(&record.criterion_value),
            score_before: record.score_before.clone(),
            score_after: record.score_after.clone(),
            winner_before: label(record.winner_before),
            winner_after: label(record.winner_after),
        }
    }
}

pub fn trace_records(outcome: &RunOutcome, candidates: &CandidateSet) -> Vec<TraceRecord> {
    outcome
        .trace
        .iter()
        .map(|r| TraceRecord::from_move(r, candidates))
        .collect()
}

pub fn emit_trace(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("trace line {}: {e}", i + 1))))
        .collect()
}

/// Re-applies the recorded moves from the scenario's initial ballots and checks every
/// recorded score and winner. Returns the first mismatch as an error.
pub fn replay(scenario: &Scenario, records: &[TraceRecord]) -> Result<()> {
    let c = &scenario.candidates;
    let mut ballots = scenario.initial.profile.ballots().to_vec();
    let mismatch = |i: usize, what: &str| {
        Err(Error::Validation(vec![format!(
            "trace record {i}: {what} does not replay"
        )]))
    };
    for (i, r) in records.iter().enumerate() {
        let from = c.index_of(&r.from)?;
        let to = c.index_of(&r.to)?;
        if r.voter >= ballots.len() || ballots[r.voter] != from {
            return mismatch(i, "ballot");
        }
        let before = tally(&ballots, c.len());
        ballots[r.voter] = to;
        let after = tally(&ballots, c.len());
        if before != r.score_before {
            return mismatch(i, "score_before");
        }
        if after != r.score_after {
            return mismatch(i, "score_after");
        }
        if c.label(winner(&before, &scenario.tie)) != r.winner_before {
            return mismatch(i, "winner_before");
        }
        if c.label(winner(&after, &scenario.tie)) != r.winner_after {
            return mismatch(i, "winner_after");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_start: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_len: Option<usize>,
    pub final_ballots: Vec<String>,
    pub final_score: ScoreVector,
    pub winner: String,
}

impl RunSummary {
    pub fn new(outcome: &RunOutcome, scenario: &Scenario) -> Self {
        let c = &scenario.candidates;
        let score = outcome.final_state.score(c.len());
        Self {
            status: outcome.status,
            steps: outcome.steps,
            cycle_start: outcome.cycle.map(|x| x.start),
            cycle_len: outcome.cycle.map(|x| x.length),
            final_ballots: outcome
                .final_state
                .profile
                .ballots()
                .iter()
                .map(|&b| c.label(b).to_string())
                .collect(),
            winner: c.label(winner(&score, &scenario.tie)).to_string(),
            final_score: score,
        }
    }
}
