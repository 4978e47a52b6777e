//! Batches of generated runs, the executable form of the convergence results.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::RunStatus;
use crate::error::Result;
use crate::generate::{generate_instance, instance_shape, Family};
use crate::rational::{ratio, serde_text, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignConfig {
    pub family: Family,
    pub base_seed: u64,
    pub count: u64,
    /// Inclusive range of voter counts.
    pub voters: (usize, usize),
    /// Inclusive range of candidate counts.
    pub candidates: (usize, usize),
}

impl CampaignConfig {
    pub fn new(family: Family, count: u64) -> Self {
        Self {
            family,
            base_seed: 0,
            count,
            voters: (1, 6),
            candidates: (3, 4),
        }
    }
}

/// One generated run; `seed` regenerates the instance exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub seed: u64,
    pub status: RunStatus,
    pub steps: u64,
    pub cycle_len: Option<usize>,
    #[serde(skip)]
    pub voters: usize,
    #[serde(skip)]
    pub candidates: usize,
    /// Executed moves whose destination did not become the winner.
    #[serde(skip)]
    pub off_winner_moves: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CampaignSummary {
    pub family: String,
    pub count: u64,
    pub converged: u64,
    pub cycles: u64,
    pub step_limits: u64,
    #[serde(with = "serde_text")]
    pub convergence_rate: Rational,
    pub max_steps_observed: u64,
    pub off_winner_moves: u64,
    /// Seeds whose runs did not converge.
    pub witnesses: Vec<u64>,
    #[serde(skip)]
    pub rows: Vec<CampaignRow>,
}

impl CampaignSummary {
    /// A theorem family with a non-converging run, or a best-response family with a move that
    /// did not elect its destination.
    pub fn failed(&self, family: Family) -> bool {
        (family.asserts_convergence() && self.converged != self.count)
            || (family == Family::MeirR0 && self.off_winner_moves > 0)
    }
}

pub fn run_instance(seed: u64, config: &CampaignConfig) -> Result<CampaignRow> {
    let (n, m) = instance_shape(seed, config.voters, config.candidates);
    let scenario = generate_instance(seed, n, m, config.family)?.resolve()?;
    let outcome = scenario.run()?;
    Ok(CampaignRow {
        seed,
        status: outcome.status,
        steps: outcome.steps,
        cycle_len: outcome.cycle.map(|c| c.length),
        voters: n,
        candidates: m,
        off_winner_moves: outcome.trace.iter().filter(|r| r.to != r.winner_after).count() as u64,
    })
}

/// Runs `count` instances with seeds `base_seed..base_seed + count` in parallel. Rows come
/// back in seed order.
pub fn campaign(config: &CampaignConfig) -> Result<CampaignSummary> {
    let rows = (0..config.count)
        .into_par_iter()
        .map(|i| run_instance(config.base_seed + i, config))
        .collect::<Result<Vec<_>>>()?;
    let tally = |s: RunStatus| rows.iter().filter(|r| r.status == s).count() as u64;
    let converged = tally(RunStatus::Converged);
    Ok(CampaignSummary {
        family: config.family.as_str().to_string(),
        count: config.count,
        converged,
        cycles: tally(RunStatus::Cycle),
        step_limits: tally(RunStatus::StepLimit),
        convergence_rate: if config.count == 0 {
            ratio(1, 1)
        } else {
            ratio(converged as i64, config.count as i64)
        },
        max_steps_observed: rows.iter().map(|r| r.steps).max().unwrap_or(0),
        off_winner_moves: rows.iter().map(|r| r.off_winner_moves).sum(),
        witnesses: rows
            .iter()
            .filter(|r| r.status != RunStatus::Converged)
            .map(|r| r.seed)
            .collect(),
        rows,
    })
}
