use serde::{Deserialize, Serialize};

use super::{FocalElement, DEFAULT_EXPANSION_CAP};
use crate::election::ScoreVector;
use crate::error::{Error, Result};

/// How far a score vector may wander from the broadcast score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// ℓ1 ball over all nonnegative vectors: votes may be added or removed, so the total
    /// drifts by at most the radius.
    L1Addremove,
    /// At most `r` voters switch ballots; the total is preserved.
    VoterSwap,
}

impl Metric {
    /// Radius at which `x` first appears around `center`.
    pub(crate) fn radius_of(self, center: &ScoreVector, x: &ScoreVector) -> u64 {
        let d = center.l1_distance(x);
        match self {
            Metric::L1Addremove => d,
            Metric::VoterSwap => d / 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NeighborhoodSpec {
    pub metric: Metric,
    pub radius: u32,
}

impl NeighborhoodSpec {
    pub fn new(metric: Metric, radius: u32) -> Self {
        Self { metric, radius }
    }
}

pub fn neighborhood(center: &ScoreVector, spec: NeighborhoodSpec) -> Result<FocalElement> {
    neighborhood_with_cap(center, spec, DEFAULT_EXPANSION_CAP)
}

/// Every score vector within `spec.radius` of `center`, sorted.
pub fn neighborhood_with_cap(center: &ScoreVector, spec: NeighborhoodSpec, cap: usize) -> Result<FocalElement> {
    if center.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(center.len());
    let c = center.counts();
    match spec.metric {
        Metric::L1Addremove => l1_walk(c, spec.radius as u64, &mut cur, &mut out, cap)?,
        Metric::VoterSwap => swap_walk(c, spec.radius as u64, 0, 0, &mut cur, &mut out, cap)?,
    }
    FocalElement::from_sorted(out)
}

fn push_point(cur: &[u32], out: &mut Vec<ScoreVector>, cap: usize) -> Result<()> {
    if out.len() >= cap {
        return Err(Error::CapExceeded {
            what: "neighborhood",
            cap,
        });
    }
    out.push(ScoreVector::new(cur.to_vec()));
    Ok(())
}

fn l1_walk(center: &[u32], budget: u64, cur: &mut Vec<u32>, out: &mut Vec<ScoreVector>, cap: usize) -> Result<()> {
    let i = cur.len();
    if i == center.len() {
        return push_point(cur, out, cap);
    }
    let c = center[i] as u64;
    let lo = c.saturating_sub(budget);
    for v in lo..=c + budget {
        cur.push(v as u32);
        l1_walk(center, budget - v.abs_diff(c), cur, out, cap)?;
        cur.pop();
    }
    Ok(())
}

/// `added` and `removed` count votes gained and lost so far; both bounded by `r`, equal at the end.
fn swap_walk(
    center: &[u32],
    r: u64,
    added: u64,
    removed: u64,
    cur: &mut Vec<u32>,
    out: &mut Vec<ScoreVector>,
    cap: usize,
) -> Result<()> {
    let i = cur.len();
    if i == center.len() {
        if added == removed {
            push_point(cur, out, cap)?;
        }
        return Ok(());
    }
    let c = center[i] as u64;
    let lo = c.saturating_sub(r - removed);
    for v in lo..=c + (r - added) {
        let (a, d) = if v >= c {
            (added + v - c, removed)
        } else {
            (added, removed + c - v)
        };
        cur.push(v as u32);
        swap_walk(center, r, a, d, cur, out, cap)?;
        cur.pop();
    }
    Ok(())
}
