//! Brute-force reference implementations, used to cross-check the fast paths.
//!
//! Each oracle takes a different route to the same number: selections instead of per-focal
//! extrema, points-first instead of focal-first pignistic sums, completions instead of
//! possible tops. Sizes are capped; exceeding a cap is an error.

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::decision::{move_utility, RuleKind, UtilityModel};
use crate::dynamics::{Belief, GameState, VoterConfig};
use crate::election::{apply_move, plurality_winner, Candidate, ScoreVector, TieBreakOrder};
use crate::error::{Error, Result};
use crate::preference::{extensions, PartialPreference, Preference};
use crate::rational::{int, one, zero, Rational};
use crate::uncertainty::{MassFunction, ScoreDistribution, DEFAULT_EXPANSION_CAP};

pub const MAX_ORACLE_FOCALS: usize = 6;
pub const MAX_ORACLE_POINTS: usize = 6;
pub const MAX_ORACLE_COMPLETIONS: usize = 10_000;

fn check_selection_caps(mass: &MassFunction) -> Result<()> {
    if mass.len() > MAX_ORACLE_FOCALS {
        return Err(Error::CapExceeded {
            what: "oracle focal elements",
            cap: MAX_ORACLE_FOCALS,
        });
    }
    if mass.assignments().iter().any(|(f, _)| f.len() > MAX_ORACLE_POINTS) {
        return Err(Error::CapExceeded {
            what: "oracle focal points",
            cap: MAX_ORACLE_POINTS,
        });
    }
    Ok(())
}

/// Expected utility of every selection function (one point chosen per focal element).
fn selection_values<F>(mass: &MassFunction, u: F) -> Result<Vec<Rational>>
where
    F: Fn(&ScoreVector) -> Rational,
{
    check_selection_caps(mass)?;
    let focals = mass.assignments();
    let mut out = Vec::new();
    let mut pick = vec![0usize; focals.len()];
    loop {
        let value = focals
            .iter()
            .zip(&pick)
            .map(|((f, w), &i)| w * u(&f.points()[i]))
            .fold(zero(), |a, b| a + b);
        out.push(value);
        let mut k = focals.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < focals[k].0.len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

/// Minimum over selections of `Σ_S M(S)·u(σ(S))`.
pub fn oracle_lower_expectation<F>(mass: &MassFunction, u: F) -> Result<Rational>
where
    F: Fn(&ScoreVector) -> Rational,
{
    Ok(selection_values(mass, u)?
        .into_iter()
        .min()
        .expect("at least one selection"))
}

/// Maximum over selections of `Σ_S M(S)·u(σ(S))`.
pub fn oracle_upper_expectation<F>(mass: &MassFunction, u: F) -> Result<Rational>
where
    F: Fn(&ScoreVector) -> Rational,
{
    Ok(selection_values(mass, u)?
        .into_iter()
        .max()
        .expect("at least one selection"))
}

/// Pignistic probability computed point by point.
pub fn oracle_pignistic(mass: &MassFunction) -> Result<ScoreDistribution> {
    let points: BTreeSet<ScoreVector> = mass
        .assignments()
        .iter()
        .flat_map(|(f, _)| f.points().iter().cloned())
        .collect();
    let entries = points.into_iter().map(|p| {
        let prob = mass
            .assignments()
            .iter()
            .filter(|(f, _)| f.points().contains(&p))
            .map(|(f, w)| w / int(f.len() as i64))
            .fold(zero(), |a, b| a + b);
        (p, prob)
    });
    ScoreDistribution::new(entries)
}

/// Strict preference from raw expectations, without the fused evaluation path.
fn oracle_strict(
    config: &VoterConfig,
    mass: &MassFunction,
    from: Candidate,
    to: Candidate,
    tie: &TieBreakOrder,
) -> bool {
    let u = |s: &ScoreVector| move_utility(config.utility, &config.preference, from, to, s, tie);
    let lower = mass.lower_expectation(u);
    let upper = mass.upper_expectation(u);
    let pig = mass.pignistic().expectation(u);
    let alpha = config.rule.alpha().cloned().unwrap_or_else(zero);
    match config.rule.kind() {
        RuleKind::Pessimistic => !lower.is_negative() && upper.is_positive(),
        RuleKind::Pignistic => pig.is_positive(),
        RuleKind::Mixture => (&alpha * lower + (one() - &alpha) * pig).is_positive(),
        RuleKind::Hurwicz => (&alpha * lower + (one() - &alpha) * upper).is_positive(),
    }
}

/// Exhaustive scan of all `n·(m−1)` deviations.
pub fn oracle_equilibrium(state: &GameState, configs: &[VoterConfig], tie: &TieBreakOrder) -> Result<bool> {
    let m = tie.len();
    if state.profile.len() != configs.len() {
        return Err(Error::DimensionMismatch {
            expected: configs.len(),
            got: state.profile.len(),
        });
    }
    let score = state.score(m);
    for (voter, config) in configs.iter().enumerate() {
        let mass = match &config.belief {
            Belief::Fixed(mass) => mass.clone(),
            Belief::Layered(spec) => spec.mass_around(&score, DEFAULT_EXPANSION_CAP)?,
        };
        let from = state.profile.ballot(voter);
        for to in 0..m {
            if to != from && oracle_strict(config, &mass, from, to, tie) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn sign_utility(
    pref: &Preference,
    from: Candidate,
    to: Candidate,
    s: &ScoreVector,
    tie: &TieBreakOrder,
) -> Result<i64> {
    let before = plurality_winner(s, tie)?;
    let after = plurality_winner(&apply_move(s, from, to)?, tie)?;
    Ok(if before == after {
        0
    } else if pref.rank(after) < pref.rank(before) {
        1
    } else {
        -1
    })
}

/// Enumerates every joint completion of the other voters' partial orders, each voting their
/// completed top; true iff the switch is never harmful and sometimes helps.
pub fn oracle_dominance(
    voter_pref: &Preference,
    others: &[PartialPreference],
    from: Candidate,
    to: Candidate,
    tie: &TieBreakOrder,
) -> Result<bool> {
    let m = voter_pref.len();
    let per_voter: Vec<Vec<Preference>> = others
        .iter()
        .map(|p| {
            if p.num_candidates() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: p.num_candidates(),
                });
            }
            extensions(p)
        })
        .collect::<Result<_>>()?;
    let total = per_voter
        .iter()
        .try_fold(1usize, |acc, e| acc.checked_mul(e.len()))
        .filter(|&t| t <= MAX_ORACLE_COMPLETIONS)
        .ok_or(Error::CapExceeded {
            what: "joint completions",
            cap: MAX_ORACLE_COMPLETIONS,
        })?;
    let mut some_better = false;
    let mut idx = vec![0usize; per_voter.len()];
    for _ in 0..total {
        let mut counts = vec![0u32; m];
        counts[from] += 1;
        for (exts, &i) in per_voter.iter().zip(&idx) {
            counts[exts[i].top()] += 1;
        }
        match sign_utility(voter_pref, from, to, &ScoreVector::new(counts), tie)? {
            -1 => return Ok(false),
            1 => some_better = true,
            _ => {}
        }
        for (k, slot) in idx.iter_mut().enumerate() {
            *slot += 1;
            if *slot < per_voter[k].len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(some_better)
}

/// Utility of a single move computed through the public winner function, for callers that want
/// an oracle-side utility table.
pub fn oracle_move_utility(
    model: UtilityModel,
    pref: &Preference,
    from: Candidate,
    to: Candidate,
    s: &ScoreVector,
    tie: &TieBreakOrder,
) -> Result<Rational> {
    let before = plurality_winner(s, tie)?;
    let after = plurality_winner(&apply_move(s, from, to)?, tie)?;
    let sign = sign_utility(pref, from, to, s, tie)?;
    Ok(match model {
        UtilityModel::MeirSign => int(sign),
        UtilityModel::DirectBestResponse if sign == 1 && after != to => zero(),
        UtilityModel::DirectBestResponse => int(sign),
        UtilityModel::CardinalRank => {
            let m = pref.len() as i64;
            int((m - 1 - pref.rank(after) as i64) - (m - 1 - pref.rank(before) as i64))
        }
    })
}
