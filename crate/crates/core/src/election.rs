//! Plurality elections: candidates, ballots, score vectors and the winner.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Candidates are addressed by index; labels only matter at the I/O boundary.
pub type Candidate = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    labels: Vec<String>,
}

impl CandidateSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 3 {
            return Err(Error::TooFewCandidates(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// `m` candidates labelled `a`, `b`, `c`, ...
    pub fn alphabetic(m: usize) -> Result<Self> {
        Self::new((0..m).map(default_label))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, c: Candidate) -> &str {
        &self.labels[c]
    }

    pub fn index_of(&self, label: &str) -> Result<Candidate> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn check(&self, c: Candidate) -> Result<Candidate> {
        if c < self.len() {
            Ok(c)
        } else {
            Err(Error::InvalidCandidate {
                index: c,
                m: self.len(),
            })
        }
    }
}

pub(crate) fn default_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("c{i}")
    }
}

pub(crate) fn check_permutation(order: &[Candidate], m: usize) -> Result<()> {
    if order.len() != m {
        return Err(Error::NotAPermutation(m));
    }
    let mut seen = vec![false; m];
    for &c in order {
        if c >= m || seen[c] {
            return Err(Error::NotAPermutation(m));
        }
        seen[c] = true;
    }
    Ok(())
}

/// Lexicographic tie-breaking order; the first entry wins every tie it is part of.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieBreakOrder {
    order: Vec<Candidate>,
    position: Vec<usize>,
}

impl TieBreakOrder {
    pub fn new(order: Vec<Candidate>) -> Result<Self> {
        let m = order.len();
        check_permutation(&order, m)?;
        let mut position = vec![0; m];
        for (p, &c) in order.iter().enumerate() {
            position[c] = p;
        }
        Ok(Self { order, position })
    }

    /// Label order: candidate 0 beats everyone in a tie.
    pub fn identity(m: usize) -> Self {
        Self {
            order: (0..m).collect(),
            position: (0..m).collect(),
        }
    }

    pub fn order(&self) -> &[Candidate] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Rank of `c` in the order, 0 being the most favoured.
    pub fn position(&self, c: Candidate) -> usize {
        self.position[c]
    }
}

/// Per-candidate vote counts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScoreVector(Vec<u32>);

impl ScoreVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn get(&self, c: Candidate) -> u32 {
        self.0[c]
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    /// ℓ1 distance between two vectors of equal length.
    pub fn l1_distance(&self, other: &ScoreVector) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a as i64 - b as i64).unsigned_abs())
            .sum()
    }
}

impl From<Vec<u32>> for ScoreVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for ScoreVector {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for ScoreVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// One ballot (a candidate index) per voter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BallotProfile {
    ballots: Vec<Candidate>,
}

impl BallotProfile {
    pub fn new(ballots: Vec<Candidate>, candidates: &CandidateSet) -> Result<Self> {
        for &b in &ballots {
            candidates.check(b)?;
        }
        Ok(Self { ballots })
    }

    pub(crate) fn from_unchecked(ballots: Vec<Candidate>) -> Self {
        Self { ballots }
    }

    pub fn ballots(&self) -> &[Candidate] {
        &self.ballots
    }

    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ballots.is_empty()
    }

    pub fn ballot(&self, voter: usize) -> Candidate {
        self.ballots[voter]
    }

    pub(crate) fn set_ballot(&mut self, voter: usize, c: Candidate) {
        self.ballots[voter] = c;
    }
}

pub fn scores_from_profile(profile: &BallotProfile, candidates: &CandidateSet) -> ScoreVector {
    tally(profile.ballots(), candidates.len())
}

pub fn tally(ballots: &[Candidate], m: usize) -> ScoreVector {
    let mut counts = vec![0u32; m];
    for &b in ballots {
        counts[b] += 1;
    }
    ScoreVector(counts)
}

/// Plurality winner with lexicographic tie-breaking.
pub fn plurality_winner(score: &ScoreVector, tie: &TieBreakOrder) -> Result<Candidate> {
    if score.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    if score.len() != tie.len() {
        return Err(Error::DimensionMismatch {
            expected: tie.len(),
            got: score.len(),
        });
    }
    Ok(winner(score, tie))
}

/// Infallible core of [`plurality_winner`]; callers guarantee matching dimensions.
pub(crate) fn winner(score: &ScoreVector, tie: &TieBreakOrder) -> Candidate {
    let counts = score.counts();
    let mut best = tie.order()[0];
    for &c in &tie.order()[1..] {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    best
}

/// Winner of `moved(score, from, to)` without building the moved vector.
pub(crate) fn winner_after_move(score: &ScoreVector, from: Candidate, to: Candidate, tie: &TieBreakOrder) -> Candidate {
    let counts = score.counts();
    let count = |c: Candidate| {
        if from == to {
            counts[c]
        } else if c == from {
            counts[c].saturating_sub(1)
        } else if c == to {
            counts[c] + 1
        } else {
            counts[c]
        }
    };
    let mut best = tie.order()[0];
    let mut best_count = count(best);
    for &c in &tie.order()[1..] {
        let k = count(c);
        if k > best_count {
            best = c;
            best_count = k;
        }
    }
    best
}

/// Moves one vote from `from` to `to`.
///
/// The decrement is clamped at zero: neighbourhood states need not contain the mover's
/// own ballot, and the increment is still applied. `from == to` is the identity.
pub fn apply_move(score: &ScoreVector, from: Candidate, to: Candidate) -> Result<ScoreVector> {
    for c in [from, to] {
        if c >= score.len() {
            return Err(Error::InvalidCandidate {
                index: c,
                m: score.len(),
            });
        }
    }
    Ok(moved(score, from, to))
}

pub(crate) fn moved(score: &ScoreVector, from: Candidate, to: Candidate) -> ScoreVector {
    let mut out = score.clone();
    if from != to {
        let counts = out.counts_mut();
        counts[from] = counts[from].saturating_sub(1);
        counts[to] += 1;
    }
    out
}
