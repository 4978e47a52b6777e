//! Voter preferences: strict linear orders, strict partial orders and their completions.

use std::collections::BTreeSet;

use crate::election::{check_permutation, Candidate, CandidateSet};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Upper bound on the number of completions `linear_extensions` will materialise.
pub const MAX_EXTENSIONS: usize = 100_000;

/// A strict linear order over candidates, best first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Preference {
    ranking: Vec<Candidate>,
    rank: Vec<usize>,
}

impl Preference {
    pub fn new(ranking: Vec<Candidate>) -> Result<Self> {
        let m = ranking.len();
        check_permutation(&ranking, m)?;
        let mut rank = vec![0; m];
        for (r, &c) in ranking.iter().enumerate() {
            rank[c] = r;
        }
        Ok(Self { ranking, rank })
    }

    pub fn from_labels<S: AsRef<str>>(labels: &[S], candidates: &CandidateSet) -> Result<Self> {
        let ranking = labels
            .iter()
            .map(|l| candidates.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        if ranking.len() != candidates.len() {
            return Err(Error::NotAPermutation(candidates.len()));
        }
        Self::new(ranking)
    }

    pub fn ranking(&self) -> &[Candidate] {
        &self.ranking
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn top(&self) -> Candidate {
        self.ranking[0]
    }

    /// Position of `c`, 0 for the favourite.
    pub fn rank(&self, c: Candidate) -> usize {
        self.rank[c]
    }

    /// `x ≻ y`.
    pub fn prefers(&self, x: Candidate, y: Candidate) -> bool {
        self.rank[x] < self.rank[y]
    }

    pub fn labels<'a>(&self, candidates: &'a CandidateSet) -> Vec<&'a str> {
        self.ranking.iter().map(|&c| candidates.label(c)).collect()
    }

    /// Integer rank utility: `m - 1 - rank`.
    pub(crate) fn rank_score(&self, c: Candidate) -> i64 {
        (self.ranking.len() - 1 - self.rank[c]) as i64
    }
}

/// Cardinal utility consistent with the order: the favourite gets `m - 1`, the last gets 0.
///
/// Any strictly order-preserving table would do; this is the one used throughout.
pub fn rank_utility(pref: &Preference) -> Vec<Rational> {
    (0..pref.len()).map(|c| int(pref.rank_score(c))).collect()
}

/// A strict partial order given as pairs `(x, y)` meaning `x ≻ y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialPreference {
    m: usize,
    pairs: BTreeSet<(Candidate, Candidate)>,
}

impl PartialPreference {
    pub fn new(m: usize, pairs: impl IntoIterator<Item = (Candidate, Candidate)>) -> Result<Self> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        for &(x, y) in &pairs {
            for c in [x, y] {
                if c >= m {
                    return Err(Error::InvalidCandidate { index: c, m });
                }
            }
            if x == y {
                return Err(Error::CyclicPreference);
            }
        }
        let p = Self { m, pairs };
        if p.has_cycle() {
            return Err(Error::CyclicPreference);
        }
        Ok(p)
    }

    /// No information at all.
    pub fn empty(m: usize) -> Self {
        Self {
            m,
            pairs: BTreeSet::new(),
        }
    }

    /// Every pair implied by a linear order.
    pub fn from_linear(pref: &Preference) -> Self {
        let r = pref.ranking();
        let mut pairs = BTreeSet::new();
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                pairs.insert((r[i], r[j]));
            }
        }
        Self { m: r.len(), pairs }
    }

    pub fn num_candidates(&self) -> usize {
        self.m
    }

    pub fn pairs(&self) -> &BTreeSet<(Candidate, Candidate)> {
        &self.pairs
    }

    fn has_cycle(&self) -> bool {
        // Kahn: a cycle leaves nodes with positive in-degree.
        let mut indeg = vec![0usize; self.m];
        for &(_, y) in &self.pairs {
            indeg[y] += 1;
        }
        let mut stack: Vec<Candidate> = (0..self.m).filter(|&c| indeg[c] == 0).collect();
        let mut seen = 0;
        while let Some(x) = stack.pop() {
            seen += 1;
            for &(a, b) in &self.pairs {
                if a == x {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        stack.push(b);
                    }
                }
            }
        }
        seen != self.m
    }

    fn beaten_by(&self) -> Vec<Vec<Candidate>> {
        let mut preds = vec![Vec::new(); self.m];
        for &(x, y) in &self.pairs {
            preds[y].push(x);
        }
        preds
    }
}

/// Every linear order consistent with `partial`, in lexicographic order of rankings.
pub fn linear_extensions(partial: &PartialPreference, candidates: &CandidateSet) -> Result<Vec<Preference>> {
    if partial.num_candidates() != candidates.len() {
        return Err(Error::DimensionMismatch {
            expected: candidates.len(),
            got: partial.num_candidates(),
        });
    }
    extensions(partial)
}

pub(crate) fn extensions(partial: &PartialPreference) -> Result<Vec<Preference>> {
    let m = partial.num_candidates();
    let preds = partial.beaten_by();
    let mut out = Vec::new();
    let mut placed = vec![false; m];
    let mut prefix = Vec::with_capacity(m);
    extend(&preds, &mut placed, &mut prefix, &mut out)?;
    Ok(out)
}

fn extend(
    preds: &[Vec<Candidate>],
    placed: &mut [bool],
    prefix: &mut Vec<Candidate>,
    out: &mut Vec<Preference>,
) -> Result<()> {
    let m = placed.len();
    if prefix.len() == m {
        if out.len() >= MAX_EXTENSIONS {
            return Err(Error::CapExceeded {
                what: "linear extensions",
                cap: MAX_EXTENSIONS,
            });
        }
        out.push(Preference::new(prefix.clone()).expect("prefix is a permutation"));
        return Ok(());
    }
    for c in 0..m {
        if !placed[c] && preds[c].iter().all(|&p| placed[p]) {
            placed[c] = true;
            prefix.push(c);
            extend(preds, placed, prefix, out)?;
            prefix.pop();
            placed[c] = false;
        }
    }
    Ok(())
}

/// Maximal elements: the candidates nobody is declared preferred to.
pub fn possible_tops(partial: &PartialPreference) -> BTreeSet<Candidate> {
    let mut tops: BTreeSet<Candidate> = (0..partial.num_candidates()).collect();
    for &(_, y) in partial.pairs() {
        tops.remove(&y);
    }
    tops
}
