use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use super::{FocalElement, MassFunction, DEFAULT_EXPANSION_CAP};
use crate::election::{Candidate, ScoreVector};
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};

/// One voter's imprecise ballot: weights on sets of candidates they might vote for.
pub type BallotMass = Vec<(BTreeSet<Candidate>, Rational)>;

fn validate_ballot(voter: usize, mass: &BallotMass, m: usize) -> Result<()> {
    if mass.is_empty() {
        return Err(Error::InvalidMass(format!("voter {voter} has no focal sets")));
    }
    let mut total = zero();
    for (set, w) in mass {
        if set.is_empty() {
            return Err(Error::InvalidMass(format!("voter {voter} has an empty ballot set")));
        }
        if let Some(&c) = set.iter().find(|&&c| c >= m) {
            return Err(Error::InvalidCandidate { index: c, m });
        }
        if !w.is_positive() {
            return Err(Error::InvalidMass(format!("voter {voter} has a non-positive weight")));
        }
        total += w;
    }
    if total != one() {
        return Err(Error::InvalidMass(format!("voter {voter} weights sum to {total}")));
    }
    Ok(())
}

/// Joint mass over score vectors for independent voters.
///
/// Each tuple of per-voter focal sets gets the product of their weights and maps to the
/// set of score vectors obtainable by picking one candidate per voter. Tuples that produce
/// the same score set are merged.
pub fn product_mass(ballot_masses: &[BallotMass], m: usize) -> Result<MassFunction> {
    if ballot_masses.is_empty() {
        return Err(Error::InvalidMass("no voters".into()));
    }
    for (i, b) in ballot_masses.iter().enumerate() {
        validate_ballot(i, b, m)?;
    }
    let tuples = ballot_masses
        .iter()
        .try_fold(1usize, |acc, b| acc.checked_mul(b.len()))
        .filter(|&t| t <= DEFAULT_EXPANSION_CAP)
        .ok_or(Error::CapExceeded {
            what: "focal tuples",
            cap: DEFAULT_EXPANSION_CAP,
        })?;

    let mut acc: BTreeMap<FocalElement, Rational> = BTreeMap::new();
    let mut choice = vec![0usize; ballot_masses.len()];
    for _ in 0..tuples {
        let mut weight = one();
        let mut reachable: BTreeSet<Vec<u32>> = BTreeSet::from([vec![0u32; m]]);
        for (voter, &k) in choice.iter().enumerate() {
            let (set, w) = &ballot_masses[voter][k];
            weight *= w;
            let mut next = BTreeSet::new();
            for s in &reachable {
                for &c in set {
                    let mut t = s.clone();
                    t[c] += 1;
                    next.insert(t);
                }
            }
            if next.len() > DEFAULT_EXPANSION_CAP {
                return Err(Error::CapExceeded {
                    what: "focal element",
                    cap: DEFAULT_EXPANSION_CAP,
                });
            }
            reachable = next;
        }
        let focal = FocalElement::from_sorted(reachable.into_iter().map(ScoreVector::new).collect())?;
        *acc.entry(focal).or_insert_with(zero) += weight;

        // odometer over tuples
        for (voter, slot) in choice.iter_mut().enumerate() {
            *slot += 1;
            if *slot < ballot_masses[voter].len() {
                break;
            }
            *slot = 0;
        }
    }
    MassFunction::new(acc.into_iter().collect())
}
