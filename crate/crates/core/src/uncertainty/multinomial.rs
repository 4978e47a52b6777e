use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{ScoreDistribution, DEFAULT_EXPANSION_CAP};
use crate::election::ScoreVector;
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact multinomial law of the score vector when `n` voters independently vote for
/// candidate `x` with probability `q[x]`. Zero-probability vectors are left out.
pub fn multinomial_distribution(q: &[Rational], n: u32) -> Result<ScoreDistribution> {
    if q.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    if n == 0 {
        return Err(Error::InvalidDistribution("need at least one voter".into()));
    }
    if q.iter().any(|p| p.is_negative()) {
        return Err(Error::InvalidDistribution("negative category weight".into()));
    }
    let total = q.iter().fold(zero(), |a, p| a + p);
    if total != one() {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
    }
    let m = q.len() as u64;
    let count = binomial(n as u64 + m - 1, m - 1);
    if count.is_none_or(|c| c > DEFAULT_EXPANSION_CAP as u64) {
        return Err(Error::CapExceeded {
            what: "score compositions",
            cap: DEFAULT_EXPANSION_CAP,
        });
    }

    let n_fact = factorial(n);
    let mut support = Vec::new();
    let mut cur = Vec::with_capacity(q.len());
    compositions(q.len(), n, &mut cur, &mut |parts: &[u32]| {
        let mut p = Rational::from_integer(n_fact.clone());
        for (&k, qx) in parts.iter().zip(q) {
            if k > 0 {
                if qx.is_zero() {
                    return;
                }
                p *= num_traits::pow(qx.clone(), k as usize);
                p /= Rational::from_integer(factorial(k));
            }
        }
        support.push((ScoreVector::new(parts.to_vec()), p));
    });
    // compositions are produced in lexicographic order
    Ok(ScoreDistribution::from_sorted_unchecked(support))
}

fn compositions(parts: usize, remaining: u32, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if cur.len() + 1 == parts {
        cur.push(remaining);
        f(cur);
        cur.pop();
        return;
    }
    for k in 0..=remaining {
        cur.push(k);
        compositions(parts, remaining - k, cur, f);
        cur.pop();
    }
}
