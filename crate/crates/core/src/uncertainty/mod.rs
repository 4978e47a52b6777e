//! Belief functions over score vectors.
//!
//! A [`MassFunction`] spreads unit weight over sets of score vectors (focal elements).
//! Lower and upper expectations have a closed form for belief functions: the weighted sum
//! of per-focal minima (resp. maxima) of the utility. The pignistic transform spreads each
//! focal weight uniformly over its points.

mod layered;
mod multinomial;
mod neighborhood;
mod product;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::election::ScoreVector;
use crate::error::{Error, Result};
use crate::rational::{int, one, zero, Rational};

pub use layered::{layered_to_mass, LayerKind, LayeredBelief, LayeredSpec};
pub use multinomial::multinomial_distribution;
pub use neighborhood::{neighborhood, neighborhood_with_cap, Metric, NeighborhoodSpec};
pub use product::{product_mass, BallotMass};

/// Default cap on the number of points a single focal element may expand to.
pub const DEFAULT_EXPANSION_CAP: usize = 100_000;

/// Per-candidate integer intervals, optionally restricted to vectors with a fixed total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreBox {
    pub lower: Vec<u32>,
    pub upper: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<u64>,
}

impl ScoreBox {
    pub fn new(lower: Vec<u32>, upper: Vec<u32>, sum: Option<u64>) -> Self {
        Self { lower, upper, sum }
    }

    /// All integer points of the box (with the sum constraint when present), sorted.
    pub fn expand(&self, cap: usize) -> Result<Vec<ScoreVector>> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::InvalidFocal(format!(
                "box bounds have lengths {} and {}",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.lower.is_empty() {
            return Err(Error::InvalidFocal("box has no coordinates".into()));
        }
        if let Some((i, _)) = self.lower.iter().zip(&self.upper).enumerate().find(|(_, (l, u))| l > u) {
            return Err(Error::InvalidFocal(format!("box coordinate {i} has lower > upper")));
        }
        // suffix bounds let the sum-constrained walk prune dead branches
        let m = self.lower.len();
        let mut min_rest = vec![0u64; m + 1];
        let mut max_rest = vec![0u64; m + 1];
        for i in (0..m).rev() {
            min_rest[i] = min_rest[i + 1] + self.lower[i] as u64;
            max_rest[i] = max_rest[i + 1] + self.upper[i] as u64;
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(m);
        self.walk(0, 0, &min_rest, &max_rest, &mut cur, &mut out, cap)?;
        if out.is_empty() {
            return Err(Error::InvalidFocal("box expands to the empty set".into()));
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        i: usize,
        acc: u64,
        min_rest: &[u64],
        max_rest: &[u64],
        cur: &mut Vec<u32>,
        out: &mut Vec<ScoreVector>,
        cap: usize,
    ) -> Result<()> {
        if let Some(total) = self.sum {
            if acc + min_rest[i] > total || acc + max_rest[i] < total {
                return Ok(());
            }
        }
        if i == self.lower.len() {
            if out.len() >= cap {
                return Err(Error::CapExceeded {
                    what: "focal element",
                    cap,
                });
            }
            out.push(ScoreVector::new(cur.clone()));
            return Ok(());
        }
        for v in self.lower[i]..=self.upper[i] {
            cur.push(v);
            self.walk(i + 1, acc + v as u64, min_rest, max_rest, cur, out, cap)?;
            cur.pop();
        }
        Ok(())
    }
}

/// A nonempty set of score vectors, stored expanded, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FocalElement {
    points: Vec<ScoreVector>,
}

impl FocalElement {
    pub fn explicit(points: impl IntoIterator<Item = ScoreVector>) -> Result<Self> {
        let mut points: Vec<ScoreVector> = points.into_iter().collect();
        points.sort();
        points.dedup();
        Self::from_sorted(points)
    }

    pub fn from_box(b: &ScoreBox, cap: usize) -> Result<Self> {
        Self::from_sorted(b.expand(cap)?)
    }

    pub fn singleton(point: ScoreVector) -> Self {
        Self { points: vec![point] }
    }

    pub(crate) fn from_sorted(points: Vec<ScoreVector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidFocal("focal element is empty".into()));
        };
        let m = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.len(),
            });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ScoreVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn contains(&self, s: &ScoreVector) -> bool {
        self.points.binary_search(s).is_ok()
    }

    pub fn is_subset_of(&self, other: &FocalElement) -> bool {
        self.len() <= other.len() && self.points.iter().all(|p| other.contains(p))
    }

    pub fn is_disjoint(&self, other: &FocalElement) -> bool {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        !small.points.iter().any(|p| big.contains(p))
    }
}

/// A belief function: positive weights on distinct focal elements, summing to one.
///
/// Assignments keep their construction order; equality ignores it.
#[derive(Debug, Clone)]
pub struct MassFunction {
    assignments: Vec<(FocalElement, Rational)>,
}

impl PartialEq for MassFunction {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.assignments.iter().all(|a| other.assignments.contains(a))
    }
}

impl Eq for MassFunction {}

impl MassFunction {
    pub fn new(assignments: Vec<(FocalElement, Rational)>) -> Result<Self> {
        if assignments.is_empty() {
            return Err(Error::InvalidMass("no focal elements".into()));
        }
        let m = assignments[0].0.dimension();
        let mut total = zero();
        for (i, (f, w)) in assignments.iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::InvalidMass(format!("weight {i} is not positive")));
            }
            if f.dimension() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: f.dimension(),
                });
            }
            if assignments[..i].iter().any(|(g, _)| g == f) {
                return Err(Error::InvalidMass(format!("focal element {i} is repeated")));
            }
            total += w;
        }
        if total != one() {
            return Err(Error::InvalidMass(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { assignments })
    }

    /// Like [`MassFunction::new`] but sums the weights of repeated focal elements.
    pub fn merged(assignments: impl IntoIterator<Item = (FocalElement, Rational)>) -> Result<Self> {
        let mut acc: BTreeMap<FocalElement, Rational> = BTreeMap::new();
        for (f, w) in assignments {
            *acc.entry(f).or_insert_with(zero) += w;
        }
        Self::new(acc.into_iter().collect())
    }

    /// Mass one on a single set.
    pub fn vacuous(focal: FocalElement) -> Self {
        Self {
            assignments: vec![(focal, one())],
        }
    }

    /// Mass one on a single score vector.
    pub fn certain(point: ScoreVector) -> Self {
        Self::vacuous(FocalElement::singleton(point))
    }

    pub fn assignments(&self) -> &[(FocalElement, Rational)] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.assignments[0].0.dimension()
    }

    /// Union of all focal elements.
    pub fn support(&self) -> BTreeSet<ScoreVector> {
        self.assignments
            .iter()
            .flat_map(|(f, _)| f.points().iter().cloned())
            .collect()
    }

    /// Weight of focal elements contained in `event`.
    pub fn lower_probability(&self, event: &BTreeSet<ScoreVector>) -> Rational {
        self.assignments
            .iter()
            .filter(|(f, _)| f.points().iter().all(|p| event.contains(p)))
            .fold(zero(), |acc, (_, w)| acc + w)
    }

    /// Weight of focal elements meeting `event`.
    pub fn upper_probability(&self, event: &BTreeSet<ScoreVector>) -> Rational {
        self.assignments
            .iter()
            .filter(|(f, _)| f.points().iter().any(|p| event.contains(p)))
            .fold(zero(), |acc, (_, w)| acc + w)
    }

    /// `Σ_S M(S) · min_{x∈S} u(x)`.
    pub fn lower_expectation<F>(&self, u: F) -> Rational
    where
        F: Fn(&ScoreVector) -> Rational,
    {
        self.assignments.iter().fold(zero(), |acc, (f, w)| {
            let min = f.points().iter().map(&u).min().expect("focal elements are nonempty");
            acc + w * min
        })
    }

    /// `Σ_S M(S) · max_{x∈S} u(x)`.
    pub fn upper_expectation<F>(&self, u: F) -> Rational
    where
        F: Fn(&ScoreVector) -> Rational,
    {
        self.assignments.iter().fold(zero(), |acc, (f, w)| {
            let max = f.points().iter().map(&u).max().expect("focal elements are nonempty");
            acc + w * max
        })
    }

    /// Pignistic probability: each focal weight shared equally among its points.
    pub fn pignistic(&self) -> ScoreDistribution {
        let mut acc: BTreeMap<ScoreVector, Rational> = BTreeMap::new();
        for (f, w) in &self.assignments {
            let share = w / int(f.len() as i64);
            for p in f.points() {
                *acc.entry(p.clone()).or_insert_with(zero) += &share;
            }
        }
        ScoreDistribution {
            support: acc.into_iter().collect(),
        }
    }

    /// Structural class; see [`MassClass`] for the precedence.
    pub fn classify(&self, universe: Option<&BTreeSet<ScoreVector>>) -> MassClass {
        classify(self, universe)
    }
}

/// Free-function form of [`MassFunction::pignistic`].
pub fn pignistic(mass: &MassFunction) -> ScoreDistribution {
    mass.pignistic()
}

pub fn lower_probability(mass: &MassFunction, event: &BTreeSet<ScoreVector>) -> Rational {
    mass.lower_probability(event)
}

pub fn upper_probability(mass: &MassFunction, event: &BTreeSet<ScoreVector>) -> Rational {
    mass.upper_probability(event)
}

pub fn lower_expectation<F: Fn(&ScoreVector) -> Rational>(mass: &MassFunction, u: F) -> Rational {
    mass.lower_expectation(u)
}

pub fn upper_expectation<F: Fn(&ScoreVector) -> Rational>(mass: &MassFunction, u: F) -> Rational {
    mass.upper_expectation(u)
}

/// Structural families of belief functions.
///
/// Checked most specific first: bayesian, vacuous, necessity, inner, general. A single
/// singleton is therefore bayesian, and a single set is vacuous when it equals the declared
/// universe and a (trivial) necessity measure otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassClass {
    Bayesian,
    Vacuous,
    Necessity,
    Inner,
    General,
}

pub fn classify(mass: &MassFunction, universe: Option<&BTreeSet<ScoreVector>>) -> MassClass {
    let focals: Vec<&FocalElement> = mass.assignments().iter().map(|(f, _)| f).collect();
    if focals.iter().all(|f| f.len() == 1) {
        return MassClass::Bayesian;
    }
    if let (Some(universe), [only]) = (universe, focals.as_slice()) {
        if only.len() == universe.len() && only.points().iter().all(|p| universe.contains(p)) {
            return MassClass::Vacuous;
        }
    }
    let pairs = || {
        focals
            .iter()
            .enumerate()
            .flat_map(|(i, a)| focals[i + 1..].iter().map(move |b| (*a, *b)))
    };
    if pairs().all(|(a, b)| a.is_subset_of(b) || b.is_subset_of(a)) {
        return MassClass::Necessity;
    }
    if pairs().all(|(a, b)| a.is_disjoint(b)) {
        return MassClass::Inner;
    }
    MassClass::General
}

/// A probability distribution over finitely many score vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreDistribution {
    support: Vec<(ScoreVector, Rational)>,
}

impl ScoreDistribution {
    pub fn new(entries: impl IntoIterator<Item = (ScoreVector, Rational)>) -> Result<Self> {
        let mut acc: BTreeMap<ScoreVector, Rational> = BTreeMap::new();
        for (s, p) in entries {
            if !p.is_positive() {
                return Err(Error::InvalidDistribution(format!(
                    "probability of {s} is not positive"
                )));
            }
            if acc.insert(s.clone(), p).is_some() {
                return Err(Error::InvalidDistribution(format!("{s} listed twice")));
            }
        }
        if acc.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let total = acc.values().fold(zero(), |a, p| a + p);
        if total != one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            support: acc.into_iter().collect(),
        })
    }

    pub(crate) fn from_sorted_unchecked(support: Vec<(ScoreVector, Rational)>) -> Self {
        Self { support }
    }

    /// Sorted by score vector.
    pub fn support(&self) -> &[(ScoreVector, Rational)] {
        &self.support
    }

    pub fn probability(&self, s: &ScoreVector) -> Rational {
        self.support
            .binary_search_by(|(x, _)| x.cmp(s))
            .map(|i| self.support[i].1.clone())
            .unwrap_or_else(|_| zero())
    }

    pub fn expectation<F: Fn(&ScoreVector) -> Rational>(&self, u: F) -> Rational {
        self.support.iter().fold(zero(), |acc, (s, p)| acc + p * u(s))
    }

    /// The same distribution as a mass on singletons.
    pub fn to_mass(&self) -> MassFunction {
        MassFunction {
            assignments: self
                .support
                .iter()
                .map(|(s, p)| (FocalElement::singleton(s.clone()), p.clone()))
                .collect(),
        }
    }

    pub fn total(&self) -> Rational {
        self.support.iter().fold(zero(), |a, (_, p)| a + p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn sv(v: &[u32]) -> ScoreVector {
        ScoreVector::new(v.to_vec())
    }

    pub(crate) fn hesitant_mass() -> MassFunction {
        let boxed = ScoreBox::new(vec![0, 1, 1], vec![1, 2, 1], Some(3));
        MassFunction::new(vec![
            (FocalElement::singleton(sv(&[1, 1, 1])), ratio(1, 2)),
            (
                FocalElement::from_box(&boxed, DEFAULT_EXPANSION_CAP).unwrap(),
                ratio(1, 2),
            ),
        ])
        .unwrap()
    }

    #[test]
    fn interval_box_uses_sum_constraint() {
        let b = ScoreBox::new(vec![0, 1, 1], vec![1, 2, 1], Some(3));
        assert_eq!(b.expand(100).unwrap(), vec![sv(&[0, 2, 1]), sv(&[1, 1, 1])]);
        let free = ScoreBox::new(vec![0, 1, 1], vec![1, 2, 1], None);
        assert_eq!(free.expand(100).unwrap().len(), 4);
    }

    #[test]
    fn box_errors() {
        assert!(ScoreBox::new(vec![2, 0, 0], vec![1, 1, 1], None).expand(10).is_err());
        assert!(ScoreBox::new(vec![0, 0, 0], vec![1, 1, 1], Some(9)).expand(10).is_err());
        assert_eq!(
            ScoreBox::new(vec![0, 0, 0], vec![9, 9, 9], None)
                .expand(100)
                .unwrap_err(),
            Error::CapExceeded {
                what: "focal element",
                cap: 100
            }
        );
    }

    #[test]
    fn lower_upper_probability_of_hesitant_mass() {
        let m = hesitant_mass();
        let event = BTreeSet::from([sv(&[1, 1, 1])]);
        assert_eq!(m.lower_probability(&event), ratio(1, 2));
        assert_eq!(m.upper_probability(&event), ratio(1, 1));
        assert_eq!(m.lower_probability(&m.support()), one());
        assert_eq!(m.lower_probability(&BTreeSet::new()), zero());
        assert_eq!(m.upper_probability(&BTreeSet::new()), zero());
    }

    #[test]
    fn expectation_basics() {
        let m = hesitant_mass();
        let c = |_: &ScoreVector| ratio(7, 3);
        assert_eq!(m.lower_expectation(c), ratio(7, 3));
        assert_eq!(m.upper_expectation(c), ratio(7, 3));

        let d = ScoreDistribution::new([(sv(&[1, 0, 0]), ratio(1, 4)), (sv(&[0, 1, 0]), ratio(3, 4))]).unwrap();
        let u = |s: &ScoreVector| int(s.get(0) as i64 * 4);
        let mass = d.to_mass();
        assert_eq!(mass.lower_expectation(u), int(1));
        assert_eq!(mass.upper_expectation(u), int(1));
        assert_eq!(d.expectation(u), int(1));
    }

    #[test]
    fn pignistic_cases() {
        let f = FocalElement::explicit([sv(&[1, 0, 0]), sv(&[0, 1, 0]), sv(&[0, 0, 1])]).unwrap();
        let p = MassFunction::vacuous(f).pignistic();
        assert!(p.support().iter().all(|(_, q)| *q == ratio(1, 3)));

        let d = ScoreDistribution::new([(sv(&[2, 0, 0]), ratio(1, 3)), (sv(&[0, 2, 0]), ratio(2, 3))]).unwrap();
        assert_eq!(d.to_mass().pignistic(), d);

        let p = hesitant_mass().pignistic();
        assert_eq!(p.probability(&sv(&[1, 1, 1])), ratio(3, 4));
        assert_eq!(p.probability(&sv(&[0, 2, 1])), ratio(1, 4));
        assert_eq!(p.total(), one());
    }

    #[test]
    fn mass_validation() {
        let a = FocalElement::singleton(sv(&[1, 1, 1]));
        let b = FocalElement::singleton(sv(&[0, 2, 1]));
        assert!(MassFunction::new(vec![(a.clone(), ratio(1, 2))]).is_err());
        assert!(MassFunction::new(vec![(a.clone(), ratio(1, 2)), (a.clone(), ratio(1, 2))]).is_err());
        assert!(MassFunction::new(vec![(a.clone(), ratio(3, 2)), (b.clone(), ratio(-1, 2))]).is_err());
        let merged = MassFunction::merged(vec![
            (a.clone(), ratio(1, 4)),
            (b, ratio(1, 2)),
            (a.clone(), ratio(1, 4)),
        ])
        .unwrap();
        assert_eq!(merged.len(), 2);
        assert!(FocalElement::explicit(Vec::<ScoreVector>::new()).is_err());
        assert!(FocalElement::explicit([sv(&[1, 1]), sv(&[1, 1, 1])]).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(
            ScoreDistribution::new([(sv(&[1, 0, 0]), ratio(1, 2)), (sv(&[0, 1, 0]), ratio(1, 2))])
                .unwrap()
                .to_mass()
                .classify(None),
            MassClass::Bayesian
        );
        let set = FocalElement::explicit([sv(&[1, 1, 1]), sv(&[0, 2, 1])]).unwrap();
        let universe: BTreeSet<_> = set.points().iter().cloned().collect();
        let vac = MassFunction::vacuous(set);
        assert_eq!(vac.classify(Some(&universe)), MassClass::Vacuous);
        assert_eq!(vac.classify(None), MassClass::Necessity);

        let general = MassFunction::new(vec![
            (
                FocalElement::explicit([sv(&[1, 0, 0]), sv(&[0, 1, 0])]).unwrap(),
                ratio(1, 2),
            ),
            (
                FocalElement::explicit([sv(&[0, 1, 0]), sv(&[0, 0, 1])]).unwrap(),
                ratio(1, 2),
            ),
        ])
        .unwrap();
        assert_eq!(general.classify(None), MassClass::General);
    }

    fn arb_mass() -> impl Strategy<Value = MassFunction> {
        let point = proptest::collection::vec(0u32..3, 3).prop_map(ScoreVector::new);
        let focal = proptest::collection::vec(point, 1..4);
        proptest::collection::vec((focal, 1i64..6), 1..4).prop_filter_map("distinct", |raw| {
            let total: i64 = raw.iter().map(|(_, w)| w).sum();
            let items = raw
                .into_iter()
                .map(|(pts, w)| (FocalElement::explicit(pts).unwrap(), ratio(w, total)));
            MassFunction::merged(items).ok()
        })
    }

    fn utility_from(table: &[i64]) -> impl Fn(&ScoreVector) -> Rational + '_ {
        move |s: &ScoreVector| {
            let idx = s.counts().iter().fold(0usize, |a, &c| a * 3 + c as usize);
            int(table[idx % table.len()])
        }
    }

    proptest! {
        #[test]
        fn probability_bounds_and_duality(mass in arb_mass(), mask in proptest::collection::vec(any::<bool>(), 27)) {
            let universe: Vec<ScoreVector> = (0..27u32)
                .map(|i| ScoreVector::new(vec![i / 9, (i / 3) % 3, i % 3]))
                .collect();
            let event: BTreeSet<_> = universe.iter().zip(&mask).filter(|(_, &b)| b).map(|(s, _)| s.clone()).collect();
            let complement: BTreeSet<_> = universe.iter().filter(|s| !event.contains(s)).cloned().collect();
            let lo = mass.lower_probability(&event);
            let hi = mass.upper_probability(&event);
            prop_assert!(zero() <= lo && lo <= hi && hi <= one());
            prop_assert_eq!(hi, one() - mass.lower_probability(&complement));
        }

        #[test]
        fn expectation_sandwich_and_conjugacy(
            mass in arb_mass(),
            table in proptest::collection::vec(-5i64..6, 27),
            a in 0i64..7,
            b in 1i64..5,
        ) {
            let u = utility_from(&table);
            let lo = mass.lower_expectation(&u);
            let hi = mass.upper_expectation(&u);
            let pig = mass.pignistic().expectation(&u);
            prop_assert!(lo <= pig && pig <= hi);
            prop_assert_eq!(hi.clone(), -mass.lower_expectation(|s| -u(s)));
            let alpha = ratio(a, b);
            prop_assert_eq!(mass.lower_expectation(|s| &alpha * u(s)), &alpha * lo);
            prop_assert_eq!(mass.pignistic().total(), one());
        }
    }
}
