//! Move utilities and the four decision criteria over a belief function.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::election::{winner, winner_after_move, Candidate, ScoreVector, TieBreakOrder};
use crate::error::{Error, Result};
use crate::preference::{possible_tops, PartialPreference, Preference};
use crate::rational::{int, one, zero, Rational};
use crate::uncertainty::{FocalElement, MassFunction, DEFAULT_EXPANSION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityModel {
    /// +1 if the new winner is preferred, −1 if the old one was, 0 otherwise.
    MeirSign,
    /// Like `MeirSign`, but an improvement only counts when the destination itself wins.
    DirectBestResponse,
    /// Difference of rank utilities of the new and old winners.
    CardinalRank,
}

/// Utility of voting `to` instead of `from` when the true score is `s`.
pub(crate) fn utility_int(
    model: UtilityModel,
    pref: &Preference,
    from: Candidate,
    to: Candidate,
    s: &ScoreVector,
    tie: &TieBreakOrder,
) -> i64 {
    let old = winner(s, tie);
    let new = winner_after_move(s, from, to, tie);
    match model {
        UtilityModel::MeirSign => sign(pref, new, old),
        UtilityModel::DirectBestResponse => match sign(pref, new, old) {
            1 if new == to => 1,
            1 | 0 => 0,
            _ => -1,
        },
        UtilityModel::CardinalRank => pref.rank_score(new) - pref.rank_score(old),
    }
}

fn sign(pref: &Preference, new: Candidate, old: Candidate) -> i64 {
    if new == old {
        0
    } else if pref.prefers(new, old) {
        1
    } else {
        -1
    }
}

pub fn move_utility(
    model: UtilityModel,
    voter_pref: &Preference,
    from: Candidate,
    to: Candidate,
    s: &ScoreVector,
    tie: &TieBreakOrder,
) -> Rational {
    int(utility_int(model, voter_pref, from, to, s, tie))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Pessimistic,
    Pignistic,
    Mixture,
    Hurwicz,
}

impl RuleKind {
    pub fn needs_alpha(self) -> bool {
        matches!(self, RuleKind::Mixture | RuleKind::Hurwicz)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecisionRule {
    kind: RuleKind,
    alpha: Option<Rational>,
}

impl DecisionRule {
    pub fn new(kind: RuleKind, alpha: Option<Rational>) -> Result<Self> {
        match (&alpha, kind.needs_alpha()) {
            (None, true) => Err(Error::InvalidRule(format!("{kind:?} needs alpha"))),
            (Some(_), false) => Err(Error::InvalidRule(format!("{kind:?} takes no alpha"))),
            (Some(a), true) if a.is_negative() || *a > one() => {
                Err(Error::InvalidRule(format!("alpha {a} is outside [0, 1]")))
            }
            _ => Ok(Self { kind, alpha }),
        }
    }

    pub fn pessimistic() -> Self {
        Self {
            kind: RuleKind::Pessimistic,
            alpha: None,
        }
    }

    pub fn pignistic() -> Self {
        Self {
            kind: RuleKind::Pignistic,
            alpha: None,
        }
    }

    pub fn mixture(alpha: Rational) -> Result<Self> {
        Self::new(RuleKind::Mixture, Some(alpha))
    }

    pub fn hurwicz(alpha: Rational) -> Result<Self> {
        Self::new(RuleKind::Hurwicz, Some(alpha))
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn alpha(&self) -> Option<&Rational> {
        self.alpha.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrictlyPreferred,
    WeaklyPreferred,
    NotPreferred,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveEvaluation {
    pub lower: Rational,
    pub upper: Rational,
    pub pignistic_value: Rational,
    /// Positive exactly when the move is strictly preferred, zero when weakly.
    ///
    /// For the pessimistic rule this is `upper` when `lower ≥ 0` and `lower` otherwise.
    pub criterion_value: Rational,
    pub verdict: Verdict,
}

impl MoveEvaluation {
    pub fn is_strict(&self) -> bool {
        self.verdict == Verdict::StrictlyPreferred
    }
}

/// Combines the three expectations according to `rule`.
pub(crate) fn combine(rule: &DecisionRule, lower: Rational, upper: Rational, pig: Rational) -> MoveEvaluation {
    let criterion_value = match rule.kind {
        RuleKind::Pessimistic => {
            if lower.is_negative() {
                lower.clone()
            } else {
                upper.clone()
            }
        }
        RuleKind::Pignistic => pig.clone(),
        RuleKind::Mixture => {
            let a = rule.alpha.as_ref().expect("validated");
            a * &lower + (one() - a) * &pig
        }
        RuleKind::Hurwicz => {
            let a = rule.alpha.as_ref().expect("validated");
            a * &lower + (one() - a) * &upper
        }
    };
    let verdict = if criterion_value.is_positive() {
        Verdict::StrictlyPreferred
    } else if criterion_value.is_zero() {
        Verdict::WeaklyPreferred
    } else {
        Verdict::NotPreferred
    };
    MoveEvaluation {
        lower,
        upper,
        pignistic_value: pig,
        criterion_value,
        verdict,
    }
}

pub fn evaluate_move(
    mass: &MassFunction,
    rule: &DecisionRule,
    model: UtilityModel,
    voter_pref: &Preference,
    from: Candidate,
    to: Candidate,
    tie: &TieBreakOrder,
) -> MoveEvaluation {
    let mut lower = zero();
    let mut upper = zero();
    let mut pig = zero();
    for (focal, w) in mass.assignments() {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        let mut sum = 0i64;
        for s in focal.points() {
            let u = utility_int(model, voter_pref, from, to, s, tie);
            lo = lo.min(u);
            hi = hi.max(u);
            sum += u;
        }
        lower += w * int(lo);
        upper += w * int(hi);
        pig += w * Rational::new(sum.into(), (focal.len() as i64).into());
    }
    combine(rule, lower, upper, pig)
}

/// Number of improving minus number of worsening states over the only focal element,
/// under the sign utility. Its sign is the pignistic verdict for such masses.
pub fn pignistic_cardinal(
    mass: &MassFunction,
    voter_pref: &Preference,
    from: Candidate,
    to: Candidate,
    tie: &TieBreakOrder,
) -> Result<i64> {
    match mass.assignments() {
        [(focal, _)] => Ok(focal
            .points()
            .iter()
            .map(|s| utility_int(UtilityModel::MeirSign, voter_pref, from, to, s, tie))
            .sum()),
        other => Err(Error::NotSingleFocal(other.len())),
    }
}

/// Scores reachable when the manipulator votes `from` and each other voter votes one of the
/// possible tops of their partial order.
pub(crate) fn completion_scores(m: usize, others: &[PartialPreference], from: Candidate) -> Result<FocalElement> {
    let mut reachable: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut base = vec![0u32; m];
    base[from] += 1;
    reachable.insert(base);
    for other in others {
        if other.num_candidates() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: other.num_candidates(),
            });
        }
        let tops = possible_tops(other);
        let mut next = BTreeSet::new();
        for s in &reachable {
            for &c in &tops {
                let mut t = s.clone();
                t[c] += 1;
                next.insert(t);
            }
        }
        if next.len() > DEFAULT_EXPANSION_CAP {
            return Err(Error::CapExceeded {
                what: "completion scores",
                cap: DEFAULT_EXPANSION_CAP,
            });
        }
        reachable = next;
    }
    FocalElement::explicit(reachable.into_iter().map(ScoreVector::new))
}

/// Whether switching from `from` to `to` is never worse and sometimes better, whatever the
/// completions of the other voters' partial preferences.
pub fn dominating_manipulation(
    voter_pref: &Preference,
    others: &[PartialPreference],
    from: Candidate,
    to: Candidate,
    tie: &TieBreakOrder,
) -> Result<bool> {
    let m = voter_pref.len();
    for c in [from, to] {
        if c >= m {
            return Err(Error::InvalidCandidate { index: c, m });
        }
    }
    let mass = MassFunction::vacuous(completion_scores(m, others, from)?);
    let eval = evaluate_move(
        &mass,
        &DecisionRule::pessimistic(),
        UtilityModel::MeirSign,
        voter_pref,
        from,
        to,
        tie,
    );
    Ok(eval.is_strict())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::uncertainty::{ScoreBox, ScoreDistribution};
    use proptest::prelude::*;

    const A: Candidate = 0;
    const B: Candidate = 1;
    const C: Candidate = 2;

    fn pref(r: &[Candidate]) -> Preference {
        Preference::new(r.to_vec()).unwrap()
    }

    fn hesitant_mass() -> MassFunction {
        let b = ScoreBox::new(vec![0, 1, 1], vec![1, 2, 1], Some(3));
        MassFunction::new(vec![
            (FocalElement::singleton([1, 1, 1].into()), ratio(1, 2)),
            (FocalElement::from_box(&b, 100).unwrap(), ratio(1, 2)),
        ])
        .unwrap()
    }

    #[test]
    fn hesitant_voter_utilities() {
        let tie = TieBreakOrder::identity(3);
        let v2 = pref(&[B, C, A]);
        let u = |s: [u32; 3]| move_utility(UtilityModel::MeirSign, &v2, B, C, &s.into(), &tie);
        assert_eq!(u([1, 1, 1]), int(1));
        assert_eq!(u([0, 2, 1]), int(-1));
        assert_eq!(
            move_utility(UtilityModel::MeirSign, &v2, B, B, &[0, 2, 1].into(), &tie),
            zero()
        );
    }

    #[test]
    fn hesitant_voter_hurwicz() {
        let tie = TieBreakOrder::identity(3);
        let rule = DecisionRule::hurwicz(ratio(1, 3)).unwrap();
        let e = evaluate_move(
            &hesitant_mass(),
            &rule,
            UtilityModel::MeirSign,
            &pref(&[B, C, A]),
            B,
            C,
            &tie,
        );
        assert_eq!(e.lower, zero());
        assert_eq!(e.upper, one());
        assert_eq!(e.criterion_value, ratio(2, 3));
        assert_eq!(e.verdict, Verdict::StrictlyPreferred);
        // pignistic weight of (1,1,1) is 3/4, of (0,2,1) is 1/4
        assert_eq!(e.pignistic_value, ratio(1, 2));
    }

    #[test]
    fn pessimistic_verdicts() {
        let tie = TieBreakOrder::identity(3);
        let v2 = pref(&[B, C, A]);
        let rule = DecisionRule::pessimistic();
        let e = evaluate_move(&hesitant_mass(), &rule, UtilityModel::MeirSign, &v2, B, C, &tie);
        // lower = 0, upper = 1
        assert_eq!(e.verdict, Verdict::StrictlyPreferred);
        let flat = MassFunction::certain([3, 0, 0].into());
        let e = evaluate_move(&flat, &rule, UtilityModel::MeirSign, &v2, B, C, &tie);
        assert_eq!(e.verdict, Verdict::WeaklyPreferred);
        let bad = MassFunction::certain([0, 2, 1].into());
        let e = evaluate_move(&bad, &rule, UtilityModel::MeirSign, &v2, B, C, &tie);
        assert_eq!(e.verdict, Verdict::NotPreferred);
        assert_eq!(e.criterion_value, int(-1));
    }

    #[test]
    fn null_move_is_never_strict() {
        let tie = TieBreakOrder::identity(3);
        for rule in [
            DecisionRule::pessimistic(),
            DecisionRule::pignistic(),
            DecisionRule::mixture(ratio(1, 2)).unwrap(),
            DecisionRule::hurwicz(zero()).unwrap(),
        ] {
            let e = evaluate_move(
                &hesitant_mass(),
                &rule,
                UtilityModel::CardinalRank,
                &pref(&[C, B, A]),
                A,
                A,
                &tie,
            );
            assert_eq!(e.lower, zero());
            assert_eq!(e.upper, zero());
            assert!(!e.is_strict());
        }
    }

    #[test]
    fn direct_best_response_boundary() {
        let tie = TieBreakOrder::identity(3);
        // c-voter at (2,2,1) moving c→b: b wins, and b is the destination
        let v = pref(&[C, B, A]);
        let s: ScoreVector = [2, 2, 1].into();
        assert_eq!(utility_int(UtilityModel::DirectBestResponse, &v, C, B, &s, &tie), 1);
        // leaving a hands the win to b even though the vote goes to c
        let s: ScoreVector = [2, 2, 0].into();
        assert_eq!(utility_int(UtilityModel::MeirSign, &v, A, C, &s, &tie), 1);
        assert_eq!(utility_int(UtilityModel::DirectBestResponse, &v, A, C, &s, &tie), 0);
        // worsening stays −1
        let v = pref(&[A, C, B]);
        assert_eq!(utility_int(UtilityModel::DirectBestResponse, &v, A, C, &s, &tie), -1);
    }

    #[test]
    fn cardinal_rank_utility() {
        let tie = TieBreakOrder::identity(3);
        let v = pref(&[C, B, A]);
        // winner a → c
        let s: ScoreVector = [1, 0, 1].into();
        assert_eq!(move_utility(UtilityModel::CardinalRank, &v, A, C, &s, &tie), int(2));
    }

    #[test]
    fn rule_validation() {
        assert!(DecisionRule::new(RuleKind::Hurwicz, None).is_err());
        assert!(DecisionRule::new(RuleKind::Pessimistic, Some(one())).is_err());
        assert!(DecisionRule::hurwicz(ratio(3, 2)).is_err());
        assert!(DecisionRule::mixture(ratio(-1, 2)).is_err());
        assert!(DecisionRule::mixture(zero()).is_ok());
    }

    #[test]
    fn pignistic_cardinal_needs_one_focal() {
        let tie = TieBreakOrder::identity(3);
        let err = pignistic_cardinal(&hesitant_mass(), &pref(&[B, C, A]), B, C, &tie).unwrap_err();
        assert_eq!(err, Error::NotSingleFocal(2));
    }

    #[test]
    fn pignistic_cardinal_symmetric_set() {
        let tie = TieBreakOrder::identity(3);
        let set = FocalElement::explicit([[1, 1, 1].into(), [0, 2, 1].into()]).unwrap();
        let d = pignistic_cardinal(&MassFunction::vacuous(set), &pref(&[B, C, A]), B, C, &tie).unwrap();
        assert_eq!(d, 0);
    }

    #[test]
    fn dominance_with_complete_others() {
        let tie = TieBreakOrder::identity(3);
        let complete = |r: &[Candidate]| PartialPreference::from_linear(&pref(r));
        // others vote b and c; manipulator prefers c and votes a → c wins
        let others = vec![complete(&[B, A, C]), complete(&[C, A, B])];
        assert!(dominating_manipulation(&pref(&[C, B, A]), &others, A, C, &tie).unwrap());
        // others both vote a: nothing the manipulator does matters
        let others = vec![complete(&[A, B, C]), complete(&[A, C, B])];
        assert!(!dominating_manipulation(&pref(&[C, B, A]), &others, B, C, &tie).unwrap());
    }

    #[test]
    fn partial_order_score_set() {
        let fixed_c = PartialPreference::from_linear(&pref(&[C, A, B]));
        let hesitant = PartialPreference::new(3, [(A, C)]).unwrap();
        // voter 1 keeps b; the others are fixed on c and unsure between a and b
        let set = completion_scores(3, &[fixed_c, hesitant], B).unwrap();
        let expected = FocalElement::explicit([[1, 1, 1].into(), [0, 2, 1].into()]).unwrap();
        assert_eq!(set, expected);
    }

    fn arb_point_mass(m: usize) -> impl Strategy<Value = MassFunction> {
        proptest::collection::btree_map(proptest::collection::vec(0u32..4, m), 1i64..6, 1..6).prop_map(|pts| {
            let total: i64 = pts.values().sum();
            let entries = pts.into_iter().map(|(p, w)| (ScoreVector::new(p), ratio(w, total)));
            ScoreDistribution::new(entries).unwrap().to_mass()
        })
    }

    fn arb_move() -> impl Strategy<Value = (Preference, Candidate, Candidate, UtilityModel)> {
        (
            Just(vec![A, B, C]).prop_shuffle(),
            0..3usize,
            0..3usize,
            prop_oneof![
                Just(UtilityModel::MeirSign),
                Just(UtilityModel::DirectBestResponse),
                Just(UtilityModel::CardinalRank)
            ],
        )
            .prop_map(|(r, f, t, u)| (Preference::new(r).unwrap(), f, t, u))
    }

    fn arb_alpha() -> impl Strategy<Value = Rational> {
        (0i64..=12).prop_map(|k| ratio(k, 12))
    }

    proptest! {
        #[test]
        fn bayesian_masses_collapse_rules(mass in arb_point_mass(3), (p, f, t, u) in arb_move(), a in arb_alpha()) {
            let tie = TieBreakOrder::identity(3);
            let verdicts: Vec<Verdict> = [
                DecisionRule::pessimistic(),
                DecisionRule::pignistic(),
                DecisionRule::mixture(a.clone()).unwrap(),
                DecisionRule::hurwicz(a).unwrap(),
            ]
            .iter()
            .map(|r| evaluate_move(&mass, r, u, &p, f, t, &tie).verdict)
            .collect();
            prop_assert!(verdicts.windows(2).all(|w| w[0] == w[1]));
        }

        #[test]
        fn rule_identities(
            points in proptest::collection::btree_set(proptest::collection::vec(0u32..4, 3), 1..5),
            (p, f, t, u) in arb_move(),
        ) {
            let tie = TieBreakOrder::identity(3);
            let focal = FocalElement::explicit(points.into_iter().map(ScoreVector::new)).unwrap();
            let mass = MassFunction::merged([(focal.clone(), ratio(1, 2)), (FocalElement::singleton(focal.points()[0].clone()), ratio(1, 2))]).unwrap();
            let ev = |r: DecisionRule| evaluate_move(&mass, &r, u, &p, f, t, &tie);
            let mix0 = ev(DecisionRule::mixture(zero()).unwrap());
            let pig = ev(DecisionRule::pignistic());
            prop_assert_eq!(&mix0.criterion_value, &pig.criterion_value);
            prop_assert_eq!(mix0.verdict, pig.verdict);
            let h1 = ev(DecisionRule::hurwicz(one()).unwrap());
            prop_assert_eq!(h1.criterion_value.signum(), h1.lower.signum());
            let h0 = ev(DecisionRule::hurwicz(zero()).unwrap());
            prop_assert_eq!(&h0.criterion_value, &h0.upper);
            prop_assert!(h1.lower <= h1.upper);
            prop_assert!(h1.lower <= pig.pignistic_value && pig.pignistic_value <= h1.upper);
        }

        #[test]
        fn hurwicz_non_increasing_in_alpha(
            points in proptest::collection::btree_set(proptest::collection::vec(0u32..4, 3), 1..6),
            (p, f, t, u) in arb_move(),
            a in arb_alpha(),
            b in arb_alpha(),
        ) {
            let tie = TieBreakOrder::identity(3);
            let mass = MassFunction::vacuous(FocalElement::explicit(points.into_iter().map(ScoreVector::new)).unwrap());
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let v = |x: Rational| evaluate_move(&mass, &DecisionRule::hurwicz(x).unwrap(), u, &p, f, t, &tie).criterion_value;
            prop_assert!(v(lo) >= v(hi));
        }

        #[test]
        fn single_focal_local_dominance(
            points in proptest::collection::btree_set(proptest::collection::vec(0u32..4, 3), 1..6),
            (p, f, t, _) in arb_move(),
        ) {
            let tie = TieBreakOrder::identity(3);
            let focal = FocalElement::explicit(points.into_iter().map(ScoreVector::new)).unwrap();
            let us: Vec<i64> = focal.points().iter().map(|s| utility_int(UtilityModel::MeirSign, &p, f, t, s, &tie)).collect();
            let mass = MassFunction::vacuous(focal);
            let strict = evaluate_move(&mass, &DecisionRule::pessimistic(), UtilityModel::MeirSign, &p, f, t, &tie).is_strict();
            prop_assert_eq!(strict, us.iter().all(|&u| u >= 0) && us.contains(&1));

            let card = pignistic_cardinal(&mass, &p, f, t, &tie).unwrap();
            let pig = evaluate_move(&mass, &DecisionRule::pignistic(), UtilityModel::MeirSign, &p, f, t, &tie);
            prop_assert_eq!(int(card.signum()), pig.criterion_value.signum());
        }
    }
}
