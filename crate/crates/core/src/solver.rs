//! Weak dominance, iterated admissibility, rationalizing beliefs and
//! synthesis of a complete model in which every surviving choice is optimal
//! for a type expressing common assumption of rationality.

use alloc::{
    collections::{BTreeMap, BTreeSet},
    format,
    string::String,
    vec,
    vec::Vec,
};

use crate::{
    belief::{BeliefLevel, LexBelief, Pair},
    complete::{CompleteModel, CompleteType},
    game::{Game, Player, UtilityFn},
    lp::{LpOutcome, LpProblem, Relation},
    Error, Rational, Result, TypeId,
};

/// Halvings of the positivity bound before giving up.
const MAX_HALVINGS: u32 = 256;

/// Returns a dominating mixture over own choices (indexed by choice, zero
/// outside `own`) when `c` is weakly dominated within `own` on `opp`.
pub fn weakly_dominated(
    v: &UtilityFn,
    own: &BTreeSet<usize>,
    opp: &BTreeSet<usize>,
    c: usize,
) -> Result<Option<Vec<Rational>>> {
    if own.is_empty() || opp.is_empty() {
        return Err(Error::EmptyChoiceSet);
    }
    if !own.contains(&c) {
        return Err(Error::ChoiceNotInSet { choice: c });
    }
    let own_list: Vec<usize> = own.iter().copied().collect();
    let opp_list: Vec<usize> = opp.iter().copied().collect();
    let (na, nb) = (own_list.len(), opp_list.len());

    // variables: mixture weights, then one slack per opponent choice
    let mut objective = vec![Rational::zero(); na];
    objective.extend(std::iter::repeat_n(Rational::one(), nb));
    let mut lp = LpProblem::maximize(objective);

    let mut simplex = vec![Rational::one(); na];
    simplex.extend(std::iter::repeat_n(Rational::zero(), nb));
    lp.add(simplex, Relation::Eq, Rational::one())?;
    for (k, &b) in opp_list.iter().enumerate() {
        let mut row: Vec<Rational> = own_list.iter().map(|&a| v.get(a, b).clone()).collect();
        row.extend((0..nb).map(|s| if s == k { -Rational::one() } else { Rational::zero() }));
        lp.add(row, Relation::Eq, v.get(c, b).clone())?;
    }

    match lp.solve() {
        LpOutcome::Optimal { value, x } if value.is_positive() => {
            let mut mixture = vec![Rational::zero(); v.own_choices()];
            for (k, &a) in own_list.iter().enumerate() {
                mixture[a] = x[k].clone();
            }
            Ok(Some(mixture))
        }
        LpOutcome::Optimal { .. } => Ok(None),
        other => Err(Error::Internal(format!("dominance program ended as {other:?}"))),
    }
}

/// Choices in `own` not weakly dominated within `own` on `opp`.
pub fn admissible_set(v: &UtilityFn, own: &BTreeSet<usize>, opp: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for &c in own {
        if weakly_dominated(v, own, opp, c)?.is_none() {
            out.insert(c);
        }
    }
    Ok(out)
}

/// The descending chain `D^0 ⊇ D^1 ⊇ ... ⊇ D^m` with `D^m` stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IARounds {
    rounds: Vec<[BTreeSet<usize>; 2]>,
}

impl IARounds {
    pub fn rounds(&self) -> &[[BTreeSet<usize>; 2]] {
        &self.rounds
    }

    /// `D^k`; rounds past stability repeat the last one.
    pub fn at(&self, k: usize) -> &[BTreeSet<usize>; 2] {
        &self.rounds[k.min(self.rounds.len() - 1)]
    }

    pub fn survivors(&self) -> &[BTreeSet<usize>; 2] {
        self.rounds.last().expect("at least the full round")
    }

    /// The `m` with `D^m = D^(m+1)`.
    pub fn stable_round(&self) -> usize {
        self.rounds.len() - 1
    }

    /// Largest `k <= m + 1` with `choice` in `D^k`.
    pub fn depth_of(&self, p: Player, choice: usize) -> usize {
        let last = self
            .rounds
            .iter()
            .rposition(|r| r[p.index()].contains(&choice))
            .unwrap_or(0);
        if last == self.stable_round() {
            last + 1
        } else {
            last
        }
    }
}

pub fn iterated_admissibility(game: &Game) -> Result<IARounds> {
    iterated_admissibility_for(game.utilities())
}

/// Simultaneous elimination for both players under the given utilities.
pub fn iterated_admissibility_for(utilities: &[UtilityFn; 2]) -> Result<IARounds> {
    let full = [
        (0..utilities[0].own_choices()).collect::<BTreeSet<_>>(),
        (0..utilities[1].own_choices()).collect::<BTreeSet<_>>(),
    ];
    let mut rounds = vec![full];
    loop {
        let cur = rounds.last().expect("nonempty");
        let next = [
            admissible_set(&utilities[0], &cur[0], &cur[1])?,
            admissible_set(&utilities[1], &cur[1], &cur[0])?,
        ];
        if &next == cur {
            return Ok(IARounds { rounds });
        }
        rounds.push(next);
    }
}

/// A distribution over opponent choices with full support on `support`
/// under which `c` is optimal among `candidates`, or `None` when `c` is
/// weakly dominated there.
pub fn full_support_optimum(
    v: &UtilityFn,
    c: usize,
    candidates: &BTreeSet<usize>,
    support: &BTreeSet<usize>,
) -> Result<Option<Vec<Rational>>> {
    let mut own = candidates.clone();
    own.insert(c);
    if weakly_dominated(v, &own, support, c)?.is_some() {
        return Ok(None);
    }
    let opp: Vec<usize> = support.iter().copied().collect();
    let mut eps = Rational::new(1, 2)?;
    let half = eps.clone();
    for _ in 0..MAX_HALVINGS {
        let mut lp = LpProblem::feasibility(opp.len());
        lp.add(vec![Rational::one(); opp.len()], Relation::Eq, Rational::one())?;
        for k in 0..opp.len() {
            let mut row = vec![Rational::zero(); opp.len()];
            row[k] = Rational::one();
            lp.add(row, Relation::Ge, eps.clone())?;
        }
        for &a in own.iter().filter(|&&a| a != c) {
            let row = opp.iter().map(|&b| v.get(c, b) - v.get(a, b)).collect();
            lp.add(row, Relation::Ge, Rational::zero())?;
        }
        if let LpOutcome::Optimal { x, .. } = lp.solve() {
            let mut dist = vec![Rational::zero(); v.opponent_choices()];
            for (k, &b) in opp.iter().enumerate() {
                dist[b] = x[k].clone();
            }
            return Ok(Some(dist));
        }
        eps = &eps * &half;
    }
    Err(Error::Internal(format!("no full-support belief found for choice #{c}")))
}

/// A single cautious level on `support` making `c` optimal among all own
/// choices; the pairs carry type index 0.
pub fn rationalizing_cautious_belief(v: &UtilityFn, c: usize, support: &BTreeSet<usize>) -> Result<Option<LexBelief>> {
    let Some(levels) = rationalizing_lex_belief(v, c, core::slice::from_ref(support))? else {
        return Ok(None);
    };
    Ok(Some(marginals_as_belief(&levels)?))
}

/// Per-level distributions, level `k` with full support on `chain[k]`, under
/// which `c` is lexicographically optimal among all own choices.
pub fn rationalizing_lex_belief(
    v: &UtilityFn,
    c: usize,
    chain: &[BTreeSet<usize>],
) -> Result<Option<Vec<Vec<Rational>>>> {
    if chain.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptyChoiceSet);
    }
    let mut ties: BTreeSet<usize> = (0..v.own_choices()).collect();
    let mut levels = Vec::with_capacity(chain.len());
    for support in chain {
        let Some(dist) = full_support_optimum(v, c, &ties, support)? else {
            return Ok(None);
        };
        let target = v.expected(c, &dist);
        ties.retain(|&a| v.expected(a, &dist) == target);
        levels.push(dist);
    }
    Ok(Some(levels))
}

fn marginals_as_belief(levels: &[Vec<Rational>]) -> Result<LexBelief> {
    let levels = levels
        .iter()
        .map(|d| {
            BeliefLevel::new(
                d.iter()
                    .enumerate()
                    .filter(|(_, w)| w.is_positive())
                    .map(|(b, w)| (Pair::new(b, 0), w.clone())),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    LexBelief::new(levels)
}

/// Builds a complete model with one type per admissible choice, whose types
/// for surviving choices express common assumption of rationality.
///
/// The type for a choice `x` reaching depth `r` has `r` levels (one more for
/// survivors), level `l` supported on `D^(r-l)` of the opponent. A pair `(z, t(y))` with `z`
/// optimal for `t(y)` enters at the first level where both `z` and `t(y)` are
/// in the support; all other pairs enter at the last level. The output is
/// checked before it is returned.
pub fn synthesize_car_model(game: &Game) -> Result<CompleteModel> {
    let ia = iterated_admissibility(game)?;
    let form = game.form();
    // survivors get one level more than their depth, so that pairs with
    // non-optimal choices always come strictly after the good ones
    let depth = |p: Player, x: usize| {
        let d = ia.depth_of(p, x);
        if d > ia.stable_round() {
            d + 1
        } else {
            d
        }
    };

    // choice marginals of each type, keyed by player then choice
    let mut marginals: [BTreeMap<usize, Vec<Vec<Rational>>>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for p in Player::BOTH {
        let (i, j) = (p.index(), p.opponent().index());
        for &x in &ia.at(1)[i] {
            let r = depth(p, x);
            let chain: Vec<BTreeSet<usize>> = (1..=r).map(|l| ia.at(r - l)[j].clone()).collect();
            let levels = rationalizing_lex_belief(game.utility_fn(p), x, &chain)?
                .ok_or_else(|| Error::Internal(format!("admissible choice #{x} of player {p} has no belief")))?;
            marginals[i].insert(x, levels);
        }
    }

    let index_of: [BTreeMap<usize, usize>; 2] =
        [0, 1].map(|i| marginals[i].keys().enumerate().map(|(k, &x)| (x, k)).collect());
    let optimal: [Vec<BTreeSet<usize>>; 2] = [Player::One, Player::Two].map(|p| {
        marginals[p.index()]
            .values()
            .map(|levels| crate::belief::optimal_choices(game.utility_fn(p), levels))
            .collect()
    });

    let mut types: [Vec<CompleteType>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        let (i, j) = (p.index(), p.opponent().index());
        let q = p.opponent();
        for (&x, levels) in &marginals[i] {
            let r = levels.len();
            let enters = |choice: usize| r.saturating_sub(depth(q, choice)).max(1);
            // introduction level (1-based) of each opponent pair
            let mut intro: BTreeMap<Pair, usize> = BTreeMap::new();
            for (&y, &ty) in &index_of[j] {
                for z in 0..form.num_choices(q) {
                    let level = if optimal[j][ty].contains(&z) {
                        enters(y).max(enters(z))
                    } else {
                        r
                    };
                    intro.insert(Pair::new(z, ty), level);
                }
            }
            let mut belief_levels = Vec::with_capacity(r);
            for (l, dist) in levels.iter().enumerate() {
                let mut weights = Vec::new();
                for (z, mass) in dist.iter().enumerate().filter(|(_, m)| m.is_positive()) {
                    let pairs: Vec<Pair> = intro
                        .iter()
                        .filter(|(pair, &lv)| pair.choice == z && lv <= l + 1)
                        .map(|(pair, _)| *pair)
                        .collect();
                    if pairs.is_empty() {
                        return Err(Error::Internal(format!(
                            "no opponent type available for choice #{z} at level {}",
                            l + 1
                        )));
                    }
                    let share = mass / &Rational::from(pairs.len() as i64);
                    weights.extend(pairs.into_iter().map(|pair| (pair, share.clone())));
                }
                belief_levels.push(BeliefLevel::new(weights)?);
            }
            types[i].push(CompleteType::new(
                synthesized_name(p, form.label(p, x)),
                LexBelief::new(belief_levels)?,
            ));
        }
    }

    let model = CompleteModel::new(game.clone(), types)?;
    validate_synthesis(&model, &ia, &index_of)?;
    Ok(model)
}

fn synthesized_name(p: Player, label: &str) -> String {
    format!("t{}.{}", p.number(), label)
}

fn validate_synthesis(model: &CompleteModel, ia: &IARounds, index_of: &[BTreeMap<usize, usize>; 2]) -> Result<()> {
    let report = model.common_assumption_with(ia)?;
    let caution = model.common_caution();
    for p in Player::BOTH {
        let i = p.index();
        for t in 0..model.num_types(p) {
            if !model.is_cautious(TypeId::new(p, t)) {
                return Err(Error::Internal(format!(
                    "synthesized type {} is not cautious",
                    model.type_name(TypeId::new(p, t))
                )));
            }
        }
        for &x in &ia.survivors()[i] {
            let t = TypeId::new(p, index_of[i][&x]);
            let ok = report.final_holds(t) && caution[i][t.index] && model.optimal_choices(t).contains(&x);
            if !ok {
                return Err(Error::Internal(format!(
                    "synthesized type {} does not rationalize its choice",
                    model.type_name(t)
                )));
            }
        }
    }
    Ok(())
}
