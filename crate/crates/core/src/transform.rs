//! Conversions between complete and incomplete models, plus structural
//! isomorphism of models.

use alloc::{collections::BTreeSet, format, string::String, vec, vec::Vec};

use crate::{
    belief::{LexBelief, Pair, TypeId},
    complete::{CompleteModel, CompleteType},
    game::{Game, Player, UtilityFn},
    incomplete::{construct_supporting_utility, IncompleteModel, IncompleteType},
    Error, Result,
};

/// Indifference classes of `t`'s own choices, most preferred first.
pub fn preference_partition(m: &CompleteModel, t: TypeId) -> Vec<BTreeSet<usize>> {
    m.preference_partition(t)
}

/// An incomplete model built from a complete one, remembering which new
/// types stem from which old type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteToIncomplete {
    pub model: IncompleteModel,
    /// `groups[i][t]` lists the new types of player `i` built from type `t`,
    /// in partition order.
    pub groups: [Vec<Vec<usize>>; 2],
}

/// Splits every type into one type per indifference class of its choices.
/// The first keeps the game's utility; class `l > 1` receives a supporting
/// utility making that class optimal. Each believed pair `(c, t)` is sent to
/// the split of `t` whose class contains `c`.
pub fn complete_to_incomplete(m: &CompleteModel) -> Result<CompleteToIncomplete> {
    let form = m.game().form();
    let partitions: [Vec<Vec<BTreeSet<usize>>>; 2] = Player::BOTH.map(|p| {
        (0..m.num_types(p))
            .map(|t| m.preference_partition(TypeId::new(p, t)))
            .collect()
    });

    let mut groups: [Vec<Vec<usize>>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        let mut next = 0;
        for classes in &partitions[p.index()] {
            groups[p.index()].push((next..next + classes.len()).collect());
            next += classes.len();
        }
    }

    let mut types: [Vec<IncompleteType>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        let (i, j) = (p.index(), p.opponent().index());
        for t in 0..m.num_types(p) {
            let id = TypeId::new(p, t);
            let belief = m.belief(id).map_pairs(|pair| {
                let class = partitions[j][pair.ty]
                    .iter()
                    .position(|c| c.contains(&pair.choice))
                    .expect("partition covers every choice");
                Pair::new(pair.choice, groups[j][pair.ty][class])
            });
            let marginals = m.belief(id).choice_marginals(form.num_choices(p.opponent()));
            for (l, class) in partitions[i][t].iter().enumerate() {
                let utility = if l == 0 {
                    m.game().utility_fn(p).clone()
                } else {
                    construct_supporting_utility(form, p, class, &marginals)?
                };
                types[i].push(IncompleteType::new(
                    format!("{}#{}", m.type_name(id), l + 1),
                    utility,
                    belief.clone(),
                ));
            }
        }
    }

    let model = IncompleteModel::new(form.clone(), m.game().utilities().clone(), types)?;
    if !check_observation_redundancy(&model, &groups) {
        return Err(Error::Internal("split types disagree on their belief".into()));
    }
    if !model.type_ids().all(|t| model.believes_rationality(t)) {
        return Err(Error::Internal("split model does not believe in rationality".into()));
    }
    Ok(CompleteToIncomplete { model, groups })
}

/// A complete model built from an incomplete one by merging types with equal
/// beliefs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncompleteToComplete {
    pub model: CompleteModel,
    /// `class_of[i][theta]` is the new type index of old type `theta`.
    pub class_of: [Vec<usize>; 2],
}

/// One type per class of equal beliefs, named after the class's
/// lexicographically least member and ordered by least member index; the
/// game is the form together with the reference utilities.
pub fn incomplete_to_complete(m: &IncompleteModel) -> Result<IncompleteToComplete> {
    let mut class_of: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    let mut members: [Vec<Vec<usize>>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        let i = p.index();
        let types = m.types(p);
        for (t, ty) in types.iter().enumerate() {
            match members[i].iter().position(|ms| types[ms[0]].belief == ty.belief) {
                Some(k) => {
                    members[i][k].push(t);
                    class_of[i].push(k);
                }
                None => {
                    class_of[i].push(members[i].len());
                    members[i].push(vec![t]);
                }
            }
        }
    }

    let mut types: [Vec<CompleteType>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        let (i, j) = (p.index(), p.opponent().index());
        for ms in &members[i] {
            let name: String = ms
                .iter()
                .map(|&t| m.types(p)[t].name.as_str())
                .min()
                .expect("classes are nonempty")
                .into();
            let belief = m.types(p)[ms[0]]
                .belief
                .map_pairs(|pair| Pair::new(pair.choice, class_of[j][pair.ty]));
            types[i].push(CompleteType::new(name, belief));
        }
    }
    let game = Game::new(m.form().clone(), m.reference_u().clone())?;
    Ok(IncompleteToComplete {
        model: CompleteModel::new(game, types)?,
        class_of,
    })
}

/// Within every group all beliefs coincide.
pub fn check_observation_redundancy(m: &IncompleteModel, groups: &[Vec<Vec<usize>>; 2]) -> bool {
    Player::BOTH.into_iter().all(|p| {
        groups[p.index()]
            .iter()
            .all(|g| g.windows(2).all(|w| m.types(p)[w[0]].belief == m.types(p)[w[1]].belief))
    })
}

/// Every type believes in the opponent's rationality.
pub fn check_observation_rationality(m: &IncompleteModel) -> bool {
    m.type_ids().all(|t| m.believes_rationality(t))
}

/// Some player-preserving bijection of types carries one model's beliefs
/// onto the other's.
pub fn isomorphic_complete(a: &CompleteModel, b: &CompleteModel) -> bool {
    if a.game() != b.game() {
        return false;
    }
    let no_utility: [Vec<()>; 2] = [Vec::new(), Vec::new()];
    find_isomorphism(&complete_beliefs(a), &complete_beliefs(b), &no_utility, &no_utility)
}

/// As `isomorphic_complete`, additionally matching assigned utilities.
pub fn isomorphic_incomplete(a: &IncompleteModel, b: &IncompleteModel) -> bool {
    if a.form() != b.form() || a.reference_u() != b.reference_u() {
        return false;
    }
    find_isomorphism(
        &incomplete_beliefs(a),
        &incomplete_beliefs(b),
        &incomplete_utilities(a),
        &incomplete_utilities(b),
    )
}

fn complete_beliefs(m: &CompleteModel) -> [Vec<&LexBelief>; 2] {
    Player::BOTH.map(|p| m.types(p).iter().map(|t| &t.belief).collect())
}

fn incomplete_beliefs(m: &IncompleteModel) -> [Vec<&LexBelief>; 2] {
    Player::BOTH.map(|p| m.types(p).iter().map(|t| &t.belief).collect())
}

fn incomplete_utilities(m: &IncompleteModel) -> [Vec<&UtilityFn>; 2] {
    Player::BOTH.map(|p| m.types(p).iter().map(|t| &t.utility).collect())
}

fn find_isomorphism<U: PartialEq>(
    ba: &[Vec<&LexBelief>; 2],
    bb: &[Vec<&LexBelief>; 2],
    ua: &[Vec<U>; 2],
    ub: &[Vec<U>; 2],
) -> bool {
    if ba[0].len() != bb[0].len() || ba[1].len() != bb[1].len() {
        return false;
    }
    let slots: Vec<(usize, usize)> = (0..2).flat_map(|i| (0..ba[i].len()).map(move |t| (i, t))).collect();
    let mut map: [Vec<Option<usize>>; 2] = [vec![None; ba[0].len()], vec![None; ba[1].len()]];
    let mut used: [Vec<bool>; 2] = [vec![false; bb[0].len()], vec![false; bb[1].len()]];
    let ctx = IsoCtx { ba, bb, ua, ub };
    ctx.assign(&slots, 0, &mut map, &mut used)
}

struct IsoCtx<'a, 'b, U> {
    ba: &'a [Vec<&'b LexBelief>; 2],
    bb: &'a [Vec<&'b LexBelief>; 2],
    ua: &'a [Vec<U>; 2],
    ub: &'a [Vec<U>; 2],
}

impl<U: PartialEq> IsoCtx<'_, '_, U> {
    fn compatible(&self, i: usize, s: usize, t: usize) -> bool {
        let (x, y) = (self.ba[i][s], self.bb[i][t]);
        if x.depth() != y.depth() || x.levels().iter().zip(y.levels()).any(|(l, r)| l.len() != r.len()) {
            return false;
        }
        if !self.ua[i].is_empty() && self.ua[i][s] != self.ub[i][t] {
            return false;
        }
        true
    }

    /// Checks every assigned type whose belief only mentions assigned types.
    fn consistent(&self, map: &[Vec<Option<usize>>; 2]) -> bool {
        for i in 0..2 {
            let j = 1 - i;
            for (s, image) in map[i].iter().enumerate() {
                let Some(t) = image else { continue };
                let b = self.ba[i][s];
                if b.possible_types().iter().any(|&u| map[j][u].is_none()) {
                    continue;
                }
                let mapped = b.map_pairs(|p| Pair::new(p.choice, map[j][p.ty].expect("assigned")));
                if &mapped != self.bb[i][*t] {
                    return false;
                }
            }
        }
        true
    }

    fn assign(
        &self,
        slots: &[(usize, usize)],
        k: usize,
        map: &mut [Vec<Option<usize>>; 2],
        used: &mut [Vec<bool>; 2],
    ) -> bool {
        let Some(&(i, s)) = slots.get(k) else {
            return self.consistent(map);
        };
        for t in 0..self.bb[i].len() {
            if used[i][t] || !self.compatible(i, s, t) {
                continue;
            }
            map[i][s] = Some(t);
            used[i][t] = true;
            if self.consistent(map) && self.assign(slots, k + 1, map, used) {
                return true;
            }
            map[i][s] = None;
            used[i][t] = false;
        }
        false
    }
}
