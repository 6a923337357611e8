//! Incomplete-information models: every type carries its own utility
//! function next to its belief, and the model fixes a reference utility pair
//! `u` that the support and prior conditions are measured against.

use alloc::{collections::BTreeSet, format, string::String, vec::Vec};

use crate::{
    belief::{common_closure, optimal_choices, LexBelief, Pair, TypeId},
    fold::{Flavor, FoldReport, FoldSpace, Verdict, Violation, Witness},
    game::{GameForm, Player, UtilityFn},
    solver::{iterated_admissibility_for, IARounds},
    Error, Rational, Result,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncompleteType {
    pub name: String,
    pub utility: UtilityFn,
    pub belief: LexBelief,
}

impl IncompleteType {
    pub fn new(name: impl Into<String>, utility: UtilityFn, belief: LexBelief) -> Self {
        Self {
            name: name.into(),
            utility,
            belief,
        }
    }
}

/// Properties whose common full belief can be checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Caution,
    Rationality,
    SupportedAndPrior,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncompleteModel {
    form: GameForm,
    reference_u: [UtilityFn; 2],
    types: [Vec<IncompleteType>; 2],
}

impl IncompleteModel {
    pub fn new(form: GameForm, reference_u: [UtilityFn; 2], types: [Vec<IncompleteType>; 2]) -> Result<Self> {
        for p in Player::BOTH {
            if !form.fits(p, &reference_u[p.index()]) {
                return Err(Error::InvalidModel(format!(
                    "reference utility of player {p} has the wrong shape"
                )));
            }
            let q = p.opponent();
            let mut names = BTreeSet::new();
            for t in &types[p.index()] {
                if !names.insert(t.name.as_str()) {
                    return Err(Error::InvalidModel(format!(
                        "duplicate type name `{}` for player {p}",
                        t.name
                    )));
                }
                if !form.fits(p, &t.utility) {
                    return Err(Error::InvalidModel(format!(
                        "utility of type `{}` has the wrong shape",
                        t.name
                    )));
                }
                t.belief
                    .validate(form.num_choices(q), types[q.index()].len())
                    .map_err(|e| Error::InvalidModel(format!("type `{}`: {e}", t.name)))?;
            }
        }
        Ok(Self {
            form,
            reference_u,
            types,
        })
    }

    pub fn form(&self) -> &GameForm {
        &self.form
    }

    pub fn reference_u(&self) -> &[UtilityFn; 2] {
        &self.reference_u
    }

    pub fn types(&self, p: Player) -> &[IncompleteType] {
        &self.types[p.index()]
    }

    pub fn num_types(&self, p: Player) -> usize {
        self.types[p.index()].len()
    }

    pub fn type_ids(&self) -> impl Iterator<Item = TypeId> + '_ {
        Player::BOTH
            .into_iter()
            .flat_map(move |p| (0..self.num_types(p)).map(move |i| TypeId::new(p, i)))
    }

    pub fn type_id(&self, p: Player, name: &str) -> Option<TypeId> {
        self.types[p.index()]
            .iter()
            .position(|t| t.name == name)
            .map(|i| TypeId::new(p, i))
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.ty(t).name
    }

    pub fn ty(&self, t: TypeId) -> &IncompleteType {
        &self.types[t.player.index()][t.index]
    }

    pub fn belief(&self, t: TypeId) -> &LexBelief {
        &self.ty(t).belief
    }

    pub fn utility(&self, t: TypeId) -> &UtilityFn {
        &self.ty(t).utility
    }

    /// The assigned utility equals the reference utility cell for cell.
    pub fn carries_reference(&self, t: TypeId) -> bool {
        self.ty(t).utility == self.reference_u[t.player.index()]
    }

    pub fn choice_marginals(&self, t: TypeId) -> Vec<Vec<Rational>> {
        self.belief(t)
            .choice_marginals(self.form.num_choices(t.player.opponent()))
    }

    /// Lexicographic optima under the type's assigned utility.
    pub fn optimal_choices(&self, t: TypeId) -> BTreeSet<usize> {
        optimal_choices(self.utility(t), &self.choice_marginals(t))
    }

    /// Every opponent choice is deemed possible with some type sharing the
    /// belief of each possible type.
    pub fn is_cautious(&self, t: TypeId) -> bool {
        let b = self.belief(t);
        let q = t.player.opponent();
        let theirs = &self.types[q.index()];
        b.possible_types().into_iter().all(|ty| {
            let twins: Vec<usize> = (0..theirs.len())
                .filter(|&u| theirs[u].belief == theirs[ty].belief)
                .collect();
            (0..self.form.num_choices(q)).all(|c| twins.iter().any(|&u| b.deems_possible(Pair::new(c, u))))
        })
    }

    /// Each deemed-possible pair has a choice optimal for its type.
    pub fn believes_rationality(&self, t: TypeId) -> bool {
        let q = t.player.opponent();
        self.belief(t)
            .possible_pairs()
            .into_iter()
            .all(|p| self.optimal_choices(TypeId::new(q, p.ty)).contains(&p.choice))
    }

    fn per_type<T>(&self, f: impl Fn(TypeId) -> T) -> [Vec<T>; 2] {
        Player::BOTH.map(|p| (0..self.num_types(p)).map(|i| f(TypeId::new(p, i))).collect())
    }

    /// Good opponent choices, decided by admissibility under the reference
    /// utilities.
    pub fn reference_rounds(&self) -> Result<IARounds> {
        iterated_admissibility_for(&self.reference_u)
    }

    /// For every good choice a cautious witness type with the reference
    /// utility is deemed possible.
    pub fn supports_every_good_choice(&self, t: TypeId, good: &BTreeSet<usize>) -> Result<(Verdict, Vec<Witness>)> {
        if !self.is_cautious(t) {
            return Err(Error::NotCautious(t));
        }
        let q = t.player.opponent();
        let b = self.belief(t);
        let mut types: Vec<(usize, usize)> = b
            .possible_types()
            .into_iter()
            .filter_map(|ty| b.first_level_of_type(ty).map(|l| (l, ty)))
            .collect();
        types.sort();
        let mut violations = Vec::new();
        let mut witnesses = Vec::new();
        for &c in good {
            let found = types.iter().find(|&&(_, ty)| {
                let u = TypeId::new(q, ty);
                self.is_cautious(u) && self.carries_reference(u) && self.optimal_choices(u).contains(&c)
            });
            match found {
                Some(&(level, ty)) => witnesses.push(Witness { choice: c, ty, level }),
                None => violations.push(Violation::MissingSupport { choice: c }),
            }
        }
        let verdict = if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Violated(violations)
        };
        Ok((verdict, witnesses))
    }

    /// Pairs whose type is cautious and carries the reference utility come
    /// strictly before all other deemed-possible pairs.
    pub fn prior_belief_in_u(&self, t: TypeId) -> Verdict {
        let q = t.player.opponent();
        let b = self.belief(t);
        let is_good = |p: &Pair| {
            let u = TypeId::new(q, p.ty);
            self.is_cautious(u) && self.carries_reference(u)
        };
        let mut pairs: Vec<(usize, Pair)> = b
            .possible_pairs()
            .into_iter()
            .filter_map(|p| b.first_level(p).map(|l| (l, p)))
            .collect();
        pairs.sort();
        let violations: Vec<Violation> = pairs
            .iter()
            .filter(|(_, p)| is_good(p))
            .filter_map(|(gl, g)| {
                pairs
                    .iter()
                    .find(|(bl, p)| bl <= gl && !is_good(p))
                    .map(|(_, bad)| Violation::OrderViolation { good: *g, bad: *bad })
            })
            .collect();
        if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Violated(violations)
        }
    }

    pub(crate) fn fold_space(&self) -> FoldSpace<'_> {
        FoldSpace {
            flavor: Flavor::Incomplete,
            beliefs: [0, 1].map(|i| self.types[i].iter().map(|t| &t.belief).collect()),
            cautious: self.per_type(|t| self.is_cautious(t)),
            optimal: self.per_type(|t| self.optimal_choices(t)),
            carries_u: self.per_type(|t| self.carries_reference(t)),
        }
    }

    /// Folds `0..=n` of the support-and-prior chain, row 0 being caution.
    pub fn n_fold_supported_and_prior(&self, n: usize) -> Result<FoldReport> {
        if n == 0 {
            return Err(Error::ZeroFoldDepth);
        }
        Ok(self.fold_space().run(&self.reference_rounds()?, Some(n)))
    }

    /// The support-and-prior chain run until it stabilizes.
    pub fn common_supported_and_prior(&self) -> Result<FoldReport> {
        Ok(self.fold_space().run(&self.reference_rounds()?, None))
    }

    pub fn possible_types(&self) -> [Vec<BTreeSet<usize>>; 2] {
        [0, 1].map(|i| self.types[i].iter().map(|t| t.belief.possible_types()).collect())
    }

    /// Per-type verdict for common full belief in `property`.
    pub fn common_full_belief(&self, property: Property) -> Result<[Vec<bool>; 2]> {
        Ok(match property {
            Property::Caution => common_closure(self.per_type(|t| self.is_cautious(t)), &self.possible_types()),
            Property::Rationality => {
                common_closure(self.per_type(|t| self.believes_rationality(t)), &self.possible_types())
            }
            Property::SupportedAndPrior => {
                let report = self.common_supported_and_prior()?;
                self.per_type(|t| report.final_holds(t))
            }
        })
    }

    /// Common full belief in caution, rationality, support of good choices
    /// and prior belief in `u`, all at once.
    pub fn condition_b(&self) -> Result<[Vec<bool>; 2]> {
        let caution = self.common_full_belief(Property::Caution)?;
        let rational = self.common_full_belief(Property::Rationality)?;
        let supported = self.common_full_belief(Property::SupportedAndPrior)?;
        Ok([0, 1].map(|i| {
            (0..self.types[i].len())
                .map(|t| caution[i][t] && rational[i][t] && supported[i][t])
                .collect()
        }))
    }
}

/// A utility under which every choice in `good` is optimal for the given
/// per-level choice distributions: one on `good` times the first-level
/// support, zero elsewhere.
pub fn construct_supporting_utility(
    form: &GameForm,
    player: Player,
    good: &BTreeSet<usize>,
    marginals: &[Vec<Rational>],
) -> Result<UtilityFn> {
    if good.is_empty() {
        return Err(Error::EmptyChoiceSet);
    }
    let own = form.num_choices(player);
    let opp = form.num_choices(player.opponent());
    if let Some(&c) = good.iter().find(|&&c| c >= own) {
        return Err(Error::ChoiceNotInSet { choice: c });
    }
    let first = marginals
        .first()
        .ok_or_else(|| Error::InvalidBelief("a belief needs at least one level".into()))?;
    if first.len() != opp || marginals.iter().any(|d| d.len() != opp) {
        return Err(Error::InvalidBelief(format!(
            "distributions must cover {opp} opponent choices"
        )));
    }
    let v = UtilityFn::from_fn(own, opp, |a, b| {
        if good.contains(&a) && first[b].is_positive() {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let optimal = optimal_choices(&v, marginals);
    if !good.is_subset(&optimal) {
        return Err(Error::Internal("supporting utility misses a requested choice".into()));
    }
    Ok(v)
}
