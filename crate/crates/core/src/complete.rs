//! Complete-information models: types holding lexicographic beliefs over the
//! opponent's choice-type pairs, judged with the game's own utilities.

use alloc::{collections::BTreeSet, format, string::String, vec::Vec};

use crate::{
    belief::{common_closure, optimal_choices, preference_classes, LexBelief, Pair, TypeId},
    fold::{Flavor, FoldReport, FoldSpace, Verdict, Violation, Witness},
    game::{Game, Player},
    solver::{iterated_admissibility, IARounds},
    Error, Result,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteType {
    pub name: String,
    pub belief: LexBelief,
}

impl CompleteType {
    pub fn new(name: impl Into<String>, belief: LexBelief) -> Self {
        Self {
            name: name.into(),
            belief,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteModel {
    game: Game,
    types: [Vec<CompleteType>; 2],
}

impl CompleteModel {
    pub fn new(game: Game, types: [Vec<CompleteType>; 2]) -> Result<Self> {
        for p in Player::BOTH {
            let mut names = BTreeSet::new();
            for t in &types[p.index()] {
                if !names.insert(t.name.as_str()) {
                    return Err(Error::InvalidModel(format!(
                        "duplicate type name `{}` for player {p}",
                        t.name
                    )));
                }
                let q = p.opponent();
                t.belief
                    .validate(game.form().num_choices(q), types[q.index()].len())
                    .map_err(|e| Error::InvalidModel(format!("type `{}`: {e}", t.name)))?;
            }
        }
        Ok(Self { game, types })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn types(&self, p: Player) -> &[CompleteType] {
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
        &self.types[t.player.index()][t.index].name
    }

    pub fn belief(&self, t: TypeId) -> &LexBelief {
        &self.types[t.player.index()][t.index].belief
    }

    fn marginals(&self, t: TypeId) -> Vec<Vec<crate::Rational>> {
        self.belief(t)
            .choice_marginals(self.game.form().num_choices(t.player.opponent()))
    }

    /// Choices lexicographically maximal under the game's own utility.
    pub fn optimal_choices(&self, t: TypeId) -> BTreeSet<usize> {
        optimal_choices(self.game.utility_fn(t.player), &self.marginals(t))
    }

    /// Indifference classes of own choices, most preferred first.
    pub fn preference_partition(&self, t: TypeId) -> Vec<BTreeSet<usize>> {
        preference_classes(self.game.utility_fn(t.player), &self.marginals(t))
    }

    /// Every opponent choice is deemed possible with every possible type.
    pub fn is_cautious(&self, t: TypeId) -> bool {
        let b = self.belief(t);
        let n = self.game.form().num_choices(t.player.opponent());
        b.possible_types()
            .into_iter()
            .all(|ty| (0..n).all(|c| b.deems_possible(Pair::new(c, ty))))
    }

    /// Assumption of rationality against the supplied good opponent choices
    /// and good opponent types.
    pub fn assumes_rationality(
        &self,
        t: TypeId,
        good: &BTreeSet<usize>,
        good_types: &BTreeSet<usize>,
    ) -> Result<(Verdict, Vec<Witness>)> {
        if !self.is_cautious(t) {
            return Err(Error::NotCautious(t));
        }
        let q = t.player.opponent();
        let b = self.belief(t);
        let optimal: Vec<BTreeSet<usize>> = (0..self.num_types(q))
            .map(|u| self.optimal_choices(TypeId::new(q, u)))
            .collect();

        let mut types: Vec<(usize, usize)> = b
            .possible_types()
            .into_iter()
            .filter_map(|ty| b.first_level_of_type(ty).map(|l| (l, ty)))
            .collect();
        types.sort();
        let mut violations = Vec::new();
        let mut witnesses = Vec::new();
        for &c in good {
            match types.iter().find(|&&(_, ty)| optimal[ty].contains(&c)) {
                Some(&(level, ty)) => witnesses.push(Witness { choice: c, ty, level }),
                None => violations.push(Violation::MissingSupport { choice: c }),
            }
        }

        let mut pairs: Vec<(usize, Pair)> = b
            .possible_pairs()
            .into_iter()
            .filter_map(|p| b.first_level(p).map(|l| (l, p)))
            .collect();
        pairs.sort();
        let is_good = |p: &Pair| good_types.contains(&p.ty) && optimal[p.ty].contains(&p.choice);
        for (gl, g) in pairs.iter().filter(|(_, p)| is_good(p)) {
            if let Some((_, bad)) = pairs.iter().find(|(bl, p)| bl <= gl && !is_good(p)) {
                violations.push(Violation::OrderViolation { good: *g, bad: *bad });
            }
        }
        let verdict = if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Violated(violations)
        };
        Ok((verdict, witnesses))
    }

    pub(crate) fn fold_space(&self) -> FoldSpace<'_> {
        FoldSpace {
            flavor: Flavor::Complete,
            beliefs: [0, 1].map(|i| self.types[i].iter().map(|t| &t.belief).collect()),
            cautious: Player::BOTH.map(|p| {
                (0..self.num_types(p))
                    .map(|i| self.is_cautious(TypeId::new(p, i)))
                    .collect()
            }),
            optimal: Player::BOTH.map(|p| {
                (0..self.num_types(p))
                    .map(|i| self.optimal_choices(TypeId::new(p, i)))
                    .collect()
            }),
            carries_u: [0, 1].map(|i| alloc::vec![true; self.types[i].len()]),
        }
    }

    /// Folds `0..=n`, row 0 being caution.
    pub fn n_fold_assumption(&self, n: usize) -> Result<FoldReport> {
        self.n_fold_assumption_with(n, &iterated_admissibility(&self.game)?)
    }

    pub fn n_fold_assumption_with(&self, n: usize, ia: &IARounds) -> Result<FoldReport> {
        if n == 0 {
            return Err(Error::ZeroFoldDepth);
        }
        Ok(self.fold_space().run(ia, Some(n)))
    }

    /// Folds until the table stabilizes; `final_holds` is then the verdict
    /// for common assumption of rationality.
    pub fn common_assumption(&self) -> Result<FoldReport> {
        self.common_assumption_with(&iterated_admissibility(&self.game)?)
    }

    pub fn common_assumption_with(&self, ia: &IARounds) -> Result<FoldReport> {
        Ok(self.fold_space().run(ia, None))
    }

    /// Common full belief in caution.
    pub fn common_caution(&self) -> [Vec<bool>; 2] {
        let base = Player::BOTH.map(|p| {
            (0..self.num_types(p))
                .map(|i| self.is_cautious(TypeId::new(p, i)))
                .collect()
        });
        common_closure(base, &self.possible_types())
    }

    pub fn possible_types(&self) -> [Vec<BTreeSet<usize>>; 2] {
        [0, 1].map(|i| self.types[i].iter().map(|t| t.belief.possible_types()).collect())
    }
}
