//! Lexicographic beliefs over opponent (choice, type) pairs.
//!
//! A belief does not know which player holds it: its pairs index the
//! opponent's choices and types. Levels are stored sparsely, so a pair is
//! deemed possible exactly when it is a key of some level.

use alloc::{collections::BTreeMap, collections::BTreeSet, format, string::ToString, vec, vec::Vec};
use core::{cmp::Ordering, fmt};

use crate::{game::Player, Error, LexVector, Rational, Result, UtilityFn};

/// A type of one player inside some model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId {
    pub player: Player,
    pub index: usize,
}

impl TypeId {
    pub fn new(player: Player, index: usize) -> Self {
        Self { player, index }
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {} type #{}", self.player, self.index)
    }
}

/// An opponent (choice, type) pair, both as indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub choice: usize,
    pub ty: usize,
}

impl Pair {
    pub fn new(choice: usize, ty: usize) -> Self {
        Self { choice, ty }
    }
}

/// One probability distribution over opponent pairs. Only positive weights
/// are stored and they sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BeliefLevel {
    weights: BTreeMap<Pair, Rational>,
}

impl BeliefLevel {
    pub fn new(entries: impl IntoIterator<Item = (Pair, Rational)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (pair, w) in entries {
            if !w.is_positive() {
                return Err(Error::InvalidBelief(format!(
                    "weight {w} on ({}, {}) is not positive",
                    pair.choice, pair.ty
                )));
            }
            if weights.insert(pair, w).is_some() {
                return Err(Error::InvalidBelief(format!(
                    "pair ({}, {}) listed twice in one level",
                    pair.choice, pair.ty
                )));
            }
        }
        let total: Rational = weights.values().sum();
        if total != Rational::one() {
            return Err(Error::InvalidBelief(format!("level weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn point(pair: Pair) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(pair, Rational::one());
        Self { weights }
    }

    pub fn weight(&self, pair: Pair) -> Rational {
        self.weights.get(&pair).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.weights.contains_key(&pair)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Pair, &Rational)> {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Pair> + '_ {
        self.weights.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexBelief {
    levels: Vec<BeliefLevel>,
}

impl LexBelief {
    pub fn new(levels: Vec<BeliefLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidBelief("a belief needs at least one level".to_string()));
        }
        Ok(Self { levels })
    }

    /// Point beliefs, one level per pair, in order.
    pub fn sequence(pairs: &[Pair]) -> Result<Self> {
        Self::new(pairs.iter().map(|&p| BeliefLevel::point(p)).collect())
    }

    pub fn levels(&self) -> &[BeliefLevel] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn deems_possible(&self, pair: Pair) -> bool {
        self.levels.iter().any(|l| l.contains(pair))
    }

    /// Index of the first level giving `pair` positive weight.
    pub fn first_level(&self, pair: Pair) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(pair))
    }

    pub fn possible_pairs(&self) -> BTreeSet<Pair> {
        self.levels.iter().flat_map(|l| l.support()).collect()
    }

    pub fn possible_types(&self) -> BTreeSet<usize> {
        self.levels.iter().flat_map(|l| l.support().map(|p| p.ty)).collect()
    }

    /// First level at which some pair with type `ty` appears.
    pub fn first_level_of_type(&self, ty: usize) -> Option<usize> {
        self.levels.iter().position(|l| l.support().any(|p| p.ty == ty))
    }

    /// True iff `a` first appears strictly before `b` does (or `b` never
    /// appears while `a` does).
    pub fn infinitely_more_likely(&self, a: Pair, b: Pair) -> bool {
        match (self.first_level(a), self.first_level(b)) {
            (Some(fa), Some(fb)) => fa < fb,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }

    /// Per level, the distribution over opponent choices with types summed out.
    pub fn choice_marginals(&self, opponent_choices: usize) -> Vec<Vec<Rational>> {
        self.levels
            .iter()
            .map(|l| {
                let mut dist = vec![Rational::zero(); opponent_choices];
                for (p, w) in l.iter() {
                    dist[p.choice] += w;
                }
                dist
            })
            .collect()
    }

    pub fn expected_utility_vector(&self, choice: usize, v: &UtilityFn) -> LexVector {
        lex_vector(v, choice, &self.choice_marginals(v.opponent_choices()))
    }

    /// Rewrites every pair through `f`, adding weights of pairs that collide.
    pub fn map_pairs(&self, mut f: impl FnMut(Pair) -> Pair) -> LexBelief {
        let levels = self
            .levels
            .iter()
            .map(|l| {
                let mut weights: BTreeMap<Pair, Rational> = BTreeMap::new();
                for (p, w) in l.iter() {
                    *weights.entry(f(*p)).or_insert_with(Rational::zero) += w;
                }
                BeliefLevel { weights }
            })
            .collect();
        LexBelief { levels }
    }

    /// Checks that every pair references an existing opponent choice and type.
    pub fn validate(&self, opponent_choices: usize, opponent_types: usize) -> Result<()> {
        for (k, level) in self.levels.iter().enumerate() {
            for p in level.support() {
                if p.choice >= opponent_choices {
                    return Err(Error::InvalidBelief(format!(
                        "level {} references unknown choice #{}",
                        k + 1,
                        p.choice
                    )));
                }
                if p.ty >= opponent_types {
                    return Err(Error::InvalidBelief(format!(
                        "level {} references unknown type #{}",
                        k + 1,
                        p.ty
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Expected-utility vector of `own` against per-level choice distributions.
pub fn lex_vector(v: &UtilityFn, own: usize, marginals: &[Vec<Rational>]) -> LexVector {
    LexVector(marginals.iter().map(|d| v.expected(own, d)).collect())
}

/// Indifference classes of own choices, most preferred first. Within a class
/// the order is by choice index.
pub fn preference_classes(v: &UtilityFn, marginals: &[Vec<Rational>]) -> Vec<BTreeSet<usize>> {
    let mut scored: Vec<(usize, LexVector)> = (0..v.own_choices()).map(|c| (c, lex_vector(v, c, marginals))).collect();
    // equal-length vectors, so the comparison cannot fail
    let cmp = |a: &LexVector, b: &LexVector| a.lex_compare(b).unwrap_or(Ordering::Equal);
    scored.sort_by(|(ca, a), (cb, b)| cmp(b, a).then(ca.cmp(cb)));
    let mut classes: Vec<BTreeSet<usize>> = Vec::new();
    let mut last: Option<&LexVector> = None;
    for (c, vec) in &scored {
        match last {
            Some(prev) if cmp(prev, vec) == Ordering::Equal => {
                classes.last_mut().expect("class exists").insert(*c);
            }
            _ => classes.push(BTreeSet::from([*c])),
        }
        last = Some(vec);
    }
    classes
}

/// Choices that no other choice is lexicographically preferred to.
pub fn optimal_choices(v: &UtilityFn, marginals: &[Vec<Rational>]) -> BTreeSet<usize> {
    preference_classes(v, marginals).into_iter().next().unwrap_or_default()
}

/// Greatest set of types that satisfy `base` and only deem possible types in
/// the set: the common-full-belief closure of a property.
pub fn common_closure(base: [Vec<bool>; 2], possible: &[Vec<BTreeSet<usize>>; 2]) -> [Vec<bool>; 2] {
    let mut holds = base;
    loop {
        let mut changed = false;
        for p in Player::BOTH {
            let (i, j) = (p.index(), p.opponent().index());
            for t in 0..holds[i].len() {
                if holds[i][t] && possible[i][t].iter().any(|&u| !holds[j][u]) {
                    holds[i][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return holds;
        }
    }
}
