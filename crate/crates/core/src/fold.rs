//! Fold-indexed verdict tables shared by the complete and incomplete checkers.
//!
//! Row 0 records caution. Row `n >= 1` checks the `n`-fold condition against
//! the opponent's good choices `D^n` and against the opponent types that hold
//! up to fold `n - 1`. A type holds at row `n` only if it also held at every
//! earlier row, so each column of the table is decreasing in `n`.

use alloc::{collections::BTreeSet, vec, vec::Vec};

use crate::{
    belief::{LexBelief, Pair, TypeId},
    game::Player,
    solver::IARounds,
};

/// Why a cautious type fails one fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A good opponent choice has no admissible witness type deemed possible.
    MissingSupport { choice: usize },
    /// `bad` first appears no later than `good`.
    OrderViolation { good: Pair, bad: Pair },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The checks are only defined for cautious types.
    NotCautious,
    Violated(Vec<Violation>),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// An opponent type supporting a good choice, with the level at which the
/// type is first deemed possible (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub choice: usize,
    pub ty: usize,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldEntry {
    pub verdict: Verdict,
    /// Cumulative: this row and every earlier row pass.
    pub holds: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldRow {
    pub fold: usize,
    /// Per player, that player's good choices at this fold.
    pub good_choices: [BTreeSet<usize>; 2],
    pub entries: [Vec<FoldEntry>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldReport {
    rows: Vec<FoldRow>,
    stable_from: Option<usize>,
}

impl FoldReport {
    pub fn rows(&self) -> &[FoldRow] {
        &self.rows
    }

    pub fn row(&self, fold: usize) -> Option<&FoldRow> {
        self.rows.get(fold)
    }

    /// Largest fold in the table.
    pub fn depth(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn entry(&self, t: TypeId, fold: usize) -> &FoldEntry {
        &self.rows[fold].entries[t.player.index()][t.index]
    }

    /// Whether `t` holds up to `fold`. Folds past the table repeat the last row
    /// once the table has stabilized.
    pub fn holds(&self, t: TypeId, fold: usize) -> bool {
        let row = match self.stable_from {
            Some(_) => fold.min(self.depth()),
            None => fold,
        };
        self.rows[row].entries[t.player.index()][t.index].holds
    }

    /// Verdict at the last computed fold.
    pub fn final_holds(&self, t: TypeId) -> bool {
        self.holds(t, self.depth())
    }

    pub fn first_failure(&self, t: TypeId) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| !r.entries[t.player.index()][t.index].holds)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[0].entries
                .iter()
                .zip(&w[1].entries)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.holds || !y.holds))
        })
    }

    /// First fold from which every later fold repeats it, if reached.
    pub fn stable_from(&self) -> Option<usize> {
        self.stable_from
    }

    pub fn num_types(&self, p: Player) -> usize {
        self.rows[0].entries[p.index()].len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flavor {
    /// Good pairs need an optimal choice; fold-1 witnesses may be any type.
    Complete,
    /// Good pairs need the reference utility; witnesses always do.
    Incomplete,
}

/// The data a fold table is computed from.
#[derive(Debug)]
pub(crate) struct FoldSpace<'a> {
    pub flavor: Flavor,
    pub beliefs: [Vec<&'a LexBelief>; 2],
    pub cautious: [Vec<bool>; 2],
    pub optimal: [Vec<BTreeSet<usize>>; 2],
    /// Incomplete models only: whether a type carries the reference utility.
    pub carries_u: [Vec<bool>; 2],
}

impl FoldSpace<'_> {
    /// Rows `0..=limit`, or until the table stabilizes when `limit` is `None`.
    pub fn run(&self, ia: &IARounds, limit: Option<usize>) -> FoldReport {
        let caution = FoldRow {
            fold: 0,
            good_choices: ia.at(0).clone(),
            entries: [0, 1].map(|i| {
                self.cautious[i]
                    .iter()
                    .map(|&c| FoldEntry {
                        verdict: if c { Verdict::Pass } else { Verdict::NotCautious },
                        holds: c,
                        witnesses: Vec::new(),
                    })
                    .collect()
            }),
        };
        let mut rows: Vec<FoldRow> = vec![caution];
        let mut stable_from: Option<usize> = None;
        let mut n = 1;
        loop {
            if limit.is_some_and(|l| n > l) {
                break;
            }
            if let Some(s) = stable_from {
                let mut copy = rows[s].clone();
                copy.fold = n;
                rows.push(copy);
                n += 1;
                continue;
            }
            let row = self.fold_row(n, ia, &rows[n - 1]);
            let same_holds = row
                .entries
                .iter()
                .zip(&rows[n - 1].entries)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.holds == y.holds));
            let choices_settled = ia.at(n + 1) == ia.at(n);
            rows.push(row);
            // fold 1 uses a looser witness rule, so a repeat there proves nothing
            if same_holds && choices_settled && n >= 2 {
                stable_from = Some(n);
                if limit.is_none() {
                    break;
                }
            }
            n += 1;
        }
        FoldReport { rows, stable_from }
    }

    fn fold_row(&self, n: usize, ia: &IARounds, prev: &FoldRow) -> FoldRow {
        let good_choices = ia.at(n).clone();
        let entries = [Player::One, Player::Two].map(|p| {
            let (i, j) = (p.index(), p.opponent().index());
            let prev_holds: Vec<bool> = prev.entries[j].iter().map(|e| e.holds).collect();
            (0..self.beliefs[i].len())
                .map(|t| {
                    if !self.cautious[i][t] {
                        return FoldEntry {
                            verdict: Verdict::NotCautious,
                            holds: false,
                            witnesses: Vec::new(),
                        };
                    }
                    let (verdict, witnesses) = self.check(j, self.beliefs[i][t], &good_choices[j], n, &prev_holds);
                    let holds = prev.entries[i][t].holds && verdict.is_pass();
                    FoldEntry {
                        verdict,
                        holds,
                        witnesses,
                    }
                })
                .collect()
        });
        FoldRow {
            fold: n,
            good_choices,
            entries,
        }
    }

    /// One type's fold-`n` check; `j` is the opponent and `prev_holds` the
    /// opponent's cumulative verdicts at fold `n - 1`.
    fn check(
        &self,
        j: usize,
        belief: &LexBelief,
        good: &BTreeSet<usize>,
        n: usize,
        prev_holds: &[bool],
    ) -> (Verdict, Vec<Witness>) {
        let optimal = &self.optimal[j];
        let eligible = |ty: usize| match self.flavor {
            Flavor::Complete => prev_holds[ty],
            Flavor::Incomplete => prev_holds[ty] && self.carries_u[j][ty],
        };
        let witness_ok = |ty: usize| match self.flavor {
            Flavor::Complete if n == 1 => true,
            _ => eligible(ty),
        };
        let good_pair = |p: Pair| match self.flavor {
            Flavor::Complete => eligible(p.ty) && optimal[p.ty].contains(&p.choice),
            Flavor::Incomplete => eligible(p.ty),
        };

        let mut types: Vec<(usize, usize)> = belief
            .possible_types()
            .into_iter()
            .filter_map(|ty| belief.first_level_of_type(ty).map(|l| (l, ty)))
            .collect();
        types.sort();

        let mut violations = Vec::new();
        let mut witnesses = Vec::new();
        for &c in good {
            match types
                .iter()
                .find(|&&(_, ty)| witness_ok(ty) && optimal[ty].contains(&c))
            {
                Some(&(level, ty)) => witnesses.push(Witness { choice: c, ty, level }),
                None => violations.push(Violation::MissingSupport { choice: c }),
            }
        }

        let mut pairs: Vec<(usize, Pair)> = belief
            .possible_pairs()
            .into_iter()
            .filter_map(|p| belief.first_level(p).map(|l| (l, p)))
            .collect();
        pairs.sort();
        let (goods, bads): (Vec<_>, Vec<_>) = pairs.iter().partition(|(_, p)| good_pair(*p));
        for (gl, g) in &goods {
            if let Some((_, b)) = bads.iter().find(|(bl, _)| bl <= gl) {
                violations.push(Violation::OrderViolation { good: *g, bad: *b });
            }
        }

        if violations.is_empty() {
            (Verdict::Pass, witnesses)
        } else {
            (Verdict::Violated(violations), witnesses)
        }
    }
}
