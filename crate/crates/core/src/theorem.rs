//! End-to-end agreement between iterated admissibility, optimality for types
//! expressing common assumption of rationality, and optimality for
//! incomplete-information types satisfying the characterizing conditions.

use alloc::{collections::BTreeSet, vec::Vec};

use crate::{
    belief::TypeId,
    complete::CompleteModel,
    game::{Game, Player},
    incomplete::IncompleteModel,
    solver::{iterated_admissibility, synthesize_car_model, IARounds},
    transform::{complete_to_incomplete, incomplete_to_complete},
    Result,
};

/// Which of the computed sets disagrees with the survivors first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    CompleteModel,
    IncompleteModel,
    Converse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub player: Player,
    pub choice: usize,
    pub source: Source,
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub rounds: IARounds,
    pub witness: CompleteModel,
    pub transformed: IncompleteModel,
    /// IA survivors per player.
    pub survivors: [BTreeSet<usize>; 2],
    /// Optimal for some witness type with common caution and common
    /// assumption of rationality.
    pub car_optimal: [BTreeSet<usize>; 2],
    /// Optimal for some transformed type carrying `u` that satisfies
    /// condition (b).
    pub incomplete_optimal: [BTreeSet<usize>; 2],
    /// Choices of the previous set whose merged type, after transforming back,
    /// again expresses common caution and common assumption of rationality.
    pub converse_optimal: [BTreeSet<usize>; 2],
    pub mismatch: Option<Mismatch>,
}

impl TheoremReport {
    pub fn agrees(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Choices optimal for some type of `m` passing both common caution and
/// common assumption of rationality.
pub fn car_optimal_choices(m: &CompleteModel, ia: &IARounds) -> Result<[BTreeSet<usize>; 2]> {
    let report = m.common_assumption_with(ia)?;
    let caution = m.common_caution();
    Ok(Player::BOTH.map(|p| {
        (0..m.num_types(p))
            .map(|t| TypeId::new(p, t))
            .filter(|&t| report.final_holds(t) && caution[p.index()][t.index])
            .flat_map(|t| m.optimal_choices(t))
            .collect()
    }))
}

/// Types carrying the reference utility that satisfy condition (b).
pub fn condition_b_types(m: &IncompleteModel) -> Result<Vec<TypeId>> {
    let b = m.condition_b()?;
    Ok(m.type_ids()
        .filter(|&t| m.carries_reference(t) && b[t.player.index()][t.index])
        .collect())
}

pub fn verify_theorem(game: &Game) -> Result<TheoremReport> {
    let rounds = iterated_admissibility(game)?;
    let survivors = rounds.survivors().clone();
    let witness = synthesize_car_model(game)?;
    let car_optimal = car_optimal_choices(&witness, &rounds)?;

    let transformed = complete_to_incomplete(&witness)?.model;
    let good_types = condition_b_types(&transformed)?;
    let mut incomplete_optimal: [BTreeSet<usize>; 2] = [BTreeSet::new(), BTreeSet::new()];
    for &t in &good_types {
        incomplete_optimal[t.player.index()].extend(transformed.optimal_choices(t));
    }

    let back = incomplete_to_complete(&transformed)?;
    let report = back.model.common_assumption_with(&rounds)?;
    let caution = back.model.common_caution();
    let mut converse_optimal: [BTreeSet<usize>; 2] = [BTreeSet::new(), BTreeSet::new()];
    for &t in &good_types {
        let merged = TypeId::new(t.player, back.class_of[t.player.index()][t.index]);
        if report.final_holds(merged) && caution[t.player.index()][merged.index] {
            let co = back.model.optimal_choices(merged);
            converse_optimal[t.player.index()].extend(transformed.optimal_choices(t).intersection(&co).copied());
        }
    }

    let mismatch = first_mismatch(
        &survivors,
        &[
            (Source::CompleteModel, &car_optimal),
            (Source::IncompleteModel, &incomplete_optimal),
            (Source::Converse, &converse_optimal),
        ],
    );
    Ok(TheoremReport {
        rounds,
        witness,
        transformed,
        survivors,
        car_optimal,
        incomplete_optimal,
        converse_optimal,
        mismatch,
    })
}

fn first_mismatch(survivors: &[BTreeSet<usize>; 2], sets: &[(Source, &[BTreeSet<usize>; 2])]) -> Option<Mismatch> {
    for p in Player::BOTH {
        let i = p.index();
        for &(source, set) in sets {
            if let Some(&choice) = survivors[i].symmetric_difference(&set[i]).next() {
                return Some(Mismatch {
                    player: p,
                    choice,
                    source,
                });
            }
        }
    }
    None
}
