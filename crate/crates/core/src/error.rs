use alloc::string::String;

use crate::{belief::TypeId, game::Player};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("lexicographic vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("malformed rational `{0}`")]
    MalformedRational(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("unknown choice `{label}` for player {player}")]
    UnknownChoice { player: Player, label: String },

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("type {0} is not cautious")]
    NotCautious(TypeId),

    #[error("fold depth must be at least 1")]
    ZeroFoldDepth,

    #[error("choice set must not be empty")]
    EmptyChoiceSet,

    #[error("choice {choice} is not in the candidate set")]
    ChoiceNotInSet { choice: usize },

    #[error("linear program is malformed: {0}")]
    MalformedLp(String),

    #[error("internal error: {0}")]
    Internal(String),
}
