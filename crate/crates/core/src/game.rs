//! Finite two-player games and game forms.
//!
//! Choices are addressed by dense indices assigned in declaration order.
//! Utility functions are always stored oriented for their owner: rows are the
//! owner's choices, columns the opponent's.

use alloc::{
    collections::BTreeSet,
    format,
    string::{String, ToString},
    vec::Vec,
};
use core::fmt;

use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Player> {
        match index {
            0 => Some(Player::One),
            1 => Some(Player::Two),
            _ => None,
        }
    }

    /// 1 or 2.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Choice labels for both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameForm {
    names: [String; 2],
    choices: [Vec<String>; 2],
}

impl GameForm {
    pub fn new(names: [String; 2], choices: [Vec<String>; 2]) -> Result<Self> {
        for p in Player::BOTH {
            let list = &choices[p.index()];
            if list.is_empty() {
                return Err(Error::InvalidGame(format!("player {p} has no choices")));
            }
            let mut seen = BTreeSet::new();
            for label in list {
                if !seen.insert(label.as_str()) {
                    return Err(Error::InvalidGame(format!(
                        "duplicate choice label `{label}` for player {p}"
                    )));
                }
            }
        }
        Ok(Self { names, choices })
    }

    /// Form with default player names "1" and "2".
    pub fn from_labels<S: AsRef<str>>(c1: &[S], c2: &[S]) -> Result<Self> {
        let own = |xs: &[S]| xs.iter().map(|s| s.as_ref().to_string()).collect();
        Self::new(["1".to_string(), "2".to_string()], [own(c1), own(c2)])
    }

    pub fn player_name(&self, p: Player) -> &str {
        &self.names[p.index()]
    }

    pub fn choices(&self, p: Player) -> &[String] {
        &self.choices[p.index()]
    }

    pub fn num_choices(&self, p: Player) -> usize {
        self.choices[p.index()].len()
    }

    pub fn all_choices(&self, p: Player) -> BTreeSet<usize> {
        (0..self.num_choices(p)).collect()
    }

    pub fn label(&self, p: Player, choice: usize) -> &str {
        &self.choices[p.index()][choice]
    }

    pub fn choice_index(&self, p: Player, label: &str) -> Result<usize> {
        self.choices[p.index()]
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownChoice {
                player: p,
                label: label.to_string(),
            })
    }

    /// A utility function of the right shape for player `p`.
    pub fn zero_utility(&self, p: Player) -> UtilityFn {
        UtilityFn::zero(self.num_choices(p), self.num_choices(p.opponent()))
    }

    pub fn fits(&self, p: Player, v: &UtilityFn) -> bool {
        v.own_choices() == self.num_choices(p) && v.opponent_choices() == self.num_choices(p.opponent())
    }
}

/// A utility matrix indexed by (own choice, opponent choice).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UtilityFn {
    own: usize,
    opp: usize,
    cells: Vec<Rational>,
}

impl UtilityFn {
    /// `cells` is row-major: `cells[own * opp_count + opp]`.
    pub fn new(own: usize, opp: usize, cells: Vec<Rational>) -> Result<Self> {
        if own == 0 || opp == 0 {
            return Err(Error::InvalidGame("utility matrix with an empty dimension".to_string()));
        }
        if cells.len() != own * opp {
            return Err(Error::InvalidGame(format!(
                "utility matrix has {} cells, expected {}",
                cells.len(),
                own * opp
            )));
        }
        Ok(Self { own, opp, cells })
    }

    pub fn from_fn(own: usize, opp: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let cells = (0..own)
            .flat_map(|a| (0..opp).map(move |b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        Self { own, opp, cells }
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        let own = rows.len();
        let opp = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != opp) {
            return Err(Error::InvalidGame("ragged utility rows".to_string()));
        }
        Self::new(
            own,
            opp,
            rows.iter().flat_map(|r| r.iter().map(|&x| Rational::from(x))).collect(),
        )
    }

    pub fn zero(own: usize, opp: usize) -> Self {
        Self::from_fn(own, opp, |_, _| Rational::zero())
    }

    pub fn own_choices(&self) -> usize {
        self.own
    }

    pub fn opponent_choices(&self) -> usize {
        self.opp
    }

    pub fn get(&self, own: usize, opp: usize) -> &Rational {
        assert!(own < self.own && opp < self.opp, "utility index out of range");
        &self.cells[own * self.opp + opp]
    }

    pub fn row(&self, own: usize) -> &[Rational] {
        &self.cells[own * self.opp..(own + 1) * self.opp]
    }

    pub fn cells(&self) -> &[Rational] {
        &self.cells
    }

    /// Cell-wise sum; both matrices must have the same shape.
    pub fn pointwise_add(&self, other: &UtilityFn) -> Result<UtilityFn> {
        if self.own != other.own || self.opp != other.opp {
            return Err(Error::InvalidGame("utility shapes differ".to_string()));
        }
        Ok(Self {
            own: self.own,
            opp: self.opp,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| a + b).collect(),
        })
    }

    /// Expected utility of `own` against a distribution over opponent choices.
    pub fn expected(&self, own: usize, dist: &[Rational]) -> Rational {
        self.row(own)
            .iter()
            .zip(dist)
            .filter(|(_, p)| !p.is_zero())
            .map(|(u, p)| u * p)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    form: GameForm,
    utilities: [UtilityFn; 2],
}

impl Game {
    pub fn new(form: GameForm, utilities: [UtilityFn; 2]) -> Result<Self> {
        for p in Player::BOTH {
            if !form.fits(p, &utilities[p.index()]) {
                return Err(Error::InvalidGame(format!(
                    "utility of player {p} is not {}x{}",
                    form.num_choices(p),
                    form.num_choices(p.opponent())
                )));
            }
        }
        Ok(Self { form, utilities })
    }

    pub fn form(&self) -> &GameForm {
        &self.form
    }

    pub fn utility_fn(&self, p: Player) -> &UtilityFn {
        &self.utilities[p.index()]
    }

    pub fn utilities(&self) -> &[UtilityFn; 2] {
        &self.utilities
    }

    /// Payoff to `p` by label.
    pub fn utility(&self, p: Player, own: &str, opp: &str) -> Result<&Rational> {
        let a = self.form.choice_index(p, own)?;
        let b = self.form.choice_index(p.opponent(), opp)?;
        Ok(self.utilities[p.index()].get(a, b))
    }

    pub fn payoff(&self, p: Player, own: usize, opp: usize) -> &Rational {
        self.utilities[p.index()].get(own, opp)
    }
}
