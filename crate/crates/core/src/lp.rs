//! Exact two-phase simplex over rationals.
//!
//! Problems are `maximize c.x` subject to linear rows and `x >= 0`. The
//! tableau is dense and Bland's rule picks both the entering and the leaving
//! variable, so the method cannot cycle. Sizes here are a handful of rows, so
//! reduced costs are simply recomputed on every iteration.

use alloc::{format, vec, vec::Vec};

use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    num_vars: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpProblem {
    /// A maximization problem over `objective.len()` non-negative variables.
    pub fn maximize(objective: Vec<Rational>) -> Self {
        Self {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    /// Pure feasibility problem.
    pub fn feasibility(num_vars: usize) -> Self {
        Self::maximize(vec![Rational::zero(); num_vars])
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::MalformedLp(format!(
                "row has {} coefficients, problem has {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    num_vars: usize,
}

impl Tableau {
    fn build(problem: &LpProblem) -> Self {
        let n = problem.num_vars;
        let mut normalized: Vec<(Vec<Rational>, Relation, Rational)> = problem
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), flipped, -&c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();

        let slacks = normalized.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let artificials = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let width = n + slacks + artificials;
        let mut kinds = vec![ColKind::Original; n];
        kinds.extend(std::iter::repeat_n(ColKind::Slack, slacks));
        kinds.extend(std::iter::repeat_n(ColKind::Artificial, artificials));

        let mut rows = Vec::with_capacity(normalized.len());
        let mut rhs = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_art) = (n, n + slacks);
        for (coeffs, relation, b) in normalized.drain(..) {
            let mut row = coeffs;
            row.resize(width, Rational::zero());
            match relation {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        Self {
            rows,
            rhs,
            basis,
            kinds,
            num_vars: n,
        }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].recip();
        for a in self.rows[r].iter_mut() {
            *a = &*a * &p;
        }
        self.rhs[r] = &self.rhs[r] * &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (a, b) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !b.is_zero() {
                    *a -= &(&f * b);
                }
            }
            self.rhs[i] -= &(&f * &pivot_rhs);
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over the columns allowed to enter. Returns false when
    /// the objective is unbounded.
    fn optimize(&mut self, cost: &[Rational], may_enter: impl Fn(usize) -> bool) -> bool {
        loop {
            // Bland: lowest-index column with negative reduced cost z_j - c_j
            let entering = (0..self.width()).filter(|&j| may_enter(j)).find(|&j| {
                let z: Rational = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .filter(|(row, _)| !row[j].is_zero())
                    .map(|(row, &b)| &cost[b] * &row[j])
                    .sum();
                (z - &cost[j]).is_negative()
            });
            let Some(c) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][c];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn run(mut self, objective: &[Rational]) -> LpOutcome {
        let width = self.width();
        let has_artificials = self.kinds.contains(&ColKind::Artificial);
        if has_artificials {
            let phase1: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| match k {
                    ColKind::Artificial => -Rational::one(),
                    _ => Rational::zero(),
                })
                .collect();
            // bounded below by zero, so never unbounded
            self.optimize(&phase1, |_| true);
            let infeasibility: Rational = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(b, _)| self.kinds[**b] == ColKind::Artificial)
                .map(|(_, v)| v.clone())
                .sum();
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            // drive zero-level artificials out of the basis, dropping redundant rows
            let mut i = 0;
            while i < self.rows.len() {
                if self.kinds[self.basis[i]] != ColKind::Artificial {
                    i += 1;
                    continue;
                }
                let col = (0..width).find(|&j| self.kinds[j] != ColKind::Artificial && !self.rows[i][j].is_zero());
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                    }
                }
            }
        }

        let mut cost = vec![Rational::zero(); width];
        cost[..self.num_vars].clone_from_slice(objective);
        let kinds = self.kinds.clone();
        if !self.optimize(&cost, |j| kinds[j] != ColKind::Artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.num_vars];
        for (b, v) in self.basis.iter().zip(&self.rhs) {
            if *b < self.num_vars {
                x[*b] = v.clone();
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { value, x }
    }
}
