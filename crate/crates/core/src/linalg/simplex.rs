//! Dense exact-arithmetic two-phase simplex with Bland's anti-cycling rule.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` over rationals. Bland's rule
//! (smallest-index entering column, smallest-index basic variable on ties)
//! guarantees termination; the iteration counter is still capped at
//! `2^(rows + cols)` and exceeding it is reported as an error rather than
//! looping.
//!
//! When the problem is infeasible the phase-1 optimum is positive and the
//! dual prices read off the artificial columns certify it: the returned `y`
//! satisfies `y.A_j <= 0` for every column and `y.b > 0`, both exactly.

use super::LinalgError;
use crate::rational::Rat;
use num_traits::{One, Signed, Zero};

pub(crate) struct Lp {
    /// Constraint rows of `A` (each of length `cols`).
    pub rows: Vec<Vec<Rat>>,
    pub rhs: Vec<Rat>,
    pub cost: Vec<Rat>,
}

pub(crate) enum LpResult {
    Optimal { x: Vec<Rat>, objective: Rat },
    Infeasible { dual: Vec<Rat> },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    reduced: Vec<Rat>,
    objective: Rat,
    basis: Vec<usize>,
    iterations: u64,
    limit: u64,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col].clone();
        for entry in self.rows[row].iter_mut() {
            *entry /= &scale;
        }
        self.rhs[row] /= &scale;
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..self.rows[r].len() {
                let delta = &self.rows[row][c] * &factor;
                self.rows[r][c] -= delta;
            }
            let delta = &self.rhs[row] * &factor;
            self.rhs[r] -= delta;
        }
        let factor = self.reduced[col].clone();
        if !factor.is_zero() {
            for c in 0..self.reduced.len() {
                let delta = &self.rows[row][c] * &factor;
                self.reduced[c] -= delta;
            }
            let delta = &self.rhs[row] * &factor;
            self.objective -= delta;
        }
        self.basis[row] = col;
    }

    /// Current objective value; the cell stores its negation, which is what
    /// the pivot update maintains.
    fn objective_value(&self) -> Rat {
        -self.objective.clone()
    }

    /// Run Bland-rule iterations until optimality or unboundedness.
    fn optimize(&mut self) -> Result<bool, LinalgError> {
        loop {
            let entering = (0..self.reduced.len()).find(|&j| self.reduced[j].is_negative());
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col].is_positive() {
                    let ratio = &self.rhs[r] / &self.rows[r][col];
                    let better = match &best {
                        None => true,
                        Some((br, bratio)) => {
                            ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = best else {
                return Ok(false); // unbounded in the entering direction
            };
            self.pivot(row, col);
            self.iterations += 1;
            if self.iterations > self.limit {
                return Err(LinalgError::PivotLimitExceeded { limit: self.limit });
            }
        }
    }
}

pub(crate) fn solve(lp: &Lp) -> Result<LpResult, LinalgError> {
    let m = lp.rows.len();
    let n = lp.cost.len();
    debug_assert!(lp.rows.iter().all(|r| r.len() == n));
    debug_assert_eq!(lp.rhs.len(), m);

    // Orient rows so the right-hand side is nonnegative, remembering flips
    // so the infeasibility dual can be mapped back to the original rows.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    let mut flipped = Vec::with_capacity(m);
    for (row, value) in lp.rows.iter().zip(&lp.rhs) {
        if value.is_negative() {
            flipped.push(true);
            rows.push(row.iter().map(|c| -c).collect());
            rhs.push(-value);
        } else {
            flipped.push(false);
            rows.push(row.clone());
            rhs.push(value.clone());
        }
    }

    // Phase 1: append artificial columns and minimize their sum.
    let total = n + m;
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(total, Rat::zero());
        row[n + i] = Rat::one();
    }
    let mut reduced = vec![Rat::zero(); total];
    let mut objective = Rat::zero();
    // Reduced costs of phase 1 relative to the artificial basis; the
    // objective cell holds the negated phase-1 value.
    for j in 0..n {
        let mut sum = Rat::zero();
        for row in &rows {
            sum += &row[j];
        }
        reduced[j] = -sum;
    }
    for value in &rhs {
        objective -= value;
    }

    let shift = (total + m).min(62) as u32;
    let mut tableau = Tableau {
        rows,
        rhs,
        reduced,
        objective,
        basis: (n..total).collect(),
        iterations: 0,
        limit: 1u64 << shift,
    };

    if !tableau.optimize()? {
        unreachable!("phase 1 objective is bounded below by zero");
    }

    if tableau.objective_value().is_positive() {
        // Infeasible. Dual prices: y_i = phase1_cost(artificial_i) - reduced(artificial_i).
        let mut dual = Vec::with_capacity(m);
        for (i, flip) in flipped.iter().enumerate() {
            let y = Rat::one() - &tableau.reduced[n + i];
            dual.push(if *flip { -y } else { y });
        }
        return Ok(LpResult::Infeasible { dual });
    }

    // Drive leftover artificials out of the basis (degenerate rows).
    for row in 0..tableau.basis.len() {
        if tableau.basis[row] >= n {
            if let Some(col) = (0..n).find(|&j| !tableau.rows[row][j].is_zero()) {
                tableau.pivot(row, col);
            }
        }
    }
    // Rows still basic in an artificial are identically zero on structural
    // columns (redundant constraints); drop them.
    let keep: Vec<usize> = (0..tableau.basis.len())
        .filter(|&r| tableau.basis[r] < n)
        .collect();
    if keep.len() != tableau.basis.len() {
        tableau.rows = keep.iter().map(|&r| tableau.rows[r].clone()).collect();
        tableau.rhs = keep.iter().map(|&r| tableau.rhs[r].clone()).collect();
        tableau.basis = keep.iter().map(|&r| tableau.basis[r]).collect();
    }

    // Phase 2: swap in the real costs, keeping the basis.
    for row in tableau.rows.iter_mut() {
        row.truncate(n);
    }
    tableau.reduced = lp.cost.clone();
    tableau.objective = Rat::zero();
    for (r, &b) in tableau.basis.iter().enumerate() {
        let factor = tableau.reduced[b].clone();
        if factor.is_zero() {
            continue;
        }
        for c in 0..n {
            let delta = &tableau.rows[r][c] * &factor;
            tableau.reduced[c] -= delta;
        }
        let delta = &tableau.rhs[r] * &factor;
        tableau.objective -= delta;
    }

    if !tableau.optimize()? {
        return Ok(LpResult::Unbounded);
    }

    let mut x = vec![Rat::zero(); n];
    for (r, &b) in tableau.basis.iter().enumerate() {
        x[b] = tableau.rhs[r].clone();
    }
    Ok(LpResult::Optimal {
        x,
        objective: tableau.objective_value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn ints(values: &[i64]) -> Vec<Rat> {
        values.iter().map(|&v| rat_int(v)).collect()
    }

    #[test]
    fn feasible_system_returns_exact_solution() {
        // x1 + x2 = 3, x1 - x2 = 1  =>  x = (2, 1); minimize x1.
        let lp = Lp {
            rows: vec![ints(&[1, 1]), ints(&[1, -1])],
            rhs: ints(&[3, 1]),
            cost: ints(&[1, 0]),
        };
        match solve(&lp).unwrap() {
            LpResult::Optimal { x, objective } => {
                assert_eq!(x, ints(&[2, 1]));
                assert_eq!(objective, rat_int(2));
            }
            _ => panic!("expected optimal"),
        }
    }

    #[test]
    fn optimization_picks_the_cheaper_vertex() {
        // x1 + x2 = 1, minimize 3 x1 + x2  =>  x = (0, 1).
        let lp = Lp {
            rows: vec![ints(&[1, 1])],
            rhs: ints(&[1]),
            cost: ints(&[3, 1]),
        };
        match solve(&lp).unwrap() {
            LpResult::Optimal { x, objective } => {
                assert_eq!(x, ints(&[0, 1]));
                assert_eq!(objective, rat_int(1));
            }
            _ => panic!("expected optimal"),
        }
    }

    #[test]
    fn infeasible_system_yields_a_valid_dual() {
        // x1 + x2 = -1 with x >= 0 is infeasible.
        let lp = Lp {
            rows: vec![ints(&[1, 1])],
            rhs: ints(&[-1]),
            cost: ints(&[0, 0]),
        };
        match solve(&lp).unwrap() {
            LpResult::Infeasible { dual } => {
                // y.A <= 0 and y.b > 0, exactly.
                for j in 0..2 {
                    let pairing: Rat = dual
                        .iter()
                        .zip(&lp.rows)
                        .map(|(y, row)| y * &row[j])
                        .sum();
                    assert!(pairing <= rat_int(0));
                }
                let value: Rat = dual.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
                assert!(value > rat_int(0));
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn unbounded_direction_is_detected() {
        // x1 - x2 = 0, minimize -x1: both coordinates can grow together.
        let lp = Lp {
            rows: vec![ints(&[1, -1])],
            rhs: ints(&[0]),
            cost: ints(&[-1, 0]),
        };
        assert!(matches!(solve(&lp).unwrap(), LpResult::Unbounded));
    }

    #[test]
    fn rational_data_stays_exact() {
        // 2/3 x = 1/6  =>  x = 1/4.
        let lp = Lp {
            rows: vec![vec![rat(2, 3)]],
            rhs: vec![rat(1, 6)],
            cost: vec![rat_int(0)],
        };
        match solve(&lp).unwrap() {
            LpResult::Optimal { x, .. } => assert_eq!(x[0], rat(1, 4)),
            _ => panic!("expected optimal"),
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let lp = Lp {
            rows: vec![ints(&[1, 1]), ints(&[2, 2])],
            rhs: ints(&[1, 2]),
            cost: ints(&[1, 2]),
        };
        match solve(&lp).unwrap() {
            LpResult::Optimal { x, objective } => {
                assert_eq!(&x[0] + &x[1], rat_int(1));
                assert_eq!(objective, rat_int(1));
            }
            _ => panic!("expected optimal"),
        }
    }
}
