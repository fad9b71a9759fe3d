//! Two-phase tableau simplex.
//!
//! Every row gets an artificial column. Phase one drives the artificials to
//! zero, phase two optimizes the real objective with the artificial columns
//! frozen out of the entering set. The artificial columns are kept in the
//! tableau because their reduced costs are the row multipliers, which gives
//! the dual solution for free.
//!
//! Pivoting uses the largest-coefficient rule until a run of degenerate
//! pivots is seen, then switches to Bland's rule for the rest of the solve,
//! which rules out cycling. Ratio-test ties go to the basic variable with the
//! smallest column index.

use super::{Domain, LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::scalar::Scalar;

const DEGENERATE_RUN_BEFORE_BLAND: usize = 8;
const MAX_PIVOTS: usize = 200_000;

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    /// Reduced costs `c_B B^-1 a_j - c_j`; the last entry is the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    structural: usize,
    bland: bool,
    degenerate_run: usize,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.obj.len() - 1
    }

    fn rhs(&self, row: usize) -> &T {
        self.rows[row].last().expect("tableau row has rhs")
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            r[col] = T::zero();
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            self.obj[col] = T::zero();
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn set_costs(&mut self, costs: &[T]) {
        let w = self.width();
        let mut obj: Vec<T> = (0..=w)
            .map(|j| if j < w { -costs[j].clone() } else { T::zero() })
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                *o = o.clone() + cb.clone() * v.clone();
            }
        }
        self.obj = obj;
    }

    fn entering(&self, allowed: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..allowed {
            if !self.obj[j].is_strictly_negative() || self.basis.contains(&j) {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            match best {
                Some(b) if !self.obj[j].definitely_lt(&self.obj[b]) => {}
                _ => best = Some(j),
            }
        }
        best
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if !r[col].is_strictly_positive() {
                continue;
            }
            let ratio = self.rhs(i).clone() / r[col].clone();
            let replace = match &best {
                None => true,
                Some((bi, br)) => {
                    ratio.definitely_lt(br)
                        || (ratio.approx_eq(br) && self.basis[i] < self.basis[*bi])
                }
            };
            if replace {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Optimizes with entering columns restricted to `0..allowed`.
    fn run(&mut self, allowed: usize) -> Outcome {
        while self.pivots < MAX_PIVOTS {
            let Some(col) = self.entering(allowed) else {
                return Outcome::Optimal;
            };
            let Some(row) = self.leaving(col) else {
                return Outcome::Unbounded;
            };
            if self.rhs(row).is_negligible() {
                self.degenerate_run += 1;
                if self.degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(row, col);
        }
        // Only reachable with inexact scalars; Bland's rule terminates otherwise.
        Outcome::Optimal
    }
}

/// Solves `lp` exactly (for exact scalars). Infeasibility and unboundedness
/// are reported through [`LpSolution::status`].
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> LpSolution<T> {
    let n = lp.num_variables();
    let m = lp.num_constraints();

    // structural columns: x+ per variable, x- per free variable, slack per inequality row
    let mut plus = Vec::with_capacity(n);
    let mut minus = vec![None; n];
    let mut next = 0;
    for (j, v) in lp.variables.iter().enumerate() {
        plus.push(next);
        next += 1;
        if v.domain == Domain::Free {
            minus[j] = Some(next);
            next += 1;
        }
    }
    let sign = match lp.sense {
        Sense::Maximize => T::one(),
        Sense::Minimize => -T::one(),
    };
    // Internal rows are `<=` or `=`. The multipliers are chosen so that the
    // internal row duals equal the multipliers of `LinearProgram::dual`
    // without any further sign change.
    let mut slack = vec![None; m];
    let mut row_mult = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mult = match (lp.sense, c.relation) {
            (Sense::Maximize, Relation::Ge) => -T::one(),
            (Sense::Maximize, _) => T::one(),
            (Sense::Minimize, Relation::Le) => T::one(),
            (Sense::Minimize, _) => -T::one(),
        };
        if c.relation != Relation::Eq {
            slack[i] = Some(next);
            next += 1;
        }
        row_mult.push(mult);
    }
    let structural = next;
    let width = structural + m;

    let mut rows = Vec::with_capacity(m);
    let mut flips = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![T::zero(); width + 1];
        for (j, coef) in &c.terms {
            let a = row_mult[i].clone() * coef.clone();
            row[plus[*j]] = row[plus[*j]].clone() + a.clone();
            if let Some(mc) = minus[*j] {
                row[mc] = row[mc].clone() - a;
            }
        }
        if let Some(s) = slack[i] {
            row[s] = T::one();
        }
        row[width] = row_mult[i].clone() * c.rhs.clone();
        let flip = row[width].is_strictly_negative();
        if flip {
            row.iter_mut().for_each(|v| *v = -v.clone());
        }
        row[structural + i] = T::one();
        flips.push(flip);
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        obj: vec![T::zero(); width + 1],
        basis: (structural..width).collect(),
        structural,
        bland: false,
        degenerate_run: 0,
        pivots: 0,
    };

    // phase one: maximize -sum(artificials)
    let phase1: Vec<T> = (0..width)
        .map(|j| {
            if j >= structural {
                -T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    tab.set_costs(&phase1);
    tab.run(structural);
    if tab.obj[width].is_strictly_negative() {
        return infeasible(LpStatus::Infeasible, tab.pivots);
    }
    for i in 0..m {
        if tab.basis[i] >= tab.structural {
            if let Some(j) = (0..tab.structural).find(|&j| !tab.rows[i][j].is_negligible()) {
                tab.pivot(i, j);
            }
        }
    }

    // phase two
    let mut costs = vec![T::zero(); width];
    for j in 0..n {
        let c = sign.clone() * lp.objective[j].clone();
        if let Some(mc) = minus[j] {
            costs[mc] = -c.clone();
        }
        costs[plus[j]] = c;
    }
    tab.set_costs(&costs);
    tab.bland = false;
    tab.degenerate_run = 0;
    if let Outcome::Unbounded = tab.run(structural) {
        return infeasible(LpStatus::Unbounded, tab.pivots);
    }

    let mut values = vec![T::zero(); width];
    for (i, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.rhs(i).clone();
    }
    let primal: Vec<T> = (0..n)
        .map(|j| match minus[j] {
            Some(mc) => values[plus[j]].clone() - values[mc].clone(),
            None => values[plus[j]].clone(),
        })
        .collect();
    let dual: Vec<T> = (0..m)
        .map(|i| {
            let y = tab.obj[structural + i].clone();
            if flips[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    let objective = lp.objective_value(&primal);
    LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective,
        pivots: tab.pivots,
    }
}

fn infeasible<T: Scalar>(status: LpStatus, pivots: usize) -> LpSolution<T> {
    LpSolution {
        status,
        primal: Vec::new(),
        dual: Vec::new(),
        objective: T::zero(),
        pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Domain, LinearProgram, Relation, Sense};
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn bounded_single_variable() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Domain::NonNegative);
        lp.set_objective(x, r(1, 1));
        lp.add_constraint("cap", vec![(x, r(1, 1))], Relation::Le, r(1, 1));
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, r(1, 1));
        assert_eq!(s.dual, vec![r(1, 1)]);
    }

    #[test]
    fn unbounded_single_variable() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Domain::NonNegative);
        lp.set_objective(x, r(1, 1));
        lp.add_constraint("floor", vec![(x, r(1, 1))], Relation::Ge, r(0, 1));
        assert_eq!(solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable("x", Domain::NonNegative);
        lp.add_constraint("a", vec![(x, r(1, 1))], Relation::Ge, r(2, 1));
        lp.add_constraint("b", vec![(x, r(1, 1))], Relation::Le, r(1, 1));
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn free_variables_and_minimization() {
        // min x + 2y s.t. x + y = 1, x - y <= 3, x free, y >= 0 -> x = 1, y = 0
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable("x", Domain::Free);
        let y = lp.add_variable("y", Domain::NonNegative);
        lp.set_objective(x, r(1, 1));
        lp.set_objective(y, r(2, 1));
        lp.add_constraint(
            "sum",
            vec![(x, r(1, 1)), (y, r(1, 1))],
            Relation::Eq,
            r(1, 1),
        );
        lp.add_constraint(
            "gap",
            vec![(x, r(1, 1)), (y, r(-1, 1))],
            Relation::Le,
            r(3, 1),
        );
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        // x free can go to 2 with y = -1? no, y >= 0; x + y = 1, x - y <= 3 -> y >= -1; min x + 2y = 1 + y
        assert_eq!(s.objective, r(1, 1));
        assert_eq!(s.primal, vec![r(1, 1), r(0, 1)]);
        let d = lp.dual();
        assert!(d.is_feasible(&s.dual), "{:?}", d.first_violation(&s.dual));
        assert_eq!(d.objective_value(&s.dual), s.objective);
    }

    #[test]
    fn negative_free_optimum() {
        // max -x s.t. x >= -5, x free -> x = -5, value 5
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Domain::Free);
        lp.set_objective(x, r(-1, 1));
        lp.add_constraint("low", vec![(x, r(1, 1))], Relation::Ge, r(-5, 1));
        let s = solve(&lp);
        assert_eq!(s.primal, vec![r(-5, 1)]);
        assert_eq!(s.objective, r(5, 1));
        assert_eq!(s.dual, vec![r(1, 1)]);
    }

    #[test]
    fn redundant_equalities_keep_dual_feasible() {
        // two copies of x + y = 1; max x
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Domain::NonNegative);
        let y = lp.add_variable("y", Domain::NonNegative);
        lp.set_objective(x, r(1, 1));
        for name in ["a", "b"] {
            lp.add_constraint(
                name,
                vec![(x, r(1, 1)), (y, r(1, 1))],
                Relation::Eq,
                r(1, 1),
            );
        }
        let s = solve(&lp);
        assert_eq!(s.objective, r(1, 1));
        let d = lp.dual();
        assert!(d.is_feasible(&s.dual));
        assert_eq!(d.objective_value(&s.dual), r(1, 1));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the plain largest-coefficient rule.
        let mut lp = LinearProgram::new(Sense::Maximize);
        let v: Vec<usize> = (0..4)
            .map(|i| lp.add_variable(format!("x{i}"), Domain::NonNegative))
            .collect();
        for (j, c) in [r(3, 4), r(-20, 1), r(1, 2), r(-6, 1)]
            .into_iter()
            .enumerate()
        {
            lp.set_objective(v[j], c);
        }
        lp.add_constraint(
            "r1",
            vec![
                (v[0], r(1, 4)),
                (v[1], r(-8, 1)),
                (v[2], r(-1, 1)),
                (v[3], r(9, 1)),
            ],
            Relation::Le,
            r(0, 1),
        );
        lp.add_constraint(
            "r2",
            vec![
                (v[0], r(1, 2)),
                (v[1], r(-12, 1)),
                (v[2], r(-1, 2)),
                (v[3], r(3, 1)),
            ],
            Relation::Le,
            r(0, 1),
        );
        lp.add_constraint("r3", vec![(v[2], r(1, 1))], Relation::Le, r(1, 1));
        let s = solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, r(5, 4));
        assert_eq!(s.primal, vec![r(1, 1), r(0, 1), r(1, 1), r(0, 1)]);
    }

    #[test]
    fn float_instance() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_variable("x", Domain::NonNegative);
        let y = lp.add_variable("y", Domain::NonNegative);
        lp.set_objective(x, 3.0);
        lp.set_objective(y, 5.0);
        lp.add_constraint("a", vec![(x, 1.0)], Relation::Le, 4.0);
        lp.add_constraint("b", vec![(y, 2.0)], Relation::Le, 12.0);
        lp.add_constraint("c", vec![(x, 3.0), (y, 2.0)], Relation::Le, 18.0);
        let s = solve(&lp);
        assert!((s.objective - 36.0).abs() < 1e-9);
    }
}
