//! Exact linear programming: a small LP container, a two-phase simplex,
//! builders for the trust-constrained programs and an optimality certifier.

mod builders;
mod certify;
mod simplex;

pub use builders::{
    build_dual, build_informativeness, build_primal, kernel_from_primal, kernel_variable,
    solve_informativeness, solve_trust_program, trust_constraint_index, InformativenessForm,
    InformativenessSolution, LpCertificate, TrustDual,
};
pub use certify::{certify, CertificationReport};
pub use simplex::solve;

use crate::scalar::{sum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    NonNegative,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub domain: Domain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    pub name: String,
    /// Sparse `(variable, coefficient)` terms.
    pub terms: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: Scalar> Constraint<T> {
    pub fn lhs(&self, x: &[T]) -> T {
        sum(self.terms.iter().map(|(j, c)| c.clone() * x[*j].clone()))
    }

    pub fn is_satisfied(&self, x: &[T]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => !lhs.definitely_gt(&self.rhs),
            Relation::Ge => !lhs.definitely_lt(&self.rhs),
            Relation::Eq => lhs.approx_eq(&self.rhs),
        }
    }

    pub fn is_tight(&self, x: &[T]) -> bool {
        self.lhs(x).approx_eq(&self.rhs)
    }

    /// Dense coefficient row over `n` variables, merging repeated terms.
    fn dense(&self, n: usize) -> Vec<T> {
        let mut row = vec![T::zero(); n];
        for (j, c) in &self.terms {
            row[*j] = row[*j].clone() + c.clone();
        }
        row
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    /// Dense objective, one coefficient per variable.
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

/// Outcome of [`solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Primal point (empty unless optimal).
    pub primal: Vec<T>,
    /// One multiplier per constraint, in the sign convention of
    /// [`LinearProgram::dual`]: inequality multipliers are nonnegative,
    /// equality multipliers are free. Empty unless optimal.
    pub dual: Vec<T>,
    pub objective: T,
    pub pivots: usize,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, name: impl Into<String>, domain: Domain) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            domain,
        });
        self.objective.push(T::zero());
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coef: T) {
        self.objective[var] = coef;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, T)>,
        relation: Relation,
        rhs: T,
    ) -> usize {
        debug_assert!(terms.iter().all(|(j, _)| *j < self.variables.len()));
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        sum(self
            .objective
            .iter()
            .zip(x)
            .map(|(c, v)| c.clone() * v.clone()))
    }

    /// First violated bound or constraint, if any.
    pub fn first_violation(&self, x: &[T]) -> Option<String> {
        if x.len() != self.num_variables() {
            return Some(format!(
                "point has {} coordinates, program has {} variables",
                x.len(),
                self.num_variables()
            ));
        }
        for (var, v) in self.variables.iter().zip(x) {
            if var.domain == Domain::NonNegative && v.is_strictly_negative() {
                return Some(format!("variable {} = {} is negative", var.name, v));
            }
        }
        self.constraints
            .iter()
            .find(|c| !c.is_satisfied(x))
            .map(|c| {
                format!(
                    "constraint {} violated (lhs {} vs rhs {})",
                    c.name,
                    c.lhs(x),
                    c.rhs
                )
            })
    }

    pub fn is_feasible(&self, x: &[T]) -> bool {
        self.first_violation(x).is_none()
    }

    /// Mechanically derived dual.
    ///
    /// Inequality rows are first oriented to `<=` for a maximization (`>=` for
    /// a minimization) so that their multipliers are nonnegative; equality
    /// rows get free multipliers. Dual variable `i` belongs to primal
    /// constraint `i` and dual constraint `j` to primal variable `j`; every dual
    /// constraint is written as `coefficients (>= | <= | =) objective_j`.
    pub fn dual(&self) -> LinearProgram<T> {
        let n = self.num_variables();
        let (dual_sense, var_rel) = match self.sense {
            Sense::Maximize => (Sense::Minimize, Relation::Ge),
            Sense::Minimize => (Sense::Maximize, Relation::Le),
        };
        let mut dual = LinearProgram::new(dual_sense);
        let mut rows = Vec::with_capacity(self.num_constraints());
        for c in &self.constraints {
            let flip = matches!(
                (self.sense, c.relation),
                (Sense::Maximize, Relation::Ge) | (Sense::Minimize, Relation::Le)
            );
            let domain = if c.relation == Relation::Eq {
                Domain::Free
            } else {
                Domain::NonNegative
            };
            let y = dual.add_variable(format!("y[{}]", c.name), domain);
            let mut row = c.dense(n);
            let mut rhs = c.rhs.clone();
            if flip {
                row.iter_mut().for_each(|v| *v = -v.clone());
                rhs = -rhs;
            }
            dual.set_objective(y, rhs);
            rows.push(row);
        }
        for (j, var) in self.variables.iter().enumerate() {
            let terms: Vec<(usize, T)> = rows
                .iter()
                .enumerate()
                .filter(|(_, row)| !row[j].is_zero())
                .map(|(i, row)| (i, row[j].clone()))
                .collect();
            let rel = match var.domain {
                Domain::NonNegative => var_rel,
                Domain::Free => Relation::Eq,
            };
            dual.add_constraint(
                format!("dual[{}]", var.name),
                terms,
                rel,
                self.objective[j].clone(),
            );
        }
        dual
    }

    /// Compares two programs constraint by constraint, ignoring names and the
    /// order of terms within a row. Returns the first difference found.
    pub fn structural_difference(&self, other: &LinearProgram<T>) -> Option<String> {
        if self.sense != other.sense {
            return Some("objective senses differ".into());
        }
        if self.num_variables() != other.num_variables() {
            return Some(format!(
                "variable counts differ: {} vs {}",
                self.num_variables(),
                other.num_variables()
            ));
        }
        for (j, (a, b)) in self.variables.iter().zip(&other.variables).enumerate() {
            if a.domain != b.domain {
                return Some(format!(
                    "variable {j} ({} vs {}) has different sign restriction",
                    a.name, b.name
                ));
            }
        }
        if let Some(j) =
            (0..self.num_variables()).find(|&j| !self.objective[j].approx_eq(&other.objective[j]))
        {
            return Some(format!("objective coefficient {j} differs"));
        }
        if self.num_constraints() != other.num_constraints() {
            return Some(format!(
                "constraint counts differ: {} vs {}",
                self.num_constraints(),
                other.num_constraints()
            ));
        }
        let n = self.num_variables();
        for (i, (a, b)) in self.constraints.iter().zip(&other.constraints).enumerate() {
            if a.relation != b.relation {
                return Some(format!(
                    "constraint {i} ({} vs {}) relation differs",
                    a.name, b.name
                ));
            }
            if !a.rhs.approx_eq(&b.rhs) {
                return Some(format!(
                    "constraint {i} ({} vs {}) right-hand side differs",
                    a.name, b.name
                ));
            }
            let (ra, rb) = (a.dense(n), b.dense(n));
            if let Some(j) = (0..n).find(|&j| !ra[j].approx_eq(&rb[j])) {
                return Some(format!(
                    "constraint {i} ({} vs {}) coefficient of variable {j} differs: {} vs {}",
                    a.name, b.name, ra[j], rb[j]
                ));
            }
        }
        None
    }
}
