//! The trust-constrained programs.
//!
//! Primal layout: variable `kernel_variable(q, xh, x)` is `mu(xh|x)`, grouped
//! by source symbol. Rows `0..q` are the column sums, followed by one trust
//! row `mu(xh|xh) - mu(xh|x) >= 0` per ordered pair in
//! [`trust_constraint_index`] order. The dual uses the same layout: `w(x)`
//! for row `x`, then `v(xh,x)` for the trust rows.

use super::{
    certify, solve, CertificationReport, Domain, LinearProgram, LpStatus, Relation, Sense,
};
use crate::error::{Error, Result};
use crate::game::{RecoveryKernel, Table, UtilityMatrix};
use crate::scalar::Scalar;

pub fn kernel_variable(q: usize, recovered: usize, source: usize) -> usize {
    source * q + recovered
}

/// Position of the trust row for `(recovered, source)` among the `q(q-1)` trust rows.
pub fn trust_constraint_index(q: usize, recovered: usize, source: usize) -> usize {
    debug_assert_ne!(recovered, source);
    recovered * (q - 1)
        + if source < recovered {
            source
        } else {
            source - 1
        }
}

fn trust_pairs(q: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..q).flat_map(move |r| (0..q).filter(move |&s| s != r).map(move |s| (r, s)))
}

fn add_kernel_block<T: Scalar>(
    lp: &mut LinearProgram<T>,
    utility: &UtilityMatrix<T>,
    with_value: bool,
) {
    let q = utility.q();
    for x in 0..q {
        for xh in 0..q {
            let j = lp.add_variable(format!("mu({}|{})", xh + 1, x + 1), Domain::NonNegative);
            debug_assert_eq!(j, kernel_variable(q, xh, x));
            if with_value {
                lp.set_objective(j, utility.get(xh, x).clone());
            }
        }
    }
}

fn add_kernel_constraints<T: Scalar>(lp: &mut LinearProgram<T>, q: usize) {
    for x in 0..q {
        let terms = (0..q)
            .map(|xh| (kernel_variable(q, xh, x), T::one()))
            .collect();
        lp.add_constraint(
            format!("sum mu(.|{})", x + 1),
            terms,
            Relation::Eq,
            T::one(),
        );
    }
    for (xh, x) in trust_pairs(q) {
        lp.add_constraint(
            format!("trust({},{})", xh + 1, x + 1),
            vec![
                (kernel_variable(q, xh, xh), T::one()),
                (kernel_variable(q, xh, x), -T::one()),
            ],
            Relation::Ge,
            T::zero(),
        );
    }
}

/// Maximize `V(mu)` over column-stochastic kernels obeying the trust constraints.
pub fn build_primal<T: Scalar>(utility: &UtilityMatrix<T>) -> LinearProgram<T> {
    let mut lp = LinearProgram::new(Sense::Maximize);
    add_kernel_block(&mut lp, utility, true);
    add_kernel_constraints(&mut lp, utility.q());
    lp
}

fn add_dual_block<T: Scalar>(lp: &mut LinearProgram<T>, q: usize) -> (usize, usize) {
    let w0 = lp.num_variables();
    for x in 0..q {
        lp.add_variable(format!("w({})", x + 1), Domain::Free);
    }
    let v0 = lp.num_variables();
    for (xh, x) in trust_pairs(q) {
        let j = lp.add_variable(format!("v({},{})", xh + 1, x + 1), Domain::NonNegative);
        debug_assert_eq!(j, v0 + trust_constraint_index(q, xh, x));
    }
    (w0, v0)
}

fn add_dual_constraints<T: Scalar>(
    lp: &mut LinearProgram<T>,
    utility: &UtilityMatrix<T>,
    w0: usize,
    v0: usize,
) {
    let q = utility.q();
    let v = |xh: usize, x: usize| v0 + trust_constraint_index(q, xh, x);
    for x in 0..q {
        for xh in 0..q {
            if xh == x {
                // w(x) - sum_{x' != x} v(x, x') >= 0
                let mut terms = vec![(w0 + x, T::one())];
                terms.extend((0..q).filter(|&o| o != x).map(|o| (v(x, o), -T::one())));
                lp.add_constraint(format!("diag({})", x + 1), terms, Relation::Ge, T::zero());
            } else {
                // w(x) + v(xh, x) >= U(xh, x)
                lp.add_constraint(
                    format!("cross({},{})", xh + 1, x + 1),
                    vec![(w0 + x, T::one()), (v(xh, x), T::one())],
                    Relation::Ge,
                    utility.get(xh, x).clone(),
                );
            }
        }
    }
}

/// Minimize `sum w` subject to the dual feasibility rows of the trust program.
pub fn build_dual<T: Scalar>(utility: &UtilityMatrix<T>) -> LinearProgram<T> {
    let q = utility.q();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let (w0, v0) = add_dual_block(&mut lp, q);
    for x in 0..q {
        lp.set_objective(w0 + x, T::one());
    }
    add_dual_constraints(&mut lp, utility, w0, v0);
    lp
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InformativenessForm {
    /// Minimize `sum mu(x|x)` over feasible kernels with `V(mu)` pinned to the
    /// certified game value.
    #[default]
    TwoStage,
    /// Minimize `sum mu(x|x)` over primal-feasible `mu`, dual-feasible `(w, v)`
    /// and `sum w = V(mu)`.
    Joint,
}

/// `V(mu)` as sparse terms over the kernel variables.
fn value_terms<T: Scalar>(utility: &UtilityMatrix<T>) -> Vec<(usize, T)> {
    let q = utility.q();
    (0..q)
        .flat_map(|x| (0..q).map(move |xh| (xh, x)))
        .filter(|&(xh, x)| !utility.get(xh, x).is_zero())
        .map(|(xh, x)| (kernel_variable(q, xh, x), utility.get(xh, x).clone()))
        .collect()
}

/// Program whose optimum is the informativeness. `sgv` is only read by the
/// two-stage form.
pub fn build_informativeness<T: Scalar>(
    utility: &UtilityMatrix<T>,
    sgv: &T,
    form: InformativenessForm,
) -> LinearProgram<T> {
    let q = utility.q();
    let mut lp = LinearProgram::new(Sense::Minimize);
    add_kernel_block(&mut lp, utility, false);
    for x in 0..q {
        lp.set_objective(kernel_variable(q, x, x), T::one());
    }
    add_kernel_constraints(&mut lp, q);
    match form {
        InformativenessForm::TwoStage => {
            let terms = value_terms(utility);
            lp.add_constraint("value", terms, Relation::Eq, sgv.clone());
        }
        InformativenessForm::Joint => {
            let (w0, v0) = add_dual_block(&mut lp, q);
            add_dual_constraints(&mut lp, utility, w0, v0);
            let mut terms: Vec<(usize, T)> = (0..q).map(|x| (w0 + x, T::one())).collect();
            terms.extend(value_terms(utility).into_iter().map(|(j, c)| (j, -c)));
            lp.add_constraint("duality gap", terms, Relation::Eq, T::zero());
        }
    }
    lp
}

/// Reads `mu` out of the first `q*q` coordinates of a primal point.
pub fn kernel_from_primal<T: Scalar>(q: usize, x: &[T]) -> Result<RecoveryKernel<T>> {
    let table = Table::from_fn(q, |xh, src| x[kernel_variable(q, xh, src)].clone());
    RecoveryKernel::from_table(table)
}

/// Dual multipliers of the trust program.
#[derive(Clone, Debug, PartialEq)]
pub struct TrustDual<T> {
    /// `w(x)`, one per column-sum row.
    pub w: Vec<T>,
    /// `v[xh][x]` for `xh != x`; the diagonal is zero.
    pub v: Table<T>,
}

/// Certified solution of the trust program.
#[derive(Clone, Debug, PartialEq)]
pub struct LpCertificate<T> {
    pub status: LpStatus,
    pub kernel: RecoveryKernel<T>,
    pub dual: TrustDual<T>,
    pub objective: T,
    pub strong_duality_verified: bool,
    pub complementary_slackness_verified: bool,
    pub report: CertificationReport<T>,
}

/// Solves the trust program and certifies the result against [`build_dual`].
pub fn solve_trust_program<T: Scalar>(utility: &UtilityMatrix<T>) -> Result<LpCertificate<T>> {
    let q = utility.q();
    let primal = build_primal(utility);
    let dual = build_dual(utility);
    let solution = solve(&primal);
    if solution.status != LpStatus::Optimal {
        // the identity kernel is feasible and the region is bounded
        return Err(Error::CertificationFailure(format!(
            "trust program reported {:?}",
            solution.status
        )));
    }
    let report = certify(&solution, &primal, &dual)?;
    let kernel = kernel_from_primal(q, &solution.primal)?;
    let w = solution.dual[..q].to_vec();
    let mut v = Table::zeros(q);
    for (xh, x) in trust_pairs(q) {
        v.set(
            xh,
            x,
            solution.dual[q + trust_constraint_index(q, xh, x)].clone(),
        );
    }
    Ok(LpCertificate {
        status: solution.status,
        kernel,
        dual: TrustDual { w, v },
        objective: solution.objective,
        strong_duality_verified: true,
        complementary_slackness_verified: true,
        report,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InformativenessSolution<T> {
    pub value: T,
    pub kernel: RecoveryKernel<T>,
    pub form: InformativenessForm,
}

/// Solves the informativeness program for a certified game value `sgv`.
pub fn solve_informativeness<T: Scalar>(
    utility: &UtilityMatrix<T>,
    sgv: &T,
    form: InformativenessForm,
) -> Result<InformativenessSolution<T>> {
    let q = utility.q();
    let lp = build_informativeness(utility, sgv, form);
    let solution = solve(&lp);
    if solution.status != LpStatus::Optimal {
        return Err(Error::CertificationFailure(format!(
            "informativeness program reported {:?}; is {sgv} the certified game value?",
            solution.status
        )));
    }
    let kernel = kernel_from_primal(q, &solution.primal)?;
    Ok(InformativenessSolution {
        value: solution.objective,
        kernel,
        form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn u1() -> UtilityMatrix<Rational> {
        UtilityMatrix::new(vec![vec![r(0), r(1)], vec![r(-1), r(0)]]).unwrap()
    }

    fn zeros(q: usize) -> UtilityMatrix<Rational> {
        UtilityMatrix::new(vec![vec![r(0); q]; q]).unwrap()
    }

    #[test]
    fn primal_counts() {
        for (q, vars, eqs, trust) in [(2, 4, 2, 2), (3, 9, 3, 6)] {
            let lp = build_primal(&zeros(q));
            assert_eq!(lp.num_variables(), vars);
            let eq = lp
                .constraints
                .iter()
                .filter(|c| c.relation == Relation::Eq)
                .count();
            assert_eq!(eq, eqs);
            assert_eq!(lp.num_constraints() - eq, trust);
        }
    }

    #[test]
    fn opposed_pair_reduced_form() {
        // substituting mu(2|1) = 1 - r, mu(1|2) = 1 - s leaves max r - s with r >= 1 - s
        let lp = build_primal(&u1());
        let r_ = Rational::ratio(1, 3);
        let s_ = Rational::ratio(3, 4);
        let one = Rational::from_int(1);
        let mut x = vec![r(0); 4];
        x[kernel_variable(2, 0, 0)] = r_.clone();
        x[kernel_variable(2, 1, 0)] = one.clone() - r_.clone();
        x[kernel_variable(2, 0, 1)] = one.clone() - s_.clone();
        x[kernel_variable(2, 1, 1)] = s_.clone();
        // value is U(2,1)(1-r) + U(1,2)(1-s) = r - s
        assert_eq!(lp.objective_value(&x), r_.clone() - s_.clone());
        // trust rows hold iff r >= 1 - s (the other one is s >= 1 - r, same inequality)
        assert_eq!(lp.is_feasible(&x), r_ >= one - s_);
    }

    #[test]
    fn opposed_pair_optimum() {
        let cert = solve_trust_program(&u1()).unwrap();
        assert_eq!(cert.objective, r(1));
        assert_eq!(*cert.kernel.prob(0, 0), r(1));
        assert_eq!(*cert.kernel.prob(0, 1), r(1));
        let d = solve(&build_dual(&u1()));
        assert_eq!(d.objective, r(1));
    }

    #[test]
    fn printed_dual_matches_mechanical_dual() {
        let u = UtilityMatrix::new(vec![
            vec![r(0), r(2), r(-1), Rational::ratio(1, 2)],
            vec![r(-3), r(0), r(1), r(0)],
            vec![r(1), r(1), r(0), r(-2)],
            vec![r(0), r(-1), r(3), r(0)],
        ])
        .unwrap();
        let mechanical = build_primal(&u).dual();
        assert_eq!(build_dual(&u).structural_difference(&mechanical), None);
    }

    #[test]
    fn all_negative_dual_is_zero() {
        let u = UtilityMatrix::new(vec![
            vec![r(0), r(-1), r(-2)],
            vec![r(-1), r(0), r(-1)],
            vec![r(-3), r(-1), r(0)],
        ])
        .unwrap();
        let dual = build_dual(&u);
        let zero = vec![r(0); dual.num_variables()];
        assert!(dual.is_feasible(&zero));
        assert_eq!(solve(&dual).objective, r(0));
        let cert = solve_trust_program(&u).unwrap();
        assert_eq!(cert.objective, r(0));
        assert!(cert.dual.w.iter().all(|w| *w == r(0)));
    }

    #[test]
    fn single_symbol() {
        let u = zeros(1);
        assert_eq!(solve(&build_dual(&u)).objective, r(0));
        let cert = solve_trust_program(&u).unwrap();
        assert_eq!(cert.objective, r(0));
        let info = solve_informativeness(&u, &r(0), InformativenessForm::TwoStage).unwrap();
        assert_eq!(info.value, r(1));
    }

    #[test]
    fn informativeness_forms() {
        let sgv = solve_trust_program(&u1()).unwrap().objective;
        for form in [InformativenessForm::TwoStage, InformativenessForm::Joint] {
            let sol = solve_informativeness(&u1(), &sgv, form).unwrap();
            assert_eq!(sol.value, r(1));
            assert_eq!(*sol.kernel.prob(1, 1), r(0));
        }
        let q4 = UtilityMatrix::new(
            (0..4)
                .map(|i| (0..4).map(|j| if i == j { r(0) } else { r(-1) }).collect())
                .collect(),
        )
        .unwrap();
        let sol = solve_informativeness(&q4, &r(0), InformativenessForm::TwoStage).unwrap();
        assert_eq!(sol.value, r(4));
    }

    #[test]
    fn perturbed_dual_fails_certification() {
        let primal = build_primal(&u1());
        let dual = build_dual(&u1());
        let mut s = solve(&primal);
        certify(&s, &primal, &dual).unwrap();
        // raising w(1) keeps the dual feasible but breaks objective equality
        s.dual[0] = s.dual[0].clone() + r(1);
        match certify(&s, &primal, &dual) {
            Err(Error::CertificationFailure(msg)) => {
                assert!(msg.contains("objective equality"), "{msg}")
            }
            other => panic!("{other:?}"),
        }
    }
}
