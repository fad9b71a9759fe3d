//! Game value, informativeness and near-optimal sender strategies.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{
    best_response_structure, wceu, ReceiverStrategy, RecoveryKernel, SenderStrategy, Table,
    UtilityMatrix,
};
use crate::lp::{solve_informativeness, solve_trust_program, InformativenessForm, LpCertificate};
use crate::scalar::{half, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumReport<T> {
    pub q: usize,
    pub sgv: T,
    pub informativeness: T,
    /// Optimal kernel of the informativeness program (hence of the trust program too).
    pub kernel: RecoveryKernel<T>,
    pub sender: SenderStrategy<T>,
    pub receiver: ReceiverStrategy<T>,
    /// Whether the witness sender already guarantees the game value.
    pub sgv_attained_exactly: bool,
    pub full_disclosure: bool,
    pub form: InformativenessForm,
    /// `None` only for `q = 1`, where nothing is solved.
    pub certificate: Option<LpCertificate<T>>,
}

pub fn solve_game<T: Scalar>(utility: &UtilityMatrix<T>) -> Result<EquilibriumReport<T>> {
    solve_game_with(utility, InformativenessForm::default())
}

pub fn solve_game_with<T: Scalar>(
    utility: &UtilityMatrix<T>,
    form: InformativenessForm,
) -> Result<EquilibriumReport<T>> {
    let q = utility.q();
    if q == 1 {
        return Ok(EquilibriumReport {
            q,
            sgv: T::zero(),
            informativeness: T::one(),
            kernel: RecoveryKernel::identity(1),
            sender: SenderStrategy::identity(1),
            receiver: ReceiverStrategy::identity(1),
            sgv_attained_exactly: true,
            full_disclosure: true,
            form,
            certificate: None,
        });
    }
    let certificate = solve_trust_program(utility)?;
    let sgv = certificate.objective.clone();
    let info = solve_informativeness(utility, &sgv, form)?;
    let kernel = info.kernel;
    let value = kernel.value(utility)?;
    if !value.approx_eq(&sgv) {
        return Err(Error::CertificationFailure(format!(
            "informativeness witness has value {value}, expected {sgv}"
        )));
    }
    let (sender, receiver) = kernel_to_strategies(&kernel)?;
    let attained = wceu(utility, &sender)?.value.approx_eq(&sgv);
    let full_disclosure = sgv.is_negligible() && info.value.approx_eq(&T::from_usize(q));
    Ok(EquilibriumReport {
        q,
        sgv,
        informativeness: info.value,
        kernel,
        sender,
        receiver,
        sgv_attained_exactly: attained,
        full_disclosure,
        form,
        certificate: Some(certificate),
    })
}

/// Realizes a trust-feasible kernel as a sender strategy and a deterministic
/// best response. Symbol `i` recovered with positive probability gets signal
/// `i`, sent with probability `mu(i|x)`; the decoder maps signal `i` back to `i`.
pub fn kernel_to_strategies<T: Scalar>(
    kernel: &RecoveryKernel<T>,
) -> Result<(SenderStrategy<T>, ReceiverStrategy<T>)> {
    if let Err(v) = kernel.validate(true) {
        return Err(Error::invalid(format!("kernel is not trust-feasible: {v}")));
    }
    let q = kernel.q();
    let recovered = kernel.recovered_symbols();
    let mut table = Table::zeros(q);
    for &i in &recovered {
        for x in 0..q {
            table.set(i, x, kernel.prob(i, x).clone());
        }
    }
    let sender = SenderStrategy::from_table(table)?;
    let mut choice = vec![None; q];
    for &i in &recovered {
        choice[i] = Some(i);
    }
    Ok((sender, ReceiverStrategy::deterministic(&choice)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsSesStep<T> {
    pub k: u64,
    pub sender: SenderStrategy<T>,
    /// `sgv - wceu(sender)`.
    pub epsilon: T,
    pub wceu: T,
    pub unique_br: bool,
}

/// Default perturbation size: half the smallest positive diagonal entry.
pub fn default_delta<T: Scalar>(kernel: &RecoveryKernel<T>) -> T {
    let mut smallest: Option<T> = None;
    for i in kernel.recovered_symbols() {
        let d = kernel.prob(i, i);
        if smallest.as_ref().is_none_or(|s| d < s) {
            smallest = Some(d.clone());
        }
    }
    smallest.unwrap_or_else(T::one) * half()
}

/// Sender strategies whose worst case utility tends to the game value.
///
/// Starting from the strategy realizing `optimal`, mass `delta/k` is moved
/// off every signal `i` on which source `x` ties with `i` and onto signal `x`,
/// which makes every best response unique. If the unperturbed strategy
/// already guarantees the value a single step with `epsilon = 0` is returned.
pub fn eps_ses_sequence<T: Scalar>(
    utility: &UtilityMatrix<T>,
    optimal: &RecoveryKernel<T>,
    ks: &[u64],
    delta: Option<T>,
) -> Result<Vec<EpsSesStep<T>>> {
    let q = utility.q();
    if optimal.q() != q {
        return Err(Error::invalid(format!(
            "kernel has size {}, utility has size {q}",
            optimal.q()
        )));
    }
    if ks.contains(&0) {
        return Err(Error::invalid("sequence indices must be positive"));
    }
    let sgv = solve_trust_program(utility)?.objective;
    let value = optimal.value(utility)?;
    if !value.approx_eq(&sgv) {
        return Err(Error::invalid(format!(
            "kernel is not optimal: value {value}, game value {sgv}"
        )));
    }
    let (base, _) = kernel_to_strategies(optimal)?;
    let base_wceu = wceu(utility, &base)?.value;
    if base_wceu.approx_eq(&value) {
        let unique_br = best_response_structure(&base).is_unique();
        return Ok(vec![EpsSesStep {
            k: ks.first().copied().unwrap_or(1),
            sender: base,
            epsilon: T::zero(),
            wceu: base_wceu,
            unique_br,
        }]);
    }

    let recovered = optimal.recovered_symbols();
    let min_diag = default_delta(optimal) * T::from_int(2);
    let delta = match delta {
        Some(d) => {
            if !d.is_strictly_positive() || d.definitely_gt(&min_diag) {
                return Err(Error::invalid(format!(
                    "delta must lie in (0, {min_diag}], got {d}"
                )));
            }
            d
        }
        None => default_delta(optimal),
    };
    // tied[x] = Z(x): recovered i != x with pi*(i|x) = pi*(i|i)
    let tied: Vec<Vec<usize>> = (0..q)
        .map(|x| {
            recovered
                .iter()
                .copied()
                .filter(|&i| i != x && base.prob(i, x).approx_eq(base.prob(i, i)))
                .collect()
        })
        .collect();

    ks.par_iter()
        .map(|&k| {
            let step = delta.clone() / T::from_int(k as i64);
            let mut table = base.table().clone();
            for (x, z) in tied.iter().enumerate() {
                if z.is_empty() {
                    continue;
                }
                for &i in z {
                    table.set(i, x, table.get(i, x).clone() - step.clone());
                }
                let bump = step.clone() * T::from_usize(z.len());
                table.set(x, x, table.get(x, x).clone() + bump);
            }
            let sender = SenderStrategy::from_table(table)?;
            let unique_br = best_response_structure(&sender).is_unique();
            if !unique_br {
                return Err(Error::VerificationFailure(format!(
                    "perturbed strategy at k = {k} has several best responses"
                )));
            }
            let w = wceu(utility, &sender)?.value;
            Ok(EpsSesStep {
                k,
                epsilon: sgv.clone() - w.clone(),
                sender,
                wceu: w,
                unique_br,
            })
        })
        .collect()
}

/// True when every off-diagonal utility is negative.
pub fn full_disclosure_check<T: Scalar>(utility: &UtilityMatrix<T>) -> bool {
    utility
        .off_diagonal()
        .all(|(xh, x)| utility.get(xh, x).is_strictly_negative())
}

#[derive(Clone, Debug, PartialEq)]
pub enum InfoBounds<T> {
    /// Some off-diagonal utility is zero.
    Inapplicable,
    Bounds {
        lower: T,
        upper: T,
    },
}

/// Bounds on informativeness from the game value: `q - sgv/u_min <= I <= q - sgv/u_max`,
/// where `u_min`, `u_max` range over the positive utilities.
pub fn sgv_info_bounds<T: Scalar>(utility: &UtilityMatrix<T>) -> Result<InfoBounds<T>> {
    if utility.q() == 1 {
        return Ok(sgv_info_bounds_with(utility, &T::zero()));
    }
    let sgv = solve_trust_program(utility)?.objective;
    Ok(sgv_info_bounds_with(utility, &sgv))
}

/// As [`sgv_info_bounds`] with a known game value.
pub fn sgv_info_bounds_with<T: Scalar>(utility: &UtilityMatrix<T>, sgv: &T) -> InfoBounds<T> {
    if utility
        .off_diagonal()
        .any(|(xh, x)| utility.get(xh, x).is_negligible())
    {
        return InfoBounds::Inapplicable;
    }
    let q = T::from_usize(utility.q());
    let positive: Vec<&T> = utility
        .off_diagonal()
        .map(|(xh, x)| utility.get(xh, x))
        .filter(|u| u.is_strictly_positive())
        .collect();
    if positive.is_empty() {
        return InfoBounds::Bounds {
            lower: q.clone(),
            upper: q,
        };
    }
    let mut lo = positive[0].clone();
    let mut hi = positive[0].clone();
    for u in &positive[1..] {
        if *u < &lo {
            lo = (*u).clone();
        }
        if *u > &hi {
            hi = (*u).clone();
        }
    }
    InfoBounds::Bounds {
        lower: q.clone() - sgv.clone() / lo,
        upper: q - sgv.clone() / hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::induced_kernel;
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn matrix(rows: &[&[i64]]) -> UtilityMatrix<Rational> {
        UtilityMatrix::new(
            rows.iter()
                .map(|row| row.iter().map(|&v| r(v, 1)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn u1() -> UtilityMatrix<Rational> {
        matrix(&[&[0, 1], &[-1, 0]])
    }

    fn u2() -> UtilityMatrix<Rational> {
        matrix(&[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]])
    }

    #[test]
    fn opposed_pair() {
        let rep = solve_game(&u1()).unwrap();
        assert_eq!(rep.sgv, r(1, 1));
        assert_eq!(rep.informativeness, r(1, 1));
        assert_eq!(*rep.kernel.prob(0, 0), r(1, 1));
        assert_eq!(*rep.kernel.prob(0, 1), r(1, 1));
        assert!(!rep.sgv_attained_exactly);
        assert!(!rep.full_disclosure);
        assert_eq!(*rep.sender.prob(0, 0), r(1, 1));
        assert_eq!(*rep.sender.prob(0, 1), r(1, 1));
        assert_eq!(*rep.receiver.prob(0, 0), r(1, 1));
    }

    #[test]
    fn signed_three_cycle() {
        let rep = solve_game(&u2()).unwrap();
        assert_eq!(rep.sgv, r(3, 2));
        assert_eq!(rep.informativeness, r(3, 2));
        let joint = solve_game_with(&u2(), InformativenessForm::Joint).unwrap();
        assert_eq!(joint.informativeness, r(3, 2));
        assert_eq!(
            sgv_info_bounds(&u2()).unwrap(),
            InfoBounds::Bounds {
                lower: r(3, 2),
                upper: r(3, 2)
            }
        );
    }

    #[test]
    fn misaligned_is_full_disclosure() {
        let u = matrix(&[&[0, -1, -2], &[-1, 0, -1], &[-3, -1, 0]]);
        let rep = solve_game(&u).unwrap();
        assert_eq!(rep.sgv, r(0, 1));
        assert_eq!(rep.informativeness, r(3, 1));
        assert!(rep.full_disclosure);
        assert!(full_disclosure_check(&u));
        assert_eq!(
            sgv_info_bounds(&u).unwrap(),
            InfoBounds::Bounds {
                lower: r(3, 1),
                upper: r(3, 1)
            }
        );
    }

    #[test]
    fn one_zero_entry_breaks_full_disclosure() {
        let u = matrix(&[&[0, 0, -2], &[-1, 0, -1], &[-3, -1, 0]]);
        assert!(!full_disclosure_check(&u));
        let rep = solve_game(&u).unwrap();
        assert!(rep.informativeness < r(3, 1));
        assert_eq!(sgv_info_bounds(&u).unwrap(), InfoBounds::Inapplicable);
    }

    #[test]
    fn single_symbol() {
        let rep = solve_game(&matrix(&[&[0]])).unwrap();
        assert_eq!((rep.sgv, rep.informativeness), (r(0, 1), r(1, 1)));
    }

    #[test]
    fn strategies_realize_kernel() {
        let rep = solve_game(&u2()).unwrap();
        assert_eq!(rep.sender.active_signals().len(), 3);
        let mu = induced_kernel(&rep.sender, &rep.receiver).unwrap();
        assert_eq!(mu, rep.kernel);
        assert!(best_response_structure(&rep.sender).contains(&rep.receiver));
        let id = kernel_to_strategies(&RecoveryKernel::<Rational>::identity(3)).unwrap();
        assert_eq!(id.0, SenderStrategy::identity(3));
        assert_eq!(id.1, ReceiverStrategy::identity(3));
        let bad =
            RecoveryKernel::new(vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]]).unwrap();
        assert!(matches!(
            kernel_to_strategies(&bad),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn opposed_pair_sequence() {
        let rep = solve_game(&u1()).unwrap();
        let steps = eps_ses_sequence(&u1(), &rep.kernel, &[1, 2, 4], Some(r(1, 10))).unwrap();
        for s in &steps {
            let k = s.k as i64;
            assert_eq!(*s.sender.prob(0, 1), r(1, 1) - r(1, 10 * k));
            assert_eq!(s.wceu, r(1, 1) - r(1, 10 * k));
            assert_eq!(s.epsilon, r(1, 10 * k));
            assert!(s.unique_br);
        }
        assert!(eps_ses_sequence(&u1(), &rep.kernel, &[1], Some(r(2, 1))).is_err());
        assert!(eps_ses_sequence(&u1(), &rep.kernel, &[0], None).is_err());
        let suboptimal = RecoveryKernel::identity(2);
        assert!(matches!(
            eps_ses_sequence(&u1(), &suboptimal, &[1], None),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn aligned_sequence_is_trivial() {
        let u = matrix(&[&[0, -1], &[-1, 0]]);
        let steps = eps_ses_sequence(&u, &RecoveryKernel::identity(2), &[1, 5], None).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].epsilon, r(0, 1));
    }

    #[test]
    fn signed_three_cycle_sequence_shrinks() {
        let rep = solve_game(&u2()).unwrap();
        let ks = [1, 2, 3, 10, 1000];
        let steps = eps_ses_sequence(&u2(), &rep.kernel, &ks, None).unwrap();
        assert_eq!(steps.len(), ks.len());
        for pair in steps.windows(2) {
            assert!(pair[1].epsilon < pair[0].epsilon);
        }
        assert!(steps
            .iter()
            .all(|s| s.epsilon > r(0, 1) && s.wceu <= rep.sgv));
    }
}
