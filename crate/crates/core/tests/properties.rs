use proptest::prelude::*;

use trustlp::equilibrium::{kernel_to_strategies, solve_game, solve_game_with};
use trustlp::game::{
    bceu, best_response_structure, expected_utility, induced_kernel, recovery_value, wceu,
    ReceiverStrategy, SenderStrategy, Table, UtilityMatrix,
};
use trustlp::graph::{
    matching_branch_and_bound, matching_path_dp, max_weight_matching, ObfuscationGraph,
};
use trustlp::lp::{build_dual, solve, solve_trust_program, InformativenessForm, LpStatus};
use trustlp::sample;
use trustlp::{Rational, Scalar};

fn entry() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn utility(max_q: usize) -> impl Strategy<Value = UtilityMatrix<Rational>> {
    (2..=max_q).prop_flat_map(|q| {
        prop::collection::vec(entry(), q * q).prop_map(move |v| {
            let rows = (0..q)
                .map(|i| {
                    (0..q)
                        .map(|j| {
                            if i == j {
                                Rational::ratio(0, 1)
                            } else {
                                v[i * q + j].clone()
                            }
                        })
                        .collect()
                })
                .collect();
            UtilityMatrix::new(rows).unwrap()
        })
    })
}

/// Column-stochastic table from nonnegative integer weights; a zero column becomes a point mass.
fn stochastic(q: usize, weights: &[u8]) -> Table<Rational> {
    let mut t = Table::zeros(q);
    for x in 0..q {
        let col: Vec<i64> = (0..q).map(|y| weights[y * q + x] as i64).collect();
        let total: i64 = col.iter().sum();
        for y in 0..q {
            let v = if total == 0 {
                Rational::ratio((y == x) as i64, 1)
            } else {
                Rational::ratio(col[y], total)
            };
            t.set(y, x, v);
        }
    }
    t
}

fn sender(max_q: usize) -> impl Strategy<Value = SenderStrategy<Rational>> {
    (2..=max_q).prop_flat_map(|q| {
        prop::collection::vec(0u8..4, q * q)
            .prop_map(move |w| SenderStrategy::from_table(stochastic(q, &w)).unwrap())
    })
}

fn game_with_sender(
    max_q: usize,
) -> impl Strategy<Value = (UtilityMatrix<Rational>, SenderStrategy<Rational>)> {
    (2..=max_q).prop_flat_map(|q| {
        (
            prop::collection::vec(entry(), q * q),
            prop::collection::vec(0u8..4, q * q),
        )
            .prop_map(move |(v, w)| {
                let rows = (0..q)
                    .map(|i| {
                        (0..q)
                            .map(|j| {
                                if i == j {
                                    Rational::ratio(0, 1)
                                } else {
                                    v[i * q + j].clone()
                                }
                            })
                            .collect()
                    })
                    .collect();
                (
                    UtilityMatrix::new(rows).unwrap(),
                    SenderStrategy::from_table(stochastic(q, &w)).unwrap(),
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn best_responses_induce_trusted_kernels(pi in sender(5), picks in prop::collection::vec(0usize..16, 5)) {
        let br = best_response_structure(&pi);
        let sigma: ReceiverStrategy<Rational> = br.select(|y, m| m[picks[y] % m.len()]);
        prop_assert!(br.contains(&sigma));
        prop_assert!(induced_kernel(&pi, &sigma).unwrap().is_trust_feasible());
    }

    #[test]
    fn best_responses_share_recovery_value(pi in sender(4)) {
        let br = best_response_structure(&pi);
        let all = br.deterministic_responses::<Rational>();
        let first = recovery_value(&pi, &all[0]).unwrap();
        for sigma in &all[1..] {
            prop_assert_eq!(recovery_value(&pi, sigma).unwrap(), first.clone());
        }
    }

    #[test]
    fn expected_utility_between_worst_and_best((u, pi) in game_with_sender(4)) {
        let lo = wceu(&u, &pi).unwrap().value;
        let hi = bceu(&u, &pi).unwrap().value;
        prop_assert!(lo <= hi);
        for sigma in best_response_structure(&pi).deterministic_responses::<Rational>() {
            let v = expected_utility(&u, &pi, &sigma).unwrap();
            prop_assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn best_case_utility_never_exceeds_value((u, pi) in game_with_sender(4)) {
        let sgv = solve_trust_program(&u).unwrap().objective;
        prop_assert!(bceu(&u, &pi).unwrap().value <= sgv);
    }

    #[test]
    fn strong_duality(u in utility(6)) {
        let cert = solve_trust_program(&u).unwrap();
        let dual = solve(&build_dual(&u));
        prop_assert_eq!(dual.status, LpStatus::Optimal);
        prop_assert_eq!(dual.objective, cert.objective.clone());
        prop_assert_eq!(cert.kernel.value(&u).unwrap(), cert.objective);
        prop_assert!(cert.kernel.is_trust_feasible());
    }

    #[test]
    fn no_mass_on_negative_utilities(u in utility(5)) {
        let rep = solve_game(&u).unwrap();
        for (xh, x) in u.off_diagonal() {
            if u.get(xh, x).is_strictly_negative() {
                prop_assert!(rep.kernel.prob(xh, x).is_negligible());
            }
        }
    }

    #[test]
    fn joint_and_two_stage_agree(u in utility(4)) {
        let a = solve_game_with(&u, InformativenessForm::TwoStage).unwrap();
        let b = solve_game_with(&u, InformativenessForm::Joint).unwrap();
        prop_assert_eq!(a.informativeness, b.informativeness);
        prop_assert_eq!(a.sgv, b.sgv);
    }

    #[test]
    fn optimal_kernel_realized_by_best_response(u in utility(5)) {
        let rep = solve_game(&u).unwrap();
        let (pi, sigma) = kernel_to_strategies(&rep.kernel).unwrap();
        prop_assert!(best_response_structure(&pi).contains(&sigma));
        prop_assert_eq!(induced_kernel(&pi, &sigma).unwrap(), rep.kernel.clone());
        prop_assert_eq!(bceu(&u, &pi).unwrap().value, rep.sgv.clone());
        prop_assert!(rep.informativeness >= Rational::ratio(1, 1));
        prop_assert!(rep.informativeness <= Rational::ratio(u.q() as i64, 1));
    }

    #[test]
    fn path_dp_matches_search(q in 2usize..=12, cyclic in any::<bool>(), w in prop::collection::vec((0i64..6, any::<bool>()), 12)) {
        let cyclic = cyclic && q >= 3;
        let count = if cyclic { q } else { q - 1 };
        let edges: Vec<(usize, usize, Rational)> = (0..count)
            .map(|i| {
                let (a, b) = if w[i].1 { (i, (i + 1) % q) } else { ((i + 1) % q, i) };
                (a, b, Rational::ratio(w[i].0 + 1, 1))
            })
            .collect();
        let u = sample::utility_with_edges(q, &edges, Rational::ratio(-1, 1));
        let g = ObfuscationGraph::from_utility(&u);
        let order: Vec<usize> = (0..q).collect();
        let dp = matching_path_dp(&g, &order, cyclic);
        let bb = matching_branch_and_bound(&g).unwrap();
        prop_assert!(dp.is_vertex_disjoint());
        prop_assert_eq!(dp.weight.clone(), bb.weight);
        prop_assert_eq!(max_weight_matching(&g).unwrap().weight, dp.weight);
    }
}
