//! Maximum weight matchings of the obfuscation graph.
//!
//! Direction is ignored for disjointness: a matching is a set of edges no two
//! of which share an endpoint. Of an antiparallel pair only the heavier edge
//! can help, so the search runs on that undirected collapse.

use crate::error::{Error, Result};
use crate::game::{RecoveryKernel, Table};
use crate::scalar::{sum, Scalar};

use super::{ObfuscationGraph, ShapeTag};

/// Largest `q` accepted by [`matching_branch_and_bound`].
pub const BRANCH_AND_BOUND_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct MatchedEdge<T> {
    pub tail: usize,
    pub head: usize,
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matching<T> {
    /// Sorted by tail.
    pub edges: Vec<MatchedEdge<T>>,
    pub weight: T,
}

impl<T: Scalar> Matching<T> {
    fn from_edges(mut edges: Vec<MatchedEdge<T>>) -> Self {
        edges.sort_by_key(|e| (e.tail, e.head));
        let weight = sum(edges.iter().map(|e| e.weight.clone()));
        Matching { edges, weight }
    }

    pub fn covers(&self, v: usize) -> bool {
        self.edges.iter().any(|e| e.tail == v || e.head == v)
    }

    /// True when no vertex is used twice.
    pub fn is_vertex_disjoint(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.edges
            .iter()
            .all(|e| seen.insert(e.tail) && seen.insert(e.head))
    }
}

/// Heavier direction between `a` and `b`, ignoring zero-weight edges.
fn best_direction<T: Scalar>(
    g: &ObfuscationGraph<T>,
    a: usize,
    b: usize,
) -> Option<MatchedEdge<T>> {
    let ab = g.edge(a, b);
    let ba = g.edge(b, a);
    let pick = match (ab, ba) {
        (Some(x), Some(y)) => {
            if y.weight.definitely_gt(&x.weight) {
                y
            } else {
                x
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return None,
    };
    pick.weight.is_strictly_positive().then(|| MatchedEdge {
        tail: pick.tail,
        head: pick.head,
        weight: pick.weight.clone(),
    })
}

/// Exact maximum weight matching. Chains and cycles use the linear dynamic
/// program, everything else branch and bound.
pub fn max_weight_matching<T: Scalar>(g: &ObfuscationGraph<T>) -> Result<Matching<T>> {
    match super::classify(g) {
        ShapeTag::Chain { order } => Ok(matching_path_dp(g, &order, false)),
        ShapeTag::Cycle { order } => Ok(matching_path_dp(g, &order, true)),
        _ => matching_branch_and_bound(g),
    }
}

/// Exhaustive search over vertices: the lowest free vertex is either left
/// unmatched or paired with a later free neighbor. Pruned by the bound
/// `current + sum of heaviest incident weights over free vertices / 2`.
pub fn matching_branch_and_bound<T: Scalar>(g: &ObfuscationGraph<T>) -> Result<Matching<T>> {
    let q = g.q();
    if q > BRANCH_AND_BOUND_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "exact matching search is limited to {BRANCH_AND_BOUND_LIMIT} vertices, got {q}"
        )));
    }
    let mut adj: Vec<Vec<MatchedEdge<T>>> = vec![Vec::new(); q];
    for a in 0..q {
        for b in a + 1..q {
            if let Some(e) = best_direction(g, a, b) {
                adj[a].push(e.clone());
                adj[b].push(e);
            }
        }
    }
    let heaviest: Vec<T> = adj
        .iter()
        .map(|es| {
            es.iter()
                .map(|e| e.weight.clone())
                .fold(T::zero(), |m, w| if w > m { w } else { m })
        })
        .collect();

    struct Search<'a, T> {
        adj: &'a [Vec<MatchedEdge<T>>],
        heaviest: &'a [T],
        used: Vec<bool>,
        chosen: Vec<MatchedEdge<T>>,
        best: Vec<MatchedEdge<T>>,
        best_weight: T,
    }

    impl<T: Scalar> Search<'_, T> {
        fn run(&mut self, from: usize, current: T) {
            let Some(v) = (from..self.used.len()).find(|&v| !self.used[v]) else {
                if current.definitely_gt(&self.best_weight) {
                    self.best_weight = current;
                    self.best = self.chosen.clone();
                }
                return;
            };
            let slack = crate::scalar::sum(
                (v..self.used.len())
                    .filter(|&u| !self.used[u])
                    .map(|u| self.heaviest[u].clone()),
            ) * crate::scalar::half();
            if !(current.clone() + slack).definitely_gt(&self.best_weight) {
                return;
            }
            self.used[v] = true;
            for e in &self.adj[v] {
                let other = if e.tail == v { e.head } else { e.tail };
                if other < v || self.used[other] {
                    continue;
                }
                self.used[other] = true;
                self.chosen.push(e.clone());
                self.run(v + 1, current.clone() + e.weight.clone());
                self.chosen.pop();
                self.used[other] = false;
            }
            self.run(v + 1, current);
            self.used[v] = false;
        }
    }

    let mut search = Search {
        adj: &adj,
        heaviest: &heaviest,
        used: vec![false; q],
        chosen: Vec::new(),
        best: Vec::new(),
        best_weight: T::zero(),
    };
    search.run(0, T::zero());
    Ok(Matching::from_edges(search.best))
}

/// Maximum weight matching along `order`, using the edges between consecutive
/// vertices (and between the last and first when `cyclic`).
pub fn matching_path_dp<T: Scalar>(
    g: &ObfuscationGraph<T>,
    order: &[usize],
    cyclic: bool,
) -> Matching<T> {
    let n = order.len();
    if n < 2 {
        return Matching::from_edges(Vec::new());
    }
    let count = if cyclic { n } else { n - 1 };
    let edges: Vec<Option<MatchedEdge<T>>> = (0..count)
        .map(|i| best_direction(g, order[i], order[(i + 1) % n]))
        .collect();
    if !cyclic {
        return Matching::from_edges(path_dp(&edges));
    }
    // either the closing edge is unused, or it is used and its two neighbors are not
    let without = path_dp(&edges[..count - 1]);
    let mut with = match &edges[count - 1] {
        Some(e) if count >= 3 => {
            let mut m = path_dp(&edges[1..count - 2]);
            m.push(e.clone());
            m
        }
        Some(e) => vec![e.clone()],
        None => Vec::new(),
    };
    let w_without = sum(without.iter().map(|e| e.weight.clone()));
    let w_with = sum(with.iter().map(|e| e.weight.clone()));
    if !w_with.definitely_gt(&w_without) {
        with = without;
    }
    Matching::from_edges(with)
}

/// Consecutive edges share a vertex; picks a maximum weight independent subset.
fn path_dp<T: Scalar>(edges: &[Option<MatchedEdge<T>>]) -> Vec<MatchedEdge<T>> {
    let m = edges.len();
    let weight = |i: usize| edges[i].as_ref().map_or_else(T::zero, |e| e.weight.clone());
    // best[i] = best over the first i edges
    let mut best = vec![T::zero(); m + 1];
    for i in 0..m {
        let skip = best[i].clone();
        let take = weight(i)
            + if i >= 1 {
                best[i - 1].clone()
            } else {
                T::zero()
            };
        best[i + 1] = if take.definitely_gt(&skip) {
            take
        } else {
            skip
        };
    }
    let mut out = Vec::new();
    let mut i = m;
    while i > 0 {
        if best[i].approx_eq(&best[i - 1]) {
            i -= 1;
        } else {
            out.push(edges[i - 1].clone().expect("taken edge exists"));
            i = i.saturating_sub(2);
        }
    }
    out
}

/// Kernel sending `tail` to `head` for every matched edge; every head and
/// every uncovered vertex is recovered as itself. Trust-feasible with value
/// equal to the matching weight.
pub fn matching_kernel<T: Scalar>(q: usize, matching: &Matching<T>) -> Result<RecoveryKernel<T>> {
    let mut table = Table::identity(q);
    for e in &matching.edges {
        table.set(e.tail, e.tail, T::zero());
        table.set(e.head, e.tail, T::one());
    }
    RecoveryKernel::from_table(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::UtilityMatrix;
    use crate::graph::detect_shape;
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn with_edges(q: usize, edges: &[(usize, usize, i64)]) -> ObfuscationGraph<Rational> {
        let mut rows = vec![vec![r(-1, 1); q]; q];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = r(0, 1);
        }
        for &(t, h, w) in edges {
            rows[h][t] = r(w, 1);
        }
        ObfuscationGraph::from_utility(&UtilityMatrix::new(rows).unwrap())
    }

    fn cycle(q: usize) -> ObfuscationGraph<Rational> {
        let edges: Vec<_> = (0..q).map(|i| (i, (i + 1) % q, 1)).collect();
        with_edges(q, &edges)
    }

    #[test]
    fn small_cycles_and_chains() {
        assert_eq!(max_weight_matching(&cycle(3)).unwrap().weight, r(1, 1));
        assert_eq!(max_weight_matching(&cycle(6)).unwrap().weight, r(3, 1));
        let chain = with_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        assert_eq!(max_weight_matching(&chain).unwrap().weight, r(2, 1));
        let empty = with_edges(4, &[]);
        let m = max_weight_matching(&empty).unwrap();
        assert!(m.edges.is_empty() && m.weight == r(0, 1));
    }

    #[test]
    fn antiparallel_pair_uses_heavier_direction() {
        let g = with_edges(2, &[(0, 1, 1), (1, 0, 3)]);
        let m = matching_branch_and_bound(&g).unwrap();
        assert_eq!(m.weight, r(3, 1));
        assert_eq!((m.edges[0].tail, m.edges[0].head), (1, 0));
    }

    #[test]
    fn dp_matches_search_on_weighted_cycle() {
        let g = with_edges(5, &[(0, 1, 5), (1, 2, 1), (2, 3, 1), (3, 4, 5), (4, 0, 4)]);
        let ShapeTag::Cycle { order } = detect_shape(&g).tag else {
            panic!()
        };
        let dp = matching_path_dp(&g, &order, true);
        let bb = matching_branch_and_bound(&g).unwrap();
        assert_eq!(dp.weight, bb.weight);
        assert_eq!(dp.weight, r(10, 1));
        assert!(dp.is_vertex_disjoint());
    }

    #[test]
    fn kernel_from_matching() {
        let g = with_edges(4, &[(0, 1, 2), (2, 3, 3), (1, 2, 9)]);
        let m = matching_branch_and_bound(&g).unwrap();
        assert_eq!(m.weight, r(9, 1));
        let mu = matching_kernel(4, &m).unwrap();
        assert!(mu.is_trust_feasible());
        assert_eq!(*mu.prob(2, 1), r(1, 1));
        assert_eq!(*mu.prob(0, 0), r(1, 1));
    }

    #[test]
    fn size_limit() {
        let g = with_edges(21, &[(0, 1, 1), (2, 3, 1)]);
        assert!(matches!(
            matching_branch_and_bound(&g),
            Err(Error::ResourceLimit(_))
        ));
        let chain: Vec<_> = (0..29).map(|i| (i, i + 1, 1)).collect();
        assert_eq!(
            max_weight_matching(&with_edges(30, &chain)).unwrap().weight,
            r(15, 1)
        );
    }
}
