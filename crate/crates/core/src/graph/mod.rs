//! Obfuscation and strong sender graphs of a utility matrix.
//!
//! The obfuscation graph has a directed edge `x -> x'` of weight `U(x', x)`
//! whenever that utility is nonnegative: the sender is willing to have `x`
//! read as `x'`. Stars, chains and cycles admit closed forms for the game
//! value and informativeness, which are used as independent checks on the LP.

mod cover;
mod matching;

pub use cover::{
    compare_settings, vertex_clique_cover, CliqueCover, SettingsComparison, CLIQUE_COVER_LIMIT,
};
pub use matching::{
    matching_branch_and_bound, matching_kernel, matching_path_dp, max_weight_matching, MatchedEdge,
    Matching, BRANCH_AND_BOUND_LIMIT,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::UtilityMatrix;
use crate::scalar::{half, sum, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub tail: usize,
    pub head: usize,
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObfuscationGraph<T> {
    q: usize,
    /// Sorted by `(tail, head)`.
    edges: Vec<Edge<T>>,
}

impl<T: Scalar> ObfuscationGraph<T> {
    pub fn from_utility(utility: &UtilityMatrix<T>) -> Self {
        let q = utility.q();
        let mut edges = Vec::new();
        for tail in 0..q {
            for head in 0..q {
                if tail != head && !utility.get(head, tail).is_strictly_negative() {
                    edges.push(Edge {
                        tail,
                        head,
                        weight: utility.get(head, tail).clone(),
                    });
                }
            }
        }
        ObfuscationGraph { q, edges }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, tail: usize, head: usize) -> Option<&Edge<T>> {
        self.edges
            .binary_search_by(|e| (e.tail, e.head).cmp(&(tail, head)))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.tail == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.head == v).count()
    }

    pub fn total_weight(&self) -> T {
        sum(self.edges.iter().map(|e| e.weight.clone()))
    }

    /// One `tail head weight` line per edge, vertices numbered from 1.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.tail + 1, e.head + 1, e.weight);
        }
        out
    }
}

/// Undirected graph joining `x` and `x'` when both cross utilities are nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongSenderGraph {
    q: usize,
    adjacent: Vec<Vec<bool>>,
}

impl StrongSenderGraph {
    pub fn from_utility<T: Scalar>(utility: &UtilityMatrix<T>) -> Self {
        let q = utility.q();
        let adjacent = (0..q)
            .map(|a| {
                (0..q)
                    .map(|b| {
                        a != b
                            && !utility.get(a, b).is_strictly_negative()
                            && !utility.get(b, a).is_strictly_negative()
                    })
                    .collect()
            })
            .collect();
        StrongSenderGraph { q, adjacent }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacent[a][b]
    }

    /// Edges `{a, b}` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.q)
            .flat_map(|a| (a + 1..self.q).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adjacent[a][b])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShapeTag {
    /// Every other vertex points at `center`.
    Star {
        center: usize,
    },
    /// Edges `order[i] -> order[i + 1]`.
    Chain {
        order: Vec<usize>,
    },
    /// Chain edges plus `order[q - 1] -> order[0]`.
    Cycle {
        order: Vec<usize>,
    },
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphShape<T> {
    pub tag: ShapeTag,
    /// Common weight when every edge has the same weight.
    pub uniform_weight: Option<T>,
}

impl<T> GraphShape<T> {
    pub fn name(&self) -> &'static str {
        match self.tag {
            ShapeTag::Star { .. } => "star",
            ShapeTag::Chain { .. } => "chain",
            ShapeTag::Cycle { .. } => "cycle",
            ShapeTag::Other => "other",
        }
    }
}

/// Classifies the graph up to relabeling. Stars are tested first, so a single
/// edge on two vertices is reported as a star.
pub fn detect_shape<T: Scalar>(g: &ObfuscationGraph<T>) -> GraphShape<T> {
    let uniform_weight = match g.edges.split_first() {
        Some((first, rest)) if rest.iter().all(|e| e.weight.approx_eq(&first.weight)) => {
            Some(first.weight.clone())
        }
        _ => None,
    };
    GraphShape {
        tag: classify(g),
        uniform_weight,
    }
}

fn classify<T: Scalar>(g: &ObfuscationGraph<T>) -> ShapeTag {
    let q = g.q;
    let m = g.edges.len();
    if q < 2 || m == 0 {
        return ShapeTag::Other;
    }
    if m == q - 1 {
        let head = g.edges[0].head;
        if g.edges.iter().all(|e| e.head == head) {
            return ShapeTag::Star { center: head };
        }
    }
    let mut next = vec![None; q];
    for e in &g.edges {
        if next[e.tail].is_some() {
            return ShapeTag::Other;
        }
        next[e.tail] = Some(e.head);
    }
    let indeg: Vec<usize> = (0..q).map(|v| g.in_degree(v)).collect();
    if indeg.iter().any(|&d| d > 1) {
        return ShapeTag::Other;
    }
    // out- and in-degrees are at most one, so following successors traces a path or cycle
    if m == q {
        let order = walk(0, &next, q);
        if order.len() == q && next[order[q - 1]] == Some(0) {
            return ShapeTag::Cycle { order };
        }
    } else if m == q - 1 {
        if let Some(start) = (0..q).find(|&v| indeg[v] == 0) {
            let order = walk(start, &next, q);
            if order.len() == q {
                return ShapeTag::Chain { order };
            }
        }
    }
    ShapeTag::Other
}

fn walk(start: usize, next: &[Option<usize>], limit: usize) -> Vec<usize> {
    let mut order = vec![start];
    let mut v = start;
    while let Some(n) = next[v] {
        if n == start || order.len() == limit {
            break;
        }
        order.push(n);
        v = n;
    }
    order
}

/// Edge weights `u_i` along a chain or cycle order.
fn path_weights<T: Scalar>(g: &ObfuscationGraph<T>, order: &[usize], cyclic: bool) -> Vec<T> {
    let n = order.len();
    let count = if cyclic { n } else { n - 1 };
    (0..count)
        .map(|i| {
            g.edge(order[i], order[(i + 1) % n])
                .map(|e| e.weight.clone())
                .unwrap_or_else(T::zero)
        })
        .collect()
}

/// Game value from the graph shape alone: the total edge weight for a star,
/// the best matching for a chain and `max(sum(u)/2, best matching)` for a cycle.
pub fn closed_form_sgv<T: Scalar>(shape: &GraphShape<T>, g: &ObfuscationGraph<T>) -> Result<T> {
    match &shape.tag {
        ShapeTag::Star { .. } => Ok(g.total_weight()),
        ShapeTag::Chain { order } => Ok(matching_path_dp(g, order, false).weight),
        ShapeTag::Cycle { order } => {
            let halfsum = sum(path_weights(g, order, true)) * half();
            let nu = matching_path_dp(g, order, true).weight;
            Ok(if nu > halfsum { nu } else { halfsum })
        }
        ShapeTag::Other => Err(Error::NotApplicable(
            "graph is not a star, chain or cycle".into(),
        )),
    }
}

/// Informativeness from the graph shape: 1 for a star, `q/2` for a uniform
/// cycle and `ceil(q/2)` for a uniform chain (positive weight).
pub fn closed_form_informativeness<T: Scalar>(
    shape: &GraphShape<T>,
    g: &ObfuscationGraph<T>,
) -> Result<T> {
    let q = g.q();
    let positive_uniform = shape
        .uniform_weight
        .as_ref()
        .is_some_and(|u| u.is_strictly_positive());
    match &shape.tag {
        ShapeTag::Star { .. } => Ok(T::one()),
        ShapeTag::Cycle { .. } if positive_uniform => Ok(T::ratio(q as i64, 2)),
        ShapeTag::Chain { .. } if positive_uniform => Ok(T::from_usize(q.div_ceil(2))),
        ShapeTag::Chain { .. } | ShapeTag::Cycle { .. } => Err(Error::NotApplicable(
            "closed form needs a uniform positive edge weight".into(),
        )),
        ShapeTag::Other => Err(Error::NotApplicable(
            "graph is not a star, chain or cycle".into(),
        )),
    }
}
