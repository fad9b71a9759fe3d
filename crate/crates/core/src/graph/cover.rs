//! Vertex clique covers of the strong sender graph.

use std::cmp::Ordering;

use crate::equilibrium::solve_game;
use crate::error::{Error, Result};
use crate::game::UtilityMatrix;
use crate::scalar::Scalar;

use super::StrongSenderGraph;

/// Largest `q` accepted by [`vertex_clique_cover`].
pub const CLIQUE_COVER_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCover {
    /// Each clique lists its vertices in increasing order.
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueCover {
    /// The vertex clique cover number.
    pub fn size(&self) -> usize {
        self.cliques.len()
    }
}

/// Minimum partition of the vertices into cliques (equivalently a minimum
/// coloring of the complement), by backtracking.
pub fn vertex_clique_cover(g: &StrongSenderGraph) -> Result<CliqueCover> {
    let q = g.q();
    if q > CLIQUE_COVER_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "exact clique cover is limited to {CLIQUE_COVER_LIMIT} vertices, got {q}"
        )));
    }
    let mut best: Vec<Vec<usize>> = (0..q).map(|v| vec![v]).collect();
    let mut current: Vec<Vec<usize>> = Vec::new();
    place(g, 0, &mut current, &mut best);
    Ok(CliqueCover { cliques: best })
}

fn place(
    g: &StrongSenderGraph,
    v: usize,
    current: &mut Vec<Vec<usize>>,
    best: &mut Vec<Vec<usize>>,
) {
    if current.len() >= best.len() {
        return;
    }
    if v == g.q() {
        *best = current.clone();
        return;
    }
    for i in 0..current.len() {
        if current[i].iter().all(|&u| g.is_adjacent(u, v)) {
            current[i].push(v);
            place(g, v + 1, current, best);
            current[i].pop();
        }
    }
    current.push(vec![v]);
    place(g, v + 1, current, best);
    current.pop();
}

/// Informativeness with randomized strategies next to the clique cover number
/// that governs the deterministic setting.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingsComparison<T> {
    pub behavioral: T,
    pub deterministic: usize,
    pub cover: CliqueCover,
    /// `behavioral` compared with `deterministic`.
    pub ordering: Ordering,
}

pub fn compare_settings<T: Scalar>(utility: &UtilityMatrix<T>) -> Result<SettingsComparison<T>> {
    let cover = vertex_clique_cover(&StrongSenderGraph::from_utility(utility))?;
    let behavioral = solve_game(utility)?.informativeness;
    let det = T::from_usize(cover.size());
    let ordering = if behavioral.approx_eq(&det) {
        Ordering::Equal
    } else if behavioral < det {
        Ordering::Less
    } else {
        Ordering::Greater
    };
    Ok(SettingsComparison {
        behavioral,
        deterministic: cover.size(),
        cover,
        ordering,
    })
}
