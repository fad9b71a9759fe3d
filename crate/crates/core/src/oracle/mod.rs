//! Brute-force checks of the game value that share no code with the LP
//! solver: a grid search over sender strategies, which approaches the value
//! from below, and an exact maximization over the vertices of the trust
//! polytope.

mod polytope;

pub use polytope::{TrustPolytope, VERTEX_ENUMERATION_LIMIT};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{
    best_response_structure, induced_kernel, wceu, RecoveryKernel, SenderStrategy, Table,
    UtilityMatrix,
};
use crate::lp::solve_trust_program;
use crate::Rational;

/// Default cap on the number of grid strategies.
pub const DEFAULT_GRID_BUDGET: u128 = 2_000_000;

/// Deterministic best responses checked per grid witness.
const BEST_RESPONSE_CHECK_LIMIT: usize = 4096;

/// Sender strategies whose entries are multiples of `1/resolution`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub resolution: u32,
    pub budget: u128,
}

impl GridSpec {
    pub fn new(resolution: u32) -> Self {
        GridSpec {
            resolution,
            budget: DEFAULT_GRID_BUDGET,
        }
    }

    pub fn with_budget(self, budget: u128) -> Self {
        GridSpec { budget, ..self }
    }

    /// Number of grid strategies for alphabet size `q`, saturating.
    pub fn count(&self, q: usize) -> u128 {
        let per_column = binomial(self.resolution as u128 + q as u128 - 1, q as u128 - 1);
        (0..q).fold(1u128, |acc, _| acc.saturating_mul(per_column))
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All ways to write `n` as an ordered sum of `parts` nonnegative integers,
/// in lexicographic order.
fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub resolution: u32,
    pub best_wceu: Rational,
    /// Lexicographically first strategy attaining `best_wceu`.
    pub witness: SenderStrategy<Rational>,
    pub evaluated: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexResult {
    pub value: Rational,
    pub witness: RecoveryKernel<Rational>,
    pub vertex_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub lp_sgv: Rational,
    pub grids: Vec<GridResult>,
    /// `(resolution, lp_sgv - best_wceu)` per grid.
    pub gaps: Vec<(u32, Rational)>,
    /// `None` when `q` exceeds the vertex enumeration limit.
    pub vertex: Option<VertexResult>,
}

/// Best worst-case utility over all grid strategies.
pub fn grid_search_sgv(utility: &UtilityMatrix<Rational>, grid: GridSpec) -> Result<GridResult> {
    let q = utility.q();
    if grid.resolution == 0 {
        return Err(Error::invalid("grid resolution must be positive"));
    }
    let total = grid.count(q);
    if total > grid.budget {
        return Err(Error::ResourceLimit(format!(
            "grid with resolution {} has {total} strategies for q = {q}, budget is {}",
            grid.resolution, grid.budget
        )));
    }
    let columns = compositions(grid.resolution, q);
    let base = columns.len() as u128;
    let n = Rational::from_integer(grid.resolution.into());
    let strategy = |index: u128| -> SenderStrategy<Rational> {
        // column 0 is the most significant digit
        let mut digits = vec![0usize; q];
        let mut rest = index;
        for x in (0..q).rev() {
            digits[x] = (rest % base) as usize;
            rest /= base;
        }
        let table = Table::from_fn(q, |y, x| {
            Rational::from_integer(columns[digits[x]][y].into()) / &n
        });
        SenderStrategy::from_table(table).expect("grid columns are distributions")
    };
    let (best, index) = (0..total as u64)
        .into_par_iter()
        .map(|i| {
            let v = wceu(utility, &strategy(i as u128))
                .expect("sizes agree")
                .value;
            (v, i)
        })
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("grid is never empty");
    Ok(GridResult {
        resolution: grid.resolution,
        best_wceu: best,
        witness: strategy(index as u128),
        evaluated: total,
    })
}

/// Exact game value as the best vertex of the trust polytope.
pub fn vertex_enumeration_sgv(utility: &UtilityMatrix<Rational>) -> Result<VertexResult> {
    let polytope = TrustPolytope::cached(utility.q())?;
    let mut best: Option<(Rational, RecoveryKernel<Rational>)> = None;
    for z in polytope.vertices() {
        let kernel = polytope.kernel(z)?;
        let value = kernel.value(utility)?;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, kernel));
        }
    }
    let (value, witness) = best.expect("the identity kernel is a vertex");
    Ok(VertexResult {
        value,
        witness,
        vertex_count: polytope.vertices().len(),
    })
}

/// Every deterministic best response to `sender` must induce a trust-feasible kernel.
pub fn check_best_responses_trusted(sender: &SenderStrategy<Rational>) -> Result<usize> {
    let br = best_response_structure(sender);
    let responses = br.deterministic_responses::<Rational>();
    for sigma in responses.iter().take(BEST_RESPONSE_CHECK_LIMIT) {
        let mu = induced_kernel(sender, sigma)?;
        if let Err(v) = mu.validate(true) {
            return Err(Error::VerificationFailure(format!(
                "best response {:?} to {:?} induces an untrusted kernel: {v}",
                sigma.table(),
                sender.table()
            )));
        }
    }
    Ok(responses.len().min(BEST_RESPONSE_CHECK_LIMIT))
}

/// Runs both oracles against the LP value. Grid values must stay below it,
/// gaps must not grow from a grid to a finer grid containing it, and the
/// vertex maximum (for `q <= 4`) must equal it.
pub fn cross_check(utility: &UtilityMatrix<Rational>, grids: &[GridSpec]) -> Result<OracleReport> {
    let lp_sgv = if utility.q() == 1 {
        Rational::from_integer(0.into())
    } else {
        solve_trust_program(utility)?.objective
    };
    let mut results = Vec::with_capacity(grids.len());
    for spec in grids {
        let g = grid_search_sgv(utility, *spec)?;
        if g.best_wceu > lp_sgv {
            return Err(Error::VerificationFailure(format!(
                "grid strategy {:?} has worst case utility {} above the LP value {lp_sgv}",
                g.witness.table(),
                g.best_wceu
            )));
        }
        check_best_responses_trusted(&g.witness)?;
        results.push(g);
    }
    let gaps: Vec<(u32, Rational)> = results
        .iter()
        .map(|g| (g.resolution, &lp_sgv - &g.best_wceu))
        .collect();
    for (n1, g1) in &gaps {
        for (n2, g2) in &gaps {
            if n1 < n2 && n2 % n1 == 0 && g2 > g1 {
                return Err(Error::VerificationFailure(format!(
                    "gap grew from {g1} at resolution {n1} to {g2} at resolution {n2}"
                )));
            }
        }
    }
    let vertex = if utility.q() <= VERTEX_ENUMERATION_LIMIT {
        let v = vertex_enumeration_sgv(utility)?;
        if v.value != lp_sgv {
            return Err(Error::VerificationFailure(format!(
                "vertex enumeration found {} at {:?}, LP value is {lp_sgv}",
                v.value,
                v.witness.table()
            )));
        }
        Some(v)
    } else {
        None
    };
    Ok(OracleReport {
        lp_sgv,
        grids: results,
        gaps,
        vertex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

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

    #[test]
    fn counts_and_compositions() {
        assert_eq!(compositions(2, 3).len(), 6);
        assert_eq!(GridSpec::new(2).count(3), 216);
        assert_eq!(GridSpec::new(10).count(2), 121);
    }

    #[test]
    fn opposed_pair_grids() {
        let g = grid_search_sgv(&u1(), GridSpec::new(10)).unwrap();
        assert_eq!(g.best_wceu, r(9, 10));
        // signals are interchangeable, so the first witness uses signal 2 for symbol 1
        assert_eq!(*g.witness.prob(1, 0), r(1, 1));
        assert_eq!(*g.witness.prob(0, 1), r(1, 10));
        let g = grid_search_sgv(&u1(), GridSpec::new(100)).unwrap();
        assert_eq!(g.best_wceu, r(99, 100));
    }

    #[test]
    fn opposed_pair_gaps() {
        let specs: Vec<_> = [4, 8, 16].into_iter().map(GridSpec::new).collect();
        let rep = cross_check(&u1(), &specs).unwrap();
        let gaps: Vec<_> = rep.gaps.iter().map(|(_, g)| g.clone()).collect();
        assert_eq!(gaps, vec![r(1, 4), r(1, 8), r(1, 16)]);
        assert_eq!(rep.vertex.unwrap().value, r(1, 1));
    }

    #[test]
    fn signed_three_cycle_vertices() {
        let u2 = matrix(&[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]]);
        assert_eq!(vertex_enumeration_sgv(&u2).unwrap().value, r(3, 2));
        cross_check(&u2, &[GridSpec::new(4)]).unwrap();
    }

    #[test]
    fn misaligned() {
        let u = matrix(&[&[0, -1], &[-2, 0]]);
        let g = grid_search_sgv(&u, GridSpec::new(5)).unwrap();
        assert_eq!(g.best_wceu, r(0, 1));
        assert_eq!(vertex_enumeration_sgv(&u).unwrap().value, r(0, 1));
    }

    #[test]
    fn budget() {
        let spec = GridSpec::new(16).with_budget(10);
        assert!(matches!(
            grid_search_sgv(&u1(), spec),
            Err(Error::ResourceLimit(_))
        ));
    }
}
