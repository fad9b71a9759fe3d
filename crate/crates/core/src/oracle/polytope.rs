//! Vertices of the trust polytope, computed without any pivoting code.
//!
//! Coordinates are the off-diagonal kernel entries `z(xh, x) = mu(xh|x)`;
//! the diagonal is implied by the column sums. The polytope is
//!
//! ```text
//! z >= 0
//! sum_{xh != x} z(xh, x) <= 1                    (mu(x|x) >= 0)
//! z(xh, x) + sum_{y != xh} z(y, xh) <= 1          (mu(xh|xh) >= mu(xh|x))
//! ```
//!
//! It depends only on `q`, so one enumeration serves every utility matrix.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{RecoveryKernel, Table};
use crate::Rational;

/// Largest alphabet for which vertices are enumerated.
pub const VERTEX_ENUMERATION_LIMIT: usize = 4;

/// Up to this size every choice of `d` tight rows is tried.
const BASIS_SELECTION_LIMIT: usize = 3;

#[derive(Clone, Debug)]
pub struct TrustPolytope {
    q: usize,
    /// Rows `(a, b)` of `a . z <= b`.
    rows: Vec<(Vec<Rational>, Rational)>,
    vertices: Vec<Vec<Rational>>,
}

fn coordinate(q: usize, recovered: usize, source: usize) -> usize {
    debug_assert_ne!(recovered, source);
    source * (q - 1)
        + if recovered < source {
            recovered
        } else {
            recovered - 1
        }
}

fn inequalities(q: usize) -> Vec<(Vec<Rational>, Rational)> {
    let d = q * (q - 1);
    let mut rows = Vec::with_capacity(2 * d + q);
    for j in 0..d {
        let mut a = vec![Rational::zero(); d];
        a[j] = -Rational::one();
        rows.push((a, Rational::zero()));
    }
    for x in 0..q {
        let mut a = vec![Rational::zero(); d];
        for xh in (0..q).filter(|&xh| xh != x) {
            a[coordinate(q, xh, x)] = Rational::one();
        }
        rows.push((a, Rational::one()));
    }
    for xh in 0..q {
        for x in (0..q).filter(|&x| x != xh) {
            let mut a = vec![Rational::zero(); d];
            a[coordinate(q, xh, x)] = Rational::one();
            for y in (0..q).filter(|&y| y != xh) {
                a[coordinate(q, y, xh)] += Rational::one();
            }
            rows.push((a, Rational::one()));
        }
    }
    rows
}

impl TrustPolytope {
    /// Enumerates the vertices for alphabet size `q` (at most 4).
    pub fn new(q: usize) -> Result<Self> {
        check_size(q)?;
        let rows = inequalities(q);
        let vertices = if q == 1 {
            vec![Vec::new()]
        } else if q <= BASIS_SELECTION_LIMIT {
            basis_selection(&rows, q * (q - 1))
        } else {
            double_description(&rows, q * (q - 1))
        };
        Ok(TrustPolytope { q, rows, vertices })
    }

    /// Shared instance per alphabet size.
    pub fn cached(q: usize) -> Result<&'static TrustPolytope> {
        static CACHE: [OnceLock<std::result::Result<TrustPolytope, Error>>;
            VERTEX_ENUMERATION_LIMIT + 1] =
            [const { OnceLock::new() }; VERTEX_ENUMERATION_LIMIT + 1];
        check_size(q)?;
        CACHE[q]
            .get_or_init(|| TrustPolytope::new(q))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Vertices in reduced coordinates, sorted.
    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn contains(&self, z: &[Rational]) -> bool {
        self.rows.iter().all(|(a, b)| dot(a, z) <= *b)
    }

    /// Full kernel for a point in reduced coordinates.
    pub fn kernel(&self, z: &[Rational]) -> Result<RecoveryKernel<Rational>> {
        let q = self.q;
        let mut table = Table::zeros(q);
        for x in 0..q {
            let mut diag = Rational::one();
            for xh in (0..q).filter(|&xh| xh != x) {
                let v = z[coordinate(q, xh, x)].clone();
                diag -= &v;
                table.set(xh, x, v);
            }
            table.set(x, x, diag);
        }
        RecoveryKernel::from_table(table)
    }
}

fn check_size(q: usize) -> Result<()> {
    if q == 0 || q > VERTEX_ENUMERATION_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "vertex enumeration supports 1 <= q <= {VERTEX_ENUMERATION_LIMIT}, got {q}"
        )));
    }
    Ok(())
}

fn dot(a: &[Rational], z: &[Rational]) -> Rational {
    a.iter()
        .zip(z)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Solves the square system `m z = rhs`; `None` when singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for c in col..n {
            m[col][c] *= &inv;
        }
        rhs[col] *= &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
                let delta = &f * &rhs[col];
                rhs[r] -= delta;
            }
        }
    }
    Some(rhs)
}

/// Tries every set of `d` rows as the tight set of a vertex.
fn basis_selection(rows: &[(Vec<Rational>, Rational)], d: usize) -> Vec<Vec<Rational>> {
    let mut found = BTreeSet::new();
    let mut pick: Vec<usize> = (0..d).collect();
    loop {
        let m = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs = pick.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(z) = solve_square(m, rhs) {
            if rows.iter().all(|(a, b)| dot(a, &z) <= *b) {
                found.insert(z);
            }
        }
        // next combination in lexicographic order
        let n = rows.len();
        let Some(i) = (0..d).rev().find(|&i| pick[i] < n - d + i) else {
            break;
        };
        pick[i] += 1;
        for j in i + 1..d {
            pick[j] = pick[j - 1] + 1;
        }
    }
    found.into_iter().collect()
}

/// Double description on the homogenized cone `{(t, z) : t >= 0, b t - a z >= 0}`.
/// The polytope is bounded, so every extreme ray has `t > 0` and scales to a vertex.
fn double_description(rows: &[(Vec<Rational>, Rational)], d: usize) -> Vec<Vec<Rational>> {
    let dim = d + 1;
    // cone constraints h . (t, z) >= 0; the first d rows are z >= 0
    let mut cone: Vec<Vec<Rational>> = Vec::with_capacity(rows.len() + 1);
    let mut t_row = vec![Rational::zero(); dim];
    t_row[0] = Rational::one();
    cone.push(t_row);
    for (a, b) in rows {
        let mut h = Vec::with_capacity(dim);
        h.push(b.clone());
        h.extend(a.iter().map(|v| -v));
        cone.push(h);
    }
    assert!(cone.len() <= 64, "zero sets are stored as u64 masks");

    // the first dim constraints (t >= 0, z >= 0) describe the orthant
    struct Ray {
        v: Vec<Rational>,
        zeros: u64,
    }
    let mut rays: Vec<Ray> = (0..dim)
        .map(|i| {
            let mut v = vec![Rational::zero(); dim];
            v[i] = Rational::one();
            Ray {
                v,
                zeros: ((1u64 << dim) - 1) & !(1u64 << i),
            }
        })
        .collect();

    for (k, h) in cone.iter().enumerate().skip(dim) {
        let bit = 1u64 << k;
        let values: Vec<Rational> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&i| values[i].is_positive())
            .collect();
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&i| values[i].is_negative())
            .collect();
        let mut next: Vec<Ray> = Vec::new();
        for p in &pos {
            for n in &neg {
                let common = rays[*p].zeros & rays[*n].zeros;
                if (common.count_ones() as usize) < dim - 2 {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == *p || i == *n || r.zeros & common != common);
                if !adjacent {
                    continue;
                }
                let v: Vec<Rational> = rays[*n]
                    .v
                    .iter()
                    .zip(&rays[*p].v)
                    .map(|(vn, vp)| &values[*p] * vn - &values[*n] * vp)
                    .collect();
                next.push(Ray {
                    v: normalize(v),
                    zeros: common | bit,
                });
            }
        }
        for (i, r) in rays.into_iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            let zeros = if values[i].is_zero() {
                r.zeros | bit
            } else {
                r.zeros
            };
            next.push(Ray { v: r.v, zeros });
        }
        rays = next;
    }

    let vertices: BTreeSet<Vec<Rational>> = rays
        .into_iter()
        .map(|r| {
            let t = r.v[0].clone();
            assert!(
                t.is_positive(),
                "bounded polytope has no recession direction"
            );
            r.v[1..].iter().map(|c| c / &t).collect()
        })
        .collect();
    vertices.into_iter().collect()
}

/// Scales a ray so its largest entry in absolute value is one.
fn normalize(v: Vec<Rational>) -> Vec<Rational> {
    let scale = v
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Rational::one);
    if scale.is_zero() {
        return v;
    }
    v.into_iter().map(|c| c / &scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_symbols() {
        let p = TrustPolytope::new(2).unwrap();
        // z = (mu(2|1), mu(1|2)) with z1 + z2 <= 1
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(p.vertices().len(), 3);
        assert!(p.vertices().iter().all(|v| p.contains(v)));
        assert!(!p.contains(&[half.clone() + Rational::one(), Rational::zero()]));
    }

    #[test]
    fn double_description_matches_basis_selection() {
        for q in 2..=3 {
            let rows = inequalities(q);
            let d = q * (q - 1);
            assert_eq!(
                basis_selection(&rows, d),
                double_description(&rows, d),
                "q = {q}"
            );
        }
    }

    /// Rank of the rows tight at `z`.
    fn tight_rank(rows: &[(Vec<Rational>, Rational)], z: &[Rational]) -> usize {
        let mut m: Vec<Vec<Rational>> = rows
            .iter()
            .filter(|(a, b)| dot(a, z) == *b)
            .map(|(a, _)| a.clone())
            .collect();
        let cols = z.len();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[rank][c];
                    for k in 0..cols {
                        let delta = &f * &m[rank][k];
                        m[r][k] -= delta;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn four_symbol_vertices_are_basic() {
        let p = TrustPolytope::cached(4).unwrap();
        assert!(p.vertices().len() > 1);
        for v in p.vertices() {
            assert!(p.contains(v));
            assert_eq!(tight_rank(&p.rows, v), 12);
        }
    }

    #[test]
    fn vertices_are_trust_feasible_kernels() {
        let p = TrustPolytope::cached(3).unwrap();
        for v in p.vertices() {
            assert!(p.kernel(v).unwrap().is_trust_feasible());
        }
        assert!(matches!(
            TrustPolytope::new(5),
            Err(Error::ResourceLimit(_))
        ));
    }
}
