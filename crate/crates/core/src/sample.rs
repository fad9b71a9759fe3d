//! Random and structured instances for tests and property runs.

use rand::Rng;

use crate::game::{SenderStrategy, Table, UtilityMatrix};
use crate::scalar::Scalar;

/// Random rational in `[-bound, bound]` with denominator at most 4.
fn small_rational<T: Scalar, R: Rng + ?Sized>(rng: &mut R, bound: i64) -> T {
    let d = rng.gen_range(1..=4);
    let n = rng.gen_range(-bound * d..=bound * d);
    T::ratio(n, d)
}

/// Off-diagonal entries uniform over small rationals in `[-3, 3]`; zeros and
/// ties are common on purpose.
pub fn random_utility<T: Scalar, R: Rng + ?Sized>(rng: &mut R, q: usize) -> UtilityMatrix<T> {
    from_fn(q, |_, _| small_rational(rng, 3))
}

/// As [`random_utility`] but no off-diagonal entry is zero.
pub fn random_nonzero_utility<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    q: usize,
) -> UtilityMatrix<T> {
    from_fn(q, |_, _| loop {
        let v: T = small_rational(rng, 3);
        if !v.is_zero() {
            return v;
        }
    })
}

/// Every off-diagonal entry strictly negative.
pub fn random_misaligned_utility<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    q: usize,
) -> UtilityMatrix<T> {
    from_fn(q, |_, _| {
        let d = rng.gen_range(1..=4);
        T::ratio(-rng.gen_range(1..=3 * d), d)
    })
}

/// Random utility with at least one nonnegative off-diagonal entry.
pub fn random_partly_aligned_utility<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    q: usize,
) -> UtilityMatrix<T> {
    assert!(q >= 2);
    let mut rows = random_misaligned_utility::<T, R>(rng, q).table().rows();
    let xh = rng.gen_range(0..q);
    let x = (xh + rng.gen_range(1..q)) % q;
    let d = rng.gen_range(1..=4);
    rows[xh][x] = T::ratio(rng.gen_range(0..=3 * d), d);
    UtilityMatrix::new(rows).expect("diagonal untouched")
}

/// Sender whose columns are small random integer weights, normalized. Many
/// entries tie, which exercises best responses with several choices.
pub fn random_sender<T: Scalar, R: Rng + ?Sized>(rng: &mut R, q: usize) -> SenderStrategy<T> {
    let mut table = Table::zeros(q);
    for x in 0..q {
        let weights: Vec<i64> = loop {
            let w: Vec<i64> = (0..q).map(|_| rng.gen_range(0..=3)).collect();
            if w.iter().any(|&v| v > 0) {
                break w;
            }
        };
        let total: i64 = weights.iter().sum();
        for (y, w) in weights.into_iter().enumerate() {
            table.set(y, x, T::ratio(w, total));
        }
    }
    SenderStrategy::from_table(table).expect("columns are normalized")
}

fn from_fn<T: Scalar>(q: usize, mut f: impl FnMut(usize, usize) -> T) -> UtilityMatrix<T> {
    let rows = (0..q)
        .map(|xh| {
            (0..q)
                .map(|x| if xh == x { T::zero() } else { f(xh, x) })
                .collect()
        })
        .collect();
    UtilityMatrix::new(rows).expect("zero diagonal")
}

/// Utility whose obfuscation graph has exactly the given edges
/// `(tail, head, weight)`; every other off-diagonal entry is `filler` (negative).
pub fn utility_with_edges<T: Scalar>(
    q: usize,
    edges: &[(usize, usize, T)],
    filler: T,
) -> UtilityMatrix<T> {
    let mut rows = vec![vec![filler; q]; q];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = T::zero();
    }
    for (tail, head, w) in edges {
        rows[*head][*tail] = w.clone();
    }
    UtilityMatrix::new(rows).expect("zero diagonal")
}

/// Cycle `0 -> 1 -> ... -> q-1 -> 0` with weight `u` and `-1` elsewhere.
pub fn uniform_cycle<T: Scalar>(q: usize, u: T) -> UtilityMatrix<T> {
    let edges: Vec<_> = (0..q).map(|i| (i, (i + 1) % q, u.clone())).collect();
    utility_with_edges(q, &edges, -T::one())
}

/// Chain `0 -> 1 -> ... -> q-1` with weight `u` and `-1` elsewhere.
pub fn uniform_chain<T: Scalar>(q: usize, u: T) -> UtilityMatrix<T> {
    let edges: Vec<_> = (0..q - 1).map(|i| (i, i + 1, u.clone())).collect();
    utility_with_edges(q, &edges, -T::one())
}

/// Star pointing at `center`; `weights[x]` is used for every `x != center`.
pub fn star<T: Scalar>(center: usize, weights: &[T]) -> UtilityMatrix<T> {
    let q = weights.len();
    let edges: Vec<_> = (0..q)
        .filter(|&x| x != center)
        .map(|x| (x, center, weights[x].clone()))
        .collect();
    utility_with_edges(q, &edges, -T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in 2..6 {
            let u: UtilityMatrix<Rational> = random_nonzero_utility(&mut rng, q);
            assert!(u.off_diagonal().all(|(a, b)| !u.get(a, b).is_negligible()));
            let u: UtilityMatrix<Rational> = random_misaligned_utility(&mut rng, q);
            assert!(u
                .off_diagonal()
                .all(|(a, b)| u.get(a, b).is_strictly_negative()));
            let u: UtilityMatrix<Rational> = random_partly_aligned_utility(&mut rng, q);
            assert!(u
                .off_diagonal()
                .any(|(a, b)| !u.get(a, b).is_strictly_negative()));
            let s: SenderStrategy<Rational> = random_sender(&mut rng, q);
            assert_eq!(s.q(), q);
        }
    }

    #[test]
    fn structured_instances() {
        let c: UtilityMatrix<Rational> = uniform_cycle(3, Rational::from_int(1));
        assert_eq!(*c.get(1, 0), Rational::from_int(1));
        assert_eq!(*c.get(0, 2), Rational::from_int(1));
        assert_eq!(*c.get(0, 1), Rational::from_int(-1));
        let s: UtilityMatrix<Rational> = star(
            1,
            &[
                Rational::from_int(2),
                Rational::from_int(0),
                Rational::from_int(5),
            ],
        );
        assert_eq!(*s.get(1, 0), Rational::from_int(2));
        assert_eq!(*s.get(1, 2), Rational::from_int(5));
    }
}
