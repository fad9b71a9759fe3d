//! The sender-receiver game: utility tables, strategies, best responses and
//! the recovery kernel induced by a strategy pair.
//!
//! Index conventions follow the conditional distributions they store. A
//! [`SenderStrategy`] holds `pi[y][x]`, the probability of emitting signal `y`
//! for source symbol `x`. A [`ReceiverStrategy`] holds `sigma[xh][y]`, the
//! probability of decoding signal `y` as `xh`. A [`RecoveryKernel`] holds
//! `mu[xh][x]`. In all three every column sums to one. Symbols and signals
//! share the index range `0..q`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};

/// Dense `q x q` table stored row-major.
#[derive(Clone, PartialEq)]
pub struct Table<T> {
    size: usize,
    data: Vec<T>,
}

impl<T: Scalar> Table<T> {
    pub fn zeros(size: usize) -> Self {
        Table {
            size,
            data: vec![T::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut t = Self::zeros(size);
        for i in 0..size {
            t.set(i, i, T::one());
        }
        t
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::invalid(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    size
                )));
            }
            data.extend(row);
        }
        Ok(Table { size, data })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                data.push(f(r, c));
            }
        }
        Table { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.size + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.size..(row + 1) * self.size]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.size).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column_sum(&self, col: usize) -> T {
        sum((0..self.size).map(|r| self.get(r, col).clone()))
    }
}

impl<T: fmt::Debug> fmt::Debug for Table<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.size {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.size {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.data[r * self.size + c])?;
            }
        }
        write!(f, "]")
    }
}

/// First constraint found broken by a candidate strategy or kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation<T> {
    OutOfRange {
        row: usize,
        col: usize,
        value: T,
    },
    ColumnSum {
        col: usize,
        sum: T,
    },
    /// `mu(recovered | recovered) < mu(recovered | source)`.
    Trust {
        recovered: usize,
        source: usize,
    },
}

impl<T: fmt::Display> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange { row, col, value } => write!(
                f,
                "entry ({}, {}) = {} lies outside [0, 1]",
                row + 1,
                col + 1,
                value
            ),
            Violation::ColumnSum { col, sum } => {
                write!(f, "column {} sums to {} instead of 1", col + 1, sum)
            }
            Violation::Trust { recovered, source } => write!(
                f,
                "trust constraint broken at (recovered={}, source={})",
                recovered + 1,
                source + 1
            ),
        }
    }
}

/// Checks that every column of `table` is a probability distribution.
pub fn check_stochastic<T: Scalar>(table: &Table<T>) -> Result<(), Violation<T>> {
    let n = table.size();
    for col in 0..n {
        for row in 0..n {
            let v = table.get(row, col);
            if v.is_strictly_negative() || v.definitely_gt(&T::one()) {
                return Err(Violation::OutOfRange {
                    row,
                    col,
                    value: v.clone(),
                });
            }
        }
        let s = table.column_sum(col);
        if !s.approx_eq(&T::one()) {
            return Err(Violation::ColumnSum { col, sum: s });
        }
    }
    Ok(())
}

/// Checks `mu(xh|xh) >= mu(xh|x)` for every ordered pair.
pub fn check_trust<T: Scalar>(kernel: &Table<T>) -> Result<(), Violation<T>> {
    let n = kernel.size();
    for recovered in 0..n {
        for source in 0..n {
            if source != recovered
                && kernel
                    .get(recovered, recovered)
                    .definitely_lt(kernel.get(recovered, source))
            {
                return Err(Violation::Trust { recovered, source });
            }
        }
    }
    Ok(())
}

fn stochastic_or_invalid<T: Scalar>(what: &str, table: &Table<T>) -> Result<()> {
    check_stochastic(table).map_err(|v| Error::invalid(format!("{what}: {v}")))
}

/// Sender payoff table `U(xh, x)`: utility when source `x` is recovered as `xh`.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityMatrix<T> {
    table: Table<T>,
}

impl<T: Scalar> UtilityMatrix<T> {
    /// Builds a utility matrix from rows `rows[xh][x]`. The diagonal must be zero.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let table = Table::from_rows(rows)?;
        if table.size() == 0 {
            return Err(Error::invalid("alphabet size must be at least 1"));
        }
        for i in 0..table.size() {
            if !table.get(i, i).is_negligible() {
                return Err(Error::invalid(format!(
                    "nonzero diagonal entry U({0},{0}) = {1}",
                    i + 1,
                    table.get(i, i)
                )));
            }
        }
        Ok(UtilityMatrix { table })
    }

    /// Subtracts `U(x,x)` from column `x`. Returns the normalized matrix and
    /// the constant `sum_x U(x,x)` that must be added back to any objective
    /// value to recover the original utility.
    pub fn normalized(rows: Vec<Vec<T>>) -> Result<(Self, T)> {
        let table = Table::from_rows(rows)?;
        if table.size() == 0 {
            return Err(Error::invalid("alphabet size must be at least 1"));
        }
        let shift = sum((0..table.size()).map(|i| table.get(i, i).clone()));
        let shifted = Table::from_fn(table.size(), |r, c| {
            table.get(r, c).clone() - table.get(c, c).clone()
        });
        Ok((UtilityMatrix { table: shifted }, shift))
    }

    pub fn q(&self) -> usize {
        self.table.size()
    }

    /// `U(recovered, source)`.
    pub fn get(&self, recovered: usize, source: usize) -> &T {
        self.table.get(recovered, source)
    }

    pub fn table(&self) -> &Table<T> {
        &self.table
    }

    /// Ordered pairs `(xh, x)`, `xh != x`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let q = self.q();
        (0..q).flat_map(move |r| (0..q).filter(move |&c| c != r).map(move |c| (r, c)))
    }
}

/// Sender commitment `pi[y][x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SenderStrategy<T> {
    table: Table<T>,
}

impl<T: Scalar> SenderStrategy<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_table(Table::from_rows(rows)?)
    }

    pub fn from_table(table: Table<T>) -> Result<Self> {
        stochastic_or_invalid("sender strategy", &table)?;
        Ok(SenderStrategy { table })
    }

    pub fn identity(q: usize) -> Self {
        SenderStrategy {
            table: Table::identity(q),
        }
    }

    pub fn q(&self) -> usize {
        self.table.size()
    }

    /// `pi(signal | source)`.
    pub fn prob(&self, signal: usize, source: usize) -> &T {
        self.table.get(signal, source)
    }

    pub fn table(&self) -> &Table<T> {
        &self.table
    }

    /// Signals emitted with positive probability for `source`.
    pub fn support(&self, source: usize) -> Vec<usize> {
        (0..self.q())
            .filter(|&y| self.prob(y, source).is_strictly_positive())
            .collect()
    }

    /// Signals used with positive probability by some source symbol.
    pub fn active_signals(&self) -> Vec<usize> {
        (0..self.q()).filter(|&y| self.is_active(y)).collect()
    }

    pub fn is_active(&self, signal: usize) -> bool {
        self.table
            .row(signal)
            .iter()
            .any(|p| p.is_strictly_positive())
    }
}

/// Receiver decoding rule `sigma[xh][y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceiverStrategy<T> {
    table: Table<T>,
}

impl<T: Scalar> ReceiverStrategy<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_table(Table::from_rows(rows)?)
    }

    pub fn from_table(table: Table<T>) -> Result<Self> {
        stochastic_or_invalid("receiver strategy", &table)?;
        Ok(ReceiverStrategy { table })
    }

    pub fn identity(q: usize) -> Self {
        ReceiverStrategy {
            table: Table::identity(q),
        }
    }

    /// Deterministic decoder: `choice[y] = Some(xh)` decodes `y` as `xh`;
    /// `None` marks an unused signal, decoded uniformly.
    pub fn deterministic(choice: &[Option<usize>]) -> Self {
        let q = choice.len();
        let uniform = T::one() / T::from_usize(q);
        let mut table = Table::zeros(q);
        for (y, c) in choice.iter().enumerate() {
            match c {
                Some(xh) => table.set(*xh, y, T::one()),
                None => {
                    for xh in 0..q {
                        table.set(xh, y, uniform.clone());
                    }
                }
            }
        }
        ReceiverStrategy { table }
    }

    pub fn q(&self) -> usize {
        self.table.size()
    }

    /// `sigma(recovered | signal)`.
    pub fn prob(&self, recovered: usize, signal: usize) -> &T {
        self.table.get(recovered, signal)
    }

    pub fn table(&self) -> &Table<T> {
        &self.table
    }

    /// Replaces the decoding of every signal unused by `sender` with the uniform
    /// distribution, so that decoders differing only on unused signals compare equal.
    pub fn canonical_for(&self, sender: &SenderStrategy<T>) -> Self {
        let q = self.q();
        let uniform = T::one() / T::from_usize(q);
        let mut table = self.table.clone();
        for y in 0..q {
            if !sender.is_active(y) {
                for xh in 0..q {
                    table.set(xh, y, uniform.clone());
                }
            }
        }
        ReceiverStrategy { table }
    }

    /// Symbols recovered with positive probability from some signal active under `sender`.
    pub fn recovered_symbols(&self, sender: &SenderStrategy<T>) -> Vec<usize> {
        let active = sender.active_signals();
        (0..self.q())
            .filter(|&xh| {
                active
                    .iter()
                    .any(|&y| self.prob(xh, y).is_strictly_positive())
            })
            .collect()
    }
}

/// End-to-end recovery distribution `mu[xh][x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryKernel<T> {
    table: Table<T>,
}

impl<T: Scalar> RecoveryKernel<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_table(Table::from_rows(rows)?)
    }

    pub fn from_table(table: Table<T>) -> Result<Self> {
        stochastic_or_invalid("recovery kernel", &table)?;
        Ok(RecoveryKernel { table })
    }

    pub fn identity(q: usize) -> Self {
        RecoveryKernel {
            table: Table::identity(q),
        }
    }

    pub fn q(&self) -> usize {
        self.table.size()
    }

    /// `mu(recovered | source)`.
    pub fn prob(&self, recovered: usize, source: usize) -> &T {
        self.table.get(recovered, source)
    }

    pub fn table(&self) -> &Table<T> {
        &self.table
    }

    /// Symbols with `mu(x|x) > 0`.
    pub fn recovered_symbols(&self) -> Vec<usize> {
        (0..self.q())
            .filter(|&x| self.prob(x, x).is_strictly_positive())
            .collect()
    }

    /// Expected number of correctly recovered symbols, `sum_x mu(x|x)`.
    pub fn diagonal_mass(&self) -> T {
        sum((0..self.q()).map(|x| self.prob(x, x).clone()))
    }

    pub fn is_trust_feasible(&self) -> bool {
        check_trust(&self.table).is_ok()
    }

    /// `V(mu) = sum mu(xh|x) U(xh,x)`.
    pub fn value(&self, utility: &UtilityMatrix<T>) -> Result<T> {
        same_size(self.q(), utility.q())?;
        let q = self.q();
        Ok(sum((0..q).flat_map(|r| {
            (0..q).map(move |c| self.prob(r, c).clone() * utility.get(r, c).clone())
        })))
    }

    /// Stochasticity plus, when `with_trust`, the trust constraints.
    pub fn validate(&self, with_trust: bool) -> Result<(), Violation<T>> {
        check_stochastic(&self.table)?;
        if with_trust {
            check_trust(&self.table)?;
        }
        Ok(())
    }
}

fn same_size(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `R(pi, sigma) = sum_{x,y} pi(y|x) sigma(x|y)`.
pub fn recovery_value<T: Scalar>(
    sender: &SenderStrategy<T>,
    receiver: &ReceiverStrategy<T>,
) -> Result<T> {
    same_size(sender.q(), receiver.q())?;
    let q = sender.q();
    Ok(sum(sender.active_signals().into_iter().flat_map(|y| {
        (0..q).map(move |x| sender.prob(y, x).clone() * receiver.prob(x, y).clone())
    })))
}

/// Sender expected utility `U(pi, sigma)`, summed over active signals.
pub fn expected_utility<T: Scalar>(
    utility: &UtilityMatrix<T>,
    sender: &SenderStrategy<T>,
    receiver: &ReceiverStrategy<T>,
) -> Result<T> {
    same_size(utility.q(), sender.q())?;
    same_size(sender.q(), receiver.q())?;
    let mut total = T::zero();
    for y in sender.active_signals() {
        for xh in 0..utility.q() {
            let s = receiver.prob(xh, y);
            if s.is_zero() {
                continue;
            }
            total = total + s.clone() * signal_payoff(utility, sender, xh, y);
        }
    }
    Ok(total)
}

/// `t(xh, y) = sum_x pi(y|x) U(xh, x)`: payoff of decoding `y` as `xh`.
pub fn signal_payoff<T: Scalar>(
    utility: &UtilityMatrix<T>,
    sender: &SenderStrategy<T>,
    recovered: usize,
    signal: usize,
) -> T {
    sum((0..sender.q()).map(|x| sender.prob(signal, x).clone() * utility.get(recovered, x).clone()))
}

/// `mu(xh|x) = sum_y pi(y|x) sigma(xh|y)`.
pub fn induced_kernel<T: Scalar>(
    sender: &SenderStrategy<T>,
    receiver: &ReceiverStrategy<T>,
) -> Result<RecoveryKernel<T>> {
    same_size(sender.q(), receiver.q())?;
    let q = sender.q();
    let table = Table::from_fn(q, |xh, x| {
        sum((0..q).map(|y| sender.prob(y, x).clone() * receiver.prob(xh, y).clone()))
    });
    Ok(RecoveryKernel { table })
}

/// Argmax sets `M(y) = argmax_x pi(y|x)` for every active signal. The best
/// response set is every decoder whose support on `y` lies inside `M(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BestResponseStructure {
    argmax: Vec<Option<Vec<usize>>>,
}

impl BestResponseStructure {
    /// `M(y)`, or `None` for a signal the sender never uses.
    pub fn argmax(&self, signal: usize) -> Option<&[usize]> {
        self.argmax[signal].as_deref()
    }

    pub fn active_signals(&self) -> impl Iterator<Item = usize> + '_ {
        self.argmax
            .iter()
            .enumerate()
            .filter_map(|(y, m)| m.as_ref().map(|_| y))
    }

    pub fn q(&self) -> usize {
        self.argmax.len()
    }

    /// True when the best response is unique (every `M(y)` is a singleton).
    pub fn is_unique(&self) -> bool {
        self.argmax.iter().flatten().all(|m| m.len() == 1)
    }

    /// Number of deterministic best responses, saturating.
    pub fn deterministic_count(&self) -> u128 {
        self.argmax
            .iter()
            .flatten()
            .fold(1u128, |acc, m| acc.saturating_mul(m.len() as u128))
    }

    /// Deterministic best response picking `pick(y, M(y))` on every active signal.
    pub fn select<T: Scalar>(
        &self,
        mut pick: impl FnMut(usize, &[usize]) -> usize,
    ) -> ReceiverStrategy<T> {
        let choice: Vec<Option<usize>> = self
            .argmax
            .iter()
            .enumerate()
            .map(|(y, m)| m.as_ref().map(|m| pick(y, m)))
            .collect();
        ReceiverStrategy::deterministic(&choice)
    }

    /// Every deterministic best response in lexicographic order of choices.
    pub fn deterministic_responses<T: Scalar>(&self) -> Vec<ReceiverStrategy<T>> {
        let active: Vec<(usize, &Vec<usize>)> = self
            .argmax
            .iter()
            .enumerate()
            .filter_map(|(y, m)| m.as_ref().map(|m| (y, m)))
            .collect();
        let mut out = Vec::new();
        let mut cursor = vec![0usize; active.len()];
        loop {
            let mut choice = vec![None; self.q()];
            for (slot, (y, m)) in active.iter().enumerate() {
                choice[*y] = Some(m[cursor[slot]]);
            }
            out.push(ReceiverStrategy::deterministic(&choice));
            // odometer increment
            let mut slot = active.len();
            loop {
                if slot == 0 {
                    return out;
                }
                slot -= 1;
                cursor[slot] += 1;
                if cursor[slot] < active[slot].1.len() {
                    break;
                }
                cursor[slot] = 0;
            }
        }
    }

    /// Membership test: `supp sigma(.|y)` inside `M(y)` for every active `y`.
    pub fn contains<T: Scalar>(&self, receiver: &ReceiverStrategy<T>) -> bool {
        self.argmax.iter().enumerate().all(|(y, m)| match m {
            None => true,
            Some(m) => (0..receiver.q())
                .all(|xh| m.contains(&xh) || !receiver.prob(xh, y).is_strictly_positive()),
        })
    }
}

pub fn best_response_structure<T: Scalar>(sender: &SenderStrategy<T>) -> BestResponseStructure {
    let q = sender.q();
    let argmax = (0..q)
        .map(|y| {
            if !sender.is_active(y) {
                return None;
            }
            let row = sender.table().row(y);
            let mut best = row[0].clone();
            for v in &row[1..] {
                if v.definitely_gt(&best) {
                    best = v.clone();
                }
            }
            Some((0..q).filter(|&x| row[x].approx_eq(&best)).collect())
        })
        .collect();
    BestResponseStructure { argmax }
}

/// Extreme expected utility over the best response set, with a deterministic witness.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseUtility<T> {
    pub value: T,
    pub witness: ReceiverStrategy<T>,
}

fn extreme_case<T: Scalar>(
    utility: &UtilityMatrix<T>,
    sender: &SenderStrategy<T>,
    worst: bool,
) -> Result<CaseUtility<T>> {
    same_size(utility.q(), sender.q())?;
    let br = best_response_structure(sender);
    let mut total = T::zero();
    let mut choice = vec![None; sender.q()];
    for y in br.active_signals() {
        let candidates = br.argmax(y).unwrap_or(&[]);
        let mut best: Option<(usize, T)> = None;
        for &xh in candidates {
            let t = signal_payoff(utility, sender, xh, y);
            let better = match &best {
                None => true,
                Some((_, b)) if worst => t.definitely_lt(b),
                Some((_, b)) => t.definitely_gt(b),
            };
            if better {
                best = Some((xh, t));
            }
        }
        if let Some((xh, t)) = best {
            choice[y] = Some(xh);
            total = total + t;
        }
    }
    Ok(CaseUtility {
        value: total,
        witness: ReceiverStrategy::deterministic(&choice),
    })
}

/// Worst case expected utility over the receiver's best responses.
pub fn wceu<T: Scalar>(
    utility: &UtilityMatrix<T>,
    sender: &SenderStrategy<T>,
) -> Result<CaseUtility<T>> {
    extreme_case(utility, sender, true)
}

/// Best case expected utility over the receiver's best responses.
pub fn bceu<T: Scalar>(
    utility: &UtilityMatrix<T>,
    sender: &SenderStrategy<T>,
) -> Result<CaseUtility<T>> {
    extreme_case(utility, sender, false)
}
