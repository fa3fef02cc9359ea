//! Level counts refined by classical rank or by cardinality.
//!
//! `r^t_{n,m}` counts the sets of `B_{n,m}` with rank at most `t`, and
//! `d^t_{n,m}` those with at most `t` elements. The unrefined atoms variant
//! lives in [`crate::bounded`] and is re-exported here.

use crate::error::{Error, Result};
use crate::recurrence::{binom_at, binomial_row, compute_b_table, BTable};
use crate::BigCount;
use num_traits::{One, Zero};

pub use crate::bounded::{compute_atoms_table, AtomsTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineKind {
    Rank,
    Cardinality,
}

impl RefineKind {
    pub fn name(self) -> &'static str {
        match self {
            RefineKind::Rank => "rank",
            RefineKind::Cardinality => "cardinality",
        }
    }

    /// Largest stored `t` in cell `(n, m)`; larger `t` reads the saturated value.
    fn t_max(self, n: usize, m: isize) -> usize {
        match self {
            RefineKind::Rank => (m + 1) as usize,
            RefineKind::Cardinality => n,
        }
    }
}

/// `cells[n][m + 1][t]` for `-1 ≤ m < n` and `0 ≤ t ≤ t_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedTable {
    kind: RefineKind,
    cells: Vec<Vec<Vec<BigCount>>>,
}

impl RefinedTable {
    pub fn kind(&self) -> RefineKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.cells.len() - 1
    }

    /// The refined cell at `(n, m, t)`: zero for `t < 0`, saturated above the
    /// stored range.
    pub fn cell(&self, n: usize, m: isize, t: isize) -> BigCount {
        read(&self.cells, n, m, t)
    }

    /// Number of members of level `n` with rank (or cardinality) exactly `t`,
    /// for `0 ≤ t ≤ n`.
    pub fn profile(&self, n: usize) -> Result<Vec<BigCount>> {
        if n > self.n_max() {
            return Err(Error::OutOfRange(format!(
                "{} profile row {n} beyond computed depth {}",
                self.kind.name(),
                self.n_max()
            )));
        }
        let mut out = vec![BigCount::zero(); n + 1];
        for (t, slot) in out.iter_mut().enumerate() {
            let t = t as isize;
            for m in 0..=n {
                let diag = m as isize - 1;
                *slot += self.cell(m, diag, t) - self.cell(m, diag, t - 1);
            }
        }
        Ok(out)
    }

    /// Profiles of every row `0..=n_max`.
    pub fn profiles(&self) -> Vec<Vec<BigCount>> {
        (0..=self.n_max()).map(|n| self.profile(n).expect("in range")).collect()
    }
}

fn read(cells: &[Vec<Vec<BigCount>>], n: usize, m: isize, t: isize) -> BigCount {
    if t < 0 {
        return BigCount::zero();
    }
    let col = &cells[n][(m + 1) as usize];
    col[(t as usize).min(col.len() - 1)].clone()
}

fn base_column(kind: RefineKind, n: usize) -> Vec<BigCount> {
    let width = kind.t_max(n, -1) + 1;
    let fill = if n == 0 { BigCount::one() } else { BigCount::zero() };
    vec![fill; width]
}

/// Fills `r^t_{n,m}` for `n ≤ n_max`:
///
/// `r^t_{n,m} = r^t_{n,m-1} + Σ_{k=1}^{n-m-1} r^t_{n-k,m-1}·C(r^{t-1}_{m,m-1},k)
///              + C(r^{t-1}_{m,m-1},n-m)·Σ_{k=0}^m r^t_{k,k-1}`
pub fn compute_r_table(n_max: usize) -> RefinedTable {
    let kind = RefineKind::Rank;
    let mut cells: Vec<Vec<Vec<BigCount>>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        cells.push(vec![base_column(kind, n)]);
        for m in 0..n {
            let mi = m as isize;
            let mut col = Vec::with_capacity(m + 2);
            for t in 0..=(m + 1) as isize {
                let top = read(&cells, m, mi - 1, t - 1);
                let binom = binomial_row(&top, n - m);
                let mut v = read(&cells, n, mi - 1, t);
                for k in 1..(n - m) {
                    let Some(ck) = binom_at(&binom, k) else { break };
                    v += read(&cells, n - k, mi - 1, t) * ck;
                }
                if let Some(ck) = binom_at(&binom, n - m) {
                    let tail: BigCount = (0..=m).map(|k| read(&cells, k, k as isize - 1, t)).sum();
                    v += ck * tail;
                }
                col.push(v);
            }
            cells[n].push(col);
        }
    }
    RefinedTable { kind, cells }
}

/// `r^t_n` for `0 ≤ t ≤ n`.
pub fn r_profile(t: &RefinedTable, n: usize) -> Result<Vec<BigCount>> {
    expect_kind(t, RefineKind::Rank)?;
    t.profile(n)
}

/// Fills `d^t_{n,m}` for `n ≤ n_max` from a freshly computed plain table.
pub fn compute_d_table(n_max: usize) -> RefinedTable {
    compute_d_table_from(&compute_b_table(n_max))
}

/// Fills `d^t_{n,m}` up to the depth of `plain`:
///
/// `d^t_{n,m} = d^t_{n,m-1} + Σ_{k=1}^{n-m-1} d^{t-k}_{n-k,m-1}·C(b_{m,m-1},k)
///              + C(b_{m,m-1},n-m)·Σ_{k=0}^m d^{t-n+m}_{k,k-1}`
pub fn compute_d_table_from(plain: &BTable) -> RefinedTable {
    let kind = RefineKind::Cardinality;
    let n_max = plain.n_max();
    let binoms: Vec<Vec<BigCount>> = (0..n_max)
        .map(|m| binomial_row(plain.increment(m), n_max - m))
        .collect();
    let mut cells: Vec<Vec<Vec<BigCount>>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        cells.push(vec![base_column(kind, n)]);
        for (m, binom) in binoms.iter().enumerate().take(n) {
            let mi = m as isize;
            let mut col = Vec::with_capacity(n + 1);
            for t in 0..=n as isize {
                let mut v = read(&cells, n, mi - 1, t);
                for k in 1..(n - m) {
                    let Some(ck) = binom_at(binom, k) else { break };
                    v += read(&cells, n - k, mi - 1, t - k as isize) * ck;
                }
                if let Some(ck) = binom_at(binom, n - m) {
                    let shift = t - (n - m) as isize;
                    let tail: BigCount = (0..=m).map(|k| read(&cells, k, k as isize - 1, shift)).sum();
                    v += ck * tail;
                }
                col.push(v);
            }
            cells[n].push(col);
        }
    }
    RefinedTable { kind, cells }
}

/// `d^t_n` for `0 ≤ t ≤ n`.
pub fn d_profile(t: &RefinedTable, n: usize) -> Result<Vec<BigCount>> {
    expect_kind(t, RefineKind::Cardinality)?;
    t.profile(n)
}

fn expect_kind(t: &RefinedTable, kind: RefineKind) -> Result<()> {
    if t.kind != kind {
        return Err(Error::Unsupported(format!(
            "expected a {} table, got a {} table",
            kind.name(),
            t.kind.name()
        )));
    }
    Ok(())
}
