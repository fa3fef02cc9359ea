//! Exact evaluation of the level recurrence for `b_{n,m}`, `c_n` and `a_n`.
//!
//! `b_{n,m}` counts the sets that first appear at level `n` and whose
//! elements all lie in level `m`. The same triangular [`BTable`] stores the
//! plain, atoms, bounded and minimally bounded variants.

use num_traits::{One, Zero};

use crate::hierarchy::HierarchySpec;
use crate::BigCount;

/// `a choose k`, exact; zero when `a < k`.
pub fn binomial_big(a: &BigCount, k: usize) -> BigCount {
    if k == 0 {
        return BigCount::one();
    }
    if *a < BigCount::from(k) {
        return BigCount::zero();
    }
    let mut num = BigCount::one();
    let mut den = BigCount::one();
    for i in 0..k {
        num *= a - BigCount::from(i);
        den *= BigCount::from(i + 1);
    }
    num / den
}

/// `[C(a,0), C(a,1), …, C(a,k_max')]` with `k_max' = min(k_max, a)`; every
/// omitted entry is zero.
pub fn binomial_row(a: &BigCount, k_max: usize) -> Vec<BigCount> {
    let mut row = vec![BigCount::one()];
    let mut k = 1;
    while k <= k_max && BigCount::from(k) <= *a {
        let prev = row.last().expect("nonempty");
        row.push(prev * (a - BigCount::from(k - 1)) / BigCount::from(k));
        k += 1;
    }
    row
}

pub(crate) fn binom_at(row: &[BigCount], k: usize) -> Option<&BigCount> {
    row.get(k)
}

/// Triangular table of `b_{n,m}` for one hierarchy variant.
///
/// Row `n` stores the columns `m = -1 ..= last_col(n)`; reads past the last
/// stored column return the last stored value, since every set new at level
/// `n` already lies in that column's level.
#[derive(Clone, Debug, PartialEq)]
pub struct BTable {
    variant: HierarchySpec,
    rows: Vec<Vec<BigCount>>,
    a: Vec<BigCount>,
}

impl BTable {
    /// Builds a table from rows (`rows[n][j] = b_{n,j-1}`); the prefix sums of
    /// the last column form `a`.
    pub fn from_rows(variant: HierarchySpec, rows: Vec<Vec<BigCount>>) -> Self {
        let mut a = Vec::with_capacity(rows.len());
        let mut acc = BigCount::zero();
        for row in &rows {
            acc += row.last().expect("row has the m = -1 column");
            a.push(acc.clone());
        }
        BTable { variant, rows, a }
    }

    pub fn variant(&self) -> &HierarchySpec {
        &self.variant
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<BigCount>] {
        &self.rows
    }

    /// Largest stored column of row `n`.
    pub fn last_col(&self, n: usize) -> isize {
        self.rows[n].len() as isize - 2
    }

    /// `b_{n,m}` for `m ≥ -1`.
    pub fn cell(&self, n: usize, m: isize) -> &BigCount {
        assert!(m >= -1, "column {m} below -1");
        let row = &self.rows[n];
        let j = ((m + 1) as usize).min(row.len() - 1);
        &row[j]
    }

    /// Number of sets new at level `n` (`b_{n,n-1}` on the plain table).
    pub fn increment(&self, n: usize) -> &BigCount {
        self.rows[n].last().expect("nonempty row")
    }

    /// `a_n`, the size of level `n`.
    pub fn a(&self, n: usize) -> &BigCount {
        &self.a[n]
    }

    pub fn a_sequence(&self) -> &[BigCount] {
        &self.a
    }

    pub fn c_sequence(&self) -> Vec<BigCount> {
        (0..self.rows.len()).map(|n| self.increment(n).clone()).collect()
    }
}

/// `c_0 = b_{0,-1}`, `c_n = b_{n,n-1}`.
pub fn c_sequence(t: &BTable) -> Vec<BigCount> {
    t.c_sequence()
}

/// `a_n = Σ_{k≤n} b_{k,k-1}`.
pub fn a_sequence(t: &BTable) -> Vec<BigCount> {
    t.a_sequence().to_vec()
}

/// Fills `b_{n,m}` for `0 ≤ m < n ≤ n_max` column by column:
///
/// `b_{n,m} = b_{n,m-1} + Σ_{k=1}^{n-m-1} b_{n-k,m-1}·C(c_m,k) + C(c_m,n-m)·a_m`
///
/// with `c_m = b_{m,m-1}`, `b_{0,-1} = 1` and `b_{n,-1} = 0` for `n ≥ 1`.
pub fn compute_b_table(n_max: usize) -> BTable {
    // rows[n][m + 1] = b_{n,m}
    let mut rows: Vec<Vec<BigCount>> = (0..=n_max).map(|n| vec![BigCount::zero(); n + 1]).collect();
    rows[0][0] = BigCount::one();
    // a_m, extended once column m-1 is complete
    let mut a_m = BigCount::one();
    for m in 0..n_max {
        let c_m = rows[m][m].clone();
        if m > 0 {
            a_m += &c_m;
        }
        let binom = binomial_row(&c_m, n_max - m);
        for n in (m + 1)..=n_max {
            let mut v = rows[n][m].clone();
            for k in 1..(n - m) {
                let Some(ck) = binom_at(&binom, k) else { break };
                let prev = &rows[n - k][m];
                if !prev.is_zero() {
                    v += prev * ck;
                }
            }
            if let Some(ck) = binom_at(&binom, n - m) {
                v += ck * &a_m;
            }
            rows[n][m + 1] = v;
        }
    }
    BTable::from_rows(HierarchySpec::Plain, rows)
}

/// Recomputes row `n` of a plain table from rows `< n` (cache spot check).
pub fn recompute_plain_row(t: &BTable, n: usize) -> Vec<BigCount> {
    let mut row = vec![BigCount::zero(); n + 1];
    if n == 0 {
        row[0] = BigCount::one();
        return row;
    }
    for m in 0..n {
        let c_m = t.increment(m);
        let binom = binomial_row(c_m, n - m);
        let mut v = row[m].clone();
        for k in 1..(n - m) {
            let Some(ck) = binom_at(&binom, k) else { break };
            v += t.cell(n - k, m as isize - 1) * ck;
        }
        if let Some(ck) = binom_at(&binom, n - m) {
            v += ck * t.a(m);
        }
        row[m + 1] = v;
    }
    row
}
