//! Hierarchies whose adjoined element is drawn from a bounded level.
//!
//! For a bound `f` the level `n+1` adjoins elements of level `f(n)` only. The
//! minimally bounded hierarchy admits elements of level `m+1` once the whole
//! power set of level `m` is present; it is the bounded hierarchy for `f̄`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::bound::{BoundFunction, Inverse};
use crate::error::{Error, Result};
use crate::hierarchy::HierarchySpec;
use crate::recurrence::{binom_at, binomial_row, BTable};
use crate::BigCount;

/// Cell `b_{n,m}` read from partially built rows, clamped past the last
/// stored column.
fn read(rows: &[Vec<BigCount>], n: usize, m: isize) -> &BigCount {
    let row = &rows[n];
    &row[((m + 1) as usize).min(row.len() - 1)]
}

#[derive(Clone, Debug)]
pub struct BoundedTable {
    f: BoundFunction,
    g: Vec<usize>,
    table: BTable,
}

impl BoundedTable {
    pub fn f(&self) -> &BoundFunction {
        &self.f
    }

    /// Inverse values `g(0), g(1), …` used by the fill.
    pub fn g(&self) -> &[usize] {
        &self.g
    }

    pub fn table(&self) -> &BTable {
        &self.table
    }

    pub fn into_table(self) -> BTable {
        self.table
    }

    pub fn a(&self, n: usize) -> &BigCount {
        self.table.a(n)
    }

    /// Levels `n` where `a^f_n` differs from `a^f_{n-1}` (and `n = 0`).
    pub fn distinct_levels(&self) -> Vec<usize> {
        distinct_levels(self.table.a_sequence())
    }
}

/// Indices at which a non-decreasing sequence changes value (0 included).
pub fn distinct_levels(a: &[BigCount]) -> Vec<usize> {
    (0..a.len()).filter(|&n| n == 0 || a[n] != a[n - 1]).collect()
}

/// Compares two level-size sequences after dropping repeated values.
pub fn same_up_to_repetition(a: &[BigCount], b: &[BigCount]) -> bool {
    let da: Vec<&BigCount> = distinct_levels(a).into_iter().map(|i| &a[i]).collect();
    let db: Vec<&BigCount> = distinct_levels(b).into_iter().map(|i| &b[i]).collect();
    let k = da.len().min(db.len());
    da[..k] == db[..k]
}

/// Fills `b^f_{n,m}` row by row for `0 ≤ m ≤ f(n-1)`:
///
/// `b_{n,m} = b_{n,m-1} + Σ_{k=1}^{n-g(m)-1} b_{n-k,m-1}·C(b_{m,m-1},k)
///            + C(b_{m,m-1}, n-g(m))·a_{g(m)}`.
///
/// Columns past `f(n-1)` repeat the `f(n-1)` cell and are not stored; that
/// cell is the increment `a_n - a_{n-1}`.
pub fn compute_bounded_table(f: &BoundFunction, n_max: usize) -> Result<BoundedTable> {
    f.validate(n_max)?;
    let mut inv = Inverse::new(f.clone());
    let mut rows: Vec<Vec<BigCount>> = vec![vec![BigCount::one()]];
    let mut a: Vec<BigCount> = vec![BigCount::one()];
    // binom[m] = C(b_{m,m-1}, k) for k ≤ n_max - g(m), built on first use
    let mut binom: Vec<Vec<BigCount>> = Vec::new();
    let mut g_values = Vec::new();

    for n in 1..=n_max {
        let last = f.eval(n - 1)?;
        let mut row = Vec::with_capacity(last + 2);
        row.push(BigCount::zero());
        for m in 0..=last {
            let gm = inv.get(m)?;
            if g_values.len() <= m {
                g_values.push(gm);
            }
            debug_assert!(gm < n);
            if binom.len() <= m {
                binom.push(binomial_row(rows[m].last().expect("nonempty"), n_max - gm));
            }
            let mut v = row[m].clone();
            for k in 1..(n - gm) {
                let Some(ck) = binom_at(&binom[m], k) else { break };
                let prev = read(&rows, n - k, m as isize - 1);
                if !prev.is_zero() {
                    v += prev * ck;
                }
            }
            if let Some(ck) = binom_at(&binom[m], n - gm) {
                v += ck * &a[gm];
            }
            row.push(v);
        }
        let inc = row.last().expect("nonempty");
        a.push(&a[n - 1] + inc);
        rows.push(row);
    }

    Ok(BoundedTable {
        f: f.clone(),
        g: g_values,
        table: BTable::from_rows(HierarchySpec::Bounded(f.clone()), rows),
    })
}

/// Where a value `ā_{ā_j}` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbarSource {
    /// Read from the computed prefix.
    Prefix,
    /// `ā_{ā_j} = 2^{ā_j}`, since level `ā_j` is the power set of level `j`.
    PowerSetLaw,
}

/// `ā_{ā_j}` given the prefix `ā_0..`, falling back to the power-set law when
/// the index lies beyond the prefix. `max_bits` bounds the size of `2^{ā_j}`.
pub fn abar_of_abar(prefix: &[BigCount], j: usize, max_bits: u64) -> Result<(BigCount, AbarSource)> {
    let idx = prefix
        .get(j)
        .ok_or_else(|| Error::Insufficient(format!("ā_{j} not computed")))?;
    if let Some(i) = idx.to_usize().filter(|&i| i < prefix.len()) {
        return Ok((prefix[i].clone(), AbarSource::Prefix));
    }
    let bits = idx
        .to_u64()
        .filter(|&b| b < max_bits)
        .ok_or_else(|| Error::ResourceCap {
            level: j,
            detail: format!("2^{idx} exceeds {max_bits} bits"),
        })?;
    Ok((BigUint::one() << bits, AbarSource::PowerSetLaw))
}

#[derive(Clone, Debug)]
pub struct MinBoundedTable {
    table: BTable,
}

impl MinBoundedTable {
    pub fn table(&self) -> &BTable {
        &self.table
    }

    pub fn into_table(self) -> BTable {
        self.table
    }

    pub fn n_max(&self) -> usize {
        self.table.n_max()
    }

    pub fn abar(&self, n: usize) -> &BigCount {
        self.table.a(n)
    }

    pub fn abar_sequence(&self) -> &[BigCount] {
        self.table.a_sequence()
    }

    /// `f̄(n) = min{m : ā_m > n}`.
    pub fn fbar(&self, n: usize) -> Result<usize> {
        fbar_from(self.abar_sequence(), n)
    }

    /// `ḡ(n) = ā_{n-1}`, `ḡ(0) = 0`.
    pub fn gbar(&self, n: usize) -> Result<BigCount> {
        if n == 0 {
            return Ok(BigCount::zero());
        }
        self.abar_sequence()
            .get(n - 1)
            .cloned()
            .ok_or_else(|| Error::Insufficient(format!("ā_{} not computed", n - 1)))
    }

    /// `f̄` tabulated on `0..len`, as a bound function.
    pub fn fbar_function(&self, len: usize) -> Result<BoundFunction> {
        let values = (0..len).map(|n| self.fbar(n)).collect::<Result<Vec<_>>>()?;
        BoundFunction::table(values)
    }
}

fn fbar_from(abar: &[BigCount], n: usize) -> Result<usize> {
    let target = BigCount::from(n);
    abar.iter()
        .position(|v| *v > target)
        .ok_or_else(|| Error::Insufficient(format!("no computed ā_m exceeds {n}")))
}

/// Fills `b̄_{n,m}` row by row for `0 ≤ m ≤ f̄(n-1)`:
///
/// `b̄_{n,m} = b̄_{n,m-1} + Σ_{k=1}^{n-ā_{m-1}-1} b̄_{n-k,m-1}·C(b̄_{m,m-1},k)
///            + ā_{ā_{m-1}}·C(b̄_{m,m-1}, n-ā_{m-1})`
///
/// with `ā_{-1} = 0` and `ā_m = Σ_{k≤m} b̄_{k,k-1}` grown alongside the rows.
pub fn compute_minbounded(n_max: usize) -> MinBoundedTable {
    let mut rows: Vec<Vec<BigCount>> = vec![vec![BigCount::one()]];
    let mut abar: Vec<BigCount> = vec![BigCount::one()];
    // binom[m] = C(b̄_{m,m-1}, k) for k ≤ n_max - ḡ(m), built on first use
    let mut binom: Vec<Vec<BigCount>> = Vec::new();

    for n in 1..=n_max {
        let last = fbar_from(&abar, n - 1).expect("ā_{n-1} ≥ n");
        let mut row = Vec::with_capacity(last + 2);
        row.push(BigCount::zero());
        for m in 0..=last {
            // ḡ(m) = ā_{m-1} ≤ n-1 because m ≤ f̄(n-1)
            let gm = if m == 0 {
                0
            } else {
                abar[m - 1].to_usize().expect("ā_{m-1} < n")
            };
            if binom.len() <= m {
                binom.push(binomial_row(rows[m].last().expect("nonempty"), n_max - gm));
            }
            let mut v = row[m].clone();
            for k in 1..(n - gm) {
                let Some(ck) = binom_at(&binom[m], k) else { break };
                let prev = read(&rows, n - k, m as isize - 1);
                if !prev.is_zero() {
                    v += prev * ck;
                }
            }
            if let Some(ck) = binom_at(&binom[m], n - gm) {
                let top = if m == 0 {
                    abar[0].clone()
                } else {
                    abar_of_abar(&abar, m - 1, u64::MAX).expect("index within prefix").0
                };
                v += ck * top;
            }
            row.push(v);
        }
        let inc = row.last().expect("nonempty");
        abar.push(&abar[n - 1] + inc);
        rows.push(row);
    }

    MinBoundedTable {
        table: BTable::from_rows(HierarchySpec::MinBounded, rows),
    }
}

#[derive(Clone, Debug)]
pub struct AtomsTable {
    u: usize,
    table: BTable,
}

impl AtomsTable {
    pub fn u(&self) -> usize {
        self.u
    }

    pub fn table(&self) -> &BTable {
        &self.table
    }

    pub fn into_table(self) -> BTable {
        self.table
    }

    /// `|A_n^U|`.
    pub fn size(&self, n: usize) -> &BigCount {
        self.table.a(n)
    }
}

/// Fills `b^u_{n,m}` for `u` atoms: base `b^u_{0,-1} = u+1`,
/// `b^u_{n,0} = C(u+1, n)`, and for `n > m ≥ 1`
///
/// `b_{n,m} = b_{n,m-1} + Σ_{k=1}^{n-m-1} b_{n-k,m-1}·C(b_{m,m-1},k)
///            + C(b_{m,m-1}, n-m)·(1 + Σ_{k=1}^{m} b_{k,k-1})`.
pub fn compute_atoms_table(u: usize, n_max: usize) -> AtomsTable {
    let base = BigCount::from(u + 1);
    let base_binom = binomial_row(&base, n_max);
    let mut rows: Vec<Vec<BigCount>> = vec![vec![base.clone()]];
    let mut binom: Vec<Vec<BigCount>> = vec![binomial_row(&base, n_max)];
    // tail[m] = 1 + Σ_{k=1}^{m} b_{k,k-1}
    let mut tail: Vec<BigCount> = vec![BigCount::one()];

    for n in 1..=n_max {
        let mut row = Vec::with_capacity(n + 1);
        row.push(BigCount::zero());
        row.push(base_binom.get(n).cloned().unwrap_or_default());
        for m in 1..n {
            let mut v = row[m].clone();
            for k in 1..(n - m) {
                let Some(ck) = binom_at(&binom[m], k) else { break };
                let prev = &rows[n - k][m];
                if !prev.is_zero() {
                    v += prev * ck;
                }
            }
            if let Some(ck) = binom_at(&binom[m], n - m) {
                v += ck * &tail[m];
            }
            row.push(v);
        }
        let inc = row.last().expect("nonempty").clone();
        tail.push(&tail[n - 1] + &inc);
        binom.push(binomial_row(&inc, n_max - n));
        rows.push(row);
    }

    AtomsTable {
        u,
        table: BTable::from_rows(HierarchySpec::Atoms(u), rows),
    }
}
