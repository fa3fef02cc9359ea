//! Brute-force construction of hierarchy levels as explicit sets.
//!
//! Each level is built by literally applying its defining equation to the
//! previous level(s). The resulting counts are ground truth for the
//! recurrences at small depth.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::bound::BoundFunction;
use crate::error::{Error, Result};
use crate::hfs::{HfSet, Universe};
use crate::hierarchy::HierarchySpec;
use crate::recurrence::binomial_big;
use crate::BigCount;

/// Depth and size limits for brute-force construction.
#[derive(Clone, Debug)]
pub struct OracleCaps {
    pub plain_depth: usize,
    pub minbounded_depth: usize,
    pub atoms_depth: usize,
    pub atoms_max_u: usize,
    pub cumulative_depth: usize,
    /// Largest admissible level for bounded hierarchies.
    pub max_level_size: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            plain_depth: 5,
            minbounded_depth: 5,
            atoms_depth: 4,
            atoms_max_u: 3,
            cumulative_depth: 5,
            max_level_size: 200_000,
        }
    }
}

/// One materialized level: member list plus a membership bitset over ids.
#[derive(Clone, Debug)]
pub struct Level {
    members: Vec<HfSet>,
    bits: FixedBitSet,
}

impl Level {
    fn new(universe_len: usize) -> Self {
        Level {
            members: Vec::new(),
            bits: FixedBitSet::with_capacity(universe_len),
        }
    }

    fn insert(&mut self, x: HfSet) -> bool {
        let i = x.index();
        if i >= self.bits.len() {
            self.bits.grow(i + 1);
        }
        if self.bits.put(i) {
            false
        } else {
            self.members.push(x);
            true
        }
    }

    pub fn contains(&self, x: HfSet) -> bool {
        x.index() < self.bits.len() && self.bits.contains(x.index())
    }

    pub fn members(&self) -> &[HfSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset_of(&self, other: &Level) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LevelKind {
    Hierarchy(HierarchySpec),
    /// Von Neumann levels `V_n`.
    Cumulative,
}

#[derive(Clone, Debug)]
pub struct LevelSets {
    kind: LevelKind,
    levels: Vec<Level>,
    atoms: Vec<HfSet>,
}

impl LevelSets {
    pub fn kind(&self) -> &LevelKind {
        &self.kind
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn atoms(&self) -> &[HfSet] {
        &self.atoms
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    /// Level `n` for `n ≥ -1`; level `-1` is empty.
    fn level_at(&self, n: isize) -> Option<&Level> {
        (n >= 0).then(|| &self.levels[n as usize])
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            return Err(Error::OutOfRange(format!(
                "level {n} > computed depth {}",
                self.depth()
            )));
        }
        Ok(())
    }

    /// Lines of textual notation for level `n`, in canonical order.
    pub fn dump_level(&self, u: &Universe, n: usize) -> Result<String> {
        self.check_index(n)?;
        let mut members = self.levels[n].members.clone();
        members.sort_by(|a, b| u.compare(*a, *b));
        let mut out = String::new();
        for x in members {
            out.push_str(&u.format(x));
            out.push('\n');
        }
        Ok(out)
    }
}

/// Builds levels `0..=n_max` of the hierarchy named by `spec`.
pub fn build_levels(u: &mut Universe, spec: &HierarchySpec, n_max: usize, caps: &OracleCaps) -> Result<LevelSets> {
    match spec {
        HierarchySpec::Plain => {
            cap(n_max, caps.plain_depth, "plain depth")?;
            build_bounded_levels(u, spec, &BoundFunction::identity(), n_max, usize::MAX)
        }
        HierarchySpec::Bounded(f) => {
            f.validate(n_max)?;
            build_bounded_levels(u, spec, f, n_max, caps.max_level_size)
        }
        HierarchySpec::Atoms(k) => {
            cap(n_max, caps.atoms_depth, "atoms depth")?;
            if *k > caps.atoms_max_u {
                return Err(Error::ResourceCap {
                    level: 0,
                    detail: format!("{k} atoms exceeds cap {}", caps.atoms_max_u),
                });
            }
            build_atom_levels(u, *k, n_max)
        }
        HierarchySpec::MinBounded => {
            cap(n_max, caps.minbounded_depth, "minimally bounded depth")?;
            build_minbounded_levels(u, n_max)
        }
    }
}

fn cap(n: usize, limit: usize, what: &str) -> Result<()> {
    if n > limit {
        return Err(Error::ResourceCap {
            level: n,
            detail: format!("{what} cap is {limit}"),
        });
    }
    Ok(())
}

/// `A_{n+1} = {∅} ∪ {x ∪ {y} | x ∈ A_n, y ∈ A_{f(n)}}`.
fn build_bounded_levels(
    u: &mut Universe,
    spec: &HierarchySpec,
    f: &BoundFunction,
    n_max: usize,
    max_size: usize,
) -> Result<LevelSets> {
    let mut levels = Vec::with_capacity(n_max + 1);
    let mut first = Level::new(u.len());
    first.insert(u.empty_set());
    levels.push(first);
    for n in 0..n_max {
        let src = f.eval(n)?;
        let xs = levels[n].members.clone();
        let ys = levels[src].members.clone();
        let mut next = Level::new(u.len());
        next.insert(u.empty_set());
        for &x in &xs {
            for &y in &ys {
                let z = u.adjoin(x, y);
                if next.insert(z) && next.len() > max_size {
                    return Err(Error::ResourceCap {
                        level: n + 1,
                        detail: format!("level size exceeds {max_size}"),
                    });
                }
            }
        }
        levels.push(next);
    }
    Ok(LevelSets {
        kind: LevelKind::Hierarchy(spec.clone()),
        levels,
        atoms: Vec::new(),
    })
}

/// `A^U_0 = {∅} ∪ U`, `A^U_{n+1} = {∅} ∪ U ∪ {x ∪ {y} | x ∈ A^U_n \ U, y ∈ A^U_n}`.
fn build_atom_levels(u: &mut Universe, count: usize, n_max: usize) -> Result<LevelSets> {
    let atoms: Vec<HfSet> = (1..=count).map(|i| u.atom(&format!("u{i}"))).collect();
    let base = |u: &Universe| {
        let mut l = Level::new(u.len());
        l.insert(u.empty_set());
        for &a in &atoms {
            l.insert(a);
        }
        l
    };
    let mut levels = vec![base(u)];
    for n in 0..n_max {
        let xs: Vec<HfSet> = levels[n].members.iter().copied().filter(|&x| !u.is_atom(x)).collect();
        let ys = levels[n].members.clone();
        let mut next = base(u);
        for &x in &xs {
            for &y in &ys {
                let z = u.adjoin(x, y);
                next.insert(z);
            }
        }
        levels.push(next);
    }
    Ok(LevelSets {
        kind: LevelKind::Hierarchy(HierarchySpec::Atoms(count)),
        levels,
        atoms,
    })
}

/// `Ā_{n+1} = {∅} ∪ {x ∪ {y} | x ∈ Ā_n, ∃m (P(Ā_m) ⊆ Ā_n ∧ y ∈ Ā_{m+1})}`
/// with `Ā_{-1} = ∅`. The largest witness `m` is tracked through the count
/// `|Ā_n ∩ P(Ā_{m+1})|`, compared against `2^{|Ā_{m+1}|}`.
fn build_minbounded_levels(u: &mut Universe, n_max: usize) -> Result<LevelSets> {
    let mut first = Level::new(u.len());
    first.insert(u.empty_set());
    let mut levels = vec![first];
    // witness m, stored as m + 1 so that Ā_{-1} is index 0
    let mut witness: usize = 0;
    // number of sets in the current level whose elements all lie in Ā_{witness}
    let mut candidate_count: usize = 1;

    for n in 0..n_max {
        // advance the witness while P(Ā_{witness}) ⊆ Ā_n
        loop {
            let cand = &levels[witness];
            let full = 1usize.checked_shl(cand.len() as u32).unwrap_or(usize::MAX);
            if candidate_count < full || witness + 1 > n {
                break;
            }
            witness += 1;
            let cand = &levels[witness];
            candidate_count = levels[n]
                .members
                .iter()
                .filter(|&&x| u.elements(x).iter().all(|&e| cand.contains(e)))
                .count();
        }
        let xs = levels[n].members.clone();
        let ys = levels[witness].members.clone();
        let mut next = Level::new(u.len());
        next.insert(u.empty_set());
        for &x in &xs {
            for &y in &ys {
                let z = u.adjoin(x, y);
                next.insert(z);
            }
        }
        // levels only grow, so count only the new members against Ā_{witness}
        let cand = &levels[witness];
        candidate_count += next
            .members
            .iter()
            .filter(|&&x| !levels[n].contains(x))
            .filter(|&&x| u.elements(x).iter().all(|&e| cand.contains(e)))
            .count();
        levels.push(next);
    }
    Ok(LevelSets {
        kind: LevelKind::Hierarchy(HierarchySpec::MinBounded),
        levels,
        atoms: Vec::new(),
    })
}

/// Von Neumann levels `V_0 = ∅`, `V_{n+1} = P(V_n)`.
pub fn build_cumulative(u: &mut Universe, n_max: usize, caps: &OracleCaps) -> Result<LevelSets> {
    cap(n_max, caps.cumulative_depth, "cumulative depth")?;
    let mut levels = vec![Level::new(u.len())];
    for n in 0..n_max {
        let mut base = levels[n].members.clone();
        base.sort_by(|a, b| u.compare(*a, *b));
        let k = base.len();
        if k >= 32 {
            return Err(Error::ResourceCap {
                level: n + 1,
                detail: format!("2^{k} subsets"),
            });
        }
        let mut next = Level::new(u.len());
        for mask in 0u64..(1u64 << k) {
            // a subsequence of a sorted list is sorted
            let elems: Vec<HfSet> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| base[i]).collect();
            let x = u.intern_sorted(elems);
            next.insert(x);
        }
        levels.push(next);
    }
    Ok(LevelSets {
        kind: LevelKind::Cumulative,
        levels,
        atoms: Vec::new(),
    })
}

/// `|B_{n,m}|` together with its split by `k = |x ∩ (A_m \ A_{m-1})|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionCounts {
    pub total: BigCount,
    /// `by_k[k]` for `0 ≤ k ≤ n - m`.
    pub by_k: Vec<BigCount>,
}

/// Counts `B_{n,m} = {x ∈ A_n \ A_{n-1} : x ⊆ A_m}` directly, for `n > m ≥ -1`.
pub fn partition_counts(ls: &LevelSets, u: &Universe, n: usize, m: isize) -> Result<PartitionCounts> {
    ls.check_index(n)?;
    if m < -1 || m >= n as isize {
        return Err(Error::OutOfRange(format!("need n > m ≥ -1, got n = {n}, m = {m}")));
    }
    let width = (n as isize - m) as usize;
    let mut by_k = vec![0usize; width + 1];
    let prev = ls.level_at(n as isize - 1);
    let lm = ls.level_at(m);
    let lm1 = ls.level_at(m - 1);
    for &x in ls.levels[n].members() {
        if prev.is_some_and(|p| p.contains(x)) {
            continue;
        }
        let elems = u.elements(x);
        if !elems.iter().all(|&e| lm.is_some_and(|l| l.contains(e))) {
            continue;
        }
        let k = elems.iter().filter(|&&e| !lm1.is_some_and(|l| l.contains(e))).count();
        if k > width {
            return Err(Error::Unsupported(format!("split index {k} exceeds n - m = {width}")));
        }
        by_k[k] += 1;
    }
    let by_k: Vec<BigCount> = by_k.into_iter().map(BigCount::from).collect();
    let total = by_k.iter().sum();
    Ok(PartitionCounts { total, by_k })
}

/// The three summands of the level recurrence, evaluated from `b` counts
/// supplied by `b(n, m)` and level sizes `a(m)`: the `k = 0` term, one term
/// per `1 ≤ k ≤ n-m-1`, and the `k = n-m` term.
pub fn recurrence_terms<B, A>(n: usize, m: usize, b: B, a: A) -> Vec<BigCount>
where
    B: Fn(usize, isize) -> BigCount,
    A: Fn(usize) -> BigCount,
{
    let c_m = b(m, m as isize - 1);
    let mut terms = vec![b(n, m as isize - 1)];
    for k in 1..(n - m) {
        terms.push(b(n - k, m as isize - 1) * binomial_big(&c_m, k));
    }
    terms.push(binomial_big(&c_m, n - m) * a(m));
    terms
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProfileBy {
    Rank,
    Cardinality,
}

/// Histogram of level `n` by rank or cardinality.
pub fn profile_counts(ls: &LevelSets, u: &Universe, n: usize, by: ProfileBy) -> Result<BTreeMap<usize, BigCount>> {
    ls.check_index(n)?;
    let mut hist: BTreeMap<usize, BigCount> = BTreeMap::new();
    for &x in ls.levels[n].members() {
        let key = match by {
            ProfileBy::Rank => u.rank(x) as usize,
            ProfileBy::Cardinality => u.cardinality(x),
        };
        *hist.entry(key).or_insert_with(BigCount::zero) += 1u32;
    }
    Ok(hist)
}

#[derive(Clone, Debug)]
pub struct ArkReport {
    pub checked: usize,
    /// `(set, formula value, level-membership value)` for every disagreement.
    pub mismatches: Vec<(HfSet, u32, u32)>,
}

impl ArkReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the recursive adjunctive rank with `min{n : x ∈ A_n}` on every
/// member of the deepest level.
pub fn verify_ark_formula(ls: &LevelSets, u: &Universe) -> Result<ArkReport> {
    if ls.kind != LevelKind::Hierarchy(HierarchySpec::Plain) {
        return Err(Error::Unsupported(
            "adjunctive rank is defined on the plain hierarchy".into(),
        ));
    }
    let deepest = &ls.levels[ls.depth()];
    let mut mismatches = Vec::new();
    for &x in deepest.members() {
        let by_levels = ls.levels.iter().position(|l| l.contains(x)).expect("member of deepest") as u32;
        if u.ark(x) != by_levels {
            mismatches.push((x, u.ark(x), by_levels));
        }
    }
    Ok(ArkReport {
        checked: deepest.len(),
        mismatches,
    })
}

/// `b(n, m)` from materialized levels, as a plain function for
/// [`recurrence_terms`].
pub fn oracle_b(ls: &LevelSets, u: &Universe, n: usize, m: isize) -> BigCount {
    if m >= n as isize {
        return oracle_b(ls, u, n, n as isize - 1);
    }
    partition_counts(ls, u, n, m).map(|p| p.total).unwrap_or_default()
}
