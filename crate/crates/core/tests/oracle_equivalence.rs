//! Brute-force levels against the recurrences, at every depth the oracle reaches.

use adjunctive::bound::BoundFunction;
use adjunctive::hfs::Universe;
use adjunctive::hierarchy::HierarchySpec;
use adjunctive::oracle::{
    build_levels, oracle_b, partition_counts, profile_counts, recurrence_terms, verify_ark_formula, LevelSets,
    OracleCaps, ProfileBy,
};
use adjunctive::recurrence::BTable;
use adjunctive::refinements::{compute_d_table, compute_r_table};
use adjunctive::BigCount;

fn levels(u: &mut Universe, spec: &HierarchySpec, n: usize) -> LevelSets {
    build_levels(u, spec, n, &OracleCaps::default()).unwrap()
}

fn assert_counts_agree(spec: &HierarchySpec, n: usize) {
    let mut u = Universe::new();
    let ls = levels(&mut u, spec, n);
    let table = spec.strategy().count_table(n).unwrap();
    for i in 0..=n {
        assert_eq!(BigCount::from(ls.level(i).len()), *table.a(i), "{spec} a_{i}");
        for m in -1..i as isize {
            assert_eq!(oracle_b(&ls, &u, i, m), *table.cell(i, m), "{spec} b_{{{i},{m}}}");
        }
    }
}

#[test]
fn plain_levels_match_every_cell() {
    assert_counts_agree(&HierarchySpec::Plain, 5);
}

#[test]
fn plain_partition_matches_recurrence_terms() {
    let mut u = Universe::new();
    let ls = levels(&mut u, &HierarchySpec::Plain, 5);
    let t: BTable = HierarchySpec::Plain.strategy().count_table(5).unwrap();
    for n in 1..=5 {
        for m in 0..n {
            let split = partition_counts(&ls, &u, n, m as isize).unwrap();
            let terms = recurrence_terms(n, m, |a, b| t.cell(a, b).clone(), |k| t.a(k).clone());
            assert_eq!(split.by_k, terms, "n = {n}, m = {m}");
            assert_eq!(split.total, *t.cell(n, m as isize));
        }
    }
}

#[test]
fn plain_profiles_match_histograms() {
    let mut u = Universe::new();
    let ls = levels(&mut u, &HierarchySpec::Plain, 5);
    let r = compute_r_table(5);
    let d = compute_d_table(5);
    for n in 0..=5 {
        for (by, table) in [(ProfileBy::Rank, &r), (ProfileBy::Cardinality, &d)] {
            let hist = profile_counts(&ls, &u, n, by).unwrap();
            let prof = table.profile(n).unwrap();
            assert!(hist.keys().all(|&k| k < prof.len()), "{by:?} n = {n}");
            for (t, v) in prof.iter().enumerate() {
                assert_eq!(hist.get(&t).cloned().unwrap_or_default(), *v, "{by:?} n = {n}, t = {t}");
            }
        }
    }
}

#[test]
fn ark_formula_on_all_of_level_five() {
    let mut u = Universe::new();
    let ls = levels(&mut u, &HierarchySpec::Plain, 5);
    let report = verify_ark_formula(&ls, &u).unwrap();
    assert_eq!(report.checked, 11680);
    assert!(
        report.ok(),
        "{:?}",
        &report.mismatches[..report.mismatches.len().min(5)]
    );
}

#[test]
fn atoms_levels_match() {
    for k in 1..=2 {
        assert_counts_agree(&HierarchySpec::Atoms(k), 4);
    }
}

#[test]
fn bounded_levels_match() {
    assert_counts_agree(&HierarchySpec::Bounded(BoundFunction::half()), 12);
    assert_counts_agree(&HierarchySpec::Bounded(BoundFunction::sqrt()), 33);
    assert_counts_agree(&HierarchySpec::Bounded(BoundFunction::log2()), 23);
}

#[test]
fn minbounded_levels_match() {
    assert_counts_agree(&HierarchySpec::MinBounded, 5);
}

#[test]
fn levels_are_nested_and_contain_the_empty_set() {
    let specs = [
        (HierarchySpec::Plain, 5),
        (HierarchySpec::Atoms(2), 4),
        (HierarchySpec::Bounded(BoundFunction::half()), 10),
        (HierarchySpec::MinBounded, 5),
    ];
    for (spec, n) in specs {
        let mut u = Universe::new();
        let ls = levels(&mut u, &spec, n);
        for i in 0..=n {
            assert!(ls.level(i).contains(u.empty_set()), "{spec} level {i}");
            if i > 0 {
                assert!(ls.level(i - 1).is_subset_of(ls.level(i)), "{spec} level {i}");
            }
        }
    }
}

#[test]
fn reductions_give_identical_levels() {
    let mut u = Universe::new();
    let plain = levels(&mut u, &HierarchySpec::Plain, 5);
    let no_atoms = levels(&mut u, &HierarchySpec::Atoms(0), 4);
    let identity = levels(&mut u, &HierarchySpec::Bounded(BoundFunction::identity()), 5);
    for n in 0..=5 {
        assert_eq!(
            plain.level(n).members(),
            identity.level(n).members(),
            "identity bound, level {n}"
        );
        if n <= 4 {
            assert_eq!(
                plain.level(n).members(),
                no_atoms.level(n).members(),
                "no atoms, level {n}"
            );
        }
    }
}

/// Adjoining `y ∉ x` with `x ⊆ A_{ark(y)}` raises the adjunctive rank to
/// `max(ark x, ark y) + 1`; in general it stays within one of the maximum.
#[test]
fn adjunction_rank_on_all_pairs_of_level_four() {
    let mut u = Universe::new();
    let ls = levels(&mut u, &HierarchySpec::Plain, 4);
    let members = ls.level(4).members().to_vec();
    for &x in &members {
        for &y in &members {
            let z = u.adjoin(x, y);
            let hi = u.ark(x).max(u.ark(y));
            assert!(hi <= u.ark(z) && u.ark(z) <= hi + 1);
            assert!(u.rank(z) <= u.ark(z));
            let below = ls.level(u.ark(y) as usize);
            if !u.contains(x, y) && u.elements(x).iter().all(|&e| below.contains(e)) && below.contains(x) {
                assert_eq!(u.ark(z), hi + 1, "{} ∪ {{{}}}", u.format(x), u.format(y));
            }
        }
    }
}
