//! Hierarchy variants as interchangeable counting strategies.
//!
//! Every variant offers two independent routes to its level sizes: the exact
//! recurrence ([`Hierarchy::count_table`]) and brute-force construction
//! ([`Hierarchy::build_levels`]). Variants are registered by name and chosen
//! at runtime from a descriptor such as `plain`, `atoms:2`, `bounded:half` or
//! `minbounded`.

use std::fmt;

use crate::bound::BoundFunction;
use crate::bounded::{compute_atoms_table, compute_bounded_table, compute_minbounded};
use crate::error::{Error, Result};
use crate::hfs::Universe;
use crate::oracle::{self, LevelSets, OracleCaps};
use crate::recurrence::{compute_b_table, BTable};

/// Descriptor of a hierarchy variant.
#[derive(Clone, Debug, PartialEq)]
pub enum HierarchySpec {
    Plain,
    /// Sets with the given number of atoms.
    Atoms(usize),
    Bounded(BoundFunction),
    MinBounded,
}

impl HierarchySpec {
    pub fn descriptor(&self) -> String {
        match self {
            HierarchySpec::Plain => "plain".into(),
            HierarchySpec::Atoms(u) => format!("atoms:{u}"),
            HierarchySpec::Bounded(f) => format!("bounded:{}", f.descriptor()),
            HierarchySpec::MinBounded => "minbounded".into(),
        }
    }

    /// Inverse of [`HierarchySpec::descriptor`], via the registry.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(construct(text)?.spec())
    }

    pub fn strategy(&self) -> Box<dyn Hierarchy> {
        match self {
            HierarchySpec::Plain => Box::new(Plain),
            HierarchySpec::Atoms(u) => Box::new(Atoms(*u)),
            HierarchySpec::Bounded(f) => Box::new(Bounded(f.clone())),
            HierarchySpec::MinBounded => Box::new(MinBounded),
        }
    }
}

impl fmt::Display for HierarchySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

pub trait Hierarchy {
    fn spec(&self) -> HierarchySpec;

    /// Exact `b_{n,m}` table through level `n_max`.
    fn count_table(&self, n_max: usize) -> Result<BTable>;

    /// Brute-force levels through `n_max`.
    fn build_levels(&self, u: &mut Universe, n_max: usize, caps: &OracleCaps) -> Result<LevelSets> {
        oracle::build_levels(u, &self.spec(), n_max, caps)
    }
}

struct Plain;
struct Atoms(usize);
struct Bounded(BoundFunction);
struct MinBounded;

impl Hierarchy for Plain {
    fn spec(&self) -> HierarchySpec {
        HierarchySpec::Plain
    }
    fn count_table(&self, n_max: usize) -> Result<BTable> {
        Ok(compute_b_table(n_max))
    }
}

impl Hierarchy for Atoms {
    fn spec(&self) -> HierarchySpec {
        HierarchySpec::Atoms(self.0)
    }
    fn count_table(&self, n_max: usize) -> Result<BTable> {
        Ok(compute_atoms_table(self.0, n_max).into_table())
    }
}

impl Hierarchy for Bounded {
    fn spec(&self) -> HierarchySpec {
        HierarchySpec::Bounded(self.0.clone())
    }
    fn count_table(&self, n_max: usize) -> Result<BTable> {
        Ok(compute_bounded_table(&self.0, n_max)?.into_table())
    }
}

impl Hierarchy for MinBounded {
    fn spec(&self) -> HierarchySpec {
        HierarchySpec::MinBounded
    }
    fn count_table(&self, n_max: usize) -> Result<BTable> {
        Ok(compute_minbounded(n_max).into_table())
    }
}

type Constructor = fn(Option<&str>) -> Result<Box<dyn Hierarchy>>;

fn no_arg(name: &str, arg: Option<&str>) -> Result<()> {
    match arg {
        None => Ok(()),
        Some(a) => Err(Error::Unsupported(format!("{name} takes no parameter, got '{a}'"))),
    }
}

/// Registered variants: name and constructor taking the text after `name:`.
pub const REGISTRY: &[(&str, Constructor)] = &[
    ("plain", |arg| {
        no_arg("plain", arg)?;
        Ok(Box::new(Plain))
    }),
    ("atoms", |arg| {
        let arg = arg.ok_or_else(|| Error::Unsupported("atoms needs a count, e.g. atoms:2".into()))?;
        let u = arg
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Unsupported(format!("atoms count '{arg}': {e}")))?;
        Ok(Box::new(Atoms(u)))
    }),
    ("bounded", |arg| {
        let arg = arg.ok_or_else(|| Error::Unsupported("bounded needs a bound, e.g. bounded:half".into()))?;
        Ok(Box::new(Bounded(BoundFunction::parse(arg)?)))
    }),
    ("minbounded", |arg| {
        no_arg("minbounded", arg)?;
        Ok(Box::new(MinBounded))
    }),
];

/// Looks up `name[:param]` in the registry.
pub fn construct(descriptor: &str) -> Result<Box<dyn Hierarchy>> {
    let (name, arg) = match descriptor.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a)),
        None => (descriptor.trim(), None),
    };
    let (_, ctor) = REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Unsupported(format!("unknown hierarchy '{name}'")))?;
    ctor(arg)
}

pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for d in [
            "plain",
            "atoms:3",
            "bounded:half",
            "bounded:log2",
            "bounded:table:0,1,1,2",
            "minbounded",
        ] {
            assert_eq!(HierarchySpec::parse(d).unwrap().descriptor(), d);
        }
        assert!(HierarchySpec::parse("plain:1").is_err());
        assert!(HierarchySpec::parse("atoms").is_err());
        assert!(HierarchySpec::parse("bounded:cube").is_err());
        assert!(HierarchySpec::parse("nope").is_err());
    }

    #[test]
    fn strategies_agree_with_oracle_at_small_depth() {
        for d in ["plain", "atoms:1", "bounded:half", "minbounded"] {
            let h = construct(d).unwrap();
            let t = h.count_table(4).unwrap();
            let mut u = Universe::new();
            let ls = h.build_levels(&mut u, 4, &OracleCaps::default()).unwrap();
            let sizes: Vec<String> = ls.sizes().iter().map(|s| s.to_string()).collect();
            let counts: Vec<String> = t.a_sequence().iter().map(|v| v.to_str_radix(10)).collect();
            assert_eq!(sizes, counts, "{d}");
        }
    }
}
