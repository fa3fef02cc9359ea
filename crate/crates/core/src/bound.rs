//! Bound functions `f` limiting the level the adjoined element is drawn from.
//!
//! Each rule implements [`BoundRule`] and is registered by name; a table rule
//! carries explicit values `f(0), f(1), …` and is only defined on that range.

use std::fmt;
use std::sync::Arc;

use num_integer::Roots;

use crate::error::{Error, Result};

pub trait BoundRule: Send + Sync {
    /// Descriptor that [`BoundFunction::parse`] maps back to this rule.
    fn descriptor(&self) -> String;

    /// `f(n)`, or `None` outside the rule's domain.
    fn eval(&self, n: usize) -> Option<usize>;
}

struct Identity;
struct Half;
struct Sqrt;
struct Log2;
struct Table(Vec<usize>);

impl BoundRule for Identity {
    fn descriptor(&self) -> String {
        "identity".into()
    }
    fn eval(&self, n: usize) -> Option<usize> {
        Some(n)
    }
}

impl BoundRule for Half {
    fn descriptor(&self) -> String {
        "half".into()
    }
    fn eval(&self, n: usize) -> Option<usize> {
        Some(n.div_ceil(2))
    }
}

impl BoundRule for Sqrt {
    fn descriptor(&self) -> String {
        "sqrt".into()
    }
    fn eval(&self, n: usize) -> Option<usize> {
        Some(n.sqrt())
    }
}

impl BoundRule for Log2 {
    fn descriptor(&self) -> String {
        "log2".into()
    }
    fn eval(&self, n: usize) -> Option<usize> {
        // ⌊log2(n+1)⌋ is the bit length of n+1, minus one
        Some((n + 1).ilog2() as usize)
    }
}

impl BoundRule for Table {
    fn descriptor(&self) -> String {
        let vals: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        format!("table:{}", vals.join(","))
    }
    fn eval(&self, n: usize) -> Option<usize> {
        self.0.get(n).copied()
    }
}

type Constructor = fn() -> Arc<dyn BoundRule>;

/// Built-in rules by name.
pub const BUILTINS: &[(&str, Constructor)] = &[
    ("identity", || Arc::new(Identity)),
    ("half", || Arc::new(Half)),
    ("sqrt", || Arc::new(Sqrt)),
    ("log2", || Arc::new(Log2)),
];

/// A sublinear, unbounded `f: ℕ → ℕ`.
#[derive(Clone)]
pub struct BoundFunction(Arc<dyn BoundRule>);

impl fmt::Debug for BoundFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundFunction({})", self.descriptor())
    }
}

impl PartialEq for BoundFunction {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor() == other.descriptor()
    }
}

impl BoundFunction {
    pub fn identity() -> Self {
        Self(Arc::new(Identity))
    }

    pub fn half() -> Self {
        Self(Arc::new(Half))
    }

    pub fn sqrt() -> Self {
        Self(Arc::new(Sqrt))
    }

    pub fn log2() -> Self {
        Self(Arc::new(Log2))
    }

    /// Explicit values `f(0), f(1), …`; sublinearity is checked here.
    pub fn table(values: Vec<usize>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(i, v)| **v > *i) {
            return Err(Error::InvalidBound(format!(
                "not sublinear at index {i}: f({i}) = {v} > {i}"
            )));
        }
        Ok(Self(Arc::new(Table(values))))
    }

    pub fn from_rule(rule: Arc<dyn BoundRule>) -> Self {
        Self(rule)
    }

    /// Parses a descriptor: a built-in name or `table:v0,v1,…`.
    /// (`file:` paths are resolved by [`crate::io::parse_bound_function`].)
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(body) = spec.strip_prefix("table:") {
            let values = parse_values(body.split(','))?;
            return Self::table(values);
        }
        BUILTINS
            .iter()
            .find(|(name, _)| *name == spec)
            .map(|(_, ctor)| Self(ctor()))
            .ok_or_else(|| {
                let names: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
                Error::InvalidBound(format!(
                    "unknown bound function '{spec}' (known: {}, table:…, file:…)",
                    names.join(", ")
                ))
            })
    }

    pub fn descriptor(&self) -> String {
        self.0.descriptor()
    }

    pub fn is_identity(&self) -> bool {
        self.descriptor() == "identity"
    }

    pub fn eval(&self, n: usize) -> Result<usize> {
        self.0.eval(n).ok_or_else(|| {
            Error::InvalidBound(format!("{}: range exhausted, f({n}) is not defined", self.descriptor()))
        })
    }

    /// Checks `f(n) ≤ n` for every `n < n_max`, i.e. every value the bounded
    /// recurrence consults up to level `n_max`.
    pub fn validate(&self, n_max: usize) -> Result<()> {
        for n in 0..n_max {
            let v = self.eval(n)?;
            if v > n {
                return Err(Error::InvalidBound(format!(
                    "{}: not sublinear at index {n}: f({n}) = {v}",
                    self.descriptor()
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn parse_values<'a, I: Iterator<Item = &'a str>>(items: I) -> Result<Vec<usize>> {
    items
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<usize>()
                .map_err(|e| Error::InvalidBound(format!("value {i} ('{s}'): {e}")))
        })
        .collect()
}

/// Memoized inverse `g(m) = min{t : f(t) ≥ m}`.
///
/// `g` is non-decreasing, so each query resumes the scan where the previous
/// one stopped.
#[derive(Debug)]
pub struct Inverse {
    f: BoundFunction,
    values: Vec<usize>,
}

impl Inverse {
    pub fn new(f: BoundFunction) -> Self {
        Inverse { f, values: vec![0] }
    }

    pub fn get(&mut self, m: usize) -> Result<usize> {
        while self.values.len() <= m {
            let target = self.values.len();
            let mut t = *self.values.last().expect("g(0) present");
            while self.f.eval(t)? < target {
                t += 1;
            }
            self.values.push(t);
        }
        Ok(self.values[m])
    }
}

/// `g(m) = min{t : f(t) ≥ m}` by a fresh linear scan.
pub fn inverse_g(f: &BoundFunction, m: usize) -> Result<usize> {
    let mut t = 0;
    while f.eval(t)? < m {
        t += 1;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_values() {
        let h = BoundFunction::half();
        assert_eq!(
            (0..6).map(|n| h.eval(n).unwrap()).collect::<Vec<_>>(),
            [0, 1, 1, 2, 2, 3]
        );
        let s = BoundFunction::sqrt();
        assert_eq!(
            (0..10).map(|n| s.eval(n).unwrap()).collect::<Vec<_>>(),
            [0, 1, 1, 1, 2, 2, 2, 2, 2, 3]
        );
        let l = BoundFunction::log2();
        assert_eq!(
            (0..8).map(|n| l.eval(n).unwrap()).collect::<Vec<_>>(),
            [0, 1, 1, 2, 2, 2, 2, 3]
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse_g(&BoundFunction::identity(), 7).unwrap(), 7);
        assert_eq!(inverse_g(&BoundFunction::half(), 2).unwrap(), 3);
        assert_eq!(inverse_g(&BoundFunction::sqrt(), 2).unwrap(), 4);
        assert_eq!(inverse_g(&BoundFunction::log2(), 0).unwrap(), 0);
    }

    #[test]
    fn memoized_inverse_matches_scan() {
        for f in [BoundFunction::half(), BoundFunction::sqrt(), BoundFunction::log2()] {
            let mut inv = Inverse::new(f.clone());
            for m in 0..12 {
                assert_eq!(inv.get(m).unwrap(), inverse_g(&f, m).unwrap(), "{f:?} m={m}");
            }
        }
    }

    #[test]
    fn table_validation() {
        assert!(BoundFunction::table(vec![0, 2]).is_err());
        let f = BoundFunction::table(vec![0, 0, 1, 1, 1]).unwrap();
        assert!(f.validate(5).is_ok());
        assert!(f.validate(10).is_err());
        assert!(inverse_g(&f, 2).is_err());
        assert_eq!(BoundFunction::parse(&f.descriptor()).unwrap(), f);
    }

    #[test]
    fn unknown_name() {
        assert!(BoundFunction::parse("cube").is_err());
    }
}
