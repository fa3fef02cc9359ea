//! Interned hereditarily finite sets.
//!
//! Every set lives in a [`Universe`], an append-only interning table. A set is
//! identified by a dense [`HfSet`] handle, so extensional equality is handle
//! equality. Elements are kept sorted in the canonical order, which coincides
//! with the numeric order of Ackermann codes on pure sets; comparisons never
//! materialize the codes themselves.
//!
//! Rank and adjunctive rank are computed once, when a node is interned, since
//! all of its elements already exist at that point.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default limit on the bit length of Ackermann codes.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// Handle to an interned set or atom.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct HfSet(u32);

impl HfSet {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug)]
enum Kind {
    Set(Box<[HfSet]>),
    Atom(String),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    rank: u32,
    ark: u32,
    code: OnceLock<BigUint>,
}

/// Append-only interning table for hereditarily finite sets (and atoms).
///
/// Inserts take `&mut self`; every query takes `&self`, so a finished universe
/// can be shared for concurrent reads.
#[derive(Debug)]
pub struct Universe {
    nodes: Vec<Node>,
    index: HashMap<Box<[HfSet]>, HfSet>,
    atoms: HashMap<String, HfSet>,
    empty: HfSet,
    bit_budget: u64,
}

impl Default for Universe {
    fn default() -> Self {
        Self::new()
    }
}

impl Universe {
    pub fn new() -> Self {
        Self::with_bit_budget(DEFAULT_BIT_BUDGET)
    }

    pub fn with_bit_budget(bit_budget: u64) -> Self {
        let mut u = Universe {
            nodes: Vec::new(),
            index: HashMap::new(),
            atoms: HashMap::new(),
            empty: HfSet(0),
            bit_budget,
        };
        u.empty = u.intern_sorted(Vec::new());
        u
    }

    pub fn bit_budget(&self) -> u64 {
        self.bit_budget
    }

    /// Number of interned nodes (sets and atoms).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn empty_set(&self) -> HfSet {
        self.empty
    }

    /// Returns the atom with the given label, creating it on first use.
    pub fn atom(&mut self, label: &str) -> HfSet {
        if let Some(&id) = self.atoms.get(label) {
            return id;
        }
        let id = self.push(Node {
            kind: Kind::Atom(label.to_string()),
            rank: 0,
            ark: 0,
            code: OnceLock::new(),
        });
        self.atoms.insert(label.to_string(), id);
        id
    }

    pub fn is_atom(&self, x: HfSet) -> bool {
        matches!(self.node(x).kind, Kind::Atom(_))
    }

    pub fn atom_label(&self, x: HfSet) -> Option<&str> {
        match &self.node(x).kind {
            Kind::Atom(l) => Some(l),
            Kind::Set(_) => None,
        }
    }

    /// Elements in ascending canonical order. Atoms have none.
    pub fn elements(&self, x: HfSet) -> &[HfSet] {
        match &self.node(x).kind {
            Kind::Set(e) => e,
            Kind::Atom(_) => &[],
        }
    }

    pub fn cardinality(&self, x: HfSet) -> usize {
        self.elements(x).len()
    }

    pub fn contains(&self, x: HfSet, y: HfSet) -> bool {
        self.elements(x).binary_search_by(|e| self.compare(*e, y)).is_ok()
    }

    pub fn is_subset(&self, x: HfSet, y: HfSet) -> bool {
        self.elements(x).iter().all(|&e| self.contains(y, e))
    }

    /// Classical rank: 0 for the empty set, else one more than the largest
    /// element rank. Atoms have rank 0.
    pub fn rank(&self, x: HfSet) -> u32 {
        self.node(x).rank
    }

    /// Adjunctive rank: the least level of the adjunctive hierarchy holding `x`.
    pub fn ark(&self, x: HfSet) -> u32 {
        self.node(x).ark
    }

    /// `x ∪ {y}`. Returns `x` itself when `y` is already a member.
    ///
    /// # Panics
    /// If `x` is an atom.
    pub fn adjoin(&mut self, x: HfSet, y: HfSet) -> HfSet {
        let elems = match &self.node(x).kind {
            Kind::Set(e) => e,
            Kind::Atom(l) => panic!("cannot adjoin to atom {l}"),
        };
        match elems.binary_search_by(|e| self.compare(*e, y)) {
            Ok(_) => x,
            Err(pos) => {
                let mut v = Vec::with_capacity(elems.len() + 1);
                v.extend_from_slice(&elems[..pos]);
                v.push(y);
                v.extend_from_slice(&elems[pos..]);
                self.intern_sorted(v)
            }
        }
    }

    /// Builds the set with the given elements (any order, duplicates allowed).
    pub fn make_set<I: IntoIterator<Item = HfSet>>(&mut self, elems: I) -> HfSet {
        let mut v: Vec<HfSet> = elems.into_iter().collect();
        v.sort_by(|a, b| self.compare(*a, *b));
        v.dedup();
        self.intern_sorted(v)
    }

    /// Interns an element list that is already strictly increasing in the
    /// canonical order.
    pub(crate) fn intern_sorted(&mut self, elems: Vec<HfSet>) -> HfSet {
        debug_assert!(elems.windows(2).all(|w| self.compare(w[0], w[1]) == Ordering::Less));
        if let Some(&id) = self.index.get(elems.as_slice()) {
            return id;
        }
        let rank = elems.iter().map(|&e| self.rank(e) + 1).max().unwrap_or(0);
        let ark = self.ark_from_elements(&elems);
        let key: Box<[HfSet]> = elems.into_boxed_slice();
        let id = self.push(Node {
            kind: Kind::Set(key.clone()),
            rank,
            ark,
            code: OnceLock::new(),
        });
        self.index.insert(key, id);
        id
    }

    fn ark_from_elements(&self, elems: &[HfSet]) -> u32 {
        let mut arks: Vec<u32> = elems.iter().map(|&e| self.ark(e)).collect();
        if arks.is_empty() {
            return 0;
        }
        arks.sort_unstable();
        ark_from_sorted(&arks)
    }

    fn push(&mut self, node: Node) -> HfSet {
        let id = HfSet(u32::try_from(self.nodes.len()).expect("universe overflow"));
        self.nodes.push(node);
        id
    }

    fn node(&self, x: HfSet) -> &Node {
        &self.nodes[x.index()]
    }

    /// Canonical total order: atoms first (by label), then pure sets compared
    /// as their descending element sequences, lexicographically.
    pub fn compare(&self, a: HfSet, b: HfSet) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match (&self.node(a).kind, &self.node(b).kind) {
            (Kind::Atom(la), Kind::Atom(lb)) => la.cmp(lb),
            (Kind::Atom(_), Kind::Set(_)) => Ordering::Less,
            (Kind::Set(_), Kind::Atom(_)) => Ordering::Greater,
            (Kind::Set(xa), Kind::Set(xb)) => {
                for (ea, eb) in xa.iter().rev().zip(xb.iter().rev()) {
                    match self.compare(*ea, *eb) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                xa.len().cmp(&xb.len())
            }
        }
    }

    /// Ackermann code `Σ_{y∈x} 2^{Ack(y)}`, memoized per node.
    pub fn ackermann_code(&self, x: HfSet) -> Result<BigUint> {
        let node = self.node(x);
        if let Some(c) = node.code.get() {
            return Ok(c.clone());
        }
        let elems = match &node.kind {
            Kind::Set(e) => e,
            Kind::Atom(_) => return Err(Error::AtomEncoding),
        };
        let mut code = BigUint::zero();
        // elements ascend, so the last one carries the top bit
        if let Some(&top) = elems.last() {
            let top_code = self.ackermann_code(top)?;
            if top_code >= BigUint::from(self.bit_budget) {
                return Err(Error::BitBudget {
                    needed: format!("{top_code} + 1"),
                    budget: self.bit_budget,
                });
            }
        }
        for &e in elems.iter() {
            let bit = self.ackermann_code(e)?.to_u64().expect("checked against budget");
            code.set_bit(bit, true);
        }
        let _ = node.code.set(code.clone());
        Ok(code)
    }

    /// Inverse of [`Universe::ackermann_code`].
    pub fn decode_ackermann(&mut self, n: &BigUint) -> Result<HfSet> {
        if n.bits() > self.bit_budget {
            return Err(Error::BitBudget {
                needed: n.bits().to_string(),
                budget: self.bit_budget,
            });
        }
        let mut elems = Vec::new();
        for bit in 0..n.bits() {
            if n.bit(bit) {
                elems.push(self.decode_ackermann(&BigUint::from(bit))?);
            }
        }
        // bit positions ascend, and so do the decoded elements
        Ok(self.intern_sorted(elems))
    }

    /// Textual notation, e.g. `{{},{{}}}`. Elements print in canonical order.
    pub fn format(&self, x: HfSet) -> String {
        let mut s = String::new();
        self.write_set(x, &mut s);
        s
    }

    fn write_set(&self, x: HfSet, out: &mut String) {
        match &self.node(x).kind {
            Kind::Atom(l) => out.push_str(l),
            Kind::Set(elems) => {
                out.push('{');
                for (i, &e) in elems.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_set(e, out);
                }
                out.push('}');
            }
        }
    }

    /// Parses the textual notation. Whitespace is ignored; bare identifiers
    /// denote atoms.
    pub fn parse(&mut self, text: &str) -> Result<HfSet> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let x = p.term(self)?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(x)
    }

    /// Adapter implementing [`fmt::Display`] for a set.
    pub fn display(&self, x: HfSet) -> SetDisplay<'_> {
        SetDisplay { universe: self, set: x }
    }
}

/// Adjunctive rank from element arks sorted non-decreasingly:
/// `max_j {ark_j + n - j} + 1` with 1-based `j`.
pub(crate) fn ark_from_sorted(sorted_arks: &[u32]) -> u32 {
    let n = sorted_arks.len() as u32;
    sorted_arks
        .iter()
        .enumerate()
        .map(|(i, &a)| a + n - (i as u32 + 1))
        .max()
        .map_or(0, |m| m + 1)
}

pub struct SetDisplay<'a> {
    universe: &'a Universe,
    set: HfSet,
}

impl fmt::Display for SetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.universe.format(self.set))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn term(&mut self, u: &mut Universe) -> Result<HfSet> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'{') => {
                self.pos += 1;
                let mut elems = Vec::new();
                self.skip_ws();
                if self.src.get(self.pos) == Some(&b'}') {
                    self.pos += 1;
                    return Ok(u.empty_set());
                }
                loop {
                    elems.push(self.term(u)?);
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(u.make_set(elems));
                        }
                        _ => return Err(self.err("expected ',' or '}'")),
                    }
                }
            }
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let label = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(u.atom(label))
            }
            Some(_) => Err(self.err("expected '{' or atom label")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
