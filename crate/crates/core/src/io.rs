//! Bound-function specs, table caches and table serialization.
//!
//! Every number leaves this module as a decimal string.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bound::{parse_values, BoundFunction};
use crate::error::{Error, Result};
use crate::hierarchy::HierarchySpec;
use crate::recurrence::{recompute_plain_row, BTable};
use crate::refinements::RefinedTable;
use crate::BigCount;

/// Current cache layout; other versions are refused.
pub const CACHE_VERSION: u32 = 1;

/// Deepest row recomputed by the load-time spot check.
const SPOT_CHECK_DEPTH: usize = 64;

/// `identity`, `half`, `sqrt`, `log2`, `table:v0,v1,…` or `file:<path>`
/// (naturals separated by newlines or commas).
pub fn parse_bound_function(spec: &str) -> Result<BoundFunction> {
    match spec.trim().strip_prefix("file:") {
        Some(path) => {
            let text = fs::read_to_string(path.trim())?;
            let values = parse_values(text.split(['\n', ',', '\r']))?;
            if values.is_empty() {
                return Err(Error::InvalidBound(format!("{path}: no values")));
            }
            BoundFunction::table(values)
        }
        None => BoundFunction::parse(spec),
    }
}

/// [`parse_bound_function`] plus a check that `f` is defined and sublinear on
/// every argument the recurrence consults up to level `n_max`.
pub fn parse_bound_function_for(spec: &str, n_max: usize) -> Result<BoundFunction> {
    let f = parse_bound_function(spec)?;
    f.validate(n_max)?;
    Ok(f)
}

pub fn dec(v: &BigCount) -> String {
    v.to_str_radix(10)
}

pub fn dec_all(v: &[BigCount]) -> Vec<String> {
    v.iter().map(dec).collect()
}

fn parse_dec(s: &str, what: &str) -> Result<BigCount> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Cache(format!("{what}: '{s}' is not a decimal natural")));
    }
    BigCount::parse_bytes(s.as_bytes(), 10).ok_or_else(|| Error::Cache(format!("{what}: bad number '{s}'")))
}

/// `{variant, n_max, cells, a}` with `cells[n][j] = b_{n,j-1}`.
pub fn table_json(t: &BTable) -> Value {
    let cells: Vec<Vec<String>> = t.rows().iter().map(|r| dec_all(r)).collect();
    json!({
        "variant": t.variant().descriptor(),
        "n_max": t.n_max(),
        "cells": cells,
        "a": dec_all(t.a_sequence()),
    })
}

#[derive(Serialize, Deserialize)]
struct Payload {
    format_version: u32,
    variant: String,
    n_max: usize,
    cells: Vec<Vec<String>>,
    a: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format_version: u32,
    variant: String,
    n_max: usize,
    cells: Vec<Vec<String>>,
    a: Vec<String>,
    checksum: String,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

fn checksum(payload: &Payload) -> Result<String> {
    let bytes = serde_json::to_vec(payload)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Canonical cache bytes for `t`: compact JSON, fixed key order, trailing
/// newline.
pub fn cache_bytes(t: &BTable) -> Result<Vec<u8>> {
    let payload = Payload {
        format_version: CACHE_VERSION,
        variant: t.variant().descriptor(),
        n_max: t.n_max(),
        cells: t.rows().iter().map(|r| dec_all(r)).collect(),
        a: dec_all(t.a_sequence()),
    };
    let sum = checksum(&payload)?;
    let env = Envelope {
        format_version: payload.format_version,
        variant: payload.variant,
        n_max: payload.n_max,
        cells: payload.cells,
        a: payload.a,
        checksum: sum,
    };
    let mut out = serde_json::to_vec(&env)?;
    out.push(b'\n');
    Ok(out)
}

pub fn save_cache(path: &Path, t: &BTable) -> Result<()> {
    fs::write(path, cache_bytes(t)?)?;
    Ok(())
}

/// Parses and validates cache bytes: version, checksum, shape, the level
/// sums and one recomputed row.
pub fn cache_from_bytes(bytes: &[u8]) -> Result<BTable> {
    let probe: VersionProbe =
        serde_json::from_slice(bytes).map_err(|e| Error::Cache(format!("not a cache file: {e}")))?;
    if probe.format_version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "cache format version {} is not supported (expected {CACHE_VERSION})",
            probe.format_version
        )));
    }
    let env: Envelope = serde_json::from_slice(bytes).map_err(|e| Error::Cache(format!("malformed cache: {e}")))?;
    let payload = Payload {
        format_version: env.format_version,
        variant: env.variant,
        n_max: env.n_max,
        cells: env.cells,
        a: env.a,
    };
    let sum = checksum(&payload)?;
    if sum != env.checksum {
        return Err(Error::Cache(format!(
            "checksum mismatch: stored {}, computed {sum}",
            env.checksum
        )));
    }
    let variant = HierarchySpec::parse(&payload.variant)?;
    if payload.cells.len() != payload.n_max + 1 || payload.a.len() != payload.n_max + 1 {
        return Err(Error::Cache(format!("expected {} rows", payload.n_max + 1)));
    }
    let mut rows = Vec::with_capacity(payload.cells.len());
    for (n, row) in payload.cells.iter().enumerate() {
        if row.is_empty() || row.len() > n + 1 {
            return Err(Error::Cache(format!("row {n} has {} cells", row.len())));
        }
        rows.push(
            row.iter()
                .map(|s| parse_dec(s, &format!("row {n}")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let table = BTable::from_rows(variant.clone(), rows);
    for (n, s) in payload.a.iter().enumerate() {
        if parse_dec(s, "a")? != *table.a(n) {
            return Err(Error::Cache(format!("a_{n} disagrees with the stored rows")));
        }
    }
    spot_check(&table, &sum)?;
    Ok(table)
}

/// Recomputes one row, chosen from the checksum, and compares it.
fn spot_check(t: &BTable, sum: &str) -> Result<()> {
    let seed = u64::from_str_radix(&sum[..16], 16).expect("hex checksum");
    let depth = t.n_max().min(SPOT_CHECK_DEPTH);
    let n = (seed % (depth as u64 + 1)) as usize;
    let fresh = match t.variant() {
        HierarchySpec::Plain => recompute_plain_row(t, n),
        other => other.strategy().count_table(n)?.rows()[n].clone(),
    };
    if fresh != t.rows()[n] {
        return Err(Error::Cache(format!(
            "spot check failed: row {n} does not match a fresh computation"
        )));
    }
    Ok(())
}

pub fn load_cache(path: &Path) -> Result<BTable> {
    cache_from_bytes(&fs::read(path)?)
}

/// Rows `n`, columns `t`, as in the printed profile tables.
pub fn profiles_json(t: &RefinedTable) -> Value {
    let rows: Vec<Value> = t
        .profiles()
        .iter()
        .enumerate()
        .map(|(n, p)| json!({ "n": n, "values": dec_all(p) }))
        .collect();
    json!({ "kind": t.kind().name(), "n_max": t.n_max(), "rows": rows })
}

/// A header plus rows of cells, rendered as CSV or aligned plain text.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Grid {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Space-separated columns, left-aligned.
    pub fn to_plain(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for line in std::iter::once(&self.header).chain(&self.rows) {
            for (i, cell) in line.iter().enumerate().take(cols) {
                width[i] = width[i].max(cell.len());
            }
        }
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{c:<w$}", w = width[i]))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Profile rows padded to a common width (`n, t=0, t=1, …`).
pub fn profiles_grid(t: &RefinedTable) -> Grid {
    let n_max = t.n_max();
    let header = std::iter::once("n".to_string())
        .chain((0..=n_max).map(|t| format!("t{t}")))
        .collect();
    let rows = t
        .profiles()
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let mut row = vec![n.to_string()];
            row.extend(dec_all(p));
            row.resize(n_max + 2, String::new());
            row
        })
        .collect();
    Grid { header, rows }
}

/// `b_{n,m}` rows with columns `m = -1 … n_max-1`.
pub fn table_grid(t: &BTable) -> Grid {
    let n_max = t.n_max();
    let header = std::iter::once("n".to_string())
        .chain((-1..n_max as isize).map(|m| format!("m{m}")))
        .chain(std::iter::once("a".to_string()))
        .collect();
    let rows = (0..=n_max)
        .map(|n| {
            let mut row = vec![n.to_string()];
            row.extend(dec_all(&t.rows()[n]));
            row.resize(n_max + 2, String::new());
            row.push(dec(t.a(n)));
            row
        })
        .collect();
    Grid { header, rows }
}
