use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use adjunctive::asymptotics::{auxiliary_checks, constant_c, sandwich_check};
use adjunctive::bounded::{compute_bounded_table, compute_minbounded, distinct_levels};
use adjunctive::hfs::Universe;
use adjunctive::hierarchy::HierarchySpec;
use adjunctive::io::{self, dec, dec_all, Grid};
use adjunctive::oracle::{self, OracleCaps, ProfileBy};
use adjunctive::recurrence::BTable;
use adjunctive::refinements::{compute_atoms_table, compute_d_table, compute_r_table, RefinedTable};
use adjunctive::{BigCount, Error};

#[derive(Parser)]
#[command(
    name = "adjunctive",
    version,
    about = "Exact level counts of the adjunctive hierarchy"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Args)]
struct Out {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Level sizes a_0..a_n.
    Levels {
        #[arg(long)]
        n: usize,
        /// plain, atoms:U, bounded:F or minbounded
        #[arg(long, default_value = "plain")]
        variant: String,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// The full b_{n,m} table.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "plain")]
        variant: String,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Number of members of each level by classical rank.
    RankProfile {
        #[arg(long)]
        n: usize,
        /// Inclusive column range LO..HI.
        #[arg(long)]
        t: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Number of members of each level by cardinality.
    CardProfile {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Level sizes with 1..=U atoms (U = 0 gives the plain hierarchy).
    Atoms {
        #[arg(long)]
        u: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Level sizes of the hierarchy bounded by f.
    Bounded {
        /// identity, half, sqrt, log2, table:v0,v1,… or file:PATH
        #[arg(long = "f")]
        f: String,
        #[arg(long)]
        n: usize,
        /// Print only levels whose size differs from the previous one.
        #[arg(long)]
        skip_duplicates: bool,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Level sizes of the minimally bounded hierarchy.
    Minbounded {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Out,
    },
    /// The growth constant C with a certified error bound.
    Constant {
        /// Truncation index of the series.
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        digits: usize,
        /// Also verify the exact sandwich and growth inequalities up to n.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Builds levels by brute force and compares them with the recurrences.
    OracleVerify {
        #[arg(long, default_value = "plain")]
        variant: String,
        #[arg(long)]
        n: usize,
        /// Write every level in set notation to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Levels { .. } => "levels",
            Cmd::Table { .. } => "table",
            Cmd::RankProfile { .. } => "rank-profile",
            Cmd::CardProfile { .. } => "card-profile",
            Cmd::Atoms { .. } => "atoms",
            Cmd::Bounded { .. } => "bounded",
            Cmd::Minbounded { .. } => "minbounded",
            Cmd::Constant { .. } => "constant",
            Cmd::OracleVerify { .. } => "oracle-verify",
        }
    }

    fn params(&self) -> String {
        match self {
            Cmd::Levels { n, variant, .. } | Cmd::Table { n, variant, .. } => format!("variant={variant} n={n}"),
            Cmd::RankProfile { n, .. } | Cmd::CardProfile { n, .. } | Cmd::Minbounded { n, .. } => format!("n={n}"),
            Cmd::Atoms { u, n, .. } => format!("u={u} n={n}"),
            Cmd::Bounded { f, n, .. } => format!("f={f} n={n}"),
            Cmd::Constant { n, digits, .. } => format!("n={n} digits={digits}"),
            Cmd::OracleVerify { variant, n, .. } => format!("variant={variant} n={n}"),
        }
    }
}

/// Rendered output plus whether every verification passed.
struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, ok: true }
    }
}

fn emit(format: Format, value: &Value, grid: impl FnOnce() -> Grid) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => grid().to_csv(),
        Format::Plain => grid().to_plain(),
    }
}

fn variant_spec(variant: &str, n: usize) -> adjunctive::Result<HierarchySpec> {
    let spec = match variant.trim().strip_prefix("bounded:") {
        Some(f) => HierarchySpec::Bounded(io::parse_bound_function_for(f, n)?),
        None => HierarchySpec::parse(variant)?,
    };
    Ok(spec)
}

/// The variant's table through level `n`, via the cache when one is given.
fn table_for(spec: &HierarchySpec, n: usize, cache: Option<&Path>) -> adjunctive::Result<BTable> {
    if let Some(path) = cache.filter(|p| p.exists()) {
        let t = io::load_cache(path)?;
        if t.variant() == spec && t.n_max() >= n {
            return Ok(BTable::from_rows(spec.clone(), t.rows()[..=n].to_vec()));
        }
    }
    let t = spec.strategy().count_table(n)?;
    if let Some(path) = cache {
        io::save_cache(path, &t)?;
    }
    Ok(t)
}

fn sequence_grid(label: &str, rows: &[(usize, &BigCount)]) -> Grid {
    Grid {
        header: vec!["n".into(), label.into()],
        rows: rows.iter().map(|(n, v)| vec![n.to_string(), dec(v)]).collect(),
    }
}

fn parse_t_range(t: Option<&str>, n_max: usize) -> adjunctive::Result<(usize, usize)> {
    let Some(t) = t else { return Ok((0, n_max)) };
    let bad = || Error::OutOfRange(format!("t range '{t}' is not LO..HI"));
    let (lo, hi) = t.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi.min(n_max)))
}

fn profile_output(t: &RefinedTable, range: (usize, usize), format: Format) -> String {
    let (lo, hi) = range;
    let profiles = t.profiles();
    let rows: Vec<Value> = profiles
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let values: Vec<Value> = (lo..=hi.min(n))
                .map(|i| json!({ "t": i.to_string(), "count": dec(&p[i]) }))
                .collect();
            json!({ "n": n.to_string(), "values": values })
        })
        .collect();
    let value = json!({ "kind": t.kind().name(), "n_max": t.n_max().to_string(), "rows": rows });
    emit(format, &value, || {
        let header = std::iter::once("n".to_string())
            .chain((lo..=hi).map(|i| format!("t{i}")))
            .collect();
        let rows = profiles
            .iter()
            .enumerate()
            .map(|(n, p)| {
                std::iter::once(n.to_string())
                    .chain((lo..=hi).map(|i| p.get(i).map(dec).unwrap_or_default()))
                    .collect()
            })
            .collect();
        Grid { header, rows }
    })
}

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn oracle_verify(spec: &HierarchySpec, n: usize, dump: Option<&Path>, format: Format) -> adjunctive::Result<Report> {
    let strategy = spec.strategy();
    let mut u = Universe::new();
    let ls = strategy.build_levels(&mut u, n, &OracleCaps::default())?;
    let table = strategy.count_table(n)?;
    let mut checks = Vec::new();

    let sizes = ls.sizes();
    let bad: Vec<usize> = (0..=n).filter(|&i| BigCount::from(sizes[i]) != *table.a(i)).collect();
    checks.push(Check {
        name: "a_n".into(),
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("a_n match 0..{n}")
        } else {
            format!("a_n mismatch at {bad:?}")
        },
    });

    let mut cells = 0;
    let mut bad = Vec::new();
    for i in 0..=n {
        for m in -1..i as isize {
            cells += 1;
            if oracle::oracle_b(&ls, &u, i, m) != *table.cell(i, m) {
                bad.push((i, m));
            }
        }
    }
    checks.push(Check {
        name: "b_{n,m}".into(),
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("b_{{n,m}} match ({cells} cells)")
        } else {
            format!("b_{{n,m}} mismatch at {bad:?}")
        },
    });

    if *spec == HierarchySpec::Plain {
        let mut bad = Vec::new();
        let mut terms_checked = 0;
        for i in 1..=n {
            for m in 0..i {
                let split = oracle::partition_counts(&ls, &u, i, m as isize)?;
                let terms = oracle::recurrence_terms(i, m, |a, b| table.cell(a, b).clone(), |k| table.a(k).clone());
                terms_checked += terms.len();
                if split.by_k != terms {
                    bad.push((i, m));
                }
            }
        }
        checks.push(Check {
            name: "partition".into(),
            ok: bad.is_empty(),
            detail: if bad.is_empty() {
                format!("k-split matches recurrence terms ({terms_checked} terms)")
            } else {
                format!("k-split mismatch at {bad:?}")
            },
        });

        let r = compute_r_table(n);
        let d = compute_d_table(n);
        for (by, t, name) in [
            (ProfileBy::Rank, &r, "rank profile"),
            (ProfileBy::Cardinality, &d, "cardinality profile"),
        ] {
            let mut bad = Vec::new();
            for i in 0..=n {
                let hist = oracle::profile_counts(&ls, &u, i, by)?;
                let prof = t.profile(i)?;
                let agrees = prof
                    .iter()
                    .enumerate()
                    .all(|(k, v)| hist.get(&k).cloned().unwrap_or_default() == *v)
                    && hist.keys().all(|&k| k < prof.len());
                if !agrees {
                    bad.push(i);
                }
            }
            checks.push(Check {
                name: name.into(),
                ok: bad.is_empty(),
                detail: if bad.is_empty() {
                    format!("{name} match 0..{n}")
                } else {
                    format!("{name} mismatch at {bad:?}")
                },
            });
        }

        let ark = oracle::verify_ark_formula(&ls, &u)?;
        checks.push(Check {
            name: "ark lemma".into(),
            ok: ark.ok(),
            detail: format!("ark lemma {}/{}", ark.checked - ark.mismatches.len(), ark.checked),
        });
    }

    if let Some(path) = dump {
        let mut text = String::new();
        for (i, size) in sizes.iter().enumerate() {
            let _ = writeln!(text, "# level {i} ({size} sets)");
            text.push_str(&ls.dump_level(&u, i)?);
        }
        fs::write(path, text)?;
    }

    let ok = checks.iter().all(|c| c.ok);
    let value = json!({
        "spec": spec.descriptor(),
        "n_max": n.to_string(),
        "sizes": sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "checks": checks.iter().map(|c| json!({ "name": c.name, "ok": c.ok, "detail": c.detail })).collect::<Vec<_>>(),
        "ok": ok,
    });
    let text = match format {
        Format::Plain => {
            let mut s = String::new();
            for c in &checks {
                let _ = writeln!(s, "{} {}", if c.ok { "ok  " } else { "FAIL" }, c.detail);
            }
            s
        }
        _ => emit(format, &value, || Grid {
            header: vec!["check".into(), "ok".into(), "detail".into()],
            rows: checks
                .iter()
                .map(|c| vec![c.name.clone(), c.ok.to_string(), c.detail.replace(',', ";")])
                .collect(),
        }),
    };
    Ok(Report { text, ok })
}

fn run(cmd: &Cmd) -> adjunctive::Result<Report> {
    match cmd {
        Cmd::Levels { n, variant, cache, out } => {
            let spec = variant_spec(variant, *n)?;
            let t = table_for(&spec, *n, cache.as_deref())?;
            let value = json!({ "variant": spec.descriptor(), "n_max": n.to_string(), "a": dec_all(t.a_sequence()) });
            let rows: Vec<(usize, &BigCount)> = t.a_sequence().iter().enumerate().collect();
            Ok(Report::ok(emit(out.format, &value, || sequence_grid("a", &rows))))
        }
        Cmd::Table { n, variant, cache, out } => {
            let spec = variant_spec(variant, *n)?;
            let t = table_for(&spec, *n, cache.as_deref())?;
            let mut value = io::table_json(&t);
            value["n_max"] = json!(n.to_string());
            Ok(Report::ok(emit(out.format, &value, || io::table_grid(&t))))
        }
        Cmd::RankProfile { n, t, out } => {
            let table = compute_r_table(*n);
            Ok(Report::ok(profile_output(
                &table,
                parse_t_range(t.as_deref(), *n)?,
                out.format,
            )))
        }
        Cmd::CardProfile { n, t, out } => {
            let table = compute_d_table(*n);
            Ok(Report::ok(profile_output(
                &table,
                parse_t_range(t.as_deref(), *n)?,
                out.format,
            )))
        }
        Cmd::Atoms { u, n, out } => {
            let us: Vec<usize> = if *u == 0 { vec![0] } else { (1..=*u).collect() };
            let tables: Vec<_> = us.iter().map(|&k| compute_atoms_table(k, *n)).collect();
            let columns: Vec<Value> = tables
                .iter()
                .map(|t| json!({ "u": t.u().to_string(), "a": dec_all(t.table().a_sequence()) }))
                .collect();
            let value = json!({ "n_max": n.to_string(), "columns": columns });
            Ok(Report::ok(emit(out.format, &value, || Grid {
                header: std::iter::once("n".to_string())
                    .chain(us.iter().map(|k| format!("u{k}")))
                    .collect(),
                rows: (0..=*n)
                    .map(|i| {
                        std::iter::once(i.to_string())
                            .chain(tables.iter().map(|t| dec(t.size(i))))
                            .collect()
                    })
                    .collect(),
            })))
        }
        Cmd::Bounded {
            f,
            n,
            skip_duplicates,
            cache,
            out,
        } => {
            let f = io::parse_bound_function_for(f, *n)?;
            let spec = HierarchySpec::Bounded(f.clone());
            let t = match cache {
                Some(_) => table_for(&spec, *n, cache.as_deref())?,
                None => compute_bounded_table(&f, *n)?.into_table(),
            };
            let a = t.a_sequence();
            let idx: Vec<usize> = if *skip_duplicates {
                distinct_levels(a)
            } else {
                (0..a.len()).collect()
            };
            let rows: Vec<(usize, &BigCount)> = idx.iter().map(|&i| (i, &a[i])).collect();
            let value = json!({
                "f": f.descriptor(),
                "n_max": n.to_string(),
                "skip_duplicates": skip_duplicates,
                "rows": rows.iter().map(|(i, v)| json!({ "n": i.to_string(), "a": dec(v) })).collect::<Vec<_>>(),
            });
            Ok(Report::ok(emit(out.format, &value, || sequence_grid("a", &rows))))
        }
        Cmd::Minbounded { n, out } => {
            let t = compute_minbounded(*n);
            let a = t.abar_sequence();
            let value = json!({ "n_max": n.to_string(), "a": dec_all(a) });
            let rows: Vec<(usize, &BigCount)> = a.iter().enumerate().collect();
            Ok(Report::ok(emit(out.format, &value, || sequence_grid("abar", &rows))))
        }
        Cmd::Constant { n, digits, check, out } => {
            let c = HierarchySpec::Plain.strategy().count_table(*n)?.c_sequence();
            let est = constant_c(&c, *digits)?;
            let mut value = json!({
                "C": est.c_value.to_decimal(*digits),
                "digits": digits.to_string(),
                "terms_used": est.terms_used.to_string(),
                "truncation_bound": est.truncation_bound.upper_sci(3),
                "error_bound": est.error_bound.upper_sci(3),
            });
            let mut ok = true;
            let mut lines = vec![
                vec!["C".to_string(), value["C"].as_str().unwrap_or_default().to_string()],
                vec!["digits".into(), digits.to_string()],
                vec!["terms_used".into(), est.terms_used.to_string()],
                vec![
                    "truncation_bound".into(),
                    value["truncation_bound"].as_str().unwrap_or_default().into(),
                ],
                vec![
                    "error_bound".into(),
                    value["error_bound"].as_str().unwrap_or_default().into(),
                ],
            ];
            if *check {
                let sandwich = sandwich_check(&c);
                let mut checks = vec![
                    json!({ "name": "sandwich", "ok": sandwich.ok(), "checked": sandwich.rows.len().to_string() }),
                ];
                lines.push(vec!["sandwich".into(), sandwich.ok().to_string()]);
                ok &= sandwich.ok();
                for r in auxiliary_checks(&c) {
                    checks.push(json!({ "name": r.name, "ok": r.ok(), "checked": r.checked.to_string(), "failures": r.failures }));
                    lines.push(vec![r.name.to_string(), r.ok().to_string()]);
                    ok &= r.ok();
                }
                value["checks"] = json!(checks);
            }
            let text = emit(out.format, &value, || Grid {
                header: vec!["key".into(), "value".into()],
                rows: lines,
            });
            Ok(Report { text, ok })
        }
        Cmd::OracleVerify { variant, n, dump, out } => {
            let spec = variant_spec(variant, *n)?;
            oracle_verify(&spec, *n, dump.as_deref(), out.format)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_resource() {
        return 3;
    }
    match e {
        Error::OutOfRange(_)
        | Error::InvalidBound(_)
        | Error::Unsupported(_)
        | Error::Parse { .. }
        | Error::Insufficient(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd) {
        Ok(report) => {
            print!("{}", report.text);
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("adjunctive {}: {e} [{}]", cli.cmd.name(), cli.cmd.params());
            ExitCode::from(exit_code(&e))
        }
    }
}
