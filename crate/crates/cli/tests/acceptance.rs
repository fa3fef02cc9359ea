//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p adjunctive-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde_json::Value;

use adjunctive::asymptotics::{auxiliary_checks, constant_c, sandwich_check};
use adjunctive::bound::BoundFunction;
use adjunctive::bounded::{abar_of_abar, compute_atoms_table, compute_bounded_table, compute_minbounded, AbarSource};
use adjunctive::recurrence::{compute_b_table, BTable};

const LEVELS: [&str; 10] = [
    "1",
    "2",
    "4",
    "12",
    "112",
    "11680",
    "135717904",
    "18418552718041816",
    "339243082977367810522963263986432",
    "115085869347989258409868700405844845152126435897832396556555233936",
];

const RANK_ROWS: [&[&str]; 8] = [
    &["1"],
    &["1", "1"],
    &["1", "1", "2"],
    &["1", "1", "2", "8"],
    &["1", "1", "2", "12", "96"],
    &["1", "1", "2", "12", "912", "10752"],
    &["1", "1", "2", "12", "3840", "10130688", "125583360"],
    &[
        "1",
        "1",
        "2",
        "12",
        "10696",
        "34070972672",
        "1374608250580992",
        "17043910396477440",
    ],
];

const CARD_ROWS: [&[&str]; 7] = [
    &["1"],
    &["1", "1"],
    &["1", "2", "1"],
    &["1", "4", "5", "2"],
    &["1", "12", "38", "44", "17"],
    &["1", "112", "1266", "3964", "4573", "1764"],
    &["1", "11680", "1301832", "14711308", "46060477", "53135964", "20496642"],
];

/// Columns u = 1..=5, rows n = 0..=5.
const ATOMS: [[&str; 6]; 5] = [
    ["2", "4", "11", "86", "6707", "44661920"],
    ["3", "6", "21", "328", "102751", "10540006012"],
    ["4", "8", "34", "898", "785834", "617171670159"],
    ["5", "10", "50", "2010", "3974665", "15793892739676"],
    ["6", "12", "69", "3932", "15288832", "233717946472981"],
];

const HALF: [(usize, &str); 27] = [
    (0, "1"),
    (1, "2"),
    (2, "4"),
    (4, "12"),
    (5, "16"),
    (8, "144"),
    (9, "592"),
    (10, "3856"),
    (11, "12112"),
    (12, "25232"),
    (13, "40160"),
    (14, "52832"),
    (15, "60752"),
    (16, "7840528"),
    (17, "502084400"),
    (18, "246203916272"),
    (19, "60472296567808"),
    (20, "207302387302931456"),
    (21, "355632667741263729920"),
    (22, "3343198667129228884545792"),
    (23, "15829569100117020469497511168"),
    (24, "258028007928627813480157366817024"),
    (25, "2143825383084631588989060293305465472"),
    (26, "44114691903811742239796481826048657798272"),
    (27, "472009200002288950265751813320485308731259904"),
    (28, "9485240116915376700878425362559719242896317641728"),
    (29, "102586446112048504015292656228608097259346546351742208"),
];

/// `(sqrt index, log2 index, value)`.
const SQRT_LOG2: [(usize, usize, &str); 33] = [
    (0, 0, "1"),
    (1, 1, "2"),
    (2, 2, "4"),
    (5, 4, "12"),
    (6, 5, "16"),
    (26, 16, "144"),
    (27, 17, "592"),
    (28, 18, "1488"),
    (29, 19, "2608"),
    (30, 20, "3504"),
    (31, 21, "3952"),
    (32, 22, "4080"),
    (33, 23, "4096"),
    (37, 32, "20480"),
    (38, 33, "45056"),
    (39, 34, "61440"),
    (40, 35, "65536"),
    (677, 65536, "8454144"),
    (678, 65537, "541130752"),
    (679, 65538, "22913548288"),
    (680, 65539, "722051596288"),
    (681, 65540, "18060675186688"),
    (682, 65541, "373502458789888"),
    (683, 65542, "6568344973017088"),
    (684, 65543, "100265338000703488"),
    (685, 65544, "1349558578369855488"),
    (686, 65545, "16216148138762764288"),
    (687, 65546, "175694108877523058688"),
    (688, 65547, "1730604226080435929088"),
    (689, 65548, "15605186810352581541888"),
    (690, 65549, "129574972324016634789888"),
    (691, 65550, "995745342227863439474688"),
    (692, 65551, "7113073579673781497561088"),
];

const MINBOUNDED: [&str; 46] = [
    "1",
    "2",
    "4",
    "12",
    "16",
    "144",
    "592",
    "1488",
    "2608",
    "3504",
    "3952",
    "4080",
    "4096",
    "20480",
    "45056",
    "61440",
    "65536",
    "8454144",
    "541130752",
    "22913548288",
    "722051596288",
    "18060675186688",
    "373502458789888",
    "6568344973017088",
    "100265338000703488",
    "1349558578369855488",
    "16216148138762764288",
    "175694108877523058688",
    "1730604226080435929088",
    "15605186810352581541888",
    "129574972324016634789888",
    "995745342227863439474688",
    "7113073579673781497561088",
    "47415471379317476939071488",
    "295946924477120265495052288",
    "1734813231885452199240204288",
    "9576634607260861238151282688",
    "49906001680620107723979685888",
    "246053377901049170177781465088",
    "1150036937873461371051824447488",
    "5104965012752764749875762495488",
    "21557465804250666805783344775168",
    "86734680478261586488801843806208",
    "332959713691191727513538395701248",
    "1221128583494975450495623815036928",
    "4283779858680436564226952847228928",
];

/// `1.339899757746` as an integer over `10^12`.
const C_PRINTED: i128 = 1_339_899_757_746;

type Outcome = Result<String, String>;

/// `(id, name, time limit, check)`.
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_adjunctive"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "`{}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON from `{}`: {e}", args.join(" ")))
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .map(|a| a.iter().map(|x| x.as_str().unwrap_or("?").to_string()).collect())
        .unwrap_or_default()
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn c1() -> Outcome {
    let v = cli(&["levels", "--n", "9"])?;
    expect_eq("a_0..a_9", strings(&v["a"]), LEVELS.map(String::from).to_vec())?;
    Ok(format!("10 values, a_9 has {} digits", LEVELS[9].len()))
}

fn profile_rows(v: &Value) -> Vec<Vec<String>> {
    v["rows"]
        .as_array()
        .map(|rows| {
            rows.iter()
                .map(|r| {
                    r["values"]
                        .as_array()
                        .map(|vs| {
                            vs.iter()
                                .map(|x| x["count"].as_str().unwrap_or("?").to_string())
                                .collect()
                        })
                        .unwrap_or_default()
                })
                .collect()
        })
        .unwrap_or_default()
}

fn printed(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
}

fn c2() -> Outcome {
    let v = cli(&["rank-profile", "--n", "7"])?;
    expect_eq("rank profiles", profile_rows(&v), printed(&RANK_ROWS))?;
    Ok("36 entries, r^7_7 = 17043910396477440".into())
}

fn c3() -> Outcome {
    let v = cli(&["card-profile", "--n", "6"])?;
    expect_eq("cardinality profiles", profile_rows(&v), printed(&CARD_ROWS))?;
    Ok("28 entries".into())
}

fn c4() -> Outcome {
    let v = cli(&["atoms", "--u", "5", "--n", "5"])?;
    let cols = v["columns"].as_array().ok_or("no columns")?;
    expect_eq("column count", cols.len(), 5)?;
    for (u, col) in cols.iter().enumerate() {
        expect_eq(
            &format!("u = {}", u + 1),
            strings(&col["a"]),
            ATOMS[u].map(String::from).to_vec(),
        )?;
    }
    Ok("30 values".into())
}

fn bounded_rows(f: &str, n: usize) -> Result<Vec<(usize, String)>, String> {
    let v = cli(&["bounded", "--f", f, "--n", &n.to_string(), "--skip-duplicates"])?;
    let rows = v["rows"].as_array().ok_or("no rows")?;
    rows.iter()
        .map(|r| {
            let n = r["n"].as_str().and_then(|s| s.parse().ok()).ok_or("bad index")?;
            Ok((n, r["a"].as_str().ok_or("bad value")?.to_string()))
        })
        .collect()
}

fn c5() -> Outcome {
    let half: Vec<(usize, String)> = HALF.iter().map(|&(n, a)| (n, a.into())).collect();
    expect_eq("half", bounded_rows("half", 29)?, half)?;
    let sqrt: Vec<(usize, String)> = SQRT_LOG2.iter().map(|&(n, _, a)| (n, a.into())).collect();
    expect_eq("sqrt", bounded_rows("sqrt", 692)?, sqrt)?;
    let log2: Vec<(usize, String)> = SQRT_LOG2.iter().map(|&(_, n, a)| (n, a.into())).collect();
    expect_eq("log2", bounded_rows("log2", 65551)?, log2)?;
    Ok("27 + 33 + 33 rows, index sets exact".into())
}

fn c6() -> Outcome {
    let v = cli(&["minbounded", "--n", "45"])?;
    expect_eq(
        "abar_0..abar_45",
        strings(&v["a"]),
        MINBOUNDED.map(String::from).to_vec(),
    )?;
    Ok("46 values".into())
}

/// The leading 14 digits of `1.ddd…` as an integer over `10^13`.
fn scaled_12(s: &str) -> Result<i128, String> {
    let digits: String = s.chars().filter(|c| c.is_ascii_digit()).take(14).collect();
    if !s.starts_with("1.") || digits.len() < 14 {
        return Err(format!("unexpected C: {s}"));
    }
    let v: i128 = digits.parse().map_err(|_| format!("unexpected C: {s}"))?;
    Ok(v)
}

fn c7() -> Outcome {
    let v = cli(&["constant", "--n", "12", "--digits", "30"])?;
    let c = v["C"].as_str().ok_or("no C")?;
    // |C - printed| ≤ 5e-13 in units of 1e-13.
    let diff = (scaled_12(c)? - C_PRINTED * 10).abs();
    if diff > 5 {
        return Err(format!("C = {c} differs from 1.339899757746 by {diff}e-13"));
    }
    let est = constant_c(&compute_b_table(12).c_sequence(), 30).map_err(|e| e.to_string())?;
    if !est.error_below_pow10(30) {
        return Err(format!("error bound {} not below 1e-30", est.error_bound.upper_sci(3)));
    }
    let reported = v["error_bound"].as_str().ok_or("no error_bound")?;
    let exp: i32 = reported
        .split_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .ok_or_else(|| format!("bad error_bound {reported}"))?;
    if exp >= -30 {
        return Err(format!("reported error bound {reported} not below 1e-30"));
    }
    Ok(format!(
        "C = {c}, |C - 1.339899757746| ≤ {diff}e-13, error ≤ {reported}"
    ))
}

fn c8() -> Outcome {
    let runs: [(&str, &str, &[&str]); 8] = [
        (
            "plain",
            "5",
            &[
                "a_n",
                "b_{n,m}",
                "partition",
                "rank profile",
                "cardinality profile",
                "ark lemma",
            ],
        ),
        ("atoms:1", "4", &["a_n", "b_{n,m}"]),
        ("atoms:2", "4", &["a_n", "b_{n,m}"]),
        ("bounded:half", "12", &["a_n", "b_{n,m}"]),
        ("bounded:sqrt", "33", &["a_n", "b_{n,m}"]),
        ("bounded:log2", "23", &["a_n", "b_{n,m}"]),
        ("bounded:identity", "5", &["a_n", "b_{n,m}"]),
        ("minbounded", "5", &["a_n", "b_{n,m}"]),
    ];
    let mut summary = Vec::new();
    for (variant, n, expected) in runs {
        let v = cli(&["oracle-verify", "--variant", variant, "--n", n])?;
        let checks = v["checks"].as_array().ok_or("no checks")?;
        let names: Vec<&str> = checks.iter().filter_map(|c| c["name"].as_str()).collect();
        expect_eq(&format!("{variant} checks"), names, expected.to_vec())?;
        if let Some(bad) = checks.iter().find(|c| c["ok"] != Value::Bool(true)) {
            return Err(format!("{variant}: {}", bad["detail"]));
        }
        summary.push(format!("{variant}@{n}"));
    }
    Ok(summary.join(" "))
}

fn c9() -> Outcome {
    let c = compute_b_table(16).c_sequence();
    let sandwich = sandwich_check(&c);
    if !sandwich.ok() {
        return Err("sandwich violated".into());
    }
    let mut checked = sandwich.rows.len();
    for r in auxiliary_checks(&c) {
        if !r.ok() {
            return Err(format!("{} fails at {:?}", r.name, r.failures));
        }
        checked += r.checked;
    }
    Ok(format!(
        "{checked} exact inequalities, c_16 has {} digits",
        c[16].to_str_radix(10).len()
    ))
}

fn same_cells(what: &str, got: &BTable, want: &BTable) -> Result<(), String> {
    expect_eq(&format!("{what} depth"), got.n_max(), want.n_max())?;
    for n in 0..=want.n_max() {
        for m in -1..n as isize {
            if got.cell(n, m) != want.cell(n, m) {
                return Err(format!("{what}: cell ({n},{m}) differs"));
            }
        }
    }
    Ok(())
}

fn c10() -> Outcome {
    let plain = compute_b_table(9);
    same_cells("atoms u = 0", compute_atoms_table(0, 9).table(), &plain)?;
    let identity = compute_bounded_table(&BoundFunction::identity(), 9).map_err(|e| e.to_string())?;
    same_cells("bounded identity", identity.table(), &plain)?;
    let direct = compute_minbounded(45);
    let fbar = direct.fbar_function(45).map_err(|e| e.to_string())?;
    let via_f = compute_bounded_table(&fbar, 45).map_err(|e| e.to_string())?;
    same_cells("minbounded via fbar", via_f.table(), direct.table())?;
    Ok("plain cells n ≤ 9, minbounded cells n ≤ 45".into())
}

fn c11() -> Outcome {
    let abar = compute_minbounded(45).abar_sequence().to_vec();
    let max_bits = 1 << 20;
    let mut seen = Vec::new();
    for j in 0..abar.len() {
        let Some(idx) = u64::try_from(&abar[j]).ok().filter(|&i| i < abar.len() as u64) else {
            continue;
        };
        let (v, source) = abar_of_abar(&abar, j, max_bits).map_err(|e| e.to_string())?;
        expect_eq(&format!("source of abar_{idx}"), source, AbarSource::Prefix)?;
        expect_eq(&format!("abar_{idx}"), v, BigUint::from(1u8) << idx)?;
        seen.push(idx.to_string());
    }
    expect_eq("reachable indices", seen.join(","), "1,2,4,12,16".to_string())?;
    // ā_16 = 65536 chains one step beyond the table.
    let (v, source) = abar_of_abar(&abar, 16, max_bits).map_err(|e| e.to_string())?;
    expect_eq("source of abar_65536", source, AbarSource::PowerSetLaw)?;
    expect_eq("abar_65536", v.bits(), 65537)?;
    if v.count_ones() != 1 || abar[45] >= v {
        return Err("abar_65536 inconsistent with the computed prefix".into());
    }
    Ok("indices 1,2,4,12,16 from the table; 65536 via the identity path".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "level sizes a_0..a_9", Duration::from_secs(1), c1),
        (2, "rank profiles n ≤ 7", Duration::from_secs(1), c2),
        (3, "cardinality profiles n ≤ 6", Duration::from_secs(1), c3),
        (4, "atoms u ≤ 5, n ≤ 5", Duration::from_secs(5), c4),
        (5, "bounded half/sqrt/log2", Duration::from_secs(60), c5),
        (6, "minimally bounded n ≤ 45", Duration::from_secs(1), c6),
        (7, "growth constant", Duration::from_secs(1), c7),
        (8, "brute-force oracle equivalence", Duration::from_secs(60), c8),
        (9, "exact inequalities to n = 16", Duration::from_secs(30), c9),
        (10, "reductions", Duration::from_secs(5), c10),
        (11, "power-set law", Duration::from_secs(5), c11),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {id:>2} {name} [{:.3}s / {}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
