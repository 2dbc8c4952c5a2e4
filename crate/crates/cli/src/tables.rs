//! `verify-tables`: recompute the published unit tables, congruence pairs
//! and negative cases, and compare them with the values printed alongside
//! the construction.

use std::fmt::Write as _;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use quatgraph::congruence::{congruence_pairs, verify_pair};
use quatgraph::quat::{ibukiyama_order, AlgebraParams, IbukiyamaOrder, OrderElement, RatQuat};
use quatgraph::units::unit_group;

use crate::report::Outcome;

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
enum Status {
    Ok,
    KnownIssue,
    Mismatch,
}

#[derive(Serialize)]
struct Row {
    item: String,
    computed: Value,
    expected: Value,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

type Frac = (i64, i64);

/// Omega coordinates and the printed `1, i, j, ij` coordinates.
struct TableRow {
    omega: [i64; 4],
    standard: [Frac; 4],
}

const fn row(omega: [i64; 4], standard: [Frac; 4]) -> TableRow {
    TableRow { omega, standard }
}

/// Units of the P = 2, Q = 11 order as printed.
const UNITS_P2: [TableRow; 12] = [
    row([1, 0, 0, 1], [(0, 1), (0, 1), (3, 11), (1, 11)]),
    row([0, 1, 0, -2], [(1, 2), (0, 1), (-1, 22), (-2, 11)]),
    row([0, 1, 0, -1], [(1, 2), (0, 1), (5, 22), (-1, 11)]),
    row([1, -3, -1, 5], [(-1, 2), (-1, 2), (-3, 22), (-1, 22)]),
    row([1, -3, -1, 6], [(-1, 2), (-1, 2), (3, 22), (1, 22)]),
    row([1, -2, -1, 4], [(0, 1), (-1, 2), (1, 11), (-3, 22)]),
    row([1, -1, 0, 1], [(1, 2), (0, 1), (-5, 22), (1, 11)]),
    row([1, -1, 0, 2], [(1, 2), (0, 1), (1, 22), (2, 11)]),
    row([1, 0, 0, 0], [(1, 1), (0, 1), (0, 1), (0, 1)]),
    row([2, -4, -1, 7], [(0, 1), (-1, 2), (-1, 22), (3, 22)]),
    row([2, -3, -1, 5], [(1, 2), (-1, 2), (-3, 22), (-1, 22)]),
    row([2, -3, -1, 6], [(1, 2), (-1, 2), (3, 22), (1, 22)]),
];

/// Units of the P = 3, Q = 19 order as printed.
const UNITS_P3: [TableRow; 6] = [
    row([1, 0, 0, 0], [(1, 1), (0, 1), (0, 1), (0, 1)]),
    row([2, -4, -1, 10], [(0, 1), (-1, 2), (2, 19), (1, 38)]),
    row([2, -4, -1, 9], [(0, 1), (-1, 2), (-2, 19), (-1, 38)]),
    row([1, -1, 0, 2], [(1, 2), (0, 1), (-3, 38), (2, 19)]),
    row([0, 1, 0, -2], [(1, 2), (0, 1), (3, 38), (-2, 19)]),
    row([0, 0, 0, 1], [(0, 1), (0, 1), (4, 19), (1, 19)]),
];

/// Rows of the P = 2 table whose printed values are known to be wrong:
/// row 1 is not a unit, row 10 has a wrong `j` coefficient.
const KNOWN_BAD_P2_ROWS: [usize; 2] = [1, 10];

fn reference(p: i64) -> IbukiyamaOrder {
    IbukiyamaOrder::new(AlgebraParams::reference(p).expect("class number one")).expect("valid order")
}

fn frac_json(f: &[Frac; 4]) -> Value {
    json!(f.iter().map(|&(n, d)| if d == 1 { n.to_string() } else { format!("{n}/{d}") }).collect::<Vec<_>>())
}

fn std_json(q: &RatQuat) -> Value {
    json!(q.0.iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

fn unit_table(rows: &mut Vec<Row>, name: &str, ord: &IbukiyamaOrder, table: &[TableRow], known_bad: &[usize]) {
    let units = unit_group(ord).expect("unit group");
    let mut listed = Vec::new();
    for (k, r) in table.iter().enumerate() {
        let n = k + 1;
        let a = OrderElement(r.omega);
        let norm = ord.norm(&a);
        let standard = ord.to_standard(&a);
        let printed = RatQuat::from_fractions(r.standard);
        let agrees = norm == 1 && standard == printed;
        if norm == 1 {
            listed.push(a.sign_normalized());
        }
        let status = match (agrees, known_bad.contains(&n)) {
            (true, _) => Status::Ok,
            (false, true) => Status::KnownIssue,
            (false, false) => Status::Mismatch,
        };
        let mut problems = Vec::new();
        if norm != 1 {
            problems.push(format!("omega coordinates have norm {norm}"));
        }
        if standard != printed {
            problems.push("printed 1,i,j,ij coordinates differ from the omega coordinates".to_string());
        }
        rows.push(Row {
            item: format!("{name} row {n}"),
            computed: json!({ "omega": r.omega, "norm": norm, "standard": std_json(&standard) }),
            expected: json!({ "omega": r.omega, "norm": 1, "standard": frac_json(&r.standard) }),
            status,
            note: (!problems.is_empty()).then(|| problems.join("; ")),
        });
    }
    listed.sort();
    listed.dedup();
    let missing: Vec<[i64; 4]> = units.elements.iter().filter(|u| !listed.contains(u)).map(|u| u.0).collect();
    let complete = missing.is_empty() && listed.len() == units.order();
    rows.push(Row {
        item: format!("{name} covers the unit group"),
        computed: json!({ "distinct_units_listed": listed.len(), "missing": missing }),
        expected: json!({ "distinct_units_listed": units.order() }),
        status: if complete {
            Status::Ok
        } else if !known_bad.is_empty() {
            Status::KnownIssue
        } else {
            Status::Mismatch
        },
        note: (!complete).then(|| "a unit is missing because a row is not a unit".to_string()),
    });
}

/// Published names mapped to the labels used here.
fn same_group(published: &str, computed: &str) -> bool {
    let normal = match published {
        "A3" => "C3",
        "S2" => "C2",
        "A2" | "trivial" => "C1",
        other => other,
    };
    normal == computed
}

pub fn verify(seed: u64) -> Result<Outcome> {
    let mut rows = Vec::new();

    let published = [(2, 12, "A4"), (3, 6, "S3"), (5, 3, "A3"), (7, 2, "S2"), (13, 1, "trivial")];
    for (p, order, label) in published {
        let ord = if p == 13 { ibukiyama_order(13, None, None)? } else { reference(p) };
        let u = unit_group(&ord)?;
        let ok = u.order() == order && same_group(label, &u.label);
        rows.push(Row {
            item: format!("unit group P={p}"),
            computed: json!({ "order": u.order(), "label": u.label }),
            expected: json!({ "order": order, "label": label }),
            status: if ok { Status::Ok } else { Status::Mismatch },
            note: (p == 7).then(|| "also published as A2, which would be trivial; the group has order 2".to_string()),
        });
    }

    unit_table(&mut rows, "P=2 unit table", &reference(2), &UNITS_P2, &KNOWN_BAD_P2_ROWS);
    unit_table(&mut rows, "P=3 unit table", &reference(3), &UNITS_P3, &[]);

    let positive: [(i64, u32, &[&str]); 4] =
        [(2, 3, &["C2"]), (3, 4, &["C2^3", "C4xC2^2", "D4"]), (5, 5, &["C5:D5"]), (7, 2, &["C3"])];
    for (p, m, expected) in positive {
        let ord = reference(p);
        let (g, r) = congruence_pairs(&ord, m)?;
        let verified = r.pairs.iter().all(|x| verify_pair(&ord, &g, x).is_ok());
        let labels = r.class_labels();
        let mut distinct = labels.clone();
        distinct.sort();
        distinct.dedup();
        let mut want: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        want.sort();
        let (status, note) = if !verified || r.negative {
            (Status::Mismatch, Some("no verified pair".to_string()))
        } else if distinct == want {
            (Status::Ok, None)
        } else if p == 3 {
            (
                Status::KnownIssue,
                Some(
                    "published list names C2^3 (C8 in the proof) and C4xC2^2, which has order 16; \
                     the complements have order 8"
                        .to_string(),
                ),
            )
        } else {
            (Status::Mismatch, None)
        };
        rows.push(Row {
            item: format!("congruence pair P={p} m={m}"),
            computed: json!({ "class_labels": labels, "pairs": r.pairs.len(), "certificates_verified": verified }),
            expected: json!({ "labels": expected }),
            status,
            note,
        });
    }

    for (p, m) in [(3, 3), (3, 5), (7, 3), (7, 5), (7, 7)] {
        let (_, r) = congruence_pairs(&reference(p), m)?;
        rows.push(Row {
            item: format!("no congruence pair P={p} m={m}"),
            computed: json!({ "pairs": r.pairs.len() }),
            expected: json!({ "pairs": 0 }),
            status: if r.negative { Status::Ok } else { Status::Mismatch },
            note: None,
        });
    }

    // seeded spot check of the arithmetic the tables rest on
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for p in [2, 3, 5, 7, 13] {
        let ord = reference(p);
        for _ in 0..1000 {
            let mut pick = || OrderElement(std::array::from_fn(|_| rng.gen_range(-50..=50)));
            let (a, b) = (pick(), pick());
            let ab = ord.multiply(&a, &b);
            let conj_ok = ord.conjugate(&ab) == ord.multiply(&ord.conjugate(&b), &ord.conjugate(&a));
            if ord.norm(&ab) as i128 != ord.norm(&a) as i128 * ord.norm(&b) as i128 || !conj_ok {
                failures += 1;
            }
        }
    }
    rows.push(Row {
        item: "norm multiplicativity spot check".to_string(),
        computed: json!({ "samples": 5000, "failures": failures }),
        expected: json!({ "failures": 0 }),
        status: if failures == 0 { Status::Ok } else { Status::Mismatch },
        note: None,
    });

    let count = |s: Status| rows.iter().filter(|r| r.status == s).count();
    let (ok, known, bad) = (count(Status::Ok), count(Status::KnownIssue), count(Status::Mismatch));
    let mut text = String::new();
    for r in &rows {
        let tag = match r.status {
            Status::Ok => "ok         ",
            Status::KnownIssue => "known-issue",
            Status::Mismatch => "MISMATCH   ",
        };
        write!(text, "{tag} {}", r.item)?;
        if let Some(n) = &r.note {
            write!(text, " ({n})")?;
        }
        text.push('\n');
    }
    writeln!(text, "{ok} ok, {known} known issues, {bad} mismatches")?;
    let body = json!({
        "rows": rows,
        "summary": { "ok": ok, "known_issues": known, "mismatches": bad },
    });
    let mut out = Outcome::new("verify-tables", body, text);
    out.passed = bad == 0;
    Ok(out)
}
