use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use torsion_core::field::Field;
use torsion_core::poly::parse_with_inferred_context;

fn torsion(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_torsion"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = torsion(args);
    assert_eq!(code, 0, "{args:?}: {err}{out}");
    out
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Integers not glued to an identifier, so `x12` contributes nothing.
fn numbers(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut prev = ' ';
    let mut cur = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_ascii_digit() && (!cur.is_empty() || !prev.is_alphanumeric()) {
            cur.push(ch);
        } else if !cur.is_empty() {
            let trimmed = cur.trim_start_matches('0');
            out.insert(if trimmed.is_empty() {
                "0".into()
            } else {
                trimmed.to_string()
            });
            cur.clear();
        }
        prev = ch;
    }
    out
}

fn json_numbers(v: &Value, out: &mut BTreeSet<String>) {
    match v {
        Value::Number(n) => {
            out.extend(numbers(&n.to_string()));
        }
        Value::String(s) => out.extend(numbers(s)),
        Value::Array(a) => a.iter().for_each(|x| json_numbers(x, out)),
        Value::Object(o) => o.values().for_each(|x| json_numbers(x, out)),
        _ => {}
    }
}

fn same_numbers(args: &[&str]) {
    let text = ok(args);
    let mut json_args = vec!["--format", "json"];
    json_args.extend_from_slice(args);
    let json: Value = serde_json::from_str(&ok(&json_args)).unwrap();
    let mut from_json = BTreeSet::new();
    json_numbers(&json, &mut from_json);
    assert_eq!(numbers(&text), from_json, "{args:?}\n{text}\n{json:#}");
}

#[test]
fn x100_bound() {
    let out = ok(&["bounds", "--N", "99", "--d", "100", "--char", "0"]);
    assert!(out.contains("combined=718766754945489455304472257065075294400 upper="));
    let out = ok(&[
        "bounds",
        "--N",
        "99",
        "--d",
        "100",
        "--check-divisor",
        "138600",
    ]);
    assert!(out.contains("138600 divides combined: yes"));
}

#[test]
fn quintic_characteristics() {
    let row = |ch: &str| {
        let out = ok(&["bounds", "--N", "4", "--d", "5", "--char", ch]);
        out.lines()
            .any(|l| l.split_whitespace().next() == Some("3"))
    };
    assert!(row("0"));
    assert!(row("2"));
    assert!(!row("3"));
}

#[test]
fn degree_three_relation() {
    let out = ok(&["relation", "--m", "2", "--n", "3", "--verify"]);
    assert!(out.contains(
        "(x1,x2,x3) = (x1*y1^2,-x1*x2*y3^2 + x2*y2^2,x1*x2*x3*y7^2 - x1*x3*y5^2 - x2*x3*y6^2 + x3*y4^2)"
    ));
    assert!(out.contains("witnesses: 2/2 verified"));
}

#[test]
fn exit_codes() {
    let (code, _, err) = torsion(&["twisting", "--m", "2", "--poly-file", "missing.txt"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    assert_eq!(torsion(&["bounds", "--N", "4", "--d", "5", "--bogus"]).0, 2);
    assert_eq!(torsion(&["nonsense"]).0, 2);
    assert_eq!(torsion(&["pfister", "--m", "1", "--n", "2"]).0, 2);
    assert_eq!(torsion(&["bounds", "--N", "2", "--d", "5"]).0, 2);

    let bad = scratch("not_twisting.txt", "x0^2 + x1^2 + x2^2\n");
    let (code, out, _) = torsion(&["twisting", "--m", "2", "--poly-file", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("not twisting type"));

    let conic = scratch("conic.txt", "t*(x0^2 + x1^2 + x2^2)^2 - x0^2*x1*x2\n");
    let out = ok(&[
        "twisting",
        "--m",
        "2",
        "--poly-file",
        conic.to_str().unwrap(),
    ]);
    assert!(out.contains("verdict: twisting type"));
}

#[test]
fn probes_are_seeded() {
    let z = ok(&["construct", "z", "--N", "3", "--d", "4", "--m", "2"]);
    let path = scratch("z.txt", &z);
    let p = path.to_str().unwrap();
    let a = ok(&[
        "--seed", "11", "probe", "integral", "--file", p, "--trials", "8",
    ]);
    let b = ok(&[
        "--seed", "11", "probe", "integral", "--file", p, "--trials", "8",
    ]);
    assert_eq!(a, b);
    assert!(a.contains("11"));

    let ex = ok(&[
        "construct",
        "example",
        "--N",
        "3",
        "--d",
        "4",
        "--m",
        "2",
        "--p",
        "3",
    ]);
    let path = scratch("example.txt", &ex);
    let (code, out, _) = torsion(&[
        "probe",
        "smooth",
        "--file",
        path.to_str().unwrap(),
        "--q",
        "7",
        "--assign",
        "s=2",
    ]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = torsion(&[
        "probe",
        "smooth",
        "--file",
        path.to_str().unwrap(),
        "--q",
        "7",
        "--assign",
        "s=1",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("(0 : 1 : 1 : 0 : 0)"), "{out}");
}

#[test]
fn residue_file() {
    let sym = scratch(
        "gen.txt",
        "symbol m=5 coeff=1 vars=x1,x2,x3\n1 0 0\n0 1 0\n0 0 1\n",
    );
    let out = ok(&[
        "residue",
        "--file",
        sym.to_str().unwrap(),
        "--order",
        "x3,x2,x1",
    ]);
    assert!(out.contains("residue along x3,x2,x1: 4 mod 5"), "{out}");
    assert!(out.contains("certified order: at least 5"), "{out}");
}

#[test]
fn json_and_text_agree() {
    let sym = scratch("agree.txt", "symbol m=6 coeff=1 vars=x1,x2\n1 2\n0 3\n");
    let example = scratch(
        "agree_example.txt",
        &ok(&[
            "construct",
            "example",
            "--N",
            "3",
            "--d",
            "4",
            "--m",
            "2",
            "--p",
            "3",
        ]),
    );
    let conic = scratch("agree_conic.txt", "t*(x0^2 + x1^2 + x2^2)^2 - x0^2*x1*x2\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["bounds", "--N", "4", "--d", "5"],
        vec!["bounds", "--N", "99", "--d", "100"],
        vec!["bounds", "--N", "10", "--d", "40"],
        vec!["bounds", "cyclic", "--N", "3", "--m", "2"],
        vec!["bounds", "asok", "--N", "12", "--m", "3"],
        vec!["pfister", "--m", "3", "--n", "2"],
        vec!["relation", "--m", "2", "--n", "3", "--verify"],
        vec!["construct", "z", "--N", "3", "--d", "5", "--m", "2"],
        vec!["construct", "cyclic", "--N", "3", "--d", "6", "--m", "2"],
        vec!["residue", "--file", sym.to_str().unwrap()],
        vec![
            "twisting",
            "--m",
            "2",
            "--poly-file",
            conic.to_str().unwrap(),
        ],
        vec![
            "residue",
            "--file",
            sym.to_str().unwrap(),
            "--order",
            "x2,x1",
        ],
        vec!["construct", "y", "--N", "4", "--m", "3"],
        vec!["construct", "y0-check", "--N", "5", "--m", "2"],
        vec![
            "construct",
            "example",
            "--N",
            "3",
            "--d",
            "4",
            "--m",
            "2",
            "--p",
            "3",
        ],
        vec![
            "probe",
            "smooth",
            "--file",
            example.to_str().unwrap(),
            "--q",
            "7",
            "--assign",
            "s=2",
        ],
        vec![
            "--seed",
            "5",
            "probe",
            "integral",
            "--file",
            example.to_str().unwrap(),
            "--assign",
            "s=2",
            "--trials",
            "4",
        ],
        vec![
            "example",
            "--N",
            "3",
            "--d",
            "4",
            "--m",
            "2",
            "--p",
            "3",
            "--probe-q",
            "7",
            "--s",
            "2",
        ],
    ];
    for c in cases {
        same_numbers(&c);
    }
}

fn header_params(text: &str) -> Vec<String> {
    text.lines()
        .find_map(|l| l.strip_prefix("# unit parameters:"))
        .map(|s| {
            s.split(',')
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect()
        })
        .unwrap_or_default()
}

#[test]
fn emitted_polynomials_reparse() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["pfister", "--m", "3", "--n", "3"],
        vec!["construct", "z", "--N", "5", "--d", "6", "--m", "3"],
        vec![
            "construct",
            "example",
            "--N",
            "3",
            "--d",
            "4",
            "--m",
            "2",
            "--p",
            "3",
        ],
        vec![
            "construct",
            "example",
            "--N",
            "3",
            "--d",
            "4",
            "--m",
            "2",
            "--p",
            "5",
            "--mode",
            "fpst",
        ],
    ];
    for args in runs {
        let out = ok(&args);
        let body: Vec<&str> = out
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .collect();
        let line = body.last().unwrap();
        let params = header_params(&out);
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        let field = if args.contains(&"fpst") {
            Field::from_characteristic(5).unwrap()
        } else {
            Field::Rationals
        };
        let p = parse_with_inferred_context(line, field.clone(), &params).unwrap();
        assert_eq!(&p.to_string(), line, "{args:?}");
        let again = parse_with_inferred_context(&p.to_string(), field, &params).unwrap();
        assert_eq!(again, p);
    }
}
