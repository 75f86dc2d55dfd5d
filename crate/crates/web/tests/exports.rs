use serde_json::Value;
use torsion_web::{bounds_explorer, bounds_report, relation_viewer, twisting_checker};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).expect("exports return JSON")
}

#[test]
fn explorer_rows_cover_fano_range() {
    let v = parse(bounds_explorer(99, 0));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 97);
    let last = rows.last().unwrap();
    assert_eq!(last["d"], 100);
    assert_eq!(last["combined"], "718766754945489455304472257065075294400");
    assert_eq!(v["n"], 7);
    assert_eq!(v["r"], 92);
}

#[test]
fn explorer_marks_provenance() {
    let v = parse(bounds_explorer(4, 0));
    let row = &v["rows"].as_array().unwrap()[1];
    assert_eq!(row["d"], 5);
    let tags: Vec<(u64, String)> = row["divisors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["m"].as_u64().unwrap(),
                c["tags"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(
        tags,
        vec![(2, "LSP".into()), (3, "LS".into()), (5, "P".into())]
    );
}

#[test]
fn errors_are_json() {
    assert!(parse(bounds_explorer(2, 0))["error"].is_string());
    assert!(parse(bounds_explorer(100_000, 0))["error"].is_string());
    assert!(parse(bounds_report(4, 5, 4))["error"].is_string());
    assert!(parse(relation_viewer(1, 2))["error"].is_string());
    assert!(parse(relation_viewer(2, 40))["error"].is_string());
    assert!(parse(twisting_checker("x0^2 +", 2, true, "t"))["error"].is_string());
}

#[test]
fn single_report() {
    let v = parse(bounds_report(4, 5, 3));
    assert_eq!(v["combined"], "2");
    assert!(v["text"].as_str().unwrap().contains("combined=2 upper=120"));
}

#[test]
fn relation_view() {
    let v = parse(relation_viewer(2, 3));
    assert_eq!(
        v["relation"],
        "(x1,x2,x3) = (x1*y1^2,-x1*x2*y3^2 + x2*y2^2,x1*x2*x3*y7^2 - x1*x3*y5^2 - x2*x3*y6^2 + x3*y4^2)"
    );
    assert_eq!(v["witnesses"], 2);
    assert_eq!(v["verified"], 2);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 8);
}

#[test]
fn twisting_verdicts() {
    let g = "t*(x0^2 + x1^2 + x2^2)^2 - x0^2*x1*x2";
    assert_eq!(parse(twisting_checker(g, 2, true, "t"))["verdict"], true);
    assert_eq!(parse(twisting_checker(g, 2, false, "t"))["verdict"], false);
    assert_eq!(
        parse(twisting_checker("x0^2 + x1^2 + x2^2", 2, true, ""))["verdict"],
        false
    );
}
