use std::io::Write as _;
use std::process::Command;

use scg::cli::{run, EXIT_LINT, EXIT_LOAD, EXIT_OK, EXIT_USAGE};
use scg::logic::from_json;

fn scg(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["scg"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn interpret_prints_ranked_lines() {
    let (code, out, _) = scg(&["--demo", "interpret", "big blue building"]);
    assert_eq!(code, EXIT_OK);
    let first = out.lines().next().unwrap();
    assert_eq!(
        first,
        "i1\t[0,3)\tbig blue building\t(LargeFn (SubcollectionOfWithRelationToFn Building mainColorOfObject BlueColor))"
    );
}

#[test]
fn empty_input_is_success() {
    let (code, out, _) = scg(&["--demo", "interpret", ""]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));
    let (code, out, _) = scg(&["--demo", "--format", "json", "interpret", ""]);
    assert_eq!(code, EXIT_OK);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["interpretations"], serde_json::json!([]));
}

#[test]
fn json_logic_round_trips_to_cycl() {
    for text in [
        "big blue building",
        "G12V-K-Ras",
        "Barack Obama eats a sandwich",
        "cat kibble",
        "a bank is a kind of company",
    ] {
        let (_, cycl, _) = scg(&["--demo", "interpret", text]);
        let (_, json, _) = scg(&["--demo", "--format", "json", "interpret", text]);
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        let reprinted: Vec<String> = doc["interpretations"]
            .as_array()
            .unwrap()
            .iter()
            .map(|i| from_json(&i["logic"]).unwrap().to_string())
            .collect();
        let printed: Vec<String> = cycl
            .lines()
            .map(|l| l.rsplit('\t').next().unwrap().to_string())
            .collect();
        assert_eq!(reprinted, printed, "{text}");
    }
}

#[test]
fn json_carries_provenance() {
    let (_, json, _) = scg(&[
        "--demo",
        "--format",
        "json",
        "interpret",
        "big blue building",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let top = &doc["interpretations"][0];
    assert_eq!(top["output_type"], "Building");
    assert_eq!(top["provenance"]["source"], "Big");
    assert_eq!(
        top["provenance"]["children"][0]["node"]["source"],
        "ColorThing"
    );
}

#[test]
fn trace_names_the_negative_test() {
    let (code, out, _) = scg(&[
        "--demo",
        "--format",
        "trace",
        "interpret",
        "electron transport",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out
        .lines()
        .any(|l| l.starts_with("discarded\tMovementToLocation")
            && l.contains("MovementToLocation/test-/0")));
}

#[test]
fn question_mode_keeps_variables_open() {
    let (_, stmt, _) = scg(&["--demo", "interpret", "a sandwich"]);
    let (_, q, _) = scg(&["--demo", "--mode", "question", "interpret", "a sandwich"]);
    assert!(stmt.contains("(thereExists ?X (isa ?X Sandwich))"));
    assert!(q.ends_with("(isa ?X Sandwich)\n"));
}

#[test]
fn french_templates_are_selected_by_language() {
    let (_, en, _) = scg(&["--demo", "interpret", "placer la poêle à feu vif"]);
    let (_, fr, _) = scg(&[
        "--demo",
        "--lang",
        "fr",
        "interpret",
        "placer la poêle à feu vif",
    ]);
    assert!(!en.contains("HeatingOverHighHeat"));
    assert!(fr.contains("(SitTypeSpecWithTypeRestrictionOnRolePlayerFn HeatingOverHighHeat objectActedOn CookingPan)"));
}

#[test]
fn tag_prints_one_row_per_span() {
    let (code, out, _) = scg(&["--demo", "tag", "G12V-K-Ras"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3], ["4-5", "K-Ras", "K-Ras-Protein"]);
}

#[test]
fn exit_codes() {
    assert_eq!(scg(&["interpret", "x"]).0, EXIT_USAGE);
    assert_eq!(scg(&["--demo", "frobnicate"]).0, EXIT_USAGE);
    assert_eq!(
        scg(&[
            "--demo",
            "--kb",
            "/definitely/not/here.kb",
            "interpret",
            "x"
        ])
        .0,
        EXIT_LOAD
    );
    let bad = file("(genls A");
    assert_eq!(
        scg(&[
            "--demo",
            "--kb",
            bad.path().to_str().unwrap(),
            "interpret",
            "x"
        ])
        .0,
        EXIT_LOAD
    );
    let (code, out, _) = scg(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("interpret"));
}

#[test]
fn lint_demo_is_clean() {
    let (code, out, _) = scg(&["--demo", "lint"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));
}

#[test]
fn lint_reports_seeded_faults() {
    let kb = file("(genls A B)\n(genls B A)\n(collection Thing)\n");
    let lex = file("(lex \"zork\" Zork)\n");
    let cxn = file("(construction :id X :nl \"big $Gadget#0\" :logic (LargeFn $Gadget#0) :output-type (slot 0))\n");
    let (code, out, _) = scg(&[
        "lint",
        "--kb",
        kb.path().to_str().unwrap(),
        "--lexicon",
        lex.path().to_str().unwrap(),
        "--constructions",
        cxn.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_LINT);
    let codes: Vec<String> = out
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["code"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(
        codes,
        ["genls-cycle", "unknown-lexicon-term", "unknown-slot-type"]
    );
    assert!(out.lines().next().unwrap().contains("A, B"));
}

#[test]
fn lint_reports_invalid_constructions() {
    let cxn = file("(construction :id X :nl \"$A#0 $A#0\" :logic $A#0 :output-type (slot 0))\n");
    let (code, out, _) = scg(&[
        "--demo",
        "lint",
        "--constructions",
        cxn.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_LINT);
    assert!(out.contains("construction-invalid"));
}

#[test]
fn eval_worksheet_then_metrics() {
    let captions = file("c1\tbig blue building\nc2\t2 sandwiches\n");
    let path = captions.path().to_str().unwrap();
    let (code, sheet, _) = scg(&["--demo", "eval", path]);
    assert_eq!(code, EXIT_OK);
    assert!(sheet.contains("c1 i1 incorrect"));
    let verdicts = file("c1 i1 correct\nc2 i1 incorrect\n");
    let (code, out, _) = scg(&[
        "--demo",
        "--format",
        "json",
        "eval",
        path,
        "--verdicts",
        verdicts.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let m: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(m["precision"], 0.5);
    assert_eq!(m["coverage"], 0.5);
    assert_eq!(m["mean_length"], 3.0);
    let unknown = file("c1 i7 correct\n");
    let (code, _, err) = scg(&[
        "--demo",
        "eval",
        path,
        "--verdicts",
        unknown.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_LOAD);
    assert!(err.contains("i7"));
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_scg"))
        .args(["--demo", "interpret", "2 sandwiches"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("(GroupFn Sandwich)"));
    let out = Command::new(env!("CARGO_BIN_EXE_scg"))
        .args(["lint"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}
