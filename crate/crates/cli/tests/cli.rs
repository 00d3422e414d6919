use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn anime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anime")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = anime(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(p: &Path) -> Vec<Value> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn device() -> Value {
    json!({"kind": "dag", "name": "device", "edges": [
        ["Any", "User"], ["Any", "Firewall"], ["Any", "Server"],
        ["User", "U1"], ["User", "U2"], ["User", "U3"],
        ["Firewall", "FW1"], ["Firewall", "FW2"], ["Server", "S1"], ["Server", "S2"]
    ]})
}

/// Tuple feature and the six paths of the data-center example.
fn write_flow(dir: &Path) {
    let comp = |name: &str| {
        let mut d = device();
        d["name"] = json!(name);
        d
    };
    let feature = json!({"kind": "tuple", "name": "flow", "components": [
        {"kind": "ipprefix", "name": "dst"}, comp("start"), comp("waypoint"), comp("end")
    ]});
    fs::write(dir.join("feature.json"), feature.to_string()).unwrap();
    let rows = [
        ("10.0.1.2", "U1", "FW1", "S1"),
        ("10.0.1.2", "U2", "FW1", "S1"),
        ("10.0.1.2", "U3", "FW2", "S1"),
        ("10.0.1.3", "U1", "FW2", "S2"),
        ("10.0.1.3", "U2", "FW1", "S2"),
        ("10.0.1.3", "U3", "FW2", "S2"),
    ];
    let body: String = rows
        .iter()
        .map(|(d, a, w, e)| json!({"dst": d, "start": a, "waypoint": w, "end": e}).to_string() + "\n")
        .collect();
    fs::write(dir.join("paths.jsonl"), body).unwrap();
}

#[test]
fn single_intent_for_the_tuple_example() {
    let dir = tempfile::tempdir().unwrap();
    write_flow(dir.path());
    let out = dir.path().join("intents.jsonl");
    ok(&[
        "infer",
        "--paths",
        s(&dir.path().join("paths.jsonl")),
        "--feature",
        s(&dir.path().join("feature.json")),
        "--k",
        "1",
        "--seed",
        "0",
        "--out",
        s(&out),
    ]);
    let got = lines(&out);
    assert_eq!(got.len(), 1);
    assert_eq!(got[0]["intent"], json!(["10.0.1.2/31", "User", "Firewall", "Server"]));
    assert_eq!(got[0]["members"], json!(6));
    assert_eq!(got[0]["cost"], json!(24.0));
}

#[test]
fn large_k_lists_the_paths() {
    let dir = tempfile::tempdir().unwrap();
    write_flow(dir.path());
    let paths = dir.path().join("paths.jsonl");
    let feature = dir.path().join("feature.json");
    let out = ok(&[
        "infer",
        "--paths",
        s(&paths),
        "--feature",
        s(&feature),
        "--k",
        "10",
        "--seed",
        "0",
        "--trace",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 6);
    assert!(stdout.lines().all(|l| l.contains("\"cost\":1.0")));
    assert!(String::from_utf8(out.stderr).unwrap().contains("6 intents"));

    let intents = dir.path().join("intents.jsonl");
    fs::write(&intents, stdout).unwrap();
    let report = dir.path().join("report.json");
    let eval = ok(&[
        "eval",
        "--intents",
        s(&intents),
        "--reference",
        s(&paths),
        "--feature",
        s(&feature),
        "--out",
        s(&report),
    ]);
    assert_eq!(
        String::from_utf8(eval.stdout).unwrap().trim(),
        "precision=1.0000, recall=1.0000, f=1.0000"
    );
    let doc: Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(doc["tp"], json!("6"));
    assert_eq!(doc["fp"], json!("0"));
}

#[test]
fn generators_write_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let ac = dir.path().join("ac");
    ok(&[
        "generate",
        "access-control",
        "--n",
        "100",
        "--g",
        "5",
        "--min",
        "5",
        "--max",
        "30",
        "--m",
        "10",
        "--seed",
        "7",
        "--out-dir",
        s(&ac),
    ]);
    for f in ["paths.jsonl", "possible.jsonl", "feature.json", "truth.json"] {
        assert!(ac.join(f).exists(), "{f}");
    }
    let isp = dir.path().join("isp");
    ok(&[
        "generate",
        "isp",
        "--nodes",
        "25",
        "--egresses",
        "5",
        "--destinations",
        "100",
        "--seed",
        "1",
        "--out-dir",
        s(&isp),
    ]);
    assert_eq!(lines(&isp.join("paths.jsonl")).len(), 2500);
    let ft = dir.path().join("ft");
    ok(&[
        "generate",
        "fattree",
        "--c",
        "2",
        "--f",
        "2",
        "--p",
        "2",
        "--l",
        "2",
        "--r",
        "1",
        "--s",
        "2",
        "--g",
        "2",
        "--i",
        "2",
        "--d",
        "8",
        "--seed",
        "3",
        "--out-dir",
        s(&ft),
    ]);
    let observed = lines(&ft.join("paths.jsonl"));
    assert_eq!(observed.len(), 72);
    assert!(observed.iter().all(|p| p.is_array()));
}

#[test]
fn observation_rate_thins_the_paths_file() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "generate",
        "isp",
        "--nodes",
        "25",
        "--egresses",
        "5",
        "--destinations",
        "100",
        "--seed",
        "1",
        "--observe",
        "0.6",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(lines(&dir.path().join("paths.jsonl")).len(), 1500);
    assert_eq!(lines(&dir.path().join("possible.jsonl")).len(), 2500);
}

#[test]
fn sweep_rows_cover_every_k_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&[
        "generate",
        "access-control",
        "--n",
        "30",
        "--g",
        "3",
        "--min",
        "3",
        "--max",
        "10",
        "--m",
        "4",
        "--seed",
        "2",
        "--observe",
        "0.6",
        "--out-dir",
        s(d),
    ]);
    let (paths, possible, feature) = (d.join("paths.jsonl"), d.join("possible.jsonl"), d.join("feature.json"));
    let base = [
        "sweep",
        "--paths",
        s(&paths),
        "--reference",
        s(&possible),
        "--feature",
        s(&feature),
    ];
    let run = |extra: &[&str]| -> Vec<csv::StringRecord> {
        let out = ok(&[&base[..], extra].concat());
        csv::Reader::from_reader(out.stdout.as_slice())
            .records()
            .map(|r| r.unwrap())
            .collect()
    };
    let per_cell = run(&["--k-min", "2", "--k-max", "8", "--k-step", "3", "--seeds", "0,5"]);
    assert_eq!(per_cell.len(), 3 * 2);
    assert_eq!(&per_cell[0][0], "2");
    assert_eq!((&per_cell[5][0], &per_cell[5][1]), ("8", "5"));
    let shared = run(&[
        "--k-min",
        "2",
        "--k-max",
        "8",
        "--k-step",
        "3",
        "--seeds",
        "0,5",
        "--single-pass",
    ]);
    for (a, b) in per_cell.iter().zip(&shared) {
        assert_eq!(
            a.iter().take(9).collect::<Vec<_>>(),
            b.iter().take(9).collect::<Vec<_>>()
        );
    }
    let single = run(&["--k-min", "4", "--k-max", "4", "--seeds", "1"]);
    assert_eq!(single.len(), 1);
    assert_eq!(&single[0][7], "1.000000");

    let csv_path = d.join("sweep.csv");
    ok(&[
        &base[..],
        &["--k-min", "3", "--k-max", "3", "--seeds", "0", "--csv", s(&csv_path)],
    ]
    .concat());
    let header = fs::read_to_string(csv_path).unwrap();
    assert!(header.starts_with("k,seed,tp,fn,fp,fp_exact,precision,recall,f_score,runtime_ms\n"));
}

#[test]
fn exit_codes() {
    assert!(anime(&["--help"]).status.success());
    assert_eq!(anime(&["infer", "--bogus"]).status.code(), Some(1));
    assert_eq!(anime(&[]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    write_flow(dir.path());
    let feature = dir.path().join("feature.json");
    let bad = dir.path().join("bad.jsonl");
    fs::write(
        &bad,
        "{\"dst\": \"10.0.1.2\", \"start\": \"User\", \"waypoint\": \"FW1\", \"end\": \"S1\"}\n",
    )
    .unwrap();
    let out = anime(&[
        "infer",
        "--paths",
        s(&bad),
        "--feature",
        s(&feature),
        "--k",
        "1",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("bad.jsonl:1"));

    fs::write(&bad, "not json\n").unwrap();
    let out = anime(&[
        "infer",
        "--paths",
        s(&bad),
        "--feature",
        s(&feature),
        "--k",
        "1",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let paths = dir.path().join("paths.jsonl");
    let out = anime(&[
        "infer",
        "--paths",
        s(&paths),
        "--feature",
        s(&feature),
        "--k",
        "0",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = anime(&["infer", "--paths", s(&paths), "--feature", s(&feature), "--k", "2"]);
    assert_eq!(out.status.code(), Some(1), "seed is mandatory");

    fs::write(
        &feature,
        r#"{"kind": "dag", "name": "x", "edges": [["A", "B"], ["B", "A"]]}"#,
    )
    .unwrap();
    let out = anime(&[
        "infer",
        "--paths",
        s(&paths),
        "--feature",
        s(&feature),
        "--k",
        "1",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fattree_intents_round_trip_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&[
        "generate",
        "fattree",
        "--c",
        "2",
        "--f",
        "1",
        "--p",
        "1",
        "--l",
        "2",
        "--r",
        "1",
        "--s",
        "1",
        "--g",
        "1",
        "--i",
        "1",
        "--d",
        "8",
        "--seed",
        "0",
        "--out-dir",
        s(d),
    ]);
    let intents = d.join("intents.jsonl");
    ok(&[
        "infer",
        "--paths",
        s(&d.join("paths.jsonl")),
        "--feature",
        s(&d.join("feature.json")),
        "--k",
        "6",
        "--b",
        "3",
        "--seed",
        "1",
        "--out",
        s(&intents),
    ]);
    let recs = lines(&intents);
    assert!(!recs.is_empty() && recs.len() <= 6);
    assert!(recs.iter().all(|r| r["intent"].is_string()));
    let out = ok(&[
        "eval",
        "--intents",
        s(&intents),
        "--reference",
        s(&d.join("paths.jsonl")),
        "--feature",
        s(&d.join("feature.json")),
    ]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["recall"], json!(1.0));
    let truth = d.join("truth.jsonl");
    let body: String = serde_json::from_str::<Vec<Value>>(&fs::read_to_string(d.join("truth.json")).unwrap())
        .unwrap()
        .iter()
        .map(|v| v.to_string() + "\n")
        .collect();
    fs::write(&truth, body).unwrap();
    let out = ok(&[
        "eval",
        "--intents",
        s(&truth),
        "--reference",
        s(&d.join("possible.jsonl")),
        "--feature",
        s(&d.join("feature.json")),
    ]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["recall"], json!(1.0));
}
