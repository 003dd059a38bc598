use std::path::Path;
use std::process::{Command, Output};

fn netcomm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcomm"))
        .current_dir(dir)
        .args(args)
        .env("SOURCE_DATE_EPOCH", "0")
        .env_remove("NETCOMM_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[track_caller]
fn assert_ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), stderr(o));
}

const PUBS: &str = r#"{"id": "p1", "year": 2001, "kind": "journal", "authors": ["Ana Ruiz", "Bo Lind"]}
{"id": "p2", "year": 2003, "kind": "conference", "authors": ["ana  ruiz", "Cy Oduya", "Bo Lind"]}

{"id": "p3", "year": 2004, "kind": "book", "authors": ["Dee Marsh"]}
"#;

const BARBELL: &str = "a\tb\na\tc\nb\tc\nc\td\nd\te\nd\tf\ne\tf\n";

const ATTRS: &str = "id,department,affiliation,origin,position
a,math,north,x,junior
b,math,north,y,senior
c,math,south,,junior
d,bio,south,x,senior
e,bio,north,y,junior
f,bio,,x,senior
";

/// Barbell graph and attributes in a fresh directory.
fn barbell_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b6.tsv"), BARBELL).unwrap();
    std::fs::write(dir.path().join("attrs.csv"), ATTRS).unwrap();
    assert_ok(&netcomm(dir.path(), &["build", "--edges", "b6.tsv", "--out", "b6.json"]));
    dir
}

#[test]
fn builds_graph_from_publications() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pubs.jsonl"), PUBS).unwrap();
    let out = netcomm(dir.path(), &["build", "--pubs", "pubs.jsonl", "--out", "g.json"]);
    assert_ok(&out);
    assert_eq!(stdout(&out).trim(), "4 vertices, 3 edges");
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("g.json")).unwrap()).unwrap();
    let text = doc.to_string();
    assert!(text.contains("ana ruiz") && text.contains("dee marsh"), "{text}");
    assert!(dir.path().join("g.json.manifest.json").exists());
}

#[test]
fn pipeline_detect_then_chisq() {
    let dir = barbell_dir();
    let p = dir.path();
    let out = netcomm(p, &["detect", "b6.json", "--algo", "walktrap", "--out", "wt.csv", "--dendrogram", "wt.tree.json"]);
    assert_ok(&out);
    assert_eq!(stdout(&out).trim(), "walktrap: 2 communities over 6 vertices");
    let membership = std::fs::read_to_string(p.join("wt.csv")).unwrap();
    assert!(membership.starts_with("id,community\n"), "{membership}");
    assert_eq!(membership.lines().count(), 7);
    assert!(p.join("wt.tree.json").exists());

    let out = netcomm(
        p,
        &[
            "chisq", "b6.json", "--membership", "WT=wt.csv", "--attrs", "attrs.csv", "--characteristic",
            "department,origin", "--seed", "3", "--out", "grid.json",
        ],
    );
    assert_ok(&out);
    let text = stdout(&out);
    assert!(text.contains("WT") && text.contains("department"), "{text}");
    let grid: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("grid.json")).unwrap()).unwrap();
    assert!(grid.to_string().contains("department"));
}

#[test]
fn stats_prints_json_to_stdout() {
    let dir = barbell_dir();
    let out = netcomm(dir.path(), &["stats", "b6.json"]);
    assert_ok(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["vertices"], 6);
    assert_eq!(v["edges"], 7);
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = barbell_dir();
    let p = dir.path();
    let cases: &[&[&str]] = &[
        &["build", "--pubs", "x.jsonl", "--edges", "b6.tsv", "--out", "g.json"],
        &["stats", "missing.json"],
        &["detect", "b6.json", "--algo", "spinglass", "--out", "sg.csv"],
        &["detect", "b6.json", "--algo", "louvain", "--out", "x.csv"],
        &["layout", "b6.json", "--seed", "1", "--color-by", "department", "--out", "l.svg"],
    ];
    for args in cases {
        let out = netcomm(p, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
    assert_ok(&netcomm(p, &["detect", "b6.json", "--algo", "lev", "--out", "lev.csv"]));
    let out = netcomm(
        p,
        &[
            "chisq", "b6.json", "--membership", "lev.csv", "--attrs", "attrs.csv", "--characteristic", "height",
            "--seed", "1", "--out", "g.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("height"));
}

#[test]
fn membership_with_unknown_vertices_is_rejected() {
    let dir = barbell_dir();
    std::fs::write(dir.path().join("bad.csv"), "id,community\na,0\nzed,1\n").unwrap();
    let out = netcomm(
        dir.path(),
        &[
            "chisq", "b6.json", "--membership", "bad.csv", "--attrs", "attrs.csv", "--characteristic", "all",
            "--seed", "1", "--out", "g.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("zed"), "{}", stderr(&out));
}

#[test]
fn spinglass_on_disconnected_graph_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("two.tsv"), "a\tb\nb\tc\na\tc\nx\ty\n").unwrap();
    let out = netcomm(dir.path(), &["detect", "two.tsv", "--algo", "spinglass", "--seed", "1", "--out", "sg.csv"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let out = netcomm(
        dir.path(),
        &["detect", "two.tsv", "--algo", "spinglass", "--seed", "1", "--largest-component", "--out", "sg.csv"],
    );
    assert_ok(&out);
    assert!(stdout(&out).contains("excluded 2 vertices"));
}

#[test]
fn layout_sizes_by_centrality_and_colors_by_attribute() {
    let dir = barbell_dir();
    let p = dir.path();
    let out = netcomm(
        p,
        &[
            "layout", "b6.json", "--seed", "4", "--size-by", "centrality", "--color-by", "origin", "--attrs",
            "attrs.csv", "--title", "Barbell", "--out", "b6.svg",
        ],
    );
    assert_ok(&out);
    let svg = std::fs::read_to_string(p.join("b6.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let radii: Vec<f64> = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle"))
        .map(|n| n.attribute("r").unwrap().parse().unwrap())
        .collect();
    assert_eq!(radii.len(), 6);
    let max = radii.iter().cloned().fold(f64::MIN, f64::max);
    let min = radii.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max > min);
    assert!(svg.contains("Barbell"));
}

#[test]
fn seeded_runs_are_byte_identical_and_replay_verifies() {
    let dir = barbell_dir();
    let p = dir.path();
    let run = |out: &str| {
        assert_ok(&netcomm(p, &["detect", "b6.json", "--algo", "spinglass", "--seed", "9", "--out", out]));
        std::fs::read(p.join(out)).unwrap()
    };
    assert_eq!(run("one.csv"), run("two.csv"));
    let out = netcomm(p, &["replay", "one.csv.manifest.json", "--verify"]);
    assert_ok(&out);
    assert!(stdout(&out).contains("byte-identically"));

    // A tampered output is reported, then regenerated.
    std::fs::write(p.join("one.csv"), "id,community\n").unwrap();
    let out = netcomm(p, &["replay", "one.csv.manifest.json", "--verify"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("one.csv"));
    assert_ok(&netcomm(p, &["replay", "one.csv.manifest.json", "--verify"]));
}

#[test]
fn changed_input_blocks_replay() {
    let dir = barbell_dir();
    let p = dir.path();
    assert_ok(&netcomm(p, &["detect", "b6.json", "--algo", "eb", "--out", "eb.csv"]));
    std::fs::write(p.join("b6.json"), "{}").unwrap();
    let out = netcomm(p, &["replay", "eb.csv.manifest.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("b6.json"), "{}", stderr(&out));
}

#[test]
fn exports_and_size_histograms() {
    let dir = barbell_dir();
    let p = dir.path();
    assert_ok(&netcomm(p, &["detect", "b6.json", "--algo", "lev", "--out", "lev.csv"]));
    for format in ["graphml", "dot", "json"] {
        let out = format!("b6.{format}");
        assert_ok(&netcomm(
            p,
            &["export", "b6.json", "--format", format, "--membership", "lev.csv", "--attrs", "attrs.csv", "--out", &out],
        ));
        assert!(std::fs::metadata(p.join(&out)).unwrap().len() > 0);
    }
    let graphml = std::fs::read_to_string(p.join("b6.graphml")).unwrap();
    roxmltree::Document::parse(&graphml).unwrap();
    assert_eq!(netcomm(p, &["export", "b6.json", "--format", "gexf", "--out", "x"]).status.code(), Some(2));

    let out = netcomm(p, &["sizes", "lev.csv", "--csv", "sizes.csv", "--svg", "sizes.svg"]);
    assert_ok(&out);
    assert_eq!(stdout(&out).trim(), "2 communities");
    roxmltree::Document::parse(&std::fs::read_to_string(p.join("sizes.svg")).unwrap()).unwrap();
}
