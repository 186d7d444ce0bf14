use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use symspread_cli::report::ResultDoc;
use symspread_core::fixture::FixtureList;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symspread"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(err.lines().last().unwrap()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_q2_prints_the_summary_row() {
    let o = run(&["classify", "--q", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("d=0:2 d=1:5 d=2:6 d=3:1"), "{out}");
    assert!(out.contains("maximal d=0:0 d=1:1 d=2:5 d=3:1"), "{out}");
}

#[test]
fn partial_classification_does_no_higher_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "r.json");
    let o = run(&[
        "classify",
        "--q",
        "3",
        "--max-dim",
        "1",
        "--format",
        "json",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("orbits  d=0:2 d=1:7\n"));
    let doc: ResultDoc = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.counts, vec![2, 7]);
    assert_eq!(doc.levels.len(), 2);
}

#[test]
fn configuration_errors_exit_2_with_a_record() {
    let o = run(&["classify", "--q", "11"]);
    assert_eq!(o.status.code(), Some(2));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "unsupported_order");
    assert_eq!(rec["exit_code"], 2);

    let o = run(&["classify", "--q", "2", "--max-dim", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "config");

    let o = run(&["classify", "--q", "2", "--memory-budget", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["verify", &fixture("q8_lines.txt"), "--q", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "field_mismatch");

    let o = run(&["verify", "/nonexistent/list.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "io");
}

#[test]
fn budget_and_time_limits_exit_3() {
    let o = run(&["classify", "--q", "3", "--memory-budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["error"], "memory_budget");

    let dir = tempfile::tempdir().unwrap();
    let state = path(&dir, "s.state");
    let o = run(&[
        "classify",
        "--q",
        "5",
        "--workers",
        "1",
        "--time-limit",
        "1",
        "--checkpoint",
        s(&state),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["error"], "timeout");
    assert!(state.exists());
    // the interrupted run resumes to the full answer
    let o = run(&["classify", "--q", "5", "--checkpoint", s(&state)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("d=0:2 d=1:13 d=2:59 d=3:2"));
}

#[test]
fn checkpointed_runs_match_fresh_runs() {
    let dir = tempfile::tempdir().unwrap();
    let state = path(&dir, "s.state");
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    assert!(
        run(&["classify", "--q", "3", "--max-dim", "1", "--checkpoint", s(&state)])
            .status
            .success()
    );
    assert!(run(&[
        "classify",
        "--q",
        "3",
        "--checkpoint",
        s(&state),
        "--format",
        "json",
        "--out",
        s(&a)
    ])
    .status
    .success());
    assert!(run(&["classify", "--q", "3", "--format", "json", "--out", s(&b)])
        .status
        .success());
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn shipped_line_fixtures() {
    let o = run(&["verify", &fixture("q8_lines.txt"), "--q", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("semifield check: 17/17 pass"), "{out}");
    assert!(out.contains("inequivalence not certified"));

    // item 12 of the q=9 list is singular as printed (x=1, y=2+a satisfies det = 0)
    let o = run(&["verify", &fixture("q9_lines.txt"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let docs: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let items = docs[0]["items"].as_array().unwrap();
    let failing: Vec<u64> = items
        .iter()
        .filter(|i| i["semifield"] == false)
        .map(|i| i["index"].as_u64().unwrap() + 1)
        .collect();
    assert_eq!(failing, vec![12]);
    assert_eq!(items[11]["min_rank"], 3);
    assert_eq!(docs[0]["certification"], "none");
}

#[test]
fn own_q5_planes_are_certified_by_classification() {
    let dir = tempfile::tempdir().unwrap();
    let (state, result, planes) = (path(&dir, "s.state"), path(&dir, "r.json"), path(&dir, "planes.json"));
    assert!(run(&[
        "classify",
        "--q",
        "5",
        "--checkpoint",
        s(&state),
        "--format",
        "json",
        "--out",
        s(&result)
    ])
    .status
    .success());
    assert!(run(&[
        "report",
        s(&result),
        "--format",
        "json",
        "--dim",
        "2",
        "--out",
        s(&planes)
    ])
    .status
    .success());
    let o = run(&["verify", s(&planes), "--classification", s(&state)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("semifield check: 59/59 pass"), "{out}");
    assert!(
        out.contains("certified by classification (59 distinct orbits)"),
        "{out}"
    );
}

#[test]
fn q2_lines_are_certified_by_exhaustive_search() {
    let dir = tempfile::tempdir().unwrap();
    let (result, lines) = (path(&dir, "r.json"), path(&dir, "lines.json"));
    assert!(run(&["classify", "--q", "2", "--format", "json", "--out", s(&result)])
        .status
        .success());
    assert!(run(&[
        "report",
        s(&result),
        "--format",
        "json",
        "--dim",
        "1",
        "--out",
        s(&lines)
    ])
    .status
    .success());
    let out = stdout(&run(&["verify", s(&lines)]));
    assert!(
        out.contains("certified by exhaustive search (5 distinct orbits)"),
        "{out}"
    );
    let out = stdout(&run(&["verify", s(&lines), "--oracle-bound", "100"]));
    assert!(out.contains("inequivalence not certified"), "{out}");
}

#[test]
fn identify_algebras_and_solids() {
    let dir = tempfile::tempdir().unwrap();
    let alg = path(&dir, "field4.txt");
    std::fs::write(&alg, stdout(&run(&["algebra", "--q", "4"]))).unwrap();
    let o = run(&["identify", s(&alg)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("orbit 0 of 1\nwitness:\n"));

    let state = path(&dir, "q5.state");
    assert!(run(&["classify", "--q", "5", "--checkpoint", s(&state)])
        .status
        .success());
    let field = path(&dir, "field5.txt");
    let dickson = path(&dir, "dickson5.txt");
    std::fs::write(&field, stdout(&run(&["algebra", "--q", "5", "--solid"]))).unwrap();
    std::fs::write(&dickson, stdout(&run(&["algebra", "--q", "5", "--kind", "dickson"]))).unwrap();
    let orbit = |p: &Path| {
        let o = run(&["identify", s(p), "--classification", s(&state), "--format", "json"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["orbits"], 2);
        assert_eq!(v["witness"].as_array().unwrap().len(), 4);
        v["orbit"].as_u64().unwrap()
    };
    assert_ne!(orbit(&field), orbit(&dickson));

    let o = run(&["algebra", "--q", "4", "--kind", "dickson"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "bad.txt");
    std::fs::write(&bad, "q=5 basis=X^4+2\n1 2 3\n").unwrap();
    let o = run(&["identify", s(&bad)]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_record(&o)["error"], "parse");

    std::fs::write(
        &bad,
        "q=8 minpoly=X^3+X+1 params=x,y count=1\n# 1\n1 0 0 0 1 0 0 1 0 b\n",
    )
    .unwrap();
    let o = run(&["verify", s(&bad)]);
    assert_eq!(o.status.code(), Some(4));
    let msg = error_record(&o)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 3"), "{msg}");

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["report", s(&bad)]).status.code(), Some(4));
}

#[test]
fn reports() {
    let dir = tempfile::tempdir().unwrap();
    let result = path(&dir, "r.json");
    assert!(run(&["classify", "--q", "2", "--format", "json", "--out", s(&result)])
        .status
        .success());
    let text = std::fs::read_to_string(&result).unwrap();
    let doc: ResultDoc = serde_json::from_str(&text).unwrap();

    // json renders back to fixtures that parse into the same lists
    let json = stdout(&run(&["report", s(&result), "--format", "json"]));
    let lists = FixtureList::parse_all(&json).unwrap();
    assert_eq!(lists.len(), 4);
    for (d, list) in lists.iter().enumerate() {
        assert_eq!(list, &doc.fixture(d).unwrap());
        assert_eq!(FixtureList::parse(&list.to_text().unwrap()).unwrap(), *list);
    }

    let latex = stdout(&run(&["report", s(&result), "--format", "latex", "--dim", "0"]));
    let cells: Vec<&str> = latex.lines().filter(|l| l.starts_with('$')).collect();
    assert_eq!(cells.len(), 2);
    for c in cells {
        let body = c.split_once("\\ ").unwrap().1.rsplit_once('$').unwrap().0;
        let symbols: std::collections::HashSet<char> = body
            .replace("\\left", "")
            .replace("\\right", "")
            .replace("\\begin{array}{cccc}", "")
            .replace("\\end{array}", "")
            .chars()
            .filter(|ch| ch.is_ascii_alphabetic())
            .collect();
        assert_eq!(symbols, ['x'].into_iter().collect());
    }

    let report = stdout(&run(&["report", s(&result), "--dim", "1"]));
    assert!(report.contains("dimension 1: 5 orbits"));
    assert_eq!(report.matches("\n#").count(), 5);

    for format in ["text", "latex", "json"] {
        let a = run(&["report", s(&result), "--format", format]);
        let b = run(&["report", s(&result), "--format", format]);
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
    assert_eq!(run(&["report", s(&result), "--dim", "7"]).status.code(), Some(2));
}
