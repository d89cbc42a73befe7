//! End-to-end checks of the binary: selectors, exit codes, derivations.

use std::path::PathBuf;
use std::process::{Command, Output};

use contextcut::catalog::{n_cycle_scenario, peres_mermin_scenario, pr_box_behavior};
use contextcut::json::{behavior_to_json, scenario_to_json};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contextcut"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct TempFile(PathBuf);

impl TempFile {
    fn new(name: &str, contents: &str) -> Self {
        let path = std::env::temp_dir().join(format!("contextcut-test-{}-{name}", std::process::id()));
        std::fs::write(&path, contents).unwrap();
        TempFile(path)
    }

    fn path(&self) -> &str {
        self.0.to_str().unwrap()
    }
}

impl Drop for TempFile {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

#[test]
fn generate_selectors() {
    let o = run(&["generate", "ncycle:5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\"measurements\""));
    // byte-stable across runs
    assert_eq!(text, stdout(&run(&["generate", "ncycle:5"])));

    let o = run(&["generate", "i3322"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"bound\": \"4/1\""));

    let o = run(&["generate", "chained:3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"bound\": \"4/1\""));

    let o = run(&["generate", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let s = n_cycle_scenario(4).unwrap();
    let scenario = TempFile::new("c4.json", &scenario_to_json(&s));
    let pr = TempFile::new("pr.json", &behavior_to_json(&s, &pr_box_behavior()));

    let o = run(&[
        "check",
        "--scenario",
        scenario.path(),
        "--behavior",
        pr.path(),
        "--test",
        "ncycle",
    ]);
    assert_eq!(o.status.code(), Some(3), "PR box must exit 3");
    let text = stdout(&o);
    assert!(text.contains("\"8/1\"") && text.contains("\"6/1\""));

    // oracle agrees on the same files
    let o = run(&[
        "check",
        "--scenario",
        scenario.path(),
        "--behavior",
        pr.path(),
        "--test",
        "oracle",
    ]);
    assert_eq!(o.status.code(), Some(3));

    // deterministic behavior passes both tests
    let det: String = {
        let dists = s
            .contexts
            .iter()
            .map(|c| {
                contextcut::scenario::ContextDistribution::deterministic(
                    s.context_order(c),
                    vec![1, 1],
                )
            })
            .collect();
        behavior_to_json(&s, &contextcut::scenario::Behavior::new(dists))
    };
    let detf = TempFile::new("det.json", &det);
    let o = run(&[
        "check",
        "--scenario",
        scenario.path(),
        "--behavior",
        detf.path(),
        "--test",
        "ncycle",
    ]);
    assert_eq!(o.status.code(), Some(0));

    // schema violation -> 2
    let broken = TempFile::new("broken.json", "{\"0,1\": {\"1,1\": \"2/1\"}}");
    let o = run(&[
        "check",
        "--scenario",
        scenario.path(),
        "--behavior",
        broken.path(),
        "--test",
        "ncycle",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_peres_mermin() {
    let s = peres_mermin_scenario();
    let scenario = TempFile::new("pm.json", &scenario_to_json(&s));
    let behavior = TempFile::new(
        "pmq.json",
        &behavior_to_json(&s, &contextcut::catalog::peres_mermin_quantum_behavior()),
    );
    let o = run(&[
        "check",
        "--scenario",
        scenario.path(),
        "--behavior",
        behavior.path(),
        "--test",
        "pm",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("\"6/1\""));
}

#[test]
fn derive_extend_and_guards() {
    // extend the base inequality over bell(3) and land on the catalog's
    // extended version
    let base = run(&["generate", "i3322"]);
    assert!(base.status.success());
    let ineq = TempFile::new("i3322.json", &stdout(&base));
    let s3 = contextcut::catalog::bell_scenario(3).unwrap();
    let params = TempFile::new(
        "extend.json",
        &format!("{{\"scenario\": {}, \"apex\": \"u\"}}", scenario_to_json(&s3)),
    );
    let o = run(&[
        "derive",
        "--ineq",
        ineq.path(),
        "--op",
        "extend",
        "--params",
        params.path(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let derived = stdout(&o);
    assert!(derived.contains("\"bound\": \"14/1\""));
    let expected = run(&["generate", "i3322-extended"]);
    assert_eq!(derived, stdout(&expected));

    // splitting refuses the signed convention
    let star = r#"{
      "graph": {"vertices": ["a", "b", "c", "w"], "edges": ["a|w", "b|w", "c|w"]},
      "convention": "pm1",
      "coeffs": {"a|w": "1/1", "b|w": "1/1", "c|w": "1/1"},
      "bound": "3/1",
      "trace": [{"step": "axiom", "name": "star"}]
    }"#;
    let starf = TempFile::new("star.json", star);
    let split = TempFile::new(
        "split.json",
        r#"{"vertex": "w", "s": ["a"], "t": ["b", "c"], "s_id": "s", "t_id": "t"}"#,
    );
    let o = run(&[
        "derive",
        "--ineq",
        starf.path(),
        "--op",
        "split",
        "--params",
        split.path(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zo"));

    // identity elimination list leaves the inequality unchanged
    let empty = TempFile::new("empty.json", r#"{"eliminations": []}"#);
    let o = run(&[
        "derive",
        "--ineq",
        starf.path(),
        "--op",
        "te",
        "--params",
        empty.path(),
        "--verify",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"bound\": \"3/1\""));
}
