use assert_cmd::Command;
use serde_json::Value;

fn monocount() -> Command {
    Command::cargo_bin("monocount").unwrap()
}

fn json(out: &[u8]) -> Value {
    serde_json::from_slice(out).unwrap()
}

#[test]
fn generate_pyramid_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    monocount()
        .args(["generate", "--family", "pyramid", "--n", "10", "--out"])
        .arg(&path)
        .assert()
        .success();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# vertices=12 edges=21\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 21);
}

#[test]
fn fourth_moment_of_k4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k4.txt");
    std::fs::write(&path, "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let out = monocount()
        .args(["fourth-moment", "--c", "2", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert_eq!(v["result"]["excess4"]["num"], "5");
    assert_eq!(v["result"]["excess4"]["den"], "3");
    assert_eq!(v["command"], "fourth-moment");
    assert!(v["input"]["digest"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
}

#[test]
fn simulate_is_reproducible_across_threads() {
    let run = |threads: &str| {
        monocount()
            .args([
                "--threads",
                threads,
                "simulate",
                "--family",
                "pyramid",
                "--n",
                "200",
                "--c",
                "2",
                "--reps",
                "5000",
                "--seed",
                "7",
            ])
            .output()
            .unwrap()
    };
    let first = run("1");
    assert!(first.status.success());
    for threads in ["1", "4", "8"] {
        assert_eq!(run(threads).stdout, first.stdout, "threads = {threads}");
    }
}

#[test]
fn raw_samples_match_replications() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("t3.bin");
    monocount()
        .args([
            "simulate",
            "--family",
            "complete",
            "--n",
            "5",
            "--c",
            "3",
            "--reps",
            "100",
            "--seed",
            "1",
            "--statistic",
            "t3",
            "--raw-out",
        ])
        .arg(&raw)
        .assert()
        .success();
    let bytes = std::fs::read(&raw).unwrap();
    assert_eq!(bytes.len(), 800);
    assert!(bytes
        .chunks(8)
        .all(|c| u64::from_le_bytes(c.try_into().unwrap()) <= 10));
}

#[test]
fn exact_distribution_of_a_triangle() {
    let out = monocount()
        .args([
            "simulate",
            "--family",
            "complete",
            "--n",
            "3",
            "--c",
            "2",
            "--exact",
            "--statistic",
            "t3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json(&out.stdout);
    let pmf = &v["result"][0]["pmf"];
    assert_eq!(pmf[0][0], 0);
    assert_eq!(pmf[0][1]["num"], "3");
    assert_eq!(pmf[0][1]["den"], "4");
}

#[test]
fn domain_errors_exit_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    monocount()
        .args([
            "fourth-moment",
            "--family",
            "star",
            "--n",
            "4",
            "--c",
            "2",
            "--out",
        ])
        .arg(&path)
        .assert()
        .code(1);
    assert!(!path.exists());
    monocount()
        .args([
            "simulate", "--family", "complete", "--n", "30", "--c", "2", "--exact",
        ])
        .assert()
        .code(1);
}

#[test]
fn usage_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    for args in [
        vec!["simulate", "--family", "pyramid", "--n", "5", "--c", "2"],
        vec!["moments", "--c", "2"],
        vec!["moments", "--family", "pyramid", "--c", "2"],
        vec!["moments", "--family", "gnp", "--n", "5", "--c", "2"],
        vec!["moments", "--family", "pyramid", "--n", "5", "--c", "1"],
    ] {
        monocount()
            .args(&args)
            .arg("--out")
            .arg(&path)
            .assert()
            .code(2);
        assert!(!path.exists(), "{args:?}");
    }
    monocount()
        .args([
            "census", "--input", "x.txt", "--family", "pyramid", "--n", "3",
        ])
        .assert()
        .code(2);
}

#[test]
fn census_and_bounds_report_exact_values() {
    let out = monocount()
        .args(["census", "--family", "pyramid", "--n", "10"])
        .output()
        .unwrap();
    let v = json(&out.stdout);
    assert_eq!(v["result"]["b"], "45");
    assert_eq!(v["result"]["pyramids"]["n4"], "210");
    let out = monocount()
        .args(["bounds", "--family", "pyramid", "--n", "10", "--c", "2"])
        .output()
        .unwrap();
    let v = json(&out.stdout);
    assert_eq!(v["result"]["t3"]["r1"]["num"], "211");
    assert_eq!(v["result"]["t3"]["r1"]["den"], "3025");
    assert_eq!(v["result"]["t3"]["r2"]["num"], "9");
    assert_eq!(v["result"]["t3"]["r2"]["den"], "605");
}

#[test]
fn spec_input_builds_disjoint_union() {
    let out = monocount()
        .args([
            "census",
            "--spec",
            r#"{"family":"disjoint_union","parts":[{"family":"complete","n":4},{"family":"cycle","n":5}]}"#,
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert_eq!(v["result"]["vertices"], 9);
    assert_eq!(v["result"]["triangles"], 4);
}

#[test]
fn verify_exact_suite_passes() {
    let out = monocount().arg("verify").output().unwrap();
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert_eq!(v["result"]["failed"], 0);
    assert_eq!(v["result"]["passed"], 4);
}
