//! Golden-file tests for every subcommand. Run with `AGTK_BLESS=1` to
//! rewrite the stored outputs after an intended change.

use std::path::PathBuf;
use std::process::{Command, Output};

fn agtk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agtk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden(name: &str, args: &[&str], code: i32) {
    let out = agtk(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{name}: stderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    let got = String::from_utf8(out.stdout).unwrap();
    if std::env::var_os("AGTK_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "{name} drifted from its golden file");
}

#[test]
fn group_describes_psl2() {
    golden("group_psl2_5.json", &["group", "--group", "psl2:5"], 0);
}

#[test]
fn group_multiplies() {
    golden(
        "group_mul_s3.json",
        &[
            "group",
            "--group",
            "sym:3",
            "--op",
            "mul",
            "--args",
            "[[1,0,2],[1,2,0]]",
        ],
        0,
    );
}

#[test]
fn set_doubling_csv() {
    golden(
        "set_doubling.csv",
        &[
            "set",
            "doubling",
            "--group",
            "cyclic:12",
            "--a",
            "[0,1,2]",
            "--format",
            "csv",
        ],
        0,
    );
}

#[test]
fn set_sum_product() {
    golden(
        "set_sum_product.json",
        &["set", "sum-product", "--p", "13", "--residues", "1,2,4,8"],
        0,
    );
}

#[test]
fn set_ruzsa() {
    golden(
        "set_ruzsa.json",
        &[
            "set",
            "ruzsa",
            "--group",
            "free-abelian:1",
            "--a",
            "[[0],[1],[2]]",
            "--b",
            "[[0],[5]]",
        ],
        0,
    );
}

#[test]
fn verify_freiman() {
    golden(
        "verify_freiman.json",
        &["verify", "freiman", "--max-order", "10", "--seed", "7"],
        0,
    );
}

#[test]
fn verify_hamidoune_reports_counterexample() {
    golden(
        "verify_hamidoune.json",
        &[
            "verify",
            "hamidoune",
            "--max-order",
            "6",
            "--samples",
            "12",
            "--seed",
            "1",
        ],
        1,
    );
}

#[test]
fn growth_heisenberg_csv() {
    golden(
        "growth_heisenberg.csv",
        &[
            "growth",
            "--group",
            "heisenberg",
            "--s",
            "[[0,0,0],[1,0,0],[-1,0,0],[0,1,0],[0,-1,0]]",
            "--n-max",
            "6",
            "--format",
            "csv",
        ],
        0,
    );
}

#[test]
fn nilprog_heisenberg() {
    golden(
        "nilprog.json",
        &[
            "nilprog",
            "--group",
            "heisenberg",
            "--spec",
            r#"{"generators": [[1,0,0],[0,1,0]], "lengths": [2,2]}"#,
        ],
        0,
    );
}

#[test]
fn diameter_psl2_csv() {
    golden(
        "diameter_psl2_5.csv",
        &["diameter", "--group", "psl2:5", "--format", "csv"],
        0,
    );
}

#[test]
fn spectral_cycle() {
    golden("spectral_cyclic_12.json", &["spectral", "--group", "cyclic:12"], 0);
}

#[test]
fn babai_csv() {
    golden("babai.csv", &["babai", "--primes", "3,5,7", "--format", "csv"], 0);
}

#[test]
fn limit_cycles_csv() {
    golden(
        "limit_cycles.csv",
        &["limit", "--family", "cycles", "--sizes", "8,16", "--format", "csv"],
        0,
    );
}

#[test]
fn limit_single_graph_against_torus() {
    golden(
        "limit_grid_torus.json",
        &[
            "limit",
            "--group",
            r#"{"kind":"direct-product","factors":[{"kind":"cyclic","n":6},{"kind":"cyclic","n":6}]}"#,
            "--torus",
            r#"{"q": 2, "norm": "l1"}"#,
        ],
        0,
    );
}

#[test]
fn cap_exceeded_exits_3() {
    let out = agtk(&["diameter", "--group", "psl2:101"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap exceeded"));
}

#[test]
fn malformed_spec_exits_2_naming_field() {
    let out = agtk(&["group", "--group", r#"{"kind":"cyclic","n":6,"modulus":2}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("modulus"));
    let out = agtk(&["group", "--group", "cyclic:x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`n`"));
}

#[test]
fn violation_prints_witness_and_exits_1() {
    let out = agtk(&["set", "hamidoune", "--group", "cyclic:4", "--a", "[0,1,2]"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["witness"]["a"], serde_json::json!([0, 1, 2]));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["verify", "schreier", "--samples", "40", "--seed", "11"];
    let a = agtk(&args);
    let b = agtk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = agtk(&["verify", "schreier", "--samples", "40", "--seed", "12"]);
    assert!(c.status.success());
}

#[test]
fn missing_subcommand_is_invalid() {
    assert_eq!(agtk(&[]).status.code(), Some(2));
}
