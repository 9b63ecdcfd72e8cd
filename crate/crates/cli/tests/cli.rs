use std::path::PathBuf;
use std::process::{Command, Output};

use aramat_core::ara::evaluate;
use aramat_core::files::{instance_to_toml, schema_to_toml};
use aramat_core::harness::{GenConfig, Generator};
use aramat_core::matlang::MatrixSchema;
use aramat_core::semiring::Natural;
use aramat_core::AttrOrder;

const WORKED: &str = "proj{B,C}(sel{B,C}(R join R join S join T join ren{A->B}(T)) + sel{A,B}(R join S join T))";

fn workspace(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../workspaces").join(name)
}

fn aramat(dir: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aramat"))
        .arg("--dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fee_query_table() {
    let o = aramat(&workspace("university"), &["eval-ara", "proj{student}(no_courses join course_fee)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "student  value\nAlice    2000\nBob      1840\n");
}

#[test]
fn fee_query_grid() {
    let o = aramat(&workspace("university"), &["eval-ml", "no_courses * course_fee"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "2000\n1840\n");
}

#[test]
fn rank_one_ones_product() {
    let o = aramat(&workspace("university"), &["eval-ml", "ones(no_courses) * t(ones(no_courses))"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "1  1\n1  1\n");
}

#[test]
fn zero_annotations_are_suppressed() {
    let o = aramat(&workspace("university"), &["eval-ara", "no_courses"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1 + 5, "{out}");
    assert!(!out.contains("Bio      0"));
}

#[test]
fn trailing_comma_reports_position() {
    let o = aramat(&workspace("triangle"), &["eval-ara", "sel{A,}(R)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1, column 6"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    let o = aramat(&workspace("triangle"), &["normalize", "R"]);
    assert_eq!(o.status.code(), Some(2));
    let o = aramat(&workspace("triangle"), &["--semiring", "reals", "eval-ara", "R"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn normalize_refuses_matrices() {
    let o = aramat(&workspace("triangle"), &["--semiring", "mat2", "normalize", "--k", "2", WORKED]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("commutative"), "{}", stderr(&o));
}

#[test]
fn other_commands_run_over_matrices() {
    let dir = workspace("triangle");
    let o = aramat(&dir, &["--semiring", "mat2", "to-ml", "R join S join T", "--certify", "3"]);
    assert_ne!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = aramat(&dir, &["--semiring", "mat2", "check-equiv", "R join R", "R join R", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn normal_form_is_equivalent() {
    let dir = workspace("triangle");
    let o = aramat(&dir, &["normalize", "--k", "2", WORKED]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let nf = stdout(&o);
    assert_eq!(
        nf.trim(),
        "sel{B,C}(S join ren{A->B}(T) join comp{A,2}(R join R, T)) + proj{B}(sel{A,B}(R)) join S join ren{A->B}(T)"
    );
    for semiring in ["nat", "provenance"] {
        let o = aramat(
            &dir,
            &["--semiring", semiring, "--tokens", "p,q", "check-equiv", WORKED, nf.trim(), "--samples", "30"],
        );
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn check_equiv_reports_counterexample() {
    let o = aramat(&workspace("triangle"), &["--semiring", "nat", "check-equiv", "R + R", "R", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAILED") && out.contains("[[relations.R]]"), "{out}");
}

#[test]
fn compile_worked_example() {
    let o = aramat(&workspace("triangle"), &["compile", WORKED, "--certify", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("certified on 20 random instances"));
}

#[test]
fn translations_certify() {
    let dir = workspace("university");
    let o = aramat(&dir, &["to-ara", "t(no_courses) * diag(ones(no_courses))", "--certify", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let o = aramat(&dir, &["to-ml", "proj{student}(no_courses join course_fee)", "--certify", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let first = stdout(&o).lines().next().unwrap().to_string();
    let o = aramat(&dir, &["eval-ml", &first]);
    assert_eq!(stdout(&o), "2000\n1840\n");
}

#[test]
fn fuzz_campaign_passes() {
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_aramat"))
        .args(["fuzz", "--seed", "9", "--count", "200", "--k", "2", "--depth", "3", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("200 cases, 0 failures"));
}

#[test]
fn artifacts_replay_with_eval_ara() {
    // An artifact directory as fuzz writes it: schema, instance, expression.
    let mut gen = Generator::new(GenConfig::with_seed(4));
    let db = gen.gen_db_schema(2);
    let e = gen.gen_ara_expr(&db, 2, true);
    let inst = gen.gen_instance::<Natural>(&db);
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("schema.toml"), schema_to_toml(&db, &MatrixSchema::new(), &AttrOrder::Lexicographic)).unwrap();
    std::fs::write(dir.path().join("instance.toml"), instance_to_toml(&inst)).unwrap();
    let expr_file = dir.path().join("expr.ara");
    std::fs::write(&expr_file, format!("{e}\n")).unwrap();

    let arg = format!("@{}", expr_file.display());
    let o = aramat(&dir.path().to_path_buf(), &["eval-ara", &arg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let expected = evaluate(&e, &inst).unwrap();
    assert_eq!(stdout(&o).lines().count(), 1 + expected.support_len(), "{}", stdout(&o));
}
