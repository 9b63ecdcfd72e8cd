//! Loading the bundled workspaces and writing generated ones back.

mod common;

use std::path::PathBuf;

use aramat_core::ara::evaluate;
use aramat_core::files::{instance_to_toml, load_workspace, mat_instance_to_toml, schema_to_toml, Workspace};
use aramat_core::harness::{GenConfig, Generator};
use aramat_core::semiring::{Integer, Natural, Provenance, SemiringKind, Tropical};
use aramat_core::AttrOrder;

use common::*;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../workspaces").join(name)
}

#[test]
fn university_workspace_matches_the_fixtures() {
    let ws = load_workspace(bundled("university")).unwrap();
    assert_eq!(ws.semiring, Some(SemiringKind::Int));
    assert_eq!(ws.order, AttrOrder::Explicit(vec!["student".into(), "dptm".into()]));
    assert_eq!(ws.db, university_db());
    assert_eq!(ws.matrices, university_matrix_schema());
    assert_eq!(ws.instance::<Integer>().unwrap(), university_instance(false));
    assert_eq!(ws.mat_instance::<Integer>().unwrap(), university_matrices());
}

#[test]
fn triangle_workspace_evaluates() {
    let ws = load_workspace(bundled("triangle")).unwrap();
    let inst = ws.instance::<Natural>().unwrap();
    let e = ws.parse_ara(WORKED_EXAMPLE).unwrap();
    let out = evaluate(&e, &inst).unwrap();
    assert_eq!(out.schema().len(), 2);
    assert!(!ws.has_matrix_instance());
}

fn round_trip<K: aramat_core::harness::GenValue>(seed: u64) {
    let mut gen = Generator::new(GenConfig::with_seed(seed));
    let db = gen.gen_db_schema(3);
    let inst = gen.gen_instance::<K>(&db);
    let schema = gen.gen_matrix_schema();
    let mats = gen.gen_mat_instance::<K>(&schema);
    let order = AttrOrder::Explicit(vec!["B".into(), "A".into()]);

    let rel = Workspace::from_strings(&schema_to_toml(&db, &schema, &order), Some(&instance_to_toml(&inst))).unwrap();
    assert_eq!(rel.db, db);
    assert_eq!(rel.order, order);
    assert_eq!(rel.instance::<K>().unwrap(), inst);

    let mat = Workspace::from_strings(&schema_to_toml(&db, &schema, &order), Some(&mat_instance_to_toml(&mats))).unwrap();
    assert_eq!(mat.matrices, schema);
    assert_eq!(mat.mat_instance::<K>().unwrap(), mats);
}

#[test]
fn generated_workspaces_round_trip() {
    for seed in 0..25 {
        round_trip::<Integer>(seed);
        round_trip::<Tropical>(seed);
        round_trip::<Provenance>(seed);
    }
}

#[test]
fn broken_workspaces_are_reported() {
    let schema = "[relations]\nR = { A = \"s\" }\n";
    let missing_sort = "[relations]\nR = [{ A = 1 }]\n";
    let err = Workspace::from_strings(schema, Some(missing_sort)).unwrap_err();
    assert!(err.to_string().contains('s'), "{err}");

    let outside = "[sorts]\ns = [1, 2]\n[relations]\nR = [{ A = 3 }]\n";
    let ws = Workspace::from_strings(schema, Some(outside)).unwrap();
    let err = ws.instance::<Natural>().unwrap_err();
    assert!(err.to_string().contains("not in the domain"), "{err}");

    let bad_value = "[sorts]\ns = [1]\n[relations]\nR = [{ A = 1, value = \"x\" }]\n";
    let ws = Workspace::from_strings(schema, Some(bad_value)).unwrap();
    assert!(ws.instance::<Natural>().is_err());
    assert!(ws.instance::<Provenance>().is_ok());

    let err = Workspace::from_strings("[relations]\nR = { A = \"s\" }\nS = { A = \"t\" }\n", None).unwrap_err();
    assert!(err.to_string().contains('A'), "{err}");
}
