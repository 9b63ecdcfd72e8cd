//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use aramat_core::ara::{DatabaseSchema, Instance};
use aramat_core::kdata::{Atom, Attribute, DomainAssignment, KRelation, RelationSchema, Tuple};
use aramat_core::matlang::{MatInstance, Matrix, MatrixSchema, Shape, SizeAssignment, SizeTerm};
use aramat_core::semiring::Integer;

pub const NO_COURSES: [[i64; 3]; 2] = [[5, 2, 0], [2, 1, 3]];
pub const COURSE_FEE: [i64; 3] = [300, 250, 330];
pub const STUDENTS: [&str; 2] = ["Alice", "Bob"];
pub const DPTMS: [&str; 3] = ["CS", "Math", "Bio"];

pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

pub fn student() -> Attribute {
    Attribute::new("student", "student")
}

pub fn dptm() -> Attribute {
    Attribute::new("dptm", "dptm")
}

pub fn university_db() -> DatabaseSchema {
    DatabaseSchema::from_relations([
        ("no_courses", RelationSchema::new([student(), dptm()]).unwrap()),
        ("course_fee", RelationSchema::singleton(dptm())),
    ])
    .unwrap()
}

/// The relational university instance; with `consecutive` the atoms are
/// replaced by 1..n in listed order.
pub fn university_instance(consecutive: bool) -> Instance<Integer> {
    let mut d = DomainAssignment::new();
    if consecutive {
        d.insert_consecutive("student", 2).unwrap();
        d.insert_consecutive("dptm", 3).unwrap();
    } else {
        d.insert("student", STUDENTS.iter().map(|s| Atom::str(s)).collect()).unwrap();
        d.insert("dptm", DPTMS.iter().map(|s| Atom::str(s)).collect()).unwrap();
    }
    let db = university_db();
    let nc_schema = db.get("no_courses").unwrap().clone();
    let sp = nc_schema.position(&student()).unwrap();
    let mut nc = KRelation::empty(nc_schema);
    for (i, row) in NO_COURSES.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let mut t = vec![0u32; 2];
            t[sp] = i as u32;
            t[1 - sp] = j as u32;
            nc.set(Tuple(t), int(*v));
        }
    }
    let mut cf = KRelation::empty(RelationSchema::singleton(dptm()));
    for (j, v) in COURSE_FEE.iter().enumerate() {
        cf.set(Tuple(vec![j as u32]), int(*v));
    }
    let mut inst = Instance::new(db, d).unwrap();
    inst.set("no_courses", nc).unwrap();
    inst.set("course_fee", cf).unwrap();
    inst
}

pub fn university_matrix_schema() -> MatrixSchema {
    MatrixSchema::from_vars([
        ("no_courses", Shape::new(SizeTerm::named("student"), SizeTerm::named("dptm"))),
        ("course_fee", Shape::new(SizeTerm::named("dptm"), SizeTerm::One)),
    ])
}

pub fn university_matrices() -> MatInstance<Integer> {
    let sizes = SizeAssignment::from_sizes([("student", 2), ("dptm", 3)]).unwrap();
    let mut inst = MatInstance::new(university_matrix_schema(), sizes).unwrap();
    let nc = Matrix::from_rows(NO_COURSES.iter().map(|r| r.iter().map(|v| int(*v)).collect()).collect()).unwrap();
    let cf = Matrix::from_rows(COURSE_FEE.iter().map(|v| vec![int(*v)]).collect()).unwrap();
    inst.set("no_courses", nc).unwrap();
    inst.set("course_fee", cf).unwrap();
    inst
}

/// Total fee per student, by direct summation over the raw arrays.
pub fn fee_per_student() -> [i64; 2] {
    let mut out = [0; 2];
    for (i, row) in NO_COURSES.iter().enumerate() {
        out[i] = row.iter().zip(COURSE_FEE.iter()).map(|(n, f)| n * f).sum();
    }
    out
}

/// `S(R) = {A,B}`, `S(S) = {B,C}`, `S(T) = {A,C}`, one sort.
pub fn triangle_db() -> DatabaseSchema {
    let a = |n: &str| Attribute::new(n, "s");
    DatabaseSchema::from_relations([
        ("R", RelationSchema::new([a("A"), a("B")]).unwrap()),
        ("S", RelationSchema::new([a("B"), a("C")]).unwrap()),
        ("T", RelationSchema::new([a("A"), a("C")]).unwrap()),
    ])
    .unwrap()
}

pub const WORKED_EXAMPLE: &str =
    "proj{B,C}(sel{B,C}(R join R join S join T join ren{A->B}(T)) + sel{A,B}(R join S join T))";
