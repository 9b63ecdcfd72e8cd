use std::hint::black_box;

use aramat_core::ara::{AraExpr, DatabaseSchema};
use aramat_core::bridge::{compile_ara3_to_ml, translate_ara_to_ml, translate_ml_to_ara, AttrOrder, TranslateOptions};
use aramat_core::kdata::{Attribute, RelationSchema};
use aramat_core::matlang::{MatrixSchema, MlExpr, Shape, SizeTerm};
use aramat_core::normalform::normalize;
use aramat_core::semiring::{Integer, Semiring};
use aramat_core::syntax::parse_ara;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const WORKED: &str = "proj{B,C}(sel{B,C}(R join R join S join T join ren{A->B}(T)) + sel{A,B}(R join S join T))";

fn triangle() -> DatabaseSchema {
    let a = |n: &str| Attribute::new(n, "s");
    DatabaseSchema::from_relations([
        ("R", RelationSchema::new([a("A"), a("B")]).unwrap()),
        ("S", RelationSchema::new([a("B"), a("C")]).unwrap()),
        ("T", RelationSchema::new([a("A"), a("C")]).unwrap()),
    ])
    .unwrap()
}

/// `e_{n+1} = diag(e_n) * M`.
fn diag_chain(n: usize) -> (MatrixSchema, MlExpr) {
    let schema = MatrixSchema::from_vars([("M", Shape::new(SizeTerm::named("a"), SizeTerm::One))]);
    let m = MlExpr::var(&schema, "M").unwrap();
    let e = (0..n).fold(m.clone(), |e, _| MlExpr::matmul(MlExpr::diag(e).unwrap(), m.clone()).unwrap());
    (schema, e)
}

fn bench_upsilon(c: &mut Criterion) {
    let mut group = c.benchmark_group("upsilon_diag_chain");
    for n in [4, 8, 16] {
        let (schema, e) = diag_chain(n);
        group.bench_with_input(BenchmarkId::new("linear", n), &n, |b, _| {
            b.iter(|| translate_ml_to_ara(black_box(&e), &schema, TranslateOptions::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("naive", n), &n, |b, _| {
            b.iter(|| translate_ml_to_ara(black_box(&e), &schema, TranslateOptions { linear_size: false }).unwrap())
        });
    }
    group.finish();
}

fn bench_phi(c: &mut Criterion) {
    let db = triangle();
    let r = AraExpr::rel(&db, "R").unwrap();
    let ab = r.schema().clone();
    let mut group = c.benchmark_group("phi_selection_chain");
    for n in [4, 8, 16] {
        let e = (0..n).fold(r.clone(), |e, _| AraExpr::select(ab.clone(), e).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| translate_ara_to_ml(black_box(&e), &db, &AttrOrder::Lexicographic, TranslateOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let db = triangle();
    let e = parse_ara(WORKED, &db).unwrap();
    c.bench_function("normalize_worked_example", |b| b.iter(|| normalize(black_box(&e), &db, 2, &Integer::spec()).unwrap()));
    c.bench_function("compile_worked_example", |b| {
        b.iter(|| {
            compile_ara3_to_ml(black_box(&e), &db, &AttrOrder::Lexicographic, &Integer::spec(), TranslateOptions::default()).unwrap()
        })
    });
}

criterion_group!(benches, bench_upsilon, bench_phi, bench_pipeline);
criterion_main!(benches);
