//! Property tests over semiring values, matrices, K-relations, syntax and
//! the encodings.

use aramat_core::ara::{evaluate, Instance};
use aramat_core::bridge::{mat_decode, rel_encode, AttrOrder};
use aramat_core::harness::{oracle_evaluate, GenConfig, Generator};
use aramat_core::kdata::{op_join, op_one, op_projection, op_selection, Attribute, KRelation, RelationSchema};
use aramat_core::matlang::{ml_evaluate, Matrix, Shape, SizeAssignment, SizeTerm};
use aramat_core::normalform::normalize;
use aramat_core::semiring::{Integer, Natural, Provenance, Semiring, Tropical};
use aramat_core::syntax::{parse_ara, parse_ml};
use proptest::prelude::*;

fn tropical() -> impl Strategy<Value = Tropical> {
    prop_oneof![Just(Tropical::zero()), (0u64..50).prop_map(Tropical::Finite)]
}

fn integer() -> impl Strategy<Value = Integer> {
    (-40i64..40).prop_map(Integer::from)
}

fn provenance() -> impl Strategy<Value = Provenance> {
    let term = (prop::sample::select(vec!["x", "y", "z"]), 1u64..3)
        .prop_map(|(t, c)| Provenance::token(t).mul(&Provenance::constant(c)));
    prop::collection::vec(term, 0..3).prop_map(|ts| ts.iter().fold(Provenance::zero(), |a, t| a.add(t)))
}

fn semiring_laws<K: Semiring>(x: &K, y: &K, z: &K) -> Result<(), TestCaseError> {
    prop_assert_eq!(x.add(y), y.add(x));
    prop_assert_eq!(x.add(y).add(z), x.add(&y.add(z)));
    prop_assert_eq!(x.mul(y).mul(z), x.mul(&y.mul(z)));
    prop_assert_eq!(x.mul(&y.add(z)), x.mul(y).add(&x.mul(z)));
    prop_assert_eq!(y.add(z).mul(x), y.mul(x).add(&z.mul(x)));
    prop_assert_eq!(x.mul(&K::one()), x.clone());
    prop_assert!(x.mul(&K::zero()).is_zero());
    if K::COMMUTATIVE {
        prop_assert_eq!(x.mul(y), y.mul(x));
    }
    Ok(())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Integer>> {
    prop::collection::vec(integer(), rows * cols).prop_map(move |v| Matrix::new(rows, cols, v).unwrap())
}

fn matrix_triple() -> impl Strategy<Value = (Matrix<Integer>, Matrix<Integer>, Matrix<Integer>)> {
    (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(a, b, c)| (matrix(a, b), matrix(b, c), matrix(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn integers_form_a_semiring(x in integer(), y in integer(), z in integer()) {
        semiring_laws(&x, &y, &z)?;
    }

    #[test]
    fn naturals_form_a_semiring(x in 0u64..100, y in 0u64..100, z in 0u64..100) {
        semiring_laws(&Natural::from(x), &Natural::from(y), &Natural::from(z))?;
    }

    #[test]
    fn tropical_forms_a_semiring(x in tropical(), y in tropical(), z in tropical()) {
        semiring_laws(&x, &y, &z)?;
    }

    #[test]
    fn provenance_forms_a_semiring(x in provenance(), y in provenance(), z in provenance()) {
        semiring_laws(&x, &y, &z)?;
    }

    #[test]
    fn provenance_values_round_trip(x in provenance()) {
        prop_assert_eq!(Provenance::parse_value(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn matrix_identities((a, b, a2) in matrix_triple()) {
        prop_assert_eq!(a.transpose().transpose(), a.clone());
        prop_assert_eq!(a.matmul(&b).unwrap().transpose(), b.transpose().matmul(&a.transpose()).unwrap());
        prop_assert_eq!(a.hadamard(&a2).unwrap(), a2.hadamard(&a).unwrap());
        prop_assert_eq!(a.add(&a2).unwrap().matmul(&b).unwrap(), a.matmul(&b).unwrap().add(&a2.matmul(&b).unwrap()).unwrap());
        let ones = a.ones();
        prop_assert_eq!((ones.rows(), ones.cols()), (a.rows(), 1));
        // diag(v) · 1 = v for a column v.
        let col = a.matmul(&Matrix::filled(a.cols(), 1, Integer::one())).unwrap();
        let d = col.diag().unwrap();
        prop_assert_eq!(d.matmul(&col.ones()).unwrap(), col);
    }

    #[test]
    fn encoding_round_trips((a, _, _) in matrix_triple()) {
        let shape = Shape::new(SizeTerm::named("m"), SizeTerm::named("n"));
        let sizes = SizeAssignment::from_sizes([("m", a.rows()), ("n", a.cols())]).unwrap();
        let r = rel_encode(&a, &shape, &sizes).unwrap();
        let d = aramat_core::bridge::domain_of_sizes(&sizes);
        prop_assert_eq!(mat_decode(&r, &d, &AttrOrder::RowsBeforeCols).unwrap(), a);
    }

    #[test]
    fn relation_identities(seed in any::<u64>()) {
        let mut gen = Generator::new(GenConfig { max_domain_size: 3, ..GenConfig::with_seed(seed) });
        let s = |n: &str| Attribute::new(n, "s");
        let x = RelationSchema::new([s("A"), s("B"), s("C")]).unwrap();
        let d = gen.gen_domain(["s"]);
        let r: KRelation<Integer> = gen.gen_relation(&x, &d);
        prop_assert_eq!(r.pruned(), r.clone());
        prop_assert_eq!(op_projection(&r, &x).unwrap(), r.clone());
        prop_assert_eq!(op_join(&op_one(&x, &d).unwrap(), &r).unwrap(), r.clone());
        let y = RelationSchema::new([s("A"), s("C")]).unwrap();
        let once = op_selection(&r, &y).unwrap();
        prop_assert_eq!(op_selection(&once, &y).unwrap(), once.clone());
        prop_assert!(once.support().all(|(t, _)| t.values()[0] == t.values()[2]));
    }

    #[test]
    fn ara_syntax_round_trips(seed in any::<u64>(), k in 1usize..4, comp in any::<bool>()) {
        let mut gen = Generator::new(GenConfig { max_depth: 5, ..GenConfig::with_seed(seed) });
        let db = gen.gen_db_schema(k);
        let e = gen.gen_ara_expr(&db, k, comp);
        let printed = e.to_string();
        let back = parse_ara(&printed, &db).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        prop_assert_eq!(back, e);
    }

    #[test]
    fn ml_syntax_round_trips(seed in any::<u64>()) {
        let mut gen = Generator::new(GenConfig { max_depth: 5, ..GenConfig::with_seed(seed) });
        let schema = gen.gen_matrix_schema();
        let e = gen.gen_ml_expr(&schema);
        let printed = e.to_string();
        let back = parse_ml(&printed, &schema).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        prop_assert_eq!(back, e);
    }

    #[test]
    fn generated_ml_is_well_typed(seed in any::<u64>()) {
        let mut gen = Generator::new(GenConfig { max_depth: 5, ..GenConfig::with_seed(seed) });
        let schema = gen.gen_matrix_schema();
        let e = gen.gen_ml_expr(&schema);
        let inst = gen.gen_mat_instance::<Integer>(&schema);
        let m = ml_evaluate(&e, &inst).unwrap();
        prop_assert_eq!(m.rows(), inst.sizes().size(&e.shape().rows).unwrap());
        prop_assert_eq!(m.cols(), inst.sizes().size(&e.shape().cols).unwrap());
    }

    #[test]
    fn kernel_matches_oracle(seed in any::<u64>(), k in 1usize..4) {
        let mut gen = Generator::new(GenConfig { max_depth: 4, ..GenConfig::with_seed(seed) });
        let db = gen.gen_db_schema(k);
        let e = gen.gen_ara_expr(&db, k, true);
        let inst: Instance<Provenance> = gen.gen_instance(&db);
        prop_assert_eq!(evaluate(&e, &inst).unwrap(), oracle_evaluate(&e, &inst).unwrap());
    }

    #[test]
    fn normal_form_preserves_semantics(seed in any::<u64>(), k in 1usize..3) {
        let mut gen = Generator::new(GenConfig { max_depth: 4, ..GenConfig::with_seed(seed) });
        let db = gen.gen_db_schema(k);
        let e = gen.gen_ara_expr(&db, k + 1, false);
        let nf = normalize(&e, &db, k, &Tropical::spec()).unwrap();
        let inst: Instance<Tropical> = gen.gen_instance(&db);
        prop_assert_eq!(evaluate(&nf.denote(), &inst).unwrap(), evaluate(&e, &inst).unwrap());
    }
}
