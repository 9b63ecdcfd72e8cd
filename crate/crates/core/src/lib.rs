//! K-relations, the annotated relational algebra with k-composition, a
//! normal-form rewriter, MATLANG, and translations between the two
//! languages.

pub mod ara;
pub mod bridge;
pub mod files;
pub mod harness;
pub mod kdata;
pub mod matlang;
pub mod normalform;
pub mod semiring;
pub mod syntax;

pub use ara::{evaluate, AraExpr, DatabaseSchema, Instance};
pub use bridge::{translate_ara_to_ml, translate_ml_to_ara, AttrOrder};
pub use kdata::{Attribute, DomainAssignment, KRelation, RelationSchema};
pub use matlang::{ml_evaluate, MatInstance, Matrix, MatrixSchema, MlExpr, Shape, SizeTerm};
pub use normalform::{normalize, reduce_arity, NormalForm};
pub use semiring::{Semiring, SemiringKind};
