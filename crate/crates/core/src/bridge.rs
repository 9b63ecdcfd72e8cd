//! Encodings between matrices and binary K-relations, and the translations
//! between MATLANG and (ARA+ζ2)(2).
//!
//! Naming scheme. The size term `α` becomes the attributes `row_α` and
//! `col_α`, both of sort `α`; the shared attribute of a product over `α` is
//! `_mid_α`. In the other direction an attribute maps to the size term named
//! by its sort, so compatible attributes share a dimension.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::ara::{check_fragment, AraError, AraExpr, AraNode, DatabaseSchema, Instance};
use crate::kdata::{Attribute, DomainAssignment, KRelation, KernelError, RelationSchema, Renaming, Tuple};
use crate::matlang::{MatInstance, Matrix, MatrixSchema, MlError, MlExpr, MlNode, Shape, SizeAssignment, SizeTerm};
use crate::normalform::{reduce_arity, NormalizeError};
use crate::semiring::{Semiring, SemiringSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Ara(#[from] AraError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("{0}")]
    Arity(String),
    #[error("domain assignment is not consecutive")]
    NonConsecutive,
    #[error("translation invariant broken: {0}")]
    Invariant(String),
}

pub const ROW_PREFIX: &str = "row_";
pub const COL_PREFIX: &str = "col_";
pub const MID_PREFIX: &str = "_mid_";

pub fn row_attr(term: &str) -> Attribute {
    Attribute::new(format!("{ROW_PREFIX}{term}"), term)
}

pub fn col_attr(term: &str) -> Attribute {
    Attribute::new(format!("{COL_PREFIX}{term}"), term)
}

pub fn mid_attr(term: &str) -> Attribute {
    Attribute::new(format!("{MID_PREFIX}{term}"), term)
}

/// `Ψ(A)`: the size term named by the sort of `A`.
pub fn psi(a: &Attribute) -> Result<SizeTerm, BridgeError> {
    match SizeTerm::named(a.sort()) {
        SizeTerm::One => Err(BridgeError::Invariant(format!("sort of {a} collides with the size term 1"))),
        t => Ok(t),
    }
}

// ---------------------------------------------------------------------------
// Matrices to relations

/// `Γ(s)`.
pub fn gamma_schema(shape: &Shape) -> RelationSchema {
    let mut attrs = Vec::new();
    if let Some(a) = shape.rows.name() {
        attrs.push(row_attr(a));
    }
    if let Some(b) = shape.cols.name() {
        attrs.push(col_attr(b));
    }
    RelationSchema::new(attrs).expect("row and col names never clash")
}

/// `Γ(S)`; the catalog also lists the `_mid_` attributes of every size term.
pub fn gamma_db_schema(schema: &MatrixSchema) -> DatabaseSchema {
    let mut db = DatabaseSchema::new();
    for (n, sh) in schema.vars() {
        db.insert(n, gamma_schema(sh)).expect("mangled names have fixed sorts");
    }
    for t in schema.size_terms() {
        for a in [row_attr(&t), col_attr(&t), mid_attr(&t)] {
            db.declare(a).expect("mangled names have fixed sorts");
        }
    }
    db
}

/// `D(σ)`: sort `α` gets the domain `{1, …, σ(α)}`.
pub fn domain_of_sizes(sizes: &SizeAssignment) -> DomainAssignment {
    let mut d = DomainAssignment::new();
    for (t, n) in sizes.terms() {
        d.insert_consecutive(t, n).expect("sizes are positive");
    }
    d
}

/// `Rel_{s,σ}(M)`. Every entry is stored, zeros included.
pub fn rel_encode<K: Semiring>(m: &Matrix<K>, shape: &Shape, sizes: &SizeAssignment) -> Result<KRelation<K>, BridgeError> {
    if !m.conforms(shape, sizes) {
        return Err(BridgeError::Ml(MlError::Nonconforming {
            name: "matrix".into(),
            rows: m.rows(),
            cols: m.cols(),
            shape: shape.clone(),
        }));
    }
    let schema = gamma_schema(shape);
    let row = shape.rows.name().map(|a| schema.position(&row_attr(a)).expect("in Γ"));
    let col = shape.cols.name().map(|b| schema.position(&col_attr(b)).expect("in Γ"));
    let mut entries = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let mut t = vec![0u32; schema.len()];
            if let Some(p) = row {
                t[p] = i as u32;
            }
            if let Some(p) = col {
                t[p] = j as u32;
            }
            entries.push((Tuple(t), m.get(i, j).clone()));
        }
    }
    Ok(KRelation::from_entries(schema, entries)?)
}

/// `Rel_{S,σ}(I)` over `Γ(S)` and `D(σ)`.
pub fn rel_encode_instance<K: Semiring>(inst: &MatInstance<K>) -> Result<Instance<K>, BridgeError> {
    let db = gamma_db_schema(inst.schema());
    let mut out = Instance::new(db, domain_of_sizes(inst.sizes()))?;
    for (n, m) in inst.matrices() {
        let shape = inst.schema().get(n).expect("instance variable");
        out.set(n, rel_encode(m, shape, inst.sizes())?)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Relations to matrices

/// A strict total order on attributes, used to orient binary relations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum AttrOrder {
    /// By sort, then name.
    #[default]
    Lexicographic,
    /// Listed names first, in list order; the rest lexicographically.
    Explicit(Vec<String>),
    /// `row_*` before `col_*` before everything else, then lexicographic.
    /// Makes decoding invert `Rel` encoding.
    RowsBeforeCols,
}

impl AttrOrder {
    pub fn compare(&self, a: &Attribute, b: &Attribute) -> Ordering {
        match self {
            AttrOrder::Lexicographic => a.cmp(b),
            AttrOrder::Explicit(names) => {
                let rank = |x: &Attribute| names.iter().position(|n| n == x.name()).unwrap_or(usize::MAX);
                rank(a).cmp(&rank(b)).then_with(|| a.cmp(b))
            }
            AttrOrder::RowsBeforeCols => {
                let rank = |x: &Attribute| {
                    if x.name().starts_with(ROW_PREFIX) {
                        0
                    } else if x.name().starts_with(COL_PREFIX) {
                        1
                    } else {
                        2
                    }
                };
                rank(a).cmp(&rank(b)).then_with(|| a.cmp(b))
            }
        }
    }

    pub fn sorted(&self, x: &RelationSchema) -> Vec<Attribute> {
        let mut v = x.attrs().to_vec();
        v.sort_by(|a, b| self.compare(a, b));
        v
    }

    fn less(&self, a: &Attribute, b: &Attribute) -> bool {
        self.compare(a, b) == Ordering::Less
    }
}

/// `Θ(X)` for `|X| ≤ 2`.
pub fn theta_shape(x: &RelationSchema, order: &AttrOrder) -> Result<Shape, BridgeError> {
    let v = order.sorted(x);
    match v.as_slice() {
        [] => Ok(Shape::scalar()),
        [a] => Ok(Shape::new(psi(a)?, SizeTerm::One)),
        [a1, a2] => Ok(Shape::new(psi(a1)?, psi(a2)?)),
        _ => Err(BridgeError::Arity(format!("schema {x} has more than two attributes"))),
    }
}

/// `Θ(S)` for a database schema of arity at most two.
pub fn theta_db_schema(db: &DatabaseSchema, order: &AttrOrder) -> Result<MatrixSchema, BridgeError> {
    let mut s = MatrixSchema::new();
    for (n, x) in db.relations() {
        s.insert(n, theta_shape(x, order)?);
    }
    Ok(s)
}

/// `σ(D)`: each sort's size term gets the sort's domain size.
pub fn sizes_of_domain(d: &DomainAssignment) -> SizeAssignment {
    let mut s = SizeAssignment::new();
    for (sort, dom) in d.sorts() {
        s.insert(sort, dom.len()).expect("domains are nonempty");
    }
    s
}

/// `Mat_D(r)`.
pub fn mat_decode<K: Semiring>(r: &KRelation<K>, d: &DomainAssignment, order: &AttrOrder) -> Result<Matrix<K>, BridgeError> {
    if !d.is_consecutive() {
        return Err(BridgeError::NonConsecutive);
    }
    let shape = theta_shape(r.schema(), order)?;
    let sizes = sizes_of_domain(d);
    let rows = sizes.size(&shape.rows)?;
    let cols = sizes.size(&shape.cols)?;
    let v = order.sorted(r.schema());
    let pos: Vec<usize> = v.iter().map(|a| r.schema().position(a).expect("own attribute")).collect();
    let mut m = Matrix::zeros(rows, cols);
    for (t, k) in r.entries() {
        let (i, j) = match pos.as_slice() {
            [] => (0, 0),
            [p] => (t.0[*p] as usize, 0),
            [p, q] => (t.0[*p] as usize, t.0[*q] as usize),
            _ => unreachable!("arity checked by theta_shape"),
        };
        m.set(i, j, k.clone());
    }
    Ok(m)
}

/// `Mat_D(I)` over `Θ(S)` and `σ(D)`.
pub fn mat_decode_instance<K: Semiring>(inst: &Instance<K>, order: &AttrOrder) -> Result<MatInstance<K>, BridgeError> {
    let schema = theta_db_schema(inst.schema(), order)?;
    let mut out = MatInstance::new(schema, sizes_of_domain(inst.domain()))?;
    for (n, r) in inst.relations() {
        out.set(n, mat_decode(r, inst.domain(), order)?)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Translations

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Use the constant-size `Tp` substitutes instead of duplicating
    /// subexpressions.
    pub linear_size: bool,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions { linear_size: true }
    }
}

/// `Tp_α`: a constant-size expression of shape `α × 1`.
pub fn tp_size_term(schema: &MatrixSchema, alpha: &str) -> Result<MlExpr, BridgeError> {
    for (n, sh) in schema.vars() {
        let m = MlExpr::var_with_shape(n, sh.clone());
        if sh.rows.name() == Some(alpha) {
            return Ok(MlExpr::ones(m));
        }
        if sh.cols.name() == Some(alpha) {
            return Ok(MlExpr::ones(MlExpr::transpose(m)));
        }
    }
    Err(BridgeError::Invariant(format!("no matrix variable has size term {alpha}")))
}

/// `Υ(e)`, an (ARA+ζ2)(2) expression over `Γ(S)`.
pub fn translate_ml_to_ara(e: &MlExpr, schema: &MatrixSchema, opts: TranslateOptions) -> Result<AraExpr, BridgeError> {
    Upsilon { schema, opts }.go(e)
}

struct Upsilon<'a> {
    schema: &'a MatrixSchema,
    opts: TranslateOptions,
}

/// Swaps `row_x` and `col_x` on every attribute of `x`.
fn flip_renaming(x: &RelationSchema) -> Result<Renaming, KernelError> {
    Renaming::from_pairs(x.iter().map(|a| {
        let to = if let Some(t) = a.name().strip_prefix(ROW_PREFIX) {
            col_attr(t)
        } else if let Some(t) = a.name().strip_prefix(COL_PREFIX) {
            row_attr(t)
        } else {
            a.clone()
        };
        (a.clone(), to)
    }))
}

impl Upsilon<'_> {
    fn go(&self, e: &MlExpr) -> Result<AraExpr, BridgeError> {
        let out = match e.node() {
            MlNode::Var(n) => {
                let sh = self
                    .schema
                    .get(n)
                    .ok_or_else(|| MlError::UnknownVariable(n.to_string()))?;
                AraExpr::rel_with_schema(n, gamma_schema(sh))
            }
            MlNode::Transpose(c) => {
                let inner = self.go(c)?;
                if inner.schema().is_empty() {
                    inner
                } else {
                    let phi = flip_renaming(inner.schema())?;
                    AraExpr::rename(phi, inner)?
                }
            }
            MlNode::Ones(c) => {
                let inner = self.go(c)?;
                let keep = match c.shape().rows.name() {
                    Some(a) => RelationSchema::singleton(row_attr(a)),
                    None => RelationSchema::empty(),
                };
                AraExpr::one(AraExpr::project(keep, inner)?)
            }
            MlNode::Diag(c) => {
                let inner = self.go(c)?;
                match c.shape().rows.name() {
                    None => inner,
                    Some(a) => {
                        let (r, cl) = (row_attr(a), col_attr(a));
                        let other = if self.opts.linear_size {
                            let tp = self.go(&tp_size_term(self.schema, a)?)?;
                            AraExpr::rename_some([(r.clone(), cl.clone())], tp)?
                        } else {
                            AraExpr::one(AraExpr::rename_some([(r.clone(), cl.clone())], inner.clone())?)
                        };
                        let pair = RelationSchema::new([r, cl]).expect("distinct names");
                        AraExpr::select(pair, AraExpr::join(inner, other)?)?
                    }
                }
            }
            MlNode::MatMul(a, b) => {
                let (ua, ub) = (self.go(a)?, self.go(b)?);
                match a.shape().cols.name() {
                    None => AraExpr::join(ua, ub)?,
                    Some(g) => {
                        let c = mid_attr(g);
                        let l = AraExpr::rename_some([(col_attr(g), c.clone())], ua)?;
                        let r = AraExpr::rename_some([(row_attr(g), c.clone())], ub)?;
                        AraExpr::compose(c, 2, vec![l, r])?
                    }
                }
            }
            MlNode::Add(a, b) => AraExpr::union(self.go(a)?, self.go(b)?)?,
            MlNode::Hadamard(a, b) => AraExpr::join(self.go(a)?, self.go(b)?)?,
        };
        if out.schema() != &gamma_schema(e.shape()) {
            return Err(BridgeError::Invariant(format!(
                "Υ produced schema {} for shape {}",
                out.schema(),
                e.shape()
            )));
        }
        Ok(out)
    }
}

/// `Tp_X`: a constant-size expression with schema `X`, built from the first
/// relation names offering compatible attributes.
pub fn tp_schema(db: &DatabaseSchema, x: &RelationSchema) -> Result<AraExpr, BridgeError> {
    if x.is_empty() {
        let name = db
            .names()
            .next()
            .ok_or_else(|| BridgeError::Invariant("empty database schema".into()))?;
        let r = AraExpr::rel(db, name)?;
        return Ok(AraExpr::project(RelationSchema::empty(), r)?);
    }
    let mut pieces = Vec::with_capacity(x.len());
    for a in x {
        let (name, src) = db
            .relations()
            .find_map(|(n, s)| s.iter().find(|b| b.is_compatible(a)).map(|b| (n, b.clone())))
            .ok_or_else(|| BridgeError::Invariant(format!("no relation offers an attribute compatible with {a}")))?;
        let mut p = AraExpr::rel(db, name)?;
        if p.schema().len() > 1 {
            p = AraExpr::project(RelationSchema::singleton(src.clone()), p)?;
        }
        if &src != a {
            p = AraExpr::rename_some([(src, a.clone())], p)?;
        }
        pieces.push(p);
    }
    Ok(AraExpr::join_all(pieces)?)
}

/// `Φ(e)`, a MATLANG expression over `Θ(S)`.
pub fn translate_ara_to_ml(
    e: &AraExpr,
    db: &DatabaseSchema,
    order: &AttrOrder,
    opts: TranslateOptions,
) -> Result<MlExpr, BridgeError> {
    if db.arity() > 2 {
        return Err(BridgeError::Arity(format!("database arity {} exceeds 2", db.arity())));
    }
    let report = check_fragment(e, db, 2, true);
    if !report.is_ok() {
        return Err(BridgeError::Arity(format!("not an (ARA+ζ2)(2) expression: {report}")));
    }
    crate::ara::infer_schema(e, db)?;
    Phi { db, order, opts }.go(e)
}

struct Phi<'a> {
    db: &'a DatabaseSchema,
    order: &'a AttrOrder,
    opts: TranslateOptions,
}

/// Transpose, cancelling a transpose already at the root.
fn t(e: MlExpr) -> MlExpr {
    match e.node() {
        MlNode::Transpose(inner) => inner.clone(),
        _ => MlExpr::transpose(e),
    }
}

fn t_if(cond: bool, e: MlExpr) -> MlExpr {
    if cond {
        t(e)
    } else {
        e
    }
}

fn mul(a: MlExpr, b: MlExpr) -> Result<MlExpr, BridgeError> {
    Ok(MlExpr::matmul(a, b)?)
}

impl Phi<'_> {
    /// Stand-in for `Φ(x)` inside one-vectors.
    fn shape_source(&self, x: &AraExpr, phi_x: &MlExpr) -> Result<MlExpr, BridgeError> {
        if !self.opts.linear_size || matches!(x.node(), AraNode::Rel(_)) {
            return Ok(phi_x.clone());
        }
        self.go(&tp_schema(self.db, x.schema())?)
    }

    /// `1(Φ(x))`.
    fn ones(&self, x: &AraExpr, phi_x: &MlExpr) -> Result<MlExpr, BridgeError> {
        Ok(MlExpr::ones(self.shape_source(x, phi_x)?))
    }

    /// `1(Φ(x)ᵀ)`.
    fn ones_t(&self, x: &AraExpr, phi_x: &MlExpr) -> Result<MlExpr, BridgeError> {
        Ok(MlExpr::ones(t(self.shape_source(x, phi_x)?)))
    }

    fn project_away(&self, a: &Attribute, x: &AraExpr, phi_x: MlExpr) -> Result<MlExpr, BridgeError> {
        let v = self.order.sorted(x.schema());
        if v.len() == 2 && &v[1] == a {
            let o = self.ones_t(x, &phi_x)?;
            mul(phi_x, o)
        } else {
            let o = self.ones(x, &phi_x)?;
            let sum = mul(t(o), phi_x)?;
            Ok(t_if(v.len() == 2, sum))
        }
    }

    /// `s(x, y) = 1(Φ(y)) · Φ(x) · 1(Φ(y)ᵀ)ᵀ` for a scalar `x`.
    fn spread(&self, phi_x: MlExpr, y: &AraExpr, phi_y: &MlExpr) -> Result<MlExpr, BridgeError> {
        let left = mul(self.ones(y, phi_y)?, phi_x)?;
        mul(left, t(self.ones_t(y, phi_y)?))
    }

    fn go(&self, e: &AraExpr) -> Result<MlExpr, BridgeError> {
        let out = match e.node() {
            AraNode::Rel(n) => MlExpr::var_with_shape(n, theta_shape(e.schema(), self.order)?),
            AraNode::Union(a, b) => MlExpr::add(self.go(a)?, self.go(b)?)?,
            AraNode::Project(y, c) => {
                let mut x = c.clone();
                let mut m = self.go(c)?;
                for a in c.schema().difference(y).iter() {
                    m = self.project_away(a, &x, m)?;
                    x = AraExpr::project_away(a, x)?;
                }
                m
            }
            AraNode::Select(y, c) => {
                let m = self.go(c)?;
                if y.len() <= 1 {
                    m
                } else {
                    let d = MlExpr::diag(self.ones(c, &m)?)?;
                    MlExpr::hadamard(m, d)?
                }
            }
            AraNode::Rename(phi, c) => {
                let m = self.go(c)?;
                let v = self.order.sorted(c.schema());
                match v.as_slice() {
                    [a1, a2] => {
                        let (b1, b2) = (phi.apply(a1).expect("total"), phi.apply(a2).expect("total"));
                        t_if(self.order.less(b2, b1), m)
                    }
                    _ => m,
                }
            }
            AraNode::One(c) => {
                let m = self.go(c)?;
                if c.schema().len() == 2 {
                    mul(self.ones(c, &m)?, t(self.ones_t(c, &m)?))?
                } else {
                    self.ones(c, &m)?
                }
            }
            AraNode::Join(a, b) => self.join(a, b)?,
            AraNode::Compose { attr, args, .. } => match args.as_slice() {
                [x] => self.project_away(attr, x, self.go(x)?)?,
                [x1, x2] => self.compose2(attr, x1, x2)?,
                _ => return Err(BridgeError::Arity(format!("composition with {} arguments", args.len()))),
            },
        };
        let expected = theta_shape(e.schema(), self.order)?;
        if out.shape() != &expected {
            return Err(BridgeError::Invariant(format!(
                "Φ produced shape {} for schema {}",
                out.shape(),
                e.schema()
            )));
        }
        Ok(out)
    }

    fn join(&self, a: &AraExpr, b: &AraExpr) -> Result<MlExpr, BridgeError> {
        let (s1, s2) = (a.schema(), b.schema());
        let (m1, m2) = (self.go(a)?, self.go(b)?);
        if s1 == s2 {
            return Ok(MlExpr::hadamard(m1, m2)?);
        }
        if s1.is_empty() {
            let s = self.spread(m1, b, &m2)?;
            return Ok(MlExpr::hadamard(s, m2)?);
        }
        if s2.is_empty() {
            let s = self.spread(m2, a, &m1)?;
            return Ok(MlExpr::hadamard(m1, s)?);
        }
        let all = s1.union(s2)?;
        let v = self.order.sorted(&all);
        let [a1, a2] = v.as_slice() else {
            return Err(BridgeError::Arity(format!("join over {all}")));
        };
        let only = |s: &RelationSchema, x: &Attribute| s.len() == 1 && s.contains(x);
        let both = |s: &RelationSchema| s.len() == 2;
        Ok(if only(s1, a1) && only(s2, a2) {
            mul(m1, t(m2))?
        } else if only(s1, a2) && only(s2, a1) {
            t(mul(m1, t(m2))?)
        } else if only(s1, a1) && both(s2) {
            mul(MlExpr::diag(m1)?, m2)?
        } else if both(s1) && only(s2, a1) {
            t(mul(t(m1), MlExpr::diag(m2)?)?)
        } else if both(s1) && only(s2, a2) {
            mul(m1, MlExpr::diag(m2)?)?
        } else if only(s1, a2) && both(s2) {
            t(mul(MlExpr::diag(m1)?, t(m2))?)
        } else {
            return Err(BridgeError::Invariant(format!("unhandled join of {s1} and {s2}")));
        })
    }

    fn compose2(&self, a3: &Attribute, x1: &AraExpr, x2: &AraExpr) -> Result<MlExpr, BridgeError> {
        let (s1, s2) = (x1.schema(), x2.schema());
        let sym = s1.difference(s2).len() + s2.difference(s1).len();
        if sym <= 1 {
            let lowered = AraExpr::project_away(a3, AraExpr::join(x1.clone(), x2.clone())?)?;
            return self.go(&lowered);
        }
        let other = |s: &RelationSchema| s.without(a3).attrs().first().cloned();
        let (Some(a1), Some(a2)) = (other(s1), other(s2)) else {
            return Err(BridgeError::Invariant(format!("composition of {s1} and {s2}")));
        };
        let lt = |x: &Attribute, y: &Attribute| self.order.less(x, y);
        let left = t_if(!lt(&a1, a3), self.go(x1)?);
        let right = t_if(!lt(a3, &a2), self.go(x2)?);
        Ok(t_if(!lt(&a1, &a2), mul(left, right)?))
    }
}

/// ARA(3) to MATLANG: arity reduction to (ARA+ζ2)(2), then `Φ`.
pub fn compile_ara3_to_ml(
    e: &AraExpr,
    db: &DatabaseSchema,
    order: &AttrOrder,
    spec: &SemiringSpec,
    opts: TranslateOptions,
) -> Result<MlExpr, BridgeError> {
    if db.arity() > 2 {
        return Err(BridgeError::Arity(format!("database arity {} exceeds 2", db.arity())));
    }
    let reduced = reduce_arity(e, db, 2, spec)?;
    translate_ara_to_ml(&reduced, db, order, opts)
}

/// Maps each attribute in `x` to its `AttrOrder` rank, for diagnostics.
pub fn orientation(x: &RelationSchema, order: &AttrOrder) -> BTreeMap<String, usize> {
    order
        .sorted(x)
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name().to_string(), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ara::evaluate;
    use crate::matlang::ml_evaluate;
    use crate::semiring::{Boolean, Integer};

    fn st(n: &str) -> SizeTerm {
        SizeTerm::named(n)
    }

    #[test]
    fn gamma_cases() {
        assert_eq!(
            gamma_schema(&Shape::new(st("a"), st("b"))),
            RelationSchema::new([row_attr("a"), col_attr("b")]).unwrap()
        );
        assert_eq!(gamma_schema(&Shape::scalar()), RelationSchema::empty());
        assert_eq!(
            gamma_schema(&Shape::new(st("dptm"), SizeTerm::One)),
            RelationSchema::singleton(row_attr("dptm"))
        );
        assert_eq!(
            gamma_schema(&Shape::new(SizeTerm::One, st("b"))),
            RelationSchema::singleton(col_attr("b"))
        );
    }

    #[test]
    fn scalar_and_identity_encoding() {
        let sizes = SizeAssignment::from_sizes([("n", 2)]).unwrap();
        let c = Matrix::from_rows(vec![vec![Integer::from(9)]]).unwrap();
        let r = rel_encode(&c, &Shape::scalar(), &sizes).unwrap();
        assert_eq!(r, KRelation::scalar(Integer::from(9)));
        let b = |v| Boolean(v);
        let id = Matrix::from_rows(vec![vec![b(true), b(false)], vec![b(false), b(true)]]).unwrap();
        let r = rel_encode(&id, &Shape::new(st("n"), st("n")), &sizes).unwrap();
        let support: Vec<_> = r.support().map(|(t, _)| t.clone()).collect();
        assert_eq!(support, vec![Tuple(vec![0, 0]), Tuple(vec![1, 1])]);
    }

    #[test]
    fn theta_cases() {
        let s = Attribute::new("student", "student");
        let d = Attribute::new("dptm", "dptm");
        let both = RelationSchema::new([s.clone(), d.clone()]).unwrap();
        let ex = AttrOrder::Explicit(vec!["student".into(), "dptm".into()]);
        assert_eq!(theta_shape(&both, &ex).unwrap(), Shape::new(st("student"), st("dptm")));
        assert_eq!(
            theta_shape(&both, &AttrOrder::Lexicographic).unwrap(),
            Shape::new(st("dptm"), st("student"))
        );
        assert_eq!(
            theta_shape(&RelationSchema::singleton(s), &ex).unwrap(),
            Shape::new(st("student"), SizeTerm::One)
        );
        assert_eq!(theta_shape(&RelationSchema::empty(), &ex).unwrap(), Shape::scalar());
    }

    #[test]
    fn tp_shapes() {
        let schema = MatrixSchema::from_vars([("M", Shape::new(st("a"), st("b")))]);
        assert_eq!(tp_size_term(&schema, "a").unwrap().shape(), &Shape::new(st("a"), SizeTerm::One));
        assert_eq!(tp_size_term(&schema, "b").unwrap().shape(), &Shape::new(st("b"), SizeTerm::One));
        assert!(tp_size_term(&schema, "c").is_err());

        let x = Attribute::new("X", "s");
        let y = Attribute::new("Y", "s");
        let db = DatabaseSchema::from_relations([("R", RelationSchema::new([x.clone(), y]).unwrap())]).unwrap();
        let z = Attribute::new("Z", "s");
        let target = RelationSchema::new([x, z]).unwrap();
        assert_eq!(tp_schema(&db, &target).unwrap().schema(), &target);
        assert!(tp_schema(&db, &RelationSchema::empty()).unwrap().schema().is_empty());
    }

    #[test]
    fn matmul_round_trip_through_ara() {
        let schema = MatrixSchema::from_vars([
            ("A", Shape::new(st("m"), st("n"))),
            ("B", Shape::new(st("n"), st("m"))),
        ]);
        let sizes = SizeAssignment::from_sizes([("m", 2), ("n", 3)]).unwrap();
        let mut inst = MatInstance::new(schema.clone(), sizes.clone()).unwrap();
        let ints = |rows: Vec<Vec<i64>>| {
            Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(Integer::from).collect()).collect()).unwrap()
        };
        inst.set("A", ints(vec![vec![1, 2, 3], vec![4, 5, 6]])).unwrap();
        inst.set("B", ints(vec![vec![1, 0], vec![2, 1], vec![0, 3]])).unwrap();
        let e = MlExpr::matmul(MlExpr::var(&schema, "A").unwrap(), MlExpr::var(&schema, "B").unwrap()).unwrap();
        let u = translate_ml_to_ara(&e, &schema, TranslateOptions::default()).unwrap();
        let rel = rel_encode_instance(&inst).unwrap();
        let lhs = rel_encode(&ml_evaluate(&e, &inst).unwrap(), e.shape(), &sizes).unwrap();
        assert_eq!(evaluate(&u, &rel).unwrap(), lhs);

        let order = AttrOrder::RowsBeforeCols;
        let back = mat_decode_instance(&rel, &order).unwrap();
        assert_eq!(back.get("A"), inst.get("A"));
        let db = gamma_db_schema(&schema);
        let p = translate_ara_to_ml(&u, &db, &order, TranslateOptions::default()).unwrap();
        assert_eq!(ml_evaluate(&p, &back).unwrap(), ml_evaluate(&e, &inst).unwrap());
    }
}
