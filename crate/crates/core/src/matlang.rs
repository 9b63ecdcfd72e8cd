//! MATLANG with pointwise functions fixed to `+` and `*`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semiring::Semiring;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MlError {
    #[error("unknown matrix variable {0:?}")]
    UnknownVariable(String),
    #[error("diag needs a column vector, got {0}")]
    DiagShape(Shape),
    #[error("cannot multiply {0} by {1}")]
    MulShape(Shape, Shape),
    #[error("shapes differ: {0} vs {1}")]
    ShapeMismatch(Shape, Shape),
    #[error("size term {0} has no size")]
    UnsizedTerm(SizeTerm),
    #[error("invalid size for {0}: {1}")]
    BadSize(String, usize),
    #[error("matrix {name:?} is {rows}x{cols} but must conform to {shape}")]
    Nonconforming {
        name: String,
        rows: usize,
        cols: usize,
        shape: Shape,
    },
    #[error("{0}")]
    Invalid(String),
}

/// A symbolic dimension; `One` always has size 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SizeTerm {
    One,
    Named(Arc<str>),
}

impl SizeTerm {
    pub fn named(s: &str) -> SizeTerm {
        if s == "1" {
            SizeTerm::One
        } else {
            SizeTerm::Named(Arc::from(s))
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, SizeTerm::One)
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            SizeTerm::One => None,
            SizeTerm::Named(n) => Some(n),
        }
    }
}

impl fmt::Display for SizeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeTerm::One => f.write_str("1"),
            SizeTerm::Named(n) => f.write_str(n),
        }
    }
}

/// `rows × cols`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub rows: SizeTerm,
    pub cols: SizeTerm,
}

impl Shape {
    pub fn new(rows: SizeTerm, cols: SizeTerm) -> Self {
        Shape { rows, cols }
    }

    pub fn scalar() -> Self {
        Shape::new(SizeTerm::One, SizeTerm::One)
    }

    pub fn transposed(&self) -> Shape {
        Shape::new(self.cols.clone(), self.rows.clone())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Matrix variables with their shapes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatrixSchema {
    vars: BTreeMap<Arc<str>, Shape>,
}

impl MatrixSchema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vars<'a>(vars: impl IntoIterator<Item = (&'a str, Shape)>) -> Self {
        let mut s = MatrixSchema::new();
        for (n, sh) in vars {
            s.insert(n, sh);
        }
        s
    }

    pub fn insert(&mut self, name: &str, shape: Shape) {
        self.vars.insert(Arc::from(name), shape);
    }

    pub fn get(&self, name: &str) -> Option<&Shape> {
        self.vars.get(name)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&str, &Shape)> {
        self.vars.iter().map(|(n, s)| (&**n, s))
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Named size terms used by some variable, in order.
    pub fn size_terms(&self) -> Vec<Arc<str>> {
        let mut v: Vec<Arc<str>> = self
            .vars
            .values()
            .flat_map(|s| [&s.rows, &s.cols])
            .filter_map(|t| t.name().map(Arc::from))
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Positive sizes for named size terms; `1` is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SizeAssignment {
    sizes: BTreeMap<Arc<str>, usize>,
}

impl SizeAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sizes<'a>(sizes: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self, MlError> {
        let mut s = SizeAssignment::new();
        for (n, v) in sizes {
            s.insert(n, v)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, term: &str, size: usize) -> Result<(), MlError> {
        if size == 0 || (term == "1" && size != 1) {
            return Err(MlError::BadSize(term.to_string(), size));
        }
        if term != "1" {
            self.sizes.insert(Arc::from(term), size);
        }
        Ok(())
    }

    pub fn get(&self, t: &SizeTerm) -> Option<usize> {
        match t {
            SizeTerm::One => Some(1),
            SizeTerm::Named(n) => self.sizes.get(n).copied(),
        }
    }

    pub fn size(&self, t: &SizeTerm) -> Result<usize, MlError> {
        self.get(t).ok_or_else(|| MlError::UnsizedTerm(t.clone()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, usize)> {
        self.sizes.iter().map(|(n, s)| (&**n, *s))
    }
}

// ---------------------------------------------------------------------------
// Matrices

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Semiring> Matrix<K> {
    pub fn new(rows: usize, cols: usize, data: Vec<K>) -> Result<Self, MlError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(MlError::Invalid(format!(
                "{} entries do not fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Result<Self, MlError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MlError::Invalid("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn filled(rows: usize, cols: usize, v: K) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, K::zero())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &K {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: K) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conforms(&self, shape: &Shape, sizes: &SizeAssignment) -> bool {
        sizes.get(&shape.rows) == Some(self.rows) && sizes.get(&shape.cols) == Some(self.cols)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// The all-ones column with as many rows as `self`.
    pub fn ones(&self) -> Self {
        Matrix::filled(self.rows, 1, K::one())
    }

    pub fn diag(&self) -> Result<Self, MlError> {
        if self.cols != 1 {
            return Err(MlError::Invalid(format!("diag of a {}x{} matrix", self.rows, self.cols)));
        }
        let mut m = Matrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            m.set(i, i, self.data[i].clone());
        }
        Ok(m)
    }

    /// Product with the inner sum taken in ascending index order.
    pub fn matmul(&self, other: &Self) -> Result<Self, MlError> {
        if self.cols != other.rows {
            return Err(MlError::Invalid(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = K::zero();
                for l in 0..self.cols {
                    acc = acc.add(&self.get(i, l).mul(other.get(l, j)));
                }
                data.push(acc);
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    fn pointwise(&self, other: &Self, f: impl Fn(&K, &K) -> K) -> Result<Self, MlError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MlError::Invalid(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, MlError> {
        self.pointwise(other, K::add)
    }

    pub fn hadamard(&self, other: &Self) -> Result<Self, MlError> {
        self.pointwise(other, K::mul)
    }
}

impl<K: Semiring> fmt::Display for Matrix<K> {
    /// One row per line, entries right-aligned.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let w = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{:>w$}", cells[i * self.cols + j])?;
            }
            if i + 1 < self.rows {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

/// Matrices for the variables of a schema, conforming by a size assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatInstance<K> {
    schema: MatrixSchema,
    sizes: SizeAssignment,
    matrices: BTreeMap<Arc<str>, Matrix<K>>,
}

impl<K: Semiring> MatInstance<K> {
    /// Every variable starts out as the zero matrix.
    pub fn new(schema: MatrixSchema, sizes: SizeAssignment) -> Result<Self, MlError> {
        let mut matrices = BTreeMap::new();
        for (n, sh) in schema.vars() {
            let m = Matrix::zeros(sizes.size(&sh.rows)?, sizes.size(&sh.cols)?);
            matrices.insert(Arc::from(n), m);
        }
        Ok(MatInstance {
            schema,
            sizes,
            matrices,
        })
    }

    pub fn set(&mut self, name: &str, m: Matrix<K>) -> Result<(), MlError> {
        let shape = self
            .schema
            .get(name)
            .ok_or_else(|| MlError::UnknownVariable(name.to_string()))?;
        if !m.conforms(shape, &self.sizes) {
            return Err(MlError::Nonconforming {
                name: name.to_string(),
                rows: m.rows,
                cols: m.cols,
                shape: shape.clone(),
            });
        }
        self.matrices.insert(Arc::from(name), m);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Matrix<K>> {
        self.matrices.get(name)
    }

    pub fn schema(&self) -> &MatrixSchema {
        &self.schema
    }

    pub fn sizes(&self) -> &SizeAssignment {
        &self.sizes
    }

    pub fn matrices(&self) -> impl Iterator<Item = (&str, &Matrix<K>)> {
        self.matrices.iter().map(|(n, m)| (&**n, m))
    }
}

// ---------------------------------------------------------------------------
// Expressions

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MlNode {
    Var(Arc<str>),
    Transpose(MlExpr),
    Ones(MlExpr),
    Diag(MlExpr),
    MatMul(MlExpr, MlExpr),
    Add(MlExpr, MlExpr),
    Hadamard(MlExpr, MlExpr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MlKind {
    Var,
    Transpose,
    Ones,
    Diag,
    MatMul,
    Add,
    Hadamard,
}

impl MlKind {
    pub const ALL: [MlKind; 7] = [
        MlKind::Var,
        MlKind::Transpose,
        MlKind::Ones,
        MlKind::Diag,
        MlKind::MatMul,
        MlKind::Add,
        MlKind::Hadamard,
    ];
}

/// A well-typed expression with its inferred shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MlExpr {
    shape: Shape,
    node: Arc<MlNode>,
}

impl MlExpr {
    pub fn var(schema: &MatrixSchema, name: &str) -> Result<MlExpr, MlError> {
        let shape = schema
            .get(name)
            .ok_or_else(|| MlError::UnknownVariable(name.to_string()))?;
        Ok(MlExpr::var_with_shape(name, shape.clone()))
    }

    pub fn var_with_shape(name: &str, shape: Shape) -> MlExpr {
        MlExpr {
            shape,
            node: Arc::new(MlNode::Var(Arc::from(name))),
        }
    }

    pub fn transpose(e: MlExpr) -> MlExpr {
        MlExpr {
            shape: e.shape.transposed(),
            node: Arc::new(MlNode::Transpose(e)),
        }
    }

    pub fn ones(e: MlExpr) -> MlExpr {
        MlExpr {
            shape: Shape::new(e.shape.rows.clone(), SizeTerm::One),
            node: Arc::new(MlNode::Ones(e)),
        }
    }

    pub fn diag(e: MlExpr) -> Result<MlExpr, MlError> {
        if !e.shape.cols.is_one() {
            return Err(MlError::DiagShape(e.shape.clone()));
        }
        Ok(MlExpr {
            shape: Shape::new(e.shape.rows.clone(), e.shape.rows.clone()),
            node: Arc::new(MlNode::Diag(e)),
        })
    }

    pub fn matmul(e1: MlExpr, e2: MlExpr) -> Result<MlExpr, MlError> {
        if e1.shape.cols != e2.shape.rows {
            return Err(MlError::MulShape(e1.shape.clone(), e2.shape.clone()));
        }
        Ok(MlExpr {
            shape: Shape::new(e1.shape.rows.clone(), e2.shape.cols.clone()),
            node: Arc::new(MlNode::MatMul(e1, e2)),
        })
    }

    pub fn add(e1: MlExpr, e2: MlExpr) -> Result<MlExpr, MlError> {
        if e1.shape != e2.shape {
            return Err(MlError::ShapeMismatch(e1.shape.clone(), e2.shape.clone()));
        }
        Ok(MlExpr {
            shape: e1.shape.clone(),
            node: Arc::new(MlNode::Add(e1, e2)),
        })
    }

    pub fn hadamard(e1: MlExpr, e2: MlExpr) -> Result<MlExpr, MlError> {
        if e1.shape != e2.shape {
            return Err(MlError::ShapeMismatch(e1.shape.clone(), e2.shape.clone()));
        }
        Ok(MlExpr {
            shape: e1.shape.clone(),
            node: Arc::new(MlNode::Hadamard(e1, e2)),
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn node(&self) -> &MlNode {
        &self.node
    }

    pub fn kind(&self) -> MlKind {
        match &*self.node {
            MlNode::Var(_) => MlKind::Var,
            MlNode::Transpose(_) => MlKind::Transpose,
            MlNode::Ones(_) => MlKind::Ones,
            MlNode::Diag(_) => MlKind::Diag,
            MlNode::MatMul(..) => MlKind::MatMul,
            MlNode::Add(..) => MlKind::Add,
            MlNode::Hadamard(..) => MlKind::Hadamard,
        }
    }

    pub fn children(&self) -> Vec<&MlExpr> {
        match &*self.node {
            MlNode::Var(_) => vec![],
            MlNode::Transpose(e) | MlNode::Ones(e) | MlNode::Diag(e) => vec![e],
            MlNode::MatMul(a, b) | MlNode::Add(a, b) | MlNode::Hadamard(a, b) => vec![a, b],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn visit(&self, f: &mut impl FnMut(&MlExpr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

/// Re-derives the shape of `e` against `schema`.
pub fn ml_infer_schema(e: &MlExpr, schema: &MatrixSchema) -> Result<Shape, MlError> {
    retype(e, schema).map(|r| r.shape)
}

fn retype(e: &MlExpr, s: &MatrixSchema) -> Result<MlExpr, MlError> {
    match e.node() {
        MlNode::Var(n) => {
            let v = MlExpr::var(s, n)?;
            if v.shape != e.shape {
                return Err(MlError::ShapeMismatch(v.shape, e.shape.clone()));
            }
            Ok(v)
        }
        MlNode::Transpose(c) => Ok(MlExpr::transpose(retype(c, s)?)),
        MlNode::Ones(c) => Ok(MlExpr::ones(retype(c, s)?)),
        MlNode::Diag(c) => MlExpr::diag(retype(c, s)?),
        MlNode::MatMul(a, b) => MlExpr::matmul(retype(a, s)?, retype(b, s)?),
        MlNode::Add(a, b) => MlExpr::add(retype(a, s)?, retype(b, s)?),
        MlNode::Hadamard(a, b) => MlExpr::hadamard(retype(a, s)?, retype(b, s)?),
    }
}

pub fn ml_evaluate<K: Semiring>(e: &MlExpr, inst: &MatInstance<K>) -> Result<Matrix<K>, MlError> {
    match e.node() {
        MlNode::Var(n) => inst
            .get(n)
            .cloned()
            .ok_or_else(|| MlError::UnknownVariable(n.to_string())),
        MlNode::Transpose(c) => Ok(ml_evaluate(c, inst)?.transpose()),
        MlNode::Ones(c) => Ok(ml_evaluate(c, inst)?.ones()),
        MlNode::Diag(c) => ml_evaluate(c, inst)?.diag(),
        MlNode::MatMul(a, b) => ml_evaluate(a, inst)?.matmul(&ml_evaluate(b, inst)?),
        MlNode::Add(a, b) => ml_evaluate(a, inst)?.add(&ml_evaluate(b, inst)?),
        MlNode::Hadamard(a, b) => ml_evaluate(a, inst)?.hadamard(&ml_evaluate(b, inst)?),
    }
}

// `+` binds loosest; `*` and `.*` share one level; both are left-associative.
const PREC_ADD: u8 = 0;
const PREC_MUL: u8 = 1;
const PREC_ATOM: u8 = 2;

fn prec(e: &MlExpr) -> u8 {
    match e.node() {
        MlNode::Add(..) => PREC_ADD,
        MlNode::MatMul(..) | MlNode::Hadamard(..) => PREC_MUL,
        _ => PREC_ATOM,
    }
}

fn write_at(e: &MlExpr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for MlExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            MlNode::Var(n) => f.write_str(n),
            MlNode::Transpose(e) => write!(f, "t({e})"),
            MlNode::Ones(e) => write!(f, "ones({e})"),
            MlNode::Diag(e) => write!(f, "diag({e})"),
            MlNode::Add(a, b) => {
                write_at(a, PREC_ADD, f)?;
                f.write_str(" + ")?;
                write_at(b, PREC_MUL, f)
            }
            MlNode::MatMul(a, b) | MlNode::Hadamard(a, b) => {
                let op = if matches!(self.node(), MlNode::MatMul(..)) { " * " } else { " .* " };
                write_at(a, PREC_MUL, f)?;
                f.write_str(op)?;
                write_at(b, PREC_ATOM, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Integer;

    fn st(n: &str) -> SizeTerm {
        SizeTerm::named(n)
    }

    fn ints(rows: &[&[i64]]) -> Matrix<Integer> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect()).unwrap()
    }

    fn fig2() -> (MatrixSchema, MatInstance<Integer>) {
        let schema = MatrixSchema::from_vars([
            ("no_courses", Shape::new(st("student"), st("dptm"))),
            ("course_fee", Shape::new(st("dptm"), SizeTerm::One)),
        ]);
        let sizes = SizeAssignment::from_sizes([("student", 2), ("dptm", 3)]).unwrap();
        let mut inst = MatInstance::new(schema.clone(), sizes).unwrap();
        inst.set("no_courses", ints(&[&[5, 2, 0], &[2, 1, 3]])).unwrap();
        inst.set("course_fee", ints(&[&[300], &[250], &[330]])).unwrap();
        (schema, inst)
    }

    #[test]
    fn shapes_follow_typing_rules() {
        let (schema, _) = fig2();
        let nc = MlExpr::var(&schema, "no_courses").unwrap();
        let cf = MlExpr::var(&schema, "course_fee").unwrap();
        let q = MlExpr::matmul(nc.clone(), cf.clone()).unwrap();
        assert_eq!(q.shape(), &Shape::new(st("student"), SizeTerm::One));
        let d = MlExpr::diag(MlExpr::ones(nc.clone())).unwrap();
        assert_eq!(d.shape(), &Shape::new(st("student"), st("student")));
        assert_eq!(MlExpr::transpose(nc.clone()).shape(), &Shape::new(st("dptm"), st("student")));
        assert!(MlExpr::diag(nc.clone()).is_err());
        assert!(MlExpr::matmul(cf.clone(), nc.clone()).is_err());
        assert!(MlExpr::add(nc, cf).is_err());
        assert_eq!(ml_infer_schema(&q, &schema).unwrap(), *q.shape());
    }

    #[test]
    fn fee_query() {
        let (schema, inst) = fig2();
        let q = MlExpr::matmul(
            MlExpr::var(&schema, "no_courses").unwrap(),
            MlExpr::var(&schema, "course_fee").unwrap(),
        )
        .unwrap();
        assert_eq!(ml_evaluate(&q, &inst).unwrap(), ints(&[&[2000], &[1840]]));
    }

    #[test]
    fn ones_and_diag() {
        let m = ints(&[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(m.ones(), ints(&[&[1], &[1], &[1]]));
        let v = ints(&[&[300], &[250], &[330]]);
        assert_eq!(v.diag().unwrap(), ints(&[&[300, 0, 0], &[0, 250, 0], &[0, 0, 330]]));
        assert!(m.diag().is_err());
    }

    #[test]
    fn instance_checks_conformance() {
        let (_, mut inst) = fig2();
        assert!(inst.set("course_fee", ints(&[&[1, 2]])).is_err());
        assert!(inst.set("nope", ints(&[&[1]])).is_err());
        assert!(SizeAssignment::from_sizes([("a", 0)]).is_err());
    }

    #[test]
    fn display_round_trip_shape() {
        let (schema, _) = fig2();
        let m = MlExpr::var(&schema, "no_courses").unwrap();
        let r1 = MlExpr::matmul(MlExpr::ones(m.clone()), MlExpr::transpose(MlExpr::ones(m.clone()))).unwrap();
        assert_eq!(r1.to_string(), "ones(no_courses) * t(ones(no_courses))");
        let s = MlExpr::add(m.clone(), m.clone()).unwrap();
        let h = MlExpr::hadamard(s.clone(), m.clone()).unwrap();
        assert_eq!(h.to_string(), "(no_courses + no_courses) .* no_courses");
        let nested = MlExpr::matmul(m.clone(), MlExpr::matmul(MlExpr::transpose(m.clone()), m).unwrap()).unwrap();
        assert_eq!(nested.to_string(), "no_courses * (t(no_courses) * no_courses)");
    }
}
