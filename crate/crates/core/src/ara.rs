//! Annotated relational algebra with k-composition: expressions, schema
//! inference, fragment classification and evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kdata::{
    op_composition, op_join, op_one, op_project_away, op_renaming, op_selection, op_union, Attribute,
    DomainAssignment, KRelation, KernelError, RelationSchema, Renaming,
};
use crate::semiring::Semiring;

/// What went wrong while building, checking or evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AraErrorKind {
    #[error("unknown relation name {0:?}")]
    UnknownRelation(String),
    #[error("relation {name:?} declared with schema {declared} but the expression expects {found}")]
    RelationSchema {
        name: String,
        declared: RelationSchema,
        found: RelationSchema,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Invalid(String),
}

/// An error located at a node. `path` lists child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct AraError {
    pub path: Vec<usize>,
    pub kind: AraErrorKind,
}

impl fmt::Display for AraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.kind)
        } else {
            let p: Vec<String> = self.path.iter().map(usize::to_string).collect();
            write!(f, "at node {}: {}", p.join("."), self.kind)
        }
    }
}

impl AraError {
    fn here(kind: impl Into<AraErrorKind>) -> Self {
        AraError {
            path: Vec::new(),
            kind: kind.into(),
        }
    }

    fn under(mut self, child: usize) -> Self {
        self.path.insert(0, child);
        self
    }
}

impl From<KernelError> for AraError {
    fn from(e: KernelError) -> Self {
        AraError::here(e)
    }
}

// ---------------------------------------------------------------------------
// Database schemas and instances

/// Relation names with their schemas, plus the catalog of known attributes.
///
/// Every attribute name has one sort across the whole schema.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatabaseSchema {
    relations: BTreeMap<Arc<str>, RelationSchema>,
    catalog: BTreeMap<Arc<str>, Attribute>,
}

impl DatabaseSchema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_relations<'a>(
        relations: impl IntoIterator<Item = (&'a str, RelationSchema)>,
    ) -> Result<Self, AraError> {
        let mut db = DatabaseSchema::new();
        for (n, s) in relations {
            db.insert(n, s)?;
        }
        Ok(db)
    }

    /// Adds (or replaces) a relation name.
    pub fn insert(&mut self, name: &str, schema: RelationSchema) -> Result<(), AraError> {
        for a in &schema {
            self.declare(a.clone())?;
        }
        self.relations.insert(Arc::from(name), schema);
        Ok(())
    }

    /// Registers an attribute that may appear in expressions without
    /// belonging to any relation (e.g. a renaming target).
    pub fn declare(&mut self, a: Attribute) -> Result<(), AraError> {
        match self.catalog.get(a.name()) {
            Some(prev) if prev != &a => Err(AraError::here(KernelError::NameClash(prev.clone(), a))),
            Some(_) => Ok(()),
            None => {
                self.catalog.insert(Arc::from(a.name()), a);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&RelationSchema> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &RelationSchema)> {
        self.relations.iter().map(|(n, s)| (&**n, s))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(|n| &**n)
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Largest relation schema cardinality.
    pub fn arity(&self) -> usize {
        self.relations.values().map(RelationSchema::len).max().unwrap_or(0)
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.catalog.get(name)
    }

    pub fn attributes(&self) -> impl Iterator<Item = &Attribute> {
        self.catalog.values()
    }

    /// Sorts used by some relation name, in order.
    pub fn sorts(&self) -> Vec<Arc<str>> {
        let mut v: Vec<Arc<str>> = self
            .relations
            .values()
            .flat_map(|s| s.iter().map(|a| Arc::from(a.sort())))
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

/// A relation for every relation name of a schema, over one domain assignment.
#[derive(Debug, Clone)]
pub struct Instance<K> {
    schema: DatabaseSchema,
    domain: DomainAssignment,
    relations: BTreeMap<Arc<str>, KRelation<K>>,
}

impl<K: Semiring> Instance<K> {
    /// Every relation starts out empty (all zero).
    pub fn new(schema: DatabaseSchema, domain: DomainAssignment) -> Result<Self, AraError> {
        let mut relations = BTreeMap::new();
        for (n, s) in schema.relations() {
            domain.covers(s)?;
            relations.insert(Arc::from(n), KRelation::empty(s.clone()));
        }
        Ok(Instance {
            schema,
            domain,
            relations,
        })
    }

    pub fn set(&mut self, name: &str, r: KRelation<K>) -> Result<(), AraError> {
        let declared = self
            .schema
            .get(name)
            .ok_or_else(|| AraError::here(AraErrorKind::UnknownRelation(name.to_string())))?;
        if declared != r.schema() {
            return Err(AraError::here(AraErrorKind::RelationSchema {
                name: name.to_string(),
                declared: declared.clone(),
                found: r.schema().clone(),
            }));
        }
        r.validate(&self.domain)?;
        self.relations.insert(Arc::from(name), r);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&KRelation<K>> {
        self.relations.get(name)
    }

    pub fn schema(&self) -> &DatabaseSchema {
        &self.schema
    }

    pub fn domain(&self) -> &DomainAssignment {
        &self.domain
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &KRelation<K>)> {
        self.relations.iter().map(|(n, r)| (&**n, r))
    }
}

impl<K: Semiring> PartialEq for Instance<K> {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema && self.domain == other.domain && self.relations == other.relations
    }
}

impl<K: Semiring> Eq for Instance<K> {}

// ---------------------------------------------------------------------------
// Expressions

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AraNode {
    Rel(Arc<str>),
    One(AraExpr),
    Union(AraExpr, AraExpr),
    Project(RelationSchema, AraExpr),
    Select(RelationSchema, AraExpr),
    Rename(Renaming, AraExpr),
    Join(AraExpr, AraExpr),
    Compose {
        attr: Attribute,
        k: usize,
        args: Vec<AraExpr>,
    },
}

/// A well-formed expression together with its inferred schema.
///
/// Values are only built through the checked constructors, so every node's
/// cached schema obeys the typing rules relative to its children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AraExpr {
    schema: RelationSchema,
    node: Arc<AraNode>,
}

/// Node kinds, for censuses and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AraKind {
    Rel,
    One,
    Union,
    Project,
    Select,
    Rename,
    Join,
    Compose,
}

impl AraKind {
    pub const ALL: [AraKind; 8] = [
        AraKind::Rel,
        AraKind::One,
        AraKind::Union,
        AraKind::Project,
        AraKind::Select,
        AraKind::Rename,
        AraKind::Join,
        AraKind::Compose,
    ];
}

impl AraExpr {
    pub fn rel(db: &DatabaseSchema, name: &str) -> Result<AraExpr, AraError> {
        let schema = db
            .get(name)
            .ok_or_else(|| AraError::here(AraErrorKind::UnknownRelation(name.to_string())))?;
        Ok(AraExpr::rel_with_schema(name, schema.clone()))
    }

    /// A relation name whose schema is supplied directly.
    pub fn rel_with_schema(name: &str, schema: RelationSchema) -> AraExpr {
        AraExpr {
            schema,
            node: Arc::new(AraNode::Rel(Arc::from(name))),
        }
    }

    pub fn one(e: AraExpr) -> AraExpr {
        AraExpr {
            schema: e.schema.clone(),
            node: Arc::new(AraNode::One(e)),
        }
    }

    pub fn union(e1: AraExpr, e2: AraExpr) -> Result<AraExpr, AraError> {
        if e1.schema != e2.schema {
            return Err(AraError::here(KernelError::SchemaMismatch {
                left: e1.schema.clone(),
                right: e2.schema.clone(),
            }));
        }
        Ok(AraExpr {
            schema: e1.schema.clone(),
            node: Arc::new(AraNode::Union(e1, e2)),
        })
    }

    pub fn project(onto: RelationSchema, e: AraExpr) -> Result<AraExpr, AraError> {
        if !onto.is_subset(&e.schema) {
            return Err(AraError::here(KernelError::NotSubset {
                subset: onto,
                schema: e.schema.clone(),
            }));
        }
        Ok(AraExpr {
            schema: onto.clone(),
            node: Arc::new(AraNode::Project(onto, e)),
        })
    }

    /// `π̂_A(e)`, i.e. projection onto `S(e) \ {A}`.
    pub fn project_away(a: &Attribute, e: AraExpr) -> Result<AraExpr, AraError> {
        if !e.schema.contains(a) {
            return Err(AraError::here(KernelError::MissingAttribute(a.clone())));
        }
        let onto = e.schema.without(a);
        AraExpr::project(onto, e)
    }

    pub fn select(attrs: RelationSchema, e: AraExpr) -> Result<AraExpr, AraError> {
        if !attrs.is_subset(&e.schema) {
            return Err(AraError::here(KernelError::NotSubset {
                subset: attrs,
                schema: e.schema.clone(),
            }));
        }
        if !attrs.is_mutually_compatible() {
            return Err(AraError::here(KernelError::IncompatibleSelection(attrs)));
        }
        Ok(AraExpr {
            schema: e.schema.clone(),
            node: Arc::new(AraNode::Select(attrs, e)),
        })
    }

    /// `ρ_φ(e)`; `phi` must be defined on exactly `S(e)`.
    pub fn rename(phi: Renaming, e: AraExpr) -> Result<AraExpr, AraError> {
        if phi.domain() != e.schema {
            return Err(AraError::here(KernelError::InvalidRenaming(format!(
                "renaming is defined on {} but the schema is {}",
                phi.domain(),
                e.schema
            ))));
        }
        Ok(AraExpr {
            schema: phi.image(),
            node: Arc::new(AraNode::Rename(phi, e)),
        })
    }

    /// Renames the listed attributes and fixes every other one.
    pub fn rename_some(
        pairs: impl IntoIterator<Item = (Attribute, Attribute)>,
        e: AraExpr,
    ) -> Result<AraExpr, AraError> {
        let mut map: BTreeMap<Attribute, Attribute> = e.schema.iter().map(|a| (a.clone(), a.clone())).collect();
        for (a, b) in pairs {
            if !e.schema.contains(&a) {
                return Err(AraError::here(KernelError::MissingAttribute(a)));
            }
            map.insert(a, b);
        }
        AraExpr::rename(Renaming::new(map)?, e)
    }

    pub fn join(e1: AraExpr, e2: AraExpr) -> Result<AraExpr, AraError> {
        let schema = e1.schema.union(&e2.schema)?;
        Ok(AraExpr {
            schema,
            node: Arc::new(AraNode::Join(e1, e2)),
        })
    }

    /// Left-folded join of a nonempty list.
    pub fn join_all(es: impl IntoIterator<Item = AraExpr>) -> Result<AraExpr, AraError> {
        let mut it = es.into_iter();
        let first = it
            .next()
            .ok_or_else(|| AraError::here(AraErrorKind::Invalid("join of an empty list".into())))?;
        it.try_fold(first, AraExpr::join)
    }

    pub fn compose(attr: Attribute, k: usize, args: Vec<AraExpr>) -> Result<AraExpr, AraError> {
        if args.is_empty() || args.len() > k {
            return Err(AraError::here(KernelError::CompositionArity { given: args.len(), k }));
        }
        let mut all = RelationSchema::empty();
        for (i, e) in args.iter().enumerate() {
            if !e.schema.contains(&attr) {
                return Err(AraError::here(KernelError::MissingAttribute(attr.clone())).under(i));
            }
            all = all.union(&e.schema).map_err(|err| AraError::here(err).under(i))?;
        }
        Ok(AraExpr {
            schema: all.without(&attr),
            node: Arc::new(AraNode::Compose { attr, k, args }),
        })
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    pub fn node(&self) -> &AraNode {
        &self.node
    }

    pub fn kind(&self) -> AraKind {
        match &*self.node {
            AraNode::Rel(_) => AraKind::Rel,
            AraNode::One(_) => AraKind::One,
            AraNode::Union(..) => AraKind::Union,
            AraNode::Project(..) => AraKind::Project,
            AraNode::Select(..) => AraKind::Select,
            AraNode::Rename(..) => AraKind::Rename,
            AraNode::Join(..) => AraKind::Join,
            AraNode::Compose { .. } => AraKind::Compose,
        }
    }

    pub fn children(&self) -> Vec<&AraExpr> {
        match &*self.node {
            AraNode::Rel(_) => vec![],
            AraNode::One(e) | AraNode::Project(_, e) | AraNode::Select(_, e) | AraNode::Rename(_, e) => vec![e],
            AraNode::Union(a, b) | AraNode::Join(a, b) => vec![a, b],
            AraNode::Compose { args, .. } => args.iter().collect(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Calls `f` on every node, parents before children.
    pub fn visit(&self, f: &mut impl FnMut(&AraExpr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn relation_names(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let AraNode::Rel(n) = e.node() {
                out.push(n.clone());
            }
        });
        out.sort();
        out.dedup();
        out
    }
}

// ---------------------------------------------------------------------------
// Schema inference and fragments

/// Recomputes the schema of `e` against `db`, reporting the first violated
/// typing rule with its node path.
pub fn infer_schema(e: &AraExpr, db: &DatabaseSchema) -> Result<RelationSchema, AraError> {
    rebuild(e, db).map(|r| r.schema)
}

fn rebuild(e: &AraExpr, db: &DatabaseSchema) -> Result<AraExpr, AraError> {
    let child = |i: usize, c: &AraExpr| rebuild(c, db).map_err(|err| err.under(i));
    match e.node() {
        AraNode::Rel(n) => {
            let r = AraExpr::rel(db, n)?;
            if r.schema != e.schema {
                return Err(AraError::here(AraErrorKind::RelationSchema {
                    name: n.to_string(),
                    declared: r.schema,
                    found: e.schema.clone(),
                }));
            }
            Ok(r)
        }
        AraNode::One(c) => Ok(AraExpr::one(child(0, c)?)),
        AraNode::Union(a, b) => AraExpr::union(child(0, a)?, child(1, b)?),
        AraNode::Project(y, c) => AraExpr::project(y.clone(), child(0, c)?),
        AraNode::Select(y, c) => AraExpr::select(y.clone(), child(0, c)?),
        AraNode::Rename(phi, c) => AraExpr::rename(phi.clone(), child(0, c)?),
        AraNode::Join(a, b) => AraExpr::join(child(0, a)?, child(1, b)?),
        AraNode::Compose { attr, k, args } => {
            let args = args
                .iter()
                .enumerate()
                .map(|(i, c)| child(i, c))
                .collect::<Result<Vec<_>, _>>()?;
            AraExpr::compose(attr.clone(), *k, args)
        }
    }
}

/// One fragment rule broken by one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentViolation {
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FragmentReport {
    pub violations: Vec<FragmentViolation>,
}

impl FragmentReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FragmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let p: Vec<String> = v.path.iter().map(usize::to_string).collect();
            write!(f, "[{}] {}", p.join("."), v.message)?;
        }
        Ok(())
    }
}

/// Classifies `e` as ARA(k) (`allow_composition = false`) or (ARA+ζk)(k).
pub fn check_fragment(e: &AraExpr, db: &DatabaseSchema, k: usize, allow_composition: bool) -> FragmentReport {
    let mut report = FragmentReport::default();
    if db.arity() > k {
        report.violations.push(FragmentViolation {
            path: vec![],
            message: format!("database schema has arity {} > {k}", db.arity()),
        });
    }
    let mut path = Vec::new();
    fragment_walk(e, k, allow_composition, &mut path, &mut report);
    report
}

fn fragment_walk(e: &AraExpr, k: usize, allow: bool, path: &mut Vec<usize>, report: &mut FragmentReport) {
    if e.schema.len() > k {
        report.violations.push(FragmentViolation {
            path: path.clone(),
            message: format!("schema {} has {} > {k} attributes", e.schema, e.schema.len()),
        });
    }
    if let AraNode::Compose { k: kz, args, .. } = e.node() {
        if !allow {
            report.violations.push(FragmentViolation {
                path: path.clone(),
                message: "composition is not allowed".into(),
            });
        } else if *kz > k || args.len() > k {
            report.violations.push(FragmentViolation {
                path: path.clone(),
                message: format!("composition with bound {kz} and {} arguments exceeds {k}", args.len()),
            });
        }
    }
    for (i, c) in e.children().into_iter().enumerate() {
        path.push(i);
        fragment_walk(c, k, allow, path, report);
        path.pop();
    }
}

// ---------------------------------------------------------------------------
// Evaluation

/// Evaluates `e` on `inst` through the kernel operations.
pub fn evaluate<K: Semiring>(e: &AraExpr, inst: &Instance<K>) -> Result<KRelation<K>, AraError> {
    match e.node() {
        AraNode::Rel(n) => {
            let r = inst
                .get(n)
                .ok_or_else(|| AraError::here(AraErrorKind::UnknownRelation(n.to_string())))?;
            if r.schema() != &e.schema {
                return Err(AraError::here(AraErrorKind::RelationSchema {
                    name: n.to_string(),
                    declared: r.schema().clone(),
                    found: e.schema.clone(),
                }));
            }
            Ok(r.clone())
        }
        AraNode::One(_) => Ok(op_one(&e.schema, inst.domain())?),
        AraNode::Union(a, b) => {
            let ra = evaluate(a, inst).map_err(|x| x.under(0))?;
            let rb = evaluate(b, inst).map_err(|x| x.under(1))?;
            Ok(op_union(&ra, &rb)?)
        }
        AraNode::Project(y, c) => {
            let mut r = evaluate(c, inst).map_err(|x| x.under(0))?;
            for a in c.schema.difference(y).iter() {
                r = op_project_away(&r, a)?;
            }
            Ok(r)
        }
        AraNode::Select(y, c) => Ok(op_selection(&evaluate(c, inst).map_err(|x| x.under(0))?, y)?),
        AraNode::Rename(phi, c) => Ok(op_renaming(&evaluate(c, inst).map_err(|x| x.under(0))?, phi)?),
        AraNode::Join(a, b) => {
            let ra = evaluate(a, inst).map_err(|x| x.under(0))?;
            let rb = evaluate(b, inst).map_err(|x| x.under(1))?;
            Ok(op_join(&ra, &rb)?)
        }
        AraNode::Compose { attr, k, args } => {
            let rs = args
                .iter()
                .enumerate()
                .map(|(i, c)| evaluate(c, inst).map_err(|x| x.under(i)))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&KRelation<K>> = rs.iter().collect();
            Ok(op_composition(attr, *k, &refs)?)
        }
    }
}

// ---------------------------------------------------------------------------
// Surface syntax printing

const PREC_UNION: u8 = 0;
const PREC_JOIN: u8 = 1;
const PREC_ATOM: u8 = 2;

fn prec(e: &AraExpr) -> u8 {
    match e.node() {
        AraNode::Union(..) => PREC_UNION,
        AraNode::Join(..) => PREC_JOIN,
        _ => PREC_ATOM,
    }
}

fn write_at(e: &AraExpr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_attrs(y: &RelationSchema, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, a) in y.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for AraExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            AraNode::Rel(n) => f.write_str(n),
            AraNode::One(e) => write!(f, "one({e})"),
            AraNode::Union(a, b) => {
                write_at(a, PREC_UNION, f)?;
                f.write_str(" + ")?;
                write_at(b, PREC_JOIN, f)
            }
            AraNode::Join(a, b) => {
                write_at(a, PREC_JOIN, f)?;
                f.write_str(" join ")?;
                write_at(b, PREC_ATOM, f)
            }
            AraNode::Project(y, e) => {
                f.write_str("proj{")?;
                write_attrs(y, f)?;
                write!(f, "}}({e})")
            }
            AraNode::Select(y, e) => {
                f.write_str("sel{")?;
                write_attrs(y, f)?;
                write!(f, "}}({e})")
            }
            AraNode::Rename(phi, e) => write!(f, "ren{phi}({e})"),
            AraNode::Compose { attr, k, args } => {
                write!(f, "comp{{{attr},{k}}}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kdata::{Atom, Tuple};
    use crate::semiring::{Integer, Natural};

    fn s(n: &str) -> Attribute {
        Attribute::new(n, "s")
    }

    fn worked_db() -> DatabaseSchema {
        let sch = |a: &str, b: &str| RelationSchema::new([s(a), s(b)]).unwrap();
        DatabaseSchema::from_relations([("R", sch("A", "B")), ("S", sch("B", "C")), ("T", sch("A", "C"))]).unwrap()
    }

    #[test]
    fn composition_schema_drops_attribute() {
        let db = worked_db();
        let e = AraExpr::compose(
            s("A"),
            2,
            vec![AraExpr::rel(&db, "R").unwrap(), AraExpr::rel(&db, "T").unwrap()],
        )
        .unwrap();
        assert_eq!(e.schema(), &RelationSchema::new([s("B"), s("C")]).unwrap());
        assert!(check_fragment(&e, &db, 2, true).is_ok());
        assert!(!check_fragment(&e, &db, 2, false).is_ok());
    }

    #[test]
    fn join_arity_fragment() {
        let db = worked_db();
        let e = AraExpr::join(AraExpr::rel(&db, "R").unwrap(), AraExpr::rel(&db, "S").unwrap()).unwrap();
        assert_eq!(e.schema().len(), 3);
        assert!(!check_fragment(&e, &db, 2, false).is_ok());
        assert!(check_fragment(&e, &db, 3, false).is_ok());
    }

    #[test]
    fn constructor_errors() {
        let db = worked_db();
        let r = AraExpr::rel(&db, "R").unwrap();
        let t = AraExpr::rel(&db, "S").unwrap();
        assert!(AraExpr::union(r.clone(), t).is_err());
        assert!(AraExpr::project(RelationSchema::singleton(s("C")), r.clone()).is_err());
        assert!(AraExpr::rel(&db, "Q").is_err());
        assert!(AraExpr::compose(s("C"), 2, vec![r]).is_err());
        let mixed = RelationSchema::new([s("A"), Attribute::new("D", "t")]).unwrap();
        let ext = AraExpr::rel_with_schema("X", mixed.clone());
        assert!(AraExpr::select(mixed, ext).is_err());
    }

    #[test]
    fn infer_schema_reports_path() {
        let db = worked_db();
        let other = DatabaseSchema::from_relations([("R", RelationSchema::singleton(s("A")))]).unwrap();
        let e = AraExpr::one(AraExpr::rel(&db, "S").unwrap());
        let err = infer_schema(&e, &other).unwrap_err();
        assert_eq!(err.path, vec![0]);
        assert_eq!(infer_schema(&e, &db).unwrap(), *e.schema());
    }

    #[test]
    fn one_ignores_child_values() {
        let db = worked_db();
        let d = DomainAssignment::consecutive([("s", 2)]).unwrap();
        let mut inst: Instance<Integer> = Instance::new(db.clone(), d).unwrap();
        let r = KRelation::from_entries(
            db.get("R").unwrap().clone(),
            [(Tuple(vec![0, 1]), Integer::from(7))],
        )
        .unwrap();
        inst.set("R", r).unwrap();
        let one = AraExpr::one(AraExpr::rel(&db, "R").unwrap());
        let out = evaluate(&one, &inst).unwrap();
        assert_eq!(out.support_len(), 4);
        let twice = AraExpr::join(one.clone(), one.clone()).unwrap();
        assert_eq!(evaluate(&twice, &inst).unwrap(), out);
    }

    #[test]
    fn instance_rejects_bad_relations() {
        let db = worked_db();
        let d = DomainAssignment::consecutive([("s", 2)]).unwrap();
        let mut inst: Instance<Natural> = Instance::new(db.clone(), d).unwrap();
        let bad = KRelation::from_entries(db.get("R").unwrap().clone(), [(Tuple(vec![0, 5]), Natural::from(1))]).unwrap();
        assert!(inst.set("R", bad).is_err());
        assert!(inst.set("S", KRelation::empty(db.get("R").unwrap().clone())).is_err());
        assert!(Instance::<Natural>::new(db, DomainAssignment::new()).is_err());
        let _ = Atom::Nat(1);
    }

    #[test]
    fn display_uses_minimal_parentheses() {
        let db = worked_db();
        let r = || AraExpr::rel(&db, "R").unwrap();
        let u = AraExpr::union(r(), r()).unwrap();
        let j = AraExpr::join(u.clone(), r()).unwrap();
        assert_eq!(j.to_string(), "(R + R) join R");
        let right = AraExpr::union(r(), u).unwrap();
        assert_eq!(right.to_string(), "R + (R + R)");
        let ren = AraExpr::rename_some([(s("A"), s("C"))], r()).unwrap();
        assert_eq!(ren.to_string(), "ren{A->C}(R)");
        let p = AraExpr::project_away(&s("A"), r()).unwrap();
        assert_eq!(p.to_string(), "proj{B}(R)");
    }
}
