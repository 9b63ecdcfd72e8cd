//! Workspace files: `schema.toml` and `instance.toml` in one directory.
//!
//! `schema.toml`:
//!
//! ```toml
//! order = ["student", "dptm"]   # or "lexicographic" / "rows-before-cols"
//!
//! [relations]                    # attribute = sort
//! no_courses = { student = "student", dptm = "dptm" }
//!
//! [attributes]                   # extra attributes usable in expressions
//! D2 = "dptm"
//!
//! [matrices]                     # [rows, cols]; "1" is the unit size term
//! course_fee = ["dptm", "1"]
//! ```
//!
//! `instance.toml`:
//!
//! ```toml
//! semiring = "int"               # optional default for --semiring
//!
//! [sorts]                        # domains, integers or strings
//! dptm = ["CS", "Math", "Bio"]
//!
//! [relations]                    # records; `value` is the annotation, default 1
//! course_fee = [{ dptm = "CS", value = 300 }]
//!
//! [sizes]
//! dptm = 3
//!
//! [matrices]                     # dense, row-major
//! course_fee = [[300], [250], [330]]
//! ```
//!
//! Relations and matrices left out of the instance are all zero.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ara::{AraExpr, DatabaseSchema, Instance};
use crate::bridge::AttrOrder;
use crate::kdata::{Atom, Attribute, DomainAssignment, KRelation, RelationSchema, Tuple};
use crate::matlang::{MatInstance, Matrix, MatrixSchema, MlExpr, Shape, SizeAssignment, SizeTerm};
use crate::semiring::{Semiring, SemiringKind};
use crate::syntax::{parse_ara, parse_ml, ParseError};

pub const SCHEMA_FILE: &str = "schema.toml";
pub const INSTANCE_FILE: &str = "instance.toml";
/// Reserved record key holding a tuple's annotation.
pub const VALUE_KEY: &str = "value";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{context}: {message}")]
pub struct FileError {
    pub context: String,
    pub message: String,
}

impl FileError {
    fn new(context: impl Into<String>, message: impl ToString) -> Self {
        FileError {
            context: context.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OrderSpec {
    Named(String),
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<OrderSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    relations: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    attributes: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    matrices: BTreeMap<String, [String; 2]>,
}

/// A scalar in an instance file: domain atom or annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Bool(bool),
    Int(i64),
    Str(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Bool(b) => if *b { "1" } else { "0" }.to_string(),
            Scalar::Int(n) => n.to_string(),
            Scalar::Str(s) => s.clone(),
        }
    }

    fn atom(&self) -> Result<Atom, String> {
        match self {
            Scalar::Int(n) if *n >= 0 => Ok(Atom::Nat(*n as u64)),
            Scalar::Str(s) => Ok(Atom::str(s)),
            other => Err(format!("{other:?} is not a domain element")),
        }
    }

    fn from_atom(a: &Atom) -> Scalar {
        match a {
            Atom::Nat(n) => Scalar::Int(*n as i64),
            Atom::Str(s) => Scalar::Str(s.to_string()),
        }
    }

    /// Integers stay integers when they round-trip through `i64`.
    fn from_value<K: Semiring>(k: &K) -> Scalar {
        let s = k.to_string();
        match s.parse::<i64>() {
            Ok(n) if n.to_string() == s => Scalar::Int(n),
            _ => Scalar::Str(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    semiring: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    sorts: BTreeMap<String, Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    relations: BTreeMap<String, Vec<BTreeMap<String, Scalar>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    sizes: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    matrices: BTreeMap<String, Vec<Vec<Scalar>>>,
}

/// Parsed schemas plus the raw instance, materialized per semiring on demand.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub dir: Option<PathBuf>,
    pub db: DatabaseSchema,
    pub matrices: MatrixSchema,
    pub order: AttrOrder,
    pub semiring: Option<SemiringKind>,
    instance: InstanceFile,
}

/// Reads `schema.toml` and, when present, `instance.toml` from `dir`.
pub fn load_workspace(dir: impl AsRef<Path>) -> Result<Workspace, FileError> {
    let dir = dir.as_ref();
    let read = |name: &str| fs::read_to_string(dir.join(name)).map_err(|e| FileError::new(dir.join(name).display().to_string(), e));
    let schema = read(SCHEMA_FILE)?;
    let instance = if dir.join(INSTANCE_FILE).exists() {
        Some(read(INSTANCE_FILE)?)
    } else {
        None
    };
    let mut ws = Workspace::from_strings(&schema, instance.as_deref())?;
    ws.dir = Some(dir.to_path_buf());
    Ok(ws)
}

impl Workspace {
    pub fn from_strings(schema_toml: &str, instance_toml: Option<&str>) -> Result<Workspace, FileError> {
        let sf: SchemaFile = toml::from_str(schema_toml).map_err(|e| FileError::new(SCHEMA_FILE, e))?;
        let ctx = |m: String| FileError::new(SCHEMA_FILE, m);
        let mut db = DatabaseSchema::new();
        for (name, attrs) in &sf.relations {
            let x = RelationSchema::new(attrs.iter().map(|(a, s)| Attribute::new(a, s))).map_err(|e| ctx(format!("relation {name}: {e}")))?;
            db.insert(name, x).map_err(|e| ctx(format!("relation {name}: {e}")))?;
        }
        for (a, s) in &sf.attributes {
            db.declare(Attribute::new(a, s)).map_err(|e| ctx(format!("attribute {a}: {e}")))?;
        }
        let mut matrices = MatrixSchema::new();
        for (name, [r, c]) in &sf.matrices {
            matrices.insert(name, Shape::new(SizeTerm::named(r), SizeTerm::named(c)));
        }
        let order = match &sf.order {
            None => AttrOrder::Lexicographic,
            Some(OrderSpec::Explicit(v)) => AttrOrder::Explicit(v.clone()),
            Some(OrderSpec::Named(n)) => match n.as_str() {
                "lexicographic" => AttrOrder::Lexicographic,
                "rows-before-cols" => AttrOrder::RowsBeforeCols,
                other => return Err(ctx(format!("unknown order {other:?}"))),
            },
        };
        let instance: InstanceFile = match instance_toml {
            Some(t) => toml::from_str(t).map_err(|e| FileError::new(INSTANCE_FILE, e))?,
            None => InstanceFile::default(),
        };
        let semiring = instance
            .semiring
            .as_deref()
            .map(|s| s.parse::<SemiringKind>().map_err(|e| FileError::new(INSTANCE_FILE, e)))
            .transpose()?;
        let ws = Workspace {
            dir: None,
            db,
            matrices,
            order,
            semiring,
            instance,
        };
        ws.check_integrity()?;
        Ok(ws)
    }

    fn check_integrity(&self) -> Result<(), FileError> {
        let ctx = |m: String| FileError::new(INSTANCE_FILE, m);
        for name in self.instance.relations.keys() {
            if self.db.get(name).is_none() {
                return Err(ctx(format!("relation {name} is not declared in {SCHEMA_FILE}")));
            }
        }
        for name in self.instance.matrices.keys() {
            if self.matrices.get(name).is_none() {
                return Err(ctx(format!("matrix {name} is not declared in {SCHEMA_FILE}")));
            }
        }
        if self.has_relational_instance() {
            for s in self.db.sorts() {
                if !self.instance.sorts.contains_key(&*s) {
                    return Err(ctx(format!("sort {s} has no domain")));
                }
            }
        }
        if self.has_matrix_instance() {
            for t in self.matrices.size_terms() {
                if !self.instance.sizes.contains_key(&*t) {
                    return Err(ctx(format!("size term {t} has no size")));
                }
            }
        }
        Ok(())
    }

    pub fn has_relational_instance(&self) -> bool {
        !self.instance.sorts.is_empty() || !self.instance.relations.is_empty()
    }

    pub fn has_matrix_instance(&self) -> bool {
        !self.instance.sizes.is_empty() || !self.instance.matrices.is_empty()
    }

    pub fn parse_ara(&self, text: &str) -> Result<AraExpr, ParseError> {
        parse_ara(text, &self.db)
    }

    pub fn parse_ml(&self, text: &str) -> Result<MlExpr, ParseError> {
        parse_ml(text, &self.matrices)
    }

    pub fn domain(&self) -> Result<DomainAssignment, FileError> {
        let mut d = DomainAssignment::new();
        for (s, atoms) in &self.instance.sorts {
            let atoms = atoms
                .iter()
                .map(Scalar::atom)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|m| FileError::new(INSTANCE_FILE, format!("sort {s}: {m}")))?;
            d.insert(s, atoms).map_err(|e| FileError::new(INSTANCE_FILE, format!("sort {s}: {e}")))?;
        }
        Ok(d)
    }

    /// The relational instance annotated in `K`.
    pub fn instance<K: Semiring>(&self) -> Result<Instance<K>, FileError> {
        let domain = self.domain()?;
        let mut inst = Instance::new(self.db.clone(), domain).map_err(|e| FileError::new(INSTANCE_FILE, e))?;
        for (name, records) in &self.instance.relations {
            let ctx = |m: String| FileError::new(INSTANCE_FILE, format!("relation {name}: {m}"));
            let x = self.db.get(name).expect("checked at load").clone();
            let mut entries = Vec::with_capacity(records.len());
            for (i, rec) in records.iter().enumerate() {
                let mut vals = Vec::with_capacity(x.len());
                for a in &x {
                    let v = rec
                        .get(a.name())
                        .ok_or_else(|| ctx(format!("record {} lacks attribute {a}", i + 1)))?;
                    let atom = v.atom().map_err(|m| ctx(format!("record {}: {m}", i + 1)))?;
                    let idx = inst
                        .domain()
                        .index_of(a.sort(), &atom)
                        .ok_or_else(|| ctx(format!("record {}: {atom} is not in the domain of {}", i + 1, a.sort())))?;
                    vals.push(idx);
                }
                if let Some(extra) = rec.keys().find(|k| *k != VALUE_KEY && x.by_name(k).is_none()) {
                    return Err(ctx(format!("record {} has unknown attribute {extra}", i + 1)));
                }
                let k = match rec.get(VALUE_KEY) {
                    None => K::one(),
                    Some(v) => K::parse_value(&v.text()).map_err(|e| ctx(format!("record {}: {e}", i + 1)))?,
                };
                entries.push((Tuple(vals), k));
            }
            let r = KRelation::from_entries(x, entries).map_err(|e| ctx(e.to_string()))?;
            inst.set(name, r).map_err(|e| ctx(e.to_string()))?;
        }
        Ok(inst)
    }

    pub fn sizes(&self) -> Result<SizeAssignment, FileError> {
        let mut s = SizeAssignment::new();
        for (t, n) in &self.instance.sizes {
            s.insert(t, *n).map_err(|e| FileError::new(INSTANCE_FILE, format!("size {t}: {e}")))?;
        }
        Ok(s)
    }

    /// The matrix instance with entries in `K`.
    pub fn mat_instance<K: Semiring>(&self) -> Result<MatInstance<K>, FileError> {
        let mut inst = MatInstance::new(self.matrices.clone(), self.sizes()?).map_err(|e| FileError::new(INSTANCE_FILE, e))?;
        for (name, rows) in &self.instance.matrices {
            let ctx = |m: String| FileError::new(INSTANCE_FILE, format!("matrix {name}: {m}"));
            let parsed = rows
                .iter()
                .map(|r| r.iter().map(|v| K::parse_value(&v.text())).collect::<Result<Vec<K>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ctx(e.to_string()))?;
            let m = Matrix::from_rows(parsed).map_err(|e| ctx(e.to_string()))?;
            inst.set(name, m).map_err(|e| ctx(e.to_string()))?;
        }
        Ok(inst)
    }
}

fn render<T: Serialize>(v: &T) -> String {
    toml::to_string(v).expect("instance data always serializes")
}

/// `schema.toml` text for a relational schema and a matrix schema.
pub fn schema_to_toml(db: &DatabaseSchema, matrices: &MatrixSchema, order: &AttrOrder) -> String {
    let sf = SchemaFile {
        order: match order {
            AttrOrder::Lexicographic => None,
            AttrOrder::RowsBeforeCols => Some(OrderSpec::Named("rows-before-cols".into())),
            AttrOrder::Explicit(v) => Some(OrderSpec::Explicit(v.clone())),
        },
        relations: db
            .relations()
            .map(|(n, x)| (n.to_string(), x.iter().map(|a| (a.name().to_string(), a.sort().to_string())).collect()))
            .collect(),
        attributes: db
            .attributes()
            .map(|a| (a.name().to_string(), a.sort().to_string()))
            .collect(),
        matrices: matrices
            .vars()
            .map(|(n, s)| (n.to_string(), [s.rows.to_string(), s.cols.to_string()]))
            .collect(),
    };
    render(&sf)
}

/// `instance.toml` text for a relational instance; zero entries are omitted.
pub fn instance_to_toml<K: Semiring>(inst: &Instance<K>) -> String {
    let f = InstanceFile {
        semiring: Some(K::NAME.to_string()),
        sorts: inst
            .domain()
            .sorts()
            .map(|(s, atoms)| (s.to_string(), atoms.iter().map(Scalar::from_atom).collect()))
            .collect(),
        relations: inst
            .relations()
            .map(|(n, r)| {
                let records = r
                    .support()
                    .map(|(t, k)| {
                        let mut rec: BTreeMap<String, Scalar> = t
                            .to_atoms(r.schema(), inst.domain())
                            .into_iter()
                            .map(|(a, atom)| (a.name().to_string(), Scalar::from_atom(&atom)))
                            .collect();
                        rec.insert(VALUE_KEY.to_string(), Scalar::from_value(k));
                        rec
                    })
                    .collect();
                (n.to_string(), records)
            })
            .collect(),
        ..InstanceFile::default()
    };
    render(&f)
}

/// `instance.toml` text for a matrix instance.
pub fn mat_instance_to_toml<K: Semiring>(inst: &MatInstance<K>) -> String {
    let f = InstanceFile {
        semiring: Some(K::NAME.to_string()),
        sizes: inst.sizes().terms().map(|(t, n)| (t.to_string(), n)).collect(),
        matrices: inst
            .matrices()
            .map(|(n, m)| {
                let rows = (0..m.rows()).map(|i| m.row(i).iter().map(Scalar::from_value).collect()).collect();
                (n.to_string(), rows)
            })
            .collect(),
        ..InstanceFile::default()
    };
    render(&f)
}
