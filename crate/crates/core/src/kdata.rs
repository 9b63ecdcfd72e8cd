//! K-relations and the primitive operations on them.
//!
//! Attributes carry a *sort*; two attributes are compatible exactly when they
//! share a sort, and compatible attributes range over the same domain. A
//! [`KRelation`] stores only the tuples it has annotations for; every absent
//! tuple is implicitly annotated with zero.
//!
//! Tuples store, per attribute, the *position* of the value in the sort's
//! domain as listed in the [`DomainAssignment`]. Schemas are kept sorted by
//! (sort, name), so the derived ordering of tuples is the canonical tuple
//! order and every summation runs in that order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semiring::Semiring;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("sort {0:?} has no domain")]
    UncoveredSort(String),
    #[error("schema mismatch: {left} vs {right}")]
    SchemaMismatch {
        left: RelationSchema,
        right: RelationSchema,
    },
    #[error("{subset} is not a subset of {schema}")]
    NotSubset {
        subset: RelationSchema,
        schema: RelationSchema,
    },
    #[error("attribute {0} is not in the schema")]
    MissingAttribute(Attribute),
    #[error("selection attributes {0} are not mutually compatible")]
    IncompatibleSelection(RelationSchema),
    #[error("invalid renaming: {0}")]
    InvalidRenaming(String),
    #[error("attributes {0} and {1} share a name but not a sort")]
    NameClash(Attribute, Attribute),
    #[error("composition takes between 1 and {k} arguments, got {given}")]
    CompositionArity { given: usize, k: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("tuple does not conform: {0}")]
    BadTuple(String),
}

// ---------------------------------------------------------------------------
// Attributes and schemas

/// A named attribute with a compatibility sort.
///
/// Field order makes the derived `Ord` compare by sort first, then name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Attribute {
    sort: Arc<str>,
    name: Arc<str>,
}

impl Attribute {
    pub fn new(name: impl AsRef<str>, sort: impl AsRef<str>) -> Self {
        Attribute {
            sort: Arc::from(sort.as_ref()),
            name: Arc::from(name.as_ref()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> &str {
        &self.sort
    }

    pub fn is_compatible(&self, other: &Attribute) -> bool {
        self.sort == other.sort
    }

    /// Same name, same sort as `self`, different name.
    pub fn with_name(&self, name: impl AsRef<str>) -> Attribute {
        Attribute {
            sort: self.sort.clone(),
            name: Arc::from(name.as_ref()),
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A finite set of attributes in canonical order, no two sharing a name.
///
/// Also used for the attribute sets of projections and selections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RelationSchema(Vec<Attribute>);

impl RelationSchema {
    pub fn empty() -> Self {
        RelationSchema(Vec::new())
    }

    pub fn new(attrs: impl IntoIterator<Item = Attribute>) -> Result<Self, KernelError> {
        let mut v: Vec<Attribute> = attrs.into_iter().collect();
        v.sort();
        v.dedup();
        let mut by_name: HashMap<&str, &Attribute> = HashMap::new();
        for a in &v {
            if let Some(prev) = by_name.insert(a.name(), a) {
                return Err(KernelError::NameClash(prev.clone(), a.clone()));
            }
        }
        Ok(RelationSchema(v))
    }

    pub fn singleton(a: Attribute) -> Self {
        RelationSchema(vec![a])
    }

    pub fn attrs(&self) -> &[Attribute] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Attribute> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, a: &Attribute) -> Option<usize> {
        self.0.binary_search(a).ok()
    }

    pub fn contains(&self, a: &Attribute) -> bool {
        self.position(a).is_some()
    }

    pub fn by_name(&self, name: &str) -> Option<&Attribute> {
        self.0.iter().find(|a| a.name() == name)
    }

    pub fn is_subset(&self, other: &RelationSchema) -> bool {
        self.0.iter().all(|a| other.contains(a))
    }

    pub fn union(&self, other: &RelationSchema) -> Result<RelationSchema, KernelError> {
        RelationSchema::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn intersection(&self, other: &RelationSchema) -> RelationSchema {
        RelationSchema(self.0.iter().filter(|a| other.contains(a)).cloned().collect())
    }

    pub fn difference(&self, other: &RelationSchema) -> RelationSchema {
        RelationSchema(self.0.iter().filter(|a| !other.contains(a)).cloned().collect())
    }

    pub fn without(&self, a: &Attribute) -> RelationSchema {
        RelationSchema(self.0.iter().filter(|b| *b != a).cloned().collect())
    }

    /// True when all members share one sort (vacuously for |Y| ≤ 1).
    pub fn is_mutually_compatible(&self) -> bool {
        self.0.windows(2).all(|w| w[0].is_compatible(&w[1]))
    }
}

impl fmt::Display for RelationSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl<'a> IntoIterator for &'a RelationSchema {
    type Item = &'a Attribute;
    type IntoIter = std::slice::Iter<'a, Attribute>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

// ---------------------------------------------------------------------------
// Domains

/// A domain element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Nat(u64),
    Str(Arc<str>),
}

impl Atom {
    pub fn str(s: &str) -> Self {
        Atom::Str(Arc::from(s))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Nat(n) => write!(f, "{n}"),
            Atom::Str(s) => f.write_str(s),
        }
    }
}

/// Per-sort finite nonempty domains, listed in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DomainAssignment {
    sorts: BTreeMap<Arc<str>, Vec<Atom>>,
}

impl DomainAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sort: &str, elements: Vec<Atom>) -> Result<(), KernelError> {
        if elements.is_empty() {
            return Err(KernelError::InvalidDomain(format!("sort {sort:?} has an empty domain")));
        }
        let mut seen = elements.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(KernelError::InvalidDomain(format!("sort {sort:?} lists a duplicate element")));
        }
        self.sorts.insert(Arc::from(sort), elements);
        Ok(())
    }

    /// Assigns `{1, …, n}` to `sort`.
    pub fn insert_consecutive(&mut self, sort: &str, n: usize) -> Result<(), KernelError> {
        self.insert(sort, (1..=n as u64).map(Atom::Nat).collect())
    }

    pub fn consecutive<'a>(sizes: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self, KernelError> {
        let mut d = DomainAssignment::new();
        for (s, n) in sizes {
            d.insert_consecutive(s, n)?;
        }
        Ok(d)
    }

    pub fn domain(&self, sort: &str) -> Option<&[Atom]> {
        self.sorts.get(sort).map(Vec::as_slice)
    }

    pub fn size(&self, sort: &str) -> Option<usize> {
        self.sorts.get(sort).map(Vec::len)
    }

    pub fn sorts(&self) -> impl Iterator<Item = (&str, &[Atom])> {
        self.sorts.iter().map(|(s, v)| (&**s, v.as_slice()))
    }

    pub fn index_of(&self, sort: &str, atom: &Atom) -> Option<u32> {
        self.sorts.get(sort)?.iter().position(|a| a == atom).map(|i| i as u32)
    }

    pub fn atom(&self, sort: &str, index: u32) -> Option<&Atom> {
        self.sorts.get(sort)?.get(index as usize)
    }

    /// Every domain is `{1, …, n}` listed in increasing order.
    pub fn is_consecutive(&self) -> bool {
        self.sorts
            .values()
            .all(|v| v.iter().enumerate().all(|(i, a)| *a == Atom::Nat(i as u64 + 1)))
    }

    pub fn covers(&self, schema: &RelationSchema) -> Result<(), KernelError> {
        match schema.iter().find(|a| !self.sorts.contains_key(a.sort())) {
            Some(a) => Err(KernelError::UncoveredSort(a.sort().to_string())),
            None => Ok(()),
        }
    }

    /// Domain sizes for each attribute of `schema`, in schema order.
    pub fn radices(&self, schema: &RelationSchema) -> Result<Vec<usize>, KernelError> {
        schema
            .iter()
            .map(|a| self.size(a.sort()).ok_or_else(|| KernelError::UncoveredSort(a.sort().to_string())))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Tuples and relations

/// Domain positions, one per schema attribute in schema order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tuple(pub Vec<u32>);

impl Tuple {
    pub fn empty() -> Self {
        Tuple(Vec::new())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// Builds a tuple over `schema` from attribute-name/element pairs.
    pub fn from_atoms(
        schema: &RelationSchema,
        domain: &DomainAssignment,
        values: &[(&str, Atom)],
    ) -> Result<Tuple, KernelError> {
        if values.len() != schema.len() {
            return Err(KernelError::BadTuple(format!(
                "expected {} values for {schema}, got {}",
                schema.len(),
                values.len()
            )));
        }
        let mut out = Vec::with_capacity(schema.len());
        for a in schema {
            let (_, atom) = values
                .iter()
                .find(|(n, _)| *n == a.name())
                .ok_or_else(|| KernelError::BadTuple(format!("no value for {a}")))?;
            let idx = domain
                .index_of(a.sort(), atom)
                .ok_or_else(|| KernelError::BadTuple(format!("{atom} is not in the domain of {a}")))?;
            out.push(idx);
        }
        Ok(Tuple(out))
    }

    pub fn to_atoms(&self, schema: &RelationSchema, domain: &DomainAssignment) -> Vec<(Attribute, Atom)> {
        schema
            .iter()
            .zip(&self.0)
            .map(|(a, &i)| {
                let atom = domain.atom(a.sort(), i).cloned().unwrap_or(Atom::Nat(u64::from(i) + 1));
                (a.clone(), atom)
            })
            .collect()
    }
}

/// Enumerates every tuple over the given radices in canonical order.
pub fn enumerate_tuples(radices: &[usize]) -> impl Iterator<Item = Tuple> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |mut n| {
        let mut t = vec![0u32; radices.len()];
        for (slot, &r) in t.iter_mut().zip(radices).rev() {
            *slot = (n % r) as u32;
            n /= r;
        }
        Tuple(t)
    })
}

/// A finite map from tuples over `schema` to annotations; absent tuples are
/// annotated with zero. Equality ignores stored zeros.
#[derive(Debug, Clone)]
pub struct KRelation<K> {
    schema: RelationSchema,
    entries: BTreeMap<Tuple, K>,
}

impl<K: Semiring> KRelation<K> {
    pub fn empty(schema: RelationSchema) -> Self {
        KRelation {
            schema,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a relation from entries; repeated tuples are summed.
    pub fn from_entries(
        schema: RelationSchema,
        entries: impl IntoIterator<Item = (Tuple, K)>,
    ) -> Result<Self, KernelError> {
        let mut r = KRelation::empty(schema);
        for (t, k) in entries {
            if t.0.len() != r.schema.len() {
                return Err(KernelError::BadTuple(format!("arity {} for schema {}", t.0.len(), r.schema)));
            }
            r.accumulate(t, k);
        }
        Ok(r)
    }

    /// A scalar: the relation over the empty schema.
    pub fn scalar(value: K) -> Self {
        let mut r = KRelation::empty(RelationSchema::empty());
        r.entries.insert(Tuple::empty(), value);
        r
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    /// Stored entries in canonical order, including stored zeros.
    pub fn entries(&self) -> impl Iterator<Item = (&Tuple, &K)> {
        self.entries.iter()
    }

    /// Entries with nonzero annotations, in canonical order.
    pub fn support(&self) -> impl Iterator<Item = (&Tuple, &K)> {
        self.entries.iter().filter(|(_, k)| !k.is_zero())
    }

    pub fn support_len(&self) -> usize {
        self.support().count()
    }

    pub fn get(&self, t: &Tuple) -> K {
        self.entries.get(t).cloned().unwrap_or_else(K::zero)
    }

    /// The value of a relation over the empty schema.
    pub fn scalar_value(&self) -> K {
        self.get(&Tuple::empty())
    }

    /// Overwrites the annotation of `t`.
    pub fn set(&mut self, t: Tuple, k: K) {
        debug_assert_eq!(t.0.len(), self.schema.len());
        self.entries.insert(t, k);
    }

    fn accumulate(&mut self, t: Tuple, k: K) {
        match self.entries.get_mut(&t) {
            Some(v) => *v = v.add(&k),
            None => {
                self.entries.insert(t, k);
            }
        }
    }

    pub fn pruned(&self) -> Self {
        KRelation {
            schema: self.schema.clone(),
            entries: self.support().map(|(t, k)| (t.clone(), k.clone())).collect(),
        }
    }

    /// Checks that every stored tuple lies within the domains of `domain`.
    pub fn validate(&self, domain: &DomainAssignment) -> Result<(), KernelError> {
        let radices = domain.radices(&self.schema)?;
        for t in self.entries.keys() {
            if t.0.len() != radices.len() || t.0.iter().zip(&radices).any(|(&v, &r)| v as usize >= r) {
                return Err(KernelError::BadTuple(format!("{t:?} outside the domains of {}", self.schema)));
            }
        }
        Ok(())
    }
}

impl<K: Semiring> PartialEq for KRelation<K> {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema && self.support().eq(other.support())
    }
}

impl<K: Semiring> Eq for KRelation<K> {}

impl<K: Semiring> std::hash::Hash for KRelation<K> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.schema.hash(state);
        for (t, k) in self.support() {
            t.hash(state);
            k.hash(state);
        }
    }
}

// ---------------------------------------------------------------------------
// Renamings

/// A compatible one-to-one correspondence between attribute sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Renaming(BTreeMap<Attribute, Attribute>);

impl Renaming {
    /// Validates that the map is injective, sort-preserving and that its image
    /// has no name clashes.
    pub fn new(map: BTreeMap<Attribute, Attribute>) -> Result<Self, KernelError> {
        for (from, to) in &map {
            if !from.is_compatible(to) {
                return Err(KernelError::InvalidRenaming(format!(
                    "{from} ({}) and {to} ({}) are not compatible",
                    from.sort(),
                    to.sort()
                )));
            }
        }
        let image = RelationSchema::new(map.values().cloned())?;
        if image.len() != map.len() {
            return Err(KernelError::InvalidRenaming("not injective".into()));
        }
        Ok(Renaming(map))
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Attribute, Attribute)>) -> Result<Self, KernelError> {
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            if map.insert(a.clone(), b).is_some() {
                return Err(KernelError::InvalidRenaming(format!("{a} mapped twice")));
            }
        }
        Renaming::new(map)
    }

    pub fn identity(schema: &RelationSchema) -> Self {
        Renaming(schema.iter().map(|a| (a.clone(), a.clone())).collect())
    }

    /// `a ↦ b`, every other attribute of `schema` fixed.
    pub fn single(schema: &RelationSchema, a: &Attribute, b: &Attribute) -> Result<Self, KernelError> {
        Renaming::new(
            schema
                .iter()
                .map(|x| (x.clone(), if x == a { b.clone() } else { x.clone() }))
                .collect(),
        )
    }

    pub fn domain(&self) -> RelationSchema {
        RelationSchema(self.0.keys().cloned().collect())
    }

    pub fn image(&self) -> RelationSchema {
        RelationSchema::new(self.0.values().cloned()).expect("validated on construction")
    }

    pub fn apply(&self, a: &Attribute) -> Option<&Attribute> {
        self.0.get(a)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Attribute, &Attribute)> {
        self.0.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(a, b)| a == b)
    }

    /// Image of an attribute set contained in the domain.
    pub fn apply_set(&self, set: &RelationSchema) -> RelationSchema {
        RelationSchema::new(set.iter().map(|a| self.0.get(a).cloned().unwrap_or_else(|| a.clone())))
            .expect("injective renaming preserves name uniqueness")
    }

    pub fn restrict(&self, schema: &RelationSchema) -> Renaming {
        Renaming(
            self.0
                .iter()
                .filter(|(a, _)| schema.contains(a))
                .map(|(a, b)| (a.clone(), b.clone()))
                .collect(),
        )
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Renaming) -> Result<Renaming, KernelError> {
        let mut map = BTreeMap::new();
        for (a, b) in &self.0 {
            let c = other
                .apply(b)
                .ok_or_else(|| KernelError::InvalidRenaming(format!("{b} is outside the second renaming")))?;
            map.insert(a.clone(), c.clone());
        }
        Renaming::new(map)
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (a, b) in self.0.iter().filter(|(a, b)| a != b) {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{a}->{b}")?;
        }
        f.write_str("}")
    }
}

// ---------------------------------------------------------------------------
// Operations

/// `1_X`: every tuple over `schema` annotated with one.
pub fn op_one<K: Semiring>(schema: &RelationSchema, domain: &DomainAssignment) -> Result<KRelation<K>, KernelError> {
    let radices = domain.radices(schema)?;
    let entries = enumerate_tuples(&radices).map(|t| (t, K::one())).collect();
    Ok(KRelation {
        schema: schema.clone(),
        entries,
    })
}

/// Pointwise sum.
pub fn op_union<K: Semiring>(r1: &KRelation<K>, r2: &KRelation<K>) -> Result<KRelation<K>, KernelError> {
    if r1.schema != r2.schema {
        return Err(KernelError::SchemaMismatch {
            left: r1.schema.clone(),
            right: r2.schema.clone(),
        });
    }
    let mut out = r1.clone();
    for (t, k) in &r2.entries {
        out.accumulate(t.clone(), k.clone());
    }
    Ok(out)
}

/// `π_Y`: sums annotations over all extensions of each tuple over `Y`.
pub fn op_projection<K: Semiring>(r: &KRelation<K>, onto: &RelationSchema) -> Result<KRelation<K>, KernelError> {
    if !onto.is_subset(&r.schema) {
        return Err(KernelError::NotSubset {
            subset: onto.clone(),
            schema: r.schema.clone(),
        });
    }
    let keep: Vec<usize> = onto.iter().map(|a| r.schema.position(a).expect("subset")).collect();
    let mut out = KRelation::empty(onto.clone());
    for (t, k) in &r.entries {
        let key = Tuple(keep.iter().map(|&i| t.0[i]).collect());
        out.accumulate(key, k.clone());
    }
    Ok(out)
}

/// `π̂_A`: projection onto every attribute except `a`.
pub fn op_project_away<K: Semiring>(r: &KRelation<K>, a: &Attribute) -> Result<KRelation<K>, KernelError> {
    if !r.schema.contains(a) {
        return Err(KernelError::MissingAttribute(a.clone()));
    }
    op_projection(r, &r.schema.without(a))
}

/// `σ_Y`: keeps annotations of tuples agreeing on all attributes of `Y`.
pub fn op_selection<K: Semiring>(r: &KRelation<K>, attrs: &RelationSchema) -> Result<KRelation<K>, KernelError> {
    if !attrs.is_subset(&r.schema) {
        return Err(KernelError::NotSubset {
            subset: attrs.clone(),
            schema: r.schema.clone(),
        });
    }
    if !attrs.is_mutually_compatible() {
        return Err(KernelError::IncompatibleSelection(attrs.clone()));
    }
    let pos: Vec<usize> = attrs.iter().map(|a| r.schema.position(a).expect("subset")).collect();
    let entries = r
        .entries
        .iter()
        .filter(|(t, _)| pos.windows(2).all(|w| t.0[w[0]] == t.0[w[1]]))
        .map(|(t, k)| (t.clone(), k.clone()))
        .collect();
    Ok(KRelation {
        schema: r.schema.clone(),
        entries,
    })
}

/// `ρ_φ`: relabels attributes; `phi` must have exactly the schema as domain.
pub fn op_renaming<K: Semiring>(r: &KRelation<K>, phi: &Renaming) -> Result<KRelation<K>, KernelError> {
    if phi.domain() != r.schema {
        return Err(KernelError::InvalidRenaming(format!(
            "renaming domain {} differs from schema {}",
            phi.domain(),
            r.schema
        )));
    }
    let target = phi.image();
    // source position for each target position
    let source: Vec<usize> = target
        .iter()
        .map(|b| {
            let a = phi.pairs().find(|(_, to)| *to == b).map(|(from, _)| from).expect("image");
            r.schema.position(a).expect("domain")
        })
        .collect();
    let entries = r
        .entries
        .iter()
        .map(|(t, k)| (Tuple(source.iter().map(|&i| t.0[i]).collect()), k.clone()))
        .collect();
    Ok(KRelation {
        schema: target,
        entries,
    })
}

/// Natural join: `(r1 ⋈ r2)(t) = r1(t|X1) * r2(t|X2)`, left factor first.
pub fn op_join<K: Semiring>(r1: &KRelation<K>, r2: &KRelation<K>) -> Result<KRelation<K>, KernelError> {
    let schema = r1.schema.union(&r2.schema)?;
    let shared = r1.schema.intersection(&r2.schema);
    let key1: Vec<usize> = shared.iter().map(|a| r1.schema.position(a).unwrap()).collect();
    let key2: Vec<usize> = shared.iter().map(|a| r2.schema.position(a).unwrap()).collect();
    // (from_left, position) for each output attribute
    let layout: Vec<(bool, usize)> = schema
        .iter()
        .map(|a| match r1.schema.position(a) {
            Some(i) => (true, i),
            None => (false, r2.schema.position(a).unwrap()),
        })
        .collect();

    let mut groups: HashMap<Vec<u32>, Vec<(&Tuple, &K)>> = HashMap::new();
    for (t, k) in r2.support() {
        groups.entry(key2.iter().map(|&i| t.0[i]).collect()).or_default().push((t, k));
    }

    let mut entries = BTreeMap::new();
    for (t1, k1) in r1.support() {
        let key: Vec<u32> = key1.iter().map(|&i| t1.0[i]).collect();
        let Some(matches) = groups.get(&key) else { continue };
        for (t2, k2) in matches {
            let t = Tuple(
                layout
                    .iter()
                    .map(|&(left, i)| if left { t1.0[i] } else { t2.0[i] })
                    .collect(),
            );
            entries.insert(t, k1.mul(k2));
        }
    }
    Ok(KRelation { schema, entries })
}

/// `ζ_{A,k}(r1, …, rl)`: join all arguments, then project away `a`.
pub fn op_composition<K: Semiring>(a: &Attribute, k: usize, rs: &[&KRelation<K>]) -> Result<KRelation<K>, KernelError> {
    if rs.is_empty() || rs.len() > k {
        return Err(KernelError::CompositionArity { given: rs.len(), k });
    }
    if let Some(r) = rs.iter().find(|r| !r.schema.contains(a)) {
        return Err(KernelError::NotSubset {
            subset: RelationSchema::singleton(a.clone()),
            schema: r.schema.clone(),
        });
    }
    let mut acc = rs[0].clone();
    for r in &rs[1..] {
        acc = op_join(&acc, r)?;
    }
    op_project_away(&acc, a)
}
