//! Random generation, a dense reference evaluator, and differential checks.
//!
//! Everything here is deterministic in [`GenConfig::seed`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ara::{evaluate, AraError, AraExpr, AraKind, AraNode, DatabaseSchema, Instance};
use crate::bridge::{
    mat_decode, mat_decode_instance, rel_encode, rel_encode_instance, tp_schema, tp_size_term, AttrOrder, BridgeError,
};
use crate::files::{instance_to_toml, mat_instance_to_toml};
use crate::kdata::{
    op_join, op_one, op_projection, op_renaming, op_selection, op_union, Attribute, DomainAssignment, KRelation,
    KernelError, RelationSchema, Renaming, Tuple,
};
use crate::matlang::{ml_evaluate, MatInstance, Matrix, MatrixSchema, MlError, MlExpr, MlKind, Shape, SizeAssignment, SizeTerm};
use crate::semiring::{Boolean, Integer, Mat2, Monomial, Natural, Provenance, Semiring, SemiringKind, Tropical};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Ara(#[from] AraError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Invalid(String),
}

// ---------------------------------------------------------------------------
// Values

/// Bounds for random annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueBounds {
    /// Largest magnitude of sampled numbers and matrix entries.
    pub max_value: u64,
    /// Probability of an explicit zero.
    pub zero_probability: f64,
    /// Provenance token alphabet.
    pub tokens: Vec<String>,
}

impl Default for ValueBounds {
    fn default() -> Self {
        ValueBounds {
            max_value: 3,
            zero_probability: 0.25,
            tokens: vec!["x".into(), "y".into(), "z".into()],
        }
    }
}

/// A semiring the generators can sample.
pub trait GenValue: Semiring {
    /// A nonzero-biased sample; zeros come from [`sample_value`].
    fn sample_raw<R: Rng + ?Sized>(rng: &mut R, bounds: &ValueBounds) -> Self;

    /// A small exhaustive set for axiom checks.
    fn axiom_samples() -> Vec<Self>;
}

/// Samples a value, returning an explicit zero with the configured probability.
pub fn sample_value<K: GenValue, R: Rng + ?Sized>(rng: &mut R, bounds: &ValueBounds) -> K {
    if rng.gen_bool(bounds.zero_probability.clamp(0.0, 1.0)) {
        K::zero()
    } else {
        K::sample_raw(rng, bounds)
    }
}

impl GenValue for Natural {
    fn sample_raw<R: Rng + ?Sized>(rng: &mut R, b: &ValueBounds) -> Self {
        Natural(BigUint::from(rng.gen_range(0..=b.max_value)))
    }
    fn axiom_samples() -> Vec<Self> {
        (0..=4u64).map(Natural::from).collect()
    }
}

impl GenValue for Integer {
    fn sample_raw<R: Rng + ?Sized>(rng: &mut R, b: &ValueBounds) -> Self {
        let m = b.max_value as i64;
        Integer(BigInt::from(rng.gen_range(-m..=m)))
    }
    fn axiom_samples() -> Vec<Self> {
        (-3..=3i64).map(Integer::from).collect()
    }
}

impl GenValue for Boolean {
    fn sample_raw<R: Rng + ?Sized>(rng: &mut R, _: &ValueBounds) -> Self {
        Boolean(rng.gen_bool(0.6))
    }
    fn axiom_samples() -> Vec<Self> {
        vec![Boolean(false), Boolean(true)]
    }
}

impl GenValue for Tropical {
    fn sample_raw<R: Rng + ?Sized>(rng: &mut R, b: &ValueBounds) -> Self {
        Tropical::Finite(rng.gen_range(0..=b.max_value))
    }
    fn axiom_samples() -> Vec<Self> {
        let mut v: Vec<_> = [0, 1, 2, 5].into_iter().map(Tropical::Finite).collect();
        v.push(Tropical::Infinity);
        v
    }
}

impl GenValue for Provenance {
    fn sample_raw<R: Rng + ?Sized>(rng: &mut R, b: &ValueBounds) -> Self {
        if b.tokens.is_empty() || rng.gen_bool(0.2) {
            return Provenance::constant(rng.gen_range(1..=b.max_value.max(1)));
        }
        let tok = b.tokens.choose(rng).expect("nonempty");
        let p = Provenance::token(tok);
        if rng.gen_bool(0.2) {
            let other = b.tokens.choose(rng).expect("nonempty");
            p.add(&Provenance::token(other))
        } else {
            p
        }
    }
    fn axiom_samples() -> Vec<Self> {
        let x = Provenance::token("x");
        let y = Provenance::token("y");
        vec![
            Provenance::zero(),
            Provenance::one(),
            Provenance::constant(2),
            x.clone(),
            y.clone(),
            x.add(&y),
            x.mul(&y).add(&x.mul(&x)),
            Provenance::monomial(Monomial::token("x"), 3u32),
        ]
    }
}

impl GenValue for Mat2 {
    fn sample_raw<R: Rng + ?Sized>(rng: &mut R, b: &ValueBounds) -> Self {
        let m = b.max_value.min(3) as i64;
        let mut e = || rng.gen_range(-m..=m);
        Mat2([[e(), e()], [e(), e()]])
    }
    fn axiom_samples() -> Vec<Self> {
        vec![
            Mat2::zero(),
            Mat2::one(),
            Mat2([[0, 1], [0, 0]]),
            Mat2([[0, 0], [1, 0]]),
            Mat2([[1, 2], [3, 4]]),
            Mat2([[-1, 0], [2, 1]]),
        ]
    }
}

/// Code generic over the semiring, run for a kind chosen at runtime.
pub trait SemiringVisitor {
    type Output;
    fn visit<K: GenValue>(self) -> Self::Output;
}

pub fn dispatch<V: SemiringVisitor>(kind: SemiringKind, v: V) -> V::Output {
    match kind {
        SemiringKind::Nat => v.visit::<Natural>(),
        SemiringKind::Int => v.visit::<Integer>(),
        SemiringKind::Bool => v.visit::<Boolean>(),
        SemiringKind::Tropical => v.visit::<Tropical>(),
        SemiringKind::Provenance => v.visit::<Provenance>(),
        SemiringKind::Mat2 => v.visit::<Mat2>(),
    }
}

// ---------------------------------------------------------------------------
// Generators

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    /// Maximum operator nesting of generated expressions; 0 yields leaves.
    pub max_depth: usize,
    pub max_domain_size: usize,
    pub max_schema_arity: usize,
    pub semiring: SemiringKind,
    pub bounds: ValueBounds,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_depth: 4,
            max_domain_size: 3,
            max_schema_arity: 2,
            semiring: SemiringKind::Nat,
            bounds: ValueBounds::default(),
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig { seed, ..GenConfig::default() }
    }
}

const SORTS: [&str; 2] = ["s", "t"];
const RELATION_NAMES: [&str; 3] = ["R", "S", "T"];
const ATTRIBUTE_NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];
const SIZE_TERMS: [&str; 2] = ["m", "n"];
const MATRIX_NAMES: [&str; 3] = ["A", "B", "C"];

pub struct Generator {
    cfg: GenConfig,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(cfg: GenConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Generator { cfg, rng }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A schema with 1 to 3 relations of arity at most `max_arity`, over one
    /// or two sorts. The catalog declares `max_arity + 2` attributes so that
    /// joins can exceed the relation arity.
    pub fn gen_db_schema(&mut self, max_arity: usize) -> DatabaseSchema {
        let nsorts = self.rng.gen_range(1..=SORTS.len());
        let nattrs = (max_arity + 2).clamp(3, ATTRIBUTE_NAMES.len());
        let pool: Vec<Attribute> = ATTRIBUTE_NAMES[..nattrs]
            .iter()
            .enumerate()
            .map(|(i, n)| {
                // The first attributes cover every sort.
                let s = if i < nsorts { i } else { self.rng.gen_range(0..nsorts) };
                Attribute::new(n, SORTS[s])
            })
            .collect();
        let nrels = self.rng.gen_range(1..=RELATION_NAMES.len());
        let mut db = DatabaseSchema::new();
        for (i, name) in RELATION_NAMES[..nrels].iter().enumerate() {
            let arity = if max_arity == 0 {
                0
            } else if i == 0 {
                max_arity
            } else {
                self.rng.gen_range(0..=max_arity)
            };
            let mut attrs = if i == 0 {
                // R covers every sort so Tp expressions always exist.
                let mut v: Vec<Attribute> = pool[..nsorts.min(arity)].to_vec();
                let mut rest: Vec<Attribute> = pool[nsorts.min(arity)..].to_vec();
                rest.shuffle(&mut self.rng);
                v.extend(rest.into_iter().take(arity - v.len()));
                v
            } else {
                pool.choose_multiple(&mut self.rng, arity).cloned().collect()
            };
            attrs.sort();
            db.insert(name, RelationSchema::new(attrs).expect("pool names are distinct"))
                .expect("pool sorts are consistent");
        }
        for a in pool {
            db.declare(a).expect("pool sorts are consistent");
        }
        db
    }

    /// Consecutive domains for `sorts`, each of size `1..=max_domain_size`.
    pub fn gen_domain<'a>(&mut self, sorts: impl IntoIterator<Item = &'a str>) -> DomainAssignment {
        let mut d = DomainAssignment::new();
        for s in sorts {
            let n = self.rng.gen_range(1..=self.cfg.max_domain_size.max(1));
            d.insert_consecutive(s, n).expect("positive size");
        }
        d
    }

    /// Dense random relation over `schema`; zeros are stored explicitly.
    pub fn gen_relation<K: GenValue>(&mut self, schema: &RelationSchema, domain: &DomainAssignment) -> KRelation<K> {
        let radices = domain.radices(schema).expect("domain covers schema");
        let entries: Vec<(Tuple, K)> = crate::kdata::enumerate_tuples(&radices)
            .map(|t| (t, sample_value(&mut self.rng, &self.cfg.bounds)))
            .collect();
        KRelation::from_entries(schema.clone(), entries).expect("arity matches")
    }

    /// A random instance with a consecutive domain assignment.
    pub fn gen_instance<K: GenValue>(&mut self, db: &DatabaseSchema) -> Instance<K> {
        let sorts = db.sorts();
        let domain = self.gen_domain(sorts.iter().map(|s| &**s));
        let mut inst = Instance::new(db.clone(), domain).expect("domain covers every sort");
        let rels: Vec<(String, RelationSchema)> = db.relations().map(|(n, s)| (n.to_string(), s.clone())).collect();
        for (n, s) in rels {
            let r = self.gen_relation(&s, inst.domain());
            inst.set(&n, r).expect("generated relation fits");
        }
        inst
    }

    /// Variables over one or two size terms with random shapes.
    pub fn gen_matrix_schema(&mut self) -> MatrixSchema {
        let nterms = self.rng.gen_range(1..=SIZE_TERMS.len());
        let mut choices: Vec<SizeTerm> = SIZE_TERMS[..nterms].iter().map(|t| SizeTerm::named(t)).collect();
        choices.push(SizeTerm::One);
        let nvars = self.rng.gen_range(1..=MATRIX_NAMES.len());
        let mut schema = MatrixSchema::new();
        for (i, n) in MATRIX_NAMES[..nvars].iter().enumerate() {
            let shape = if i == 0 {
                // The first variable mentions every size term.
                let last = SizeTerm::named(SIZE_TERMS[nterms - 1]);
                Shape::new(SizeTerm::named(SIZE_TERMS[0]), last)
            } else {
                let r = choices.choose(&mut self.rng).expect("nonempty").clone();
                let c = choices.choose(&mut self.rng).expect("nonempty").clone();
                Shape::new(r, c)
            };
            schema.insert(n, shape);
        }
        schema
    }

    pub fn gen_sizes(&mut self, schema: &MatrixSchema) -> SizeAssignment {
        let mut s = SizeAssignment::new();
        for t in schema.size_terms() {
            let n = self.rng.gen_range(1..=self.cfg.max_domain_size.max(1));
            s.insert(&t, n).expect("positive size");
        }
        s
    }

    pub fn gen_matrix<K: GenValue>(&mut self, rows: usize, cols: usize) -> Matrix<K> {
        let data = (0..rows * cols).map(|_| sample_value(&mut self.rng, &self.cfg.bounds)).collect();
        Matrix::new(rows, cols, data).expect("dimensions match")
    }

    pub fn gen_mat_instance<K: GenValue>(&mut self, schema: &MatrixSchema) -> MatInstance<K> {
        let sizes = self.gen_sizes(schema);
        let mut inst = MatInstance::new(schema.clone(), sizes.clone()).expect("sizes cover schema");
        let vars: Vec<(String, Shape)> = schema.vars().map(|(n, s)| (n.to_string(), s.clone())).collect();
        for (n, sh) in vars {
            let m = self.gen_matrix(sizes.size(&sh.rows).expect("sized"), sizes.size(&sh.cols).expect("sized"));
            inst.set(&n, m).expect("conforming");
        }
        inst
    }

    /// A well-typed expression passing `check_fragment(db, k, with_composition)`
    /// with operator nesting at most `max_depth`. Requires `db.arity() <= k`.
    pub fn gen_ara_expr(&mut self, db: &DatabaseSchema, k: usize, with_composition: bool) -> AraExpr {
        let depth = self.cfg.max_depth;
        self.gen_ara_expr_depth(db, k, with_composition, depth)
    }

    pub fn gen_ara_expr_depth(&mut self, db: &DatabaseSchema, k: usize, with_composition: bool, depth: usize) -> AraExpr {
        assert!(db.arity() <= k, "database arity exceeds k");
        assert!(!db.is_empty(), "empty database schema");
        let pool: Vec<Attribute> = db.attributes().cloned().collect();
        let mut g = AraGen {
            rng: &mut self.rng,
            db,
            k,
            comp: with_composition,
            pool,
        };
        g.expr(depth)
    }

    /// A well-typed MATLANG expression with operator nesting at most
    /// `max_depth`.
    pub fn gen_ml_expr(&mut self, schema: &MatrixSchema) -> MlExpr {
        let depth = self.cfg.max_depth;
        self.gen_ml_expr_depth(schema, depth)
    }

    pub fn gen_ml_expr_depth(&mut self, schema: &MatrixSchema, depth: usize) -> MlExpr {
        assert!(!schema.is_empty(), "empty matrix schema");
        MlGen { rng: &mut self.rng, schema }.expr(depth)
    }
}

fn nesting_ok(e: &AraExpr, limit: usize) -> bool {
    e.depth() <= limit + 1
}

struct AraGen<'a> {
    rng: &'a mut ChaCha8Rng,
    db: &'a DatabaseSchema,
    k: usize,
    comp: bool,
    pool: Vec<Attribute>,
}

impl AraGen<'_> {
    fn leaf(&mut self) -> AraExpr {
        let names: Vec<&str> = self.db.names().collect();
        let n = names.choose(self.rng).expect("nonempty schema");
        AraExpr::rel(self.db, n).expect("declared")
    }

    fn random_subset(&mut self, x: &RelationSchema) -> RelationSchema {
        RelationSchema::new(x.iter().filter(|_| self.rng.gen_bool(0.5)).cloned()).expect("subset")
    }

    fn expr(&mut self, d: usize) -> AraExpr {
        if d == 0 || self.rng.gen_bool(0.15) {
            return self.leaf();
        }
        let kinds = if self.comp { 7 } else { 6 };
        let out = match self.rng.gen_range(0..kinds) {
            0 => AraExpr::one(self.expr(d - 1)),
            1 => {
                let a = self.expr(d - 1);
                let b = self.expr(d - 1);
                match self.coerce(b, a.schema(), d - 1) {
                    Some(b) => AraExpr::union(a, b).expect("schemas agree"),
                    None => a,
                }
            }
            2 => {
                let a = self.expr(d - 1);
                let y = self.random_subset(a.schema());
                AraExpr::project(y, a).expect("subset")
            }
            3 => {
                let a = self.expr(d - 1);
                let y = self.selection_set(a.schema());
                AraExpr::select(y, a).expect("compatible subset")
            }
            4 => {
                let a = self.expr(d - 1);
                let phi = self.random_renaming(a.schema());
                AraExpr::rename(phi, a).expect("total on schema")
            }
            5 => {
                let a = self.expr(d - 1);
                let fitted = (0..d).rev().find_map(|budget| {
                    let b = self.expr(budget);
                    let b = self.fit_join(b, a.schema());
                    nesting_ok(&b, d - 1).then_some(b)
                });
                match fitted {
                    Some(b) => AraExpr::join(a, b).expect("consistent names"),
                    None => a,
                }
            }
            _ => self.compose(d),
        };
        debug_assert!(nesting_ok(&out, d));
        out
    }

    fn selection_set(&mut self, x: &RelationSchema) -> RelationSchema {
        let mut classes: BTreeMap<&str, Vec<Attribute>> = BTreeMap::new();
        for a in x {
            classes.entry(a.sort()).or_default().push(a.clone());
        }
        let multi: Vec<Vec<Attribute>> = classes.into_values().filter(|c| c.len() >= 2).collect();
        match multi.choose(self.rng) {
            Some(c) => {
                let n = self.rng.gen_range(2..=c.len());
                RelationSchema::new(c.choose_multiple(self.rng, n).cloned()).expect("subset")
            }
            None => RelationSchema::new(x.attrs().choose(self.rng).cloned()).expect("subset"),
        }
    }

    fn random_renaming(&mut self, x: &RelationSchema) -> Renaming {
        let mut used: HashSet<Attribute> = HashSet::new();
        let mut pairs = Vec::with_capacity(x.len());
        for a in x {
            let options: Vec<&Attribute> = self
                .pool
                .iter()
                .filter(|b| b.is_compatible(a) && !used.contains(*b))
                .collect();
            let b = options.choose(self.rng).map(|b| (*b).clone()).unwrap_or_else(|| a.clone());
            used.insert(b.clone());
            pairs.push((a.clone(), b));
        }
        Renaming::from_pairs(pairs.clone()).unwrap_or_else(|_| Renaming::identity(x))
    }

    /// Reshapes `e` to have schema `target`, or gives up if that would nest
    /// deeper than `limit`.
    fn coerce(&mut self, e: AraExpr, target: &RelationSchema, limit: usize) -> Option<AraExpr> {
        if e.schema() == target {
            return Some(e);
        }
        let mut used: HashSet<Attribute> = HashSet::new();
        let mut pairs = Vec::new();
        let mut missing = Vec::new();
        for t in target {
            let exact = e.schema().contains(t) && !used.contains(t);
            let src = if exact {
                Some(t.clone())
            } else {
                e.schema().iter().find(|a| a.is_compatible(t) && !used.contains(*a) && !target.contains(a)).cloned()
            };
            match src {
                Some(a) => {
                    used.insert(a.clone());
                    pairs.push((a, t.clone()));
                }
                None => missing.push(t.clone()),
            }
        }
        let keep = RelationSchema::new(pairs.iter().map(|(a, _)| a.clone())).ok()?;
        let mut out = if &keep == e.schema() { e } else { AraExpr::project(keep, e).ok()? };
        if pairs.iter().any(|(a, t)| a != t) {
            out = AraExpr::rename(Renaming::from_pairs(pairs).ok()?, out).ok()?;
        }
        if !missing.is_empty() {
            let fill = tp_schema(self.db, &RelationSchema::new(missing).ok()?).ok()?;
            out = AraExpr::join(out, AraExpr::one(fill)).ok()?;
        }
        (out.schema() == target && nesting_ok(&out, limit)).then_some(out)
    }

    /// Projects `b` so that joining it with schema `x` stays within `k`.
    fn fit_join(&mut self, b: AraExpr, x: &RelationSchema) -> AraExpr {
        let all = x.union(b.schema()).expect("catalog names are consistent");
        if all.len() <= self.k {
            return b;
        }
        let room = self.k.saturating_sub(x.len());
        let mut extra: Vec<Attribute> = b.schema().difference(x).attrs().to_vec();
        extra.shuffle(self.rng);
        extra.truncate(room);
        let keep = b.schema().intersection(x).union(&RelationSchema::new(extra).expect("subset")).expect("subset");
        AraExpr::project(keep, b).expect("subset")
    }

    fn compose(&mut self, d: usize) -> AraExpr {
        let first = self.expr(d - 1);
        let Some(attr) = first.schema().attrs().choose(self.rng).cloned() else {
            return first;
        };
        let nargs = self.rng.gen_range(1..=self.k.max(1));
        let mut all = first.schema().clone();
        let mut args = vec![first];
        for _ in 1..nargs {
            let b = self.expr(d - 1);
            if let Some(b) = self.fit_compose_arg(b, &attr, &all, d - 1) {
                all = all.union(b.schema()).expect("consistent names");
                args.push(b);
            }
        }
        AraExpr::compose(attr, self.k, args).expect("every argument carries the attribute")
    }

    fn fit_compose_arg(&mut self, b: AraExpr, attr: &Attribute, all: &RelationSchema, limit: usize) -> Option<AraExpr> {
        let mut keep: Vec<Attribute> = b.schema().iter().filter(|a| *a != attr).cloned().collect();
        keep.shuffle(self.rng);
        // Room for attributes outside the current union, keeping it within k + 1.
        let mut fresh_room = (self.k + 1).saturating_sub(all.len());
        keep.retain(|a| {
            if all.contains(a) {
                true
            } else if fresh_room > 0 {
                fresh_room -= 1;
                true
            } else {
                false
            }
        });
        keep.truncate(self.k.saturating_sub(1));
        let has_attr = b.schema().contains(attr);
        let mut proj: Vec<Attribute> = keep.clone();
        if has_attr {
            proj.push(attr.clone());
        }
        let proj = RelationSchema::new(proj).ok()?;
        let mut out = if &proj == b.schema() { b } else { AraExpr::project(proj, b).ok()? };
        if !has_attr {
            let fill = tp_schema(self.db, &RelationSchema::singleton(attr.clone())).ok()?;
            out = AraExpr::join(out, fill).ok()?;
        }
        nesting_ok(&out, limit).then_some(out)
    }
}

struct MlGen<'a> {
    rng: &'a mut ChaCha8Rng,
    schema: &'a MatrixSchema,
}

fn ml_nesting_ok(e: &MlExpr, limit: usize) -> bool {
    e.depth() <= limit + 1
}

impl MlGen<'_> {
    fn leaf(&mut self) -> MlExpr {
        let names: Vec<&str> = self.schema.vars().map(|(n, _)| n).collect();
        let n = names.choose(self.rng).expect("nonempty schema");
        MlExpr::var(self.schema, n).expect("declared")
    }

    fn expr(&mut self, d: usize) -> MlExpr {
        if d == 0 || self.rng.gen_bool(0.15) {
            return self.leaf();
        }
        match self.rng.gen_range(0..6) {
            0 => MlExpr::transpose(self.expr(d - 1)),
            1 => MlExpr::ones(self.expr(d - 1)),
            2 => {
                let a = self.expr(d - 1);
                match self.column(a.clone(), d - 1) {
                    Some(c) => MlExpr::diag(c).expect("column"),
                    None => a,
                }
            }
            3 => {
                let a = self.expr(d - 1);
                let target = a.shape().cols.clone();
                match self.operand(d - 1, |g, b, lim| g.fit_rows(b, &target, lim)) {
                    Some(b) => MlExpr::matmul(a, b).expect("inner dimensions agree"),
                    None => a,
                }
            }
            op => {
                let a = self.expr(d - 1);
                let target = a.shape().clone();
                match self.operand(d - 1, |g, b, lim| g.fit_shape(b, &target, lim)) {
                    Some(b) if op == 4 => MlExpr::add(a, b).expect("same shape"),
                    Some(b) => MlExpr::hadamard(a, b).expect("same shape"),
                    None => a,
                }
            }
        }
    }

    /// Generates and fits a second operand, retrying with shallower budgets.
    fn operand(&mut self, limit: usize, fit: impl Fn(&mut Self, MlExpr, usize) -> Option<MlExpr>) -> Option<MlExpr> {
        (0..=limit).rev().find_map(|budget| {
            let b = self.expr(budget);
            fit(self, b, limit)
        })
    }

    fn tp(&self, term: &SizeTerm) -> Option<MlExpr> {
        tp_size_term(self.schema, term.name()?).ok()
    }

    fn column(&mut self, a: MlExpr, limit: usize) -> Option<MlExpr> {
        let sh = a.shape().clone();
        let out = if sh.cols.is_one() {
            a
        } else if sh.rows.is_one() {
            MlExpr::transpose(a)
        } else {
            let ones = self.tp(&sh.cols)?;
            MlExpr::matmul(a, ones).ok()?
        };
        ml_nesting_ok(&out, limit).then_some(out)
    }

    fn fit_rows(&mut self, b: MlExpr, rows: &SizeTerm, limit: usize) -> Option<MlExpr> {
        let sh = b.shape().clone();
        let out = if &sh.rows == rows {
            b
        } else if &sh.cols == rows {
            MlExpr::transpose(b)
        } else {
            // Spread the column sums of `b` over `rows`.
            let sums = MlExpr::matmul(MlExpr::transpose(MlExpr::ones(b.clone())), b).ok()?;
            if rows.is_one() {
                sums
            } else {
                MlExpr::matmul(self.tp(rows)?, sums).ok()?
            }
        };
        ml_nesting_ok(&out, limit).then_some(out)
    }

    fn fit_shape(&mut self, b: MlExpr, target: &Shape, limit: usize) -> Option<MlExpr> {
        let out = if b.shape() == target {
            b
        } else if &b.shape().transposed() == target {
            MlExpr::transpose(b)
        } else {
            let rows = self.fit_rows(b, &target.rows, limit)?;
            if rows.shape().cols == target.cols {
                rows
            } else {
                // Row sums, then spread over the target columns.
                let col_ones = MlExpr::ones(MlExpr::transpose(rows.clone()));
                let sums = MlExpr::matmul(rows, col_ones).ok()?;
                if target.cols.is_one() {
                    sums
                } else {
                    MlExpr::matmul(sums, MlExpr::transpose(self.tp(&target.cols)?)).ok()?
                }
            }
        };
        (out.shape() == target && ml_nesting_ok(&out, limit)).then_some(out)
    }
}

/// Number of nodes of each kind.
pub fn ara_census<'a>(exprs: impl IntoIterator<Item = &'a AraExpr>) -> BTreeMap<AraKind, usize> {
    let mut out: BTreeMap<AraKind, usize> = AraKind::ALL.iter().map(|k| (*k, 0)).collect();
    for e in exprs {
        e.visit(&mut |n| *out.entry(n.kind()).or_default() += 1);
    }
    out
}

pub fn ml_census<'a>(exprs: impl IntoIterator<Item = &'a MlExpr>) -> BTreeMap<MlKind, usize> {
    let mut out: BTreeMap<MlKind, usize> = MlKind::ALL.iter().map(|k| (*k, 0)).collect();
    for e in exprs {
        e.visit(&mut |n| *out.entry(n.kind()).or_default() += 1);
    }
    out
}

// ---------------------------------------------------------------------------
// Dense reference evaluator

/// A total table over `T_D(X)`, indexed in row-major order over the sorted
/// attributes.
struct Dense<K> {
    attrs: Vec<Attribute>,
    radix: Vec<usize>,
    cells: Vec<K>,
}

impl<K: Semiring> Dense<K> {
    fn filled(x: &RelationSchema, d: &DomainAssignment, v: K) -> Result<Self, HarnessError> {
        let attrs = x.attrs().to_vec();
        let mut radix = Vec::with_capacity(attrs.len());
        for a in &attrs {
            radix.push(
                d.size(a.sort())
                    .ok_or_else(|| HarnessError::Invalid(format!("no domain for sort {}", a.sort())))?,
            );
        }
        let n = radix.iter().product();
        Ok(Dense { attrs, radix, cells: vec![v; n] })
    }

    fn index(&self, vals: &[usize]) -> usize {
        vals.iter().zip(&self.radix).fold(0, |acc, (v, r)| acc * r + v)
    }

    fn values(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.radix.len()];
        for p in (0..self.radix.len()).rev() {
            out[p] = i % self.radix[p];
            i /= self.radix[p];
        }
        out
    }

    /// The value at the restriction of an assignment, given by name lookup.
    fn at(&self, lookup: impl Fn(&Attribute) -> usize) -> K {
        let vals: Vec<usize> = self.attrs.iter().map(lookup).collect();
        self.cells[self.index(&vals)].clone()
    }

    fn lookup_in<'b>(&'b self, vals: &'b [usize]) -> impl Fn(&Attribute) -> usize + 'b {
        move |a| vals[self.attrs.iter().position(|b| b == a).expect("attribute of table")]
    }
}

/// Evaluates by literal definition over full dense tables. Shares no
/// evaluation code with the kernel.
pub fn oracle_evaluate<K: Semiring>(e: &AraExpr, inst: &Instance<K>) -> Result<KRelation<K>, HarnessError> {
    let t = dense_eval(e, inst)?;
    let entries: Vec<(Tuple, K)> = t
        .cells
        .iter()
        .enumerate()
        .map(|(i, k)| (Tuple(t.values(i).into_iter().map(|v| v as u32).collect()), k.clone()))
        .collect();
    Ok(KRelation::from_entries(e.schema().clone(), entries)?.pruned())
}

fn dense_eval<K: Semiring>(e: &AraExpr, inst: &Instance<K>) -> Result<Dense<K>, HarnessError> {
    let d = inst.domain();
    let mut out = Dense::filled(e.schema(), d, K::zero())?;
    match e.node() {
        AraNode::Rel(n) => {
            let r = inst
                .get(n)
                .ok_or_else(|| HarnessError::Invalid(format!("unknown relation {n}")))?;
            for (t, k) in r.entries() {
                let vals: Vec<usize> = t.0.iter().map(|v| *v as usize).collect();
                let i = out.index(&vals);
                out.cells[i] = k.clone();
            }
        }
        AraNode::One(_) => out.cells.iter_mut().for_each(|c| *c = K::one()),
        AraNode::Union(a, b) => {
            let (ta, tb) = (dense_eval(a, inst)?, dense_eval(b, inst)?);
            for i in 0..out.cells.len() {
                out.cells[i] = ta.cells[i].add(&tb.cells[i]);
            }
        }
        AraNode::Project(_, c) => {
            let tc = dense_eval(c, inst)?;
            for i in 0..out.cells.len() {
                let want = out.values(i);
                let mut acc = K::zero();
                for j in 0..tc.cells.len() {
                    let have = tc.values(j);
                    let agrees = out
                        .attrs
                        .iter()
                        .zip(&want)
                        .all(|(a, v)| have[tc.attrs.iter().position(|b| b == a).expect("subset")] == *v);
                    if agrees {
                        acc = acc.add(&tc.cells[j]);
                    }
                }
                out.cells[i] = acc;
            }
        }
        AraNode::Select(y, c) => {
            let tc = dense_eval(c, inst)?;
            for i in 0..out.cells.len() {
                let vals = out.values(i);
                let picked: Vec<usize> = y.iter().map(out.lookup_in(&vals)).collect();
                if picked.iter().all(|v| *v == picked[0]) {
                    out.cells[i] = tc.cells[i].clone();
                }
            }
        }
        AraNode::Rename(phi, c) => {
            let tc = dense_eval(c, inst)?;
            for i in 0..out.cells.len() {
                let vals = out.values(i);
                let v = {
                    let get = out.lookup_in(&vals);
                    tc.at(|a| get(phi.apply(a).expect("total renaming")))
                };
                out.cells[i] = v;
            }
        }
        AraNode::Join(a, b) => {
            let (ta, tb) = (dense_eval(a, inst)?, dense_eval(b, inst)?);
            for i in 0..out.cells.len() {
                let vals = out.values(i);
                let v = {
                    let get = out.lookup_in(&vals);
                    ta.at(&get).mul(&tb.at(&get))
                };
                out.cells[i] = v;
            }
        }
        AraNode::Compose { attr, args, .. } => {
            let tables = args.iter().map(|x| dense_eval(x, inst)).collect::<Result<Vec<_>, _>>()?;
            let n = d
                .size(attr.sort())
                .ok_or_else(|| HarnessError::Invalid(format!("no domain for sort {}", attr.sort())))?;
            for i in 0..out.cells.len() {
                let vals = out.values(i);
                let mut acc = K::zero();
                {
                    let outer = out.lookup_in(&vals);
                    for v in 0..n {
                        let get = |x: &Attribute| if x == attr { v } else { outer(x) };
                        let prod = tables.iter().fold(K::one(), |p, t| p.mul(&t.at(get)));
                        acc = acc.add(&prod);
                    }
                }
                out.cells[i] = acc;
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Differential certification

/// Outcome of a randomized check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certification {
    pub trials: usize,
    /// Description of the first failing trial, with its instance as TOML.
    pub failure: Option<String>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "certified on {} random instances", self.trials),
            Some(msg) => write!(f, "FAILED after {} trials\n{msg}", self.trials),
        }
    }
}

fn run_trials(trials: usize, mut trial: impl FnMut(usize) -> Result<Option<String>, HarnessError>) -> Result<Certification, HarnessError> {
    for i in 0..trials {
        if let Some(msg) = trial(i)? {
            return Ok(Certification {
                trials: i + 1,
                failure: Some(msg),
            });
        }
    }
    Ok(Certification { trials, failure: None })
}

/// `e1` and `e2` agree on random instances of `db`.
pub fn certify_equivalent<K: GenValue>(
    gen: &mut Generator,
    e1: &AraExpr,
    e2: &AraExpr,
    db: &DatabaseSchema,
    trials: usize,
) -> Result<Certification, HarnessError> {
    run_trials(trials, |_| {
        let inst = gen.gen_instance::<K>(db);
        let (a, b) = (evaluate(e1, &inst)?, evaluate(e2, &inst)?);
        Ok((a != b).then(|| format!("outputs differ on instance:\n{}", instance_to_toml(&inst))))
    })
}

/// The kernel evaluator agrees with [`oracle_evaluate`] on random instances.
pub fn certify_oracle<K: GenValue>(
    gen: &mut Generator,
    e: &AraExpr,
    db: &DatabaseSchema,
    trials: usize,
) -> Result<Certification, HarnessError> {
    run_trials(trials, |_| {
        let inst = gen.gen_instance::<K>(db);
        let (a, b) = (evaluate(e, &inst)?, oracle_evaluate(e, &inst)?);
        Ok((a != b).then(|| format!("kernel and oracle differ on instance:\n{}", instance_to_toml(&inst))))
    })
}

/// `Rel(e(I)) = Υ(e)(Rel(I))` on random matrix instances.
pub fn certify_ml_to_ara<K: GenValue>(
    gen: &mut Generator,
    ml: &MlExpr,
    ara: &AraExpr,
    schema: &MatrixSchema,
    trials: usize,
) -> Result<Certification, HarnessError> {
    run_trials(trials, |_| {
        let inst = gen.gen_mat_instance::<K>(schema);
        let lhs = rel_encode(&ml_evaluate(ml, &inst)?, ml.shape(), inst.sizes())?;
        let rhs = evaluate(ara, &rel_encode_instance(&inst)?)?;
        Ok((lhs != rhs).then(|| format!("commuting square fails on instance:\n{}", mat_instance_to_toml(&inst))))
    })
}

/// `Mat(e(I)) = Φ(e)(Mat(I))` on random consecutive instances.
pub fn certify_ara_to_ml<K: GenValue>(
    gen: &mut Generator,
    ara: &AraExpr,
    ml: &MlExpr,
    db: &DatabaseSchema,
    order: &AttrOrder,
    trials: usize,
) -> Result<Certification, HarnessError> {
    run_trials(trials, |_| {
        let inst = gen.gen_instance::<K>(db);
        let lhs = mat_decode(&evaluate(ara, &inst)?, inst.domain(), order)?;
        let rhs = ml_evaluate(ml, &mat_decode_instance(&inst, order)?)?;
        Ok((lhs != rhs).then(|| format!("commuting square fails on instance:\n{}", instance_to_toml(&inst))))
    })
}

// ---------------------------------------------------------------------------
// Fuzzing

/// A failing generated case.
#[derive(Debug, Clone)]
pub struct FuzzFailure<K: Semiring> {
    pub case: usize,
    pub db: DatabaseSchema,
    pub expr: AraExpr,
    pub instance: Instance<K>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct FuzzReport<K: Semiring> {
    pub cases: usize,
    pub failures: Vec<FuzzFailure<K>>,
}

/// Random `(ARA+ζk)(k)` expressions checked against the oracle. Failing
/// expressions are shrunk greedily to a failing subexpression.
pub fn fuzz_oracle<K: GenValue>(cfg: &GenConfig, count: usize, k: usize) -> Result<FuzzReport<K>, HarnessError> {
    let mut gen = Generator::new(cfg.clone());
    let mut failures = Vec::new();
    for case in 0..count {
        let db = gen.gen_db_schema(k.min(cfg.max_schema_arity.max(1)));
        let e = gen.gen_ara_expr(&db, k, true);
        let inst = gen.gen_instance::<K>(&db);
        if evaluate(&e, &inst)? != oracle_evaluate(&e, &inst)? {
            let mut cur = e;
            while let Some(c) = cur.children().into_iter().find(|c| {
                matches!((evaluate(c, &inst), oracle_evaluate(c, &inst)), (Ok(a), Ok(b)) if a != b)
            }) {
                cur = c.clone();
            }
            failures.push(FuzzFailure {
                case,
                db,
                expr: cur,
                instance: inst,
                message: "kernel and oracle disagree".into(),
            });
        }
    }
    Ok(FuzzReport { cases: count, failures })
}

// ---------------------------------------------------------------------------
// Indistinguishability

/// A closed expression on which two relations differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinguisher<K> {
    pub expr: AraExpr,
    pub left: K,
    pub right: K,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndistinguishabilityVerdict<K> {
    pub witness: Option<Distinguisher<K>>,
    pub depth: usize,
    pub budget: usize,
    /// Distinct (schema, value pair) classes explored.
    pub explored: usize,
    /// Whether enumeration stopped because the budget ran out.
    pub budget_exhausted: bool,
}

impl<K: fmt::Display> fmt::Display for IndistinguishabilityVerdict<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Some(w) => write!(f, "distinguished by {}: {} vs {}", w.expr, w.left, w.right)?,
            None => write!(f, "not distinguished within budget")?,
        }
        write!(
            f,
            " (depth {}, budget {}, explored {}{})",
            self.depth,
            self.budget,
            self.explored,
            if self.budget_exhausted { ", budget exhausted" } else { "" }
        )
    }
}

/// Searches closed ARA(3) expressions over a single relation name `M` for
/// one that tells `r1` and `r2` apart. Expressions are explored by nesting
/// level and deduplicated by their values on both inputs. This is a
/// semi-decision: a missing witness proves nothing beyond the budget.
pub fn check_indistinguishable<K: Semiring>(
    r1: &KRelation<K>,
    r2: &KRelation<K>,
    domain: &DomainAssignment,
    depth: usize,
    budget: usize,
) -> Result<IndistinguishabilityVerdict<K>, HarnessError> {
    let x = r1.schema().clone();
    if x.len() != 2 || r2.schema() != &x {
        return Err(HarnessError::Invalid("inputs must be binary relations over the same schema".into()));
    }
    r1.validate(domain)?;
    r2.validate(domain)?;

    // Attribute pool: three per sort, starting with the relation's own.
    let mut pool: Vec<Attribute> = x.attrs().to_vec();
    let sorts: Vec<String> = x.iter().map(|a| a.sort().to_string()).collect();
    for s in &sorts {
        let mut i = 0;
        while pool.iter().filter(|a| a.sort() == s).count() < 3 {
            let cand = Attribute::new(format!("{}{}", s.to_uppercase(), i), s);
            if !pool.iter().any(|a| a.name() == cand.name()) {
                pool.push(cand);
            }
            i += 1;
        }
    }

    type Entry<K> = (AraExpr, KRelation<K>, KRelation<K>);
    let mut seen: HashSet<(RelationSchema, KRelation<K>, KRelation<K>)> = HashSet::new();
    let mut classes: Vec<Entry<K>> = Vec::new();
    let mut verdict = IndistinguishabilityVerdict {
        witness: None,
        depth,
        budget,
        explored: 0,
        budget_exhausted: false,
    };

    let total = |r: &KRelation<K>| -> Result<K, HarnessError> { Ok(op_projection(r, &RelationSchema::empty())?.scalar_value()) };

    // Returns true when the search should stop.
    let mut consider = |e: AraExpr, v1: KRelation<K>, v2: KRelation<K>, classes: &mut Vec<Entry<K>>, verdict: &mut IndistinguishabilityVerdict<K>| -> Result<bool, HarnessError> {
        if e.schema().len() > 3 || !seen.insert((e.schema().clone(), v1.clone(), v2.clone())) {
            return Ok(false);
        }
        verdict.explored += 1;
        let (t1, t2) = (total(&v1)?, total(&v2)?);
        if t1 != t2 {
            let closed = if e.schema().is_empty() { e } else { AraExpr::project(RelationSchema::empty(), e)? };
            verdict.witness = Some(Distinguisher {
                expr: closed,
                left: t1,
                right: t2,
            });
            return Ok(true);
        }
        classes.push((e, v1, v2));
        if verdict.explored >= budget {
            verdict.budget_exhausted = true;
            return Ok(true);
        }
        Ok(false)
    };

    let m = AraExpr::rel_with_schema("M", x.clone());
    if consider(m, r1.clone(), r2.clone(), &mut classes, &mut verdict)? {
        return Ok(verdict);
    }
    for _ in 0..depth {
        let snapshot = classes.clone();
        let mut fresh: Vec<Entry<K>> = Vec::new();
        for (e, v1, v2) in &snapshot {
            fresh.push((AraExpr::one(e.clone()), op_one(e.schema(), domain)?, op_one(e.schema(), domain)?));
            for a in e.schema() {
                let y = e.schema().without(a);
                fresh.push((AraExpr::project(y.clone(), e.clone())?, op_projection(v1, &y)?, op_projection(v2, &y)?));
            }
            let attrs = e.schema().attrs();
            for i in 0..attrs.len() {
                for j in i + 1..attrs.len() {
                    if attrs[i].is_compatible(&attrs[j]) {
                        let y = RelationSchema::new([attrs[i].clone(), attrs[j].clone()]).expect("distinct");
                        fresh.push((AraExpr::select(y.clone(), e.clone())?, op_selection(v1, &y)?, op_selection(v2, &y)?));
                    }
                }
            }
            for a in e.schema() {
                for b in pool.iter().filter(|b| b.is_compatible(a) && !e.schema().contains(b)) {
                    let phi = Renaming::single(e.schema(), a, b)?;
                    fresh.push((AraExpr::rename(phi.clone(), e.clone())?, op_renaming(v1, &phi)?, op_renaming(v2, &phi)?));
                }
            }
            for (f, w1, w2) in &snapshot {
                if e.schema() == f.schema() {
                    fresh.push((AraExpr::union(e.clone(), f.clone())?, op_union(v1, w1)?, op_union(v2, w2)?));
                }
                if e.schema().union(f.schema())?.len() <= 3 {
                    fresh.push((AraExpr::join(e.clone(), f.clone())?, op_join(v1, w1)?, op_join(v2, w2)?));
                }
            }
        }
        for (e, v1, v2) in fresh {
            if consider(e, v1.pruned(), v2.pruned(), &mut classes, &mut verdict)? {
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ara::check_fragment;

    #[test]
    fn same_seed_same_artifacts() {
        let mut g1 = Generator::new(GenConfig::with_seed(42));
        let mut g2 = Generator::new(GenConfig::with_seed(42));
        let db1 = g1.gen_db_schema(2);
        let db2 = g2.gen_db_schema(2);
        assert_eq!(db1, db2);
        assert_eq!(g1.gen_instance::<Natural>(&db1), g2.gen_instance::<Natural>(&db2));
        assert_eq!(g1.gen_ara_expr(&db1, 2, true), g2.gen_ara_expr(&db2, 2, true));
    }

    #[test]
    fn singleton_domains_give_one_tuple() {
        let cfg = GenConfig {
            max_domain_size: 1,
            ..GenConfig::with_seed(3)
        };
        let mut g = Generator::new(cfg);
        let db = g.gen_db_schema(2);
        let inst = g.gen_instance::<Integer>(&db);
        for (_, r) in inst.relations() {
            assert_eq!(r.entries().count(), 1);
        }
    }

    #[test]
    fn boolean_annotations_stay_boolean() {
        let mut g = Generator::new(GenConfig::with_seed(5));
        let db = g.gen_db_schema(2);
        let inst = g.gen_instance::<Boolean>(&db);
        assert!(inst.relations().all(|(_, r)| r.entries().all(|(_, v)| v.0 || !v.0)));
    }

    #[test]
    fn depth_zero_is_a_leaf() {
        let mut g = Generator::new(GenConfig {
            max_depth: 0,
            ..GenConfig::with_seed(1)
        });
        let db = g.gen_db_schema(2);
        assert_eq!(g.gen_ara_expr(&db, 2, true).kind(), AraKind::Rel);
        let ms = g.gen_matrix_schema();
        assert_eq!(g.gen_ml_expr(&ms).kind(), MlKind::Var);
    }

    #[test]
    fn generated_expressions_fit_their_fragment() {
        let mut g = Generator::new(GenConfig::with_seed(9));
        for k in 1..=3 {
            for _ in 0..50 {
                let db = g.gen_db_schema(k);
                let e = g.gen_ara_expr(&db, k, true);
                assert!(check_fragment(&e, &db, k, true).is_ok(), "{e}");
                assert!(e.depth() <= g.config().max_depth + 1);
            }
        }
    }

    #[test]
    fn oracle_matches_kernel_on_samples() {
        let mut g = Generator::new(GenConfig::with_seed(11));
        for _ in 0..40 {
            let db = g.gen_db_schema(2);
            let e = g.gen_ara_expr(&db, 2, true);
            let cert = certify_oracle::<Integer>(&mut g, &e, &db, 2).unwrap();
            assert!(cert.passed(), "{e}: {cert}");
        }
    }

    #[test]
    fn reflexive_relation_is_not_distinguished() {
        let mut g = Generator::new(GenConfig::with_seed(2));
        let x = RelationSchema::new([Attribute::new("A", "s"), Attribute::new("B", "s")]).unwrap();
        let d = DomainAssignment::consecutive([("s", 2)]).unwrap();
        let r: KRelation<Natural> = g.gen_relation(&x, &d);
        let v = check_indistinguishable(&r, &r, &d, 2, 200).unwrap();
        assert!(v.witness.is_none());
        assert!(v.to_string().contains("budget 200"));
    }
}
