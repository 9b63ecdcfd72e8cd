//! Annotation algebras.
//!
//! A [`Semiring`] is the carrier `K` every relation and matrix is annotated
//! with. The shipped instances all have exact, decidable equality:
//!
//! | name         | carrier                         | `+`    | `*`    | commutative |
//! |--------------|---------------------------------|--------|--------|-------------|
//! | `nat`        | natural numbers (arbitrary size)| `+`    | `×`    | yes         |
//! | `int`        | integers (arbitrary size)       | `+`    | `×`    | yes         |
//! | `bool`       | `{0, 1}`                        | `∨`    | `∧`    | yes         |
//! | `tropical`   | `ℕ ∪ {∞}`                       | `min`  | `+`    | yes         |
//! | `provenance` | `ℕ[X]` over a token alphabet    | poly + | poly × | yes         |
//! | `mat2`       | 2×2 integer matrices            | `+`    | `·`    | no          |

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {carrier} value from {text:?}: {reason}")]
pub struct ValueParseError {
    pub carrier: &'static str,
    pub text: String,
    pub reason: String,
}

impl ValueParseError {
    fn new(carrier: &'static str, text: &str, reason: impl Into<String>) -> Self {
        Self {
            carrier,
            text: text.to_string(),
            reason: reason.into(),
        }
    }
}

/// A semiring `(K, +, *, 0, 1)`.
///
/// Addition must be associative and commutative with identity `zero`;
/// multiplication associative with identity `one`; `zero` annihilates and
/// multiplication distributes over addition on both sides. Use
/// [`check_axioms`] to test an implementation on sample values.
pub trait Semiring: Clone + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// Name used on the command line and in files.
    const NAME: &'static str;
    /// Whether `*` is commutative.
    const COMMUTATIVE: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Parses the textual rendering produced by `Display`.
    fn parse_value(text: &str) -> Result<Self, ValueParseError>;

    fn spec() -> SemiringSpec {
        SemiringSpec {
            name: Self::NAME,
            commutative: Self::COMMUTATIVE,
        }
    }
}

/// Runtime descriptor of a semiring: its name and commutativity flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SemiringSpec {
    pub name: &'static str,
    pub commutative: bool,
}

/// The shipped semirings, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringKind {
    Nat,
    Int,
    Bool,
    Tropical,
    Provenance,
    Mat2,
}

impl SemiringKind {
    pub const ALL: [SemiringKind; 6] = [
        SemiringKind::Nat,
        SemiringKind::Int,
        SemiringKind::Bool,
        SemiringKind::Tropical,
        SemiringKind::Provenance,
        SemiringKind::Mat2,
    ];

    pub fn spec(self) -> SemiringSpec {
        match self {
            SemiringKind::Nat => Natural::spec(),
            SemiringKind::Int => Integer::spec(),
            SemiringKind::Bool => Boolean::spec(),
            SemiringKind::Tropical => Tropical::spec(),
            SemiringKind::Provenance => Provenance::spec(),
            SemiringKind::Mat2 => Mat2::spec(),
        }
    }

    pub fn name(self) -> &'static str {
        self.spec().name
    }

    pub fn is_commutative(self) -> bool {
        self.spec().commutative
    }
}

impl FromStr for SemiringKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemiringKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SemiringKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown semiring {s:?} (expected one of {})", names.join(", "))
            })
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Descriptors of every shipped semiring.
pub fn builtin_semirings() -> Vec<SemiringSpec> {
    SemiringKind::ALL.iter().map(|k| k.spec()).collect()
}

// ---------------------------------------------------------------------------
// Natural numbers and integers

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Natural(pub BigUint);

impl From<u64> for Natural {
    fn from(v: u64) -> Self {
        Natural(BigUint::from(v))
    }
}

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for Natural {
    const NAME: &'static str = "nat";
    const COMMUTATIVE: bool = true;

    fn zero() -> Self {
        Natural(BigUint::zero())
    }
    fn one() -> Self {
        Natural(BigUint::one())
    }
    fn add(&self, rhs: &Self) -> Self {
        Natural(&self.0 + &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Natural(&self.0 * &rhs.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn parse_value(text: &str) -> Result<Self, ValueParseError> {
        text.trim()
            .parse::<BigUint>()
            .map(Natural)
            .map_err(|e| ValueParseError::new(Self::NAME, text, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Integer(pub BigInt);

impl From<i64> for Integer {
    fn from(v: i64) -> Self {
        Integer(BigInt::from(v))
    }
}

impl fmt::Display for Integer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Semiring for Integer {
    const NAME: &'static str = "int";
    const COMMUTATIVE: bool = true;

    fn zero() -> Self {
        Integer(BigInt::zero())
    }
    fn one() -> Self {
        Integer(BigInt::one())
    }
    fn add(&self, rhs: &Self) -> Self {
        Integer(&self.0 + &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Integer(&self.0 * &rhs.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn parse_value(text: &str) -> Result<Self, ValueParseError> {
        text.trim()
            .parse::<BigInt>()
            .map(Integer)
            .map_err(|e| ValueParseError::new(Self::NAME, text, e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Booleans

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Boolean(pub bool);

impl fmt::Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl Semiring for Boolean {
    const NAME: &'static str = "bool";
    const COMMUTATIVE: bool = true;

    fn zero() -> Self {
        Boolean(false)
    }
    fn one() -> Self {
        Boolean(true)
    }
    fn add(&self, rhs: &Self) -> Self {
        Boolean(self.0 || rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Boolean(self.0 && rhs.0)
    }
    fn parse_value(text: &str) -> Result<Self, ValueParseError> {
        match text.trim() {
            "0" | "false" => Ok(Boolean(false)),
            "1" | "true" => Ok(Boolean(true)),
            _ => Err(ValueParseError::new(Self::NAME, text, "expected 0 or 1")),
        }
    }
}

// ---------------------------------------------------------------------------
// Min-plus over ℕ ∪ {∞}

/// Min-plus tropical semiring. `Infinity` is the additive identity and the
/// multiplicative annihilator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tropical {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tropical::Finite(v) => write!(f, "{v}"),
            Tropical::Infinity => f.write_str("inf"),
        }
    }
}

impl Semiring for Tropical {
    const NAME: &'static str = "tropical";
    const COMMUTATIVE: bool = true;

    fn zero() -> Self {
        Tropical::Infinity
    }
    fn one() -> Self {
        Tropical::Finite(0)
    }
    fn add(&self, rhs: &Self) -> Self {
        // derived Ord puts every finite value below Infinity
        (*self).min(*rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Tropical::Finite(a), Tropical::Finite(b)) => {
                Tropical::Finite(a.checked_add(*b).expect("tropical value overflowed u64"))
            }
            _ => Tropical::Infinity,
        }
    }
    fn parse_value(text: &str) -> Result<Self, ValueParseError> {
        match text.trim() {
            "inf" | "∞" => Ok(Tropical::Infinity),
            t => t
                .parse::<u64>()
                .map(Tropical::Finite)
                .map_err(|e| ValueParseError::new(Self::NAME, text, e.to_string())),
        }
    }
}

// ---------------------------------------------------------------------------
// Provenance polynomials ℕ[X]

/// A monomial: tokens with positive exponents, sorted by token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Arc<str>, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn token(name: &str) -> Self {
        Monomial(vec![(Arc::from(name), 1)])
    }

    pub fn factors(&self) -> &[(Arc<str>, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    fn mul(&self, rhs: &Monomial) -> Monomial {
        let mut merged: BTreeMap<Arc<str>, u32> = BTreeMap::new();
        for (t, e) in self.0.iter().chain(rhs.0.iter()) {
            *merged.entry(t.clone()).or_insert(0) += e;
        }
        Monomial(merged.into_iter().collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (t, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{t}")?;
            } else {
                write!(f, "{t}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial with natural coefficients, stored as a canonically ordered
/// map from monomials to nonzero coefficients, so equality is syntactic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Provenance {
    terms: BTreeMap<Monomial, BigUint>,
}

impl Provenance {
    pub fn token(name: &str) -> Self {
        Self::monomial(Monomial::token(name), 1u32)
    }

    pub fn constant(c: u64) -> Self {
        Self::monomial(Monomial::unit(), c)
    }

    pub fn monomial(m: Monomial, coefficient: impl Into<BigUint>) -> Self {
        let c = coefficient.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Provenance { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigUint)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // highest degree first reads more naturally; constants last
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m.0.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Semiring for Provenance {
    const NAME: &'static str = "provenance";
    const COMMUTATIVE: bool = true;

    fn zero() -> Self {
        Provenance::default()
    }
    fn one() -> Self {
        Provenance::constant(1)
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            *terms.entry(m.clone()).or_default() += c;
        }
        Provenance { terms }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut terms: BTreeMap<Monomial, BigUint> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *terms.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        Provenance { terms }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn parse_value(text: &str) -> Result<Self, ValueParseError> {
        parse_polynomial(text).map_err(|reason| ValueParseError::new(Self::NAME, text, reason))
    }
}

fn parse_polynomial(text: &str) -> Result<Provenance, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut acc = Provenance::zero();
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err("empty term".into());
        }
        let mut product = Provenance::one();
        for factor in term.split(['*', '·']) {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err("empty factor".into());
            }
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (
                    b.trim(),
                    e.trim().parse::<u32>().map_err(|e| format!("bad exponent: {e}"))?,
                ),
                None => (factor, 1),
            };
            let value = if base.chars().all(|c| c.is_ascii_digit()) {
                Provenance::monomial(
                    Monomial::unit(),
                    base.parse::<BigUint>().map_err(|e| e.to_string())?,
                )
            } else if is_identifier(base) {
                Provenance::token(base)
            } else {
                return Err(format!("bad factor {base:?}"));
            };
            for _ in 0..exp {
                product = product.mul(&value);
            }
        }
        acc = acc.add(&product);
    }
    Ok(acc)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// ---------------------------------------------------------------------------
// 2×2 integer matrices (non-commutative)

/// 2×2 matrices with `i64` entries under matrix addition and product.
///
/// Arithmetic wraps, so the carrier is exactly the matrix ring over
/// `ℤ/2⁶⁴`; values used in practice are far from the wrap boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[{a},{b};{c},{d}]")
    }
}

impl Semiring for Mat2 {
    const NAME: &'static str = "mat2";
    const COMMUTATIVE: bool = false;

    fn zero() -> Self {
        Mat2([[0, 0], [0, 0]])
    }
    fn one() -> Self {
        Mat2([[1, 0], [0, 1]])
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[i][j].wrapping_add(rhs.0[i][j]);
            }
        }
        Mat2(out)
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[i][0]
                    .wrapping_mul(rhs.0[0][j])
                    .wrapping_add(self.0[i][1].wrapping_mul(rhs.0[1][j]));
            }
        }
        Mat2(out)
    }
    fn parse_value(text: &str) -> Result<Self, ValueParseError> {
        let err = |r: &str| ValueParseError::new(Self::NAME, text, r);
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| err("expected [a,b;c,d]"))?;
        let rows: Vec<&str> = inner.split(';').collect();
        if rows.len() != 2 {
            return Err(err("expected two rows"));
        }
        let mut out = [[0i64; 2]; 2];
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 2 {
                return Err(err("expected two columns"));
            }
            for (j, cell) in cells.iter().enumerate() {
                out[i][j] = cell.trim().parse().map_err(|_| err("bad entry"))?;
            }
        }
        Ok(Mat2(out))
    }
}

// ---------------------------------------------------------------------------
// Axiom checking

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    AddAssociative,
    AddCommutative,
    AddIdentity,
    MulAssociative,
    MulIdentity,
    ZeroAnnihilates,
    LeftDistributive,
    RightDistributive,
    MulCommutative,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::AddAssociative => "add not associative",
            Axiom::AddCommutative => "add not commutative",
            Axiom::AddIdentity => "zero not additive identity",
            Axiom::MulAssociative => "mul not associative",
            Axiom::MulIdentity => "one not multiplicative identity",
            Axiom::ZeroAnnihilates => "zero does not annihilate",
            Axiom::LeftDistributive => "mul not left-distributive",
            Axiom::RightDistributive => "mul not right-distributive",
            Axiom::MulCommutative => "mul not commutative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witness: String,
}

/// Outcome of [`check_axioms`]: one entry per violated axiom, each with the
/// first witness found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
    pub triples_checked: usize,
}

impl AxiomReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    fn record(&mut self, axiom: Axiom, witness: impl FnOnce() -> String) {
        if !self.contains(axiom) {
            self.violations.push(AxiomViolation {
                axiom,
                witness: witness(),
            });
        }
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "all axioms hold on {} triples", self.triples_checked);
        }
        for v in &self.violations {
            writeln!(f, "{} (witness {})", v.axiom, v.witness)?;
        }
        Ok(())
    }
}

/// Checks every semiring axiom on all triples drawn from `samples`
/// (multiplicative commutativity only when `K::COMMUTATIVE` is set).
pub fn check_axioms<K: Semiring>(samples: &[K]) -> AxiomReport {
    assert!(!samples.is_empty(), "check_axioms needs at least one sample");
    let zero = K::zero();
    let one = K::one();
    let mut report = AxiomReport::default();

    for x in samples {
        if x.add(&zero) != *x || zero.add(x) != *x {
            report.record(Axiom::AddIdentity, || format!("x={x}"));
        }
        if x.mul(&one) != *x || one.mul(x) != *x {
            report.record(Axiom::MulIdentity, || format!("x={x}"));
        }
        if !x.mul(&zero).is_zero() || !zero.mul(x).is_zero() {
            report.record(Axiom::ZeroAnnihilates, || format!("x={x}"));
        }
        for y in samples {
            if x.add(y) != y.add(x) {
                report.record(Axiom::AddCommutative, || format!("x={x}, y={y}"));
            }
            if K::COMMUTATIVE && x.mul(y) != y.mul(x) {
                report.record(Axiom::MulCommutative, || format!("x={x}, y={y}"));
            }
            for z in samples {
                report.triples_checked += 1;
                if x.add(y).add(z) != x.add(&y.add(z)) {
                    report.record(Axiom::AddAssociative, || format!("x={x}, y={y}, z={z}"));
                }
                if x.mul(y).mul(z) != x.mul(&y.mul(z)) {
                    report.record(Axiom::MulAssociative, || format!("x={x}, y={y}, z={z}"));
                }
                if x.mul(&y.add(z)) != x.mul(y).add(&x.mul(z)) {
                    report.record(Axiom::LeftDistributive, || format!("x={x}, y={y}, z={z}"));
                }
                if y.add(z).mul(x) != y.mul(x).add(&z.mul(x)) {
                    report.record(Axiom::RightDistributive, || format!("x={x}, y={y}, z={z}"));
                }
            }
        }
    }
    report
}

/// Searches `samples` for a pair with `x*y != y*x`.
pub fn non_commutativity_witness<K: Semiring>(samples: &[K]) -> Option<(K, K)> {
    samples.iter().find_map(|x| {
        samples
            .iter()
            .find(|y| x.mul(y) != y.mul(x))
            .map(|y| (x.clone(), y.clone()))
    })
}
