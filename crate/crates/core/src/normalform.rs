//! Rewriting ARA(k+1) into unions of selections of joins of (ARA+ζk)(k)
//! expressions, and the resulting arity reduction.
//!
//! Deterministic choices:
//! * when projecting away `A ∈ Y`, the partner `B` is the smallest other
//!   member of `Y`;
//! * a factor is assigned to the lexicographically smallest k-subset
//!   containing both `A` and its schema;
//! * new factors are appended after the untouched ones;
//! * consecutive renamings of one factor are merged.

use std::fmt;

use thiserror::Error;

use crate::ara::{check_fragment, AraError, AraExpr, AraNode, DatabaseSchema};
use crate::kdata::{Attribute, RelationSchema, Renaming};
use crate::semiring::SemiringSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("normalization requires a commutative semiring; {0} is not commutative")]
    NonCommutative(&'static str),
    #[error("input outside the supported fragment: {0}")]
    Fragment(String),
    #[error("normal form exceeds {limit} factors")]
    TooLarge { limit: usize },
    #[error(transparent)]
    Ara(#[from] AraError),
}

/// One disjunct: `σ_{Y_m} ⋯ σ_{Y_1}(f_1 ⋈ ⋯ ⋈ f_n)`.
///
/// Invariants: `factors` is nonempty; the `Y_i` are pairwise disjoint, each
/// of size at least two, and kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Branch {
    pub selections: Vec<RelationSchema>,
    pub factors: Vec<AraExpr>,
}

impl Branch {
    pub fn schema(&self) -> RelationSchema {
        self.factors
            .iter()
            .fold(RelationSchema::empty(), |acc, f| acc.union(f.schema()).expect("well-typed branch"))
    }

    pub fn denote(&self) -> AraExpr {
        let mut e = AraExpr::join_all(self.factors.iter().cloned()).expect("well-typed branch");
        for y in &self.selections {
            e = AraExpr::select(y.clone(), e).expect("selection over branch schema");
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub branches: Vec<Branch>,
}

impl NormalForm {
    fn single(f: AraExpr) -> Self {
        NormalForm {
            branches: vec![Branch {
                selections: vec![],
                factors: vec![f],
            }],
        }
    }

    /// Union of the branches, left-folded.
    pub fn denote(&self) -> AraExpr {
        let mut it = self.branches.iter().map(Branch::denote);
        let first = it.next().expect("a normal form has at least one branch");
        it.fold(first, |acc, b| AraExpr::union(acc, b).expect("branches share the schema"))
    }

    pub fn size(&self) -> usize {
        self.denote().size()
    }

    pub fn num_factors(&self) -> usize {
        self.branches.iter().map(|b| b.factors.len()).sum()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.denote())
    }
}

/// Limits applied while normalizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Upper bound on the total number of factors across all branches.
    pub max_factors: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { max_factors: 100_000 }
    }
}

/// Renames a factor, merging with a renaming already at its root.
fn rename_factor(phi: &Renaming, f: AraExpr) -> Result<AraExpr, AraError> {
    if phi.is_identity() {
        return Ok(f);
    }
    if let AraNode::Rename(psi, g) = f.node() {
        let merged = psi.then(phi)?;
        return if merged.is_identity() {
            Ok(g.clone())
        } else {
            AraExpr::rename(merged, g.clone())
        };
    }
    AraExpr::rename(phi.clone(), f)
}

/// Factor-wise rewrite with `⋈ f'_i ≡ π̂_A(σ_{A,B}(⋈ f_i))`.
pub fn push_proj_sel(a: &Attribute, b: &Attribute, factors: &[AraExpr]) -> Result<Vec<AraExpr>, NormalizeError> {
    if a == b || !a.is_compatible(b) {
        return Err(NormalizeError::Fragment(format!("{a} and {b} must be distinct and compatible")));
    }
    let covered = |x: &Attribute| factors.iter().any(|f| f.schema().contains(x));
    if !covered(a) || !covered(b) {
        return Err(NormalizeError::Fragment(format!("{a} and {b} must occur among the factors")));
    }
    let pair = RelationSchema::new([a.clone(), b.clone()]).expect("distinct names");
    factors
        .iter()
        .map(|f| {
            let s = f.schema();
            Ok(match (s.contains(a), s.contains(b)) {
                (false, _) => f.clone(),
                (true, false) => rename_factor(&Renaming::single(s, a, b).map_err(AraError::from)?, f.clone())?,
                (true, true) => AraExpr::project_away(a, AraExpr::select(pair.clone(), f.clone())?)?,
            })
        })
        .collect()
}

/// Merges overlapping selection sets, drops those of size ≤ 1 and sorts.
fn canonical_selections(sels: Vec<RelationSchema>) -> Vec<RelationSchema> {
    let mut merged: Vec<RelationSchema> = Vec::new();
    for y in sels {
        let mut cur = y;
        loop {
            let Some(i) = merged.iter().position(|m| !m.intersection(&cur).is_empty()) else { break };
            let m = merged.swap_remove(i);
            cur = cur.union(&m).expect("overlapping selections share a sort");
        }
        merged.push(cur);
    }
    merged.retain(|y| y.len() >= 2);
    merged.sort();
    merged
}

struct Normalizer {
    k: usize,
    opts: NormalizeOptions,
}

impl Normalizer {
    fn check(&self, nf: &NormalForm) -> Result<(), NormalizeError> {
        if nf.num_factors() > self.opts.max_factors {
            Err(NormalizeError::TooLarge {
                limit: self.opts.max_factors,
            })
        } else {
            Ok(())
        }
    }

    fn nf(&self, e: &AraExpr) -> Result<NormalForm, NormalizeError> {
        let out = match e.node() {
            AraNode::Rel(_) => NormalForm::single(e.clone()),
            AraNode::One(c) => {
                let inner = self.nf(c)?;
                let factors = inner.branches[0]
                    .factors
                    .iter()
                    .map(|f| match f.node() {
                        AraNode::One(_) => f.clone(),
                        _ => AraExpr::one(f.clone()),
                    })
                    .collect();
                NormalForm {
                    branches: vec![Branch {
                        selections: vec![],
                        factors,
                    }],
                }
            }
            AraNode::Union(a, b) => {
                let mut l = self.nf(a)?;
                l.branches.extend(self.nf(b)?.branches);
                l
            }
            AraNode::Join(a, b) => self.join(self.nf(a)?, self.nf(b)?)?,
            AraNode::Select(y, c) => {
                let mut inner = self.nf(c)?;
                for br in &mut inner.branches {
                    let mut sels = std::mem::take(&mut br.selections);
                    sels.push(y.clone());
                    br.selections = canonical_selections(sels);
                }
                inner
            }
            AraNode::Rename(phi, c) => {
                let inner = self.nf(c)?;
                let mut branches = Vec::with_capacity(inner.branches.len());
                for br in inner.branches {
                    let selections = canonical_selections(br.selections.iter().map(|y| phi.apply_set(y)).collect());
                    let factors = br
                        .factors
                        .into_iter()
                        .map(|f| {
                            let r = phi.restrict(f.schema());
                            rename_factor(&r, f)
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    branches.push(Branch { selections, factors });
                }
                NormalForm { branches }
            }
            AraNode::Project(y, c) => {
                let mut inner = self.nf(c)?;
                for a in c.schema().difference(y).iter() {
                    inner = NormalForm {
                        branches: inner
                            .branches
                            .into_iter()
                            .map(|br| self.project_away(br, a))
                            .collect::<Result<_, _>>()?,
                    };
                }
                inner
            }
            AraNode::Compose { attr, args, .. } => {
                let all = args
                    .iter()
                    .try_fold(RelationSchema::empty(), |acc, x| acc.union(x.schema()))
                    .map_err(AraError::from)?;
                if all.len() > self.k + 1 {
                    return Err(NormalizeError::Fragment(format!(
                        "composition arguments span {} > {} attributes",
                        all.len(),
                        self.k + 1
                    )));
                }
                let mut acc = self.nf(&args[0])?;
                for x in &args[1..] {
                    acc = self.join(acc, self.nf(x)?)?;
                }
                NormalForm {
                    branches: acc
                        .branches
                        .into_iter()
                        .map(|br| self.project_away(br, attr))
                        .collect::<Result<_, _>>()?,
                }
            }
        };
        self.check(&out)?;
        Ok(out)
    }

    fn join(&self, l: NormalForm, r: NormalForm) -> Result<NormalForm, NormalizeError> {
        let total = l.branches.len() * r.branches.len();
        let mut branches = Vec::with_capacity(total);
        for bl in &l.branches {
            for br in &r.branches {
                let mut sels = bl.selections.clone();
                sels.extend(br.selections.iter().cloned());
                let mut factors = bl.factors.clone();
                factors.extend(br.factors.iter().cloned());
                branches.push(Branch {
                    selections: canonical_selections(sels),
                    factors,
                });
                if branches.iter().map(|b| b.factors.len()).sum::<usize>() > self.opts.max_factors {
                    return Err(NormalizeError::TooLarge {
                        limit: self.opts.max_factors,
                    });
                }
            }
        }
        Ok(NormalForm { branches })
    }

    fn project_away(&self, br: Branch, a: &Attribute) -> Result<Branch, NormalizeError> {
        let Branch {
            mut selections,
            factors,
        } = br;
        if let Some(i) = selections.iter().position(|y| y.contains(a)) {
            let b = selections[i]
                .iter()
                .find(|x| *x != a)
                .cloned()
                .expect("selection sets have at least two members");
            let factors = push_proj_sel(a, &b, &factors)?;
            selections[i] = selections[i].without(a);
            return Ok(Branch {
                selections: canonical_selections(selections),
                factors,
            });
        }

        let (with_a, mut rest): (Vec<AraExpr>, Vec<AraExpr>) =
            factors.into_iter().partition(|f| f.schema().contains(a));
        let joined = with_a
            .iter()
            .try_fold(RelationSchema::empty(), |acc, f| acc.union(f.schema()))
            .map_err(AraError::from)?;
        let new_factor = if joined.len() <= self.k {
            AraExpr::project_away(a, AraExpr::join_all(with_a)?)?
        } else {
            self.compose_groups(a, &joined, with_a)?
        };
        rest.push(new_factor);
        Ok(Branch {
            selections,
            factors: rest,
        })
    }

    /// Groups factors by the smallest k-subset of `joined` containing `a`
    /// and their schema, then composes the groups on `a`.
    fn compose_groups(&self, a: &Attribute, joined: &RelationSchema, fs: Vec<AraExpr>) -> Result<AraExpr, NormalizeError> {
        if joined.len() != self.k + 1 {
            return Err(NormalizeError::Fragment(format!(
                "projection over {} attributes exceeds {}",
                joined.len(),
                self.k + 1
            )));
        }
        let mut subsets: Vec<RelationSchema> = joined.iter().filter(|x| *x != a).map(|x| joined.without(x)).collect();
        subsets.sort_by(|x, y| x.attrs().cmp(y.attrs()));
        let mut groups: Vec<Vec<AraExpr>> = vec![Vec::new(); subsets.len()];
        for f in fs {
            let i = subsets
                .iter()
                .position(|s| f.schema().is_subset(s))
                .ok_or_else(|| NormalizeError::Fragment(format!("factor {f} has more than {} attributes", self.k)))?;
            groups[i].push(f);
        }
        let args = groups
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(AraExpr::join_all)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AraExpr::compose(a.clone(), self.k, args)?)
    }
}

/// Normal form of an ARA(k+1) expression over a schema of arity ≤ k.
pub fn normalize(e: &AraExpr, db: &DatabaseSchema, k: usize, spec: &SemiringSpec) -> Result<NormalForm, NormalizeError> {
    normalize_with(e, db, k, spec, NormalizeOptions::default())
}

pub fn normalize_with(
    e: &AraExpr,
    db: &DatabaseSchema,
    k: usize,
    spec: &SemiringSpec,
    opts: NormalizeOptions,
) -> Result<NormalForm, NormalizeError> {
    if !spec.commutative {
        return Err(NormalizeError::NonCommutative(spec.name));
    }
    if k == 0 {
        return Err(NormalizeError::Fragment("k must be at least 1".into()));
    }
    if db.arity() > k {
        return Err(NormalizeError::Fragment(format!("database arity {} exceeds {k}", db.arity())));
    }
    crate::ara::infer_schema(e, db)?;
    let report = check_fragment(e, db, k + 1, true);
    if !report.is_ok() {
        return Err(NormalizeError::Fragment(report.to_string()));
    }
    Normalizer { k, opts }.nf(e)
}

/// An (ARA+ζk)(k) expression equivalent to `e`, which must have at most k
/// output attributes.
pub fn reduce_arity(e: &AraExpr, db: &DatabaseSchema, k: usize, spec: &SemiringSpec) -> Result<AraExpr, NormalizeError> {
    reduce_arity_with(e, db, k, spec, NormalizeOptions::default())
}

pub fn reduce_arity_with(
    e: &AraExpr,
    db: &DatabaseSchema,
    k: usize,
    spec: &SemiringSpec,
    opts: NormalizeOptions,
) -> Result<AraExpr, NormalizeError> {
    if e.schema().len() > k {
        return Err(NormalizeError::Fragment(format!(
            "output schema {} has more than {k} attributes",
            e.schema()
        )));
    }
    Ok(normalize_with(e, db, k, spec, opts)?.denote())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Mat2, Natural, Semiring};

    fn s(n: &str) -> Attribute {
        Attribute::new(n, "s")
    }

    fn set(names: &[&str]) -> RelationSchema {
        RelationSchema::new(names.iter().map(|n| s(n))).unwrap()
    }

    fn db() -> DatabaseSchema {
        DatabaseSchema::from_relations([("R", set(&["A", "B"])), ("S", set(&["B", "C"])), ("T", set(&["A", "C"]))]).unwrap()
    }

    #[test]
    fn selection_sets_merge_and_drop() {
        let c = canonical_selections(vec![set(&["A", "B"]), set(&["C"]), set(&["B", "C"]), set(&["D", "E"])]);
        assert_eq!(c, vec![set(&["A", "B", "C"]), set(&["D", "E"])]);
    }

    #[test]
    fn push_cases() {
        let d = db();
        let r = AraExpr::rel(&d, "R").unwrap();
        let t = AraExpr::rel(&d, "T").unwrap();
        let s_ = AraExpr::rel(&d, "S").unwrap();
        let out = push_proj_sel(&s("A"), &s("B"), &[r.clone(), s_.clone(), t.clone()]).unwrap();
        let expected0 = AraExpr::project_away(&s("A"), AraExpr::select(set(&["A", "B"]), r).unwrap()).unwrap();
        assert_eq!(out[0], expected0);
        assert_eq!(out[1], s_);
        assert_eq!(out[2], AraExpr::rename_some([(s("A"), s("B"))], t).unwrap());
        assert!(push_proj_sel(&s("A"), &s("A"), &out).is_err());
    }

    #[test]
    fn base_case_is_single_factor() {
        let d = db();
        let r = AraExpr::rel(&d, "R").unwrap();
        let nf = normalize(&r, &d, 2, &Natural::spec()).unwrap();
        assert_eq!(nf.branches.len(), 1);
        assert!(nf.branches[0].selections.is_empty());
        assert_eq!(nf.branches[0].factors, vec![r]);
    }

    #[test]
    fn refuses_noncommutative() {
        let d = db();
        let r = AraExpr::rel(&d, "R").unwrap();
        assert!(matches!(
            normalize(&r, &d, 2, &Mat2::spec()),
            Err(NormalizeError::NonCommutative("mat2"))
        ));
    }

    #[test]
    fn bare_join_projection_uses_composition() {
        let d = db();
        let j = AraExpr::join(AraExpr::rel(&d, "R").unwrap(), AraExpr::rel(&d, "T").unwrap()).unwrap();
        let e = AraExpr::project_away(&s("A"), j).unwrap();
        let out = reduce_arity(&e, &d, 2, &Natural::spec()).unwrap();
        assert!(matches!(out.node(), AraNode::Compose { .. }));
        assert!(check_fragment(&out, &d, 2, true).is_ok());
    }

    #[test]
    fn too_large_is_reported() {
        let d = db();
        let r = AraExpr::rel(&d, "R").unwrap();
        let mut u = AraExpr::union(r.clone(), r.clone()).unwrap();
        for _ in 0..6 {
            u = AraExpr::join(u.clone(), AraExpr::union(r.clone(), r.clone()).unwrap()).unwrap();
        }
        let opts = NormalizeOptions { max_factors: 50 };
        assert!(matches!(
            normalize_with(&u, &d, 2, &Natural::spec(), opts),
            Err(NormalizeError::TooLarge { limit: 50 })
        ));
    }
}
