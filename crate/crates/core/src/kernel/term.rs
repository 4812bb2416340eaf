use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Name;

/// A first-order term: a metavariable or a constructor applied to all of
/// its arguments (implicit ones included, in the constructor's context order).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Con(Name, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Self {
        Term::Var(name.into())
    }

    pub fn con(head: impl Into<Name>, args: Vec<Term>) -> Self {
        Term::Con(head.into(), args)
    }

    pub fn constant(head: impl Into<Name>) -> Self {
        Term::Con(head.into(), Vec::new())
    }

    pub fn head(&self) -> Option<&Name> {
        match self {
            Term::Con(h, _) => Some(h),
            Term::Var(_) => None,
        }
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Term::Var(x) => Some(x),
            Term::Con(..) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Con(_, args) => args,
            Term::Var(_) => &[],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Con(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Con(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Con(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_heads(&self, out: &mut BTreeSet<Name>) {
        if let Term::Con(h, args) = self {
            out.insert(h.clone());
            args.iter().for_each(|a| a.collect_heads(out));
        }
    }

    pub fn mentions_var(&self, x: &Name) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Con(_, args) => args.iter().any(|a| a.mentions_var(x)),
        }
    }

    /// Replaces metavariables by their images; unmapped variables are kept.
    pub fn subst(&self, gamma: &MetaSubst) -> Term {
        match self {
            Term::Var(x) => gamma.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Con(h, args) => Term::Con(h.clone(), args.iter().map(|a| a.subst(gamma)).collect()),
        }
    }

    /// Subterm at a path of argument indices.
    pub fn at_path(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.args().get(*i)?.at_path(rest),
        }
    }

    /// Rebuilds the term with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Option<Term> {
        match path.split_first() {
            None => Some(new),
            Some((i, rest)) => match self {
                Term::Con(h, args) if *i < args.len() => {
                    let mut args = args.clone();
                    args[*i] = args[*i].replace_at(rest, new)?;
                    Some(Term::Con(h.clone(), args))
                }
                _ => None,
            },
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Con(h, args) => {
                write!(f, "({h}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A sort: a sort constructor applied to term arguments. Sorts are never variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort {
    pub head: Name,
    pub args: Vec<Term>,
}

impl Sort {
    pub fn new(head: impl Into<Name>, args: Vec<Term>) -> Self {
        Sort { head: head.into(), args }
    }

    pub fn constant(head: impl Into<Name>) -> Self {
        Sort::new(head, Vec::new())
    }

    pub fn subst(&self, gamma: &MetaSubst) -> Sort {
        Sort {
            head: self.head.clone(),
            args: self.args.iter().map(|a| a.subst(gamma)).collect(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_heads(&self, out: &mut BTreeSet<Name>) {
        out.insert(self.head.clone());
        self.args.iter().for_each(|a| a.collect_heads(out));
    }

    /// Views the sort as a term with the same head; handy for generic tree code.
    pub fn as_term(&self) -> Term {
        Term::Con(self.head.clone(), self.args.clone())
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_term())
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Metavariable context, oldest entry first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ctx {
    entries: Vec<(Name, Sort)>,
}

impl Ctx {
    pub fn new() -> Self {
        Ctx::default()
    }

    pub fn from_entries(entries: Vec<(Name, Sort)>) -> Self {
        Ctx { entries }
    }

    pub fn push(&mut self, name: impl Into<Name>, sort: Sort) {
        self.entries.push((name.into(), sort));
    }

    pub fn with(mut self, name: impl Into<Name>, sort: Sort) -> Self {
        self.push(name, sort);
        self
    }

    pub fn insert(&mut self, index: usize, name: impl Into<Name>, sort: Sort) {
        self.entries.insert(index, (name.into(), sort));
    }

    pub fn get(&self, name: &Name) -> Option<&Sort> {
        self.entries.iter().rev().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn position(&self, name: &Name) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn entries(&self) -> &[(Name, Sort)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Sort)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn subst(&self, gamma: &MetaSubst) -> Ctx {
        Ctx {
            entries: self.entries.iter().map(|(n, s)| (n.clone(), s.subst(gamma))).collect(),
        }
    }

    pub fn map_sorts(&self, mut f: impl FnMut(&Sort) -> Sort) -> Ctx {
        Ctx {
            entries: self.entries.iter().map(|(n, s)| (n.clone(), f(s))).collect(),
        }
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(ctx")?;
        for (n, s) in &self.entries {
            write!(f, " ({n} {s})")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite map from metavariable names to terms.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MetaSubst(BTreeMap<Name, Term>);

impl MetaSubst {
    pub fn new() -> Self {
        MetaSubst::default()
    }

    pub fn singleton(name: impl Into<Name>, t: Term) -> Self {
        let mut g = MetaSubst::new();
        g.insert(name, t);
        g
    }

    /// Pairs names with terms positionally; extra elements on either side are ignored.
    pub fn zip(names: &[Name], terms: &[Term]) -> Self {
        MetaSubst(names.iter().cloned().zip(terms.iter().cloned()).collect())
    }

    pub fn insert(&mut self, name: impl Into<Name>, t: Term) -> Option<Term> {
        self.0.insert(name.into(), t)
    }

    pub fn get(&self, name: &Name) -> Option<&Term> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    /// `self ∘ other`: maps x to `self(other(x))`, and keeps `self`'s entries
    /// for names outside `other`'s domain.
    pub fn compose(&self, other: &MetaSubst) -> MetaSubst {
        let mut out: BTreeMap<Name, Term> =
            other.0.iter().map(|(x, t)| (x.clone(), t.subst(self))).collect();
        for (x, t) in &self.0 {
            out.entry(x.clone()).or_insert_with(|| t.clone());
        }
        MetaSubst(out)
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> MetaSubst {
        MetaSubst(self.0.iter().map(|(x, t)| (x.clone(), f(t))).collect())
    }

    pub fn try_map_terms<E>(&self, mut f: impl FnMut(&Term) -> Result<Term, E>) -> Result<MetaSubst, E> {
        let mut out = BTreeMap::new();
        for (x, t) in &self.0 {
            out.insert(x.clone(), f(t)?);
        }
        Ok(MetaSubst(out))
    }
}

impl FromIterator<(Name, Term)> for MetaSubst {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Self {
        MetaSubst(iter.into_iter().collect())
    }
}

impl fmt::Debug for MetaSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

/// Anything metavariable substitution acts on homomorphically.
pub trait Substitutable {
    fn apply(&self, gamma: &MetaSubst) -> Self;
}

impl Substitutable for Term {
    fn apply(&self, gamma: &MetaSubst) -> Self {
        self.subst(gamma)
    }
}

impl Substitutable for Sort {
    fn apply(&self, gamma: &MetaSubst) -> Self {
        self.subst(gamma)
    }
}

impl Substitutable for Ctx {
    fn apply(&self, gamma: &MetaSubst) -> Self {
        self.subst(gamma)
    }
}

pub fn apply_subst<T: Substitutable>(gamma: &MetaSubst, t: &T) -> T {
    t.apply(gamma)
}

pub fn structural_eq(a: &Term, b: &Term) -> bool {
    a == b
}
