use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

use super::{Ctx, KernelError, MetaSubst, Name, Sort, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Sort,
    Term,
    SortEq,
    TermEq,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Sort => "sort",
            RuleKind::Term => "term",
            RuleKind::SortEq => "sort_eq",
            RuleKind::TermEq => "term_eq",
        }
    }
}

/// One of the four rule forms of a theory.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Rule {
    Sort { ctx: Ctx, explicit: Vec<Name> },
    Term { ctx: Ctx, explicit: Vec<Name>, sort: Sort },
    SortEq { ctx: Ctx, lhs: Sort, rhs: Sort },
    TermEq { ctx: Ctx, lhs: Term, rhs: Term, sort: Sort },
}

impl Rule {
    pub fn kind(&self) -> RuleKind {
        match self {
            Rule::Sort { .. } => RuleKind::Sort,
            Rule::Term { .. } => RuleKind::Term,
            Rule::SortEq { .. } => RuleKind::SortEq,
            Rule::TermEq { .. } => RuleKind::TermEq,
        }
    }

    pub fn ctx(&self) -> &Ctx {
        match self {
            Rule::Sort { ctx, .. }
            | Rule::Term { ctx, .. }
            | Rule::SortEq { ctx, .. }
            | Rule::TermEq { ctx, .. } => ctx,
        }
    }

    pub fn explicit(&self) -> &[Name] {
        match self {
            Rule::Sort { explicit, .. } | Rule::Term { explicit, .. } => explicit,
            _ => &[],
        }
    }

    /// True for sort and term formers, i.e. rules that introduce a head symbol.
    pub fn is_constructor(&self) -> bool {
        matches!(self, Rule::Sort { .. } | Rule::Term { .. })
    }

    pub fn is_equation(&self) -> bool {
        !self.is_constructor()
    }

    /// Positions (into the ctx) of the explicit arguments.
    pub fn explicit_positions(&self) -> Vec<usize> {
        let ctx = self.ctx();
        self.explicit().iter().filter_map(|x| ctx.position(x)).collect()
    }

    /// Every head symbol the rule mentions, in sorts and terms alike.
    pub fn mentioned_heads(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for (_, s) in self.ctx().iter() {
            s.collect_heads(&mut out);
        }
        match self {
            Rule::Sort { .. } => {}
            Rule::Term { sort, .. } => sort.collect_heads(&mut out),
            Rule::SortEq { lhs, rhs, .. } => {
                lhs.collect_heads(&mut out);
                rhs.collect_heads(&mut out);
            }
            Rule::TermEq { lhs, rhs, sort, .. } => {
                lhs.collect_heads(&mut out);
                rhs.collect_heads(&mut out);
                sort.collect_heads(&mut out);
            }
        }
        out
    }

    /// Renames ctx entries throughout the rule. Names missing from `renaming` stay.
    pub fn rename_vars(&self, renaming: &MetaSubst) -> Rule {
        let ren = |x: &Name| match renaming.get(x) {
            Some(Term::Var(y)) => y.clone(),
            _ => x.clone(),
        };
        let ctx = Ctx::from_entries(self.ctx().iter().map(|(n, s)| (ren(n), s.subst(renaming))).collect());
        let explicit: Vec<Name> = self.explicit().iter().map(ren).collect();
        match self {
            Rule::Sort { .. } => Rule::Sort { ctx, explicit },
            Rule::Term { sort, .. } => Rule::Term { ctx, explicit, sort: sort.subst(renaming) },
            Rule::SortEq { lhs, rhs, .. } => Rule::SortEq { ctx, lhs: lhs.subst(renaming), rhs: rhs.subst(renaming) },
            Rule::TermEq { lhs, rhs, sort, .. } => Rule::TermEq {
                ctx,
                lhs: lhs.subst(renaming),
                rhs: rhs.subst(renaming),
                sort: sort.subst(renaming),
            },
        }
    }

    /// Same rule with ctx entries renamed positionally; two rules are equal up
    /// to naming iff their canonical forms are equal.
    pub fn canonical(&self) -> Rule {
        let renaming: MetaSubst = self
            .ctx()
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), Term::Var(Name::new(format!("#{i}")))))
            .collect();
        self.rename_vars(&renaming)
    }
}

/// Structural rule equality up to a consistent renaming of ctx variables.
pub fn rule_alpha_eq(a: &Rule, b: &Rule) -> bool {
    a.ctx().len() == b.ctx().len() && a.canonical() == b.canonical()
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let explicit = |f: &mut fmt::Formatter<'_>, xs: &[Name]| -> fmt::Result {
            write!(f, " (args")?;
            for x in xs {
                write!(f, " {x}")?;
            }
            write!(f, ")")
        };
        match self {
            Rule::Sort { ctx, explicit: xs } => {
                write!(f, "sort {ctx}")?;
                explicit(f, xs)
            }
            Rule::Term { ctx, explicit: xs, sort } => {
                write!(f, "term {ctx}")?;
                explicit(f, xs)?;
                write!(f, " {sort}")
            }
            Rule::SortEq { ctx, lhs, rhs } => write!(f, "sort_eq {ctx} {lhs} = {rhs}"),
            Rule::TermEq { ctx, lhs, rhs, sort } => write!(f, "eq {ctx} {lhs} = {rhs} : {sort}"),
        }
    }
}

/// An ordered, name-keyed rule list, oldest first.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Lang {
    rules: IndexMap<Name, Rule>,
}

impl Lang {
    pub fn new() -> Self {
        Lang::default()
    }

    pub fn from_rules(rules: impl IntoIterator<Item = (Name, Rule)>) -> Result<Self, KernelError> {
        let mut lang = Lang::new();
        for (n, r) in rules {
            lang.push(n, r)?;
        }
        Ok(lang)
    }

    pub fn push(&mut self, name: impl Into<Name>, rule: Rule) -> Result<(), KernelError> {
        let name = name.into();
        if self.rules.contains_key(&name) {
            return Err(KernelError::DuplicateName(name));
        }
        self.rules.insert(name, rule);
        Ok(())
    }

    /// Base rules first, then the extension's. Names must be disjoint.
    pub fn append(&self, ext: &Lang) -> Result<Lang, KernelError> {
        let mut out = self.clone();
        for (n, r) in ext.iter() {
            out.push(n.clone(), r.clone())?;
        }
        Ok(out)
    }

    /// Like `append`, but rules already present with an identical definition
    /// are skipped. Used when assembling a language from overlapping imports.
    pub fn union(&self, ext: &Lang) -> Result<Lang, KernelError> {
        let mut out = self.clone();
        for (n, r) in ext.iter() {
            match out.get(n) {
                Some(existing) if existing == r => {}
                Some(_) => return Err(KernelError::ConflictingRule(n.clone())),
                None => out.push(n.clone(), r.clone())?,
            }
        }
        Ok(out)
    }

    /// Unordered inclusion: every named rule of `self` occurs identically in `other`.
    pub fn is_subset_of(&self, other: &Lang) -> bool {
        self.rules.iter().all(|(n, r)| other.get(n) == Some(r))
    }

    pub fn get(&self, name: &Name) -> Option<&Rule> {
        self.rules.get(name)
    }

    pub fn get_str(&self, name: &str) -> Option<&Rule> {
        self.rules.get(&Name::new(name))
    }

    pub fn index_of(&self, name: &Name) -> Option<usize> {
        self.rules.get_index_of(name)
    }

    pub fn get_index(&self, i: usize) -> Option<(&Name, &Rule)> {
        self.rules.get_index(i)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.rules.contains_key(name)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Name, &Rule)> + ExactSizeIterator {
        self.rules.iter()
    }

    pub fn names(&self) -> Vec<Name> {
        self.rules.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// The first `n` rules.
    pub fn prefix(&self, n: usize) -> Lang {
        Lang {
            rules: self.rules.iter().take(n).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Rules of `self` whose names are absent from `base`, in order.
    pub fn difference(&self, base: &Lang) -> Lang {
        Lang {
            rules: self
                .rules
                .iter()
                .filter(|(n, _)| !base.contains(n))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn constructors(&self) -> impl Iterator<Item = (&Name, &Rule)> {
        self.rules.iter().filter(|(_, r)| r.is_constructor())
    }

    pub fn equations(&self) -> impl Iterator<Item = (&Name, &Rule)> {
        self.rules.iter().filter(|(_, r)| r.is_equation())
    }

    /// Replaces the definition of an existing rule, keeping its position.
    pub fn replace(&mut self, name: &Name, rule: Rule) -> Result<(), KernelError> {
        match self.rules.get_mut(name) {
            Some(slot) => {
                *slot = rule;
                Ok(())
            }
            None => Err(KernelError::UnknownRule(name.clone())),
        }
    }
}

impl fmt::Debug for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rules.keys()).finish()
    }
}

impl FromIterator<(Name, Rule)> for Lang {
    /// Later duplicates overwrite earlier ones; use `from_rules` to reject them.
    fn from_iter<I: IntoIterator<Item = (Name, Rule)>>(iter: I) -> Self {
        Lang { rules: iter.into_iter().collect() }
    }
}
