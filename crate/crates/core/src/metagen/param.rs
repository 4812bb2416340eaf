//! Parameterizing a language by an extra context entry: every marked
//! constructor gains a parameter, every equation that mentions a marked
//! constructor gains it too, and every use of a marked constructor passes it
//! along.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{fresh_name, MetagenError};
use crate::kernel::{Ctx, Lang, Name, Rule, Sort, Term};
use crate::translate::{CaseOut, Compiler, CompilerCase};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSpec {
    pub param: Name,
    pub sort: Sort,
    pub marked: BTreeSet<Name>,
    /// Where the parameter goes in a rule's context; default 0.
    pub positions: BTreeMap<Name, usize>,
}

impl ParamSpec {
    pub fn new(param: impl Into<Name>, sort: Sort, marked: impl IntoIterator<Item = Name>) -> Self {
        ParamSpec { param: param.into(), sort, marked: marked.into_iter().collect(), positions: BTreeMap::new() }
    }

    pub fn position(&self, rule: &Name) -> usize {
        self.positions.get(rule).copied().unwrap_or(0)
    }

    fn gains_param(&self, name: &Name, rule: &Rule) -> bool {
        if rule.is_constructor() {
            self.marked.contains(name)
        } else {
            rule.mentioned_heads().iter().any(|h| self.marked.contains(h))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamIssue {
    /// An unmarked constructor mentions a marked one, so it would need the
    /// parameter without receiving it.
    UnmarkedUsesMarked { rule: Name, head: Name },
    BadSort(String),
    BadPosition { rule: Name, position: usize, len: usize },
}

impl fmt::Display for ParamIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamIssue::UnmarkedUsesMarked { rule, head } => {
                write!(f, "unmarked rule `{rule}` depends on marked constructor `{head}`")
            }
            ParamIssue::BadSort(msg) => write!(f, "parameter sort: {msg}"),
            ParamIssue::BadPosition { rule, position, len } => {
                write!(f, "position {position} for `{rule}` is outside its context of length {len}")
            }
        }
    }
}

/// Checks that `spec` can be applied to `lang`.
pub fn param_checks(lang: &Lang, spec: &ParamSpec) -> Vec<ParamIssue> {
    let mut issues = Vec::new();
    match lang.get(&spec.sort.head) {
        Some(Rule::Sort { .. }) => {}
        _ => issues.push(ParamIssue::BadSort(format!("`{}` is not a sort of the language", spec.sort.head))),
    }
    if !spec.sort.vars().is_empty() {
        issues.push(ParamIssue::BadSort(format!("{} must be closed", spec.sort)));
    }
    let mut heads = BTreeSet::new();
    spec.sort.collect_heads(&mut heads);
    for h in heads.intersection(&spec.marked) {
        issues.push(ParamIssue::BadSort(format!("{} mentions marked constructor `{h}`", spec.sort)));
    }
    for (name, rule) in lang.iter() {
        if rule.is_constructor() && !spec.marked.contains(name) {
            for h in rule.mentioned_heads() {
                if spec.marked.contains(&h) {
                    issues.push(ParamIssue::UnmarkedUsesMarked { rule: name.clone(), head: h });
                }
            }
        }
        if spec.gains_param(name, rule) {
            let (position, len) = (spec.position(name), rule.ctx().len());
            if position > len {
                issues.push(ParamIssue::BadPosition { rule: name.clone(), position, len });
            }
        }
    }
    issues
}

/// Passes `param` to every marked head in `t`, at that head's position.
struct Threader<'a> {
    spec: &'a ParamSpec,
    param: Term,
}

impl Threader<'_> {
    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::Con(h, args) => Term::Con(h.clone(), self.args(h, args)),
        }
    }

    fn args(&self, h: &Name, args: &[Term]) -> Vec<Term> {
        let mut out: Vec<Term> = args.iter().map(|a| self.term(a)).collect();
        if self.spec.marked.contains(h) {
            out.insert(self.spec.position(h).min(out.len()), self.param.clone());
        }
        out
    }

    fn sort(&self, s: &Sort) -> Sort {
        Sort::new(s.head.clone(), self.args(&s.head, &s.args))
    }

    fn ctx(&self, c: &Ctx) -> Ctx {
        c.map_sorts(|s| self.sort(s))
    }
}

/// Applies `spec`; fails with the first issue `param_checks` reports.
pub fn parameterize_lang(lang: &Lang, spec: &ParamSpec) -> Result<Lang, MetagenError> {
    if let Some(issue) = param_checks(lang, spec).into_iter().next() {
        return Err(MetagenError::Param(issue.to_string()));
    }
    let mut out = Lang::new();
    for (name, rule) in lang.iter() {
        if !spec.gains_param(name, rule) {
            out.push(name.clone(), rule.clone()).expect("names are distinct");
            continue;
        }
        let x = if rule.ctx().contains(&spec.param) { fresh_name(spec.param.as_str(), rule.ctx()) } else { spec.param.clone() };
        let th = Threader { spec, param: Term::Var(x.clone()) };
        let mut ctx = th.ctx(rule.ctx());
        ctx.insert(spec.position(name), x, spec.sort.clone());
        let new = match rule {
            Rule::Sort { explicit, .. } => Rule::Sort { ctx, explicit: explicit.clone() },
            Rule::Term { explicit, sort, .. } => Rule::Term { ctx, explicit: explicit.clone(), sort: th.sort(sort) },
            Rule::TermEq { lhs, rhs, sort, .. } => Rule::TermEq { ctx, lhs: th.term(lhs), rhs: th.term(rhs), sort: th.sort(sort) },
            Rule::SortEq { lhs, rhs, .. } => Rule::SortEq { ctx, lhs: th.sort(lhs), rhs: th.sort(rhs) },
        };
        out.push(name.clone(), new).expect("names are distinct");
    }
    Ok(out)
}

/// Parameterizes a compiler between two languages parameterized by the same
/// spec: each marked source case receives the parameter and passes it to the
/// marked target constructors in its output.
pub fn parameterize_compiler(cmp: &Compiler, source: &Lang, spec: &ParamSpec) -> Result<Compiler, MetagenError> {
    let mut out = Compiler::new();
    for (name, case) in cmp.iter() {
        let rule = source.get(name).ok_or_else(|| MetagenError::UnknownRule(name.clone()))?;
        let mut params = case.params.clone();
        let x = if spec.marked.contains(name) {
            let taken = Ctx::from_entries(params.iter().map(|p| (p.clone(), spec.sort.clone())).collect());
            let x = if taken.contains(&spec.param) { fresh_name(spec.param.as_str(), &taken) } else { spec.param.clone() };
            params.insert(spec.position(name).min(params.len()), x.clone());
            Some(x)
        } else {
            None
        };
        let mut heads = BTreeSet::new();
        match &case.out {
            CaseOut::Sort(s) => s.collect_heads(&mut heads),
            CaseOut::Term(t) => t.collect_heads(&mut heads),
        }
        let needs = heads.iter().find(|h| spec.marked.contains(*h));
        let th = match (&x, needs) {
            (Some(x), _) => Threader { spec, param: Term::Var(x.clone()) },
            (None, Some(h)) => {
                return Err(MetagenError::Param(format!(
                    "case `{name}` is unmarked ({}) but its output uses marked `{h}`",
                    rule.kind().as_str()
                )))
            }
            (None, None) => {
                out.push(name.clone(), case.clone()).map_err(|e| MetagenError::Param(e.to_string()))?;
                continue;
            }
        };
        let new_out = match &case.out {
            CaseOut::Sort(s) => CaseOut::Sort(th.sort(s)),
            CaseOut::Term(t) => CaseOut::Term(th.term(t)),
        };
        out.push(name.clone(), CompilerCase { params, out: new_out }).map_err(|e| MetagenError::Param(e.to_string()))?;
    }
    Ok(out)
}
