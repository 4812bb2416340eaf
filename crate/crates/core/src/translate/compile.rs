use std::fmt;

use indexmap::IndexMap;

use super::TranslateError;
use crate::kernel::{Ctx, Lang, MetaSubst, Name, Rule, Sort, Term};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CaseOut {
    Sort(Sort),
    Term(Term),
}

impl fmt::Display for CaseOut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseOut::Sort(s) => write!(f, "{s}"),
            CaseOut::Term(t) => write!(f, "{t}"),
        }
    }
}

impl fmt::Debug for CaseOut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Output of one constructor, over the constructor's full ctx names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompilerCase {
    pub params: Vec<Name>,
    pub out: CaseOut,
}

impl CompilerCase {
    pub fn term(params: Vec<Name>, out: Term) -> Self {
        CompilerCase { params, out: CaseOut::Term(out) }
    }

    pub fn sort(params: Vec<Name>, out: Sort) -> Self {
        CompilerCase { params, out: CaseOut::Sort(out) }
    }
}

/// An ordered map from source constructor names to cases.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Compiler {
    cases: IndexMap<Name, CompilerCase>,
}

impl fmt::Debug for Compiler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.cases.iter().map(|(n, c)| (n, &c.out))).finish()
    }
}

impl Compiler {
    pub fn new() -> Self {
        Compiler::default()
    }

    pub fn push(&mut self, name: impl Into<Name>, case: CompilerCase) -> Result<(), TranslateError> {
        let name = name.into();
        if self.cases.contains_key(&name) {
            return Err(TranslateError::DuplicateCase(name));
        }
        self.cases.insert(name, case);
        Ok(())
    }

    pub fn get(&self, name: &Name) -> Option<&CompilerCase> {
        self.cases.get(name)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.cases.contains_key(name)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Name, &CompilerCase)> + ExactSizeIterator {
        self.cases.iter()
    }

    pub fn names(&self) -> Vec<Name> {
        self.cases.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// Cases of `self` followed by those of `ext`; overwriting is an error.
    pub fn concat(&self, ext: &Compiler) -> Result<Compiler, TranslateError> {
        let mut out = self.clone();
        for (n, c) in ext.iter() {
            out.push(n.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// Restricts to the named cases, keeping order.
    pub fn restrict(&self, keep: impl Fn(&Name) -> bool) -> Compiler {
        Compiler { cases: self.cases.iter().filter(|(n, _)| keep(n)).map(|(n, c)| (n.clone(), c.clone())).collect() }
    }

    fn case_subst(&self, head: &Name, case: &CompilerCase, args: &[Term]) -> Result<MetaSubst, TranslateError> {
        if case.params.len() != args.len() {
            return Err(TranslateError::CaseArity { head: head.clone(), expected: case.params.len(), got: args.len() });
        }
        let compiled = args.iter().map(|a| self.compile_term(a)).collect::<Result<Vec<_>, _>>()?;
        Ok(MetaSubst::zip(&case.params, &compiled))
    }

    pub fn compile_term(&self, t: &Term) -> Result<Term, TranslateError> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::Con(h, args) => {
                let case = self.get(h).ok_or_else(|| TranslateError::MissingCase(h.clone()))?;
                let CaseOut::Term(out) = &case.out else { return Err(TranslateError::WrongCaseKind(h.clone())) };
                Ok(out.subst(&self.case_subst(h, case, args)?))
            }
        }
    }

    pub fn compile_sort(&self, s: &Sort) -> Result<Sort, TranslateError> {
        let case = self.get(&s.head).ok_or_else(|| TranslateError::MissingCase(s.head.clone()))?;
        let CaseOut::Sort(out) = &case.out else { return Err(TranslateError::WrongCaseKind(s.head.clone())) };
        Ok(out.subst(&self.case_subst(&s.head, case, &s.args)?))
    }

    pub fn compile_ctx(&self, c: &Ctx) -> Result<Ctx, TranslateError> {
        let entries = c.iter().map(|(n, s)| Ok((n.clone(), self.compile_sort(s)?))).collect::<Result<Vec<_>, TranslateError>>()?;
        Ok(Ctx::from_entries(entries))
    }

    pub fn compile_subst(&self, g: &MetaSubst) -> Result<MetaSubst, TranslateError> {
        g.try_map_terms(|t| self.compile_term(t))
    }
}

/// Maps every constructor of `lang` to itself.
pub fn id_compiler(lang: &Lang) -> Compiler {
    let mut out = Compiler::new();
    for (name, rule) in lang.constructors() {
        let params = rule.ctx().names();
        let args: Vec<Term> = params.iter().cloned().map(Term::Var).collect();
        let case = match rule {
            Rule::Sort { .. } => CompilerCase::sort(params, Sort::new(name.clone(), args)),
            _ => CompilerCase::term(params, Term::Con(name.clone(), args)),
        };
        out.push(name.clone(), case).expect("language names are distinct");
    }
    out
}

/// Vertical composition: each case of `f` compiled through `g`.
pub fn vcompose(g: &Compiler, f: &Compiler) -> Result<Compiler, TranslateError> {
    let mut out = Compiler::new();
    for (name, case) in f.iter() {
        let compiled = match &case.out {
            CaseOut::Sort(s) => CaseOut::Sort(g.compile_sort(s)?),
            CaseOut::Term(t) => CaseOut::Term(g.compile_term(t)?),
        };
        out.push(name.clone(), CompilerCase { params: case.params.clone(), out: compiled })?;
    }
    Ok(out)
}
