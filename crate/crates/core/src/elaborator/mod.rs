//! Well-formedness checking and elaboration of surface terms.

mod unify;

use std::fmt;

use serde::Serialize;

use crate::kernel::{Ctx, Lang, MetaSubst, Name, Rule, Sort, Term};
use crate::proofkit::SortEqProof;
use crate::rewrite::{RewriteConfig, Rewriter};

pub use unify::{elaborate, elaborate_sort, erase, CalculusNames, Elaborator, Macro, Macros, SurfaceTerm, WEAKEN};

/// Fuel for sort conversion during checking.
pub const CONVERSION_FUEL: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElabError {
    #[error("unknown head `{0}`")]
    UnknownHead(Name),
    #[error("unbound metavariable `{0}`")]
    UnboundVar(Name),
    #[error("`{head}` takes {expected} arguments, got {got}")]
    ArityMismatch { head: Name, expected: usize, got: usize },
    #[error("`{0}` is not a term former")]
    NotATerm(Name),
    #[error("`{0}` is not a sort former")]
    NotASort(Name),
    #[error("sort mismatch: expected {expected}, got {got}")]
    SortMismatch { expected: Sort, got: Sort },
    #[error("could not infer implicit arguments: {}", join_names(.0))]
    UnsolvedImplicit(Vec<Name>),
    #[error("context entry `{0}` is declared twice")]
    DuplicateEntry(Name),
    #[error("explicit argument `{0}` is not in the rule context or is out of order")]
    BadExplicit(Name),
    #[error("{0}")]
    Macro(String),
}

fn join_names(ns: &[Name]) -> String {
    ns.iter().map(Name::as_str).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// A sort conversion performed while checking, with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub location: String,
    pub from: Sort,
    pub to: Sort,
    pub proof: SortEqProof,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WfReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub conversions: Vec<Conversion>,
}

impl WfReport {
    fn from_parts(diagnostics: Vec<Diagnostic>, conversions: Vec<Conversion>) -> Self {
        WfReport { ok: diagnostics.is_empty(), diagnostics, conversions }
    }
}

/// Type checker over a fixed language. Records every sort conversion it
/// performs so callers can audit them.
pub struct Checker<'a> {
    lang: &'a Lang,
    fuel: usize,
    conversions: Vec<(Sort, Sort, SortEqProof)>,
}

impl<'a> Checker<'a> {
    pub fn new(lang: &'a Lang) -> Self {
        Checker { lang, fuel: CONVERSION_FUEL, conversions: Vec::new() }
    }

    pub fn with_fuel(mut self, fuel: usize) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn lang(&self) -> &'a Lang {
        self.lang
    }

    pub fn take_conversions(&mut self) -> Vec<(Sort, Sort, SortEqProof)> {
        std::mem::take(&mut self.conversions)
    }

    fn term_rule(&self, head: &Name) -> Result<(&'a Ctx, &'a Sort), ElabError> {
        match self.lang.get(head) {
            Some(Rule::Term { ctx, sort, .. }) => Ok((ctx, sort)),
            Some(_) => Err(ElabError::NotATerm(head.clone())),
            None => Err(ElabError::UnknownHead(head.clone())),
        }
    }

    fn sort_rule(&self, head: &Name) -> Result<&'a Ctx, ElabError> {
        match self.lang.get(head) {
            Some(Rule::Sort { ctx, .. }) => Ok(ctx),
            Some(_) => Err(ElabError::NotASort(head.clone())),
            None => Err(ElabError::UnknownHead(head.clone())),
        }
    }

    /// Checks `args` against a constructor ctx and returns the instantiation.
    fn check_args(&mut self, ctx: &Ctx, head: &Name, rctx: &Ctx, args: &[Term]) -> Result<MetaSubst, ElabError> {
        if args.len() != rctx.len() {
            return Err(ElabError::ArityMismatch { head: head.clone(), expected: rctx.len(), got: args.len() });
        }
        let gamma = MetaSubst::zip(&rctx.names(), args);
        for ((_, xsort), arg) in rctx.iter().zip(args) {
            self.check_term(ctx, arg, &xsort.subst(&gamma))?;
        }
        Ok(gamma)
    }

    /// Synthesizes the sort of a fully elaborated term.
    pub fn infer_sort(&mut self, ctx: &Ctx, t: &Term) -> Result<Sort, ElabError> {
        match t {
            Term::Var(x) => ctx.get(x).cloned().ok_or_else(|| ElabError::UnboundVar(x.clone())),
            Term::Con(head, args) => {
                let (rctx, sort) = self.term_rule(head)?;
                let gamma = self.check_args(ctx, head, rctx, args)?;
                Ok(sort.subst(&gamma))
            }
        }
    }

    /// Checks `t` against `expected`, falling back to conversion when the
    /// synthesized sort differs syntactically. Returns the conversion
    /// certificate if one was needed.
    pub fn check_term(&mut self, ctx: &Ctx, t: &Term, expected: &Sort) -> Result<Option<SortEqProof>, ElabError> {
        let got = self.infer_sort(ctx, t)?;
        if &got == expected {
            return Ok(None);
        }
        let proof = self.convert(ctx, &got, expected)?;
        Ok(Some(proof))
    }

    /// Finds a derivable equality between two sorts by normalizing both.
    pub fn convert(&mut self, ctx: &Ctx, from: &Sort, to: &Sort) -> Result<SortEqProof, ElabError> {
        let mismatch = || ElabError::SortMismatch { expected: to.clone(), got: from.clone() };
        if from.head != to.head || from.args.len() != to.args.len() {
            if !self.lang.iter().any(|(_, r)| matches!(r, Rule::SortEq { .. })) {
                return Err(mismatch());
            }
        }
        let cfg = RewriteConfig { fuel: self.fuel, verify: false, ..RewriteConfig::default() };
        let rw = Rewriter::new(self.lang, cfg);
        let proof = rw.convert_sorts(ctx, from, to).ok_or_else(mismatch)?;
        self.conversions.push((from.clone(), to.clone(), proof.clone()));
        Ok(proof)
    }

    pub fn check_sort(&mut self, ctx: &Ctx, s: &Sort) -> Result<(), ElabError> {
        let rctx = self.sort_rule(&s.head)?;
        self.check_args(ctx, &s.head, rctx, &s.args)?;
        Ok(())
    }

    /// Checks that entries are distinct and each sort is well formed under
    /// the entries before it.
    pub fn check_ctx(&mut self, ctx: &Ctx) -> Result<(), ElabError> {
        let mut prefix = Ctx::new();
        for (x, s) in ctx.iter() {
            if prefix.contains(x) {
                return Err(ElabError::DuplicateEntry(x.clone()));
            }
            self.check_sort(&prefix, s)?;
            prefix.push(x.clone(), s.clone());
        }
        Ok(())
    }

    /// Checks a single rule against the checker's language (its prefix).
    pub fn check_rule(&mut self, rule: &Rule) -> Result<(), ElabError> {
        let ctx = rule.ctx();
        self.check_ctx(ctx)?;
        let mut last = None;
        for x in rule.explicit() {
            match ctx.position(x) {
                Some(i) if last.map_or(true, |l| i > l) => last = Some(i),
                _ => return Err(ElabError::BadExplicit(x.clone())),
            }
        }
        match rule {
            Rule::Sort { .. } => Ok(()),
            Rule::Term { sort, .. } => self.check_sort(ctx, sort),
            Rule::SortEq { lhs, rhs, .. } => {
                self.check_sort(ctx, lhs)?;
                self.check_sort(ctx, rhs)
            }
            Rule::TermEq { lhs, rhs, sort, .. } => {
                self.check_sort(ctx, sort)?;
                self.check_term(ctx, lhs, sort)?;
                self.check_term(ctx, rhs, sort)?;
                Ok(())
            }
        }
    }
}

fn report_of<T>(r: Result<T, ElabError>, location: &str, checker: &mut Checker<'_>) -> WfReport {
    let conversions = checker
        .take_conversions()
        .into_iter()
        .map(|(from, to, proof)| Conversion { location: location.to_string(), from, to, proof })
        .collect();
    let diagnostics = match r {
        Ok(_) => Vec::new(),
        Err(e) => vec![Diagnostic { location: location.to_string(), message: e.to_string() }],
    };
    WfReport::from_parts(diagnostics, conversions)
}

/// Checks every rule under the strict prefix before it.
pub fn wf_lang(lang: &Lang) -> WfReport {
    wf_extension(lang, 0)
}

/// Like `wf_lang`, but trusts the first `from` rules.
pub fn wf_extension(lang: &Lang, from: usize) -> WfReport {
    let mut diagnostics = Vec::new();
    let mut conversions = Vec::new();
    for i in from..lang.len() {
        let (name, rule) = lang.get_index(i).expect("index in range");
        let prefix = lang.prefix(i);
        let mut checker = Checker::new(&prefix);
        let r = checker.check_rule(rule);
        let rep = report_of(r, &format!("rule `{name}`"), &mut checker);
        diagnostics.extend(rep.diagnostics);
        conversions.extend(rep.conversions);
    }
    WfReport::from_parts(diagnostics, conversions)
}

pub fn check_term(lang: &Lang, ctx: &Ctx, t: &Term, s: &Sort) -> WfReport {
    let mut checker = Checker::new(lang);
    let r = checker.check_term(ctx, t, s);
    report_of(r, &format!("term {t}"), &mut checker)
}

pub fn check_sort(lang: &Lang, ctx: &Ctx, s: &Sort) -> WfReport {
    let mut checker = Checker::new(lang);
    let r = checker.check_sort(ctx, s);
    report_of(r, &format!("sort {s}"), &mut checker)
}

pub fn infer_sort(lang: &Lang, ctx: &Ctx, t: &Term) -> Result<Sort, ElabError> {
    Checker::new(lang).infer_sort(ctx, t)
}
