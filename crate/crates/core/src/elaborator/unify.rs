//! Elaboration: filling in implicit arguments by first-order unification.

use std::collections::BTreeMap;
use std::fmt;

use super::{Checker, ElabError};
use crate::kernel::{Ctx, Lang, MetaSubst, Name, Rule, Sort, Term};

/// Surface syntax: only explicit arguments are written. A bare atom is a
/// metavariable if the ambient ctx declares it, else a nullary constructor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SurfaceTerm {
    Atom(Name),
    App(Name, Vec<SurfaceTerm>),
}

impl SurfaceTerm {
    pub fn atom(name: impl Into<Name>) -> Self {
        SurfaceTerm::Atom(name.into())
    }

    pub fn app(head: impl Into<Name>, args: Vec<SurfaceTerm>) -> Self {
        SurfaceTerm::App(head.into(), args)
    }

    fn head(&self) -> &Name {
        match self {
            SurfaceTerm::Atom(h) | SurfaceTerm::App(h, _) => h,
        }
    }

    fn args(&self) -> &[SurfaceTerm] {
        match self {
            SurfaceTerm::Atom(_) => &[],
            SurfaceTerm::App(_, args) => args,
        }
    }

    fn replace_atoms(&self, map: &BTreeMap<Name, SurfaceTerm>) -> SurfaceTerm {
        match self {
            SurfaceTerm::Atom(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            SurfaceTerm::App(h, args) => SurfaceTerm::App(h.clone(), args.iter().map(|a| a.replace_atoms(map)).collect()),
        }
    }
}

impl fmt::Display for SurfaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceTerm::Atom(x) => write!(f, "{x}"),
            SurfaceTerm::App(h, args) => {
                write!(f, "({h}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for SurfaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Drops implicit argument positions, yielding the surface form.
pub fn erase(lang: &Lang, t: &Term) -> SurfaceTerm {
    match t {
        Term::Var(x) => SurfaceTerm::Atom(x.clone()),
        Term::Con(h, args) => {
            let positions = lang.get(h).map(Rule::explicit_positions).unwrap_or_else(|| (0..args.len()).collect());
            let kept: Vec<SurfaceTerm> = positions.iter().filter_map(|&i| args.get(i)).map(|a| erase(lang, a)).collect();
            if kept.is_empty() {
                SurfaceTerm::Atom(h.clone())
            } else {
                SurfaceTerm::App(h.clone(), kept)
            }
        }
    }
}

/// A syntactic abbreviation `(name params…) ≜ body`, expanded before elaboration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Macro {
    pub params: Vec<Name>,
    pub body: SurfaceTerm,
}

pub type Macros = BTreeMap<Name, Macro>;

/// Surface head that elaborates to the weakening between two contexts,
/// determined from the expected sort.
pub const WEAKEN: &str = "@wkn";

/// Constructor names of the explicit-substitution calculus that the
/// elaborator and generators rely on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalculusNames {
    pub ctx_sort: Name,
    pub sub_sort: Name,
    pub ext: Name,
    pub wkn: Name,
    pub cmp: Name,
    pub id: Name,
    pub snoc: Name,
    pub hd: Name,
}

impl Default for CalculusNames {
    fn default() -> Self {
        CalculusNames {
            ctx_sort: "ctx".into(),
            sub_sort: "sub".into(),
            ext: "ext".into(),
            wkn: "wkn".into(),
            cmp: "cmp".into(),
            id: "id".into(),
            snoc: "snoc".into(),
            hd: "hd".into(),
        }
    }
}

pub struct Elaborator<'a> {
    lang: &'a Lang,
    macros: Option<&'a Macros>,
    calc: CalculusNames,
}

struct State {
    next: usize,
    sol: MetaSubst,
    origin: BTreeMap<Name, Name>,
    postponed: Vec<(Sort, Sort)>,
    weakenings: Vec<(Name, Sort)>,
    expansions: usize,
}

const MAX_EXPANSIONS: usize = 10_000;

fn is_meta(x: &Name) -> bool {
    x.as_str().starts_with('?')
}

impl State {
    fn new() -> Self {
        State {
            next: 0,
            sol: MetaSubst::new(),
            origin: BTreeMap::new(),
            postponed: Vec::new(),
            weakenings: Vec::new(),
            expansions: 0,
        }
    }

    fn fresh(&mut self, origin: String) -> Name {
        let m = Name::new(format!("?{}", self.next));
        self.next += 1;
        self.origin.insert(m.clone(), Name::new(origin));
        m
    }

    fn shallow<'t>(&'t self, t: &'t Term) -> &'t Term {
        let mut cur = t;
        while let Term::Var(x) = cur {
            match self.sol.get(x) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.shallow(t) {
            Term::Var(x) => Term::Var(x.clone()),
            Term::Con(h, args) => Term::Con(h.clone(), args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    fn resolve_sort(&self, s: &Sort) -> Sort {
        Sort::new(s.head.clone(), s.args.iter().map(|a| self.resolve(a)).collect())
    }

    fn occurs(&self, m: &Name, t: &Term) -> bool {
        match self.shallow(t) {
            Term::Var(x) => x == m,
            Term::Con(_, args) => args.iter().any(|a| self.occurs(m, a)),
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.shallow(a).clone();
        let b = self.shallow(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(m), t) | (t, Term::Var(m)) if is_meta(m) => {
                if self.occurs(m, t) {
                    return false;
                }
                self.sol.insert(m.clone(), t.clone());
                true
            }
            (Term::Con(h, xs), Term::Con(g, ys)) => {
                h == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    fn unify_sorts(&mut self, a: &Sort, b: &Sort) -> bool {
        a.head == b.head && a.args.len() == b.args.len() && a.args.iter().zip(&b.args).all(|(x, y)| self.unify(x, y))
    }

    /// Unifies two sorts, rolling back and postponing on failure; a
    /// syntactic mismatch may still be resolved by conversion later.
    fn constrain(&mut self, a: &Sort, b: &Sort) {
        let snapshot = self.sol.clone();
        if !self.unify_sorts(a, b) {
            self.sol = snapshot;
            self.postponed.push((a.clone(), b.clone()));
        }
    }

    fn has_metas(&self, t: &Term) -> bool {
        match self.shallow(t) {
            Term::Var(x) => is_meta(x),
            Term::Con(_, args) => args.iter().any(|a| self.has_metas(a)),
        }
    }

    fn unsolved(&self, t: &Term, out: &mut Vec<Name>) {
        match self.shallow(t) {
            Term::Var(x) if is_meta(x) => {
                let o = self.origin.get(x).cloned().unwrap_or_else(|| x.clone());
                if !out.contains(&o) {
                    out.push(o);
                }
            }
            Term::Var(_) => {}
            Term::Con(_, args) => args.iter().for_each(|a| self.unsolved(a, out)),
        }
    }
}

impl<'a> Elaborator<'a> {
    pub fn new(lang: &'a Lang) -> Self {
        Elaborator { lang, macros: None, calc: CalculusNames::default() }
    }

    pub fn with_macros(mut self, macros: &'a Macros) -> Self {
        self.macros = Some(macros);
        self
    }

    fn expand(&self, st: &SurfaceTerm, state: &mut State) -> Result<Option<SurfaceTerm>, ElabError> {
        let Some(m) = self.macros.and_then(|ms| ms.get(st.head())) else { return Ok(None) };
        state.expansions += 1;
        if state.expansions > MAX_EXPANSIONS {
            return Err(ElabError::Macro(format!("macro `{}` expands without bound", st.head())));
        }
        let args = st.args();
        if args.len() != m.params.len() {
            return Err(ElabError::ArityMismatch { head: st.head().clone(), expected: m.params.len(), got: args.len() });
        }
        let map = m.params.iter().cloned().zip(args.iter().cloned()).collect();
        Ok(Some(m.body.replace_atoms(&map)))
    }

    fn elab(&self, ctx: &Ctx, st: &SurfaceTerm, expected: Option<&Sort>, state: &mut State) -> Result<Term, ElabError> {
        if let SurfaceTerm::Atom(x) = st {
            if let Some(sort) = ctx.get(x) {
                if let Some(e) = expected {
                    state.constrain(sort, e);
                }
                return Ok(Term::Var(x.clone()));
            }
        }
        let head = st.head();
        if head == WEAKEN {
            if !st.args().is_empty() {
                return Err(ElabError::ArityMismatch { head: head.clone(), expected: 0, got: st.args().len() });
            }
            let e = expected.ok_or_else(|| ElabError::Macro(format!("`{WEAKEN}` needs an expected sort")))?;
            let m = state.fresh(WEAKEN.to_string());
            state.weakenings.push((m.clone(), e.clone()));
            return Ok(Term::Var(m));
        }
        if let Some(expanded) = self.expand(st, state)? {
            return self.elab(ctx, &expanded, expected, state);
        }
        let (rctx, explicit, rsort) = match self.lang.get(head) {
            Some(Rule::Term { ctx, explicit, sort }) => (ctx, explicit, sort),
            Some(_) => return Err(ElabError::NotATerm(head.clone())),
            None => return Err(ElabError::UnknownHead(head.clone())),
        };
        let sargs = st.args();
        let full = sargs.len() == rctx.len() && rctx.len() != explicit.len();
        if !full && sargs.len() != explicit.len() {
            return Err(ElabError::ArityMismatch { head: head.clone(), expected: explicit.len(), got: sargs.len() });
        }
        let metas: Vec<Name> = rctx.iter().map(|(x, _)| state.fresh(format!("{head}.{x}"))).collect();
        let rho = MetaSubst::zip(&rctx.names(), &metas.iter().cloned().map(Term::Var).collect::<Vec<_>>());
        if let Some(e) = expected {
            state.constrain(&rsort.subst(&rho), e);
        }
        let positions: Vec<usize> = if full { (0..rctx.len()).collect() } else { rule_positions(rctx, explicit) };
        for (pos, sarg) in positions.into_iter().zip(sargs) {
            let (x, xsort) = &rctx.entries()[pos];
            let want = state.resolve_sort(&xsort.subst(&rho));
            let u = self.elab(ctx, sarg, Some(&want), state)?;
            if !state.unify(&Term::Var(metas[pos].clone()), &u) {
                let got = state.resolve(&u);
                return Err(ElabError::Macro(format!(
                    "argument `{x}` of `{head}` is {got}, which conflicts with what its other arguments determine ({})",
                    state.resolve(&Term::Var(metas[pos].clone()))
                )));
            }
        }
        Ok(Term::Con(head.clone(), metas.into_iter().map(Term::Var).collect()))
    }

    fn weakening_chain(&self, from: &Term, to: &Term) -> Result<SurfaceTerm, ElabError> {
        let mut cur = from;
        let mut depth = 0;
        while cur != to {
            match cur {
                Term::Con(h, args) if *h == self.calc.ext && args.len() == 2 => {
                    cur = &args[0];
                    depth += 1;
                }
                _ => return Err(ElabError::Macro(format!("cannot weaken context {from} to {to}"))),
            }
        }
        let w = || SurfaceTerm::Atom(self.calc.wkn.clone());
        Ok(match depth {
            0 => SurfaceTerm::Atom(self.calc.id.clone()),
            _ => (1..depth).fold(w(), |acc, _| SurfaceTerm::App(self.calc.cmp.clone(), vec![acc, w()])),
        })
    }

    fn finish(&self, ctx: &Ctx, state: &mut State) -> Result<(), ElabError> {
        let pending = std::mem::take(&mut state.weakenings);
        for (m, e) in pending {
            let e = state.resolve_sort(&e);
            if e.head != self.calc.sub_sort || e.args.len() != 2 || e.args.iter().any(|a| state.has_metas(a)) {
                return Err(ElabError::Macro(format!("`{WEAKEN}` used at {e}, which is not a known substitution sort")));
            }
            let chain = self.weakening_chain(&e.args[0], &e.args[1])?;
            let u = self.elab(ctx, &chain, Some(&e), state)?;
            if !state.unify(&Term::Var(m), &u) {
                return Err(ElabError::Macro(format!("`{WEAKEN}` could not be placed at {e}")));
            }
        }
        let postponed = std::mem::take(&mut state.postponed);
        for (a, b) in postponed {
            let snapshot = state.sol.clone();
            if state.unify_sorts(&a, &b) {
                continue;
            }
            state.sol = snapshot;
            let (a, b) = (state.resolve_sort(&a), state.resolve_sort(&b));
            if a.args.iter().chain(&b.args).any(|t| state.has_metas(t)) {
                return Err(ElabError::SortMismatch { expected: b, got: a });
            }
            // Ground mismatches are left to the final check, which may convert.
        }
        Ok(())
    }

    fn close(&self, state: &State, t: &Term) -> Result<Term, ElabError> {
        let mut unsolved = Vec::new();
        state.unsolved(t, &mut unsolved);
        if !unsolved.is_empty() {
            return Err(ElabError::UnsolvedImplicit(unsolved));
        }
        Ok(state.resolve(t))
    }

    /// Elaborates and re-checks a surface term.
    pub fn term(&self, ctx: &Ctx, st: &SurfaceTerm, expected: Option<&Sort>) -> Result<Term, ElabError> {
        let mut state = State::new();
        let raw = self.elab(ctx, st, expected, &mut state)?;
        self.finish(ctx, &mut state)?;
        let t = self.close(&state, &raw)?;
        let mut checker = Checker::new(self.lang);
        match expected {
            Some(e) => {
                checker.check_term(ctx, &t, e)?;
            }
            None => {
                checker.infer_sort(ctx, &t)?;
            }
        }
        Ok(t)
    }

    pub fn sort(&self, ctx: &Ctx, ss: &SurfaceTerm) -> Result<Sort, ElabError> {
        let head = ss.head();
        let (rctx, explicit) = match self.lang.get(head) {
            Some(Rule::Sort { ctx, explicit }) => (ctx, explicit),
            Some(_) => return Err(ElabError::NotASort(head.clone())),
            None => return Err(ElabError::UnknownHead(head.clone())),
        };
        let sargs = ss.args();
        let full = sargs.len() == rctx.len() && rctx.len() != explicit.len();
        if !full && sargs.len() != explicit.len() {
            return Err(ElabError::ArityMismatch { head: head.clone(), expected: explicit.len(), got: sargs.len() });
        }
        let mut state = State::new();
        let metas: Vec<Name> = rctx.iter().map(|(x, _)| state.fresh(format!("{head}.{x}"))).collect();
        let rho = MetaSubst::zip(&rctx.names(), &metas.iter().cloned().map(Term::Var).collect::<Vec<_>>());
        let positions: Vec<usize> = if full { (0..rctx.len()).collect() } else { rule_positions(rctx, explicit) };
        for (pos, sarg) in positions.into_iter().zip(sargs) {
            let want = state.resolve_sort(&rctx.entries()[pos].1.subst(&rho));
            let u = self.elab(ctx, sarg, Some(&want), &mut state)?;
            if !state.unify(&Term::Var(metas[pos].clone()), &u) {
                return Err(ElabError::Macro(format!("conflicting argument {sarg} for sort `{head}`")));
            }
        }
        self.finish(ctx, &mut state)?;
        let args = metas.into_iter().map(|m| self.close(&state, &Term::Var(m))).collect::<Result<Vec<_>, _>>()?;
        let s = Sort::new(head.clone(), args);
        Checker::new(self.lang).check_sort(ctx, &s)?;
        Ok(s)
    }

    /// Elaborates ctx entries left to right, each under the ones before it.
    pub fn ctx(&self, entries: &[(Name, SurfaceTerm)]) -> Result<Ctx, ElabError> {
        let mut ctx = Ctx::new();
        for (x, ss) in entries {
            if ctx.contains(x) {
                return Err(ElabError::DuplicateEntry(x.clone()));
            }
            let s = self.sort(&ctx, ss)?;
            ctx.push(x.clone(), s);
        }
        Ok(ctx)
    }
}

fn rule_positions(rctx: &Ctx, explicit: &[Name]) -> Vec<usize> {
    explicit.iter().filter_map(|x| rctx.position(x)).collect()
}

/// Elaborates a surface term; the result re-checks against `expected`.
pub fn elaborate(lang: &Lang, ctx: &Ctx, st: &SurfaceTerm, expected: Option<&Sort>) -> Result<Term, ElabError> {
    Elaborator::new(lang).term(ctx, st, expected)
}

pub fn elaborate_sort(lang: &Lang, ctx: &Ctx, ss: &SurfaceTerm) -> Result<Sort, ElabError> {
    Elaborator::new(lang).sort(ctx, ss)
}
