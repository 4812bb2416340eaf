//! Fuel-bounded, left-to-right normalization that emits equality certificates.
//!
//! Strategy: innermost, leftmost, repeated to a fixpoint. At each position the
//! language's equations are tried in declaration order. Every result carries
//! a proof that is re-checked by the proof checker before being returned
//! (unless the caller disables verification for nested uses).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::elaborator::{Checker, ElabError};
use crate::kernel::{Ctx, Lang, MetaSubst, Name, Rule, Sort, Term};
use crate::proofkit::{check_eq, EqProof, ProofError, SortEqProof};

pub const DEFAULT_FUEL: usize = 10_000;

/// Environment variable overriding the default fuel.
pub const FUEL_ENV: &str = "GATFORGE_FUEL";

pub type FilterFn = Arc<dyn Fn(&Name, &Rule) -> bool + Send + Sync>;

/// Which equations the rewriter may use.
#[derive(Clone, Default)]
pub enum RuleFilter {
    #[default]
    All,
    /// Rules whose right-hand side uses no metavariable more often than the
    /// left-hand side does, counting explicit argument positions only.
    NonDuplicating,
    Only(BTreeSet<Name>),
    Exclude(BTreeSet<Name>),
    Custom(FilterFn),
}

impl std::fmt::Debug for RuleFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuleFilter::All => write!(f, "All"),
            RuleFilter::NonDuplicating => write!(f, "NonDuplicating"),
            RuleFilter::Only(s) => f.debug_tuple("Only").field(s).finish(),
            RuleFilter::Exclude(s) => f.debug_tuple("Exclude").field(s).finish(),
            RuleFilter::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl RuleFilter {
    pub fn admits(&self, lang: &Lang, name: &Name, rule: &Rule) -> bool {
        match self {
            RuleFilter::All => true,
            RuleFilter::NonDuplicating => !is_duplicating(lang, rule),
            RuleFilter::Only(names) => names.contains(name),
            RuleFilter::Exclude(names) => !names.contains(name),
            RuleFilter::Custom(f) => f(name, rule),
        }
    }
}

/// Counts metavariable occurrences, descending only into explicit argument
/// positions of each constructor. Implicit positions repeat contexts and
/// types everywhere and would make nearly every rule look duplicating.
fn count_explicit_occurrences(lang: &Lang, t: &Term, out: &mut BTreeMap<Name, usize>) {
    match t {
        Term::Var(x) => *out.entry(x.clone()).or_default() += 1,
        Term::Con(h, args) => {
            let positions = lang.get(h).map(Rule::explicit_positions);
            for (i, a) in args.iter().enumerate() {
                if positions.as_ref().map_or(true, |ps| ps.contains(&i)) {
                    count_explicit_occurrences(lang, a, out);
                }
            }
        }
    }
}

pub fn is_duplicating(lang: &Lang, rule: &Rule) -> bool {
    let Rule::TermEq { lhs, rhs, .. } = rule else { return false };
    let mut l = BTreeMap::new();
    let mut r = BTreeMap::new();
    count_explicit_occurrences(lang, lhs, &mut l);
    count_explicit_occurrences(lang, rhs, &mut r);
    r.iter().any(|(x, n)| *n > l.get(x).copied().unwrap_or(0))
}

#[derive(Clone, Debug)]
pub struct RewriteConfig {
    pub fuel: usize,
    pub filter: RuleFilter,
    /// Re-check the certificate before returning.
    pub verify: bool,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        RewriteConfig { fuel: DEFAULT_FUEL, filter: RuleFilter::All, verify: true }
    }
}

impl RewriteConfig {
    /// Default configuration with fuel taken from `GATFORGE_FUEL` when set.
    pub fn from_env() -> Self {
        let fuel = std::env::var(FUEL_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|n| *n >= 1)
            .unwrap_or(DEFAULT_FUEL);
        RewriteConfig { fuel, ..RewriteConfig::default() }
    }

    pub fn with_fuel(mut self, fuel: usize) -> Self {
        self.fuel = fuel.max(1);
        self
    }

    pub fn with_filter(mut self, filter: RuleFilter) -> Self {
        self.filter = filter;
        self
    }

    pub fn non_duplicating() -> Self {
        RewriteConfig::from_env().with_filter(RuleFilter::NonDuplicating)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteResult {
    pub input: Term,
    pub normal_form: Term,
    pub sort: Sort,
    pub certificate: EqProof,
    pub steps_used: usize,
    /// False when fuel ran out before a normal form was reached.
    pub normal: bool,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum RewriteError {
    #[error("fuel exhausted after {} steps", .0.steps_used)]
    FuelExhausted(Box<RewriteResult>),
    #[error("ill-formed input: {0}")]
    IllTyped(#[from] ElabError),
    #[error("sorts {0} and {1} could not be reconciled during rewriting")]
    SortDrift(Sort, Sort),
    #[error("certificate failed to check: {0}")]
    BadCertificate(#[from] ProofError),
}

/// First-order matching; repeated pattern variables must match equal subterms.
pub fn match_pattern(pattern: &Term, subject: &Term) -> Option<MetaSubst> {
    let mut gamma = MetaSubst::new();
    match_into(pattern, subject, &mut gamma).then_some(gamma)
}

fn match_into(pattern: &Term, subject: &Term, gamma: &mut MetaSubst) -> bool {
    match pattern {
        Term::Var(x) => match gamma.get(x) {
            Some(bound) => bound == subject,
            None => {
                gamma.insert(x.clone(), subject.clone());
                true
            }
        },
        Term::Con(h, pargs) => match subject {
            Term::Con(g, sargs) if g == h && sargs.len() == pargs.len() => {
                pargs.iter().zip(sargs).all(|(p, s)| match_into(p, s, gamma))
            }
            _ => false,
        },
    }
}

struct TermRuleRef<'a> {
    name: &'a Name,
    lhs: &'a Term,
    rhs: &'a Term,
    sort: &'a Sort,
}

struct SortRuleRef<'a> {
    name: &'a Name,
    lhs: &'a Sort,
    rhs: &'a Sort,
}

/// A rewriting engine for one language, with equations indexed by the head
/// of their left-hand side.
pub struct Rewriter<'a> {
    lang: &'a Lang,
    cfg: RewriteConfig,
    term_rules: HashMap<Name, Vec<TermRuleRef<'a>>>,
    sort_rules: HashMap<Name, Vec<SortRuleRef<'a>>>,
    /// Equations `x = c` over a closed sort with one element `c`; they fire
    /// on any other term of that sort, variables included.
    terminal: Vec<TerminalRef<'a>>,
}

struct TerminalRef<'a> {
    name: &'a Name,
    var: &'a Name,
    sort: &'a Sort,
    rhs: &'a Term,
}

fn lhs_binds_all(ctx: &Ctx, lhs_vars: &BTreeSet<Name>) -> bool {
    ctx.iter().all(|(x, _)| lhs_vars.contains(x))
}

impl<'a> Rewriter<'a> {
    pub fn new(lang: &'a Lang, cfg: RewriteConfig) -> Self {
        let mut term_rules: HashMap<Name, Vec<TermRuleRef<'a>>> = HashMap::new();
        let mut sort_rules: HashMap<Name, Vec<SortRuleRef<'a>>> = HashMap::new();
        let mut terminal = Vec::new();
        for (name, rule) in lang.iter() {
            if !cfg.filter.admits(lang, name, rule) {
                continue;
            }
            match rule {
                Rule::TermEq { ctx, lhs: lhs @ Term::Con(h, _), rhs, sort } if lhs_binds_all(ctx, &lhs.vars()) => {
                    term_rules.entry(h.clone()).or_default().push(TermRuleRef { name, lhs, rhs, sort });
                }
                Rule::TermEq { ctx, lhs: Term::Var(x), rhs, sort }
                    if ctx.len() == 1 && sort.vars().is_empty() && rhs.vars().is_empty() =>
                {
                    terminal.push(TerminalRef { name, var: x, sort, rhs });
                }
                Rule::SortEq { ctx, lhs, rhs } if lhs_binds_all(ctx, &lhs.vars()) => {
                    sort_rules.entry(lhs.head.clone()).or_default().push(SortRuleRef { name, lhs, rhs });
                }
                _ => {}
            }
        }
        Rewriter { lang, cfg, term_rules, sort_rules, terminal }
    }

    pub fn lang(&self) -> &'a Lang {
        self.lang
    }

    pub fn config(&self) -> &RewriteConfig {
        &self.cfg
    }

    fn run<'r>(&'r self, ctx: &'r Ctx, fuel: usize) -> Run<'r, 'a> {
        Run { rw: self, ctx, checker: Checker::new(self.lang), fuel, steps: 0 }
    }

    /// Normalizes a term at its synthesized sort.
    pub fn normalize(&self, ctx: &Ctx, t: &Term) -> Result<RewriteResult, RewriteError> {
        let sort = Checker::new(self.lang).infer_sort(ctx, t)?;
        self.normalize_at(ctx, t, &sort)
    }

    /// Normalizes a term known to have sort `sort`; the certificate is stated at that sort.
    pub fn normalize_at(&self, ctx: &Ctx, t: &Term, sort: &Sort) -> Result<RewriteResult, RewriteError> {
        let mut run = self.run(ctx, self.cfg.fuel);
        let (nf, proof) = run.norm_pat(t, &MetaSubst::new(), sort)?;
        let certificate = match proof {
            Some(p) => p,
            None => run.refl_at(t, sort)?,
        };
        let result = RewriteResult {
            input: t.clone(),
            normal_form: nf,
            sort: sort.clone(),
            certificate,
            steps_used: run.steps,
            normal: !run.exhausted(),
        };
        if self.cfg.verify {
            let eq = check_eq(self.lang, ctx, &result.certificate)?;
            if eq.lhs != result.input || eq.rhs != result.normal_form || &eq.sort != sort {
                return Err(RewriteError::BadCertificate(ProofError::EndpointMismatch {
                    left: format!("{} = {}", eq.lhs, eq.rhs),
                    right: format!("{} = {}", result.input, result.normal_form),
                }));
            }
        }
        if result.normal {
            Ok(result)
        } else {
            Err(RewriteError::FuelExhausted(Box::new(result)))
        }
    }

    /// Proves `a = b` by normalizing both sides at `sort`.
    pub fn join_at(&self, ctx: &Ctx, a: &Term, b: &Term, sort: &Sort) -> Option<EqProof> {
        if a == b {
            return self.run(ctx, 1).refl_at(a, sort).ok();
        }
        let ra = self.normalize_at(ctx, a, sort).ok()?;
        let rb = self.normalize_at(ctx, b, sort).ok()?;
        if ra.normal_form != rb.normal_form {
            return None;
        }
        Some(compose(Some(ra.certificate), Some(EqProof::sym(rb.certificate))).expect("both present"))
    }

    pub fn join(&self, ctx: &Ctx, a: &Term, b: &Term) -> Option<EqProof> {
        let sort = Checker::new(self.lang).infer_sort(ctx, a).ok()?;
        self.join_at(ctx, a, b, &sort)
    }

    /// Normal form of a sort, with a proof of `s = nf`.
    pub fn normalize_sort(&self, ctx: &Ctx, s: &Sort) -> Result<(Sort, SortEqProof), RewriteError> {
        let mut run = self.run(ctx, self.cfg.fuel);
        let (nf, p) = run.norm_sort(s)?;
        Ok((nf, p.unwrap_or_else(|| SortEqProof::Refl(s.clone()))))
    }

    /// A derivable equality between two sorts, found by normalizing both.
    pub fn convert_sorts(&self, ctx: &Ctx, a: &Sort, b: &Sort) -> Option<SortEqProof> {
        self.run(ctx, self.cfg.fuel).convert(a, b).ok()
    }

    /// One leftmost-innermost rewrite step, or `None` at a normal form.
    pub fn step(&self, ctx: &Ctx, t: &Term) -> Result<Option<(Term, EqProof, Name)>, RewriteError> {
        let sort = Checker::new(self.lang).infer_sort(ctx, t)?;
        let mut run = self.run(ctx, 1);
        run.step_at(t, &sort)
    }
}

/// Chains two optional proofs, `None` standing for reflexivity.
fn compose(a: Option<EqProof>, b: Option<EqProof>) -> Option<EqProof> {
    match (a, b) {
        (None, q) => q,
        (p, None) => p,
        (Some(p), Some(q)) => Some(EqProof::trans(p, q)),
    }
}

fn compose_sort(a: Option<SortEqProof>, b: Option<SortEqProof>) -> Option<SortEqProof> {
    match (a, b) {
        (None, q) => q,
        (p, None) => p,
        (Some(p), Some(q)) => Some(SortEqProof::trans(p, q)),
    }
}

struct Run<'r, 'a> {
    rw: &'r Rewriter<'a>,
    ctx: &'r Ctx,
    checker: Checker<'a>,
    fuel: usize,
    steps: usize,
}

impl<'r, 'a> Run<'r, 'a> {
    fn exhausted(&self) -> bool {
        self.steps >= self.fuel
    }

    fn term_rule(&self, head: &Name) -> Result<(&'a Ctx, &'a Sort), RewriteError> {
        match self.rw.lang.get(head) {
            Some(Rule::Term { ctx, sort, .. }) => Ok((ctx, sort)),
            Some(_) => Err(ElabError::NotATerm(head.clone()).into()),
            None => Err(ElabError::UnknownHead(head.clone()).into()),
        }
    }

    /// Wraps a proof stated at `natural` so that it is stated at `want`.
    fn fit(&mut self, p: EqProof, natural: &Sort, want: &Sort) -> Result<EqProof, RewriteError> {
        if natural == want {
            return Ok(p);
        }
        let sp = self.convert(natural, want)?;
        Ok(EqProof::conv(sp, p))
    }

    fn refl_at(&mut self, t: &Term, want: &Sort) -> Result<EqProof, RewriteError> {
        let natural = self.checker.infer_sort(self.ctx, t)?;
        self.fit(EqProof::Refl(t.clone()), &natural, want)
    }

    fn convert(&mut self, a: &Sort, b: &Sort) -> Result<SortEqProof, RewriteError> {
        if a == b {
            return Ok(SortEqProof::Refl(a.clone()));
        }
        let drift = || RewriteError::SortDrift(a.clone(), b.clone());
        // Conversion runs on its own budget so it never eats the caller's fuel.
        let mut sub = Run { rw: self.rw, ctx: self.ctx, checker: Checker::new(self.rw.lang), fuel: self.fuel.max(crate::elaborator::CONVERSION_FUEL), steps: 0 };
        let (na, pa) = sub.norm_sort(a).map_err(|_| drift())?;
        let (nb, pb) = sub.norm_sort(b).map_err(|_| drift())?;
        if na != nb {
            return Err(drift());
        }
        compose_sort(pa, pb.map(SortEqProof::sym)).ok_or_else(drift)
    }

    /// Normalizes `pat` instantiated by `env`, where every value in `env` is
    /// already normal. The proof (if any) is stated at `want`.
    fn norm_pat(&mut self, pat: &Term, env: &MetaSubst, want: &Sort) -> Result<(Term, Option<EqProof>), RewriteError> {
        let (head, pargs) = match pat {
            Term::Var(x) => {
                let t = env.get(x).cloned().unwrap_or_else(|| pat.clone());
                return Ok(match self.terminal(&t, want) {
                    Some((nf, p)) => (nf, Some(p)),
                    None => (t, None),
                });
            }
            Term::Con(h, a) => (h, a),
        };
        let (rctx, rsort) = self.term_rule(head)?;
        if pargs.len() != rctx.len() {
            return Err(ElabError::ArityMismatch { head: head.clone(), expected: rctx.len(), got: pargs.len() }.into());
        }
        let inst: Vec<Term> = pargs.iter().map(|p| p.subst(env)).collect();
        let gl = MetaSubst::zip(&rctx.names(), &inst);
        let mut nfs = Vec::with_capacity(pargs.len());
        let mut proofs = Vec::with_capacity(pargs.len());
        for (parg, (_, xsort)) in pargs.iter().zip(rctx.iter()) {
            let (nf, p) = self.norm_pat(parg, env, &xsort.subst(&gl))?;
            nfs.push(nf);
            proofs.push(p);
        }
        let cong = if proofs.iter().all(Option::is_none) {
            None
        } else {
            let mut arg_proofs = Vec::with_capacity(proofs.len());
            for ((p, t), (_, xsort)) in proofs.into_iter().zip(&inst).zip(rctx.iter()) {
                arg_proofs.push(match p {
                    Some(p) => p,
                    None => self.refl_at(t, &xsort.subst(&gl))?,
                });
            }
            let p = EqProof::Cong(head.clone(), arg_proofs);
            Some(self.fit(p, &rsort.subst(&gl), want)?)
        };
        let t1 = Term::Con(head.clone(), nfs);
        let (nf, rest) = self.root(t1, want)?;
        let (nf, last) = match self.terminal(&nf, want) {
            Some((c, p)) => (c, Some(p)),
            None => (nf, None),
        };
        Ok((nf, compose(compose(cong, rest), last)))
    }

    /// Collapses `t` to the element of a one-element sort.
    fn terminal(&mut self, t: &Term, want: &Sort) -> Option<(Term, EqProof)> {
        if self.exhausted() {
            return None;
        }
        let r = self.rw.terminal.iter().find(|r| r.sort == want && r.rhs != t)?;
        self.steps += 1;
        Some((r.rhs.clone(), EqProof::Axiom(r.name.clone(), MetaSubst::singleton(r.var.clone(), t.clone()))))
    }

    /// Tries the equations at the root of a term whose arguments are normal.
    fn root(&mut self, t: Term, want: &Sort) -> Result<(Term, Option<EqProof>), RewriteError> {
        if self.exhausted() {
            return Ok((t, None));
        }
        let Some(head) = t.head() else { return Ok((t, None)) };
        let rw = self.rw;
        let Some(candidates) = rw.term_rules.get(head) else { return Ok((t, None)) };
        for r in candidates {
            let Some(gamma) = match_pattern(r.lhs, &t) else { continue };
            self.steps += 1;
            let ax = EqProof::Axiom(r.name.clone(), gamma.clone());
            let ax = self.fit(ax, &r.sort.subst(&gamma), want)?;
            let (nf, rest) = self.norm_pat(r.rhs, &gamma, want)?;
            return Ok((nf, compose(Some(ax), rest)));
        }
        Ok((t, None))
    }

    fn norm_sort(&mut self, s: &Sort) -> Result<(Sort, Option<SortEqProof>), RewriteError> {
        let rctx = match self.rw.lang.get(&s.head) {
            Some(Rule::Sort { ctx, .. }) => ctx,
            Some(_) => return Err(ElabError::NotASort(s.head.clone()).into()),
            None => return Err(ElabError::UnknownHead(s.head.clone()).into()),
        };
        let gl = MetaSubst::zip(&rctx.names(), &s.args);
        let mut nfs = Vec::with_capacity(s.args.len());
        let mut proofs = Vec::with_capacity(s.args.len());
        for (arg, (_, xsort)) in s.args.iter().zip(rctx.iter()) {
            let (nf, p) = self.norm_pat(arg, &MetaSubst::new(), &xsort.subst(&gl))?;
            nfs.push(nf);
            proofs.push(p);
        }
        let cong = if proofs.iter().all(Option::is_none) {
            None
        } else {
            let mut arg_proofs = Vec::with_capacity(proofs.len());
            for ((p, t), (_, xsort)) in proofs.into_iter().zip(&s.args).zip(rctx.iter()) {
                arg_proofs.push(match p {
                    Some(p) => p,
                    None => self.refl_at(t, &xsort.subst(&gl))?,
                });
            }
            Some(SortEqProof::Cong(s.head.clone(), arg_proofs))
        };
        let s1 = Sort::new(s.head.clone(), nfs);
        if self.exhausted() {
            return Ok((s1, cong));
        }
        let rw = self.rw;
        if let Some(candidates) = rw.sort_rules.get(&s1.head) {
            let subject = s1.as_term();
            for r in candidates {
                let Some(gamma) = match_pattern(&r.lhs.as_term(), &subject) else { continue };
                self.steps += 1;
                let ax = SortEqProof::Axiom(r.name.clone(), gamma.clone());
                let (nf, rest) = self.norm_sort(&r.rhs.subst(&gamma))?;
                return Ok((nf, compose_sort(compose_sort(cong, Some(ax)), rest)));
            }
        }
        Ok((s1, cong))
    }

    /// Leftmost-innermost single step at sort `want`.
    fn step_at(&mut self, t: &Term, want: &Sort) -> Result<Option<(Term, EqProof, Name)>, RewriteError> {
        let Term::Con(head, args) = t else {
            let collapse = self.rw.terminal.iter().find(|r| r.sort == want && r.rhs != t);
            return Ok(collapse.map(|r| {
                let ax = EqProof::Axiom(r.name.clone(), MetaSubst::singleton(r.var.clone(), t.clone()));
                (r.rhs.clone(), ax, r.name.clone())
            }));
        };
        let (rctx, rsort) = self.term_rule(head)?;
        let gl = MetaSubst::zip(&rctx.names(), args);
        for (i, (arg, (_, xsort))) in args.iter().zip(rctx.iter()).enumerate() {
            let arg_sort = xsort.subst(&gl);
            if let Some((new_arg, p, rule)) = self.step_at(arg, &arg_sort)? {
                let mut arg_proofs = Vec::with_capacity(args.len());
                for (j, (a, (_, s))) in args.iter().zip(rctx.iter()).enumerate() {
                    if j == i {
                        arg_proofs.push(p.clone());
                    } else {
                        arg_proofs.push(self.refl_at(a, &s.subst(&gl))?);
                    }
                }
                let mut new_args = args.clone();
                new_args[i] = new_arg;
                let cong = self.fit(EqProof::Cong(head.clone(), arg_proofs), &rsort.subst(&gl), want)?;
                return Ok(Some((Term::Con(head.clone(), new_args), cong, rule)));
            }
        }
        let rw = self.rw;
        if let Some(candidates) = rw.term_rules.get(head) {
            for r in candidates {
                let Some(gamma) = match_pattern(r.lhs, t) else { continue };
                let ax = EqProof::Axiom(r.name.clone(), gamma.clone());
                let ax = self.fit(ax, &r.sort.subst(&gamma), want)?;
                return Ok(Some((r.rhs.subst(&gamma), ax, r.name.clone())));
            }
        }
        if let Some(r) = rw.terminal.iter().find(|r| r.sort == want && r.rhs != t) {
            let ax = EqProof::Axiom(r.name.clone(), MetaSubst::singleton(r.var.clone(), t.clone()));
            return Ok(Some((r.rhs.clone(), ax, r.name.clone())));
        }
        Ok(None)
    }
}

/// Lifts a proof about the subterm at `path` to one about `t`, with
/// reflexivity at every other position.
pub fn congruence_at(t: &Term, path: &[usize], inner: EqProof) -> Option<EqProof> {
    let Some((i, rest)) = path.split_first() else { return Some(inner) };
    let Term::Con(h, args) = t else { return None };
    let sub = congruence_at(args.get(*i)?, rest, inner)?;
    let proofs = args
        .iter()
        .enumerate()
        .map(|(j, a)| if j == *i { sub.clone() } else { EqProof::Refl(a.clone()) })
        .collect();
    Some(EqProof::Cong(h.clone(), proofs))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LemmaError {
    #[error("`{0}` is not an equation of the language")]
    NotAnEquation(Name),
    #[error("left side does not normalize: {0}")]
    Normalize(String),
    #[error("no subterm at {0:?} of the left normal form")]
    BadPath(Vec<usize>),
    #[error("`{0}` does not match the subterm at the given position")]
    NoMatch(Name),
    #[error("after using `{0}`, the two sides still do not join")]
    NoJoin(Name),
}

/// Proves `lhs = rhs` by normalizing `lhs`, rewriting the subterm at `path`
/// of its normal form with one instance of equation `lemma` (right to left
/// when `backwards`), and joining the result with `rhs`. This covers
/// obligations that need an equation the rewriter cannot orient.
pub fn prove_by_lemma(
    rw: &Rewriter<'_>,
    ctx: &Ctx,
    lhs: &Term,
    rhs: &Term,
    sort: &Sort,
    lemma: &Name,
    path: &[usize],
    backwards: bool,
) -> Result<EqProof, LemmaError> {
    let Some(Rule::TermEq { lhs: pl, rhs: pr, .. }) = rw.lang().get(lemma) else {
        return Err(LemmaError::NotAnEquation(lemma.clone()));
    };
    let left = rw.normalize_at(ctx, lhs, sort).map_err(|e| LemmaError::Normalize(e.to_string()))?;
    let at = left.normal_form.at_path(path).ok_or_else(|| LemmaError::BadPath(path.to_vec()))?;
    let (from, to) = if backwards { (pr, pl) } else { (pl, pr) };
    let inst = match_pattern(from, at).ok_or_else(|| LemmaError::NoMatch(lemma.clone()))?;
    let axiom = EqProof::Axiom(lemma.clone(), inst.clone());
    let step = if backwards { EqProof::sym(axiom) } else { axiom };
    let moved = left.normal_form.replace_at(path, to.subst(&inst)).ok_or_else(|| LemmaError::BadPath(path.to_vec()))?;
    let step = congruence_at(&left.normal_form, path, step).ok_or_else(|| LemmaError::BadPath(path.to_vec()))?;
    let rest = rw.join_at(ctx, &moved, rhs, sort).ok_or_else(|| LemmaError::NoJoin(lemma.clone()))?;
    Ok(EqProof::trans(left.certificate, EqProof::trans(step, rest)))
}

pub fn normalize(lang: &Lang, ctx: &Ctx, t: &Term, cfg: &RewriteConfig) -> Result<RewriteResult, RewriteError> {
    Rewriter::new(lang, cfg.clone()).normalize(ctx, t)
}

pub fn join(lang: &Lang, ctx: &Ctx, a: &Term, b: &Term, cfg: &RewriteConfig) -> Option<EqProof> {
    Rewriter::new(lang, cfg.clone()).join(ctx, a, b)
}

/// Normalization restricted to non-duplicating equations unless `cfg` says otherwise.
pub fn partial_eval(lang: &Lang, ctx: &Ctx, t: &Term, cfg: Option<&RewriteConfig>) -> Result<RewriteResult, RewriteError> {
    let cfg = cfg.cloned().unwrap_or_else(RewriteConfig::non_duplicating);
    normalize(lang, ctx, t, &cfg)
}
