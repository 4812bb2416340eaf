use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::{Compiler, TranslateError};
use crate::elaborator::Checker;
use crate::kernel::{lang_subset, Ctx, Lang, Name, Rule, Sort, Term};
use crate::proofkit::{check_eq, check_sort_eq, EqProof, SortEqProof};
use crate::rewrite::{RewriteConfig, RewriteError, Rewriter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObligationKind {
    WfSort,
    WfTerm,
    TermEq,
    SortEq,
}

impl ObligationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObligationKind::WfSort => "wf_sort",
            ObligationKind::WfTerm => "wf_term",
            ObligationKind::TermEq => "term_eq",
            ObligationKind::SortEq => "sort_eq",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    WfSort(Sort),
    WfTerm(Term, Sort),
    TermEq { lhs: Term, rhs: Term, sort: Sort },
    SortEq { lhs: Sort, rhs: Sort },
}

/// What a compiler must establish for one source rule, stated in the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub kind: ObligationKind,
    pub source_rule: Name,
    pub target_ctx: Ctx,
    pub payload: Payload,
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {} ⊢ ", self.kind.as_str(), self.source_rule, self.target_ctx)?;
        match &self.payload {
            Payload::WfSort(s) => write!(f, "{s} sort"),
            Payload::WfTerm(t, s) => write!(f, "{t} : {s}"),
            Payload::TermEq { lhs, rhs, sort } => write!(f, "{lhs} = {rhs} : {sort}"),
            Payload::SortEq { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
        }
    }
}

/// Builds one obligation per rule of `source_ext`, in order. The compiler
/// visible to a rule is `cmp_pre` plus the cases of `cmp` for that rule and
/// the rules before it.
pub fn obligations(cmp_pre: &Compiler, cmp: &Compiler, source_ext: &Lang) -> Result<Vec<Obligation>, TranslateError> {
    let mut visible = cmp_pre.clone();
    let mut out = Vec::with_capacity(source_ext.len());
    for (name, rule) in source_ext.iter() {
        if rule.is_constructor() {
            let case = cmp.get(name).ok_or_else(|| TranslateError::MissingCase(name.clone()))?;
            let expected = rule.ctx().names();
            if case.params != expected {
                return Err(TranslateError::BadParams { rule: name.clone(), expected, got: case.params.clone() });
            }
            visible.push(name.clone(), case.clone())?;
        }
        let target_ctx = visible.compile_ctx(rule.ctx())?;
        let vars: Vec<Term> = rule.ctx().names().into_iter().map(Term::Var).collect();
        let (kind, payload) = match rule {
            Rule::Sort { .. } => (ObligationKind::WfSort, Payload::WfSort(visible.compile_sort(&Sort::new(name.clone(), vars))?)),
            Rule::Term { sort, .. } => (
                ObligationKind::WfTerm,
                Payload::WfTerm(visible.compile_term(&Term::Con(name.clone(), vars))?, visible.compile_sort(sort)?),
            ),
            Rule::TermEq { lhs, rhs, sort, .. } => (
                ObligationKind::TermEq,
                Payload::TermEq {
                    lhs: visible.compile_term(lhs)?,
                    rhs: visible.compile_term(rhs)?,
                    sort: visible.compile_sort(sort)?,
                },
            ),
            Rule::SortEq { lhs, rhs, .. } => (
                ObligationKind::SortEq,
                Payload::SortEq { lhs: visible.compile_sort(lhs)?, rhs: visible.compile_sort(rhs)? },
            ),
        };
        out.push(Obligation { kind, source_rule: name.clone(), target_ctx, payload });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Well-formedness was re-checked by the elaborator.
    Wf,
    Term(EqProof),
    Sort(SortEqProof),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Auto { evidence: Evidence, steps: usize },
    Manual { proof: EqProof, script: String },
    Open { reason: String },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Auto { .. } => "auto",
            Status::Manual { .. } => "manual",
            Status::Open { .. } => "open",
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Status::Open { .. })
    }

    pub fn term_proof(&self) -> Option<&EqProof> {
        match self {
            Status::Auto { evidence: Evidence::Term(p), .. } | Status::Manual { proof: p, .. } => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportEntry {
    pub obligation: Obligation,
    pub status: Status,
    /// True when the evidence was carried over from an earlier report
    /// rather than re-derived.
    pub replayed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DischargeReport {
    pub entries: Vec<ReportEntry>,
}

impl DischargeReport {
    pub fn get(&self, rule: &Name) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| &e.obligation.source_rule == rule)
    }

    pub fn is_clean(&self) -> bool {
        self.entries.iter().all(|e| !e.status.is_open())
    }

    pub fn count(&self, label: &str) -> usize {
        self.entries.iter().filter(|e| e.status.label() == label).count()
    }

    pub fn open(&self) -> Vec<&ReportEntry> {
        self.entries.iter().filter(|e| e.status.is_open()).collect()
    }

    pub fn manual(&self) -> Vec<&ReportEntry> {
        self.entries.iter().filter(|e| matches!(e.status, Status::Manual { .. })).collect()
    }

    /// Entries of `self` followed by those of `other`.
    pub fn concat(&self, other: &DischargeReport) -> DischargeReport {
        DischargeReport { entries: self.entries.iter().chain(&other.entries).cloned().collect() }
    }
}

#[derive(Clone, Debug)]
pub struct DischargeOptions {
    pub rewrite: RewriteConfig,
    pub jobs: usize,
}

impl Default for DischargeOptions {
    fn default() -> Self {
        DischargeOptions { rewrite: RewriteConfig::from_env(), jobs: 1 }
    }
}

/// Stack size for worker threads; rewriting recurses over term depth.
const WORKER_STACK: usize = 256 << 20;

/// Runs `f` on a pool with `jobs` threads and generous stacks.
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .stack_size(WORKER_STACK)
        .build()
        .expect("thread pool");
    pool.install(f)
}

fn check_wf(lt: &Lang, ob: &Obligation) -> Result<(), String> {
    let mut checker = Checker::new(lt);
    checker.check_ctx(&ob.target_ctx).map_err(|e| format!("target context: {e}"))?;
    match &ob.payload {
        Payload::WfSort(s) => checker.check_sort(&ob.target_ctx, s).map_err(|e| e.to_string()),
        Payload::WfTerm(t, s) => {
            checker.check_sort(&ob.target_ctx, s).map_err(|e| e.to_string())?;
            checker.check_term(&ob.target_ctx, t, s).map(|_| ()).map_err(|e| e.to_string())
        }
        _ => Ok(()),
    }
}

fn normal_form(rw: &Rewriter<'_>, ctx: &Ctx, t: &Term, sort: &Sort) -> Result<(Term, EqProof, usize), String> {
    match rw.normalize_at(ctx, t, sort) {
        Ok(r) => Ok((r.normal_form, r.certificate, r.steps_used)),
        Err(RewriteError::FuelExhausted(partial)) => {
            Err(format!("fuel exhausted after {} steps at {}", partial.steps_used, partial.normal_form))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn discharge_one(rw: &Rewriter<'_>, ob: &Obligation, manual: &BTreeMap<Name, EqProof>) -> Status {
    let lt = rw.lang();
    let ctx = &ob.target_ctx;
    if let Err(reason) = check_wf(lt, ob) {
        return Status::Open { reason };
    }
    match &ob.payload {
        Payload::WfSort(_) | Payload::WfTerm(..) => Status::Auto { evidence: Evidence::Wf, steps: 0 },
        Payload::TermEq { lhs, rhs, sort } => {
            let joined = normal_form(rw, ctx, lhs, sort).and_then(|(nl, pl, sl)| {
                let (nr, pr, sr) = normal_form(rw, ctx, rhs, sort)?;
                if nl == nr {
                    let proof = if pr.is_refl() { pl } else { EqProof::trans(pl, EqProof::sym(pr)) };
                    Ok((proof, sl + sr))
                } else {
                    Err(format!("normal forms differ: {nl} vs {nr}"))
                }
            });
            let reason = match joined {
                Ok((proof, steps)) => return Status::Auto { evidence: Evidence::Term(proof), steps },
                Err(reason) => reason,
            };
            match manual.get(&ob.source_rule) {
                Some(p) => match check_eq(lt, ctx, p) {
                    Ok(eq) if &eq.lhs == lhs && &eq.rhs == rhs && &eq.sort == sort => {
                        Status::Manual { proof: p.clone(), script: ob.source_rule.to_string() }
                    }
                    Ok(eq) => Status::Open {
                        reason: format!("manual proof shows {} = {} : {}, not the obligation", eq.lhs, eq.rhs, eq.sort),
                    },
                    Err(e) => Status::Open { reason: format!("manual proof rejected: {e}") },
                },
                None => Status::Open { reason },
            }
        }
        Payload::SortEq { lhs, rhs } => match rw.convert_sorts(ctx, lhs, rhs) {
            Some(p) => Status::Auto { evidence: Evidence::Sort(p), steps: 0 },
            None => Status::Open { reason: format!("sorts {lhs} and {rhs} do not join") },
        },
    }
}

/// Discharges each obligation: well-formedness through the checker,
/// equations by joining normal forms, then by the supplied manual proofs.
/// The report keeps source order regardless of `jobs`.
pub fn discharge(obls: &[Obligation], lt: &Lang, manual: &BTreeMap<Name, EqProof>, opts: &DischargeOptions) -> DischargeReport {
    let rw = Rewriter::new(lt, opts.rewrite.clone());
    let statuses: Vec<Status> = with_pool(opts.jobs, || obls.par_iter().map(|ob| discharge_one(&rw, ob, manual)).collect());
    DischargeReport {
        entries: obls
            .iter()
            .cloned()
            .zip(statuses)
            .map(|(obligation, status)| ReportEntry { obligation, status, replayed: false })
            .collect(),
    }
}

fn recheck(lt: &Lang, entry: &ReportEntry) -> Result<(), String> {
    let ob = &entry.obligation;
    check_wf(lt, ob)?;
    let proved = match &entry.status {
        Status::Open { .. } => return Ok(()),
        Status::Auto { evidence: Evidence::Wf, .. } => return Ok(()),
        Status::Auto { evidence: Evidence::Sort(p), .. } => {
            let eq = check_sort_eq(lt, &ob.target_ctx, p).map_err(|e| e.to_string())?;
            return match &ob.payload {
                Payload::SortEq { lhs, rhs } if &eq.lhs == lhs && &eq.rhs == rhs => Ok(()),
                _ => Err("sort proof no longer matches".to_string()),
            };
        }
        Status::Auto { evidence: Evidence::Term(p), .. } | Status::Manual { proof: p, .. } => {
            check_eq(lt, &ob.target_ctx, p).map_err(|e| e.to_string())?
        }
    };
    match &ob.payload {
        Payload::TermEq { lhs, rhs, sort } if &proved.lhs == lhs && &proved.rhs == rhs && &proved.sort == sort => Ok(()),
        _ => Err("proof no longer matches its obligation".to_string()),
    }
}

/// Moves a report to a larger target language by re-checking, not
/// re-deriving, every piece of evidence.
pub fn embed_target(report: &DischargeReport, lt: &Lang, lt_ext: &Lang) -> Result<DischargeReport, TranslateError> {
    if !lang_subset(lt, lt_ext) {
        return Err(TranslateError::NotASubset);
    }
    let mut out = report.clone();
    for entry in &mut out.entries {
        recheck(lt_ext, entry).map_err(|reason| TranslateError::ReplayFailed { rule: entry.obligation.source_rule.clone(), reason })?;
        entry.replayed = true;
    }
    Ok(out)
}

/// True iff the compiled images of `a` and `b` have different normal forms.
pub fn nontriviality_check(cmp: &Compiler, lt: &Lang, a: &Term, b: &Term, cfg: &RewriteConfig) -> Result<bool, TranslateError> {
    let rw = Rewriter::new(lt, cfg.clone());
    let ctx = Ctx::new();
    let nf = |t: &Term| -> Result<Term, TranslateError> {
        let c = cmp.compile_term(t)?;
        match rw.normalize(&ctx, &c) {
            Ok(r) => Ok(r.normal_form),
            Err(RewriteError::FuelExhausted(partial)) => Ok(partial.normal_form),
            Err(e) => Err(TranslateError::Rewrite(e.to_string())),
        }
    };
    Ok(nf(a)? != nf(b)?)
}
