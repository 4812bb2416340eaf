//! Reified equality derivations and the checker that validates them.
//!
//! The checker is deliberately small: it never searches, it only recomputes
//! the equation a proof tree claims and rejects any step whose side
//! conditions fail syntactically.

use std::fmt;

use crate::elaborator::{Checker, ElabError};
use crate::kernel::{Ctx, Lang, MetaSubst, Name, Rule, Sort, Term};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum EqProof {
    Refl(Term),
    Sym(Box<EqProof>),
    Trans(Box<EqProof>, Box<EqProof>),
    /// One proof per argument of the head, implicit positions included.
    Cong(Name, Vec<EqProof>),
    Axiom(Name, MetaSubst),
    ConvSort(Box<SortEqProof>, Box<EqProof>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SortEqProof {
    Refl(Sort),
    Sym(Box<SortEqProof>),
    Trans(Box<SortEqProof>, Box<SortEqProof>),
    Cong(Name, Vec<EqProof>),
    Axiom(Name, MetaSubst),
}

impl EqProof {
    pub fn sym(p: EqProof) -> EqProof {
        match p {
            EqProof::Refl(t) => EqProof::Refl(t),
            EqProof::Sym(q) => *q,
            p => EqProof::Sym(Box::new(p)),
        }
    }

    pub fn trans(p: EqProof, q: EqProof) -> EqProof {
        EqProof::Trans(Box::new(p), Box::new(q))
    }

    pub fn conv(sp: SortEqProof, p: EqProof) -> EqProof {
        EqProof::ConvSort(Box::new(sp), Box::new(p))
    }

    pub fn is_refl(&self) -> bool {
        matches!(self, EqProof::Refl(_))
    }

    /// Number of nodes in the proof tree.
    pub fn size(&self) -> usize {
        match self {
            EqProof::Refl(_) | EqProof::Axiom(..) => 1,
            EqProof::Sym(p) => 1 + p.size(),
            EqProof::Trans(p, q) => 1 + p.size() + q.size(),
            EqProof::Cong(_, ps) => 1 + ps.iter().map(EqProof::size).sum::<usize>(),
            EqProof::ConvSort(sp, p) => 1 + sp.size() + p.size(),
        }
    }

    /// Names of every axiom used anywhere in the proof, with multiplicity.
    pub fn axioms(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_axioms(&mut out);
        out
    }

    fn collect_axioms(&self, out: &mut Vec<Name>) {
        match self {
            EqProof::Refl(_) => {}
            EqProof::Sym(p) => p.collect_axioms(out),
            EqProof::Trans(p, q) => {
                p.collect_axioms(out);
                q.collect_axioms(out);
            }
            EqProof::Cong(_, ps) => ps.iter().for_each(|p| p.collect_axioms(out)),
            EqProof::Axiom(n, _) => out.push(n.clone()),
            EqProof::ConvSort(sp, p) => {
                sp.collect_axioms(out);
                p.collect_axioms(out);
            }
        }
    }
}

impl SortEqProof {
    pub fn sym(p: SortEqProof) -> SortEqProof {
        match p {
            SortEqProof::Refl(s) => SortEqProof::Refl(s),
            SortEqProof::Sym(q) => *q,
            p => SortEqProof::Sym(Box::new(p)),
        }
    }

    pub fn trans(p: SortEqProof, q: SortEqProof) -> SortEqProof {
        SortEqProof::Trans(Box::new(p), Box::new(q))
    }

    pub fn is_refl(&self) -> bool {
        matches!(self, SortEqProof::Refl(_))
    }

    pub fn size(&self) -> usize {
        match self {
            SortEqProof::Refl(_) | SortEqProof::Axiom(..) => 1,
            SortEqProof::Sym(p) => 1 + p.size(),
            SortEqProof::Trans(p, q) => 1 + p.size() + q.size(),
            SortEqProof::Cong(_, ps) => 1 + ps.iter().map(EqProof::size).sum::<usize>(),
        }
    }

    fn collect_axioms(&self, out: &mut Vec<Name>) {
        match self {
            SortEqProof::Refl(_) => {}
            SortEqProof::Sym(p) => p.collect_axioms(out),
            SortEqProof::Trans(p, q) => {
                p.collect_axioms(out);
                q.collect_axioms(out);
            }
            SortEqProof::Cong(_, ps) => ps.iter().for_each(|p| p.collect_axioms(out)),
            SortEqProof::Axiom(n, _) => out.push(n.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("unknown rule `{0}`")]
    UnknownRule(Name),
    #[error("`{0}` is not an equation of the expected kind")]
    NotAnEquation(Name),
    #[error("bad instance for axiom `{rule}`: {reason}")]
    BadAxiomInstance { rule: Name, reason: String },
    #[error("transitivity endpoints differ: {left} vs {right}")]
    EndpointMismatch { left: String, right: String },
    #[error("sort mismatch in proof: expected {expected}, got {got}")]
    SortMismatch { expected: Sort, got: Sort },
    #[error("reflexivity on an ill-formed term: {0}")]
    IllTypedRefl(ElabError),
    #[error("congruence on `{head}` needs {expected} argument proofs, got {got}")]
    CongArity { head: Name, expected: usize, got: usize },
    #[error("`{0}` is not a constructor of the expected kind")]
    NotAConstructor(Name),
}

/// A checked equation `lhs = rhs : sort`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub sort: Sort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortEquation {
    pub lhs: Sort,
    pub rhs: Sort,
}

/// Recomputes and validates the equation proved by `p` under `lang` and `ctx`.
pub fn check_eq(lang: &Lang, ctx: &Ctx, p: &EqProof) -> Result<Equation, ProofError> {
    ProofChecker::new(lang, ctx).check(p)
}

pub fn check_sort_eq(lang: &Lang, ctx: &Ctx, p: &SortEqProof) -> Result<SortEquation, ProofError> {
    ProofChecker::new(lang, ctx).check_sort(p)
}

struct ProofChecker<'a> {
    checker: Checker<'a>,
    lang: &'a Lang,
    ctx: &'a Ctx,
}

impl<'a> ProofChecker<'a> {
    fn new(lang: &'a Lang, ctx: &'a Ctx) -> Self {
        ProofChecker { checker: Checker::new(lang), lang, ctx }
    }

    fn check(&mut self, p: &EqProof) -> Result<Equation, ProofError> {
        match p {
            EqProof::Refl(t) => {
                let sort = self.checker.infer_sort(self.ctx, t).map_err(ProofError::IllTypedRefl)?;
                Ok(Equation { lhs: t.clone(), rhs: t.clone(), sort })
            }
            EqProof::Sym(p) => {
                let e = self.check(p)?;
                Ok(Equation { lhs: e.rhs, rhs: e.lhs, sort: e.sort })
            }
            EqProof::Trans(p, q) => {
                let a = self.check(p)?;
                let b = self.check(q)?;
                if a.rhs != b.lhs {
                    return Err(ProofError::EndpointMismatch { left: a.rhs.to_string(), right: b.lhs.to_string() });
                }
                if a.sort != b.sort {
                    return Err(ProofError::SortMismatch { expected: a.sort, got: b.sort });
                }
                Ok(Equation { lhs: a.lhs, rhs: b.rhs, sort: a.sort })
            }
            EqProof::Cong(head, ps) => {
                let (rctx, sort) = match self.lang.get(head) {
                    Some(Rule::Term { ctx, sort, .. }) => (ctx, sort),
                    Some(_) => return Err(ProofError::NotAConstructor(head.clone())),
                    None => return Err(ProofError::UnknownRule(head.clone())),
                };
                let (ls, rs) = self.check_args(head, rctx, ps)?;
                let gl = MetaSubst::zip(&rctx.names(), &ls);
                Ok(Equation {
                    lhs: Term::Con(head.clone(), ls),
                    rhs: Term::Con(head.clone(), rs),
                    sort: sort.subst(&gl),
                })
            }
            EqProof::Axiom(name, inst) => {
                let (rctx, lhs, rhs, sort) = match self.lang.get(name) {
                    Some(Rule::TermEq { ctx, lhs, rhs, sort }) => (ctx, lhs, rhs, sort),
                    Some(_) => return Err(ProofError::NotAnEquation(name.clone())),
                    None => return Err(ProofError::UnknownRule(name.clone())),
                };
                self.check_instance(name, rctx, inst)?;
                Ok(Equation { lhs: lhs.subst(inst), rhs: rhs.subst(inst), sort: sort.subst(inst) })
            }
            EqProof::ConvSort(sp, p) => {
                let e = self.check(p)?;
                let se = self.check_sort(sp)?;
                if e.sort != se.lhs {
                    return Err(ProofError::SortMismatch { expected: se.lhs, got: e.sort });
                }
                Ok(Equation { lhs: e.lhs, rhs: e.rhs, sort: se.rhs })
            }
        }
    }

    fn check_sort(&mut self, p: &SortEqProof) -> Result<SortEquation, ProofError> {
        match p {
            SortEqProof::Refl(s) => {
                self.checker.check_sort(self.ctx, s).map_err(ProofError::IllTypedRefl)?;
                Ok(SortEquation { lhs: s.clone(), rhs: s.clone() })
            }
            SortEqProof::Sym(p) => {
                let e = self.check_sort(p)?;
                Ok(SortEquation { lhs: e.rhs, rhs: e.lhs })
            }
            SortEqProof::Trans(p, q) => {
                let a = self.check_sort(p)?;
                let b = self.check_sort(q)?;
                if a.rhs != b.lhs {
                    return Err(ProofError::EndpointMismatch { left: a.rhs.to_string(), right: b.lhs.to_string() });
                }
                Ok(SortEquation { lhs: a.lhs, rhs: b.rhs })
            }
            SortEqProof::Cong(head, ps) => {
                let rctx = match self.lang.get(head) {
                    Some(Rule::Sort { ctx, .. }) => ctx,
                    Some(_) => return Err(ProofError::NotAConstructor(head.clone())),
                    None => return Err(ProofError::UnknownRule(head.clone())),
                };
                let (ls, rs) = self.check_args(head, rctx, ps)?;
                Ok(SortEquation { lhs: Sort::new(head.clone(), ls), rhs: Sort::new(head.clone(), rs) })
            }
            SortEqProof::Axiom(name, inst) => {
                let (rctx, lhs, rhs) = match self.lang.get(name) {
                    Some(Rule::SortEq { ctx, lhs, rhs }) => (ctx, lhs, rhs),
                    Some(_) => return Err(ProofError::NotAnEquation(name.clone())),
                    None => return Err(ProofError::UnknownRule(name.clone())),
                };
                self.check_instance(name, rctx, inst)?;
                Ok(SortEquation { lhs: lhs.subst(inst), rhs: rhs.subst(inst) })
            }
        }
    }

    /// Checks argument proofs against a constructor's ctx; each proof must be
    /// at the ctx sort instantiated with the left-hand arguments.
    fn check_args(&mut self, head: &Name, rctx: &Ctx, ps: &[EqProof]) -> Result<(Vec<Term>, Vec<Term>), ProofError> {
        if ps.len() != rctx.len() {
            return Err(ProofError::CongArity { head: head.clone(), expected: rctx.len(), got: ps.len() });
        }
        let mut ls = Vec::with_capacity(ps.len());
        let mut rs = Vec::with_capacity(ps.len());
        let mut gl = MetaSubst::new();
        for ((x, xsort), p) in rctx.iter().zip(ps) {
            let e = self.check(p)?;
            let want = xsort.subst(&gl);
            if e.sort != want {
                return Err(ProofError::SortMismatch { expected: want, got: e.sort });
            }
            gl.insert(x.clone(), e.lhs.clone());
            ls.push(e.lhs);
            rs.push(e.rhs);
        }
        Ok((ls, rs))
    }

    fn check_instance(&mut self, rule: &Name, rctx: &Ctx, inst: &MetaSubst) -> Result<(), ProofError> {
        if inst.len() != rctx.len() || rctx.iter().any(|(x, _)| !inst.contains(x)) {
            return Err(ProofError::BadAxiomInstance {
                rule: rule.clone(),
                reason: format!(
                    "instance domain {:?} differs from rule context {:?}",
                    inst.keys().collect::<Vec<_>>(),
                    rctx.names()
                ),
            });
        }
        for (x, xsort) in rctx.iter() {
            let t = inst.get(x).expect("domain checked above");
            self.checker.check_term(self.ctx, t, &xsort.subst(inst)).map_err(|e| ProofError::BadAxiomInstance {
                rule: rule.clone(),
                reason: format!("`{x}` := {t}: {e}"),
            })?;
        }
        Ok(())
    }
}

/// Instantiates the metavariables of a proof.
pub fn subst_into_proof(gamma: &MetaSubst, p: &EqProof) -> EqProof {
    if gamma.is_empty() {
        return p.clone();
    }
    match p {
        EqProof::Refl(t) => EqProof::Refl(t.subst(gamma)),
        EqProof::Sym(p) => EqProof::Sym(Box::new(subst_into_proof(gamma, p))),
        EqProof::Trans(p, q) => EqProof::trans(subst_into_proof(gamma, p), subst_into_proof(gamma, q)),
        EqProof::Cong(h, ps) => EqProof::Cong(h.clone(), ps.iter().map(|p| subst_into_proof(gamma, p)).collect()),
        EqProof::Axiom(n, inst) => EqProof::Axiom(n.clone(), inst.map_terms(|t| t.subst(gamma))),
        EqProof::ConvSort(sp, p) => EqProof::conv(subst_into_sort_proof(gamma, sp), subst_into_proof(gamma, p)),
    }
}

pub fn subst_into_sort_proof(gamma: &MetaSubst, p: &SortEqProof) -> SortEqProof {
    match p {
        SortEqProof::Refl(s) => SortEqProof::Refl(s.subst(gamma)),
        SortEqProof::Sym(p) => SortEqProof::Sym(Box::new(subst_into_sort_proof(gamma, p))),
        SortEqProof::Trans(p, q) => SortEqProof::trans(subst_into_sort_proof(gamma, p), subst_into_sort_proof(gamma, q)),
        SortEqProof::Cong(h, ps) => SortEqProof::Cong(h.clone(), ps.iter().map(|p| subst_into_proof(gamma, p)).collect()),
        SortEqProof::Axiom(n, inst) => SortEqProof::Axiom(n.clone(), inst.map_terms(|t| t.subst(gamma))),
    }
}

fn write_inst(f: &mut fmt::Formatter<'_>, head: &str, n: &Name, inst: &MetaSubst) -> fmt::Result {
    write!(f, "({head} {n}")?;
    for (x, t) in inst.iter() {
        write!(f, " ({x} {t})")?;
    }
    write!(f, ")")
}

/// Canonical text form, also the input syntax of proof files.
impl fmt::Display for EqProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqProof::Refl(t) => write!(f, "(refl {t})"),
            EqProof::Sym(p) => write!(f, "(sym {p})"),
            EqProof::Trans(p, q) => write!(f, "(trans {p} {q})"),
            EqProof::Cong(h, ps) => {
                write!(f, "(cong {h}")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            EqProof::Axiom(n, inst) => write_inst(f, "axiom", n, inst),
            EqProof::ConvSort(sp, p) => write!(f, "(conv {sp} {p})"),
        }
    }
}

impl fmt::Display for SortEqProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortEqProof::Refl(s) => write!(f, "(srefl {s})"),
            SortEqProof::Sym(p) => write!(f, "(ssym {p})"),
            SortEqProof::Trans(p, q) => write!(f, "(strans {p} {q})"),
            SortEqProof::Cong(h, ps) => {
                write!(f, "(scong {h}")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            SortEqProof::Axiom(n, inst) => write_inst(f, "saxiom", n, inst),
        }
    }
}

impl fmt::Debug for EqProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for SortEqProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// SHA-256 of the canonical text form, hex encoded.
pub fn proof_digest(p: &EqProof) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(p.to_string().as_bytes()))
}

pub fn sort_proof_digest(p: &SortEqProof) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(p.to_string().as_bytes()))
}
