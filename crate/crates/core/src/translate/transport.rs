//! Carrying source equality proofs across a compiler whose obligations were
//! discharged: the executable content of "preserving compilers preserve
//! semantics".

use std::collections::BTreeMap;

use super::{CaseOut, Compiler, DischargeReport, Evidence, Status, TranslateError};
use crate::kernel::{Ctx, Lang, MetaSubst, Name, Rule, Sort, Term};
use crate::proofkit::{check_eq, subst_into_proof, subst_into_sort_proof, EqProof, SortEqProof};
use crate::rewrite::{RewriteConfig, Rewriter};

/// Lifted proof of one case parameter: `lhs = rhs` in the target.
struct ParamProof {
    lhs: Term,
    rhs: Term,
    proof: EqProof,
    sort: Sort,
}

pub struct Transport<'a> {
    cmp: &'a Compiler,
    source: &'a Lang,
    target: &'a Lang,
    report: &'a DischargeReport,
    source_ctx: &'a Ctx,
    target_ctx: Ctx,
    rw: Rewriter<'a>,
}

impl<'a> Transport<'a> {
    pub fn new(
        cmp: &'a Compiler,
        source: &'a Lang,
        target: &'a Lang,
        report: &'a DischargeReport,
        source_ctx: &'a Ctx,
    ) -> Result<Self, TranslateError> {
        let target_ctx = cmp.compile_ctx(source_ctx)?;
        let cfg = RewriteConfig { verify: false, ..RewriteConfig::from_env() };
        Ok(Transport { cmp, source, target, report, source_ctx, target_ctx, rw: Rewriter::new(target, cfg) })
    }

    pub fn target_ctx(&self) -> &Ctx {
        &self.target_ctx
    }

    fn fit(&self, p: EqProof, natural: &Sort, want: &Sort) -> Result<EqProof, TranslateError> {
        if natural == want {
            return Ok(p);
        }
        let sp = self
            .rw
            .convert_sorts(&self.target_ctx, natural, want)
            .ok_or_else(|| TranslateError::Transport(format!("cannot convert {natural} to {want}")))?;
        Ok(EqProof::conv(sp, p))
    }

    fn target_eq(&self, p: &EqProof) -> Result<(Term, Term, Sort), TranslateError> {
        let eq = check_eq(self.target, &self.target_ctx, p).map_err(|e| TranslateError::Transport(e.to_string()))?;
        Ok((eq.lhs, eq.rhs, eq.sort))
    }

    /// Transports `p`; the result proves the compiled equation at the compiled sort.
    pub fn proof(&self, p: &EqProof) -> Result<EqProof, TranslateError> {
        let src = check_eq(self.source, self.source_ctx, p).map_err(|e| TranslateError::Transport(format!("source proof: {e}")))?;
        let want = self.cmp.compile_sort(&src.sort)?;
        let raw = self.raw(p)?;
        let (_, _, natural) = self.target_eq(&raw)?;
        self.fit(raw, &natural, &want)
    }

    fn raw(&self, p: &EqProof) -> Result<EqProof, TranslateError> {
        Ok(match p {
            EqProof::Refl(t) => EqProof::Refl(self.cmp.compile_term(t)?),
            EqProof::Sym(q) => EqProof::Sym(Box::new(self.proof(q)?)),
            EqProof::Trans(q, r) => EqProof::trans(self.proof(q)?, self.proof(r)?),
            EqProof::Cong(head, ps) => {
                let case = self.cmp.get(head).ok_or_else(|| TranslateError::MissingCase(head.clone()))?;
                let CaseOut::Term(out) = &case.out else { return Err(TranslateError::WrongCaseKind(head.clone())) };
                let env = self.param_proofs(&case.params, ps)?;
                self.lift(out, &env, None)?
            }
            EqProof::Axiom(name, inst) => {
                let entry = self.report.get(name).ok_or_else(|| TranslateError::Transport(format!("no report entry for `{name}`")))?;
                let proof = entry
                    .status
                    .term_proof()
                    .ok_or_else(|| TranslateError::Transport(format!("obligation `{name}` has no equation proof")))?;
                subst_into_proof(&self.cmp.compile_subst(inst)?, proof)
            }
            EqProof::ConvSort(sp, q) => EqProof::conv(self.sort_proof(sp)?, self.proof(q)?),
        })
    }

    fn param_proofs(&self, params: &[Name], ps: &[EqProof]) -> Result<BTreeMap<Name, ParamProof>, TranslateError> {
        if params.len() != ps.len() {
            return Err(TranslateError::Transport("congruence arity differs from case parameters".into()));
        }
        let mut env = BTreeMap::new();
        for (x, p) in params.iter().zip(ps) {
            let proof = self.proof(p)?;
            let (lhs, rhs, sort) = self.target_eq(&proof)?;
            env.insert(x.clone(), ParamProof { lhs, rhs, proof, sort });
        }
        Ok(env)
    }

    /// Lifts parameter proofs through a case output by congruence.
    fn lift(&self, out: &Term, env: &BTreeMap<Name, ParamProof>, want: Option<&Sort>) -> Result<EqProof, TranslateError> {
        let gl: MetaSubst = env.iter().map(|(x, pp)| (x.clone(), pp.lhs.clone())).collect();
        let varies = |t: &Term| t.vars().iter().any(|x| env.get(x).is_some_and(|pp| pp.lhs != pp.rhs));
        match out {
            Term::Var(x) => {
                let pp = env.get(x).ok_or_else(|| TranslateError::Transport(format!("free variable `{x}` in case output")))?;
                match want {
                    Some(w) => self.fit(pp.proof.clone(), &pp.sort, w),
                    None => Ok(pp.proof.clone()),
                }
            }
            Term::Con(..) if !varies(out) => {
                let t = out.subst(&gl);
                let p = EqProof::Refl(t.clone());
                match want {
                    Some(w) => {
                        let (_, _, natural) = self.target_eq(&p)?;
                        self.fit(p, &natural, w)
                    }
                    None => Ok(p),
                }
            }
            Term::Con(g, args) => {
                let (rctx, rsort) = match self.target.get(g) {
                    Some(Rule::Term { ctx, sort, .. }) => (ctx, sort),
                    _ => return Err(TranslateError::Transport(format!("`{g}` is not a target term former"))),
                };
                let inst: Vec<Term> = args.iter().map(|a| a.subst(&gl)).collect();
                let g_l = MetaSubst::zip(&rctx.names(), &inst);
                let arg_proofs = args
                    .iter()
                    .zip(rctx.iter())
                    .map(|(a, (_, s))| self.lift(a, env, Some(&s.subst(&g_l))))
                    .collect::<Result<Vec<_>, _>>()?;
                let p = EqProof::Cong(g.clone(), arg_proofs);
                match want {
                    Some(w) => self.fit(p, &rsort.subst(&g_l), w),
                    None => Ok(p),
                }
            }
        }
    }

    pub fn sort_proof(&self, p: &SortEqProof) -> Result<SortEqProof, TranslateError> {
        Ok(match p {
            SortEqProof::Refl(s) => SortEqProof::Refl(self.cmp.compile_sort(s)?),
            SortEqProof::Sym(q) => SortEqProof::Sym(Box::new(self.sort_proof(q)?)),
            SortEqProof::Trans(q, r) => SortEqProof::trans(self.sort_proof(q)?, self.sort_proof(r)?),
            SortEqProof::Cong(head, ps) => {
                let case = self.cmp.get(head).ok_or_else(|| TranslateError::MissingCase(head.clone()))?;
                let CaseOut::Sort(out) = &case.out else { return Err(TranslateError::WrongCaseKind(head.clone())) };
                let env = self.param_proofs(&case.params, ps)?;
                let rctx = match self.target.get(&out.head) {
                    Some(Rule::Sort { ctx, .. }) => ctx,
                    _ => return Err(TranslateError::Transport(format!("`{}` is not a target sort former", out.head))),
                };
                let gl: MetaSubst = env.iter().map(|(x, pp)| (x.clone(), pp.lhs.clone())).collect();
                let inst: Vec<Term> = out.args.iter().map(|a| a.subst(&gl)).collect();
                let g_l = MetaSubst::zip(&rctx.names(), &inst);
                let arg_proofs = out
                    .args
                    .iter()
                    .zip(rctx.iter())
                    .map(|(a, (_, s))| self.lift(a, &env, Some(&s.subst(&g_l))))
                    .collect::<Result<Vec<_>, _>>()?;
                SortEqProof::Cong(out.head.clone(), arg_proofs)
            }
            SortEqProof::Axiom(name, inst) => {
                let entry = self.report.get(name).ok_or_else(|| TranslateError::Transport(format!("no report entry for `{name}`")))?;
                let Status::Auto { evidence: Evidence::Sort(proof), .. } = &entry.status else {
                    return Err(TranslateError::Transport(format!("obligation `{name}` has no sort proof")));
                };
                subst_into_sort_proof(&self.cmp.compile_subst(inst)?, proof)
            }
        })
    }
}

/// Transports a source proof under `source_ctx` to the target.
pub fn transport_proof(
    cmp: &Compiler,
    source: &Lang,
    target: &Lang,
    report: &DischargeReport,
    source_ctx: &Ctx,
    p: &EqProof,
) -> Result<EqProof, TranslateError> {
    Transport::new(cmp, source, target, report, source_ctx)?.proof(p)
}
