//! Random derivations in a language, random supersets of a language, and
//! single-node proof mutations.

use gatforge::elaborator::wf_extension;
use gatforge::kernel::{Ctx, Lang, MetaSubst, Name, Rule, Sort, Term};
use gatforge::proofkit::{check_eq, EqProof, Equation};
use gatforge::rewrite::match_pattern;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

pub fn depth(p: &EqProof) -> usize {
    match p {
        EqProof::Refl(_) | EqProof::Axiom(..) => 1,
        EqProof::Sym(q) => 1 + depth(q),
        EqProof::Trans(q, r) => 1 + depth(q).max(depth(r)),
        EqProof::Cong(_, ps) => 1 + ps.iter().map(depth).max().unwrap_or(0),
        EqProof::ConvSort(_, q) => 1 + depth(q),
    }
}

fn fresh(base: &Name, ctx: &Ctx) -> Name {
    (0..).map(|k| Name::new(format!("{base}_{k}"))).find(|n| !ctx.contains(n)).unwrap()
}

/// Wraps `p : a = b : S` as an argument of a term former whose argument
/// sort matches `S`; the former's other arguments become fresh variables.
fn wrap_in_former<R: Rng>(lang: &Lang, ctx: &Ctx, p: EqProof, sort: &Sort, rng: &mut R) -> Option<(Ctx, EqProof)> {
    let mut sites = Vec::new();
    for (h, r) in lang.constructors() {
        let Rule::Term { ctx: rctx, explicit, .. } = r else { continue };
        for x in explicit {
            let s = rctx.get(x).unwrap();
            if let Some(m) = match_pattern(&s.as_term(), &sort.as_term()) {
                sites.push((h.clone(), rctx.clone(), x.clone(), m));
            }
        }
    }
    let (h, rctx, x, m) = sites.choose(rng)?.clone();
    let mut new_ctx = ctx.clone();
    let mut gamma = m;
    for (y, ys) in rctx.iter() {
        if *y == x || gamma.contains(y) {
            continue;
        }
        let y2 = fresh(y, &new_ctx);
        new_ctx.push(y2.clone(), ys.subst(&gamma));
        gamma.insert(y.clone(), Term::Var(y2));
    }
    let args = rctx.names().iter().map(|y| if *y == x { p.clone() } else { EqProof::Refl(gamma.get(y).unwrap().clone()) }).collect();
    Some((new_ctx, EqProof::Cong(h, args)))
}

/// A random derivation of depth at most `max_depth`, accepted by the
/// checker, built from one equation instance.
pub fn random_proof<R: Rng>(lang: &Lang, max_depth: usize, rng: &mut R) -> Option<(Ctx, EqProof, Equation)> {
    let (name, rule) = lang.equations().filter(|(_, r)| matches!(r, Rule::TermEq { .. })).choose(rng)?;
    let Rule::TermEq { ctx, lhs, .. } = rule else { unreachable!() };
    let mut ctx = ctx.clone();
    let id: MetaSubst = ctx.names().into_iter().map(|x| (x.clone(), Term::Var(x))).collect();
    let mut p = if rng.gen_bool(0.85) { EqProof::Axiom(name.clone(), id) } else { EqProof::Refl(lhs.clone()) };
    let budget = rng.gen_range(1..=max_depth);
    while depth(&p) < budget {
        let eq = check_eq(lang, &ctx, &p).ok()?;
        p = match rng.gen_range(0..4) {
            0 => EqProof::Sym(Box::new(p)),
            1 => EqProof::Trans(Box::new(p), Box::new(EqProof::Refl(eq.rhs))),
            2 if depth(&p) + 2 <= budget => {
                let back = EqProof::Sym(Box::new(p.clone()));
                EqProof::Trans(Box::new(p), Box::new(back))
            }
            _ => match wrap_in_former(lang, &ctx, p.clone(), &eq.sort, rng) {
                Some((c, q)) => {
                    ctx = c;
                    q
                }
                None => EqProof::Sym(Box::new(p)),
            },
        };
    }
    let eq = check_eq(lang, &ctx, &p).ok()?;
    Some((ctx, p, eq))
}

/// `lang` followed by up to `max_new` fresh rules: sorts, constants of an
/// existing sort, and equations between fresh constants. The extension is
/// checked to be well formed.
pub fn random_superset<R: Rng>(lang: &Lang, max_new: usize, tag: usize, rng: &mut R) -> Lang {
    let sorts: Vec<(Name, Ctx)> = lang
        .iter()
        .filter_map(|(n, r)| match r {
            Rule::Sort { ctx, .. } => Some((n.clone(), ctx.clone())),
            _ => None,
        })
        .collect();
    let mut out = lang.clone();
    let mut consts: Vec<(Name, Ctx, Sort)> = Vec::new();
    for k in 0..rng.gen_range(1..=max_new) {
        let name = Name::new(format!("fresh{tag}_{k}"));
        let choice = rng.gen_range(0..3);
        let rule = if choice == 0 || sorts.is_empty() {
            Rule::Sort { ctx: Ctx::new(), explicit: vec![] }
        } else if choice == 1 || consts.is_empty() {
            let (s, sctx) = sorts.choose(rng).unwrap().clone();
            let sort = Sort::new(s, sctx.names().into_iter().map(Term::Var).collect());
            consts.push((name.clone(), sctx.clone(), sort.clone()));
            Rule::Term { ctx: sctx, explicit: vec![], sort }
        } else {
            let (c, cctx, sort) = consts.choose(rng).unwrap().clone();
            let vars: Vec<Term> = cctx.names().into_iter().map(Term::Var).collect();
            let other = consts.iter().filter(|(_, _, s)| *s == sort).choose(rng).unwrap().0.clone();
            Rule::TermEq { ctx: cctx, lhs: Term::Con(c, vars.clone()), rhs: Term::Con(other, vars), sort }
        };
        out.push(name, rule).unwrap();
    }
    let wf = wf_extension(&out, lang.len());
    assert!(wf.ok, "random extension is ill formed: {:?}", wf.diagnostics);
    out
}

fn nodes(p: &EqProof) -> usize {
    match p {
        EqProof::Refl(_) | EqProof::Axiom(..) => 1,
        EqProof::Sym(q) | EqProof::ConvSort(_, q) => 1 + nodes(q),
        EqProof::Trans(q, r) => 1 + nodes(q) + nodes(r),
        EqProof::Cong(_, ps) => 1 + ps.iter().map(nodes).sum::<usize>(),
    }
}

/// The `i`th node in preorder, mutably.
fn node_mut(p: &mut EqProof, mut i: usize) -> Option<&mut EqProof> {
    if i == 0 {
        return Some(p);
    }
    i -= 1;
    match p {
        EqProof::Refl(_) | EqProof::Axiom(..) => None,
        EqProof::Sym(q) | EqProof::ConvSort(_, q) => node_mut(q, i),
        EqProof::Trans(q, r) => {
            let n = nodes(q);
            if i < n {
                node_mut(q, i)
            } else {
                node_mut(r, i - n)
            }
        }
        EqProof::Cong(_, ps) => {
            for q in ps {
                let n = nodes(q);
                if i < n {
                    return node_mut(q, i);
                }
                i -= n;
            }
            None
        }
    }
}

fn subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    for a in t.args() {
        subterms(a, out);
    }
}

/// Changes one node of `p`. Nodes that prove a reflexive equation are only
/// changed by replacing their term, since flipping or reordering them is
/// harmless by design.
pub fn mutate<R: Rng>(lang: &Lang, ctx: &Ctx, p: &EqProof, rng: &mut R) -> Option<EqProof> {
    let mut q = p.clone();
    let i = rng.gen_range(0..nodes(p));
    let node = node_mut(&mut q, i)?;
    let reflexive = check_eq(lang, ctx, node).map(|e| e.lhs == e.rhs).unwrap_or(false);
    let replacement = match node.clone() {
        EqProof::Refl(t) => {
            let mut pool = Vec::new();
            subterms(&t, &mut pool);
            pool.extend(ctx.names().into_iter().map(Term::Var));
            let other = pool.into_iter().filter(|u| *u != t).choose(rng)?;
            EqProof::Refl(other)
        }
        _ if reflexive => return None,
        EqProof::Axiom(name, inst) => {
            if rng.gen_bool(0.5) {
                let other = lang.equations().map(|(n, _)| n.clone()).filter(|n| *n != name).choose(rng)?;
                EqProof::Axiom(other, inst)
            } else {
                let keys: Vec<Name> = inst.iter().map(|(k, _)| k.clone()).collect();
                let k = keys.choose(rng)?;
                let cur = inst.get(k).unwrap().clone();
                let mut pool = Vec::new();
                for (_, v) in inst.iter() {
                    subterms(v, &mut pool);
                }
                let other = pool.into_iter().filter(|u| *u != cur).choose(rng)?;
                let mut inst2 = inst.clone();
                inst2.insert(k.clone(), other);
                EqProof::Axiom(name, inst2)
            }
        }
        EqProof::Sym(inner) => *inner,
        EqProof::Trans(a, b) => {
            if rng.gen_bool(0.5) && a != b {
                EqProof::Trans(b, a)
            } else {
                EqProof::Sym(Box::new(EqProof::Trans(a, b)))
            }
        }
        EqProof::Cong(h, ps) => {
            let arity = ps.len();
            let others: Vec<Name> = lang
                .constructors()
                .filter(|(n, r)| **n != h && r.ctx().len() == arity && matches!(r, Rule::Term { .. }))
                .map(|(n, _)| n.clone())
                .collect();
            match others.choose(rng) {
                Some(o) if rng.gen_bool(0.5) => EqProof::Cong(o.clone(), ps),
                _ => EqProof::Sym(Box::new(EqProof::Cong(h, ps))),
            }
        }
        other @ EqProof::ConvSort(..) => EqProof::Sym(Box::new(other)),
    };
    *node = replacement;
    (q != *p).then_some(q)
}
