//! Substitution equations for constructors of an explicit-substitution
//! calculus: pushing a substitution through one constructor.

use super::{fresh_name, MetagenError};
use crate::elaborator::{CalculusNames, Elaborator, SurfaceTerm};
use crate::kernel::{Lang, Name, Rule, Sort, Term};

/// Finds the substitution operator acting on sort `head`: a term former with
/// exactly two explicit arguments, a substitution then an `head`, whose
/// result is again an `head`.
pub fn subst_operator(lang: &Lang, head: &Name, calc: &CalculusNames) -> Option<Name> {
    lang.constructors().find_map(|(n, r)| match r {
        Rule::Term { ctx, explicit, sort } if explicit.len() == 2 && sort.head == *head => {
            let s0 = ctx.get(&explicit[0])?;
            let s1 = ctx.get(&explicit[1])?;
            (s0.head == calc.sub_sort && s1.head == *head).then(|| n.clone())
        }
        _ => None,
    })
}

/// `k` if `t` is `ext^k(Var g)`.
fn ext_depth(t: &Term, g: &Name, calc: &CalculusNames) -> Option<usize> {
    match t {
        Term::Var(x) if x == g => Some(0),
        Term::Con(h, args) if *h == calc.ext && args.len() == 2 => ext_depth(&args[0], g, calc).map(|k| k + 1),
        _ => None,
    }
}

fn lifted(sub: SurfaceTerm, k: usize, calc: &CalculusNames) -> SurfaceTerm {
    (0..k).fold(sub, |g, _| {
        SurfaceTerm::App(
            calc.snoc.clone(),
            vec![
                SurfaceTerm::App(calc.cmp.clone(), vec![SurfaceTerm::Atom(calc.wkn.clone()), g]),
                SurfaceTerm::Atom(calc.hd.clone()),
            ],
        )
    })
}

/// The rule `c-subst`: `X_subst g (c a…) = c a'…` where each explicit
/// argument whose sort lives in an extension of the constructor's context is
/// substituted under the matching number of binders.
pub fn gen_subst_eq(lang: &Lang, con: &Name, calc: &CalculusNames) -> Result<(Name, Rule), MetagenError> {
    let (ctx, explicit, sort) = match lang.get(con) {
        Some(Rule::Term { ctx, explicit, sort }) => (ctx, explicit, sort),
        Some(_) => return Err(MetagenError::NotATermFormer(con.clone())),
        None => return Err(MetagenError::UnknownRule(con.clone())),
    };
    let op = subst_operator(lang, &sort.head, calc)
        .ok_or_else(|| MetagenError::NotASubstLanguage(format!("no substitution operator for sort `{}`", sort.head)))?;
    let g_ctx = match sort.args.first() {
        Some(Term::Var(g)) if ctx.get(g).is_some_and(|s| s.head == calc.ctx_sort) => g.clone(),
        _ => {
            return Err(MetagenError::NotASubstLanguage(format!(
                "result sort {sort} of `{con}` is not indexed by a context variable"
            )))
        }
    };

    let target = fresh_name("D", ctx);
    let mut new_ctx = ctx.clone();
    new_ctx.push(target.clone(), Sort::constant(calc.ctx_sort.clone()));
    let sub = fresh_name("g", &new_ctx);
    new_ctx.push(sub.clone(), Sort::new(calc.sub_sort.clone(), vec![Term::Var(target), Term::Var(g_ctx.clone())]));

    let con_args: Vec<SurfaceTerm> = explicit.iter().cloned().map(SurfaceTerm::Atom).collect();
    let lhs_surface = SurfaceTerm::App(op, vec![SurfaceTerm::Atom(sub.clone()), SurfaceTerm::App(con.clone(), con_args)]);
    let mut rhs_args = Vec::new();
    for x in explicit {
        let s = ctx.get(x).expect("explicit arguments are in the context");
        let arg = SurfaceTerm::Atom(x.clone());
        if !s.vars().contains(&g_ctx) {
            rhs_args.push(arg);
            continue;
        }
        let k = s
            .args
            .first()
            .and_then(|a| ext_depth(a, &g_ctx, calc))
            .ok_or_else(|| MetagenError::NotASubstLanguage(format!("argument `{x}` of `{con}` has sort {s}")))?;
        let arg_op = subst_operator(lang, &s.head, calc)
            .ok_or_else(|| MetagenError::NotASubstLanguage(format!("no substitution operator for sort `{}`", s.head)))?;
        rhs_args.push(SurfaceTerm::App(arg_op, vec![lifted(SurfaceTerm::Atom(sub.clone()), k, calc), arg]));
    }
    let rhs_surface = SurfaceTerm::App(con.clone(), rhs_args);

    let elab = Elaborator::new(lang);
    let lhs = elab.term(&new_ctx, &lhs_surface, None).map_err(|e| MetagenError::Elab(con.clone(), e.to_string()))?;
    let lhs_sort = crate::elaborator::infer_sort(lang, &new_ctx, &lhs).map_err(|e| MetagenError::Elab(con.clone(), e.to_string()))?;
    let rhs = elab.term(&new_ctx, &rhs_surface, Some(&lhs_sort)).map_err(|e| MetagenError::Elab(con.clone(), e.to_string()))?;
    let name = Name::new(format!("{con}-subst"));
    Ok((name, Rule::TermEq { ctx: new_ctx, lhs, rhs, sort: lhs_sort }))
}

/// Substitution equations for each named constructor, in order; each is
/// elaborated in `lang`.
pub fn gen_subst_eqs(lang: &Lang, cons: &[Name], calc: &CalculusNames) -> Result<Vec<(Name, Rule)>, MetagenError> {
    cons.iter().map(|c| gen_subst_eq(lang, c, calc)).collect()
}
