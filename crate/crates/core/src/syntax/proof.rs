//! Proof trees in text form. Terms inside proofs are written in full form;
//! an atom is a context variable if the ambient context declares it and a
//! nullary constructor otherwise.

use super::ast::name_of;
use super::sexp::{parse_sexps, Sexp, SyntaxError};
use crate::kernel::{Ctx, MetaSubst, Name, Sort, Term};
use crate::proofkit::{EqProof, SortEqProof};

fn err(s: &Sexp, msg: impl Into<String>) -> SyntaxError {
    SyntaxError::new(s.pos(), msg)
}

pub fn parse_term(s: &Sexp, ctx: &Ctx) -> Result<Term, SyntaxError> {
    match s {
        Sexp::Atom(..) => {
            let x = name_of(s)?;
            Ok(if ctx.contains(&x) { Term::Var(x) } else { Term::Con(x, Vec::new()) })
        }
        Sexp::List(items, _) => {
            let (h, args) = items.split_first().ok_or_else(|| err(s, "empty term"))?;
            Ok(Term::Con(name_of(h)?, args.iter().map(|a| parse_term(a, ctx)).collect::<Result<_, _>>()?))
        }
    }
}

fn parse_sort(s: &Sexp, ctx: &Ctx) -> Result<Sort, SyntaxError> {
    match parse_term(s, ctx)? {
        Term::Con(h, args) => Ok(Sort::new(h, args)),
        Term::Var(x) => Err(err(s, format!("`{x}` is a variable, not a sort"))),
    }
}

fn parse_inst(items: &[Sexp], ctx: &Ctx) -> Result<MetaSubst, SyntaxError> {
    let mut inst = MetaSubst::new();
    for item in items {
        match item.as_list() {
            Some([x, t]) => {
                inst.insert(name_of(x)?, parse_term(t, ctx)?);
            }
            _ => return Err(err(item, "instantiations have the form `(name term)`")),
        }
    }
    Ok(inst)
}

fn form(s: &Sexp) -> Result<(&str, &[Sexp]), SyntaxError> {
    let items = s.as_list().ok_or_else(|| err(s, "expected a proof form"))?;
    let kw = s.keyword().ok_or_else(|| err(s, "expected a proof form"))?;
    Ok((kw, &items[1..]))
}

fn rule_name(s: &Sexp, rest: &[Sexp]) -> Result<Name, SyntaxError> {
    name_of(rest.first().ok_or_else(|| err(s, "missing rule name"))?)
}

pub fn parse_proof(s: &Sexp, ctx: &Ctx) -> Result<EqProof, SyntaxError> {
    let (kw, rest) = form(s)?;
    Ok(match (kw, rest) {
        ("refl", [t]) => EqProof::Refl(parse_term(t, ctx)?),
        ("sym", [p]) => EqProof::Sym(Box::new(parse_proof(p, ctx)?)),
        ("trans", [p, q]) => EqProof::Trans(Box::new(parse_proof(p, ctx)?), Box::new(parse_proof(q, ctx)?)),
        ("cong", [_, ps @ ..]) => {
            EqProof::Cong(rule_name(s, rest)?, ps.iter().map(|p| parse_proof(p, ctx)).collect::<Result<_, _>>()?)
        }
        ("axiom", [_, inst @ ..]) => EqProof::Axiom(rule_name(s, rest)?, parse_inst(inst, ctx)?),
        ("conv", [sp, p]) => EqProof::ConvSort(Box::new(parse_sort_proof(sp, ctx)?), Box::new(parse_proof(p, ctx)?)),
        _ => return Err(err(s, format!("malformed `{kw}` proof"))),
    })
}

pub fn parse_sort_proof(s: &Sexp, ctx: &Ctx) -> Result<SortEqProof, SyntaxError> {
    let (kw, rest) = form(s)?;
    Ok(match (kw, rest) {
        ("srefl", [t]) => SortEqProof::Refl(parse_sort(t, ctx)?),
        ("ssym", [p]) => SortEqProof::Sym(Box::new(parse_sort_proof(p, ctx)?)),
        ("strans", [p, q]) => {
            SortEqProof::Trans(Box::new(parse_sort_proof(p, ctx)?), Box::new(parse_sort_proof(q, ctx)?))
        }
        ("scong", [_, ps @ ..]) => {
            SortEqProof::Cong(rule_name(s, rest)?, ps.iter().map(|p| parse_proof(p, ctx)).collect::<Result<_, _>>()?)
        }
        ("saxiom", [_, inst @ ..]) => SortEqProof::Axiom(rule_name(s, rest)?, parse_inst(inst, ctx)?),
        _ => return Err(err(s, format!("malformed `{kw}` sort proof"))),
    })
}

pub fn print_proof(p: &EqProof) -> String {
    p.to_string()
}

/// Parses a single proof from text.
pub fn parse_proof_text(text: &str, ctx: &Ctx) -> Result<EqProof, SyntaxError> {
    match parse_sexps(text)?.as_slice() {
        [s] => parse_proof(s, ctx),
        _ => Err(SyntaxError::new(Default::default(), "expected exactly one proof")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Sort;

    #[test]
    fn printed_proofs_parse_back() {
        let ctx = Ctx::from_entries(vec![("n".into(), Sort::constant("nat"))]);
        let mut inst = MetaSubst::new();
        inst.insert("m", Term::con("s", vec![Term::var("n")]));
        let p = EqProof::Trans(
            Box::new(EqProof::Axiom("plus-z".into(), inst)),
            Box::new(EqProof::Cong("s".into(), vec![EqProof::Refl(Term::constant("z"))])),
        );
        assert_eq!(parse_proof_text(&print_proof(&p), &ctx).unwrap(), p);
    }
}
