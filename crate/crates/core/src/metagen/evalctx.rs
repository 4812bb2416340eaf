//! Evaluation contexts: one context former per evaluation position of a
//! base constructor, plus the plugging equation that unfolds it.

use super::{fresh_name, MetagenError};
use crate::elaborator::{Elaborator, SurfaceTerm};
use crate::kernel::{Ctx, Lang, Name, Rule, Sort, Term};

/// Role of one explicit argument of the base constructor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgKind {
    /// The hole lives here.
    Hole,
    /// Evaluated already; must be a value.
    Value,
    /// Not yet evaluated.
    Expr,
}

impl ArgKind {
    pub fn parse(s: &str) -> Option<ArgKind> {
        match s {
            "E" => Some(ArgKind::Hole),
            "v" => Some(ArgKind::Value),
            "e" => Some(ArgKind::Expr),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalCtxEntry {
    pub name: Name,
    pub base: Name,
    pub kinds: Vec<ArgKind>,
}

/// Names of the sorts and formers the construction uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalCtxNames {
    pub exp: Name,
    pub val: Name,
    pub ret: Name,
    pub ectx: Name,
    pub hole: Name,
    pub plug: Name,
}

impl Default for EvalCtxNames {
    fn default() -> Self {
        EvalCtxNames {
            exp: "exp".into(),
            val: "val".into(),
            ret: "ret".into(),
            ectx: "ectx".into(),
            hole: "hole".into(),
            plug: "plug".into(),
        }
    }
}

fn sort_ctx<'a>(lang: &'a Lang, head: &Name) -> Result<&'a Ctx, MetagenError> {
    match lang.get(head) {
        Some(Rule::Sort { ctx, .. }) => Ok(ctx),
        _ => Err(MetagenError::NotAnEvalLanguage(format!("`{head}` is not a sort"))),
    }
}

/// `ectx`, `hole`, `plug` and the plugging equation for `hole`, derived from
/// the shape of the expression sort `exp G A`.
fn core_rules(lang: &Lang, names: &EvalCtxNames) -> Result<Vec<(Name, Rule)>, MetagenError> {
    let exp_ctx = sort_ctx(lang, &names.exp)?;
    let [(g, g_sort), (_, ty_sort)] = exp_ctx.entries() else {
        return Err(MetagenError::NotAnEvalLanguage(format!("`{}` must take a context and a type", names.exp)));
    };
    let (g, a, b) = (g.clone(), Name::new("A"), Name::new("B"));
    let v = |x: &Name| Term::Var(x.clone());
    let gab = Ctx::new().with(g.clone(), g_sort.clone()).with(a.clone(), ty_sort.clone()).with(b.clone(), ty_sort.clone());
    let ectx_sort = |x: &Name, y: &Name| Sort::new(names.ectx.clone(), vec![v(&g), v(x), v(y)]);
    let exp_sort = |x: &Name| Sort::new(names.exp.clone(), vec![v(&g), v(x)]);

    let ga = Ctx::new().with(g.clone(), g_sort.clone()).with(a.clone(), ty_sort.clone());
    let hole = Rule::Term { ctx: ga.clone(), explicit: vec![], sort: ectx_sort(&a, &a) };
    let plug_ctx = gab.clone().with("E", ectx_sort(&a, &b)).with("e", exp_sort(&a));
    let plug = Rule::Term { ctx: plug_ctx, explicit: vec!["E".into(), "e".into()], sort: exp_sort(&b) };
    let hole_term = Term::con(names.hole.clone(), vec![v(&g), v(&a)]);
    let plug_hole = Rule::TermEq {
        ctx: ga.clone().with("e", exp_sort(&a)),
        lhs: Term::con(names.plug.clone(), vec![v(&g), v(&a), v(&a), hole_term, Term::var("e")]),
        rhs: Term::var("e"),
        sort: exp_sort(&a),
    };
    Ok(vec![
        (names.ectx.clone(), Rule::Sort { ctx: gab.clone(), explicit: gab.names() }),
        (names.hole.clone(), hole),
        (names.plug.clone(), plug),
        (Name::new(format!("{}-{}", names.plug, names.hole)), plug_hole),
    ])
}

fn entry_rules(lang: &Lang, entry: &EvalCtxEntry, names: &EvalCtxNames) -> Result<Vec<(Name, Rule)>, MetagenError> {
    let bad = |msg: String| MetagenError::NotAnEvalLanguage(format!("`{}`: {msg}", entry.name));
    let (ctx, explicit, sort) = match lang.get(&entry.base) {
        Some(Rule::Term { ctx, explicit, sort }) => (ctx, explicit, sort),
        _ => return Err(bad(format!("`{}` is not a term former", entry.base))),
    };
    if entry.kinds.len() != explicit.len() {
        return Err(bad(format!("`{}` has {} explicit arguments", entry.base, explicit.len())));
    }
    if entry.kinds.iter().filter(|k| **k == ArgKind::Hole).count() != 1 {
        return Err(bad("exactly one argument must be the hole".into()));
    }
    let exp_of = |s: &Sort| -> Result<(Term, Term), MetagenError> {
        match s.args.as_slice() {
            [g, t] if s.head == names.exp => Ok((g.clone(), t.clone())),
            _ => Err(bad(format!("{s} is not an expression sort"))),
        }
    };
    let (g_res, t_res) = exp_of(sort)?;
    let ty_sort = sort_ctx(lang, &names.exp)?.entries()[1].1.clone();

    let hole_var = explicit[entry.kinds.iter().position(|k| *k == ArgKind::Hole).unwrap()].clone();
    let x = fresh_name("X", ctx);
    let mut new_ctx = Ctx::new();
    for (y, s) in ctx.iter() {
        let kind = explicit.iter().position(|e| e == y).map(|i| entry.kinds[i]);
        if *y == hole_var {
            new_ctx.push(x.clone(), ty_sort.clone());
        }
        let s = match kind {
            Some(ArgKind::Hole) => {
                let (g, t) = exp_of(s)?;
                Sort::new(names.ectx.clone(), vec![g, Term::Var(x.clone()), t])
            }
            Some(ArgKind::Value) => {
                let (g, t) = exp_of(s)?;
                Sort::new(names.val.clone(), vec![g, t])
            }
            _ => s.clone(),
        };
        new_ctx.push(y.clone(), s);
    }
    let result = Sort::new(names.ectx.clone(), vec![g_res, Term::Var(x.clone()), t_res]);
    let former = Rule::Term { ctx: new_ctx.clone(), explicit: explicit.to_vec(), sort: result };

    let with_former = {
        let mut l = lang.clone();
        l.push(entry.name.clone(), former.clone()).map_err(|e| bad(e.to_string()))?;
        l
    };
    let e0 = fresh_name("e0", &new_ctx);
    let plug_ctx = new_ctx.clone().with(e0.clone(), Sort::new(names.exp.clone(), vec![g_of(&new_ctx, &hole_var)?, Term::Var(x)]));
    let atom = |y: &Name| SurfaceTerm::Atom(y.clone());
    let lhs_s = SurfaceTerm::App(
        names.plug.clone(),
        vec![SurfaceTerm::App(entry.name.clone(), explicit.iter().map(atom).collect()), atom(&e0)],
    );
    let rhs_args = explicit
        .iter()
        .zip(&entry.kinds)
        .map(|(y, k)| match k {
            ArgKind::Hole => SurfaceTerm::App(names.plug.clone(), vec![atom(y), atom(&e0)]),
            ArgKind::Value => SurfaceTerm::App(names.ret.clone(), vec![atom(y)]),
            ArgKind::Expr => atom(y),
        })
        .collect();
    let rhs_s = SurfaceTerm::App(entry.base.clone(), rhs_args);
    let elab = Elaborator::new(&with_former);
    let lhs = elab.term(&plug_ctx, &lhs_s, None).map_err(|e| MetagenError::Elab(entry.name.clone(), e.to_string()))?;
    let eq_sort = crate::elaborator::infer_sort(&with_former, &plug_ctx, &lhs)
        .map_err(|e| MetagenError::Elab(entry.name.clone(), e.to_string()))?;
    let rhs = elab
        .term(&plug_ctx, &rhs_s, Some(&eq_sort))
        .map_err(|e| MetagenError::Elab(entry.name.clone(), e.to_string()))?;
    let eq = Rule::TermEq { ctx: plug_ctx, lhs, rhs, sort: eq_sort };
    Ok(vec![(entry.name.clone(), former), (Name::new(format!("{}-{}", names.plug, entry.name)), eq)])
}

/// The context component of the hole argument's (rewritten) sort.
fn g_of(ctx: &Ctx, hole_var: &Name) -> Result<Term, MetagenError> {
    ctx.get(hole_var)
        .and_then(|s| s.args.first().cloned())
        .ok_or_else(|| MetagenError::NotAnEvalLanguage(format!("hole `{hole_var}` has no context index")))
}

/// Rules for the given evaluation contexts, each former followed by its
/// plugging equation. The core `ectx`/`hole`/`plug` rules are included first
/// unless `lang` already has them.
pub fn gen_eval_ctx(lang: &Lang, entries: &[EvalCtxEntry], names: &EvalCtxNames) -> Result<Vec<(Name, Rule)>, MetagenError> {
    let mut cur = lang.clone();
    let mut out = Vec::new();
    let add = |cur: &mut Lang, rules: Vec<(Name, Rule)>, out: &mut Vec<(Name, Rule)>| -> Result<(), MetagenError> {
        for (n, r) in rules {
            cur.push(n.clone(), r.clone()).map_err(|e| MetagenError::NotAnEvalLanguage(e.to_string()))?;
            out.push((n, r));
        }
        Ok(())
    };
    if !lang.contains(&names.ectx) {
        add(&mut cur, core_rules(lang, names)?, &mut out)?;
    }
    for entry in entries {
        let rules = entry_rules(&cur, entry, names)?;
        add(&mut cur, rules, &mut out)?;
    }
    Ok(out)
}
