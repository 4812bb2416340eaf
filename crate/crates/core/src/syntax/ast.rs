//! Declarations of the language-definition format and their reading from
//! s-expressions.

use super::sexp::{parse_sexps, Pos, Sexp, SyntaxError};
use crate::elaborator::SurfaceTerm;
use crate::kernel::Name;

pub type SurfaceCtx = Vec<(Name, SurfaceTerm)>;

/// Source location of a declaration; ignored by equality so that printed and
/// reparsed declarations compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Loc(pub Pos);

impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl Eq for Loc {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Import(String, Loc),
    Lang(LangDecl),
    Compiler(CompilerDecl),
    Proofs(ProofsDecl),
    ParamSpec(ParamSpecDecl),
    Macro(MacroDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangDecl {
    pub name: Name,
    pub extends: Vec<Name>,
    pub items: Vec<LangItem>,
    pub pos: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LangItem {
    Rule(RuleDecl),
    /// Generate substitution equations for the named constructors.
    GenSubst(Vec<Name>, Loc),
    EvalCtx(Vec<EvalCtxEntryDecl>, Loc),
    Macro(MacroDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleDecl {
    pub name: Name,
    pub body: RuleBody,
    pub pos: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBody {
    Sort { ctx: SurfaceCtx, args: Vec<Name> },
    Term { ctx: SurfaceCtx, args: Vec<Name>, sort: SurfaceTerm },
    Eq { ctx: SurfaceCtx, lhs: SurfaceTerm, rhs: SurfaceTerm, sort: SurfaceTerm },
    SortEq { ctx: SurfaceCtx, lhs: SurfaceTerm, rhs: SurfaceTerm },
}

/// `(ctx_name base k1 k2 …)` where each `k` is `E`, `e` or `v` for the
/// corresponding explicit argument of `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalCtxEntryDecl {
    pub name: Name,
    pub base: Name,
    pub kinds: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroDecl {
    pub name: Name,
    pub params: Vec<Name>,
    pub body: SurfaceTerm,
    pub pos: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilerDecl {
    pub name: Name,
    pub extends: Vec<Name>,
    pub source: Name,
    pub target: Name,
    pub cases: Vec<CaseDecl>,
    pub pos: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseDecl {
    pub rule: Name,
    pub params: Option<Vec<Name>>,
    pub out: SurfaceTerm,
    pub pos: Loc,
}

/// Manual proofs for a compiler's obligations, keyed by source rule. Proof
/// trees stay unparsed until the obligation's context is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofsDecl {
    pub compiler: Name,
    pub proofs: Vec<(Name, Sexp)>,
    pub pos: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSpecDecl {
    pub name: Name,
    pub param: Name,
    pub sort: SurfaceTerm,
    pub marked: Vec<Name>,
    /// Per-rule insertion index into the rule context (default 0).
    pub positions: Vec<(Name, usize)>,
    pub pos: Loc,
}

fn err(pos: Pos, msg: impl Into<String>) -> SyntaxError {
    SyntaxError::new(pos, msg)
}

pub fn name_of(s: &Sexp) -> Result<Name, SyntaxError> {
    match s {
        Sexp::Atom(a, pos) => {
            if a.starts_with('?') {
                return Err(err(*pos, format!("`{a}`: names may not start with `?`")));
            }
            Name::parse(a).ok_or_else(|| err(*pos, "invalid name"))
        }
        Sexp::List(_, pos) => Err(err(*pos, "expected a name, found a list")),
    }
}

pub fn surface_of(s: &Sexp) -> Result<SurfaceTerm, SyntaxError> {
    match s {
        Sexp::Atom(..) => Ok(SurfaceTerm::Atom(name_of(s)?)),
        Sexp::List(items, pos) => {
            let (head, args) = items.split_first().ok_or_else(|| err(*pos, "empty application"))?;
            let head = name_of(head)?;
            let args = args.iter().map(surface_of).collect::<Result<Vec<_>, _>>()?;
            Ok(SurfaceTerm::App(head, args))
        }
    }
}

fn list_of<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp], SyntaxError> {
    s.as_list().ok_or_else(|| err(s.pos(), format!("expected {what}")))
}

/// `(kw item…)`, returning the items.
fn tagged<'a>(s: &'a Sexp, kw: &str) -> Result<&'a [Sexp], SyntaxError> {
    let items = list_of(s, &format!("`({kw} …)`"))?;
    match items.first().and_then(Sexp::as_atom) {
        Some(k) if k == kw => Ok(&items[1..]),
        _ => Err(err(s.pos(), format!("expected `({kw} …)`"))),
    }
}

fn names_of(items: &[Sexp]) -> Result<Vec<Name>, SyntaxError> {
    items.iter().map(name_of).collect()
}

fn ctx_of(s: &Sexp) -> Result<SurfaceCtx, SyntaxError> {
    let mut out: SurfaceCtx = Vec::new();
    for entry in tagged(s, "ctx")? {
        let pair = list_of(entry, "a `(name sort)` entry")?;
        if pair.len() != 2 {
            return Err(err(entry.pos(), "context entries have the form `(name sort)`"));
        }
        let x = name_of(&pair[0])?;
        if out.iter().any(|(y, _)| *y == x) {
            return Err(err(entry.pos(), format!("duplicate context entry `{x}`")));
        }
        out.push((x, surface_of(&pair[1])?));
    }
    Ok(out)
}

fn rule_of(kw: &str, items: &[Sexp], pos: Pos) -> Result<RuleDecl, SyntaxError> {
    let name = name_of(items.get(1).ok_or_else(|| err(pos, "rule needs a name"))?)?;
    let rest = &items[2..];
    let ctx = match rest.first() {
        Some(s) if s.keyword() == Some("ctx") => ctx_of(s)?,
        _ => return Err(err(pos, format!("rule `{name}` needs a `(ctx …)` block"))),
    };
    let rest = &rest[1..];
    let body = match kw {
        "sort" | "term" => {
            let (args, rest) = match rest.first() {
                Some(s) if s.keyword() == Some("args") => (names_of(tagged(s, "args")?)?, &rest[1..]),
                _ => (Vec::new(), rest),
            };
            for a in &args {
                if !ctx.iter().any(|(x, _)| x == a) {
                    return Err(err(pos, format!("argument `{a}` of `{name}` is not in its context")));
                }
            }
            if kw == "sort" {
                if !rest.is_empty() {
                    return Err(err(pos, "unexpected items after sort declaration"));
                }
                RuleBody::Sort { ctx, args }
            } else {
                match rest {
                    [sort] => RuleBody::Term { ctx, args, sort: surface_of(sort)? },
                    _ => return Err(err(pos, format!("term `{name}` needs exactly one result sort"))),
                }
            }
        }
        "eq" => match rest {
            [lhs, eq, rhs, colon, sort] if eq.as_atom() == Some("=") && colon.as_atom() == Some(":") => {
                RuleBody::Eq { ctx, lhs: surface_of(lhs)?, rhs: surface_of(rhs)?, sort: surface_of(sort)? }
            }
            _ => return Err(err(pos, "equations have the form `(eq name (ctx …) lhs = rhs : sort)`")),
        },
        "sort_eq" => match rest {
            [lhs, eq, rhs] if eq.as_atom() == Some("=") => RuleBody::SortEq { ctx, lhs: surface_of(lhs)?, rhs: surface_of(rhs)? },
            _ => return Err(err(pos, "sort equations have the form `(sort_eq name (ctx …) lhs = rhs)`")),
        },
        _ => unreachable!("caller dispatches on keyword"),
    };
    Ok(RuleDecl { name, body, pos: Loc(pos) })
}

fn macro_of(items: &[Sexp], pos: Pos) -> Result<MacroDecl, SyntaxError> {
    match items {
        [_, name, params, body] => Ok(MacroDecl {
            name: name_of(name)?,
            params: names_of(list_of(params, "a parameter list")?)?,
            body: surface_of(body)?,
            pos: Loc(pos),
        }),
        _ => Err(err(pos, "macros have the form `(macro name (params…) body)`")),
    }
}

fn lang_of(items: &[Sexp], pos: Pos) -> Result<LangDecl, SyntaxError> {
    let name = name_of(items.get(1).ok_or_else(|| err(pos, "language needs a name"))?)?;
    let mut extends = Vec::new();
    let mut decls = Vec::new();
    for (i, item) in items[2..].iter().enumerate() {
        let Some(kw) = item.keyword() else { return Err(err(item.pos(), "expected a rule or directive")) };
        let parts = item.as_list().expect("keyword implies list");
        match kw {
            "extends" if i == 0 => extends = names_of(&parts[1..])?,
            "sort" | "term" | "eq" | "sort_eq" => decls.push(LangItem::Rule(rule_of(kw, parts, item.pos())?)),
            "@gensubst" => decls.push(LangItem::GenSubst(names_of(&parts[1..])?, Loc(item.pos()))),
            "@evalctx" => {
                let mut entries = Vec::new();
                for e in &parts[1..] {
                    let xs = list_of(e, "an evaluation-context entry")?;
                    if xs.len() < 2 {
                        return Err(err(e.pos(), "entries have the form `(name base kinds…)`"));
                    }
                    entries.push(EvalCtxEntryDecl { name: name_of(&xs[0])?, base: name_of(&xs[1])?, kinds: names_of(&xs[2..])? });
                }
                decls.push(LangItem::EvalCtx(entries, Loc(item.pos())));
            }
            "macro" => decls.push(LangItem::Macro(macro_of(parts, item.pos())?)),
            other => return Err(err(item.pos(), format!("unknown language item `{other}`"))),
        }
    }
    Ok(LangDecl { name, extends, items: decls, pos: Loc(pos) })
}

fn compiler_of(items: &[Sexp], pos: Pos) -> Result<CompilerDecl, SyntaxError> {
    let name = name_of(items.get(1).ok_or_else(|| err(pos, "compiler needs a name"))?)?;
    let mut rest = &items[2..];
    let mut extends = Vec::new();
    if rest.first().and_then(Sexp::as_atom) == Some("extends") {
        rest = &rest[1..];
        while let Some(a @ Sexp::Atom(..)) = rest.first() {
            extends.push(name_of(a)?);
            rest = &rest[1..];
        }
        if extends.is_empty() {
            return Err(err(pos, "`extends` needs a compiler name"));
        }
    }
    let (mut source, mut target, mut cases) = (None, None, Vec::new());
    for item in rest {
        let parts = list_of(item, "a compiler item")?;
        match item.keyword() {
            Some("source") => source = Some(name_of(parts.get(1).ok_or_else(|| err(item.pos(), "missing language"))?)?),
            Some("target") => target = Some(name_of(parts.get(1).ok_or_else(|| err(item.pos(), "missing language"))?)?),
            Some("case") => {
                let (rule, params, out) = match parts {
                    [_, rule, params, out] if params.keyword() == Some("params") => {
                        (rule, Some(names_of(tagged(params, "params")?)?), out)
                    }
                    [_, rule, out] => (rule, None, out),
                    _ => return Err(err(item.pos(), "cases have the form `(case rule (params x…) output)`")),
                };
                cases.push(CaseDecl { rule: name_of(rule)?, params, out: surface_of(out)?, pos: Loc(item.pos()) });
            }
            _ => return Err(err(item.pos(), "expected `(source …)`, `(target …)` or `(case …)`")),
        }
    }
    Ok(CompilerDecl {
        name,
        extends,
        source: source.ok_or_else(|| err(pos, "compiler needs `(source …)`"))?,
        target: target.ok_or_else(|| err(pos, "compiler needs `(target …)`"))?,
        cases,
        pos: Loc(pos),
    })
}

fn proofs_of(items: &[Sexp], pos: Pos) -> Result<ProofsDecl, SyntaxError> {
    let compiler = name_of(items.get(1).ok_or_else(|| err(pos, "`proofs` needs a compiler name"))?)?;
    let mut proofs = Vec::new();
    for item in &items[2..] {
        match tagged(item, "proof")? {
            [rule, tree] => proofs.push((name_of(rule)?, tree.clone())),
            _ => return Err(err(item.pos(), "proofs have the form `(proof rule tree)`")),
        }
    }
    Ok(ProofsDecl { compiler, proofs, pos: Loc(pos) })
}

fn spec_of(items: &[Sexp], pos: Pos) -> Result<ParamSpecDecl, SyntaxError> {
    let name = name_of(items.get(1).ok_or_else(|| err(pos, "specification needs a name"))?)?;
    let (mut param, mut marked, mut positions) = (None, Vec::new(), Vec::new());
    for item in &items[2..] {
        let parts = list_of(item, "a specification item")?;
        match item.keyword() {
            Some("param") => match parts {
                [_, x, s] => param = Some((name_of(x)?, surface_of(s)?)),
                _ => return Err(err(item.pos(), "expected `(param name sort)`")),
            },
            Some("marked") => marked.extend(names_of(&parts[1..])?),
            Some("at") => match parts {
                [_, rule, Sexp::Atom(k, kpos)] => {
                    let k = k.parse::<usize>().map_err(|_| err(*kpos, "expected an index"))?;
                    positions.push((name_of(rule)?, k));
                }
                _ => return Err(err(item.pos(), "expected `(at rule index)`")),
            },
            _ => return Err(err(item.pos(), "expected `(param …)`, `(marked …)` or `(at …)`")),
        }
    }
    let (param, sort) = param.ok_or_else(|| err(pos, "specification needs `(param name sort)`"))?;
    Ok(ParamSpecDecl { name, param, sort, marked, positions, pos: Loc(pos) })
}

pub fn parse_decl(s: &Sexp) -> Result<Decl, SyntaxError> {
    let pos = s.pos();
    let items = list_of(s, "a declaration")?;
    match s.keyword() {
        Some("import") => match items {
            [_, Sexp::Atom(path, _)] => Ok(Decl::Import(path.clone(), Loc(pos))),
            _ => Err(err(pos, "expected `(import path)`")),
        },
        Some("lang") => Ok(Decl::Lang(lang_of(items, pos)?)),
        Some("compiler") => Ok(Decl::Compiler(compiler_of(items, pos)?)),
        Some("proofs") => Ok(Decl::Proofs(proofs_of(items, pos)?)),
        Some("@parameterize") => Ok(Decl::ParamSpec(spec_of(items, pos)?)),
        Some("macro") => Ok(Decl::Macro(macro_of(items, pos)?)),
        _ => Err(err(pos, "expected `import`, `lang`, `compiler`, `proofs`, `@parameterize` or `macro`")),
    }
}

pub fn parse_source(text: &str) -> Result<SourceFile, SyntaxError> {
    let decls = parse_sexps(text)?.iter().map(parse_decl).collect::<Result<Vec<_>, _>>()?;
    Ok(SourceFile { decls })
}
