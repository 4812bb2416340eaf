//! Canonical printing. Declarations print to text that parses back to the
//! same declarations; elaborated languages and compilers print in full form,
//! which the elaborator accepts unchanged.

use std::fmt::Write;

use super::ast::*;
use crate::kernel::{Ctx, Lang, Name, Rule};
use crate::translate::{CaseOut, Compiler};

fn names(xs: &[Name]) -> String {
    xs.iter().map(|x| format!(" {x}")).collect()
}

fn surface_ctx(ctx: &SurfaceCtx) -> String {
    let mut s = String::from("(ctx");
    for (x, t) in ctx {
        let _ = write!(s, " ({x} {t})");
    }
    s.push(')');
    s
}

fn rule_decl(r: &RuleDecl) -> String {
    let n = &r.name;
    match &r.body {
        RuleBody::Sort { ctx, args } => format!("(sort {n} {} (args{}))", surface_ctx(ctx), names(args)),
        RuleBody::Term { ctx, args, sort } => format!("(term {n} {} (args{}) {sort})", surface_ctx(ctx), names(args)),
        RuleBody::Eq { ctx, lhs, rhs, sort } => format!("(eq {n} {} {lhs} = {rhs} : {sort})", surface_ctx(ctx)),
        RuleBody::SortEq { ctx, lhs, rhs } => format!("(sort_eq {n} {} {lhs} = {rhs})", surface_ctx(ctx)),
    }
}

fn macro_decl(m: &MacroDecl) -> String {
    format!("(macro {} ({}) {})", m.name, names(&m.params).trim_start(), m.body)
}

pub fn print_decl(d: &Decl) -> String {
    let mut s = String::new();
    match d {
        Decl::Import(path, _) => s = format!("(import {path})"),
        Decl::Macro(m) => s = macro_decl(m),
        Decl::Lang(l) => {
            let _ = write!(s, "(lang {}", l.name);
            if !l.extends.is_empty() {
                let _ = write!(s, "\n  (extends{})", names(&l.extends));
            }
            for item in &l.items {
                let line = match item {
                    LangItem::Rule(r) => rule_decl(r),
                    LangItem::GenSubst(xs, _) => format!("(@gensubst{})", names(xs)),
                    LangItem::EvalCtx(es, _) => {
                        let entries: String =
                            es.iter().map(|e| format!(" ({} {}{})", e.name, e.base, names(&e.kinds))).collect();
                        format!("(@evalctx{entries})")
                    }
                    LangItem::Macro(m) => macro_decl(m),
                };
                let _ = write!(s, "\n  {line}");
            }
            s.push(')');
        }
        Decl::Compiler(c) => {
            let _ = write!(s, "(compiler {}", c.name);
            if !c.extends.is_empty() {
                let _ = write!(s, " extends{}", names(&c.extends));
            }
            let _ = write!(s, "\n  (source {})\n  (target {})", c.source, c.target);
            for case in &c.cases {
                let params = case.params.as_ref().map(|ps| format!(" (params{})", names(ps))).unwrap_or_default();
                let _ = write!(s, "\n  (case {}{params} {})", case.rule, case.out);
            }
            s.push(')');
        }
        Decl::Proofs(p) => {
            let _ = write!(s, "(proofs {}", p.compiler);
            for (rule, tree) in &p.proofs {
                let _ = write!(s, "\n  (proof {rule} {tree})");
            }
            s.push(')');
        }
        Decl::ParamSpec(p) => {
            let _ = write!(s, "(@parameterize {}\n  (param {} {})", p.name, p.param, p.sort);
            if !p.marked.is_empty() {
                let _ = write!(s, "\n  (marked{})", names(&p.marked));
            }
            for (rule, k) in &p.positions {
                let _ = write!(s, "\n  (at {rule} {k})");
            }
            s.push(')');
        }
    }
    s
}

pub fn print_source(f: &SourceFile) -> String {
    let mut out = String::new();
    for d in &f.decls {
        out.push_str(&print_decl(d));
        out.push_str("\n\n");
    }
    out.truncate(out.trim_end().len());
    out.push('\n');
    out
}

fn full_ctx(ctx: &Ctx) -> String {
    ctx.to_string()
}

/// A rule in full form; every argument position is written.
pub fn print_rule(name: &Name, rule: &Rule) -> String {
    match rule {
        Rule::Sort { ctx, explicit } => format!("(sort {name} {} (args{}))", full_ctx(ctx), names(explicit)),
        Rule::Term { ctx, explicit, sort } => format!("(term {name} {} (args{}) {sort})", full_ctx(ctx), names(explicit)),
        Rule::TermEq { ctx, lhs, rhs, sort } => format!("(eq {name} {} {lhs} = {rhs} : {sort})", full_ctx(ctx)),
        Rule::SortEq { ctx, lhs, rhs } => format!("(sort_eq {name} {} {lhs} = {rhs})", full_ctx(ctx)),
    }
}

pub fn print_lang(name: &Name, lang: &Lang) -> String {
    let mut s = format!("(lang {name}");
    for (n, r) in lang.iter() {
        let _ = write!(s, "\n  {}", print_rule(n, r));
    }
    s.push_str(")\n");
    s
}

pub fn print_compiler(name: &Name, source: &Name, target: &Name, cmp: &Compiler) -> String {
    let mut s = format!("(compiler {name}\n  (source {source})\n  (target {target})");
    for (rule, case) in cmp.iter() {
        let out = match &case.out {
            CaseOut::Sort(o) => o.to_string(),
            CaseOut::Term(o) => o.to_string(),
        };
        let _ = write!(s, "\n  (case {rule} (params{}) {out})", names(&case.params));
    }
    s.push_str(")\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declarations_round_trip() {
        let text = "(lang nat (sort nat (ctx)) (term z (ctx) (nat)) (term s (ctx (n nat)) (args n) (nat)) \
                    (@gensubst s) (macro two () (s (s z))))\n\
                    (compiler c (source nat) (target nat) (case z z) (case s (params n) (s n)))\n\
                    (@parameterize p (param D (env)) (marked s) (at s 1))";
        let f = parse_source(text).unwrap();
        let printed = print_source(&f);
        assert_eq!(parse_source(&printed).unwrap(), f);
        assert_eq!(print_source(&parse_source(&printed).unwrap()), printed);
    }
}
