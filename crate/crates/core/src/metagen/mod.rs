//! Generators that extend languages and compilers mechanically:
//! substitution equations, evaluation contexts, and parameterization.

mod evalctx;
mod param;
mod subst;

pub use evalctx::{gen_eval_ctx, ArgKind, EvalCtxEntry, EvalCtxNames};
pub use param::{param_checks, parameterize_compiler, parameterize_lang, ParamIssue, ParamSpec};
pub use subst::{gen_subst_eq, gen_subst_eqs, subst_operator};

use crate::kernel::{Ctx, Name};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetagenError {
    #[error("unknown rule `{0}`")]
    UnknownRule(Name),
    #[error("`{0}` is not a term former")]
    NotATermFormer(Name),
    #[error("not a substitution calculus: {0}")]
    NotASubstLanguage(String),
    #[error("cannot build evaluation contexts: {0}")]
    NotAnEvalLanguage(String),
    #[error("generated rule for `{0}` does not elaborate: {1}")]
    Elab(Name, String),
    #[error("{0}")]
    Param(String),
}

/// `base`, primed until it is not bound in `ctx`.
pub(crate) fn fresh_name(base: &str, ctx: &Ctx) -> Name {
    let mut name = base.to_string();
    while ctx.contains(&Name::new(name.as_str())) {
        name.push('\'');
    }
    Name::new(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::elaborator::{wf_lang, CalculusNames};
    use crate::kernel::Rule;

    #[test]
    fn fresh_names_avoid_the_context() {
        let ctx = Ctx::new().with("e", crate::kernel::Sort::constant("s")).with("e'", crate::kernel::Sort::constant("s"));
        assert_eq!(fresh_name("e", &ctx), Name::new("e''"));
        assert_eq!(fresh_name("x", &ctx), Name::new("x"));
    }

    #[test]
    fn arg_kinds_parse_from_their_letters() {
        assert_eq!(ArgKind::parse("E"), Some(ArgKind::Hole));
        assert_eq!(ArgKind::parse("v"), Some(ArgKind::Value));
        assert_eq!(ArgKind::parse("e"), Some(ArgKind::Expr));
        assert_eq!(ArgKind::parse("x"), None);
    }

    #[test]
    fn subst_generation_needs_a_calculus() {
        let ws = corpus::load().unwrap();
        let nat = &ws.lang("nat").unwrap().lang;
        assert!(gen_subst_eq(nat, &Name::new("s"), &CalculusNames::default()).is_err());
        let stlc = &ws.lang("stlc").unwrap().lang;
        assert!(matches!(gen_subst_eq(stlc, &Name::new("beta"), &CalculusNames::default()), Err(MetagenError::NotATermFormer(_))));
        assert!(matches!(gen_subst_eq(stlc, &Name::new("nope"), &CalculusNames::default()), Err(MetagenError::UnknownRule(_))));
        let (name, _) = gen_subst_eq(stlc, &Name::new("app"), &CalculusNames::default()).unwrap();
        assert_eq!(name, Name::new("app-subst"));
    }

    #[test]
    fn parameterization_threads_the_parameter_through_marked_rules() {
        let ws = corpus::load().unwrap();
        let lang = &ws.lang("subst_env").unwrap().lang;
        let spec = ws.param_spec("typed", lang).unwrap();
        assert!(param_checks(lang, &spec).is_empty());
        let out = parameterize_lang(lang, &spec).unwrap();
        assert!(wf_lang(&out).ok);
        for (name, rule) in out.iter() {
            let gained = rule.ctx().contains(&spec.param);
            let marked = spec.marked.contains(name);
            if rule.is_constructor() {
                assert_eq!(gained, marked, "{name}");
            }
            if let (Rule::Term { explicit, .. }, true) = (rule, marked) {
                assert!(!explicit.contains(&spec.param), "{name}: parameter must stay implicit");
            }
        }
        let mut partial = spec.clone();
        partial.marked.remove(&Name::new("ext"));
        assert!(param_checks(lang, &partial).iter().any(|i| matches!(i, ParamIssue::UnmarkedUsesMarked { .. })));
    }
}
