//! Terms, sorts, contexts, substitutions, rules and languages.

mod lang;
mod name;
mod term;

pub use lang::{rule_alpha_eq, Lang, Rule, RuleKind};
pub use name::Name;
pub use term::{apply_subst, structural_eq, Ctx, MetaSubst, Sort, Substitutable, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("duplicate rule name `{0}`")]
    DuplicateName(Name),
    #[error("rule `{0}` is defined differently in the two languages")]
    ConflictingRule(Name),
    #[error("unknown rule `{0}`")]
    UnknownRule(Name),
}

/// `lang_append`: concatenation of an extension onto a base language.
pub fn lang_append(base: &Lang, ext: &Lang) -> Result<Lang, KernelError> {
    base.append(ext)
}

pub fn lang_subset(a: &Lang, b: &Lang) -> bool {
    a.is_subset_of(b)
}
