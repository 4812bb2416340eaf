//! Compilers as finite maps, their preservation obligations, and the
//! operations that combine compilers and move proofs across them.

mod compile;
mod obligation;
mod transport;

pub use compile::{id_compiler, vcompose, CaseOut, Compiler, CompilerCase};
pub use obligation::{
    discharge, embed_target, nontriviality_check, obligations, DischargeOptions, DischargeReport, Evidence, Obligation,
    ObligationKind, Payload, ReportEntry, Status,
};
pub use obligation::with_pool;
pub use transport::{transport_proof, Transport};

use crate::kernel::Name;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("no compiler case for `{0}`")]
    MissingCase(Name),
    #[error("case `{0}` has the wrong kind (sort vs term)")]
    WrongCaseKind(Name),
    #[error("case `{head}` has {expected} parameters but was applied to {got} arguments")]
    CaseArity { head: Name, expected: usize, got: usize },
    #[error("case `{rule}` must list the rule context {expected:?} as parameters, got {got:?}")]
    BadParams { rule: Name, expected: Vec<Name>, got: Vec<Name> },
    #[error("duplicate compiler case `{0}`")]
    DuplicateCase(Name),
    #[error("the original target language is not a subset of the new one")]
    NotASubset,
    #[error("replaying `{rule}` failed: {reason}")]
    ReplayFailed { rule: Name, reason: String },
    #[error("proof transport failed: {0}")]
    Transport(String),
    #[error("{0}")]
    Rewrite(String),
}

/// `concat_compilers`: cases of `cmp` then `ext`, without overwriting.
pub fn concat_compilers(cmp: &Compiler, ext: &Compiler) -> Result<Compiler, TranslateError> {
    cmp.concat(ext)
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::kernel::Term;
    use crate::rewrite::RewriteConfig;
    use crate::workspace::Workspace;

    const NAT: &str = "
(lang nat
  (sort nat (ctx))
  (term z (ctx) (nat))
  (term s (ctx (n nat)) (args n) (nat))
  (term plus (ctx (a nat) (b nat)) (args a b) (nat))
  (eq plus-z (ctx (b nat)) (plus z b) = b : (nat))
  (eq plus-s (ctx (a nat) (b nat)) (plus (s a) b) = (s (plus a b)) : (nat)))
(compiler double (source nat) (target nat)
  (case nat (nat)) (case z z) (case s (s (s n))) (case plus (plus a b)))
(compiler forget_left (source nat) (target nat)
  (case nat (nat)) (case z z) (case s (s n)) (case plus b))
(compiler erase (source nat) (target nat)
  (case nat (nat)) (case z z) (case s n) (case plus (plus a b)))";

    fn ws() -> Workspace {
        let mut ws = Workspace::new();
        ws.load_str(NAT, Path::new("nat.gat")).unwrap();
        ws
    }

    fn num(n: usize) -> Term {
        (0..n).fold(Term::constant("z"), |t, _| Term::con("s", vec![t]))
    }

    #[test]
    fn sound_compiler_discharges_automatically() {
        let r = ws().discharge("double", &DischargeOptions::default()).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.count("auto"), r.entries.len());
    }

    #[test]
    fn unsound_compiler_leaves_the_broken_equation_open() {
        let r = ws().discharge("forget_left", &DischargeOptions::default()).unwrap();
        let open: Vec<_> = r.open().iter().map(|e| e.obligation.source_rule.to_string()).collect();
        assert_eq!(open, ["plus-s"]);
    }

    #[test]
    fn composition_and_identity() {
        let ws = ws();
        let double = &ws.compiler("double").unwrap().full;
        let twice = vcompose(double, double).unwrap();
        assert_eq!(twice.compile_term(&num(1)).unwrap(), num(4));
        let id = id_compiler(&ws.lang("nat").unwrap().lang);
        let t = Term::con("plus", vec![num(2), num(1)]);
        assert_eq!(id.compile_term(&t).unwrap(), t);
        assert_eq!(vcompose(double, &id).unwrap().compile_term(&t).unwrap(), double.compile_term(&t).unwrap());
    }

    #[test]
    fn nontriviality_separates_sound_from_collapsing() {
        let ws = ws();
        let nat = &ws.lang("nat").unwrap().lang;
        let cfg = RewriteConfig::default();
        let (a, b) = (num(0), num(1));
        assert!(nontriviality_check(&ws.compiler("double").unwrap().full, nat, &a, &b, &cfg).unwrap());
        assert!(ws.discharge("erase", &DischargeOptions::default()).unwrap().is_clean());
        assert!(!nontriviality_check(&ws.compiler("erase").unwrap().full, nat, &a, &b, &cfg).unwrap());
    }

    #[test]
    fn missing_case_is_an_error() {
        let ws = ws();
        let partial = ws.compiler("double").unwrap().full.restrict(|n| n.as_str() != "plus");
        assert!(partial.compile_term(&Term::con("plus", vec![num(0), num(0)])).is_err());
    }
}
