//! The shipped example languages and compilers, located on disk, plus the
//! tooling that regenerates their manual proofs and the demos built on them.

use std::path::{Path, PathBuf};

use std::collections::BTreeMap;

use crate::elaborator::{wf_lang, WfReport};
use crate::kernel::{Lang, Name};
use crate::metagen::{param_checks, parameterize_compiler, parameterize_lang, MetagenError, ParamIssue};
use crate::proofkit::check_eq;
use crate::rewrite::{prove_by_lemma, LemmaError, RewriteConfig, Rewriter};
use crate::syntax::print_proof;
use crate::translate::{self, Compiler, DischargeOptions, DischargeReport, Payload, TranslateError};
use crate::workspace::{LoadError, Workspace};

mod demo;

pub use demo::*;

/// Overrides where the corpus is read from.
pub const CORPUS_ENV: &str = "GATFORGE_CORPUS";

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("{rule}: {source}")]
    Lemma { rule: Name, source: LemmaError },
    #[error(transparent)]
    Metagen(#[from] MetagenError),
    #[error("{0}")]
    Demo(String),
}

pub fn corpus_dir() -> PathBuf {
    match std::env::var_os(CORPUS_ENV) {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"),
    }
}

/// Every declaration under the corpus directory (fixtures excluded).
pub fn load() -> Result<Workspace, LoadError> {
    let mut ws = Workspace::new();
    ws.load_dir(&corpus_dir())?;
    Ok(ws)
}

pub fn fixture_path(name: &str) -> PathBuf {
    corpus_dir().join("fixtures").join(format!("{name}.gat"))
}

/// Corpus passes with the number of obligations each closes with a shipped
/// proof rather than automatically.
pub const PASSES: &[(&str, usize)] = &[
    ("id_num", 0),
    ("id_heap", 0),
    ("cps_subst", 0),
    ("cps_stlc", 0),
    ("cps_bool", 0),
    ("cps_nat", 0),
    ("cps_unit", 0),
    ("cps_prod", 0),
    ("cps_rec", 0),
    ("cps_ectx", 0),
    ("cps_heap", 0),
    ("cps_all", 0),
    ("cc", 0),
    ("cc_nat", 0),
    ("cc_rec", 1),
    ("cc_heap", 0),
    ("cc_all", 0),
];

/// An obligation the rewriter cannot close alone: one use of `lemma` at
/// `path` in the normal form of the left side finishes it.
#[derive(Clone, Copy, Debug)]
pub struct LemmaHint {
    pub compiler: &'static str,
    pub rule: &'static str,
    pub lemma: &'static str,
    pub path: &'static [usize],
    pub backwards: bool,
}

pub const LEMMA_HINTS: &[LemmaHint] =
    &[LemmaHint { compiler: "cc_rec", rule: "fixk-subst", lemma: "clo-env", path: &[2], backwards: true }];

/// Text of a `.gatpf` file holding proofs for every hinted obligation of
/// `compiler`, each checked before it is printed.
pub fn generate_proofs(ws: &Workspace, compiler: &str, cfg: &RewriteConfig) -> Result<String, CorpusError> {
    let obls = ws.obligations(compiler)?;
    let target = &ws.lang(ws.compiler(compiler)?.target.as_str())?.lang;
    let rw = Rewriter::new(target, cfg.clone());
    let mut out = format!("(proofs {compiler}");
    for hint in LEMMA_HINTS.iter().filter(|h| h.compiler == compiler) {
        let rule = Name::new(hint.rule);
        let fail = |source| CorpusError::Lemma { rule: rule.clone(), source };
        let obl = obls
            .iter()
            .find(|o| o.source_rule == rule)
            .ok_or_else(|| CorpusError::Demo(format!("`{rule}` is not an obligation of `{compiler}`")))?;
        let Payload::TermEq { lhs, rhs, sort } = &obl.payload else {
            return Err(CorpusError::Demo(format!("`{rule}` is not an equation obligation")));
        };
        let proof = prove_by_lemma(&rw, &obl.target_ctx, lhs, rhs, sort, &Name::new(hint.lemma), hint.path, hint.backwards)
            .map_err(fail)?;
        check_eq(target, &obl.target_ctx, &proof).map_err(|e| CorpusError::Demo(format!("{rule}: generated proof: {e}")))?;
        out.push_str(&format!("\n  (proof {rule}\n    {})", print_proof(&proof)));
    }
    out.push_str(")\n");
    Ok(out)
}

/// The substitution calculus and its CPS translation, both threaded with a
/// type environment by the `typed` specification.
pub struct ParamOutcome {
    pub issues: Vec<ParamIssue>,
    pub source: Lang,
    pub target: Lang,
    pub source_wf: WfReport,
    pub target_wf: WfReport,
    pub compiler: Compiler,
    pub report: DischargeReport,
}

pub fn parameterized_cps(ws: &Workspace, opts: &DischargeOptions) -> Result<ParamOutcome, CorpusError> {
    let cmp = ws.compiler("cps_subst_env")?;
    let (src, tgt) = (&ws.lang(cmp.source.as_str())?.lang, &ws.lang(cmp.target.as_str())?.lang);
    let (spec_src, spec_tgt) = (ws.param_spec("typed", src)?, ws.param_spec("typed", tgt)?);
    let mut issues = param_checks(src, &spec_src);
    issues.extend(param_checks(tgt, &spec_tgt));
    let source = parameterize_lang(src, &spec_src)?;
    let target = parameterize_lang(tgt, &spec_tgt)?;
    let compiler = parameterize_compiler(&cmp.full, src, &spec_src)?;
    let obls = translate::obligations(&Compiler::new(), &compiler, &source)?;
    let report = translate::discharge(&obls, &target, &BTreeMap::new(), opts);
    Ok(ParamOutcome { issues, source_wf: wf_lang(&source), target_wf: wf_lang(&target), source, target, compiler, report })
}
