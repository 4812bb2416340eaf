//! End-to-end runs over the corpus: compiling source programs, running both
//! sides, and relating the results.

use crate::elaborator::{check_term, erase, infer_sort, SurfaceTerm};
use crate::kernel::{Ctx, Lang, Name, Sort, Term};
use crate::proofkit::check_eq;
use crate::rewrite::{RewriteConfig, Rewriter};
use crate::translate::vcompose;
use crate::workspace::Workspace;

use super::CorpusError;

/// Closed boolean programs of `stlc_bool`, for the CPS cross-check.
pub const CROSS_PROGRAMS: &[&str] = &[
    "(ret true)",
    "(ret false)",
    "(if (ret true) (ret false) (ret true))",
    "(if (if (ret false) (ret false) (ret true)) (ret true) (ret false))",
    "(app (ret (lam (if (ret hd) (ret false) (ret true)))) (ret false))",
];

/// Closed programs of `stlc_all` at ground sorts, for the operational bridge.
/// The last one loops forever.
pub const BRIDGE_PROGRAMS: &[(&str, &str)] = &[
    ("(if (ret false) (ret false) (ret true))", "(exp emp bool)"),
    ("(add (nv (ns nz)) (nv (ns (ns nz))))", "(exp emp nat)"),
    ("(app (ret (lam (add hd (nv (ns nz))))) (ret (nv (ns (ns nz)))))", "(exp emp nat)"),
    ("(pm (pair (nv nz) true) (if (ret hd) (ret v1) (ret (nv (ns nz)))))", "(exp emp nat)"),
    ("(app (ret (fix (app (ret v1) (ret hd)))) (ret false))", "(exp emp bool)"),
];

/// Closed programs of `stlc_all` for the two-pass pipeline.
pub const PIPELINE_PROGRAMS: &[(&str, &str)] = &[
    ("(app (ret (lam (ret hd))) (ret tt))", "(exp emp unit)"),
    ("(pm (pair true (nv nz)) (if (ret v1) (ret hd) (add hd hd)))", "(exp emp nat)"),
    ("(ret (fix (app (ret v1) (ret hd))))", "(exp emp (arr bool bool))"),
    ("(set (ret (nv nz)) (get (ret (nv (ns nz)))))", "(exp emp unit)"),
];

/// Statements of `imp`, each linked with the first pipeline program.
pub const IMP_PROGRAMS: &[&str] = &[
    "skip",
    "(seq (assign nz (lit (ns nz))) skip)",
    "(ifs (plus_a (var nz) (lit nz)) skip (assign (ns nz) (minus_a (lit nz) (var nz))))",
    "(while (var nz) (assign nz (minus_a (var nz) (lit (ns nz)))))",
];

/// Writes every argument position, so elaboration accepts the term as is.
pub fn full_surface(t: &Term) -> SurfaceTerm {
    match t {
        Term::Var(x) => SurfaceTerm::Atom(x.clone()),
        Term::Con(h, args) if args.is_empty() => SurfaceTerm::Atom(h.clone()),
        Term::Con(h, args) => SurfaceTerm::App(h.clone(), args.iter().map(full_surface).collect()),
    }
}

fn demo_err(msg: impl Into<String>) -> CorpusError {
    CorpusError::Demo(msg.into())
}

/// Elaborates closed program text in `lang`, at `sort` when given.
pub fn closed_term(ws: &Workspace, lang: &str, text: &str, sort: Option<&str>) -> Result<(Term, Sort), CorpusError> {
    let l = &ws.lang(lang)?.lang;
    let ctx = Ctx::new();
    let want = sort.map(|s| ws.elab_sort(l, &ctx, s)).transpose()?;
    let t = ws.elab_term(l, &ctx, text, want.as_ref())?;
    let s = match want {
        Some(s) => s,
        None => infer_sort(l, &ctx, &t).map_err(|e| demo_err(format!("{text}: {e}")))?,
    };
    Ok((t, s))
}

/// True when a source value and a target value denote the same ground
/// result: booleans are encoded as the numbers 1 and 0.
pub fn related_values(source: &SurfaceTerm, target: &SurfaceTerm) -> bool {
    match source.to_string().as_str() {
        "true" => target.to_string() == "(nv (ns nz))",
        "false" => target.to_string() == "(nv nz)",
        _ => source == target,
    }
}

fn returned_value(lang: &Lang, t: &Term) -> Option<SurfaceTerm> {
    match erase(lang, t) {
        SurfaceTerm::App(h, mut args) if h.as_str() == "ret" && args.len() == 1 => args.pop(),
        _ => None,
    }
}

/// The value passed to the top continuation `hd`.
fn answered_value(lang: &Lang, t: &Term) -> Option<SurfaceTerm> {
    match erase(lang, t) {
        SurfaceTerm::App(h, mut args) if h.as_str() == "jmp" && args.len() == 2 && args[0] == SurfaceTerm::atom("hd") => args.pop(),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct CrossOutcome {
    pub program: Term,
    /// Source normal form's returned value.
    pub source_value: SurfaceTerm,
    pub compiled: Term,
    pub target_normal_form: Term,
    /// What the target should reach, given the source value.
    pub expected: Term,
}

impl CrossOutcome {
    pub fn agrees(&self) -> bool {
        self.target_normal_form == self.expected
    }
}

/// Compiles a closed boolean program with `cps_bool`, runs it against the
/// top continuation `k : ¬nat`, and compares with the source result.
pub fn demo_cps_cross(ws: &Workspace, program: &Term, cfg: &RewriteConfig) -> Result<CrossOutcome, CorpusError> {
    let cmp = ws.compiler("cps_bool")?;
    let (source, target) = (&ws.lang(cmp.source.as_str())?.lang, &ws.lang(cmp.target.as_str())?.lang);
    let ctx = Ctx::new();
    let src = Rewriter::new(source, cfg.clone()).normalize(&ctx, program).map_err(|e| demo_err(e.to_string()))?;
    let source_value = returned_value(source, &src.normal_form)
        .filter(|v| matches!(v.to_string().as_str(), "true" | "false"))
        .ok_or_else(|| demo_err(format!("source program is stuck at {}", erase(source, &src.normal_form))))?;
    let compiled = cmp.full.compile_term(program)?;
    let sort = cmp.full.compile_sort(&src.sort)?;
    let answer = if source_value.to_string() == "true" { "(jmp hd (nv (ns nz)))" } else { "(jmp hd (nv nz))" };
    let expected = ws.elab_term(target, &ctx, answer, Some(&sort))?;
    let tgt = Rewriter::new(target, cfg.clone()).normalize_at(&ctx, &compiled, &sort).map_err(|e| demo_err(e.to_string()))?;
    Ok(CrossOutcome { program: program.clone(), source_value, compiled, target_normal_form: tgt.normal_form, expected })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("stuck at {0}")]
    Stuck(SurfaceTerm),
    #[error("fuel exhausted after {0} steps")]
    FuelExhausted(usize),
    #[error("step {step} by `{rule}` is not justified: {reason}")]
    Unjustified { step: usize, rule: Name, reason: String },
    #[error("{0}")]
    Rewrite(String),
}

/// A finished small-step run.
#[derive(Clone, Debug)]
pub struct Trace {
    /// Rule fired at each step.
    pub rules: Vec<Name>,
    pub final_term: Term,
    pub value: SurfaceTerm,
}

/// Runs single rewrite steps until none applies. Every step must be proved
/// by a checked certificate that uses an instance of the fired rule.
pub fn run_small_step(
    lang: &Lang,
    ctx: &Ctx,
    t: &Term,
    fuel: usize,
    value_of: impl Fn(&Lang, &Term) -> Option<SurfaceTerm>,
) -> Result<Trace, RunError> {
    let rw = Rewriter::new(lang, RewriteConfig { verify: false, ..RewriteConfig::default() });
    let mut cur = t.clone();
    let mut rules = Vec::new();
    loop {
        let Some((next, proof, rule)) = rw.step(ctx, &cur).map_err(|e| RunError::Rewrite(e.to_string()))? else {
            return match value_of(lang, &cur) {
                Some(value) => Ok(Trace { rules, final_term: cur, value }),
                None => Err(RunError::Stuck(erase(lang, &cur))),
            };
        };
        if rules.len() == fuel {
            return Err(RunError::FuelExhausted(fuel));
        }
        let bad = |reason: String| RunError::Unjustified { step: rules.len(), rule: rule.clone(), reason };
        let eq = check_eq(lang, ctx, &proof).map_err(|e| bad(e.to_string()))?;
        if eq.lhs != cur || eq.rhs != next {
            return Err(bad("certificate proves a different step".into()));
        }
        if !proof.axioms().contains(&rule) {
            return Err(bad("certificate does not use the rule".into()));
        }
        rules.push(rule);
        cur = next;
    }
}

#[derive(Clone, Debug)]
pub struct BridgeOutcome {
    pub source: Trace,
    pub target: Trace,
}

impl BridgeOutcome {
    pub fn related(&self) -> bool {
        related_values(&self.source.value, &self.target.value)
    }
}

/// Runs a closed ground program of `stlc_all` and its `cps_all` image with
/// the small-step interpreters, each limited to `fuel` steps.
pub fn demo_op_bridge(ws: &Workspace, program: &Term, fuel: usize) -> Result<Result<BridgeOutcome, RunError>, CorpusError> {
    let cmp = ws.compiler("cps_all")?;
    let (source, target) = (&ws.lang(cmp.source.as_str())?.lang, &ws.lang(cmp.target.as_str())?.lang);
    let ctx = Ctx::new();
    let compiled = cmp.full.compile_term(program)?;
    let run = || -> Result<BridgeOutcome, RunError> {
        let source = run_small_step(source, &ctx, program, fuel, returned_value)?;
        let target = run_small_step(target, &ctx, &compiled, fuel, answered_value)?;
        Ok(BridgeOutcome { source, target })
    };
    Ok(run())
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub composed: Term,
    pub sequential: Term,
    pub sort: Sort,
}

impl PipelineOutcome {
    pub fn agrees(&self) -> bool {
        self.composed == self.sequential
    }
}

/// Compiles a closed `stlc_all` program with the composite of `cc_all` after
/// `cps_all` and with the two passes in turn; the composite's output must be
/// well formed in `clo_all`.
pub fn demo_pipeline(ws: &Workspace, program: &Term) -> Result<PipelineOutcome, CorpusError> {
    let cps = ws.compiler("cps_all")?;
    let cc = ws.compiler("cc_all")?;
    let source = &ws.lang(cps.source.as_str())?.lang;
    let target = &ws.lang(cc.target.as_str())?.lang;
    let ctx = Ctx::new();
    let sort = infer_sort(source, &ctx, program).map_err(|e| demo_err(e.to_string()))?;
    let both = vcompose(&cc.full, &cps.full)?;
    let composed = both.compile_term(program)?;
    let sequential = cc.full.compile_term(&cps.full.compile_term(program)?)?;
    let sort = both.compile_sort(&sort)?;
    let wf = check_term(target, &ctx, &composed, &sort);
    if !wf.ok {
        return Err(demo_err(format!("pipeline output is ill formed: {}", wf.diagnostics[0])));
    }
    Ok(PipelineOutcome { composed, sequential, sort })
}

/// Compiles a closed statement with `imp_cc`, checked in `clo_all`.
pub fn demo_imp(ws: &Workspace, stmt: &Term) -> Result<(Term, Sort), CorpusError> {
    let cmp = ws.compiler("imp_cc")?;
    let (source, target) = (&ws.lang(cmp.source.as_str())?.lang, &ws.lang(cmp.target.as_str())?.lang);
    let ctx = Ctx::new();
    let sort = infer_sort(source, &ctx, stmt).map_err(|e| demo_err(e.to_string()))?;
    let compiled = cmp.full.compile_term(stmt)?;
    let sort = cmp.full.compile_sort(&sort)?;
    let wf = check_term(target, &ctx, &compiled, &sort);
    if !wf.ok {
        return Err(demo_err(format!("compiled statement is ill formed: {}", wf.diagnostics[0])));
    }
    Ok((compiled, sort))
}

/// Links compiled statement code with a pipeline-compiled program of type
/// unit through the corpus `link` macro, and checks the result.
pub fn demo_link(ws: &Workspace, stmt: &Term, program: &Term) -> Result<Term, CorpusError> {
    let (code, sort) = demo_imp(ws, stmt)?;
    let fun = demo_pipeline(ws, program)?;
    let target = &ws.lang(ws.compiler("imp_cc")?.target.as_str())?.lang;
    let text = format!("(link {} {})", full_surface(&code), full_surface(&fun.composed));
    let ctx = Ctx::new();
    let linked = ws.elab_term(target, &ctx, &text, Some(&sort))?;
    let wf = check_term(target, &ctx, &linked, &sort);
    if !wf.ok {
        return Err(demo_err(format!("linked program is ill formed: {}", wf.diagnostics[0])));
    }
    Ok(linked)
}
