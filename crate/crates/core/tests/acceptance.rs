//! Acceptance checks over the shipped corpus. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::proofs::{depth, mutate, random_proof, random_superset};
use common::stlc::{eval, Features, Gen, Ty, Value};
use common::{closed, rng, ws};
use gatforge::corpus::{self, demo_cps_cross, demo_imp, demo_link, demo_pipeline, parameterized_cps};
use gatforge::elaborator::{erase, wf_lang, CalculusNames, SurfaceTerm};
use gatforge::kernel::{rule_alpha_eq, Ctx, Lang, MetaSubst, Rule, Term};
use gatforge::metagen::{gen_eval_ctx, gen_subst_eqs, ArgKind, EvalCtxEntry, EvalCtxNames};
use gatforge::proofkit::{check_eq, EqProof, Equation};
use gatforge::rewrite::{partial_eval, RewriteConfig};
use gatforge::translate::{concat_compilers, embed_target, nontriviality_check, transport_proof, DischargeOptions, DischargeReport};
use gatforge::workspace::Workspace;
use rand::seq::SliceRandom;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn lang(name: &str) -> &'static Lang {
    &ws().lang(name).unwrap().lang
}

fn discharge(name: &str) -> Result<DischargeReport, String> {
    ws().discharge(name, &DischargeOptions::default()).map_err(err)
}

fn all_auto(name: &str, r: &DischargeReport) -> Result<(), String> {
    ensure(r.count("auto") == r.entries.len(), || {
        let other: Vec<String> =
            r.entries.iter().filter(|e| e.status.label() != "auto").map(|e| format!("{} ({})", e.obligation.source_rule, e.status.label())).collect();
        format!("{name}: not all auto: {}", other.join(", "))
    })
}

fn fixtures() -> Workspace {
    let mut fx = Workspace::new();
    for f in ["broken", "collapse"] {
        fx.load_file(&corpus::fixture_path(f)).unwrap();
    }
    fx
}

fn c01_wf() -> Check {
    let mut n = 0;
    for (name, l) in ws().langs.iter().chain(fixtures().langs.iter().filter(|(_, l)| l.file.starts_with(corpus::corpus_dir().join("fixtures")))) {
        let r = wf_lang(&l.lang);
        ensure(r.ok, || format!("{name}: {}", r.diagnostics[0]))?;
        n += 1;
    }
    let nv = wf_lang(lang("nat_vec"));
    let convs = nv.conversions.iter().filter(|c| c.location.contains("app-cons") && !c.proof.is_refl()).count();
    ensure(convs > 0, || format!("nat_vec app-cons records no non-reflexive conversion; locations: {:?}", nv.conversions.iter().map(|c| &c.location).collect::<Vec<_>>()))?;
    Ok(format!("{n} languages well formed; nat_vec app-cons needs {convs} non-reflexive conversion(s)"))
}

fn c02_cps_auto() -> Check {
    let t = Instant::now();
    let subst = discharge("cps_subst")?;
    let stlc = discharge("cps_stlc")?;
    let elapsed = t.elapsed();
    all_auto("cps_subst", &subst)?;
    all_auto("cps_stlc", &stlc)?;
    let both = subst.concat(&stlc);
    for rule in ["ret-subst", "app-subst", "lam-subst"] {
        let e = both.entries.iter().find(|e| e.obligation.source_rule.as_str() == rule);
        ensure(e.is_some_and(|e| e.status.label() == "auto"), || format!("generated `{rule}` is not discharged automatically"))?;
    }
    let beta = stlc.entries.iter().find(|e| e.obligation.source_rule.as_str() == "beta").ok_or("no beta obligation")?;
    let proof = beta.status.term_proof().ok_or("beta has no certificate")?;
    let eq = check_eq(lang("cont"), &beta.obligation.target_ctx, proof).map_err(err)?;
    let Some(Rule::TermEq { ctx, .. }) = lang("stlc").get_str("beta") else { return Err("no beta rule".into()) };
    let cmp = &ws().compiler("cps_stlc").unwrap().full;
    let src = |text: &str| ws().elab_term(lang("stlc"), ctx, text, None).map_err(err).and_then(|t| cmp.compile_term(&t).map_err(err));
    ensure(eq.lhs == src("(app (ret (lam e)) (ret v))")?, || "beta certificate starts elsewhere".into())?;
    ensure(eq.rhs == src("(exp_subst (snoc id v) e)")?, || "beta certificate ends elsewhere".into())?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} + {} obligations all auto in {elapsed:.2?}; beta certificate endpoints match", subst.entries.len(), stlc.entries.len()))
}

fn c03_replay() -> Check {
    let base = discharge("cps_subst")?.concat(&discharge("cps_stlc")?);
    let embedded = embed_target(&base, lang("cont"), lang("cont_rec")).map_err(err)?;
    ensure(embedded.entries.iter().all(|e| e.replayed), || "an embedded entry is not marked replayed".into())?;
    let ext = discharge("cps_rec")?;
    let report = embedded.concat(&ext);
    ensure(report.is_clean(), || "combined report has open obligations".into())?;
    let base_rules: BTreeSet<_> = base.entries.iter().map(|e| e.obligation.source_rule.clone()).collect();
    let reproved = ext.entries.iter().filter(|e| base_rules.contains(&e.obligation.source_rule)).count();
    ensure(reproved == 0, || format!("{reproved} base obligations re-proved"))?;
    let (stlc, rec) = (ws().compiler("cps_stlc").unwrap(), ws().compiler("cps_rec").unwrap());
    let joined = concat_compilers(&stlc.full, &rec.own).map_err(err)?;
    ensure(joined.names().into_iter().collect::<BTreeSet<_>>() == rec.full.names().into_iter().collect(), || "concatenation misses cases".into())?;
    Ok(format!("{} replayed + {} new obligations, clean, 0 re-proved", embedded.entries.len(), ext.entries.len()))
}

fn bool_text(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn c04_cps_cross() -> Check {
    let cfg = RewriteConfig::from_env();
    let bool_sort = "(exp emp bool)";
    let cmp = &ws().compiler("cps_bool").unwrap().full;
    for (text, answer) in [("(ret true)", "(jmp hd (nv (ns nz)))"), ("(ret false)", "(jmp hd (nv nz))")] {
        let (t, s) = closed("stlc_bool", text, bool_sort);
        let o = demo_cps_cross(ws(), &t, &cfg).map_err(err)?;
        let want = ws().elab_term(lang("cont_nat"), &Ctx::new(), answer, Some(&cmp.compile_sort(&s).map_err(err)?)).map_err(err)?;
        ensure(o.target_normal_form == want, || format!("{text} reached {}", o.target_normal_form))?;
    }
    let mut r = rng(4);
    for i in 0..20 {
        let e = Gen { rng: &mut r, features: Features::BOOL }.exp(&[], &Ty::Bool, 3);
        let Some(Value::Bool(b)) = eval(&[], &e, &mut 100_000) else { return Err(format!("oracle failed on {}", e.surface())) };
        let (t, _) = closed("stlc_bool", &e.surface(), bool_sort);
        let o = demo_cps_cross(ws(), &t, &cfg).map_err(err)?;
        ensure(o.source_value == SurfaceTerm::atom(bool_text(b)), || format!("program {i} {}: source gives {}, oracle {b}", e.surface(), o.source_value))?;
        ensure(o.agrees(), || format!("program {i} {}: target reached {}", e.surface(), o.target_normal_form))?;
    }
    Ok("ret true ~> k(nv 1), ret false ~> k(nv 0), 20/20 random programs agree with the oracle".into())
}

/// Accepted derivations in several languages, plus discharge certificates.
fn derivation_pool(seed: u64, per_lang: usize) -> Vec<(&'static Lang, Ctx, EqProof, Equation)> {
    let mut r = rng(seed);
    let mut pool = Vec::new();
    for name in ["nat_vec", "stlc_bool", "stlc_prod", "cont_nat", "clo"] {
        let l = lang(name);
        let mut got = 0;
        for _ in 0..per_lang * 20 {
            if got == per_lang {
                break;
            }
            if let Some((ctx, p, eq)) = random_proof(l, 4, &mut r) {
                pool.push((l, ctx, p, eq));
                got += 1;
            }
        }
    }
    pool
}

fn c05_monotonicity() -> Check {
    let mut pool = derivation_pool(5, 10);
    for e in discharge("cps_stlc")?.entries {
        if let Some(p) = e.status.term_proof() {
            let eq = check_eq(lang("cont"), &e.obligation.target_ctx, p).map_err(err)?;
            pool.push((lang("cont"), e.obligation.target_ctx.clone(), p.clone(), eq));
        }
    }
    let mut r = rng(55);
    for i in 0..200 {
        let (l, ctx, p, eq) = pool.choose(&mut r).unwrap();
        let bigger = random_superset(l, 4, i, &mut r);
        let again = check_eq(&bigger, ctx, p).map_err(|e| format!("case {i}: rejected in a superset: {e}"))?;
        ensure(again == *eq, || format!("case {i}: equation changed in a superset"))?;
    }
    Ok(format!("200/200 derivations (pool {}) unchanged in random supersets", pool.len()))
}

fn subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    for a in t.args() {
        subterms(a, out);
    }
}

fn c06_homomorphism() -> Check {
    let mut r = rng(6);
    let mut cases = 0;
    for pass in ["cps_all", "cc_all", "imp_cc"] {
        let c = ws().compiler(pass).unwrap();
        let mut pool = Vec::new();
        for (_, rule) in lang(c.source.as_str()).iter() {
            if let Rule::TermEq { lhs, rhs, .. } = rule {
                subterms(lhs, &mut pool);
                subterms(rhs, &mut pool);
            }
        }
        pool.retain(|t| c.full.compile_term(t).is_ok());
        let open: Vec<&Term> = pool.iter().filter(|t| !t.vars().is_empty() && matches!(t, Term::Con(..))).collect();
        for _ in 0..(if pass == "imp_cc" { 66 } else { 67 }) {
            let t = *open.choose(&mut r).unwrap();
            let gamma: MetaSubst = t.vars().into_iter().map(|x| (x, pool.choose(&mut r).unwrap().clone())).collect();
            let left = c.full.compile_term(&t.subst(&gamma)).map_err(err)?;
            let right = c.full.compile_term(t).map_err(err)?.subst(&c.full.compile_subst(&gamma).map_err(err)?);
            ensure(left == right, || format!("{pass}: compile does not commute with substitution on {t}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases}/200 compile(subst) == subst(compile)"))
}

fn c07_vcompose() -> Check {
    let mut r = rng(7);
    for i in 0..100 {
        let mut g = Gen { rng: &mut r, features: Features::ALL };
        let ty = g.ty(2);
        let e = g.exp(&[], &ty, 3);
        let (t, _) = closed("stlc_all", &e.surface(), &format!("(exp emp {})", ty.surface()));
        let o = demo_pipeline(ws(), &t).map_err(|e| format!("program {i}: {e}"))?;
        ensure(o.agrees(), || format!("program {i}: composed and sequential compilation differ"))?;
    }
    Ok("100/100 composite compilations equal sequential ones and are well formed".into())
}

fn c08_transport() -> Check {
    let passes: [(&str, &[&str]); 4] = [
        ("cps_stlc", &["cps_subst", "cps_stlc"]),
        ("cps_bool", &["cps_subst", "cps_stlc", "cps_bool"]),
        ("cps_prod", &["cps_subst", "cps_stlc", "cps_prod"]),
        ("cc", &["cc"]),
    ];
    let mut r = rng(8);
    let mut done = 0;
    let mut deepest = 0;
    for (pass, chain) in passes {
        let c = ws().compiler(pass).unwrap();
        let (src, tgt) = (lang(c.source.as_str()), lang(c.target.as_str()));
        let mut report = DischargeReport::default();
        for p in chain {
            report = report.concat(&discharge(p)?);
        }
        let mut got = 0;
        for _ in 0..2000 {
            if got == 25 {
                break;
            }
            let Some((ctx, p, eq)) = random_proof(src, 4, &mut r) else { continue };
            deepest = deepest.max(depth(&p));
            let q = transport_proof(&c.full, src, tgt, &report, &ctx, &p).map_err(|e| format!("{pass}: transport of {p}: {e}"))?;
            let tctx = c.full.compile_ctx(&ctx).map_err(err)?;
            let teq = check_eq(tgt, &tctx, &q).map_err(|e| format!("{pass}: transported proof rejected: {e}"))?;
            let want = (c.full.compile_term(&eq.lhs).map_err(err)?, c.full.compile_term(&eq.rhs).map_err(err)?, c.full.compile_sort(&eq.sort).map_err(err)?);
            ensure((teq.lhs, teq.rhs, teq.sort) == want, || format!("{pass}: transported proof of {p} proves another equation"))?;
            got += 1;
        }
        ensure(got == 25, || format!("{pass}: only {got} random proofs generated"))?;
        done += got;
    }
    ensure(deepest <= 4, || format!("depth {deepest}"))?;
    Ok(format!("{done}/100 transported proofs (depth <= {deepest}) accepted"))
}

fn c09_mutations() -> Check {
    let mut pool = derivation_pool(9, 8);
    let cc_rec = ws().compiler("cc_rec").unwrap();
    let obls = ws().obligations("cc_rec").map_err(err)?;
    for (rule, p) in ws().manual_proofs("cc_rec", &obls).map_err(err)? {
        let o = obls.iter().find(|o| o.source_rule == rule).unwrap();
        let l = lang(cc_rec.target.as_str());
        let eq = check_eq(l, &o.target_ctx, &p).map_err(err)?;
        pool.push((l, o.target_ctx.clone(), p, eq));
    }
    let mut r = rng(99);
    let (mut rejected, mut changed) = (0, 0);
    while rejected + changed < 500 {
        let (l, ctx, p, eq) = pool.choose(&mut r).unwrap();
        let Some(m) = mutate(l, ctx, p, &mut r) else { continue };
        match check_eq(l, ctx, &m) {
            Err(_) => rejected += 1,
            Ok(e) if e != *eq => changed += 1,
            Ok(_) => return Err(format!("mutation of {p}\n  into {m}\n  still proves the same equation")),
        }
    }
    Ok(format!("500 mutations: {rejected} rejected, {changed} prove a different equation"))
}

/// Independent of the engine's filter: counts metavariable atoms in the
/// surface (explicit-argument) forms of both sides.
fn duplicates(l: &Lang, rule: &Rule) -> bool {
    let Rule::TermEq { ctx, lhs, rhs, .. } = rule else { return false };
    fn count(s: &SurfaceTerm, x: &str) -> usize {
        match s {
            SurfaceTerm::Atom(a) => usize::from(a.as_str() == x),
            SurfaceTerm::App(_, args) => args.iter().map(|a| count(a, x)).sum(),
        }
    }
    let (l_s, r_s) = (erase(l, lhs), erase(l, rhs));
    ctx.names().iter().any(|x| count(&r_s, x.as_str()) > count(&l_s, x.as_str()))
}

fn c10_partial_eval() -> Check {
    let mut r = rng(10);
    let cps = &ws().compiler("cps_all").unwrap().full;
    let mut nondup_used = BTreeSet::new();
    for i in 0..100 {
        let mut g = Gen { rng: &mut r, features: Features::ALL };
        let ty = g.ty(2);
        let e = g.exp(&[], &ty, 3);
        let (src, _) = closed("stlc_all", &e.surface(), &format!("(exp emp {})", ty.surface()));
        let (l, t) = if i % 2 == 0 { (lang("stlc_all"), src) } else { (lang("cont_all"), cps.compile_term(&src).map_err(err)?) };
        let ctx = Ctx::new();
        let res = partial_eval(l, &ctx, &t, None).map_err(|e| format!("term {i}: {e}"))?;
        let eq = check_eq(l, &ctx, &res.certificate).map_err(|e| format!("term {i}: certificate rejected: {e}"))?;
        ensure(eq.lhs == t && eq.rhs == res.normal_form, || format!("term {i}: certificate endpoints differ"))?;
        let again = partial_eval(l, &ctx, &res.normal_form, None).map_err(err)?;
        ensure(again.normal_form == res.normal_form, || format!("term {i}: output is not idempotent"))?;
        for ax in res.certificate.axioms() {
            let rule = l.get(&ax).ok_or_else(|| format!("unknown axiom {ax}"))?;
            ensure(!duplicates(l, rule), || format!("term {i}: duplicating axiom `{ax}` used"))?;
            nondup_used.insert(ax);
        }
    }
    Ok(format!("100/100 partial evaluations checked, idempotent, {} distinct non-duplicating axioms used", nondup_used.len()))
}

fn c11_fixtures() -> Check {
    let fx = fixtures();
    let broken = fx.discharge("cps_bool_broken", &DischargeOptions::default()).map_err(err)?;
    let open: Vec<_> = broken.open().iter().map(|e| e.obligation.source_rule.to_string()).collect();
    ensure(open.len() == 1, || format!("broken fixture has open obligations {open:?}"))?;
    let collapse = fx.discharge("collapse", &DischargeOptions::default()).map_err(err)?;
    ensure(collapse.is_clean(), || "collapse fixture does not discharge".into())?;
    let (t, _) = closed("stlc_bool", "(ret true)", "(exp emp bool)");
    let (f, _) = closed("stlc_bool", "(ret false)", "(exp emp bool)");
    let cfg = RewriteConfig::from_env();
    let c = fx.compiler("collapse").map_err(err)?;
    let distinct = nontriviality_check(&c.full, &fx.lang(c.target.as_str()).map_err(err)?.lang, &t, &f, &cfg).map_err(err)?;
    ensure(!distinct, || "collapse keeps true and false apart".into())?;
    let cps = ws().compiler("cps_bool").unwrap();
    let control = nontriviality_check(&cps.full, lang(cps.target.as_str()), &t, &f, &cfg).map_err(err)?;
    ensure(control, || "cps_bool identifies true and false".into())?;
    Ok(format!("broken: one open ({}); collapse: {} auto, fails nontriviality; cps_bool passes it", open[0], collapse.count("auto")))
}

const EXPECTED_SUBST: &str = "
(import stlc)
(import source)
(lang expected_stlc_subst
  (extends stlc)
  (eq expected-app-subst (ctx (G ctx) (A ty) (B ty) (e (exp G (arr A B))) (e' (exp G A)) (D ctx) (g (sub D G)))
    (exp_subst g (app e e')) = (app (exp_subst g e) (exp_subst g e')) : (exp D B))
  (eq expected-lam-subst (ctx (G ctx) (A ty) (B ty) (e (exp (ext G A) B)) (D ctx) (g (sub D G)))
    (val_subst g (lam e)) = (lam (exp_subst (snoc (cmp wkn g) hd) e)) : (val D (arr A B))))
(lang expected_stlc_ectx
  (extends stlc_ectx)
  (term expected_app_l (ctx (G ctx) (A ty) (B ty) (X ty) (e (ectx G X (arr A B))) (e' (exp G A))) (args e e') (ectx G X B))
  (eq expected-plug-app_l (ctx (G ctx) (A ty) (B ty) (X ty) (e (ectx G X (arr A B))) (e' (exp G A)) (e0 (exp G X)))
    (plug (app_l e e') e0) = (app (plug e e0) e') : (exp G B))
  (term expected_app_r (ctx (G ctx) (A ty) (B ty) (e (val G (arr A B))) (X ty) (e' (ectx G X A))) (args e e') (ectx G X B))
  (eq expected-plug-app_r (ctx (G ctx) (A ty) (B ty) (e (val G (arr A B))) (X ty) (e' (ectx G X A)) (e0 (exp G X)))
    (plug (app_r e e') e0) = (app (ret e) (plug e' e0)) : (exp G B)))
";

fn c12_metagen() -> Check {
    let mut expected = Workspace::new();
    expected.load_str(EXPECTED_SUBST, &corpus::corpus_dir().join("expected.gat")).map_err(err)?;
    let want = |l: &str, n: &str| expected.lang(l).unwrap().lang.get_str(n).unwrap().clone();
    let stlc = lang("stlc");
    let got = gen_subst_eqs(stlc, &["app".into(), "lam".into()], &CalculusNames::default()).map_err(err)?;
    ensure(rule_alpha_eq(&got[0].1, &want("expected_stlc_subst", "expected-app-subst")), || format!("app-subst differs: {:?}", got[0].1))?;
    ensure(rule_alpha_eq(&got[1].1, &want("expected_stlc_subst", "expected-lam-subst")), || format!("lam-subst differs: {:?}", got[1].1))?;
    ensure(!rule_alpha_eq(&got[0].1, &want("expected_stlc_subst", "expected-lam-subst")), || "alpha-equality conflates app and lam".into())?;
    let entries = vec![
        EvalCtxEntry { name: "app_l".into(), base: "app".into(), kinds: vec![ArgKind::Hole, ArgKind::Expr] },
        EvalCtxEntry { name: "app_r".into(), base: "app".into(), kinds: vec![ArgKind::Value, ArgKind::Hole] },
    ];
    let rules = gen_eval_ctx(stlc, &entries, &EvalCtxNames::default()).map_err(err)?;
    let find = |n: &str| rules.iter().find(|(m, _)| m.as_str() == n).map(|(_, r)| r.clone()).ok_or_else(|| format!("`{n}` not generated"));
    for (gen, exp) in
        [("app_l", "expected_app_l"), ("plug-app_l", "expected-plug-app_l"), ("app_r", "expected_app_r"), ("plug-app_r", "expected-plug-app_r")]
    {
        ensure(rule_alpha_eq(&find(gen)?, &want("expected_stlc_ectx", exp)), || format!("`{gen}` differs from the hand-written rule"))?;
    }
    Ok("app/lam substitution equations and 4 evaluation-context rules match hand-written rules".into())
}

fn c13_parameterize() -> Check {
    let o = parameterized_cps(ws(), &DischargeOptions::default()).map_err(err)?;
    ensure(o.issues.is_empty(), || format!("param_checks: {}", o.issues[0]))?;
    ensure(o.source_wf.ok, || format!("parameterized source: {}", o.source_wf.diagnostics[0]))?;
    ensure(o.target_wf.ok, || format!("parameterized target: {}", o.target_wf.diagnostics[0]))?;
    ensure(o.report.is_clean(), || "parameterized compiler leaves open obligations".into())?;
    Ok(format!("parameterized subst ({} rules) well formed; {} obligations, {} auto", o.source.len(), o.report.entries.len(), o.report.count("auto")))
}

fn c14_imp() -> Check {
    let imp = wf_lang(lang("imp"));
    ensure(imp.ok, || format!("imp: {}", imp.diagnostics[0]))?;
    let report = discharge("imp_cc")?;
    ensure(report.is_clean(), || "imp_cc leaves open obligations".into())?;
    let heap_rules = ["assign-lit", "assign-var"];
    for e in report.manual() {
        ensure(heap_rules.contains(&e.obligation.source_rule.as_str()), || format!("manual proof for non-heap `{}`", e.obligation.source_rule))?;
    }
    let (skip, _) = corpus::closed_term(ws(), "imp", "skip", None).map_err(err)?;
    let (code, sort) = demo_imp(ws(), &skip).map_err(err)?;
    let want = ws().elab_term(lang("clo_all"), &Ctx::new(), "(jmp hd tt)", Some(&sort)).map_err(err)?;
    ensure(code == want, || format!("skip compiles to {code}"))?;
    let (stmt, _) = corpus::closed_term(ws(), "imp", "(seq (assign nz (lit (ns nz))) skip)", None).map_err(err)?;
    let (program, _) = closed("stlc_all", "(app (ret (lam (ret hd))) (ret tt))", "(exp emp unit)");
    let linked = demo_link(ws(), &stmt, &program).map_err(err)?;
    Ok(format!("imp well formed; imp_cc {} obligations clean; skip ~> k<>; linked program ({} nodes) well formed", report.entries.len(), linked.size()))
}

fn panic_text(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("corpus well formed", c01_wf),
        ("CPS discharges automatically", c02_cps_auto),
        ("extension replays base report", c03_replay),
        ("CPS cross-language check", c04_cps_cross),
        ("monotonicity", c05_monotonicity),
        ("compilation is a homomorphism", c06_homomorphism),
        ("vertical composition", c07_vcompose),
        ("proof transport", c08_transport),
        ("mutated proofs", c09_mutations),
        ("partial evaluation", c10_partial_eval),
        ("negative fixtures", c11_fixtures),
        ("generated rules", c12_metagen),
        ("parameterization", c13_parameterize),
        ("IMP and linking", c14_imp),
    ];
    ws();
    // Timed first and alone, so its budget is not shared with the rest.
    let stack = 512 << 20;
    let run = |f: fn() -> Check| -> (Check, Duration) {
        let t = Instant::now();
        let r = std::thread::Builder::new().stack_size(stack).spawn(f).unwrap().join().unwrap_or_else(|p| Err(panic_text(p)));
        (r, t.elapsed())
    };
    let first = run(criteria[1].1);
    let mut results: Vec<(Check, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 1)
            .map(|(_, (_, f))| {
                let f = *f;
                std::thread::Builder::new()
                    .stack_size(stack)
                    .spawn_scoped(s, move || {
                        let t = Instant::now();
                        let r = std::panic::catch_unwind(f).unwrap_or_else(|p| Err(panic_text(p)));
                        (r, t.elapsed())
                    })
                    .unwrap()
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    results.insert(1, first);
    let mut failed = 0;
    for (i, ((name, _), (res, took))) in criteria.iter().zip(&results).enumerate() {
        match res {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({took:.1?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({took:.1?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
