//! Loading declaration files into elaborated languages, compilers, manual
//! proofs and parameterization specs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;

use crate::elaborator::{CalculusNames, Elaborator, Macro, Macros, SurfaceTerm};
use crate::kernel::{Ctx, Lang, Name, Rule, Sort, Term};
use crate::metagen::{self, ArgKind, EvalCtxEntry, EvalCtxNames, ParamSpec};
use crate::proofkit::EqProof;
use crate::syntax::{self, CompilerDecl, Decl, LangDecl, LangItem, Loc, ParamSpecDecl, Pos, RuleBody, RuleDecl, Sexp};
use crate::translate::{self, CaseOut, Compiler, CompilerCase, DischargeOptions, DischargeReport, Obligation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub file: Option<PathBuf>,
    pub pos: Option<Pos>,
    pub message: String,
}

impl LoadError {
    pub fn new(message: impl Into<String>) -> Self {
        LoadError { file: None, pos: None, message: message.into() }
    }

    fn at(file: &Path, pos: Pos, message: impl Into<String>) -> Self {
        LoadError { file: Some(file.to_path_buf()), pos: Some(pos), message: message.into() }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, &self.pos) {
            (Some(file), Some(pos)) => write!(f, "{}:{pos}: {}", file.display(), self.message),
            (Some(file), None) => write!(f, "{}: {}", file.display(), self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for LoadError {}

#[derive(Clone, Debug)]
pub struct LoadedLang {
    pub name: Name,
    pub bases: Vec<Name>,
    /// Union of the base languages; a prefix of `lang`.
    pub base: Lang,
    pub lang: Lang,
    pub file: PathBuf,
}

impl LoadedLang {
    /// The rules this declaration added on top of its bases.
    pub fn ext(&self) -> Lang {
        self.lang.difference(&self.base)
    }
}

#[derive(Clone, Debug)]
pub struct LoadedCompiler {
    pub name: Name,
    pub bases: Vec<Name>,
    pub source: Name,
    pub target: Name,
    /// Cases declared here, in source rule order.
    pub own: Compiler,
    /// Base cases followed by `own`.
    pub full: Compiler,
    pub file: PathBuf,
}

/// Everything needed to generate and discharge one compiler's obligations.
pub struct Pass<'a> {
    pub compiler: &'a LoadedCompiler,
    pub source: &'a LoadedLang,
    pub target: &'a LoadedLang,
    pub cmp_pre: Compiler,
    pub source_ext: Lang,
}

#[derive(Default)]
pub struct Workspace {
    pub langs: IndexMap<Name, LoadedLang>,
    pub compilers: IndexMap<Name, LoadedCompiler>,
    pub proofs: BTreeMap<Name, Vec<(Name, Sexp)>>,
    pub specs: IndexMap<Name, ParamSpecDecl>,
    pub macros: Macros,
    loaded: BTreeSet<PathBuf>,
    loading: Vec<PathBuf>,
}

fn resolve_import(from: &Path, stem: &str) -> PathBuf {
    let dir = from.parent().unwrap_or(Path::new("."));
    let mut path = dir.join(stem);
    if path.extension().is_none() {
        path.set_extension("gat");
    }
    path
}

impl Workspace {
    pub fn new() -> Self {
        Workspace::default()
    }

    /// Loads a file and, first, everything it imports. A `.gat` file's
    /// sibling `.gatpf` file is loaded after it.
    pub fn load_file(&mut self, path: &Path) -> Result<(), LoadError> {
        let key = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
        if self.loaded.contains(&key) {
            return Ok(());
        }
        if self.loading.contains(&key) {
            return Err(LoadError { file: Some(path.to_path_buf()), pos: None, message: "import cycle".into() });
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| LoadError { file: Some(path.to_path_buf()), pos: None, message: e.to_string() })?;
        self.loading.push(key.clone());
        let result = self.load_str(&text, path);
        self.loading.pop();
        result?;
        self.loaded.insert(key);
        let proofs = path.with_extension("gatpf");
        if path.extension().is_some_and(|e| e == "gat") && proofs.is_file() {
            self.load_file(&proofs)?;
        }
        Ok(())
    }

    /// Loads every `.gat` file in `dir`, then every `.gatpf` file, each in
    /// name order.
    pub fn load_dir(&mut self, dir: &Path) -> Result<(), LoadError> {
        let read = std::fs::read_dir(dir).map_err(|e| LoadError { file: Some(dir.to_path_buf()), pos: None, message: e.to_string() })?;
        let mut files: Vec<PathBuf> = read.filter_map(|e| e.ok().map(|e| e.path())).collect();
        files.sort();
        for ext in ["gat", "gatpf"] {
            for f in files.iter().filter(|f| f.extension().is_some_and(|e| e == ext)) {
                self.load_file(f)?;
            }
        }
        Ok(())
    }

    /// Loads declarations from text; `path` locates imports and errors.
    pub fn load_str(&mut self, text: &str, path: &Path) -> Result<(), LoadError> {
        let file = syntax::parse_source(text).map_err(|e| LoadError::at(path, e.pos, e.message))?;
        for decl in file.decls {
            match decl {
                Decl::Import(stem, Loc(pos)) => {
                    let target = resolve_import(path, &stem);
                    self.load_file(&target).map_err(|e| match e.file {
                        Some(_) => e,
                        None => LoadError::at(path, pos, e.message),
                    })?;
                }
                Decl::Macro(m) => self.add_macro(path, m.pos.0, m.name, Macro { params: m.params, body: m.body })?,
                Decl::Lang(l) => self.load_lang(path, l)?,
                Decl::Compiler(c) => self.load_compiler(path, c)?,
                Decl::Proofs(p) => self.proofs.entry(p.compiler).or_default().extend(p.proofs),
                Decl::ParamSpec(s) => {
                    if self.specs.contains_key(&s.name) {
                        return Err(LoadError::at(path, s.pos.0, format!("duplicate specification `{}`", s.name)));
                    }
                    self.specs.insert(s.name.clone(), s);
                }
            }
        }
        Ok(())
    }

    fn add_macro(&mut self, path: &Path, pos: Pos, name: Name, m: Macro) -> Result<(), LoadError> {
        if self.macros.contains_key(&name) {
            return Err(LoadError::at(path, pos, format!("duplicate macro `{name}`")));
        }
        self.macros.insert(name, m);
        Ok(())
    }

    pub fn lang(&self, name: &str) -> Result<&LoadedLang, LoadError> {
        self.langs.get(&Name::new(name)).ok_or_else(|| LoadError::new(format!("unknown language `{name}`")))
    }

    pub fn compiler(&self, name: &str) -> Result<&LoadedCompiler, LoadError> {
        self.compilers.get(&Name::new(name)).ok_or_else(|| LoadError::new(format!("unknown compiler `{name}`")))
    }

    fn elab_rule(&self, lang: &Lang, r: &RuleDecl) -> Result<Rule, String> {
        let elab = Elaborator::new(lang).with_macros(&self.macros);
        let e = |err: crate::elaborator::ElabError| err.to_string();
        let ctx_of = |c: &syntax::SurfaceCtx| elab.ctx(c).map_err(e);
        Ok(match &r.body {
            RuleBody::Sort { ctx, args } => Rule::Sort { ctx: ctx_of(ctx)?, explicit: args.clone() },
            RuleBody::Term { ctx, args, sort } => {
                let ctx = ctx_of(ctx)?;
                let sort = elab.sort(&ctx, sort).map_err(e)?;
                Rule::Term { ctx, explicit: args.clone(), sort }
            }
            RuleBody::Eq { ctx, lhs, rhs, sort } => {
                let ctx = ctx_of(ctx)?;
                let sort = elab.sort(&ctx, sort).map_err(e)?;
                let lhs = elab.term(&ctx, lhs, Some(&sort)).map_err(|err| format!("left side: {err}"))?;
                let rhs = elab.term(&ctx, rhs, Some(&sort)).map_err(|err| format!("right side: {err}"))?;
                Rule::TermEq { ctx, lhs, rhs, sort }
            }
            RuleBody::SortEq { ctx, lhs, rhs } => {
                let ctx = ctx_of(ctx)?;
                Rule::SortEq { lhs: elab.sort(&ctx, lhs).map_err(e)?, rhs: elab.sort(&ctx, rhs).map_err(e)?, ctx }
            }
        })
    }

    fn load_lang(&mut self, path: &Path, decl: LangDecl) -> Result<(), LoadError> {
        let pos = decl.pos.0;
        if self.langs.contains_key(&decl.name) {
            return Err(LoadError::at(path, pos, format!("duplicate language `{}`", decl.name)));
        }
        let mut base = Lang::new();
        for b in &decl.extends {
            let l = self.langs.get(b).ok_or_else(|| LoadError::at(path, pos, format!("unknown base language `{b}`")))?;
            base = base.union(&l.lang).map_err(|e| LoadError::at(path, pos, e.to_string()))?;
        }
        let mut lang = base.clone();
        let calc = CalculusNames::default();
        let push = |lang: &mut Lang, rules: Vec<(Name, Rule)>, at: Pos| -> Result<(), LoadError> {
            for (n, r) in rules {
                lang.push(n, r).map_err(|e| LoadError::at(path, at, e.to_string()))?;
            }
            Ok(())
        };
        for item in decl.items {
            match item {
                LangItem::Rule(r) => {
                    let rule = self.elab_rule(&lang, &r).map_err(|m| LoadError::at(path, r.pos.0, format!("`{}`: {m}", r.name)))?;
                    push(&mut lang, vec![(r.name, rule)], r.pos.0)?;
                }
                LangItem::GenSubst(cons, Loc(at)) => {
                    let rules = metagen::gen_subst_eqs(&lang, &cons, &calc).map_err(|e| LoadError::at(path, at, e.to_string()))?;
                    push(&mut lang, rules, at)?;
                }
                LangItem::EvalCtx(entries, Loc(at)) => {
                    let entries = entries
                        .into_iter()
                        .map(|e| {
                            let kinds = e
                                .kinds
                                .iter()
                                .map(|k| ArgKind::parse(k.as_str()).ok_or_else(|| LoadError::at(path, at, format!("unknown position kind `{k}`"))))
                                .collect::<Result<Vec<_>, _>>()?;
                            Ok(EvalCtxEntry { name: e.name, base: e.base, kinds })
                        })
                        .collect::<Result<Vec<_>, LoadError>>()?;
                    let rules = metagen::gen_eval_ctx(&lang, &entries, &EvalCtxNames::default())
                        .map_err(|e| LoadError::at(path, at, e.to_string()))?;
                    push(&mut lang, rules, at)?;
                }
                LangItem::Macro(m) => self.add_macro(path, m.pos.0, m.name, Macro { params: m.params, body: m.body })?,
            }
        }
        let loaded = LoadedLang { name: decl.name.clone(), bases: decl.extends, base, lang, file: path.to_path_buf() };
        self.langs.insert(decl.name, loaded);
        Ok(())
    }

    fn load_compiler(&mut self, path: &Path, decl: CompilerDecl) -> Result<(), LoadError> {
        let pos = decl.pos.0;
        let err = |m: String| LoadError::at(path, pos, m);
        if self.compilers.contains_key(&decl.name) {
            return Err(err(format!("duplicate compiler `{}`", decl.name)));
        }
        let source = &self.lang(decl.source.as_str()).map_err(|e| err(e.message))?.lang;
        let target = &self.lang(decl.target.as_str()).map_err(|e| err(e.message))?.lang;
        let (mut visible, _) = self.merge_bases(&decl.extends).map_err(|e| err(e.message))?;
        for b in &decl.extends {
            let base = &self.compilers[b];
            let (bs, bt) = (&self.langs[&base.source].lang, &self.langs[&base.target].lang);
            if !bs.is_subset_of(source) || !bt.is_subset_of(target) {
                return Err(err(format!("`{b}` does not compile a sublanguage of `{}` into one of `{}`", decl.source, decl.target)));
            }
        }
        let mut cases: Vec<_> = decl.cases.iter().collect();
        for c in &cases {
            match source.get(&c.rule) {
                Some(r) if r.is_constructor() => {}
                _ => return Err(LoadError::at(path, c.pos.0, format!("`{}` is not a constructor of `{}`", c.rule, decl.source))),
            }
        }
        cases.sort_by_key(|c| source.index_of(&c.rule));
        let elab = Elaborator::new(target).with_macros(&self.macros);
        let mut own = Compiler::new();
        for c in cases {
            let at = |m: String| LoadError::at(path, c.pos.0, format!("case `{}`: {m}", c.rule));
            let rule = source.get(&c.rule).expect("checked above");
            let names = rule.ctx().names();
            if let Some(ps) = &c.params {
                if *ps != names {
                    return Err(at(format!("parameters must be the rule context {names:?}")));
                }
            }
            let ctx_t = visible.compile_ctx(rule.ctx()).map_err(|e| at(e.to_string()))?;
            let out = match rule {
                Rule::Sort { .. } => CaseOut::Sort(elab.sort(&ctx_t, &c.out).map_err(|e| at(e.to_string()))?),
                Rule::Term { sort, .. } => {
                    let want = visible.compile_sort(sort).map_err(|e| at(e.to_string()))?;
                    CaseOut::Term(elab.term(&ctx_t, &c.out, Some(&want)).map_err(|e| at(e.to_string()))?)
                }
                _ => unreachable!("constructors only"),
            };
            let case = CompilerCase { params: names, out };
            visible.push(c.rule.clone(), case.clone()).map_err(|e| at(e.to_string()))?;
            own.push(c.rule.clone(), case).map_err(|e| at(e.to_string()))?;
        }
        let loaded = LoadedCompiler {
            name: decl.name.clone(),
            bases: decl.extends,
            source: decl.source,
            target: decl.target,
            own,
            full: visible,
            file: path.to_path_buf(),
        };
        self.compilers.insert(decl.name, loaded);
        Ok(())
    }

    /// Union of the named compilers' cases and of their source languages.
    /// Compilers sharing an ancestor agree on its cases; any other overlap
    /// is an error.
    fn merge_bases(&self, bases: &[Name]) -> Result<(Compiler, Lang), LoadError> {
        let mut cmp = Compiler::new();
        let mut src = Lang::new();
        for b in bases {
            let base = self.compiler(b.as_str())?;
            for (n, case) in base.full.iter() {
                match cmp.get(n) {
                    Some(existing) if existing == case => {}
                    Some(_) => return Err(LoadError::new(format!("base compilers disagree on the case for `{n}`"))),
                    None => cmp.push(n.clone(), case.clone()).expect("checked absent"),
                }
            }
            src = src.union(&self.langs[&base.source].lang).map_err(|e| LoadError::new(e.to_string()))?;
        }
        Ok((cmp, src))
    }

    pub fn pass(&self, compiler: &str) -> Result<Pass<'_>, LoadError> {
        let c = self.compiler(compiler)?;
        let source = &self.langs[&c.source];
        let target = &self.langs[&c.target];
        let (cmp_pre, base_src) = self.merge_bases(&c.bases)?;
        let source_ext = source.lang.difference(&base_src);
        Ok(Pass { compiler: c, source, target, cmp_pre, source_ext })
    }

    pub fn obligations(&self, compiler: &str) -> Result<Vec<Obligation>, LoadError> {
        let p = self.pass(compiler)?;
        translate::obligations(&p.cmp_pre, &p.compiler.own, &p.source_ext).map_err(|e| LoadError::new(format!("{compiler}: {e}")))
    }

    /// Manual proofs declared for `compiler`, read against each obligation's
    /// target context.
    pub fn manual_proofs(&self, compiler: &str, obls: &[Obligation]) -> Result<BTreeMap<Name, EqProof>, LoadError> {
        let mut out = BTreeMap::new();
        let Some(proofs) = self.proofs.get(&Name::new(compiler)) else { return Ok(out) };
        for (rule, tree) in proofs {
            let obl = obls
                .iter()
                .find(|o| o.source_rule == *rule)
                .ok_or_else(|| LoadError::new(format!("proof for `{rule}`, which is not an obligation of `{compiler}`")))?;
            let p = syntax::parse_proof(tree, &obl.target_ctx).map_err(|e| LoadError { file: None, pos: Some(e.pos), message: e.message })?;
            if out.insert(rule.clone(), p).is_some() {
                return Err(LoadError::new(format!("two proofs for `{rule}`")));
            }
        }
        Ok(out)
    }

    pub fn discharge(&self, compiler: &str, opts: &DischargeOptions) -> Result<DischargeReport, LoadError> {
        let obls = self.obligations(compiler)?;
        let manual = self.manual_proofs(compiler, &obls)?;
        let target = &self.langs[&self.compiler(compiler)?.target].lang;
        Ok(translate::discharge(&obls, target, &manual, opts))
    }

    /// Elaborates a parameterization spec's parameter sort in `lang`.
    pub fn param_spec(&self, name: &str, lang: &Lang) -> Result<ParamSpec, LoadError> {
        let d = self.specs.get(&Name::new(name)).ok_or_else(|| LoadError::new(format!("unknown specification `{name}`")))?;
        let sort = Elaborator::new(lang).sort(&Ctx::new(), &d.sort).map_err(|e| LoadError::new(format!("{name}: {e}")))?;
        let mut spec = ParamSpec::new(d.param.clone(), sort, d.marked.iter().cloned());
        spec.positions = d.positions.iter().cloned().collect();
        Ok(spec)
    }

    /// Elaborates surface text (macros allowed) in `lang` under `ctx`.
    pub fn elab_term(&self, lang: &Lang, ctx: &Ctx, text: &str, expected: Option<&Sort>) -> Result<Term, LoadError> {
        let st = parse_surface(text)?;
        Elaborator::new(lang).with_macros(&self.macros).term(ctx, &st, expected).map_err(|e| LoadError::new(format!("{text}: {e}")))
    }

    pub fn elab_sort(&self, lang: &Lang, ctx: &Ctx, text: &str) -> Result<Sort, LoadError> {
        let st = parse_surface(text)?;
        Elaborator::new(lang).with_macros(&self.macros).sort(ctx, &st).map_err(|e| LoadError::new(format!("{text}: {e}")))
    }
}

/// One surface term from text.
pub fn parse_surface(text: &str) -> Result<SurfaceTerm, LoadError> {
    let syn = |e: syntax::SyntaxError| LoadError { file: None, pos: Some(e.pos), message: e.message };
    match syntax::parse_sexps(text).map_err(syn)?.as_slice() {
        [one] => syntax::surface_of(one).map_err(syn),
        xs => Err(LoadError::new(format!("expected one term, found {}", xs.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "
(macro two () (s (s z)))
(lang nat
  (sort nat (ctx))
  (term z (ctx) (nat))
  (term s (ctx (n nat)) (args n) (nat)))";

    fn load(text: &str) -> Result<Workspace, LoadError> {
        let mut ws = Workspace::new();
        ws.load_str(text, Path::new("mem.gat"))?;
        Ok(ws)
    }

    #[test]
    fn macros_expand_during_elaboration() {
        let ws = load(NAT).unwrap();
        let nat = &ws.lang("nat").unwrap().lang;
        let t = ws.elab_term(nat, &Ctx::new(), "(two)", None).unwrap();
        let z = Term::con("z", vec![]);
        assert_eq!(t, Term::con("s", vec![Term::con("s", vec![z])]));
        assert_eq!(ws.elab_sort(nat, &Ctx::new(), "(nat)").unwrap(), Sort::constant("nat"));
    }

    #[test]
    fn errors_carry_file_and_position() {
        let e = load("(lang a (sort a (ctx))) (lang a (sort b (ctx)))").err().unwrap();
        assert_eq!(e.file.as_deref(), Some(Path::new("mem.gat")));
        assert!(e.pos.is_some(), "{e}");
        let e = load("(lang b (extends missing))").err().unwrap();
        assert!(e.message.contains("missing"), "{e}");
        assert!(load("(lang c (sort c (ctx))").is_err());
        let e = load("(lang d (sort d (ctx)) (term f (ctx (x (d)) (x (d))) (args x) (d)))").err().unwrap();
        assert!(e.pos.is_some() && e.message.contains('x'), "{e}");
        let mut two_macros = NAT.to_string();
        two_macros.push_str("\n(macro two () z)");
        assert!(load(&two_macros).err().unwrap().message.contains("duplicate macro"));
    }

    #[test]
    fn ill_formed_terms_are_rejected() {
        let ws = load(NAT).unwrap();
        let nat = &ws.lang("nat").unwrap().lang;
        assert!(ws.elab_term(nat, &Ctx::new(), "(s z z)", None).is_err());
        assert!(ws.elab_term(nat, &Ctx::new(), "x", None).is_err());
        assert!(ws.lang("stlc").is_err());
        assert!(parse_surface("(s z").is_err());
    }
}
