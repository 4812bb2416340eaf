mod resolve;

/// Writes to stdout, exiting quietly once the reader has gone away, as when
/// piped into `head`.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("writing to stdout: {e}");
        }
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        out!($($arg)*);
        out!("\n");
    }};
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gatforge::corpus::{self, RunError};
use gatforge::elaborator::{erase, wf_lang};
use gatforge::kernel::{Ctx, Name, Sort, Term};
use gatforge::metagen::{param_checks, parameterize_lang};
use gatforge::report::{obligations_json, report_json};
use gatforge::rewrite::{RewriteConfig, RewriteError, RuleFilter};
use gatforge::syntax::{print_compiler, print_lang, print_proof};
use gatforge::translate::{concat_compilers, embed_target, vcompose, DischargeOptions, Status};
use gatforge::workspace::{LoadError, Workspace};

use resolve::Kind;

#[derive(Parser)]
#[command(name = "gatforge", version, about = "Check languages and the compilers between them")]
struct Cli {
    /// Directory searched for bare names; defaults to $GATFORGE_CORPUS or ./corpus.
    #[arg(long, global = true)]
    dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    All,
    Nondup,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    CpsCross,
    OpBridge,
    Pipeline,
    Imp,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that languages are well formed.
    Check { lang: String },
    /// Elaborate a surface term, printing its full form and sort.
    Elab {
        lang: String,
        term: String,
        #[arg(long)]
        sort: Option<String>,
    },
    /// Rewrite a term to normal form.
    Normalize {
        lang: String,
        term: String,
        #[arg(long)]
        sort: Option<String>,
        #[arg(long)]
        fuel: Option<usize>,
        #[arg(long, value_enum, default_value = "all")]
        filter: Filter,
        /// Print the certificate.
        #[arg(long)]
        proof: bool,
    },
    /// Compile a closed source term.
    Compile {
        pass: String,
        term: String,
        #[arg(long)]
        sort: Option<String>,
    },
    /// List the obligations of a pass.
    Obligations {
        pass: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Discharge the obligations of a pass.
    Discharge {
        pass: String,
        /// Extra directory of `.gatpf` proof files.
        #[arg(long)]
        proofs: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        fuel: Option<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compose two compilers, `g` after `f`.
    Compose {
        g: String,
        f: String,
        #[arg(short)]
        o: PathBuf,
    },
    /// Extend compiler `a` by the cases of `b`, replaying `a`'s report.
    Concat {
        a: String,
        b: String,
        #[arg(short)]
        o: PathBuf,
    },
    /// Parameterize a language by a specification.
    Parameterize {
        spec: String,
        lang: String,
        #[arg(short)]
        o: PathBuf,
    },
    /// Run one of the shipped end-to-end demos.
    Demo {
        #[arg(value_enum)]
        name: Demo,
        #[arg(long)]
        fuel: Option<usize>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error("{0}")]
    Other(String),
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

/// Whether the command finished without diagnostics.
type Outcome = Result<bool, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = resolve::default_dir(cli.dir.as_deref());
    match run(cli.cmd, &dir) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd, dir: &Path) -> Outcome {
    match cmd {
        Cmd::Check { lang } => check(&lang, dir),
        Cmd::Elab { lang, term, sort } => elab(&lang, &term, sort.as_deref(), dir),
        Cmd::Normalize { lang, term, sort, fuel, filter, proof } => normalize(&lang, &term, sort.as_deref(), fuel, filter, proof, dir),
        Cmd::Compile { pass, term, sort } => compile(&pass, &term, sort.as_deref(), dir),
        Cmd::Obligations { pass, json } => obligations(&pass, json.as_deref(), dir),
        Cmd::Discharge { pass, proofs, jobs, fuel, json } => discharge(&pass, proofs.as_deref(), jobs, fuel, json.as_deref(), dir),
        Cmd::Compose { g, f, o } => compose(&g, &f, &o, dir),
        Cmd::Concat { a, b, o } => concat(&a, &b, &o, dir),
        Cmd::Parameterize { spec, lang, o } => parameterize(&spec, &lang, &o, dir),
        Cmd::Demo { name, fuel } => demo(name, fuel, dir),
    }
}

fn rewrite_config(fuel: Option<usize>) -> RewriteConfig {
    let cfg = RewriteConfig::from_env();
    match fuel {
        Some(n) => cfg.with_fuel(n),
        None => cfg,
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    if path == Path::new("-") {
        out!("{text}");
        return Ok(());
    }
    std::fs::write(path, text).map_err(|e| other(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).map_err(other)?;
    text.push('\n');
    write_out(path, &text)
}

fn check(arg: &str, dir: &Path) -> Outcome {
    let r = resolve::load(arg, dir)?;
    let names = if r.ws.langs.contains_key(&Name::new(&r.name)) {
        vec![r.name.clone()]
    } else {
        r.declared_here(Kind::Lang)
    };
    if names.is_empty() {
        return Err(other(format!("no language named `{}`", r.name)));
    }
    let mut ok = true;
    for n in names {
        let lang = &r.ws.lang(&n)?.lang;
        let report = wf_lang(lang);
        for d in &report.diagnostics {
            eprintln!("{n}: {d}");
        }
        let verdict = if report.ok { "ok" } else { "ill-formed" };
        outln!("{n}: {verdict} ({} rules, {} sort conversions)", lang.len(), report.conversions.len());
        ok &= report.ok;
    }
    Ok(ok)
}

fn closed(ws: &Workspace, lang: &str, text: &str, sort: Option<&str>) -> Result<(Term, Sort), CliError> {
    Ok(corpus::closed_term(ws, lang, text, sort)?)
}

fn elab(arg: &str, text: &str, sort: Option<&str>, dir: &Path) -> Outcome {
    let r = resolve::load(arg, dir)?;
    let name = r.item(Kind::Lang)?;
    let (t, s) = closed(&r.ws, &name, text, sort)?;
    outln!("{t}");
    outln!(": {s}");
    Ok(true)
}

fn normalize(arg: &str, text: &str, sort: Option<&str>, fuel: Option<usize>, filter: Filter, proof: bool, dir: &Path) -> Outcome {
    let r = resolve::load(arg, dir)?;
    let name = r.item(Kind::Lang)?;
    let lang = &r.ws.lang(&name)?.lang;
    let (t, s) = closed(&r.ws, &name, text, sort)?;
    let mut cfg = rewrite_config(fuel);
    if let Filter::Nondup = filter {
        cfg = cfg.with_filter(RuleFilter::NonDuplicating);
    }
    let rw = gatforge::rewrite::Rewriter::new(lang, cfg);
    let (res, complete) = match rw.normalize_at(&Ctx::new(), &t, &s) {
        Ok(res) => (res, true),
        Err(RewriteError::FuelExhausted(partial)) => (*partial, false),
        Err(e) => return Err(other(e)),
    };
    outln!("{}", erase(lang, &res.normal_form));
    outln!("steps: {}", res.steps_used);
    outln!("certificate: {}", gatforge::proofkit::proof_digest(&res.certificate));
    if proof {
        outln!("{}", print_proof(&res.certificate));
    }
    if !complete {
        eprintln!("fuel exhausted after {} steps", res.steps_used);
    }
    Ok(complete)
}

fn compile(arg: &str, text: &str, sort: Option<&str>, dir: &Path) -> Outcome {
    let r = resolve::load(arg, dir)?;
    let name = r.item(Kind::Compiler)?;
    let c = r.ws.compiler(&name)?;
    let (t, s) = closed(&r.ws, c.source.as_str(), text, sort)?;
    let out = c.full.compile_term(&t).map_err(other)?;
    let out_sort = c.full.compile_sort(&s).map_err(other)?;
    let target = &r.ws.lang(c.target.as_str())?.lang;
    let wf = gatforge::elaborator::check_term(target, &Ctx::new(), &out, &out_sort);
    for d in &wf.diagnostics {
        eprintln!("{}: {d}", c.target);
    }
    outln!("{}", erase(target, &out));
    outln!(": {out_sort}");
    Ok(wf.ok)
}

fn obligations(arg: &str, json: Option<&Path>, dir: &Path) -> Outcome {
    let r = resolve::load(arg, dir)?;
    let name = r.item(Kind::Compiler)?;
    let obls = r.ws.obligations(&name)?;
    match json {
        Some(path) => write_json(path, &obligations_json(&name, &obls))?,
        None => {
            for o in &obls {
                outln!("{o}");
            }
        }
    }
    Ok(true)
}

fn discharge(arg: &str, proofs: Option<&Path>, jobs: usize, fuel: Option<usize>, json: Option<&Path>, dir: &Path) -> Outcome {
    let mut r = resolve::load(arg, dir)?;
    if let Some(pdir) = proofs {
        let mut files: Vec<PathBuf> = std::fs::read_dir(pdir)
            .map_err(|e| other(format!("{}: {e}", pdir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "gatpf"))
            .collect();
        files.sort();
        for f in files {
            r.ws.load_file(&f)?;
        }
    }
    let name = r.item(Kind::Compiler)?;
    let opts = DischargeOptions { rewrite: rewrite_config(fuel), jobs };
    let report = r.ws.discharge(&name, &opts)?;
    let mut table = String::new();
    for e in &report.entries {
        let o = &e.obligation;
        let steps = match &e.status {
            Status::Auto { steps, .. } => steps.to_string(),
            _ => "-".into(),
        };
        table.push_str(&format!("{:<6} {:<8} {:>6}  {}\n", e.status.label(), o.kind.as_str(), steps, o.source_rule));
        if let Status::Open { reason } = &e.status {
            eprintln!("{name}: open obligation `{}`: {reason}", o.source_rule);
        }
    }
    table.push_str(&format!(
        "{name}: {} obligations, {} auto, {} manual, {} open\n",
        report.entries.len(),
        report.count("auto"),
        report.count("manual"),
        report.count("open")
    ));
    // The JSON report owns stdout when it is written there.
    if json == Some(Path::new("-")) {
        eprint!("{table}");
    } else {
        out!("{table}");
    }
    if let Some(path) = json {
        write_json(path, &report_json(&name, &report))?;
    }
    Ok(report.is_clean())
}

fn two_compilers(a: &str, b: &str, dir: &Path) -> Result<(Workspace, String, String), CliError> {
    let mut ws = Workspace::new();
    let a = resolve::load_into(&mut ws, a, dir, Kind::Compiler)?;
    let b = resolve::load_into(&mut ws, b, dir, Kind::Compiler)?;
    Ok((ws, a, b))
}

fn compose(g: &str, f: &str, out: &Path, dir: &Path) -> Outcome {
    let (ws, g, f) = two_compilers(g, f, dir)?;
    let (gc, fc) = (ws.compiler(&g)?, ws.compiler(&f)?);
    let mid = &ws.lang(fc.target.as_str())?.lang;
    if !mid.is_subset_of(&ws.lang(gc.source.as_str())?.lang) {
        return Err(other(format!("`{f}` targets `{}`, which `{g}` does not accept", fc.target)));
    }
    let composed = vcompose(&gc.full, &fc.full).map_err(other)?;
    let name = Name::new(format!("{g}_after_{f}"));
    write_out(out, &print_compiler(&name, &fc.source, &gc.target, &composed))?;
    outln!("{name}: {} cases, {} -> {}", composed.len(), fc.source, gc.target);
    Ok(true)
}

fn concat(a: &str, b: &str, out: &Path, dir: &Path) -> Outcome {
    let (ws, a, b) = two_compilers(a, b, dir)?;
    let (ac, bc) = (ws.compiler(&a)?, ws.compiler(&b)?);
    let own = bc.full.restrict(|n| !ac.full.contains(n));
    let joined = concat_compilers(&ac.full, &own).map_err(other)?;
    let name = Name::new(format!("{a}_{b}"));
    write_out(out, &print_compiler(&name, &bc.source, &bc.target, &joined))?;

    let opts = DischargeOptions::default();
    let base = ws.discharge(&a, &opts)?;
    let (lt, lt_ext) = (&ws.lang(ac.target.as_str())?.lang, &ws.lang(bc.target.as_str())?.lang);
    let replayed = embed_target(&base, lt, lt_ext).map_err(other)?;
    let report = replayed.concat(&ws.discharge(&b, &opts)?);
    for e in report.open() {
        eprintln!("{name}: open obligation `{}`", e.obligation.source_rule);
    }
    let n_replayed = report.entries.iter().filter(|e| e.replayed).count();
    outln!(
        "{name}: {} cases; {} obligations, {} replayed, {} auto, {} manual, {} open",
        joined.len(),
        report.entries.len(),
        n_replayed,
        report.count("auto"),
        report.count("manual"),
        report.count("open")
    );
    Ok(report.is_clean())
}

fn parameterize(spec: &str, arg: &str, out: &Path, dir: &Path) -> Outcome {
    let r = resolve::load(arg, dir)?;
    let name = r.item(Kind::Lang)?;
    let lang = &r.ws.lang(&name)?.lang;
    let spec = r.ws.param_spec(spec, lang)?;
    let issues = param_checks(lang, &spec);
    for i in &issues {
        eprintln!("{name}: {i}");
    }
    if !issues.is_empty() {
        return Ok(false);
    }
    let out_lang = parameterize_lang(lang, &spec).map_err(other)?;
    let wf = wf_lang(&out_lang);
    for d in &wf.diagnostics {
        eprintln!("{name}: {d}");
    }
    let new_name = Name::new(format!("{name}_{}", spec.param.as_str().to_lowercase()));
    write_out(out, &print_lang(&new_name, &out_lang))?;
    outln!("{new_name}: {} rules, {}", out_lang.len(), if wf.ok { "ok" } else { "ill-formed" });
    Ok(wf.ok)
}

fn demo(which: Demo, fuel: Option<usize>, dir: &Path) -> Outcome {
    let mut ws = Workspace::new();
    ws.load_dir(dir)?;
    let cfg = rewrite_config(fuel);
    let mut ok = true;
    let mut verdict = |label: String, good: bool, detail: String| {
        outln!("{} {label}: {detail}", if good { "ok  " } else { "FAIL" });
        ok &= good;
    };
    let all = matches!(which, Demo::All);
    if all || matches!(which, Demo::CpsCross) {
        for p in corpus::CROSS_PROGRAMS {
            let (t, _) = corpus::closed_term(&ws, "stlc_bool", p, Some("(exp emp bool)"))?;
            let o = corpus::demo_cps_cross(&ws, &t, &cfg)?;
            let target = &ws.lang("cont_nat")?.lang;
            verdict(format!("cps_cross {p}"), o.agrees(), format!("{} ~> {}", o.source_value, erase(target, &o.target_normal_form)));
        }
    }
    if all || matches!(which, Demo::OpBridge) {
        let last = corpus::BRIDGE_PROGRAMS.len() - 1;
        for (i, (p, s)) in corpus::BRIDGE_PROGRAMS.iter().enumerate() {
            let (t, _) = corpus::closed_term(&ws, "stlc_all", p, Some(s))?;
            match corpus::demo_op_bridge(&ws, &t, cfg.fuel.min(2000))? {
                Ok(o) => verdict(
                    format!("op_bridge {p}"),
                    o.related() && i != last,
                    format!("{} ~ {} in {}/{} steps", o.source.value, o.target.value, o.source.rules.len(), o.target.rules.len()),
                ),
                Err(e @ RunError::FuelExhausted(_)) => verdict(format!("op_bridge {p}"), i == last, e.to_string()),
                Err(e) => verdict(format!("op_bridge {p}"), false, e.to_string()),
            }
        }
    }
    if all || matches!(which, Demo::Pipeline) {
        for (p, s) in corpus::PIPELINE_PROGRAMS {
            let (t, _) = corpus::closed_term(&ws, "stlc_all", p, Some(s))?;
            let o = corpus::demo_pipeline(&ws, &t)?;
            verdict(format!("pipeline {p}"), o.agrees(), format!("{} nodes, well formed", o.composed.size()));
        }
    }
    if all || matches!(which, Demo::Imp) {
        let (f, fs) = corpus::PIPELINE_PROGRAMS[0];
        let (program, _) = corpus::closed_term(&ws, "stlc_all", f, Some(fs))?;
        let target = &ws.lang("clo_all")?.lang;
        for p in corpus::IMP_PROGRAMS {
            let (t, _) = corpus::closed_term(&ws, "imp", p, None)?;
            let (code, _) = corpus::demo_imp(&ws, &t)?;
            let linked = corpus::demo_link(&ws, &t, &program)?;
            let shown = erase(target, &code).to_string();
            let shown = if shown.chars().count() > 60 { format!("{}...", shown.chars().take(60).collect::<String>()) } else { shown };
            verdict(format!("imp {p}"), true, format!("{shown}; linked with {f}: {} nodes, well formed", linked.size()));
        }
    }
    Ok(ok)
}
