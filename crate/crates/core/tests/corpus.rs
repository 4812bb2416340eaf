mod common;

use std::fs;
use std::path::Path;

use common::ws;
use gatforge::corpus::{self, generate_proofs, PASSES};
use gatforge::rewrite::RewriteConfig;
use gatforge::syntax::{parse_source, print_lang, print_source};
use gatforge::translate::DischargeOptions;
use gatforge::workspace::Workspace;

fn corpus_files() -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for dir in [corpus::corpus_dir(), corpus::corpus_dir().join("fixtures")] {
        for entry in fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().is_some_and(|e| e == "gat" || e == "gatpf") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn printing_parsed_files_is_a_fixpoint() {
    for path in corpus_files() {
        let text = fs::read_to_string(&path).unwrap();
        let once = print_source(&parse_source(&text).unwrap());
        let twice = print_source(&parse_source(&once).unwrap_or_else(|e| panic!("{}: reprint does not parse: {e:?}", path.display())));
        assert_eq!(once, twice, "{}", path.display());
    }
}

#[test]
fn elaborated_languages_reload_unchanged() {
    for (name, l) in &ws().langs {
        let text = print_lang(name, &l.lang);
        let mut fresh = Workspace::new();
        fresh.load_str(&text, Path::new("printed.gat")).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        let again = &fresh.lang(name.as_str()).unwrap().lang;
        assert!(l.lang.iter().eq(again.iter()), "{name} changes after printing and reloading");
    }
}

#[test]
fn nat_has_its_six_rules() {
    let nat = &ws().lang("nat").unwrap().lang;
    let names: Vec<&str> = nat.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["nat", "z", "s", "plus", "plus-z", "plus-s"]);
}

#[test]
fn every_pass_discharges_with_the_expected_manual_count() {
    common::big_stack(|| {
        for &(pass, manual) in PASSES {
            let r = ws().discharge(pass, &DischargeOptions::default()).unwrap();
            assert!(r.is_clean(), "{pass}: open {:?}", r.open().iter().map(|e| e.obligation.source_rule.to_string()).collect::<Vec<_>>());
            assert_eq!(r.manual().len(), manual, "{pass}");
        }
    })
}

#[test]
fn shipped_proofs_match_the_generator() {
    common::big_stack(|| {
        let generated = generate_proofs(ws(), "cc_rec", &RewriteConfig::default()).unwrap();
        let shipped = fs::read_to_string(corpus::corpus_dir().join("cc.gatpf")).unwrap();
        let body: String = shipped.lines().filter(|l| !l.starts_with(';')).map(|l| format!("{l}\n")).collect();
        assert_eq!(body.trim(), generated.trim());
    })
}

#[test]
fn fixtures_load_beside_the_corpus() {
    let mut fx = Workspace::new();
    for f in ["broken", "collapse"] {
        fx.load_file(&corpus::fixture_path(f)).unwrap();
    }
    assert!(fx.compiler("cps_bool_broken").is_ok());
    assert!(fx.compiler("collapse").is_ok());
}
