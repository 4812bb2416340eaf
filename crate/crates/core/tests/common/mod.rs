#![allow(dead_code)]

pub mod proofs;
pub mod stlc;

use std::sync::OnceLock;

use gatforge::corpus;
use gatforge::kernel::{Sort, Term};
use gatforge::workspace::Workspace;
use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn ws() -> &'static Workspace {
    static WS: OnceLock<Workspace> = OnceLock::new();
    WS.get_or_init(|| corpus::load().expect("corpus loads"))
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A closed program of `lang` from surface text at the given surface sort.
pub fn closed(lang: &str, text: &str, sort: &str) -> (Term, Sort) {
    corpus::closed_term(ws(), lang, text, Some(sort)).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Runs `f` on a thread with a large stack; rewriting recurses deeply.
pub fn big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| std::thread::Builder::new().stack_size(512 << 20).spawn_scoped(s, f).unwrap().join().unwrap())
}
