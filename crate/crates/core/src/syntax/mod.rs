//! Text formats: s-expressions, language/compiler declarations, and proof
//! trees.

mod ast;
mod print;
mod proof;
mod sexp;

pub use ast::*;
pub use print::{print_compiler, print_decl, print_lang, print_rule, print_source};
pub use proof::{parse_proof, parse_proof_text, parse_sort_proof, parse_term, print_proof};
pub use sexp::{parse_sexps, Pos, Sexp, SyntaxError};
