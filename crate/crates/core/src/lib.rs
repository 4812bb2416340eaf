//! Languages as generalized algebraic theories: well-formedness checking,
//! equational proofs, rewriting with certificates, compilers with checked
//! preservation obligations, and language metaprogramming.

pub mod corpus;
pub mod elaborator;
pub mod kernel;
pub mod metagen;
pub mod proofkit;
pub mod report;
pub mod rewrite;
pub mod syntax;
pub mod translate;
pub mod workspace;
