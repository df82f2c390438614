//! Gödel's system T: a parser and type checker, an evaluator, the
//! set-theoretic model, and exhaustive search over ℕ∞ together with
//! Kreisel's counter-example to full abstraction of that model.

pub mod denot;
pub mod eval;
pub mod frontend;
pub mod fuzz;
pub mod ninf;
pub mod stdlib;

pub use frontend::{parse, parse_term, pretty, typecheck, SourceFile, Term, Type};
