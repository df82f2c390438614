//! Concrete and abstract syntax, pretty-printing and type checking.

mod parse;
mod pretty;
mod syntax;
mod typeck;

pub use parse::{
    parse, parse_term, parse_term_with, parse_type, parse_with, ParseError, Pos, MAX_LITERAL,
};
pub use pretty::{pretty, pretty_open, pretty_with, PrettyOptions};
pub use syntax::{SourceFile, Term, Type};
pub use typeck::{typecheck, TypeError};
