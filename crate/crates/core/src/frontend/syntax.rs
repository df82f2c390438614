//! Core abstract syntax of system T.
//!
//! Variables are positional: `Var(0)` refers to the innermost enclosing
//! binder. Surface names only exist in the parser and the pretty-printer.

use std::fmt;

/// Simple types: `nat`, `bool` and function spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Nat,
    Bool,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(domain: Type, codomain: Type) -> Type {
        Type::Arrow(Box::new(domain), Box::new(codomain))
    }

    /// `nat -> bool`, the type of bit streams.
    pub fn stream() -> Type {
        Type::arrow(Type::Nat, Type::Bool)
    }

    /// `(nat -> bool) -> bool`, the type of predicates on streams.
    pub fn predicate() -> Type {
        Type::arrow(Type::stream(), Type::Bool)
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Type::Nat | Type::Bool)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Nat => write!(f, "nat"),
            Type::Bool => write!(f, "bool"),
            Type::Arrow(dom, cod) => {
                if let Type::Arrow(..) = **dom {
                    write!(f, "({}) -> {}", dom, cod)
                } else {
                    write!(f, "{} -> {}", dom, cod)
                }
            }
        }
    }
}

/// Terms of system T.
///
/// `Rec(z, s, n)` is the fully applied recursor:
/// `Rec(z, s, 0) = z` and `Rec(z, s, succ n) = s n (Rec(z, s, n))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Lam(Type, Box<Term>),
    App(Box<Term>, Box<Term>),
    Zero,
    Succ(Box<Term>),
    Rec(Box<Term>, Box<Term>, Box<Term>),
    True,
    False,
    If(Box<Term>, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(index: usize) -> Term {
        Term::Var(index)
    }

    pub fn lam(annotation: Type, body: Term) -> Term {
        Term::Lam(annotation, Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application of `fun` to every argument in turn.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn succ(arg: Term) -> Term {
        Term::Succ(Box::new(arg))
    }

    pub fn rec(zero_case: Term, step_case: Term, scrutinee: Term) -> Term {
        Term::Rec(Box::new(zero_case), Box::new(step_case), Box::new(scrutinee))
    }

    pub fn ite(cond: Term, then_branch: Term, else_branch: Term) -> Term {
        Term::If(Box::new(cond), Box::new(then_branch), Box::new(else_branch))
    }

    pub fn boolean(b: bool) -> Term {
        if b {
            Term::True
        } else {
            Term::False
        }
    }

    /// The numeral `succ^n 0`.
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::succ(t))
    }

    /// If this term is a numeral `succ^n 0`, return `n`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0;
        let mut t = self;
        loop {
            match t {
                Term::Zero => return Some(n),
                Term::Succ(inner) => {
                    n += 1;
                    t = inner;
                }
                _ => return None,
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::True | Term::False => 1,
            Term::Lam(_, body) | Term::Succ(body) => 1 + body.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Rec(a, b, c) | Term::If(a, b, c) => 1 + a.size() + b.size() + c.size(),
        }
    }

    /// True when every variable is bound within `depth` enclosing binders.
    pub fn is_closed_under(&self, depth: usize) -> bool {
        match self {
            Term::Var(i) => *i < depth,
            Term::Zero | Term::True | Term::False => true,
            Term::Lam(_, body) => body.is_closed_under(depth + 1),
            Term::Succ(t) => t.is_closed_under(depth),
            Term::App(f, a) => f.is_closed_under(depth) && a.is_closed_under(depth),
            Term::Rec(a, b, c) | Term::If(a, b, c) => {
                a.is_closed_under(depth) && b.is_closed_under(depth) && c.is_closed_under(depth)
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.is_closed_under(0)
    }

    /// Add `by` to every variable index at or above `cutoff`.
    pub fn shift(&self, by: usize, cutoff: usize) -> Term {
        match self {
            Term::Var(i) if *i >= cutoff => Term::Var(i + by),
            Term::Var(i) => Term::Var(*i),
            Term::Zero => Term::Zero,
            Term::True => Term::True,
            Term::False => Term::False,
            Term::Lam(ty, body) => Term::lam(ty.clone(), body.shift(by, cutoff + 1)),
            Term::Succ(t) => Term::succ(t.shift(by, cutoff)),
            Term::App(f, a) => Term::app(f.shift(by, cutoff), a.shift(by, cutoff)),
            Term::Rec(z, s, n) => Term::rec(
                z.shift(by, cutoff),
                s.shift(by, cutoff),
                n.shift(by, cutoff),
            ),
            Term::If(c, t, e) => Term::ite(
                c.shift(by, cutoff),
                t.shift(by, cutoff),
                e.shift(by, cutoff),
            ),
        }
    }
}

/// A parsed `.t` file: `let` definitions in order, then an optional main term.
///
/// Every definition is already elaborated to a closed core term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub definitions: Vec<(String, Term)>,
    pub main: Option<Term>,
}

impl SourceFile {
    pub fn definition(&self, name: &str) -> Option<&Term> {
        self.definitions
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals() {
        assert_eq!(Term::numeral(0), Term::Zero);
        assert_eq!(Term::numeral(2), Term::succ(Term::succ(Term::Zero)));
        assert_eq!(Term::numeral(7).as_numeral(), Some(7));
        assert_eq!(Term::succ(Term::var(0)).as_numeral(), None);
    }

    #[test]
    fn type_display_parenthesizes_domains() {
        let t = Type::arrow(Type::predicate(), Type::stream());
        assert_eq!(t.to_string(), "((nat -> bool) -> bool) -> nat -> bool");
    }

    #[test]
    fn shift_respects_binders() {
        let t = Term::lam(Type::Nat, Term::app(Term::var(0), Term::var(1)));
        assert_eq!(
            t.shift(2, 0),
            Term::lam(Type::Nat, Term::app(Term::var(0), Term::var(3)))
        );
    }
}
