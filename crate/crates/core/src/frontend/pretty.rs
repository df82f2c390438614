//! Pretty-printing core terms back to surface syntax.
//!
//! Binders are named `x<depth>`, so the output is deterministic and
//! reparses to the same core term.

use std::fmt::Write;

use super::syntax::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrettyOptions {
    /// Print `succ^n 0` as the literal `n`.
    pub numerals: bool,
}

impl Default for PrettyOptions {
    fn default() -> Self {
        PrettyOptions { numerals: true }
    }
}

pub fn pretty(term: &Term) -> String {
    pretty_with(term, PrettyOptions::default())
}

pub fn pretty_with(term: &Term, options: PrettyOptions) -> String {
    let mut out = String::new();
    Printer { options, out: &mut out }.term(term, 0);
    out
}

/// Print a term with `depth` free variables, named `x0 .. x<depth-1>`
/// from the outermost context entry inwards.
pub fn pretty_open(term: &Term, depth: usize) -> String {
    let mut out = String::new();
    Printer {
        options: PrettyOptions::default(),
        out: &mut out,
    }
    .term(term, depth);
    out
}

struct Printer<'a> {
    options: PrettyOptions,
    out: &'a mut String,
}

impl Printer<'_> {
    fn term(&mut self, term: &Term, depth: usize) {
        match term {
            Term::Lam(ty, body) => {
                let _ = write!(self.out, "fun x{} : {} . ", depth, ty);
                self.term(body, depth + 1);
            }
            Term::If(c, t, e) => {
                self.out.push_str("if ");
                self.term(c, depth);
                self.out.push_str(" then ");
                self.term(t, depth);
                self.out.push_str(" else ");
                self.term(e, depth);
            }
            Term::Succ(arg) if !self.is_literal(term) => {
                self.out.push_str("succ ");
                self.atom(arg, depth);
            }
            Term::Rec(z, s, n) => {
                self.out.push_str("rec ");
                self.atom(z, depth);
                self.out.push(' ');
                self.atom(s, depth);
                self.out.push(' ');
                self.atom(n, depth);
            }
            Term::App(fun, arg) => {
                match **fun {
                    Term::App(..) => self.term(fun, depth),
                    _ => self.atom(fun, depth),
                }
                self.out.push(' ');
                self.atom(arg, depth);
            }
            _ => self.atom(term, depth),
        }
    }

    fn atom(&mut self, term: &Term, depth: usize) {
        match term {
            Term::Var(i) => match depth.checked_sub(i + 1) {
                Some(level) => {
                    let _ = write!(self.out, "x{}", level);
                }
                None => {
                    let _ = write!(self.out, "free{}", i - depth);
                }
            },
            Term::Zero => self.out.push('0'),
            Term::True => self.out.push_str("true"),
            Term::False => self.out.push_str("false"),
            _ if self.is_literal(term) => {
                let _ = write!(self.out, "{}", term.as_numeral().unwrap_or(0));
            }
            _ => {
                self.out.push('(');
                self.term(term, depth);
                self.out.push(')');
            }
        }
    }

    fn is_literal(&self, term: &Term) -> bool {
        self.options.numerals && term.as_numeral().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::syntax::Type;

    #[test]
    fn identity() {
        assert_eq!(pretty(&Term::lam(Type::Nat, Term::var(0))), "fun x0 : nat . x0");
    }

    #[test]
    fn numerals_on_and_off() {
        let two = Term::numeral(2);
        assert_eq!(pretty(&two), "2");
        assert_eq!(
            pretty_with(&two, PrettyOptions { numerals: false }),
            "succ (succ 0)"
        );
    }

    #[test]
    fn application_arguments_are_parenthesized() {
        let t = Term::lam(
            Type::stream(),
            Term::app(Term::var(0), Term::succ(Term::app(Term::var(0), Term::Zero))),
        );
        // ill-typed, but the printer does not care
        assert_eq!(pretty(&t), "fun x0 : nat -> bool . x0 (succ (x0 0))");
    }

    #[test]
    fn left_nested_application_chain() {
        let t = Term::apps(Term::lam(Type::Nat, Term::lam(Type::Nat, Term::var(1))), [
            Term::numeral(1),
            Term::numeral(2),
        ]);
        assert_eq!(pretty(&t), "(fun x0 : nat . fun x1 : nat . x0) 1 2");
    }
}
