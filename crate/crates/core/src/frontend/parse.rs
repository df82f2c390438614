//! Lexer and parser for the surface syntax.
//!
//! ```text
//! type     ::= "nat" | "bool" | type "->" type | "(" type ")"
//! atom     ::= NUMLIT | "true" | "false" | IDENT | "(" term ")"
//! term     ::= "fun" IDENT ":" type "." term
//!            | "if" term "then" term "else" term
//!            | "succ" atom | "rec" atom atom atom | atom atom*
//! file     ::= ("let" IDENT "=" term ";")* term?
//! ```
//!
//! Names are resolved while parsing. Local binders become positional
//! variables and `let` references are replaced by the closed term they name.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::syntax::{SourceFile, Term, Type};
use super::typeck::typecheck;

/// Largest numeric literal accepted; literals expand to `succ` chains.
pub const MAX_LITERAL: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: lex error: {message}")]
    Lex { pos: Pos, message: String },
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unbound identifier `{name}`")]
    Unbound { pos: Pos, name: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Lex { pos, .. }
            | ParseError::Syntax { pos, .. }
            | ParseError::Unbound { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Fun,
    If,
    Then,
    Else,
    Succ,
    Rec,
    True,
    False,
    Let,
    Nat,
    Bool,
    Arrow,
    Colon,
    Dot,
    Equals,
    Semi,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{}`", name),
            Tok::Num(n) => return write!(f, "literal `{}`", n),
            Tok::Fun => "`fun`",
            Tok::If => "`if`",
            Tok::Then => "`then`",
            Tok::Else => "`else`",
            Tok::Succ => "`succ`",
            Tok::Rec => "`rec`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Let => "`let`",
            Tok::Nat => "`nat`",
            Tok::Bool => "`bool`",
            Tok::Arrow => "`->`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::Equals => "`=`",
            Tok::Semi => "`;`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };

        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '-' {
            bump(&mut chars);
            match chars.peek() {
                Some('-') => {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump(&mut chars);
                    }
                }
                Some('>') => {
                    bump(&mut chars);
                    tokens.push((Tok::Arrow, pos));
                }
                _ => {
                    return Err(ParseError::Lex {
                        pos,
                        message: "expected `->` or `--`".into(),
                    })
                }
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(d);
                bump(&mut chars);
            }
            let n = digits
                .parse::<u64>()
                .ok()
                .filter(|n| *n <= MAX_LITERAL)
                .ok_or_else(|| ParseError::Lex {
                    pos,
                    message: format!("numeric literal `{}` exceeds {}", digits, MAX_LITERAL),
                })?;
            tokens.push((Tok::Num(n), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_' || d == '\'') {
                    break;
                }
                word.push(d);
                bump(&mut chars);
            }
            let tok = match word.as_str() {
                "fun" => Tok::Fun,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "succ" => Tok::Succ,
                "rec" => Tok::Rec,
                "true" => Tok::True,
                "false" => Tok::False,
                "let" => Tok::Let,
                "nat" => Tok::Nat,
                "bool" => Tok::Bool,
                _ => Tok::Ident(word),
            };
            tokens.push((tok, pos));
            continue;
        }
        let tok = match c {
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '=' => Tok::Equals,
            ';' => Tok::Semi,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ParseError::Lex {
                    pos,
                    message: format!("unexpected character `{}`", c),
                })
            }
        };
        bump(&mut chars);
        tokens.push((tok, pos));
    }
    tokens.push((Tok::Eof, Pos { line, col }));
    Ok(tokens)
}

struct Parser<'g> {
    tokens: Vec<(Tok, Pos)>,
    cursor: usize,
    /// Local binders, innermost last.
    locals: Vec<(String, Type)>,
    /// Definitions visible by name, latest last.
    globals: Vec<(String, Term)>,
    predefined: &'g [(String, Term)],
}

type PResult<T> = Result<T, ParseError>;

impl<'g> Parser<'g> {
    fn new(text: &str, predefined: &'g [(String, Term)]) -> PResult<Self> {
        Ok(Parser {
            tokens: lex(text)?,
            cursor: 0,
            locals: Vec::new(),
            globals: Vec::new(),
            predefined,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.cursor].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.cursor].1
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.cursor].0.clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok, self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            other => self.error(format!("expected identifier, found {}", other)),
        }
    }

    fn file(&mut self) -> PResult<SourceFile> {
        let mut file = SourceFile::default();
        let mut seen = HashSet::new();
        while *self.peek() == Tok::Let {
            self.advance();
            let pos = self.pos();
            let name = self.ident()?;
            if !seen.insert(name.clone()) {
                return Err(ParseError::Syntax {
                    pos,
                    message: format!("duplicate definition `{}`", name),
                });
            }
            self.expect(Tok::Equals)?;
            let body = self.term()?;
            self.expect(Tok::Semi)?;
            self.globals.push((name.clone(), body.clone()));
            file.definitions.push((name, body));
        }
        if *self.peek() != Tok::Eof {
            file.main = Some(self.term()?);
        }
        if *self.peek() != Tok::Eof {
            return self.error(format!("expected end of input, found {}", self.peek()));
        }
        Ok(file)
    }

    fn ty(&mut self) -> PResult<Type> {
        let domain = match self.advance() {
            Tok::Nat => Type::Nat,
            Tok::Bool => Type::Bool,
            Tok::LParen => {
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            other => {
                self.cursor -= 1;
                return self.error(format!("expected a type, found {}", other));
            }
        };
        if *self.peek() == Tok::Arrow {
            self.advance();
            Ok(Type::arrow(domain, self.ty()?))
        } else {
            Ok(domain)
        }
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Fun => {
                self.advance();
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Dot)?;
                self.locals.push((name, ty.clone()));
                let body = self.term();
                self.locals.pop();
                Ok(Term::lam(ty, body?))
            }
            Tok::If => {
                self.advance();
                let c = self.term()?;
                self.expect(Tok::Then)?;
                let t = self.term()?;
                self.expect(Tok::Else)?;
                let e = self.term()?;
                Ok(Term::ite(c, t, e))
            }
            Tok::Succ => {
                self.advance();
                Ok(Term::succ(self.atom()?))
            }
            Tok::Rec => self.rec(),
            _ => {
                let mut t = self.atom()?;
                while self.at_atom() {
                    t = Term::app(t, self.atom()?);
                }
                Ok(t)
            }
        }
    }

    /// `rec` with up to three atoms. Missing trailing arguments are
    /// eta-expanded; the result type is read off the zero case.
    fn rec(&mut self) -> PResult<Term> {
        let pos = self.pos();
        self.advance();
        let mut args = Vec::new();
        while args.len() < 3 && self.at_atom() {
            args.push(self.atom()?);
        }
        if args.len() == 3 {
            let n = args.pop().unwrap_or(Term::Zero);
            let s = args.pop().unwrap_or(Term::Zero);
            let z = args.pop().unwrap_or(Term::Zero);
            return Ok(Term::rec(z, s, n));
        }
        let Some(z) = args.first() else {
            return Err(ParseError::Syntax {
                pos,
                message: "`rec` needs at least its zero case to fix the result type".into(),
            });
        };
        let context: Vec<Type> = self.locals.iter().map(|(_, t)| t.clone()).collect();
        let result = typecheck(z, &context).map_err(|e| ParseError::Syntax {
            pos,
            message: format!("cannot type the zero case of a partial `rec`: {}", e),
        })?;
        let step_ty = Type::arrow(Type::Nat, Type::arrow(result.clone(), result));
        let missing = 3 - args.len();
        let mut shifted: Vec<Term> = args.iter().map(|a| a.shift(missing, 0)).collect();
        let term = match shifted.len() {
            1 => Term::lam(
                step_ty,
                Term::lam(
                    Type::Nat,
                    Term::rec(shifted.remove(0), Term::var(1), Term::var(0)),
                ),
            ),
            _ => {
                let s = shifted.remove(1);
                let z = shifted.remove(0);
                Term::lam(Type::Nat, Term::rec(z, s, Term::var(0)))
            }
        };
        Ok(term)
    }

    fn at_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Num(_) | Tok::True | Tok::False | Tok::Ident(_) | Tok::LParen
        )
    }

    fn atom(&mut self) -> PResult<Term> {
        let pos = self.pos();
        match self.advance() {
            Tok::Num(n) => Ok(Term::numeral(n)),
            Tok::True => Ok(Term::True),
            Tok::False => Ok(Term::False),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) => self.resolve(&name, pos),
            other => {
                self.cursor -= 1;
                self.error(format!("expected a term, found {}", other))
            }
        }
    }

    fn resolve(&self, name: &str, pos: Pos) -> PResult<Term> {
        if let Some(i) = self.locals.iter().rev().position(|(n, _)| n == name) {
            return Ok(Term::var(i));
        }
        self.globals
            .iter()
            .rev()
            .chain(self.predefined.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| ParseError::Unbound {
                pos,
                name: name.to_string(),
            })
    }
}

/// Parse a whole `.t` file with no names in scope beforehand.
pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
    parse_with(text, &[])
}

/// Parse a file with `predefined` names in scope. The file's own
/// definitions shadow them.
pub fn parse_with(text: &str, predefined: &[(String, Term)]) -> Result<SourceFile, ParseError> {
    Parser::new(text, predefined)?.file()
}

/// Parse a single term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_with(text, &[])
}

pub fn parse_term_with(text: &str, predefined: &[(String, Term)]) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, predefined)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("expected end of input, found {}", p.peek()));
    }
    Ok(t)
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text, &[])?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("expected end of input, found {}", p.peek()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        assert_eq!(
            parse_term("fun x : nat . x"),
            Ok(Term::lam(Type::Nat, Term::var(0)))
        );
    }

    #[test]
    fn succ_zero() {
        assert_eq!(parse_term("succ 0"), Ok(Term::succ(Term::Zero)));
        assert_eq!(parse_term("3"), Ok(Term::numeral(3)));
    }

    #[test]
    fn arrows_associate_right() {
        assert_eq!(
            parse_type("nat -> bool -> nat"),
            Ok(Type::arrow(Type::Nat, Type::arrow(Type::Bool, Type::Nat)))
        );
        assert_eq!(
            parse_type("(nat -> bool) -> bool"),
            Ok(Type::predicate())
        );
    }

    #[test]
    fn application_associates_left() {
        let t = parse_term("fun f : nat -> nat -> nat . f 1 2").unwrap();
        assert_eq!(
            t,
            Term::lam(
                Type::arrow(Type::Nat, Type::arrow(Type::Nat, Type::Nat)),
                Term::apps(Term::var(0), [Term::numeral(1), Term::numeral(2)])
            )
        );
    }

    #[test]
    fn shadowing_picks_innermost() {
        let t = parse_term("fun x : nat . fun x : bool . x").unwrap();
        assert_eq!(t, Term::lam(Type::Nat, Term::lam(Type::Bool, Term::var(0))));
    }

    #[test]
    fn lets_expand_to_closed_terms() {
        let f = parse("let id = fun x : nat . x;\nlet two = id 2;\ntwo").unwrap();
        let id = Term::lam(Type::Nat, Term::var(0));
        assert_eq!(f.definitions.len(), 2);
        assert_eq!(f.main, Some(Term::app(id, Term::numeral(2))));
    }

    #[test]
    fn comments_are_skipped() {
        let f = parse("-- a comment\nlet z = 0; -- trailing\n").unwrap();
        assert_eq!(f.definitions, vec![("z".to_string(), Term::Zero)]);
        assert_eq!(f.main, None);
    }

    #[test]
    fn partial_rec_is_eta_expanded() {
        let t = parse_term("rec 0").unwrap();
        let step = Type::arrow(Type::Nat, Type::arrow(Type::Nat, Type::Nat));
        assert_eq!(
            t,
            Term::lam(
                step.clone(),
                Term::lam(Type::Nat, Term::rec(Term::Zero, Term::var(1), Term::var(0)))
            )
        );
        assert_eq!(
            typecheck(&t, &[]),
            Ok(Type::arrow(step, Type::arrow(Type::Nat, Type::Nat)))
        );

        let t = parse_term("fun b : bool . rec b (fun k : nat . fun r : bool . r)").unwrap();
        assert_eq!(
            typecheck(&t, &[]),
            Ok(Type::arrow(Type::Bool, Type::arrow(Type::Nat, Type::Bool)))
        );
    }

    #[test]
    fn bare_rec_is_rejected() {
        assert!(matches!(parse_term("rec"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_term("fun x : nat .\n  y"),
            Err(ParseError::Unbound {
                pos: Pos { line: 2, col: 3 },
                name: "y".into()
            })
        );
        assert_eq!(parse_term("0 # 1").unwrap_err().pos(), Pos { line: 1, col: 3 });
        assert!(matches!(
            parse_term("fun x nat . x"),
            Err(ParseError::Syntax { pos: Pos { line: 1, col: 7 }, .. })
        ));
        assert!(matches!(parse_term("99999999"), Err(ParseError::Lex { .. })));
    }

    #[test]
    fn duplicate_definitions_are_rejected() {
        assert!(parse("let a = 0; let a = 1;").is_err());
    }

    #[test]
    fn predefined_names_are_visible_and_shadowable() {
        let pre = vec![("one".to_string(), Term::numeral(1))];
        assert_eq!(parse_term_with("succ one", &pre), Ok(Term::numeral(2)));
        let f = parse_with("let one = true; one", &pre).unwrap();
        assert_eq!(f.main, Some(Term::True));
    }
}
