//! Closed library terms, built programmatically.
//!
//! The same definitions ship as surface syntax in `prelude.t`; both routes
//! must produce identical core terms.

use crate::frontend::{parse, typecheck, ParseError, Term, Type, TypeError};

/// Surface-syntax copy of the prelude.
pub const PRELUDE_SOURCE: &str = include_str!("../prelude.t");

fn lam(ty: Type, body: Term) -> Term {
    Term::lam(ty, body)
}

fn v(i: usize) -> Term {
    Term::var(i)
}

fn app(f: Term, a: Term) -> Term {
    Term::app(f, a)
}

fn app2(f: Term, a: Term, b: Term) -> Term {
    Term::apps(f, [a, b])
}

fn nat2(ty: Type) -> Type {
    Type::arrow(Type::Nat, Type::arrow(ty.clone(), ty))
}

fn bool_binop(body: Term) -> Term {
    lam(Type::Bool, lam(Type::Bool, body))
}

fn nat_binop(body: Term) -> Term {
    lam(Type::Nat, lam(Type::Nat, body))
}

pub fn tm_not() -> Term {
    lam(Type::Bool, Term::ite(v(0), Term::False, Term::True))
}

pub fn tm_and() -> Term {
    bool_binop(Term::ite(v(1), v(0), Term::False))
}

pub fn tm_or() -> Term {
    bool_binop(Term::ite(v(1), Term::True, v(0)))
}

pub fn tm_implies() -> Term {
    bool_binop(Term::ite(v(1), v(0), Term::True))
}

pub fn tm_eq_bool() -> Term {
    bool_binop(Term::ite(v(1), v(0), app(tm_not(), v(0))))
}

pub fn tm_pred() -> Term {
    lam(
        Type::Nat,
        Term::rec(Term::Zero, lam(Type::Nat, lam(Type::Nat, v(1))), v(0)),
    )
}

pub fn tm_iszero() -> Term {
    lam(
        Type::Nat,
        Term::rec(Term::True, lam(Type::Nat, lam(Type::Bool, Term::False)), v(0)),
    )
}

/// Truncated subtraction.
pub fn tm_monus() -> Term {
    nat_binop(Term::rec(
        v(1),
        lam(Type::Nat, lam(Type::Nat, app(tm_pred(), v(0)))),
        v(0),
    ))
}

pub fn tm_leq() -> Term {
    nat_binop(app(tm_iszero(), app2(tm_monus(), v(1), v(0))))
}

pub fn tm_add() -> Term {
    nat_binop(Term::rec(
        v(1),
        lam(Type::Nat, lam(Type::Nat, Term::succ(v(0)))),
        v(0),
    ))
}

pub fn tm_mult() -> Term {
    nat_binop(Term::rec(
        Term::Zero,
        lam(Type::Nat, lam(Type::Nat, app2(tm_add(), v(0), v(3)))),
        v(0),
    ))
}

/// `(q, i) ↦ ∃ n ≤ i. q n`.
pub fn tm_bexists() -> Term {
    let search = lam(
        nat2(Type::Bool),
        lam(Type::Nat, Term::rec(app(v(2), Term::Zero), v(1), v(0))),
    );
    let step = lam(
        Type::Nat,
        lam(
            Type::Bool,
            app2(tm_or(), v(0), app(v(2), Term::succ(v(1)))),
        ),
    );
    lam(Type::stream(), app(search, step))
}

/// `n ↦ 0^n 1^ω`.
pub fn tm_nbar() -> Term {
    nat_binop(app2(tm_leq(), v(1), v(0)))
}

/// `0^ω`.
pub fn tm_infty() -> Term {
    lam(Type::Nat, Term::False)
}

/// `1^ω`, the point `0̄`.
pub fn tm_zerobar() -> Term {
    lam(Type::Nat, Term::True)
}

/// `α ↦ 0α`.
pub fn tm_cons() -> Term {
    lam(
        Type::stream(),
        lam(
            Type::Nat,
            Term::ite(
                app(tm_iszero(), v(0)),
                Term::False,
                app(v(1), app(tm_pred(), v(0))),
            ),
        ),
    )
}

/// The selection function of ℕ∞: `ε(p)(i) = 1` iff `p(n̄)` for some `n ≤ i`.
pub fn tm_eps() -> Term {
    lam(
        Type::predicate(),
        app(tm_bexists(), lam(Type::Nat, app(v(1), app(tm_nbar(), v(0))))),
    )
}

/// `f ↦ (f(ε(λx. f(x+1) = f(∞))) = f(∞)) ⟹ (f(0̄) = f(∞))`.
pub fn tm_test() -> Term {
    let f = || v(0);
    let f_inf = || app(f(), tm_infty());
    let inner = lam(
        Type::stream(),
        app2(
            tm_eq_bool(),
            app(v(1), app(tm_cons(), v(0))),
            app(v(1), tm_infty()),
        ),
    );
    let antecedent = app2(tm_eq_bool(), app(f(), app(tm_eps(), inner)), f_inf());
    let consequent = app2(tm_eq_bool(), app(f(), tm_zerobar()), f_inf());
    lam(Type::predicate(), app2(tm_implies(), antecedent, consequent))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreludeEntry {
    pub name: &'static str,
    pub term: Term,
    pub ty: Type,
}

/// The library, in dependency order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prelude {
    entries: Vec<PreludeEntry>,
}

impl Prelude {
    pub fn new() -> Self {
        let b2 = Type::arrow(Type::Bool, Type::arrow(Type::Bool, Type::Bool));
        let n2 = |r: Type| Type::arrow(Type::Nat, Type::arrow(Type::Nat, r));
        let stream = Type::stream;
        let table: Vec<(&'static str, Term, Type)> = vec![
            ("not", tm_not(), Type::arrow(Type::Bool, Type::Bool)),
            ("and", tm_and(), b2.clone()),
            ("or", tm_or(), b2.clone()),
            ("implies", tm_implies(), b2.clone()),
            ("eqBool", tm_eq_bool(), b2),
            ("pred", tm_pred(), Type::arrow(Type::Nat, Type::Nat)),
            ("iszero", tm_iszero(), stream()),
            ("monus", tm_monus(), n2(Type::Nat)),
            ("leq", tm_leq(), n2(Type::Bool)),
            ("add", tm_add(), n2(Type::Nat)),
            ("mult", tm_mult(), n2(Type::Nat)),
            (
                "bexists",
                tm_bexists(),
                Type::arrow(stream(), stream()),
            ),
            ("nbar", tm_nbar(), n2(Type::Bool)),
            ("infty", tm_infty(), stream()),
            ("zerobar", tm_zerobar(), stream()),
            ("cons", tm_cons(), Type::arrow(stream(), stream())),
            ("eps", tm_eps(), Type::arrow(Type::predicate(), stream())),
            ("test", tm_test(), Type::arrow(Type::predicate(), Type::Bool)),
        ];
        Prelude {
            entries: table
                .into_iter()
                .map(|(name, term, ty)| PreludeEntry { name, term, ty })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[PreludeEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&PreludeEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn term(&self, name: &str) -> Option<&Term> {
        self.get(name).map(|e| &e.term)
    }

    /// `(name, term)` pairs, for parsing user files with the prelude in scope.
    pub fn definitions(&self) -> Vec<(String, Term)> {
        self.entries
            .iter()
            .map(|e| (e.name.to_string(), e.term.clone()))
            .collect()
    }

    /// Check every entry is closed and has its declared type.
    pub fn verify(&self) -> Result<(), PreludeError> {
        for e in &self.entries {
            if !e.term.is_closed() {
                return Err(PreludeError::Open(e.name));
            }
            let found = typecheck(&e.term, &[]).map_err(|err| PreludeError::Type(e.name, err))?;
            if found != e.ty {
                return Err(PreludeError::Declared {
                    name: e.name,
                    declared: e.ty.clone(),
                    found,
                });
            }
        }
        Ok(())
    }
}

impl Default for Prelude {
    fn default() -> Self {
        Prelude::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PreludeError {
    #[error("`{0}` is not closed")]
    Open(&'static str),
    #[error("`{0}` is ill-typed: {1}")]
    Type(&'static str, TypeError),
    #[error("`{name}` declared {declared} but has type {found}")]
    Declared {
        name: &'static str,
        declared: Type,
        found: Type,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Parse `prelude.t` into `(name, term)` pairs.
pub fn parse_prelude_source() -> Result<Vec<(String, Term)>, PreludeError> {
    Ok(parse(PRELUDE_SOURCE)?.definitions)
}
