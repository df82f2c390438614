//! Type checking. Types are syntax-directed, so checking is inference.

use thiserror::Error;

use super::pretty::pretty_open;
use super::syntax::{Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("type mismatch: expected {expected}, found {found} in `{location}`")]
    Mismatch {
        expected: Type,
        found: Type,
        location: String,
    },
    #[error("non-function applied: `{location}` has type {found}")]
    NotAFunction { found: Type, location: String },
    #[error("unbound variable index {index}")]
    Unbound { index: usize },
}

/// Infer the type of `term` under `context`.
///
/// The last element of `context` is the innermost binder, i.e. `Var(0)`.
pub fn typecheck(term: &Term, context: &[Type]) -> Result<Type, TypeError> {
    let mut ctx = context.to_vec();
    infer(term, &mut ctx)
}

fn infer(term: &Term, ctx: &mut Vec<Type>) -> Result<Type, TypeError> {
    match term {
        Term::Var(i) => ctx
            .len()
            .checked_sub(i + 1)
            .map(|pos| ctx[pos].clone())
            .ok_or(TypeError::Unbound { index: *i }),
        Term::Zero => Ok(Type::Nat),
        Term::True | Term::False => Ok(Type::Bool),
        Term::Succ(arg) => {
            expect(arg, Type::Nat, ctx)?;
            Ok(Type::Nat)
        }
        Term::Lam(ty, body) => {
            ctx.push(ty.clone());
            let body_ty = infer(body, ctx);
            ctx.pop();
            Ok(Type::arrow(ty.clone(), body_ty?))
        }
        Term::App(fun, arg) => match infer(fun, ctx)? {
            Type::Arrow(dom, cod) => {
                expect(arg, *dom, ctx)?;
                Ok(*cod)
            }
            other => Err(TypeError::NotAFunction {
                found: other,
                location: pretty_open(fun, ctx.len()),
            }),
        },
        Term::If(cond, then_branch, else_branch) => {
            expect(cond, Type::Bool, ctx)?;
            let ty = infer(then_branch, ctx)?;
            expect(else_branch, ty.clone(), ctx)?;
            Ok(ty)
        }
        Term::Rec(zero_case, step_case, scrutinee) => {
            let ty = infer(zero_case, ctx)?;
            let step_ty = Type::arrow(Type::Nat, Type::arrow(ty.clone(), ty.clone()));
            expect(step_case, step_ty, ctx)?;
            expect(scrutinee, Type::Nat, ctx)?;
            Ok(ty)
        }
    }
}

fn expect(term: &Term, expected: Type, ctx: &mut Vec<Type>) -> Result<(), TypeError> {
    let found = infer(term, ctx)?;
    if found == expected {
        Ok(())
    } else {
        Err(TypeError::Mismatch {
            expected,
            found,
            location: pretty_open(term, ctx.len()),
        })
    }
}
