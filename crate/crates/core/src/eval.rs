//! Call-by-value environment machine for closed terms.

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::frontend::{Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("step budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    /// Only reachable on ill-typed input.
    #[error("internal error: {0}")]
    Stuck(String),
}

/// A value of the machine. Ground results are never closures.
#[derive(Clone)]
pub enum MachineValue<'t> {
    Nat(u64),
    Bool(bool),
    Closure {
        env: Env<'t>,
        annotation: &'t Type,
        body: &'t Term,
    },
}

impl fmt::Debug for MachineValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineValue::Nat(n) => write!(f, "Nat({})", n),
            MachineValue::Bool(b) => write!(f, "Bool({})", b),
            MachineValue::Closure { annotation, .. } => write!(f, "<closure : {} -> ..>", annotation),
        }
    }
}

impl fmt::Display for MachineValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineValue::Nat(n) => write!(f, "{}", n),
            MachineValue::Bool(b) => write!(f, "{}", b),
            MachineValue::Closure { .. } => write!(f, "<function>"),
        }
    }
}

impl MachineValue<'_> {
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            MachineValue::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            MachineValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

/// Persistent environment, innermost binding first.
#[derive(Clone, Default)]
pub struct Env<'t>(Option<Rc<EnvNode<'t>>>);

struct EnvNode<'t> {
    value: MachineValue<'t>,
    next: Env<'t>,
}

impl<'t> Env<'t> {
    fn push(&self, value: MachineValue<'t>) -> Env<'t> {
        Env(Some(Rc::new(EnvNode {
            value,
            next: self.clone(),
        })))
    }

    fn lookup(&self, index: usize) -> Option<&MachineValue<'t>> {
        let mut node = self.0.as_ref()?;
        for _ in 0..index {
            node = node.next.0.as_ref()?;
        }
        Some(&node.value)
    }
}

/// Evaluator with an optional step budget.
#[derive(Debug, Clone, Default)]
pub struct Machine {
    budget: Option<u64>,
    steps: u64,
}

impl Machine {
    pub fn new() -> Self {
        Machine::default()
    }

    pub fn with_budget(budget: u64) -> Self {
        Machine {
            budget: Some(budget),
            steps: 0,
        }
    }

    /// Steps taken so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn eval_closed<'t>(&mut self, term: &'t Term) -> Result<MachineValue<'t>, EvalError> {
        self.eval(term, &Env::default())
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        match self.budget {
            Some(budget) if self.steps > budget => Err(EvalError::BudgetExceeded { budget }),
            _ => Ok(()),
        }
    }

    fn eval<'t>(&mut self, term: &'t Term, env: &Env<'t>) -> Result<MachineValue<'t>, EvalError> {
        self.tick()?;
        match term {
            Term::Var(i) => env
                .lookup(*i)
                .cloned()
                .ok_or_else(|| EvalError::Stuck(format!("unbound variable {}", i))),
            Term::Zero => Ok(MachineValue::Nat(0)),
            Term::True => Ok(MachineValue::Bool(true)),
            Term::False => Ok(MachineValue::Bool(false)),
            Term::Succ(arg) => match self.eval(arg, env)? {
                MachineValue::Nat(n) => Ok(MachineValue::Nat(n + 1)),
                other => Err(EvalError::Stuck(format!("succ of {:?}", other))),
            },
            Term::Lam(annotation, body) => Ok(MachineValue::Closure {
                env: env.clone(),
                annotation,
                body,
            }),
            Term::App(fun, arg) => {
                let f = self.eval(fun, env)?;
                let a = self.eval(arg, env)?;
                self.apply(f, a)
            }
            Term::If(c, t, e) => match self.eval(c, env)? {
                MachineValue::Bool(true) => self.eval(t, env),
                MachineValue::Bool(false) => self.eval(e, env),
                other => Err(EvalError::Stuck(format!("if on {:?}", other))),
            },
            Term::Rec(z, s, n) => {
                let mut acc = self.eval(z, env)?;
                let step = self.eval(s, env)?;
                let n = match self.eval(n, env)? {
                    MachineValue::Nat(n) => n,
                    other => return Err(EvalError::Stuck(format!("rec on {:?}", other))),
                };
                for k in 0..n {
                    self.tick()?;
                    let partial = self.apply(step.clone(), MachineValue::Nat(k))?;
                    acc = self.apply(partial, acc)?;
                }
                Ok(acc)
            }
        }
    }

    fn apply<'t>(
        &mut self,
        fun: MachineValue<'t>,
        arg: MachineValue<'t>,
    ) -> Result<MachineValue<'t>, EvalError> {
        match fun {
            MachineValue::Closure { env, body, .. } => self.eval(body, &env.push(arg)),
            other => Err(EvalError::Stuck(format!("applied {:?}", other))),
        }
    }
}

/// Evaluate a closed, well-typed term with no step budget.
pub fn eval_closed(term: &Term) -> Result<MachineValue<'_>, EvalError> {
    Machine::new().eval_closed(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_term;

    fn run(src: &str) -> MachineValue<'static> {
        let t: &'static Term = Box::leak(Box::new(parse_term(src).unwrap()));
        eval_closed(t).unwrap()
    }

    #[test]
    fn rec_identity_on_naturals() {
        let v = run("rec 0 (fun k : nat . fun r : nat . succ r) 3");
        assert_eq!(v.as_nat(), Some(3));
    }

    #[test]
    fn conditional() {
        assert_eq!(run("if true then 0 else succ 0").as_nat(), Some(0));
        assert_eq!(run("if false then 0 else succ 0").as_nat(), Some(1));
    }

    #[test]
    fn addition_matches_host() {
        let add = "fun m : nat . fun n : nat . rec m (fun k : nat . fun r : nat . succ r) n";
        for m in 0..=12u64 {
            for n in 0..=12u64 {
                let v = run(&format!("({}) {} {}", add, m, n));
                assert_eq!(v.as_nat(), Some(m + n), "{} + {}", m, n);
            }
        }
    }

    #[test]
    fn step_receives_index() {
        // sum of 0..4
        let v = run("rec 0 (fun k : nat . fun r : nat . rec r (fun j : nat . fun s : nat . succ s) k) 4");
        assert_eq!(v.as_nat(), Some(6));
    }

    #[test]
    fn higher_type_result_is_closure() {
        let v = run("rec (fun x : nat . x) (fun k : nat . fun r : nat -> nat . r) 2");
        assert!(matches!(v, MachineValue::Closure { .. }));
    }

    #[test]
    fn budget_aborts() {
        let t = parse_term("rec 0 (fun k : nat . fun r : nat . succ r) 100").unwrap();
        let err = Machine::with_budget(50).eval_closed(&t).unwrap_err();
        assert_eq!(err, EvalError::BudgetExceeded { budget: 50 });
        let mut m = Machine::with_budget(10_000);
        assert_eq!(m.eval_closed(&t).unwrap().as_nat(), Some(100));
        assert!(m.steps() > 100);
    }
}
