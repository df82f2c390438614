//! The set-theoretic model.
//!
//! Terms denote host values: naturals, booleans, and total host functions.
//! A definable functional can therefore be applied to any host function of
//! the right shape, including ones no term defines.
//!
//! Semantic values are reference counted and memoize internally, so they are
//! neither `Send` nor `Sync`. Every value, and every [`BitStream`], stays on
//! the thread that created it; parallel workers denote their own copies of
//! the terms they need.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::frontend::{Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenotError {
    #[error("cannot apply a non-function ({0})")]
    NotAFunction(&'static str),
    #[error("stream bit {index} is not a boolean ({found})")]
    NotABit { index: u64, found: &'static str },
    /// Ill-typed input reached the interpreter.
    #[error("internal error: {0}")]
    Shape(String),
}

/// A value of the set-theoretic model.
///
/// Function values are opaque: there is no equality at function types.
#[derive(Clone)]
pub enum SemVal {
    Nat(u64),
    Bool(bool),
    Fun(SemFun),
}

impl SemVal {
    pub fn kind(&self) -> &'static str {
        match self {
            SemVal::Nat(_) => "nat",
            SemVal::Bool(_) => "bool",
            SemVal::Fun(_) => "function",
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            SemVal::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            SemVal::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_fun(&self) -> Option<&SemFun> {
        match self {
            SemVal::Fun(f) => Some(f),
            _ => None,
        }
    }

    fn ground(&self) -> Option<Ground> {
        match self {
            SemVal::Nat(n) => Some(Ground::Nat(*n)),
            SemVal::Bool(b) => Some(Ground::Bool(*b)),
            SemVal::Fun(_) => None,
        }
    }
}

impl fmt::Debug for SemVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemVal::Nat(n) => write!(f, "SNat({})", n),
            SemVal::Bool(b) => write!(f, "SBool({})", u8::from(*b)),
            SemVal::Fun(_) => write!(f, "SFun(<function>)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Ground {
    Nat(u64),
    Bool(bool),
}

type HostFn = dyn Fn(SemVal) -> Result<SemVal, DenotError>;

/// A total host function between semantic values.
#[derive(Clone)]
pub struct SemFun(Rc<FunInner>);

struct FunInner {
    apply: Box<HostFn>,
    /// Results by natural-number argument, for functions out of `nat`.
    by_nat: Option<RefCell<HashMap<u64, SemVal>>>,
    /// Iterates `rec z self k` for ground `z`, when used as a recursion step.
    iterates: RefCell<HashMap<Ground, Vec<SemVal>>>,
}

impl SemFun {
    pub fn new(f: impl Fn(SemVal) -> Result<SemVal, DenotError> + 'static) -> Self {
        SemFun::build(Box::new(f), false)
    }

    /// A function out of `nat` that caches its result per argument.
    pub fn memoized(f: impl Fn(SemVal) -> Result<SemVal, DenotError> + 'static) -> Self {
        SemFun::build(Box::new(f), true)
    }

    fn build(apply: Box<HostFn>, memo: bool) -> Self {
        SemFun(Rc::new(FunInner {
            apply,
            by_nat: memo.then(|| RefCell::new(HashMap::new())),
            iterates: RefCell::new(HashMap::new()),
        }))
    }

    pub fn call(&self, arg: SemVal) -> Result<SemVal, DenotError> {
        let _depth = DepthGuard::enter();
        match (&self.0.by_nat, &arg) {
            (Some(memo), SemVal::Nat(n)) => {
                let n = *n;
                if let Some(v) = memo.borrow().get(&n) {
                    return Ok(v.clone());
                }
                let v = (self.0.apply)(arg)?;
                memo.borrow_mut().insert(n, v.clone());
                Ok(v)
            }
            _ => (self.0.apply)(arg),
        }
    }

    /// `rec zero self n` where `zero` is ground. Iterates are kept, so a
    /// later call with a larger `n` resumes where the last one stopped.
    fn iterate(&self, key: Ground, zero: SemVal, n: u64) -> Result<SemVal, DenotError> {
        let n = n as usize;
        loop {
            let (len, last) = match self.0.iterates.borrow().get(&key) {
                Some(its) if its.len() > n => return Ok(its[n].clone()),
                Some(its) => (its.len(), its[its.len() - 1].clone()),
                None => (0, zero.clone()),
            };
            if len == 0 {
                self.0.iterates.borrow_mut().insert(key, vec![zero.clone()]);
                continue;
            }
            let partial = self.call(SemVal::Nat(len as u64 - 1))?;
            let next = apply_sem(&partial, last)?;
            let mut iterates = self.0.iterates.borrow_mut();
            let its = iterates.entry(key).or_default();
            if its.len() == len {
                its.push(next);
            }
        }
    }
}

thread_local! {
    static DEPTH: Cell<usize> = const { Cell::new(0) };
    static MAX_DEPTH: Cell<usize> = const { Cell::new(0) };
}

struct DepthGuard;

impl DepthGuard {
    fn enter() -> DepthGuard {
        let d = DEPTH.with(|d| {
            d.set(d.get() + 1);
            d.get()
        });
        MAX_DEPTH.with(|m| m.set(m.get().max(d)));
        DepthGuard
    }
}

impl Drop for DepthGuard {
    fn drop(&mut self) {
        DEPTH.with(|d| d.set(d.get() - 1));
    }
}

/// Deepest nesting of semantic function applications on this thread since
/// the last call to [`reset_max_depth`].
pub fn max_depth() -> usize {
    MAX_DEPTH.with(|m| m.get())
}

pub fn reset_max_depth() {
    MAX_DEPTH.with(|m| m.set(0));
}

pub fn apply_sem(f: &SemVal, arg: SemVal) -> Result<SemVal, DenotError> {
    match f {
        SemVal::Fun(fun) => fun.call(arg),
        other => Err(DenotError::NotAFunction(other.kind())),
    }
}

/// Apply `f` to each argument in turn.
pub fn apply_all(f: &SemVal, args: impl IntoIterator<Item = SemVal>) -> Result<SemVal, DenotError> {
    args.into_iter().try_fold(f.clone(), |acc, a| apply_sem(&acc, a))
}

/// Interpret `term` in `env`. The last element of `env` is the innermost
/// binder, matching the context order of [`crate::frontend::typecheck`].
pub fn denote(term: &Term, env: &[SemVal]) -> Result<SemVal, DenotError> {
    let code = compile(term);
    let env = env.iter().fold(Env::default(), |e, v| e.push(v.clone()));
    code.eval(&env)
}

/// Denotation of a closed term.
pub fn denote_closed(term: &Term) -> Result<SemVal, DenotError> {
    denote(term, &[])
}

/// Shared-body copy of a term, so closures can hold on to their bodies.
enum Code {
    Var(usize),
    Lam { nat_domain: bool, body: Rc<Code> },
    App(Rc<Code>, Rc<Code>),
    Zero,
    Succ(Rc<Code>),
    Rec(Rc<Code>, Rc<Code>, Rc<Code>),
    True,
    False,
    If(Rc<Code>, Rc<Code>, Rc<Code>),
}

fn compile(term: &Term) -> Rc<Code> {
    Rc::new(match term {
        Term::Var(i) => Code::Var(*i),
        Term::Lam(ty, body) => Code::Lam {
            nat_domain: *ty == Type::Nat,
            body: compile(body),
        },
        Term::App(f, a) => Code::App(compile(f), compile(a)),
        Term::Zero => Code::Zero,
        Term::Succ(t) => Code::Succ(compile(t)),
        Term::Rec(z, s, n) => Code::Rec(compile(z), compile(s), compile(n)),
        Term::True => Code::True,
        Term::False => Code::False,
        Term::If(c, t, e) => Code::If(compile(c), compile(t), compile(e)),
    })
}

#[derive(Clone, Default)]
struct Env(Option<Rc<(SemVal, Env)>>);

impl Env {
    fn push(&self, v: SemVal) -> Env {
        Env(Some(Rc::new((v, self.clone()))))
    }

    fn lookup(&self, index: usize) -> Result<&SemVal, DenotError> {
        let unbound = || DenotError::Shape(format!("unbound variable {}", index));
        let mut env = self;
        for _ in 0..index {
            env = &env.0.as_ref().ok_or_else(unbound)?.1;
        }
        env.0.as_ref().map(|n| &n.0).ok_or_else(unbound)
    }
}

fn expect_nat(v: SemVal) -> Result<u64, DenotError> {
    v.as_nat()
        .ok_or_else(|| DenotError::Shape(format!("expected nat, found {}", v.kind())))
}

impl Code {
    fn eval(self: &Rc<Self>, env: &Env) -> Result<SemVal, DenotError> {
        match &**self {
            Code::Var(i) => env.lookup(*i).cloned(),
            Code::Zero => Ok(SemVal::Nat(0)),
            Code::True => Ok(SemVal::Bool(true)),
            Code::False => Ok(SemVal::Bool(false)),
            Code::Succ(t) => Ok(SemVal::Nat(expect_nat(t.eval(env)?)? + 1)),
            Code::Lam { nat_domain, body } => {
                let body = Rc::clone(body);
                let env = env.clone();
                let f = move |arg: SemVal| body.eval(&env.push(arg));
                Ok(SemVal::Fun(if *nat_domain {
                    SemFun::memoized(f)
                } else {
                    SemFun::new(f)
                }))
            }
            Code::App(f, a) => {
                let f = f.eval(env)?;
                let a = a.eval(env)?;
                apply_sem(&f, a)
            }
            Code::If(c, t, e) => match c.eval(env)? {
                SemVal::Bool(true) => t.eval(env),
                SemVal::Bool(false) => e.eval(env),
                other => Err(DenotError::Shape(format!(
                    "if on {}",
                    other.kind()
                ))),
            },
            Code::Rec(z, s, n) => {
                let zero = z.eval(env)?;
                let step = s.eval(env)?;
                let n = expect_nat(n.eval(env)?)?;
                if n == 0 {
                    return Ok(zero);
                }
                let step = match step {
                    SemVal::Fun(f) => f,
                    other => return Err(DenotError::NotAFunction(other.kind())),
                };
                match zero.ground() {
                    Some(key) => step.iterate(key, zero, n),
                    None => (0..n).try_fold(zero, |acc, k| {
                        apply_sem(&step.call(SemVal::Nat(k))?, acc)
                    }),
                }
            }
        }
    }
}

/// An element of Cantor space: a total map from indices to bits, with
/// each bit computed at most once.
#[derive(Clone)]
pub struct BitStream(Rc<StreamInner>);

struct StreamInner {
    bit: Box<dyn Fn(u64) -> Result<bool, DenotError>>,
    memo: RefCell<HashMap<u64, bool>>,
}

impl BitStream {
    pub fn new(bit: impl Fn(u64) -> bool + 'static) -> Self {
        BitStream::fallible(move |i| Ok(bit(i)))
    }

    pub fn fallible(bit: impl Fn(u64) -> Result<bool, DenotError> + 'static) -> Self {
        BitStream(Rc::new(StreamInner {
            bit: Box::new(bit),
            memo: RefCell::new(HashMap::new()),
        }))
    }

    pub fn bit_at(&self, index: u64) -> Result<bool, DenotError> {
        if let Some(b) = self.0.memo.borrow().get(&index) {
            return Ok(*b);
        }
        let b = (self.0.bit)(index)?;
        self.0.memo.borrow_mut().insert(index, b);
        Ok(b)
    }

    /// Bits `0..len`.
    pub fn prefix(&self, len: u64) -> Result<Vec<bool>, DenotError> {
        (0..len).map(|i| self.bit_at(i)).collect()
    }

    /// Number of bits computed so far.
    pub fn cached(&self) -> usize {
        self.0.memo.borrow().len()
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitStream({} cached)", self.cached())
    }
}

/// Render bits as `0`/`1` characters.
pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

/// The stream as a semantic function `nat -> bool`.
pub fn stream_to_sem(s: &BitStream) -> SemVal {
    let s = s.clone();
    SemVal::Fun(SemFun::new(move |arg| match arg {
        SemVal::Nat(i) => Ok(SemVal::Bool(s.bit_at(i)?)),
        other => Err(DenotError::Shape(format!(
            "stream indexed by {}",
            other.kind()
        ))),
    }))
}

/// Package a semantic `nat -> bool` as a memoized stream.
pub fn sem_to_stream(v: &SemVal) -> Result<BitStream, DenotError> {
    let f = match v {
        SemVal::Fun(f) => f.clone(),
        other => return Err(DenotError::NotAFunction(other.kind())),
    };
    Ok(BitStream::fallible(move |index| {
        match f.call(SemVal::Nat(index))? {
            SemVal::Bool(b) => Ok(b),
            other => Err(DenotError::NotABit {
                index,
                found: other.kind(),
            }),
        }
    }))
}
