//! Random well-typed closed terms and the property harnesses for `ε` and
//! `test`.
//!
//! Generation is a pure function of the configuration and the sample index.
//! Harnesses evaluate samples in parallel; each worker denotes its own terms,
//! so no semantic value crosses a thread boundary.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::denot::{
    apply_sem, denote_closed, max_depth, reset_max_depth, sem_to_stream, DenotError, SemVal,
};
use crate::frontend::{parse_term_with, Term, Type};
use crate::ninf::{member_prefix_check, on_points, NInfPoint};
use crate::stdlib::{tm_eps, tm_test, Prelude};

/// Largest literal used as a recursion count.
pub const MAX_REC_SCRUTINEE: u64 = 6;

const MAX_ATTEMPTS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FuzzError {
    #[error("size budget {max_size} cannot close a term of type {ty} (needs {needed})")]
    BudgetTooSmall { ty: Type, max_size: usize, needed: usize },
    #[error("generation failed after {0} attempts")]
    Exhausted(u32),
    #[error("harness expects type {expected}, got {found}")]
    WrongType { expected: Type, found: Type },
    #[error(transparent)]
    Denot(#[from] DenotError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub target: Type,
    /// Maximum number of AST nodes.
    pub max_size: usize,
    pub seed: u64,
    pub count: usize,
}

impl GenConfig {
    pub fn new(target: Type, max_size: usize, seed: u64, count: usize) -> Self {
        GenConfig {
            target,
            max_size,
            seed,
            count,
        }
    }
}

/// Smallest closed inhabitant size, ignoring variables.
pub fn min_size(ty: &Type) -> usize {
    match ty {
        Type::Nat | Type::Bool => 1,
        Type::Arrow(_, cod) => 1 + min_size(cod),
    }
}

/// Generate sample `index` of `cfg`.
pub fn gen_term(cfg: &GenConfig, index: u64) -> Result<Term, FuzzError> {
    let needed = min_size(&cfg.target);
    if cfg.max_size < needed {
        return Err(FuzzError::BudgetTooSmall {
            ty: cfg.target.clone(),
            max_size: cfg.max_size,
            needed,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let mut gen = Generator::new(rng);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(t) = gen.term(&cfg.target, &mut Vec::new(), cfg.max_size) {
            if t.size() <= cfg.max_size {
                return Ok(t);
            }
        }
    }
    Err(FuzzError::Exhausted(MAX_ATTEMPTS))
}

#[derive(Clone)]
enum Head {
    Var(usize),
    Library(usize),
}

enum Production {
    Zero,
    Literal,
    Succ,
    True,
    False,
    If,
    Rec,
    App(Type),
    Lam,
    Spine(Head, Vec<Type>),
}

struct Generator {
    rng: ChaCha8Rng,
    library: Vec<(Term, Type, usize)>,
}

/// If `ty` is `a1 -> .. -> ak -> target`, the argument types `a1 .. ak`.
fn spine_to(ty: &Type, target: &Type) -> Option<Vec<Type>> {
    let mut args = Vec::new();
    let mut t = ty;
    loop {
        if t == target {
            return Some(args);
        }
        match t {
            Type::Arrow(dom, cod) => {
                args.push((**dom).clone());
                t = cod;
            }
            _ => return None,
        }
    }
}

impl Generator {
    fn new(rng: ChaCha8Rng) -> Self {
        let library = Prelude::new()
            .entries()
            .iter()
            .map(|e| (e.term.clone(), e.ty.clone(), e.term.size()))
            .collect();
        Generator { rng, library }
    }

    /// Caps for consecutive children with the given minimum sizes.
    fn split(&mut self, mins: &[usize], budget: usize) -> Vec<usize> {
        let total: usize = mins.iter().sum();
        let mut free = budget.saturating_sub(total);
        let mut caps = Vec::with_capacity(mins.len());
        for (i, &m) in mins.iter().enumerate() {
            let left = mins.len() - i;
            let extra = if left == 1 {
                free
            } else {
                self.rng.gen_range(0..=(2 * free / left).min(free))
            };
            free -= extra;
            caps.push(m + extra);
        }
        caps
    }

    fn productions(&mut self, ty: &Type, ctx: &[Type], budget: usize) -> Vec<(f64, Production)> {
        let mut options = Vec::new();
        let m = min_size(ty);
        match ty {
            Type::Nat => {
                options.push((2.0, Production::Zero));
                if budget >= 2 {
                    options.push((1.0, Production::Literal));
                    options.push((1.0, Production::Succ));
                }
            }
            Type::Bool => {
                options.push((1.5, Production::True));
                options.push((1.5, Production::False));
            }
            Type::Arrow(..) => options.push((6.0, Production::Lam)),
        }
        if ty.is_ground() {
            if budget >= 2 + 2 * m {
                options.push((2.0, Production::If));
            }
            if budget >= 2 + m + min_size(&rec_step(ty)) {
                options.push((1.0, Production::Rec));
            }
            let sigma = match self.rng.gen_range(0..3) {
                0 => Type::Nat,
                1 => Type::Bool,
                _ => Type::stream(),
            };
            if budget > min_size(&Type::arrow(sigma.clone(), ty.clone())) + min_size(&sigma) {
                options.push((1.0, Production::App(sigma)));
            }
        }

        let mut var_heads = Vec::new();
        for (i, var_ty) in ctx.iter().rev().enumerate() {
            if let Some(args) = spine_to(var_ty, ty) {
                let need = 1 + args.len() + args.iter().map(min_size).sum::<usize>();
                if need <= budget {
                    var_heads.push(Production::Spine(Head::Var(i), args));
                }
            }
        }
        let var_weight = if ty.is_ground() { 6.0 } else { 1.5 };
        let n = var_heads.len() as f64;
        options.extend(var_heads.into_iter().map(|p| (var_weight / n, p)));

        let mut lib_heads = Vec::new();
        for (j, (_, lib_ty, size)) in self.library.iter().enumerate() {
            if let Some(args) = spine_to(lib_ty, ty) {
                let need = size + args.len() + args.iter().map(min_size).sum::<usize>();
                if need <= budget {
                    lib_heads.push(Production::Spine(Head::Library(j), args));
                }
            }
        }
        let n = lib_heads.len() as f64;
        options.extend(lib_heads.into_iter().map(|p| (2.0 / n, p)));
        options
    }

    fn term(&mut self, ty: &Type, ctx: &mut Vec<Type>, budget: usize) -> Option<Term> {
        let mut options = self.productions(ty, ctx, budget);
        let total: f64 = options.iter().map(|(w, _)| w).sum();
        let mut pick = self.rng.gen_range(0.0..total);
        let mut chosen = options.len() - 1;
        for (i, (w, _)) in options.iter().enumerate() {
            if pick < *w {
                chosen = i;
                break;
            }
            pick -= w;
        }
        let production = options.swap_remove(chosen).1;

        Some(match production {
            Production::Zero => Term::Zero,
            Production::True => Term::True,
            Production::False => Term::False,
            Production::Literal => {
                let hi = MAX_REC_SCRUTINEE.min(budget as u64 - 1);
                Term::numeral(self.rng.gen_range(1..=hi))
            }
            Production::Succ => Term::succ(self.term(&Type::Nat, ctx, budget - 1)?),
            Production::If => {
                let caps = self.split(&[1, min_size(ty), min_size(ty)], budget - 1);
                let c = self.term(&Type::Bool, ctx, caps[0])?;
                let t = self.term(ty, ctx, caps[1] + caps[0] - c.size())?;
                let rest = budget - 1 - c.size() - t.size();
                let e = self.term(ty, ctx, rest)?;
                Term::ite(c, t, e)
            }
            Production::Rec => {
                let step_ty = rec_step(ty);
                let scrutinee_cap = MAX_REC_SCRUTINEE.min((budget - 1 - min_size(ty) - min_size(&step_ty)) as u64 - 1);
                let n = Term::numeral(self.rng.gen_range(0..=scrutinee_cap));
                let avail = budget - 1 - n.size();
                let caps = self.split(&[min_size(ty), min_size(&step_ty)], avail);
                let z = self.term(ty, ctx, caps[0])?;
                let s = self.term(&step_ty, ctx, avail - z.size())?;
                Term::rec(z, s, n)
            }
            Production::App(sigma) => {
                let fun_ty = Type::arrow(sigma.clone(), ty.clone());
                let caps = self.split(&[min_size(&fun_ty), min_size(&sigma)], budget - 1);
                let f = self.term(&fun_ty, ctx, caps[0])?;
                let a = self.term(&sigma, ctx, budget - 1 - f.size())?;
                Term::app(f, a)
            }
            Production::Lam => {
                let Type::Arrow(dom, cod) = ty else {
                    return None;
                };
                ctx.push((**dom).clone());
                let body = self.term(cod, ctx, budget - 1);
                ctx.pop();
                Term::lam((**dom).clone(), body?)
            }
            Production::Spine(head, args) => {
                let head_term = match head {
                    Head::Var(i) => Term::var(i),
                    Head::Library(j) => self.library[j].0.clone(),
                };
                let mut remaining = budget - head_term.size() - args.len();
                let mut out = head_term;
                for (k, arg_ty) in args.iter().enumerate() {
                    let later: usize = args[k + 1..].iter().map(min_size).sum();
                    let mins = [min_size(arg_ty), later.max(1)];
                    let cap = if k + 1 == args.len() {
                        remaining
                    } else {
                        self.split(&mins, remaining)[0].min(remaining - later)
                    };
                    let a = self.term(arg_ty, ctx, cap)?;
                    remaining -= a.size();
                    out = Term::app(out, a);
                }
                out
            }
        })
    }
}

fn rec_step(ty: &Type) -> Type {
    Type::arrow(Type::Nat, Type::arrow(ty.clone(), ty.clone()))
}

/// Hand-written functionals `(nat -> bool) -> bool` that read their argument.
pub const FUNCTIONAL_CORPUS: &[&str] = &[
    "fun a : nat -> bool . true",
    "fun a : nat -> bool . false",
    "fun a : nat -> bool . a 0",
    "fun a : nat -> bool . a 1",
    "fun a : nat -> bool . a 2",
    "fun a : nat -> bool . a 3",
    "fun a : nat -> bool . a 4",
    "fun a : nat -> bool . a 5",
    "fun a : nat -> bool . a 6",
    "fun a : nat -> bool . a 7",
    "fun a : nat -> bool . a 8",
    "fun a : nat -> bool . not (a 0)",
    "fun a : nat -> bool . not (a 5)",
    "fun a : nat -> bool . and (a 2) (not (a 1))",
    "fun a : nat -> bool . eqBool (a 3) (a 7)",
    "fun a : nat -> bool . or (a 0) (not (a 4))",
    "fun a : nat -> bool . a (add 2 3)",
    "fun a : nat -> bool . a (mult 3 4)",
    "fun a : nat -> bool . not (a 70)",
    "fun a : nat -> bool . cons a 3",
    "fun a : nat -> bool . a (pred 5)",
    "fun a : nat -> bool . rec (a 0) (fun k : nat . fun r : bool . or r (a k)) 4",
    "fun a : nat -> bool . eps (fun b : nat -> bool . and (b 2) (a 4)) 3",
    "fun a : nat -> bool . test (fun b : nat -> bool . b (if a 0 then 1 else 2))",
    "fun a : nat -> bool . a (if a 2 then 0 else 9)",
    "fun a : nat -> bool . leq 3 (if a 1 then 2 else 4)",
];

/// Parse the corpus with the prelude in scope.
pub fn functional_corpus() -> Vec<Term> {
    let defs = Prelude::new().definitions();
    FUNCTIONAL_CORPUS
        .iter()
        .map(|src| parse_term_with(src, &defs).expect("corpus entry parses"))
        .collect()
}

/// Least `n ≤ max_n` with `f(n̄) = f(∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementIndex {
    Found(u64),
    NotFoundUpTo(u64),
}

pub fn agreement_index(f: &SemVal, max_n: u64) -> Result<AgreementIndex, DenotError> {
    let at = on_points(f.clone());
    let at_infinity = at(NInfPoint::Infinity)?;
    for n in 0..=max_n {
        if at(NInfPoint::Finite(n))? == at_infinity {
            return Ok(AgreementIndex::Found(n));
        }
    }
    Ok(AgreementIndex::NotFoundUpTo(max_n))
}

/// A sample of a harness run: either from the fixed corpus or generated.
fn sample(cfg: &GenConfig, corpus: &[Term], index: usize) -> Result<Term, FuzzError> {
    match corpus.get(index) {
        Some(t) => Ok(t.clone()),
        None => gen_term(cfg, (index - corpus.len()) as u64),
    }
}

fn check_predicate_type(cfg: &GenConfig) -> Result<(), FuzzError> {
    if cfg.target != Type::predicate() {
        return Err(FuzzError::WrongType {
            expected: Type::predicate(),
            found: cfg.target.clone(),
        });
    }
    Ok(())
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstancyReport {
    /// Corpus entries plus generated terms.
    pub samples: usize,
    /// Leading samples taken from the corpus.
    pub corpus: usize,
    /// Sample indices where `test` was not 1.
    pub failures: Vec<usize>,
    pub seed: u64,
    pub max_depth: usize,
    pub elapsed_ms: u64,
}

/// Apply `test` to every sample functional; each must yield 1.
pub fn check_test_constancy(cfg: &GenConfig) -> Result<ConstancyReport, FuzzError> {
    check_predicate_type(cfg)?;
    let start = Instant::now();
    let corpus = functional_corpus();
    let total = corpus.len() + cfg.count;
    let outcomes: Vec<Result<(bool, usize), FuzzError>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let f = sample(cfg, &corpus, i)?;
            reset_max_depth();
            let test = denote_closed(&tm_test())?;
            let ok = match apply_sem(&test, denote_closed(&f)?) {
                Ok(v) => v.as_bool() == Some(true),
                Err(_) => false,
            };
            Ok((ok, max_depth()))
        })
        .collect();

    let mut failures = Vec::new();
    let mut depth = 0;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let (ok, d) = outcome?;
        depth = depth.max(d);
        if !ok {
            failures.push(i);
        }
    }
    Ok(ConstancyReport {
        samples: total,
        corpus: corpus.len(),
        failures,
        seed: cfg.seed,
        max_depth: depth,
        elapsed_ms: elapsed_ms(start),
    })
}

/// Bits `0..len` of the least point of ℕ∞ whose embedding satisfies `p`,
/// found by scanning `n̄` for `n < len`.
pub fn brute_force_infimum(p: &SemVal, len: u64) -> Result<Vec<bool>, DenotError> {
    let at = on_points(p.clone());
    let mut witness = None;
    for n in 0..len {
        if at(NInfPoint::Finite(n))? {
            witness = Some(n);
            break;
        }
    }
    Ok((0..len).map(|i| witness.is_some_and(|n| n <= i)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsReport {
    pub samples: usize,
    pub corpus: usize,
    /// Union of all failure lists below.
    pub failures: Vec<usize>,
    /// Prefix of `ε(p)` differs from the brute-force infimum.
    pub mismatches: Vec<usize>,
    /// Prefix of `ε(p)` is not monotone.
    pub non_monotone: Vec<usize>,
    /// `p(ε(p))` disagrees with the existence of a witness.
    pub witness_violations: Vec<usize>,
    pub prefix_len: u64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

/// Witnesses are looked for up to this index when `p(ε(p))` is 0.
pub const NO_WITNESS_SCAN: u64 = 1000;

#[derive(Default)]
struct EpsOutcome {
    mismatch: bool,
    non_monotone: bool,
    witness_violation: bool,
}

fn eps_sample(p: &Term, prefix_len: u64) -> Result<EpsOutcome, FuzzError> {
    let p = denote_closed(p)?;
    let eps_p = apply_sem(&denote_closed(&tm_eps())?, p.clone())?;
    let stream = sem_to_stream(&eps_p)?;
    let bits = stream.prefix(prefix_len)?;
    let oracle = brute_force_infimum(&p, prefix_len)?;

    let at = on_points(p.clone());
    let witness = (0..=prefix_len).find_map(|n| match at(NInfPoint::Finite(n)) {
        Ok(true) => Some(Ok(n)),
        Ok(false) => None,
        Err(e) => Some(Err(e)),
    });
    let witness = witness.transpose()?;
    let at_infinity = at(NInfPoint::Infinity)?;
    let value = apply_sem(&p, eps_p)?
        .as_bool()
        .ok_or(DenotError::Shape("predicate did not return a boolean".into()))?;

    let mut witness_violation = value != (witness.is_some() || at_infinity);
    if !value && !witness_violation {
        witness_violation = at_infinity
            || (0..=NO_WITNESS_SCAN)
                .map(|n| at(NInfPoint::Finite(n)))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .any(|b| b);
    }

    Ok(EpsOutcome {
        mismatch: bits != oracle,
        non_monotone: prefix_len > 0 && !member_prefix_check(&stream, prefix_len).unwrap_or(false),
        witness_violation,
    })
}

/// Compare `ε(p)` against the brute-force infimum for every sample predicate.
pub fn check_eps_oracle(cfg: &GenConfig, prefix_len: u64) -> Result<EpsReport, FuzzError> {
    check_predicate_type(cfg)?;
    let start = Instant::now();
    let corpus = functional_corpus();
    let total = corpus.len() + cfg.count;
    let outcomes: Vec<Result<EpsOutcome, FuzzError>> = (0..total)
        .into_par_iter()
        .map(|i| eps_sample(&sample(cfg, &corpus, i)?, prefix_len))
        .collect();

    let mut report = EpsReport {
        samples: total,
        corpus: corpus.len(),
        failures: Vec::new(),
        mismatches: Vec::new(),
        non_monotone: Vec::new(),
        witness_violations: Vec::new(),
        prefix_len,
        seed: cfg.seed,
        elapsed_ms: 0,
    };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let o = outcome?;
        if o.mismatch {
            report.mismatches.push(i);
        }
        if o.non_monotone {
            report.non_monotone.push(i);
        }
        if o.witness_violation {
            report.witness_violations.push(i);
        }
        if o.mismatch || o.non_monotone || o.witness_violation {
            report.failures.push(i);
        }
    }
    report.elapsed_ms = elapsed_ms(start);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::typecheck;

    #[test]
    fn size_one_booleans() {
        let cfg = GenConfig::new(Type::Bool, 1, 7, 1);
        for i in 0..20 {
            let t = gen_term(&cfg, i).unwrap();
            assert!(t == Term::True || t == Term::False);
        }
    }

    #[test]
    fn budget_too_small() {
        let cfg = GenConfig::new(Type::predicate(), 1, 0, 1);
        assert!(matches!(gen_term(&cfg, 0), Err(FuzzError::BudgetTooSmall { needed: 2, .. })));
    }

    #[test]
    fn deterministic_per_index() {
        let cfg = GenConfig::new(Type::predicate(), 40, 99, 10);
        for i in 0..10 {
            assert_eq!(gen_term(&cfg, i).unwrap(), gen_term(&cfg, i).unwrap());
        }
        assert_ne!(
            (0..10).map(|i| gen_term(&cfg, i).unwrap()).collect::<Vec<_>>(),
            (10..20).map(|i| gen_term(&cfg, i).unwrap()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn generated_terms_typecheck_within_budget() {
        for ty in [Type::Nat, Type::Bool, Type::stream(), Type::predicate()] {
            let cfg = GenConfig::new(ty.clone(), 30, 3, 250);
            for i in 0..250 {
                let t = gen_term(&cfg, i).unwrap();
                assert!(t.size() <= 30);
                assert_eq!(typecheck(&t, &[]).unwrap(), ty, "{:?}", t);
            }
        }
    }

    #[test]
    fn corpus_typechecks() {
        for t in functional_corpus() {
            assert_eq!(typecheck(&t, &[]).unwrap(), Type::predicate());
        }
    }

    #[test]
    fn agreement_index_examples() {
        let defs = Prelude::new().definitions();
        let sem = |src| denote_closed(&parse_term_with(src, &defs).unwrap()).unwrap();
        assert_eq!(
            agreement_index(&sem("fun a : nat -> bool . a 3"), 100),
            Ok(AgreementIndex::Found(4))
        );
        assert_eq!(
            agreement_index(&sem("fun a : nat -> bool . true"), 100),
            Ok(AgreementIndex::Found(0))
        );
        assert_eq!(
            agreement_index(&sem("fun a : nat -> bool . not (a 0)"), 100),
            Ok(AgreementIndex::Found(1))
        );
        assert_eq!(
            agreement_index(&sem("fun a : nat -> bool . a 30"), 10),
            Ok(AgreementIndex::NotFoundUpTo(10))
        );
    }

    #[test]
    fn brute_force_oracle() {
        let defs = Prelude::new().definitions();
        let sem = |src| denote_closed(&parse_term_with(src, &defs).unwrap()).unwrap();
        let s = |bits: Vec<bool>| crate::denot::bits_to_string(&bits);
        assert_eq!(s(brute_force_infimum(&sem("fun a : nat -> bool . a 0"), 4).unwrap()), "1111");
        assert_eq!(s(brute_force_infimum(&sem("fun a : nat -> bool . false"), 4).unwrap()), "0000");
        assert_eq!(
            s(brute_force_infimum(&sem("fun a : nat -> bool . and (a 2) (not (a 1))"), 5).unwrap()),
            "00111"
        );
    }

    #[test]
    fn small_harness_runs_clean() {
        let cfg = GenConfig::new(Type::predicate(), 25, 5, 20);
        let r = check_test_constancy(&cfg).unwrap();
        assert_eq!(r.failures, Vec::<usize>::new());
        assert_eq!(r.samples, FUNCTIONAL_CORPUS.len() + 20);
        let r = check_eps_oracle(&cfg, 16).unwrap();
        assert_eq!(r.failures, Vec::<usize>::new());
    }

    #[test]
    fn harness_rejects_wrong_type() {
        let cfg = GenConfig::new(Type::Nat, 10, 0, 1);
        assert!(matches!(check_test_constancy(&cfg), Err(FuzzError::WrongType { .. })));
    }
}
