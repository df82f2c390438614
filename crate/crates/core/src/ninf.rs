//! ℕ∞ as tagged points, and the Kreisel counter-example.
//!
//! The Kreisel function `f(α) = [α = ∞]` is not computable on streams:
//! deciding `α = ∞` needs every bit. On tagged points it is trivial, so the
//! counter-example is evaluated here, with each step that cannot be decided
//! mechanically either certified by a [`WitnessPolicy`] or bounded.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::denot::{
    apply_sem, denote_closed, sem_to_stream, stream_to_sem, BitStream, DenotError, SemFun, SemVal,
};
use crate::stdlib::tm_eps;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NInfError {
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("certificate violated: predicate claimed constant {claimed} on finite points, but is {found} at {at}")]
    CertificateViolation { claimed: u8, found: u8, at: NInfPoint },
    #[error("no finite witness up to {0}; the search result is undecided")]
    Undecided(u64),
    #[error("definable search disagrees with the tagged result at bit {index}")]
    PrefixMismatch { index: u64 },
    #[error("stream argument is not a finite point within {0} bits")]
    NotFinite(u64),
    #[error(transparent)]
    Denot(#[from] DenotError),
}

/// A point of ℕ∞: `Finite(n)` is `n̄ = 0^n 1^ω`, `Infinity` is `0^ω`.
///
/// The derived order is the order of ℕ∞, with `Infinity` on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NInfPoint {
    Finite(u64),
    Infinity,
}

impl std::fmt::Display for NInfPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NInfPoint::Finite(n) => write!(f, "{}", n),
            NInfPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl NInfPoint {
    pub fn bit_at(self, index: u64) -> bool {
        match self {
            NInfPoint::Finite(n) => n <= index,
            NInfPoint::Infinity => false,
        }
    }
}

pub fn embed(x: NInfPoint) -> BitStream {
    BitStream::new(move |i| x.bit_at(i))
}

/// Whether the first `k` bits of `s` are nondecreasing.
pub fn member_prefix_check(s: &BitStream, k: u64) -> Result<bool, NInfError> {
    if k == 0 {
        return Err(NInfError::ZeroBound);
    }
    let bits = s.prefix(k)?;
    Ok(bits.windows(2).all(|w| w[0] <= w[1]))
}

/// Classify a monotone prefix: the position of its first 1, if any.
pub fn classify_prefix(bits: &[bool]) -> Option<Option<u64>> {
    if bits.windows(2).any(|w| w[0] && !w[1]) {
        return None;
    }
    Some(bits.iter().position(|b| *b).map(|n| n as u64))
}

/// `x + 1`, i.e. the stream `0x`.
pub fn succ_point(x: NInfPoint) -> NInfPoint {
    match x {
        NInfPoint::Finite(n) => NInfPoint::Finite(n + 1),
        NInfPoint::Infinity => NInfPoint::Infinity,
    }
}

/// `1` exactly at `∞`.
pub fn f_kreisel(x: NInfPoint) -> bool {
    x == NInfPoint::Infinity
}

/// How to settle whether a predicate has a finite witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessPolicy {
    /// The caller certifies the predicate takes this value at every `n̄`.
    ConstantOnFinite(bool),
    /// Scan `n̄` for `n ≤ bound`.
    BoundedSearch(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsVerdict {
    Point(NInfPoint),
    NoWitnessUpTo(u64),
}

/// `inf { x ∈ ℕ∞ | p(x) }`, with the empty infimum being `∞`.
pub fn eps_point(
    p: impl Fn(NInfPoint) -> Result<bool, DenotError>,
    policy: WitnessPolicy,
) -> Result<EpsVerdict, NInfError> {
    match policy {
        WitnessPolicy::ConstantOnFinite(claimed) => {
            let at = NInfPoint::Finite(0);
            let found = p(at)?;
            if found != claimed {
                return Err(NInfError::CertificateViolation {
                    claimed: claimed.into(),
                    found: found.into(),
                    at,
                });
            }
            Ok(EpsVerdict::Point(if claimed {
                NInfPoint::Finite(0)
            } else {
                NInfPoint::Infinity
            }))
        }
        WitnessPolicy::BoundedSearch(bound) => {
            if bound == 0 {
                return Err(NInfError::ZeroBound);
            }
            for n in 0..=bound {
                if p(NInfPoint::Finite(n))? {
                    return Ok(EpsVerdict::Point(NInfPoint::Finite(n)));
                }
            }
            Ok(EpsVerdict::NoWitnessUpTo(bound))
        }
    }
}

fn bit<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*b))
}

/// Outcome of evaluating `test` on a function over tagged points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    #[serde(serialize_with = "bit")]
    pub test_value: bool,
    #[serde(serialize_with = "bit")]
    pub antecedent_holds: bool,
    #[serde(serialize_with = "bit")]
    pub consequent_holds: bool,
    pub eps_prefix_zero_up_to: u64,
    #[serde(serialize_with = "bit")]
    pub f_kreisel_at_infinity: bool,
    #[serde(serialize_with = "bit")]
    pub f_kreisel_at_zerobar: bool,
}

/// `test(f_kreisel)`, cross-checked against the definable `ε` over `bound` bits.
pub fn run_counterexample(bound: u64) -> Result<CounterexampleReport, NInfError> {
    run_test_on_points(&f_kreisel, WitnessPolicy::ConstantOnFinite(false), bound)
}

/// The same pipeline with a constant-1 function; `test` must hold.
pub fn run_control(bound: u64) -> Result<CounterexampleReport, NInfError> {
    run_test_on_points(&|_| true, WitnessPolicy::ConstantOnFinite(true), bound)
}

/// Evaluate `test(f) = (f(ε p) = f(∞)) ⟹ (f(0̄) = f(∞))` where
/// `p(x) = [f(x+1) = f(∞)]`, with `policy` settling the finite behaviour of `p`.
///
/// A `ConstantOnFinite` certificate is checked at every `n̄` with `n < bound`.
/// The definable `ε` is then run on `p` restricted to finite points and its
/// first `bound` bits must match the tagged result.
pub fn run_test_on_points(
    f: &dyn Fn(NInfPoint) -> bool,
    policy: WitnessPolicy,
    bound: u64,
) -> Result<CounterexampleReport, NInfError> {
    if bound == 0 {
        return Err(NInfError::ZeroBound);
    }
    let at_infinity = f(NInfPoint::Infinity);
    let at_zerobar = f(NInfPoint::Finite(0));
    let p = |x: NInfPoint| f(succ_point(x)) == at_infinity;

    if let WitnessPolicy::ConstantOnFinite(claimed) = policy {
        if let Some(n) = (0..bound).find(|n| p(NInfPoint::Finite(*n)) != claimed) {
            return Err(NInfError::CertificateViolation {
                claimed: claimed.into(),
                found: (!claimed).into(),
                at: NInfPoint::Finite(n),
            });
        }
    }
    let point = match eps_point(|x| Ok(p(x)), policy)? {
        EpsVerdict::Point(x) => x,
        EpsVerdict::NoWitnessUpTo(b) => return Err(NInfError::Undecided(b)),
    };

    let antecedent = f(point) == at_infinity;
    let consequent = at_zerobar == at_infinity;

    let finite_values: Vec<bool> = match policy {
        WitnessPolicy::ConstantOnFinite(_) => Vec::new(),
        WitnessPolicy::BoundedSearch(_) => (0..=bound).map(|n| p(NInfPoint::Finite(n))).collect(),
    };
    let restriction = finite_restriction(policy, finite_values);
    let eps = apply_sem(&denote_closed(&tm_eps())?, restriction)?;
    let stream = sem_to_stream(&eps)?;
    let expected = embed(point);
    let mut zeros = 0;
    let mut leading = true;
    for i in 0..bound {
        let b = stream.bit_at(i)?;
        if b != expected.bit_at(i)? {
            return Err(NInfError::PrefixMismatch { index: i });
        }
        if b {
            leading = false;
        } else if leading {
            zeros += 1;
        }
    }

    Ok(CounterexampleReport {
        test_value: !antecedent || consequent,
        antecedent_holds: antecedent,
        consequent_holds: consequent,
        eps_prefix_zero_up_to: zeros,
        f_kreisel_at_infinity: at_infinity,
        f_kreisel_at_zerobar: at_zerobar,
    })
}

/// The predicate restricted to finite points, as a semantic functional.
/// `ε` only ever applies it to streams `n̄`.
fn finite_restriction(policy: WitnessPolicy, finite_values: Vec<bool>) -> SemVal {
    match policy {
        WitnessPolicy::ConstantOnFinite(b) => SemVal::Fun(SemFun::new(move |_| Ok(SemVal::Bool(b)))),
        WitnessPolicy::BoundedSearch(_) => SemVal::Fun(SemFun::new(move |alpha| {
            let cap = finite_values.len() as u64;
            let n = (0..cap)
                .find_map(|i| match apply_sem(&alpha, SemVal::Nat(i)) {
                    Ok(SemVal::Bool(true)) => Some(Ok(i)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                })
                .transpose()?
                .ok_or(DenotError::Shape(format!("not a finite point within {} bits", cap)))?;
            Ok(SemVal::Bool(finite_values[n as usize]))
        })),
    }
}

/// Values of `f` at `∞` and at `n̄` for `n ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscontinuityReport {
    pub bound: u64,
    #[serde(serialize_with = "bit")]
    pub at_infinity: bool,
    /// Least `n ≤ bound` with `f(n̄) = f(∞)`.
    pub first_agreement: Option<u64>,
}

impl DiscontinuityReport {
    /// No finite point below the bound agrees with `∞`.
    pub fn is_discontinuous_up_to_bound(&self) -> bool {
        self.first_agreement.is_none()
    }
}

pub fn discontinuity_certificate(
    f: impl Fn(NInfPoint) -> Result<bool, DenotError>,
    bound: u64,
) -> Result<DiscontinuityReport, NInfError> {
    if bound == 0 {
        return Err(NInfError::ZeroBound);
    }
    let at_infinity = f(NInfPoint::Infinity)?;
    let mut first_agreement = None;
    for n in 0..=bound {
        if f(NInfPoint::Finite(n))? == at_infinity {
            first_agreement = Some(n);
            break;
        }
    }
    Ok(DiscontinuityReport {
        bound,
        at_infinity,
        first_agreement,
    })
}

/// View a semantic functional on streams as a function on tagged points.
pub fn on_points(f: SemVal) -> impl Fn(NInfPoint) -> Result<bool, DenotError> {
    move |x| {
        let v = apply_sem(&f, stream_to_sem(&embed(x)))?;
        v.as_bool()
            .ok_or(DenotError::Shape(format!("predicate returned {}", v.kind())))
    }
}
