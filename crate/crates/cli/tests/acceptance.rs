//! Acceptance criteria. Run with `--nocapture` to see one line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use systemt::denot::{apply_all, apply_sem, denote_closed, sem_to_stream, SemVal};
use systemt::eval::eval_closed;
use systemt::frontend::{parse_term, pretty};
use systemt::fuzz::{check_eps_oracle, check_test_constancy, gen_term, EpsReport, GenConfig};
use systemt::stdlib::{tm_add, tm_eps, tm_mult, tm_test};
use systemt::{typecheck, Term, Type};

const SEED: u64 = 0x5EED_2007;
const MAX_SIZE: usize = 40;

type Criterion = Box<dyn FnMut()>;

fn within(start: Instant, limit: Duration, what: &str) {
    let took = start.elapsed();
    assert!(took < limit, "{} took {:?}, limit {:?}", what, took, limit);
}

fn typing_fidelity() {
    let start = Instant::now();
    assert_eq!(
        typecheck(&tm_eps(), &[]).unwrap(),
        Type::arrow(Type::arrow(Type::arrow(Type::Nat, Type::Bool), Type::Bool), Type::arrow(Type::Nat, Type::Bool))
    );
    assert_eq!(
        typecheck(&tm_test(), &[]).unwrap(),
        Type::arrow(Type::arrow(Type::arrow(Type::Nat, Type::Bool), Type::Bool), Type::Bool)
    );
    within(start, Duration::from_secs(1), "typing");
}

fn eps_report() -> EpsReport {
    let cfg = GenConfig::new(Type::predicate(), MAX_SIZE, SEED, 200);
    let start = Instant::now();
    let report = check_eps_oracle(&cfg, 64).unwrap();
    within(start, Duration::from_secs(60), "eps oracle suite");
    assert_eq!(report.samples, 200 + report.corpus);
    report
}

fn kreisel_demo(control: bool) -> serde_json::Value {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tw"));
    cmd.args(["demo", "kreisel", "--bound", "100000", "--json"]);
    if control {
        cmd.arg("--control");
    }
    let start = Instant::now();
    let out = cmd.output().unwrap();
    within(start, Duration::from_secs(5), "kreisel demo");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn kreisel_counterexample() {
    let r = kreisel_demo(false);
    assert_eq!(r["test_value"], 0);
    assert_eq!(r["antecedent_holds"], 1);
    assert_eq!(r["consequent_holds"], 0);
    assert_eq!(r["eps_prefix_zero_up_to"], 100_000);
    assert_eq!(r["f_kreisel_at_infinity"], 1);
    assert_eq!(r["f_kreisel_at_zerobar"], 0);
    assert_eq!(kreisel_demo(true)["test_value"], 1);
}

fn model_agreement() {
    let mut mismatches = Vec::new();
    for (ty, seed) in [(Type::Nat, SEED), (Type::Bool, SEED + 1)] {
        let cfg = GenConfig::new(ty, MAX_SIZE, seed, 500);
        for i in 0..500 {
            let t = gen_term(&cfg, i).unwrap();
            let m = eval_closed(&t).unwrap();
            let d = denote_closed(&t).unwrap();
            if m.as_nat() != d.as_nat() || m.as_bool() != d.as_bool() {
                mismatches.push(pretty(&t));
            }
        }
    }
    assert!(mismatches.is_empty(), "{:?}", mismatches);
}

fn roundtrip() {
    let types = [
        Type::Nat,
        Type::Bool,
        Type::stream(),
        Type::predicate(),
        Type::arrow(Type::predicate(), Type::stream()),
    ];
    let mut count = 0;
    let mut mismatches = 0;
    for (k, ty) in types.iter().enumerate() {
        let cfg = GenConfig::new(ty.clone(), MAX_SIZE, SEED + k as u64, 200);
        for i in 0..200 {
            let t = gen_term(&cfg, i).unwrap();
            count += 1;
            if parse_term(&pretty(&t)).ok().as_ref() != Some(&t) {
                mismatches += 1;
            }
        }
    }
    assert_eq!(count, 1000);
    assert_eq!(mismatches, 0);
}

fn memo_cost_guard() {
    let p = parse_term("fun a : nat -> bool . false").unwrap();
    let start = Instant::now();
    let eps = denote_closed(&tm_eps()).unwrap();
    let s = sem_to_stream(&apply_sem(&eps, denote_closed(&p).unwrap()).unwrap()).unwrap();
    let bits = s.prefix(256).unwrap();
    within(start, Duration::from_secs(1), "256-bit prefix");
    assert!(bits.iter().all(|b| !b));
}

fn arithmetic_goldens() {
    let n = SemVal::Nat;
    let (add, mult) = (denote_closed(&tm_add()).unwrap(), denote_closed(&tm_mult()).unwrap());
    for a in 0..=12u64 {
        for b in 0..=12u64 {
            assert_eq!(apply_all(&add, [n(a), n(b)]).unwrap().as_nat(), Some(a + b));
            assert_eq!(apply_all(&mult, [n(a), n(b)]).unwrap().as_nat(), Some(a * b));
            let lit = |t: Term| Term::apps(t, [Term::numeral(a), Term::numeral(b)]);
            assert_eq!(eval_closed(&lit(tm_add())).unwrap().as_nat(), Some(a + b));
            assert_eq!(eval_closed(&lit(tm_mult())).unwrap().as_nat(), Some(a * b));
        }
    }
}

#[test]
fn acceptance() {
    let mut criteria: Vec<(&str, Criterion)> = vec![
        ("1. typing fidelity of eps and test", Box::new(typing_fidelity)),
    ];
    // criteria 2-4 share one run of the eps suite
    let report = catch_unwind(eps_report).ok();
    let need = move |f: fn(&EpsReport)| -> Criterion {
        let report = report.clone();
        Box::new(move || f(report.as_ref().expect("eps suite did not complete")))
    };
    criteria.push(("2. eps oracle equivalence", need(|r| assert_eq!(r.mismatches, Vec::<usize>::new()))));
    criteria.push(("3. eps image in N-infinity", need(|r| assert_eq!(r.non_monotone, Vec::<usize>::new()))));
    criteria.push(("4. witness property", need(|r| assert_eq!(r.witness_violations, Vec::<usize>::new()))));
    criteria.push((
        "5. test constant on definables",
        Box::new(|| {
            let cfg = GenConfig::new(Type::predicate(), MAX_SIZE, SEED, 500);
            let start = Instant::now();
            let r = check_test_constancy(&cfg).unwrap();
            within(start, Duration::from_secs(120), "constancy suite");
            assert_eq!(r.samples, 500 + r.corpus);
            assert_eq!(r.failures, Vec::<usize>::new());
        }),
    ));
    criteria.push(("6. Kreisel counter-example", Box::new(kreisel_counterexample)));
    criteria.push(("7. machine and model agree", Box::new(model_agreement)));
    criteria.push(("8. pretty/parse roundtrip", Box::new(roundtrip)));
    criteria.push(("9. memoization cost guard", Box::new(memo_cost_guard)));
    criteria.push(("10. arithmetic goldens", Box::new(arithmetic_goldens)));

    let mut failed = Vec::new();
    for (name, mut check) in criteria {
        let ok = catch_unwind(AssertUnwindSafe(&mut check)).is_ok();
        println!("[{}] {}", if ok { "PASS" } else { "FAIL" }, name);
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}
