use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use systemt::denot::{apply_sem, bits_to_string, denote_closed, sem_to_stream};
use systemt::eval::{Machine, MachineValue};
use systemt::frontend::{parse_type, parse_with, SourceFile};
use systemt::fuzz::{agreement_index, check_eps_oracle, check_test_constancy, AgreementIndex, GenConfig};
use systemt::ninf::{classify_prefix, run_control, run_counterexample, CounterexampleReport};
use systemt::stdlib::{tm_eps, Prelude};
use systemt::{typecheck, Term, Type};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable file, parse or type error, wrong usage.
    Input(String),
    /// A property or demonstration did not come out as required.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

fn input(e: impl fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn failed(e: impl fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

type CliResult = Result<(), CliError>;

pub struct Output {
    json: bool,
    color: bool,
}

impl Output {
    pub fn new(json: bool) -> Self {
        let color = std::env::var("TW_COLOR").is_ok_and(|v| v == "1");
        Output { json, color }
    }

    fn emit(&self, value: &impl Serialize, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string(value).expect("serializable"));
        } else {
            println!("{}", text());
        }
    }

    fn verdict(&self, text: &str, good: bool) -> String {
        if !self.color {
            return text.to_string();
        }
        let code = if good { 32 } else { 31 };
        format!("\x1b[{}m{}\x1b[0m", code, text)
    }
}

fn load(path: &Path) -> Result<SourceFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {}", path.display(), e)))?;
    parse_with(&text, &Prelude::new().definitions())
        .map_err(|e| input(format!("{}:{}", path.display(), e)))
}

fn main_term(path: &Path, file: &SourceFile, expected: Option<&Type>) -> Result<(Term, Type), CliError> {
    let term = file
        .main
        .clone()
        .ok_or_else(|| input(format!("{}: no main term", path.display())))?;
    let ty = typecheck(&term, &[]).map_err(|e| input(format!("{}: main: {}", path.display(), e)))?;
    if let Some(expected) = expected {
        if &ty != expected {
            return Err(input(format!(
                "{}: main has type {}, expected {}",
                path.display(),
                ty,
                expected
            )));
        }
    }
    Ok((term, ty))
}

pub fn check(out: &Output, path: &Path) -> CliResult {
    let file = load(path)?;
    let mut defs = Vec::new();
    for (name, term) in &file.definitions {
        let ty = typecheck(term, &[]).map_err(|e| input(format!("{}: {}: {}", path.display(), name, e)))?;
        defs.push((name.clone(), ty));
    }
    let main = match &file.main {
        Some(_) => Some(main_term(path, &file, None)?.1),
        None => None,
    };
    let value = json!({
        "definitions": defs
            .iter()
            .map(|(n, t)| json!({ "name": n, "type": t.to_string() }))
            .collect::<Vec<_>>(),
        "main": main.as_ref().map(|t| t.to_string()),
    });
    out.emit(&value, || {
        let mut lines: Vec<String> = defs.iter().map(|(n, t)| format!("{} : {}", n, t)).collect();
        if let Some(t) = &main {
            lines.push(format!("main : {}", t));
        }
        lines.push(out.verdict("ok", true));
        lines.join("\n")
    });
    Ok(())
}

pub fn eval(out: &Output, path: &Path, budget: Option<u64>) -> CliResult {
    let file = load(path)?;
    let (term, ty) = main_term(path, &file, None)?;
    if !ty.is_ground() {
        return Err(input(format!(
            "{}: main has type {}; only nat and bool results can be printed",
            path.display(),
            ty
        )));
    }
    let mut machine = budget.map_or_else(Machine::new, Machine::with_budget);
    let value = machine.eval_closed(&term).map_err(failed)?;
    let json_value = match &value {
        MachineValue::Nat(n) => json!(n),
        MachineValue::Bool(b) => json!(b),
        MachineValue::Closure { .. } => json!(null),
    };
    out.emit(
        &json!({ "value": json_value, "type": ty.to_string(), "steps": machine.steps() }),
        || value.to_string(),
    );
    Ok(())
}

pub fn eps(out: &Output, path: &Path, prefix: u64) -> CliResult {
    let file = load(path)?;
    let (term, _) = main_term(path, &file, Some(&Type::predicate()))?;
    let p = denote_closed(&term).map_err(failed)?;
    let eps = denote_closed(&tm_eps()).map_err(failed)?;
    let stream = sem_to_stream(&apply_sem(&eps, p).map_err(failed)?).map_err(failed)?;
    let bits = stream.prefix(prefix).map_err(failed)?;
    let class = classify_prefix(&bits);
    let point = match class {
        Some(Some(n)) => format!("{}-bar", n),
        Some(None) => format!("infinity (no 1 in the first {} bits)", prefix),
        None => "not monotone".to_string(),
    };
    out.emit(
        &json!({
            "prefix": bits_to_string(&bits),
            "monotone": class.is_some(),
            "first_one": class.flatten(),
        }),
        || format!("{}\u{2026}\n{}", bits_to_string(&bits), point),
    );
    if class.is_none() {
        return Err(failed("selection result is not monotone"));
    }
    Ok(())
}

pub fn modulus(out: &Output, path: &Path, max: u64) -> CliResult {
    let file = load(path)?;
    let (term, _) = main_term(path, &file, Some(&Type::predicate()))?;
    let f = denote_closed(&term).map_err(failed)?;
    let index = agreement_index(&f, max).map_err(failed)?;
    let (found, text) = match index {
        AgreementIndex::Found(n) => (Some(n), format!("agreement at n = {}", n)),
        AgreementIndex::NotFoundUpTo(m) => (None, format!("no agreement up to n = {}", m)),
    };
    out.emit(&json!({ "agreement_index": found, "max": max }), || text);
    Ok(())
}

pub fn kreisel(out: &Output, bound: u64, control: bool) -> CliResult {
    if bound == 0 {
        return Err(input("--bound must be at least 1"));
    }
    let report: CounterexampleReport = if control {
        run_control(bound)
    } else {
        run_counterexample(bound)
    }
    .map_err(failed)?;
    let expected = control;
    let good = report.test_value == expected;
    out.emit(&report, || {
        let b = |v: bool| u8::from(v);
        [
            format!("f(inf)                  = {}", b(report.f_kreisel_at_infinity)),
            format!("f(0-bar)                = {}", b(report.f_kreisel_at_zerobar)),
            format!("eps prefix zero up to   = {}", report.eps_prefix_zero_up_to),
            format!("antecedent              = {}", b(report.antecedent_holds)),
            format!("consequent              = {}", b(report.consequent_holds)),
            format!(
                "test(f)                 = {}",
                out.verdict(&b(report.test_value).to_string(), good)
            ),
        ]
        .join("\n")
    });
    if good {
        Ok(())
    } else {
        Err(failed(format!(
            "test(f) = {}, expected {}",
            u8::from(report.test_value),
            u8::from(expected)
        )))
    }
}

pub fn fuzz(
    out: &Output,
    ty: &str,
    count: usize,
    seed: u64,
    eps_mode: bool,
    max_size: usize,
    prefix: u64,
) -> CliResult {
    let ty = parse_type(ty).map_err(|e| input(format!("--type: {}", e)))?;
    let cfg = GenConfig::new(ty, max_size, seed, count);
    let (failures, samples) = if eps_mode {
        let r = check_eps_oracle(&cfg, prefix).map_err(input)?;
        out.emit(&r, || {
            format!(
                "{} predicates, prefix {}: {} mismatches, {} non-monotone, {} witness violations ({} ms)",
                r.samples,
                r.prefix_len,
                r.mismatches.len(),
                r.non_monotone.len(),
                r.witness_violations.len(),
                r.elapsed_ms
            )
        });
        (r.failures, r.samples)
    } else {
        let r = check_test_constancy(&cfg).map_err(input)?;
        out.emit(&r, || {
            format!(
                "{} functionals: {} with test != 1, max depth {} ({} ms)",
                r.samples,
                r.failures.len(),
                r.max_depth,
                r.elapsed_ms
            )
        });
        (r.failures, r.samples)
    };
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failed(format!(
            "{} of {} samples failed: {:?} (seed {})",
            failures.len(),
            samples,
            failures,
            seed
        )))
    }
}
