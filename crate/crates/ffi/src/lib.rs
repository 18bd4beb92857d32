//! C interface to `idjt`.
//!
//! Every fallible call returns an [`IdjtStatus`]; on anything but
//! `IDJT_STATUS_OK` the message is available from [`idjt_last_error`] on the
//! same thread. Handles are opaque and owned by the caller once returned.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use idjt::compiler::{compile, Heuristic};
use idjt::{parse_model, validate, Error, InfluenceDiagram, SolveResult};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdjtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Syntax = 4,
    InvalidModel = 5,
    UnknownVariable = 6,
    InvalidOrder = 7,
    OutOfRange = 8,
    Solver = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdjtHeuristic {
    MinFill = 0,
    MinWeight = 1,
}

/// A parsed and validated model.
pub struct IdjtModel {
    id: InfluenceDiagram,
}

/// A solved model; keeps its own copy of the model.
pub struct IdjtSolution {
    id: InfluenceDiagram,
    result: SolveResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(IdjtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => IdjtStatus::Syntax,
            Error::UnknownVariable(_) => IdjtStatus::UnknownVariable,
            Error::InvalidOrder(_) | Error::DecisionTie(..) => IdjtStatus::InvalidOrder,
            _ => IdjtStatus::Solver,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IdjtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IdjtStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            IdjtStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(IdjtStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IdjtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(IdjtStatus::NullArgument, format!("{what} is null")))
}

fn out<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(IdjtStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn load(source: &str) -> Result<IdjtModel, Failure> {
    let id = parse_model(source)?;
    let violations = validate(&id);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure(IdjtStatus::InvalidModel, lines.join("; ")));
    }
    Ok(IdjtModel { id })
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn idjt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and validates model text.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn idjt_model_parse(
    source: *const c_char,
    out_model: *mut *mut IdjtModel,
) -> IdjtStatus {
    guard(|| {
        out(out_model, "out_model")?;
        let model = load(text(source, "source")?)?;
        *out_model = Box::into_raw(Box::new(model));
        Ok(())
    })
}

/// Reads, parses and validates a model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn idjt_model_load(
    path: *const c_char,
    out_model: *mut *mut IdjtModel,
) -> IdjtStatus {
    guard(|| {
        out(out_model, "out_model")?;
        let path = text(path, "path")?;
        let source = std::fs::read_to_string(path)
            .map_err(|e| Failure(IdjtStatus::Io, format!("cannot read {path}: {e}")))?;
        *out_model = Box::into_raw(Box::new(load(&source)?));
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn idjt_model_free(model: *mut IdjtModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn idjt_model_variable_count(model: *const IdjtModel) -> usize {
    model.as_ref().map_or(0, |m| m.id.variables.len())
}

/// Position of a variable in the canonical order used for assignments.
///
/// # Safety
/// `model` must be a live handle, `name` NUL-terminated, `out_index` writable.
#[no_mangle]
pub unsafe extern "C" fn idjt_model_variable_index(
    model: *const IdjtModel,
    name: *const c_char,
    out_index: *mut usize,
) -> IdjtStatus {
    guard(|| {
        let m = handle(model, "model")?;
        out(out_index, "out_index")?;
        let name = text(name, "name")?;
        let v =
            m.id.id_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        *out_index = v.0;
        Ok(())
    })
}

fn finish_solve(
    m: &IdjtModel,
    heuristic: Heuristic,
    seed: u64,
    out_solution: *mut *mut IdjtSolution,
) -> Result<(), Failure> {
    let compiled = compile(&m.id, &heuristic, seed)?;
    let result = idjt::solve(&m.id, &compiled.tree)?;
    let solution = IdjtSolution {
        id: m.id.clone(),
        result,
    };
    // SAFETY: checked non-null by the callers.
    unsafe { *out_solution = Box::into_raw(Box::new(solution)) };
    Ok(())
}

/// Compiles with a heuristic elimination order and solves.
///
/// # Safety
/// `model` must be a live handle and `out_solution` writable.
#[no_mangle]
pub unsafe extern "C" fn idjt_solve(
    model: *const IdjtModel,
    heuristic: IdjtHeuristic,
    seed: u64,
    out_solution: *mut *mut IdjtSolution,
) -> IdjtStatus {
    guard(|| {
        let m = handle(model, "model")?;
        out(out_solution, "out_solution")?;
        let h = match heuristic {
            IdjtHeuristic::MinFill => Heuristic::MinFill,
            IdjtHeuristic::MinWeight => Heuristic::MinWeight,
        };
        finish_solve(m, h, seed, out_solution)
    })
}

/// Compiles with a comma-separated elimination order, first eliminated first.
///
/// # Safety
/// `model` must be a live handle, `order` NUL-terminated, `out_solution` writable.
#[no_mangle]
pub unsafe extern "C" fn idjt_solve_with_order(
    model: *const IdjtModel,
    order: *const c_char,
    out_solution: *mut *mut IdjtSolution,
) -> IdjtStatus {
    guard(|| {
        let m = handle(model, "model")?;
        out(out_solution, "out_solution")?;
        let seq = text(order, "order")?
            .split(',')
            .map(|n| {
                let n = n.trim();
                m.id.id_of(n)
                    .ok_or_else(|| Error::UnknownVariable(n.into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        finish_solve(m, Heuristic::Given(seq), 0, out_solution)
    })
}

/// # Safety
/// `solution` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn idjt_solution_free(solution: *mut IdjtSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Maximum expected utility, or NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn idjt_solution_meu(solution: *const IdjtSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.result.meu)
}

/// Optimal state of `decision` under a full assignment of state indices, one
/// per variable in canonical order. Entries for variables outside the
/// policy's domain are ignored.
///
/// # Safety
/// `solution` must be a live handle, `decision` NUL-terminated, `assignment`
/// readable for `len` entries and `out_state` writable.
#[no_mangle]
pub unsafe extern "C" fn idjt_solution_policy(
    solution: *const IdjtSolution,
    decision: *const c_char,
    assignment: *const usize,
    len: usize,
    out_state: *mut usize,
) -> IdjtStatus {
    guard(|| {
        let s = handle(solution, "solution")?;
        out(out_state, "out_state")?;
        let name = text(decision, "decision")?;
        let d =
            s.id.id_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let policy = s.result.policy(d).ok_or_else(|| {
            Failure(
                IdjtStatus::UnknownVariable,
                format!("{name} is not a decision"),
            )
        })?;
        let n = s.id.variables.len();
        if len != n {
            return Err(Failure(
                IdjtStatus::OutOfRange,
                format!("assignment has {len} entries, expected {n}"),
            ));
        }
        if assignment.is_null() && n > 0 {
            return Err(Failure(
                IdjtStatus::NullArgument,
                "assignment is null".into(),
            ));
        }
        let full = if n == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(assignment, n)
        };
        for &v in policy.domain() {
            if full[v.0] >= s.id.card(v) {
                return Err(Failure(
                    IdjtStatus::OutOfRange,
                    format!("state {} of {} is out of range", full[v.0], s.id.name(v)),
                ));
            }
        }
        *out_state = policy.choose(full);
        Ok(())
    })
}

/// Names of the variables a decision's policy depends on, space-separated.
/// Free the result with [`idjt_string_free`].
///
/// # Safety
/// `solution` must be a live handle, `decision` NUL-terminated, `out_names` writable.
#[no_mangle]
pub unsafe extern "C" fn idjt_solution_policy_domain(
    solution: *const IdjtSolution,
    decision: *const c_char,
    out_names: *mut *mut c_char,
) -> IdjtStatus {
    guard(|| {
        let s = handle(solution, "solution")?;
        out(out_names, "out_names")?;
        let name = text(decision, "decision")?;
        let d =
            s.id.id_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let policy = s.result.policy(d).ok_or_else(|| {
            Failure(
                IdjtStatus::UnknownVariable,
                format!("{name} is not a decision"),
            )
        })?;
        let names: Vec<&str> = policy.domain().iter().map(|&v| s.id.name(v)).collect();
        let c = CString::new(names.join(" ")).expect("names contain no NUL");
        *out_names = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn idjt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
