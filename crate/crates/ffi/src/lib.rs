//! C ABI over `causal-axioms`.
//!
//! Every fallible call returns an `int32_t` status (`CA_OK` on success) and
//! writes results through out-pointers. Handles are opaque and owned by the
//! caller, who releases them with the matching `*_free`. Strings returned
//! through `char **` are released with [`ca_string_free`]. After a failure,
//! [`ca_last_error`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use causal_axioms::axioms::{self, AxiomError, PairScope};
use causal_axioms::derive::{CausalDerivation, DerivationReport, Mode};
use causal_axioms::verify::run_suite;
use causal_axioms::{derive, Bdmg, Criterion, InterventionalFamily, JointTable, NodeSet};

pub const CA_OK: i32 = 0;
pub const CA_ERR_NULL: i32 = 1;
pub const CA_ERR_UTF8: i32 = 2;
pub const CA_ERR_PARSE: i32 = 3;
pub const CA_ERR_INVALID: i32 = 4;
pub const CA_ERR_UNSUPPORTED: i32 = 5;
pub const CA_ERR_PANIC: i32 = 6;

pub const CA_CRITERION_SIGMA: i32 = 0;
pub const CA_CRITERION_M: i32 = 1;
pub const CA_CRITERION_D: i32 = 2;

pub const CA_MODE_ITERATIVE: i32 = 0;
pub const CA_MODE_ANCESTRAL_SHORTCUT: i32 = 1;

pub struct CaGraph(Bdmg);
pub struct CaTable(JointTable);
pub struct CaFamily(InterventionalFamily);
pub struct CaDerivation(CausalDerivation);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(i32, String);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CA_OK
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            CA_ERR_PANIC
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Fail {
    Fail(CA_ERR_INVALID, e.to_string())
}

fn parse_err(e: impl std::fmt::Display) -> Fail {
    Fail(CA_ERR_PARSE, e.to_string())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(CA_ERR_NULL, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(CA_ERR_UTF8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(CA_ERR_NULL, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(CA_ERR_NULL, "null out-pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(CA_ERR_NULL, "null out-pointer".into()));
    }
    *out = CString::new(s).map_err(invalid)?.into_raw();
    Ok(())
}

unsafe fn put_bool(out: *mut bool, v: bool) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(CA_ERR_NULL, "null out-pointer".into()));
    }
    *out = v;
    Ok(())
}

/// Comma separated node labels; an empty string is the empty set.
fn node_set(g: &Bdmg, names: &str) -> Result<NodeSet, Fail> {
    let list: Vec<&str> = names
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    g.node_set(&list).map_err(invalid)
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ca_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_graph_from_json(json: *const c_char, out: *mut *mut CaGraph) -> i32 {
    guard(|| {
        let g = Bdmg::from_json(text(json)?).map_err(parse_err)?;
        put(out, CaGraph(g))
    })
}

/// # Safety
/// `g` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ca_graph_free(g: *mut CaGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_graph_to_json(g: *const CaGraph, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, handle(g)?.0.to_json()))
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_graph_to_dot(g: *const CaGraph, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, handle(g)?.0.to_dot("G")))
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_graph_acyclify(g: *const CaGraph, out: *mut *mut CaGraph) -> i32 {
    guard(|| put(out, CaGraph(handle(g)?.0.acyclify())))
}

/// Writes whether `a` and `b` are separated given `c`. Sets are comma
/// separated labels; `c` may be empty or NULL.
///
/// # Safety
/// `g` must be a live handle, the strings NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_graph_separated(
    g: *const CaGraph,
    criterion: i32,
    a: *const c_char,
    b: *const c_char,
    c: *const c_char,
    out: *mut bool,
) -> i32 {
    guard(|| {
        let g = &handle(g)?.0;
        let criterion = match criterion {
            CA_CRITERION_SIGMA => Criterion::Sigma,
            CA_CRITERION_M => Criterion::M,
            CA_CRITERION_D => Criterion::D,
            other => return Err(invalid(format!("unknown criterion {other}"))),
        };
        let c = if c.is_null() {
            NodeSet::EMPTY
        } else {
            node_set(g, text(c)?)?
        };
        let sep = g
            .separated(node_set(g, text(a)?)?, node_set(g, text(b)?)?, c, criterion)
            .map_err(invalid)?;
        put_bool(out, sep)
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_table_from_json(json: *const c_char, out: *mut *mut CaTable) -> i32 {
    guard(|| {
        let t = JointTable::from_json(text(json)?).map_err(parse_err)?;
        put(out, CaTable(t))
    })
}

/// # Safety
/// `t` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ca_table_free(t: *mut CaTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_table_to_json(t: *const CaTable, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, handle(t)?.0.to_json()))
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_family_from_json(json: *const c_char, out: *mut *mut CaFamily) -> i32 {
    guard(|| {
        let f = InterventionalFamily::from_json(text(json)?).map_err(parse_err)?;
        put(out, CaFamily(f))
    })
}

/// # Safety
/// `f` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ca_family_free(f: *mut CaFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_derive(f: *const CaFamily, mode: i32, out: *mut *mut CaDerivation) -> i32 {
    guard(|| {
        let mode = match mode {
            CA_MODE_ITERATIVE => Mode::Iterative,
            CA_MODE_ANCESTRAL_SHORTCUT => Mode::AncestralShortcut,
            other => return Err(invalid(format!("unknown mode {other}"))),
        };
        let d = derive(&handle(f)?.0, mode).map_err(|e| Fail(CA_ERR_UNSUPPORTED, e.to_string()))?;
        put(out, CaDerivation(d))
    })
}

/// # Safety
/// `d` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ca_derivation_free(d: *mut CaDerivation) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// The causal graph `G` as a new handle.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_derivation_graph(d: *const CaDerivation, out: *mut *mut CaGraph) -> i32 {
    guard(|| put(out, CaGraph(handle(d)?.0.g.clone())))
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_derivation_to_json(d: *const CaDerivation, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, DerivationReport::new(&handle(d)?.0).to_json()))
}

/// Checks one axiom (`A2`, `A3`, `A4`, `A4_identity`, `A5`, `A5_all_pairs` or
/// `compatible`) of `f` against `p`. `report` may be NULL.
///
/// # Safety
/// Handles must be live, `axiom` NUL-terminated and `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_check_axiom(
    f: *const CaFamily,
    p: *const CaTable,
    axiom: *const c_char,
    holds: *mut bool,
    report: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let (fam, p) = (&handle(f)?.0, &handle(p)?.0);
        let r = match text(axiom)? {
            "A2" => axioms::check_observable(fam, p),
            "A3" => axioms::check_strongly_observable(fam, p),
            "A4" => axioms::check_quantifiable(fam, p),
            "A4_identity" => axioms::check_cause_identity(fam, p),
            "A5" => axioms::check_bivariate_quantifiable(fam, p, PairScope::Axiom),
            "A5_all_pairs" => axioms::check_bivariate_quantifiable(fam, p, PairScope::AllPairs),
            "compatible" => axioms::check_compatible(fam, p),
            other => return Err(invalid(format!("unknown axiom `{other}`"))),
        };
        let r = match r {
            Ok(r) => r,
            Err(AxiomError::Incompatible(r)) => *r,
            Err(e) => return Err(Fail(CA_ERR_UNSUPPORTED, e.to_string())),
        };
        put_bool(holds, r.holds)?;
        if !report.is_null() {
            put_string(report, r.to_json())?;
        }
        Ok(())
    })
}

/// Runs a verification suite. `result` may be NULL.
///
/// # Safety
/// `suite` must be NUL-terminated and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn ca_run_suite(
    suite: *const c_char,
    seed: u64,
    budget: u32,
    passed: *mut bool,
    result: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let r = run_suite(text(suite)?, seed, budget as usize).map_err(invalid)?;
        put_bool(passed, r.passed())?;
        if !result.is_null() {
            put_string(result, r.to_json())?;
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ca_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
