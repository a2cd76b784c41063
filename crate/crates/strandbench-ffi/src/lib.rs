//! C ABI for the strandbench workbench.
//!
//! Conventions:
//! - Every function returns an [`SbStatus`]; results come back through
//!   out-parameters. `SB_STATUS_OK` means the out-parameters are set.
//! - Strings returned through `*mut *mut c_char` are NUL-terminated,
//!   owned by the caller, and must be released with [`sb_string_free`].
//! - Structured results are JSON documents, so bindings need no knowledge
//!   of internal layouts.
//! - On any failure a thread-local message is set; read it with
//!   [`sb_last_error`]. The pointer stays valid until the next call on
//!   the same thread.
//! - Panics never unwind across the boundary; they surface as
//!   `SB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use strandbench::adleman::{assemble, select_hamiltonian, AssemblyMode, DiGraph, NodeId};
use strandbench::circuit::{compile, parse, CompileOptions, CompiledCircuit};
use strandbench::dsd::{simulate, SimParams, SolutionState};
use strandbench::feasibility::{report, TspQuery};
use strandbench::seq::{design_library, DesignConstraints, Sequence};
use strandbench::tiling::run_xor;

/// Result of every API call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SbStatus {
    /// The call succeeded and all out-parameters are set.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArg = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// A document argument did not parse.
    Parse = 3,
    /// Arguments were readable but violated a precondition.
    Invalid = 4,
    /// The inputs were valid but admit no solution.
    NoSolution = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn fail(status: SbStatus, msg: &str) -> SbStatus {
    set_error(msg);
    status
}

/// The most recent error message on this thread, or NULL when the last
/// call succeeded. Owned by the library; do not free.
#[no_mangle]
pub extern "C" fn sb_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn sb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The library version as a static string. Do not free.
#[no_mangle]
pub extern "C" fn sb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ------------------------------------------------------------- plumbing

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Runs `body` with panics fenced off, storing a message on failure.
fn guarded(body: impl FnOnce() -> Result<(), (SbStatus, String)>) -> SbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SbStatus::Ok,
        Ok(Err((status, msg))) => fail(status, &msg),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unidentified panic".to_string());
            fail(SbStatus::Panic, &msg)
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, (SbStatus, String)> {
    if ptr.is_null() {
        return Err((SbStatus::NullArg, format!("{name} is NULL")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| (SbStatus::Utf8, format!("{name} is not valid UTF-8")))
}

fn write_string(out: *mut *mut c_char, value: String) -> Result<(), (SbStatus, String)> {
    if out.is_null() {
        return Err((SbStatus::NullArg, "out is NULL".to_string()));
    }
    let c =
        CString::new(value).map_err(|_| (SbStatus::Invalid, "result contained NUL".to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn write_json<T: serde::Serialize>(
    out: *mut *mut c_char,
    value: &T,
) -> Result<(), (SbStatus, String)> {
    let text = serde_json::to_string(value)
        .map_err(|e| (SbStatus::Invalid, format!("serialization failed: {e}")))?;
    write_string(out, text)
}

fn parse_bits(s: &str) -> Result<Vec<bool>, (SbStatus, String)> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err((
                SbStatus::Invalid,
                format!("bit strings use only 0 and 1, found {other:?}"),
            )),
        })
        .collect()
}

// ------------------------------------------------------------ sequences

/// Writes the reverse complement of `seq` (ACGT, case-insensitive).
///
/// # Safety
/// `seq`, if non-NULL, must point to a NUL-terminated string; `out`, if
/// non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_reverse_complement(
    seq: *const c_char,
    out: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        let text = read_str(seq, "seq")?;
        let parsed: Sequence = text
            .parse()
            .map_err(|e| (SbStatus::Invalid, format!("{e}")))?;
        write_string(out, parsed.reverse_complement().to_string())
    })
}

/// Writes the Wallace-rule melting temperature of `seq` in Celsius.
///
/// # Safety
/// `seq`, if non-NULL, must point to a NUL-terminated string; `out`, if
/// non-NULL, must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn sb_melting_temp(seq: *const c_char, out: *mut c_double) -> SbStatus {
    guarded(|| {
        let text = read_str(seq, "seq")?;
        if out.is_null() {
            return Err((SbStatus::NullArg, "out is NULL".to_string()));
        }
        let parsed: Sequence = text
            .parse()
            .map_err(|e| (SbStatus::Invalid, format!("{e}")))?;
        *out = parsed.melting_temp();
        Ok(())
    })
}

/// Designs `count` oligos of `length` bases, pairwise at least
/// `min_hamming` apart (also against reverse complements), and writes
/// them as a JSON array of strings. Fails with `SB_STATUS_NO_SOLUTION`
/// when the search budget runs out.
///
/// # Safety
/// `out_json`, if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_design_library(
    length: usize,
    count: usize,
    min_hamming: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        if length == 0 || count == 0 {
            return Err((
                SbStatus::Invalid,
                "length and count must be positive".to_string(),
            ));
        }
        let constraints = DesignConstraints {
            min_hamming,
            ..DesignConstraints::any(length)
        };
        constraints
            .validate()
            .map_err(|e| (SbStatus::Invalid, format!("{e}")))?;
        let library = design_library(&constraints, count, seed)
            .map_err(|e| (SbStatus::NoSolution, format!("{e}")))?;
        write_json(out_json, &library)
    })
}

// ------------------------------------------------------------ pathfinding

/// Solves a Hamiltonian-path instance by exhaustive strand assembly.
/// `graph_json` is `{"nodes":[...],"edges":[[u,v],...]}`; the result is a
/// JSON array of node arrays (empty when no path exists).
///
/// # Safety
/// `graph_json`, if non-NULL, must point to a NUL-terminated string;
/// `out_json`, if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_hamiltonian_solve(
    graph_json: *const c_char,
    start: usize,
    end: usize,
    out_json: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        let text = read_str(graph_json, "graph_json")?;
        let graph: DiGraph = serde_json::from_str(text)
            .map_err(|e| (SbStatus::Parse, format!("graph_json: {e}")))?;
        for (name, node) in [("start", start), ("end", end)] {
            if !graph.contains_node(node as NodeId) {
                return Err((
                    SbStatus::Invalid,
                    format!("{name} node {node} is not in the graph"),
                ));
            }
        }
        let pool = assemble(
            &graph,
            &AssemblyMode::Exhaustive {
                max_nodes: graph.node_count(),
            },
        );
        let paths = select_hamiltonian(&pool, &graph, start, end);
        write_json(out_json, &paths)
    })
}

// ---------------------------------------------------------------- tiling

/// Runs the cumulative-XOR tile computation on `x_bits` (e.g. "10110")
/// with initial parity `y0`, writing the output bits as a string of the
/// same length.
///
/// # Safety
/// `x_bits`, if non-NULL, must point to a NUL-terminated string;
/// `out_bits`, if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_run_xor(
    x_bits: *const c_char,
    y0: c_int,
    out_bits: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        let text = read_str(x_bits, "x_bits")?;
        let x = parse_bits(text)?;
        if x.is_empty() {
            return Err((SbStatus::Invalid, "x_bits is empty".to_string()));
        }
        if !(0..=1).contains(&y0) {
            return Err((SbStatus::Invalid, "y0 must be 0 or 1".to_string()));
        }
        let (y, _) = run_xor(&x, y0 == 1);
        let rendered: String = y.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write_string(out_bits, rendered)
    })
}

// -------------------------------------------------------------- circuits

/// A compiled displacement circuit. Opaque; release with
/// [`sb_circuit_free`].
pub struct SbCircuit {
    compiled: CompiledCircuit,
}

/// Compiles circuit source text. On success `*out` owns the circuit.
///
/// # Safety
/// `source`, if non-NULL, must point to a NUL-terminated string; `out`,
/// if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_circuit_compile(
    source: *const c_char,
    multi_input: c_int,
    dual_rail: c_int,
    out: *mut *mut SbCircuit,
) -> SbStatus {
    guarded(|| {
        let text = read_str(source, "source")?;
        if out.is_null() {
            return Err((SbStatus::NullArg, "out is NULL".to_string()));
        }
        let circuit = parse(text).map_err(|e| (SbStatus::Parse, format!("{e}")))?;
        let options = CompileOptions {
            multi_input: multi_input != 0,
            dual_rail: dual_rail != 0,
        };
        let compiled =
            compile(&circuit, &options).map_err(|e| (SbStatus::Invalid, format!("{e}")))?;
        *out = Box::into_raw(Box::new(SbCircuit { compiled }));
        Ok(())
    })
}

/// Writes the full compiled form (complexes, injections, reporters,
/// statistics) as JSON.
///
/// # Safety
/// `circuit` must be NULL or a live handle from [`sb_circuit_compile`];
/// `out_json`, if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_circuit_json(
    circuit: *const SbCircuit,
    out_json: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        let Some(handle) = circuit.as_ref() else {
            return Err((SbStatus::NullArg, "circuit is NULL".to_string()));
        };
        write_json(out_json, &handle.compiled)
    })
}

/// Simulates the compiled circuit on `assignment` ("101"; one bit per
/// input) and writes `{"outputs":[...],"consistent":...,"quiescent":...,
/// "events":...}` as JSON.
///
/// # Safety
/// `circuit` must be NULL or a live handle from [`sb_circuit_compile`];
/// `assignment`, if non-NULL, must point to a NUL-terminated string;
/// `out_json`, if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_circuit_evaluate(
    circuit: *const SbCircuit,
    assignment: *const c_char,
    seed: u64,
    max_events: u64,
    leak_rate: c_double,
    out_json: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        let Some(handle) = circuit.as_ref() else {
            return Err((SbStatus::NullArg, "circuit is NULL".to_string()));
        };
        let bits = parse_bits(read_str(assignment, "assignment")?)?;
        let params = SimParams {
            seed,
            max_events,
            leak_rate,
        };
        let outcome = handle
            .compiled
            .evaluate(&bits, &params)
            .map_err(|e| (SbStatus::Invalid, format!("{e}")))?;
        write_json(
            out_json,
            &serde_json::json!({
                "outputs": outcome.outputs,
                "consistent": outcome.consistent,
                "quiescent": outcome.report.quiescent,
                "events": outcome.report.trace.len(),
            }),
        )
    })
}

/// Releases a circuit. NULL is ignored.
///
/// # Safety
/// `circuit` must be NULL or a handle from [`sb_circuit_compile`] that
/// has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn sb_circuit_free(circuit: *mut SbCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

// ------------------------------------------------------------ simulation

/// Simulates a solution state given as JSON (`{"free":[...],
/// "complexes":[...],"waste":[...]}`) and writes the final state with
/// trace length and quiescence flag as JSON.
///
/// # Safety
/// `state_json`, if non-NULL, must point to a NUL-terminated string;
/// `out_json`, if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_dsd_simulate(
    state_json: *const c_char,
    seed: u64,
    max_events: u64,
    leak_rate: c_double,
    out_json: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        let text = read_str(state_json, "state_json")?;
        let state: SolutionState = serde_json::from_str(text)
            .map_err(|e| (SbStatus::Parse, format!("state_json: {e}")))?;
        let params = SimParams {
            seed,
            max_events,
            leak_rate,
        };
        let report = simulate(state, &params).map_err(|e| (SbStatus::Invalid, format!("{e}")))?;
        write_json(
            out_json,
            &serde_json::json!({
                "state": report.state,
                "events": report.trace.len(),
                "quiescent": report.quiescent,
            }),
        )
    })
}

// ------------------------------------------------------------ estimates

/// Writes the brute-force feasibility report for an `n`-node instance as
/// JSON (path count, strand length, mass, species count, capacity bound).
///
/// # Safety
/// `out_json`, if non-NULL, must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_feasibility_report(
    n: u64,
    seg_len: u64,
    copies: u64,
    mass_per_bp: c_double,
    out_json: *mut *mut c_char,
) -> SbStatus {
    guarded(|| {
        if n == 0 || seg_len == 0 {
            return Err((
                SbStatus::Invalid,
                "n and seg_len must be positive".to_string(),
            ));
        }
        let query = TspQuery {
            n,
            seg_len,
            copies,
            mass_per_bp,
        };
        write_json(out_json, &report(&query))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = CStr::from_ptr(ptr).to_str().unwrap().to_string();
        sb_string_free(ptr);
        s
    }

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn version_is_static_and_nonempty() {
        let v = unsafe { CStr::from_ptr(sb_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn reverse_complement_round_trips() {
        let input = c("ACGTT");
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_reverse_complement(input.as_ptr(), &mut out) };
        assert_eq!(status, SbStatus::Ok);
        assert_eq!(unsafe { take_string(out) }, "AACGT");
        assert!(sb_last_error().is_null());
    }

    #[test]
    fn invalid_base_reports_invalid() {
        let input = c("ACGX");
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_reverse_complement(input.as_ptr(), &mut out) };
        assert_eq!(status, SbStatus::Invalid);
        let msg = unsafe { CStr::from_ptr(sb_last_error()) };
        assert!(msg.to_str().unwrap().contains('X'));
    }

    #[test]
    fn null_argument_reports_null() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_reverse_complement(std::ptr::null(), &mut out) };
        assert_eq!(status, SbStatus::NullArg);
    }

    #[test]
    fn melting_temp_matches_wallace_rule() {
        let input = c("AATT");
        let mut tm = 0f64;
        let status = unsafe { sb_melting_temp(input.as_ptr(), &mut tm) };
        assert_eq!(status, SbStatus::Ok);
        assert_eq!(tm, 8.0);
    }

    #[test]
    fn design_library_emits_json_array() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_design_library(12, 4, 3, 7, &mut out) };
        assert_eq!(status, SbStatus::Ok);
        let seqs: Vec<String> = serde_json::from_str(&unsafe { take_string(out) }).unwrap();
        assert_eq!(seqs.len(), 4);
        assert!(seqs.iter().all(|s| s.len() == 12));
    }

    #[test]
    fn impossible_design_reports_no_solution() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_design_library(4, 600, 4, 7, &mut out) };
        assert_eq!(status, SbStatus::NoSolution);
    }

    #[test]
    fn hamiltonian_solver_finds_the_unique_path() {
        let graph = c(r#"{"nodes":[0,1,2],"edges":[[0,1],[1,2]]}"#);
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_hamiltonian_solve(graph.as_ptr(), 0, 2, &mut out) };
        assert_eq!(status, SbStatus::Ok);
        let paths: Vec<Vec<usize>> = serde_json::from_str(&unsafe { take_string(out) }).unwrap();
        assert_eq!(paths, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn malformed_graph_reports_parse() {
        let graph = c(r#"{"nodes":[0],"edges":[[0,9]]}"#);
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_hamiltonian_solve(graph.as_ptr(), 0, 0, &mut out) };
        assert_eq!(status, SbStatus::Parse);
    }

    #[test]
    fn xor_matches_prefix_parity() {
        let bits = c("10110");
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_run_xor(bits.as_ptr(), 0, &mut out) };
        assert_eq!(status, SbStatus::Ok);
        assert_eq!(unsafe { take_string(out) }, "11011");
    }

    #[test]
    fn circuit_lifecycle_compile_evaluate_free() {
        let source = c("inputs a b\nw = AND(a, b)\noutputs w\n");
        let mut handle: *mut SbCircuit = std::ptr::null_mut();
        let status = unsafe { sb_circuit_compile(source.as_ptr(), 0, 0, &mut handle) };
        assert_eq!(status, SbStatus::Ok);

        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_circuit_json(handle, &mut out) };
        assert_eq!(status, SbStatus::Ok);
        let compiled: serde_json::Value =
            serde_json::from_str(&unsafe { take_string(out) }).unwrap();
        assert_eq!(compiled["stats"]["gates"], 1);

        for (bits, want) in [("11", true), ("10", false)] {
            let assign = c(bits);
            let mut out: *mut c_char = std::ptr::null_mut();
            let status =
                unsafe { sb_circuit_evaluate(handle, assign.as_ptr(), 3, 1000, 0.0, &mut out) };
            assert_eq!(status, SbStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(&unsafe { take_string(out) }).unwrap();
            assert_eq!(v["outputs"][0], want);
            assert_eq!(v["consistent"], true);
            assert_eq!(v["quiescent"], true);
        }
        unsafe { sb_circuit_free(handle) };
    }

    #[test]
    fn circuit_parse_error_reports_position() {
        let source = c("inputs a\nw = AND(a)\noutputs w\n");
        let mut handle: *mut SbCircuit = std::ptr::null_mut();
        let status = unsafe { sb_circuit_compile(source.as_ptr(), 0, 0, &mut handle) };
        assert_eq!(status, SbStatus::Parse);
        let msg = unsafe { CStr::from_ptr(sb_last_error()) };
        assert!(msg.to_str().unwrap().contains("line 2"));
    }

    #[test]
    fn simulate_accepts_state_documents() {
        let state = c(r#"{"free":[{"strand":[{"id":"a","kind":"t","comp":false},
                 {"id":"a","kind":"m","comp":false}],"count":2}],
                "complexes":[],"waste":[]}"#);
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_dsd_simulate(state.as_ptr(), 0, 100, 0.0, &mut out) };
        assert_eq!(status, SbStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&unsafe { take_string(out) }).unwrap();
        assert_eq!(v["events"], 0);
        assert_eq!(v["quiescent"], true);
    }

    #[test]
    fn feasibility_report_is_json() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_feasibility_report(7, 150, 100, 660.0, &mut out) };
        assert_eq!(status, SbStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&unsafe { take_string(out) }).unwrap();
        assert_eq!(v["paths"], "5040");
        assert_eq!(v["strand_bp"], 1950);
    }

    #[test]
    fn zero_n_reports_invalid() {
        let mut out: *mut c_char = std::ptr::null_mut();
        let status = unsafe { sb_feasibility_report(0, 150, 100, 660.0, &mut out) };
        assert_eq!(status, SbStatus::Invalid);
    }
}
