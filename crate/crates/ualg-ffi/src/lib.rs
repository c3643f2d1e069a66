//! C ABI for the ualg toolkit.
//!
//! Conventions:
//! - algebras are opaque handles created by [`ualg_algebra_parse_json`] and
//!   released with [`ualg_algebra_free`];
//! - structured inputs and outputs (equations, pairs, certificates, proofs)
//!   travel as JSON strings in the formats the `ualg` CLI uses; returned
//!   strings are owned by the caller and released with [`ualg_string_free`];
//! - every fallible function returns a [`UalgStatus`]; on failure a
//!   per-thread message is available via [`ualg_last_error_message`] until
//!   the next call on the same thread;
//! - panics never cross the boundary (they turn into `UALG_STATUS_PANIC`).
//!
//! Pointer contracts (handles from this library, NUL-terminated strings,
//! writable out-pointers) are stated per function instead of separate
//! `# Safety` sections.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ualg::eqlogic;
use ualg::finalg::{self, FiniteAlgebra};
use ualg::io;
use ualg::quantalg;
use ualg::variety::{self, HspOutcome, SatOutcome};
use ualg::{Error, Limits};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UalgStatus {
    /// Success.
    UalgStatusOk = 0,
    /// Input data could not be parsed or validated.
    UalgStatusMalformed = 1,
    /// A configured size cap would be exceeded.
    UalgStatusSizeLimit = 2,
    /// A required pointer argument was null.
    UalgStatusNullPointer = 3,
    /// A string argument was not valid UTF-8.
    UalgStatusUtf8 = 4,
    /// An internal panic was caught at the boundary.
    UalgStatusPanic = 5,
}

use UalgStatus::*;

/// Opaque handle to a finite algebra.
pub struct UalgAlgebra {
    inner: FiniteAlgebra,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> UalgStatus {
    match err {
        Error::SizeLimitExceeded(_) => UalgStatusSizeLimit,
        _ => UalgStatusMalformed,
    }
}

/// Message for the most recent failure on this thread. Borrowed; valid
/// until the next ualg call on the same thread.
#[no_mangle]
pub extern "C" fn ualg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ualg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn input_str<'a>(ptr: *const c_char) -> Result<&'a str, UalgStatus> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(UalgStatusNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        UalgStatusUtf8
    })
}

fn output_string(value: String, out: *mut *mut c_char) -> Result<(), UalgStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(UalgStatusNullPointer);
    }
    let c = CString::new(value.replace('\0', " ")).unwrap_or_default();
    unsafe {
        *out = c.into_raw();
    }
    Ok(())
}

/// Runs a fallible body with panic containment.
fn guarded(body: impl FnOnce() -> Result<(), UalgStatus>) -> UalgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => UalgStatusOk,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            UalgStatusPanic
        }
    }
}

fn lib_err(e: Error) -> UalgStatus {
    let status = status_of(&e);
    set_error(&e.to_string());
    status
}

// ---------------------------------------------------------------------------
// algebra handles

/// Parses an algebra from its JSON file format into a new handle.
#[no_mangle]
pub unsafe extern "C" fn ualg_algebra_parse_json(
    json: *const c_char,
    out: *mut *mut UalgAlgebra,
) -> UalgStatus {
    guarded(|| {
        let text = input_str(json)?;
        if out.is_null() {
            set_error("null output pointer");
            return Err(UalgStatusNullPointer);
        }
        let algebra = io::parse_algebra(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UalgAlgebra { inner: algebra }));
        Ok(())
    })
}

/// Releases an algebra handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ualg_algebra_free(algebra: *mut UalgAlgebra) {
    if !algebra.is_null() {
        drop(Box::from_raw(algebra));
    }
}

/// Carrier size of the algebra; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ualg_algebra_size(algebra: *const UalgAlgebra) -> usize {
    if algebra.is_null() {
        return 0;
    }
    (*algebra).inner.size()
}

/// Serializes the algebra back to its JSON file format.
#[no_mangle]
pub unsafe extern "C" fn ualg_algebra_to_json(
    algebra: *const UalgAlgebra,
    out_json: *mut *mut c_char,
) -> UalgStatus {
    guarded(|| {
        if algebra.is_null() {
            set_error("null algebra handle");
            return Err(UalgStatusNullPointer);
        }
        let value = io::algebra_to_value(&(*algebra).inner);
        output_string(value.to_string(), out_json)
    })
}

// ---------------------------------------------------------------------------
// operations

/// Does the algebra satisfy the equation (JSON, CLI format)? On a negative
/// answer and a non-null `out_witness_json`, the falsifying assignment is
/// returned as JSON.
#[no_mangle]
pub unsafe extern "C" fn ualg_satisfies_equation(
    algebra: *const UalgAlgebra,
    equation_json: *const c_char,
    out_satisfied: *mut bool,
    out_witness_json: *mut *mut c_char,
) -> UalgStatus {
    guarded(|| {
        if algebra.is_null() || out_satisfied.is_null() {
            set_error("null pointer argument");
            return Err(UalgStatusNullPointer);
        }
        let a = &(*algebra).inner;
        let text = input_str(equation_json)?;
        let eq = io::parse_equation(text, a.signature()).map_err(lib_err)?;
        match variety::satisfies_equation(a, &eq).map_err(lib_err)? {
            SatOutcome::Satisfied => {
                *out_satisfied = true;
            }
            SatOutcome::Falsified(h) => {
                *out_satisfied = false;
                if !out_witness_json.is_null() {
                    let witness = io::assignment_to_value(&eq.vars, &h);
                    output_string(witness.to_string(), out_witness_json)?;
                }
            }
        }
        Ok(())
    })
}

/// Least congruence containing the pairs (`[[a,b],..]` JSON); returns the
/// block structure as JSON.
#[no_mangle]
pub unsafe extern "C" fn ualg_congruence_generated(
    algebra: *const UalgAlgebra,
    pairs_json: *const c_char,
    out_blocks_json: *mut *mut c_char,
) -> UalgStatus {
    guarded(|| {
        if algebra.is_null() {
            set_error("null algebra handle");
            return Err(UalgStatusNullPointer);
        }
        let a = &(*algebra).inner;
        let pairs = io::parse_pairs(input_str(pairs_json)?).map_err(lib_err)?;
        let cong = finalg::congruence_generated(a, &pairs).map_err(lib_err)?;
        output_string(io::congruence_to_value(&cong).to_string(), out_blocks_json)
    })
}

/// Quotient by the least congruence containing the pairs; returns a new
/// algebra handle and, when requested, the JSON certificate with the
/// surjection and blocks.
#[no_mangle]
pub unsafe extern "C" fn ualg_quotient(
    algebra: *const UalgAlgebra,
    pairs_json: *const c_char,
    out_quotient: *mut *mut UalgAlgebra,
    out_certificate_json: *mut *mut c_char,
) -> UalgStatus {
    guarded(|| {
        if algebra.is_null() || out_quotient.is_null() {
            set_error("null pointer argument");
            return Err(UalgStatusNullPointer);
        }
        let a = &(*algebra).inner;
        let pairs = io::parse_pairs(input_str(pairs_json)?).map_err(lib_err)?;
        let cong = finalg::congruence_generated(a, &pairs).map_err(lib_err)?;
        let (q, e) = finalg::quotient(a, &cong).map_err(lib_err)?;
        if !out_certificate_json.is_null() {
            let cert = serde_json::json!({
                "surjection": e.map(),
                "blocks": cong.blocks(),
            });
            output_string(cert.to_string(), out_certificate_json)?;
        }
        *out_quotient = Box::into_raw(Box::new(UalgAlgebra { inner: q }));
        Ok(())
    })
}

/// Is `candidate` in the variety generated by `class_algebra`? The JSON
/// certificate carries the witnessing surjection or the separating identity.
#[no_mangle]
pub unsafe extern "C" fn ualg_hsp_member(
    class_algebra: *const UalgAlgebra,
    candidate: *const UalgAlgebra,
    out_member: *mut bool,
    out_certificate_json: *mut *mut c_char,
) -> UalgStatus {
    guarded(|| {
        if class_algebra.is_null() || candidate.is_null() || out_member.is_null() {
            set_error("null pointer argument");
            return Err(UalgStatusNullPointer);
        }
        let class_algebra = &(*class_algebra).inner;
        let candidate = &(*candidate).inner;
        let limits = Limits::default();
        let outcome = variety::hsp_member(candidate, class_algebra, &limits).map_err(lib_err)?;
        let cert = match &outcome {
            HspOutcome::Member { free, surjection } => serde_json::json!({
                "free_algebra": io::free_algebra_to_value(free),
                "surjection": surjection,
            }),
            HspOutcome::NonMember { equation, witness } => {
                io::term_equation_with_witness_to_value(
                    equation,
                    witness,
                    class_algebra.signature(),
                )
            }
        };
        *out_member = outcome.is_member();
        if !out_certificate_json.is_null() {
            output_string(cert.to_string(), out_certificate_json)?;
        }
        Ok(())
    })
}

/// Bounded proof search from JSON axioms (array of equations) to a JSON
/// goal equation, with the signature inferred from the terms. On success
/// `out_found` tells whether a proof exists within the depth; the proof is
/// returned as JSON.
#[no_mangle]
pub unsafe extern "C" fn ualg_derive(
    axioms_json: *const c_char,
    goal_json: *const c_char,
    depth: usize,
    out_found: *mut bool,
    out_proof_json: *mut *mut c_char,
) -> UalgStatus {
    guarded(|| {
        if out_found.is_null() {
            set_error("null output pointer");
            return Err(UalgStatusNullPointer);
        }
        let (sig, gamma, goal) =
            io::parse_entailment_input(input_str(axioms_json)?, input_str(goal_json)?, &[])
                .map_err(lib_err)?;
        let limits = Limits::default();
        match eqlogic::derive(&sig, &gamma, &goal, depth, &limits).map_err(lib_err)? {
            Some(proof) => {
                *out_found = true;
                if !out_proof_json.is_null() {
                    output_string(io::proof_to_value(&proof, &sig).to_string(), out_proof_json)?;
                }
            }
            None => {
                *out_found = false;
            }
        }
        Ok(())
    })
}

/// Checks a JSON proof tree against JSON axioms (signature inferred from
/// both).
#[no_mangle]
pub unsafe extern "C" fn ualg_check_proof(
    axioms_json: *const c_char,
    proof_json: *const c_char,
    out_valid: *mut bool,
) -> UalgStatus {
    guarded(|| {
        if out_valid.is_null() {
            set_error("null output pointer");
            return Err(UalgStatusNullPointer);
        }
        let proof_text = input_str(proof_json)?;
        let extra = io::infer_signature_with_proof(proof_text, &[]).map_err(lib_err)?;
        let (sig, gamma) =
            io::parse_equations_inferring(input_str(axioms_json)?, &extra).map_err(lib_err)?;
        let proof = io::parse_proof(proof_text, &sig).map_err(lib_err)?;
        *out_valid = eqlogic::check_proof(&sig, &proof, &gamma).map_err(lib_err)?;
        Ok(())
    })
}

/// Outcome of a quantitative entailment check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UalgQuantVerdict {
    UalgQuantProved = 0,
    UalgQuantBound = 1,
    UalgQuantUnknown = 2,
}

/// Quantitative entailment at a depth. `out_json` carries the proof when
/// proved, or the best derived bound as `{"best_epsilon": ..}`.
#[no_mangle]
pub unsafe extern "C" fn ualg_quant_entails(
    axioms_json: *const c_char,
    goal_json: *const c_char,
    depth: usize,
    out_verdict: *mut UalgQuantVerdict,
    out_json: *mut *mut c_char,
) -> UalgStatus {
    guarded(|| {
        if out_verdict.is_null() {
            set_error("null output pointer");
            return Err(UalgStatusNullPointer);
        }
        let (sig, gamma, goal) = io::parse_quant_entailment_input(
            input_str(axioms_json)?,
            input_str(goal_json)?,
            &[],
        )
        .map_err(lib_err)?;
        let limits = Limits::default();
        match quantalg::quant_entails(&sig, &gamma, &goal, depth, &limits).map_err(lib_err)? {
            quantalg::QuantVerdict::Proved(proof) => {
                *out_verdict = UalgQuantVerdict::UalgQuantProved;
                if !out_json.is_null() {
                    output_string(
                        io::quant_proof_to_value(&proof, &sig).to_string(),
                        out_json,
                    )?;
                }
            }
            quantalg::QuantVerdict::BoundWitness(best) => {
                *out_verdict = UalgQuantVerdict::UalgQuantBound;
                if !out_json.is_null() {
                    output_string(
                        serde_json::json!({ "best_epsilon": best }).to_string(),
                        out_json,
                    )?;
                }
            }
            quantalg::QuantVerdict::Unknown => {
                *out_verdict = UalgQuantVerdict::UalgQuantUnknown;
            }
        }
        Ok(())
    })
}
