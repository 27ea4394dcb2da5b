// SPDX-License-Identifier: MIT OR Apache-2.0

//! C interface to `twospaces`.
//!
//! Objects cross the boundary as opaque pointers written to an out-parameter
//! (for example by `ts_word_parse` or `ts_group_named`) and released by the
//! matching `ts_*_free`. Every fallible call returns
//! a [`TsStatus`]; on failure [`ts_last_error`] describes what went wrong on
//! the calling thread. Strings returned by the library are released with
//! [`ts_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twospaces::abelian::{quotient_invariants, Lattice};
use twospaces::marked::{kernel_of_marking, Assignment, MarkedGroup};
use twospaces::oracles::{named, GroupOracle};
use twospaces::transfer::{dm_check, f_map, phi, sigma_kernel, DmOutcome, TransferError};
use twospaces::words::{enumerate, Enumeration, Word};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    /// The call succeeded and the answer is "no".
    False = 1,
    InvalidArgument = 2,
    BudgetExhausted = 3,
    OracleFailure = 4,
    Panic = 5,
}

pub struct TsWord(Word);
pub struct TsGroup(GroupOracle);
pub struct TsMarked(MarkedGroup);
pub struct TsLattice(Lattice);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

struct Fail(TsStatus, String);

impl Fail {
    fn arg(msg: impl Into<String>) -> Fail {
        Fail(TsStatus::InvalidArgument, msg.into())
    }
}

/// Run `body`, recording failures and converting panics.
fn guard(body: impl FnOnce() -> Result<TsStatus, Fail>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            TsStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::arg("null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::arg("string is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::arg("null handle"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<TsStatus, Fail> {
    if out.is_null() {
        return Err(Fail::arg("null output pointer"));
    }
    out.write(value);
    Ok(TsStatus::Ok)
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<TsStatus, Fail> {
    if out.is_null() {
        return Err(Fail::arg("null output pointer"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(TsStatus::Ok)
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn transfer_fail(e: TransferError) -> Fail {
    match e {
        TransferError::BudgetExhausted(m) => Fail(TsStatus::BudgetExhausted, m),
        other => Fail(TsStatus::OracleFailure, other.to_string()),
    }
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// --- words ------------------------------------------------------------------

/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_word_parse(text: *const c_char, out: *mut *mut TsWord) -> TsStatus {
    guard(|| {
        let w: Word = c_str(text)?.parse().map_err(|e| Fail::arg(format!("{e}")))?;
        put_box(out, TsWord(w))
    })
}

/// The `k`-th word of the canonical enumeration.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_word_enumerate(k: u64, out: *mut *mut TsWord) -> TsStatus {
    guard(|| put_box(out, TsWord(enumerate(k))))
}

/// # Safety
/// `w` must be a live word handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_word_index(w: *const TsWord, out: *mut u64) -> TsStatus {
    guard(|| {
        let k = Enumeration::FULL
            .try_index(&handle(w)?.0)
            .ok_or_else(|| Fail::arg("index exceeds 64 bits"))?;
        put(out, k)
    })
}

/// # Safety
/// `a`, `b` must be live word handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_word_mul(a: *const TsWord, b: *const TsWord, out: *mut *mut TsWord) -> TsStatus {
    guard(|| put_box(out, TsWord(handle(a)?.0.mul(&handle(b)?.0))))
}

/// # Safety
/// `w` must be a live word handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_word_inverse(w: *const TsWord, out: *mut *mut TsWord) -> TsStatus {
    guard(|| put_box(out, TsWord(handle(w)?.0.inv())))
}

/// Text form of a word; release with [`ts_string_free`]. NULL on a null handle.
///
/// # Safety
/// `w` must be a live word handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ts_word_to_string(w: *const TsWord) -> *mut c_char {
    w.as_ref().map_or(ptr::null_mut(), |w| owned_string(w.0.to_string()))
}

/// # Safety
/// `w` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_word_free(w: *mut TsWord) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

// --- groups -----------------------------------------------------------------

/// A named group such as `Z^2` or `Prod(Cyclic(2),Z)`.
///
/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_group_named(spec: *const c_char, out: *mut *mut TsGroup) -> TsStatus {
    guard(|| {
        let g = named(c_str(spec)?).map_err(|e| Fail::arg(e.to_string()))?;
        put_box(out, TsGroup(g))
    })
}

/// # Safety
/// `g` must be a live group handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_group_mul(g: *const TsGroup, a: u64, b: u64, out: *mut u64) -> TsStatus {
    guard(|| put(out, handle(g)?.0.mul(a, b)))
}

/// # Safety
/// `g` must be a live group handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_group_identity(g: *const TsGroup, out: *mut u64) -> TsStatus {
    guard(|| {
        let e = handle(g)?
            .0
            .identity()
            .map_err(|e| Fail(TsStatus::OracleFailure, e.to_string()))?;
        put(out, e)
    })
}

/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_group_free(g: *mut TsGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

// --- marked groups ----------------------------------------------------------

/// Kernel of the marking described by `assignment` (e.g. `0,1;pair-row(2)`).
///
/// # Safety
/// `g` must be a live group handle; `assignment` a nul-terminated string;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_marked_kernel(
    g: *const TsGroup,
    assignment: *const c_char,
    out: *mut *mut TsMarked,
) -> TsStatus {
    guard(|| {
        let a: Assignment = c_str(assignment)?.parse().map_err(|e| Fail::arg(format!("{e}")))?;
        put_box(out, TsMarked(kernel_of_marking(&handle(g)?.0, &a)))
    })
}

/// `Φ(G)`.
///
/// # Safety
/// `g` must be a live group handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_marked_phi(g: *const TsGroup, out: *mut *mut TsMarked) -> TsStatus {
    guard(|| put_box(out, TsMarked(phi(&handle(g)?.0))))
}

/// `ker σ_G`.
///
/// # Safety
/// `g` must be a live group handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_marked_sigma(g: *const TsGroup, out: *mut *mut TsMarked) -> TsStatus {
    guard(|| put_box(out, TsMarked(sigma_kernel(&handle(g)?.0))))
}

/// `Ψ(L)`.
///
/// # Safety
/// `l` must be a live lattice handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_marked_psi(l: *const TsLattice, out: *mut *mut TsMarked) -> TsStatus {
    guard(|| put_box(out, TsMarked(MarkedGroup::abelian_preimage(handle(l)?.0.clone()))))
}

/// `Ok` if `w ∈ N`, `False` if not.
///
/// # Safety
/// `n` and `w` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn ts_marked_contains(n: *const TsMarked, w: *const TsWord) -> TsStatus {
    guard(|| {
        let holds = handle(n)?
            .0
            .try_contains(&handle(w)?.0)
            .map_err(|e| Fail(TsStatus::OracleFailure, e.to_string()))?;
        Ok(if holds { TsStatus::Ok } else { TsStatus::False })
    })
}

/// `f(N)(a, b)` with at most `budget` generator probes.
///
/// # Safety
/// `n` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_f_mul(n: *const TsMarked, a: u64, b: u64, budget: u64, out: *mut u64) -> TsStatus {
    guard(|| {
        let c = f_map(&handle(n)?.0, budget).try_mul(a, b).map_err(transfer_fail)?;
        put(out, c)
    })
}

/// `Ok` for true, `False` for false, `BudgetExhausted` for unknown.
///
/// # Safety
/// `n` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_dm_check(n: *const TsMarked, m: u64, budget: u64) -> TsStatus {
    guard(|| {
        if m == 0 {
            return Err(Fail::arg("m must be at least 1"));
        }
        Ok(match dm_check(&handle(n)?.0, m, budget) {
            DmOutcome::True => TsStatus::Ok,
            DmOutcome::False => TsStatus::False,
            DmOutcome::Unknown => TsStatus::BudgetExhausted,
        })
    })
}

/// # Safety
/// `n` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_marked_free(n: *mut TsMarked) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

// --- lattices ---------------------------------------------------------------

/// Row span of a row-major `rows × ambient` matrix.
///
/// # Safety
/// `entries` must point to `rows * ambient` readable values (or be NULL when
/// that product is 0); `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ts_lattice_from_rows(
    ambient: usize,
    entries: *const i64,
    rows: usize,
    out: *mut *mut TsLattice,
) -> TsStatus {
    guard(|| {
        let len = rows.checked_mul(ambient).ok_or_else(|| Fail::arg("matrix too large"))?;
        let flat: &[i64] = if len == 0 {
            &[]
        } else if entries.is_null() {
            return Err(Fail::arg("null matrix"));
        } else {
            std::slice::from_raw_parts(entries, len)
        };
        let matrix: Vec<Vec<i64>> = flat.chunks(ambient.max(1)).map(<[i64]>::to_vec).collect();
        put_box(out, TsLattice(Lattice::from_i64(ambient, &matrix)))
    })
}

/// `Ok` if the vector lies in the lattice, `False` otherwise.
///
/// # Safety
/// `l` must be live; `v` must point to `len` readable values (or be NULL when
/// `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn ts_lattice_contains(l: *const TsLattice, v: *const i64, len: usize) -> TsStatus {
    guard(|| {
        let l = handle(l)?;
        let v: &[i64] = if len == 0 {
            &[]
        } else if v.is_null() {
            return Err(Fail::arg("null vector"));
        } else {
            std::slice::from_raw_parts(v, len)
        };
        Ok(if l.0.contains_i64(v) {
            TsStatus::Ok
        } else {
            TsStatus::False
        })
    })
}

/// Invariants of `ℤⁿ / L` as text, e.g. `rank 1 torsion (2)`; release with
/// [`ts_string_free`].
///
/// # Safety
/// `l` must be a live lattice handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ts_lattice_invariants(l: *const TsLattice) -> *mut c_char {
    l.as_ref()
        .map_or(ptr::null_mut(), |l| owned_string(quotient_invariants(&l.0).to_string()))
}

/// # Safety
/// `l` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_lattice_free(l: *mut TsLattice) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}
