//! C ABI for `esr-core`.
//!
//! Environments and learners are exposed as opaque handles created by
//! `esr_*_new`/`esr_environment_*` constructors and released with the matching
//! `*_free` function. Every fallible call returns an [`EsrStatus`]; on failure
//! a description is available from [`esr_last_error_message`] on the same
//! thread. Set-valued results are written into caller buffers: the required
//! length is always stored in `out_len`, and `ESR_STATUS_BUFFER_TOO_SMALL` is
//! returned when `capacity` is short.
//!
//! The header `include/esr_ffi.h` is regenerated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use esr_core::dominance::{esr_set, Criterion};
use esr_core::environment::{load_environment, preset};
use esr_core::evaluation::coverage_ratio;
use esr_core::motdrl::LearnerState;
use esr_core::rng::RunStreams;
use esr_core::{EnvironmentSpec, Error, RewardVector};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidEnvironment = 3,
    EmptyDistribution = 4,
    OutOfRange = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Dominance criterion selector: 0 = CDF, 1 = PDF.
pub const ESR_CRITERION_CDF: u32 = 0;
pub const ESR_CRITERION_PDF: u32 = 1;

/// Opaque environment handle.
pub struct EsrEnvironment {
    inner: EnvironmentSpec,
}

/// Opaque learner handle; owns a copy of its environment and its random streams.
pub struct EsrLearner {
    env: EnvironmentSpec,
    state: LearnerState,
    streams: RunStreams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EsrStatus {
    match e {
        Error::EmptyDistribution => EsrStatus::EmptyDistribution,
        Error::OutOfRange { .. } | Error::Quantization { .. } | Error::InvalidArm { .. } => {
            EsrStatus::OutOfRange
        }
        Error::ProbabilitySum { .. }
        | Error::Outcome { .. }
        | Error::DuplicateArmName { .. }
        | Error::UnknownArm(_)
        | Error::EsrSetMismatch { .. }
        | Error::UnknownPreset(_)
        | Error::Parse(_)
        | Error::InvalidLattice(_) => EsrStatus::InvalidEnvironment,
        Error::Io(_) => EsrStatus::Internal,
        _ => EsrStatus::InvalidArgument,
    }
}

fn fail(status: EsrStatus, msg: impl Into<String>) -> EsrStatus {
    set_last_error(msg.into());
    status
}

// Runs `f`, mapping library errors and panics onto status codes.
fn guard(f: impl FnOnce() -> Result<(), EsrStatus>) -> EsrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EsrStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(EsrStatus::Internal, "panic inside esr-ffi"),
    }
}

fn lib_err(e: Error) -> EsrStatus {
    let status = status_of(&e);
    fail(status, e.to_string())
}

fn criterion_of(c: u32) -> Result<Criterion, EsrStatus> {
    match c {
        ESR_CRITERION_CDF => Ok(Criterion::Cdf),
        ESR_CRITERION_PDF => Ok(Criterion::Pdf),
        other => Err(fail(
            EsrStatus::InvalidArgument,
            format!("unknown criterion {other}"),
        )),
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, EsrStatus> {
    if s.is_null() {
        return Err(fail(EsrStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(EsrStatus::InvalidArgument, "string is not valid UTF-8"))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, EsrStatus> {
    p.as_ref()
        .ok_or_else(|| fail(EsrStatus::NullPointer, "null handle"))
}

unsafe fn mut_arg<'a, T>(p: *mut T) -> Result<&'a mut T, EsrStatus> {
    p.as_mut()
        .ok_or_else(|| fail(EsrStatus::NullPointer, "null handle"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), EsrStatus> {
    if out.is_null() {
        return Err(fail(EsrStatus::NullPointer, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_indices(
    indices: &[usize],
    out: *mut usize,
    capacity: usize,
    out_len: *mut usize,
) -> Result<(), EsrStatus> {
    write_out(out_len, indices.len())?;
    if indices.len() > capacity {
        return Err(fail(
            EsrStatus::BufferTooSmall,
            format!("need {} slots, capacity {capacity}", indices.len()),
        ));
    }
    if !indices.is_empty() {
        if out.is_null() {
            return Err(fail(EsrStatus::NullPointer, "null output buffer"));
        }
        ptr::copy_nonoverlapping(indices.as_ptr(), out, indices.len());
    }
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, or 0 if none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn esr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates one of the built-in environments (`momab5`, `vrs`, `lottery12`, `lottery34`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esr_environment_preset(
    name: *const c_char,
    out: *mut *mut EsrEnvironment,
) -> EsrStatus {
    guard(|| {
        let env = preset(str_arg(name)?).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(EsrEnvironment { inner: env })))
    })
}

/// Parses and validates a JSON environment document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esr_environment_from_json(
    json: *const c_char,
    out: *mut *mut EsrEnvironment,
) -> EsrStatus {
    guard(|| {
        let env = load_environment(str_arg(json)?).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(EsrEnvironment { inner: env })))
    })
}

/// # Safety
/// `env` must be null or a handle from an `esr_environment_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn esr_environment_free(env: *mut EsrEnvironment) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Number of arms, or 0 for a null handle.
///
/// # Safety
/// `env` must be null or a live environment handle.
#[no_mangle]
pub unsafe extern "C" fn esr_environment_arm_count(env: *const EsrEnvironment) -> usize {
    env.as_ref().map_or(0, |e| e.inner.arm_count())
}

/// Number of objectives, or 0 for a null handle.
///
/// # Safety
/// `env` must be null or a live environment handle.
#[no_mangle]
pub unsafe extern "C" fn esr_environment_objectives(env: *const EsrEnvironment) -> usize {
    env.as_ref().map_or(0, |e| e.inner.dims())
}

/// ESR set of the exact arm distributions.
///
/// # Safety
/// `env` must be a live handle; `out` must hold `capacity` entries; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esr_environment_esr_set(
    env: *const EsrEnvironment,
    criterion: u32,
    out: *mut usize,
    capacity: usize,
    out_len: *mut usize,
) -> EsrStatus {
    guard(|| {
        let env = ref_arg(env)?;
        let dists = env.inner.exact_distributions().map_err(lib_err)?;
        let set = esr_set(&dists, criterion_of(criterion)?).map_err(lib_err)?;
        write_indices(&set, out, capacity, out_len)
    })
}

/// Creates a learner on a copy of `env` and pulls every arm `beta` times.
///
/// # Safety
/// `env` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_new(
    env: *const EsrEnvironment,
    beta: u64,
    criterion: u32,
    seed: u64,
    out: *mut *mut EsrLearner,
) -> EsrStatus {
    guard(|| {
        let env = ref_arg(env)?.inner.clone();
        let criterion = criterion_of(criterion)?;
        let mut streams = RunStreams::new(seed, env.arm_count());
        let state =
            LearnerState::initialize(&env, beta, criterion, &mut streams).map_err(lib_err)?;
        write_out(
            out,
            Box::into_raw(Box::new(EsrLearner {
                env,
                state,
                streams,
            })),
        )
    })
}

/// # Safety
/// `learner` must be null or a handle from [`esr_learner_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_free(learner: *mut EsrLearner) {
    if !learner.is_null() {
        drop(Box::from_raw(learner));
    }
}

/// One learning step. The pulled arm is written to `out_arm` when non-null.
///
/// # Safety
/// `learner` must be a live handle; `out_arm` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_step(
    learner: *mut EsrLearner,
    out_arm: *mut usize,
) -> EsrStatus {
    guard(|| {
        let l = mut_arg(learner)?;
        let arm = l.state.step(&l.env, &mut l.streams).map_err(lib_err)?;
        if !out_arm.is_null() {
            out_arm.write(arm);
        }
        Ok(())
    })
}

/// Runs `episodes` learning steps.
///
/// # Safety
/// `learner` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_run(learner: *mut EsrLearner, episodes: u64) -> EsrStatus {
    guard(|| {
        let l = mut_arg(learner)?;
        for _ in 0..episodes {
            l.state.step(&l.env, &mut l.streams).map_err(lib_err)?;
        }
        Ok(())
    })
}

/// Total pulls so far, or 0 for a null handle.
///
/// # Safety
/// `learner` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_total_pulls(learner: *const EsrLearner) -> u64 {
    learner.as_ref().map_or(0, |l| l.state.total_pulls())
}

/// Pull count of one arm.
///
/// # Safety
/// `learner` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_arm_pulls(
    learner: *const EsrLearner,
    arm: usize,
    out: *mut u64,
) -> EsrStatus {
    guard(|| {
        let l = ref_arg(learner)?;
        let t = l.state.tables().get(arm).ok_or_else(|| {
            lib_err(Error::InvalidArm {
                index: arm,
                len: l.state.tables().len(),
            })
        })?;
        write_out(out, t.pulls())
    })
}

/// Current UCB1 exploration bonus of one arm.
///
/// # Safety
/// `learner` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_ucb_bonus(
    learner: *const EsrLearner,
    arm: usize,
    out: *mut f64,
) -> EsrStatus {
    guard(|| {
        let l = ref_arg(learner)?;
        write_out(out, l.state.ucb_bonus(arm).map_err(lib_err)?)
    })
}

/// Current ESR set, with (`with_bonus != 0`) or without exploration bonuses.
///
/// # Safety
/// `learner` must be a live handle; `out` must hold `capacity` entries; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_esr_set(
    learner: *const EsrLearner,
    with_bonus: i32,
    out: *mut usize,
    capacity: usize,
    out_len: *mut usize,
) -> EsrStatus {
    guard(|| {
        let l = ref_arg(learner)?;
        let set = l.state.current_esr_set(with_bonus != 0).map_err(lib_err)?;
        write_indices(&set, out, capacity, out_len)
    })
}

unsafe fn point_arg(point: *const f64, dims: usize) -> Result<RewardVector, EsrStatus> {
    if point.is_null() {
        return Err(fail(EsrStatus::NullPointer, "null point"));
    }
    Ok(RewardVector(
        std::slice::from_raw_parts(point, dims).to_vec(),
    ))
}

/// Empirical probability of `point` (length `dims`) for one arm.
///
/// # Safety
/// `learner` must be a live handle; `point` must hold `dims` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_pdf(
    learner: *const EsrLearner,
    arm: usize,
    point: *const f64,
    dims: usize,
    out: *mut f64,
) -> EsrStatus {
    guard(|| {
        let l = ref_arg(learner)?;
        let p = point_arg(point, dims)?;
        let t = l.state.tables().get(arm).ok_or_else(|| {
            lib_err(Error::InvalidArm {
                index: arm,
                len: l.state.tables().len(),
            })
        })?;
        write_out(out, t.pdf(&p).map_err(lib_err)?)
    })
}

/// Empirical joint CDF at `point` (length `dims`) for one arm.
///
/// # Safety
/// `learner` must be a live handle; `point` must hold `dims` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_cdf(
    learner: *const EsrLearner,
    arm: usize,
    point: *const f64,
    dims: usize,
    out: *mut f64,
) -> EsrStatus {
    guard(|| {
        let l = ref_arg(learner)?;
        let p = point_arg(point, dims)?;
        let t = l.state.tables().get(arm).ok_or_else(|| {
            lib_err(Error::InvalidArm {
                index: arm,
                len: l.state.tables().len(),
            })
        })?;
        write_out(out, t.cdf(&p).map_err(lib_err)?)
    })
}

/// F1 coverage ratio of the learner's bonus-free ESR set against the
/// environment's ground-truth ESR set.
///
/// # Safety
/// `learner` must be a live handle; `out_f1` must be valid.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_coverage_f1(
    learner: *const EsrLearner,
    epsilon: f64,
    out_f1: *mut f64,
) -> EsrStatus {
    guard(|| {
        let l = ref_arg(learner)?;
        let truth: Vec<_> = l
            .env
            .ground_truth_esr_set()
            .and_then(|s| s.iter().map(|&i| l.env.exact_distribution(i)).collect())
            .map_err(lib_err)?;
        let dists = l.state.distributions().map_err(lib_err)?;
        let found: Vec<_> = l
            .state
            .current_esr_set(false)
            .map_err(lib_err)?
            .into_iter()
            .map(|i| dists[i].clone())
            .collect();
        let cov = coverage_ratio(&found, &truth, epsilon).map_err(lib_err)?;
        write_out(out_f1, cov.f1)
    })
}

/// JSON document of one arm's Z-table. Release with [`esr_string_free`].
/// Returns null on error.
///
/// # Safety
/// `learner` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn esr_learner_table_json(
    learner: *const EsrLearner,
    arm: usize,
) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        let l = ref_arg(learner)?;
        let t = l.state.tables().get(arm).ok_or_else(|| {
            lib_err(Error::InvalidArm {
                index: arm,
                len: l.state.tables().len(),
            })
        })?;
        let text = t.to_json().map_err(lib_err)?;
        result = CString::new(text)
            .map_err(|_| fail(EsrStatus::Internal, "interior NUL in JSON"))?
            .into_raw();
        Ok(())
    });
    result
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn esr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
