//! C ABI over `signsgd_bft`.
//!
//! Every fallible function returns an [`SsbStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be copied out with [`ssb_last_error_message`]. Configs and run results are
//! opaque handles released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use signsgd_bft::bounds::{self, BoundInputs, RateForm};
use signsgd_bft::sim::{self, RunConfig, RunResult};
use signsgd_bft::{majority_vote, Error, SignVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Infeasible = 3,
    DimensionMismatch = 4,
    NonFinite = 5,
    Capability = 6,
    DivisionByZero = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsbRateForm {
    ProofFinal = 0,
    Statement = 1,
}

/// Opaque run configuration.
pub struct SsbConfig {
    inner: RunConfig,
}

/// Opaque result of one simulated run.
pub struct SsbRun {
    inner: RunResult,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SsbStatus {
    match e {
        Error::Input(_) => SsbStatus::InvalidInput,
        Error::DimensionMismatch { .. } => SsbStatus::DimensionMismatch,
        Error::NonFinite { .. } => SsbStatus::NonFinite,
        Error::Capability(_) => SsbStatus::Capability,
        Error::Infeasible { .. } => SsbStatus::Infeasible,
        Error::DivisionByZero(_) => SsbStatus::DivisionByZero,
    }
}

fn fail(status: SsbStatus, msg: impl Into<String>) -> SsbStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), SsbStatus>) -> SsbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SsbStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(SsbStatus::Panic, "internal panic"),
    }
}

fn check<T>(r: signsgd_bft::Result<T>) -> Result<T, SsbStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), SsbStatus> {
    if p.is_null() {
        Err(fail(SsbStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ssb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
#[no_mangle]
pub unsafe extern "C" fn ssb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parse a JSON config. A `provenance` object is ignored; unknown keys fail.
#[no_mangle]
pub unsafe extern "C" fn ssb_config_from_json(json: *const c_char, out: *mut *mut SsbConfig) -> SsbStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(SsbStatus::InvalidInput, "config is not UTF-8"))?;
        let inner = check(signsgd_bft::cli::parse_config(text))?;
        *out = Box::into_raw(Box::new(SsbConfig { inner }));
        Ok(())
    })
}

/// The default toy configuration.
#[no_mangle]
pub unsafe extern "C" fn ssb_config_default(out: *mut *mut SsbConfig) -> SsbStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = Box::into_raw(Box::new(SsbConfig { inner: RunConfig::default() }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ssb_config_set_seed(config: *mut SsbConfig, seed: u64) -> SsbStatus {
    guard(|| {
        non_null(config, "config")?;
        (*config).inner.master_seed = seed;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ssb_config_free(config: *mut SsbConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Simulate the configured run.
#[no_mangle]
pub unsafe extern "C" fn ssb_run(config: *const SsbConfig, out: *mut *mut SsbRun) -> SsbStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        let inner = check(sim::run(&(*config).inner))?;
        *out = Box::into_raw(Box::new(SsbRun { inner }));
        Ok(())
    })
}

/// Number of recorded steps.
#[no_mangle]
pub unsafe extern "C" fn ssb_run_steps(run: *const SsbRun) -> usize {
    if run.is_null() {
        0
    } else {
        (*run).inner.trajectory.len()
    }
}

#[no_mangle]
pub unsafe extern "C" fn ssb_run_final_objective(run: *const SsbRun, out: *mut f64) -> SsbStatus {
    guard(|| {
        non_null(run, "run")?;
        non_null(out, "out")?;
        *out = (*run).inner.final_objective;
        Ok(())
    })
}

/// Copy `f(x_t)` for every step into `buf`, which must hold
/// `ssb_run_steps(run)` values.
#[no_mangle]
pub unsafe extern "C" fn ssb_run_objectives(run: *const SsbRun, buf: *mut f64, len: usize) -> SsbStatus {
    guard(|| {
        non_null(run, "run")?;
        non_null(buf, "buf")?;
        let traj = &(*run).inner.trajectory;
        if len < traj.len() {
            return Err(fail(SsbStatus::BufferTooSmall, format!("need {} values, got {len}", traj.len())));
        }
        for (i, r) in traj.iter().enumerate() {
            *buf.add(i) = r.objective;
        }
        Ok(())
    })
}

/// Copy the per-step flipped-coordinate counts into `buf`.
#[no_mangle]
pub unsafe extern "C" fn ssb_run_flipped_coords(run: *const SsbRun, buf: *mut u64, len: usize) -> SsbStatus {
    guard(|| {
        non_null(run, "run")?;
        non_null(buf, "buf")?;
        let traj = &(*run).inner.trajectory;
        if len < traj.len() {
            return Err(fail(SsbStatus::BufferTooSmall, format!("need {} values, got {len}", traj.len())));
        }
        for (i, r) in traj.iter().enumerate() {
            *buf.add(i) = r.flipped_coords as u64;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ssb_run_free(run: *mut SsbRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Majority vote over `workers` row-major sign vectors of length `dim`,
/// entries in {-1, 0, 1}. Writes `dim` signs to `out`.
#[no_mangle]
pub unsafe extern "C" fn ssb_majority_vote(votes: *const i8, workers: usize, dim: usize, out: *mut i8) -> SsbStatus {
    guard(|| {
        non_null(votes, "votes")?;
        non_null(out, "out")?;
        if workers == 0 || dim == 0 {
            return Err(fail(SsbStatus::InvalidInput, "workers and dim must be >= 1"));
        }
        let all = std::slice::from_raw_parts(votes, workers * dim);
        let rows = all.chunks(dim).map(SignVector::from_i8).collect::<signsgd_bft::Result<Vec<_>>>();
        let rows = check(rows)?;
        let (_, aggregate) = check(majority_vote(&rows))?;
        ptr::copy_nonoverlapping(aggregate.to_i8().as_ptr(), out, dim);
        Ok(())
    })
}

unsafe fn write_f64(out: *mut f64, r: signsgd_bft::Result<f64>) -> SsbStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(r)?;
        Ok(())
    })
}

/// Upper bound on the wrong-sign probability at SNR `s`.
#[no_mangle]
pub unsafe extern "C" fn ssb_lemma1_bound(s: f64, out: *mut f64) -> SsbStatus {
    write_f64(out, bounds::lemma1_bound(s))
}

/// `1 - 1/(2p)`.
#[no_mangle]
pub unsafe extern "C" fn ssb_alpha_threshold(p: f64, out: *mut f64) -> SsbStatus {
    write_f64(out, bounds::alpha_threshold(p))
}

/// Raw (unclamped) vote-failure bound.
#[no_mangle]
pub unsafe extern "C" fn ssb_vote_failure_bound(q: u64, alpha: f64, p: f64, out: *mut f64) -> SsbStatus {
    write_f64(out, bounds::vote_failure_bound(q, alpha, p))
}

/// Exact vote-failure probability with `b` omniscient adversaries.
#[no_mangle]
pub unsafe extern "C" fn ssb_exact_vote_failure(q: u64, b: u64, p: f64, out: *mut f64) -> SsbStatus {
    let r = if b > q || !(0.0..=1.0).contains(&p) {
        Err(Error::Input(format!("need b <= q and p in [0, 1], got b={b} q={q} p={p}")))
    } else {
        Ok(bounds::exact_vote_failure(q, b, p))
    };
    write_f64(out, r)
}

#[no_mangle]
pub unsafe extern "C" fn ssb_tolerable_byzantine_count(q: u64, p: f64, out: *mut u64) -> SsbStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(bounds::tolerable_byzantine_count(q, p))?;
        Ok(())
    })
}

/// Right-hand side of the convergence rate.
#[no_mangle]
pub unsafe extern "C" fn ssb_convergence_rate_rhs(
    q: u64,
    alpha: f64,
    p: f64,
    sigma_l1: f64,
    smoothness_l1: f64,
    f0_minus_fstar: f64,
    k_iters: u64,
    form: SsbRateForm,
    out: *mut f64,
) -> SsbStatus {
    let inputs = BoundInputs { q, alpha, p, s: None, sigma_l1, smoothness_l1, f0_minus_fstar, k_iters };
    let form = match form {
        SsbRateForm::ProofFinal => RateForm::ProofFinal,
        SsbRateForm::Statement => RateForm::Statement,
    };
    write_f64(out, bounds::convergence_rate_rhs(&inputs, form))
}
