//! C ABI over `kout-core`.
//!
//! Parameters and graphs are opaque heap handles created by `*_new` /
//! `*_build` and released by the matching `*_free`. Every fallible call
//! returns a [`KoutStatus`]; on failure a message is available from
//! [`kout_last_error`] on the same thread. Out-pointers are written only on
//! success. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use kout_core::analysis::census;
use kout_core::experiment::{run_with, ExperimentConfig, RunOptions};
use kout_core::oracle::{exact_connectivity, ExactValue};
use kout_core::rng::SeedSpec;
use kout_core::sampler::{build_graph, KOutGraph};
use kout_core::theory;
use kout_core::ModelParams;

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KoutStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    InvalidArgument = 3,
    TooLarge = 4,
    Internal = 5,
}

/// Validated model parameters.
pub struct KoutParams(ModelParams);

/// One sampled graph.
pub struct KoutGraph(KOutGraph);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KoutCensus {
    pub connected: bool,
    pub num_components: usize,
    pub largest_component: usize,
    /// Isolated class-1 mutual pairs.
    pub y_count: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KoutSimulation {
    pub trials: u64,
    pub connected_trials: u64,
    pub p_connected: f64,
    /// 95% Wilson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_y: f64,
    pub p_y_zero: f64,
    pub mean_edges: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KoutExact {
    pub p_connected: f64,
    pub e_y: f64,
    pub p_y_zero: f64,
    pub state_count: u64,
    /// True when the values came from exact rational arithmetic.
    pub rational: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KoutLowerBound {
    pub value: f64,
    pub valid: bool,
    pub nontrivial: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(KoutStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(KoutStatus::NullPointer, format!("{what} is null"))
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KoutStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KoutStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            KoutStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

fn invalid(e: impl ToString) -> Failure {
    Failure(KoutStatus::InvalidParams, e.to_string())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kout_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn kout_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Validates `(n, mu, k)` with `num_classes` entries in each array.
///
/// # Safety
/// `mu` and `k` must point to `num_classes` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn kout_params_new(
    n: u64,
    mu: *const f64,
    k: *const u64,
    num_classes: usize,
    out: *mut *mut KoutParams,
) -> KoutStatus {
    guard(|| {
        if mu.is_null() || k.is_null() {
            return Err(Failure::null("mu or k"));
        }
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let mu = slice::from_raw_parts(mu, num_classes).to_vec();
        let k = slice::from_raw_parts(k, num_classes).to_vec();
        let params = ModelParams::new(n, mu, k).map_err(invalid)?;
        out.write(Box::into_raw(Box::new(KoutParams(params))));
        Ok(())
    })
}

/// # Safety
/// `params` must come from [`kout_params_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kout_params_free(params: *mut KoutParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `params` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn kout_params_n(params: *const KoutParams) -> u64 {
    params.as_ref().map_or(0, |p| p.0.n())
}

/// # Safety
/// `params` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn kout_params_k_avg(params: *const KoutParams) -> f64 {
    params.as_ref().map_or(f64::NAN, |p| p.0.k_avg())
}

fn query<T>(
    params: *const KoutParams,
    out: *mut T,
    f: impl FnOnce(&ModelParams) -> Result<T, Failure>,
) -> KoutStatus {
    guard(|| unsafe {
        let value = f(&deref(params, "params")?.0)?;
        write(out, value, "out")
    })
}

/// Probability that two fixed nodes are adjacent.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_edge_probability(params: *const KoutParams, out: *mut f64) -> KoutStatus {
    query(params, out, |p| Ok(theory::edge_probability(p)))
}

/// `C(mu, K)`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_c_value(params: *const KoutParams, out: *mut f64) -> KoutStatus {
    query(params, out, |p| Ok(theory::c_value(p)))
}

/// Asymptotic connectivity upper bound `1 - C`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_upper_bound(params: *const KoutParams, out: *mut f64) -> KoutStatus {
    query(params, out, |p| Ok(theory::zero_law_upper_bound(p)))
}

/// Union bound on the disconnection probability, clamped to `[0, 1]`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_union_bound(params: *const KoutParams, out: *mut f64) -> KoutStatus {
    query(params, out, |p| Ok(theory::union_bound_disconnect(p).clamped))
}

/// Exact expected number of isolated class-1 pairs.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_expected_isolated_pairs(params: *const KoutParams, out: *mut f64) -> KoutStatus {
    query(params, out, |p| theory::expected_isolated_pairs(p).map_err(invalid))
}

/// `1 - E[Y]^2 / E[Y^2]`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_second_moment_bound(params: *const KoutParams, out: *mut f64) -> KoutStatus {
    query(params, out, |p| theory::second_moment_upper_bound(p).map_err(invalid))
}

/// Explicit one-law lower bound and its validity flags.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_one_law_lower_bound(
    params: *const KoutParams,
    out: *mut KoutLowerBound,
) -> KoutStatus {
    query(params, out, |p| {
        let b = theory::one_law_lower_bound(p).map_err(invalid)?;
        Ok(KoutLowerBound {
            value: b.value,
            valid: b.valid,
            nontrivial: b.nontrivial,
        })
    })
}

/// Smallest `K_r` giving a non-trivial one-law lower bound at `mu_tilde`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_k_star(mu_tilde: f64, out: *mut u64) -> KoutStatus {
    guard(|| {
        let k = theory::k_star(mu_tilde)
            .map_err(|e| Failure(KoutStatus::InvalidArgument, e.to_string()))?;
        write(out, k, "out")
    })
}

/// Full bound report as a JSON string, released with [`kout_string_free`].
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_bounds_json(
    params: *const KoutParams,
    out: *mut *mut c_char,
) -> KoutStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let json = serde_json::to_string(&theory::bound_report(p))
            .map_err(|e| Failure(KoutStatus::Internal, e.to_string()))?;
        let c = CString::new(json).map_err(|e| Failure(KoutStatus::Internal, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kout_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Samples trial `trial_index` of the stream seeded by `master_seed`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_graph_build(
    params: *const KoutParams,
    master_seed: u64,
    trial_index: u64,
    out: *mut *mut KoutGraph,
) -> KoutStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let g = build_graph(p, SeedSpec::new(master_seed, trial_index));
        out.write(Box::into_raw(Box::new(KoutGraph(g))));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from [`kout_graph_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kout_graph_free(graph: *mut KoutGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn kout_graph_num_nodes(graph: *const KoutGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.num_nodes())
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn kout_graph_num_edges(graph: *const KoutGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.num_edges())
}

fn check_node(g: &KOutGraph, node: usize) -> Result<(), Failure> {
    if node < g.num_nodes() {
        Ok(())
    } else {
        Err(Failure(
            KoutStatus::InvalidArgument,
            format!("node {node} out of range for {} nodes", g.num_nodes()),
        ))
    }
}

/// 0-based class of `node`.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_graph_class(
    graph: *const KoutGraph,
    node: usize,
    out: *mut u32,
) -> KoutStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        check_node(g, node)?;
        write(out, g.classes()[node], "out")
    })
}

/// Sorted neighbors of `node`. The array is owned by the graph and valid
/// until it is freed.
///
/// # Safety
/// `graph` must be a live handle; `out` and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_graph_neighbors(
    graph: *const KoutGraph,
    node: usize,
    out: *mut *const u32,
    len: *mut usize,
) -> KoutStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        check_node(g, node)?;
        if out.is_null() || len.is_null() {
            return Err(Failure::null("out or len"));
        }
        let row = g.neighbors(node);
        out.write(row.as_ptr());
        len.write(row.len());
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_graph_census(
    graph: *const KoutGraph,
    out: *mut KoutCensus,
) -> KoutStatus {
    guard(|| {
        let c = census(&deref(graph, "graph")?.0);
        let value = KoutCensus {
            connected: c.connected,
            num_components: c.num_components,
            largest_component: c.component_sizes.first().copied().unwrap_or(0),
            y_count: c.y_count,
        };
        write(out, value, "out")
    })
}

/// Monte Carlo over `trials` graphs. `workers == 0` uses the default pool
/// size; results do not depend on it.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_simulate(
    params: *const KoutParams,
    trials: u64,
    master_seed: u64,
    workers: usize,
    out: *mut KoutSimulation,
) -> KoutStatus {
    guard(|| {
        let p = deref(params, "params")?.0.clone();
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let cfg = ExperimentConfig::single(p, trials, master_seed)
            .map_err(|e| Failure(KoutStatus::InvalidArgument, e.to_string()))?;
        let opts = RunOptions {
            workers: (workers > 0).then_some(workers),
            ..Default::default()
        };
        let r = run_with(&cfg, opts)
            .map_err(|e| Failure(KoutStatus::Internal, e.to_string()))?
            .remove(0);
        out.write(KoutSimulation {
            trials: r.trials,
            connected_trials: r.connected_trials,
            p_connected: r.empirical_p_connected,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            mean_y: r.mean_y,
            p_y_zero: r.empirical_p_y_zero,
            mean_edges: r.mean_edges,
        });
        Ok(())
    })
}

/// Exact probabilities by enumeration; `KOUT_STATUS_TOO_LARGE` when the
/// instance is beyond the enumeration limit.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kout_oracle(params: *const KoutParams, out: *mut KoutExact) -> KoutStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let r = exact_connectivity(p).map_err(|e| Failure(KoutStatus::TooLarge, e.to_string()))?;
        let value = KoutExact {
            p_connected: r.p_connected.to_f64(),
            e_y: r.e_y.to_f64(),
            p_y_zero: r.p_y_zero.to_f64(),
            state_count: r.state_count,
            rational: matches!(r.p_connected, ExactValue::Rational(_)),
        };
        write(out, value, "out")
    })
}

/// Copies the last error into `buf` (nul-terminated, truncated to `cap`) and
/// returns the full message length, or 0 when there is none.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null with `cap == 0`.
#[no_mangle]
pub unsafe extern "C" fn kout_last_error_copy(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        bytes.len()
    })
}
