//! C ABI over the qosroute library.
//!
//! Objects cross the boundary as opaque handles created by a `*_load`,
//! `*_from_*` or `*_run` call and released by the matching `*_free`. Every
//! fallible call returns a [`QrStatus`]; on failure a description is kept per
//! thread and can be read with [`qr_last_error_message`]. Output parameters
//! are written only on success.
//!
//! Handles are not thread-safe to mutate, but graphs, path sets, scenarios
//! and runs are immutable once created and may be read from several threads.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qosroute::policy::{koqra_distribution, kspqr_distribution, PathStats, QueueSnapshot};
use qosroute::scenario::{emit_csv, PreparedScenario, RunRecord, ScenarioConfig};
use qosroute::{k_shortest_paths, load_topology, validate_graph, CandidateSet, CostCoefficients, Graph, NodeId, PolicyKind};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed topology or scenario text.
    Parse = 3,
    InvalidArgument = 4,
    /// Index past the end of a handle's contents.
    OutOfRange = 5,
    Io = 6,
    Simulation = 7,
    /// The buffer passed in is too small; the needed length was written.
    BufferTooSmall = 8,
    /// A Rust panic was caught at the boundary.
    Internal = 9,
}

/// Routing policy selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrPolicy {
    Spf = 0,
    Somr = 1,
    Kspqr = 2,
    Koqra = 3,
}

impl From<QrPolicy> for PolicyKind {
    fn from(p: QrPolicy) -> Self {
        match p {
            QrPolicy::Spf => PolicyKind::Spf,
            QrPolicy::Somr => PolicyKind::Somr,
            QrPolicy::Kspqr => PolicyKind::Kspqr,
            QrPolicy::Koqra => PolicyKind::Koqra,
        }
    }
}

/// One metrics window of a run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrWindow {
    pub start_s: f64,
    pub end_s: f64,
    /// NaN when no data packet was delivered in the window.
    pub mean_delay_s: f64,
    pub delivered: u64,
    pub dropped: u64,
    pub control_bits: u64,
}

/// Network topology.
pub struct QrGraph(Graph);

/// Candidate paths for one source and destination, cheapest first.
pub struct QrPaths(CandidateSet);

/// Scenario file with its topology loaded and candidates precomputed.
pub struct QrScenario(PreparedScenario);

/// Outcome of one simulation run.
pub struct QrRun(RunRecord);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("interior nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(QrStatus, String);

impl Failure {
    fn new(status: QrStatus, message: impl Into<String>) -> Self {
        Failure(status, message.into())
    }
}

/// Runs `body`, recording the error message of a failure and turning panics
/// into `Internal`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QrStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal error");
            QrStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(QrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn utf8<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(QrStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn floats<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Description of the last failed call on this thread, or null when the last
/// call succeeded. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn qr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses topology text.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_graph_from_text(text: *const c_char, out: *mut *mut QrGraph) -> QrStatus {
    guard(|| {
        let t = utf8(text, "text")?;
        let g = load_topology(t).map_err(|e| Failure::new(QrStatus::Parse, e.to_string()))?;
        put(out, boxed(QrGraph(g)), "out")
    })
}

/// Reads and parses a topology file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_graph_from_file(path: *const c_char, out: *mut *mut QrGraph) -> QrStatus {
    guard(|| {
        let p = utf8(path, "path")?;
        let t = fs::read_to_string(p).map_err(|e| Failure::new(QrStatus::Io, format!("{p}: {e}")))?;
        let g = load_topology(&t).map_err(|e| Failure::new(QrStatus::Parse, format!("{p}: {e}")))?;
        put(out, boxed(QrGraph(g)), "out")
    })
}

/// # Safety
/// `graph` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qr_graph_free(graph: *mut QrGraph) {
    release(graph);
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qr_graph_node_count(graph: *const QrGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Number of directed links; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qr_graph_link_count(graph: *const QrGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.link_count())
}

/// Counts broken invariants, including missing strong connectivity. The
/// first one is also left as the thread's error message.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_graph_violation_count(graph: *const QrGraph, out: *mut usize) -> QrStatus {
    let mut first = None;
    let status = guard(|| {
        let g = borrow(graph, "graph")?;
        let violations = validate_graph(&g.0);
        first = violations.first().map(|v| v.to_string());
        put(out, violations.len(), "out")
    });
    if let Some(message) = first {
        set_error(message);
    }
    status
}

/// The `k` cheapest loopless paths from `source` to `destination`. Pass a
/// null `coefficients` with `coefficient_count` 0 for unit coefficients.
///
/// # Safety
/// `graph` must be a live handle, `coefficients` must point to
/// `coefficient_count` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_k_shortest_paths(
    graph: *const QrGraph,
    source: usize,
    destination: usize,
    k: usize,
    coefficients: *const f64,
    coefficient_count: usize,
    out: *mut *mut QrPaths,
) -> QrStatus {
    guard(|| {
        let g = borrow(graph, "graph")?;
        let c = floats(coefficients, coefficient_count, "coefficients")?;
        let c = if c.is_empty() {
            CostCoefficients::unit()
        } else {
            CostCoefficients::new(c.to_vec()).map_err(|e| Failure::new(QrStatus::InvalidArgument, e))?
        };
        let set = k_shortest_paths(&g.0, NodeId(source), NodeId(destination), k, &c)
            .map_err(|e| Failure::new(QrStatus::InvalidArgument, e.to_string()))?;
        put(out, boxed(QrPaths(set)), "out")
    })
}

/// # Safety
/// `paths` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qr_paths_free(paths: *mut QrPaths) {
    release(paths);
}

/// Number of paths in the set; 0 for a null handle or an unreachable
/// destination.
///
/// # Safety
/// `paths` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qr_paths_count(paths: *const QrPaths) -> usize {
    paths.as_ref().map_or(0, |p| p.0.len())
}

unsafe fn path_at<'a>(paths: *const QrPaths, index: usize) -> Result<&'a qosroute::Path, Failure> {
    let set = &borrow(paths, "paths")?.0;
    set.paths
        .get(index)
        .ok_or_else(|| Failure::new(QrStatus::OutOfRange, format!("path {index} of {}", set.len())))
}

/// Static cost of path `index`.
///
/// # Safety
/// `paths` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_path_cost(paths: *const QrPaths, index: usize, out: *mut f64) -> QrStatus {
    guard(|| put(out, path_at(paths, index)?.static_cost(), "out"))
}

/// Copies the node sequence of path `index` into `buffer` and stores its
/// length in `length`. When `capacity` is too small nothing is copied, the
/// needed length is stored and `BufferTooSmall` is returned.
///
/// # Safety
/// `paths` must be a live handle, `buffer` must hold `capacity` entries and
/// `length` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_path_nodes(
    paths: *const QrPaths,
    index: usize,
    buffer: *mut usize,
    capacity: usize,
    length: *mut usize,
) -> QrStatus {
    guard(|| {
        let nodes = path_at(paths, index)?.nodes();
        put(length, nodes.len(), "length")?;
        if capacity < nodes.len() {
            return Err(Failure::new(
                QrStatus::BufferTooSmall,
                format!("path has {} nodes, buffer holds {capacity}", nodes.len()),
            ));
        }
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        for (i, n) in nodes.iter().enumerate() {
            buffer.add(i).write(n.0);
        }
        Ok(())
    })
}

/// Path-selection probabilities with `p_max` on the lowest delay estimate.
///
/// # Safety
/// `estimates` and `out` must each hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn qr_kspqr_distribution(
    estimates: *const f64,
    count: usize,
    p_max: f64,
    out: *mut f64,
) -> QrStatus {
    guard(|| {
        let d = floats(estimates, count, "estimates")?;
        if count == 0 || !(p_max > 0.0 && p_max <= 1.0) {
            return Err(Failure::new(QrStatus::InvalidArgument, "need count > 0 and p_max in (0, 1]"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let stats: Vec<PathStats> = d.iter().map(|x| PathStats::new(*x)).collect();
        ptr::copy_nonoverlapping(kspqr_distribution(&stats, p_max).as_ptr(), out, count);
        Ok(())
    })
}

/// Path-selection probabilities proportional to
/// `(estimate + beta * waiting)^-alpha`.
///
/// # Safety
/// `estimates`, `waiting` and `out` must each hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn qr_koqra_distribution(
    estimates: *const f64,
    waiting: *const f64,
    count: usize,
    alpha: f64,
    beta: f64,
    out: *mut f64,
) -> QrStatus {
    guard(|| {
        let d = floats(estimates, count, "estimates")?;
        let w = floats(waiting, count, "waiting")?;
        let finite = d.iter().chain(w).all(|x| x.is_finite() && *x >= 0.0);
        let positive = alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta >= 0.0;
        if count == 0 || !finite || !positive {
            return Err(Failure::new(
                QrStatus::InvalidArgument,
                "need count > 0, finite non-negative inputs, alpha > 0 and beta >= 0",
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let stats: Vec<PathStats> = d.iter().map(|x| PathStats::new(*x)).collect();
        let dist = koqra_distribution(&stats, &QueueSnapshot(w.to_vec()), alpha, beta);
        ptr::copy_nonoverlapping(dist.as_ptr(), out, count);
        Ok(())
    })
}

/// Loads a scenario file, its topology and the candidate paths.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_scenario_load(path: *const c_char, out: *mut *mut QrScenario) -> QrStatus {
    guard(|| {
        let p = utf8(path, "path")?;
        let cfg = ScenarioConfig::from_file(Path::new(p)).map_err(|e| Failure::new(QrStatus::Parse, format!("{p}: {e}")))?;
        let prepared = PreparedScenario::new(cfg).map_err(|e| Failure::new(QrStatus::Parse, e))?;
        put(out, boxed(QrScenario(prepared)), "out")
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards. Null
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn qr_scenario_free(scenario: *mut QrScenario) {
    release(scenario);
}

/// Simulates the scenario once under `policy` with `seed`.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_scenario_run(
    scenario: *const QrScenario,
    policy: QrPolicy,
    seed: u64,
    out: *mut *mut QrRun,
) -> QrStatus {
    guard(|| {
        let s = borrow(scenario, "scenario")?;
        let record = s.0.run(policy.into(), seed).map_err(|e| Failure::new(QrStatus::Simulation, e))?;
        put(out, boxed(QrRun(record)), "out")
    })
}

/// # Safety
/// `run` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qr_run_free(run: *mut QrRun) {
    release(run);
}

/// Number of metrics windows; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qr_run_window_count(run: *const QrRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.metrics.windows.len())
}

/// Copies window `index`.
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_run_window(run: *const QrRun, index: usize, out: *mut QrWindow) -> QrStatus {
    guard(|| {
        let windows = &borrow(run, "run")?.0.metrics.windows;
        let w = windows
            .get(index)
            .ok_or_else(|| Failure::new(QrStatus::OutOfRange, format!("window {index} of {}", windows.len())))?;
        let window = QrWindow {
            start_s: w.start,
            end_s: w.end,
            mean_delay_s: w.mean_delay().unwrap_or(f64::NAN),
            delivered: w.delivered,
            dropped: w.dropped,
            control_bits: w.control_bits,
        };
        put(out, window, "out")
    })
}

/// Mean delay over every delivered data packet; NaN when none were.
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_run_mean_delay(run: *const QrRun, out: *mut f64) -> QrStatus {
    guard(|| {
        let r = borrow(run, "run")?;
        put(out, r.0.metrics.mean_delay().unwrap_or(f64::NAN), "out")
    })
}

/// The run as CSV text. Release the string with [`qr_string_free`].
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qr_run_csv(run: *const QrRun, out: *mut *mut c_char) -> QrStatus {
    guard(|| {
        let r = borrow(run, "run")?;
        let csv = emit_csv(std::slice::from_ref(&r.0)).map_err(|e| Failure::new(QrStatus::Simulation, e.to_string()))?;
        let c = CString::new(csv).map_err(|_| Failure::new(QrStatus::Internal, "CSV holds a nul byte"))?;
        put(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from [`qr_run_csv`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
