//! C ABI over `hgsparse`.
//!
//! Graphs and sparsifiers are opaque heap handles released with their
//! `*_free` function. Every fallible call returns an [`HgsStatus`]; on failure
//! [`hgs_last_error`] describes the most recent error on the calling thread.
//! Strings are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use hgsparse::graph::{build_graph, EdgeRecord, HeteroGraph};
use hgsparse::io::{read_link_file, read_node_file, write_link_file, IoError, LinkFileOptions};
use hgsparse::metrics::{coverage_report, isolated_nodes};
use hgsparse::sparsify::{sparsify, Method, SparsifyError, SparsifyParams};
use hgsparse::EdgeSet;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Graph = 5,
    EmptyGraph = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgsMethod {
    PerType = 0,
    AllTypes = 1,
}

impl From<HgsMethod> for Method {
    fn from(m: HgsMethod) -> Self {
        match m {
            HgsMethod::PerType => Method::PerType,
            HgsMethod::AllTypes => Method::AllTypes,
        }
    }
}

/// A loaded heterogeneous graph.
pub struct HgsGraph {
    inner: HeteroGraph,
}

/// The edges kept by one sparsifier run over a specific graph.
pub struct HgsSparsifier {
    selected: EdgeSet,
    k: usize,
    method: Method,
    ratio: f64,
}

struct Failure(HgsStatus, String);

impl Failure {
    fn new(status: HgsStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match e {
            IoError::Io(_) => HgsStatus::Io,
            IoError::Graph(_) => HgsStatus::Graph,
            _ => HgsStatus::Parse,
        };
        Failure::new(status, e)
    }
}

impl From<SparsifyError> for Failure {
    fn from(e: SparsifyError) -> Self {
        let status = match e {
            SparsifyError::EmptyGraph => HgsStatus::EmptyGraph,
            _ => HgsStatus::InvalidArgument,
        };
        Failure::new(status, e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HgsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HgsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            HgsStatus::Panic
        }
    }
}

unsafe fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::new(HgsStatus::NullArgument, format!("{what} is null")))
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(Failure::new(HgsStatus::NullArgument, format!("{what} is null")));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(HgsStatus::InvalidArgument, format!("{what} is not valid UTF-8")))?;
    Ok(PathBuf::from(s))
}

fn open(path: &PathBuf) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::new(HgsStatus::Io, format!("{}: {e}", path.display())))
}

fn same_graph(g: &HgsGraph, s: &HgsSparsifier) -> Result<(), Failure> {
    if s.selected.universe() != g.inner.m() {
        return Err(Failure::new(HgsStatus::InvalidArgument, "sparsifier was built over a different graph"));
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hgs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hgs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Load a link file (`src dst type [weight]`, tab separated) and an optional
/// node file (`nodes` may be null).
///
/// # Safety
/// `links` and a non-null `nodes` must be NUL-terminated strings; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn hgs_graph_load(
    links: *const c_char,
    nodes: *const c_char,
    weighted: bool,
    out: *mut *mut HgsGraph,
) -> HgsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::new(HgsStatus::NullArgument, "out is null"));
        }
        let links = path_arg(links, "links")?;
        let table = if nodes.is_null() {
            None
        } else {
            let path = path_arg(nodes, "nodes")?;
            Some(read_node_file(open(&path)?)?)
        };
        let opts = LinkFileOptions { has_weight: weighted, ..Default::default() };
        let records = read_link_file(open(&links)?, &opts)?;
        let g = build_graph(records, table.as_ref()).map_err(|e| Failure::new(HgsStatus::Graph, e))?;
        *out = Box::into_raw(Box::new(HgsGraph { inner: g }));
        Ok(())
    })
}

/// Build a graph from parallel arrays of length `len`. `weight` may be null
/// for an unweighted graph.
///
/// # Safety
/// Non-null arrays must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgs_graph_from_edges(
    src: *const u64,
    dst: *const u64,
    etype: *const u32,
    weight: *const f64,
    len: usize,
    out: *mut *mut HgsGraph,
) -> HgsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::new(HgsStatus::NullArgument, "out is null"));
        }
        if len > 0 && (src.is_null() || dst.is_null() || etype.is_null()) {
            return Err(Failure::new(HgsStatus::NullArgument, "edge arrays are null"));
        }
        let records = (0..len).map(|i| EdgeRecord {
            src: *src.add(i),
            dst: *dst.add(i),
            etype: *etype.add(i),
            weight: if weight.is_null() { None } else { Some(*weight.add(i)) },
        });
        let g = build_graph(records, None).map_err(|e| Failure::new(HgsStatus::Graph, e))?;
        *out = Box::into_raw(Box::new(HgsGraph { inner: g }));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hgs_graph_free(graph: *mut HgsGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn hgs_graph_node_count(graph: *const HgsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `graph` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn hgs_graph_edge_count(graph: *const HgsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.m())
}

/// # Safety
/// `graph` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn hgs_graph_edge_type_count(graph: *const HgsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.t())
}

/// Total degree (in + out) of the node with original id `node`.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgs_graph_degree(graph: *const HgsGraph, node: u64, out: *mut usize) -> HgsStatus {
    guard(|| {
        let g = &non_null(graph, "graph")?.inner;
        if out.is_null() {
            return Err(Failure::new(HgsStatus::NullArgument, "out is null"));
        }
        let u = g
            .node_id(node)
            .ok_or_else(|| Failure::new(HgsStatus::InvalidArgument, format!("unknown node {node}")))?;
        *out = g.degree(u).map_err(|e| Failure::new(HgsStatus::Graph, e))?;
        Ok(())
    })
}

/// Run a sparsifier with budget `k` (at least 1).
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgs_sparsify(
    graph: *const HgsGraph,
    k: usize,
    method: HgsMethod,
    seed: u64,
    out: *mut *mut HgsSparsifier,
) -> HgsStatus {
    guard(|| {
        let g = &non_null(graph, "graph")?.inner;
        if out.is_null() {
            return Err(Failure::new(HgsStatus::NullArgument, "out is null"));
        }
        let params = SparsifyParams::new(k, method.into(), seed)?;
        let r = sparsify(g, &params)?;
        *out = Box::into_raw(Box::new(HgsSparsifier {
            selected: r.selected,
            k,
            method: params.method,
            ratio: r.ratio,
        }));
        Ok(())
    })
}

/// # Safety
/// `sparsifier` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hgs_sparsifier_free(sparsifier: *mut HgsSparsifier) {
    if !sparsifier.is_null() {
        drop(Box::from_raw(sparsifier));
    }
}

/// # Safety
/// `sparsifier` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn hgs_sparsifier_kept(sparsifier: *const HgsSparsifier) -> usize {
    sparsifier.as_ref().map_or(0, |s| s.selected.len())
}

/// Kept edges over all edges; NaN for a null handle.
///
/// # Safety
/// `sparsifier` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hgs_sparsifier_ratio(sparsifier: *const HgsSparsifier) -> f64 {
    sparsifier.as_ref().map_or(f64::NAN, |s| s.ratio)
}

/// Copy kept edges, in (src, dst, type) order, into caller arrays of
/// capacity `cap`. `written` receives the number of kept edges; if that
/// exceeds `cap` nothing is copied and `HGS_STATUS_BUFFER_TOO_SMALL` is
/// returned, so a call with `cap = 0` queries the size.
///
/// # Safety
/// Handles must be live and belong together; non-null arrays must hold `cap`
/// elements; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgs_sparsifier_edges(
    graph: *const HgsGraph,
    sparsifier: *const HgsSparsifier,
    src: *mut u64,
    dst: *mut u64,
    etype: *mut u32,
    cap: usize,
    written: *mut usize,
) -> HgsStatus {
    guard(|| {
        let g = non_null(graph, "graph")?;
        let s = non_null(sparsifier, "sparsifier")?;
        same_graph(g, s)?;
        if written.is_null() {
            return Err(Failure::new(HgsStatus::NullArgument, "written is null"));
        }
        let kept = s.selected.len();
        *written = kept;
        if kept > cap {
            return Err(Failure::new(HgsStatus::BufferTooSmall, format!("need room for {kept} edges, got {cap}")));
        }
        if kept > 0 && (src.is_null() || dst.is_null() || etype.is_null()) {
            return Err(Failure::new(HgsStatus::NullArgument, "output arrays are null"));
        }
        for (i, e) in s.selected.iter().enumerate() {
            let r = g.inner.record(e);
            *src.add(i) = r.src;
            *dst.add(i) = r.dst;
            *etype.add(i) = r.etype;
        }
        Ok(())
    })
}

/// Write the kept edges as a link file.
///
/// # Safety
/// Handles must be live and belong together; `path` must be a NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn hgs_sparsifier_write_links(
    graph: *const HgsGraph,
    sparsifier: *const HgsSparsifier,
    path: *const c_char,
) -> HgsStatus {
    guard(|| {
        let g = non_null(graph, "graph")?;
        let s = non_null(sparsifier, "sparsifier")?;
        same_graph(g, s)?;
        let path = path_arg(path, "path")?;
        let file = File::create(&path).map_err(|e| Failure::new(HgsStatus::Io, format!("{}: {e}", path.display())))?;
        write_link_file(&g.inner, Some(&s.selected), BufWriter::new(file))?;
        Ok(())
    })
}

/// Count coverage violations (for the sparsifier's own budget and method)
/// and nodes left without edges. Both are 0 for a correct sparsifier.
///
/// # Safety
/// Handles must be live and belong together; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hgs_sparsifier_check(
    graph: *const HgsGraph,
    sparsifier: *const HgsSparsifier,
    violations: *mut usize,
    isolated: *mut usize,
) -> HgsStatus {
    guard(|| {
        let g = non_null(graph, "graph")?;
        let s = non_null(sparsifier, "sparsifier")?;
        same_graph(g, s)?;
        if violations.is_null() || isolated.is_null() {
            return Err(Failure::new(HgsStatus::NullArgument, "outputs are null"));
        }
        let v = coverage_report(&g.inner, &s.selected, s.k, s.method)
            .map_err(|e| Failure::new(HgsStatus::Graph, e))?;
        let iso = isolated_nodes(&g.inner, &s.selected).map_err(|e| Failure::new(HgsStatus::Graph, e))?;
        *violations = v.len();
        *isolated = iso.len();
        Ok(())
    })
}
