//! C ABI over `fairmatch`.
//!
//! Graphs live behind an opaque `FmGraph` handle. Every call returns an
//! `FmStatus`; on failure `fm_last_error_message` describes the error for
//! the calling thread. Reports come back as JSON strings owned by the
//! library, to be released with `fm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fairmatch::analysis::{self, Notion};
use fairmatch::fairness::{self, Permutation, ShapleyMode};
use fairmatch::generators::{self, ErConfig};
use fairmatch::report::{to_json, SolveReport};
use fairmatch::{BipartiteGraph, Error, ErrorKind, GroupSet, GroupVector, OptOracle, Rational};

/// Result codes. The first four match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmStatus {
    Ok = 0,
    InputError = 1,
    Infeasible = 2,
    GuardExceeded = 3,
    Overflow = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque graph handle.
pub struct FmGraph {
    graph: BipartiteGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn run<F: FnOnce() -> Result<(), Failure>>(f: F) -> FmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FmStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            FmStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            match e.kind() {
                ErrorKind::Input => FmStatus::InputError,
                ErrorKind::Infeasible => FmStatus::Infeasible,
                ErrorKind::Guard => FmStatus::GuardExceeded,
                ErrorKind::Overflow => FmStatus::Overflow,
            }
        }
        Err(_) => {
            set_error("internal panic".into());
            FmStatus::Panic
        }
    }
}

unsafe fn graph_ref<'a>(g: *const FmGraph) -> Result<&'a BipartiteGraph, Failure> {
    g.as_ref().map(|h| &h.graph).ok_or(Failure::Null("graph"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::Core(Error::Malformed(format!("{what} is not UTF-8"))))
}

unsafe fn opt_str_arg<'a>(
    s: *const c_char,
    what: &'static str,
) -> Result<Option<&'a str>, Failure> {
    if s.is_null() {
        Ok(None)
    } else {
        str_arg(s, what).map(Some)
    }
}

unsafe fn put_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = CString::new(text).expect("JSON has no NUL").into_raw();
    Ok(())
}

unsafe fn put_graph(
    out: *mut *mut FmGraph,
    graph: Result<BipartiteGraph, Error>,
) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(FmGraph { graph: graph? }));
    Ok(())
}

fn notion_of(name: Option<&str>, weights: Option<&str>, default: Notion) -> Result<Notion, Error> {
    match (name, weights) {
        (None, None) => Ok(default),
        (None | Some("custom"), Some(w)) => Ok(Notion::Custom(w.parse()?)),
        (Some("custom"), None) => Err(Error::InvalidArgument("custom notion needs weights".into())),
        (Some(_), Some(_)) => Err(Error::InvalidArgument(
            "weights only apply to the custom notion".into(),
        )),
        (Some("egalitarian"), None) => Ok(Notion::Egalitarian),
        (Some("demographic"), None) => Ok(Notion::Demographic),
        (Some("opportunity"), None) => Ok(Notion::Opportunity),
        (Some(other), None) => Err(Error::InvalidArgument(format!("unknown notion {other:?}"))),
    }
}

/// Message for the last failed call on this thread, or NULL after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a JSON graph document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_parse(json: *const c_char, out: *mut *mut FmGraph) -> FmStatus {
    run(|| {
        let text = str_arg(json, "json")?;
        put_graph(out, BipartiteGraph::parse(text))
    })
}

/// Releases a graph handle. NULL is ignored.
///
/// # Safety
/// `graph` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_free(graph: *mut FmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of groups.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_k(graph: *const FmGraph, out: *mut usize) -> FmStatus {
    run(|| {
        let g = graph_ref(graph)?;
        *out.as_mut().ok_or(Failure::Null("out"))? = g.k();
        Ok(())
    })
}

/// Serializes the graph back to JSON.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_to_json(
    graph: *const FmGraph,
    out: *mut *mut c_char,
) -> FmStatus {
    run(|| {
        let g = graph_ref(graph)?;
        put_string(out, g.to_json())
    })
}

/// `OPT(Λ)` for the groups whose bits are set in `groups` (bit 0 is group 1).
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_opt(graph: *const FmGraph, groups: u64, out: *mut i64) -> FmStatus {
    run(|| {
        let g = graph_ref(graph)?;
        let set = GroupSet::from_bits(groups);
        if !set.is_subset(g.all_groups()) {
            return Err(Error::InvalidArgument(format!(
                "group mask {groups:#x} exceeds k = {}",
                g.k()
            ))
            .into());
        }
        *out.as_mut().ok_or(Failure::Null("out"))? = OptOracle::new(g).opt(set)?;
        Ok(())
    })
}

/// Serial dictatorship for the 1-based priority order `sigma` of length
/// `len`, as a JSON report.
///
/// # Safety
/// `sigma` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_lexmax(
    graph: *const FmGraph,
    sigma: *const u32,
    len: usize,
    emit_matching: bool,
    out: *mut *mut c_char,
) -> FmStatus {
    run(|| {
        let g = graph_ref(graph)?;
        if sigma.is_null() && len > 0 {
            return Err(Failure::Null("sigma"));
        }
        let order = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(sigma, len)
        };
        let image = order
            .iter()
            .map(|&s| {
                (s as usize)
                    .checked_sub(1)
                    .ok_or_else(|| Error::InvalidArgument("groups are 1-based".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let oracle = OptOracle::new(g);
        let sol = fairness::serial_dictatorship(&oracle, &Permutation::new(image)?)?;
        put_string(
            out,
            to_json(&SolveReport::from_solution(
                &sol,
                oracle.opt_all(),
                g,
                emit_matching,
            )?),
        )
    })
}

/// Shapley values as a JSON report: exact when `samples` is 0, otherwise
/// the average over `samples` random orders drawn with `seed`.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_shapley(
    graph: *const FmGraph,
    samples: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> FmStatus {
    run(|| {
        let g = graph_ref(graph)?;
        let oracle = OptOracle::new(g);
        let mode = if samples == 0 {
            ShapleyMode::Exact
        } else {
            ShapleyMode::Sampled { samples, seed }
        };
        let point = fairness::shapley(&oracle, mode)?;
        let mut r = SolveReport::new("shapley", point, oracle.opt_all())?;
        r.mode = Some(if samples == 0 { "exact" } else { "sampled" }.into());
        if samples > 0 {
            r.samples = Some(samples);
            r.seed = Some(seed);
        }
        put_string(out, to_json(&r))
    })
}

unsafe fn weighted(
    graph: *const FmGraph,
    notion: *const c_char,
    weights: *const c_char,
    emit_matching: bool,
    out: *mut *mut c_char,
    leximin: bool,
) -> FmStatus {
    run(|| {
        let g = graph_ref(graph)?;
        let notion = notion_of(
            opt_str_arg(notion, "notion")?,
            opt_str_arg(weights, "weights")?,
            Notion::Egalitarian,
        )?;
        let oracle = OptOracle::new(g);
        let w = notion.weights(&oracle)?;
        let sol = if leximin {
            fairness::leximin(&oracle, &w)?
        } else {
            fairness::fair_optimum(&oracle, &w)?
        };
        let mut r = SolveReport::from_solution(&sol, oracle.opt_all(), g, emit_matching)?;
        r.notion = Some(notion.name().into());
        put_string(out, to_json(&r))
    })
}

/// Weighted leximin point as a JSON report. `notion` is one of
/// `egalitarian`, `demographic`, `opportunity`, `custom`; `weights` is a
/// comma list such as `"2,1"`. Either may be NULL (default egalitarian).
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_leximin(
    graph: *const FmGraph,
    notion: *const c_char,
    weights: *const c_char,
    emit_matching: bool,
    out: *mut *mut c_char,
) -> FmStatus {
    weighted(graph, notion, weights, emit_matching, out, true)
}

/// Largest fair point `c*·w` as a JSON report; arguments as in `fm_leximin`.
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_fair_optimum(
    graph: *const FmGraph,
    notion: *const c_char,
    weights: *const c_char,
    emit_matching: bool,
    out: *mut *mut c_char,
) -> FmStatus {
    weighted(graph, notion, weights, emit_matching, out, false)
}

/// Price of Fairness report (default notion: opportunity). With `bounds`
/// the applicable bounds and the decreasing check (up to `max_k` groups)
/// are added; with `integral` only integral fair points count.
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_pof(
    graph: *const FmGraph,
    notion: *const c_char,
    weights: *const c_char,
    bounds: bool,
    max_k: usize,
    integral: bool,
    out: *mut *mut c_char,
) -> FmStatus {
    run(|| {
        let g = graph_ref(graph)?;
        let notion = notion_of(
            opt_str_arg(notion, "notion")?,
            opt_str_arg(weights, "weights")?,
            Notion::Opportunity,
        )?;
        let oracle = OptOracle::new(g);
        let mut report = if integral {
            analysis::pof_integral(&oracle, &notion, analysis::DEFAULT_INTEGRAL_LIMIT)?
        } else {
            analysis::pof(&oracle, &notion)?
        };
        if bounds {
            analysis::attach_bounds(&mut report, &oracle, max_k)?;
        }
        put_string(out, to_json(&report))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_gen_toblerone(
    k: usize,
    m: usize,
    n: usize,
    out: *mut *mut FmGraph,
) -> FmStatus {
    run(|| put_graph(out, generators::toblerone(k, m, n)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_gen_tight_halves(
    k: usize,
    m: usize,
    out: *mut *mut FmGraph,
) -> FmStatus {
    run(|| put_graph(out, generators::tight_halves(k, m)))
}

/// `rho` is a rational string such as `"7/10"`.
///
/// # Safety
/// `rho` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_gen_rho_tight(
    k: usize,
    m: usize,
    rho: *const c_char,
    out: *mut *mut FmGraph,
) -> FmStatus {
    run(|| {
        let rho: Rational = str_arg(rho, "rho")?.parse()?;
        put_graph(out, generators::rho_tight(k, m, rho))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_gen_prime(m1: usize, m2: usize, out: *mut *mut FmGraph) -> FmStatus {
    run(|| put_graph(out, generators::prime_counterexample(m1, m2)))
}

/// Complete bipartite graph; `sizes` holds `k` agent counts.
///
/// # Safety
/// `sizes` must point to `k` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_gen_complete(
    k: usize,
    sizes: *const usize,
    jobs: usize,
    out: *mut *mut FmGraph,
) -> FmStatus {
    run(|| {
        if sizes.is_null() && k > 0 {
            return Err(Failure::Null("sizes"));
        }
        let sizes = if k == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(sizes, k)
        };
        put_graph(out, generators::complete(k, sizes, jobs))
    })
}

/// Random graph. `beta`, `alpha` and `p` are rational strings (`alpha` and
/// `p` comma separated, `p` may also be a single value, `auto-dense` or
/// `sparse`).
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_gen_er(
    n: usize,
    beta: *const c_char,
    alpha: *const c_char,
    p: *const c_char,
    seed: u64,
    out: *mut *mut FmGraph,
) -> FmStatus {
    run(|| {
        let beta: Rational = str_arg(beta, "beta")?.parse()?;
        let alpha: GroupVector = str_arg(alpha, "alpha")?.parse()?;
        let k = alpha.len();
        let p = match str_arg(p, "p")? {
            "auto-dense" => GroupVector::new(vec![generators::dense_probability(n)?; k]),
            "sparse" => GroupVector::new(vec![generators::sparse_probability(n)?; k]),
            list => {
                let v: GroupVector = list.parse()?;
                if v.len() == 1 {
                    GroupVector::new(vec![v[0]; k])
                } else {
                    v
                }
            }
        };
        put_graph(
            out,
            generators::erdos_renyi(&ErConfig {
                n,
                beta,
                alpha,
                p,
                seed,
            }),
        )
    })
}
