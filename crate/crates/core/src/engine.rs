//! The solver core: the cover-or-witness skeleton descent and the outer
//! probe/load loop, in every run mode, with full resolution accounting.
//!
//! A run works in *run space*: input boxes are permuted so that component
//! `k` holds the attribute split at level `k`, and reported tuples are
//! permuted back at the end. The knowledge base grows monotonically —
//! input boxes, cached resolvents, and reported output points — and every
//! stored box carries a [`Taint`] so resolutions can be split into
//! gap-only and output-involved counts.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boxindex::KnowledgeBase;
use crate::dyadic::{DyadicBox, DyadicInterval};
use crate::joins::Hypergraph;
use crate::resolution::{is_ordered_instance, resolve, Taint};
use crate::{Error, Result};

// --- splitting attribute order ---------------------------------------------------

/// Splitting attribute order: position `k` names the original attribute
/// the solver splits at level `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sao {
    order: Vec<usize>,
}

impl Sao {
    /// Validates that `order` is a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &a in &order {
            if a >= n || seen[a] {
                return Err(Error::BadOrder(format!(
                    "{order:?} is not a permutation of 0..{n}"
                )));
            }
            seen[a] = true;
        }
        Ok(Self { order })
    }

    /// The identity order on `n` attributes.
    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self { order: (0..n).collect() }
    }

    /// Number of attributes.
    #[must_use]
    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// The full order.
    #[must_use]
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Original attribute split at run level `k`.
    #[must_use]
    pub fn attr(&self, k: usize) -> usize {
        self.order[k]
    }

    /// Permutes a box's components from original order into run order.
    #[must_use]
    pub fn to_run_space(&self, b: &DyadicBox) -> DyadicBox {
        debug_assert_eq!(b.n(), self.n());
        DyadicBox::new(b.d(), self.order.iter().map(|&a| b.comp(a)).collect())
    }

    /// Inverse of [`Sao::to_run_space`].
    #[must_use]
    pub fn to_original_space(&self, b: &DyadicBox) -> DyadicBox {
        debug_assert_eq!(b.n(), self.n());
        let mut comps = vec![DyadicInterval::LAMBDA; self.n()];
        for (k, &a) in self.order.iter().enumerate() {
            comps[a] = b.comp(k);
        }
        DyadicBox::new(b.d(), comps)
    }
}

impl fmt::Display for Sao {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

// --- run modes -------------------------------------------------------------------

/// How a run initializes and replenishes its knowledge base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineMode {
    /// Every input box inserted up front; resolvents cached.
    Preloaded,
    /// Starts empty; boxes are fetched on demand at uncovered points.
    Reloaded,
    /// Preloaded, but resolvents are never cached; uncovered points are
    /// reported inside the descent itself (tree-shaped proofs).
    PreloadedNoCache,
    /// Preloaded through the load-balancing dimension map.
    PreloadedLb,
    /// Reloaded through the load-balancing dimension map.
    ReloadedLb,
}

impl EngineMode {
    /// `true` for the modes that run on remapped dimensions.
    #[must_use]
    pub fn is_lb(self) -> bool {
        matches!(self, EngineMode::PreloadedLb | EngineMode::ReloadedLb)
    }

    /// The command-line name.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            EngineMode::Preloaded => "preloaded",
            EngineMode::Reloaded => "reloaded",
            EngineMode::PreloadedNoCache => "preloaded-nocache",
            EngineMode::PreloadedLb => "preloaded-lb",
            EngineMode::ReloadedLb => "reloaded-lb",
        }
    }
}

impl FromStr for EngineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preloaded" => Ok(EngineMode::Preloaded),
            "reloaded" => Ok(EngineMode::Reloaded),
            "preloaded-nocache" => Ok(EngineMode::PreloadedNoCache),
            "preloaded-lb" => Ok(EngineMode::PreloadedLb),
            "reloaded-lb" => Ok(EngineMode::ReloadedLb),
            other => Err(Error::UnsupportedMode(other.into())),
        }
    }
}

impl fmt::Display for EngineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// --- run accounting ----------------------------------------------------------------

/// Counters for one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    /// Resolutions whose parents are both gap-derived.
    pub resolutions_gap: u64,
    /// Resolutions with at least one output-derived parent.
    pub resolutions_output: u64,
    /// Uncovered points the outer loop asked the oracle about.
    pub probes: u64,
    /// Boxes entered from the oracle (initial load plus probe loads).
    pub boxes_loaded: u64,
    /// Skeleton invocations, nested recursive calls included.
    pub skeleton_calls: u64,
    /// Output tuples reported.
    pub output_count: u64,
    /// Resolutions attributed to the original attribute of their split level.
    pub resolutions_by_attr: Vec<u64>,
    /// Load-balanced runs: final partition size per balanced attribute.
    pub partition_sizes: Vec<usize>,
    /// Load-balanced runs: stored-box rewrite passes after partition splits.
    pub update_balance_calls: u64,
}

impl RunStats {
    /// Fresh counters for an `n`-attribute run.
    #[must_use]
    pub fn new(n: usize) -> Self {
        Self { resolutions_by_attr: vec![0; n], ..Self::default() }
    }

    /// Total resolution steps.
    #[must_use]
    pub fn total_resolutions(&self) -> u64 {
        self.resolutions_gap + self.resolutions_output
    }
}

/// The JSON record a run emits: counters plus run identity.
#[derive(Clone, Debug, Serialize)]
pub struct StatsRecord {
    pub mode: String,
    pub sao: Vec<usize>,
    pub d: u8,
    pub n: usize,
    pub input_boxes: usize,
    #[serde(flatten)]
    pub stats: RunStats,
}

impl StatsRecord {
    #[must_use]
    pub fn new(
        mode: EngineMode,
        sao: &Sao,
        d: u8,
        n: usize,
        input_boxes: usize,
        stats: RunStats,
    ) -> Self {
        Self { mode: mode.name().into(), sao: sao.order().to_vec(), d, n, input_boxes, stats }
    }
}

/// One replayable event of a recorded run. Boxes are rendered in the
/// `<...>` text form, components in run order.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Run header.
    Begin { d: u8, n: usize, mode: String, sao: Vec<usize> },
    /// Boxes entered the knowledge base; `probe` is the uncovered point
    /// that triggered the fetch, absent for the initial load.
    Load { boxes: Vec<String>, probe: Option<String> },
    /// One resolution step.
    Resolve { left: String, right: String, dim: usize, result: String, taint: String, cached: bool },
    /// The outer loop asked the oracle about this uncovered point.
    Probe { point: String },
    /// A reported output tuple.
    Output { point: String },
    /// A load-balanced run split partition member `interval` of split
    /// dimension `dim` and rewrote each stored box on the left to the
    /// box on the right, keeping its taint.
    Rebalance { dim: usize, interval: String, rewrites: Vec<(String, String)> },
}

// --- box oracles -------------------------------------------------------------------

/// A source of gap boxes, components in original attribute order.
pub trait BoxOracle {
    /// Bit width of every component.
    fn d(&self) -> u8;
    /// Number of attributes.
    fn n(&self) -> usize;
    /// Every distinct input box containing the unit `point`.
    fn containing(&self, point: &DyadicBox) -> Vec<DyadicBox>;
    /// Every distinct input box, in a fixed order.
    fn all_boxes(&self) -> Vec<DyadicBox>;
}

/// An oracle over an explicit box list, indexed for containment probes.
/// Duplicates are dropped on construction; first occurrence order is kept.
#[derive(Debug)]
pub struct MaterializedOracle {
    d: u8,
    n: usize,
    boxes: Vec<DyadicBox>,
    index: KnowledgeBase,
}

impl MaterializedOracle {
    #[must_use]
    pub fn new<I: IntoIterator<Item = DyadicBox>>(d: u8, n: usize, boxes: I) -> Self {
        debug_assert!(n >= 1);
        let mut index = KnowledgeBase::new(d, n);
        let mut kept = Vec::new();
        for b in boxes {
            debug_assert!(b.d() == d && b.n() == n);
            if index.insert(&b) {
                kept.push(b);
            }
        }
        Self { d, n, boxes: kept, index }
    }

    /// Number of distinct boxes.
    #[must_use]
    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

impl BoxOracle for MaterializedOracle {
    fn d(&self) -> u8 {
        self.d
    }

    fn n(&self) -> usize {
        self.n
    }

    fn containing(&self, point: &DyadicBox) -> Vec<DyadicBox> {
        self.index.all_containing(point)
    }

    fn all_boxes(&self) -> Vec<DyadicBox> {
        self.boxes.clone()
    }
}

// --- tainted knowledge base ----------------------------------------------------------

/// Knowledge base paired with the gap/output taint of every stored box.
#[derive(Debug)]
pub struct TaintedKb {
    kb: KnowledgeBase,
    taints: HashMap<DyadicBox, Taint>,
}

impl TaintedKb {
    #[must_use]
    pub fn new(d: u8, n: usize) -> Self {
        Self { kb: KnowledgeBase::new(d, n), taints: HashMap::new() }
    }

    /// A base holding `boxes`, all gap-tainted.
    #[must_use]
    pub fn from_gap_boxes(d: u8, n: usize, boxes: &[DyadicBox]) -> Self {
        let mut base = Self::new(d, n);
        for b in boxes {
            base.insert(b, Taint::Gap);
        }
        base
    }

    /// Inserts `b` with taint `t`; `false` if it was already stored.
    pub fn insert(&mut self, b: &DyadicBox, t: Taint) -> bool {
        if self.kb.insert(b) {
            self.taints.insert(b.clone(), t);
            true
        } else {
            false
        }
    }

    /// Removes `b`, returning its taint if it was stored.
    pub fn remove(&mut self, b: &DyadicBox) -> Option<Taint> {
        if self.kb.remove(b) {
            self.taints.remove(b)
        } else {
            None
        }
    }

    /// A minimum-total-length stored box containing `b`, with its taint.
    #[must_use]
    pub fn find_superbox(&self, b: &DyadicBox) -> Option<(DyadicBox, Taint)> {
        let w = self.kb.find_superbox(b)?;
        debug_assert!(self.taints.contains_key(&w));
        let t = self.taints.get(&w).copied().unwrap_or(Taint::Gap);
        Some((w, t))
    }

    /// Every stored box with its taint, in knowledge-base order.
    #[must_use]
    pub fn tainted_boxes(&self) -> Vec<(DyadicBox, Taint)> {
        self.kb
            .boxes()
            .into_iter()
            .map(|b| {
                let t = self.taints.get(&b).copied().unwrap_or(Taint::Gap);
                (b, t)
            })
            .collect()
    }

    /// Number of stored boxes.
    #[must_use]
    pub fn len(&self) -> usize {
        self.kb.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.kb.is_empty()
    }

    /// Read access to the underlying index.
    #[must_use]
    pub fn base(&self) -> &KnowledgeBase {
        &self.kb
    }
}

// --- skeleton descent ----------------------------------------------------------------

/// Outcome of one skeleton descent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonResult {
    /// Whether the knowledge base covers the target.
    pub covered: bool,
    /// A cover box containing the target when covered; otherwise the first
    /// uncovered unit point in run order.
    pub witness: DyadicBox,
}

/// Shared mutable context for one skeleton descent.
pub(crate) struct SkeletonCx<'a> {
    pub(crate) kb: &'a mut TaintedKb,
    pub(crate) sao: &'a Sao,
    /// Whether resolvents are retained in the knowledge base.
    pub(crate) cache: bool,
    /// When set, uncovered units are reported here, stored, and treated as
    /// covered — the no-cache variant's in-descent reporting.
    pub(crate) outputs: Option<&'a mut Vec<DyadicBox>>,
    /// Descents from a prefix-shaped root only ever build ordered
    /// resolution instances; the invariant is asserted when this is set.
    pub(crate) assert_ordered: bool,
    pub(crate) stats: &'a mut RunStats,
    pub(crate) trace: Option<&'a mut Vec<TraceEvent>>,
}

enum Phase {
    Enter,
    AfterLeft,
    AfterRight,
}

struct Frame {
    target: DyadicBox,
    phase: Phase,
    split_dim: usize,
    right: Option<DyadicBox>,
    left_witness: Option<(DyadicBox, Taint)>,
}

impl Frame {
    fn enter(target: DyadicBox) -> Self {
        Self { target, phase: Phase::Enter, split_dim: 0, right: None, left_witness: None }
    }
}

pub(crate) fn emit(trace: &mut Option<&mut Vec<TraceEvent>>, ev: impl FnOnce() -> TraceEvent) {
    if let Some(t) = trace.as_mut() {
        t.push(ev());
    }
}

/// The skeleton recursion, run on an explicit stack: find a stored
/// superbox, or report a unit target uncovered, or split the first thick
/// dimension, solve both halves, and resolve their witnesses into a cover
/// box for the whole target.
///
/// Returns `(covered, witness, taint)`; a `true` witness always contains
/// the frame's target, so an uncovered unit anywhere aborts the descent
/// (unless in-descent reporting is on, which stores the point and keeps
/// going).
pub(crate) fn skeleton_loop(
    cx: &mut SkeletonCx<'_>,
    root: &DyadicBox,
) -> (bool, DyadicBox, Taint) {
    let mut stack = vec![Frame::enter(root.clone())];
    let mut ret = (true, root.clone(), Taint::Gap); // overwritten at every pop
    while let Some(frame) = stack.last_mut() {
        match frame.phase {
            Phase::Enter => {
                cx.stats.skeleton_calls += 1;
                if let Some((w, t)) = cx.kb.find_superbox(&frame.target) {
                    ret = (true, w, t);
                    stack.pop();
                    continue;
                }
                if frame.target.is_unit() {
                    if let Some(outs) = cx.outputs.as_mut() {
                        cx.stats.output_count += 1;
                        emit(&mut cx.trace, || TraceEvent::Output {
                            point: frame.target.to_string(),
                        });
                        let fresh = cx.kb.insert(&frame.target, Taint::Output);
                        debug_assert!(fresh, "reported point was already stored");
                        outs.push(frame.target.clone());
                        ret = (true, frame.target.clone(), Taint::Output);
                    } else {
                        ret = (false, frame.target.clone(), Taint::Output);
                    }
                    stack.pop();
                    continue;
                }
                let dim = frame
                    .target
                    .first_thick_dim()
                    .expect("non-unit box has a thick dimension");
                let comp = frame.target.comp(dim);
                let left = frame.target.with_comp(dim, comp.child(0));
                frame.right = Some(frame.target.with_comp(dim, comp.child(1)));
                frame.split_dim = dim;
                frame.phase = Phase::AfterLeft;
                stack.push(Frame::enter(left));
            }
            Phase::AfterLeft => {
                // An uncovered point propagates as is; a half witness that
                // swallows the whole target is already this frame's answer.
                if !ret.0 || ret.1.contains(&frame.target) {
                    stack.pop();
                    continue;
                }
                frame.left_witness = Some((ret.1.clone(), ret.2));
                frame.phase = Phase::AfterRight;
                let right = frame.right.take().expect("right half staged at split");
                stack.push(Frame::enter(right));
            }
            Phase::AfterRight => {
                if !ret.0 || ret.1.contains(&frame.target) {
                    stack.pop();
                    continue;
                }
                let (w1, t1) = frame.left_witness.take().expect("left witness staged");
                let (w2, t2) = (ret.1.clone(), ret.2);
                let dim = frame.split_dim;
                if cx.assert_ordered {
                    assert!(
                        is_ordered_instance(&w1, &w2, dim),
                        "unordered resolution at level {dim}: {w1} with {w2}"
                    );
                }
                let w = resolve(&w1, &w2, dim)
                    .expect("half witnesses resolve at the split dimension");
                let t = Taint::combine(t1, t2);
                match t {
                    Taint::Gap => cx.stats.resolutions_gap += 1,
                    Taint::Output => cx.stats.resolutions_output += 1,
                }
                cx.stats.resolutions_by_attr[cx.sao.attr(dim)] += 1;
                let cached = cx.cache && {
                    let fresh = cx.kb.insert(&w, t);
                    debug_assert!(fresh, "a stored resolvent would have covered the target");
                    fresh
                };
                emit(&mut cx.trace, || TraceEvent::Resolve {
                    left: w1.to_string(),
                    right: w2.to_string(),
                    dim,
                    result: w.to_string(),
                    taint: t.label().into(),
                    cached,
                });
                ret = (true, w, t);
                stack.pop();
            }
        }
    }
    ret
}

/// Whether every component after the first partial one is λ — the shape of
/// every box reachable by first-thick splitting from the universal box.
fn is_prefix_shape(b: &DyadicBox) -> bool {
    match b.first_thick_dim() {
        None => true,
        Some(i) => (i + 1..b.n()).all(|j| b.comp(j).is_lambda()),
    }
}

/// One skeleton descent over `target` (run order) against `kb`.
///
/// Returns a cover box containing `target` when covered, otherwise the
/// first uncovered unit point in run order. `cache` controls whether
/// resolvents are retained. Resolution counters land in `stats`; on
/// prefix-shaped targets every resolution is additionally checked to be an
/// ordered instance.
pub fn tetris_skeleton(
    kb: &mut TaintedKb,
    target: &DyadicBox,
    sao: &Sao,
    cache: bool,
    stats: &mut RunStats,
) -> SkeletonResult {
    debug_assert_eq!(target.n(), sao.n());
    let mut cx = SkeletonCx {
        kb,
        sao,
        cache,
        outputs: None,
        assert_ordered: is_prefix_shape(target),
        stats,
        trace: None,
    };
    let (covered, witness, _) = skeleton_loop(&mut cx, target);
    SkeletonResult { covered, witness }
}

// --- outer loop ------------------------------------------------------------------------

/// Solves the cover problem presented by `oracle`: repeatedly descends on
/// the universal box and, at each uncovered point, either loads the
/// oracle's containing boxes or reports the point as an output tuple.
///
/// Returns the tuples (original attribute order, ascending in run-order
/// lexicographic sequence) and the run counters. The load-balanced modes
/// run through the balance module and are rejected here.
pub fn tetris(
    oracle: &dyn BoxOracle,
    mode: EngineMode,
    sao: &Sao,
) -> Result<(Vec<DyadicBox>, RunStats)> {
    let (tuples, stats, _) = tetris_run(oracle, mode, sao, false)?;
    Ok((tuples, stats))
}

/// As [`tetris`], optionally recording a replayable event trace.
pub fn tetris_run(
    oracle: &dyn BoxOracle,
    mode: EngineMode,
    sao: &Sao,
    record_trace: bool,
) -> Result<(Vec<DyadicBox>, RunStats, Vec<TraceEvent>)> {
    if mode.is_lb() {
        return Err(Error::UnsupportedMode(format!("{mode} runs through the balance module")));
    }
    let (d, n) = (oracle.d(), oracle.n());
    if sao.n() != n {
        return Err(Error::BadOrder(format!(
            "order covers {} attributes, instance has {n}",
            sao.n()
        )));
    }
    let mut stats = RunStats::new(n);
    let mut trace: Option<Vec<TraceEvent>> = record_trace.then(Vec::new);
    if let Some(t) = trace.as_mut() {
        t.push(TraceEvent::Begin { d, n, mode: mode.name().into(), sao: sao.order().to_vec() });
    }
    let mut kb = TaintedKb::new(d, n);
    if matches!(mode, EngineMode::Preloaded | EngineMode::PreloadedNoCache) {
        let mut loaded = Vec::new();
        for b in oracle.all_boxes() {
            let rb = sao.to_run_space(&b);
            if kb.insert(&rb, Taint::Gap) {
                stats.boxes_loaded += 1;
                if record_trace {
                    loaded.push(rb.to_string());
                }
            }
        }
        if let Some(t) = trace.as_mut() {
            t.push(TraceEvent::Load { boxes: loaded, probe: None });
        }
    }
    let universal = DyadicBox::universal(d, n);
    let mut outputs: Vec<DyadicBox> = Vec::new();
    if mode == EngineMode::PreloadedNoCache {
        // Tree-shaped proofs: one descent reports every uncovered point.
        let mut cx = SkeletonCx {
            kb: &mut kb,
            sao,
            cache: false,
            outputs: Some(&mut outputs),
            assert_ordered: true,
            stats: &mut stats,
            trace: trace.as_mut(),
        };
        let (covered, _, _) = skeleton_loop(&mut cx, &universal);
        debug_assert!(covered, "in-descent reporting leaves nothing uncovered");
    } else {
        loop {
            let mut cx = SkeletonCx {
                kb: &mut kb,
                sao,
                cache: true,
                outputs: None,
                assert_ordered: true,
                stats: &mut stats,
                trace: trace.as_mut(),
            };
            let (covered, w, _) = skeleton_loop(&mut cx, &universal);
            if covered {
                break;
            }
            stats.probes += 1;
            emit(&mut trace.as_mut(), || TraceEvent::Probe { point: w.to_string() });
            let found = oracle.containing(&sao.to_original_space(&w));
            if found.is_empty() {
                stats.output_count += 1;
                emit(&mut trace.as_mut(), || TraceEvent::Output { point: w.to_string() });
                let fresh = kb.insert(&w, Taint::Output);
                debug_assert!(fresh, "reported point was already stored");
                outputs.push(w);
            } else {
                let mut loaded = Vec::new();
                for b in &found {
                    let rb = sao.to_run_space(b);
                    debug_assert!(rb.contains(&w), "oracle returned a box missing its probe");
                    let fresh = kb.insert(&rb, Taint::Gap);
                    debug_assert!(fresh, "a stored containing box would have covered the probe");
                    stats.boxes_loaded += 1;
                    if record_trace {
                        loaded.push(rb.to_string());
                    }
                }
                if let Some(t) = trace.as_mut() {
                    t.push(TraceEvent::Load { boxes: loaded, probe: Some(w.to_string()) });
                }
            }
        }
    }
    debug_assert_eq!(stats.output_count as usize, outputs.len());
    let tuples = outputs.iter().map(|b| sao.to_original_space(b)).collect();
    Ok((tuples, stats, trace.unwrap_or_default()))
}

// --- order suggestion ---------------------------------------------------------------------

/// Strategy for choosing a splitting attribute order from a query shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaoStrategy {
    /// Reverse of a GYO elimination order (α-acyclic inputs only).
    ReverseGyo,
    /// Exhaustive minimum-induced-width order (at most 12 attributes).
    MinInducedWidth,
    /// Identity order.
    Fixed,
}

impl FromStr for SaoStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reverse-gyo" => Ok(SaoStrategy::ReverseGyo),
            "min-width" => Ok(SaoStrategy::MinInducedWidth),
            "fixed" => Ok(SaoStrategy::Fixed),
            other => Err(Error::InvalidParameter(format!("unknown order strategy `{other}`"))),
        }
    }
}

/// Chooses a splitting order for the query hypergraph.
pub fn suggest_sao(hg: &Hypergraph, strategy: SaoStrategy) -> Result<Sao> {
    match strategy {
        SaoStrategy::ReverseGyo => {
            let mut order = crate::joins::gyo_eliminate(hg).ok_or(Error::NotAcyclic)?;
            order.reverse();
            Sao::new(order)
        }
        SaoStrategy::MinInducedWidth => {
            let (order, _) = crate::joins::min_width_order(hg)?;
            Sao::new(order)
        }
        SaoStrategy::Fixed => Ok(Sao::identity(hg.n())),
    }
}

// --- tests ---------------------------------------------------------------------------------
