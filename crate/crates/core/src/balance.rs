//! Load-balanced solver modes: balanced dimension partitions, the
//! dimension-doubling coordinate map, and the two engine variants that run
//! on it.
//!
//! A run whose stored components pile up deep inside one subinterval of
//! one dimension degrades the cover search: every probe in that region
//! rediscovers the same long prefixes. The balanced modes split each of
//! the first `n − 2` run dimensions into a prefix-free partition sized so
//! that no member strictly contains more than `√|C|` stored components,
//! then solve in a doubled coordinate space where every balanced component
//! is cut at its partition boundary. Containment is preserved in both
//! directions, so cover status and output tuples transfer back one to one.

use crate::dyadic::{DyadicBox, DyadicInterval, MAX_WIDTH};
use crate::engine::{
    emit, skeleton_loop, tetris_run, BoxOracle, EngineMode, RunStats, Sao, SkeletonCx, TaintedKb,
    TraceEvent,
};
use crate::resolution::Taint;
use crate::{Error, Result};

// --- dimension partitions ----------------------------------------------------------

/// A prefix-free set of intervals jointly covering one dimension's domain,
/// kept in lexicographic order. Members are only ever replaced by their
/// two children, so the sequence of partitions over a run is
/// refinement-ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionPartition {
    attr: usize,
    members: Vec<DyadicInterval>,
}

impl DimensionPartition {
    /// The one-member partition `{λ}` of run dimension `attr`.
    #[must_use]
    pub fn trivial(attr: usize) -> Self {
        Self { attr, members: vec![DyadicInterval::LAMBDA] }
    }

    /// Run-level dimension this partition describes.
    #[must_use]
    pub fn attr(&self) -> usize {
        self.attr
    }

    /// Members in lexicographic order.
    #[must_use]
    pub fn members(&self) -> &[DyadicInterval] {
        &self.members
    }

    /// Number of members.
    #[must_use]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Never true: a partition always has at least one member.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The unique member that is a prefix of `x` (possibly `x` itself), if
    /// `x` is deep enough to reach one.
    #[must_use]
    pub fn member_prefix_of(&self, x: DyadicInterval) -> Option<DyadicInterval> {
        self.members.iter().copied().find(|m| m.contains(x))
    }

    /// Cuts a component at the partition boundary: a component at or above
    /// member depth is `(itself, λ)`, one below splits into its member and
    /// the remainder.
    #[must_use]
    pub fn split_component(&self, s: DyadicInterval) -> (DyadicInterval, DyadicInterval) {
        match self.member_prefix_of(s) {
            Some(m) => (m, s.strip_prefix(m).expect("member is a prefix")),
            None => (s, DyadicInterval::LAMBDA),
        }
    }

    /// Replaces member `x` by its two children, keeping lexicographic
    /// order. Returns whether `x` was a member.
    pub fn split(&mut self, x: DyadicInterval) -> bool {
        match self.members.iter().position(|&m| m == x) {
            Some(i) => {
                self.members[i] = x.child(0);
                self.members.insert(i + 1, x.child(1));
                true
            }
            None => false,
        }
    }

    /// Checks prefix-freeness and exact coverage of the domain.
    #[must_use]
    pub fn is_valid(&self) -> bool {
        let prefix_free = self.members.iter().enumerate().all(|(i, &a)| {
            self.members.iter().skip(i + 1).all(|&b| !a.contains(b) && !b.contains(a))
        });
        let total: u128 = self.members.iter().map(|m| 1u128 << (MAX_WIDTH - m.len())).sum();
        prefix_free && total == 1u128 << MAX_WIDTH
    }
}

/// Boxes whose component at `attr` lies strictly inside `x`.
fn strict_inside_count(boxes: &[DyadicBox], attr: usize, x: DyadicInterval) -> usize {
    boxes.iter().filter(|b| b.comp(attr) != x && x.contains(b.comp(attr))).count()
}

/// Integer form of `count > √total`.
fn heavy(count: usize, total: usize) -> bool {
    (count as u128) * (count as u128) > total as u128
}

/// Builds one dimension's balanced partition offline: starting from `{λ}`,
/// every member strictly containing more than `√|C|` of the boxes'
/// components at `attr` is split, members scanned in lexicographic order.
#[must_use]
pub fn build_balanced_partition(boxes: &[DyadicBox], attr: usize) -> DimensionPartition {
    let mut p = DimensionPartition::trivial(attr);
    let mut idx = 0;
    // Splitting a member puts its children where it was, so a plain index
    // walk revisits them in order; depth is bounded by the longest
    // component, where strict containment bottoms out at zero.
    while idx < p.members.len() {
        let x = p.members[idx];
        if heavy(strict_inside_count(boxes, attr, x), boxes.len()) {
            p.split(x);
        } else {
            idx += 1;
        }
    }
    p
}

// --- the balanced coordinate map -----------------------------------------------------

/// The dimension-doubling coordinate map of the load-balanced modes.
///
/// The first `n − 2` run dimensions (the balanced ones) each carry a
/// partition. A box's component at balanced level `i` is cut at the
/// partition boundary into a head and a continuation; the lifted box holds
/// the heads in front, the last two run components next in swapped order,
/// and the continuations behind, mirrored:
///
/// ```text
/// ⟨head_0, …, head_{n−3}, c_{n−1}, c_{n−2}, cont_{n−3}, …, cont_0⟩
/// ```
///
/// Every stored head is a member or a member prefix, so a head together
/// with enough continuation bits determines the original component.
#[derive(Clone, Debug)]
pub struct BalancedMap {
    d: u8,
    n: usize,
    partitions: Vec<DimensionPartition>,
}

impl BalancedMap {
    /// The identity map: every balanced dimension still partitioned `{λ}`.
    #[must_use]
    pub fn trivial(d: u8, n: usize) -> Self {
        debug_assert!(n >= 3, "balancing needs at least three dimensions");
        Self { d, n, partitions: (0..n - 2).map(DimensionPartition::trivial).collect() }
    }

    /// Builds every partition offline from the full box set (run order).
    #[must_use]
    pub fn from_boxes(d: u8, n: usize, boxes: &[DyadicBox]) -> Self {
        debug_assert!(n >= 3, "balancing needs at least three dimensions");
        Self { d, n, partitions: (0..n - 2).map(|i| build_balanced_partition(boxes, i)).collect() }
    }

    /// Number of lifted dimensions, `2n − 2`.
    #[must_use]
    pub fn lifted_n(&self) -> usize {
        2 * self.n - 2
    }

    /// Partitions, indexed by balanced run level.
    #[must_use]
    pub fn partitions(&self) -> &[DimensionPartition] {
        &self.partitions
    }

    /// The continuation slot paired with balanced level `i`.
    fn mate(&self, i: usize) -> usize {
        self.lifted_n() - 1 - i
    }

    /// Maps a run-space box into lifted coordinates.
    #[must_use]
    pub fn balance_box(&self, b: &DyadicBox) -> DyadicBox {
        debug_assert_eq!(b.n(), self.n);
        let mut comps = vec![DyadicInterval::LAMBDA; self.lifted_n()];
        for (i, p) in self.partitions.iter().enumerate() {
            let (head, cont) = p.split_component(b.comp(i));
            comps[i] = head;
            comps[self.mate(i)] = cont;
        }
        comps[self.n - 2] = b.comp(self.n - 1);
        comps[self.n - 1] = b.comp(self.n - 2);
        DyadicBox::new(self.d, comps)
    }

    /// Maps a lifted point back to the run-space unit it denotes. Every
    /// balanced component must carry a full member and its mate enough
    /// continuation bits — lifted units always do, as do balanced images
    /// of run-space units.
    #[must_use]
    pub fn unbalance_point(&self, u: &DyadicBox) -> DyadicBox {
        debug_assert_eq!(u.n(), self.lifted_n());
        let d = self.d;
        let mut comps = vec![DyadicInterval::LAMBDA; self.n];
        for (i, p) in self.partitions.iter().enumerate() {
            let m = p.member_prefix_of(u.comp(i)).expect("balanced component reaches a member");
            let cont = u.comp(self.mate(i));
            debug_assert!(cont.len() >= d - m.len(), "continuation too short for a point");
            comps[i] = m.concat(cont.prefix(d - m.len()));
        }
        comps[self.n - 1] = u.comp(self.n - 2);
        comps[self.n - 2] = u.comp(self.n - 1);
        let out = DyadicBox::new(d, comps);
        debug_assert!(out.is_unit(), "a lifted point determines a full unit");
        out
    }
}

/// Rewrites every stored box whose head at `dim` is exactly the just-split
/// member `x` and whose continuation is non-empty: the continuation's
/// first bit moves across the boundary, taints carry over. Returns the
/// `(old, new)` pairs in enumeration order.
pub fn update_balance(
    kb: &mut TaintedKb,
    lifted_n: usize,
    dim: usize,
    x: DyadicInterval,
) -> Vec<(DyadicBox, DyadicBox)> {
    let mate = lifted_n - 1 - dim;
    let mut rewrites = Vec::new();
    for (b, t) in kb.tainted_boxes() {
        let cont = b.comp(mate);
        if b.comp(dim) != x || cont.is_lambda() {
            continue;
        }
        let head = cont.prefix(1);
        let rest = cont.strip_prefix(head).expect("one-bit prefix strips");
        let nb = b.with_comp(dim, x.concat(head)).with_comp(mate, rest);
        let moved = kb.remove(&b);
        debug_assert_eq!(moved, Some(t), "rewritten box was stored with its taint");
        let fresh = kb.insert(&nb, t);
        debug_assert!(fresh, "rewrite target was already stored");
        rewrites.push((b, nb));
    }
    rewrites
}

// --- load-balanced runs -----------------------------------------------------------

/// Lifted level → original attribute. The head and continuation of run
/// level `i` both fold to `sao.attr(i)`; the two middle slots hold the
/// last two run levels, swapped.
fn lifted_attr_fold(sao: &Sao) -> Vec<usize> {
    let n = sao.n();
    let mut fold = Vec::with_capacity(2 * n - 2);
    fold.extend((0..n - 2).map(|i| sao.attr(i)));
    fold.push(sao.attr(n - 1));
    fold.push(sao.attr(n - 2));
    fold.extend((0..n - 2).rev().map(|i| sao.attr(i)));
    fold
}

/// Collapses lifted-run counters back onto the original attributes and
/// attaches the final partition sizes (indexed by balanced run level).
fn fold_stats(lifted: &RunStats, fold: &[usize], n: usize, map: &BalancedMap) -> RunStats {
    let mut out = RunStats::new(n);
    out.resolutions_gap = lifted.resolutions_gap;
    out.resolutions_output = lifted.resolutions_output;
    out.probes = lifted.probes;
    out.boxes_loaded = lifted.boxes_loaded;
    out.skeleton_calls = lifted.skeleton_calls;
    out.output_count = lifted.output_count;
    out.update_balance_calls = lifted.update_balance_calls;
    for (k, &count) in lifted.resolutions_by_attr.iter().enumerate() {
        out.resolutions_by_attr[fold[k]] += count;
    }
    out.partition_sizes = map.partitions.iter().map(DimensionPartition::len).collect();
    out
}

/// Splits every currently heavy partition member against the boxes loaded
/// so far and rewrites the stored boxes accordingly.
fn rebalance(
    map: &mut BalancedMap,
    loaded: &[DyadicBox],
    kb: &mut TaintedKb,
    stats: &mut RunStats,
    trace: &mut Option<Vec<TraceEvent>>,
) {
    let lifted_n = map.lifted_n();
    for i in 0..map.n - 2 {
        let mut idx = 0;
        while idx < map.partitions[i].members.len() {
            let x = map.partitions[i].members[idx];
            if heavy(strict_inside_count(loaded, i, x), loaded.len()) {
                map.partitions[i].split(x);
                let rewrites = update_balance(kb, lifted_n, i, x);
                stats.update_balance_calls += 1;
                emit(&mut trace.as_mut(), || TraceEvent::Rebalance {
                    dim: i,
                    interval: x.to_string(),
                    rewrites: rewrites
                        .iter()
                        .map(|(from, to)| (from.to_string(), to.to_string()))
                        .collect(),
                });
            } else {
                idx += 1;
            }
        }
    }
}

/// Load-balanced preloaded run: partitions are built offline from the full
/// box set, every box is loaded up front in lifted coordinates, and the
/// probe loop reports the uncovered points.
///
/// Returns tuples in original attribute order, ascending in run-order
/// lexicographic sequence, plus the folded run counters.
pub fn tetris_preloaded_lb(
    oracle: &dyn BoxOracle,
    sao: &Sao,
) -> Result<(Vec<DyadicBox>, RunStats)> {
    let (tuples, stats, _) = tetris_lb_run(oracle, EngineMode::PreloadedLb, sao, false)?;
    Ok((tuples, stats))
}

/// Load-balanced reloaded run: boxes are fetched at uncovered points;
/// partitions start trivial and split online whenever a member turns heavy
/// against the boxes loaded so far, rewriting the stored boxes in place.
pub fn tetris_reloaded_lb(oracle: &dyn BoxOracle, sao: &Sao) -> Result<(Vec<DyadicBox>, RunStats)> {
    let (tuples, stats, _) = tetris_lb_run(oracle, EngineMode::ReloadedLb, sao, false)?;
    Ok((tuples, stats))
}

/// The load-balanced outer loop behind [`tetris_preloaded_lb`] and
/// [`tetris_reloaded_lb`], optionally recording a replayable trace.
///
/// The trace is written in lifted coordinates: its header carries the
/// lifted dimension count and the fold from lifted levels to original
/// attributes, and rebalance events record every box rewrite. With fewer
/// than three attributes the lift adds nothing, so the corresponding plain
/// mode runs and its records are returned unchanged.
pub fn tetris_lb_run(
    oracle: &dyn BoxOracle,
    mode: EngineMode,
    sao: &Sao,
    record_trace: bool,
) -> Result<(Vec<DyadicBox>, RunStats, Vec<TraceEvent>)> {
    let (plain, online) = match mode {
        EngineMode::PreloadedLb => (EngineMode::Preloaded, false),
        EngineMode::ReloadedLb => (EngineMode::Reloaded, true),
        other => {
            return Err(Error::UnsupportedMode(format!("{other} is not a load-balanced mode")))
        }
    };
    let (d, n) = (oracle.d(), oracle.n());
    if sao.n() != n {
        return Err(Error::BadOrder(format!(
            "order covers {} attributes, instance has {n}",
            sao.n()
        )));
    }
    if n <= 2 {
        return tetris_run(oracle, plain, sao, record_trace);
    }

    let lifted_n = 2 * n - 2;
    let fold = lifted_attr_fold(sao);
    let mut stats = RunStats::new(lifted_n);
    let mut trace: Option<Vec<TraceEvent>> = record_trace.then(Vec::new);
    if let Some(t) = trace.as_mut() {
        t.push(TraceEvent::Begin { d, n: lifted_n, mode: mode.name().into(), sao: fold.clone() });
    }
    let lifted_sao = Sao::identity(lifted_n);
    let mut kb = TaintedKb::new(d, lifted_n);
    // Run-space copies of everything loaded, for the online heavy checks.
    let mut loaded_run: Vec<DyadicBox> = Vec::new();
    let mut map;
    if online {
        map = BalancedMap::trivial(d, n);
    } else {
        let run_boxes: Vec<DyadicBox> =
            oracle.all_boxes().iter().map(|b| sao.to_run_space(b)).collect();
        map = BalancedMap::from_boxes(d, n, &run_boxes);
        let mut loaded = Vec::new();
        for rb in &run_boxes {
            let lb = map.balance_box(rb);
            if kb.insert(&lb, Taint::Gap) {
                stats.boxes_loaded += 1;
                if record_trace {
                    loaded.push(lb.to_string());
                }
            }
        }
        emit(&mut trace.as_mut(), || TraceEvent::Load { boxes: loaded, probe: None });
    }

    let universal = DyadicBox::universal(d, lifted_n);
    let mut outputs: Vec<DyadicBox> = Vec::new(); // run space
    loop {
        let mut cx = SkeletonCx {
            kb: &mut kb,
            sao: &lifted_sao,
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
        let q = map.unbalance_point(&w);
        let found = oracle.containing(&sao.to_original_space(&q));
        if found.is_empty() {
            stats.output_count += 1;
            // The balanced image of q covers every lifted unit denoting q,
            // so the point is reported exactly once.
            let cover = map.balance_box(&q);
            debug_assert!(cover.contains(&w), "balanced image covers the lifted probe");
            emit(&mut trace.as_mut(), || TraceEvent::Output { point: cover.to_string() });
            let fresh = kb.insert(&cover, Taint::Output);
            debug_assert!(fresh, "reported point was already stored");
            outputs.push(q);
        } else {
            let mut loaded = Vec::new();
            for b in &found {
                let rb = sao.to_run_space(b);
                debug_assert!(rb.contains(&q), "oracle returned a box missing its probe");
                let lb = map.balance_box(&rb);
                debug_assert!(lb.contains(&w), "balanced load contains the lifted probe");
                let fresh = kb.insert(&lb, Taint::Gap);
                debug_assert!(fresh, "a stored containing box would have covered the probe");
                stats.boxes_loaded += 1;
                if record_trace {
                    loaded.push(lb.to_string());
                }
                if online {
                    loaded_run.push(rb);
                }
            }
            emit(&mut trace.as_mut(), || TraceEvent::Load {
                boxes: loaded,
                probe: Some(w.to_string()),
            });
            if online {
                rebalance(&mut map, &loaded_run, &mut kb, &mut stats, &mut trace);
            }
        }
    }

    outputs.sort_by_cached_key(|q| q.values().expect("output points are units"));
    let tuples = outputs.iter().map(|q| sao.to_original_space(q)).collect();
    let folded = fold_stats(&stats, &fold, n, &map);
    Ok((tuples, folded, trace.unwrap_or_default()))
}

// --- tests ------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::BoxFile;
    use crate::engine::{tetris, MaterializedOracle};
    use crate::instances::{gen_fig_triangle, gen_geo_lb_half, TriangleVariant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bx(s: &str, d: u8, n: usize) -> DyadicBox {
        BoxFile::parse_box(s, d, n).unwrap()
    }

    fn iv(s: &str) -> DyadicInterval {
        DyadicInterval::parse(s).unwrap()
    }

    /// A three-dimensional map with the balanced dimension split `{0, 1}`.
    fn map_01(d: u8) -> BalancedMap {
        let mut map = BalancedMap::trivial(d, 3);
        assert!(map.partitions[0].split(DyadicInterval::LAMBDA));
        map
    }

    #[test]
    fn partition_split_keeps_order_and_validity() {
        let mut p = DimensionPartition::trivial(7);
        assert_eq!(p.attr(), 7);
        assert_eq!(p.members(), &[DyadicInterval::LAMBDA]);
        assert!(p.split(DyadicInterval::LAMBDA));
        assert!(p.split(iv("0")));
        assert!(p.split(iv("01")));
        assert!(!p.split(iv("0"))); // no longer a member
        assert_eq!(p.members(), &[iv("00"), iv("010"), iv("011"), iv("1")]);
        assert!(p.is_valid());

        let gap = DimensionPartition { attr: 0, members: vec![iv("00"), iv("1")] };
        assert!(!gap.is_valid());
        let overlap = DimensionPartition { attr: 0, members: vec![iv("0"), iv("01"), iv("1")] };
        assert!(!overlap.is_valid());
    }

    #[test]
    fn component_split_respects_the_boundary() {
        let mut p = DimensionPartition::trivial(0);
        p.split(DyadicInterval::LAMBDA);
        p.split(iv("0"));
        // members {00, 01, 1}
        assert_eq!(p.split_component(iv("001")), (iv("00"), iv("1")));
        assert_eq!(p.split_component(iv("00")), (iv("00"), DyadicInterval::LAMBDA));
        assert_eq!(p.split_component(iv("0")), (iv("0"), DyadicInterval::LAMBDA));
        assert_eq!(
            p.split_component(DyadicInterval::LAMBDA),
            (DyadicInterval::LAMBDA, DyadicInterval::LAMBDA)
        );
        assert_eq!(p.split_component(iv("110")), (iv("1"), iv("10")));
        assert_eq!(p.member_prefix_of(iv("0")), None);
        assert_eq!(p.member_prefix_of(iv("011")), Some(iv("01")));
    }

    #[test]
    fn offline_partition_splits_exactly_the_heavy_members() {
        // Nine identical deep components: √9 = 3, so every ancestor of
        // `000` is heavy and the chain splits down to depth three.
        let boxes: Vec<DyadicBox> = (0..9).map(|_| bx("<000,*>", 3, 2)).collect();
        let p = build_balanced_partition(&boxes, 0);
        assert_eq!(p.members(), &[iv("000"), iv("001"), iv("01"), iv("1")]);
        assert!(p.is_valid());
        // The λ components at dimension 1 are never strictly inside.
        let q = build_balanced_partition(&boxes, 1);
        assert_eq!(q.members(), &[DyadicInterval::LAMBDA]);
        assert_eq!(build_balanced_partition(&[], 0).members(), &[DyadicInterval::LAMBDA]);
    }

    #[test]
    fn balance_box_cuts_heads_and_swaps_the_middle() {
        let map = map_01(2);
        assert_eq!(map.lifted_n(), 4);
        assert_eq!(map.balance_box(&bx("<01,*,*>", 2, 3)), bx("<0,*,*,1>", 2, 4));
        assert_eq!(map.balance_box(&bx("<0,*,*>", 2, 3)), bx("<0,*,*,*>", 2, 4));
        assert_eq!(map.balance_box(&bx("<*,0,1>", 2, 3)), bx("<*,1,0,*>", 2, 4));
        assert_eq!(map.balance_box(&bx("<10,11,00>", 2, 3)), bx("<1,00,11,0>", 2, 4));
    }

    #[test]
    fn unbalance_inverts_balance_on_units() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xba1a);
        for d in 1..=4u8 {
            let mut map = BalancedMap::trivial(d, 3);
            // A random refinement of the balanced dimension.
            for _ in 0..rng.gen_range(0..=3) {
                let members = map.partitions[0].members().to_vec();
                let pick = members[rng.gen_range(0..members.len())];
                if pick.len() < d {
                    map.partitions[0].split(pick);
                }
            }
            for v0 in 0..1u64 << d {
                for v1 in 0..1u64 << d {
                    for v2 in 0..1u64 << d {
                        let unit = DyadicBox::new(
                            d,
                            vec![
                                DyadicInterval::new(v0, d),
                                DyadicInterval::new(v1, d),
                                DyadicInterval::new(v2, d),
                            ],
                        );
                        let lifted = map.balance_box(&unit);
                        assert_eq!(map.unbalance_point(&lifted), unit);
                    }
                }
            }
        }
    }

    #[test]
    fn balance_preserves_containment_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0a7);
        for _ in 0..40 {
            let d = rng.gen_range(1..=3u8);
            let mut map = BalancedMap::trivial(d, 3);
            for _ in 0..rng.gen_range(0..=3) {
                let members = map.partitions[0].members().to_vec();
                let pick = members[rng.gen_range(0..members.len())];
                if pick.len() < d {
                    map.partitions[0].split(pick);
                }
            }
            let boxes: Vec<DyadicBox> = (0..8)
                .map(|_| {
                    let comps = (0..3)
                        .map(|_| {
                            let len = rng.gen_range(0..=d);
                            DyadicInterval::new(rng.gen_range(0..1u64 << len), len)
                        })
                        .collect();
                    DyadicBox::new(d, comps)
                })
                .collect();
            for a in &boxes {
                for b in &boxes {
                    assert_eq!(
                        a.contains(b),
                        map.balance_box(a).contains(&map.balance_box(b)),
                        "containment must transfer: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn update_balance_moves_one_continuation_bit() {
        let mut kb = TaintedKb::new(2, 4);
        let crossing = bx("<0,*,*,01>", 2, 4);
        let exhausted = bx("<0,*,*,*>", 2, 4);
        let elsewhere = bx("<1,*,0,0>", 2, 4);
        kb.insert(&crossing, Taint::Output);
        kb.insert(&exhausted, Taint::Gap);
        kb.insert(&elsewhere, Taint::Gap);

        let rewrites = update_balance(&mut kb, 4, 0, iv("0"));
        assert_eq!(rewrites, vec![(crossing.clone(), bx("<00,*,*,1>", 2, 4))]);
        assert_eq!(kb.remove(&crossing), None, "old form is gone");
        assert_eq!(kb.remove(&bx("<00,*,*,1>", 2, 4)), Some(Taint::Output), "taint carried");
        assert_eq!(kb.remove(&exhausted), Some(Taint::Gap), "λ continuation untouched");
        assert_eq!(kb.remove(&elsewhere), Some(Taint::Gap), "other heads untouched");
    }

    #[test]
    fn lb_modes_match_plain_on_the_triangle_fixtures() {
        for variant in [TriangleVariant::Empty, TriangleVariant::NonEmpty] {
            let inst = gen_fig_triangle(variant, 2).unwrap();
            let oracle = inst.oracle();
            let sao = Sao::identity(3);
            let (plain, _) = tetris(&oracle, EngineMode::Preloaded, &sao).unwrap();
            let (pre, pre_stats) = tetris_preloaded_lb(&oracle, &sao).unwrap();
            let (re, _) = tetris_reloaded_lb(&oracle, &sao).unwrap();
            assert_eq!(pre, plain);
            assert_eq!(re, plain);
            assert_eq!(pre_stats.output_count, inst.expected_outputs.unwrap());
            assert_eq!(pre_stats.partition_sizes.len(), 1);
            assert_eq!(pre_stats.update_balance_calls, 0);
        }
    }

    #[test]
    fn lb_covers_the_minimal_suffix_family_without_outputs() {
        let inst = gen_geo_lb_half(3, 4).unwrap();
        let oracle = inst.oracle();
        let sao = Sao::identity(3);
        for run in [tetris_preloaded_lb(&oracle, &sao), tetris_reloaded_lb(&oracle, &sao)] {
            let (tuples, stats) = run.unwrap();
            assert!(tuples.is_empty());
            assert_eq!(stats.output_count, 0);
            assert_eq!(stats.resolutions_output, 0);
        }
    }

    #[test]
    fn lb_on_an_empty_instance_reports_every_point() {
        let oracle = MaterializedOracle::new(1, 3, Vec::new());
        let sao = Sao::identity(3);
        let (tuples, stats) = tetris_reloaded_lb(&oracle, &sao).unwrap();
        assert_eq!(tuples.len(), 8);
        assert_eq!(stats.output_count, 8);
        assert_eq!(stats.boxes_loaded, 0);
    }

    fn random_instance(rng: &mut ChaCha8Rng) -> (u8, usize, Vec<DyadicBox>) {
        let n = rng.gen_range(3..=4usize);
        let d = rng.gen_range(1..=if n == 3 { 3u8 } else { 2u8 });
        let count = rng.gen_range(0..=12usize);
        let boxes = (0..count)
            .map(|_| {
                let comps = (0..n)
                    .map(|_| {
                        let len = rng.gen_range(0..=d);
                        DyadicInterval::new(rng.gen_range(0..1u64 << len), len)
                    })
                    .collect();
                DyadicBox::new(d, comps)
            })
            .collect();
        (d, n, boxes)
    }

    fn random_sao(rng: &mut ChaCha8Rng, n: usize) -> Sao {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        Sao::new(order).unwrap()
    }

    #[test]
    fn lb_modes_agree_with_plain_modes_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1b05);
        for _ in 0..40 {
            let (d, n, boxes) = random_instance(&mut rng);
            let sao = random_sao(&mut rng, n);
            let oracle = MaterializedOracle::new(d, n, boxes);
            let (plain_pre, _) = tetris(&oracle, EngineMode::Preloaded, &sao).unwrap();
            let (plain_re, _) = tetris(&oracle, EngineMode::Reloaded, &sao).unwrap();
            assert_eq!(plain_pre, plain_re);

            let (pre, pre_stats) = tetris_preloaded_lb(&oracle, &sao).unwrap();
            let (re, re_stats) = tetris_reloaded_lb(&oracle, &sao).unwrap();
            assert_eq!(pre, plain_pre, "preloaded-lb tuples diverge");
            assert_eq!(re, plain_pre, "reloaded-lb tuples diverge");
            for stats in [&pre_stats, &re_stats] {
                assert_eq!(stats.resolutions_by_attr.len(), n);
                assert_eq!(
                    stats.resolutions_by_attr.iter().sum::<u64>(),
                    stats.total_resolutions()
                );
                assert_eq!(stats.partition_sizes.len(), n - 2);
            }

            // Runs are deterministic.
            let (pre2, pre_stats2) = tetris_preloaded_lb(&oracle, &sao).unwrap();
            assert_eq!((pre2, pre_stats2), (pre, pre_stats));
        }
    }

    #[test]
    fn reloaded_lb_trace_replays_to_the_reported_partitions() {
        let inst = gen_geo_lb_half(3, 8).unwrap();
        let oracle = inst.oracle();
        let sao = Sao::identity(3);
        let (_, stats, trace) =
            tetris_lb_run(&oracle, EngineMode::ReloadedLb, &sao, true).unwrap();

        let (d, lifted_n) = match &trace[0] {
            TraceEvent::Begin { d, n, mode, sao } => {
                assert_eq!(mode, "reloaded-lb");
                assert_eq!(sao, &[0, 2, 1, 0]);
                (*d, *n)
            }
            other => panic!("trace must open with a header, got {other:?}"),
        };
        assert_eq!(lifted_n, 4);

        // Replay: every rebalance splits a current member (so partitions
        // only ever refine), every fetched box contains its probe.
        let mut replayed = DimensionPartition::trivial(0);
        let mut rebalances = 0;
        for ev in &trace[1..] {
            match ev {
                TraceEvent::Rebalance { dim, interval, rewrites } => {
                    assert_eq!(*dim, 0);
                    assert!(replayed.split(iv(interval)), "rebalance of a non-member");
                    rebalances += 1;
                    for (from, to) in rewrites {
                        let from = bx(from, d, lifted_n);
                        let to = bx(to, d, lifted_n);
                        assert_eq!(from.comp(0), iv(interval));
                        assert_eq!(to.comp(0).prefix(from.comp(0).len()), from.comp(0));
                        assert_eq!(to.comp(0).len(), from.comp(0).len() + 1);
                        assert_eq!(from.comp(3).strip_prefix(from.comp(3).prefix(1)), Some(to.comp(3)));
                    }
                }
                TraceEvent::Load { boxes, probe: Some(p) } => {
                    let probe = bx(p, d, lifted_n);
                    for b in boxes {
                        assert!(bx(b, d, lifted_n).contains(&probe), "load missing its probe");
                    }
                }
                _ => {}
            }
        }
        assert!(rebalances > 0, "the suffix family must trigger online splits");
        assert_eq!(stats.update_balance_calls, rebalances);
        assert_eq!(stats.partition_sizes, vec![replayed.len()]);
        assert!(replayed.is_valid());
    }

    #[test]
    fn preloaded_lb_builds_its_partitions_offline() {
        let inst = gen_geo_lb_half(3, 8).unwrap();
        let oracle = inst.oracle();
        let sao = Sao::identity(3);
        let (tuples, stats) = tetris_preloaded_lb(&oracle, &sao).unwrap();
        assert!(tuples.is_empty(), "the suffix family is a cover");
        assert_eq!(stats.update_balance_calls, 0);
        assert_eq!(stats.partition_sizes.len(), 1);
        assert!(stats.partition_sizes[0] > 1, "96 stacked components must split");
    }

    #[test]
    fn lb_entry_rejects_plain_modes_and_bypasses_small_arity() {
        let oracle = MaterializedOracle::new(1, 3, Vec::new());
        let sao = Sao::identity(3);
        assert!(matches!(
            tetris_lb_run(&oracle, EngineMode::Preloaded, &sao, false),
            Err(Error::UnsupportedMode(_))
        ));
        assert!(matches!(
            tetris_lb_run(&oracle, EngineMode::PreloadedLb, &Sao::identity(2), false),
            Err(Error::BadOrder(_))
        ));

        // Two attributes: the lift is the identity, the plain mode runs.
        let small = MaterializedOracle::new(2, 2, vec![bx("<0,*>", 2, 2)]);
        let sao2 = Sao::identity(2);
        let (lb_tuples, lb_stats) = tetris_preloaded_lb(&small, &sao2).unwrap();
        let (tuples, stats) = tetris(&small, EngineMode::Preloaded, &sao2).unwrap();
        assert_eq!((lb_tuples, lb_stats), (tuples, stats));
    }
}
