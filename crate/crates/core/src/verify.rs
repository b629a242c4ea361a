//! Ground truth and run validation.
//!
//! [`brute_force_bcp`] enumerates the whole point space and is the oracle
//! every engine mode is tested against. [`validate_trace`] replays a
//! recorded run and re-checks each step's local guarantees (resolution
//! soundness, ordered format, taint bookkeeping, probe containment).

use std::collections::HashMap;
use std::fmt;

use crate::dyadic::{BoxFile, DyadicBox, DyadicInterval, MAX_WIDTH};
use crate::engine::{TaintedKb, TraceEvent};
use crate::resolution::{is_ordered_instance, resolve, Taint};
use crate::{Error, Result};

/// Exhaustive answer to a box-cover instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Unit boxes covered by no input box, sorted by coordinates.
    pub uncovered_points: Vec<DyadicBox>,
    /// True iff the boxes cover the whole space.
    pub covered_all: bool,
}

/// Point budget guard: by default instances beyond 2^24 points are refused.
const GUARD_BITS: u32 = 24;

/// Enumerates all `2^(d·n)` points and reports those in no box.
///
/// `force` overrides the `d·n ≤ 24` size guard (the caller accepts the
/// memory/time cost).
pub fn brute_force_bcp(boxes: &[DyadicBox], n: usize, d: u8, force: bool) -> Result<OracleResult> {
    let bits = u32::from(d) * n as u32;
    if bits > GUARD_BITS && !force {
        return Err(Error::GuardExceeded(format!(
            "d·n = {bits} exceeds {GUARD_BITS} (pass force to override)"
        )));
    }
    if bits > 34 {
        return Err(Error::GuardExceeded(format!("d·n = {bits} is beyond any practical budget")));
    }
    debug_assert!(boxes.iter().all(|b| b.d() == d && b.n() == n));

    let total = 1usize << bits;
    let mut covered = vec![false; total];
    // Row-major point index: attribute 0 is the most significant block.
    for b in boxes {
        mark_box(b, d, &mut covered);
    }

    let mut uncovered_points = Vec::new();
    for (idx, c) in covered.iter().enumerate() {
        if !c {
            let mut values = vec![0u64; n];
            for (i, v) in values.iter_mut().enumerate() {
                *v = ((idx >> (u32::from(d) * (n - 1 - i) as u32)) as u64) & ((1 << d) - 1);
            }
            uncovered_points.push(DyadicBox::unit_from_values(d, &values));
        }
    }
    let covered_all = uncovered_points.is_empty();
    Ok(OracleResult { uncovered_points, covered_all })
}

/// Marks every point of `b` in the row-major cover bitmap.
fn mark_box(b: &DyadicBox, d: u8, covered: &mut [bool]) {
    let n = b.n();
    // For each dimension the box is a contiguous value range; walk the
    // product space with an odometer over per-dimension offsets.
    let los: Vec<u64> = (0..n).map(|i| b.comp(i).lo(d)).collect();
    let his: Vec<u64> = (0..n).map(|i| b.comp(i).hi(d)).collect();
    let strides: Vec<usize> =
        (0..n).map(|i| 1usize << (u32::from(d) * (n - 1 - i) as u32)).collect();

    let base: usize = (0..n).map(|i| los[i] as usize * strides[i]).sum();
    let mut offsets = vec![0u64; n];
    let mut idx = base;
    loop {
        // The innermost dimension is contiguous; fill it in one run.
        let run = (his[n - 1] - los[n - 1] + 1) as usize;
        covered[idx..idx + run].fill(true);
        let mut i = n.saturating_sub(1);
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if offsets[i] + los[i] < his[i] {
                offsets[i] += 1;
                idx += strides[i];
                for j in i + 1..n - 1 {
                    idx -= offsets[j] as usize * strides[j];
                    offsets[j] = 0;
                }
                break;
            }
        }
    }
}

// --- trace validation ----------------------------------------------------------------

/// One rule broken by a recorded run, anchored to the offending event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceViolation {
    /// Zero-based index into the event list.
    pub event: usize,
    /// What went wrong, in terms of the replayed state.
    pub detail: String,
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event #{}: {}", self.event, self.detail)
    }
}

/// Outcome of replaying a trace; an empty violation list is a pass.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceReport {
    /// Number of events examined.
    pub checked_events: usize,
    /// Every broken rule, in event order.
    pub violations: Vec<TraceViolation>,
}

impl TraceReport {
    /// True iff no violation was found.
    #[must_use]
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Free-bit budget per resolvent for the pointwise soundness re-check; a
/// wider resolvent is still checked algebraically.
const POINTWISE_BITS: u32 = 16;

/// Replays a recorded run and re-checks each step's local guarantees:
///
/// * every resolution is in ordered format, reproduces exactly under the
///   resolution rule, carries the combined parent taint, and (for small
///   resolvents) is pointwise contained in its parents' union;
/// * every loaded box contains the probe that fetched it and is new;
/// * probes and reported outputs are uncovered when they happen, and
///   outputs are never repeated;
/// * rebalance rewrites move exactly one continuation bit of a stored box
///   across the split boundary, keep its taint, and leave no stored box
///   behind on the split member.
///
/// The report lists every violation; an empty report is a pass.
#[must_use]
pub fn validate_trace(trace: &[TraceEvent]) -> TraceReport {
    let mut report = TraceReport { checked_events: trace.len(), ..TraceReport::default() };
    let Some(first) = trace.first() else {
        report.violations.push(TraceViolation { event: 0, detail: "empty trace".into() });
        return report;
    };
    let &TraceEvent::Begin { d, n, ref mode, ref sao } = first else {
        report
            .violations
            .push(TraceViolation { event: 0, detail: "first event is not a run header".into() });
        return report;
    };
    if !(1..=MAX_WIDTH).contains(&d) || n == 0 {
        report.violations.push(TraceViolation {
            event: 0,
            detail: format!("header dimensions out of range: d={d}, n={n}"),
        });
        return report;
    }
    const MODES: [&str; 5] =
        ["preloaded", "reloaded", "preloaded-nocache", "preloaded-lb", "reloaded-lb"];
    if !MODES.contains(&mode.as_str()) {
        report
            .violations
            .push(TraceViolation { event: 0, detail: format!("unknown mode `{mode}`") });
    }
    if sao.len() != n || sao.iter().any(|&a| a >= n) {
        report.violations.push(TraceViolation {
            event: 0,
            detail: format!("attribute order {sao:?} does not address {n} levels"),
        });
    }

    // Replayed knowledge base plus every box the run has ever named (the
    // taint survives a rebalance rewrite removing the box from the base).
    let mut kb = TaintedKb::new(d, n);
    let mut seen: HashMap<DyadicBox, Taint> = HashMap::new();
    let parse = |s: &str| BoxFile::parse_box(s, d, n);

    for (i, ev) in trace.iter().enumerate().skip(1) {
        let flag = |detail: String| TraceViolation { event: i, detail };
        match ev {
            TraceEvent::Begin { .. } => {
                report.violations.push(flag("second run header".into()));
            }
            TraceEvent::Load { boxes, probe } => {
                let probe_box = match probe {
                    None => None,
                    Some(s) => match parse(s) {
                        Ok(p) if p.is_unit() => Some(p),
                        Ok(_) => {
                            report.violations.push(flag(format!("probe {s} is not a unit")));
                            None
                        }
                        Err(e) => {
                            report.violations.push(flag(format!("bad probe {s}: {e}")));
                            None
                        }
                    },
                };
                for s in boxes {
                    let b = match parse(s) {
                        Ok(b) => b,
                        Err(e) => {
                            report.violations.push(flag(format!("bad loaded box {s}: {e}")));
                            continue;
                        }
                    };
                    if let Some(p) = &probe_box {
                        if !b.contains(p) {
                            report.violations
                                .push(flag(format!("loaded box {s} misses its probe {p}")));
                        }
                    }
                    if seen.insert(b.clone(), Taint::Gap).is_some() {
                        report.violations.push(flag(format!("box {s} loaded twice")));
                    }
                    kb.insert(&b, Taint::Gap);
                }
            }
            TraceEvent::Probe { point } => match parse(point) {
                Ok(p) if p.is_unit() => {
                    if let Some((sb, _)) = kb.find_superbox(&p) {
                        report.violations
                            .push(flag(format!("probe at {p}, already covered by {sb}")));
                    }
                }
                Ok(_) => {
                    report.violations.push(flag(format!("probe {point} is not a unit")));
                }
                Err(e) => {
                    report.violations.push(flag(format!("bad probe {point}: {e}")));
                }
            },
            TraceEvent::Output { point } => {
                let b = match parse(point) {
                    Ok(b) => b,
                    Err(e) => {
                        report.violations.push(flag(format!("bad output {point}: {e}")));
                        continue;
                    }
                };
                if let Some((sb, _)) = kb.find_superbox(&b) {
                    report
                        .violations
                        .push(flag(format!("output {point} already covered by {sb}")));
                }
                if seen.insert(b.clone(), Taint::Output).is_some() {
                    report.violations.push(flag(format!("output {point} reported twice")));
                }
                kb.insert(&b, Taint::Output);
            }
            TraceEvent::Resolve { left, right, dim, result, taint, cached } => {
                let (Ok(l), Ok(r), Ok(w)) = (parse(left), parse(right), parse(result)) else {
                    report.violations.push(flag(format!(
                        "unparseable resolution {left} ⊕ {right} → {result}"
                    )));
                    continue;
                };
                if *dim >= n {
                    report.violations.push(flag(format!("resolution level {dim} out of range")));
                    continue;
                }
                let recorded = match taint.as_str() {
                    "gap" => Some(Taint::Gap),
                    "output" => Some(Taint::Output),
                    other => {
                        report.violations.push(flag(format!("unknown taint `{other}`")));
                        None
                    }
                };
                let parents = (seen.get(&l).copied(), seen.get(&r).copied());
                for (side, known) in [("left", parents.0), ("right", parents.1)] {
                    if known.is_none() {
                        report.violations
                            .push(flag(format!("{side} parent was never seen before")));
                    }
                }
                if !is_ordered_instance(&l, &r, *dim) {
                    report.violations
                        .push(flag(format!("unordered resolution {left} ⊕ {right} at {dim}")));
                }
                match resolve(&l, &r, *dim) {
                    Ok(expect) if expect == w => {}
                    Ok(expect) => report.violations.push(flag(format!(
                        "recorded resolvent {result}, rule gives {expect}"
                    ))),
                    Err(_) => report.violations
                        .push(flag(format!("{left} and {right} do not resolve at {dim}"))),
                }
                if let (Some(tl), Some(tr)) = parents {
                    let combined = Taint::combine(tl, tr);
                    if recorded.is_some_and(|t| t != combined) {
                        report.violations.push(flag(format!(
                            "taint `{taint}` differs from the parents' `{}`",
                            combined.label()
                        )));
                    }
                }
                if free_bits(&w) <= POINTWISE_BITS {
                    if let Some(p) = escaping_point(&w, &l, &r) {
                        report.violations.push(flag(format!(
                            "resolvent {result} escapes its parents at {p}"
                        )));
                    }
                }
                let t = recorded.unwrap_or(Taint::Output);
                seen.insert(w.clone(), t);
                if *cached && !kb.insert(&w, t) {
                    report.violations
                        .push(flag(format!("cached resolvent {result} was already stored")));
                }
            }
            TraceEvent::Rebalance { dim, interval, rewrites } => {
                // Heads live in the front half of the lifted order, before
                // the two swapped run levels in the middle.
                if n < 4 || *dim + 1 >= n / 2 {
                    report.violations
                        .push(flag(format!("rebalance at level {dim} of {n} is not a head")));
                    continue;
                }
                let mate = n - 1 - dim;
                let Ok(member) = DyadicInterval::parse(interval) else {
                    report.violations.push(flag(format!("bad split member `{interval}`")));
                    continue;
                };
                for (old_s, new_s) in rewrites {
                    let (Ok(old), Ok(new)) = (parse(old_s), parse(new_s)) else {
                        report.violations
                            .push(flag(format!("unparseable rewrite {old_s} → {new_s}")));
                        continue;
                    };
                    if old.comp(*dim) != member {
                        report.violations.push(flag(format!(
                            "rewrite source {old_s} is not on the split member {interval}"
                        )));
                    }
                    let cont = old.comp(mate);
                    let expect = if cont.is_lambda() {
                        None
                    } else {
                        let head = cont.prefix(1);
                        let rest = cont.strip_prefix(head).expect("one-bit prefix strips");
                        Some(
                            old.with_comp(*dim, old.comp(*dim).concat(head))
                                .with_comp(mate, rest),
                        )
                    };
                    if expect.as_ref() != Some(&new) {
                        report.violations.push(flag(format!(
                            "rewrite {old_s} → {new_s} does not move one continuation bit"
                        )));
                    }
                    match kb.remove(&old) {
                        Some(t) => {
                            if !kb.insert(&new, t) {
                                report.violations.push(flag(format!(
                                    "rewrite target {new_s} was already stored"
                                )));
                            }
                            seen.insert(new, t);
                        }
                        None => report.violations
                            .push(flag(format!("rewrite of {old_s}, which is not stored"))),
                    }
                }
                // The rewrite list must be exhaustive: nothing stored may
                // still sit on the split member with continuation left.
                for (b, _) in kb.tainted_boxes() {
                    if b.comp(*dim) == member && !b.comp(mate).is_lambda() {
                        report.violations
                            .push(flag(format!("stale box {b} left behind on {interval}")));
                    }
                }
            }
        }
    }
    report
}

/// Bits of slack in `b`: the log of its point count.
fn free_bits(b: &DyadicBox) -> u32 {
    (0..b.n()).map(|i| u32::from(b.d() - b.comp(i).len())).sum()
}

/// A point of `w` outside `l ∪ r`, if any.
fn escaping_point(w: &DyadicBox, l: &DyadicBox, r: &DyadicBox) -> Option<DyadicBox> {
    let (d, n) = (w.d(), w.n());
    let mut point: Vec<u64> = (0..n).map(|i| w.comp(i).lo(d)).collect();
    'next: loop {
        let unit = DyadicBox::unit_from_values(d, &point);
        if !l.contains(&unit) && !r.contains(&unit) {
            return Some(unit);
        }
        for i in (0..n).rev() {
            if point[i] < w.comp(i).hi(d) {
                point[i] += 1;
                for (j, v) in point.iter_mut().enumerate().skip(i + 1) {
                    *v = w.comp(j).lo(d);
                }
                continue 'next;
            }
        }
        return None;
    }
}

// --- scaling fits ----------------------------------------------------------------

/// A least-squares power-law fit through measured (size, cost) points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    /// Fitted exponent: the slope of `ln cost` against `ln size`.
    pub slope: f64,
    /// Root-mean-square residual of `ln cost` around the fitted line.
    pub residual: f64,
    /// Number of points the fit used.
    pub points: usize,
}

/// Fits `ln y = a + slope · ln x` by least squares over the strictly
/// positive points of `samples`. Returns `None` when fewer than two
/// usable points remain, or when all their x values coincide.
#[must_use]
pub fn log_log_slope(samples: &[(f64, f64)]) -> Option<SlopeFit> {
    let logs: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = logs.len();
    if k < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = logs
        .iter()
        .map(|p| p.1 - (my + slope * (p.0 - mx)))
        .map(|r| r * r)
        .sum();
    Some(SlopeFit { slope, residual: (rss / k as f64).sqrt(), points: k })
}
