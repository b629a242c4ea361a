//! Dyadic intervals and boxes.
//!
//! A dyadic interval over the domain `[0, 2^d)` is a bitstring `x` of length
//! `|x| ≤ d`, MSB first, denoting the integer range
//! `[x·2^(d−|x|), (x+1)·2^(d−|x|) − 1]` — the set of values whose d-bit
//! binary representation starts with `x`. The empty string λ denotes the
//! whole domain. A dyadic box is an n-tuple of dyadic intervals sharing one
//! `d`; containment is componentwise prefix testing.
//!
//! This module also provides the canonical decomposition of an arbitrary
//! integer range into at most `2d` dyadic intervals, the enumeration of all
//! `(d+1)^n` boxes containing a point, and the textual box-file format.

use std::fmt;

use crate::{Error, Result};

/// Largest supported bit width. Interval values are packed into a `u64`
/// and range endpoints must not overflow, so `d` stays below 63.
pub const MAX_WIDTH: u8 = 62;

// --- intervals -------------------------------------------------------------

/// A dyadic interval: `len` bits of `bits`, MSB first. `len == 0` is λ.
///
/// The interval does not carry `d` itself; a box fixes the width for all of
/// its components, and the few value-level operations take `d` explicitly.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    bits: u64,
    len: u8,
}

impl DyadicInterval {
    /// The empty string λ: the full domain at any width.
    pub const LAMBDA: Self = Self { bits: 0, len: 0 };

    /// Interval from the low `len` bits of `bits`.
    #[must_use]
    pub fn new(bits: u64, len: u8) -> Self {
        debug_assert!(len <= MAX_WIDTH);
        debug_assert!(len == 64 || bits < (1u64 << len), "value too wide for len");
        Self { bits, len }
    }

    /// Parses `"*"` (λ) or a 0/1 string. Width checks happen at box level.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "*" {
            return Ok(Self::LAMBDA);
        }
        if s.is_empty() || s.len() > usize::from(MAX_WIDTH) {
            return Err(Error::Parse(format!("bad interval `{s}`")));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            match c {
                '0' => bits <<= 1,
                '1' => bits = (bits << 1) | 1,
                _ => return Err(Error::Parse(format!("bad interval `{s}`"))),
            }
        }
        Ok(Self { bits, len: s.len() as u8 })
    }

    #[must_use]
    pub fn bits(self) -> u64 {
        self.bits
    }

    // `is_lambda` is the emptiness test that pairs with this length.
    #[allow(clippy::len_without_is_empty)]
    #[must_use]
    pub fn len(self) -> u8 {
        self.len
    }

    #[must_use]
    pub fn is_lambda(self) -> bool {
        self.len == 0
    }

    /// True iff `self ⊇ other`, i.e. `self` is a prefix of `other`.
    #[must_use]
    pub fn contains(self, other: Self) -> bool {
        self.len <= other.len && (other.bits >> (other.len - self.len)) == self.bits
    }

    /// The length-`len` prefix. `len` must not exceed `self.len()`.
    #[must_use]
    pub fn prefix(self, len: u8) -> Self {
        debug_assert!(len <= self.len);
        Self { bits: self.bits >> (self.len - len), len }
    }

    /// Appends one bit.
    #[must_use]
    pub fn child(self, bit: u8) -> Self {
        debug_assert!(bit <= 1);
        debug_assert!(self.len < MAX_WIDTH);
        Self { bits: (self.bits << 1) | u64::from(bit), len: self.len + 1 }
    }

    /// Splits off the last bit: `x·b → (x, b)`. `None` for λ.
    #[must_use]
    pub fn split_last(self) -> Option<(Self, u8)> {
        if self.len == 0 {
            return None;
        }
        Some((Self { bits: self.bits >> 1, len: self.len - 1 }, (self.bits & 1) as u8))
    }

    /// Concatenation `self · other`.
    #[must_use]
    pub fn concat(self, other: Self) -> Self {
        debug_assert!(self.len + other.len <= MAX_WIDTH);
        Self { bits: (self.bits << other.len) | other.bits, len: self.len + other.len }
    }

    /// If `p` is a prefix of `self`, the remaining suffix; `None` otherwise.
    #[must_use]
    pub fn strip_prefix(self, p: Self) -> Option<Self> {
        if !p.contains(self) {
            return None;
        }
        let len = self.len - p.len;
        Some(Self { bits: self.bits & ((1u64 << len) - 1), len })
    }

    /// True iff the two intervals differ exactly in their last bit.
    #[must_use]
    pub fn is_sibling_of(self, other: Self) -> bool {
        self.len > 0 && self.len == other.len && (self.bits ^ other.bits) == 1
    }

    /// Smallest domain value covered, at width `d`.
    #[must_use]
    pub fn lo(self, d: u8) -> u64 {
        debug_assert!(self.len <= d && d <= MAX_WIDTH);
        self.bits << (d - self.len)
    }

    /// Largest domain value covered, at width `d`.
    #[must_use]
    pub fn hi(self, d: u8) -> u64 {
        debug_assert!(self.len <= d && d <= MAX_WIDTH);
        (self.bits << (d - self.len)) | ((1u64 << (d - self.len)) - 1)
    }

    /// True iff `v` lies in the interval's range at width `d`.
    #[must_use]
    pub fn contains_value(self, v: u64, d: u8) -> bool {
        debug_assert!(self.len <= d && d <= MAX_WIDTH);
        (v >> (d - self.len)) == self.bits
    }
}

/// String order: common prefix decides, a proper prefix sorts first.
impl Ord for DyadicInterval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let m = self.len.min(other.len);
        let a = self.bits >> (self.len - m);
        let b = other.bits >> (other.len - m);
        a.cmp(&b).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for DyadicInterval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_lambda() {
            return f.write_str("*");
        }
        for i in (0..self.len).rev() {
            f.write_str(if (self.bits >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// True iff `a ⊇ b`, i.e. `a.bits` is a prefix of `b.bits`.
#[must_use]
pub fn interval_contains(a: DyadicInterval, b: DyadicInterval) -> bool {
    a.contains(b)
}

// --- boxes -----------------------------------------------------------------

/// An n-dimensional dyadic box: one interval per attribute position, all at
/// the same width `d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicBox {
    d: u8,
    comps: Vec<DyadicInterval>,
}

impl DyadicBox {
    /// Box from explicit components. All lengths must be ≤ `d`.
    #[must_use]
    pub fn new(d: u8, comps: Vec<DyadicInterval>) -> Self {
        debug_assert!((1..=MAX_WIDTH).contains(&d));
        debug_assert!(!comps.is_empty());
        debug_assert!(comps.iter().all(|c| c.len() <= d));
        Self { d, comps }
    }

    /// The universal box ⟨λ,…,λ⟩.
    #[must_use]
    pub fn universal(d: u8, n: usize) -> Self {
        Self::new(d, vec![DyadicInterval::LAMBDA; n])
    }

    /// Unit box from integer point coordinates.
    #[must_use]
    pub fn unit_from_values(d: u8, values: &[u64]) -> Self {
        let comps = values
            .iter()
            .map(|&v| {
                debug_assert!(d == 64 || v < (1u64 << d));
                DyadicInterval::new(v, d)
            })
            .collect();
        Self::new(d, comps)
    }

    #[must_use]
    pub fn d(&self) -> u8 {
        self.d
    }

    /// Number of dimensions.
    #[must_use]
    pub fn n(&self) -> usize {
        self.comps.len()
    }

    #[must_use]
    pub fn comp(&self, i: usize) -> DyadicInterval {
        self.comps[i]
    }

    #[must_use]
    pub fn comps(&self) -> &[DyadicInterval] {
        &self.comps
    }

    /// Copy with component `i` replaced.
    #[must_use]
    pub fn with_comp(&self, i: usize, iv: DyadicInterval) -> Self {
        debug_assert!(iv.len() <= self.d);
        let mut comps = self.comps.clone();
        comps[i] = iv;
        Self { d: self.d, comps }
    }

    /// True iff every component has full length `d`.
    #[must_use]
    pub fn is_unit(&self) -> bool {
        self.comps.iter().all(|c| c.len() == self.d)
    }

    /// Integer coordinates, if this is a unit box.
    #[must_use]
    pub fn values(&self) -> Option<Vec<u64>> {
        self.is_unit().then(|| self.comps.iter().map(|c| c.bits()).collect())
    }

    /// True iff `self ⊇ other`: componentwise prefix containment.
    #[must_use]
    pub fn contains(&self, other: &Self) -> bool {
        debug_assert!(self.d == other.d && self.n() == other.n());
        self.comps.iter().zip(&other.comps).all(|(a, b)| a.contains(*b))
    }

    /// Indices of non-λ components.
    #[must_use]
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.comps[i].is_lambda()).collect()
    }

    /// Sum of component lengths; 0 for the universal box, `d·n` for a unit.
    #[must_use]
    pub fn total_len(&self) -> u32 {
        self.comps.iter().map(|c| u32::from(c.len())).sum()
    }

    /// Keeps the components at `attrs`, replaces all others by λ.
    #[must_use]
    pub fn project(&self, attrs: &[usize]) -> Self {
        let comps = (0..self.n())
            .map(|i| if attrs.contains(&i) { self.comps[i] } else { DyadicInterval::LAMBDA })
            .collect();
        Self { d: self.d, comps }
    }

    /// Smallest index whose component is shorter than `d`, if any.
    #[must_use]
    pub fn first_thick_dim(&self) -> Option<usize> {
        self.comps.iter().position(|c| c.len() < self.d)
    }

    /// Cuts the box into two equal halves along its first thick dimension.
    pub fn split_first_thick(&self) -> Result<(Self, Self)> {
        let dim = self.first_thick_dim().ok_or(Error::SplitUnit)?;
        let c = self.comps[dim];
        Ok((self.with_comp(dim, c.child(0)), self.with_comp(dim, c.child(1))))
    }
}

impl fmt::Display for DyadicBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            fmt::Display::fmt(c, f)?;
        }
        f.write_str(">")
    }
}

impl fmt::Debug for DyadicBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// True iff `a ⊇ b`: componentwise prefix containment.
#[must_use]
pub fn box_contains(a: &DyadicBox, b: &DyadicBox) -> bool {
    a.contains(b)
}

// --- range decomposition and point covers ------------------------------------

/// Decomposes `[lo, hi]` into the canonical minimal set of disjoint dyadic
/// intervals, by bottom-up sibling merging. At most `2d` intervals, sorted
/// in increasing order.
pub fn decompose_range(lo: u64, hi: u64, d: u8) -> Result<Vec<DyadicInterval>> {
    if d == 0 || d > MAX_WIDTH {
        return Err(Error::InvalidParameter(format!("bit width d={d}")));
    }
    if lo > hi {
        return Err(Error::EmptyRange { lo, hi });
    }
    if hi >= (1u64 << d) {
        return Err(Error::InvalidParameter(format!("hi={hi} out of domain for d={d}")));
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    // Half-open [l, r) of cell indices; each loop level halves the grid, so
    // a surviving odd endpoint is a maximal aligned block at that level.
    let (mut l, mut r) = (lo, hi + 1);
    let mut level = 0u8;
    while l < r {
        if l & 1 == 1 {
            left.push(DyadicInterval::new(l, d - level));
            l += 1;
        }
        if r & 1 == 1 {
            r -= 1;
            right.push(DyadicInterval::new(r, d - level));
        }
        l >>= 1;
        r >>= 1;
        level += 1;
    }
    right.reverse();
    left.extend(right);
    Ok(left)
}

/// All `(d+1)^n` dyadic boxes containing the unit box `t`: the product of
/// the prefix chains of its components. Deterministic order (prefix lengths
/// counted up, last dimension fastest).
#[must_use]
pub fn boxes_containing_point(t: &DyadicBox) -> Vec<DyadicBox> {
    debug_assert!(t.is_unit());
    let (d, n) = (t.d(), t.n());
    let mut out = Vec::new();
    let mut lens = vec![0u8; n];
    'outer: loop {
        let comps = (0..n).map(|i| t.comp(i).prefix(lens[i])).collect();
        out.push(DyadicBox::new(d, comps));
        for i in (0..n).rev() {
            if lens[i] < d {
                lens[i] += 1;
                lens[i + 1..].fill(0);
                continue 'outer;
            }
        }
        return out;
    }
}

// --- box files ---------------------------------------------------------------

/// A parsed box file: width, attribute names, and the boxes themselves.
///
/// Text format: header line `d=<int> n=<int> attrs=<comma-list>`, then one
/// box per line as `<x1,...,xn>` with each `xᵢ` a 0/1 string or `*` for λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxFile {
    pub d: u8,
    pub attrs: Vec<String>,
    pub boxes: Vec<DyadicBox>,
}

impl BoxFile {
    /// Parses one `<x1,...,xn>` line at the given width/arity.
    pub fn parse_box(line: &str, d: u8, n: usize) -> Result<DyadicBox> {
        let inner = line
            .strip_prefix('<')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| Error::Parse(format!("box line `{line}` not of the form <...>")))?;
        let comps: Vec<DyadicInterval> =
            inner.split(',').map(|p| DyadicInterval::parse(p.trim())).collect::<Result<_>>()?;
        if comps.len() != n {
            return Err(Error::Parse(format!("box `{line}` has {} components, expected {n}", comps.len())));
        }
        if let Some(c) = comps.iter().find(|c| c.len() > d) {
            return Err(Error::Parse(format!("component `{c}` longer than d={d}")));
        }
        Ok(DyadicBox::new(d, comps))
    }

    /// Parses a full box file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty box file".into()))?;
        let mut d: Option<u8> = None;
        let mut n: Option<usize> = None;
        let mut attrs: Option<Vec<String>> = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
            match key {
                "d" => {
                    let v: u8 = value.parse().map_err(|_| Error::Parse(format!("bad d `{value}`")))?;
                    if v == 0 || v > MAX_WIDTH {
                        return Err(Error::InvalidParameter(format!("bit width d={v}")));
                    }
                    d = Some(v);
                }
                "n" => {
                    n = Some(value.parse().map_err(|_| Error::Parse(format!("bad n `{value}`")))?);
                }
                "attrs" => attrs = Some(value.split(',').map(str::to_owned).collect()),
                _ => return Err(Error::Parse(format!("unknown header field `{key}`"))),
            }
        }
        let d = d.ok_or_else(|| Error::Parse("header missing d=".into()))?;
        let n = n.ok_or_else(|| Error::Parse("header missing n=".into()))?;
        let attrs = attrs.ok_or_else(|| Error::Parse("header missing attrs=".into()))?;
        if n == 0 || attrs.len() != n || attrs.iter().any(String::is_empty) {
            return Err(Error::Parse(format!("attrs list does not match n={n}")));
        }
        let boxes = lines.map(|l| Self::parse_box(l.trim(), d, n)).collect::<Result<_>>()?;
        Ok(Self { d, attrs, boxes })
    }

    /// Renders the file back to text, one box per line.
    #[must_use]
    pub fn to_text(&self) -> String {
        use fmt::Write;
        let mut s = format!("d={} n={} attrs={}\n", self.d, self.attrs.len(), self.attrs.join(","));
        for b in &self.boxes {
            writeln!(s, "{b}").expect("write to string");
        }
        s
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::File { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())
            .map_err(|source| Error::File { path: path.into(), source })
    }
}

// --- tests -------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn iv(s: &str) -> DyadicInterval {
        DyadicInterval::parse(s).unwrap()
    }

    pub(crate) fn bx(d: u8, comps: &[&str]) -> DyadicBox {
        DyadicBox::new(d, comps.iter().map(|s| iv(s)).collect())
    }

    #[test]
    fn interval_contains_prefix_cases() {
        assert!(interval_contains(DyadicInterval::LAMBDA, iv("01")));
        assert!(interval_contains(iv("01"), iv("01")));
        assert!(!interval_contains(iv("01"), iv("0")));
        assert!(interval_contains(iv("0"), iv("01")));
        assert!(!interval_contains(iv("0"), iv("10")));
    }

    #[test]
    fn box_contains_componentwise() {
        assert!(box_contains(&bx(2, &["*", "*"]), &bx(2, &["10", "0"])));
        assert!(box_contains(&bx(2, &["10", "0"]), &bx(2, &["10", "01"])));
        assert!(!box_contains(&bx(2, &["0", "*"]), &bx(2, &["1", "*"])));
    }

    #[test]
    fn split_picks_first_thick_dimension() {
        let (l, r) = bx(2, &["*", "*"]).split_first_thick().unwrap();
        assert_eq!((l, r), (bx(2, &["0", "*"]), bx(2, &["1", "*"])));

        let (l, r) = bx(2, &["11", "0"]).split_first_thick().unwrap();
        assert_eq!((l, r), (bx(2, &["11", "00"]), bx(2, &["11", "01"])));

        assert!(matches!(bx(2, &["11", "01"]).split_first_thick(), Err(Error::SplitUnit)));
    }

    #[test]
    fn projection_replaces_dropped_components_with_lambda() {
        let b = bx(2, &["10", "01", "1"]);
        assert_eq!(b.project(&[0, 2]), bx(2, &["10", "*", "1"]));
        assert_eq!(b.project(&[0, 1, 2]), b);
        assert_eq!(b.project(&[]), DyadicBox::universal(2, 3));
    }

    #[test]
    fn decompose_range_examples() {
        assert_eq!(decompose_range(0, 7, 3).unwrap(), vec![DyadicInterval::LAMBDA]);
        assert_eq!(
            decompose_range(1, 6, 3).unwrap(),
            vec![iv("001"), iv("01"), iv("10"), iv("110")]
        );
        assert_eq!(decompose_range(3, 3, 2).unwrap(), vec![iv("11")]);
        assert!(matches!(decompose_range(4, 2, 3), Err(Error::EmptyRange { .. })));
        assert!(matches!(decompose_range(0, 8, 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn point_cover_enumeration() {
        let t = DyadicBox::unit_from_values(1, &[0]);
        assert_eq!(boxes_containing_point(&t), vec![bx(1, &["*"]), bx(1, &["0"])]);

        let t = DyadicBox::unit_from_values(2, &[1]);
        assert_eq!(
            boxes_containing_point(&t),
            vec![bx(2, &["*"]), bx(2, &["0"]), bx(2, &["01"])]
        );

        let t = DyadicBox::unit_from_values(2, &[1, 2]);
        let covers = boxes_containing_point(&t);
        assert_eq!(covers.len(), 9);
        assert!(covers.iter().all(|b| b.contains(&t)));
    }

    #[test]
    fn box_file_round_trip() {
        let text = "d=3 n=2 attrs=A,B\n<01,*>\n<1,0>\n";
        let file = BoxFile::parse(text).unwrap();
        assert_eq!(file.d, 3);
        assert_eq!(file.attrs, vec!["A", "B"]);
        assert_eq!(file.boxes, vec![bx(3, &["01", "*"]), bx(3, &["1", "0"])]);
        assert_eq!(file.to_text(), text);

        assert!(BoxFile::parse("d=3 n=2 attrs=A\n").is_err());
        assert!(BoxFile::parse("d=1 n=1 attrs=A\n<01>\n").is_err());
        assert!(BoxFile::parse("n=1 attrs=A\n").is_err());
    }

    #[test]
    fn interval_order_is_string_order() {
        let mut ivs = [iv("1"), iv("01"), iv("0"), DyadicInterval::LAMBDA, iv("00"), iv("10")];
        ivs.sort();
        let shown: Vec<String> = ivs.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, vec!["*", "0", "00", "01", "1", "10"]);
    }

    // Membership defined independently via string prefixes, to cross-check
    // the shift arithmetic in `contains_value`/`lo`/`hi`.
    fn member_by_string(x: DyadicInterval, v: u64, d: u8) -> bool {
        let xs = x.to_string();
        let xs = if xs == "*" { String::new() } else { xs };
        let vs: String =
            (0..d).rev().map(|i| if (v >> i) & 1 == 1 { '1' } else { '0' }).collect();
        vs.starts_with(&xs)
    }

    fn all_intervals(d: u8) -> Vec<DyadicInterval> {
        let mut out = vec![DyadicInterval::LAMBDA];
        for len in 1..=d {
            for bits in 0..(1u64 << len) {
                out.push(DyadicInterval::new(bits, len));
            }
        }
        out
    }

    #[test]
    fn membership_matches_prefix_semantics_exhaustively() {
        for d in 1..=6u8 {
            for x in all_intervals(d) {
                for v in 0..(1u64 << d) {
                    let expect = member_by_string(x, v, d);
                    assert_eq!(x.contains_value(v, d), expect, "{x} / {v} / d={d}");
                    assert_eq!((x.lo(d)..=x.hi(d)).contains(&v), expect);
                }
            }
        }
    }

    #[test]
    fn interval_containment_matches_range_inclusion_exhaustively() {
        for d in 1..=5u8 {
            for a in all_intervals(d) {
                for b in all_intervals(d) {
                    let set_wise = b.lo(d) >= a.lo(d) && b.hi(d) <= a.hi(d);
                    assert_eq!(a.contains(b), set_wise, "{a} vs {b} at d={d}");
                }
            }
        }
    }

    // Independent top-down segment-tree walk: take a node iff it lies fully
    // inside [lo,hi]; the canonical minimal cover, derived differently from
    // the bottom-up merge in `decompose_range`.
    fn cover_top_down(x: DyadicInterval, lo: u64, hi: u64, d: u8, out: &mut Vec<DyadicInterval>) {
        if x.lo(d) > hi || x.hi(d) < lo {
            return;
        }
        if lo <= x.lo(d) && x.hi(d) <= hi {
            out.push(x);
            return;
        }
        cover_top_down(x.child(0), lo, hi, d, out);
        cover_top_down(x.child(1), lo, hi, d, out);
    }

    #[test]
    fn decompose_range_is_canonical_exhaustively() {
        for d in 1..=5u8 {
            for lo in 0..(1u64 << d) {
                for hi in lo..(1u64 << d) {
                    let got = decompose_range(lo, hi, d).unwrap();
                    let mut expect = Vec::new();
                    cover_top_down(DyadicInterval::LAMBDA, lo, hi, d, &mut expect);
                    assert_eq!(got, expect, "[{lo},{hi}] d={d}");
                    assert!(got.len() <= 2 * usize::from(d));

                    let mut seen = vec![false; 1 << d];
                    for x in &got {
                        for v in x.lo(d)..=x.hi(d) {
                            assert!(!seen[v as usize], "overlap at {v}");
                            seen[v as usize] = true;
                        }
                    }
                    for (v, s) in seen.iter().enumerate() {
                        assert_eq!(*s, (v as u64) >= lo && (v as u64) <= hi);
                    }
                }
            }
        }
    }

    #[test]
    fn point_cover_count_and_completeness() {
        // Count invariant on a spread of shapes with d·n ≤ 12.
        for &(d, n) in &[(1u8, 1usize), (2, 2), (3, 2), (4, 3), (6, 2), (2, 6), (12, 1), (1, 12)] {
            let values: Vec<u64> = (0..n as u64).map(|i| i % (1 << d)).collect();
            let t = DyadicBox::unit_from_values(d, &values);
            let covers = boxes_containing_point(&t);
            assert_eq!(covers.len(), (usize::from(d) + 1).pow(n as u32));
            let unique: std::collections::HashSet<_> = covers.iter().cloned().collect();
            assert_eq!(unique.len(), covers.len());
        }

        // Completeness against filtering the full box universe (small cases).
        for &(d, n) in &[(2u8, 2usize), (3, 2), (2, 3)] {
            let t = DyadicBox::unit_from_values(d, &vec![1; n]);
            let mut expect: Vec<DyadicBox> = Vec::new();
            let per_dim = all_intervals(d);
            let mut pick = vec![0usize; n];
            'enumerate: loop {
                let b = DyadicBox::new(d, pick.iter().map(|&k| per_dim[k]).collect());
                if b.contains(&t) {
                    expect.push(b);
                }
                for i in (0..n).rev() {
                    if pick[i] + 1 < per_dim.len() {
                        pick[i] += 1;
                        pick[i + 1..].fill(0);
                        continue 'enumerate;
                    }
                }
                break;
            }
            let mut got = boxes_containing_point(&t);
            got.sort();
            expect.sort();
            assert_eq!(got, expect);
        }
    }
}
