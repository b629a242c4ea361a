//! Generators for the worked triangle fixtures and the hard cover
//! families, plus the prefix-free string ladder they are built from.
//!
//! Each generator returns a [`BcpInstance`]: the gap boxes, the query
//! shape they encode, and the properties the construction guarantees
//! (minimality of the cover, expected output size). The families scale
//! with a size parameter `c` that fixes the free-bit budget `d'`.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::dyadic::{BoxFile, DyadicBox, DyadicInterval, MAX_WIDTH};
use crate::engine::MaterializedOracle;
use crate::joins::{supporting_hypergraph, Hypergraph};
use crate::{Error, Result};

// --- string ladder -----------------------------------------------------------------

/// The prefix-free ladder `0, 10, 110, …, 1^{n−2}0, 1^{n−1}`: `n` strings
/// that partition the full domain and admit exactly one resolution chain
/// back to λ (fold the last two, then keep folding into ever-shorter
/// all-ones stems).
#[must_use]
pub fn bn_sequence(n: usize) -> Vec<DyadicInterval> {
    debug_assert!(n >= 1 && n <= 1 + MAX_WIDTH as usize);
    let mut seq = Vec::with_capacity(n);
    for i in 1..n {
        seq.push(DyadicInterval::new(((1u64 << (i - 1)) - 1) << 1, i as u8));
    }
    seq.push(DyadicInterval::new((1u64 << (n - 1)) - 1, (n - 1) as u8));
    seq
}

// --- generated instances ------------------------------------------------------------

/// A generated cover-problem instance with its known properties.
#[derive(Clone, Debug)]
pub struct BcpInstance {
    /// Family tag, stable across runs (used by the `gen` command).
    pub family: &'static str,
    /// Family parameters in declaration order.
    pub params: Vec<(&'static str, u64)>,
    /// Bit width of every attribute domain.
    pub d: u8,
    /// Number of attributes.
    pub n: usize,
    /// The gap boxes, original attribute order, duplicate-free.
    pub boxes: Vec<DyadicBox>,
    /// The query shape whose gap boxes these are.
    pub hypergraph: Hypergraph,
    /// Whether `boxes` is a minimal cover of the whole space (so the
    /// instance is its own optimal certificate).
    pub minimal_cover: bool,
    /// Exact output size, when the construction fixes one.
    pub expected_outputs: Option<u64>,
}

impl BcpInstance {
    /// Attribute names, matching the hypergraph vertex order.
    #[must_use]
    pub fn attrs(&self) -> Vec<String> {
        self.hypergraph.vertices().to_vec()
    }

    /// The JSON manifest written next to a generated box file.
    #[must_use]
    pub fn manifest(&self) -> Value {
        let params: serde_json::Map<String, Value> =
            self.params.iter().map(|&(k, v)| (k.to_string(), json!(v))).collect();
        json!({
            "family": self.family,
            "params": params,
            "d": self.d,
            "n": self.n,
            "attrs": self.attrs(),
            "boxes": self.boxes.len(),
            "minimal_cover": self.minimal_cover,
            "expected_outputs": self.expected_outputs,
        })
    }

    /// The instance as a writable box file.
    #[must_use]
    pub fn to_box_file(&self) -> BoxFile {
        BoxFile { d: self.d, attrs: self.attrs(), boxes: self.boxes.clone() }
    }

    /// An indexed oracle over the instance's boxes.
    #[must_use]
    pub fn oracle(&self) -> MaterializedOracle {
        MaterializedOracle::new(self.d, self.n, self.boxes.iter().cloned())
    }
}

fn total_width(parts: usize) -> Result<u8> {
    if parts == 0 || parts > MAX_WIDTH as usize {
        return Err(Error::InvalidParameter(format!(
            "attribute width {parts} out of range 1..={MAX_WIDTH}"
        )));
    }
    Ok(parts as u8)
}

/// Smallest `l` with `2^l ≥ c`.
fn log2_ceil(c: u64) -> u8 {
    if c <= 1 {
        0
    } else {
        (64 - (c - 1).leading_zeros()) as u8
    }
}

fn numbered_attrs(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}


// --- parity chain --------------------------------------------------------------------

/// The chain query whose end relations demand opposite value parities
/// while the middle relations demand equal ones: `n` attributes, a unary
/// odd-only relation on the first, a unary even-only relation on the
/// last, and equal-parity binary relations along the chain. The output
/// is empty and the gap boxes cover the whole space, but not minimally:
/// the end relations' unary gaps subsume the chain gaps that fix the
/// same end parity (e.g. ⟨00,01⟩ ⊆ ⟨00,λ⟩), so the instance reports
/// `minimal_cover: false`.
pub fn gen_parity_chain(n: usize, d: u8) -> Result<BcpInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("parity chain needs n ≥ 2, got {n}")));
    }
    if !(1..=MAX_WIDTH).contains(&d) {
        return Err(Error::InvalidParameter(format!("width {d} out of range 1..={MAX_WIDTH}")));
    }
    let attrs = numbered_attrs("A", n);
    let mut hg = Hypergraph::new(attrs.iter().cloned())?;
    hg.add_edge(&[attrs[0].as_str()])?;
    for i in 1..n {
        hg.add_edge(&[attrs[i - 1].as_str(), attrs[i].as_str()])?;
    }
    hg.add_edge(&[attrs[n - 1].as_str()])?;

    let mut boxes = Vec::new();
    let halves = 1u64 << (d - 1);
    // Gaps of the odd-only relation: every even value of the first attribute.
    for y in 0..halves {
        let mut comps = vec![DyadicInterval::LAMBDA; n];
        comps[0] = DyadicInterval::new(y << 1, d);
        boxes.push(DyadicBox::new(d, comps));
    }
    // Gaps of the equal-parity relations: every opposite-parity pair.
    for i in 1..n {
        for bit in 0..2u64 {
            for z in 0..halves {
                for y in 0..halves {
                    let mut comps = vec![DyadicInterval::LAMBDA; n];
                    comps[i - 1] = DyadicInterval::new((z << 1) | (1 - bit), d);
                    comps[i] = DyadicInterval::new((y << 1) | bit, d);
                    boxes.push(DyadicBox::new(d, comps));
                }
            }
        }
    }
    // Gaps of the even-only relation: every odd value of the last attribute.
    for y in 0..halves {
        let mut comps = vec![DyadicInterval::LAMBDA; n];
        comps[n - 1] = DyadicInterval::new((y << 1) | 1, d);
        boxes.push(DyadicBox::new(d, comps));
    }

    Ok(BcpInstance {
        family: "parity_chain",
        params: vec![("n", n as u64), ("d", u64::from(d))],
        d,
        n,
        boxes,
        hypergraph: hg,
        minimal_cover: false,
        expected_outputs: Some(0),
    })
}

// --- ordered-resolution floor, n−1 exponent --------------------------------------------

/// The support-3 family on which every ordered-resolution run needs on
/// the order of `|C|^{n−1}` resolutions regardless of the attribute
/// order. The space is sliced along the first attribute by the string
/// ladder; slice `i` is partitioned by putting a ladder string on
/// attribute `i` and free bits on each other attribute in turn.
pub fn gen_ord_lb_n1(n: usize, c: u64) -> Result<BcpInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("family needs n ≥ 2, got {n}")));
    }
    if c < 2 {
        return Err(Error::InvalidParameter(format!("family needs c ≥ 2, got {c}")));
    }
    let dp = log2_ceil(c);
    let d = total_width(usize::from(dp) + n)?;
    let slices = bn_sequence(n);
    let ladder = bn_sequence(n - 1);

    let mut boxes = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let rank = if j < i { j } else { j - 1 };
            for x in 0..1u64 << dp {
                let mut comps = vec![DyadicInterval::LAMBDA; n];
                comps[i] = ladder[rank];
                comps[j] = DyadicInterval::new(x, dp);
                comps[0] = slices[i].concat(comps[0]);
                boxes.push(DyadicBox::new(d, comps));
            }
        }
    }

    let attrs = numbered_attrs("A", n);
    let hypergraph = supporting_hypergraph(&attrs, &boxes)?;
    Ok(BcpInstance {
        family: "ord_lb_n1",
        params: vec![("n", n as u64), ("c", c), ("d_prime", u64::from(dp))],
        d,
        n,
        boxes,
        hypergraph,
        minimal_cover: true,
        expected_outputs: Some(0),
    })
}

// --- ordered-resolution floor, w+1 exponent ---------------------------------------------

/// The treewidth-`w` family on which every ordered-resolution run needs
/// on the order of `|C|^{w+1}` resolutions under every width-`w`
/// elimination order. Primary attributes pair up through single-bit
/// secondary attributes; each secondary side constrains one primary to a
/// ladder suffix after `d'` free bits.
pub fn gen_ord_lb_w1(w: usize, c: u64) -> Result<BcpInstance> {
    if w < 2 {
        return Err(Error::InvalidParameter(format!("family needs w ≥ 2, got {w}")));
    }
    if c < 2 {
        return Err(Error::InvalidParameter(format!("family needs c ≥ 2, got {c}")));
    }
    let dp = log2_ceil(c);
    let d = total_width(usize::from(dp) + w)?;
    let primaries = w + 1;
    let ladder = bn_sequence(w);

    let mut attrs = numbered_attrs("A", primaries);
    let mut secondary_dims = Vec::new();
    for i in 0..primaries {
        for j in i + 1..primaries {
            for k in 0..w {
                secondary_dims.push((i, j, k));
                attrs.push(format!("B{}_{}_{}", i + 1, j + 1, k + 1));
            }
        }
    }
    let n = attrs.len();

    let mut hg = Hypergraph::new(attrs.iter().cloned())?;
    for i in 0..primaries {
        for j in i + 1..primaries {
            hg.add_edge(&[attrs[i].as_str(), attrs[j].as_str()])?;
        }
    }
    let mut boxes = Vec::new();
    for (s, &(i, j, k)) in secondary_dims.iter().enumerate() {
        let sec = primaries + s;
        hg.add_edge(&[attrs[i].as_str(), attrs[sec].as_str()])?;
        hg.add_edge(&[attrs[j].as_str(), attrs[sec].as_str()])?;
        for (primary, bit) in [(i, 0u64), (j, 1u64)] {
            for x in 0..1u64 << dp {
                let mut comps = vec![DyadicInterval::LAMBDA; n];
                comps[primary] = DyadicInterval::new(x, dp).concat(ladder[k]);
                comps[sec] = DyadicInterval::new(bit, 1);
                boxes.push(DyadicBox::new(d, comps));
            }
        }
    }

    Ok(BcpInstance {
        family: "ord_lb_w1",
        params: vec![("w", w as u64), ("c", c), ("d_prime", u64::from(dp))],
        d,
        n,
        boxes,
        hypergraph: hg,
        minimal_cover: true,
        expected_outputs: Some(0),
    })
}

// --- geometric-resolution floor, n/2 exponent ---------------------------------------------

/// The clique family on which even unordered geometric resolution needs
/// on the order of `|C|^{n/2}` resolutions: every support-2 box whose two
/// components share a ladder suffix after `d'` free bits. Assigning each
/// attribute a ladder value pigeonholes some pair into a shared suffix,
/// so the boxes cover the space; each box is the unique cover of the
/// assignments it forbids, so the cover is minimal.
pub fn gen_geo_lb_half(n: usize, c: u64) -> Result<BcpInstance> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("family needs n ≥ 3, got {n}")));
    }
    if c < 2 {
        return Err(Error::InvalidParameter(format!("family needs c ≥ 2, got {c}")));
    }
    let dp = log2_ceil(c).div_ceil(2);
    let d = total_width(usize::from(dp) + n - 1)?;
    let ladder = bn_sequence(n - 1);

    let mut boxes = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for b in &ladder {
                for x in 0..1u64 << dp {
                    for y in 0..1u64 << dp {
                        let mut comps = vec![DyadicInterval::LAMBDA; n];
                        comps[i] = DyadicInterval::new(x, dp).concat(*b);
                        comps[j] = DyadicInterval::new(y, dp).concat(*b);
                        boxes.push(DyadicBox::new(d, comps));
                    }
                }
            }
        }
    }

    let attrs = numbered_attrs("A", n);
    let hypergraph = supporting_hypergraph(&attrs, &boxes)?;
    Ok(BcpInstance {
        family: "geo_lb_half",
        params: vec![("n", n as u64), ("c", c), ("d_prime", u64::from(dp))],
        d,
        n,
        boxes,
        hypergraph,
        minimal_cover: true,
        expected_outputs: Some(0),
    })
}

// --- triangle fixtures ---------------------------------------------------------------------

/// Which triangle fixture to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleVariant {
    /// Most-significant-bit equality on all three relations: empty join.
    Empty,
    /// Third relation flipped to inequality: two opposite-block outputs.
    NonEmpty,
}

impl FromStr for TriangleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empty" => Ok(TriangleVariant::Empty),
            "nonempty" => Ok(TriangleVariant::NonEmpty),
            other => Err(Error::InvalidParameter(format!("unknown triangle variant `{other}`"))),
        }
    }
}

impl fmt::Display for TriangleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriangleVariant::Empty => "empty",
            TriangleVariant::NonEmpty => "nonempty",
        })
    }
}

/// The three-relation triangle over attributes `A, B, C` with
/// single-bit gap boxes. In the empty variant each relation's gaps
/// swallow its pair's equal-leading-bit points, so a surviving point
/// would need all three leading bits pairwise different — impossible,
/// and the join is empty. In the non-empty variant the third relation
/// swallows the differing `A`/`C` bits instead, leaving exactly the two
/// alternating-bit blocks of `2^{3(d−1)}` points each.
pub fn gen_fig_triangle(variant: TriangleVariant, d: u8) -> Result<BcpInstance> {
    if !(1..=MAX_WIDTH).contains(&d) {
        return Err(Error::InvalidParameter(format!("width {d} out of range 1..={MAX_WIDTH}")));
    }
    let hg = Hypergraph::from_edges(&["A", "B", "C"], &[&["A", "B"], &["B", "C"], &["A", "C"]])?;
    let bit = |v: u64| DyadicInterval::new(v, 1);
    let lam = DyadicInterval::LAMBDA;
    let third = match variant {
        TriangleVariant::Empty => [(0, 0), (1, 1)],
        TriangleVariant::NonEmpty => [(0, 1), (1, 0)],
    };
    let mut boxes = vec![
        DyadicBox::new(d, vec![bit(0), bit(0), lam]),
        DyadicBox::new(d, vec![bit(1), bit(1), lam]),
        DyadicBox::new(d, vec![lam, bit(0), bit(0)]),
        DyadicBox::new(d, vec![lam, bit(1), bit(1)]),
    ];
    for (a, c) in third {
        boxes.push(DyadicBox::new(d, vec![bit(a), lam, bit(c)]));
    }
    let (family, expected) = match variant {
        TriangleVariant::Empty => ("fig3_triangle", 0),
        TriangleVariant::NonEmpty => ("fig5_triangle", 2u64 << (3 * (u64::from(d) - 1))),
    };
    Ok(BcpInstance {
        family,
        params: vec![("d", u64::from(d))],
        d,
        n: 3,
        boxes,
        hypergraph: hg,
        minimal_cover: variant == TriangleVariant::Empty,
        expected_outputs: Some(expected),
    })
}

// --- tests -----------------------------------------------------------------------------------
