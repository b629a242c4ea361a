//! Query hypergraphs and the width measures that guide splitting-order
//! choice, plus relations, gap-box extraction from indices, and the oracle
//! that feeds the solver from a join query.
//!
//! The first half of the module is pure hypergraph machinery: GYO
//! elimination (acyclicity), the induced width of an attribute order, an
//! exhaustive minimum-width search, and the cover width built from
//! union-closed hypergraph collections.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dyadic::{decompose_range, DyadicBox, DyadicInterval, MAX_WIDTH};
use crate::engine::{MaterializedOracle, Sao};
use crate::{Error, Result};

// --- hypergraph ----------------------------------------------------------------

/// A query hypergraph: vertices are attribute names, edges are relation
/// schemas (attribute subsets).
///
/// Edges are kept as bitmasks over vertex indices, so a hypergraph holds at
/// most [`Hypergraph::MAX_VERTICES`] attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: Vec<String>,
    edges: Vec<u64>,
}

impl Hypergraph {
    /// Edges live in one machine word.
    pub const MAX_VERTICES: usize = 64;

    /// Creates a hypergraph on the given attribute names, with no edges.
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(attrs: I) -> Result<Self> {
        let vertices: Vec<String> = attrs.into_iter().map(Into::into).collect();
        if vertices.len() > Self::MAX_VERTICES {
            return Err(Error::InvalidParameter(format!(
                "hypergraph supports at most {} attributes, got {}",
                Self::MAX_VERTICES,
                vertices.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if v.is_empty() || !seen.insert(v.as_str()) {
                return Err(Error::InvalidParameter(format!("bad attribute name `{v}`")));
            }
        }
        Ok(Self { vertices, edges: Vec::new() })
    }

    /// Adds an edge over the named attributes.
    pub fn add_edge(&mut self, attrs: &[&str]) -> Result<()> {
        if attrs.is_empty() {
            return Err(Error::InvalidParameter("empty edge".into()));
        }
        let mut mask = 0u64;
        for a in attrs {
            let i = self
                .vertex_index(a)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown attribute `{a}`")))?;
            mask |= 1 << i;
        }
        self.edges.push(mask);
        Ok(())
    }

    /// Builds vertices and edges in one call.
    pub fn from_edges(attrs: &[&str], edges: &[&[&str]]) -> Result<Self> {
        let mut hg = Self::new(attrs.iter().copied())?;
        for e in edges {
            hg.add_edge(e)?;
        }
        Ok(hg)
    }

    /// Number of vertices.
    #[must_use]
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Number of edges (duplicates from identical schemas are kept).
    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Attribute names in index order.
    #[must_use]
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Index of the named attribute.
    #[must_use]
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Members of edge `i` as sorted vertex indices.
    #[must_use]
    pub fn edge(&self, i: usize) -> Vec<usize> {
        bits(self.edges[i]).collect()
    }

    pub(crate) fn edge_masks(&self) -> &[u64] {
        &self.edges
    }
}

/// Iterates the set bits of a mask, lowest first.
fn bits(mask: u64) -> impl Iterator<Item = usize> {
    std::iter::successors(
        (mask != 0).then_some(mask),
        |m| {
            let rest = m & (m - 1);
            (rest != 0).then_some(rest)
        },
    )
    .map(|m| m.trailing_zeros() as usize)
}

// --- GYO elimination -----------------------------------------------------------

/// Runs the two-rule elimination procedure — drop an edge contained in
/// another (or empty), drop a vertex private to at most one edge — and
/// returns the order of vertex removals when it empties the hypergraph
/// (the α-acyclic case), `None` otherwise.
///
/// Scans are in index order, so the order is deterministic; any maximal
/// rule sequence classifies acyclicity identically.
#[must_use]
pub fn gyo_eliminate(hg: &Hypergraph) -> Option<Vec<usize>> {
    let n = hg.n();
    let mut edges: Vec<u64> = hg.edge_masks().to_vec();
    let mut live = vec![true; edges.len()];
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    loop {
        let mut changed = false;
        for i in 0..edges.len() {
            if !live[i] {
                continue;
            }
            // Of two identical edges the earlier one survives.
            let gone = edges[i] == 0
                || (0..edges.len()).any(|j| {
                    j != i
                        && live[j]
                        && edges[i] & !edges[j] == 0
                        && (edges[i] != edges[j] || j < i)
                });
            if gone {
                live[i] = false;
                changed = true;
            }
        }
        for (v, flag) in removed.iter_mut().enumerate() {
            if *flag {
                continue;
            }
            let vbit = 1u64 << v;
            let touching = edges.iter().zip(&live).filter(|(e, l)| **l && *e & vbit != 0).count();
            if touching <= 1 {
                *flag = true;
                order.push(v);
                for e in &mut edges {
                    *e &= !vbit;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (order.len() == n).then_some(order)
}

// --- induced width -------------------------------------------------------------

/// Induced width of `sao`: attributes are eliminated from the back of the
/// order; each step records the attribute's support (itself plus every
/// vertex sharing a current edge with it), inserts the support as a new
/// edge, and deletes the attribute. The width is the largest support size
/// minus one.
///
/// An attribute in no edge supports only itself and contributes zero.
#[must_use]
pub fn induced_width(hg: &Hypergraph, sao: &Sao) -> usize {
    debug_assert_eq!(sao.n(), hg.n());
    let mut edges: Vec<u64> = hg.edge_masks().to_vec();
    let mut width = 0usize;
    for k in (0..sao.n()).rev() {
        let vbit = 1u64 << sao.attr(k);
        let mut support = vbit;
        for &e in &edges {
            if e & vbit != 0 {
                support |= e;
            }
        }
        width = width.max(support.count_ones() as usize - 1);
        for e in &mut edges {
            *e &= !vbit;
        }
        edges.push(support & !vbit);
    }
    width
}

/// Exhaustive minimum-induced-width order, as `(order, width)`.
///
/// Works on the primal graph: inserting an attribute's support as an edge
/// and deleting the attribute is, on vertex pairs, exactly cliquing its
/// current neighborhood — so the width of an order depends only on which
/// vertices are eliminated before which, and a subset dynamic program over
/// the 2^n elimination prefixes finds the optimum. Capped at 12 attributes.
pub fn min_width_order(hg: &Hypergraph) -> Result<(Vec<usize>, usize)> {
    let n = hg.n();
    if n > 12 {
        return Err(Error::InvalidParameter(format!(
            "minimum-width search supports at most 12 attributes, got {n}"
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    let mut adj = vec![0u64; n];
    for &e in hg.edge_masks() {
        for v in bits(e) {
            adj[v] |= e & !(1 << v);
        }
    }
    // best[s] = least achievable max elimination degree over orders whose
    // first eliminated vertices are exactly the set s.
    let full: usize = (1 << n) - 1;
    let mut best = vec![u32::MAX; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        best[s] = bits(s as u64)
            .map(|v| {
                let prior = s & !(1 << v);
                best[prior].max(elim_degree(&adj, v, prior as u64))
            })
            .min()
            .expect("non-empty subset");
    }
    // Reconstruct front-to-back: the vertex picked for a prefix set is the
    // one eliminated last in it, i.e. the earliest in the order.
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = bits(s as u64)
            .find(|&v| {
                let prior = s & !(1 << v);
                best[prior].max(elim_degree(&adj, v, prior as u64)) == best[s]
            })
            .expect("some vertex attains the subset optimum");
        order.push(v);
        s &= !(1 << v);
    }
    Ok((order, best[full] as usize))
}

/// Number of vertices outside `through ∪ {v}` adjacent to `v` directly or
/// via a path whose interior lies in `through` — `v`'s degree at
/// elimination time once everything in `through` is already gone.
fn elim_degree(adj: &[u64], v: usize, through: u64) -> u32 {
    let mut reach = 1u64 << v;
    loop {
        let mut nb = 0u64;
        for u in bits(reach) {
            nb |= adj[u];
        }
        let grown = reach | (nb & through);
        if grown == reach {
            return (nb & !through & !(1 << v)).count_ones();
        }
        reach = grown;
    }
}

// --- cover width ---------------------------------------------------------------

/// Generated-hypergraph cap for [`cover_width`].
const COVER_WIDTH_GUARD: usize = 1 << 16;

/// Induced cover width of `sao`.
///
/// Eliminating attributes from the back of the order, each step collects
/// the accumulated hypergraphs whose vertex set contains the attribute,
/// closes the collection under pairwise union, and scores each member by
/// its minimum integral edge cover; the closed collection is then absorbed
/// and the attribute deleted everywhere. The result is the largest score
/// seen. Closure growth is capped at 2^16 materialized hypergraphs —
/// pathological inputs error out instead of exhausting memory.
pub fn cover_width(hg: &Hypergraph, sao: &Sao) -> Result<usize> {
    debug_assert_eq!(sao.n(), hg.n());
    // A member hypergraph is its sorted edge set; its vertices are the
    // union of its edges, so elimination needs no separate vertex set.
    let mut pool: BTreeSet<Vec<u64>> =
        hg.edge_masks().iter().map(|&e| vec![e]).collect();
    let mut generated = pool.len();
    let mut cw = 0usize;
    for k in (0..sao.n()).rev() {
        let vbit = 1u64 << sao.attr(k);
        let mut members: Vec<Vec<u64>> =
            pool.iter().filter(|m| vertex_set(m) & vbit != 0).cloned().collect();
        let mut seen: BTreeSet<Vec<u64>> = members.iter().cloned().collect();
        let mut i = 0;
        while i < members.len() {
            for j in 0..i {
                let u = union_edges(&members[i], &members[j]);
                if seen.insert(u.clone()) {
                    generated += 1;
                    if generated > COVER_WIDTH_GUARD {
                        return Err(Error::GuardExceeded(format!(
                            "cover-width closure exceeded {COVER_WIDTH_GUARD} hypergraphs"
                        )));
                    }
                    members.push(u);
                }
            }
            i += 1;
        }
        for m in &members {
            cw = cw.max(min_edge_cover(m)?);
        }
        pool.extend(members);
        pool = pool
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|e| e & !vbit)
                    .filter(|&e| e != 0)
                    .collect::<BTreeSet<u64>>()
                    .into_iter()
                    .collect()
            })
            .collect();
    }
    Ok(cw)
}

fn vertex_set(member: &[u64]) -> u64 {
    member.iter().fold(0, |acc, &e| acc | e)
}

fn union_edges(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Minimum number of edges of `member` covering its vertex set.
fn min_edge_cover(member: &[u64]) -> Result<usize> {
    let target = vertex_set(member);
    if target == 0 {
        return Ok(0);
    }
    // A member never holds more distinct edges than the original query
    // (every edge is an original edge minus the attributes eliminated so
    // far), so the subset search stays tiny; guard it anyway.
    if member.len() > 20 {
        return Err(Error::GuardExceeded(format!(
            "edge-cover search over {} edges",
            member.len()
        )));
    }
    (1u32..1 << member.len())
        .filter(|pick| {
            bits(u64::from(*pick)).fold(0, |acc, i| acc | member[i]) == target
        })
        .map(|pick| pick.count_ones() as usize)
        .min()
        .ok_or_else(|| Error::InvalidParameter("uncoverable member".into()))
}

/// Hypergraph whose vertex set is `attrs` and whose edges are the distinct
/// box supports.
pub fn supporting_hypergraph(attrs: &[String], boxes: &[DyadicBox]) -> Result<Hypergraph> {
    let mut hg = Hypergraph::new(attrs.iter().cloned())?;
    let supports: BTreeSet<Vec<usize>> = boxes.iter().map(DyadicBox::support).collect();
    for s in supports {
        let names: Vec<&str> = s.iter().map(|&i| attrs[i].as_str()).collect();
        hg.add_edge(&names)?;
    }
    Ok(hg)
}

// --- relations -------------------------------------------------------------------

/// A named relation: an ordered schema and a sorted, deduplicated set of
/// integer tuples from `[0, 2^d)^arity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    name: String,
    schema: Vec<String>,
    d: u8,
    tuples: Vec<Vec<u64>>,
}

impl Relation {
    /// Validates arity and value range, sorts, and drops duplicates.
    pub fn new<S: Into<String>>(
        name: S,
        schema: Vec<String>,
        d: u8,
        mut tuples: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let name = name.into();
        if d == 0 || d > MAX_WIDTH {
            return Err(Error::InvalidParameter(format!("relation `{name}`: bit width d={d}")));
        }
        if schema.is_empty() {
            return Err(Error::InvalidParameter(format!("relation `{name}`: empty schema")));
        }
        let distinct: BTreeSet<&String> = schema.iter().collect();
        if distinct.len() != schema.len() {
            return Err(Error::InvalidParameter(format!(
                "relation `{name}`: repeated attribute in schema"
            )));
        }
        for t in &tuples {
            if t.len() != schema.len() {
                return Err(Error::InvalidParameter(format!(
                    "relation `{name}`: tuple arity {} vs schema arity {}",
                    t.len(),
                    schema.len()
                )));
            }
            if let Some(v) = t.iter().find(|&&v| v >= 1 << d) {
                return Err(Error::InvalidParameter(format!(
                    "relation `{name}`: value {v} out of domain for d={d}"
                )));
            }
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Self { name, schema, d, tuples })
    }

    /// Relation name.
    #[must_use]
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Attribute names, in column order.
    #[must_use]
    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    /// Bit width of every value.
    #[must_use]
    pub fn d(&self) -> u8 {
        self.d
    }

    /// Number of attributes.
    #[must_use]
    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    /// Tuples in ascending lexicographic order.
    #[must_use]
    pub fn tuples(&self) -> &[Vec<u64>] {
        &self.tuples
    }

    /// Number of tuples.
    #[must_use]
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    /// Whether the relation holds no tuples.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Membership test.
    #[must_use]
    pub fn contains(&self, t: &[u64]) -> bool {
        self.tuples.binary_search_by(|probe| probe.as_slice().cmp(t)).is_ok()
    }
}

// --- gap boxes from indices ---------------------------------------------------------

/// Positions of `order`'s attributes within `schema`; errors unless
/// `order` is a permutation of `schema`.
fn order_positions(schema: &[String], order: &[String]) -> Result<Vec<usize>> {
    let pos: Vec<usize> = order
        .iter()
        .map(|a| {
            schema.iter().position(|s| s == a).ok_or_else(|| {
                Error::BadOrder(format!("attribute `{a}` is not in the relation schema"))
            })
        })
        .collect::<Result<_>>()?;
    let distinct: BTreeSet<usize> = pos.iter().copied().collect();
    if pos.len() != schema.len() || distinct.len() != pos.len() {
        return Err(Error::BadOrder(format!(
            "order must permute the {}-attribute schema",
            schema.len()
        )));
    }
    Ok(pos)
}

/// Gap boxes of a sorted-trie index over `rel` in attribute order
/// `order`: walking the trie, every maximal empty value range around or
/// between the children of a node becomes one box per dyadic interval of
/// the range's decomposition — full-length path values before it, λ after.
///
/// Components are returned in schema order; the union of the boxes is
/// exactly the complement of the relation within its subspace.
pub fn gao_gap_boxes(rel: &Relation, order: &[String]) -> Result<Vec<DyadicBox>> {
    let pos = order_positions(rel.schema(), order)?;
    let mut keys: Vec<Vec<u64>> =
        rel.tuples().iter().map(|t| pos.iter().map(|&p| t[p]).collect()).collect();
    keys.sort_unstable();
    let mut out = Vec::new();
    let mut path: Vec<u64> = Vec::with_capacity(pos.len());
    trie_gaps(rel.d(), &pos, &keys, &mut path, &mut out)?;
    Ok(out)
}

/// Emits the gaps at one trie node and recurses into its children.
/// `group` holds the key vectors sharing the values in `path`.
fn trie_gaps(
    d: u8,
    pos: &[usize],
    group: &[Vec<u64>],
    path: &mut Vec<u64>,
    out: &mut Vec<DyadicBox>,
) -> Result<()> {
    let depth = path.len();
    if depth == pos.len() {
        return Ok(());
    }
    let mut next = 0u64; // least value not yet known to be present
    let mut start = 0;
    while start <= group.len() {
        let child = group.get(start).map(|k| k[depth]);
        let gap_end = child.map_or(1 << d, |v| v); // exclusive
        if next < gap_end {
            for iv in decompose_range(next, gap_end - 1, d)? {
                let mut comps = vec![DyadicInterval::LAMBDA; pos.len()];
                for (j, &v) in path.iter().enumerate() {
                    comps[pos[j]] = DyadicInterval::new(v, d);
                }
                comps[pos[depth]] = iv;
                out.push(DyadicBox::new(d, comps));
            }
        }
        let Some(v) = child else { break };
        let end = start + group[start..].iter().take_while(|k| k[depth] == v).count();
        path.push(v);
        trie_gaps(d, pos, &group[start..end], path, out)?;
        path.pop();
        next = v + 1;
        start = end;
    }
    Ok(())
}

/// Gap boxes of a quad-tree-style index over `rel`: the relation's
/// subspace is subdivided by halving every thick dimension at once, and
/// every tuple-free cell reached is emitted whole. The boxes are pairwise
/// disjoint and union to the complement of the relation.
#[must_use]
pub fn dyadic_tree_gap_boxes(rel: &Relation) -> Vec<DyadicBox> {
    let mut out = Vec::new();
    let tuples: Vec<&[u64]> = rel.tuples().iter().map(Vec::as_slice).collect();
    subdivide(&DyadicBox::universal(rel.d(), rel.arity()), &tuples, rel.d(), &mut out);
    out
}

/// `tuples` are exactly the relation's tuples inside `b`.
fn subdivide(b: &DyadicBox, tuples: &[&[u64]], d: u8, out: &mut Vec<DyadicBox>) {
    if tuples.is_empty() {
        out.push(b.clone());
        return;
    }
    let thick: Vec<usize> =
        (0..b.comps().len()).filter(|&i| b.comp(i).len() < d).collect();
    if thick.is_empty() {
        return; // an occupied unit
    }
    // One child per corner: bit j of `corner` picks the half of `thick[j]`.
    for corner in 0..1u64 << thick.len() {
        let mut child = b.clone();
        for (j, &dim) in thick.iter().enumerate() {
            child = child.with_comp(dim, b.comp(dim).child((corner >> j & 1) as u8));
        }
        let inside: Vec<&[u64]> = tuples
            .iter()
            .copied()
            .filter(|t| {
                thick
                    .iter()
                    .all(|&dim| child.comp(dim).contains(DyadicInterval::new(t[dim], d)))
            })
            .collect();
        subdivide(&child, &inside, d, out);
    }
}

// --- join queries ----------------------------------------------------------------

/// One index declaration on a relation.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSpec {
    /// Sorted-trie index in the given attribute order; an omitted order
    /// means the relation's schema order.
    GaoConsistent {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<String>>,
    },
    /// Quad-tree-style recursive-subdivision index.
    DyadicTree,
}

/// The materialized gap boxes of one index, lifted to the full query
/// space: components of attributes outside the relation's schema are λ.
#[derive(Clone, Debug)]
pub struct GapIndex {
    relation: String,
    spec: IndexSpec,
    boxes: Vec<DyadicBox>,
}

impl GapIndex {
    /// Name of the indexed relation.
    #[must_use]
    pub fn relation(&self) -> &str {
        &self.relation
    }

    /// The declaration this index was built from.
    #[must_use]
    pub fn spec(&self) -> &IndexSpec {
        &self.spec
    }

    /// Lifted gap boxes, components in query attribute order.
    #[must_use]
    pub fn boxes(&self) -> &[DyadicBox] {
        &self.boxes
    }
}

/// Builds one index over `rel` and lifts its gap boxes into the space of
/// `attrs` (which must contain the relation's schema).
pub fn build_gap_index(rel: &Relation, spec: &IndexSpec, attrs: &[String]) -> Result<GapIndex> {
    let lift: Vec<usize> = rel
        .schema()
        .iter()
        .map(|a| {
            attrs.iter().position(|q| q == a).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "relation `{}` attribute `{a}` is not a query attribute",
                    rel.name()
                ))
            })
        })
        .collect::<Result<_>>()?;
    let raw = match spec {
        IndexSpec::GaoConsistent { order } => {
            let order = order.clone().unwrap_or_else(|| rel.schema().to_vec());
            gao_gap_boxes(rel, &order)?
        }
        IndexSpec::DyadicTree => dyadic_tree_gap_boxes(rel),
    };
    let boxes = raw
        .iter()
        .map(|b| {
            let mut comps = vec![DyadicInterval::LAMBDA; attrs.len()];
            for (i, &qi) in lift.iter().enumerate() {
                comps[qi] = b.comp(i);
            }
            DyadicBox::new(rel.d(), comps)
        })
        .collect();
    Ok(GapIndex { relation: rel.name().into(), spec: spec.clone(), boxes })
}

/// A per-attribute dictionary: raw values in ascending order, the integer
/// code of a value being its rank. An empty dictionary decodes codes to
/// their decimal strings (identity encoding for born-integer data).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    values: Vec<String>,
}

impl Dictionary {
    /// Builds a dictionary from the distinct raw values, sorted.
    #[must_use]
    pub fn new(values: BTreeSet<String>) -> Self {
        Self { values: values.into_iter().collect() }
    }

    /// The integer code of a raw value.
    #[must_use]
    pub fn code(&self, raw: &str) -> Option<u64> {
        self.values.binary_search_by(|v| v.as_str().cmp(raw)).ok().map(|i| i as u64)
    }

    /// The raw value of a code; codes in the padding (or any code of an
    /// identity dictionary) decode to their decimal form.
    #[must_use]
    pub fn decode(&self, code: u64) -> String {
        match self.values.get(code as usize) {
            Some(v) if !self.values.is_empty() => v.clone(),
            _ => code.to_string(),
        }
    }

    /// Number of dictionary entries.
    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether this is the identity (integer pass-through) dictionary.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A join query as stored on disk: output attributes and the relations
/// joined, each with a data file and its index declarations.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct QuerySpec {
    pub attributes: Vec<String>,
    pub relations: Vec<RelationSpec>,
}

/// One relation of a [`QuerySpec`].
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RelationSpec {
    pub name: String,
    pub attrs: Vec<String>,
    pub file: String,
    /// Index declarations; an empty list defaults to one sorted-trie index
    /// in schema order.
    #[serde(default)]
    pub indices: Vec<IndexSpec>,
}

/// A fully loaded join: attributes, bit width, relations with their
/// indices built, and the per-attribute dictionaries that decode integer
/// codes back to raw values.
#[derive(Clone, Debug)]
pub struct JoinInstance {
    attributes: Vec<String>,
    d: u8,
    relations: Vec<Relation>,
    indices: Vec<GapIndex>,
    dictionaries: Vec<Dictionary>,
}

impl JoinInstance {
    /// Assembles an instance from in-memory relations, building the given
    /// indices (an empty list per relation defaults to one sorted-trie
    /// index in schema order). Identity dictionaries are attached.
    pub fn build(
        attributes: Vec<String>,
        d: u8,
        relations: Vec<(Relation, Vec<IndexSpec>)>,
    ) -> Result<Self> {
        let distinct: BTreeSet<&String> = attributes.iter().collect();
        if distinct.len() != attributes.len() {
            return Err(Error::InvalidParameter("repeated query attribute".into()));
        }
        let mut names = BTreeSet::new();
        let mut indices = Vec::new();
        let mut rels = Vec::new();
        for (rel, specs) in relations {
            if rel.d() != d {
                return Err(Error::InvalidParameter(format!(
                    "relation `{}` has width {}, query has {d}",
                    rel.name(),
                    rel.d()
                )));
            }
            if !names.insert(rel.name().to_string()) {
                return Err(Error::InvalidParameter(format!(
                    "repeated relation name `{}`",
                    rel.name()
                )));
            }
            let specs = if specs.is_empty() {
                vec![IndexSpec::GaoConsistent { order: None }]
            } else {
                specs
            };
            for spec in &specs {
                indices.push(build_gap_index(&rel, spec, &attributes)?);
            }
            rels.push(rel);
        }
        let dictionaries = vec![Dictionary::default(); attributes.len()];
        Ok(Self { attributes, d, relations: rels, indices, dictionaries })
    }

    /// Query attribute names, defining component order of oracle boxes.
    #[must_use]
    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    /// Bit width of every attribute.
    #[must_use]
    pub fn d(&self) -> u8 {
        self.d
    }

    /// The joined relations.
    #[must_use]
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Every built index.
    #[must_use]
    pub fn indices(&self) -> &[GapIndex] {
        &self.indices
    }

    /// Per-attribute dictionaries, aligned with [`Self::attributes`].
    #[must_use]
    pub fn dictionaries(&self) -> &[Dictionary] {
        &self.dictionaries
    }

    /// The query hypergraph: one edge per relation schema.
    pub fn hypergraph(&self) -> Result<Hypergraph> {
        let mut hg = Hypergraph::new(self.attributes.iter().cloned())?;
        for rel in &self.relations {
            let names: Vec<&str> = rel.schema().iter().map(String::as_str).collect();
            hg.add_edge(&names)?;
        }
        Ok(hg)
    }

    /// Decodes an output tuple (original attribute order) to raw values.
    #[must_use]
    pub fn decode_tuple(&self, tuple: &DyadicBox) -> Vec<String> {
        let values = tuple.values().expect("output tuples are unit boxes");
        values.iter().zip(&self.dictionaries).map(|(&v, dict)| dict.decode(v)).collect()
    }
}

/// The solver oracle of a query: the union of every index's lifted gap
/// boxes, duplicates removed. Every relation must carry at least one
/// index.
pub fn query_oracle(instance: &JoinInstance) -> Result<MaterializedOracle> {
    for rel in instance.relations() {
        if !instance.indices().iter().any(|ix| ix.relation() == rel.name()) {
            return Err(Error::InvalidParameter(format!(
                "relation `{}` has no index",
                rel.name()
            )));
        }
    }
    let boxes = instance.indices().iter().flat_map(|ix| ix.boxes().iter().cloned());
    Ok(MaterializedOracle::new(instance.d(), instance.attributes().len(), boxes))
}

/// Reads a query file (JSON) and its relation data files (CSV, or TSV for
/// `.tsv` paths; header row of attribute names), dictionary-encodes every
/// attribute over its distinct raw values in sorted order, and pads the
/// domain to the least sufficient power of two.
pub fn load_query(path: &Path) -> Result<JoinInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::File { path: path.into(), source })?;
    let spec: QuerySpec = serde_json::from_str(&text)?;
    load_query_spec(&spec, path.parent().unwrap_or_else(|| Path::new(".")))
}

/// As [`load_query`], with relation files resolved against `base`.
pub fn load_query_spec(spec: &QuerySpec, base: &Path) -> Result<JoinInstance> {
    let mut tables = Vec::new();
    for rs in &spec.relations {
        tables.push(read_table(&base.join(&rs.file), &rs.attrs)?);
    }
    // One dictionary per query attribute, shared by every relation using
    // it, so equal raw values join across relations.
    let mut raw_values: Vec<BTreeSet<String>> = vec![BTreeSet::new(); spec.attributes.len()];
    let attr_index = |a: &str| spec.attributes.iter().position(|q| q == a);
    for (rs, rows) in spec.relations.iter().zip(&tables) {
        for (j, a) in rs.attrs.iter().enumerate() {
            let qi = attr_index(a).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "relation `{}` attribute `{a}` is not a query attribute",
                    rs.name
                ))
            })?;
            for row in rows {
                raw_values[qi].insert(row[j].clone());
            }
        }
    }
    let dictionaries: Vec<Dictionary> = raw_values.into_iter().map(Dictionary::new).collect();
    let d = dictionaries.iter().map(|dict| code_width(dict.len())).max().unwrap_or(1);
    let mut relations = Vec::new();
    for (rs, rows) in spec.relations.iter().zip(&tables) {
        let dicts: Vec<&Dictionary> = rs
            .attrs
            .iter()
            .map(|a| &dictionaries[attr_index(a).expect("checked above")])
            .collect();
        let tuples: Vec<Vec<u64>> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&dicts)
                    .map(|(raw, dict)| dict.code(raw).expect("value was collected"))
                    .collect()
            })
            .collect();
        let rel = Relation::new(rs.name.clone(), rs.attrs.clone(), d, tuples)?;
        relations.push((rel, rs.indices.clone()));
    }
    let mut instance = JoinInstance::build(spec.attributes.clone(), d, relations)?;
    instance.dictionaries = dictionaries;
    Ok(instance)
}

/// Narrowest width addressing `count` codes; at least one bit.
fn code_width(count: usize) -> u8 {
    if count <= 2 {
        1
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as u8
    }
}

/// Reads one relation file; the header must list exactly `attrs`.
fn read_table(path: &Path, attrs: &[String]) -> Result<Vec<Vec<String>>> {
    let delimiter = match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => b'\t',
        _ => b',',
    };
    let file = std::fs::File::open(path)
        .map_err(|source| Error::File { path: path.into(), source })?;
    let mut reader = csv::ReaderBuilder::new().delimiter(delimiter).from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != attrs {
        return Err(Error::Parse(format!(
            "{}: header [{}] does not match declared attributes [{}]",
            path.display(),
            header.join(", "),
            attrs.join(", ")
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

/// Reference join evaluation: every point of the padded domain is checked
/// against every relation. Exponential in `d·n` and guarded accordingly.
pub fn nested_loop_join(instance: &JoinInstance) -> Result<Vec<Vec<u64>>> {
    let n = instance.attributes().len();
    let d = instance.d();
    let bits = u32::from(d) * n as u32;
    if bits > 24 {
        return Err(Error::GuardExceeded(format!(
            "reference join over {bits} bits (limit 24)"
        )));
    }
    let positions: Vec<Vec<usize>> = instance
        .relations()
        .iter()
        .map(|rel| {
            rel.schema()
                .iter()
                .map(|a| {
                    instance
                        .attributes()
                        .iter()
                        .position(|q| q == a)
                        .expect("schema attributes are query attributes")
                })
                .collect()
        })
        .collect();
    let mask = (1u64 << d) - 1;
    let mut out = Vec::new();
    for point in 0..1u64 << bits {
        let values: Vec<u64> =
            (0..n).map(|i| (point >> ((n - 1 - i) as u32 * u32::from(d))) & mask).collect();
        let keep = instance.relations().iter().zip(&positions).all(|(rel, pos)| {
            let projected: Vec<u64> = pos.iter().map(|&p| values[p]).collect();
            rel.contains(&projected)
        });
        if keep {
            out.push(values);
        }
    }
    Ok(out)
}

// --- tests ---------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::BoxFile;
    use crate::engine::{tetris, BoxOracle, EngineMode};
    use crate::instances::{gen_fig_triangle, TriangleVariant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Hypergraph {
        Hypergraph::from_edges(&["A", "B", "C"], &[&["A", "B"], &["B", "C"]]).unwrap()
    }

    fn triangle() -> Hypergraph {
        Hypergraph::from_edges(&["A", "B", "C"], &[&["A", "B"], &["B", "C"], &["A", "C"]])
            .unwrap()
    }

    #[test]
    fn hypergraph_rejects_bad_construction() {
        assert!(Hypergraph::new(["A", "A"]).is_err());
        let mut hg = Hypergraph::new(["A", "B"]).unwrap();
        assert!(hg.add_edge(&["A", "Z"]).is_err());
        assert!(hg.add_edge(&[]).is_err());
        hg.add_edge(&["B", "A"]).unwrap();
        assert_eq!(hg.edge(0), vec![0, 1]);
    }

    #[test]
    fn gyo_accepts_bowtie() {
        let hg =
            Hypergraph::from_edges(&["A", "B"], &[&["A"], &["A", "B"], &["B"]]).unwrap();
        assert_eq!(gyo_eliminate(&hg), Some(vec![0, 1]));
    }

    #[test]
    fn gyo_rejects_triangle() {
        assert_eq!(gyo_eliminate(&triangle()), None);
    }

    #[test]
    fn gyo_accepts_single_edge() {
        let hg = Hypergraph::from_edges(&["A", "B", "C"], &[&["A", "B", "C"]]).unwrap();
        assert_eq!(gyo_eliminate(&hg), Some(vec![0, 1, 2]));
    }

    #[test]
    fn induced_width_path_identity_is_one() {
        assert_eq!(induced_width(&path3(), &Sao::identity(3)), 1);
    }

    #[test]
    fn induced_width_triangle_is_two_for_every_order() {
        let hg = triangle();
        for order in permutations(3) {
            assert_eq!(induced_width(&hg, &Sao::new(order).unwrap()), 2);
        }
    }

    #[test]
    fn induced_width_of_isolated_vertex_is_zero() {
        let hg = Hypergraph::new(["A"]).unwrap();
        assert_eq!(induced_width(&hg, &Sao::identity(1)), 0);
    }

    #[test]
    fn min_width_order_examples() {
        let (order, w) = min_width_order(&path3()).unwrap();
        assert_eq!(w, 1);
        assert_eq!(induced_width(&path3(), &Sao::new(order).unwrap()), 1);
        let (_, w) = min_width_order(&triangle()).unwrap();
        assert_eq!(w, 2);
        assert!(min_width_order(
            &Hypergraph::new((0..13).map(|i| format!("A{i}"))).unwrap()
        )
        .is_err());
    }

    #[test]
    fn min_width_order_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9eed);
        for _ in 0..60 {
            let n = rng.gen_range(2..=6usize);
            let attrs: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
            let mut hg =
                Hypergraph::new(attrs.iter().map(String::as_str)).unwrap();
            for _ in 0..rng.gen_range(1..=4) {
                let mask = rng.gen_range(1..1u64 << n);
                let edge: Vec<String> =
                    bits(mask).map(|v| attrs[v].clone()).collect();
                let edge_refs: Vec<&str> = edge.iter().map(String::as_str).collect();
                hg.add_edge(&edge_refs).unwrap();
            }
            let brute = permutations(n)
                .into_iter()
                .map(|p| induced_width(&hg, &Sao::new(p).unwrap()))
                .min()
                .unwrap();
            let (order, w) = min_width_order(&hg).unwrap();
            assert_eq!(w, brute);
            assert_eq!(induced_width(&hg, &Sao::new(order).unwrap()), w);
        }
    }

    #[test]
    fn cover_width_of_nested_path_order_is_one() {
        let hg = Hypergraph::from_edges(
            &["A", "B", "C", "D"],
            &[&["A", "B"], &["B", "C"], &["C", "D"]],
        )
        .unwrap();
        assert_eq!(cover_width(&hg, &Sao::identity(4)).unwrap(), 1);
        assert_eq!(cover_width(&path3(), &Sao::identity(3)).unwrap(), 1);
    }

    #[test]
    fn cover_width_of_triangle_is_two() {
        assert_eq!(cover_width(&triangle(), &Sao::identity(3)).unwrap(), 2);
    }

    #[test]
    fn cover_width_of_four_clique_is_three() {
        let hg = Hypergraph::from_edges(
            &["A", "B", "C", "D"],
            &[
                &["A", "B"],
                &["A", "C"],
                &["A", "D"],
                &["B", "C"],
                &["B", "D"],
                &["C", "D"],
            ],
        )
        .unwrap();
        assert_eq!(cover_width(&hg, &Sao::identity(4)).unwrap(), 3);
    }

    #[test]
    fn cover_width_guard_trips_on_a_fat_star() {
        // 17 spokes through one hub: the union closure at the hub has
        // 2^17 - 1 members, past the cap.
        let attrs: Vec<String> =
            (0..17).map(|i| format!("L{i}")).chain(["HUB".into()]).collect();
        let mut hg = Hypergraph::new(attrs.iter().map(String::as_str)).unwrap();
        for leaf in &attrs[..17] {
            hg.add_edge(&[leaf, "HUB"]).unwrap();
        }
        assert!(matches!(
            cover_width(&hg, &Sao::identity(18)),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn cover_width_never_beats_induced_width_by_two() {
        // Every collection member's vertices sit inside the eliminated
        // attribute's support, so cw(order) <= width(order) + 1.

        let mut rng = ChaCha8Rng::seed_from_u64(0xc0ce);
        for _ in 0..80 {
            let n = rng.gen_range(2..=5usize);
            let attrs: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
            let mut hg = Hypergraph::new(attrs.iter().map(String::as_str)).unwrap();
            for _ in 0..rng.gen_range(1..=4) {
                let mask = rng.gen_range(1..1u64 << n);
                let edge: Vec<String> = bits(mask).map(|v| attrs[v].clone()).collect();
                let edge_refs: Vec<&str> = edge.iter().map(String::as_str).collect();
                hg.add_edge(&edge_refs).unwrap();
            }
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let sao = Sao::new(order).unwrap();
            let cw = cover_width(&hg, &sao).unwrap();
            assert!(cw <= induced_width(&hg, &sao) + 1);
        }
    }

    /// All permutations of `0..n`, for exhaustive small-order checks.
    pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rest.is_empty() {
                out.push(prefix.clone());
                return;
            }
            for i in 0..rest.len() {
                let v = rest.remove(i);
                prefix.push(v);
                go(prefix, rest, out);
                prefix.pop();
                rest.insert(i, v);
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
        out
    }

    // --- relations and gap extraction ---

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    /// The cross-shaped two-attribute relation `{4}×{1..7} ∪ {1..7}×{4}`
    /// on the domain `[0, 8)`.
    fn cross_relation() -> Relation {
        let mut tuples: Vec<Vec<u64>> = (1..=7).map(|b| vec![4, b]).collect();
        tuples.extend((1..=7).map(|a| vec![a, 4]));
        Relation::new("R", names(&["A", "B"]), 3, tuples).unwrap()
    }

    /// Every point of the relation's subspace, as value vectors.
    fn subspace_points(d: u8, arity: usize) -> Vec<Vec<u64>> {
        let mask = (1u64 << d) - 1;
        (0..1u64 << (u32::from(d) * arity as u32))
            .map(|p| {
                (0..arity).map(|i| (p >> ((arity - 1 - i) as u32 * u32::from(d))) & mask).collect()
            })
            .collect()
    }

    fn covers_point(boxes: &[DyadicBox], d: u8, point: &[u64]) -> bool {
        let unit =
            DyadicBox::new(d, point.iter().map(|&v| DyadicInterval::new(v, d)).collect());
        boxes.iter().any(|b| b.contains(&unit))
    }

    /// Union of `boxes` must be exactly the complement of `rel`'s tuples.
    fn assert_exact_complement(boxes: &[DyadicBox], rel: &Relation) {
        for point in subspace_points(rel.d(), rel.arity()) {
            assert_eq!(
                covers_point(boxes, rel.d(), &point),
                !rel.contains(&point),
                "point {point:?} of `{}`",
                rel.name()
            );
        }
    }

    /// Every box has at most one component that is neither λ nor
    /// full-length, and only λ components after it in `order`.
    fn assert_gao_consistent(boxes: &[DyadicBox], rel: &Relation, order: &[String]) {
        let pos = order_positions(rel.schema(), order).unwrap();
        let d = rel.d();
        for b in boxes {
            let nontrivial: Vec<usize> = (0..pos.len())
                .filter(|&j| {
                    let len = b.comp(pos[j]).len();
                    len > 0 && len < d
                })
                .collect();
            assert!(nontrivial.len() <= 1, "two non-trivial components in {b}");
            if let Some(&k) = nontrivial.first() {
                assert!(
                    (k + 1..pos.len()).all(|j| b.comp(pos[j]).is_lambda()),
                    "non-λ component after the non-trivial one in {b}"
                );
            }
        }
    }

    #[test]
    fn relation_validates_sorts_and_dedups() {
        let rel = Relation::new(
            "R",
            names(&["A", "B"]),
            2,
            vec![vec![3, 0], vec![1, 2], vec![3, 0]],
        )
        .unwrap();
        assert_eq!(rel.tuples(), &[vec![1, 2], vec![3, 0]]);
        assert_eq!(rel.len(), 2);
        assert!(rel.contains(&[3, 0]));
        assert!(!rel.contains(&[0, 3]));

        assert!(Relation::new("R", names(&["A", "B"]), 2, vec![vec![1]]).is_err());
        assert!(Relation::new("R", names(&["A", "B"]), 2, vec![vec![4, 0]]).is_err());
        assert!(Relation::new("R", names(&["A", "A"]), 2, vec![]).is_err());
        assert!(Relation::new("R", names(&[]), 2, vec![]).is_err());
        assert!(Relation::new("R", names(&["A"]), 0, vec![]).is_err());
    }

    #[test]
    fn trie_gaps_of_the_cross_relation() {
        let rel = cross_relation();
        let boxes = gao_gap_boxes(&rel, &names(&["A", "B"])).unwrap();
        // One strip left of the first A value, one segment under column
        // four's B values, and three segments in each other column.
        assert_eq!(boxes.len(), 20);
        for expect in ["<000,*>", "<100,000>", "<001,0>", "<001,101>", "<001,11>"] {
            let b = BoxFile::parse_box(expect, 3, 2).unwrap();
            assert!(boxes.contains(&b), "missing {expect}");
        }
        assert_exact_complement(&boxes, &rel);
        assert_gao_consistent(&boxes, &rel, &names(&["A", "B"]));
    }

    #[test]
    fn trie_gaps_mirror_under_the_swapped_order() {
        let rel = cross_relation();
        let ab = gao_gap_boxes(&rel, &names(&["A", "B"])).unwrap();
        let ba = gao_gap_boxes(&rel, &names(&["B", "A"])).unwrap();
        assert_exact_complement(&ba, &rel);
        assert_gao_consistent(&ba, &rel, &names(&["B", "A"]));
        // The cross is symmetric, so the two families mirror each other.
        let mut swapped: Vec<DyadicBox> = ba
            .iter()
            .map(|b| DyadicBox::new(3, vec![b.comp(1), b.comp(0)]))
            .collect();
        swapped.sort_by_key(ToString::to_string);
        let mut ab = ab;
        ab.sort_by_key(ToString::to_string);
        assert_eq!(ab, swapped);
    }

    #[test]
    fn trie_gaps_of_empty_and_full_relations() {
        let empty = Relation::new("E", names(&["A", "B"]), 2, vec![]).unwrap();
        let boxes = gao_gap_boxes(&empty, &names(&["B", "A"])).unwrap();
        assert_eq!(boxes, vec![DyadicBox::universal(2, 2)]);

        let full =
            Relation::new("F", names(&["A", "B"]), 1, subspace_points(1, 2)).unwrap();
        assert!(gao_gap_boxes(&full, &names(&["A", "B"])).unwrap().is_empty());
        assert!(dyadic_tree_gap_boxes(&full).is_empty());
    }

    #[test]
    fn trie_gaps_reject_non_permutations() {
        let rel = cross_relation();
        assert!(matches!(
            gao_gap_boxes(&rel, &names(&["A", "Z"])),
            Err(Error::BadOrder(_))
        ));
        assert!(matches!(gao_gap_boxes(&rel, &names(&["A"])), Err(Error::BadOrder(_))));
        assert!(matches!(
            gao_gap_boxes(&rel, &names(&["A", "A"])),
            Err(Error::BadOrder(_))
        ));
    }

    #[test]
    fn subdivision_gaps_by_hand() {
        let rel = Relation::new("R", names(&["A", "B"]), 1, vec![vec![0, 0]]).unwrap();
        let mut boxes = dyadic_tree_gap_boxes(&rel);
        boxes.sort_by_key(ToString::to_string);
        assert_eq!(
            boxes,
            vec![
                BoxFile::parse_box("<0,1>", 1, 2).unwrap(),
                BoxFile::parse_box("<1,0>", 1, 2).unwrap(),
                BoxFile::parse_box("<1,1>", 1, 2).unwrap(),
            ]
        );

        // One level deeper the empty sibling quadrant comes out whole.
        let rel = Relation::new("R", names(&["A", "B"]), 2, vec![vec![0, 0]]).unwrap();
        let boxes = dyadic_tree_gap_boxes(&rel);
        for expect in ["<0,1>", "<1,0>", "<1,1>", "<00,01>", "<01,00>", "<01,01>"] {
            let b = BoxFile::parse_box(expect, 2, 2).unwrap();
            assert!(boxes.contains(&b), "missing {expect}");
        }
        assert_eq!(boxes.len(), 6);
    }

    #[test]
    fn subdivision_gaps_of_the_cross_relation() {
        let rel = cross_relation();
        let boxes = dyadic_tree_gap_boxes(&rel);
        assert_exact_complement(&boxes, &rel);
        // The empty low quadrant comes out whole; the other three empty
        // regions around the cross are covered piecewise.
        assert!(boxes.contains(&BoxFile::parse_box("<0,0>", 3, 2).unwrap()));
        let regions: [(std::ops::RangeInclusive<u64>, std::ops::RangeInclusive<u64>); 4] = [
            (0..=3, 0..=3),
            (0..=3, 5..=7),
            (5..=7, 0..=3),
            (5..=7, 5..=7),
        ];
        for (ra, rb) in regions {
            for a in ra {
                for b in rb.clone() {
                    assert!(covers_point(&boxes, 3, &[a, b]), "({a},{b}) uncovered");
                }
            }
        }
    }

    #[test]
    fn subdivision_gaps_are_pairwise_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd15);
        for _ in 0..30 {
            let arity = rng.gen_range(1..=3usize);
            let d = rng.gen_range(1..=2u8);
            let domain = 1u64 << d;
            let count = rng.gen_range(0..=domain.pow(arity as u32));
            let tuples: Vec<Vec<u64>> = (0..count)
                .map(|_| (0..arity).map(|_| rng.gen_range(0..domain)).collect())
                .collect();
            let rel =
                Relation::new("R", names(&["A", "B", "C"][..arity]), d, tuples).unwrap();
            let boxes = dyadic_tree_gap_boxes(&rel);
            assert_exact_complement(&boxes, &rel);
            for (i, a) in boxes.iter().enumerate() {
                for b in &boxes[i + 1..] {
                    let overlap = (0..arity).all(|k| {
                        a.comp(k).contains(b.comp(k)) || b.comp(k).contains(a.comp(k))
                    });
                    assert!(!overlap, "{a} overlaps {b}");
                }
            }
            // The trie extraction covers the same complement.
            let order = names(&["A", "B", "C"][..arity]);
            let trie = gao_gap_boxes(&rel, &order).unwrap();
            assert_exact_complement(&trie, &rel);
            assert_gao_consistent(&trie, &rel, &order);
        }
    }

    // --- queries ---

    /// The three pairwise relations over first-bit-differing pairs: the
    /// join is empty and the gap boxes are the classic six.
    fn triangle_instance() -> JoinInstance {
        let pairs = vec![vec![0u64, 1], vec![1, 0]];
        let rels = [("R", ["A", "B"]), ("S", ["B", "C"]), ("T", ["A", "C"])];
        JoinInstance::build(
            names(&["A", "B", "C"]),
            1,
            rels.iter()
                .map(|(name, attrs)| {
                    let rel =
                        Relation::new(*name, names(attrs), 1, pairs.clone()).unwrap();
                    (rel, vec![IndexSpec::DyadicTree])
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn triangle_oracle_matches_the_classic_box_set() {
        let instance = triangle_instance();
        let oracle = query_oracle(&instance).unwrap();
        let mut got: Vec<String> =
            oracle.all_boxes().iter().map(ToString::to_string).collect();
        got.sort();
        let fixture = gen_fig_triangle(TriangleVariant::Empty, 1).unwrap();
        let mut want: Vec<String> =
            fixture.boxes.iter().map(ToString::to_string).collect();
        want.sort();
        assert_eq!(got, want);

        let sao = Sao::identity(3);
        let (tuples, _) = tetris(&oracle, EngineMode::Reloaded, &sao).unwrap();
        assert!(tuples.is_empty());
    }

    #[test]
    fn oracle_unions_every_index_and_probes_miss_outputs() {
        // Flip T to equal-bit pairs: the join output is the two
        // alternating triples.
        let differing = vec![vec![0u64, 1], vec![1, 0]];
        let equal = vec![vec![0u64, 0], vec![1, 1]];
        let instance = JoinInstance::build(
            names(&["A", "B", "C"]),
            1,
            vec![
                (
                    Relation::new("R", names(&["A", "B"]), 1, differing.clone()).unwrap(),
                    vec![
                        IndexSpec::DyadicTree,
                        IndexSpec::GaoConsistent { order: None },
                        IndexSpec::GaoConsistent { order: Some(names(&["B", "A"])) },
                    ],
                ),
                (
                    Relation::new("S", names(&["B", "C"]), 1, differing).unwrap(),
                    vec![IndexSpec::DyadicTree],
                ),
                (
                    Relation::new("T", names(&["A", "C"]), 1, equal).unwrap(),
                    vec![IndexSpec::DyadicTree],
                ),
            ],
        )
        .unwrap();
        let oracle = query_oracle(&instance).unwrap();
        let reference = nested_loop_join(&instance).unwrap();
        assert_eq!(reference, vec![vec![0, 1, 0], vec![1, 0, 1]]);

        // A probe at an output tuple finds no gap box.
        let out = DyadicBox::new(
            1,
            vec![
                DyadicInterval::new(0, 1),
                DyadicInterval::new(1, 1),
                DyadicInterval::new(0, 1),
            ],
        );
        assert!(oracle.containing(&out).is_empty());

        let sao = Sao::identity(3);
        for mode in [EngineMode::Preloaded, EngineMode::Reloaded] {
            let (tuples, _) = tetris(&oracle, mode, &sao).unwrap();
            let values: Vec<Vec<u64>> =
                tuples.iter().map(|t| t.values().unwrap()).collect();
            assert_eq!(values, reference);
        }
    }

    #[test]
    fn oracle_requires_an_index_per_relation() {
        let mut instance = triangle_instance();
        instance.indices.retain(|ix| ix.relation() != "S");
        assert!(matches!(query_oracle(&instance), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn random_joins_agree_with_the_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x10ca);
        let attr_pool = ["A", "B", "C"];
        for round in 0..30 {
            let n = rng.gen_range(2..=3usize);
            let d = rng.gen_range(1..=2u8);
            let domain = 1u64 << d;
            let attrs = names(&attr_pool[..n]);
            let rel_count = rng.gen_range(1..=3usize);
            let relations: Vec<(Relation, Vec<IndexSpec>)> = (0..rel_count)
                .map(|r| {
                    let arity = rng.gen_range(1..=n);
                    let mut schema: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        schema.swap(i, rng.gen_range(0..=i));
                    }
                    schema.truncate(arity);
                    let schema = names(
                        &schema.iter().map(|&i| attr_pool[i]).collect::<Vec<_>>(),
                    );
                    let count = rng.gen_range(0..=domain.pow(arity as u32));
                    let tuples: Vec<Vec<u64>> = (0..count)
                        .map(|_| (0..arity).map(|_| rng.gen_range(0..domain)).collect())
                        .collect();
                    let mut order = schema.clone();
                    for i in (1..order.len()).rev() {
                        order.swap(i, rng.gen_range(0..=i));
                    }
                    let specs = match rng.gen_range(0..3) {
                        0 => vec![IndexSpec::GaoConsistent { order: Some(order) }],
                        1 => vec![IndexSpec::DyadicTree],
                        _ => vec![
                            IndexSpec::GaoConsistent { order: Some(order) },
                            IndexSpec::DyadicTree,
                        ],
                    };
                    (Relation::new(format!("R{r}"), schema, d, tuples).unwrap(), specs)
                })
                .collect();
            let instance = JoinInstance::build(attrs, d, relations).unwrap();
            let oracle = query_oracle(&instance).unwrap();
            let reference = nested_loop_join(&instance).unwrap();
            let sao = Sao::identity(n);
            for mode in [EngineMode::Preloaded, EngineMode::Reloaded] {
                let (tuples, _) = tetris(&oracle, mode, &sao).unwrap();
                let values: Vec<Vec<u64>> =
                    tuples.iter().map(|t| t.values().unwrap()).collect();
                assert_eq!(values, reference, "round {round}, {mode}");
            }
        }
    }

    #[test]
    fn box_supports_never_widen_the_query() {
        for instance in [triangle_instance(), path_query_instance()] {
            let oracle = query_oracle(&instance).unwrap();
            let support =
                supporting_hypergraph(instance.attributes(), &oracle.all_boxes()).unwrap();
            let query_tw = min_width_order(&instance.hypergraph().unwrap()).unwrap().1;
            let support_tw = min_width_order(&support).unwrap().1;
            assert!(
                support_tw <= query_tw,
                "support width {support_tw} exceeds query width {query_tw}"
            );
        }
    }

    fn path_query_instance() -> JoinInstance {
        let tuples = vec![vec![0u64, 3], vec![1, 2], vec![2, 2]];
        JoinInstance::build(
            names(&["A", "B", "C"]),
            2,
            vec![
                (
                    Relation::new("R", names(&["A", "B"]), 2, tuples.clone()).unwrap(),
                    vec![],
                ),
                (Relation::new("S", names(&["B", "C"]), 2, tuples).unwrap(), vec![]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn query_files_load_encode_and_decode() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("r.csv"),
            "A,B\nbanana,apple\ncherry,apple\n",
        )
        .unwrap();
        std::fs::write(
            dir.path().join("s.tsv"),
            "B\tC\napple\tred\napple\tblue\ndate\tgreen\n",
        )
        .unwrap();
        let query = r#"{
            "attributes": ["A", "B", "C"],
            "relations": [
                {"name": "R", "attrs": ["A", "B"], "file": "r.csv"},
                {"name": "S", "attrs": ["B", "C"], "file": "s.tsv",
                 "indices": [{"kind": "gao_consistent", "order": ["C", "B"]},
                             {"kind": "dyadic_tree"}]}
            ]
        }"#;
        std::fs::write(dir.path().join("q.json"), query).unwrap();

        let instance = load_query(&dir.path().join("q.json")).unwrap();
        // Three colors force two bits; the other dictionaries pad to match.
        assert_eq!(instance.d(), 2);
        assert_eq!(instance.dictionaries()[0].decode(1), "cherry");
        assert_eq!(instance.dictionaries()[2].code("red"), Some(2));
        assert_eq!(instance.dictionaries()[2].decode(3), "3"); // padding
        assert_eq!(instance.indices().len(), 3);
        assert_eq!(instance.relations()[0].tuples(), &[vec![0, 0], vec![1, 0]]);

        let oracle = query_oracle(&instance).unwrap();
        let (tuples, _) = tetris(&oracle, EngineMode::Reloaded, &Sao::identity(3)).unwrap();
        let values: Vec<Vec<u64>> = tuples.iter().map(|t| t.values().unwrap()).collect();
        assert_eq!(values, nested_loop_join(&instance).unwrap());
        let decoded: Vec<Vec<String>> =
            tuples.iter().map(|t| instance.decode_tuple(t)).collect();
        assert_eq!(decoded[0], vec!["banana", "apple", "blue"]);
        assert_eq!(decoded.len(), 4);

        // Loading reports missing attributes and bad headers.
        let bad = QuerySpec {
            attributes: names(&["A"]),
            relations: vec![RelationSpec {
                name: "R".into(),
                attrs: names(&["A", "B"]),
                file: "r.csv".into(),
                indices: vec![],
            }],
        };
        assert!(load_query_spec(&bad, dir.path()).is_err());
    }

    #[test]
    fn code_width_is_the_padded_bit_count() {
        assert_eq!(code_width(0), 1);
        assert_eq!(code_width(1), 1);
        assert_eq!(code_width(2), 1);
        assert_eq!(code_width(3), 2);
        assert_eq!(code_width(4), 2);
        assert_eq!(code_width(5), 3);
        assert_eq!(code_width(1 << 10), 10);
    }
}
