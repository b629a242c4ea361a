//! The knowledge base: a multilevel dyadic tree over boxes.
//!
//! One binary trie per attribute level, in search-attribute order; a node of
//! the level-`i` trie that ends a stored box's component carries a pointer to
//! a level-`i+1` trie (or a stored mark at the last level). A box containing
//! a query box corresponds to a chain of marked prefixes, one per level, so
//! superbox lookup walks prefix paths instead of scanning.
//!
//! Inserts never prune subsumed boxes: the resolution-count accounting of the
//! engine relies on every cached box staying put.

use std::cell::Cell;

use crate::dyadic::{DyadicBox, DyadicInterval};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    kids: [u32; 2],
    /// Levels before the last: root of the next-level trie, if this node
    /// ends a stored component. Unused at the last level.
    down: u32,
    /// Last level only: a box ends here.
    stored: bool,
}

impl Node {
    fn new() -> Self {
        Node { kids: [NONE; 2], down: NONE, stored: false }
    }
}

/// A set of same-shape dyadic boxes with prefix-chain lookups.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    d: u8,
    n: usize,
    nodes: Vec<Node>,
    len: usize,
    visited: Cell<u64>,
}

impl KnowledgeBase {
    #[must_use]
    pub fn new(d: u8, n: usize) -> Self {
        debug_assert!(d >= 1 && n >= 1);
        Self { d, n, nodes: vec![Node::new()], len: 0, visited: Cell::new(0) }
    }

    /// Builds a knowledge base from a box iterator (duplicates collapse).
    #[must_use]
    pub fn with_boxes<I: IntoIterator<Item = DyadicBox>>(d: u8, n: usize, boxes: I) -> Self {
        let mut kb = Self::new(d, n);
        for b in boxes {
            kb.insert(&b);
        }
        kb
    }

    #[must_use]
    pub fn d(&self) -> u8 {
        self.d
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored boxes.
    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Trie nodes touched by lookups so far (cost measurement, not part of
    /// any algorithmic contract).
    #[must_use]
    pub fn visited_nodes(&self) -> u64 {
        self.visited.get()
    }

    fn child_or_create(&mut self, node: u32, bit: u8) -> u32 {
        let existing = self.nodes[node as usize].kids[bit as usize];
        if existing != NONE {
            return existing;
        }
        let idx = self.nodes.len() as u32;
        self.nodes.push(Node::new());
        self.nodes[node as usize].kids[bit as usize] = idx;
        idx
    }

    /// Walks `iv`'s bits from `node`, creating nodes as needed.
    fn walk_create(&mut self, mut node: u32, iv: DyadicInterval) -> u32 {
        for k in (0..iv.len()).rev() {
            node = self.child_or_create(node, ((iv.bits() >> k) & 1) as u8);
        }
        node
    }

    /// Walks `iv`'s bits from `node`; `None` if the path does not exist.
    fn walk(&self, mut node: u32, iv: DyadicInterval) -> Option<u32> {
        for k in (0..iv.len()).rev() {
            let next = self.nodes[node as usize].kids[((iv.bits() >> k) & 1) as usize];
            if next == NONE {
                return None;
            }
            node = next;
        }
        Some(node)
    }

    /// Stores `b`. Returns false (and leaves the base unchanged) on an exact
    /// duplicate. Subsumed boxes are kept.
    pub fn insert(&mut self, b: &DyadicBox) -> bool {
        debug_assert!(b.d() == self.d && b.n() == self.n);
        let mut node = 0u32;
        for level in 0..self.n {
            node = self.walk_create(node, b.comp(level));
            if level + 1 < self.n {
                if self.nodes[node as usize].down == NONE {
                    let idx = self.nodes.len() as u32;
                    self.nodes.push(Node::new());
                    self.nodes[node as usize].down = idx;
                }
                node = self.nodes[node as usize].down;
            }
        }
        if self.nodes[node as usize].stored {
            return false;
        }
        self.nodes[node as usize].stored = true;
        self.len += 1;
        true
    }

    /// True iff exactly `b` is stored.
    #[must_use]
    pub fn contains_exact(&self, b: &DyadicBox) -> bool {
        debug_assert!(b.d() == self.d && b.n() == self.n);
        let mut node = 0u32;
        for level in 0..self.n {
            match self.walk(node, b.comp(level)) {
                Some(end) => {
                    if level + 1 < self.n {
                        if self.nodes[end as usize].down == NONE {
                            return false;
                        }
                        node = self.nodes[end as usize].down;
                    } else {
                        return self.nodes[end as usize].stored;
                    }
                }
                None => return false,
            }
        }
        unreachable!("n >= 1")
    }

    /// Removes exactly `b`; false if it was not stored.
    pub fn remove(&mut self, b: &DyadicBox) -> bool {
        debug_assert!(b.d() == self.d && b.n() == self.n);
        let mut node = 0u32;
        for level in 0..self.n {
            let Some(end) = self.walk(node, b.comp(level)) else { return false };
            if level + 1 < self.n {
                if self.nodes[end as usize].down == NONE {
                    return false;
                }
                node = self.nodes[end as usize].down;
            } else {
                node = end;
            }
        }
        if !self.nodes[node as usize].stored {
            return false;
        }
        self.nodes[node as usize].stored = false;
        self.len -= 1;
        true
    }

    fn marked(&self, node: u32, level: usize) -> bool {
        if level + 1 < self.n {
            self.nodes[node as usize].down != NONE
        } else {
            self.nodes[node as usize].stored
        }
    }

    /// Some stored box containing `b`, or none. Deterministic choice: among
    /// all containing boxes, the one with minimal total component length,
    /// ties broken by component-string order (most general first).
    #[must_use]
    pub fn find_superbox(&self, b: &DyadicBox) -> Option<DyadicBox> {
        debug_assert!(b.d() == self.d && b.n() == self.n);
        let mut best: Option<(u32, Vec<DyadicInterval>)> = None;
        let mut partial = Vec::with_capacity(self.n);
        self.search(0, 0, b, 0, &mut partial, &mut best);
        best.map(|(_, comps)| DyadicBox::new(self.d, comps))
    }

    /// Walks the marked prefixes of `query.comp(level)` in increasing length
    /// (equivalently, in string order), recursing per candidate. The first
    /// completed chain at a given total length is the string-wise smallest,
    /// so a strict improvement test implements the tie-break.
    fn search(
        &self,
        trie_root: u32,
        level: usize,
        query: &DyadicBox,
        used: u32,
        partial: &mut Vec<DyadicInterval>,
        best: &mut Option<(u32, Vec<DyadicInterval>)>,
    ) {
        let q = query.comp(level);
        let mut node = trie_root;
        let mut len = 0u8;
        loop {
            self.visited.set(self.visited.get() + 1);
            let total = used + u32::from(len);
            if best.as_ref().is_some_and(|(b, _)| total >= *b) {
                // Walking further or descending only adds length.
                return;
            }
            if self.marked(node, level) {
                partial.push(q.prefix(len));
                if level + 1 < self.n {
                    self.search(self.nodes[node as usize].down, level + 1, query, total, partial, best);
                } else {
                    *best = Some((total, partial.clone()));
                }
                partial.pop();
            }
            if len == q.len() {
                return;
            }
            let bit = (q.bits() >> (q.len() - len - 1)) & 1;
            let next = self.nodes[node as usize].kids[bit as usize];
            if next == NONE {
                return;
            }
            node = next;
            len += 1;
        }
    }

    /// Every stored box containing `t` (a unit box), in string order.
    #[must_use]
    pub fn all_containing(&self, t: &DyadicBox) -> Vec<DyadicBox> {
        debug_assert!(t.d() == self.d && t.n() == self.n);
        debug_assert!(t.is_unit());
        let mut out = Vec::new();
        let mut partial = Vec::with_capacity(self.n);
        self.collect_containing(0, 0, t, &mut partial, &mut out);
        out
    }

    fn collect_containing(
        &self,
        trie_root: u32,
        level: usize,
        t: &DyadicBox,
        partial: &mut Vec<DyadicInterval>,
        out: &mut Vec<DyadicBox>,
    ) {
        let q = t.comp(level);
        let mut node = trie_root;
        let mut len = 0u8;
        loop {
            self.visited.set(self.visited.get() + 1);
            if self.marked(node, level) {
                partial.push(q.prefix(len));
                if level + 1 < self.n {
                    self.collect_containing(self.nodes[node as usize].down, level + 1, t, partial, out);
                } else {
                    out.push(DyadicBox::new(self.d, partial.clone()));
                }
                partial.pop();
            }
            if len == q.len() {
                return;
            }
            let bit = (q.bits() >> (q.len() - len - 1)) & 1;
            let next = self.nodes[node as usize].kids[bit as usize];
            if next == NONE {
                return;
            }
            node = next;
            len += 1;
        }
    }

    /// All stored boxes, in string order (λ before 0-extensions before
    /// 1-extensions, per level).
    #[must_use]
    pub fn boxes(&self) -> Vec<DyadicBox> {
        let mut out = Vec::with_capacity(self.len);
        let mut partial = Vec::with_capacity(self.n);
        self.collect_all(0, 0, DyadicInterval::LAMBDA, &mut partial, &mut out);
        out
    }

    fn collect_all(
        &self,
        node: u32,
        level: usize,
        iv: DyadicInterval,
        partial: &mut Vec<DyadicInterval>,
        out: &mut Vec<DyadicBox>,
    ) {
        if self.marked(node, level) {
            partial.push(iv);
            if level + 1 < self.n {
                self.collect_all(self.nodes[node as usize].down, level + 1, DyadicInterval::LAMBDA, partial, out);
            } else {
                out.push(DyadicBox::new(self.d, partial.clone()));
            }
            partial.pop();
        }
        if iv.len() < self.d {
            for bit in 0..2u8 {
                let next = self.nodes[node as usize].kids[bit as usize];
                if next != NONE {
                    self.collect_all(next, level, iv.child(bit), partial, out);
                }
            }
        }
    }
}
