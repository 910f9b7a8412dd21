//! Per-slab enriched segment tree.
//!
//! The tree is rebuilt from scratch for every slab over the elementary
//! y-intervals of the rectangles in play there. Instead of supporting
//! dynamic updates, every insertion and deletion of a vertical edge within
//! the slab is simulated ahead of time: each node stores
//!
//! * `high[i]` / `low[i]`: the highest owner in the node's subscene and
//!   the lowest *visible* owner of the subscene, after the first `i`
//!   updates that touch the node's subtree (`x_hl` holds those update
//!   stations);
//! * `top_v[j]`: the highest vertical edge associated at the node after
//!   the first `j` updates associated exactly here (`x_top` holds those
//!   stations);
//! * two cursors, `p` into `high`/`low` and `p_top` into `top_v`, bumped
//!   by the sweep instead of performing a real update.
//!
//! The recurrences: at a leaf, high = low = max_z(spanning cover, top_v);
//! at an internal node high = max_z(lson.high, rson.high, top_v) and
//! low = max_z(min_z(lson.low, rson.low), top_v). high is the highest
//! owner anywhere in the node's subscene; low is the lowest owner that is
//! pointwise on top somewhere in it, so `z < low` means hidden throughout
//! the node's range.
//!
//! Two spanning-rectangle fields are kept per node. `h_sub` aggregates the
//! highest spanning rectangle covering *any* leaf below the node (leaf
//! value from the linear-time span fill, internal = max of children).
//! `h_span` is the highest spanning rectangle covering the node's *whole*
//! range; the right-edge sweep needs this one when it tracks the second
//! highest rectangle along a root-to-node path. The two coincide at
//! leaves.

use crate::scene::{Coord, RectId, Scene};
use crate::slab::{EdgeKind, Event};

pub const NO_NODE: u32 = u32::MAX;

/// A y-interval with a height, in elementary-interval index space:
/// covers slots lo..hi.
#[derive(Clone, Copy, Debug)]
pub struct SpanSeg {
    pub lo: usize,
    pub hi: usize,
    pub z: Coord,
    pub id: RectId,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpanError {
    #[error("segments not in strictly decreasing z order at position {0}")]
    NotSortedByZ(usize),
    #[error("segment {0} out of slot range")]
    OutOfRange(usize),
}

/// For `slots` unit intervals and segments given in strictly decreasing z
/// order, returns per interval the first (highest) segment covering it,
/// or background. Runs in near-linear time: a skip-pointer array with path
/// halving jumps over already-claimed slots, so each slot is written once.
/// `ops` counts pointer hops for scaling checks.
pub fn topmost_span_array(
    segs: &[SpanSeg],
    slots: usize,
    ops: &mut u64,
) -> Result<Vec<RectId>, SpanError> {
    let mut owner = vec![RectId::BACKGROUND; slots];
    // next[i] = smallest unclaimed slot >= i (path-halved).
    let mut next: Vec<u32> = (0..=slots as u32).collect();

    let find = |next: &mut [u32], mut i: usize, ops: &mut u64| -> usize {
        *ops += 1;
        while next[i] != i as u32 {
            let step = next[i] as usize;
            next[i] = next[step];
            i = next[i] as usize;
            *ops += 1;
        }
        i
    };

    let mut prev_z = None;
    for (k, seg) in segs.iter().enumerate() {
        if let Some(pz) = prev_z {
            if seg.z >= pz {
                return Err(SpanError::NotSortedByZ(k));
            }
        }
        prev_z = Some(seg.z);
        if seg.lo > seg.hi || seg.hi > slots {
            return Err(SpanError::OutOfRange(k));
        }
        let mut i = find(&mut next, seg.lo, ops);
        while i < seg.hi {
            owner[i] = seg.id;
            next[i] = i as u32 + 1;
            i = find(&mut next, i + 1, ops);
        }
    }
    Ok(owner)
}

#[derive(Clone, Debug)]
struct Node {
    y1: Coord,
    y2: Coord,
    /// Upper bound of the left child's range; meaningless for leaves.
    ymid: Coord,
    lson: u32,
    rson: u32,
    parent: u32,
    h_sub: RectId,
    h_span: RectId,
    top_v: Vec<RectId>,
    x_top: Vec<Coord>,
    high: Vec<RectId>,
    low: Vec<RectId>,
    x_hl: Vec<Coord>,
    p: u32,
    p_top: u32,
}

impl Node {
    fn new(y1: Coord, y2: Coord) -> Node {
        Node {
            y1,
            y2,
            ymid: y1,
            lson: NO_NODE,
            rson: NO_NODE,
            parent: NO_NODE,
            h_sub: RectId::BACKGROUND,
            h_span: RectId::BACKGROUND,
            top_v: Vec::new(),
            x_top: Vec::new(),
            high: Vec::new(),
            low: Vec::new(),
            x_hl: Vec::new(),
            p: 0,
            p_top: 0,
        }
    }
}

/// Snapshot of a node's state at its current cursors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeState {
    pub high: RectId,
    pub low: RectId,
    pub top_v: RectId,
}

pub struct SlabTree {
    nodes: Vec<Node>,
    universe: Vec<Coord>,
    /// Elementary interval index -> leaf node index.
    leaf_of: Vec<u32>,
    pub cursor_advances: u64,
    pub fill_ops: u64,
}

impl SlabTree {
    /// Balanced skeleton over the elementary intervals of `universe`
    /// (sorted distinct y values). A universe of m values yields m-1
    /// leaves and exactly 2(m-1)-1 nodes.
    pub fn build(universe: Vec<Coord>) -> SlabTree {
        debug_assert!(universe.windows(2).all(|w| w[0] < w[1]));
        let intervals = universe.len().saturating_sub(1).max(1);
        let mut nodes = Vec::with_capacity(2 * intervals - 1);
        let mut leaf_of = vec![NO_NODE; intervals];
        if universe.len() < 2 {
            // Degenerate: single leaf with an empty range.
            let v = universe.first().copied().unwrap_or(0);
            nodes.push(Node::new(v, v));
            leaf_of[0] = 0;
            return SlabTree {
                nodes,
                universe,
                leaf_of,
                cursor_advances: 0,
                fill_ops: 0,
            };
        }

        fn rec(
            nodes: &mut Vec<Node>,
            leaf_of: &mut [u32],
            universe: &[Coord],
            lo: usize,
            hi: usize,
        ) -> u32 {
            let idx = nodes.len() as u32;
            nodes.push(Node::new(universe[lo], universe[hi]));
            if hi - lo == 1 {
                leaf_of[lo] = idx;
            } else {
                let mid = (lo + hi) / 2;
                let l = rec(nodes, leaf_of, universe, lo, mid);
                let r = rec(nodes, leaf_of, universe, mid, hi);
                let n = &mut nodes[idx as usize];
                n.lson = l;
                n.rson = r;
                n.ymid = universe[mid];
                nodes[l as usize].parent = idx;
                nodes[r as usize].parent = idx;
            }
            idx
        }
        rec(&mut nodes, &mut leaf_of, &universe, 0, universe.len() - 1);
        SlabTree {
            nodes,
            universe,
            leaf_of,
            cursor_advances: 0,
            fill_ops: 0,
        }
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn universe(&self) -> &[Coord] {
        &self.universe
    }

    pub fn is_leaf(&self, u: u32) -> bool {
        self.nodes[u as usize].lson == NO_NODE
    }

    pub fn lson(&self, u: u32) -> u32 {
        self.nodes[u as usize].lson
    }

    pub fn rson(&self, u: u32) -> u32 {
        self.nodes[u as usize].rson
    }

    pub fn range(&self, u: u32) -> (Coord, Coord) {
        let n = &self.nodes[u as usize];
        (n.y1, n.y2)
    }

    pub fn ymid(&self, u: u32) -> Coord {
        self.nodes[u as usize].ymid
    }

    pub fn leaf_node(&self, interval: usize) -> u32 {
        self.leaf_of[interval]
    }

    pub fn covers(&self, u: u32, y1: Coord, y2: Coord) -> bool {
        let n = &self.nodes[u as usize];
        y1 <= n.y1 && n.y2 <= y2
    }

    pub fn h_sub(&self, u: u32) -> RectId {
        self.nodes[u as usize].h_sub
    }

    pub fn h_span(&self, u: u32) -> RectId {
        self.nodes[u as usize].h_span
    }

    /// The canonical nodes of [y1, y2]: maximal nodes whose range the
    /// interval covers. Endpoints must be universe values.
    pub fn canonical_nodes(&self, y1: Coord, y2: Coord) -> Vec<u32> {
        let mut out = Vec::new();
        self.visit_canonical(self.root(), y1, y2, &mut |u| out.push(u));
        out
    }

    fn visit_canonical(&self, u: u32, y1: Coord, y2: Coord, visit: &mut impl FnMut(u32)) {
        let n = &self.nodes[u as usize];
        if y1 <= n.y1 && n.y2 <= y2 {
            visit(u);
            return;
        }
        debug_assert!(n.lson != NO_NODE, "descent reached a non-canonical leaf");
        if y1 < n.ymid {
            self.visit_canonical(n.lson, y1, y2, visit);
        }
        if y2 > n.ymid {
            self.visit_canonical(n.rson, y1, y2, visit);
        }
    }

    fn interval_of(&self, v: Coord) -> usize {
        self.universe
            .binary_search(&v)
            .expect("coordinate not in slab universe")
    }

    /// Fills the spanning-rectangle fields from the slab's spanning set.
    pub fn fill_spanning(&mut self, scene: &Scene, spanning: &[RectId]) {
        let slots = self.leaf_of.len();
        let mut by_z: Vec<RectId> = spanning.to_vec();
        by_z.sort_unstable_by_key(|&id| std::cmp::Reverse(scene.z_of(id)));
        let segs: Vec<SpanSeg> = by_z
            .iter()
            .map(|&id| {
                let r = scene.rect(id);
                SpanSeg {
                    lo: self.interval_of(r.y1),
                    hi: self.interval_of(r.y2),
                    z: r.z,
                    id,
                }
            })
            .collect();
        let mut ops = 0;
        let fill = topmost_span_array(&segs, slots, &mut ops).expect("sorted by construction");
        self.fill_ops += ops;

        for (i, &leaf) in self.leaf_of.iter().enumerate() {
            if leaf != NO_NODE {
                self.nodes[leaf as usize].h_sub = fill[i];
            }
        }
        // Children precede nothing in a preorder arena; walk backwards so
        // both children are final before their parent.
        for u in (0..self.nodes.len()).rev() {
            if self.nodes[u].lson != NO_NODE {
                let l = self.nodes[self.nodes[u].lson as usize].h_sub;
                let r = self.nodes[self.nodes[u].rson as usize].h_sub;
                self.nodes[u].h_sub = scene.max_z(l, r);
            }
        }

        // h_span: highest spanning rect associated at the node or any
        // ancestor, i.e. covering the node's whole range.
        for &id in spanning {
            let r = scene.rect(id);
            let mut targets = Vec::new();
            self.visit_canonical(self.root(), r.y1, r.y2, &mut |u| targets.push(u));
            for u in targets {
                let cur = self.nodes[u as usize].h_span;
                self.nodes[u as usize].h_span = scene.max_z(cur, id);
            }
        }
        for u in 0..self.nodes.len() {
            let parent = self.nodes[u].parent;
            if parent != NO_NODE {
                let up = self.nodes[parent as usize].h_span;
                self.nodes[u].h_span = scene.max_z(self.nodes[u].h_span, up);
            }
        }
        #[cfg(debug_assertions)]
        for (i, &leaf) in self.leaf_of.iter().enumerate() {
            debug_assert_eq!(
                self.nodes[leaf as usize].h_span, fill[i],
                "leaf cover disagrees between span fill and top-down pass"
            );
        }
    }

    /// Simulates the slab's updates and freezes the high/low/top arrays.
    /// `initial` lists rectangles alive at the slab's left boundary whose
    /// right edge falls inside the slab: they are present from window 0.
    pub fn precompute(&mut self, scene: &Scene, events: &[Event], initial: &[RectId]) {
        let count = self.nodes.len();
        let mut assoc: Vec<Vec<(RectId, bool)>> = vec![Vec::new(); count];
        let mut assoc_x: Vec<Vec<Coord>> = vec![Vec::new(); count];
        let mut initial_here: Vec<Vec<RectId>> = vec![Vec::new(); count];

        for &id in initial {
            let r = scene.rect(id);
            self.visit_canonical(self.root(), r.y1, r.y2, &mut |u| {
                initial_here[u as usize].push(id);
            });
        }
        for ev in events {
            let r = scene.rect(ev.rect);
            self.visit_canonical(self.root(), r.y1, r.y2, &mut |u| {
                assoc[u as usize].push((ev.rect, ev.kind == EdgeKind::Left));
                assoc_x[u as usize].push(ev.x);
            });
        }

        // Per-node top_v over association windows, via the span fill on
        // the window axis: a segment present in windows [open, close)
        // covers those slots; highest z wins per window.
        for u in 0..count {
            let m = assoc[u].len();
            let mut open: Vec<(RectId, usize)> = Vec::new();
            let mut segs: Vec<SpanSeg> = Vec::new();
            for &id in &initial_here[u] {
                open.push((id, 0));
            }
            for (j, &(id, is_insert)) in assoc[u].iter().enumerate() {
                if is_insert {
                    open.push((id, j + 1));
                } else {
                    let at = open
                        .iter()
                        .position(|&(o, _)| o == id)
                        .expect("delete without matching insert at node");
                    let (_, from) = open.swap_remove(at);
                    segs.push(SpanSeg {
                        lo: from,
                        hi: j + 1,
                        z: scene.z_of(id),
                        id,
                    });
                }
            }
            for (id, from) in open {
                segs.push(SpanSeg {
                    lo: from,
                    hi: m + 1,
                    z: scene.z_of(id),
                    id,
                });
            }
            segs.sort_unstable_by_key(|s| std::cmp::Reverse(s.z));
            let mut ops = 0;
            let top = topmost_span_array(&segs, m + 1, &mut ops).expect("sorted");
            self.fill_ops += ops;
            self.nodes[u].top_v = top;
            self.nodes[u].x_top = std::mem::take(&mut assoc_x[u]);
        }

        // Replay the events to freeze high/low. cur_* carries the live
        // value between events; ptop mirrors the sweep's assoc cursor.
        let mut cur_h = vec![RectId::BACKGROUND; count];
        let mut cur_l = vec![RectId::BACKGROUND; count];
        let ptop = vec![0usize; count];
        for u in (0..count).rev() {
            let tv = self.nodes[u].top_v[0];
            let (h, l) = if self.nodes[u].lson == NO_NODE {
                let m = scene.max_z(self.nodes[u].h_sub, tv);
                (m, m)
            } else {
                let lh = cur_h[self.nodes[u].lson as usize];
                let rh = cur_h[self.nodes[u].rson as usize];
                let ll = cur_l[self.nodes[u].lson as usize];
                let rl = cur_l[self.nodes[u].rson as usize];
                (
                    scene.max_z(scene.max_z(lh, rh), tv),
                    scene.max_z(scene.min_z(ll, rl), tv),
                )
            };
            cur_h[u] = h;
            cur_l[u] = l;
            let n = &mut self.nodes[u];
            n.high.push(h);
            n.low.push(l);
        }

        struct Replay<'a> {
            tree: &'a mut SlabTree,
            cur_h: Vec<RectId>,
            cur_l: Vec<RectId>,
            ptop: Vec<usize>,
        }
        impl Replay<'_> {
            fn go(&mut self, scene: &Scene, u: u32, y1: Coord, y2: Coord, x: Coord) {
                let (ny1, ny2, ymid, lson, rson) = {
                    let n = &self.tree.nodes[u as usize];
                    (n.y1, n.y2, n.ymid, n.lson, n.rson)
                };
                if y1 <= ny1 && ny2 <= y2 {
                    self.ptop[u as usize] += 1;
                } else {
                    debug_assert!(lson != NO_NODE);
                    if y1 < ymid {
                        self.go(scene, lson, y1, y2, x);
                    }
                    if y2 > ymid {
                        self.go(scene, rson, y1, y2, x);
                    }
                }
                let tv = self.tree.nodes[u as usize].top_v[self.ptop[u as usize]];
                let (h, l) = if lson == NO_NODE {
                    let m = scene.max_z(self.tree.nodes[u as usize].h_sub, tv);
                    (m, m)
                } else {
                    let lh = self.cur_h[lson as usize];
                    let rh = self.cur_h[rson as usize];
                    let ll = self.cur_l[lson as usize];
                    let rl = self.cur_l[rson as usize];
                    (
                        scene.max_z(scene.max_z(lh, rh), tv),
                        scene.max_z(scene.min_z(ll, rl), tv),
                    )
                };
                self.cur_h[u as usize] = h;
                self.cur_l[u as usize] = l;
                let n = &mut self.tree.nodes[u as usize];
                n.high.push(h);
                n.low.push(l);
                n.x_hl.push(x);
            }
        }

        let mut replay = Replay {
            tree: self,
            cur_h,
            cur_l,
            ptop,
        };
        for ev in events {
            let r = scene.rect(ev.rect);
            let root = replay.tree.root();
            replay.go(scene, root, r.y1, r.y2, ev.x);
        }
    }

    /// One simulated update at this node: bump the high/low cursor.
    pub fn advance(&mut self, u: u32) {
        let n = &mut self.nodes[u as usize];
        assert!(
            (n.p as usize) + 1 < n.high.len(),
            "cursor overrun at node {u}: event stream disagrees with precompute"
        );
        n.p += 1;
        self.cursor_advances += 1;
    }

    /// Bump the association cursor (the update is associated exactly here).
    pub fn advance_assoc(&mut self, u: u32) {
        let n = &mut self.nodes[u as usize];
        assert!(
            (n.p_top as usize) + 1 < n.top_v.len(),
            "association cursor overrun at node {u}"
        );
        n.p_top += 1;
        self.cursor_advances += 1;
    }

    pub fn current(&self, u: u32) -> NodeState {
        let n = &self.nodes[u as usize];
        NodeState {
            high: n.high[n.p as usize],
            low: n.low[n.p as usize],
            top_v: n.top_v[n.p_top as usize],
        }
    }

    pub fn cursor(&self, u: u32) -> (u32, u32) {
        let n = &self.nodes[u as usize];
        (n.p, n.p_top)
    }

    /// True once every cursor has consumed exactly its precomputed updates.
    pub fn cursors_exhausted(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| n.p as usize + 1 == n.high.len() && n.p_top as usize + 1 == n.top_v.len())
    }

    /// Total entries across all per-node arrays, the slab's share of the
    /// space bound.
    pub fn entry_total(&self) -> u64 {
        self.nodes
            .iter()
            .map(|n| {
                (n.top_v.len() + n.x_top.len() + n.high.len() + n.low.len() + n.x_hl.len()) as u64
            })
            .sum()
    }
}

/// Definitional per-node evaluation used by tests and debug checks:
/// given the vertical edges currently present (clipped to the slab) and
/// the slab's spanning set, recompute (high, low, top_v) for every node
/// from the recurrences, with associations found by fresh descent.
pub fn naive_states(
    tree: &SlabTree,
    scene: &Scene,
    present_verticals: &[RectId],
    spanning: &[RectId],
) -> Vec<NodeState> {
    let count = tree.node_count();
    let mut tv = vec![RectId::BACKGROUND; count];
    for &id in present_verticals {
        let r = scene.rect(id);
        for u in tree.canonical_nodes(r.y1, r.y2) {
            tv[u as usize] = scene.max_z(tv[u as usize], id);
        }
    }
    let mut out = vec![
        NodeState {
            high: RectId::BACKGROUND,
            low: RectId::BACKGROUND,
            top_v: RectId::BACKGROUND
        };
        count
    ];
    for u in (0..count as u32).rev() {
        let (y1, y2) = tree.range(u);
        let (h, l) = if tree.is_leaf(u) {
            let mut cover = RectId::BACKGROUND;
            for &s in spanning {
                let r = scene.rect(s);
                if r.y1 <= y1 && y2 <= r.y2 {
                    cover = scene.max_z(cover, s);
                }
            }
            let m = scene.max_z(cover, tv[u as usize]);
            (m, m)
        } else {
            let lh = out[tree.lson(u) as usize].high;
            let rh = out[tree.rson(u) as usize].high;
            let ll = out[tree.lson(u) as usize].low;
            let rl = out[tree.rson(u) as usize].low;
            (
                scene.max_z(scene.max_z(lh, rh), tv[u as usize]),
                scene.max_z(scene.min_z(ll, rl), tv[u as usize]),
            )
        };
        out[u as usize] = NodeState {
            high: h,
            low: l,
            top_v: tv[u as usize],
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{canonicalize, SceneRecord};
    use crate::slab::{plan_slabs, EdgeKind, Event};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rec(label: i64, x1: f64, x2: f64, y1: f64, y2: f64, z: f64) -> SceneRecord {
        SceneRecord {
            label,
            x1,
            x2,
            y1,
            y2,
            z,
        }
    }

    fn seg(lo: usize, hi: usize, z: Coord, id: u32) -> SpanSeg {
        SpanSeg {
            lo,
            hi,
            z,
            id: RectId(id),
        }
    }

    fn quadratic_scan(segs: &[SpanSeg], slots: usize) -> Vec<RectId> {
        (0..slots)
            .map(|i| {
                let mut best = RectId::BACKGROUND;
                let mut best_z = Coord::MIN;
                for s in segs {
                    if s.lo <= i && i < s.hi && s.z > best_z {
                        best_z = s.z;
                        best = s.id;
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn single_span_fills_its_interval() {
        let mut ops = 0;
        let a = topmost_span_array(&[seg(0, 1, 5, 7)], 2, &mut ops).unwrap();
        assert_eq!(a, vec![RectId(7), RectId::BACKGROUND]);
    }

    #[test]
    fn empty_input_is_all_background() {
        let mut ops = 0;
        let a = topmost_span_array(&[], 4, &mut ops).unwrap();
        assert!(a.iter().all(|o| o.is_background()));
    }

    #[test]
    fn worked_three_segment_example() {
        let s1 = seg(0, 5, 9, 1);
        let s2 = seg(2, 4, 7, 2);
        let s3 = seg(0, 2, 5, 3);
        let mut ops = 0;
        let a = topmost_span_array(&[s1, s2, s3], 6, &mut ops).unwrap();
        let r = |i| RectId(i);
        assert_eq!(a, vec![r(1), r(1), r(1), r(1), r(1), RectId::BACKGROUND]);
        // Without the highest segment the lower ones surface.
        let a = topmost_span_array(&[s2, s3], 6, &mut ops).unwrap();
        assert_eq!(
            a,
            vec![
                r(3),
                r(3),
                r(2),
                r(2),
                RectId::BACKGROUND,
                RectId::BACKGROUND
            ]
        );
    }

    #[test]
    fn unsorted_input_is_rejected() {
        let mut ops = 0;
        let err = topmost_span_array(&[seg(0, 1, 3, 0), seg(1, 2, 9, 1)], 4, &mut ops);
        assert_eq!(err.unwrap_err(), SpanError::NotSortedByZ(1));
    }

    #[test]
    fn matches_quadratic_scan_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let q = rng.gen_range(1..=10usize);
            let slots = 2 * q;
            let mut zs: Vec<Coord> = (0..q as Coord).collect();
            for i in (1..zs.len()).rev() {
                zs.swap(i, rng.gen_range(0..=i));
            }
            let mut segs: Vec<SpanSeg> = (0..q)
                .map(|k| {
                    let a = rng.gen_range(0..slots);
                    let b = rng.gen_range(0..slots);
                    seg(a.min(b), a.max(b) + 1, zs[k], k as u32)
                })
                .collect();
            segs.sort_unstable_by_key(|s| std::cmp::Reverse(s.z));
            let mut ops = 0;
            let got = topmost_span_array(&segs, slots, &mut ops).unwrap();
            assert_eq!(got, quadratic_scan(&segs, slots));
        }
    }

    #[test]
    fn two_intervals_make_three_nodes() {
        let tree = SlabTree::build(vec![0, 2, 4]);
        assert_eq!(tree.node_count(), 3);
        assert_eq!(tree.leaf_count(), 2);
        assert_eq!(tree.range(tree.root()), (0, 4));
    }

    #[test]
    fn full_cover_stops_at_root() {
        let universe: Vec<Coord> = (0..9).map(|i| 2 * i).collect();
        let tree = SlabTree::build(universe);
        assert_eq!(tree.canonical_nodes(0, 16), vec![tree.root()]);
    }

    #[test]
    fn canonical_set_matches_definition_over_16_leaves() {
        let universe: Vec<Coord> = (0..17).map(|i| 2 * i).collect();
        let tree = SlabTree::build(universe.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = rng.gen_range(0..16usize);
            let b = rng.gen_range(0..16usize);
            let (lo, hi) = (universe[a.min(b)], universe[a.max(b) + 1]);
            let got = tree.canonical_nodes(lo, hi);
            // Definition: covered by the edge, parent not covered.
            for u in 0..tree.node_count() as u32 {
                let (y1, y2) = tree.range(u);
                let covered = lo <= y1 && y2 <= hi;
                let parent_covered = {
                    let mut p = None;
                    for v in 0..tree.node_count() as u32 {
                        if tree.lson(v) == u || tree.rson(v) == u {
                            p = Some(v);
                        }
                    }
                    p.map(|v| {
                        let (py1, py2) = tree.range(v);
                        lo <= py1 && py2 <= hi
                    })
                    .unwrap_or(false)
                };
                let expected = covered && !parent_covered;
                assert_eq!(
                    got.contains(&u),
                    expected,
                    "node {u} range {:?}",
                    tree.range(u)
                );
            }
            let log = (16f64).log2().ceil() as usize;
            assert!(
                got.len() <= 2 * log,
                "canonical set too large: {}",
                got.len()
            );
        }
    }

    fn scene_and_slab(recs: &[SceneRecord]) -> (crate::scene::Scene, Vec<Event>) {
        let scene = canonicalize(recs).unwrap();
        let plan = plan_slabs(&scene, Some(usize::MAX / 2));
        assert_eq!(plan.slab_count(), 1);
        (scene.clone(), plan.slabs[0].clone())
    }

    fn universe_of(scene: &crate::scene::Scene) -> Vec<Coord> {
        scene.ys().to_vec()
    }

    #[test]
    fn no_spanning_means_background_everywhere() {
        let (scene, _) = scene_and_slab(&[rec(0, 0.0, 1.0, 0.0, 1.0, 0.0)]);
        let mut tree = SlabTree::build(universe_of(&scene));
        tree.fill_spanning(&scene, &[]);
        for u in 0..tree.node_count() as u32 {
            assert!(tree.h_sub(u).is_background());
            assert!(tree.h_span(u).is_background());
        }
    }

    #[test]
    fn one_spanning_segment_covers_its_leaves() {
        // Ten disjoint small rects give a 20-value universe; rect 10 spans
        // y of rects 3..=7.
        let mut recs: Vec<SceneRecord> = (0..10)
            .map(|i| {
                rec(
                    i,
                    i as f64,
                    i as f64 + 0.5,
                    10.0 * i as f64,
                    10.0 * i as f64 + 5.0,
                    i as f64,
                )
            })
            .collect();
        recs.push(rec(10, -5.0, 100.0, 29.0, 76.0, 55.0));
        let scene = canonicalize(&recs).unwrap();
        let mut tree = SlabTree::build(universe_of(&scene));
        let spanning = vec![RectId(10)];
        tree.fill_spanning(&scene, &spanning);
        let r = scene.rect(RectId(10));
        for i in 0..tree.leaf_count() {
            let leaf = tree.leaf_node(i);
            let (y1, y2) = tree.range(leaf);
            let inside = r.y1 <= y1 && y2 <= r.y2;
            assert_eq!(!tree.h_sub(leaf).is_background(), inside);
        }
        // Internal nodes aggregate their children.
        for u in 0..tree.node_count() as u32 {
            if !tree.is_leaf(u) {
                let expect = scene.max_z(tree.h_sub(tree.lson(u)), tree.h_sub(tree.rson(u)));
                assert_eq!(tree.h_sub(u), expect);
            }
        }
    }

    #[test]
    fn nested_spanning_higher_inside_lower() {
        let mut recs: Vec<SceneRecord> = (0..6)
            .map(|i| {
                rec(
                    i,
                    i as f64,
                    i as f64 + 0.4,
                    10.0 * i as f64,
                    10.0 * i as f64 + 4.0,
                    i as f64,
                )
            })
            .collect();
        recs.push(rec(6, -10.0, 90.0, 1.0, 52.0, 20.0)); // outer, lower
        recs.push(rec(7, -9.0, 91.0, 12.0, 43.0, 30.0)); // inner, higher
        let scene = canonicalize(&recs).unwrap();
        let mut tree = SlabTree::build(universe_of(&scene));
        tree.fill_spanning(&scene, &[RectId(6), RectId(7)]);
        let inner = scene.rect(RectId(7));
        let outer = scene.rect(RectId(6));
        for i in 0..tree.leaf_count() {
            let leaf = tree.leaf_node(i);
            let (y1, y2) = tree.range(leaf);
            let expect = if inner.y1 <= y1 && y2 <= inner.y2 {
                RectId(7)
            } else if outer.y1 <= y1 && y2 <= outer.y2 {
                RectId(6)
            } else {
                RectId::BACKGROUND
            };
            assert_eq!(tree.h_sub(leaf), expect);
        }
    }

    #[test]
    fn single_left_event_covering_root() {
        let (scene, events) = scene_and_slab(&[rec(0, 0.0, 1.0, 0.0, 1.0, 0.0)]);
        let mut tree = SlabTree::build(universe_of(&scene));
        tree.fill_spanning(&scene, &[]);
        let left: Vec<Event> = events
            .iter()
            .copied()
            .filter(|e| e.kind == EdgeKind::Left)
            .collect();
        tree.precompute(&scene, &left, &[]);
        let root = tree.root();
        let n = &tree.nodes[root as usize];
        assert_eq!(n.top_v, vec![RectId::BACKGROUND, RectId(0)]);
        assert_eq!(n.x_top, vec![scene.rect(RectId(0)).x1]);
        assert_eq!(n.high, vec![RectId::BACKGROUND, RectId(0)]);
        assert_eq!(n.low, vec![RectId::BACKGROUND, RectId(0)]);
    }

    #[test]
    fn insert_then_delete_restores_background() {
        let (scene, events) = scene_and_slab(&[rec(0, 0.0, 1.0, 0.0, 1.0, 0.0)]);
        let mut tree = SlabTree::build(universe_of(&scene));
        tree.fill_spanning(&scene, &[]);
        tree.precompute(&scene, &events, &[]);
        let n = &tree.nodes[tree.root() as usize];
        assert_eq!(
            n.top_v,
            vec![RectId::BACKGROUND, RectId(0), RectId::BACKGROUND]
        );
    }

    #[test]
    fn leaf_under_spanning_reports_it_in_high_and_low() {
        let mut recs: Vec<SceneRecord> = (0..4)
            .map(|i| {
                rec(
                    i,
                    i as f64,
                    i as f64 + 0.4,
                    10.0 * i as f64,
                    10.0 * i as f64 + 4.0,
                    i as f64,
                )
            })
            .collect();
        recs.push(rec(4, -10.0, 90.0, -5.0, 95.0, 10.0)); // spans everything
        let scene = canonicalize(&recs).unwrap();
        let mut tree = SlabTree::build(universe_of(&scene));
        tree.fill_spanning(&scene, &[RectId(4)]);
        tree.precompute(&scene, &[], &[]);
        for i in 0..tree.leaf_count() {
            let leaf = tree.leaf_node(i);
            let s = tree.current(leaf);
            assert_eq!(s.high, RectId(4));
            assert_eq!(s.low, RectId(4));
            assert!(s.top_v.is_background());
        }
    }

    /// Replays random single-slab scenes event by event and checks every
    /// node's frozen arrays against the definitional recomputation.
    #[test]
    fn replay_matches_naive_simulator() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for round in 0..60 {
            let n = rng.gen_range(1..=12usize);
            let recs: Vec<SceneRecord> = (0..n)
                .map(|i| {
                    let x1 = rng.gen_range(0.0..100.0);
                    let y1 = rng.gen_range(0.0..100.0);
                    rec(
                        i as i64,
                        x1,
                        x1 + rng.gen_range(0.5..60.0),
                        y1,
                        y1 + rng.gen_range(0.5..60.0),
                        rng.gen_range(0.0..100.0),
                    )
                })
                .collect();
            let scene = canonicalize(&recs).unwrap();
            let plan = plan_slabs(&scene, Some(usize::MAX / 2));
            let events = plan.slabs[0].clone();
            let mut tree = SlabTree::build(scene.ys().to_vec());
            tree.fill_spanning(&scene, &[]);
            tree.precompute(&scene, &events, &[]);

            let mut present: Vec<RectId> = Vec::new();
            // Window 0: nothing present.
            let naive = naive_states(&tree, &scene, &present, &[]);
            for u in 0..tree.node_count() as u32 {
                assert_eq!(tree.current(u), naive[u as usize], "round {round} initial");
            }
            for ev in &events {
                match ev.kind {
                    EdgeKind::Left => present.push(ev.rect),
                    EdgeKind::Right => present.retain(|&r| r != ev.rect),
                }
                // Advance cursors along the event's own path.
                let r = scene.rect(ev.rect);
                advance_path(&mut tree, 0, r.y1, r.y2);
                let naive = naive_states(&tree, &scene, &present, &[]);
                for u in 0..tree.node_count() as u32 {
                    assert_eq!(
                        tree.current(u),
                        naive[u as usize],
                        "round {round} after event at x={}",
                        ev.x
                    );
                }
            }
            assert!(tree.cursors_exhausted());
        }
    }

    fn advance_path(tree: &mut SlabTree, u: u32, y1: Coord, y2: Coord) {
        if tree.covers(u, y1, y2) {
            tree.advance_assoc(u);
        } else {
            let (l, r, mid) = (tree.lson(u), tree.rson(u), tree.ymid(u));
            if y1 < mid {
                advance_path(tree, l, y1, y2);
            }
            if y2 > mid {
                advance_path(tree, r, y1, y2);
            }
        }
        tree.advance(u);
    }

    #[test]
    fn untouched_node_keeps_cursor() {
        let recs = [
            rec(0, 0.0, 1.0, 0.0, 1.0, 0.0),
            rec(1, 2.0, 3.0, 10.0, 11.0, 1.0),
        ];
        let scene = canonicalize(&recs).unwrap();
        let plan = plan_slabs(&scene, Some(usize::MAX / 2));
        let mut tree = SlabTree::build(scene.ys().to_vec());
        tree.fill_spanning(&scene, &[]);
        tree.precompute(&scene, &plan.slabs[0], &[]);
        // Advance only rect 0's path; a leaf of rect 1 must stay at 0.
        let r0 = scene.rect(RectId(0));
        advance_path(&mut tree, 0, r0.y1, r0.y2);
        let r1 = scene.rect(RectId(1));
        let i = tree.universe().binary_search(&r1.y1).unwrap();
        let leaf = tree.leaf_node(i);
        assert_eq!(tree.cursor(leaf).0, 0);
    }
}
