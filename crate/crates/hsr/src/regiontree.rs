//! Region tree: the currently visible horizontal edges, ordered by y,
//! with doubly linked leaves carrying strip ownership.
//!
//! Each leaf sits at the y of a visible horizontal edge and owns the strip
//! up to its right (next higher) neighbor: `region` is the rectangle on
//! top of that strip and `x_start` the station where that pairing began.
//! A sentinel leaf below every edge (conceptually y = -inf, owner
//! background) removes boundary cases; the strip above the topmost leaf is
//! always background.
//!
//! Canonical scenes key every edge to a fixed integer universe, so instead
//! of a rotating balanced tree the index is a small hierarchy of bitmask
//! words over the y ranks: predecessor/successor cost a handful of word
//! scans (O(log n) comfortably) and insert/delete touch O(1) words, which
//! meets the amortized-O(1) update budget the sweep accounting assumes.
//! The structure persists across slabs.

use crate::scene::{Coord, RectId};

/// Handle of a live leaf (its y rank), or the sentinel.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Leaf(u32);

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Slot {
    region: RectId,
    x_start: Coord,
    prev: u32,
    next: u32,
}

pub struct RegionTree {
    /// universe[rank] = y value; strictly increasing, all even.
    universe: Vec<Coord>,
    /// Bit hierarchies; level 0 has one bit per rank.
    levels: Vec<Vec<u64>>,
    /// Slot per rank, plus the sentinel at index universe.len().
    slots: Vec<Slot>,
    live: usize,
    pub peak_live: usize,
    /// Structural + search operations, the sweep's region-tree cost proxy.
    pub ops: u64,
}

impl RegionTree {
    /// `universe` is the sorted list of all y values edges may take;
    /// `x_init` seeds the sentinel strip's start.
    pub fn new(universe: Vec<Coord>, x_init: Coord) -> RegionTree {
        debug_assert!(universe.windows(2).all(|w| w[0] < w[1]));
        let n = universe.len();
        let mut levels = Vec::new();
        let mut size = n;
        loop {
            let words = size.div_ceil(64);
            levels.push(vec![0u64; words.max(1)]);
            if words <= 1 {
                break;
            }
            size = words;
        }
        let sentinel = Slot {
            region: RectId::BACKGROUND,
            x_start: x_init,
            prev: NIL,
            next: NIL,
        };
        let mut slots = vec![
            Slot {
                region: RectId::BACKGROUND,
                x_start: x_init,
                prev: NIL,
                next: NIL
            };
            n + 1
        ];
        slots[n] = sentinel;
        RegionTree {
            universe,
            levels,
            slots,
            live: 1,
            peak_live: 1,
            ops: 0,
        }
    }

    pub fn sentinel(&self) -> Leaf {
        Leaf(self.universe.len() as u32)
    }

    pub fn is_sentinel(&self, f: Leaf) -> bool {
        f.0 as usize == self.universe.len()
    }

    /// Leaf count including the sentinel.
    pub fn leaf_count(&self) -> usize {
        self.live
    }

    /// y of a leaf; the sentinel reports Coord::MIN.
    pub fn y(&self, f: Leaf) -> Coord {
        if self.is_sentinel(f) {
            Coord::MIN
        } else {
            self.universe[f.0 as usize]
        }
    }

    pub fn region(&self, f: Leaf) -> RectId {
        self.slots[f.0 as usize].region
    }

    pub fn x_start(&self, f: Leaf) -> Coord {
        self.slots[f.0 as usize].x_start
    }

    pub fn next(&self, f: Leaf) -> Option<Leaf> {
        let n = self.slots[f.0 as usize].next;
        (n != NIL).then_some(Leaf(n))
    }

    pub fn prev(&self, f: Leaf) -> Leaf {
        let p = self.slots[f.0 as usize].prev;
        if p == NIL {
            self.sentinel()
        } else {
            Leaf(p)
        }
    }

    /// y of the right neighbor, or Coord::MAX above the topmost leaf.
    pub fn strip_top(&self, f: Leaf) -> Coord {
        match self.next(f) {
            Some(n) => self.y(n),
            None => Coord::MAX,
        }
    }

    fn rank_of(&self, y: Coord) -> usize {
        self.universe
            .binary_search(&y)
            .expect("y not in region universe")
    }

    fn bit_set(&mut self, rank: usize) {
        let mut i = rank;
        for level in &mut self.levels {
            let w = i / 64;
            let b = i % 64;
            let had = level[w];
            level[w] = had | (1u64 << b);
            if had != 0 {
                break;
            }
            i = w;
        }
    }

    fn bit_clear(&mut self, rank: usize) {
        let mut i = rank;
        for level in &mut self.levels {
            let w = i / 64;
            let b = i % 64;
            level[w] &= !(1u64 << b);
            if level[w] != 0 {
                break;
            }
            i = w;
        }
    }

    fn present(&self, rank: usize) -> bool {
        (self.levels[0][rank / 64] >> (rank % 64)) & 1 == 1
    }

    /// Largest present rank strictly below `rank`, if any.
    fn pred_rank(&self, rank: usize) -> Option<usize> {
        self.pred_at_level(0, rank)
    }

    /// Largest set position at `level` strictly below `before`.
    fn pred_at_level(&self, level: usize, before: usize) -> Option<usize> {
        if before == 0 {
            return None;
        }
        let w = (before - 1) / 64;
        let b = (before - 1) % 64;
        let masked = self.levels[level][w] & (u64::MAX >> (63 - b));
        if masked != 0 {
            return Some(w * 64 + (63 - masked.leading_zeros() as usize));
        }
        if level + 1 >= self.levels.len() {
            // Top level is a single word; nothing below.
            return None;
        }
        // A set bit at level+1 marks a nonzero word here.
        let word_idx = self.pred_at_level(level + 1, w)?;
        let word = self.levels[level][word_idx];
        debug_assert!(word != 0);
        Some(word_idx * 64 + (63 - word.leading_zeros() as usize))
    }

    /// The leaf owning the strip that contains y values just below `y`:
    /// rightmost leaf with leaf.y < y. The sentinel answers when no real
    /// leaf is below.
    pub fn pred_strict(&mut self, y: Coord) -> Leaf {
        self.ops += 1;
        let rank = match self.universe.binary_search(&y) {
            Ok(r) => r,
            Err(r) => r,
        };
        match self.pred_rank(rank) {
            Some(r) => Leaf(r as u32),
            None => self.sentinel(),
        }
    }

    /// Bracketing leaves of a query range per the reporting procedures:
    /// p is the predecessor leaf of y_lo, q the predecessor leaf of y_hi.
    pub fn locate_range(&mut self, y_lo: Coord, y_hi: Coord) -> (Leaf, Leaf) {
        debug_assert!(y_lo < y_hi);
        (self.pred_strict(y_lo), self.pred_strict(y_hi))
    }

    /// Leaf exactly at y, if present.
    pub fn leaf_at(&self, y: Coord) -> Option<Leaf> {
        match self.universe.binary_search(&y) {
            Ok(r) if self.present(r) => Some(Leaf(r as u32)),
            _ => None,
        }
    }

    /// Inserts a new leaf at `y` (no leaf may exist there) with the given
    /// ownership fields, stitching the linked list.
    pub fn insert_edge(&mut self, y: Coord, region: RectId, x_start: Coord) -> Leaf {
        let rank = self.rank_of(y);
        assert!(!self.present(rank), "duplicate horizontal edge at y={y}");
        let pred = match self.pred_rank(rank) {
            Some(p) => Leaf(p as u32),
            None => self.sentinel(),
        };
        self.insert_after(pred, rank, region, x_start)
    }

    /// Insertion with the predecessor already in hand: O(1) link surgery.
    fn insert_after(&mut self, pred: Leaf, rank: usize, region: RectId, x_start: Coord) -> Leaf {
        self.ops += 1;
        let next = self.slots[pred.0 as usize].next;
        let prev = if self.is_sentinel(pred) { NIL } else { pred.0 };
        self.slots[rank] = Slot {
            region,
            x_start,
            prev,
            next,
        };
        self.slots[pred.0 as usize].next = rank as u32;
        if next != NIL {
            self.slots[next as usize].prev = rank as u32;
        }
        self.bit_set(rank);
        self.live += 1;
        self.peak_live = self.peak_live.max(self.live);
        Leaf(rank as u32)
    }

    /// Unlinks a real leaf.
    pub fn delete(&mut self, f: Leaf) {
        assert!(!self.is_sentinel(f));
        self.ops += 1;
        let rank = f.0 as usize;
        debug_assert!(self.present(rank));
        let Slot { prev, next, .. } = self.slots[rank];
        match prev {
            NIL => self.slots[self.universe.len()].next = next,
            p => self.slots[p as usize].next = next,
        }
        if next != NIL {
            self.slots[next as usize].prev = prev;
        }
        self.bit_clear(rank);
        self.live -= 1;
    }

    /// Removes every leaf strictly between p and q (list order).
    pub fn remove_range(&mut self, p: Leaf, q: Leaf) {
        let mut cur = self.next(p);
        while let Some(f) = cur {
            if f == q {
                break;
            }
            cur = self.next(f);
            self.delete(f);
        }
    }

    /// Walks leaves from p to q inclusive, emitting each strip
    /// (f.region, f.x_start, sweep_x, f.y, right(f).y) to the sink.
    /// Returns the number of strips the sink accepted.
    pub fn report_between(
        &mut self,
        p: Leaf,
        q: Leaf,
        sweep_x: Coord,
        sink: &mut impl FnMut(RectId, Coord, Coord, Coord, Coord) -> bool,
    ) -> usize {
        let mut emitted = 0;
        let mut cur = Some(p);
        while let Some(f) = cur {
            self.ops += 1;
            let top = self.strip_top(f);
            if sink(self.region(f), self.x_start(f), sweep_x, self.y(f), top) {
                emitted += 1;
            }
            if f == q {
                break;
            }
            cur = self.next(f);
        }
        emitted
    }

    /// Ownership handover for the strip of `f`. If the owner actually
    /// changes, the old pairing is emitted (when it has width and the sink
    /// accepts it) and the strip restarts at `x_now`.
    pub fn set_region(
        &mut self,
        f: Leaf,
        owner: RectId,
        x_now: Coord,
        sink: &mut impl FnMut(RectId, Coord, Coord, Coord, Coord) -> bool,
    ) {
        self.ops += 1;
        let slot = &self.slots[f.0 as usize];
        if slot.region == owner {
            return;
        }
        let (old_region, old_x) = (slot.region, slot.x_start);
        if old_x < x_now {
            let top = self.strip_top(f);
            sink(old_region, old_x, x_now, self.y(f), top);
        }
        let slot = &mut self.slots[f.0 as usize];
        slot.region = owner;
        slot.x_start = x_now;
    }

    /// Splits the strip containing `y` by inserting a leaf at `y` that
    /// copies the owning strip's fields. No-op if a leaf already sits
    /// there. Both halves continue the old pairing.
    pub fn split_at(&mut self, y: Coord) -> Leaf {
        let rank = self.rank_of(y);
        if self.present(rank) {
            return Leaf(rank as u32);
        }
        let below = self.pred_strict(y);
        let region = self.region(below);
        let x_start = self.x_start(below);
        self.insert_after(below, rank, region, x_start)
    }

    /// `split_at` with a positional hint: `hint` must be a live leaf at or
    /// below `y`. Walks forward from it instead of searching, which is
    /// O(1) when the caller advances through adjacent strips.
    pub fn split_at_after(&mut self, hint: Leaf, y: Coord) -> Leaf {
        debug_assert!(self.y(hint) <= y);
        let rank = self.rank_of(y);
        if self.present(rank) {
            return Leaf(rank as u32);
        }
        let mut below = hint;
        while let Some(n) = self.next(below) {
            if self.y(n) > y {
                break;
            }
            below = n;
            self.ops += 1;
        }
        let region = self.region(below);
        let x_start = self.x_start(below);
        self.insert_after(below, rank, region, x_start)
    }

    /// Hands the strips covering [a, b) over to `owner` in one pass:
    /// splits the boundaries, reports every consumed pairing, removes the
    /// interior edges and leaves one strip [a, b) starting at `x_now`.
    pub fn claim_range(
        &mut self,
        a: Coord,
        b: Coord,
        owner: RectId,
        x_now: Coord,
        sink: &mut impl FnMut(RectId, Coord, Coord, Coord, Coord) -> bool,
    ) {
        self.split_at(a);
        self.split_at(b);
        let first = self.leaf_at(a).expect("lower boundary just split");
        self.set_region(first, owner, x_now, sink);
        loop {
            let f = match self.next(first) {
                Some(f) if self.y(f) < b => f,
                _ => break,
            };
            self.ops += 1;
            let (region, x_start) = {
                let s = &self.slots[f.0 as usize];
                (s.region, s.x_start)
            };
            if x_start < x_now {
                let top = self.strip_top(f);
                sink(region, x_start, x_now, self.y(f), top);
            }
            self.delete(f);
        }
    }

    /// If `f` and its left neighbor carry the same owner, the edge at `f`
    /// no longer separates anything: both old pairings are emitted, the
    /// leaf is removed and the merged strip restarts at `x_now`.
    /// Returns true when a merge happened.
    pub fn merge_if_equal(
        &mut self,
        f: Leaf,
        x_now: Coord,
        sink: &mut impl FnMut(RectId, Coord, Coord, Coord, Coord) -> bool,
    ) -> bool {
        if self.is_sentinel(f) {
            return false;
        }
        let p = self.prev(f);
        let owner = self.region(f);
        if self.region(p) != owner {
            return false;
        }
        let p_x = self.x_start(p);
        if p_x < x_now {
            sink(owner, p_x, x_now, self.y(p), self.y(f));
        }
        let f_x = self.x_start(f);
        if f_x < x_now {
            let top = self.strip_top(f);
            sink(owner, f_x, x_now, self.y(f), top);
        }
        self.delete(f);
        let ps = &mut self.slots[p.0 as usize];
        ps.x_start = x_now;
        true
    }

    /// Leaves in list order, excluding the sentinel: (y, region, x_start).
    pub fn snapshot(&self) -> Vec<(Coord, RectId, Coord)> {
        let mut out = Vec::new();
        let mut cur = self.next(self.sentinel());
        while let Some(f) = cur {
            out.push((self.y(f), self.region(f), self.x_start(f)));
            cur = self.next(f);
        }
        out
    }
}
