//! The plane sweep.
//!
//! One slab at a time: build the slab's segment tree, simulate its updates
//! (precompute), then walk the stations in x order. A left edge descends
//! the tree flagging where the new rectangle is hidden, claims the y-ranges
//! it newly covers, and rewires the region tree accordingly. A right edge
//! additionally tracks the second-highest rectangle along its search path
//! (the one revealed when this rectangle leaves) and hands the departed
//! strips over to each revealed owner, coalescing neighbouring ranges with
//! the same owner into one region-tree access. Cursor discipline: a left
//! edge advances a node's cursors *after* processing it (reads see the
//! scene without the arriving rectangle), a right edge advances *before*
//! (reads see the scene without the departing one).
//!
//! The region tree persists across slabs, so strips and their start
//! stations flow over slab boundaries untouched.

use serde::Serialize;

use crate::regiontree::RegionTree;
use crate::scene::{Coord, Rect, RectId, Scene};
use crate::segtree::{naive_states, SlabTree};
use crate::slab::{plan_slabs, EdgeKind};

/// One reported piece of visible surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VisibleRegion {
    /// Label of the owning rectangle from the input scene, or -1 for
    /// background pieces when background reporting is on.
    pub owner: i64,
    pub x_start: Coord,
    pub x_end: Coord,
    pub y_low: Coord,
    pub y_high: Coord,
}

/// Single-guard mutations for test-suite strength checks. Each drops or
/// forces exactly one guard of the sweep recursions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Left descent never clears its visibility flag.
    LeftKeepsHiddenVisible,
    /// Left reporting skips the hidden-piece prune.
    LeftReportSkipsPrune,
    /// Left reporting claims every canonical node unconditionally.
    LeftReportClaimsAlways,
    /// Right descent never clears its visibility flag.
    RightKeepsHiddenVisible,
    /// Right reporting skips the hidden-piece prune.
    RightReportSkipsPrune,
    /// Right reporting assigns the revealed owner unconditionally.
    RightReportRevealsAlways,
    /// The revealed-owner candidate ignores spanning rectangles.
    RevealIgnoresSpanning,
    /// The revealed-owner candidate ignores vertical edges.
    RevealIgnoresVerticals,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepOptions {
    pub report_background: bool,
    pub slab_override: Option<usize>,
    /// Re-derive every structure definitionally at each station
    /// (scenes of at most 64 rectangles).
    pub debug_checks: bool,
    pub fault: Option<Fault>,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Counters {
    /// Non-background regions emitted (k).
    pub regions: u64,
    /// Segment-tree procedure entries during the sweep proper.
    pub node_visits: u64,
    pub cursor_advances: u64,
    /// Region-tree searches, link updates and walk steps.
    pub region_ops: u64,
    /// Peak of (segment-tree array entries of the live slab + live region
    /// leaves): the algorithm's auxiliary footprint.
    pub aux_peak: u64,
    pub seg_entries_peak: u64,
    pub leaves_peak: u64,
    /// Span-fill pointer hops during preprocessing (not part of the sweep
    /// cost proxy).
    pub precompute_fill_ops: u64,
    pub slabs: u64,
}

impl Counters {
    /// The sweep-phase operation count used for time-scaling checks.
    pub fn sweep_ops(&self) -> u64 {
        self.node_visits + self.cursor_advances + self.region_ops
    }
}

pub trait RegionSink {
    fn emit(&mut self, region: VisibleRegion);
}

impl RegionSink for Vec<VisibleRegion> {
    fn emit(&mut self, region: VisibleRegion) {
        self.push(region);
    }
}

/// Discards regions; useful when only counters matter.
pub struct CountingSink;

impl RegionSink for CountingSink {
    fn emit(&mut self, _region: VisibleRegion) {}
}

/// Runs the sweep and collects the regions.
pub fn run(scene: &Scene, opts: &SweepOptions) -> (Vec<VisibleRegion>, Counters) {
    let mut out = Vec::new();
    let counters = run_with_sink(scene, opts, &mut out);
    (out, counters)
}

/// Runs the sweep, streaming regions into `sink`.
pub fn run_with_sink(scene: &Scene, opts: &SweepOptions, sink: &mut dyn RegionSink) -> Counters {
    Engine::new(scene, *opts, sink).run()
}

/// Runs the sweep for its counters only (no region storage, statically
/// dispatched emission).
pub fn run_counting(scene: &Scene, opts: &SweepOptions) -> Counters {
    Engine::new(scene, *opts, &mut CountingSink).run()
}

/// Merges x-adjacent regions of the same owner and y-strip. Output
/// post-pass only; the sweep's own counting happens before it.
pub fn coalesce(regions: &mut Vec<VisibleRegion>) {
    regions.sort_unstable_by_key(|r| (r.y_low, r.y_high, r.owner, r.x_start));
    let mut out: Vec<VisibleRegion> = Vec::with_capacity(regions.len());
    for r in regions.drain(..) {
        if let Some(last) = out.last_mut() {
            if last.owner == r.owner
                && last.y_low == r.y_low
                && last.y_high == r.y_high
                && last.x_end == r.x_start
            {
                last.x_end = r.x_end;
                continue;
            }
        }
        out.push(r);
    }
    *regions = out;
}

struct Engine<'a, S: RegionSink + ?Sized> {
    scene: &'a Scene,
    opts: SweepOptions,
    sink: &'a mut S,
    regions: RegionTree,
    counters: Counters,
    x: Coord,
    /// y-ranges the arriving rectangle newly covers (left edges).
    claim_runs: Vec<(Coord, Coord)>,
    /// y-ranges where the departing rectangle was the visible face.
    face_runs: Vec<(Coord, Coord)>,
    /// y-ranges handed to a revealed owner, ascending, owner-coalesced.
    reveals: Vec<(Coord, Coord, RectId)>,
    /// Vertical edges currently present in the live slab tree.
    present: Vec<RectId>,
    spanning: Vec<RectId>,
}

impl<'a, S: RegionSink + ?Sized> Engine<'a, S> {
    fn new(scene: &'a Scene, opts: SweepOptions, sink: &'a mut S) -> Engine<'a, S> {
        let x0 = scene.bbox().0;
        Engine {
            scene,
            opts,
            sink,
            regions: RegionTree::new(scene.ys().to_vec(), x0),
            counters: Counters::default(),
            x: x0,
            claim_runs: Vec::new(),
            face_runs: Vec::new(),
            reveals: Vec::new(),
            present: Vec::new(),
            spanning: Vec::new(),
        }
    }

    fn fault(&self, f: Fault) -> bool {
        self.opts.fault == Some(f)
    }

    fn z(&self, id: RectId) -> Coord {
        self.scene.z_of(id)
    }

    fn run(mut self) -> Counters {
        let plan = plan_slabs(self.scene, self.opts.slab_override);
        for slab in 0..plan.slab_count() {
            let events = &plan.slabs[slab];
            self.spanning = plan.spanning_segments(self.scene, slab);
            let initial = plan.initial_rects(self.scene, slab);

            let mut ys: Vec<Coord> = Vec::with_capacity(4 * events.len());
            for ev in events {
                let r = self.scene.rect(ev.rect);
                ys.push(r.y1);
                ys.push(r.y2);
            }
            for &id in &self.spanning {
                let r = self.scene.rect(id);
                ys.push(r.y1);
                ys.push(r.y2);
            }
            ys.sort_unstable();
            ys.dedup();

            let mut tree = SlabTree::build(ys);
            tree.fill_spanning(self.scene, &self.spanning);
            tree.precompute(self.scene, events, &initial);

            // The station checks re-derive every structure from `present`;
            // only they need it.
            let checking = self.opts.debug_checks && self.scene.len() <= 64;
            self.present = initial;

            let leaves_at_entry = self.regions.leaf_count();
            self.regions.peak_live = leaves_at_entry;

            let root = tree.root();
            for ev in events {
                self.x = ev.x;
                let rect = self.scene.rect(ev.rect).clone();
                match ev.kind {
                    EdgeKind::Left => {
                        self.left_edge(&mut tree, &rect, true, root);
                        self.apply_left(&rect);
                    }
                    EdgeKind::Right => {
                        self.right_edge(&mut tree, &rect, true, RectId::BACKGROUND, root);
                        self.apply_right(&rect);
                    }
                }
                if checking {
                    match ev.kind {
                        EdgeKind::Left => self.present.push(ev.rect),
                        EdgeKind::Right => self.present.retain(|&r| r != ev.rect),
                    }
                    self.station_checks(&tree);
                }
            }

            assert!(
                tree.cursors_exhausted(),
                "cursor drift: slab {slab} ended with unconsumed updates"
            );
            let entries = tree.entry_total();
            self.counters.seg_entries_peak = self.counters.seg_entries_peak.max(entries);
            self.counters.leaves_peak =
                self.counters.leaves_peak.max(self.regions.peak_live as u64);
            self.counters.aux_peak = self
                .counters
                .aux_peak
                .max(entries + self.regions.peak_live as u64);
            self.counters.cursor_advances += tree.cursor_advances;
            self.counters.precompute_fill_ops += tree.fill_ops;
            self.counters.slabs += 1;
        }

        self.flush();
        self.counters.region_ops = self.regions.ops;
        self.counters
    }

    // Left edge of `rect` reaches the sweep plane: descend, flagging
    // subtrees where something visible sits above it, and collect the
    // canonical ranges it claims. Cursors advance on the way out.
    fn left_edge(&mut self, tree: &mut SlabTree, rect: &Rect, visible: bool, u: u32) {
        self.counters.node_visits += 1;
        let mut visible = visible;
        let state = tree.current(u);
        if !self.fault(Fault::LeftKeepsHiddenVisible) && rect.z < self.z(state.low) {
            visible = false;
        }
        if tree.covers(u, rect.y1, rect.y2) {
            if visible {
                self.left_report(tree, rect, u);
            }
            tree.advance_assoc(u);
        } else {
            if rect.y1 < tree.ymid(u) {
                self.left_edge(tree, rect, visible, tree.lson(u));
            }
            if rect.y2 > tree.ymid(u) {
                self.left_edge(tree, rect, visible, tree.rson(u));
            }
        }
        tree.advance(u);
    }

    fn left_report(&mut self, tree: &SlabTree, rect: &Rect, u: u32) {
        self.counters.node_visits += 1;
        let state = tree.current(u);
        if !self.fault(Fault::LeftReportSkipsPrune) && rect.z < self.z(state.low) {
            return;
        }
        if self.fault(Fault::LeftReportClaimsAlways) || self.z(state.high) < rect.z {
            let (a, b) = tree.range(u);
            push_run(&mut self.claim_runs, a, b);
        } else {
            if tree.is_leaf(u) {
                debug_assert!(
                    self.opts.fault.is_some(),
                    "left descent stuck at a leaf without fault injection"
                );
                return;
            }
            self.left_report(tree, rect, tree.lson(u));
            self.left_report(tree, rect, tree.rson(u));
        }
    }

    // Right edge: cursors advance on the way *in*, so every read below
    // sees the scene without the departing rectangle. `revealed` tracks
    // the highest remaining rectangle covering the whole path range.
    fn right_edge(
        &mut self,
        tree: &mut SlabTree,
        rect: &Rect,
        visible: bool,
        revealed: RectId,
        u: u32,
    ) {
        self.counters.node_visits += 1;
        tree.advance(u);
        let canonical = tree.covers(u, rect.y1, rect.y2);
        if canonical {
            tree.advance_assoc(u);
        }
        let state = tree.current(u);
        let mut visible = visible;
        if !self.fault(Fault::RightKeepsHiddenVisible) && rect.z < self.z(state.low) {
            visible = false;
        }
        let revealed = self.refresh_revealed(tree, revealed, state.top_v, u);
        if canonical {
            if visible {
                self.right_report(tree, rect, true, revealed, u);
            }
        } else {
            if rect.y1 < tree.ymid(u) {
                self.right_edge(tree, rect, visible, revealed, tree.lson(u));
            }
            if rect.y2 > tree.ymid(u) {
                self.right_edge(tree, rect, visible, revealed, tree.rson(u));
            }
        }
    }

    fn refresh_revealed(&self, tree: &SlabTree, revealed: RectId, top_v: RectId, u: u32) -> RectId {
        let mut revealed = revealed;
        if !self.fault(Fault::RevealIgnoresVerticals) {
            revealed = self.scene.max_z(revealed, top_v);
        }
        if !self.fault(Fault::RevealIgnoresSpanning) {
            revealed = self.scene.max_z(revealed, tree.h_span(u));
        }
        revealed
    }

    fn right_report(
        &mut self,
        tree: &SlabTree,
        rect: &Rect,
        at_rect: bool,
        revealed: RectId,
        u: u32,
    ) {
        self.counters.node_visits += 1;
        let state = tree.current(u);
        if !self.fault(Fault::RightReportSkipsPrune) && rect.z < self.z(state.low) {
            return;
        }
        if self.z(state.high) < rect.z && at_rect {
            let (a, b) = tree.range(u);
            push_run(&mut self.face_runs, a, b);
        }
        let revealed = self.refresh_revealed(tree, revealed, state.top_v, u);
        // The subtree holds nothing above the revealed candidate (it may
        // hold the candidate itself): the whole range is the candidate's.
        if self.fault(Fault::RightReportRevealsAlways) || self.z(state.high) <= self.z(revealed) {
            let (a, b) = tree.range(u);
            push_reveal(&mut self.reveals, a, b, revealed);
        } else {
            if tree.is_leaf(u) {
                debug_assert!(
                    self.opts.fault.is_some(),
                    "right descent stuck at a leaf without fault injection"
                );
                return;
            }
            self.right_report(tree, rect, at_rect, revealed, tree.lson(u));
            self.right_report(tree, rect, at_rect, revealed, tree.rson(u));
        }
    }

    // Region-tree rewiring for a processed left edge: each claimed run
    // consumes the strips it overlaps (reporting their regions) and
    // becomes a single strip of the arriving rectangle.
    fn apply_left(&mut self, rect: &Rect) {
        let x = self.x;
        let Engine {
            regions,
            sink,
            counters,
            scene,
            opts,
            claim_runs,
            ..
        } = self;
        let mut emit = emitter(scene, *opts, &mut counters.regions, &mut **sink);
        for &(a, b) in claim_runs.iter() {
            regions.claim_range(a, b, rect.id, x, &mut emit);
        }
        claim_runs.clear();
    }

    // Region-tree rewiring for a processed right edge: close the departed
    // faces, hand each revealed range to its owner, then drop the
    // rectangle's own edges where the view merges across them.
    fn apply_right(&mut self, rect: &Rect) {
        let x = self.x;
        let Engine {
            regions,
            sink,
            counters,
            scene,
            opts,
            face_runs,
            reveals,
            ..
        } = self;
        let mut emit = emitter(scene, *opts, &mut counters.regions, &mut **sink);

        for &(a, b) in face_runs.iter() {
            regions.split_at(a);
            regions.split_at(b);
            let mut cur = regions.leaf_at(a);
            while let Some(f) = cur {
                if regions.y(f) >= b {
                    break;
                }
                // Emits the face piece and leaves a placeholder that the
                // reveal pass overwrites silently (same station).
                regions.set_region(f, RectId::BACKGROUND, x, &mut emit);
                cur = regions.next(f);
            }
        }

        // Consecutive reveals are adjacent, so each boundary's predecessor
        // is the leaf the previous iteration touched.
        let mut cursor: Option<crate::regiontree::Leaf> = None;
        for &(a, _b, owner) in reveals.iter() {
            debug_assert!(owner != rect.id);
            let f = match cursor {
                Some(h) if regions.y(h) <= a => regions.split_at_after(h, a),
                _ => regions.split_at(a),
            };
            regions.set_region(f, owner, x, &mut emit);
            cursor = Some(f);
        }

        for y in [rect.y1, rect.y2] {
            if let Some(f) = regions.leaf_at(y) {
                let merged = regions.merge_if_equal(f, x, &mut emit);
                debug_assert!(
                    merged || opts.fault.is_some(),
                    "edge leaf at y={y} should always merge away on departure"
                );
            }
        }
        face_runs.clear();
        reveals.clear();
    }

    /// Closes every remaining strip at the scene's right edge. After the
    /// last event all rectangles have departed, so this only ever emits
    /// background (suppressed by default); kept for the contract.
    fn flush(&mut self) {
        let Some(&x_max) = self.scene.xs().last() else {
            return;
        };
        let snapshot = self.regions.snapshot();
        let Engine {
            sink,
            counters,
            scene,
            opts,
            ..
        } = self;
        let mut emit = emitter(scene, *opts, &mut counters.regions, &mut **sink);
        for w in snapshot.windows(2) {
            let (y, region, x_start) = w[0];
            emit(region, x_start, x_max, y, w[1].0);
        }
        if let Some(&(y, region, x_start)) = snapshot.last() {
            emit(region, x_start, x_max, y, Coord::MAX);
        }
        debug_assert!(
            self.opts.fault.is_some() || snapshot.iter().all(|s| s.1.is_background()),
            "non-background strips survived the last event"
        );
    }

    /// Definitional recomputation of every structure at the current
    /// station; the acceptance suite runs this on every event of small
    /// scenes.
    fn station_checks(&mut self, tree: &SlabTree) {
        let scene = self.scene;
        // Segment tree: every node's current (high, low, top) against the
        // recurrences evaluated from scratch.
        let naive = naive_states(tree, scene, &self.present, &self.spanning);
        for u in 0..tree.node_count() as u32 {
            assert_eq!(
                tree.current(u),
                naive[u as usize],
                "node {u} state diverged at x={}",
                self.x
            );
        }

        // Region tree: leaf set and strip owners against a painter's scan
        // just right of the station.
        let ys = scene.ys();
        let active: Vec<&Rect> = scene
            .rects()
            .iter()
            .filter(|r| r.x1 <= self.x && r.x2 > self.x)
            .collect();
        let mut cell_owner = vec![RectId::BACKGROUND; ys.len().saturating_sub(1)];
        for (j, owner) in cell_owner.iter_mut().enumerate() {
            let (lo, hi) = (ys[j], ys[j + 1]);
            for r in &active {
                if r.y1 <= lo && hi <= r.y2 && scene.z_of(r.id) > scene.z_of(*owner) {
                    *owner = r.id;
                }
            }
        }
        let mut expected_edges = Vec::new();
        for j in 0..ys.len() {
            let below = if j == 0 {
                RectId::BACKGROUND
            } else {
                cell_owner[j - 1]
            };
            let above = if j < cell_owner.len() {
                cell_owner[j]
            } else {
                RectId::BACKGROUND
            };
            if below != above {
                expected_edges.push((ys[j], above));
            }
        }
        let snapshot = self.regions.snapshot();
        let got: Vec<(Coord, RectId)> = snapshot.iter().map(|&(y, r, _)| (y, r)).collect();
        assert_eq!(
            got, expected_edges,
            "visible-edge list diverged at x={}",
            self.x
        );
        assert!(
            self.regions.leaf_count() <= 2 * scene.len() + 1,
            "leaf bound exceeded at x={}",
            self.x
        );
    }
}

fn push_run(runs: &mut Vec<(Coord, Coord)>, a: Coord, b: Coord) {
    if let Some(last) = runs.last_mut() {
        if a <= last.1 {
            last.1 = last.1.max(b);
            return;
        }
    }
    runs.push((a, b));
}

fn push_reveal(reveals: &mut Vec<(Coord, Coord, RectId)>, a: Coord, b: Coord, owner: RectId) {
    if let Some(last) = reveals.last_mut() {
        if last.2 == owner && last.1 == a {
            last.1 = b;
            return;
        }
    }
    reveals.push((a, b, owner));
}

/// Builds the emission filter closing over the sink: suppresses zero-width
/// pairings always and background strips unless requested (clipped to the
/// scene's bounding box). Returns whether the region was accepted.
fn emitter<'e, S: RegionSink + ?Sized>(
    scene: &'e Scene,
    opts: SweepOptions,
    k: &'e mut u64,
    sink: &'e mut S,
) -> impl FnMut(RectId, Coord, Coord, Coord, Coord) -> bool + 'e {
    let bbox = scene.bbox();
    move |owner: RectId, x_start: Coord, x_end: Coord, y_low: Coord, y_high: Coord| -> bool {
        if x_start >= x_end {
            return false;
        }
        let (owner_label, y_low, y_high) = if owner.is_background() {
            if !opts.report_background {
                return false;
            }
            let lo = y_low.max(bbox.2);
            let hi = y_high.min(bbox.3);
            if lo >= hi {
                return false;
            }
            (-1, lo, hi)
        } else {
            *k += 1;
            (scene.rect(owner).label, y_low, y_high)
        };
        sink.emit(VisibleRegion {
            owner: owner_label,
            x_start,
            x_end,
            y_low,
            y_high,
        });
        true
    }
}
