//! Slab decomposition of the sweep axis.
//!
//! The 2n vertical-edge events are cut into chunks of
//! s = ceil(2n / ceil(log2 n)) consecutive events, giving Theta(log n)
//! slabs of O(n / log n) events each. Boundaries sit midway between the
//! last event of one slab and the first of the next, so no event ever
//! lies on a boundary (canonical coordinates are even, boundaries odd or
//! at least strictly between).

use crate::scene::{Coord, RectId, Scene};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub x: Coord,
    pub kind: EdgeKind,
    pub rect: RectId,
}

#[derive(Clone, Debug)]
pub struct SlabPlan {
    /// m+1 increasing values delimiting m slabs; empty plan for n = 0.
    pub boundaries: Vec<Coord>,
    /// Per-slab events, strictly increasing in x.
    pub slabs: Vec<Vec<Event>>,
}

impl SlabPlan {
    pub fn slab_count(&self) -> usize {
        self.slabs.len()
    }

    pub fn x_left(&self, slab: usize) -> Coord {
        self.boundaries[slab]
    }

    pub fn x_right(&self, slab: usize) -> Coord {
        self.boundaries[slab + 1]
    }

    /// Rect ids whose x-extent strictly contains the slab's interval:
    /// they are active throughout the slab but contribute no event to it.
    pub fn spanning_segments(&self, scene: &Scene, slab: usize) -> Vec<RectId> {
        assert!(slab < self.slabs.len(), "slab index out of range");
        let (xl, xr) = (self.x_left(slab), self.x_right(slab));
        scene
            .rects()
            .iter()
            .filter(|r| r.x1 < xl && r.x2 > xr)
            .map(|r| r.id)
            .collect()
    }

    /// Rects alive at the slab's left boundary whose right edge falls
    /// inside the slab: present in the slab's interval structure from the
    /// start, deleted mid-slab.
    pub fn initial_rects(&self, scene: &Scene, slab: usize) -> Vec<RectId> {
        let (xl, xr) = (self.x_left(slab), self.x_right(slab));
        scene
            .rects()
            .iter()
            .filter(|r| r.x1 < xl && r.x2 > xl && r.x2 < xr)
            .map(|r| r.id)
            .collect()
    }
}

/// Number of events per slab for a scene of n rectangles.
pub fn slab_capacity(n: usize, override_size: Option<usize>) -> usize {
    if let Some(s) = override_size {
        return s.max(1);
    }
    if n < 4 {
        return 2 * n.max(1);
    }
    let log = (usize::BITS - (n - 1).leading_zeros()) as usize; // ceil(log2 n)
    (2 * n).div_ceil(log)
}

/// Cuts the global x-sorted event list into slabs.
pub fn plan_slabs(scene: &Scene, override_size: Option<usize>) -> SlabPlan {
    let n = scene.len();
    if n == 0 {
        return SlabPlan {
            boundaries: Vec::new(),
            slabs: Vec::new(),
        };
    }
    let mut events = Vec::with_capacity(2 * n);
    for r in scene.rects() {
        events.push(Event {
            x: r.x1,
            kind: EdgeKind::Left,
            rect: r.id,
        });
        events.push(Event {
            x: r.x2,
            kind: EdgeKind::Right,
            rect: r.id,
        });
    }
    events.sort_unstable_by_key(|e| e.x);

    let cap = slab_capacity(n, override_size);
    let slabs: Vec<Vec<Event>> = events.chunks(cap).map(|c| c.to_vec()).collect();

    let mut boundaries = Vec::with_capacity(slabs.len() + 1);
    boundaries.push(slabs[0][0].x - 1);
    for w in slabs.windows(2) {
        let last = w[0].last().unwrap().x;
        let first = w[1][0].x;
        boundaries.push((last + first) / 2);
    }
    boundaries.push(slabs.last().unwrap().last().unwrap().x + 1);

    SlabPlan { boundaries, slabs }
}
