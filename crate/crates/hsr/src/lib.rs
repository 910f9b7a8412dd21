//! Visible-surface computation for scenes of axis-aligned rectangles
//! floating at distinct heights, viewed from z = +inf.
//!
//! The sweep reports every maximal visible piece in O((n + k) log n) time
//! and O(n) working space, where k is the number of pieces: the scene is
//! cut into slabs of O(n / log n) vertical edges, each slab gets a
//! segment tree whose updates are precomputed into per-node arrays walked
//! by cursors, and a persistent tree of visible horizontal edges with
//! linked leaves carries strip ownership across stations and slabs.
//!
//! A deliberately naive painter's-algorithm oracle ([`oracle`]) verifies
//! sweep output cell by cell; [`gen`] produces deterministic test scenes;
//! [`svg`] renders region sets.

pub mod gen;
pub mod io;
pub mod oracle;
pub mod regiontree;
pub mod scene;
pub mod segtree;
pub mod slab;
pub mod svg;
pub mod sweep;

pub use scene::{canonicalize, validate, Coord, Rect, RectId, Scene, SceneRecord};
pub use sweep::{run, run_with_sink, Counters, SweepOptions, VisibleRegion};
