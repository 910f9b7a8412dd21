//! Scene model: axis-aligned rectangles at distinct heights, viewed from
//! z = +inf.
//!
//! The sweep core works on *canonical* scenes: every x, y and z coordinate
//! is a distinct integer, so all comparisons are exact and order-based.
//! World scenes (f64 coordinates, possibly with ties) live only at the I/O
//! boundary as [`SceneRecord`]s; [`canonicalize`] maps them to ranks.
//!
//! Canonical coordinates are *doubled* ranks (0, 2, 4, ...): midpoints
//! between adjacent coordinates are then themselves integers, which the
//! slab planner uses for boundaries and the oracle uses for cell centers.

use std::fmt;

/// Canonical coordinate. Always even for rectangle edges; odd values are
/// midpoints (slab boundaries, cell centers).
pub type Coord = i64;

/// Dense handle of a rectangle within a scene, or the background sentinel.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RectId(pub u32);

impl RectId {
    /// Fictitious rectangle behind the whole scene, at z = -inf. Loses
    /// every max-by-z comparison and wins every min-by-z comparison.
    pub const BACKGROUND: RectId = RectId(u32::MAX);

    pub fn is_background(self) -> bool {
        self == Self::BACKGROUND
    }
}

impl fmt::Debug for RectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_background() {
            write!(f, "bg")
        } else {
            write!(f, "r{}", self.0)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Rect {
    pub id: RectId,
    /// Identifier from the input file; carried through to output records.
    pub label: i64,
    pub x1: Coord,
    pub x2: Coord,
    pub y1: Coord,
    pub y2: Coord,
    pub z: Coord,
}

/// Raw input record: world coordinates, possibly tied or degenerate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneRecord {
    pub label: i64,
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub z: f64,
}

/// A validated canonical scene. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Scene {
    rects: Vec<Rect>,
    /// All 2n x edge coordinates, strictly increasing.
    xs: Vec<Coord>,
    /// All 2n y edge coordinates, strictly increasing.
    ys: Vec<Coord>,
    /// Rect ids ordered by decreasing z.
    z_desc: Vec<RectId>,
}

impl Scene {
    /// Builds a scene from canonical rectangles, checking every invariant.
    pub fn from_rects(rects: Vec<Rect>) -> Result<Scene, SceneError> {
        let mut xs = Vec::with_capacity(2 * rects.len());
        let mut ys = Vec::with_capacity(2 * rects.len());
        let mut zs = Vec::with_capacity(rects.len());
        for (i, r) in rects.iter().enumerate() {
            if r.id != RectId(i as u32) {
                return Err(SceneError::BadHandle(r.label));
            }
            if r.x1 >= r.x2 {
                return Err(SceneError::EmptyExtent(r.label, 'x'));
            }
            if r.y1 >= r.y2 {
                return Err(SceneError::EmptyExtent(r.label, 'y'));
            }
            xs.push(r.x1);
            xs.push(r.x2);
            ys.push(r.y1);
            ys.push(r.y2);
            zs.push(r.z);
        }
        xs.sort_unstable();
        ys.sort_unstable();
        zs.sort_unstable();
        if xs.windows(2).any(|w| w[0] == w[1]) {
            return Err(SceneError::TiedCoordinate('x'));
        }
        if ys.windows(2).any(|w| w[0] == w[1]) {
            return Err(SceneError::TiedCoordinate('y'));
        }
        if zs.windows(2).any(|w| w[0] == w[1]) {
            return Err(SceneError::TiedCoordinate('z'));
        }
        let mut z_desc: Vec<RectId> = rects.iter().map(|r| r.id).collect();
        z_desc.sort_unstable_by_key(|&id| std::cmp::Reverse(rects[id.0 as usize].z));
        Ok(Scene {
            rects,
            xs,
            ys,
            z_desc,
        })
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn rect(&self, id: RectId) -> &Rect {
        &self.rects[id.0 as usize]
    }

    /// Sorted x coordinates of all vertical edges (2n values).
    pub fn xs(&self) -> &[Coord] {
        &self.xs
    }

    /// Sorted y coordinates of all horizontal edges (2n values).
    pub fn ys(&self) -> &[Coord] {
        &self.ys
    }

    /// Rect ids by decreasing height.
    pub fn by_z_desc(&self) -> &[RectId] {
        &self.z_desc
    }

    /// Height of a rectangle; the background is below everything.
    pub fn z_of(&self, id: RectId) -> Coord {
        if id.is_background() {
            Coord::MIN
        } else {
            self.rects[id.0 as usize].z
        }
    }

    /// The higher of two owners (background loses).
    pub fn max_z(&self, a: RectId, b: RectId) -> RectId {
        if self.z_of(a) >= self.z_of(b) {
            a
        } else {
            b
        }
    }

    /// The lower of two owners (background wins).
    pub fn min_z(&self, a: RectId, b: RectId) -> RectId {
        if self.z_of(a) <= self.z_of(b) {
            a
        } else {
            b
        }
    }

    /// Bounding box (x_min, x_max, y_min, y_max). Empty scene yields zeros.
    pub fn bbox(&self) -> (Coord, Coord, Coord, Coord) {
        if self.is_empty() {
            return (0, 0, 0, 0);
        }
        (
            self.xs[0],
            self.xs[self.xs.len() - 1],
            self.ys[0],
            self.ys[self.ys.len() - 1],
        )
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SceneError {
    #[error("rect {0}: empty {1}-extent")]
    EmptyExtent(i64, char),
    #[error("tied {0} coordinate in canonical scene")]
    TiedCoordinate(char),
    #[error("rect {0}: handle does not match position")]
    BadHandle(i64),
    #[error("rect {0}: non-finite coordinate")]
    NonFinite(i64),
}

/// One problem found by [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// x1 >= x2 or y1 >= y2.
    EmptyExtent {
        label: i64,
        axis: char,
    },
    NonFinite {
        label: i64,
    },
    /// Two records share a coordinate value on the given axis.
    DuplicateCoordinate {
        axis: char,
        value: f64,
        labels: Vec<i64>,
    },
    DuplicateLabel {
        label: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyExtent { label, axis } => {
                write!(f, "rect {label}: empty {axis}-extent")
            }
            Violation::NonFinite { label } => write!(f, "rect {label}: non-finite coordinate"),
            Violation::DuplicateCoordinate {
                axis,
                value,
                labels,
            } => {
                write!(
                    f,
                    "duplicate {axis} coordinate {value} shared by rects {labels:?}"
                )
            }
            Violation::DuplicateLabel { label } => write!(f, "duplicate rect id {label}"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "OK")
        } else {
            for v in &self.violations {
                writeln!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Checks the distinctness and positivity assumptions the sweep relies on.
/// Report-style: never fails, lists every violation with the offending ids.
pub fn validate(records: &[SceneRecord]) -> ValidationReport {
    let mut violations = Vec::new();
    for r in records {
        let coords = [r.x1, r.x2, r.y1, r.y2, r.z];
        if coords.iter().any(|c| !c.is_finite()) {
            violations.push(Violation::NonFinite { label: r.label });
            continue;
        }
        if r.x1 >= r.x2 {
            violations.push(Violation::EmptyExtent {
                label: r.label,
                axis: 'x',
            });
        }
        if r.y1 >= r.y2 {
            violations.push(Violation::EmptyExtent {
                label: r.label,
                axis: 'y',
            });
        }
    }

    let mut labels: Vec<i64> = records.iter().map(|r| r.label).collect();
    labels.sort_unstable();
    for w in labels.windows(2) {
        if w[0] == w[1] {
            violations.push(Violation::DuplicateLabel { label: w[0] });
        }
    }

    for (axis, pick) in [
        (
            'x',
            &(|r: &SceneRecord| vec![r.x1, r.x2]) as &dyn Fn(&SceneRecord) -> Vec<f64>,
        ),
        ('y', &|r: &SceneRecord| vec![r.y1, r.y2]),
        ('z', &|r: &SceneRecord| vec![r.z]),
    ] {
        let mut vals: Vec<(f64, i64)> = Vec::new();
        for r in records {
            for v in pick(r) {
                if v.is_finite() {
                    vals.push((v, r.label));
                }
            }
        }
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let mut i = 0;
        while i < vals.len() {
            let mut j = i + 1;
            while j < vals.len() && vals[j].0 == vals[i].0 {
                j += 1;
            }
            if j - i > 1 {
                // Same rect contributing both endpoints counts too (x1 == x2
                // already reported as empty extent; skip that echo here).
                let labels: Vec<i64> = vals[i..j].iter().map(|v| v.1).collect();
                let all_same = labels.windows(2).all(|w| w[0] == w[1]);
                if !all_same {
                    violations.push(Violation::DuplicateCoordinate {
                        axis,
                        value: vals[i].0,
                        labels,
                    });
                }
            }
            i = j;
        }
    }

    ValidationReport { violations }
}

/// Replaces raw coordinates with distinct doubled integer ranks.
///
/// Ties break by (value, rect position, endpoint role) with the left/bottom
/// endpoint ranked before the right/top one, so the result is deterministic
/// and the strict order of non-tied coordinates is preserved. Idempotent:
/// already-distinct scenes map order-isomorphically.
pub fn canonicalize(records: &[SceneRecord]) -> Result<Scene, SceneError> {
    #[derive(PartialEq, PartialOrd)]
    struct Key(f64, usize, u8); // value, record index, role (0 = low end)

    fn ranks(mut keys: Vec<(Key, usize)>) -> Vec<Coord> {
        keys.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut out = vec![0; keys.len()];
        for (rank, (_, slot)) in keys.iter().enumerate() {
            out[*slot] = 2 * rank as Coord;
        }
        out
    }

    let n = records.len();
    let mut xk = Vec::with_capacity(2 * n);
    let mut yk = Vec::with_capacity(2 * n);
    let mut zk = Vec::with_capacity(n);
    for (i, r) in records.iter().enumerate() {
        let coords = [r.x1, r.x2, r.y1, r.y2, r.z];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(SceneError::NonFinite(r.label));
        }
        xk.push((Key(r.x1, i, 0), 2 * i));
        xk.push((Key(r.x2, i, 1), 2 * i + 1));
        yk.push((Key(r.y1, i, 0), 2 * i));
        yk.push((Key(r.y2, i, 1), 2 * i + 1));
        zk.push((Key(r.z, i, 0), i));
    }
    let xr = ranks(xk);
    let yr = ranks(yk);
    let zr = ranks(zk);

    let rects = records
        .iter()
        .enumerate()
        .map(|(i, r)| Rect {
            id: RectId(i as u32),
            label: r.label,
            x1: xr[2 * i],
            x2: xr[2 * i + 1],
            y1: yr[2 * i],
            y2: yr[2 * i + 1],
            z: zr[i] / 2,
        })
        .collect();
    Scene::from_rects(rects)
}

/// Convenience: the records of a canonical scene, for round-trips.
pub fn to_records(scene: &Scene) -> Vec<SceneRecord> {
    scene
        .rects()
        .iter()
        .map(|r| SceneRecord {
            label: r.label,
            x1: r.x1 as f64,
            x2: r.x2 as f64,
            y1: r.y1 as f64,
            y2: r.y2 as f64,
            z: r.z as f64,
        })
        .collect()
}


impl PartialEq for Scene {
    fn eq(&self, other: &Self) -> bool {
        self.rects.len() == other.rects.len()
            && self
                .rects
                .iter()
                .zip(&other.rects)
                .all(|(a, b)| (a.x1, a.x2, a.y1, a.y2, a.z) == (b.x1, b.x2, b.y1, b.y2, b.z))
    }
}
