//! Brute-force visibility evaluator.
//!
//! Builds the full coordinate arrangement of a scene and paints each open
//! cell with the highest rectangle covering it. Because canonical scenes
//! put every rectangle boundary on a breakpoint, cell-center sampling is
//! exact: the owner is constant inside each open cell. Deliberately shares
//! nothing with the sweep structures beyond the scene model.

use crate::scene::{Coord, RectId, Scene};
use crate::sweep::VisibleRegion;

#[derive(Clone, Debug)]
pub struct OwnerGrid {
    /// Sorted distinct x breakpoints (all rect x coordinates).
    pub xs: Vec<Coord>,
    /// Sorted distinct y breakpoints.
    pub ys: Vec<Coord>,
    /// owner[i * (ys-1) + j] owns the open cell (xs[i],xs[i+1]) x (ys[j],ys[j+1]).
    owner: Vec<RectId>,
}

impl OwnerGrid {
    pub fn cols(&self) -> usize {
        self.xs.len().saturating_sub(1)
    }

    pub fn rows(&self) -> usize {
        self.ys.len().saturating_sub(1)
    }

    pub fn owner(&self, i: usize, j: usize) -> RectId {
        self.owner[i * self.rows() + j]
    }

    /// Number of 4-connected same-owner components of non-background cells.
    pub fn face_count(&self) -> usize {
        let (cols, rows) = (self.cols(), self.rows());
        let mut seen = vec![false; cols * rows];
        let mut faces = 0;
        let mut stack = Vec::new();
        for i in 0..cols {
            for j in 0..rows {
                let at = i * rows + j;
                if seen[at] || self.owner(i, j).is_background() {
                    continue;
                }
                faces += 1;
                let who = self.owner(i, j);
                stack.push((i, j));
                seen[at] = true;
                while let Some((ci, cj)) = stack.pop() {
                    let mut push = |ni: usize, nj: usize| {
                        let nat = ni * rows + nj;
                        if !seen[nat] && self.owner(ni, nj) == who {
                            seen[nat] = true;
                            stack.push((ni, nj));
                        }
                    };
                    if ci > 0 {
                        push(ci - 1, cj);
                    }
                    if ci + 1 < cols {
                        push(ci + 1, cj);
                    }
                    if cj > 0 {
                        push(ci, cj - 1);
                    }
                    if cj + 1 < rows {
                        push(ci, cj + 1);
                    }
                }
            }
        }
        faces
    }
}

/// Paints the arrangement: for every cell, the max-z rectangle covering it.
pub fn build_grid(scene: &Scene) -> OwnerGrid {
    let xs = scene.xs().to_vec();
    let ys = scene.ys().to_vec();
    let cols = xs.len().saturating_sub(1);
    let rows = ys.len().saturating_sub(1);
    let mut owner = vec![RectId::BACKGROUND; cols * rows];
    // Iterate from lowest to highest z so later paints win outright.
    for &id in scene.by_z_desc().iter().rev() {
        let r = scene.rect(id);
        let i1 = xs.binary_search(&r.x1).unwrap();
        let i2 = xs.binary_search(&r.x2).unwrap();
        let j1 = ys.binary_search(&r.y1).unwrap();
        let j2 = ys.binary_search(&r.y2).unwrap();
        for i in i1..i2 {
            owner[i * rows + j1..i * rows + j2].fill(id);
        }
    }
    OwnerGrid { xs, ys, owner }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(Failure),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    /// A region references an owner id absent from the scene.
    UnknownOwner {
        region: usize,
    },
    NonPositiveArea {
        region: usize,
    },
    /// A region sticks out of the grid or is not breakpoint-aligned.
    Misaligned {
        region: usize,
    },
    /// First cell whose coverage or ownership is wrong.
    CellMismatch {
        cell_x: (Coord, Coord),
        cell_y: (Coord, Coord),
        expected_owner: Option<i64>,
        covered_by: Vec<usize>,
    },
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::UnknownOwner { region } => write!(f, "region #{region}: unknown owner id"),
            Failure::NonPositiveArea { region } => {
                write!(f, "region #{region}: non-positive area")
            }
            Failure::Misaligned { region } => {
                write!(f, "region #{region}: not aligned to scene breakpoints")
            }
            Failure::CellMismatch {
                cell_x,
                cell_y,
                expected_owner,
                covered_by,
            } => write!(
                f,
                "cell ({},{})x({},{}): expected owner {:?}, covered by regions {:?}",
                cell_x.0, cell_x.1, cell_y.0, cell_y.1, expected_owner, covered_by
            ),
        }
    }
}

/// Checks a reported region set against the painted arrangement:
/// every non-background cell is covered exactly once by a region of the
/// right owner, no region covers a cell it does not own, and regions have
/// positive area. Background regions (owner id not in the scene maps to
/// none) are only checked for consistency when present.
pub fn verify(scene: &Scene, regions: &[VisibleRegion]) -> Verdict {
    let grid = build_grid(scene);
    let cols = grid.cols();
    let rows = grid.rows();

    let mut label_to_id = std::collections::HashMap::new();
    for r in scene.rects() {
        label_to_id.insert(r.label, r.id);
    }

    // Coverage counters plus the covering region index per cell.
    let mut cover: Vec<Vec<usize>> = vec![Vec::new(); cols * rows];
    for (ri, reg) in regions.iter().enumerate() {
        let owner = match label_to_id.get(&reg.owner) {
            Some(&id) => id,
            // Background pieces (only present with background reporting
            // on) must cover background cells; they do not count toward
            // exact coverage.
            None if reg.owner == -1 => RectId::BACKGROUND,
            None => return Verdict::Fail(Failure::UnknownOwner { region: ri }),
        };
        if reg.x_start >= reg.x_end || reg.y_low >= reg.y_high {
            return Verdict::Fail(Failure::NonPositiveArea { region: ri });
        }
        let (Ok(i1), Ok(i2), Ok(j1), Ok(j2)) = (
            grid.xs.binary_search(&reg.x_start),
            grid.xs.binary_search(&reg.x_end),
            grid.ys.binary_search(&reg.y_low),
            grid.ys.binary_search(&reg.y_high),
        ) else {
            return Verdict::Fail(Failure::Misaligned { region: ri });
        };
        for i in i1..i2 {
            for j in j1..j2 {
                if grid.owner(i, j) != owner {
                    return Verdict::Fail(Failure::CellMismatch {
                        cell_x: (grid.xs[i], grid.xs[i + 1]),
                        cell_y: (grid.ys[j], grid.ys[j + 1]),
                        expected_owner: if grid.owner(i, j).is_background() {
                            None
                        } else {
                            Some(scene.rect(grid.owner(i, j)).label)
                        },
                        covered_by: vec![ri],
                    });
                }
                if !owner.is_background() {
                    cover[i * rows + j].push(ri);
                }
            }
        }
    }

    for i in 0..cols {
        for j in 0..rows {
            let own = grid.owner(i, j);
            let covered = &cover[i * rows + j];
            let want = usize::from(!own.is_background());
            if covered.len() != want {
                return Verdict::Fail(Failure::CellMismatch {
                    cell_x: (grid.xs[i], grid.xs[i + 1]),
                    cell_y: (grid.ys[j], grid.ys[j + 1]),
                    expected_owner: if own.is_background() {
                        None
                    } else {
                        Some(scene.rect(own).label)
                    },
                    covered_by: covered.clone(),
                });
            }
        }
    }

    Verdict::Pass
}
