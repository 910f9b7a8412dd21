//! Text formats: scene files and region CSV.
//!
//! Scene files hold one rectangle per line, `id x1 x2 y1 y2 z`,
//! whitespace-separated, with `#` comments. Regions travel as CSV with a
//! fixed header; coordinates are canonical integers.

use std::fmt::Write as _;

use crate::scene::SceneRecord;
use crate::sweep::VisibleRegion;

pub const REGION_CSV_HEADER: &str = "owner_id,x_start,x_end,y_low,y_high";

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: bad number {token:?}")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: expected header {expected:?}")]
    BadHeader { line: usize, expected: &'static str },
}

/// Parses the scene text format. Comments (`#` to end of line) and blank
/// lines are ignored.
pub fn parse_scene(text: &str) -> Result<Vec<SceneRecord>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 6 {
            return Err(ParseError::FieldCount {
                line: line_no,
                expected: 6,
                found: tokens.len(),
            });
        }
        let mut nums = [0f64; 6];
        for (i, t) in tokens.iter().enumerate() {
            nums[i] = t.parse::<f64>().map_err(|_| ParseError::BadNumber {
                line: line_no,
                token: t.to_string(),
            })?;
        }
        out.push(SceneRecord {
            label: nums[0] as i64,
            x1: nums[1],
            x2: nums[2],
            y1: nums[3],
            y2: nums[4],
            z: nums[5],
        });
    }
    Ok(out)
}

pub fn write_scene(records: &[SceneRecord]) -> String {
    let mut s = String::new();
    s.push_str("# id x1 x2 y1 y2 z\n");
    for r in records {
        let _ = writeln!(s, "{} {} {} {} {} {}", r.label, r.x1, r.x2, r.y1, r.y2, r.z);
    }
    s
}

pub fn write_regions_csv(regions: &[VisibleRegion]) -> String {
    let mut s = String::with_capacity(regions.len() * 24 + 32);
    s.push_str(REGION_CSV_HEADER);
    s.push('\n');
    for r in regions {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.owner, r.x_start, r.x_end, r.y_low, r.y_high
        );
    }
    s
}

pub fn parse_regions_csv(text: &str) -> Result<Vec<VisibleRegion>, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == REGION_CSV_HEADER => {}
        _ => {
            return Err(ParseError::BadHeader {
                line: 1,
                expected: REGION_CSV_HEADER,
            });
        }
    }
    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').collect();
        if tokens.len() != 5 {
            return Err(ParseError::FieldCount {
                line: line_no,
                expected: 5,
                found: tokens.len(),
            });
        }
        let mut nums = [0i64; 5];
        for (i, t) in tokens.iter().enumerate() {
            nums[i] = t.trim().parse::<i64>().map_err(|_| ParseError::BadNumber {
                line: line_no,
                token: t.to_string(),
            })?;
        }
        out.push(VisibleRegion {
            owner: nums[0],
            x_start: nums[1],
            x_end: nums[2],
            y_low: nums[3],
            y_high: nums[4],
        });
    }
    Ok(out)
}
