//! Deterministic scene generators.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scene::SceneRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Independent random extents: edge coordinates are a random pairing
    /// of distinct values, heights a random permutation.
    Uniform,
    /// Concentric rectangles with shuffled heights.
    Nested,
    /// Two stacks of long thin rectangles in crossed orientations; the
    /// high stack slices every low rectangle, so the visible piece count
    /// grows quadratically in n.
    GridStress,
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Kind, String> {
        match s {
            "uniform" => Ok(Kind::Uniform),
            "nested" => Ok(Kind::Nested),
            "grid-stress" => Ok(Kind::GridStress),
            other => Err(format!("unknown generator kind {other:?}")),
        }
    }
}

/// Generates `n` rectangles with pairwise distinct coordinates. The same
/// (kind, n, seed) always produces the same records.
pub fn generate(kind: Kind, n: usize, seed: u64) -> Vec<SceneRecord> {
    assert!(n >= 1, "generator needs n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        Kind::Uniform => uniform(n, &mut rng),
        Kind::Nested => nested(n, &mut rng),
        Kind::GridStress => grid_stress(n),
    }
}

fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let mut v: Vec<i64> = (0..n as i64).collect();
    v.shuffle(rng);
    v
}

fn uniform(n: usize, rng: &mut ChaCha8Rng) -> Vec<SceneRecord> {
    let xs = shuffled(2 * n, rng);
    let ys = shuffled(2 * n, rng);
    let zs = shuffled(n, rng);
    (0..n)
        .map(|i| {
            let (xa, xb) = (xs[2 * i], xs[2 * i + 1]);
            let (ya, yb) = (ys[2 * i], ys[2 * i + 1]);
            SceneRecord {
                label: i as i64,
                x1: xa.min(xb) as f64,
                x2: xa.max(xb) as f64,
                y1: ya.min(yb) as f64,
                y2: ya.max(yb) as f64,
                z: zs[i] as f64,
            }
        })
        .collect()
}

fn nested(n: usize, rng: &mut ChaCha8Rng) -> Vec<SceneRecord> {
    let zs = shuffled(n, rng);
    let m = n as i64;
    (0..n)
        .map(|i| {
            let i = i as i64;
            SceneRecord {
                label: i,
                x1: i as f64,
                x2: (4 * m - i) as f64,
                y1: (i + 1) as f64 - 0.5,
                y2: (4 * m - i) as f64 + 0.5,
                z: zs[i as usize] as f64,
            }
        })
        .collect()
}

fn grid_stress(n: usize) -> Vec<SceneRecord> {
    // m low wide slats stacked in y, n - m high tall slats stacked in x.
    // Every tall slat crosses every wide one from above, cutting each wide
    // slat into up to (n - m + 1) visible pieces.
    let m = n / 2 + n % 2;
    let tall = n - m;
    let mut out = Vec::with_capacity(n);
    let width = 10 * (tall.max(1) as i64) + 10;
    let height = 10 * (m as i64) + 10;
    for i in 0..m {
        let y = 10 * i as i64;
        out.push(SceneRecord {
            label: i as i64,
            x1: -3.0 - i as f64 / (m + 1) as f64,
            x2: width as f64 + i as f64 / (m + 1) as f64,
            y1: y as f64,
            y2: y as f64 + 4.0,
            z: i as f64,
        });
    }
    for j in 0..tall {
        let x = 10 * j as i64 + 2;
        out.push(SceneRecord {
            label: (m + j) as i64,
            x1: x as f64,
            x2: x as f64 + 4.0,
            y1: -3.0 - j as f64 / (tall + 1) as f64,
            y2: height as f64 + j as f64 / (tall + 1) as f64,
            z: (m + j) as f64,
        });
    }
    out
}
