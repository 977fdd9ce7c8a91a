//! An upper bound on the Skorokhod-based distance between two contours.
//!
//! The shorter contour is extended by 0 up to the longer duration. Warps are
//! piecewise linear, pinned at matched jump times; the dynamic program
//! searches monotone matchings that skip at most `SKIP - 1` jumps in a row
//! within a band around the diagonal, and the identity warp is always a
//! candidate. The result is the best candidate plus the duration gap.

use super::PljContour;

const SKIP: usize = 3;
const MAX_CELLS: usize = 4_000_000;

struct Extended<'a> {
    c: &'a PljContour,
    /// Times where the slope or value changes.
    breaks: Vec<f64>,
}

impl<'a> Extended<'a> {
    fn new(c: &'a PljContour) -> Self {
        let mut breaks: Vec<f64> = c.falls().iter().map(|f| f.t).collect();
        breaks.push(c.duration());
        breaks.dedup();
        Extended { c, breaks }
    }

    fn right(&self, t: f64) -> f64 {
        if t >= self.c.duration() {
            0.0
        } else {
            self.c.eval(t.max(0.0)).unwrap_or(0.0)
        }
    }

    fn left(&self, t: f64) -> f64 {
        if t > self.c.duration() {
            0.0
        } else {
            self.c.eval_left(t.max(0.0)).unwrap_or(0.0)
        }
    }

    fn breaks_in(&self, a: f64, b: f64) -> &[f64] {
        let lo = self.breaks.partition_point(|&t| t <= a);
        let hi = self.breaks.partition_point(|&t| t < b);
        &self.breaks[lo..hi.max(lo)]
    }
}

/// Cost of the linear warp sending `[a2, b2]` (times of `g`) onto `[a1, b1]`
/// (times of `f`).
fn segment_cost(f: &Extended, g: &Extended, a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let scale = (b1 - a1) / (b2 - a2);
    let warp = |t: f64| {
        if t == b2 {
            b1
        } else {
            a1 + (t - a2) * scale
        }
    };
    let mut pts = vec![a2, b2];
    pts.extend_from_slice(g.breaks_in(a2, b2));
    pts.extend(f.breaks_in(a1, b1).iter().map(|&s| a2 + (s - a1) / scale));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut worst = (a1 - a2).abs().max((b1 - b2).abs());
    for w in pts.windows(2) {
        let (u, v) = (w[0], w[1]);
        worst = worst
            .max((f.right(warp(u)) - g.right(u)).abs())
            .max((f.left(warp(v)) - g.left(v)).abs());
    }
    worst
}

fn identity_cost(f: &Extended, g: &Extended, end: f64) -> f64 {
    segment_cost(f, g, 0.0, end, 0.0, end)
}

/// Warps `g`'s time onto the zero-extended `f`; `f` is the shorter one.
fn dp_cost(f: &Extended, g: &Extended, end: f64) -> f64 {
    let j1: Vec<f64> = f.c.jumps().iter().map(|j| j.0).collect();
    let j2: Vec<f64> = g.c.jumps().iter().map(|j| j.0).collect();
    let (n1, n2) = (j1.len(), j2.len());
    if n1 * n2 > MAX_CELLS {
        return f64::INFINITY;
    }
    let band = SKIP + n1.abs_diff(n2) + 3;
    let in_band = |i: usize, j: usize| {
        let diag = i * n2 / n1.max(1);
        j + band >= diag && j <= diag + band
    };
    let mut best = vec![f64::INFINITY; n1 * n2];
    best[0] = 0.0;
    let mut answer = f64::INFINITY;
    for i in 0..n1 {
        for j in 0..n2 {
            let cur = best[i * n2 + j];
            if !cur.is_finite() || cur >= answer {
                continue;
            }
            if i + SKIP >= n1 && j + SKIP >= n2 {
                let c = cur.max(segment_cost(f, g, j1[i], end, j2[j], end));
                answer = answer.min(c);
            }
            for ni in i + 1..(i + 1 + SKIP).min(n1) {
                for nj in j + 1..(j + 1 + SKIP).min(n2) {
                    if !in_band(ni, nj) {
                        continue;
                    }
                    let c = cur.max(segment_cost(f, g, j1[i], j1[ni], j2[j], j2[nj]));
                    let slot = &mut best[ni * n2 + nj];
                    if c < *slot {
                        *slot = c;
                    }
                }
            }
        }
    }
    answer
}

fn one_way(short: &PljContour, long: &PljContour) -> f64 {
    let (f, g) = (Extended::new(short), Extended::new(long));
    let end = long.duration();
    identity_cost(&f, &g, end).min(dp_cost(&f, &g, end))
}

/// Upper bound on d(c1, c2) = d_Sk(f1, f2) + |m2 - m1|; 0 iff equal.
pub fn contour_distance(c1: &PljContour, c2: &PljContour) -> f64 {
    if c1 == c2 {
        return 0.0;
    }
    let gap = (c2.duration() - c1.duration()).abs();
    let d = if c1.duration() < c2.duration() {
        one_way(c1, c2)
    } else if c2.duration() < c1.duration() {
        one_way(c2, c1)
    } else {
        one_way(c1, c2).min(one_way(c2, c1))
    };
    d + gap
}
