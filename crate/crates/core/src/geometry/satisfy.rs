//! Arboral satisfaction checking and the two textbook satisfiers.
//!
//! A set is arborally satisfied when every pair of points not sharing a row
//! or column has a third point inside (or on the boundary of) the closed
//! rectangle they span.
//!
//! # Checking in `O(m lg m)`
//!
//! Brute force over pairs is quadratic; witness sets for large sorts have
//! millions of points, so the checker uses a reduction to range-emptiness
//! queries. For a point `a`, let `r` be the x of the next point to the right
//! in `a`'s row (or the grid edge) and `u` the y of the next point above in
//! `a`'s column. An ascending violation involving `a` as the lower-left
//! corner exists iff the open box `(a.x, r) x (a.y, u)` contains a point:
//!
//! * if `(a, b)` is an empty-rectangle pair then nothing of `a`'s row or
//!   column cuts the rectangle, so `b` lies in the box;
//! * conversely the minimal point `b` of a nonempty box (smallest x, then
//!   smallest y) spans an empty rectangle with `a`: interior blockers would
//!   contradict `b`'s minimality, boundary blockers the definition of `r`
//!   and `u`.
//!
//! Descending pairs are the ascending pairs of the y-mirrored set. The box
//! queries run offline against a Fenwick tree in one x-sweep.

use crate::permutation::SplitMix64;

use super::{Origin, PointSet};

/// Outcome of a satisfaction check; `violation` is the lexicographically
/// smallest violating pair, left point first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub satisfied: bool,
    pub violation: Option<((u32, u32), (u32, u32))>,
}

struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of added indices `<= i`.
    fn prefix(&self, i: usize) -> u32 {
        let mut i = i + 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Outcome of one ascending sweep: which points have an empty-rectangle
/// partner strictly up-right of them, plus the row/column successors needed
/// to reconstruct the partner.
struct AscendingPass {
    violators: Vec<usize>,
    next_right: Vec<u32>,
    next_up: Vec<u32>,
}

impl AscendingPass {
    /// The partner certifying that point `i` violates: the smallest-x, then
    /// smallest-y point of `i`'s open box. Interior blockers would contradict
    /// its minimality and boundary blockers the definition of the box, so
    /// the rectangle it spans with `i` is genuinely empty.
    fn partner(&self, coords: &[(u32, u32)], i: usize) -> (u32, u32) {
        let (x, y) = coords[i];
        let (r, u) = (self.next_right[i], self.next_up[i]);
        coords
            .iter()
            .copied()
            .filter(|&(px, py)| px > x && px < r && py > y && py < u)
            .min()
            .expect("violator has a nonempty box")
    }
}

/// Marks every point that forms an empty rectangle with some point strictly
/// up-right of it.
fn ascending_pass(coords: &[(u32, u32)], grid: u32) -> AscendingPass {
    let m = coords.len();
    let empty = AscendingPass {
        violators: Vec::new(),
        next_right: Vec::new(),
        next_up: Vec::new(),
    };
    if m < 2 {
        return empty;
    }

    // Next point to the right within each row, next point up within each
    // column; grid acts as the "none" sentinel.
    let mut next_right = vec![grid; m];
    let mut next_up = vec![grid; m];
    let mut by_row: Vec<usize> = (0..m).collect();
    by_row.sort_unstable_by_key(|&i| (coords[i].1, coords[i].0));
    for w in by_row.windows(2) {
        let (i, j) = (w[0], w[1]);
        if coords[i].1 == coords[j].1 {
            next_right[i] = coords[j].0;
        }
    }
    let mut by_col: Vec<usize> = (0..m).collect();
    by_col.sort_unstable_by_key(|&i| (coords[i].0, coords[i].1));
    for w in by_col.windows(2) {
        let (i, j) = (w[0], w[1]);
        if coords[i].0 == coords[j].0 {
            next_up[i] = coords[j].1;
        }
    }

    // Box of point i: x in [x+1, next_right-1], y in [y+1, next_up-1].
    // Count points inside offline: a prefix query at threshold X counts
    // points with px <= X and py in the y-interval.
    struct Query {
        x_threshold: u32,
        y_lo: u32,
        y_hi: u32,
        sign: i64,
        id: usize,
    }
    let mut queries = Vec::new();
    for (i, &(x, y)) in coords.iter().enumerate() {
        let (x_hi, y_hi) = (next_right[i] - 1, next_up[i] - 1);
        if x_hi <= x || y_hi <= y {
            continue;
        }
        queries.push(Query {
            x_threshold: x_hi,
            y_lo: y + 1,
            y_hi,
            sign: 1,
            id: i,
        });
        queries.push(Query {
            x_threshold: x,
            y_lo: y + 1,
            y_hi,
            sign: -1,
            id: i,
        });
    }
    queries.sort_unstable_by_key(|q| q.x_threshold);

    let mut counts = vec![0i64; m];
    let mut fen = Fenwick::new(grid as usize);
    let mut qi = 0;
    for &idx in &by_col {
        let (x, y) = coords[idx];
        while qi < queries.len() && queries[qi].x_threshold < x {
            let q = &queries[qi];
            let inside =
                fen.prefix(q.y_hi as usize) as i64 - fen.prefix(q.y_lo as usize - 1) as i64;
            counts[q.id] += q.sign * inside;
            qi += 1;
        }
        fen.add(y as usize);
    }
    while qi < queries.len() {
        let q = &queries[qi];
        let inside = fen.prefix(q.y_hi as usize) as i64 - fen.prefix(q.y_lo as usize - 1) as i64;
        counts[q.id] += q.sign * inside;
        qi += 1;
    }

    AscendingPass {
        violators: (0..m).filter(|&i| counts[i] > 0).collect(),
        next_right,
        next_up,
    }
}

/// Checks arboral satisfaction; when unsatisfied, reports the
/// lexicographically smallest violating pair (left point first).
pub fn is_satisfied(s: &PointSet) -> SatisfactionReport {
    let coords: Vec<(u32, u32)> = s.points().iter().map(|p| (p.x, p.y)).collect();
    is_satisfied_coords(&coords, s.n() as u32)
}

/// [`is_satisfied`] over bare coordinates (no duplicates, all `< grid`).
pub fn is_satisfied_coords(coords: &[(u32, u32)], grid: u32) -> SatisfactionReport {
    // Ascending pairs directly; descending pairs via the y-mirrored set.
    // Violator choice always follows original-coordinate lexicographic order.
    let asc = ascending_pass(coords, grid);
    let asc_pair = asc
        .violators
        .iter()
        .copied()
        .min_by_key(|&i| coords[i])
        .map(|i| (coords[i], asc.partner(coords, i)));

    let mirrored: Vec<(u32, u32)> = coords.iter().map(|&(x, y)| (x, grid - 1 - y)).collect();
    let desc = ascending_pass(&mirrored, grid);
    let desc_pair = desc
        .violators
        .iter()
        .copied()
        .min_by_key(|&i| coords[i])
        .map(|i| {
            let (bx, by) = desc.partner(&mirrored, i);
            (coords[i], (bx, grid - 1 - by))
        });

    let violation = match (asc_pair, desc_pair) {
        (Some(v), Some(w)) => Some(v.min(w)),
        (v, w) => v.or(w),
    };
    SatisfactionReport {
        satisfied: violation.is_none(),
        violation,
    }
}

/// Satisfies a plotted permutation with quicksort-shaped accesses: pick a
/// pivot row (seeded), add a point in that row at the column of every key in
/// the partition, recurse above and below.
pub fn satisfy_quicksort(s: &PointSet, seed: u64) -> PointSet {
    let mut out = s.clone();
    let mut col_of_key = vec![0u32; s.n()];
    for p in s.points() {
        if p.origin == Origin::Original {
            col_of_key[p.y as usize] = p.x;
        }
    }
    let mut rng = SplitMix64::new(seed);
    // Explicit stack; recursion depth can reach n on adversarial pivots.
    let mut ranges = vec![(0usize, s.n() - 1)];
    while let Some((klo, khi)) = ranges.pop() {
        let pivot = klo + rng.next_below(khi - klo + 1);
        for &col in &col_of_key[klo..=khi] {
            out.insert(col, pivot as u32, Origin::Added);
        }
        if pivot > klo {
            ranges.push((klo, pivot - 1));
        }
        if pivot < khi {
            ranges.push((pivot + 1, khi));
        }
    }
    out
}

/// Satisfies a plotted permutation with mergesort-shaped accesses: halve the
/// time axis, add each half's keys in both columns flanking the divide,
/// recurse into the halves.
pub fn satisfy_mergesort(s: &PointSet) -> PointSet {
    let mut out = s.clone();
    let keys: Vec<u32> = {
        let mut by_col: Vec<(u32, u32)> = s
            .points()
            .iter()
            .filter(|p| p.origin == Origin::Original)
            .map(|p| (p.x, p.y))
            .collect();
        by_col.sort_unstable();
        by_col.into_iter().map(|(_, y)| y).collect()
    };
    fn rec(out: &mut PointSet, keys: &[u32], lo: usize, hi: usize) {
        if hi - lo <= 1 {
            return;
        }
        let mid = lo + (hi - lo).div_ceil(2);
        for &k in &keys[lo..hi] {
            out.insert(mid as u32 - 1, k, Origin::Added);
            out.insert(mid as u32, k, Origin::Added);
        }
        rec(out, keys, lo, mid);
        rec(out, keys, mid, hi);
    }
    rec(&mut out, &keys, 0, s.n());
    out
}
