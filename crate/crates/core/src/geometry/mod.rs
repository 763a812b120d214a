//! Plane point sets for access sequences and the machinery that certifies
//! sorting traces as arborally satisfied sets.
//!
//! Time runs along the x axis (input position), keyspace along the y axis.
//! Original points come from plotting a permutation; added points are the
//! extra accesses a satisfier placed.

mod arboral;
mod satisfy;
mod svg;

pub use arboral::{arboral_merge, arboral_mergesort, interleave_blocks, Block};
pub use satisfy::{
    is_satisfied, is_satisfied_coords, satisfy_mergesort, satisfy_quicksort, SatisfactionReport,
};
pub use svg::render_svg;

use std::collections::HashSet;
use std::ops::Range;

use crate::error::CoreError;
use crate::permutation::Permutation;

/// Whether a point is part of the plotted input or was added by a satisfier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Original,
    Added,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: u32,
    pub y: u32,
    pub origin: Origin,
}

/// A finite set of grid points with no duplicate coordinates.
#[derive(Debug, Clone)]
pub struct PointSet {
    n: usize,
    points: Vec<Point>,
    occupied: HashSet<(u32, u32)>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        let mut a = self.points.clone();
        let mut b = other.points.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

impl Eq for PointSet {}

impl PointSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            points: Vec::new(),
            occupied: HashSet::new(),
        }
    }

    /// Grid dimension: coordinates lie in `[0, n)`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        self.occupied.contains(&(x, y))
    }

    /// Inserts unless the cell is already occupied; returns whether a point
    /// was added. Panics if the coordinates fall outside the grid.
    pub fn insert(&mut self, x: u32, y: u32, origin: Origin) -> bool {
        assert!(
            (x as usize) < self.n && (y as usize) < self.n,
            "point ({x},{y}) outside grid of {}",
            self.n
        );
        if self.occupied.insert((x, y)) {
            self.points.push(Point { x, y, origin });
            true
        } else {
            false
        }
    }

    pub fn count_added(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.origin == Origin::Added)
            .count()
    }

    pub fn count_original(&self) -> usize {
        self.points.len() - self.count_added()
    }

    /// Keys (rows) of the original points, sorted.
    pub fn original_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .points
            .iter()
            .filter(|p| p.origin == Origin::Original)
            .map(|p| p.y as usize)
            .collect();
        rows.sort_unstable();
        rows
    }

    /// Occupied column span `min_x..=max_x`, or `None` when empty.
    pub fn column_span(&self) -> Option<(u32, u32)> {
        let xs = self.points.iter().map(|p| p.x);
        Some((xs.clone().min()?, xs.max()?))
    }

    /// Swaps the time and key axes; cardinality and tags are preserved.
    pub fn transpose(&self) -> PointSet {
        let mut out = PointSet::empty(self.n);
        for p in &self.points {
            out.insert(p.y, p.x, p.origin);
        }
        out
    }

    /// Text format: one `x y tag` line per point, tag `o` (original) or `a`
    /// (added), sorted by coordinates.
    pub fn serialize(&self) -> String {
        let mut pts = self.points.clone();
        pts.sort_unstable();
        let mut out = String::new();
        for p in pts {
            let tag = match p.origin {
                Origin::Original => 'o',
                Origin::Added => 'a',
            };
            out.push_str(&format!("{} {} {}\n", p.x, p.y, tag));
        }
        out
    }

    /// Parses [`PointSet::serialize`] output. The grid dimension is the
    /// smallest square containing all points.
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        let mut parsed: Vec<(u32, u32, Origin)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| CoreError::BadPointLine {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let mut it = line.split_whitespace();
            let x: u32 = it
                .next()
                .ok_or_else(|| bad("missing x"))?
                .parse()
                .map_err(|_| bad("bad x"))?;
            let y: u32 = it
                .next()
                .ok_or_else(|| bad("missing y"))?
                .parse()
                .map_err(|_| bad("bad y"))?;
            let origin = match it.next() {
                Some("o") => Origin::Original,
                Some("a") => Origin::Added,
                _ => return Err(bad("tag must be 'o' or 'a'")),
            };
            if it.next().is_some() {
                return Err(bad("trailing fields"));
            }
            parsed.push((x, y, origin));
        }
        let n = parsed
            .iter()
            .map(|&(x, y, _)| x.max(y) as usize + 1)
            .max()
            .unwrap_or(0);
        let mut out = PointSet::empty(n);
        for (idx, (x, y, origin)) in parsed.into_iter().enumerate() {
            if !out.insert(x, y, origin) {
                return Err(CoreError::BadPointLine {
                    line: idx + 1,
                    reason: format!("duplicate point ({x},{y})"),
                });
            }
        }
        Ok(out)
    }
}

/// Plots an access sequence: one original point `(i, p[i])` per position.
pub fn plot(p: &Permutation) -> PointSet {
    let mut s = PointSet::empty(p.len());
    for i in 0..p.len() {
        s.insert(i as u32, p.key_at(i) as u32, Origin::Original);
    }
    s
}

/// One merge performed by a tree-based mergesort: which position ranges were
/// merged and which keys the merge touched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRecord {
    pub left_range: Range<usize>,
    pub right_range: Range<usize>,
    /// Sorted, deduplicated; contains at least every block boundary of the
    /// interleave of the two inputs' key sets.
    pub accessed_keys: Vec<usize>,
}

/// The merges of one mergesort run, in postorder (children before parent).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeTrace {
    pub records: Vec<MergeRecord>,
}

impl MergeTrace {
    /// Total accessed-key count across all merges.
    pub fn access_count(&self) -> usize {
        self.records.iter().map(|r| r.accessed_keys.len()).sum()
    }
}
