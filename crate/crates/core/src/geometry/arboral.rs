//! Trace-driven arboral satisfaction: replay a mergesort's merge records,
//! concatenating the two sides' point sets on the time axis and accessing
//! each touched key in three columns (first column, rightmost column of the
//! left set, last column).
//!
//! Every key in the access set is placed in all three columns; cells that
//! already hold a point are left alone, so the added-point count is at most
//! three per access. The attempted-access count (three per key) is what the
//! six-per-access certification bound is checked against.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use crate::error::CoreError;
use crate::permutation::Permutation;

use super::{plot, MergeTrace, Origin, PointSet};

/// A maximal run of keys from one input within a merge interleave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub from_left: bool,
    /// Smallest key of the run.
    pub lo: usize,
    /// Largest key of the run.
    pub hi: usize,
}

/// Decomposes the interleave of two sorted, disjoint key lists into maximal
/// single-source blocks.
pub fn interleave_blocks(left: &[usize], right: &[usize]) -> Result<Vec<Block>, CoreError> {
    let mut blocks: Vec<Block> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < left.len() || j < right.len() {
        let take_left = match (left.get(i), right.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                return Err(CoreError::TraceMismatch(format!(
                    "key {a} appears on both sides of a merge"
                )))
            }
            (Some(&a), Some(&b)) => a < b,
            (Some(_), None) => true,
            (None, _) => false,
        };
        let k = if take_left {
            i += 1;
            left[i - 1]
        } else {
            j += 1;
            right[j - 1]
        };
        match blocks.last_mut() {
            Some(b) if b.from_left == take_left => b.hi = k,
            _ => blocks.push(Block {
                from_left: take_left,
                lo: k,
                hi: k,
            }),
        }
    }
    Ok(blocks)
}

/// Concatenates two arborally satisfied sets occupying adjacent column
/// ranges (`a` left of `b`) and accesses every key of `accessed_keys` in the
/// first, middle (rightmost column of `a`), and end columns.
///
/// `accessed_keys` must cover every block boundary of the interleave of the
/// two sides' original keys; violations are rejected with a diagnostic.
pub fn arboral_merge(
    a: &PointSet,
    b: &PointSet,
    accessed_keys: &[usize],
) -> Result<PointSet, CoreError> {
    if a.is_empty() {
        return Ok(b.clone());
    }
    if b.is_empty() {
        return Ok(a.clone());
    }
    let (a_lo, a_hi) = a.column_span().unwrap();
    let (b_lo, b_hi) = b.column_span().unwrap();
    if a_hi + 1 != b_lo {
        return Err(CoreError::ColumnsNotAdjacent {
            a: (a_lo as usize, a_hi as usize),
            b: (b_lo as usize, b_hi as usize),
        });
    }

    let a_rows = a.original_rows();
    let b_rows = b.original_rows();
    let key_union: HashSet<usize> = a_rows.iter().chain(&b_rows).copied().collect();
    for &k in accessed_keys {
        if !key_union.contains(&k) {
            return Err(CoreError::TraceMismatch(format!(
                "accessed key {k} is not a key of either side"
            )));
        }
    }
    let accessed_set: HashSet<usize> = accessed_keys.iter().copied().collect();
    for block in interleave_blocks(&a_rows, &b_rows)? {
        for boundary in [block.lo, block.hi] {
            if !accessed_set.contains(&boundary) {
                return Err(CoreError::MissingBoundary { key: boundary });
            }
        }
    }

    let n = a.n().max(b.n());
    let mut out = PointSet::empty(n);
    for p in a.points().iter().chain(b.points()) {
        out.insert(p.x, p.y, p.origin);
    }
    for &k in accessed_keys {
        for col in [a_lo, a_hi, b_hi] {
            out.insert(col, k as u32, Origin::Added);
        }
    }
    Ok(out)
}

/// Folds [`arboral_merge`] over a mergesort trace, producing the satisfied
/// witness for the whole permutation.
pub fn arboral_mergesort(p: &Permutation, trace: &MergeTrace) -> Result<PointSet, CoreError> {
    let n = p.len();
    if trace.records.is_empty() {
        if n == 1 {
            return Ok(plot(p));
        }
        return Err(CoreError::TraceMismatch(format!(
            "no merge records for n = {n}"
        )));
    }

    let singleton = |i: usize| {
        let mut s = PointSet::empty(n);
        s.insert(i as u32, p.key_at(i) as u32, Origin::Original);
        s
    };
    let mut pending: HashMap<(usize, usize), PointSet> = HashMap::new();
    let take = |pending: &mut HashMap<(usize, usize), PointSet>,
                r: &Range<usize>|
     -> Result<PointSet, CoreError> {
        if let Some(s) = pending.remove(&(r.start, r.end)) {
            return Ok(s);
        }
        if r.len() == 1 && r.end <= n {
            return Ok(singleton(r.start));
        }
        Err(CoreError::TraceMismatch(format!(
            "no pending set for positions {}..{}",
            r.start, r.end
        )))
    };

    for rec in &trace.records {
        if rec.left_range.end != rec.right_range.start
            || rec.left_range.is_empty()
            || rec.right_range.is_empty()
            || rec.right_range.end > n
        {
            return Err(CoreError::TraceMismatch(format!(
                "bad record ranges {:?} / {:?}",
                rec.left_range, rec.right_range
            )));
        }
        let a = take(&mut pending, &rec.left_range)?;
        let b = take(&mut pending, &rec.right_range)?;
        let merged = arboral_merge(&a, &b, &rec.accessed_keys)?;
        pending.insert((rec.left_range.start, rec.right_range.end), merged);
    }

    match pending.remove(&(0, n)) {
        Some(full) if pending.is_empty() => Ok(full),
        _ => Err(CoreError::TraceMismatch(
            "records do not reduce to the full position range".into(),
        )),
    }
}
