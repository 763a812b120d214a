//! The static reference tree over input positions and the two bound
//! calculators: the interleave bound (IB, switch counting) and the
//! log-interleave bound (LIB, log of run lengths).
//!
//! The reference tree is fixed rather than maximized over: maximizing IB
//! over all static trees is exponential, so the canonical tree here is the
//! perfectly balanced one with ceil-half-left splits, leaves ordered by
//! input position. Its `ib_total` is one lower-bound instance, not the
//! supremum. A user-supplied shape (nested-parentheses text) is accepted for
//! experimentation.
//!
//! Leaves hold input positions and the keys are queried in sorted order;
//! this is the transposed view of labeling a key-ordered tree by access
//! time, and both give the same totals.

use crate::error::CoreError;
use crate::permutation::Permutation;

/// Which child subtree a key falls under, visiting keys in sorted order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    L,
    R,
}

/// Shape of a static binary tree over a contiguous range of input positions.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Leaf,
    Internal {
        leaves: usize,
        left: Box<Shape>,
        right: Box<Shape>,
    },
}

impl Shape {
    fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Internal { leaves, .. } => *leaves,
        }
    }

    fn balanced(n: usize) -> Shape {
        if n == 1 {
            Shape::Leaf
        } else {
            let left_n = n.div_ceil(2);
            Shape::Internal {
                leaves: n,
                left: Box::new(Shape::balanced(left_n)),
                right: Box::new(Shape::balanced(n - left_n)),
            }
        }
    }
}

/// A static binary tree whose leaves, left to right, are the input positions
/// `0..n-1`. Internal vertices are identified by `(level, index)` with the
/// root at `(0, 0)` and the children of `(l, i)` at `(l+1, 2i)` and
/// `(l+1, 2i+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleaveTree {
    root: Shape,
}

/// An internal vertex together with its position range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub level: u32,
    pub index: u64,
    /// Position range covered: `lo..hi`.
    pub lo: usize,
    pub hi: usize,
    /// First position of the right subtree.
    pub mid: usize,
}

impl InterleaveTree {
    /// The canonical perfectly balanced tree: ceil-half-left splits.
    pub fn balanced(n: usize) -> Result<Self, CoreError> {
        if n == 0 {
            return Err(CoreError::Empty);
        }
        Ok(Self {
            root: Shape::balanced(n),
        })
    }

    /// Parses a nested-parentheses shape: `.` is a leaf, `(LR)` an internal
    /// vertex with subtrees `L` and `R`. Example for n=3: `((..).)`.
    pub fn from_parens(text: &str) -> Result<Self, CoreError> {
        fn parse(chars: &[u8], at: &mut usize, depth: usize) -> Result<Shape, CoreError> {
            if depth > 60 {
                return Err(CoreError::BadTreeShape("deeper than 60 levels".into()));
            }
            match chars.get(*at) {
                Some(b'.') => {
                    *at += 1;
                    Ok(Shape::Leaf)
                }
                Some(b'(') => {
                    *at += 1;
                    let left = parse(chars, at, depth + 1)?;
                    let right = parse(chars, at, depth + 1)?;
                    if chars.get(*at) != Some(&b')') {
                        return Err(CoreError::BadTreeShape(format!(
                            "expected ')' at byte {at}"
                        )));
                    }
                    *at += 1;
                    Ok(Shape::Internal {
                        leaves: left.leaves() + right.leaves(),
                        left: Box::new(left),
                        right: Box::new(right),
                    })
                }
                other => Err(CoreError::BadTreeShape(format!(
                    "expected '.' or '(' at byte {at}, found {other:?}"
                ))),
            }
        }
        let bytes: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut at = 0;
        let root = parse(&bytes, &mut at, 0)?;
        if at != bytes.len() {
            return Err(CoreError::BadTreeShape(format!(
                "trailing input at byte {at}"
            )));
        }
        Ok(Self { root })
    }

    pub fn n(&self) -> usize {
        self.root.leaves()
    }

    /// Number of internal vertices; `n - 1` for every full binary shape.
    pub fn internal_count(&self) -> usize {
        self.n() - 1
    }

    /// Internal vertices in `(level, index)` order.
    pub fn vertices(&self) -> Vec<Vertex> {
        fn walk(shape: &Shape, lo: usize, level: u32, index: u64, out: &mut Vec<Vertex>) {
            if let Shape::Internal {
                leaves,
                left,
                right,
            } = shape
            {
                let mid = lo + left.leaves();
                out.push(Vertex {
                    level,
                    index,
                    lo,
                    hi: lo + leaves,
                    mid,
                });
                walk(left, lo, level + 1, 2 * index, out);
                walk(right, mid, level + 1, 2 * index + 1, out);
            }
        }
        let mut out = Vec::with_capacity(self.internal_count());
        walk(&self.root, 0, 0, 0, &mut out);
        out.sort_by_key(|v| (v.level, v.index));
        out
    }

    fn find(&self, level: u32, index: u64) -> Option<Vertex> {
        self.vertices()
            .into_iter()
            .find(|v| v.level == level && v.index == index)
    }
}

/// Canonical reference tree for a permutation; deterministic for a given n.
pub fn build_tree(p: &Permutation) -> InterleaveTree {
    InterleaveTree::balanced(p.len()).expect("n >= 1")
}

/// Labels of the keys under `(level, index)`, visited in increasing key
/// order: `L` when the key's position lies in the left subtree.
pub fn label_vertex(
    tree: &InterleaveTree,
    p: &Permutation,
    level: u32,
    index: u64,
) -> Result<Vec<Side>, CoreError> {
    let v = tree
        .find(level, index)
        .ok_or(CoreError::NotInternalVertex { level, index })?;
    let mut keyed: Vec<(usize, usize)> = (v.lo..v.hi).map(|pos| (p.key_at(pos), pos)).collect();
    keyed.sort_unstable();
    Ok(keyed
        .into_iter()
        .map(|(_, pos)| if pos < v.mid { Side::L } else { Side::R })
        .collect())
}

/// Maximal-run decomposition of a label sequence.
pub fn run_lengths(labels: &[Side]) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut iter = labels.iter();
    let Some(mut current) = iter.next() else {
        return runs;
    };
    let mut len = 1;
    for s in iter {
        if s == current {
            len += 1;
        } else {
            runs.push(len);
            len = 1;
            current = s;
        }
    }
    runs.push(len);
    runs
}

/// Number of adjacent L/R switches.
pub fn ib_vertex(labels: &[Side]) -> Result<u64, CoreError> {
    if labels.is_empty() {
        return Err(CoreError::EmptyLabels);
    }
    Ok(labels.windows(2).filter(|w| w[0] != w[1]).count() as u64)
}

/// Sum of `lg(run length + 1)` over the maximal runs, base 2.
pub fn lib_vertex(labels: &[Side]) -> Result<f64, CoreError> {
    if labels.is_empty() {
        return Err(CoreError::EmptyLabels);
    }
    Ok(run_lengths(labels)
        .into_iter()
        .map(|r| ((r + 1) as f64).log2())
        .sum())
}

/// Per-vertex bound data.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexBound {
    pub level: u32,
    pub index: u64,
    pub leaves: usize,
    pub ib: u64,
    pub lib: f64,
    pub runs: Vec<usize>,
}

/// Totals and per-vertex breakdown over a reference tree.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub ib_total: u64,
    pub lib_total: f64,
    /// Sorted by `(level, index)`; the totals are summed in this order so
    /// floating-point results are reproducible.
    pub per_vertex: Vec<VertexBound>,
}

impl BoundReport {
    /// CSV with header `vertex_level,vertex_index,leaves,ib,lib` and a
    /// totals row last.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex_level,vertex_index,leaves,ib,lib\n");
        for v in &self.per_vertex {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                v.level, v.index, v.leaves, v.ib, v.lib
            ));
        }
        out.push_str(&format!(
            "totals,,{},{},{}\n",
            self.n, self.ib_total, self.lib_total
        ));
        out
    }

    /// Parses [`BoundReport::to_csv`] output. Run decompositions are not
    /// serialized, so they come back empty.
    pub fn from_csv(text: &str) -> Result<Self, CoreError> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, reason: &str| CoreError::BadReportRow {
            line: line + 1,
            reason: reason.to_string(),
        };
        let (i, header) = lines.next().ok_or_else(|| bad(0, "empty input"))?;
        if header.trim() != "vertex_level,vertex_index,leaves,ib,lib" {
            return Err(bad(i, "unexpected header"));
        }
        let mut per_vertex = Vec::new();
        let mut totals: Option<(usize, u64, f64)> = None;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            if totals.is_some() {
                return Err(bad(i, "rows after totals"));
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(bad(i, "expected 5 columns"));
            }
            if cols[0] == "totals" {
                totals = Some((
                    cols[2].parse().map_err(|_| bad(i, "bad totals n"))?,
                    cols[3].parse().map_err(|_| bad(i, "bad totals ib"))?,
                    cols[4].parse().map_err(|_| bad(i, "bad totals lib"))?,
                ));
            } else {
                per_vertex.push(VertexBound {
                    level: cols[0].parse().map_err(|_| bad(i, "bad level"))?,
                    index: cols[1].parse().map_err(|_| bad(i, "bad index"))?,
                    leaves: cols[2].parse().map_err(|_| bad(i, "bad leaves"))?,
                    ib: cols[3].parse().map_err(|_| bad(i, "bad ib"))?,
                    lib: cols[4].parse().map_err(|_| bad(i, "bad lib"))?,
                    runs: Vec::new(),
                });
            }
        }
        let (n, ib_total, lib_total) = totals.ok_or_else(|| bad(0, "missing totals row"))?;
        Ok(Self {
            n,
            ib_total,
            lib_total,
            per_vertex,
        })
    }
}

/// IB and LIB of `p` over the canonical balanced tree.
pub fn compute_bounds(p: &Permutation) -> BoundReport {
    compute_bounds_with_tree(p, &build_tree(p))
}

/// IB and LIB of `p` over an arbitrary reference tree.
///
/// Works bottom-up: each internal vertex merges its children's key-sorted
/// lists, and the run structure falls out of the merge, for `O(n lg n)`
/// total on balanced shapes. The naive per-vertex labeler ([`label_vertex`])
/// is the independent route used by the tests.
pub fn compute_bounds_with_tree(p: &Permutation, tree: &InterleaveTree) -> BoundReport {
    assert_eq!(tree.n(), p.len(), "tree leaf count must match n");
    struct Rec<'a> {
        p: &'a Permutation,
        out: Vec<VertexBound>,
    }
    impl Rec<'_> {
        /// Returns the keys under `shape` in sorted order.
        fn walk(&mut self, shape: &Shape, lo: usize, level: u32, index: u64) -> Vec<usize> {
            match shape {
                Shape::Leaf => vec![self.p.key_at(lo)],
                Shape::Internal {
                    leaves,
                    left,
                    right,
                } => {
                    let mid = lo + left.leaves();
                    let a = self.walk(left, lo, level + 1, 2 * index);
                    let b = self.walk(right, mid, level + 1, 2 * index + 1);
                    let mut merged = Vec::with_capacity(a.len() + b.len());
                    let mut runs: Vec<usize> = Vec::new();
                    let (mut i, mut j) = (0, 0);
                    let mut current: Option<(Side, usize)> = None;
                    while i < a.len() || j < b.len() {
                        let take_left = j >= b.len() || (i < a.len() && a[i] < b[j]);
                        let side = if take_left { Side::L } else { Side::R };
                        if take_left {
                            merged.push(a[i]);
                            i += 1;
                        } else {
                            merged.push(b[j]);
                            j += 1;
                        }
                        current = Some(match current {
                            Some((s, len)) if s == side => (s, len + 1),
                            Some((_, len)) => {
                                runs.push(len);
                                (side, 1)
                            }
                            None => (side, 1),
                        });
                    }
                    if let Some((_, len)) = current {
                        runs.push(len);
                    }
                    let ib = (runs.len() - 1) as u64;
                    let lib = runs.iter().map(|&r| ((r + 1) as f64).log2()).sum();
                    self.out.push(VertexBound {
                        level,
                        index,
                        leaves: *leaves,
                        ib,
                        lib,
                        runs,
                    });
                    merged
                }
            }
        }
    }
    let mut rec = Rec { p, out: Vec::new() };
    rec.walk(&tree.root, 0, 0, 0);
    let mut per_vertex = rec.out;
    per_vertex.sort_by_key(|v| (v.level, v.index));
    let ib_total = per_vertex.iter().map(|v| v.ib).sum();
    // Fold from +0.0: the empty sum must print as "0", not "-0".
    let lib_total = per_vertex.iter().fold(0.0, |acc, v| acc + v.lib);
    BoundReport {
        n: p.len(),
        ib_total,
        lib_total,
        per_vertex,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::{gen_bit_reversal, gen_random, gen_sorted, SplitMix64};
    use proptest::prelude::*;
    use Side::{L, R};

    #[test]
    fn balanced_tree_shapes() {
        let t = InterleaveTree::balanced(8).unwrap();
        assert_eq!(t.internal_count(), 7);
        let root = t.find(0, 0).unwrap();
        assert_eq!((root.lo, root.mid, root.hi), (0, 4, 8));

        let t = InterleaveTree::balanced(1).unwrap();
        assert_eq!(t.internal_count(), 0);

        let t = InterleaveTree::balanced(6).unwrap();
        let root = t.find(0, 0).unwrap();
        assert_eq!((root.lo, root.mid, root.hi), (0, 3, 6));
    }

    #[test]
    fn parens_shape_round_trip() {
        let t = InterleaveTree::from_parens("((..).)").unwrap();
        assert_eq!(t.n(), 3);
        let root = t.find(0, 0).unwrap();
        assert_eq!((root.lo, root.mid, root.hi), (0, 2, 3));
        assert!(InterleaveTree::from_parens("((..)").is_err());
        assert!(InterleaveTree::from_parens("(..)x").is_err());
    }

    #[test]
    fn label_worked_example() {
        // Keys 0,1,2,4 in the left half, 3,5,6,7 in the right: querying in
        // sorted order labels [L,L,L,R,L,R,R,R].
        let p = Permutation::new(vec![0, 1, 2, 4, 3, 5, 6, 7]).unwrap();
        let t = build_tree(&p);
        let labels = label_vertex(&t, &p, 0, 0).unwrap();
        assert_eq!(labels, vec![L, L, L, R, L, R, R, R]);
        assert_eq!(ib_vertex(&labels).unwrap(), 3);
        assert!((lib_vertex(&labels).unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn label_sorted_and_bitrev_roots() {
        let p = gen_sorted(4).unwrap();
        let t = build_tree(&p);
        assert_eq!(label_vertex(&t, &p, 0, 0).unwrap(), vec![L, L, R, R]);

        let p = gen_bit_reversal(8).unwrap();
        let t = build_tree(&p);
        assert_eq!(
            label_vertex(&t, &p, 0, 0).unwrap(),
            vec![L, R, L, R, L, R, L, R]
        );
    }

    #[test]
    fn label_rejects_leaf_vertex() {
        let p = gen_sorted(4).unwrap();
        let t = build_tree(&p);
        assert!(matches!(
            label_vertex(&t, &p, 2, 0),
            Err(CoreError::NotInternalVertex { .. })
        ));
    }

    #[test]
    fn ib_lib_vertex_examples() {
        assert_eq!(ib_vertex(&[L, L, L, L]).unwrap(), 0);
        assert_eq!(ib_vertex(&[L, R, L, R, L, R, L, R]).unwrap(), 7);
        assert!(ib_vertex(&[]).is_err());
        assert!((lib_vertex(&[L]).unwrap() - 1.0).abs() < 1e-12);
        assert!((lib_vertex(&[L, R, L, R]).unwrap() - 4.0).abs() < 1e-12);
        assert!(lib_vertex(&[]).is_err());
    }

    #[test]
    fn compute_bounds_bitrev8() {
        let r = compute_bounds(&gen_bit_reversal(8).unwrap());
        assert_eq!(r.ib_total, 17);
        assert!((r.lib_total - 24.0).abs() < 1e-9);
    }

    #[test]
    fn compute_bounds_sorted8() {
        let r = compute_bounds(&gen_sorted(8).unwrap());
        assert_eq!(r.ib_total, 7);
        let expected = 2.0 * 5f64.log2() + 4.0 * 3f64.log2() + 8.0;
        assert!((r.lib_total - expected).abs() < 1e-9);
    }

    #[test]
    fn compute_bounds_singleton() {
        let r = compute_bounds(&gen_sorted(1).unwrap());
        assert_eq!(r.ib_total, 0);
        assert_eq!(r.lib_total, 0.0);
        assert!(r.per_vertex.is_empty());
    }

    /// Independent oracle: enumerate vertices, label each naively, count runs
    /// with no shared code with the merge-based path.
    fn oracle_bounds(p: &Permutation) -> (u64, f64) {
        let t = build_tree(p);
        let mut ib = 0u64;
        let mut lib = 0f64;
        for v in t.vertices() {
            let mut keys: Vec<(usize, usize)> =
                (v.lo..v.hi).map(|pos| (p.key_at(pos), pos)).collect();
            keys.sort_unstable();
            let sides: Vec<bool> = keys.iter().map(|&(_, pos)| pos >= v.mid).collect();
            let mut runs = vec![1usize];
            for w in sides.windows(2) {
                if w[0] == w[1] {
                    *runs.last_mut().unwrap() += 1;
                } else {
                    runs.push(1);
                }
            }
            ib += runs.len() as u64 - 1;
            lib += runs.iter().map(|&r| ((r + 1) as f64).log2()).sum::<f64>();
        }
        (ib, lib)
    }

    #[test]
    fn merge_path_matches_oracle_exhaustive_small() {
        fn heap_permutations(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(arr.clone());
                return;
            }
            for i in 0..k {
                heap_permutations(k - 1, arr, out);
                if k.is_multiple_of(2) {
                    arr.swap(i, k - 1);
                } else {
                    arr.swap(0, k - 1);
                }
            }
        }
        for n in 1..=8 {
            let mut arr: Vec<usize> = (0..n).collect();
            let mut all = Vec::new();
            heap_permutations(n, &mut arr, &mut all);
            for e in all {
                let p = Permutation::new(e).unwrap();
                let r = compute_bounds(&p);
                let (ib, lib) = oracle_bounds(&p);
                assert_eq!(r.ib_total, ib, "{p:?}");
                assert!((r.lib_total - lib).abs() < 1e-9, "{p:?}");
            }
        }
    }

    #[test]
    fn per_vertex_matches_label_vertex_route() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..20 {
            let n = 2 + rng.next_below(60);
            let p = gen_random(n, rng.next_u64()).unwrap();
            let t = build_tree(&p);
            let r = compute_bounds(&p);
            for v in &r.per_vertex {
                let labels = label_vertex(&t, &p, v.level, v.index).unwrap();
                assert_eq!(v.ib, ib_vertex(&labels).unwrap());
                assert!((v.lib - lib_vertex(&labels).unwrap()).abs() < 1e-9);
                assert_eq!(v.runs, run_lengths(&labels));
            }
        }
    }

    #[test]
    fn custom_tree_left_path() {
        // Degenerate left path over n=4; IB/LIB still well defined.
        let t = InterleaveTree::from_parens("(((..).).)").unwrap();
        let p = gen_sorted(4).unwrap();
        let r = compute_bounds_with_tree(&p, &t);
        // Every vertex labels L..L R: one switch each.
        assert_eq!(r.ib_total, 3);
    }

    #[test]
    fn csv_round_trip() {
        let r = compute_bounds(&gen_bit_reversal(8).unwrap());
        let csv = r.to_csv();
        let back = BoundReport::from_csv(&csv).unwrap();
        assert_eq!(back.to_csv(), csv);
        assert_eq!(back.ib_total, r.ib_total);
        assert_eq!(back.lib_total, r.lib_total);
        assert_eq!(back.per_vertex.len(), r.per_vertex.len());
    }

    proptest! {
        #[test]
        fn ib_at_most_lib(labels in proptest::collection::vec(prop_oneof![Just(L), Just(R)], 1..64)) {
            let ib = ib_vertex(&labels).unwrap() as f64;
            let lib = lib_vertex(&labels).unwrap();
            prop_assert!(ib <= lib + 1e-12);
        }

        #[test]
        fn reversal_leaves_bounds_unchanged(labels in proptest::collection::vec(prop_oneof![Just(L), Just(R)], 1..64)) {
            let mut rev = labels.clone();
            rev.reverse();
            prop_assert_eq!(ib_vertex(&labels).unwrap(), ib_vertex(&rev).unwrap());
            prop_assert!((lib_vertex(&labels).unwrap() - lib_vertex(&rev).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn totals_are_sums(n in 1usize..128, seed in any::<u64>()) {
            let p = gen_random(n, seed).unwrap();
            let r = compute_bounds(&p);
            let ib: u64 = r.per_vertex.iter().map(|v| v.ib).sum();
            let lib: f64 = r.per_vertex.iter().map(|v| v.lib).sum();
            prop_assert_eq!(r.ib_total, ib);
            prop_assert!((r.lib_total - lib).abs() < 1e-9);
            prop_assert!((r.ib_total as f64) <= r.lib_total + 1e-9);
        }
    }
}
