//! An ordered set of integer keys stored in a 2-3 finger tree, with split and
//! join instrumented by a [`CostMeter`].
//!
//! # Why a 2-3 finger tree
//!
//! The sorting algorithms in [`crate::adaptive_sort`] only rely on a cost
//! contract, not on a particular balancing scheme: `split` and `join` must
//! run in amortized `O(lg(min(|T1|,|T2|)+1))` node visits (worst case
//! `O(lg max)`), and `min`/`max` in amortized `O(1)`. A 2-3 finger tree
//! (Hinze-Paterson shape: digits of 1-4 subtrees at each spine level, spine
//! levels holding progressively deeper 2-3 nodes) delivers exactly this
//! profile:
//!
//! * the spine stores `~3^l` leaves within `l` levels of either end, so
//!   locating a key at distance `d` from the nearer end touches
//!   `O(lg(min(d, n-d)))` levels, which bounds the split cost by the size of
//!   the smaller *result*;
//! * concatenation walks both spines in lockstep until the shallower one is
//!   exhausted, which bounds the join cost by the smaller *input*;
//! * the end digits are available in `O(1)`, giving constant-time `min`,
//!   `max`, and `O(1)`-amortized push/pop at both ends (digits 2-3 are safe,
//!   1 and 4 are dangerous; each overflow/underflow cascade leaves a safe
//!   digit behind, the usual binary-counter potential argument).
//!
//! The meter-based property tests enforce the contract empirically:
//! single-operation worst cases, the split-order independence of total split
//! cost, and the telescoping potential bound.
//!
//! Trees are persistent (`Arc`-shared); instances are cheap to clone and
//! safe to move across threads. Meters are task-local and merged at
//! fork-join boundaries.

use std::fmt;
use std::sync::Arc;

use arrayvec::ArrayVec;

use crate::error::CoreError;

/// Keys are machine integers; duplicates are rejected.
pub type Key = usize;

/// Counts of logical node visits and restructurings.
///
/// Monotonically nondecreasing; mergeable by componentwise addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostMeter {
    /// Node visits and constructions.
    pub accesses: u64,
    /// Number of split operations.
    pub splits: u64,
    /// Number of join operations.
    pub joins: u64,
    /// Key comparisons.
    pub comparisons: u64,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Componentwise addition; used when fork-join tasks merge their
    /// task-local meters.
    pub fn absorb(&mut self, other: &CostMeter) {
        self.accesses += other.accesses;
        self.splits += other.splits;
        self.joins += other.joins;
        self.comparisons += other.comparisons;
    }
}

/// A 2-3 node; leaves carry the keys, branches cache subtree size and
/// maximum key.
#[derive(Debug)]
enum Node {
    Leaf(Key),
    Branch2 {
        size: usize,
        max: Key,
        children: [Arc<Node>; 2],
    },
    Branch3 {
        size: usize,
        max: Key,
        children: [Arc<Node>; 3],
    },
}

impl Node {
    fn size(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Branch2 { size, .. } | Node::Branch3 { size, .. } => *size,
        }
    }

    fn max(&self) -> Key {
        match self {
            Node::Leaf(k) => *k,
            Node::Branch2 { max, .. } | Node::Branch3 { max, .. } => *max,
        }
    }

    fn children(&self) -> &[Arc<Node>] {
        match self {
            Node::Leaf(_) => &[],
            Node::Branch2 { children, .. } => children,
            Node::Branch3 { children, .. } => children,
        }
    }
}

fn branch2(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    Arc::new(Node::Branch2 {
        size: a.size() + b.size(),
        max: b.max(),
        children: [a, b],
    })
}

fn branch3(a: Arc<Node>, b: Arc<Node>, c: Arc<Node>) -> Arc<Node> {
    Arc::new(Node::Branch3 {
        size: a.size() + b.size() + c.size(),
        max: c.max(),
        children: [a, b, c],
    })
}

/// 1-4 nodes, ordered left to right.
type Digit = ArrayVec<Arc<Node>, 4>;

fn digit_size(d: &Digit) -> usize {
    d.iter().map(|n| n.size()).sum()
}

#[derive(Debug)]
enum Spine {
    Empty,
    Single(Arc<Node>),
    Deep {
        size: usize,
        front: Digit,
        middle: Arc<Spine>,
        back: Digit,
    },
}

impl Clone for Spine {
    fn clone(&self) -> Self {
        match self {
            Spine::Empty => Spine::Empty,
            Spine::Single(x) => Spine::Single(x.clone()),
            Spine::Deep {
                size,
                front,
                middle,
                back,
            } => Spine::Deep {
                size: *size,
                front: front.clone(),
                middle: middle.clone(),
                back: back.clone(),
            },
        }
    }
}

fn spine_size(s: &Spine) -> usize {
    match s {
        Spine::Empty => 0,
        Spine::Single(x) => x.size(),
        Spine::Deep { size, .. } => *size,
    }
}

fn spine_max(s: &Spine) -> Option<Key> {
    match s {
        Spine::Empty => None,
        Spine::Single(x) => Some(x.max()),
        Spine::Deep { back, .. } => Some(back.last().unwrap().max()),
    }
}

fn deep(front: Digit, middle: Arc<Spine>, back: Digit) -> Spine {
    Spine::Deep {
        size: digit_size(&front) + spine_size(&middle) + digit_size(&back),
        front,
        middle,
        back,
    }
}

/// Mutable per-operation context: the meter plus an optional key log that
/// records the boundary keys the operation compares against (the access
/// trace consumed by the geometry module).
struct Ctx<'a> {
    meter: &'a mut CostMeter,
    log: Option<&'a mut Vec<Key>>,
}

impl Ctx<'_> {
    fn touch(&mut self, n: u64) {
        self.meter.accesses += n;
    }

    fn cmp(&mut self) {
        self.meter.comparisons += 1;
    }

    fn log_key(&mut self, k: Key) {
        if let Some(log) = self.log.as_deref_mut() {
            log.push(k);
        }
    }
}

fn cons(x: Arc<Node>, s: &Spine, ctx: &mut Ctx) -> Spine {
    ctx.touch(1);
    match s {
        Spine::Empty => Spine::Single(x),
        Spine::Single(y) => {
            let mut front = Digit::new();
            front.push(x);
            let mut back = Digit::new();
            back.push(y.clone());
            deep(front, Arc::new(Spine::Empty), back)
        }
        Spine::Deep {
            size,
            front,
            middle,
            back,
        } => {
            if front.len() == 4 {
                let packed = branch3(front[1].clone(), front[2].clone(), front[3].clone());
                let middle2 = cons(packed, middle, ctx);
                let mut front2 = Digit::new();
                front2.push(x.clone());
                front2.push(front[0].clone());
                Spine::Deep {
                    size: size + x.size(),
                    front: front2,
                    middle: Arc::new(middle2),
                    back: back.clone(),
                }
            } else {
                let mut front2 = Digit::new();
                front2.push(x.clone());
                front2.extend(front.iter().cloned());
                Spine::Deep {
                    size: size + x.size(),
                    front: front2,
                    middle: middle.clone(),
                    back: back.clone(),
                }
            }
        }
    }
}

fn snoc(s: &Spine, x: Arc<Node>, ctx: &mut Ctx) -> Spine {
    ctx.touch(1);
    match s {
        Spine::Empty => Spine::Single(x),
        Spine::Single(y) => {
            let mut front = Digit::new();
            front.push(y.clone());
            let mut back = Digit::new();
            back.push(x);
            deep(front, Arc::new(Spine::Empty), back)
        }
        Spine::Deep {
            size,
            front,
            middle,
            back,
        } => {
            if back.len() == 4 {
                let packed = branch3(back[0].clone(), back[1].clone(), back[2].clone());
                let middle2 = snoc(middle, packed, ctx);
                let mut back2 = Digit::new();
                back2.push(back[3].clone());
                back2.push(x.clone());
                Spine::Deep {
                    size: size + x.size(),
                    front: front.clone(),
                    middle: Arc::new(middle2),
                    back: back2,
                }
            } else {
                let mut back2 = back.clone();
                back2.push(x.clone());
                Spine::Deep {
                    size: size + x.size(),
                    front: front.clone(),
                    middle: middle.clone(),
                    back: back2,
                }
            }
        }
    }
}

fn digit_to_spine(nodes: &[Arc<Node>], ctx: &mut Ctx) -> Spine {
    let mut s = Spine::Empty;
    for n in nodes {
        s = snoc(&s, n.clone(), ctx);
    }
    s
}

fn viewl(s: &Spine, ctx: &mut Ctx) -> Option<(Arc<Node>, Spine)> {
    ctx.touch(1);
    match s {
        Spine::Empty => None,
        Spine::Single(x) => Some((x.clone(), Spine::Empty)),
        Spine::Deep {
            size,
            front,
            middle,
            back,
        } => {
            let x = front[0].clone();
            let rest = if front.len() > 1 {
                let mut front2 = Digit::new();
                front2.extend(front.iter().skip(1).cloned());
                Spine::Deep {
                    size: size - x.size(),
                    front: front2,
                    middle: middle.clone(),
                    back: back.clone(),
                }
            } else {
                match viewl(middle, ctx) {
                    Some((node, m2)) => {
                        let mut front2 = Digit::new();
                        front2.extend(node.children().iter().cloned());
                        deep(front2, Arc::new(m2), back.clone())
                    }
                    None => digit_to_spine(back, ctx),
                }
            };
            Some((x, rest))
        }
    }
}

fn viewr(s: &Spine, ctx: &mut Ctx) -> Option<(Spine, Arc<Node>)> {
    ctx.touch(1);
    match s {
        Spine::Empty => None,
        Spine::Single(x) => Some((Spine::Empty, x.clone())),
        Spine::Deep {
            size,
            front,
            middle,
            back,
        } => {
            let x = back[back.len() - 1].clone();
            let rest = if back.len() > 1 {
                let mut back2 = Digit::new();
                back2.extend(back.iter().take(back.len() - 1).cloned());
                Spine::Deep {
                    size: size - x.size(),
                    front: front.clone(),
                    middle: middle.clone(),
                    back: back2,
                }
            } else {
                match viewr(middle, ctx) {
                    Some((m2, node)) => {
                        let mut back2 = Digit::new();
                        back2.extend(node.children().iter().cloned());
                        deep(front.clone(), Arc::new(m2), back2)
                    }
                    None => digit_to_spine(front, ctx),
                }
            };
            Some((rest, x))
        }
    }
}

/// Rebuild a deep spine whose front digit may have been emptied by a split.
fn deep_l(front: &[Arc<Node>], middle: &Spine, back: &Digit, ctx: &mut Ctx) -> Spine {
    if front.is_empty() {
        match viewl(middle, ctx) {
            Some((node, m2)) => {
                let mut front2 = Digit::new();
                front2.extend(node.children().iter().cloned());
                deep(front2, Arc::new(m2), back.clone())
            }
            None => digit_to_spine(back, ctx),
        }
    } else {
        let mut front2 = Digit::new();
        front2.extend(front.iter().cloned());
        deep(front2, Arc::new(middle.clone()), back.clone())
    }
}

fn deep_r(front: &Digit, middle: &Spine, back: &[Arc<Node>], ctx: &mut Ctx) -> Spine {
    if back.is_empty() {
        match viewr(middle, ctx) {
            Some((m2, node)) => {
                let mut back2 = Digit::new();
                back2.extend(node.children().iter().cloned());
                deep(front.clone(), Arc::new(m2), back2)
            }
            None => digit_to_spine(front, ctx),
        }
    } else {
        let mut back2 = Digit::new();
        back2.extend(back.iter().cloned());
        deep(front.clone(), Arc::new(middle.clone()), back2)
    }
}

/// Regroup 2-12 equal-depth nodes into 2-3 nodes one level deeper.
fn pack_nodes(nodes: Vec<Arc<Node>>, ctx: &mut Ctx) -> Vec<Arc<Node>> {
    debug_assert!(nodes.len() >= 2);
    ctx.touch(nodes.len() as u64);
    let mut out = Vec::new();
    let mut pending: Vec<Arc<Node>> = Vec::with_capacity(3);
    for n in nodes {
        pending.push(n);
        if pending.len() == 3 {
            let c = pending.pop().unwrap();
            let b = pending.pop().unwrap();
            let a = pending.pop().unwrap();
            out.push(branch3(a, b, c));
        }
    }
    match pending.len() {
        0 => {}
        2 => {
            let b = pending.pop().unwrap();
            let a = pending.pop().unwrap();
            out.push(branch2(a, b));
        }
        1 => {
            // Steal from the previous 3-node rather than emit a 1-node group.
            let last = out.pop().expect("at least two nodes packed");
            let kids = last.children();
            debug_assert_eq!(kids.len(), 3);
            out.push(branch2(kids[0].clone(), kids[1].clone()));
            out.push(branch2(kids[2].clone(), pending.pop().unwrap()));
        }
        _ => unreachable!(),
    }
    out
}

fn app3(a: &Spine, extras: Vec<Arc<Node>>, b: &Spine, ctx: &mut Ctx) -> Spine {
    ctx.touch(1);
    match (a, b) {
        (Spine::Empty, _) => {
            let mut t = b.clone();
            for x in extras.into_iter().rev() {
                t = cons(x, &t, ctx);
            }
            t
        }
        (_, Spine::Empty) => {
            let mut t = a.clone();
            for x in extras {
                t = snoc(&t, x, ctx);
            }
            t
        }
        (Spine::Single(x), _) => {
            let mut t = b.clone();
            for e in extras.into_iter().rev() {
                t = cons(e, &t, ctx);
            }
            cons(x.clone(), &t, ctx)
        }
        (_, Spine::Single(y)) => {
            let mut t = a.clone();
            for e in extras {
                t = snoc(&t, e, ctx);
            }
            snoc(&t, y.clone(), ctx)
        }
        (
            Spine::Deep {
                front: f1,
                middle: m1,
                back: b1,
                ..
            },
            Spine::Deep {
                front: f2,
                middle: m2,
                back: b2,
                ..
            },
        ) => {
            let mut mid_nodes: Vec<Arc<Node>> =
                Vec::with_capacity(b1.len() + extras.len() + f2.len());
            mid_nodes.extend(b1.iter().cloned());
            mid_nodes.extend(extras);
            mid_nodes.extend(f2.iter().cloned());
            let packed = pack_nodes(mid_nodes, ctx);
            let middle = app3(m1, packed, m2, ctx);
            deep(f1.clone(), Arc::new(middle), b2.clone())
        }
    }
}

/// What a split is looking for: the first leaf of the right-hand part.
#[derive(Clone, Copy)]
enum SplitTarget {
    /// Left part receives exactly `rank` leaves.
    Rank(usize),
    /// Left part receives the keys strictly below `key`.
    Key(Key),
}

impl SplitTarget {
    /// Does the prefix with `size` leaves and maximum key `max` contain the
    /// first right-hand leaf?
    fn hit(&self, size: usize, max: Key, ctx: &mut Ctx) -> bool {
        match self {
            SplitTarget::Rank(r) => size > *r,
            SplitTarget::Key(k) => {
                ctx.cmp();
                max >= *k
            }
        }
    }
}

/// Locate the node of `nodes` containing the split leaf. Returns the nodes
/// before it, the node itself, and the nodes after it. Skipped node maxima
/// are logged: they are the boundary keys the walk compared against.
fn split_digit(
    nodes: &[Arc<Node>],
    target: SplitTarget,
    mut acc: usize,
    ctx: &mut Ctx,
) -> (Digit, Arc<Node>, Digit) {
    let mut before = Digit::new();
    for (i, n) in nodes.iter().enumerate() {
        ctx.touch(1);
        if target.hit(acc + n.size(), n.max(), ctx) {
            let mut after = Digit::new();
            after.extend(nodes[i + 1..].iter().cloned());
            return (before, n.clone(), after);
        }
        acc += n.size();
        before.push(n.clone());
    }
    unreachable!("caller guarantees the split point is inside the digit");
}

/// Split `s` around the leaf the target selects, descending node chains on
/// the way back up. `acc` is the leaf count consumed to the left of `s`.
/// Requires the split point to be inside `s`.
fn split_spine(
    s: &Spine,
    target: SplitTarget,
    acc: usize,
    ctx: &mut Ctx,
) -> (Spine, Arc<Node>, Spine) {
    ctx.touch(1);
    match s {
        Spine::Empty => unreachable!("split point inside an empty spine"),
        Spine::Single(x) => (Spine::Empty, x.clone(), Spine::Empty),
        Spine::Deep {
            front,
            middle,
            back,
            ..
        } => {
            let front_end = acc + digit_size(front);
            if target.hit(front_end, front.last().unwrap().max(), ctx) {
                let (before, x, after) = split_digit(front, target, acc, ctx);
                return (
                    digit_to_spine(&before, ctx),
                    x,
                    deep_l(&after, middle, back, ctx),
                );
            }
            let mid_end = front_end + spine_size(middle);
            let in_middle = match spine_max(middle) {
                Some(max) => target.hit(mid_end, max, ctx),
                None => false,
            };
            if in_middle {
                let (ml, node, mr) = split_spine(middle, target, front_end, ctx);
                let (before, x, after) =
                    split_digit(node.children(), target, front_end + spine_size(&ml), ctx);
                return (
                    deep_r(front, &ml, &before, ctx),
                    x,
                    deep_l(&after, &mr, back, ctx),
                );
            }
            let (before, x, after) = split_digit(back, target, mid_end, ctx);
            (
                deep_r(front, middle, &before, ctx),
                x,
                digit_to_spine(&after, ctx),
            )
        }
    }
}

fn leftmost(n: &Node, ctx: &mut Ctx) -> Key {
    ctx.touch(1);
    match n {
        Node::Leaf(k) => *k,
        _ => leftmost(&n.children()[0], ctx),
    }
}

fn node_select(n: &Node, rank: usize, ctx: &mut Ctx) -> Key {
    ctx.touch(1);
    match n {
        Node::Leaf(k) => *k,
        _ => {
            let mut r = rank;
            for c in n.children() {
                if r < c.size() {
                    return node_select(c, r, ctx);
                }
                r -= c.size();
            }
            unreachable!("rank within node size");
        }
    }
}

fn spine_select(s: &Spine, rank: usize, ctx: &mut Ctx) -> Key {
    ctx.touch(1);
    match s {
        Spine::Empty => unreachable!("rank within spine size"),
        Spine::Single(x) => node_select(x, rank, ctx),
        Spine::Deep {
            front,
            middle,
            back,
            ..
        } => {
            let mut r = rank;
            for n in front {
                if r < n.size() {
                    return node_select(n, r, ctx);
                }
                r -= n.size();
            }
            let msize = spine_size(middle);
            if r < msize {
                return spine_select(middle, r, ctx);
            }
            r -= msize;
            for n in back {
                if r < n.size() {
                    return node_select(n, r, ctx);
                }
                r -= n.size();
            }
            unreachable!("rank within spine size");
        }
    }
}

fn collect(n: &Node, out: &mut Vec<Key>) {
    match n {
        Node::Leaf(k) => out.push(*k),
        _ => {
            for c in n.children() {
                collect(c, out);
            }
        }
    }
}

fn collect_spine(s: &Spine, out: &mut Vec<Key>) {
    match s {
        Spine::Empty => {}
        Spine::Single(x) => collect(x, out),
        Spine::Deep {
            front,
            middle,
            back,
            ..
        } => {
            for n in front {
                collect(n, out);
            }
            collect_spine(middle, out);
            for n in back {
                collect(n, out);
            }
        }
    }
}

/// An ordered set of distinct integer keys with end-biased access costs.
#[derive(Clone)]
pub struct FingerTree {
    root: Spine,
}

impl Default for FingerTree {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for FingerTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_vec()).finish()
    }
}

impl PartialEq for FingerTree {
    fn eq(&self, other: &Self) -> bool {
        self.to_vec() == other.to_vec()
    }
}

impl Eq for FingerTree {}

impl FingerTree {
    pub fn new() -> Self {
        Self { root: Spine::Empty }
    }

    pub fn singleton(key: Key, meter: &mut CostMeter) -> Self {
        meter.accesses += 1;
        Self {
            root: Spine::Single(Arc::new(Node::Leaf(key))),
        }
    }

    /// Builds a tree from a strictly increasing key sequence in `O(|keys|)`.
    pub fn build(keys: &[Key], meter: &mut CostMeter) -> Result<Self, CoreError> {
        let mut ctx = Ctx { meter, log: None };
        let mut root = Spine::Empty;
        let mut prev: Option<Key> = None;
        for &k in keys {
            if let Some(p) = prev {
                if p >= k {
                    return Err(CoreError::UnsortedKeys { prev: p, next: k });
                }
            }
            prev = Some(k);
            root = snoc(&root, Arc::new(Node::Leaf(k)), &mut ctx);
        }
        Ok(Self { root })
    }

    pub fn len(&self) -> usize {
        spine_size(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest key; `O(1)` at the top level (the front digit holds leaves).
    pub fn min(&self, meter: &mut CostMeter) -> Option<Key> {
        let mut ctx = Ctx { meter, log: None };
        match &self.root {
            Spine::Empty => None,
            Spine::Single(x) => Some(leftmost(x, &mut ctx)),
            Spine::Deep { front, .. } => Some(leftmost(&front[0], &mut ctx)),
        }
    }

    /// Largest key; `O(1)` at the top level.
    pub fn max(&self, meter: &mut CostMeter) -> Option<Key> {
        meter.accesses += 1;
        spine_max(&self.root)
    }

    /// Key with `rank` keys below it, or `None` when out of range.
    pub fn select(&self, rank: usize, meter: &mut CostMeter) -> Option<Key> {
        if rank >= self.len() {
            return None;
        }
        let mut ctx = Ctx { meter, log: None };
        Some(spine_select(&self.root, rank, &mut ctx))
    }

    /// Partition into `(keys < k, keys >= k)`.
    pub fn split(&self, k: Key, meter: &mut CostMeter) -> (FingerTree, FingerTree) {
        self.split_impl(SplitTarget::Key(k), meter, None)
    }

    /// [`FingerTree::split`] that also appends the boundary keys the walk
    /// visited to `log`.
    pub fn split_logged(
        &self,
        k: Key,
        meter: &mut CostMeter,
        log: &mut Vec<Key>,
    ) -> (FingerTree, FingerTree) {
        self.split_impl(SplitTarget::Key(k), meter, Some(log))
    }

    /// Partition into `(first rank keys, rest)`.
    pub fn split_at_rank(&self, rank: usize, meter: &mut CostMeter) -> (FingerTree, FingerTree) {
        self.split_impl(SplitTarget::Rank(rank), meter, None)
    }

    fn split_impl(
        &self,
        target: SplitTarget,
        meter: &mut CostMeter,
        log: Option<&mut Vec<Key>>,
    ) -> (FingerTree, FingerTree) {
        meter.splits += 1;
        let mut ctx = Ctx { meter, log };
        if self.is_empty() {
            return (FingerTree::new(), FingerTree::new());
        }
        let total = spine_size(&self.root);
        let max = spine_max(&self.root).unwrap();
        if !target.hit(total, max, &mut ctx) {
            return (self.clone(), FingerTree::new());
        }
        let (left, x, right) = split_spine(&self.root, target, 0, &mut ctx);
        ctx.log_key(x.max());
        if let Some(m) = spine_max(&left) {
            ctx.log_key(m);
        }
        let right = cons(x, &right, &mut ctx);
        (FingerTree { root: left }, FingerTree { root: right })
    }

    /// Concatenation; all keys of `left` must precede all keys of `right`.
    pub fn join(
        left: FingerTree,
        right: FingerTree,
        meter: &mut CostMeter,
    ) -> Result<FingerTree, CoreError> {
        Self::join_impl(left, right, meter, None)
    }

    /// [`FingerTree::join`] that logs the boundary keys merged at the seam.
    pub fn join_logged(
        left: FingerTree,
        right: FingerTree,
        meter: &mut CostMeter,
        log: &mut Vec<Key>,
    ) -> Result<FingerTree, CoreError> {
        Self::join_impl(left, right, meter, Some(log))
    }

    fn join_impl(
        left: FingerTree,
        right: FingerTree,
        meter: &mut CostMeter,
        log: Option<&mut Vec<Key>>,
    ) -> Result<FingerTree, CoreError> {
        meter.joins += 1;
        if left.is_empty() {
            meter.accesses += 1;
            return Ok(right);
        }
        if right.is_empty() {
            meter.accesses += 1;
            return Ok(left);
        }
        let lmax = spine_max(&left.root).unwrap();
        let rmin = right.min(meter).unwrap();
        meter.comparisons += 1;
        if lmax >= rmin {
            return Err(CoreError::KeyOrderOverlap {
                left_max: lmax,
                right_min: rmin,
            });
        }
        let mut ctx = Ctx { meter, log };
        // The seam keys are the only keys a concatenation inspects.
        ctx.log_key(lmax);
        ctx.log_key(rmin);
        let root = app3(&left.root, Vec::new(), &right.root, &mut ctx);
        Ok(FingerTree { root })
    }

    /// In-order key sequence.
    pub fn to_vec(&self) -> Vec<Key> {
        let mut out = Vec::with_capacity(self.len());
        collect_spine(&self.root, &mut out);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Key> {
        self.to_vec().into_iter()
    }

    /// Checks every structural invariant: digit widths, uniform node depth
    /// per spine level, cached sizes and maxima, and global key order.
    /// Intended for tests and debugging.
    pub fn validate(&self) -> Result<(), String> {
        fn check_node(n: &Node, depth: usize) -> Result<(usize, Key, Key), String> {
            match n {
                Node::Leaf(k) => {
                    if depth != 0 {
                        return Err(format!("leaf at depth {depth}"));
                    }
                    Ok((1, *k, *k))
                }
                Node::Branch2 { size, max, .. } | Node::Branch3 { size, max, .. } => {
                    if depth == 0 {
                        return Err("branch at leaf depth".into());
                    }
                    let mut total = 0;
                    let mut lo = None;
                    let mut hi: Option<Key> = None;
                    for c in n.children() {
                        let (s, cl, ch) = check_node(c, depth - 1)?;
                        if let Some(h) = hi {
                            if h >= cl {
                                return Err(format!("keys not increasing: {h} then {cl}"));
                            }
                        }
                        if lo.is_none() {
                            lo = Some(cl);
                        }
                        hi = Some(ch);
                        total += s;
                    }
                    if total != *size {
                        return Err(format!("cached size {size} != {total}"));
                    }
                    if hi != Some(*max) {
                        return Err(format!("cached max {max} != {hi:?}"));
                    }
                    Ok((total, lo.unwrap(), hi.unwrap()))
                }
            }
        }

        fn check_spine(s: &Spine, level: usize) -> Result<(usize, Option<(Key, Key)>), String> {
            match s {
                Spine::Empty => Ok((0, None)),
                Spine::Single(x) => {
                    let (sz, lo, hi) = check_node(x, level)?;
                    Ok((sz, Some((lo, hi))))
                }
                Spine::Deep {
                    size,
                    front,
                    middle,
                    back,
                } => {
                    if front.is_empty() || back.is_empty() {
                        return Err("empty digit".into());
                    }
                    let mut total = 0;
                    let mut lo = None;
                    let mut hi: Option<Key> = None;
                    let feed = |total: &mut usize,
                                lo: &mut Option<Key>,
                                hi: &mut Option<Key>,
                                sz: usize,
                                l: Key,
                                h: Key|
                     -> Result<(), String> {
                        if let Some(p) = *hi {
                            if p >= l {
                                return Err(format!("keys not increasing: {p} then {l}"));
                            }
                        }
                        if lo.is_none() {
                            *lo = Some(l);
                        }
                        *hi = Some(h);
                        *total += sz;
                        Ok(())
                    };
                    for n in front {
                        let (sz, l, h) = check_node(n, level)?;
                        feed(&mut total, &mut lo, &mut hi, sz, l, h)?;
                    }
                    if let (sz, Some((l, h))) = check_spine(middle, level + 1)? {
                        feed(&mut total, &mut lo, &mut hi, sz, l, h)?;
                    }
                    for n in back {
                        let (sz, l, h) = check_node(n, level)?;
                        feed(&mut total, &mut lo, &mut hi, sz, l, h)?;
                    }
                    if total != *size {
                        return Err(format!("cached spine size {size} != {total}"));
                    }
                    Ok((total, lo.zip(hi)))
                }
            }
        }

        check_spine(&self.root, 0).map(|_| ())
    }
}
