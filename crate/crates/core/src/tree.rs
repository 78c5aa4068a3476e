//! Rooted ordered trees, their depth-first-queue encoding, and the
//! tree statistics used throughout the crate.
//!
//! Vertices are labelled `0..n` in depth-first (preorder) order with the
//! root at `0`, so every child has a larger label than its parent. Most
//! bottom-up computations therefore run as a single reverse sweep.

use std::fmt;
use std::str::FromStr;

use crate::degree_set::DegreeSet;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// A rooted ordered (plane) tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedTree {
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl OrderedTree {
    /// The one-vertex tree.
    pub fn single() -> Self {
        OrderedTree {
            children: vec![Vec::new()],
            parent: vec![None],
        }
    }

    /// Builds the tree whose preorder out-degree sequence is `degrees`.
    pub fn from_degrees(degrees: &[usize]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::BadQueue("empty degree sequence".into()));
        }
        let n = degrees.len();
        let mut children = vec![Vec::new(); n];
        let mut parent = vec![None; n];
        // stack of vertices still waiting for children
        let mut open: Vec<(usize, usize)> = Vec::new();
        for (v, &d) in degrees.iter().enumerate() {
            if v > 0 {
                let Some(top) = open.last_mut() else {
                    return Err(Error::BadQueue(
                        "sequence continues after the tree is complete".into(),
                    ));
                };
                let p = top.0;
                top.1 -= 1;
                if top.1 == 0 {
                    open.pop();
                }
                children[p].push(v);
                parent[v] = Some(p);
            }
            if d > 0 {
                open.push((v, d));
            }
        }
        if !open.is_empty() {
            return Err(Error::BadQueue(
                "sequence ends before the tree is complete".into(),
            ));
        }
        Ok(OrderedTree { children, parent })
    }

    /// Builds a tree from arbitrary vertex labels and ordered child lists,
    /// relabelling vertices in depth-first order.
    pub fn from_children(root: usize, children: &[Vec<usize>]) -> Result<Self> {
        let n = children.len();
        if root >= n {
            return Err(Error::Invalid("root out of range".into()));
        }
        let mut seen = vec![false; n];
        let mut degrees = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if seen[v] {
                return Err(Error::Invalid(
                    "child lists contain a cycle or shared child".into(),
                ));
            }
            seen[v] = true;
            degrees.push(children[v].len());
            for &c in children[v].iter().rev() {
                if c >= n {
                    return Err(Error::Invalid("child label out of range".into()));
                }
                stack.push(c);
            }
        }
        if degrees.len() != n {
            return Err(Error::Invalid(
                "child lists do not describe a connected tree".into(),
            ));
        }
        Self::from_degrees(&degrees)
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    /// Preorder out-degree sequence.
    pub fn degrees(&self) -> Vec<usize> {
        self.children.iter().map(Vec::len).collect()
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.children[v].is_empty())
            .collect()
    }

    /// Depth-first queue increments `deg(v_k) - 1`.
    pub fn encode(&self) -> DfsQueue {
        DfsQueue(self.children.iter().map(|c| c.len() as i64 - 1).collect())
    }

    /// `#_A t`: number of vertices whose out-degree lies in `A`.
    pub fn count_in(&self, set: &DegreeSet) -> Result<usize> {
        set.require_zero()?;
        Ok(self
            .children
            .iter()
            .filter(|c| set.contains(c.len()))
            .count())
    }

    /// `#_A` of the subtree rooted at each vertex.
    pub fn subtree_counts(&self, set: &DegreeSet) -> Vec<usize> {
        let mut counts = vec![0usize; self.len()];
        for v in (0..self.len()).rev() {
            let own = usize::from(set.contains(self.degree(v)));
            counts[v] = own + self.children[v].iter().map(|&c| counts[c]).sum::<usize>();
        }
        counts
    }

    /// Partition formed by `#_A` of the root subtrees; `∅` for a single
    /// vertex. Its parts sum to `#_A t - 1(deg root ∈ A)`.
    pub fn root_partition(&self, set: &DegreeSet) -> Result<Partition> {
        set.require_zero()?;
        let counts = self.subtree_counts(set);
        Partition::new(self.children[0].iter().map(|&c| counts[c]).collect())
    }

    /// Canonical key of the underlying unordered tree.
    pub fn canonical_key(&self) -> UnorderedTreeKey {
        let mut keys: Vec<Vec<u8>> = vec![Vec::new(); self.len()];
        for v in (0..self.len()).rev() {
            let mut kids: Vec<Vec<u8>> = self.children[v]
                .iter()
                .map(|&c| std::mem::take(&mut keys[c]))
                .collect();
            kids.sort_unstable();
            let mut k = Vec::with_capacity(2 + kids.iter().map(Vec::len).sum::<usize>());
            k.push(b'(');
            for kid in kids {
                k.extend_from_slice(&kid);
            }
            k.push(b')');
            keys[v] = k;
        }
        UnorderedTreeKey(std::mem::take(&mut keys[0]))
    }

    /// `t°`: attaches one new leaf, last in child order, to every non-leaf
    /// vertex whose out-degree is in `A`.
    pub fn star_augment(&self, set: &DegreeSet) -> Result<OrderedTree> {
        set.require_zero()?;
        let mut children = self.children.clone();
        for v in 0..self.len() {
            let d = self.degree(v);
            if d > 0 && set.contains(d) {
                let leaf = children.len();
                children.push(Vec::new());
                children[v].push(leaf);
            }
        }
        Self::from_children(0, &children)
    }

    /// Edge distance of each vertex from the root.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.len()];
        for v in 1..self.len() {
            depth[v] = depth[self.parent[v].expect("non-root has a parent")] + 1;
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }
}

impl fmt::Display for OrderedTree {
    /// Nested parentheses: `()` is a single vertex, `(()())` a cherry.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::with_capacity(2 * self.len());
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        out.push('(');
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if next < self.children[v].len() {
                top.1 += 1;
                out.push('(');
                stack.push((self.children[v][next], 0));
            } else {
                out.push(')');
                stack.pop();
            }
        }
        f.write_str(&out)
    }
}

impl FromStr for OrderedTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let bad = || Error::BadTreeText(s.to_string());
        let mut degrees: Vec<usize> = Vec::new();
        let mut open: Vec<usize> = Vec::new();
        let mut closed_root = false;
        for ch in text.chars() {
            if closed_root {
                return Err(bad());
            }
            match ch {
                '(' => {
                    if let Some(&p) = open.last() {
                        degrees[p] += 1;
                    }
                    open.push(degrees.len());
                    degrees.push(0);
                }
                ')' => {
                    open.pop().ok_or_else(bad)?;
                    if open.is_empty() {
                        closed_root = true;
                    }
                }
                c if c.is_whitespace() => {}
                _ => return Err(bad()),
            }
        }
        if !closed_root {
            return Err(bad());
        }
        Self::from_degrees(&degrees)
    }
}

/// Canonical byte string of a rooted unordered tree: the parenthesis form
/// of the ordering in which every vertex's children are sorted by their own
/// keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnorderedTreeKey(Vec<u8>);

impl UnorderedTreeKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// The canonical ordered representative.
    pub fn to_tree(&self) -> OrderedTree {
        std::str::from_utf8(&self.0)
            .expect("keys are ASCII")
            .parse()
            .expect("keys are valid tree text")
    }

    pub fn vertex_count(&self) -> usize {
        self.0.len() / 2
    }
}

impl fmt::Display for UnorderedTreeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(&self.0).expect("keys are ASCII"))
    }
}

/// Excursion increments `(x_1, ..., x_L)` with `x_i >= -1`, nonnegative
/// partial sums before `L` and partial sum `-1` at `L = τ_{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DfsQueue(Vec<i64>);

impl DfsQueue {
    /// Validates `x`. Zeros after `τ_{-1}` are dropped; anything else after
    /// it is rejected.
    pub fn new(x: Vec<i64>) -> Result<Self> {
        let Some(end) = tau_minus_one(&x) else {
            if let Some(i) = x.iter().position(|&v| v < -1) {
                return Err(Error::BadQueue(format!("entry {} is below -1", i + 1)));
            }
            return Err(Error::BadQueue("partial sums never reach -1".into()));
        };
        if let Some(i) = x[..end].iter().position(|&v| v < -1) {
            return Err(Error::BadQueue(format!("entry {} is below -1", i + 1)));
        }
        if x[end..].iter().any(|&v| v != 0) {
            return Err(Error::BadQueue(format!(
                "partial sums hit -1 early, at index {end}"
            )));
        }
        let mut x = x;
        x.truncate(end);
        Ok(DfsQueue(x))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// `τ_{-1}`, which is also the vertex count of the encoded tree.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of entries with `x_i + 1 ∈ A`; membership in `D^A_n` means
    /// this equals `n`.
    pub fn count_hits(&self, set: &DegreeSet) -> usize {
        self.0
            .iter()
            .filter(|&&x| set.contains((x + 1) as usize))
            .count()
    }

    pub fn decode(&self) -> OrderedTree {
        let degrees: Vec<usize> = self.0.iter().map(|&x| (x + 1) as usize).collect();
        OrderedTree::from_degrees(&degrees).expect("validated queue encodes a tree")
    }
}

/// First index (1-based) at which the partial sums of `x` equal `-1`.
pub fn tau_minus_one(x: &[i64]) -> Option<usize> {
    let mut s = 0i64;
    for (i, &v) in x.iter().enumerate() {
        s += v;
        if s == -1 {
            return Some(i + 1);
        }
    }
    None
}

impl fmt::Display for DfsQueue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DfsQueue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::BadQueue(format!("bad integer {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

/// Calls `visit` on every ordered tree with at most `max_vertices` vertices,
/// as a preorder degree sequence. Trees are produced in lexicographic order
/// of their depth-first queues.
pub fn for_each_tree<F: FnMut(&[usize])>(max_vertices: usize, mut visit: F) {
    let mut degrees = Vec::with_capacity(max_vertices);
    rec(1, max_vertices, &mut degrees, &mut visit);

    fn rec<F: FnMut(&[usize])>(
        pending: usize,
        cap: usize,
        degrees: &mut Vec<usize>,
        visit: &mut F,
    ) {
        if pending == 0 {
            visit(degrees);
            return;
        }
        let used = degrees.len();
        // this vertex plus the other pending ones must fit
        if used + pending > cap {
            return;
        }
        let max_deg = cap - used - pending;
        for d in 0..=max_deg {
            degrees.push(d);
            rec(pending - 1 + d, cap, degrees, visit);
            degrees.pop();
        }
    }
}
