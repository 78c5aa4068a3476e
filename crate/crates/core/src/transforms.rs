//! The hat transform of depth-first queues along iterated stopping times,
//! and the life-line coloring with its check tree.

use crate::degree_set::DegreeSet;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::samplers::DegreeSampler;
use crate::tree::{DfsQueue, OrderedTree};

pub use crate::tree::tau_minus_one;

/// A stopping time given as a predicate on finite prefixes: the rule
/// stops at the first `k` for which `stop(&x[..k])` holds. The decision at
/// `k` can only see `x_1..x_k`.
pub trait StoppingRule: Sync {
    fn stop(&self, prefix: &[i64]) -> bool;
}

/// `N' = inf{i : x_i + 1 ∈ A}`. Since `0 ∈ A`, `N' <= tau_{-1}`.
#[derive(Clone, Debug)]
pub struct HittingRule {
    set: DegreeSet,
}

impl HittingRule {
    pub fn new(set: &DegreeSet) -> Result<Self> {
        set.require_zero()?;
        Ok(HittingRule { set: set.clone() })
    }
}

impl StoppingRule for HittingRule {
    fn stop(&self, prefix: &[i64]) -> bool {
        prefix
            .last()
            .is_some_and(|&x| self.set.contains((x + 1) as usize))
    }
}

/// `N' = k` for a fixed `k >= 1`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantRule(pub usize);

impl StoppingRule for ConstantRule {
    fn stop(&self, prefix: &[i64]) -> bool {
        prefix.len() >= self.0.max(1)
    }
}

/// Lazy block sums of an increment stream. Block `i` covers the increments
/// from `N^{i-1} + 1` to `N^i = N^{i-1} + (N' ∧ tau_{-1}) ∘ shift`, and the
/// iterator ends after the block at which the block sums first reach `-1`.
pub struct HatBlocks<I, R> {
    input: I,
    rule: R,
    block: Vec<i64>,
    total: i64,
    done: bool,
    truncated: bool,
    consumed: usize,
}

impl<I: Iterator<Item = i64>, R: StoppingRule> HatBlocks<I, R> {
    pub fn new(input: I, rule: R) -> Self {
        HatBlocks {
            input,
            rule,
            block: Vec::new(),
            total: 0,
            done: false,
            truncated: false,
            consumed: 0,
        }
    }

    /// True when the input ran out inside a block.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Increments read so far.
    pub fn consumed(&self) -> usize {
        self.consumed
    }
}

impl<I: Iterator<Item = i64>, R: StoppingRule> Iterator for HatBlocks<I, R> {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        if self.done {
            return None;
        }
        self.block.clear();
        let mut sum = 0i64;
        loop {
            let Some(x) = self.input.next() else {
                self.truncated = true;
                self.done = true;
                return None;
            };
            self.consumed += 1;
            self.block.push(x);
            sum += x;
            if sum == -1 || self.rule.stop(&self.block) {
                break;
            }
        }
        self.total += sum;
        if self.total == -1 {
            self.done = true;
        }
        Some(sum)
    }
}

/// `x̂`: block sums of `x` along the iterated stopping times of `rule`.
pub fn hat<R: StoppingRule>(x: &DfsQueue, rule: R) -> Result<DfsQueue> {
    let mut blocks = HatBlocks::new(x.as_slice().iter().copied(), rule);
    let out: Vec<i64> = blocks.by_ref().collect();
    if blocks.truncated() {
        return Err(Error::BadQueue("input ended inside a block".into()));
    }
    debug_assert_eq!(blocks.consumed(), x.len());
    DfsQueue::new(out)
}

/// One draw of the hat-offspring `1 + x_1 + ... + x_{N' ∧ tau_{-1}}` for
/// i.i.d. increments `deg - 1` drawn from `sampler`.
pub fn sample_hat_offspring<R: StoppingRule>(
    sampler: &DegreeSampler,
    rule: &R,
    stream: &mut Stream,
) -> usize {
    let increments = std::iter::from_fn(|| Some(sampler.sample(stream) as i64 - 1));
    let first = HatBlocks::new(increments, RuleRef(rule))
        .next()
        .expect("increment stream is infinite");
    (first + 1) as usize
}

struct RuleRef<'a, R>(&'a R);

impl<R: StoppingRule> StoppingRule for RuleRef<'_, R> {
    fn stop(&self, prefix: &[i64]) -> bool {
        self.0.stop(prefix)
    }
}

/// Life-line coloring: the edge from each non-root vertex to its parent
/// carries the index (1-based, depth-first order) of the first leaf whose
/// root path uses it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    colors: Vec<Option<usize>>,
    leaves: usize,
}

impl EdgeColoring {
    /// Color of the edge above `v`; `None` for the root.
    pub fn color_above(&self, v: usize) -> Option<usize> {
        self.colors[v]
    }

    pub fn colors(&self) -> &[Option<usize>] {
        &self.colors
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    /// Checks that edges colored `<= k` span exactly the root paths of
    /// leaves `1..=k`, and that for `j >= 2` exactly one `j`-colored edge
    /// touches an edge of smaller color.
    pub fn verify(&self, tree: &OrderedTree) -> Result<()> {
        let n = tree.len();
        if self.colors.len() != n || (1..n).any(|v| self.colors[v].is_none()) {
            return Err(Error::Invalid("coloring is not total".into()));
        }
        let leaves = tree.leaves();
        let mut spanned = vec![false; n];
        for (k, &leaf) in leaves.iter().enumerate() {
            let mut v = leaf;
            while let Some(p) = tree.parent(v) {
                if spanned[v] {
                    break;
                }
                spanned[v] = true;
                v = p;
            }
            for v in 1..n {
                let colored = self.colors[v].is_some_and(|c| c <= k + 1);
                if colored != spanned[v] {
                    return Err(Error::Invalid(format!(
                        "edges colored <= {} differ from the span",
                        k + 1
                    )));
                }
            }
        }
        let min_at = min_incident_colors(tree, self);
        for j in 2..=self.leaves {
            let touching = (1..n)
                .filter(|&v| self.colors[v] == Some(j))
                .filter(|&v| {
                    let p = tree.parent(v).expect("non-root");
                    min_at[v] < j || min_at[p] < j
                })
                .count();
            if touching != 1 {
                return Err(Error::Invalid(format!(
                    "color {j} touches lower colors on {touching} edges"
                )));
            }
        }
        Ok(())
    }
}

/// Colors edges leaf by leaf in depth-first order.
pub fn color_lifelines(tree: &OrderedTree) -> EdgeColoring {
    let mut colors = vec![None; tree.len()];
    let leaves = tree.leaves();
    for (k, &leaf) in leaves.iter().enumerate() {
        let mut v = leaf;
        while let Some(p) = tree.parent(v) {
            if colors[v].is_some() {
                break;
            }
            colors[v] = Some(k + 1);
            v = p;
        }
    }
    EdgeColoring {
        colors,
        leaves: leaves.len(),
    }
}

/// Smallest color among edges incident to each vertex (`usize::MAX` when
/// there are none).
fn min_incident_colors(tree: &OrderedTree, coloring: &EdgeColoring) -> Vec<usize> {
    let mut min_at = vec![usize::MAX; tree.len()];
    for v in 1..tree.len() {
        let c = coloring.colors[v].expect("total coloring");
        let p = tree.parent(v).expect("non-root");
        min_at[v] = min_at[v].min(c);
        min_at[p] = min_at[p].min(c);
    }
    min_at
}

/// The life-line tree `ť` on the leaves of `t`: color `j >= 2` hangs below
/// the smallest color incident to a vertex that touches a `j`-colored
/// edge, and children are ordered by color.
pub fn check_tree(tree: &OrderedTree) -> Result<OrderedTree> {
    let coloring = color_lifelines(tree);
    let leaves = coloring.leaves;
    let min_at = min_incident_colors(tree, &coloring);
    let mut parent_color = vec![usize::MAX; leaves + 1];
    for v in 1..tree.len() {
        let c = coloring.colors[v].expect("total coloring");
        let p = tree.parent(v).expect("non-root");
        parent_color[c] = parent_color[c].min(min_at[v]).min(min_at[p]);
    }
    let mut children = vec![Vec::new(); leaves];
    for j in 2..=leaves {
        let i = parent_color[j];
        if i >= j {
            return Err(Error::Invalid(format!(
                "color {j} has no smaller neighbour"
            )));
        }
        children[i - 1].push(j - 1);
    }
    OrderedTree::from_children(0, &children)
}
