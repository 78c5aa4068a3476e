//! Integer partitions with the `∅` convention used for one-vertex trees.

use std::fmt;

use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// Non-increasing tuple of positive integers. The empty partition stands
/// for `∅`, the root-partition of a single vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Sorts `parts` into non-increasing order. Zero parts are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Invalid("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Block count with the convention `p(∅) = -1`.
    pub fn block_count(&self) -> i64 {
        if self.parts.is_empty() {
            -1
        } else {
            self.parts.len() as i64
        }
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn largest(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `m_j`: number of blocks equal to `j`.
    pub fn multiplicity(&self, j: usize) -> usize {
        self.parts.iter().filter(|&&x| x == j).count()
    }

    /// `p! / prod_j m_j!`, the number of distinct orderings of the blocks.
    pub fn arrangements<C: Coeff>(&self) -> C {
        let mut out = C::one();
        let mut placed = 0usize;
        let mut i = 0;
        while i < self.parts.len() {
            let mut j = i;
            while j < self.parts.len() && self.parts[j] == self.parts[i] {
                j += 1;
            }
            // multiply by binom(placed + run, run)
            for k in 1..=(j - i) {
                out = out * C::from_usize(placed + k) / C::from_usize(k);
            }
            placed += j - i;
            i = j;
        }
        out
    }

    /// `ι(λ) = (λ, 1)`.
    pub fn append_one(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.push(1);
        Partition { parts }
    }

    /// `λ / sum(λ)` as a mass partition; empty for `∅`.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.parts.iter().map(|&x| x as f64 / total).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Calls `visit` on every partition of `total` into exactly `count` parts,
/// each part accepted by `allowed`. `count = 0` yields `∅` iff `total = 0`.
pub fn for_each_partition<F, V>(total: usize, count: usize, allowed: F, mut visit: V)
where
    F: Fn(usize) -> bool,
    V: FnMut(&Partition),
{
    let mut parts = Vec::with_capacity(count);
    rec(total, count, total, &allowed, &mut parts, &mut visit);

    fn rec<F: Fn(usize) -> bool, V: FnMut(&Partition)>(
        remaining: usize,
        slots: usize,
        max_part: usize,
        allowed: &F,
        parts: &mut Vec<usize>,
        visit: &mut V,
    ) {
        if slots == 0 {
            if remaining == 0 {
                visit(&Partition {
                    parts: parts.clone(),
                });
            }
            return;
        }
        // each remaining slot needs at least 1, and at most max_part
        if remaining < slots || remaining > slots * max_part {
            return;
        }
        let hi = max_part.min(remaining - (slots - 1));
        let lo = remaining.div_ceil(slots);
        for part in (lo..=hi).rev() {
            if !allowed(part) {
                continue;
            }
            parts.push(part);
            rec(remaining - part, slots - 1, part, allowed, parts, visit);
            parts.pop();
        }
    }
}

/// All partitions of `total` (any number of parts).
pub fn partitions_of(total: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if total == 0 {
        out.push(Partition::empty());
        return out;
    }
    for count in 1..=total {
        for_each_partition(total, count, |_| true, |p| out.push(p.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ratio, Rational};

    #[test]
    fn partition_counts_match_known_values() {
        // p(n) for n = 1..10
        let known = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &count) in (1..=10).zip(known.iter()) {
            assert_eq!(partitions_of(n).len(), count, "n = {n}");
        }
    }

    #[test]
    fn exact_part_count_enumeration() {
        let mut seen = Vec::new();
        for_each_partition(6, 3, |_| true, |p| seen.push(p.parts().to_vec()));
        assert_eq!(seen, vec![vec![4, 1, 1], vec![3, 2, 1], vec![2, 2, 2]]);
        let mut none = 0;
        for_each_partition(2, 3, |_| true, |_| none += 1);
        assert_eq!(none, 0);
        let mut empty = Vec::new();
        for_each_partition(0, 0, |_| true, |p| empty.push(p.clone()));
        assert_eq!(empty, vec![Partition::empty()]);
    }

    #[test]
    fn arrangements_is_multinomial() {
        let p = Partition::new(vec![2, 1, 1]).unwrap();
        assert_eq!(p.arrangements::<Rational>(), ratio(3, 1));
        let p = Partition::new(vec![1, 1]).unwrap();
        assert_eq!(p.arrangements::<Rational>(), ratio(1, 1));
        let p = Partition::new(vec![3, 2, 2, 1]).unwrap();
        assert_eq!(p.arrangements::<Rational>(), ratio(12, 1));
        assert_eq!(Partition::empty().arrangements::<Rational>(), ratio(1, 1));
    }

    #[test]
    fn empty_convention() {
        assert_eq!(Partition::empty().block_count(), -1);
        assert_eq!(Partition::new(vec![1]).unwrap().block_count(), 1);
        assert_eq!(Partition::new(vec![1, 2]).unwrap().parts(), &[2, 1]);
        assert_eq!(
            Partition::new(vec![2, 1]).unwrap().append_one().parts(),
            &[2, 1, 1]
        );
        assert!(Partition::new(vec![0, 1]).is_err());
    }
}
