//! Exact laws of `#_A T`: random-walk (Otter-Dwass) formulas, a direct
//! root-decomposition recursion, the leaf fixed-point iteration, forest
//! formulas, and brute-force enumeration of small trees.

use std::collections::BTreeMap;

use crate::coeff::{parse_rational, Coeff, Rational};
use crate::degree_set::DegreeSet;
use crate::error::{Error, Result};
use crate::offspring::{GfSplit, OffspringDist};
use crate::series::{poly_mul, poly_sub, ProbSeries, RatFn};
use crate::tree::{OrderedTree, UnorderedTreeKey};

/// Largest vertex cap accepted by the enumeration oracle.
pub const ENUM_VERTEX_LIMIT: usize = 15;

/// `P(S_k = m)` for `m` in `lo..=hi`, where `S_k` sums `k` steps `X - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkPmf<C> {
    pub steps: usize,
    pub lo: i64,
    probs: Vec<C>,
}

impl<C: Coeff> WalkPmf<C> {
    pub fn hi(&self) -> i64 {
        self.lo + self.probs.len() as i64 - 1
    }

    /// `P(S_k = m)`; zero outside the window.
    pub fn prob(&self, m: i64) -> C {
        if m < self.lo || m > self.hi() {
            return C::zero();
        }
        self.probs[(m - self.lo) as usize].clone()
    }

    pub fn probs(&self) -> &[C] {
        &self.probs
    }

    /// Total mass inside the window.
    pub fn mass(&self) -> C {
        C::sum_iter(self.probs.iter().cloned())
    }
}

/// Law of `S_k = sum_{i<=k} (X_i - 1)` on the window `lo..=hi`, with `X_i`
/// i.i.d. with law `zeta`, by powering the generating function.
pub fn walk_pmf<C: Coeff>(
    zeta: &OffspringDist<C>,
    k: usize,
    lo: i64,
    hi: i64,
) -> Result<WalkPmf<C>> {
    if hi < lo {
        return Err(Error::Invalid("empty walk window".into()));
    }
    let k_i = k as i64;
    let top = hi + k_i;
    let mut probs = Vec::with_capacity((hi - lo + 1) as usize);
    if top < 0 {
        probs.resize((hi - lo + 1) as usize, C::zero());
        return Ok(WalkPmf {
            steps: k,
            lo,
            probs,
        });
    }
    let order = top as usize;
    let step = ProbSeries::new(zeta.coeffs_upto(order)?, order);
    let power = step.pow(k);
    for m in lo..=hi {
        let idx = m + k_i;
        probs.push(if idx < 0 {
            C::zero()
        } else {
            power.coeff(idx as usize)
        });
    }
    Ok(WalkPmf {
        steps: k,
        lo,
        probs,
    })
}

/// Total-progeny law of a GW tree with offspring law `zeta`:
/// entry `n` is `(1/n) P(S_n = -1) = (1/n) [z^{n-1}] zeta(z)^n`, and entry
/// `0` is zero.
pub fn progeny_pmf<C: Coeff>(zeta: &OffspringDist<C>, max_n: usize) -> Result<Vec<C>> {
    let mut out = vec![C::zero(); max_n + 1];
    if max_n == 0 {
        return Ok(out);
    }
    let order = max_n - 1;
    let step = ProbSeries::new(zeta.coeffs_upto(order)?, order);
    let mut power = step.clone();
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        if n > 1 {
            power = power.mul(&step);
        }
        *slot = power.coeff(n - 1) / C::from_usize(n);
    }
    Ok(out)
}

/// `P(#_A T = n)` for `n <= max_n` through the hat-offspring law and the
/// walk formula.
pub fn count_a_pmf_walk<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    max_n: usize,
) -> Result<Vec<C>> {
    let zeta = xi.derived_dist(set, max_n)?;
    progeny_pmf(&zeta, max_n)
}

/// `P(#_A T = n)` for `n <= max_n`, from the root decomposition
/// `F = z a(F) + u(F)` solved one coefficient at a time.
///
/// With `a = Na / D` and `u = Nu / D` the equation reads
/// `F D(F) - Nu(F) = z Na(F)`. Since `F_0 = 0`, the coefficient of `z^n`
/// involves `F_n` only linearly, with factor `D_0 - Nu_1 = 1 - xi_1 1(1 ∉ A)`.
/// Powers of `F` are maintained incrementally, so the cost is
/// `O(J max_n^2)` for `J` the largest polynomial degree involved.
///
/// On the float backend, entries that are structurally zero are set to
/// exactly zero.
pub fn count_a_pmf<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    max_n: usize,
) -> Result<Vec<C>> {
    let GfSplit { a_num, u_num, den } = xi.split_gf(set)?;
    let nu1 = u_num.get(1).cloned().unwrap_or_else(C::zero);
    let divisor = den[0].sub_ref(&nu1);
    if divisor.is_zero() {
        return Err(Error::NotInvertible);
    }
    let jmax = a_num.len().max(u_num.len()).max(den.len() + 1);
    // pw[j][m] = [z^m] F^j; pw[1] is F itself
    let mut pw: Vec<Vec<C>> = vec![vec![C::zero(); max_n + 1]; jmax + 1];
    for n in 1..=max_n {
        for j in 2..=jmax {
            let v = C::sum_iter(
                (1..n)
                    .filter(|&i| !pw[1][i].is_zero() && !pw[j - 1][n - i].is_zero())
                    .map(|i| pw[1][i].mul_ref(&pw[j - 1][n - i])),
            );
            pw[j][n] = v;
        }
        let mut terms: Vec<C> = Vec::new();
        for (k, c) in a_num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k == 0 {
                if n == 1 {
                    terms.push(c.clone());
                }
            } else {
                terms.push(c.mul_ref(&pw[k][n - 1]));
            }
        }
        for (k, c) in u_num.iter().enumerate().skip(2) {
            if !c.is_zero() {
                terms.push(c.mul_ref(&pw[k][n]));
            }
        }
        for (k, c) in den.iter().enumerate().skip(1) {
            if !c.is_zero() {
                terms.push(-c.mul_ref(&pw[k + 1][n]));
            }
        }
        pw[1][n] = C::sum_iter(terms) / divisor.clone();
    }
    let mut f = std::mem::take(&mut pw[1]);
    if !C::EXACT {
        let reachable = achievable_counts(xi, set, max_n)?;
        for (v, ok) in f.iter_mut().zip(reachable) {
            if !ok {
                *v = C::zero();
            }
        }
    }
    Ok(f)
}

/// Leaf-count law for `A = {0}` by iterating `C <- z theta(C)` from
/// `C = 0`, with `theta = xi_0 / (1 - phi)` and `phi(z) = sum_i xi_{i+1} z^i`.
/// Each iteration fixes one more coefficient, so `max_n` iterations suffice.
pub fn leaf_pmf_fixed_point<C: Coeff>(xi: &OffspringDist<C>, max_n: usize) -> Result<Vec<C>> {
    let gf = xi.gf().ok_or_else(|| {
        Error::Invalid("a truncated law has no closed-form generating function".into())
    })?;
    let xi0 = xi.prob(0);
    let d = gf.den().to_vec();
    // phi = (N - xi_0 D) / (z D), so theta = xi_0 D / (D - (N - xi_0 D) / z)
    let rest = poly_sub(gf.num(), &poly_mul(&d, std::slice::from_ref(&xi0)));
    debug_assert!(rest[0].is_zero());
    let shifted: Vec<C> = if rest.len() > 1 {
        rest[1..].to_vec()
    } else {
        vec![C::zero()]
    };
    let theta = RatFn::new(poly_mul(&d, &[xi0]), poly_sub(&d, &shifted))?;
    let mut c = ProbSeries::zero(max_n);
    for _ in 0..max_n {
        c = theta.compose(&c)?.shift_up(1);
    }
    Ok(c.into_coeffs())
}

/// Probability that a forest of `trees` i.i.d. GW trees has `leaves`
/// leaves in total: `(trees / leaves) P(S_leaves = -trees)` for the walk
/// with step law `zeta = derived_dist(xi, {0})`.
pub fn forest_leaf_pmf<C: Coeff>(xi: &OffspringDist<C>, trees: usize, leaves: usize) -> Result<C> {
    if leaves == 0 {
        return Err(Error::Invalid("leaf count must be at least 1".into()));
    }
    if trees > leaves {
        return Ok(C::zero());
    }
    let zeta = xi.derived_dist(&DegreeSet::leaves(), leaves)?;
    let m = -(trees as i64);
    let walk = walk_pmf(&zeta, leaves, m, m)?;
    Ok(C::from_usize(trees) * walk.prob(m) / C::from_usize(leaves))
}

/// Membership of each degree in the support of the hat-offspring law, up
/// to `order`: `supp(a_A) + <k - 1 : k ∈ supp(xi), k ∉ A>`.
pub fn derived_support<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    order: usize,
) -> Result<Vec<bool>> {
    set.require_zero()?;
    let positive = |k: usize| xi.prob(k).to_f64() > 0.0;
    let mut monoid = vec![false; order + 1];
    monoid[0] = true;
    let gens: Vec<usize> = (2..=order + 1)
        .filter(|&k| !set.contains(k) && positive(k))
        .map(|k| k - 1)
        .collect();
    for m in 1..=order {
        monoid[m] = gens.iter().any(|&g| g <= m && monoid[m - g]);
    }
    let mut out = vec![false; order + 1];
    for a in (0..=order).filter(|&k| set.contains(k) && positive(k)) {
        for m in 0..=order - a {
            if monoid[m] {
                out[a + m] = true;
            }
        }
    }
    Ok(out)
}

/// Whether `P(#_A T = n) > 0`, for `n <= max_n`: `n - 1` must be a sum of
/// positive degrees in the support of the hat-offspring law.
pub fn achievable_counts<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    max_n: usize,
) -> Result<Vec<bool>> {
    let order = max_n.saturating_sub(1);
    let supp = derived_support(xi, set, order)?;
    let gens: Vec<usize> = (1..=order).filter(|&k| supp[k]).collect();
    let mut reach = vec![false; order + 1];
    reach[0] = true;
    for m in 1..=order {
        reach[m] = gens.iter().any(|&g| g <= m && reach[m - g]);
    }
    let mut out = vec![false; max_n + 1];
    out[1..].copy_from_slice(&reach[..max_n]);
    Ok(out)
}

/// Vertex cap under which enumeration of trees with `#_A t = n` is
/// complete: `2n - 1` when `xi_1 = 0` or `1 ∈ A`, and `None` when one-child
/// chains outside `A` make the tree size unbounded.
pub fn complete_vertex_cap<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    n: usize,
) -> Option<usize> {
    if xi.prob(1).is_zero() || set.contains(1) {
        Some((2 * n).saturating_sub(1).max(1))
    } else {
        None
    }
}

/// Result of the enumeration oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration<C> {
    /// Sum of `GW_xi(t)` over enumerated trees with `#_A t = n`.
    pub probability: C,
    /// The same mass split by unordered shape.
    pub by_shape: BTreeMap<UnorderedTreeKey, C>,
    /// Number of ordered trees with positive mass that were enumerated.
    pub trees: usize,
}

impl<C: Coeff> Enumeration<C> {
    /// The conditional law on shapes, normalized by the enumerated mass.
    pub fn conditional(&self) -> Result<BTreeMap<UnorderedTreeKey, C>> {
        if self.probability.is_zero() {
            return Err(Error::ZeroProbability { n: 0 });
        }
        Ok(self
            .by_shape
            .iter()
            .map(|(k, v)| (k.clone(), v.div_ref(&self.probability)))
            .collect())
    }
}

/// Visits every ordered tree with at most `max_vertices` vertices and
/// positive `GW_xi` mass, as a preorder degree sequence with its mass. With
/// `target = Some((A, n))` only trees with `#_A t = n` are visited, and
/// branches that already exceed `n` are pruned.
pub fn for_each_gw_tree<C, F>(
    xi: &OffspringDist<C>,
    target: Option<(&DegreeSet, usize)>,
    max_vertices: usize,
    mut visit: F,
) -> Result<()>
where
    C: Coeff,
    F: FnMut(&[usize], &C),
{
    if max_vertices > ENUM_VERTEX_LIMIT {
        return Err(Error::EnumerationTooLarge {
            cap: max_vertices,
            limit: ENUM_VERTEX_LIMIT,
        });
    }
    if let Some((set, _)) = target {
        set.require_zero()?;
    }
    let probs = xi.coeffs_upto(max_vertices)?;
    let mut state = Walk {
        probs: &probs,
        target,
        cap: max_vertices,
        degrees: Vec::with_capacity(max_vertices),
        masses: vec![C::one()],
    };
    state.rec(1, 0, &mut visit);
    return Ok(());

    struct Walk<'a, C> {
        probs: &'a [C],
        target: Option<(&'a DegreeSet, usize)>,
        cap: usize,
        degrees: Vec<usize>,
        masses: Vec<C>,
    }

    impl<C: Coeff> Walk<'_, C> {
        fn rec<F: FnMut(&[usize], &C)>(&mut self, pending: usize, count: usize, visit: &mut F) {
            if pending == 0 {
                if self.target.is_none_or(|(_, n)| count == n) {
                    visit(
                        &self.degrees,
                        self.masses.last().expect("mass stack is never empty"),
                    );
                }
                return;
            }
            let used = self.degrees.len();
            if used + pending > self.cap {
                return;
            }
            // every pending vertex roots a subtree with at least one leaf
            if let Some((_, n)) = self.target {
                if count + pending > n {
                    return;
                }
            }
            let max_deg = self.cap - used - pending;
            for d in 0..=max_deg {
                if self.probs[d].is_zero() {
                    continue;
                }
                let hit = self.target.is_some_and(|(set, _)| set.contains(d));
                let mass = self
                    .masses
                    .last()
                    .expect("mass stack is never empty")
                    .mul_ref(&self.probs[d]);
                self.degrees.push(d);
                self.masses.push(mass);
                self.rec(pending - 1 + d, count + usize::from(hit), visit);
                self.masses.pop();
                self.degrees.pop();
            }
        }
    }
}

/// Sums `GW_xi(t)` over all ordered trees with at most `max_vertices`
/// vertices and `#_A t = n`, also split by unordered shape.
pub fn enumerate_mass<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    n: usize,
    max_vertices: usize,
) -> Result<Enumeration<C>> {
    let mut probability = C::zero();
    let mut by_shape: BTreeMap<UnorderedTreeKey, C> = BTreeMap::new();
    let mut trees = 0usize;
    for_each_gw_tree(xi, Some((set, n)), max_vertices, |degrees, mass| {
        let key = OrderedTree::from_degrees(degrees)
            .expect("enumerated sequences are trees")
            .canonical_key();
        probability = probability.add_ref(mass);
        let slot = by_shape.entry(key).or_insert_with(C::zero);
        *slot = slot.add_ref(mass);
        trees += 1;
    })?;
    Ok(Enumeration {
        probability,
        by_shape,
        trees,
    })
}

/// Renders an exact table as `p/q` strings.
pub fn render_table(table: &[Rational]) -> Vec<String> {
    table.iter().map(|c| c.render()).collect()
}

/// Parses a table written by [`render_table`].
pub fn parse_table(items: &[String]) -> Result<Vec<Rational>> {
    items.iter().map(|s| parse_rational(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ratio;

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    fn binary() -> OffspringDist<Rational> {
        OffspringDist::binary()
    }

    fn geo() -> OffspringDist<Rational> {
        OffspringDist::geometric(r(1, 2))
    }

    #[test]
    fn walk_examples() {
        assert_eq!(walk_pmf(&geo(), 1, -1, -1).unwrap().prob(-1), r(1, 2));
        assert_eq!(walk_pmf(&geo(), 2, -1, -1).unwrap().prob(-1), r(1, 4));
        assert_eq!(walk_pmf(&geo(), 2, -3, -3).unwrap().prob(-3), r(0, 1));
        let w = walk_pmf(&binary(), 3, -3, 3).unwrap();
        assert_eq!(w.mass(), r(1, 1));
        assert_eq!(w.prob(-3), r(1, 8));
        assert_eq!(w.prob(-2), r(0, 1));
    }

    #[test]
    fn progeny_examples() {
        let p = progeny_pmf(&geo(), 3).unwrap();
        assert_eq!(p[1], r(1, 2));
        assert_eq!(p[2], r(1, 8));
        let d = progeny_pmf(&OffspringDist::<Rational>::dirac_zero(), 4).unwrap();
        assert_eq!(d, vec![r(0, 1), r(1, 1), r(0, 1), r(0, 1), r(0, 1)]);
    }

    #[test]
    fn count_examples() {
        let p = count_a_pmf(&binary(), &DegreeSet::leaves(), 8).unwrap();
        assert_eq!(&p[1..4], &[r(1, 2), r(1, 8), r(1, 16)]);
        assert!(p[1..].iter().all(|c| *c > r(0, 1)));
        let all = count_a_pmf(&binary(), &DegreeSet::all(), 5).unwrap();
        assert_eq!(all[3], r(1, 8));
        assert_eq!(all[2], r(0, 1));
    }

    #[test]
    fn leaf_counts_are_catalan() {
        // P(k leaves) = Catalan(k-1) 2^{-(2k-1)} for the binary law
        let catalan = [1i64, 1, 2, 5, 14, 42, 132, 429];
        let p = count_a_pmf(&binary(), &DegreeSet::leaves(), 8).unwrap();
        for k in 1..=8 {
            assert_eq!(p[k], r(catalan[k - 1], 1 << (2 * k - 1)));
        }
    }

    #[test]
    fn routes_agree() {
        for xi in [binary(), geo()] {
            for set in ["0", "0,1", "0,2", "all"] {
                let set: DegreeSet = set.parse().unwrap();
                let walk = count_a_pmf_walk(&xi, &set, 20).unwrap();
                let direct = count_a_pmf(&xi, &set, 20).unwrap();
                assert_eq!(walk, direct, "set {set}");
            }
            let fixed = leaf_pmf_fixed_point(&xi, 20).unwrap();
            assert_eq!(fixed, count_a_pmf(&xi, &DegreeSet::leaves(), 20).unwrap());
        }
    }

    #[test]
    fn float_route_masks_structural_zeros() {
        let xi = OffspringDist::<f64>::binary();
        let p = count_a_pmf(&xi, &DegreeSet::all(), 41).unwrap();
        assert!(p.iter().step_by(2).all(|&v| v == 0.0));
        let exact = count_a_pmf(&binary(), &DegreeSet::all(), 41).unwrap();
        for (a, b) in p.iter().zip(&exact) {
            assert!((a - b.to_f64()).abs() < 1e-15);
        }
    }

    #[test]
    fn achievable_sets() {
        let odd = achievable_counts(&binary(), &DegreeSet::all(), 7).unwrap();
        assert_eq!(
            odd,
            vec![false, true, false, true, false, true, false, true]
        );
        let leaves = achievable_counts(&binary(), &DegreeSet::leaves(), 5).unwrap();
        assert!(leaves[1..].iter().all(|&b| b));
    }

    #[test]
    fn forest_examples() {
        assert_eq!(forest_leaf_pmf(&binary(), 2, 2).unwrap(), r(1, 4));
        assert_eq!(forest_leaf_pmf(&binary(), 1, 2).unwrap(), r(1, 8));
        assert_eq!(forest_leaf_pmf(&binary(), 3, 2).unwrap(), r(0, 1));
        // one tree reduces to the single-tree law
        let p = count_a_pmf(&binary(), &DegreeSet::leaves(), 6).unwrap();
        for k in 1..=6 {
            assert_eq!(forest_leaf_pmf(&binary(), 1, k).unwrap(), p[k]);
        }
    }

    #[test]
    fn forest_of_two_is_convolution() {
        let p = count_a_pmf(&geo(), &DegreeSet::leaves(), 8).unwrap();
        for k in 2..=8 {
            let conv: Rational = (1..k).map(|i| &p[i] * &p[k - i]).sum();
            assert_eq!(forest_leaf_pmf(&geo(), 2, k).unwrap(), conv);
        }
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_mass(&binary(), &DegreeSet::leaves(), 2, 5).unwrap();
        assert_eq!(e.probability, r(1, 8));
        assert_eq!(e.by_shape.len(), 1);
        assert_eq!(
            enumerate_mass(&binary(), &DegreeSet::all(), 3, 3)
                .unwrap()
                .probability,
            r(1, 8)
        );
        assert_eq!(
            enumerate_mass(&geo(), &DegreeSet::leaves(), 1, 1)
                .unwrap()
                .probability,
            r(1, 2)
        );
        assert!(matches!(
            enumerate_mass(&binary(), &DegreeSet::leaves(), 2, 16),
            Err(Error::EnumerationTooLarge { .. })
        ));
        let three = enumerate_mass(&binary(), &DegreeSet::leaves(), 3, 5).unwrap();
        assert_eq!(three.by_shape.len(), 1);
        assert_eq!(three.trees, 2);
    }

    #[test]
    fn table_round_trip() {
        let t = count_a_pmf(&binary(), &DegreeSet::leaves(), 6).unwrap();
        let s = render_table(&t);
        assert_eq!(s[3], "1/16");
        assert_eq!(parse_table(&s).unwrap(), t);
    }
}
