//! Samplers for unconditioned GW trees, GW trees conditioned on `#_A = n`,
//! and Markov branching trees built from a family of root-partition laws.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use crate::coeff::Coeff;
use crate::degree_set::DegreeSet;
use crate::error::{Error, Result};
use crate::exact::{complete_vertex_cap, count_a_pmf};
use crate::offspring::OffspringDist;
use crate::partition::{for_each_partition, Partition};
use crate::rng::Stream;
use crate::tree::OrderedTree;

/// Relative root-degree mass that the precomputed `tau` rows must cover
/// for laws with unbounded support.
const ROW_COVERAGE: f64 = 1e-12;

/// Draws out-degrees from an offspring law.
#[derive(Clone, Debug)]
pub struct DegreeSampler {
    kind: DegreeKind,
}

#[derive(Clone, Debug)]
enum DegreeKind {
    /// Cumulative masses of a finitely supported law.
    Table(Vec<f64>),
    /// `p_k = p q^k`, stored as `ln q`; `None` when `q = 0`.
    Geometric(Option<f64>),
}

impl DegreeSampler {
    pub fn new<C: Coeff>(xi: &OffspringDist<C>) -> Result<Self> {
        if let Some(p) = xi.geometric_param() {
            let q = 1.0 - p.to_f64();
            let kind = DegreeKind::Geometric(if q > 0.0 { Some(q.ln()) } else { None });
            return Ok(DegreeSampler { kind });
        }
        let max = xi
            .support_max()
            .ok_or_else(|| Error::Invalid("cannot sample a truncated law".into()))?;
        let mut acc = 0.0;
        let cdf = (0..=max)
            .map(|k| {
                acc += xi.prob(k).to_f64();
                acc
            })
            .collect();
        Ok(DegreeSampler {
            kind: DegreeKind::Table(cdf),
        })
    }

    pub fn sample(&self, stream: &mut Stream) -> usize {
        let u = stream.uniform();
        match &self.kind {
            DegreeKind::Table(cdf) => {
                let k = cdf.partition_point(|&c| c <= u);
                // rounding can leave the last cumulative mass just below 1
                k.min(cdf.len() - 1)
            }
            DegreeKind::Geometric(None) => 0,
            DegreeKind::Geometric(Some(log_q)) => ((1.0 - u).ln() / log_q).floor() as usize,
        }
    }
}

/// A GW tree that reached the vertex cap before completing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow {
    pub cap: usize,
}

/// Preorder degree sequence of a GW tree, or [`Overflow`] when the tree
/// has more than `cap` vertices.
pub fn sample_gw_degrees(
    sampler: &DegreeSampler,
    stream: &mut Stream,
    cap: usize,
) -> std::result::Result<Vec<usize>, Overflow> {
    let mut degrees = Vec::new();
    let mut pending = 1usize;
    while pending > 0 {
        if degrees.len() == cap {
            return Err(Overflow { cap });
        }
        let d = sampler.sample(stream);
        degrees.push(d);
        pending = pending - 1 + d;
    }
    Ok(degrees)
}

/// A GW tree with law exactly `GW_xi` on trees with at most `cap` vertices.
pub fn sample_gw(
    sampler: &DegreeSampler,
    stream: &mut Stream,
    cap: usize,
) -> std::result::Result<OrderedTree, Overflow> {
    let degrees = sample_gw_degrees(sampler, stream, cap)?;
    Ok(OrderedTree::from_degrees(&degrees).expect("GW degree sequences encode trees"))
}

/// Resamples GW trees with at most `cap` vertices until `#_A t = n`. The
/// cap defaults to the complete bound `2n - 1` when it exists and to `64n`
/// otherwise, in which case the law is only approximately conditioned.
pub fn sample_conditioned_rejection<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    n: usize,
    stream: &mut Stream,
    tries: u64,
    cap: Option<usize>,
) -> Result<OrderedTree> {
    set.require_zero()?;
    let sampler = DegreeSampler::new(xi)?;
    let cap = cap
        .or_else(|| complete_vertex_cap(xi, set, n))
        .unwrap_or(64 * n);
    for _ in 0..tries {
        if let Ok(degrees) = sample_gw_degrees(&sampler, stream, cap) {
            if degrees.iter().filter(|&&d| set.contains(d)).count() == n {
                return Ok(
                    OrderedTree::from_degrees(&degrees).expect("GW degree sequences encode trees")
                );
            }
        }
    }
    Err(Error::BudgetExhausted { tries })
}

/// Tables for sampling `T^A_m` exactly, for every `m <= n`.
///
/// `tau_r[s]` is the law of the sum of `r` independent copies of `#_A T`,
/// truncated at `n`. Rows are cached up to the largest root degree that
/// matters (`support_max` for finite laws, otherwise enough rows to cover
/// all but a `1e-12` fraction of the root-degree law at `n`); higher rows are
/// recomputed on demand.
#[derive(Clone, Debug)]
pub struct SamplerTables<C> {
    xi: OffspringDist<C>,
    set: DegreeSet,
    n: usize,
    xi_probs: Vec<C>,
    pmf: Vec<C>,
    rows: Vec<Vec<C>>,
}

impl<C: Coeff> SamplerTables<C> {
    pub fn new(xi: &OffspringDist<C>, set: &DegreeSet, n: usize) -> Result<Self> {
        xi.validate()?;
        set.require_zero()?;
        if n == 0 {
            return Err(Error::ZeroProbability { n });
        }
        let pmf = count_a_pmf(xi, set, n)?;
        Self::from_pmf(xi, set, pmf)
    }

    /// Builds tables from a precomputed `P(#_A T = m)`, `m = 0..=n`.
    pub fn from_pmf(xi: &OffspringDist<C>, set: &DegreeSet, pmf: Vec<C>) -> Result<Self> {
        let n = pmf.len().saturating_sub(1);
        if n == 0 || pmf[n].is_zero() {
            return Err(Error::ZeroProbability { n });
        }
        let xi_probs = xi.coeffs_upto(n)?;
        let mut delta = vec![C::zero(); n + 1];
        delta[0] = C::one();
        let mut tables = SamplerTables {
            xi: xi.clone(),
            set: set.clone(),
            n,
            xi_probs,
            pmf,
            rows: vec![delta],
        };
        let r_max = xi.support_max().map_or(n, |s| s.min(n));
        let total = tables.pmf[n].to_f64();
        let mut covered = 0.0;
        for r in 0..=r_max {
            if r > 0 {
                let next = convolve(&tables.rows[r - 1], &tables.pmf);
                tables.rows.push(next);
            }
            covered += tables.root_weight(n, r, &tables.rows[r]).to_f64();
            if xi.support_max().is_none() && covered >= total * (1.0 - ROW_COVERAGE) {
                break;
            }
        }
        Ok(tables)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&self) -> &DegreeSet {
        &self.set
    }

    pub fn xi(&self) -> &OffspringDist<C> {
        &self.xi
    }

    /// `P(#_A T = m)` for `m = 0..=n`.
    pub fn pmf(&self) -> &[C] {
        &self.pmf
    }

    pub fn xi_prob(&self, p: usize) -> C {
        self.xi_probs.get(p).cloned().unwrap_or_else(C::zero)
    }

    /// Number of cached `tau` rows.
    pub fn cached_rows(&self) -> usize {
        self.rows.len()
    }

    /// `tau_r`, cached or freshly computed.
    pub fn row(&self, r: usize) -> Cow<'_, [C]> {
        if r < self.rows.len() {
            return Cow::Borrowed(&self.rows[r]);
        }
        let mut row = self.rows.last().expect("row 0 is always cached").clone();
        for _ in self.rows.len()..=r {
            row = convolve(&row, &self.pmf);
        }
        Cow::Owned(row)
    }

    /// Remaining `#_A` mass for the subtrees of a root of degree `p` in
    /// `T^A_m`, or `None` when it would be negative.
    pub fn child_total(&self, m: usize, p: usize) -> Option<usize> {
        m.checked_sub(usize::from(self.set.contains(p)))
    }

    /// `xi(p) tau_p[m - 1(p ∈ A)]`, unnormalized.
    fn root_weight(&self, m: usize, p: usize, row_p: &[C]) -> C {
        match self.child_total(m, p) {
            Some(s) if !self.xi_prob(p).is_zero() => self.xi_prob(p).mul_ref(&row_p[s]),
            _ => C::zero(),
        }
    }

    /// Law of the root degree of `T^A_m`: pairs `(p, P(deg root = p))` with
    /// positive mass, `p <= p_max`.
    pub fn root_degree_law(&self, m: usize, p_max: Option<usize>) -> Result<Vec<(usize, C)>> {
        self.check_size(m)?;
        let hi = p_max.unwrap_or(m).min(m);
        let mut out = Vec::new();
        for p in 0..=hi {
            if self.xi_prob(p).is_zero() {
                continue;
            }
            let w = self.root_weight(m, p, &self.row(p));
            if !w.is_zero() {
                out.push((p, w / self.pmf[m].clone()));
            }
        }
        Ok(out)
    }

    fn check_size(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.n || self.pmf[m].is_zero() {
            return Err(Error::ZeroProbability { n: m });
        }
        Ok(())
    }
}

fn convolve<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|s| {
            C::sum_iter(
                (0..=s)
                    .filter(|&i| !a[i].is_zero() && !b[s - i].is_zero())
                    .map(|i| a[i].mul_ref(&b[s - i])),
            )
        })
        .collect()
}

/// Rows computed during one sampling call beyond the cached ones.
struct RowCache<'a, C> {
    tables: &'a SamplerTables<C>,
    extra: HashMap<usize, Vec<C>>,
}

impl<'a, C: Coeff> RowCache<'a, C> {
    fn get(&mut self, r: usize) -> &[C] {
        if r < self.tables.rows.len() {
            return &self.tables.rows[r];
        }
        let tables = self.tables;
        self.extra
            .entry(r)
            .or_insert_with(|| tables.row(r).into_owned())
    }
}

/// An exact draw of `T^A_n`.
pub fn sample_conditioned<C: Coeff>(
    tables: &SamplerTables<C>,
    stream: &mut Stream,
) -> Result<OrderedTree> {
    sample_conditioned_size(tables, tables.n, stream)
}

/// An exact draw of `T^A_m` for any `m <= n` with positive mass: root
/// degree from its conditional law, then subtree sizes one at a time from
/// `P(X_1 = x | tau_r = s) = P(#_A T = x) tau_{r-1}[s - x] / tau_r[s]`.
pub fn sample_conditioned_size<C: Coeff>(
    tables: &SamplerTables<C>,
    m: usize,
    stream: &mut Stream,
) -> Result<OrderedTree> {
    tables.check_size(m)?;
    let pmf: Vec<f64> = tables.pmf.iter().map(Coeff::to_f64).collect();
    let mut cache = RowCache {
        tables,
        extra: HashMap::new(),
    };
    let mut degrees = Vec::new();
    let mut todo = vec![m];
    let mut parts = Vec::new();
    while let Some(size) = todo.pop() {
        let p = draw_root_degree(&mut cache, &pmf, size, stream);
        degrees.push(p);
        let mut s = tables
            .child_total(size, p)
            .expect("drawn degrees have valid totals");
        parts.clear();
        for i in 0..p {
            let r = p - i;
            let x = if r == 1 {
                s
            } else {
                draw_first_part(&mut cache, &pmf, r, s, stream)
            };
            parts.push(x);
            s -= x;
        }
        todo.extend(parts.iter().rev());
    }
    OrderedTree::from_degrees(&degrees)
}

fn draw_root_degree<C: Coeff>(
    cache: &mut RowCache<'_, C>,
    pmf: &[f64],
    m: usize,
    stream: &mut Stream,
) -> usize {
    let tables = cache.tables;
    let u = stream.uniform() * pmf[m];
    let mut acc = 0.0;
    let mut last = None;
    for p in 0..=m {
        let xp = tables.xi_prob(p).to_f64();
        if xp == 0.0 {
            continue;
        }
        let Some(s) = tables.child_total(m, p) else {
            continue;
        };
        let w = xp * cache.get(p)[s].to_f64();
        if w > 0.0 {
            acc += w;
            last = Some(p);
            if u < acc {
                return p;
            }
        }
    }
    last.expect("a size with positive mass has some root degree")
}

/// First of `r` parts summing to `s`, each part at least 1. Outcomes are
/// scanned from both ends (`1, s', 2, s' - 1, ...`) since one part is
/// usually small.
fn draw_first_part<C: Coeff>(
    cache: &mut RowCache<'_, C>,
    pmf: &[f64],
    r: usize,
    s: usize,
    stream: &mut Stream,
) -> usize {
    let total = cache.get(r)[s].to_f64();
    let u = stream.uniform() * total;
    let prev: &[C] = cache.get(r - 1);
    let weight = |x: usize| {
        if pmf[x] == 0.0 {
            0.0
        } else {
            pmf[x] * prev[s - x].to_f64()
        }
    };
    let (mut lo, mut hi) = (1usize, s - (r - 1));
    let mut acc = 0.0;
    let mut last = lo;
    while lo <= hi {
        for x in if lo == hi { vec![lo] } else { vec![lo, hi] } {
            let w = weight(x);
            if w > 0.0 {
                acc += w;
                last = x;
                if u < acc {
                    return x;
                }
            }
        }
        lo += 1;
        hi -= 1;
    }
    last
}

/// Whether `lambda ∈ P̄^A_m`.
pub fn in_bar_partitions(set: &DegreeSet, m: usize, lambda: &Partition) -> bool {
    if m == 1 {
        return lambda.is_empty() || lambda.parts() == [1];
    }
    if lambda.is_empty() {
        return false;
    }
    let p = lambda.len();
    let total = lambda.total();
    (total == m && !set.contains(p)) || (total + 1 == m && set.contains(p))
}

/// A family of root-partition laws `q_m` on `P̄^A_m`, for the sizes `m`
/// where it is defined.
#[derive(Clone, Debug, PartialEq)]
pub struct QFamily<C> {
    set: DegreeSet,
    laws: BTreeMap<usize, Vec<(Partition, C)>>,
}

impl<C: Coeff> QFamily<C> {
    /// Validates normalization, support in `P̄^A_m`, compatibility, and
    /// `q_m((m)) < 1` when `1 ∉ A`. Atoms with zero mass are dropped.
    pub fn new(set: DegreeSet, laws: BTreeMap<usize, Vec<(Partition, C)>>) -> Result<Self> {
        set.require_zero()?;
        if !laws.contains_key(&1) {
            return Err(Error::BadQFamily("q_1 must be defined".into()));
        }
        let mut clean = BTreeMap::new();
        for (&m, law) in &laws {
            let mut atoms: Vec<(Partition, C)> = Vec::new();
            for (lambda, w) in law {
                if w.is_negative() {
                    return Err(Error::BadQFamily(format!(
                        "negative mass at q_{m}({lambda})"
                    )));
                }
                if w.is_zero() {
                    continue;
                }
                if !in_bar_partitions(&set, m, lambda) {
                    return Err(Error::BadQFamily(format!(
                        "{lambda} is not an admissible partition for q_{m}"
                    )));
                }
                if let Some(&part) = lambda.parts().iter().find(|&&x| !laws.contains_key(&x)) {
                    return Err(Error::BadQFamily(format!(
                        "q_{m} charges {lambda} but q_{part} is undefined"
                    )));
                }
                atoms.push((lambda.clone(), w.clone()));
            }
            let total = C::sum_iter(atoms.iter().map(|(_, w)| w.clone()));
            if !total.approx_eq(&C::one(), 1e-9) {
                return Err(Error::BadQFamily(format!(
                    "q_{m} has total mass {}",
                    total.render()
                )));
            }
            if m >= 2 && !set.contains(1) {
                let own = atoms
                    .iter()
                    .find(|(l, _)| l.parts() == [m])
                    .map(|(_, w)| w.clone());
                if own.is_some_and(|w| w.approx_eq(&C::one(), 1e-12)) {
                    return Err(Error::BadQFamily(format!(
                        "q_{m}(({m})) = 1 gives an infinite stalk"
                    )));
                }
            }
            atoms.sort_by(|a, b| b.0.cmp(&a.0));
            clean.insert(m, atoms);
        }
        Ok(QFamily { set, laws: clean })
    }

    pub fn set(&self) -> &DegreeSet {
        &self.set
    }

    pub fn law(&self, m: usize) -> Option<&[(Partition, C)]> {
        self.laws.get(&m).map(Vec::as_slice)
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.laws.keys().copied()
    }

    /// `q_m(lambda)`, zero when `q_m` is undefined or does not charge it.
    pub fn prob(&self, m: usize, lambda: &Partition) -> C {
        self.law(m)
            .and_then(|law| law.iter().find(|(l, _)| l == lambda))
            .map_or_else(C::zero, |(_, w)| w.clone())
    }

    /// `q̄_m(g)`: expectation of `g(lambda / sum(lambda))` under `q_m`.
    pub fn normalized_expectation<G: Fn(&[f64]) -> f64>(&self, m: usize, g: G) -> Option<f64> {
        let law = self.law(m)?;
        Some(
            law.iter()
                .map(|(l, w)| w.to_f64() * g(&l.normalized()))
                .sum(),
        )
    }

    pub fn to_f64(&self) -> QFamily<f64> {
        QFamily {
            set: self.set.clone(),
            laws: self
                .laws
                .iter()
                .map(|(&m, law)| {
                    (
                        m,
                        law.iter().map(|(l, w)| (l.clone(), w.to_f64())).collect(),
                    )
                })
                .collect(),
        }
    }
}

/// Exact root-partition law of `T^A_m` (as an unordered tree), restricted
/// to root degrees `p <= p_max`. `missing` is the mass of larger degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct RootMeasure<C> {
    pub m: usize,
    pub atoms: Vec<(Partition, C)>,
    pub missing: C,
}

/// `q_m(lambda) = (p! / prod_j m_j!) xi(p) prod_i P(#_A T = lambda_i) / P(#_A T = m)`,
/// enumerated over root degrees `p` with `xi(p) > 0` and partitions whose
/// parts all have positive mass.
pub fn root_measure<C: Coeff>(
    tables: &SamplerTables<C>,
    m: usize,
    p_max: Option<usize>,
) -> Result<RootMeasure<C>> {
    tables.check_size(m)?;
    let pmf = tables.pmf();
    let norm = pmf[m].clone();
    let mut atoms = Vec::new();
    for (p, _) in tables.root_degree_law(m, p_max)? {
        let s = tables
            .child_total(m, p)
            .expect("root degrees in the law have valid totals");
        let xp = tables.xi_prob(p);
        for_each_partition(
            s,
            p,
            |x| !pmf[x].is_zero(),
            |lambda| {
                let mut w = lambda.arrangements::<C>().mul_ref(&xp);
                for &x in lambda.parts() {
                    w = w.mul_ref(&pmf[x]);
                }
                atoms.push((lambda.clone(), w / norm.clone()));
            },
        );
    }
    let missing = C::one() - C::sum_iter(atoms.iter().map(|(_, w)| w.clone()));
    Ok(RootMeasure { m, atoms, missing })
}

/// The family `q_m`, `m <= n`, of root-partition laws of `T^A_m`, for the
/// sizes with positive mass.
pub fn q_from_gw<C: Coeff>(tables: &SamplerTables<C>) -> Result<QFamily<C>> {
    let mut laws = BTreeMap::new();
    for m in 1..=tables.n() {
        if tables.pmf()[m].is_zero() {
            continue;
        }
        laws.insert(m, root_measure(tables, m, None)?.atoms);
    }
    QFamily::new(tables.set().clone(), laws)
}

/// `q°`: pushforward of `q_m` under `lambda -> lambda` for partitions of
/// `m` and `lambda -> (lambda, 1)` for partitions of `m - 1`. The result is
/// a family for `A = {0}`, with `q°_1 = q_1`.
pub fn q_circ<C: Coeff>(q: &QFamily<C>) -> Result<QFamily<C>> {
    let mut laws = BTreeMap::new();
    for m in q.sizes() {
        let law = q.law(m).expect("listed size");
        if m == 1 {
            laws.insert(1, law.to_vec());
            continue;
        }
        let mut merged: BTreeMap<Partition, C> = BTreeMap::new();
        for (lambda, w) in law {
            let image = if lambda.total() == m {
                lambda.clone()
            } else {
                lambda.append_one()
            };
            let slot = merged.entry(image).or_insert_with(C::zero);
            *slot = slot.add_ref(w);
        }
        laws.insert(m, merged.into_iter().collect());
    }
    QFamily::new(DegreeSet::leaves(), laws)
}

/// Float tables for drawing from a [`QFamily`].
#[derive(Clone, Debug)]
pub struct MbSampler {
    one_in_set: bool,
    /// Per size: stalk continuation probability `q_m((m))` (or `q_1((1))`),
    /// and the cumulative law of the other partitions.
    tables: BTreeMap<usize, MbLaw>,
}

#[derive(Clone, Debug)]
struct MbLaw {
    stalk: f64,
    parts: Vec<Partition>,
    cdf: Vec<f64>,
}

impl MbSampler {
    pub fn new<C: Coeff>(q: &QFamily<C>) -> Self {
        let one_in_set = q.set().contains(1);
        let mut tables = BTreeMap::new();
        for m in q.sizes() {
            let law = q.law(m).expect("listed size");
            let mut stalk = 0.0;
            let mut parts = Vec::new();
            let mut weights = Vec::new();
            for (lambda, w) in law {
                let w = w.to_f64();
                let is_stalk = if m == 1 {
                    lambda.parts() == [1]
                } else {
                    lambda.parts() == [m]
                };
                if is_stalk {
                    stalk += w;
                } else {
                    parts.push(lambda.clone());
                    weights.push(w);
                }
            }
            let total: f64 = weights.iter().sum();
            let mut acc = 0.0;
            let cdf = weights
                .iter()
                .map(|w| {
                    acc += w / total;
                    acc
                })
                .collect();
            tables.insert(m, MbLaw { stalk, parts, cdf });
        }
        MbSampler { one_in_set, tables }
    }

    /// A draw from `P^q_m`, as an ordered representative of the unordered
    /// tree (children in the order of the drawn partition).
    pub fn sample(&self, m: usize, stream: &mut Stream) -> Result<OrderedTree> {
        if !self.tables.contains_key(&m) {
            return Err(Error::ZeroProbability { n: m });
        }
        let mut children: Vec<Vec<usize>> = Vec::new();
        let mut todo: Vec<(Option<usize>, usize)> = vec![(None, m)];
        while let Some((parent, size)) = todo.pop() {
            let law = &self.tables[&size];
            // edges on the stalk above the branch point (or leaf)
            let stalk_edges = if self.one_in_set {
                0
            } else {
                geometric_failures(law.stalk, stream)
            };
            let mut top = new_vertex(&mut children, parent);
            for _ in 0..stalk_edges {
                top = new_vertex(&mut children, Some(top));
            }
            if size == 1 {
                continue;
            }
            let u = stream.uniform();
            let idx = law
                .cdf
                .partition_point(|&c| c <= u)
                .min(law.parts.len() - 1);
            for &part in law.parts[idx].parts().iter().rev() {
                todo.push((Some(top), part));
            }
        }
        // children were pushed in reverse partition order
        for c in &mut children {
            c.reverse();
        }
        OrderedTree::from_children(0, &children)
    }
}

fn new_vertex(children: &mut Vec<Vec<usize>>, parent: Option<usize>) -> usize {
    let v = children.len();
    children.push(Vec::new());
    if let Some(p) = parent {
        children[p].push(v);
    }
    v
}

/// Number of successes before the first failure, success probability `r`.
fn geometric_failures(r: f64, stream: &mut Stream) -> usize {
    let mut j = 0;
    while r > 0.0 && stream.uniform() < r {
        j += 1;
    }
    j
}

/// Draws from `P^q_m`.
pub fn sample_mb(sampler: &MbSampler, m: usize, stream: &mut Stream) -> Result<OrderedTree> {
    sampler.sample(m, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ratio, Rational};

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    fn part(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn degree_sampler_binary_support() {
        let s = DegreeSampler::new(&OffspringDist::<Rational>::binary()).unwrap();
        let mut st = Stream::new(1);
        for _ in 0..1000 {
            assert!(matches!(s.sample(&mut st), 0 | 2));
        }
        let d = DegreeSampler::new(&OffspringDist::<f64>::dirac_zero()).unwrap();
        assert_eq!(sample_gw(&d, &mut st, 10).unwrap(), OrderedTree::single());
    }

    #[test]
    fn overflow_is_reported() {
        let s = DegreeSampler::new(&OffspringDist::<f64>::binary()).unwrap();
        let mut st = Stream::new(5);
        let mut overflowed = 0;
        for _ in 0..200 {
            if sample_gw(&s, &mut st, 3).is_err() {
                overflowed += 1;
            }
        }
        assert!(overflowed > 0);
    }

    #[test]
    fn conditioned_small_cases() {
        let xi = OffspringDist::<Rational>::binary();
        let cherry: OrderedTree = "(()())".parse().unwrap();
        let t = SamplerTables::new(&xi, &DegreeSet::leaves(), 2).unwrap();
        let all = SamplerTables::new(&xi, &DegreeSet::all(), 3).unwrap();
        let mut st = Stream::new(9);
        for _ in 0..50 {
            assert_eq!(sample_conditioned(&t, &mut st).unwrap(), cherry);
            assert_eq!(sample_conditioned(&all, &mut st).unwrap(), cherry);
        }
        assert!(matches!(
            SamplerTables::new(&xi, &DegreeSet::all(), 4),
            Err(Error::ZeroProbability { n: 4 })
        ));
    }

    #[test]
    fn conditioned_count_is_exact() {
        let xi = OffspringDist::<f64>::geometric(0.5);
        for set in ["0", "0,2", "all", "0,1"] {
            let set: DegreeSet = set.parse().unwrap();
            let t = SamplerTables::new(&xi, &set, 40).unwrap();
            let mut st = Stream::new(2);
            for _ in 0..200 {
                let tree = sample_conditioned(&t, &mut st).unwrap();
                assert_eq!(tree.count_in(&set).unwrap(), 40);
            }
        }
    }

    #[test]
    fn rejection_examples() {
        let xi = OffspringDist::<Rational>::binary();
        let mut st = Stream::new(4);
        let t =
            sample_conditioned_rejection(&xi, &DegreeSet::leaves(), 2, &mut st, 10_000, Some(3))
                .unwrap();
        assert_eq!(t, "(()())".parse().unwrap());
        assert_eq!(
            sample_conditioned_rejection(&xi, &DegreeSet::leaves(), 2, &mut st, 0, None),
            Err(Error::BudgetExhausted { tries: 0 })
        );
    }

    #[test]
    fn q_from_gw_examples() {
        let xi = OffspringDist::<Rational>::binary();
        let t = SamplerTables::new(&xi, &DegreeSet::leaves(), 6).unwrap();
        let q = q_from_gw(&t).unwrap();
        assert_eq!(q.prob(2, &part(&[1, 1])), r(1, 1));
        assert_eq!(q.prob(3, &part(&[2, 1])), r(1, 1));
        assert_eq!(q.prob(1, &Partition::empty()), r(1, 1));
        let all = SamplerTables::new(&xi, &DegreeSet::all(), 7).unwrap();
        let q = q_from_gw(&all).unwrap();
        assert_eq!(q.prob(3, &part(&[1, 1])), r(1, 1));
        assert!(q.law(2).is_none());
        for m in q.sizes() {
            let total: Rational = q.law(m).unwrap().iter().map(|(_, w)| w.clone()).sum();
            assert_eq!(total, r(1, 1));
        }
    }

    #[test]
    fn q_from_gw_geometric_has_stalks() {
        let xi = OffspringDist::geometric(r(1, 2));
        let t = SamplerTables::new(&xi, &DegreeSet::leaves(), 5).unwrap();
        let q = q_from_gw(&t).unwrap();
        assert_eq!(q.prob(1, &part(&[1])), r(1, 4));
        assert_eq!(q.prob(4, &part(&[4])), r(1, 4));
    }

    #[test]
    fn root_degree_marginal_matches_partition_law() {
        let xi = OffspringDist::geometric(r(1, 2));
        for set in ["0", "0,2", "all"] {
            let set: DegreeSet = set.parse().unwrap();
            let t = SamplerTables::new(&xi, &set, 9).unwrap();
            for m in (1..=9).filter(|&m| t.pmf()[m] != r(0, 1)) {
                let law = t.root_degree_law(m, None).unwrap();
                let measure = root_measure(&t, m, None).unwrap();
                assert_eq!(measure.missing, r(0, 1));
                for (p, w) in law {
                    let by_parts: Rational = measure
                        .atoms
                        .iter()
                        .filter(|(l, _)| l.len() == p)
                        .map(|(_, w)| w.clone())
                        .sum();
                    assert_eq!(by_parts, w, "m {m} p {p}");
                }
            }
        }
    }

    #[test]
    fn deterministic_q_gives_caterpillar() {
        let mut laws = BTreeMap::new();
        laws.insert(1, vec![(Partition::empty(), r(1, 1))]);
        laws.insert(2, vec![(part(&[1, 1]), r(1, 1))]);
        laws.insert(3, vec![(part(&[2, 1]), r(1, 1))]);
        let q = QFamily::new(DegreeSet::leaves(), laws).unwrap();
        let s = MbSampler::new(&q);
        let mut st = Stream::new(3);
        let t = sample_mb(&s, 3, &mut st).unwrap();
        assert_eq!(
            t.canonical_key(),
            "((()())())".parse::<OrderedTree>().unwrap().canonical_key()
        );
        assert_eq!(sample_mb(&s, 1, &mut st).unwrap(), OrderedTree::single());
    }

    #[test]
    fn q_family_validation() {
        let mut laws = BTreeMap::new();
        laws.insert(1, vec![(Partition::empty(), r(1, 1))]);
        laws.insert(2, vec![(part(&[1, 1]), r(1, 2))]);
        assert!(QFamily::new(DegreeSet::leaves(), laws.clone()).is_err());
        laws.insert(2, vec![(part(&[1, 1]), r(1, 1))]);
        laws.insert(4, vec![(part(&[3, 1]), r(1, 1))]);
        assert!(matches!(
            QFamily::new(DegreeSet::leaves(), laws),
            Err(Error::BadQFamily(_))
        ));
        let mut bad = BTreeMap::new();
        bad.insert(1, vec![(Partition::empty(), r(1, 1))]);
        bad.insert(2, vec![(part(&[2]), r(1, 1))]);
        assert!(QFamily::new(DegreeSet::leaves(), bad).is_err());
    }

    #[test]
    fn q_circ_examples() {
        let mut laws = BTreeMap::new();
        laws.insert(1, vec![(Partition::empty(), r(1, 1))]);
        laws.insert(2, vec![(part(&[1, 1]), r(1, 1))]);
        let q = QFamily::new(DegreeSet::leaves(), laws).unwrap();
        assert_eq!(q_circ(&q).unwrap().prob(2, &part(&[1, 1])), r(1, 1));

        let xi = OffspringDist::<Rational>::binary();
        let all = SamplerTables::new(&xi, &DegreeSet::all(), 5).unwrap();
        let q = q_from_gw(&all).unwrap();
        let qc = q_circ(&q).unwrap();
        assert_eq!(qc.prob(3, &part(&[1, 1, 1])), r(1, 1));
        assert_eq!(qc.set(), &DegreeSet::leaves());
    }
}
