//! Named verification suites. Each suite resolves its parameters, runs, and
//! returns an [`ExperimentReport`] whose tests record every check.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coeff, Rational};
use crate::degree_set::DegreeSet;
use crate::error::{Error, Result};
use crate::exact::{
    complete_vertex_cap, count_a_pmf, count_a_pmf_walk, enumerate_mass, for_each_gw_tree,
    ENUM_VERTEX_LIMIT,
};
use crate::offspring::{DistSpec, OffspringDist};
use crate::report::{Arm, ExperimentReport, TestRecord};
use crate::rng::Stream;
use crate::samplers::{
    q_circ, q_from_gw, root_measure, sample_conditioned_size, DegreeSampler, MbSampler,
    SamplerTables,
};
use crate::scaling::{
    chi_square_gof, chi_square_two_sample, depth_samples, ks_critical_5pct, ks_two_sample,
    lipschitz_suite, normalized_expectation, root_limit_target, theorem_functional, CONSTANT_ONE,
};
use crate::transforms::{check_tree, sample_hat_offspring, HittingRule};
use crate::tree::{OrderedTree, UnorderedTreeKey};

/// Suites runnable by name.
pub const SUITES: [&str; 7] = [
    "otter-dwass",
    "checkmap",
    "hat-law",
    "mb-equivalence",
    "root-limit",
    "follower",
    "universality",
];

/// Significance floor for chi-square checks.
pub const CHI_P_FLOOR: f64 = 1e-3;
/// Relative tolerance of the root-partition limit at the largest size.
pub const ROOT_LIMIT_REL_TOL: f64 = 0.15;
/// Tolerance of the root-degree law against the size-biased law.
pub const ROOT_DEGREE_TOL: f64 = 0.05;
/// Lower bound on `q̄_n(s_1)` at the largest size.
pub const DEGENERATE_FLOOR: f64 = 0.9;
/// Samples per parallel work unit; fixes the stream layout.
const CHUNK: usize = 1000;

/// `(dists, sets, max_n, ns, samples)` defaults of one suite.
type Defaults = (
    Vec<DistSpec>,
    Vec<DegreeSet>,
    Option<usize>,
    Vec<usize>,
    Option<usize>,
);

/// Parameters shared by all suites. Unset fields take per-suite defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteParams {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dists: Vec<DistSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sets: Vec<DegreeSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ns: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl SuiteParams {
    /// Fills unset fields with the defaults of `suite`.
    pub fn resolved(&self, suite: &str) -> Result<SuiteParams> {
        let binary = DistSpec::binary;
        let geometric = || DistSpec::geometric("1/2");
        let leaves = DegreeSet::leaves;
        let (dists, sets, max_n, ns, samples): Defaults = match suite {
            "otter-dwass" => (
                vec![binary(), geometric()],
                vec![
                    leaves(),
                    DegreeSet::finite([0, 1]),
                    DegreeSet::finite([0, 2]),
                    DegreeSet::all(),
                ],
                Some(60),
                vec![],
                None,
            ),
            "checkmap" => (vec![binary()], vec![leaves()], Some(9), vec![], None),
            "hat-law" => (
                vec![binary(), geometric()],
                vec![leaves(), DegreeSet::finite([0, 2])],
                None,
                vec![],
                Some(100_000),
            ),
            "mb-equivalence" => (
                vec![binary(), geometric()],
                vec![leaves(), DegreeSet::all()],
                Some(4),
                vec![],
                Some(10_000),
            ),
            "root-limit" => (
                vec![binary()],
                vec![leaves(), DegreeSet::all()],
                None,
                vec![25, 50, 100, 200],
                None,
            ),
            "follower" => (
                vec![binary()],
                vec![leaves(), DegreeSet::finite([0, 2])],
                Some(12),
                vec![],
                None,
            ),
            "universality" => (
                vec![binary(), geometric()],
                vec![leaves(), DegreeSet::all()],
                None,
                vec![2000],
                Some(5000),
            ),
            other => return Err(Error::Invalid(format!("unknown suite {other:?}"))),
        };
        Ok(SuiteParams {
            dists: if self.dists.is_empty() {
                dists
            } else {
                self.dists.clone()
            },
            sets: if self.sets.is_empty() {
                sets
            } else {
                self.sets.clone()
            },
            max_n: self.max_n.or(max_n),
            ns: if self.ns.is_empty() {
                ns
            } else {
                self.ns.clone()
            },
            samples: self.samples.or(samples),
            seed: self.seed,
        })
    }

    fn laws(&self) -> Result<Vec<(String, OffspringDist<Rational>)>> {
        self.dists
            .iter()
            .map(|d| Ok((label(d), d.build()?)))
            .collect()
    }
}

fn label(d: &DistSpec) -> String {
    match d {
        DistSpec::Family { family, p: Some(p) } => format!("{family}({p})"),
        DistSpec::Family { family, p: None } => family.clone(),
        DistSpec::Probs { probs } => format!("[{}]", probs.join(",")),
    }
}

/// Runs `suite` with `params` (defaults filled in).
pub fn run_suite(suite: &str, params: &SuiteParams) -> Result<ExperimentReport> {
    let p = params.resolved(suite)?;
    let config = serde_json::to_value(&p).expect("params serialize");
    let stochastic = matches!(suite, "hat-law" | "mb-equivalence" | "universality");
    let mut report = ExperimentReport::new(suite, config, stochastic.then_some(p.seed));
    match suite {
        "otter-dwass" => otter_dwass(&p, &mut report)?,
        "checkmap" => checkmap(&p, &mut report)?,
        "hat-law" => hat_law(&p, &mut report)?,
        "mb-equivalence" => mb_equivalence(&p, &mut report)?,
        "root-limit" => root_limit(&p, &mut report)?,
        "follower" => follower(&p, &mut report)?,
        "universality" => universality(&p, &mut report)?,
        _ => unreachable!("resolved() rejects unknown suites"),
    }
    Ok(report)
}

fn max_n(p: &SuiteParams) -> usize {
    p.max_n.expect("resolved")
}

fn samples(p: &SuiteParams) -> usize {
    p.samples.expect("resolved")
}

/// Online recursion against `(1/n) P(S_n = -1)` under the hat law, and
/// against enumeration wherever enumeration is complete.
fn otter_dwass(p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let n_max = max_n(p);
    for (name, xi) in p.laws()? {
        for set in &p.sets {
            let online = count_a_pmf(&xi, set, n_max)?;
            let walk = count_a_pmf_walk(&xi, set, n_max)?;
            let bad: Vec<usize> = (1..=n_max).filter(|&n| online[n] != walk[n]).collect();
            let mut rec = TestRecord::exact(format!("walk-formula {name} A={set}"), bad.len());
            if let Some(n) = bad.first() {
                rec = rec.with_detail(format!("first mismatch at n={n}"));
            }
            report.tests.push(rec);

            let mut mismatches = 0;
            let mut checked = 0;
            for n in 1..=n_max {
                let Some(cap) = complete_vertex_cap(&xi, set, n) else {
                    break;
                };
                if cap > ENUM_VERTEX_LIMIT {
                    break;
                }
                checked = n;
                if enumerate_mass(&xi, set, n, cap)?.probability != online[n] {
                    mismatches += 1;
                }
            }
            if checked > 0 {
                report.tests.push(
                    TestRecord::exact(format!("enumeration {name} A={set}"), mismatches)
                        .with_detail(format!("complete for n <= {checked}")),
                );
            }
        }
    }
    Ok(())
}

/// Pushforward of `GW_xi` by the check map against `GW_zeta`, for every
/// ordered tree with at most `max_n` vertices.
fn checkmap(p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let cap = max_n(p);
    let leaves = DegreeSet::leaves();
    for (name, xi) in p.laws()? {
        let mut pushed: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        let mut failures = 0usize;
        for_each_gw_tree(&xi, None, cap, |degrees, mass| {
            let tree = OrderedTree::from_degrees(degrees).expect("enumerated sequences are trees");
            match check_tree(&tree) {
                Ok(t) => {
                    let slot = pushed.entry(t.degrees()).or_insert_with(Rational::zero);
                    *slot = slot.add_ref(mass);
                }
                Err(_) => failures += 1,
            }
        })?;
        // trees with k leaves have at most 2k - 1 vertices only when xi_1 = 0
        let complete_leaves = if xi.prob(1).is_zero() {
            cap.div_ceil(2)
        } else {
            0
        };
        let zeta = xi.derived_dist(&leaves, cap)?;
        let mut expected: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for_each_gw_tree(&zeta, None, cap, |degrees, mass| {
            expected.insert(degrees.to_vec(), mass.clone());
        })?;
        let mut mismatches = failures;
        let mut compared = 0usize;
        for (shape, mass) in &pushed {
            let target = expected.get(shape).cloned().unwrap_or_else(Rational::zero);
            let ok = if shape.len() <= complete_leaves {
                *mass == target
            } else {
                *mass <= target
            };
            mismatches += usize::from(!ok);
            compared += 1;
        }
        for (shape, mass) in &expected {
            if shape.len() <= complete_leaves && !pushed.contains_key(shape) && !mass.is_zero() {
                mismatches += 1;
            }
        }
        report.tests.push(
            TestRecord::exact(format!("check-map {name}"), mismatches).with_detail(format!(
                "{compared} check trees, exact up to {complete_leaves} vertices"
            )),
        );
    }
    Ok(())
}

/// Draws `count` values, unit `i` of `CHUNK` draws using child stream `i`.
fn chunked<T: Send, F: Fn(&mut Stream) -> Result<T> + Sync>(
    root: &Stream,
    count: usize,
    draw: F,
) -> Result<Vec<T>> {
    let units = count.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..units)
        .into_par_iter()
        .map(|u| {
            let mut s = root.split(u as u64);
            let here = CHUNK.min(count - u * CHUNK);
            (0..here).map(|_| draw(&mut s)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Monte Carlo hat-offspring draws against the hat law, plus the variance
/// check `Var = sigma^2 / xi(A)`.
fn hat_law(p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let count = samples(p);
    let root = Stream::new(p.seed);
    let mut arm_index = 0u64;
    for (name, xi) in p.laws()? {
        for set in &p.sets {
            let stream = root.split(arm_index);
            arm_index += 1;
            let sampler = DegreeSampler::new(&xi)?;
            let rule = HittingRule::new(set)?;
            let draws = chunked(&stream, count, |s| {
                Ok(sample_hat_offspring(&sampler, &rule, s))
            })?;
            let top = draws.iter().copied().max().unwrap_or(0);
            let zeta = xi.derived_dist(set, top + 1)?;
            let probs: Vec<f64> = (0..=top).map(|k| zeta.prob(k).to_f64()).collect();
            let mut observed = vec![0u64; top + 1];
            for &d in &draws {
                observed[d] += 1;
            }
            let chi = chi_square_gof(&observed, &probs)?;
            report.tests.push(
                TestRecord::above(format!("hat-pmf {name} A={set}"), chi.p_value, CHI_P_FLOOR)
                    .with_detail(format!("chi2={:.3} dof={}", chi.statistic, chi.dof)),
            );

            let values: Vec<f64> = draws.iter().map(|&d| d as f64).collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let m4 = values.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
            // Var(s^2) = (mu_4 - (n - 3) / (n - 1) sigma^4) / n
            let se = ((m4 - (n - 3.0) / (n - 1.0) * var * var) / n)
                .max(0.0)
                .sqrt();
            let target = xi.variance().to_f64() / xi.mass_in(set).to_f64();
            report.tests.push(
                TestRecord::at_most(
                    format!("hat-variance {name} A={set}"),
                    (var - target).abs(),
                    3.0 * se,
                )
                .with_detail(format!(
                    "variance {var:.4}, target {target:.4}, mean {mean:.4}"
                )),
            );
            report.arms.push(Arm::from_values(
                format!("{name} A={set}"),
                1,
                values,
                vec![("target_variance".into(), target)],
            ));
        }
    }
    Ok(())
}

/// Shape counts of `draws` over the categories of `keys`, plus the number of
/// draws outside them.
fn tally(keys: &[UnorderedTreeKey], draws: &[UnorderedTreeKey]) -> (Vec<u64>, u64) {
    let index: BTreeMap<&UnorderedTreeKey, usize> =
        keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut counts = vec![0u64; keys.len()];
    let mut outside = 0;
    for d in draws {
        match index.get(d) {
            Some(&i) => counts[i] += 1,
            None => outside += 1,
        }
    }
    (counts, outside)
}

/// Shape laws at small sizes: exact enumeration, the recursive sampler,
/// and the Markov branching sampler with the root-partition family.
fn mb_equivalence(p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let n_max = max_n(p);
    let count = samples(p);
    let root = Stream::new(p.seed);
    let mut arm_index = 0u64;
    for (name, xi) in p.laws()? {
        for set in &p.sets {
            let tables = tables_upto(&xi, set, n_max)?;
            let float_tables = tables_upto(&xi.to_f64(), set, n_max)?;
            let mb = MbSampler::new(&q_from_gw(&tables)?);
            for n in 1..=tables.n() {
                if tables.pmf()[n].is_zero() {
                    continue;
                }
                let stream = root.split(arm_index);
                arm_index += 1;
                let direct: Vec<UnorderedTreeKey> = chunked(&stream.split(0), count, |s| {
                    Ok(sample_conditioned_size(&float_tables, n, s)?.canonical_key())
                })?;
                let branching: Vec<UnorderedTreeKey> = chunked(&stream.split(1), count, |s| {
                    Ok(mb.sample(n, s)?.canonical_key())
                })?;
                let tag = format!("{name} A={set} n={n}");
                match complete_vertex_cap(&xi, set, n).filter(|&c| c <= ENUM_VERTEX_LIMIT) {
                    Some(cap) => {
                        let law = enumerate_mass(&xi, set, n, cap)?.conditional()?;
                        let keys: Vec<UnorderedTreeKey> = law.keys().cloned().collect();
                        let probs: Vec<f64> = law.values().map(Coeff::to_f64).collect();
                        for (which, draws) in
                            [("recursive", &direct), ("markov-branching", &branching)]
                        {
                            let (counts, outside) = tally(&keys, draws);
                            let rec = if outside > 0 {
                                TestRecord::above(
                                    format!("{which} vs enumeration {tag}"),
                                    0.0,
                                    CHI_P_FLOOR,
                                )
                                .with_detail(format!(
                                    "{outside} draws outside the enumerated support"
                                ))
                            } else {
                                let chi = chi_square_gof(&counts, &probs)?;
                                TestRecord::above(
                                    format!("{which} vs enumeration {tag}"),
                                    chi.p_value,
                                    CHI_P_FLOOR,
                                )
                                .with_detail(format!("chi2={:.3} dof={}", chi.statistic, chi.dof))
                            };
                            report.tests.push(rec);
                        }
                    }
                    None => {
                        let mut keys: Vec<UnorderedTreeKey> =
                            direct.iter().chain(&branching).cloned().collect();
                        keys.sort();
                        keys.dedup();
                        let (a, _) = tally(&keys, &direct);
                        let (b, _) = tally(&keys, &branching);
                        let chi = chi_square_two_sample(&a, &b)?;
                        report.tests.push(
                            TestRecord::above(
                                format!("recursive vs markov-branching {tag}"),
                                chi.p_value,
                                CHI_P_FLOOR,
                            )
                            .with_detail(format!(
                                "enumeration incomplete; chi2={:.3} dof={}",
                                chi.statistic, chi.dof
                            )),
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

/// Tables for the largest size `<= n_max` with positive mass.
fn tables_upto<C: Coeff>(
    xi: &OffspringDist<C>,
    set: &DegreeSet,
    n_max: usize,
) -> Result<SamplerTables<C>> {
    let mut pmf = count_a_pmf(xi, set, n_max)?;
    while pmf.len() > 2 && pmf.last().is_some_and(|c| c.is_zero()) {
        pmf.pop();
    }
    SamplerTables::from_pmf(xi, set, pmf)
}

/// The smallest size `>= n` with positive mass.
fn reachable_size(pmf: &[Rational], n: usize) -> Option<usize> {
    (n..pmf.len()).find(|&m| !pmf[m].is_zero())
}

/// Exact `sqrt(n) q̄_n(1 - s_1)`, `q̄_n(s_1)` and the root-degree law over
/// a range of sizes.
fn root_limit(p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let top = *p
        .ns
        .iter()
        .max()
        .ok_or_else(|| Error::Invalid("root-limit needs sizes".into()))?;
    for (name, xi) in p.laws()? {
        let sigma = xi.variance().to_f64().sqrt();
        for set in &p.sets {
            let tables = SamplerTables::new(&xi, set, top + 1)?;
            let target = root_limit_target(sigma, xi.mass_in(set).to_f64());
            let mut values = Vec::new();
            let mut firsts = Vec::new();
            let mut last_degree_gap = 0.0;
            let mut sizes = Vec::new();
            for &n in &p.ns {
                let m = reachable_size(tables.pmf(), n).ok_or(Error::ZeroProbability { n })?;
                let measure = root_measure(&tables, m, None)?;
                values.push(theorem_functional(m, &measure.atoms, &CONSTANT_ONE));
                firsts.push(normalized_expectation(&measure.atoms, |s| {
                    s.first().copied().unwrap_or(0.0)
                }));
                let mut by_degree: BTreeMap<usize, f64> = BTreeMap::new();
                for (lambda, w) in &measure.atoms {
                    *by_degree.entry(lambda.len()).or_default() += w.to_f64();
                }
                last_degree_gap = by_degree
                    .iter()
                    .map(|(&d, &w)| (w - xi.size_biased(d).to_f64()).abs())
                    .chain((0..=xi.support_max().unwrap_or(0)).map(|d| {
                        (by_degree.get(&d).copied().unwrap_or(0.0) - xi.size_biased(d).to_f64())
                            .abs()
                    }))
                    .fold(0.0, f64::max);
                sizes.push(m);
            }
            let tag = format!("{name} A={set}");
            let gaps: Vec<f64> = values.iter().map(|v| (v - target).abs()).collect();
            let monotone = gaps.windows(2).filter(|w| w[1] >= w[0]).count();
            let listing = sizes
                .iter()
                .zip(&values)
                .map(|(m, v)| format!("n={m}: {v:.5}"))
                .collect::<Vec<_>>()
                .join(", ");
            report.tests.push(
                TestRecord::exact(format!("root-limit approach {tag}"), monotone)
                    .with_detail(listing.clone()),
            );
            let rel = gaps.last().copied().unwrap_or(f64::INFINITY) / target;
            report.tests.push(
                TestRecord::at_most(
                    format!("root-limit tolerance {tag}"),
                    rel,
                    ROOT_LIMIT_REL_TOL,
                )
                .with_detail(format!("target {target:.5}; {listing}")),
            );
            let increasing = firsts.windows(2).filter(|w| w[1] <= w[0]).count();
            report.tests.push(TestRecord::exact(
                format!("first-mass increasing {tag}"),
                increasing,
            ));
            report.tests.push(TestRecord::above(
                format!("first-mass floor {tag}"),
                firsts.last().copied().unwrap_or(0.0),
                DEGENERATE_FLOOR,
            ));
            report.tests.push(TestRecord::at_most(
                format!("root-degree law {tag}"),
                last_degree_gap,
                ROOT_DEGREE_TOL,
            ));
            report.arms.push(Arm {
                label: tag,
                n: *sizes.last().unwrap_or(&0),
                samples: 0,
                mean: *values.last().unwrap_or(&0.0),
                ecdf: sizes
                    .iter()
                    .zip(&values)
                    .map(|(&m, &v)| [m as f64, v])
                    .collect(),
                metadata: vec![
                    ("sigma".into(), sigma),
                    ("mass_a".into(), xi.mass_in(set).to_f64()),
                    ("target".into(), target),
                ],
                values: values.clone(),
            });
        }
    }
    Ok(())
}

/// `|q̄°_n(g) - q̄_n(g)| <= 3K / (n + 1)` for the Lipschitz suite.
fn follower(p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let n_max = max_n(p);
    let suite = lipschitz_suite();
    for (name, xi) in p.laws()? {
        for set in &p.sets {
            let tables = tables_upto(&xi, set, n_max)?;
            let q = q_from_gw(&tables)?;
            let qc = q_circ(&q)?;
            let mut worst: f64 = 0.0;
            let mut violations = 0usize;
            let mut checked = 0usize;
            for m in q.sizes().filter(|&m| m >= 1).collect::<Vec<_>>() {
                for f in &suite {
                    let (Some(a), Some(b)) = (
                        q.normalized_expectation(m, f.eval),
                        qc.normalized_expectation(m, f.eval),
                    ) else {
                        continue;
                    };
                    let bound = 3.0 * f.bound / (m as f64 + 1.0);
                    let gap = (a - b).abs();
                    if bound > 0.0 {
                        worst = worst.max(gap / bound);
                    }
                    violations += usize::from(gap > bound + 1e-12);
                    checked += 1;
                }
            }
            report.tests.push(
                TestRecord::exact(format!("follower bound {name} A={set}"), violations)
                    .with_detail(format!("{checked} pairs, largest gap/bound {worst:.4}")),
            );
        }
    }
    Ok(())
}

/// Rescaled depth of a uniform `A`-vertex across degree sets and laws,
/// compared by two-sample KS.
fn universality(p: &SuiteParams, report: &mut ExperimentReport) -> Result<()> {
    let count = samples(p);
    let n_req = *p
        .ns
        .first()
        .ok_or_else(|| Error::Invalid("universality needs a size".into()))?;
    let laws = p.laws()?;
    let last_set = p
        .sets
        .last()
        .ok_or_else(|| Error::Invalid("universality needs degree sets".into()))?;
    // arms: first law across all sets, then other laws at the last set
    let mut plan: Vec<(String, OffspringDist<Rational>, DegreeSet)> = Vec::new();
    for set in &p.sets {
        plan.push((laws[0].0.clone(), laws[0].1.clone(), set.clone()));
    }
    for (name, xi) in laws.iter().skip(1) {
        plan.push((name.clone(), xi.clone(), last_set.clone()));
    }
    let pivot = p.sets.len() - 1;
    let root = Stream::new(p.seed);
    for (k, (name, xi, set)) in plan.iter().enumerate() {
        let xf = xi.to_f64();
        let probe = count_a_pmf(&xf, set, n_req + 1)?;
        let n = (n_req..=n_req + 1)
            .find(|&m| probe[m] > 0.0)
            .ok_or(Error::ZeroProbability { n: n_req })?;
        let tables = SamplerTables::new(&xf, set, n)?;
        let sigma = xf.variance().sqrt();
        let mass_a = xf.mass_in(set);
        let values = depth_samples(&tables, count, sigma * mass_a.sqrt(), &root.split(k as u64))?;
        report.arms.push(Arm::from_values(
            format!("{name} A={set}"),
            n,
            values,
            vec![("sigma".into(), sigma), ("mass_a".into(), mass_a)],
        ));
    }
    let critical = ks_critical_5pct(count, count);
    for k in 0..report.arms.len() {
        if k == pivot {
            continue;
        }
        let d = ks_two_sample(&report.arms[pivot].values, &report.arms[k].values)?;
        let name = format!(
            "ks {} vs {}",
            report.arms[pivot].label, report.arms[k].label
        );
        report.tests.push(TestRecord::at_most(name, d, critical));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_for_every_suite() {
        for s in SUITES {
            let p = SuiteParams::default().resolved(s).unwrap();
            assert!(!p.dists.is_empty() && !p.sets.is_empty());
        }
        assert!(SuiteParams::default().resolved("nope").is_err());
    }

    #[test]
    fn small_exact_suites_pass() {
        let p = SuiteParams {
            max_n: Some(10),
            ..Default::default()
        };
        let r = run_suite("otter-dwass", &p).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let r = run_suite(
            "checkmap",
            &SuiteParams {
                max_n: Some(7),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let r = run_suite(
            "follower",
            &SuiteParams {
                max_n: Some(6),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }
}
