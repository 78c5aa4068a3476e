//! Numerical checks of the scaling statements: root-partition functionals,
//! the binary dislocation integral, size-biased picks, rescaled depths, and
//! the two-sample and goodness-of-fit statistics used to compare laws.

use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rng::Stream;
use crate::samplers::{sample_conditioned, SamplerTables};

/// Non-increasing masses `s_1 >= s_2 >= ... >= 0` with total at most 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MassPartitionVec(Vec<f64>);

impl MassPartitionVec {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::Invalid("masses must be nonnegative".into()));
        }
        if s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid("masses must be non-increasing".into()));
        }
        if s.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::Invalid("masses must sum to at most 1".into()));
        }
        Ok(MassPartitionVec(s))
    }

    /// `lambda / sum(lambda)`; empty for `∅`.
    pub fn from_partition(lambda: &Partition) -> Self {
        MassPartitionVec(lambda.normalized())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `s_i` (1-based), zero past the stored entries.
    pub fn get(&self, i: usize) -> f64 {
        coord(&self.0, i)
    }
}

/// `s_i` (1-based) of a mass vector, zero past its end.
pub fn coord(s: &[f64], i: usize) -> f64 {
    s.get(i - 1).copied().unwrap_or(0.0)
}

/// A test function on mass partitions with `|f| <= bound` and Lipschitz
/// constant at most `bound` for the uniform norm.
#[derive(Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    pub bound: f64,
    pub eval: fn(&[f64]) -> f64,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestFunction({}, K = {})", self.name, self.bound)
    }
}

impl TestFunction {
    pub fn call(&self, s: &[f64]) -> f64 {
        (self.eval)(s)
    }

    /// `g(s) = (1 - s_1) f(s)`.
    pub fn damped(&self, s: &[f64]) -> f64 {
        (1.0 - coord(s, 1)) * self.call(s)
    }
}

pub const CONSTANT_ONE: TestFunction = TestFunction {
    name: "one",
    bound: 1.0,
    eval: |_| 1.0,
};
pub const ZERO: TestFunction = TestFunction {
    name: "zero",
    bound: 0.0,
    eval: |_| 0.0,
};
pub const FIRST_MASS: TestFunction = TestFunction {
    name: "s1",
    bound: 1.0,
    eval: |s| coord(s, 1),
};

/// Twenty bounded Lipschitz functions of the leading masses.
pub fn lipschitz_suite() -> Vec<TestFunction> {
    use std::f64::consts::PI;
    let s2 = |s: &[f64]| coord(s, 2);
    let s3 = |s: &[f64]| coord(s, 3);
    vec![
        CONSTANT_ONE,
        TestFunction {
            name: "minus-half",
            bound: 0.5,
            eval: |_| -0.5,
        },
        FIRST_MASS,
        TestFunction {
            name: "s2",
            bound: 1.0,
            eval: s2,
        },
        TestFunction {
            name: "s3",
            bound: 1.0,
            eval: s3,
        },
        TestFunction {
            name: "one-minus-s1",
            bound: 1.0,
            eval: |s| 1.0 - coord(s, 1),
        },
        TestFunction {
            name: "s1-squared",
            bound: 2.0,
            eval: |s| coord(s, 1).powi(2),
        },
        TestFunction {
            name: "s1-times-s2",
            bound: 2.0,
            eval: |s| coord(s, 1) * coord(s, 2),
        },
        TestFunction {
            name: "sin-pi-s1",
            bound: PI,
            eval: |s| (PI * coord(s, 1)).sin(),
        },
        TestFunction {
            name: "cos-2pi-s1",
            bound: 2.0 * PI,
            eval: |s| (2.0 * PI * coord(s, 1)).cos(),
        },
        TestFunction {
            name: "exp-minus-s1",
            bound: 1.0,
            eval: |s| (-coord(s, 1)).exp(),
        },
        TestFunction {
            name: "abs-s1-minus-half",
            bound: 1.0,
            eval: |s| (coord(s, 1) - 0.5).abs(),
        },
        TestFunction {
            name: "clipped-s1",
            bound: 3.0,
            eval: |s| 3.0 * coord(s, 1).min(1.0 / 3.0),
        },
        TestFunction {
            name: "s1-plus-s2",
            bound: 2.0,
            eval: |s| coord(s, 1) + coord(s, 2),
        },
        TestFunction {
            name: "s1-minus-s2",
            bound: 2.0,
            eval: |s| coord(s, 1) - coord(s, 2),
        },
        TestFunction {
            name: "gap-s2-s3",
            bound: 2.0,
            eval: |s| (coord(s, 2) - coord(s, 3)).max(0.0),
        },
        TestFunction {
            name: "norm-s1-s2",
            bound: std::f64::consts::SQRT_2,
            eval: |s| coord(s, 1).hypot(coord(s, 2)),
        },
        TestFunction {
            name: "tanh-s1",
            bound: 5.0,
            eval: |s| (5.0 * (coord(s, 1) - 0.5)).tanh(),
        },
        TestFunction {
            name: "parabola-s1",
            bound: 4.0,
            eval: |s| 4.0 * coord(s, 1) * (1.0 - coord(s, 1)),
        },
        TestFunction {
            name: "squared-gap",
            bound: 4.0,
            eval: |s| (coord(s, 1) - coord(s, 2)).powi(2),
        },
    ]
}

/// `sqrt(m) q̄_m((1 - s_1) f)` for the exact root measure `atoms` of size `m`.
pub fn theorem_functional<C: Coeff>(m: usize, atoms: &[(Partition, C)], f: &TestFunction) -> f64 {
    let sum: f64 = atoms
        .iter()
        .map(|(l, w)| w.to_f64() * f.damped(&l.normalized()))
        .sum();
    (m as f64).sqrt() * sum
}

/// `q̄_m(h)` for an arbitrary function of the normalized partition.
pub fn normalized_expectation<C: Coeff, H: Fn(&[f64]) -> f64>(
    atoms: &[(Partition, C)],
    h: H,
) -> f64 {
    atoms
        .iter()
        .map(|(l, w)| w.to_f64() * h(&l.normalized()))
        .sum()
}

/// `sigma sqrt(xi(A)) sqrt(2 / pi)`, the limit of `sqrt(n) q̄_n(1 - s_1)`.
pub fn root_limit_target(sigma: f64, mass_a: f64) -> f64 {
    sigma * mass_a.sqrt() * (2.0 / std::f64::consts::PI).sqrt()
}

/// `∫_{1/2}^1 sqrt(2 / (pi s^3 (1-s)^3)) (1 - s) f(s, 1 - s) ds`.
///
/// Substituting `s = 1 - u^2` gives the smooth integrand
/// `2 sqrt(2/pi) s^{-3/2} f(s, 1 - s)` on `u ∈ [0, 1/sqrt 2]`.
pub fn nu2_functional(f: &TestFunction) -> f64 {
    let c = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
    let integrand = |u: f64| {
        let s = 1.0 - u * u;
        c * s.powf(-1.5) * f.call(&[s, 1.0 - s])
    };
    integrate(integrand, 0.0, std::f64::consts::FRAC_1_SQRT_2, 1e-10)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let center = f(mid);
    let mut kronrod = GK_WEIGHTS[7] * center;
    let mut gauss = GAUSS_WEIGHTS[3] * center;
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod quadrature with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        rec(f, a, mid, tol / 2.0, depth - 1) + rec(f, mid, b, tol / 2.0, depth - 1)
    }
    rec(&f, a, b, tol, 40)
}

/// Size-biased reordering: repeatedly picks an index with probability
/// proportional to its mass among those left; zero entries go last.
pub fn size_biased_reorder(s: &[f64], stream: &mut Stream) -> Result<Vec<f64>> {
    let total: f64 = s.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::Invalid(
            "size-biased pick needs positive mass".into(),
        ));
    }
    let mut left: Vec<f64> = s.iter().copied().filter(|&x| x > 0.0).collect();
    let zeros = s.len() - left.len();
    let mut out = Vec::with_capacity(s.len());
    while !left.is_empty() {
        let remaining: f64 = left.iter().sum();
        let u = stream.uniform() * remaining;
        let mut acc = 0.0;
        let mut pick = left.len() - 1;
        for (i, &x) in left.iter().enumerate() {
            acc += x;
            if u < acc {
                pick = i;
                break;
            }
        }
        out.push(left.remove(pick));
    }
    out.extend(std::iter::repeat_n(0.0, zeros));
    Ok(out)
}

/// `E[h(s*_1)]` for the first size-biased pick of `q̄_m`:
/// `sum_lambda q(lambda) sum_i s_i h(s_i)`.
pub fn size_biased_expectation<C: Coeff, H: Fn(f64) -> f64>(atoms: &[(Partition, C)], h: H) -> f64 {
    atoms
        .iter()
        .map(|(l, w)| w.to_f64() * l.normalized().iter().map(|&x| x * h(x)).sum::<f64>())
        .sum()
}

/// Distance from the root to a uniform vertex among those with out-degree
/// in `A`, for one exact draw of `T^A_n`.
pub fn sample_depth(tables: &SamplerTables<f64>, stream: &mut Stream) -> Result<usize> {
    let tree = sample_conditioned(tables, stream)?;
    let set = tables.set();
    let k = stream.below(tables.n());
    let depths = tree.depths();
    let v = (0..tree.len())
        .filter(|&v| set.contains(tree.degree(v)))
        .nth(k)
        .expect("the tree has exactly n counted vertices");
    Ok(depths[v])
}

/// `factor * d(root, V) / sqrt(n)` for `samples` independent draws. Draw
/// `i` uses child stream `i` of `stream`, so the output does not depend on
/// the number of worker threads.
pub fn depth_samples(
    tables: &SamplerTables<f64>,
    samples: usize,
    factor: f64,
    stream: &Stream,
) -> Result<Vec<f64>> {
    let scale = factor / (tables.n() as f64).sqrt();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut s = stream.split(i as u64);
            sample_depth(tables, &mut s).map(|d| d as f64 * scale)
        })
        .collect()
}

/// Kolmogorov-Smirnov two-sample statistic `sup |F_x - F_y|`.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Invalid("KS needs two non-empty samples".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Asymptotic 5% critical value `1.358 sqrt((n + m) / (n m))`.
pub fn ks_critical_5pct(n: usize, m: usize) -> f64 {
    1.358 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Empirical CDF evaluated at `grid`.
pub fn ecdf(values: &[f64], grid: &[f64]) -> Vec<[f64; 2]> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len().max(1) as f64;
    grid.iter()
        .map(|&x| [x, sorted.partition_point(|&v| v <= x) as f64 / n])
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Minimum expected count per bin; sparser bins are merged.
pub const MIN_EXPECTED: f64 = 5.0;

fn chi_p_value(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    dist.sf(statistic)
}

/// Goodness of fit of `observed` counts against category probabilities
/// `probs`. Mass missing from `probs` forms an extra category; bins are
/// merged in order until each expects at least five.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() {
        return Err(Error::Invalid(
            "observed and expected lengths differ".into(),
        ));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::Invalid("no observations".into()));
    }
    let n = total as f64;
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| (o as f64, p * n))
        .collect();
    let rest = (1.0 - probs.iter().sum::<f64>()).max(0.0) * n;
    if rest > 0.0 {
        cells.push((0.0, rest));
    }
    let merged = merge_sparse(cells, |c| c.1);
    let statistic = merged
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else { 0.0 })
        .sum();
    let dof = merged.len().saturating_sub(1);
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: chi_p_value(statistic, dof),
    })
}

/// Two-sample chi-square test of homogeneity over shared categories.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() {
        return Err(Error::Invalid("category counts differ".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Invalid("no observations".into()));
    }
    let cells: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64, y as f64))
        .collect();
    let ratio_a = na / (na + nb);
    let merged = merge_sparse(cells, |c| (c.0 + c.1) * ratio_a.min(1.0 - ratio_a));
    let mut statistic = 0.0;
    for &(x, y) in &merged {
        let pooled = x + y;
        if pooled == 0.0 {
            continue;
        }
        let ea = pooled * ratio_a;
        let eb = pooled - ea;
        statistic += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = merged.len().saturating_sub(1);
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: chi_p_value(statistic, dof),
    })
}

/// Merges adjacent cells until each has `weight >= MIN_EXPECTED`; a sparse
/// final group joins the previous one.
fn merge_sparse<W: Fn(&(f64, f64)) -> f64>(cells: Vec<(f64, f64)>, weight: W) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    let mut open = false;
    for c in cells {
        cur = (cur.0 + c.0, cur.1 + c.1);
        open = true;
        if weight(&cur) >= MIN_EXPECTED {
            out.push(cur);
            cur = (0.0, 0.0);
            open = false;
        }
    }
    if open {
        match out.last_mut() {
            Some(last) => *last = (last.0 + cur.0, last.1 + cur.1),
            None => out.push(cur),
        }
    }
    out
}
