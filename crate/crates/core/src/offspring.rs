//! Offspring distributions, their moments, and the derived law of the
//! hat-offspring for a degree set `A`.

use serde::{Deserialize, Serialize};

use crate::coeff::{parse_rational, ratio, Coeff, Rational};
use crate::degree_set::DegreeSet;
use crate::error::{Error, Result};
use crate::series::{poly_add, poly_mul, poly_sub, RatFn};

/// Float laws are accepted as normalized within this absolute tolerance.
pub const FLOAT_MASS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
enum Law<C> {
    /// `p_0, ..., p_K` with nothing beyond `K`.
    Finite(Vec<C>),
    /// `p_k = p (1 - p)^k`.
    Geometric(C),
    /// First coefficients of a law whose tail is not materialized.
    Truncated(Vec<C>),
}

/// A probability mass function on `{0, 1, 2, ...}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OffspringDist<C> {
    law: Law<C>,
}

/// Mean and variance of an offspring law.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments<C> {
    pub mean: C,
    pub variance: C,
}

/// `a(z) = sum_{k in A} p_k z^k` and `u(z) = sum_{k not in A} p_k z^k`,
/// written over the common denominator of the law's generating function:
/// `a = a_num / den`, `u = u_num / den`.
#[derive(Clone, Debug, PartialEq)]
pub struct GfSplit<C> {
    pub a_num: Vec<C>,
    pub u_num: Vec<C>,
    pub den: Vec<C>,
}

impl<C: Coeff> OffspringDist<C> {
    pub fn finite(probs: Vec<C>) -> Self {
        OffspringDist {
            law: Law::Finite(crate::series::trim(probs)),
        }
    }

    /// Geometric law `p_k = p (1-p)^k` on `{0,1,...}`; critical at `p = 1/2`.
    pub fn geometric(p: C) -> Self {
        OffspringDist {
            law: Law::Geometric(p),
        }
    }

    /// A law known only through its first coefficients.
    pub fn truncated(coeffs: Vec<C>) -> Self {
        OffspringDist {
            law: Law::Truncated(coeffs),
        }
    }

    /// `p_0 = p_2 = 1/2`.
    pub fn binary() -> Self {
        let half = C::from_rational(&ratio(1, 2));
        Self::finite(vec![half.clone(), C::zero(), half])
    }

    /// Point mass at zero children.
    pub fn dirac_zero() -> Self {
        Self::finite(vec![C::one()])
    }

    /// The parameter `p` of a geometric law.
    pub fn geometric_param(&self) -> Option<&C> {
        match &self.law {
            Law::Geometric(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self.law, Law::Truncated(_))
    }

    /// Number of known coefficients minus one, for truncated laws.
    pub fn known_order(&self) -> Option<usize> {
        match &self.law {
            Law::Truncated(c) => Some(c.len().saturating_sub(1)),
            _ => None,
        }
    }

    /// Largest degree with positive mass, when the support is known to be
    /// finite.
    pub fn support_max(&self) -> Option<usize> {
        match &self.law {
            Law::Finite(c) => Some(c.len() - 1),
            _ => None,
        }
    }

    /// `p_k`. Truncated laws report zero beyond their known order.
    pub fn prob(&self, k: usize) -> C {
        match &self.law {
            Law::Finite(c) | Law::Truncated(c) => c.get(k).cloned().unwrap_or_else(C::zero),
            Law::Geometric(p) => {
                let q = C::one() - p.clone();
                p.clone() * num_traits::pow(q, k)
            }
        }
    }

    /// `p_0, ..., p_n`.
    pub fn coeffs_upto(&self, n: usize) -> Result<Vec<C>> {
        match &self.law {
            Law::Truncated(c) if c.len() < n + 1 => Err(Error::TruncationTooShort {
                known: c.len().saturating_sub(1),
                needed: n,
            }),
            Law::Geometric(p) => {
                let q = C::one() - p.clone();
                let mut out = Vec::with_capacity(n + 1);
                let mut cur = p.clone();
                for _ in 0..=n {
                    out.push(cur.clone());
                    cur = cur.mul_ref(&q);
                }
                Ok(out)
            }
            _ => Ok((0..=n).map(|k| self.prob(k)).collect()),
        }
    }

    /// Generating function as `num / den`; `None` for truncated laws.
    pub fn gf(&self) -> Option<RatFn<C>> {
        match &self.law {
            Law::Finite(c) => Some(RatFn::polynomial(c.clone())),
            Law::Geometric(p) => {
                let q = C::one() - p.clone();
                Some(RatFn::new(vec![p.clone()], vec![C::one(), -q]).expect("den(0) = 1"))
            }
            Law::Truncated(_) => None,
        }
    }

    /// Mean and variance. Exact for exact coefficients; for truncated laws
    /// these are partial sums over the known coefficients.
    pub fn moments(&self) -> Moments<C> {
        match &self.law {
            Law::Finite(c) | Law::Truncated(c) => {
                let mean = C::sum_iter(
                    c.iter()
                        .enumerate()
                        .map(|(k, p)| p.mul_ref(&C::from_usize(k))),
                );
                let second = C::sum_iter(
                    c.iter()
                        .enumerate()
                        .map(|(k, p)| p.mul_ref(&C::from_usize(k * k))),
                );
                let variance = second - mean.mul_ref(&mean);
                Moments { mean, variance }
            }
            Law::Geometric(p) => {
                let q = C::one() - p.clone();
                let mean = q.div_ref(p);
                let variance = q / (p.mul_ref(p));
                Moments { mean, variance }
            }
        }
    }

    pub fn mean(&self) -> C {
        self.moments().mean
    }

    pub fn variance(&self) -> C {
        self.moments().variance
    }

    /// Size-biased mass `k p_k` (unnormalized; a probability when the mean
    /// is one).
    pub fn size_biased(&self, k: usize) -> C {
        C::from_usize(k) * self.prob(k)
    }

    /// `xi(A)`: mass of the degrees in `A`. Partial for truncated laws.
    pub fn mass_in(&self, set: &DegreeSet) -> C {
        match &self.law {
            Law::Finite(c) | Law::Truncated(c) => C::sum_iter(
                c.iter()
                    .enumerate()
                    .filter(|(k, _)| set.contains(*k))
                    .map(|(_, p)| p.clone()),
            ),
            Law::Geometric(p) => {
                let q = C::one() - p.clone();
                let listed = C::sum_iter(set.listed().map(|k| self.prob(k)));
                match set.tail_from() {
                    Some(from) => listed + num_traits::pow(q, from),
                    None => listed,
                }
            }
        }
    }

    /// Checks the standing assumptions on offspring laws: nonnegative,
    /// normalized, `xi_1 < 1`, `xi_0 > 0`, mean at most one.
    pub fn validate(&self) -> Result<()> {
        let total = match &self.law {
            Law::Finite(c) | Law::Truncated(c) => {
                if let Some(i) = c.iter().position(|p| p.is_negative()) {
                    return Err(Error::NegativeMass { index: i });
                }
                C::sum_iter(c.iter().cloned())
            }
            Law::Geometric(p) => {
                if p.is_negative() || p.is_zero() || *p > C::one() {
                    return Err(Error::NotNormalized { total: p.render() });
                }
                C::one()
            }
        };
        let normalized = match &self.law {
            Law::Truncated(_) => total.to_f64() <= 1.0 + FLOAT_MASS_TOL,
            _ => total.approx_eq(&C::one(), FLOAT_MASS_TOL),
        };
        if !normalized {
            return Err(Error::NotNormalized {
                total: total.render(),
            });
        }
        if self.prob(1).approx_eq(&C::one(), FLOAT_MASS_TOL) {
            return Err(Error::DegenerateOneChild);
        }
        if self.prob(0).is_zero() || (!C::EXACT && self.prob(0).to_f64() <= 0.0) {
            return Err(Error::NoLeaves);
        }
        let mean = self.mean();
        let supercritical = if C::EXACT {
            mean > C::one()
        } else {
            mean.to_f64() > 1.0 + FLOAT_MASS_TOL
        };
        if supercritical {
            return Err(Error::Supercritical {
                mean: mean.render(),
            });
        }
        Ok(())
    }

    pub fn is_critical(&self) -> bool {
        self.mean().approx_eq(&C::one(), FLOAT_MASS_TOL)
    }

    pub fn to_f64(&self) -> OffspringDist<f64> {
        let conv = |v: &[C]| v.iter().map(Coeff::to_f64).collect::<Vec<f64>>();
        let law = match &self.law {
            Law::Finite(c) => Law::Finite(conv(c)),
            Law::Geometric(p) => Law::Geometric(p.to_f64()),
            Law::Truncated(c) => Law::Truncated(conv(c)),
        };
        OffspringDist { law }
    }

    /// Splits the generating function by membership of degrees in `A`.
    pub fn split_gf(&self, set: &DegreeSet) -> Result<GfSplit<C>> {
        set.require_zero()?;
        let gf = self.gf().ok_or_else(|| {
            Error::Invalid("a truncated law has no closed-form generating function".into())
        })?;
        let num = gf.num().to_vec();
        let den = gf.den().to_vec();
        let (a_num, u_num) = match set.tail_from() {
            None => {
                let max = set.max_listed().unwrap_or(0);
                let poly_a: Vec<C> = (0..=max)
                    .map(|k| {
                        if set.contains(k) {
                            self.prob(k)
                        } else {
                            C::zero()
                        }
                    })
                    .collect();
                let a_num = poly_mul(&den, &poly_a);
                let u_num = poly_sub(&num, &a_num);
                (a_num, u_num)
            }
            Some(from) => {
                let head: Vec<C> = (0..from).map(|k| self.prob(k)).collect();
                let tail_num = poly_sub(&num, &poly_mul(&den, &head));
                let listed: Vec<C> = (0..from)
                    .map(|k| {
                        if set.contains(k) {
                            self.prob(k)
                        } else {
                            C::zero()
                        }
                    })
                    .collect();
                let missing: Vec<C> = (0..from)
                    .map(|k| {
                        if set.contains(k) {
                            C::zero()
                        } else {
                            self.prob(k)
                        }
                    })
                    .collect();
                let a_num = poly_add(&poly_mul(&den, &listed), &tail_num);
                let u_num = poly_mul(&den, &missing);
                (a_num, u_num)
            }
        };
        Ok(GfSplit { a_num, u_num, den })
    }

    /// Exact generating function of the hat-offspring law for the hitting
    /// rule of `A`: `z a(z) / (z - u(z))`.
    pub fn derived_gf(&self, set: &DegreeSet) -> Result<RatFn<C>> {
        let GfSplit { a_num, u_num, den } = self.split_gf(set)?;
        debug_assert!(u_num[0].is_zero(), "0 in A forces u(0) = 0");
        // u / z over the same denominator.
        let u_shift: Vec<C> = if u_num.len() > 1 {
            u_num[1..].to_vec()
        } else {
            vec![C::zero()]
        };
        RatFn::new(a_num, poly_sub(&den, &u_shift))
    }

    /// First `order + 1` coefficients of the hat-offspring law. Returns the
    /// law itself when `A` contains its whole support.
    pub fn derived_dist(&self, set: &DegreeSet, order: usize) -> Result<OffspringDist<C>> {
        set.require_zero()?;
        let covers = match &self.law {
            Law::Finite(c) => c
                .iter()
                .enumerate()
                .all(|(k, p)| p.is_zero() || set.contains(k)),
            Law::Geometric(_) => set.is_all(),
            Law::Truncated(_) => {
                return Err(Error::Invalid("derived law of a truncated law".into()));
            }
        };
        if covers {
            return Ok(self.clone());
        }
        let gf = self.derived_gf(set)?;
        Ok(OffspringDist::truncated(gf.series(order).into_coeffs()))
    }

    /// Mean and variance of the hat-offspring for the hitting rule of `A`:
    /// `(1, sigma^2 / xi(A))` for a critical law.
    pub fn hat_moments(&self, set: &DegreeSet) -> Result<(C, C)> {
        set.require_zero()?;
        if self.is_truncated() {
            return Err(Error::MomentUnavailable("truncated law".into()));
        }
        let Moments { mean, variance } = self.moments();
        if !self.is_critical() {
            return Err(Error::NotCritical {
                mean: mean.render(),
            });
        }
        Ok((C::one(), variance / self.mass_in(set)))
    }
}

impl OffspringDist<Rational> {
    pub fn describe(&self) -> String {
        match &self.law {
            Law::Finite(c) if *c == OffspringDist::<Rational>::binary().coeffs_upto(2).unwrap() => {
                "binary".to_string()
            }
            Law::Geometric(p) => format!("geometric({p})"),
            Law::Finite(c) | Law::Truncated(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                format!("probs[{}]", parts.join(","))
            }
        }
    }
}

/// JSON description of an offspring law:
/// `{"family":"binary"}`, `{"family":"geometric","p":"1/2"}`, or
/// `{"probs":["1/2","0","1/2"]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistSpec {
    Family {
        family: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<String>,
    },
    Probs {
        probs: Vec<String>,
    },
}

impl DistSpec {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::BadDistSpec(e.to_string()))
    }

    pub fn binary() -> Self {
        DistSpec::Family {
            family: "binary".into(),
            p: None,
        }
    }

    pub fn geometric(p: &str) -> Self {
        DistSpec::Family {
            family: "geometric".into(),
            p: Some(p.into()),
        }
    }

    /// Builds and validates the exact law.
    pub fn build(&self) -> Result<OffspringDist<Rational>> {
        let dist = match self {
            DistSpec::Family { family, p } => match family.as_str() {
                "binary" => OffspringDist::binary(),
                "geometric" => {
                    let p = p
                        .as_deref()
                        .map(parse_rational)
                        .transpose()?
                        .unwrap_or_else(|| ratio(1, 2));
                    OffspringDist::geometric(p)
                }
                "dirac0" => OffspringDist::dirac_zero(),
                other => return Err(Error::BadDistSpec(format!("unknown family {other:?}"))),
            },
            DistSpec::Probs { probs } => {
                let coeffs = probs
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()?;
                if coeffs.is_empty() {
                    return Err(Error::BadDistSpec("empty probs".into()));
                }
                OffspringDist::finite(coeffs)
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    fn geo_half() -> OffspringDist<Rational> {
        OffspringDist::geometric(r(1, 2))
    }

    #[test]
    fn validate_accepts_binary() {
        assert_eq!(OffspringDist::<Rational>::binary().validate(), Ok(()));
        assert_eq!(geo_half().validate(), Ok(()));
    }

    #[test]
    fn validate_error_codes_are_distinct() {
        let super_crit = OffspringDist::finite(vec![r(1, 5), r(0, 1), r(4, 5)]);
        assert!(matches!(
            super_crit.validate(),
            Err(Error::Supercritical { .. })
        ));
        let one_child = OffspringDist::finite(vec![r(0, 1), r(1, 1)]);
        assert_eq!(one_child.validate(), Err(Error::DegenerateOneChild));
        let no_leaves = OffspringDist::finite(vec![r(0, 1), r(1, 2), r(1, 2)]);
        assert_eq!(no_leaves.validate(), Err(Error::NoLeaves));
        let unnormalized = OffspringDist::finite(vec![r(1, 2), r(1, 4)]);
        assert!(matches!(
            unnormalized.validate(),
            Err(Error::NotNormalized { .. })
        ));
        let negative = OffspringDist::finite(vec![r(3, 2), r(-1, 2)]);
        assert!(matches!(
            negative.validate(),
            Err(Error::NegativeMass { index: 1 })
        ));
        assert!(OffspringDist::geometric(r(1, 3)).validate().is_err());
    }

    #[test]
    fn float_law_normalized_within_tolerance() {
        let d = OffspringDist::finite(vec![0.5 + 1e-14, 0.0, 0.5]);
        assert_eq!(d.validate(), Ok(()));
        let d = OffspringDist::finite(vec![0.5 + 1e-9, 0.0, 0.5]);
        assert!(d.validate().is_err());
    }

    #[test]
    fn moments_of_named_laws() {
        let b = OffspringDist::<Rational>::binary().moments();
        assert_eq!((b.mean, b.variance), (r(1, 1), r(1, 1)));
        assert_eq!(OffspringDist::<Rational>::binary().size_biased(2), r(1, 1));
        let g = geo_half().moments();
        assert_eq!((g.mean, g.variance), (r(1, 1), r(2, 1)));
        let d = OffspringDist::<Rational>::dirac_zero().moments();
        assert_eq!((d.mean, d.variance), (r(0, 1), r(0, 1)));
    }

    #[test]
    fn geometric_moments_match_direct_sums() {
        let g = geo_half();
        let coeffs = g.coeffs_upto(200).unwrap();
        let direct =
            OffspringDist::truncated(coeffs.iter().map(|c| c.to_f64()).collect()).moments();
        assert!((direct.mean - 1.0).abs() < 1e-12);
        assert!((direct.variance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mass_in_sets() {
        let g = geo_half();
        assert_eq!(g.mass_in(&DegreeSet::leaves()), r(1, 2));
        assert_eq!(g.mass_in(&DegreeSet::all()), r(1, 1));
        assert_eq!(g.mass_in(&DegreeSet::with_tail([0], 2)), r(3, 4));
        let b = OffspringDist::<Rational>::binary();
        assert_eq!(b.mass_in(&DegreeSet::finite([0, 1])), r(1, 2));
    }

    #[test]
    fn derived_binary_leaves_is_geometric_half() {
        let z = OffspringDist::<Rational>::binary()
            .derived_dist(&DegreeSet::leaves(), 12)
            .unwrap();
        for k in 0..=12 {
            assert_eq!(z.prob(k), r(1, 1 << (k + 1)));
        }
    }

    #[test]
    fn derived_geometric_leaves() {
        let z = geo_half().derived_dist(&DegreeSet::leaves(), 10).unwrap();
        assert_eq!(z.prob(0), r(2, 3));
        let mut expected = r(1, 9);
        for k in 1..=10 {
            assert_eq!(z.prob(k), expected);
            expected *= r(2, 3);
        }
    }

    #[test]
    fn derived_is_identity_when_set_covers_support() {
        let b = OffspringDist::<Rational>::binary();
        assert_eq!(b.derived_dist(&DegreeSet::all(), 5).unwrap(), b);
        assert_eq!(b.derived_dist(&DegreeSet::finite([0, 2]), 5).unwrap(), b);
        assert_eq!(
            geo_half().derived_dist(&DegreeSet::all(), 5).unwrap(),
            geo_half()
        );
    }

    #[test]
    fn derived_rejects_set_without_zero() {
        let b = OffspringDist::<Rational>::binary();
        assert_eq!(
            b.derived_dist(&DegreeSet::finite([2]), 5),
            Err(Error::SetMissingZero)
        );
    }

    #[test]
    fn hat_moments_examples() {
        let b = OffspringDist::<Rational>::binary();
        assert_eq!(
            b.hat_moments(&DegreeSet::leaves()).unwrap(),
            (r(1, 1), r(2, 1))
        );
        assert_eq!(
            b.hat_moments(&DegreeSet::all()).unwrap(),
            (r(1, 1), r(1, 1))
        );
        assert_eq!(
            geo_half().hat_moments(&DegreeSet::leaves()).unwrap(),
            (r(1, 1), r(4, 1))
        );
        let sub = OffspringDist::finite(vec![r(3, 4), r(0, 1), r(1, 4)]);
        assert!(matches!(
            sub.hat_moments(&DegreeSet::leaves()),
            Err(Error::NotCritical { .. })
        ));
    }

    #[test]
    fn dist_spec_json_forms() {
        assert_eq!(
            DistSpec::parse(r#"{"family":"binary"}"#)
                .unwrap()
                .build()
                .unwrap(),
            OffspringDist::binary()
        );
        assert_eq!(
            DistSpec::parse(r#"{"family":"geometric","p":"1/2"}"#)
                .unwrap()
                .build()
                .unwrap(),
            geo_half()
        );
        assert_eq!(
            DistSpec::parse(r#"{"probs":["1/2","0","1/2"]}"#)
                .unwrap()
                .build()
                .unwrap(),
            OffspringDist::binary()
        );
        assert!(DistSpec::parse(r#"{"family":"nope"}"#)
            .unwrap()
            .build()
            .is_err());
        assert!(DistSpec::parse(r#"{"probs":["1/5","0","4/5"]}"#)
            .unwrap()
            .build()
            .is_err());
        assert!(DistSpec::parse("[1,2]").is_err());
    }
}
