//! Truncated power series and rational generating functions.

use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// Power series `c_0 + c_1 z + ... + c_N z^N + O(z^{N+1})`.
///
/// All arithmetic is exact up to the truncation order when the coefficient
/// backend is exact. Binary operations truncate to the smaller order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> ProbSeries<C> {
    /// Builds a series of order `order`, padding or cutting `coeffs`.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        ProbSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        ProbSeries {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(C::one(), 0, order)
    }

    /// `c z^k` truncated at `order`.
    pub fn monomial(c: C, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// `[z^k]`, zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| self.coeffs[k].add_ref(&other.coeffs[k]))
            .collect();
        ProbSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| self.coeffs[k].sub_ref(&other.coeffs[k]))
            .collect();
        ProbSeries { coeffs }
    }

    pub fn scale(&self, c: &C) -> Self {
        ProbSeries {
            coeffs: self.coeffs.iter().map(|x| x.mul_ref(c)).collect(),
        }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let coeffs = (0..=order)
            .map(|k| {
                C::sum_iter(
                    (0..=k)
                        .filter(|&i| !a[i].is_zero() && !b[k - i].is_zero())
                        .map(|i| a[i].mul_ref(&b[k - i])),
                )
            })
            .collect();
        ProbSeries { coeffs }
    }

    /// Multiplicative inverse by the convolution recurrence
    /// `b_0 = 1/a_0`, `b_k = -(sum_{i=1..k} a_i b_{k-i}) / a_0`.
    pub fn recip(&self) -> Result<Self> {
        let a = &self.coeffs;
        if a[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv0 = C::one().div_ref(&a[0]);
        let mut b: Vec<C> = Vec::with_capacity(a.len());
        b.push(inv0.clone());
        for k in 1..a.len() {
            let s = C::sum_iter(
                (1..=k)
                    .filter(|&i| !a[i].is_zero())
                    .map(|i| a[i].mul_ref(&b[k - i])),
            );
            b.push(-(s.mul_ref(&inv0)));
        }
        Ok(ProbSeries { coeffs: b })
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: usize) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplies by `z^k` (keeps the order).
    pub fn shift_up(&self, k: usize) -> Self {
        let order = self.order();
        let mut coeffs = vec![C::zero(); order + 1];
        for i in 0..=order {
            if i + k <= order {
                coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        ProbSeries { coeffs }
    }

    /// Evaluates the polynomial `poly` at this series by Horner's rule.
    pub fn compose_poly(&self, poly: &[C]) -> Self {
        let order = self.order();
        let mut acc = Self::zero(order);
        for c in poly.iter().rev() {
            acc = acc.mul(self);
            acc.coeffs[0] = acc.coeffs[0].add_ref(c);
        }
        acc
    }

    /// Sum of stored coefficients (the value at `z = 1` of the truncation).
    pub fn partial_sum(&self) -> C {
        C::sum_iter(self.coeffs.iter().cloned())
    }
}

/// Rational generating function `num(z) / den(z)` with `den(0) != 0`.
///
/// Every offspring family the crate supports (finite support, geometric)
/// and every derived law has a generating function of this form, which lets
/// the exact code expand coefficients to any order without truncation
/// bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn<C> {
    num: Vec<C>,
    den: Vec<C>,
}

impl<C: Coeff> RatFn<C> {
    pub fn new(num: Vec<C>, den: Vec<C>) -> Result<Self> {
        if den.first().is_none_or(|d| d.is_zero()) {
            return Err(Error::NotInvertible);
        }
        Ok(RatFn {
            num: trim(num),
            den: trim(den),
        })
    }

    pub fn polynomial(num: Vec<C>) -> Self {
        RatFn {
            num: trim(num),
            den: vec![C::one()],
        }
    }

    pub fn num(&self) -> &[C] {
        &self.num
    }

    pub fn den(&self) -> &[C] {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    /// Taylor coefficients up to `order`.
    pub fn series(&self, order: usize) -> ProbSeries<C> {
        let num = ProbSeries::new(self.num.clone(), order);
        let den = ProbSeries::new(self.den.clone(), order);
        // den(0) != 0 is enforced at construction.
        num.mul(&den.recip().expect("nonzero constant term"))
    }

    /// Value at `z = 1`.
    pub fn at_one(&self) -> C {
        C::sum_iter(self.num.iter().cloned()) / C::sum_iter(self.den.iter().cloned())
    }

    /// Composition `self(s)` for a series `s` with `den(s(0)) != 0`.
    pub fn compose(&self, s: &ProbSeries<C>) -> Result<ProbSeries<C>> {
        let n = s.compose_poly(&self.num);
        let d = s.compose_poly(&self.den);
        Ok(n.mul(&d.recip()?))
    }
}

pub(crate) fn trim<C: Coeff>(mut v: Vec<C>) -> Vec<C> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        v.push(C::zero());
    }
    v
}

/// Polynomial product (no truncation).
pub(crate) fn poly_mul<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    if a.is_empty() || b.is_empty() {
        return vec![C::zero()];
    }
    let mut out = vec![C::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
        }
    }
    trim(out)
}

pub(crate) fn poly_add<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(C::zero);
            let y = b.get(i).cloned().unwrap_or_else(C::zero);
            x + y
        })
        .collect();
    trim(out)
}

pub(crate) fn poly_sub<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let neg: Vec<C> = b.iter().map(|c| -c.clone()).collect();
    poly_add(a, &neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ratio, Rational};

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn reciprocal_of_one_minus_half_z_is_geometric() {
        let s = ProbSeries::new(vec![r(1, 1), r(-1, 2)], 6);
        let inv = s.recip().unwrap();
        for k in 0..=6 {
            assert_eq!(inv.coeff(k), r(1, 1 << k));
        }
        assert_eq!(s.mul(&inv), ProbSeries::one(6));
    }

    #[test]
    fn recip_rejects_zero_constant() {
        let s = ProbSeries::new(vec![r(0, 1), r(1, 1)], 3);
        assert_eq!(s.recip(), Err(Error::NotInvertible));
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let s = ProbSeries::new(vec![r(1, 3), r(1, 3), r(1, 3)], 8);
        let mut direct = ProbSeries::one(8);
        for _ in 0..5 {
            direct = direct.mul(&s);
        }
        assert_eq!(s.pow(5), direct);
    }

    #[test]
    fn compose_poly_horner() {
        // (1 + y)^2 at y = z gives 1 + 2z + z^2.
        let z = ProbSeries::monomial(r(1, 1), 1, 4);
        let out = z.compose_poly(&[r(1, 1), r(2, 1), r(1, 1)]);
        assert_eq!(out.coeffs()[..3], [r(1, 1), r(2, 1), r(1, 1)]);
        assert!(out.coeffs()[3..].iter().all(|c| *c == r(0, 1)));
    }

    #[test]
    fn ratfn_series_and_value_at_one() {
        // (2 - z) / (3 - 2z)
        let f = RatFn::new(vec![r(2, 1), r(-1, 1)], vec![r(3, 1), r(-2, 1)]).unwrap();
        let s = f.series(4);
        assert_eq!(s.coeff(0), r(2, 3));
        assert_eq!(s.coeff(1), r(1, 9));
        assert_eq!(s.coeff(2), r(2, 27));
        assert_eq!(f.at_one(), r(1, 1));
    }

    #[test]
    fn float_backend_agrees_with_exact() {
        let s = ProbSeries::new(vec![0.5, 0.0, 0.5], 10);
        let inv = s.recip().unwrap();
        let back = s.mul(&inv);
        assert!((back.coeff(0) - 1.0).abs() < 1e-15);
        assert!(back.coeffs()[1..].iter().all(|c| c.abs() < 1e-12));
    }
}
