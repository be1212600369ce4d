//! Recurrence in the twist, symplectic volume, and the large-twist ratio
//! `Q/Vol` against its Bernoulli series. Everything here is exact.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::binomial;
use crate::decimal;
use crate::error::{Error, Result};
use crate::polytope::FibrationParams;
use crate::quantization::quantization_dimension;

pub type ExactRational = BigRational;

/// Sign convention for `B_1`; every other Bernoulli number agrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BernoulliConvention {
    /// `B_1 = +1/2`, the convention under which `Σ_{i=1}^{b} i^d` expands.
    #[default]
    BPlus,
    /// `B_1 = −1/2`.
    BMinus,
}

impl fmt::Display for BernoulliConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BernoulliConvention::BPlus => "b_plus",
            BernoulliConvention::BMinus => "b_minus",
        })
    }
}

fn rational(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// First differences `P(n+1) − P(n)`.
pub fn finite_difference(values: &[BigInt]) -> Result<Vec<BigInt>> {
    if values.len() < 2 {
        return Err(Error::SequenceTooShort {
            needed: 2,
            got: values.len(),
        });
    }
    Ok(values.windows(2).map(|w| &w[1] - &w[0]).collect())
}

/// Applies [`finite_difference`] `times` times.
pub fn iterated_difference(values: &[BigInt], times: usize) -> Result<Vec<BigInt>> {
    if values.len() < times + 1 {
        return Err(Error::SequenceTooShort {
            needed: times + 1,
            got: values.len(),
        });
    }
    let mut cur = values.to_vec();
    for _ in 0..times {
        cur = finite_difference(&cur)?;
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub d: u64,
    pub a: u64,
    pub b: u64,
    pub n0: u64,
    /// `Q(n0), …, Q(n0 + d + 1)`.
    #[serde(with = "decimal::biguint_vec")]
    pub values: Vec<BigUint>,
    /// `Σ_{k=0}^{d+1} (−1)^k C(d+1, k) Q(n0 + d + 1 − k)`.
    #[serde(with = "decimal::bigint")]
    pub residual: BigInt,
}

pub fn recurrence_residual(d: u64, a: u64, b: u64, n0: u64) -> Result<RecurrenceReport> {
    let family = FibrationParams::new(d, a, b, n0)?;
    let values = (0..=d + 1)
        .map(|j| Ok(quantization_dimension(family.with_twist(n0 + j)?).dimension))
        .collect::<Result<Vec<_>>>()?;
    let residual = (0..=d + 1)
        .map(|k| {
            let term = BigInt::from(binomial(d + 1, k)) * BigInt::from(values[(d + 1 - k) as usize].clone());
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    Ok(RecurrenceReport {
        d,
        a,
        b,
        n0,
        values,
        residual,
    })
}

/// Euclidean volume of the moment polytope:
/// `((a + nb)^{d+1} − a^{d+1}) / ((d+1)!·n)` for `n ≥ 1`, and the prism
/// volume `a^d·b / d!` for `n = 0`.
pub fn symplectic_volume(p: FibrationParams) -> ExactRational {
    let (d, a, b, n) = (p.d(), p.a(), p.b(), p.n());
    let a_big = BigInt::from(a);
    if n == 0 {
        let num = num_traits::pow(a_big, d as usize) * b;
        return BigRational::new(num, factorial(d).into());
    }
    let top = BigInt::from(p.base_edge());
    let exp = (d + 1) as usize;
    let num = num_traits::pow(top, exp) - num_traits::pow(a_big, exp);
    BigRational::new(num, BigInt::from(factorial(d + 1)) * n)
}

/// Volume as `∫_0^b (a + n(b − t))^d / d! dt`, integrating the expanded
/// slice polynomial term by term.
pub fn slice_integral_volume(p: FibrationParams) -> ExactRational {
    let (d, b, n) = (p.d(), p.b(), p.n());
    let top = BigInt::from(p.base_edge());
    let minus_n = -BigInt::from(n);
    let b_big = BigInt::from(b);
    // (top − n t)^d = Σ_k C(d,k) top^{d−k} (−n)^k t^k, ∫_0^b t^k = b^{k+1}/(k+1)
    let integral: BigRational = (0..=d)
        .map(|k| {
            let coeff = BigInt::from(binomial(d, k))
                * num_traits::pow(top.clone(), (d - k) as usize)
                * num_traits::pow(minus_n.clone(), k as usize);
            let antiderivative = num_traits::pow(b_big.clone(), (k + 1) as usize);
            BigRational::new(coeff * antiderivative, BigInt::from(k + 1))
        })
        .sum();
    integral / rational(factorial(d))
}

/// `B_0, …, B_k` from `Σ_{j=0}^{m} C(m+1, j) B_j = 0`.
pub fn bernoulli_numbers(k: u64, convention: BernoulliConvention) -> Vec<ExactRational> {
    let mut out: Vec<BigRational> = Vec::with_capacity(k as usize + 1);
    out.push(BigRational::one());
    for m in 1..=k {
        let s: BigRational = (0..m)
            .map(|j| rational(binomial(m + 1, j)) * &out[j as usize])
            .sum();
        out.push(-s / rational(m + 1));
    }
    if convention == BernoulliConvention::BPlus && k >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

pub fn bernoulli(k: u64, convention: BernoulliConvention) -> ExactRational {
    bernoulli_numbers(k, convention).pop().expect("nonempty")
}

/// Coefficients `c_k = C(d+1, k)·B_k` of `b^{−k}`, `k = 0..=d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    pub d: u64,
    pub convention: BernoulliConvention,
    #[serde(with = "decimal::rational_vec")]
    pub coefficients: Vec<ExactRational>,
}

impl AsymptoticSeries {
    /// `Σ_k c_k b^{−k}`.
    pub fn evaluate(&self, b: u64) -> Result<ExactRational> {
        if b == 0 {
            return Err(Error::InvalidParameter("series in 1/b needs b ≥ 1".into()));
        }
        let inv = BigRational::new(BigInt::one(), BigInt::from(b));
        let mut power = BigRational::one();
        let mut acc = BigRational::zero();
        for c in &self.coefficients {
            acc += c * &power;
            power *= &inv;
        }
        Ok(acc)
    }
}

pub fn asymptotic_series(d: u64, convention: BernoulliConvention) -> Result<AsymptoticSeries> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let coefficients = bernoulli_numbers(d, convention)
        .into_iter()
        .enumerate()
        .map(|(k, bk)| rational(binomial(d + 1, k as u64)) * bk)
        .collect();
    Ok(AsymptoticSeries {
        d,
        convention,
        coefficients,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u64,
    #[serde(with = "decimal::rational")]
    pub ratio: ExactRational,
    #[serde(with = "decimal::rational")]
    pub series_value: ExactRational,
    #[serde(with = "decimal::rational")]
    pub gap: ExactRational,
}

/// `Q(n)/Vol(n)` against the series value for each twist in `n_list`.
/// Rows follow the order of `n_list`.
pub fn ratio_convergence(
    a: u64,
    b: u64,
    d: u64,
    n_list: &[u64],
    convention: BernoulliConvention,
) -> Result<Vec<ConvergenceRow>> {
    if b == 0 {
        return Err(Error::InvalidParameter("ratio convergence needs b ≥ 1".into()));
    }
    if n_list.contains(&0) {
        return Err(Error::InvalidParameter(
            "twist n = 0 has no large-twist ratio".into(),
        ));
    }
    let series_value = asymptotic_series(d, convention)?.evaluate(b)?;
    let params = n_list
        .iter()
        .map(|&n| FibrationParams::new(d, a, b, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(params
        .into_par_iter()
        .map(|p| {
            let count = rational(quantization_dimension(p).dimension);
            let ratio = count / symplectic_volume(p);
            let gap = (&ratio - &series_value).abs();
            ConvergenceRow {
                n: p.n(),
                ratio,
                series_value: series_value.clone(),
                gap,
            }
        })
        .collect())
}

/// CSV table with header `n,ratio_num,ratio_den,series_num,series_den,gap_num,gap_den`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,ratio_num,ratio_den,series_num,series_den,gap_num,gap_den\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.ratio.numer(),
            r.ratio.denom(),
            r.series_value.numer(),
            r.series_value.denom(),
            r.gap.numer(),
            r.gap.denom()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib(d: u64, a: u64, b: u64, n: u64) -> FibrationParams {
        FibrationParams::new(d, a, b, n).unwrap()
    }

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn differences() {
        assert_eq!(finite_difference(&ints(&[6, 9, 12, 15])).unwrap(), ints(&[3, 3, 3]));
        assert_eq!(finite_difference(&ints(&[1, 3, 6, 10])).unwrap(), ints(&[2, 3, 4]));
        assert_eq!(
            finite_difference(&ints(&[1])),
            Err(Error::SequenceTooShort { needed: 2, got: 1 })
        );
        let qs: Vec<BigInt> = (0..4)
            .map(|n| BigInt::from(quantization_dimension(fib(1, 1, 2, n)).dimension))
            .collect();
        assert_eq!(qs, ints(&[6, 9, 12, 15]));
        assert_eq!(finite_difference(&qs).unwrap(), ints(&[3, 3, 3]));
    }

    #[test]
    fn recurrence_examples() {
        assert!(recurrence_residual(1, 1, 2, 0).unwrap().residual.is_zero());
        assert!(recurrence_residual(2, 0, 1, 0).unwrap().residual.is_zero());
        let r = recurrence_residual(3, 2, 3, 5).unwrap();
        assert_eq!(r.values.len(), 5);
        assert!(r.residual.is_zero());
    }

    #[test]
    fn volume_examples() {
        assert_eq!(symplectic_volume(fib(1, 1, 2, 1)), q(4, 1));
        assert_eq!(symplectic_volume(fib(1, 1, 2, 0)), q(2, 1));
        assert_eq!(symplectic_volume(fib(2, 0, 1, 1)), q(1, 6));
        assert_eq!(slice_integral_volume(fib(1, 1, 2, 1)), q(4, 1));
        assert_eq!(slice_integral_volume(fib(1, 1, 2, 0)), q(2, 1));
        assert_eq!(slice_integral_volume(fib(2, 0, 1, 1)), q(1, 6));
    }

    #[test]
    fn bernoulli_values() {
        use BernoulliConvention::*;
        assert_eq!(bernoulli(0, BPlus), q(1, 1));
        assert_eq!(bernoulli(0, BMinus), q(1, 1));
        assert_eq!(bernoulli(1, BMinus), q(-1, 2));
        assert_eq!(bernoulli(1, BPlus), q(1, 2));
        assert_eq!(bernoulli(2, BPlus), q(1, 6));
        assert_eq!(bernoulli(4, BPlus), q(-1, 30));
        assert_eq!(bernoulli(4, BMinus), q(-1, 30));
        assert_eq!(bernoulli(12, BPlus), q(-691, 2730));
        for k in (3..20).step_by(2) {
            assert!(bernoulli(k, BPlus).is_zero());
        }
    }

    #[test]
    fn series_examples() {
        use BernoulliConvention::*;
        assert_eq!(asymptotic_series(1, BMinus).unwrap().coefficients, vec![q(1, 1), q(-1, 1)]);
        assert_eq!(asymptotic_series(1, BPlus).unwrap().coefficients, vec![q(1, 1), q(1, 1)]);
        assert_eq!(
            asymptotic_series(2, BPlus).unwrap().coefficients,
            vec![q(1, 1), q(3, 2), q(1, 2)]
        );
        assert!(asymptotic_series(0, BPlus).is_err());
    }

    #[test]
    fn printed_expansion_terms_under_b_minus() {
        // 1 − (d+1)/(2b) + (d+1)d/(12b²) − (d+1)d(d−1)(d−2)/(720b⁴)
        let d: i64 = 7;
        let s = asymptotic_series(d as u64, BernoulliConvention::BMinus).unwrap();
        assert_eq!(s.coefficients[1], q(-(d + 1), 2));
        assert_eq!(s.coefficients[2], q((d + 1) * d, 12));
        assert_eq!(s.coefficients[4], q(-(d + 1) * d * (d - 1) * (d - 2), 720));
        assert_eq!(
            s.coefficients[6],
            q((d + 1) * d * (d - 1) * (d - 2) * (d - 3) * (d - 4), 30240)
        );
    }

    #[test]
    fn surface_ratio_is_exact() {
        let rows = ratio_convergence(0, 1, 1, &[1, 4, 10], BernoulliConvention::BPlus).unwrap();
        for r in &rows {
            let n = r.n as i64;
            assert_eq!(r.ratio, q(2, 1) + q(4, n));
            assert_eq!(r.series_value, q(2, 1));
            assert_eq!(r.gap, q(4, n));
        }
        let minus = ratio_convergence(0, 1, 1, &[1000], BernoulliConvention::BMinus).unwrap();
        assert!(minus[0].series_value.is_zero());
        assert!(minus[0].gap > q(2, 1));
    }

    #[test]
    fn ratio_rejects_bad_input() {
        assert!(ratio_convergence(0, 1, 1, &[0, 10], BernoulliConvention::BPlus).is_err());
        assert!(ratio_convergence(0, 0, 1, &[10], BernoulliConvention::BPlus).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = ratio_convergence(0, 1, 1, &[4], BernoulliConvention::BPlus).unwrap();
        assert_eq!(
            convergence_csv(&rows),
            "n,ratio_num,ratio_den,series_num,series_den,gap_num,gap_den\n4,3,1,2,1,1,1\n"
        );
    }
}
