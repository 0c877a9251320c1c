//! CDF of the power gain of a correlated Rayleigh channel.
//!
//! `||H||_F^2 = ||vec(H)||^2` is a sum of independent exponentials whose
//! means are the eigenvalues of `R`. For distinct eigenvalues its CDF is
//!
//! ```text
//! F(x) = 1 - sum_k A_k exp(-x / lambda_k),   A_k = prod_{i != k} lambda_k / (lambda_k - lambda_i)
//! ```
//!
//! Eigenvalues closer than [`DEGENERACY_GAP`] (relative) are merged into one
//! pole of higher multiplicity and expanded exactly, so the identity matrix
//! and Kronecker models with repeated products reduce to `F_k` instead of
//! hitting the `1 / (lambda_k - lambda_i)` blow-up.

use crate::analytic::incgamma::{gamma_p, gamma_q};
use crate::analytic::PowerGainCdf;
use crate::error::{Error, Result};

/// Relative eigenvalue gap below which two eigenvalues are merged.
pub const DEGENERACY_GAP: f64 = 1e-9;
/// Eigenvalues below this fraction of the largest are treated as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

/// One pole `lambda` of multiplicity `coeffs.len()`; `coeffs[j]` weights the
/// Gamma(j + 1, lambda) component.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerm {
    pub lambda: f64,
    pub coeffs: Vec<f64>,
}

impl PoleTerm {
    pub fn multiplicity(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractionCdf {
    terms: Vec<PoleTerm>,
    merged: bool,
    dropped_zeros: usize,
}

impl PartialFractionCdf {
    /// Builds the CDF from correlation eigenvalues, dropping those that are
    /// zero relative to the largest.
    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Result<Self> {
        let largest = eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        if !(largest > 0.0) {
            return Err(Error::AllEigenvaluesZero);
        }
        let kept: Vec<f64> = eigenvalues
            .iter()
            .copied()
            .filter(|&v| v > ZERO_EIGENVALUE * largest)
            .collect();
        let mut cdf = partial_fraction_coeffs(&kept)?;
        cdf.dropped_zeros = eigenvalues.len() - kept.len();
        Ok(cdf)
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    /// Distinct pole locations, in descending order.
    pub fn lambdas(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.lambda).collect()
    }

    /// First-order coefficients; these are the `A_k` when every pole is simple.
    pub fn coeffs(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coeffs[0]).collect()
    }

    /// Sum of every coefficient; equals 1 exactly in exact arithmetic.
    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().flat_map(|t| t.coeffs.iter()).sum()
    }

    /// True when near-equal eigenvalues were merged into a repeated pole.
    pub fn merged(&self) -> bool {
        self.merged
    }

    /// Number of zero eigenvalues removed before expansion.
    pub fn dropped_zeros(&self) -> usize {
        self.dropped_zeros
    }

    /// Number of eigenvalues represented, counting multiplicity.
    pub fn order(&self) -> usize {
        self.terms.iter().map(PoleTerm::multiplicity).sum()
    }

    /// Product of the retained eigenvalues.
    pub fn determinant(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.lambda.powi(t.multiplicity() as i32))
            .product()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        if let [single] = self.terms.as_slice() {
            return gamma_p(single.multiplicity() as u32, x / single.lambda);
        }
        // 1 - sum B Q = sum B P since sum B = 1. The P form is accurate in
        // the lower tail, the Q form in the upper tail.
        let weighted = |g: fn(u32, f64) -> f64| -> f64 {
            self.terms
                .iter()
                .map(|t| {
                    t.coeffs
                        .iter()
                        .enumerate()
                        .map(|(j, b)| b * g(j as u32 + 1, x / t.lambda))
                        .sum::<f64>()
                })
                .sum()
        };
        let lower = weighted(gamma_p);
        let total = if lower < 0.5 { lower } else { 1.0 - weighted(gamma_q) };
        total.clamp(0.0, 1.0)
    }
}

impl PowerGainCdf for PartialFractionCdf {
    fn cdf(&self, x: f64) -> f64 {
        PartialFractionCdf::cdf(self, x)
    }
}

/// Partial-fraction coefficients for the power gain with the given
/// (positive) eigenvalues.
pub fn partial_fraction_coeffs(lambdas: &[f64]) -> Result<PartialFractionCdf> {
    if lambdas.is_empty() {
        return Err(Error::AllEigenvaluesZero);
    }
    if let Some(&bad) = lambdas.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::NonpositiveEigenvalue(bad));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    // Merge runs of near-equal eigenvalues into (mean, multiplicity).
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut merged = false;
    for &v in &sorted {
        match clusters.last_mut() {
            Some((mean, count)) if (*mean - v) / *mean < DEGENERACY_GAP => {
                if *mean != v {
                    merged = true;
                }
                *mean = (*mean * *count as f64 + v) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }

    let terms = clusters
        .iter()
        .enumerate()
        .map(|(k, &(lambda_k, mult_k))| PoleTerm {
            lambda: lambda_k,
            coeffs: pole_coefficients(&clusters, k, lambda_k, mult_k),
        })
        .collect();
    Ok(PartialFractionCdf {
        terms,
        merged,
        dropped_zeros: 0,
    })
}

/// Coefficients `B_{k,j}`, `j = 1..=mult_k`, of the expansion of
/// `prod_i (1 + lambda_i s)^{-m_i}` into `(1 + lambda_k s)^{-j}` terms.
///
/// With `g(s) = (1 + lambda_k s)^{m_k} prod_i (...)`, `B_{k,j}` is the
/// `(m_k - j)`-th Taylor coefficient of `g` at `s = -1/lambda_k` scaled by
/// `lambda_k^{j - m_k}`. The log-derivative of `g` has the closed-form
/// Taylor coefficients `theta_s` below, which gives the recursion
/// `(n + 1) b_{n+1} = sum_t b_t theta_{n-t}`.
fn pole_coefficients(clusters: &[(f64, usize)], k: usize, lambda_k: f64, mult_k: usize) -> Vec<f64> {
    let ratios: Vec<(f64, f64)> = clusters
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &(lambda_i, m_i))| (lambda_i / (lambda_k - lambda_i), m_i as f64))
        .collect();

    let b0: f64 = clusters
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &(lambda_i, m_i))| (lambda_k / (lambda_k - lambda_i)).powi(m_i as i32))
        .product();

    let theta: Vec<f64> = (0..mult_k)
        .map(|s| {
            let sign = if s % 2 == 0 { -1.0 } else { 1.0 };
            ratios
                .iter()
                .map(|&(q, m_i)| sign * m_i * q.powi(s as i32 + 1))
                .sum()
        })
        .collect();

    let mut b = Vec::with_capacity(mult_k);
    b.push(b0);
    for n in 0..mult_k.saturating_sub(1) {
        let acc: f64 = (0..=n).map(|t| b[t] * theta[n - t]).sum();
        b.push(acc / (n as f64 + 1.0));
    }
    // coeffs[j - 1] = B_{k,j} = b_{m_k - j}
    b.reverse();
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::incgamma::mrc_cdf;

    #[test]
    fn two_distinct_eigenvalues() {
        let pf = partial_fraction_coeffs(&[0.5, 1.5]).unwrap();
        // Sorted descending: (1.5, 0.5).
        assert_eq!(pf.lambdas(), vec![1.5, 0.5]);
        let a = pf.coeffs();
        assert!((a[0] - 1.5).abs() < 1e-15);
        assert!((a[1] + 0.5).abs() < 1e-15);
        assert!(!pf.merged());
    }

    #[test]
    fn single_eigenvalue_is_exponential() {
        let pf = partial_fraction_coeffs(&[1.0]).unwrap();
        assert_eq!(pf.coeffs(), vec![1.0]);
        for x in [0.1, 1.0, 3.0] {
            assert!((pf.cdf(x) - (1.0 - (-x).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn hypoexponential_reference_value() {
        // 40-digit reference from the product formula.
        let pf = partial_fraction_coeffs(&[0.3, 0.7, 1.2, 1.8]).unwrap();
        assert!((pf.cdf(1.1) - 0.039_141_483_653_318_2).abs() < 1e-14);
    }

    #[test]
    fn repeated_pole_matches_convolution_quadrature() {
        // lambda = (0.5, 0.5, 1.5) at x = 1, by adaptive quadrature of the
        // Gamma(2, 0.5) density against the Exp(1.5) CDF.
        let pf = partial_fraction_coeffs(&[0.5, 1.5, 0.5]).unwrap();
        assert_eq!(pf.order(), 3);
        assert_eq!(pf.terms()[1].multiplicity(), 2);
        assert!((pf.coefficient_sum() - 1.0).abs() < 1e-12);
        assert!((pf.cdf(1.0) - 0.149_315_869_459_046_49).abs() < 1e-13);
    }

    #[test]
    fn all_equal_collapses_to_mrc() {
        let pf = partial_fraction_coeffs(&[1.0; 4]).unwrap();
        assert_eq!(pf.terms().len(), 1);
        assert_eq!(pf.cdf(2.0), mrc_cdf(4, 2.0).unwrap());
    }

    #[test]
    fn near_equal_is_merged_and_flagged() {
        let pf = partial_fraction_coeffs(&[1.0, 1.0 + 1e-12, 1.0 - 1e-12]).unwrap();
        assert!(pf.merged());
        assert_eq!(pf.terms().len(), 1);
        assert!((pf.cdf(1.3) - mrc_cdf(3, 1.3).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn zero_eigenvalues_are_dropped() {
        let pf = PartialFractionCdf::from_eigenvalues(&[2.0, 0.0, 1e-15]).unwrap();
        assert_eq!(pf.dropped_zeros(), 2);
        assert_eq!(pf.order(), 1);
        assert!(matches!(
            PartialFractionCdf::from_eigenvalues(&[0.0, 0.0]),
            Err(Error::AllEigenvaluesZero)
        ));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(
            partial_fraction_coeffs(&[1.0, -0.5]),
            Err(Error::NonpositiveEigenvalue(_))
        ));
        assert!(partial_fraction_coeffs(&[]).is_err());
    }
}
