//! Closed-form outage probabilities under the diversity-multiplexing
//! tradeoff.
//!
//! At low SNR the outage of a MIMO channel with target rate
//! `R = r ln(1 + gamma)` is approximately `F_H(m r)`, the CDF of the channel
//! power gain `||H||_F^2` evaluated at `m r`. It does not depend on the SNR.
//! This module evaluates that CDF for i.i.d. Rayleigh channels (the MRC CDF
//! `F_mn`) and for arbitrarily correlated ones (a partial-fraction sum over
//! the eigenvalues of `R`), their low-outage power-law approximations, the
//! DMT curve `d(r)`, and the piecewise whole-range approximation
//! `min[F_H(m r), c / gamma^d]`.

pub mod incgamma;
pub mod partial_fraction;
pub mod scalar;

use std::fmt;

use crate::channel::{ChannelDims, ChannelModel, CorrelationModel};
use crate::error::{Error, Result};

pub use incgamma::{ln_factorial, mrc_cdf};
pub use partial_fraction::{partial_fraction_coeffs, PartialFractionCdf, PoleTerm};
pub use scalar::{
    regime_boundaries, scalar_outage_exact, scalar_outage_high_snr, scalar_outage_low_snr,
    scalar_threshold, HighSnrOutage, RegimeBoundaries,
};

/// Multiplexing gain `r >= 0`: the target rate as a fraction of the AWGN
/// capacity `ln(1 + gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MultiplexingGain(f64);

impl MultiplexingGain {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidMultiplexingGain {
                value: r,
                reason: "must be finite and nonnegative",
            });
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for MultiplexingGain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Average SNR per receive antenna, linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Snr(f64);

impl Snr {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidSnr(gamma));
        }
        Ok(Self(gamma))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(10f64.powf(db / 10.0))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

/// CDF of the channel power gain `||H||_F^2`.
pub trait PowerGainCdf {
    fn cdf(&self, x: f64) -> f64;
}

/// `F_k(x) = P(k, x)`: power gain of `k` i.i.d. unit-mean Rayleigh branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MrcCdf {
    pub order: u32,
}

impl PowerGainCdf for MrcCdf {
    fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        incgamma::gamma_p(self.order, x)
    }
}

impl<F: Fn(f64) -> f64> PowerGainCdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Power-gain CDF of a validated channel model: `F_mn` for i.i.d. channels,
/// the partial-fraction form otherwise.
pub fn power_gain_cdf(model: &ChannelModel) -> Result<Box<dyn PowerGainCdf + Send + Sync>> {
    if model.is_iid() {
        Ok(Box::new(MrcCdf {
            order: model.dims().product() as u32,
        }))
    } else {
        Ok(Box::new(PartialFractionCdf::from_eigenvalues(model.eigenvalues())?))
    }
}

/// Low-SNR outage `F_H(m r)`.
pub fn low_snr_outage<F: PowerGainCdf + ?Sized>(power_cdf: &F, m: usize, r: MultiplexingGain) -> f64 {
    power_cdf.cdf(m as f64 * r.value()).clamp(0.0, 1.0)
}

/// Low-SNR outage of the i.i.d. channel, `F_mn(m r)`.
pub fn low_snr_outage_iid(dims: ChannelDims, r: MultiplexingGain) -> f64 {
    let cdf = MrcCdf {
        order: dims.product() as u32,
    };
    low_snr_outage(&cdf, dims.m(), r)
}

/// Low-outage approximation `(m r)^{mn} / (mn)!`, formed in log space.
pub fn low_outage_approx_iid(dims: ChannelDims, r: MultiplexingGain) -> f64 {
    let x = dims.m() as f64 * r.value();
    if x == 0.0 {
        return 0.0;
    }
    let k = dims.product() as u32;
    (k as f64 * x.ln() - ln_factorial(k)).exp().min(1.0)
}

/// Low-SNR outage of a correlated channel via the partial-fraction CDF,
/// keeping only the nonzero eigenvalues of `R`.
pub fn low_snr_outage_correlated(model: &ChannelModel, r: MultiplexingGain) -> Result<f64> {
    let cdf = PartialFractionCdf::from_eigenvalues(model.eigenvalues())?;
    Ok(low_snr_outage(&cdf, model.dims().m(), r))
}

/// Low-outage approximation `(m r)^{mn} / ((mn)! det R)`. Kronecker models
/// use `det R = (det R_r)^m (det R_t)^n`. Singular `R` is refused.
pub fn low_outage_approx_correlated(model: &ChannelModel, r: MultiplexingGain) -> Result<f64> {
    let dims = model.dims();
    let mn = dims.product();
    let largest = model.eigenvalues().first().copied().unwrap_or(0.0);
    if model
        .eigenvalues()
        .iter()
        .any(|&v| !(v > partial_fraction::ZERO_EIGENVALUE * largest))
    {
        return Err(Error::SingularCorrelation);
    }
    let ln_det = match model.correlation() {
        CorrelationModel::Iid => 0.0,
        CorrelationModel::Full(_) => model.eigenvalues().iter().map(|v| v.ln()).sum(),
        CorrelationModel::Kronecker { tx, rx } => {
            let ln_det_side = |a: &crate::linalg::CMatrix| -> Result<f64> {
                let (vals, _) = crate::linalg::hermitian_psd_eigen(a)?;
                Ok(vals.iter().map(|v| v.ln()).sum())
            };
            dims.m() as f64 * ln_det_side(rx)? + dims.n() as f64 * ln_det_side(tx)?
        }
    };
    let x = dims.m() as f64 * r.value();
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((mn as f64 * x.ln() - ln_factorial(mn as u32) - ln_det).exp().min(1.0))
}

/// A point on the DMT curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtPoint {
    pub r: f64,
    pub d: f64,
}

/// `d(r)`: `(n - r)(m - r)` at integer `r`, linear in between.
pub fn dmt(dims: ChannelDims, r: MultiplexingGain) -> Result<DmtPoint> {
    let r = r.value();
    let top = dims.min() as f64;
    if r > top {
        return Err(Error::InvalidMultiplexingGain {
            value: r,
            reason: "the DMT curve is defined for 0 <= r <= min(m, n)",
        });
    }
    let anchor = |k: f64| (dims.n() as f64 - k) * (dims.m() as f64 - k);
    let lo = r.floor();
    let d = if lo == r {
        anchor(lo)
    } else {
        let frac = r - lo;
        anchor(lo) * (1.0 - frac) + anchor(lo + 1.0) * frac
    };
    Ok(DmtPoint { r, d })
}

/// Target rate in nats/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetRate {
    /// `r ln(1 + gamma)`.
    pub exact: f64,
    /// The low-SNR approximation `r gamma`.
    pub low_snr: f64,
}

pub fn target_rate(r: MultiplexingGain, snr: Snr) -> TargetRate {
    TargetRate {
        exact: r.value() * snr.linear().ln_1p(),
        low_snr: r.value() * snr.linear(),
    }
}

/// Parameters of the high-SNR branch `c / gamma^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseParams {
    pub c: f64,
    pub d: f64,
}

impl PiecewiseParams {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
        }
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidArgument(format!("d must be nonnegative, got {d}")));
        }
        Ok(Self { c, d })
    }

    /// Uses `d` from the i.i.d. DMT curve.
    pub fn iid(dims: ChannelDims, r: MultiplexingGain, c: f64) -> Result<Self> {
        Self::new(c, dmt(dims, r)?.d)
    }

    /// SNR where `c / gamma^d` meets `plateau`, if it exists.
    pub fn crossover(&self, plateau: f64) -> Option<f64> {
        if self.d == 0.0 || !(plateau > 0.0) {
            return None;
        }
        Some((self.c / plateau).powf(1.0 / self.d))
    }
}

/// Whole-range approximation `min[F_H(m r), c / gamma^d]`, capped at 1.
pub fn piecewise_outage<F: PowerGainCdf + ?Sized>(
    dims: ChannelDims,
    r: MultiplexingGain,
    snr: Snr,
    params: PiecewiseParams,
    power_cdf: &F,
) -> f64 {
    let plateau = low_snr_outage(power_cdf, dims.m(), r);
    let power_law = params.c * snr.linear().powf(-params.d);
    plateau.min(power_law).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::exponential_correlation;
    use nalgebra::DVector;
    use num_complex::Complex64;

    const F4_2: f64 = 0.142_876_539_501_452_95;

    fn r(v: f64) -> MultiplexingGain {
        MultiplexingGain::new(v).unwrap()
    }
    fn dims(m: usize, n: usize) -> ChannelDims {
        ChannelDims::new(m, n).unwrap()
    }
    fn diag_model(m: usize, n: usize, d: &[f64]) -> ChannelModel {
        let r = crate::linalg::CMatrix::from_diagonal(&DVector::from_iterator(
            d.len(),
            d.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        ChannelModel::new(dims(m, n), CorrelationModel::Full(r)).unwrap()
    }

    #[test]
    fn newtypes_validate() {
        assert!(MultiplexingGain::new(-0.1).is_err());
        assert!(MultiplexingGain::new(f64::NAN).is_err());
        assert!(Snr::new(0.0).is_err());
        let s = Snr::from_db(-20.0).unwrap();
        assert!((s.linear() - 0.01).abs() < 1e-17);
        assert!((s.db() + 20.0).abs() < 1e-12);
    }

    #[test]
    fn low_snr_iid_values() {
        assert_eq!(low_snr_outage_iid(dims(3, 2), r(0.0)), 0.0);
        assert!((low_snr_outage_iid(dims(2, 2), r(1.0)) - F4_2).abs() < 1e-15);
        let one = low_snr_outage_iid(dims(1, 1), r(1.0));
        assert!((one - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert!(low_snr_outage_iid(dims(2, 2), r(1.0)) < one);
        // r = n puts the threshold at the mean power gain mn, which sits just
        // above the median: the outage is slightly above one half there and
        // below one half once r <= n - 1/m.
        for (m, n) in [(1, 1), (2, 2), (3, 2), (2, 4), (4, 4)] {
            let at_n = low_snr_outage_iid(dims(m, n), r(n as f64));
            assert!(at_n > 0.5 && at_n < 0.64, "{m}x{n}: {at_n}");
            let below = low_snr_outage_iid(dims(m, n), r(n as f64 - 1.0 / m as f64));
            assert!(below < 0.5, "{m}x{n}: {below}");
        }
    }

    #[test]
    fn low_snr_outage_uses_any_cdf_provider() {
        let exp_cdf = |x: f64| 1.0 - (-x).exp();
        assert!((low_snr_outage(&exp_cdf, 1, r(1.0)) - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert_eq!(low_snr_outage(&exp_cdf, 3, r(0.0)), 0.0);
    }

    #[test]
    fn low_outage_iid_values() {
        let v = low_outage_approx_iid(dims(2, 2), r(0.05));
        assert!((v - 1e-4 / 24.0).abs() < 1e-18);
        // Exact F_4(0.1) = 3.846833925345058e-6.
        let ratio = low_snr_outage_iid(dims(2, 2), r(0.05)) / v;
        assert!((ratio - 0.923_240_142_082_813_9).abs() < 1e-9);
        assert!((low_outage_approx_iid(dims(1, 1), r(0.01)) - 0.01).abs() < 1e-17);
    }

    #[test]
    fn correlated_closed_form() {
        let model = diag_model(1, 2, &[0.5, 1.5]);
        let p = low_snr_outage_correlated(&model, r(0.2)).unwrap();
        assert!((p - 0.022_400_044_453_398_47).abs() < 1e-15);
        let approx = low_outage_approx_correlated(&model, r(0.2)).unwrap();
        assert!((approx - 0.04 / 2.0 / 0.75).abs() < 1e-15);
    }

    #[test]
    fn identity_r_matches_iid_exactly() {
        let model = diag_model(2, 2, &[1.0; 4]);
        for rr in [0.0, 0.1, 0.5, 1.0, 1.7] {
            assert_eq!(
                low_snr_outage_correlated(&model, r(rr)).unwrap(),
                low_snr_outage_iid(dims(2, 2), r(rr))
            );
            let a = low_outage_approx_correlated(&model, r(rr)).unwrap();
            let b = low_outage_approx_iid(dims(2, 2), r(rr));
            assert!((a - b).abs() <= 1e-15 * b.max(1e-300));
        }
    }

    #[test]
    fn correlated_is_nondecreasing_in_r() {
        let model = diag_model(1, 3, &[0.2, 0.9, 1.9]);
        let mut last = 0.0;
        for i in 0..=200 {
            let p = low_snr_outage_correlated(&model, r(i as f64 * 0.05)).unwrap();
            assert!(p >= last - 1e-15);
            last = p;
        }
    }

    #[test]
    fn kronecker_approx_equals_full_form() {
        let d = dims(1, 2);
        let kron = ChannelModel::new(d, CorrelationModel::exponential_kronecker(d, 0.0, 0.5).unwrap()).unwrap();
        let full = diag_model(1, 2, &[0.5, 1.5]);
        for rr in [0.01, 0.1, 0.2] {
            let a = low_outage_approx_correlated(&kron, r(rr)).unwrap();
            let b = low_outage_approx_correlated(&full, r(rr)).unwrap();
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn singular_r_refuses_approximation_but_has_cdf() {
        let model = diag_model(1, 2, &[2.0, 0.0]);
        assert_eq!(
            low_outage_approx_correlated(&model, r(0.1)),
            Err(Error::SingularCorrelation)
        );
        let p = low_snr_outage_correlated(&model, r(0.1)).unwrap();
        assert!((p - (1.0 - (-0.05f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn correlation_penalty() {
        let d = dims(2, 2);
        let iid = ChannelModel::new(d, CorrelationModel::exponential_kronecker(d, 0.0, 0.0).unwrap()).unwrap();
        let corr = ChannelModel::new(d, CorrelationModel::exponential_kronecker(d, 0.9, 0.9).unwrap()).unwrap();
        let a = low_outage_approx_correlated(&iid, r(0.1)).unwrap();
        let b = low_outage_approx_correlated(&corr, r(0.1)).unwrap();
        assert!(b > a);
        let det = exponential_correlation(2, 0.9).unwrap().determinant();
        assert!((b / a - det.powi(-4)).abs() < 1e-9 * b / a);
    }

    #[test]
    fn dmt_anchors_and_interpolation() {
        let d = dims(2, 2);
        assert_eq!(dmt(d, r(1.0)).unwrap().d, 1.0);
        assert_eq!(dmt(d, r(0.0)).unwrap().d, 4.0);
        assert_eq!(dmt(d, r(2.0)).unwrap().d, 0.0);
        assert_eq!(dmt(d, r(0.5)).unwrap().d, 2.5);
        assert!(dmt(d, r(2.01)).is_err());
        // Linear interpolation differs from the continuous product.
        let d23 = dims(2, 3);
        assert_eq!(dmt(d23, r(1.5)).unwrap().d, (2.0 + 0.0) / 2.0);
    }

    #[test]
    fn target_rate_forms() {
        let t = target_rate(r(1.0), Snr::new(std::f64::consts::E - 1.0).unwrap());
        assert!((t.exact - 1.0).abs() < 1e-15);
        let t = target_rate(r(0.5), Snr::new(0.01).unwrap());
        assert!((t.exact - 0.004_975_165_426_584_041).abs() < 1e-17);
        assert_eq!(t.low_snr, 0.005);
        assert!((t.low_snr - t.exact) / t.exact < 0.005);
        assert_eq!(target_rate(r(0.0), Snr::new(3.0).unwrap()).exact, 0.0);
    }

    #[test]
    fn piecewise_branches() {
        let d = dims(2, 2);
        let params = PiecewiseParams::iid(d, r(1.0), 3.0).unwrap();
        let cdf = MrcCdf { order: 4 };
        let low = piecewise_outage(d, r(1.0), Snr::new(1e-6).unwrap(), params, &cdf);
        assert!((low - F4_2).abs() < 1e-15);
        let high = piecewise_outage(d, r(1.0), Snr::new(1e5).unwrap(), params, &cdf);
        assert!((high - 3e-5).abs() < 1e-18);
        let x = params.crossover(F4_2).unwrap();
        assert!((params.c / x.powf(params.d) - F4_2).abs() < 1e-15);
        assert!(PiecewiseParams::new(0.0, 1.0).is_err());
    }
}
