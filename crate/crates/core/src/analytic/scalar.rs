//! Exact and asymptotic outage of the 1x1 Rayleigh channel, and the SNR
//! boundaries of its low- and high-SNR regimes.

use super::{MultiplexingGain, Snr};
use crate::error::{Error, Result};

/// Upper edge of the low-SNR regime (linear), valid for every `r`.
pub const LOW_SNR_BOUNDARY: f64 = 0.1;

fn check_unit_interval(r: MultiplexingGain) -> Result<f64> {
    let r = r.value();
    if r > 1.0 {
        return Err(Error::InvalidMultiplexingGain {
            value: r,
            reason: "the scalar channel requires r <= 1",
        });
    }
    Ok(r)
}

/// Outage threshold on `|h|^2`: `((1 + gamma)^r - 1) / gamma`.
pub fn scalar_threshold(r: MultiplexingGain, snr: Snr) -> Result<f64> {
    let r = check_unit_interval(r)?;
    let g = snr.linear();
    Ok((r * g.ln_1p()).exp_m1() / g)
}

/// Exact outage `1 - exp(-((1 + gamma)^r - 1) / gamma)`.
pub fn scalar_outage_exact(r: MultiplexingGain, snr: Snr) -> Result<f64> {
    let x = scalar_threshold(r, snr)?;
    Ok(-(-x).exp_m1())
}

/// The two high-SNR forms of the scalar outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighSnrOutage {
    /// `F_h(gamma^{-(1-r)})`.
    pub via_cdf: f64,
    /// `gamma^{-(1-r)}`.
    pub power_law: f64,
}

pub fn scalar_outage_high_snr(r: MultiplexingGain, snr: Snr) -> Result<HighSnrOutage> {
    let r = r.value();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidMultiplexingGain {
            value: r,
            reason: "the high-SNR scalar form requires 0 < r < 1",
        });
    }
    let arg = snr.linear().powf(-(1.0 - r));
    Ok(HighSnrOutage {
        via_cdf: -(-arg).exp_m1(),
        power_law: arg,
    })
}

/// Low-SNR scalar outage `1 - e^{-r}`; independent of the SNR.
pub fn scalar_outage_low_snr(r: MultiplexingGain) -> Result<f64> {
    let r = check_unit_interval(r)?;
    Ok(-(-r).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeBoundaries {
    /// Below this SNR the low-SNR form is within 10% (linear).
    pub gamma_low: f64,
    /// Above this SNR the high-SNR form is within 10% (linear).
    pub gamma_high: f64,
}

impl RegimeBoundaries {
    pub fn gamma_low_db(&self) -> f64 {
        10.0 * self.gamma_low.log10()
    }

    pub fn gamma_high_db(&self) -> f64 {
        10.0 * self.gamma_high.log10()
    }
}

/// `gamma_low = 0.1`, `gamma_high = 10^{1/r}`.
pub fn regime_boundaries(r: MultiplexingGain) -> Result<RegimeBoundaries> {
    let r = r.value();
    if r <= 0.0 {
        return Err(Error::InvalidMultiplexingGain {
            value: r,
            reason: "the high-SNR boundary is unbounded for r <= 0",
        });
    }
    if r > 1.0 {
        return Err(Error::InvalidMultiplexingGain {
            value: r,
            reason: "regime boundaries are defined for 0 < r <= 1",
        });
    }
    Ok(RegimeBoundaries {
        gamma_low: LOW_SNR_BOUNDARY,
        gamma_high: 10f64.powf(1.0 / r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> MultiplexingGain {
        MultiplexingGain::new(v).unwrap()
    }
    fn g(v: f64) -> Snr {
        Snr::new(v).unwrap()
    }

    #[test]
    fn exact_outage_anchors() {
        let e1 = 0.632_120_558_828_557_7;
        for gamma in [1e-6, 0.3, 1.0, 1e4] {
            assert!((scalar_outage_exact(r(1.0), g(gamma)).unwrap() - e1).abs() < 1e-12);
        }
        // 1 - exp(-(sqrt 2 - 1)), 40-digit reference.
        let v = scalar_outage_exact(r(0.5), g(1.0)).unwrap();
        assert!((v - 0.339_140_198_593_172_07).abs() < 1e-15);
        assert_eq!(scalar_outage_exact(r(0.0), g(3.0)).unwrap(), 0.0);
        assert!(scalar_outage_exact(r(1.5), g(3.0)).is_err());
    }

    #[test]
    fn high_snr_forms() {
        let h = scalar_outage_high_snr(r(0.5), g(100.0)).unwrap();
        assert!((h.power_law - 0.1).abs() < 1e-15);
        assert!((h.via_cdf - 0.095_162_581_964_040_43).abs() < 1e-15);
        let exact_arg = scalar_threshold(r(0.5), g(100.0)).unwrap();
        assert!((exact_arg - 0.090_498_756_211_208_9).abs() < 1e-15);
        assert!((exact_arg - h.power_law).abs() / h.power_law <= 0.1);
        assert!(scalar_outage_high_snr(r(0.0), g(100.0)).is_err());
        assert!(scalar_outage_high_snr(r(1.0), g(100.0)).is_err());
    }

    #[test]
    fn high_snr_slope_tends_to_minus_one_minus_r() {
        let rr = 0.3;
        let (g1, g2) = (1e14, 1e16);
        let p1 = scalar_outage_exact(r(rr), g(g1)).unwrap();
        let p2 = scalar_outage_exact(r(rr), g(g2)).unwrap();
        let slope = (p2.ln() - p1.ln()) / (g2.ln() - g1.ln());
        assert!((slope + (1.0 - rr)).abs() < 1e-3, "slope {slope}");
    }

    #[test]
    fn low_snr_limit() {
        assert!((scalar_outage_low_snr(r(1.0)).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert_eq!(scalar_outage_low_snr(r(0.0)).unwrap(), 0.0);
        for rr in [0.05, 0.3, 0.8] {
            let exact = scalar_outage_exact(r(rr), g(1e-6)).unwrap();
            let low = scalar_outage_low_snr(r(rr)).unwrap();
            assert!((exact - low).abs() < 1e-6 * 1.0_f64.max(rr));
        }
    }

    #[test]
    fn boundaries() {
        let b = regime_boundaries(r(0.5)).unwrap();
        assert!((b.gamma_high - 100.0).abs() < 1e-9);
        assert!((b.gamma_high_db() - 20.0).abs() < 1e-9);
        assert!((b.gamma_low_db() + 10.0).abs() < 1e-12);
        let b = regime_boundaries(r(0.1)).unwrap();
        assert!((b.gamma_high_db() - 100.0).abs() < 1e-9);
        assert!((regime_boundaries(r(1.0)).unwrap().gamma_high - 10.0).abs() < 1e-12);
        assert!(regime_boundaries(r(0.0)).is_err());
    }
}
