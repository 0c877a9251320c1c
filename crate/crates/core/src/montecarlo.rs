//! Monte Carlo outage estimation from the log-det capacity.
//!
//! A channel is in outage when `ln det(I + (gamma/m) H H^H) < r ln(1 + gamma)`.
//! The comparison always uses the exact target rate so that estimates are a
//! reference at every SNR, not only at low SNR.

use crate::analytic::{dmt, regime_boundaries, target_rate, MultiplexingGain, Snr};
use crate::channel::{ChannelModel, ChannelRealization};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng;
use num_complex::Complex64;

/// Smallest trial count accepted by the estimators.
pub const MIN_TRIALS: u64 = 100;
/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// `ln det(I + scale * H H^H)` by an LDL^H factorization that carries
/// `D_j - 1` explicitly, so each pivot contributes `ln_1p(D_j - 1)` without
/// rounding away small SNRs. Works on the smaller Gram matrix.
#[derive(Debug, Default)]
pub(crate) struct LogDetWorkspace {
    gram: Vec<Complex64>,
    low: Vec<Complex64>,
    pivots: Vec<f64>,
}

impl LogDetWorkspace {
    pub(crate) fn ln_det_identity_plus(&mut self, h: &CMatrix, scale: f64) -> f64 {
        let (n, m) = h.shape();
        let k = n.min(m);
        self.gram.clear();
        self.gram.resize(k * k, Complex64::new(0.0, 0.0));
        for i in 0..k {
            for j in 0..=i {
                let mut acc = Complex64::new(0.0, 0.0);
                if n <= m {
                    for l in 0..m {
                        acc += h[(i, l)] * h[(j, l)].conj();
                    }
                } else {
                    for l in 0..n {
                        acc += h[(l, i)].conj() * h[(l, j)];
                    }
                }
                self.gram[i * k + j] = acc * scale;
            }
        }

        self.low.clear();
        self.low.resize(k * k, Complex64::new(0.0, 0.0));
        self.pivots.clear();
        self.pivots.resize(k, 0.0);
        let mut ln_det = 0.0;
        for j in 0..k {
            let mut d_minus_one = self.gram[j * k + j].re;
            for p in 0..j {
                d_minus_one -= self.low[j * k + p].norm_sqr() * self.pivots[p];
            }
            let pivot = 1.0 + d_minus_one;
            self.pivots[j] = pivot;
            ln_det += d_minus_one.ln_1p();
            for i in (j + 1)..k {
                let mut acc = self.gram[i * k + j];
                for p in 0..j {
                    acc -= self.low[i * k + p] * self.low[j * k + p].conj() * self.pivots[p];
                }
                self.low[i * k + j] = acc / pivot;
            }
        }
        ln_det
    }
}

/// Instantaneous capacity `ln det(I + (gamma/m) H H^H)` in nats/s/Hz.
pub fn capacity(h: &ChannelRealization, snr: Snr, m: usize) -> Result<f64> {
    let mat = h.matrix();
    if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteChannel);
    }
    if m == 0 {
        return Err(Error::InvalidArgument("transmit antenna count must be positive".into()));
    }
    let mut ws = LogDetWorkspace::default();
    Ok(ws.ln_det_identity_plus(mat, snr.linear() / m as f64))
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if successes == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub outage_count: u64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_counts(outage_count: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(outage_count, trials);
        Self {
            p_hat: outage_count as f64 / trials as f64,
            ci_low,
            ci_high,
            trials,
            outage_count,
            seed,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }

    pub fn overlaps(&self, other: &OutageEstimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Estimates `Pr{C < r ln(1 + gamma)}`. The result depends only on the
/// arguments, not on the thread count.
pub fn estimate_outage(
    model: &ChannelModel,
    snr: Snr,
    r: MultiplexingGain,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    estimate_outage_chunked(model, snr, r, trials, seed, rng::default_chunks(trials))
}

/// As [`estimate_outage`], with an explicit number of work units.
pub fn estimate_outage_chunked(
    model: &ChannelModel,
    snr: Snr,
    r: MultiplexingGain,
    trials: u64,
    seed: u64,
    chunks: usize,
) -> Result<OutageEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            trials,
            min: MIN_TRIALS,
        });
    }
    let dims = model.dims();
    let rate = target_rate(r, snr).exact;
    let scale = snr.linear() / dims.m() as f64;
    let count = rng::sum_over_blocks(trials, seed, chunks, |rng, len| {
        let mut h = CMatrix::zeros(dims.n(), dims.m());
        let mut scratch = Vec::new();
        let mut ws = LogDetWorkspace::default();
        let mut outages = 0;
        for _ in 0..len {
            model.sample_into(rng, &mut h, &mut scratch);
            if ws.ln_det_identity_plus(&h, scale) < rate {
                outages += 1;
            }
        }
        outages
    });
    Ok(OutageEstimate::from_counts(count, trials, seed))
}

/// Finite-difference log-log slope of the outage between two SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub gamma_window: (f64, f64),
    pub estimates: (OutageEstimate, OutageEstimate),
}

/// Both points share the seed, so the slope sees common channel draws.
pub fn estimate_slope(
    model: &ChannelModel,
    r: MultiplexingGain,
    gamma_window: (Snr, Snr),
    trials: u64,
    seed: u64,
) -> Result<SlopeEstimate> {
    let (g1, g2) = gamma_window;
    if g1 == g2 {
        return Err(Error::InvalidArgument("slope window SNRs must differ".into()));
    }
    let e1 = estimate_outage(model, g1, r, trials, seed)?;
    let e2 = estimate_outage(model, g2, r, trials, seed)?;
    for (e, g) in [(&e1, g1), (&e2, g2)] {
        if e.outage_count == 0 {
            return Err(Error::ZeroOutageCount { gamma: g.linear() });
        }
    }
    let slope = (e2.p_hat.ln() - e1.p_hat.ln()) / (g2.linear().ln() - g1.linear().ln());
    Ok(SlopeEstimate {
        slope,
        gamma_window: (g1.linear(), g2.linear()),
        estimates: (e1, e2),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorFit {
    pub gamma: f64,
    pub estimate: OutageEstimate,
    /// `p_hat * gamma^d` at this anchor.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Geometric mean of the per-anchor constants.
    pub c: f64,
    pub d: f64,
    pub anchors: Vec<AnchorFit>,
    /// Largest over smallest per-anchor constant.
    pub spread: f64,
    /// Anchors below the high-SNR boundary `10^{1/r}` (only checked for r <= 1).
    pub below_boundary: Vec<f64>,
}

/// Fits `c` in `P_out ~ c / gamma^d` from Monte Carlo estimates at high-SNR
/// anchors. `d` defaults to the i.i.d. DMT curve; correlated models must
/// pass it explicitly.
pub fn calibrate_c(
    model: &ChannelModel,
    r: MultiplexingGain,
    anchors: &[Snr],
    trials: u64,
    seed: u64,
    diversity: Option<f64>,
) -> Result<Calibration> {
    if r.value() <= 0.0 {
        return Err(Error::InvalidMultiplexingGain {
            value: r.value(),
            reason: "calibration needs r > 0; the outage never decays at r = 0",
        });
    }
    if anchors.is_empty() {
        return Err(Error::InvalidArgument("at least one anchor SNR is required".into()));
    }
    let d = match diversity {
        Some(d) if d >= 0.0 && d.is_finite() => d,
        Some(d) => return Err(Error::InvalidArgument(format!("invalid diversity {d}"))),
        None if model.is_iid() => dmt(model.dims(), r)?.d,
        None => return Err(Error::DiversityRequired),
    };
    let boundary = if r.value() <= 1.0 {
        Some(regime_boundaries(r)?.gamma_high)
    } else {
        None
    };

    let mut fits = Vec::with_capacity(anchors.len());
    let mut below = Vec::new();
    for &g in anchors {
        let est = estimate_outage(model, g, r, trials, seed)?;
        if est.outage_count == 0 {
            return Err(Error::ZeroOutageCount { gamma: g.linear() });
        }
        if boundary.is_some_and(|b| g.linear() < b) {
            below.push(g.linear());
        }
        fits.push(AnchorFit {
            gamma: g.linear(),
            estimate: est,
            c: est.p_hat * g.linear().powf(d),
        });
    }
    let ln_mean = fits.iter().map(|f| f.c.ln()).sum::<f64>() / fits.len() as f64;
    let max = fits.iter().map(|f| f.c).fold(f64::MIN, f64::max);
    let min = fits.iter().map(|f| f.c).fold(f64::MAX, f64::min);
    Ok(Calibration {
        c: ln_mean.exp(),
        d,
        anchors: fits,
        spread: max / min,
        below_boundary: below,
    })
}
