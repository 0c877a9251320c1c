//! Rayleigh-fading channel matrices: i.i.d. and spatially correlated.
//!
//! `H` is `n x m` (rows are receive antennas, columns transmit antennas) and
//! is stored column-major, so its raw storage is exactly `vec(H)` with
//! column-wise stacking. Correlated channels are drawn as `vec(H) = L z`
//! where `L L^H = R` and `z` has i.i.d. unit circular complex Gaussian
//! entries.
//!
//! Correlation inputs are rescaled so that `E ||H||_F^2 = m n`; the
//! [`ChannelModel::rescaled`] flag records when that changed the input.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rng;

/// Relative tolerance on trace normalization before an input is rescaled.
pub const TRACE_TOL: f64 = 1e-9;

/// Antenna counts: `m` transmit, `n` receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelDims {
    m: usize,
    n: usize,
}

impl ChannelDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidDims { m, n });
        }
        Ok(Self { m, n })
    }

    /// Transmit antennas.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Receive antennas.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn min(&self) -> usize {
        self.m.min(self.n)
    }

    /// `m * n`, the number of channel coefficients.
    pub fn product(&self) -> usize {
        self.m * self.n
    }
}

/// Spatial correlation of `vec(H)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationModel {
    Iid,
    /// Full `mn x mn` correlation `R = E[vec(H) vec(H)^H]`.
    Full(CMatrix),
    /// Separable correlation `R = R_t^T (x) R_r`.
    Kronecker { tx: CMatrix, rx: CMatrix },
}

impl CorrelationModel {
    /// Kronecker model with exponential correlation on each side.
    pub fn exponential_kronecker(dims: ChannelDims, rho_tx: f64, rho_rx: f64) -> Result<Self> {
        Ok(CorrelationModel::Kronecker {
            tx: linalg::to_complex(&exponential_correlation(dims.m(), rho_tx)?),
            rx: linalg::to_complex(&exponential_correlation(dims.n(), rho_rx)?),
        })
    }

    /// The full `mn x mn` matrix this model describes.
    pub fn full_matrix(&self, dims: ChannelDims) -> CMatrix {
        match self {
            CorrelationModel::Iid => CMatrix::identity(dims.product(), dims.product()),
            CorrelationModel::Full(r) => r.clone(),
            CorrelationModel::Kronecker { tx, rx } => linalg::kron(&tx.transpose(), rx),
        }
    }
}

/// One channel draw `H` (`n x m`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: CMatrix,
}

impl ChannelRealization {
    pub fn new(h: CMatrix) -> Result<Self> {
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteChannel);
        }
        Ok(Self { h })
    }

    pub fn zeros(dims: ChannelDims) -> Self {
        Self {
            h: CMatrix::zeros(dims.n(), dims.m()),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn into_matrix(self) -> CMatrix {
        self.h
    }

    /// `||H||_F^2`.
    pub fn power_gain(&self) -> f64 {
        power_gain(self)
    }
}

/// A validated, trace-normalized channel model with its sampling factor.
///
/// Immutable after construction; share it freely across threads.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    dims: ChannelDims,
    correlation: CorrelationModel,
    /// `None` for i.i.d. channels.
    factor: Option<CMatrix>,
    eigenvalues: Vec<f64>,
    rescaled: bool,
}

impl ChannelModel {
    pub fn iid(dims: ChannelDims) -> Self {
        Self {
            dims,
            correlation: CorrelationModel::Iid,
            factor: None,
            eigenvalues: vec![1.0; dims.product()],
            rescaled: false,
        }
    }

    pub fn new(dims: ChannelDims, correlation: CorrelationModel) -> Result<Self> {
        match correlation {
            CorrelationModel::Iid => Ok(Self::iid(dims)),
            CorrelationModel::Full(r) => {
                let mn = dims.product();
                linalg::check_square(&r, mn, "correlation matrix R")?;
                linalg::check_hermitian(&r)?;
                let (r, rescaled) = normalize_trace(r, mn as f64)?;
                let (values, vectors) = linalg::hermitian_psd_eigen(&r)?;
                let factor = scale_columns(vectors, &values);
                let mut eigenvalues: Vec<f64> = values.iter().copied().collect();
                eigenvalues.sort_by(|a, b| b.total_cmp(a));
                Ok(Self {
                    dims,
                    correlation: CorrelationModel::Full(r),
                    factor: Some(factor),
                    eigenvalues,
                    rescaled,
                })
            }
            CorrelationModel::Kronecker { tx, rx } => {
                linalg::check_square(&tx, dims.m(), "transmit correlation R_t")?;
                linalg::check_square(&rx, dims.n(), "receive correlation R_r")?;
                linalg::check_hermitian(&tx)?;
                linalg::check_hermitian(&rx)?;
                let (tx, tx_rescaled) = normalize_trace(tx, dims.m() as f64)?;
                let (rx, rx_rescaled) = normalize_trace(rx, dims.n() as f64)?;
                let (eta_t, vec_t) = linalg::hermitian_psd_eigen(&tx)?;
                let (eta_r, vec_r) = linalg::hermitian_psd_eigen(&rx)?;
                // With L_t L_t^H = R_t, conj(L_t) (x) L_r factors R_t^T (x) R_r
                // because conj(R_t) = R_t^T for Hermitian R_t.
                let l_t = scale_columns(vec_t, &eta_t);
                let l_r = scale_columns(vec_r, &eta_r);
                let factor = linalg::kron(&l_t.map(|z| z.conj()), &l_r);
                let mut eigenvalues: Vec<f64> = eta_t
                    .iter()
                    .flat_map(|t| eta_r.iter().map(move |r| t * r))
                    .collect();
                eigenvalues.sort_by(|a, b| b.total_cmp(a));
                Ok(Self {
                    dims,
                    correlation: CorrelationModel::Kronecker { tx, rx },
                    factor: Some(factor),
                    eigenvalues,
                    rescaled: tx_rescaled || rx_rescaled,
                })
            }
        }
    }

    pub fn dims(&self) -> ChannelDims {
        self.dims
    }

    /// The normalized correlation model.
    pub fn correlation(&self) -> &CorrelationModel {
        &self.correlation
    }

    pub fn is_iid(&self) -> bool {
        matches!(self.correlation, CorrelationModel::Iid)
    }

    /// True when the input had to be rescaled to trace `mn`.
    pub fn rescaled(&self) -> bool {
        self.rescaled
    }

    /// Eigenvalues of `R` (clamped at zero), in descending order. For
    /// Kronecker models these are the products `eta_r,i * eta_t,j`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The sampling factor `L` with `L L^H = R` (identity for i.i.d.).
    pub fn factor(&self) -> CMatrix {
        match &self.factor {
            Some(l) => l.clone(),
            None => CMatrix::identity(self.dims.product(), self.dims.product()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let mut out = ChannelRealization::zeros(self.dims);
        let mut scratch = Vec::new();
        self.sample_into(rng, &mut out.h, &mut scratch);
        out
    }

    /// Draws into a preallocated `n x m` matrix. `scratch` is reused between
    /// calls to avoid allocating per draw.
    pub(crate) fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        h: &mut CMatrix,
        scratch: &mut Vec<Complex64>,
    ) {
        match &self.factor {
            None => fill_gaussian(rng, h.as_mut_slice()),
            Some(l) => {
                scratch.resize(self.dims.product(), Complex64::new(0.0, 0.0));
                fill_gaussian(rng, scratch);
                let out = h.as_mut_slice();
                for (i, slot) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, z) in scratch.iter().enumerate() {
                        acc += l[(i, j)] * z;
                    }
                    *slot = acc;
                }
            }
        }
    }
}

fn scale_columns(mut vectors: CMatrix, values: &DVector<f64>) -> CMatrix {
    for (j, v) in values.iter().enumerate() {
        vectors.column_mut(j).scale_mut(v.sqrt());
    }
    vectors
}

fn normalize_trace(r: CMatrix, target: f64) -> Result<(CMatrix, bool)> {
    let trace = linalg::trace_re(&r);
    if !(trace > 0.0) || !trace.is_finite() {
        return Err(Error::ZeroTrace);
    }
    if ((trace - target) / target).abs() <= TRACE_TOL {
        Ok((r, false))
    } else {
        Ok((r.scale(target / trace), true))
    }
}

fn fill_gaussian<R: Rng + ?Sized>(rng: &mut R, out: &mut [Complex64]) {
    for z in out.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
    }
}

/// Draws an i.i.d. Rayleigh channel: every entry is CN(0, 1).
pub fn sample_iid<R: Rng + ?Sized>(dims: ChannelDims, rng: &mut R) -> ChannelRealization {
    let mut h = CMatrix::zeros(dims.n(), dims.m());
    fill_gaussian(rng, h.as_mut_slice());
    ChannelRealization { h }
}

/// The `mn x mn` factor `L` with `L L^H = R` for the given model.
pub fn correlation_factor(model: &CorrelationModel, dims: ChannelDims) -> Result<CMatrix> {
    Ok(ChannelModel::new(dims, model.clone())?.factor())
}

/// Draws `vec(H) = L z` for the given correlation model.
pub fn sample_correlated<R: Rng + ?Sized>(
    model: &CorrelationModel,
    dims: ChannelDims,
    rng: &mut R,
) -> Result<ChannelRealization> {
    Ok(ChannelModel::new(dims, model.clone())?.sample(rng))
}

/// Channel power gain `||H||_F^2 = sum |h_ij|^2`.
pub fn power_gain(h: &ChannelRealization) -> f64 {
    h.h.iter().map(|z| z.norm_sqr()).sum()
}

/// Fraction of `trials` sampled channels with `||H||_F^2 < x`.
pub fn empirical_power_cdf(model: &ChannelModel, x: f64, trials: u64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::TooFewTrials { trials, min: 1 });
    }
    let below = rng::sum_over_blocks(trials, seed, rng::default_chunks(trials), |rng, len| {
        let mut h = CMatrix::zeros(model.dims.n(), model.dims.m());
        let mut scratch = Vec::new();
        let mut count = 0;
        for _ in 0..len {
            model.sample_into(rng, &mut h, &mut scratch);
            if h.iter().map(|z| z.norm_sqr()).sum::<f64>() < x {
                count += 1;
            }
        }
        count
    });
    Ok(below as f64 / trials as f64)
}

/// Draws `trials` power gains in block order. Deterministic for a given seed.
pub fn sample_power_gains(model: &ChannelModel, trials: u64, seed: u64) -> Vec<f64> {
    use rayon::prelude::*;
    let blocks = rng::block_count(trials);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = rng::substream(seed, b);
            let mut h = CMatrix::zeros(model.dims.n(), model.dims.m());
            let mut scratch = Vec::new();
            (0..rng::block_len(trials, b))
                .map(|_| {
                    model.sample_into(&mut rng, &mut h, &mut scratch);
                    h.iter().map(|z| z.norm_sqr()).sum::<f64>()
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Exponential correlation `rho^|i-j|` of size `k`, trace-normalized to `k`.
pub fn exponential_correlation(k: usize, rho: f64) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidCorrelationCoefficient(rho));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("correlation size must be positive".into()));
    }
    let r = DMatrix::from_fn(k, k, |i, j| rho.powi((i as i32 - j as i32).abs()));
    let trace = r.trace();
    Ok(r.scale(k as f64 / trace))
}
