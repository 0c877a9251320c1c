//! C ABI for `dmt-outage`.
//!
//! Channels are opaque `DmtChannel` handles created by one of the
//! `dmt_channel_new_*` constructors and released with `dmt_channel_free`.
//! Every other function returns a `DmtStatus` and writes its result through
//! an out-pointer; the out-pointer is left untouched on failure. Panics are
//! caught at the boundary and reported as `DMT_STATUS_PANIC`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use dmt_outage::analytic::{
    dmt, low_outage_approx_correlated, low_outage_approx_iid, low_snr_outage, mrc_cdf,
    power_gain_cdf, regime_boundaries, scalar_outage_exact,
};
use dmt_outage::linalg::CMatrix;
use dmt_outage::montecarlo::estimate_outage;
use dmt_outage::{ChannelDims, ChannelModel, CorrelationModel, Error, MultiplexingGain, Snr};

/// Result codes. `DMT_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDimensions = 3,
    InvalidCorrelation = 4,
    SingularCorrelation = 5,
    TooFewTrials = 6,
    ZeroOutageCount = 7,
    Panic = 99,
}

impl From<Error> for DmtStatus {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDims { .. } | Error::DimensionMismatch { .. } => DmtStatus::InvalidDimensions,
            Error::NotHermitian { .. }
            | Error::NotPositiveSemidefinite { .. }
            | Error::ZeroTrace
            | Error::InvalidCorrelationCoefficient(_)
            | Error::NonpositiveEigenvalue(_)
            | Error::AllEigenvaluesZero => DmtStatus::InvalidCorrelation,
            Error::SingularCorrelation => DmtStatus::SingularCorrelation,
            Error::TooFewTrials { .. } => DmtStatus::TooFewTrials,
            Error::ZeroOutageCount { .. } => DmtStatus::ZeroOutageCount,
            _ => DmtStatus::InvalidArgument,
        }
    }
}

/// Opaque channel handle.
pub struct DmtChannel {
    model: ChannelModel,
}

/// Monte Carlo outage estimate with its 95% Wilson interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DmtOutageEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub outage_count: u64,
    pub seed: u64,
}

fn guard<F: FnOnce() -> Result<(), DmtStatus>>(f: F) -> DmtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DmtStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => DmtStatus::Panic,
    }
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), DmtStatus> {
    if out.is_null() {
        return Err(DmtStatus::NullPointer);
    }
    // SAFETY: non-null and, per the caller contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn channel<'a>(ch: *const DmtChannel) -> Result<&'a DmtChannel, DmtStatus> {
    // SAFETY: callers pass a handle from a constructor that has not been freed.
    unsafe { ch.as_ref() }.ok_or(DmtStatus::NullPointer)
}

fn gain(r: f64) -> Result<MultiplexingGain, DmtStatus> {
    Ok(MultiplexingGain::new(r)?)
}

fn new_channel(
    out: *mut *mut DmtChannel,
    build: impl FnOnce() -> Result<ChannelModel, Error>,
) -> DmtStatus {
    guard(|| {
        if out.is_null() {
            return Err(DmtStatus::NullPointer);
        }
        let model = build()?;
        write_out(out, Box::into_raw(Box::new(DmtChannel { model })))
    })
}

/// Creates an i.i.d. Rayleigh channel with `m` transmit and `n` receive
/// antennas.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dmt_channel_new_iid(m: usize, n: usize, out: *mut *mut DmtChannel) -> DmtStatus {
    new_channel(out, || Ok(ChannelModel::iid(ChannelDims::new(m, n)?)))
}

/// Creates a Kronecker-correlated channel with exponential correlation
/// `rho^|i-j|` on each side.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dmt_channel_new_kronecker_exponential(
    m: usize,
    n: usize,
    rho_tx: f64,
    rho_rx: f64,
    out: *mut *mut DmtChannel,
) -> DmtStatus {
    new_channel(out, || {
        let dims = ChannelDims::new(m, n)?;
        ChannelModel::new(dims, CorrelationModel::exponential_kronecker(dims, rho_tx, rho_rx)?)
    })
}

/// Creates a channel with full `mn x mn` correlation `R`, given row-major
/// real and imaginary parts. `im` may be NULL for a real matrix. `R` is
/// rescaled to trace `mn` if needed.
///
/// # Safety
/// `re` (and `im`, when non-null) must point to `len` readable doubles;
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dmt_channel_new_full(
    m: usize,
    n: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut DmtChannel,
) -> DmtStatus {
    if re.is_null() {
        return DmtStatus::NullPointer;
    }
    new_channel(out, || {
        let dims = ChannelDims::new(m, n)?;
        let k = dims.product();
        if len != k * k {
            return Err(Error::DimensionMismatch {
                what: "correlation matrix R",
                expected: k,
                found_rows: len,
                found_cols: 1,
            });
        }
        // SAFETY: caller guarantees `len` readable values.
        let re = std::slice::from_raw_parts(re, len);
        let im = if im.is_null() {
            None
        } else {
            Some(std::slice::from_raw_parts(im, len))
        };
        let r = CMatrix::from_fn(k, k, |i, j| {
            Complex64::new(re[i * k + j], im.map_or(0.0, |v| v[i * k + j]))
        });
        ChannelModel::new(dims, CorrelationModel::Full(r))
    })
}

/// Releases a channel handle. NULL is ignored.
///
/// # Safety
/// `ch` must come from a `dmt_channel_new_*` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dmt_channel_free(ch: *mut DmtChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Reports whether the correlation input was rescaled to trace `mn`.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_channel_rescaled(ch: *const DmtChannel, out: *mut bool) -> DmtStatus {
    guard(|| write_out(out, channel(ch)?.model.rescaled()))
}

/// Low-SNR outage `F_H(m r)` of the channel.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_low_snr_outage(ch: *const DmtChannel, r: f64, out: *mut f64) -> DmtStatus {
    guard(|| {
        let model = &channel(ch)?.model;
        let cdf = power_gain_cdf(model)?;
        write_out(out, low_snr_outage(cdf.as_ref(), model.dims().m(), gain(r)?))
    })
}

/// Low-outage approximation `(m r)^{mn} / ((mn)! det R)`. Returns
/// `DMT_STATUS_SINGULAR_CORRELATION` when `R` is singular.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_low_outage_approx(ch: *const DmtChannel, r: f64, out: *mut f64) -> DmtStatus {
    guard(|| {
        let model = &channel(ch)?.model;
        let r = gain(r)?;
        let v = if model.is_iid() {
            low_outage_approx_iid(model.dims(), r)
        } else {
            low_outage_approx_correlated(model, r)?
        };
        write_out(out, v)
    })
}

/// Monte Carlo outage at linear SNR `gamma`. Deterministic in
/// (`trials`, `seed`) regardless of thread count.
///
/// # Safety
/// `ch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_estimate_outage(
    ch: *const DmtChannel,
    gamma: f64,
    r: f64,
    trials: u64,
    seed: u64,
    out: *mut DmtOutageEstimate,
) -> DmtStatus {
    guard(|| {
        let model = &channel(ch)?.model;
        let e = estimate_outage(model, Snr::new(gamma)?, gain(r)?, trials, seed)?;
        write_out(
            out,
            DmtOutageEstimate {
                p_hat: e.p_hat,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
                trials: e.trials,
                outage_count: e.outage_count,
                seed: e.seed,
            },
        )
    })
}

/// `F_k(x)`, the k-branch MRC outage CDF.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_mrc_cdf(k: u32, x: f64, out: *mut f64) -> DmtStatus {
    guard(|| write_out(out, mrc_cdf(k, x)?))
}

/// Diversity gain `d(r)` of the i.i.d. DMT curve.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_diversity_gain(m: usize, n: usize, r: f64, out: *mut f64) -> DmtStatus {
    guard(|| write_out(out, dmt(ChannelDims::new(m, n)?, gain(r)?)?.d))
}

/// Exact outage of the 1x1 Rayleigh channel.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_scalar_outage_exact(r: f64, gamma: f64, out: *mut f64) -> DmtStatus {
    guard(|| write_out(out, scalar_outage_exact(gain(r)?, Snr::new(gamma)?)?))
}

/// High-SNR boundary `10^{1/r}` (linear) of the scalar channel, `0 < r <= 1`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn dmt_high_snr_boundary(r: f64, out: *mut f64) -> DmtStatus {
    guard(|| write_out(out, regime_boundaries(gain(r)?)?.gamma_high))
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn dmt_status_message(status: DmtStatus) -> *const c_char {
    let msg: &'static std::ffi::CStr = match status {
        DmtStatus::Ok => c"ok",
        DmtStatus::NullPointer => c"null pointer argument",
        DmtStatus::InvalidArgument => c"invalid argument",
        DmtStatus::InvalidDimensions => c"invalid antenna counts or matrix dimensions",
        DmtStatus::InvalidCorrelation => c"invalid correlation matrix",
        DmtStatus::SingularCorrelation => c"singular correlation matrix",
        DmtStatus::TooFewTrials => c"too few Monte Carlo trials",
        DmtStatus::ZeroOutageCount => c"no outages observed",
        DmtStatus::Panic => c"internal panic",
    };
    msg.as_ptr()
}
