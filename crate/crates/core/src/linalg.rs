//! Small dense complex linear-algebra helpers shared by the channel and
//! analytic modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Maximum elementwise deviation from Hermitian symmetry accepted on input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues below `-PSD_TOL * lambda_max` are rejected; those between that
/// and zero are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

pub fn max_hermitian_deviation(a: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_square(a: &CMatrix, expected: usize, what: &'static str) -> Result<()> {
    if a.nrows() != expected || a.ncols() != expected {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found_rows: a.nrows(),
            found_cols: a.ncols(),
        });
    }
    Ok(())
}

pub fn check_hermitian(a: &CMatrix) -> Result<()> {
    let dev = max_hermitian_deviation(a);
    if dev > HERMITIAN_TOL || !dev.is_finite() {
        return Err(Error::NotHermitian { max_deviation: dev });
    }
    Ok(())
}

pub fn trace_re(a: &CMatrix) -> f64 {
    (0..a.nrows()).map(|i| a[(i, i)].re).sum()
}

/// Eigen-decomposition of a Hermitian PSD matrix with the clamping rule
/// applied: returns (eigenvalues >= 0, eigenvectors as columns).
pub fn hermitian_psd_eigen(a: &CMatrix) -> Result<(DVector<f64>, CMatrix)> {
    // Symmetrize exactly so round-off in the input cannot leak into the
    // eigensolver.
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let largest = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let mut values = eig.eigenvalues.clone();
    for v in values.iter_mut() {
        if !v.is_finite() {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: *v,
                largest,
            });
        }
        if *v < 0.0 {
            if *v < -PSD_TOL * largest {
                return Err(Error::NotPositiveSemidefinite {
                    eigenvalue: *v,
                    largest,
                });
            }
            *v = 0.0;
        }
    }
    Ok((values, eig.eigenvectors))
}

/// Returns L = U * sqrt(Lambda), so that L * L^H reproduces `a`.
pub fn psd_factor(a: &CMatrix) -> Result<CMatrix> {
    let (values, mut vectors) = hermitian_psd_eigen(a)?;
    for (j, v) in values.iter().enumerate() {
        let s = v.sqrt();
        vectors.column_mut(j).scale_mut(s);
    }
    Ok(vectors)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Frobenius-relative distance ||a - b||_F / ||b||_F.
pub fn relative_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    let denom = b.norm();
    let num = (a - b).norm();
    if denom == 0.0 {
        num
    } else {
        num / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_matches_block_definition() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)]);
        let b = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(-1.0, 0.0)]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (2, 4));
        assert_eq!(k[(0, 3)], c(-2.0, 0.0));
        assert_eq!(k[(1, 0)], c(0.0, 1.0));
        assert_eq!(k[(1, 3)], c(-3.0, 0.0));
    }

    #[test]
    fn factor_of_complex_hermitian() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(1.0, 0.0)]);
        let l = psd_factor(&a).unwrap();
        assert!(relative_frobenius(&(&l * l.adjoint()), &a) < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            hermitian_psd_eigen(&a),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn clamps_round_off_negative_eigenvalue() {
        // Rank-one matrix; one eigenvalue is zero up to round-off.
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let a = CMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj());
        let (vals, _) = hermitian_psd_eigen(&a).unwrap();
        assert!(vals.iter().all(|&x| x >= 0.0));
    }
}
