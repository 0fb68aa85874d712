//! Small dense complex-matrix helpers shared by the MPS and index layers.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::SptError;

pub fn identity(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn frobenius_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius inner product <a, b> = tr(a^dag b).
pub fn inner(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Deviation of a from unitarity, ||a^dag a - I||_F.
pub fn unitary_deviation(a: &Array2<C64>) -> f64 {
    let n = a.ncols();
    frobenius_norm(&(dagger(a).dot(a) - identity(n)))
}

pub fn ensure_unitary(a: &Array2<C64>, tol: f64) -> Result<(), SptError> {
    let dev = unitary_deviation(a);
    if dev > tol {
        return Err(SptError::NonUnitary(dev));
    }
    Ok(())
}

/// Nearest unitary in Frobenius norm via the polar decomposition.
pub fn polar_unitary(a: &Array2<C64>) -> Result<Array2<C64>, SptError> {
    let (u, _s, vt) = a
        .svd(true, true)
        .map_err(|e| SptError::Invalid(format!("svd failed: {e}")))?;
    Ok(u.unwrap().dot(&vt.unwrap()))
}

/// Eigendecomposition of a (numerically) hermitian matrix; eigenvectors in
/// columns, so `a v_k = w_k v_k`.
///
/// The LAPACK binding hands row-major storage to a column-major routine, so
/// it effectively diagonalizes the transpose; for complex hermitian input the
/// returned vectors belong to conj(a) and must be conjugated back.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>), SptError> {
    let (w, v) = a
        .eigh(UPLO::Lower)
        .map_err(|e| SptError::Invalid(format!("eigh failed: {e}")))?;
    Ok((w, v.mapv(|z| z.conj())))
}

/// exp(i * scale * h) for hermitian h.
pub fn exp_i_hermitian(h: &Array2<C64>, scale: f64) -> Result<Array2<C64>, SptError> {
    let (w, v) = eigh(h)?;
    let n = h.nrows();
    let mut out = Array2::zeros((n, n));
    for k in 0..n {
        let phase = C64::from_polar(1.0, scale * w[k]);
        let col = v.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += phase * col[i] * col[j].conj();
            }
        }
    }
    Ok(out)
}

pub fn commutator_norm(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    frobenius_norm(&(a.dot(b) - b.dot(a)))
}

/// Hermitian part with the global phase chosen to maximize it; used to turn
/// a fixed-point eigenvector into a positive matrix candidate.
pub fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    let tr = a.diag().sum();
    let phased = if tr.norm() > 1e-14 { a.mapv(|z| z * tr.conj() / tr.norm()) } else { a.clone() };
    let h1 = (&phased + &dagger(&phased)).mapv(|z| z * 0.5);
    let h2 = (&phased - &dagger(&phased)).mapv(|z| z * C64::new(0.0, -0.5));
    let mut h = if frobenius_norm(&h1) >= frobenius_norm(&h2) { h1 } else { h2 };
    // flip overall sign so that the trace is nonnegative
    let tr_h: f64 = h.diag().iter().map(|z| z.re).sum();
    if tr_h < 0.0 {
        h.mapv_inplace(|z| -z);
    }
    h
}

/// Operator norm (largest |eigenvalue|) of a hermitian matrix.
pub fn hermitian_operator_norm(a: &Array2<C64>) -> Result<f64, SptError> {
    let (w, _) = eigh(a)?;
    Ok(w.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
}

pub fn hermitian_deviation(a: &Array2<C64>) -> f64 {
    frobenius_norm(&(a - &dagger(a)))
}
