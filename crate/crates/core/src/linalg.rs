//! Thin bindings to the system BLAS/LAPACK (OpenBLAS) for the two dense
//! kernels that dominate runtime: symmetric eigenvalues and Gram products.
//!
//! Only the LP64 interface is used; matrices are passed in the layout LAPACK
//! expects by exploiting the fact that a row-major `m x n` buffer is a
//! column-major `n x m` view of the transpose.

use crate::error::{Error, Result};
use ndarray::Array2;
use std::os::raw::c_char;

extern "C" {
    fn dsyevd_(
        jobz: *const c_char,
        uplo: *const c_char,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );

    fn dsyrk_(
        uplo: *const c_char,
        trans: *const c_char,
        n: *const i32,
        k: *const i32,
        alpha: *const f64,
        a: *const f64,
        lda: *const i32,
        beta: *const f64,
        c: *mut f64,
        ldc: *const i32,
    );
}

/// Eigenvalues of a symmetric matrix, ascending. The input buffer is
/// consumed as LAPACK scratch.
pub(crate) fn symmetric_eigenvalues(mut a: Array2<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    if n == 0 {
        return Ok(Vec::new());
    }
    let buf = a
        .as_slice_mut()
        .expect("matrix must be in standard layout");
    let nn = n as i32;
    let mut w = vec![0.0f64; n];
    // The buffer is row-major; LAPACK sees the transpose, which has the same
    // eigenvalues. 'L' in the transposed view reads our upper triangle.
    let jobz = b'N' as c_char;
    let uplo = b'L' as c_char;
    let mut info = 0i32;

    // workspace query
    let (mut wkopt, mut iwkopt) = (0.0f64, 0i32);
    let query = -1i32;
    unsafe {
        dsyevd_(
            &jobz,
            &uplo,
            &nn,
            buf.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            &mut wkopt,
            &query,
            &mut iwkopt,
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenSolver { info });
    }
    let lwork = wkopt as i32;
    let liwork = iwkopt.max(1);
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork as usize];
    unsafe {
        dsyevd_(
            &jobz,
            &uplo,
            &nn,
            buf.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::EigenSolver { info });
    }
    Ok(w)
}

/// `Aᵀ A` for a row-major `m x n` matrix, returned as a full (mirrored)
/// symmetric `n x n` matrix.
pub(crate) fn gram_tt(a: &Array2<f64>) -> Array2<f64> {
    let (m, n) = (a.nrows(), a.ncols());
    let src = a.as_slice().expect("matrix must be in standard layout");
    let mut c = Array2::<f64>::zeros((n, n));
    {
        let cbuf = c.as_slice_mut().unwrap();
        let (nn, kk) = (n as i32, m as i32);
        let (alpha, beta) = (1.0f64, 0.0f64);
        // Column-major view of `a` is the n x m transpose, so trans = 'N'
        // computes (Aᵀ)(Aᵀ)ᵀ = AᵀA.
        let uplo = b'L' as c_char;
        let trans = b'N' as c_char;
        unsafe {
            dsyrk_(
                &uplo,
                &trans,
                &nn,
                &kk,
                &alpha,
                src.as_ptr(),
                &nn,
                &beta,
                cbuf.as_mut_ptr(),
                &nn,
            );
        }
    }
    // LAPACK filled one triangle of the column-major view; mirror it.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = c[(i, j)];
            c[(j, i)] = v;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn eigenvalues_of_diagonal() {
        let a = Array2::from_diag(&ndarray::arr1(&[3.0, 1.0, 2.0]));
        let w = symmetric_eigenvalues(a).unwrap();
        assert_eq!(w, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn gram_matches_naive() {
        let a = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let g = gram_tt(&a);
        let expect = a.t().dot(&a);
        for i in 0..3 {
            for j in 0..3 {
                assert!((g[(i, j)] - expect[(i, j)]).abs() < 1e-12);
                assert_eq!(g[(i, j)], g[(j, i)]);
            }
        }
    }
}
