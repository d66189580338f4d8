//! Dense complex helpers on top of nalgebra storage.
//!
//! The N×N products that dominate the matrix-valued τ evolutions are routed
//! through matrixmultiply's `zgemm` kernels instead of nalgebra's generic
//! path; everything else (LU solves, symmetric eigensolves) stays on
//! nalgebra.

use matrixmultiply::{zgemm, CGemmOption};
use nalgebra::{DMatrix, DVector};

use crate::C64;

/// `Complex64` and `[f64; 2]` share layout (re, im); matrixmultiply takes
/// the latter.
#[inline]
fn as_zslice(m: &DMatrix<C64>) -> *const [f64; 2] {
    m.as_slice().as_ptr() as *const [f64; 2]
}

fn zgemm_raw(alpha: C64, a: &DMatrix<C64>, b: &DMatrix<C64>, beta: C64, c: &mut DMatrix<C64>) {
    let (m, k) = a.shape();
    let (k2, n) = b.shape();
    assert_eq!(k, k2, "inner dimensions differ");
    assert_eq!(c.shape(), (m, n), "output shape differs");
    // Column-major storage: row stride 1, column stride = nrows.
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            as_zslice(a),
            1,
            m as isize,
            as_zslice(b),
            1,
            k as isize,
            [beta.re, beta.im],
            c.as_mut_slice().as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

/// c = a · b
pub fn matmul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let mut c = DMatrix::zeros(a.nrows(), b.ncols());
    zgemm_raw(C64::new(1.0, 0.0), a, b, C64::new(0.0, 0.0), &mut c);
    c
}

/// c += a · b
pub fn matmul_acc(c: &mut DMatrix<C64>, a: &DMatrix<C64>, b: &DMatrix<C64>) {
    zgemm_raw(C64::new(1.0, 0.0), a, b, C64::new(1.0, 0.0), c);
}

/// c += u vᵀ (no conjugation; callers conjugate what they need).
pub fn outer_acc(c: &mut DMatrix<C64>, u: &DVector<C64>, v: &DVector<C64>) {
    let (m, n) = c.shape();
    assert_eq!(u.len(), m);
    assert_eq!(v.len(), n);
    for j in 0..n {
        let vj = v[j];
        let mut col = c.column_mut(j);
        for i in 0..m {
            col[i] += u[i] * vj;
        }
    }
}

pub fn max_abs_vec(v: &DVector<C64>) -> f64 {
    v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_mat(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff_vec(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn max_abs_diff_mat(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// max |H - H†|, the Hermiticity breach of a square matrix.
pub fn hermiticity_breach(h: &DMatrix<C64>) -> f64 {
    let n = h.nrows();
    let mut breach = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (h[(i, j)] - h[(j, i)].conj()).norm();
            breach = breach.max(d);
        }
    }
    breach
}
