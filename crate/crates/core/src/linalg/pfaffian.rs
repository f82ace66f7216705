use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

/// Pfaffian of an antisymmetric matrix.
///
/// The input is antisymmetrized as `(m − mᵀ)/2` after a `1e-10` relative
/// antisymmetry check. Dimensions 2 and 4 use closed forms; larger ones use
/// Parlett–Reid skew tridiagonalization with pivoting.
pub fn pfaffian<T: Real>(m: &ComplexMatrix<T>) -> Result<Complex<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("pfaffian of a non-square matrix".into()));
    }
    let n = m.rows();
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("pfaffian of odd dimension {n}")));
    }
    if n == 0 {
        return Ok(cone());
    }
    let scale = m.norm_fro();
    let defect = (m + &m.transpose()).norm_fro();
    if scale > T::zero() && defect > T::tol(1e-10, 64.0) * scale {
        return Err(Error::NotAntisymmetric((defect / scale).as_f64()));
    }
    let half = T::lit(0.5);
    let a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] - m[(j, i)]) * half);
    Ok(match n {
        2 => pfaffian_2(&a),
        4 => pfaffian_4(&a),
        _ => pfaffian_parlett_reid(a),
    })
}

pub fn pfaffian_2<T: Real>(a: &ComplexMatrix<T>) -> Complex<T> {
    a[(0, 1)]
}

/// `a01·a23 − a02·a13 + a03·a12`.
pub fn pfaffian_4<T: Real>(a: &ComplexMatrix<T>) -> Complex<T> {
    a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)]
}

/// Skew `L·T·Lᵀ` reduction with row/column pivoting.
pub fn pfaffian_parlett_reid<T: Real>(mut a: ComplexMatrix<T>) -> Complex<T> {
    let n = a.rows();
    let mut pf = cone::<T>();
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].norm();
        for i in k + 2..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for j in k..n {
                let t = a[(k + 1, j)];
                a[(k + 1, j)] = a[(kp, j)];
                a[(kp, j)] = t;
            }
            for i in k..n {
                let t = a[(i, k + 1)];
                a[(i, k + 1)] = a[(i, kp)];
                a[(i, kp)] = t;
            }
            pf = -pf;
        }
        if best == T::zero() {
            return czero();
        }
        let piv = a[(k, k + 1)];
        pf = pf * piv;
        if k + 2 < n {
            let tau: Vec<Complex<T>> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let col: Vec<Complex<T>> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] = a[(i, j)] + tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}
