use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cyclic Jacobi eigen-decomposition of a real symmetric matrix stored as the
/// real part of `s`. Returns the orthogonal eigenvector matrix (columns).
fn real_symmetric_eigenvectors<T: Real>(s: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = s.len();
    let mut a: Vec<Vec<T>> = s.to_vec();
    let mut q: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();
    for _ in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let tot: T = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off <= eps * eps * tot || off == T::zero() {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                if a[p][r] == T::zero() {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (T::lit(2.0) * a[p][r]);
                let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akr = a[k][r];
                    a[k][p] = c * akp - sn * akr;
                    a[k][r] = sn * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let ark = a[r][k];
                    a[p][k] = c * apk - sn * ark;
                    a[r][k] = sn * apk + c * ark;
                }
                for row in q.iter_mut() {
                    let qp = row[p];
                    let qr = row[r];
                    row[p] = c * qp - sn * qr;
                    row[r] = sn * qp + c * qr;
                }
            }
        }
    }
    q
}

/// Takagi factor of a symmetric unitary matrix: returns unitary `V` with
/// `V·Vᵀ = u`.
///
/// A symmetric unitary matrix has commuting real symmetric parts
/// `Re u` and `Im u`, so one real orthogonal `Q` diagonalizes both. `Q` is
/// taken from `Re u + α·Im u` for an irrational-looking `α`; a second `α` is
/// tried if accidental degeneracy leaves `Qᵀ·u·Q` non-diagonal. Then
/// `V = Q·diag(√λ)` with the principal branch.
pub fn takagi_factor<T: Real>(u: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch("takagi of a non-square matrix".into()));
    }
    let n = u.rows();
    let tol = T::tol(1e-10, 256.0);
    let sym = u.dist(&u.transpose());
    let uni = u.matmul(&u.adjoint()).dist(&ComplexMatrix::identity(n));
    if sym > tol || uni > tol {
        return Err(Error::NotSymmetricUnitary(sym.max(uni).as_f64()));
    }
    for &alpha in &[0.618_033_988_749_894_9, 1.324_717_957_244_746, 0.271_828_182_845_904_5, 2.236_067_977_499_79] {
        let al = T::lit(alpha);
        let s: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| u[(i, j)].re + al * u[(i, j)].im).collect())
            .collect();
        let q = real_symmetric_eigenvectors(&s);
        let qm = ComplexMatrix::from_fn(n, n, |i, j| Complex::new(q[i][j], T::zero()));
        let d = qm.transpose().matmul(u).matmul(&qm);
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        if off > T::tol(1e-9, 1024.0) {
            continue;
        }
        let v = ComplexMatrix::from_fn(n, n, |i, j| qm[(i, j)] * d[(j, j)].sqrt());
        let err = v.matmul(&v.transpose()).dist(u);
        if err <= T::tol(1e-10, 1024.0) {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence {
        context: "Takagi factorization".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factors_to_orthogonal() {
        let v = takagi_factor(&ComplexMatrix::<f64>::identity(3)).unwrap();
        assert!(v.matmul(&v.transpose()).dist(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn pauli_x_needs_complex_factor() {
        let sx = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let v = takagi_factor(&sx).unwrap();
        assert!(v.matmul(&v.transpose()).dist(&sx) < 1e-12);
        assert!(v.matmul(&v.adjoint()).dist(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn rejects_non_symmetric_or_non_unitary() {
        let skew = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(matches!(takagi_factor(&skew), Err(Error::NotSymmetricUnitary(_))));
        let scaled = ComplexMatrix::<f64>::identity(2).scale(Complex::new(2.0, 0.0));
        assert!(matches!(takagi_factor(&scaled), Err(Error::NotSymmetricUnitary(_))));
        assert!(matches!(takagi_factor(&ComplexMatrix::<f64>::zeros(2, 3)), Err(Error::DimensionMismatch(_))));
    }
}
