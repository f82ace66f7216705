use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Self {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f.re == T::zero() && f.im == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex<T> {
        if self.singular {
            return czero();
        }
        let mut d = Complex::new(self.sign, T::zero());
        for i in 0..self.lu.rows() {
            d = d * self.lu[(i, i)];
        }
        d
    }

    /// Ratio of smallest to largest pivot magnitude; a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> T {
        let d: Vec<T> = self.lu.diag().iter().map(|z| z.norm()).collect();
        let mx = d.iter().cloned().fold(T::zero(), T::max);
        let mn = d.iter().cloned().fold(T::infinity(), T::min);
        if mx == T::zero() {
            T::zero()
        } else {
            mn / mx
        }
    }

    pub fn solve_vec(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if self.singular {
            return Err(Error::Singular {
                context: "LU solve".into(),
            });
        }
        let n = self.lu.rows();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn solve(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.column(j))?;
            out.set_column(j, &x);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix<T>> {
        self.solve(&ComplexMatrix::identity(self.lu.rows()))
    }
}

pub fn det<T: Real>(a: &ComplexMatrix<T>) -> Complex<T> {
    match a.rows() {
        0 => cone(),
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        _ => Lu::new(a).det(),
    }
}

pub fn inverse<T: Real>(a: &ComplexMatrix<T>, context: &str) -> Result<ComplexMatrix<T>> {
    let lu = Lu::new(a);
    let inv = lu.inverse().map_err(|_| Error::Singular {
        context: context.to_string(),
    })?;
    if !inv.is_finite() {
        return Err(Error::Singular {
            context: context.to_string(),
        });
    }
    Ok(inv)
}

/// Solves `A·X = B`.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>, context: &str) -> Result<ComplexMatrix<T>> {
    let x = Lu::new(a).solve(b).map_err(|_| Error::Singular {
        context: context.to_string(),
    })?;
    if !x.is_finite() {
        return Err(Error::Singular {
            context: context.to_string(),
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_tracks_row_swaps() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(det(&a), Complex::new(-1.0, 0.0));
    }

    #[test]
    fn inverse_round_trips() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let inv = inverse(&a, "test").unwrap();
        assert!(a.matmul(&inv).dist(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn singular_matrix_reports_context() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(Lu::new(&a).is_singular());
        match inverse(&a, "lead block") {
            Err(Error::Singular { context }) => assert!(context.contains("lead block")),
            other => panic!("expected a singular error, got {other:?}"),
        }
    }
}
