use num_complex::Complex;

use super::eigen::eigenvalues;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// Polynomial `c₀ + c₁·β + … + c_d·β^d`, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs<T> {
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> PolyCoeffs<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(c: &[f64]) -> Self {
        Self::new(c.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
    }

    /// Nominal degree (length − 1), before any trimming.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Drops leading coefficients with magnitude ≤ `rel_tol·max|cᵢ|`.
    pub fn trimmed(&self, rel_tol: T) -> Self {
        let cut = rel_tol * self.max_abs();
        let mut c = self.coeffs.clone();
        while let Some(last) = c.last() {
            if last.norm() <= cut {
                c.pop();
            } else {
                break;
            }
        }
        Self::new(c)
    }

    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(czero(), |acc, &c| acc * x + c)
    }

    fn eval_with_derivative(&self, x: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut p = czero();
        let mut dp = czero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    /// Residual bound used by [`poly_roots`]: `1e-8·max|cᵢ|·max(1,|x|)^d`.
    pub fn residual_bound(&self, x: Complex<T>) -> T {
        let d = self.degree() as i32;
        T::tol(1e-8, 1e4) * self.max_abs() * x.norm().max(T::one()).powi(d)
    }
}

/// All roots, with multiplicity, from eigenvalues of the balanced companion
/// matrix followed by a guarded Newton polish.
pub fn poly_roots<T: Real>(p: &PolyCoeffs<T>) -> Result<Vec<Complex<T>>> {
    let p = p.trimmed(T::lit(0.0));
    if p.coeffs.is_empty() || p.max_abs() == T::zero() {
        return Err(Error::ZeroPolynomial);
    }
    let p = p.trimmed(T::tol(1e-14, 8.0));
    if p.degree() < 1 {
        return Err(Error::InvalidArgument("polynomial of degree 0 has no roots".into()));
    }
    let mut zeros = 0;
    while p.coeffs[zeros].norm() == T::zero() {
        zeros += 1;
    }
    let q = PolyCoeffs::new(p.coeffs[zeros..].to_vec());
    let d = q.degree();
    let mut roots = vec![czero(); zeros];
    if d > 0 {
        let lead = q.coeffs[d];
        let comp = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == 0 {
                -q.coeffs[d - 1 - j] / lead
            } else if i == j + 1 {
                Complex::new(T::one(), T::zero())
            } else {
                czero()
            }
        });
        for r in eigenvalues(&comp)? {
            roots.push(polish(&q, r));
        }
    }
    Ok(roots)
}

fn polish<T: Real>(p: &PolyCoeffs<T>, mut x: Complex<T>) -> Complex<T> {
    let mut fx = p.eval(x).norm();
    for _ in 0..3 {
        let (f, df) = p.eval_with_derivative(x);
        if df.norm() == T::zero() {
            break;
        }
        let y = x - f / df;
        let fy = p.eval(y).norm();
        if fy.is_finite() && fy < fx {
            x = y;
            fx = fy;
        } else {
            break;
        }
    }
    x
}
