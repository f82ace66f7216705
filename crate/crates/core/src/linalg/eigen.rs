//! General complex eigensolver: Osborne balancing, Householder reduction to
//! Hessenberg form, shifted QR with Givens rotations, triangular back-substitution.

use num_complex::Complex;

use super::matrix::{vnorm, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

const BALANCE_SWEEPS: usize = 2000;
const QR_ITERS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues and (optionally) unit-norm right eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<Complex<T>>,
    pub vectors: Option<ComplexMatrix<T>>,
}

/// Diagonal similarity `D⁻¹·A·D` that equalizes off-diagonal row and column
/// norms. Iterated to convergence with unrounded square-root factors; the
/// usual one-pass power-of-two variant stalls on strongly non-normal
/// skin-effect chains.
pub fn balance<T: Real>(a: &mut ComplexMatrix<T>) -> Vec<T> {
    let n = a.rows();
    let mut d = vec![T::one(); n];
    let tol = T::lit(1e-4);
    let lo = T::lit(1e-150);
    let hi = T::lit(1e150);
    for _ in 0..BALANCE_SWEEPS {
        let mut changed = false;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm_sqr();
                    r += a[(i, j)].norm_sqr();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let f = (r.sqrt() / c.sqrt()).sqrt();
            if (f - T::one()).abs() <= tol {
                continue;
            }
            let nd = d[i] * f;
            if nd < lo || nd > hi || !nd.is_finite() {
                continue;
            }
            changed = true;
            d[i] = nd;
            for j in 0..n {
                a[(j, i)] = a[(j, i)] * f;
                a[(i, j)] = a[(i, j)] / f;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

fn hessenberg<T: Real>(h: &mut ComplexMatrix<T>, q: Option<&mut ComplexMatrix<T>>) {
    let n = h.rows();
    let mut q = q;
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = vnorm(&x);
        if alpha == T::zero() {
            continue;
        }
        let x0 = x[0];
        let e = if x0.norm() > T::zero() { x0 / x0.norm() } else { cone() };
        let mut v = x;
        v[0] = v[0] + e * alpha;
        let vv: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == T::zero() {
            continue;
        }
        let two = T::lit(2.0) / vv;
        for j in k..n {
            let mut w = czero();
            for (t, vi) in v.iter().enumerate() {
                w = w + vi.conj() * h[(k + 1 + t, j)];
            }
            let w = w * two;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] = h[(k + 1 + t, j)] - *vi * w;
            }
        }
        for i in 0..n {
            let mut w = czero();
            for (t, vi) in v.iter().enumerate() {
                w = w + h[(i, k + 1 + t)] * *vi;
            }
            let w = w * two;
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] = h[(i, k + 1 + t)] - w * vi.conj();
            }
        }
        if let Some(qm) = q.as_deref_mut() {
            for i in 0..n {
                let mut w = czero();
                for (t, vi) in v.iter().enumerate() {
                    w = w + qm[(i, k + 1 + t)] * *vi;
                }
                let w = w * two;
                for (t, vi) in v.iter().enumerate() {
                    qm[(i, k + 1 + t)] = qm[(i, k + 1 + t)] - w * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
}

/// Givens pair `(c, s)` with `[[c, s], [−s̄, c]]·[a; b] = [r; 0]`.
fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == T::zero() {
        return (T::one(), czero());
    }
    if na == T::zero() {
        return (T::zero(), cone());
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let l1 = m + disc;
    let l2 = m - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur form `A = Z·T·Zᴴ` of an upper Hessenberg matrix, in place.
fn schur<T: Real>(h: &mut ComplexMatrix<T>, mut z: Option<&mut ComplexMatrix<T>>) -> Result<()> {
    let n = h.rows();
    if n <= 1 {
        return Ok(());
    }
    let eps = T::epsilon();
    let small = T::min_positive_value() * T::lit(n as f64) / eps;
    let full = z.is_some();
    let hnorm = h.norm_fro().max(small);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = QR_ITERS_PER_EIGENVALUE * n;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == T::zero() { hnorm } else { s };
            if h[(l, l - 1)].norm() <= eps * s || h[(l, l - 1)].norm() <= small {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence {
                context: "QR iteration".into(),
            });
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift
            h[(hi, hi)] + Complex::new(T::lit(0.75) * h[(hi, hi - 1)].norm(), T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let col_end = if full { n } else { hi + 1 };
        let row_start = if full { 0 } else { l };
        let mut rots: Vec<(T, Complex<T>)> = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..col_end {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -(s.conj() * x) + y * c;
            }
            h[(k + 1, k)] = czero();
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = l + off;
            let row_end = (k + 2).min(hi + 1);
            for i in row_start..row_end {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -(x * s) + y * c;
            }
            if let Some(zm) = z.as_deref_mut() {
                for i in 0..n {
                    let x = zm[(i, k)];
                    let y = zm[(i, k + 1)];
                    zm[(i, k)] = x * c + y * s.conj();
                    zm[(i, k + 1)] = -(x * s) + y * c;
                }
            }
        }
        for i in l..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    Ok(())
}

fn triangular_eigenvectors<T: Real>(t: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = t.rows();
    let eps = T::epsilon();
    let tnorm = t.norm_fro().max(T::min_positive_value());
    let big = T::lit(1e100);
    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        let mut col = vec![czero::<T>(); n];
        col[k] = cone();
        for i in (0..k).rev() {
            let mut s = czero::<T>();
            for j in i + 1..=k {
                s = s + t[(i, j)] * col[j];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < eps * tnorm {
                d = Complex::new(eps * tnorm, T::zero());
            }
            col[i] = -s / d;
            if col[i].norm() > big {
                let f = T::one() / col[i].norm();
                for c in col.iter_mut() {
                    *c = *c * f;
                }
            }
        }
        y.set_column(k, &col);
    }
    y
}

/// Eigen-decomposition of a general square complex matrix.
pub fn eig<T: Real>(a: &ComplexMatrix<T>, want_vectors: bool) -> Result<Eigen<T>> {
    assert!(a.is_square(), "eig of a non-square matrix");
    if !a.is_finite() {
        return Err(Error::NonFinite("eigensolver input".into()));
    }
    let n = a.rows();
    let mut h = a.clone();
    let d = balance(&mut h);
    let mut z = if want_vectors {
        Some(ComplexMatrix::identity(n))
    } else {
        None
    };
    hessenberg(&mut h, z.as_mut());
    schur(&mut h, z.as_mut())?;
    let values = h.diag();
    let vectors = z.map(|zm| {
        let y = triangular_eigenvectors(&h);
        let mut x = zm.matmul(&y);
        for j in 0..n {
            for i in 0..n {
                x[(i, j)] = x[(i, j)] * d[i];
            }
            let nrm = vnorm(&x.column(j));
            if nrm > T::zero() {
                for i in 0..n {
                    x[(i, j)] = x[(i, j)] / nrm;
                }
            }
        }
        x
    });
    Ok(Eigen { values, vectors })
}

pub fn eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    Ok(eig(a, false)?.values)
}

/// Eigenvalues of a Hermitian matrix, sorted ascending (real parts of the QR result).
pub fn hermitian_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let mut v: Vec<T> = eigenvalues(a)?.into_iter().map(|z| z.re).collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(v)
}
