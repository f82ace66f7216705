use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::scalar::{czero, Real};

/// Thin singular value decomposition `A = U·diag(s)·Vᴴ` from one-sided Jacobi
/// rotations. Singular values are sorted in descending order. Wide inputs are
/// padded with zero rows, so `v` is always `cols × cols`; `u` is only
/// meaningful for `rows ≥ cols`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub s: Vec<T>,
    pub v: ComplexMatrix<T>,
}

const MAX_SWEEPS: usize = 80;

impl<T: Real> Svd<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Self {
        let n = a.cols();
        let m = a.rows().max(n);
        // column-major working copy
        let mut cols: Vec<Vec<Complex<T>>> = (0..n)
            .map(|j| {
                let mut c = a.column(j);
                c.resize(m, czero());
                c
            })
            .collect();
        let mut v: Vec<Vec<Complex<T>>> = (0..n)
            .map(|j| {
                let mut e = vec![czero(); n];
                e[j] = Complex::new(T::one(), T::zero());
                e
            })
            .collect();
        let eps = T::epsilon();
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                    let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                    let gamma = cols[p]
                        .iter()
                        .zip(&cols[q])
                        .fold(czero::<T>(), |acc, (&x, &y)| acc + x.conj() * y);
                    let g = gamma.norm();
                    if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::lit(2.0) * g);
                    let sgn = if zeta >= T::zero() { T::one() } else { -T::one() };
                    let t = sgn / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    let ph = (gamma / g).conj();
                    rotate(&mut cols, p, q, c, s, ph);
                    rotate(&mut v, p, q, c, s, ph);
                }
            }
            if !rotated {
                break;
            }
        }
        let mut order: Vec<(T, usize)> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt(), j))
            .collect();
        order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
        let s: Vec<T> = order.iter().map(|o| o.0).collect();
        let u = ComplexMatrix::from_fn(a.rows(), n, |i, k| {
            let (sig, j) = order[k];
            if sig > T::zero() {
                cols[j][i] / sig
            } else {
                czero()
            }
        });
        let vm = ComplexMatrix::from_fn(n, n, |i, k| v[order[k].1][i]);
        Svd { u, s, v: vm }
    }

    pub fn max_sv(&self) -> T {
        self.s.first().copied().unwrap_or(T::zero())
    }

    pub fn min_sv(&self) -> T {
        self.s.last().copied().unwrap_or(T::zero())
    }

    /// `σ_max / σ_min`; infinite for singular input.
    pub fn condition(&self) -> T {
        let mn = self.min_sv();
        if mn == T::zero() {
            T::infinity()
        } else {
            self.max_sv() / mn
        }
    }

    pub fn rank(&self, rel_tol: T) -> usize {
        let cut = rel_tol * self.max_sv();
        self.s.iter().filter(|&&x| x > cut).count()
    }

    /// Right singular vectors of the `k` smallest singular values.
    pub fn null_vectors(&self, k: usize) -> Vec<Vec<Complex<T>>> {
        let n = self.v.cols();
        (n.saturating_sub(k)..n).map(|j| self.v.column(j)).collect()
    }
}

fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, c: T, s: T, ph: Complex<T>) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let ap = *x;
        let aq = *y * ph;
        *x = ap * c - aq * s;
        *y = ap * s + aq * c;
    }
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn rank_tol<T: Real>(m: &ComplexMatrix<T>, rel_tol: T) -> usize {
    if m.norm_max() == T::zero() {
        return 0;
    }
    Svd::new(m).rank(rel_tol)
}

pub fn condition_number<T: Real>(m: &ComplexMatrix<T>) -> T {
    Svd::new(m).condition()
}
