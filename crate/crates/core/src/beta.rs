//! Roots of `det[ω − H(β)] = 0`, their nullvectors, block detection and the
//! dominant-root selection.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{det, poly_roots, vdot, vnorm, ComplexMatrix, PolyCoeffs, Svd};
use crate::model::LatticeModel;
use crate::scalar::{czero, to_pair, Real};

/// Leading/trailing coefficient cut (relative to the largest scaled
/// coefficient) below which a root is taken to sit at `∞` or at `0`.
pub const DEGREE_DROP_TOL: f64 = 1e-11;
/// Roots closer than this (relative) are treated as one multiple root.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Roots closer than this (relative) are merged when the nullspace at their
/// mean has full dimension. Semisimple multiple roots of the determinant
/// polynomial split at about `√ε` before clustering.
pub const CLUSTER_CANDIDATE_TOL: f64 = 1e-5;
/// Smallest singular value of the stacked nullvectors of nearby roots for
/// them to count as distinct rather than a Jordan chain.
pub const DISTINCT_NULLVECTOR_TOL: f64 = 1e-4;
/// Relative singular-value level accepted as a genuine null direction of a
/// multiple root.
pub const NULLSPACE_TOL: f64 = 1e-6;
/// Relative magnitude tie at the selection boundary.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BetaRoot<T> {
    /// `+∞` (real part) when `infinite`.
    pub beta: Complex<T>,
    pub infinite: bool,
    /// Unit-norm `M`-vector, zero outside its sector.
    pub nullvector: Vec<Complex<T>>,
    pub sector: usize,
    /// `‖[ω − H(β)]x‖ / max(1, ‖H(β)‖)`, or `‖V x‖` / `‖W x‖` for roots at `∞` / `0`.
    pub residual: T,
}

impl<T: Real> BetaRoot<T> {
    pub fn magnitude(&self) -> T {
        if self.infinite {
            T::infinity()
        } else {
            self.beta.norm()
        }
    }

    /// `1/β`, zero for a root at infinity.
    pub fn inv_beta(&self) -> Complex<T> {
        if self.infinite {
            czero()
        } else {
            self.beta.inv()
        }
    }
}

#[derive(Debug, Clone)]
pub struct BetaRootSet<T> {
    pub omega: Complex<T>,
    /// All `2M` roots, descending `|β|` (roots at infinity first).
    pub roots: Vec<BetaRoot<T>>,
    /// Finest structural block partition of the internal indices.
    pub sectors: Vec<Vec<usize>>,
}

impl<T: Real> BetaRootSet<T> {
    pub fn betas(&self) -> Vec<Complex<T>> {
        self.roots.iter().map(|r| r.beta).collect()
    }

    pub fn finite_betas(&self) -> Vec<Complex<T>> {
        self.roots.iter().filter(|r| !r.infinite).map(|r| r.beta).collect()
    }

    pub fn in_sector(&self, s: usize) -> Vec<&BetaRoot<T>> {
        self.roots.iter().filter(|r| r.sector == s).collect()
    }
}

fn is_nonzero<T: Real>(z: Complex<T>) -> bool {
    z.re != T::zero() || z.im != T::zero()
}

/// Connected components of the graph with an edge `i ~ j` whenever `h`, `V`
/// or `W` has an exactly nonzero `(i, j)` or `(j, i)` entry.
pub fn detect_blocks<T: Real>(model: &LatticeModel<T>) -> Vec<Vec<usize>> {
    let m = model.dim();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..m {
        for j in 0..m {
            if i != j && (is_nonzero(model.h[(i, j)]) || is_nonzero(model.v[(i, j)]) || is_nonzero(model.w[(i, j)])) {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; m];
    for i in 0..m {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[label[r]].push(i);
    }
    blocks
}

/// `β^m·det[ω − H(β)] = det[β(ω − h) − Vβ² − W]`, a polynomial of degree ≤ 2m.
fn cleared_det<T: Real>(model: &LatticeModel<T>, omega: Complex<T>, beta: Complex<T>) -> Complex<T> {
    let m = model.dim();
    let b2 = beta * beta;
    let mat = ComplexMatrix::from_fn(m, m, |i, j| {
        let onsite = if i == j { omega - model.h[(i, j)] } else { -model.h[(i, j)] };
        onsite * beta - model.v[(i, j)] * b2 - model.w[(i, j)]
    });
    det(&mat)
}

/// Scaled coefficients `b_j = c_j·ρ^j` by an inverse DFT of samples on the
/// circle of radius `ρ`.
fn scaled_coefficients<T: Real>(model: &LatticeModel<T>, omega: Complex<T>, rho: T) -> Vec<Complex<T>> {
    let d = 2 * model.dim();
    let n = d + 1;
    let two_pi = T::lit(2.0) * T::PI();
    let samples: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let th = two_pi * T::lit(k as f64) / T::lit(n as f64);
            cleared_det(model, omega, Complex::from_polar(rho, th))
        })
        .collect();
    (0..n)
        .map(|j| {
            let mut s = czero::<T>();
            for (k, f) in samples.iter().enumerate() {
                let th = -two_pi * T::lit(((j * k) % n) as f64) / T::lit(n as f64);
                s = s + *f * Complex::from_polar(T::one(), th);
            }
            s / T::lit(n as f64)
        })
        .collect()
}

/// Coefficients of `β^m·det[ω − H(β)]` (ascending, nominal degree `2m`).
pub fn characteristic_polynomial<T: Real>(model: &LatticeModel<T>, omega: Complex<T>) -> PolyCoeffs<T> {
    let b = scaled_coefficients(model, omega, T::one());
    PolyCoeffs::new(b)
}

/// Geometric mean of a Cauchy upper bound and a reciprocal lower bound on
/// the nonzero finite roots.
fn radius_from<T: Real>(b: &[Complex<T>]) -> T {
    let mx = b.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let cut = T::lit(DEGREE_DROP_TOL) * mx;
    let lo = b.iter().position(|z| z.norm() > cut);
    let hi = b.iter().rposition(|z| z.norm() > cut);
    match (lo, hi) {
        (Some(lo), Some(hi)) if hi > lo => {
            let upper = T::one() + b[lo..hi].iter().map(|z| z.norm() / b[hi].norm()).fold(T::zero(), T::max);
            let lower = T::one() / (T::one() + b[lo + 1..=hi].iter().map(|z| z.norm() / b[lo].norm()).fold(T::zero(), T::max));
            let r = (upper * lower).sqrt();
            r.max(T::lit(1e-3)).min(T::lit(1e3))
        }
        _ => T::one(),
    }
}

/// Finds all `2m` roots of one sector. Returns `(β or None for ∞, multiplicity-expanded)`.
fn sector_roots<T: Real>(model: &LatticeModel<T>, omega: Complex<T>) -> Result<(Vec<Complex<T>>, usize, usize)> {
    let m = model.dim();
    let d = 2 * m;
    let rho = radius_from(&scaled_coefficients(model, omega, T::one()));
    let b = scaled_coefficients(model, omega, rho);
    let mx = b.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let scale = {
        let s = (omega.norm() + model.h.norm_fro()) * rho + model.v.norm_fro() * rho * rho + model.w.norm_fro();
        s.powi(m as i32)
    };
    if mx <= T::tol(1e-13, 64.0) * scale || mx == T::zero() {
        return Err(Error::IllPosed);
    }
    let cut = T::tol(DEGREE_DROP_TOL, 1e4) * mx;
    let hi = b.iter().rposition(|z| z.norm() > cut).expect("nonzero polynomial");
    let lo = b.iter().position(|z| z.norm() > cut).expect("nonzero polynomial");
    let n_inf = d - hi;
    let n_zero = lo;
    let mut roots = Vec::with_capacity(hi - lo);
    if hi > lo {
        let q = PolyCoeffs::new(b[lo..=hi].to_vec());
        for y in poly_roots(&q)? {
            roots.push(y * rho);
        }
    }
    Ok((roots, n_zero, n_inf))
}

/// Orthonormal basis of the `k`-dimensional (numerical) nullspace of `a`, or a
/// Jordan-block error when fewer than `k` singular values are negligible.
fn nullspace<T: Real>(a: &ComplexMatrix<T>, k: usize, beta: Complex<T>) -> Result<Vec<Vec<Complex<T>>>> {
    let svd = Svd::new(a);
    let n = a.cols();
    if k > 1 || k > n {
        let tol = T::tol(NULLSPACE_TOL, 1e6) * svd.max_sv().max(T::one());
        let nullity = svd.s.iter().filter(|&&s| s <= tol).count();
        if nullity < k {
            return Err(Error::JordanBlock {
                beta: to_pair(beta),
                multiplicity: k,
                nullity,
            });
        }
    }
    Ok(svd.null_vectors(k))
}

fn residual<T: Real>(model: &LatticeModel<T>, omega: Complex<T>, beta: Complex<T>, x: &[Complex<T>]) -> T {
    match model.h_beta(beta) {
        Ok(hb) => {
            let r = hb.matvec(x);
            let e: T = r.iter().zip(x).map(|(hx, xi)| (*xi * omega - *hx).norm_sqr()).sum::<T>().sqrt();
            e / hb.norm_fro().max(T::one())
        }
        Err(_) => T::infinity(),
    }
}

fn embed<T: Real>(m: usize, idx: &[usize], x: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = vec![czero(); m];
    for (k, &i) in idx.iter().enumerate() {
        out[i] = x[k];
    }
    out
}

fn root_order<T: Real>(a: &BetaRoot<T>, b: &BetaRoot<T>) -> Ordering {
    b.magnitude()
        .partial_cmp(&a.magnitude())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.beta.im.atan2(a.beta.re).partial_cmp(&b.beta.im.atan2(b.beta.re)).unwrap_or(Ordering::Equal))
        .then_with(|| a.sector.cmp(&b.sector))
}

fn resolvent<T: Real>(model: &LatticeModel<T>, omega: Complex<T>, beta: Complex<T>) -> Result<ComplexMatrix<T>> {
    Ok(model.h_beta(beta)?.scale(-Complex::new(T::one(), T::zero())).add_diag(omega))
}

/// Newton steps `β ← β − tr[(Yᴴ Q'(β) X)⁻¹ Yᴴ Q(β) X]/k` on a semisimple
/// root of multiplicity `k`, with `X`, `Y` the right and left null bases of
/// `Q(β) = ω − H(β)`.
fn refine_multiple<T: Real>(model: &LatticeModel<T>, omega: Complex<T>, start: Complex<T>, k: usize) -> Result<Complex<T>> {
    let mut beta = start;
    for _ in 0..3 {
        let q = resolvent(model, omega, beta)?;
        let x = ComplexMatrix::from_columns(&Svd::new(&q).null_vectors(k));
        let y = ComplexMatrix::from_columns(&Svd::new(&q.adjoint()).null_vectors(k));
        // Q'(β) = −V + W/β²
        let dq = &model.w.scale((beta * beta).inv()) - &model.v;
        let yh = y.adjoint();
        let num = yh.matmul(&q).matmul(&x);
        let den = yh.matmul(&dq).matmul(&x);
        let step = match crate::linalg::solve(&den, &num, "multiple-root refinement") {
            Ok(s) => s.trace() / T::lit(k as f64),
            Err(_) => break,
        };
        if !(step.norm() < T::lit(CLUSTER_CANDIDATE_TOL) * beta.norm().max(T::one())) {
            break;
        }
        beta = beta - step;
        if step.norm() <= T::epsilon() * beta.norm().max(T::one()) {
            break;
        }
    }
    Ok(beta)
}

/// Nullvectors for a group of nearby roots: one multiple root if the
/// nullspace at the mean is large enough, separate roots if they are not too
/// close and have independent nullvectors, a Jordan block otherwise.
fn resolve_cluster<T: Real>(
    model: &LatticeModel<T>,
    omega: Complex<T>,
    betas: &[Complex<T>],
) -> Result<Vec<(Complex<T>, Vec<Complex<T>>)>> {
    let k = betas.len();
    let mean = betas.iter().fold(czero::<T>(), |a, b| a + *b) / T::lit(k as f64);
    let merged = nullspace(&resolvent(model, omega, mean)?, k, mean);
    if k == 1 {
        return Ok(merged?.into_iter().map(|x| (mean, x)).collect());
    }
    let err = match merged {
        Ok(_) => {
            let beta = refine_multiple(model, omega, mean, k)?;
            let xs = nullspace(&resolvent(model, omega, beta)?, k, beta)?;
            return Ok(xs.into_iter().map(|x| (beta, x)).collect());
        }
        Err(e) => e,
    };
    let close = T::lit(CLUSTER_TOL) * mean.norm().max(T::one());
    let separated = betas
        .iter()
        .enumerate()
        .all(|(i, a)| betas[i + 1..].iter().all(|b| (*a - *b).norm() > close));
    if !separated {
        return Err(err);
    }
    let mut out = Vec::with_capacity(k);
    for &b in betas {
        let x = nullspace(&resolvent(model, omega, b)?, 1, b)?.remove(0);
        out.push((b, x));
    }
    let stacked = ComplexMatrix::from_columns(&out.iter().map(|p| p.1.clone()).collect::<Vec<_>>());
    if Svd::new(&stacked).min_sv() < T::lit(DISTINCT_NULLVECTOR_TOL) {
        return Err(err);
    }
    Ok(out)
}

/// All roots of `det[ω − H(β)] = 0`, sector by sector, with nullvectors.
pub fn beta_roots<T: Real>(model: &LatticeModel<T>, omega: Complex<T>) -> Result<BetaRootSet<T>> {
    let m = model.dim();
    let sectors = detect_blocks(model);
    let mut out: Vec<BetaRoot<T>> = Vec::with_capacity(2 * m);
    for (s, idx) in sectors.iter().enumerate() {
        let sub = model.restricted(idx);
        let (finite, n_zero, n_inf) = sector_roots(&sub, omega)?;
        if n_inf > 0 {
            for x in nullspace(&sub.v, n_inf, Complex::new(T::infinity(), T::zero()))? {
                let res = vnorm(&sub.v.matvec(&x)) / sub.v.norm_fro().max(T::one());
                out.push(BetaRoot {
                    beta: Complex::new(T::infinity(), T::zero()),
                    infinite: true,
                    nullvector: embed(m, idx, &x),
                    sector: s,
                    residual: res,
                });
            }
        }
        if n_zero > 0 {
            for x in nullspace(&sub.w, n_zero, czero())? {
                let res = vnorm(&sub.w.matvec(&x)) / sub.w.norm_fro().max(T::one());
                out.push(BetaRoot {
                    beta: czero(),
                    infinite: false,
                    nullvector: embed(m, idx, &x),
                    sector: s,
                    residual: res,
                });
            }
        }
        let mut used = vec![false; finite.len()];
        for i in 0..finite.len() {
            if used[i] {
                continue;
            }
            let tol = T::lit(CLUSTER_CANDIDATE_TOL) * finite[i].norm().max(T::one());
            let members: Vec<usize> = (i..finite.len()).filter(|&j| !used[j] && (finite[j] - finite[i]).norm() <= tol).collect();
            for &j in &members {
                used[j] = true;
            }
            for (beta, x) in resolve_cluster(&sub, omega, &members.iter().map(|&j| finite[j]).collect::<Vec<_>>())? {
                let full = embed(m, idx, &x);
                let res = residual(model, omega, beta, &full);
                out.push(BetaRoot {
                    beta,
                    infinite: false,
                    nullvector: full,
                    sector: s,
                    residual: res,
                });
            }
        }
    }
    out.sort_by(root_order);
    Ok(BetaRootSet {
        omega,
        roots: out,
        sectors,
    })
}

fn tied<T: Real>(a: &BetaRoot<T>, b: &BetaRoot<T>) -> bool {
    match (a.infinite, b.infinite) {
        (true, true) => true,
        (false, false) => {
            let (x, y) = (a.magnitude(), b.magnitude());
            (x - y).abs() <= T::tol(TIE_TOL, 16.0) * x.max(y) || (x == T::zero() && y == T::zero())
        }
        _ => false,
    }
}

/// The `m_s` largest-`|β|` roots of every sector of internal size `m_s`
/// (the plain `M` largest when there is a single sector). A magnitude tie at
/// any sector boundary is reported as [`Error::GaplessOrCritical`].
pub fn select_dominant<T: Real>(set: &BetaRootSet<T>) -> Result<Vec<BetaRoot<T>>> {
    let mut chosen = Vec::new();
    for (s, idx) in set.sectors.iter().enumerate() {
        let roots = set.in_sector(s);
        let ms = idx.len();
        if roots.len() != 2 * ms {
            return Err(Error::DimensionMismatch(format!(
                "sector {s} has {} roots, expected {}",
                roots.len(),
                2 * ms
            )));
        }
        if tied(roots[ms - 1], roots[ms]) {
            return Err(Error::GaplessOrCritical {
                tied: vec![to_pair(roots[ms - 1].beta), to_pair(roots[ms].beta)],
            });
        }
        chosen.extend(roots[..ms].iter().map(|r| (*r).clone()));
    }
    chosen.sort_by(root_order);
    Ok(chosen)
}

/// Largest deviation of the selected-and-unselected nullvectors from a
/// linear fit `x(ω) ≈ x(0) + ω·δx` over `omegas` (real, small). Each
/// `x(ω)` is matched to its `ω = 0` root within the same sector and phase
/// aligned to `x(0)`.
pub fn nullvector_linearity_check<T: Real>(model: &LatticeModel<T>, omegas: &[T]) -> Result<T> {
    let base = beta_roots(model, czero())?;
    for s in 0..base.sectors.len() {
        let rs = base.in_sector(s);
        for (i, a) in rs.iter().enumerate() {
            for b in &rs[i + 1..] {
                let same = if a.infinite || b.infinite {
                    a.infinite && b.infinite
                } else {
                    (a.beta - b.beta).norm() <= T::lit(CLUSTER_TOL) * a.magnitude().max(T::one())
                };
                if same {
                    return Err(Error::DegenerateRoots);
                }
            }
        }
    }
    let samples: Vec<BetaRootSet<T>> = omegas
        .iter()
        .map(|&w| beta_roots(model, Complex::new(w, T::zero())))
        .collect::<Result<_>>()?;
    let mut worst = T::zero();
    for r0 in &base.roots {
        let mut devs: Vec<(T, Vec<Complex<T>>)> = Vec::new();
        for (w, set) in omegas.iter().zip(&samples) {
            let best = set
                .roots
                .iter()
                .filter(|r| r.sector == r0.sector && r.infinite == r0.infinite)
                .min_by(|a, b| {
                    let da = if r0.infinite { T::zero() } else { (a.beta - r0.beta).norm() };
                    let db = if r0.infinite { T::zero() } else { (b.beta - r0.beta).norm() };
                    da.partial_cmp(&db).unwrap_or(Ordering::Equal)
                })
                .ok_or(Error::DegenerateRoots)?;
            let ov = vdot(&r0.nullvector, &best.nullvector);
            let ph = if ov.norm() > T::zero() { ov.conj() / ov.norm() } else { Complex::new(T::one(), T::zero()) };
            let d: Vec<Complex<T>> = best.nullvector.iter().zip(&r0.nullvector).map(|(x, x0)| *x * ph - *x0).collect();
            devs.push((*w, d));
        }
        let ww: T = devs.iter().map(|(w, _)| *w * *w).sum();
        let m = r0.nullvector.len();
        let slope: Vec<Complex<T>> = (0..m)
            .map(|i| {
                if ww == T::zero() {
                    czero()
                } else {
                    devs.iter().fold(czero::<T>(), |acc, (w, d)| acc + d[i] * *w) / ww
                }
            })
            .collect();
        for (w, d) in &devs {
            let r: T = d.iter().zip(&slope).map(|(di, si)| (*di - *si * *w).norm_sqr()).sum::<T>().sqrt();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ssh(v: f64, w: f64) -> LatticeModel<f64> {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, v], &[v, 0.0]]);
        let vv = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[w, 0.0]]);
        let ww = ComplexMatrix::from_real_rows(&[&[0.0, w], &[0.0, 0.0]]);
        LatticeModel::new(h, vv, ww).unwrap()
    }

    #[test]
    fn ssh_zero_energy_roots() {
        let set = beta_roots(&ssh(0.5, 1.0), Complex::new(0.0, 0.0)).unwrap();
        assert_eq!(set.roots.len(), 4);
        let mut mags: Vec<f64> = set.roots.iter().map(|r| r.magnitude()).collect();
        mags.sort_by(f64::total_cmp);
        assert_eq!(mags[0], 0.0);
        assert!((mags[1] - 0.5).abs() < 1e-12 && (mags[2] - 2.0).abs() < 1e-12);
        assert_eq!(mags[3], f64::INFINITY);
        assert!(set.roots.windows(2).all(|p| p[0].magnitude() >= p[1].magnitude()));
    }

    #[test]
    fn critical_ssh_ties_at_the_selection_boundary() {
        let set = beta_roots(&ssh(1.0, 1.0), Complex::new(0.0, 0.0)).unwrap();
        assert!(matches!(select_dominant(&set), Err(Error::GaplessOrCritical { .. })));
    }

    #[test]
    fn decoupled_sites_form_separate_sectors() {
        let blocks = detect_blocks(&ssh(0.5, 1.0));
        assert_eq!(blocks.len(), 1);
        let zero = ComplexMatrix::<f64>::zeros(2, 2);
        let diag = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let split = LatticeModel::new(zero, diag.clone(), diag).unwrap();
        assert_eq!(detect_blocks(&split), vec![vec![0], vec![1]]);
    }

    #[test]
    fn infinite_roots_report_infinite_magnitude() {
        let r = BetaRoot::<f64> {
            beta: Complex::new(f64::INFINITY, 0.0),
            infinite: true,
            nullvector: vec![Complex::new(1.0, 0.0)],
            sector: 0,
            residual: 0.0,
        };
        assert_eq!(r.magnitude(), f64::INFINITY);
        assert_eq!(r.inv_beta(), Complex::new(0.0, 0.0));
    }
}
