//! Reflection matrix `r(ω)` of a semi-infinite chain coupled to one lead at
//! its first cell, and the ℤ and ℤ₂ invariants of `Γ·r(0)`.
//!
//! Sign convention: the ℤ invariant is `−Tr(Γ·r(0))/2`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::greens::{g11_thermo, gap_scale, residue_a, GreensBlock, LimitOptions, ResidueMatrix};
use crate::linalg::{det, eigenvalues, inverse, pfaffian, rank_tol, ComplexMatrix, Svd, RANK_REL_TOL};
use crate::model::{z2_prefactor, SymmetrySet};
use crate::model::zoo::SymmetricModel;
use crate::scalar::{ci, cone, Real};

/// Largest distance of a `Γ·r(0)` eigenvalue from `±1` that still counts as quantized.
pub const QUANTIZATION_TOL: f64 = 1e-4;
/// Required agreement of the two small-ω direct evaluations.
pub const DIRECT_AGREEMENT_TOL: f64 = 1e-5;
/// Antisymmetry and determinant tolerance of the ℤ₂ route.
pub const Z2_STRUCTURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ReflectionMatrix<T> {
    pub omega: Complex<T>,
    pub r: ComplexMatrix<T>,
    /// Lead coupling `V_LS`.
    pub coupling: ComplexMatrix<T>,
}

/// `r = (I + K)(I − K)⁻¹` with `K = i·V_LS·G₁₁·V_LS†`.
pub fn reflection_matrix<T: Real>(g11: &GreensBlock<T>, v_ls: &ComplexMatrix<T>) -> Result<ReflectionMatrix<T>> {
    let m = g11.g11.rows();
    if v_ls.rows() != m || v_ls.cols() != m {
        return Err(Error::DimensionMismatch("coupling does not match G11".into()));
    }
    let k = v_ls.matmul(&g11.g11).matmul(&v_ls.adjoint()).scale(ci());
    let id = ComplexMatrix::<T>::identity(m);
    let inv = inverse(&(&id - &k), "I - K").map_err(|_| Error::PerfectTransmission)?;
    Ok(ReflectionMatrix {
        omega: g11.omega,
        r: (&id + &k).matmul(&inv),
        coupling: v_ls.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct InvariantOptions<T> {
    pub limit: LimitOptions,
    /// Lead coupling; `None` means `V_LS = I`.
    pub coupling: Option<ComplexMatrix<T>>,
    /// Skip the small-ω direct cross-check.
    pub skip_direct_check: bool,
}

impl<T> Default for InvariantOptions<T> {
    fn default() -> Self {
        Self {
            limit: LimitOptions::default(),
            coupling: None,
            skip_direct_check: false,
        }
    }
}

impl<T: Real> InvariantOptions<T> {
    pub fn with_coupling_scale(s: f64) -> Self {
        Self {
            coupling: Some(ComplexMatrix::identity(1).scale(Complex::new(T::lit(s), T::zero()))),
            ..Self::default()
        }
    }

    fn coupling_for(&self, m: usize) -> ComplexMatrix<T> {
        match &self.coupling {
            // a 1×1 coupling is read as a multiple of the identity
            Some(c) if c.rows() == 1 && m != 1 => ComplexMatrix::identity(m).scale(c[(0, 0)]),
            Some(c) => c.clone(),
            None => ComplexMatrix::identity(m),
        }
    }
}

/// `Γ·r(0)` together with the data it was built from.
#[derive(Debug, Clone)]
pub struct ZeroEnergyLimit<T> {
    pub residue: ResidueMatrix<T>,
    /// `r(0)` for the requested coupling.
    pub r0: ComplexMatrix<T>,
    pub gamma_r: ComplexMatrix<T>,
    pub eigenvalues: Vec<Complex<T>>,
    pub quantization_error: T,
    /// Largest entry difference between direct `Γ·r(ω)` and `Γ·r(0)` at the
    /// first and second direct ω. The second is infinite when the first already
    /// agreed and was not evaluated.
    pub direct_error: Option<(T, T)>,
}

/// Exact `ω → 0` limit of `r` for `G₁₁ = A/ω + B + O(ω)`.
///
/// With `T = [range(A), ker(A)]` and `X = T⁻¹(I − iB)T`,
/// `(I − iG)⁻¹ → T·diag(0, X₂₂⁻¹)·T⁻¹` and `r(0) = 2·(I − iG)⁻¹ − I`.
pub fn reflection_limit<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let m = a.rows();
    let id = ComplexMatrix::<T>::identity(m);
    let svd = Svd::new(a);
    let rank = if a.norm_max() == T::zero() { 0 } else { svd.rank(T::lit(RANK_REL_TOL)) };
    let mut cols: Vec<Vec<Complex<T>>> = (0..rank).map(|j| svd.u.column(j)).collect();
    cols.extend(svd.null_vectors(m - rank));
    let t = ComplexMatrix::from_columns(&cols);
    let cond = Svd::new(&t).condition();
    if !(cond < T::lit(1e10)) {
        // range and kernel of A overlap: A has a nilpotent part at 0
        return Err(Error::IllPosed);
    }
    let tinv = inverse(&t, "range/kernel basis of A")?;
    let x = tinv.matmul(&(&id - &b.scale(ci()))).matmul(&t);
    let k = m - rank;
    let mut core = ComplexMatrix::zeros(m, m);
    if k > 0 {
        let x22 = x.block(rank, rank, k, k);
        let x22inv = inverse(&x22, "regular block").map_err(|_| Error::PerfectTransmission)?;
        core.set_block(rank, rank, &x22inv);
    }
    let lim = t.matmul(&core).matmul(&tinv);
    Ok(&lim.scale(Complex::new(T::lit(2.0), T::zero())) - &id)
}

fn quantization_error<T: Real>(ev: &[Complex<T>]) -> T {
    ev.iter()
        .map(|z| (*z - cone::<T>()).norm().min((*z + cone::<T>()).norm()))
        .fold(T::zero(), T::max)
}

/// `Γ·r(0)` from the residue route, cross-checked against `r(ω)` at two small ω.
pub fn zero_energy_limit<T: Real>(
    model: &SymmetricModel<T>,
    opts: &InvariantOptions<T>,
) -> Result<ZeroEnergyLimit<T>> {
    let m = model.model.dim();
    let v = opts.coupling_for(m);
    let residue = residue_a(&model.model, &opts.limit)?;
    let vd = v.adjoint();
    let a_eff = v.matmul(&residue.a).matmul(&vd);
    let b_eff = v.matmul(&residue.b).matmul(&vd);
    let r0 = reflection_limit(&a_eff, &b_eff)?;
    let gamma = &model.syms.gamma;
    let gamma_r = gamma.matmul(&r0);
    let ev = eigenvalues(&gamma_r)?;
    let qerr = quantization_error(&ev);

    let direct_error = if opts.skip_direct_check {
        None
    } else {
        let gap = gap_scale(&model.model, &opts.limit);
        let tol = T::tol(DIRECT_AGREEMENT_TOL, 1e8);
        let mut errs = [T::infinity(); 2];
        for (k, f) in opts.limit.direct_factors.into_iter().enumerate() {
            let w = Complex::new(gap * T::lit(f), T::zero());
            let g = g11_thermo(&model.model, w)?;
            errs[k] = gamma.matmul(&reflection_matrix(&g, &v)?.r).dist_max(&gamma_r);
            if errs[k] <= tol {
                break;
            }
        }
        if !(errs[0] <= tol || errs[1] <= tol) {
            return Err(Error::RouteMismatch(format!(
                "direct r(omega) disagrees with the residue limit: {:.3e} and {:.3e}",
                errs[0].as_f64(),
                errs[1].as_f64()
            )));
        }
        Some((errs[0], errs[1]))
    };

    Ok(ZeroEnergyLimit {
        residue,
        r0,
        gamma_r,
        eigenvalues: ev,
        quantization_error: qerr,
        direct_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantKind {
    Z,
    Z2,
}

#[derive(Debug, Clone)]
pub struct InvariantReport<T> {
    pub kind: InvariantKind,
    /// `−Tr(Γr(0))/2` for ℤ, `Q = ±1` for ℤ₂.
    pub value: i64,
    pub gamma_r_eigenvalues: Vec<Complex<T>>,
    pub quantization_error: T,
    pub rank_plus: usize,
    pub rank_minus: usize,
    pub kramers_pairs: Option<usize>,
    /// Unrounded `−Tr(Γr)/2` (ℤ) or `Q` (ℤ₂).
    pub raw: Complex<T>,
}

/// `(rank(A·Π₊), rank(A·Π₋))`.
pub fn residue_ranks<T: Real>(a: &ComplexMatrix<T>, syms: &SymmetrySet<T>) -> (usize, usize) {
    let (pp, pm) = syms.projectors();
    let rel = T::lit(RANK_REL_TOL);
    (rank_tol(&a.matmul(&pp), rel), rank_tol(&a.matmul(&pm), rel))
}

/// Chirality-resolved ranks of the zero-mode residue `A`.
pub fn bbc_rank_check<T: Real>(model: &SymmetricModel<T>, limit: &LimitOptions) -> Result<(usize, usize)> {
    let res = residue_a(&model.model, limit)?;
    Ok(residue_ranks(&res.a, &model.syms))
}

/// Number of Kramers pairs of nonzero eigenvalues of `A`: `rank(A·Π₊)` after
/// checking it equals `rank(A·Π₋)`.
pub fn kramers_pairs_count<T: Real>(a: &ResidueMatrix<T>, syms: &SymmetrySet<T>) -> Result<usize> {
    let (p, q) = residue_ranks(&a.a, syms);
    if p != q {
        return Err(Error::SymmetryViolation(format!(
            "zero modes are not Kramers paired: rank(A Pi+) = {p}, rank(A Pi-) = {q}"
        )));
    }
    Ok(p)
}

/// ℤ invariant `−Tr(Γ·r(0))/2`.
pub fn invariant_z<T: Real>(model: &SymmetricModel<T>, opts: &InvariantOptions<T>) -> Result<InvariantReport<T>> {
    let lim = zero_energy_limit(model, opts)?;
    report_z(model, &lim)
}

pub fn report_z<T: Real>(model: &SymmetricModel<T>, lim: &ZeroEnergyLimit<T>) -> Result<InvariantReport<T>> {
    if !(lim.quantization_error <= T::tol(QUANTIZATION_TOL, 1e8)) {
        return Err(Error::NotQuantized {
            error: lim.quantization_error.as_f64(),
        });
    }
    let raw = -lim.gamma_r.trace() * T::lit(0.5);
    let value = raw.re.round().to_i64().unwrap_or(0);
    let (rank_plus, rank_minus) = residue_ranks(&lim.residue.a, &model.syms);
    Ok(InvariantReport {
        kind: InvariantKind::Z,
        value,
        gamma_r_eigenvalues: lim.eigenvalues.clone(),
        quantization_error: lim.quantization_error,
        rank_plus,
        rank_minus,
        kramers_pairs: None,
        raw,
    })
}

/// ℤ₂ invariant `Q = (−1)^{(M/2)(M/2−1)/2}·Pf(i·V_C†·Γ·r(0)·V_C)`, checked
/// against `(−1)^p` with `p` the Kramers-pair count of `A`.
pub fn invariant_z2<T: Real>(model: &SymmetricModel<T>, opts: &InvariantOptions<T>) -> Result<InvariantReport<T>> {
    let lim = zero_energy_limit(model, opts)?;
    report_z2(model, &lim)
}

pub fn report_z2<T: Real>(model: &SymmetricModel<T>, lim: &ZeroEnergyLimit<T>) -> Result<InvariantReport<T>> {
    let syms = &model.syms;
    let v_c = syms
        .v_c
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("model has no TRS-dagger symmetry".into()))?;
    let m = syms.dim();
    let x = v_c.adjoint().matmul(&lim.gamma_r).matmul(v_c).scale(ci());
    let tol = T::tol(Z2_STRUCTURE_TOL, 1e7);
    let asym = (&x + &x.transpose()).norm_max() / x.norm_max().max(T::one());
    if !(asym <= tol) {
        return Err(Error::SymmetryViolation(format!(
            "V_C' Gamma r V_C is not antisymmetric (defect {:.3e})",
            asym.as_f64()
        )));
    }
    let d = det(&lim.gamma_r);
    if !((d - cone::<T>()).norm() <= tol) {
        return Err(Error::SymmetryViolation(format!(
            "det(Gamma r) = {:.6}{:+.6}i, expected 1",
            d.re.as_f64(),
            d.im.as_f64()
        )));
    }
    let q = pfaffian(&x)? * z2_prefactor::<T>(m);
    let sign = if q.re >= T::zero() { cone::<T>() } else { -cone::<T>() };
    let err = (q - sign).norm().max(lim.quantization_error);
    if !(err <= T::tol(QUANTIZATION_TOL, 1e8)) {
        return Err(Error::NotQuantized { error: err.as_f64() });
    }
    let value = if sign.re > T::zero() { 1 } else { -1 };
    let (rank_plus, rank_minus) = residue_ranks(&lim.residue.a, syms);
    let p = kramers_pairs_count(&lim.residue, syms)?;
    let expected = if p % 2 == 0 { 1 } else { -1 };
    if value != expected {
        return Err(Error::RouteMismatch(format!(
            "Pfaffian gives Q = {value} but A has {p} Kramers pairs"
        )));
    }
    Ok(InvariantReport {
        kind: InvariantKind::Z2,
        value,
        gamma_r_eigenvalues: lim.eigenvalues.clone(),
        quantization_error: err,
        rank_plus,
        rank_minus,
        kramers_pairs: Some(p),
        raw: q,
    })
}
