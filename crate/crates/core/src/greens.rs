//! First-cell Green's function `G₁₁(ω)` by direct inversion, Dyson recursion
//! and the thermodynamic-limit root formula, plus the residue `A` of its
//! `1/ω` pole.

use num_complex::Complex;

use crate::beta::{beta_roots, select_dominant, BetaRoot};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, inverse, solve, ComplexMatrix, Lu, Svd};
use crate::model::{real_space_hamiltonian, BoundaryCondition, LatticeModel};
use crate::scalar::{cone, czero, Real};
use crate::spectra::pbc_min_gap;

/// Selected nullvector matrices with condition above this are singular.
pub const SELECTION_COND_MAX: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreensMethod {
    Direct,
    Dyson,
    Thermo,
    TransferPower,
}

#[derive(Debug, Clone)]
pub struct GreensBlock<T> {
    pub omega: Complex<T>,
    pub g11: ComplexMatrix<T>,
    pub method: GreensMethod,
}

/// `ω − h`.
fn resolvent_denominator<T: Real>(model: &LatticeModel<T>, omega: Complex<T>) -> ComplexMatrix<T> {
    model.h.scale(-cone::<T>()).add_diag(omega)
}

/// Top-left block of `(ω − H_open(N))⁻¹` by a dense solve.
pub fn g11_direct<T: Real>(model: &LatticeModel<T>, n: usize, omega: Complex<T>) -> Result<GreensBlock<T>> {
    let m = model.dim();
    let a = if n == 1 {
        resolvent_denominator(model, omega)
    } else {
        real_space_hamiltonian(model, n, BoundaryCondition::Open)?
            .scale(-cone::<T>())
            .add_diag(omega)
    };
    let lu = Lu::new(&a);
    let rhs = ComplexMatrix::from_fn(n * m, m, |i, j| if i == j { cone() } else { czero() });
    let x = lu.solve(&rhs).ok().filter(|x| x.is_finite());
    match x {
        Some(x) => Ok(GreensBlock {
            omega,
            g11: x.block(0, 0, m, m),
            method: GreensMethod::Direct,
        }),
        None => {
            let h = a.scale(-cone::<T>()).add_diag(omega);
            let distance = eigenvalues(&h)
                .map(|ev| ev.iter().map(|e| (*e - omega).norm()).fold(T::infinity(), T::min).as_f64())
                .unwrap_or(0.0);
            Err(Error::OnSpectrum { distance })
        }
    }
}

/// `G₁₁,ₙ = (ω − h − W·G₁₁,ₙ₋₁·V)⁻¹` from `G₁₁,₁ = (ω − h)⁻¹`.
pub fn g11_dyson<T: Real>(model: &LatticeModel<T>, n: usize, omega: Complex<T>) -> Result<GreensBlock<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("Dyson recursion needs N >= 1".into()));
    }
    let base = resolvent_denominator(model, omega);
    let mut g = inverse(&base, "Dyson step 1").map_err(|_| Error::SingularIterate { step: 1 })?;
    for step in 2..=n {
        let denom = &base - &model.w.matmul(&g).matmul(&model.v);
        g = inverse(&denom, "Dyson").map_err(|_| Error::SingularIterate { step })?;
    }
    Ok(GreensBlock {
        omega,
        g11: g,
        method: GreensMethod::Dyson,
    })
}

/// `[[V⁻¹(ω − h), −V⁻¹W], [I, 0]]`, mapping `(ψₙ, ψₙ₊₁)` to `(ψₙ₋₁, ψₙ)`.
pub fn transfer_matrix<T: Real>(model: &LatticeModel<T>, omega: Complex<T>) -> Result<ComplexMatrix<T>> {
    let m = model.dim();
    let condition = Svd::new(&model.v).condition();
    if condition > T::lit(1e12) || !condition.is_finite() {
        return Err(Error::SingularHopping {
            condition: condition.as_f64(),
        });
    }
    let top_left = solve(&model.v, &resolvent_denominator(model, omega), "transfer matrix")?;
    let top_right = solve(&model.v, &model.w, "transfer matrix")?.scale(-cone::<T>());
    let mut t = ComplexMatrix::zeros(2 * m, 2 * m);
    t.set_block(0, 0, &top_left);
    t.set_block(0, m, &top_right);
    t.set_block(m, 0, &ComplexMatrix::identity(m));
    Ok(t)
}

/// `[Tᴺ]₂₁·[Tᴺ]₁₁⁻¹·V⁻¹`. Matrix powers over- or underflow for skin-effect
/// chains, so this is limited to `N ≤ 30` and meant as a test oracle.
pub fn g11_transfer_power<T: Real>(model: &LatticeModel<T>, n: usize, omega: Complex<T>) -> Result<GreensBlock<T>> {
    if n == 0 || n > 30 {
        return Err(Error::InvalidArgument(format!("transfer-matrix power oracle needs 1 <= N <= 30, got {n}")));
    }
    let m = model.dim();
    let t = transfer_matrix(model, omega)?;
    let mut p = t.clone();
    for _ in 1..n {
        p = p.matmul(&t);
    }
    let t21 = p.block(m, 0, m, m);
    let t11 = p.block(0, 0, m, m);
    let g = t21.matmul(&inverse(&t11, "[T^N]_11")?).matmul(&inverse(&model.v, "V")?);
    Ok(GreensBlock {
        omega,
        g11: g,
        method: GreensMethod::TransferPower,
    })
}

/// `X·diag(1/β)·X⁻¹` for the selected roots (`1/β = 0` at infinity).
pub fn surface_propagator<T: Real>(selected: &[BetaRoot<T>]) -> Result<ComplexMatrix<T>> {
    let x = ComplexMatrix::from_columns(&selected.iter().map(|r| r.nullvector.clone()).collect::<Vec<_>>());
    let condition = Svd::new(&x).condition();
    if condition > T::lit(SELECTION_COND_MAX) || !condition.is_finite() {
        return Err(Error::SingularSelection {
            condition: condition.as_f64(),
        });
    }
    let binv = ComplexMatrix::from_diag(&selected.iter().map(|r| r.inv_beta()).collect::<Vec<_>>());
    let xinv = inverse(&x, "selected nullvectors")?;
    Ok(x.matmul(&binv).matmul(&xinv))
}

/// Thermodynamic-limit `G₁₁(ω)` from the dominant roots. With `S = X·B⁻¹·X⁻¹`
/// this is `S·V⁻¹` when `V` is invertible and `(ω − h − W·S)⁻¹` otherwise;
/// the two agree whenever both exist.
pub fn g11_thermo<T: Real>(model: &LatticeModel<T>, omega: Complex<T>) -> Result<GreensBlock<T>> {
    let roots = beta_roots(model, omega)?;
    let selected = select_dominant(&roots)?;
    let s = surface_propagator(&selected)?;
    let cond_v = Svd::new(&model.v).condition();
    let g = if cond_v.is_finite() && cond_v < T::lit(1e8) {
        s.matmul(&inverse(&model.v, "V")?)
    } else {
        let denom = &resolvent_denominator(model, omega) - &model.w.matmul(&s);
        inverse(&denom, "thermodynamic G11")?
    };
    Ok(GreensBlock {
        omega,
        g11: g,
        method: GreensMethod::Thermo,
    })
}

/// Settings of the zero-energy limit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitOptions {
    /// `ω₀ = residue_factor·gap`.
    pub residue_factor: f64,
    /// Direct cross-check points `ω = factor·gap`.
    pub direct_factors: [f64; 2],
    pub gap_floor: f64,
    pub gap_k_points: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            residue_factor: 1e-4,
            direct_factors: [1e-6, 1e-7],
            gap_floor: 1e-3,
            gap_k_points: 256,
        }
    }
}

/// `max(min_k min|eig H(e^{ik})|, floor)`.
pub fn gap_scale<T: Real>(model: &LatticeModel<T>, opts: &LimitOptions) -> T {
    pbc_min_gap(model, opts.gap_k_points).max(T::lit(opts.gap_floor))
}

/// Laurent data `ω·G₁₁(ω) = A + ω·B + O(ω²)`.
#[derive(Debug, Clone)]
pub struct ResidueMatrix<T> {
    pub a: ComplexMatrix<T>,
    /// Regular part `B`, the constant term of `G₁₁` at `ω = 0`.
    pub b: ComplexMatrix<T>,
    pub omega0: T,
    /// Mismatch between the three-point and two-point extrapolations of `A`.
    pub mismatch: T,
}

/// Richardson extrapolation of `ω·G₁₁(ω)` over `ω₀, ω₀/2, ω₀/4` to `ω = 0`.
/// Entries of `A` below `1e-8·max(1, max|Aᵢⱼ|)` are snapped to zero.
pub fn residue_a<T: Real>(model: &LatticeModel<T>, opts: &LimitOptions) -> Result<ResidueMatrix<T>> {
    let w0 = gap_scale(model, opts) * T::lit(opts.residue_factor);
    residue_at(model, w0)
}

pub fn residue_at<T: Real>(model: &LatticeModel<T>, w0: T) -> Result<ResidueMatrix<T>> {
    let ws = [w0, w0 * T::lit(0.5), w0 * T::lit(0.25)];
    let mut f = Vec::with_capacity(3);
    for &w in &ws {
        let g = g11_thermo(model, Complex::new(w, T::zero()))?;
        f.push(g.g11.scale(Complex::new(w, T::zero())));
    }
    let comb = |c: [f64; 3]| -> ComplexMatrix<T> {
        let mut out = f[0].scale(Complex::new(T::lit(c[0]), T::zero()));
        out = &out + &f[1].scale(Complex::new(T::lit(c[1]), T::zero()));
        &out + &f[2].scale(Complex::new(T::lit(c[2]), T::zero()))
    };
    // quadratic through (ω₀, ω₀/2, ω₀/4): value and slope at 0
    let mut a = comb([1.0 / 3.0, -2.0, 8.0 / 3.0]);
    let b = comb([-2.0, 10.0, -8.0]).scale(Complex::new(T::one() / w0, T::zero()));
    let a_lin = comb([0.0, -1.0, 2.0]);
    let scale = a.norm_max().max(T::one());
    let mismatch = a.dist(&a_lin) / scale;
    if !(mismatch <= T::tol(1e-6, 1e6)) {
        return Err(Error::ResidueNotConverged {
            mismatch: mismatch.as_f64(),
        });
    }
    let cut = T::tol(1e-8, 1e4) * a.norm_max().max(T::one());
    let m = a.rows();
    for i in 0..m {
        for j in 0..m {
            if a[(i, j)].norm() <= cut {
                a[(i, j)] = czero();
            }
        }
    }
    Ok(ResidueMatrix {
        a,
        b,
        omega0: w0,
        mismatch,
    })
}
