//! Nearest-neighbour chains `H(β) = h + V·β + W/β`, their symmetry operators,
//! finite real-space Hamiltonians and the built-in model zoo.

pub mod file;
pub mod zoo;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{pfaffian, takagi_factor, ComplexMatrix, Svd};
use crate::scalar::{ci, Real};

/// One unit cell of a chain. `h` is the onsite block, `v` the block on the
/// subdiagonal of the open-chain Hamiltonian (cell n → n+1) and `w` the block
/// on the superdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel<T> {
    pub h: ComplexMatrix<T>,
    pub v: ComplexMatrix<T>,
    pub w: ComplexMatrix<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Open,
    Periodic,
}

impl<T: Real> LatticeModel<T> {
    pub fn new(h: ComplexMatrix<T>, v: ComplexMatrix<T>, w: ComplexMatrix<T>) -> Result<Self> {
        let m = h.rows();
        for (name, b) in [("h", &h), ("V", &v), ("W", &w)] {
            if b.rows() != m || b.cols() != m || m == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "block {name} is {}x{}, expected {m}x{m}",
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(Error::NonFinite(format!("block {name}")));
            }
        }
        Ok(Self { h, v, w })
    }

    /// Internal degrees of freedom per cell.
    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// `h + V·β + W·β⁻¹`.
    pub fn h_beta(&self, beta: Complex<T>) -> Result<ComplexMatrix<T>> {
        if beta.norm() == T::zero() {
            return Err(Error::InvalidArgument("H(beta) is undefined at beta = 0".into()));
        }
        let inv = beta.inv();
        let m = self.dim();
        Ok(ComplexMatrix::from_fn(m, m, |i, j| {
            self.h[(i, j)] + self.v[(i, j)] * beta + self.w[(i, j)] * inv
        }))
    }

    /// Bloch matrix at crystal momentum `k`, i.e. `H(e^{ik})`.
    pub fn bloch(&self, k: T) -> ComplexMatrix<T> {
        self.h_beta(Complex::from_polar(T::one(), k)).expect("unit-modulus beta")
    }

    /// `P†·X·P` applied to every block.
    pub fn transformed(&self, p: &ComplexMatrix<T>) -> Self {
        let pd = p.adjoint();
        Self {
            h: pd.matmul(&self.h).matmul(p),
            v: pd.matmul(&self.v).matmul(p),
            w: pd.matmul(&self.w).matmul(p),
        }
    }

    /// Restriction to an index subset (a decoupled sector).
    pub fn restricted(&self, idx: &[usize]) -> Self {
        Self {
            h: self.h.select(idx, idx),
            v: self.v.select(idx, idx),
            w: self.w.select(idx, idx),
        }
    }

    /// Direct sum of two models, used for doubled-copy constructions.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let m = self.dim();
        let n = other.dim();
        let ds = |a: &ComplexMatrix<T>, b: &ComplexMatrix<T>| {
            let mut out = ComplexMatrix::zeros(m + n, m + n);
            out.set_block(0, 0, a);
            out.set_block(m, m, b);
            out
        };
        Self {
            h: ds(&self.h, &other.h),
            v: ds(&self.v, &other.v),
            w: ds(&self.w, &other.w),
        }
    }

    /// Structural Hermiticity `h = h†`, `W = V†`; returns the largest defect.
    pub fn hermiticity_defect(&self) -> T {
        self.h.dist(&self.h.adjoint()).max(self.w.dist(&self.v.adjoint()))
    }

    pub fn norm(&self) -> T {
        self.h.norm_fro().max(self.v.norm_fro()).max(self.w.norm_fro())
    }
}

/// Finite chain of `n` cells: `h` on the diagonal, `V` below, `W` above, and
/// corner blocks `V` at (1, N) and `W` at (N, 1) for periodic boundaries.
pub fn real_space_hamiltonian<T: Real>(
    model: &LatticeModel<T>,
    n: usize,
    bc: BoundaryCondition,
) -> Result<ComplexMatrix<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("chain needs N >= 2 cells, got {n}")));
    }
    let m = model.dim();
    let mut out = ComplexMatrix::zeros(n * m, n * m);
    for c in 0..n {
        out.set_block(c * m, c * m, &model.h);
        if c + 1 < n {
            out.set_block((c + 1) * m, c * m, &model.v);
            out.set_block(c * m, (c + 1) * m, &model.w);
        }
    }
    if bc == BoundaryCondition::Periodic {
        let last = (n - 1) * m;
        let add = |out: &mut ComplexMatrix<T>, r0: usize, c0: usize, b: &ComplexMatrix<T>| {
            for i in 0..m {
                for j in 0..m {
                    out[(r0 + i, c0 + j)] = out[(r0 + i, c0 + j)] + b[(i, j)];
                }
            }
        };
        add(&mut out, 0, last, &model.v);
        add(&mut out, last, 0, &model.w);
    }
    Ok(out)
}

/// Sublattice operator `Γ` and, optionally, the TRS† operator `U_T` with its
/// derived `U_C = U_T·Γ*` and Takagi factor `V_C` (`U_C = V_C·V_Cᵀ`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySet<T> {
    pub gamma: ComplexMatrix<T>,
    pub u_t: Option<ComplexMatrix<T>>,
    pub u_c: Option<ComplexMatrix<T>>,
    pub v_c: Option<ComplexMatrix<T>>,
}

fn z2_sign(m: usize) -> i32 {
    let h = (m / 2) as i64;
    if (h * (h - 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(−1)^{(M/2)(M/2−1)/2}`.
pub fn z2_prefactor<T: Real>(m: usize) -> T {
    T::lit(z2_sign(m) as f64)
}

impl<T: Real> SymmetrySet<T> {
    /// Sublattice symmetry only. `Γ` must be unitary with `Γ² = I` and an
    /// equal number of `+1` and `−1` eigenvalues.
    pub fn sublattice(gamma: ComplexMatrix<T>) -> Result<Self> {
        check_gamma(&gamma)?;
        Ok(Self {
            gamma,
            u_t: None,
            u_c: None,
            v_c: None,
        })
    }

    /// Sublattice plus TRS†. Builds `U_C` and a gauge-fixed `V_C`: the sign of
    /// the last column of `V_C` is chosen so that the zero-coupling reference
    /// (`r = I`) has `Q = +1`.
    pub fn with_trs_dagger(gamma: ComplexMatrix<T>, u_t: ComplexMatrix<T>) -> Result<Self> {
        check_gamma(&gamma)?;
        let m = gamma.rows();
        if u_t.rows() != m || u_t.cols() != m {
            return Err(Error::DimensionMismatch("U_T does not match Gamma".into()));
        }
        let id = ComplexMatrix::identity(m);
        let tol = T::tol(1e-10, 256.0);
        if u_t.matmul(&u_t.adjoint()).dist(&id) > tol {
            return Err(Error::SymmetryViolation("U_T is not unitary".into()));
        }
        if (&u_t.matmul(&u_t.conj()) + &id).norm_fro() > tol {
            return Err(Error::SymmetryViolation("U_T U_T* != -I".into()));
        }
        let u_c = u_t.matmul(&gamma.conj());
        if u_c.matmul(&u_c.conj()).dist(&id) > tol {
            return Err(Error::SymmetryViolation("U_C U_C* != +I".into()));
        }
        let mut v_c = takagi_factor(&u_c)?;
        let q_ref = reference_q(&gamma, &v_c)?;
        if q_ref.re < T::zero() {
            for i in 0..m {
                v_c[(i, m - 1)] = -v_c[(i, m - 1)];
            }
        }
        Ok(Self {
            gamma,
            u_t: Some(u_t),
            u_c: Some(u_c),
            v_c: Some(v_c),
        })
    }

    pub fn has_trs_dagger(&self) -> bool {
        self.u_t.is_some()
    }

    pub fn dim(&self) -> usize {
        self.gamma.rows()
    }

    /// Unitary `P` with `P†·Γ·P = diag(I, −I)`. A signed-permutation `Γ` gets an
    /// exact permutation so structural zeros of the blocks survive.
    pub fn chiral_basis(&self) -> Result<ComplexMatrix<T>> {
        chiral_basis(&self.gamma)
    }

    /// Operators in the basis `P` (`Γ → P†ΓP`, `U_T → P†U_T P*`, `V_C → P†V_C`).
    pub fn transformed(&self, p: &ComplexMatrix<T>) -> Self {
        let pd = p.adjoint();
        let pc = p.conj();
        Self {
            gamma: pd.matmul(&self.gamma).matmul(p),
            u_t: self.u_t.as_ref().map(|u| pd.matmul(u).matmul(&pc)),
            u_c: self.u_c.as_ref().map(|u| pd.matmul(u).matmul(&pc)),
            v_c: self.v_c.as_ref().map(|v| pd.matmul(v)),
        }
    }

    /// Chirality projectors `Π₊ = (I + Γ)/2`, `Π₋ = (I − Γ)/2`.
    pub fn projectors(&self) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
        let m = self.dim();
        let id = ComplexMatrix::identity(m);
        let half = Complex::new(T::lit(0.5), T::zero());
        ((&id + &self.gamma).scale(half), (&id - &self.gamma).scale(half))
    }
}

/// `(−1)^{(M/2)(M/2−1)/2}·Pf(i·V_C†·Γ·V_C)`, the invariant of the reference
/// with `r = I`.
pub fn reference_q<T: Real>(gamma: &ComplexMatrix<T>, v_c: &ComplexMatrix<T>) -> Result<Complex<T>> {
    let m = gamma.rows();
    let x = v_c.adjoint().matmul(gamma).matmul(v_c).scale(ci());
    Ok(pfaffian(&x)? * z2_prefactor::<T>(m))
}

fn check_gamma<T: Real>(gamma: &ComplexMatrix<T>) -> Result<()> {
    if !gamma.is_square() {
        return Err(Error::DimensionMismatch("Gamma must be square".into()));
    }
    let m = gamma.rows();
    let id = ComplexMatrix::identity(m);
    let tol = T::tol(1e-10, 256.0);
    if gamma.matmul(gamma).dist(&id) > tol || gamma.matmul(&gamma.adjoint()).dist(&id) > tol {
        return Err(Error::SymmetryViolation("Gamma must be unitary with Gamma^2 = I".into()));
    }
    let tr = gamma.trace();
    if tr.norm() > tol || m % 2 == 1 {
        return Err(Error::SymmetryViolation(format!(
            "Gamma must have equal numbers of +1 and -1 eigenvalues (trace {})",
            tr.re
        )));
    }
    Ok(())
}

fn chiral_basis<T: Real>(gamma: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let m = gamma.rows();
    let one = T::one();
    let diag_pm = (0..m).all(|i| {
        (0..m).all(|j| {
            let z = gamma[(i, j)];
            if i == j {
                z.im == T::zero() && (z.re == one || z.re == -one)
            } else {
                z.re == T::zero() && z.im == T::zero()
            }
        })
    });
    let mut p = ComplexMatrix::zeros(m, m);
    if diag_pm {
        let order: Vec<usize> = (0..m)
            .filter(|&i| gamma[(i, i)].re > T::zero())
            .chain((0..m).filter(|&i| gamma[(i, i)].re < T::zero()))
            .collect();
        for (col, &row) in order.iter().enumerate() {
            p[(row, col)] = Complex::new(one, T::zero());
        }
        return Ok(p);
    }
    let (pp, pm) = {
        let id = ComplexMatrix::identity(m);
        let half = Complex::new(T::lit(0.5), T::zero());
        ((&id + gamma).scale(half), (&id - gamma).scale(half))
    };
    let mut col = 0;
    for proj in [pp, pm] {
        let svd = Svd::new(&proj);
        for k in 0..m {
            if svd.s[k] > T::lit(0.5) {
                for i in 0..m {
                    p[(i, col)] = svd.u[(i, k)];
                }
                col += 1;
            }
        }
    }
    if col != m {
        return Err(Error::SymmetryViolation("Gamma eigenbasis is incomplete".into()));
    }
    Ok(p)
}

/// Result of [`check_symmetries`]. Defects are maximal relative deviations over
/// the β sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub sublattice: bool,
    pub sublattice_defect: f64,
    pub trs_dagger: Option<bool>,
    pub trs_dagger_defect: Option<f64>,
    pub hermitian: bool,
    pub hermitian_defect: f64,
}

/// Twenty deterministic sample points, half on the unit circle and half off it.
pub fn symmetry_sample_betas<T: Real>() -> Vec<Complex<T>> {
    (0..20)
        .map(|k| {
            let theta = 0.3 + 0.61 * k as f64;
            let r = if k % 2 == 0 { 1.0 } else { 0.4 + 0.17 * k as f64 };
            Complex::from_polar(T::lit(r), T::lit(theta))
        })
        .collect()
}

/// Checks `Γ·H(β)·Γ⁻¹ = −H(β)`, `U_T·H(β)ᵀ·U_T⁻¹ = H(1/β)` when `U_T` is
/// present, and structural Hermiticity, each to `1e-10` relative.
pub fn check_symmetries<T: Real>(model: &LatticeModel<T>, syms: &SymmetrySet<T>) -> Result<SymmetryReport> {
    let m = model.dim();
    if syms.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "model has M = {m} but symmetry operators are {}x{}",
            syms.dim(),
            syms.dim()
        )));
    }
    let tol = T::tol(1e-10, 1024.0);
    let gamma_inv = syms.gamma.adjoint();
    let ut_inv = syms.u_t.as_ref().map(|u| u.adjoint());
    let mut sub = T::zero();
    let mut trs = T::zero();
    for beta in symmetry_sample_betas::<T>() {
        let hb = model.h_beta(beta)?;
        let scale = hb.norm_fro().max(T::one());
        let g = syms.gamma.matmul(&hb).matmul(&gamma_inv);
        sub = sub.max((&g + &hb).norm_fro() / scale);
        if let (Some(ut), Some(uti)) = (&syms.u_t, &ut_inv) {
            let lhs = ut.matmul(&hb.transpose()).matmul(uti);
            let rhs = model.h_beta(beta.inv())?;
            trs = trs.max(lhs.dist(&rhs) / scale.max(rhs.norm_fro()));
        }
    }
    let herm = model.hermiticity_defect() / model.norm().max(T::min_positive_value());
    Ok(SymmetryReport {
        sublattice: sub <= tol,
        sublattice_defect: sub.as_f64(),
        trs_dagger: syms.u_t.as_ref().map(|_| trs <= tol),
        trs_dagger_defect: syms.u_t.as_ref().map(|_| trs.as_f64()),
        hermitian: herm <= tol,
        hermitian_defect: herm.as_f64(),
    })
}

/// A model brought to the chiral basis `Γ = diag(I, −I)` together with its
/// symmetry operators and the basis change used.
#[derive(Debug, Clone)]
pub struct ChiralModel<T> {
    pub model: LatticeModel<T>,
    pub syms: SymmetrySet<T>,
    pub basis: ComplexMatrix<T>,
}

/// Moves `model` and `syms` to the chiral basis after verifying the declared
/// symmetries.
pub fn to_chiral_basis<T: Real>(model: &LatticeModel<T>, syms: &SymmetrySet<T>) -> Result<ChiralModel<T>> {
    let report = check_symmetries(model, syms)?;
    if !report.sublattice {
        return Err(Error::SymmetryViolation(format!(
            "sublattice check fails (defect {:.3e})",
            report.sublattice_defect
        )));
    }
    if report.trs_dagger == Some(false) {
        return Err(Error::SymmetryViolation(format!(
            "TRS-dagger check fails (defect {:.3e})",
            report.trs_dagger_defect.unwrap_or(f64::NAN)
        )));
    }
    let p = syms.chiral_basis()?;
    Ok(ChiralModel {
        model: model.transformed(&p),
        syms: syms.transformed(&p),
        basis: p,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> ComplexMatrix<f64> {
        ComplexMatrix::from_real_rows(rows)
    }

    fn sz() -> ComplexMatrix<f64> {
        real(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    #[test]
    fn block_shapes_are_checked() {
        let id2 = ComplexMatrix::<f64>::identity(2);
        let err = LatticeModel::new(id2.clone(), ComplexMatrix::identity(3), id2.clone());
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
        let mut nan = id2.clone();
        nan[(0, 1)] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(LatticeModel::new(id2.clone(), id2.clone(), nan), Err(Error::NonFinite(_))));
        let empty = ComplexMatrix::<f64>::zeros(0, 0);
        assert!(LatticeModel::new(empty.clone(), empty.clone(), empty).is_err());
    }

    #[test]
    fn h_beta_rejects_zero() {
        let id2 = ComplexMatrix::<f64>::identity(2);
        let m = LatticeModel::new(id2.clone(), id2.clone(), id2).unwrap();
        assert!(matches!(m.h_beta(Complex::new(0.0, 0.0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn chain_layout_puts_v_below_the_diagonal() {
        let h = ComplexMatrix::<f64>::zeros(1, 1);
        let v = real(&[&[2.0]]);
        let w = real(&[&[3.0]]);
        let m = LatticeModel::new(h, v, w).unwrap();
        let open = real_space_hamiltonian(&m, 3, BoundaryCondition::Open).unwrap();
        assert_eq!(open[(1, 0)].re, 2.0);
        assert_eq!(open[(0, 1)].re, 3.0);
        assert_eq!(open[(2, 0)].re, 0.0);
        let ring = real_space_hamiltonian(&m, 3, BoundaryCondition::Periodic).unwrap();
        assert_eq!(ring[(0, 2)].re, 2.0);
        assert_eq!(ring[(2, 0)].re, 3.0);
        assert!(real_space_hamiltonian(&m, 1, BoundaryCondition::Open).is_err());
    }

    #[test]
    fn z2_prefactor_cycles_with_period_eight() {
        let signs: Vec<f64> = (1..=8).map(|k| z2_prefactor::<f64>(2 * k)).collect();
        assert_eq!(signs, [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn gamma_must_be_balanced_and_involutive() {
        assert!(SymmetrySet::sublattice(sz()).is_ok());
        let unbalanced = ComplexMatrix::<f64>::identity(2);
        assert!(matches!(SymmetrySet::sublattice(unbalanced), Err(Error::SymmetryViolation(_))));
        let not_involution = real(&[&[2.0, 0.0], &[0.0, -0.5]]);
        assert!(matches!(SymmetrySet::sublattice(not_involution), Err(Error::SymmetryViolation(_))));
    }

    #[test]
    fn trs_dagger_operator_must_square_to_minus_one() {
        let id2 = ComplexMatrix::<f64>::identity(2);
        assert!(matches!(
            SymmetrySet::with_trs_dagger(sz(), id2),
            Err(Error::SymmetryViolation(_))
        ));
        let wrong_size = ComplexMatrix::<f64>::identity(4);
        assert!(matches!(
            SymmetrySet::with_trs_dagger(sz(), wrong_size),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
