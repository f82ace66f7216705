//! Built-in models. All builders use the chiral ordering `Γ = diag(+, −)`.

use std::collections::BTreeMap;

use num_complex::Complex;

use super::{LatticeModel, SymmetrySet};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{cx, czero, Real};

/// A model with its declared symmetry operators.
#[derive(Debug, Clone)]
pub struct SymmetricModel<T> {
    pub model: LatticeModel<T>,
    pub syms: SymmetrySet<T>,
}

/// Hopping amplitudes of the sub-GBZ model.
pub const SUBGBZ_T1: f64 = 2.0;
/// `t₂ = 2i`.
pub const SUBGBZ_T2_IM: f64 = 2.0;
pub const SUBGBZ_T_PLUS: f64 = 7.0;
pub const SUBGBZ_T_MINUS: f64 = 3.0;

/// Default critical-model parameter set: `a± = b± = 1`.
pub const CRITICAL_PREFACTOR: f64 = 1.0;
pub const CRITICAL_ZEROS_PLUS_A: [f64; 2] = [20.0, 10.0];
pub const CRITICAL_ZEROS_MINUS_A: [f64; 2] = [6.0, 5.0];
pub const CRITICAL_ZEROS_PLUS_B: [f64; 2] = [2.0, 1.0];
pub const CRITICAL_ZEROS_MINUS_B: [f64; 2] = [0.2, 0.1];

/// Default TRS† chain: `t = u = 1`, `γ = 6/5`.
pub const TRS_T: f64 = 1.0;
pub const TRS_U: f64 = 1.0;
pub const TRS_GAMMA: f64 = 1.2;

/// `Δ_c = (√(2(√2581 − 9)) − 10)/10`, the upper open-chain transition of the
/// TRS† chain at `t = u = 1`, `γ = 6/5`.
pub fn trs_delta_c() -> f64 {
    ((2.0 * (2581f64.sqrt() - 9.0)).sqrt() - 10.0) / 10.0
}

fn chiral_gamma<T: Real>(m: usize) -> ComplexMatrix<T> {
    let d: Vec<Complex<T>> = (0..m)
        .map(|i| if i < m / 2 { cx(1.0, 0.0) } else { cx(-1.0, 0.0) })
        .collect();
    ComplexMatrix::from_diag(&d)
}

/// Coefficients `(c₋₁, c₀, c₁)` of `a·(β − z₁)(β − z₂)/β = c₁β + c₀ + c₋₁/β`.
fn quadratic_over_beta<T: Real>(a: Complex<T>, z: [Complex<T>; 2]) -> (Complex<T>, Complex<T>, Complex<T>) {
    (a * z[0] * z[1], -(a * (z[0] + z[1])), a)
}

/// Two-band chain `H = [[0, H₋], [H₊, 0]]` with
/// `H±(β) = a±·(β − z±,₁)(β − z±,₂)/β`.
pub fn build_two_band<T: Real>(
    a_plus: Complex<T>,
    a_minus: Complex<T>,
    zeros_plus: [Complex<T>; 2],
    zeros_minus: [Complex<T>; 2],
) -> Result<SymmetricModel<T>> {
    if a_plus.norm() == T::zero() || a_minus.norm() == T::zero() {
        return Err(Error::InvalidArgument("two-band prefactors must be nonzero".into()));
    }
    if zeros_plus.iter().chain(&zeros_minus).any(|z| z.norm() == T::zero()) {
        return Err(Error::InvalidArgument("two-band zeros must be nonzero".into()));
    }
    let (wp, hp, vp) = quadratic_over_beta(a_plus, zeros_plus);
    let (wm, hm, vm) = quadratic_over_beta(a_minus, zeros_minus);
    let z = czero();
    let blk = |plus: Complex<T>, minus: Complex<T>| ComplexMatrix::from_rows(&[vec![z, minus], vec![plus, z]]);
    Ok(SymmetricModel {
        model: LatticeModel::new(blk(hp, hm), blk(vp, vm), blk(wp, wm))?,
        syms: SymmetrySet::sublattice(chiral_gamma(2))?,
    })
}

/// Hermitian SSH chain with intra-cell hopping `v` and inter-cell hopping `w`.
pub fn build_ssh<T: Real>(v: T, w: T) -> Result<SymmetricModel<T>> {
    let z = czero();
    let r = |x: T| Complex::new(x, T::zero());
    let h = ComplexMatrix::from_rows(&[vec![z, r(v)], vec![r(v), z]]);
    let vv = ComplexMatrix::from_rows(&[vec![z, z], vec![r(w), z]]);
    let ww = vv.adjoint();
    Ok(SymmetricModel {
        model: LatticeModel::new(h, vv, ww)?,
        syms: SymmetrySet::sublattice(chiral_gamma(2))?,
    })
}

/// Four-band chain with two sub-GBZs: `H = [[0, R₊], [R₋, 0]]`,
/// `R±(β) = λ + ½(t± + t₁β^{±1})σ± + ½t₂β^{±1}σ∓`.
pub fn build_four_band_subgbz<T: Real>(lambda: Complex<T>) -> Result<SymmetricModel<T>> {
    let t1 = cx::<T>(SUBGBZ_T1, 0.0);
    let t2 = cx::<T>(0.0, SUBGBZ_T2_IM);
    let tp = cx::<T>(SUBGBZ_T_PLUS, 0.0);
    let tm = cx::<T>(SUBGBZ_T_MINUS, 0.0);
    // R₊ = [[λ, t₊ + t₁β], [t₂β, λ]],  R₋ = [[λ, t₂/β], [t₋ + t₁/β, λ]]
    let mut h = ComplexMatrix::zeros(4, 4);
    let mut v = ComplexMatrix::zeros(4, 4);
    let mut w = ComplexMatrix::zeros(4, 4);
    for k in 0..2 {
        h[(k, 2 + k)] = lambda;
        h[(2 + k, k)] = lambda;
    }
    h[(0, 3)] = tp;
    v[(0, 3)] = t1;
    v[(1, 2)] = t2;
    w[(2, 1)] = t2;
    h[(3, 0)] = tm;
    w[(3, 0)] = t1;
    Ok(SymmetricModel {
        model: LatticeModel::new(h, v, w)?,
        syms: SymmetrySet::sublattice(chiral_gamma(4))?,
    })
}

/// Parameters of the critical four-band chain. Zeros are listed as
/// `[z₁, z₂]` per sector and chirality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalParams<T> {
    pub a_plus: Complex<T>,
    pub a_minus: Complex<T>,
    pub b_plus: Complex<T>,
    pub b_minus: Complex<T>,
    pub zeros_plus_a: [Complex<T>; 2],
    pub zeros_minus_a: [Complex<T>; 2],
    pub zeros_plus_b: [Complex<T>; 2],
    pub zeros_minus_b: [Complex<T>; 2],
}

impl<T: Real> Default for CriticalParams<T> {
    fn default() -> Self {
        let r = |z: [f64; 2]| [cx(z[0], 0.0), cx(z[1], 0.0)];
        let one = cx(CRITICAL_PREFACTOR, 0.0);
        Self {
            a_plus: one,
            a_minus: one,
            b_plus: one,
            b_minus: one,
            zeros_plus_a: r(CRITICAL_ZEROS_PLUS_A),
            zeros_minus_a: r(CRITICAL_ZEROS_MINUS_A),
            zeros_plus_b: r(CRITICAL_ZEROS_PLUS_B),
            zeros_minus_b: r(CRITICAL_ZEROS_MINUS_B),
        }
    }
}

impl<T: Real> CriticalParams<T> {
    /// Hermitian partner of the `H₋` data: `H₊` zeros `1/z̄` and prefactors
    /// `a₊ = ā₋·z̄₁z̄₂`, so that `h = h†` and `W = V†`.
    pub fn hermitian(a_minus: Complex<T>, zeros_minus_a: [Complex<T>; 2], b_minus: Complex<T>, zeros_minus_b: [Complex<T>; 2]) -> Self {
        let partner = |a: Complex<T>, z: [Complex<T>; 2]| {
            (a.conj() * z[0].conj() * z[1].conj(), [z[0].conj().inv(), z[1].conj().inv()])
        };
        let (a_plus, zeros_plus_a) = partner(a_minus, zeros_minus_a);
        let (b_plus, zeros_plus_b) = partner(b_minus, zeros_minus_b);
        Self {
            a_plus,
            a_minus,
            b_plus,
            b_minus,
            zeros_plus_a,
            zeros_minus_a,
            zeros_plus_b,
            zeros_minus_b,
        }
    }
}

/// Critical four-band chain: `H = [[0, H₋], [H₊, 0]]` with
/// `H± = [[a±(β−z)(β−z′)/β, c], [c, b±(β−z)(β−z′)/β]]`. Internal order is
/// `(A_a, A_b, B_a, B_b)`; at `c = 0` sectors `{0, 2}` and `{1, 3}` decouple.
pub fn build_four_band_critical<T: Real>(c: Complex<T>, p: &CriticalParams<T>) -> Result<SymmetricModel<T>> {
    for a in [p.a_plus, p.a_minus, p.b_plus, p.b_minus] {
        if a.norm() == T::zero() {
            return Err(Error::InvalidArgument("critical-model prefactors must be nonzero".into()));
        }
    }
    let mut h = ComplexMatrix::zeros(4, 4);
    let mut v = ComplexMatrix::zeros(4, 4);
    let mut w = ComplexMatrix::zeros(4, 4);
    let mut put = |row: usize, col: usize, a: Complex<T>, z: [Complex<T>; 2]| {
        let (cw, ch, cv) = quadratic_over_beta(a, z);
        h[(row, col)] = ch;
        v[(row, col)] = cv;
        w[(row, col)] = cw;
    };
    put(0, 2, p.a_minus, p.zeros_minus_a);
    put(1, 3, p.b_minus, p.zeros_minus_b);
    put(2, 0, p.a_plus, p.zeros_plus_a);
    put(3, 1, p.b_plus, p.zeros_plus_b);
    for (r, col) in [(0, 3), (1, 2), (2, 1), (3, 0)] {
        h[(r, col)] = c;
    }
    Ok(SymmetricModel {
        model: LatticeModel::new(h, v, w)?,
        syms: SymmetrySet::sublattice(chiral_gamma(4))?,
    })
}

fn pauli<T: Real>() -> [ComplexMatrix<T>; 4] {
    let z = cx(0.0, 0.0);
    let o = cx(1.0, 0.0);
    let i = cx(0.0, 1.0);
    [
        ComplexMatrix::from_rows(&[vec![o, z], vec![z, o]]),
        ComplexMatrix::from_rows(&[vec![z, o], vec![o, z]]),
        ComplexMatrix::from_rows(&[vec![z, -i], vec![i, z]]),
        ComplexMatrix::from_rows(&[vec![o, z], vec![z, -o]]),
    ]
}

/// TRS† chain with `Γ = σ_z⊗I` and `U_T = −iσ_y⊗I`. Hoppings:
/// `h = [[0, (Δ+u+iγ/2)σ_y], [(Δ+u)σ_y, 0]]`,
/// `V = [[0, v], [v, 0]]` with `v = −t/(2i)·σ_x + (u/2)·σ_y`,
/// `W = [[0, w], [w, 0]]` with `w = t/(2i)·σ_x + (u/2)·σ_y`.
///
/// With these blocks `H(e^{ik})` equals the Bloch matrix with off-diagonal
/// blocks `D₁(−k)`, `D₂(−k)`, where `D₁(k) = t sin k σ_x + (Δ+u+u cos k+iγ/2)σ_y`.
pub fn build_trs_dagger<T: Real>(t: T, u: T, gamma: T, delta: T) -> Result<SymmetricModel<T>> {
    let [s0, sx, sy, sz] = pauli::<T>();
    let half = T::lit(0.5);
    let re = |x: T| Complex::new(x, T::zero());
    let t_over_2i = Complex::new(T::zero(), -t * half); // t/(2i)
    let onsite_12 = sy.scale(Complex::new(delta + u, gamma * half));
    let onsite_21 = sy.scale(re(delta + u));
    let v_blk = &sx.scale(-t_over_2i) + &sy.scale(re(u * half));
    let w_blk = &sx.scale(t_over_2i) + &sy.scale(re(u * half));
    let off = |a: &ComplexMatrix<T>, b: &ComplexMatrix<T>| {
        let mut m = ComplexMatrix::zeros(4, 4);
        m.set_block(0, 2, a);
        m.set_block(2, 0, b);
        m
    };
    let model = LatticeModel::new(off(&onsite_12, &onsite_21), off(&v_blk, &v_blk), off(&w_blk, &w_blk))?;
    let gamma_op = sz.kron(&s0);
    let u_t = sy.scale(cx(0.0, -1.0)).kron(&s0);
    Ok(SymmetricModel {
        model,
        syms: SymmetrySet::with_trs_dagger(gamma_op, u_t)?,
    })
}

/// Closed-form zero-energy roots `β₁…β₈` of the TRS† chain and the index
/// carrying each nullvector. `β₂ᵢ₋₁·β₂ᵢ = 1`. Denominators `t − u` make
/// `β₂, β₄, β₅, β₇` infinite (or indeterminate) at `t = u`.
pub fn trs_dagger_roots(t: f64, u: f64, gamma: f64, delta: f64) -> [(Complex<f64>, usize); 8] {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let s = c(delta * delta + t * t + 2.0 * delta * u, 0.0).sqrt();
    let ig = c(0.0, gamma);
    let d2 = c(2.0 * delta, 0.0);
    let s57 = (c(4.0 * t * t, 0.0) + (d2 + ig) * (ig + d2 + c(4.0 * u, 0.0))).sqrt();
    let s68 = (c(4.0 * (t - u) * (t + u), 0.0) + (ig + d2 + c(2.0 * u, 0.0)).powi(2)).sqrt();
    let (tp, tm) = (t + u, t - u);
    [
        (-(c(delta + u, 0.0) + s) / tp, 0),
        ((c(delta + u, 0.0) - s) / tm, 1),
        (-(c(delta + u, 0.0) - s) / tp, 0),
        ((c(delta + u, 0.0) + s) / tm, 1),
        ((ig + d2 - s57 + c(2.0 * u, 0.0)) / (2.0 * tm), 3),
        (-(ig + d2 + s68 + c(2.0 * u, 0.0)) / (2.0 * tp), 2),
        ((ig + d2 + s57 + c(2.0 * u, 0.0)) / (2.0 * tm), 3),
        ((-ig - d2 + s68 - c(2.0 * u, 0.0)) / (2.0 * tp), 2),
    ]
}

/// Names accepted by [`build_named`] with their parameters and defaults.
pub const ZOO: &[(&str, &[(&str, f64)])] = &[
    ("two_band", &[("a_plus", 1.0), ("a_minus", 1.0), ("zp1", 2.0), ("zp2", 3.0), ("zm1", 0.5), ("zm2", 0.2)]),
    ("ssh", &[("v", 0.5), ("w", 1.0)]),
    ("four_band_subgbz", &[("lambda", 1.0), ("lambda_im", 0.0)]),
    (
        "four_band_critical",
        &[
            ("c", 0.0),
            ("c_im", 0.0),
            ("a_plus", 1.0),
            ("a_minus", 1.0),
            ("b_plus", 1.0),
            ("b_minus", 1.0),
            ("zpa1", 20.0),
            ("zpa2", 10.0),
            ("zma1", 6.0),
            ("zma2", 5.0),
            ("zpb1", 2.0),
            ("zpb2", 1.0),
            ("zmb1", 0.2),
            ("zmb2", 0.1),
        ],
    ),
    ("hermitian_critical", &[("c", 0.0), ("zma1", 6.0), ("zma2", 5.0), ("zmb1", 2.5), ("zmb2", 2.0)]),
    ("trs_dagger", &[("t", TRS_T), ("u", TRS_U), ("gamma", TRS_GAMMA), ("delta", -0.2)]),
];

/// Builds a zoo model by name. Unknown parameter names are rejected; missing
/// ones take the defaults listed in [`ZOO`].
pub fn build_named(name: &str, params: &BTreeMap<String, f64>) -> Result<SymmetricModel<f64>> {
    let (_, defaults) = ZOO
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown zoo model '{name}'")))?;
    for key in params.keys() {
        if !defaults.iter().any(|(k, _)| k == key) {
            return Err(Error::InvalidArgument(format!("model '{name}' has no parameter '{key}'")));
        }
    }
    let get = |k: &str| -> f64 {
        params
            .get(k)
            .copied()
            .unwrap_or_else(|| defaults.iter().find(|(n, _)| *n == k).map(|p| p.1).unwrap_or(0.0))
    };
    let r = |x: f64| Complex::new(x, 0.0);
    match name {
        "two_band" => build_two_band(
            r(get("a_plus")),
            r(get("a_minus")),
            [r(get("zp1")), r(get("zp2"))],
            [r(get("zm1")), r(get("zm2"))],
        ),
        "ssh" => build_ssh(get("v"), get("w")),
        "four_band_subgbz" => build_four_band_subgbz(Complex::new(get("lambda"), get("lambda_im"))),
        "four_band_critical" => {
            let p = CriticalParams {
                a_plus: r(get("a_plus")),
                a_minus: r(get("a_minus")),
                b_plus: r(get("b_plus")),
                b_minus: r(get("b_minus")),
                zeros_plus_a: [r(get("zpa1")), r(get("zpa2"))],
                zeros_minus_a: [r(get("zma1")), r(get("zma2"))],
                zeros_plus_b: [r(get("zpb1")), r(get("zpb2"))],
                zeros_minus_b: [r(get("zmb1")), r(get("zmb2"))],
            };
            build_four_band_critical(Complex::new(get("c"), get("c_im")), &p)
        }
        "hermitian_critical" => {
            let p = CriticalParams::hermitian(
                r(1.0),
                [r(get("zma1")), r(get("zma2"))],
                r(1.0),
                [r(get("zmb1")), r(get("zmb2"))],
            );
            build_four_band_critical(r(get("c")), &p)
        }
        "trs_dagger" => build_trs_dagger(get("t"), get("u"), get("gamma"), get("delta")),
        _ => unreachable!("name validated above"),
    }
}
