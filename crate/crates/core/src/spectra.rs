//! Finite-chain and Bloch spectra, β-spectra and transition location.

use num_complex::Complex;

use crate::beta::beta_roots;
use crate::error::{Error, Result};
use crate::invariants::{invariant_z, invariant_z2, InvariantKind, InvariantOptions};
use crate::linalg::eigenvalues;
use crate::model::zoo::SymmetricModel;
use crate::model::{real_space_hamiltonian, BoundaryCondition, LatticeModel};
use crate::scalar::Real;

/// Largest `N·M` handed to the dense eigensolver.
pub const DENSE_BUDGET: usize = 4000;

/// Relative threshold (to the spectral radius) for near-zero states.
pub const NEAR_ZERO_REL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SpectrumSample<T> {
    pub cells: usize,
    pub energies: Vec<Complex<T>>,
    /// Isolated from the continuum by the nearest-neighbour heuristic.
    pub discrete: Vec<bool>,
    /// Indices of near-zero discrete states.
    pub boundary_candidates: Vec<usize>,
}

impl<T: Real> SpectrumSample<T> {
    pub fn spectral_radius(&self) -> T {
        self.energies.iter().map(|e| e.norm()).fold(T::zero(), T::max)
    }

    /// Number of energies with `|E| < threshold`.
    pub fn count_below(&self, threshold: T) -> usize {
        self.energies.iter().filter(|e| e.norm() < threshold).count()
    }

    /// Smallest `|E|` among states with `|E|` above `floor`.
    pub fn min_abs_above(&self, floor: T) -> Option<T> {
        self.energies
            .iter()
            .map(|e| e.norm())
            .filter(|a| *a > floor)
            .fold(None, |m, a| Some(m.map_or(a, |m: T| m.min(a))))
    }
}

/// A state is discrete when its distance to the 5th-nearest other eigenvalue
/// exceeds ten times the median of that distance. Plotting aid only.
pub fn discrete_flags<T: Real>(energies: &[Complex<T>]) -> Vec<bool> {
    let n = energies.len();
    if n < 7 {
        return vec![false; n];
    }
    let d5: Vec<T> = energies
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut d: Vec<T> = energies
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, f)| (*e - *f).norm())
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            d[4]
        })
        .collect();
    let mut sorted = d5.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median = sorted[n / 2];
    d5.iter().map(|d| *d > T::lit(10.0) * median).collect()
}

/// All eigenvalues of the `N`-cell open chain.
pub fn obc_spectrum<T: Real>(model: &LatticeModel<T>, n: usize) -> Result<SpectrumSample<T>> {
    let size = n * model.dim();
    if size > DENSE_BUDGET {
        return Err(Error::BudgetExceeded {
            size,
            budget: DENSE_BUDGET,
        });
    }
    let h = real_space_hamiltonian(model, n, BoundaryCondition::Open)?;
    let energies = eigenvalues(&h)?;
    let discrete = discrete_flags(&energies);
    let radius = energies.iter().map(|e| e.norm()).fold(T::zero(), T::max);
    let cut = T::lit(NEAR_ZERO_REL) * radius.max(T::min_positive_value());
    let boundary_candidates = (0..energies.len())
        .filter(|&i| discrete[i] && energies[i].norm() < cut)
        .collect();
    Ok(SpectrumSample {
        cells: n,
        energies,
        discrete,
        boundary_candidates,
    })
}

/// Bloch eigenvalues on `k_points` equally spaced momenta.
pub fn pbc_spectrum<T: Real>(model: &LatticeModel<T>, k_points: usize) -> Result<Vec<(T, Vec<Complex<T>>)>> {
    let two_pi = T::lit(2.0) * T::PI();
    (0..k_points)
        .map(|n| {
            let k = two_pi * T::lit(n as f64) / T::lit(k_points as f64);
            Ok((k, eigenvalues(&model.bloch(k))?))
        })
        .collect()
}

/// `min_k min|eig H(e^{ik})|` over `k_points` equally spaced momenta.
pub fn pbc_min_gap<T: Real>(model: &LatticeModel<T>, k_points: usize) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    (0..k_points.max(1))
        .map(|n| {
            let k = two_pi * T::lit(n as f64) / T::lit(k_points as f64);
            eigenvalues(&model.bloch(k))
                .map(|ev| ev.iter().map(|e| e.norm()).fold(T::infinity(), T::min))
                .unwrap_or(T::zero())
        })
        .fold(T::infinity(), T::min)
}

#[derive(Debug, Clone)]
pub struct BetaSpectrumSample<T> {
    pub energy: Complex<T>,
    /// Finite roots of `det[E − H(β)]`.
    pub betas: Vec<Complex<T>>,
    /// Set on the extra `E = 0` sample: zeros of `det H(β)`, the β values
    /// available to boundary states.
    pub boundary: bool,
}

/// β roots for every energy, followed by one `E = 0` sample flagged as boundary.
pub fn beta_spectrum<T: Real>(model: &LatticeModel<T>, energies: &[Complex<T>]) -> Result<Vec<BetaSpectrumSample<T>>> {
    let mut out = Vec::with_capacity(energies.len() + 1);
    for &e in energies {
        out.push(BetaSpectrumSample {
            energy: e,
            betas: beta_roots(model, e)?.finite_betas(),
            boundary: false,
        });
    }
    let zero = Complex::new(T::zero(), T::zero());
    out.push(BetaSpectrumSample {
        energy: zero,
        betas: beta_roots(model, zero)?.finite_betas(),
        boundary: true,
    });
    Ok(out)
}

/// Invariant value of a model: `−Tr(Γr(0))/2` or `Q`.
pub fn invariant_value<T: Real>(model: &SymmetricModel<T>, which: InvariantKind, opts: &InvariantOptions<T>) -> Result<i64> {
    match which {
        InvariantKind::Z => invariant_z(model, opts).map(|r| r.value),
        InvariantKind::Z2 => invariant_z2(model, opts).map(|r| r.value),
    }
}

/// Bisection on the invariant value over `[lo, hi]` to absolute tolerance
/// `tol`. Hitting a tie in the dominant-root selection ends the search there.
pub fn locate_transition<T: Real, F>(
    family: F,
    range: (T, T),
    which: InvariantKind,
    tol: T,
    opts: &InvariantOptions<T>,
) -> Result<T>
where
    F: Fn(T) -> Result<SymmetricModel<T>>,
{
    let eval = |x: T| family(x).and_then(|m| invariant_value(&m, which, opts));
    let (mut lo, mut hi) = range;
    let left = eval(lo)?;
    let right = eval(hi)?;
    if left == right {
        return Err(Error::NoSignChange { left });
    }
    let half = T::lit(0.5);
    while hi - lo > tol {
        let mid = (lo + hi) * half;
        match eval(mid) {
            Ok(v) if v == left => lo = mid,
            Ok(_) => hi = mid,
            Err(Error::GaplessOrCritical { .. }) => return Ok(mid),
            Err(e) => return Err(e),
        }
    }
    Ok((lo + hi) * half)
}
