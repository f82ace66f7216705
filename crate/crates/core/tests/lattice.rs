mod common;

use std::collections::BTreeMap;

use common::{multiset_distance, random_matrix, rng};
use nhtopo::linalg::{eigenvalues, ComplexMatrix};
use nhtopo::model::file::ModelFile;
use nhtopo::model::zoo::*;
use nhtopo::model::{check_symmetries, real_space_hamiltonian, to_chiral_basis, BoundaryCondition, LatticeModel, SymmetrySet};
use nhtopo::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zoo() -> Vec<(&'static str, SymmetricModel<f64>)> {
    ZOO.iter()
        .map(|(name, _)| (*name, build_named(name, &BTreeMap::new()).unwrap()))
        .collect()
}

fn single_band(t: f64) -> LatticeModel<f64> {
    let z = ComplexMatrix::zeros(1, 1);
    let t = ComplexMatrix::from_diag(&[c(t, 0.0)]);
    LatticeModel::new(z, t.clone(), t).unwrap()
}

#[test]
fn h_beta_at_one_is_k0_bloch() {
    for (_, m) in zoo() {
        let hb = m.model.h_beta(c(1.0, 0.0)).unwrap();
        let sum = &(&m.model.h + &m.model.v) + &m.model.w;
        assert!(hb.dist(&sum) < 1e-14);
    }
}

#[test]
fn h_beta_rejects_zero() {
    let m = build_ssh(0.5, 1.0).unwrap();
    assert!(matches!(m.model.h_beta(c(0.0, 0.0)), Err(Error::InvalidArgument(_))));
}

#[test]
fn two_band_vanishes_at_plus_zero() {
    let m = build_two_band(c(1.0, 0.0), c(1.0, 0.0), [c(2.0, 0.0), c(3.0, 0.0)], [c(0.5, 0.0), c(0.2, 0.0)]).unwrap();
    let hb = m.model.h_beta(c(2.0, 0.0)).unwrap();
    assert!(hb[(1, 0)].norm() < 1e-14);
    assert!(hb[(0, 1)].norm() > 0.1);
}

#[test]
fn two_band_rejects_zero_prefactor() {
    let r = build_two_band(c(0.0, 0.0), c(1.0, 0.0), [c(2.0, 0.0), c(3.0, 0.0)], [c(0.5, 0.0), c(0.2, 0.0)]);
    assert!(r.is_err());
}

/// Printed Bloch blocks of the TRS-dagger chain; the real-space hoppings
/// realise them at momentum −k.
fn trs_bloch(t: f64, u: f64, g: f64, d: f64, k: f64) -> ComplexMatrix<f64> {
    let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let sy = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]);
    let d1 = &sx.scale(c(t * k.sin(), 0.0)) + &sy.scale(c(d + u + u * k.cos(), g / 2.0));
    let d2 = &sx.scale(c(t * k.sin(), 0.0)) + &sy.scale(c(d + u + u * k.cos(), 0.0));
    let mut h = ComplexMatrix::zeros(4, 4);
    h.set_block(0, 2, &d1);
    h.set_block(2, 0, &d2);
    h
}

#[test]
fn trs_dagger_matches_printed_bloch_blocks() {
    let m = build_trs_dagger(1.0, 1.0, 1.2, -0.2).unwrap();
    let k = std::f64::consts::PI / 3.0;
    let hb = m.model.h_beta(Complex64::from_polar(1.0, k)).unwrap();
    assert!(hb.dist(&trs_bloch(1.0, 1.0, 1.2, -0.2, -k)) < 1e-12);
    for n in 0..16 {
        let k = 0.4 * n as f64;
        assert!(m.model.bloch(k).dist(&trs_bloch(1.0, 1.0, 1.2, -0.2, -k)) < 1e-12);
    }
}

#[test]
fn bloch_equals_h_beta_on_unit_circle() {
    for (_, m) in zoo() {
        for n in 0..12 {
            let k = 0.5 * n as f64 - 2.0;
            let hb = m.model.h_beta(Complex64::from_polar(1.0, k)).unwrap();
            assert!(m.model.bloch(k).dist(&hb) < 1e-12);
        }
    }
}

#[test]
fn zoo_symmetries_hold() {
    for (name, m) in zoo() {
        let rep = check_symmetries(&m.model, &m.syms).unwrap();
        assert!(rep.sublattice, "{name}: sublattice defect {}", rep.sublattice_defect);
        if m.syms.has_trs_dagger() {
            assert_eq!(rep.trs_dagger, Some(true), "{name}");
        }
    }
}

#[test]
fn trs_dagger_hermiticity() {
    let m = build_trs_dagger(1.0, 1.0, 1.2, -0.2).unwrap();
    let rep = check_symmetries(&m.model, &m.syms).unwrap();
    assert!(!rep.hermitian);
    let m = build_trs_dagger(1.0, 1.0, 0.0, -0.2).unwrap();
    assert!(check_symmetries(&m.model, &m.syms).unwrap().hermitian);
}

#[test]
fn broken_sublattice_is_detected() {
    let mut m = build_ssh(0.5, 1.0).unwrap();
    m.model.h[(0, 0)] = c(0.3, 0.0);
    assert!(!check_symmetries(&m.model, &m.syms).unwrap().sublattice);
}

#[test]
fn symmetry_dimension_mismatch() {
    let m = build_ssh(0.5, 1.0).unwrap();
    let g = SymmetrySet::sublattice(ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)])).unwrap();
    assert!(matches!(check_symmetries(&m.model, &g), Err(Error::DimensionMismatch(_))));
}

#[test]
fn invalid_gamma_rejected() {
    assert!(SymmetrySet::<f64>::sublattice(ComplexMatrix::identity(2)).is_err());
    assert!(SymmetrySet::<f64>::sublattice(ComplexMatrix::from_diag(&[c(2.0, 0.0), c(-2.0, 0.0)])).is_err());
}

#[test]
fn subgbz_structure() {
    let m = build_four_band_subgbz(c(0.0, 0.0)).unwrap();
    let b = 0.7;
    let hb = m.model.h_beta(c(b, 0.0)).unwrap();
    // R₊ in the lower-left, R₋ in the upper-right
    assert!((hb[(0, 3)] - c(7.0 + 2.0 * b, 0.0)).norm() < 1e-14);
    assert!((hb[(1, 2)] - c(0.0, 2.0 * b)).norm() < 1e-14);
    assert!((hb[(2, 1)] - c(0.0, 2.0 / b)).norm() < 1e-14);
    assert!((hb[(3, 0)] - c(3.0 + 2.0 / b, 0.0)).norm() < 1e-14);
    assert!(check_symmetries(&m.model, &m.syms).unwrap().sublattice);
}

#[test]
fn open_chain_two_cells() {
    let m = build_trs_dagger(1.0, 1.0, 1.2, -0.2).unwrap().model;
    let h = real_space_hamiltonian(&m, 2, BoundaryCondition::Open).unwrap();
    assert!(h.block(0, 0, 4, 4).dist(&m.h) == 0.0);
    assert!(h.block(4, 4, 4, 4).dist(&m.h) == 0.0);
    assert!(h.block(0, 4, 4, 4).dist(&m.w) == 0.0);
    assert!(h.block(4, 0, 4, 4).dist(&m.v) == 0.0);
}

#[test]
fn real_space_needs_two_cells() {
    let m = single_band(1.0);
    assert!(real_space_hamiltonian(&m, 1, BoundaryCondition::Open).is_err());
}

#[test]
fn open_single_band_spectrum() {
    let h = real_space_hamiltonian(&single_band(1.0), 5, BoundaryCondition::Open).unwrap();
    let ev = eigenvalues(&h).unwrap();
    let exact: Vec<Complex64> = (1..=5)
        .map(|m| c(2.0 * (m as f64 * std::f64::consts::PI / 6.0).cos(), 0.0))
        .collect();
    assert!(multiset_distance(&ev, &exact) < 1e-12);
}

fn periodic_matches_bloch(m: &LatticeModel<f64>, n: usize) -> f64 {
    let h = real_space_hamiltonian(m, n, BoundaryCondition::Periodic).unwrap();
    let ev = eigenvalues(&h).unwrap();
    let mut bloch = Vec::new();
    for j in 0..n {
        let k = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        bloch.extend(eigenvalues(&m.bloch(k)).unwrap());
    }
    multiset_distance(&ev, &bloch) / m.norm().max(1.0)
}

#[test]
fn periodic_is_union_of_bloch_spectra() {
    for (name, m) in zoo() {
        for n in [3, 7] {
            let d = periodic_matches_bloch(&m.model, n);
            assert!(d < 1e-8, "{name} N={n}: {d:e}");
        }
    }
}

#[test]
fn critical_model_decouples_at_zero() {
    let m = build_four_band_critical(c(0.0, 0.0), &CriticalParams::default()).unwrap().model;
    let (a, b) = ([0usize, 2], [1usize, 3]);
    for x in [&m.h, &m.v, &m.w] {
        for &i in &a {
            for &j in &b {
                assert_eq!(x[(i, j)], c(0.0, 0.0));
                assert_eq!(x[(j, i)], c(0.0, 0.0));
            }
        }
    }
    let m = build_four_band_critical(c(0.01, 0.0), &CriticalParams::default()).unwrap().model;
    assert!(m.h[(0, 3)].norm() > 0.0);
}

#[test]
fn chiral_basis_diagonalizes_gamma() {
    let m = build_trs_dagger(1.0, 1.0, 1.2, -0.2).unwrap();
    let ch = to_chiral_basis(&m.model, &m.syms).unwrap();
    let target = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)]);
    assert!(ch.syms.gamma.dist(&target) < 1e-14);
    assert!(check_symmetries(&ch.model, &ch.syms).unwrap().trs_dagger == Some(true));
}

#[test]
fn model_file_round_trip() {
    for (name, m) in zoo() {
        let f = ModelFile::from_model(&m.model, &m.syms);
        let text = f.to_toml();
        let back = ModelFile::parse(&text).unwrap();
        assert_eq!(back, f, "{name}");
        let built = back.build().unwrap();
        assert_eq!(built.model, m.model);
        assert_eq!(built.syms.gamma, m.syms.gamma);
        assert_eq!(built.syms.u_t, m.syms.u_t);
    }
}

#[test]
fn model_file_zoo_reference() {
    let f = ModelFile::parse("[zoo]\nname = \"trs_dagger\"\nparams = { delta = 0.5 }\n").unwrap();
    let m = f.build().unwrap();
    assert_eq!(m.model, build_trs_dagger(TRS_T, TRS_U, TRS_GAMMA, 0.5).unwrap().model);
    assert!(ModelFile::parse("[zoo]\nname = \"ssh\"\nparams = { bogus = 1.0 }\n").unwrap().build().is_err());
    assert!(ModelFile::parse("M = 2\nh = [[0.0, 0.0]]\n").and_then(|f| f.build()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_periodic_chain_matches_bloch(seed in 0u64..1000, n in 2usize..6) {
        let mut r = rng(seed);
        let m = LatticeModel::new(random_matrix(&mut r, 2, 2), random_matrix(&mut r, 2, 2), random_matrix(&mut r, 2, 2)).unwrap();
        prop_assert!(periodic_matches_bloch(&m, n) < 1e-8);
    }

    #[test]
    fn trs_dagger_family_is_symmetric(t in 0.2f64..2.0, u in 0.0f64..2.0, g in -2.0f64..2.0, d in -2.5f64..1.0) {
        let m = build_trs_dagger(t, u, g, d).unwrap();
        let rep = check_symmetries(&m.model, &m.syms).unwrap();
        prop_assert!(rep.sublattice);
        prop_assert_eq!(rep.trs_dagger, Some(true));
    }
}
