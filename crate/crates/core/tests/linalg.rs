mod common;

use common::{multiset_distance, random_antisymmetric, random_matrix, random_unitary, rng};
use nhtopo::linalg::{
    det, eig, eigenvalues, inverse, pfaffian, poly_roots, rank_tol, takagi_factor, ComplexMatrix, PolyCoeffs,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn rank_examples() {
    assert_eq!(rank_tol(&ComplexMatrix::<f64>::identity(3), 1e-8), 3);
    assert_eq!(rank_tol(&ComplexMatrix::<f64>::zeros(2, 2), 1e-8), 0);
    let d = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1e-12, 0.0)]);
    assert_eq!(rank_tol(&d, 1e-8), 1);
}

#[test]
fn rank_of_low_rank_product() {
    let mut r = rng(1);
    let a = random_matrix(&mut r, 7, 3);
    let b = random_matrix(&mut r, 3, 7);
    assert_eq!(rank_tol(&a.matmul(&b), 1e-8), 3);
}

#[test]
fn pfaffian_closed_forms() {
    let a = c(1.5, -0.5);
    let m2 = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), a], vec![-a, c(0.0, 0.0)]]);
    assert_eq!(pfaffian(&m2).unwrap(), a);
    let (pa, pb, pc, pd, pe, pf) = (c(1.0, 0.0), c(2.0, 1.0), c(-0.5, 0.0), c(0.0, 3.0), c(1.0, 1.0), c(2.0, 0.0));
    let z = c(0.0, 0.0);
    let m4 = ComplexMatrix::from_rows(&[
        vec![z, pa, pb, pc],
        vec![-pa, z, pd, pe],
        vec![-pb, -pd, z, pf],
        vec![-pc, -pe, -pf, z],
    ]);
    let expect = pa * pf - pb * pe + pc * pd;
    assert!((pfaffian(&m4).unwrap() - expect).norm() < 1e-14);
    let pr = nhtopo::linalg::pfaffian::pfaffian_parlett_reid(m4);
    assert!((pr - expect).norm() < 1e-13);
}

#[test]
fn pfaffian_rejects_bad_input() {
    assert!(pfaffian(&ComplexMatrix::<f64>::identity(3)).is_err());
    assert!(pfaffian(&ComplexMatrix::<f64>::identity(2)).is_err());
}

#[test]
fn pfaffian_squared_is_determinant() {
    let mut r = rng(7);
    for n in (2..=12).step_by(2) {
        for _ in 0..10 {
            let m = random_antisymmetric(&mut r, n);
            let p = pfaffian(&m).unwrap();
            let d = det(&m);
            assert!((p * p - d).norm() <= 1e-8 * d.norm().max(1e-300), "n={n}");
        }
    }
}

#[test]
fn takagi_examples() {
    let id = ComplexMatrix::<f64>::identity(3);
    let v = takagi_factor(&id).unwrap();
    assert!(v.matmul(&v.transpose()).dist(&id) < 1e-12);
    let th = [0.3, -2.0, 3.1];
    let u = ComplexMatrix::from_diag(&th.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>());
    let v = takagi_factor(&u).unwrap();
    for (k, &t) in th.iter().enumerate() {
        let half = Complex64::from_polar(1.0, t / 2.0);
        assert!((v[(k, k)] - half).norm() < 1e-12 || (v[(k, k)] + half).norm() < 1e-12);
    }
    let sx = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let uc = sx.kron(&ComplexMatrix::identity(2));
    let v = takagi_factor(&uc).unwrap();
    assert!(v.matmul(&v.transpose()).dist(&uc) < 1e-12);
    assert!(v.matmul(&v.adjoint()).dist(&ComplexMatrix::identity(4)) < 1e-12);
}

#[test]
fn takagi_rejects_non_symmetric() {
    let u = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    assert!(takagi_factor(&u).is_err());
}

#[test]
fn takagi_random_symmetric_unitaries() {
    let mut r = rng(11);
    for k in 0..40 {
        let n = 1 + k % 7;
        let w = random_unitary(&mut r, n);
        let u = w.matmul(&w.transpose());
        let v = takagi_factor(&u).unwrap();
        assert!(v.matmul(&v.transpose()).dist(&u) < 1e-10);
        assert!(v.matmul(&v.adjoint()).dist(&ComplexMatrix::identity(n)) < 1e-10);
    }
}

#[test]
fn takagi_degenerate_spectrum() {
    // u = Q diag(1, 1, -1, i) Q^T with a real rotation mixing the degenerate pair
    let mut r = rng(5);
    let w = random_unitary(&mut r, 4);
    let q = ComplexMatrix::from_fn(4, 4, |i, j| c(w[(i, j)].re, 0.0));
    let qr = {
        // orthonormalize the real part
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for j in 0..4 {
            let mut v = q.column(j);
            for p in &cols {
                let d: Complex64 = p.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, pi) in v.iter_mut().zip(p) {
                    *vi -= d * pi;
                }
            }
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
        ComplexMatrix::from_columns(&cols)
    };
    let d = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)]);
    let u = qr.matmul(&d).matmul(&qr.transpose());
    let v = takagi_factor(&u).unwrap();
    assert!(v.matmul(&v.transpose()).dist(&u) < 1e-10);
}

#[test]
fn poly_examples() {
    let mut r = poly_roots(&PolyCoeffs::<f64>::from_real(&[-1.0, 0.0, 1.0])).unwrap();
    r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12 && (r[1] - c(1.0, 0.0)).norm() < 1e-12);
    let r = poly_roots(&PolyCoeffs::<f64>::from_real(&[2.0, -3.0, 1.0])).unwrap();
    assert!(multiset_distance(&r, &[c(1.0, 0.0), c(2.0, 0.0)]) < 1e-12);
    assert!(poly_roots(&PolyCoeffs::<f64>::from_real(&[0.0, 0.0])).is_err());
    let r = poly_roots(&PolyCoeffs::<f64>::from_real(&[0.0, 0.0, 1.0, 1.0])).unwrap();
    assert!(multiset_distance(&r, &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]) < 1e-12);
}

#[test]
fn eigen_matches_known_spectra() {
    // single-band open chain, h = 0, V = W = 1 → 2 cos(mπ/(N+1))
    let n = 5;
    let m = ComplexMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let ev = eigenvalues(&m).unwrap();
    let expect: Vec<Complex64> = (1..=n).map(|k| c(2.0 * (k as f64 * std::f64::consts::PI / 6.0).cos(), 0.0)).collect();
    assert!(multiset_distance(&ev, &expect) < 1e-12);
}

#[test]
fn eigenvectors_satisfy_definition() {
    let mut r = rng(3);
    for n in [1, 2, 5, 9, 16] {
        let a = random_matrix(&mut r, n, n);
        let e = eig(&a, true).unwrap();
        let x = e.vectors.unwrap();
        for k in 0..n {
            let v = x.column(k);
            let av = a.matvec(&v);
            let res: f64 = av.iter().zip(&v).map(|(p, q)| (p - e.values[k] * q).norm_sqr()).sum::<f64>().sqrt();
            assert!(res < 1e-10 * a.norm_fro(), "n={n} k={k} res={res}");
        }
        let tr: Complex64 = e.values.iter().sum();
        assert!((tr - a.trace()).norm() < 1e-10 * a.norm_fro());
    }
}

#[test]
fn eigenvalues_of_skin_effect_chain() {
    // Hatano–Nelson open chain: spectrum is 2√(ab) cos(mπ/(N+1)), real,
    // despite exponential non-normality.
    let (a, b, n) = (3.0, 0.1, 60);
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            c(a, 0.0)
        } else if j == i + 1 {
            c(b, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let ev = eigenvalues(&m).unwrap();
    let g = 2.0 * (a * b).sqrt();
    let expect: Vec<Complex64> =
        (1..=n).map(|k| c(g * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos(), 0.0)).collect();
    assert!(multiset_distance(&ev, &expect) < 1e-9);
}

#[test]
fn inverse_roundtrip() {
    let mut r = rng(9);
    let a = random_matrix(&mut r, 6, 6);
    let inv = inverse(&a, "test").unwrap();
    assert!(a.matmul(&inv).dist(&ComplexMatrix::identity(6)) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pfaffian_congruence(seed in 0u64..10_000, half in 1usize..6) {
        let n = 2 * half;
        let mut r = rng(seed);
        let m = random_antisymmetric(&mut r, n);
        let b = random_matrix(&mut r, n, n);
        let lhs = pfaffian(&b.matmul(&m).matmul(&b.transpose())).unwrap();
        let rhs = det(&b) * pfaffian(&m).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1e-300));
    }

    #[test]
    fn rank_unitary_invariance(seed in 0u64..10_000, n in 2usize..7, k in 0usize..7) {
        let k = k.min(n);
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, k);
        let b = random_matrix(&mut r, k, n);
        let m = if k == 0 { ComplexMatrix::zeros(n, n) } else { a.matmul(&b) };
        let u = random_unitary(&mut r, n);
        let w = random_unitary(&mut r, n);
        let base = rank_tol(&m, 1e-8);
        prop_assert_eq!(base, k);
        prop_assert_eq!(rank_tol(&u.matmul(&m).matmul(&w), 1e-8), base);
    }

    #[test]
    fn poly_root_residuals(seed in 0u64..10_000, d in 1usize..12) {
        let mut r = rng(seed);
        let coeffs = random_matrix(&mut r, 1, d + 1).row(0);
        let p = PolyCoeffs::new(coeffs);
        let roots = poly_roots(&p).unwrap();
        prop_assert_eq!(roots.len(), d);
        for x in roots {
            prop_assert!(p.eval(x).norm() < p.residual_bound(x));
        }
    }

    #[test]
    fn takagi_reconstruction(seed in 0u64..10_000, n in 1usize..8) {
        let mut r = rng(seed);
        let w = random_unitary(&mut r, n);
        let u = w.matmul(&w.transpose());
        let v = takagi_factor(&u).unwrap();
        prop_assert!(v.matmul(&v.transpose()).dist(&u) < 1e-10);
        prop_assert!(v.matmul(&v.adjoint()).dist(&ComplexMatrix::identity(n)) < 1e-10);
    }
}

#[test]
fn single_precision_kernels() {
    let m = ComplexMatrix::<f32>::from_real_rows(&[&[0.0, 2.0, 1.0, 0.5], &[-2.0, 0.0, 3.0, 1.0], &[-1.0, -3.0, 0.0, 4.0], &[-0.5, -1.0, -4.0, 0.0]]);
    let p = pfaffian(&m).unwrap();
    let d = det(&m);
    assert!((p * p - d).norm() < 1e-3 * d.norm());
    let r = poly_roots(&PolyCoeffs::<f32>::from_real(&[2.0, -3.0, 1.0])).unwrap();
    let mut re: Vec<f32> = r.iter().map(|z| z.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((re[0] - 1.0).abs() < 1e-4 && (re[1] - 2.0).abs() < 1e-4);
}
