mod common;

use cdt_core::numerics::{norm2, ComplexMatrix, RngStream};
use cdt_core::scattering::{factorize_medium, green_free, Point2, Scene, SceneParams};
use cdt_core::sensing::{
    add_noise, assemble_matrix, random_sparse_target, read_matrix, write_matrix, BasisKind, NoiseSpec, SparseBasis,
};
use cdt_core::C64;
use proptest::prelude::*;

fn unit(n: usize, j: usize) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); n];
    e[j] = C64::new(1.0, 0.0);
    e
}

#[test]
fn haar_basis_is_orthonormal() {
    for side in [4usize, 8, 16] {
        let n = side * side;
        let basis = SparseBasis::new(BasisKind::Haar, side, side).unwrap();
        let columns: Vec<Vec<C64>> = (0..n).map(|j| basis.synthesize(&unit(n, j)).unwrap()).collect();
        let psi = ComplexMatrix::from_fn(n, n, |i, j| columns[j][i]);
        assert!(psi.as_slice().iter().all(|z| z.im == 0.0));
        let gram = psi.adjoint().matmul(&psi).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-12, "N = {n}");
            }
        }
        // analysis is the transpose of synthesis
        let theta = basis.analyze(&columns[n / 3]).unwrap();
        assert!((norm2(&theta) - 1.0).abs() < 1e-12 && (theta[n / 3].re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn effective_matrix_applies_basis_to_columns() {
    let basis = SparseBasis::new(BasisKind::Haar, 4, 4).unwrap();
    let mut rng = RngStream::new(2, 0);
    let a = ComplexMatrix::from_fn(5, 16, |_, _| C64::new(rng.normal(), rng.normal()));
    let eff = basis.effective_matrix(&a).unwrap();
    let theta: Vec<C64> = (0..16).map(|i| C64::new(i as f64 - 3.0, 0.5)).collect();
    let direct = a.mul_vec(&basis.synthesize(&theta).unwrap()).unwrap();
    let via = eff.mul_vec(&theta).unwrap();
    for (p, q) in direct.iter().zip(&via) {
        assert!((p - q).norm() < 1e-12);
    }
}

#[test]
fn support_is_uniform() {
    let (n, k, draws) = (256usize, 5usize, 10_000usize);
    let mut counts = vec![0usize; n];
    let mut rng = RngStream::new(2024, 0);
    for _ in 0..draws {
        for (i, z) in random_sparse_target(n, k, &mut rng).unwrap().iter().enumerate() {
            if z.norm() > 0.0 {
                counts[i] += 1;
            }
        }
    }
    let p = k as f64 / n as f64;
    let mean = draws as f64 * p;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    // Each index alone leaves the 3-sigma band with probability ~0.0027, so
    // about 0.7 of the 256 are expected outside; P(more than 4) < 0.01.
    let outside: Vec<usize> = (0..n).filter(|&i| (counts[i] as f64 - mean).abs() > 3.0 * sd).collect();
    assert!(outside.len() <= 4, "indices outside 3 sigma: {outside:?}");
    // Chi-square with 255 dof: mean 255, sd ~22.6.
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
    assert!(chi2 < 255.0 + 4.0 * (2.0f64 * 255.0).sqrt(), "chi2 = {chi2:.1}");
}

#[test]
fn signs_are_balanced() {
    let mut rng = RngStream::new(6, 0);
    let mut plus = 0;
    for _ in 0..2000 {
        plus += random_sparse_target(64, 5, &mut rng).unwrap().iter().filter(|z| z.re > 0.0).count();
    }
    let total = 2000.0 * 5.0;
    let sd = (total * 0.25f64).sqrt();
    assert!((plus as f64 - total / 2.0).abs() < 4.0 * sd);
}

#[test]
fn empirical_snr_matches_target() {
    let mut rng = RngStream::new(30, 0);
    let y: Vec<C64> = (0..10_000).map(|_| C64::new(rng.normal(), rng.normal())).collect();
    let (noisy, _) = add_noise(&y, NoiseSpec { snr_db: 30.0 }, &mut RngStream::new(30, 1)).unwrap();
    let signal: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let noise: f64 = noisy.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum();
    let snr = 10.0 * (signal / noise).log10();
    assert!((snr - 30.0).abs() < 0.5, "empirical SNR {snr:.3} dB");
}

/// Column `j` rebuilt from an explicit inverse of the Foldy-Lax matrix.
#[test]
fn columns_match_single_cell_born_response() {
    let scene = Scene::build(&SceneParams::default()).unwrap();
    let solve = factorize_medium(&scene).unwrap();
    let a = assemble_matrix(&scene, &solve).unwrap();
    assert_eq!((a.rows(), a.cols()), (64, 256));

    let k = scene.wavenumber;
    let pos: Vec<Point2> = scene.medium.scatterers.iter().map(|s| s.position).collect();
    let t: Vec<C64> = scene.medium.scatterers.iter().map(|s| s.strength).collect();
    let n = pos.len();
    let inv = common::dense_inverse(&ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            -t[i] * green_free(k, pos[i], pos[j]).unwrap()
        }
    }));
    let background = |obs: Point2, src: Point2| -> C64 {
        let rhs: Vec<C64> = (0..n).map(|m| t[m] * green_free(k, pos[m], src).unwrap()).collect();
        let u = inv.mul_vec(&rhs).unwrap();
        green_free(k, obs, src).unwrap() + (0..n).map(|m| green_free(k, obs, pos[m]).unwrap() * u[m]).sum::<C64>()
    };
    let dx = scene.cell_size;
    for j in (0..256).step_by(17) {
        // lower-left origin, row-major cells
        let (ix, iy) = (j % 16, j / 16);
        let c = Point2::new(-8.0 * dx + (ix as f64 + 0.5) * dx, -8.0 * dx + (iy as f64 + 0.5) * dx);
        let column = a.matrix.mul_vec(&unit(256, j)).unwrap();
        for (s, &src) in scene.transmitters.iter().enumerate() {
            for (r, &rx) in scene.receivers.iter().enumerate() {
                let expect = background(rx, c) * background(src, c) * (dx * dx * k * k);
                let got = column[s * 16 + r];
                assert!((got - expect).norm() <= 1e-10 * expect.norm(), "cell {j} tx {s} rx {r}");
            }
        }
    }
}

#[test]
fn random_medium_changes_the_matrix() {
    let p = SceneParams::default();
    let with = Scene::build(&p).unwrap();
    let without = Scene::build(&p.free_space()).unwrap();
    let a = assemble_matrix(&with, &factorize_medium(&with).unwrap()).unwrap();
    let b = assemble_matrix(&without, &factorize_medium(&without).unwrap()).unwrap();
    let diff: Vec<C64> = a.matrix.as_slice().iter().zip(b.matrix.as_slice()).map(|(x, y)| x - y).collect();
    assert!(norm2(&diff) / b.matrix.frobenius_norm() > 0.1);
    assert_ne!(a.scene_fingerprint, b.scene_fingerprint);
    for i in 0..a.rows() {
        assert!(a.matrix.row(i).iter().any(|z| z.norm() > 0.0));
    }
}

#[test]
fn assembly_is_deterministic_and_round_trips_through_files() {
    let scene = Scene::build(&SceneParams::default()).unwrap();
    let a1 = assemble_matrix(&scene, &factorize_medium(&scene).unwrap()).unwrap();
    let rebuilt = Scene::build(&SceneParams::default()).unwrap();
    let a2 = assemble_matrix(&rebuilt, &factorize_medium(&rebuilt).unwrap()).unwrap();
    assert_eq!(a1, a2);
    let dir = std::env::temp_dir().join(format!("cdt-sensing-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a.mat");
    write_matrix(&path, &a1.matrix).unwrap();
    assert_eq!(read_matrix(&path).unwrap(), a1.matrix);
    std::fs::remove_dir_all(&dir).unwrap();
}

proptest! {
    #[test]
    fn haar_round_trip_and_parseval(seed in any::<u64>(), log_side in 0u32..5) {
        let side = 1usize << log_side;
        let basis = SparseBasis::new(BasisKind::Haar, side, side).unwrap();
        let mut rng = RngStream::new(seed, 0);
        let x: Vec<C64> = (0..side * side).map(|_| C64::new(rng.normal(), rng.normal())).collect();
        let theta = basis.analyze(&x).unwrap();
        prop_assert!((norm2(&theta) - norm2(&x)).abs() <= 1e-12 * norm2(&x).max(1.0));
        let back = basis.synthesize(&theta).unwrap();
        for (p, q) in back.iter().zip(&x) {
            prop_assert!((p - q).norm() < 1e-12);
        }
    }
}
