use cggm_core::catalog::{circulant_six, four_by_four_space, petersen_colored_complete};
use cggm_core::frames::{
    frame_for_block, generic_element_frame, intersection_numbers, random_method, verify_frame,
    FrameOptions,
};
use cggm_core::{ColorSpace, DiagonalBlockAlgebra, JordanFrame};
use nalgebra::DMatrix;
use num_rational::Ratio;

const TOL: f64 = 1e-10;

fn complete(n: usize) -> DiagonalBlockAlgebra<f64> {
    let i = DMatrix::identity(n, n);
    let b = DMatrix::from_element(n, n, 1.0) - &i;
    DiagonalBlockAlgebra::from_matrices(0, vec![i, b]).unwrap()
}

fn petersen_block() -> DiagonalBlockAlgebra<f64> {
    let s = ColorSpace::from_graph(&petersen_colored_complete()).unwrap();
    DiagonalBlockAlgebra::from_space(&s, 0)
}

fn same_frame(a: &JordanFrame<f64>, b: &JordanFrame<f64>) -> bool {
    a.d() == b.d()
        && a.projections
            .iter()
            .all(|c| b.projections.iter().any(|e| (c - e).norm() <= 1e-8))
}

#[test]
fn complete_graph_intersection_numbers() {
    for n in [3usize, 5, 8] {
        let data = intersection_numbers(&complete(n)).unwrap();
        assert_eq!(data.exact(1, 1, 0), Some(Ratio::from_integer(n as i64 - 1)));
        assert_eq!(data.exact(1, 1, 1), Some(Ratio::from_integer(n as i64 - 2)));
        for h in 0..2 {
            for c in 0..2 {
                assert_eq!(data.number(0, h, c), if h == c { 1.0 } else { 0.0 });
                assert_eq!(data.number(h, 1, c), data.number(1, h, c));
            }
        }
    }
}

#[test]
fn petersen_intersection_numbers() {
    let alg = petersen_block();
    assert_eq!(alg.len(), 3);
    let data = intersection_numbers(&alg).unwrap();
    // B² = 3I + 0·B + 1·(J − I − B)
    assert_eq!(data.exact(1, 1, 0), Some(Ratio::from_integer(3)));
    assert_eq!(data.exact(1, 1, 1), Some(Ratio::from_integer(0)));
    assert_eq!(data.exact(1, 1, 2), Some(Ratio::from_integer(1)));
}

#[test]
fn random_method_on_complete_graph() {
    let n = 6;
    let alg = complete(n);
    let data = intersection_numbers(&alg).unwrap();
    let f = random_method(&alg, &data, &FrameOptions::default()).unwrap();
    assert_eq!(f.ranks, vec![1, n - 1]);
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    assert!((&f.projections[0] - &j).norm() < 1e-12);
    assert!((&f.projections[1] - (DMatrix::identity(n, n) - &j)).norm() < 1e-12);
    let (p, q) = (f.p_matrix.as_ref().unwrap(), f.q_matrix.as_ref().unwrap());
    assert!((q * p - DMatrix::identity(2, 2) * n as f64).norm() < 1e-10);
    assert!((p * q - DMatrix::identity(2, 2) * n as f64).norm() < 1e-10);
    assert!(verify_frame(&f, &alg, TOL).passes);
}

#[test]
fn random_method_on_petersen() {
    let alg = petersen_block();
    let data = intersection_numbers(&alg).unwrap();
    let f = random_method(&alg, &data, &FrameOptions::default()).unwrap();
    let mut ranks = f.ranks.clone();
    ranks.sort_unstable();
    assert_eq!(ranks, vec![1, 4, 5]);
    let j = DMatrix::from_element(10, 10, 0.1);
    assert!(f.projections.iter().any(|c| (c - &j).norm() < 1e-12));
    let rep = verify_frame(&f, &alg, TOL);
    assert!(rep.passes, "{rep:?}");
    assert!(rep.eigenmatrix.unwrap() <= TOL);
    assert!(rep.reconstruction.unwrap() <= TOL * 10.0);
    // P recovery: each intersection matrix acts on Q's rows by P's entries
    let (p, q) = (f.p_matrix.as_ref().unwrap(), f.q_matrix.as_ref().unwrap());
    for (nn, l) in data.matrices().iter().enumerate() {
        for a in 0..3 {
            let v = q.row(a).transpose();
            assert!((l * &v - &v * p[(nn, a)]).norm() <= 1e-9 * v.norm());
        }
    }
}

#[test]
fn scalar_block_frame() {
    let alg = DiagonalBlockAlgebra::from_matrices(0, vec![DMatrix::<f64>::identity(4, 4)]).unwrap();
    let f = frame_for_block(&alg, &FrameOptions::default()).unwrap();
    assert_eq!(f.ranks, vec![4]);
    assert_eq!(f.projections[0], DMatrix::identity(4, 4));
    let g = generic_element_frame(&alg, &FrameOptions::default()).unwrap();
    assert_eq!(g.ranks, vec![4]);
}

#[test]
fn generic_frame_agrees_with_random_method() {
    for alg in [complete(5), petersen_block()] {
        let data = intersection_numbers(&alg).unwrap();
        let a = random_method(&alg, &data, &FrameOptions::default()).unwrap();
        let b = generic_element_frame(
            &alg,
            &FrameOptions {
                seed: 3,
                ..FrameOptions::default()
            },
        )
        .unwrap();
        assert!(same_frame(&a, &b));
    }
}

#[test]
fn circulant_block_frame() {
    let s = ColorSpace::from_graph(&circulant_six()).unwrap();
    let alg = DiagonalBlockAlgebra::<f64>::from_space(&s, 0);
    assert!(!alg.is_commutative(TOL));
    let f = frame_for_block(&alg, &FrameOptions::default()).unwrap();
    assert_eq!(f.ranks.iter().sum::<usize>(), 6);
    assert_eq!(f.d(), 4);
    assert!(verify_frame(&f, &alg, TOL).passes);
    assert!(random_method(
        &alg,
        &intersection_numbers(&alg).unwrap(),
        &FrameOptions::default()
    )
    .is_err());
}

#[test]
fn frames_do_not_depend_on_seed_for_commutative_blocks() {
    let spaces: Vec<ColorSpace<f64>> = vec![
        four_by_four_space().unwrap(),
        ColorSpace::from_graph(&petersen_colored_complete()).unwrap(),
    ];
    for s in &spaces {
        for i in 0..s.r() {
            let alg = DiagonalBlockAlgebra::from_space(s, i);
            let base = frame_for_block(&alg, &FrameOptions::default()).unwrap();
            for seed in 1..6 {
                let f = frame_for_block(
                    &alg,
                    &FrameOptions {
                        seed,
                        ..FrameOptions::default()
                    },
                )
                .unwrap();
                assert!(same_frame(&base, &f));
                assert_eq!(base.ranks, f.ranks);
            }
        }
    }
}

#[test]
fn verify_detects_broken_frames() {
    let alg = petersen_block();
    let f = frame_for_block(&alg, &FrameOptions::default()).unwrap();
    let mut scaled = f.clone();
    scaled.projections[0] *= 1.01;
    let rep = verify_frame(&scaled, &alg, TOL);
    assert!(!rep.passes && rep.idempotency > TOL);
    let mut missing = f.clone();
    missing.projections.pop();
    missing.ranks.pop();
    missing.p_matrix = None;
    missing.q_matrix = None;
    let rep = verify_frame(&missing, &alg, TOL);
    assert!(!rep.passes && rep.completeness > TOL);
}

#[test]
fn frame_serializes_row_major() {
    let f = frame_for_block(&complete(3), &FrameOptions::default()).unwrap();
    let v = serde_json::to_value(&f).unwrap();
    assert_eq!(v["ranks"], serde_json::json!([1, 2]));
    assert_eq!(v["projections"][0].as_array().unwrap().len(), 3);
    assert!(v["p_matrix"].is_array());
}

#[test]
fn single_precision_frame() {
    let s = ColorSpace::<f32>::from_graph(&petersen_colored_complete()).unwrap();
    let alg = DiagonalBlockAlgebra::from_space(&s, 0);
    let f = frame_for_block(
        &alg,
        &FrameOptions {
            tol: 1e-4,
            gap_tol: 1e-4,
            ..FrameOptions::default()
        },
    )
    .unwrap();
    let mut ranks = f.ranks.clone();
    ranks.sort_unstable();
    assert_eq!(ranks, vec![1, 4, 5]);
    assert!(verify_frame(&f, &alg, 1e-4).passes);
}

#[test]
fn single_precision_random_method() {
    let s = ColorSpace::<f32>::from_graph(&petersen_colored_complete()).unwrap();
    let alg = DiagonalBlockAlgebra::from_space(&s, 0);
    let data = intersection_numbers(&alg).unwrap();
    let f = random_method(
        &alg,
        &data,
        &FrameOptions {
            tol: 1e-4,
            gap_tol: 1e-4,
            ..FrameOptions::default()
        },
    );
    let f = f.unwrap();
    assert!(f.p_matrix.is_some());
}
