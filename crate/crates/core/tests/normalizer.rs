mod common;

use cggm_core::catalog::*;
use cggm_core::normalizer::srg_log_integral;
use cggm_core::scalar::ln_gamma;
use cggm_core::{BcModel, ColoredGraph, Error, ModelOptions, SrgParameters};
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

#[test]
fn thresholds() {
    let m = BcModel::from_space(
        four_by_four_space::<f64>().unwrap(),
        &ModelOptions::default(),
    )
    .unwrap();
    assert!((m.constants().convergence_threshold::<f64>() + 1.0).abs() < 1e-15);
    let a = DMatrix::identity(4, 4);
    assert!(matches!(
        m.log_integral(-1.0, &a),
        Err(Error::Divergent { .. })
    ));
    assert!(m.log_integral(-0.99, &a).is_ok());
    let pair = model(&isolated_pair());
    // μ = 2, m = 0: threshold −1/2
    assert!((pair.constants().convergence_threshold::<f64>() + 0.5).abs() < 1e-15);
}

#[test]
fn isolated_pair_value() {
    // ∫_{a>0} a^{2s} e^{−2a} √2 da = √2 Γ(2s+1) 2^{−2s−1}
    let pair = model(&isolated_pair());
    for s in [0.0, 0.5, 1.0, 3.0] {
        let got = pair
            .log_integral(s, &DMatrix::identity(2, 2))
            .unwrap()
            .log_value;
        let want = 0.5 * 2f64.ln() + ln_gamma(2.0 * s + 1.0) - (2.0 * s + 1.0) * 2f64.ln();
        assert!((got - want).abs() < 1e-13, "s={s}: {got} vs {want}");
    }
}

#[test]
fn scaling_law() {
    for (name, m) in test_models() {
        let p = m.space().p();
        let dim = m.space().dim() as f64;
        let a = random_pd(p, 11);
        let s = 0.75;
        let base = m.log_integral(s, &a).unwrap().log_value;
        for c in [2.0f64, 10.0] {
            let scaled = m.log_integral(s, &(&a * c)).unwrap().log_value;
            let want = base - (p as f64 * s + dim) * c.ln();
            assert!((scaled - want).abs() < 1e-10, "{name} c={c}");
        }
    }
}

#[test]
fn petersen_spectrum() {
    let prm = SrgParameters::from_adjacency(&petersen_adjacency()).unwrap();
    assert_eq!((prm.k, prm.lambda, prm.mu), (3, 0, 1));
    assert_eq!((prm.theta1, prm.theta2), (1.0, -2.0));
    assert_eq!((prm.f1, prm.f2), (5, 4));
}

#[test]
fn srg_rejects_bad_input() {
    let k4 = DMatrix::from_fn(4, 4, |i, j| i64::from(i != j));
    assert!(matches!(
        SrgParameters::from_adjacency(&k4),
        Err(Error::InvalidSrg(_))
    ));
    // two disjoint edges: imprimitive
    let mut b = DMatrix::zeros(4, 4);
    for (i, j) in [(0, 1), (2, 3)] {
        b[(i, j)] = 1;
        b[(j, i)] = 1;
    }
    assert!(SrgParameters::from_adjacency(&b).is_err());
}

#[test]
fn srg_matches_pipeline() {
    let m = model(&petersen_colored_complete());
    for a in [DMatrix::identity(10, 10), petersen_space_pd(5)] {
        for s in [0.5, 1.0, 2.0] {
            let gen = m.log_integral(s, &a).unwrap().log_value;
            let srg = srg_log_integral(&petersen_adjacency(), s, &a)
                .unwrap()
                .log_value;
            assert!((gen - srg).abs() < 1e-10, "s={s}: {gen} vs {srg}");
        }
    }
}

fn petersen_space_pd(seed: u64) -> DMatrix<f64> {
    random_pd(10, seed)
}

#[test]
fn reversed_frames_give_same_value() {
    let fwd = ModelOptions::default();
    let rev = ModelOptions {
        reverse_frames: true,
        ..fwd
    };
    let graphs = [
        petersen_colored_complete(),
        circulant_six(),
        p3_rcop(),
        triangle_three_colors(),
    ];
    for g in &graphs {
        let m1 = BcModel::<f64>::from_graph(g, &fwd).unwrap();
        let m2 = BcModel::<f64>::from_graph(g, &rev).unwrap();
        let a = random_pd(g.p(), 9);
        let v1 = m1.log_integral_original(1.3, &a).unwrap().log_value;
        let v2 = m2.log_integral_original(1.3, &a).unwrap().log_value;
        assert!((v1 - v2).abs() < 1e-10, "{v1} vs {v2}");
    }
}

#[test]
fn cholesky_of_identity() {
    for (name, m) in test_models() {
        let p = m.space().p();
        let ch = m
            .generalized_cholesky(&DMatrix::identity(p, p), 1e-10)
            .unwrap();
        assert!(
            (&ch.factor - DMatrix::<f64>::identity(p, p)).norm() < 1e-10,
            "{name}"
        );
        for e in &ch.entries {
            assert!((e.t - (e.mu as f64).sqrt()).abs() < 1e-10, "{name}");
            assert!(e.tau.iter().all(|t| t.abs() < 1e-10), "{name}");
        }
    }
}

#[test]
fn cholesky_rejects_non_members() {
    let m = model(&isolated_pair());
    let x = matrix(&[&[2.0, 0.0], &[0.0, 1.0]]);
    assert!(matches!(
        m.generalized_cholesky(&x, 1e-10),
        Err(Error::NotInSpace(_))
    ));
    let neg = DMatrix::identity(2, 2) * -1.0;
    assert!(matches!(
        m.generalized_cholesky(&neg, 1e-10),
        Err(Error::NotPositiveDefinite(_))
    ));
}

#[test]
fn cholesky_reconstructs_random_elements() {
    for (name, m) in test_models() {
        for seed in 0..100 {
            let x = m.space().random_element(seed, true);
            let ch = m.generalized_cholesky(&x, 1e-10).unwrap();
            assert!(ch.reconstruction_residual <= 1e-10, "{name} seed {seed}");
            let tri = m.space().blocks().block_tri(&ch.factor).unwrap();
            assert!(
                (&tri - &ch.factor).norm() < 1e-12,
                "{name}: factor not block-lower"
            );
        }
    }
}

#[test]
fn dy_normalizer_of_single_vertex() {
    // p = 1: ∫ k^{(δ−2)/2} e^{−dk/2} dk = Γ(δ/2) (d/2)^{−δ/2}
    let g = ColoredGraph::uncolored(1, &[]).unwrap();
    let m = model(&g);
    let d = DMatrix::from_element(1, 1, 2.0);
    let got = m.dy_log_normalizer(3.0, &d).unwrap().log_value;
    assert!((got - ln_gamma(1.5)).abs() < 1e-13);
}

#[test]
fn posterior_ratio_with_no_data_is_zero() {
    for (name, m) in test_models() {
        let p = m.space().p();
        let d = DMatrix::identity(p, p) * 2.0;
        let r = m
            .log_posterior_ratio(3.0, &d, 0, &DMatrix::zeros(p, p))
            .unwrap();
        assert!(r.abs() < 1e-12, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    /// Larger `A` (in the Loewner order) gives a smaller integral.
    #[test]
    fn monotone_in_a(seed in 0u64..10_000, c in 0.01f64..2.0) {
        let m = model(&circulant_six());
        let a = random_pd(6, seed);
        let b = &a + DMatrix::identity(6, 6) * c;
        let va = m.log_integral_original(0.5, &a).unwrap().log_value;
        let vb = m.log_integral_original(0.5, &b).unwrap().log_value;
        prop_assert!(vb < va);
    }

    /// Relabeling the input graph does not change the value.
    #[test]
    fn vertex_relabel_invariance(seed in 0u64..10_000) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let g = triangle_three_colors();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut img: Vec<usize> = (1..=3).collect();
        img.shuffle(&mut rng);
        let sigma = cggm_core::Permutation::from_images(&img).unwrap();
        let h = g.permute_vertices(&sigma).unwrap();
        let a = random_pd(3, seed);
        // A expressed for h: (σA)[σv, σw] = A[v, w]
        let ah = DMatrix::from_fn(3, 3, |i, j| {
            let inv = |x: usize| img.iter().position(|&y| y == x + 1).unwrap();
            a[(inv(i), inv(j))]
        });
        let v1 = model(&g).log_integral_original(0.8, &a).unwrap().log_value;
        let v2 = model(&h).log_integral_original(0.8, &ah).unwrap().log_value;
        prop_assert!((v1 - v2).abs() < 1e-10, "{} vs {}", v1, v2);
    }
}
