mod common;

use cggm_core::bayes::{compare_models, ingest_data, score_model};
use cggm_core::catalog::*;
use cggm_core::oracle::decomposable_gwishart_log;
use cggm_core::{ColoredGraph, DYPrior, Error, ModelEntry, SufficientStats};
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn rows(n: usize, p: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect()
}

fn entry(name: &str, g: &ColoredGraph, log_prior: f64) -> ModelEntry {
    ModelEntry {
        name: Some(name.into()),
        graph: g.to_spec(),
        log_prior,
    }
}

fn csv_of(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|v| format!("{v:e}"))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn ingest_rejects_bad_rows() {
    let short = ingest_data::<f64, _>("1,2\n3\n".as_bytes(), 2, false);
    assert!(short.is_err());
    let text = ingest_data::<f64, _>("1,x\n".as_bytes(), 2, false);
    assert!(matches!(text, Err(Error::Data(_))));
    let nan = ingest_data::<f64, _>("1,NaN\n".as_bytes(), 2, false);
    assert!(nan.is_err());
}

#[test]
fn ingest_matches_from_rows() {
    let r = rows(20, 3, 1);
    let a: SufficientStats<f64> = ingest_data(csv_of(&r).as_bytes(), 3, false).unwrap();
    let b = SufficientStats::from_rows(3, &r).unwrap();
    assert_eq!(a.n, b.n);
    assert!((&a.u - &b.u).amax() < 1e-12);
}

#[test]
fn prior_validation() {
    assert!(DYPrior::new(0.0, DMatrix::<f64>::identity(2, 2)).is_err());
    assert!(DYPrior::new(3.0, DMatrix::<f64>::identity(2, 2) * -1.0).is_err());
    let asym = matrix(&[&[1.0, 0.5], &[0.0, 1.0]]);
    assert!(DYPrior::new(3.0, asym).is_err());
}

#[test]
fn empty_data_scores_prior() {
    let prior = DYPrior::default_for(3);
    let st = SufficientStats::empty(3);
    let s: f64 = score_model(&p3_rcop(), &prior, &st, -1.25).unwrap();
    assert!((s + 1.25).abs() < 1e-12);
}

#[test]
fn non_cer_model_is_flagged() {
    let e = vec![(1, 2), (2, 3), (3, 4), (1, 4)];
    let c4 = ColoredGraph::uncolored(4, &e).unwrap();
    let prior = DYPrior::default_for(4);
    let st = SufficientStats::empty(4);
    match score_model(&c4, &prior, &st, 0.0) {
        Err(Error::NotCer(msg)) => assert!(msg.contains("closed-form")),
        other => panic!("unexpected {other:?}"),
    }
    let models = vec![
        entry("cycle", &c4, 0.0),
        entry(
            "path",
            &ColoredGraph::uncolored(4, &path_edges(4)).unwrap(),
            0.0,
        ),
    ];
    let st = SufficientStats::from_rows(4, &rows(10, 4, 3)).unwrap();
    let out = compare_models(&models, &prior, &st);
    assert_eq!(out[0].name.as_deref(), Some("path"));
    assert!(out[1].log_score.is_none());
    assert!(out[1].error.is_some());
}

#[test]
fn duplicate_models_tie_in_input_order() {
    let prior = DYPrior::default_for(3);
    let st = SufficientStats::from_rows(3, &rows(15, 3, 4)).unwrap();
    let g = p3_rcop();
    let models = vec![entry("a", &g, 0.0), entry("b", &g, 0.0)];
    let out = compare_models(&models, &prior, &st);
    assert_eq!(out[0].log_score, out[1].log_score);
    assert_eq!(out[0].index, 0);
    assert_eq!(out[1].index, 1);
}

/// Uncolored decomposable scores equal the clique–separator ratio.
#[test]
fn ranking_matches_oracle() {
    let p = 3;
    let graphs = [
        ("empty", ColoredGraph::uncolored(p, &[]).unwrap()),
        ("path", ColoredGraph::uncolored(p, &path_edges(p)).unwrap()),
        (
            "complete",
            ColoredGraph::uncolored(p, &complete_edges(p)).unwrap(),
        ),
    ];
    // strongly correlated data favor the complete graph
    let mut data = rows(40, p, 8);
    for r in &mut data {
        r[1] += 1.5 * r[0];
        r[2] += 1.5 * r[0];
    }
    let st = SufficientStats::from_rows(p, &data).unwrap();
    let prior = DYPrior::new(3.0, random_pd(p, 2)).unwrap();
    let models: Vec<ModelEntry> = graphs.iter().map(|(n, g)| entry(n, g, 0.0)).collect();
    let out = compare_models(&models, &prior, &st);
    let mut oracle: Vec<(f64, &str)> = graphs
        .iter()
        .map(|(n, g)| {
            let post = decomposable_gwishart_log(g, prior.delta + st.n as f64, &(&prior.d + &st.u))
                .unwrap();
            let pri = decomposable_gwishart_log(g, prior.delta, &prior.d).unwrap();
            (post - pri, *n)
        })
        .collect();
    oracle.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (row, (v, n)) in out.iter().zip(&oracle) {
        assert_eq!(row.name.as_deref(), Some(*n));
        assert!((row.log_score.unwrap() - v).abs() < 1e-8);
    }
    assert_eq!(out[0].name.as_deref(), Some("complete"));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn score_ignores_row_order(seed in 0u64..10_000, n in 1usize..30) {
        use rand::seq::SliceRandom;
        let mut r = rows(n, 3, seed);
        let prior = DYPrior::default_for(3);
        let g = triangle_three_colors();
        let s1 = score_model(&g, &prior, &SufficientStats::from_rows(3, &r).unwrap(), 0.0).unwrap();
        r.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed + 1));
        let s2 = score_model(&g, &prior, &SufficientStats::from_rows(3, &r).unwrap(), 0.0).unwrap();
        prop_assert!((s1 - s2).abs() < 1e-9 * s1.abs().max(1.0));
    }

    /// Updating in two batches equals updating once: the batch-2 score with
    /// the batch-1 posterior as prior plus the batch-1 score.
    #[test]
    fn sequential_updates_compose(seed in 0u64..10_000, n1 in 1usize..15, n2 in 1usize..15) {
        let r = rows(n1 + n2, 3, seed);
        let prior = DYPrior::default_for(3);
        let g = p3_rcop();
        let all = SufficientStats::from_rows(3, &r).unwrap();
        let first = SufficientStats::from_rows(3, &r[..n1]).unwrap();
        let second = SufficientStats::from_rows(3, &r[n1..]).unwrap();
        let s_all = score_model(&g, &prior, &all, 0.0).unwrap();
        let s1 = score_model(&g, &prior, &first, 0.0).unwrap();
        let mid = DYPrior::new(prior.delta + n1 as f64, &prior.d + &first.u).unwrap();
        let s2 = score_model(&g, &mid, &second, 0.0).unwrap();
        prop_assert!((s_all - s1 - s2).abs() < 1e-9 * s_all.abs().max(1.0));
    }
}
