#![allow(dead_code)]

use cggm_core::catalog::*;
use cggm_core::colored_graph::rcop_coloring;
use cggm_core::{BcModel, ColorSpace, ColoredGraph, ModelOptions, PermGroupGenerators};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_pd(p: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    &m * m.transpose() + DMatrix::identity(p, p) * 0.5
}

pub fn matrix(rows: &[&[f64]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

pub fn unit(p: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p, p);
    for &(i, j, v) in entries {
        m[(i, j)] = v;
    }
    m
}

pub fn rcop_graph(seed: u64) -> ColoredGraph {
    let sc = random_symmetric_chordal(seed, 100);
    let gens = PermGroupGenerators::from_images(sc.p, &sc.generators).unwrap();
    rcop_coloring(sc.p, &sc.edges, &gens).unwrap()
}

/// P3 with the swap of its leaves: colors {2}, {1,3}; one edge color.
pub fn p3_rcop() -> ColoredGraph {
    let gens = PermGroupGenerators::from_images(3, &[vec![3, 2, 1]]).unwrap();
    rcop_coloring(3, &path_edges(3), &gens).unwrap()
}

/// K3 with a leaf swap: vertex colors {1,2},{3}; edges {1,2} and {1,3},{2,3}.
pub fn k3_swap() -> ColoredGraph {
    let gens = PermGroupGenerators::from_images(3, &[vec![2, 1, 3]]).unwrap();
    rcop_coloring(3, &complete_edges(3), &gens).unwrap()
}

pub fn model(g: &ColoredGraph) -> BcModel<f64> {
    BcModel::from_graph(g, &ModelOptions::default()).unwrap()
}

/// Named test spaces used across suites.
pub fn test_models() -> Vec<(&'static str, BcModel<f64>)> {
    let opts = ModelOptions::default();
    vec![
        ("isolated pair", model(&isolated_pair())),
        ("K2 one color", model(&complete_one_color(2))),
        ("K4 one color", model(&complete_one_color(4))),
        ("P3 rcop", model(&p3_rcop())),
        ("K3 swap", model(&k3_swap())),
        ("triangle", model(&triangle_three_colors())),
        ("circulant", model(&circulant_six())),
        ("petersen", model(&petersen_colored_complete())),
        (
            "P4 uncolored",
            model(&ColoredGraph::uncolored(4, &path_edges(4)).unwrap()),
        ),
        (
            "4x4",
            BcModel::from_space(four_by_four_space::<f64>().unwrap(), &opts).unwrap(),
        ),
    ]
}

pub fn space_of(g: &ColoredGraph) -> ColorSpace<f64> {
    model(g).space().clone()
}
