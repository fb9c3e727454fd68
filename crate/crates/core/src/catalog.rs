//! Small named graphs and spaces used in tests, examples and the CLI.

use crate::color_space::ColorSpace;
use crate::colored_graph::{ColoredGraph, Edge};
use crate::error::Result;
use crate::scalar::Scalar;
use nalgebra::DMatrix;

/// Triangle with three singleton vertex classes (Blue, Red, Green); edges
/// `{1,2},{1,3}` share one color and `{2,3}` has another.
pub fn triangle_three_colors() -> ColoredGraph {
    ColoredGraph::build(
        3,
        &[(1, 2), (1, 3), (2, 3)],
        vec![vec![1], vec![2], vec![3]],
        vec![vec![(1, 2), (1, 3)], vec![(2, 3)]],
    )
    .and_then(|g| g.with_class_names(vec!["Blue".into(), "Red".into(), "Green".into()]))
    .expect("valid graph")
}

/// Complete graph on six vertices with one vertex class and four edge
/// classes given by circular distance (distance 2 merged, distance 1 split).
pub fn circulant_six() -> ColoredGraph {
    let a = vec![(1, 2), (3, 4), (5, 6)];
    let b = vec![(1, 6), (2, 3), (4, 5)];
    let c = vec![(1, 3), (1, 5), (2, 4), (2, 6), (3, 5), (4, 6)];
    let d = vec![(1, 4), (2, 5), (3, 6)];
    let edges: Vec<Edge> = [a.clone(), b.clone(), c.clone(), d.clone()].concat();
    ColoredGraph::build(6, &edges, vec![(1..=6).collect()], vec![a, b, c, d]).expect("valid graph")
}

/// Edges of the Petersen graph.
pub fn petersen_edges() -> Vec<Edge> {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i + 1, (i + 1) % 5 + 1));
        e.push((i + 1, i + 6));
        e.push((i + 6, (i + 2) % 5 + 6));
    }
    e
}

/// Adjacency matrix of the Petersen graph.
pub fn petersen_adjacency() -> DMatrix<i64> {
    let mut b = DMatrix::zeros(10, 10);
    for (v, w) in petersen_edges() {
        b[(v - 1, w - 1)] = 1;
        b[(w - 1, v - 1)] = 1;
    }
    b
}

/// Complete graph on ten vertices colored by the Petersen graph: one vertex
/// class, Petersen edges, non-Petersen edges.
pub fn petersen_colored_complete() -> ColoredGraph {
    complete_colored_by(&petersen_adjacency())
}

/// Complete graph colored by a 0/1 adjacency `B`: edges of `B` and of its complement.
pub fn complete_colored_by(b: &DMatrix<i64>) -> ColoredGraph {
    let p = b.nrows();
    let mut on = Vec::new();
    let mut off = Vec::new();
    for v in 1..=p {
        for w in v + 1..=p {
            if b[(v - 1, w - 1)] == 1 {
                on.push((v, w));
            } else {
                off.push((v, w));
            }
        }
    }
    let edges: Vec<Edge> = on.iter().chain(&off).copied().collect();
    let classes = [on, off].into_iter().filter(|c| !c.is_empty()).collect();
    ColoredGraph::build(p, &edges, vec![(1..=p).collect()], classes).expect("valid graph")
}

/// Non-graphical 4×4 space with blocks `{1,2}`, `{3,4}` and parameters
/// `a, b, c, d, e`:
/// `[[a,0,b,c],[0,a,−c,b],[b,−c,d,e],[c,b,e,d]]`.
pub fn four_by_four_basis<T: Scalar>() -> Vec<DMatrix<T>> {
    let mk = |entries: &[(usize, usize, f64)]| {
        let mut m = DMatrix::<T>::zeros(4, 4);
        for &(i, j, v) in entries {
            m[(i, j)] = T::lit(v);
            m[(j, i)] = T::lit(v);
        }
        m
    };
    vec![
        mk(&[(0, 0, 1.0), (1, 1, 1.0)]),
        mk(&[(0, 2, 1.0), (1, 3, 1.0)]),
        mk(&[(0, 3, 1.0), (1, 2, -1.0)]),
        mk(&[(2, 2, 1.0), (3, 3, 1.0)]),
        mk(&[(2, 3, 1.0)]),
    ]
}

pub fn four_by_four_space<T: Scalar>() -> Result<ColorSpace<T>> {
    ColorSpace::from_basis(four_by_four_basis(), vec![2, 2])
}

/// Two non-adjacent vertices sharing one color: the space `{a I_2}`.
pub fn isolated_pair() -> ColoredGraph {
    ColoredGraph::build(2, &[], vec![vec![1, 2]], vec![]).expect("valid graph")
}

/// Complete graph with one vertex color and one edge color.
pub fn complete_one_color(n: usize) -> ColoredGraph {
    let edges: Vec<Edge> = (1..=n)
        .flat_map(|v| (v + 1..=n).map(move |w| (v, w)))
        .collect();
    let classes = if edges.is_empty() {
        vec![]
    } else {
        vec![edges.clone()]
    };
    ColoredGraph::build(n, &edges, vec![(1..=n).collect()], classes).expect("valid graph")
}

/// Path `1 − 2 − … − n`.
pub fn path_edges(n: usize) -> Vec<Edge> {
    (1..n).map(|v| (v, v + 1)).collect()
}

/// Complete graph edges.
pub fn complete_edges(n: usize) -> Vec<Edge> {
    (1..=n)
        .flat_map(|v| (v + 1..=n).map(move |w| (v, w)))
        .collect()
}

/// A chordal graph together with generators of an automorphism subgroup.
#[derive(Clone, Debug)]
pub struct SymmetricChordal {
    pub p: usize,
    pub edges: Vec<Edge>,
    /// Generators in image notation (`images[v-1] = σ(v)`).
    pub generators: Vec<Vec<usize>>,
}

/// Random chordal graph built as `k` copies of a random chordal graph `H`
/// all joined to a central clique `K`, with a random subgroup generated by
/// copy permutations and clique permutations. The subgroup has order at
/// most `max_order`.
pub fn random_symmetric_chordal(seed: u64, max_order: usize) -> SymmetricChordal {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    loop {
        let q = rng.random_range(1..=3usize);
        let k = rng.random_range(2..=4usize);
        let c = rng.random_range(0..=3usize);
        // H by random simplicial additions: vertex j joins a clique among 0..j
        let mut h_edges = Vec::new();
        let mut h_adj = vec![vec![false; q]; q];
        for j in 1..q {
            let mut cand: Vec<usize> = (0..j).collect();
            cand.shuffle(&mut rng);
            let mut clique: Vec<usize> = Vec::new();
            for u in cand {
                if rng.random_bool(0.6) && clique.iter().all(|&w| h_adj[u][w]) {
                    clique.push(u);
                }
            }
            for u in clique {
                h_adj[u][j] = true;
                h_adj[j][u] = true;
                h_edges.push((u, j));
            }
        }
        let p = c + k * q;
        // clique vertices 1..=c; copy t occupies c + t*q + 1 ..= c + (t+1)*q
        let vert = |t: usize, j: usize| c + t * q + j + 1;
        let mut edges = Vec::new();
        for a in 1..=c {
            for b in a + 1..=c {
                edges.push((a, b));
            }
        }
        for t in 0..k {
            for &(u, j) in &h_edges {
                edges.push((vert(t, u), vert(t, j)));
            }
            for a in 1..=c {
                for j in 0..q {
                    edges.push((a, vert(t, j)));
                }
            }
        }
        let copy_perm = |sigma: &[usize]| -> Vec<usize> {
            let mut img: Vec<usize> = (1..=p).collect();
            for t in 0..k {
                for j in 0..q {
                    img[vert(t, j) - 1] = vert(sigma[t], j);
                }
            }
            img
        };
        let mut gens = Vec::new();
        if rng.random_bool(0.7) {
            let shift: Vec<usize> = (0..k).map(|t| (t + 1) % k).collect();
            gens.push(copy_perm(&shift));
        }
        if rng.random_bool(0.5) {
            let mut swap: Vec<usize> = (0..k).collect();
            swap.swap(0, 1);
            gens.push(copy_perm(&swap));
        }
        if c >= 2 && rng.random_bool(0.6) {
            let mut img: Vec<usize> = (1..=p).collect();
            if rng.random_bool(0.5) {
                img.swap(0, 1);
            } else {
                img[..c].rotate_left(1);
            }
            gens.push(img);
        }
        if gens.is_empty() {
            gens.push((1..=p).collect());
        }
        let group = crate::colored_graph::PermGroupGenerators::from_images(p, &gens)
            .expect("valid permutations");
        if group.enumerate(max_order).is_ok() {
            return SymmetricChordal {
                p,
                edges,
                generators: gens,
            };
        }
    }
}
