use cggm_core::catalog::{path_edges, random_symmetric_chordal, triangle_three_colors};
use cggm_core::colored_graph::{is_generously_transitive, rcop_coloring, DEFAULT_GROUP_CAP};
use cggm_core::{ColoredGraph, Error, PermGroupGenerators, Permutation};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn k3_edges() -> Vec<(usize, usize)> {
    vec![(1, 2), (1, 3), (2, 3)]
}

#[test]
fn build_valid_and_trivial() {
    let g = triangle_three_colors();
    assert_eq!((g.p(), g.r(), g.num_edge_classes()), (3, 3, 2));
    let t = ColoredGraph::build(1, &[], vec![vec![1]], vec![]).unwrap();
    assert_eq!((t.p(), t.r(), t.num_colors()), (1, 1, 1));
}

#[test]
fn build_rejects_bad_partitions() {
    assert!(ColoredGraph::build(2, &[], vec![vec![1], vec![1, 2]], vec![]).is_err());
    assert!(ColoredGraph::build(3, &[], vec![vec![1], vec![2]], vec![]).is_err());
    assert!(ColoredGraph::build(2, &[(1, 1)], vec![vec![1, 2]], vec![vec![(1, 1)]]).is_err());
    assert!(ColoredGraph::build(
        3,
        &[(1, 2)],
        vec![vec![1, 2, 3]],
        vec![vec![(1, 2), (2, 3)]]
    )
    .is_err());
    assert!(ColoredGraph::build(
        3,
        &[(1, 2), (2, 3)],
        vec![vec![1, 2, 3]],
        vec![vec![(1, 2)]]
    )
    .is_err());
    assert!(
        ColoredGraph::build(2, &[(1, 2)], vec![vec![1, 2]], vec![vec![(1, 2)], vec![]]).is_err()
    );
}

#[test]
fn color_of_conventions() {
    let g = triangle_three_colors();
    assert_eq!(g.color_of(1, 2).unwrap(), g.color_of(1, 3).unwrap());
    assert_ne!(g.color_of(1, 2).unwrap(), g.color_of(2, 3).unwrap());
    assert_eq!(g.color_of(2, 3).unwrap(), g.color_of(3, 2).unwrap());
    for v in 1..=3 {
        assert_eq!(g.color_of(v, v).unwrap(), v);
    }
    assert_eq!(g.color_of(1, 2).unwrap(), 4);
    let p3 = ColoredGraph::uncolored(3, &path_edges(3)).unwrap();
    assert_eq!(p3.color_of(1, 3).unwrap(), 0);
    assert!(matches!(
        p3.color_of(0, 1),
        Err(Error::VertexOutOfRange { .. })
    ));
    assert!(p3.color_of(1, 4).is_err());
}

#[test]
fn rcop_examples() {
    let gens = PermGroupGenerators::from_images(3, &[vec![2, 3, 1]]).unwrap();
    let g = rcop_coloring(3, &k3_edges(), &gens).unwrap();
    assert_eq!((g.r(), g.num_edge_classes()), (1, 1));

    let id = PermGroupGenerators::from_images(3, &[vec![1, 2, 3]]).unwrap();
    let g = rcop_coloring(3, &k3_edges(), &id).unwrap();
    assert_eq!((g.r(), g.num_edge_classes()), (3, 3));

    let rev = PermGroupGenerators::from_images(4, &[vec![4, 3, 2, 1]]).unwrap();
    let g = rcop_coloring(4, &path_edges(4), &rev).unwrap();
    assert_eq!(g.vertex_classes(), &[vec![1, 4], vec![2, 3]]);
    assert_eq!(g.edge_classes(), &[vec![(1, 2), (3, 4)], vec![(2, 3)]]);
}

#[test]
fn rcop_rejects_non_automorphism() {
    let gens = PermGroupGenerators::from_images(3, &[vec![2, 1, 3]]).unwrap();
    assert!(matches!(
        rcop_coloring(3, &path_edges(3), &gens),
        Err(Error::NotAutomorphism(_))
    ));
}

#[test]
fn generous_transitivity() {
    let s3 = PermGroupGenerators::from_images(3, &[vec![2, 3, 1], vec![2, 1, 3]]).unwrap();
    assert!(is_generously_transitive(&s3, DEFAULT_GROUP_CAP).unwrap());
    let c4 = PermGroupGenerators::from_images(4, &[vec![2, 3, 4, 1]]).unwrap();
    assert!(!is_generously_transitive(&c4, DEFAULT_GROUP_CAP).unwrap());
    let t = PermGroupGenerators::from_images(2, &[vec![2, 1]]).unwrap();
    assert!(is_generously_transitive(&t, DEFAULT_GROUP_CAP).unwrap());
    let big =
        PermGroupGenerators::from_images(6, &[vec![2, 3, 4, 5, 6, 1], vec![2, 1, 3, 4, 5, 6]])
            .unwrap();
    assert!(matches!(
        is_generously_transitive(&big, 100),
        Err(Error::GroupTooLarge(100))
    ));
}

#[test]
fn group_enumeration_orders() {
    let s3 = PermGroupGenerators::from_images(3, &[vec![2, 3, 1], vec![2, 1, 3]]).unwrap();
    assert_eq!(s3.enumerate(100).unwrap().len(), 6);
    let c5 = PermGroupGenerators::from_images(5, &[vec![2, 3, 4, 5, 1]]).unwrap();
    assert_eq!(c5.enumerate(100).unwrap().len(), 5);
}

#[test]
fn basis_matrices_partition_support() {
    let g = triangle_three_colors();
    let b = g.basis_matrices();
    assert_eq!(b.len(), 5);
    let total = b
        .iter()
        .fold(DMatrix::<i64>::zeros(3, 3), |acc, m| acc + &m.matrix);
    assert_eq!(total, DMatrix::from_element(3, 3, 1));
    for (i, x) in b.iter().enumerate() {
        assert_eq!(x.matrix, x.matrix.transpose());
        for y in &b[i + 1..] {
            assert_eq!(x.matrix.component_mul(&y.matrix).sum(), 0);
        }
        if x.color > g.r() {
            assert!((0..3).all(|v| x.matrix[(v, v)] == 0));
        }
    }
    let single = ColoredGraph::build(3, &[], vec![vec![1, 2, 3]], vec![]).unwrap();
    let b = single.basis_matrices();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].matrix, DMatrix::identity(3, 3));
    let p3 = ColoredGraph::uncolored(3, &path_edges(3)).unwrap();
    let total = p3
        .basis_matrices()
        .iter()
        .fold(DMatrix::<i64>::zeros(3, 3), |acc, m| acc + &m.matrix);
    assert_eq!(total[(0, 2)], 0);
    assert_eq!(total.sum(), 3 + 4);
}

#[test]
fn relabel_examples() {
    let g = triangle_three_colors();
    let (h, perm) = g.relabel_for_ordering(&[1, 2, 3]).unwrap();
    assert_eq!(perm, vec![1, 2, 3]);
    assert_eq!(h, g);
    assert!(g.relabel_for_ordering(&[1, 1, 2]).is_err());
    assert!(g.relabel_for_ordering(&[1, 2]).is_err());

    let rev = PermGroupGenerators::from_images(4, &[vec![4, 3, 2, 1]]).unwrap();
    let p4 = rcop_coloring(4, &path_edges(4), &rev).unwrap();
    let (h, perm) = p4.relabel_for_ordering(&[2, 1]).unwrap();
    assert_eq!(perm, vec![2, 3, 1, 4]);
    assert_eq!(h.vertex_classes(), &[vec![1, 2], vec![3, 4]]);
    // applying the inverse of perm to the original gives the relabeled graph
    let mut images = vec![0; 4];
    for (j, &old) in perm.iter().enumerate() {
        images[old - 1] = j + 1;
    }
    let sigma = Permutation::from_images(&images).unwrap();
    let direct = p4.permute_vertices(&sigma).unwrap();
    assert_eq!(direct.edges(), h.edges());
    assert_eq!(direct.edge_classes().len(), h.edge_classes().len());
    for v in 1..=4 {
        for w in 1..=4 {
            let (a, b) = (direct.color_of(v, w).unwrap(), h.color_of(v, w).unwrap());
            assert_eq!(a > 2, b > 2);
            if a > 2 {
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn spec_round_trip() {
    let g = triangle_three_colors();
    let spec = g.to_spec();
    let json = serde_json::to_string(&spec).unwrap();
    let back = ColoredGraph::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.class_name(1), "Blue");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rcop_colors_are_invariant(seed in 0u64..10_000) {
        let sc = random_symmetric_chordal(seed, 100);
        let gens = PermGroupGenerators::from_images(sc.p, &sc.generators).unwrap();
        let g = rcop_coloring(sc.p, &sc.edges, &gens).unwrap();
        for sigma in gens.generators() {
            for v in 1..=g.p() {
                for w in 1..=g.p() {
                    prop_assert_eq!(g.color_of(sigma.apply(v), sigma.apply(w)).unwrap(), g.color_of(v, w).unwrap());
                }
            }
        }
    }

    #[test]
    fn relabel_preserves_colors(seed in 0u64..10_000, shuffle in any::<u64>()) {
        let sc = random_symmetric_chordal(seed, 100);
        let gens = PermGroupGenerators::from_images(sc.p, &sc.generators).unwrap();
        let g = rcop_coloring(sc.p, &sc.edges, &gens).unwrap();
        let r = g.r();
        let mut eta: Vec<usize> = (1..=r).collect();
        let mut x = shuffle;
        for i in (1..r).rev() {
            eta.swap(i, (x % (i as u64 + 1)) as usize);
            x /= i as u64 + 1;
        }
        let (h, perm) = g.relabel_for_ordering(&eta).unwrap();
        let mut rank = vec![0; r + 1];
        for (i, &k) in eta.iter().enumerate() {
            rank[k] = i + 1;
        }
        for j in 1..=g.p() {
            for k in 1..=g.p() {
                let old = g.color_of(perm[j - 1], perm[k - 1]).unwrap();
                let expect = if old >= 1 && old <= r { rank[old] } else { old };
                prop_assert_eq!(h.color_of(j, k).unwrap(), expect);
            }
        }
    }
}
