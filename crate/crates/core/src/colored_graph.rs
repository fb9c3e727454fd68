//! Vertex/edge colored graphs, RCOP orbit colorings and basis matrices.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

/// Undirected edge as a 1-based pair with `v < w`.
pub type Edge = (usize, usize);

fn norm_edge(v: usize, w: usize) -> Edge {
    if v <= w {
        (v, w)
    } else {
        (w, v)
    }
}

/// JSON form of a colored graph.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphSpec {
    pub p: usize,
    pub edges: Vec<[usize; 2]>,
    pub vertex_classes: Vec<Vec<usize>>,
    pub edge_classes: Vec<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_class_names: Option<Vec<String>>,
}

/// JSON form of an RCOP request: a graph plus permutation generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RcopSpec {
    pub p: usize,
    pub edges: Vec<[usize; 2]>,
    pub generators: Vec<Vec<usize>>,
}

/// A graph with vertex and edge color partitions.
///
/// Colors follow the convention `1..=r` for vertex classes, `r+1..=r+R` for
/// edge classes and `0` for non-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    p: usize,
    edges: BTreeSet<Edge>,
    vertex_classes: Vec<Vec<usize>>,
    edge_classes: Vec<Vec<Edge>>,
    names: Option<Vec<String>>,
    // row-major p x p color table, 0-based indices
    color: Vec<usize>,
}

impl ColoredGraph {
    /// Validates and builds a colored graph.
    pub fn build(
        p: usize,
        edges: &[Edge],
        vertex_classes: Vec<Vec<usize>>,
        edge_classes: Vec<Vec<Edge>>,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidGraph("p must be positive".into()));
        }
        let mut edge_set = BTreeSet::new();
        for &(v, w) in edges {
            check_vertex(v, p)?;
            check_vertex(w, p)?;
            if v == w {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {v}")));
            }
            edge_set.insert(norm_edge(v, w));
        }
        let mut color = vec![0usize; p * p];
        let mut seen = vec![false; p];
        let mut vcs = Vec::with_capacity(vertex_classes.len());
        for (k, class) in vertex_classes.into_iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "vertex class {} is empty",
                    k + 1
                )));
            }
            let mut class = class;
            class.sort_unstable();
            for &v in &class {
                check_vertex(v, p)?;
                if seen[v - 1] {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} appears in more than one vertex class"
                    )));
                }
                seen[v - 1] = true;
                color[(v - 1) * p + v - 1] = k + 1;
            }
            vcs.push(class);
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidGraph(format!(
                "vertex {} is in no vertex class",
                v + 1
            )));
        }
        let r = vcs.len();
        let mut ecs = Vec::with_capacity(edge_classes.len());
        let mut covered = HashSet::new();
        for (k, class) in edge_classes.into_iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "edge class {} is empty",
                    r + k + 1
                )));
            }
            let mut norm: Vec<Edge> = class.into_iter().map(|(v, w)| norm_edge(v, w)).collect();
            norm.sort_unstable();
            for &(v, w) in &norm {
                if !edge_set.contains(&(v, w)) {
                    return Err(Error::InvalidGraph(format!(
                        "edge class {} contains non-edge {{{v},{w}}}",
                        r + k + 1
                    )));
                }
                if !covered.insert((v, w)) {
                    return Err(Error::InvalidGraph(format!(
                        "edge {{{v},{w}}} appears in more than one edge class"
                    )));
                }
                color[(v - 1) * p + w - 1] = r + k + 1;
                color[(w - 1) * p + v - 1] = r + k + 1;
            }
            ecs.push(norm);
        }
        if covered.len() != edge_set.len() {
            let missing = edge_set.iter().find(|e| !covered.contains(*e)).unwrap();
            return Err(Error::InvalidGraph(format!(
                "edge {{{},{}}} is in no edge class",
                missing.0, missing.1
            )));
        }
        Ok(ColoredGraph {
            p,
            edges: edge_set,
            vertex_classes: vcs,
            edge_classes: ecs,
            names: None,
            color,
        })
    }

    /// All-singleton coloring of an uncolored graph.
    pub fn uncolored(p: usize, edges: &[Edge]) -> Result<Self> {
        let mut es: Vec<Edge> = edges.iter().map(|&(v, w)| norm_edge(v, w)).collect();
        es.sort_unstable();
        es.dedup();
        Self::build(
            p,
            &es,
            (1..=p).map(|v| vec![v]).collect(),
            es.iter().map(|&e| vec![e]).collect(),
        )
    }

    /// Attaches display names for the vertex classes.
    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.r() {
            return Err(Error::InvalidGraph(format!(
                "{} class names for {} vertex classes",
                names.len(),
                self.r()
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        let edges: Vec<Edge> = spec.edges.iter().map(|e| (e[0], e[1])).collect();
        let ecs = spec
            .edge_classes
            .iter()
            .map(|c| c.iter().map(|e| (e[0], e[1])).collect())
            .collect();
        let g = Self::build(spec.p, &edges, spec.vertex_classes.clone(), ecs)?;
        match &spec.vertex_class_names {
            Some(n) => g.with_class_names(n.clone()),
            None => Ok(g),
        }
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            p: self.p,
            edges: self.edges.iter().map(|&(v, w)| [v, w]).collect(),
            vertex_classes: self.vertex_classes.clone(),
            edge_classes: self
                .edge_classes
                .iter()
                .map(|c| c.iter().map(|&(v, w)| [v, w]).collect())
                .collect(),
            vertex_class_names: self.names.clone(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of vertex classes.
    pub fn r(&self) -> usize {
        self.vertex_classes.len()
    }

    /// Number of edge classes.
    pub fn num_edge_classes(&self) -> usize {
        self.edge_classes.len()
    }

    /// Total number of colors `r + R`.
    pub fn num_colors(&self) -> usize {
        self.r() + self.edge_classes.len()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn vertex_classes(&self) -> &[Vec<usize>] {
        &self.vertex_classes
    }

    pub fn edge_classes(&self) -> &[Vec<Edge>] {
        &self.edge_classes
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of vertex class `k` (1-based).
    pub fn class_name(&self, k: usize) -> String {
        match &self.names {
            Some(n) => n[k - 1].clone(),
            None => k.to_string(),
        }
    }

    /// Extended color `c(v,w)` for 1-based vertices.
    pub fn color_of(&self, v: usize, w: usize) -> Result<usize> {
        check_vertex(v, self.p)?;
        check_vertex(w, self.p)?;
        Ok(self.color[(v - 1) * self.p + w - 1])
    }

    /// Extended color for 0-based vertices, unchecked.
    #[inline]
    pub fn c0(&self, v: usize, w: usize) -> usize {
        self.color[v * self.p + w]
    }

    /// Vertex class (1-based) of a 0-based vertex.
    #[inline]
    pub fn class0(&self, v: usize) -> usize {
        self.color[v * self.p + v]
    }

    #[inline]
    pub fn adjacent0(&self, v: usize, w: usize) -> bool {
        v != w && self.color[v * self.p + w] != 0
    }

    /// Neighbors (0-based) of a 0-based vertex.
    pub fn neighbors0(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&w| self.adjacent0(v, w))
    }

    /// The basis matrices `J^k`, indexed by color `k = 1..=r+R`.
    pub fn basis_matrices(&self) -> Vec<BasisMatrix> {
        let n = self.num_colors();
        let mut mats = vec![DMatrix::<i64>::zeros(self.p, self.p); n];
        for v in 0..self.p {
            for w in 0..self.p {
                let c = self.c0(v, w);
                if c > 0 {
                    mats[c - 1][(v, w)] = 1;
                }
            }
        }
        mats.into_iter()
            .enumerate()
            .map(|(k, matrix)| BasisMatrix {
                color: k + 1,
                matrix,
            })
            .collect()
    }

    /// Renumbers vertices so that classes `η_1, …, η_r` occupy consecutive
    /// index blocks. Returns the new graph and `perm`, where new vertex `j`
    /// (1-based) is old vertex `perm[j-1]`.
    pub fn relabel_for_ordering(&self, eta: &[usize]) -> Result<(ColoredGraph, Vec<usize>)> {
        let r = self.r();
        check_class_permutation(eta, r)?;
        let mut perm = Vec::with_capacity(self.p);
        for &k in eta {
            perm.extend_from_slice(&self.vertex_classes[k - 1]);
        }
        let mut inv = vec![0usize; self.p + 1];
        for (j, &v) in perm.iter().enumerate() {
            inv[v] = j + 1;
        }
        let map_edge = |(v, w): Edge| norm_edge(inv[v], inv[w]);
        let edges: Vec<Edge> = self.edges.iter().map(|&e| map_edge(e)).collect();
        let vcs: Vec<Vec<usize>> = eta
            .iter()
            .map(|&k| self.vertex_classes[k - 1].iter().map(|&v| inv[v]).collect())
            .collect();
        let ecs: Vec<Vec<Edge>> = self
            .edge_classes
            .iter()
            .map(|c| c.iter().map(|&e| map_edge(e)).collect())
            .collect();
        let mut g = ColoredGraph::build(self.p, &edges, vcs, ecs)?;
        if let Some(names) = &self.names {
            g.names = Some(eta.iter().map(|&k| names[k - 1].clone()).collect());
        }
        Ok((g, perm))
    }

    /// Applies a vertex relabeling: vertex `v` of `self` becomes `sigma[v-1]`.
    pub fn permute_vertices(&self, sigma: &Permutation) -> Result<ColoredGraph> {
        if sigma.len() != self.p {
            return Err(Error::InvalidPermutation("length differs from p".into()));
        }
        let f = |(v, w): Edge| norm_edge(sigma.apply(v), sigma.apply(w));
        let edges: Vec<Edge> = self.edges.iter().map(|&e| f(e)).collect();
        let vcs = self
            .vertex_classes
            .iter()
            .map(|c| c.iter().map(|&v| sigma.apply(v)).collect())
            .collect();
        let ecs = self
            .edge_classes
            .iter()
            .map(|c| c.iter().map(|&e| f(e)).collect())
            .collect();
        let mut g = ColoredGraph::build(self.p, &edges, vcs, ecs)?;
        g.names = self.names.clone();
        Ok(g)
    }
}

fn check_vertex(v: usize, p: usize) -> Result<()> {
    if v == 0 || v > p {
        Err(Error::VertexOutOfRange { vertex: v, p })
    } else {
        Ok(())
    }
}

pub(crate) fn check_class_permutation(eta: &[usize], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    if eta.len() != r {
        return Err(Error::InvalidPermutation(format!(
            "ordering has {} entries, expected {r}",
            eta.len()
        )));
    }
    for &k in eta {
        if k == 0 || k > r || seen[k - 1] {
            return Err(Error::InvalidPermutation(format!(
                "{eta:?} is not a permutation of 1..={r}"
            )));
        }
        seen[k - 1] = true;
    }
    Ok(())
}

/// Basis matrix `J^k` with 0/1 integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMatrix {
    pub color: usize,
    pub matrix: DMatrix<i64>,
}

/// Permutation of `1..=p`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// From 1-based image notation `[σ(1), …, σ(p)]`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let p = images.len();
        let mut seen = vec![false; p];
        let mut v = Vec::with_capacity(p);
        for &x in images {
            if x == 0 || x > p || seen[x - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection on 1..={p}"
                )));
            }
            seen[x - 1] = true;
            v.push(x - 1);
        }
        Ok(Permutation(v))
    }

    pub fn identity(p: usize) -> Self {
        Permutation((0..p).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Image of a 1-based vertex.
    pub fn apply(&self, v: usize) -> usize {
        self.0[v - 1] + 1
    }

    #[inline]
    pub fn apply0(&self, v: usize) -> usize {
        self.0[v]
    }

    /// 1-based image notation.
    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|x| x + 1).collect()
    }

    /// `(self ∘ other)(v) = self(other(v))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }
}

/// Generators of a permutation group on `1..=p`.
#[derive(Clone, Debug)]
pub struct PermGroupGenerators {
    p: usize,
    gens: Vec<Permutation>,
}

impl PermGroupGenerators {
    pub fn new(p: usize, gens: Vec<Permutation>) -> Result<Self> {
        for g in &gens {
            if g.len() != p {
                return Err(Error::InvalidPermutation(format!(
                    "generator acts on {} points, expected {p}",
                    g.len()
                )));
            }
        }
        Ok(PermGroupGenerators { p, gens })
    }

    pub fn from_images(p: usize, images: &[Vec<usize>]) -> Result<Self> {
        let gens = images
            .iter()
            .map(|i| Permutation::from_images(i))
            .collect::<Result<_>>()?;
        Self::new(p, gens)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    /// Enumerates all group elements by BFS over generator products.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<Permutation>> {
        let id = Permutation::identity(self.p);
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut out = vec![id.clone()];
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.gens {
                let y = g.compose(&x);
                if seen.insert(y.clone()) {
                    if out.len() >= cap {
                        return Err(Error::GroupTooLarge(cap));
                    }
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(out)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Orbit coloring of `(p, edges)` under the group generated by `gens`.
///
/// Orbits are found by union-find over the generator action on extended
/// edges; the group itself is never enumerated. Classes are ordered by their
/// smallest member.
pub fn rcop_coloring(p: usize, edges: &[Edge], gens: &PermGroupGenerators) -> Result<ColoredGraph> {
    if gens.p() != p {
        return Err(Error::InvalidPermutation(format!(
            "generators act on {} points, graph has {p}",
            gens.p()
        )));
    }
    let mut es: Vec<Edge> = Vec::new();
    for &(v, w) in edges {
        check_vertex(v, p)?;
        check_vertex(w, p)?;
        if v == w {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {v}")));
        }
        es.push(norm_edge(v, w));
    }
    es.sort_unstable();
    es.dedup();
    let index: HashMap<Edge, usize> = es.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut vuf = UnionFind::new(p);
    let mut euf = UnionFind::new(es.len());
    for (gi, g) in gens.generators().iter().enumerate() {
        for v in 1..=p {
            vuf.union(v - 1, g.apply(v) - 1);
        }
        for (i, &(v, w)) in es.iter().enumerate() {
            let img = norm_edge(g.apply(v), g.apply(w));
            let Some(&j) = index.get(&img) else {
                return Err(Error::NotAutomorphism(gi + 1));
            };
            euf.union(i, j);
        }
    }
    let mut vclasses: Vec<Vec<usize>> = Vec::new();
    let mut vmap = HashMap::new();
    for v in 0..p {
        let root = vuf.find(v);
        let k = *vmap.entry(root).or_insert_with(|| {
            vclasses.push(Vec::new());
            vclasses.len() - 1
        });
        vclasses[k].push(v + 1);
    }
    let mut eclasses: Vec<Vec<Edge>> = Vec::new();
    let mut emap = HashMap::new();
    for (i, &e) in es.iter().enumerate() {
        let root = euf.find(i);
        let k = *emap.entry(root).or_insert_with(|| {
            eclasses.push(Vec::new());
            eclasses.len() - 1
        });
        eclasses[k].push(e);
    }
    ColoredGraph::build(p, &es, vclasses, eclasses)
}

/// True iff every pair of distinct points in a common orbit is swapped by
/// some group element. Errors when the group order exceeds `cap`.
pub fn is_generously_transitive(gens: &PermGroupGenerators, cap: usize) -> Result<bool> {
    let elems = gens.enumerate(cap)?;
    let p = gens.p();
    let mut swapped = vec![false; p * p];
    let mut same_orbit = vec![false; p * p];
    for g in &elems {
        for v in 0..p {
            let w = g.apply0(v);
            same_orbit[v * p + w] = true;
            if g.apply0(w) == v {
                swapped[v * p + w] = true;
            }
        }
    }
    for v in 0..p {
        for w in v + 1..p {
            if same_orbit[v * p + w] && !swapped[v * p + w] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Default cap for group enumeration.
pub const DEFAULT_GROUP_CAP: usize = 10_000;

#[cfg(test)]
mod tests {
    use super::*;

    fn k3_example() -> ColoredGraph {
        ColoredGraph::build(
            3,
            &[(1, 2), (1, 3), (2, 3)],
            vec![vec![1], vec![2], vec![3]],
            vec![vec![(1, 2), (1, 3)], vec![(2, 3)]],
        )
        .unwrap()
    }

    #[test]
    fn build_and_colors() {
        let g = k3_example();
        assert_eq!(g.color_of(1, 2).unwrap(), g.color_of(1, 3).unwrap());
        assert_eq!(g.color_of(2, 2).unwrap(), 2);
        assert_eq!(g.color_of(2, 3).unwrap(), 5);
        assert!(g.color_of(0, 1).is_err());
        assert_eq!(g.basis_matrices().len(), 5);
    }

    #[test]
    fn build_rejects_bad_partitions() {
        assert!(ColoredGraph::build(2, &[], vec![vec![1], vec![1, 2]], vec![]).is_err());
        assert!(ColoredGraph::build(2, &[], vec![vec![1]], vec![]).is_err());
        assert!(ColoredGraph::build(2, &[(1, 1)], vec![vec![1, 2]], vec![]).is_err());
        assert!(
            ColoredGraph::build(3, &[(1, 2)], vec![vec![1, 2, 3]], vec![vec![(2, 3)]]).is_err()
        );
        assert!(ColoredGraph::build(2, &[(1, 2)], vec![vec![1, 2]], vec![]).is_err());
        assert!(ColoredGraph::build(2, &[], vec![vec![1, 2], vec![]], vec![]).is_err());
    }

    #[test]
    fn trivial_graph() {
        let g = ColoredGraph::build(1, &[], vec![vec![1]], vec![]).unwrap();
        let b = g.basis_matrices();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].matrix, DMatrix::identity(1, 1));
    }

    #[test]
    fn rcop_path_reversal() {
        let gens = PermGroupGenerators::from_images(4, &[vec![4, 3, 2, 1]]).unwrap();
        let g = rcop_coloring(4, &[(1, 2), (2, 3), (3, 4)], &gens).unwrap();
        assert_eq!(g.vertex_classes(), &[vec![1, 4], vec![2, 3]]);
        assert_eq!(g.edge_classes(), &[vec![(1, 2), (3, 4)], vec![(2, 3)]]);
    }

    #[test]
    fn rcop_rejects_non_automorphism() {
        let gens = PermGroupGenerators::from_images(3, &[vec![2, 1, 3]]).unwrap();
        assert!(matches!(
            rcop_coloring(3, &[(1, 3)], &gens),
            Err(Error::NotAutomorphism(1))
        ));
    }

    #[test]
    fn generous_transitivity() {
        let s3 = PermGroupGenerators::from_images(3, &[vec![2, 3, 1], vec![2, 1, 3]]).unwrap();
        assert!(is_generously_transitive(&s3, 100).unwrap());
        let c4 = PermGroupGenerators::from_images(4, &[vec![2, 3, 4, 1]]).unwrap();
        assert!(!is_generously_transitive(&c4, 100).unwrap());
        assert_eq!(c4.enumerate(100).unwrap().len(), 4);
        assert!(matches!(c4.enumerate(3), Err(Error::GroupTooLarge(3))));
    }

    #[test]
    fn relabel_identity_and_names() {
        let g = k3_example()
            .with_class_names(vec!["Blue".into(), "Red".into(), "Green".into()])
            .unwrap();
        let (h, perm) = g.relabel_for_ordering(&[1, 2, 3]).unwrap();
        assert_eq!(perm, vec![1, 2, 3]);
        assert_eq!(h, g);
        let (h2, perm2) = g.relabel_for_ordering(&[2, 3, 1]).unwrap();
        assert_eq!(perm2, vec![2, 3, 1]);
        assert_eq!(h2.class_names().unwrap()[0], "Red");
        assert!(g.relabel_for_ordering(&[1, 1, 2]).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let g = k3_example();
        let s = serde_json::to_string(&g.to_spec()).unwrap();
        let back: GraphSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(ColoredGraph::from_spec(&back).unwrap(), g);
    }
}
