//! Color perfect elimination orderings, 2-path functions and CER classification.

use crate::colored_graph::{check_class_permutation, ColoredGraph, Edge};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

/// Ordered partition `(V_{η_1}, …, V_{η_r})` given by 1-based class indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ColorOrdering {
    order: Vec<usize>,
    #[serde(skip)]
    rank: Vec<usize>,
}

impl ColorOrdering {
    pub fn new(order: Vec<usize>, r: usize) -> Result<Self> {
        check_class_permutation(&order, r)?;
        let mut rank = vec![0; r];
        for (pos, &k) in order.iter().enumerate() {
            rank[k - 1] = pos;
        }
        Ok(ColorOrdering { order, rank })
    }

    pub fn identity(r: usize) -> Self {
        ColorOrdering {
            order: (1..=r).collect(),
            rank: (0..r).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    /// 0-based position of class `k` (1-based).
    pub fn rank_of(&self, k: usize) -> usize {
        self.rank[k - 1]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let order: Vec<usize> = self.order.iter().rev().copied().collect();
        let r = order.len();
        ColorOrdering::new(order, r).expect("reversal of a permutation")
    }
}

impl fmt::Display for ColorOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Counts of 2-paths keyed by color pairs `(k, h)`; absent keys are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TwoPathTable {
    pub counts: BTreeMap<(usize, usize), u32>,
}

impl TwoPathTable {
    pub fn get(&self, k: usize, h: usize) -> u32 {
        self.counts.get(&(k, h)).copied().unwrap_or(0)
    }

    fn add(&mut self, k: usize, h: usize) {
        *self.counts.entry((k, h)).or_insert(0) += 1;
    }

    /// Restriction to pairs in `f × f`.
    pub fn restrict(&self, f: &BTreeSet<usize>) -> TwoPathTable {
        TwoPathTable {
            counts: self
                .counts
                .iter()
                .filter(|((k, h), _)| f.contains(k) && f.contains(h))
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    /// Table with the roles of `k` and `h` swapped.
    pub fn transposed(&self) -> TwoPathTable {
        TwoPathTable {
            counts: self
                .counts
                .iter()
                .map(|(&(k, h), &v)| ((h, k), v))
                .collect(),
        }
    }

    pub fn sum(&self, other: &TwoPathTable) -> TwoPathTable {
        let mut t = self.clone();
        for (&key, &v) in &other.counts {
            *t.counts.entry(key).or_insert(0) += v;
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.counts.values().all(|&v| v == 0)
    }
}

/// True iff the neighbors of `v` inside `subset` are pairwise adjacent.
pub fn is_simplicial(g: &ColoredGraph, v: usize, subset: &[usize]) -> Result<bool> {
    let p = g.p();
    let mut inside = vec![false; p];
    for &u in subset {
        if u == 0 || u > p {
            return Err(Error::VertexOutOfRange { vertex: u, p });
        }
        inside[u - 1] = true;
    }
    if v == 0 || v > p {
        return Err(Error::VertexOutOfRange { vertex: v, p });
    }
    if !inside[v - 1] {
        return Err(Error::NotInSubset(v));
    }
    Ok(simplicial0(g, v - 1, &inside))
}

fn simplicial0(g: &ColoredGraph, v: usize, alive: &[bool]) -> bool {
    let nb: Vec<usize> = g.neighbors0(v).filter(|&w| alive[w]).collect();
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !g.adjacent0(a, b) {
                return false;
            }
        }
    }
    true
}

fn class_simplicial(g: &ColoredGraph, k: usize, alive: &[bool]) -> bool {
    g.vertex_classes()[k - 1]
        .iter()
        .all(|&v| simplicial0(g, v - 1, alive))
}

/// True iff `eta` is a color perfect elimination ordering.
pub fn is_cpeo(g: &ColoredGraph, eta: &ColorOrdering) -> bool {
    let mut alive = vec![true; g.p()];
    for &k in eta.as_slice() {
        if !class_simplicial(g, k, &alive) {
            return false;
        }
        for &v in &g.vertex_classes()[k - 1] {
            alive[v - 1] = false;
        }
    }
    true
}

/// Recursive greedy search for a cpeo, trying classes in ascending index
/// order and backtracking on failure (failed remainders are memoized).
pub fn greedy_find_cpeo(g: &ColoredGraph) -> Option<ColorOrdering> {
    fn rec(
        g: &ColoredGraph,
        remaining: &mut Vec<bool>,
        alive: &mut Vec<bool>,
        order: &mut Vec<usize>,
        failed: &mut HashSet<Vec<bool>>,
    ) -> bool {
        if order.len() == g.r() {
            return true;
        }
        if failed.contains(remaining) {
            return false;
        }
        for k in 1..=g.r() {
            if !remaining[k - 1] || !class_simplicial(g, k, alive) {
                continue;
            }
            remaining[k - 1] = false;
            for &v in &g.vertex_classes()[k - 1] {
                alive[v - 1] = false;
            }
            order.push(k);
            if rec(g, remaining, alive, order, failed) {
                return true;
            }
            order.pop();
            for &v in &g.vertex_classes()[k - 1] {
                alive[v - 1] = true;
            }
            remaining[k - 1] = true;
        }
        failed.insert(remaining.clone());
        false
    }
    let mut remaining = vec![true; g.r()];
    let mut alive = vec![true; g.p()];
    let mut order = Vec::new();
    let mut failed = HashSet::new();
    if rec(g, &mut remaining, &mut alive, &mut order, &mut failed) {
        Some(ColorOrdering::new(order, g.r()).expect("valid permutation"))
    } else {
        None
    }
}

/// Adjacency of the color digraph `H`: `h → k` iff some `v ∈ V_k` has two
/// non-adjacent neighbors in `V_k ∪ V_h`.
pub fn color_dag(g: &ColoredGraph) -> Vec<Vec<bool>> {
    let r = g.r();
    let mut h = vec![vec![false; r]; r];
    for k in 1..=r {
        for &v in &g.vertex_classes()[k - 1] {
            let nb: Vec<usize> = g.neighbors0(v - 1).collect();
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if g.adjacent0(a, b) {
                        continue;
                    }
                    let (ca, cb) = (g.class0(a), g.class0(b));
                    if ca == k || ca == cb {
                        h[cb - 1][k - 1] = true;
                    }
                    if cb == k {
                        h[ca - 1][k - 1] = true;
                    }
                }
            }
        }
    }
    h
}

/// Cpeo search driven by the color digraph: rejects a cyclic `H`, then
/// eliminates `H`-sources whose vertices are simplicial in the remaining graph.
///
/// Acyclicity of `H` alone does not guarantee a cpeo (a 4-cycle with four
/// colors has an empty `H`), so each elimination is checked directly.
pub fn cpeo_via_color_dag(g: &ColoredGraph) -> Option<ColorOrdering> {
    let r = g.r();
    let h = color_dag(g);
    let mut indeg: Vec<usize> = (0..r)
        .map(|k| (0..r).filter(|&j| h[j][k]).count())
        .collect();
    let mut remaining = vec![true; r];
    let mut alive = vec![true; g.p()];
    let mut order = Vec::with_capacity(r);
    // cycle check
    {
        let mut deg = indeg.clone();
        let mut done = vec![false; r];
        let mut count = 0;
        while let Some(k) = (0..r).find(|&k| !done[k] && deg[k] == 0) {
            done[k] = true;
            count += 1;
            for j in 0..r {
                if h[k][j] {
                    deg[j] -= 1;
                }
            }
        }
        if count < r {
            return None;
        }
    }
    while order.len() < r {
        let next = (0..r)
            .find(|&k| remaining[k] && indeg[k] == 0 && class_simplicial(g, k + 1, &alive))?;
        remaining[next] = false;
        for &v in &g.vertex_classes()[next] {
            alive[v - 1] = false;
        }
        for j in 0..r {
            if h[next][j] {
                indeg[j] -= 1;
            }
        }
        order.push(next + 1);
    }
    Some(ColorOrdering::new(order, r).expect("valid permutation"))
}

/// True iff `order` (1-based vertices) is a perfect elimination ordering.
pub fn is_peo(g: &ColoredGraph, order: &[usize]) -> bool {
    let p = g.p();
    if order.len() != p {
        return false;
    }
    let mut seen = vec![false; p];
    for &v in order {
        if v == 0 || v > p || seen[v - 1] {
            return false;
        }
        seen[v - 1] = true;
    }
    let mut alive = vec![true; p];
    for &v in order {
        if !simplicial0(g, v - 1, &alive) {
            return false;
        }
        alive[v - 1] = false;
    }
    true
}

/// Class ordering by first appearance along a perfect elimination ordering.
pub fn cpeo_from_peo(g: &ColoredGraph, peo: &[usize]) -> Result<ColorOrdering> {
    if !is_peo(g, peo) {
        return Err(Error::NotPeo(format!("{peo:?}")));
    }
    let mut used = vec![false; g.r()];
    let mut order = Vec::with_capacity(g.r());
    for &v in peo {
        let k = g.class0(v - 1);
        if !used[k - 1] {
            used[k - 1] = true;
            order.push(k);
        }
    }
    let eta = ColorOrdering::new(order, g.r())?;
    if !is_cpeo(g, &eta) {
        return Err(Error::NoCpeo);
    }
    Ok(eta)
}

fn check_extended_edge(g: &ColoredGraph, v: usize, w: usize) -> Result<()> {
    let c = g.color_of(v, w)?;
    if c == 0 {
        Err(Error::NotExtendedEdge(v, w))
    } else {
        Ok(())
    }
}

// rank per class (0-based), usize::MAX when unplaced
fn directed0(g: &ColoredGraph, rank: &[usize], v: usize, w: usize, t: &mut TwoPathTable) {
    let bound = rank[g.class0(v) - 1].min(rank[g.class0(w) - 1]);
    for u in 0..g.p() {
        if rank[g.class0(u) - 1] > bound {
            continue;
        }
        let (k, h) = (g.c0(v, u), g.c0(u, w));
        if k != 0 && h != 0 {
            t.add(k, h);
        }
    }
}

fn symmetric0(g: &ColoredGraph, rank: &[usize], v: usize, w: usize) -> TwoPathTable {
    let mut t = TwoPathTable::default();
    directed0(g, rank, v, w, &mut t);
    directed0(g, rank, w, v, &mut t);
    t
}

/// Directed 2-path table `m_{v→w}` for an extended edge `{v,w}`.
pub fn two_path_table(
    g: &ColoredGraph,
    eta: &ColorOrdering,
    v: usize,
    w: usize,
) -> Result<TwoPathTable> {
    check_extended_edge(g, v, w)?;
    let mut t = TwoPathTable::default();
    directed0(g, &eta.rank, v - 1, w - 1, &mut t);
    Ok(t)
}

/// Symmetric 2-path table `m_{v↔w} = m_{v→w} + m_{w→v}`.
pub fn symmetric_two_path_table(
    g: &ColoredGraph,
    eta: &ColorOrdering,
    v: usize,
    w: usize,
) -> Result<TwoPathTable> {
    check_extended_edge(g, v, w)?;
    Ok(symmetric0(g, &eta.rank, v - 1, w - 1))
}

/// Extended edges grouped by color `1..=r+R`, each sorted.
pub fn extended_edge_classes(g: &ColoredGraph) -> Vec<Vec<Edge>> {
    let mut out: Vec<Vec<Edge>> = g
        .vertex_classes()
        .iter()
        .map(|c| c.iter().map(|&v| (v, v)).collect())
        .collect();
    out.extend(g.edge_classes().iter().cloned());
    out
}

/// Outcome of an (M1) check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct M1Report {
    pub holds: bool,
    /// First pair of same-colored extended edges with different tables.
    pub witness: Option<(Edge, Edge)>,
}

/// (M1): `m_{v↔w}` constant on every extended-edge color class.
pub fn check_m1(g: &ColoredGraph, eta: &ColorOrdering) -> M1Report {
    for class in extended_edge_classes(g) {
        let (a, b) = class[0];
        let reference = symmetric0(g, &eta.rank, a - 1, b - 1);
        for &(v, w) in &class[1..] {
            if symmetric0(g, &eta.rank, v - 1, w - 1) != reference {
                return M1Report {
                    holds: false,
                    witness: Some(((a, b), (v, w))),
                };
            }
        }
    }
    M1Report {
        holds: true,
        witness: None,
    }
}

/// The sets `F_i` and their union `F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FSets {
    pub per_class: Vec<BTreeSet<usize>>,
    pub all: BTreeSet<usize>,
}

pub fn f_sets(g: &ColoredGraph) -> FSets {
    let mut per_class = vec![BTreeSet::new(); g.r()];
    for v in 0..g.p() {
        for w in 0..g.p() {
            let c = g.c0(v, w);
            if c != 0 && g.class0(v) == g.class0(w) {
                per_class[g.class0(v) - 1].insert(c);
            }
        }
    }
    let all = per_class.iter().flatten().copied().collect();
    FSets { per_class, all }
}

/// Outcome of an (M2) check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct M2Report {
    pub holds: bool,
    /// First same-class pair `(v, w)` with `m_{v→w} ≠ m_{w→v}` on `F × F`.
    pub witness: Option<(usize, usize)>,
}

/// (M2): `m_{v→w}|_{F×F} = m_{w→v}|_{F×F}` whenever `c(v) = c(w)`.
pub fn check_m2(g: &ColoredGraph, eta: &ColorOrdering) -> M2Report {
    let f = f_sets(g).all;
    for class in g.vertex_classes() {
        for (i, &v) in class.iter().enumerate() {
            for &w in &class[i + 1..] {
                let mut a = TwoPathTable::default();
                directed0(g, &eta.rank, v - 1, w - 1, &mut a);
                let mut b = TwoPathTable::default();
                directed0(g, &eta.rank, w - 1, v - 1, &mut b);
                if a.restrict(&f) != b.restrict(&f) {
                    return M2Report {
                        holds: false,
                        witness: Some((v, w)),
                    };
                }
            }
        }
    }
    M2Report {
        holds: true,
        witness: None,
    }
}

/// Outcome of an (M3) check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct M3Report {
    pub holds: bool,
    /// First ordered pair `(v, w)` whose table differs from its color class
    /// reference (or is nonzero on a non-edge).
    pub witness: Option<(usize, usize)>,
}

/// Table of `u` with `c(w) ≤ c(u) ≤ c(v)` in the ordering, for ordered `(v, w)`.
fn mu_table(g: &ColoredGraph, rank: &[usize], v: usize, w: usize) -> TwoPathTable {
    let (lo, hi) = (rank[g.class0(w) - 1], rank[g.class0(v) - 1]);
    let mut t = TwoPathTable::default();
    for u in 0..g.p() {
        let ru = rank[g.class0(u) - 1];
        if ru < lo || ru > hi {
            continue;
        }
        let (k, h) = (g.c0(v, u), g.c0(u, w));
        if k != 0 && h != 0 {
            t.add(k, h);
        }
    }
    t
}

/// (M3): the `μ_{v→w}` tables are constant on color classes of ordered pairs
/// with `v` not earlier than `w`, and vanish on non-edges. Equivalent to the
/// lower block-triangular part of the space being closed under products.
pub fn check_m3(g: &ColoredGraph, eta: &ColorOrdering) -> Result<M3Report> {
    if !is_cpeo(g, eta) {
        return Err(Error::NoCpeo);
    }
    let rank = &eta.rank;
    let mut refs: BTreeMap<usize, TwoPathTable> = BTreeMap::new();
    for v in 0..g.p() {
        for w in 0..g.p() {
            if rank[g.class0(v) - 1] < rank[g.class0(w) - 1] {
                continue;
            }
            let t = mu_table(g, rank, v, w);
            let c = g.c0(v, w);
            let ok = if c == 0 {
                t.is_zero()
            } else {
                match refs.get(&c) {
                    Some(r) => *r == t,
                    None => {
                        refs.insert(c, t);
                        true
                    }
                }
            };
            if !ok {
                return Ok(M3Report {
                    holds: false,
                    witness: Some((v + 1, w + 1)),
                });
            }
        }
    }
    Ok(M3Report {
        holds: true,
        witness: None,
    })
}

/// Classification verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CerVerdict {
    NotDecomposableColoring,
    /// A cpeo exists but no cpeo satisfies (M1); witness is for the returned one.
    CpeoOnly {
        ordering: ColorOrdering,
        m1_witness: Option<(Edge, Edge)>,
    },
    /// (M1) holds for the returned cpeo but (M2) fails.
    Cer {
        ordering: ColorOrdering,
        m2_witness: Option<(usize, usize)>,
    },
    SymmetricCer {
        ordering: ColorOrdering,
    },
}

impl CerVerdict {
    pub fn ordering(&self) -> Option<&ColorOrdering> {
        match self {
            CerVerdict::NotDecomposableColoring => None,
            CerVerdict::CpeoOnly { ordering, .. }
            | CerVerdict::Cer { ordering, .. }
            | CerVerdict::SymmetricCer { ordering } => Some(ordering),
        }
    }

    /// True for `Cer` and `SymmetricCer`.
    pub fn is_cer(&self) -> bool {
        matches!(
            self,
            CerVerdict::Cer { .. } | CerVerdict::SymmetricCer { .. }
        )
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, CerVerdict::SymmetricCer { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            CerVerdict::NotDecomposableColoring => "NotDecomposableColoring",
            CerVerdict::CpeoOnly { .. } => "CpeoOnly",
            CerVerdict::Cer { .. } => "Cer",
            CerVerdict::SymmetricCer { .. } => "SymmetricCer",
        }
    }
}

/// Default limit on the number of vertex classes for [`classify`].
pub const DEFAULT_CLASSIFY_CAP: usize = 12;

/// Classifies with the default class-count cap.
pub fn classify(g: &ColoredGraph) -> Result<CerVerdict> {
    classify_with_cap(g, DEFAULT_CLASSIFY_CAP)
}

struct Search<'a> {
    g: &'a ColoredGraph,
    rank: Vec<usize>,
    alive: Vec<bool>,
    order: Vec<usize>,
    refs: Vec<Option<TwoPathTable>>,
}

impl Search<'_> {
    // Depth-first over cpeos in lexicographic order, pruning prefixes that
    // already violate (M1). Calls `leaf` on every complete ordering until it
    // returns true.
    fn run(&mut self, leaf: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let g = self.g;
        let r = g.r();
        if self.order.len() == r {
            return leaf(&self.order);
        }
        for k in 1..=r {
            if self.rank[k - 1] != usize::MAX || !class_simplicial(g, k, &self.alive) {
                continue;
            }
            self.rank[k - 1] = self.order.len();
            let mut set_here = Vec::new();
            let mut ok = true;
            'edges: for &v in &g.vertex_classes()[k - 1] {
                for w in 0..g.p() {
                    let cw = g.class0(w);
                    let c = g.c0(v - 1, w);
                    if c == 0 || self.rank[cw - 1] == usize::MAX {
                        continue;
                    }
                    if cw == k && w < v - 1 {
                        continue;
                    }
                    let t = symmetric0(g, &self.rank, v - 1, w);
                    match &self.refs[c - 1] {
                        Some(reference) if *reference != t => {
                            ok = false;
                            break 'edges;
                        }
                        Some(_) => {}
                        None => {
                            self.refs[c - 1] = Some(t);
                            set_here.push(c - 1);
                        }
                    }
                }
            }
            if ok {
                for &v in &g.vertex_classes()[k - 1] {
                    self.alive[v - 1] = false;
                }
                self.order.push(k);
                let done = self.run(leaf);
                self.order.pop();
                for &v in &g.vertex_classes()[k - 1] {
                    self.alive[v - 1] = true;
                }
                if done {
                    self.rank[k - 1] = usize::MAX;
                    for c in set_here {
                        self.refs[c] = None;
                    }
                    return true;
                }
            }
            for c in set_here {
                self.refs[c] = None;
            }
            self.rank[k - 1] = usize::MAX;
        }
        false
    }
}

// True when colors in F only join vertices of one class, making (M2)
// independent of the ordering.
fn m2_ordering_free(g: &ColoredGraph) -> bool {
    let f = f_sets(g).all;
    for v in 0..g.p() {
        for w in 0..g.p() {
            if f.contains(&g.c0(v, w)) && g.class0(v) != g.class0(w) {
                return false;
            }
        }
    }
    true
}

/// Searches all cpeos in lexicographic order and returns the strongest verdict:
/// `SymmetricCer` for the first ordering passing (M1) and (M2), else `Cer` for
/// the first passing (M1), else `CpeoOnly`, else `NotDecomposableColoring`.
pub fn classify_with_cap(g: &ColoredGraph, cap: usize) -> Result<CerVerdict> {
    let r = g.r();
    if r > cap {
        return Err(Error::TooManyClasses { r, cap });
    }
    let Some(first) = greedy_find_cpeo(g) else {
        return Ok(CerVerdict::NotDecomposableColoring);
    };
    let mut search = Search {
        g,
        rank: vec![usize::MAX; r],
        alive: vec![true; g.p()],
        order: Vec::new(),
        refs: vec![None; g.num_colors()],
    };
    let ordering_free = m2_ordering_free(g);
    let mut first_m1: Option<(ColorOrdering, M2Report)> = None;
    let mut symmetric: Option<ColorOrdering> = None;
    search.run(&mut |order| {
        let eta = ColorOrdering::new(order.to_vec(), r).expect("valid permutation");
        let m2 = check_m2(g, &eta);
        if m2.holds {
            symmetric = Some(eta);
            return true;
        }
        if first_m1.is_none() {
            first_m1 = Some((eta, m2));
        }
        ordering_free
    });
    if let Some(ordering) = symmetric {
        return Ok(CerVerdict::SymmetricCer { ordering });
    }
    if let Some((ordering, m2)) = first_m1 {
        return Ok(CerVerdict::Cer {
            ordering,
            m2_witness: m2.witness,
        });
    }
    let m1 = check_m1(g, &first);
    Ok(CerVerdict::CpeoOnly {
        ordering: first,
        m1_witness: m1.witness,
    })
}
