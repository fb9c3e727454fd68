//! Matrix spaces with block structure and the Block-Cholesky axioms.

use crate::colored_graph::ColoredGraph;
use crate::error::{Error, Result};
use crate::linalg::{frob_inner, frob_norm, max_abs, min_eigenvalue, pivoted_cholesky};
use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Consecutive diagonal blocks of sizes `n_1, …, n_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockStructure {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockStructure {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidSpace("block sizes must be positive".into()));
        }
        let mut offsets = vec![0];
        for s in &sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        Ok(BlockStructure { sizes, offsets })
    }

    pub fn r(&self) -> usize {
        self.sizes.len()
    }

    pub fn p(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Index range of block `i` (0-based).
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Block containing a 0-based index.
    pub fn block_of(&self, idx: usize) -> usize {
        self.offsets[1..]
            .iter()
            .position(|&o| idx < o)
            .expect("index within p")
    }

    fn check(&self, x: &DMatrix<impl Scalar>) -> Result<()> {
        if x.nrows() != self.p() || x.ncols() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{} matrix, got {}x{}",
                self.p(),
                self.p(),
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }

    /// Lower block triangle, diagonal blocks included.
    pub fn block_tri<T: Scalar>(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        self.check(x)?;
        let p = self.p();
        Ok(DMatrix::from_fn(p, p, |a, b| {
            if self.block_of(a) >= self.block_of(b) {
                x[(a, b)]
            } else {
                T::zero()
            }
        }))
    }

    /// Diagonal blocks only.
    pub fn block_diag<T: Scalar>(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        self.check(x)?;
        let p = self.p();
        Ok(DMatrix::from_fn(p, p, |a, b| {
            if self.block_of(a) == self.block_of(b) {
                x[(a, b)]
            } else {
                T::zero()
            }
        }))
    }

    fn block_tri_int(&self, x: &DMatrix<i64>) -> DMatrix<i64> {
        let p = self.p();
        DMatrix::from_fn(p, p, |a, b| {
            if self.block_of(a) >= self.block_of(b) {
                x[(a, b)]
            } else {
                0
            }
        })
    }
}

/// Where a basis matrix lives in the block decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Support {
    /// Inside diagonal block `i` (0-based).
    Diagonal(usize),
    /// Inside strip `L_i`: blocks `(j,i)` and `(i,j)` with `j > i`.
    Strip(usize),
}

/// Outcome of an axiom check.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub holds: bool,
    pub worst_residual: f64,
    /// First failing pair of basis indices (0-based).
    pub witness: Option<(usize, usize)>,
}

/// JSON form of a raw-basis space: row-major `p·p` basis matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub block_sizes: Vec<usize>,
    pub basis: Vec<Vec<f64>>,
}

/// Linear space of symmetric matrices with a block structure.
#[derive(Clone, Debug)]
pub struct ColorSpace<T: Scalar> {
    blocks: BlockStructure,
    basis: Vec<DMatrix<T>>,
    support: Vec<Support>,
    integer_basis: Option<Vec<DMatrix<i64>>>,
    orthonormal: Vec<DMatrix<T>>,
    disjoint: bool,
}

fn classify_support<T: Scalar>(
    b: &DMatrix<T>,
    blocks: &BlockStructure,
    thresh: T,
) -> Result<Support> {
    let p = blocks.p();
    let mut diag: Option<usize> = None;
    let mut strip: Option<usize> = None;
    let mut mixed = false;
    for a in 0..p {
        for c in 0..=a {
            if b[(a, c)].abs() <= thresh {
                continue;
            }
            let (ba, bc) = (blocks.block_of(a), blocks.block_of(c));
            if ba == bc {
                mixed |= strip.is_some() || diag.is_some_and(|d| d != ba);
                diag = Some(ba);
            } else {
                let i = ba.min(bc);
                mixed |= diag.is_some() || strip.is_some_and(|s| s != i);
                strip = Some(i);
            }
        }
    }
    if mixed {
        return Err(Error::InvalidSpace(
            "basis matrix is not contained in a single diagonal block or strip".into(),
        ));
    }
    match (diag, strip) {
        (Some(i), None) => Ok(Support::Diagonal(i)),
        (None, Some(i)) => Ok(Support::Strip(i)),
        _ => Err(Error::InvalidSpace("zero basis matrix".into())),
    }
}

fn supports_disjoint<T: Scalar>(basis: &[DMatrix<T>]) -> bool {
    let p = basis.first().map_or(0, |b| b.nrows());
    let mut used = vec![false; p * p];
    for b in basis {
        for (idx, x) in b.iter().enumerate() {
            if *x != T::zero() {
                if used[idx] {
                    return false;
                }
                used[idx] = true;
            }
        }
    }
    true
}

impl<T: Scalar> ColorSpace<T> {
    /// Space spanned by the `J^k` of a relabeled graph whose vertex classes
    /// occupy consecutive index blocks in class order.
    pub fn from_graph(g: &ColoredGraph) -> Result<Self> {
        let mut next = 1;
        for class in g.vertex_classes() {
            for &v in class {
                if v != next {
                    return Err(Error::InvalidSpace(
                        "vertex classes do not occupy consecutive index blocks; relabel first"
                            .into(),
                    ));
                }
                next += 1;
            }
        }
        let blocks = BlockStructure::new(g.vertex_classes().iter().map(|c| c.len()).collect())?;
        let ints: Vec<DMatrix<i64>> = g.basis_matrices().into_iter().map(|b| b.matrix).collect();
        let basis: Vec<DMatrix<T>> = ints.iter().map(|m| m.map(|x| T::lit(x as f64))).collect();
        let support = basis
            .iter()
            .map(|b| classify_support(b, &blocks, T::zero()))
            .collect::<Result<Vec<_>>>()?;
        let orthonormal = basis.iter().map(|b| b / frob_norm(b)).collect();
        Ok(ColorSpace {
            blocks,
            basis,
            support,
            integer_basis: Some(ints),
            orthonormal,
            disjoint: true,
        })
    }

    /// Space spanned by arbitrary symmetric matrices.
    pub fn from_basis(basis: Vec<DMatrix<T>>, block_sizes: Vec<usize>) -> Result<Self> {
        let blocks = BlockStructure::new(block_sizes)?;
        let p = blocks.p();
        if basis.is_empty() {
            return Err(Error::InvalidSpace("empty basis".into()));
        }
        let tol = T::default_tol();
        for (k, b) in basis.iter().enumerate() {
            blocks.check(b)?;
            if frob_norm(&(b - b.transpose())) > tol * frob_norm(b).max(T::one()) {
                return Err(Error::InvalidSpace(format!(
                    "basis matrix {} is not symmetric",
                    k + 1
                )));
            }
        }
        let support = basis
            .iter()
            .map(|b| classify_support(b, &blocks, tol * max_abs(b)))
            .collect::<Result<Vec<_>>>()?;
        // Gram-Schmidt in the given order; independence via pivoted Cholesky of the Gram matrix
        let n = basis.len();
        let gram = DMatrix::from_fn(n, n, |a, b| frob_inner(&basis[a], &basis[b]));
        if pivoted_cholesky(&gram, tol).pivots.len() < n {
            return Err(Error::InvalidSpace(
                "basis matrices are linearly dependent".into(),
            ));
        }
        let mut orthonormal: Vec<DMatrix<T>> = Vec::with_capacity(n);
        for b in &basis {
            let mut v = b.clone();
            for _ in 0..2 {
                for o in &orthonormal {
                    let c = frob_inner(&v, o);
                    v -= o * c;
                }
            }
            let nv = frob_norm(&v);
            orthonormal.push(v / nv);
        }
        let disjoint = supports_disjoint(&basis);
        let integer_basis = if basis.iter().all(|b| b.iter().all(|x| *x == x.round())) && disjoint {
            Some(
                basis
                    .iter()
                    .map(|b| b.map(|x| x.to_f64_lossy() as i64))
                    .collect(),
            )
        } else {
            None
        };
        let space = ColorSpace {
            blocks,
            basis,
            support,
            integer_basis,
            orthonormal,
            disjoint,
        };
        if !space.member(&DMatrix::identity(p, p), tol) {
            return Err(Error::InvalidSpace("identity is not in the span".into()));
        }
        Ok(space)
    }

    pub fn from_spec(spec: &SpaceSpec) -> Result<Self> {
        let p: usize = spec.block_sizes.iter().sum();
        let basis = spec
            .basis
            .iter()
            .map(|v| {
                if v.len() != p * p {
                    return Err(Error::DimensionMismatch(format!(
                        "basis entry has {} numbers, expected {}",
                        v.len(),
                        p * p
                    )));
                }
                Ok(DMatrix::from_row_slice(p, p, v).map(T::lit))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_basis(basis, spec.block_sizes.clone())
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn p(&self) -> usize {
        self.blocks.p()
    }

    pub fn r(&self) -> usize {
        self.blocks.r()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DMatrix<T>] {
        &self.basis
    }

    pub fn support(&self) -> &[Support] {
        &self.support
    }

    /// Exact 0/1 basis for graph-derived (or integral disjoint-support) spaces.
    pub fn integer_basis(&self) -> Option<&[DMatrix<i64>]> {
        self.integer_basis.as_deref()
    }

    /// Orthonormalized basis (trace inner product).
    pub fn orthonormal(&self) -> &[DMatrix<T>] {
        &self.orthonormal
    }

    /// True when basis supports are pairwise disjoint.
    pub fn has_disjoint_supports(&self) -> bool {
        self.disjoint
    }

    /// Basis indices supported in diagonal block `i`.
    pub fn diagonal_indices(&self, i: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| self.support[k] == Support::Diagonal(i))
            .collect()
    }

    /// Basis indices supported in strip `L_i`.
    pub fn strip_indices(&self, i: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| self.support[k] == Support::Strip(i))
            .collect()
    }

    /// Basis indices of all diagonal-block colors (the set `F`).
    pub fn f_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| matches!(self.support[k], Support::Diagonal(_)))
            .collect()
    }

    /// `½ log det` of the basis Gram matrix: the log volume factor between
    /// coordinates in the given basis and orthonormal coordinates. Equals
    /// `Σ log ‖J^k‖_F` for disjoint supports.
    pub fn log_coordinate_volume(&self) -> T {
        let n = self.dim();
        let gram = DMatrix::from_fn(n, n, |a, b| frob_inner(&self.basis[a], &self.basis[b]));
        crate::linalg::log_det_pd(&gram).expect("independent basis") * T::lit(0.5)
    }

    /// Coordinates of the orthogonal projection onto the span.
    pub fn project(&self, x: &DMatrix<T>) -> DVector<T> {
        DVector::from_iterator(
            self.dim(),
            self.orthonormal.iter().map(|o| frob_inner(x, o)),
        )
    }

    /// Matrix with the given orthonormal coordinates.
    pub fn from_coordinates(&self, y: &DVector<T>) -> DMatrix<T> {
        let p = self.p();
        let mut x = DMatrix::zeros(p, p);
        for (o, c) in self.orthonormal.iter().zip(y.iter()) {
            x += o * *c;
        }
        x
    }

    /// Relative Frobenius residual of projecting `x` onto the span.
    pub fn membership_residual(&self, x: &DMatrix<T>) -> T {
        let nx = frob_norm(x);
        if nx == T::zero() {
            return T::zero();
        }
        let proj = self.from_coordinates(&self.project(x));
        frob_norm(&(x - proj)) / nx
    }

    pub fn member(&self, x: &DMatrix<T>, tol: T) -> bool {
        x.nrows() == self.p() && x.ncols() == self.p() && self.membership_residual(x) <= tol
    }

    /// Exact membership of an integer matrix in a disjoint 0/1 basis span.
    fn member_exact(&self, x: &DMatrix<i64>) -> bool {
        let ints = self.integer_basis.as_ref().expect("integer basis");
        let mut covered = vec![false; x.len()];
        for b in ints {
            let mut value: Option<i64> = None;
            for (idx, &e) in b.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                covered[idx] = true;
                let xv = x.as_slice()[idx];
                // basis entries are 0/1
                if e != 1 {
                    return false;
                }
                match value {
                    None => value = Some(xv),
                    Some(v) if v != xv => return false,
                    _ => {}
                }
            }
        }
        x.iter().zip(covered).all(|(&v, c)| c || v == 0)
    }

    fn integer_ok(&self) -> bool {
        self.integer_basis
            .as_ref()
            .is_some_and(|ints| ints.iter().all(|b| b.iter().all(|&e| e == 0 || e == 1)))
    }

    fn check_products(
        &self,
        pairs: &[(usize, usize)],
        tol: T,
        int_prod: impl Fn(&[DMatrix<i64>], usize, usize) -> DMatrix<i64>,
        num_prod: impl Fn(&[DMatrix<T>], usize, usize) -> DMatrix<T>,
    ) -> AxiomReport {
        let mut worst = 0.0f64;
        let mut witness = None;
        let exact = self.integer_ok();
        for &(k, h) in pairs {
            let res = if exact {
                let s = int_prod(self.integer_basis.as_ref().unwrap(), k, h);
                if self.member_exact(&s) {
                    0.0
                } else {
                    let sf = s.map(|x| T::lit(x as f64));
                    self.membership_residual(&sf)
                        .to_f64_lossy()
                        .max(f64::MIN_POSITIVE)
                }
            } else {
                let s = num_prod(&self.basis, k, h);
                self.membership_residual(&s).to_f64_lossy()
            };
            let fails = if exact {
                res > 0.0
            } else {
                res > tol.to_f64_lossy()
            };
            if fails && witness.is_none() {
                witness = Some((k, h));
            }
            worst = worst.max(res);
        }
        AxiomReport {
            holds: witness.is_none(),
            worst_residual: worst,
            witness,
        }
    }

    /// (Z1) via polarization: `BT(J^k)BT(J^h)ᵀ + BT(J^h)BT(J^k)ᵀ` in the span.
    pub fn check_z1(&self, tol: T) -> AxiomReport {
        let n = self.dim();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k..n).map(move |h| (k, h))).collect();
        let blocks = &self.blocks;
        let bt_int: Vec<DMatrix<i64>> = self
            .integer_basis
            .as_ref()
            .map(|ints| ints.iter().map(|b| blocks.block_tri_int(b)).collect())
            .unwrap_or_default();
        let bt_num: Vec<DMatrix<T>> = self
            .basis
            .iter()
            .map(|b| blocks.block_tri(b).expect("sized"))
            .collect();
        self.check_products(
            &pairs,
            tol,
            |_, k, h| {
                let a = &bt_int[k] * bt_int[h].transpose();
                &a + a.transpose()
            },
            |_, k, h| {
                let a = &bt_num[k] * bt_num[h].transpose();
                &a + a.transpose()
            },
        )
    }

    /// (Z2): `J^k J^h` in the span for all diagonal-block colors `k, h`.
    pub fn check_z2(&self, tol: T) -> AxiomReport {
        let f = self.f_indices();
        let pairs: Vec<(usize, usize)> = f
            .iter()
            .flat_map(|&k| f.iter().map(move |&h| (k, h)))
            .collect();
        self.check_products(
            &pairs,
            tol,
            |b, k, h| &b[k] * &b[h],
            |b, k, h| &b[k] * &b[h],
        )
    }

    /// Products `BT(J^k)·BT(J^h)` stay in the span of `{BT(J^c)}`.
    pub fn check_block_tri_closure(&self, tol: T) -> AxiomReport {
        let n = self.dim();
        let bt: Vec<DMatrix<T>> = self
            .basis
            .iter()
            .map(|b| self.blocks.block_tri(b).expect("sized"))
            .collect();
        let gram = DMatrix::from_fn(n, n, |a, b| frob_inner(&bt[a], &bt[b]));
        let chol = nalgebra::Cholesky::new(gram).expect("independent block-triangular parts");
        let mut worst = 0.0f64;
        let mut witness = None;
        for k in 0..n {
            for h in 0..n {
                let prod = &bt[k] * &bt[h];
                let np = frob_norm(&prod);
                if np == T::zero() {
                    continue;
                }
                let rhs = DVector::from_iterator(n, bt.iter().map(|b| frob_inner(&prod, b)));
                let coef = chol.solve(&rhs);
                let mut rec = prod.clone();
                for (b, c) in bt.iter().zip(coef.iter()) {
                    rec -= b * *c;
                }
                let res = (frob_norm(&rec) / np).to_f64_lossy();
                if res > tol.to_f64_lossy() && witness.is_none() {
                    witness = Some((k, h));
                }
                worst = worst.max(res);
            }
        }
        AxiomReport {
            holds: witness.is_none(),
            worst_residual: worst,
            witness,
        }
    }

    /// Random element with standard-normal orthonormal coordinates; when
    /// `positive_definite`, shifted by the smallest integer multiple of `I`
    /// making the minimum eigenvalue at least 0.1.
    pub fn random_element(&self, seed: u64, positive_definite: bool) -> DMatrix<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                T::lit(z)
            }),
        );
        let mut x = self.from_coordinates(&y);
        x = (&x + x.transpose()) * T::lit(0.5);
        if positive_definite {
            let m = min_eigenvalue(&x);
            let target = T::lit(0.1);
            if m < target {
                let t = (target - m).ceil();
                x += DMatrix::identity(self.p(), self.p()) * t;
            }
        }
        x
    }

    /// Same space with all matrices converted to another scalar type.
    pub fn cast<U: Scalar>(&self) -> ColorSpace<U> {
        let conv = |m: &DMatrix<T>| m.map(|x| U::lit(x.to_f64_lossy()));
        ColorSpace {
            blocks: self.blocks.clone(),
            basis: self.basis.iter().map(conv).collect(),
            support: self.support.clone(),
            integer_basis: self.integer_basis.clone(),
            orthonormal: self.orthonormal.iter().map(conv).collect(),
            disjoint: self.disjoint,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_ops_identity() {
        let b = BlockStructure::new(vec![2, 1]).unwrap();
        let i = DMatrix::<f64>::identity(3, 3);
        assert_eq!(b.block_diag(&i).unwrap(), i);
        assert_eq!(b.block_tri(&i).unwrap(), i);
        let x = DMatrix::from_fn(3, 3, |a, c| (a + c) as f64);
        let bt = b.block_tri(&x).unwrap();
        assert_eq!(&bt + bt.transpose() - b.block_diag(&x).unwrap(), x);
        assert!(b.block_tri(&DMatrix::<f64>::zeros(2, 2)).is_err());
    }

    #[test]
    fn straddling_basis_rejected() {
        let mut m = DMatrix::<f64>::zeros(2, 2);
        m[(0, 0)] = 1.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        let r = ColorSpace::from_basis(vec![m, DMatrix::identity(2, 2)], vec![1, 1]);
        assert!(r.is_err());
    }

    #[test]
    fn full_sym_space() {
        let mut basis = Vec::new();
        for a in 0..3 {
            for c in 0..=a {
                let mut m = DMatrix::<f64>::zeros(3, 3);
                m[(a, c)] = 1.0;
                m[(c, a)] = 1.0;
                basis.push(m);
            }
        }
        let s = ColorSpace::from_basis(basis, vec![3]).unwrap();
        assert_eq!(s.dim(), 6);
        assert!(s.check_z1(1e-10).holds);
    }

    #[test]
    fn identity_required() {
        let mut m = DMatrix::<f64>::zeros(2, 2);
        m[(0, 0)] = 1.0;
        assert!(ColorSpace::from_basis(vec![m], vec![2]).is_err());
    }
}
