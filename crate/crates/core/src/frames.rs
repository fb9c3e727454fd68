//! Jordan frames of the diagonal block algebras.

use crate::color_space::ColorSpace;
use crate::error::{Error, Result};
use crate::linalg::{frob_inner, frob_norm, null_vector, sym_eigen_sorted};
use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::cmp::Ordering;

/// The restriction of the diagonal-block basis matrices to block `i`.
#[derive(Clone, Debug)]
pub struct DiagonalBlockAlgebra<T: Scalar> {
    block: usize,
    size: usize,
    basis: Vec<DMatrix<T>>,
    integer_basis: Option<Vec<DMatrix<i64>>>,
    orthonormal: Vec<DMatrix<T>>,
    space_indices: Vec<usize>,
}

impl<T: Scalar> DiagonalBlockAlgebra<T> {
    /// Block `i` (0-based) of a space.
    pub fn from_space(space: &ColorSpace<T>, i: usize) -> Self {
        let range = space.blocks().range(i);
        let n = range.len();
        let idx = space.diagonal_indices(i);
        let sub = |m: &DMatrix<T>| m.view((range.start, range.start), (n, n)).into_owned();
        let basis: Vec<DMatrix<T>> = idx.iter().map(|&k| sub(&space.basis()[k])).collect();
        let integer_basis = space.integer_basis().map(|ints| {
            idx.iter()
                .map(|&k| {
                    ints[k]
                        .view((range.start, range.start), (n, n))
                        .into_owned()
                })
                .collect()
        });
        Self::assemble(i, n, basis, integer_basis, idx)
    }

    /// Algebra from explicit `n × n` basis matrices.
    pub fn from_matrices(block: usize, basis: Vec<DMatrix<T>>) -> Result<Self> {
        let n = basis
            .first()
            .map(|b| b.nrows())
            .ok_or_else(|| Error::InvalidSpace("empty basis".into()))?;
        let integral = basis
            .iter()
            .all(|b| b.iter().all(|x| *x == T::zero() || *x == T::one()));
        let ints = integral.then(|| {
            basis
                .iter()
                .map(|b| b.map(|x| x.to_f64_lossy() as i64))
                .collect()
        });
        let idx = (0..basis.len()).collect();
        Ok(Self::assemble(block, n, basis, ints, idx))
    }

    fn assemble(
        block: usize,
        size: usize,
        basis: Vec<DMatrix<T>>,
        integer_basis: Option<Vec<DMatrix<i64>>>,
        space_indices: Vec<usize>,
    ) -> Self {
        let mut orthonormal: Vec<DMatrix<T>> = Vec::new();
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
        // exact arithmetic only for disjoint 0/1 patterns
        let integer_basis = integer_basis.filter(|ints| {
            let mut used = vec![false; size * size];
            ints.iter().all(|b| {
                b.iter().enumerate().all(|(idx, &e)| {
                    if e == 0 {
                        true
                    } else if e == 1 && !used[idx] {
                        used[idx] = true;
                        true
                    } else {
                        false
                    }
                })
            })
        });
        DiagonalBlockAlgebra {
            block,
            size,
            basis,
            integer_basis,
            orthonormal,
            space_indices,
        }
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of basis matrices `d` (equals the frame size when commutative).
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[DMatrix<T>] {
        &self.basis
    }

    /// Indices of the basis matrices in the enclosing space.
    pub fn space_indices(&self) -> &[usize] {
        &self.space_indices
    }

    pub fn residual(&self, x: &DMatrix<T>) -> T {
        let nx = frob_norm(x);
        if nx == T::zero() {
            return T::zero();
        }
        let mut r = x.clone();
        for o in &self.orthonormal {
            r -= o * frob_inner(x, o);
        }
        frob_norm(&r) / nx
    }

    pub fn is_commutative(&self, tol: T) -> bool {
        let d = self.len();
        if let Some(ints) = &self.integer_basis {
            return (0..d).all(|k| (k + 1..d).all(|h| &ints[k] * &ints[h] == &ints[h] * &ints[k]));
        }
        (0..d).all(|k| {
            (k + 1..d).all(|h| {
                let a = &self.basis[k] * &self.basis[h];
                let b = &self.basis[h] * &self.basis[k];
                frob_norm(&(&a - &b)) <= tol * frob_norm(&a).max(T::one())
            })
        })
    }
}

/// Intersection numbers `η_{kh}^c` with `½(A_k A_h + A_h A_k) = Σ_c η_{kh}^c A_c`.
#[derive(Clone, Debug)]
pub struct IntersectionData<T: Scalar> {
    d: usize,
    numbers: Vec<T>,
    exact: Option<Vec<Ratio<i64>>>,
    matrices: Vec<DMatrix<T>>,
}

impl<T: Scalar> IntersectionData<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    /// `η_{kh}^c`, 0-based indices.
    pub fn number(&self, k: usize, h: usize, c: usize) -> T {
        self.numbers[(k * self.d + h) * self.d + c]
    }

    /// Exact value when the algebra has a disjoint 0/1 basis.
    pub fn exact(&self, k: usize, h: usize, c: usize) -> Option<Ratio<i64>> {
        self.exact
            .as_ref()
            .map(|e| e[(k * self.d + h) * self.d + c])
    }

    /// Intersection matrices `L_n` with `(L_n)_{ℓm} = η_{nm}^ℓ`.
    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.matrices
    }
}

/// Computes intersection numbers, exactly when the basis is a disjoint 0/1 pattern.
pub fn intersection_numbers<T: Scalar>(
    alg: &DiagonalBlockAlgebra<T>,
) -> Result<IntersectionData<T>> {
    let d = alg.len();
    let mut numbers = vec![T::zero(); d * d * d];
    let mut exact_out = None;
    if let Some(ints) = &alg.integer_basis {
        let n = alg.size;
        let first: Vec<usize> = ints
            .iter()
            .map(|b| b.iter().position(|&e| e != 0).expect("nonzero basis"))
            .collect();
        let mut exact = vec![Ratio::from_integer(0i64); d * d * d];
        for k in 0..d {
            for h in 0..d {
                let s = &ints[k] * &ints[h] + &ints[h] * &ints[k];
                let mut rec = DMatrix::<i64>::zeros(n, n);
                for c in 0..d {
                    let v = s.as_slice()[first[c]];
                    exact[(k * d + h) * d + c] = Ratio::new(v, 2);
                    rec += &ints[c] * v;
                }
                if rec != s {
                    return Err(Error::ProductLeavesSpan {
                        block: alg.block + 1,
                        detail: format!("symmetrized product of basis {} and {}", k + 1, h + 1),
                    });
                }
            }
        }
        for (x, e) in numbers.iter_mut().zip(&exact) {
            *x = T::lit(*e.numer() as f64 / *e.denom() as f64);
        }
        exact_out = Some(exact);
    } else {
        let gram = DMatrix::from_fn(d, d, |a, b| frob_inner(&alg.basis[a], &alg.basis[b]));
        let chol = nalgebra::Cholesky::new(gram)
            .ok_or_else(|| Error::InvalidSpace("block basis is dependent".into()))?;
        let tol = T::default_tol();
        for k in 0..d {
            for h in 0..d {
                let s =
                    (&alg.basis[k] * &alg.basis[h] + &alg.basis[h] * &alg.basis[k]) * T::lit(0.5);
                let rhs = DVector::from_iterator(d, alg.basis.iter().map(|b| frob_inner(&s, b)));
                let coef = chol.solve(&rhs);
                let mut rec = s.clone();
                for c in 0..d {
                    rec -= &alg.basis[c] * coef[c];
                    numbers[(k * d + h) * d + c] = coef[c];
                }
                if frob_norm(&rec) > tol * frob_norm(&s).max(T::one()) * T::lit(100.0) {
                    return Err(Error::ProductLeavesSpan {
                        block: alg.block + 1,
                        detail: format!("symmetrized product of basis {} and {}", k + 1, h + 1),
                    });
                }
            }
        }
    }
    let matrices = (0..d)
        .map(|nn| DMatrix::from_fn(d, d, |l, m| numbers[(nn * d + m) * d + l]))
        .collect();
    Ok(IntersectionData {
        d,
        numbers,
        exact: exact_out,
        matrices,
    })
}

/// Primitive idempotents of one diagonal block.
#[derive(Clone, Debug, Serialize)]
pub struct JordanFrame<T: Scalar> {
    pub block: usize,
    #[serde(serialize_with = "ser_mats")]
    pub projections: Vec<DMatrix<T>>,
    pub ranks: Vec<usize>,
    #[serde(serialize_with = "ser_opt_mat")]
    pub p_matrix: Option<DMatrix<T>>,
    #[serde(serialize_with = "ser_opt_mat")]
    pub q_matrix: Option<DMatrix<T>>,
}

fn rows<T: Scalar>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_f64_lossy()).collect())
        .collect()
}

fn ser_mats<T: Scalar, S: serde::Serializer>(
    v: &[DMatrix<T>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rows))
}

fn ser_opt_mat<T: Scalar, S: serde::Serializer>(
    v: &Option<DMatrix<T>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(m) => s.serialize_some(&rows(m)),
        None => s.serialize_none(),
    }
}

impl<T: Scalar> JordanFrame<T> {
    pub fn d(&self) -> usize {
        self.projections.len()
    }

    /// Same frame in reversed order.
    pub fn reversed(&self) -> Self {
        let d = self.d();
        let rev = |m: &DMatrix<T>, cols: bool| {
            if cols {
                DMatrix::from_fn(m.nrows(), d, |a, b| m[(a, d - 1 - b)])
            } else {
                DMatrix::from_fn(d, m.ncols(), |a, b| m[(d - 1 - a, b)])
            }
        };
        JordanFrame {
            block: self.block,
            projections: self.projections.iter().rev().cloned().collect(),
            ranks: self.ranks.iter().rev().copied().collect(),
            p_matrix: self.p_matrix.as_ref().map(|p| rev(p, true)),
            q_matrix: self.q_matrix.as_ref().map(|q| rev(q, false)),
        }
    }
}

fn weighted_diag<T: Scalar>(c: &DMatrix<T>) -> T {
    (0..c.nrows()).fold(T::zero(), |acc, v| {
        acc + T::from_usize_lossy(v + 1) * c[(v, v)]
    })
}

fn cmp_tol<T: Scalar>(a: T, b: T) -> Ordering {
    let tol = T::lit(1e-8) * a.abs().max(b.abs()).max(T::one());
    if (a - b).abs() <= tol {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Deterministic ordering: rank ascending, then `Σ (v+1) c_vv` ascending,
/// then row-major entries descending.
fn frame_order<T: Scalar>(projections: &[DMatrix<T>], ranks: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..projections.len()).collect();
    idx.sort_by(|&a, &b| {
        ranks[a]
            .cmp(&ranks[b])
            .then_with(|| {
                cmp_tol(
                    weighted_diag(&projections[a]),
                    weighted_diag(&projections[b]),
                )
            })
            .then_with(|| {
                for (x, y) in projections[a]
                    .transpose()
                    .iter()
                    .zip(projections[b].transpose().iter())
                {
                    match cmp_tol(*y, *x) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    });
    idx
}

fn trace_rank<T: Scalar>(c: &DMatrix<T>) -> Result<usize> {
    let tr = c.trace().to_f64_lossy();
    let r = tr.round();
    let tol = (T::default_tol().to_f64_lossy() * 10.0).max(1e-6);
    if (tr - r).abs() > tol || r < 1.0 {
        return Err(Error::Frame(format!(
            "projection trace {tr} is not a positive integer"
        )));
    }
    Ok(r as usize)
}

fn finish_frame<T: Scalar>(
    alg: &DiagonalBlockAlgebra<T>,
    projections: Vec<DMatrix<T>>,
    pq: Option<(DMatrix<T>, DMatrix<T>)>,
) -> Result<JordanFrame<T>> {
    let ranks = projections
        .iter()
        .map(trace_rank)
        .collect::<Result<Vec<_>>>()?;
    let order = frame_order(&projections, &ranks);
    let d = projections.len();
    let (p_matrix, q_matrix) = match pq {
        Some((p, q)) => (
            Some(DMatrix::from_fn(p.nrows(), d, |m, a| p[(m, order[a])])),
            Some(DMatrix::from_fn(d, q.ncols(), |a, m| q[(order[a], m)])),
        ),
        None => (None, None),
    };
    Ok(JordanFrame {
        block: alg.block,
        projections: order.iter().map(|&a| projections[a].clone()).collect(),
        ranks: order.iter().map(|&a| ranks[a]).collect(),
        p_matrix,
        q_matrix,
    })
}

/// Options for frame construction.
#[derive(Clone, Copy, Debug)]
pub struct FrameOptions {
    pub seed: u64,
    pub max_retries: usize,
    /// Relative minimum eigen-gap for the Random Method.
    pub gap_tol: f64,
    /// Relative clustering threshold for the generic-element method.
    pub cluster_tol: f64,
    /// Residual tolerance for frame verification.
    pub tol: f64,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            seed: 0,
            max_retries: 20,
            gap_tol: 1e-8,
            cluster_tol: 1e-6,
            tol: 1e-10,
        }
    }
}

/// The Random Method for commutative blocks: a random combination of the
/// intersection matrices has simple spectrum; its eigenvectors are the rows of `Q`.
pub fn random_method<T: Scalar>(
    alg: &DiagonalBlockAlgebra<T>,
    data: &IntersectionData<T>,
    opts: &FrameOptions,
) -> Result<JordanFrame<T>> {
    let tol = T::lit(opts.tol);
    if !alg.is_commutative(tol) {
        return Err(Error::NotCommutative(alg.block + 1));
    }
    let d = alg.len();
    let n = T::from_usize_lossy(alg.size);
    let check = T::lit((opts.tol * 100.0).max(1e-8));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    'attempt: for _ in 0..opts.max_retries.max(1) {
        let x: Vec<T> = (0..d).map(|_| T::lit(rng.random::<f64>())).collect();
        let mut l = DMatrix::zeros(d, d);
        for (xn, ln) in x.iter().zip(data.matrices()) {
            l += ln * *xn;
        }
        let Some(eig) = l.clone().schur().eigenvalues() else {
            continue;
        };
        let mut ev: Vec<T> = eig.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let radius = ev.iter().fold(T::one(), |m, v| m.max(v.abs()));
        if ev
            .windows(2)
            .any(|w| w[1] - w[0] <= T::lit(opts.gap_tol) * radius)
        {
            continue;
        }
        let ident = DMatrix::<T>::identity(d, d);
        let vs: Vec<DVector<T>> = ev
            .iter()
            .map(|&lam| null_vector(&(&l - &ident * lam)))
            .collect();
        let mut p = DMatrix::zeros(d, d);
        for (a, v) in vs.iter().enumerate() {
            let vv = v.dot(v);
            for (m, lm) in data.matrices().iter().enumerate() {
                let lv = lm * v;
                p[(m, a)] = lv.dot(v) / vv;
                let res = (&lv - v * p[(m, a)]).norm();
                if res > check * lm.norm().max(T::one()) {
                    continue 'attempt;
                }
            }
        }
        let mut q = DMatrix::zeros(d, d);
        for (a, v) in vs.iter().enumerate() {
            let scale = v.dot(&p.column(a)) / n;
            if scale.abs() <= T::lit(1e-12) {
                continue 'attempt;
            }
            for m in 0..d {
                q[(a, m)] = v[m] / scale;
            }
        }
        let ni = DMatrix::<T>::identity(d, d) * n;
        let qp = frob_norm(&(&q * &p - &ni)) / n;
        let pq = frob_norm(&(&p * &q - &ni)) / n;
        if qp > check || pq > check {
            continue;
        }
        let projections: Vec<DMatrix<T>> = (0..d)
            .map(|a| {
                let mut c = DMatrix::zeros(alg.size, alg.size);
                for m in 0..d {
                    c += &alg.basis[m] * (q[(a, m)] / n);
                }
                c
            })
            .collect();
        let frame = finish_frame(alg, projections, Some((p, q)))?;
        let report = verify_frame(&frame, alg, tol);
        if !report.passes {
            return Err(Error::Frame(format!(
                "Random Method frame failed verification: {report:?}"
            )));
        }
        return Ok(frame);
    }
    Err(Error::SpectrumNotSimple(opts.max_retries))
}

fn spectral_projections<T: Scalar>(x: &DMatrix<T>, cluster_tol: f64) -> Vec<DMatrix<T>> {
    let (vals, vecs) = sym_eigen_sorted(x);
    let n = vals.len();
    let scale = vals.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..n {
        if vals[i] - vals[i - 1] > T::lit(cluster_tol) * scale {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(i);
    }
    groups
        .iter()
        .map(|g| {
            let mut c = DMatrix::zeros(n, n);
            for &i in g {
                let v = vecs.column(i);
                c += v * v.transpose();
            }
            c
        })
        .collect()
}

fn random_block_element<T: Scalar>(alg: &DiagonalBlockAlgebra<T>, seed: u64) -> DMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DMatrix::zeros(alg.size, alg.size);
    for b in &alg.basis {
        let z: f64 = StandardNormal.sample(&mut rng);
        x += b * T::lit(z);
    }
    (&x + x.transpose()) * T::lit(0.5)
}

/// Frame from the spectral decomposition of a random element of the block,
/// checked against a second independent draw.
pub fn generic_element_frame<T: Scalar>(
    alg: &DiagonalBlockAlgebra<T>,
    opts: &FrameOptions,
) -> Result<JordanFrame<T>> {
    let tol = T::lit(opts.tol);
    let first = spectral_projections(&random_block_element(alg, opts.seed), opts.cluster_tol);
    let second = spectral_projections(
        &random_block_element(alg, opts.seed ^ 0x9e37_79b9_7f4a_7c15),
        opts.cluster_tol,
    );
    if first.len() != second.len() {
        return Err(Error::Frame(format!(
            "unstable frame size across draws ({} vs {})",
            first.len(),
            second.len()
        )));
    }
    let mut r1 = first.iter().map(trace_rank).collect::<Result<Vec<_>>>()?;
    let mut r2 = second.iter().map(trace_rank).collect::<Result<Vec<_>>>()?;
    r1.sort_unstable();
    r2.sort_unstable();
    if r1 != r2 {
        return Err(Error::Frame(
            "unstable projection ranks across draws".into(),
        ));
    }
    if alg.is_commutative(tol) {
        // primitive idempotents are unique: the two frames must coincide
        for c in &second {
            let close = T::lit((opts.tol * 100.0).max(1e-8)) * T::from_usize_lossy(alg.size);
            if !first.iter().any(|e| frob_norm(&(e - c)) <= close) {
                return Err(Error::Frame(
                    "frames from two draws are incompatible".into(),
                ));
            }
        }
    }
    let frame = finish_frame(alg, first, None)?;
    let report = verify_frame(&frame, alg, T::lit(opts.tol.max(1e-9)));
    if !report.passes {
        return Err(Error::Frame(format!(
            "generic-element frame failed verification: {report:?}"
        )));
    }
    Ok(frame)
}

/// Random Method for commutative blocks (falling back to the generic-element
/// method when the spectrum is never simple), generic-element method otherwise.
pub fn frame_for_block<T: Scalar>(
    alg: &DiagonalBlockAlgebra<T>,
    opts: &FrameOptions,
) -> Result<JordanFrame<T>> {
    if alg.len() == 1 {
        let frame = finish_frame(alg, vec![DMatrix::identity(alg.size, alg.size)], None)?;
        let n = T::from_usize_lossy(alg.size);
        let scale = alg.basis[0][(0, 0)];
        return Ok(JordanFrame {
            p_matrix: Some(DMatrix::from_element(1, 1, scale)),
            q_matrix: Some(DMatrix::from_element(1, 1, n / scale)),
            ..frame
        });
    }
    if alg.is_commutative(T::lit(opts.tol)) {
        let data = intersection_numbers(alg)?;
        match random_method(alg, &data, opts) {
            Ok(f) => return Ok(f),
            Err(Error::SpectrumNotSimple(_)) => {}
            Err(e) => return Err(e),
        }
    }
    generic_element_frame(alg, opts)
}

/// Residuals of the frame invariants.
#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub idempotency: f64,
    pub orthogonality: f64,
    pub completeness: f64,
    pub span: f64,
    pub integrality: f64,
    /// `max(‖QP − nI‖, ‖PQ − nI‖) / n` when eigenmatrices are present.
    pub eigenmatrix: Option<f64>,
    /// Reconstruction `A_m = Σ_α P_{mα} c_α` when eigenmatrices are present.
    pub reconstruction: Option<f64>,
    pub passes: bool,
}

pub fn verify_frame<T: Scalar>(
    frame: &JordanFrame<T>,
    alg: &DiagonalBlockAlgebra<T>,
    tol: T,
) -> FrameReport {
    let n = alg.size;
    let cs = &frame.projections;
    let f = |x: T| x.to_f64_lossy();
    let idempotency = cs
        .iter()
        .map(|c| f(frob_norm(&(c * c - c))))
        .fold(0.0, f64::max);
    let mut orthogonality = 0.0f64;
    for (a, ca) in cs.iter().enumerate() {
        for cb in &cs[a + 1..] {
            orthogonality = orthogonality.max(f(frob_norm(&(ca * cb))));
        }
    }
    let mut sum = DMatrix::<T>::zeros(n, n);
    for c in cs {
        sum += c;
    }
    let completeness = if cs.first().is_some_and(|c| c.nrows() == n) {
        f(frob_norm(&(sum - DMatrix::identity(n, n))))
    } else {
        f64::INFINITY
    };
    let span = cs.iter().map(|c| f(alg.residual(c))).fold(0.0, f64::max);
    let integrality = cs
        .iter()
        .map(|c| {
            let t = f(c.trace());
            (t - t.round()).abs()
        })
        .fold(0.0, f64::max);
    let (eigenmatrix, reconstruction) = match (&frame.p_matrix, &frame.q_matrix) {
        (Some(p), Some(q)) if p.ncols() == cs.len() && p.nrows() == alg.len() => {
            let nn = T::from_usize_lossy(n);
            let id = DMatrix::<T>::identity(cs.len(), cs.len()) * nn;
            let e = f(frob_norm(&(q * p - &id)) / nn).max(f(frob_norm(&(p * q - &id)) / nn));
            let mut rec = 0.0f64;
            for (m, am) in alg.basis.iter().enumerate() {
                let mut x = am.clone();
                for (a, c) in cs.iter().enumerate() {
                    x -= c * p[(m, a)];
                }
                rec = rec.max(f(frob_norm(&x)));
            }
            (Some(e), Some(rec))
        }
        _ => (None, None),
    };
    let t = f(tol);
    let scale = (n as f64).max(1.0);
    let passes = idempotency <= t * scale
        && orthogonality <= t * scale
        && completeness <= t * scale
        && span <= t * scale
        && integrality <= t * scale
        && eigenmatrix.is_none_or(|e| e <= t * scale)
        && reconstruction.is_none_or(|e| e <= t * scale * 10.0);
    FrameReport {
        idempotency,
        orthogonality,
        completeness,
        span,
        integrality,
        eigenmatrix,
        reconstruction,
        passes,
    }
}
