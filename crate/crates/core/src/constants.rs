//! Structure constants via the Gram-Cholesky method.

use crate::color_space::ColorSpace;
use crate::error::{Error, Result};
use crate::frames::JordanFrame;
use crate::linalg::{
    frob_norm, integer_rank, log_det_pd, pivoted_cholesky_scaled, sym_eigen_sorted,
};
use crate::scalar::Scalar;
use nalgebra::DMatrix;
use serde::Serialize;

/// Orthonormal factor `W` (`n × μ`) with `W Wᵀ = c`, `Wᵀ W = I`.
pub fn projection_factor<T: Scalar>(c: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (vals, vecs) = sym_eigen_sorted(c);
    let tol = T::lit(1e-6);
    for v in &vals {
        if v.abs() > tol && (*v - T::one()).abs() > tol {
            return Err(Error::NotProjection(format!(
                "eigenvalue {v} is not 0 or 1"
            )));
        }
    }
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] >= T::lit(0.5))
        .rev()
        .collect();
    let mut w = DMatrix::zeros(c.nrows(), keep.len());
    for (col, &i) in keep.iter().enumerate() {
        w.set_column(col, &vecs.column(i));
    }
    Ok(w)
}

/// Basis matrices of the strip `L_i` (0-based block).
pub fn l_space_basis<T: Scalar>(space: &ColorSpace<T>, i: usize) -> Vec<&DMatrix<T>> {
    space
        .strip_indices(i)
        .into_iter()
        .map(|k| &space.basis()[k])
        .collect()
}

/// Where a spanning element of an H-space comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpanSource {
    /// `B_t c_α` for strip basis index `t` of the space.
    Strip(usize),
    /// `c_{>α} A_k c_α` for diagonal basis index `k` of the space.
    Upper(usize),
}

/// Pivoted basis of `H_{i,α}`.
#[derive(Clone, Debug)]
pub struct HSpaceBasis<T: Scalar> {
    pub block: usize,
    pub alpha: usize,
    pub mu: usize,
    /// Orthonormal factor of `c_α`, embedded as `p × μ`.
    pub w: DMatrix<T>,
    pub spanning: Vec<SpanSource>,
    /// Indices into `spanning` selected by the pivoted Cholesky.
    pub pivots: Vec<usize>,
    /// Compressed factors `Û` (`p × μ`) of the pivots.
    pub factors: Vec<DMatrix<T>>,
    /// Gram matrix `G̃` of the pivots.
    pub gram: DMatrix<T>,
    gram_l: DMatrix<T>,
}

impl<T: Scalar> HSpaceBasis<T> {
    pub fn m(&self) -> usize {
        self.pivots.len()
    }

    /// Unit vector `ẽ = c_α / √μ` as a `p × p` matrix.
    pub fn e_tilde(&self) -> DMatrix<T> {
        &self.w * self.w.transpose() / T::from_usize_lossy(self.mu).sqrt()
    }

    /// Orthonormal basis `f̃_γ` of `H_{i,α}` (`p × p` matrices).
    pub fn orthonormal(&self) -> Vec<DMatrix<T>> {
        let m = self.m();
        let linv = self
            .gram_l
            .clone()
            .solve_lower_triangular(&DMatrix::identity(m, m))
            .expect("nonsingular factor");
        let wt = self.w.transpose();
        let us: Vec<DMatrix<T>> = self.factors.iter().map(|u| u * &wt).collect();
        (0..m)
            .map(|g| {
                let mut f = DMatrix::zeros(self.w.nrows(), self.w.nrows());
                for (k, u) in us.iter().enumerate() {
                    f += u * linv[(g, k)];
                }
                f
            })
            .collect()
    }
}

fn embed<T: Scalar>(p: usize, offset: usize, m: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::zeros(p, m.ncols());
    out.view_mut((offset, 0), (m.nrows(), m.ncols()))
        .copy_from(m);
    out
}

fn embed_square<T: Scalar>(p: usize, offset: usize, m: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::zeros(p, p);
    out.view_mut((offset, offset), (m.nrows(), m.ncols()))
        .copy_from(m);
    out
}

/// Builds `H_{i,α}` for frame index `alpha` (0-based) of block `i`.
pub fn h_space<T: Scalar>(
    space: &ColorSpace<T>,
    frame: &JordanFrame<T>,
    i: usize,
    alpha: usize,
    commutative: bool,
    rank_tol: T,
) -> Result<HSpaceBasis<T>> {
    let p = space.p();
    let off = space.blocks().range(i).start;
    let c = &frame.projections[alpha];
    let w_hat = projection_factor(c)?;
    let mu = w_hat.ncols();
    let w = embed(p, off, &w_hat);
    let mut spanning = Vec::new();
    let mut all: Vec<DMatrix<T>> = Vec::new();
    let mut scale = T::zero();
    for t in space.strip_indices(i) {
        spanning.push(SpanSource::Strip(t));
        all.push(&space.basis()[t] * &w);
        scale = scale.max(frob_norm(&space.basis()[t]).powi(2));
    }
    if !commutative {
        let n = c.nrows();
        let mut upper = DMatrix::zeros(n, n);
        for cb in &frame.projections[alpha + 1..] {
            upper += cb;
        }
        let upper = embed_square(p, off, &upper);
        for k in space.diagonal_indices(i) {
            spanning.push(SpanSource::Upper(k));
            all.push(&upper * &space.basis()[k] * &w);
            scale = scale.max(frob_norm(&space.basis()[k]).powi(2));
        }
    }
    let q = all.len();
    let gram_all = DMatrix::from_fn(q, q, |a, b| crate::linalg::frob_inner(&all[a], &all[b]));
    let pc = pivoted_cholesky_scaled(&gram_all, rank_tol, scale);
    let integral = gram_all
        .iter()
        .all(|x| (*x - x.round()).abs() < T::lit(1e-9));
    if integral && q > 0 {
        let ints: Vec<Vec<i128>> = (0..q)
            .map(|a| {
                (0..q)
                    .map(|b| gram_all[(a, b)].round().to_f64_lossy() as i128)
                    .collect()
            })
            .collect();
        let r = integer_rank(&ints);
        if r != pc.pivots.len() {
            return Err(Error::DimensionMismatch(format!(
                "H-space ({},{}) rank {} disagrees with exact rank {r}",
                i + 1,
                alpha + 1,
                pc.pivots.len()
            )));
        }
    }
    let factors: Vec<DMatrix<T>> = pc.pivots.iter().map(|&k| all[k].clone()).collect();
    let m = factors.len();
    let gram = DMatrix::from_fn(m, m, |a, b| gram_all[(pc.pivots[a], pc.pivots[b])]);
    let gram_l = if m == 0 {
        DMatrix::zeros(0, 0)
    } else {
        crate::linalg::cholesky(&gram)
            .ok_or_else(|| Error::NotPositiveDefinite("H-space Gram matrix".into()))?
    };
    Ok(HSpaceBasis {
        block: i,
        alpha,
        mu,
        w,
        spanning,
        pivots: pc.pivots,
        factors,
        gram,
        gram_l,
    })
}

/// Per-block constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockConstants {
    pub d: usize,
    pub mu: Vec<usize>,
    pub m: Vec<usize>,
}

/// Structure constants `(d_i, μ_{i,α}, m_{i,α})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureConstants {
    pub blocks: Vec<BlockConstants>,
}

impl StructureConstants {
    /// Aggregates the H-spaces and checks `Σ (1 + m) = dim`.
    pub fn from_h_spaces<T: Scalar>(h: &[Vec<HSpaceBasis<T>>], dim: usize) -> Result<Self> {
        let blocks: Vec<BlockConstants> = h
            .iter()
            .map(|hs| BlockConstants {
                d: hs.len(),
                mu: hs.iter().map(|x| x.mu).collect(),
                m: hs.iter().map(|x| x.m()).collect(),
            })
            .collect();
        let sc = StructureConstants { blocks };
        let found: usize = sc.entries().map(|(_, _, _, m)| 1 + m).sum();
        if found != dim {
            return Err(Error::CountingIdentity {
                expected: dim,
                found,
            });
        }
        Ok(sc)
    }

    pub fn r(&self) -> usize {
        self.blocks.len()
    }

    /// Iterates `(i, α, μ, m)` with 0-based indices.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| (0..b.d).map(move |a| (i, a, b.mu[a], b.m[a])))
    }

    /// `p_Z = Σ μ log μ`.
    pub fn p_z<T: Scalar>(&self) -> T {
        self.entries().fold(T::zero(), |acc, (_, _, mu, _)| {
            let mu = T::from_usize_lossy(mu);
            acc + mu * mu.ln()
        })
    }

    /// `q_Z = ½ Σ {(log μ − log 2π)·m + log μ}`.
    pub fn q_z<T: Scalar>(&self) -> T {
        let l2pi = T::two_pi().ln();
        self.entries().fold(T::zero(), |acc, (_, _, mu, m)| {
            let lm = T::from_usize_lossy(mu).ln();
            acc + T::lit(0.5) * ((lm - l2pi) * T::from_usize_lossy(m) + lm)
        })
    }

    /// `max_{i,α} −(2 + m)/(2μ)`; the integral converges iff `s` exceeds it.
    pub fn convergence_threshold<T: Scalar>(&self) -> T {
        self.entries()
            .map(|(_, _, mu, m)| -T::from_usize_lossy(2 + m) / T::from_usize_lossy(2 * mu))
            .fold(T::lit(f64::NEG_INFINITY), |a, b| a.max(b))
    }
}

/// `λ`, `det ψ` and `det φ / det ψ` for one `(i, α)`.
#[derive(Clone, Debug, Serialize)]
pub struct FactorEntry<T: Scalar> {
    pub block: usize,
    pub alpha: usize,
    pub mu: usize,
    pub m: usize,
    pub lambda: T,
    pub log_det_psi: T,
    pub ratio: T,
}

/// Determinant factors for a positive definite `A`.
#[derive(Clone, Debug, Serialize)]
pub struct DeterminantFactors<T: Scalar> {
    pub entries: Vec<FactorEntry<T>>,
}

/// Evaluates `λ`, `det ψ` and the Schur-complement ratio for every `(i, α)`.
pub fn determinant_factors<T: Scalar>(
    h: &[Vec<HSpaceBasis<T>>],
    a: &DMatrix<T>,
) -> Result<DeterminantFactors<T>> {
    let p = h.iter().flatten().next().map_or(0, |x| x.w.nrows());
    if a.nrows() != p || a.ncols() != p {
        return Err(Error::DimensionMismatch(format!("A must be {p}x{p}")));
    }
    let mut entries = Vec::new();
    for hb in h.iter().flatten() {
        let mu_t = T::from_usize_lossy(hb.mu);
        let aw = a * &hb.w;
        let lambda = (hb.w.transpose() * &aw).trace() / mu_t;
        let m = hb.m();
        let (log_det_psi, ratio) = if m == 0 {
            (T::zero(), lambda)
        } else {
            let au: Vec<DMatrix<T>> = hb.factors.iter().map(|u| a * u).collect();
            let psi = DMatrix::from_fn(m, m, |k, l| {
                crate::linalg::frob_inner(&hb.factors[l], &au[k])
            });
            let v = nalgebra::DVector::from_iterator(
                m,
                hb.factors
                    .iter()
                    .map(|u| crate::linalg::frob_inner(u, &aw) / mu_t.sqrt()),
            );
            let chol = nalgebra::Cholesky::new(crate::linalg::symmetrize(&psi))
                .ok_or_else(|| Error::NotPositiveDefinite("A-weighted Gram matrix".into()))?;
            let l = chol.l();
            let y = l.solve_lower_triangular(&v).expect("nonsingular");
            let log_det = (0..m).fold(T::zero(), |acc, j| acc + l[(j, j)].ln()) * T::lit(2.0);
            let log_g = log_det_pd(&hb.gram)
                .ok_or_else(|| Error::NotPositiveDefinite("Gram matrix".into()))?;
            (log_det - log_g, lambda - y.dot(&y))
        };
        if !(lambda > T::zero()) || !(ratio > T::zero()) {
            return Err(Error::NotPositiveDefinite(format!(
                "factor ({},{}) has nonpositive lambda or ratio",
                hb.block + 1,
                hb.alpha + 1
            )));
        }
        entries.push(FactorEntry {
            block: hb.block,
            alpha: hb.alpha,
            mu: hb.mu,
            m,
            lambda,
            log_det_psi,
            ratio,
        });
    }
    Ok(DeterminantFactors { entries })
}

/// The matrix `φ_{i,α}(A)` in the orthonormal basis `(ẽ, f̃_1, …, f̃_m)`.
pub fn phi_matrix<T: Scalar>(hb: &HSpaceBasis<T>, a: &DMatrix<T>) -> DMatrix<T> {
    let mut basis = vec![hb.e_tilde()];
    basis.extend(hb.orthonormal());
    let n = basis.len();
    DMatrix::from_fn(n, n, |x, y| (basis[x].transpose() * a * &basis[y]).trace())
}
