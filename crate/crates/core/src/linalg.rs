//! Small dense linear-algebra helpers.

use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};

/// Trace inner product `tr(a bᵀ)`.
pub fn frob_inner<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn frob_norm<T: Scalar>(a: &DMatrix<T>) -> T {
    frob_inner(a, a).sqrt()
}

pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

pub fn symmetrize<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    (a + a.transpose()) * T::lit(0.5)
}

pub fn is_symmetric<T: Scalar>(a: &DMatrix<T>, tol: T) -> bool {
    a.is_square() && frob_norm(&(a - a.transpose())) <= tol * frob_norm(a).max(T::one())
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues<T: Scalar>(a: &DMatrix<T>) -> Vec<T> {
    let e = symmetrize(a).symmetric_eigen();
    let mut v: Vec<T> = e.eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    v
}

pub fn min_eigenvalue<T: Scalar>(a: &DMatrix<T>) -> T {
    sym_eigenvalues(a).first().copied().unwrap_or_else(T::zero)
}

/// Eigen-decomposition of a symmetric matrix, sorted ascending.
pub fn sym_eigen_sorted<T: Scalar>(a: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let e = symmetrize(a).symmetric_eigen();
    let n = a.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        e.eigenvalues[i]
            .partial_cmp(&e.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &e.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Lower Cholesky factor, or `None` when not positive definite.
pub fn cholesky<T: Scalar>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    nalgebra::Cholesky::new(symmetrize(a)).map(|c| c.l())
}

/// Log-determinant of a positive definite matrix.
pub fn log_det_pd<T: Scalar>(a: &DMatrix<T>) -> Option<T> {
    let l = cholesky(a)?;
    let mut s = T::zero();
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        if d <= T::zero() {
            return None;
        }
        s += d.ln();
    }
    Some(s * T::lit(2.0))
}

/// Result of Cholesky factorization with complete pivoting.
#[derive(Clone, Debug)]
pub struct PivotedCholesky<T: Scalar> {
    /// Accepted pivot indices, in acceptance order.
    pub pivots: Vec<usize>,
    /// Lower factor of the pivoted principal submatrix.
    pub l: DMatrix<T>,
}

/// Complete-pivoting Cholesky; stops when the largest remaining diagonal
/// drops below `rank_tol` times the first pivot.
pub fn pivoted_cholesky<T: Scalar>(g: &DMatrix<T>, rank_tol: T) -> PivotedCholesky<T> {
    pivoted_cholesky_scaled(g, rank_tol, T::zero())
}

/// As [`pivoted_cholesky`], with the threshold taken relative to
/// `max(first pivot, scale)`.
pub fn pivoted_cholesky_scaled<T: Scalar>(
    g: &DMatrix<T>,
    rank_tol: T,
    scale: T,
) -> PivotedCholesky<T> {
    let n = g.nrows();
    let mut a = symmetrize(g);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut first = T::zero();
    let mut k = 0;
    while k < n {
        let mut best = k;
        for j in k + 1..n {
            if a[(j, j)] > a[(best, best)] {
                best = j;
            }
        }
        let piv = a[(best, best)];
        if k == 0 {
            first = piv.max(scale);
        }
        if piv <= T::zero() || piv < rank_tol * first {
            break;
        }
        if best != k {
            a.swap_rows(k, best);
            a.swap_columns(k, best);
            perm.swap(k, best);
        }
        let d = a[(k, k)].sqrt();
        a[(k, k)] = d;
        for i in k + 1..n {
            a[(i, k)] /= d;
        }
        for j in k + 1..n {
            for i in j..n {
                let v = a[(i, k)] * a[(j, k)];
                a[(i, j)] -= v;
            }
        }
        for i in k + 1..n {
            a[(k, i)] = T::zero();
        }
        k += 1;
    }
    let mut l = DMatrix::zeros(k, k);
    for j in 0..k {
        for i in j..k {
            l[(i, j)] = a[(i, j)];
        }
    }
    PivotedCholesky {
        pivots: perm[..k].to_vec(),
        l,
    }
}

/// Exact rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(m: &[Vec<i128>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            if a[r][c] != 0 {
                let f = a[r][c];
                let g = a[rank][c];
                for k in c..cols {
                    a[r][k] = a[r][k] * g - a[rank][k] * f;
                }
                let gcd = a[r].iter().fold(0i128, |acc, &x| gcd(acc, x.abs()));
                if gcd > 1 {
                    for x in a[r].iter_mut() {
                        *x /= gcd;
                    }
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Unit vector minimizing `‖m v‖`, via SVD.
pub fn null_vector<T: Scalar>(m: &DMatrix<T>) -> DVector<T> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut best = 0;
    for i in 1..svd.singular_values.len() {
        if svd.singular_values[i] < svd.singular_values[best] {
            best = i;
        }
    }
    if svd.singular_values.len() < n {
        // wide matrix: complete with a vector orthogonal to the row space
        let full = (m.transpose() * m).symmetric_eigen();
        let mut b = 0;
        for i in 1..n {
            if full.eigenvalues[i] < full.eigenvalues[b] {
                b = i;
            }
        }
        return full.eigenvectors.column(b).into_owned();
    }
    vt.row(best).transpose()
}

/// Symmetric positive definite inverse via eigendecomposition.
pub fn spd_inverse<T: Scalar>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let (vals, vecs) = sym_eigen_sorted(a);
    if vals.first().is_none_or(|v| *v <= T::zero()) {
        return None;
    }
    let mut d = DMatrix::zeros(vals.len(), vals.len());
    for (i, v) in vals.iter().enumerate() {
        d[(i, i)] = T::one() / *v;
    }
    Some(&vecs * d * vecs.transpose())
}

/// Symmetric positive semidefinite square root factor `W` with `W Wᵀ = a`,
/// keeping eigenvalues above `cut`.
pub fn psd_factor<T: Scalar>(a: &DMatrix<T>, cut: T) -> DMatrix<T> {
    let (vals, vecs) = sym_eigen_sorted(a);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cut).collect();
    let mut w = DMatrix::zeros(a.nrows(), keep.len());
    for (c, &i) in keep.iter().rev().enumerate() {
        let s = vals[i].sqrt();
        w.set_column(c, &(vecs.column(i) * s));
    }
    w
}
