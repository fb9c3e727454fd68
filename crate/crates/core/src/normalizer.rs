//! Closed-form gamma-like integrals, the srg closed form and the generalized
//! Cholesky decomposition.

use crate::color_space::ColorSpace;
use crate::constants::{DeterminantFactors, HSpaceBasis, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::{frob_inner, frob_norm, min_eigenvalue, spd_inverse};
use crate::scalar::{ln_gamma, Scalar};
use nalgebra::DMatrix;
use serde::Serialize;

/// Per-`(i, α)` contribution to the log integral (1-based indices).
#[derive(Clone, Debug, Serialize)]
pub struct FactorLog<T: Scalar> {
    pub i: usize,
    pub alpha: usize,
    pub mu: usize,
    pub m: usize,
    pub lambda: T,
    pub log_det_psi: T,
    pub log_ratio: T,
    pub log_term: T,
}

/// Log value of `∫ det(x)^s e^{−tr(Ax)} dx` over the positive definite cone of the space.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizerResult<T: Scalar> {
    pub log_value: T,
    pub s: T,
    pub threshold: T,
    pub factors: Vec<FactorLog<T>>,
}

/// `max_{i,α} −(2 + m)/(2μ)`.
pub fn convergence_threshold<T: Scalar>(sc: &StructureConstants) -> T {
    sc.convergence_threshold()
}

/// Evaluates the closed form from structure constants and determinant factors.
pub fn log_integral<T: Scalar>(
    sc: &StructureConstants,
    factors: &DeterminantFactors<T>,
    s: T,
) -> Result<NormalizerResult<T>> {
    let threshold: T = sc.convergence_threshold();
    if !(s > threshold) {
        return Err(Error::Divergent {
            s: s.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    let mut total = -sc.p_z::<T>() * s - sc.q_z::<T>();
    let mut out = Vec::with_capacity(factors.entries.len());
    for f in &factors.entries {
        if !(f.ratio > T::zero()) {
            return Err(Error::NotPositiveDefinite("nonpositive Schur ratio".into()));
        }
        let a = T::from_usize_lossy(f.mu) * s + T::one() + T::from_usize_lossy(f.m) * T::lit(0.5);
        let log_ratio = f.ratio.ln();
        let term = ln_gamma(a) - a * log_ratio - T::lit(0.5) * f.log_det_psi;
        total += term;
        out.push(FactorLog {
            i: f.block + 1,
            alpha: f.alpha + 1,
            mu: f.mu,
            m: f.m,
            lambda: f.lambda,
            log_det_psi: f.log_det_psi,
            log_ratio,
            log_term: term,
        });
    }
    Ok(NormalizerResult {
        log_value: total,
        s,
        threshold,
        factors: out,
    })
}

/// Parameters `(p, k, λ, μ)` of a strongly regular graph and its spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SrgParameters {
    pub p: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub f1: usize,
    pub f2: usize,
}

impl SrgParameters {
    /// Eigenvalues and multiplicities from the parameters.
    pub fn new(p: usize, k: usize, lambda: usize, mu: usize) -> Result<Self> {
        let (pf, kf, lf, mf) = (p as f64, k as f64, lambda as f64, mu as f64);
        let delta = (lf - mf).powi(2) + 4.0 * (kf - mf);
        if delta <= 0.0 {
            return Err(Error::InvalidSrg(format!(
                "discriminant {delta} is not positive"
            )));
        }
        let sd = delta.sqrt();
        let theta1 = ((lf - mf) + sd) / 2.0;
        let theta2 = ((lf - mf) - sd) / 2.0;
        let g = (2.0 * kf + (pf - 1.0) * (lf - mf)) / sd;
        let f1 = 0.5 * (pf - 1.0 - g);
        let f2 = 0.5 * (pf - 1.0 + g);
        for f in [f1, f2] {
            if (f - f.round()).abs() > 1e-9 || f.round() < 1.0 {
                return Err(Error::InvalidSrg(format!(
                    "multiplicity {f} is not a positive integer"
                )));
            }
        }
        Ok(SrgParameters {
            p,
            k,
            lambda,
            mu,
            theta1,
            theta2,
            f1: f1.round() as usize,
            f2: f2.round() as usize,
        })
    }

    /// Reads the parameters off an adjacency matrix, verifying
    /// `B² = kI + λB + μ(J − I − B)`.
    pub fn from_adjacency(b: &DMatrix<i64>) -> Result<Self> {
        let p = b.nrows();
        if p < 3 || b.ncols() != p || b != &b.transpose() {
            return Err(Error::InvalidSrg(
                "adjacency must be square symmetric with p >= 3".into(),
            ));
        }
        if b.iter().any(|&x| x != 0 && x != 1) || (0..p).any(|v| b[(v, v)] != 0) {
            return Err(Error::InvalidSrg(
                "adjacency must be 0/1 with zero diagonal".into(),
            ));
        }
        let k = b.row(0).iter().sum::<i64>() as usize;
        let b2 = b * b;
        let (mut lam, mut mu) = (None, None);
        for v in 0..p {
            for w in 0..p {
                let val = b2[(v, w)] as usize;
                let slot = if v == w {
                    if val != k {
                        return Err(Error::InvalidSrg("graph is not regular".into()));
                    }
                    continue;
                } else if b[(v, w)] == 1 {
                    &mut lam
                } else {
                    &mut mu
                };
                match slot {
                    None => *slot = Some(val),
                    Some(x) if *x != val => {
                        return Err(Error::InvalidSrg("graph is not strongly regular".into()))
                    }
                    _ => {}
                }
            }
        }
        let (Some(lambda), Some(mu)) = (lam, mu) else {
            return Err(Error::InvalidSrg(
                "complete or empty graph is not primitive".into(),
            ));
        };
        if mu == 0 {
            return Err(Error::InvalidSrg("disconnected (imprimitive) srg".into()));
        }
        Self::new(p, k, lambda, mu)
    }

    /// Primitive idempotents `E_0, E_1, E_2` as polynomials in `B`.
    pub fn idempotents<T: Scalar>(&self, b: &DMatrix<T>) -> [DMatrix<T>; 3] {
        let p = self.p;
        let pt = T::from_usize_lossy(p);
        let j = DMatrix::from_element(p, p, T::one());
        let i = DMatrix::<T>::identity(p, p);
        let k = T::from_usize_lossy(self.k);
        let (t1, t2) = (T::lit(self.theta1), T::lit(self.theta2));
        let e0 = &j / pt;
        let e1 = (b - &i * t2 - &j * ((k - t2) / pt)) / (t1 - t2);
        let e2 = (b - &i * t1 - &j * ((k - t1) / pt)) / (t2 - t1);
        [e0, e1, e2]
    }
}

/// Closed form for the complete graph colored by an srg `B` (colors `I`,
/// `B`, `J − I − B`).
pub fn srg_log_integral<T: Scalar>(
    b: &DMatrix<i64>,
    s: T,
    a: &DMatrix<T>,
) -> Result<NormalizerResult<T>> {
    let prm = SrgParameters::from_adjacency(b)?;
    let bt = b.map(|x| T::lit(x as f64));
    let es = prm.idempotents(&bt);
    let mus = [1, prm.f1, prm.f2];
    let threshold = -T::one() / T::from_usize_lossy(prm.f1.max(prm.f2));
    if !(s > threshold) {
        return Err(Error::Divergent {
            s: s.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    let (f1, f2) = (T::from_usize_lossy(prm.f1), T::from_usize_lossy(prm.f2));
    let mut total = -(f1 * f1.ln() + f2 * f2.ln()) * s - T::lit(0.5) * (f1.ln() + f2.ln());
    let mut factors = Vec::new();
    for (alpha, (e, &mu)) in es.iter().zip(&mus).enumerate() {
        let mu_t = T::from_usize_lossy(mu);
        let phi = frob_inner(a, e) / mu_t;
        if !(phi > T::zero()) {
            return Err(Error::NotPositiveDefinite("A".into()));
        }
        let ex = mu_t * s + T::one();
        let term = ln_gamma(ex) - ex * phi.ln();
        total += term;
        factors.push(FactorLog {
            i: 1,
            alpha: alpha + 1,
            mu,
            m: 0,
            lambda: phi,
            log_det_psi: T::zero(),
            log_ratio: phi.ln(),
            log_term: term,
        });
    }
    Ok(NormalizerResult {
        log_value: total,
        s,
        threshold,
        factors,
    })
}

/// Coordinates of the generalized Cholesky factor for one `(i, α)` (1-based).
#[derive(Clone, Debug, Serialize)]
pub struct CholeskyEntry<T: Scalar> {
    pub i: usize,
    pub alpha: usize,
    pub mu: usize,
    pub t: T,
    pub tau: Vec<T>,
}

/// The unique `T ∈ H⁺` with `x = T Tᵀ`, with its coordinates.
#[derive(Clone, Debug)]
pub struct CholeskyCoordinates<T: Scalar> {
    pub entries: Vec<CholeskyEntry<T>>,
    pub factor: DMatrix<T>,
    /// `‖T Tᵀ − x‖_F / ‖x‖_F`.
    pub reconstruction_residual: T,
}

/// Generalized Cholesky decomposition by block elimination, with each
/// diagonal factor adapted to the Jordan frame.
pub fn generalized_cholesky<T: Scalar>(
    space: &ColorSpace<T>,
    h: &[Vec<HSpaceBasis<T>>],
    x: &DMatrix<T>,
    tol: T,
) -> Result<CholeskyCoordinates<T>> {
    let p = space.p();
    if x.nrows() != p || x.ncols() != p {
        return Err(Error::DimensionMismatch(format!("x must be {p}x{p}")));
    }
    let res = space.membership_residual(x);
    if res > tol {
        return Err(Error::NotInSpace(res.to_f64_lossy()));
    }
    if min_eigenvalue(x) <= T::zero() {
        return Err(Error::NotPositiveDefinite("x".into()));
    }
    let mut work = x.clone();
    let mut tm = DMatrix::<T>::zeros(p, p);
    for i in 0..space.r() {
        let range = space.blocks().range(i);
        let (off, n) = (range.start, range.len());
        let rest = p - range.end;
        let c = work.view((off, off), (n, n)).into_owned();
        let cinv = spd_inverse(&c)
            .ok_or_else(|| Error::NotPositiveDefinite(format!("pivot block {}", i + 1)))?;
        // frame-adapted square root: block Cholesky in the W basis with scalar diagonal blocks
        let mut w = DMatrix::<T>::zeros(n, n);
        let mut starts = Vec::new();
        let mut col = 0;
        for hb in &h[i] {
            w.view_mut((0, col), (n, hb.mu))
                .copy_from(&hb.w.view((off, 0), (n, hb.mu)));
            starts.push((col, hb.mu));
            col += hb.mu;
        }
        let ct = w.transpose() * &c * &w;
        let mut lt = DMatrix::<T>::zeros(n, n);
        for (a, &(sa, ma)) in starts.iter().enumerate() {
            let mut schur = ct.view((sa, sa), (ma, ma)).into_owned();
            for &(sg, mg) in &starts[..a] {
                let lag = lt.view((sa, sg), (ma, mg)).into_owned();
                schur -= &lag * lag.transpose();
            }
            let s2 = schur.trace() / T::from_usize_lossy(ma);
            let dev = frob_norm(&(&schur - DMatrix::<T>::identity(ma, ma) * s2));
            if !(s2 > T::zero()) || dev > tol * T::lit(100.0) * frob_norm(&schur) {
                return Err(Error::Cholesky(format!(
                    "diagonal factor ({},{}) is not scalar (deviation {})",
                    i + 1,
                    a + 1,
                    dev
                )));
            }
            let sdiag = s2.sqrt();
            lt.view_mut((sa, sa), (ma, ma))
                .copy_from(&(DMatrix::<T>::identity(ma, ma) * sdiag));
            for &(sb, mb) in &starts[a + 1..] {
                let mut v = ct.view((sb, sa), (mb, ma)).into_owned();
                for &(sg, mg) in &starts[..a] {
                    v -= lt.view((sb, sg), (mb, mg)) * lt.view((sa, sg), (ma, mg)).transpose();
                }
                lt.view_mut((sb, sa), (mb, ma)).copy_from(&(v / sdiag));
            }
        }
        let si = &w * &lt * w.transpose();
        tm.view_mut((off, off), (n, n)).copy_from(&si);
        if rest > 0 {
            let y = work.view((range.end, off), (rest, n)).into_owned();
            let tji = &y * &cinv;
            tm.view_mut((range.end, off), (rest, n))
                .copy_from(&(&tji * &si));
            let upd = &tji * y.transpose();
            let mut sub = work.view_mut((range.end, range.end), (rest, rest));
            sub -= upd;
        }
    }
    let mut entries = Vec::new();
    let mut rec = DMatrix::<T>::zeros(p, p);
    for hb in h.iter().flatten() {
        let e = hb.e_tilde();
        let t = frob_inner(&tm, &e);
        rec += &e * t;
        let fs = hb.orthonormal();
        let tau: Vec<T> = fs.iter().map(|f| frob_inner(&tm, f)).collect();
        for (f, v) in fs.iter().zip(&tau) {
            rec += f * *v;
        }
        if !(t > T::zero()) {
            return Err(Error::Cholesky(format!(
                "t_({},{}) is not positive",
                hb.block + 1,
                hb.alpha + 1
            )));
        }
        entries.push(CholeskyEntry {
            i: hb.block + 1,
            alpha: hb.alpha + 1,
            mu: hb.mu,
            t,
            tau,
        });
    }
    let nt = frob_norm(&tm);
    let h_res = frob_norm(&(&rec - &tm)) / nt;
    if h_res > tol * T::lit(100.0) {
        return Err(Error::Cholesky(format!(
            "factor leaves the H-space (residual {h_res})"
        )));
    }
    let recon = frob_norm(&(&tm * tm.transpose() - x)) / frob_norm(x);
    if recon > tol * T::lit(100.0) {
        return Err(Error::Cholesky(format!("reconstruction residual {recon}")));
    }
    Ok(CholeskyCoordinates {
        entries,
        factor: tm,
        reconstruction_residual: recon,
    })
}
