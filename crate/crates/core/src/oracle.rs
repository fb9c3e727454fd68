//! Independent numerical checks: Monte Carlo and quadrature evaluation of the
//! gamma-like integral, and the classical decomposable G-Wishart formula.
//!
//! Nothing here uses frames, structure constants or the closed form.

use crate::color_space::ColorSpace;
use crate::colored_graph::ColoredGraph;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

/// Largest dimension accepted by [`mc_integral`].
pub const MC_MAX_DIM: usize = 8;
/// Largest dimension accepted by [`quadrature_integral`].
pub const QUADRATURE_MAX_DIM: usize = 3;

struct Integrand {
    p: usize,
    dim: usize,
    // orthonormal basis, row-major p*p each
    basis: Vec<Vec<f64>>,
    // <A, O_k>
    a_coef: Vec<f64>,
    s: f64,
}

impl Integrand {
    fn new(space: &ColorSpace<f64>, s: f64, a: &DMatrix<f64>) -> Result<Self> {
        let p = space.p();
        if a.nrows() != p || a.ncols() != p {
            return Err(Error::DimensionMismatch(format!("A must be {p}x{p}")));
        }
        if nalgebra::Cholesky::new(a.clone()).is_none() {
            return Err(Error::NotPositiveDefinite("A".into()));
        }
        let basis: Vec<Vec<f64>> = space
            .orthonormal()
            .iter()
            .map(|o| o.transpose().as_slice().to_vec())
            .collect();
        let a_coef = space
            .orthonormal()
            .iter()
            .map(|o| a.component_mul(o).sum())
            .collect();
        Ok(Integrand {
            p,
            dim: space.dim(),
            basis,
            a_coef,
            s,
        })
    }

    fn matrix(&self, y: &[f64], buf: &mut [f64]) {
        buf.iter_mut().for_each(|x| *x = 0.0);
        for (b, &c) in self.basis.iter().zip(y) {
            for (x, v) in buf.iter_mut().zip(b) {
                *x += c * v;
            }
        }
    }

    /// `s log det x − tr(Ax)`, or `None` outside the cone.
    fn log_f(&self, y: &[f64], buf: &mut [f64]) -> Option<f64> {
        self.matrix(y, buf);
        let ld = chol_logdet(buf, self.p)?;
        let tr: f64 = y.iter().zip(&self.a_coef).map(|(a, b)| a * b).sum();
        Some(self.s * ld - tr)
    }

    fn dmatrix(&self, y: &[f64]) -> DMatrix<f64> {
        let mut buf = vec![0.0; self.p * self.p];
        self.matrix(y, &mut buf);
        DMatrix::from_row_slice(self.p, self.p, &buf)
    }
}

// in-place Cholesky log-determinant of a row-major matrix (destroys input)
fn chol_logdet(a: &mut [f64], n: usize) -> Option<f64> {
    let mut ld = 0.0;
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        ld += d.ln();
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    Some(2.0 * ld)
}

/// Monte Carlo estimate of the log integral.
#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub log_estimate: f64,
    /// Delta-method standard error of the log estimate.
    pub stderr_log: f64,
    pub ess: f64,
    pub n_samples: usize,
    pub seed: u64,
}

struct Proposal {
    mean: DVector<f64>,
    chol: DMatrix<f64>,
    log_norm: f64,
    nu: f64,
}

impl Proposal {
    fn new(mean: DVector<f64>, cov: &DMatrix<f64>, nu: f64) -> Option<Self> {
        let d = mean.len() as f64;
        let chol = nalgebra::Cholesky::new(cov.clone())?.l();
        let log_det: f64 = (0..chol.nrows()).map(|i| chol[(i, i)].ln()).sum::<f64>() * 2.0;
        let log_norm = ln_gamma((nu + d) / 2.0)
            - ln_gamma(nu / 2.0)
            - 0.5 * d * (nu * std::f64::consts::PI).ln()
            - 0.5 * log_det;
        Some(Proposal {
            mean,
            chol,
            log_norm,
            nu,
        })
    }

    // draws y and returns log q(y)
    fn sample(&self, rng: &mut ChaCha8Rng, chi: &ChiSquared<f64>, out: &mut [f64]) -> f64 {
        let d = self.mean.len();
        let z = DVector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(&mut *rng)));
        let g: f64 = chi.sample(rng);
        let scale = (self.nu / g).sqrt();
        let y = &self.mean + &self.chol * &z * scale;
        out.copy_from_slice(y.as_slice());
        let delta2 = z.dot(&z) * self.nu / g;
        self.log_norm - 0.5 * (self.nu + d as f64) * (1.0 + delta2 / self.nu).ln()
    }
}

#[derive(Clone, Copy)]
struct Moments {
    max: f64,
    s1: f64,
    s2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if o.s1 == 0.0 {
            return self;
        }
        if self.s1 == 0.0 {
            return o;
        }
        let m = self.max.max(o.max);
        let (a, b) = ((self.max - m).exp(), (o.max - m).exp());
        Moments {
            max: m,
            s1: self.s1 * a + o.s1 * b,
            s2: self.s2 * a * a + o.s2 * b * b,
        }
    }
}

fn run_chunk(f: &Integrand, q: &Proposal, seed: u64, stream: u64, n: usize) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let chi = ChiSquared::new(q.nu).expect("positive dof");
    let mut y = vec![0.0; f.dim];
    let mut buf = vec![0.0; f.p * f.p];
    let mut lws = Vec::with_capacity(n);
    for _ in 0..n {
        let lq = q.sample(&mut rng, &chi, &mut y);
        if let Some(lf) = f.log_f(&y, &mut buf) {
            lws.push(lf - lq);
        }
    }
    let max = lws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lws.is_empty() {
        return Moments {
            max: 0.0,
            s1: 0.0,
            s2: 0.0,
        };
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for lw in lws {
        let w = (lw - max).exp();
        s1 += w;
        s2 += w * w;
    }
    Moments { max, s1, s2 }
}

const CHUNK: usize = 8192;

fn estimate(f: &Integrand, q: &Proposal, seed: u64, stream0: u64, n: usize) -> (f64, f64, f64) {
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| run_chunk(f, q, seed, stream0 + c as u64, CHUNK.min(n - c * CHUNK)))
        .collect();
    let m = parts.into_iter().fold(
        Moments {
            max: 0.0,
            s1: 0.0,
            s2: 0.0,
        },
        Moments::merge,
    );
    if m.s1 == 0.0 {
        return (f64::NEG_INFINITY, f64::INFINITY, 0.0);
    }
    let nf = n as f64;
    let mean = m.s1 / nf;
    let var = (m.s2 / nf - mean * mean).max(0.0);
    let se = (var / nf).sqrt();
    (m.max + mean.ln(), se / mean, m.s1 * m.s1 / m.s2)
}

fn newton_mode(f: &Integrand, y0: DVector<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let d = f.dim;
    let mut buf = vec![0.0; f.p * f.p];
    let mut y = y0;
    let basis: Vec<DMatrix<f64>> = f
        .basis
        .iter()
        .map(|b| DMatrix::from_row_slice(f.p, f.p, b))
        .collect();
    let a = DVector::from_vec(f.a_coef.clone());
    let mut hess = DMatrix::zeros(d, d);
    for _ in 0..200 {
        let xinv = f.dmatrix(y.as_slice()).try_inverse()?;
        let xo: Vec<DMatrix<f64>> = basis.iter().map(|o| &xinv * o).collect();
        let grad = DVector::from_iterator(d, xo.iter().map(|m| f.s * m.trace())) - &a;
        hess = DMatrix::from_fn(d, d, |k, l| -f.s * (&xo[k] * &xo[l]).trace());
        let step = (-hess.clone()).cholesky()?.solve(&grad);
        let cur = f.log_f(y.as_slice(), &mut buf)?;
        let mut t = 1.0;
        loop {
            let cand = &y + &step * t;
            if let Some(v) = f.log_f(cand.as_slice(), &mut buf) {
                if v >= cur {
                    y = cand;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Some((y, hess));
            }
        }
        if step.norm() * t < 1e-12 * (1.0 + y.norm()) {
            break;
        }
    }
    Some((y, hess))
}

/// Importance-sampling estimate of `log ∫ det(x)^s e^{−tr(Ax)} dx` in
/// orthonormal coordinates.
///
/// The proposal is a multivariate Student-t centered at the integrand mode
/// (for `s > 0`) with scale from the Hessian there, inflated by a factor
/// chosen by a pilot run. Heavy tails keep the weight variance finite.
pub fn mc_integral(
    space: &ColorSpace<f64>,
    s: f64,
    a: &DMatrix<f64>,
    n_samples: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<McEstimate> {
    let dim = space.dim();
    if dim > MC_MAX_DIM {
        return Err(Error::OracleDimension {
            dim,
            max: MC_MAX_DIM,
        });
    }
    let f = Integrand::new(space, s, a)?;
    let p = space.p() as f64;
    let tr_a = a.trace();
    let kappa = (p * s).max(0.5) / tr_a;
    let y0 = space.project(&(DMatrix::identity(space.p(), space.p()) * kappa));
    let (mean, base_cov) = if s > 0.0 {
        match newton_mode(&f, y0.clone()) {
            Some((m, h)) => match (-h).try_inverse() {
                Some(c) => (m, crate::linalg::symmetrize(&c)),
                None => (y0, DMatrix::identity(dim, dim) * (kappa * kappa / p)),
            },
            None => (y0, DMatrix::identity(dim, dim) * (kappa * kappa / p)),
        }
    } else {
        (y0, DMatrix::identity(dim, dim) * (kappa * kappa / p))
    };
    let nu = 5.0;
    let run = || -> Result<McEstimate> {
        let mut best: Option<(f64, f64)> = None;
        for (i, &inflate) in [0.6f64, 0.85, 1.2, 1.7, 2.4].iter().enumerate() {
            let q = Proposal::new(mean.clone(), &(&base_cov * (inflate * inflate)), nu)
                .ok_or_else(|| Error::NotPositiveDefinite("proposal covariance".into()))?;
            let (_, _, ess) = estimate(&f, &q, seed ^ 0xA5A5_5A5A, 1_000_000 + i as u64 * 16, 1000);
            if best.is_none_or(|(_, e)| ess > e) {
                best = Some((inflate, ess));
            }
        }
        let inflate = best.expect("candidates").0;
        let q = Proposal::new(mean.clone(), &(&base_cov * (inflate * inflate)), nu)
            .expect("checked above");
        let (log_estimate, stderr_log, ess) = estimate(&f, &q, seed, 0, n_samples);
        if ess < 0.01 * n_samples as f64 {
            return Err(Error::ProposalMismatch { ess, n: n_samples });
        }
        Ok(McEstimate {
            log_estimate,
            stderr_log,
            ess,
            n_samples,
            seed,
        })
    };
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Data(e.to_string()))?
            .install(run),
        None => run(),
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(&[f64]) -> Vec<f64>, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut xs = Vec::with_capacity(15);
    xs.push(c);
    for &x in &XGK[..7] {
        xs.push(c - h * x);
        xs.push(c + h * x);
    }
    let v = f(&xs);
    let mut k = v[0] * WGK[7];
    let mut g = v[0] * WG[3];
    for j in 0..7 {
        let s = v[1 + 2 * j] + v[2 + 2 * j];
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod integration; `f` evaluates a batch of
/// abscissae.
fn adaptive(f: &dyn Fn(&[f64]) -> Vec<f64>, a: f64, b: f64, rel: f64) -> f64 {
    let mut parts = vec![(a, b, gk15(f, a, b))];
    for _ in 0..4000 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= rel * total.abs() {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("nonempty");
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(f, lo, mid)));
        parts.push((mid, hi, gk15(f, mid, hi)));
    }
    parts.iter().map(|p| p.2 .0).sum()
}

/// Tanh-sinh integration on `[0, len]`; `f(x, len − x)` receives both the
/// point and its distance to the right end.
fn tanh_sinh(f: &dyn Fn(f64, f64) -> f64, len: f64) -> f64 {
    let half = std::f64::consts::FRAC_PI_2;
    let mut h = 0.5;
    let node = |t: f64| {
        let u = half * t.sinh();
        let e = (2.0 * u).exp();
        // x/len = 1/(1+e^{-2u}), (len-x)/len = 1/(1+e^{2u})
        let xl = 1.0 / (1.0 + 1.0 / e);
        let rl = 1.0 / (1.0 + e);
        let w = half * t.cosh() / (u.cosh() * u.cosh()) * 0.5;
        (xl * len, rl * len, w * len)
    };
    let eval = |t: f64| {
        let (x, r, w) = node(t);
        if x <= 0.0 || r <= 0.0 || w == 0.0 {
            0.0
        } else {
            let v = f(x, r) * w;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        }
    };
    let tmax = 4.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut est = sum * h;
    for _ in 0..8 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let new = sum * h;
        let done = (new - est).abs() <= 1e-13 * new.abs();
        est = new;
        if done {
            break;
        }
    }
    est
}

struct Polar<'a> {
    f: &'a Integrand,
    kappa: f64,
    tr_a: f64,
    shift: f64,
}

impl Polar<'_> {
    // ∫_0^{ρmax} ρ^{dim-1} f(κI + ρD) dρ for unit direction u, scaled by e^{-shift}
    fn radial(&self, u: &[f64]) -> f64 {
        let f = self.f;
        let d = f.dmatrix(u);
        let mut ev: Vec<f64> = crate::linalg::symmetrize(&d)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let a: f64 = u.iter().zip(&f.a_coef).map(|(x, y)| x * y).sum();
        let dim1 = (f.dim - 1) as f64;
        let base = -self.kappa * self.tr_a - self.shift;
        let dmin = ev[0];
        if dmin < 0.0 {
            let rho_max = self.kappa / -dmin;
            let g = |rho: f64, rest: f64| {
                // κ + ρ d_j = rest·(−d_min) + ρ (d_j − d_min)
                let mut lg = 0.0;
                for &dj in &ev {
                    lg += (rest * -dmin + rho * (dj - dmin)).ln();
                }
                (f.s * lg - rho * a + dim1 * rho.ln() + base).exp()
            };
            tanh_sinh(&g, rho_max)
        } else {
            let scale = (f.s.max(0.0) * f.p as f64 + f.dim as f64) / a.max(1e-300);
            let g = |t: f64, rest: f64| {
                let rho = scale * t / rest;
                let jac = scale / (rest * rest);
                let lg: f64 = ev.iter().map(|&dj| (self.kappa + rho * dj).ln()).sum();
                (f.s * lg - rho * a + dim1 * rho.ln() + base).exp() * jac
            };
            tanh_sinh(&g, 1.0)
        }
    }
}

/// Deterministic evaluation of the log integral for spaces of dimension at
/// most 3, in polar coordinates around a point on the identity ray: the
/// radial integral along each direction runs up to the cone boundary,
/// located exactly from the eigenvalues of the direction matrix.
pub fn quadrature_integral(space: &ColorSpace<f64>, s: f64, a: &DMatrix<f64>) -> Result<f64> {
    let dim = space.dim();
    if dim > QUADRATURE_MAX_DIM {
        return Err(Error::OracleDimension {
            dim,
            max: QUADRATURE_MAX_DIM,
        });
    }
    let f = Integrand::new(space, s, a)?;
    let p = space.p() as f64;
    let tr_a = a.trace();
    let kappa = (p * s + dim as f64).max(0.5) / tr_a;
    let shift = f.s * p * kappa.ln() - kappa * tr_a;
    let polar = Polar {
        f: &f,
        kappa,
        tr_a,
        shift,
    };
    let rel = 1e-9;
    let tau = 2.0 * std::f64::consts::PI;
    let value = match dim {
        1 => polar.radial(&[1.0]) + polar.radial(&[-1.0]),
        2 => adaptive(
            &|th| {
                th.par_iter()
                    .map(|t| polar.radial(&[t.cos(), t.sin()]))
                    .collect()
            },
            0.0,
            tau,
            rel,
        ),
        _ => adaptive(
            &|th| {
                th.par_iter()
                    .map(|&t| {
                        let (st, ct) = t.sin_cos();
                        let inner = |ph: &[f64]| {
                            ph.iter()
                                .map(|p| polar.radial(&[st * p.cos(), st * p.sin(), ct]))
                                .collect()
                        };
                        st * adaptive(&inner, 0.0, tau, rel)
                    })
                    .collect()
            },
            0.0,
            std::f64::consts::PI,
            rel,
        ),
    };
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Divergent {
            s,
            threshold: f64::NAN,
        });
    }
    Ok(value.ln() + shift)
}

fn log_complete_wishart(delta: f64, d: &DMatrix<f64>) -> Result<f64> {
    let c = d.nrows();
    if c == 0 {
        return Ok(0.0);
    }
    let cf = c as f64;
    let a = (delta + cf - 1.0) / 2.0;
    let chol =
        nalgebra::Cholesky::new(d.clone()).ok_or_else(|| Error::NotPositiveDefinite("D".into()))?;
    let log_det: f64 = (0..c).map(|i| chol.l()[(i, i)].ln()).sum::<f64>() * 2.0;
    let mut log_gamma_c = cf * (cf - 1.0) / 4.0 * std::f64::consts::PI.ln();
    for j in 0..c {
        log_gamma_c += ln_gamma(a - j as f64 / 2.0);
    }
    Ok(cf * a * 2f64.ln() + log_gamma_c - a * log_det)
}

fn is_peo0(adj: &[Vec<bool>], order: &[usize]) -> bool {
    let p = adj.len();
    let mut pos = vec![0; p];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in order {
        let later: Vec<usize> = (0..p).filter(|&w| adj[v][w] && pos[w] > pos[v]).collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                if !adj[a][b] {
                    return false;
                }
            }
        }
    }
    true
}

/// Classical clique–separator value of the G-Wishart normalizer for an
/// uncolored decomposable graph, in orthonormal coordinates
/// (entrywise value plus `|E| log 2 / 2`).
pub fn decomposable_gwishart_log(g: &ColoredGraph, delta: f64, d: &DMatrix<f64>) -> Result<f64> {
    let p = g.p();
    if g.vertex_classes().iter().any(|c| c.len() != 1)
        || g.edge_classes().iter().any(|c| c.len() != 1)
    {
        return Err(Error::InvalidGraph(
            "all color classes must be singletons".into(),
        ));
    }
    if d.nrows() != p || d.ncols() != p {
        return Err(Error::DimensionMismatch(format!("D must be {p}x{p}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Data("delta must be positive".into()));
    }
    let adj: Vec<Vec<bool>> = (0..p)
        .map(|v| (0..p).map(|w| g.adjacent0(v, w)).collect())
        .collect();
    // maximum cardinality search; its reverse is a peo iff the graph is chordal
    let mut weight = vec![0usize; p];
    let mut done = vec![false; p];
    let mut mcs = Vec::with_capacity(p);
    for _ in 0..p {
        let v = (0..p)
            .filter(|&v| !done[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .unwrap();
        done[v] = true;
        mcs.push(v);
        for w in 0..p {
            if adj[v][w] && !done[w] {
                weight[w] += 1;
            }
        }
    }
    mcs.reverse();
    if !is_peo0(&adj, &mcs) {
        return Err(Error::NotDecomposable);
    }
    let mut pos = vec![0; p];
    for (i, &v) in mcs.iter().enumerate() {
        pos[v] = i;
    }
    let sub = |set: &[usize]| DMatrix::from_fn(set.len(), set.len(), |i, j| d[(set[i], set[j])]);
    let mut total = 0.0;
    for &v in &mcs {
        let later: Vec<usize> = (0..p).filter(|&w| adj[v][w] && pos[w] > pos[v]).collect();
        let mut fam = vec![v];
        fam.extend(&later);
        total +=
            log_complete_wishart(delta, &sub(&fam))? - log_complete_wishart(delta, &sub(&later))?;
    }
    Ok(total + g.edges().len() as f64 * 2f64.ln() / 2.0)
}

/// Engine-versus-oracle comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub engine: f64,
    pub oracle: f64,
    pub diff: f64,
    pub stderr: Option<f64>,
    pub z: Option<f64>,
    pub pass: bool,
}

/// Passes iff `|diff| ≤ max(3·stderr, 1e-8)` for stochastic oracles and
/// `|diff| ≤ 1e-8` for deterministic ones.
pub fn compare(engine: f64, oracle: f64, stderr: Option<f64>) -> Comparison {
    compare_with_tol(engine, oracle, stderr, 1e-8)
}

/// As [`compare`] with a custom deterministic tolerance.
pub fn compare_with_tol(engine: f64, oracle: f64, stderr: Option<f64>, tol: f64) -> Comparison {
    let diff = engine - oracle;
    let (z, pass) = match stderr {
        Some(se) => {
            let z = if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            (Some(z), diff.abs() <= (3.0 * se).max(tol))
        }
        None => (None, diff.abs() <= tol),
    };
    Comparison {
        engine,
        oracle,
        diff,
        stderr,
        z,
        pass,
    }
}
