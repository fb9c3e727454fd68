//! End-to-end pipeline from a colored graph or raw space to normalizing constants.

use crate::cer::{classify, CerVerdict};
use crate::color_space::ColorSpace;
use crate::colored_graph::ColoredGraph;
use crate::constants::{
    determinant_factors, h_space, DeterminantFactors, HSpaceBasis, StructureConstants,
};
use crate::error::{Error, Result};
use crate::frames::{
    frame_for_block, verify_frame, DiagonalBlockAlgebra, FrameOptions, FrameReport, JordanFrame,
};
use crate::linalg::min_eigenvalue;
use crate::normalizer::{
    generalized_cholesky, log_integral, CholeskyCoordinates, NormalizerResult,
};
use crate::scalar::Scalar;
use nalgebra::DMatrix;

/// Pipeline options.
#[derive(Clone, Copy, Debug)]
pub struct ModelOptions {
    pub seed: u64,
    /// Relative tolerance for axiom and frame checks.
    pub tol: f64,
    /// Relative pivot threshold for H-space ranks.
    pub rank_tol: f64,
    /// Build every frame in reverse of the canonical order.
    pub reverse_frames: bool,
    pub max_retries: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            seed: 0,
            tol: 1e-10,
            rank_tol: 1e-10,
            reverse_frames: false,
            max_retries: 20,
        }
    }
}

/// How a graph was relabeled to make its cpeo blocks consecutive.
#[derive(Clone, Debug)]
pub struct Relabeling {
    pub verdict: CerVerdict,
    pub graph: ColoredGraph,
    /// New vertex `j` (1-based) is original vertex `perm[j-1]`.
    pub perm: Vec<usize>,
}

/// A Block-Cholesky space with its frames, H-spaces and structure constants.
#[derive(Clone, Debug)]
pub struct BcModel<T: Scalar> {
    space: ColorSpace<T>,
    algebras: Vec<DiagonalBlockAlgebra<T>>,
    commutative: Vec<bool>,
    frames: Vec<JordanFrame<T>>,
    h: Vec<Vec<HSpaceBasis<T>>>,
    constants: StructureConstants,
    relabeling: Option<Relabeling>,
}

impl<T: Scalar> BcModel<T> {
    /// Builds the pipeline on a space satisfying (Z0) and (Z1).
    pub fn from_space(space: ColorSpace<T>, opts: &ModelOptions) -> Result<Self> {
        let tol = T::lit(opts.tol);
        let z1 = space.check_z1(tol);
        if !z1.holds {
            return Err(Error::InvalidSpace(format!(
                "space does not satisfy (Z1) (residual {:e})",
                z1.worst_residual
            )));
        }
        let mut algebras = Vec::new();
        let mut frames = Vec::new();
        let mut commutative = Vec::new();
        for i in 0..space.r() {
            let alg = DiagonalBlockAlgebra::from_space(&space, i);
            let fo = FrameOptions {
                seed: opts.seed.wrapping_add(i as u64),
                max_retries: opts.max_retries,
                tol: opts.tol,
                ..FrameOptions::default()
            };
            let mut frame = frame_for_block(&alg, &fo)?;
            if opts.reverse_frames {
                frame = frame.reversed();
            }
            commutative.push(alg.is_commutative(tol));
            algebras.push(alg);
            frames.push(frame);
        }
        let mut h = Vec::new();
        for i in 0..space.r() {
            let hs = (0..frames[i].d())
                .map(|a| {
                    h_space(
                        &space,
                        &frames[i],
                        i,
                        a,
                        commutative[i],
                        T::lit(opts.rank_tol),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            h.push(hs);
        }
        let constants = StructureConstants::from_h_spaces(&h, space.dim())?;
        Ok(BcModel {
            space,
            algebras,
            commutative,
            frames,
            h,
            constants,
            relabeling: None,
        })
    }

    /// Classifies, relabels along the witnessing cpeo and builds the pipeline.
    pub fn from_graph(g: &ColoredGraph, opts: &ModelOptions) -> Result<Self> {
        let verdict = classify(g)?;
        if !verdict.is_cer() {
            return Err(Error::NotCer(verdict.name().into()));
        }
        let eta = verdict.ordering().expect("CER verdict has an ordering");
        let (graph, perm) = g.relabel_for_ordering(eta.as_slice())?;
        let space = ColorSpace::from_graph(&graph)?;
        let mut model = Self::from_space(space, opts)?;
        model.relabeling = Some(Relabeling {
            verdict,
            graph,
            perm,
        });
        Ok(model)
    }

    pub fn space(&self) -> &ColorSpace<T> {
        &self.space
    }

    pub fn algebras(&self) -> &[DiagonalBlockAlgebra<T>] {
        &self.algebras
    }

    pub fn frames(&self) -> &[JordanFrame<T>] {
        &self.frames
    }

    pub fn is_block_commutative(&self, i: usize) -> bool {
        self.commutative[i]
    }

    pub fn h_spaces(&self) -> &[Vec<HSpaceBasis<T>>] {
        &self.h
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn relabeling(&self) -> Option<&Relabeling> {
        self.relabeling.as_ref()
    }

    pub fn frame_reports(&self, tol: T) -> Vec<FrameReport> {
        self.frames
            .iter()
            .zip(&self.algebras)
            .map(|(f, a)| verify_frame(f, a, tol))
            .collect()
    }

    /// Expresses a matrix given in the original vertex labels in the model's labels.
    pub fn to_model_labels(&self, a: &DMatrix<T>) -> Result<DMatrix<T>> {
        let p = self.space.p();
        if a.nrows() != p || a.ncols() != p {
            return Err(Error::DimensionMismatch(format!("expected {p}x{p} matrix")));
        }
        Ok(match &self.relabeling {
            Some(r) => DMatrix::from_fn(p, p, |j, k| a[(r.perm[j] - 1, r.perm[k] - 1)]),
            None => a.clone(),
        })
    }

    /// Determinant factors for `A` in model labels.
    pub fn determinant_factors(&self, a: &DMatrix<T>) -> Result<DeterminantFactors<T>> {
        check_pd(a, "A")?;
        determinant_factors(&self.h, a)
    }

    /// `log ∫ det(x)^s e^{−tr(Ax)} dx` with `A` in model labels.
    pub fn log_integral(&self, s: T, a: &DMatrix<T>) -> Result<NormalizerResult<T>> {
        let threshold: T = self.constants.convergence_threshold();
        if !(s > threshold) {
            return Err(Error::Divergent {
                s: s.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        log_integral(&self.constants, &self.determinant_factors(a)?, s)
    }

    /// Same as [`Self::log_integral`] with `A` in the original vertex labels.
    pub fn log_integral_original(&self, s: T, a: &DMatrix<T>) -> Result<NormalizerResult<T>> {
        self.log_integral(s, &self.to_model_labels(a)?)
    }

    /// `log I(δ, D)`: the integral at `s = (δ−2)/2`, `A = D/2`; `D` in original labels.
    pub fn dy_log_normalizer(&self, delta: T, d: &DMatrix<T>) -> Result<NormalizerResult<T>> {
        let s = (delta - T::lit(2.0)) / T::lit(2.0);
        self.log_integral_original(s, &(d * T::lit(0.5)))
    }

    /// `log I(δ+n, D+U) − log I(δ, D)`.
    pub fn log_posterior_ratio(
        &self,
        delta: T,
        d: &DMatrix<T>,
        n: usize,
        u: &DMatrix<T>,
    ) -> Result<T> {
        if min_eigenvalue(u) < -T::lit(1e-9) * u.norm().max(T::one()) {
            return Err(Error::NotPositiveDefinite(
                "U is not positive semidefinite".into(),
            ));
        }
        let post = self.dy_log_normalizer(delta + T::from_usize_lossy(n), &(d + u))?;
        let prior = self.dy_log_normalizer(delta, d)?;
        Ok(post.log_value - prior.log_value)
    }

    /// Generalized Cholesky factor of `x` (model labels).
    pub fn generalized_cholesky(&self, x: &DMatrix<T>, tol: T) -> Result<CholeskyCoordinates<T>> {
        generalized_cholesky(&self.space, &self.h, x, tol)
    }
}

pub(crate) fn check_pd<T: Scalar>(a: &DMatrix<T>, what: &str) -> Result<()> {
    if !a.is_square() || crate::linalg::cholesky(a).is_none() || min_eigenvalue(a) <= T::zero() {
        return Err(Error::NotPositiveDefinite(what.into()));
    }
    Ok(())
}
