//! Diaconis–Ylvisaker priors, sufficient statistics and model scoring.

use crate::colored_graph::{ColoredGraph, GraphSpec};
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, min_eigenvalue};
use crate::model::{BcModel, ModelOptions};
use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Read;
use std::time::Instant;

/// Hyperparameters `(δ, D)` of the prior.
#[derive(Clone, Debug)]
pub struct DYPrior<T: Scalar> {
    pub delta: T,
    pub d: DMatrix<T>,
}

impl<T: Scalar> DYPrior<T> {
    pub fn new(delta: T, d: DMatrix<T>) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::Data("delta must be positive".into()));
        }
        if !d.is_square() || !is_symmetric(&d, T::default_tol()) {
            return Err(Error::Data("D must be square and symmetric".into()));
        }
        if nalgebra::Cholesky::new(d.clone()).is_none() {
            return Err(Error::NotPositiveDefinite("D".into()));
        }
        Ok(DYPrior { delta, d })
    }

    /// `δ = 3`, `D = I_p`.
    pub fn default_for(p: usize) -> Self {
        DYPrior {
            delta: T::lit(3.0),
            d: DMatrix::identity(p, p),
        }
    }

    pub fn p(&self) -> usize {
        self.d.nrows()
    }
}

/// Sample size and scatter matrix `U = Σ z zᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SufficientStats<T: Scalar> {
    pub n: usize,
    pub u: DMatrix<T>,
}

impl<T: Scalar> SufficientStats<T> {
    pub fn empty(p: usize) -> Self {
        SufficientStats {
            n: 0,
            u: DMatrix::zeros(p, p),
        }
    }

    pub fn p(&self) -> usize {
        self.u.nrows()
    }

    pub fn add(&mut self, z: &DVector<T>) -> Result<()> {
        if z.len() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "row has {} values, expected {}",
                z.len(),
                self.p()
            )));
        }
        self.u += z * z.transpose();
        self.n += 1;
        Ok(())
    }

    pub fn from_rows(p: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut st = Self::empty(p);
        for r in rows {
            st.add(&DVector::from_column_slice(r))?;
        }
        Ok(st)
    }
}

/// Reads a numeric CSV table of `p` columns into sufficient statistics.
pub fn ingest_data<T: Scalar, R: Read>(
    reader: R,
    p: usize,
    has_header: bool,
) -> Result<SufficientStats<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut st = SufficientStats::empty(p);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != p {
            return Err(Error::Data(format!(
                "row {} has {} columns, expected {p}",
                i + 1,
                rec.len()
            )));
        }
        let z = rec
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::lit)
                    .ok_or_else(|| Error::Data(format!("row {}: non-numeric cell {cell:?}", i + 1)))
            })
            .collect::<Result<Vec<T>>>()?;
        st.add(&DVector::from_vec(z))?;
    }
    Ok(st)
}

/// `log I(δ+n, D+U) − log I(δ, D) + log_prior_prob` for a CER graph.
pub fn score_model<T: Scalar>(
    g: &ColoredGraph,
    prior: &DYPrior<T>,
    stats: &SufficientStats<T>,
    log_prior_prob: T,
) -> Result<T> {
    let model = BcModel::<T>::from_graph(g, &ModelOptions::default()).map_err(not_cer_hint)?;
    score_with(&model, prior, stats, log_prior_prob)
}

fn score_with<T: Scalar>(
    model: &BcModel<T>,
    prior: &DYPrior<T>,
    stats: &SufficientStats<T>,
    log_prior_prob: T,
) -> Result<T> {
    let p = model.space().p();
    if prior.p() != p || stats.p() != p {
        return Err(Error::DimensionMismatch(format!(
            "model has p = {p}, prior {} and data {}",
            prior.p(),
            stats.p()
        )));
    }
    if min_eigenvalue(&stats.u) < -T::lit(1e-9) * stats.u.norm().max(T::one()) {
        return Err(Error::NotPositiveDefinite(
            "U is not positive semidefinite".into(),
        ));
    }
    Ok(model.log_posterior_ratio(prior.delta, &prior.d, stats.n, &stats.u)? + log_prior_prob)
}

fn not_cer_hint(e: Error) -> Error {
    match e {
        Error::NotCer(v) => Error::NotCer(format!(
            "{v}; only CER models have a closed-form score (no numerical fallback is provided)"
        )),
        e => e,
    }
}

/// One entry of a model list file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub graph: GraphSpec,
    #[serde(default)]
    pub log_prior: f64,
}

/// Scoring outcome for one listed model.
#[derive(Clone, Debug, Serialize)]
pub struct ScoreRow {
    /// Position in the input list (0-based).
    pub index: usize,
    pub name: Option<String>,
    pub log_score: Option<f64>,
    pub log_prior: f64,
    pub verdict: Option<String>,
    pub threshold: Option<f64>,
    pub runtime_ms: f64,
    pub error: Option<String>,
}

/// Scores every model; rows with errors are kept but listed after the
/// ranked ones. Ties keep input order.
pub fn compare_models(
    models: &[ModelEntry],
    prior: &DYPrior<f64>,
    stats: &SufficientStats<f64>,
) -> Vec<ScoreRow> {
    let mut rows: Vec<ScoreRow> = models
        .par_iter()
        .enumerate()
        .map(|(index, m)| {
            let start = Instant::now();
            let mut row = ScoreRow {
                index,
                name: m.name.clone(),
                log_score: None,
                log_prior: m.log_prior,
                verdict: None,
                threshold: None,
                runtime_ms: 0.0,
                error: None,
            };
            let result = (|| -> Result<()> {
                let g = ColoredGraph::from_spec(&m.graph)?;
                let model =
                    BcModel::<f64>::from_graph(&g, &ModelOptions::default()).map_err(|e| {
                        if let Ok(v) = crate::cer::classify(&g) {
                            row.verdict = Some(v.name().to_string());
                        }
                        not_cer_hint(e)
                    })?;
                row.verdict = model.relabeling().map(|r| r.verdict.name().to_string());
                row.threshold = Some(model.constants().convergence_threshold());
                row.log_score = Some(score_with(&model, prior, stats, m.log_prior)?);
                Ok(())
            })();
            if let Err(e) = result {
                row.error = Some(e.to_string());
                row.log_score = None;
            }
            row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            row
        })
        .collect();
    rows.sort_by(|a, b| match (a.log_score, b.log_score) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ingest_basic() {
        let st: SufficientStats<f64> = ingest_data("1,0\n".as_bytes(), 2, false).unwrap();
        assert_eq!(st.n, 1);
        assert_eq!(st.u, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let st2: SufficientStats<f64> = ingest_data("a,b\n1,2\n1,2\n".as_bytes(), 2, true).unwrap();
        assert_eq!(st2.n, 2);
        assert_eq!(st2.u[(0, 1)], 4.0);
        let empty: SufficientStats<f64> = ingest_data("".as_bytes(), 3, false).unwrap();
        assert_eq!(empty.n, 0);
        assert!(empty.u.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn ingest_errors() {
        assert!(ingest_data::<f64, _>("1,x\n".as_bytes(), 2, false).is_err());
        assert!(ingest_data::<f64, _>("1,2,3\n".as_bytes(), 2, false).is_err());
    }

    #[test]
    fn prior_validation() {
        assert!(DYPrior::new(0.0, DMatrix::<f64>::identity(2, 2)).is_err());
        assert!(DYPrior::new(3.0, -DMatrix::<f64>::identity(2, 2)).is_err());
        assert!(DYPrior::new(3.0, DMatrix::<f64>::identity(2, 2)).is_ok());
    }
}
