//! Signed rank computation: assemble the positive and negative transition
//! matrices from the selected signals, run both power iterations, and
//! combine the results as `(1-alpha)*PR+ - alpha*PR-`.

use thiserror::Error;

use crate::config::{ConfigError, RankConfig};
use crate::matrix::{
    CountMatrix, MatrixError, PowerIteration, StochasticMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::signals::SignalSet;

#[derive(Debug, Error)]
pub enum RankError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Output of a full ranking run: the signed scores plus both underlying
/// probability vectors and convergence metadata.
#[derive(Debug, Clone)]
pub struct ProficiencyRank {
    pub pr: Vec<f64>,
    pub pr_plus: Vec<f64>,
    pub pr_minus: Vec<f64>,
    pub plus_iterations: u32,
    pub minus_iterations: u32,
    pub converged: bool,
}

fn selected_sum(
    first: Option<&CountMatrix>,
    second: Option<&CountMatrix>,
) -> Option<CountMatrix> {
    match (first, second) {
        (Some(a), Some(b)) => Some(a.plus(b).expect("same dataset")),
        (Some(a), None) => Some(a.clone()),
        (None, Some(b)) => Some(b.clone()),
        (None, None) => None,
    }
}

/// Mix an explicit matrix with an implicit one at weight `w` on the
/// implicit side. Raw implicit counts are summed before a single
/// normalization; if only one side is selected its weight is 1.
fn build_side(
    explicit: Option<&CountMatrix>,
    implicit: Option<CountMatrix>,
    w: f64,
) -> Result<StochasticMatrix, RankError> {
    let exp_norm = explicit.map(|c| c.column_normalize()).transpose()?;
    let imp_norm = implicit.map(|c| c.column_normalize()).transpose()?;
    match (exp_norm, imp_norm) {
        (Some(e), Some(i)) => Ok(e.mix(&i, w)?),
        (Some(e), None) => Ok(e),
        (None, Some(i)) => Ok(i),
        (None, None) => unreachable!("config validation requires a selected type"),
    }
}

/// The positive transition matrix `(1-beta)*norm(exp+) + beta*norm(iav)`.
pub fn build_positive_matrix(
    signals: &SignalSet,
    config: &RankConfig,
) -> Result<StochasticMatrix, RankError> {
    config.validate()?;
    if !config.types.any_positive() {
        return Err(ConfigError::NoPositiveType.into());
    }
    let iav = selected_sum(
        config.types.iav_plus.then_some(&signals.iav_plus),
        config.types.iav_minus.then_some(&signals.iav_minus),
    );
    build_side(
        config.types.exp_plus.then_some(&signals.exp_plus),
        iav,
        config.beta,
    )
}

/// The negative transition matrix `(1-delta)*norm(exp-) + delta*norm(iov)`.
pub fn build_negative_matrix(
    signals: &SignalSet,
    config: &RankConfig,
) -> Result<StochasticMatrix, RankError> {
    config.validate()?;
    if !config.types.any_negative() {
        return Err(ConfigError::NoNegativeType.into());
    }
    let iov = selected_sum(
        config.types.iov_plus.then_some(&signals.iov_plus),
        config.types.iov_minus.then_some(&signals.iov_minus),
    );
    build_side(
        config.types.exp_minus.then_some(&signals.exp_minus),
        iov,
        config.delta,
    )
}

/// Full ranking run with default tolerance and iteration cap.
pub fn proficiency_rank(
    signals: &SignalSet,
    config: &RankConfig,
) -> Result<ProficiencyRank, RankError> {
    proficiency_rank_with(signals, config, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn proficiency_rank_with(
    signals: &SignalSet,
    config: &RankConfig,
    tol: f64,
    max_iter: u32,
) -> Result<ProficiencyRank, RankError> {
    let m_plus = build_positive_matrix(signals, config)?;
    let m_minus = build_negative_matrix(signals, config)?;
    let plus = m_plus.damp(config.d)?.power_iterate(tol, max_iter);
    let minus = m_minus.damp(config.d)?.power_iterate(tol, max_iter);
    Ok(combine(&plus, &minus, config.alpha))
}

/// `(1-alpha)*PR+ - alpha*PR-`, keeping both inputs and metadata.
pub fn combine(plus: &PowerIteration, minus: &PowerIteration, alpha: f64) -> ProficiencyRank {
    let pr = plus
        .vector
        .iter()
        .zip(&minus.vector)
        .map(|(p, m)| (1.0 - alpha) * p - alpha * m)
        .collect();
    ProficiencyRank {
        pr,
        pr_plus: plus.vector.clone(),
        pr_minus: minus.vector.clone(),
        plus_iterations: plus.iterations,
        minus_iterations: minus.iterations,
        converged: plus.converged && minus.converged,
    }
}
