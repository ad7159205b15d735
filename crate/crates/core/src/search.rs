//! Coarse-to-fine grid search over (d, alpha, beta, delta) for a fixed
//! signal-type selection.
//!
//! Stage 1 scans the full unit grid at step 0.1 over the active parameters
//! (d and alpha always; beta only when an iav type is selected; delta only
//! when an iov type is selected). Each later stage scans a closed box of
//! half-width one previous step around the incumbent at the finer step,
//! clipped to [0,1]. Grid coordinates are integers in hundredths so the
//! evaluated points are exact.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, RankConfig, TypeSelection};
use crate::dataset::VoteDataset;
use crate::eval::{theta_sweep, EvalError, GoldLabels};
use crate::matrix::{StochasticMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::rank::{combine, RankError};
use crate::signals::SignalSet;

/// Grid resolutions of the three stages, in hundredths.
pub const STAGE_STEPS: [u32; 3] = [10, 5, 1];

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: RankConfig,
    /// `None` when no coarse configuration produced a significant
    /// correlation (a no-signal outcome; refinement is skipped).
    pub best_objective: Option<f64>,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub objective: Option<f64>,
}

/// Grid point in hundredths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Point {
    d: u32,
    alpha: u32,
    beta: u32,
    delta: u32,
}

impl Point {
    fn as_fractions(self) -> (f64, f64, f64, f64) {
        (
            self.d as f64 / 100.0,
            self.alpha as f64 / 100.0,
            self.beta as f64 / 100.0,
            self.delta as f64 / 100.0,
        )
    }

    fn key(self) -> (u32, u32, u32, u32) {
        (self.d, self.alpha, self.beta, self.delta)
    }
}

/// Shared read-only state for one search: normalized matrices per side,
/// the threshold counts, and the gold labels.
pub struct SearchContext {
    exp_plus: Option<StochasticMatrix>,
    iav: Option<StochasticMatrix>,
    exp_minus: Option<StochasticMatrix>,
    iov: Option<StochasticMatrix>,
    counts: Vec<u64>,
    gold: GoldLabels,
    tol: f64,
    max_iter: u32,
}

impl SearchContext {
    pub fn new(
        dataset: &VoteDataset,
        signals: &SignalSet,
        types: TypeSelection,
    ) -> Result<SearchContext, SearchError> {
        // validate the selection with a throwaway config at neutral params
        let probe = RankConfig::new("probe", types, 0.5, 0.5, 0.0, 0.0)?;
        let counts = dataset.incoming_vote_counts(signals, &probe);
        let gold = GoldLabels::from_dataset(dataset);

        let norm = |m: &crate::matrix::CountMatrix| m.column_normalize().expect("n > 0");
        let exp_plus = types.exp_plus.then(|| norm(&signals.exp_plus));
        let iav = match (types.iav_plus, types.iav_minus) {
            (true, true) => Some(norm(&signals.iav_plus.plus(&signals.iav_minus).unwrap())),
            (true, false) => Some(norm(&signals.iav_plus)),
            (false, true) => Some(norm(&signals.iav_minus)),
            (false, false) => None,
        };
        let exp_minus = types.exp_minus.then(|| norm(&signals.exp_minus));
        let iov = match (types.iov_plus, types.iov_minus) {
            (true, true) => Some(norm(&signals.iov_plus.plus(&signals.iov_minus).unwrap())),
            (true, false) => Some(norm(&signals.iov_plus)),
            (false, true) => Some(norm(&signals.iov_minus)),
            (false, false) => None,
        };
        Ok(SearchContext {
            exp_plus,
            iav,
            exp_minus,
            iov,
            counts,
            gold,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        })
    }

    fn side(
        exp: &Option<StochasticMatrix>,
        imp: &Option<StochasticMatrix>,
        w: f64,
    ) -> StochasticMatrix {
        match (exp, imp) {
            (Some(e), Some(i)) => e.mix(i, w).expect("same n"),
            (Some(e), None) => e.clone(),
            (None, Some(i)) => i.clone(),
            (None, None) => unreachable!("selection validated"),
        }
    }

    /// Objective of one grid point.
    pub fn evaluate(&self, d: f64, alpha: f64, beta: f64, delta: f64) -> Result<Option<f64>, SearchError> {
        let m_plus = Self::side(&self.exp_plus, &self.iav, beta);
        let m_minus = Self::side(&self.exp_minus, &self.iov, delta);
        let plus = m_plus
            .damp(d)
            .map_err(RankError::from)?
            .power_iterate(self.tol, self.max_iter);
        let minus = m_minus
            .damp(d)
            .map_err(RankError::from)?
            .power_iterate(self.tol, self.max_iter);
        let pr = combine(&plus, &minus, alpha);
        let report = theta_sweep(&pr.pr, &self.counts, &self.gold)?;
        Ok(report.objective)
    }

}

/// Sequential grid evaluation, in grid order.
pub fn evaluate_grid_seq(
    ctx: &SearchContext,
    points: &[(f64, f64, f64, f64)],
) -> Result<Vec<Option<f64>>, SearchError> {
    points
        .iter()
        .map(|&(d, a, b, dl)| ctx.evaluate(d, a, b, dl))
        .collect()
}

/// Parallel grid evaluation; the output order matches the input order, so
/// the downstream reduction is independent of scheduling.
#[cfg(feature = "parallel")]
pub fn evaluate_grid_par(
    ctx: &SearchContext,
    points: &[(f64, f64, f64, f64)],
) -> Result<Vec<Option<f64>>, SearchError> {
    points
        .par_iter()
        .map(|&(d, a, b, dl)| ctx.evaluate(d, a, b, dl))
        .collect()
}

fn axis_full(step: u32) -> Vec<u32> {
    (0..=100).step_by(step as usize).collect()
}

fn axis_box(center: u32, half_width: u32, step: u32) -> Vec<u32> {
    let lo = center.saturating_sub(half_width);
    let hi = (center + half_width).min(100);
    // walk outward from lo on the fine step; the center is always on-grid
    let mut v: Vec<u32> = (lo..=hi).filter(|x| (x - lo).is_multiple_of(step)).collect();
    if !v.contains(&center) {
        v.push(center);
        v.sort_unstable();
    }
    v
}

fn cartesian(axes: [&[u32]; 4]) -> Vec<Point> {
    let mut out = Vec::new();
    for &d in axes[0] {
        for &alpha in axes[1] {
            for &beta in axes[2] {
                for &delta in axes[3] {
                    out.push(Point { d, alpha, beta, delta });
                }
            }
        }
    }
    out
}

fn better(candidate: (Point, Option<f64>), incumbent: (Point, Option<f64>)) -> bool {
    match (candidate.1, incumbent.1) {
        (Some(c), Some(i)) => {
            if c != i {
                c > i
            } else {
                candidate.0.key() < incumbent.0.key()
            }
        }
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => candidate.0.key() < incumbent.0.key(),
    }
}

/// Optional pins fixing a parameter to a constant instead of searching it.
/// Values are rounded to the nearest hundredth.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParamPins {
    pub d: Option<f64>,
    pub alpha: Option<f64>,
}

/// Full coarse-to-fine search. Deterministic: the best point is reduced in
/// grid order, with ties broken toward lexicographically smaller
/// (d, alpha, beta, delta).
pub fn grid_search(
    dataset: &VoteDataset,
    signals: &SignalSet,
    types: TypeSelection,
) -> Result<SearchResult, SearchError> {
    grid_search_pinned(dataset, signals, types, ParamPins::default())
}

/// Like [`grid_search`] but with some parameters held fixed.
pub fn grid_search_pinned(
    dataset: &VoteDataset,
    signals: &SignalSet,
    types: TypeSelection,
    pins: ParamPins,
) -> Result<SearchResult, SearchError> {
    let ctx = SearchContext::new(dataset, signals, types)?;
    let beta_active = types.any_iav();
    let delta_active = types.any_iov();
    let fixed = [0u32];
    let to_hundredths = |v: f64| (v * 100.0).round().clamp(0.0, 100.0) as u32;
    let pin_d = pins.d.map(to_hundredths);
    let pin_alpha = pins.alpha.map(to_hundredths);

    let mut trace: Vec<(Point, Option<f64>)> = Vec::new();
    let mut incumbent: Option<(Point, Option<f64>)> = None;

    for (stage, &step) in STAGE_STEPS.iter().enumerate() {
        let points = if stage == 0 {
            let d_axis = pin_d.map_or_else(|| axis_full(step), |v| vec![v]);
            let a_axis = pin_alpha.map_or_else(|| axis_full(step), |v| vec![v]);
            let b_axis = if beta_active { axis_full(step) } else { fixed.to_vec() };
            let dl_axis = if delta_active { axis_full(step) } else { fixed.to_vec() };
            cartesian([&d_axis, &a_axis, &b_axis, &dl_axis])
        } else {
            let (inc, _) = incumbent.expect("set by stage 1");
            let prev = STAGE_STEPS[stage - 1];
            let d_axis = pin_d.map_or_else(|| axis_box(inc.d, prev, step), |v| vec![v]);
            let a_axis = pin_alpha.map_or_else(|| axis_box(inc.alpha, prev, step), |v| vec![v]);
            let b_axis = if beta_active { axis_box(inc.beta, prev, step) } else { fixed.to_vec() };
            let dl_axis = if delta_active { axis_box(inc.delta, prev, step) } else { fixed.to_vec() };
            cartesian([&d_axis, &a_axis, &b_axis, &dl_axis])
        };

        // skip points already evaluated in earlier stages
        let fresh: Vec<Point> = points
            .iter()
            .copied()
            .filter(|p| !trace.iter().any(|(q, _)| q == p))
            .collect();
        let coords: Vec<(f64, f64, f64, f64)> =
            fresh.iter().map(|p| p.as_fractions()).collect();
        #[cfg(feature = "parallel")]
        let objectives = evaluate_grid_par(&ctx, &coords)?;
        #[cfg(not(feature = "parallel"))]
        let objectives = evaluate_grid_seq(&ctx, &coords)?;
        for (p, o) in fresh.into_iter().zip(objectives) {
            trace.push((p, o));
        }

        // reduce over every point of this stage's grid, in grid order
        for p in &points {
            let o = trace
                .iter()
                .find(|(q, _)| q == p)
                .map(|&(_, o)| o)
                .expect("evaluated");
            let cand = (*p, o);
            incumbent = Some(match incumbent {
                None => cand,
                Some(inc) => {
                    if better(cand, inc) {
                        cand
                    } else {
                        inc
                    }
                }
            });
        }

        // no signal anywhere on the coarse grid: report and stop refining
        if stage == 0 && incumbent.is_none_or(|(_, o)| o.is_none()) {
            break;
        }
    }

    let (best_point, best_objective) = incumbent.expect("at least one stage ran");
    let (d, alpha, beta, delta) = best_point.as_fractions();
    let best = RankConfig::new("search-best", types, d, alpha, beta, delta)?;
    let trace = trace
        .into_iter()
        .map(|(p, objective)| {
            let (d, alpha, beta, delta) = p.as_fractions();
            TraceEntry { d, alpha, beta, delta, objective }
        })
        .collect();
    Ok(SearchResult {
        best,
        best_objective,
        trace,
    })
}
