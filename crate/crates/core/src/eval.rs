//! Evaluation against self-reported levels: tie-aware Spearman correlation
//! with a t-approximation p-value, the incoming-vote threshold sweep, and
//! the scalar objective (mean r over significant thresholds).

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::dataset::VoteDataset;

/// Significance level for a sweep record to count toward the objective.
pub const SIGNIFICANCE_LEVEL: f64 = 0.01;
/// Smallest user subset for which a correlation is attempted in a sweep.
pub const MIN_SUBSET: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unknown gold label '{0}'")]
    UnknownLabel(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooFew(usize),
    #[error("no user has an incoming vote and a gold label")]
    NoEligibleUsers,
}

/// Numeric gold labels per user index, extracted from self-reported levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldLabels {
    labels: Vec<Option<u8>>,
}

impl GoldLabels {
    /// Pull the self-reported levels out of a dataset.
    pub fn from_dataset(dataset: &VoteDataset) -> GoldLabels {
        GoldLabels {
            labels: dataset
                .users()
                .iter()
                .map(|u| u.self_level.map(|l| l.numeric()))
                .collect(),
        }
    }

    pub fn from_vec(labels: Vec<Option<u8>>) -> GoldLabels {
        assert!(labels.iter().flatten().all(|&l| (1..=5).contains(&l)));
        GoldLabels { labels }
    }

    pub fn get(&self, user_idx: usize) -> Option<u8> {
        self.labels[user_idx]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labeled_users(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|v| (i, v)))
    }
}

/// Strict mapping from a level string to the 1..=5 scale.
pub fn gold_numeric(label: &str) -> Result<u8, EvalError> {
    crate::dataset::Level::parse(label)
        .map(|l| l.numeric())
        .ok_or_else(|| EvalError::UnknownLabel(label.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Average ranks (1-based), ties receiving the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Tie-aware Spearman: Pearson correlation on average ranks, p-value from
/// the two-sided t approximation with n-2 degrees of freedom. Returns
/// `Ok(None)` when either vector is constant (the correlation is
/// undefined, never reported as 0). For n < 4 the p-value is fixed at 1.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<CorrelationResult>, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(EvalError::TooFew(n));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let Some(r) = pearson(&rx, &ry) else {
        return Ok(None);
    };
    let r = r.clamp(-1.0, 1.0);
    let p = if n < 4 {
        1.0
    } else if (1.0 - r * r) <= f64::EPSILON {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 2");
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Ok(Some(CorrelationResult { r, p, n }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta: u64,
    pub n_users: usize,
    pub result: Option<CorrelationResult>,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    /// Mean r over significant records; `None` when no record is significant.
    pub objective: Option<f64>,
}

/// Sweep the incoming-vote threshold from 1 to the top-voted user's count.
/// At each threshold, users with at least that many incoming votes and a
/// gold label form the correlation subset.
pub fn theta_sweep(
    pr: &[f64],
    counts: &[u64],
    gold: &GoldLabels,
) -> Result<SweepReport, EvalError> {
    assert_eq!(pr.len(), counts.len());
    assert_eq!(pr.len(), gold.len());
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let any_eligible = (0..pr.len()).any(|i| counts[i] >= 1 && gold.get(i).is_some());
    if max_count == 0 || !any_eligible {
        return Err(EvalError::NoEligibleUsers);
    }
    let mut records = Vec::with_capacity(max_count as usize);
    for theta in 1..=max_count {
        let subset: Vec<usize> = (0..pr.len())
            .filter(|&i| counts[i] >= theta && gold.get(i).is_some())
            .collect();
        let n_users = subset.len();
        let result = if n_users >= MIN_SUBSET {
            let xs: Vec<f64> = subset.iter().map(|&i| pr[i]).collect();
            let ys: Vec<f64> = subset
                .iter()
                .map(|&i| gold.get(i).unwrap() as f64)
                .collect();
            spearman(&xs, &ys)?
        } else {
            None
        };
        let significant = result.is_some_and(|c| c.p < SIGNIFICANCE_LEVEL);
        records.push(SweepRecord {
            theta,
            n_users,
            result,
            significant,
        });
    }
    let objective = objective_of(&records);
    Ok(SweepReport { records, objective })
}

fn objective_of(records: &[SweepRecord]) -> Option<f64> {
    let sig: Vec<f64> = records
        .iter()
        .filter(|rec| rec.significant)
        .filter_map(|rec| rec.result.map(|c| c.r))
        .collect();
    if sig.is_empty() {
        None
    } else {
        Some(sig.iter().sum::<f64>() / sig.len() as f64)
    }
}

/// Mean r over significant records; `None` when nothing is significant
/// (the search treats that as worst-possible).
pub fn objective(report: &SweepReport) -> Option<f64> {
    objective_of(&report.records)
}
