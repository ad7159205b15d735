//! Comparison measures: the raw incoming-vote-count baseline and the
//! vocabulary-profile baseline built on the six CEFR word lists.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::config::RankConfig;
use crate::dataset::{UserId, VoteDataset};
use crate::eval::{spearman, theta_sweep, CorrelationResult, EvalError, GoldLabels, SweepReport};
use crate::signals::SignalSet;

pub const CEFR_LEVELS: [&str; 6] = ["A1", "A2", "B1", "B2", "C1", "C2"];

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("profile file {0} is empty")]
    EmptyProfile(PathBuf),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no user has a vocabulary score")]
    NoScorableUsers,
}

/// Spearman correlation between raw incoming vote counts (for the config's
/// selected signal types) and the gold labels, over all labeled users.
/// Constant counts make the correlation undefined (`None`).
pub fn votes_baseline(
    dataset: &VoteDataset,
    signals: &SignalSet,
    config: &RankConfig,
    gold: &GoldLabels,
) -> Result<Option<CorrelationResult>, BaselineError> {
    let counts = dataset.incoming_vote_counts(signals, config);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, label) in gold.labeled_users() {
        xs.push(counts[i] as f64);
        ys.push(label as f64);
    }
    Ok(spearman(&xs, &ys)?)
}

/// The six CEFR vocabulary profiles, lowercased and deduplicated.
#[derive(Debug, Clone)]
pub struct CefrProfileSet {
    levels: [HashSet<String>; 6],
}

/// Loader report: per-level sizes, pairwise overlaps, and any entries that
/// contain whitespace (multi-word lines are kept as single tokens and will
/// never match the tokenizer output).
#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub sizes: [usize; 6],
    /// overlaps[i][j] = |level_i ∩ level_j| for i < j
    pub overlaps: Vec<(String, String, usize)>,
    pub multiword_entries: usize,
}

impl CefrProfileSet {
    /// Load `A1.txt` .. `C2.txt` from a directory, one word per line.
    pub fn load(dir: &Path) -> Result<(CefrProfileSet, ProfileReport), BaselineError> {
        let mut levels: [HashSet<String>; 6] = Default::default();
        let mut multiword = 0;
        for (i, name) in CEFR_LEVELS.iter().enumerate() {
            let path = dir.join(format!("{name}.txt"));
            let content = std::fs::read_to_string(&path).map_err(|source| BaselineError::Io {
                path: path.clone(),
                source,
            })?;
            for line in content.lines() {
                let word = line.trim().to_lowercase();
                if word.is_empty() {
                    continue;
                }
                if word.contains(char::is_whitespace) {
                    multiword += 1;
                }
                levels[i].insert(word);
            }
            if levels[i].is_empty() {
                return Err(BaselineError::EmptyProfile(path));
            }
        }
        let set = CefrProfileSet { levels };
        let report = set.report(multiword);
        Ok((set, report))
    }

    /// Build from in-memory word lists (tests and embedders).
    pub fn from_words(lists: [&[&str]; 6]) -> CefrProfileSet {
        let mut levels: [HashSet<String>; 6] = Default::default();
        for (i, list) in lists.iter().enumerate() {
            for w in *list {
                levels[i].insert(w.to_lowercase());
            }
        }
        CefrProfileSet { levels }
    }

    pub fn level(&self, i: usize) -> &HashSet<String> {
        &self.levels[i]
    }

    fn report(&self, multiword_entries: usize) -> ProfileReport {
        let sizes = std::array::from_fn(|i| self.levels[i].len());
        let mut overlaps = Vec::new();
        for (i, name_i) in CEFR_LEVELS.iter().enumerate() {
            for (j, name_j) in CEFR_LEVELS.iter().enumerate().skip(i + 1) {
                let common = self.levels[i].intersection(&self.levels[j]).count();
                overlaps.push((name_i.to_string(), name_j.to_string(), common));
            }
        }
        ProfileReport {
            sizes,
            overlaps,
            multiword_entries,
        }
    }
}

/// Per-user vocabulary score: level overlaps and the weighted-average
/// proficiency value in [1, 6]. Absent when no word matches any list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CefrScore {
    pub user: UserId,
    pub overlaps: [usize; 6],
    pub score: Option<f64>,
}

/// Lowercase word types from a text: runs of Unicode letters, keeping
/// internal apostrophes and hyphens. No stemming.
pub fn tokenize(text: &str) -> HashSet<String> {
    let mut words = HashSet::new();
    let lower = text.to_lowercase();
    let is_word_char = |c: char| c.is_alphabetic();
    let is_joiner = |c: char| c == '\'' || c == '\u{2019}' || c == '-';
    let chars: Vec<char> = lower.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if !is_word_char(chars[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() {
            if is_word_char(chars[i]) {
                i += 1;
            } else if is_joiner(chars[i]) && i + 1 < chars.len() && is_word_char(chars[i + 1]) {
                i += 2;
            } else {
                break;
            }
        }
        words.insert(chars[start..i].iter().collect());
    }
    words
}

/// Union of word types over all texts the user authored.
pub fn tokenize_answers(dataset: &VoteDataset, user: &UserId) -> HashSet<String> {
    let mut words = HashSet::new();
    for answer in dataset.answers() {
        if &answer.author == user {
            if let Some(text) = &answer.text {
                words.extend(tokenize(text));
            }
        }
    }
    words
}

/// Weighted-average level of a word set: sum(i * overlap_i) / sum(overlap_i)
/// with level indices 1..=6. A word in several lists counts toward each.
pub fn cefr_score(user: &UserId, words: &HashSet<String>, profiles: &CefrProfileSet) -> CefrScore {
    let overlaps: [usize; 6] =
        std::array::from_fn(|i| words.iter().filter(|w| profiles.level(i).contains(*w)).count());
    let total: usize = overlaps.iter().sum();
    let score = if total == 0 {
        None
    } else {
        let weighted: usize = overlaps.iter().enumerate().map(|(i, w)| (i + 1) * w).sum();
        Some(weighted as f64 / total as f64)
    };
    CefrScore {
        user: user.clone(),
        overlaps,
        score,
    }
}

/// Vocabulary scores for every user who authored at least one answer.
pub fn score_all_authors(dataset: &VoteDataset, profiles: &CefrProfileSet) -> Vec<CefrScore> {
    let mut authors: Vec<&UserId> = dataset.answers().iter().map(|a| &a.author).collect();
    authors.sort();
    authors.dedup();
    authors
        .into_iter()
        .map(|u| cefr_score(u, &tokenize_answers(dataset, u), profiles))
        .collect()
}

/// Threshold-swept Spearman of the vocabulary scores against the gold
/// labels, using the config's incoming-vote counts for the threshold,
/// restricted to users with a defined score.
pub fn cefr_baseline_correlation(
    dataset: &VoteDataset,
    signals: &SignalSet,
    config: &RankConfig,
    profiles: &CefrProfileSet,
    gold: &GoldLabels,
) -> Result<SweepReport, BaselineError> {
    let scores = score_all_authors(dataset, profiles);
    let n = dataset.n_users();
    let mut value = vec![None; n];
    for s in &scores {
        if let Some(p) = s.score {
            let idx = dataset.user_idx(&s.user).expect("author exists");
            value[idx] = Some(p);
        }
    }
    if value.iter().all(|v| v.is_none()) {
        return Err(BaselineError::NoScorableUsers);
    }
    let counts = dataset.incoming_vote_counts(signals, config);
    // zero out users without a score so the sweep never selects them
    let masked_counts: Vec<u64> = counts
        .iter()
        .zip(&value)
        .map(|(&c, v)| if v.is_some() { c } else { 0 })
        .collect();
    let pu: Vec<f64> = value.iter().map(|v| v.unwrap_or(0.0)).collect();
    let masked_gold = GoldLabels::from_vec(
        (0..n)
            .map(|i| if value[i].is_some() { gold.get(i) } else { None })
            .collect(),
    );
    Ok(theta_sweep(&pu, &masked_counts, &masked_gold)?)
}
