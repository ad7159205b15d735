//! Seedable generator of synthetic collaborative-network datasets with
//! planted proficiency levels.
//!
//! A minority of users authors the answers (power-law skew over a random
//! activity order, biased toward higher levels). Each answer gets a
//! quality equal to its author's level plus noise; voters judge an answer
//! against the median quality of the answers they see, and are correct
//! with probability `p_correct`. At `p_correct = 0.5` the votes carry no
//! information about the planted levels.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Answer, AnswerId, Level, Polarity, User, UserId, VoteDataset, VoteEvent};
use crate::eval::GoldLabels;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenParams {
    pub n_users: usize,
    /// Users per level, index 0 = Beginner (1) up to index 4 = Native (5).
    /// Must sum to `n_users`.
    pub level_counts: [usize; 5],
    pub n_answers: usize,
    /// Power-law exponent of the answerer skew; larger means fewer users
    /// author most answers.
    #[serde(default = "default_skew")]
    pub answerer_skew: f64,
    /// Votes per answer, sampled uniformly from this inclusive range.
    pub votes_per_answer: (usize, usize),
    /// Probability a voter's judgment matches the answer's pool-relative
    /// quality. 0.5 is pure noise.
    pub p_correct: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_noise")]
    pub quality_noise: f64,
}

fn default_skew() -> f64 {
    1.0
}

fn default_noise() -> f64 {
    0.5
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("n_users must be at least 10, got {0}")]
    TooFewUsers(usize),
    #[error("level counts sum to {0}, expected n_users = {1}")]
    LevelCountMismatch(usize, usize),
    #[error("votes_per_answer range ({0}, {1}) is invalid")]
    BadVoteRange(usize, usize),
    #[error("votes_per_answer max {0} exceeds the {1} available voters")]
    TooManyVoters(usize, usize),
    #[error("p_correct = {0} is outside [0.5, 1]")]
    BadPCorrect(f64),
    #[error("n_answers must be positive")]
    NoAnswers,
    #[error("quality_noise must be nonnegative and finite")]
    BadNoise,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_users < 10 {
            return Err(GenError::TooFewUsers(self.n_users));
        }
        let total: usize = self.level_counts.iter().sum();
        if total != self.n_users {
            return Err(GenError::LevelCountMismatch(total, self.n_users));
        }
        if self.n_answers == 0 {
            return Err(GenError::NoAnswers);
        }
        let (lo, hi) = self.votes_per_answer;
        if lo > hi || lo == 0 {
            return Err(GenError::BadVoteRange(lo, hi));
        }
        if hi > self.n_users - 1 {
            return Err(GenError::TooManyVoters(hi, self.n_users - 1));
        }
        if !(0.5..=1.0).contains(&self.p_correct) {
            return Err(GenError::BadPCorrect(self.p_correct));
        }
        if !self.quality_noise.is_finite() || self.quality_noise < 0.0 {
            return Err(GenError::BadNoise);
        }
        Ok(())
    }
}

/// Generate a dataset and its planted gold labels. Deterministic for a
/// fixed seed.
pub fn generate_network(params: &GenParams) -> Result<(VoteDataset, GoldLabels), GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n_users;

    // plant levels: expand the count table and shuffle
    let mut levels: Vec<u8> = Vec::with_capacity(n);
    for (i, &count) in params.level_counts.iter().enumerate() {
        levels.extend(std::iter::repeat_n(i as u8 + 1, count));
    }
    levels.shuffle(&mut rng);

    let users: Vec<User> = (0..n)
        .map(|i| User {
            id: UserId(format!("u{i:05}")),
            self_level: Level::from_numeric(levels[i]),
        })
        .collect();
    // ids are zero-padded, so lexicographic order equals index order and
    // the planted levels line up with the dataset indexing
    let gold = GoldLabels::from_vec(levels.iter().map(|&l| Some(l)).collect());

    // answerer weights: power-law over a random activity order, scaled by
    // the squared level so higher levels answer more
    let mut activity_order: Vec<usize> = (0..n).collect();
    activity_order.shuffle(&mut rng);
    let mut weights = vec![0.0f64; n];
    for (pos, &u) in activity_order.iter().enumerate() {
        let zipf = 1.0 / ((pos + 1) as f64).powf(params.answerer_skew);
        let lvl = levels[u] as f64;
        weights[u] = zipf * lvl * lvl;
    }
    let author_dist = WeightedIndex::new(&weights).expect("positive weights");

    let noise = Normal::new(0.0, params.quality_noise.max(f64::MIN_POSITIVE)).expect("valid");
    let mut answers = Vec::with_capacity(params.n_answers);
    let mut qualities = Vec::with_capacity(params.n_answers);
    for i in 0..params.n_answers {
        let author = author_dist.sample(&mut rng);
        let quality = levels[author] as f64 + noise.sample(&mut rng);
        answers.push(Answer {
            id: AnswerId(format!("a{i:05}")),
            author: users[author].id.clone(),
            text: None,
        });
        qualities.push(quality);
    }

    // assign voters per answer, then decide polarities against each
    // voter's personal median quality
    let (lo, hi) = params.votes_per_answer;
    let mut pairs: Vec<(usize, usize)> = Vec::new(); // (answer, voter)
    for (ai, answer) in answers.iter().enumerate() {
        let author_idx: usize = answer.author.0[1..].parse().unwrap();
        let k = rng.gen_range(lo..=hi);
        let picked = rand::seq::index::sample(&mut rng, n - 1, k);
        for raw in picked.iter() {
            let voter = if raw >= author_idx { raw + 1 } else { raw };
            pairs.push((ai, voter));
        }
    }

    let mut per_voter: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &(ai, voter) in &pairs {
        per_voter[voter].push(qualities[ai]);
    }
    let medians: Vec<f64> = per_voter
        .iter()
        .map(|qs| {
            if qs.is_empty() {
                return 0.0;
            }
            let mut sorted = qs.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = sorted.len();
            if m % 2 == 1 {
                sorted[m / 2]
            } else {
                (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0
            }
        })
        .collect();

    let votes: Vec<VoteEvent> = pairs
        .iter()
        .map(|&(ai, voter)| {
            let judged_good = qualities[ai] >= medians[voter];
            let correct = rng.gen_bool(params.p_correct);
            let up = judged_good == correct;
            VoteEvent {
                answer: answers[ai].id.clone(),
                voter: users[voter].id.clone(),
                polarity: if up { Polarity::Up } else { Polarity::Down },
            }
        })
        .collect();

    let dataset = VoteDataset::new(users, answers, votes).expect("generator emits valid data");
    Ok((dataset, gold))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> GenParams {
        GenParams {
            n_users: 50,
            level_counts: [10, 10, 10, 10, 10],
            n_answers: 40,
            answerer_skew: 1.0,
            votes_per_answer: (2, 6),
            p_correct: 0.9,
            seed: 7,
            quality_noise: 0.5,
        }
    }

    #[test]
    fn same_seed_same_dataset() {
        let (a, _) = generate_network(&params()).unwrap();
        let (b, _) = generate_network(&params()).unwrap();
        assert_eq!(a.users(), b.users());
        assert_eq!(a.answers(), b.answers());
        assert_eq!(a.votes(), b.votes());
    }

    #[test]
    fn different_seed_differs() {
        let (a, _) = generate_network(&params()).unwrap();
        let mut p = params();
        p.seed = 8;
        let (b, _) = generate_network(&p).unwrap();
        assert_ne!(a.votes(), b.votes());
    }

    #[test]
    fn vote_totals_and_validity() {
        let (ds, _) = generate_network(&params()).unwrap();
        let total = ds.votes().len();
        assert!((40 * 2..=40 * 6).contains(&total));
        // VoteDataset::new would have rejected self-votes and duplicates
        assert_eq!(ds.n_users(), 50);
    }

    #[test]
    fn population_shape_matches_requested_counts() {
        let mut p = params();
        p.n_users = 377;
        p.level_counts = [50, 140, 66, 52, 69];
        p.n_answers = 200;
        let (ds, gold) = generate_network(&p).unwrap();
        let mut counts = [0usize; 5];
        for (_, l) in gold.labeled_users() {
            counts[(l - 1) as usize] += 1;
        }
        assert_eq!(counts, [50, 140, 66, 52, 69]);
        let native = ds
            .users()
            .iter()
            .filter(|u| u.self_level == Some(Level::Native))
            .count();
        assert_eq!(native, 69);
    }

    #[test]
    fn negative_votes_exist_even_with_accurate_voters() {
        let (ds, _) = generate_network(&params()).unwrap();
        let downs = ds
            .votes()
            .iter()
            .filter(|v| v.polarity == Polarity::Down)
            .count();
        assert!(downs > 0);
    }

    #[test]
    fn infeasible_params_rejected() {
        let mut p = params();
        p.votes_per_answer = (2, 60);
        assert_eq!(
            generate_network(&p).unwrap_err(),
            GenError::TooManyVoters(60, 49)
        );
        let mut p = params();
        p.level_counts = [1, 1, 1, 1, 1];
        assert!(matches!(
            generate_network(&p).unwrap_err(),
            GenError::LevelCountMismatch(5, 50)
        ));
        let mut p = params();
        p.p_correct = 0.2;
        assert_eq!(generate_network(&p).unwrap_err(), GenError::BadPCorrect(0.2));
    }
}
