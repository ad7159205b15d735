//! Implicit vote extraction from per-answer voter pools.
//!
//! Two voters of the same answer with equal polarity exchange mutual
//! implicit agreement votes (iav+ among upvoters, iav- among downvoters).
//! Voters of opposite polarity exchange one implicit opposition vote in
//! each direction: iov+ is the edge sourced at the positive voter, iov-
//! the edge sourced at the negative voter. Counts accumulate across pools,
//! one unit per co-vote pair per answer.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::config::SignalType;
use crate::dataset::{AnswerId, Polarity, VoteDataset};
use crate::matrix::CountMatrix;

/// The voters of one answer, split by polarity. Indices are dataset user
/// indices; the two sets are disjoint by the one-vote-per-answer rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterPool {
    pub answer: AnswerId,
    pub positives: Vec<usize>,
    pub negatives: Vec<usize>,
}

/// One pool per answer that received at least one vote, in answer order.
pub fn voter_pools(dataset: &VoteDataset) -> Vec<VoterPool> {
    let mut by_answer: std::collections::HashMap<&AnswerId, (Vec<usize>, Vec<usize>)> =
        std::collections::HashMap::new();
    for v in dataset.votes() {
        let idx = dataset.user_idx(&v.voter).expect("validated");
        let entry = by_answer.entry(&v.answer).or_default();
        match v.polarity {
            Polarity::Up => entry.0.push(idx),
            Polarity::Down => entry.1.push(idx),
        }
    }
    let mut pools: Vec<VoterPool> = by_answer
        .into_iter()
        .map(|(answer, (positives, negatives))| VoterPool {
            answer: answer.clone(),
            positives,
            negatives,
        })
        .collect();
    pools.sort_by(|a, b| a.answer.cmp(&b.answer));
    pools
}

/// The four implicit matrices in order (iav+, iav-, iov+, iov-).
pub fn implicit_count_matrices(
    dataset: &VoteDataset,
) -> (CountMatrix, CountMatrix, CountMatrix, CountMatrix) {
    let pools = voter_pools(dataset);
    let n = dataset.n_users();
    #[cfg(feature = "parallel")]
    {
        implicit_from_pools_par(n, &pools)
    }
    #[cfg(not(feature = "parallel"))]
    {
        implicit_from_pools_seq(n, &pools)
    }
}

fn empty_four(n: usize) -> (CountMatrix, CountMatrix, CountMatrix, CountMatrix) {
    (
        CountMatrix::zeros(n, SignalType::IavPlus),
        CountMatrix::zeros(n, SignalType::IavMinus),
        CountMatrix::zeros(n, SignalType::IovPlus),
        CountMatrix::zeros(n, SignalType::IovMinus),
    )
}

fn accumulate_pool(
    pool: &VoterPool,
    acc: &mut (CountMatrix, CountMatrix, CountMatrix, CountMatrix),
) {
    let (iav_plus, iav_minus, iov_plus, iov_minus) = acc;
    for (k, &u) in pool.positives.iter().enumerate() {
        for &v in &pool.positives[k + 1..] {
            iav_plus.add(u, v, 1);
            iav_plus.add(v, u, 1);
        }
    }
    for (k, &u) in pool.negatives.iter().enumerate() {
        for &v in &pool.negatives[k + 1..] {
            iav_minus.add(u, v, 1);
            iav_minus.add(v, u, 1);
        }
    }
    for &p in &pool.positives {
        for &q in &pool.negatives {
            // the positive voter sources an opposition vote toward the
            // negative voter, and vice versa
            iov_plus.add(q, p, 1);
            iov_minus.add(p, q, 1);
        }
    }
}

pub fn implicit_from_pools_seq(
    n: usize,
    pools: &[VoterPool],
) -> (CountMatrix, CountMatrix, CountMatrix, CountMatrix) {
    let mut acc = empty_four(n);
    for pool in pools {
        accumulate_pool(pool, &mut acc);
    }
    acc
}

#[cfg(feature = "parallel")]
pub fn implicit_from_pools_par(
    n: usize,
    pools: &[VoterPool],
) -> (CountMatrix, CountMatrix, CountMatrix, CountMatrix) {
    // integer accumulation commutes, so the reduce order does not affect
    // the result
    pools
        .par_iter()
        .fold(
            || empty_four(n),
            |mut acc, pool| {
                accumulate_pool(pool, &mut acc);
                acc
            },
        )
        .reduce(
            || empty_four(n),
            |a, b| {
                (
                    a.0.plus(&b.0).expect("same n"),
                    a.1.plus(&b.1).expect("same n"),
                    a.2.plus(&b.2).expect("same n"),
                    a.3.plus(&b.3).expect("same n"),
                )
            },
        )
}

/// All six raw count matrices for a dataset, computed once and shared.
#[derive(Debug, Clone)]
pub struct SignalSet {
    pub exp_plus: CountMatrix,
    pub exp_minus: CountMatrix,
    pub iav_plus: CountMatrix,
    pub iav_minus: CountMatrix,
    pub iov_plus: CountMatrix,
    pub iov_minus: CountMatrix,
}

impl SignalSet {
    pub fn build(dataset: &VoteDataset) -> SignalSet {
        let (exp_plus, exp_minus) = dataset.explicit_count_matrices();
        let (iav_plus, iav_minus, iov_plus, iov_minus) = implicit_count_matrices(dataset);
        SignalSet {
            exp_plus,
            exp_minus,
            iav_plus,
            iav_minus,
            iov_plus,
            iov_minus,
        }
    }

    pub fn matrix(&self, ty: SignalType) -> &CountMatrix {
        match ty {
            SignalType::ExpPlus => &self.exp_plus,
            SignalType::ExpMinus => &self.exp_minus,
            SignalType::IavPlus => &self.iav_plus,
            SignalType::IavMinus => &self.iav_minus,
            SignalType::IovPlus => &self.iov_plus,
            SignalType::IovMinus => &self.iov_minus,
        }
    }
}
