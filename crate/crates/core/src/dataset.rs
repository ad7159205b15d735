//! Vote-log ingestion: users, answers, signed vote events, and the explicit
//! count matrices.
//!
//! CSV formats:
//! - `users.csv`: header `user_id,level`; level is one of
//!   Native/Fluid/Advanced/Intermediate/Beginner or empty.
//! - `answers.csv`: header `answer_id,author_id,text`; text optional.
//! - `votes.csv`: header `answer_id,voter_id,polarity`; polarity `1` or `-1`.
//!
//! Lines starting with `#` are treated as comments. User indexing is
//! lexicographic by id so every downstream matrix and rank vector is
//! reproducible byte for byte.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{RankConfig, SignalType};
use crate::matrix::CountMatrix;
use crate::signals::SignalSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnswerId(pub String);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for AnswerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Self-reported proficiency level, mapped to the 1..=5 gold scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Native,
    Fluid,
    Advanced,
    Intermediate,
    Beginner,
}

impl Level {
    /// Strict parse; no trimming or case folding.
    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "Native" => Some(Level::Native),
            "Fluid" => Some(Level::Fluid),
            "Advanced" => Some(Level::Advanced),
            "Intermediate" => Some(Level::Intermediate),
            "Beginner" => Some(Level::Beginner),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Level::Native => "Native",
            Level::Fluid => "Fluid",
            Level::Advanced => "Advanced",
            Level::Intermediate => "Intermediate",
            Level::Beginner => "Beginner",
        }
    }

    /// Numeric gold label: Native=5 down to Beginner=1.
    pub fn numeric(&self) -> u8 {
        match self {
            Level::Native => 5,
            Level::Fluid => 4,
            Level::Advanced => 3,
            Level::Intermediate => 2,
            Level::Beginner => 1,
        }
    }

    /// Inverse of [`Level::numeric`].
    pub fn from_numeric(n: u8) -> Option<Level> {
        match n {
            5 => Some(Level::Native),
            4 => Some(Level::Fluid),
            3 => Some(Level::Advanced),
            2 => Some(Level::Intermediate),
            1 => Some(Level::Beginner),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Up,
    Down,
}

impl Polarity {
    pub fn parse(s: &str) -> Option<Polarity> {
        match s {
            "1" | "+1" => Some(Polarity::Up),
            "-1" => Some(Polarity::Down),
            _ => None,
        }
    }

    pub fn as_i8(&self) -> i8 {
        match self {
            Polarity::Up => 1,
            Polarity::Down => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct User {
    pub id: UserId,
    pub self_level: Option<Level>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub id: AnswerId,
    pub author: UserId,
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteEvent {
    pub answer: AnswerId,
    pub voter: UserId,
    pub polarity: Polarity,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed row: {msg}")]
    MalformedRow { path: PathBuf, line: u64, msg: String },
    #[error("{path}:{line}: duplicate user id '{id}'")]
    DuplicateUser { path: PathBuf, line: u64, id: String },
    #[error("{path}:{line}: duplicate answer id '{id}'")]
    DuplicateAnswer { path: PathBuf, line: u64, id: String },
    #[error("{path}:{line}: duplicate vote by '{voter}' on answer '{answer}'")]
    DuplicateVote {
        path: PathBuf,
        line: u64,
        voter: String,
        answer: String,
    },
    #[error("{path}:{line}: user '{voter}' voted on their own answer '{answer}'")]
    SelfVote {
        path: PathBuf,
        line: u64,
        voter: String,
        answer: String,
    },
    #[error("{path}:{line}: unknown user '{id}'")]
    UnknownUser { path: PathBuf, line: u64, id: String },
    #[error("{path}:{line}: unknown answer '{id}'")]
    UnknownAnswer { path: PathBuf, line: u64, id: String },
    #[error("dataset is empty: no users")]
    Empty,
}

/// An immutable, validated vote log with a stable user index.
///
/// Users are indexed `0..n` in lexicographic id order; all matrices and
/// rank vectors downstream use this indexing.
#[derive(Debug, Clone)]
pub struct VoteDataset {
    users: Vec<User>,
    answers: Vec<Answer>,
    votes: Vec<VoteEvent>,
    user_index: HashMap<UserId, usize>,
    answer_index: HashMap<AnswerId, usize>,
}

impl VoteDataset {
    /// Build a dataset from in-memory parts, running the same validation as
    /// the CSV loader. Users are re-sorted lexicographically.
    pub fn new(
        mut users: Vec<User>,
        answers: Vec<Answer>,
        votes: Vec<VoteEvent>,
    ) -> Result<VoteDataset, DatasetError> {
        if users.is_empty() {
            return Err(DatasetError::Empty);
        }
        users.sort_by(|a, b| a.id.cmp(&b.id));
        let synth = PathBuf::from("<memory>");
        let mut user_index = HashMap::new();
        for (i, u) in users.iter().enumerate() {
            if u.id.0.is_empty() {
                return Err(DatasetError::MalformedRow {
                    path: synth.clone(),
                    line: 0,
                    msg: "empty user id".into(),
                });
            }
            if user_index.insert(u.id.clone(), i).is_some() {
                return Err(DatasetError::DuplicateUser {
                    path: synth.clone(),
                    line: 0,
                    id: u.id.0.clone(),
                });
            }
        }
        let mut answer_index = HashMap::new();
        for (i, a) in answers.iter().enumerate() {
            if !user_index.contains_key(&a.author) {
                return Err(DatasetError::UnknownUser {
                    path: synth.clone(),
                    line: 0,
                    id: a.author.0.clone(),
                });
            }
            if answer_index.insert(a.id.clone(), i).is_some() {
                return Err(DatasetError::DuplicateAnswer {
                    path: synth.clone(),
                    line: 0,
                    id: a.id.0.clone(),
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for v in &votes {
            let ai = *answer_index
                .get(&v.answer)
                .ok_or_else(|| DatasetError::UnknownAnswer {
                    path: synth.clone(),
                    line: 0,
                    id: v.answer.0.clone(),
                })?;
            if !user_index.contains_key(&v.voter) {
                return Err(DatasetError::UnknownUser {
                    path: synth.clone(),
                    line: 0,
                    id: v.voter.0.clone(),
                });
            }
            if answers[ai].author == v.voter {
                return Err(DatasetError::SelfVote {
                    path: synth.clone(),
                    line: 0,
                    voter: v.voter.0.clone(),
                    answer: v.answer.0.clone(),
                });
            }
            if !seen.insert((v.voter.clone(), v.answer.clone())) {
                return Err(DatasetError::DuplicateVote {
                    path: synth.clone(),
                    line: 0,
                    voter: v.voter.0.clone(),
                    answer: v.answer.0.clone(),
                });
            }
        }
        Ok(VoteDataset {
            users,
            answers,
            votes,
            user_index,
            answer_index,
        })
    }

    /// Load and validate the three CSV files.
    pub fn load(
        votes_path: &Path,
        answers_path: &Path,
        users_path: &Path,
    ) -> Result<VoteDataset, DatasetError> {
        let mut users = load_users(users_path)?;
        if users.is_empty() {
            return Err(DatasetError::Empty);
        }
        users.sort_by(|a, b| a.id.cmp(&b.id));
        let mut user_index = HashMap::new();
        for (i, u) in users.iter().enumerate() {
            // duplicates were caught with line numbers during parsing
            user_index.insert(u.id.clone(), i);
        }

        let answers = load_answers(answers_path, &user_index)?;
        let mut answer_index = HashMap::new();
        for (i, a) in answers.iter().enumerate() {
            answer_index.insert(a.id.clone(), i);
        }

        let votes = load_votes(votes_path, &user_index, &answer_index, &answers)?;

        Ok(VoteDataset {
            users,
            answers,
            votes,
            user_index,
            answer_index,
        })
    }

    /// Convenience: load `users.csv`, `answers.csv`, `votes.csv` from a directory.
    pub fn load_dir(dir: &Path) -> Result<VoteDataset, DatasetError> {
        VoteDataset::load(
            &dir.join("votes.csv"),
            &dir.join("answers.csv"),
            &dir.join("users.csv"),
        )
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn answers(&self) -> &[Answer] {
        &self.answers
    }

    pub fn votes(&self) -> &[VoteEvent] {
        &self.votes
    }

    pub fn user_idx(&self, id: &UserId) -> Option<usize> {
        self.user_index.get(id).copied()
    }

    pub fn answer_by_id(&self, id: &AnswerId) -> Option<&Answer> {
        self.answer_index.get(id).map(|&i| &self.answers[i])
    }

    /// Index of the author of the given answer.
    pub fn author_idx(&self, answer: &AnswerId) -> Option<usize> {
        let a = self.answer_by_id(answer)?;
        self.user_idx(&a.author)
    }

    /// The two explicit count matrices. Entry (recipient, voter) counts
    /// votes of that polarity across all of the recipient's answers.
    pub fn explicit_count_matrices(&self) -> (CountMatrix, CountMatrix) {
        let n = self.n_users();
        let mut plus = CountMatrix::zeros(n, SignalType::ExpPlus);
        let mut minus = CountMatrix::zeros(n, SignalType::ExpMinus);
        for v in &self.votes {
            let recipient = self.author_idx(&v.answer).expect("validated");
            let voter = self.user_idx(&v.voter).expect("validated");
            match v.polarity {
                Polarity::Up => plus.add(recipient, voter, 1),
                Polarity::Down => minus.add(recipient, voter, 1),
            }
        }
        (plus, minus)
    }

    /// Raw incoming vote counts per user, summed over the signal types the
    /// config selects. Mixing weights do not apply here; these counts feed
    /// the threshold sweep.
    pub fn incoming_vote_counts(&self, signals: &SignalSet, config: &RankConfig) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_users()];
        for ty in config.selected_types() {
            let m = signals.matrix(ty);
            for (i, c) in counts.iter_mut().enumerate() {
                *c += m.row_sum(i);
            }
        }
        counts
    }

    /// Write `users.csv`, `answers.csv` and `votes.csv` into a directory in
    /// the loader's format. Row order is deterministic (users and answers
    /// in stored order, votes in event order).
    pub fn write_dir(&self, dir: &Path) -> Result<(), DatasetError> {
        let io_err = |path: &Path| {
            let p = path.to_path_buf();
            move |e: csv::Error| match e.into_kind() {
                csv::ErrorKind::Io(source) => DatasetError::Io { path: p.clone(), source },
                other => DatasetError::MalformedRow {
                    path: p.clone(),
                    line: 0,
                    msg: format!("{other:?}"),
                },
            }
        };

        let path = dir.join("users.csv");
        let mut w = csv::Writer::from_path(&path).map_err(io_err(&path))?;
        w.write_record(["user_id", "level"]).map_err(io_err(&path))?;
        for u in &self.users {
            let level = u.self_level.map_or("", |l| l.as_str());
            w.write_record([u.id.0.as_str(), level]).map_err(io_err(&path))?;
        }
        w.flush().map_err(|source| DatasetError::Io { path: path.clone(), source })?;

        let path = dir.join("answers.csv");
        let mut w = csv::Writer::from_path(&path).map_err(io_err(&path))?;
        w.write_record(["answer_id", "author_id", "text"])
            .map_err(io_err(&path))?;
        for a in &self.answers {
            let text = a.text.as_deref().unwrap_or("");
            w.write_record([a.id.0.as_str(), a.author.0.as_str(), text])
                .map_err(io_err(&path))?;
        }
        w.flush().map_err(|source| DatasetError::Io { path: path.clone(), source })?;

        let path = dir.join("votes.csv");
        let mut w = csv::Writer::from_path(&path).map_err(io_err(&path))?;
        w.write_record(["answer_id", "voter_id", "polarity"])
            .map_err(io_err(&path))?;
        for v in &self.votes {
            let polarity = match v.polarity {
                Polarity::Up => "1",
                Polarity::Down => "-1",
            };
            w.write_record([v.answer.0.as_str(), v.voter.0.as_str(), polarity])
                .map_err(io_err(&path))?;
        }
        w.flush().map_err(|source| DatasetError::Io { path, source })?;
        Ok(())
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, DatasetError> {
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(file))
}

fn row_err(path: &Path, line: u64, msg: impl Into<String>) -> DatasetError {
    DatasetError::MalformedRow {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn load_users(path: &Path) -> Result<Vec<User>, DatasetError> {
    let mut rdr = open_reader(path)?;
    let mut users = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| row_err(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(row_err(path, line, format!("expected 2 fields, got {}", rec.len())));
        }
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(row_err(path, line, "empty user id"));
        }
        let self_level = match &rec[1] {
            "" => None,
            s => Some(
                Level::parse(s).ok_or_else(|| row_err(path, line, format!("unknown level '{s}'")))?,
            ),
        };
        if !seen.insert(id.clone()) {
            return Err(DatasetError::DuplicateUser {
                path: path.to_path_buf(),
                line,
                id,
            });
        }
        users.push(User {
            id: UserId(id),
            self_level,
        });
    }
    Ok(users)
}

fn load_answers(
    path: &Path,
    user_index: &HashMap<UserId, usize>,
) -> Result<Vec<Answer>, DatasetError> {
    let mut rdr = open_reader(path)?;
    let mut answers = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| row_err(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(row_err(path, line, format!("expected 3 fields, got {}", rec.len())));
        }
        let id = rec[0].to_string();
        let author = rec[1].to_string();
        if id.is_empty() || author.is_empty() {
            return Err(row_err(path, line, "empty id field"));
        }
        let author = UserId(author);
        if !user_index.contains_key(&author) {
            return Err(DatasetError::UnknownUser {
                path: path.to_path_buf(),
                line,
                id: author.0,
            });
        }
        if !seen.insert(id.clone()) {
            return Err(DatasetError::DuplicateAnswer {
                path: path.to_path_buf(),
                line,
                id,
            });
        }
        let text = match &rec[2] {
            "" => None,
            s => Some(s.to_string()),
        };
        answers.push(Answer {
            id: AnswerId(id),
            author,
            text,
        });
    }
    Ok(answers)
}

fn load_votes(
    path: &Path,
    user_index: &HashMap<UserId, usize>,
    answer_index: &HashMap<AnswerId, usize>,
    answers: &[Answer],
) -> Result<Vec<VoteEvent>, DatasetError> {
    let mut rdr = open_reader(path)?;
    let mut votes = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| row_err(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(row_err(path, line, format!("expected 3 fields, got {}", rec.len())));
        }
        let answer = AnswerId(rec[0].to_string());
        let voter = UserId(rec[1].to_string());
        let polarity = Polarity::parse(&rec[2])
            .ok_or_else(|| row_err(path, line, format!("bad polarity '{}'", &rec[2])))?;
        let ai = *answer_index
            .get(&answer)
            .ok_or_else(|| DatasetError::UnknownAnswer {
                path: path.to_path_buf(),
                line,
                id: answer.0.clone(),
            })?;
        if !user_index.contains_key(&voter) {
            return Err(DatasetError::UnknownUser {
                path: path.to_path_buf(),
                line,
                id: voter.0,
            });
        }
        if answers[ai].author == voter {
            return Err(DatasetError::SelfVote {
                path: path.to_path_buf(),
                line,
                voter: voter.0,
                answer: answer.0,
            });
        }
        if !seen.insert((voter.clone(), answer.clone())) {
            return Err(DatasetError::DuplicateVote {
                path: path.to_path_buf(),
                line,
                voter: voter.0,
                answer: answer.0,
            });
        }
        votes.push(VoteEvent {
            answer,
            voter,
            polarity,
        });
    }
    Ok(votes)
}
