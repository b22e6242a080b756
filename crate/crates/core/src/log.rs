//! Event logs and their line-delimited JSON encoding.
//!
//! One record per line, tagged by `kind`:
//!
//! ```text
//! {"kind":"join","user_id":1,"week":1}
//! {"kind":"tweet","user_id":1,"tweet_id":4294967296,"week":1}
//! {"kind":"retweet","tweet_id":4294967296,"follower_id":4294967297,"week":1}
//! {"kind":"follower_sample","user_id":1,"week":1,"count":11}
//! ```
//!
//! Weeks are non-negative integers. Unknown fields are ignored.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type UserId = u64;
pub type TweetId = u64;
pub type Week = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub user_id: UserId,
    pub tweet_id: TweetId,
    pub week: Week,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Retweet {
    pub tweet_id: TweetId,
    pub follower_id: UserId,
    pub week: Week,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FollowerSample {
    pub user_id: UserId,
    pub week: Week,
    pub count: u64,
}

/// A single line of the canonical format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Join { user_id: UserId, week: Week },
    Tweet(Tweet),
    Retweet(Retweet),
    FollowerSample(FollowerSample),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    pub tweets: Vec<Tweet>,
    pub retweets: Vec<Retweet>,
    pub follower_samples: Vec<FollowerSample>,
    pub join_week: BTreeMap<UserId, Week>,
}

/// Structural problems found by [`EventLog::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogIssue {
    DuplicateTweet { tweet_id: TweetId },
    OrphanRetweet { tweet_id: TweetId, follower_id: UserId },
    RetweetBeforeTweet { tweet_id: TweetId, follower_id: UserId, week: Week },
}

impl std::fmt::Display for LogIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogIssue::DuplicateTweet { tweet_id } => write!(f, "duplicate tweet id {tweet_id}"),
            LogIssue::OrphanRetweet {
                tweet_id,
                follower_id,
            } => write!(f, "retweet by {follower_id} references unknown tweet {tweet_id}"),
            LogIssue::RetweetBeforeTweet {
                tweet_id,
                follower_id,
                week,
            } => write!(
                f,
                "retweet by {follower_id} in week {week} precedes tweet {tweet_id}"
            ),
        }
    }
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: Record) {
        match record {
            Record::Join { user_id, week } => {
                self.join_week.insert(user_id, week);
            }
            Record::Tweet(t) => self.tweets.push(t),
            Record::Retweet(r) => self.retweets.push(r),
            Record::FollowerSample(s) => self.follower_samples.push(s),
        }
    }

    /// Appends another log. Join weeks from `other` win on conflict.
    pub fn extend(&mut self, other: EventLog) {
        self.tweets.extend(other.tweets);
        self.retweets.extend(other.retweets);
        self.follower_samples.extend(other.follower_samples);
        self.join_week.extend(other.join_week);
    }

    /// Users that posted at least one tweet, ascending.
    pub fn users(&self) -> Vec<UserId> {
        let mut users: Vec<UserId> = self.tweets.iter().map(|t| t.user_id).collect();
        users.sort_unstable();
        users.dedup();
        users
    }

    /// Records in canonical write order: joins, tweets, retweets, samples.
    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.join_week
            .iter()
            .map(|(&user_id, &week)| Record::Join { user_id, week })
            .chain(self.tweets.iter().copied().map(Record::Tweet))
            .chain(self.retweets.iter().copied().map(Record::Retweet))
            .chain(self.follower_samples.iter().copied().map(Record::FollowerSample))
    }

    pub fn validate(&self) -> Vec<LogIssue> {
        let mut issues = Vec::new();
        let mut tweet_week = HashMap::with_capacity(self.tweets.len());
        for t in &self.tweets {
            if tweet_week.insert(t.tweet_id, t.week).is_some() {
                issues.push(LogIssue::DuplicateTweet {
                    tweet_id: t.tweet_id,
                });
            }
        }
        for r in &self.retweets {
            match tweet_week.get(&r.tweet_id) {
                None => issues.push(LogIssue::OrphanRetweet {
                    tweet_id: r.tweet_id,
                    follower_id: r.follower_id,
                }),
                Some(&w) if r.week < w => issues.push(LogIssue::RetweetBeforeTweet {
                    tweet_id: r.tweet_id,
                    follower_id: r.follower_id,
                    week: r.week,
                }),
                Some(_) => {}
            }
        }
        issues
    }

    /// Drops retweets that reference unknown tweets or precede their tweet.
    /// Returns the issues that caused a drop.
    pub fn drop_invalid_retweets(&mut self) -> Vec<LogIssue> {
        let tweet_week: HashMap<TweetId, Week> =
            self.tweets.iter().map(|t| (t.tweet_id, t.week)).collect();
        let mut issues = Vec::new();
        self.retweets.retain(|r| match tweet_week.get(&r.tweet_id) {
            None => {
                issues.push(LogIssue::OrphanRetweet {
                    tweet_id: r.tweet_id,
                    follower_id: r.follower_id,
                });
                false
            }
            Some(&w) if r.week < w => {
                issues.push(LogIssue::RetweetBeforeTweet {
                    tweet_id: r.tweet_id,
                    follower_id: r.follower_id,
                    week: r.week,
                });
                false
            }
            Some(_) => true,
        });
        issues
    }
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{count} malformed lines exceed the budget of {budget}; first: {first}")]
    TooManyErrors {
        count: usize,
        budget: usize,
        first: String,
    },
}

/// Outcome of reading a log with a malformed-line budget.
#[derive(Debug, Default)]
pub struct ReadReport {
    pub log: EventLog,
    /// Malformed lines that were skipped, as `(line number, message)`.
    pub skipped: Vec<(usize, String)>,
    /// Retweets dropped for referencing unknown or later tweets.
    pub dropped: Vec<LogIssue>,
}

/// Reads a canonical log, tolerating up to `error_budget` malformed lines.
/// Blank lines are ignored. Line numbers are 1-based.
pub fn read_log<R: BufRead>(reader: R, error_budget: usize) -> Result<ReadReport, LogError> {
    let mut report = ReadReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(&line) {
            Ok(record) => report.log.push(record),
            Err(e) => {
                report.skipped.push((lineno, e.to_string()));
                if report.skipped.len() > error_budget {
                    let (first_line, first_msg) = &report.skipped[0];
                    return Err(LogError::TooManyErrors {
                        count: report.skipped.len(),
                        budget: error_budget,
                        first: format!("line {first_line}: {first_msg}"),
                    });
                }
            }
        }
    }
    report.dropped = report.log.drop_invalid_retweets();
    Ok(report)
}

/// Reads a log that must be entirely well-formed.
pub fn read_log_strict<R: BufRead>(reader: R) -> Result<EventLog, LogError> {
    let mut log = EventLog::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str::<Record>(&line).map_err(|e| LogError::Malformed {
            line: idx + 1,
            message: e.to_string(),
        })?;
        log.push(record);
    }
    Ok(log)
}

pub fn write_log<W: Write>(log: &EventLog, mut writer: W) -> io::Result<()> {
    for record in log.records() {
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
