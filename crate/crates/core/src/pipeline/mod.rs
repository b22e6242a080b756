//! Aggregation of event logs into career curves and follower cohorts.
//!
//! Per user and career week the mean retweet count of the tweets posted that
//! week is computed; curves take the median of those means across users.
//! Career weeks are 1-based and counted from the user's join week.

mod cohort;
mod smooth;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log::{EventLog, UserId, Week};

pub use cohort::{aggregate_all_cohorts, aggregate_cohorts, extract_cohorts, CohortSeries};
pub use smooth::{median, running_average};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("unknown user {0}")]
    UnknownUser(UserId),
    #[error("no user contributes a cohort starting in week {0}")]
    EmptyAggregate(Week),
    #[error("invalid stratum {0}")]
    InvalidStratum(String),
    #[error("running-average width must be odd and >= 1, got {0}")]
    InvalidWidth(usize),
    #[error("follower history for user {0} has no samples")]
    EmptyHistory(UserId),
    #[error("follower history for user {user} repeats or reorders week {week}")]
    UnorderedHistory { user: UserId, week: Week },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineWarning {
    /// Normalization was requested but the user has no follower samples.
    MissingHistory { user: UserId },
    /// Weeks skipped because the interpolated follower count was zero.
    ZeroFollowers { user: UserId, weeks: usize },
}

impl fmt::Display for PipelineWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineWarning::MissingHistory { user } => {
                write!(f, "user {user} excluded: no follower history for normalization")
            }
            PipelineWarning::ZeroFollowers { user, weeks } => {
                write!(f, "user {user}: {weeks} week(s) skipped with zero followers")
            }
        }
    }
}

/// Half-open career-length range `[lo, hi)` in weeks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Stratum {
    lo: Week,
    hi: Week,
}

impl Stratum {
    pub fn new(lo: Week, hi: Week) -> Result<Self, PipelineError> {
        if lo == 0 || lo >= hi {
            return Err(PipelineError::InvalidStratum(format!("{lo}..{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> Week {
        self.lo
    }

    pub fn hi(&self) -> Week {
        self.hi
    }

    pub fn contains(&self, career_length: Week) -> bool {
        (self.lo..self.hi).contains(&career_length)
    }

    /// The four 100-week bins from 100 to 500 weeks.
    pub fn defaults() -> Vec<Stratum> {
        (1..5)
            .map(|i| Stratum {
                lo: 100 * i,
                hi: 100 * (i + 1),
            })
            .collect()
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for Stratum {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PipelineError::InvalidStratum(s.to_string());
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Stratum::new(lo, hi)
    }
}

/// Follower counts of one user, sorted by week.
#[derive(Debug, Clone, PartialEq)]
pub struct FollowerHistory {
    user_id: UserId,
    samples: Vec<(Week, f64)>,
}

impl FollowerHistory {
    pub fn new(user_id: UserId, samples: Vec<(Week, f64)>) -> Result<Self, PipelineError> {
        if samples.is_empty() {
            return Err(PipelineError::EmptyHistory(user_id));
        }
        if let Some(w) = samples.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(PipelineError::UnorderedHistory {
                user: user_id,
                week: w[1].0,
            });
        }
        Ok(Self { user_id, samples })
    }

    pub fn user_id(&self) -> UserId {
        self.user_id
    }

    pub fn samples(&self) -> &[(Week, f64)] {
        &self.samples
    }
}

/// Builds one history per user from the log's follower samples. When a user
/// has several samples for the same week the one appearing last wins.
/// Counts need not be monotone.
pub fn follower_histories(log: &EventLog) -> BTreeMap<UserId, FollowerHistory> {
    let mut per_user: BTreeMap<UserId, BTreeMap<Week, f64>> = BTreeMap::new();
    for s in &log.follower_samples {
        per_user
            .entry(s.user_id)
            .or_default()
            .insert(s.week, s.count as f64);
    }
    per_user
        .into_iter()
        .map(|(user, samples)| {
            let history = FollowerHistory {
                user_id: user,
                samples: samples.into_iter().collect(),
            };
            (user, history)
        })
        .collect()
}

/// Follower count at `week`: linear between bracketing samples, constant
/// beyond the first and last sample.
pub fn interpolate_followers(history: &FollowerHistory, week: Week) -> f64 {
    let samples = &history.samples;
    let idx = samples.partition_point(|&(w, _)| w < week);
    if idx == samples.len() {
        return samples[idx - 1].1;
    }
    let (w1, c1) = samples[idx];
    if w1 == week || idx == 0 {
        return c1;
    }
    let (w0, c0) = samples[idx - 1];
    let frac = f64::from(week - w0) / f64::from(w1 - w0);
    c0 + frac * (c1 - c0)
}

/// Per-user view of a log.
#[derive(Debug, Clone, Default)]
struct UserRecords {
    join: Week,
    last_activity: Week,
    /// `(week, retweet count)` per tweet.
    tweets: Vec<(Week, u64)>,
    /// `(follower, week)` per retweet of one of the user's tweets.
    retweets: Vec<(UserId, Week)>,
}

impl UserRecords {
    fn career_week(&self, week: Week) -> Week {
        week - self.join + 1
    }

    fn career_length(&self) -> Week {
        self.last_activity - self.join
    }
}

/// Index of an event log by focal user.
///
/// A user's join week is the earlier of the recorded join week and the first
/// tweet. The last activity week is the latest tweet or retweet of the
/// user's tweets.
#[derive(Debug, Clone)]
pub struct LogIndex {
    users: BTreeMap<UserId, UserRecords>,
}

impl LogIndex {
    pub fn new(log: &EventLog) -> Self {
        let mut users: BTreeMap<UserId, UserRecords> = BTreeMap::new();
        let mut owner: HashMap<u64, (UserId, usize)> = HashMap::with_capacity(log.tweets.len());
        for t in &log.tweets {
            let rec = users.entry(t.user_id).or_insert_with(|| UserRecords {
                join: t.week,
                last_activity: t.week,
                ..Default::default()
            });
            rec.join = rec.join.min(t.week);
            rec.last_activity = rec.last_activity.max(t.week);
            owner.insert(t.tweet_id, (t.user_id, rec.tweets.len()));
            rec.tweets.push((t.week, 0));
        }
        for r in &log.retweets {
            let Some(&(user, slot)) = owner.get(&r.tweet_id) else {
                continue;
            };
            let rec = users.get_mut(&user).expect("owner of indexed tweet");
            if r.week < rec.tweets[slot].0 {
                continue;
            }
            rec.tweets[slot].1 += 1;
            rec.retweets.push((r.follower_id, r.week));
            rec.last_activity = rec.last_activity.max(r.week);
        }
        for (user, rec) in users.iter_mut() {
            if let Some(&join) = log.join_week.get(user) {
                rec.join = rec.join.min(join);
            }
        }
        Self { users }
    }

    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.users.keys().copied()
    }

    fn user(&self, user: UserId) -> Result<&UserRecords, PipelineError> {
        self.users.get(&user).ok_or(PipelineError::UnknownUser(user))
    }

    pub fn join_week(&self, user: UserId) -> Result<Week, PipelineError> {
        Ok(self.user(user)?.join)
    }

    /// Last activity week minus join week.
    pub fn career_length(&self, user: UserId) -> Result<Week, PipelineError> {
        Ok(self.user(user)?.career_length())
    }

    /// Mean retweets per tweet for each career week in which the user tweeted.
    pub fn weekly_user_means(&self, user: UserId) -> Result<BTreeMap<Week, f64>, PipelineError> {
        let rec = self.user(user)?;
        let mut sums: BTreeMap<Week, (u64, u64)> = BTreeMap::new();
        for &(week, count) in &rec.tweets {
            let entry = sums.entry(rec.career_week(week)).or_default();
            entry.0 += count;
            entry.1 += 1;
        }
        Ok(sums
            .into_iter()
            .map(|(w, (total, n))| (w, total as f64 / n as f64))
            .collect())
    }

    /// Median over users in `stratum` of their weekly means, optionally each
    /// divided by the user's follower count that week.
    pub fn career_curve(
        &self,
        stratum: &Stratum,
        normalize: Option<&BTreeMap<UserId, FollowerHistory>>,
    ) -> (CareerCurve, Vec<PipelineWarning>) {
        let mut warnings = Vec::new();
        let mut by_week: BTreeMap<Week, Vec<f64>> = BTreeMap::new();
        for (&user, rec) in &self.users {
            if !stratum.contains(rec.career_length()) {
                continue;
            }
            let history = match normalize {
                Some(histories) => match histories.get(&user) {
                    Some(h) => Some(h),
                    None => {
                        warnings.push(PipelineWarning::MissingHistory { user });
                        continue;
                    }
                },
                None => None,
            };
            let means = self.weekly_user_means(user).expect("indexed user");
            let mut zero_weeks = 0;
            for (week, mean) in means {
                let value = match history {
                    Some(h) => {
                        let followers = interpolate_followers(h, week + rec.join - 1);
                        if followers <= 0.0 {
                            zero_weeks += 1;
                            continue;
                        }
                        mean / followers
                    }
                    None => mean,
                };
                by_week.entry(week).or_default().push(value);
            }
            if zero_weeks > 0 {
                warnings.push(PipelineWarning::ZeroFollowers {
                    user,
                    weeks: zero_weeks,
                });
            }
        }

        let mut curve = CareerCurve {
            stratum: *stratum,
            weeks: Vec::with_capacity(by_week.len()),
            values: Vec::with_capacity(by_week.len()),
            n_users: Vec::with_capacity(by_week.len()),
        };
        for (week, values) in by_week {
            curve.weeks.push(week);
            curve.values.push(median(&values).expect("non-empty week"));
            curve.n_users.push(values.len());
        }
        (curve, warnings)
    }
}

/// Weekly median curve of one career-length stratum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CareerCurve {
    pub stratum: Stratum,
    pub weeks: Vec<Week>,
    pub values: Vec<f64>,
    pub n_users: Vec<usize>,
}

impl CareerCurve {
    pub fn len(&self) -> usize {
        self.weeks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weeks.is_empty()
    }

    /// The same curve with values replaced by their running average.
    pub fn smoothed(&self, width: usize) -> Result<CareerCurve, PipelineError> {
        Ok(CareerCurve {
            values: running_average(&self.values, width)?,
            ..self.clone()
        })
    }
}

pub fn weekly_user_means(
    log: &EventLog,
    user: UserId,
) -> Result<BTreeMap<Week, f64>, PipelineError> {
    LogIndex::new(log).weekly_user_means(user)
}

/// Career curve of `stratum`. With `normalize`, users without an entry in
/// `histories` are excluded and reported as warnings.
pub fn career_curve(
    log: &EventLog,
    stratum: &Stratum,
    normalize: bool,
    histories: &BTreeMap<UserId, FollowerHistory>,
) -> (CareerCurve, Vec<PipelineWarning>) {
    LogIndex::new(log).career_curve(stratum, normalize.then_some(histories))
}
