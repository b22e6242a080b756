//! Direct recomputation of the pipeline from raw log records.

use std::collections::{BTreeMap, BTreeSet};

use impact_core::log::{EventLog, Retweet, Tweet};

fn user_tweets(log: &EventLog, user: u64) -> Vec<Tweet> {
    log.tweets.iter().filter(|t| t.user_id == user).copied().collect()
}

/// Retweets of `user`'s tweets that reference a known tweet and do not
/// precede it.
fn user_retweets(log: &EventLog, user: u64) -> Vec<Retweet> {
    let tweets = user_tweets(log, user);
    log.retweets
        .iter()
        .filter(|r| {
            tweets
                .iter()
                .any(|t| t.tweet_id == r.tweet_id && r.week >= t.week)
        })
        .copied()
        .collect()
}

pub fn join(log: &EventLog, user: u64) -> Option<u32> {
    let first_tweet = user_tweets(log, user).iter().map(|t| t.week).min()?;
    Some(match log.join_week.get(&user) {
        Some(&j) => j.min(first_tweet),
        None => first_tweet,
    })
}

pub fn career_length(log: &EventLog, user: u64) -> Option<u32> {
    let j = join(log, user)?;
    let last_tweet = user_tweets(log, user).iter().map(|t| t.week).max()?;
    let last_rt = user_retweets(log, user).iter().map(|r| r.week).max().unwrap_or(0);
    Some(last_tweet.max(last_rt) - j)
}

pub fn weekly_means(log: &EventLog, user: u64) -> Option<BTreeMap<u32, f64>> {
    let j = join(log, user)?;
    let tweets = user_tweets(log, user);
    let mut out = BTreeMap::new();
    let weeks: BTreeSet<u32> = tweets.iter().map(|t| t.week).collect();
    for w in weeks {
        let this_week: Vec<&Tweet> = tweets.iter().filter(|t| t.week == w).collect();
        let mut total: u64 = 0;
        for t in &this_week {
            total += log
                .retweets
                .iter()
                .filter(|r| r.tweet_id == t.tweet_id && r.week >= t.week)
                .count() as u64;
        }
        out.insert(w - j + 1, total as f64 / this_week.len() as f64);
    }
    Some(out)
}

/// Piecewise-linear follower count with constant ends, straight from the
/// log's samples (the last sample wins for a repeated week).
pub fn followers_at(log: &EventLog, user: u64, week: u32) -> Option<f64> {
    let mut samples: BTreeMap<u32, f64> = BTreeMap::new();
    for s in log.follower_samples.iter().filter(|s| s.user_id == user) {
        samples.insert(s.week, s.count as f64);
    }
    let pts: Vec<(u32, f64)> = samples.into_iter().collect();
    let first = *pts.first()?;
    let last = *pts.last()?;
    if week <= first.0 {
        return Some(first.1);
    }
    if week >= last.0 {
        return Some(last.1);
    }
    for pair in pts.windows(2) {
        let ((w0, c0), (w1, c1)) = (pair[0], pair[1]);
        if week == w1 {
            return Some(c1);
        }
        if w0 < week && week < w1 {
            let frac = f64::from(week - w0) / f64::from(w1 - w0);
            return Some(c0 + frac * (c1 - c0));
        }
    }
    unreachable!("week inside sampled range")
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// `(week, median, contributing users)` rows of a career curve for users whose
/// career length lies in `[lo, hi)`.
pub fn career_curve(log: &EventLog, lo: u32, hi: u32, normalize: bool) -> Vec<(u32, f64, usize)> {
    let users: BTreeSet<u64> = log.tweets.iter().map(|t| t.user_id).collect();
    let mut by_week: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for u in users {
        let len = career_length(log, u).unwrap();
        if len < lo || len >= hi {
            continue;
        }
        let j = join(log, u).unwrap();
        let has_history = log.follower_samples.iter().any(|s| s.user_id == u);
        if normalize && !has_history {
            continue;
        }
        for (w, mean) in weekly_means(log, u).unwrap() {
            let value = if normalize {
                let f = followers_at(log, u, w + j - 1).unwrap();
                if f <= 0.0 {
                    continue;
                }
                mean / f
            } else {
                mean
            };
            by_week.entry(w).or_default().push(value);
        }
    }
    by_week
        .into_iter()
        .map(|(w, v)| (w, median(&v), v.len()))
        .collect()
}

/// `(start_week, values, cohort size)` per cohort of `user`.
pub fn cohorts(log: &EventLog, user: u64) -> Vec<(u32, Vec<f64>, usize)> {
    let Some(j) = join(log, user) else {
        return Vec::new();
    };
    let rts = user_retweets(log, user);
    let end = career_length(log, user).unwrap() + 1;
    let followers: BTreeSet<u64> = rts.iter().map(|r| r.follower_id).collect();
    let first_week = |f: u64| {
        rts.iter()
            .filter(|r| r.follower_id == f)
            .map(|r| r.week - j + 1)
            .min()
            .unwrap()
    };
    let starts: BTreeSet<u32> = followers.iter().map(|&f| first_week(f)).collect();
    let mut out = Vec::new();
    for t0 in starts {
        let members: Vec<u64> = followers
            .iter()
            .copied()
            .filter(|&f| first_week(f) == t0)
            .collect();
        let mut values = Vec::new();
        for week in t0..=end {
            let n = rts
                .iter()
                .filter(|r| r.week - j + 1 == week && members.contains(&r.follower_id))
                .count();
            values.push(n as f64 / members.len() as f64);
        }
        out.push((t0, values, members.len()));
    }
    out
}

/// `(values, support)` of the age-wise median across users' cohorts at `t0`.
pub fn aggregate(per_user: &[Vec<(u32, Vec<f64>, usize)>], t0: u32) -> Option<(Vec<f64>, Vec<usize>)> {
    let series: Vec<&Vec<f64>> = per_user
        .iter()
        .filter_map(|list| list.iter().find(|c| c.0 == t0).map(|c| &c.1))
        .collect();
    if series.is_empty() {
        return None;
    }
    let longest = series.iter().map(|s| s.len()).max().unwrap();
    let mut values = Vec::new();
    let mut support = Vec::new();
    for age in 0..longest {
        let col: Vec<f64> = series.iter().filter(|s| s.len() > age).map(|s| s[age]).collect();
        values.push(median(&col));
        support.push(col.len());
    }
    Some((values, support))
}
