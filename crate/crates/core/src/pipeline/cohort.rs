use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{median, LogIndex, PipelineError};
use crate::log::{EventLog, UserId, Week};

/// Weekly retweet activity of one follower cohort, by age since the cohort's
/// first retweet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSeries {
    /// Career week of the cohort members' first retweet.
    pub start_week: Week,
    /// 1-based weeks since `start_week`.
    pub ages: Vec<Week>,
    pub values: Vec<f64>,
    /// Users contributing to each value (1 for a single user's cohort).
    pub support: Vec<usize>,
    /// Cohort members, summed over contributing users.
    pub cohort_size: usize,
}

impl LogIndex {
    /// Follower cohorts of `user`, ordered by start week.
    ///
    /// A retweeter belongs to the cohort of the career week of their first
    /// retweet of any of the user's tweets. For every week from the start
    /// week to the end of the user's career the value is the cohort's total
    /// retweets of the user's tweets that week divided by the cohort size.
    pub fn extract_cohorts(&self, user: UserId) -> Result<Vec<CohortSeries>, PipelineError> {
        let rec = self.user(user)?;
        let mut first: HashMap<UserId, Week> = HashMap::new();
        for &(follower, week) in &rec.retweets {
            let cw = rec.career_week(week);
            first
                .entry(follower)
                .and_modify(|w| *w = (*w).min(cw))
                .or_insert(cw);
        }
        let mut sizes: BTreeMap<Week, usize> = BTreeMap::new();
        for &start in first.values() {
            *sizes.entry(start).or_default() += 1;
        }
        let last = rec.career_week(rec.last_activity);
        let mut counts: BTreeMap<Week, Vec<u64>> = sizes
            .keys()
            .map(|&start| (start, vec![0; (last - start + 1) as usize]))
            .collect();
        for &(follower, week) in &rec.retweets {
            let start = first[&follower];
            let age = rec.career_week(week) - start;
            counts.get_mut(&start).expect("cohort of member")[age as usize] += 1;
        }

        Ok(counts
            .into_iter()
            .map(|(start, per_age)| {
                let size = sizes[&start];
                CohortSeries {
                    start_week: start,
                    ages: (1..=per_age.len() as Week).collect(),
                    values: per_age.iter().map(|&n| n as f64 / size as f64).collect(),
                    support: vec![1; per_age.len()],
                    cohort_size: size,
                }
            })
            .collect())
    }
}

pub fn extract_cohorts(log: &EventLog, user: UserId) -> Result<Vec<CohortSeries>, PipelineError> {
    LogIndex::new(log).extract_cohorts(user)
}

/// Median over users of their cohort starting in week `start_week`, age by
/// age. Users whose careers end earlier stop contributing at later ages.
pub fn aggregate_cohorts(
    per_user: &[Vec<CohortSeries>],
    start_week: Week,
) -> Result<CohortSeries, PipelineError> {
    let cohorts: Vec<&CohortSeries> = per_user
        .iter()
        .filter_map(|list| list.iter().find(|c| c.start_week == start_week))
        .collect();
    if cohorts.is_empty() {
        return Err(PipelineError::EmptyAggregate(start_week));
    }
    let max_len = cohorts.iter().map(|c| c.values.len()).max().unwrap_or(0);
    let mut out = CohortSeries {
        start_week,
        ages: Vec::with_capacity(max_len),
        values: Vec::with_capacity(max_len),
        support: Vec::with_capacity(max_len),
        cohort_size: cohorts.iter().map(|c| c.cohort_size).sum(),
    };
    let mut column = Vec::with_capacity(cohorts.len());
    for i in 0..max_len {
        column.clear();
        column.extend(cohorts.iter().filter_map(|c| c.values.get(i)));
        out.ages.push(i as Week + 1);
        out.values.push(median(&column).expect("longest cohort contributes"));
        out.support.push(column.len());
    }
    Ok(out)
}

/// [`aggregate_cohorts`] for every start week present, ascending.
pub fn aggregate_all_cohorts(per_user: &[Vec<CohortSeries>]) -> Vec<CohortSeries> {
    let mut starts: Vec<Week> = per_user
        .iter()
        .flat_map(|list| list.iter().map(|c| c.start_week))
        .collect();
    starts.sort_unstable();
    starts.dedup();
    starts
        .into_iter()
        .map(|w| aggregate_cohorts(per_user, w).expect("start week taken from input"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::{Record, Retweet, Tweet};

    fn series(start: Week, values: &[f64], size: usize) -> CohortSeries {
        CohortSeries {
            start_week: start,
            ages: (1..=values.len() as Week).collect(),
            values: values.to_vec(),
            support: vec![1; values.len()],
            cohort_size: size,
        }
    }

    #[test]
    fn single_follower_bookkeeping() {
        let mut log = EventLog::new();
        log.push(Record::Join { user_id: 1, week: 1 });
        for (id, week) in [(1, 1), (2, 5)] {
            log.push(Record::Tweet(Tweet {
                user_id: 1,
                tweet_id: id,
                week,
            }));
        }
        for week in [3, 5] {
            log.push(Record::Retweet(Retweet {
                tweet_id: 1,
                follower_id: 9,
                week,
            }));
        }
        let cohorts = extract_cohorts(&log, 1).unwrap();
        assert_eq!(cohorts, vec![series(3, &[1.0, 0.0, 1.0], 1)]);
    }

    #[test]
    fn no_retweets_no_cohorts() {
        let mut log = EventLog::new();
        log.push(Record::Tweet(Tweet {
            user_id: 1,
            tweet_id: 1,
            week: 1,
        }));
        assert!(extract_cohorts(&log, 1).unwrap().is_empty());
        assert_eq!(extract_cohorts(&log, 2), Err(PipelineError::UnknownUser(2)));
    }

    #[test]
    fn cohort_values_divide_by_size() {
        let mut log = EventLog::new();
        log.push(Record::Tweet(Tweet {
            user_id: 1,
            tweet_id: 1,
            week: 2,
        }));
        // followers 7 and 8 start in week 2; 8 retweets twice in week 3.
        for (f, w) in [(7, 2), (8, 2), (8, 3), (8, 3), (9, 3)] {
            log.push(Record::Retweet(Retweet {
                tweet_id: 1,
                follower_id: f,
                week: w,
            }));
        }
        let cohorts = extract_cohorts(&log, 1).unwrap();
        // join week is 2, so weeks 2 and 3 are career weeks 1 and 2.
        assert_eq!(cohorts, vec![series(1, &[1.0, 1.0], 2), series(2, &[1.0], 1)]);
    }

    #[test]
    fn aggregation_medians() {
        let users = vec![
            vec![series(1, &[1.0, 5.0], 2)],
            vec![series(1, &[2.0], 3), series(2, &[4.0], 1)],
            vec![series(1, &[9.0, 7.0, 1.0], 4)],
        ];
        let agg = aggregate_cohorts(&users, 1).unwrap();
        assert_eq!(agg.values, vec![2.0, 6.0, 1.0]);
        assert_eq!(agg.support, vec![3, 2, 1]);
        assert_eq!(agg.cohort_size, 9);
        assert_eq!(aggregate_cohorts(&users[1..2], 2).unwrap().values, vec![4.0]);
        assert_eq!(aggregate_cohorts(&users, 7), Err(PipelineError::EmptyAggregate(7)));
        assert_eq!(aggregate_all_cohorts(&users).len(), 2);
    }

    #[test]
    fn single_user_aggregate_is_identity() {
        let s = series(4, &[0.5, 0.25, 0.0, 0.125], 8);
        assert_eq!(aggregate_cohorts(&[vec![s.clone()]], 4).unwrap(), s);
    }
}
