use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use impact_core::log::{EventLog, FollowerSample, Record, Retweet, Tweet};

/// A random log with at most 10 users and at most 100 events, including a few
/// join records, follower samples, orphan retweets and retweets that precede
/// their tweet.
pub fn micro_log(seed: u64) -> EventLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = EventLog::new();
    let n_users = rng.random_range(1..=10u64);
    let budget = rng.random_range(5..=100usize);
    let mut events = 0;
    let mut tweets: Vec<Tweet> = Vec::new();
    let mut next_tweet = 1000;

    for u in 1..=n_users {
        if rng.random_bool(0.5) {
            log.push(Record::Join {
                user_id: u,
                week: rng.random_range(1..=4),
            });
            events += 1;
        }
    }
    while events < budget {
        events += 1;
        let roll: f64 = rng.random();
        if roll < 0.3 || tweets.is_empty() {
            let t = Tweet {
                user_id: rng.random_range(1..=n_users),
                tweet_id: next_tweet,
                week: rng.random_range(1..=30),
            };
            next_tweet += 1;
            tweets.push(t);
            log.push(Record::Tweet(t));
        } else if roll < 0.85 {
            let t = tweets[rng.random_range(0..tweets.len())];
            let week = if rng.random_bool(0.05) {
                t.week.saturating_sub(1)
            } else {
                t.week + rng.random_range(0..6)
            };
            let tweet_id = if rng.random_bool(0.03) { 1 } else { t.tweet_id };
            log.push(Record::Retweet(Retweet {
                tweet_id,
                follower_id: rng.random_range(500..520),
                week,
            }));
        } else {
            log.push(Record::FollowerSample(FollowerSample {
                user_id: rng.random_range(1..=n_users),
                week: rng.random_range(0..=35),
                count: rng.random_range(0..50),
            }));
        }
    }
    log
}
