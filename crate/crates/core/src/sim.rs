//! Seeded simulation of user careers under constant follower influx and
//! power-law decaying follower interest.
//!
//! Each follower retweets Poisson(`f(age)`) times per week, where a follower
//! that arrived in week `a` has age `t - a + 1` in week `t`. Followers that
//! arrived in the same week share a rate, so their retweets are drawn as one
//! Poisson total and spread uniformly over the group; by Poisson splitting
//! this is the same law as independent per-follower draws but costs time
//! proportional to the number of retweets.
//!
//! Randomness comes from ChaCha8 seeded with the configured `u64`, which is
//! portable and reproducible across platforms. Users of a population get
//! their own stream from [`derive_seed`].

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log::{EventLog, FollowerSample, Retweet, Tweet, UserId, Week};
use crate::model::{follower_rate, ModelParams};

/// Largest user id the simulator accepts; tweet and follower ids are
/// `user_id << 32 | sequence`.
pub const MAX_SIM_USER_ID: UserId = u32::MAX as UserId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    /// Expected new followers per week.
    pub follower_arrival_rate: f64,
    pub tweets_per_week: u32,
    pub horizon_weeks: u32,
    pub n_users: u32,
    pub seed: u64,
    /// Add exactly `floor(rate * t) - floor(rate * (t - 1))` followers in week
    /// `t` instead of a Poisson draw.
    #[serde(default)]
    pub deterministic_arrivals: bool,
    /// Whether the `floor(s)` initial followers retweet. When false they only
    /// count towards the audience, which reproduces `F(t) = sum f(tau)`.
    #[serde(default)]
    pub initial_followers_retweet: bool,
}

impl SimConfig {
    /// Config with Poisson arrivals and inactive initial followers.
    pub fn new(
        params: ModelParams,
        follower_arrival_rate: f64,
        tweets_per_week: u32,
        horizon_weeks: u32,
        n_users: u32,
        seed: u64,
    ) -> Self {
        Self {
            params,
            follower_arrival_rate,
            tweets_per_week,
            horizon_weeks,
            n_users,
            seed,
            deterministic_arrivals: false,
            initial_followers_retweet: false,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if !(self.follower_arrival_rate.is_finite() && self.follower_arrival_rate > 0.0) {
            return bad(format!(
                "follower_arrival_rate must be finite and > 0, got {}",
                self.follower_arrival_rate
            ));
        }
        if self.tweets_per_week == 0 {
            return bad("tweets_per_week must be >= 1".into());
        }
        if self.horizon_weeks == 0 {
            return bad("horizon_weeks must be >= 1".into());
        }
        if self.n_users == 0 {
            return bad("n_users must be >= 1".into());
        }
        Ok(())
    }
}

/// Per-user seed: SplitMix64 of `seed + (index + 1) * golden_gamma`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only fails for non-finite or non-positive means.
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Followers that arrived in the same week.
struct ArrivalGroup {
    first_id: u64,
    size: u64,
    week: Week,
}

/// Simulates one career with the config's seed, emitting tweets in weeks
/// `1..=horizon_weeks`, joined in week 1.
pub fn simulate_career(config: &SimConfig, user_id: UserId) -> Result<EventLog, SimError> {
    config.validate()?;
    if user_id > MAX_SIM_USER_ID {
        return Err(SimError::InvalidConfig(format!(
            "user_id {user_id} exceeds {MAX_SIM_USER_ID}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let params = &config.params;
    let id_base = user_id << 32;
    let mut next_follower = id_base + 1;
    let mut next_tweet = id_base;

    let mut log = EventLog::new();
    log.join_week.insert(user_id, 1);

    let initial = params.s().floor() as u64;
    let mut followers = initial;
    let mut groups: Vec<ArrivalGroup> = Vec::with_capacity(config.horizon_weeks as usize + 1);
    if initial > 0 {
        if config.initial_followers_retweet {
            groups.push(ArrivalGroup {
                first_id: next_follower,
                size: initial,
                week: 0,
            });
        }
        next_follower += initial;
    }
    log.follower_samples.push(FollowerSample {
        user_id,
        week: 0,
        count: followers,
    });

    let rate = config.follower_arrival_rate;
    let k = u64::from(config.tweets_per_week);
    for week in 1..=config.horizon_weeks {
        let arrivals = if config.deterministic_arrivals {
            let t = f64::from(week);
            ((rate * t).floor() - (rate * (t - 1.0)).floor()) as u64
        } else {
            poisson(&mut rng, rate)
        };
        if arrivals > 0 {
            groups.push(ArrivalGroup {
                first_id: next_follower,
                size: arrivals,
                week,
            });
            next_follower += arrivals;
            followers += arrivals;
        }
        log.follower_samples.push(FollowerSample {
            user_id,
            week,
            count: followers,
        });

        let first_tweet = next_tweet;
        for _ in 0..k {
            log.tweets.push(Tweet {
                user_id,
                tweet_id: next_tweet,
                week,
            });
            next_tweet += 1;
        }

        for group in &groups {
            let age = f64::from(week - group.week + 1);
            let per_follower = follower_rate(params, age).unwrap_or(0.0);
            let n = poisson(&mut rng, per_follower * group.size as f64);
            for _ in 0..n {
                let follower_id = group.first_id + rng.random_range(0..group.size);
                let tweet_id = first_tweet + rng.random_range(0..k);
                log.retweets.push(Retweet {
                    tweet_id,
                    follower_id,
                    week,
                });
            }
        }
    }
    Ok(log)
}

/// Simulates `n_users` independent careers with user ids `1..=n_users`; user
/// `i` uses seed `derive_seed(seed, i - 1)`.
pub fn simulate_population(config: &SimConfig) -> Result<EventLog, SimError> {
    config.validate()?;
    let career = |index: u32| {
        let cfg = SimConfig {
            seed: derive_seed(config.seed, u64::from(index)),
            ..*config
        };
        simulate_career(&cfg, UserId::from(index) + 1)
    };

    #[cfg(feature = "parallel")]
    let careers: Vec<Result<EventLog, SimError>> = {
        use rayon::prelude::*;
        (0..config.n_users).into_par_iter().map(career).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let careers: Vec<Result<EventLog, SimError>> = (0..config.n_users).map(career).collect();

    let mut log = EventLog::new();
    for c in careers {
        log.extend(c?);
    }
    Ok(log)
}
