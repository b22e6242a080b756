//! Power-law follower-interest model.
//!
//! Every follower retweets at rate `f(t) = c t^-alpha` at age `t`. Followers
//! arrive at a constant rate on top of `s` initial followers, so the user's
//! weekly retweet volume is the running integral (or sum) of `f`, and the
//! per-follower rate divides that volume by the audience size `s + t`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `|alpha - 1|` below this switches to the logarithmic closed form.
pub const ALPHA_ONE_BAND: f64 = 1e-9;

/// Default relative tolerance for [`peak_age`].
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Upper bracket cap for the peak-age search, as a power of two times epsilon.
const MAX_DOUBLINGS: u32 = 64;

const MAX_BISECTIONS: u32 = 400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("{op} is undefined at t = {t}: {reason}")]
    Domain {
        op: &'static str,
        t: f64,
        reason: &'static str,
    },
}

/// Parameters `(c, alpha, epsilon, s)` of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    c: f64,
    alpha: f64,
    epsilon: f64,
    s: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    c: f64,
    alpha: f64,
    epsilon: f64,
    s: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ModelError;

    fn try_from(raw: RawParams) -> Result<Self, ModelError> {
        ModelParams::new(raw.c, raw.alpha, raw.epsilon, raw.s)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            c: p.c,
            alpha: p.alpha,
            epsilon: p.epsilon,
            s: p.s,
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if !value.is_finite() {
        return Err(ModelError::InvalidParam {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value <= 0.0 {
        return Err(ModelError::InvalidParam {
            name,
            value,
            reason: "must be > 0",
        });
    }
    Ok(value)
}

impl ModelParams {
    pub fn new(c: f64, alpha: f64, epsilon: f64, s: f64) -> Result<Self, ModelError> {
        let c = positive("c", c)?;
        let alpha = positive("alpha", alpha)?;
        let epsilon = positive("epsilon", epsilon)?;
        if !s.is_finite() || s < 0.0 {
            return Err(ModelError::InvalidParam {
                name: "s",
                value: s,
                reason: "must be finite and >= 0",
            });
        }
        Ok(Self {
            c,
            alpha,
            epsilon,
            s,
        })
    }

    /// Parameters with the default age offset `epsilon = 1`.
    pub fn with_default_offset(c: f64, alpha: f64, s: f64) -> Result<Self, ModelError> {
        Self::new(c, alpha, 1.0, s)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn with_s(self, s: f64) -> Result<Self, ModelError> {
        Self::new(self.c, self.alpha, self.epsilon, s)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(self.c, alpha, self.epsilon, self.s)
    }

    fn is_log_branch(&self) -> bool {
        (self.alpha - 1.0).abs() < ALPHA_ONE_BAND
    }
}

/// Location and height of the maximum of the per-follower rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakAge {
    pub t_star: f64,
    pub g_at_peak: f64,
    pub converged: bool,
}

fn check_age(op: &'static str, t: f64, allow_zero: bool) -> Result<(), ModelError> {
    if !t.is_finite() {
        return Err(ModelError::Domain {
            op,
            t,
            reason: "age must be finite",
        });
    }
    if t < 0.0 || (!allow_zero && t == 0.0) {
        return Err(ModelError::Domain {
            op,
            t,
            reason: if allow_zero {
                "age must be >= 0"
            } else {
                "age must be > 0"
            },
        });
    }
    Ok(())
}

/// `expm1(a * l) / a`, continued to `l` at `a = 0`.
fn expm1_ratio(a: f64, l: f64) -> f64 {
    if a.abs() < ALPHA_ONE_BAND {
        l
    } else {
        (a * l).exp_m1() / a
    }
}

/// Retweet rate of a single follower at age `t`: `c t^-alpha`.
pub fn follower_rate(params: &ModelParams, t: f64) -> Result<f64, ModelError> {
    check_age("follower_rate", t, false)?;
    Ok(params.c * t.powf(-params.alpha))
}

/// Continuous cumulative rate `F(t) = integral_0^t f(tau + epsilon) dtau`.
///
/// Evaluated as `c eps^(1-alpha) * (1 - (1 + t/eps)^(1-alpha)) / (alpha - 1)`
/// through `expm1`/`ln_1p`, which equals the textbook closed form but keeps
/// full relative precision as `alpha` approaches 1.
pub fn cumulative_rate(params: &ModelParams, t: f64) -> Result<f64, ModelError> {
    check_age("cumulative_rate", t, true)?;
    let eps = params.epsilon;
    let log_growth = (t / eps).ln_1p();
    if params.is_log_branch() {
        return Ok(params.c * log_growth);
    }
    let a = 1.0 - params.alpha;
    Ok(params.c * eps.powf(a) * expm1_ratio(a, log_growth))
}

/// Per-follower rate `G_s(t) = F(t) / (s + t)`.
pub fn per_follower_rate(params: &ModelParams, t: f64) -> Result<f64, ModelError> {
    check_age("per_follower_rate", t, true)?;
    if params.s == 0.0 && t == 0.0 {
        return Err(ModelError::Domain {
            op: "per_follower_rate",
            t,
            reason: "0/0 with no initial followers",
        });
    }
    Ok(cumulative_rate(params, t)? / (params.s + t))
}

/// First-order condition of `G_s`, scaled so that it is negative before the
/// peak and positive after it for every `alpha`:
/// `(t + eps) * ((1 + t/eps)^(alpha-1) - 1) / (alpha - 1) - (s + t)`.
fn normalized_gap(params: &ModelParams, t: f64) -> f64 {
    let eps = params.epsilon;
    let log_growth = (t / eps).ln_1p();
    (t + eps) * expm1_ratio(params.alpha - 1.0, log_growth) - (params.s + t)
}

/// Extremum gap `h(t) - alpha t`, with
/// `h(t) = eps^-(alpha-1) (t+eps)^alpha - (alpha-1) s - eps`.
///
/// Its unique root on `[0, inf)` is the peak age. For `alpha > 1` it is
/// negative before the peak and positive after; for `alpha < 1` the signs are
/// reversed. Within the `alpha = 1` band the condition
/// `log(1 + t/eps) - (s + t)/(t + eps)` is returned instead (negative before,
/// positive after).
pub fn extremum_gap(params: &ModelParams, t: f64) -> Result<f64, ModelError> {
    check_age("extremum_gap", t, true)?;
    let q = normalized_gap(params, t);
    if params.is_log_branch() {
        Ok(q / (t + params.epsilon))
    } else {
        Ok((params.alpha - 1.0) * q)
    }
}

/// Unique maximiser of `G_s` on `[0, inf)`.
///
/// For `s = 0` the maximum sits on the boundary: `t_star = 0` and
/// `g_at_peak` is the limit `G_0(0+)`, taken as `G_0(rel_tol)`. For `s > 0`
/// the root of the extremum gap is bracketed by doubling from `epsilon` and
/// refined by bisection until the bracket is narrower than
/// `rel_tol * max(1, t)`.
pub fn peak_age(params: &ModelParams, rel_tol: f64) -> Result<PeakAge, ModelError> {
    let rel_tol = positive("rel_tol", rel_tol)?;
    if params.s == 0.0 {
        return Ok(PeakAge {
            t_star: 0.0,
            g_at_peak: per_follower_rate(params, rel_tol)?,
            converged: true,
        });
    }

    let mut lo = 0.0;
    let mut hi = params.epsilon;
    let mut doublings = 0;
    while normalized_gap(params, hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            let t = lo;
            return Ok(PeakAge {
                t_star: t,
                g_at_peak: per_follower_rate(params, t)?,
                converged: false,
            });
        }
    }

    let mut converged = false;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.max(1.0) || mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        if normalized_gap(params, mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    Ok(PeakAge {
        t_star,
        g_at_peak: per_follower_rate(params, t_star)?,
        converged,
    })
}

/// Supremum `c eps^-(alpha-1) / (alpha-1)` of `F` when `alpha > 1`; `None`
/// when `F` grows without bound.
pub fn rate_bound(params: &ModelParams) -> Option<f64> {
    if params.alpha <= 1.0 || params.is_log_branch() {
        return None;
    }
    let a = params.alpha - 1.0;
    Some(params.c * params.epsilon.powf(-a) / a)
}

fn check_step(op: &'static str, t: u64) -> Result<(), ModelError> {
    if t < 1 {
        return Err(ModelError::Domain {
            op,
            t: t as f64,
            reason: "discrete time starts at 1",
        });
    }
    Ok(())
}

/// Discrete cumulative rate `sum_{tau=1}^t f(tau)`, no age offset.
pub fn discrete_cumulative(params: &ModelParams, t: u64) -> Result<f64, ModelError> {
    check_step("discrete_cumulative", t)?;
    Ok(DiscreteSums::new(*params).take(t as usize).last().unwrap_or(0.0))
}

/// Discrete per-follower rate `F(t) / (s + t)`.
pub fn discrete_per_follower(params: &ModelParams, t: u64) -> Result<f64, ModelError> {
    let total = discrete_cumulative(params, t)?;
    Ok(total / (params.s + t as f64))
}

/// Running sums `F(1), F(2), ...` of the discrete model.
#[derive(Debug, Clone)]
pub struct DiscreteSums {
    params: ModelParams,
    tau: u64,
    total: f64,
}

impl DiscreteSums {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            tau: 0,
            total: 0.0,
        }
    }
}

impl Iterator for DiscreteSums {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.tau += 1;
        self.total += self.params.c * (self.tau as f64).powf(-self.params.alpha);
        Some(self.total)
    }
}
