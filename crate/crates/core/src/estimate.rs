//! Power-law fits `c t^-alpha` of cohort curves by least squares in log-log
//! space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::pipeline::CohortSeries;
use crate::log::Week;

/// Fewest strictly positive points a fit accepts.
pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {MIN_FIT_POINTS} positive points, found {found}")]
    InsufficientData { found: usize },
    #[error("ages and values differ in length ({ages} vs {values})")]
    LengthMismatch { ages: usize, values: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub c_hat: f64,
    pub alpha_hat: f64,
    /// Coefficient of determination of the log-log regression.
    pub r_squared: f64,
    pub n_points: usize,
}

/// Ordinary least squares of `ln value` on `ln age` over the strictly positive
/// values. Zero values are dropped, not smoothed; `n_points` reports how many
/// remained.
pub fn fit_power_law(series: &CohortSeries) -> Result<PowerLawFit, FitError> {
    fit_points(&series.ages, &series.values)
}

pub(crate) fn fit_points(ages: &[Week], values: &[f64]) -> Result<PowerLawFit, FitError> {
    if ages.len() != values.len() {
        return Err(FitError::LengthMismatch {
            ages: ages.len(),
            values: values.len(),
        });
    }
    let points: Vec<(f64, f64)> = ages
        .iter()
        .zip(values)
        .filter(|&(&a, &v)| a > 0 && v > 0.0 && v.is_finite())
        .map(|(&a, &v)| (f64::from(a).ln(), v.ln()))
        .collect();
    let n = points.len();
    if n < MIN_FIT_POINTS {
        return Err(FitError::InsufficientData { found: n });
    }

    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        // Distinct positive ages always spread in log space; repeated ages do not.
        return Err(FitError::InsufficientData { found: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    // Spread below rounding noise counts as a flat series, fitted exactly.
    let noise = nf * (4.0 * f64::EPSILON * (1.0 + mean_y.abs())).powi(2);
    let r_squared = if syy > noise {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else if ss_res <= noise {
        1.0
    } else {
        0.0
    };
    Ok(PowerLawFit {
        c_hat: intercept.exp(),
        alpha_hat: -slope,
        r_squared,
        n_points: n,
    })
}

/// Fits of every eligible cohort plus the cohorts that were skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CohortFits {
    pub fits: Vec<(Week, PowerLawFit)>,
    pub skipped: Vec<(Week, FitError)>,
}

/// Fits each cohort independently; both lists are ordered by start week.
pub fn fit_all_cohorts(cohorts: &[CohortSeries]) -> CohortFits {
    #[cfg(feature = "parallel")]
    let results: Vec<(Week, Result<PowerLawFit, FitError>)> = {
        use rayon::prelude::*;
        cohorts
            .par_iter()
            .map(|c| (c.start_week, fit_power_law(c)))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(Week, Result<PowerLawFit, FitError>)> = cohorts
        .iter()
        .map(|c| (c.start_week, fit_power_law(c)))
        .collect();

    let mut out = CohortFits::default();
    for (week, result) in results {
        match result {
            Ok(fit) => out.fits.push((week, fit)),
            Err(e) => out.skipped.push((week, e)),
        }
    }
    out.fits.sort_by_key(|f| f.0);
    out.skipped.sort_by_key(|s| s.0);
    out
}
