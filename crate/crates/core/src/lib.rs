//! Modeling and analysis of per-user social-media impact over a career.
//!
//! * [`model`]: closed forms of the power-law follower-interest model and the
//!   peak-age solver.
//! * [`sim`]: seeded simulation of careers that emits [`log::EventLog`]s.
//! * [`pipeline`]: weekly median-of-means career curves and follower cohorts.
//! * [`estimate`]: log-log least-squares power-law fits of cohort curves.

pub mod estimate;
pub mod log;
pub mod model;
pub mod pipeline;
pub mod sim;

pub use estimate::{fit_all_cohorts, fit_power_law, CohortFits, FitError, PowerLawFit};
pub use log::{EventLog, LogError, Record};
pub use model::{ModelError, ModelParams, PeakAge};
pub use pipeline::{CareerCurve, CohortSeries, FollowerHistory, LogIndex, PipelineError, Stratum};
pub use sim::{simulate_career, simulate_population, SimConfig, SimError};
