//! Reference computations for tests.
//!
//! Everything here is written from the definitions, by brute force, and
//! shares no code path with `impact-core` beyond its plain data types.

pub mod brute;
pub mod grid;
pub mod quad;
pub mod random_log;
